//! Generalized martingale maximal operators on finite dyadic filtrations.
//!
//! The space is a finite forest of "cubes" over atomic leaves carrying two
//! measures `mu` and `nu`. On it this crate evaluates
//!
//! ```text
//! M_a^q fμ(x) = ( Σ_{Q ∋ x} |(∫_Q f dμ) a_Q(x)|^q )^{1/q}      (sup for q = ∞)
//! ```
//!
//! and checks, numerically and per instance, the two-weight theory around it:
//! the testing characterization `B ≤ A ≤ C(p)·B`, the martingale Carleson
//! embedding, the stopping-cube decomposition behind the upper bound, and the
//! change of weight that turns a three-measure maximal estimate into a
//! two-measure one.
//!
//! ## Modules
//!
//! - [`lattice`]: models, functions, integrals, norms, random instances, file format
//! - [`operator`]: `M_a^q`, its cube and depth truncations, classical coefficients
//! - [`constants`]: `C(p)`, the testing constant `B`, lower bounds and an exhaustive oracle for `A`
//! - [`stopping`]: stopping cubes, packing, Carleson embedding, the full bound chain
//! - [`sawyer`]: three-measure to two-measure reduction
//! - [`sweep`]: batch generation, verification and CSV summaries behind the CLI
//!
//! ## Examples
//!
//! Each capability has a runnable example under `examples/`:
//!
//! ```bash
//! cargo run -p dyadic-maximal --example build_model
//! cargo run -p dyadic-maximal --example maximal_operator
//! cargo run -p dyadic-maximal --example testing_sandwich
//! cargo run -p dyadic-maximal --example bruteforce_oracle
//! cargo run -p dyadic-maximal --example stopping_cubes
//! cargo run -p dyadic-maximal --example carleson_embedding
//! cargo run -p dyadic-maximal --example proof_chain
//! cargo run -p dyadic-maximal --example sawyer_reduction
//! cargo run -p dyadic-maximal --example random_sweep
//! ```

// Validity checks are written `!(x > bound)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
mod error;
pub mod lattice;
pub mod operator;
pub mod sawyer;
pub mod stopping;
pub mod sweep;
pub mod tolerance;

pub use error::{Error, Result};
pub use lattice::{
    average, build_model, integrate, lp_norm, random_model, BuildOptions, DyadicModel, Exponent, Exponents,
    FunctionOnX, Measure,
};
pub use operator::{apply_depth_truncated, apply_maximal, apply_truncated, CoefficientFamily, MaximalOutput};
