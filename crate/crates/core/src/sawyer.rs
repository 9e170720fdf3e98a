//! Change of weight from the three-measure maximal estimate
//! `‖M^α(fω)‖_{L^p(ν)} ≤ A ‖f‖_{L^p(μ̃)}`, `dμ̃ = w dω`, to the two-measure
//! estimate for `M_a^∞` with `a_Q = ω(Q)^{-α}`.
//!
//! With `μ = w^{-p'/p} ω` and `g = w^{p'/p} f` one has, atom by atom,
//! `g dμ = f dω` and `|g|^p dμ = |f|^p w dω` (because `p'(1 - 1/p) = 1`), so
//! both the operator values and the norms match exactly and the two best
//! constants coincide.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    build_model, random_model_with, BuildOptions, DyadicModel, Exponent, FunctionOnX, MassDistribution, Measure,
    ModelSpec, RandomModelParams,
};
use crate::operator::{apply_maximal, apply_truncated, classical_coefficients, CoefficientFamily};
use crate::tolerance;

/// Tree shape and `ν`, plus the base measure `ω`, the density `w` of `μ̃`
/// with respect to `ω`, the fractional exponent `α` and `p`.
///
/// The `μ` stored in `model` is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct SawyerInstance {
    pub model: DyadicModel,
    pub omega: Vec<f64>,
    pub w: Vec<f64>,
    pub alpha: f64,
    pub p: f64,
}

impl SawyerInstance {
    pub fn new(model: DyadicModel, omega: Vec<f64>, w: Vec<f64>, alpha: f64, p: f64) -> Result<Self> {
        for v in [&omega, &w] {
            if v.len() != model.leaf_count() {
                return Err(Error::LengthMismatch {
                    expected: model.leaf_count(),
                    got: v.len(),
                });
            }
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "leaf value {x} is not finite and nonnegative"
                )));
            }
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponent(format!("p must lie in (1, inf), got {p}")));
        }
        Ok(Self {
            model,
            omega,
            w,
            alpha,
            p,
        })
    }

    /// Leaf masses of `μ̃ = w·ω`.
    pub fn mu_tilde(&self) -> Vec<f64> {
        self.w.iter().zip(&self.omega).map(|(w, o)| w * o).collect()
    }
}

/// The two-measure form of a [`SawyerInstance`].
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// Leaf masses of `μ = w^{-p'/p} ω`.
    pub mu: Vec<f64>,
    /// `a_Q = ω(Q)^{-α}`.
    pub coefficients: CoefficientFamily,
    /// `p'/p = 1/(p-1)`.
    pub exponent: f64,
    density: Vec<f64>,
}

impl Reduction {
    /// `g = w^{p'/p} f`.
    pub fn transform(&self, f: &FunctionOnX) -> FunctionOnX {
        FunctionOnX::new(
            f.values()
                .iter()
                .zip(&self.density)
                .map(|(v, w)| if *w > 0.0 { w.powf(self.exponent) * v } else { 0.0 })
                .collect(),
        )
    }
}

pub fn reduce_three_to_two(inst: &SawyerInstance) -> Result<Reduction> {
    let exponent = 1.0 / (inst.p - 1.0);
    let mut mu = Vec::with_capacity(inst.omega.len());
    for (pos, (&o, &w)) in inst.omega.iter().zip(&inst.w).enumerate() {
        mu.push(if o == 0.0 {
            0.0
        } else if w == 0.0 {
            let leaf = inst.model.leaves()[pos];
            return Err(Error::InfiniteReducedMass(inst.model.nodes()[leaf].id().to_string()));
        } else {
            w.powf(-exponent) * o
        });
    }
    Ok(Reduction {
        mu,
        coefficients: classical_coefficients(&inst.model, &inst.omega, inst.alpha)?,
        exponent,
        density: inst.w.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    /// Largest relative gap between `∫_Q g dμ` and `∫_Q f dω` over all cubes.
    pub integral_error: f64,
    /// Largest relative gap between `M_a^q(gμ)` and `M^α(fω)` over all atoms.
    pub operator_error: f64,
    pub norm_reduced: f64,
    pub norm_original: f64,
    pub norm_error: f64,
}

impl ReductionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.integral_error <= tol && self.operator_error <= tol && self.norm_error <= tol
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        for (identity, error) in [
            ("integrals", self.integral_error),
            ("operator", self.operator_error),
            ("norms", self.norm_error),
        ] {
            if !(error <= tol) {
                return Err(Error::ReductionMismatch { identity, error });
            }
        }
        Ok(())
    }
}

struct Sides {
    reduced: DyadicModel,
    base: DyadicModel,
    g: FunctionOnX,
    red: Reduction,
}

fn sides(inst: &SawyerInstance, f: &FunctionOnX) -> Result<Sides> {
    f.check_len(&inst.model)?;
    f.check_nonnegative()?;
    let red = reduce_three_to_two(inst)?;
    let nu = inst.model.leaf_masses(Measure::Nu).to_vec();
    let reduced = inst.model.with_measures(red.mu.clone(), nu.clone())?;
    let base = inst.model.with_measures(inst.omega.clone(), nu)?;
    let g = red.transform(f);
    Ok(Sides { reduced, base, g, red })
}

/// Measure both identities of the change of weight for one `f ≥ 0`.
pub fn reduction_report(inst: &SawyerInstance, f: &FunctionOnX, q: Exponent) -> Result<ReductionReport> {
    let s = sides(inst, f)?;
    let lhs = s.reduced.node_integrals(&s.g, Measure::Mu)?;
    let rhs = s.base.node_integrals(f, Measure::Mu)?;
    let integral_error = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| tolerance::rel_diff(*a, *b))
        .fold(0.0, f64::max);

    let m_two = apply_maximal(&s.reduced, &s.red.coefficients, &s.g, q)?;
    let m_three = apply_maximal(&s.base, &s.red.coefficients, f, q)?;
    let operator_error = m_two
        .values
        .values()
        .iter()
        .zip(m_three.values.values())
        .map(|(a, b)| tolerance::rel_diff(*a, *b))
        .fold(0.0, f64::max);

    let p = Exponent::Finite(inst.p);
    let norm_reduced = crate::lp_norm(&s.reduced, &s.g, p, Measure::Mu)?;
    let tilde = inst
        .model
        .with_measures(inst.mu_tilde(), inst.model.leaf_masses(Measure::Nu).to_vec())?;
    let norm_original = crate::lp_norm(&tilde, f, p, Measure::Mu)?;
    Ok(ReductionReport {
        integral_error,
        operator_error,
        norm_reduced,
        norm_original,
        norm_error: tolerance::rel_diff(norm_reduced, norm_original),
    })
}

/// [`reduction_report`], failing when an identity is off by more than
/// the identity tolerance.
pub fn verify_reduction(inst: &SawyerInstance, f: &FunctionOnX, q: Exponent) -> Result<ReductionReport> {
    let report = reduction_report(inst, f, q)?;
    report.check(tolerance::IDENTITY)?;
    Ok(report)
}

/// `(‖M_a^q(gμ)‖_{L^p(ν)} / ‖g‖_{L^p(μ)}, ‖M^α(fω)‖_{L^p(ν)} / ‖f‖_{L^p(μ̃)})`,
/// `None` when `‖f‖_{L^p(μ̃)} = 0`.
pub fn ratio_pair(inst: &SawyerInstance, f: &FunctionOnX, q: Exponent) -> Result<Option<(f64, f64)>> {
    let s = sides(inst, f)?;
    let p = Exponent::Finite(inst.p);
    let tilde = inst
        .model
        .with_measures(inst.mu_tilde(), inst.model.leaf_masses(Measure::Nu).to_vec())?;
    let den_three = crate::lp_norm(&tilde, f, p, Measure::Mu)?;
    let den_two = crate::lp_norm(&s.reduced, &s.g, p, Measure::Mu)?;
    if !(den_three > 0.0 && den_two > 0.0) {
        return Ok(None);
    }
    let num_two = crate::lp_norm(
        &s.reduced,
        &apply_maximal(&s.reduced, &s.red.coefficients, &s.g, q)?.values,
        p,
        Measure::Nu,
    )?;
    let num_three = crate::lp_norm(
        &s.base,
        &apply_maximal(&s.base, &s.red.coefficients, f, q)?.values,
        p,
        Measure::Nu,
    )?;
    Ok(Some((num_two / den_two, num_three / den_three)))
}

/// Largest relative gap on `Q` between the truncation `M_{a,Q}^∞(1_Q μ)` and
/// `1_Q·M_a^∞(1_Q μ)` for classical coefficients `ω(R)^{-α}`. Zero whenever
/// `ω(Q) > 0`; null-`ω` cubes (coefficient 0) can make it positive.
pub fn truncation_discrepancy(model: &DyadicModel, omega: &[f64], alpha: f64, cube: usize) -> Result<f64> {
    let a = classical_coefficients(model, omega, alpha)?;
    let ind = FunctionOnX::indicator(model, cube)?;
    let truncated = apply_truncated(model, &a, &ind, Exponent::Infinity, cube)?;
    let full = apply_maximal(model, &a, &ind, Exponent::Infinity)?;
    Ok(model.nodes()[cube]
        .leaf_range()
        .map(|x| tolerance::rel_diff(truncated.values.values()[x], full.values.values()[x]))
        .fold(0.0, f64::max))
}

/// File form: the model format plus `omega`, `w`, `alpha` and `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SawyerFile {
    #[serde(flatten)]
    pub model: ModelSpec,
    pub omega: IndexMap<String, f64>,
    pub w: IndexMap<String, f64>,
    pub alpha: f64,
    pub p: f64,
}

pub(crate) fn leaf_values(model: &DyadicModel, map: &IndexMap<String, f64>, name: &'static str) -> Result<Vec<f64>> {
    for key in map.keys() {
        let idx = model.index_of(key)?;
        if !model.nodes()[idx].is_leaf() {
            return Err(Error::NotALeaf(key.clone()));
        }
    }
    model
        .leaves()
        .iter()
        .map(|&l| {
            let id = model.nodes()[l].id();
            map.get(id)
                .copied()
                .ok_or_else(|| Error::MissingMass(id.to_string(), name))
        })
        .collect()
}

pub(crate) fn leaf_map(model: &DyadicModel, values: &[f64]) -> IndexMap<String, f64> {
    model
        .leaves()
        .iter()
        .zip(values)
        .map(|(&l, &v)| (model.nodes()[l].id().to_string(), v))
        .collect()
}

pub fn read_sawyer(text: &str, opts: BuildOptions) -> Result<SawyerInstance> {
    let file: SawyerFile = serde_json::from_str(text)?;
    let model = build_model(&file.model, opts)?;
    let omega = leaf_values(&model, &file.omega, "omega")?;
    let w = leaf_values(&model, &file.w, "w")?;
    SawyerInstance::new(model, omega, w, file.alpha, file.p)
}

pub fn write_sawyer(inst: &SawyerInstance) -> String {
    let file = SawyerFile {
        model: inst.model.to_spec(),
        omega: leaf_map(&inst.model, &inst.omega),
        w: leaf_map(&inst.model, &inst.w),
        alpha: inst.alpha,
        p: inst.p,
    };
    serde_json::to_string_pretty(&file).expect("sawyer files always serialize")
}

/// Random instance: shape and `ν` from `params`, log-normal `ω` with 10%
/// null atoms, log-normal density `w` (zero on half of the null atoms),
/// `α` uniform in `(0, 1]`.
pub fn random_sawyer_instance(params: &RandomModelParams, p: f64, seed: u64) -> Result<SawyerInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_model_with(params, &mut rng)?;
    let omega_law = MassDistribution {
        zero_probability: 0.1,
        ..Default::default()
    };
    let density_law = MassDistribution::default();
    let mut omega = Vec::with_capacity(model.leaf_count());
    let mut w = Vec::with_capacity(model.leaf_count());
    for _ in 0..model.leaf_count() {
        let o = omega_law.sample(&mut rng)?;
        let d = density_law.sample(&mut rng)?;
        let zero_density = o == 0.0 && rng.random_bool(0.5);
        omega.push(o);
        w.push(if zero_density { 0.0 } else { d });
    }
    let alpha = 1.0 - rng.random::<f64>();
    SawyerInstance::new(model, omega, w, alpha, p)
}
