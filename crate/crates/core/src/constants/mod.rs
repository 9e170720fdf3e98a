//! Constants of the two-weight estimate `‖M_a^q fμ‖_{L^p(ν)} ≤ A ‖f‖_{L^p(μ)}`.
//!
//! The best constant `A` is a supremum over an infinite cone and is not
//! computed exactly. Instead a certified lower bound `A_lower` (the best
//! ratio among explicit candidates) is paired with the testing constant `B`
//! and the upper bound `C(p)·B`, so both directions of the characterization
//! become falsifiable checks:
//!
//! ```text
//! B ≤ A_lower ≤ A ≤ C(p)·B,   C(p) = ((1 + 1/p)^{p+1} p)^{1/p} p'
//! ```

mod bruteforce;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Pareto};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{weighted_norm, DyadicModel, Exponent, Exponents, FunctionOnX, Measure};
use crate::operator::{values_from_integrals, CoefficientFamily, Truncation};
use crate::tolerance;

pub use bruteforce::{operator_norm_bruteforce, MAX_BRUTEFORCE_LEAVES};

/// Hölder conjugate `p' = p / (p - 1)`.
pub fn holder_conjugate(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidExponent(format!("Hölder conjugate needs p > 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(1.0);
    }
    Ok(p / (p - 1.0))
}

/// `C(p) = ((1 + 1/p)^{p+1} · p)^{1/p} · p'`.
///
/// Evaluated in log space so that large `p` neither overflows nor loses the
/// `(1 + 1/p)^{p+1} → e` limit.
pub fn theorem_constant(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("C(p) needs finite p > 1, got {p}")));
    }
    let log_inner = (p + 1.0) * (1.0 / p).ln_1p() + p.ln();
    Ok((log_inner / p).exp() * holder_conjugate(p)?)
}

/// The testing constant and the cube attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct TestingConstant {
    pub value: f64,
    pub witness: Option<usize>,
}

/// `B = max_Q ‖M_{a,Q}^q(1_Q μ)‖_{L^p(ν)} / μ(Q)^{1/p}` over cubes with `μ(Q) > 0`.
///
/// Ties go to the smallest node index. With no cube of positive mass the
/// result is `B = 0` without a witness.
pub fn testing_constant(model: &DyadicModel, a: &CoefficientFamily, exps: Exponents) -> Result<TestingConstant> {
    a.check_model(model)?;
    let p = exps.p();
    let nu = model.leaf_masses(Measure::Nu);
    // ∫_R 1_Q dμ = μ(R) for every R ⊆ Q, which is all the truncation sees.
    let mu_node = model.node_masses(Measure::Mu);
    let mut best = TestingConstant {
        value: 0.0,
        witness: None,
    };
    let mut out = Vec::new();
    for (q_idx, &mass) in mu_node.iter().enumerate() {
        if !(mass > 0.0) {
            continue;
        }
        values_from_integrals(model, a, mu_node, exps.q(), Truncation::Cube(q_idx), &mut out);
        let range = model.nodes()[q_idx].leaf_range();
        let norm = weighted_norm(&out[range.clone()], &nu[range], Exponent::Finite(p));
        let ratio = norm / mass.powf(1.0 / p);
        if best.witness.is_none() || ratio > best.value {
            best = TestingConstant {
                value: ratio,
                witness: Some(q_idx),
            };
        }
    }
    Ok(best)
}

/// Candidate budget for the lower-bound search on `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub random_candidates: usize,
    pub ascent_rounds: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            random_candidates: 200,
            ascent_rounds: 50,
            seed: 0,
        }
    }
}

/// Where the best candidate of the search came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum WitnessOrigin {
    Indicator(usize),
    Random(usize),
    Ascent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormLowerBound {
    pub value: f64,
    pub witness: FunctionOnX,
    pub origin: WitnessOrigin,
}

/// Ratio `‖M_a^q fμ‖_{L^p(ν)} / ‖f‖_{L^p(μ)}` with reusable buffers.
pub(crate) struct RatioEvaluator<'a> {
    model: &'a DyadicModel,
    a: &'a CoefficientFamily,
    exps: Exponents,
    integrals: Vec<f64>,
    out: Vec<f64>,
}

impl<'a> RatioEvaluator<'a> {
    pub(crate) fn new(model: &'a DyadicModel, a: &'a CoefficientFamily, exps: Exponents) -> Self {
        Self {
            model,
            a,
            exps,
            integrals: Vec::new(),
            out: Vec::new(),
        }
    }

    /// `None` when `‖f‖_{L^p(μ)} = 0`.
    pub(crate) fn ratio(&mut self, f: &[f64]) -> Option<f64> {
        let p = Exponent::Finite(self.exps.p());
        let denom = weighted_norm(f, self.model.leaf_masses(Measure::Mu), p);
        if !(denom > 0.0) {
            return None;
        }
        let mu = self.model.leaf_masses(Measure::Mu);
        let weighted: Vec<f64> = f.iter().zip(mu).map(|(v, m)| v * m).collect();
        self.integrals = self.model.accumulate(&weighted);
        values_from_integrals(
            self.model,
            self.a,
            &self.integrals,
            self.exps.q(),
            Truncation::None,
            &mut self.out,
        );
        let num = weighted_norm(&self.out, self.model.leaf_masses(Measure::Nu), p);
        Some(num / denom)
    }
}

/// Lower bound for the best constant `A`: the largest ratio over all cube
/// indicators, `random_candidates` heavy-tailed nonnegative functions, and
/// `ascent_rounds` single-coordinate ascent steps from the best of those.
///
/// Each random candidate draws from its own stream of the seeded generator,
/// so the result does not depend on evaluation order.
pub fn operator_norm_lower(
    model: &DyadicModel,
    a: &CoefficientFamily,
    exps: Exponents,
    budget: SearchBudget,
) -> Result<NormLowerBound> {
    a.check_model(model)?;
    let mut eval = RatioEvaluator::new(model, a, exps);
    let mut best: Option<NormLowerBound> = None;
    let mut consider = |f: Vec<f64>, origin: WitnessOrigin, eval: &mut RatioEvaluator<'_>| {
        if let Some(r) = eval.ratio(&f) {
            if best.as_ref().is_none_or(|b| r > b.value) {
                best = Some(NormLowerBound {
                    value: r,
                    witness: FunctionOnX::new(f),
                    origin,
                });
            }
        }
    };

    for node in 0..model.node_count() {
        let f = FunctionOnX::indicator(model, node)?.into_inner();
        consider(f, WitnessOrigin::Indicator(node), &mut eval);
    }

    let tail = Pareto::new(1.0, 1.2).expect("valid Pareto parameters");
    for k in 0..budget.random_candidates {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        rng.set_stream(k as u64 + 1);
        let f: Vec<f64> = (0..model.leaf_count())
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    tail.sample(&mut rng)
                }
            })
            .collect();
        consider(f, WitnessOrigin::Random(k), &mut eval);
    }

    let mut best = best.ok_or(Error::DegenerateCandidates)?;

    let coords: Vec<usize> = model
        .leaf_masses(Measure::Mu)
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(i, _)| i)
        .collect();
    if coords.is_empty() {
        return Ok(best);
    }
    let mut f = best.witness.values().to_vec();
    let mut value = best.value;
    for round in 0..budget.ascent_rounds {
        let i = coords[round % coords.len()];
        let old = f[i];
        let mean = f.iter().sum::<f64>() / f.len() as f64;
        let moves = [2.0 * old, 0.5 * old, 0.0, old + mean.max(f64::MIN_POSITIVE)];
        let mut chosen = old;
        for &v in &moves {
            if v == old {
                continue;
            }
            f[i] = v;
            if let Some(r) = eval.ratio(&f) {
                if r > value {
                    value = r;
                    chosen = v;
                }
            }
        }
        f[i] = chosen;
    }
    if value > best.value {
        best = NormLowerBound {
            value,
            witness: FunctionOnX::new(f),
            origin: WitnessOrigin::Ascent,
        };
    }
    Ok(best)
}

/// Options for [`verify_theorem`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub search: SearchBudget,
    /// Relative tolerance of the two inequalities.
    pub tolerance: f64,
    /// Multiplier applied to `C(p)`; anything but `1` deliberately falsifies the bound.
    pub cp_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            search: SearchBudget::default(),
            tolerance: tolerance::INEQUALITY,
            cp_scale: 1.0,
        }
    }
}

/// Outcome of one sandwich check.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsReport {
    pub p: f64,
    pub q: Exponent,
    pub b: f64,
    pub a_lower: f64,
    pub c_p: f64,
    pub witness_cube: Option<usize>,
    pub witness_function: FunctionOnX,
    pub witness_origin: WitnessOrigin,
    /// `(A_lower - B, C(p)·B - A_lower)`; both nonnegative when the sandwich holds.
    pub margins: (f64, f64),
}

impl ConstantsReport {
    /// The first violated side of `B ≤ A_lower ≤ C(p)·B`, if any.
    pub fn check(&self, tol: f64) -> Result<()> {
        if !tolerance::le_rel(self.b, self.a_lower, tol) {
            return Err(Error::SandwichViolation {
                side: "lower",
                lhs: self.b,
                rhs: self.a_lower,
            });
        }
        if !tolerance::le_rel(self.a_lower, self.c_p * self.b, tol) {
            return Err(Error::SandwichViolation {
                side: "upper",
                lhs: self.a_lower,
                rhs: self.c_p * self.b,
            });
        }
        Ok(())
    }

    /// Observed `A_lower / B`, `None` when `B = 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.b > 0.0).then(|| self.a_lower / self.b)
    }
}

/// Compute `B`, `A_lower` and `C(p)` without judging them.
pub fn constants_report(
    model: &DyadicModel,
    a: &CoefficientFamily,
    exps: Exponents,
    opts: &VerifyOptions,
) -> Result<ConstantsReport> {
    let b = testing_constant(model, a, exps)?;
    let lower = operator_norm_lower(model, a, exps, opts.search)?;
    let c_p = theorem_constant(exps.p())? * opts.cp_scale;
    Ok(ConstantsReport {
        p: exps.p(),
        q: exps.q(),
        b: b.value,
        a_lower: lower.value,
        c_p,
        witness_cube: b.witness,
        witness_function: lower.witness,
        witness_origin: lower.origin,
        margins: (lower.value - b.value, c_p * b.value - lower.value),
    })
}

/// Check `B ≤ A_lower ≤ C(p)·B` on one instance. A violation means a bug,
/// since the inequality is a theorem.
pub fn verify_theorem(
    model: &DyadicModel,
    a: &CoefficientFamily,
    exps: Exponents,
    opts: &VerifyOptions,
) -> Result<ConstantsReport> {
    let report = constants_report(model, a, exps, opts)?;
    report.check(opts.tolerance)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{e1, single_leaf};

    fn exps(p: f64, q: Exponent) -> Exponents {
        Exponents::new(p, q).unwrap()
    }

    #[test]
    fn holder_examples() {
        assert_eq!(holder_conjugate(2.0).unwrap(), 2.0);
        assert!((holder_conjugate(4.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((holder_conjugate(1.01).unwrap() - 101.0).abs() < 1e-10);
        assert!(holder_conjugate(1.0).is_err());
        assert!(holder_conjugate(0.5).is_err());
    }

    #[test]
    fn theorem_constant_examples() {
        assert!((theorem_constant(2.0).unwrap() - 27f64.sqrt()).abs() < 1e-14);
        assert!((theorem_constant(1e6).unwrap() - 1.0).abs() < 1e-3);
        assert!(theorem_constant(1.0).is_err());
        assert!(theorem_constant(f64::INFINITY).is_err());
    }

    #[test]
    fn theorem_constant_matches_direct_formula() {
        for p in [1.1f64, 1.5, 2.0, 3.0, 7.5, 40.0] {
            let pc = p / (p - 1.0);
            let direct = ((1.0 + 1.0 / p).powf(p + 1.0) * p).powf(1.0 / p) * pc;
            assert!((theorem_constant(p).unwrap() / direct - 1.0).abs() < 1e-13, "p={p}");
        }
    }

    #[test]
    fn e1_testing_constant() {
        let m = e1();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let b = testing_constant(&m, &a, exps(2.0, Exponent::Infinity)).unwrap();
        assert!((b.value - 2.0).abs() < 1e-15);
        assert_eq!(b.witness, Some(0));
    }

    #[test]
    fn single_leaf_testing_constant() {
        let m = single_leaf(1.0, 1.0);
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        for p in [1.5, 2.0, 5.0] {
            let b = testing_constant(&m, &a, exps(p, Exponent::Infinity)).unwrap();
            assert!((b.value - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_constants() {
        let m = e1();
        let a = CoefficientFamily::constant(&m, 0.0).unwrap();
        let report = verify_theorem(&m, &a, exps(2.0, Exponent::Finite(3.0)), &VerifyOptions::default()).unwrap();
        assert_eq!(report.b, 0.0);
        assert_eq!(report.a_lower, 0.0);
    }

    #[test]
    fn null_mu_has_no_witness() {
        let m = e1().with_measures(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let b = testing_constant(&m, &a, exps(2.0, Exponent::Infinity)).unwrap();
        assert_eq!(
            b,
            TestingConstant {
                value: 0.0,
                witness: None
            }
        );
        assert!(matches!(
            operator_norm_lower(&m, &a, exps(2.0, Exponent::Infinity), SearchBudget::default()),
            Err(Error::DegenerateCandidates)
        ));
    }

    #[test]
    fn e1_lower_bound_is_two() {
        // Indicator ratios: 1_{Q0} gives 2√2/√2 = 2; 1_{L1} gives M = (1, 1), ratio √2.
        let m = e1();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let lb = operator_norm_lower(&m, &a, exps(2.0, Exponent::Infinity), SearchBudget::default()).unwrap();
        assert!((lb.value - 2.0).abs() < 1e-12, "{}", lb.value);
    }

    #[test]
    fn e1_report() {
        let m = e1();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let r = verify_theorem(&m, &a, exps(2.0, Exponent::Infinity), &VerifyOptions::default()).unwrap();
        assert!((r.b - 2.0).abs() < 1e-15);
        assert!((r.a_lower - 2.0).abs() < 1e-12);
        assert!((r.c_p - 5.196152422706632).abs() < 1e-12);
        assert!(r.margins.0.abs() < 1e-12);
        assert!((r.margins.1 - (2.0 * 27f64.sqrt() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn search_is_deterministic_and_scale_invariant() {
        let m = crate::random_model(&Default::default(), 4).unwrap();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let e = exps(1.5, Exponent::Finite(3.0));
        let budget = SearchBudget {
            seed: 17,
            ..Default::default()
        };
        let x = operator_norm_lower(&m, &a, e, budget).unwrap();
        let y = operator_norm_lower(&m, &a, e, budget).unwrap();
        assert_eq!(x, y);
        let mut ev = RatioEvaluator::new(&m, &a, e);
        let r1 = ev.ratio(x.witness.values()).unwrap();
        let r2 = ev.ratio(x.witness.scaled(37.5).values()).unwrap();
        assert!((r1 - r2).abs() <= 1e-12 * r1);
        assert!((r1 - x.value).abs() <= 1e-12 * r1);
    }

    #[test]
    fn halved_constant_is_caught() {
        let m = e1();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let opts = VerifyOptions {
            cp_scale: 0.5,
            ..Default::default()
        };
        let err = verify_theorem(&m, &a, exps(10.0, Exponent::Infinity), &opts).unwrap_err();
        assert!(matches!(err, Error::SandwichViolation { side: "upper", .. }));
    }
}
