//! Exhaustive oracle for the operator norm on tiny models.
//!
//! Evaluates the operator straight from its definition (every cube, every
//! atom, no shared code with the ancestor-walk evaluator) on all points of
//! the nonnegative simplex grid `{k / ℓ : Σ k = ℓ}` for `ℓ = 1..=resolution`.
//! The ratio is scale invariant, so the simplex covers the nonnegative part
//! of the `L^p(μ)` unit sphere.
//!
//! Each time the running grid maximum improves, the new maximizer is refined
//! by coordinate ascent on successively halved integer lattices with cube
//! integrals evaluated in exact rational arithmetic. The reported value is
//! the running maximum of everything seen, hence nondecreasing in
//! `resolution`.

use num::{BigInt, BigRational, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{DyadicModel, Exponent, Exponents, Measure};
use crate::operator::CoefficientFamily;

pub const MAX_BRUTEFORCE_LEAVES: usize = 4;

/// Halvings of the ascent lattice below the grid spacing.
const REFINE_LEVELS: u32 = 30;
const MAX_SWEEPS_PER_LEVEL: usize = 64;

struct Naive {
    n: usize,
    p: f64,
    q: Exponent,
    /// `members[Q]`: atoms of cube `Q`.
    members: Vec<Vec<usize>>,
    /// `coef[Q][x]`: `a_Q(x)` for `x ∈ Q`.
    coef: Vec<Vec<f64>>,
    mu: Vec<f64>,
    nu: Vec<f64>,
    mu_exact: Vec<BigRational>,
}

impl Naive {
    fn new(model: &DyadicModel, a: &CoefficientFamily, exps: Exponents) -> Self {
        let n = model.leaf_count();
        let leaves = model.leaves();
        let members: Vec<Vec<usize>> = (0..model.node_count())
            .map(|q| (0..n).filter(|&x| model.contains(q, leaves[x])).collect())
            .collect();
        let coef = members
            .iter()
            .enumerate()
            .map(|(q, xs)| {
                let mut row = vec![0.0; n];
                for &x in xs {
                    row[x] = a.value(q, x);
                }
                row
            })
            .collect();
        let mu = model.leaf_masses(Measure::Mu).to_vec();
        let mu_exact = mu
            .iter()
            .map(|&m| BigRational::from_float(m).expect("masses are finite"))
            .collect();
        Self {
            n,
            p: exps.p(),
            q: exps.q(),
            members,
            coef,
            mu,
            nu: model.leaf_masses(Measure::Nu).to_vec(),
            mu_exact,
        }
    }

    fn ratio_with(&self, f: &[f64], integrals: &[f64]) -> Option<f64> {
        let den: f64 = f.iter().zip(&self.mu).map(|(v, m)| v.powf(self.p) * m).sum();
        if !(den > 0.0) {
            return None;
        }
        let mut num = 0.0;
        for x in 0..self.n {
            let mut agg = 0.0f64;
            for (q, xs) in self.members.iter().enumerate() {
                if !xs.contains(&x) {
                    continue;
                }
                let t = (integrals[q] * self.coef[q][x]).abs();
                match self.q {
                    Exponent::Infinity => agg = agg.max(t),
                    Exponent::Finite(qv) => agg += t.powf(qv),
                }
            }
            if let Exponent::Finite(qv) = self.q {
                agg = agg.powf(1.0 / qv);
            }
            num += self.nu[x] * agg.powf(self.p);
        }
        Some((num / den).powf(1.0 / self.p))
    }

    fn ratio(&self, f: &[f64]) -> Option<f64> {
        let integrals: Vec<f64> = self
            .members
            .iter()
            .map(|xs| xs.iter().map(|&x| f[x] * self.mu[x]).sum())
            .collect();
        self.ratio_with(f, &integrals)
    }

    fn ratio_exact(&self, k: &[u64]) -> Option<f64> {
        let integrals: Vec<f64> = self
            .members
            .iter()
            .map(|xs| {
                let mut s = BigRational::zero();
                for &x in xs {
                    s += &self.mu_exact[x] * BigRational::from_integer(BigInt::from(k[x]));
                }
                s.to_f64().unwrap_or(f64::NAN)
            })
            .collect();
        let f: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.ratio_with(&f, &integrals)
    }

    fn refine(&self, start: &[u64]) -> f64 {
        let mut k = start.to_vec();
        let mut best = self.ratio_exact(&k).unwrap_or(0.0);
        for _ in 0..REFINE_LEVELS {
            k.iter_mut().for_each(|v| *v *= 2);
            for _ in 0..MAX_SWEEPS_PER_LEVEL {
                let mut improved = false;
                for i in 0..self.n {
                    for up in [true, false] {
                        if !up && k[i] == 0 {
                            continue;
                        }
                        let old = k[i];
                        k[i] = if up { old + 1 } else { old - 1 };
                        match self.ratio_exact(&k) {
                            Some(r) if r > best => {
                                best = r;
                                improved = true;
                            }
                            _ => k[i] = old,
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
        best
    }
}

/// Visit every `k ∈ ℕ^n` with `Σ k = total`.
fn for_each_composition(n: usize, total: u64, mut visit: impl FnMut(&[u64])) {
    fn rec(k: &mut Vec<u64>, i: usize, left: u64, visit: &mut dyn FnMut(&[u64])) {
        if i + 1 == k.len() {
            k[i] = left;
            visit(k);
            return;
        }
        for v in 0..=left {
            k[i] = v;
            rec(k, i + 1, left - v, visit);
        }
    }
    let mut k = vec![0; n];
    rec(&mut k, 0, total, &mut visit);
}

/// Exhaustive estimate of the best constant `A` on a model with at most
/// [`MAX_BRUTEFORCE_LEAVES`] atoms.
pub fn operator_norm_bruteforce(
    model: &DyadicModel,
    a: &CoefficientFamily,
    exps: Exponents,
    resolution: usize,
) -> Result<f64> {
    let n = model.leaf_count();
    if n > MAX_BRUTEFORCE_LEAVES {
        return Err(Error::TooManyLeaves {
            leaves: n,
            max: MAX_BRUTEFORCE_LEAVES,
        });
    }
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be at least 1".into()));
    }
    a.check_model(model)?;
    let naive = Naive::new(model, a, exps);

    let mut grid_best: Option<(f64, Vec<u64>)> = None;
    let mut result: Option<f64> = None;
    for level in 1..=resolution as u64 {
        let mut improved = false;
        let mut f = vec![0.0; n];
        for_each_composition(n, level, |k| {
            for (dst, &v) in f.iter_mut().zip(k) {
                *dst = v as f64;
            }
            if let Some(r) = naive.ratio(&f) {
                if grid_best.as_ref().is_none_or(|(b, _)| r > *b) {
                    grid_best = Some((r, k.to_vec()));
                    improved = true;
                }
            }
        });
        if improved {
            let (value, point) = grid_best.as_ref().expect("improvement implies a point");
            let refined = naive.refine(point).max(*value);
            result = Some(result.map_or(refined, |r: f64| r.max(refined)));
        }
    }
    result.ok_or(Error::DegenerateCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::theorem_constant;
    use crate::testutil::{e1, single_leaf};

    #[test]
    fn e1_oracle_is_sandwiched() {
        let m = e1();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let exps = Exponents::new(2.0, Exponent::Infinity).unwrap();
        let v = operator_norm_bruteforce(&m, &a, exps, 100).unwrap();
        assert!(v >= 2.0 - 1e-6, "{v}");
        assert!(v <= theorem_constant(2.0).unwrap() * 2.0);
    }

    #[test]
    fn single_leaf_ratio_is_one() {
        let m = single_leaf(1.0, 1.0);
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let exps = Exponents::new(3.0, Exponent::Finite(4.0)).unwrap();
        let v = operator_norm_bruteforce(&m, &a, exps, 10).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nondecreasing_in_resolution() {
        let params = crate::lattice::RandomModelParams {
            depth: 1..=2,
            branching: 1..=2,
            ..Default::default()
        };
        for seed in 0..5 {
            let m = crate::random_model(&params, seed).unwrap();
            if m.leaf_count() > 4 {
                continue;
            }
            let a = CoefficientFamily::constant(&m, 1.0).unwrap();
            let exps = Exponents::new(1.5, Exponent::Finite(2.0)).unwrap();
            let mut prev = 0.0;
            for res in [1, 2, 3, 7, 16, 30] {
                let v = operator_norm_bruteforce(&m, &a, exps, res).unwrap();
                assert!(v >= prev - 1e-12, "seed {seed} res {res}: {v} < {prev}");
                prev = v;
            }
        }
    }

    #[test]
    fn too_many_leaves() {
        let params = crate::lattice::RandomModelParams {
            depth: 1..=1,
            branching: 5..=5,
            ..Default::default()
        };
        let m = crate::random_model(&params, 1).unwrap();
        let a = CoefficientFamily::constant(&m, 1.0).unwrap();
        let exps = Exponents::new(2.0, Exponent::Infinity).unwrap();
        assert!(matches!(
            operator_norm_bruteforce(&m, &a, exps, 4),
            Err(Error::TooManyLeaves { leaves: 5, max: 4 })
        ));
    }

    #[test]
    fn compositions_are_complete() {
        let mut count = 0;
        for_each_composition(3, 4, |k| {
            assert_eq!(k.iter().sum::<u64>(), 4);
            count += 1;
        });
        assert_eq!(count, 15);
    }
}
