//! Reference evaluations written straight from the definitions. They share
//! no code with the library beyond model accessors, and favor obviousness
//! over speed.

#![allow(dead_code)]

use dyadic_maximal::lattice::Measure;
use dyadic_maximal::{CoefficientFamily, DyadicModel, Exponent, FunctionOnX};

/// Leaf positions inside node `q`, found by membership rather than ranges.
pub fn atoms_of(model: &DyadicModel, q: usize) -> Vec<usize> {
    let leaves = model.leaves();
    (0..leaves.len()).filter(|&x| model.contains(q, leaves[x])).collect()
}

pub fn integral(model: &DyadicModel, f: &[f64], q: usize, measure: Measure) -> f64 {
    let m = model.leaf_masses(measure);
    atoms_of(model, q).iter().map(|&x| f[x] * m[x]).sum()
}

pub fn mass(model: &DyadicModel, q: usize, measure: Measure) -> f64 {
    let m = model.leaf_masses(measure);
    atoms_of(model, q).iter().map(|&x| m[x]).sum()
}

pub fn average(model: &DyadicModel, f: &[f64], q: usize) -> f64 {
    let m = mass(model, q, Measure::Mu);
    if m > 0.0 {
        integral(model, f, q, Measure::Mu) / m
    } else {
        0.0
    }
}

/// `M_a^q fμ` restricted to the cubes accepted by `keep`.
pub fn operator(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &[f64],
    q: Exponent,
    keep: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let kept: Vec<(usize, f64)> = (0..model.node_count())
        .filter(|&c| keep(c))
        .map(|c| (c, integral(model, f, c, Measure::Mu)))
        .collect();
    (0..model.leaf_count())
        .map(|x| {
            let terms = kept
                .iter()
                .filter(|(c, _)| model.contains(*c, model.leaves()[x]))
                .map(|&(c, int)| (int * a.value(c, x)).abs());
            match q {
                Exponent::Infinity => terms.fold(0.0, f64::max),
                Exponent::Finite(e) => terms.map(|t| t.powf(e)).sum::<f64>().powf(1.0 / e),
            }
        })
        .collect()
}

pub fn full(model: &DyadicModel, a: &CoefficientFamily, f: &[f64], q: Exponent) -> Vec<f64> {
    operator(model, a, f, q, |_| true)
}

pub fn norm(model: &DyadicModel, g: &[f64], p: f64, measure: Measure) -> f64 {
    let m = model.leaf_masses(measure);
    g.iter()
        .zip(m)
        .map(|(v, w)| v.abs().powf(p) * w)
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `‖M_a^q fμ‖_{L^p(ν)} / ‖f‖_{L^p(μ)}`.
pub fn ratio(model: &DyadicModel, a: &CoefficientFamily, f: &[f64], p: f64, q: Exponent) -> f64 {
    norm(model, &full(model, a, f, q), p, Measure::Nu) / norm(model, f, p, Measure::Mu)
}

/// Testing constant: largest `‖M_{a,Q}(1_Q μ)‖_{L^p(ν)} / μ(Q)^{1/p}`.
pub fn testing_constant(model: &DyadicModel, a: &CoefficientFamily, p: f64, q: Exponent) -> f64 {
    let mut best = 0.0f64;
    for c in 0..model.node_count() {
        let m = mass(model, c, Measure::Mu);
        if m <= 0.0 {
            continue;
        }
        let ind: Vec<f64> = (0..model.leaf_count())
            .map(|x| if model.contains(c, model.leaves()[x]) { 1.0 } else { 0.0 })
            .collect();
        let val = operator(model, a, &ind, q, |r| model.contains(c, r));
        best = best.max(norm(model, &val, p, Measure::Nu) / m.powf(1.0 / p));
    }
    best
}

/// `C(p) = ((1+1/p)^{p+1} p)^{1/p} p'` evaluated term by term.
pub fn theorem_constant(p: f64) -> f64 {
    let pc = p / (p - 1.0);
    ((1.0 + 1.0 / p).powf(p + 1.0) * p).powf(1.0 / p) * pc
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

pub fn f_of(v: &[f64]) -> FunctionOnX {
    FunctionOnX::new(v.to_vec())
}
