//! The generalized maximal operator `M_a^q` and its truncations.
//!
//! For an atom `x`, every cube `Q ∋ x` contributes the term
//! `t_Q(x) = |(∫_Q f dμ)·a_Q(x)|`; the operator combines the terms in `ℓ^q`
//! (maximum for `q = ∞`). Integrals are computed once per call, bottom-up,
//! and each atom then walks its ancestor chain.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lq_combine, DyadicModel, Exponent, FunctionOnX, Measure};

/// Value of `a_Q` on the atoms of `Q`.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    /// `a_Q ≡ c` on `Q`.
    Scalar(f64),
    /// One value per atom of `Q`, in leaf order.
    Leafwise(Vec<f64>),
}

/// The nonnegative functions `a_Q`, one per node of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFamily {
    coeffs: Vec<Coefficient>,
    /// First leaf position of each node; `Leafwise` values are offset from it.
    starts: Vec<usize>,
}

impl CoefficientFamily {
    pub fn new(model: &DyadicModel, coeffs: Vec<Coefficient>) -> Result<Self> {
        if coeffs.len() != model.node_count() {
            let missing = model
                .nodes()
                .get(coeffs.len())
                .map(|n| n.id().to_string())
                .unwrap_or_else(|| format!("<{} extra>", coeffs.len() - model.node_count()));
            return Err(Error::MissingCoefficient(missing));
        }
        for (node, c) in model.nodes().iter().zip(&coeffs) {
            let bad = |reason: String| Error::InvalidCoefficient {
                node: node.id().to_string(),
                reason,
            };
            match c {
                Coefficient::Scalar(v) => {
                    if !(v.is_finite() && *v >= 0.0) {
                        return Err(bad(format!("value {v} is not a finite nonnegative number")));
                    }
                }
                Coefficient::Leafwise(vals) => {
                    let len = node.leaf_range().len();
                    if vals.len() != len {
                        return Err(bad(format!("{} leaf values for a cube with {len} atoms", vals.len())));
                    }
                    if let Some(v) = vals.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                        return Err(bad(format!("value {v} is not a finite nonnegative number")));
                    }
                }
            }
        }
        Ok(Self {
            coeffs,
            starts: model.nodes().iter().map(|n| n.leaf_range().start).collect(),
        })
    }

    /// `a_Q ≡ c` for every cube.
    pub fn constant(model: &DyadicModel, c: f64) -> Result<Self> {
        Self::new(model, vec![Coefficient::Scalar(c); model.node_count()])
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_Q(x)` for an atom `x ∈ Q` given by its leaf position.
    #[inline]
    pub fn value(&self, node: usize, leaf_pos: usize) -> f64 {
        match &self.coeffs[node] {
            Coefficient::Scalar(c) => *c,
            Coefficient::Leafwise(v) => v[leaf_pos - self.starts[node]],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| match a {
                Coefficient::Scalar(v) => Coefficient::Scalar(c * v),
                Coefficient::Leafwise(v) => Coefficient::Leafwise(v.iter().map(|x| c * x).collect()),
            })
            .collect();
        Self {
            coeffs,
            starts: self.starts.clone(),
        }
    }

    pub(crate) fn check_model(&self, model: &DyadicModel) -> Result<()> {
        if self.coeffs.len() != model.node_count() {
            let missing = model
                .nodes()
                .get(self.coeffs.len())
                .map(|n| n.id().to_string())
                .unwrap_or_else(|| "<unknown>".into());
            return Err(Error::MissingCoefficient(missing));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientRecord {
    Scalar(f64),
    Leafwise(IndexMap<String, f64>),
}

/// File form of a coefficient family: node id → scalar or `{leaf id → value}`.
pub type CoefficientFile = IndexMap<String, CoefficientRecord>;

impl CoefficientFamily {
    pub fn from_records(model: &DyadicModel, records: &CoefficientFile) -> Result<Self> {
        for key in records.keys() {
            model.index_of(key)?;
        }
        let mut coeffs = Vec::with_capacity(model.node_count());
        for node in model.nodes() {
            let rec = records
                .get(node.id())
                .ok_or_else(|| Error::MissingCoefficient(node.id().to_string()))?;
            coeffs.push(match rec {
                CoefficientRecord::Scalar(v) => Coefficient::Scalar(*v),
                CoefficientRecord::Leafwise(map) => {
                    let range = node.leaf_range();
                    for leaf in map.keys() {
                        let idx = model.index_of(leaf)?;
                        let inside =
                            model.nodes()[idx].is_leaf() && range.contains(&model.nodes()[idx].leaf_range().start);
                        if !inside {
                            return Err(Error::InvalidCoefficient {
                                node: node.id().to_string(),
                                reason: format!("`{leaf}` is not an atom of this cube"),
                            });
                        }
                    }
                    let vals = model.leaves()[range]
                        .iter()
                        .map(|&l| {
                            let id = model.nodes()[l].id();
                            map.get(id).copied().ok_or_else(|| Error::InvalidCoefficient {
                                node: node.id().to_string(),
                                reason: format!("no value for atom `{id}`"),
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Coefficient::Leafwise(vals)
                }
            });
        }
        Self::new(model, coeffs)
    }

    pub fn to_records(&self, model: &DyadicModel) -> CoefficientFile {
        model
            .nodes()
            .iter()
            .zip(&self.coeffs)
            .map(|(node, c)| {
                let rec = match c {
                    Coefficient::Scalar(v) => CoefficientRecord::Scalar(*v),
                    Coefficient::Leafwise(vals) => CoefficientRecord::Leafwise(
                        model.leaves()[node.leaf_range()]
                            .iter()
                            .zip(vals)
                            .map(|(&l, &v)| (model.nodes()[l].id().to_string(), v))
                            .collect(),
                    ),
                };
                (node.id().to_string(), rec)
            })
            .collect()
    }
}

pub fn read_coefficients(text: &str, model: &DyadicModel) -> Result<CoefficientFamily> {
    let records: CoefficientFile = serde_json::from_str(text)?;
    CoefficientFamily::from_records(model, &records)
}

pub fn write_coefficients(a: &CoefficientFamily, model: &DyadicModel) -> String {
    serde_json::to_string_pretty(&a.to_records(model)).expect("coefficient records always serialize")
}

/// Which cubes an evaluation sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    None,
    /// Only cubes contained in the given node.
    Cube(usize),
    /// Only cubes at depth `>=` the given level.
    Depth(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalOutput {
    pub values: FunctionOnX,
    pub q: Exponent,
    pub truncation: Truncation,
}

pub(crate) fn check_q(q: Exponent) -> Result<()> {
    match q {
        Exponent::Finite(v) if !(v > 1.0) || !v.is_finite() => {
            Err(Error::InvalidExponent(format!("q must lie in (1, inf], got {v}")))
        }
        _ => Ok(()),
    }
}

/// Terms of one atom: cubes on its ancestor chain up to `top` (inclusive,
/// when given) with depth at least `min_depth`.
#[inline]
pub(crate) fn collect_terms(
    model: &DyadicModel,
    a: &CoefficientFamily,
    integrals: &[f64],
    leaf_pos: usize,
    top: Option<usize>,
    min_depth: usize,
    buf: &mut Vec<f64>,
) {
    buf.clear();
    let nodes = model.nodes();
    for r in model.ancestors_of_leaf(leaf_pos) {
        if nodes[r].depth() < min_depth {
            break;
        }
        buf.push((integrals[r] * a.value(r, leaf_pos)).abs());
        if Some(r) == top {
            break;
        }
    }
}

/// Operator values on every atom given precomputed cube integrals.
pub(crate) fn values_from_integrals(
    model: &DyadicModel,
    a: &CoefficientFamily,
    integrals: &[f64],
    q: Exponent,
    truncation: Truncation,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.resize(model.leaf_count(), 0.0);
    let (range, top, min_depth) = match truncation {
        Truncation::None => (0..model.leaf_count(), None, 0),
        Truncation::Cube(c) => (model.nodes()[c].leaf_range(), Some(c), 0),
        Truncation::Depth(n) => (0..model.leaf_count(), None, n),
    };
    let mut buf = Vec::with_capacity(model.max_depth() + 1);
    for pos in range {
        collect_terms(model, a, integrals, pos, top, min_depth, &mut buf);
        out[pos] = lq_combine(&buf, q);
    }
}

fn evaluate(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    q: Exponent,
    truncation: Truncation,
) -> Result<MaximalOutput> {
    check_q(q)?;
    a.check_model(model)?;
    let integrals = model.node_integrals(f, Measure::Mu)?;
    let mut out = Vec::new();
    values_from_integrals(model, a, &integrals, q, truncation, &mut out);
    Ok(MaximalOutput {
        values: FunctionOnX::new(out),
        q,
        truncation,
    })
}

/// `M_a^q fμ` on every atom.
pub fn apply_maximal(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    q: Exponent,
) -> Result<MaximalOutput> {
    evaluate(model, a, f, q, Truncation::None)
}

/// `M_{a,Q}^q fμ`: only cubes `R ⊆ Q` contribute; the output vanishes off `Q`.
pub fn apply_truncated(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    q: Exponent,
    cube: usize,
) -> Result<MaximalOutput> {
    model.node(cube)?;
    evaluate(model, a, f, q, Truncation::Cube(cube))
}

/// Depth truncation: only cubes at depth `>= n_start` contribute. `n_start = 0`
/// is the full operator; the top `n_start` levels are dropped otherwise.
pub fn apply_depth_truncated(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    q: Exponent,
    n_start: usize,
) -> Result<MaximalOutput> {
    if n_start > model.max_depth() {
        return Err(Error::InvalidParameter(format!(
            "depth truncation {n_start} outside [0, {}]",
            model.max_depth()
        )));
    }
    evaluate(model, a, f, q, Truncation::Depth(n_start))
}

/// Coefficients `a_Q ≡ ω(Q)^{-α}` of the classical dyadic maximal operator
/// (`α = 1`) and its fractional variants. Cubes with `ω(Q) = 0` get `0`.
pub fn classical_coefficients(model: &DyadicModel, omega_leaf: &[f64], alpha: f64) -> Result<CoefficientFamily> {
    if omega_leaf.len() != model.leaf_count() {
        return Err(Error::LengthMismatch {
            expected: model.leaf_count(),
            got: omega_leaf.len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    if let Some(w) = omega_leaf.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "base mass {w} is not finite and nonnegative"
        )));
    }
    let omega = model.accumulate(omega_leaf);
    let coeffs = omega
        .iter()
        .map(|&w| Coefficient::Scalar(if w > 0.0 { w.powf(-alpha) } else { 0.0 }))
        .collect();
    CoefficientFamily::new(model, coeffs)
}
