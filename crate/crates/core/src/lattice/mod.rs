//! Finite model of a filtered measure space.
//!
//! The space `X` is a finite set of atoms (the leaves of a rooted forest).
//! Every tree node is a "cube": the union of the atoms below it. Two leaf
//! measures `mu` and `nu` are stored per atom; node masses are cached.
//!
//! Leaves are numbered in depth-first order (roots in document order,
//! children in listed order), so the atoms under any node form a
//! contiguous range. A [`FunctionOnX`] stores one value per atom in that
//! order.

mod format;
mod random;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use format::{read_model, write_model, ModelSpec, NodeSpec};
pub(crate) use random::random_model_with;
pub use random::{random_model, MassDistribution, MassLaw, RandomModelParams};

/// Which of the two leaf measures an operation integrates against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Mu,
    Nu,
}

/// A Lebesgue exponent in `[1, ∞]`. `∞` is a distinct marker, never a large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(x) => Some(x),
            Exponent::Infinity => None,
        }
    }

    /// Ordering on `(1, ∞]` with `∞` above every finite value.
    pub fn ge(self, other: Exponent) -> bool {
        match (self, other) {
            (Exponent::Infinity, _) => true,
            (Exponent::Finite(_), Exponent::Infinity) => false,
            (Exponent::Finite(a), Exponent::Finite(b)) => a >= b,
        }
    }
}

impl From<f64> for Exponent {
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(x)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(x) => write!(f, "{x}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            _ => {
                let x: f64 = s
                    .parse()
                    .map_err(|_| Error::InvalidExponent(format!("cannot parse `{s}`")))?;
                if !x.is_finite() {
                    return Err(Error::InvalidExponent(format!("spell infinity as `inf`, got `{s}`")));
                }
                Ok(Exponent::Finite(x))
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(x) => serializer.serialize_f64(*x),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(x) => Ok(Exponent::Finite(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The exponent pair `(p, q)` of a two-weight estimate, with `1 < p < ∞`,
/// `1 < q ≤ ∞` and `p ≤ q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponents {
    p: f64,
    q: Exponent,
}

impl Exponents {
    pub fn new(p: f64, q: Exponent) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(format!("p must lie in (1, inf), got {p}")));
        }
        if let Exponent::Finite(qv) = q {
            if !(qv > 1.0) {
                return Err(Error::InvalidExponent(format!("q must lie in (1, inf], got {qv}")));
            }
        }
        if !q.ge(Exponent::Finite(p)) {
            return Err(Error::InvalidExponent(format!("need p <= q, got p={p}, q={q}")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    /// Hölder conjugate `p / (p - 1)`.
    pub fn p_conj(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// A real function on the atoms, one value per leaf in leaf order.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionOnX(Vec<f64>);

impl FunctionOnX {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn zeros(model: &DyadicModel) -> Self {
        Self(vec![0.0; model.leaf_count()])
    }

    pub fn constant(model: &DyadicModel, c: f64) -> Self {
        Self(vec![c; model.leaf_count()])
    }

    /// Indicator of the cube `node`.
    pub fn indicator(model: &DyadicModel, node: usize) -> Result<Self> {
        let range = model.leaf_range(node)?;
        let mut v = vec![0.0; model.leaf_count()];
        v[range].iter_mut().for_each(|x| *x = 1.0);
        Ok(Self(v))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| c * x).collect())
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&x| x >= 0.0)
    }

    pub(crate) fn check_len(&self, model: &DyadicModel) -> Result<()> {
        if self.0.len() != model.leaf_count() {
            return Err(Error::LengthMismatch {
                expected: model.leaf_count(),
                got: self.0.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_nonnegative(&self) -> Result<()> {
        match self.0.iter().position(|&x| !(x >= 0.0)) {
            Some(leaf) => Err(Error::NegativeFunction {
                leaf,
                value: self.0[leaf],
            }),
            None => Ok(()),
        }
    }
}

impl From<Vec<f64>> for FunctionOnX {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    id: String,
    parent: Option<usize>,
    children: Vec<usize>,
    depth: usize,
    leaves: Range<usize>,
}

impl Node {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn parent(&self) -> Option<usize> {
        self.parent
    }

    pub fn children(&self) -> &[usize] {
        &self.children
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn leaf_range(&self) -> Range<usize> {
        self.leaves.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Minimum number of children of a non-leaf node.
    pub min_children: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { min_children: 2 }
    }
}

impl BuildOptions {
    pub fn permissive() -> Self {
        Self { min_children: 1 }
    }
}

/// A finite rooted forest with atomic leaf measures. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicModel {
    nodes: Vec<Node>,
    roots: Vec<usize>,
    /// Node index of each leaf, in leaf order.
    leaves: Vec<usize>,
    preorder: Vec<usize>,
    mu_leaf: Vec<f64>,
    nu_leaf: Vec<f64>,
    mu_node: Vec<f64>,
    nu_node: Vec<f64>,
    max_depth: usize,
}

impl DyadicModel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> Result<&Node> {
        self.nodes.get(idx).ok_or(Error::NodeIndex(idx))
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    /// Node indices of the leaves, in leaf order.
    pub fn leaves(&self) -> &[usize] {
        &self.leaves
    }

    /// Nodes in depth-first preorder; parents precede children.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn depth(&self, idx: usize) -> Result<usize> {
        Ok(self.node(idx)?.depth)
    }

    pub fn leaf_range(&self, idx: usize) -> Result<Range<usize>> {
        Ok(self.node(idx)?.leaves.clone())
    }

    pub fn leaf_masses(&self, measure: Measure) -> &[f64] {
        match measure {
            Measure::Mu => &self.mu_leaf,
            Measure::Nu => &self.nu_leaf,
        }
    }

    pub fn node_masses(&self, measure: Measure) -> &[f64] {
        match measure {
            Measure::Mu => &self.mu_node,
            Measure::Nu => &self.nu_node,
        }
    }

    /// `mu(Q)` or `nu(Q)`.
    pub fn mass(&self, idx: usize, measure: Measure) -> Result<f64> {
        self.node(idx)?;
        Ok(self.node_masses(measure)[idx])
    }

    /// `true` when cube `inner` is contained in cube `outer`.
    pub fn contains(&self, outer: usize, inner: usize) -> bool {
        let (o, i) = (&self.nodes[outer].leaves, &self.nodes[inner].leaves);
        let mut cur = Some(inner);
        if o.start > i.start || i.end > o.end {
            return false;
        }
        while let Some(c) = cur {
            if c == outer {
                return true;
            }
            cur = self.nodes[c].parent;
        }
        false
    }

    /// Walk from the atom at `leaf_pos` up to its root: the cubes containing it.
    pub fn ancestors_of_leaf(&self, leaf_pos: usize) -> Ancestors<'_> {
        Ancestors {
            model: self,
            cur: self.leaves.get(leaf_pos).copied(),
        }
    }

    /// Same tree with new leaf measures.
    pub fn with_measures(&self, mu_leaf: Vec<f64>, nu_leaf: Vec<f64>) -> Result<Self> {
        for masses in [&mu_leaf, &nu_leaf] {
            if masses.len() != self.leaf_count() {
                return Err(Error::LengthMismatch {
                    expected: self.leaf_count(),
                    got: masses.len(),
                });
            }
            for (pos, &m) in masses.iter().enumerate() {
                let leaf = self.nodes[self.leaves[pos]].id.clone();
                if !m.is_finite() {
                    return Err(Error::NonFiniteMass(leaf));
                }
                if m < 0.0 {
                    return Err(Error::NegativeMass { leaf, mass: m });
                }
            }
        }
        let mut model = self.clone();
        model.mu_node = model.accumulate(&mu_leaf);
        model.nu_node = model.accumulate(&nu_leaf);
        model.mu_leaf = mu_leaf;
        model.nu_leaf = nu_leaf;
        Ok(model)
    }

    /// Sum leaf values up the tree, children before parents.
    pub(crate) fn accumulate(&self, leaf_values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        for (pos, &node) in self.leaves.iter().enumerate() {
            out[node] = leaf_values[pos];
        }
        for &idx in self.preorder.iter().rev() {
            let node = &self.nodes[idx];
            if !node.children.is_empty() {
                out[idx] = node.children.iter().map(|&c| out[c]).sum();
            }
        }
        out
    }

    /// `∫_Q f d(measure)` for every node at once.
    pub fn node_integrals(&self, f: &FunctionOnX, measure: Measure) -> Result<Vec<f64>> {
        f.check_len(self)?;
        let masses = self.leaf_masses(measure);
        let weighted: Vec<f64> = f.values().iter().zip(masses).map(|(v, m)| v * m).collect();
        Ok(self.accumulate(&weighted))
    }
}

pub struct Ancestors<'a> {
    model: &'a DyadicModel,
    cur: Option<usize>,
}

impl Iterator for Ancestors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let c = self.cur?;
        self.cur = self.model.nodes[c].parent;
        Some(c)
    }
}

/// Validate a tree description and build the model.
pub fn build_model(spec: &ModelSpec, opts: BuildOptions) -> Result<DyadicModel> {
    use std::collections::HashMap;

    if spec.nodes.is_empty() {
        return Err(Error::EmptyModel);
    }
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(spec.nodes.len());
    for (i, n) in spec.nodes.iter().enumerate() {
        if index.insert(n.id.as_str(), i).is_some() {
            return Err(Error::DuplicateId(n.id.clone()));
        }
    }

    let mut parent = vec![None; spec.nodes.len()];
    let mut children = vec![Vec::new(); spec.nodes.len()];
    for (i, n) in spec.nodes.iter().enumerate() {
        if let Some(p) = &n.parent {
            let pi = *index.get(p.as_str()).ok_or_else(|| Error::Orphan {
                node: n.id.clone(),
                reason: format!("parent `{p}` does not exist"),
            })?;
            if pi == i {
                return Err(Error::Cycle(n.id.clone()));
            }
            parent[i] = Some(pi);
        }
        for c in &n.children {
            let ci = *index.get(c.as_str()).ok_or_else(|| Error::UnknownNode(c.clone()))?;
            if children[i].contains(&ci) {
                return Err(Error::Orphan {
                    node: c.clone(),
                    reason: format!("listed twice as a child of `{}`", n.id),
                });
            }
            children[i].push(ci);
        }
    }
    for (i, n) in spec.nodes.iter().enumerate() {
        if let Some(pi) = parent[i] {
            if !children[pi].contains(&i) {
                return Err(Error::Orphan {
                    node: n.id.clone(),
                    reason: format!("parent `{}` does not list it as a child", spec.nodes[pi].id),
                });
            }
        }
        for &ci in &children[i] {
            if parent[ci] != Some(i) {
                return Err(Error::Orphan {
                    node: spec.nodes[ci].id.clone(),
                    reason: format!("listed as a child of `{}` but its parent link disagrees", n.id),
                });
            }
        }
    }

    // Every parent chain must end at a root.
    let mut state = vec![0u8; spec.nodes.len()]; // 0 unseen, 1 on path, 2 done
    for start in 0..spec.nodes.len() {
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(c) = cur {
            match state[c] {
                2 => break,
                1 => return Err(Error::Cycle(spec.nodes[c].id.clone())),
                _ => {
                    state[c] = 1;
                    path.push(c);
                    cur = parent[c];
                }
            }
        }
        for c in path {
            state[c] = 2;
        }
    }

    for (i, ch) in children.iter().enumerate() {
        if !ch.is_empty() && ch.len() < opts.min_children {
            return Err(Error::TooFewChildren {
                node: spec.nodes[i].id.clone(),
                children: ch.len(),
                required: opts.min_children,
            });
        }
    }

    let roots: Vec<usize> = (0..spec.nodes.len()).filter(|&i| parent[i].is_none()).collect();

    let mut depth = vec![0usize; spec.nodes.len()];
    let mut preorder = Vec::with_capacity(spec.nodes.len());
    let mut leaves = Vec::new();
    let mut stack: Vec<usize> = roots.iter().rev().copied().collect();
    while let Some(c) = stack.pop() {
        preorder.push(c);
        if children[c].is_empty() {
            leaves.push(c);
        }
        for &k in children[c].iter().rev() {
            depth[k] = depth[c] + 1;
            stack.push(k);
        }
    }

    let mut leaf_pos = vec![usize::MAX; spec.nodes.len()];
    for (pos, &l) in leaves.iter().enumerate() {
        leaf_pos[l] = pos;
    }
    let mut ranges: Vec<Range<usize>> = vec![0..0; spec.nodes.len()];
    for &idx in preorder.iter().rev() {
        ranges[idx] = if children[idx].is_empty() {
            leaf_pos[idx]..leaf_pos[idx] + 1
        } else {
            let first = children[idx][0];
            let last = *children[idx].last().unwrap();
            ranges[first].start..ranges[last].end
        };
    }

    let read_masses = |map: &indexmap::IndexMap<String, f64>, name: &'static str| -> Result<Vec<f64>> {
        for key in map.keys() {
            match index.get(key.as_str()) {
                None => return Err(Error::UnknownNode(key.clone())),
                Some(&i) if !children[i].is_empty() => return Err(Error::NotALeaf(key.clone())),
                Some(_) => {}
            }
        }
        leaves
            .iter()
            .map(|&l| {
                let id = &spec.nodes[l].id;
                let m = *map.get(id).ok_or_else(|| Error::MissingMass(id.clone(), name))?;
                if !m.is_finite() {
                    return Err(Error::NonFiniteMass(id.clone()));
                }
                if m < 0.0 {
                    return Err(Error::NegativeMass {
                        leaf: id.clone(),
                        mass: m,
                    });
                }
                Ok(m)
            })
            .collect()
    };
    let mu_leaf = read_masses(&spec.mu, "mu")?;
    let nu_leaf = read_masses(&spec.nu, "nu")?;

    let nodes: Vec<Node> = spec
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| Node {
            id: n.id.clone(),
            parent: parent[i],
            children: children[i].clone(),
            depth: depth[i],
            leaves: ranges[i].clone(),
        })
        .collect();
    let max_depth = depth.iter().copied().max().unwrap_or(0);

    let mut model = DyadicModel {
        nodes,
        roots,
        leaves,
        preorder,
        mu_leaf,
        nu_leaf,
        mu_node: Vec::new(),
        nu_node: Vec::new(),
        max_depth,
    };
    model.mu_node = model.accumulate(&model.mu_leaf);
    model.nu_node = model.accumulate(&model.nu_leaf);
    Ok(model)
}

/// `∫_Q f d(measure)`: the sum of `f(L)·mass(L)` over the atoms `L ⊆ Q`.
pub fn integrate(model: &DyadicModel, f: &FunctionOnX, node: usize, measure: Measure) -> Result<f64> {
    f.check_len(model)?;
    let range = model.leaf_range(node)?;
    let masses = &model.leaf_masses(measure)[range.clone()];
    Ok(f.values()[range].iter().zip(masses).map(|(v, m)| v * m).sum())
}

/// Mean of `f` over `Q`. A null cube has average 0.
pub fn average(model: &DyadicModel, f: &FunctionOnX, node: usize, measure: Measure) -> Result<f64> {
    let total = integrate(model, f, node, measure)?;
    let mass = model.mass(node, measure)?;
    Ok(if mass > 0.0 { total / mass } else { 0.0 })
}

/// `‖g‖_{L^p(measure)}`. For `p = ∞` the essential sup over atoms of positive mass.
pub fn lp_norm(model: &DyadicModel, g: &FunctionOnX, p: Exponent, measure: Measure) -> Result<f64> {
    g.check_len(model)?;
    if let Exponent::Finite(pv) = p {
        if !(pv >= 1.0) {
            return Err(Error::InvalidExponent(format!("L^p norm needs p >= 1, got {pv}")));
        }
    }
    Ok(weighted_norm(g.values(), model.leaf_masses(measure), p))
}

pub(crate) fn weighted_norm(values: &[f64], masses: &[f64], p: Exponent) -> f64 {
    let scale = values
        .iter()
        .zip(masses)
        .filter(|(_, &m)| m > 0.0)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max);
    match p {
        Exponent::Infinity => scale,
        Exponent::Finite(_) if scale == 0.0 => 0.0,
        Exponent::Finite(pv) => {
            let s: f64 = values
                .iter()
                .zip(masses)
                .filter(|(_, &m)| m > 0.0)
                .map(|(v, m)| (v.abs() / scale).powf(pv) * m)
                .sum();
            scale * s.powf(1.0 / pv)
        }
    }
}

/// `Σ_{L} |g(L)|^p mass(L)`, the p-th power of the norm, without the root.
pub(crate) fn weighted_power_sum(values: &[f64], masses: &[f64], p: f64) -> f64 {
    values
        .iter()
        .zip(masses)
        .filter(|(_, &m)| m > 0.0)
        .map(|(v, m)| v.abs().powf(p) * m)
        .sum()
}

/// `ℓ^q` combination of nonnegative terms, scaled by the largest to avoid overflow.
pub(crate) fn lq_combine(terms: &[f64], q: Exponent) -> f64 {
    let top = terms.iter().copied().fold(0.0, f64::max);
    match q {
        Exponent::Infinity => top,
        Exponent::Finite(_) if top == 0.0 => 0.0,
        Exponent::Finite(qv) => top * terms.iter().map(|t| (t / top).powf(qv)).sum::<f64>().powf(1.0 / qv),
    }
}
