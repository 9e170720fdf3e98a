//! Stopping cubes, Carleson packing, and the bound chain behind `A ≤ C(p)·B`.
//!
//! For a nonnegative `f` and `r > 1`, the stopping children of a cube `Q`
//! are the maximal strict subcubes `R` with `μ(R) > 0` and
//! `avg_R f ≥ r·avg_Q f`. Starting from a top level of cubes and iterating
//! gives the stopping family `G`; the block `E(Q)` of `Q ∈ G` holds the cubes
//! under `Q` that are not under any of its stopping children. Blocks
//! partition every cube at or below the top level.
//!
//! [`proof_trace`] evaluates every quantity in the chain
//!
//! ```text
//! ‖M^{q,N} fμ‖^p ≤ Σ_Q ‖F_Q‖^p ≤ r^p B^p Σ_Q (avg_Q f)^p μ(Q)
//!                ≤ r^{p+1}/(r-1) (p')^p B^p ‖f‖^p
//! ```
//!
//! on a concrete instance and reports each link.

use serde::Serialize;

use crate::constants::holder_conjugate;
use crate::error::{Error, Result};
use crate::lattice::{lq_combine, weighted_power_sum, DyadicModel, Exponent, Exponents, FunctionOnX, Measure};
use crate::operator::{apply_depth_truncated, CoefficientFamily};
use crate::tolerance;

/// The stopping parameter that minimizes `r^{p+1} / (r - 1)`.
pub fn default_r(p: f64) -> f64 {
    (p + 1.0) / p
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "stopping parameter r must exceed 1, got {r}"
        )));
    }
    Ok(())
}

fn mu_averages(model: &DyadicModel, f: &FunctionOnX) -> Result<Vec<f64>> {
    let integrals = model.node_integrals(f, Measure::Mu)?;
    Ok(integrals
        .iter()
        .zip(model.node_masses(Measure::Mu))
        .map(|(&i, &m)| if m > 0.0 { i / m } else { 0.0 })
        .collect())
}

fn children_with(model: &DyadicModel, averages: &[f64], cube: usize, r: f64) -> Vec<usize> {
    let threshold = r * averages[cube];
    if !(averages[cube] > 0.0) {
        return Vec::new();
    }
    let mu = model.node_masses(Measure::Mu);
    let mut found = Vec::new();
    let mut stack: Vec<usize> = model.nodes()[cube].children().iter().rev().copied().collect();
    while let Some(c) = stack.pop() {
        if mu[c] > 0.0 && averages[c] >= threshold {
            found.push(c);
        } else {
            stack.extend(model.nodes()[c].children().iter().rev());
        }
    }
    found
}

/// Stopping children `G*(Q)`, in depth-first order. Empty when `avg_Q f = 0`.
pub fn stopping_children(model: &DyadicModel, f: &FunctionOnX, cube: usize, r: f64) -> Result<Vec<usize>> {
    check_r(r)?;
    model.node(cube)?;
    f.check_len(model)?;
    f.check_nonnegative()?;
    let averages = mu_averages(model, f)?;
    Ok(children_with(model, &averages, cube, r))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingDecomposition {
    r: f64,
    top_level: usize,
    generations: Vec<Vec<usize>>,
    in_family: Vec<bool>,
    /// Member of `G` whose block contains each node; `None` above the top level.
    owner: Vec<Option<usize>>,
    averages: Vec<f64>,
}

impl StoppingDecomposition {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn top_level(&self) -> usize {
        self.top_level
    }

    pub fn generations(&self) -> &[Vec<usize>] {
        &self.generations
    }

    /// The stopping family `G`, generation by generation.
    pub fn family(&self) -> Vec<usize> {
        self.generations.iter().flatten().copied().collect()
    }

    pub fn is_stopping(&self, node: usize) -> bool {
        self.in_family[node]
    }

    pub fn owner(&self, node: usize) -> Option<usize> {
        self.owner[node]
    }

    /// `avg_Q f` with respect to `μ` for every node.
    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    /// Block `E(Q)` in node-index order; empty when `Q ∉ G`.
    pub fn block(&self, cube: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&n| self.owner[n] == Some(cube)).collect()
    }

    /// `(Q, E(Q))` for every `Q ∈ G`, in family order.
    pub fn blocks(&self) -> Vec<(usize, Vec<usize>)> {
        let family = self.family();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); family.len()];
        let mut slot = vec![usize::MAX; self.owner.len()];
        for (i, &q) in family.iter().enumerate() {
            slot[q] = i;
        }
        for (n, o) in self.owner.iter().enumerate() {
            if let Some(o) = o {
                members[slot[*o]].push(n);
            }
        }
        family.into_iter().zip(members).collect()
    }
}

/// Stopping family with the roots as first generation.
pub fn build_decomposition(model: &DyadicModel, f: &FunctionOnX, r: f64) -> Result<StoppingDecomposition> {
    build_decomposition_from_level(model, f, r, 0)
}

/// Stopping family whose first generation is every cube at depth `top_level`.
/// Cubes above that level belong to no block.
pub fn build_decomposition_from_level(
    model: &DyadicModel,
    f: &FunctionOnX,
    r: f64,
    top_level: usize,
) -> Result<StoppingDecomposition> {
    check_r(r)?;
    f.check_len(model)?;
    f.check_nonnegative()?;
    if top_level > model.max_depth() {
        return Err(Error::InvalidParameter(format!(
            "top level {top_level} outside [0, {}]",
            model.max_depth()
        )));
    }
    let averages = mu_averages(model, f)?;
    let first: Vec<usize> = model
        .preorder()
        .iter()
        .copied()
        .filter(|&n| model.nodes()[n].depth() == top_level)
        .collect();

    let mut in_family = vec![false; model.node_count()];
    let mut generations = Vec::new();
    let mut current = first;
    while !current.is_empty() {
        for &q in &current {
            in_family[q] = true;
        }
        let next: Vec<usize> = current
            .iter()
            .flat_map(|&q| children_with(model, &averages, q, r))
            .collect();
        generations.push(std::mem::replace(&mut current, next));
    }

    let mut owner = vec![None; model.node_count()];
    for &n in model.preorder() {
        let depth = model.nodes()[n].depth();
        if depth < top_level {
            continue;
        }
        owner[n] = if in_family[n] {
            Some(n)
        } else {
            model.nodes()[n].parent().and_then(|p| owner[p])
        };
    }

    Ok(StoppingDecomposition {
        r,
        top_level,
        generations,
        in_family,
        owner,
        averages,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodePacking {
    pub node: usize,
    /// `Σ_{R ∈ G, R ⊆ Q} μ(R)`.
    pub stopped_mass: f64,
    /// `r/(r-1) · μ(Q)`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerationPacking {
    pub cube: usize,
    /// `Σ_{R ∈ G*(Q)} μ(R)`.
    pub children_mass: f64,
    /// `μ(Q) / r`.
    pub limit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingReport {
    /// `r / (r - 1)`.
    pub constant: f64,
    /// Largest `Σ_{R ∈ G, R ⊆ Q} μ(R) / μ(Q)` over cubes of positive mass.
    pub worst_ratio: f64,
    pub nodes: Vec<NodePacking>,
    pub generations: Vec<GenerationPacking>,
}

impl PackingReport {
    pub fn violations(&self, tol: f64) -> usize {
        let cumulative = self
            .nodes
            .iter()
            .filter(|n| !tolerance::le_rel(n.stopped_mass, n.bound, tol))
            .count();
        let per_generation = self
            .generations
            .iter()
            .filter(|g| !tolerance::le_rel(g.children_mass, g.limit, tol))
            .count();
        cumulative + per_generation
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.violations(tol) == 0
    }
}

/// Check `Σ_{R ∈ G, R ⊆ Q} μ(R) ≤ r/(r-1)·μ(Q)` for every cube, and
/// `Σ_{R ∈ G*(Q)} μ(R) ≤ μ(Q)/r` for every `Q ∈ G` with positive average.
pub fn verify_packing(model: &DyadicModel, decomp: &StoppingDecomposition) -> PackingReport {
    let mu = model.node_masses(Measure::Mu);
    let r = decomp.r;
    let constant = r / (r - 1.0);

    let own: Vec<f64> = (0..model.node_count())
        .map(|n| if decomp.in_family[n] { mu[n] } else { 0.0 })
        .collect();
    let mut stopped = own.clone();
    for &n in model.preorder().iter().rev() {
        let below: f64 = model.nodes()[n].children().iter().map(|&c| stopped[c]).sum();
        stopped[n] = own[n] + below;
    }

    let mut worst_ratio = 0.0f64;
    let nodes = (0..model.node_count())
        .map(|n| {
            let ratio = if mu[n] > 0.0 {
                stopped[n] / mu[n]
            } else if stopped[n] > 0.0 {
                f64::INFINITY
            } else {
                0.0
            };
            worst_ratio = worst_ratio.max(ratio);
            NodePacking {
                node: n,
                stopped_mass: stopped[n],
                bound: constant * mu[n],
            }
        })
        .collect();

    let generations = decomp
        .family()
        .into_iter()
        .filter(|&q| decomp.averages[q] > 0.0)
        .map(|q| GenerationPacking {
            cube: q,
            children_mass: children_with(model, &decomp.averages, q, r)
                .iter()
                .map(|&c| mu[c])
                .sum(),
            limit: mu[q] / r,
        })
        .collect();

    PackingReport {
        constant,
        worst_ratio,
        nodes,
        generations,
    }
}

/// Nonnegative node weights with their Carleson packing constant
/// `sup_R Σ_{Q ⊆ R} w_Q / μ(R)` (infinite if a null cube carries weight).
#[derive(Clone, Debug, PartialEq)]
pub struct CarlesonSequence {
    w: Vec<f64>,
    packing_constant: f64,
}

impl CarlesonSequence {
    pub fn new(model: &DyadicModel, w: Vec<f64>) -> Result<Self> {
        if w.len() != model.node_count() {
            return Err(Error::LengthMismatch {
                expected: model.node_count(),
                got: w.len(),
            });
        }
        if let Some(v) = w.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Carleson weight {v} is not finite and nonnegative"
            )));
        }
        let mut subtree = w.clone();
        for &n in model.preorder().iter().rev() {
            let below: f64 = model.nodes()[n].children().iter().map(|&c| subtree[c]).sum();
            subtree[n] = w[n] + below;
        }
        let mu = model.node_masses(Measure::Mu);
        let packing_constant = subtree
            .iter()
            .zip(mu)
            .map(|(&s, &m)| {
                if m > 0.0 {
                    s / m
                } else if s > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max);
        Ok(Self { w, packing_constant })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn packing_constant(&self) -> f64 {
        self.packing_constant
    }
}

/// `w_Q = μ(Q)` on the stopping family, `0` elsewhere.
pub fn stopping_weights(decomp: &StoppingDecomposition, model: &DyadicModel) -> CarlesonSequence {
    let mu = model.node_masses(Measure::Mu);
    let w = (0..model.node_count())
        .map(|n| if decomp.in_family[n] { mu[n] } else { 0.0 })
        .collect();
    CarlesonSequence::new(model, w).expect("stopping weights are masses")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlesonReport {
    /// `Σ_Q (avg_Q f)^p w_Q`.
    pub lhs: f64,
    /// `(p')^p · packing · ‖f‖^p_{L^p(μ)}`.
    pub bound: f64,
    pub packing_constant: f64,
}

impl CarlesonReport {
    pub fn holds(&self, tol: f64) -> bool {
        tolerance::le_rel(self.lhs, self.bound, tol)
    }

    pub fn slack(&self) -> f64 {
        self.bound - self.lhs
    }
}

/// Evaluate both sides of the martingale Carleson embedding.
pub fn carleson_embedding_check(
    model: &DyadicModel,
    w: &CarlesonSequence,
    f: &FunctionOnX,
    p: f64,
) -> Result<CarlesonReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!(
            "Carleson embedding needs p in (1, inf), got {p}"
        )));
    }
    if w.w.len() != model.node_count() {
        return Err(Error::LengthMismatch {
            expected: model.node_count(),
            got: w.w.len(),
        });
    }
    f.check_nonnegative()?;
    let averages = mu_averages(model, f)?;
    let lhs = averages
        .iter()
        .zip(&w.w)
        .filter(|(_, &wq)| wq > 0.0)
        .map(|(&avg, &wq)| avg.powf(p) * wq)
        .sum();
    let norm_p = weighted_power_sum(f.values(), model.leaf_masses(Measure::Mu), p);
    let bound = if w.packing_constant.is_infinite() {
        f64::INFINITY
    } else {
        holder_conjugate(p)?.powf(p) * w.packing_constant * norm_p
    };
    Ok(CarlesonReport {
        lhs,
        bound,
        packing_constant: w.packing_constant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkName {
    /// `‖(Σ F_Q^q)^{1/q}‖^p ≤ Σ ‖F_Q‖^p`.
    Est1,
    /// `‖F_Q‖^p ≤ r^p B^p (avg_Q f)^p μ(Q)`, one per block.
    Est2,
    /// `Σ_{Q ∈ G} (avg_Q f)^p μ(Q) ≤ r/(r-1) (p')^p ‖f‖^p`.
    Carleson,
    /// `lhs ≤ r^{p+1}/(r-1) (p')^p B^p ‖f‖^p`.
    Final,
    /// `lhs ≤ (1+1/p)^{p+1} p (p')^p B^p ‖f‖^p`, only at `r = (p+1)/p`.
    Optimal,
}

impl LinkName {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkName::Est1 => "est1",
            LinkName::Est2 => "est2",
            LinkName::Carleson => "carleson",
            LinkName::Final => "final",
            LinkName::Optimal => "optimal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Link {
    pub name: LinkName,
    pub cube: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl Link {
    pub fn holds(&self, tol: f64) -> bool {
        tolerance::le_rel(self.lhs, self.rhs, tol)
    }

    /// `rhs / lhs`, infinite when `lhs = 0`.
    pub fn slack_ratio(&self) -> f64 {
        if self.lhs > 0.0 {
            self.rhs / self.lhs
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockTrace {
    pub cube: usize,
    /// `F_Q` on every atom (zero off `Q`).
    pub values: FunctionOnX,
    /// `‖F_Q‖^p_{L^p(ν)}`.
    pub norm_p: f64,
    /// `r^p B^p (avg_Q f)^p μ(Q)`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofTrace {
    pub p: f64,
    pub q: Exponent,
    pub r: f64,
    pub b: f64,
    pub n_start: usize,
    pub blocks: Vec<BlockTrace>,
    /// `‖M_a^{q,N} fμ‖^p_{L^p(ν)}`.
    pub lhs: f64,
    /// `Σ_Q ‖F_Q‖^p`.
    pub est1: f64,
    /// `Σ_{Q ∈ G} (avg_Q f)^p μ(Q)`.
    pub carleson_sum: f64,
    pub carleson_bound: f64,
    pub final_bound: f64,
    /// Present only when `r` is the optimal `(p+1)/p`.
    pub optimal_bound: Option<f64>,
    /// Largest relative gap between `(Σ_Q F_Q^q)^{1/q}` and the depth-truncated operator.
    pub reconstruction_error: f64,
    pub links: Vec<Link>,
}

impl ProofTrace {
    pub fn first_failure(&self, tol: f64) -> Option<&Link> {
        self.links.iter().find(|l| !l.holds(tol))
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        match self.first_failure(tol) {
            None => Ok(()),
            Some(l) => Err(Error::BrokenLink {
                link: match l.cube {
                    Some(c) => format!("{}[{c}]", l.name.as_str()),
                    None => l.name.as_str().to_string(),
                },
                lhs: l.lhs,
                rhs: l.rhs,
            }),
        }
    }

    /// Smallest `rhs / lhs` over all links.
    pub fn worst_slack_ratio(&self) -> f64 {
        self.links.iter().map(Link::slack_ratio).fold(f64::INFINITY, f64::min)
    }
}

/// Options for [`proof_trace`] beyond the instance itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    pub r: f64,
    pub n_start: usize,
    /// Multiplier on `C(p)` in the optimal link; anything but `1` falsifies it.
    pub cp_scale: f64,
}

impl TraceOptions {
    pub fn for_p(p: f64) -> Self {
        Self {
            r: default_r(p),
            n_start: 0,
            cp_scale: 1.0,
        }
    }
}

/// Evaluate every quantity of the bound chain for `M_a^{q,N}` on `f ≥ 0`,
/// where `b` is the testing constant for the same `(a, p, q)`.
pub fn proof_trace(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    exps: Exponents,
    b: f64,
    opts: TraceOptions,
) -> Result<ProofTrace> {
    a.check_model(model)?;
    let (p, q, r) = (exps.p(), exps.q(), opts.r);
    let decomp = build_decomposition_from_level(model, f, r, opts.n_start)?;
    let p_conj = holder_conjugate(p)?;
    let mu_leaf = model.leaf_masses(Measure::Mu);
    let nu_leaf = model.leaf_masses(Measure::Nu);
    let mu_node = model.node_masses(Measure::Mu);
    let integrals = model.node_integrals(f, Measure::Mu)?;

    let family = decomp.family();
    let mut slot = vec![usize::MAX; model.node_count()];
    for (i, &c) in family.iter().enumerate() {
        slot[c] = i;
    }
    let n_leaves = model.leaf_count();
    let mut block_values = vec![vec![0.0; n_leaves]; family.len()];
    let mut terms: Vec<f64> = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for x in 0..n_leaves {
        // Going up from the atom, cubes of one block are consecutive.
        let mut current: Option<usize> = None;
        terms.clear();
        for node in model.ancestors_of_leaf(x) {
            let Some(own) = decomp.owner(node) else { break };
            if current != Some(own) {
                if let Some(c) = current {
                    block_values[slot[c]][x] = lq_combine(&terms, q);
                }
                terms.clear();
                current = Some(own);
            }
            terms.push((integrals[node] * a.value(node, x)).abs());
        }
        if let Some(c) = current {
            block_values[slot[c]][x] = lq_combine(&terms, q);
        }
    }

    let truncated = apply_depth_truncated(model, a, f, q, opts.n_start)?;
    let mut reconstruction_error = 0.0f64;
    let mut column = vec![0.0; family.len()];
    for x in 0..n_leaves {
        for (k, vals) in block_values.iter().enumerate() {
            column[k] = vals[x];
        }
        let rebuilt = lq_combine(&column, q);
        reconstruction_error = reconstruction_error.max(tolerance::rel_diff(rebuilt, truncated.values.values()[x]));
    }

    let lhs = weighted_power_sum(truncated.values.values(), nu_leaf, p);
    let f_norm_p = weighted_power_sum(f.values(), mu_leaf, p);
    let b_p = b.powf(p);
    let r_p = r.powf(p);

    let mut links = Vec::with_capacity(family.len() + 4);
    let mut blocks = Vec::with_capacity(family.len());
    let mut est1 = 0.0;
    let mut carleson_sum = 0.0;
    for (k, &c) in family.iter().enumerate() {
        let values = std::mem::take(&mut block_values[k]);
        let norm_p = weighted_power_sum(&values, nu_leaf, p);
        let avg_p = decomp.averages[c].powf(p);
        let bound = r_p * b_p * avg_p * mu_node[c];
        est1 += norm_p;
        carleson_sum += avg_p * mu_node[c];
        blocks.push(BlockTrace {
            cube: c,
            values: FunctionOnX::new(values),
            norm_p,
            bound,
        });
    }

    links.push(Link {
        name: LinkName::Est1,
        cube: None,
        lhs,
        rhs: est1,
    });
    links.extend(blocks.iter().map(|blk| Link {
        name: LinkName::Est2,
        cube: Some(blk.cube),
        lhs: blk.norm_p,
        rhs: blk.bound,
    }));
    let carleson_bound = r / (r - 1.0) * p_conj.powf(p) * f_norm_p;
    links.push(Link {
        name: LinkName::Carleson,
        cube: None,
        lhs: carleson_sum,
        rhs: carleson_bound,
    });
    let final_bound = r.powf(p + 1.0) / (r - 1.0) * p_conj.powf(p) * b_p * f_norm_p;
    links.push(Link {
        name: LinkName::Final,
        cube: None,
        lhs,
        rhs: final_bound,
    });
    let optimal_bound = (r == default_r(p))
        .then(|| (1.0 + 1.0 / p).powf(p + 1.0) * p * p_conj.powf(p) * opts.cp_scale.powf(p) * b_p * f_norm_p);
    if let Some(bound) = optimal_bound {
        links.push(Link {
            name: LinkName::Optimal,
            cube: None,
            lhs,
            rhs: bound,
        });
    }

    Ok(ProofTrace {
        p,
        q,
        r,
        b,
        n_start: opts.n_start,
        blocks,
        lhs,
        est1,
        carleson_sum,
        carleson_bound,
        final_bound,
        optimal_bound,
        reconstruction_error,
        links,
    })
}

/// [`proof_trace`] followed by a check of every link at the default tolerance.
pub fn verify_proof_chain(
    model: &DyadicModel,
    a: &CoefficientFamily,
    f: &FunctionOnX,
    exps: Exponents,
    b: f64,
    opts: TraceOptions,
) -> Result<ProofTrace> {
    let trace = proof_trace(model, a, f, exps, b, opts)?;
    trace.check(tolerance::INEQUALITY)?;
    Ok(trace)
}

/// Audit form of a decomposition: ids per generation and per block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionDump {
    pub r: f64,
    pub top_level: usize,
    pub generations: Vec<Vec<String>>,
    pub blocks: Vec<BlockDump>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockDump {
    pub owner: String,
    pub members: Vec<String>,
}

pub fn dump_decomposition(model: &DyadicModel, decomp: &StoppingDecomposition) -> DecompositionDump {
    let id = |n: usize| model.nodes()[n].id().to_string();
    DecompositionDump {
        r: decomp.r,
        top_level: decomp.top_level,
        generations: decomp
            .generations
            .iter()
            .map(|g| g.iter().map(|&n| id(n)).collect())
            .collect(),
        blocks: decomp
            .blocks()
            .into_iter()
            .map(|(owner, members)| BlockDump {
                owner: id(owner),
                members: members.into_iter().map(id).collect(),
            })
            .collect(),
    }
}
