use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Pareto};

use super::{build_model, BuildOptions, DyadicModel, ModelSpec, NodeSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MassLaw {
    Uniform { low: f64, high: f64 },
    LogNormal { mean: f64, sigma: f64 },
    Pareto { scale: f64, shape: f64 },
}

/// Law of the i.i.d. leaf masses, with an optional point mass at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassDistribution {
    pub law: MassLaw,
    pub zero_probability: f64,
}

impl Default for MassDistribution {
    fn default() -> Self {
        Self {
            law: MassLaw::LogNormal { mean: 0.0, sigma: 1.0 },
            zero_probability: 0.0,
        }
    }
}

impl MassDistribution {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        if self.zero_probability > 0.0 && rng.random_bool(self.zero_probability.min(1.0)) {
            return Ok(0.0);
        }
        let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(format!("mass law: {e}"));
        Ok(match self.law {
            MassLaw::Uniform { low, high } => {
                if !(0.0 <= low && low <= high) {
                    return Err(Error::InvalidParameter(format!("uniform mass range [{low}, {high}]")));
                }
                low + (high - low) * rng.random::<f64>()
            }
            MassLaw::LogNormal { mean, sigma } => LogNormal::new(mean, sigma).map_err(|e| bad(&e))?.sample(rng),
            MassLaw::Pareto { scale, shape } => Pareto::new(scale, shape).map_err(|e| bad(&e))?.sample(rng),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomModelParams {
    pub roots: RangeInclusive<usize>,
    /// Depth of the deepest branch; the root alone has depth 0.
    pub depth: RangeInclusive<usize>,
    pub branching: RangeInclusive<usize>,
    /// Chance that an internal position above the target depth becomes a leaf early.
    pub early_leaf_probability: f64,
    pub mu: MassDistribution,
    pub nu: MassDistribution,
}

impl Default for RandomModelParams {
    fn default() -> Self {
        Self {
            roots: 1..=1,
            depth: 1..=4,
            branching: 2..=3,
            early_leaf_probability: 0.2,
            mu: MassDistribution::default(),
            nu: MassDistribution::default(),
        }
    }
}

/// Draw a random forest with i.i.d. leaf masses. Identical `(params, seed)`
/// give identical models.
pub fn random_model(params: &RandomModelParams, seed: u64) -> Result<DyadicModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_model_with(params, &mut rng)
}

pub(crate) fn random_model_with<R: Rng + ?Sized>(params: &RandomModelParams, rng: &mut R) -> Result<DyadicModel> {
    for (name, range) in [
        ("roots", &params.roots),
        ("depth", &params.depth),
        ("branching", &params.branching),
    ] {
        if range.is_empty() {
            return Err(Error::InvalidParameter(format!("empty {name} range {range:?}")));
        }
    }
    if *params.roots.start() < 1 || *params.depth.start() < 1 || *params.branching.start() < 1 {
        return Err(Error::InvalidParameter(
            "roots, depth and branching must all be at least 1".into(),
        ));
    }

    let n_roots = rng.random_range(params.roots.clone());
    let mut nodes: Vec<NodeSpec> = Vec::new();
    let mut leaves: Vec<String> = Vec::new();
    for _ in 0..n_roots {
        let target = rng.random_range(params.depth.clone());
        // (node index, depth), expanded depth-first so ids come out in preorder.
        let root = nodes.len();
        nodes.push(NodeSpec {
            id: format!("n{root}"),
            parent: None,
            children: Vec::new(),
        });
        let mut stack = vec![(root, 0usize)];
        while let Some((idx, depth)) = stack.pop() {
            let is_leaf = depth >= target
                || (depth >= 1
                    && params.early_leaf_probability > 0.0
                    && rng.random_bool(params.early_leaf_probability));
            if is_leaf {
                leaves.push(nodes[idx].id.clone());
                continue;
            }
            let k = rng.random_range(params.branching.clone());
            let mut kids = Vec::with_capacity(k);
            for _ in 0..k {
                let c = nodes.len();
                let id = format!("n{c}");
                nodes.push(NodeSpec {
                    id: id.clone(),
                    parent: Some(nodes[idx].id.clone()),
                    children: Vec::new(),
                });
                nodes[idx].children.push(id);
                kids.push(c);
            }
            for &c in kids.iter().rev() {
                stack.push((c, depth + 1));
            }
        }
    }

    // Leaves were collected in depth-first order, matching the model's leaf order.
    let mut mu = indexmap::IndexMap::with_capacity(leaves.len());
    for id in &leaves {
        mu.insert(id.clone(), params.mu.sample(rng)?);
    }
    let mut nu = indexmap::IndexMap::with_capacity(leaves.len());
    for id in &leaves {
        nu.insert(id.clone(), params.nu.sample(rng)?);
    }

    let opts = BuildOptions {
        min_children: (*params.branching.start()).min(2),
    };
    build_model(&ModelSpec { nodes, mu, nu }, opts)
}
