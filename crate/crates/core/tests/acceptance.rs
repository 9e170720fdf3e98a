//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Every library result is compared against a reference computed in
//! `common` from the definitions, or against a closed form.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dyadic_maximal::constants::{
    constants_report, operator_norm_bruteforce, operator_norm_lower, testing_constant, theorem_constant, SearchBudget,
    VerifyOptions,
};
use dyadic_maximal::lattice::{read_model, MassDistribution, MassLaw, Measure, RandomModelParams};
use dyadic_maximal::sawyer::{random_sawyer_instance, ratio_pair, reduce_three_to_two, verify_reduction};
use dyadic_maximal::stopping::{
    build_decomposition, carleson_embedding_check, default_r, proof_trace, stopping_children, verify_packing,
    CarlesonSequence, TraceOptions,
};
use dyadic_maximal::sweep::{random_instance, Instance, SweepConfig};
use dyadic_maximal::{
    apply_depth_truncated, apply_maximal, apply_truncated, random_model, BuildOptions, DyadicModel, Exponent,
    Exponents, FunctionOnX,
};
use num::{BigInt, BigRational, BigUint, ToPrimitive};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::rel;

const INEQ: f64 = 1e-9;
const IDENT: f64 = 1e-12;
const ORACLE_ABS: f64 = 1e-6;
const SWEEP_INSTANCES: usize = 500;
const SWEEP_SEED: u64 = 20_240_611;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn le(lhs: f64, rhs: f64, tol: f64) -> bool {
    lhs <= rhs + tol * rhs.abs()
}

fn sweep_config() -> SweepConfig {
    SweepConfig {
        seed: SWEEP_SEED,
        depth: (1, 4),
        branching: (2, 3),
        ..Default::default()
    }
}

fn sweep_instances() -> Vec<Instance> {
    let config = sweep_config();
    (0..SWEEP_INSTANCES)
        .map(|k| random_instance(&config, k).expect("instance"))
        .collect()
}

fn exponent_grid() -> Vec<Exponents> {
    let mut out = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        for q in [Exponent::Finite(p), Exponent::Finite(2.0 * p), Exponent::Infinity] {
            out.push(Exponents::new(p, q).unwrap());
        }
    }
    out
}

/// Nonnegative test function: heavy tail, a quarter zeros.
fn random_f(model: &DyadicModel, rng: &mut ChaCha8Rng) -> FunctionOnX {
    let law = MassDistribution {
        law: MassLaw::Pareto { scale: 1.0, shape: 1.5 },
        zero_probability: 0.25,
    };
    FunctionOnX::new((0..model.leaf_count()).map(|_| law.sample(rng).unwrap()).collect())
}

fn criterion_1(instances: &[Instance]) -> Verdict {
    let start = Instant::now();
    let mut checks = 0usize;
    let mut worst_ratio = 0.0f64;
    for (k, inst) in instances.iter().enumerate() {
        for exps in exponent_grid() {
            let (p, q) = (exps.p(), exps.q());
            let opts = VerifyOptions {
                search: SearchBudget {
                    seed: k as u64,
                    ..Default::default()
                },
                ..Default::default()
            };
            let rep = constants_report(&inst.model, &inst.coefficients, exps, &opts).map_err(|e| e.to_string())?;
            let tag = || format!("{} p={p} q={q}", inst.id);

            let b_ref = common::testing_constant(&inst.model, &inst.coefficients, p, q);
            ensure(rel(rep.b, b_ref) <= IDENT, || {
                format!("{}: B {} vs reference {b_ref}", tag(), rep.b)
            })?;
            let c_ref = common::theorem_constant(p);
            ensure(rel(rep.c_p, c_ref) <= IDENT, || {
                format!("{}: C(p) {} vs {c_ref}", tag(), rep.c_p)
            })?;
            if rep.a_lower > 0.0 {
                let w = rep.witness_function.values();
                let a_ref = common::ratio(&inst.model, &inst.coefficients, w, p, q);
                ensure(rel(rep.a_lower, a_ref) <= INEQ, || {
                    format!(
                        "{}: witness ratio {a_ref} does not reproduce A_lower {}",
                        tag(),
                        rep.a_lower
                    )
                })?;
            }
            ensure(le(rep.b, rep.a_lower, INEQ), || {
                format!("{}: B = {} > A_lower = {}", tag(), rep.b, rep.a_lower)
            })?;
            ensure(le(rep.a_lower, rep.c_p * rep.b, INEQ), || {
                format!("{}: A_lower = {} > C(p)B = {}", tag(), rep.a_lower, rep.c_p * rep.b)
            })?;
            if rep.b > 0.0 {
                worst_ratio = worst_ratio.max(rep.a_lower / (rep.c_p * rep.b));
            }
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:.1?}, limit 60 s")
    })?;
    Ok(format!(
        "{checks} (instance, p, q) checks, 0 violations, max A_lower/(C(p)B) = {worst_ratio:.4}, {elapsed:.1?}"
    ))
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let config = SweepConfig {
        seed: SWEEP_SEED + 1,
        depth: (1, 2),
        branching: (1, 3),
        ..Default::default()
    };
    let grid = exponent_grid();
    let mut done = 0usize;
    let mut k = 0usize;
    let mut min_gap = f64::INFINITY;
    while done < 100 {
        let inst = random_instance(&config, k).map_err(|e| e.to_string())?;
        k += 1;
        if inst.model.leaf_count() > 3 {
            continue;
        }
        let exps = grid[done % grid.len()];
        let (p, q) = (exps.p(), exps.q());
        let tag = format!("{} p={p} q={q}", inst.id);
        let b = testing_constant(&inst.model, &inst.coefficients, exps)
            .map_err(|e| e.to_string())?
            .value;
        let b_ref = common::testing_constant(&inst.model, &inst.coefficients, p, q);
        ensure(rel(b, b_ref) <= IDENT, || format!("{tag}: B {b} vs reference {b_ref}"))?;
        let lower = operator_norm_lower(
            &inst.model,
            &inst.coefficients,
            exps,
            SearchBudget {
                seed: k as u64,
                ..Default::default()
            },
        );
        let a_bf = operator_norm_bruteforce(&inst.model, &inst.coefficients, exps, 200);
        match (lower, a_bf) {
            (Ok(lower), Ok(a_bf)) => {
                let c = theorem_constant(p).unwrap();
                ensure(b - ORACLE_ABS <= a_bf, || format!("{tag}: B = {b} > A_bf = {a_bf}"))?;
                ensure(a_bf <= c * b + ORACLE_ABS, || {
                    format!("{tag}: A_bf = {a_bf} > C(p)B = {}", c * b)
                })?;
                ensure(a_bf >= lower.value - ORACLE_ABS, || {
                    format!("{tag}: A_bf = {a_bf} < A_lower = {}", lower.value)
                })?;
                min_gap = min_gap.min(a_bf - lower.value);
            }
            // All of mu vanishes: every candidate has zero norm and there is nothing to compare.
            (Err(_), Err(_)) if b == 0.0 => {}
            (l, r) => return Err(format!("{tag}: lower {l:?}, brute force {r:?}")),
        }
        done += 1;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || {
        format!("took {elapsed:.1?}, limit 120 s")
    })?;
    Ok(format!(
        "100 instances (<= 3 atoms, resolution 200), min A_bf - A_lower = {min_gap:.2e}, {elapsed:.1?}"
    ))
}

fn criterion_3() -> Verdict {
    // sqrt(27) to 20 decimals by integer square root.
    let scale = BigUint::from(10u32).pow(20);
    let root = (BigUint::from(27u32) * &scale * &scale).sqrt();
    let reference = BigRational::new(BigInt::from(root), BigInt::from(scale))
        .to_f64()
        .unwrap();
    let c2 = theorem_constant(2.0).map_err(|e| e.to_string())?;
    ensure((c2 - reference).abs() <= IDENT, || {
        format!("C(2) = {c2}, 3*sqrt(3) = {reference}")
    })?;

    let c_big = theorem_constant(1e6).map_err(|e| e.to_string())?;
    ensure((c_big - 1.0).abs() <= 1e-3, || format!("C(1e6) = {c_big}"))?;

    // Cubes of C(3/2) and C(3) are rational: 5^5/4 and 32.
    let c15 = theorem_constant(1.5).unwrap().powi(3);
    let c3 = theorem_constant(3.0).unwrap().powi(3);
    ensure(rel(c15, 3125.0 / 4.0) <= IDENT, || format!("C(1.5)^3 = {c15}"))?;
    ensure(rel(c3, 32.0) <= IDENT, || format!("C(3)^3 = {c3}"))?;
    Ok(format!(
        "C(2) - 3*sqrt(3) = {:.1e}, C(1e6) - 1 = {:.2e}",
        c2 - reference,
        c_big - 1.0
    ))
}

fn criterion_4(instances: &[Instance]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED + 4);
    let mut worst = 0.0f64;
    let mut runs = 0usize;
    for inst in instances {
        let m = &inst.model;
        for p in [1.5, 2.0, 3.0] {
            let r = default_r(p);
            let packing_const = r / (r - 1.0);
            let f = random_f(m, &mut rng);
            let fv = f.values();
            let tag = format!("{} p={p}", inst.id);
            let d = build_decomposition(m, &f, r).map_err(|e| e.to_string())?;
            let rep = verify_packing(m, &d);
            ensure(rep.violations(INEQ) == 0, || {
                format!("{tag}: {} packing violations", rep.violations(INEQ))
            })?;
            ensure(le(rep.worst_ratio, packing_const, INEQ), || {
                format!("{tag}: worst ratio {} > {packing_const}", rep.worst_ratio)
            })?;
            worst = worst.max(rep.worst_ratio / packing_const);

            let family = d.family();
            for c in 0..m.node_count() {
                let mu_c = common::mass(m, c, Measure::Mu);
                let packed: f64 = family
                    .iter()
                    .filter(|&&g| m.contains(c, g))
                    .map(|&g| common::mass(m, g, Measure::Mu))
                    .sum();
                ensure(le(packed, packing_const * mu_c, INEQ), || {
                    format!(
                        "{tag}: reference packing fails at node {c}: {packed} > {}",
                        packing_const * mu_c
                    )
                })?;
            }

            let mut seen = vec![0usize; m.node_count()];
            for (owner, members) in d.blocks() {
                let avg_q = common::average(m, fv, owner);
                for &node in &members {
                    seen[node] += 1;
                    ensure(m.contains(owner, node), || {
                        format!("{tag}: {node} outside block owner {owner}")
                    })?;
                    ensure(d.owner(node) == Some(owner), || {
                        format!("{tag}: owner table disagrees at {node}")
                    })?;
                    if node != owner && common::mass(m, node, Measure::Mu) > 0.0 {
                        let avg_r = common::average(m, fv, node);
                        let controlled = if avg_q > 0.0 { avg_r < r * avg_q } else { avg_r == 0.0 };
                        ensure(controlled, || {
                            format!("{tag}: average {avg_r} at {node} escapes r*avg = {}", r * avg_q)
                        })?;
                    }
                }
                for s in stopping_children(m, &f, owner, r).map_err(|e| e.to_string())? {
                    ensure(d.is_stopping(s), || {
                        format!("{tag}: stopping child {s} missing from family")
                    })?;
                    ensure(common::average(m, fv, s) >= r * avg_q, || {
                        format!("{tag}: child {s} too small")
                    })?;
                }
            }
            ensure(seen.iter().all(|&c| c == 1), || {
                format!("{tag}: blocks do not partition the cubes")
            })?;
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} decompositions, 0 violations, max packing ratio / (r/(r-1)) = {worst:.4}"
    ))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED + 5);
    let weight_law = MassDistribution {
        zero_probability: 0.3,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    for k in 0..500u64 {
        let m = random_model(&RandomModelParams::default(), SWEEP_SEED + k).map_err(|e| e.to_string())?;
        let w: Vec<f64> = (0..m.node_count())
            .map(|_| weight_law.sample(&mut rng).unwrap())
            .collect();
        let f = random_f(&m, &mut rng);
        let p = 1.1 + 3.9 * rng.random::<f64>();
        let seq = CarlesonSequence::new(&m, w.clone()).map_err(|e| e.to_string())?;
        let rep = carleson_embedding_check(&m, &seq, &f, p).map_err(|e| e.to_string())?;

        let packing_ref = (0..m.node_count())
            .map(|r| {
                let inside: f64 = (0..m.node_count()).filter(|&q| m.contains(r, q)).map(|q| w[q]).sum();
                inside / common::mass(&m, r, Measure::Mu)
            })
            .fold(0.0, f64::max);
        let lhs_ref: f64 = (0..m.node_count())
            .map(|q| common::average(&m, f.values(), q).powf(p) * w[q])
            .sum();
        let pc = p / (p - 1.0);
        let bound_ref = pc.powf(p) * packing_ref * common::norm(&m, f.values(), p, Measure::Mu).powf(p);
        let tag = format!("tuple {k} p={p:.3}");
        ensure(rel(seq.packing_constant(), packing_ref) <= IDENT, || {
            format!("{tag}: packing {} vs reference {packing_ref}", seq.packing_constant())
        })?;
        ensure(rel(rep.lhs, lhs_ref) <= IDENT, || {
            format!("{tag}: lhs {} vs reference {lhs_ref}", rep.lhs)
        })?;
        ensure(rel(rep.bound, bound_ref) <= IDENT, || {
            format!("{tag}: bound {} vs {bound_ref}", rep.bound)
        })?;
        ensure(le(rep.lhs, rep.bound, INEQ), || {
            format!("{tag}: {} > {}", rep.lhs, rep.bound)
        })?;
        if rep.bound > 0.0 {
            worst = worst.max(rep.lhs / rep.bound);
        }
    }

    // One atom, w = mu, f = 1: lhs = mu and the bound is exactly (p')^p times it.
    let single = read_model(
        r#"{"nodes":[{"id":"x","parent":null}],"mu":{"x":2.5},"nu":{"x":1.0}}"#,
        BuildOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    for p in [1.25, 1.5, 2.0, 3.0, 7.0] {
        let seq = CarlesonSequence::new(&single, vec![2.5]).unwrap();
        let rep = carleson_embedding_check(&single, &seq, &FunctionOnX::new(vec![1.0]), p).unwrap();
        let factor = (p / (p - 1.0)).powf(p);
        ensure(
            rel(rep.lhs, 2.5) <= IDENT && rel(rep.bound / rep.lhs, factor) <= IDENT,
            || {
                format!(
                    "single atom p={p}: lhs {} bound {} expected factor {factor}",
                    rep.lhs, rep.bound
                )
            },
        )?;
    }
    Ok(format!(
        "500 tuples, 0 violations, max lhs/bound = {worst:.4}; single-atom slack equals (p')^p"
    ))
}

fn criterion_6(instances: &[Instance]) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED + 6);
    let mut worst_slack = f64::INFINITY;
    let mut worst_final = f64::INFINITY;
    let mut worst_rebuild = 0.0f64;
    let mut traces = 0usize;
    for (k, inst) in instances.iter().enumerate() {
        let m = &inst.model;
        for exps in exponent_grid() {
            let (p, q) = (exps.p(), exps.q());
            let f = random_f(m, &mut rng);
            let b = testing_constant(m, &inst.coefficients, exps)
                .map_err(|e| e.to_string())?
                .value;
            let n_start = (k + traces) % (m.max_depth() + 1);
            let opts = TraceOptions {
                n_start,
                ..TraceOptions::for_p(p)
            };
            let tr = proof_trace(m, &inst.coefficients, &f, exps, b, opts).map_err(|e| e.to_string())?;
            let tag = format!("{} p={p} q={q} N={n_start}", inst.id);

            tr.check(INEQ).map_err(|e| format!("{tag}: {e}"))?;
            ensure(tr.links.len() == tr.blocks.len() + 4, || {
                format!("{tag}: {} links", tr.links.len())
            })?;
            ensure(tr.reconstruction_error <= IDENT, || {
                format!("{tag}: reconstruction error {:e}", tr.reconstruction_error)
            })?;

            let pc = p / (p - 1.0);
            let f_norm_p = common::norm(m, f.values(), p, Measure::Mu).powf(p);
            let optimal_ref = (1.0 + 1.0 / p).powf(p + 1.0) * p * pc.powf(p) * b.powf(p) * f_norm_p;
            let optimal = tr.optimal_bound.ok_or_else(|| format!("{tag}: optimal link missing"))?;
            ensure(rel(optimal, optimal_ref) <= IDENT, || {
                format!("{tag}: optimal {optimal} vs {optimal_ref}")
            })?;
            let via_cp = (common::theorem_constant(p) * b).powf(p) * f_norm_p;
            ensure(rel(optimal, via_cp) <= 1e-11, || {
                format!("{tag}: optimal {optimal} vs C(p)^p B^p |f|^p {via_cp}")
            })?;

            let truncated = common::operator(m, &inst.coefficients, f.values(), q, |c| {
                m.nodes()[c].depth() >= n_start
            });
            let lib_trunc = apply_depth_truncated(m, &inst.coefficients, &f, q, n_start).unwrap();
            for (x, &expected) in truncated.iter().enumerate() {
                let column: Vec<f64> = tr.blocks.iter().map(|blk| blk.values.values()[x]).collect();
                let rebuilt = match q {
                    Exponent::Infinity => column.iter().copied().fold(0.0, f64::max),
                    Exponent::Finite(e) => column.iter().map(|v| v.powf(e)).sum::<f64>().powf(1.0 / e),
                };
                let err = rel(rebuilt, expected).max(rel(lib_trunc.values.values()[x], expected));
                worst_rebuild = worst_rebuild.max(err);
                ensure(err <= IDENT, || {
                    format!("{tag}: atom {x} rebuilt {rebuilt} vs {}", expected)
                })?;
            }
            worst_slack = worst_slack.min(
                tr.links
                    .iter()
                    .filter(|l| l.lhs > 0.0)
                    .map(|l| l.rhs / l.lhs)
                    .fold(f64::INFINITY, f64::min),
            );
            if tr.lhs > 0.0 {
                worst_final = worst_final.min(tr.final_bound / tr.lhs);
            }
            traces += 1;
        }
    }
    Ok(format!(
        "{traces} traces, every link holds (min rhs/lhs = {worst_slack:.6}, final link {worst_final:.3}), \
         max reconstruction error {worst_rebuild:.1e}"
    ))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED + 7);
    let mut worst_identity = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let qs = [Exponent::Infinity, Exponent::Finite(4.0), Exponent::Finite(7.0)];
    for k in 0..200u64 {
        let p = [1.5, 2.0, 3.0][k as usize % 3];
        let q = qs[k as usize % qs.len()];
        let inst =
            random_sawyer_instance(&RandomModelParams::default(), p, SWEEP_SEED + k).map_err(|e| e.to_string())?;
        let red = reduce_three_to_two(&inst).map_err(|e| e.to_string())?;
        let e = 1.0 / (p - 1.0);
        for (x, (&o, &w)) in inst.omega.iter().zip(&inst.w).enumerate() {
            let mu_ref = if o == 0.0 { 0.0 } else { o / w.powf(e) };
            ensure(rel(red.mu[x], mu_ref) <= IDENT, || {
                format!("instance {k}: mu[{x}] {} vs {mu_ref}", red.mu[x])
            })?;
        }
        for j in 0..20 {
            let f = random_f(&inst.model, &mut rng);
            let tag = format!("instance {k} f{j}");
            let rep = verify_reduction(&inst, &f, q).map_err(|e| format!("{tag}: {e}"))?;
            worst_identity = worst_identity.max(rep.integral_error.max(rep.operator_error).max(rep.norm_error));

            let g = red.transform(&f);
            for c in 0..inst.model.node_count() {
                let lhs: f64 = common::atoms_of(&inst.model, c)
                    .iter()
                    .map(|&x| g.values()[x] * red.mu[x])
                    .sum();
                let rhs: f64 = common::atoms_of(&inst.model, c)
                    .iter()
                    .map(|&x| f.values()[x] * inst.omega[x])
                    .sum();
                ensure(rel(lhs, rhs) <= IDENT, || format!("{tag}: node {c}: {lhs} vs {rhs}"))?;
            }
            if let Some((two, three)) = ratio_pair(&inst, &f, q).map_err(|e| e.to_string())? {
                let d = rel(two, three);
                worst_ratio = worst_ratio.max(d);
                ensure(d <= IDENT, || format!("{tag}: ratios {two} vs {three}"))?;
            }
        }
    }
    Ok(format!(
        "200 instances x 20 functions, max identity error {worst_identity:.1e}, max ratio gap {worst_ratio:.1e}"
    ))
}

#[derive(Debug, Clone)]
struct LawCase {
    seed: u64,
    q1: Exponent,
    q2: Exponent,
    lambda: f64,
    f: Vec<f64>,
    g: Vec<f64>,
    cube: usize,
    n_start: usize,
}

fn exponent_strategy() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        1 => Just(Exponent::Infinity),
        4 => (1.01f64..12.0).prop_map(Exponent::Finite),
    ]
}

fn law_case() -> impl Strategy<Value = LawCase> {
    (
        any::<u64>(),
        exponent_strategy(),
        exponent_strategy(),
        -8.0f64..8.0,
        prop::collection::vec(-10.0f64..10.0, 81),
        prop::collection::vec(-10.0f64..10.0, 81),
        any::<usize>(),
        any::<usize>(),
    )
        .prop_map(|(seed, a, b, lambda, f, g, cube, n_start)| {
            // q1 >= q2.
            let (q1, q2) = if a.ge(b) { (a, b) } else { (b, a) };
            LawCase {
                seed,
                q1,
                q2,
                lambda,
                f,
                g,
                cube,
                n_start,
            }
        })
}

fn check_laws(case: &LawCase) -> Result<(), TestCaseError> {
    let inst = random_instance(
        &SweepConfig {
            seed: case.seed,
            depth: (1, 4),
            branching: (2, 3),
            ..Default::default()
        },
        0,
    )
    .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (m, a) = (&inst.model, &inst.coefficients);
    let n = m.leaf_count();
    let f = FunctionOnX::new(case.f[..n].to_vec());
    let g = FunctionOnX::new(case.g[..n].to_vec());
    let sum = FunctionOnX::new(f.values().iter().zip(g.values()).map(|(x, y)| x + y).collect());
    let apply = |h: &FunctionOnX, q: Exponent| apply_maximal(m, a, h, q).unwrap().values.into_inner();

    let m1 = apply(&f, case.q1);
    let m2 = apply(&f, case.q2);
    let reference = common::full(m, a, f.values(), case.q2);
    let mg = apply(&g, case.q2);
    let msum = apply(&sum, case.q2);
    let mscaled = apply(&f.scaled(case.lambda), case.q2);
    let cube = case.cube % m.node_count();
    let by_cube = apply_truncated(m, a, &f, case.q2, cube).unwrap().values.into_inner();
    let n_start = case.n_start % (m.max_depth() + 1);
    let by_depth = apply_depth_truncated(m, a, &f, case.q2, n_start)
        .unwrap()
        .values
        .into_inner();
    let deeper = apply_depth_truncated(m, a, &f, case.q2, (n_start + 1).min(m.max_depth()))
        .unwrap()
        .values
        .into_inner();

    for x in 0..n {
        prop_assert!(
            rel(m2[x], reference[x]) <= IDENT,
            "definition: {} vs {}",
            m2[x],
            reference[x]
        );
        prop_assert!(
            le(m1[x], m2[x], IDENT),
            "q-monotone: M^{} = {} > M^{} = {}",
            case.q1,
            m1[x],
            case.q2,
            m2[x]
        );
        prop_assert!(le(msum[x], m2[x] + mg[x], IDENT), "sublinear at {x}");
        prop_assert!(
            rel(mscaled[x], case.lambda.abs() * m2[x]) <= IDENT,
            "homogeneous at {x}"
        );
        prop_assert!(
            le(by_cube[x], m2[x], IDENT),
            "cube truncation exceeds full operator at {x}"
        );
        prop_assert!(
            le(by_depth[x], m2[x], IDENT),
            "depth truncation exceeds full operator at {x}"
        );
        prop_assert!(le(deeper[x], by_depth[x], IDENT), "deeper truncation is larger at {x}");
        if !m.contains(cube, m.leaves()[x]) {
            prop_assert!(by_cube[x] == 0.0, "cube truncation nonzero off the cube");
        }
    }
    Ok(())
}

fn criterion_8() -> Verdict {
    let mut runner = TestRunner::new(Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&law_case(), |case| check_laws(&case))
        .map_err(|e| e.to_string())?;
    Ok("1000 cases: definition, q-monotonicity, sublinearity, homogeneity, truncation bounds".into())
}

fn main() -> ExitCode {
    let instances = sweep_instances();
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: [Criterion; 8] = [
        ("testing sandwich on random sweep", Box::new(|| criterion_1(&instances))),
        ("exhaustive oracle on tiny models", Box::new(criterion_2)),
        ("theorem constant values", Box::new(criterion_3)),
        ("stopping packing and blocks", Box::new(|| criterion_4(&instances))),
        ("Carleson embedding", Box::new(criterion_5)),
        (
            "bound chain and block reconstruction",
            Box::new(|| criterion_6(&instances)),
        ),
        ("change of weight identities", Box::new(criterion_7)),
        ("operator laws", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail}) [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why}) [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
