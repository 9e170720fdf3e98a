//! Every quantity of the bound chain `‖Mf‖^p ≤ ... ≤ C(p)^p B^p ‖f‖^p` on a
//! random instance.

use dyadic_maximal::constants::testing_constant;
use dyadic_maximal::lattice::RandomModelParams;
use dyadic_maximal::stopping::{verify_proof_chain, LinkName, TraceOptions};
use dyadic_maximal::{random_model, CoefficientFamily, Exponent, Exponents, FunctionOnX};

fn main() -> dyadic_maximal::Result<()> {
    let model = random_model(&RandomModelParams::default(), 11)?;
    let a = CoefficientFamily::constant(&model, 1.0)?;
    let exps = Exponents::new(2.0, Exponent::Finite(4.0))?;
    let b = testing_constant(&model, &a, exps)?.value;
    let f = FunctionOnX::new((0..model.leaf_count()).map(|k| 1.0 + (k * 7 % 5) as f64).collect());

    let trace = verify_proof_chain(&model, &a, &f, exps, b, TraceOptions::for_p(2.0))?;
    println!("B = {b:.4}, r = {}, {} blocks", trace.r, trace.blocks.len());
    println!("|M f|^p              = {:.4}", trace.lhs);
    println!("sum |F_Q|^p          = {:.4}", trace.est1);
    println!(
        "sum avg^p mu(Q)      = {:.4} <= {:.4}",
        trace.carleson_sum, trace.carleson_bound
    );
    println!("final bound          = {:.4}", trace.final_bound);
    println!("optimal bound        = {:.4}", trace.optimal_bound.unwrap_or(f64::NAN));
    println!("reconstruction error = {:.1e}", trace.reconstruction_error);
    let est2 = trace.links.iter().filter(|l| l.name == LinkName::Est2);
    let tightest = est2.map(|l| l.slack_ratio()).fold(f64::INFINITY, f64::min);
    println!("tightest block estimate rhs/lhs = {tightest:.3}");

    let deep = verify_proof_chain(
        &model,
        &a,
        &f,
        exps,
        b,
        TraceOptions {
            n_start: 1,
            ..TraceOptions::for_p(2.0)
        },
    )?;
    println!("dropping the top level: lhs {:.4} <= {:.4}", deep.lhs, deep.final_bound);
    Ok(())
}
