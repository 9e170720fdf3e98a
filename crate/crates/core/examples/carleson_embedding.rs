//! The martingale Carleson embedding for random weights, and its sharp
//! single-atom case.

use dyadic_maximal::lattice::{read_model, RandomModelParams};
use dyadic_maximal::stopping::{carleson_embedding_check, CarlesonSequence};
use dyadic_maximal::{random_model, BuildOptions, FunctionOnX};

fn main() -> dyadic_maximal::Result<()> {
    let model = random_model(&RandomModelParams::default(), 3)?;
    let w: Vec<f64> = (0..model.node_count())
        .map(|k| if k % 3 == 0 { 0.7 } else { 0.1 })
        .collect();
    let seq = CarlesonSequence::new(&model, w)?;
    let f = FunctionOnX::new((0..model.leaf_count()).map(|k| (k % 4) as f64).collect());
    for p in [1.5, 2.0, 4.0] {
        let rep = carleson_embedding_check(&model, &seq, &f, p)?;
        println!(
            "p = {p}: sum (avg f)^p w = {:.4} <= {:.4} (packing {:.4})",
            rep.lhs, rep.bound, rep.packing_constant
        );
    }

    let atom = read_model(
        r#"{"nodes":[{"id":"x","parent":null}],"mu":{"x":1.0},"nu":{"x":1.0}}"#,
        BuildOptions::default(),
    )?;
    let seq = CarlesonSequence::new(&atom, vec![1.0])?;
    let rep = carleson_embedding_check(&atom, &seq, &FunctionOnX::new(vec![1.0]), 2.0)?;
    println!(
        "one atom, w = mu, f = 1: bound / lhs = {} = (p')^p",
        rep.bound / rep.lhs
    );
    Ok(())
}
