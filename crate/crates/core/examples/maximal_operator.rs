//! Evaluate `M_a^q` and its truncations on a small model.

use dyadic_maximal::lattice::read_model;
use dyadic_maximal::operator::classical_coefficients;
use dyadic_maximal::{
    apply_depth_truncated, apply_maximal, apply_truncated, BuildOptions, CoefficientFamily, Exponent, FunctionOnX,
    Measure,
};

fn main() -> dyadic_maximal::Result<()> {
    let model = read_model(
        r#"{"nodes":[{"id":"Q0","parent":null,"children":["L1","L2"]},
                     {"id":"L1","parent":"Q0"},{"id":"L2","parent":"Q0"}],
            "mu":{"L1":1.0,"L2":1.0},"nu":{"L1":1.0,"L2":1.0}}"#,
        BuildOptions::default(),
    )?;
    let ones = CoefficientFamily::constant(&model, 1.0)?;
    let f = FunctionOnX::constant(&model, 1.0);

    for q in [Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity] {
        let m = apply_maximal(&model, &ones, &f, q)?;
        println!("a = 1, f = 1, q = {q:<3}: {:?}", m.values.values());
    }

    let l1 = model.index_of("L1")?;
    let by_cube = apply_truncated(&model, &ones, &f, Exponent::Infinity, l1)?;
    println!("only cubes inside L1:    {:?}", by_cube.values.values());
    let by_depth = apply_depth_truncated(&model, &ones, &f, Exponent::Infinity, 1)?;
    println!("only cubes at depth >= 1: {:?}", by_depth.values.values());

    // Classical averaging operator: a_Q = 1/mu(Q).
    let averaging = classical_coefficients(&model, model.leaf_masses(Measure::Mu), 1.0)?;
    let g = FunctionOnX::new(vec![3.0, 1.0]);
    let m = apply_maximal(&model, &averaging, &g, Exponent::Infinity)?;
    println!("dyadic maximal function of (3, 1): {:?}", m.values.values());
    Ok(())
}
