//! Testing constant, a certified lower bound for the operator norm, and the
//! upper bound `C(p)·B`, on one model and on a random one.

use dyadic_maximal::constants::{theorem_constant, verify_theorem, VerifyOptions};
use dyadic_maximal::lattice::{read_model, RandomModelParams};
use dyadic_maximal::{random_model, BuildOptions, CoefficientFamily, Exponent, Exponents};

fn main() -> dyadic_maximal::Result<()> {
    for p in [1.5, 2.0, 3.0, 10.0, 1e6] {
        println!("C({p}) = {:.6}", theorem_constant(p)?);
    }

    let e1 = read_model(
        r#"{"nodes":[{"id":"Q0","parent":null,"children":["L1","L2"]},
                     {"id":"L1","parent":"Q0"},{"id":"L2","parent":"Q0"}],
            "mu":{"L1":1.0,"L2":1.0},"nu":{"L1":1.0,"L2":1.0}}"#,
        BuildOptions::default(),
    )?;
    let a = CoefficientFamily::constant(&e1, 1.0)?;
    let rep = verify_theorem(
        &e1,
        &a,
        Exponents::new(2.0, Exponent::Infinity)?,
        &VerifyOptions::default(),
    )?;
    println!(
        "two atoms: B = {}, A >= {}, C(p)B = {:.4}, margins ({:.3}, {:.3})",
        rep.b,
        rep.a_lower,
        rep.c_p * rep.b,
        rep.margins.0,
        rep.margins.1
    );

    let model = random_model(&RandomModelParams::default(), 42)?;
    let a = CoefficientFamily::constant(&model, 0.5)?;
    for q in [Exponent::Finite(3.0), Exponent::Infinity] {
        let rep = verify_theorem(&model, &a, Exponents::new(3.0, q)?, &VerifyOptions::default())?;
        println!(
            "random model ({} atoms), p = 3, q = {q}: B = {:.4} <= A_lower = {:.4} <= C(p)B = {:.4} (witness {:?})",
            model.leaf_count(),
            rep.b,
            rep.a_lower,
            rep.c_p * rep.b,
            rep.witness_origin
        );
    }
    Ok(())
}
