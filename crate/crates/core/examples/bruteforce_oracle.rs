//! Compare the random-search lower bound with the exhaustive oracle on a
//! three-atom model.

use dyadic_maximal::constants::{
    operator_norm_bruteforce, operator_norm_lower, testing_constant, theorem_constant, SearchBudget,
};
use dyadic_maximal::lattice::read_model;
use dyadic_maximal::operator::{Coefficient, CoefficientFamily};
use dyadic_maximal::{BuildOptions, Exponent, Exponents};

fn main() -> dyadic_maximal::Result<()> {
    let model = read_model(
        r#"{"nodes":[{"id":"R","parent":null,"children":["A","c"]},
                     {"id":"A","parent":"R","children":["a","b"]},
                     {"id":"a","parent":"A"},{"id":"b","parent":"A"},{"id":"c","parent":"R"}],
            "mu":{"a":0.3,"b":1.2,"c":0.5},"nu":{"a":2.0,"b":0.1,"c":1.0}}"#,
        BuildOptions::default(),
    )?;
    // Node order: R, A, a, b, c.
    let a = CoefficientFamily::new(
        &model,
        vec![
            Coefficient::Scalar(0.4),
            Coefficient::Leafwise(vec![1.0, 0.2]),
            Coefficient::Scalar(2.0),
            Coefficient::Scalar(0.0),
            Coefficient::Scalar(1.0),
        ],
    )?;
    let exps = Exponents::new(2.0, Exponent::Finite(3.0))?;
    let b = testing_constant(&model, &a, exps)?.value;
    let lower = operator_norm_lower(&model, &a, exps, SearchBudget::default())?;
    println!("B       = {b:.9}");
    println!("A_lower = {:.9} ({:?})", lower.value, lower.origin);
    for res in [5, 20, 100] {
        println!(
            "A_bf({res:>3}) = {:.9}",
            operator_norm_bruteforce(&model, &a, exps, res)?
        );
    }
    println!("C(p)B   = {:.9}", theorem_constant(2.0)? * b);
    Ok(())
}
