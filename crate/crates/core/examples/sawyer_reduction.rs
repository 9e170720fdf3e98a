//! Turn a three-measure fractional maximal estimate into a two-measure one
//! and confirm that nothing changes.

use dyadic_maximal::lattice::RandomModelParams;
use dyadic_maximal::sawyer::{random_sawyer_instance, ratio_pair, reduce_three_to_two, verify_reduction, write_sawyer};
use dyadic_maximal::{Exponent, FunctionOnX};

fn main() -> dyadic_maximal::Result<()> {
    let inst = random_sawyer_instance(&RandomModelParams::default(), 2.0, 9)?;
    let red = reduce_three_to_two(&inst)?;
    println!(
        "alpha = {:.3}, p = {}, {} atoms",
        inst.alpha,
        inst.p,
        inst.model.leaf_count()
    );
    for x in 0..inst.model.leaf_count().min(4) {
        println!(
            "  omega {:.3}  w {:.3}  ->  mu {:.3}",
            inst.omega[x], inst.w[x], red.mu[x]
        );
    }
    let f = FunctionOnX::new((0..inst.model.leaf_count()).map(|k| (k % 3) as f64 + 0.5).collect());
    let rep = verify_reduction(&inst, &f, Exponent::Infinity)?;
    println!(
        "identity errors: integrals {:.1e}, operator {:.1e}, norms {:.1e} ({} vs {})",
        rep.integral_error, rep.operator_error, rep.norm_error, rep.norm_reduced, rep.norm_original
    );
    if let Some((two, three)) = ratio_pair(&inst, &f, Exponent::Infinity)? {
        println!("ratio two-measure {two:.12} vs three-measure {three:.12}");
    }
    println!("instance file is {} bytes", write_sawyer(&inst).len());
    Ok(())
}
