//! Stopping family, blocks and packing for a function on a random model.

use dyadic_maximal::lattice::RandomModelParams;
use dyadic_maximal::stopping::{build_decomposition, default_r, dump_decomposition, verify_packing};
use dyadic_maximal::{random_model, FunctionOnX};

fn main() -> dyadic_maximal::Result<()> {
    let model = random_model(&RandomModelParams::default(), 7)?;
    // A spike on the first atom forces stopping cubes along its chain.
    let mut values = vec![1.0; model.leaf_count()];
    values[0] = 50.0;
    let f = FunctionOnX::new(values);
    let r = default_r(2.0);

    let decomp = build_decomposition(&model, &f, r)?;
    let dump = dump_decomposition(&model, &decomp);
    println!("r = {r}");
    for (k, generation) in dump.generations.iter().enumerate() {
        println!("generation {}: {generation:?}", k + 1);
    }
    for block in &dump.blocks {
        println!("block of {}: {} cubes", block.owner, block.members.len());
    }

    let packing = verify_packing(&model, &decomp);
    println!(
        "worst packing ratio {:.4} <= r/(r-1) = {:.4}: {}",
        packing.worst_ratio,
        packing.constant,
        packing.holds(1e-9)
    );
    Ok(())
}
