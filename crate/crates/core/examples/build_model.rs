//! Build a model from its file form, inspect cubes and masses, write it back.

use dyadic_maximal::lattice::{read_model, write_model};
use dyadic_maximal::{average, integrate, lp_norm, BuildOptions, Exponent, FunctionOnX, Measure};

const MODEL: &str = r#"{
  "nodes": [
    {"id": "X",  "parent": null, "children": ["A", "B"]},
    {"id": "A",  "parent": "X",  "children": ["A0", "A1"]},
    {"id": "B",  "parent": "X"},
    {"id": "A0", "parent": "A"},
    {"id": "A1", "parent": "A"}
  ],
  "mu": {"A0": 0.5, "A1": 1.5, "B": 2.0},
  "nu": {"A0": 1.0, "A1": 0.0, "B": 3.0}
}"#;

fn main() -> dyadic_maximal::Result<()> {
    let model = read_model(MODEL, BuildOptions::default())?;
    println!(
        "{} cubes, {} atoms, depth {}",
        model.node_count(),
        model.leaf_count(),
        model.max_depth()
    );
    for (idx, node) in model.nodes().iter().enumerate() {
        println!(
            "  {:<3} depth {}  atoms {:?}  mu {:.2}  nu {:.2}",
            node.id(),
            node.depth(),
            node.leaf_range(),
            model.mass(idx, Measure::Mu)?,
            model.mass(idx, Measure::Nu)?
        );
    }

    let f = FunctionOnX::new(vec![4.0, 0.0, 1.0]);
    let a = model.index_of("A")?;
    println!("int_A f dmu = {}", integrate(&model, &f, a, Measure::Mu)?);
    println!("avg_A f     = {}", average(&model, &f, a, Measure::Mu)?);
    println!(
        "|f|_L2(mu)  = {:.6}",
        lp_norm(&model, &f, Exponent::Finite(2.0), Measure::Mu)?
    );

    // A cube with a single child is rejected unless the build is permissive.
    let chain = r#"{"nodes":[{"id":"r","parent":null,"children":["x"]},{"id":"x","parent":"r"}],
                    "mu":{"x":1.0},"nu":{"x":1.0}}"#;
    println!(
        "strict build of a chain: {}",
        read_model(chain, BuildOptions::default()).unwrap_err()
    );
    println!(
        "permissive build: {} cubes",
        read_model(chain, BuildOptions::permissive())?.node_count()
    );

    print!("{}", write_model(&model));
    println!();
    Ok(())
}
