//! Compiling hom_{F,n,m} in all three shapes and checking against the oracle.

use homcircuits::compile::{compile_auto, CompileShape};
use homcircuits::exactnum::rng_from_seed;
use homcircuits::oracle::{hom_count, Host};
use homcircuits::pattern::make_cycle;

fn main() -> homcircuits::Result<()> {
    let f = make_cycle(2)?;
    let (n, m) = (3, 3);
    let host = Host::random(n, m, &mut rng_from_seed(7));
    let want = hom_count(&f, &host)?;
    for shape in [CompileShape::Td, CompileShape::Pw, CompileShape::Tw] {
        let r = compile_auto(&f, shape, n, m)?;
        let got = r.circuit.evaluate(&host.to_assignment())?;
        println!(
            "{}: size {}, depth {}, parameter {}, value matches oracle: {}",
            shape.name(),
            r.circuit.size(),
            r.circuit.depth(),
            r.parameter,
            got == want
        );
    }
    Ok(())
}
