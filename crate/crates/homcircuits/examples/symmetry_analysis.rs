//! Orbits, minimal supports and support depth of a compiled formula.

use homcircuits::compile::{compile_auto, CompileShape};
use homcircuits::pattern::make_path;
use homcircuits::symmetry::{is_rigid, is_symmetric, SymmetryAnalysis};

fn main() -> homcircuits::Result<()> {
    let f = make_path(4)?;
    let (n, m) = (4, 4);
    let r = compile_auto(&f, CompileShape::Td, n, m)?;
    println!("symmetric {}, rigid {}", is_symmetric(&r.circuit, n, m)?, is_rigid(&r.circuit)?);
    let an = SymmetryAnalysis::new(&r.circuit, n, m)?;
    println!("maxOrb {}, maxSup {}", an.max_orbit(), an.max_sup());
    match an.support_depth() {
        Ok(d) => println!("support depth {d}"),
        Err(e) => println!("support depth unavailable: {e}"),
    }
    Ok(())
}
