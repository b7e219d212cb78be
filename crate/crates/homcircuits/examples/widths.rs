//! Exact treewidth, pathwidth and treedepth with checked certificates.

use homcircuits::pattern::make_grid;
use homcircuits::width::{check_decomposition, pathwidth_exact, treedepth_exact, treewidth_exact, Decomposition};

fn main() -> homcircuits::Result<()> {
    let g = make_grid(3, 3)?;
    let (tw, t) = treewidth_exact(&g)?;
    let (pw, p) = pathwidth_exact(&g)?;
    let (td, e) = treedepth_exact(&g)?;
    println!("3×3 grid: tw {tw}, pw {pw}, td {td}");
    for d in [Decomposition::Tree(t), Decomposition::Path(p), Decomposition::Elimination(e)] {
        println!("certificate valid: {}", check_decomposition(&g, &d).is_ok());
    }
    Ok(())
}
