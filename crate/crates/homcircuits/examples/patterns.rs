//! Generating patterns, testing isomorphism and finding a minor.

use homcircuits::pattern::{are_isomorphic, enumerate_patterns, find_minor, make_cycle, make_grid, make_path};

fn main() -> homcircuits::Result<()> {
    let p5 = make_path(5)?;
    println!("P5: {}", p5.to_json());
    println!("P5 ≅ P5 with sides swapped: {}", are_isomorphic(&p5, &p5.transposed())?);

    let c4 = make_cycle(2)?;
    let grid = make_grid(2, 3)?;
    match find_minor(&c4, &grid)? {
        Some(b) => println!("C4 ⪯ 2×3 grid, branch sets {:?}", b.sets),
        None => println!("C4 is not a minor of the 2×3 grid"),
    }

    let all = enumerate_patterns(6, 2, 8, true);
    println!("{} patterns with ≤ 6 vertices, multiplicity ≤ 2, ≤ 8 edges", all.len());
    Ok(())
}
