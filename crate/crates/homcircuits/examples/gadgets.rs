//! The clique grid, binary tree and path gadgets against their targets.

use homcircuits::exactnum::{int, Rational};
use homcircuits::oracle::colhom_eval;
use homcircuits::reduce::{btree_poly, btree_vp_gadget, clique_grid_gadget, clique_poly, path_poly, path_vbp_gadget};

fn main() -> homcircuits::Result<()> {
    let ones = |_: usize, _: usize| int(1);
    let g = clique_grid_gadget(2, &ones)?;
    println!("clique_2 all-ones: gadget {}, target {}", colhom_eval(&g.pattern, &g.graph)?, clique_poly(2, &ones));

    let x = vec![1i128; 64];
    let y = vec![vec![1i128; 64]; 64];
    let g = btree_vp_gadget(2, &x, &y)?;
    println!("btree m=2 all-ones: gadget {}, target {}", colhom_eval(&g.pattern, &g.graph)?, btree_poly(2, &x, &y)?);

    let x: Vec<Rational> = (1..=4).map(int).collect();
    let y: Vec<Vec<Rational>> = (0..4).map(|i| (0..4).map(|j| int((i + 2 * j) % 3)).collect()).collect();
    let g = path_vbp_gadget(2, &x, &y)?;
    println!("path m=2: gadget {}, target {}", colhom_eval(&g.pattern, &g.graph)?, path_poly(2, &x, &y)?);
    Ok(())
}
