//! CFI pairs: the exhaustive separation check and the flattened pair.

use homcircuits::oracle::hom_count;
use homcircuits::pattern::{make_cycle, make_path};
use homcircuits::reduce::{cfi_claim_check, cfi_pair};

fn main() -> homcircuits::Result<()> {
    for (name, s) in [("P3", make_path(3)?), ("C4", make_cycle(2)?)] {
        let pair = cfi_pair(&s)?;
        let r = cfi_claim_check(&pair, 1_000_000)?;
        println!("{name}: {} coloured graphs checked, claim holds: {}", r.checked, r.holds());
    }
    let c4 = make_cycle(2)?;
    let pair = cfi_pair(&c4)?;
    let (g0, g1) = (pair.even.flatten_bipartite()?, pair.odd.flatten_bipartite()?);
    println!("hom(C4, even) = {}, hom(C4, odd) = {}", hom_count(&c4, &g0)?, hom_count(&c4, &g1)?);
    println!("hom(P3, even) = {}, hom(P3, odd) = {}", hom_count(&make_path(3)?, &g0)?, hom_count(&make_path(3)?, &g1)?);
    Ok(())
}
