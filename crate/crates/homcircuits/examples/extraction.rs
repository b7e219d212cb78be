//! Recovering colhom_S from an oracle for hom_F, and one term of a linear
//! combination from an oracle for the whole combination.

use homcircuits::exactnum::{int, rng_from_seed};
use homcircuits::oracle::{colhom_eval, hom_count, Host};
use homcircuits::pattern::make_path;
use homcircuits::reduce::{
    random_coloured, subgraph_oracle_size, BruteForceOracle, CountingOracle, LincombExtractor, LincombOracle,
    SubgraphExtractor,
};

fn main() -> homcircuits::Result<()> {
    let mut rng = rng_from_seed(11);
    let (s, f) = (make_path(2)?, make_path(3)?);
    let k = subgraph_oracle_size(&s, 1);
    let oracle = BruteForceOracle { pattern: f.clone(), n: k, m: k };
    let counting = CountingOracle::new(&oracle);
    let ex = SubgraphExtractor::new(&f, &s, 1, &counting)?;
    let g = random_coloured(&s, 1, &mut rng);
    println!("subgraph pipeline: {} vs colhom {}", ex.eval(&g)?, colhom_eval(&s, &g)?);
    println!("oracle calls: {}", counting.calls());

    let patterns = [make_path(2)?, make_path(3)?];
    let lincomb = LincombOracle { terms: vec![(int(1), patterns[0].clone()), (int(2), patterns[1].clone())], n: 6, m: 6 };
    let ex = LincombExtractor::new(&patterns, &[int(1), int(2)], 1, 2, 3, 11, &lincomb)?;
    let h = Host::random(2, 2, &mut rng);
    println!("lincomb pipeline: {} vs hom(P3) {}", ex.eval(&h)?, hom_count(&patterns[1], &h)?);
    Ok(())
}
