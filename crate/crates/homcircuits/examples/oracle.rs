//! Brute-force hom and emb values and the hom-to-emb expansion.

use homcircuits::exactnum::Rational;
use homcircuits::oracle::{emb_eval, hom_count, hom_to_emb_terms, Host};
use homcircuits::pattern::make_path;

fn main() -> homcircuits::Result<()> {
    let f = make_path(3)?;
    let host = Host::from_bits(3, 3, 0b101_110_011);
    let hom = hom_count(&f, &host)?;
    let terms = hom_to_emb_terms(&f)?;
    let sum: Rational = terms.iter().map(|q| emb_eval(q, &host)).sum::<homcircuits::Result<Rational>>()?;
    println!("hom(P3) = {hom}, emb(P3) = {}", emb_eval(&f, &host)?);
    println!("Σ emb over {} quotients = {sum}", terms.len());
    Ok(())
}
