//! Rigidifying random symmetric circuits with duplicated gate families.

use homcircuits::circuit::CircuitShape;
use homcircuits::exactnum::{rng_from_seed, Assignment};
use homcircuits::symmetry::{is_rigid, random_symmetric_circuit, rigidify};

fn main() -> homcircuits::Result<()> {
    let mut rng = rng_from_seed(3);
    let mut shown = 0;
    while shown < 5 {
        let Some(c) = random_symmetric_circuit(&mut rng, 3, 3, CircuitShape::General, 5, 40) else { continue };
        if is_rigid(&c)? {
            continue;
        }
        let r = rigidify(&c, 3, 3)?;
        let a = Assignment::random(&c.variables(), &mut rng);
        println!(
            "size {} -> {}, rigid {}, same value {}",
            c.size(),
            r.size(),
            is_rigid(&r)?,
            c.evaluate(&a)? == r.evaluate(&a)?
        );
        shown += 1;
    }
    Ok(())
}
