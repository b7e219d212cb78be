//! Running an acceptance criterion and an identity suite programmatically.

use homcircuits::cli::suite::{run_criterion, run_identity, SuiteConfig};

fn main() -> homcircuits::Result<()> {
    let cfg = SuiteConfig::default();
    println!("{}", run_identity("quotient", &cfg)?.line());
    println!("{}", run_criterion(10, &cfg).line());
    Ok(())
}
