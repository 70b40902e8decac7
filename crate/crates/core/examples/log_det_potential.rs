//! The log-determinant potential behind the trial bound.
//!
//! Each pull multiplies `det(Phi + lambda I)` by `1 + phi^T (Phi + lambda I)^{-1} phi`,
//! while the AM-GM inequality caps the determinant at `(lambda + t/d)^d`.
//! Wide rounds therefore cannot go on forever.

use misspec_bandit::rng::{stream, unit_vector};
use misspec_bandit::FixedRidge;

fn main() -> misspec_bandit::Result<()> {
    let (dim, lambda) = (8, 0.01);
    let mut ridge = FixedRidge::new(dim, lambda)?;
    let mut rng = stream(42, 0, 0, 0);
    println!("{:>4} {:>10} {:>12} {:>12}", "t", "leverage", "log det", "AM-GM cap");
    for t in 1..=64 {
        let phi = unit_vector(&mut rng, dim);
        let lev = ridge.leverage(&phi);
        ridge.push(&phi)?;
        if t <= 10 || t % 8 == 0 {
            let cap = dim as f64 * (lambda + t as f64 / dim as f64).ln();
            println!("{t:>4} {lev:>10.4} {:>12.4} {cap:>12.4}", ridge.log_det());
        }
    }
    Ok(())
}
