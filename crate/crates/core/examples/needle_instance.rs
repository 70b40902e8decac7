//! Hard instances: one rewarding action hidden among near-orthogonal features.
//!
//! Run with `cargo run --example needle_instance`.

use misspec_bandit::verify::needle_feature_report;
use misspec_bandit::{gen_needle_instance, required_dim};

fn main() -> misspec_bandit::Result<()> {
    let (n, eps) = (256, 0.49);
    let dim = required_dim(n, eps).ceil() as usize;
    println!("n_actions={n} epsilon={eps}: guaranteed dimension {dim}");

    let inst = gen_needle_instance(n, 17, dim, eps, 7, 1000)?;
    let (norm_dev, max_ip, cert) = needle_feature_report(&inst);
    println!("max |norm - 1|       = {norm_dev:.2e}");
    println!("max |<phi_x, phi_y>| = {max_ip:.4}");
    println!("certificate error    = {cert:.4} (declared {eps})");

    // Far below the guaranteed dimension the rejection sampler gives up.
    match gen_needle_instance(n, 17, 8, eps, 7, 50) {
        Ok(_) => println!("dim 8 happened to work"),
        Err(e) => println!("dim 8: {e}"),
    }
    Ok(())
}
