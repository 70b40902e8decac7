//! Confidence-set widths after a few noiseless observations.
//!
//! The relaxed width has a closed form through the regularized Gram matrix;
//! the exact width solves the two-constraint program. The relaxed one always
//! dominates.

use misspec_bandit::geometry::WIDTH_TOL;
use misspec_bandit::ConfidenceState;

fn main() -> misspec_bandit::Result<()> {
    let eps = 0.05;
    let theta = [0.6, -0.3];
    let mut state = ConfidenceState::new(2, eps)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let queries = [[1.0, 0.0], [0.0, 1.0], [h, h], [h, -h]];

    println!("{:>3} {:>16} {:>10} {:>10}", "t", "phi", "relaxed", "exact");
    for (t, phi) in [[1.0, 0.0], [0.0, 1.0], [0.6, 0.8]].iter().enumerate() {
        for q in &queries {
            let r = state.exact_width(q, WIDTH_TOL)?;
            println!(
                "{t:>3} {:>16} {:>10.5} {:>10.5}",
                format!("{q:?}"),
                r.relaxed,
                r.exact.unwrap_or(f64::NAN)
            );
        }
        // Observation carries the largest misspecification allowed.
        let y = phi[0] * theta[0] + phi[1] * theta[1] + eps;
        state = state.update(phi, y)?;
    }
    println!(
        "log det Psi after {} rounds: {:.4}",
        state.t(),
        state.log_det_psi().unwrap_or(f64::NAN)
    );
    Ok(())
}
