//! Easy instances and the minimum-misspecification oracle.
//!
//! The oracle searches the unit ball for the parameter with the smallest
//! worst-case prediction error. Warm-started at the stored witness it can only
//! improve on it; started from zero it shows how tight the witness is.

use misspec_bandit::instances::min_misspec_oracle_from;
use misspec_bandit::{certify_misspecification, gen_realizable_instance, min_misspec_oracle};

fn main() -> misspec_bandit::Result<()> {
    let inst = gen_realizable_instance(200, 6, 0.02, 3)?;
    let witness = certify_misspecification(&inst, &inst.certificate.theta)?;
    println!("declared epsilon     {:.6}", inst.epsilon);
    println!(
        "witness error        {:.6} (norm {:.4})",
        witness.achieved_error, witness.theta_norm
    );

    let warm = min_misspec_oracle(&inst, 1e-9, 20_000);
    println!("oracle (warm start)  {:.6}", warm.achieved_error);

    let cold = min_misspec_oracle_from(&inst, &vec![0.0; inst.dim], 1e-9, 20_000);
    println!("oracle (from zero)   {:.6}", cold.achieved_error);
    Ok(())
}
