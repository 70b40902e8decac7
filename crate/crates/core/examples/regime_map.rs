//! Text rendering of the lower/upper-bound regimes over (epsilon, dim).
//!
//! `L` marks the uninformative regime, `U` the informative one, `.` neither.

use misspec_bandit::regime_map;

fn main() -> misspec_bandit::Result<()> {
    for n in [2usize, 1 << 10, 1 << 20] {
        let cells = regime_map(n, (1e-4, 10.0, 24), (1, 1024, 48))?;
        println!("n_actions = {n}  (rows: epsilon 10 -> 1e-4, cols: dim 1 -> 1024)");
        for row in cells.chunks(48).rev() {
            let line: String = row
                .iter()
                .map(|c| {
                    if c.lower_regime {
                        'L'
                    } else if c.upper_regime_simplified {
                        'U'
                    } else {
                        '.'
                    }
                })
                .collect();
            println!("  {:>8.1e} {line}", row[0].epsilon);
        }
        let grey = cells.iter().filter(|c| c.is_grey()).count();
        println!("  grey cells: {grey}/{}\n", cells.len());
    }
    Ok(())
}
