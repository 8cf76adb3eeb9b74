//! Rates of the derivative bounds produced by the induction.

use heatlab::envelope::{epsilon_for_lambda, gamma_limit, recurrence_grid, EnvelopeBound};
use heatlab::oracle::Space;

fn main() -> heatlab::Result<()> {
    let lambda = 0.5;
    let eps = epsilon_for_lambda(lambda);
    let g = recurrence_grid(eps, 4, 200)?;
    for l in [1, 10, 50, 200] {
        let row: Vec<String> = (0..=4)
            .map(|i| format!("{:.4}/{:.4}", g.beta[l][i], g.gamma[l][i]))
            .collect();
        println!("l = {l:>3}  beta/gamma: {}", row.join("  "));
    }
    let limits: Vec<String> = (0..=4).map(|i| format!("{:.6}", gamma_limit(eps, i))).collect();
    println!("gamma limits: {}", limits.join("  "));
    let b = EnvelopeBound::lemma_step(&Space::H3.model(), &g, 200, 2);
    println!("envelope for the second derivative at l = 200: {b:?}");
    Ok(())
}
