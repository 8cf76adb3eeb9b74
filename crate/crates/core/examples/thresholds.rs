//! σ thresholds for the maximal operators, the chamber-integral verdicts
//! around them, and the decay rate of ‖Δe^{−tΔ}‖.

use heatlab::lpthresholds::{
    default_epsilon_scan, maximal_operator_scan, sigma_threshold_heat, st_norm_certificate, st_norm_scan,
    threshold_table, write_threshold_table, ThresholdInput, DEFAULT_MARGIN,
};
use heatlab::oracle::Space;

fn main() -> heatlab::Result<()> {
    let m = Space::H3.model();
    let rows = threshold_table(m.rho_norm, &[1.25, 1.5, 2.0, 3.0, 4.0], &[0.0, 0.3, 0.7])?;
    let path = std::env::temp_dir().join("heatlab_thresholds.csv");
    write_threshold_table(&path, &rows)?;
    println!("threshold table written to {}", path.display());
    for (p, eta) in [(1.5, 0.0), (4.0, 0.7)] {
        let thr = sigma_threshold_heat(&ThresholdInput::new(p, m.rho_norm, eta, 0.0))?;
        for f in [0.9, 1.1] {
            let inp = ThresholdInput::new(p, m.rho_norm, eta, f * thr);
            let v = maximal_operator_scan(&m, &inp, m.a_exp, &default_epsilon_scan(), 4000.0, DEFAULT_MARGIN)?;
            println!("p = {p}, |eta| = {eta}, sigma = {f} x {thr:.4}: {:?}", v.verdict);
        }
    }
    for eta in [0.5, 0.9, 0.99] {
        let eps = st_norm_certificate(&m, eta, 3.0, &st_norm_scan())?;
        println!("|eta| = {eta}: decay certified up to epsilon = {eps:?}");
    }
    Ok(())
}
