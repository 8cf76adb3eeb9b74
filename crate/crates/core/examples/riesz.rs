//! Riesz kernel ∫ |∂_r h_t|/√t dt on H³ and its exponential decay.

use heatlab::lpthresholds::riesz_kernel_decay;
use heatlab::oracle::Space;

fn main() -> heatlab::Result<()> {
    let mut prev: Option<(f64, f64)> = None;
    for r in [0.5, 1.0, 2.0, 4.0, 8.0, 15.0] {
        let d = riesz_kernel_decay(Space::H3, r, 0.1, 1.0)?;
        let slope = prev.map(|(r0, v0)| (d.value.ln() - v0.ln()) / (r - r0));
        println!(
            "r = {r:>4}: k = {:.6e} (near {:.3e}, far {:.3e}), bound e^{:.2}, slope {slope:?}",
            d.value, d.near, d.far, d.ln_bound
        );
        prev = Some((r, d.value));
    }
    Ok(())
}
