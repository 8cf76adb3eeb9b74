//! Ratio of the exact H³ kernel to the sharp rank-one envelope.

use heatlab::envelope::ostellari_envelope;
use heatlab::numeric::Axis;
use heatlab::oracle::{ln_h3, Space};

fn main() -> heatlab::Result<()> {
    let model = Space::H3.model();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for t in Axis::log(0.01, 30.0, 60).points() {
        for r in Axis::linear(0.0, 20.0, 60).points() {
            let q = (ln_h3(t, r) - ostellari_envelope(&model, t, r)?).exp();
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    println!("h3 / envelope lies in [{lo:.6}, {hi:.6}]");
    Ok(())
}
