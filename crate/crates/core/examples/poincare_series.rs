//! Certified brackets for the Poincaré series of a cyclic group.

use heatlab::lattice::{critical_exponent, enumerate_orbit, poincare_series, GroupSpec, Point};

fn main() -> heatlab::Result<()> {
    let g = GroupSpec::cyclic_translation(3, 2.0)?;
    let x = Point::j();
    let delta = critical_exponent(&enumerate_orbit(&g, x, x, 60.0)?)?.upper();
    let exact = 1.0 / 1f64.tanh();
    for r in [10.0, 20.0, 40.0] {
        let p = poincare_series(&enumerate_orbit(&g, x, x, r)?, 1.0, delta)?;
        println!(
            "R = {r:>4}: [{:.12}, {:.12}] contains coth(1) = {exact:.12}: {}",
            p.partial_sum,
            p.upper(),
            p.contains(exact)
        );
    }
    Ok(())
}
