//! Heat kernel of H³/⟨γ⟩ as an orbit sum with a certified tail, against the
//! quotient bound weighted by the Poincaré series.

use heatlab::lattice::{critical_exponent, enumerate_orbit, poincare_series, theorem2_rhs, CountingBound, GroupSpec, Point};
use heatlab::oracle::{quotient_kernel, Space};
use heatlab::rootspace::AlphaTriple;

fn main() -> heatlab::Result<()> {
    let m = Space::H3.model();
    let g = GroupSpec::cyclic_translation(3, 2.0)?;
    let delta = critical_exponent(&enumerate_orbit(&g, Point::j(), Point::j(), 60.0)?)?.upper();
    let eps = 0.1;
    let triple = AlphaTriple::new(0.5, m.rho_m + 0.2, 0.5);
    for d in [0.0f64, 1.0, 4.0] {
        let y = Point::plane(d.tanh(), 1.0 / d.cosh());
        let orbit = enumerate_orbit(&g, Point::j(), y, 40.0)?;
        let counting = CountingBound::fit(&orbit, delta)?;
        let p = poincare_series(&orbit, eps + delta, delta)?;
        for t in [0.5, 2.0] {
            let k = quotient_kernel(&orbit, &counting, Space::H3, t, 0, 40.0)?;
            let bound = (theorem2_rhs(&m, delta, &triple, 0, t, orbit.min_distance(), eps)? + p.upper().ln()).exp();
            println!(
                "d_M = {d}, t = {t}: h^M = {:.6e} (+{:.1e} tail, {} terms), bound/c = {bound:.6e}",
                k.value, k.truncation_bound, k.terms_used
            );
        }
    }
    Ok(())
}
