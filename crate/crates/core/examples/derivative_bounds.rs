//! Two-grid fitted constants for |∂ᵢ_t h_t| and |∇h_t| on H³.

use heatlab::envelope::{gradient_rhs, theorem1_rhs, two_grid_fit, STABILITY_LIMIT};
use heatlab::numeric::{Axis, Grid2};
use heatlab::oracle::{h3_kernel, radial_derivative_log, Space};
use heatlab::rootspace::ChamberPoint;

fn main() -> heatlab::Result<()> {
    let m = Space::H3.model();
    let eps = 0.1;
    let grid = Grid2::new(Axis::log(0.05, 20.0, 30), Axis::linear(0.0, 20.0, 30));
    for i in 1..=2 {
        let fit = two_grid_fit(
            |t, r| theorem1_rhs(&m, i, t, ChamberPoint::radial(&m, r), eps),
            |t, r| Ok(h3_kernel(t, r, i)?.log),
            &grid,
            4,
        )?;
        println!(
            "i = {i}: c = {:.4e}, refined/coarse = {:.5} (limit {STABILITY_LIMIT})",
            fit.coarse.constant(),
            fit.stability()
        );
    }
    let fit = two_grid_fit(
        |t, r| gradient_rhs(&m, t, ChamberPoint::radial(&m, r), eps),
        |t, r| Ok(radial_derivative_log(Space::H3, t, r)?.abs()),
        &grid,
        4,
    )?;
    println!("gradient: c = {:.4e}, refined/coarse = {:.5}", fit.coarse.constant(), fit.stability());
    Ok(())
}
