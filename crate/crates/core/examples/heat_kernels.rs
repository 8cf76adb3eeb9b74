//! Exact heat kernels on H² and H³, their time derivatives, and the
//! finite-difference cross-check.

use heatlab::envelope::h3_derivative_with_check;
use heatlab::oracle::{fd_time_derivative, h2_kernel, h3_kernel, radial_gradient, Space, H2Kernel};

fn main() -> heatlab::Result<()> {
    println!("{:>6} {:>6} {:>14} {:>14} {:>14}", "t", "r", "h3", "h2", "|grad h3|");
    for &(t, r) in &[(0.1, 0.0), (1.0, 1.0), (5.0, 10.0), (0.05, 20.0)] {
        let h3 = h3_kernel(t, r, 0)?;
        let h2 = h2_kernel(t, r)?;
        println!(
            "{t:>6} {r:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            h3.value,
            h2.value,
            radial_gradient(Space::H3, t, r)?
        );
    }
    for i in 1..=2 {
        let (exact, rel) = h3_derivative_with_check(i, 2.0, 3.0)?;
        println!("d^{i}/dt^{i} h3(2, 3) = {:.12e}, finite-difference disagreement {rel:?}", exact.to_f64());
    }
    let fd = fd_time_derivative(&H2Kernel, 1, 1.0, 2.0)?;
    println!("d/dt h2(1, 2) = {:.10e} +- {:.1e}", fd.value, fd.error);
    Ok(())
}
