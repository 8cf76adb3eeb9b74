//! Constant-free derivative bounds from an on-diagonal upper bound.

use heatlab::envelope::Diagonal;
use heatlab::oracle::h3_kernel;

fn main() -> heatlab::Result<()> {
    let d = Diagonal::H3Exact;
    for t in [0.1, 1.0, 10.0] {
        for i in 1..=2 {
            let lhs = h3_kernel(t, 0.0, i)?.value.abs();
            println!("t = {t:>4}, i = {i}: |d^i h| = {lhs:.4e} <= {:.4e}", d.bound(i, t)?);
        }
        for k in 1..=4 {
            println!(
                "    f_{k} = {:.4e}  stated lower {:.4e}  certified lower {:.4e}",
                d.f_k(k, t)?,
                d.stated_lower(k, t),
                d.certified_lower(k, t)
            );
        }
    }
    Ok(())
}
