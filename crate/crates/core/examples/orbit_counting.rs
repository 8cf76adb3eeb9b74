//! Orbit enumeration for a Schottky group, counting function, critical
//! exponent, and CSV export of the orbit distances.

use heatlab::lattice::{counting_function, critical_exponent, enumerate_orbit, CountingBound, GroupSpec, Point};

fn main() -> heatlab::Result<()> {
    let g = GroupSpec::schottky_plane(&[(-2.5, 2.5, 1.0), (-6.0, 6.0, 1.0)])?;
    let orbit = enumerate_orbit(&g, Point::j(), Point::j(), 25.0)?;
    for r in [5.0, 10.0, 15.0, 20.0, 25.0] {
        println!("N({r}) = {}", counting_function(&orbit, r)?);
    }
    let e = critical_exponent(&orbit)?;
    println!("critical exponent ~ {:.4} +- {:.4}", e.estimate, e.half_width);
    let c = CountingBound::fit(&orbit, e.upper())?;
    println!("N(R) <= {:.3} e^({:.4} R) on R <= {}", c.constant, c.delta, c.certified);
    let path = std::env::temp_dir().join("heatlab_orbit.csv");
    orbit.write_csv(&path)?;
    println!("distances written to {}", path.display());
    Ok(())
}
