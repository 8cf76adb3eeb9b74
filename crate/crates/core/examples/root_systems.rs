//! Space data from a root system, chamber minima of ⟨ρ, H⟩, and the
//! admissible exponent triples for quotient bounds.

use heatlab::config::ConfigFile;
use heatlab::rootspace::{admissible_alpha_triple, build_from_roots, build_real_hyperbolic, AlphaTriple, RootSystemSpec};

fn main() -> heatlab::Result<()> {
    // SL(3, R)/SO(3): positive roots e1-e2, e2-e3, e1-e3 of A2, written in
    // an orthonormal basis of the plane x1 + x2 + x3 = 0.
    let (a, b) = (2f64.sqrt(), 1.5f64.sqrt());
    let text = format!(
        "[roots]\nrank = 2\nroot = {a},0;1;0\nroot = {},{b};1;0\nroot = {},{b};1;0\n",
        -a / 2.0,
        a / 2.0
    );
    let cfg = ConfigFile::parse(&text)?;
    let spec = RootSystemSpec::from_section(cfg.section("roots").expect("section present"))?;
    let m = build_from_roots(&spec)?;
    println!("rank {} dimension {} |rho| = {:.6} rho_m = {:.6}", m.rank, m.dimension, m.rho_norm, m.rho_m);
    for n in [2, 3, 5] {
        let h = build_real_hyperbolic(n)?;
        println!("H^{n}: |rho| = {} m = {} A = {}", h.rho_norm, h.m_exp, h.a_exp);
    }
    let h3 = build_real_hyperbolic(3)?;
    for t in [AlphaTriple::new(0.0, 1.0, 0.0), AlphaTriple::new(0.5, 1.2, 0.5), AlphaTriple::new(0.1, 1.9, 0.1)] {
        println!("{t:?} admissible for delta = 0.3: {}", admissible_alpha_triple(&t, 0.3, &h3));
    }
    Ok(())
}
