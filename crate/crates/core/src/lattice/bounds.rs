//! Right-hand sides of the quotient-space estimates, as natural logarithms.
//! The Poincaré factor is left to the caller.

use crate::error::{domain, Error, Result};
use crate::rootspace::{admissible_alpha_triple, AlphaTriple, SpaceModel};

/// `α₁‖ρ‖²t + (ρ_m − α₂)d + α₃d²/(4t)`, nonnegative for admissible triples.
pub fn quadratic_margin(model: &SpaceModel, triple: &AlphaTriple, t: f64, d: f64) -> f64 {
    triple.a1 * model.rho_norm.powi(2) * t + (model.rho_m - triple.a2) * d + triple.a3 * d * d / (4.0 * t)
}

/// `ln[t^{−n/2−i} e^{−(1−ε)[(1−α₁)‖ρ‖²t + (α₂−δ)d + (1−α₃)d²/(4t)]}]`.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_rhs(
    model: &SpaceModel,
    delta: f64,
    triple: &AlphaTriple,
    i: usize,
    t: f64,
    d_m: f64,
    epsilon: f64,
) -> Result<f64> {
    if !(t > 0.0) || !(d_m >= 0.0) {
        return Err(domain("t", t, "need t > 0 and d_M >= 0"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain("epsilon", epsilon, "must lie in (0, 1)"));
    }
    if !admissible_alpha_triple(triple, delta, model) {
        return Err(Error::Domain {
            name: "alpha",
            value: triple.a2,
            reason: "triple is not admissible for this space and exponent",
        });
    }
    let n = model.dimension as f64;
    let rate = (1.0 - triple.a1) * model.rho_norm.powi(2) * t
        + (triple.a2 - delta) * d_m
        + (1.0 - triple.a3) * d_m * d_m / (4.0 * t);
    Ok(-(0.5 * n + i as f64) * t.ln() - (1.0 - epsilon) * rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeberRegime {
    /// `δ < ρ_m`, parameter `s ∈ (δ, ρ_m)`.
    One,
    /// `ρ_m ≤ δ ≤ ρ_m + ‖ρ‖`, parameter `ε > 0`.
    Two,
}

/// Logarithm of the two-regime quotient heat-kernel bound without the
/// Poincaré factor.
pub fn weber_rhs(
    regime: WeberRegime,
    model: &SpaceModel,
    delta: f64,
    s_or_eps: f64,
    t: f64,
    d_m: f64,
) -> Result<f64> {
    if !(t > 0.0) || !(d_m >= 0.0) {
        return Err(domain("t", t, "need t > 0 and d_M >= 0"));
    }
    let n = model.dimension as f64;
    let rho2 = model.rho_norm.powi(2);
    match regime {
        WeberRegime::One => {
            if !(delta < model.rho_m) {
                return Err(domain("delta", delta, "regime 1 needs delta < rho_m"));
            }
            if !(s_or_eps > delta && s_or_eps < model.rho_m) {
                return Err(domain("s", s_or_eps, "regime 1 needs s in (delta, rho_m)"));
            }
            Ok(-0.5 * n * t.ln() + model.m_exp * t.ln_1p() - rho2 * t - d_m * d_m / (4.0 * t))
        }
        WeberRegime::Two => {
            if !(delta >= model.rho_m && delta <= model.rho_m + model.rho_norm) {
                return Err(domain("delta", delta, "regime 2 needs rho_m <= delta <= rho_m + |rho|"));
            }
            if !(s_or_eps > 0.0) {
                return Err(domain("epsilon", s_or_eps, "regime 2 needs epsilon > 0"));
            }
            let shift = delta - model.rho_m + s_or_eps;
            Ok(-0.5 * n * t.ln() - (rho2 - shift * shift) * t)
        }
    }
}
