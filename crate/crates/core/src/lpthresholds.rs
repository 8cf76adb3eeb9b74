//! `σ` thresholds for the heat and Poisson maximal operators on quotients,
//! finiteness verdicts for the Weyl-chamber integrals behind them, the decay
//! rate of `‖Δe^{−tΔ}‖`, and the Riesz kernel decay on `H³`.
//!
//! `η_Γ` enters only through `‖η_Γ‖ = √(‖ρ‖² − λ₀)`, supplied by the caller.

use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::numeric::logspace::{coth_minus_inv, ln_r_over_sinh};
use crate::numeric::Integrator;
use crate::oracle::{ln_h3, Space};
use crate::rootspace::{s_p, SpaceModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInput {
    pub p: f64,
    pub rho_norm: f64,
    pub eta_norm: f64,
    pub sigma: f64,
}

impl ThresholdInput {
    pub fn new(p: f64, rho_norm: f64, eta_norm: f64, sigma: f64) -> Self {
        Self {
            p,
            rho_norm,
            eta_norm,
            sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        s_p(self.p)?;
        if !(self.rho_norm > 0.0) {
            return Err(domain("rho_norm", self.rho_norm, "must be positive"));
        }
        if !(self.eta_norm >= 0.0 && self.eta_norm < self.rho_norm) {
            return Err(domain("eta_norm", self.eta_norm, "need 0 <= |eta| < |rho|"));
        }
        Ok(())
    }
}

/// `s(p)(‖ρ‖−‖η‖)(2‖ρ‖ − s(p)(‖ρ‖−‖η‖))`.
pub fn sigma_threshold_heat(inp: &ThresholdInput) -> Result<f64> {
    inp.validate()?;
    let gap = s_p(inp.p)? * (inp.rho_norm - inp.eta_norm);
    Ok(gap * (2.0 * inp.rho_norm - gap))
}

/// Square root of the heat threshold.
pub fn sigma_threshold_poisson(inp: &ThresholdInput) -> Result<f64> {
    Ok(sigma_threshold_heat(inp)?.sqrt())
}

/// Exponential rate `(1+ε−s)‖ρ‖ + s‖η‖ − (1−ε)√(‖ρ‖²−σ/(1−ε))` of the
/// chamber integrand for the maximal operator; `+∞` when the square root
/// is undefined (the kernel bound gives no decay at all).
pub fn maximal_integrand_rate(inp: &ThresholdInput, epsilon: f64) -> Result<f64> {
    inp.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain("epsilon", epsilon, "must lie in (0, 1)"));
    }
    let s = s_p(inp.p)?;
    let arg = inp.rho_norm.powi(2) - inp.sigma / (1.0 - epsilon);
    if arg < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((1.0 + epsilon - s) * inp.rho_norm + s * inp.eta_norm - (1.0 - epsilon) * arg.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Finite,
    Divergent,
    Inconclusive,
}

/// `(1+r)^a e^{rate·r}`, the rank-one reduction of a chamber integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrandRates {
    pub poly_exp: f64,
    pub linear_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralVerdict {
    pub verdict: Verdict,
    /// Log-slope of the integrand over the last unit before `R_max`.
    pub effective_rate: f64,
    /// `(R, ln ∫₀^R)` at the cutoffs `R_max·2^{−k}`, ascending.
    pub partial_values: Vec<(f64, f64)>,
}

/// Default classification margin for frontier log-slopes.
pub const DEFAULT_MARGIN: f64 = 0.01;

fn ln_integrand(rates: &IntegrandRates, r: f64) -> f64 {
    rates.poly_exp * r.ln_1p() + rates.linear_rate * r
}

/// `ln ∫₀^R (1+r)^a e^{λr} dr`, integrated after dividing by the
/// integrand's maximum on `[0, R]`.
fn ln_partial_integral(rates: &IntegrandRates, upper: f64) -> Result<f64> {
    let mut peak = ln_integrand(rates, 0.0).max(ln_integrand(rates, upper));
    if rates.linear_rate != 0.0 {
        let stationary = -rates.poly_exp / rates.linear_rate - 1.0;
        if stationary > 0.0 && stationary < upper {
            peak = peak.max(ln_integrand(rates, stationary));
        }
    }
    let q = Integrator::with_rel_tol(1e-10).integrate(|r| (ln_integrand(rates, r) - peak).exp(), 0.0, upper)?;
    Ok(peak + q.value.ln())
}

/// Rank-one chamber integral `∫₀^∞ (1+r)^a e^{λr} dr`, classified by the
/// measured log-slope of the integrand at `r_max` against `margin`.
pub fn chamber_integral_verdict(
    model: &SpaceModel,
    rates: IntegrandRates,
    r_max: f64,
    n_cutoffs: usize,
    margin: f64,
) -> Result<IntegralVerdict> {
    if model.rank != 1 {
        return Err(Error::RootSystem("chamber integral reduction needs rank one".into()));
    }
    if !(r_max > 1.0) || n_cutoffs == 0 {
        return Err(domain("r_max", r_max, "need r_max > 1 and at least one cutoff"));
    }
    if !rates.linear_rate.is_finite() {
        return Ok(IntegralVerdict {
            verdict: Verdict::Divergent,
            effective_rate: rates.linear_rate,
            partial_values: Vec::new(),
        });
    }
    let mut partial_values = Vec::with_capacity(n_cutoffs);
    for k in (0..n_cutoffs).rev() {
        let upper = r_max / 2f64.powi(k as i32);
        partial_values.push((upper, ln_partial_integral(&rates, upper)?));
    }
    let effective_rate = ln_integrand(&rates, r_max) - ln_integrand(&rates, r_max - 1.0);
    let verdict = if effective_rate < -margin {
        Verdict::Finite
    } else if effective_rate > margin {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    };
    Ok(IntegralVerdict {
        verdict,
        effective_rate,
        partial_values,
    })
}

/// `ε` values scanned when a rate must be made negative "for ε small enough".
pub fn default_epsilon_scan() -> Vec<f64> {
    let mut v = vec![1e-4, 1e-3, 5e-3];
    v.extend((1..=10).map(|k| 0.01 * k as f64));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanVerdict {
    pub verdict: Verdict,
    pub per_epsilon: Vec<(f64, IntegralVerdict)>,
}

/// Runs the maximal-operator integral for each `ε`. The integral is
/// certified finite as soon as one `ε` gives a finite verdict, and
/// divergent only when every scanned `ε` does.
pub fn maximal_operator_scan(
    model: &SpaceModel,
    inp: &ThresholdInput,
    poly_exp: f64,
    scan: &[f64],
    r_max: f64,
    margin: f64,
) -> Result<ScanVerdict> {
    let mut per_epsilon = Vec::with_capacity(scan.len());
    for &eps in scan {
        let rates = IntegrandRates {
            poly_exp,
            linear_rate: maximal_integrand_rate(inp, eps)?,
        };
        per_epsilon.push((eps, chamber_integral_verdict(model, rates, r_max, 8, margin)?));
    }
    let any_finite = per_epsilon.iter().any(|(_, v)| v.verdict == Verdict::Finite);
    let all_divergent = per_epsilon.iter().all(|(_, v)| v.verdict == Verdict::Divergent);
    let verdict = if any_finite {
        Verdict::Finite
    } else if all_divergent && !per_epsilon.is_empty() {
        Verdict::Divergent
    } else {
        Verdict::Inconclusive
    };
    Ok(ScanVerdict { verdict, per_epsilon })
}

/// `(1−s(p)+ε)‖ρ‖ − (1−ε)√(‖ρ‖²−ε) + s(p)‖η‖`; a negative value gives
/// `‖Δe^{−tΔ}‖_{p→p} ≤ ce^{−εt}` for `t ≥ 1`.
pub fn st_norm_rate(model: &SpaceModel, eta_norm: f64, p: f64, epsilon: f64) -> Result<f64> {
    let rho = model.rho_norm;
    if !(epsilon >= 0.0 && epsilon < rho * rho) {
        return Err(domain("epsilon", epsilon, "need 0 <= epsilon < |rho|^2"));
    }
    if !(eta_norm >= 0.0 && eta_norm < rho) {
        return Err(domain("eta_norm", eta_norm, "need 0 <= |eta| < |rho|"));
    }
    let s = s_p(p)?;
    Ok((1.0 - s + epsilon) * rho - (1.0 - epsilon) * (rho * rho - epsilon).sqrt() + s * eta_norm)
}

/// Geometric `ε` grid from `1e-8` to `0.1`.
pub fn st_norm_scan() -> Vec<f64> {
    (0..=70).map(|k| 1e-8 * 10f64.powf(k as f64 / 10.0)).collect()
}

/// Largest scanned `ε > 0` with a negative rate, if any.
pub fn st_norm_certificate(model: &SpaceModel, eta_norm: f64, p: f64, scan: &[f64]) -> Result<Option<f64>> {
    let mut best = None;
    for &eps in scan {
        if eps <= 0.0 || eps >= model.rho_norm.powi(2) {
            continue;
        }
        if st_norm_rate(model, eta_norm, p, eps)? < 0.0 {
            best = Some(eps);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszDecay {
    /// `∫ |∂_r h_t(r)|/√t dt` over `[t_small, t_large]`.
    pub value: f64,
    /// Part over `t < t_cut`.
    pub near: f64,
    /// Part over `t ≥ t_cut`.
    pub far: f64,
    /// The same integral without splitting.
    pub unsplit: f64,
    /// Certified bounds for `[0, t_small]` and `[t_large, ∞)`.
    pub small_tail: f64,
    pub large_tail: f64,
    /// `ln e^{−(1−ε)(⟨ρ,H⟩+‖ρ‖r)}`.
    pub ln_bound: f64,
}

impl RieszDecay {
    pub fn upper(&self) -> f64 {
        self.value + self.small_tail + self.large_tail
    }
}

/// `|∂_r h_t(r)|/√t` on `H³`.
fn riesz_integrand(t: f64, r: f64) -> f64 {
    let slope = r / (2.0 * t) + coth_minus_inv(r);
    (ln_h3(t, r) - 0.5 * t.ln()).exp() * slope
}

/// Riesz kernel `∫₀^∞ |∂_r h_t(r)|/√t dt` on `H³`, split at `t_cut`.
///
/// On `[0, t₀]` with `t₀ ≤ r²/16` the integrand is increasing, so it is
/// bounded by `t₀` times its value at `t₀`. For `t ≥ T` it is at most
/// `(4π)^{−3/2}(r/sinh r)(1 + r/(2T))t^{−2}e^{−t}`, whose integral is at most
/// that prefactor times `T^{−2}e^{−T}`.
pub fn riesz_kernel_decay(space: Space, r: f64, epsilon: f64, t_cut: f64) -> Result<RieszDecay> {
    if space != Space::H3 {
        return Err(domain("space", space.dimension() as f64, "Riesz decay is computed on H3"));
    }
    if !(r > 0.0) {
        return Err(domain("r", r, "need r > 0"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain("epsilon", epsilon, "must lie in (0, 1)"));
    }
    let t_small = (1e-3f64).min(r * r / 16.0);
    let t_large = 2.0 * r + 60.0;
    if !(t_cut > t_small && t_cut < t_large) {
        return Err(domain("t_cut", t_cut, "split point must lie inside the integration range"));
    }
    let q = Integrator::with_rel_tol(1e-13);
    let f = |t: f64| riesz_integrand(t, r);
    // Break at the peak t ≈ r/2 so the adaptive rule sees it.
    let peak = (0.5 * r).clamp(t_small, t_large);
    let integrate = |a: f64, b: f64| -> Result<f64> {
        if peak > a && peak < b {
            Ok(q.integrate(f, a, peak)?.value + q.integrate(f, peak, b)?.value)
        } else {
            Ok(q.integrate(f, a, b)?.value)
        }
    };
    let near = integrate(t_small, t_cut)?;
    let far = integrate(t_cut, t_large)?;
    let unsplit = integrate(t_small, t_large)?;
    let small_tail = t_small * f(t_small);
    let prefactor = (4.0 * std::f64::consts::PI).powf(-1.5)
        * ln_r_over_sinh(r).exp()
        * (1.0 + r / (2.0 * t_large));
    let large_tail = prefactor * t_large.powi(-2) * (-t_large).exp();
    let model = space.model();
    let ln_bound = -(1.0 - epsilon) * (model.rho_norm * r + model.rho_norm * r);
    Ok(RieszDecay {
        value: near + far,
        near,
        far,
        unsplit,
        small_tail,
        large_tail,
        ln_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelBranch {
    /// `t ≥ 1`.
    Infty,
    /// `t ≤ 1`, away from the origin.
    ZeroInfty,
}

/// `ln[e^{−(1−ε)⟨ρ,H⟩}e^{−(1−ε)r√(‖ρ‖²−σ/(1−ε))}]`, with `ε` replaced by
/// `2ε` on the small-time branch.
pub fn maximal_kernel_bound(
    model: &SpaceModel,
    sigma: f64,
    epsilon: f64,
    r: f64,
    branch: KernelBranch,
) -> Result<f64> {
    let e = match branch {
        KernelBranch::Infty => epsilon,
        KernelBranch::ZeroInfty => 2.0 * epsilon,
    };
    if !(e > 0.0 && e < 1.0) {
        return Err(domain("epsilon", epsilon, "effective epsilon must lie in (0, 1)"));
    }
    let arg = model.rho_norm.powi(2) - sigma / (1.0 - e);
    if arg < 0.0 {
        return Err(domain("sigma", sigma, "need sigma < (1 - epsilon)|rho|^2"));
    }
    Ok(-(1.0 - e) * model.rho_norm * r - (1.0 - e) * r * arg.sqrt())
}

/// `ln sup_{t ∈ ts} e^{σt}·t^i·|∂ᵢ_t h_t(r)|` on `H³`.
pub fn ln_maximal_kernel_h3(sigma: f64, i: usize, r: f64, ts: &[f64]) -> Result<f64> {
    let mut terms = Vec::with_capacity(ts.len());
    for &t in ts {
        let k = crate::oracle::h3_kernel(t, r, i)?;
        if !k.log.is_zero() {
            terms.push(sigma * t + i as f64 * t.ln() + k.log.ln_abs);
        }
    }
    Ok(terms.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Row of the exported threshold table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub p: f64,
    pub s_p: f64,
    pub eta_norm: f64,
    pub heat: f64,
    pub poisson: f64,
}

pub fn threshold_table(rho_norm: f64, ps: &[f64], etas: &[f64]) -> Result<Vec<ThresholdRow>> {
    let mut rows = Vec::new();
    for &p in ps {
        for &eta in etas {
            let inp = ThresholdInput::new(p, rho_norm, eta, 0.0);
            rows.push(ThresholdRow {
                p,
                s_p: s_p(p)?,
                eta_norm: eta,
                heat: sigma_threshold_heat(&inp)?,
                poisson: sigma_threshold_poisson(&inp)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_threshold_table(path: &Path, rows: &[ThresholdRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["p", "s_p", "eta_norm", "sigma_threshold_heat", "sigma_threshold_poisson"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([r.p, r.s_p, r.eta_norm, r.heat, r.poisson].map(|x| format!("{x:.16e}")))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `∫₀^R` at the `k`-th cutoff.
pub fn partial_value(v: &IntegralVerdict, k: usize) -> f64 {
    v.partial_values[k].1.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootspace::build_real_hyperbolic;

    fn unit_rho() -> SpaceModel {
        build_real_hyperbolic(3).unwrap()
    }

    #[test]
    fn heat_threshold_at_p2() {
        let t = sigma_threshold_heat(&ThresholdInput::new(2.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(t, 1.0);
        let p: f64 = 3.0;
        let s = s_p(p).unwrap();
        let t = sigma_threshold_heat(&ThresholdInput::new(p, 1.0, 0.0, 0.0)).unwrap();
        assert!((t - s * (2.0 - s)).abs() < 1e-15);
        let near = sigma_threshold_heat(&ThresholdInput::new(2.0, 1.0, 1.0 - 1e-12, 0.0)).unwrap();
        assert!(near < 1e-11);
        assert!(sigma_threshold_heat(&ThresholdInput::new(2.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn poisson_threshold_at_p2() {
        let inp = ThresholdInput::new(2.0, 1.0, 0.0, 0.0);
        let p = sigma_threshold_poisson(&inp).unwrap();
        assert!((p - 2.0 / (2.0f64 * 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exponential_integral_is_finite() {
        let m = unit_rho();
        let v = chamber_integral_verdict(
            &m,
            IntegrandRates {
                poly_exp: 0.0,
                linear_rate: -1.0,
            },
            60.0,
            4,
            DEFAULT_MARGIN,
        )
        .unwrap();
        assert_eq!(v.verdict, Verdict::Finite);
        assert!((partial_value(&v, 3) - 1.0).abs() < 1e-10);
        assert!((v.effective_rate + 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximal_scan_at_p2() {
        let m = unit_rho();
        let thr = sigma_threshold_heat(&ThresholdInput::new(2.0, 1.0, 0.0, 0.0)).unwrap();
        let below = ThresholdInput::new(2.0, 1.0, 0.0, 0.9 * thr);
        let v = maximal_integrand_rate(&below, 0.01).unwrap();
        assert!(v < 0.0);
        let scan = default_epsilon_scan();
        let f = maximal_operator_scan(&m, &below, m.a_exp, &scan, 4000.0, DEFAULT_MARGIN).unwrap();
        assert_eq!(f.verdict, Verdict::Finite);
        let above = ThresholdInput { sigma: 1.1 * thr, ..below };
        let d = maximal_operator_scan(&m, &above, m.a_exp, &scan, 4000.0, DEFAULT_MARGIN).unwrap();
        assert_eq!(d.verdict, Verdict::Divergent);
    }

    #[test]
    fn st_norm_rate_at_zero_epsilon() {
        let m = unit_rho();
        let r = st_norm_rate(&m, 0.4, 4.0, 0.0).unwrap();
        assert!((r - 0.5 * (0.4 - 1.0)).abs() < 1e-15);
        assert!(st_norm_rate(&m, 0.4, 4.0, 1.0).is_err());
        let c = st_norm_certificate(&m, 0.4, 4.0, &st_norm_scan()).unwrap();
        assert!(c.is_some());
    }

    #[test]
    fn st_norm_window_shrinks() {
        let m = unit_rho();
        let scan = st_norm_scan();
        let a = st_norm_certificate(&m, 0.5, 2.0, &scan).unwrap().unwrap();
        let b = st_norm_certificate(&m, 0.99, 2.0, &scan).unwrap().unwrap();
        let c = st_norm_certificate(&m, 0.9999, 2.0, &scan).unwrap().unwrap();
        assert!(a > b && b > c);
    }

    #[test]
    fn riesz_split_recombines() {
        let d = riesz_kernel_decay(Space::H3, 3.0, 0.1, 1.0).unwrap();
        assert!((d.near + d.far - d.unsplit).abs() <= 1e-10 * d.unsplit);
        assert!(d.small_tail < 1e-10 * d.value);
        assert!(d.large_tail < 1e-10 * d.value);
        assert!(riesz_kernel_decay(Space::H2, 3.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn maximal_kernel_bound_shapes() {
        let m = unit_rho();
        let b = maximal_kernel_bound(&m, 0.0, 1e-12, 2.0, KernelBranch::Infty).unwrap();
        assert!((b + 4.0).abs() < 1e-10);
        let lo = maximal_kernel_bound(&m, 0.2, 0.1, 2.0, KernelBranch::Infty).unwrap();
        let hi = maximal_kernel_bound(&m, 0.4, 0.1, 2.0, KernelBranch::Infty).unwrap();
        assert!(hi > lo);
        assert!(maximal_kernel_bound(&m, 0.95, 0.1, 2.0, KernelBranch::Infty).is_err());
    }

    #[test]
    fn maximal_kernel_dominated_on_h3() {
        let m = unit_rho();
        let ts: Vec<f64> = (0..400).map(|k| 1.0 + 0.25 * k as f64).collect();
        let (sigma, eps) = (0.5, 0.2);
        let mut ratios = Vec::new();
        for k in 0..30 {
            let r = 0.5 * k as f64;
            let v = ln_maximal_kernel_h3(sigma, 1, r, &ts).unwrap();
            ratios.push(v - maximal_kernel_bound(&m, sigma, eps, r, KernelBranch::Infty).unwrap());
        }
        let c = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(c.is_finite() && c < 10.0);
        // The ratio decays at large r: the bound is not sharp in the rate.
        assert!(ratios[29] < ratios[10]);
    }

    #[test]
    fn threshold_csv() {
        let rows = threshold_table(1.0, &[1.5, 2.0], &[0.0, 0.3]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_threshold_table(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("p,s_p,eta_norm,sigma_threshold_heat,sigma_threshold_poisson"));
    }
}
