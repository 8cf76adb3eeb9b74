//! Named verification suites and the configuration that drives them.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigFile, Section};
use crate::envelope::{
    epsilon_for_lambda, gamma_limit, gradient_rhs, h3_derivative_with_check, li_yau_gap, ostellari_envelope,
    recurrence_grid, theorem1_rhs, two_grid_fit, Diagonal, TwoGridFit,
};
use crate::error::{Error, Result};
use crate::lattice::{
    critical_exponent, enumerate_orbit, poincare_series, theorem2_rhs, CountingBound, Family, GroupSpec, OrbitSet,
    Point,
};
use crate::lpthresholds::{
    default_epsilon_scan, maximal_operator_scan, riesz_kernel_decay, sigma_threshold_heat, sigma_threshold_poisson,
    st_norm_rate, st_norm_scan, ThresholdInput, Verdict,
};
use crate::numeric::{Axis, Grid2, Scale, SignedLog};
use crate::oracle::{
    fd_time_derivative_scaled, h3_kernel, heat_kernel, quotient_kernel, radial_derivative_log, Space, H2Kernel,
};
use crate::report::{Row, SuiteReport};
use crate::rootspace::{
    admissible_alpha_triple, build_from_roots, conjugate, s_p, AlphaTriple, ChamberPoint, RootSystemSpec, SpaceModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteInfo {
    pub name: &'static str,
    /// Acceptance criterion checked by the suite, if any.
    pub criterion: Option<u8>,
    pub time_limit: Duration,
    pub summary: &'static str,
}

const fn info(name: &'static str, criterion: Option<u8>, secs: u64, summary: &'static str) -> SuiteInfo {
    SuiteInfo {
        name,
        criterion,
        time_limit: Duration::from_secs(secs),
        summary,
    }
}

pub const SUITES: [SuiteInfo; 12] = [
    info("recurrence", Some(1), 5, "limits and monotonicity of the derivative-rate recurrence"),
    info("envelope", Some(2), 30, "two-sided bracket of the exact kernel by the sharp envelope"),
    info("theorem1", Some(3), 60, "time derivatives against the (1-eps) Gaussian bound, two grids"),
    info("gradient", Some(4), 60, "radial gradient against its Gaussian bound, plus Li-Yau"),
    info("grigoryan", Some(5), 60, "constant-free derivative bound from the exact H3 diagonal"),
    info("poincare", Some(6), 10, "Poincare series brackets and the critical exponent"),
    info("quotient", Some(7), 120, "quotient kernel on H3/<g> against the Poincare-weighted bound"),
    info("thresholds", Some(8), 30, "finiteness of the maximal-operator integral around the threshold"),
    info("stnorm", Some(9), 5, "Poisson/heat threshold relation and the exponential decay rate"),
    info("riesz", Some(10), 60, "Riesz kernel decay on H3"),
    info("theorem2", None, 120, "quotient bound on H3 modulo a two-generator Schottky group"),
    info("liyau", None, 60, "Li-Yau gradient inequality over a grid and several gamma"),
];

pub fn find_suite(name: &str) -> Result<&'static SuiteInfo> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub space: Option<Space>,
    pub epsilon: Option<f64>,
    /// Derivative order; all default orders when absent.
    pub order: Option<usize>,
    pub seed: u64,
    /// Coarse grid; refined by `refine` for the second fit.
    pub grid: Option<Grid2>,
    pub refine: usize,
    pub samples: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    /// Extra numeric keys read by individual suites (`s`, `gamma`, ...).
    pub values: BTreeMap<String, Vec<f64>>,
    pub group: Option<GroupSpec>,
    pub roots: Option<RootSystemSpec>,
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Result<Self> {
        find_suite(suite)?;
        Ok(Self {
            suite: suite.to_string(),
            space: None,
            epsilon: None,
            order: None,
            seed: 0,
            grid: None,
            refine: 4,
            samples: None,
            tolerances: BTreeMap::new(),
            values: BTreeMap::new(),
            group: None,
            roots: None,
            out: None,
        })
    }

    /// Reads `[suite]` then `[<name>]` (the later overriding), plus the
    /// optional `[group]` and `[roots]` sections.
    pub fn from_config(suite: &str, cfg: &ConfigFile) -> Result<Self> {
        let mut c = Self::new(suite)?;
        for name in ["suite", suite] {
            if let Some(section) = cfg.section(name) {
                c.apply_section(section)?;
            }
        }
        let in_section = |s: &Section, e: Error| match e {
            Error::Config { .. } => e,
            other => Error::Config {
                line: s.line,
                message: format!("[{}]: {other}", s.name),
            },
        };
        if let Some(s) = cfg.section("group") {
            c.group = Some(GroupSpec::from_section(s).map_err(|e| in_section(s, e))?);
        }
        if let Some(s) = cfg.section("roots") {
            c.roots = Some(RootSystemSpec::from_section(s).map_err(|e| in_section(s, e))?);
        }
        Ok(c)
    }

    fn apply_section(&mut self, s: &Section) -> Result<()> {
        // The default grid depends on the space.
        if let Some(e) = s.get("space") {
            self.space = Some(e.value.parse().map_err(|_| e.error("expected h2 or h3"))?);
        }
        let mut grid = self.grid.unwrap_or_else(|| default_grid(&self.suite, self.space()));
        let mut grid_touched = false;
        for e in &s.entries {
            match e.key.as_str() {
                "space" => self.space = Some(e.value.parse().map_err(|_| e.error("expected h2 or h3"))?),
                "epsilon" => self.epsilon = Some(e.parse()?),
                "i" => self.order = Some(e.parse()?),
                "seed" => self.seed = e.parse()?,
                "refine" => self.refine = e.parse()?,
                "samples" => self.samples = Some(e.parse()?),
                "out" => self.out = Some(PathBuf::from(&e.value)),
                "t_min" | "t_max" | "t_count" | "t_scale" | "r_min" | "r_max" | "r_count" | "r_scale" => {
                    let axis = if e.key.starts_with('t') { &mut grid.t } else { &mut grid.r };
                    match &e.key[2..] {
                        "min" => axis.min = e.parse()?,
                        "max" => axis.max = e.parse()?,
                        "count" => axis.count = e.parse()?,
                        _ => {
                            axis.scale = match e.value.as_str() {
                                "log" => Scale::Log,
                                "linear" => Scale::Linear,
                                _ => return Err(e.error("expected log or linear")),
                            }
                        }
                    }
                    grid_touched = true;
                }
                "name" => {}
                key if key.starts_with("tol.") => {
                    self.tolerances.insert(key[4..].to_string(), e.parse()?);
                }
                key => {
                    let nums = e
                        .value
                        .split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                        .map_err(|_| e.error("expected a number or a comma-separated list"))?;
                    self.values.insert(key.to_string(), nums);
                }
            }
        }
        if grid_touched {
            self.grid = Some(grid);
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Error::Config { line: 0, message };
        find_suite(&self.suite)?;
        let grid = self.grid();
        grid.t.validate().map_err(|e| bad(format!("t grid: {e}")))?;
        grid.r.validate().map_err(|e| bad(format!("r grid: {e}")))?;
        if grid.t.min <= 0.0 {
            return Err(bad("t grid must be positive".into()));
        }
        if grid.r.min < 0.0 {
            return Err(bad("r grid must be nonnegative".into()));
        }
        if self.refine < 2 {
            return Err(bad(format!("refine = {} must be at least 2", self.refine)));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(bad(format!("epsilon = {e} must lie in (0, 1)")));
            }
        }
        if let Some(0) = self.samples {
            return Err(bad("samples must be positive".into()));
        }
        if let Some(r) = &self.roots {
            r.validate().map_err(|e| bad(e.to_string()))?;
        }
        Ok(())
    }

    pub fn space(&self) -> Space {
        self.space.unwrap_or(Space::H3)
    }

    pub fn grid(&self) -> Grid2 {
        self.grid.unwrap_or_else(|| default_grid(&self.suite, self.space()))
    }

    pub fn tol(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    fn list(&self, key: &str, default: &[f64]) -> Vec<f64> {
        self.values.get(key).cloned().unwrap_or_else(|| default.to_vec())
    }

    fn scalar(&self, key: &str, default: f64) -> f64 {
        self.values.get(key).and_then(|v| v.last().copied()).unwrap_or(default)
    }

    fn model(&self) -> Result<SpaceModel> {
        match &self.roots {
            Some(spec) => build_from_roots(spec),
            None => Ok(self.space().model()),
        }
    }
}

/// Coarse grid used when the configuration does not set one.
pub fn default_grid(suite: &str, space: Space) -> Grid2 {
    match (suite, space) {
        ("envelope", _) => Grid2::new(Axis::log(0.01, 30.0, 60), Axis::linear(0.0, 20.0, 60)),
        ("quotient", _) => Grid2::new(Axis::log(0.1, 10.0, 30), Axis::linear(0.0, 8.0, 30)),
        ("theorem2", _) => Grid2::new(Axis::log(0.1, 10.0, 30), Axis::linear(0.0, 4.0, 30)),
        ("riesz", _) => Grid2::new(Axis::linear(1.0, 1.0, 1), Axis::linear(0.5, 15.0, 30)),
        (_, Space::H2) => Grid2::new(Axis::log(0.1, 10.0, 30), Axis::linear(0.1, 10.0, 30)),
        _ => Grid2::new(Axis::log(0.05, 20.0, 30), Axis::linear(0.0, 20.0, 30)),
    }
}

/// Runs the configured suite. Rows come back sorted by check and inputs.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rep = SuiteReport::new(&cfg.suite);
    match cfg.suite.as_str() {
        "recurrence" => recurrence(cfg, &mut rep)?,
        "envelope" => envelope(cfg, &mut rep)?,
        "theorem1" => theorem1(cfg, &mut rep)?,
        "gradient" => gradient(cfg, &mut rep)?,
        "grigoryan" => grigoryan(cfg, &mut rep)?,
        "poincare" => poincare(cfg, &mut rep)?,
        "quotient" => quotient(cfg, &mut rep)?,
        "thresholds" => thresholds(cfg, &mut rep)?,
        "stnorm" => stnorm(cfg, &mut rep)?,
        "riesz" => riesz(cfg, &mut rep)?,
        "theorem2" => theorem2(cfg, &mut rep)?,
        "liyau" => liyau(cfg, &mut rep)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    }
    rep.sort_rows();
    rep.wall_time = start.elapsed();
    Ok(rep)
}

fn require_h3(cfg: &SuiteConfig) -> Result<()> {
    if cfg.space() != Space::H3 {
        return Err(Error::Config {
            line: 0,
            message: format!("suite {} runs on h3 only", cfg.suite),
        });
    }
    Ok(())
}

fn recurrence(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let tol = cfg.tol("limit", 1e-9);
    let i_max = cfg.order.unwrap_or(10);
    let l_max = cfg.scalar("l_max", 200.0) as usize;
    let lambdas = match cfg.epsilon {
        Some(e) => vec![crate::envelope::lambda_eps(e)],
        None => cfg.list("lambda", &[0.25, 0.5, 0.75, 0.9]),
    };
    for lambda in lambdas {
        let eps = epsilon_for_lambda(lambda);
        let g = recurrence_grid(eps, i_max, l_max)?;
        for i in 0..=i_max {
            let p = [("lambda", lambda), ("i", i as f64)];
            let gamma_err = (g.gamma[l_max][i] - gamma_limit(eps, i)).abs();
            rep.push(Row::at_most("gamma_limit", &p, gamma_err, tol));
            let beta_err = (g.beta[l_max][i] - 1.0).abs();
            rep.push(Row::at_most("beta_limit", &p, beta_err, tol));
        }
        let mut outside = 0usize;
        let mut decreasing = 0usize;
        for l in 0..=l_max {
            for i in 0..=i_max {
                let v = g.gamma[l][i];
                if !(0.0..=1.0).contains(&v) {
                    outside += 1;
                }
                if l > 0 && v < g.gamma[l - 1][i] {
                    decreasing += 1;
                }
            }
        }
        rep.push(Row::at_most("gamma_in_unit_interval", &[("lambda", lambda)], outside as f64, 0.0));
        rep.push(Row::at_most("gamma_monotone", &[("lambda", lambda)], decreasing as f64, 0.0));
    }
    Ok(())
}

fn ratio_range(model: &SpaceModel, space: Space, grid: &Grid2) -> Result<(f64, f64)> {
    let ratios = grid
        .points()
        .par_iter()
        .map(|&(t, r)| {
            let h = heat_kernel(space, t, r)?.log.ln_abs;
            Ok((h - ostellari_envelope(model, t, r)?).exp())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))))
}

fn envelope(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let space = cfg.space();
    let model = space.model();
    let grid = cfg.grid();
    let tol = cfg.tol("bracket_change", 0.10);
    let (lo, hi) = ratio_range(&model, space, &grid)?;
    let (lo_f, hi_f) = ratio_range(&model, space, &grid.refined(cfg.refine))?;
    rep.push(Row::at_least("bracket_lower", &[], lo, f64::MIN_POSITIVE));
    rep.push(Row::at_most("bracket_upper", &[], hi, f64::MAX));
    rep.push(Row::at_most("bracket_lower_change", &[], (lo_f / lo - 1.0).abs(), tol));
    rep.push(Row::at_most("bracket_upper_change", &[], (hi_f / hi - 1.0).abs(), tol));
    Ok(())
}

fn push_fit(rep: &mut SuiteReport, params: &[(&str, f64)], fit: &TwoGridFit, limit: f64) {
    let (c, f) = (fit.coarse.constant(), fit.fine.constant());
    rep.push(Row::new("fitted_constant", params, c, f, c.is_finite() && c > 0.0));
    rep.push(Row::at_most("stability", params, fit.stability(), limit));
}

/// `ln|∂ᵢ_t h_t(r)|` with sign: closed form on `H³`, differences on `H²`.
fn time_derivative(space: Space, i: usize, t: f64, r: f64) -> Result<SignedLog> {
    match space {
        Space::H3 => Ok(h3_kernel(t, r, i)?.log),
        Space::H2 => Ok(fd_time_derivative_scaled(&H2Kernel, i, t, r)?.log()),
    }
}

fn theorem1(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let space = cfg.space();
    let model = space.model();
    let eps = cfg.epsilon.unwrap_or(0.1);
    let grid = cfg.grid();
    let limit = cfg.tol("stability", crate::envelope::STABILITY_LIMIT);
    let orders = match cfg.order {
        Some(i) => vec![i],
        None => vec![1, 2],
    };
    for i in orders {
        let fit = two_grid_fit(
            |t, r| theorem1_rhs(&model, i, t, ChamberPoint::radial(&model, r), eps),
            |t, r| time_derivative(space, i, t, r),
            &grid,
            cfg.refine,
        )?;
        let params = [("i", i as f64), ("epsilon", eps)];
        push_fit(rep, &params, &fit, limit);
        if space == Space::H3 && i <= 2 {
            fd_cross_check(cfg, rep, i, &grid)?;
        }
    }
    Ok(())
}

/// Closed-form against finite-difference derivatives on the coarse grid,
/// skipping points where the difference quotient reports precision loss.
fn fd_cross_check(cfg: &SuiteConfig, rep: &mut SuiteReport, i: usize, grid: &Grid2) -> Result<()> {
    let tol = cfg.tol("fd_agreement", 1e-7);
    let checks = grid
        .points()
        .par_iter()
        .map(|&(t, r)| Ok(h3_derivative_with_check(i, t, r)?.1))
        .collect::<Result<Vec<Option<f64>>>>()?;
    let worst = checks.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let checked = checks.iter().flatten().count() as f64 / checks.len() as f64;
    rep.push(Row::at_most("fd_agreement", &[("i", i as f64)], worst, tol));
    rep.push(Row::at_least("fd_checked_fraction", &[("i", i as f64)], checked, 0.5));
    Ok(())
}

fn min_li_yau_gap(space: Space, gamma: f64, grid: &Grid2) -> Result<f64> {
    let gaps = grid
        .points()
        .par_iter()
        .map(|&(t, r)| li_yau_gap(space, t, r, gamma))
        .collect::<Result<Vec<f64>>>()?;
    Ok(gaps.into_iter().fold(f64::INFINITY, f64::min))
}

fn gradient(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let space = cfg.space();
    let model = space.model();
    let eps = cfg.epsilon.unwrap_or(0.1);
    let grid = cfg.grid();
    let fit = two_grid_fit(
        |t, r| gradient_rhs(&model, t, ChamberPoint::radial(&model, r), eps),
        |t, r| Ok(radial_derivative_log(space, t, r)?.abs()),
        &grid,
        cfg.refine,
    )?;
    push_fit(rep, &[("epsilon", eps)], &fit, cfg.tol("stability", crate::envelope::STABILITY_LIMIT));
    let gamma = cfg.scalar("gamma", 2.0);
    let gap = min_li_yau_gap(space, gamma, &grid.refined(cfg.refine))?;
    rep.push(Row::at_least("li_yau_min_gap", &[("gamma", gamma)], gap, 0.0));
    Ok(())
}

fn liyau(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let space = cfg.space();
    let grid = cfg.grid().refined(cfg.refine);
    for gamma in cfg.list("gamma", &[1.5, 2.0, 3.0, 5.0]) {
        let gap = min_li_yau_gap(space, gamma, &grid)?;
        rep.push(Row::at_least("li_yau_min_gap", &[("gamma", gamma)], gap, 0.0));
    }
    Ok(())
}

fn grigoryan(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    require_h3(cfg)?;
    let diag = Diagonal::H3Exact;
    let grid = cfg.grid();
    let ts = grid.t.points();
    let rs = grid.r.points();
    let orders = match cfg.order {
        Some(i) => vec![i],
        None => vec![1, 2],
    };
    for &i in &orders {
        // The bound depends on t only.
        let ln_bounds = ts
            .par_iter()
            .map(|&t| Ok(diag.bound(i, t)?.ln()))
            .collect::<Result<Vec<f64>>>()?;
        let mut worst = f64::NEG_INFINITY;
        for (k, &t) in ts.iter().enumerate() {
            for &r in &rs {
                let lhs = h3_kernel(t, r, i)?.log;
                if !lhs.is_zero() {
                    worst = worst.max(lhs.ln_abs - ln_bounds[k]);
                }
            }
        }
        rep.push(Row::at_most("pointwise", &[("i", i as f64)], worst.exp(), 1.0));
    }
    let k_max = 2 * orders.iter().copied().max().unwrap_or(2);
    for k in 1..=k_max {
        let fk = ts
            .par_iter()
            .map(|&t| diag.f_k(k, t))
            .collect::<Result<Vec<f64>>>()?;
        let ratio = |lower: &dyn Fn(f64) -> f64| {
            ts.iter()
                .zip(&fk)
                .map(|(&t, &f)| f / lower(t))
                .fold(f64::INFINITY, f64::min)
        };
        let stated = ratio(&|t| diag.stated_lower(k, t));
        let certified = ratio(&|t| diag.certified_lower(k, t));
        rep.push(Row::at_least("stated_lower", &[("k", k as f64)], stated, 1.0));
        rep.push(Row::at_least("certified_lower", &[("k", k as f64)], certified, 1.0));
    }
    Ok(())
}

fn default_group(cfg: &SuiteConfig) -> Result<GroupSpec> {
    match &cfg.group {
        Some(g) => Ok(g.clone()),
        None => GroupSpec::cyclic_translation(3, cfg.scalar("translation", 2.0)),
    }
}

fn poincare(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let group = default_group(cfg)?;
    let closed_form = cfg.group.is_none();
    let s = cfg.scalar("s", 1.0);
    let x = Point::j();
    let big = enumerate_orbit(&group, x, x, cfg.scalar("exponent_radius", 60.0))?;
    let exponent = critical_exponent(&big)?;
    rep.push(Row::at_most("critical_exponent", &[], exponent.estimate, cfg.tol("critical_exponent", 0.05)));
    let delta = exponent.upper();
    let translation = group.generators[0].translation_length();
    let exact = 1.0 / (0.5 * s * translation).tanh();
    let mut prev: Option<(f64, f64)> = None;
    for r in cfg.list("radii", &[10.0, 20.0, 40.0]) {
        let orbit = enumerate_orbit(&group, x, x, r)?;
        let p = poincare_series(&orbit, s, delta)?;
        let params = [("r_max", r), ("s", s)];
        if closed_form {
            rep.push(Row::at_most("bracket_lower", &params, p.partial_sum, exact));
            rep.push(Row::at_least("bracket_upper", &params, p.upper(), exact));
        } else {
            rep.push(Row::at_most("bracket_order", &params, p.partial_sum, p.upper()));
        }
        if let Some((lo, hi)) = prev {
            rep.push(Row::at_most("nested_lower", &params, lo, p.partial_sum));
            rep.push(Row::at_most("nested_upper", &params, p.upper(), hi));
        }
        prev = Some((p.partial_sum, p.upper()));
    }
    Ok(())
}

/// Orbit data for one `ỹ`, shared by the oracle and the bound.
struct QuotientPoint {
    orbit: OrbitSet,
    counting: CountingBound,
    ln_poincare: f64,
}

struct QuotientSetup {
    delta: f64,
    radius: f64,
    epsilon: f64,
    /// Keyed by the bits of the grid coordinate.
    points: BTreeMap<u64, QuotientPoint>,
}

impl QuotientSetup {
    fn new(group: GroupSpec, y_of: impl Fn(f64) -> Point + Sync, grid: &Grid2, refine: usize, cfg: &SuiteConfig) -> Result<Self> {
        let exponent_radius = cfg.scalar("exponent_radius", 60.0);
        let big = enumerate_orbit(&group, Point::j(), Point::j(), exponent_radius)?;
        let delta = critical_exponent(&big)?.upper().max(0.0);
        let radius = cfg.scalar("orbit_radius", 40.0);
        let epsilon = cfg.epsilon.unwrap_or(0.1);
        let mut coords = grid.r.points();
        coords.extend(grid.r.refined(refine).points());
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        let points = coords
            .par_iter()
            .map(|&d| {
                let orbit = enumerate_orbit(&group, Point::j(), y_of(d), radius)?;
                let counting = CountingBound::fit(&orbit, delta)?;
                let p = poincare_series(&orbit, epsilon + delta, delta)?;
                Ok((
                    d.to_bits(),
                    QuotientPoint {
                        orbit,
                        counting,
                        ln_poincare: p.upper().ln(),
                    },
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            delta,
            radius,
            epsilon,
            points: points.into_iter().collect(),
        })
    }

    fn at(&self, d: f64) -> &QuotientPoint {
        &self.points[&d.to_bits()]
    }

    fn run(&self, cfg: &SuiteConfig, rep: &mut SuiteReport, model: &SpaceModel, triples: &[AlphaTriple], orders: &[usize]) -> Result<()> {
        let grid = cfg.grid();
        let limit = cfg.tol("stability", crate::envelope::STABILITY_LIMIT);
        rep.push(Row::at_most("delta_below_rho_sum", &[], self.delta, model.rho_norm + model.rho_m));
        for (k, tr) in triples.iter().enumerate() {
            let tp = [("triple", k as f64)];
            let ok = admissible_alpha_triple(tr, self.delta, model);
            rep.push(Row::new("admissible", &tp, tr.a2, self.delta, ok));
            if !ok {
                continue;
            }
            for &i in orders {
                let fit = two_grid_fit(
                    |t, d| {
                        let q = self.at(d);
                        let d_m = q.orbit.min_distance();
                        Ok(theorem2_rhs(model, self.delta, tr, i, t, d_m, self.epsilon)? + q.ln_poincare)
                    },
                    |t, d| {
                        let q = self.at(d);
                        let v = quotient_kernel(&q.orbit, &q.counting, Space::H3, t, i, self.radius)?;
                        Ok(SignedLog::from_f64(v.value.abs() + v.truncation_bound))
                    },
                    &grid,
                    cfg.refine,
                )?;
                let params = [("triple", k as f64), ("i", i as f64), ("epsilon", self.epsilon)];
                push_fit(rep, &params, &fit, limit);
            }
        }
        Ok(())
    }
}

fn standard_triples(model: &SpaceModel) -> Vec<AlphaTriple> {
    vec![
        AlphaTriple::new(0.0, model.rho_m, 0.0),
        AlphaTriple::new(0.5, model.rho_m + 0.2, 0.5),
    ]
}

fn orders_or(cfg: &SuiteConfig, default: &[usize]) -> Vec<usize> {
    match cfg.order {
        Some(i) => vec![i],
        None => default.to_vec(),
    }
}

fn quotient(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    require_h3(cfg)?;
    let model = Space::H3.model();
    let group = default_group(cfg)?;
    // `ỹ` at distance d from j along a geodesic orthogonal to the axis.
    let y_of = |d: f64| Point::plane(d.tanh(), 1.0 / d.cosh());
    let setup = QuotientSetup::new(group, y_of, &cfg.grid(), cfg.refine, cfg)?;
    setup.run(cfg, rep, &model, &standard_triples(&model), &orders_or(cfg, &[0, 1]))
}

/// Two-generator Schottky group with real generators, acting on `H³`.
pub fn schottky_h3() -> Result<GroupSpec> {
    let plane = GroupSpec::schottky_plane(&[(-2.5, 2.5, 1.0), (-6.0, 6.0, 1.0)])?;
    GroupSpec::new(3, plane.generators, Family::Schottky)
}

fn theorem2(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    require_h3(cfg)?;
    let model = Space::H3.model();
    let group = match &cfg.group {
        Some(g) => g.clone(),
        None => schottky_h3()?,
    };
    // Moves `ỹ` off the real line, away from the isometric hemispheres.
    let y_of = |d: f64| Point::new(Complex64::new(0.0, d.tanh()), 1.0 / d.cosh());
    let mut c = cfg.clone();
    c.values.entry("orbit_radius".into()).or_insert_with(|| vec![20.0]);
    c.values.entry("exponent_radius".into()).or_insert_with(|| vec![25.0]);
    let setup = QuotientSetup::new(group, y_of, &c.grid(), c.refine, &c)?;
    setup.run(&c, rep, &model, &standard_triples(&model), &orders_or(cfg, &[0, 1, 2]))
}

fn thresholds(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let model = cfg.model()?;
    let rho = model.rho_norm;
    let margin = cfg.tol("margin", crate::lpthresholds::DEFAULT_MARGIN);
    let r_max = cfg.scalar("chamber_radius", 4000.0);
    let a = cfg.scalar("poly_exp", model.a_exp);
    let scan = match cfg.epsilon {
        Some(e) => vec![e],
        None => default_epsilon_scan(),
    };
    let ps = cfg.list("p", &[1.5, 2.0, 4.0]);
    let etas = cfg.list("eta", &[0.0, 0.3, 0.7]);
    let cells: Vec<(f64, f64)> = ps.iter().flat_map(|&p| etas.iter().map(move |&e| (p, e * rho))).collect();
    let rows = cells
        .par_iter()
        .map(|&(p, eta)| {
            let base = ThresholdInput::new(p, rho, eta, 0.0);
            let thr = sigma_threshold_heat(&base)?;
            let below = maximal_operator_scan(&model, &ThresholdInput { sigma: 0.9 * thr, ..base }, a, &scan, r_max, margin)?;
            let above = maximal_operator_scan(&model, &ThresholdInput { sigma: 1.1 * thr, ..base }, a, &scan, r_max, margin)?;
            let best = |v: &crate::lpthresholds::ScanVerdict| {
                v.per_epsilon.iter().map(|(_, x)| x.effective_rate).fold(f64::INFINITY, f64::min)
            };
            let params = [("p", p), ("eta", eta)];
            let mut out = vec![
                Row::new("finite_below", &params, best(&below), -margin, below.verdict == Verdict::Finite),
                Row::new("divergent_above", &params, best(&above), margin, above.verdict == Verdict::Divergent),
            ];
            for ((eps, b), (_, a)) in below.per_epsilon.iter().zip(&above.per_epsilon) {
                let params = [("p", p), ("eta", eta), ("epsilon", *eps)];
                out.push(Row::new("finite_below_eps", &params, b.effective_rate, -margin, b.verdict == Verdict::Finite));
                out.push(Row::new("divergent_above_eps", &params, a.effective_rate, margin, a.verdict == Verdict::Divergent));
            }
            Ok(out)
        })
        .collect::<Result<Vec<Vec<Row>>>>()?;
    rows.into_iter().flatten().for_each(|r| rep.push(r));
    let p2 = ThresholdInput::new(2.0, rho, 0.0, 0.0);
    let pp = 2.0 * conjugate(2.0)?;
    let heat = sigma_threshold_heat(&p2)?;
    let exact = 4.0 * rho * rho / pp;
    rep.push(Row::new("threshold_p2_eta0", &[], heat, exact, heat == exact));
    let poisson = sigma_threshold_poisson(&p2)?;
    let exact = 2.0 * rho / pp.sqrt();
    rep.push(Row::at_most("poisson_p2_eta0", &[], (poisson - exact).abs(), 1e-15));
    Ok(())
}

fn stnorm(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    let model = cfg.model()?;
    let rho = model.rho_norm;
    let n = cfg.samples.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut square_err = 0.0f64;
    let mut zero_err = 0.0f64;
    let scan = st_norm_scan();
    for k in 0..n {
        let p = rng.gen_range(1.01..20.0);
        let eta = rho * rng.gen_range(0.0..0.9999);
        let inp = ThresholdInput::new(p, rho, eta, 0.0);
        let heat = sigma_threshold_heat(&inp)?;
        let poisson = sigma_threshold_poisson(&inp)?;
        square_err = square_err.max((poisson * poisson - heat).abs() / heat.max(1.0));
        zero_err = zero_err.max((st_norm_rate(&model, eta, p, 0.0)? - s_p(p)? * (eta - rho)).abs());
        // Certificates for a subsample keep the suite fast.
        if k % 5 == 0 {
            let rates = scan
                .iter()
                .map(|&e| st_norm_rate(&model, eta, p, e).map(|r| (r, e)))
                .collect::<Result<Vec<(f64, f64)>>>()?;
            // The scan is ascending, so the last negative entry is the widest.
            let (rate, eps) = rates
                .iter()
                .copied()
                .rfind(|(r, _)| *r < 0.0)
                .unwrap_or((rates[0].0, 0.0));
            rep.push(Row::new(
                "certificate",
                &[("p", p), ("eta", eta), ("epsilon", eps)],
                rate,
                0.0,
                rate < 0.0,
            ));
        }
    }
    rep.push(Row::at_most("square_relation", &[("samples", n as f64)], square_err, cfg.tol("square", 1e-12)));
    rep.push(Row::at_most("zero_epsilon_rate", &[("samples", n as f64)], zero_err, 1e-15));
    let widths = [0.9, 0.99, 0.999]
        .iter()
        .map(|&e| {
            crate::lpthresholds::st_norm_certificate(&model, e * rho, 2.0, &scan).map(|c| c.unwrap_or(0.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    for w in widths.windows(2) {
        rep.push(Row::new("window_shrinks", &[("wide", w[0])], w[1], w[0], w[1] < w[0] && w[1] > 0.0));
    }
    Ok(())
}

fn riesz(cfg: &SuiteConfig, rep: &mut SuiteReport) -> Result<()> {
    require_h3(cfg)?;
    let eps = cfg.epsilon.unwrap_or(0.1);
    let t_cut = cfg.scalar("t_cut", 1.0);
    let grid = cfg.grid();
    let split_tol = cfg.tol("split", 1e-10);
    let rs = grid.r.points();
    let decays = rs
        .par_iter()
        .map(|&r| riesz_kernel_decay(Space::H3, r, eps, t_cut))
        .collect::<Result<Vec<_>>>()?;
    let mut ln_c = f64::NEG_INFINITY;
    for (&r, d) in rs.iter().zip(&decays) {
        let p = [("r", r)];
        rep.push(Row::new("finite_positive", &p, d.value, 0.0, d.value.is_finite() && d.value > 0.0));
        rep.push(Row::at_most("split_recombination", &p, (d.near + d.far - d.unsplit).abs() / d.unsplit, split_tol));
        rep.push(Row::at_most("tails_certified", &p, (d.small_tail + d.large_tail) / d.value, split_tol));
        ln_c = ln_c.max(d.value.ln() - d.ln_bound);
    }
    let increases = decays.windows(2).filter(|w| w[1].value >= w[0].value).count();
    rep.push(Row::at_most("decreasing_in_r", &[], increases as f64, 0.0));
    rep.push(Row::new("fitted_constant", &[("epsilon", eps)], ln_c.exp(), 1.0, ln_c.is_finite()));
    let r_end = grid.r.max;
    let h = 0.5;
    let lo = riesz_kernel_decay(Space::H3, r_end - h, eps, t_cut)?;
    let hi = riesz_kernel_decay(Space::H3, r_end + h, eps, t_cut)?;
    let slope = (hi.value.ln() - lo.value.ln()) / (2.0 * h);
    let target = -(1.0 + Space::H3.model().rho_norm);
    rep.push(Row::new(
        "asymptotic_slope",
        &[("r", r_end)],
        slope,
        target,
        (slope / target - 1.0).abs() <= cfg.tol("slope", 0.10),
    ));
    Ok(())
}
