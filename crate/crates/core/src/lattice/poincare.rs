use super::orbit::{counting_function, OrbitSet};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    pub estimate: f64,
    /// Difference between the slopes of the two fit windows.
    pub half_width: f64,
}

impl ExponentEstimate {
    /// The conservative value used by tail bounds.
    pub fn upper(&self) -> f64 {
        self.estimate + self.half_width
    }
}

const MIN_POINTS: usize = 50;
const FIT_SAMPLES: usize = 200;

fn log_count_slope(orbit: &OrbitSet, lo: f64, hi: f64) -> Result<f64> {
    let mut xs = Vec::with_capacity(FIT_SAMPLES);
    let mut ys = Vec::with_capacity(FIT_SAMPLES);
    for k in 0..FIT_SAMPLES {
        let r = lo + (hi - lo) * k as f64 / (FIT_SAMPLES - 1) as f64;
        let n = counting_function(orbit, r)?;
        if n == 0 {
            continue;
        }
        xs.push(r);
        ys.push((n as f64).ln());
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData("empty fit window".into()));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Slope of `ln N(R)` against `R` on `[R_max/2, R_max]`, with the spread
/// against the window `[2R_max/3, R_max]` as the uncertainty.
pub fn critical_exponent(orbit: &OrbitSet) -> Result<ExponentEstimate> {
    if orbit.is_exhaustive() {
        // Finite orbit: the Poincaré series converges for every s.
        return Ok(ExponentEstimate {
            estimate: 0.0,
            half_width: 0.0,
        });
    }
    if orbit.points.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} orbit points below R = {}, need {MIN_POINTS}",
            orbit.points.len(),
            orbit.r_max
        )));
    }
    let r = orbit.r_max;
    let s1 = log_count_slope(orbit, 0.5 * r, r)?;
    let s2 = log_count_slope(orbit, 2.0 * r / 3.0, r)?;
    Ok(ExponentEstimate {
        estimate: s1,
        half_width: (s1 - s2).abs(),
    })
}

/// `N(x, y, R) ≤ c·e^{δR}`, with `c` read off the enumerated range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingBound {
    pub delta: f64,
    pub constant: f64,
    /// Lower constant: `N(R) ≥ e^{δR}/lower_inverse` on `[d_M, certified]`.
    pub lower_inverse: f64,
    pub certified: f64,
}

impl CountingBound {
    /// Smallest `c` with `N(R) ≤ c·e^{δR}` on the certified range, and the
    /// matching lower constant. `N` jumps at orbit distances, so both extremes
    /// sit at those distances (or at the range end).
    pub fn fit(orbit: &OrbitSet, delta: f64) -> Result<Self> {
        if orbit.points.is_empty() {
            return Err(Error::InsufficientData("orbit has no points below R_max".into()));
        }
        let pts = &orbit.points;
        let mut upper = f64::NEG_INFINITY;
        let mut lower = f64::INFINITY;
        let mut k = 0;
        while k < pts.len() {
            let d = pts[k].distance;
            let mut j = k;
            while j + 1 < pts.len() && pts[j + 1].distance == d {
                j += 1;
            }
            let n = (j + 1) as f64;
            upper = upper.max(n.ln() - delta * d);
            // Just before the next jump N still equals n.
            let next = if j + 1 < pts.len() {
                pts[j + 1].distance
            } else {
                orbit.r_max
            };
            if next.is_finite() {
                lower = lower.min(n.ln() - delta * next);
            }
            k = j + 1;
        }
        Ok(Self {
            delta,
            constant: upper.exp(),
            lower_inverse: if lower.is_finite() { (-lower).exp() } else { 1.0 },
            certified: orbit.r_max,
        })
    }

    /// A finite orbit: `N ≤ |orbit|` for every radius.
    pub fn finite(orbit: &OrbitSet) -> Self {
        Self {
            delta: 0.0,
            constant: orbit.points.len() as f64,
            lower_inverse: 1.0,
            certified: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincareEval {
    pub s: f64,
    pub partial_sum: f64,
    pub n_terms: usize,
    pub tail_bound: f64,
    pub delta_used: f64,
    pub counting_constant: f64,
}

impl PoincareEval {
    pub fn upper(&self) -> f64 {
        self.partial_sum + self.tail_bound
    }

    pub fn contains(&self, v: f64) -> bool {
        self.partial_sum <= v && v <= self.upper()
    }
}

/// `P_s(x, y) = Σ_γ e^{−s·d(x, γy)}` bracketed by the enumerated sum and
/// `Σ_{k ≥ K} c·e^{(k+1)δ}·e^{−ks}` with `K = ⌊R_max⌋`.
pub fn poincare_series(orbit: &OrbitSet, s: f64, delta: f64) -> Result<PoincareEval> {
    if !(s > delta) {
        return Err(domain("s", s, "series is certified only for s above the critical exponent"));
    }
    let partial_sum: f64 = orbit.points.iter().map(|p| (-s * p.distance).exp()).sum();
    let (tail_bound, constant) = if orbit.is_exhaustive() {
        (0.0, orbit.points.len() as f64)
    } else {
        let c = CountingBound::fit(orbit, delta)?.constant;
        let k = orbit.r_max.floor();
        let gap = s - delta;
        let tail = c * delta.exp() * (-k * gap).exp() / -(-gap).exp_m1();
        (tail, c)
    };
    Ok(PoincareEval {
        s,
        partial_sum,
        n_terms: orbit.points.len(),
        tail_bound,
        delta_used: delta,
        counting_constant: constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_orbit, GroupSpec, Point};

    fn cyclic(r: f64) -> OrbitSet {
        let g = GroupSpec::cyclic_translation(2, 2.0).unwrap();
        enumerate_orbit(&g, Point::j(), Point::j(), r).unwrap()
    }

    #[test]
    fn cyclic_exponent_is_small() {
        let e = critical_exponent(&cyclic(60.0)).unwrap();
        assert!(e.estimate < 0.05, "{e:?}");
        assert!(critical_exponent(&cyclic(10.0)).is_err());
    }

    #[test]
    fn cyclic_series_brackets_closed_form() {
        let exact = 1f64 / 1f64.tanh();
        let mut prev: Option<PoincareEval> = None;
        for r in [10.0, 20.0, 40.0] {
            let o = cyclic(r);
            let delta = critical_exponent(&cyclic(60.0)).unwrap().upper();
            let p = poincare_series(&o, 1.0, delta).unwrap();
            assert!(p.contains(exact), "{p:?}");
            if let Some(q) = prev {
                assert!(p.partial_sum >= q.partial_sum && p.upper() <= q.upper());
            }
            prev = Some(p);
        }
    }

    #[test]
    fn trivial_group_series_is_exact() {
        let g = GroupSpec::trivial(2).unwrap();
        let y = Point::plane(0.0, 3.0);
        let o = enumerate_orbit(&g, Point::j(), y, 1.0).unwrap();
        let p = poincare_series(&o, 2.0, 0.0).unwrap();
        assert!((p.partial_sum - (-2.0 * 3f64.ln()).exp()).abs() < 1e-15);
        assert_eq!(p.tail_bound, 0.0);
        assert_eq!(critical_exponent(&o).unwrap().estimate, 0.0);
    }

    #[test]
    fn rejects_s_below_delta() {
        assert!(poincare_series(&cyclic(10.0), 0.1, 0.2).is_err());
    }

    #[test]
    fn counting_constant_covers_counts() {
        let o = cyclic(20.0);
        let b = CountingBound::fit(&o, 0.1).unwrap();
        for k in 0..200 {
            let r = 0.1 * k as f64;
            let n = counting_function(&o, r).unwrap() as f64;
            assert!(n <= b.constant * (0.1 * r).exp() * (1.0 + 1e-12));
            assert!(n >= (0.1 * r).exp() / b.lower_inverse * (1.0 - 1e-12));
        }
    }
}
