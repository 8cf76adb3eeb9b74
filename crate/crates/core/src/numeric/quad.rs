//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_floor, rel_tol * |I|)`. Nodes are interior,
//! so integrable endpoint singularities are tolerated, although they converge
//! slowly; callers remove them by substitution where they can.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Smallest absolute error target; keeps integrals of underflowing
/// integrands from being classified as non-convergent.
pub const ABS_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: ABS_FLOOR,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).abs();
    (value, error)
}

impl Integrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over the finite interval `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Quadrature> {
        if a == b {
            return Ok(Quadrature {
                value: 0.0,
                error: 0.0,
                intervals: 0,
            });
        }
        let (value, error) = kronrod(&f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Segment { a, b, value, error });
        let mut total = value;
        let mut total_err = error;
        let mut count = 1;
        loop {
            let target = self.abs_tol.max(ABS_FLOOR).max(self.rel_tol * total.abs());
            if total_err <= target || !total_err.is_finite() {
                break;
            }
            if count >= self.max_intervals {
                return Err(Error::Quadrature {
                    value: total,
                    error: total_err,
                    intervals: count,
                });
            }
            let worst = heap.pop().expect("heap holds at least one segment");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval exhausted at machine precision.
                heap.push(worst);
                return Err(Error::Quadrature {
                    value: total,
                    error: total_err,
                    intervals: count,
                });
            }
            let (lv, le) = kronrod(&f, worst.a, mid);
            let (rv, re) = kronrod(&f, mid, worst.b);
            total += lv + rv - worst.value;
            total_err += le + re - worst.error;
            heap.push(Segment {
                a: worst.a,
                b: mid,
                value: lv,
                error: le,
            });
            heap.push(Segment {
                a: mid,
                b: worst.b,
                value: rv,
                error: re,
            });
            count += 1;
        }
        if !total.is_finite() {
            return Err(Error::Quadrature {
                value: total,
                error: total_err,
                intervals: count,
            });
        }
        // Re-sum to shed the drift accumulated by incremental updates.
        let heap = heap.into_vec();
        let value = heap.iter().map(|s| s.value).sum();
        let error = heap.iter().map(|s| s.error).sum();
        Ok(Quadrature {
            value,
            error,
            intervals: count,
        })
    }

    /// Integrates over `[a, ∞)` through the map `x = a + (1 - u) / u`.
    pub fn integrate_to_infinity<F: Fn(f64) -> f64>(&self, f: F, a: f64) -> Result<Quadrature> {
        self.integrate(
            |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let x = a + (1.0 - u) / u;
                let v = f(x) / (u * u);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
        )
    }
}
