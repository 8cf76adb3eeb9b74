//! Signed values stored as `(sign, ln |x|)` so that bound checks survive
//! magnitudes far below `e^{-700}`.

use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn positive(ln_abs: f64) -> Self {
        Self { sign: 1.0, ln_abs }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Self {
                sign: x.signum(),
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// `exp(ln_abs) * factor` with the factor's sign folded in.
    pub fn scaled(ln_abs: f64, factor: f64) -> Self {
        if factor == 0.0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: factor.signum(),
                ln_abs: ln_abs + factor.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    pub fn abs(self) -> Self {
        if self.sign == 0.0 {
            self
        } else {
            Self::positive(self.ln_abs)
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0.0
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;

    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.is_zero() || rhs.is_zero() {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: self.sign * rhs.sign,
                ln_abs: self.ln_abs + rhs.ln_abs,
            }
        }
    }
}

/// Sum of signed log-magnitudes, rescaled by the largest term.
pub fn signed_sum<I: IntoIterator<Item = SignedLog>>(terms: I) -> SignedLog {
    let terms: Vec<SignedLog> = terms.into_iter().filter(|t| !t.is_zero()).collect();
    let Some(max) = terms.iter().map(|t| t.ln_abs).reduce(f64::max) else {
        return SignedLog::ZERO;
    };
    if max == f64::INFINITY {
        return SignedLog::positive(f64::INFINITY);
    }
    let s: f64 = terms.iter().map(|t| t.sign * (t.ln_abs - max).exp()).sum();
    SignedLog::scaled(max, s)
}

/// `ln Σ exp(x_i)`; `-∞` for an empty input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `ln(r / sinh r)`, accurate at both small and large `r`.
pub fn ln_r_over_sinh(r: f64) -> f64 {
    let r = r.abs();
    if r < 1e-4 {
        -r * r / 6.0
    } else if r < 20.0 {
        (r / r.sinh()).ln()
    } else {
        // sinh r = e^r (1 - e^{-2r}) / 2
        r.ln() + std::f64::consts::LN_2 - r - (-(-2.0 * r).exp()).ln_1p()
    }
}

/// `coth r - 1/r`, the radial log-derivative correction of `r / sinh r`.
pub fn coth_minus_inv(r: f64) -> f64 {
    if r.abs() < 1e-3 {
        let r2 = r * r;
        r / 3.0 - r * r2 / 45.0 + 2.0 * r * r2 * r2 / 945.0
    } else {
        1.0 / r.tanh() - 1.0 / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signed_sum_cancels() {
        let a = SignedLog::positive(-800.0);
        let b = SignedLog {
            sign: -1.0,
            ln_abs: -800.0,
        };
        let c = SignedLog::positive(-800.0 + 2f64.ln());
        let s = signed_sum([a, b, c]);
        assert!((s.ln_abs - (-800.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(s.sign, 1.0);
        assert!(signed_sum([a, b]).is_zero());
    }

    #[test]
    fn r_over_sinh_branches_agree() {
        for &r in &[1e-5, 1e-4, 0.5, 19.999, 20.0, 20.001, 40.0] {
            let direct = if r < 30.0 {
                (r / f64::sinh(r)).ln()
            } else {
                r.ln() + 2f64.ln() - r
            };
            assert!((ln_r_over_sinh(r) - direct).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn coth_correction_series_matches() {
        for &r in &[9.99e-4, 1.01e-3, 0.3] {
            let direct = 1.0 / f64::tanh(r) - 1.0 / r;
            assert!((coth_minus_inv(r) - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn log_sum_exp_handles_underflow() {
        let v = log_sum_exp([-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(std::iter::empty()), f64::NEG_INFINITY);
    }
}
