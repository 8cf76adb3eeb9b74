//! Central finite differences with Richardson extrapolation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdEstimate {
    pub value: f64,
    /// Difference between the two highest extrapolation levels plus a
    /// rounding term; an estimate, not a bound.
    pub error: f64,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Order-`order` central difference with stencil points `x + (order/2 - k) h`.
/// Its error expansion contains only even powers of `h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize, h: f64) -> (f64, f64) {
    let half = order as f64 / 2.0;
    let mut acc = 0.0;
    let mut magnitude = 0.0;
    for k in 0..=order {
        let c = binomial(order, k);
        let v = f(x + (half - k as f64) * h);
        let term = if k % 2 == 0 { c * v } else { -c * v };
        acc += term;
        magnitude += (c * v).abs();
    }
    let scale = h.powi(order as i32);
    (acc / scale, magnitude / scale)
}

/// `order`-th derivative of `f` at `x` from stencils of width `h`, `2h` and
/// `4h`, combined by two Richardson steps. Points up to `x ± 2·order·h` are
/// sampled.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, order: usize, h: f64) -> FdEstimate {
    if order == 0 {
        return FdEstimate {
            value: f(x),
            error: 0.0,
        };
    }
    let steps = [4.0 * h, 2.0 * h, h];
    let mut table = [[0.0f64; 3]; 3];
    let mut rounding = 0.0f64;
    for (j, &step) in steps.iter().enumerate() {
        let (d, mag) = central_difference(&f, x, order, step);
        table[j][0] = d;
        rounding = rounding.max(mag);
    }
    for k in 1..3 {
        let factor = 4f64.powi(k as i32) - 1.0;
        for j in k..3 {
            table[j][k] = table[j][k - 1] + (table[j][k - 1] - table[j - 1][k - 1]) / factor;
        }
    }
    let value = table[2][2];
    let error = (table[2][2] - table[2][1]).abs() + 4.0 * f64::EPSILON * rounding;
    FdEstimate { value, error }
}
