use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// One sampling axis; endpoints are always included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Axis {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: Scale::Linear,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            scale: Scale::Log,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(domain("count", 0.0, "grid axis must be nonempty"));
        }
        if self.min > self.max || !self.min.is_finite() || !self.max.is_finite() {
            return Err(domain("min", self.min, "axis range must be finite and ordered"));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(domain("min", self.min, "log axis needs a positive lower end"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                let s = k as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + s * (self.max - self.min),
                    Scale::Log => (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            count: self.count * factor,
            ..*self
        }
    }
}

/// Tensor grid over `(t, r)`, enumerated with `t` outermost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub t: Axis,
    pub r: Axis,
}

impl Grid2 {
    pub fn new(t: Axis, r: Axis) -> Self {
        Self { t, r }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let rs = self.r.points();
        self.t
            .points()
            .into_iter()
            .flat_map(|t| rs.iter().map(move |&r| (t, r)))
            .collect()
    }

    pub fn refined(&self, factor: usize) -> Self {
        Self {
            t: self.t.refined(factor),
            r: self.r.refined(factor),
        }
    }

    pub fn len(&self) -> usize {
        self.t.count * self.r.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let a = Axis::log(0.01, 30.0, 60).points();
        assert_eq!(a.len(), 60);
        assert!((a[0] - 0.01).abs() < 1e-15);
        assert!((a[59] - 30.0).abs() < 1e-12);
        let b = Axis::linear(0.0, 20.0, 5).points();
        assert_eq!(b, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
    }

    #[test]
    fn refinement_multiplies_counts() {
        let g = Grid2::new(Axis::log(0.1, 1.0, 30), Axis::linear(0.0, 1.0, 30));
        assert_eq!(g.refined(4).len(), 120 * 120);
    }

    #[test]
    fn invalid_axes_rejected() {
        assert!(Axis::log(0.0, 1.0, 3).validate().is_err());
        assert!(Axis::linear(0.0, 1.0, 0).validate().is_err());
        assert!(Axis::linear(2.0, 1.0, 3).validate().is_err());
    }
}
