//! Discrete isometry groups of `H²` and `H³`: orbit enumeration, counting
//! functions, critical exponents, Poincaré series and the quotient bounds.

pub mod bounds;
pub mod group;
pub mod mobius;
pub mod orbit;
pub mod poincare;

pub use bounds::{quadratic_margin, theorem2_rhs, weber_rhs, WeberRegime};
pub use group::{Family, GroupSpec};
pub use mobius::{distance, Mobius, Point};
pub use orbit::{counting_function, enumerate_orbit, OrbitPoint, OrbitSet};
pub use poincare::{critical_exponent, poincare_series, CountingBound, ExponentEstimate, PoincareEval};
