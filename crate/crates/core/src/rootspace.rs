//! Root data of symmetric spaces of noncompact type: the half-sum `ρ`, its
//! minimum `ρ_m` on the unit sphere of the closed Weyl chamber, the dimension
//! and the polynomial exponents entering the heat-kernel envelopes.
//!
//! Hyperbolic models use curvature −1 with the inner product on `𝔞` chosen so
//! that geodesic distance equals `‖H‖`. Under that normalization the single
//! root of `Hⁿ` has unit length and `⟨ρ, H⟩ = ((n−1)/2)·r`.

use crate::config::Section;
use crate::error::{domain, Error, Result};

/// A positive, indivisible root with its multiplicity and the multiplicity
/// of its double. Roots `2α` are never listed separately.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveRoot {
    pub vector: Vec<f64>,
    pub multiplicity: u32,
    pub double_multiplicity: u32,
}

impl PositiveRoot {
    pub fn new(vector: Vec<f64>, multiplicity: u32, double_multiplicity: u32) -> Self {
        Self {
            vector,
            multiplicity,
            double_multiplicity,
        }
    }

    fn half_total(&self) -> f64 {
        (self.multiplicity + self.double_multiplicity) as f64 / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSystemSpec {
    pub rank: usize,
    pub roots: Vec<PositiveRoot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Real hyperbolic space with sectional curvature −1.
    CurvatureMinusOne,
    /// Inner product taken as given by the root vectors.
    AsGiven,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceModel {
    pub rank: usize,
    pub dimension: usize,
    pub rho: Vec<f64>,
    pub rho_norm: f64,
    pub rho_m: f64,
    /// Exponent of `(1+t)` in the global envelope.
    pub m_exp: f64,
    /// Exponent of `(1+‖H‖)` in the global envelope.
    pub a_exp: f64,
    pub normalization: Normalization,
    pub roots: Vec<PositiveRoot>,
}

/// Parameters `(α₁, α₂, α₃)` trading time decay, linear decay and Gaussian
/// decay in the quotient-space estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaTriple {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl AlphaTriple {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Self {
        Self { a1, a2, a3 }
    }
}

/// Radial data of a chamber element `H`: its norm and the pairing `⟨ρ, H⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamberPoint {
    pub norm: f64,
    pub rho_pairing: f64,
}

impl ChamberPoint {
    pub fn new(norm: f64, rho_pairing: f64) -> Self {
        Self { norm, rho_pairing }
    }

    /// Point at geodesic distance `r` in a rank-one space.
    pub fn radial(model: &SpaceModel, r: f64) -> Self {
        debug_assert_eq!(model.rank, 1);
        Self {
            norm: r,
            rho_pairing: model.rho_norm * r,
        }
    }

    pub fn from_vector(model: &SpaceModel, h: &[f64]) -> Self {
        Self {
            norm: norm(h),
            rho_pairing: dot(&model.rho, h),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Real hyperbolic space `Hⁿ` at curvature −1.
pub fn build_real_hyperbolic(n: usize) -> Result<SpaceModel> {
    if n < 2 {
        return Err(domain("n", n as f64, "real hyperbolic space needs n >= 2"));
    }
    let spec = RootSystemSpec {
        rank: 1,
        roots: vec![PositiveRoot::new(vec![1.0], (n - 1) as u32, 0)],
    };
    let mut model = build_from_roots(&spec)?;
    model.normalization = Normalization::CurvatureMinusOne;
    Ok(model)
}

impl RootSystemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::RootSystem("rank must be at least 1".into()));
        }
        if self.roots.is_empty() {
            return Err(Error::RootSystem("no positive roots given".into()));
        }
        for (k, root) in self.roots.iter().enumerate() {
            if root.vector.len() != self.rank {
                return Err(Error::RootSystem(format!(
                    "root {k} has {} components, rank is {}",
                    root.vector.len(),
                    self.rank
                )));
            }
            if norm(&root.vector) == 0.0 || root.vector.iter().any(|x| !x.is_finite()) {
                return Err(Error::RootSystem(format!("root {k} is zero or not finite")));
            }
            if root.multiplicity == 0 {
                return Err(Error::RootSystem(format!("root {k} has zero multiplicity")));
            }
        }
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                let (a, b) = (&self.roots[i].vector, &self.roots[j].vector);
                let cos = dot(a, b) / (norm(a) * norm(b));
                if cos > 1.0 - 1e-12 {
                    return Err(Error::RootSystem(format!(
                        "roots {i} and {j} are positive multiples; use the double-root multiplicity"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Parses a `[roots]` section: one `rank = k` line and repeated
    /// `root = x1,...,xk;m;m2` lines.
    pub fn from_section(section: &Section) -> Result<Self> {
        let rank_entry = section.require("rank")?;
        let rank: usize = rank_entry.parse()?;
        let mut roots = Vec::new();
        for entry in section.all("root") {
            let parts: Vec<&str> = entry.value.split(';').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(entry.error("expected `x1,...,xk;m;m2`"));
            }
            let vector = parts[0]
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| entry.error("root components must be numbers"))?;
            let m = parts[1]
                .parse::<u32>()
                .map_err(|_| entry.error("multiplicity must be a nonnegative integer"))?;
            let m2 = parts[2]
                .parse::<u32>()
                .map_err(|_| entry.error("double multiplicity must be a nonnegative integer"))?;
            roots.push(PositiveRoot::new(vector, m, m2));
        }
        let spec = Self { rank, roots };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn build_from_roots(spec: &RootSystemSpec) -> Result<SpaceModel> {
    spec.validate()?;
    let mut rho = vec![0.0; spec.rank];
    let mut dimension = spec.rank;
    let mut m_exp = 0.0;
    let mut a_exp = 0.0;
    for root in &spec.roots {
        // ρ = ½ Σ m_α α, where the double root 2α carries weight m_{2α}.
        let weight = 0.5 * (root.multiplicity as f64 + 2.0 * root.double_multiplicity as f64);
        for (acc, x) in rho.iter_mut().zip(&root.vector) {
            *acc += weight * x;
        }
        dimension += (root.multiplicity + root.double_multiplicity) as usize;
        m_exp += root.half_total() - 1.0;
        a_exp += root.half_total();
    }
    let normals: Vec<Vec<f64>> = spec.roots.iter().map(|r| r.vector.clone()).collect();
    let rho_norm = norm(&rho);
    let rho_m = rho_min(&rho, &normals)?;
    Ok(SpaceModel {
        rank: spec.rank,
        dimension,
        rho,
        rho_norm,
        rho_m,
        m_exp,
        a_exp,
        normalization: Normalization::AsGiven,
        roots: spec.roots.clone(),
    })
}

/// Determinant by Gaussian elimination with partial pivoting.
fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let k = m.len();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut() {
            let factor = row[col] / pivot_row[col];
            for (x, &p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
        }
    }
    det
}

/// Vector orthogonal to the `k-1` given vectors in `ℝ^k`.
fn generalized_cross(rows: &[&Vec<f64>], k: usize) -> Vec<f64> {
    (0..k)
        .map(|i| {
            let minor: Vec<Vec<f64>> = rows
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if (k - 1 + i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * determinant(minor)
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Orthonormal basis of the span of `vectors` (modified Gram–Schmidt).
fn span_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
        let n = norm(&w);
        if n > 1e-10 * norm(v).max(1e-300) {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

const CONE_TOL: f64 = 1e-12;

/// Unit extreme rays of the pointed cone `{H : ⟨n_j, H⟩ ≥ 0}` whose normals
/// span the ambient space. Errors when the cone has empty interior.
fn extreme_rays(normals: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>> {
    let feasible = |v: &Vec<f64>| {
        normals
            .iter()
            .all(|n| dot(n, v) >= -CONE_TOL * norm(n) * norm(v))
    };
    let mut rays: Vec<Vec<f64>> = Vec::new();
    if k == 1 {
        for dir in [vec![1.0], vec![-1.0]] {
            if feasible(&dir) {
                rays.push(dir);
            }
        }
    } else {
        for subset in combinations(normals.len(), k - 1) {
            let rows: Vec<&Vec<f64>> = subset.iter().map(|&i| &normals[i]).collect();
            let v = generalized_cross(&rows, k);
            let len = norm(&v);
            let scale: f64 = rows.iter().map(|r| norm(r)).product();
            if len <= 1e-10 * scale {
                continue;
            }
            for sign in [1.0, -1.0] {
                let u: Vec<f64> = v.iter().map(|x| sign * x / len).collect();
                if feasible(&u) && !rays.iter().any(|r| dot(r, &u) > 1.0 - 1e-12) {
                    rays.push(u);
                }
            }
        }
    }
    if rays.is_empty() {
        return Err(Error::RootSystem("chamber has empty interior".into()));
    }
    let mut centre = vec![0.0; k];
    for r in &rays {
        for (c, x) in centre.iter_mut().zip(r) {
            *c += x;
        }
    }
    let interior = normals
        .iter()
        .all(|n| dot(n, &centre) > 1e-9 * norm(n) * norm(&centre).max(1e-300));
    if !interior {
        return Err(Error::RootSystem("chamber has empty interior".into()));
    }
    Ok(rays)
}

/// `min ⟨ρ, H⟩` over unit `H` in the closed cone `{H : ⟨n_j, H⟩ ≥ 0}`.
///
/// On the cone `H ↦ ⟨ρ, H⟩/‖H‖` is quasiconcave when `ρ` is in the dual cone,
/// so the minimum sits on an extreme ray; all candidate rays (null vectors of
/// every `rank−1` subset of walls) are enumerated exactly. If the walls do
/// not span the space the cone contains a line orthogonal to `ρ` and the
/// minimum is zero.
pub fn rho_min(rho: &[f64], normals: &[Vec<f64>]) -> Result<f64> {
    let k = rho.len();
    if k == 0 {
        return Err(Error::RootSystem("rank must be at least 1".into()));
    }
    if normals.iter().any(|n| n.len() != k) {
        return Err(Error::RootSystem("chamber normal has wrong dimension".into()));
    }
    let normals: Vec<Vec<f64>> = normals.iter().filter(|n| norm(n) > 0.0).cloned().collect();
    let rho_len = norm(rho);
    if normals.is_empty() {
        // The chamber is the whole space.
        return Ok(-rho_len);
    }
    let basis = span_basis(&normals);
    let rho_tol = 1e-9 * rho_len.max(1.0);
    if basis.len() < k {
        // Work in coordinates of span(normals); the orthogonal complement is a
        // lineality space on which ⟨ρ, ·⟩ must vanish.
        let reduced: Vec<Vec<f64>> = normals
            .iter()
            .map(|n| basis.iter().map(|b| dot(n, b)).collect())
            .collect();
        let rho_red: Vec<f64> = basis.iter().map(|b| dot(rho, b)).collect();
        if (rho_len.powi(2) - dot(&rho_red, &rho_red)).max(0.0).sqrt() > rho_tol {
            return Err(Error::RootSystem("ρ is not in the dual cone of the chamber".into()));
        }
        let rays = extreme_rays(&reduced, basis.len())?;
        if rays.iter().any(|r| dot(&rho_red, r) < -rho_tol) {
            return Err(Error::RootSystem("ρ is not in the dual cone of the chamber".into()));
        }
        return Ok(0.0);
    }
    let rays = extreme_rays(&normals, k)?;
    let min = rays
        .iter()
        .map(|r| dot(rho, r))
        .fold(f64::INFINITY, f64::min);
    if min < -rho_tol {
        return Err(Error::RootSystem("ρ is not in the dual cone of the chamber".into()));
    }
    Ok(min.max(0.0))
}

impl SpaceModel {
    /// Recomputes `ρ_m` for an explicit chamber.
    pub fn rho_min_for(&self, normals: &[Vec<f64>]) -> Result<f64> {
        rho_min(&self.rho, normals)
    }

    pub fn is_rank_one(&self) -> bool {
        self.rank == 1
    }
}

/// `s(p) = 2·min(1/p, 1/p′)`.
pub fn s_p(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain("p", p, "exponent must lie in (1, ∞)"));
    }
    let inv = 1.0 / p;
    Ok(2.0 * inv.min(1.0 - inv))
}

/// Conjugate exponent `p′ = p/(p−1)`.
pub fn conjugate(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(domain("p", p, "exponent must lie in (1, ∞)"));
    }
    Ok(p / (p - 1.0))
}

/// `a1, a3 ∈ [0,1]`, `a2 ∈ (δ, ‖ρ‖+ρ_m)` and
/// `a1·a3 ∈ [((a2−ρ_m)/‖ρ‖)², 1]`.
pub fn admissible_alpha_triple(t: &AlphaTriple, delta_gamma: f64, model: &SpaceModel) -> bool {
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    if !unit(t.a1) || !unit(t.a3) {
        return false;
    }
    if !(t.a2 > delta_gamma && t.a2 < model.rho_norm + model.rho_m) {
        return false;
    }
    if model.rho_norm <= 0.0 {
        return false;
    }
    let product = t.a1 * t.a3;
    let lower = ((t.a2 - model.rho_m) / model.rho_norm).powi(2);
    product >= lower && product <= 1.0
}
