use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use rayon::prelude::*;

use super::group::{disks_disjoint, letter_disks, Family, GroupSpec};
use super::mobius::{distance, distance_to_half_ball, Mobius, Point};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPoint {
    pub distance: f64,
    pub word_length: usize,
}

/// Distances `d(x, γy)` for all `γ` with `d ≤ r_max`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSet {
    pub x: Point,
    pub y: Point,
    pub points: Vec<OrbitPoint>,
    /// Radius below which the list is complete; `∞` for a finite group.
    pub r_max: f64,
}

/// Slack for distances that land on a cutoff up to rounding.
pub(crate) fn cutoff_slack(r: f64) -> f64 {
    1e-9 * r.max(1.0)
}

/// Upper bound on the number of words visited before giving up.
pub const WORD_CAP: usize = 5_000_000;

impl OrbitSet {
    pub fn is_exhaustive(&self) -> bool {
        self.r_max.is_infinite()
    }

    /// `d_M(x̃, ỹ)`, the smallest orbit distance.
    pub fn min_distance(&self) -> f64 {
        self.points.first().map_or(f64::INFINITY, |p| p.distance)
    }

    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.distance).collect()
    }

    /// Writes `distance,word_length` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["distance", "word_length"]).map_err(csv_err)?;
        for p in &self.points {
            w.write_record([format!("{:.16e}", p.distance), p.word_length.to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn sort_points(points: &mut [OrbitPoint]) {
    points.sort_by(|a, b| {
        a.distance
            .total_cmp(&b.distance)
            .then(a.word_length.cmp(&b.word_length))
    });
}

/// All orbit points `γy` with `d(x, γy) ≤ r_max`.
///
/// Cyclic groups use `d(x, γᵏy) ≥ |k|ℓ − d(x, y)`. Schottky and free groups
/// walk the tree of reduced words; when `y` lies outside every isometric
/// hemisphere, every word starting with letter `b` sends `y` into the
/// half-ball over the disk of `b⁻¹`, so a subtree is skipped when the
/// distance from `w⁻¹x` to that half-ball exceeds `r_max`.
pub fn enumerate_orbit(group: &GroupSpec, x: Point, y: Point, r_max: f64) -> Result<OrbitSet> {
    if !(r_max > 0.0) {
        return Err(domain("r_max", r_max, "enumeration radius must be positive"));
    }
    if !(x.h > 0.0 && y.h > 0.0) {
        return Err(domain("h", x.h.min(y.h), "basepoints must lie in the upper half-space"));
    }
    if group.dimension == 2 && (x.z.im != 0.0 || y.z.im != 0.0) {
        return Err(Error::Group("basepoints of H2 must have real z".into()));
    }
    if group.is_trivial() {
        return Ok(OrbitSet {
            x,
            y,
            points: vec![OrbitPoint {
                distance: distance(&x, &y),
                word_length: 0,
            }],
            r_max: f64::INFINITY,
        });
    }
    let mut points = match group.family {
        Family::Cyclic => enumerate_cyclic(&group.generators[0], &x, &y, r_max)?,
        Family::Schottky | Family::Free => enumerate_schottky(&group.generators, &x, &y, r_max)?,
    };
    sort_points(&mut points);
    Ok(OrbitSet {
        x,
        y,
        points,
        r_max,
    })
}

fn enumerate_cyclic(g: &Mobius, x: &Point, y: &Point, r_max: f64) -> Result<Vec<OrbitPoint>> {
    let l = g.translation_length();
    if !(l > 0.0) {
        return Err(Error::Certification(format!(
            "generator has translation length {l}; no displacement bound"
        )));
    }
    let d0 = distance(x, y);
    let keep = r_max + cutoff_slack(r_max);
    let k_max = ((r_max + d0) / l).floor() as usize + 1;
    if k_max > WORD_CAP {
        return Err(Error::Certification(format!(
            "{k_max} powers needed for translation length {l}"
        )));
    }
    let mut out = Vec::new();
    if d0 <= keep {
        out.push(OrbitPoint {
            distance: d0,
            word_length: 0,
        });
    }
    for step in [*g, g.inverse()] {
        let mut p = *y;
        for k in 1..=k_max {
            p = step.act(&p);
            let d = distance(x, &p);
            if d <= keep {
                out.push(OrbitPoint {
                    distance: d,
                    word_length: k,
                });
            }
        }
    }
    Ok(out)
}

struct Node {
    w: Mobius,
    w_inv: Mobius,
    last: usize,
    length: usize,
}

fn enumerate_schottky(gens: &[Mobius], x: &Point, y: &Point, r_max: f64) -> Result<Vec<OrbitPoint>> {
    let disks = letter_disks(gens).ok_or_else(|| {
        Error::Certification("a generator fixes ∞, so it has no isometric circle".into())
    })?;
    if !disks_disjoint(&disks) {
        return Err(Error::Certification(
            "isometric-circle disks overlap; no ping-pong certificate".into(),
        ));
    }
    let inside = |p: &Point| {
        disks
            .iter()
            .any(|&(c, r)| distance_to_half_ball(p, c, r) == 0.0)
    };
    if inside(y) {
        return Err(Error::Certification(
            "basepoint y lies inside an isometric hemisphere".into(),
        ));
    }
    // Letter 2k is generator k, letter 2k+1 its inverse; disks follow the same order.
    let letters: Vec<Mobius> = gens.iter().flat_map(|g| [*g, g.inverse()]).collect();
    let inverse_letter = |l: usize| l ^ 1;
    let keep = r_max + cutoff_slack(r_max);
    let visited = AtomicUsize::new(0);

    let prune = |w_inv: &Mobius, b: usize| -> bool {
        let (c, r): (Complex64, f64) = disks[inverse_letter(b)];
        distance_to_half_ball(&w_inv.act(x), c, r) > keep
    };

    let subtrees: Vec<Result<Vec<OrbitPoint>>> = (0..letters.len())
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            if prune(&Mobius::identity(), first) {
                return Ok(out);
            }
            let mut stack = vec![Node {
                w: letters[first],
                w_inv: letters[inverse_letter(first)],
                last: first,
                length: 1,
            }];
            while let Some(node) = stack.pop() {
                if visited.fetch_add(1, Ordering::Relaxed) >= WORD_CAP {
                    return Err(Error::Certification(format!(
                        "more than {WORD_CAP} words below R = {r_max}"
                    )));
                }
                let d = distance(x, &node.w.act(y));
                if d <= keep {
                    out.push(OrbitPoint {
                        distance: d,
                        word_length: node.length,
                    });
                }
                for b in 0..letters.len() {
                    if b == inverse_letter(node.last) || prune(&node.w_inv, b) {
                        continue;
                    }
                    stack.push(Node {
                        w: node.w * letters[b],
                        w_inv: letters[inverse_letter(b)] * node.w_inv,
                        last: b,
                        length: node.length + 1,
                    });
                }
            }
            Ok(out)
        })
        .collect();

    let mut points = Vec::new();
    let d0 = distance(x, y);
    if d0 <= keep {
        points.push(OrbitPoint {
            distance: d0,
            word_length: 0,
        });
    }
    for sub in subtrees {
        points.extend(sub?);
    }
    Ok(points)
}

/// `N(x, y, R) = #{γ : d(x, γy) ≤ R}`.
pub fn counting_function(orbit: &OrbitSet, r: f64) -> Result<usize> {
    if r > orbit.r_max {
        return Err(Error::OutsideCertifiedRange {
            radius: r,
            certified: orbit.r_max,
        });
    }
    let cut = r + cutoff_slack(r);
    Ok(orbit.points.partition_point(|p| p.distance <= cut))
}
