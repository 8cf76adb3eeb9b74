use num_complex::Complex64;

use super::mobius::Mobius;
use crate::config::Section;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// One loxodromic generator.
    Cyclic,
    /// Generators pairing pairwise disjoint isometric-circle disks.
    Schottky,
    /// Free generators without a construction-time certificate; enumeration
    /// still requires the disk certificate and aborts without it.
    Free,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Family::Cyclic),
            "schottky" => Ok(Family::Schottky),
            "free" => Ok(Family::Free),
            _ => Err(Error::Group(format!("unknown family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    pub dimension: usize,
    pub generators: Vec<Mobius>,
    pub family: Family,
}

/// Isometric circles of `g` and `g⁻¹` for every generator, in letter order.
pub(crate) fn letter_disks(generators: &[Mobius]) -> Option<Vec<(Complex64, f64)>> {
    let mut disks = Vec::with_capacity(2 * generators.len());
    for g in generators {
        disks.push(g.isometric_circle()?);
        disks.push(g.inverse().isometric_circle()?);
    }
    Some(disks)
}

pub(crate) fn disks_disjoint(disks: &[(Complex64, f64)]) -> bool {
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let (c1, r1) = disks[i];
            let (c2, r2) = disks[j];
            if (c1 - c2).norm() <= r1 + r2 {
                return false;
            }
        }
    }
    true
}

impl GroupSpec {
    pub fn new(dimension: usize, generators: Vec<Mobius>, family: Family) -> Result<Self> {
        if dimension != 2 && dimension != 3 {
            return Err(Error::Group(format!("dimension {dimension} is not 2 or 3")));
        }
        for (k, g) in generators.iter().enumerate() {
            let det = g.det();
            if (det - 1.0).norm() > 1e-10 {
                return Err(Error::Group(format!("generator {k} has determinant {det}")));
            }
            if dimension == 2 && !g.is_real() {
                return Err(Error::Group(format!("generator {k} is not real")));
            }
            if matches!(family, Family::Cyclic | Family::Schottky) && !g.is_loxodromic() {
                return Err(Error::Group(format!(
                    "generator {k} is elliptic or parabolic (trace {})",
                    g.trace()
                )));
            }
        }
        match family {
            Family::Cyclic if generators.len() > 1 => {
                return Err(Error::Group("cyclic family takes one generator".into()));
            }
            Family::Schottky => {
                let disks = letter_disks(&generators)
                    .ok_or_else(|| Error::Group("generator fixes ∞ (c = 0)".into()))?;
                if !disks_disjoint(&disks) {
                    return Err(Error::Group("isometric-circle disks overlap".into()));
                }
            }
            _ => {}
        }
        Ok(Self {
            dimension,
            generators,
            family,
        })
    }

    pub fn trivial(dimension: usize) -> Result<Self> {
        Self::new(dimension, Vec::new(), Family::Cyclic)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    /// `⟨γ⟩` with `γ` translating by `l` along the axis through `j`.
    pub fn cyclic_translation(dimension: usize, l: f64) -> Result<Self> {
        Self::new(dimension, vec![Mobius::translation(l)], Family::Cyclic)
    }

    /// Real Schottky group in `H²`: generator `k` maps the exterior of the
    /// circle of radius `r` at `from` onto the interior of the circle of
    /// radius `r` at `to`.
    pub fn schottky_plane(pairs: &[(f64, f64, f64)]) -> Result<Self> {
        let gens = pairs
            .iter()
            .map(|&(from, to, r)| {
                let c = 1.0 / r;
                let d = -c * from;
                let a = c * to;
                let b = (a * d - 1.0) / c;
                Mobius::real(a, b, c, d)
            })
            .collect();
        Self::new(2, gens, Family::Schottky)
    }

    /// Parses a `[group]` section with `dimension`, `family` and repeated
    /// `generator = a,b,c,d` lines (for dimension 3 each entry is a
    /// `re,im` pair, eight numbers in all).
    pub fn from_section(section: &Section) -> Result<Self> {
        let dimension: usize = section.require("dimension")?.parse()?;
        let family: Family = match section.get("family") {
            Some(e) => e.value.parse().map_err(|_| e.error("expected cyclic, schottky or free"))?,
            None => Family::Cyclic,
        };
        let mut gens = Vec::new();
        for entry in section.all("generator") {
            let nums = entry
                .value
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| entry.error("matrix entries must be numbers"))?;
            let g = match (dimension, nums.len()) {
                (2, 4) => Mobius::real(nums[0], nums[1], nums[2], nums[3]),
                (3, 8) => {
                    let c = |k: usize| Complex64::new(nums[2 * k], nums[2 * k + 1]);
                    Mobius::new(c(0), c(1), c(2), c(3))
                }
                (3, 4) => Mobius::real(nums[0], nums[1], nums[2], nums[3]),
                _ => return Err(entry.error("wrong number of matrix entries")),
            };
            gens.push(g);
        }
        Self::new(dimension, gens, family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ConfigFile;

    #[test]
    fn schottky_construction() {
        let g = GroupSpec::schottky_plane(&[(-2.5, 2.5, 1.0), (-6.0, 6.0, 1.0)]).unwrap();
        let disks = letter_disks(&g.generators).unwrap();
        assert!((disks[0].0.re + 2.5).abs() < 1e-14);
        assert!((disks[1].0.re - 2.5).abs() < 1e-14);
        assert!((disks[0].1 - 1.0).abs() < 1e-14);
        assert!(GroupSpec::schottky_plane(&[(-1.0, 1.0, 1.0)]).is_err());
    }

    #[test]
    fn rejects_bad_generators() {
        let parabolic = Mobius::real(1.0, 1.0, 0.0, 1.0);
        assert!(GroupSpec::new(2, vec![parabolic], Family::Cyclic).is_err());
        assert!(GroupSpec::new(2, vec![Mobius::real(2.0, 0.0, 0.0, 1.0)], Family::Free).is_err());
        assert!(GroupSpec::new(4, vec![], Family::Cyclic).is_err());
        let i = Complex64::i();
        let complex = Mobius::new(i, 0.0 * i, 0.0 * i, -i);
        assert!(GroupSpec::new(2, vec![complex], Family::Free).is_err());
    }

    #[test]
    fn parses_config() {
        let cfg = ConfigFile::parse(
            "[group]\ndimension = 3\nfamily = cyclic\ngenerator = 2,0,0,0,0,0,0.5,0\n",
        )
        .unwrap();
        let g = GroupSpec::from_section(cfg.section("group").unwrap()).unwrap();
        assert_eq!(g.generators.len(), 1);
        assert!((g.generators[0].translation_length() - 2.0 * 2f64.ln()).abs() < 1e-14);
    }
}
