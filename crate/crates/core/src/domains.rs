//! Integration domains: the whole space (with a truncation radius), boxes
//! and balls.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain_err, Error, Result};

/// Default truncation radius for `ℝⁿ`, enough for unit-variance Gaussians.
pub const DEFAULT_TRUNCATION: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// `ℝⁿ`, integrated over the cube `[-T, T]ⁿ`.
    FullSpace { n: usize, truncation_radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl Domain {
    pub fn full_space(n: usize, truncation_radius: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain_err("Domain", "dimension must be at least 1"));
        }
        if !(truncation_radius > 0.0) || !truncation_radius.is_finite() {
            return Err(domain_err("Domain", "truncation radius must be positive"));
        }
        Ok(Domain::FullSpace {
            n,
            truncation_radius,
        })
    }

    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(domain_err("Domain", "box bounds must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(domain_err("Domain", "box requires lo < hi on every axis"));
        }
        Ok(Domain::Box { lo, hi })
    }

    /// The unit interval, or the unit cube `(0, 1)ⁿ`.
    pub fn unit_box(n: usize) -> Self {
        Domain::Box {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
        }
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new_box(vec![a], vec![b])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(domain_err("Domain", "ball center must be nonempty"));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain_err("Domain", "ball radius must be positive"));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::FullSpace { n, .. } => *n,
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { center, .. } => center.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Domain::FullSpace { .. })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::FullSpace { .. } => true,
            Domain::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(xi, (a, b))| *xi >= *a && *xi <= *b),
            Domain::Ball { center, radius } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                d2 <= radius * radius
            }
        }
    }

    /// Euclidean diameter.
    pub fn diameter(&self) -> Result<f64> {
        match self {
            Domain::FullSpace { .. } => Err(Error::Unbounded { op: "diameter" }),
            Domain::Box { lo, hi } => Ok(lo
                .iter()
                .zip(hi)
                .map(|(a, b)| (b - a) * (b - a))
                .sum::<f64>()
                .sqrt()),
            Domain::Ball { radius, .. } => Ok(2.0 * radius),
        }
    }

    /// Lebesgue measure; for the whole space, the measure of the truncation cube.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::FullSpace {
                n,
                truncation_radius,
            } => (2.0 * truncation_radius).powi(*n as i32),
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Domain::Ball { center, radius } => {
                crate::specfun::ball_volume(center.len()).unwrap_or(f64::NAN)
                    * radius.powi(center.len() as i32)
            }
        }
    }

    /// The axis-aligned box over which quadrature runs.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::FullSpace {
                n,
                truncation_radius,
            } => (vec![-truncation_radius; *n], vec![*truncation_radius; *n]),
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// Image under `x ↦ x / s`.
    pub fn scaled_down(&self, s: f64) -> Self {
        match self {
            Domain::FullSpace { .. } => self.clone(),
            Domain::Box { lo, hi } => Domain::Box {
                lo: lo.iter().map(|a| a / s).collect(),
                hi: hi.iter().map(|b| b / s).collect(),
            },
            Domain::Ball { center, radius } => Domain::Ball {
                center: center.iter().map(|c| c / s).collect(),
                radius: radius / s,
            },
        }
    }
}

/// Result of rescaling a bounded domain to unit diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledDomain {
    /// `F⁻¹(Ω)` where `F(x̂) = R x̂`.
    pub unit: Domain,
    /// `R = diam Ω`.
    pub scale: f64,
}

impl ScaledDomain {
    /// `F(x̂) = R x̂`.
    pub fn forward(&self, x_hat: &[f64]) -> Vec<f64> {
        x_hat.iter().map(|x| self.scale * x).collect()
    }
}

/// Maps a bounded domain onto one of unit diameter via `F(x̂) = R x̂`.
pub fn scale_map(domain: &Domain) -> Result<ScaledDomain> {
    let r = domain.diameter().map_err(|_| Error::Unbounded { op: "scale_map" })?;
    Ok(ScaledDomain {
        unit: domain.scaled_down(r),
        scale: r,
    })
}

pub fn diameter(domain: &Domain) -> Result<f64> {
    domain.diameter()
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in domain literal")))
        })
        .collect()
}

impl Domain {
    /// Parses the CLI literal. `rn:T` (dimension `default_dim`) or `rn:T;n`,
    /// `box:lo,hi` or `box:lo1,hi1;lo2,hi2;…`, `ball:c1,…,cn;r`.
    pub fn parse(s: &str, default_dim: usize) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("domain `{s}` lacks `kind:` prefix")))?;
        match kind.trim() {
            "rn" => {
                let mut parts = body.split(';');
                let t = parse_list(parts.next().unwrap_or(""))?;
                let n = match parts.next() {
                    Some(n) => n
                        .trim()
                        .trim_start_matches("n=")
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad dimension in `{s}`")))?,
                    None => default_dim,
                };
                if t.len() != 1 {
                    return Err(Error::Parse(format!("`{s}`: rn takes one truncation radius")));
                }
                Domain::full_space(n, t[0])
            }
            "box" => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for axis in body.split(';') {
                    let v = parse_list(axis)?;
                    if v.len() != 2 {
                        return Err(Error::Parse(format!("`{s}`: each box axis needs lo,hi")));
                    }
                    lo.push(v[0]);
                    hi.push(v[1]);
                }
                Domain::new_box(lo, hi)
            }
            "ball" => {
                let (c, r) = body
                    .split_once(';')
                    .ok_or_else(|| Error::Parse(format!("`{s}`: ball needs center;radius")))?;
                let r = r
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad radius in `{s}`")))?;
                Domain::ball(parse_list(c)?, r)
            }
            other => Err(Error::Parse(format!("unknown domain kind `{other}`"))),
        }
    }
}

impl FromStr for Domain {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Domain::parse(s, 1)
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::FullSpace {
                n,
                truncation_radius,
            } => write!(f, "rn:{truncation_radius};{n}"),
            Domain::Box { lo, hi } => {
                let axes: Vec<String> = lo.iter().zip(hi).map(|(a, b)| format!("{a},{b}")).collect();
                write!(f, "box:{}", axes.join(";"))
            }
            Domain::Ball { center, radius } => write!(f, "ball:{};{radius}", join(center)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diameters() {
        assert_eq!(Domain::interval(0.0, 1.0).unwrap().diameter().unwrap(), 1.0);
        let sq = Domain::unit_box(2).diameter().unwrap();
        assert!((sq - 2f64.sqrt()).abs() < 1e-15);
        let b = Domain::ball(vec![0.0; 3], 2.0).unwrap();
        assert_eq!(b.diameter().unwrap(), 4.0);
        let rn = Domain::full_space(1, 8.0).unwrap();
        assert!(matches!(rn.diameter(), Err(Error::Unbounded { .. })));
    }

    #[test]
    fn scale_map_examples() {
        let s = scale_map(&Domain::interval(0.0, 2.0).unwrap()).unwrap();
        assert_eq!(s.scale, 2.0);
        assert_eq!(s.unit, Domain::interval(0.0, 1.0).unwrap());

        let s = scale_map(&Domain::ball(vec![0.0, 0.0], 1.0).unwrap()).unwrap();
        assert_eq!(s.scale, 2.0);
        assert_eq!(s.unit, Domain::ball(vec![0.0, 0.0], 0.5).unwrap());

        let s = scale_map(&Domain::unit_box(2)).unwrap();
        let r = 2f64.sqrt();
        assert!((s.scale - r).abs() < 1e-15);
        if let Domain::Box { lo, hi } = &s.unit {
            assert_eq!(lo, &vec![0.0, 0.0]);
            for h in hi {
                assert!((h - 1.0 / r).abs() < 1e-15);
            }
        } else {
            panic!("expected a box");
        }
        assert!(scale_map(&Domain::full_space(2, 8.0).unwrap()).is_err());
    }

    #[test]
    fn invalid_domains_rejected() {
        assert!(Domain::interval(1.0, 0.0).is_err());
        assert!(Domain::ball(vec![0.0], 0.0).is_err());
        assert!(Domain::full_space(0, 8.0).is_err());
        assert!(Domain::full_space(1, -1.0).is_err());
    }

    #[test]
    fn literals_parse() {
        assert_eq!("box:0,1".parse::<Domain>().unwrap(), Domain::interval(0.0, 1.0).unwrap());
        assert_eq!(
            Domain::parse("box:0,1;0,2", 1).unwrap(),
            Domain::new_box(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap()
        );
        assert_eq!("ball:0;1".parse::<Domain>().unwrap(), Domain::ball(vec![0.0], 1.0).unwrap());
        assert_eq!(Domain::parse("rn:8", 2).unwrap(), Domain::full_space(2, 8.0).unwrap());
        assert_eq!(Domain::parse("rn:6;3", 1).unwrap(), Domain::full_space(3, 6.0).unwrap());
        assert!("square:1".parse::<Domain>().is_err());
        assert!("box:0".parse::<Domain>().is_err());
        for d in [
            Domain::interval(0.0, 1.5).unwrap(),
            Domain::ball(vec![0.5, -1.0], 2.0).unwrap(),
            Domain::full_space(2, 8.0).unwrap(),
        ] {
            assert_eq!(Domain::parse(&d.to_string(), 1).unwrap(), d);
        }
    }

    #[test]
    fn contains_and_measure() {
        let b = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[0.6, 0.6]));
        assert!(!b.contains(&[0.8, 0.8]));
        assert!((b.measure() - std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(Domain::new_box(vec![0.0, 1.0], vec![2.0, 4.0]).unwrap().measure(), 6.0);
    }
}
