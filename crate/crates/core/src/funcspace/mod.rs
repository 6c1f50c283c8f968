//! Analytic test functions: exact evaluation, exact multi-index
//! derivatives and exact Fourier transforms.
//!
//! Every member expands to `P(x - c) · exp(-Σ aᵢ (xᵢ - cᵢ)²)` with `P` a
//! polynomial. Gaussian-class members have all `aᵢ > 0`; affine and
//! constant functions have `a = 0` and are meant for bounded domains.

mod fourier;
mod multi_index;
mod poly;
mod registry;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

pub use fourier::{fourier_transform, Transform};
pub use multi_index::MultiIndex;
pub use poly::{Coeff, Poly};
pub use registry::{closed_form_dini, closed_form_seminorm};

use crate::error::{Error, Result};
use crate::quad::DifferenceQuotient;

/// Symbolic form of a catalog member.
#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// `exp(-a |x - c|²)`.
    Gaussian { a: f64, center: Vec<f64> },
    /// `x^α exp(-a |x|²)`.
    PolyGaussian { alpha: MultiIndex, a: f64 },
    /// `c₀ + Σ cᵢ xᵢ`.
    Affine { coeffs: Vec<f64> },
    Constant { value: f64, n: usize },
    /// Factors act on consecutive blocks of coordinates.
    Product(Vec<TestFunction>),
    Derivative { alpha: MultiIndex, base: Box<TestFunction> },
}

/// Expanded form `P(x - c) exp(-Σ aᵢ (xᵢ - cᵢ)²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expanded {
    pub center: Vec<f64>,
    pub a: Vec<f64>,
    pub poly: Poly<f64>,
}

impl Expanded {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.poly.is_zero() {
            return 0.0;
        }
        let mut y = [0.0; 8];
        let mut yv;
        let y: &mut [f64] = if x.len() <= 8 {
            &mut y[..x.len()]
        } else {
            yv = vec![0.0; x.len()];
            &mut yv
        };
        let mut q = 0.0;
        for i in 0..x.len() {
            y[i] = x[i] - self.center[i];
            q += self.a[i] * y[i] * y[i];
        }
        let p = self.poly.eval(y);
        if q == 0.0 {
            p
        } else {
            p * (-q).exp()
        }
    }

    pub fn partial(&self, i: usize) -> Expanded {
        Expanded {
            center: self.center.clone(),
            a: self.a.clone(),
            poly: self.poly.gauss_partial(i, self.a[i]),
        }
    }

    pub fn derivative(&self, alpha: &MultiIndex) -> Expanded {
        let mut out = self.clone();
        for (i, &k) in alpha.0.iter().enumerate() {
            for _ in 0..k {
                out = out.partial(i);
            }
        }
        out
    }

    fn tensor(&self, other: &Expanded) -> Expanded {
        let mut center = self.center.clone();
        center.extend_from_slice(&other.center);
        let mut a = self.a.clone();
        a.extend_from_slice(&other.a);
        Expanded {
            center,
            a,
            poly: self.poly.tensor(&other.poly),
        }
    }
}

#[derive(Debug)]
struct Taylor {
    grad: Vec<Expanded>,
    hess: Vec<Expanded>,
}

/// A catalog member: symbolic descriptor plus its expansion.
#[derive(Debug, Clone)]
pub struct TestFunction {
    kind: Kind,
    expanded: Expanded,
    taylor: OnceLock<Arc<Taylor>>,
}

impl PartialEq for TestFunction {
    fn eq(&self, other: &Self) -> bool {
        self.expanded == other.expanded
    }
}

fn check_width(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Parse(format!("Gaussian width a = {a} must be positive and finite")))
    }
}

fn check_finite(xs: &[f64], what: &str) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Parse(format!("{what} must be finite")))
    }
}

impl TestFunction {
    fn from_kind(kind: Kind) -> Self {
        let expanded = match &kind {
            Kind::Gaussian { a, center } => Expanded {
                center: center.clone(),
                a: vec![*a; center.len()],
                poly: Poly::constant(center.len(), 1.0),
            },
            Kind::PolyGaussian { alpha, a } => Expanded {
                center: vec![0.0; alpha.dim()],
                a: vec![*a; alpha.dim()],
                poly: Poly::from_terms(alpha.dim(), [(alpha.0.clone(), 1.0)]),
            },
            Kind::Affine { coeffs } => {
                let n = coeffs.len() - 1;
                let mut terms = vec![(vec![0; n], coeffs[0])];
                for i in 0..n {
                    terms.push((MultiIndex::unit(n, i).0, coeffs[i + 1]));
                }
                Expanded {
                    center: vec![0.0; n],
                    a: vec![0.0; n],
                    poly: Poly::from_terms(n, terms),
                }
            }
            Kind::Constant { value, n } => Expanded {
                center: vec![0.0; *n],
                a: vec![0.0; *n],
                poly: Poly::constant(*n, *value),
            },
            Kind::Product(factors) => {
                let mut it = factors.iter();
                let first = it.next().expect("product has factors").expanded.clone();
                it.fold(first, |acc, f| acc.tensor(&f.expanded))
            }
            Kind::Derivative { alpha, base } => base.expanded.derivative(alpha),
        };
        TestFunction {
            kind,
            expanded,
            taylor: OnceLock::new(),
        }
    }

    /// `exp(-a |x - c|²)`.
    pub fn gaussian(a: f64, center: Vec<f64>) -> Result<Self> {
        check_width(a)?;
        check_finite(&center, "center")?;
        if center.is_empty() {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        Ok(Self::from_kind(Kind::Gaussian { a, center }))
    }

    /// `exp(-|x|²/2)` in dimension `n`.
    pub fn unit_gaussian(n: usize) -> Self {
        Self::gaussian(0.5, vec![0.0; n.max(1)]).expect("valid parameters")
    }

    /// `x^α exp(-a |x|²)`.
    pub fn poly_gaussian(alpha: MultiIndex, a: f64) -> Result<Self> {
        check_width(a)?;
        if alpha.dim() == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        Ok(Self::from_kind(Kind::PolyGaussian { alpha, a }))
    }

    /// `c₀ + c₁x₁ + … + c_n x_n`; `coeffs = [c₀, c₁, …, c_n]`.
    pub fn affine(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Parse("affine needs c0 and at least one slope".into()));
        }
        check_finite(&coeffs, "affine coefficients")?;
        Ok(Self::from_kind(Kind::Affine { coeffs }))
    }

    /// `v(x) = x₁` in dimension `n`.
    pub fn identity_coordinate(n: usize) -> Self {
        let mut c = vec![0.0; n.max(1) + 1];
        c[1] = 1.0;
        Self::affine(c).expect("valid coefficients")
    }

    pub fn constant(value: f64, n: usize) -> Result<Self> {
        check_finite(&[value], "constant")?;
        if n == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        Ok(Self::from_kind(Kind::Constant { value, n }))
    }

    /// Tensor product; factor `k` acts on the coordinates following those
    /// of factor `k - 1`.
    pub fn product(factors: Vec<TestFunction>) -> Result<Self> {
        let mut flat = Vec::new();
        for f in factors {
            match f.kind {
                Kind::Product(inner) => flat.extend(inner),
                _ => flat.push(f),
            }
        }
        match flat.len() {
            0 => Err(Error::Parse("empty product".into())),
            1 => Ok(flat.pop().expect("one factor")),
            _ => Ok(Self::from_kind(Kind::Product(flat))),
        }
    }

    /// `x ↦ f(R x)`.
    pub fn dilated(&self, r: f64) -> Result<TestFunction> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Parse(format!("dilation factor {r} must be positive")));
        }
        match &self.kind {
            Kind::Gaussian { a, center } => Self::gaussian(a * r * r, center.iter().map(|c| c / r).collect()),
            Kind::Affine { coeffs } => {
                let mut c = coeffs.clone();
                for ci in c.iter_mut().skip(1) {
                    *ci *= r;
                }
                Self::affine(c)
            }
            Kind::Constant { .. } => Ok(self.clone()),
            Kind::Product(factors) => Self::product(factors.iter().map(|f| f.dilated(r)).collect::<Result<_>>()?),
            _ => Err(Error::Unsupported {
                op: "dilated",
                reason: format!("{self} has no dilated form in the catalog"),
            }),
        }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn expanded(&self) -> &Expanded {
        &self.expanded
    }

    pub fn dim(&self) -> usize {
        self.expanded.dim()
    }

    /// Whether the function and all its derivatives decay like a Gaussian.
    pub fn is_gaussian_class(&self) -> bool {
        self.is_zero() || self.expanded.a.iter().all(|&a| a > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.expanded.poly.is_zero()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.expanded.eval(x))
    }

    /// `∂^α f`; nested derivatives collapse so that
    /// `derivative(derivative(f, α), β)` is `derivative(f, α + β)`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<TestFunction> {
        if alpha.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: alpha.dim(),
            });
        }
        if alpha.order() == 0 {
            return Ok(self.clone());
        }
        let (alpha, base) = match &self.kind {
            Kind::Derivative { alpha: inner, base } => (inner + alpha, base.clone()),
            _ => (alpha.clone(), Box::new(self.clone())),
        };
        Ok(Self::from_kind(Kind::Derivative { alpha, base }))
    }

    /// All `∂^α f` with `|α| = l`, in [`MultiIndex::all_of_order`] order.
    pub fn derivatives_of_order(&self, l: u32) -> Vec<(MultiIndex, TestFunction)> {
        MultiIndex::all_of_order(self.dim(), l)
            .into_iter()
            .map(|a| {
                let d = self.derivative(&a).expect("dimension matches");
                (a, d)
            })
            .collect()
    }

    fn taylor(&self) -> &Taylor {
        self.taylor.get_or_init(|| {
            let n = self.dim();
            let grad: Vec<Expanded> = (0..n).map(|i| self.expanded.partial(i)).collect();
            let mut hess = Vec::with_capacity(n * n);
            for g in &grad {
                for j in 0..n {
                    hess.push(g.partial(j));
                }
            }
            Arc::new(Taylor { grad, hess })
        })
    }

    /// Euclidean norm of the gradient at `x`.
    pub fn gradient_norm(&self, x: &[f64]) -> f64 {
        self.taylor().grad.iter().map(|g| g.eval(x).powi(2)).sum::<f64>().sqrt()
    }

    /// Rejects functions that are not square-integrable on the whole space.
    pub fn require_gaussian_class(&self, op: &'static str) -> Result<()> {
        if self.is_gaussian_class() {
            Ok(())
        } else {
            Err(Error::Unsupported {
                op,
                reason: format!("{self} is not in the Gaussian class and does not decay on the whole space"),
            })
        }
    }

    /// Parses the text form; `default_dim` sizes descriptors that do not
    /// fix their own dimension (`gauss`, `affine`, `const`).
    ///
    /// ```text
    /// gauss                        exp(-|x|²/2)
    /// gaussian:a=1;c=0.5,0         exp(-|x - c|²)
    /// polygauss:alpha=1,2;a=0.5    x y² exp(-|x|²/2)
    /// affine:0,1                   v(x) = x
    /// const:2                      v = 2
    /// gauss * affine:0,1           tensor product on consecutive axes
    /// d[1,0](gauss)                partial derivative
    /// ```
    pub fn parse(s: &str, default_dim: usize) -> Result<Self> {
        let s = s.trim();
        let factors = split_top_level(s, '*')?;
        if factors.len() > 1 {
            let parts = factors
                .into_iter()
                .map(|f| Self::parse(f, 1))
                .collect::<Result<Vec<_>>>()?;
            return Self::product(parts);
        }
        if let Some(rest) = s.strip_prefix("d[") {
            let close = rest.find(']').ok_or_else(|| Error::Parse(format!("unclosed '[' in {s:?}")))?;
            let alpha: MultiIndex = rest[..close].parse()?;
            let inner = rest[close + 1..]
                .trim()
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected d[α](f), got {s:?}")))?;
            let base = Self::parse(inner, alpha.dim())?;
            return base.derivative(&alpha);
        }
        let (name, params) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let n = default_dim.max(1);
        match name {
            "gauss" if params.is_none() => Ok(Self::unit_gaussian(n)),
            "gaussian" | "gauss" => {
                let kv = key_values(params.unwrap_or(""))?;
                let a = kv.get("a").map(|v| parse_f64(v)).transpose()?.unwrap_or(0.5);
                let center = match kv.get("c") {
                    Some(v) => parse_list(v)?,
                    None => vec![0.0; n],
                };
                Self::gaussian(a, center)
            }
            "polygauss" => {
                let kv = key_values(params.unwrap_or(""))?;
                let alpha: MultiIndex = kv
                    .get("alpha")
                    .ok_or_else(|| Error::Parse("polygauss needs alpha=".into()))?
                    .parse()?;
                let a = kv.get("a").map(|v| parse_f64(v)).transpose()?.unwrap_or(0.5);
                Self::poly_gaussian(alpha, a)
            }
            "affine" => match params {
                None => Ok(Self::identity_coordinate(n)),
                Some(p) => Self::affine(parse_list(p)?),
            },
            "const" => {
                let Some(p) = params else {
                    return Self::constant(1.0, n);
                };
                let mut parts = p.split(';');
                let value = parse_f64(parts.next().unwrap_or("1"))?;
                let mut dim = n;
                for extra in parts {
                    match extra.trim().split_once('=') {
                        Some(("n", d)) => {
                            dim = d.trim().parse().map_err(|_| Error::Parse(format!("bad dimension {d:?}")))?
                        }
                        _ => return Err(Error::Parse(format!("unknown const parameter {extra:?}"))),
                    }
                }
                Self::constant(value, dim)
            }
            _ => Err(Error::Parse(format!("unknown test function {name:?}"))),
        }
    }
}

fn split_top_level(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut depth = 0i32;
    let mut start = 0;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced brackets in {s:?}")));
                }
            }
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in {s:?}")));
    }
    out.push(s[start..].trim());
    Ok(out)
}

fn key_values(s: &str) -> Result<std::collections::BTreeMap<String, String>> {
    let mut map = std::collections::BTreeMap::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Gaussian { a, center } => write!(f, "gaussian:a={a};c={}", join(center)),
            Kind::PolyGaussian { alpha, a } => write!(f, "polygauss:alpha={alpha};a={a}"),
            Kind::Affine { coeffs } => write!(f, "affine:{}", join(coeffs)),
            Kind::Constant { value, n } => write!(f, "const:{value};n={n}"),
            Kind::Product(factors) => {
                let parts: Vec<String> = factors.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join(" * "))
            }
            Kind::Derivative { alpha, base } => write!(f, "d[{alpha}]({base})"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s, 1)
    }
}

impl DifferenceQuotient for TestFunction {
    fn dim(&self) -> usize {
        self.expanded.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.expanded.eval(x)
    }

    fn directional_derivatives(&self, x: &[f64], omega: &[f64]) -> (f64, f64) {
        let t = self.taylor();
        let n = omega.len();
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for i in 0..n {
            if omega[i] == 0.0 {
                continue;
            }
            d1 += omega[i] * t.grad[i].eval(x);
            for j in 0..n {
                if omega[j] != 0.0 {
                    d2 += omega[i] * omega[j] * t.hess[i * n + j].eval(x);
                }
            }
        }
        (d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PROBES: [f64; 7] = [-1.7, -0.9, -0.2, 0.0, 0.35, 1.0, 2.3];

    fn central(f: &TestFunction, x: &[f64], i: usize) -> f64 {
        let h = 1e-5;
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[i] += h;
        m[i] -= h;
        (f.evaluate(&p).unwrap() - f.evaluate(&m).unwrap()) / (2.0 * h)
    }

    #[test]
    fn evaluation_examples() {
        let g = TestFunction::unit_gaussian(1);
        assert_eq!(g.evaluate(&[0.0]).unwrap(), 1.0);
        assert!((g.evaluate(&[1.0]).unwrap() - 0.606_530_659_712_633_4).abs() < 1e-15);
        let v = TestFunction::identity_coordinate(1);
        assert_eq!(v.evaluate(&[0.3]).unwrap(), 0.3);
        assert!(matches!(g.evaluate(&[0.0, 1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn derivative_examples() {
        let g = TestFunction::unit_gaussian(1);
        let d = g.derivative(&MultiIndex(vec![1])).unwrap();
        assert!((d.evaluate(&[1.0]).unwrap() + 0.606_530_659_712_633_4).abs() < 1e-15);
        let v = TestFunction::identity_coordinate(1);
        assert!(v.derivative(&MultiIndex(vec![2])).unwrap().is_zero());
        let g2 = TestFunction::unit_gaussian(2);
        let dxy = g2.derivative(&MultiIndex(vec![1, 1])).unwrap();
        let want = (-1.0f64).exp();
        assert!((dxy.evaluate(&[1.0, 1.0]).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let fs = [
            TestFunction::parse("gaussian:a=0.8;c=0.3,-0.2", 2).unwrap(),
            TestFunction::parse("polygauss:alpha=2,1;a=0.5", 2).unwrap(),
            TestFunction::parse("gauss * polygauss:alpha=3;a=1.5", 2).unwrap(),
            TestFunction::parse("affine:1,2,-3", 2).unwrap(),
        ];
        for f in &fs {
            for i in 0..2 {
                let d = f.derivative(&MultiIndex::unit(2, i)).unwrap();
                for &x in &PROBES {
                    for &y in &PROBES {
                        let p = [x, y];
                        let exact = d.evaluate(&p).unwrap();
                        let fd = central(f, &p, i);
                        assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1e-2), "{f} ∂{i} at {p:?}: {exact} vs {fd}");
                    }
                }
            }
        }
    }

    #[test]
    fn nested_derivatives_collapse() {
        let f = TestFunction::parse("polygauss:alpha=1,0;a=0.7", 2).unwrap();
        let a = MultiIndex(vec![1, 0]);
        let b = MultiIndex(vec![1, 2]);
        let nested = f.derivative(&a).unwrap().derivative(&b).unwrap();
        let direct = f.derivative(&(&a + &b)).unwrap();
        assert_eq!(nested, direct);
        assert_eq!(nested.to_string(), direct.to_string());
        for &x in &PROBES {
            let p = [x, 0.5 * x + 0.1];
            assert!((nested.evaluate(&p).unwrap() - direct.evaluate(&p).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "gauss",
            "gaussian:a=1;c=0.5,0",
            "polygauss:alpha=1,2;a=0.5",
            "affine:0,1",
            "const:2",
            "gauss * affine:0,1",
            "d[1,0](gauss * gauss)",
        ] {
            let f = TestFunction::parse(s, 1).unwrap();
            let again = TestFunction::parse(&f.to_string(), 1).unwrap();
            assert_eq!(f, again, "{s} -> {f}");
        }
        assert_eq!(TestFunction::parse("gauss", 3).unwrap().dim(), 3);
        assert_eq!(TestFunction::parse("gauss * gauss", 3).unwrap().dim(), 2);
        for bad in ["sinc", "gaussian:a=-1", "d[1](gauss", "affine:1", "polygauss:a=1", "d[1,0](gauss:a=1;c=0)"] {
            assert!(TestFunction::parse(bad, 1).is_err(), "{bad}");
        }
    }

    #[test]
    fn taylor_terms_match_quotient() {
        let f = TestFunction::parse("gaussian:a=0.6;c=0.1,0.2", 2).unwrap();
        let x = [0.4, -0.3];
        let w = [0.6, 0.8];
        let r = 1e-3;
        let exact = f.difference_quotient(&x, &w, r);
        let (d1, d2) = f.directional_derivatives(&x, &w);
        assert!((exact - (d1 + 0.5 * r * d2)).abs() < 1e-6);
    }

    #[test]
    fn dilation_composes_with_scaling() {
        for s in ["gaussian:a=0.7;c=0.4,-1", "affine:1,2,-3", "gauss * affine:0,1"] {
            let f = TestFunction::parse(s, 2).unwrap();
            let g = f.dilated(2.5).unwrap();
            for &x in &PROBES {
                let p = [x, 0.3 - x];
                let q = [2.5 * p[0], 2.5 * p[1]];
                assert!((g.evaluate(&p).unwrap() - f.evaluate(&q).unwrap()).abs() < 1e-13);
            }
        }
        assert!(TestFunction::parse("polygauss:alpha=1;a=1", 1).unwrap().dilated(2.0).is_err());
    }

    #[test]
    fn gaussian_class_flags() {
        assert!(TestFunction::unit_gaussian(2).is_gaussian_class());
        assert!(!TestFunction::identity_coordinate(1).is_gaussian_class());
        assert!(!TestFunction::parse("gauss * affine:0,1", 1).unwrap().is_gaussian_class());
        assert!(TestFunction::constant(0.0, 1).unwrap().is_gaussian_class());
    }
}
