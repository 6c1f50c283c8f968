//! σ-sweeps toward the endpoints of (0, 1), extrapolation, and the limit
//! values predicted for them.
//!
//! Valid `(direction, k)` pairs for `σ^{1-k}(1-σ)^k |v|^p_{l+σ,p,Ω}`:
//!
//! | domain   | σ → 0⁺                | σ → 1⁻                    |
//! |----------|-----------------------|---------------------------|
//! | ℝⁿ       | k = 0, `2|S|/p ‖∂^l v‖^p` | k = 1, `K/p |∇v|^p_{l,p}` |
//! | bounded  | k = 1, Dini semi-norm | k = 1, `K/p |∇v|^p_{l,p}` |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::Domain;
use crate::error::{domain_err, Error, Result};
use crate::funcspace::TestFunction;
use crate::quad::{integrate_difference_kernel, Estimate, KernelOptions, QuadMethod, QuadSpec};
use crate::seminorms::{dini_seminorm, gagliardo_seminorm, gradient_seminorm, integer_seminorm, FracOrder};
use crate::specfun::{limit_constant, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    /// Value at the point nearest the endpoint.
    None,
    /// Least-squares line `L + a·dist` through the three points nearest the
    /// endpoint.
    Linear,
    /// Elimination of the first-order term from the two points nearest the
    /// endpoint.
    Richardson,
}

impl Extrapolation {
    pub fn default_for(direction: Direction) -> Self {
        match direction {
            Direction::ToOne => Extrapolation::Linear,
            Direction::ToZero => Extrapolation::Richardson,
        }
    }

    /// Extrapolates `(dist, value)` pairs to `dist = 0`.
    pub fn apply(self, points: &[(f64, f64)]) -> Result<f64> {
        let mut pts: Vec<(f64, f64)> = points.to_vec();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let need = match self {
            Extrapolation::None => 1,
            Extrapolation::Linear => 2,
            Extrapolation::Richardson => 2,
        };
        if pts.len() < need {
            return Err(domain_err("extrapolate", format!("need at least {need} points, got {}", pts.len())));
        }
        match self {
            Extrapolation::None => Ok(pts[0].1),
            Extrapolation::Richardson => {
                let (d2, v2) = pts[0];
                let (d1, v1) = pts[1];
                Ok((v2 * d1 - v1 * d2) / (d1 - d2))
            }
            Extrapolation::Linear => {
                let fit = &pts[..pts.len().min(3)];
                let m = fit.len() as f64;
                let sx: f64 = fit.iter().map(|p| p.0).sum();
                let sy: f64 = fit.iter().map(|p| p.1).sum();
                let sxx: f64 = fit.iter().map(|p| p.0 * p.0).sum();
                let sxy: f64 = fit.iter().map(|p| p.0 * p.1).sum();
                let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
                Ok((sy - slope * sx) / m)
            }
        }
    }
}

impl fmt::Display for Extrapolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Extrapolation::None => "none",
            Extrapolation::Linear => "linear",
            Extrapolation::Richardson => "richardson",
        })
    }
}

impl FromStr for Extrapolation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Extrapolation::None),
            "linear" => Ok(Extrapolation::Linear),
            "richardson" => Ok(Extrapolation::Richardson),
            other => Err(Error::Parse(format!("unknown extrapolation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitPoint {
    pub sigma: f64,
    /// Distance to the endpoint.
    pub dist: f64,
    pub value: f64,
    pub err_abs: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitStudy {
    pub function: String,
    pub direction: Direction,
    pub k: u32,
    pub l: u32,
    pub p: f64,
    pub domain: Domain,
    /// Whether values carry the `σ^{1-k}(1-σ)^k` prefactor.
    pub prefactor: bool,
    pub points: Vec<LimitPoint>,
    pub extrapolation: Extrapolation,
    pub extrapolated: f64,
    pub reference: f64,
    /// Relative error, or the absolute error when the reference is 0.
    pub rel_err: f64,
}

impl LimitStudy {
    pub fn sigmas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Checks the `(direction, k)` pair against the table above.
pub fn check_case(domain: &Domain, direction: Direction, k: u32) -> Result<()> {
    let ok = matches!(
        (domain.is_bounded(), direction, k),
        (false, Direction::ToZero, 0) | (_, Direction::ToOne, 1) | (true, Direction::ToZero, 1)
    );
    if ok {
        Ok(())
    } else {
        let where_ = if domain.is_bounded() { "a bounded domain" } else { "the whole space" };
        Err(Error::InvalidCase(format!(
            "({direction}, k = {k}) is not a valid limit on {where_}"
        )))
    }
}

/// `dist = 2^{-j}`, `j = 2..=8`, mapped to σ on the side of `direction`.
pub fn default_sigmas(direction: Direction) -> Vec<f64> {
    (2..=8)
        .map(|j| {
            let d = 0.5f64.powi(j);
            match direction {
                Direction::ToZero => d,
                Direction::ToOne => 1.0 - d,
            }
        })
        .collect()
}

fn dist(direction: Direction, sigma: f64) -> f64 {
    match direction {
        Direction::ToZero => sigma,
        Direction::ToOne => 1.0 - sigma,
    }
}

/// Predicted limit: `K_{p,n}/p |∇v|^p_{l,p}` as σ → 1⁻,
/// `4π^{n/2}/(pΓ(n/2)) |v|^p_{l,p}` as σ → 0⁺ on ℝⁿ, and the Dini semi-norm
/// as σ → 0⁺ on bounded domains.
pub fn reference_rhs(
    v: &TestFunction,
    l: u32,
    p: f64,
    domain: &Domain,
    direction: Direction,
    k: u32,
    spec: &QuadSpec,
) -> Result<f64> {
    check_case(domain, direction, k)?;
    let n = domain.dim();
    let integral_spec = QuadSpec::gauss(spec.order_or_samples.clamp(12, 64)).with_rel_tol(spec.rel_tol);
    match (direction, domain.is_bounded()) {
        (Direction::ToOne, _) => {
            Ok(limit_constant(direction, p, n)? * gradient_seminorm(v, l, p, domain, &integral_spec)?.value_p)
        }
        (Direction::ToZero, false) => {
            Ok(limit_constant(direction, p, n)? * integer_seminorm(v, l, p, domain, &integral_spec)?.value_p)
        }
        (Direction::ToZero, true) => Ok(dini_seminorm(v, l, p, domain, spec)?.value_p),
    }
}

/// Per-σ spec: the budget grows like `(1-σ)^{-1/2}`, capped at 64×.
fn budget_for(spec: &QuadSpec, sigma: f64) -> QuadSpec {
    let factor = (1.0 - sigma).powf(-0.5).clamp(1.0, 64.0);
    let mut s = *spec;
    s.order_or_samples = match spec.method {
        QuadMethod::MonteCarlo => (spec.order_or_samples as f64 * factor) as usize,
        _ => ((spec.order_or_samples as f64 * factor).ceil() as usize).min(64),
    };
    s
}

fn validate_sigmas(sigmas: &[f64], direction: Direction) -> Result<()> {
    if sigmas.len() < 2 {
        return Err(domain_err("limit_study", "need at least two σ values"));
    }
    for w in sigmas.windows(2) {
        if !(dist(direction, w[1]) < dist(direction, w[0])) {
            return Err(domain_err(
                "limit_study",
                format!("σ values must approach the endpoint strictly monotonically, got {} then {}", w[0], w[1]),
            ));
        }
    }
    if sigmas.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
        return Err(domain_err("limit_study", "σ values must lie in (0, 1)"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_study(
    v: &TestFunction,
    l: u32,
    p: f64,
    domain: &Domain,
    direction: Direction,
    k: u32,
    prefactor: bool,
    sigmas: &[f64],
    spec: &QuadSpec,
    extrapolation: Extrapolation,
    reference: f64,
) -> Result<LimitStudy> {
    validate_sigmas(sigmas, direction)?;
    let points: Vec<LimitPoint> = sigmas
        .par_iter()
        .map(|&sigma| {
            let d = dist(direction, sigma);
            let factor = if prefactor {
                sigma.powi(1 - k as i32) * (1.0 - sigma).powi(k as i32)
            } else {
                1.0
            };
            let res = FracOrder::new(l, sigma, p)
                .and_then(|order| gagliardo_seminorm(v, order, domain, &budget_for(spec, sigma)));
            match res {
                Ok(r) => LimitPoint {
                    sigma,
                    dist: d,
                    value: factor * r.value_p,
                    err_abs: factor * r.estimate.err_abs,
                    error: None,
                },
                Err(e) => LimitPoint {
                    sigma,
                    dist: d,
                    value: f64::NAN,
                    err_abs: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let failed = points.iter().filter(|p| p.error.is_some()).count();
    if failed * 5 > points.len() {
        return Err(Error::StudyFailed {
            failed,
            total: points.len(),
        });
    }
    let good: Vec<(f64, f64)> = points.iter().filter(|p| p.error.is_none()).map(|p| (p.dist, p.value)).collect();
    let extrapolated = extrapolation.apply(&good)?;
    let rel_err = if reference != 0.0 {
        (extrapolated - reference).abs() / reference.abs()
    } else {
        extrapolated.abs()
    };
    Ok(LimitStudy {
        function: v.to_string(),
        direction,
        k,
        l,
        p,
        domain: domain.clone(),
        prefactor,
        points,
        extrapolation,
        extrapolated,
        reference,
        rel_err,
    })
}

/// Sweeps `σ^{1-k}(1-σ)^k |v|^p_{l+σ,p,Ω}` over `sigmas` and extrapolates.
#[allow(clippy::too_many_arguments)]
pub fn limit_study(
    v: &TestFunction,
    l: u32,
    p: f64,
    domain: &Domain,
    direction: Direction,
    k: u32,
    sigmas: &[f64],
    spec: &QuadSpec,
    extrapolation: Extrapolation,
) -> Result<LimitStudy> {
    let reference = reference_rhs(v, l, p, domain, direction, k, spec)?;
    run_study(v, l, p, domain, direction, k, true, sigmas, spec, extrapolation, reference)
}

/// Sweeps the raw `|v|^p_{l+σ,p,Ω}` toward σ = 0 on a bounded domain, with
/// the Dini semi-norm as reference.
pub fn dini_limit_study(
    v: &TestFunction,
    l: u32,
    p: f64,
    domain: &Domain,
    sigmas: &[f64],
    spec: &QuadSpec,
) -> Result<LimitStudy> {
    if !domain.is_bounded() {
        return Err(Error::Unbounded { op: "dini_limit_study" });
    }
    let reference = dini_seminorm(v, l, p, domain, spec)?.value_p;
    run_study(
        v,
        l,
        p,
        domain,
        Direction::ToZero,
        1,
        false,
        sigmas,
        spec,
        Extrapolation::Richardson,
        reference,
    )
}

/// `ρ_ε(t) = ε d^{-ε} t^{ε-n}` for `t ≤ d`, else 0.
pub fn mollifier(eps: f64, d: f64, n: usize, t: f64) -> f64 {
    if t <= 0.0 || t > d {
        0.0
    } else {
        eps * d.powf(-eps) * t.powf(eps - n as f64)
    }
}

/// `∬ |v(x) - v(y)|^p / |x-y|^p ρ_ε(|x-y|)` on a bounded domain of
/// diameter `d`; tends to `K_{p,n} |∇v|^p_{0,p,Ω}` as ε → 0.
pub fn bbm_mollified_functional(v: &TestFunction, p: f64, domain: &Domain, eps: f64, spec: &QuadSpec) -> Result<Estimate> {
    if !domain.is_bounded() {
        return Err(Error::Unbounded {
            op: "bbm_mollified_functional",
        });
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(domain_err("bbm_mollified_functional", format!("ε = {eps} must be positive")));
    }
    if !(p >= 1.0) {
        return Err(domain_err("bbm_mollified_functional", format!("p = {p} must be ≥ 1")));
    }
    if v.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: v.dim(),
        });
    }
    if v.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let d = domain.diameter()?;
    // |Δ|^p |x-y|^{-p} ε d^{-ε} |x-y|^{ε-n} is the kernel with excess q = p - ε.
    let raw = integrate_difference_kernel(v, domain, p, p - eps, spec, KernelOptions::default())?;
    Ok(raw.scaled(eps * d.powf(-eps)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LateralLimits {
    /// Normalised semi-norm extrapolated as σ → 0⁺ at order `l`.
    pub right_of_l: f64,
    /// Normalised semi-norm extrapolated as σ → 1⁻ at order `l`, which
    /// approaches order `l + 1`.
    pub left_of_next: f64,
    /// `|v|^p_{l,p}` (the σ = 0 value at order `l`).
    pub integer_l: f64,
    /// `|v|^p_{l+1,p}`.
    pub integer_next: f64,
}

/// Limits of the normalised semi-norms (p-th powers) at both ends of the
/// σ-interval, next to the integer-order values they are compared with. On
/// ℝⁿ the normalisation is `σ(1-σ)`, on bounded domains `1-σ`.
pub fn lateral_limits(v: &TestFunction, l: u32, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<LateralLimits> {
    let zero_k = if domain.is_bounded() { 1 } else { 0 };
    let right = limit_study(
        v,
        l,
        p,
        domain,
        Direction::ToZero,
        zero_k,
        &default_sigmas(Direction::ToZero),
        spec,
        Extrapolation::Richardson,
    )?;
    let left = limit_study(
        v,
        l,
        p,
        domain,
        Direction::ToOne,
        1,
        &default_sigmas(Direction::ToOne),
        spec,
        Extrapolation::Linear,
    )?;
    let int_spec = QuadSpec::gauss(16);
    Ok(LateralLimits {
        right_of_l: right.extrapolated,
        left_of_next: left.extrapolated,
        integer_l: integer_seminorm(v, l, p, domain, &int_spec)?.value_p,
        integer_next: integer_seminorm(v, l + 1, p, domain, &int_spec)?.value_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive::{integrate, AdaptiveOptions};
    use std::f64::consts::PI;

    fn affine() -> TestFunction {
        TestFunction::identity_coordinate(1)
    }

    fn spec() -> QuadSpec {
        QuadSpec::polar(1e-8)
    }

    #[test]
    fn extrapolation_schemes() {
        let pts: Vec<(f64, f64)> = (2..=8).map(|j| 0.5f64.powi(j)).map(|d| (d, 3.0 + 2.0 * d)).collect();
        for e in [Extrapolation::Linear, Extrapolation::Richardson] {
            assert!((e.apply(&pts).unwrap() - 3.0).abs() < 1e-12);
        }
        assert_eq!(Extrapolation::None.apply(&pts).unwrap(), 3.0 + 2.0 * 0.5f64.powi(8));
        assert!(Extrapolation::Richardson.apply(&pts[..1]).is_err());
        assert_eq!("richardson".parse::<Extrapolation>().unwrap(), Extrapolation::Richardson);
    }

    #[test]
    fn case_table() {
        let rn = Domain::full_space(1, 8.0).unwrap();
        let unit = Domain::unit_box(1);
        assert!(check_case(&rn, Direction::ToZero, 0).is_ok());
        assert!(check_case(&rn, Direction::ToOne, 1).is_ok());
        assert!(check_case(&unit, Direction::ToZero, 1).is_ok());
        assert!(check_case(&unit, Direction::ToOne, 1).is_ok());
        assert!(matches!(check_case(&unit, Direction::ToZero, 0), Err(Error::InvalidCase(_))));
        assert!(check_case(&rn, Direction::ToOne, 0).is_err());
        assert!(check_case(&rn, Direction::ToZero, 1).is_err());
    }

    #[test]
    fn reference_examples() {
        let unit = Domain::unit_box(1);
        let r = reference_rhs(&affine(), 0, 2.0, &unit, Direction::ToOne, 1, &spec()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let g = TestFunction::unit_gaussian(1);
        let rn = Domain::full_space(1, 8.0).unwrap();
        let r0 = reference_rhs(&g, 0, 2.0, &rn, Direction::ToZero, 0, &spec()).unwrap();
        assert!((r0 - 2.0 * PI.sqrt()).abs() < 1e-10);
        let rd = reference_rhs(&affine(), 0, 2.0, &unit, Direction::ToZero, 1, &spec()).unwrap();
        assert!((rd - 1.0 / 3.0).abs() < 1e-9);
        assert!(reference_rhs(&affine(), 0, 2.0, &unit, Direction::ToZero, 0, &spec()).is_err());
    }

    #[test]
    fn affine_to_one_study() {
        let unit = Domain::unit_box(1);
        let sig = default_sigmas(Direction::ToOne);
        let s = limit_study(&affine(), 0, 2.0, &unit, Direction::ToOne, 1, &sig, &spec(), Extrapolation::Linear).unwrap();
        for p in &s.points {
            let exact = 1.0 / (3.0 - 2.0 * p.sigma);
            assert!((p.value - exact).abs() < 1e-8, "σ={} {} vs {exact}", p.sigma, p.value);
        }
        assert!(s.rel_err < 1e-3, "{s:?}");
    }

    #[test]
    fn dini_study_and_monotonicity() {
        let unit = Domain::unit_box(1);
        let sig = default_sigmas(Direction::ToZero);
        let s = dini_limit_study(&affine(), 0, 2.0, &unit, &sig, &spec()).unwrap();
        assert!(s.rel_err < 1e-3);
        // On a unit-diameter domain the raw values grow with σ.
        let vals = s.values();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        let s3 = dini_limit_study(&affine(), 0, 3.0, &unit, &sig, &spec()).unwrap();
        assert!((s3.extrapolated - 1.0 / 6.0).abs() < 1e-3);
        assert!(dini_limit_study(&affine(), 0, 2.0, &Domain::full_space(1, 8.0).unwrap(), &sig, &spec()).is_err());
    }

    #[test]
    fn constant_study_is_zero() {
        let c = TestFunction::constant(1.5, 1).unwrap();
        let unit = Domain::unit_box(1);
        let sig = default_sigmas(Direction::ToOne);
        let s = limit_study(&c, 0, 2.0, &unit, Direction::ToOne, 1, &sig, &spec(), Extrapolation::Linear).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
        assert_eq!(s.extrapolated, 0.0);
        assert_eq!(s.rel_err, 0.0);
    }

    #[test]
    fn bad_sigma_sequences_rejected() {
        let unit = Domain::unit_box(1);
        let run = |sig: &[f64]| limit_study(&affine(), 0, 2.0, &unit, Direction::ToOne, 1, sig, &spec(), Extrapolation::Linear);
        assert!(run(&[0.9, 0.8]).is_err());
        assert!(run(&[0.9, 1.0]).is_err());
        assert!(run(&[0.9]).is_err());
    }

    #[test]
    fn mollifier_has_unit_mass() {
        for (eps, d, n) in [(0.1, 1.0, 1usize), (0.5, 2.0, 2), (1.5, 0.7, 3)] {
            let mass = integrate(
                |t| Ok(mollifier(eps, d, n, t) * t.powi(n as i32 - 1)),
                0.0,
                d,
                AdaptiveOptions::default(),
            )
            .unwrap();
            assert!((mass.value - 1.0).abs() < 1e-8, "ε={eps}: {mass:?}");
        }
    }

    #[test]
    fn mollified_functional_affine() {
        let unit = Domain::unit_box(1);
        for eps in [0.5, 0.1, 0.01] {
            let f = bbm_mollified_functional(&affine(), 2.0, &unit, eps, &spec()).unwrap();
            let want = 2.0 / (1.0 + eps);
            assert!((f.value - want).abs() < 1e-7 * want, "ε={eps}: {f:?}");
        }
    }

    #[test]
    fn two_routes_to_one_agree() {
        // ε = p(1-σ): functional = p(1-σ) d^{-p(1-σ)} |v|^p_{σ,p}.
        let unit = Domain::unit_box(1);
        let sigma = 0.99;
        let p = 2.0;
        let eps = p * (1.0 - sigma);
        let f = bbm_mollified_functional(&affine(), p, &unit, eps, &spec()).unwrap().value;
        let g = gagliardo_seminorm(&affine(), FracOrder::new(0, sigma, p).unwrap(), &unit, &spec())
            .unwrap()
            .value_p;
        assert!((f - eps * g).abs() < 1e-8 * f);
        let study_value = (1.0 - sigma) * g;
        assert!(((f / p) - study_value).abs() <= 1e-3 * study_value);
    }

    #[test]
    fn additivity_over_multi_indices() {
        let g = TestFunction::unit_gaussian(1);
        let rn = Domain::full_space(1, 8.0).unwrap();
        let sig = [0.75, 0.875, 0.9375];
        let s1 = limit_study(&g, 1, 2.0, &rn, Direction::ToOne, 1, &sig, &spec(), Extrapolation::Linear).unwrap();
        let d = g.derivative(&crate::funcspace::MultiIndex(vec![1])).unwrap();
        let s0 = limit_study(&d, 0, 2.0, &rn, Direction::ToOne, 1, &sig, &spec(), Extrapolation::Linear).unwrap();
        for (a, b) in s1.points.iter().zip(&s0.points) {
            assert!((a.value - b.value).abs() <= 1e-8 * a.value.abs());
        }
    }
}
