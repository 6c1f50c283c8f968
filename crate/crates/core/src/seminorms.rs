//! Integer, gradient, Gagliardo and Dini semi-norms, the averaged modulus
//! of smoothness, and the normalised fractional semi-norms.
//!
//! Results carry the p-th power `|v|^p` as the primary value.

use std::fmt;

use serde::Serialize;

use crate::domains::Domain;
use crate::error::{domain_err, Error, Result};
use crate::funcspace::TestFunction;
use crate::quad::adaptive::{self, AdaptiveOptions};
use crate::quad::{
    integrate_difference_kernel, integrate_gagliardo_double, integrate_nd, Estimate, KernelOptions, QuadSpec,
};
use crate::specfun::lambda_norm;

/// `r = l + σ` together with the exponent `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracOrder {
    pub l: u32,
    pub sigma: f64,
    pub p: f64,
}

impl FracOrder {
    pub fn new(l: u32, sigma: f64, p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&sigma) {
            return Err(domain_err("FracOrder", format!("σ = {sigma} not in [0, 1)")));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(domain_err("FracOrder", format!("p = {p} must be a finite number ≥ 1")));
        }
        Ok(FracOrder { l, sigma, p })
    }

    /// Splits `r` into `⌊r⌋` and `r - ⌊r⌋`.
    pub fn from_r(r: f64, p: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() || r > u32::MAX as f64 {
            return Err(domain_err("FracOrder", format!("order r = {r} must be finite and ≥ 0")));
        }
        let l = r.floor();
        Self::new(l as u32, r - l, p)
    }

    pub fn r(&self) -> f64 {
        self.l as f64 + self.sigma
    }
}

impl fmt::Display for FracOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={},p={}", self.r(), self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeminormKind {
    Integer,
    Gradient,
    Gagliardo,
    Dini,
    NormalizedLambda,
    NormalizedOneMinusSigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `(σ(1-σ))^{1/p}`, and 1 at σ = 0.
    Lambda,
    /// `(1-σ)^{1/p}`, for bounded domains.
    OneMinusSigma,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeminormResult {
    /// `|v|^p`.
    pub value_p: f64,
    /// `|v|`.
    pub value: f64,
    pub estimate: Estimate,
    pub order: FracOrder,
    pub domain: Domain,
    pub kind: SeminormKind,
}

impl SeminormResult {
    fn new(estimate: Estimate, order: FracOrder, domain: &Domain, kind: SeminormKind) -> Self {
        // Round-off can push a vanishing value slightly negative.
        let value_p = estimate.value.max(0.0);
        SeminormResult {
            value_p,
            value: value_p.powf(1.0 / order.p),
            estimate,
            order,
            domain: domain.clone(),
            kind,
        }
    }
}

fn check_input(v: &TestFunction, domain: &Domain, op: &'static str) -> Result<()> {
    if v.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: v.dim(),
        });
    }
    if !domain.is_bounded() {
        v.require_gaussian_class(op)?;
    }
    Ok(())
}

fn check_p(p: f64, op: &'static str) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(domain_err(op, format!("p = {p} must be a finite number ≥ 1")))
    }
}

/// `Σ_{|α|=j} ∫_Ω |∂^α v|^p`.
pub fn integer_seminorm(v: &TestFunction, j: u32, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<SeminormResult> {
    check_p(p, "integer_seminorm")?;
    check_input(v, domain, "integer_seminorm")?;
    let mut total = Estimate::exact(0.0);
    for (_, d) in v.derivatives_of_order(j) {
        if d.is_zero() {
            continue;
        }
        let e = d.expanded();
        total = total.plus(integrate_nd(|x| e.eval(x).abs().powf(p), domain, spec)?);
    }
    Ok(SeminormResult::new(total, FracOrder::new(j, 0.0, p)?, domain, SeminormKind::Integer))
}

/// `Σ_{|α|=j} ∫_Ω |∇∂^α v|^p` with the Euclidean norm of the gradient.
pub fn gradient_seminorm(v: &TestFunction, j: u32, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<SeminormResult> {
    check_p(p, "gradient_seminorm")?;
    check_input(v, domain, "gradient_seminorm")?;
    let mut total = Estimate::exact(0.0);
    for (_, d) in v.derivatives_of_order(j) {
        if d.is_zero() {
            continue;
        }
        total = total.plus(integrate_nd(|x| d.gradient_norm(x).powf(p), domain, spec)?);
    }
    Ok(SeminormResult::new(total, FracOrder::new(j, 0.0, p)?, domain, SeminormKind::Gradient))
}

/// `Σ_{|α|=l} ∬ |∂^α v(x) - ∂^α v(y)|^p / |x-y|^{n+pσ}`.
pub fn gagliardo_seminorm(v: &TestFunction, order: FracOrder, domain: &Domain, spec: &QuadSpec) -> Result<SeminormResult> {
    if order.sigma <= 0.0 {
        return Err(domain_err("gagliardo_seminorm", "σ must be positive; use integer_seminorm for σ = 0"));
    }
    check_input(v, domain, "gagliardo_seminorm")?;
    let mut total = Estimate::exact(0.0);
    for (_, d) in v.derivatives_of_order(order.l) {
        if d.is_zero() {
            continue;
        }
        total = total.plus(integrate_gagliardo_double(&d, domain, order.sigma, order.p, spec)?);
    }
    Ok(SeminormResult::new(total, order, domain, SeminormKind::Gagliardo))
}

fn require_bounded(domain: &Domain, op: &'static str) -> Result<()> {
    if domain.is_bounded() {
        Ok(())
    } else {
        Err(Error::Unbounded { op })
    }
}

/// `Σ_{|α|=l} ∬ |∂^α v(x) - ∂^α v(y)|^p / |x-y|^n` on a bounded domain.
pub fn dini_seminorm(v: &TestFunction, l: u32, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<SeminormResult> {
    require_bounded(domain, "dini_seminorm")?;
    check_p(p, "dini_seminorm")?;
    check_input(v, domain, "dini_seminorm")?;
    let mut total = Estimate::exact(0.0);
    for (_, d) in v.derivatives_of_order(l) {
        if d.is_zero() {
            continue;
        }
        total = total.plus(integrate_difference_kernel(&d, domain, p, 0.0, spec, KernelOptions::default())?);
    }
    Ok(SeminormResult::new(total, FracOrder::new(l, 0.0, p)?, domain, SeminormKind::Dini))
}

/// `ω̄(v, t)_p^p = t^{-n} ∫_{|h| ≤ t} ‖Δ_h v‖^p_{0,p,Ω} dh`, with `Δ_h v(x) = 0`
/// when `x + h ∉ Ω`.
pub fn averaged_modulus(v: &TestFunction, t: f64, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<Estimate> {
    require_bounded(domain, "averaged_modulus")?;
    check_p(p, "averaged_modulus")?;
    check_input(v, domain, "averaged_modulus")?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain_err("averaged_modulus", format!("t = {t} must be positive")));
    }
    if v.is_zero() {
        return Ok(Estimate::exact(0.0));
    }
    let n = domain.dim() as f64;
    // r^{n-1} dr |Δ_h v|^p = r^{p-q-1} |Δ_h v / r|^p dr with q = -n.
    let opts = KernelOptions {
        radius_cap: Some(t),
        ..Default::default()
    };
    Ok(integrate_difference_kernel(v, domain, p, -n, spec, opts)?.scaled(t.powf(-n)))
}

/// `n ∫_0^∞ ω̄(∂^α v, t)_p^p dt / t` summed over `|α| = l`. For `t ≥ D = diam Ω`
/// the modulus is `ω̄(D) (D/t)^n`, so the tail contributes exactly `ω̄(D)`.
pub fn dini_via_modulus(v: &TestFunction, l: u32, p: f64, domain: &Domain, spec: &QuadSpec) -> Result<Estimate> {
    require_bounded(domain, "dini_via_modulus")?;
    check_p(p, "dini_via_modulus")?;
    check_input(v, domain, "dini_via_modulus")?;
    let diam = domain.diameter()?;
    let n = domain.dim() as f64;
    let inner_spec = spec.with_rel_tol(spec.rel_tol * 0.1);
    let breaks: Vec<f64> = (1..=24).rev().map(|k| diam * 0.5f64.powi(k)).collect();
    let opts = AdaptiveOptions {
        abs_tol: 1e-14,
        rel_tol: spec.rel_tol,
        max_intervals: 400,
    };
    let mut total = Estimate::exact(0.0);
    for (_, d) in v.derivatives_of_order(l) {
        if d.is_zero() {
            continue;
        }
        let body = adaptive::integrate_with_breaks(
            |t| Ok(averaged_modulus(&d, t, p, domain, &inner_spec)?.value / t),
            0.0,
            diam,
            &breaks,
            opts,
        )?;
        let tail = averaged_modulus(&d, diam, p, domain, &inner_spec)?;
        total = total.plus(body.scaled(n)).plus(tail);
    }
    Ok(total)
}

/// `λ_{σ,p} |v|_{r,p,ℝⁿ}` or `(1-σ)^{1/p} |v|_{r,p,Ω}`.
pub fn normalized_seminorm(
    v: &TestFunction,
    order: FracOrder,
    domain: &Domain,
    flavor: Normalization,
    spec: &QuadSpec,
) -> Result<SeminormResult> {
    let p = order.p;
    let (factor_p, kind) = match flavor {
        Normalization::Lambda => (lambda_norm(order.sigma, p)?.powf(p), SeminormKind::NormalizedLambda),
        Normalization::OneMinusSigma => {
            require_bounded(domain, "normalized_seminorm")?;
            (1.0 - order.sigma, SeminormKind::NormalizedOneMinusSigma)
        }
    };
    let raw = if order.sigma == 0.0 {
        integer_seminorm(v, order.l, p, domain, spec)?
    } else {
        gagliardo_seminorm(v, order, domain, spec)?
    };
    Ok(SeminormResult::new(raw.estimate.scaled(factor_p), order, domain, kind))
}
