//! Weighted spectral energies `∫ |ξ|^{2r} |v̂(ξ)|² dξ` and the p = 2 route to
//! the Gagliardo semi-norm,
//!
//! ```text
//!     |v|²_{σ,2,ℝⁿ} = (2π)^{-n} G_{σ,n} ∫ |ξ|^{2σ} |v̂(ξ)|² dξ .
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::domains::Domain;
use crate::error::{domain_err, Error, Result};
use crate::funcspace::{fourier_transform, MultiIndex, Poly, TestFunction, Transform};
use crate::quad::{integrate_nd, Estimate, QuadMethod, QuadSpec};
use crate::specfun::{g_closed_form, log_gamma, one_minus_sigma_times_g, sigma_times_g};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEnergy {
    pub r: f64,
    pub value: f64,
    pub estimate: Estimate,
    pub method: SpectralMethod,
}

/// `∫ |ξ|^{2r} ξ^{2β} |v̂|²` for a transform with isotropic Gaussian factor:
/// each monomial `ξ^γ` of `|Q|²` contributes
/// `∫_S ω^γ dω · ½ ∫_0^∞ ρ^{2r+|γ|+n-1} e^{-2bρ²} dρ`, with
/// `∫_S ω^γ = 2 Π Γ((γᵢ+1)/2) / Γ((|γ|+n)/2)` for even `γ` and 0 otherwise.
fn closed_form_energy(t: &Transform, b: f64, r: f64, beta: Option<&MultiIndex>) -> Result<f64> {
    let n = t.dim();
    let mut power = t.poly.abs_squared();
    if let Some(beta) = beta {
        let mono = Poly::from_terms(n, [(beta.0.iter().map(|k| 2 * k).collect(), 1.0)]);
        power = &power * &mono;
    }
    let ln_rate = (2.0 * b).ln();
    let mut total = 0.0;
    for (gamma, d) in power.terms() {
        if gamma.iter().any(|g| g % 2 == 1) {
            continue;
        }
        let order: u32 = gamma.iter().sum();
        let k = 0.5 * (2.0 * r + order as f64 + n as f64);
        let mut ln = log_gamma(k)? - k * ln_rate - log_gamma(0.5 * (order as f64 + n as f64))?;
        for &g in gamma {
            ln += log_gamma(0.5 * (g as f64 + 1.0))?;
        }
        total += d * ln.exp();
    }
    Ok(total * t.scale * t.scale)
}

/// Half-width of the ξ-box outside which the integrand is below e^{-50}
/// relative to its peak.
fn truncation_radius(t: &Transform, r: f64, extra_degree: u32) -> f64 {
    let b_min = t.b.iter().cloned().fold(f64::INFINITY, f64::min);
    let k = 2.0 * r + (2 * t.poly.degree() + 2 * extra_degree) as f64 + t.dim() as f64;
    (50f64.sqrt() + k.sqrt()) / (2.0 * b_min).sqrt()
}

fn quadrature_energy(t: &Transform, r: f64, beta: Option<&MultiIndex>, radius: f64, spec: &QuadSpec) -> Result<Estimate> {
    let n = t.dim();
    let cube = Domain::full_space(n, radius)?;
    integrate_nd(
        |xi| {
            let rho2: f64 = xi.iter().map(|x| x * x).sum();
            let w = if r == 0.0 { 1.0 } else { rho2.powf(r) };
            let m = beta.map_or(1.0, |b| b.monomial(xi).powi(2));
            w * m * t.power(xi)
        },
        &cube,
        spec,
    )
}

fn weighted_energy(
    t: &Transform,
    r: f64,
    beta: Option<&MultiIndex>,
    method: Option<SpectralMethod>,
    spec: &QuadSpec,
) -> Result<SpectralEnergy> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(domain_err("spectral_energy", format!("r = {r} must be finite and ≥ 0")));
    }
    if t.is_zero() {
        return Ok(SpectralEnergy {
            r,
            value: 0.0,
            estimate: Estimate::exact(0.0),
            method: SpectralMethod::ClosedForm,
        });
    }
    let iso = t.isotropic_width();
    let use_closed = match method {
        Some(SpectralMethod::ClosedForm) => {
            if iso.is_none() {
                return Err(Error::Unsupported {
                    op: "spectral_energy",
                    reason: "closed form needs an isotropic Gaussian factor".into(),
                });
            }
            true
        }
        Some(SpectralMethod::Quadrature) => false,
        None => iso.is_some(),
    };
    if use_closed {
        let value = closed_form_energy(t, iso.expect("checked"), r, beta)?;
        return Ok(SpectralEnergy {
            r,
            value,
            estimate: Estimate::exact(value),
            method: SpectralMethod::ClosedForm,
        });
    }
    let extra = beta.map_or(0, MultiIndex::order);
    let est = quadrature_energy(t, r, beta, truncation_radius(t, r, extra), spec)?;
    Ok(SpectralEnergy {
        r,
        value: est.value,
        estimate: est,
        method: SpectralMethod::Quadrature,
    })
}

/// `∫ |ξ|^{2r} |v̂(ξ)|² dξ`, in closed form when `v̂` has an isotropic
/// Gaussian factor and by quadrature otherwise.
pub fn spectral_energy(v: &TestFunction, r: f64, spec: &QuadSpec) -> Result<SpectralEnergy> {
    weighted_energy(&fourier_transform(v)?, r, None, None, spec)
}

/// As [`spectral_energy`] with the evaluation route forced.
pub fn spectral_energy_with(v: &TestFunction, r: f64, method: SpectralMethod, spec: &QuadSpec) -> Result<SpectralEnergy> {
    weighted_energy(&fourier_transform(v)?, r, None, Some(method), spec)
}

/// `(2π)^{-n} G_{σ,n} ∫ |ξ|^{2σ} |v̂|²`, which equals `|v|²_{σ,2,ℝⁿ}`.
pub fn gagliardo_via_spectral(v: &TestFunction, sigma: f64, spec: &QuadSpec) -> Result<f64> {
    let n = v.dim();
    let g = g_closed_form(sigma, n)?;
    let e = spectral_energy(v, sigma, spec)?;
    Ok((2.0 * PI).powi(-(n as i32)) * g * e.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub finite: bool,
    pub value: f64,
    /// ξ-truncation radius at which the doubling test settled.
    pub radius: f64,
}

/// Numerical `H̃^r` verdict: finite when doubling the ξ-truncation radius
/// changes the energy by less than `threshold` (relative).
pub fn membership_htilde(v: &TestFunction, r: f64, threshold: f64) -> Result<Membership> {
    v.require_gaussian_class("membership_htilde")?;
    let t = fourier_transform(v)?;
    doubling_verdict(&t, r, None, threshold)
}

fn doubling_verdict(t: &Transform, r: f64, beta: Option<&MultiIndex>, threshold: f64) -> Result<Membership> {
    if !(threshold > 0.0) {
        return Err(domain_err("membership", "threshold must be positive"));
    }
    if t.is_zero() {
        return Ok(Membership {
            finite: true,
            value: 0.0,
            radius: 0.0,
        });
    }
    let spec = QuadSpec::gauss(16);
    let mut radius = 2.0;
    let mut prev = quadrature_energy(t, r, beta, radius, &spec)?.value;
    for _ in 0..7 {
        radius *= 2.0;
        let cur = quadrature_energy(t, r, beta, radius, &spec)?.value;
        if !cur.is_finite() {
            break;
        }
        if (cur - prev).abs() <= threshold * cur.abs() {
            let value = match t.isotropic_width() {
                Some(b) => closed_form_energy(t, b, r, beta)?,
                None => cur,
            };
            return Ok(Membership {
                finite: true,
                value,
                radius,
            });
        }
        prev = cur;
    }
    Ok(Membership {
        finite: false,
        value: f64::INFINITY,
        radius,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeppoLeviEntry {
    pub alpha: MultiIndex,
    pub multinomial: u128,
    /// `∫ |ξ|^{2s} ξ^{2α} |v̂|²`, the `H̃^s` energy of `∂^α v`.
    pub energy: f64,
    pub finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeppoLevi {
    pub m: u32,
    pub s: f64,
    pub entries: Vec<BeppoLeviEntry>,
    pub finite: bool,
    /// `Σ_{|α|=m} binom(m, α) · energy(α)`, equal to the `H̃^{m+s}` energy.
    pub weighted_sum: f64,
}

/// `X^{m,s}` verdict: every `∂^α v` with `|α| = m` must lie in `H̃^s`.
pub fn membership_beppo_levi(v: &TestFunction, m: u32, s: f64, threshold: f64) -> Result<BeppoLevi> {
    v.require_gaussian_class("membership_beppo_levi")?;
    let t = fourier_transform(v)?;
    let mut entries = Vec::new();
    let mut weighted_sum = 0.0;
    for alpha in MultiIndex::all_of_order(v.dim(), m) {
        let verdict = doubling_verdict(&t, s, Some(&alpha), threshold)?;
        let multinomial = alpha.multinomial();
        weighted_sum += multinomial as f64 * verdict.value;
        entries.push(BeppoLeviEntry {
            alpha,
            multinomial,
            energy: verdict.value,
            finite: verdict.finite,
        });
    }
    Ok(BeppoLevi {
        m,
        s,
        finite: entries.iter().all(|e| e.finite),
        entries,
        weighted_sum,
    })
}

/// Closed-form `∫ |ξ|^{2s} ξ^{2α} |v̂|²` (Gaussian class, isotropic width).
pub fn derivative_energy(v: &TestFunction, alpha: &MultiIndex, s: f64, spec: &QuadSpec) -> Result<f64> {
    if alpha.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.dim(),
            got: alpha.dim(),
        });
    }
    Ok(weighted_energy(&fourier_transform(v)?, s, Some(alpha), None, spec)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub l: u32,
    pub sigma: f64,
    pub n: usize,
    /// `(2σ(1-σ))^{1/2} |v|_{l+σ,2} / |v|_{0,l+σ}`.
    pub ratio: f64,
    /// `2σ(1-σ)(2π)^{-n} G_{σ,n}`, the squared ratio for `l ≤ 1`.
    pub ratio_squared_at_sigma: f64,
    pub c1: f64,
    pub c2: f64,
    pub within: bool,
}

/// Extrema over σ ∈ (0, 1) of `2σ(1-σ)(2π)^{-n} G_{σ,n}`, endpoints included
/// as limits.
pub fn equivalence_envelope(n: usize) -> Result<(f64, f64)> {
    let pref = 2.0 * (2.0 * PI).powi(-(n as i32));
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let steps = 2000;
    for k in 0..=steps {
        let s = (k as f64 / steps as f64).clamp(1e-9, 1.0 - 1e-9);
        let h = if s < 0.5 {
            pref * sigma_times_g(s, n)? * (1.0 - s)
        } else {
            pref * one_minus_sigma_times_g(s, n)? * s
        };
        lo = lo.min(h);
        hi = hi.max(h);
    }
    Ok((lo, hi))
}

/// Ratio of the Gagliardo semi-norm (spectral route) to the spectral
/// semi-norm `|v|_{0,l+σ}`, with its σ-envelope `[c₁, c₂]`. For `l ≥ 2` the
/// lower bound is divided by the largest multinomial coefficient.
pub fn equivalence_check(v: &TestFunction, l: u32, sigma: f64, spec: &QuadSpec) -> Result<EquivalenceReport> {
    v.require_gaussian_class("equivalence_check")?;
    let n = v.dim();
    let g = g_closed_form(sigma, n)?;
    let plancherel = (2.0 * PI).powi(-(n as i32));
    let mut num = 0.0;
    let mut den = 0.0;
    let mut max_multi = 1u128;
    for alpha in MultiIndex::all_of_order(n, l) {
        let e = derivative_energy(v, &alpha, sigma, spec)?;
        let c = alpha.multinomial();
        max_multi = max_multi.max(c);
        num += e;
        den += c as f64 * e;
    }
    if !(den > 0.0) {
        return Err(domain_err("equivalence_check", "the spectral semi-norm vanishes"));
    }
    let base = 2.0 * sigma * (1.0 - sigma) * plancherel * g;
    let ratio = (base * num / den).sqrt();
    let (lo, hi) = equivalence_envelope(n)?;
    let c1 = (lo / max_multi as f64).sqrt();
    let c2 = hi.sqrt();
    let slack = 1e-12;
    Ok(EquivalenceReport {
        l,
        sigma,
        n,
        ratio,
        ratio_squared_at_sigma: base,
        c1,
        c2,
        within: ratio >= c1 * (1.0 - slack) && ratio <= c2 * (1.0 + slack),
    })
}

/// Quadrature spec suited to the spectral fallback.
pub fn default_quadrature() -> QuadSpec {
    QuadSpec::new(QuadMethod::Adaptive, 15, 0, 1e-10).expect("valid spec")
}
