//! Singularity-aware quadrature for difference-kernel double integrals
//!
//! ```text
//!     I = ∬_{Ω×Ω} |f(x) - f(y)|^p / |x - y|^{n+q} dx dy ,   q < p,
//! ```
//!
//! which covers the Gagliardo semi-norm (`q = pσ`), the Dini semi-norm
//! (`q = 0`) and the mollified functional used for the σ → 1⁻ limit
//! (`q = p - ε`). With `y = x + rω` the integral becomes
//!
//! ```text
//!     I = ∫_{S^{n-1}} ∫_0^{R(ω)} r^{p-q-1} E(rω) dr dω ,
//!     E(h) = ∫_{Ω ∩ (Ω-h)} |(f(x+h) - f(x)) / |h||^p dx .
//! ```
//!
//! `E` stays bounded as `r → 0`, and the graded substitution
//! `r = R u^{1/(p-q)}` turns `r^{p-q-1} dr` into `R^{p-q}/(p-q) du`, so the
//! radial integrand in `u` is bounded at the origin for every σ. The
//! difference quotient at tiny `r` comes from a second-order Taylor
//! expansion to avoid cancellation.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::adaptive::{self, AdaptiveOptions};
use super::chart::unit_direction;
use super::gauss::GaussLegendre;
use super::{checked, monte_carlo, Estimate, QuadMethod, QuadSpec, PANEL_WIDTH};
use crate::domains::Domain;
use crate::error::{domain_err, Error, Result};
use crate::specfun::sphere_area;

/// Below this increment the difference quotient switches to Taylor form.
const TAYLOR_SWITCH: f64 = 1e-5;
/// Step of the central differences used by the default Taylor terms.
const FD_STEP: f64 = 1e-5;
/// Tensor rules with more points than this are evaluated in parallel.
const PAR_THRESHOLD: usize = 4096;

/// A function whose increments enter a difference kernel.
pub trait DifferenceQuotient: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// First and second directional derivatives at `x` along `omega`.
    /// The default uses central differences.
    fn directional_derivatives(&self, x: &[f64], omega: &[f64]) -> (f64, f64) {
        let n = x.len();
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        for k in 0..n {
            plus[k] = x[k] + FD_STEP * omega[k];
            minus[k] = x[k] - FD_STEP * omega[k];
        }
        let fp = self.value(&plus);
        let fm = self.value(&minus);
        let f0 = self.value(x);
        (
            (fp - fm) / (2.0 * FD_STEP),
            (fp - 2.0 * f0 + fm) / (FD_STEP * FD_STEP),
        )
    }

    /// `(f(x + rω) - f(x)) / r`.
    fn difference_quotient(&self, x: &[f64], omega: &[f64], r: f64) -> f64 {
        if r < TAYLOR_SWITCH {
            let (d1, d2) = self.directional_derivatives(x, omega);
            d1 + 0.5 * r * d2
        } else {
            let y: Vec<f64> = x.iter().zip(omega).map(|(a, w)| a + r * w).collect();
            (self.value(&y) - self.value(x)) / r
        }
    }
}

/// Adapter for plain closures.
pub struct FnDifference<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnDifference<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnDifference { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> DifferenceQuotient for FnDifference<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Options that do not belong in a [`QuadSpec`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KernelOptions {
    /// Integrate over `-ω` instead of `ω` (the `x ↔ y` swapped
    /// parameterisation); the result must agree within its error estimate.
    pub mirrored: bool,
    /// Restrict to `|x - y| ≤ cap`.
    pub radius_cap: Option<f64>,
}

/// `∬_{Ω×Ω} |f(x) - f(y)|^p / |x - y|^{n+pσ} dx dy` for `σ ∈ (0, 1)`, `p ≥ 1`.
pub fn integrate_gagliardo_double(
    f: &dyn DifferenceQuotient,
    domain: &Domain,
    sigma: f64,
    p: f64,
    spec: &QuadSpec,
) -> Result<Estimate> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(domain_err("integrate_gagliardo_double", format!("σ = {sigma} not in (0, 1)")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(domain_err("integrate_gagliardo_double", format!("p = {p} must be ≥ 1")));
    }
    integrate_difference_kernel(f, domain, p, p * sigma, spec, KernelOptions::default())
}

/// General form with kernel exponent `n + q`, `q < p`.
pub fn integrate_difference_kernel(
    f: &dyn DifferenceQuotient,
    domain: &Domain,
    p: f64,
    q: f64,
    spec: &QuadSpec,
    opts: KernelOptions,
) -> Result<Estimate> {
    spec.validate()?;
    let n = domain.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.dim(),
        });
    }
    if !(p - q > 0.0) {
        return Err(domain_err("difference kernel", format!("need q < p, got p = {p}, q = {q}")));
    }
    if !domain.is_bounded() && !(q > 0.0) {
        return Err(domain_err(
            "difference kernel",
            "the whole-space integral diverges for a nonpositive kernel excess",
        ));
    }
    let engine = Engine::new(f, domain, p, q, spec, opts);
    let inner = match spec.method {
        QuadMethod::MonteCarlo => engine.monte_carlo()?,
        _ => engine.deterministic()?,
    };
    Ok(inner.plus(engine.full_space_tail()?))
}

struct Engine<'a> {
    f: &'a dyn DifferenceQuotient,
    domain: &'a Domain,
    p: f64,
    q: f64,
    gamma: f64,
    spec: &'a QuadSpec,
    opts: KernelOptions,
    rule: GaussLegendre,
}

impl<'a> Engine<'a> {
    fn new(
        f: &'a dyn DifferenceQuotient,
        domain: &'a Domain,
        p: f64,
        q: f64,
        spec: &'a QuadSpec,
        opts: KernelOptions,
    ) -> Self {
        Engine {
            f,
            domain,
            p,
            q,
            gamma: p - q,
            spec,
            opts,
            rule: GaussLegendre::new(spec.gauss_order()),
        }
    }

    fn n(&self) -> usize {
        self.domain.dim()
    }

    /// Cut-off radius `R(ω)` of the radial integral along `ω`.
    fn radial_extent(&self, omega: &[f64]) -> f64 {
        let cap = self.opts.radius_cap.unwrap_or(f64::INFINITY);
        let extent = match self.domain {
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(omega)
                .filter(|(_, w)| w.abs() > 1e-300)
                .map(|((a, b), w)| (b - a) / w.abs())
                .fold(f64::INFINITY, f64::min),
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::FullSpace {
                truncation_radius, ..
            } => 2.0 * truncation_radius,
        };
        extent.min(cap)
    }

    /// Box containing every `x` that can contribute for increment `h`,
    /// plus whether points must be filtered by membership of `x` and `x+h`.
    fn x_region(&self, h: &[f64]) -> Option<(Vec<f64>, Vec<f64>, bool)> {
        match self.domain {
            Domain::Box { lo, hi } => {
                let mut a = Vec::with_capacity(lo.len());
                let mut b = Vec::with_capacity(lo.len());
                for k in 0..lo.len() {
                    let l = lo[k].max(lo[k] - h[k]);
                    let u = hi[k].min(hi[k] - h[k]);
                    if u <= l {
                        return None;
                    }
                    a.push(l);
                    b.push(u);
                }
                Some((a, b, false))
            }
            Domain::Ball { .. } => {
                let (lo, hi) = self.domain.bounding_box();
                Some((lo, hi, true))
            }
            Domain::FullSpace {
                truncation_radius: t,
                ..
            } => {
                // Bounding box of the two translated truncation cubes; the
                // integrand is negligible on its boundary.
                let a = h.iter().map(|hk| -t - hk.max(0.0)).collect();
                let b = h.iter().map(|hk| t - hk.min(0.0)).collect();
                Some((a, b, false))
            }
        }
    }

    fn point_value(&self, x: &[f64], omega: &[f64], r: f64, filter: bool) -> Result<f64> {
        if filter {
            let y: Vec<f64> = x.iter().zip(omega).map(|(a, w)| a + r * w).collect();
            if !self.domain.contains(x) || !self.domain.contains(&y) {
                return Ok(0.0);
            }
        }
        let dq = self.f.difference_quotient(x, omega, r);
        checked(x, dq.abs().powf(self.p))
    }

    /// `E(rω)` by composite tensor Gauss–Legendre over the x-region.
    fn inner_energy(&self, omega: &[f64], r: f64) -> Result<f64> {
        let h: Vec<f64> = omega.iter().map(|w| r * w).collect();
        let Some((lo, hi, filter)) = self.x_region(&h) else {
            return Ok(0.0);
        };
        let n = lo.len();
        let panel_width = if filter { PANEL_WIDTH / 4.0 } else { PANEL_WIDTH };
        let axes: Vec<Vec<(f64, f64)>> = (0..n)
            .map(|k| {
                let panels = ((hi[k] - lo[k]) / panel_width).ceil().max(1.0) as usize;
                self.rule.composite(lo[k], hi[k], panels)
            })
            .collect();
        let inner: usize = axes[1..].iter().map(Vec::len).product();
        let row = |&(x0, w0): &(f64, f64)| -> Result<f64> {
            let mut x = vec![0.0; n];
            let mut idx = vec![0usize; n];
            x[0] = x0;
            let mut acc = 0.0;
            for _ in 0..inner {
                let mut w = w0;
                for k in 1..n {
                    let (xk, wk) = axes[k][idx[k]];
                    x[k] = xk;
                    w *= wk;
                }
                acc += w * self.point_value(&x, omega, r, filter)?;
                for k in (1..n).rev() {
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Ok(acc)
        };
        let rows: Vec<Result<f64>> = if axes[0].len() * inner > PAR_THRESHOLD {
            axes[0].par_iter().map(row).collect()
        } else {
            axes[0].iter().map(row).collect()
        };
        rows.into_iter().sum()
    }

    /// `∫_0^{R(ω)} r^{p-q-1} E(rω) dr` through the graded substitution.
    fn radial(&self, omega: &[f64], opts: AdaptiveOptions) -> Result<Estimate> {
        let extent = self.radial_extent(omega);
        if !extent.is_finite() || extent <= 0.0 {
            return Ok(Estimate::exact(0.0));
        }
        let inv_gamma = 1.0 / self.gamma;
        let est = adaptive::integrate(
            |u: f64| self.inner_energy(omega, extent * u.powf(inv_gamma)),
            0.0,
            1.0,
            opts,
        )?;
        Ok(est.scaled(extent.powf(self.gamma) * inv_gamma))
    }

    fn deterministic(&self) -> Result<Estimate> {
        let n = self.n();
        let sign = if self.opts.mirrored { -1.0 } else { 1.0 };
        let radial_opts = AdaptiveOptions {
            abs_tol: 1e-15,
            rel_tol: self.spec.rel_tol,
            max_intervals: 4000,
        };
        match n {
            // E(h) = E(-h): one direction with weight |S⁰| = 2.
            1 => Ok(self.radial(&[sign], radial_opts)?.scaled(2.0)),
            2 => {
                // θ ∈ [0, π) doubled; breaks where R(θ) has kinks.
                let mut breaks = Vec::new();
                if let Domain::Box { lo, hi } = self.domain {
                    let c = (hi[1] - lo[1]).atan2(hi[0] - lo[0]);
                    breaks.extend([c, PI - c, 0.5 * PI]);
                }
                let offset = if self.opts.mirrored { PI } else { 0.0 };
                let inner_opts = AdaptiveOptions {
                    rel_tol: self.spec.rel_tol * 0.1,
                    ..radial_opts
                };
                let mut inner_err = 0.0;
                let mut cost = 0u64;
                let outer = adaptive::integrate_with_breaks(
                    |theta: f64| {
                        let t = theta + offset;
                        let omega = [t.cos(), t.sin()];
                        let e = self.radial(&omega, inner_opts)?;
                        inner_err += e.err_abs;
                        cost += e.cost;
                        Ok(e.value)
                    },
                    0.0,
                    PI,
                    &breaks,
                    radial_opts,
                )?;
                let evals = (outer.cost.max(1)) as f64;
                Ok(Estimate {
                    value: 2.0 * outer.value,
                    err_abs: 2.0 * (outer.err_abs + PI * inner_err / evals),
                    cost,
                })
            }
            _ => {
                // Product Gauss rule over the hyperspherical angles.
                let m = self.spec.gauss_order();
                let gl = GaussLegendre::new(m);
                let mut axes: Vec<Vec<(f64, f64)>> = (0..n - 2).map(|_| gl.mapped(0.0, PI).collect()).collect();
                axes.push(gl.composite(0.0, 2.0 * PI, 4));
                let total: usize = axes.iter().map(Vec::len).product();
                let parts: Vec<Result<Estimate>> = (0..total)
                    .into_par_iter()
                    .map(|mut flat| {
                        let mut angles = vec![0.0; n - 1];
                        let mut w = 1.0;
                        for k in (0..n - 1).rev() {
                            let len = axes[k].len();
                            let (a, wk) = axes[k][flat % len];
                            flat /= len;
                            angles[k] = a;
                            w *= wk;
                        }
                        let mut omega = vec![0.0; n];
                        let jac = unit_direction(&angles, &mut omega);
                        for o in omega.iter_mut() {
                            *o *= sign;
                        }
                        Ok(self.radial(&omega, radial_opts)?.scaled(w * jac))
                    })
                    .collect();
                parts.into_iter().sum()
            }
        }
    }

    fn monte_carlo(&self) -> Result<Estimate> {
        let n = self.n();
        let area = sphere_area(n)?;
        let inv_gamma = 1.0 / self.gamma;
        let sign = if self.opts.mirrored { -1.0 } else { 1.0 };
        monte_carlo::run(self.spec.order_or_samples, self.spec.seed, |rng| {
            let mut omega = vec![0.0; n];
            if n == 1 {
                omega[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
            } else {
                let mut norm2 = 0.0;
                while norm2 < 1e-24 {
                    norm2 = 0.0;
                    for o in omega.iter_mut() {
                        *o = gaussian(rng);
                        norm2 += *o * *o;
                    }
                }
                let inv = norm2.sqrt().recip();
                for o in omega.iter_mut() {
                    *o *= inv;
                }
            }
            for o in omega.iter_mut() {
                *o *= sign;
            }
            let extent = self.radial_extent(&omega);
            if !extent.is_finite() {
                return Ok(0.0);
            }
            let u: f64 = 1.0 - rng.random::<f64>();
            let r = extent * u.powf(inv_gamma);
            let h: Vec<f64> = omega.iter().map(|w| r * w).collect();
            let Some((lo, hi, filter)) = self.x_region(&h) else {
                return Ok(0.0);
            };
            let mut x = vec![0.0; n];
            let mut vol = 1.0;
            for k in 0..n {
                x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                vol *= hi[k] - lo[k];
            }
            let v = self.point_value(&x, &omega, r, filter)?;
            Ok(area * extent.powf(self.gamma) * inv_gamma * vol * v)
        })
    }

    /// Analytic contribution of `|h| > H` on the whole space, where the two
    /// translates no longer overlap and `E(h) |h|^p = 2‖f‖_p^p`.
    fn full_space_tail(&self) -> Result<Estimate> {
        let Domain::FullSpace {
            truncation_radius: t,
            n,
        } = self.domain
        else {
            return Ok(Estimate::exact(0.0));
        };
        if self.opts.radius_cap.is_some() {
            return Err(domain_err("difference kernel", "a radius cap is only supported on bounded domains"));
        }
        let big_h = 2.0 * t;
        let cube = Domain::full_space(*n, *t)?;
        let norm = super::integrate_nd(
            |x| self.f.value(x).abs().powf(self.p),
            &cube,
            &QuadSpec::gauss(self.spec.gauss_order().max(8)),
        )?;
        let factor = sphere_area(*n)? * big_h.powf(-self.q) / self.q;
        // Residual overlap at the cut-off, probed along e₁.
        let mut e1 = vec![0.0; *n];
        e1[0] = 1.0;
        let at_cut = self.inner_energy(&e1, big_h)? * big_h.powf(self.p);
        let overlap = (at_cut - 2.0 * norm.value).abs();
        Ok(Estimate {
            value: 2.0 * norm.value * factor,
            err_abs: (overlap + 2.0 * norm.err_abs) * factor,
            cost: norm.cost,
        })
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine() -> FnDifference<impl Fn(&[f64]) -> f64 + Sync> {
        FnDifference::new(1, |x: &[f64]| x[0])
    }

    fn analytic_affine(sigma: f64, p: f64) -> f64 {
        // ∬_{(0,1)²} |x-y|^{p-1-pσ} = 2/(γ(γ+1)), γ = p(1-σ)
        let g = p * (1.0 - sigma);
        2.0 / (g * (g + 1.0))
    }

    #[test]
    fn affine_unit_interval() {
        let d = Domain::unit_box(1);
        for (s, want) in [(0.5, 1.0), (0.25, 2.0 / (1.5 * 2.5))] {
            let est = integrate_gagliardo_double(&affine(), &d, s, 2.0, &QuadSpec::polar(1e-10)).unwrap();
            assert!((est.value - want).abs() < 1e-10, "σ={s}: {est:?}");
        }
        for s in [0.05, 0.7, 0.9, 0.99, 0.999] {
            for p in [1.0, 2.0, 3.0] {
                let est = integrate_gagliardo_double(&affine(), &d, s, p, &QuadSpec::polar(1e-10)).unwrap();
                let want = analytic_affine(s, p);
                assert!((est.value - want).abs() < 1e-9 * want, "σ={s} p={p}: {est:?} vs {want}");
            }
        }
    }

    #[test]
    fn gaussian_on_line_sigma_half() {
        let g = FnDifference::new(1, |x: &[f64]| (-0.5 * x[0] * x[0]).exp());
        let d = Domain::full_space(1, 8.0).unwrap();
        let est = integrate_gagliardo_double(&g, &d, 0.5, 2.0, &QuadSpec::polar(1e-9)).unwrap();
        assert!((est.value - 2.0 * PI).abs() < 1e-7 * 2.0 * PI, "{est:?}");
    }

    #[test]
    fn constant_has_zero_seminorm() {
        let c = FnDifference::new(2, |_: &[f64]| 3.0);
        for d in [Domain::unit_box(2), Domain::ball(vec![0.0, 0.0], 1.0).unwrap()] {
            let est = integrate_gagliardo_double(&c, &d, 0.4, 2.0, &QuadSpec::polar(1e-6)).unwrap();
            assert!(est.value.abs() < 1e-12, "{est:?}");
        }
    }

    #[test]
    fn argument_validation() {
        let d = Domain::unit_box(1);
        assert!(integrate_gagliardo_double(&affine(), &d, 0.0, 2.0, &QuadSpec::default()).is_err());
        assert!(integrate_gagliardo_double(&affine(), &d, 1.0, 2.0, &QuadSpec::default()).is_err());
        assert!(integrate_gagliardo_double(&affine(), &d, 0.5, 0.5, &QuadSpec::default()).is_err());
        let d2 = Domain::unit_box(2);
        assert!(matches!(
            integrate_gagliardo_double(&affine(), &d2, 0.5, 2.0, &QuadSpec::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let rn = Domain::full_space(1, 8.0).unwrap();
        assert!(integrate_difference_kernel(&affine(), &rn, 2.0, 0.0, &QuadSpec::default(), KernelOptions::default()).is_err());
    }

    #[test]
    fn mirrored_parameterisation_agrees() {
        let f = FnDifference::new(2, |x: &[f64]| x[0] * x[0] + 0.5 * x[1]);
        let d = Domain::new_box(vec![0.0, 0.0], vec![1.0, 0.5]).unwrap();
        let spec = QuadSpec::polar(1e-6);
        let a = integrate_difference_kernel(&f, &d, 2.0, 1.0, &spec, KernelOptions::default()).unwrap();
        let b = integrate_difference_kernel(&f, &d, 2.0, 1.0, &spec, KernelOptions { mirrored: true, ..Default::default() }).unwrap();
        assert!((a.value - b.value).abs() <= a.err_abs + b.err_abs + 1e-9 * a.value, "{a:?} {b:?}");
    }

    #[test]
    fn two_dimensional_affine_box() {
        // v = x₁ on (0,1)²: by Fubini the 4-D integral is
        // ∬ |x₁-y₁|² / |x-y|^{2+2σ}; compare against Monte Carlo.
        let f = FnDifference::new(2, |x: &[f64]| x[0]);
        let d = Domain::unit_box(2);
        let det = integrate_gagliardo_double(&f, &d, 0.5, 2.0, &QuadSpec::polar(1e-7)).unwrap();
        let mc = integrate_gagliardo_double(&f, &d, 0.5, 2.0, &QuadSpec::monte_carlo(400_000, 3)).unwrap();
        assert!((det.value - mc.value).abs() < 4.0 * mc.err_abs, "{det:?} {mc:?}");
    }
}
