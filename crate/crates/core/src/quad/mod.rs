//! Quadrature engines: tensor Gauss–Legendre, nested adaptive
//! Gauss–Kronrod, seeded Monte Carlo, and the polar scheme for the
//! Gagliardo double integral (see [`gagliardo`]).

pub mod adaptive;
pub(crate) mod chart;
pub mod gagliardo;
pub mod gauss;
pub(crate) mod monte_carlo;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domains::Domain;
use crate::error::{domain_err, Error, Result};
use adaptive::AdaptiveOptions;
use chart::Chart;
use gauss::GaussLegendre;

pub use gagliardo::{
    integrate_difference_kernel, integrate_gagliardo_double, DifferenceQuotient, FnDifference, KernelOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadMethod {
    GaussTensor,
    Adaptive,
    MonteCarlo,
    PolarSingular,
}

impl fmt::Display for QuadMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadMethod::GaussTensor => "gauss_tensor",
            QuadMethod::Adaptive => "adaptive",
            QuadMethod::MonteCarlo => "monte_carlo",
            QuadMethod::PolarSingular => "polar_singular",
        })
    }
}

impl FromStr for QuadMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss_tensor" | "gauss" => Ok(QuadMethod::GaussTensor),
            "adaptive" => Ok(QuadMethod::Adaptive),
            "monte_carlo" | "mc" => Ok(QuadMethod::MonteCarlo),
            "polar_singular" | "polar" => Ok(QuadMethod::PolarSingular),
            other => Err(Error::Parse(format!("unknown quadrature method `{other}`"))),
        }
    }
}

/// Quadrature configuration shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    pub method: QuadMethod,
    /// Gauss points per panel, or the Monte Carlo sample count.
    pub order_or_samples: usize,
    pub seed: u64,
    pub rel_tol: f64,
}

impl QuadSpec {
    pub fn new(method: QuadMethod, order_or_samples: usize, seed: u64, rel_tol: f64) -> Result<Self> {
        let spec = QuadSpec {
            method,
            order_or_samples,
            seed,
            rel_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order_or_samples < 2 {
            return Err(domain_err("QuadSpec", "order_or_samples must be at least 2"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(domain_err("QuadSpec", format!("rel_tol = {} not in (0, 0.1]", self.rel_tol)));
        }
        Ok(())
    }

    pub fn gauss(order: usize) -> Self {
        QuadSpec {
            method: QuadMethod::GaussTensor,
            order_or_samples: order,
            seed: 0,
            rel_tol: 1e-8,
        }
    }

    pub fn polar(rel_tol: f64) -> Self {
        QuadSpec {
            method: QuadMethod::PolarSingular,
            order_or_samples: 12,
            seed: 0,
            rel_tol,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadSpec {
            method: QuadMethod::MonteCarlo,
            order_or_samples: samples,
            seed,
            rel_tol: 0.1,
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Gauss order used by deterministic inner rules (Monte Carlo specs keep
    /// a fixed modest order for their deterministic side integrals).
    pub(crate) fn gauss_order(&self) -> usize {
        match self.method {
            QuadMethod::MonteCarlo => 12,
            _ => self.order_or_samples.clamp(2, 64),
        }
    }

    pub(crate) fn adaptive_options(&self) -> AdaptiveOptions {
        AdaptiveOptions {
            abs_tol: 1e-15,
            rel_tol: self.rel_tol,
            max_intervals: 4000,
        }
    }
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec::polar(1e-8)
    }
}

/// A quadrature result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    /// Error estimate (not a guarantee): nested-rule difference for
    /// deterministic rules, standard error for Monte Carlo.
    pub err_abs: f64,
    /// Number of integrand evaluations.
    pub cost: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            value,
            err_abs: 0.0,
            cost: 0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Estimate {
            value: self.value * factor,
            err_abs: self.err_abs * factor.abs(),
            cost: self.cost,
        }
    }

    pub fn plus(self, other: Estimate) -> Self {
        Estimate {
            value: self.value + other.value,
            err_abs: self.err_abs + other.err_abs,
            cost: self.cost + other.cost,
        }
    }
}

impl std::iter::Sum for Estimate {
    fn sum<I: Iterator<Item = Estimate>>(iter: I) -> Self {
        iter.fold(Estimate::exact(0.0), Estimate::plus)
    }
}

pub(crate) fn checked(x: &[f64], v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            point: x.to_vec(),
            value: v,
        })
    }
}

/// Panel width (in domain units) of the composite Gauss rules.
pub(crate) const PANEL_WIDTH: f64 = 2.0;

/// `∫_Ω g` with the method selected by `spec`.
pub fn integrate_nd<G>(g: G, domain: &Domain, spec: &QuadSpec) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    spec.validate()?;
    let chart = Chart::for_domain(domain);
    match spec.method {
        QuadMethod::GaussTensor | QuadMethod::PolarSingular => {
            let m = spec.gauss_order();
            let hi = tensor_gauss(&g, &chart, m)?;
            let lo = tensor_gauss(&g, &chart, (m / 2).max(1))?;
            Ok(Estimate {
                value: hi.value,
                err_abs: (hi.value - lo.value).abs(),
                cost: hi.cost + lo.cost,
            })
        }
        QuadMethod::Adaptive => nested_adaptive(&g, &chart, spec.adaptive_options()),
        QuadMethod::MonteCarlo => {
            let d = chart.dim();
            let vol = chart.volume();
            let est = monte_carlo::run(spec.order_or_samples, spec.seed, |rng| {
                let mut u = vec![0.0; d];
                for (k, ui) in u.iter_mut().enumerate() {
                    *ui = chart.lo[k] + (chart.hi[k] - chart.lo[k]) * rng.random::<f64>();
                }
                let mut x = vec![0.0; d];
                let jac = chart.map(&u, &mut x);
                checked(&x, g(&x) * jac)
            })?;
            Ok(est.scaled(vol))
        }
    }
}

/// Composite tensor Gauss–Legendre with `m` points per panel.
fn tensor_gauss<G>(g: &G, chart: &Chart, m: usize) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let rule = GaussLegendre::new(m);
    let d = chart.dim();
    let axes: Vec<Vec<(f64, f64)>> = (0..d)
        .map(|k| rule.composite(chart.lo[k], chart.hi[k], chart.panels(k, PANEL_WIDTH)))
        .collect();
    let inner: usize = axes[1..].iter().map(Vec::len).product();
    let partial: Vec<Result<f64>> = axes[0]
        .par_iter()
        .map(|&(u0, w0)| {
            let mut u = vec![0.0; d];
            let mut x = vec![0.0; d];
            let mut idx = vec![0usize; d];
            u[0] = u0;
            let mut acc = 0.0;
            for _ in 0..inner {
                let mut w = w0;
                for k in 1..d {
                    let (uk, wk) = axes[k][idx[k]];
                    u[k] = uk;
                    w *= wk;
                }
                let jac = chart.map(&u, &mut x);
                acc += w * checked(&x, g(&x))? * jac;
                for k in (1..d).rev() {
                    idx[k] += 1;
                    if idx[k] < axes[k].len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut value = 0.0;
    for p in partial {
        value += p?;
    }
    Ok(Estimate {
        value,
        err_abs: 0.0,
        cost: (axes[0].len() * inner) as u64,
    })
}

/// Iterated one-dimensional adaptive integration over the chart box.
fn nested_adaptive<G>(g: &G, chart: &Chart, opts: AdaptiveOptions) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let d = chart.dim();
    let mut u = vec![0.0; d];
    let mut x = vec![0.0; d];
    let mut cost = 0u64;
    let mut err = 0.0;
    let value = nested_level(g, chart, opts, 0, &mut u, &mut x, &mut cost, &mut err)?;
    Ok(Estimate {
        value,
        err_abs: err,
        cost,
    })
}

#[allow(clippy::too_many_arguments)]
fn nested_level<G>(
    g: &G,
    chart: &Chart,
    opts: AdaptiveOptions,
    level: usize,
    u: &mut Vec<f64>,
    x: &mut Vec<f64>,
    cost: &mut u64,
    err: &mut f64,
) -> Result<f64>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let d = chart.dim();
    let inner_opts = AdaptiveOptions {
        rel_tol: opts.rel_tol * 0.1,
        ..opts
    };
    let breaks: Vec<f64> = {
        let panels = chart.panels(level, PANEL_WIDTH);
        let h = (chart.hi[level] - chart.lo[level]) / panels as f64;
        (1..panels).map(|k| chart.lo[level] + k as f64 * h).collect()
    };
    let mut inner_err = 0.0;
    let est = adaptive::integrate_with_breaks(
        |t| {
            u[level] = t;
            if level + 1 == d {
                *cost += 1;
                let jac = chart.map(u, x);
                checked(x, g(x) * jac)
            } else {
                let mut e = 0.0;
                let v = nested_level(g, chart, inner_opts, level + 1, u, x, cost, &mut e)?;
                inner_err = f64::max(inner_err, e);
                Ok(v)
            }
        },
        chart.lo[level],
        chart.hi[level],
        &breaks,
        opts,
    )?;
    *err += est.err_abs + inner_err * (chart.hi[level] - chart.lo[level]);
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_on_unit_square() {
        let est = integrate_nd(|_| 1.0, &Domain::unit_box(2), &QuadSpec::gauss(4)).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_on_truncated_line() {
        let rn = Domain::full_space(1, 8.0).unwrap();
        for spec in [QuadSpec::gauss(12), QuadSpec::polar(1e-10), QuadSpec {
            method: QuadMethod::Adaptive,
            ..QuadSpec::polar(1e-10)
        }] {
            let est = integrate_nd(|x| (-x[0] * x[0]).exp(), &rn, &spec).unwrap();
            assert!((est.value - PI.sqrt()).abs() < 1e-10, "{spec:?}: {est:?}");
        }
    }

    #[test]
    fn monte_carlo_x_squared_within_three_standard_errors() {
        let spec = QuadSpec::monte_carlo(1_000_000, 42);
        let est = integrate_nd(|x| x[0] * x[0], &Domain::unit_box(1), &spec).unwrap();
        assert!((est.value - 1.0 / 3.0).abs() < 3.0 * est.err_abs, "{est:?}");
        assert!(est.err_abs < 1e-3);
        let again = integrate_nd(|x| x[0] * x[0], &Domain::unit_box(1), &spec).unwrap();
        assert_eq!(est.value.to_bits(), again.value.to_bits());
    }

    #[test]
    fn ball_volumes() {
        for n in 1..=4 {
            let b = Domain::ball(vec![0.3; n], 1.5).unwrap();
            let est = integrate_nd(|_| 1.0, &b, &QuadSpec::gauss(10)).unwrap();
            assert!((est.value - b.measure()).abs() < 1e-10 * b.measure(), "n={n}");
        }
    }

    #[test]
    fn adaptive_2d_gaussian() {
        let spec = QuadSpec {
            method: QuadMethod::Adaptive,
            ..QuadSpec::polar(1e-8)
        };
        let rn = Domain::full_space(2, 8.0).unwrap();
        let est = integrate_nd(|x| (-(x[0] * x[0] + x[1] * x[1])).exp(), &rn, &spec).unwrap();
        assert!((est.value - PI).abs() < 1e-7, "{est:?}");
    }

    #[test]
    fn nan_reports_point() {
        let err = integrate_nd(
            |x| if x[0] > 0.5 { f64::NAN } else { 1.0 },
            &Domain::unit_box(1),
            &QuadSpec::gauss(4),
        )
        .unwrap_err();
        match err {
            Error::NonFinite { point, .. } => assert!(point[0] > 0.5),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadSpec::new(QuadMethod::GaussTensor, 1, 0, 1e-6).is_err());
        assert!(QuadSpec::new(QuadMethod::GaussTensor, 4, 0, 0.5).is_err());
        assert!(QuadSpec::new(QuadMethod::GaussTensor, 4, 0, 0.0).is_err());
        assert!(QuadSpec::new(QuadMethod::Adaptive, 4, 0, 0.1).is_ok());
    }
}
