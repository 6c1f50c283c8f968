//! Globally adaptive Gauss–Kronrod (7/15) integration on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::gauss::{WG7, WGK15, XGK15};
use super::Estimate;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn kronrod<F>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut gauss = fc * WG7[3];
    let mut kron = fc * WGK15[7];
    for j in 0..7 {
        let dx = h * XGK15[j];
        let s = f(c - dx)? + f(c + dx)?;
        kron += WGK15[j] * s;
        if j % 2 == 1 {
            gauss += WG7[j / 2] * s;
        }
    }
    Ok((kron * h, ((kron - gauss) * h).abs()))
}

/// Integrates `f` over `[a, b]` with the given breakpoints as the initial
/// partition. Subdivides the worst segment until the summed error estimate
/// drops below `max(abs_tol, rel_tol·|I|)` or the interval budget runs out.
pub fn integrate_with_breaks<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Estimate::exact(0.0));
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut points: Vec<f64> = std::iter::once(lo)
        .chain(breaks.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut cost = 0u64;
    for w in points.windows(2) {
        let (v, e) = kronrod(&mut f, w[0], w[1])?;
        cost += 15;
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            err: e,
        });
    }

    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) && heap.len() < opts.max_intervals
    {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = kronrod(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod(&mut f, mid, worst.b)?;
        cost += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }

    // Re-sum from the segments to shed the drift of the running updates.
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let err: f64 = heap.iter().map(|s| s.err).sum();
    Ok(Estimate {
        value: sign * value,
        err_abs: err,
        cost,
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    integrate_with_breaks(f, a, b, &[], opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| Ok(x * x * x - x), 0.0, 2.0, AdaptiveOptions::default()).unwrap();
        assert!((est.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let est = integrate(|x: f64| Ok(x.sqrt()), 0.0, 1.0, AdaptiveOptions::with_rel_tol(1e-12))
            .unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 1e-11, "{est:?}");
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let fwd = integrate(|x: f64| Ok(x.exp()), 0.0, 1.0, AdaptiveOptions::default()).unwrap();
        let back = integrate(|x: f64| Ok(x.exp()), 1.0, 0.0, AdaptiveOptions::default()).unwrap();
        assert_eq!(fwd.value, -back.value);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let est = integrate_with_breaks(
            |x: f64| Ok((x - 0.3).abs()),
            0.0,
            1.0,
            &[0.3],
            AdaptiveOptions::default(),
        )
        .unwrap();
        assert!((est.value - (0.045 + 0.245)).abs() < 1e-15);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(
            |x: f64| {
                if x > 0.5 {
                    Err(crate::Error::NonFinite {
                        point: vec![x],
                        value: f64::NAN,
                    })
                } else {
                    Ok(1.0)
                }
            },
            0.0,
            1.0,
            AdaptiveOptions::default(),
        );
        assert!(r.is_err());
    }
}
