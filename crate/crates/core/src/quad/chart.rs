//! Parameterisations of the integration domains by a coordinate box.

use std::f64::consts::PI;

use crate::domains::Domain;

/// Maps points of a parameter box onto a domain, with the Jacobian.
#[derive(Debug, Clone)]
pub(crate) struct Chart {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    spherical: Option<Vec<f64>>,
}

impl Chart {
    pub fn for_domain(domain: &Domain) -> Self {
        match domain {
            Domain::Ball { center, radius } if center.len() >= 2 => {
                let n = center.len();
                let mut lo = vec![0.0; n];
                let mut hi = vec![PI; n];
                hi[0] = *radius;
                lo[n - 1] = 0.0;
                hi[n - 1] = 2.0 * PI;
                Chart {
                    lo,
                    hi,
                    spherical: Some(center.clone()),
                }
            }
            _ => {
                let (lo, hi) = domain.bounding_box();
                Chart {
                    lo,
                    hi,
                    spherical: None,
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    /// Writes the image of `u` into `x` and returns the Jacobian.
    pub fn map(&self, u: &[f64], x: &mut [f64]) -> f64 {
        match &self.spherical {
            None => {
                x.copy_from_slice(u);
                1.0
            }
            Some(center) => {
                let r = u[0];
                let jac_ang = unit_direction(&u[1..], x);
                for (xi, ci) in x.iter_mut().zip(center) {
                    *xi = ci + r * *xi;
                }
                r.powi(center.len() as i32 - 1) * jac_ang
            }
        }
    }

    /// Suggested number of Gauss panels along parameter axis `axis`.
    pub fn panels(&self, axis: usize, unit: f64) -> usize {
        if self.spherical.is_some() {
            return 1;
        }
        ((self.hi[axis] - self.lo[axis]) / unit).ceil().max(1.0) as usize
    }
}

/// Hyperspherical angles `φ₁…φ_{n-1}` (the last in `[0, 2π)`, others in
/// `[0, π]`) to the unit vector `ω`; returns the surface Jacobian
/// `∏_k sin^{n-1-k} φ_k`.
pub(crate) fn unit_direction(angles: &[f64], omega: &mut [f64]) -> f64 {
    let n = omega.len();
    debug_assert_eq!(angles.len() + 1, n);
    let mut sin_prod = 1.0;
    let mut jac = 1.0;
    for k in 0..n - 1 {
        let (s, c) = angles[k].sin_cos();
        omega[k] = sin_prod * c;
        sin_prod *= s;
        if k + 1 < n - 1 {
            jac *= s.powi((n - 2 - k) as i32);
        }
    }
    omega[n - 1] = sin_prod;
    jac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        let mut w = [0.0; 4];
        unit_direction(&[0.3, 1.1, 4.0], &mut w);
        let norm: f64 = w.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        let mut w2 = [0.0; 2];
        let j = unit_direction(&[0.7], &mut w2);
        assert_eq!(j, 1.0);
        assert!((w2[0] - 0.7f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn ball_chart_maps_inside() {
        let d = Domain::ball(vec![1.0, 2.0, 3.0], 0.5).unwrap();
        let c = Chart::for_domain(&d);
        let mut x = [0.0; 3];
        c.map(&[0.4, 1.0, 5.0], &mut x);
        assert!(d.contains(&x));
    }
}
