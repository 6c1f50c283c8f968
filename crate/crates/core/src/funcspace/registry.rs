//! Hand-derived semi-norm values used as oracles. Lookups for entries that
//! are not derived here return `None`, never an approximation.
//!
//! Gaussian `g = exp(-a|x-c|²)` on ℝⁿ, `p = 2`:
//!
//! ```text
//! |g|²_{0,2}   = (π/(2a))^{n/2}                      (general p: (π/(pa))^{n/2})
//! |g|²_{1,2}   = n a (π/(2a))^{n/2}
//! |g|²_{σ,2}   = G_{σ,n} π^{n/2} Γ(σ+n/2)/Γ(n/2) (2a)^{σ-n/2}
//! |g|²_{1+σ,2} = G_{σ,n} π^{n/2} Γ(σ+1+n/2)/Γ(n/2) (2a)^{σ+1-n/2}
//! ```
//!
//! the fractional lines from `ĝ = (π/a)^{n/2} e^{-|ξ|²/(4a)}` and the
//! radial integral `∫|ξ|^{2s} e^{-|ξ|²/(2a)} dξ = |S| (2a)^{s+n/2} Γ(s+n/2)/2`.
//!
//! Affine `c₀ + c₁x` on an interval of length `L`, with
//! `∬|x-y|^{γ-1} = 2L^{γ+1}/(γ(γ+1))`:
//!
//! ```text
//! |v|^p_{σ,p}    = |c₁|^p 2L^{γ+1}/(γ(γ+1)),  γ = p(1-σ)
//! |v|^p_{Dini(p)} = |c₁|^p 2L^{p+1}/(p(p+1))
//! |v|^p_{1,p}    = Σ|cᵢ|^p vol(Ω)               (any box)
//! ```

use std::f64::consts::PI;

use super::{Kind, TestFunction};
use crate::domains::Domain;
use crate::specfun::{g_closed_form, gamma};

/// Exact `|f|^p_{r,p,Ω}` when the registry has it.
pub fn closed_form_seminorm(f: &TestFunction, r: f64, p: f64, domain: &Domain) -> Option<f64> {
    if !(r >= 0.0) || !(p >= 1.0) || f.dim() != domain.dim() {
        return None;
    }
    let n = f.dim();
    let l = r.floor();
    let sigma = r - l;
    if f.is_zero() {
        return Some(0.0);
    }
    match f.kind() {
        Kind::Constant { value, .. } => {
            if r > 0.0 {
                Some(0.0)
            } else if domain.is_bounded() {
                Some(value.abs().powf(p) * domain.measure())
            } else {
                None
            }
        }
        Kind::Affine { coeffs } => {
            if !domain.is_bounded() {
                return None;
            }
            // Every derivative of order ≥ 2, and every difference of a
            // constant derivative, vanishes.
            if l >= 2.0 || (l >= 1.0 && sigma > 0.0) {
                return Some(0.0);
            }
            let slopes = &coeffs[1..];
            if l == 1.0 {
                let Domain::Box { .. } = domain else { return None };
                let s: f64 = slopes.iter().map(|c| c.abs().powf(p)).sum();
                return Some(s * domain.measure());
            }
            if sigma > 0.0 && n == 1 {
                let Domain::Box { lo, hi } = domain else { return None };
                let len = hi[0] - lo[0];
                let g = p * (1.0 - sigma);
                return Some(slopes[0].abs().powf(p) * 2.0 * len.powf(g + 1.0) / (g * (g + 1.0)));
            }
            None
        }
        Kind::Gaussian { a, .. } => {
            if domain.is_bounded() {
                return None;
            }
            let nf = n as f64;
            if r == 0.0 {
                return Some((PI / (p * a)).powf(0.5 * nf));
            }
            if p != 2.0 {
                return None;
            }
            let base = (PI / (2.0 * a)).powf(0.5 * nf);
            if r == 1.0 {
                return Some(nf * a * base);
            }
            if sigma > 0.0 && l <= 1.0 {
                let s = sigma + l;
                let g = g_closed_form(sigma, n).ok()?;
                let radial = PI.powf(0.5 * nf) * gamma(s + 0.5 * nf).ok()? / gamma(0.5 * nf).ok()?;
                return Some(g * radial * (2.0 * a).powf(s - 0.5 * nf));
            }
            None
        }
        _ => None,
    }
}

/// Exact `|f|^p_{l,Dini(p),Ω}` when the registry has it.
pub fn closed_form_dini(f: &TestFunction, l: u32, p: f64, domain: &Domain) -> Option<f64> {
    if !domain.is_bounded() || !(p >= 1.0) || f.dim() != domain.dim() {
        return None;
    }
    if f.is_zero() {
        return Some(0.0);
    }
    match f.kind() {
        Kind::Constant { .. } => Some(0.0),
        Kind::Affine { coeffs } => {
            if l >= 1 {
                return Some(0.0);
            }
            match domain {
                Domain::Box { lo, hi } if lo.len() == 1 => {
                    let len = hi[0] - lo[0];
                    Some(coeffs[1].abs().powf(p) * 2.0 * len.powf(p + 1.0) / (p * (p + 1.0)))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_examples() {
        let g = TestFunction::unit_gaussian(1);
        let rn = Domain::full_space(1, 8.0).unwrap();
        assert!((closed_form_seminorm(&g, 0.0, 2.0, &rn).unwrap() - PI.sqrt()).abs() < 1e-15);
        assert!((closed_form_seminorm(&g, 1.0, 2.0, &rn).unwrap() - 0.5 * PI.sqrt()).abs() < 1e-15);
        assert!((closed_form_seminorm(&g, 0.5, 2.0, &rn).unwrap() - 2.0 * PI).abs() < 1e-12);
        let v = TestFunction::identity_coordinate(1);
        let unit = Domain::unit_box(1);
        assert!((closed_form_seminorm(&v, 0.5, 2.0, &unit).unwrap() - 1.0).abs() < 1e-15);
        let s = 0.3;
        let want = 2.0 / ((2.0 - 2.0 * s) * (3.0 - 2.0 * s));
        assert!((closed_form_seminorm(&v, s, 2.0, &unit).unwrap() - want).abs() < 1e-15);
        assert_eq!(closed_form_seminorm(&v, 1.0, 2.0, &unit), Some(1.0));
        assert_eq!(closed_form_seminorm(&v, 1.5, 2.0, &unit), Some(0.0));
        assert!((closed_form_dini(&v, 0, 2.0, &unit).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((closed_form_dini(&v, 0, 3.0, &unit).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn fractional_gaussian_matches_the_stated_form() {
        // 2π^{3/2}Γ(σ+½)/(Γ(½)Γ(1+2σ) sin πσ) for the unit Gaussian on ℝ.
        let g = TestFunction::unit_gaussian(1);
        let rn = Domain::full_space(1, 8.0).unwrap();
        for s in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let want = 2.0 * PI.powf(1.5) * gamma(s + 0.5).unwrap()
                / (gamma(0.5).unwrap() * gamma(1.0 + 2.0 * s).unwrap() * (PI * s).sin());
            let got = closed_form_seminorm(&g, s, 2.0, &rn).unwrap();
            assert!((got - want).abs() < 1e-12 * want, "σ={s}");
        }
    }

    #[test]
    fn unknown_entries_are_absent() {
        let g = TestFunction::unit_gaussian(1);
        assert_eq!(closed_form_seminorm(&g, 0.5, 3.0, &Domain::full_space(1, 8.0).unwrap()), None);
        assert_eq!(closed_form_seminorm(&g, 0.5, 2.0, &Domain::unit_box(1)), None);
        let v = TestFunction::identity_coordinate(1);
        assert_eq!(closed_form_seminorm(&v, 0.5, 2.0, &Domain::full_space(1, 8.0).unwrap()), None);
        let c = TestFunction::constant(2.0, 2).unwrap();
        assert_eq!(closed_form_seminorm(&c, 0.3, 2.0, &Domain::unit_box(2)), Some(0.0));
    }
}
