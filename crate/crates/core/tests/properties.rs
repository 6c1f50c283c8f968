use proptest::prelude::*;

use fracsob::domains::scale_map;
use fracsob::funcspace::{MultiIndex, TestFunction};
use fracsob::quad::{integrate_difference_kernel, integrate_gagliardo_double, KernelOptions};
use fracsob::specfun::{g_closed_form, k_closed_form, m_closed_form};
use fracsob::{Domain, QuadSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Σ_{|α|=m} m!/α! = n^m.
    #[test]
    fn multinomials_sum_to_power(n in 1usize..5, m in 0u32..7) {
        let total: u128 = MultiIndex::all_of_order(n, m).iter().map(|a| a.multinomial()).sum();
        prop_assert_eq!(total, (n as u128).pow(m));
    }

    #[test]
    fn partial_derivatives_commute(
        a in 0.2f64..2.0,
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        x0 in -2.0f64..2.0,
        x1 in -2.0f64..2.0,
    ) {
        let g = TestFunction::gaussian(a, vec![c0, c1]).unwrap();
        let ex = MultiIndex(vec![1, 0]);
        let ey = MultiIndex(vec![0, 1]);
        let xy = g.derivative(&ex).unwrap().derivative(&ey).unwrap();
        let yx = g.derivative(&ey).unwrap().derivative(&ex).unwrap();
        let x = [x0, x1];
        let (u, v) = (xy.evaluate(&x).unwrap(), yx.evaluate(&x).unwrap());
        prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
    }

    #[test]
    fn g_factorises(sigma in 0.01f64..0.99, n in 1usize..6) {
        let g = g_closed_form(sigma, n).unwrap();
        let km = k_closed_form(2.0 * sigma, n).unwrap() * m_closed_form(sigma).unwrap();
        prop_assert!((g - km).abs() <= 1e-12 * g);
    }

    #[test]
    fn scaled_domain_has_unit_diameter(
        lo in -3.0f64..3.0,
        w0 in 0.1f64..4.0,
        w1 in 0.1f64..4.0,
        r in 0.1f64..5.0,
    ) {
        for d in [
            Domain::new_box(vec![lo, lo], vec![lo + w0, lo + w1]).unwrap(),
            Domain::ball(vec![lo, -lo], r).unwrap(),
        ] {
            let s = scale_map(&d).unwrap();
            prop_assert!((s.unit.diameter().unwrap() - 1.0).abs() < 1e-12);
            prop_assert!((s.scale - d.diameter().unwrap()).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    // Swapping the roles of x and y leaves the double integral unchanged.
    #[test]
    fn gagliardo_is_symmetric(sigma in 0.1f64..0.9, a in 0.5f64..2.0, c in -0.3f64..0.3) {
        let g = TestFunction::gaussian(a, vec![c]).unwrap();
        let dom = Domain::interval(-1.0, 1.5).unwrap();
        let spec = QuadSpec::polar(1e-8);
        let p = 2.0;
        let q = p * sigma;
        let plain = integrate_difference_kernel(&g, &dom, p, q, &spec, KernelOptions::default()).unwrap();
        let mirrored = integrate_difference_kernel(
            &g,
            &dom,
            p,
            q,
            &spec,
            KernelOptions { mirrored: true, ..KernelOptions::default() },
        )
        .unwrap();
        prop_assert!((plain.value - mirrored.value).abs() <= 1e-7 * plain.value);
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>()) {
        let g = TestFunction::unit_gaussian(2);
        let dom = Domain::unit_box(2);
        let spec = QuadSpec::monte_carlo(4096, seed);
        let a = integrate_gagliardo_double(&g, &dom, 0.5, 2.0, &spec).unwrap();
        let b = integrate_gagliardo_double(&g, &dom, 0.5, 2.0, &spec).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.err_abs.to_bits(), b.err_abs.to_bits());
    }
}
