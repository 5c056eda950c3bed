use num_complex::Complex;
use proptest::prelude::*;

use polargap::hierarchy::liouville_jet;
use polargap::onegap::build_onegap;
use polargap::twogap::twogap_admissible_roots;
use polargap::yfunc::FnJet;
use polargap::Lattice;

/// Valid roots: two positive gaps, shifted so the sum vanishes.
fn roots() -> impl Strategy<Value = [f64; 3]> {
    (0.2f64..3.0, 0.2f64..3.0).prop_map(|(a, b)| {
        let e2 = (b - a) / 3.0;
        [e2 + a, e2, e2 - b]
    })
}

fn lattice(e: [f64; 3]) -> Lattice {
    Lattice::from_roots(e[0], e[1], e[2]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wp_solves_its_ode(e in roots(), s in 0.05f64..0.95, t in 0.05f64..0.95) {
        let l = lattice(e);
        let z = Complex::new(2.0 * l.omega * s, 2.0 * l.omega_p * t);
        let w = l.eval(z).unwrap();
        let res = w.wp_prime * w.wp_prime - (w.wp * w.wp * w.wp * 4.0 - w.wp * l.g2 - l.g3);
        prop_assert!(res.norm() / (1.0 + w.wp.norm().powi(3)) < 1e-10);
    }

    #[test]
    fn wp_even_and_periodic(e in roots(), s in 0.05f64..0.95, t in 0.05f64..0.95) {
        let l = lattice(e);
        let z = Complex::new(l.omega * s, l.omega_p * t);
        let w = l.wp(z).unwrap();
        prop_assert!((l.wp(-z).unwrap() - w).norm() < 1e-9 * (1.0 + w.norm()));
        let shifted = l.eval_unreduced(z + Complex::new(2.0 * l.omega, 2.0 * l.omega_p));
        prop_assert!((shifted.wp - w).norm() < 1e-9 * (1.0 + w.norm()));
    }

    #[test]
    fn legendre_relation(e in roots()) {
        prop_assert!(lattice(e).legendre_residual() < 1e-12);
    }

    #[test]
    fn admissible_set_has_five_roots_including_edges(e in roots()) {
        let l = lattice(e);
        let r = twogap_admissible_roots(&l).unwrap();
        prop_assert_eq!(r.len(), 5);
        for root in e {
            prop_assert!(r.iter().any(|a| (a - root).abs() < 1e-10));
        }
    }

    #[test]
    fn liouville_ignores_scale(e in roots(), c in 0.1f64..20.0, y in 0.0f64..3.0) {
        let l = lattice(e);
        let d = build_onegap(3, &l).unwrap();
        let dd = d.clone();
        let scaled = FnJet(move |y: f64| Ok(dd.r_jet(y)?.scale(c)));
        let a = liouville_jet(&d, y).unwrap().value();
        let b = liouville_jet(&scaled, y).unwrap().value();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn smooth_onegap_integrates_its_density(e in roots()) {
        let d = build_onegap(3, &lattice(e)).unwrap();
        prop_assert!(d.x_derivative_residual(60, 0.0).unwrap() < 1e-8);
        prop_assert!(d.x_period_residual().unwrap() < 1e-9 * d.period_x.abs().max(1.0));
    }
}
