use std::f64::consts::PI;

use dynamo_spectra::evolution::to_evolution_system;
use dynamo_spectra::geometry::{
    evolve_frame, frame_laplacian_residual, FilamentProfile, FrenetFrame,
};
use dynamo_spectra::operators::{
    build_pencil, characteristic_coeffs, equipartition_flow_constraint, FieldComponents,
    PlasmaParams, QuadraticCoeffs, Variant,
};
use dynamo_spectra::spectral::{
    beta_limit, golden_polynomial_roots, pencil_residual, polynomial_residual, solve_pencil,
    solve_quadratic,
};
use dynamo_spectra::PencilOptions;
use proptest::prelude::*;

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

fn params() -> impl Strategy<Value = PlasmaParams> {
    (-5.0..5.0f64, 0.0..2.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(al, beta, vs, k)| PlasmaParams::from_product(al, beta, vs, k).unwrap())
}

proptest! {
    #[test]
    fn roots_solve_the_pencil(v in variant(), p in params()) {
        let pencil = build_pencil(v, &p).unwrap();
        let spec = solve_pencil(&pencil).unwrap();
        let coeffs = characteristic_coeffs(&pencil);
        let a_norm = pencil.a.norm();
        let scale = coeffs.c2.abs() + coeffs.c1.abs() + coeffs.c0.abs();
        for r in spec.roots {
            prop_assert!(pencil_residual(&pencil, r) < 1e-10 * (1.0 + a_norm * a_norm));
            prop_assert!(polynomial_residual(&coeffs, r) < 1e-10 * scale);
        }
    }

    #[test]
    fn roots_are_real_or_conjugate(v in variant(), p in params()) {
        let [r0, r1] = solve_pencil(&build_pencil(v, &p).unwrap()).unwrap().roots;
        if r0.im != 0.0 || r1.im != 0.0 {
            prop_assert_eq!(r0, r1.conj());
            prop_assert!(r0.im > 0.0);
        } else {
            prop_assert!(r0.re >= r1.re);
        }
    }

    #[test]
    fn vieta_relations(v in variant(), p in params()) {
        let pencil = build_pencil(v, &p).unwrap();
        let c = characteristic_coeffs(&pencil);
        let [r0, r1] = solve_pencil(&pencil).unwrap().roots;
        let sum = -c.c1 / c.c2;
        let prod = c.c0 / c.c2;
        prop_assert!(((r0 + r1).re - sum).abs() <= 1e-10 * (1.0 + sum.abs() + r0.norm() + r1.norm()));
        prop_assert!(((r0 * r1).re - prod).abs() <= 1e-10 * (1.0 + prod.abs() + r0.norm() * r1.norm()));
    }

    #[test]
    fn degeneration_lattice(p in params()) {
        let zero_beta = p.with_beta(0.0).unwrap();
        let general = |q: &PlasmaParams| build_pencil(Variant::GeneralBeta, q).unwrap().a;
        prop_assert_eq!(general(&zero_beta), build_pencil(Variant::Laminar, &p).unwrap().a);
        let no_helicity = p.with_alpha_lambda(0.0).unwrap();
        prop_assert_eq!(general(&no_helicity), build_pencil(Variant::ZeroHelicityTurbulent, &p).unwrap().a);
        prop_assert_eq!(
            build_pencil(Variant::ZeroHelicityTurbulent, &zero_beta).unwrap().a,
            build_pencil(Variant::OscillatoryLimit, &p).unwrap().a
        );
    }

    #[test]
    fn equipartition_forces_backflow(b in prop::num::f64::NORMAL) {
        let f = FieldComponents::new(b, b).unwrap();
        prop_assert_eq!(equipartition_flow_constraint(&f).unwrap(), -1.0);
    }

    #[test]
    fn scaling_the_pencil(v in variant(), p in params(), e in -8i32..8, s in 0.1..10.0f64) {
        let pencil = build_pencil(v, &p).unwrap();
        let base = solve_pencil(&pencil).unwrap().roots;
        let c = characteristic_coeffs(&pencil);

        // Powers of two scale every coefficient exactly, so roots must not move at all.
        let two = 2f64.powi(e);
        let mut scaled = pencil;
        scaled.a *= two;
        scaled.c *= two;
        let c2 = characteristic_coeffs(&scaled);
        prop_assert_eq!(c2.as_tuple(), (c.c2 * two * two, c.c1 * two * two, c.c0 * two * two));
        prop_assert_eq!(solve_pencil(&scaled).unwrap().roots, base);

        let mut scaled = pencil;
        scaled.a *= s;
        scaled.c *= s;
        let cs = characteristic_coeffs(&scaled);
        let tol = 1e-13 * (c.c2.abs() + c.c1.abs() + c.c0.abs()) * s * s;
        prop_assert!((cs.c1 - c.c1 * s * s).abs() <= tol && (cs.c0 - c.c0 * s * s).abs() <= tol);
        for (a, b) in solve_pencil(&scaled).unwrap().roots.iter().zip(base) {
            prop_assert!((a - b).norm() <= 1e-7 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn golden_roots_scale_linearly(al in -10.0..10.0f64, e in -20i32..20, s in -10.0..10.0f64) {
        let base = golden_polynomial_roots(al);
        let two = 2f64.powi(e);
        let scaled = golden_polynomial_roots(al * two);
        prop_assert_eq!((scaled.plus, scaled.minus), (base.plus * two, base.minus * two));
        let general = golden_polynomial_roots(al * s);
        prop_assert!((general.plus - base.plus * s).abs() <= 4.0 * f64::EPSILON * general.plus.abs());
        prop_assert!((general.minus - base.minus * s).abs() <= 4.0 * f64::EPSILON * general.minus.abs());
    }

    #[test]
    fn quadratic_residual_for_arbitrary_coefficients(
        c2 in prop::num::f64::NORMAL.prop_filter("bounded", |x| x.abs() < 1e100 && x.abs() > 1e-100),
        c1 in -1e6..1e6f64,
        c0 in -1e6..1e6f64,
    ) {
        let q = QuadraticCoeffs::new(c2, c1, c0);
        let roots = solve_quadratic(&q).unwrap();
        let m = q.monic();
        for r in roots {
            let scale = 1.0 + m.c1.abs() * r.norm() + m.c0.abs() + r.norm_sqr();
            prop_assert!(polynomial_residual(&m, r) <= 1e-12 * scale);
        }
    }

    #[test]
    fn generator_spectrum_matches_pencil(v in variant(), p in params()) {
        let pencil = build_pencil(v, &p).unwrap();
        let ev = to_evolution_system(&pencil).unwrap().eigenvalues();
        let roots = solve_pencil(&pencil).unwrap().roots;
        let scale = 1.0 + roots[0].norm().max(roots[1].norm());
        // A (near-)double root is only determined to sqrt(eps); compare the symmetric functions there.
        let gap = (roots[0] - roots[1]).norm();
        if gap > 1e-4 * scale {
            for (a, b) in ev.iter().zip(roots) {
                prop_assert!((a - b).norm() < 1e-10 * scale, "{} vs {}", a, b);
            }
        }
        prop_assert!(((ev[0] + ev[1]) - (roots[0] + roots[1])).norm() < 1e-10 * scale);
        prop_assert!(((ev[0] * ev[1]) - (roots[0] * roots[1])).norm() < 1e-10 * scale * scale);
    }

    #[test]
    fn beta_limit_is_continuous(k in 0.1..2.0f64, vs in -2.0..2.0f64, al in -2.0..2.0f64) {
        prop_assume!(vs.abs() > 1e-3);
        for v in [Variant::GeneralBeta, Variant::ZeroHelicityTurbulent] {
            let p = PlasmaParams::from_product(al, 0.5, vs, k).unwrap();
            let limit = beta_limit(v, &p, &[1e-1, 1e-2, 1e-3, 1e-4], PencilOptions::default()).unwrap().limit;
            let at_zero = solve_pencil(&build_pencil(v, &p.with_beta(0.0).unwrap()).unwrap()).unwrap().max_re();
            prop_assert!((limit - at_zero).abs() < 1e-6, "{}: {} vs {}", v, limit, at_zero);
        }
    }

    #[test]
    fn plane_curves_satisfy_laplacian(k in -1e3..1e3f64) {
        prop_assert_eq!(frame_laplacian_residual(&FilamentProfile::new(k, 0.0).unwrap()).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn tangent_residual_is_curvature_times_torsion(k in -1e3..1e3f64, tau in -1e3..1e3f64) {
        let (rt, rn) = frame_laplacian_residual(&FilamentProfile::new(k, tau).unwrap()).unwrap();
        prop_assert_eq!(rt, (k * tau).abs());
        prop_assert!((rn - tau * tau).abs() <= 1e-12 * (k * k + tau * tau));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn frames_stay_orthonormal(k in -5.0..5.0f64, tau in -5.0..5.0f64) {
        let p = FilamentProfile::new(k, tau).unwrap();
        let frames = evolve_frame(&FrenetFrame::identity(), &p, 100.0, 1e-3).unwrap();
        let worst = frames.iter().map(|(_, f)| f.orthonormality_defect()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-8, "defect {:e}", worst);
    }

    #[test]
    fn tangent_turns_at_curvature_rate(k in -5.0..5.0f64, s_end in 0.5..10.0f64) {
        let p = FilamentProfile::new(k, 0.0).unwrap();
        let frames = evolve_frame(&FrenetFrame::identity(), &p, s_end, 1e-3).unwrap();
        for (s, f) in frames.iter().step_by(250) {
            // Signed angle of t in the (t0, n0) plane.
            let angle = f.t.y.atan2(f.t.x);
            let expected = (k * s + PI).rem_euclid(2.0 * PI) - PI;
            let diff = (angle - expected + PI).rem_euclid(2.0 * PI) - PI;
            prop_assert!(diff.abs() < 1e-6, "s={} angle={} expected={}", s, angle, expected);
        }
    }
}
