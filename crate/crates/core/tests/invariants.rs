//! Property-based invariants for the geometric and normed structure.

use num_complex::Complex;
use proptest::prelude::*;
use varbergman::analysis::{luxemburg_norm, HoloFunction, QuadMeasure};
use varbergman::exponent::ExponentField;
use varbergman::geometry::{bergman_distance, involution, pseudo_distance, Point};
use varbergman::kernels::kernel;

fn disk_point() -> impl Strategy<Value = Point<f64>> {
    // Polar sampling keeps points strictly inside the disk.
    (0.0..0.95f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(r, th)| Point::disk(Complex::from_polar(r, th)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pseudo_distance_is_symmetric_and_bounded(z in disk_point(), w in disk_point()) {
        let d1 = pseudo_distance(&z, &w).unwrap();
        let d2 = pseudo_distance(&w, &z).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-12);
        prop_assert!((0.0..1.0).contains(&d1));
    }

    #[test]
    fn involution_is_involutive(z in disk_point(), w in disk_point()) {
        let back = involution(&z, &involution(&z, &w).unwrap()).unwrap();
        let err: f64 = back
            .coords()
            .iter()
            .zip(w.coords())
            .map(|(a, b)| (a - b).norm())
            .sum();
        prop_assert!(err <= 1e-9, "round trip error {err}");
    }

    #[test]
    fn involution_swaps_zero_and_base(z in disk_point()) {
        let at_zero = involution(&z, &Point::origin(1)).unwrap();
        let err = (at_zero.coords()[0] - z.coords()[0]).norm();
        prop_assert!(err <= 1e-12);
        let at_base = involution(&z, &z).unwrap();
        prop_assert!(at_base.norm() <= 1e-7);
    }

    #[test]
    fn bergman_distance_matches_pseudo(z in disk_point(), w in disk_point()) {
        let d = pseudo_distance(&z, &w).unwrap();
        let b = bergman_distance(&z, &w).unwrap();
        prop_assert!((b - d.atanh()).abs() <= 1e-9);
    }

    #[test]
    fn kernel_is_conjugate_symmetric(z in disk_point(), w in disk_point()) {
        let a = kernel(&z, &w).unwrap();
        let b = kernel(&w, &z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-10 * a.norm().max(1.0));
    }

    #[test]
    fn distance_identity_holds(z in disk_point(), w in disk_point()) {
        let d = pseudo_distance(&z, &w).unwrap();
        let cross = (Complex::new(1.0, 0.0) - z.coords()[0] * w.coords()[0].conj()).norm_sqr();
        let lhs = (1.0 - d * d) * cross;
        let rhs = z.one_minus_norm_sqr() * w.one_minus_norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }
}

proptest! {
    // Norm computations are heavier; use fewer cases.
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn luxemburg_norm_is_homogeneous(
        c_re in -2.0..2.0f64,
        c_im in -2.0..2.0f64,
        coeffs in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..5),
    ) {
        let c = Complex::new(c_re, c_im);
        prop_assume!(c.norm() > 1e-3);
        let coeffs: Vec<Complex<f64>> =
            coeffs.into_iter().map(|(a, b)| Complex::new(a, b)).collect();
        prop_assume!(coeffs.iter().any(|z| z.norm() > 1e-3));
        let f = HoloFunction::disk_polynomial(&coeffs).unwrap();
        let p = ExponentField::affine_example(1).unwrap();
        let mu = QuadMeasure::lebesgue(1, 120, 96, 0.9999).unwrap();
        let n1 = luxemburg_norm(&f, &p, &mu).unwrap();
        let n2 = luxemburg_norm(&f.scale(c), &p, &mu).unwrap();
        prop_assert!(
            (n2 - c.norm() * n1).abs() <= 1e-9 * (1.0 + n2),
            "|c| n = {}, got {n2}", c.norm() * n1
        );
    }

    #[test]
    fn norm_of_sum_is_subadditive(
        a in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4),
        b in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4),
    ) {
        let to_fn = |v: Vec<(f64, f64)>| {
            let c: Vec<Complex<f64>> =
                v.into_iter().map(|(x, y)| Complex::new(x, y)).collect();
            HoloFunction::disk_polynomial(&c).unwrap()
        };
        let f = to_fn(a);
        let g = to_fn(b);
        let sum = HoloFunction::sum(vec![f.clone(), g.clone()]).unwrap();
        let p = ExponentField::affine_example(1).unwrap();
        let mu = QuadMeasure::lebesgue(1, 120, 96, 0.9999).unwrap();
        let nf = luxemburg_norm(&f, &p, &mu).unwrap();
        let ng = luxemburg_norm(&g, &p, &mu).unwrap();
        let ns = luxemburg_norm(&sum, &p, &mu).unwrap();
        prop_assert!(ns <= nf + ng + 1e-9, "{ns} > {nf} + {ng}");
    }
}
