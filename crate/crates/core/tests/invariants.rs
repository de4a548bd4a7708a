use proptest::prelude::*;
use shellrig::linalg3::{
    dist_so3, dist_so3_perturbed, nonlinear_strain_phi, polar_decompose, rotation_offset, sandwich_check,
    strain_from_displacement, strain_t, Mat3, Vec3,
};
use shellrig::scaling::{fit_points, CsvRecord};

fn mat(scale: f64) -> impl Strategy<Value = Mat3<f64>> {
    prop::array::uniform9(-1.0..1.0f64).prop_map(move |a| {
        Mat3([[a[0], a[1], a[2]], [a[3], a[4], a[5]], [a[6], a[7], a[8]]]) * scale
    })
}

fn small_b() -> impl Strategy<Value = Mat3<f64>> {
    (mat(1.0), -6.0..-0.5f64).prop_map(|(b, e)| b * 10f64.powf(e))
}

proptest! {
    #[test]
    fn polar_factors_reassemble(a in mat(2.0)) {
        prop_assume!(a.det().abs() > 1e-3);
        let p = polar_decompose(&a);
        let r = p.rotation;
        prop_assert!(((r.transpose() * r) - Mat3::identity()).max_abs() < 1e-9);
        prop_assert!(((r * p.stretch) - a).max_abs() < 1e-9 * (1.0 + a.max_abs()));
        prop_assert_eq!(p.valid, a.det() > 0.0);
    }

    #[test]
    fn sandwich_holds(b in small_b()) {
        prop_assert!(sandwich_check(&b).unwrap());
    }

    #[test]
    fn cancellation_free_strain_agrees(b in small_b()) {
        let direct = strain_t(&(Mat3::identity() + b)).value;
        let stable = strain_from_displacement(&b);
        prop_assert!((direct - stable).max_abs() < 1e-12);
        let d = dist_so3_perturbed(&b).value;
        prop_assert!((d - dist_so3(&(Mat3::identity() + b)).value).abs() < 1e-12);
        prop_assert!(d <= 2.0 * 3f64.sqrt() * nonlinear_strain_phi(&b).frobenius() * (1.0 + 1e-12));
    }

    #[test]
    fn rotation_offset_is_rotation(b in small_b()) {
        let r = Mat3::identity() + rotation_offset(&b).unwrap();
        prop_assert!(((r.transpose() * r) - Mat3::identity()).max_abs() < 1e-12);
        prop_assert!((r.det() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dist_is_rotation_invariant(b in small_b(), axis in prop::array::uniform3(-1.0..1.0f64), angle in -3.0..3.0f64) {
        let v = Vec3(axis);
        prop_assume!(v.norm() > 1e-3);
        let a = Mat3::identity() + b;
        let q = Mat3::rotation(v.normalized(), angle);
        prop_assert!((dist_so3(&(q * a)).value - dist_so3(&a).value).abs() < 1e-12);
    }

    #[test]
    fn fit_is_scale_invariant(slope in 0.5..2.0f64, c in 1e-6..1e6f64, noise in prop::collection::vec(-0.01..0.01f64, 8)) {
        let pts: Vec<(f64, f64)> = noise.iter().enumerate()
            .map(|(k, e)| { let h = 2f64.powi(-(k as i32) - 4); (h, h.powf(-slope) * (1.0 + e)) })
            .collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|(h, q)| (*h, q * c)).collect();
        let a = fit_points(&pts).unwrap();
        let b = fit_points(&scaled).unwrap();
        prop_assert!((a.slope - b.slope).abs() < 1e-9);
        prop_assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-8);
        prop_assert!((a.slope - slope).abs() < 0.02);
    }

    #[test]
    fn csv_rows_round_trip(vals in prop::array::uniform7(1e-300..1e300f64), flagged in 0u64..1000) {
        let r = CsvRecord {
            h: vals[0], e_grad: vals[1], e_sym: vals[2], e_defgrad: vals[3],
            e_dist: vals[4], ratio: vals[5], korn_ratio: vals[6], flagged_nodes: flagged,
        };
        let line = format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            r.h, r.e_grad, r.e_sym, r.e_defgrad, r.e_dist, r.ratio, r.korn_ratio, r.flagged_nodes
        );
        prop_assert_eq!(CsvRecord::parse(&line).unwrap(), r);
    }
}
