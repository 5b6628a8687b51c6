use jigplan_core::eval::{
    displacement_report, frame_distance, is_success, jig_frame, resolve_forces, DisplacementParams,
    ForceSample, JigFrameObservation, Point2,
};
use nalgebra::Rotation2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn square(tag: &str, c: [f64; 2], r: f64, angle: f64) -> JigFrameObservation {
    let rot = Rotation2::new(angle);
    let corners = [[0.0, r], [r, 0.0], [0.0, -r], [-r, 0.0]].map(|[x, y]| {
        let p = rot * Point2::new(x, y);
        [p.x + c[0], p.y + c[1]]
    });
    JigFrameObservation::new(tag, corners).unwrap()
}

#[test]
fn shear_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let f = ForceSample::new(
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
        );
        let (n, s) = resolve_forces(&f).unwrap();
        let p =
            Rotation2::new(rng.random_range(0.0..std::f64::consts::TAU)) * Point2::new(f.fx, f.fy);
        let (n2, s2) = resolve_forces(&ForceSample::new(p.x, p.y, -f.fz)).unwrap();
        assert_eq!(n, n2);
        assert!((s - s2).abs() <= 1e-12 * s.max(1.0), "{s} vs {s2}");
    }
    assert_eq!(
        resolve_forces(&ForceSample::new(3.0, 4.0, 0.0)).unwrap(),
        (0.0, 5.0)
    );
}

#[test]
fn rotated_frame_examples() {
    let a = square("a", [0.0, 0.0], 1.0, 0.0);
    let half = square("b", [0.0, 0.0], 1.0, std::f64::consts::PI);
    assert!((frame_distance(&a, &half).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);

    let quarter = square("q", [0.0, 0.0], 1.0, std::f64::consts::FRAC_PI_2);
    let fa = jig_frame(&a).unwrap();
    let fq = jig_frame(&quarter).unwrap();
    assert!((fq.x_hat - Point2::new(0.0, 1.0)).norm() < 1e-15);
    assert!((fq.y_hat - Point2::new(-1.0, 0.0)).norm() < 1e-15);
    assert_eq!(fa.x_hat, Point2::new(1.0, 0.0));
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-500.0..500.0f64, -500.0..500.0f64]
}

proptest! {
    #[test]
    fn frame_distance_properties(
        c1 in point(), c2 in point(), shift in point(),
        r1 in 5.0..80.0f64, r2 in 5.0..80.0f64,
        t1 in -3.2..3.2f64, t2 in -3.2..3.2f64, spin in -3.2..3.2f64,
    ) {
        let a = square("a", c1, r1, t1);
        let b = square("b", c2, r2, t2);
        let d = frame_distance(&a, &b).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert_eq!(frame_distance(&a, &a).unwrap(), 0.0);
        prop_assert!((d - frame_distance(&b, &a).unwrap()).abs() <= 1e-12 * d.max(1.0));

        let s = Point2::new(shift[0], shift[1]);
        let moved = frame_distance(&a.translated(s), &b.translated(s)).unwrap();
        prop_assert!((d - moved).abs() <= 1e-9 * d.max(1.0), "{} vs {}", d, moved);

        // A common rigid motion of both images leaves the distance unchanged.
        let rot = Rotation2::new(spin);
        let apply = |o: &JigFrameObservation| JigFrameObservation {
            image_tag: o.image_tag.clone(),
            points: o.points.map(|p| rot * p + s),
        };
        let spun = frame_distance(&apply(&a), &apply(&b)).unwrap();
        prop_assert!((d - spun).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn success_is_monotone(x in 0.0..200.0f64, dx in 0.0..50.0f64, width in 10.0..2000.0f64) {
        let p = DisplacementParams::new(width);
        prop_assert!(!is_success(x, &p) || is_success(x + dx, &p));
    }

    #[test]
    fn doubling_pixel_width_halves_millimetres(px in 0.0..400.0f64, width in 10.0..2000.0f64) {
        let a = square("a", [0.0, 0.0], 10.0, 0.0);
        let b = a.translated(Point2::new(px, 0.0));
        let r1 = displacement_report(&a, &b, &DisplacementParams::new(width)).unwrap();
        let r2 = displacement_report(&a, &b, &DisplacementParams::new(2.0 * width)).unwrap();
        prop_assert_eq!(r2.centroid_translation_mm, r1.centroid_translation_mm / 2.0);
        prop_assert_eq!(r1.centroid_translation_mm, r1.centroid_translation_px * r1.mm_per_px);
    }
}

#[test]
fn push_classification_examples() {
    let params = DisplacementParams::new(320.0);
    let a = square("before", [400.0, 300.0], 150.0, 0.3);
    for (px, expect_mm, expect) in [
        (156.4, 78.2, true),
        (108.4, 54.2, false),
        (126.0, 63.0, true),
    ] {
        let b = a.translated(Point2::new(0.0, -px));
        let r = displacement_report(&a, &b, &params).unwrap();
        assert!((r.centroid_translation_mm - expect_mm).abs() < 1e-9);
        assert_eq!(r.success, expect, "{expect_mm} mm");
    }
}
