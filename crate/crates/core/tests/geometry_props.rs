use crossview_guide::geometry::{compose, invert, optical_to_physical, transform_points, FrameId, RigidTransform, Sensor};
use crossview_guide::perception::PointCloud;
use crossview_guide::Error;
use nalgebra::{Matrix3, Rotation3, Vector3};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn rotation() -> impl Strategy<Value = Matrix3<f64>> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(a, b, c)| Rotation3::from_scaled_axis(Vector3::new(a, b, c)).into_inner())
}

fn vec3(span: f64) -> impl Strategy<Value = Vector3<f64>> {
    (-span..span, -span..span, -span..span).prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

fn transform(from: FrameId, to: FrameId) -> impl Strategy<Value = RigidTransform> {
    (rotation(), vec3(5.0)).prop_map(move |(r, t)| RigidTransform::new(r, t, from, to).unwrap())
}

proptest! {
    #[test]
    fn inverse_cancels(t in transform(FrameId::RobotBase, FrameId::World), p in vec3(10.0)) {
        let id = compose(&t, &invert(&t)).unwrap();
        prop_assert!(id.max_abs_diff(&RigidTransform::identity(FrameId::World)) < TOL);
        prop_assert!((invert(&t).apply(&t.apply(&p)) - p).amax() < TOL);
    }

    #[test]
    fn compose_matches_sequential_application(
        a in transform(FrameId::RobotBase, FrameId::World),
        b in transform(FrameId::PhysicalDog, FrameId::RobotBase),
        p in vec3(10.0),
    ) {
        let ab = compose(&a, &b).unwrap();
        prop_assert_eq!((ab.from_frame(), ab.to_frame()), (FrameId::PhysicalDog, FrameId::World));
        prop_assert!((ab.apply(&p) - a.apply(&b.apply(&p))).amax() < TOL);
        prop_assert!(ab.orthonormality_error() < TOL);
    }

    #[test]
    fn vectors_ignore_translation(t in transform(FrameId::RobotBase, FrameId::World), v in vec3(3.0)) {
        let expected = t.apply(&v) - t.apply(&Vector3::zeros());
        prop_assert!((t.apply_vector(&v) - expected).amax() < TOL);
        prop_assert!((t.apply_vector(&v).norm() - v.norm()).abs() < TOL);
    }

    #[test]
    fn optical_axis_is_physical_forward(sensor in prop_oneof![Just(Sensor::Dog), Just(Sensor::Human)], d in 0.1..5.0f64) {
        let t = optical_to_physical(sensor);
        prop_assert!((t.apply(&Vector3::new(0.0, 0.0, d)) - Vector3::new(d, 0.0, 0.0)).amax() < TOL);
        prop_assert!((t.apply(&Vector3::new(d, 0.0, 0.0)) - Vector3::new(0.0, -d, 0.0)).amax() < TOL);
        prop_assert!((t.apply(&Vector3::new(0.0, d, 0.0)) - Vector3::new(0.0, 0.0, -d)).amax() < TOL);
    }
}

#[test]
fn rejects_scaled_rotation() {
    let r = Matrix3::identity() * 1.001;
    assert!(matches!(
        RigidTransform::new(r, Vector3::zeros(), FrameId::RobotBase, FrameId::World),
        Err(Error::NotOrthonormal { .. })
    ));
}

#[test]
fn frame_tags_are_enforced() {
    let a = RigidTransform::identity(FrameId::World);
    let b = RigidTransform::identity(FrameId::RobotBase);
    assert!(matches!(compose(&a, &b), Err(Error::FrameMismatch { .. })));
    let cloud = PointCloud::new(vec![Vector3::new(1.0, 2.0, 3.0)], FrameId::OpticalDog, 0.0);
    assert!(transform_points(&a, &cloud).is_err());
    let moved = transform_points(&optical_to_physical(Sensor::Dog), &cloud).unwrap();
    assert_eq!(moved.frame, FrameId::PhysicalDog);
    assert_eq!(moved.points[0], Vector3::new(3.0, -1.0, -2.0));
}
