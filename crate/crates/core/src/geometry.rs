//! Rigid transforms between the world, the robot base and the two camera rigs.
//!
//! Every camera `k` (the robot-mounted depth camera and the chest-worn phone)
//! carries two frames: a physical frame (x forward, y left, z up) and an
//! optical frame (x right, y down, z forward). The optical frame reaches the
//! robot base in two stages, `T_R<-O,k = T_R<-P,k * T_P,k<-O,k`, where the
//! second factor is the fixed axis permutation returned by
//! [`optical_to_physical`].
//!
//! Frames are tagged at runtime and every chaining operation checks them.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::PointCloud;

/// Tolerance used when asserting that a rotation is orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameId {
    World,
    RobotBase,
    PhysicalDog,
    OpticalDog,
    PhysicalHuman,
    OpticalHuman,
}

/// The two camera rigs of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sensor {
    Dog,
    Human,
}

impl Sensor {
    pub fn physical_frame(self) -> FrameId {
        match self {
            Sensor::Dog => FrameId::PhysicalDog,
            Sensor::Human => FrameId::PhysicalHuman,
        }
    }

    pub fn optical_frame(self) -> FrameId {
        match self {
            Sensor::Dog => FrameId::OpticalDog,
            Sensor::Human => FrameId::OpticalHuman,
        }
    }
}

/// An element of SE(3) mapping coordinates expressed in `from` into `to`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidTransform {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
    from: FrameId,
    to: FrameId,
    pub stamp: Option<f64>,
}

/// Largest absolute entry of `R^T R - I`, plus the determinant error.
fn orthonormality_error(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r - Matrix3::identity();
    gram.amax() + (r.determinant() - 1.0).abs()
}

impl RigidTransform {
    /// Builds a transform, rejecting rotations that are not in SO(3).
    pub fn new(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        from: FrameId,
        to: FrameId,
    ) -> Result<Self> {
        let deviation = orthonormality_error(&rotation);
        if !deviation.is_finite() || deviation > ORTHONORMAL_TOL || !translation.iter().all(|v| v.is_finite()) {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { rotation, translation, from, to, stamp: None })
    }

    pub fn identity(frame: FrameId) -> Self {
        Self::from_parts_unchecked(Matrix3::identity(), Vector3::zeros(), frame, frame)
    }

    pub fn from_translation(t: Vector3<f64>, from: FrameId, to: FrameId) -> Self {
        Self::from_parts_unchecked(Matrix3::identity(), t, from, to)
    }

    /// Planar pose `(x, y, yaw)` lifted to SE(3) at height `z`.
    pub fn from_planar(x: f64, y: f64, z: f64, yaw: f64, from: FrameId, to: FrameId) -> Self {
        Self::from_parts_unchecked(rot_z(yaw), Vector3::new(x, y, z), from, to)
    }

    /// Yaw about z, then pitch about the rotated y axis (positive pitch tilts
    /// the x axis downwards, as for a camera looking at the floor).
    pub fn from_yaw_pitch(
        translation: Vector3<f64>,
        yaw: f64,
        pitch: f64,
        from: FrameId,
        to: FrameId,
    ) -> Self {
        Self::from_parts_unchecked(rot_z(yaw) * rot_y(pitch), translation, from, to)
    }

    // Callers guarantee `rotation` was produced from elementary rotations.
    fn from_parts_unchecked(
        rotation: Matrix3<f64>,
        translation: Vector3<f64>,
        from: FrameId,
        to: FrameId,
    ) -> Self {
        Self { rotation, translation, from, to, stamp: None }
    }

    pub fn with_stamp(mut self, stamp: f64) -> Self {
        self.stamp = Some(stamp);
        self
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    pub fn from_frame(&self) -> FrameId {
        self.from
    }

    pub fn to_frame(&self) -> FrameId {
        self.to
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    /// Largest elementwise difference of rotation and translation.
    pub fn max_abs_diff(&self, other: &RigidTransform) -> f64 {
        (self.rotation - other.rotation)
            .amax()
            .max((self.translation - other.translation).amax())
    }

    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.rotation)
    }
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// `a ∘ b`: first apply `b`, then `a`. Requires `a.from == b.to`.
pub fn compose(a: &RigidTransform, b: &RigidTransform) -> Result<RigidTransform> {
    if a.from != b.to {
        return Err(Error::FrameMismatch { expected: a.from, found: b.to });
    }
    Ok(RigidTransform {
        rotation: a.rotation * b.rotation,
        translation: a.rotation * b.translation + a.translation,
        from: b.from,
        to: a.to,
        stamp: a.stamp.or(b.stamp),
    })
}

pub fn invert(t: &RigidTransform) -> RigidTransform {
    let rt = t.rotation.transpose();
    RigidTransform {
        translation: -(rt * t.translation),
        rotation: rt,
        from: t.to,
        to: t.from,
        stamp: t.stamp,
    }
}

/// Fixed optical-to-physical rotation for `sensor`: optical z (forward) maps
/// to physical x, optical x (right) to physical -y, optical y (down) to -z.
pub fn optical_to_physical(sensor: Sensor) -> RigidTransform {
    #[rustfmt::skip]
    let r = Matrix3::new(
         0.0,  0.0, 1.0,
        -1.0,  0.0, 0.0,
         0.0, -1.0, 0.0,
    );
    RigidTransform::from_parts_unchecked(r, Vector3::zeros(), sensor.optical_frame(), sensor.physical_frame())
}

pub fn transform_points(t: &RigidTransform, cloud: &PointCloud) -> Result<PointCloud> {
    if cloud.frame != t.from {
        return Err(Error::FrameMismatch { expected: t.from, found: cloud.frame });
    }
    Ok(PointCloud {
        points: cloud.points.iter().map(|p| t.apply(p)).collect(),
        frame: t.to,
        stamp: cloud.stamp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const TOL: f64 = 1e-9;

    #[test]
    fn identity_is_neutral_for_compose() {
        let t = RigidTransform::from_planar(1.0, -2.0, 0.3, 0.7, FrameId::RobotBase, FrameId::World);
        let id = RigidTransform::identity(FrameId::World);
        let c = compose(&id, &t).unwrap();
        assert_eq!(c, t);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let t = RigidTransform::from_yaw_pitch(Vector3::new(0.2, 0.1, 1.3), 0.4, -0.2, FrameId::PhysicalHuman, FrameId::World);
        let c = compose(&t, &invert(&t)).unwrap();
        assert!(c.max_abs_diff(&RigidTransform::identity(FrameId::World)) < TOL);
        assert_eq!(c.from_frame(), FrameId::World);
    }

    #[test]
    fn translations_commute() {
        let a = RigidTransform::from_translation(Vector3::new(1.0, 0.0, 0.0), FrameId::World, FrameId::World);
        let b = RigidTransform::from_translation(Vector3::new(0.0, 2.0, 0.0), FrameId::World, FrameId::World);
        let c = compose(&a, &b).unwrap();
        assert_eq!(*c.translation(), Vector3::new(1.0, 2.0, 0.0));
    }

    #[test]
    fn compose_rejects_broken_chain() {
        let a = RigidTransform::identity(FrameId::World);
        let b = RigidTransform::identity(FrameId::RobotBase);
        assert!(matches!(compose(&a, &b), Err(Error::FrameMismatch { .. })));
    }

    #[test]
    fn invert_pure_translation() {
        let t = RigidTransform::from_translation(Vector3::new(1.0, 2.0, 3.0), FrameId::RobotBase, FrameId::World);
        let inv = invert(&t);
        assert_eq!(*inv.translation(), Vector3::new(-1.0, -2.0, -3.0));
        assert_eq!(inv.from_frame(), FrameId::World);
        assert_eq!(inv.to_frame(), FrameId::RobotBase);
    }

    #[test]
    fn invert_yaw_and_translation() {
        // Hand inversion: R = Rz(90°) = [[0,-1,0],[1,0,0],[0,0,1]], t = (1,0,0).
        // R^T = Rz(-90°) = [[0,1,0],[-1,0,0],[0,0,1]], -R^T t = -(0,-1,0) = (0,1,0).
        let t = RigidTransform::from_planar(1.0, 0.0, 0.0, FRAC_PI_2, FrameId::RobotBase, FrameId::World);
        let inv = invert(&t);
        let expected = Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((inv.rotation() - expected).amax() < TOL);
        assert!((inv.translation() - Vector3::new(0.0, 1.0, 0.0)).amax() < TOL);
    }

    #[test]
    fn optical_axes_map_to_physical_axes() {
        let t = optical_to_physical(Sensor::Dog);
        assert_eq!(t.apply(&Vector3::new(0.0, 0.0, 1.0)), Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(t.apply(&Vector3::new(1.0, 0.0, 0.0)), Vector3::new(0.0, -1.0, 0.0));
        assert_eq!(t.apply(&Vector3::new(0.0, 1.0, 0.0)), Vector3::new(0.0, 0.0, -1.0));
        assert_eq!(t.apply(&Vector3::zeros()), Vector3::zeros());
        assert!(t.orthonormality_error() < 1e-15);
    }

    #[test]
    fn new_rejects_reflection() {
        let r = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);
        assert!(RigidTransform::new(r, Vector3::zeros(), FrameId::World, FrameId::World).is_err());
    }

    #[test]
    fn transform_points_checks_frame_and_offsets() {
        let cloud = PointCloud::new(vec![Vector3::new(1.0, 0.0, 0.0)], FrameId::PhysicalDog, 0.0);
        let t = RigidTransform::from_translation(Vector3::new(0.0, 0.0, 0.3), FrameId::PhysicalDog, FrameId::RobotBase);
        let out = transform_points(&t, &cloud).unwrap();
        assert_eq!(out.points, vec![Vector3::new(1.0, 0.0, 0.3)]);
        assert_eq!(out.frame, FrameId::RobotBase);
        assert!(transform_points(&t, &out).is_err());
    }
}
