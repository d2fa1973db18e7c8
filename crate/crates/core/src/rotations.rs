//! SO(3) rotations by axis and angle, rotation generators, and rotating wave vectors.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Result};
use crate::symplectic::{Mat3, Vec3};

/// Angular velocities below this magnitude (rad/s) count as no rotation.
pub const OMEGA_ZERO: f64 = 1e-15;

/// Axis-angle parametrization of a rotation, `0 ≤ angle < π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationVector {
    axis: Vec3,
    angle: f64,
}

impl RotationVector {
    pub fn new(axis: Vec3, angle: f64) -> Result<Self> {
        if !(0.0..PI).contains(&angle) {
            return Err(invalid(format!("rotation angle {angle} outside [0, pi)")));
        }
        if angle > 0.0 && ((axis.norm() - 1.0).abs() > 1e-12) {
            return Err(invalid("rotation axis must be a unit vector"));
        }
        Ok(Self { axis, angle })
    }

    /// From the combined vector `α n`.
    pub fn from_scaled_axis(v: Vec3) -> Result<Self> {
        let a = v.norm();
        if a == 0.0 {
            return Ok(Self { axis: Vec3::z(), angle: 0.0 });
        }
        Self::new(v / a, a)
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn matrix(&self) -> Mat3 {
        rodrigues(&self.axis, self.angle)
    }
}

/// `R_ik = cos α δ_ik + sin α ε_ijk n_j + (1 − cos α) n_i n_k`.
pub fn rotation_matrix(rv: &RotationVector) -> Mat3 {
    rv.matrix()
}

fn rodrigues(n: &Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    // 1 - cos written with the half angle keeps small rotations accurate.
    let h = (0.5 * angle).sin();
    let one_minus_c = 2.0 * h * h;
    Mat3::identity() * c + generator(n) * s + n * n.transpose() * one_minus_c
}

/// Antisymmetric matrix with `generator(w) q = w × q`.
pub fn generator(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0)
}

/// Rotation by angle `|w| t` about `w/|w|`; any angle is accepted.
pub fn rotation_after(w: &Vec3, t: f64) -> Mat3 {
    let rate = w.norm();
    if rate < OMEGA_ZERO {
        return Mat3::identity();
    }
    let angle = (rate * t).rem_euclid(TAU);
    rodrigues(&(w / rate), angle)
}

/// Wave vector rotated actively with the lasers: `R_{Ωt} k0`.
pub fn rotate_wave_vector(k0: &Vec3, w: &Vec3, t: f64) -> Vec3 {
    rotation_after(w, t) * k0
}

/// `Ω × (Ω × (R_{Ωt} q))`, the second time derivative of `R_{Ωt} q`.
pub fn second_derivative_action(w: &Vec3, t: f64, q: &Vec3) -> Vec3 {
    let rq = rotation_after(w, t) * q;
    w.cross(&w.cross(&rq))
}
