//! Closed-form series for the Mach-Zehnder and Butterfly phases in powers of the
//! gradient and rotation rates. These are evaluated exactly as written, with all
//! rotation rates as generator matrices and products kept in order, and serve as
//! cross-checks against the exact engine.

use crate::error::{invalid, Result};
use crate::rotations::generator;
use crate::symplectic::{Mat3, Vec3, HBAR};

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionParams {
    pub k0: Vec3,
    /// `g` in inertial frames, `g′₀` in co-moving frames.
    pub g: Vec3,
    pub gamma0: Mat3,
    /// Laser rotation for the inertial series; common rotation for the fountain series.
    pub omega: Vec3,
    pub omega_k: Vec3,
    pub omega_g: Vec3,
    pub omega_gamma: Vec3,
    pub t: f64,
    pub x0: Vec3,
    pub p0: Vec3,
    pub mass: f64,
    /// Combined laser phase `φ_MZ` or `φ_BU`.
    pub laser_phase: f64,
}

impl ExpansionParams {
    pub fn new(k0: Vec3, g: Vec3, t: f64, mass: f64) -> Self {
        Self {
            k0,
            g,
            gamma0: Mat3::zeros(),
            omega: Vec3::zeros(),
            omega_k: Vec3::zeros(),
            omega_g: Vec3::zeros(),
            omega_gamma: Vec3::zeros(),
            t,
            x0: Vec3::zeros(),
            p0: Vec3::zeros(),
            mass,
            laser_phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.mass > 0.0) {
            return Err(invalid("series need T > 0 and m > 0"));
        }
        if (self.gamma0 - self.gamma0.transpose()).amax() > 1e-12 * self.gamma0.amax() {
            return Err(invalid("gradient must be symmetric"));
        }
        Ok(())
    }

    /// `ħk₀/2m + ⟨p₀⟩/m`.
    fn velocity(&self) -> Vec3 {
        (self.k0 * (0.5 * HBAR) + self.p0) / self.mass
    }
}

/// Total Mach-Zehnder phase for `t = (0, T, 2T)` in an inertial frame with rotating
/// lasers, through second order in `Γ` and `Ω`.
pub fn delta_phi_mz_series(p: &ExpansionParams) -> Result<f64> {
    p.validate()?;
    let t = p.t;
    let k = p.k0;
    let a = p.omega.cross(&k);
    let b = p.omega.cross(&a);
    let gm = p.gamma0;
    let gm2 = gm * gm;
    let g = p.g;
    let v = p.velocity();

    let l0 = k + a * (3.0 * t) + b * (3.5 * t * t);
    let l1 = k * 7.0 + a * (15.0 * t) + b * (15.5 * t * t);
    let l2 = k * 31.0 + a * (63.0 * t) + b * (63.5 * t * t);
    let phase = l0.dot(&g) * t.powi(2) - l1.dot(&(gm * g)) / 12.0 * t.powi(4) + l2.dot(&(gm2 * g)) / 360.0 * t.powi(6);

    let x_block = b * t.powi(2) - gm * l0 * t.powi(2) + gm2 * l1 / 12.0 * t.powi(4);

    let m0 = (a * t + b * (1.5 * t * t)) * 2.0 * t;
    let m1 = gm * (k * 3.0 + a * (7.0 * t) + b * (7.5 * t * t)) / 3.0 * t.powi(3);
    let m2 = gm2 * (k * 15.0 + a * (31.0 * t) + b * (31.5 * t * t)) * (2.0 / 120.0) * t.powi(5);
    let v_block = m0 - m1 + m2;

    Ok(p.laser_phase + phase + p.x0.dot(&x_block) + v.dot(&v_block))
}

/// Total Butterfly phase for `t = (0, T, 3T, 4T)` in an inertial frame with rotating lasers.
pub fn delta_phi_butterfly_series(p: &ExpansionParams) -> Result<f64> {
    p.validate()?;
    let t = p.t;
    let k = p.k0;
    let a = p.omega.cross(&k);
    let b = p.omega.cross(&a);
    let gm = p.gamma0;
    let gm2 = gm * gm;
    let g = p.g;
    let v = p.velocity();

    let l0 = a * (6.0 * t) + b * (24.0 * t * t);
    let l1 = k * 4.0 + a * (22.5 * t) + b * (55.0 * t * t);
    let l2 = k * (11.0 / 3.0) + a * (1001.0 / 60.0 * t) + b * (182.0 / 5.0 * t * t);
    let phase = -l0.dot(&g) * t.powi(2) + l1.dot(&(gm * g)) * t.powi(4) - l2.dot(&(gm2 * g)) * t.powi(6);

    let x_block = gm * l0 * t.powi(2) - gm2 * l1 * t.powi(4);

    let v_block = b * (6.0 * t.powi(3)) - gm * (k * 2.0 + a * (16.0 * t) + b * (45.0 * t * t)) * t.powi(3)
        + gm2 * (k * 4.5 + a * (22.0 * t) + b * (1001.0 / 20.0 * t * t)) * t.powi(5);

    Ok(p.laser_phase + phase + p.x0.dot(&x_block) - v.dot(&v_block))
}

/// Rotation generators and gradient used by the non-inertial series.
struct Gens {
    g0: Mat3,
    k: Mat3,
    w: Mat3,
    r: Mat3,
}

impl Gens {
    fn new(p: &ExpansionParams) -> Self {
        Self { g0: p.gamma0, k: generator(&p.omega_k), w: generator(&p.omega_g), r: generator(&p.omega_gamma) }
    }
}

fn pow(m: &Mat3, n: u32) -> Mat3 {
    (0..n).fold(Mat3::identity(), |acc, _| acc * m)
}

/// Coefficient matrices of `Tʲ` (`j = 0..=5`) in the `g′₀` bracket.
fn g_bracket(s: &Gens) -> [Mat3; 6] {
    let (g, k, w, r) = (&s.g0, &s.k, &s.w, &s.r);
    let c0 = -Mat3::identity();
    let c1 = k * 3.0 - w;
    let c2 = (g + k * w * 4.0 - w * w - k * k * 6.0) * (7.0 / 12.0);
    let c3 = (r * g * 3.0 - g * r * 3.0 + g * w + k * w * w * 5.0 - k * k * w * 10.0 - pow(w, 3) - k * g * 5.0
        + pow(k, 3) * 10.0)
        * 0.25;
    let c4 = (r * g * r * 12.0 - g * r * r * 6.0 - r * r * g * 6.0 + g * g - g * w * w + g * r * w * 4.0
        - r * g * w * 4.0
        + k * g * w * 6.0
        - k * pow(w, 3) * 6.0
        + k * k * w * w * 15.0
        - pow(k, 3) * w * 20.0
        + pow(w, 4)
        - k * k * g * 15.0
        - k * g * r * 18.0
        + k * r * g * 18.0
        + pow(k, 4) * 15.0)
        * (-31.0 / 360.0);
    let c5 = (g * r * g * 26.0 - g * pow(r, 3) * 10.0 - g * g * r * 9.0 - r * g * g * 17.0 + pow(r, 3) * g * 10.0
        + r * g * r * r * 30.0
        - r * r * g * r * 30.0
        + g * pow(w, 3)
        - g * g * w
        - g * r * w * w * 5.0
        + g * r * r * w * 10.0
        + r * g * w * w * 5.0
        + r * r * g * w * 10.0
        - r * g * r * w * 20.0
        - k * g * w * w * 7.0
        + k * k * g * w * 21.0
        + k * g * r * w * 28.0
        - k * r * g * w * 28.0
        + k * pow(w, 4) * 7.0
        - k * k * pow(w, 3) * 21.0
        + pow(k, 3) * w * w * 35.0
        - pow(k, 4) * w * 35.0
        - pow(w, 5)
        + k * g * g * 7.0
        - pow(k, 3) * g * 35.0
        - k * g * r * r * 42.0
        - k * r * r * g * 42.0
        - k * k * g * r * 63.0
        + k * k * r * g * 63.0
        + k * r * g * r * 84.0
        + pow(k, 5) * 21.0)
        * (1.0 / 40.0);
    [c0, c1, c2, c3, c4, c5]
}

fn x_bracket(s: &Gens) -> [Mat3; 6] {
    let (g, k, r) = (&s.g0, &s.k, &s.r);
    let c2 = k * k - g;
    let c3 = g * r - r * g + k * g * 3.0 - pow(k, 3);
    let c4 = (r * g * r * 2.0 - g * r * r - r * r * g + g * g - k * k * g * 6.0 - k * g * r * 4.0
        + k * r * g * 4.0
        + pow(k, 4))
        * (7.0 / 12.0);
    let c5 = (g * pow(r, 3) - g * g * r + r * g * g * 3.0 - pow(r, 3) * g - g * r * g * 2.0 - r * g * r * r * 3.0
        + r * r * g * r * 3.0
        - k * g * g * 5.0
        + pow(k, 3) * g * 10.0
        + k * g * r * r * 5.0
        + k * r * r * g * 5.0
        + k * k * g * r * 10.0
        - k * k * r * g * 10.0
        - k * r * g * r * 10.0
        - pow(k, 5))
        * 0.25;
    [Mat3::zeros(), Mat3::zeros(), c2, c3, c4, c5]
}

fn v_bracket(s: &Gens) -> [Mat3; 6] {
    let (g, k, r) = (&s.g0, &s.k, &s.r);
    let c1 = k * -2.0;
    let c2 = k * k * 3.0 - g;
    let c3 = (g * r - r * g + k * g * 2.0 - pow(k, 3) * 2.0) * (7.0 / 6.0);
    let c4 = (r * g * r * 6.0 + g * g - g * r * r * 3.0 - r * r * g * 3.0 - k * k * g * 10.0 - k * g * r * 10.0
        + k * r * g * 10.0
        + pow(k, 4) * 5.0)
        * 0.25;
    let c5 = (g * r * g - g * pow(r, 3) * 2.0 + g * g * r - r * g * g * 2.0 + pow(r, 3) * g * 2.0
        + r * g * r * r * 6.0
        - r * r * g * r * 6.0
        + k * g * g * 3.0
        - pow(k, 3) * g * 10.0
        - k * g * r * r * 9.0
        - k * r * r * g * 9.0
        - k * k * g * r * 15.0
        + k * k * r * g * 15.0
        + k * r * g * r * 18.0
        + pow(k, 5) * 3.0)
        * (-31.0 / 180.0);
    [Mat3::zeros(), c1, c2, c3, c4, c5]
}

fn fountain_g_bracket(g: &Mat3, w: &Mat3) -> [Mat3; 6] {
    let c0 = -Mat3::identity();
    let c1 = w * 2.0;
    let c2 = (g - w * w * 3.0) * (7.0 / 12.0);
    let c3 = (pow(w, 3) * 2.0 - w * g - g * w) * 0.5;
    let c4 = (w * w * g * 3.0 + g * w * w * 3.0 + w * g * w * 4.0 - g * g - pow(w, 4) * 5.0) * (31.0 / 360.0);
    let c5 = (pow(w, 5) * 3.0 - pow(w, 3) * g * 2.0 - g * pow(w, 3) * 2.0 - w * g * w * w * 3.0 - w * w * g * w * 3.0
        - w * g * g * 5.0
        - g * g * w * 5.0
        + g * w * g * 13.0)
        * (1.0 / 20.0);
    [c0, c1, c2, c3, c4, c5]
}

fn fountain_x_bracket(g: &Mat3, w: &Mat3) -> [Mat3; 6] {
    let c2 = w * w - g;
    let c3 = w * g * 2.0 + g * w - pow(w, 3);
    let c4 = (pow(w, 4) - w * w * g * 3.0 - g * w * w - w * g * w * 2.0 + g * g) * (7.0 / 12.0);
    let c5 = (pow(w, 3) * g * 4.0 + g * pow(w, 3) + w * g * w * w * 2.0 + w * w * g * w * 3.0 - w * g * g * 2.0
        - g * g * w
        - g * w * g * 2.0
        - pow(w, 5))
        * 0.25;
    [Mat3::zeros(), Mat3::zeros(), c2, c3, c4, c5]
}

fn fountain_v_bracket(g: &Mat3, w: &Mat3) -> [Mat3; 6] {
    let c1 = w * -2.0;
    let c2 = w * w * 3.0 - g;
    let c3 = (w * g + g * w - pow(w, 3) * 2.0) * (7.0 / 6.0);
    let c4 = (pow(w, 4) * 5.0 - w * w * g * 3.0 - w * g * w * 4.0 + g * g - g * w * w * 3.0) * 0.25;
    let c5 = (pow(w, 5) * 3.0 + g * w * g + g * g * w + w * g * g - g * pow(w, 3) * 2.0 - pow(w, 3) * g * 2.0
        - w * w * g * w * 3.0
        - w * g * w * w * 3.0)
        * (-31.0 / 180.0);
    [Mat3::zeros(), c1, c2, c3, c4, c5]
}

fn polynomial(c: &[Mat3], t: f64, max_power: usize) -> Mat3 {
    c.iter().take(max_power + 1).enumerate().fold(Mat3::zeros(), |acc, (j, m)| acc + m * t.powi(j as i32))
}

fn assemble(p: &ExpansionParams, gb: &[Mat3; 6], xb: &[Mat3; 6], vb: &[Mat3; 6]) -> f64 {
    let t = p.t;
    let k = p.k0;
    let g_part = -k.dot(&(polynomial(gb, t, 5) * p.g)) * t * t;
    let x_part = k.dot(&(polynomial(xb, t, 5) * p.x0));
    let v_part = k.dot(&(polynomial(vb, t, 5) * p.velocity())) * t;
    p.laser_phase + g_part + x_part + v_part
}

/// Total Mach-Zehnder phase in a co-moving frame with independent rotation of the
/// lasers (`Ω_k`), the local acceleration (`Ω_g`) and the gradient (`Ω_Γ`), through `T⁵`
/// inside each bracket.
pub fn phi_mz_noninertial_series(p: &ExpansionParams) -> Result<f64> {
    p.validate()?;
    let s = Gens::new(p);
    Ok(assemble(p, &g_bracket(&s), &x_bracket(&s), &v_bracket(&s)))
}

/// Atomic-fountain form with `Ω_k = Ω_g = Ω_Γ = Ω` taken from `p.omega`.
pub fn phi_atomic_fountain_series(p: &ExpansionParams) -> Result<f64> {
    p.validate()?;
    let w = generator(&p.omega);
    let g = p.gamma0;
    Ok(assemble(p, &fountain_g_bracket(&g, &w), &fountain_x_bracket(&g, &w), &fountain_v_bracket(&g, &w)))
}

/// `g′₀` part of the non-inertial series truncated at `T^max_power` inside the bracket.
pub fn noninertial_g_part(p: &ExpansionParams, max_power: usize) -> f64 {
    let s = Gens::new(p);
    -p.k0.dot(&(polynomial(&g_bracket(&s), p.t, max_power) * p.g)) * p.t * p.t
}

/// Single-pulse phase for independently rotating `k`, `g′` and `Γ`, `τ = tₙ − t₀`.
pub fn phi_n_different_omega(p: &ExpansionParams, tau: f64, laser_phase: f64) -> f64 {
    let s = Gens::new(p);
    let (g, k, w, r) = (&s.g0, &s.k, &s.w, &s.r);
    let c1 = (k * 3.0 - w) / 6.0;
    let c2 = (g + k * w * 4.0 - w * w - k * k * 6.0) / 24.0;
    let c3 = (r * g * 3.0 - g * r * 3.0 + g * w + k * w * w * 5.0 - k * k * w * 10.0 - pow(w, 3) - k * g * 5.0
        + pow(k, 3) * 10.0)
        / 120.0;
    let bracket = Mat3::identity() * -0.5 + c1 * tau + c2 * tau * tau + c3 * tau.powi(3);
    laser_phase - p.k0.dot(&(bracket * p.g)) * tau * tau
}
