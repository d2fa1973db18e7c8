//! Gravity models, frame trajectories, and the Hamiltonian coefficients `𝒢(t)`, `ℋ(t)`
//! of the quadratic Hamiltonian `H = ½ ξᵀℋξ + 𝒢ᵀξ`.

use crate::error::{invalid, Error, Result};
use crate::rotations::{generator, rotation_after, OMEGA_ZERO};
use crate::symplectic::{from_blocks, phase_vector, Mat3, Mat6, PhaseVector, Vec3};

/// Source of the local acceleration and gravity gradient.
#[derive(Debug, Clone, PartialEq)]
pub enum GravityModel {
    /// Fixed acceleration `g` (m/s²) and gradient `Γ` (1/s²) everywhere.
    Uniform { g: Vec3, gamma: Mat3 },
    /// Point mass with gravitational parameter `GM` (m³/s²) at the origin.
    Central { gm: f64 },
}

impl GravityModel {
    pub fn uniform(g: Vec3) -> Self {
        GravityModel::Uniform { g, gamma: Mat3::zeros() }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GravityModel::Uniform { g, gamma } => {
                if g.iter().chain(gamma.iter()).any(|v| !v.is_finite()) {
                    return Err(invalid("uniform gravity contains non-finite values"));
                }
                if (gamma - gamma.transpose()).amax() > 1e-12 * gamma.amax().max(f64::MIN_POSITIVE) {
                    return Err(invalid("uniform gravity gradient must be symmetric"));
                }
                Ok(())
            }
            GravityModel::Central { gm } => {
                if !(*gm > 0.0 && gm.is_finite()) {
                    return Err(invalid("central gravity requires GM > 0"));
                }
                Ok(())
            }
        }
    }

    /// Local acceleration `g(ρ)`.
    pub fn local_acceleration(&self, rho: &Vec3) -> Result<Vec3> {
        match self {
            GravityModel::Uniform { g, .. } => Ok(*g),
            GravityModel::Central { gm } => {
                let r = rho.norm();
                if r == 0.0 {
                    return Err(Error::Singularity);
                }
                Ok(-rho * (gm / (r * r * r)))
            }
        }
    }

    /// Gradient tensor `Γ(ρ)`, with `V ≈ V₀ − m gᵀx + ½ m xᵀΓx`.
    pub fn gravity_gradient(&self, rho: &Vec3) -> Result<Mat3> {
        match self {
            GravityModel::Uniform { gamma, .. } => Ok(*gamma),
            GravityModel::Central { gm } => {
                let r2 = rho.norm_squared();
                if r2 == 0.0 {
                    return Err(Error::Singularity);
                }
                let r5 = r2 * r2 * r2.sqrt();
                Ok((Mat3::identity() * r2 - rho * rho.transpose() * 3.0) * (gm / r5))
            }
        }
    }
}

/// Trajectory `ρ(t)` of the frame origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Trajectory {
    Constant(Vec3),
    /// `ρ₀ + v₀ t + ½ a₀ t²`.
    Polynomial { rho0: Vec3, v0: Vec3, a0: Vec3 },
    /// `R_{Ωt} ρ₀`.
    Circular { rho0: Vec3, omega: Vec3 },
}

impl Trajectory {
    pub fn position(&self, t: f64) -> Vec3 {
        match self {
            Trajectory::Constant(r) => *r,
            Trajectory::Polynomial { rho0, v0, a0 } => rho0 + v0 * t + a0 * (0.5 * t * t),
            Trajectory::Circular { rho0, omega } => rotation_after(omega, t) * rho0,
        }
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        match self {
            Trajectory::Constant(_) => Vec3::zeros(),
            Trajectory::Polynomial { a0, .. } => *a0,
            Trajectory::Circular { rho0, omega } => {
                crate::rotations::second_derivative_action(omega, t, rho0)
            }
        }
    }
}

/// Frame definition: origin trajectory, rotation of the frame axes, rotation of the lasers.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub trajectory: Trajectory,
    pub frame_rotation: Vec3,
    pub laser_rotation: Vec3,
}

impl FrameSpec {
    pub fn fixed(rho: Vec3) -> Self {
        Self {
            trajectory: Trajectory::Constant(rho),
            frame_rotation: Vec3::zeros(),
            laser_rotation: Vec3::zeros(),
        }
    }
}

/// Time structure of the second-order coefficient, used to pick exact propagators.
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    /// `ℋ = [[mΓ, 0], [0, I/m]]` with constant `Γ`.
    ConstantGradient(Mat3),
    /// Any constant `ℋ`, including rotation coupling.
    ConstantHessian(Mat6),
    /// `Γ(t) = R_{Ωt} Γ₀ R_{Ωt}ᵀ` without coupling.
    RotatingGradient { gamma0: Mat3, omega: Vec3 },
    General,
}

/// Coefficients of the quadratic Hamiltonian.
pub trait Coefficients: Send + Sync {
    fn mass(&self) -> f64;
    /// Gravity gradient in the frame at time `t`.
    fn gradient(&self, t: f64) -> Result<Mat3>;
    /// Effective acceleration in the frame at time `t`.
    fn acceleration(&self, t: f64) -> Result<Vec3>;
    /// Angular velocity of the frame axes; zero for non-rotating frames.
    fn coupling(&self) -> Vec3 {
        Vec3::zeros()
    }
    fn structure(&self) -> Structure {
        Structure::General
    }

    /// `ℋ(t) = [[mΓ, α·Λ], [−α·Λ, I/m]]`.
    fn hessian(&self, t: f64) -> Result<Mat6> {
        Ok(hessian_matrix(self.mass(), &self.gradient(t)?, &self.coupling()))
    }

    /// `𝒢(t) = (−m g(t), 0)`.
    fn drive(&self, t: f64) -> Result<PhaseVector> {
        Ok(phase_vector(-self.acceleration(t)? * self.mass(), Vec3::zeros()))
    }
}

/// Second-order coefficient for gradient `gamma` and frame rotation rate `alpha`.
pub fn hessian_matrix(mass: f64, gamma: &Mat3, alpha: &Vec3) -> Mat6 {
    let a = generator(alpha);
    from_blocks(&(gamma * mass), &a, &-a, &(Mat3::identity() / mass))
}

/// Coefficients derived from a gravity model and a frame trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub gravity: GravityModel,
    pub trajectory: Trajectory,
    pub frame_rotation: Vec3,
    pub mass: f64,
}

/// Co-moving, non-rotating frame S′ following `ρ(t)`.
pub fn comoving_coefficients(model: &GravityModel, frame: &FrameSpec, mass: f64) -> Result<CoefficientSet> {
    if frame.frame_rotation.norm() >= OMEGA_ZERO {
        return Err(invalid("co-moving frame requires zero frame rotation"));
    }
    build(model, frame, Vec3::zeros(), mass)
}

/// Frame S″ whose axes rotate with constant rate `frame.frame_rotation`.
pub fn rotating_frame_coefficients(model: &GravityModel, frame: &FrameSpec, mass: f64) -> Result<CoefficientSet> {
    build(model, frame, frame.frame_rotation, mass)
}

fn build(model: &GravityModel, frame: &FrameSpec, rot: Vec3, mass: f64) -> Result<CoefficientSet> {
    model.validate()?;
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(invalid("mass must be positive"));
    }
    if rot.iter().any(|v| !v.is_finite()) {
        return Err(invalid("frame rotation must be finite"));
    }
    let set = CoefficientSet {
        gravity: model.clone(),
        trajectory: frame.trajectory.clone(),
        frame_rotation: rot,
        mass,
    };
    // Fail early on singular trajectories.
    set.gradient(0.0)?;
    Ok(set)
}

impl CoefficientSet {
    /// Uniform gravity in a fixed frame.
    pub fn uniform(mass: f64, g: Vec3, gamma: Mat3) -> Result<Self> {
        comoving_coefficients(
            &GravityModel::Uniform { g, gamma },
            &FrameSpec::fixed(Vec3::zeros()),
            mass,
        )
    }

    fn axes(&self, t: f64) -> Mat3 {
        rotation_after(&self.frame_rotation, t)
    }

    fn rotating(&self) -> bool {
        self.frame_rotation.norm() >= OMEGA_ZERO
    }
}

impl Coefficients for CoefficientSet {
    fn mass(&self) -> f64 {
        self.mass
    }

    fn gradient(&self, t: f64) -> Result<Mat3> {
        let gamma = self.gravity.gravity_gradient(&self.trajectory.position(t))?;
        if self.rotating() {
            let r = self.axes(t);
            Ok(r.transpose() * gamma * r)
        } else {
            Ok(gamma)
        }
    }

    fn acceleration(&self, t: f64) -> Result<Vec3> {
        let g = self.gravity.local_acceleration(&self.trajectory.position(t))?;
        let a = g - self.trajectory.acceleration(t);
        if self.rotating() {
            Ok(self.axes(t).transpose() * a)
        } else {
            Ok(a)
        }
    }

    fn coupling(&self) -> Vec3 {
        if self.rotating() {
            self.frame_rotation
        } else {
            Vec3::zeros()
        }
    }

    fn structure(&self) -> Structure {
        let central = matches!(self.gravity, GravityModel::Central { .. });
        let fixed_origin = matches!(self.trajectory, Trajectory::Constant(_));
        let gamma0 = match self.gravity.gravity_gradient(&self.trajectory.position(0.0)) {
            Ok(g) => g,
            Err(_) => return Structure::General,
        };
        if !self.rotating() {
            if !central || fixed_origin {
                return Structure::ConstantGradient(gamma0);
            }
            if let Trajectory::Circular { omega, .. } = &self.trajectory {
                return Structure::RotatingGradient { gamma0, omega: *omega };
            }
            return Structure::General;
        }
        // Rotating axes: the gradient is constant when the frame co-rotates with the orbit.
        let co_rotating = match &self.trajectory {
            Trajectory::Circular { omega, .. } => (omega - self.frame_rotation).norm() < OMEGA_ZERO,
            _ => false,
        };
        if central && co_rotating {
            return Structure::ConstantHessian(hessian_matrix(self.mass, &gamma0, &self.frame_rotation));
        }
        if !central || fixed_origin {
            // Γ″(t) = R_{−αt} Γ R_{−αt}ᵀ with coupling; no closed form provided.
            return Structure::General;
        }
        Structure::General
    }
}

/// Co-moving coefficients with independently rotating acceleration and gradient:
/// `g′(t) = R_{Ω_g t} g′₀`, `Γ(t) = R_{Ω_Γ t} Γ₀ R_{Ω_Γ t}ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingFieldCoefficients {
    pub mass: f64,
    pub g0: Vec3,
    pub gamma0: Mat3,
    pub omega_g: Vec3,
    pub omega_gamma: Vec3,
}

impl Coefficients for RotatingFieldCoefficients {
    fn mass(&self) -> f64 {
        self.mass
    }

    fn gradient(&self, t: f64) -> Result<Mat3> {
        let r = rotation_after(&self.omega_gamma, t);
        Ok(r * self.gamma0 * r.transpose())
    }

    fn acceleration(&self, t: f64) -> Result<Vec3> {
        Ok(rotation_after(&self.omega_g, t) * self.g0)
    }

    fn structure(&self) -> Structure {
        if self.omega_gamma.norm() < OMEGA_ZERO {
            Structure::ConstantGradient(self.gamma0)
        } else {
            Structure::RotatingGradient { gamma0: self.gamma0, omega: self.omega_gamma }
        }
    }
}
