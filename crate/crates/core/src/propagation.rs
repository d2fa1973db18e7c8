//! Time-evolution matrices `𝒯(t, t₀)`: closed form for constant coefficients,
//! the perturbative recursion for time-dependent ones, and a fixed-step RK4 oracle.

use std::sync::Arc;

use nalgebra::SymmetricEigen;

use crate::error::{invalid, numerical, Result};
use crate::frames::{hessian_matrix, Coefficients, Structure};
use crate::quadrature::{GaussLegendre, DEFAULT_NODES};
use crate::rotations::rotation_after;
use crate::symplectic::{
    conjugate_scale, from_blocks, symplectic_form, symplectic_inverse_unchecked, Mat3, Mat6, PhaseVector, Vec3,
};

/// Eigenvalues with `|γ| dt²` below this use the Taylor series.
pub const SERIES_THRESHOLD: f64 = 0.5;

/// Highest perturbative order accepted.
pub const MAX_ORDER: usize = 3;

/// `𝒯(t, t₀)` together with its time stamps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionMatrix {
    pub matrix: Mat6,
    pub t0: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropagationMethod {
    /// Closed form; requires constant or uniformly rotating coefficients.
    Exact,
    /// Dyson-type recursion about the free particle.
    Perturbative { order: usize, nodes: usize },
    /// Fixed-step RK4.
    Oracle { step: f64 },
}

impl PropagationMethod {
    pub fn perturbative(order: usize) -> Self {
        PropagationMethod::Perturbative { order, nodes: DEFAULT_NODES }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PropagationMethod::Exact => Ok(()),
            PropagationMethod::Perturbative { order, nodes } => {
                if order > MAX_ORDER {
                    return Err(invalid(format!("perturbative order {order} exceeds {MAX_ORDER}")));
                }
                if nodes < 8 {
                    return Err(invalid("perturbative quadrature needs at least 8 nodes"));
                }
                Ok(())
            }
            PropagationMethod::Oracle { step } => {
                if !(step > 0.0 && step.is_finite()) {
                    return Err(invalid("oracle step must be positive"));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub step: f64,
}

/// `cos(√x) − 1` and `sin(√x)/√x − 1` for `x = γ dt²` of either sign.
fn oscillator_deviations(x: f64) -> (f64, f64) {
    if x.abs() < SERIES_THRESHOLD {
        // Σₙ (−x)ⁿ/(2n)! and Σₙ (−x)ⁿ/(2n+1)!, n ≥ 1.
        let (mut c, mut s) = (0.0, 0.0);
        let mut term = 1.0;
        for n in 1..=16 {
            term *= -x / ((2 * n - 1) * (2 * n)) as f64;
            c += term;
            s += term / (2 * n + 1) as f64;
        }
        return (c, s);
    }
    if x > 0.0 {
        let w = x.sqrt();
        let h = (0.5 * w).sin();
        (-2.0 * h * h, w.sin() / w - 1.0)
    } else {
        let w = (-x).sqrt();
        let h = (0.5 * w).sinh();
        (2.0 * h * h, w.sinh() / w - 1.0)
    }
}

/// `(cos(√γ t) − 1)/γ`, free of cancellation for small `γ t²`.
fn cos_minus_one_over_gamma(gamma: f64, t: f64) -> f64 {
    let x = gamma * t * t;
    if x.abs() < SERIES_THRESHOLD {
        let mut sum = 0.0;
        let mut term = -0.5;
        for n in 1..=16 {
            sum += term;
            term *= -x / ((2 * n + 1) * (2 * n + 2)) as f64;
        }
        return t * t * sum;
    }
    oscillator_deviations(x).0 / gamma
}

fn check_symmetric(gamma: &Mat3) -> Result<()> {
    if gamma.iter().any(|v| !v.is_finite()) {
        return Err(invalid("gradient contains non-finite entries"));
    }
    let scale = gamma.amax();
    if (gamma - gamma.transpose()).amax() > 1e-12 * scale {
        return Err(invalid("gradient must be symmetric"));
    }
    Ok(())
}

fn spectral(gamma: &Mat3, f: impl Fn(f64) -> f64) -> Mat3 {
    let sym = (gamma + gamma.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let v = eig.eigenvectors;
    let d = Mat3::from_diagonal(&eig.eigenvalues.map(f));
    v * d * v.transpose()
}

/// Exact evolution over `dt` for constant gradient `Γ`:
/// `[[cos, sin/(m√Γ)], [−m√Γ sin, cos]]` of `√Γ dt`, via the spectral decomposition of `Γ`.
pub fn evolve_constant(gamma: &Mat3, mass: f64, dt: f64) -> Result<EvolutionMatrix> {
    check_symmetric(gamma)?;
    if !(mass > 0.0) {
        return Err(invalid("mass must be positive"));
    }
    let matrix = if gamma.amax() == 0.0 || dt == 0.0 {
        free_evolution(mass, dt)
    } else {
        // Identity parts are added after the spectral sum so that small
        // deviations keep their relative precision.
        let id = Mat3::identity();
        let dev = |g: f64| oscillator_deviations(g * dt * dt);
        let c = id + spectral(gamma, |g| dev(g).0);
        let s = (id + spectral(gamma, |g| dev(g).1)) * dt;
        let q = spectral(gamma, |g| -g * dt * (1.0 + dev(g).1));
        from_blocks(&c, &(s / mass), &(q * mass), &c)
    };
    Ok(EvolutionMatrix { matrix, t0: 0.0, t: dt })
}

/// `[[I, dt/m I], [0, I]]`.
pub fn free_evolution(mass: f64, dt: f64) -> Mat6 {
    from_blocks(
        &Mat3::identity(),
        &(Mat3::identity() * (dt / mass)),
        &Mat3::zeros(),
        &Mat3::identity(),
    )
}

/// `(cos(√Γ t) − 1) Γ⁻¹`, the matrix entering the closed-form pulse phase.
pub fn cos_minus_one_over_gradient(gamma: &Mat3, t: f64) -> Result<Mat3> {
    check_symmetric(gamma)?;
    Ok(spectral(gamma, |g| cos_minus_one_over_gamma(g, t)))
}

/// `exp(𝒥ℋ dt)` for constant `ℋ`, evaluated in mass-balanced units.
pub fn evolve_hamiltonian(h: &Mat6, mass: f64, dt: f64) -> Result<Mat6> {
    if h.iter().any(|v| !v.is_finite()) {
        return Err(numerical("matrix exponential", "non-finite Hamiltonian"));
    }
    let gen = symplectic_form() * h * dt;
    let scaled = conjugate_scale(&gen, mass);
    // Cheap exact path for nilpotent generators such as the free particle.
    let sq = scaled * scaled;
    let e = if sq.amax() == 0.0 { Mat6::identity() + scaled } else { scaled.exp() };
    let out = conjugate_scale(&e, 1.0 / mass);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(numerical("matrix exponential", "non-finite result"));
    }
    Ok(out)
}

/// Perturbative evolution `Σ_{n≤order} 𝒯⁽ⁿ⁾(t, t₀)` about the constant `h0`, with
/// `𝒯⁽ⁿ⁾(t,t₀) = ∫ 𝒯⁽⁰⁾(t,t′) 𝒥 ℋ_I(t′) 𝒯⁽ⁿ⁻¹⁾(t′,t₀) dt′`.
pub fn evolve_perturbative(
    h0: &Mat6,
    hi: &dyn Fn(f64) -> Result<Mat6>,
    mass: f64,
    order: usize,
    nodes: usize,
    t: f64,
    t0: f64,
) -> Result<EvolutionMatrix> {
    PropagationMethod::Perturbative { order, nodes }.validate()?;
    let rule = GaussLegendre::new(nodes);
    let ctx = Dyson { h0, hi, mass, rule: &rule };
    let terms = ctx.terms(order, t, t0)?;
    let matrix = terms.iter().fold(Mat6::zeros(), |acc, m| acc + m);
    Ok(EvolutionMatrix { matrix, t0, t })
}

/// Individual orders `𝒯⁽⁰⁾ … 𝒯⁽ᵏ⁾`.
pub fn perturbative_terms(
    h0: &Mat6,
    hi: &dyn Fn(f64) -> Result<Mat6>,
    mass: f64,
    order: usize,
    nodes: usize,
    t: f64,
    t0: f64,
) -> Result<Vec<Mat6>> {
    PropagationMethod::Perturbative { order, nodes }.validate()?;
    let rule = GaussLegendre::new(nodes);
    Dyson { h0, hi, mass, rule: &rule }.terms(order, t, t0)
}

struct Dyson<'a> {
    h0: &'a Mat6,
    hi: &'a dyn Fn(f64) -> Result<Mat6>,
    mass: f64,
    rule: &'a GaussLegendre,
}

impl Dyson<'_> {
    fn terms(&self, order: usize, t: f64, t0: f64) -> Result<Vec<Mat6>> {
        let mut out = vec![evolve_hamiltonian(self.h0, self.mass, t - t0)?];
        if order == 0 || t == t0 {
            out.resize(order + 1, Mat6::zeros());
            return Ok(out);
        }
        let j = symplectic_form();
        let mut acc = vec![Mat6::zeros(); order];
        for (s, w) in self.rule.mapped(t0, t) {
            let hi = (self.hi)(s)?;
            if hi.iter().any(|v| !v.is_finite()) {
                return Err(numerical("perturbative quadrature", format!("non-finite interaction at t = {s}")));
            }
            let left = evolve_hamiltonian(self.h0, self.mass, t - s)? * j * hi;
            let inner = self.terms(order - 1, s, t0)?;
            for (n, a) in acc.iter_mut().enumerate() {
                *a += left * inner[n] * w;
            }
        }
        out.extend(acc);
        Ok(out)
    }
}

/// RK4 integration of `d𝒯/dt = 𝒥 ℋ(t) 𝒯` from `𝒯(t₀,t₀) = I`.
pub fn ode_oracle(h: &dyn Fn(f64) -> Result<Mat6>, t: f64, t0: f64, step: f64) -> Result<EvolutionMatrix> {
    let n = step_count(t, t0, step)?;
    if n < 10 && t != t0 {
        return Err(invalid("oracle step must split the interval into at least 10 steps"));
    }
    let matrix = rk4_matrix(h, t, t0, n)?;
    Ok(EvolutionMatrix { matrix, t0, t })
}

fn step_count(t: f64, t0: f64, step: f64) -> Result<usize> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("oracle step must be positive"));
    }
    let span = (t - t0).abs();
    // Tolerate rounding when the step divides the span.
    Ok(((span / step) * (1.0 - 1e-12)).ceil() as usize)
}

fn rk4_matrix(h: &dyn Fn(f64) -> Result<Mat6>, t: f64, t0: f64, n: usize) -> Result<Mat6> {
    let j = symplectic_form();
    let mut m = Mat6::identity();
    if n == 0 {
        return Ok(m);
    }
    let dt = (t - t0) / n as f64;
    let f = |s: f64, y: &Mat6| -> Result<Mat6> { Ok(j * h(s)? * y) };
    for i in 0..n {
        let s = t0 + dt * i as f64;
        let k1 = f(s, &m)?;
        let k2 = f(s + 0.5 * dt, &(m + k1 * (0.5 * dt)))?;
        let k3 = f(s + 0.5 * dt, &(m + k2 * (0.5 * dt)))?;
        let k4 = f(s + dt, &(m + k3 * dt))?;
        m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(numerical("ode oracle", "non-finite state"));
    }
    Ok(m)
}

/// RK4 integration of the full equation `dξ/dt = 𝒥ℋξ + 𝒥𝒢` from `ξ(t₀) = xi0`.
pub fn ode_oracle_inhomogeneous(
    coeffs: &dyn Coefficients,
    xi0: &PhaseVector,
    t: f64,
    t0: f64,
    opts: OdeOptions,
) -> Result<PhaseVector> {
    let n = step_count(t, t0, opts.step)?.max(1);
    let j = symplectic_form();
    let dt = (t - t0) / n as f64;
    let f = |s: f64, y: &PhaseVector| -> Result<PhaseVector> {
        Ok(j * (coeffs.hessian(s)? * y + coeffs.drive(s)?))
    };
    let mut y = *xi0;
    for i in 0..n {
        let s = t0 + dt * i as f64;
        let k1 = f(s, &y)?;
        let k2 = f(s + 0.5 * dt, &(y + k1 * (0.5 * dt)))?;
        let k3 = f(s + 0.5 * dt, &(y + k2 * (0.5 * dt)))?;
        let k4 = f(s + dt, &(y + k3 * dt))?;
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(y)
}

/// A coefficient set paired with a propagation method.
#[derive(Clone)]
pub struct Dynamics {
    coeffs: Arc<dyn Coefficients>,
    method: PropagationMethod,
    structure: Structure,
}

impl std::fmt::Debug for Dynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dynamics")
            .field("method", &self.method)
            .field("structure", &self.structure)
            .finish()
    }
}

impl Dynamics {
    pub fn new(coeffs: Arc<dyn Coefficients>, method: PropagationMethod) -> Result<Self> {
        method.validate()?;
        let structure = coeffs.structure();
        if method == PropagationMethod::Exact && structure == Structure::General {
            return Err(invalid(
                "exact propagation needs constant or uniformly rotating coefficients; use perturbative or oracle",
            ));
        }
        Ok(Self { coeffs, method, structure })
    }

    pub fn exact(coeffs: impl Coefficients + 'static) -> Result<Self> {
        Self::new(Arc::new(coeffs), PropagationMethod::Exact)
    }

    pub fn coefficients(&self) -> &dyn Coefficients {
        self.coeffs.as_ref()
    }

    pub fn method(&self) -> PropagationMethod {
        self.method
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.mass()
    }

    pub fn drive(&self, t: f64) -> Result<PhaseVector> {
        self.coeffs.drive(t)
    }

    /// `𝒯(t, t₀)`; either time order is allowed.
    pub fn evolve(&self, t: f64, t0: f64) -> Result<EvolutionMatrix> {
        let mass = self.mass();
        let dt = t - t0;
        let matrix = match self.method {
            PropagationMethod::Exact => match &self.structure {
                Structure::ConstantGradient(gamma) => evolve_constant(gamma, mass, dt)?.matrix,
                Structure::ConstantHessian(h) => evolve_hamiltonian(h, mass, dt)?,
                Structure::RotatingGradient { gamma0, omega } => {
                    rotating_gradient_evolution(gamma0, omega, mass, t, t0)?
                }
                Structure::General => unreachable!("rejected in Dynamics::new"),
            },
            PropagationMethod::Perturbative { order, nodes } => {
                let h0 = hessian_matrix(mass, &Mat3::zeros(), &Vec3::zeros());
                let coeffs = &self.coeffs;
                let hi = move |s: f64| -> Result<Mat6> { Ok(coeffs.hessian(s)? - h0) };
                evolve_perturbative(&h0, &hi, mass, order, nodes, t, t0)?.matrix
            }
            PropagationMethod::Oracle { step } => {
                let coeffs = &self.coeffs;
                let h = move |s: f64| coeffs.hessian(s);
                let n = step_count(t, t0, step)?.max(if dt == 0.0 { 0 } else { 10 });
                rk4_matrix(&h, t, t0, n)?
            }
        };
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(numerical("propagation", "non-finite evolution matrix"));
        }
        Ok(EvolutionMatrix { matrix, t0, t })
    }

    /// `𝒯(t,t₀) ∫ 𝒯⁻¹(t′,t₀) 𝒥 𝒢(t′) dt′`.
    pub fn particular_drift(&self, t: f64, t0: f64) -> Result<PhaseVector> {
        particular_drift(self, t, t0)
    }
}

/// Exact `𝒯` for `Γ(t) = R_{Ωt}Γ₀R_{Ωt}ᵀ`: in axes co-rotating with `Ω` the
/// Hamiltonian is constant with coupling `Ω·Λ`, and `ξ′ = diag(R, R) ξ″`.
fn rotating_gradient_evolution(gamma0: &Mat3, omega: &Vec3, mass: f64, t: f64, t0: f64) -> Result<Mat6> {
    let h = hessian_matrix(mass, gamma0, omega);
    let inner = evolve_hamiltonian(&h, mass, t - t0)?;
    let r = rotation_after(omega, t);
    let r0 = rotation_after(omega, t0);
    let d = from_blocks(&r, &Mat3::zeros(), &Mat3::zeros(), &r);
    let d0 = from_blocks(&r0, &Mat3::zeros(), &Mat3::zeros(), &r0);
    Ok(d * inner * d0.transpose())
}

/// Drift term of the Heisenberg solution by Gauss–Legendre quadrature.
pub fn particular_drift(dynamics: &Dynamics, t: f64, t0: f64) -> Result<PhaseVector> {
    if t == t0 {
        return Ok(PhaseVector::zeros());
    }
    let j = symplectic_form();
    let rule = GaussLegendre::default_rule();
    let panels = 4;
    let width = (t - t0) / panels as f64;
    let mut integral = PhaseVector::zeros();
    for k in 0..panels {
        let a = t0 + width * k as f64;
        for (s, w) in rule.mapped(a, a + width) {
            let g = dynamics.drive(s)?;
            if g.amax() == 0.0 {
                continue;
            }
            let inv = symplectic_inverse_unchecked(&dynamics.evolve(s, t0)?.matrix);
            integral += inv * (j * g) * w;
        }
    }
    Ok(dynamics.evolve(t, t0)?.matrix * integral)
}

/// `𝒯 ξ₀ + drift`.
pub fn general_solution(t: &EvolutionMatrix, drift: &PhaseVector, xi0: &PhaseVector) -> PhaseVector {
    t.matrix * xi0 + drift
}
