//! Gaussian initial states, characteristic and Wigner functions, and exit-port probabilities.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::error::{invalid, numerical, Result};
use crate::pulses::{compose_displacements, GeometrySummary, WeightedDisplacementSum};
use crate::symplectic::{apply_j, omega, phase_vector, Mat6, PhaseVector, Vec3, HBAR};

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Gaussian Wigner function with mean `⟨ξ₀⟩` and covariance `Σ₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: PhaseVector,
    covariance: Mat6,
    inverse: Mat6,
    log_det: f64,
}

impl GaussianState {
    /// Rejects covariances that are not symmetric positive definite. The
    /// uncertainty relation is not checked, so classical thermal states are allowed.
    pub fn new(mean: PhaseVector, covariance: Mat6) -> Result<Self> {
        if mean.iter().chain(covariance.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("state contains non-finite values"));
        }
        let scale = covariance.amax();
        if scale == 0.0 || (covariance - covariance.transpose()).amax() > 1e-12 * scale {
            if scale == 0.0 {
                return Err(invalid("covariance is zero"));
            }
            return Err(invalid("covariance must be symmetric"));
        }
        // Position and momentum variances differ by ~40 orders of magnitude in SI,
        // so factorize the correlation matrix instead.
        let d = covariance.diagonal();
        if d.iter().any(|&v| v <= 0.0) {
            return Err(invalid("covariance must be positive definite"));
        }
        let s = d.map(f64::sqrt);
        let corr = Mat6::from_fn(|i, j| covariance[(i, j)] / (s[i] * s[j]));
        let chol = corr
            .cholesky()
            .ok_or_else(|| invalid("covariance must be positive definite"))?;
        let inv_corr = chol.inverse();
        let inverse = Mat6::from_fn(|i, j| inv_corr[(i, j)] / (s[i] * s[j]));
        let log_det = 2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>()
            + d.iter().map(|v| v.ln()).sum::<f64>();
        Ok(Self { mean, covariance, inverse, log_det })
    }

    /// Uncorrelated thermal cloud: position widths `sigma_x`, momentum variance `m k_B T` per axis.
    pub fn thermal(mean: PhaseVector, sigma_x: Vec3, temperature: f64, mass: f64) -> Result<Self> {
        if !(temperature > 0.0 && mass > 0.0) || sigma_x.iter().any(|&v| !(v > 0.0)) {
            return Err(invalid("thermal state needs positive widths, temperature and mass"));
        }
        let vp = mass * BOLTZMANN * temperature;
        let diag = phase_vector(sigma_x.component_mul(&sigma_x), Vec3::repeat(vp));
        Self::new(mean, Mat6::from_diagonal(&diag))
    }

    /// Uncorrelated state from position and momentum widths.
    pub fn from_widths(mean: PhaseVector, sigma_x: Vec3, sigma_p: Vec3) -> Result<Self> {
        let diag = phase_vector(sigma_x.component_mul(&sigma_x), sigma_p.component_mul(&sigma_p));
        Self::new(mean, Mat6::from_diagonal(&diag))
    }

    pub fn mean(&self) -> &PhaseVector {
        &self.mean
    }

    pub fn covariance(&self) -> &Mat6 {
        &self.covariance
    }

    pub fn with_mean(&self, mean: PhaseVector) -> Self {
        Self { mean, ..self.clone() }
    }

    /// `ln det Σ₀`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }
}

fn envelope_exponent(state: &GaussianState, chi: &PhaseVector) -> f64 {
    let jc = apply_j(chi) / HBAR;
    -0.5 * (jc.transpose() * state.covariance * jc)[(0, 0)]
}

/// `η(χ) = exp(−(𝒥χ)ᵀΣ₀(𝒥χ)/2ħ² + (i/ħ)⟨ξ₀⟩ᵀ𝒥χ)`.
pub fn characteristic_function(state: &GaussianState, chi: &PhaseVector) -> Complex64 {
    Complex64::from_polar(envelope_exponent(state, chi).exp(), omega(&state.mean, chi) / HBAR)
}

/// Normalized 6-D Gaussian density.
pub fn wigner_value(state: &GaussianState, xi: &PhaseVector) -> f64 {
    let d = xi - state.mean;
    let q = (d.transpose() * state.inverse * d)[(0, 0)];
    let ln_norm = -0.5 * (6.0 * (2.0 * std::f64::consts::PI).ln() + state.log_det);
    (ln_norm - 0.5 * q).exp()
}

/// `V = exp(−(𝒥χ_I)ᵀΣ₀(𝒥χ_I)/2ħ²)`.
pub fn visibility(state: &GaussianState, chi_i: &PhaseVector) -> f64 {
    envelope_exponent(state, chi_i).exp()
}

/// The three contributions to the total phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseDecomposition {
    pub phi_i: f64,
    /// `χ₀ᵀ𝒥χ_I / 2ħ`.
    pub bch: f64,
    /// `⟨ξ₀⟩ᵀ𝒥χ_I / ħ`.
    pub mean_term: f64,
}

impl PhaseDecomposition {
    pub fn total(&self) -> f64 {
        self.phi_i + self.bch + self.mean_term
    }
}

pub fn phase_decomposition(summary: &GeometrySummary, state: &GaussianState) -> PhaseDecomposition {
    PhaseDecomposition {
        phi_i: summary.phi_i,
        bch: summary.bch_phase,
        mean_term: omega(&state.mean, &summary.chi_i) / HBAR,
    }
}

/// `ΔΦ = Φ_I + (1/ħ)[χ₀/2 + ⟨ξ₀⟩]ᵀ𝒥χ_I`.
pub fn total_phase(summary: &GeometrySummary, state: &GaussianState) -> f64 {
    phase_decomposition(summary, state).total()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub probability: f64,
    pub visibility: f64,
    pub total_phase: f64,
    /// `(−1)ⁿ` for final pulse index `n`.
    pub sign: f64,
    pub decomposition: PhaseDecomposition,
}

/// Ground-state probability `½[1 + (−1)ⁿ V cos ΔΦ]`.
pub fn detection_probability(summary: &GeometrySummary, state: &GaussianState) -> DetectionResult {
    let decomposition = phase_decomposition(summary, state);
    let total_phase = decomposition.total();
    let v = visibility(state, &summary.chi_i);
    let sign = summary.sign();
    let probability = 0.5 * (1.0 + sign * v * total_phase.cos());
    DetectionResult { probability, visibility: v, total_phase, sign, decomposition }
}

/// `⟨Ô†Ô⟩` for `Ô = Σ Aₐ D(χₐ)`, evaluated through the characteristic function.
pub fn detection_probability_general(entry: &WeightedDisplacementSum, state: &GaussianState) -> Result<f64> {
    general_expectation(entry, |chi| characteristic_function(state, chi))
}

/// `⟨Ô†Ô⟩` for any characteristic function `η`.
pub fn general_expectation(entry: &WeightedDisplacementSum, eta: impl Fn(&PhaseVector) -> Complex64) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    let terms = &entry.terms;
    for (a, ta) in terms.iter().enumerate() {
        for tb in &terms[a..] {
            // D(−χₐ)D(χ_b) = D(χ_b − χₐ) e^{iω(χ_b, −χₐ)/2ħ}
            let (chi, bch) = compose_displacements(&-ta.chi, &tb.chi);
            let phase = tb.phase - ta.phase + bch;
            let z = ta.amplitude.conj() * tb.amplitude * Complex64::cis(phase) * eta(&chi);
            // The (b, a) term is the complex conjugate.
            total += if std::ptr::eq(ta, tb) { z } else { z + z.conj() };
        }
    }
    if !total.re.is_finite() {
        return Err(numerical("detection", "non-finite probability"));
    }
    Ok(total.re)
}

/// Fit of `P(φ) = offset + amplitude·cos(φ + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Linear least squares on `{1, cos φ, sin φ}`; exact for three or more distinct phases.
pub fn fit_fringe(phases: &[f64], probabilities: &[f64]) -> Result<FringeFit> {
    if phases.len() != probabilities.len() || phases.len() < 3 {
        return Err(invalid("fringe fit needs at least three matching samples"));
    }
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (&phi, &p) in phases.iter().zip(probabilities) {
        let row = Vector3::new(1.0, phi.cos(), phi.sin());
        ata += row * row.transpose();
        atb += row * p;
    }
    let x = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| numerical("fringe fit", "degenerate sample phases"))?;
    // b cos φ + c sin φ = A cos(φ + ψ) with A = √(b²+c²), ψ = −atan2(c, b).
    Ok(FringeFit { offset: x[0], amplitude: x[1].hypot(x[2]), phase: -x[2].atan2(x[1]) })
}

impl FringeFit {
    /// Recovers `(ΔΦ₀ mod 2π, V)` when the scanned phase enters as `ΔΦ₀ + c φ`
    /// and the fringe is `½[1 + s V cos(·)]`.
    pub fn interferometer_phase(&self, sign: f64, coefficient: f64) -> (f64, f64) {
        let mut psi = self.phase;
        if sign < 0.0 {
            psi += std::f64::consts::PI;
        }
        let phase = (psi * coefficient.signum()).rem_euclid(std::f64::consts::TAU);
        (phase, 2.0 * self.amplitude)
    }
}

/// Difference of two angles reduced to `(−π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    if d > std::f64::consts::PI {
        d - std::f64::consts::TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulses::{compose_beam_splitters, geometry_summary, PulseEffect};
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    const M: f64 = 1.443e-25;

    fn state() -> GaussianState {
        let mean = phase_vector(Vec3::new(1e-4, -2e-4, 5e-5), Vec3::new(1e-29, 2e-29, -1e-29));
        GaussianState::thermal(mean, Vec3::new(1e-4, 2e-4, 1.5e-4), 1e-7, M).unwrap()
    }

    fn chi(x: f64, p: f64) -> PhaseVector {
        phase_vector(Vec3::new(0.3 * x, -0.2 * x, x), Vec3::new(0.1 * p, 0.4 * p, p))
    }

    #[test]
    fn rejects_bad_covariance() {
        let mut c = Mat6::identity();
        c[(0, 1)] = 0.5;
        assert!(GaussianState::new(PhaseVector::zeros(), c).is_err());
        c[(1, 0)] = 0.5;
        assert!(GaussianState::new(PhaseVector::zeros(), c).is_ok());
        c[(0, 1)] = 2.0;
        c[(1, 0)] = 2.0;
        assert!(GaussianState::new(PhaseVector::zeros(), c).is_err());
        assert!(GaussianState::new(PhaseVector::zeros(), Mat6::zeros()).is_err());
    }

    #[test]
    fn characteristic_basics() {
        let s = state();
        assert_eq!(characteristic_function(&s, &PhaseVector::zeros()), Complex64::new(1.0, 0.0));
        let centered = s.with_mean(PhaseVector::zeros());
        let e = characteristic_function(&centered, &chi(1e-7, 1e-31));
        assert!(e.im == 0.0 && e.re > 0.0 && e.re <= 1.0);
    }

    #[test]
    fn wigner_peak_and_symmetry() {
        let s = state();
        let peak = wigner_value(&s, s.mean());
        let expected = 1.0 / ((2.0 * PI).powi(6) * s.covariance().determinant()).sqrt();
        assert!((peak - expected).abs() < 1e-10 * expected);
        let d = chi(3e-5, 2e-30);
        let a = wigner_value(&s, &(s.mean() + d));
        let b = wigner_value(&s, &(s.mean() - d));
        assert!((a - b).abs() <= 1e-14 * a);
        assert!(a < peak);
    }

    #[test]
    fn visibility_scaling() {
        let s = state();
        assert_eq!(visibility(&s, &PhaseVector::zeros()), 1.0);
        let c = chi(2e-6, 3e-30);
        let v1 = visibility(&s, &c);
        let v2 = visibility(&s, &(c * 2.0));
        assert!(v1 < 1.0);
        assert!((v2.ln() - 4.0 * v1.ln()).abs() < 1e-12 * v1.ln().abs());
    }

    fn effects(chis: &[PhaseVector], phis: &[f64], areas: &[f64]) -> Vec<PulseEffect> {
        chis.iter()
            .zip(phis)
            .zip(areas)
            .map(|((&c, &p), &a)| PulseEffect { time: 0.0, area: a, chi: c, phi: p, chi_minus: c, phi_minus: p })
            .collect()
    }

    #[test]
    fn closed_form_matches_operator_path() {
        let s = state();
        let c = [chi(0.0, 2e-27), chi(-3e-6, 2.1e-27), chi(-5e-6, 1.9e-27), chi(-8e-6, 2.05e-27)];
        let p = [0.3, 1e5 + 0.1, 2e5 - 0.4, 3e5 + 0.2];
        for n in [3usize, 4] {
            let areas: Vec<f64> = (0..n).map(|i| if i == 0 || i + 1 == n { FRAC_PI_2 } else { PI }).collect();
            let e = effects(&c[..n], &p[..n], &areas);
            let summary = geometry_summary(&e).unwrap();
            let closed = detection_probability(&summary, &s);
            let u = compose_beam_splitters(&e).unwrap();
            let general = detection_probability_general(&u[0][0], &s).unwrap();
            assert!((closed.probability - general).abs() < 1e-12, "n = {n}");
            let excited = detection_probability_general(&u[1][0], &s).unwrap();
            assert!((general + excited - 1.0).abs() < 1e-10);
            assert!(closed.visibility < 1.0);
        }
    }

    #[test]
    fn standard_port_values() {
        let s = state();
        let zero = [PhaseVector::zeros(); 4];
        let areas = [FRAC_PI_2, PI, PI, FRAC_PI_2];
        let mz = geometry_summary(&effects(&zero[..3], &[0.0; 3], &[FRAC_PI_2, PI, FRAC_PI_2])).unwrap();
        assert_eq!(detection_probability(&mz, &s).probability, 1.0);
        let bu = geometry_summary(&effects(&zero, &[0.0; 4], &areas)).unwrap();
        assert_eq!(detection_probability(&bu, &s).probability, 0.0);
    }

    #[test]
    fn impure_pulses_conserve_probability() {
        let s = state();
        let c = [chi(0.0, 2e-27), chi(-3e-6, 2.1e-27), chi(-5e-6, 1.9e-27)];
        let e = effects(&c, &[0.1, 0.7, -0.3], &[FRAC_PI_2 + 0.1, PI - 0.05, FRAC_PI_2 + 0.1]);
        let u = compose_beam_splitters(&e).unwrap();
        let a = detection_probability_general(&u[0][0], &s).unwrap();
        let b = detection_probability_general(&u[1][0], &s).unwrap();
        assert!((a + b - 1.0).abs() < 1e-10);
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn single_displacement_has_unit_norm() {
        let entry = WeightedDisplacementSum::single(Complex64::cis(0.4), 12.0, chi(1e-6, 1e-27));
        assert!((detection_probability_general(&entry, &state()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fringe_fit_recovers_phase() {
        for (sign, coeff) in [(1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
            let phase0 = 2.345;
            let v = 0.73;
            let phis: Vec<f64> = (0..3).map(|i| TAU * i as f64 / 3.0).collect();
            let probs: Vec<f64> =
                phis.iter().map(|&f| 0.5 * (1.0 + sign * v * (phase0 + coeff * f).cos())).collect();
            let fit = fit_fringe(&phis, &probs).unwrap();
            let (p, vis) = fit.interferometer_phase(sign, coeff);
            assert!(angle_difference(p, phase0).abs() < 1e-12);
            assert!((vis - v).abs() < 1e-12);
        }
    }
}
