//! Laser pulses as phase-space displacements: displacement vectors `χₙ`,
//! generalized phases `Φₙ`, the displacement-operator algebra, the vertex rule,
//! and products of generalized beam-splitter matrices.

use num_complex::Complex64;

use crate::error::{invalid, numerical, Result};
use crate::propagation::Dynamics;
use crate::quadrature::GaussLegendre;
use crate::rotations::rotate_wave_vector;
use crate::symplectic::{momentum, omega, phase_vector, position, PhaseVector, Vec3, HBAR};

/// One laser interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub time: f64,
    /// Wave vector transferred on excitation `|0⟩ → |1⟩`.
    pub k_plus: Vec3,
    /// Wave vector transferred on de-excitation; equals `k_plus` for symmetric kicks.
    pub k_minus: Vec3,
    pub laser_phase: f64,
    /// Pulse area `Θ`.
    pub area: f64,
}

impl PulseSpec {
    pub fn symmetric(time: f64, k: Vec3, laser_phase: f64, area: f64) -> Self {
        Self { time, k_plus: k, k_minus: k, laser_phase, area }
    }

    pub fn is_symmetric(&self) -> bool {
        self.k_plus == self.k_minus
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0 && self.area < std::f64::consts::TAU) {
            return Err(invalid(format!("pulse area {} outside (0, 2 pi)", self.area)));
        }
        let vals = [self.time, self.laser_phase];
        if vals.iter().chain(self.k_plus.iter()).chain(self.k_minus.iter()).any(|v| !v.is_finite()) {
            return Err(invalid("pulse contains non-finite values"));
        }
        Ok(())
    }
}

/// `χ̄ = (0, ħk)`.
pub fn kick(k: &Vec3) -> PhaseVector {
    phase_vector(Vec3::zeros(), k * HBAR)
}

/// Displacement and generalized phase of one pulse, for both kick directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEffect {
    pub time: f64,
    pub area: f64,
    pub chi: PhaseVector,
    pub phi: f64,
    pub chi_minus: PhaseVector,
    pub phi_minus: f64,
}

impl PulseEffect {
    pub fn is_symmetric(&self) -> bool {
        self.chi == self.chi_minus && self.phi == self.phi_minus
    }
}

/// Builds a sequence of symmetric pulses with wave vectors rotating at `laser_rotation`.
pub fn rotating_sequence(k0: &Vec3, laser_rotation: &Vec3, times: &[f64], phases: &[f64], areas: &[f64]) -> Vec<PulseSpec> {
    times
        .iter()
        .zip(phases)
        .zip(areas)
        .map(|((&t, &phi), &area)| PulseSpec::symmetric(t, rotate_wave_vector(k0, laser_rotation, t), phi, area))
        .collect()
}

/// Mach-Zehnder sequence at `t₀, t₀+T₁, t₀+T₁+T₂`.
pub fn mach_zehnder(k0: &Vec3, laser_rotation: &Vec3, t0: f64, t1: f64, t2: f64, phases: [f64; 3]) -> Vec<PulseSpec> {
    let times = [t0, t0 + t1, t0 + t1 + t2];
    rotating_sequence(k0, laser_rotation, &times, &phases, &standard_areas(3))
}

/// Butterfly sequence at `t₀, t₀+T, t₀+3T, t₀+4T`.
pub fn butterfly(k0: &Vec3, laser_rotation: &Vec3, t0: f64, t: f64, phases: [f64; 4]) -> Vec<PulseSpec> {
    let times = [t0, t0 + t, t0 + 3.0 * t, t0 + 4.0 * t];
    rotating_sequence(k0, laser_rotation, &times, &phases, &standard_areas(4))
}

/// Checks each pulse and that times increase strictly.
pub fn validate_sequence(pulses: &[PulseSpec]) -> Result<()> {
    if pulses.is_empty() {
        return Err(invalid("pulse sequence is empty"));
    }
    for p in pulses {
        p.validate()?;
    }
    if pulses.windows(2).any(|w| !(w[1].time > w[0].time)) {
        return Err(invalid("pulse times must increase strictly"));
    }
    Ok(())
}

/// Effects of a whole sequence, referenced to `t₀`.
pub fn sequence_effects(pulses: &[PulseSpec], dynamics: &Dynamics, t0: f64) -> Result<Vec<PulseEffect>> {
    validate_sequence(pulses)?;
    pulses.iter().map(|p| pulse_effect(p, dynamics, t0)).collect()
}

/// Standard areas `π/2, π, …, π, π/2` for `n` pulses.
pub fn standard_areas(n: usize) -> Vec<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    (0..n).map(|i| if i == 0 || i + 1 == n { FRAC_PI_2 } else { PI }).collect()
}

/// `χₙ = 𝒯(t₀,tₙ) χ̄ₙ` and `Φₙ = φₙ + (1/ħ)∫_{t₀}^{tₙ} [𝒯(t′,tₙ)χ̄ₙ]ᵀ 𝒢(t′) dt′`.
pub fn pulse_effect(pulse: &PulseSpec, dynamics: &Dynamics, t0: f64) -> Result<PulseEffect> {
    pulse.validate()?;
    if pulse.time < t0 {
        return Err(invalid("pulse precedes the reference time"));
    }
    let (chi, phi) = displacement_and_phase(&pulse.k_plus, pulse.laser_phase, pulse.time, dynamics, t0)?;
    let (chi_minus, phi_minus) = if pulse.is_symmetric() {
        (chi, phi)
    } else {
        displacement_and_phase(&pulse.k_minus, pulse.laser_phase, pulse.time, dynamics, t0)?
    };
    Ok(PulseEffect { time: pulse.time, area: pulse.area, chi, phi, chi_minus, phi_minus })
}

fn displacement_and_phase(k: &Vec3, laser_phase: f64, tn: f64, dynamics: &Dynamics, t0: f64) -> Result<(PhaseVector, f64)> {
    let kick = kick(k);
    let chi = dynamics.evolve(t0, tn)?.matrix * kick;
    // ħ cancels between the kick and the prefactor.
    let unit = phase_vector(Vec3::zeros(), *k);
    let mut integral = 0.0;
    if tn > t0 {
        let rule = GaussLegendre::default_rule();
        let panels = phase_panels(dynamics, tn - t0)?;
        let width = (tn - t0) / panels as f64;
        for p in 0..panels {
            let a = t0 + width * p as f64;
            for (s, w) in rule.mapped(a, a + width) {
                let g = dynamics.drive(s)?;
                if g.amax() == 0.0 {
                    continue;
                }
                let v = dynamics.evolve(s, tn)?.matrix * unit;
                integral += w * v.dot(&g);
            }
        }
    }
    let phi = laser_phase + integral;
    if !phi.is_finite() || chi.iter().any(|v| !v.is_finite()) {
        return Err(numerical("pulse effect", "non-finite displacement or phase"));
    }
    Ok((chi, phi))
}

/// One 32-node panel per radian of oscillation, at least one.
fn phase_panels(dynamics: &Dynamics, span: f64) -> Result<usize> {
    let c = dynamics.coefficients();
    let rate = (3.0 * c.gradient(0.0)?.amax()).sqrt() + c.coupling().norm();
    Ok(1 + (rate * span).floor().min(1e4) as usize)
}

/// Closed-form phase for constant `Γ` and uniform `g`:
/// `φ − gᵀ[(cos(√Γ τ) − 1)/Γ] k`.
pub fn constant_gradient_phase(gamma: &crate::Mat3, g: &Vec3, k: &Vec3, tau: f64, laser_phase: f64) -> Result<f64> {
    let c = crate::propagation::cos_minus_one_over_gradient(gamma, tau)?;
    Ok(laser_phase - g.dot(&(c * k)))
}

/// `D(χ₁)D(χ₀) = D(χ₁+χ₀) exp(i χ₀ᵀ𝒥χ₁ / 2ħ)`; returns the sum and the phase.
pub fn compose_displacements(chi1: &PhaseVector, chi0: &PhaseVector) -> (PhaseVector, f64) {
    (chi1 + chi0, omega(chi0, chi1) / (2.0 * HBAR))
}

/// `D(−χₒ)D(χₘ)D(−χₒ) = D(χₘ − 2χₒ)`.
pub fn sandwich(chi_mid: &PhaseVector, chi_outer: &PhaseVector) -> PhaseVector {
    chi_mid - chi_outer * 2.0
}

/// `[1, −2, 2, …, (−1)ⁿ]` for `n_pulses = n + 1`.
pub fn vertex_coefficients(n_pulses: usize) -> Result<Vec<f64>> {
    if n_pulses < 2 {
        return Err(invalid("a geometry needs at least two pulses"));
    }
    let n = n_pulses - 1;
    Ok((0..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            if i == 0 || i == n {
                sign
            } else {
                2.0 * sign
            }
        })
        .collect())
}

/// Aggregates of a standard π/2–π–…–π/2 geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometrySummary {
    pub coefficients: Vec<f64>,
    pub phi_i: f64,
    pub chi_i: PhaseVector,
    pub chi_0: PhaseVector,
    /// `χ₀ᵀ𝒥χ_I / 2ħ`.
    pub bch_phase: f64,
    /// Index of the final pulse.
    pub pulse_count: usize,
}

impl GeometrySummary {
    /// `(−1)ⁿ`.
    pub fn sign(&self) -> f64 {
        if self.pulse_count % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Vertex rule: `Φ_I = Σ cᵢΦᵢ`, `χ_I = Σ cᵢχᵢ`.
pub fn geometry_summary(effects: &[PulseEffect]) -> Result<GeometrySummary> {
    if effects.len() < 3 {
        return Err(invalid("geometry summary needs at least three pulses"));
    }
    if effects.iter().any(|e| !e.is_symmetric()) {
        return Err(invalid("the vertex rule requires symmetric kicks; use compose_beam_splitters"));
    }
    let coefficients = vertex_coefficients(effects.len())?;
    let phi_i = coefficients.iter().zip(effects).map(|(c, e)| c * e.phi).sum();
    let chi_i = coefficients
        .iter()
        .zip(effects)
        .fold(PhaseVector::zeros(), |acc, (c, e)| acc + e.chi * *c);
    let chi_0 = effects[0].chi;
    let bch_phase = omega(&chi_0, &chi_i) / (2.0 * HBAR);
    Ok(GeometrySummary { coefficients, phi_i, chi_i, chi_0, bch_phase, pulse_count: effects.len() - 1 })
}

/// One term `a e^{iθ} D(χ)`. The phase is kept apart from the amplitude so that
/// large accumulated phases combine by addition without losing digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub amplitude: Complex64,
    pub phase: f64,
    pub chi: PhaseVector,
}

impl Term {
    pub fn value(&self) -> Complex64 {
        self.amplitude * Complex64::cis(self.phase)
    }
}

/// Operator `Σ aⱼ e^{iθⱼ} D(χⱼ)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WeightedDisplacementSum {
    pub terms: Vec<Term>,
}

/// Amplitudes below this are dropped; removes `cos(π/2)` residues.
const AMPLITUDE_FLOOR: f64 = 1e-15;
/// Relative tolerance for treating two displacements as equal.
const MERGE_TOL: f64 = 1e-12;

impl WeightedDisplacementSum {
    pub fn scalar(amplitude: Complex64) -> Self {
        Self::single(amplitude, 0.0, PhaseVector::zeros())
    }

    pub fn single(amplitude: Complex64, phase: f64, chi: PhaseVector) -> Self {
        let mut s = Self::default();
        s.push(Term { amplitude, phase, chi });
        s
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, term: Term) {
        if term.amplitude.norm() < AMPLITUDE_FLOOR {
            return;
        }
        self.terms.push(term);
    }

    /// Operator sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().copied());
        out.merge();
        out
    }

    /// Operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for a in &self.terms {
            for b in &other.terms {
                let (chi, bch) = compose_displacements(&a.chi, &b.chi);
                out.push(Term { amplitude: a.amplitude * b.amplitude, phase: a.phase + b.phase + bch, chi });
            }
        }
        out.merge();
        out
    }

    fn merge(&mut self) {
        let sx = self.terms.iter().map(|t| position(&t.chi).amax()).fold(0.0, f64::max);
        let sp = self.terms.iter().map(|t| momentum(&t.chi).amax()).fold(0.0, f64::max);
        let same = |a: &PhaseVector, b: &PhaseVector| {
            (position(a) - position(b)).amax() <= MERGE_TOL * sx && (momentum(a) - momentum(b)).amax() <= MERGE_TOL * sp
        };
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            if let Some(m) = merged.iter_mut().find(|m| same(&m.chi, &t.chi)) {
                m.amplitude += t.amplitude * Complex64::cis(t.phase - m.phase);
            } else {
                merged.push(t);
            }
        }
        merged.retain(|t| t.amplitude.norm() >= AMPLITUDE_FLOOR);
        self.terms = merged;
    }
}

/// 2×2 operator-valued matrix in the basis `(|0⟩, |1⟩)`.
pub type OperatorMatrix = [[WeightedDisplacementSum; 2]; 2];

/// Generalized beam splitter:
/// `[[cos(Θ/2), −i sin(Θ/2) e^{−iΦ⁻} D(−χ⁻)], [−i sin(Θ/2) e^{iΦ⁺} D(χ⁺), cos(Θ/2)]]`.
pub fn beam_splitter(effect: &PulseEffect) -> OperatorMatrix {
    let c = Complex64::new((0.5 * effect.area).cos(), 0.0);
    let s = Complex64::new(0.0, -(0.5 * effect.area).sin());
    [
        [
            WeightedDisplacementSum::scalar(c),
            WeightedDisplacementSum::single(s, -effect.phi_minus, -effect.chi_minus),
        ],
        [
            WeightedDisplacementSum::single(s, effect.phi, effect.chi),
            WeightedDisplacementSum::scalar(c),
        ],
    ]
}

fn matmul(a: &OperatorMatrix, b: &OperatorMatrix) -> OperatorMatrix {
    let entry = |i: usize, j: usize| a[i][0].mul(&b[0][j]).add(&a[i][1].mul(&b[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `U = Sₙ ⋯ S₀`.
pub fn compose_beam_splitters(effects: &[PulseEffect]) -> Result<OperatorMatrix> {
    let first = effects.first().ok_or_else(|| invalid("at least one pulse required"))?;
    let mut u = beam_splitter(first);
    for e in &effects[1..] {
        u = matmul(&beam_splitter(e), &u);
    }
    Ok(u)
}

/// `reference⁻¹ · other` as `(amplitude ratio, phase, displacement)`.
pub fn relative_term(reference: &Term, other: &Term) -> (Complex64, f64, PhaseVector) {
    let (chi, bch) = compose_displacements(&-reference.chi, &other.chi);
    (other.amplitude / reference.amplitude, other.phase - reference.phase + bch, chi)
}
