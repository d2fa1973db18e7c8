//! Evaluation of a scenario: single point, scans, fringe fit, series comparison.

use std::sync::Arc;

use rayon::prelude::*;

use quadphase::expansions::{delta_phi_butterfly_series, delta_phi_mz_series, phi_mz_noninertial_series, ExpansionParams};
use quadphase::frames::{CoefficientSet, GravityModel, RotatingFieldCoefficients, Trajectory};
use quadphase::propagation::{Dynamics, PropagationMethod};
use quadphase::pulses::{
    compose_beam_splitters, geometry_summary, rotating_sequence, sequence_effects, standard_areas, PulseSpec,
};
use quadphase::rotations::rotate_wave_vector;
use quadphase::states::{angle_difference, detection_probability, detection_probability_general, fit_fringe};
use quadphase::symplectic::{momentum, position};
use quadphase::states::GaussianState;
use quadphase::{PhaseVector, HBAR};

use crate::error::{CliError, CliResult};
use crate::scenario::{pulse_times, shorthand_pulses, Experiment, Geometry, Scan, ScanVariable};

/// Result for one pulse sequence. Phase and visibility exist only for standard
/// geometries with symmetric kicks.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub probability: f64,
    pub visibility: Option<f64>,
    pub total_phase: Option<f64>,
    pub sign: Option<f64>,
    pub phi_i: Option<f64>,
    pub bch: Option<f64>,
    pub mean_term: Option<f64>,
    pub chi_i: Option<PhaseVector>,
    pub chi_0: Option<PhaseVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub value: f64,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeResult {
    /// Phase recovered at zero final laser phase, in `[0, 2π)`.
    pub fitted_phase: f64,
    pub fitted_visibility: f64,
    pub expected_phase: f64,
    /// `fitted − expected` reduced to `(−π, π]`.
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub scale: f64,
    pub exact: f64,
    pub series: f64,
    pub residual: f64,
    /// Rounding estimate of the exact phase.
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesComparison {
    pub series: &'static str,
    pub rows: Vec<SeriesRow>,
    /// `log₂` of successive residual ratios.
    pub exponents: Vec<f64>,
    /// Set when a residual is within twice its rounding estimate.
    pub noise_floor: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub nominal: Evaluation,
    pub scan: Option<(Scan, Vec<ScanPoint>)>,
    pub fringe: Option<FringeResult>,
    pub series: Option<SeriesComparison>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunFlags {
    pub scan: bool,
    pub compare_series: bool,
}

fn numerical(stage: &str, err: quadphase::Error) -> CliError {
    match err {
        quadphase::Error::Numerical { stage, detail } => CliError::Numerical { stage: stage.to_string(), message: detail },
        other => CliError::Numerical { stage: stage.to_string(), message: other.to_string() },
    }
}

fn is_standard(pulses: &[PulseSpec]) -> bool {
    let areas = standard_areas(pulses.len());
    pulses.len() >= 3
        && pulses.iter().all(PulseSpec::is_symmetric)
        && pulses.iter().zip(&areas).all(|(p, a)| (p.area - a).abs() <= 1e-12)
}

pub fn evaluate(dynamics: &Dynamics, pulses: &[PulseSpec], t0: f64, state: &GaussianState) -> CliResult<Evaluation> {
    let effects = sequence_effects(pulses, dynamics, t0).map_err(|e| numerical("pulse effects", e))?;
    if is_standard(pulses) {
        let summary = geometry_summary(&effects).map_err(|e| numerical("geometry summary", e))?;
        let r = detection_probability(&summary, state);
        if !(r.probability.is_finite() && r.total_phase.is_finite()) {
            return Err(CliError::Numerical { stage: "detection".into(), message: "non-finite result".into() });
        }
        return Ok(Evaluation {
            probability: r.probability,
            visibility: Some(r.visibility),
            total_phase: Some(r.total_phase),
            sign: Some(r.sign),
            phi_i: Some(r.decomposition.phi_i),
            bch: Some(r.decomposition.bch),
            mean_term: Some(r.decomposition.mean_term),
            chi_i: Some(summary.chi_i),
            chi_0: Some(summary.chi_0),
        });
    }
    let u = compose_beam_splitters(&effects).map_err(|e| numerical("beam splitters", e))?;
    let probability = detection_probability_general(&u[0][0], state).map_err(|e| numerical("detection", e))?;
    Ok(Evaluation {
        probability,
        visibility: None,
        total_phase: None,
        sign: None,
        phi_i: None,
        bch: None,
        mean_term: None,
        chi_i: None,
        chi_0: Some(effects[0].chi),
    })
}

/// Pulse sequence at one scan value.
pub fn pulses_at(exp: &Experiment, variable: ScanVariable, value: f64) -> CliResult<Vec<PulseSpec>> {
    match variable {
        ScanVariable::LaserPhaseLast => {
            let mut pulses = exp.pulses.clone();
            if let Some(last) = pulses.last_mut() {
                last.laser_phase = value;
            }
            Ok(pulses)
        }
        ScanVariable::PulseSeparation => {
            let geometry = match exp.geometry {
                Geometry::MachZehnder { .. } => Geometry::MachZehnder { t1: value, t2: value },
                Geometry::Butterfly { .. } => Geometry::Butterfly { t: value },
                _ => return Err(CliError::config("scan.variable", "`T` scans need a shorthand geometry")),
            };
            let areas: Vec<f64> = exp.pulses.iter().map(|p| p.area).collect();
            shorthand_pulses(&geometry, &exp.k0, &exp.frame.laser_rotation, exp.t0, &exp.laser_phases, Some(&areas))
        }
    }
}

pub fn run(exp: &Experiment, flags: RunFlags) -> CliResult<RunOutput> {
    let nominal = evaluate(&exp.dynamics, &exp.pulses, exp.t0, &exp.state)?;
    let mut scan = None;
    let mut fringe = None;
    if flags.scan {
        let s = exp.scan.clone().ok_or_else(|| CliError::config("scan", "missing; required by --scan"))?;
        let values = s.values();
        let points = values
            .par_iter()
            .map(|&v| {
                let pulses = pulses_at(exp, s.variable, v)?;
                Ok(ScanPoint { value: v, evaluation: evaluate(&exp.dynamics, &pulses, exp.t0, &exp.state)? })
            })
            .collect::<CliResult<Vec<_>>>()?;
        if s.variable == ScanVariable::LaserPhaseLast && is_standard(&exp.pulses) && points.len() >= 3 {
            fringe = Some(fit_scan(exp, &nominal, &points)?);
        }
        scan = Some((s, points));
    }
    let series = if flags.compare_series { Some(compare_series(exp)?) } else { None };
    Ok(RunOutput { nominal, scan, fringe, series })
}

fn fit_scan(exp: &Experiment, nominal: &Evaluation, points: &[ScanPoint]) -> CliResult<FringeResult> {
    let phases: Vec<f64> = points.iter().map(|p| p.value).collect();
    let probs: Vec<f64> = points.iter().map(|p| p.evaluation.probability).collect();
    let fit = fit_fringe(&phases, &probs).map_err(|e| numerical("fringe fit", e))?;
    let n = exp.pulses.len();
    let c_last = if n % 2 == 1 { 1.0 } else { -1.0 };
    let sign = nominal.sign.unwrap_or(1.0);
    let (fitted_phase, fitted_visibility) = fit.interferometer_phase(sign, c_last);
    let nominal_last = exp.pulses[n - 1].laser_phase;
    let expected = nominal.total_phase.unwrap_or(0.0) - c_last * nominal_last;
    let expected_phase = expected.rem_euclid(std::f64::consts::TAU);
    Ok(FringeResult {
        fitted_phase,
        fitted_visibility,
        expected_phase,
        difference: angle_difference(fitted_phase, expected_phase),
    })
}

/// Halving study `s = 1, ½, ¼` of all gradients and rotation rates, comparing the
/// exact engine with the matching closed-form series.
pub fn compare_series(exp: &Experiment) -> CliResult<SeriesComparison> {
    let n = exp.pulses.len();
    let (t, butterfly) = match exp.geometry {
        Geometry::MachZehnder { t1, t2 } if t1 == t2 => (t1, false),
        Geometry::Butterfly { t } => (t, true),
        _ => {
            return Err(CliError::config(
                "pulses.geometry",
                "--compare-series needs a symmetric mach_zehnder or butterfly shorthand",
            ))
        }
    };
    if !is_standard(&exp.pulses) {
        return Err(CliError::config("pulses.areas", "--compare-series needs standard pulse areas"));
    }
    if exp.method != PropagationMethod::Exact {
        return Err(CliError::config("method", "--compare-series uses the exact engine"));
    }
    let coeffs = exp.dynamics.coefficients();
    let t0 = exp.t0;
    let mass = exp.mass;
    let g0 = coeffs.acceleration(t0).map_err(|e| numerical("series setup", e))?;
    let gamma0 = coeffs.gradient(t0).map_err(|e| numerical("series setup", e))?;
    let omega_k = exp.frame.laser_rotation;
    let k0 = rotate_wave_vector(&exp.k0, &omega_k, t0);
    let combined: f64 = vertex_sum(&exp.laser_phases);
    let x0 = position(exp.state.mean());
    let p0 = momentum(exp.state.mean());

    if exp.frame.frame_rotation.norm() > 0.0 {
        return Err(CliError::config("frame.frame_rotation", "--compare-series supports non-rotating frames"));
    }
    let orbit = match (&exp.gravity, &exp.frame.trajectory) {
        (GravityModel::Central { .. }, Trajectory::Circular { omega, .. }) => Some(*omega),
        (_, Trajectory::Constant(_)) | (GravityModel::Uniform { .. }, _) => None,
        _ => return Err(CliError::config("frame.trajectory", "--compare-series supports fixed or circular frames")),
    };
    if butterfly && orbit.is_some() {
        return Err(CliError::config("pulses.geometry", "the co-moving series covers the mach_zehnder geometry"));
    }

    let local_times: Vec<f64> = pulse_times(&exp.geometry, 0.0);
    let mut rows = Vec::new();
    for scale in [1.0, 0.5, 0.25] {
        let wk = omega_k * scale;
        let mut p = ExpansionParams::new(k0, g0, t, mass);
        p.gamma0 = gamma0 * scale;
        p.x0 = x0;
        p.p0 = p0;
        p.laser_phase = combined;
        let (dynamics, series) = match orbit {
            None => {
                let set = CoefficientSet::uniform(mass, g0, gamma0 * scale).map_err(|e| numerical("series setup", e))?;
                p.omega = wk;
                let dyn_ = Dynamics::exact(set).map_err(|e| numerical("series setup", e))?;
                let s = if butterfly { delta_phi_butterfly_series(&p) } else { delta_phi_mz_series(&p) };
                (dyn_, s.map_err(|e| numerical("series", e))?)
            }
            Some(w) => {
                let rf = RotatingFieldCoefficients { mass, g0, gamma0: gamma0 * scale, omega_g: w * scale, omega_gamma: w * scale };
                p.omega_k = wk;
                p.omega_g = w * scale;
                p.omega_gamma = w * scale;
                let dyn_ = Dynamics::new(Arc::new(rf), PropagationMethod::Exact).map_err(|e| numerical("series setup", e))?;
                (dyn_, phi_mz_noninertial_series(&p).map_err(|e| numerical("series", e))?)
            }
        };
        let pulses = rotating_sequence(&k0, &wk, &local_times, &exp.laser_phases, &standard_areas(n));
        let exact = evaluate(&dynamics, &pulses, 0.0, &exp.state)?.total_phase.unwrap_or(f64::NAN);
        let floor = f64::EPSILON * rounding_scale(&dynamics, &pulses, &exp.state)?;
        rows.push(SeriesRow { scale, exact, series, residual: (exact - series).abs(), floor });
    }
    let exponents = rows.windows(2).map(|w| (w[0].residual / w[1].residual).log2()).collect();
    let noise_floor = rows.iter().any(|r| r.residual <= 2.0 * r.floor);
    Ok(SeriesComparison {
        series: match (butterfly, orbit.is_some()) {
            (true, _) => "butterfly",
            (false, false) => "mach_zehnder",
            (false, true) => "mach_zehnder_noninertial",
        },
        rows,
        exponents,
        noise_floor,
    })
}

/// Magnitude the phase is assembled from: `Σ|cₙΦₙ|` plus the symplectic products
/// of `χ₀` and `⟨ξ₀⟩` with `Σ|cₙ||χₙ|`, taken componentwise.
fn rounding_scale(dynamics: &Dynamics, pulses: &[PulseSpec], state: &GaussianState) -> CliResult<f64> {
    let effects = sequence_effects(pulses, dynamics, 0.0).map_err(|e| numerical("pulse effects", e))?;
    let c = quadphase::pulses::vertex_coefficients(effects.len()).map_err(|e| numerical("series", e))?;
    let phases: f64 = c.iter().zip(&effects).map(|(c, e)| (c * e.phi).abs()).sum();
    let spread = c.iter().zip(&effects).fold(PhaseVector::zeros(), |acc, (c, e)| acc + e.chi.abs() * c.abs());
    let outer = effects[0].chi.abs() + state.mean().abs();
    let cross = (0..3).map(|i| outer[i] * spread[i + 3] + outer[i + 3] * spread[i]).sum::<f64>();
    Ok(phases + cross / HBAR)
}

/// `Σ cᵢφᵢ` with the vertex coefficients of the sequence.
fn vertex_sum(phases: &[f64]) -> f64 {
    quadphase::pulses::vertex_coefficients(phases.len())
        .map(|c| c.iter().zip(phases).map(|(c, p)| c * p).sum())
        .unwrap_or(0.0)
}
