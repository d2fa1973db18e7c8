//! Scenario files: TOML schema, validation with field paths, and construction of
//! the engine objects.

use std::sync::Arc;

use serde::Deserialize;

use quadphase::frames::{comoving_coefficients, rotating_frame_coefficients, FrameSpec, GravityModel, Trajectory};
use quadphase::propagation::{Dynamics, PropagationMethod};
use quadphase::pulses::{rotating_sequence, standard_areas, PulseSpec};
use quadphase::states::GaussianState;
use quadphase::symplectic::phase_vector;
use quadphase::{Mat3, Mat6, Vec3};

use crate::error::{CliError, CliResult};

/// Convenience constants: mass (kg) and two-photon wave number (1/m).
pub const SPECIES: &[(&str, f64, f64)] = &[
    ("Rb-87", 1.443_160_648e-25, 1.610_5e7),
    ("Cs-133", 2.206_946_57e-25, 1.474_3e7),
];

pub fn species(name: &str) -> Option<(f64, f64)> {
    SPECIES.iter().find(|s| s.0.eq_ignore_ascii_case(name)).map(|s| (s.1, s.2))
}

type V3 = [f64; 3];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub species: Option<SpeciesSection>,
    pub gravity: GravitySection,
    #[serde(default)]
    pub frame: Option<FrameSection>,
    pub pulses: PulsesSection,
    pub state: StateSection,
    #[serde(default)]
    pub method: Option<String>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesSection {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub mass: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GravitySection {
    pub model: String,
    #[serde(default)]
    pub g: Option<V3>,
    #[serde(default)]
    pub gamma: Option<[V3; 3]>,
    #[serde(default)]
    pub gm: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    #[serde(default)]
    pub trajectory: Option<String>,
    #[serde(default)]
    pub rho0: Option<V3>,
    #[serde(default)]
    pub v0: Option<V3>,
    #[serde(default)]
    pub a0: Option<V3>,
    #[serde(default)]
    pub omega: Option<V3>,
    #[serde(default)]
    pub frame_rotation: Option<V3>,
    #[serde(default)]
    pub laser_rotation: Option<V3>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulsesSection {
    pub geometry: String,
    #[serde(default)]
    pub k: Option<V3>,
    #[serde(default)]
    pub k_direction: Option<V3>,
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default, rename = "T")]
    pub t: Option<f64>,
    #[serde(default, rename = "T1")]
    pub t1: Option<f64>,
    #[serde(default, rename = "T2")]
    pub t2: Option<f64>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub laser_phases: Option<Vec<f64>>,
    #[serde(default)]
    pub areas: Option<Vec<f64>>,
    #[serde(default)]
    pub list: Option<Vec<PulseEntry>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseEntry {
    pub time: f64,
    pub k: V3,
    #[serde(default)]
    pub k_minus: Option<V3>,
    #[serde(default)]
    pub phase: f64,
    pub area: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default)]
    pub mean_x: Option<V3>,
    #[serde(default)]
    pub mean_p: Option<V3>,
    #[serde(default)]
    pub sigma_x: Option<V3>,
    #[serde(default)]
    pub sigma_p: Option<V3>,
    #[serde(default)]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub covariance: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanVariable {
    /// Laser phase of the final pulse, sampled on `[start, stop)`.
    LaserPhaseLast,
    /// Pulse separation of a shorthand geometry, sampled on `[start, stop]`.
    PulseSeparation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scan {
    pub variable: ScanVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Scan {
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        match self.variable {
            ScanVariable::LaserPhaseLast => {
                (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / n as f64).collect()
            }
            ScanVariable::PulseSeparation => {
                if n == 1 {
                    return vec![self.start];
                }
                (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect()
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self.variable {
            ScanVariable::LaserPhaseLast => "laser_phase_last",
            ScanVariable::PulseSeparation => "T",
        }
    }
}

/// Pulse layout as given in the file; shorthands keep their timing parameters so scans can vary them.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    MachZehnder { t1: f64, t2: f64 },
    Butterfly { t: f64 },
    MultiLoop { times: Vec<f64> },
    Explicit,
}

impl Geometry {
    pub fn label(&self) -> String {
        match self {
            Geometry::MachZehnder { t1, t2 } if t1 == t2 => format!("mach_zehnder T={t1}"),
            Geometry::MachZehnder { t1, t2 } => format!("mach_zehnder T1={t1} T2={t2}"),
            Geometry::Butterfly { t } => format!("butterfly T={t}"),
            Geometry::MultiLoop { times } => format!("multi_loop {} pulses", times.len()),
            Geometry::Explicit => "explicit".to_string(),
        }
    }
}

/// Everything needed to evaluate one scenario.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub mass: f64,
    pub gravity: GravityModel,
    pub frame: FrameSpec,
    pub method: PropagationMethod,
    pub dynamics: Dynamics,
    pub geometry: Geometry,
    pub k0: Vec3,
    pub t0: f64,
    pub laser_phases: Vec<f64>,
    pub pulses: Vec<PulseSpec>,
    pub state: GaussianState,
    pub scan: Option<Scan>,
}

/// `exact`, `perturbative:<k>` or `oracle:<h>`.
pub fn parse_method(s: &str) -> Result<PropagationMethod, String> {
    let s = s.trim();
    if s == "exact" {
        return Ok(PropagationMethod::Exact);
    }
    let (kind, arg) = s.split_once(':').ok_or_else(|| format!("unknown method `{s}`"))?;
    let m = match kind {
        "perturbative" => {
            let k: usize = arg.parse().map_err(|_| format!("bad perturbative order `{arg}`"))?;
            PropagationMethod::perturbative(k)
        }
        "oracle" => {
            let h: f64 = arg.parse().map_err(|_| format!("bad oracle step `{arg}`"))?;
            PropagationMethod::Oracle { step: h }
        }
        _ => return Err(format!("unknown method `{s}`")),
    };
    m.validate().map_err(|e| e.to_string())?;
    Ok(m)
}

fn v3(a: V3) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn finite(path: &str, vals: &[f64]) -> CliResult<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(CliError::config(path, "values must be finite"))
    }
}

fn positive(path: &str, v: Option<f64>) -> CliResult<f64> {
    match v {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(_) => Err(CliError::config(path, "must be positive")),
        None => Err(CliError::config(path, "missing")),
    }
}

pub fn parse_scenario(text: &str) -> CliResult<ScenarioFile> {
    let de = toml::Deserializer::parse(text).map_err(|e| CliError::config("<document>", e.to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(path, e.into_inner().to_string())
    })
}

pub fn load(path: &std::path::Path, method_override: Option<&str>) -> CliResult<Experiment> {
    let text = std::fs::read_to_string(path)?;
    let file = parse_scenario(&text)?;
    let fallback = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    build(&file, method_override, &fallback)
}

pub fn build(file: &ScenarioFile, method_override: Option<&str>, fallback_name: &str) -> CliResult<Experiment> {
    let name = file.name.clone().unwrap_or_else(|| fallback_name.to_string());

    let (species_mass, species_k) = match file.species.as_ref().and_then(|s| s.name.as_deref()) {
        Some(n) => {
            let (m, k) = species(n).ok_or_else(|| CliError::config("species.name", format!("unknown species `{n}`")))?;
            (Some(m), Some(k))
        }
        None => (None, None),
    };
    let mass = match file.species.as_ref().and_then(|s| s.mass) {
        Some(m) => positive("species.mass", Some(m))?,
        None => species_mass.ok_or_else(|| CliError::config("species", "give `name` or `mass`"))?,
    };

    let gravity = build_gravity(&file.gravity)?;
    let frame = build_frame(file.frame.as_ref())?;

    let method_text = method_override.map(str::to_string).or_else(|| file.method.clone());
    let method = match method_text {
        Some(m) => parse_method(&m).map_err(|e| CliError::config("method", e))?,
        None => PropagationMethod::Exact,
    };

    let coeffs = if frame.frame_rotation.norm() > 0.0 {
        rotating_frame_coefficients(&gravity, &frame, mass)
    } else {
        comoving_coefficients(&gravity, &frame, mass)
    }
    .map_err(|e| CliError::from_core("frame", "coefficients", e))?;
    let dynamics =
        Dynamics::new(Arc::new(coeffs), method).map_err(|e| CliError::from_core("method", "propagation", e))?;

    let (geometry, k0, t0, laser_phases, pulses) = build_pulses(&file.pulses, species_k, &frame.laser_rotation)?;
    let state = build_state(&file.state, mass)?;
    let scan = match &file.scan {
        Some(s) => Some(build_scan(s, &geometry)?),
        None => None,
    };

    Ok(Experiment {
        name,
        mass,
        gravity,
        frame,
        method,
        dynamics,
        geometry,
        k0,
        t0,
        laser_phases,
        pulses,
        state,
        scan,
    })
}

fn build_gravity(g: &GravitySection) -> CliResult<GravityModel> {
    match g.model.as_str() {
        "uniform" => {
            let acc = g.g.ok_or_else(|| CliError::config("gravity.g", "missing for uniform model"))?;
            finite("gravity.g", &acc)?;
            let gamma = match g.gamma {
                Some(rows) => {
                    let m = Mat3::from_fn(|i, j| rows[i][j]);
                    finite("gravity.gamma", m.as_slice())?;
                    if (m - m.transpose()).amax() > 1e-12 * m.amax() {
                        return Err(CliError::config("gravity.gamma", "must be symmetric"));
                    }
                    m
                }
                None => Mat3::zeros(),
            };
            if g.gm.is_some() {
                return Err(CliError::config("gravity.gm", "only valid for the central model"));
            }
            Ok(GravityModel::Uniform { g: v3(acc), gamma })
        }
        "central" => {
            let gm = positive("gravity.gm", g.gm)?;
            if g.g.is_some() || g.gamma.is_some() {
                return Err(CliError::config("gravity", "central model takes only `gm`"));
            }
            Ok(GravityModel::Central { gm })
        }
        other => Err(CliError::config("gravity.model", format!("expected `uniform` or `central`, got `{other}`"))),
    }
}

fn build_frame(f: Option<&FrameSection>) -> CliResult<FrameSpec> {
    let default = FrameSection::default();
    let f = f.unwrap_or(&default);
    let rho0 = v3(f.rho0.unwrap_or([0.0; 3]));
    finite("frame.rho0", rho0.as_slice())?;
    let trajectory = match f.trajectory.as_deref().unwrap_or("fixed") {
        "fixed" => Trajectory::Constant(rho0),
        "polynomial" => Trajectory::Polynomial {
            rho0,
            v0: v3(f.v0.unwrap_or([0.0; 3])),
            a0: v3(f.a0.unwrap_or([0.0; 3])),
        },
        "circular" => {
            let omega = f.omega.ok_or_else(|| CliError::config("frame.omega", "missing for circular trajectory"))?;
            finite("frame.omega", &omega)?;
            Trajectory::Circular { rho0, omega: v3(omega) }
        }
        other => {
            return Err(CliError::config(
                "frame.trajectory",
                format!("expected `fixed`, `polynomial` or `circular`, got `{other}`"),
            ))
        }
    };
    let frame_rotation = v3(f.frame_rotation.unwrap_or([0.0; 3]));
    let laser_rotation = v3(f.laser_rotation.unwrap_or([0.0; 3]));
    finite("frame.frame_rotation", frame_rotation.as_slice())?;
    finite("frame.laser_rotation", laser_rotation.as_slice())?;
    Ok(FrameSpec { trajectory, frame_rotation, laser_rotation })
}

type PulseBuild = (Geometry, Vec3, f64, Vec<f64>, Vec<PulseSpec>);

fn build_pulses(p: &PulsesSection, species_k: Option<f64>, laser_rotation: &Vec3) -> CliResult<PulseBuild> {
    let t0 = p.t0.unwrap_or(0.0);
    finite("pulses.t0", &[t0])?;
    if p.geometry == "explicit" {
        let list = p.list.as_ref().ok_or_else(|| CliError::config("pulses.list", "missing for explicit geometry"))?;
        if list.is_empty() {
            return Err(CliError::config("pulses.list", "empty"));
        }
        let mut pulses = Vec::with_capacity(list.len());
        for (i, e) in list.iter().enumerate() {
            let k_plus = v3(e.k);
            let k_minus = e.k_minus.map(v3).unwrap_or(k_plus);
            let spec = PulseSpec { time: e.time, k_plus, k_minus, laser_phase: e.phase, area: e.area };
            spec.validate().map_err(|err| CliError::from_core(&format!("pulses.list[{i}]"), "pulses", err))?;
            pulses.push(spec);
        }
        check_times("pulses.list", &pulses.iter().map(|s| s.time).collect::<Vec<_>>())?;
        if pulses[0].time < t0 {
            return Err(CliError::config("pulses.t0", "first pulse precedes t0"));
        }
        let phases = pulses.iter().map(|s| s.laser_phase).collect();
        let k0 = pulses[0].k_plus;
        return Ok((Geometry::Explicit, k0, t0, phases, pulses));
    }

    let k0 = match (p.k, p.k_direction, species_k) {
        (Some(k), None, _) => v3(k),
        (None, dir, Some(kmag)) => {
            let d = v3(dir.unwrap_or([0.0, 0.0, 1.0]));
            if d.norm() == 0.0 {
                return Err(CliError::config("pulses.k_direction", "must be non-zero"));
            }
            d.normalize() * kmag
        }
        (Some(_), Some(_), _) => return Err(CliError::config("pulses.k_direction", "give either `k` or `k_direction`")),
        (None, _, None) => return Err(CliError::config("pulses.k", "missing (or set species.name)")),
    };
    finite("pulses.k", k0.as_slice())?;

    let geometry = match p.geometry.as_str() {
        "mach_zehnder" => match (p.t, p.t1, p.t2) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::config("pulses.T", "give either `T` or `T1`/`T2`"))
            }
            (Some(_), None, None) => {
                let t = positive("pulses.T", p.t)?;
                Geometry::MachZehnder { t1: t, t2: t }
            }
            _ => Geometry::MachZehnder { t1: positive("pulses.T1", p.t1)?, t2: positive("pulses.T2", p.t2)? },
        },
        "butterfly" => Geometry::Butterfly { t: positive("pulses.T", p.t)? },
        "multi_loop" => {
            let times = p.times.clone().ok_or_else(|| CliError::config("pulses.times", "missing for multi_loop"))?;
            if times.len() < 3 {
                return Err(CliError::config("pulses.times", "multi_loop needs at least three pulses"));
            }
            finite("pulses.times", &times)?;
            Geometry::MultiLoop { times }
        }
        other => {
            return Err(CliError::config(
                "pulses.geometry",
                format!("expected `mach_zehnder`, `butterfly`, `multi_loop` or `explicit`, got `{other}`"),
            ))
        }
    };
    let n = pulse_times(&geometry, t0).len();
    let phases = match &p.laser_phases {
        Some(v) if v.len() == n => {
            finite("pulses.laser_phases", v)?;
            v.clone()
        }
        Some(v) => {
            return Err(CliError::config("pulses.laser_phases", format!("expected {n} values, got {}", v.len())))
        }
        None => vec![0.0; n],
    };
    if let Some(a) = &p.areas {
        if a.len() != n {
            return Err(CliError::config("pulses.areas", format!("expected {n} values, got {}", a.len())));
        }
    }
    let pulses = shorthand_pulses(&geometry, &k0, laser_rotation, t0, &phases, p.areas.as_deref())?;
    Ok((geometry, k0, t0, phases, pulses))
}

fn check_times(path: &str, times: &[f64]) -> CliResult<()> {
    finite(path, times)?;
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::config(path, "pulse times must increase strictly"));
    }
    Ok(())
}

pub fn pulse_times(geometry: &Geometry, t0: f64) -> Vec<f64> {
    match geometry {
        Geometry::MachZehnder { t1, t2 } => vec![t0, t0 + t1, t0 + t1 + t2],
        Geometry::Butterfly { t } => vec![t0, t0 + t, t0 + 3.0 * t, t0 + 4.0 * t],
        Geometry::MultiLoop { times } => times.clone(),
        Geometry::Explicit => Vec::new(),
    }
}

/// Pulses of a shorthand geometry with wave vectors rotating at `laser_rotation`.
pub fn shorthand_pulses(
    geometry: &Geometry,
    k0: &Vec3,
    laser_rotation: &Vec3,
    t0: f64,
    phases: &[f64],
    areas: Option<&[f64]>,
) -> CliResult<Vec<PulseSpec>> {
    let times = pulse_times(geometry, t0);
    check_times("pulses", &times)?;
    if times[0] < t0 {
        return Err(CliError::config("pulses.t0", "first pulse precedes t0"));
    }
    let areas = areas.map(<[f64]>::to_vec).unwrap_or_else(|| standard_areas(times.len()));
    let pulses = rotating_sequence(k0, laser_rotation, &times, phases, &areas);
    for (i, p) in pulses.iter().enumerate() {
        p.validate().map_err(|e| CliError::from_core(&format!("pulses.areas[{i}]"), "pulses", e))?;
    }
    Ok(pulses)
}

fn build_state(s: &StateSection, mass: f64) -> CliResult<GaussianState> {
    let mx = v3(s.mean_x.unwrap_or([0.0; 3]));
    let mp = v3(s.mean_p.unwrap_or([0.0; 3]));
    finite("state.mean_x", mx.as_slice())?;
    finite("state.mean_p", mp.as_slice())?;
    let mean = phase_vector(mx, mp);
    let err = |path: &str, e| CliError::from_core(path, "state", e);
    if let Some(rows) = &s.covariance {
        if s.sigma_x.is_some() || s.sigma_p.is_some() || s.temperature.is_some() {
            return Err(CliError::config("state.covariance", "give either a covariance or widths"));
        }
        if rows.len() != 6 || rows.iter().any(|r| r.len() != 6) {
            return Err(CliError::config("state.covariance", "must be 6x6"));
        }
        let c = Mat6::from_fn(|i, j| rows[i][j]);
        return GaussianState::new(mean, c).map_err(|e| err("state.covariance", e));
    }
    let sx = s.sigma_x.ok_or_else(|| CliError::config("state.sigma_x", "missing"))?;
    match (s.sigma_p, s.temperature) {
        (Some(sp), None) => GaussianState::from_widths(mean, v3(sx), v3(sp)).map_err(|e| err("state.sigma_p", e)),
        (None, Some(t)) => GaussianState::thermal(mean, v3(sx), t, mass).map_err(|e| err("state.temperature", e)),
        (Some(_), Some(_)) => Err(CliError::config("state.temperature", "give either `sigma_p` or `temperature`")),
        (None, None) => Err(CliError::config("state", "give `sigma_p` or `temperature`")),
    }
}

fn build_scan(s: &ScanSection, geometry: &Geometry) -> CliResult<Scan> {
    finite("scan.start", &[s.start])?;
    finite("scan.stop", &[s.stop])?;
    if s.steps == 0 {
        return Err(CliError::config("scan.steps", "must be at least 1"));
    }
    let variable = match s.variable.as_str() {
        "laser_phase_last" => ScanVariable::LaserPhaseLast,
        "T" => {
            match geometry {
                Geometry::Butterfly { .. } => {}
                Geometry::MachZehnder { t1, t2 } if t1 == t2 => {}
                _ => {
                    return Err(CliError::config(
                        "scan.variable",
                        "`T` scans need a symmetric mach_zehnder or butterfly shorthand",
                    ))
                }
            }
            if !(s.start > 0.0 && s.stop > 0.0) {
                return Err(CliError::config("scan.start", "pulse separations must be positive"));
            }
            ScanVariable::PulseSeparation
        }
        other => {
            return Err(CliError::config(
                "scan.variable",
                format!("expected `laser_phase_last` or `T`, got `{other}`"),
            ))
        }
    };
    Ok(Scan { variable, start: s.start, stop: s.stop, steps: s.steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUNTAIN: &str = r#"
        [species]
        name = "Rb-87"
        [gravity]
        model = "uniform"
        g = [0.0, 0.0, -9.81]
        [pulses]
        geometry = "mach_zehnder"
        k = [0.0, 0.0, -1.61e7]
        T = 0.1
        [state]
        sigma_x = [1e-4, 1e-4, 1e-4]
        temperature = 1e-7
    "#;

    #[test]
    fn fountain_builds() {
        let f = parse_scenario(FOUNTAIN).unwrap();
        let e = build(&f, None, "fountain").unwrap();
        assert_eq!(e.pulses.len(), 3);
        assert_eq!(e.geometry, Geometry::MachZehnder { t1: 0.1, t2: 0.1 });
        assert_eq!(e.method, PropagationMethod::Exact);
    }

    #[test]
    fn unknown_field_reports_path() {
        let text = FOUNTAIN.replace("T = 0.1", "T = 0.1\nbogus = 1");
        match parse_scenario(&text) {
            Err(CliError::Config { path, .. }) => assert!(path.contains("pulses"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_reports_path() {
        let text = FOUNTAIN.replace("T = 0.1", "T = \"long\"");
        match parse_scenario(&text) {
            Err(CliError::Config { path, .. }) => assert_eq!(path, "pulses.T"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_fields() {
        let cases = [
            (FOUNTAIN.replace("T = 0.1", "T = -0.1"), "pulses.T"),
            (FOUNTAIN.replace("name = \"Rb-87\"", "name = \"K-40\""), "species.name"),
            (FOUNTAIN.replace("model = \"uniform\"", "model = \"flat\""), "gravity.model"),
            (FOUNTAIN.replace("temperature = 1e-7", "temperature = -1.0"), "state.temperature"),
        ];
        for (text, expected) in cases {
            let f = parse_scenario(&text).unwrap();
            match build(&f, None, "x") {
                Err(CliError::Config { path, .. }) => assert_eq!(path, expected),
                other => panic!("{expected}: {other:?}"),
            }
        }
        let f = parse_scenario(FOUNTAIN).unwrap();
        assert!(matches!(build(&f, Some("rk9"), "x"), Err(CliError::Config { .. })));
    }

    #[test]
    fn methods_parse() {
        assert_eq!(parse_method("exact").unwrap(), PropagationMethod::Exact);
        assert_eq!(parse_method("perturbative:2").unwrap(), PropagationMethod::perturbative(2));
        assert_eq!(parse_method("oracle:1e-4").unwrap(), PropagationMethod::Oracle { step: 1e-4 });
        assert!(parse_method("perturbative:9").is_err());
        assert!(parse_method("oracle:-1").is_err());
    }

    #[test]
    fn scan_values() {
        let s = Scan { variable: ScanVariable::LaserPhaseLast, start: 0.0, stop: 4.0, steps: 4 };
        assert_eq!(s.values(), vec![0.0, 1.0, 2.0, 3.0]);
        let s = Scan { variable: ScanVariable::PulseSeparation, start: 0.1, stop: 0.3, steps: 3 };
        assert_eq!(s.values().len(), 3);
        assert_eq!(s.values()[2], 0.3);
    }
}
