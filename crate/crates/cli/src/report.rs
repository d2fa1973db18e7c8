//! CSV and JSON output. Every number is written with 17 significant digits so a
//! value read back is the same double; no timestamps or host data are emitted.

use serde::Serialize;

use crate::runner::{Evaluation, RunOutput};
use crate::scenario::Experiment;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `{:.16e}`, or an empty field for missing values.
pub fn number(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => String::new(),
    }
}

pub const CSV_HEADER: &str = "scan_value,probability,visibility,total_phase_rad";

fn csv_row(value: Option<f64>, e: &Evaluation) -> String {
    format!("{},{},{},{}", number(value), number(Some(e.probability)), number(e.visibility), number(e.total_phase))
}

/// Scan table, or a single row with an empty scan value.
pub fn to_csv(out: &RunOutput) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    match &out.scan {
        Some((_, points)) => {
            for p in points {
                s.push_str(&csv_row(Some(p.value), &p.evaluation));
                s.push('\n');
            }
        }
        None => {
            s.push_str(&csv_row(None, &out.nominal));
            s.push('\n');
        }
    }
    s
}

/// Numbers pass through the same formatter as the CSV and are parsed back, so
/// the JSON holds exactly the CSV values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Num(f64);

fn num(v: f64) -> Option<Num> {
    if v.is_finite() {
        Some(Num(format!("{v:.16e}").parse().unwrap_or(v)))
    } else {
        None
    }
}

fn opt(v: Option<f64>) -> Option<Num> {
    v.and_then(num)
}

#[derive(Debug, Serialize)]
struct PointJson {
    scan_value: Option<Num>,
    probability: Option<Num>,
    visibility: Option<Num>,
    total_phase_rad: Option<Num>,
}

#[derive(Debug, Serialize)]
struct DecompositionJson {
    phi_i: Option<Num>,
    bch: Option<Num>,
    mean_term: Option<Num>,
}

#[derive(Debug, Serialize)]
struct FringeJson {
    fitted_phase_rad: Option<Num>,
    fitted_visibility: Option<Num>,
    expected_phase_rad: Option<Num>,
    difference_rad: Option<Num>,
}

#[derive(Debug, Serialize)]
struct SeriesRowJson {
    scale: Option<Num>,
    exact_phase_rad: Option<Num>,
    series_phase_rad: Option<Num>,
    residual_rad: Option<Num>,
    rounding_floor_rad: Option<Num>,
}

#[derive(Debug, Serialize)]
struct SeriesJson {
    series: &'static str,
    rows: Vec<SeriesRowJson>,
    exponents: Vec<Option<Num>>,
    noise_floor: bool,
}

#[derive(Debug, Serialize)]
struct ReportJson {
    scenario: String,
    geometry: String,
    method: String,
    pulses: usize,
    result: PointJson,
    sign: Option<Num>,
    decomposition: Option<DecompositionJson>,
    chi_i: Option<Vec<Option<Num>>>,
    chi_0: Option<Vec<Option<Num>>>,
    scan_variable: Option<&'static str>,
    scan: Option<Vec<PointJson>>,
    fringe: Option<FringeJson>,
    series_comparison: Option<SeriesJson>,
}

fn point(value: Option<f64>, e: &Evaluation) -> PointJson {
    PointJson {
        scan_value: opt(value),
        probability: num(e.probability),
        visibility: opt(e.visibility),
        total_phase_rad: opt(e.total_phase),
    }
}

pub fn method_label(m: &quadphase::propagation::PropagationMethod) -> String {
    use quadphase::propagation::PropagationMethod::*;
    match m {
        Exact => "exact".into(),
        Perturbative { order, .. } => format!("perturbative:{order}"),
        Oracle { step } => format!("oracle:{step}"),
    }
}

pub fn to_json(exp: &Experiment, out: &RunOutput) -> String {
    let e = &out.nominal;
    let vec6 = |v: &quadphase::PhaseVector| v.iter().map(|&x| num(x)).collect::<Vec<_>>();
    let report = ReportJson {
        scenario: exp.name.clone(),
        geometry: exp.geometry.label(),
        method: method_label(&exp.method),
        pulses: exp.pulses.len(),
        result: point(None, e),
        sign: opt(e.sign),
        decomposition: e.phi_i.map(|_| DecompositionJson { phi_i: opt(e.phi_i), bch: opt(e.bch), mean_term: opt(e.mean_term) }),
        chi_i: e.chi_i.as_ref().map(vec6),
        chi_0: e.chi_0.as_ref().map(vec6),
        scan_variable: out.scan.as_ref().map(|(s, _)| s.label()),
        scan: out.scan.as_ref().map(|(_, pts)| pts.iter().map(|p| point(Some(p.value), &p.evaluation)).collect()),
        fringe: out.fringe.as_ref().map(|f| FringeJson {
            fitted_phase_rad: num(f.fitted_phase),
            fitted_visibility: num(f.fitted_visibility),
            expected_phase_rad: num(f.expected_phase),
            difference_rad: num(f.difference),
        }),
        series_comparison: out.series.as_ref().map(|s| SeriesJson {
            series: s.series,
            rows: s
                .rows
                .iter()
                .map(|r| SeriesRowJson {
                    scale: num(r.scale),
                    exact_phase_rad: num(r.exact),
                    series_phase_rad: num(r.series),
                    residual_rad: num(r.residual),
                    rounding_floor_rad: num(r.floor),
                })
                .collect(),
            exponents: s.exponents.iter().map(|&x| num(x)).collect(),
            noise_floor: s.noise_floor,
        }),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    s
}

/// Human-readable summary for stderr alongside CSV output.
pub fn summary(exp: &Experiment, out: &RunOutput) -> String {
    let e = &out.nominal;
    let mut lines = vec![format!("scenario {} ({}, {})", exp.name, exp.geometry.label(), method_label(&exp.method))];
    lines.push(format!("probability {}", number(Some(e.probability))));
    if let (Some(v), Some(dp)) = (e.visibility, e.total_phase) {
        lines.push(format!("visibility {}  total phase {} rad", number(Some(v)), number(Some(dp))));
        lines.push(format!(
            "  phi_I {}  bch {}  mean {}",
            number(e.phi_i),
            number(e.bch),
            number(e.mean_term)
        ));
    }
    if let Some(f) = &out.fringe {
        lines.push(format!(
            "fringe fit phase {} rad (expected {}), visibility {}",
            number(Some(f.fitted_phase)),
            number(Some(f.expected_phase)),
            number(Some(f.fitted_visibility))
        ));
    }
    if let Some(s) = &out.series {
        lines.push(format!("series comparison ({})", s.series));
        for r in &s.rows {
            lines.push(format!("  scale {:<5} residual {}  floor {}", r.scale, number(Some(r.residual)), number(Some(r.floor))));
        }
        let exps: Vec<String> = s.exponents.iter().map(|x| format!("{x:.3}")).collect();
        lines.push(format!("  exponents {}{}", exps.join(" "), if s.noise_floor { " (noise floor reached)" } else { "" }));
    }
    lines.join("\n") + "\n"
}
