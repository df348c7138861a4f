//! Experiment front end: config loading with overrides, the four
//! subcommands, and machine-readable CSV output with a JSON metadata sidecar
//! carrying everything needed to re-run a result exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::montecarlo::{self, ArrivalMode, McOptions};
use crate::numerics::QuadratureSpec;
use crate::optimizer;
use crate::params::SystemParameters;
use crate::snc;
use crate::{comm, sensing};

/// Built-in default parameter document (the tabulated defaults, with the
/// wavelength and serving-radius choices documented in the README).
pub const DEFAULT_PARAMS_JSON: &str = include_str!("../../../configs/table1.json");

/// Subcommand payloads.
#[derive(Debug, Clone)]
pub enum CommandSpec {
    Analyze {
        axis: Option<(String, Vec<f64>)>,
    },
    Simulate {
        axis: Option<(String, Vec<f64>)>,
        realizations: usize,
        packets: usize,
        trace: bool,
        physical_arrivals: bool,
        rayleigh_service: bool,
    },
    Optimize {
        grid_points: usize,
    },
    Sweep {
        axis: String,
        values: Vec<f64>,
        grid_points: usize,
    },
}

impl CommandSpec {
    fn name(&self) -> &'static str {
        match self {
            CommandSpec::Analyze { .. } => "analyze",
            CommandSpec::Simulate { .. } => "simulate",
            CommandSpec::Optimize { .. } => "optimize",
            CommandSpec::Sweep { .. } => "sweep",
        }
    }
}

/// A fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub command: CommandSpec,
    /// Raw params document text (file contents or the built-in default).
    pub params_json: String,
    /// `key=value[:unit]` overrides, applied in order.
    pub overrides: Vec<String>,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub quad: QuadratureSpec,
    /// Fixed Chernoff parameter; `None` optimizes theta per point.
    pub theta: Option<f64>,
}

/// Short symbol aliases accepted on the CLI for field names.
fn canonical_key(key: &str) -> &str {
    match key {
        "delta" => "detect_threshold",
        "sigma_bar" => "rcs_mean",
        "zeta" => "paoi_threshold",
        "gamma_th" => "sinr_threshold",
        "lambda" => "lambda_total",
        "t_s" => "scan_interval",
        "tau_tr" => "pilot_symbols",
        "rho_tr" => "pilot_snr",
        other => other,
    }
}

/// Parse `key=value[:unit]`.
fn parse_override(s: &str) -> Result<(String, f64, Option<String>)> {
    let (key, rest) = s
        .split_once('=')
        .ok_or_else(|| Error::config(s, "override must look like key=value[:unit]"))?;
    let key = canonical_key(key);
    let (value_str, unit) = match rest.split_once(':') {
        Some((v, u)) => (v, Some(u.to_string())),
        None => (rest, None),
    };
    let value: f64 = value_str
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value_str}` as a number")))?;
    Ok((key.to_string(), value, unit))
}

/// Apply one override onto the raw JSON document. Without an explicit unit
/// the field's declared unit is kept; new fields default to linear/SI.
fn apply_override(
    doc: &mut serde_json::Map<String, serde_json::Value>,
    key: &str,
    value: f64,
    unit: Option<String>,
) {
    let entry = doc
        .entry(key.to_string())
        .or_insert_with(|| serde_json::json!({"value": 0.0, "unit": "linear"}));
    if let serde_json::Value::Object(obj) = entry {
        obj.insert("value".into(), serde_json::json!(value));
        if let Some(u) = unit {
            obj.insert("unit".into(), serde_json::json!(u));
        }
    }
}

/// Build normalized parameters from the document text plus overrides.
pub fn build_params(params_json: &str, overrides: &[String]) -> Result<SystemParameters> {
    let mut doc: serde_json::Map<String, serde_json::Value> = serde_json::from_str(params_json)
        .map_err(|e| Error::config("<document>", e.to_string()))?;
    for o in overrides {
        let (key, value, unit) = parse_override(o)?;
        apply_override(&mut doc, &key, value, unit);
    }
    let text = serde_json::Value::Object(doc).to_string();
    SystemParameters::from_json(&text)
}

#[derive(Serialize)]
struct MetaQuad {
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
}

#[derive(Serialize)]
struct Meta<'a> {
    version: &'static str,
    command: &'a str,
    seed: u64,
    quad: MetaQuad,
    theta_override: Option<f64>,
    axis: Option<&'a str>,
    axis_values: &'a [f64],
    mc_realizations: Option<usize>,
    mc_packets: Option<usize>,
    overrides: &'a [String],
    params_normalized: BTreeMap<String, f64>,
}

fn write_meta(spec: &ExperimentSpec, base: &SystemParameters, path: &Path) -> Result<()> {
    let (axis, axis_values, mc_r, mc_p): (Option<&str>, &[f64], Option<usize>, Option<usize>) =
        match &spec.command {
            CommandSpec::Analyze { axis } => match axis {
                Some((name, vals)) => (Some(name.as_str()), vals.as_slice(), None, None),
                None => (None, &[], None, None),
            },
            CommandSpec::Simulate {
                axis,
                realizations,
                packets,
                ..
            } => match axis {
                Some((name, vals)) => (
                    Some(name.as_str()),
                    vals.as_slice(),
                    Some(*realizations),
                    Some(*packets),
                ),
                None => (None, &[], Some(*realizations), Some(*packets)),
            },
            CommandSpec::Optimize { .. } => (None, &[], None, None),
            CommandSpec::Sweep { axis, values, .. } => {
                (Some(axis.as_str()), values.as_slice(), None, None)
            }
        };
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION"),
        command: spec.command.name(),
        seed: spec.seed,
        quad: MetaQuad {
            abs_tol: spec.quad.abs_tol,
            rel_tol: spec.quad.rel_tol,
            max_subdivisions: spec.quad.max_subdivisions,
        },
        theta_override: spec.theta,
        axis,
        axis_values,
        mc_realizations: mc_r,
        mc_packets: mc_p,
        overrides: &spec.overrides,
        params_normalized: base.to_map(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}

/// Analytical quantities for one parameter point.
struct AnalyzeRow {
    p_cov_s: f64,
    p_cov_c: f64,
    saturated: bool,
    psi: f64,
    upsilon: f64,
    upsilon_nw: f64,
    theta: f64,
    stable: bool,
    clamped: bool,
}

fn evaluate_point(
    p: &SystemParameters,
    theta_fixed: Option<f64>,
    quad: &QuadratureSpec,
) -> Result<AnalyzeRow> {
    let zeta = p.paoi_threshold;
    let gamma_th = p.sinr_threshold;
    let p_cov_s = if p.lambda_s() > 0.0 {
        sensing::sensing_coverage(p, quad)?.p_cov_s
    } else {
        0.0
    };
    let (p_cov_c, saturated, psi) = if p.lambda_c() > 0.0 {
        match comm::comm_coverage(gamma_th, p) {
            Ok(c) => (c.p_cov_c, c.saturated, c.psi_value),
            // effective aleph below 1: the tier is too thin to serve
            Err(Error::Config { .. }) => (0.0, false, f64::NAN),
            Err(e) => return Err(e),
        }
    } else {
        (0.0, false, f64::NAN)
    };
    let result = match theta_fixed {
        Some(theta) => snc::pavp_networkwide(theta, zeta, p, gamma_th, quad),
        None => snc::best_theta(zeta, p, gamma_th, quad),
    };
    let r = match result {
        Ok(r) => r,
        Err(Error::Config { .. }) => snc::PavpResult {
            upsilon: 1.0,
            upsilon_nw: 1.0,
            theta_star: None,
            stable: false,
            clamped: true,
            p_cov_c: 0.0,
            p_cov_s,
        },
        Err(e) => return Err(e),
    };
    Ok(AnalyzeRow {
        p_cov_s,
        p_cov_c,
        saturated,
        psi,
        upsilon: r.upsilon,
        upsilon_nw: r.upsilon_nw,
        theta: r.theta_star.unwrap_or(f64::NAN),
        stable: r.stable,
        clamped: r.clamped,
    })
}

fn axis_points(axis: &Option<(String, Vec<f64>)>) -> Vec<(String, Option<f64>)> {
    match axis {
        None => vec![("point".to_string(), None)],
        Some((name, vals)) => vals.iter().map(|v| (name.clone(), Some(*v))).collect(),
    }
}

fn params_for_point(
    spec: &ExperimentSpec,
    name: &str,
    value: Option<f64>,
) -> Result<SystemParameters> {
    let mut overrides = spec.overrides.clone();
    if let Some(v) = value {
        overrides.push(format!("{name}={v}"));
    }
    build_params(&spec.params_json, &overrides)
}

fn run_analyze(spec: &ExperimentSpec, axis: &Option<(String, Vec<f64>)>) -> Result<()> {
    let points = axis_points(axis);
    let axis_name = points[0].0.clone();
    let mut wtr = csv::Writer::from_path(spec.output_dir.join("analyze.csv"))?;
    wtr.write_record([
        axis_name.as_str(),
        "p_cov_s",
        "p_cov_c",
        "p_cov_c_saturated",
        "psi",
        "upsilon",
        "upsilon_nw",
        "theta",
        "stable",
        "clamped",
    ])?;
    for (name, value) in &points {
        let p = params_for_point(spec, name, *value)?;
        let row = evaluate_point(&p, spec.theta, &spec.quad)?;
        wtr.write_record([
            fmt(value.unwrap_or(0.0)),
            fmt(row.p_cov_s),
            fmt(row.p_cov_c),
            (row.saturated as u8).to_string(),
            fmt(row.psi),
            fmt(row.upsilon),
            fmt(row.upsilon_nw),
            fmt(row.theta),
            (row.stable as u8).to_string(),
            (row.clamped as u8).to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_simulate(
    spec: &ExperimentSpec,
    axis: &Option<(String, Vec<f64>)>,
    realizations: usize,
    packets: usize,
    trace: bool,
    physical: bool,
    rayleigh: bool,
) -> Result<()> {
    let opts = McOptions {
        arrival_mode: if physical {
            ArrivalMode::PhysicalFresh
        } else {
            ArrivalMode::AnalyticGeometric
        },
        rayleigh_service: rayleigh,
    };
    let points = axis_points(axis);
    let axis_name = points[0].0.clone();
    let mut wtr = csv::Writer::from_path(spec.output_dir.join("simulate.csv"))?;
    wtr.write_record([
        axis_name.as_str(),
        "empirical_pavp",
        "pavp_std_err",
        "coverage_fraction",
        "realizations",
        "packets",
    ])?;
    for (name, value) in &points {
        let p = params_for_point(spec, name, *value)?;
        let est = montecarlo::simulate_pavp(
            &p,
            p.paoi_threshold,
            p.sinr_threshold,
            realizations,
            packets,
            spec.seed,
            &opts,
        )?;
        wtr.write_record([
            fmt(value.unwrap_or(0.0)),
            fmt(est.mean),
            fmt(est.std_err),
            fmt(est.coverage_fraction),
            est.n_realizations.to_string(),
            est.packets_per_realization.to_string(),
        ])?;
    }
    wtr.flush()?;

    if trace {
        let p = build_params(&spec.params_json, &spec.overrides)?;
        let mut wtr = csv::Writer::from_path(spec.output_dir.join("trace.csv"))?;
        wtr.write_record(["t_arrival", "t_service", "t_depart", "paoi"])?;
        if let Some(tr) = montecarlo::simulate_trace(
            &p,
            p.paoi_threshold,
            p.sinr_threshold,
            packets,
            spec.seed,
            &opts,
        )? {
            for i in 0..tr.arrivals.len() {
                let paoi = if i + 1 < tr.departures.len() {
                    fmt(tr.departures[i + 1] - tr.arrivals[i])
                } else {
                    "nan".to_string()
                };
                wtr.write_record([
                    fmt(tr.arrivals[i]),
                    fmt(tr.services[i]),
                    fmt(tr.departures[i]),
                    paoi,
                ])?;
            }
        }
        wtr.flush()?;
    }
    Ok(())
}

fn run_optimize(spec: &ExperimentSpec, grid_points: usize) -> Result<()> {
    let p = build_params(&spec.params_json, &spec.overrides)?;
    let sol = optimizer::solve_partition(
        &p,
        p.paoi_threshold,
        p.sinr_threshold,
        grid_points,
        &spec.quad,
    )?;
    let mut wtr = csv::Writer::from_path(spec.output_dir.join("optimize.csv"))?;
    wtr.write_record(["beta", "upsilon_nw", "is_optimal"])?;
    let mut star_written = false;
    for (b, v) in &sol.curve {
        if !star_written && sol.feasible_interval.is_some() && *b > sol.beta_star {
            wtr.write_record([fmt(sol.beta_star), fmt(sol.upsilon_nw_star), "1".into()])?;
            star_written = true;
        }
        wtr.write_record([fmt(*b), fmt(*v), "0".into()])?;
    }
    wtr.flush()?;
    if sol.feasible_interval.is_none() {
        return Err(Error::Infeasible(
            "the entire beta grid violates the stability condition".into(),
        ));
    }
    Ok(())
}

fn run_sweep(spec: &ExperimentSpec, axis: &str, values: &[f64], grid_points: usize) -> Result<()> {
    let mut wtr = csv::Writer::from_path(spec.output_dir.join("sweep.csv"))?;
    wtr.write_record([
        axis,
        "beta_star",
        "upsilon_nw_star",
        "feasible_lo",
        "feasible_hi",
        "error",
    ])?;
    // Sweep values arrive in the field's declared unit; normalize each one
    // through the config boundary, then run the partition solve. Per-point
    // failures are recorded in the error column and the sweep continues.
    for value in values {
        let solution = params_for_point(spec, axis, Some(*value)).and_then(|p| {
            optimizer::solve_partition(
                &p,
                p.paoi_threshold,
                p.sinr_threshold,
                grid_points,
                &spec.quad,
            )
        });
        match &solution {
            Ok(sol) => {
                let (lo, hi) = sol.feasible_interval.unwrap_or((f64::NAN, f64::NAN));
                wtr.write_record([
                    fmt(*value),
                    fmt(sol.beta_star),
                    fmt(sol.upsilon_nw_star),
                    fmt(lo),
                    fmt(hi),
                    String::new(),
                ])?;
            }
            Err(e) => {
                wtr.write_record([
                    fmt(*value),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    "nan".into(),
                    e.to_string(),
                ])?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Execute one experiment; output files land in `spec.output_dir`.
pub fn run(spec: &ExperimentSpec) -> Result<()> {
    spec.quad.validate()?;
    std::fs::create_dir_all(&spec.output_dir)?;
    let base = build_params(&spec.params_json, &spec.overrides)?;
    let meta_path = spec
        .output_dir
        .join(format!("{}.meta.json", spec.command.name()));
    write_meta(spec, &base, &meta_path)?;
    match &spec.command {
        CommandSpec::Analyze { axis } => run_analyze(spec, axis),
        CommandSpec::Simulate {
            axis,
            realizations,
            packets,
            trace,
            physical_arrivals,
            rayleigh_service,
        } => run_simulate(
            spec,
            axis,
            *realizations,
            *packets,
            *trace,
            *physical_arrivals,
            *rayleigh_service,
        ),
        CommandSpec::Optimize { grid_points } => run_optimize(spec, *grid_points),
        CommandSpec::Sweep {
            axis,
            values,
            grid_points,
        } => run_sweep(spec, axis, values, *grid_points),
    }
}
