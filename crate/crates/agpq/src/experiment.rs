//! Experiment configuration, sweep orchestration over G/G_c grids, and
//! CSV/JSON emission for the command-line front end.

use std::fmt::Write as _;

use serde::Serialize;

use crate::agp_classical::{
    agp_energy, find_critical_g, hf_energy, init_geminals, optimize_geminals, scale_geminals,
};
use crate::circuit::{
    build_bcs_prep, build_measurement_circuit, build_pair_hopper_ansatz, build_projection_block,
    AnsatzParams, Circuit,
};
use crate::error::{AgpqError, Result};
use crate::exact::{correlation_fraction, ed_ground_state};
use crate::pair_model::PairingModel;
use crate::projection::{EstimatorConfig, EstimatorMode, ProjectionGrid};
use crate::vqe::minimize;

/// One experiment: a model family plus a G/G_c grid and solver settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub delta_eps: f64,
    pub g_over_gc_grid: Vec<f64>,
    pub estimator: EstimatorConfig,
    pub restarts: usize,
    pub circuit: CircuitKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircuitKind {
    Prep,
    Projection,
    Ansatz,
    Full,
}

impl ExperimentConfig {
    /// Parses the `key = value` config format. Lines starting with `#` are
    /// comments; unknown keys are errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m: Option<usize> = None;
        let mut n: Option<usize> = None;
        let mut delta_eps = 1.0f64;
        let mut grid = default_grid();
        let mut mode = EstimatorMode::Exact;
        let mut shots = 1000usize;
        let mut seed = 0u64;
        let mut restarts = 3usize;
        let mut circuit = CircuitKind::Full;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |what: String| AgpqError::Config(format!("line {}: {what}", lineno + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "m" => m = Some(parse_num(key, value)?),
                "n" => n = Some(parse_num(key, value)?),
                "delta_eps" => delta_eps = parse_num(key, value)?,
                "grid" => {
                    grid = value
                        .split(',')
                        .map(|s| parse_num::<f64>("grid", s.trim()))
                        .collect::<Result<Vec<f64>>>()?;
                    if grid.iter().any(|x| !x.is_finite()) {
                        return Err(AgpqError::Config("grid values must be finite".into()));
                    }
                }
                "mode" => mode = parse_mode(value)?,
                "shots" => shots = parse_num(key, value)?,
                "seed" => seed = parse_num(key, value)?,
                "restarts" => restarts = parse_num(key, value)?,
                "circuit" => {
                    circuit = match value {
                        "prep" => CircuitKind::Prep,
                        "projection" => CircuitKind::Projection,
                        "ansatz" => CircuitKind::Ansatz,
                        "full" => CircuitKind::Full,
                        other => {
                            return Err(AgpqError::Config(format!(
                                "unknown circuit kind `{other}`"
                            )))
                        }
                    }
                }
                other => {
                    return Err(AgpqError::Config(format!("unknown key `{other}`")));
                }
            }
        }

        let m = m.ok_or_else(|| AgpqError::Config("missing key `m`".into()))?;
        let n = n.ok_or_else(|| AgpqError::Config("missing key `n`".into()))?;
        if n > m {
            return Err(AgpqError::Config(format!(
                "pair count n = {n} exceeds level count m = {m}"
            )));
        }
        if !delta_eps.is_finite() || delta_eps <= 0.0 {
            return Err(AgpqError::Config("delta_eps must be positive".into()));
        }
        Ok(ExperimentConfig {
            m,
            n,
            delta_eps,
            g_over_gc_grid: grid,
            estimator: EstimatorConfig {
                mode,
                shots_per_term: shots,
                seed,
            },
            restarts,
            circuit,
        })
    }

    pub fn model_at(&self, g_over_gc: f64) -> Result<PairingModel> {
        let base = PairingModel::new(self.m, self.n, self.delta_eps, 0.0)?;
        if self.n == 0 || self.n == self.m {
            // Single-configuration sector: no pair hopping, G_c undefined
            // and the coupling only shifts the diagonal; pin G = 0.
            return Ok(base);
        }
        let gc = find_critical_g(&base)?;
        Ok(base.with_g(g_over_gc * gc))
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| AgpqError::Config(format!("bad value `{value}` for `{key}`")))
}

pub fn parse_mode(value: &str) -> Result<EstimatorMode> {
    match value {
        "exact" => Ok(EstimatorMode::Exact),
        "shots" => Ok(EstimatorMode::Shots),
        other => Err(AgpqError::Config(format!("unknown mode `{other}`"))),
    }
}

/// Default G/G_c grid: 13 evenly spaced points spanning [-2, 3], none of
/// which lands on zero.
pub fn default_grid() -> Vec<f64> {
    (0..13).map(|i| -2.0 + 5.0 * i as f64 / 12.0).collect()
}

/// One line of sweep output; field order is the CSV column order.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub g_over_gc: f64,
    pub g: f64,
    pub e_hf: f64,
    pub e_agp: f64,
    pub e_vqe: f64,
    pub e_exact: f64,
    pub err_agp: f64,
    pub err_vqe: f64,
    pub frac_agp: f64,
    pub frac_vqe: f64,
    pub two_qubit_count: usize,
    pub depth: usize,
    pub iterations: usize,
    pub status: String,
}

pub const SWEEP_HEADER: &str = "g_over_gc,G,E_hf,E_agp,E_vqe,E_exact,err_agp,err_vqe,frac_agp,frac_vqe,two_qubit_count,depth,iterations,status";

/// 17-significant-digit decimal rendering used in every CSV column.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        let mut line = String::new();
        for value in [
            self.g_over_gc,
            self.g,
            self.e_hf,
            self.e_agp,
            self.e_vqe,
            self.e_exact,
            self.err_agp,
            self.err_vqe,
            self.frac_agp,
            self.frac_vqe,
        ] {
            let _ = write!(line, "{},", fmt_f64(value));
        }
        let _ = write!(
            line,
            "{},{},{},{}",
            self.two_qubit_count, self.depth, self.iterations, self.status
        );
        line
    }
}

/// Full pipeline for one grid point: classical AGP optimization, VQE over
/// the pair-hopper angles, exact diagonalization, and resource accounting.
/// Solver failures are recorded in `status`, not raised.
pub fn sweep_row(config: &ExperimentConfig, index: usize) -> Result<SweepRow> {
    let ratio = config.g_over_gc_grid[index];
    let model = config.model_at(ratio)?;
    let e_hf = hf_energy(&model);
    let e_exact = ed_ground_state(&model)?.ground_energy;

    // Per-row seed so grid points are independent reproducible jobs.
    let cfg = EstimatorConfig {
        seed: config.estimator.seed.wrapping_add(index as u64),
        ..config.estimator
    };

    let mut status = String::from("ok");
    let g = match optimize_geminals(&model, &init_geminals(&model)) {
        Ok(g) => g,
        Err(e) => {
            status = format!("agp: {e}");
            scale_geminals(&init_geminals(&model))?
        }
    };
    let e_agp = agp_energy(&g, &model)?;

    let vqe = minimize(&g, &model, &cfg, None, config.restarts)?;
    let e_vqe = vqe.energy.min(e_agp);
    if !vqe.converged && status == "ok" {
        status = "vqe: not converged".into();
    }

    let frac_agp = correlation_fraction(e_agp, &model).unwrap_or(f64::NAN);
    let frac_vqe = correlation_fraction(e_vqe, &model).unwrap_or(f64::NAN);

    let grid = ProjectionGrid::new(config.m, config.n)?;
    let phi = 2.0 * std::f64::consts::PI / grid.n as f64;
    let pipeline = build_measurement_circuit(&g, Some(&vqe.tau), phi)?;

    Ok(SweepRow {
        g_over_gc: ratio,
        g: model.g,
        e_hf,
        e_agp,
        e_vqe,
        e_exact,
        err_agp: e_agp - e_exact,
        err_vqe: e_vqe - e_exact,
        frac_agp,
        frac_vqe,
        two_qubit_count: pipeline.two_qubit_count(),
        depth: pipeline.depth(),
        iterations: vqe.iterations,
        status,
    })
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub m: usize,
    pub n: usize,
    pub g_c: f64,
    pub rows: usize,
    pub failed_rows: usize,
    pub min_frac_vqe: f64,
    pub max_frac_vqe: f64,
    pub worst_abs_err_vqe: f64,
}

/// Runs every grid point in order; returns the rows plus a summary.
pub fn run_sweep(config: &ExperimentConfig) -> Result<(Vec<SweepRow>, SweepSummary)> {
    let base = PairingModel::new(config.m, config.n, config.delta_eps, 0.0)?;
    let g_c = find_critical_g(&base)?;
    let mut rows = Vec::with_capacity(config.g_over_gc_grid.len());
    for index in 0..config.g_over_gc_grid.len() {
        rows.push(sweep_row(config, index)?);
    }
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    let fracs: Vec<f64> = rows
        .iter()
        .map(|r| r.frac_vqe)
        .filter(|f| f.is_finite())
        .collect();
    let summary = SweepSummary {
        m: config.m,
        n: config.n,
        g_c,
        rows: rows.len(),
        failed_rows: failed,
        min_frac_vqe: fracs.iter().cloned().fold(f64::INFINITY, f64::min),
        max_frac_vqe: fracs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        worst_abs_err_vqe: rows
            .iter()
            .map(|r| r.err_vqe.abs())
            .fold(0.0, f64::max),
    };
    Ok((rows, summary))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// Per-grid-point optimized geminal coefficients, CSV with one eta column
/// per level.
pub fn optimize_agp_csv(config: &ExperimentConfig) -> Result<String> {
    let mut out = String::from("g_over_gc,G,E_agp");
    for p in 1..=config.m {
        let _ = write!(out, ",eta_{p}");
    }
    out.push('\n');
    for &ratio in &config.g_over_gc_grid {
        let model = config.model_at(ratio)?;
        let g = optimize_geminals(&model, &init_geminals(&model))?;
        let scaled = scale_geminals(&g)?;
        let energy = agp_energy(&scaled, &model)?;
        let _ = write!(
            out,
            "{},{},{}",
            fmt_f64(ratio),
            fmt_f64(model.g),
            fmt_f64(energy)
        );
        for eta in &scaled.eta {
            let _ = write!(out, ",{}", fmt_f64(*eta));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Exact-diagonalization reference table over the grid.
pub fn exact_csv(config: &ExperimentConfig) -> Result<String> {
    let mut out = String::from("g_over_gc,G,E_hf,E_exact\n");
    for &ratio in &config.g_over_gc_grid {
        let model = config.model_at(ratio)?;
        let e = ed_ground_state(&model)?.ground_energy;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(ratio),
            fmt_f64(model.g),
            fmt_f64(hf_energy(&model)),
            fmt_f64(e)
        );
    }
    Ok(out)
}

/// Builds the configured circuit family at the first grid point, using the
/// classically optimized geminals and zero correlator angles.
pub fn dump_circuit(config: &ExperimentConfig) -> Result<Circuit> {
    let ratio = config.g_over_gc_grid.first().copied().unwrap_or(1.0);
    let model = config.model_at(ratio)?;
    let g = scale_geminals(&optimize_geminals(&model, &init_geminals(&model))?)?;
    let grid = ProjectionGrid::new(config.m, config.n)?;
    let phi = 2.0 * std::f64::consts::PI / grid.n as f64;
    let params = AnsatzParams::zeros(config.m);
    match config.circuit {
        CircuitKind::Prep => Ok(build_bcs_prep(&g)),
        CircuitKind::Projection => Ok(build_projection_block(phi, config.m)),
        CircuitKind::Ansatz => build_pair_hopper_ansatz(&params, config.m),
        CircuitKind::Full => build_measurement_circuit(&g, Some(&params), phi),
    }
}
