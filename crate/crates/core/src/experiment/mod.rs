//! Experiment runner: single trajectories, parameter sweeps, stationarity
//! checks, noise scans and full-versus-effective comparisons, each written
//! out as CSV.

pub mod config;
pub mod csv;

use std::path::Path;

use rayon::prelude::*;

pub use config::{ExperimentConfig, InitialState, ModelChoice, SweepAxis};
pub use csv::{fmt_float, Table};

use crate::error::{Error, Result};
use crate::lindblad::{propagate, TrajectoryRecord};
use crate::lyapunov::{verify_stationarity, LyapunovController, StationarityReport};

/// Label of the target population column.
pub const TARGET_LABEL: &str = "P_S";

/// Runs one trajectory as configured. Sweep axes are ignored.
pub fn simulate(cfg: &ExperimentConfig) -> Result<TrajectoryRecord> {
    let model = cfg.build_model()?;
    let rho0 = cfg.initial_density(&model)?;
    let schedule = cfg.schedule()?;
    let controller = if cfg.controls_enabled {
        if model.controls().is_empty() {
            return Err(Error::Config(format!("model {} has no control Hamiltonians", cfg.model.kind())));
        }
        Some(LyapunovController::new(&model)?)
    } else {
        None
    };
    propagate(&model, &rho0, &schedule, controller.as_ref())
}

/// `t,V,Vdot,f_1..f_N,P_<label>...`; f columns are zero when controls are off.
pub fn trajectory_table(record: &TrajectoryRecord, n_controls: usize) -> Table {
    let mut header: Vec<String> = vec!["t".into(), "V".into(), "Vdot".into()];
    header.extend((1..=n_controls).map(|k| format!("f_{k}")));
    header.extend(record.population_labels.iter().cloned());
    let mut table = Table::new(header);
    for i in 0..record.len() {
        let mut row = vec![record.times[i], record.v[i], record.vdot[i]];
        let f = &record.controls[i];
        row.extend((0..n_controls).map(|k| f.get(k).copied().unwrap_or(0.0)));
        row.extend(&record.populations[i]);
        table.push_floats(&row);
    }
    table
}

pub fn run_simulate(cfg: &ExperimentConfig, out: &Path) -> Result<TrajectoryRecord> {
    let record = simulate(cfg)?;
    let n = cfg.build_model()?.controls().len();
    trajectory_table(&record, n).write(&out.join("trajectory.csv"))?;
    Ok(record)
}

/// Summary of one sweep cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub axis_values: Vec<f64>,
    /// ⟨S|ρ(t_f)|S⟩
    pub fidelity: f64,
    pub max_target_population: f64,
    pub max_vdot: f64,
    pub max_abs_controls: Vec<f64>,
}

impl CellResult {
    fn from_record(axis_values: Vec<f64>, record: &TrajectoryRecord, n_controls: usize) -> Result<Self> {
        let series = record
            .population_series(TARGET_LABEL)
            .ok_or_else(|| Error::Config(format!("model has no {TARGET_LABEL} observable")))?;
        let mut max_abs_controls = record.max_abs_controls();
        max_abs_controls.resize(n_controls, 0.0);
        Ok(Self {
            axis_values,
            fidelity: *series.last().expect("records are never empty"),
            max_target_population: series.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            max_vdot: record.max_vdot(),
            max_abs_controls,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    /// Row-major over axis indices, first axis slowest.
    pub cells: Vec<CellResult>,
    pub n_controls: usize,
}

impl SweepResult {
    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.values.len()).collect()
    }

    pub fn best(&self) -> Option<&CellResult> {
        self.cells.iter().fold(None, |best: Option<&CellResult>, c| match best {
            Some(b) if b.fidelity >= c.fidelity => Some(b),
            _ => Some(c),
        })
    }

    pub fn table(&self) -> Table {
        let mut header: Vec<String> = self.axes.iter().map(|a| a.path.clone()).collect();
        header.extend(["F_S".to_string(), "max_P_S".into(), "max_Vdot".into()]);
        header.extend((1..=self.n_controls).map(|k| format!("max_abs_f_{k}")));
        let mut table = Table::new(header);
        for c in &self.cells {
            let mut row = c.axis_values.clone();
            row.extend([c.fidelity, c.max_target_population, c.max_vdot]);
            row.extend(&c.max_abs_controls);
            table.push_floats(&row);
        }
        table
    }
}

/// Every combination of axis values, last axis fastest.
pub fn grid_points(axes: &[SweepAxis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs every grid cell independently; results come back in grid order.
pub fn sweep(cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<SweepResult> {
    if cfg.sweep.is_empty() {
        return Err(Error::Config("sweep requires at least one sweep.<path> axis".into()));
    }
    let n_controls = cfg.build_model()?.controls().len();
    let points = grid_points(&cfg.sweep);
    let cells = pool(jobs)?.install(|| {
        points
            .into_par_iter()
            .map(|values| {
                let cell = cfg.cell(&values)?;
                let record = simulate(&cell)?;
                CellResult::from_record(values, &record, n_controls)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepResult { axes: cfg.sweep.clone(), cells, n_controls })
}

pub fn run_sweep(cfg: &ExperimentConfig, out: &Path, jobs: Option<usize>) -> Result<SweepResult> {
    let result = sweep(cfg, jobs)?;
    result.table().write(&out.join("sweep.csv"))?;
    Ok(result)
}

pub fn verify(cfg: &ExperimentConfig) -> Result<StationarityReport> {
    let model = cfg.build_model()?;
    let basis = cfg.model.reduced_basis();
    verify_stationarity(&model, &basis.target, &basis.complement)
}

pub fn verify_table(report: &StationarityReport) -> Table {
    let mut table = Table::new(["condition", "residual", "pass"]);
    for (name, residual, pass) in report.rows() {
        table.push_raw(&[name, fmt_float(residual), pass.to_string()]);
    }
    table
}

/// Fixed-width pass/fail listing for terminals.
pub fn verify_text(report: &StationarityReport) -> String {
    let mut s = format!("{:<16} {:>24}  result\n", "condition", "residual");
    for (name, residual, pass) in report.rows() {
        s += &format!("{name:<16} {residual:>24.6e}  {}\n", if pass { "PASS" } else { "FAIL" });
    }
    s += &format!("overall: {}\n", if report.all_pass() { "PASS" } else { "FAIL" });
    s
}

pub fn run_verify(cfg: &ExperimentConfig, out: &Path) -> Result<StationarityReport> {
    let report = verify(cfg)?;
    verify_table(&report).write(&out.join("verify.csv"))?;
    Ok(report)
}

/// One (η, γ) point of a noise scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisePoint {
    pub eta: f64,
    pub gamma: f64,
    pub fidelity: f64,
}

/// Decay-rate values for a noise scan: a `model.gamma` / `model.gamma1`
/// sweep axis if present, otherwise the configured rate.
fn noise_gammas(cfg: &ExperimentConfig) -> Result<(String, Vec<f64>)> {
    match cfg.sweep.as_slice() {
        [] => Ok(("model.gamma".into(), vec![cfg.model.gamma()])),
        [axis] if axis.path == "model.gamma" || axis.path == "model.gamma1" => {
            Ok((axis.path.clone(), axis.values.clone()))
        }
        _ => Err(Error::Config("noise-scan accepts only a sweep over model.gamma or model.gamma1".into())),
    }
}

/// Final fidelity over the η × γ grid, η outermost.
pub fn noise_scan(cfg: &ExperimentConfig, etas: &[f64], jobs: Option<usize>) -> Result<Vec<NoisePoint>> {
    if !cfg.model.supports_noise() {
        return Err(Error::Config(format!("model {} has no noise channels", cfg.model.kind())));
    }
    if etas.is_empty() {
        return Err(Error::Config("no eta values given".into()));
    }
    if let Some(bad) = etas.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
        return Err(Error::Config(format!("eta values must be finite and >= 0, got {bad}")));
    }
    let (gamma_path, gammas) = noise_gammas(cfg)?;
    let mut base = cfg.clone();
    base.sweep = vec![
        SweepAxis { path: "model.eta".into(), values: etas.to_vec() },
        SweepAxis { path: gamma_path, values: gammas },
    ];
    let result = sweep(&base, jobs)?;
    Ok(result
        .cells
        .iter()
        .map(|c| NoisePoint { eta: c.axis_values[0], gamma: c.axis_values[1], fidelity: c.fidelity })
        .collect())
}

pub fn run_noise_scan(cfg: &ExperimentConfig, etas: &[f64], out: &Path, jobs: Option<usize>) -> Result<Vec<NoisePoint>> {
    let points = noise_scan(cfg, etas, jobs)?;
    let mut table = Table::new(["eta", "gamma", "F_S"]);
    for p in &points {
        table.push_floats(&[p.eta, p.gamma, p.fidelity]);
    }
    table.write(&out.join("noise.csv"))?;
    Ok(points)
}

/// Full and effective trajectories for the same parameters, with the
/// largest population difference per shared observable.
#[derive(Clone, Debug)]
pub struct ZenoComparison {
    pub full: TrajectoryRecord,
    pub effective: TrajectoryRecord,
    pub deviations: Vec<(String, f64)>,
}

impl ZenoComparison {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().map(|(_, d)| *d).fold(0.0, f64::max)
    }
}

pub fn compare_zeno(cfg: &ExperimentConfig) -> Result<ZenoComparison> {
    if matches!(cfg.initial_state, InitialState::Explicit(_)) {
        return Err(Error::Config("compare-zeno needs a labeled initial state".into()));
    }
    let mut other = cfg.clone();
    other.model = cfg.model.counterpart();
    let (full_cfg, eff_cfg) = if cfg.model.is_effective() { (&other, cfg) } else { (cfg, &other) };
    let full = simulate(full_cfg)?;
    let effective = simulate(eff_cfg)?;
    let deviations = full
        .population_labels
        .iter()
        .filter_map(|label| {
            let a = full.population_series(label)?;
            let b = effective.population_series(label)?;
            let d = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            Some((label.clone(), d))
        })
        .collect();
    Ok(ZenoComparison { full, effective, deviations })
}

pub fn run_compare_zeno(cfg: &ExperimentConfig, out: &Path) -> Result<ZenoComparison> {
    let cmp = compare_zeno(cfg)?;
    let n = cfg.build_model()?.controls().len();
    trajectory_table(&cmp.full, n).write(&out.join("trajectory_full.csv"))?;
    trajectory_table(&cmp.effective, n).write(&out.join("trajectory_effective.csv"))?;
    let mut summary = Table::new(["observable", "max_abs_deviation"]);
    for (label, d) in &cmp.deviations {
        summary.push_raw(&[label.clone(), fmt_float(*d)]);
    }
    summary.push_raw(&["max".into(), fmt_float(cmp.max_deviation())]);
    summary.write(&out.join("zeno_summary.csv"))?;
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_cfg(extra: &str) -> ExperimentConfig {
        ExperimentConfig::parse(&format!(
            "model.kind = \"lambda_full\"\ntime.t_final = 2.0\ntime.dt = 0.01\ntime.record_stride = 10\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn grid_is_lexicographic() {
        let axes = vec![
            SweepAxis { path: "a".into(), values: vec![1.0, 2.0] },
            SweepAxis { path: "b".into(), values: vec![10.0, 20.0, 30.0] },
        ];
        let g = grid_points(&axes);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![1.0, 10.0]);
        assert_eq!(g[2], vec![1.0, 30.0]);
        assert_eq!(g[3], vec![2.0, 10.0]);
    }

    #[test]
    fn target_start_stays_at_v_one() {
        let rec = simulate(&lambda_cfg("initial_state = \"S\"")).unwrap();
        assert!(rec.v.iter().all(|v| (v - 1.0).abs() < 1e-8));
    }

    #[test]
    fn single_point_sweep_matches_simulate() {
        let cfg = lambda_cfg("controls.enabled = true\nsweep.model.gamma = [0.7]");
        let s = sweep(&cfg, Some(1)).unwrap();
        let rec = simulate(&cfg.cell(&[0.7]).unwrap()).unwrap();
        assert_eq!(s.cells[0].fidelity, rec.final_population(TARGET_LABEL).unwrap());
    }

    #[test]
    fn parallel_sweep_is_order_stable() {
        let cfg = lambda_cfg("sweep.model.gamma = [0.5, 1.0, 1.5]\nsweep.time.t_final = [1.0, 2.0]");
        let a = sweep(&cfg, Some(1)).unwrap().table().render();
        let b = sweep(&cfg, Some(3)).unwrap().table().render();
        assert_eq!(a, b);
    }

    #[test]
    fn controls_run_on_lambda_and_two_atom() {
        let mut cfg = lambda_cfg("controls.enabled = true");
        assert!(simulate(&cfg).is_ok());
        cfg.model = ModelChoice::from_kind("two_atom_effective").unwrap();
        cfg.initial_state = InitialState::Label("psi1".into());
        assert!(simulate(&cfg).is_ok());
    }

    #[test]
    fn noise_scan_zero_eta_matches_noise_free() {
        let cfg = lambda_cfg("sweep.model.gamma = [0.5, 1.0]");
        let pts = noise_scan(&cfg, &[0.0, 0.1], None).unwrap();
        assert_eq!(pts.len(), 4);
        let clean = simulate(&cfg.cell(&[1.0]).unwrap()).unwrap().final_population(TARGET_LABEL).unwrap();
        assert!((pts[1].fidelity - clean).abs() < 1e-10);
        assert!(pts[3].fidelity <= pts[1].fidelity);
    }

    #[test]
    fn noise_scan_rejects_two_atom() {
        let cfg = ExperimentConfig::parse("model.kind = \"two_atom_effective\"\ntime.t_final = 1").unwrap();
        assert!(matches!(noise_scan(&cfg, &[0.1], None), Err(Error::Config(_))));
    }
}
