//! The work behind each CLI subcommand. Each writes its files into `out`
//! and returns the lines it would print.

use std::path::Path;

use tunnelnoise_core::{
    two_particle_quadrant_oracle, Resonance, RidgePrediction, StaticSpectrum, TraceRow,
};

use crate::config::Config;
use crate::error::AppError;
use crate::output::{fmt_num, write_table};
use crate::sweep::{
    ridge_params, ridge_report, run_single, run_sweep, static_resonance, CellResult, SweepResult,
};
use crate::tables::{
    config_from_header, file_header, write_heatmap, write_manifest, write_records,
    write_ridge_report, Observable, ObservableGrid,
};

pub const RECORDS_FILE: &str = "records.csv";
pub const RIDGE_FILE: &str = "ridge.csv";
pub const MANIFEST_FILE: &str = "run_manifest.txt";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const RESONANCE_FILE: &str = "resonances.txt";
pub const PREDICTION_FILE: &str = "ridge_prediction.csv";

fn write_trajectory(path: &Path, cfg: &Config, rows: &[TraceRow]) -> Result<(), AppError> {
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                if r.field == 0 { "a".into() } else { "b".into() },
                r.step.to_string(),
                fmt_num(r.time),
                fmt_num(r.norm_sqr),
                fmt_num(r.barrier_probability),
                fmt_num(r.centroid),
            ]
        })
        .collect();
    let columns = [
        "packet",
        "step",
        "time",
        "norm_sqr",
        "barrier_probability",
        "centroid",
    ];
    write_table(
        path,
        &file_header("propagation trace", cfg),
        &columns,
        &table,
    )?;
    Ok(())
}

/// One (E, w) cell with the quadrant oracle as a cross-check.
pub fn single(cfg: &Config, out: &Path) -> Result<Vec<String>, AppError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let pair = run_single(cfg)?;
    let oracle = two_particle_quadrant_oracle(&pair.fields[0], &pair.fields[1], cfg.oracle.stride)?;
    let cell = CellResult {
        energy: pair.energy,
        frequency: pair.frequency,
        outcome: Ok((pair.record, pair.noise)),
    };
    write_records(&out.join(RECORDS_FILE), cfg, std::slice::from_ref(&cell))?;
    let mut files = vec![RECORDS_FILE];
    if cfg.propagation.trajectory_every.is_some_and(|n| n > 0) {
        write_trajectory(&out.join(TRAJECTORY_FILE), cfg, &pair.trace)?;
        files.push(TRAJECTORY_FILE);
    }
    let r = &pair.record;
    let lines = vec![
        format!("files: {}", files.join(", ")),
        format!("energy: {}", fmt_num(pair.energy)),
        format!("frequency: {}", fmt_num(pair.frequency)),
        format!("T_a: {}  R_a: {}", fmt_num(r.t_a), fmt_num(r.r_a)),
        format!(
            "P_LL: {}  P_RR: {}  P_LR: {}",
            fmt_num(r.p_ll),
            fmt_num(r.p_rr),
            fmt_num(r.p_lr)
        ),
        format!(
            "|I_left|^2 / (R_a T_b): {}",
            fmt_num(r.left_overlap_ratio())
        ),
        format!("S (4q^2/h): {}", fmt_num(pair.noise.s)),
        format!("t1: {}", fmt_num(r.t1)),
        format!("norm drift: {}", fmt_num(pair.norm_drift)),
        format!(
            "oracle (stride {}): P_LL {}  P_RR {}  P_LR {}",
            oracle.stride,
            fmt_num(oracle.p_ll),
            fmt_num(oracle.p_rr),
            fmt_num(oracle.p_lr)
        ),
    ];
    write_manifest(&out.join(MANIFEST_FILE), cfg, &lines)?;
    Ok(lines)
}

/// Every file a sweep produces, from an already computed result.
pub fn write_sweep_outputs(
    cfg: &Config,
    sweep: &SweepResult,
    out: &Path,
) -> Result<Vec<String>, AppError> {
    std::fs::create_dir_all(out)?;
    write_records(&out.join(RECORDS_FILE), cfg, &sweep.cells)?;
    let report = ridge_report(cfg, sweep)?;
    for observable in [Observable::S, Observable::I2] {
        let grid = ObservableGrid::from_sweep(sweep, observable);
        write_heatmap(
            &out.join(observable.file_name()),
            cfg,
            &grid,
            observable,
            report.e_r0,
        )?;
    }
    write_ridge_report(&out.join(RIDGE_FILE), cfg, &report)?;
    let mut lines = vec![
        format!(
            "files: {RECORDS_FILE}, {}, {}, {RIDGE_FILE}",
            Observable::S.file_name(),
            Observable::I2.file_name()
        ),
        format!("energies: {}", sweep.energies.len()),
        format!("frequencies: {}", sweep.frequencies.len()),
        format!("cells: {}", sweep.cells.len()),
        format!("failed cells: {}", sweep.failures()),
        format!("E_r0 (transfer matrix): {}", fmt_num(report.e_r0)),
        format!("static noise peak: {}", fmt_num(report.static_noise_peak)),
        format!("transit time at E_r0: {}", fmt_num(report.transit_time)),
    ];
    for cell in sweep.cells.iter().filter(|c| c.outcome.is_err()) {
        let msg = cell.outcome.as_ref().err().cloned().unwrap_or_default();
        lines.push(format!(
            "failed: E = {}, w = {}: {msg}",
            fmt_num(cell.energy),
            fmt_num(cell.frequency)
        ));
    }
    write_manifest(&out.join(MANIFEST_FILE), cfg, &lines)?;
    Ok(lines)
}

pub fn sweep(cfg: &Config, workers: usize, out: &Path) -> Result<Vec<String>, AppError> {
    let result = run_sweep(cfg, workers)?;
    write_sweep_outputs(cfg, &result, out)
}

fn resonance_lines(cfg: &Config, found: &[Resonance]) -> Vec<String> {
    let mut lines = vec![
        format!("mass_ratio: {}", fmt_num(cfg.model.mass_ratio)),
        format!(
            "geometry: barrier {} nm | well {} nm | barrier {} nm, V_b = {} eV",
            fmt_num(cfg.potential.barrier_width),
            fmt_num(cfg.potential.well_width),
            fmt_num(cfg.potential.barrier_width),
            fmt_num(cfg.potential.v_b)
        ),
    ];
    for (i, r) in found.iter().enumerate() {
        lines.push(format!(
            "resonance {i}: E = {} eV, width = {} eV, T = {}",
            fmt_num(r.energy),
            fmt_num(r.width),
            fmt_num(r.peak_transmission)
        ));
    }
    if let Some(first) = found.first() {
        lines.push(format!("E_r0: {}", fmt_num(first.energy)));
    }
    lines
}

/// Static transfer-matrix spectrum and its resonances.
pub fn spectrum(cfg: &Config, out: &Path) -> Result<Vec<String>, AppError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let spec = cfg.potential(0.0)?;
    let s = &cfg.spectrum;
    let scan = StaticSpectrum::scan(
        &spec,
        0.0,
        &cfg.model()?,
        s.energy_min,
        s.energy_max,
        s.step,
    )?;
    let rows: Vec<Vec<String>> = scan
        .energies
        .iter()
        .zip(&scan.transmissions)
        .map(|(&e, &t)| vec![fmt_num(e), fmt_num(t)])
        .collect();
    write_table(
        &out.join(SPECTRUM_FILE),
        &file_header("static transmission", cfg),
        &["energy", "T"],
        &rows,
    )?;
    let lines = resonance_lines(cfg, &scan.resonances);
    let mut text = file_header("static resonances", cfg);
    for l in &lines {
        text.push_str(l);
        text.push('\n');
    }
    std::fs::write(out.join(RESONANCE_FILE), text)?;
    Ok(lines)
}

/// Predicted ridge `w(E)` at the sweep energies.
pub fn ridge(cfg: &Config, out: &Path) -> Result<Vec<String>, AppError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let e_r0 = static_resonance(cfg)?.energy;
    let params = ridge_params(cfg, e_r0)?;
    let prediction = RidgePrediction::tabulate(params, &cfg.energies())?;
    let rows: Vec<Vec<String>> = prediction
        .samples
        .iter()
        .map(|s| {
            vec![
                fmt_num(s.energy),
                fmt_num(s.w),
                fmt_num(s.t_b),
                fmt_num(s.transit_time),
                s.outside_regime.to_string(),
            ]
        })
        .collect();
    let title = format!("predicted ridge; E_r0 = {} eV", fmt_num(e_r0));
    let columns = [
        "energy",
        "frequency",
        "t_b",
        "transit_time",
        "outside_quasi_static_regime",
    ];
    write_table(
        &out.join(PREDICTION_FILE),
        &file_header(&title, cfg),
        &columns,
        &rows,
    )?;
    Ok(vec![
        format!("E_r0: {}", fmt_num(e_r0)),
        format!("samples: {}", rows.len()),
    ])
}

/// Rebuilds one heatmap from `out/records.csv`. The configuration echoed in
/// the records header is used unless `cfg` is given.
pub fn heatmap(
    cfg: Option<&Config>,
    observable: Observable,
    out: &Path,
) -> Result<Vec<String>, AppError> {
    let path = out.join(RECORDS_FILE);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| AppError::Records(format!("cannot read {}: {e}", path.display())))?;
    let cfg = match cfg {
        Some(c) => c.clone(),
        None => config_from_header(&text)?,
    };
    let grid = ObservableGrid::from_records(&text, observable)?;
    let e_r0 = static_resonance(&cfg)?.energy;
    write_heatmap(
        &out.join(observable.file_name()),
        &cfg,
        &grid,
        observable,
        e_r0,
    )?;
    Ok(vec![format!(
        "wrote {} ({} x {})",
        observable.file_name(),
        grid.energies.len(),
        grid.frequencies.len()
    )])
}
