//! Single runs, energy × frequency sweeps, and ridge extraction.

use rayon::prelude::*;
use tunnelnoise_core::resonance::{ridge_energy, RESONANCE_TOLERANCE};
use tunnelnoise_core::{
    find_resonances, init_gaussian, noise, propagate_ensemble, BarrierWindow, NoiseRecord,
    RidgeParams, ScatteringRecord, TraceRow, WaveField,
};

use crate::config::Config;
use crate::error::AppError;

/// Everything produced by one (E, w) cell.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub energy: f64,
    pub frequency: f64,
    pub record: ScatteringRecord,
    pub noise: NoiseRecord,
    /// Largest norm drift of the two orbitals.
    pub norm_drift: f64,
    /// Settled orbitals of the left and right packets.
    pub fields: [WaveField; 2],
    pub trace: Vec<TraceRow>,
}

fn cell_error(energy: f64, frequency: f64) -> impl Fn(tunnelnoise_core::Error) -> AppError {
    move |source| AppError::Cell {
        energy,
        frequency,
        source,
    }
}

/// Propagates both packets at energy `energy` under a well oscillating at
/// `frequency` and analyses the settled pair.
pub fn simulate_pair(
    cfg: &Config,
    energy: f64,
    frequency: f64,
    trace_every: Option<usize>,
) -> Result<PairOutcome, AppError> {
    let wrap = cell_error(energy, frequency);
    let model = cfg.model().map_err(&wrap)?;
    let grid = cfg.grid().map_err(&wrap)?;
    let spec = cfg.potential(frequency).map_err(&wrap)?;
    let prop = cfg.propagation();
    let mut fields = Vec::with_capacity(2);
    for packet in [cfg.packet_a(energy), cfg.packet_b(energy)] {
        packet.check_clearance(&spec).map_err(&wrap)?;
        fields.push(init_gaussian(&packet, &grid, &model).map_err(&wrap)?);
    }
    let (results, trace) =
        propagate_ensemble(fields, &spec, &model, &prop, trace_every).map_err(&wrap)?;
    let window = BarrierWindow::new(&spec, &prop);
    let record =
        ScatteringRecord::from_fields(&results[0].final_field, &results[1].final_field, &window)
            .map_err(&wrap)?;
    let noise = noise(cfg.occupations().map_err(&wrap)?, record.t_a, record.p_ll).map_err(&wrap)?;
    let norm_drift = results.iter().map(|r| r.norm_drift).fold(0.0, f64::max);
    let mut results = results.into_iter().map(|r| r.final_field);
    let fields = [
        results.next().expect("left field"),
        results.next().expect("right field"),
    ];
    Ok(PairOutcome {
        energy,
        frequency,
        record,
        noise,
        norm_drift,
        fields,
        trace,
    })
}

/// Result of one sweep cell; failures are kept as messages.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub energy: f64,
    pub frequency: f64,
    pub outcome: Result<(ScatteringRecord, NoiseRecord), String>,
}

impl CellResult {
    pub fn s(&self) -> f64 {
        self.outcome.as_ref().map_or(f64::NAN, |(_, n)| n.s)
    }

    pub fn overlap(&self) -> f64 {
        self.outcome
            .as_ref()
            .map_or(f64::NAN, |(r, _)| r.i_left.norm_sqr())
    }
}

fn run_cell(cfg: &Config, energy: f64, frequency: f64) -> CellResult {
    let outcome = simulate_pair(cfg, energy, frequency, None)
        .map(|p| (p.record, p.noise))
        .map_err(|e| match e {
            AppError::Cell { source, .. } => source.to_string(),
            other => other.to_string(),
        });
    CellResult {
        energy,
        frequency,
        outcome,
    }
}

/// Cells in row-major order: energy index outer, frequency index inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub energies: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn cell(&self, ie: usize, iw: usize) -> &CellResult {
        &self.cells[ie * self.frequencies.len() + iw]
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

/// Runs the single cell described by `packet.energy` and `potential.osc_frequency`.
pub fn run_single(cfg: &Config) -> Result<PairOutcome, AppError> {
    simulate_pair(
        cfg,
        cfg.packet.energy,
        cfg.potential.osc_frequency,
        cfg.propagation.trajectory_every,
    )
}

/// Runs every (E, w) cell of the configured axes on `workers` threads.
/// Cell failures are recorded, not propagated.
pub fn run_sweep(cfg: &Config, workers: usize) -> Result<SweepResult, AppError> {
    cfg.validate()?;
    let energies = cfg.energies();
    let frequencies = cfg.frequencies();
    let pairs: Vec<(f64, f64)> = energies
        .iter()
        .flat_map(|&e| frequencies.iter().map(move |&w| (e, w)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Config(format!("cannot start {workers} workers: {e}")))?;
    let cells = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(e, w)| run_cell(cfg, e, w))
            .collect()
    });
    Ok(SweepResult {
        energies,
        frequencies,
        cells,
    })
}

/// First static resonance of the configured geometry, from the transfer matrix.
pub fn static_resonance(cfg: &Config) -> Result<tunnelnoise_core::Resonance, AppError> {
    let spec = cfg.potential(0.0)?;
    let spec = tunnelnoise_core::PotentialSpec {
        osc_phase: 0.0,
        ..spec
    };
    let s = &cfg.spectrum;
    let found = find_resonances(
        &spec,
        0.0,
        &cfg.model()?,
        s.energy_min,
        s.energy_max,
        s.step,
        RESONANCE_TOLERANCE,
    )?;
    Ok(found[0])
}

pub fn ridge_params(cfg: &Config, e_r0: f64) -> Result<RidgeParams, AppError> {
    Ok(RidgeParams {
        e_r0,
        barrier_height: cfg.potential.v_b,
        x0: cfg.injection_distance(),
        model: cfg.model()?,
        osc_sign: cfg.potential.osc_sign,
        structure_length: cfg.structure_length(),
    })
}

/// Noise maximum of one frequency column against the ridge prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeRow {
    pub frequency: f64,
    /// Grid energy of the largest `S` (lowest energy on ties).
    pub grid_energy: f64,
    /// Vertex of the parabola through the maximum and its neighbours.
    pub refined_energy: f64,
    pub s_max: f64,
    /// Energy on the predicted ridge at this frequency; NaN if the ridge never reaches it.
    pub predicted_energy: f64,
    pub deviation: f64,
    /// Prediction and deviation with the ridge anchored at the static noise
    /// maximum instead of the transmission resonance.
    pub noise_anchor_predicted_energy: f64,
    pub noise_anchor_deviation: f64,
    /// `|w| <= 0.5 / τ_t` with `τ_t` taken at the static resonance.
    pub within_transit_limit: bool,
    /// Maximum sits on the first or last energy, so no refinement was possible.
    pub at_edge: bool,
    pub valid_cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeReport {
    /// Transmission resonance of the static structure; anchors the prediction.
    pub e_r0: f64,
    /// Refined noise maximum of the `w = 0` column, NaN without such a column.
    pub static_noise_peak: f64,
    pub transit_time: f64,
    pub rows: Vec<RidgeRow>,
}

/// Vertex abscissa of the parabola through three points, kept inside `[x0, x2]`.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> f64 {
    let (a, b) = (x[1] - x[0], x[1] - x[2]);
    let num = a * a * (y[1] - y[2]) - b * b * (y[1] - y[0]);
    let den = a * (y[1] - y[2]) - b * (y[1] - y[0]);
    if den == 0.0 || !den.is_finite() {
        return x[1];
    }
    (x[1] - 0.5 * num / den).clamp(x[0], x[2])
}

/// Per-frequency argmax of `values[ie][iw]` over energies.
pub fn column_maximum(
    energies: &[f64],
    column: impl Fn(usize) -> f64,
) -> Option<(usize, f64, bool)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, _) in energies.iter().enumerate() {
        let v = column(i);
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, v) = best?;
    let n = energies.len();
    if i == 0 || i + 1 == n || column(i - 1).is_nan() || column(i + 1).is_nan() {
        return Some((i, energies[i], true));
    }
    let x = [energies[i - 1], energies[i], energies[i + 1]];
    let y = [column(i - 1), v, column(i + 1)];
    Some((i, parabola_vertex(x, y), false))
}

/// Extracts the noise ridge from `sweep` and compares it with the prediction.
pub fn ridge_report(cfg: &Config, sweep: &SweepResult) -> Result<RidgeReport, AppError> {
    let e_r0 = static_resonance(cfg)?.energy;
    let params = ridge_params(cfg, e_r0)?;
    let transit_time = params.transit_time(e_r0);
    let static_noise_peak = sweep
        .frequencies
        .iter()
        .position(|&w| w == 0.0)
        .and_then(|iw| column_maximum(&sweep.energies, |ie| sweep.cell(ie, iw).s()))
        .map_or(f64::NAN, |(_, e, _)| e);
    let noise_params = RidgeParams {
        e_r0: static_noise_peak,
        ..params
    };
    let rows = sweep
        .frequencies
        .iter()
        .enumerate()
        .map(|(iw, &w)| {
            let column = |ie: usize| sweep.cell(ie, iw).s();
            let valid_cells = (0..sweep.energies.len())
                .filter(|&ie| !column(ie).is_nan())
                .count();
            let predicted_energy = ridge_energy(w, &params).unwrap_or(f64::NAN);
            let noise_anchor_predicted_energy = if static_noise_peak.is_nan() {
                f64::NAN
            } else {
                ridge_energy(w, &noise_params).unwrap_or(f64::NAN)
            };
            let (grid_energy, refined_energy, s_max, at_edge) =
                match column_maximum(&sweep.energies, column) {
                    Some((i, refined, edge)) => (sweep.energies[i], refined, column(i), edge),
                    None => (f64::NAN, f64::NAN, f64::NAN, false),
                };
            RidgeRow {
                frequency: w,
                grid_energy,
                refined_energy,
                s_max,
                predicted_energy,
                deviation: refined_energy - predicted_energy,
                noise_anchor_predicted_energy,
                noise_anchor_deviation: refined_energy - noise_anchor_predicted_energy,
                within_transit_limit: w.abs() <= 0.5 / transit_time,
                at_edge,
                valid_cells,
            }
        })
        .collect();
    Ok(RidgeReport {
        e_r0,
        static_noise_peak,
        transit_time,
        rows,
    })
}
