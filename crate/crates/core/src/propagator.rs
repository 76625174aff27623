//! Crank–Nicolson propagation of one-particle orbitals.
//!
//! Each step solves `(1 + iβH) ψ' = (1 - iβH) ψ` with `β = dt/(2ħ)`, the
//! three-point Laplacian and the potential evaluated at the midpoint time
//! `t + dt/2`. The grid endpoints are hard walls (`ψ = 0`).
//!
//! The potential enters `H` as a symmetric tridiagonal matrix: its exact
//! overlaps with products of neighbouring hat functions, measured from the
//! level halfway up the barrier. On an interface node this cancels the
//! leading error of the Laplacian, and the reference level balances the
//! remaining dispersion error inside the barriers against the one in the
//! well. `H` stays real symmetric, so the step is exactly unitary.
//!
//! The two-particle Hamiltonian is a sum of identical one-particle terms, so
//! the orbitals of both electrons evolve independently under the same
//! potential. [`propagate_ensemble`] steps several orbitals with one shared
//! factorization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{ensure, Error, Result};
use crate::grid::Grid1D;
use crate::packet::WaveField;
use crate::potential::PotentialSpec;
use crate::tridiag::TwistedSystem;
use crate::units::PhysicalModel;
use crate::C64;

/// Density allowed on the nodes next to a hard wall before the run is
/// declared contaminated by wall reflections.
pub const WALL_DENSITY_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub max_time: f64,
    /// Barrier-region probability regarded as negligible. Values `>= 1`
    /// can never be exceeded, so the first window settles the run.
    pub settle_threshold: f64,
    pub settle_window: f64,
    /// Extra margin added on both sides of the structure for the barrier region.
    pub barrier_margin: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            max_time: 4000.0,
            settle_threshold: 1e-6,
            settle_window: 20.0,
            barrier_margin: 2.0,
        }
    }
}

impl PropagationConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.dt.is_finite() && self.dt > 0.0, "dt", self.dt)?;
        ensure(
            self.max_time.is_finite() && self.max_time > 0.0,
            "max_time",
            self.max_time,
        )?;
        ensure(
            self.settle_threshold.is_finite() && self.settle_threshold > 0.0,
            "settle_threshold",
            self.settle_threshold,
        )?;
        ensure(
            self.settle_window >= 10.0 * self.dt * (1.0 - 1e-12),
            "settle_window",
            self.settle_window,
        )?;
        ensure(
            self.barrier_margin.is_finite() && self.barrier_margin >= 0.0,
            "barrier_margin",
            self.barrier_margin,
        )?;
        Ok(())
    }

    /// `[lo, hi]` bounds of the barrier region for `spec`.
    pub fn barrier_region(&self, spec: &PotentialSpec) -> (f64, f64) {
        let half = spec.structure_half_width() + self.barrier_margin;
        (spec.well_center - half, spec.well_center + half)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub final_field: WaveField,
    pub t1: f64,
    pub norm_drift: f64,
    /// `(t, barrier probability)` after every step, starting at the initial time.
    pub barrier_probability_history: Vec<(f64, f64)>,
}

/// One diagnostic sample of a propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub field: usize,
    pub step: usize,
    pub time: f64,
    pub norm_sqr: f64,
    pub barrier_probability: f64,
    pub centroid: f64,
}

/// Reusable Crank–Nicolson stepper for one grid and potential.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    grid: Grid1D,
    spec: PotentialSpec,
    dt: f64,
    beta: f64,
    kinetic: f64,
    reference: f64,
    system: TwistedSystem,
    /// Rows (node index minus one) whose entries depend on time.
    dynamic: Range<usize>,
    moments: Vec<[f64; 3]>,
    t0: f64,
    steps: u64,
    work: Vec<C64>,
}

impl CrankNicolson {
    pub fn new(
        grid: &Grid1D,
        spec: &PotentialSpec,
        model: &PhysicalModel,
        dt: f64,
        t0: f64,
    ) -> Result<Self> {
        spec.validate()?;
        ensure(dt.is_finite() && dt > 0.0, "dt", dt)?;
        ensure(t0.is_finite(), "t0", t0)?;
        let b = spec.interfaces();
        grid.contains_interval(b[0], b[3])?;
        let n = grid.n_points;
        let rows = n - 2;
        let nodes = spec.dynamic_nodes(grid);
        let lo = nodes.start.clamp(1, n - 1) - 1;
        let hi = nodes.end.clamp(1, n - 1) - 1;
        let dynamic = lo..hi.max(lo);
        let mut stepper = Self {
            grid: *grid,
            spec: *spec,
            dt,
            beta: dt / (2.0 * model.hbar),
            kinetic: model.kinetic_prefactor() / (grid.dx * grid.dx),
            reference: spec.barrier_height / 2.0,
            system: TwistedSystem::new(
                &vec![C64::new(0.0, 0.0); rows - 1],
                vec![C64::new(1.0, 0.0); rows],
                dynamic.clone(),
            )?,
            dynamic,
            moments: vec![[0.0; 3]; rows + 1],
            t0,
            steps: 0,
            work: vec![C64::new(0.0, 0.0); 2 * rows],
        };
        stepper.assemble(0..rows, t0 + dt / 2.0)?;
        stepper.moments.truncate(stepper.dynamic.len() + 1);
        Ok(stepper)
    }

    /// Rewrites `rows` of `1 + iβH` for the potential at time `t`.
    fn assemble(&mut self, rows: Range<usize>, t: f64) -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        // row j is node j + 1, flanked by cells j and j + 1
        let cells = rows.start..rows.end + 1;
        let m = &mut self.moments[..cells.len()];
        self.spec
            .hat_moments_into(&self.grid, t, self.reference, cells, m);
        let (beta, kinetic, reference) = (self.beta, self.kinetic, self.reference);
        let m = &self.moments[..rows.len() + 1];
        let diag = m
            .windows(2)
            .map(|w| C64::new(1.0, beta * (2.0 * kinetic + reference + w[0][1] + w[1][0])));
        let off = m[1..rows.len()]
            .iter()
            .map(|c| C64::new(0.0, beta * (c[2] - kinetic)));
        self.system.update(rows, diag, off)
    }

    pub fn time(&self) -> f64 {
        self.t0 + self.steps as f64 * self.dt
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Advances every orbital in `states` (full-grid samples) by one step.
    pub fn advance(&mut self, states: &mut [&mut [C64]]) -> Result<()> {
        if self.steps > 0 && !self.dynamic.is_empty() {
            let mid = self.time() + self.dt / 2.0;
            self.assemble(self.dynamic.clone(), mid)?;
        }
        let n = self.grid.n_points;
        for psi in states.iter() {
            assert_eq!(psi.len(), n, "state does not match grid");
        }
        let (w0, rest) = self.work.split_at_mut(n - 2);
        let w1 = &mut rest[..n - 2];
        let mut chunks = states.chunks_mut(2);
        for chunk in &mut chunks {
            match chunk {
                [a, b] => self
                    .system
                    .apply_cayley([&mut **a, &mut **b], [&mut *w0, &mut *w1]),
                [a] => self.system.apply_cayley([&mut **a], [&mut *w0]),
                _ => unreachable!(),
            }
        }
        self.steps += 1;
        Ok(())
    }
}

/// One Crank–Nicolson step of `field` starting at `field.time`.
pub fn step(
    field: &WaveField,
    spec: &PotentialSpec,
    model: &PhysicalModel,
    dt: f64,
) -> Result<WaveField> {
    let mut stepper = CrankNicolson::new(&field.grid, spec, model, dt, field.time)?;
    let mut next = field.clone();
    stepper.advance(&mut [&mut next.values])?;
    next.time = stepper.time();
    Ok(next)
}

struct SettleState {
    armed: bool,
    quiet_since: Option<f64>,
}

impl SettleState {
    fn new(threshold: f64, t0: f64) -> Self {
        let impossible = threshold >= 1.0;
        Self {
            armed: impossible,
            quiet_since: impossible.then_some(t0),
        }
    }

    fn observe(&mut self, t: f64, p: f64, threshold: f64) {
        if p >= threshold {
            self.armed = true;
            self.quiet_since = None;
        } else if self.armed && self.quiet_since.is_none() {
            self.quiet_since = Some(t);
        }
    }

    fn settled(&self, t: f64, window: f64) -> bool {
        self.armed
            && self
                .quiet_since
                .is_some_and(|since| t - since >= window - 1e-9)
    }
}

/// Propagates a single orbital until the barrier region has stayed below the
/// settle threshold for a full window.
pub fn propagate_until_settled(
    field: WaveField,
    spec: &PotentialSpec,
    model: &PhysicalModel,
    cfg: &PropagationConfig,
) -> Result<PropagationResult> {
    let (mut results, _) = propagate_ensemble(alloc::vec![field], spec, model, cfg, None)?;
    Ok(results.pop().expect("one result per field"))
}

/// Propagates several orbitals under one potential to a common settling time
/// `t1`: the first instant at which every orbital satisfies the settle rule.
///
/// A probe trace is sampled every `trace_every` steps when requested.
pub fn propagate_ensemble(
    fields: Vec<WaveField>,
    spec: &PotentialSpec,
    model: &PhysicalModel,
    cfg: &PropagationConfig,
    trace_every: Option<usize>,
) -> Result<(Vec<PropagationResult>, Vec<TraceRow>)> {
    cfg.validate()?;
    let first = fields.first().ok_or(Error::InvalidParameter {
        name: "fields",
        value: 0.0,
    })?;
    let grid = first.grid;
    let t0 = first.time;
    for f in &fields {
        if !f.grid.same_as(&grid) {
            return Err(Error::MismatchedGrid);
        }
        if f.time != t0 {
            return Err(Error::MismatchedTime { a: t0, b: f.time });
        }
    }
    let mut stepper = CrankNicolson::new(&grid, spec, model, cfg.dt, t0)?;
    let (lo, hi) = cfg.barrier_region(spec);
    let window = grid.index_range(lo, hi);
    let n = grid.n_points;
    let barrier_probability =
        |v: &[C64]| v[window.clone()].iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dx;

    let initial_norms: Vec<f64> = fields.iter().map(WaveField::norm_sqr).collect();
    let mut states: Vec<Vec<C64>> = fields.into_iter().map(|f| f.values).collect();
    let mut settle: Vec<SettleState> = states
        .iter()
        .map(|_| SettleState::new(cfg.settle_threshold, t0))
        .collect();
    let mut history: Vec<Vec<(f64, f64)>> = vec![Vec::new(); states.len()];
    let mut trace = Vec::new();
    let max_steps = libm::ceil((cfg.max_time - t0) / cfg.dt).max(0.0) as usize;

    let mut step_index = 0usize;
    loop {
        let t = stepper.time();
        for (idx, psi) in states.iter().enumerate() {
            let p = barrier_probability(psi);
            history[idx].push((t, p));
            settle[idx].observe(t, p, cfg.settle_threshold);
            if let Some(every) = trace_every.filter(|&k| k > 0) {
                if step_index.is_multiple_of(every) {
                    let tmp = WaveField {
                        grid,
                        values: psi.clone(),
                        time: t,
                    };
                    trace.push(TraceRow {
                        field: idx,
                        step: step_index,
                        time: t,
                        norm_sqr: tmp.norm_sqr(),
                        barrier_probability: p,
                        centroid: tmp.mean_position(),
                    });
                }
            }
            let wall = psi[1].norm_sqr().max(psi[n - 2].norm_sqr());
            if wall > WALL_DENSITY_LIMIT {
                return Err(Error::BoundaryContamination {
                    time: t,
                    density: wall,
                });
            }
        }
        if settle.iter().all(|s| s.settled(t, cfg.settle_window)) {
            break;
        }
        if step_index >= max_steps {
            let worst = history
                .iter()
                .map(|h| h.last().map_or(0.0, |x| x.1))
                .fold(0.0, f64::max);
            return Err(Error::NotSettled {
                max_time: cfg.max_time,
                barrier_probability: worst,
            });
        }
        let mut refs: Vec<&mut [C64]> = states.iter_mut().map(|s| s.as_mut_slice()).collect();
        stepper.advance(&mut refs)?;
        step_index += 1;
    }

    let t1 = stepper.time();
    let results = states
        .into_iter()
        .zip(history)
        .zip(initial_norms)
        .map(|((values, history), norm0)| {
            let final_field = WaveField {
                grid,
                values,
                time: t1,
            };
            let norm_drift = (final_field.norm_sqr() - norm0).abs();
            PropagationResult {
                final_field,
                t1,
                norm_drift,
                barrier_probability_history: history,
            }
        })
        .collect();
    Ok((results, trace))
}
