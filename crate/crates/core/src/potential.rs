//! Double barrier with an oscillating well floor.
//!
//! Layout along x, centred on `well_center`:
//! `[0][barrier V_b][well U_w(t)][barrier V_b][0]`.
//!
//! On a grid each node carries the average of the piecewise-constant profile
//! over its cell `[x - dx/2, x + dx/2]`. Nodes strictly inside a region get
//! the region value exactly; a node sitting on an interface gets the mean of
//! its two neighbours. This keeps the sampled profile mirror symmetric on a
//! symmetric grid.
//!
//! The propagator instead uses [`PotentialSpec::hat_moments_into`]: exact
//! integrals of the profile against products of linear hat functions, which
//! keep the interface error of the three-point scheme at second order with a
//! small constant.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{ensure, Error, Result};
use crate::grid::Grid1D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    /// Barrier height in eV. Zero gives free propagation.
    pub barrier_height: f64,
    pub barrier_width: f64,
    /// Well length in nm. Zero merges the two barriers into one slab.
    pub well_width: f64,
    pub well_center: f64,
    pub osc_amplitude: f64,
    /// Angular frequency of the well floor in rad/fs.
    pub osc_angular_frequency: f64,
    /// +1 or -1.
    pub osc_sign: f64,
    pub osc_phase: f64,
}

impl PotentialSpec {
    /// Static double barrier with the default oscillation amplitude `V_b/2`.
    pub fn double_barrier(barrier_height: f64, barrier_width: f64, well_width: f64) -> Self {
        Self {
            barrier_height,
            barrier_width,
            well_width,
            well_center: 0.0,
            osc_amplitude: barrier_height / 2.0,
            osc_angular_frequency: 0.0,
            osc_sign: 1.0,
            osc_phase: 0.0,
        }
    }

    /// 0.4 eV barriers, 1.0 nm thick, around a 5.2 nm well.
    pub fn reference() -> Self {
        Self::double_barrier(0.4, 1.0, 5.2)
    }

    /// No structure at all.
    pub fn free() -> Self {
        Self {
            osc_amplitude: 0.0,
            ..Self::double_barrier(0.0, 1.0, 5.2)
        }
    }

    pub fn with_oscillation(mut self, angular_frequency: f64) -> Self {
        self.osc_angular_frequency = angular_frequency;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure(
            self.barrier_height.is_finite() && self.barrier_height >= 0.0,
            "barrier_height",
            self.barrier_height,
        )?;
        ensure(
            self.barrier_width.is_finite() && self.barrier_width > 0.0,
            "barrier_width",
            self.barrier_width,
        )?;
        ensure(
            self.well_width.is_finite() && self.well_width >= 0.0,
            "well_width",
            self.well_width,
        )?;
        ensure(
            self.well_center.is_finite(),
            "well_center",
            self.well_center,
        )?;
        ensure(
            self.osc_amplitude.is_finite() && self.osc_amplitude >= 0.0,
            "osc_amplitude",
            self.osc_amplitude,
        )?;
        ensure(
            self.osc_angular_frequency.is_finite(),
            "osc_angular_frequency",
            self.osc_angular_frequency,
        )?;
        ensure(
            self.osc_sign == 1.0 || self.osc_sign == -1.0,
            "osc_sign",
            self.osc_sign,
        )?;
        ensure(self.osc_phase.is_finite(), "osc_phase", self.osc_phase)?;
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        (self.osc_angular_frequency == 0.0 && self.osc_phase == 0.0) || self.osc_amplitude == 0.0
    }

    /// Well floor `U_w(t) = sign · A · sin(w t + phase)`.
    pub fn well_floor(&self, t: f64) -> f64 {
        if self.is_static() {
            return 0.0;
        }
        self.osc_sign
            * self.osc_amplitude
            * libm::sin(self.osc_angular_frequency * t + self.osc_phase)
    }

    /// Distance from the centre to the outer barrier edge.
    pub fn structure_half_width(&self) -> f64 {
        self.well_width / 2.0 + self.barrier_width
    }

    /// Region interfaces, left to right.
    pub fn interfaces(&self) -> [f64; 4] {
        let c = self.well_center;
        let hw = self.well_width / 2.0;
        let bw = self.barrier_width;
        [c - hw - bw, c - hw, c + hw, c + hw + bw]
    }

    /// Region values `[outside, barrier, well, barrier, outside]` at time `t`.
    pub fn region_values(&self, t: f64) -> [f64; 5] {
        let vb = self.barrier_height;
        [0.0, vb, self.well_floor(t), vb, 0.0]
    }

    /// Exact piecewise-constant profile; a point on an interface belongs to
    /// the region on its left.
    pub fn value_at(&self, x: f64, t: f64) -> f64 {
        let b = self.interfaces();
        let v = self.region_values(t);
        let region = b.iter().take_while(|&&edge| x > edge).count();
        v[region]
    }

    /// Cell-averaged potential at every node of `grid`, written into `out`.
    pub fn sample_into(&self, grid: &Grid1D, t: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), grid.n_points);
        self.sample_range_into(grid, t, 0..grid.n_points, out);
    }

    /// Like [`sample_into`](Self::sample_into) but only for `nodes`; `out`
    /// is indexed relative to `nodes.start`.
    pub fn sample_range_into(&self, grid: &Grid1D, t: f64, nodes: Range<usize>, out: &mut [f64]) {
        let values = self.region_values(t);
        let b = self.interfaces();
        let lo_edge = b[0] - grid.dx;
        let hi_edge = b[3] + grid.dx;
        for (i, slot) in nodes.zip(out.iter_mut()) {
            let x = grid.x(i);
            *slot = if x < lo_edge || x > hi_edge {
                0.0
            } else {
                cell_average(x, grid.dx, &b, &values)
            };
        }
    }

    /// Node indices whose value depends on time (cells touching the well).
    pub fn dynamic_nodes(&self, grid: &Grid1D) -> Range<usize> {
        if self.is_static() {
            return 0..0;
        }
        let b = self.interfaces();
        grid.index_range(b[1] - grid.dx, b[2] + grid.dx)
    }

    /// Moments of `V(., t) - reference` on the cells `[x_c, x_{c+1}]` for
    /// `c` in `cells`, against the hat functions of both cell nodes. With the
    /// cell coordinate `s` running from 0 to 1, each entry is
    /// `[∫(1-s)² ΔV ds, ∫s² ΔV ds, ∫s(1-s) ΔV ds]`; `out` is indexed
    /// relative to `cells.start`.
    pub fn hat_moments_into(
        &self,
        grid: &Grid1D,
        t: f64,
        reference: f64,
        cells: Range<usize>,
        out: &mut [[f64; 3]],
    ) {
        let values = self.region_values(t);
        let b = self.interfaces();
        for (c, slot) in cells.zip(out.iter_mut()) {
            let (a, e) = (grid.x(c), grid.x(c + 1));
            let mut m = [0.0; 3];
            for (r, &v) in values.iter().enumerate() {
                let lo = if r == 0 { f64::NEG_INFINITY } else { b[r - 1] };
                let hi = if r == 4 { f64::INFINITY } else { b[r] };
                let dv = v - reference;
                if lo <= a && e <= hi {
                    m = [dv / 3.0, dv / 3.0, dv / 6.0];
                    break;
                }
                let (s0, s1) = ((lo.max(a) - a) / grid.dx, (hi.min(e) - a) / grid.dx);
                if s1 > s0 {
                    let w = hat_integrals(s0.clamp(0.0, 1.0), s1.clamp(0.0, 1.0));
                    for (acc, wi) in m.iter_mut().zip(w) {
                        *acc += dv * wi;
                    }
                }
            }
            *slot = m;
        }
    }
}

/// Unit-cell moments `[∫(1-s)², ∫s², ∫s(1-s)]` over `s0..s1`.
fn hat_integrals(s0: f64, s1: f64) -> [f64; 3] {
    let cube = |s: f64| s * s * s;
    let r0 = 1.0 - s0;
    let r1 = 1.0 - s1;
    let squares = (cube(s1) - cube(s0)) / 3.0;
    [
        (cube(r0) - cube(r1)) / 3.0,
        squares,
        (s1 * s1 - s0 * s0) / 2.0 - squares,
    ]
}

fn cell_average(x: f64, dx: f64, b: &[f64; 4], values: &[f64; 5]) -> f64 {
    let lo = x - dx / 2.0;
    let hi = x + dx / 2.0;
    let mut acc = 0.0;
    for (r, &v) in values.iter().enumerate() {
        let a = if r == 0 { f64::NEG_INFINITY } else { b[r - 1] };
        let e = if r == 4 { f64::INFINITY } else { b[r] };
        if a <= lo && hi <= e {
            return v;
        }
        let overlap = hi.min(e) - lo.max(a);
        if overlap > 0.0 {
            acc += v * overlap;
        }
    }
    acc / dx
}

/// Potential `V(x, t)` sampled on `grid`.
pub fn build_potential(spec: &PotentialSpec, grid: &Grid1D, t: f64) -> Result<Vec<f64>> {
    spec.validate()?;
    ensure(t.is_finite(), "t", t)?;
    let b = spec.interfaces();
    grid.contains_interval(b[0], b[3])
        .map_err(|_| Error::GridTooSmall {
            required_min: b[0],
            required_max: b[3],
        })?;
    let mut out = vec![0.0; grid.n_points];
    spec.sample_into(grid, t, &mut out);
    Ok(out)
}
