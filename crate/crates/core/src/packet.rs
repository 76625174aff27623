//! Gaussian injection packets and sampled wavefunctions.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use crate::error::{ensure, Error, Result};
use crate::grid::Grid1D;
use crate::potential::PotentialSpec;
use crate::units::PhysicalModel;
use crate::C64;

/// Largest tolerated probability mass of the analytic packet outside the grid.
pub const MAX_TAIL_MASS: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::LeftToRight => 1.0,
            Direction::RightToLeft => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec {
    pub x0: f64,
    /// Width parameter of the amplitude exponent `-(x - x0)²/σ²`.
    pub sigma: f64,
    pub central_energy: f64,
    pub direction: Direction,
}

impl WavePacketSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.x0.is_finite(), "x0", self.x0)?;
        ensure(
            self.sigma.is_finite() && self.sigma > 0.0,
            "sigma",
            self.sigma,
        )?;
        ensure(
            self.central_energy.is_finite() && self.central_energy > 0.0,
            "central_energy",
            self.central_energy,
        )?;
        Ok(())
    }

    /// Signed central wavenumber `±sqrt(2 m* E)/ħ`.
    pub fn k0(&self, model: &PhysicalModel) -> f64 {
        self.direction.sign() * model.wavenumber(self.central_energy)
    }

    /// The packet seen from the other side of the structure: `x0 → -x0`, `k0 → -k0`.
    pub fn mirrored(&self) -> Self {
        let direction = match self.direction {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
        };
        Self {
            x0: -self.x0,
            direction,
            ..*self
        }
    }

    /// The injection point must sit at least `3σ` outside the structure.
    pub fn check_clearance(&self, potential: &PotentialSpec) -> Result<()> {
        let gap = (self.x0 - potential.well_center).abs() - potential.structure_half_width();
        ensure(gap >= 3.0 * self.sigma, "x0", self.x0)
    }

    /// Analytic amplitude at `x`.
    pub fn amplitude(&self, x: f64, model: &PhysicalModel) -> C64 {
        let norm = libm::pow(2.0 / (self.sigma * self.sigma * PI), 0.25);
        let u = x - self.x0;
        let envelope = norm * libm::exp(-u * u / (self.sigma * self.sigma));
        C64::from_polar(envelope, self.k0(model) * u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub grid: Grid1D,
    pub values: Vec<C64>,
    pub time: f64,
}

impl WaveField {
    pub fn zeros(grid: Grid1D, time: f64) -> Self {
        Self {
            grid,
            values: alloc::vec![C64::new(0.0, 0.0); grid.n_points],
            time,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Probability on nodes with `lo <= x <= hi`.
    pub fn probability_between(&self, lo: f64, hi: f64) -> f64 {
        let range = self.grid.index_range(lo, hi);
        self.values[range].iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn mean_position(&self) -> f64 {
        let g = &self.grid;
        let first: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| g.x(i) * v.norm_sqr())
            .sum();
        first * g.dx / self.norm_sqr()
    }

    pub fn position_std(&self) -> f64 {
        let g = &self.grid;
        let mean = self.mean_position();
        let second: f64 = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let d = g.x(i) - mean;
                d * d * v.norm_sqr()
            })
            .sum();
        libm::sqrt(second * g.dx / self.norm_sqr())
    }

    /// Mean wavenumber from the probability current, `Im Σ ψ* ∂ψ / Σ |ψ|²`,
    /// with a central difference for the derivative.
    pub fn mean_wavenumber(&self) -> f64 {
        let v = &self.values;
        let mut acc = 0.0;
        for i in 1..v.len() - 1 {
            acc += (v[i].conj() * (v[i + 1] - v[i - 1])).im;
        }
        acc / (2.0 * self.grid.dx) * self.grid.dx / self.norm_sqr()
    }

    pub fn conj(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.conj()).collect(),
            ..self.clone()
        }
    }
}

/// Samples the normalized Gaussian
/// `[2/(σ²π)]^{1/4} exp(i k0 (x - x0)) exp(-(x - x0)²/σ²)` on `grid`.
pub fn init_gaussian(
    spec: &WavePacketSpec,
    grid: &Grid1D,
    model: &PhysicalModel,
) -> Result<WaveField> {
    spec.validate()?;
    let margin = 4.0 * spec.sigma;
    grid.contains_interval(spec.x0 - margin, spec.x0 + margin)?;
    // |φ|² is a normal density with standard deviation σ/2.
    let tail = |d: f64| 0.5 * libm::erfc(SQRT_2 * d / (spec.sigma / 2.0) / 2.0);
    let tail_mass = tail(spec.x0 - grid.x_min) + tail(grid.x_max - spec.x0);
    if tail_mass > MAX_TAIL_MASS {
        return Err(Error::Truncation { tail_mass });
    }
    let values = grid
        .nodes()
        .map(|x| spec.amplitude(x, model))
        .collect::<Vec<_>>();
    let mut field = WaveField {
        grid: *grid,
        values,
        time: 0.0,
    };
    // hard walls
    field.values[0] = C64::new(0.0, 0.0);
    let last = grid.n_points - 1;
    field.values[last] = C64::new(0.0, 0.0);
    Ok(field)
}
