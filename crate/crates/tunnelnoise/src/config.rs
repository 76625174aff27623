//! Run configuration, read from TOML.
//!
//! Every section is optional and every field has a default, so an empty file
//! describes the reference experiment. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tunnelnoise_core::resonance::DEFAULT_SCAN;
use tunnelnoise_core::{
    Direction, Grid1D, OccupationPair, PhysicalModel, PotentialSpec, PropagationConfig,
    WavePacketSpec, DEFAULT_ORACLE_STRIDE,
};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    pub grid: GridSection,
    pub potential: PotentialSection,
    pub packet: PacketSection,
    pub propagation: PropagationSection,
    pub sweep: SweepSection,
    pub noise: NoiseSection,
    pub oracle: OracleSection,
    pub spectrum: SpectrumSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub mass_ratio: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            mass_ratio: tunnelnoise_core::units::DEFAULT_MASS_RATIO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            x_min: -700.0,
            x_max: 700.0,
            dx: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSection {
    pub v_b: f64,
    pub barrier_width: f64,
    pub well_width: f64,
    pub well_center: f64,
    /// Defaults to `v_b / 2`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub osc_amplitude: Option<f64>,
    /// Angular frequency in rad/fs; negative values flip the oscillation.
    pub osc_frequency: f64,
    pub osc_sign: f64,
    pub osc_phase: f64,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            v_b: 0.4,
            barrier_width: 1.0,
            well_width: 5.2,
            well_center: 0.0,
            osc_amplitude: None,
            osc_frequency: 0.0,
            osc_sign: 1.0,
            osc_phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSection {
    /// Centre of the packet injected from the left; the other packet starts
    /// at the mirror image.
    pub x0: f64,
    pub sigma: f64,
    pub energy: f64,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self {
            x0: -175.0,
            sigma: 50.0,
            energy: 0.073,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationSection {
    pub dt: f64,
    pub max_time: f64,
    pub settle_threshold: f64,
    pub settle_window: f64,
    pub barrier_margin: f64,
    /// Write a probe trace every this many steps (`single` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory_every: Option<usize>,
}

impl Default for PropagationSection {
    fn default() -> Self {
        let d = PropagationConfig::default();
        Self {
            dt: d.dt,
            max_time: d.max_time,
            settle_threshold: d.settle_threshold,
            settle_window: d.settle_window,
            barrier_margin: d.barrier_margin,
            trajectory_every: None,
        }
    }
}

/// Sweep axes. Explicit lists override the evenly spaced ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub energy_min: f64,
    pub energy_max: f64,
    pub energy_points: usize,
    pub frequency_min: f64,
    pub frequency_max: f64,
    pub frequency_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frequencies: Option<Vec<f64>>,
    pub workers: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            energy_min: 0.05,
            energy_max: 0.12,
            energy_points: 29,
            frequency_min: -8e-4,
            frequency_max: 8e-4,
            frequency_points: 33,
            energies: None,
            frequencies: None,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub f_a: f64,
    pub f_b: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self { f_a: 1.0, f_b: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    pub stride: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            stride: DEFAULT_ORACLE_STRIDE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub energy_min: f64,
    pub energy_max: f64,
    pub step: f64,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        let (energy_min, energy_max, step) = DEFAULT_SCAN;
        Self {
            energy_min,
            energy_max,
            step,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| (lo * (n - 1 - i) as f64 + hi * i as f64) / (n - 1) as f64)
            .collect(),
    }
}

fn config_error(msg: impl Into<String>) -> AppError {
    AppError::Config(msg.into())
}

fn check_axis(name: &str, values: &[f64]) -> Result<(), AppError> {
    if values.is_empty() {
        return Err(config_error(format!("sweep.{name} is empty")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(config_error(format!("sweep.{name} has a non-finite entry")));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_error(format!(
            "sweep.{name} must be strictly increasing"
        )));
    }
    Ok(())
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self, AppError> {
        let cfg: Self = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Canonical TOML rendering, echoed into every output file.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every section, so a run never starts on a bad configuration.
    pub fn validate(&self) -> Result<(), AppError> {
        let wrap = |e: tunnelnoise_core::Error| config_error(e.to_string());
        self.model().map_err(wrap)?;
        let grid = self.grid().map_err(wrap)?;
        let potential = self.potential(self.potential.osc_frequency).map_err(wrap)?;
        self.propagation().validate().map_err(wrap)?;
        self.occupations().map_err(wrap)?;
        let packet = self.packet_a(self.packet.energy);
        packet.validate().map_err(wrap)?;
        packet.check_clearance(&potential).map_err(wrap)?;
        let b = potential.interfaces();
        grid.contains_interval(b[0], b[3]).map_err(wrap)?;
        for x in [
            self.packet.x0,
            -self.packet.x0 + 2.0 * self.potential.well_center,
        ] {
            let margin = 4.0 * self.packet.sigma;
            if x - margin < grid.x_min || x + margin > grid.x_max {
                return Err(config_error(format!(
                    "packet at x = {x} needs 4 sigma inside the grid"
                )));
            }
        }
        if self.packet.x0 >= self.potential.well_center {
            return Err(config_error("packet.x0 must lie left of the structure"));
        }
        if self.oracle.stride == 0 {
            return Err(config_error("oracle.stride must be positive"));
        }
        check_axis("energies", &self.energies())?;
        check_axis("frequencies", &self.frequencies())?;
        if self.energies().iter().any(|&e| e <= 0.0) {
            return Err(config_error("sweep energies must be positive"));
        }
        if self.sweep.workers == 0 {
            return Err(config_error("sweep.workers must be positive"));
        }
        let s = &self.spectrum;
        if !(s.energy_min > 0.0 && s.energy_max > s.energy_min && s.step > 0.0) {
            return Err(config_error(
                "spectrum range must satisfy 0 < energy_min < energy_max, step > 0",
            ));
        }
        Ok(())
    }

    pub fn model(&self) -> tunnelnoise_core::Result<PhysicalModel> {
        PhysicalModel::new(self.model.mass_ratio)
    }

    pub fn grid(&self) -> tunnelnoise_core::Result<Grid1D> {
        Grid1D::with_spacing(self.grid.x_min, self.grid.x_max, self.grid.dx)
    }

    /// Potential with angular frequency `w`; all other fields come from the file.
    pub fn potential(&self, w: f64) -> tunnelnoise_core::Result<PotentialSpec> {
        let p = &self.potential;
        let spec = PotentialSpec {
            barrier_height: p.v_b,
            barrier_width: p.barrier_width,
            well_width: p.well_width,
            well_center: p.well_center,
            osc_amplitude: p.osc_amplitude.unwrap_or(p.v_b / 2.0),
            osc_angular_frequency: w,
            osc_sign: p.osc_sign,
            osc_phase: p.osc_phase,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Left packet at energy `energy`.
    pub fn packet_a(&self, energy: f64) -> WavePacketSpec {
        WavePacketSpec {
            x0: self.packet.x0,
            sigma: self.packet.sigma,
            central_energy: energy,
            direction: Direction::LeftToRight,
        }
    }

    /// Right packet: mirror image of the left one about the structure centre.
    pub fn packet_b(&self, energy: f64) -> WavePacketSpec {
        let a = self.packet_a(energy).mirrored();
        WavePacketSpec {
            x0: a.x0 + 2.0 * self.potential.well_center,
            ..a
        }
    }

    pub fn propagation(&self) -> PropagationConfig {
        let p = &self.propagation;
        PropagationConfig {
            dt: p.dt,
            max_time: p.max_time,
            settle_threshold: p.settle_threshold,
            settle_window: p.settle_window,
            barrier_margin: p.barrier_margin,
        }
    }

    pub fn occupations(&self) -> tunnelnoise_core::Result<OccupationPair> {
        OccupationPair::new(self.noise.f_a, self.noise.f_b)
    }

    pub fn energies(&self) -> Vec<f64> {
        let s = &self.sweep;
        s.energies
            .clone()
            .unwrap_or_else(|| linspace(s.energy_min, s.energy_max, s.energy_points))
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let s = &self.sweep;
        s.frequencies
            .clone()
            .unwrap_or_else(|| linspace(s.frequency_min, s.frequency_max, s.frequency_points))
    }

    /// Injection distance from the structure centre.
    pub fn injection_distance(&self) -> f64 {
        (self.potential.well_center - self.packet.x0).abs()
    }

    /// Barrier-to-barrier length used for the transit time.
    pub fn structure_length(&self) -> f64 {
        2.0 * self.potential.barrier_width + self.potential.well_width
    }
}
