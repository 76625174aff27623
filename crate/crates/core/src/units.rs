//! Unit system (eV, nm, fs) and the effective-mass model.

use crate::error::{ensure, Result};

/// Reduced Planck constant in eV·fs.
pub const HBAR: f64 = 0.6582119569;
/// Electron rest energy in eV.
pub const ELECTRON_REST_ENERGY: f64 = 510_998.95;
/// Speed of light in nm/fs.
pub const SPEED_OF_LIGHT: f64 = 299.792458;
/// Free electron mass in eV·fs²/nm².
pub const ELECTRON_MASS: f64 = ELECTRON_REST_ENERGY / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
/// GaAs conduction-band mass ratio, the default effective mass.
pub const DEFAULT_MASS_RATIO: f64 = 0.067;

/// Elementary charge in coulomb.
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// Planck constant in J·s.
pub const PLANCK_SI: f64 = 6.626_070_15e-34;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalModel {
    pub hbar: f64,
    /// m* in eV·fs²/nm².
    pub effective_mass: f64,
    /// Carrier charge in units of the elementary charge.
    pub charge: f64,
    pub mass_ratio: f64,
}

impl PhysicalModel {
    pub fn new(mass_ratio: f64) -> Result<Self> {
        ensure(
            mass_ratio.is_finite() && mass_ratio > 0.0,
            "mass_ratio",
            mass_ratio,
        )?;
        Ok(Self {
            hbar: HBAR,
            effective_mass: mass_ratio * ELECTRON_MASS,
            charge: 1.0,
            mass_ratio,
        })
    }

    pub fn from_effective_mass(effective_mass: f64) -> Result<Self> {
        Self::new(effective_mass / ELECTRON_MASS)
    }

    /// `ħ²/(2m*)` in eV·nm².
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.effective_mass)
    }

    /// Magnitude of the wavenumber for kinetic energy `energy`.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        libm::sqrt(2.0 * self.effective_mass * energy) / self.hbar
    }

    /// Group velocity `sqrt(2E/m*)` in nm/fs.
    pub fn velocity(&self, energy: f64) -> f64 {
        libm::sqrt(2.0 * self.effective_mass * energy) / self.effective_mass
    }

    pub fn energy_of_wavenumber(&self, k: f64) -> f64 {
        self.kinetic_prefactor() * k * k
    }
}

impl Default for PhysicalModel {
    fn default() -> Self {
        Self::new(DEFAULT_MASS_RATIO).expect("default mass ratio is valid")
    }
}
