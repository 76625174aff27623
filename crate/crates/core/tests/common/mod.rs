#![allow(dead_code)]

use tunnelnoise_core::{
    init_gaussian, Direction, Grid1D, PhysicalModel, WaveField, WavePacketSpec,
};

pub fn model() -> PhysicalModel {
    PhysicalModel::default()
}

pub fn reference_grid() -> Grid1D {
    Grid1D::with_spacing(-700.0, 700.0, 0.05).unwrap()
}

pub fn packet(energy: f64) -> WavePacketSpec {
    WavePacketSpec {
        x0: -175.0,
        sigma: 50.0,
        central_energy: energy,
        direction: Direction::LeftToRight,
    }
}

pub fn gaussian(spec: &WavePacketSpec, grid: &Grid1D) -> WaveField {
    init_gaussian(spec, grid, &model()).unwrap()
}

/// Transfer-matrix transmission averaged over the packet's momentum density
/// `|g(k)|² ∝ exp(-σ² (k - k0)² / 2)`; components with `k <= 0` never cross.
pub fn packet_averaged_transmission(t_of_e: impl Fn(f64) -> f64, spec: &WavePacketSpec) -> f64 {
    let m = model();
    let k0 = m.wavenumber(spec.central_energy);
    let sk = 1.0 / spec.sigma;
    let n = 4001;
    let (lo, hi) = (k0 - 8.0 * sk, k0 + 8.0 * sk);
    let h = (hi - lo) / (n - 1) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let k = lo + i as f64 * h;
        let w = (-(k - k0).powi(2) / (2.0 * sk * sk)).exp();
        den += w;
        if k > 0.0 {
            num += w * t_of_e(m.energy_of_wavenumber(k));
        }
    }
    num / den
}
