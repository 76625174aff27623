//! Grid-free transfer-matrix transmission of the (frozen) double barrier and
//! the quasi-static resonance ridge of the oscillating well.
//!
//! Ridge model: a packet launched at distance `x0` reaches the structure
//! after `t_b = x0 m*/sqrt(2 m* E)` and sees the well frozen at
//! `U_w(t_b)`, which shifts the resonance to
//! `E_r = E_r0 + (V_b/2) sin(w t_b)`. Solving for `w` gives
//! `w(E_r) = sqrt(2 m* E_r)/(x0 m*) · arcsin(2 (E_r - E_r0)/V_b)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{ensure, Error, Result};
use crate::potential::PotentialSpec;
use crate::units::PhysicalModel;
use crate::C64;

/// Energy nudge applied when the incident energy coincides with a region
/// potential (zero wavenumber makes the matching singular).
pub const DEGENERATE_ENERGY_NUDGE: f64 = 1e-12;
pub const RESONANCE_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SCAN: (f64, f64, f64) = (0.005, 0.25, 1e-4);

/// Plane-wave basis matrix `[[e^{ikx}, e^{-ikx}], [ik e^{ikx}, -ik e^{-ikx}]]`.
fn basis(k: C64, x: f64) -> [[C64; 2]; 2] {
    let i = C64::new(0.0, 1.0);
    let p = (i * k * x).exp();
    let m = (-i * k * x).exp();
    [[p, m], [i * k * p, -i * k * m]]
}

fn basis_inverse(k: C64, x: f64) -> [[C64; 2]; 2] {
    let i = C64::new(0.0, 1.0);
    let p = (i * k * x).exp();
    let m = (-i * k * x).exp();
    let ik = i * k;
    [[m * 0.5, m / ik * 0.5], [p * 0.5, -p / ik * 0.5]]
}

fn mat_vec(m: &[[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Transmission probability at energy `energy` through `spec` with the well
/// floor frozen at its value at time `t`.
pub fn transfer_matrix_transmission(
    spec: &PotentialSpec,
    t: f64,
    energy: f64,
    model: &PhysicalModel,
) -> Result<f64> {
    spec.validate()?;
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    let b = spec.interfaces();
    let v = spec.region_values(t);
    // interface r opens region r + 1; zero-width inner regions are skipped
    let mut edges: Vec<f64> = Vec::with_capacity(4);
    let mut levels: Vec<f64> = alloc::vec![v[0]];
    for r in 0..4 {
        if r < 3 && b[r + 1] - b[r] <= 0.0 {
            continue;
        }
        edges.push(b[r]);
        levels.push(v[r + 1]);
    }
    let mut e = energy;
    if levels.contains(&e) {
        e += DEGENERATE_ENERGY_NUDGE;
    }
    let k: Vec<C64> = levels
        .iter()
        .map(|&lv| (C64::new(2.0 * model.effective_mass * (e - lv), 0.0)).sqrt() / model.hbar)
        .collect();
    // outgoing wave only on the far right, then match leftwards
    let mut coeff = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    for j in (0..edges.len()).rev() {
        let x = edges[j];
        let rhs = mat_vec(&basis(k[j + 1], x), coeff);
        coeff = mat_vec(&basis_inverse(k[j], x), rhs);
    }
    let incoming = coeff[0];
    let flux_ratio = k[k.len() - 1].re / k[0].re;
    let tr = flux_ratio / incoming.norm_sqr();
    Ok(tr.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub energy: f64,
    /// Full width at half of the peak transmission.
    pub width: f64,
    pub peak_transmission: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSpectrum {
    pub energies: Vec<f64>,
    pub transmissions: Vec<f64>,
    pub resonances: Vec<Resonance>,
}

impl StaticSpectrum {
    /// Transfer-matrix scan of `spec` frozen at `t` on `[lo, hi]` with spacing `step`.
    pub fn scan(
        spec: &PotentialSpec,
        t: f64,
        model: &PhysicalModel,
        lo: f64,
        hi: f64,
        step: f64,
    ) -> Result<Self> {
        ensure(lo > 0.0 && hi > lo, "scan bounds", lo)?;
        ensure(step > 0.0 && step.is_finite(), "scan step", step)?;
        let count = libm::floor((hi - lo) / step + 1e-9) as usize + 1;
        let energies: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
        let transmissions = energies
            .iter()
            .map(|&e| transfer_matrix_transmission(spec, t, e, model))
            .collect::<Result<Vec<_>>>()?;
        let resonances = match find_resonances(spec, t, model, lo, hi, step, RESONANCE_TOLERANCE) {
            Ok(r) => r,
            Err(Error::NoResonanceFound { .. }) => Vec::new(),
            Err(e) => return Err(e),
        };
        Ok(Self {
            energies,
            transmissions,
            resonances,
        })
    }
}

/// Local maxima of `T(E)` with `T > 0.5`, refined by golden-section search to
/// `tolerance` eV.
pub fn find_resonances(
    spec: &PotentialSpec,
    t: f64,
    model: &PhysicalModel,
    lo: f64,
    hi: f64,
    step: f64,
    tolerance: f64,
) -> Result<Vec<Resonance>> {
    ensure(lo > 0.0 && hi > lo, "scan bounds", lo)?;
    ensure(step > 0.0 && step.is_finite(), "scan step", step)?;
    ensure(tolerance > 0.0, "tolerance", tolerance)?;
    let tr = |e: f64| transfer_matrix_transmission(spec, t, e, model);
    let count = libm::floor((hi - lo) / step + 1e-9) as usize + 1;
    let energies: Vec<f64> = (0..count).map(|i| lo + i as f64 * step).collect();
    let values = energies
        .iter()
        .map(|&e| tr(e))
        .collect::<Result<Vec<_>>>()?;
    let mut found = Vec::new();
    for i in 1..count.saturating_sub(1) {
        let (prev, here, next) = (values[i - 1], values[i], values[i + 1]);
        if !(here > prev && here >= next && here > 0.5) {
            continue;
        }
        let energy = golden_max(&tr, energies[i - 1], energies[i + 1], tolerance)?;
        let peak = tr(energy)?;
        let half = peak / 2.0;
        let left = half_crossing(&tr, energy, lo, half, step, tolerance)?;
        let right = half_crossing(&tr, energy, hi, half, step, tolerance)?;
        found.push(Resonance {
            energy,
            width: right - left,
            peak_transmission: peak,
        });
    }
    if found.is_empty() {
        Err(Error::NoResonanceFound { lo, hi })
    } else {
        Ok(found)
    }
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let ratio = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok((a + b) / 2.0)
}

/// Walks from `from` toward `limit` until `T` drops below `level`, then
/// bisects. Returns `limit` if it never drops.
fn half_crossing(
    f: &impl Fn(f64) -> Result<f64>,
    from: f64,
    limit: f64,
    level: f64,
    step: f64,
    tol: f64,
) -> Result<f64> {
    let dir = if limit >= from { 1.0 } else { -1.0 };
    let mut inside = from;
    loop {
        let next = inside + dir * step;
        if (next - limit) * dir >= 0.0 {
            return Ok(limit);
        }
        if f(next)? < level {
            let (mut a, mut b) = (inside, next);
            while (b - a).abs() > tol {
                let m = 0.5 * (a + b);
                if f(m)? < level {
                    b = m;
                } else {
                    a = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        inside = next;
    }
}

/// Ballistic time `|x0| m*/sqrt(2 m* E)` from the injection point to the barrier.
pub fn arrival_time(energy: f64, x0: f64, model: &PhysicalModel) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    ensure(x0.is_finite() && x0 != 0.0, "x0", x0)?;
    Ok(x0.abs() / model.velocity(energy))
}

/// Parameters of the quasi-static ridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeParams {
    /// Static resonance energy.
    pub e_r0: f64,
    pub barrier_height: f64,
    /// Injection distance from the structure centre.
    pub x0: f64,
    pub model: PhysicalModel,
    pub osc_sign: f64,
    /// Length used for the barrier transit time.
    pub structure_length: f64,
}

impl RidgeParams {
    fn arcsin_argument(&self, energy: f64) -> f64 {
        2.0 * (energy - self.e_r0) / self.barrier_height
    }

    /// Barrier transit time `structure_length / v(E)`.
    pub fn transit_time(&self, energy: f64) -> f64 {
        self.structure_length / self.model.velocity(energy)
    }

    /// True when `|w|` is no longer small against `1/τ_t` at `energy`, where
    /// the frozen-well picture stops applying.
    pub fn outside_quasi_static_regime(&self, energy: f64, w: f64) -> bool {
        w.abs() * self.transit_time(energy) >= 1.0
    }
}

/// Frequency whose ridge passes through resonance energy `energy`.
pub fn ridge_frequency(energy: f64, params: &RidgeParams) -> Result<f64> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::NonPositiveEnergy { energy });
    }
    let arg = params.arcsin_argument(energy);
    if !(-1.0..=1.0).contains(&arg) {
        return Err(Error::OutOfArcsinDomain { argument: arg });
    }
    let prefactor = libm::sqrt(2.0 * params.model.effective_mass * energy)
        / (params.x0.abs() * params.model.effective_mass);
    Ok(params.osc_sign * prefactor * libm::asin(arg))
}

/// Resonance seen by a packet arriving at `t_b` while the well oscillates at `w`.
pub fn shifted_resonance(t_b: f64, params: &RidgeParams, w: f64) -> f64 {
    params.e_r0 + params.osc_sign * params.barrier_height / 2.0 * libm::sin(w * t_b)
}

/// Inverts [`ridge_frequency`] on the branch through `E_r0`: the energy whose
/// ridge frequency is `w`, or `None` if the ridge never reaches `w`.
pub fn ridge_energy(w: f64, params: &RidgeParams) -> Option<f64> {
    if w == 0.0 {
        return Some(params.e_r0);
    }
    let half = params.barrier_height / 2.0;
    let f = |e: f64| ridge_frequency(e, params).map(|x| x - w);
    // the branch runs from the minimum of w(E) below E_r0 to E_r0 + V_b/2
    let upper = params.e_r0 + half;
    let lower_limit = (params.e_r0 - half).max(1e-9);
    // locate the turning point of w(E) below E_r0 (w(E) -> 0 again as E -> 0)
    let lower = {
        let (mut a, mut b) = (lower_limit, params.e_r0);
        let g = |e: f64| ridge_frequency(e, params).unwrap_or(0.0) * params.osc_sign;
        for _ in 0..200 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if g(m1) < g(m2) {
                b = m2;
            } else {
                a = m1;
            }
        }
        0.5 * (a + b)
    };
    let (mut a, mut b) = (lower, upper);
    let (fa, fb) = (f(a).ok()?, f(b).ok()?);
    if fa * fb > 0.0 {
        return None;
    }
    let increasing = fb > fa;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m).ok()?;
        if (fm > 0.0) == increasing {
            b = m;
        } else {
            a = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Tabulated ridge `(E_r, w, t_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgePrediction {
    pub params: RidgeParams,
    pub samples: Vec<RidgeSample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeSample {
    pub energy: f64,
    pub w: f64,
    pub t_b: f64,
    pub transit_time: f64,
    pub outside_regime: bool,
}

impl RidgePrediction {
    /// Evaluates the ridge at every energy inside the arcsin domain.
    pub fn tabulate(params: RidgeParams, energies: &[f64]) -> Result<Self> {
        let mut samples = Vec::new();
        for &energy in energies {
            let w = match ridge_frequency(energy, &params) {
                Ok(w) => w,
                Err(Error::OutOfArcsinDomain { .. }) => continue,
                Err(e) => return Err(e),
            };
            let t_b = arrival_time(energy, params.x0, &params.model)?;
            samples.push(RidgeSample {
                energy,
                w,
                t_b,
                transit_time: params.transit_time(energy),
                outside_regime: params.outside_quasi_static_regime(energy, w),
            });
        }
        Ok(Self { params, samples })
    }
}

/// Period of the oscillation for angular frequency `w`.
pub fn period(w: f64) -> f64 {
    2.0 * PI / w.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> PhysicalModel {
        PhysicalModel::default()
    }

    fn params(e_r0: f64) -> RidgeParams {
        RidgeParams {
            e_r0,
            barrier_height: 0.4,
            x0: 175.0,
            model: model(),
            osc_sign: 1.0,
            structure_length: 7.2,
        }
    }

    #[test]
    fn transmission_limits() {
        let spec = PotentialSpec::reference();
        assert!(transfer_matrix_transmission(&spec, 0.0, 1e-7, &model()).unwrap() < 1e-3);
        assert!(transfer_matrix_transmission(&spec, 0.0, 4.0, &model()).unwrap() > 0.9);
        assert!(transfer_matrix_transmission(&spec, 0.0, 0.0, &model()).is_err());
    }

    #[test]
    fn free_space_transmits_everything() {
        let t = transfer_matrix_transmission(&PotentialSpec::free(), 0.0, 0.05, &model()).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_on_barrier_top_is_nudged() {
        let t =
            transfer_matrix_transmission(&PotentialSpec::reference(), 0.0, 0.4, &model()).unwrap();
        assert!(t.is_finite() && (0.0..=1.0).contains(&t));
    }

    #[test]
    fn single_rectangular_barrier_matches_closed_form() {
        // T = 1 / (1 + V² sinh²(κa) / (4E(V-E)))
        let spec = PotentialSpec {
            well_width: 0.0,
            ..PotentialSpec::reference()
        };
        let m = model();
        for e in [0.05, 0.1, 0.3] {
            let kappa = libm::sqrt(2.0 * m.effective_mass * (0.4 - e)) / m.hbar;
            let s = libm::sinh(kappa * 2.0);
            let expected = 1.0 / (1.0 + 0.16 * s * s / (4.0 * e * (0.4 - e)));
            let got = transfer_matrix_transmission(&spec, 0.0, e, &m).unwrap();
            assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
        }
    }

    #[test]
    fn reference_geometry_first_resonance() {
        let (lo, hi, step) = DEFAULT_SCAN;
        let res = find_resonances(
            &PotentialSpec::reference(),
            0.0,
            &model(),
            lo,
            hi,
            step,
            RESONANCE_TOLERANCE,
        )
        .unwrap();
        let below: Vec<_> = res.iter().filter(|r| r.energy < 0.2).collect();
        assert_eq!(below.len(), 1);
        assert!((below[0].energy - 0.073).abs() / 0.073 < 0.15);
        assert!(below[0].peak_transmission > 0.999);
    }

    #[test]
    fn merged_barrier_has_no_resonance() {
        let spec = PotentialSpec {
            well_width: 0.0,
            ..PotentialSpec::reference()
        };
        assert!(matches!(
            find_resonances(&spec, 0.0, &model(), 0.005, 0.395, 1e-4, 1e-6),
            Err(Error::NoResonanceFound { .. })
        ));
    }

    #[test]
    fn wider_well_lowers_the_resonance() {
        let m = model();
        let narrow = find_resonances(
            &PotentialSpec::reference(),
            0.0,
            &m,
            0.005,
            0.25,
            1e-4,
            1e-6,
        )
        .unwrap()[0]
            .energy;
        let wide_spec = PotentialSpec {
            well_width: 10.4,
            ..PotentialSpec::reference()
        };
        let wide = find_resonances(&wide_spec, 0.0, &m, 0.005, 0.25, 1e-4, 1e-6).unwrap()[0].energy;
        assert!(wide < narrow);
    }

    #[test]
    fn arrival_time_scaling() {
        let m = model();
        let t = arrival_time(0.073, 175.0, &m).unwrap();
        assert!((arrival_time(4.0 * 0.073, 175.0, &m).unwrap() - t / 2.0).abs() < 1e-9);
        assert!((arrival_time(0.073, 350.0, &m).unwrap() - 2.0 * t).abs() < 1e-9);
        assert!(arrival_time(0.0, 175.0, &m).is_err());
        assert!(arrival_time(0.073, 0.0, &m).is_err());
    }

    #[test]
    fn ridge_special_points() {
        let p = params(0.073);
        assert_eq!(ridge_frequency(0.073, &p).unwrap(), 0.0);
        let e = 0.073 + 0.2;
        let expected =
            libm::sqrt(2.0 * p.model.effective_mass * e) / (175.0 * p.model.effective_mass) * PI
                / 2.0;
        assert!((ridge_frequency(e, &p).unwrap() - expected).abs() < 1e-15);
        assert!(matches!(
            ridge_frequency(0.073 + 0.21, &p),
            Err(Error::OutOfArcsinDomain { .. })
        ));
        let neg = RidgeParams {
            osc_sign: -1.0,
            ..p
        };
        assert_eq!(
            ridge_frequency(0.09, &neg).unwrap(),
            -ridge_frequency(0.09, &p).unwrap()
        );
    }

    #[test]
    fn shifted_resonance_special_points() {
        let p = params(0.073);
        assert_eq!(shifted_resonance(280.0, &p, 0.0), 0.073);
        let w = 1e-3;
        let t_b = PI / 2.0 / w;
        assert!((shifted_resonance(t_b, &p, w) - (0.073 + 0.2)).abs() < 1e-15);
    }

    #[test]
    fn ridge_energy_inverts_ridge_frequency() {
        let p = params(0.0837);
        for e in [0.06, 0.07, 0.0837, 0.1, 0.12, 0.2] {
            let w = ridge_frequency(e, &p).unwrap();
            let back = ridge_energy(w, &p).unwrap();
            assert!((back - e).abs() < 1e-9, "{e} -> {w} -> {back}");
        }
        assert!(ridge_energy(-1e-3, &p).is_none());
    }

    #[test]
    fn tabulate_skips_out_of_domain_energies() {
        let pred = RidgePrediction::tabulate(params(0.073), &[0.05, 0.073, 0.3]).unwrap();
        assert_eq!(pred.samples.len(), 2);
        assert_eq!(pred.samples[1].w, 0.0);
        assert!(pred
            .samples
            .iter()
            .all(|s| s.t_b > 0.0 && !s.outside_regime));
    }
}
