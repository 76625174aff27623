mod common;

use common::*;
use num_complex::Complex64 as C64;
use tunnelnoise_core::{
    init_gaussian, propagate_until_settled, step, CrankNicolson, Direction, Error, Grid1D,
    PotentialSpec, PropagationConfig, WaveField, WavePacketSpec,
};

fn advance(field: &WaveField, spec: &PotentialSpec, steps: usize, dt: f64) -> WaveField {
    let mut stepper = CrankNicolson::new(&field.grid, spec, &model(), dt, field.time).unwrap();
    let mut out = field.clone();
    for _ in 0..steps {
        stepper.advance(&mut [&mut out.values]).unwrap();
    }
    out.time = stepper.time();
    out
}

#[test]
fn free_packet_centroid_follows_group_velocity() {
    let grid = reference_grid();
    let spec = packet(0.073);
    let f0 = gaussian(&spec, &grid);
    let t = 50.0;
    let f1 = advance(&f0, &PotentialSpec::free(), 500, 0.1);
    let v = model().velocity(0.073);
    let expected = -175.0 + v * t;
    assert!(
        (f1.mean_position() - expected).abs() < 0.1 * grid.dx,
        "{} vs {}",
        f1.mean_position(),
        expected
    );
}

#[test]
fn free_packet_width_follows_dispersion_law() {
    let grid = reference_grid();
    let spec = packet(0.073);
    let f0 = gaussian(&spec, &grid);
    let t = 400.0;
    let f1 = advance(&f0, &PotentialSpec::free(), 4000, 0.1);
    // |φ|² starts with standard deviation s0 = σ/2 and spreads as
    // s(t) = s0 sqrt(1 + (ħ t / (2 m s0²))²)
    let m = model();
    let s0 = spec.sigma / 2.0;
    let tau = m.hbar * t / (2.0 * m.effective_mass * s0 * s0);
    let expected = s0 * (1.0 + tau * tau).sqrt();
    let got = f1.position_std();
    assert!(
        (got - expected).abs() / expected < 1e-3,
        "{got} vs {expected}"
    );
}

#[test]
fn box_eigenstate_only_acquires_a_phase() {
    let grid = Grid1D::with_spacing(-50.0, 50.0, 0.05).unwrap();
    let m = model();
    let interior = grid.n_points - 2;
    let mode = 3.0;
    let theta = mode * std::f64::consts::PI / (interior + 1) as f64;
    // eigenpair of the three-point Laplacian with Dirichlet walls
    let a = m.kinetic_prefactor() / (grid.dx * grid.dx);
    let energy = 2.0 * a * (1.0 - theta.cos());
    let norm = (2.0 / ((interior + 1) as f64 * grid.dx)).sqrt();
    let values: Vec<C64> = (0..grid.n_points)
        .map(|i| C64::new(norm * (theta * i as f64).sin(), 0.0))
        .collect();
    let field = WaveField {
        grid,
        values,
        time: 0.0,
    };
    // residual of H v = E v on the grid, checked independently of the stepper
    for i in 1..grid.n_points - 1 {
        let hv = a * (2.0 * field.values[i] - field.values[i - 1] - field.values[i + 1]);
        assert!((hv - field.values[i] * energy).norm() < 1e-12);
    }
    let dt = 0.1;
    let next = step(&field, &PotentialSpec::free(), &m, dt).unwrap();
    let phase = C64::from_polar(1.0, -energy * dt / m.hbar);
    for (u, v) in next.values.iter().zip(&field.values) {
        assert!((u - v * phase).norm() < 1e-8);
    }
}

#[test]
fn time_reversal_recovers_initial_field() {
    let grid = Grid1D::with_spacing(-300.0, 300.0, 0.05).unwrap();
    let spec = WavePacketSpec {
        x0: -60.0,
        sigma: 15.0,
        central_energy: 0.08,
        direction: Direction::LeftToRight,
    };
    let f0 = init_gaussian(&spec, &grid, &model()).unwrap();
    let pot = PotentialSpec::reference();
    let forward = advance(&f0, &pot, 1000, 0.1);
    let back = advance(&forward.conj(), &pot, 1000, 0.1).conj();
    let worst = back
        .values
        .iter()
        .zip(&f0.values)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn single_step_preserves_norm() {
    let grid = reference_grid();
    let pot = PotentialSpec::reference().with_oscillation(5e-4);
    let mut stepper = CrankNicolson::new(&grid, &pot, &model(), 0.1, 0.0).unwrap();
    let mut f = gaussian(&packet(0.09), &grid);
    let mut prev = f.norm_sqr();
    for _ in 0..3000 {
        stepper.advance(&mut [&mut f.values]).unwrap();
        let now = f.norm_sqr();
        assert!((now - prev).abs() <= 1e-12);
        prev = now;
    }
}

#[test]
fn impossible_threshold_settles_after_one_window() {
    let grid = reference_grid();
    let cfg = PropagationConfig {
        settle_threshold: 2.0,
        ..PropagationConfig::default()
    };
    let res = propagate_until_settled(
        gaussian(&packet(0.073), &grid),
        &PotentialSpec::reference(),
        &model(),
        &cfg,
    )
    .unwrap();
    assert!((res.t1 - cfg.settle_window).abs() < 1e-9);
}

#[test]
fn free_packet_settles_after_clearing_the_window() {
    let grid = reference_grid();
    let cfg = PropagationConfig::default();
    let spec = packet(0.073);
    let pot = PotentialSpec::free();
    let res = propagate_until_settled(gaussian(&spec, &grid), &pot, &model(), &cfg).unwrap();
    // tail clears the window once about five standard deviations have passed it
    let v = model().velocity(0.073);
    let reach = 175.0 + pot.structure_half_width() + cfg.barrier_margin + 5.0 * spec.sigma / 2.0;
    let estimate = reach / v + cfg.settle_window;
    assert!(
        (res.t1 - estimate).abs() / estimate < 0.15,
        "t1 = {} vs {estimate}",
        res.t1
    );
    assert!(res.norm_drift <= 1e-8);
}

#[test]
fn reference_run_rises_then_settles() {
    let grid = reference_grid();
    let cfg = PropagationConfig::default();
    let res = propagate_until_settled(
        gaussian(&packet(0.073), &grid),
        &PotentialSpec::reference(),
        &model(),
        &cfg,
    )
    .unwrap();
    let peak = res
        .barrier_probability_history
        .iter()
        .map(|x| x.1)
        .fold(0.0, f64::max);
    assert!(peak > 1e-3);
    assert!(res.barrier_probability_history.last().unwrap().1 < cfg.settle_threshold);
    assert!(res.t1 > 283.0 && res.t1 < 1500.0, "t1 = {}", res.t1);
    assert!(res.norm_drift <= 1e-8);
}

#[test]
fn runs_out_of_time() {
    let grid = reference_grid();
    let cfg = PropagationConfig {
        max_time: 50.0,
        ..PropagationConfig::default()
    };
    let err = propagate_until_settled(
        gaussian(&packet(0.073), &grid),
        &PotentialSpec::reference(),
        &model(),
        &cfg,
    );
    assert!(matches!(err, Err(Error::NotSettled { .. })));
}

#[test]
fn packet_hitting_the_wall_is_reported() {
    let grid = Grid1D::with_spacing(-200.0, 200.0, 0.05).unwrap();
    let spec = WavePacketSpec {
        x0: -100.0,
        sigma: 20.0,
        central_energy: 0.073,
        direction: Direction::RightToLeft,
    };
    let f = init_gaussian(&spec, &grid, &model()).unwrap();
    let err = propagate_until_settled(
        f,
        &PotentialSpec::free(),
        &model(),
        &PropagationConfig::default(),
    );
    assert!(
        matches!(err, Err(Error::BoundaryContamination { .. })),
        "{err:?}"
    );
}

#[test]
fn rejects_invalid_config() {
    let grid = reference_grid();
    let f = gaussian(&packet(0.073), &grid);
    let pot = PotentialSpec::reference();
    for cfg in [
        PropagationConfig {
            dt: 0.0,
            ..Default::default()
        },
        PropagationConfig {
            settle_window: 0.5,
            ..Default::default()
        },
        PropagationConfig {
            settle_threshold: 0.0,
            ..Default::default()
        },
    ] {
        assert!(matches!(
            propagate_until_settled(f.clone(), &pot, &model(), &cfg),
            Err(Error::InvalidParameter { .. })
        ));
    }
}

#[test]
fn propagation_is_bitwise_deterministic() {
    let grid = Grid1D::with_spacing(-500.0, 500.0, 0.05).unwrap();
    let spec = WavePacketSpec {
        x0: -60.0,
        sigma: 15.0,
        central_energy: 0.08,
        direction: Direction::LeftToRight,
    };
    let pot = PotentialSpec::reference().with_oscillation(4e-4);
    let run = || {
        let f = init_gaussian(&spec, &grid, &model()).unwrap();
        propagate_until_settled(f, &pot, &model(), &PropagationConfig::default()).unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.t1, b.t1);
    assert!(a
        .final_field
        .values
        .iter()
        .zip(&b.final_field.values)
        .all(|(u, v)| u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()));
}
