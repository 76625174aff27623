mod common;

use common::*;
use tunnelnoise_core::{
    coefficients, propagate_ensemble, propagate_until_settled, transfer_matrix_transmission,
    two_particle_quadrant_oracle, BarrierWindow, Direction, Grid1D, PotentialSpec,
    PropagationConfig, ScatteringRecord, WavePacketSpec,
};

fn settled_pair(
    spec: &PotentialSpec,
    packet_a: &WavePacketSpec,
    grid: &Grid1D,
) -> ScatteringRecord {
    settled_pair_with(spec, packet_a, grid, &PropagationConfig::default())
}

fn settled_pair_with(
    spec: &PotentialSpec,
    packet_a: &WavePacketSpec,
    grid: &Grid1D,
    cfg: &PropagationConfig,
) -> ScatteringRecord {
    let cfg = *cfg;
    let a = gaussian(packet_a, grid);
    let b = gaussian(&packet_a.mirrored(), grid);
    let (res, _) = propagate_ensemble(vec![a, b], spec, &model(), &cfg, None).unwrap();
    ScatteringRecord::from_fields(
        &res[0].final_field,
        &res[1].final_field,
        &BarrierWindow::new(spec, &cfg),
    )
    .unwrap()
}

fn single_transmission(spec: &PotentialSpec, packet: &WavePacketSpec, grid: &Grid1D) -> f64 {
    let cfg = PropagationConfig::default();
    let res = propagate_until_settled(gaussian(packet, grid), spec, &model(), &cfg).unwrap();
    coefficients(
        &res.final_field,
        Direction::LeftToRight,
        &BarrierWindow::new(spec, &cfg),
    )
    .unwrap()
    .0
}

#[test]
fn free_space_transmits_everything() {
    // the settling threshold bounds the tail still short of x = 0
    let cfg = PropagationConfig {
        settle_threshold: 1e-12,
        ..PropagationConfig::default()
    };
    let rec = settled_pair_with(
        &PotentialSpec::free(),
        &packet(0.073),
        &reference_grid(),
        &cfg,
    );
    assert!((rec.t_a - 1.0).abs() < 1e-8 && rec.r_a < 1e-8);
    assert!(rec.p_ll.abs() < 1e-8);
}

#[test]
fn opaque_wall_reflects_everything() {
    let grid = Grid1D::with_spacing(-400.0, 400.0, 0.05).unwrap();
    let spec = PotentialSpec {
        barrier_height: 100.0,
        osc_amplitude: 0.0,
        ..PotentialSpec::reference()
    };
    assert!(single_transmission(&spec, &packet(0.073), &grid) < 1e-6);
}

#[test]
fn packet_transmission_matches_transfer_matrix_average() {
    let grid = reference_grid();
    let spec = PotentialSpec::reference();
    for energy in [0.03, 0.073, 0.12, 0.15] {
        let p = packet(energy);
        let sim = single_transmission(&spec, &p, &grid);
        let oracle = packet_averaged_transmission(
            |e| transfer_matrix_transmission(&spec, 0.0, e, &model()).unwrap(),
            &p,
        );
        assert!(
            (sim - oracle).abs() < 1e-2,
            "E = {energy}: {sim} vs {oracle}"
        );
    }
}

#[test]
fn coefficients_reject_unsettled_field() {
    let grid = reference_grid();
    let spec = PotentialSpec::reference();
    let mut f = gaussian(&packet(0.073), &grid);
    // move the packet onto the structure
    let centred = WavePacketSpec {
        x0: 0.0,
        ..packet(0.073)
    };
    for (i, v) in f.values.iter_mut().enumerate() {
        *v = centred.amplitude(grid.x(i), &model());
    }
    let window = BarrierWindow::new(&spec, &PropagationConfig::default());
    assert!(coefficients(&f, Direction::LeftToRight, &window).is_err());
}

#[test]
fn mirror_configuration_is_symmetric() {
    let rec = settled_pair(
        &PotentialSpec::reference().with_oscillation(3e-4),
        &packet(0.09),
        &reference_grid(),
    );
    assert!((rec.t_a - rec.t_b).abs() < 1e-8);
    assert!((rec.r_a - rec.r_b).abs() < 1e-8);
    assert!((rec.i_left.norm() - rec.i_right.norm()).abs() < 1e-8);
    assert!((rec.p_ll - rec.p_rr).abs() < 1e-8);
    assert!(rec.i_left.norm_sqr() <= rec.r_a * rec.t_b + 1e-12);
    assert!((rec.p_ll + rec.p_rr + rec.p_lr - 1.0).abs() < 1e-10);
}

#[test]
fn oracle_agrees_with_algebra_on_reference_run() {
    let grid = reference_grid();
    let spec = PotentialSpec::reference();
    let cfg = PropagationConfig::default();
    let a = gaussian(&packet(0.08), &grid);
    let b = gaussian(&packet(0.08).mirrored(), &grid);
    let (res, _) = propagate_ensemble(vec![a, b], &spec, &model(), &cfg, None).unwrap();
    let (fa, fb) = (&res[0].final_field, &res[1].final_field);
    let rec = ScatteringRecord::from_fields(fa, fb, &BarrierWindow::new(&spec, &cfg)).unwrap();
    let brute = two_particle_quadrant_oracle(fa, fb, 4).unwrap();
    assert_eq!(brute.stride, 4);
    assert!((brute.p_ll - rec.p_ll).abs() < 1e-6);
    assert!((brute.p_rr - rec.p_rr).abs() < 1e-6);
    assert!((brute.p_lr - rec.p_lr).abs() < 1e-6);
}

#[test]
fn resonance_suppresses_the_same_side_overlap() {
    let rec = settled_pair(
        &PotentialSpec::reference(),
        &packet(0.0837),
        &reference_grid(),
    );
    assert!(
        rec.left_overlap_ratio() < 0.1,
        "{}",
        rec.left_overlap_ratio()
    );
}

#[test]
fn wider_packets_approach_the_extended_state_limit() {
    let grid = reference_grid();
    let spec = PotentialSpec::reference();
    let ratios: Vec<f64> = [30.0, 40.0, 50.0]
        .iter()
        .map(|&sigma| {
            settled_pair(
                &spec,
                &WavePacketSpec {
                    sigma,
                    ..packet(0.06)
                },
                &grid,
            )
            .left_overlap_ratio()
        })
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
}

#[test]
fn refinement_leaves_transmission_unchanged() {
    let spec = PotentialSpec::reference();
    let p = packet(0.073);
    let coarse = single_transmission(&spec, &p, &reference_grid());
    let fine_grid = Grid1D::with_spacing(-700.0, 700.0, 0.025).unwrap();
    let cfg = PropagationConfig {
        dt: 0.05,
        ..PropagationConfig::default()
    };
    let res = propagate_until_settled(gaussian(&p, &fine_grid), &spec, &model(), &cfg).unwrap();
    let fine = coefficients(
        &res.final_field,
        Direction::LeftToRight,
        &BarrierWindow::new(&spec, &cfg),
    )
    .unwrap()
    .0;
    assert!((coarse - fine).abs() < 1e-4, "{coarse} vs {fine}");
}
