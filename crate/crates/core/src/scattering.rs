//! Reflected/transmitted decomposition of settled orbitals, the same-side
//! overlap integrals and the two-particle quadrant probabilities.
//!
//! Electron `a` is injected from the left, electron `b` from the right. Once
//! the barrier region is empty, the part of each orbital on its injection side
//! is the reflected component and the part on the far side the transmitted
//! one. Left and right are split at `x = 0`; a node sitting exactly at `x = 0`
//! contributes half of its cell to each side.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::packet::{Direction, WaveField};
use crate::potential::PotentialSpec;
use crate::propagator::PropagationConfig;
use crate::C64;

/// Tolerance below zero tolerated for a same-side probability before it is
/// treated as an error rather than round-off.
pub const NEGATIVE_PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Weight of node position `x` on `side`.
#[inline]
fn side_weight(x: f64, side: Side) -> f64 {
    if x == 0.0 {
        0.5
    } else if (x < 0.0) == (side == Side::Left) {
        1.0
    } else {
        0.0
    }
}

/// Barrier region and the probability regarded as negligible inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierWindow {
    pub lo: f64,
    pub hi: f64,
    pub threshold: f64,
}

impl BarrierWindow {
    pub fn new(spec: &PotentialSpec, cfg: &PropagationConfig) -> Self {
        let (lo, hi) = cfg.barrier_region(spec);
        Self {
            lo,
            hi,
            threshold: cfg.settle_threshold,
        }
    }

    pub fn check(&self, field: &WaveField) -> Result<()> {
        let p = field.probability_between(self.lo, self.hi);
        if p > self.threshold {
            Err(Error::NotSettledInput {
                barrier_probability: p,
            })
        } else {
            Ok(())
        }
    }
}

fn side_mass(field: &WaveField, side: Side) -> f64 {
    let g = &field.grid;
    field
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| side_weight(g.x(i), side) * v.norm_sqr())
        .sum::<f64>()
        * g.dx
}

/// `(T, R)` of a settled orbital injected in `direction`.
pub fn coefficients(
    field: &WaveField,
    direction: Direction,
    window: &BarrierWindow,
) -> Result<(f64, f64)> {
    window.check(field)?;
    let (near, far) = match direction {
        Direction::LeftToRight => (Side::Left, Side::Right),
        Direction::RightToLeft => (Side::Right, Side::Left),
    };
    Ok((side_mass(field, far), side_mass(field, near)))
}

/// `Σ φ_a(x) φ_b*(x) dx` over one side of `x = 0`.
pub fn overlap(field_a: &WaveField, field_b: &WaveField, side: Side) -> Result<C64> {
    if !field_a.grid.same_as(&field_b.grid) {
        return Err(Error::MismatchedGrid);
    }
    if field_a.time != field_b.time {
        return Err(Error::MismatchedTime {
            a: field_a.time,
            b: field_b.time,
        });
    }
    let g = &field_a.grid;
    let sum: C64 = field_a
        .values
        .iter()
        .zip(&field_b.values)
        .enumerate()
        .map(|(i, (a, b))| a * b.conj() * side_weight(g.x(i), side))
        .sum();
    Ok(sum * g.dx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantProbabilities {
    pub p_ll: f64,
    pub p_rr: f64,
    pub p_lr: f64,
}

impl QuadrantProbabilities {
    pub fn total(&self) -> f64 {
        self.p_ll + self.p_rr + self.p_lr
    }
}

/// Quadrant probabilities from single-particle coefficients and the two
/// side-resolved overlaps:
///
/// * both left: `R_a T_b - |I_left|²`
/// * both right: `T_a R_b - |I_right|²`
/// * one each side: `R_a R_b + T_a T_b + |I_left|² + |I_right|²`
pub fn quadrant_probabilities(
    t_a: f64,
    r_a: f64,
    t_b: f64,
    r_b: f64,
    i_left: C64,
    i_right: C64,
) -> Result<QuadrantProbabilities> {
    for (name, value) in [("T_a", t_a), ("R_a", r_a), ("T_b", t_b), ("R_b", r_b)] {
        if !(-1e-12..=1.0 + 1e-8).contains(&value) {
            return Err(Error::InvalidProbability { name, value });
        }
    }
    let il = i_left.norm_sqr();
    let ir = i_right.norm_sqr();
    let p_ll = r_a * t_b - il;
    let p_rr = t_a * r_b - ir;
    if p_ll < -NEGATIVE_PROBABILITY_TOLERANCE {
        return Err(Error::NegativeProbability {
            name: "P_LL",
            value: p_ll,
        });
    }
    if p_rr < -NEGATIVE_PROBABILITY_TOLERANCE {
        return Err(Error::NegativeProbability {
            name: "P_RR",
            value: p_rr,
        });
    }
    let p_lr = r_a * r_b + t_a * t_b + il + ir;
    Ok(QuadrantProbabilities { p_ll, p_rr, p_lr })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringRecord {
    pub t_a: f64,
    pub r_a: f64,
    pub t_b: f64,
    pub r_b: f64,
    pub i_left: C64,
    pub i_right: C64,
    pub p_ll: f64,
    pub p_rr: f64,
    pub p_lr: f64,
    pub t1: f64,
}

impl ScatteringRecord {
    /// Full record for orbital `a` (injected from the left) and `b` (from the
    /// right), both settled at the same time.
    pub fn from_fields(
        field_a: &WaveField,
        field_b: &WaveField,
        window: &BarrierWindow,
    ) -> Result<Self> {
        let (t_a, r_a) = coefficients(field_a, Direction::LeftToRight, window)?;
        let (t_b, r_b) = coefficients(field_b, Direction::RightToLeft, window)?;
        let i_left = overlap(field_a, field_b, Side::Left)?;
        let i_right = overlap(field_a, field_b, Side::Right)?;
        let q = quadrant_probabilities(t_a, r_a, t_b, r_b, i_left, i_right)?;
        Ok(Self {
            t_a,
            r_a,
            t_b,
            r_b,
            i_left,
            i_right,
            p_ll: q.p_ll,
            p_rr: q.p_rr,
            p_lr: q.p_lr,
            t1: field_a.time,
        })
    }

    pub fn quadrants(&self) -> QuadrantProbabilities {
        QuadrantProbabilities {
            p_ll: self.p_ll,
            p_rr: self.p_rr,
            p_lr: self.p_lr,
        }
    }

    /// `|I_left|² / (R_a T_b)`: 1 in the extended-state limit, 0 when the
    /// reflected and transmitted packets are orthogonal.
    pub fn left_overlap_ratio(&self) -> f64 {
        self.i_left.norm_sqr() / (self.r_a * self.t_b)
    }
}

/// Brute-force quadrant masses of `|Φ|²` for
/// `Φ(x1, x2) = [φ_a(x1) φ_b(x2) - φ_a(x2) φ_b(x1)] / √2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantMasses {
    pub p_ll: f64,
    pub p_rr: f64,
    pub p_lr: f64,
    /// Subsampling stride actually used.
    pub stride: usize,
}

/// Default subsampling stride of the two-particle grid.
pub const DEFAULT_ORACLE_STRIDE: usize = 4;
/// Cap on the number of two-particle cells visited; larger requests coarsen
/// the stride.
pub const ORACLE_MAX_CELLS: usize = 64_000_000;

/// Integrates `|Φ|²` over the four quadrants of the `(x1, x2)` plane on the
/// 1D grid subsampled by `stride`. If the plane would exceed
/// [`ORACLE_MAX_CELLS`] the stride is increased; the stride used is reported.
pub fn two_particle_quadrant_oracle(
    field_a: &WaveField,
    field_b: &WaveField,
    stride: usize,
) -> Result<QuadrantMasses> {
    if !field_a.grid.same_as(&field_b.grid) {
        return Err(Error::MismatchedGrid);
    }
    if field_a.time != field_b.time {
        return Err(Error::MismatchedTime {
            a: field_a.time,
            b: field_b.time,
        });
    }
    let g = &field_a.grid;
    let mut stride = stride.max(1);
    while (g.n_points / stride + 1).pow(2) > ORACLE_MAX_CELLS {
        stride += 1;
    }
    let idx: Vec<usize> = (0..g.n_points).step_by(stride).collect();
    let a: Vec<C64> = idx.iter().map(|&i| field_a.values[i]).collect();
    let b: Vec<C64> = idx.iter().map(|&i| field_b.values[i]).collect();
    let wl: Vec<f64> = idx
        .iter()
        .map(|&i| side_weight(g.x(i), Side::Left))
        .collect();
    let wr: Vec<f64> = idx
        .iter()
        .map(|&i| side_weight(g.x(i), Side::Right))
        .collect();
    let h = g.dx * stride as f64;

    let (mut ll, mut rr, mut lr) = (0.0, 0.0, 0.0);
    for i in 0..a.len() {
        if a[i].norm_sqr() == 0.0 && b[i].norm_sqr() == 0.0 {
            continue;
        }
        let (mut row_l, mut row_r) = (0.0, 0.0);
        for j in 0..a.len() {
            let phi = a[i] * b[j] - a[j] * b[i];
            let d = phi.norm_sqr();
            row_l += wl[j] * d;
            row_r += wr[j] * d;
        }
        ll += wl[i] * row_l;
        rr += wr[i] * row_r;
        lr += wl[i] * row_r + wr[i] * row_l;
    }
    let scale = 0.5 * h * h;
    Ok(QuadrantMasses {
        p_ll: ll * scale,
        p_rr: rr * scale,
        p_lr: lr * scale,
        stride,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn field_from(grid: Grid1D, f: impl Fn(f64) -> C64) -> WaveField {
        WaveField {
            grid,
            values: grid.nodes().map(f).collect(),
            time: 0.0,
        }
    }

    fn bump(center: f64, width: f64, k: f64) -> impl Fn(f64) -> C64 {
        move |x: f64| {
            let u = (x - center) / width;
            C64::from_polar((-u * u).exp(), k * x)
        }
    }

    #[test]
    fn symmetric_limit_gives_no_same_side_events() {
        let (r, t) = (0.3, 0.7);
        let i = C64::from_polar((r * t as f64).sqrt(), 0.4);
        let q = quadrant_probabilities(t, r, t, r, i, i).unwrap();
        assert!(q.p_ll.abs() < 1e-15 && q.p_rr.abs() < 1e-15);
        assert!((q.p_lr - 1.0).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_limit_is_distinguishable_partition() {
        let z = C64::new(0.0, 0.0);
        let q = quadrant_probabilities(0.6, 0.4, 0.2, 0.8, z, z).unwrap();
        assert!((q.p_ll - 0.4 * 0.2).abs() < 1e-15);
        assert!((q.p_rr - 0.6 * 0.8).abs() < 1e-15);
        assert!((q.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_exceeding_cauchy_schwarz_is_rejected() {
        let big = C64::new(0.9, 0.0);
        let err = quadrant_probabilities(0.5, 0.5, 0.5, 0.5, big, C64::new(0.0, 0.0));
        assert!(matches!(
            err,
            Err(Error::NegativeProbability { name: "P_LL", .. })
        ));
    }

    #[test]
    fn identical_left_parts_saturate_cauchy_schwarz() {
        let g = Grid1D::new(-50.0, 50.0, 2001).unwrap();
        let f = field_from(g, bump(-20.0, 4.0, 0.7));
        let p = side_mass(&f, Side::Left);
        let i = overlap(&f, &f, Side::Left).unwrap();
        assert!((i.norm_sqr() - p * p).abs() < 1e-12 * p * p);
    }

    #[test]
    fn disjoint_supports_do_not_overlap() {
        let g = Grid1D::new(-50.0, 50.0, 2001).unwrap();
        let a = field_from(g, |x| {
            if x < -30.0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let b = field_from(g, |x| {
            if (-20.0..0.0).contains(&x) {
                C64::new(0.0, 1.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        assert_eq!(overlap(&a, &b, Side::Left).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn origin_node_is_split_between_sides() {
        let g = Grid1D::new(-1.0, 1.0, 3).unwrap();
        let f = WaveField {
            grid: g,
            values: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            time: 0.0,
        };
        assert_eq!(side_mass(&f, Side::Left), 0.5);
        assert_eq!(side_mass(&f, Side::Right), 0.5);
    }

    #[test]
    fn overlap_rejects_mismatched_inputs() {
        let g = Grid1D::new(-10.0, 10.0, 101).unwrap();
        let h = Grid1D::new(-10.0, 10.0, 201).unwrap();
        let a = field_from(g, bump(0.0, 1.0, 0.0));
        let b = field_from(h, bump(0.0, 1.0, 0.0));
        assert_eq!(overlap(&a, &b, Side::Left), Err(Error::MismatchedGrid));
        let mut c = a.clone();
        c.time = 1.0;
        assert!(matches!(
            overlap(&a, &c, Side::Right),
            Err(Error::MismatchedTime { .. })
        ));
    }

    #[test]
    fn oracle_identical_orbitals_vanish() {
        let g = Grid1D::new(-50.0, 50.0, 401).unwrap();
        let f = field_from(g, bump(-10.0, 5.0, 0.3));
        let m = two_particle_quadrant_oracle(&f, &f, 1).unwrap();
        assert_eq!((m.p_ll, m.p_rr, m.p_lr), (0.0, 0.0, 0.0));
    }

    #[test]
    fn oracle_disjoint_sides_are_one_each_side() {
        let g = Grid1D::new(-50.0, 50.0, 801).unwrap();
        let mut a = field_from(g, bump(-20.0, 3.0, 0.5));
        let mut b = field_from(g, bump(20.0, 3.0, -0.5));
        for f in [&mut a, &mut b] {
            let n = f.norm_sqr().sqrt();
            f.values.iter_mut().for_each(|v| *v /= n);
        }
        let m = two_particle_quadrant_oracle(&a, &b, 1).unwrap();
        assert!((m.p_lr - 1.0).abs() < 1e-12);
        assert!(m.p_ll.abs() < 1e-12 && m.p_rr.abs() < 1e-12);
    }

    #[test]
    fn oracle_matches_algebra_on_split_orbitals() {
        // a and b each have a piece on both sides with different shapes
        let g = Grid1D::new(-60.0, 60.0, 2401).unwrap();
        let a = field_from(g, |x| {
            bump(-25.0, 4.0, -0.6)(x) * 0.6 + bump(22.0, 6.0, 0.6)(x) * 0.8
        });
        let b = field_from(g, |x| {
            bump(-24.0, 5.0, -0.6)(x) * 0.7 + bump(26.0, 4.0, 0.6)(x) * 0.5
        });
        let (ra, ta) = (side_mass(&a, Side::Left), side_mass(&a, Side::Right));
        let (rb, tb) = (side_mass(&b, Side::Right), side_mass(&b, Side::Left));
        let il = overlap(&a, &b, Side::Left).unwrap();
        let ir = overlap(&a, &b, Side::Right).unwrap();
        let m = two_particle_quadrant_oracle(&a, &b, 1).unwrap();
        assert!((m.p_ll - (ra * tb - il.norm_sqr())).abs() < 1e-12);
        assert!((m.p_rr - (ta * rb - ir.norm_sqr())).abs() < 1e-12);
        // without orthogonality the cross term is -2 Re(I_left I_right*)
        let lr = ra * rb + ta * tb - 2.0 * (il * ir.conj()).re;
        assert!((m.p_lr - lr).abs() < 1e-12);
    }
}
