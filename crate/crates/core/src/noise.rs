//! Transmitted-count statistics and zero-frequency shot noise for one
//! injection attempt of two electrons from opposite sides.
//!
//! `N` counts electrons moving left to right: `+1`, `0` or `-1` when at most
//! two particles take part. Noise is reported in units of `4q²/h`; in those
//! units the noise power equals `Var(N)` per attempt.

use crate::error::{Error, Result};
use crate::units::{ELEMENTARY_CHARGE_SI, PLANCK_SI};

fn probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}

/// Occupations of the two injection states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationPair {
    pub f_a: f64,
    pub f_b: f64,
}

impl OccupationPair {
    pub fn new(f_a: f64, f_b: f64) -> Result<Self> {
        Ok(Self {
            f_a: probability("f_a", f_a)?,
            f_b: probability("f_b", f_b)?,
        })
    }

    /// Both states always filled.
    pub fn full() -> Self {
        Self { f_a: 1.0, f_b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountDistribution {
    pub p_minus: f64,
    pub p_zero: f64,
    pub p_plus: f64,
}

impl CountDistribution {
    pub fn mean(&self) -> f64 {
        self.p_plus - self.p_minus
    }

    pub fn second_moment(&self) -> f64 {
        self.p_plus + self.p_minus
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.second_moment() - m * m
    }
}

/// P(N) from the four injection cases:
///
/// | injected | prob | N = +1 | N = 0 | N = -1 |
/// |---|---|---|---|---|
/// | a and b | `f_a f_b` | `P_RR` | `P_LR` | `P_LL` |
/// | a only | `f_a (1 - f_b)` | `T` | `R` | |
/// | b only | `(1 - f_a) f_b` | | `R` | `T` |
/// | none | `(1 - f_a)(1 - f_b)` | | 1 | |
///
/// with `P_LR = 1 - P_LL - P_RR`.
pub fn count_distribution(
    occ: OccupationPair,
    t: f64,
    r: f64,
    p_ll: f64,
    p_rr: f64,
) -> Result<CountDistribution> {
    let occ = OccupationPair::new(occ.f_a, occ.f_b)?;
    let t = probability("T", t)?;
    let r = probability("R", r)?;
    let p_ll = probability("P_LL", p_ll)?;
    let p_rr = probability("P_RR", p_rr)?;
    if (t + r - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidProbability {
            name: "T + R",
            value: t + r,
        });
    }
    let p_lr = 1.0 - p_ll - p_rr;
    if p_lr < -1e-12 {
        return Err(Error::InvalidProbability {
            name: "P_LR",
            value: p_lr,
        });
    }
    let OccupationPair { f_a, f_b } = occ;
    let both = f_a * f_b;
    let only_a = f_a * (1.0 - f_b);
    let only_b = (1.0 - f_a) * f_b;
    let neither = (1.0 - f_a) * (1.0 - f_b);
    Ok(CountDistribution {
        p_plus: both * p_rr + only_a * t,
        p_minus: both * p_ll + only_b * t,
        p_zero: both * p_lr + (only_a + only_b) * r + neither,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRecord {
    /// `T[f_a(1-f_a) + f_b(1-f_b)] + T(1-T)(f_a-f_b)² + 2 P_LL f_a f_b`.
    pub bracket: f64,
    /// Noise power in units of `4q²/h`.
    pub s: f64,
    pub f_a: f64,
    pub f_b: f64,
    pub t: f64,
    pub p_ll: f64,
    /// The bracket assumes a mirror-symmetric system with `P_RR = P_LL`.
    pub assumes_symmetric: bool,
}

impl NoiseRecord {
    /// Noise power in A²/Hz given the attempt normalization implied by the
    /// `4q²/h` unit (i.e. multiplies by `4e²/h`, in siemens).
    pub fn s_si(&self) -> f64 {
        self.s * 4.0 * ELEMENTARY_CHARGE_SI * ELEMENTARY_CHARGE_SI / PLANCK_SI
    }
}

/// Shot noise of the two-injection process with same-side probability `P_LL`.
pub fn noise(occ: OccupationPair, t: f64, p_ll: f64) -> Result<NoiseRecord> {
    let OccupationPair { f_a, f_b } = OccupationPair::new(occ.f_a, occ.f_b)?;
    let t = probability("T", t)?;
    if !(p_ll.is_finite() && (-1e-12..=1.0).contains(&p_ll)) {
        return Err(Error::InvalidProbability {
            name: "P_LL",
            value: p_ll,
        });
    }
    let diff = f_a - f_b;
    let bracket = t * (f_a * (1.0 - f_a) + f_b * (1.0 - f_b))
        + t * (1.0 - t) * diff * diff
        + 2.0 * p_ll * f_a * f_b;
    Ok(NoiseRecord {
        bracket,
        s: bracket,
        f_a,
        f_b,
        t,
        p_ll,
        assumes_symmetric: true,
    })
}

/// `|Var(N) - bracket|` for the symmetric case `P_RR = P_LL`: the count
/// table and the closed-form noise must agree.
pub fn variance_identity_check(occ: OccupationPair, t: f64, p_ll: f64, p_rr: f64) -> Result<f64> {
    let dist = count_distribution(occ, t, 1.0 - t, p_ll, p_rr)?;
    let rec = noise(occ, t, p_ll)?;
    Ok((dist.variance() - rec.bracket).abs())
}
