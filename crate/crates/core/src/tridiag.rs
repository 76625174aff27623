//! Complex tridiagonal solvers.
//!
//! [`TwistedSystem`] handles the Crank–Nicolson matrix: complex symmetric,
//! with entries that change only on a short window of rows. Elimination runs
//! inward from both ends and meets at a twist index inside that window, so an
//! update only refactors the window.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::C64;

/// Thomas algorithm for a general tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. Solves in place.
pub fn solve_tridiagonal(
    lower: &[C64],
    diag: &[C64],
    upper: &[C64],
    rhs: &mut [C64],
) -> Result<()> {
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return Ok(());
    }
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut prev_c = C64::new(0.0, 0.0);
    for i in 0..n {
        let l = if i == 0 { C64::new(0.0, 0.0) } else { lower[i] };
        let pivot = diag[i] - l * prev_c;
        let inv = invert(pivot, i)?;
        c[i] = upper[i] * inv;
        rhs[i] = if i == 0 {
            rhs[i] * inv
        } else {
            (rhs[i] - l * rhs[i - 1]) * inv
        };
        prev_c = c[i];
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
    Ok(())
}

#[inline]
fn invert(pivot: C64, index: usize) -> Result<C64> {
    let inv = pivot.inv();
    if pivot.norm_sqr() == 0.0 || !inv.re.is_finite() || !inv.im.is_finite() {
        Err(Error::SolverFailure { index })
    } else {
        Ok(inv)
    }
}

/// Complex symmetric tridiagonal system factorized from both ends.
#[derive(Debug, Clone)]
pub struct TwistedSystem {
    diag: Vec<C64>,
    /// `link[i]` couples rows `i - 1` and `i`; the first and last entries are zero.
    link: Vec<C64>,
    twist: usize,
    /// Inverse pivots: left sweep for `i < twist`, right sweep for `i > twist`,
    /// the meeting pivot at `twist`.
    inv_pivot: Vec<C64>,
    /// Left sweep: `link[i+1] / pivot_i`; right sweep: `link[i] / pivot_i`.
    coupling: Vec<C64>,
}

impl TwistedSystem {
    /// `off[i]` couples rows `i` and `i + 1`. `twist_window` is where later
    /// updates are expected; the twist index is placed in its middle.
    pub fn new(off: &[C64], diag: Vec<C64>, twist_window: Range<usize>) -> Result<Self> {
        let n = diag.len();
        assert!(n > 0, "empty system");
        assert_eq!(off.len(), n - 1, "off-diagonal length");
        let twist = if twist_window.is_empty() {
            n / 2
        } else {
            ((twist_window.start + twist_window.end) / 2).min(n - 1)
        };
        let zero = C64::new(0.0, 0.0);
        let mut link = Vec::with_capacity(n + 1);
        link.push(zero);
        link.extend_from_slice(off);
        link.push(zero);
        let mut sys = Self {
            diag,
            link,
            twist,
            inv_pivot: vec![zero; n],
            coupling: vec![zero; n],
        };
        sys.refactor(0..n)?;
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[C64] {
        &self.diag
    }

    /// Off-diagonal entries, `off()[i]` coupling rows `i` and `i + 1`.
    pub fn off(&self) -> &[C64] {
        &self.link[1..self.diag.len()]
    }

    /// Overwrites `diag[rows]` and the couplings among `rows`, then refactors.
    /// `off` yields `rows.len() - 1` entries. Cost is proportional to the
    /// distance between `rows` and the twist index.
    pub fn update(
        &mut self,
        rows: Range<usize>,
        diag: impl IntoIterator<Item = C64>,
        off: impl IntoIterator<Item = C64>,
    ) -> Result<()> {
        for (slot, v) in self.diag[rows.clone()].iter_mut().zip(diag) {
            *slot = v;
        }
        if rows.len() > 1 {
            for (slot, v) in self.link[rows.start + 1..rows.end].iter_mut().zip(off) {
                *slot = v;
            }
        }
        self.refactor(rows)
    }

    fn refactor(&mut self, changed: Range<usize>) -> Result<()> {
        if changed.is_empty() {
            return Ok(());
        }
        let n = self.diag.len();
        let k = self.twist;
        let l = &self.link;
        // left factors depend on rows 0..=i
        if changed.start < k {
            let mut prev = if changed.start == 0 {
                C64::new(0.0, 0.0)
            } else {
                self.coupling[changed.start - 1]
            };
            for i in changed.start..k {
                let inv = invert(self.diag[i] - l[i] * prev, i)?;
                self.inv_pivot[i] = inv;
                self.coupling[i] = l[i + 1] * inv;
                prev = self.coupling[i];
            }
        }
        // right factors depend on rows i..n
        if changed.end > k + 1 {
            let mut prev = if changed.end >= n {
                C64::new(0.0, 0.0)
            } else {
                self.coupling[changed.end]
            };
            for i in (k + 1..changed.end.min(n)).rev() {
                let inv = invert(self.diag[i] - l[i + 1] * prev, i)?;
                self.inv_pivot[i] = inv;
                self.coupling[i] = l[i] * inv;
                prev = self.coupling[i];
            }
        }
        let left = if k == 0 {
            C64::new(0.0, 0.0)
        } else {
            l[k] * self.coupling[k - 1]
        };
        let right = if k + 1 >= n {
            C64::new(0.0, 0.0)
        } else {
            l[k + 1] * self.coupling[k + 1]
        };
        self.inv_pivot[k] = invert(self.diag[k] - left - right, k)?;
        Ok(())
    }

    /// Solves `A x = rhs` in place.
    pub fn solve(&self, rhs: &mut [C64]) {
        let n = self.diag.len();
        assert_eq!(rhs.len(), n);
        let k = self.twist;
        let l = &self.link;
        let p = &self.inv_pivot;
        let c = &self.coupling;
        let mut prev = C64::new(0.0, 0.0);
        for i in 0..k {
            let y = (rhs[i] - l[i] * prev) * p[i];
            rhs[i] = y;
            prev = y;
        }
        let left = prev;
        prev = C64::new(0.0, 0.0);
        for i in (k + 1..n).rev() {
            let z = (rhs[i] - l[i + 1] * prev) * p[i];
            rhs[i] = z;
            prev = z;
        }
        let right = prev;
        let mut x = (rhs[k] - l[k] * left - l[k + 1] * right) * p[k];
        rhs[k] = x;
        let pivot_value = x;
        for i in (0..k).rev() {
            x = rhs[i] - c[i] * x;
            rhs[i] = x;
        }
        x = pivot_value;
        for i in k + 1..n {
            x = rhs[i] - c[i] * x;
            rhs[i] = x;
        }
    }

    /// Cayley step `ψ ← A⁻¹ (2I - A) ψ` for `N` states at once.
    ///
    /// Each state holds `len() + 2` samples: the interior unknowns plus a
    /// zero at each end (hard walls). `work` needs `len()` slots per state.
    /// Building the right-hand side is fused into the elimination, and the
    /// left and right sweeps of all states run interleaved.
    pub fn apply_cayley<const N: usize>(&self, psi: [&mut [C64]; N], work: [&mut [C64]; N]) {
        let n = self.diag.len();
        let k = self.twist;
        let l = &self.link;
        let d = &self.diag;
        let p = &self.inv_pivot;
        let c = &self.coupling;
        let two = C64::new(2.0, 0.0);
        for f in 0..N {
            assert!(psi[f].len() == n + 2 && work[f].len() >= n);
        }
        let zero = C64::new(0.0, 0.0);
        let rhs = |s: &[C64], i: usize| (two - d[i]) * s[i + 1] - l[i] * s[i] - l[i + 1] * s[i + 2];

        let mut left = [zero; N];
        let mut right = [zero; N];
        let right_len = n - 1 - k;
        let both = k.min(right_len);
        for s in 0..both {
            let i = s;
            let j = n - 1 - s;
            for f in 0..N {
                let y = (rhs(&psi[f][..], i) - l[i] * left[f]) * p[i];
                let z = (rhs(&psi[f][..], j) - l[j + 1] * right[f]) * p[j];
                left[f] = y;
                right[f] = z;
                work[f][i] = y;
                work[f][j] = z;
            }
        }
        for i in both..k {
            for f in 0..N {
                let y = (rhs(&psi[f][..], i) - l[i] * left[f]) * p[i];
                left[f] = y;
                work[f][i] = y;
            }
        }
        for s in both..right_len {
            let j = n - 1 - s;
            for f in 0..N {
                let z = (rhs(&psi[f][..], j) - l[j + 1] * right[f]) * p[j];
                right[f] = z;
                work[f][j] = z;
            }
        }
        let mut down = [zero; N];
        for f in 0..N {
            down[f] = (rhs(&psi[f][..], k) - l[k] * left[f] - l[k + 1] * right[f]) * p[k];
        }
        let mut up = down;
        for f in 0..N {
            psi[f][k + 1] = down[f];
        }
        for s in 1..=both {
            let i = k - s;
            let j = k + s;
            for f in 0..N {
                down[f] = work[f][i] - c[i] * down[f];
                up[f] = work[f][j] - c[j] * up[f];
                psi[f][i + 1] = down[f];
                psi[f][j + 1] = up[f];
            }
        }
        for s in both + 1..=k {
            let i = k - s;
            for f in 0..N {
                down[f] = work[f][i] - c[i] * down[f];
                psi[f][i + 1] = down[f];
            }
        }
        for s in both + 1..=right_len {
            let j = k + s;
            for f in 0..N {
                up[f] = work[f][j] - c[j] * up[f];
                psi[f][j + 1] = up[f];
            }
        }
        for f in 0..N {
            psi[f][0] = zero;
            psi[f][n + 1] = zero;
        }
    }
}
