use crate::error::{ensure, Error, Result};

/// Uniform 1D grid with hard walls at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        ensure(x_min.is_finite() && x_min < 0.0, "x_min", x_min)?;
        ensure(x_max.is_finite() && x_max > 0.0, "x_max", x_max)?;
        ensure(n_points >= 3, "n_points", n_points as f64)?;
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx,
        })
    }

    /// Builds the grid whose spacing is closest to `dx`; the spacing is then
    /// re-derived from the node count so both endpoints are nodes.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        ensure(dx.is_finite() && dx > 0.0, "dx", dx)?;
        let intervals = libm::round((x_max - x_min) / dx);
        ensure((2.0..1e9).contains(&intervals), "dx", dx)?;
        Self::new(x_min, x_max, intervals as usize + 1)
    }

    /// Node position. Computed as a weighted mean of the endpoints so a grid
    /// with `x_min = -x_max` is exactly mirror symmetric node by node.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        let last = (self.n_points - 1) as f64;
        (self.x_min * (last - i as f64) + self.x_max * i as f64) / last
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.x(i))
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Index range of nodes with `lo <= x <= hi`.
    pub fn index_range(&self, lo: f64, hi: f64) -> core::ops::Range<usize> {
        let first = libm::ceil((lo - self.x_min) / self.dx - 1e-9).max(0.0) as usize;
        let last = libm::floor((hi - self.x_min) / self.dx + 1e-9);
        let end = if last < 0.0 {
            0
        } else {
            (last as usize + 1).min(self.n_points)
        };
        first.min(end)..end
    }

    pub fn contains_interval(&self, lo: f64, hi: f64) -> Result<()> {
        if lo >= self.x_min && hi <= self.x_max {
            Ok(())
        } else {
            Err(Error::GridTooSmall {
                required_min: lo,
                required_max: hi,
            })
        }
    }

    /// Same node set, compared with a relative tolerance on the endpoints.
    pub fn same_as(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * (self.x_max - self.x_min);
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }
}
