//! System state: `n` labelled points in `d` dimensions, plus the scale-tracked
//! normalized representation used for long evolutions.

use crate::error::{Error, Result};

/// Norm window outside which evolution rescales back to unit norm.
pub(crate) const RESCALE_MIN: f64 = 1e-6;
pub(crate) const RESCALE_MAX: f64 = 1e6;

/// A labelled set of `n >= 2` points in `d >= 1` dimensions at time step `t`.
///
/// Labels are the row indices `0..n-1` and are part of the state: the
/// evolution is a cyclic difference over labels, not positions.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    n: usize,
    d: usize,
    /// Row-major: `coords[l * d + a]` is axis `a` of point `l`.
    coords: Vec<f64>,
    t: u64,
}

impl PointCloud {
    pub fn new(n: usize, d: usize, coords: Vec<f64>, t: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        if coords.len() != n * d {
            return Err(Error::ShapeMismatch {
                expected: n * d,
                got: coords.len(),
            });
        }
        for (i, &v) in coords.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteCoord {
                    point: i / d,
                    axis: i % d,
                });
            }
        }
        Ok(Self { n, d, coords, t })
    }

    /// Builds a cloud at `t = 0` from one row of coordinates per point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut coords = Vec::with_capacity(n * d);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::RaggedRow {
                    row,
                    got: r.len(),
                    expected: d,
                });
            }
            coords.extend_from_slice(r);
        }
        Self::new(n, d, coords, 0)
    }

    /// Internal constructor for values produced by the evolution itself.
    pub(crate) fn from_parts(n: usize, d: usize, coords: Vec<f64>, t: u64) -> Self {
        debug_assert_eq!(coords.len(), n * d);
        Self { n, d, coords, t }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, label: usize, axis: usize) -> f64 {
        self.coords[label * self.d + axis]
    }

    pub fn point(&self, label: usize) -> &[f64] {
        &self.coords[label * self.d..(label + 1) * self.d]
    }

    /// The values of one coordinate axis across all labels.
    pub fn axis_values(&self, axis: usize) -> Vec<f64> {
        (0..self.n).map(|l| self.coord(l, axis)).collect()
    }

    /// Frobenius norm over all coordinates of all points.
    pub fn frobenius_norm(&self) -> f64 {
        self.coords.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean norm of each coordinate axis taken separately.
    pub fn axis_norms(&self) -> Vec<f64> {
        (0..self.d)
            .map(|a| {
                (0..self.n)
                    .map(|l| self.coord(l, a).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// True when every coordinate is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&v| v == 0.0)
    }

    /// Per-axis sum of coordinates. Telescopes to zero after any step.
    pub fn center_sum(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.d];
        for l in 0..self.n {
            for (a, s) in sums.iter_mut().enumerate() {
                *s += self.coord(l, a);
            }
        }
        sums
    }

    /// A copy with every coordinate multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> PointCloud {
        let coords = self.coords.iter().map(|v| v * factor).collect();
        Self::from_parts(self.n, self.d, coords, self.t)
    }

    pub(crate) fn scale_in_place(&mut self, factor: f64) {
        for v in &mut self.coords {
            *v *= factor;
        }
    }

    /// Unit-norm shape plus log magnitude. Errors on the all-zero state;
    /// use [`ScaledState::from_cloud`] where a degenerate flag is preferred.
    pub fn normalized(&self) -> Result<ScaledState> {
        let state = ScaledState::from_cloud(self);
        if state.is_degenerate() {
            return Err(Error::DegenerateZero);
        }
        Ok(state)
    }
}

/// A [`PointCloud`] with unit Frobenius norm plus the natural log of the
/// magnitude factored out: the true state is `exp(logmag) * cloud`.
///
/// Normalization is joint over all axes so the shape (ellipse aspect ratio)
/// is preserved; [`ScaledState::axis_norms`] records the per-axis norms of
/// the stored cloud so the per-axis plotting convention can be recovered.
///
/// When the true state is identically zero no shape exists: the stored cloud
/// is all zeros, `logmag` is 0 and [`ScaledState::is_degenerate`] is set.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledState {
    cloud: PointCloud,
    logmag: f64,
    axis_norms: Vec<f64>,
    degenerate: bool,
}

impl ScaledState {
    /// Normalizes a cloud, flagging the all-zero state instead of erroring.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        Self::from_cloud_offset(cloud, 0.0)
    }

    /// Normalizes `cloud` and adds `logmag_offset` to the resulting log
    /// magnitude (the cloud is understood as already scaled down by
    /// `exp(logmag_offset)`).
    pub(crate) fn from_cloud_offset(cloud: &PointCloud, logmag_offset: f64) -> Self {
        let norm = cloud.frobenius_norm();
        if norm == 0.0 {
            return Self {
                cloud: cloud.clone(),
                logmag: 0.0,
                axis_norms: vec![0.0; cloud.dim()],
                degenerate: true,
            };
        }
        let unit = cloud.rescaled(1.0 / norm);
        let axis_norms = unit.axis_norms();
        Self {
            cloud: unit,
            logmag: norm.ln() + logmag_offset,
            axis_norms,
            degenerate: false,
        }
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    /// Natural log of the factored-out magnitude.
    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    /// Euclidean norm of each axis of the stored unit-norm cloud, recorded
    /// at the last rescale.
    pub fn axis_norms(&self) -> &[f64] {
        &self.axis_norms
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// The true (unnormalized) coordinates, `exp(logmag) * cloud`.
    /// Overflows for logmag beyond ~709; intended for short evolutions.
    pub fn true_coords(&self) -> Vec<f64> {
        let scale = self.logmag.exp();
        self.cloud.coords().iter().map(|v| v * scale).collect()
    }
}
