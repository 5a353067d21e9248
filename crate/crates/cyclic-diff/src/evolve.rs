//! The evolution operator evaluated by direct iteration (with overflow-safe
//! rescaling) and by the one-pass binomial difference form.

use crate::cloud::{PointCloud, ScaledState, RESCALE_MAX, RESCALE_MIN};
use crate::error::{Error, Result};

/// Largest step count accepted by [`evolve_binomial`]. Beyond this the
/// binomial coefficients lose integer precision in 64-bit floats; use the
/// iterative or spectral route instead.
pub const BINOMIAL_MAX_STEPS: u64 = 60;

/// One evolution step: point `l` becomes `p[(l+1) mod n] - p[l]`, applied
/// independently per axis. Total on any valid cloud.
pub fn step(cloud: &PointCloud) -> PointCloud {
    let (n, d) = (cloud.n(), cloud.dim());
    let src = cloud.coords();
    let mut out = vec![0.0; n * d];
    for l in 0..n {
        let cur = l * d;
        let next = ((l + 1) % n) * d;
        for a in 0..d {
            out[cur + a] = src[next + a] - src[cur + a];
        }
    }
    PointCloud::from_parts(n, d, out, cloud.time() + 1)
}

/// Applies [`step`] `steps` times, rescaling to unit norm whenever the norm
/// leaves the `[1e-6, 1e6]` window and accumulating the log magnitude so the
/// result never overflows. A state that reaches exactly zero is reported via
/// the degenerate flag, not as an error.
pub fn evolve_iterative(cloud: &PointCloud, steps: u64) -> ScaledState {
    let mut cur = cloud.clone();
    let mut logmag = 0.0;
    for _ in 0..steps {
        cur = step(&cur);
        let norm = cur.frobenius_norm();
        if norm == 0.0 {
            let zero = PointCloud::from_parts(
                cur.n(),
                cur.dim(),
                vec![0.0; cur.n() * cur.dim()],
                cloud.time() + steps,
            );
            return ScaledState::from_cloud(&zero);
        }
        if !(RESCALE_MIN..=RESCALE_MAX).contains(&norm) {
            cur.scale_in_place(1.0 / norm);
            logmag += norm.ln();
        }
    }
    ScaledState::from_cloud_offset(&cur, logmag)
}

impl ScaledState {
    /// Continues an already-normalized state by `steps` iterative steps,
    /// folding the accumulated magnitude into the running `logmag`. Exact
    /// for the linear dynamics.
    pub fn advanced(&self, steps: u64) -> ScaledState {
        if self.is_degenerate() {
            let c = self.cloud();
            let zero = PointCloud::from_parts(
                c.n(),
                c.dim(),
                vec![0.0; c.n() * c.dim()],
                c.time() + steps,
            );
            return ScaledState::from_cloud(&zero);
        }
        let next = evolve_iterative(self.cloud(), steps);
        if next.is_degenerate() {
            return next;
        }
        ScaledState::from_cloud_offset(next.cloud(), self.logmag() + next.logmag())
    }
}

/// Evaluates the state after `steps` steps in one pass from the initial
/// coordinates via the alternating binomial sum
/// `x_k(t) = (-1)^t sum_i (-1)^i C(t,i) x_{(k+i) mod n}(0)`.
///
/// Capped at [`BINOMIAL_MAX_STEPS`]; this route is a cross-check, not the
/// production path for long evolutions.
pub fn evolve_binomial(cloud: &PointCloud, steps: u64) -> Result<PointCloud> {
    if steps > BINOMIAL_MAX_STEPS {
        return Err(Error::StepsTooLarge {
            got: steps,
            max: BINOMIAL_MAX_STEPS,
        });
    }
    let (n, d) = (cloud.n(), cloud.dim());
    let t = steps as usize;

    // Signed weights w_i = (-1)^(t+i) C(t,i); the binomial row is computed
    // exactly in u64 (the largest intermediate at t = 60 fits well below 2^64).
    let mut weights = Vec::with_capacity(t + 1);
    let mut binom: u64 = 1;
    for i in 0..=t {
        let sign = if (t + i).is_multiple_of(2) { 1.0 } else { -1.0 };
        weights.push(sign * binom as f64);
        if i < t {
            binom = binom * (t - i) as u64 / (i + 1) as u64;
        }
    }

    let src = cloud.coords();
    let mut out = vec![0.0; n * d];
    for k in 0..n {
        for a in 0..d {
            let mut acc = 0.0;
            for (i, &w) in weights.iter().enumerate() {
                acc += w * src[((k + i) % n) * d + a];
            }
            out[k * d + a] = acc;
        }
    }
    Ok(PointCloud::from_parts(n, d, out, cloud.time() + steps))
}
