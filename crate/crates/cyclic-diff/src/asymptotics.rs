//! Large-t predictions and the diagnostics that quantify how fast actual
//! trajectories converge to them: the limiting ellipse for odd point counts,
//! alternating limit points for even counts, second-order correction, parity
//! cluster separation, and empirical growth rate.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cloud::{PointCloud, ScaledState};
use crate::error::{Error, Result};

/// Relative threshold below which dominant coefficients are declared to
/// vanish and the model is flagged degenerate.
const DEGENERACY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Magnitude of the dominant step eigenvalue: `2 cos(pi / 2n)` for odd n,
/// exactly 2 for even n.
pub fn dominant_rate(n: usize) -> f64 {
    match Parity::of(n) {
        Parity::Even => 2.0,
        Parity::Odd => 2.0 * (PI / (2.0 * n as f64)).cos(),
    }
}

/// Magnitude of the next eigenvalue shell for even n: `2 cos(pi / n)`.
pub fn second_rate_even(n: usize) -> f64 {
    2.0 * (PI / n as f64).cos()
}

/// Dominant-mode coefficients extracted from the initial cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum DominantCoefficients {
    /// Odd n: per axis, the (cos, sin) coefficient pair of the oscillating
    /// dominant mode. For d = 2 these are the (A, B) and (C, D) pairs.
    Oscillatory { pairs: Vec<[f64; 2]> },
    /// Even n: per axis, the alternating-sign mean (A, C, ...).
    Alternating { means: Vec<f64> },
}

/// Second eigenvalue shell for even n: rate `2 cos(pi/n)` and per-axis
/// (cos, sin) coefficient pairs taken at doubled angular frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder {
    pub rate: f64,
    pub pairs: Vec<[f64; 2]>,
}

/// Parity-dependent prediction of the large-t state, built from the initial
/// cloud alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    pub n: usize,
    pub d: usize,
    pub parity: Parity,
    /// Dominant growth rate per step.
    pub rate: f64,
    pub dominant: DominantCoefficients,
    pub second_order: Option<SecondOrder>,
    /// Set when the dominant prediction vanishes (for odd n and d = 2 this is
    /// the AD - BC = 0 case; the next eigenvalue shell then governs the limit).
    pub degenerate: bool,
}

/// A predicted true state delivered as `exp(log_scale) * direction` so that
/// arbitrarily large t never overflows. `direction` is a unit vector, or zero
/// when the prediction itself vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub log_scale: f64,
    pub direction: Vec<f64>,
}

impl Prediction {
    fn from_vector(log_rate_part: f64, mut v: Vec<f64>) -> Prediction {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Prediction {
                log_scale: log_rate_part,
                direction: v,
            };
        }
        for x in &mut v {
            *x /= norm;
        }
        Prediction {
            log_scale: log_rate_part + norm.ln(),
            direction: v,
        }
    }

    /// The predicted raw coordinates; only safe while `log_scale` stays
    /// within f64 range.
    pub fn values(&self) -> Vec<f64> {
        let s = self.log_scale.exp();
        self.direction.iter().map(|x| x * s).collect()
    }
}

/// The conic `qxx x^2 - 2 qxy xy + qyy y^2 = exp(rhs_log)` on which odd-n
/// configurations asymptotically lie. `qxy` stores the half cross
/// coefficient, so positive semidefiniteness reads `qxx qyy - qxy^2 >= 0`
/// (it equals (AD - BC)^2). The right-hand side grows as `r^(2t)` and is
/// kept in log form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipseQuadratic {
    pub qxx: f64,
    pub qxy: f64,
    pub qyy: f64,
    pub rhs_log: f64,
}

impl EllipseQuadratic {
    /// Evaluates the quadratic form (the left-hand side) at a point.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.qxx * x * x - 2.0 * self.qxy * x * y + self.qyy * y * y
    }
}

impl AsymptoticModel {
    /// Builds the parity-appropriate model for any valid cloud.
    pub fn for_cloud(initial: &PointCloud) -> AsymptoticModel {
        match Parity::of(initial.n()) {
            Parity::Odd => Self::coefficients_odd(initial).expect("parity checked"),
            Parity::Even => Self::coefficients_even(initial).expect("parity checked"),
        }
    }

    /// Odd-n dominant coefficients: per axis,
    /// `cos_a = (2/n) sum_j (-1)^j cos(pi j / n) x_j(0)` and the sin analog.
    /// For d = 2 these are the (A, B), (C, D) pairs of the limiting ellipse.
    pub fn coefficients_odd(initial: &PointCloud) -> Result<AsymptoticModel> {
        let n = initial.n();
        if n.is_multiple_of(2) {
            return Err(Error::WrongParity {
                expected: Parity::Odd,
                n,
            });
        }
        let d = initial.dim();
        let pairs = mode_pairs(initial, PI / n as f64);
        let scale = max_abs(initial.coords());
        let degenerate = if d == 2 {
            let [a, b] = pairs[0];
            let [c, dd] = pairs[1];
            let m = [a, b, c, dd].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let det = a * dd - b * c;
            m == 0.0 || det.abs() <= DEGENERACY_REL_TOL * m * m
        } else {
            pairs
                .iter()
                .flatten()
                .all(|v| v.abs() <= DEGENERACY_REL_TOL * scale)
        };
        Ok(AsymptoticModel {
            n,
            d,
            parity: Parity::Odd,
            rate: dominant_rate(n),
            dominant: DominantCoefficients::Oscillatory { pairs },
            second_order: None,
            degenerate,
        })
    }

    /// Even-n dominant coefficients: per axis the alternating mean
    /// `(1/n) sum_j (-1)^j x_j(0)`, plus the second-order shell at rate
    /// `2 cos(pi/n)` with coefficients at doubled angular frequency.
    pub fn coefficients_even(initial: &PointCloud) -> Result<AsymptoticModel> {
        let n = initial.n();
        if n % 2 == 1 {
            return Err(Error::WrongParity {
                expected: Parity::Even,
                n,
            });
        }
        let d = initial.dim();
        let means: Vec<f64> = (0..d)
            .map(|a| (0..n).map(|j| sign(j) * initial.coord(j, a)).sum::<f64>() / n as f64)
            .collect();
        let scale = max_abs(initial.coords());
        let degenerate = means.iter().all(|v| v.abs() <= DEGENERACY_REL_TOL * scale);
        let second_order = Some(SecondOrder {
            rate: second_rate_even(n),
            pairs: mode_pairs(initial, 2.0 * PI / n as f64),
        });
        Ok(AsymptoticModel {
            n,
            d,
            parity: Parity::Even,
            rate: 2.0,
            dominant: DominantCoefficients::Alternating { means },
            second_order,
            degenerate,
        })
    }

    /// Dominant-mode prediction of point `label` at time `t` for odd n:
    /// `r^t (-1)^(l+t) (cos(phi) cos_a + sin(phi) sin_a)` per axis, with
    /// `phi = pi (l + t/2) / n`, delivered in log-magnitude form.
    pub fn predict_odd(&self, label: usize, t: u64) -> Result<Prediction> {
        let DominantCoefficients::Oscillatory { pairs } = &self.dominant else {
            return Err(Error::WrongParity {
                expected: Parity::Odd,
                n: self.n,
            });
        };
        let phi = PI * (label as f64 + t as f64 / 2.0) / self.n as f64;
        let s = parity_sign(label, t);
        let (cos, sin) = (phi.cos(), phi.sin());
        let v = pairs.iter().map(|[c, d]| s * (cos * c + sin * d)).collect();
        Ok(Prediction::from_vector(t as f64 * self.rate.ln(), v))
    }

    /// Even-n prediction: `2^t (-1)^(l+t) A_a` per axis, plus, when the
    /// second-order shell is present, the `(rate1/2)^t`-scaled oscillating
    /// correction at `phi = 2 pi (l + t/2) / n`. When the alternating means
    /// vanish the correction is all that remains and the effective growth
    /// rate becomes `rate1`.
    pub fn predict_even(&self, label: usize, t: u64) -> Result<Prediction> {
        let DominantCoefficients::Alternating { means } = &self.dominant else {
            return Err(Error::WrongParity {
                expected: Parity::Even,
                n: self.n,
            });
        };
        let s = parity_sign(label, t);
        let mut v: Vec<f64> = means.iter().map(|a| s * a).collect();
        if let Some(second) = &self.second_order {
            let damp = (t as f64 * (second.rate / 2.0).ln()).exp();
            let phi = 2.0 * PI * (label as f64 + t as f64 / 2.0) / self.n as f64;
            let (cos, sin) = (phi.cos(), phi.sin());
            for (x, [c, d]) in v.iter_mut().zip(&second.pairs) {
                *x += s * damp * (cos * c + sin * d);
            }
        }
        Ok(Prediction::from_vector(t as f64 * 2.0_f64.ln(), v))
    }

    /// The quadratic form of the limiting ellipse at time `t` (odd n, d = 2):
    /// `(C^2+D^2) x^2 - 2(AC+BD) xy + (A^2+B^2) y^2 = (AD-BC)^2 r^(2t)`.
    pub fn ellipse_of(&self, t: u64) -> Result<EllipseQuadratic> {
        let DominantCoefficients::Oscillatory { pairs } = &self.dominant else {
            return Err(Error::WrongParity {
                expected: Parity::Odd,
                n: self.n,
            });
        };
        if self.d != 2 {
            return Err(Error::NotTwoDimensional(self.d));
        }
        let [a, b] = pairs[0];
        let [c, d] = pairs[1];
        let det = a * d - b * c;
        if self.degenerate {
            return Err(Error::DegenerateEllipse { det });
        }
        Ok(EllipseQuadratic {
            qxx: c * c + d * d,
            qxy: a * c + b * d,
            qyy: a * a + b * b,
            rhs_log: 2.0 * det.abs().ln() + 2.0 * t as f64 * self.rate.ln(),
        })
    }
}

/// Per-axis (cos, sin) projections `((2/n) sum_j (-1)^j cos(w j) x_j, ...)`
/// shared by the odd-n dominant mode (`w = pi/n`) and the even-n second
/// shell (`w = 2 pi/n`).
fn mode_pairs(cloud: &PointCloud, w: f64) -> Vec<[f64; 2]> {
    let n = cloud.n();
    (0..cloud.dim())
        .map(|a| {
            let mut cos_acc = 0.0;
            let mut sin_acc = 0.0;
            for j in 0..n {
                let x = sign(j) * cloud.coord(j, a);
                cos_acc += (w * j as f64).cos() * x;
                sin_acc += (w * j as f64).sin() * x;
            }
            [2.0 * cos_acc / n as f64, 2.0 * sin_acc / n as f64]
        })
        .collect()
}

fn sign(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn parity_sign(label: usize, t: u64) -> f64 {
    if (label as u64 + t).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// RMS over points of `|Q(x_l, y_l) / rhs - 1|`, evaluated on the normalized
/// cloud against the identically normalized right-hand side (the state's
/// `logmag` rescales the rhs), so the result is scale-free. Zero means every
/// point lies exactly on the predicted ellipse.
pub fn ellipse_residual(state: &ScaledState, ellipse: &EllipseQuadratic) -> Result<f64> {
    let cloud = state.cloud();
    if cloud.dim() != 2 {
        return Err(Error::NotTwoDimensional(cloud.dim()));
    }
    let inv_rhs = (2.0 * state.logmag() - ellipse.rhs_log).exp();
    let n = cloud.n();
    let mut acc = 0.0;
    for l in 0..n {
        let rel = ellipse.evaluate(cloud.coord(l, 0), cloud.coord(l, 1)) * inv_rhs - 1.0;
        acc += rel * rel;
    }
    Ok((acc / n as f64).sqrt())
}

/// Geometry of the even/odd label subsets: the diameter of each subset and
/// the distance between their centroids, measured on the cloud as given.
///
/// All three numbers are invariant under a global sign flip, and the
/// diameters are invariant under any per-parity-class flip, so the
/// `(-1)^(l+t)` alignment prefactor used elsewhere does not change them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParitySeparation {
    pub even_diameter: f64,
    pub odd_diameter: f64,
    pub gap: f64,
}

/// Splits an even-n cloud by label parity and measures cluster geometry.
pub fn parity_separation(cloud: &PointCloud) -> Result<ParitySeparation> {
    let n = cloud.n();
    if n % 2 == 1 {
        return Err(Error::WrongParity {
            expected: Parity::Even,
            n,
        });
    }
    let d = cloud.dim();
    let labels_even: Vec<usize> = (0..n).step_by(2).collect();
    let labels_odd: Vec<usize> = (1..n).step_by(2).collect();

    let diameter = |labels: &[usize]| {
        let mut best = 0.0f64;
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                let dist: f64 = (0..d)
                    .map(|ax| (cloud.coord(a, ax) - cloud.coord(b, ax)).powi(2))
                    .sum();
                best = best.max(dist);
            }
        }
        best.sqrt()
    };
    let centroid = |labels: &[usize]| -> Vec<f64> {
        let mut c = vec![0.0; d];
        for &l in labels {
            for (ax, v) in c.iter_mut().enumerate() {
                *v += cloud.coord(l, ax);
            }
        }
        for v in &mut c {
            *v /= labels.len() as f64;
        }
        c
    };
    let ce = centroid(&labels_even);
    let co = centroid(&labels_odd);
    let gap = ce
        .iter()
        .zip(&co)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(ParitySeparation {
        even_diameter: diameter(&labels_even),
        odd_diameter: diameter(&labels_odd),
        gap,
    })
}

/// Empirical per-step log growth between the first and last snapshot:
/// `(logmag(t2) - logmag(t1)) / (t2 - t1)`. Snapshots should be past the
/// transient (t1 >= 4n is a good rule) for the dominant rate to show.
pub fn growth_rate(snapshots: &[ScaledState]) -> Result<f64> {
    if snapshots.len() < 2 {
        return Err(Error::InsufficientSnapshots(snapshots.len()));
    }
    let first = &snapshots[0];
    let last = &snapshots[snapshots.len() - 1];
    if first.is_degenerate() || last.is_degenerate() {
        return Err(Error::DegenerateZero);
    }
    let t1 = first.cloud().time();
    let t2 = last.cloud().time();
    if t2 <= t1 {
        return Err(Error::InsufficientSnapshots(snapshots.len()));
    }
    Ok((last.logmag() - first.logmag()) / (t2 - t1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::evolve_iterative;
    use crate::harness::initial_cloud;
    use crate::spectral::evolve_closed_form;
    use approx::assert_relative_eq;

    fn cloud2(rows: &[[f64; 2]]) -> PointCloud {
        PointCloud::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn odd_coefficients_hand_example() {
        // n = 3, x = (1, 0, 0): only the j = 0 term survives
        let c = PointCloud::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let DominantCoefficients::Oscillatory { pairs } = &model.dominant else {
            panic!("odd model must be oscillatory");
        };
        assert_relative_eq!(pairs[0][0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(pairs[0][1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(model.rate, 2.0 * (PI / 6.0).cos(), epsilon = 1e-15);
        assert!(!model.degenerate);
    }

    #[test]
    fn odd_all_origin_is_degenerate() {
        let c = cloud2(&[[0.0, 0.0]; 3]);
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        assert!(model.degenerate);
        assert!(matches!(
            model.ellipse_of(0),
            Err(Error::DegenerateEllipse { .. })
        ));
    }

    #[test]
    fn parity_mismatch_is_rejected() {
        let even = cloud2(&[[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            AsymptoticModel::coefficients_odd(&even),
            Err(Error::WrongParity { .. })
        ));
        let odd = cloud2(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(
            AsymptoticModel::coefficients_even(&odd),
            Err(Error::WrongParity { .. })
        ));
        let model = AsymptoticModel::for_cloud(&odd);
        assert!(matches!(
            model.predict_even(0, 1),
            Err(Error::WrongParity { .. })
        ));
    }

    #[test]
    fn even_coefficients_hand_examples() {
        let c = PointCloud::from_rows(&[vec![1.0], vec![0.0], vec![0.0], vec![0.0]]).unwrap();
        let model = AsymptoticModel::coefficients_even(&c).unwrap();
        let DominantCoefficients::Alternating { means } = &model.dominant else {
            panic!("even model must be alternating");
        };
        assert_relative_eq!(means[0], 0.25, epsilon = 1e-15);
        assert_eq!(model.rate, 2.0);
        let second = model.second_order.as_ref().unwrap();
        assert_relative_eq!(second.rate, 2.0 * (PI / 4.0).cos(), epsilon = 1e-15);

        // constant cloud: the alternating sum cancels
        let flat = PointCloud::from_rows(&vec![vec![0.4]; 6]).unwrap();
        let model = AsymptoticModel::coefficients_even(&flat).unwrap();
        let DominantCoefficients::Alternating { means } = &model.dominant else {
            unreachable!()
        };
        assert!(means[0].abs() < 1e-15);
        assert!(model.degenerate);
    }

    #[test]
    fn even_n2_prediction_matches_iteration_exactly() {
        // n = 2, x = (1, 0): A = 1/2 and the dominant term is the whole story
        let c = PointCloud::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let model = AsymptoticModel::coefficients_even(&c).unwrap();
        for k in [1u64, 2, 3, 7, 20] {
            let state = evolve_iterative(&c, k);
            let truth = state.true_coords();
            for (l, want) in truth.iter().enumerate() {
                let pred = model.predict_even(l, k).unwrap();
                let vals = pred.values();
                assert_relative_eq!(vals[0], want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn predict_odd_identity_coefficients_at_zero_phase() {
        let model = AsymptoticModel {
            n: 5,
            d: 2,
            parity: Parity::Odd,
            rate: dominant_rate(5),
            dominant: DominantCoefficients::Oscillatory {
                pairs: vec![[1.0, 0.0], [0.0, 1.0]],
            },
            second_order: None,
            degenerate: false,
        };
        // l = 0, t = 0 gives phi = 0 and positive sign: direction (1, 0)
        let p = model.predict_odd(0, 0).unwrap();
        assert_relative_eq!(p.direction[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.direction[1], 0.0, epsilon = 1e-15);
        // l = 1, t = 0: sign flips with the label
        let p = model.predict_odd(1, 0).unwrap();
        assert!(p.direction[0] < 0.0);
    }

    #[test]
    fn predictor_two_step_identity() {
        // predict(l, t+2) = -r^2 predict(l+1, t), exact on the predictor
        let c = initial_cloud(9, 2, 21).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let r2log = 2.0 * model.rate.ln();
        for l in 0..8usize {
            for t in [0u64, 1, 2, 9, 40, 1000] {
                let lhs = model.predict_odd(l, t + 2).unwrap();
                let rhs = model.predict_odd(l + 1, t).unwrap();
                assert_relative_eq!(lhs.log_scale, rhs.log_scale + r2log, max_relative = 1e-12);
                for (a, b) in lhs.direction.iter().zip(&rhs.direction) {
                    assert_relative_eq!(*a, -b, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn predicted_points_satisfy_their_ellipse() {
        let c = initial_cloud(11, 2, 33).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        for t in [0u64, 3, 10, 57] {
            let ellipse = model.ellipse_of(t).unwrap();
            let rhs = ellipse.rhs_log.exp();
            for l in 0..11 {
                let p = model.predict_odd(l, t).unwrap().values();
                let q = ellipse.evaluate(p[0], p[1]);
                assert_relative_eq!(q, rhs, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn ellipse_of_hand_examples() {
        let base = AsymptoticModel {
            n: 5,
            d: 2,
            parity: Parity::Odd,
            rate: dominant_rate(5),
            dominant: DominantCoefficients::Oscillatory {
                pairs: vec![[1.0, 0.0], [0.0, 1.0]],
            },
            second_order: None,
            degenerate: false,
        };
        // identity coefficients: x^2 + y^2 = r^(2t), a circle
        let e = base.ellipse_of(3).unwrap();
        assert_eq!((e.qxx, e.qxy, e.qyy), (1.0, 0.0, 1.0));
        assert_relative_eq!(e.rhs_log, 6.0 * base.rate.ln(), epsilon = 1e-12);

        // A = 2: x^2 + 4 y^2 = 4 r^(2t)
        let mut stretched = base.clone();
        stretched.dominant = DominantCoefficients::Oscillatory {
            pairs: vec![[2.0, 0.0], [0.0, 1.0]],
        };
        let e = stretched.ellipse_of(1).unwrap();
        assert_eq!((e.qxx, e.qxy, e.qyy), (1.0, 0.0, 4.0));
        assert_relative_eq!(
            e.rhs_log,
            4.0_f64.ln() + 2.0 * base.rate.ln(),
            epsilon = 1e-12
        );

        // B = C = 0, A = D: circle of squared radius A^2 r^(2t)
        let mut circle = base.clone();
        circle.dominant = DominantCoefficients::Oscillatory {
            pairs: vec![[3.0, 0.0], [0.0, 3.0]],
        };
        let e = circle.ellipse_of(2).unwrap();
        assert_relative_eq!(e.qxx, 9.0, epsilon = 1e-12);
        assert_relative_eq!(e.qyy, 9.0, epsilon = 1e-12);
        // dividing rhs by qxx gives the squared radius A^2 r^(2t)
        let radius_sq_log = e.rhs_log - e.qxx.ln();
        assert_relative_eq!(
            radius_sq_log,
            (9.0f64).ln() + 4.0 * base.rate.ln(),
            epsilon = 1e-12
        );
        // positive semidefiniteness: qxx qyy - qxy^2 = (AD - BC)^2 >= 0
        assert!(e.qxx * e.qyy - e.qxy * e.qxy >= -1e-12);
    }

    #[test]
    fn residual_vanishes_on_predicted_points() {
        let c = initial_cloud(9, 2, 14).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let t = 12u64;
        let rows: Vec<Vec<f64>> = (0..9)
            .map(|l| model.predict_odd(l, t).unwrap().values())
            .collect();
        let exact = PointCloud::from_rows(&rows).unwrap();
        let state = exact.normalized().unwrap();
        let ellipse = model.ellipse_of(t).unwrap();
        let res = ellipse_residual(&state, &ellipse).unwrap();
        assert!(res <= 1e-12, "residual {res}");
    }

    #[test]
    fn residual_large_for_random_points() {
        // a random cloud at t = 0 is nowhere near its own limiting ellipse
        let c = initial_cloud(51, 2, 1).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let state = c.normalized().unwrap();
        let ellipse = model.ellipse_of(0).unwrap();
        let res = ellipse_residual(&state, &ellipse).unwrap();
        assert!(res > 0.1, "residual {res}");
    }

    #[test]
    fn residual_decays_with_time() {
        // second-shell decay: residual(1500)/residual(300) within twice
        // (r2/r)^1200, and monotone over 300/600/1200
        for seed in [1u64, 2, 3] {
            let c = initial_cloud(51, 2, seed).unwrap();
            let model = AsymptoticModel::coefficients_odd(&c).unwrap();
            let res_at = |t: u64| {
                let state = evolve_closed_form(&c, t).unwrap();
                ellipse_residual(&state, &model.ellipse_of(t).unwrap()).unwrap()
            };
            let (r300, r600, r1200, r1500) = (res_at(300), res_at(600), res_at(1200), res_at(1500));
            assert!(r300 > r600 && r600 > r1200, "{r300} {r600} {r1200}");
            let r = dominant_rate(51);
            let r2 = 2.0 * (3.0 * PI / 102.0).cos();
            let bound = 2.0 * (r2 / r).powi(1200);
            assert!(
                r1500 / r300 <= bound,
                "ratio {} vs bound {bound}",
                r1500 / r300
            );
        }
    }

    #[test]
    fn parity_separation_exact_clusters() {
        let (a, c) = (0.3, 0.4);
        let cloud = cloud2(&[[a, c], [-a, -c], [a, c], [-a, -c]]);
        let sep = parity_separation(&cloud).unwrap();
        assert_eq!(sep.even_diameter, 0.0);
        assert_eq!(sep.odd_diameter, 0.0);
        assert_relative_eq!(sep.gap, 1.0, epsilon = 1e-15); // 2 |(a, c)| = 1
    }

    #[test]
    fn parity_separation_random_baseline() {
        let c = initial_cloud(50, 2, 1).unwrap();
        let scaled = c.rescaled((50.0f64).sqrt() / c.frobenius_norm());
        let sep = parity_separation(&scaled).unwrap();
        assert!(sep.even_diameter > 1.0 && sep.odd_diameter > 1.0);
        assert!(sep.gap < 1.0, "gap {}", sep.gap);
    }

    #[test]
    fn parity_separation_rejects_odd_n() {
        let c = cloud2(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            parity_separation(&c),
            Err(Error::WrongParity { .. })
        ));
    }

    #[test]
    fn parity_clusters_tighten_at_long_horizons() {
        // by t = 6000 the n = 50 clusters are below 1e-4 in diameter with the
        // centroid gap at its antipodal limit of 2 on the sqrt(n)-scaled cloud
        for seed in [1u64, 2, 3] {
            let c = initial_cloud(50, 2, seed).unwrap();
            let state = evolve_closed_form(&c, 6000).unwrap();
            let scaled = state.cloud().rescaled((50.0f64).sqrt());
            let sep = parity_separation(&scaled).unwrap();
            assert!(
                sep.even_diameter <= 1e-4,
                "even diameter {}",
                sep.even_diameter
            );
            assert!(
                sep.odd_diameter <= 1e-4,
                "odd diameter {}",
                sep.odd_diameter
            );
            assert!(sep.gap >= 1.9, "gap {}", sep.gap);
        }
    }

    #[test]
    fn growth_rate_needs_two_distinct_snapshots() {
        let c = initial_cloud(8, 1, 3).unwrap();
        let s = evolve_iterative(&c, 10);
        assert!(matches!(
            growth_rate(std::slice::from_ref(&s)),
            Err(Error::InsufficientSnapshots(1))
        ));
        assert!(matches!(
            growth_rate(&[s.clone(), s]),
            Err(Error::InsufficientSnapshots(2))
        ));
    }

    #[test]
    fn growth_rate_even_generic() {
        let c = initial_cloud(10, 2, 7).unwrap();
        let s1 = evolve_closed_form(&c, 200).unwrap();
        let s2 = evolve_closed_form(&c, 400).unwrap();
        let rate = growth_rate(&[s1, s2]).unwrap();
        assert!((rate - 2.0_f64.ln()).abs() <= 1e-9, "rate {rate}");
    }

    #[test]
    fn growth_rate_odd_n25() {
        let c = initial_cloud(25, 2, 7).unwrap();
        let expect = (2.0 * (PI / 50.0).cos()).ln();
        // the second shell at n = 25 still contributes ~3e-6 over the
        // 200..400 window; it is below 1e-9 only from t ~ 500 on
        let early = growth_rate(&[
            evolve_closed_form(&c, 200).unwrap(),
            evolve_closed_form(&c, 400).unwrap(),
        ])
        .unwrap();
        assert!(
            (early - expect).abs() <= 1e-5,
            "early err {}",
            early - expect
        );
        let late = growth_rate(&[
            evolve_closed_form(&c, 600).unwrap(),
            evolve_closed_form(&c, 800).unwrap(),
        ])
        .unwrap();
        assert!((late - expect).abs() <= 1e-9, "late err {}", late - expect);
    }

    #[test]
    fn growth_rate_degenerate_even_falls_to_second_shell() {
        let c = zero_alternating_mean_cloud(10, 7);
        let s1 = evolve_closed_form(&c, 200).unwrap();
        let s2 = evolve_closed_form(&c, 400).unwrap();
        let rate = growth_rate(&[s1, s2]).unwrap();
        let expect = second_rate_even(10).ln();
        assert!((rate - expect).abs() <= 1e-6, "rate {rate} vs {expect}");
    }

    #[test]
    fn degenerate_even_prediction_uses_second_order() {
        let c = zero_alternating_mean_cloud(10, 4);
        let model = AsymptoticModel::coefficients_even(&c).unwrap();
        assert!(model.degenerate);
        // the prediction magnitude now grows at the second rate: check the
        // two-window log-scale increment
        let p1 = model.predict_even(0, 100).unwrap();
        let p2 = model.predict_even(0, 200).unwrap();
        let growth = (p2.log_scale - p1.log_scale) / 100.0;
        let expect = second_rate_even(10).ln();
        assert!((growth - expect).abs() <= 1e-9, "growth {growth}");
    }

    fn zero_alternating_mean_cloud(n: usize, seed: u64) -> PointCloud {
        let c = initial_cloud(n, 2, seed).unwrap();
        let model = AsymptoticModel::coefficients_even(&c).unwrap();
        let DominantCoefficients::Alternating { means } = &model.dominant else {
            unreachable!()
        };
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|j| (0..2).map(|a| c.coord(j, a) - sign(j) * means[a]).collect())
            .collect();
        PointCloud::from_rows(&rows).unwrap()
    }

    #[test]
    fn even_prediction_matches_spectral_route_at_long_horizon() {
        // antipodal clusters: normalized prediction vs normalized spectral
        // output to 1e-6 once the second shell has fully decayed (t = 10^4)
        let c = initial_cloud(50, 2, 1).unwrap();
        let model = AsymptoticModel::coefficients_even(&c).unwrap();
        let t = 10_000u64;
        let state = evolve_closed_form(&c, t).unwrap();
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|l| {
                let p = model.predict_even(l, t).unwrap();
                // per-point magnitude with the common 2^t growth divided out
                let w = (p.log_scale - t as f64 * 2.0f64.ln()).exp();
                p.direction.iter().map(|x| x * w).collect()
            })
            .collect();
        let pred = PointCloud::from_rows(&rows).unwrap().normalized().unwrap();
        for (a, b) in pred.cloud().coords().iter().zip(state.cloud().coords()) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn odd_prediction_matches_spectral_route_at_long_horizon() {
        // per-point error below 1e-4 once the second shell has decayed
        let c = initial_cloud(51, 2, 1).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let t = 3000u64;
        let state = evolve_closed_form(&c, t).unwrap();
        let rows: Vec<Vec<f64>> = (0..51)
            .map(|l| {
                let p = model.predict_odd(l, t).unwrap();
                // per-point magnitude with the common r^t growth divided out
                let w = (p.log_scale - t as f64 * model.rate.ln()).exp();
                p.direction.iter().map(|x| x * w).collect()
            })
            .collect();
        let pred = PointCloud::from_rows(&rows).unwrap().normalized().unwrap();
        for l in 0..51 {
            let dx = pred.cloud().coord(l, 0) - state.cloud().coord(l, 0);
            let dy = pred.cloud().coord(l, 1) - state.cloud().coord(l, 1);
            let err = (dx * dx + dy * dy).sqrt();
            assert!(err <= 1e-4, "point {l}: err {err}");
        }
    }

    #[test]
    fn odd_coefficients_match_least_squares_fit() {
        // fit the dominant oscillating mode to the evolved cloud at t = 400;
        // the fit recovers the model coefficients because the other Fourier
        // modes are orthogonal to the dominant basis over the labels
        let c = initial_cloud(51, 2, 5).unwrap();
        let model = AsymptoticModel::coefficients_odd(&c).unwrap();
        let DominantCoefficients::Oscillatory { pairs } = &model.dominant else {
            unreachable!()
        };
        let t = 400u64;
        let state = evolve_closed_form(&c, t).unwrap();
        let scale = (state.logmag() - t as f64 * model.rate.ln()).exp();
        let n = 51usize;
        // least squares on basis f1 = (-1)^(l+t) cos(phi), f2 = (-1)^(l+t) sin(phi)
        let mut g11 = 0.0;
        let mut g12 = 0.0;
        let mut g22 = 0.0;
        let mut rhs = [[0.0f64; 2]; 2];
        for l in 0..n {
            let phi = PI * (l as f64 + t as f64 / 2.0) / n as f64;
            let s = parity_sign(l, t);
            let (f1, f2) = (s * phi.cos(), s * phi.sin());
            g11 += f1 * f1;
            g12 += f1 * f2;
            g22 += f2 * f2;
            for (a, acc) in rhs.iter_mut().enumerate() {
                // undo the r^t growth so the fit is O(1)
                let y = state.cloud().coord(l, a) * scale;
                acc[0] += f1 * y;
                acc[1] += f2 * y;
            }
        }
        let det = g11 * g22 - g12 * g12;
        for a in 0..2 {
            let fit_cos = (g22 * rhs[a][0] - g12 * rhs[a][1]) / det;
            let fit_sin = (g11 * rhs[a][1] - g12 * rhs[a][0]) / det;
            assert_relative_eq!(fit_cos, pairs[a][0], max_relative = 1e-6);
            assert_relative_eq!(fit_sin, pairs[a][1], max_relative = 1e-6);
        }
    }
}
