//! Cross-route equivalence and invariant checks over randomized configs,
//! behind the CLI `verify` subcommand. Each check reports the largest error
//! it observed against its tolerance.

use crate::asymptotics::{AsymptoticModel, DominantCoefficients};
use crate::cloud::{PointCloud, ScaledState};
use crate::error::Result;
use crate::evolve::{evolve_binomial, evolve_iterative, step};
use crate::harness::{initial_cloud, SplitMix64};
use crate::spectral::{dft, eigenvalues, evolve_closed_form, idft, spectral_radius};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Runs the whole suite; all randomness flows from `seed`.
pub fn run_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = SplitMix64::new(seed);
    Ok(vec![
        route_equivalence(&mut rng)?,
        sum_zero(&mut rng)?,
        dft_round_trip(&mut rng)?,
        parseval(&mut rng)?,
        spectral_step_matches_core(&mut rng)?,
        shift_equivariance(&mut rng)?,
        linearity(&mut rng)?,
        spectral_radius_formula(),
        predictor_two_step(&mut rng)?,
        coefficient_projection(&mut rng)?,
    ])
}

fn random_config(rng: &mut SplitMix64) -> (usize, usize, u64) {
    let n = 2 + (rng.next_u64() % 63) as usize;
    let d = 1 + (rng.next_u64() % 3) as usize;
    let seed = rng.next_u64();
    (n, d, seed)
}

/// Deviation between a scaled state and reference raw coordinates, relative
/// to the reference norm.
fn relative_deviation(state: &ScaledState, reference: &[f64]) -> f64 {
    let norm = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return if state.is_degenerate() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let truth = state.true_coords();
    truth
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / norm
}

fn route_equivalence(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..60 {
        let (n, d, seed) = random_config(rng);
        let t = rng.next_u64() % 26;
        let cloud = initial_cloud(n, d, seed)?;
        let reference = evolve_binomial(&cloud, t)?;
        worst = worst.max(relative_deviation(
            &evolve_iterative(&cloud, t),
            reference.coords(),
        ));
        worst = worst.max(relative_deviation(
            &evolve_closed_form(&cloud, t)?,
            reference.coords(),
        ));
    }
    Ok(Check {
        name: "route equivalence (iterative / binomial / spectral)",
        max_error: worst,
        tolerance: 1e-9,
    })
}

fn sum_zero(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let (n, d, seed) = random_config(rng);
        let cloud = initial_cloud(n, d, seed)?;
        let mut cur = step(&cloud);
        for _ in 0..5 {
            let norm = cur.frobenius_norm();
            for s in cur.center_sum() {
                worst = worst.max(s.abs() / norm);
            }
            cur = step(&cur);
        }
    }
    Ok(Check {
        name: "center of mass at origin after one step",
        max_error: worst,
        tolerance: 1e-12,
    })
}

fn dft_round_trip(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let n = 2 + (rng.next_u64() % 127) as usize;
        let cloud = initial_cloud(n, 1, rng.next_u64())?;
        let x = cloud.axis_values(0);
        let back = idft(&dft(&x))?;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (a, b) in back.iter().zip(&x) {
            worst = worst.max((a - b).abs() / norm);
        }
    }
    Ok(Check {
        name: "DFT round trip",
        max_error: worst,
        tolerance: 1e-12,
    })
}

fn parseval(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let n = 2 + (rng.next_u64() % 127) as usize;
        let cloud = initial_cloud(n, 1, rng.next_u64())?;
        let x = cloud.axis_values(0);
        let time_sq: f64 = x.iter().map(|v| v * v).sum();
        let freq_sq: f64 = dft(&x).iter().map(|c| c.norm_sqr()).sum();
        worst = worst.max((time_sq - freq_sq).abs() / time_sq);
    }
    Ok(Check {
        name: "Parseval identity (unitary convention)",
        max_error: worst,
        tolerance: 1e-12,
    })
}

fn spectral_step_matches_core(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let n = 2 + (rng.next_u64() % 127) as usize;
        let cloud = initial_cloud(n, 1, rng.next_u64())?;
        let eig = eigenvalues(n);
        let mut spectrum = dft(&cloud.axis_values(0));
        for (c, l) in spectrum.iter_mut().zip(&eig) {
            *c *= l;
        }
        let via_spectrum = idft(&spectrum)?;
        let direct = step(&cloud);
        let norm = direct.frobenius_norm();
        for (l, v) in via_spectrum.iter().enumerate() {
            worst = worst.max((v - direct.coord(l, 0)).abs() / norm);
        }
    }
    Ok(Check {
        name: "one spectral step equals one core step",
        max_error: worst,
        tolerance: 1e-10,
    })
}

fn shift_equivariance(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let (n, d, seed) = random_config(rng);
        let cloud = initial_cloud(n, d, seed)?;
        let rotate = |c: &PointCloud| {
            let coords = (0..n)
                .flat_map(|l| c.point((l + 1) % n).to_vec())
                .collect::<Vec<_>>();
            PointCloud::new(n, d, coords, c.time()).expect("rotated cloud is valid")
        };
        let a = step(&rotate(&cloud));
        let b = rotate(&step(&cloud));
        let norm = b.frobenius_norm().max(f64::MIN_POSITIVE);
        for (x, y) in a.coords().iter().zip(b.coords()) {
            worst = worst.max((x - y).abs() / norm);
        }
    }
    Ok(Check {
        name: "shift equivariance of the step",
        max_error: worst,
        tolerance: 1e-12,
    })
}

fn linearity(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let (n, d, _) = random_config(rng);
        let x = initial_cloud(n, d, rng.next_u64())?;
        let y = initial_cloud(n, d, rng.next_u64())?;
        let scale = 4.0 * rng.next_symmetric();
        let t = rng.next_u64() % 21;
        let combined = PointCloud::new(
            n,
            d,
            x.coords()
                .iter()
                .zip(y.coords())
                .map(|(a, b)| scale * a + b)
                .collect(),
            0,
        )?;
        let lhs = evolve_iterative(&combined, t).true_coords();
        let ex = evolve_iterative(&x, t).true_coords();
        let ey = evolve_iterative(&y, t).true_coords();
        let norm = lhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        for ((l, a), b) in lhs.iter().zip(&ex).zip(&ey) {
            worst = worst.max((l - (scale * a + b)).abs() / norm);
        }
    }
    Ok(Check {
        name: "linearity of the evolution",
        max_error: worst,
        tolerance: 1e-10,
    })
}

fn spectral_radius_formula() -> Check {
    let mut worst = 0.0f64;
    for n in 2..=200usize {
        let measured = eigenvalues(n)
            .iter()
            .map(|l| l.norm())
            .fold(0.0f64, f64::max);
        worst = worst.max((measured - spectral_radius(n)).abs());
    }
    Check {
        name: "spectral radius: 2 (even n), 2cos(pi/2n) (odd n)",
        max_error: worst,
        tolerance: 1e-12,
    }
}

fn predictor_two_step(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = 3 + 2 * (rng.next_u64() % 30) as usize; // odd
        let cloud = initial_cloud(n, 2, rng.next_u64())?;
        let model = AsymptoticModel::coefficients_odd(&cloud)?;
        let r2log = 2.0 * model.rate.ln();
        for l in 0..n - 1 {
            for t in [0u64, 1, 5, 12] {
                let lhs = model.predict_odd(l, t + 2)?;
                let rhs = model.predict_odd(l + 1, t)?;
                let denom = lhs.log_scale.abs().max(1.0);
                worst = worst.max((lhs.log_scale - (rhs.log_scale + r2log)).abs() / denom);
                for (a, b) in lhs.direction.iter().zip(&rhs.direction) {
                    worst = worst.max((a + b).abs());
                }
            }
        }
    }
    Ok(Check {
        name: "predictor two-step identity",
        max_error: worst,
        tolerance: 1e-10,
    })
}

/// The trigonometric coefficient sums reproduce the DFT projection onto the
/// dominant modes: `cos - i sin = (2/sqrt(n)) x_hat_(n+1)/2` for odd n and
/// `mean = x_hat_(n/2) / sqrt(n)` for even n.
fn coefficient_projection(rng: &mut SplitMix64) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let odd_n = 3 + 2 * (rng.next_u64() % 31) as usize;
        let cloud = initial_cloud(odd_n, 2, rng.next_u64())?;
        let model = AsymptoticModel::coefficients_odd(&cloud)?;
        let DominantCoefficients::Oscillatory { pairs } = &model.dominant else {
            unreachable!()
        };
        let k = odd_n.div_ceil(2);
        for (a, pair) in pairs.iter().enumerate() {
            let spectrum = dft(&cloud.axis_values(a));
            let proj_cos = 2.0 / (odd_n as f64).sqrt() * spectrum[k].re;
            let proj_sin = -2.0 / (odd_n as f64).sqrt() * spectrum[k].im;
            let scale = (pair[0] * pair[0] + pair[1] * pair[1]).sqrt();
            worst = worst.max((pair[0] - proj_cos).abs() / scale);
            worst = worst.max((pair[1] - proj_sin).abs() / scale);
        }

        let even_n = 2 + 2 * (rng.next_u64() % 32) as usize;
        let cloud = initial_cloud(even_n, 2, rng.next_u64())?;
        let model = AsymptoticModel::coefficients_even(&cloud)?;
        let DominantCoefficients::Alternating { means } = &model.dominant else {
            unreachable!()
        };
        for (a, mean) in means.iter().enumerate() {
            let spectrum = dft(&cloud.axis_values(a));
            let proj = spectrum[even_n / 2].re / (even_n as f64).sqrt();
            worst = worst.max((mean - proj).abs() / mean.abs());
        }
    }
    Ok(Check {
        name: "coefficients match DFT projection on dominant modes",
        max_error: worst,
        tolerance: 1e-10,
    })
}
