//! Seeded experiment runner: random initial clouds, evolution snapshots with
//! cross-route validation, diagnostics, and export of trajectories and plots.

mod export;
mod rng;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    ellipse_residual, parity_separation, AsymptoticModel, Parity, ParitySeparation,
};
use crate::cloud::{PointCloud, ScaledState};
use crate::error::{Error, Result};
use crate::evolve::{evolve_binomial, BINOMIAL_MAX_STEPS};
use crate::spectral::evolve_closed_form;

pub use rng::SplitMix64;

/// Relative tolerance for cross-route agreement at every snapshot.
pub const ROUTE_TOLERANCE: f64 = 1e-9;

/// Evaluation routes for the evolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Iterative,
    Binomial,
    Spectral,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::Iterative => write!(f, "iterative"),
            Route::Binomial => write!(f, "binomial"),
            Route::Spectral => write!(f, "spectral"),
        }
    }
}

impl FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "iterative" => Ok(Route::Iterative),
            "binomial" => Ok(Route::Binomial),
            "spectral" => Ok(Route::Spectral),
            other => Err(format!(
                "unknown route '{other}' (expected iterative, binomial or spectral)"
            )),
        }
    }
}

/// Initial coordinate distribution. Only the symmetric uniform cube is
/// supported; the field exists so exports state it explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Independent uniform draws from `[-1, 1)` per coordinate.
    #[default]
    UniformSymmetric,
}

/// A file the runner should produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExportTarget {
    Csv { path: PathBuf },
    Json { path: PathBuf },
    Svg { path: PathBuf, t: u64 },
}

/// Everything needed to reproduce one experiment bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub d: usize,
    pub steps: u64,
    pub snapshot_stride: u64,
    pub seed: u64,
    pub distribution: Distribution,
    pub routes: Vec<Route>,
    pub outputs: Vec<ExportTarget>,
}

impl RunConfig {
    /// A minimal config: spectral route, snapshots only at t = 0 and t = steps.
    pub fn new(n: usize, d: usize, steps: u64, seed: u64) -> Self {
        Self {
            n,
            d,
            steps,
            snapshot_stride: steps.max(1),
            seed,
            distribution: Distribution::UniformSymmetric,
            routes: vec![Route::Spectral],
            outputs: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.d == 0 {
            return Err(Error::InvalidConfig("dimension must be at least 1".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig(
                "snapshot stride must be at least 1".into(),
            ));
        }
        if self.routes.is_empty() {
            return Err(Error::InvalidConfig("at least one route required".into()));
        }
        if self.routes.contains(&Route::Binomial) && self.steps > BINOMIAL_MAX_STEPS {
            return Err(Error::InvalidConfig(format!(
                "binomial route supports at most {BINOMIAL_MAX_STEPS} steps, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    fn route_enabled(&self, route: Route) -> bool {
        self.routes.contains(&route)
    }

    /// Snapshot times: every multiple of the stride, plus t = 0 and t = steps.
    fn snapshot_times(&self) -> Vec<u64> {
        let mut times = vec![0];
        let mut t = self.snapshot_stride;
        while t < self.steps {
            times.push(t);
            t += self.snapshot_stride;
        }
        times.push(self.steps);
        times
    }
}

/// One recorded state: normalized coordinates plus the log magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: u64,
    /// Row-major n x d coordinates of the unit-norm cloud.
    pub coords: Vec<f64>,
    pub logmag: f64,
}

/// Diagnostics attached to one snapshot; fields stay `null` where the metric
/// does not apply (wrong parity, wrong dimension, first snapshot, degenerate
/// state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDiagnostics {
    pub t: u64,
    /// Per-step log growth since the previous snapshot.
    pub growth_rate: Option<f64>,
    /// Odd n, d = 2: RMS deviation from the predicted limiting ellipse.
    pub ellipse_residual: Option<f64>,
    /// Even n: cluster geometry on the cloud rescaled to Frobenius norm
    /// sqrt(n), where the asymptotic clusters sit at distance 1 from the
    /// origin and the centroid gap tends to 2.
    pub parity: Option<ParitySeparation>,
}

/// Full experiment output: configuration, model, trajectory and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: String,
    pub config: RunConfig,
    pub model: AsymptoticModel,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<SnapshotDiagnostics>,
    /// Largest cross-route deviation observed at any snapshot.
    pub max_route_discrepancy: f64,
}

/// Draws the initial cloud for a seed: `n * d` symmetric uniform coordinates
/// in point-major order.
pub fn initial_cloud(n: usize, d: usize, seed: u64) -> Result<PointCloud> {
    let mut rng = SplitMix64::new(seed);
    let coords: Vec<f64> = (0..n * d).map(|_| rng.next_symmetric()).collect();
    PointCloud::new(n, d, coords, 0)
}

/// Runs one seeded experiment. Deterministic: the same config yields a
/// bit-identical record. Every snapshot is cross-checked across the enabled
/// routes at [`ROUTE_TOLERANCE`]; disagreement is a bug in the evolution and
/// is surfaced as [`Error::RouteMismatch`].
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let initial = initial_cloud(config.n, config.d, config.seed)?;
    let model = AsymptoticModel::for_cloud(&initial);
    let times = config.snapshot_times();

    let mut iterative_state = config
        .route_enabled(Route::Iterative)
        .then(|| ScaledState::from_cloud(&initial));
    let mut last_time = 0u64;

    let mut snapshots = Vec::with_capacity(times.len());
    let mut diagnostics = Vec::with_capacity(times.len());
    let mut max_discrepancy = 0.0f64;
    let mut previous: Option<(u64, f64, bool)> = None; // (t, logmag, degenerate)

    for &t in &times {
        let mut states: Vec<ScaledState> = Vec::new();
        if config.route_enabled(Route::Spectral) {
            states.push(evolve_closed_form(&initial, t)?);
        }
        if let Some(prev) = iterative_state.take() {
            let next = prev.advanced(t - last_time);
            states.push(next.clone());
            iterative_state = Some(next);
        }
        if config.route_enabled(Route::Binomial) {
            states.push(ScaledState::from_cloud(&evolve_binomial(&initial, t)?));
        }
        last_time = t;

        for i in 1..states.len() {
            let dev = route_deviation(&states[0], &states[i]);
            if dev > ROUTE_TOLERANCE {
                return Err(Error::RouteMismatch {
                    t,
                    deviation: dev,
                    tolerance: ROUTE_TOLERANCE,
                });
            }
            max_discrepancy = max_discrepancy.max(dev);
        }

        let state = &states[0];
        snapshots.push(Snapshot {
            t,
            coords: state.cloud().coords().to_vec(),
            logmag: state.logmag(),
        });
        diagnostics.push(diagnose(state, &model, previous)?);
        previous = Some((t, state.logmag(), state.is_degenerate()));
    }

    Ok(RunRecord {
        schema_version: "1".to_string(),
        config: config.clone(),
        model,
        snapshots,
        diagnostics,
        max_route_discrepancy: max_discrepancy,
    })
}

fn diagnose(
    state: &ScaledState,
    model: &AsymptoticModel,
    previous: Option<(u64, f64, bool)>,
) -> Result<SnapshotDiagnostics> {
    let cloud = state.cloud();
    let t = cloud.time();
    let growth = match previous {
        Some((t0, logmag0, false)) if !state.is_degenerate() && t > t0 => {
            Some((state.logmag() - logmag0) / (t - t0) as f64)
        }
        _ => None,
    };
    let mut ellipse = None;
    let mut parity = None;
    if !state.is_degenerate() {
        if model.parity == Parity::Odd && cloud.dim() == 2 && !model.degenerate {
            ellipse = Some(ellipse_residual(state, &model.ellipse_of(t)?)?);
        }
        if model.parity == Parity::Even {
            let scaled = cloud.rescaled((cloud.n() as f64).sqrt());
            parity = Some(parity_separation(&scaled)?);
        }
    }
    Ok(SnapshotDiagnostics {
        t,
        growth_rate: growth,
        ellipse_residual: ellipse,
        parity,
    })
}

/// First-order relative deviation between two scaled states: Frobenius
/// distance of the unit clouds plus the log-magnitude difference.
fn route_deviation(a: &ScaledState, b: &ScaledState) -> f64 {
    match (a.is_degenerate(), b.is_degenerate()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        (false, false) => {
            let shape: f64 = a
                .cloud()
                .coords()
                .iter()
                .zip(b.cloud().coords())
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            shape + (a.logmag() - b.logmag()).abs()
        }
    }
}

impl RunRecord {
    pub fn snapshot_at(&self, t: u64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.t == t)
    }

    /// Writes `t,label,axis0..axis{d-1},logmag` rows, one per point per
    /// snapshot, with 17-significant-digit decimals and LF line endings.
    pub fn export_csv(&self, path: &Path) -> Result<()> {
        export::write_csv(self, path)
    }

    /// Writes the whole record as one JSON document (schema version "1",
    /// stable key order, 17-significant-digit decimals).
    pub fn export_json(&self, path: &Path) -> Result<()> {
        export::write_json(self, path)
    }

    pub fn to_json_string(&self) -> Result<String> {
        export::to_json_string(self)
    }

    pub fn from_json_str(s: &str) -> Result<RunRecord> {
        serde_json::from_str(s).map_err(|e| Error::JsonDecode(e.to_string()))
    }

    /// Scatter plot of the snapshot at `t`: even/odd labels in two colors,
    /// one cyclic polyline per parity class, predicted ellipse overlaid for
    /// odd n.
    pub fn emit_svg(&self, t: u64, path: &Path) -> Result<()> {
        svg::write_svg(self, t, path)
    }

    /// Writes every target listed in the config.
    pub fn write_outputs(&self) -> Result<()> {
        for target in &self.config.outputs {
            match target {
                ExportTarget::Csv { path } => self.export_csv(path)?,
                ExportTarget::Json { path } => self.export_json(path)?,
                ExportTarget::Svg { path, t } => self.emit_svg(*t, path)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn initial_cloud_is_seed_deterministic() {
        let a = initial_cloud(10, 2, 99).unwrap();
        let b = initial_cloud(10, 2, 99).unwrap();
        assert_eq!(a, b);
        let c = initial_cloud(10, 2, 100).unwrap();
        assert_ne!(a, c);
        assert!(a.coords().iter().all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn zero_steps_config_is_rejected() {
        let config = RunConfig::new(8, 2, 0, 1);
        assert!(matches!(run(&config), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn binomial_route_cap_is_enforced() {
        let mut config = RunConfig::new(8, 2, 70, 1);
        config.routes = vec![Route::Binomial];
        assert!(matches!(config.validate(), Err(Error::InvalidConfig(_))));
        config.steps = 60;
        config.snapshot_stride = 60;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn snapshot_times_cover_stride_and_endpoints() {
        let mut config = RunConfig::new(8, 2, 10, 1);
        config.snapshot_stride = 4;
        assert_eq!(config.snapshot_times(), vec![0, 4, 8, 10]);
        config.snapshot_stride = 5;
        assert_eq!(config.snapshot_times(), vec![0, 5, 10]);
    }

    #[test]
    fn run_is_deterministic() {
        let mut config = RunConfig::new(12, 2, 40, 7);
        config.snapshot_stride = 10;
        config.routes = vec![Route::Spectral, Route::Iterative, Route::Binomial];
        let a = run(&config).unwrap();
        let b = run(&config).unwrap();
        assert_eq!(a, b);
        assert!(a.max_route_discrepancy <= ROUTE_TOLERANCE);
        assert_eq!(a.snapshots.len(), 5);
        assert_eq!(a.diagnostics.len(), 5);
        assert!(a.diagnostics[0].growth_rate.is_none());
        assert!(a.diagnostics[1].growth_rate.is_some());
    }

    #[test]
    fn cross_route_agreement_on_longer_run() {
        let mut config = RunConfig::new(17, 3, 400, 3);
        config.snapshot_stride = 100;
        config.routes = vec![Route::Spectral, Route::Iterative];
        let record = run(&config).unwrap();
        assert!(record.max_route_discrepancy <= ROUTE_TOLERANCE);
    }

    #[test]
    fn even_run_gap_opens_early() {
        // the two parity loops separate well before the clusters tighten
        for seed in [1u64, 2] {
            let mut config = RunConfig::new(50, 2, 300, seed);
            config.snapshot_stride = 300;
            let record = run(&config).unwrap();
            let sep = record.diagnostics[1].parity.expect("even-n diagnostics");
            assert!(sep.gap > 1.0, "seed {seed}: gap {}", sep.gap);
        }
    }

    #[test]
    fn batches_replay_from_their_master_seed() {
        // a batch of runs derived from one master seed is reproducible, the
        // runs share no state, and order of evaluation does not matter
        let batch = |master: u64| -> Vec<RunRecord> {
            let mut rng = SplitMix64::new(master);
            let seeds: Vec<u64> = (0..20).map(|_| rng.next_u64()).collect();
            seeds
                .iter()
                .map(|&seed| {
                    let mut config = RunConfig::new(50, 2, 300, seed);
                    config.snapshot_stride = 300;
                    run(&config).unwrap()
                })
                .collect()
        };
        let first = batch(42);
        let replay = batch(42);
        assert_eq!(first, replay);

        // parallel evaluation of the same batch gives identical records
        let mut rng = SplitMix64::new(42);
        let seeds: Vec<u64> = (0..20).map(|_| rng.next_u64()).collect();
        let handles: Vec<_> = seeds
            .into_iter()
            .map(|seed| {
                std::thread::spawn(move || {
                    let mut config = RunConfig::new(50, 2, 300, seed);
                    config.snapshot_stride = 300;
                    run(&config).unwrap()
                })
            })
            .collect();
        for (handle, want) in handles.into_iter().zip(&first) {
            assert_eq!(&handle.join().unwrap(), want);
        }
    }

    #[test]
    fn odd_run_records_ellipse_residuals() {
        let mut config = RunConfig::new(51, 2, 300, 1);
        config.snapshot_stride = 150;
        let record = run(&config).unwrap();
        for diag in &record.diagnostics[1..] {
            assert!(diag.ellipse_residual.is_some());
            assert!(diag.parity.is_none());
        }
        let growth = record.diagnostics[2].growth_rate.unwrap();
        assert_relative_eq!(
            growth,
            crate::asymptotics::dominant_rate(51).ln(),
            max_relative = 1e-2
        );
    }
}
