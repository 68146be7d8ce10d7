//! Seeded runs, check suites, and the CSV/JSON files they are written to.
//!
//! Everything here is a pure function of its inputs and seeds, so emitted
//! files are reproducible byte for byte. Floats in CSV use 17 significant
//! digits, which round-trips every double exactly.

use crate::analysis::{
    AnalysisError, ContainmentTracker, Counting, EscapeRecord, Segmenter, Stall, StallDetector,
    TheoryReport,
};
use crate::landscape::{DerivedConstants, Landscape, LandscapeError, LandscapeParams, Point};
use crate::optimizer::{
    init_sample, run, GdConfig, NoiseConfig, OptimizerError, Outcome, Trajectory,
};
use crate::verification::{
    global_min_check, gradient_check, lipschitz_probe, seam_scan, stationary_check, CheckReport,
    LipschitzReport, SeamReport, StationaryReport, VerificationError,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_HEADER: [&str; 8] = [
    "iter",
    "x1",
    "x2",
    "f",
    "grad_norm",
    "region_kind",
    "region_index",
    "event",
];

pub const SWEEP_HEADER: [&str; 9] = [
    "L",
    "gamma",
    "tau",
    "n_saddles",
    "seed",
    "algo",
    "outcome",
    "total_iters",
    "growth_ratio",
];

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Verification(#[from] VerificationError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Gd,
    Sgd,
}

impl Algo {
    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Gd => "gd",
            Algo::Sgd => "sgd",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gd" => Ok(Algo::Gd),
            "sgd" => Ok(Algo::Sgd),
            _ => Err(format!("unknown algorithm {s:?} (expected gd or sgd)")),
        }
    }
}

/// Seed of the noise stream for run seed `seed`; kept apart from the
/// initialization stream.
pub fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Float formatting used in every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// One seeded run with its streamed analysis.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub seed: u64,
    pub algo: Algo,
    pub start: Point,
    pub trajectory: Trajectory,
    pub records: std::result::Result<Vec<EscapeRecord>, AnalysisError>,
    pub theory: TheoryReport,
    /// Only looked for in plain runs.
    pub stall: Option<Stall>,
}

impl RunResult {
    /// Steps taken.
    pub fn total_iters(&self) -> u64 {
        self.trajectory.last_t
    }

    pub fn reached_minimum(&self) -> bool {
        self.trajectory.outcome == Outcome::ReachedMinimum
    }

    pub fn growth_ratio(&self) -> Option<f64> {
        self.theory.growth.as_ref().map(|g| g.growth_ratio)
    }
}

/// Draws the start from the initialization band with `seed` and runs plain
/// or noisy descent. Segmentation, containment, and stall detection see
/// every iterate even when the stored trajectory is thinned.
pub fn run_seeded(
    landscape: &Landscape,
    config: &GdConfig,
    algo: Algo,
    noise_variance: f64,
    seed: u64,
) -> Result<RunResult> {
    let start = init_sample(landscape, &mut ChaCha8Rng::seed_from_u64(seed));
    let noise = match algo {
        Algo::Gd => None,
        Algo::Sgd => Some(NoiseConfig::new(noise_variance, noise_seed(seed))),
    };
    let noisy = noise.is_some_and(|n| n.variance > 0.0);
    let mode = if noisy {
        Counting::FirstPassage
    } else {
        Counting::Strict
    };
    let mut seg = Segmenter::new(landscape.n_blocks(), mode);
    let mut containment = ContainmentTracker::default();
    let mut stall = (!noisy).then(|| StallDetector::new(landscape));
    let trajectory = run(landscape, config, noise.as_ref(), start, &mut |it| {
        seg.observe(it);
        containment.observe(it);
        if let Some(s) = stall.as_mut() {
            s.observe(it);
        }
    })?;
    let records = seg.finish();
    let theory = TheoryReport::build(
        landscape.params(),
        config.eta,
        noisy,
        records.as_deref().unwrap_or(&[]),
        containment.result(noisy),
    );
    Ok(RunResult {
        seed,
        algo,
        start,
        trajectory,
        records,
        theory,
        stall: stall.and_then(|s| s.stall()),
    })
}

/// Writes the stored iterates of a trajectory.
pub fn write_trajectory_csv<W: Write>(out: W, trajectory: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for it in &trajectory.iterates {
        w.write_record([
            it.t.to_string(),
            fmt_f64(it.position.x1),
            fmt_f64(it.position.x2),
            fmt_f64(it.f_value),
            fmt_f64(it.grad_norm),
            it.region.kind.as_str().to_string(),
            it.region.index.map_or_else(String::new, |i| i.to_string()),
            it.event.map_or("", |e| e.as_str()).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A trajectory CSV row read back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub iter: u64,
    pub x1: f64,
    pub x2: f64,
    pub f: f64,
    pub grad_norm: f64,
    pub region_kind: String,
    pub region_index: Option<usize>,
    pub event: Option<String>,
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != TRAJECTORY_HEADER {
        return Err(ExperimentError::Malformed(format!(
            "unexpected trajectory header {header:?}"
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub algo: Algo,
    pub start: Point,
    pub outcome: Outcome,
    pub total_iters: u64,
    pub records: Vec<EscapeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation_error: Option<String>,
    pub theory: TheoryReport,
    pub theory_passed: bool,
    pub stall: Option<Stall>,
    /// File name of the trajectory CSV, relative to the summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_file: Option<String>,
    /// Left out unless asked for, since it breaks reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunSummary {
    pub fn from_result(r: &RunResult) -> Self {
        let (records, segmentation_error) = match &r.records {
            Ok(v) => (v.clone(), None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        Self {
            seed: r.seed,
            algo: r.algo,
            start: r.start,
            outcome: r.trajectory.outcome,
            total_iters: r.total_iters(),
            records,
            segmentation_error,
            theory_passed: r.theory.passed(),
            theory: r.theory.clone(),
            stall: r.stall,
            trajectory_file: None,
            wall_time_s: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub params: LandscapeParams,
    pub n_blocks: usize,
    pub constants: DerivedConstants,
    pub config: GdConfig,
    pub noise_variance: Option<f64>,
    pub runs: Vec<RunSummary>,
}

impl Summary {
    pub fn new(
        landscape: &Landscape,
        config: &GdConfig,
        noise_variance: Option<f64>,
        runs: Vec<RunSummary>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            params: *landscape.params(),
            n_blocks: landscape.n_blocks(),
            constants: *landscape.constants(),
            config: *config,
            noise_variance,
            runs,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: LandscapeParams,
    pub seed: u64,
    pub algo: Algo,
    pub outcome: Outcome,
    pub total_iters: u64,
    pub growth_ratio: Option<f64>,
}

impl SweepRow {
    pub fn from_result(params: &LandscapeParams, r: &RunResult) -> Self {
        Self {
            params: *params,
            seed: r.seed,
            algo: r.algo,
            outcome: r.trajectory.outcome,
            total_iters: r.total_iters(),
            growth_ratio: r.growth_ratio(),
        }
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            fmt_f64(r.params.l),
            fmt_f64(r.params.gamma),
            fmt_f64(r.params.tau),
            r.params.n_saddles.to_string(),
            r.seed.to_string(),
            r.algo.as_str().to_string(),
            r.outcome.as_str().to_string(),
            r.total_iters.to_string(),
            r.growth_ratio.map_or_else(String::new, fmt_f64),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Sample counts and tolerances for [`run_checks`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSettings {
    pub gradient_samples: usize,
    /// Finite-difference step as a fraction of `τ`.
    pub fd_step: f64,
    pub gradient_tol: f64,
    pub seam_samples: usize,
    pub seam_value_tol: f64,
    pub seam_gradient_tol: f64,
    pub global_min_points: usize,
    pub lipschitz_pairs: usize,
    pub seed: u64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            gradient_samples: 10_000,
            fd_step: 1e-5,
            gradient_tol: 1e-6,
            seam_samples: 1000,
            seam_value_tol: 1e-9,
            seam_gradient_tol: 1e-5,
            global_min_points: 1_000_000,
            lipschitz_pairs: 10_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSuite {
    pub schema_version: u32,
    pub params: LandscapeParams,
    pub settings: CheckSettings,
    pub gradient: CheckReport,
    pub seams: SeamReport,
    pub stationary: StationaryReport,
    pub global_min: CheckReport,
    pub lipschitz: LipschitzReport,
    pub lipschitz_passed: bool,
    pub passed: bool,
}

pub fn run_checks(landscape: &Landscape, settings: &CheckSettings) -> Result<CheckSuite> {
    let s = settings;
    let h = s.fd_step * landscape.tau();
    let gradient = gradient_check(
        landscape,
        landscape,
        s.gradient_samples,
        h,
        s.gradient_tol,
        s.seed,
    )?;
    let seams = seam_scan(
        landscape,
        landscape,
        s.seam_samples,
        s.seam_value_tol,
        s.seam_gradient_tol,
        s.seed,
    )?;
    let stationary = stationary_check(landscape, landscape)?;
    let global_min = global_min_check(landscape, landscape, s.global_min_points, s.seed)?;
    let lipschitz = lipschitz_probe(landscape, landscape, s.lipschitz_pairs, s.seed)?;
    let lipschitz_passed = lipschitz.estimate <= lipschitz.bound;
    let passed = gradient.passed
        && seams.passed()
        && stationary.check.passed
        && global_min.passed
        && lipschitz_passed;
    Ok(CheckSuite {
        schema_version: SCHEMA_VERSION,
        params: *landscape.params(),
        settings: *settings,
        gradient,
        seams,
        stationary,
        global_min,
        lipschitz,
        lipschitz_passed,
        passed,
    })
}

/// `iter,f` series.
pub fn write_f_series<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "f"])?;
    for r in rows {
        w.write_record([r.iter.to_string(), fmt_f64(r.f)])?;
    }
    w.flush()?;
    Ok(())
}

/// `iter,x1,x2` escape path.
pub fn write_path_series<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iter", "x1", "x2"])?;
    for r in rows {
        w.write_record([r.iter.to_string(), fmt_f64(r.x1), fmt_f64(r.x2)])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-block residence bars for every run of a summary.
pub fn write_t_bars<W: Write>(out: W, summary: &Summary) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algo", "seed", "block", "t", "t_prime", "completed"])?;
    for run in &summary.runs {
        for r in &run.records {
            w.write_record([
                run.algo.as_str().to_string(),
                run.seed.to_string(),
                r.index.to_string(),
                r.t.to_string(),
                r.t_prime.to_string(),
                r.completed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
