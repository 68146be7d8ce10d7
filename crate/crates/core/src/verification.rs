//! Numerical oracles for the landscape: finite-difference gradients, seam
//! scans, stationary-point probes and a Lipschitz probe.
//!
//! The checks evaluate through [`Objective`], so any surface with the same
//! geometry can be certified (tests use this to confirm the checks catch
//! deliberately broken surfaces).

use crate::landscape::{Landscape, LandscapeError, LocalPoint, Objective, Point, RegionKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerificationError {
    #[error("finite-difference step must be positive and finite (got {0})")]
    BadStep(f64),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
}

/// Outcome of one numerical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub worst_error: f64,
    pub threshold: f64,
    pub passed: bool,
    /// Points with the largest errors, worst first.
    pub witnesses: Vec<Point>,
}

const MAX_WITNESSES: usize = 5;

/// Running maximum that keeps the few worst points.
struct Worst {
    entries: Vec<(f64, Point)>,
    samples: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            entries: Vec::new(),
            samples: 0,
        }
    }

    fn push(&mut self, err: f64, p: Point) {
        self.samples += 1;
        // NaN counts as the worst possible error.
        let err = if err.is_nan() { f64::INFINITY } else { err };
        if self.entries.len() < MAX_WITNESSES || err > self.entries[self.entries.len() - 1].0 {
            let pos = self.entries.partition_point(|(e, _)| *e >= err);
            self.entries.insert(pos, (err, p));
            self.entries.truncate(MAX_WITNESSES);
        }
    }

    fn finish(self, name: &str, threshold: f64) -> CheckReport {
        let worst_error = self.entries.first().map_or(0.0, |e| e.0);
        CheckReport {
            name: name.to_string(),
            samples: self.samples,
            worst_error,
            threshold,
            passed: worst_error <= threshold,
            witnesses: self.entries.into_iter().map(|(_, p)| p).collect(),
        }
    }
}

/// Central differences `(f(p + h·eᵢ) − f(p − h·eᵢ)) / 2h`.
pub fn fd_gradient<O: Objective + ?Sized>(
    objective: &O,
    p: Point,
    h: f64,
) -> Result<[f64; 2], VerificationError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(VerificationError::BadStep(h));
    }
    let dx = (objective.value(Point::new(p.x1 + h, p.x2))?
        - objective.value(Point::new(p.x1 - h, p.x2))?)
        / (2.0 * h);
    let dy = (objective.value(Point::new(p.x1, p.x2 + h))?
        - objective.value(Point::new(p.x1, p.x2 - h))?)
        / (2.0 * h);
    Ok([dx, dy])
}

fn gradient_scale(landscape: &Landscape, g: [f64; 2]) -> f64 {
    g[0].hypot(g[1]).max(landscape.params().l * landscape.tau())
}

/// Uniform point of `D`, as a local point.
pub fn sample_local<R: Rng + ?Sized>(landscape: &Landscape, rng: &mut R) -> LocalPoint {
    let half = 0.5 * landscape.tau();
    let order = rng.random_range(0..landscape.n_regions());
    LocalPoint {
        order,
        offset: [
            rng.random_range(-half..=half),
            rng.random_range(-half..=half),
        ],
    }
}

/// Compares the analytic gradient with central differences at `n_samples`
/// uniform points that keep more than `10·h` away from every seam. The
/// error is `‖fd − ∇f‖∞ / max(‖∇f‖, L·τ)`.
pub fn gradient_check<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
    n_samples: usize,
    h: f64,
    tol: f64,
    seed: u64,
) -> Result<CheckReport, VerificationError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(VerificationError::BadStep(h));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 0.5 * landscape.tau();
    let margin = 10.0 * h;
    let mut worst = Worst::new();
    while worst.samples < n_samples {
        let lp = sample_local(landscape, &mut rng);
        let near_seam = lp
            .offset
            .iter()
            .any(|o| o.abs() <= margin || o.abs() >= half - margin);
        if near_seam {
            continue;
        }
        let p = landscape.absolute(&lp);
        let g = objective.gradient(p)?;
        let fd = fd_gradient(objective, p, h)?;
        let err = (fd[0] - g[0]).abs().max((fd[1] - g[1]).abs()) / gradient_scale(landscape, g);
        worst.push(err, p);
    }
    Ok(worst.finish("gradient_check", tol))
}

/// A line across which the piecewise definition changes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seam {
    /// Axis normal to the seam (0 = x₁, 1 = x₂).
    pub normal: usize,
    /// Coordinate of the seam along `normal`.
    pub at: f64,
    /// Extent along the other axis.
    pub span: (f64, f64),
    pub kind: SeamKind,
    /// Chain order of the region on the low side of the seam.
    pub order: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeamKind {
    /// Escape/wrong-side split through a block center.
    BlockBranch,
    /// Split along a buffer's center line.
    BufferBranch,
    /// Edge shared by consecutive regions.
    RegionEdge,
}

/// Every interior seam of the landscape.
pub fn seams(landscape: &Landscape) -> Vec<Seam> {
    let mut out = Vec::new();
    for order in 0..landscape.n_regions() {
        let b = landscape.bounds(order);
        let c = landscape.center(order);
        let along = if order % 4 < 2 { 0 } else { 1 };
        let span = |axis: usize| {
            if axis == 0 {
                (b.x1_min, b.x1_max)
            } else {
                (b.x2_min, b.x2_max)
            }
        };
        let coord = |p: Point, axis: usize| if axis == 0 { p.x1 } else { p.x2 };
        if order != landscape.final_order() {
            let (normal, kind) = if order % 2 == 0 {
                (along, SeamKind::BlockBranch)
            } else {
                (1 - along, SeamKind::BufferBranch)
            };
            out.push(Seam {
                normal,
                at: coord(c, normal),
                span: span(1 - normal),
                kind,
                order,
            });
            out.push(Seam {
                normal: along,
                at: span(along).1,
                span: span(1 - along),
                kind: SeamKind::RegionEdge,
                order,
            });
        }
    }
    out
}

/// Value and gradient continuity reports from [`seam_scan`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeamReport {
    pub value: CheckReport,
    pub gradient: CheckReport,
    pub seams: usize,
}

impl SeamReport {
    pub fn passed(&self) -> bool {
        self.value.passed && self.gradient.passed
    }
}

/// Samples every seam and measures how far the two sides disagree.
///
/// Sample points sit at `±1e−7·τ` along the seam normal. The value jump is
/// the gap between the first-order extrapolations of each side to the seam,
/// relative to `max(1, |f|)`. The gradient jump is the largest of the
/// analytic gradient difference across the seam and the disagreement of
/// finite differences (across and along the seam) with either side,
/// relative to `max(‖∇f‖, L·τ)`.
pub fn seam_scan<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
    samples_per_seam: usize,
    tol_value: f64,
    tol_grad: f64,
    seed: u64,
) -> Result<SeamReport, VerificationError> {
    let tau = landscape.tau();
    let h = 1e-7 * tau;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = seams(landscape);
    let mut value = Worst::new();
    let mut gradient = Worst::new();
    let at = |seam: &Seam, s: f64, t: f64| {
        if seam.normal == 0 {
            Point::new(s, t)
        } else {
            Point::new(t, s)
        }
    };
    for seam in &all {
        let n = seam.normal;
        let tn = 1 - n;
        for _ in 0..samples_per_seam {
            let t = rng.random_range(seam.span.0 + 2.0 * h..seam.span.1 - 2.0 * h);
            let x0 = at(seam, seam.at, t);
            let lo = at(seam, seam.at - h, t);
            let hi = at(seam, seam.at + h, t);
            let (f_lo, f_hi, f0) = (
                objective.value(lo)?,
                objective.value(hi)?,
                objective.value(x0)?,
            );
            let (g_lo, g_hi, g0) = (
                objective.gradient(lo)?,
                objective.gradient(hi)?,
                objective.gradient(x0)?,
            );
            let from_lo = f_lo + h * g_lo[n];
            let from_hi = f_hi - h * g_hi[n];
            value.push((from_hi - from_lo).abs() / f0.abs().max(1.0), x0);

            let fd_normal = (f_hi - f_lo) / (2.0 * h);
            let fd_tangent = (objective.value(at(seam, seam.at, t + h))?
                - objective.value(at(seam, seam.at, t - h))?)
                / (2.0 * h);
            let mut err: f64 = 0.0;
            for k in 0..2 {
                err = err.max((g_hi[k] - g_lo[k]).abs());
            }
            for g in [g_lo, g_hi] {
                err = err.max((fd_normal - g[n]).abs());
                err = err.max((fd_tangent - g[tn]).abs());
            }
            gradient.push(err / gradient_scale(landscape, g0), x0);
        }
    }
    Ok(SeamReport {
        value: value.finish("seam_value", tol_value),
        gradient: gradient.finish("seam_gradient", tol_grad),
        seams: all.len(),
    })
}

/// Result of probing every block center.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub check: CheckReport,
    pub saddles_confirmed: usize,
    pub minima_confirmed: usize,
}

const CIRCLE_PROBES: usize = 64;

/// Confirms that every saddle block center has an exactly zero gradient and
/// both lower and higher values on a circle of radius `1e−3·τ`, and that
/// the final block center is a strict local minimum.
///
/// The per-center error is `‖∇f(center)‖` plus one when the expected
/// signature is missing; the threshold is zero.
pub fn stationary_check<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
) -> Result<StationaryReport, VerificationError> {
    let r = 1e-3 * landscape.tau();
    let mut worst = Worst::new();
    let (mut saddles, mut minima) = (0, 0);
    for order in (0..landscape.n_regions()).step_by(2) {
        let c = landscape.center(order);
        let fc = objective.value(c)?;
        let g = objective.gradient(c)?;
        let (mut lower, mut higher) = (0, 0);
        for k in 0..CIRCLE_PROBES {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_PROBES as f64;
            let f = objective.value(Point::new(c.x1 + r * theta.cos(), c.x2 + r * theta.sin()))?;
            if f < fc {
                lower += 1;
            } else if f > fc {
                higher += 1;
            }
        }
        let is_final = order == landscape.final_order();
        let signature = if is_final {
            higher == CIRCLE_PROBES
        } else {
            lower > 0 && higher > 0
        };
        let stationary = g == [0.0, 0.0];
        if stationary && signature {
            if is_final {
                minima += 1;
            } else {
                saddles += 1;
            }
        }
        let err = g[0].hypot(g[1]) + if signature { 0.0 } else { 1.0 };
        worst.push(err, c);
    }
    Ok(StationaryReport {
        check: worst.finish("stationary_check", 0.0),
        saddles_confirmed: saddles,
        minima_confirmed: minima,
    })
}

/// Checks that no sampled point of `D` lies below the final block center,
/// and that equality only happens at the center. The error is the amount by
/// which a sample undercuts the minimum (or `1` for a tie away from it).
pub fn global_min_check<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
    n_points: usize,
    seed: u64,
) -> Result<CheckReport, VerificationError> {
    let center = landscape.minimizer();
    let f_min = objective.value(center)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Worst::new();
    for _ in 0..n_points {
        let p = landscape.absolute(&sample_local(landscape, &mut rng));
        let f = objective.value(p)?;
        let err = if f < f_min {
            f_min - f
        } else if f == f_min && p != center {
            1.0
        } else {
            0.0
        };
        worst.push(err, p);
    }
    Ok(worst.finish("global_min_check", 0.0))
}

/// Empirical gradient Lipschitz constant over same-region point pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    pub estimate: f64,
    /// `2·L₂ + 30·(L₂ + γ)·(τ/2)²/τ`.
    pub bound: f64,
    /// Largest ratio seen per region kind.
    pub by_kind: BTreeMap<String, f64>,
    pub witnesses: Vec<Point>,
}

/// Largest `‖∇f(x) − ∇f(y)‖ / ‖x − y‖` over `n_pairs` random pairs that
/// share a region. Coincident pairs are redrawn.
pub fn lipschitz_probe<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
    n_pairs: usize,
    seed: u64,
) -> Result<LipschitzReport, VerificationError> {
    let half = 0.5 * landscape.tau();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_kind: BTreeMap<String, f64> = BTreeMap::new();
    let mut estimate: f64 = 0.0;
    let mut witnesses = Vec::new();
    let mut done = 0;
    while done < n_pairs {
        let a = sample_local(landscape, &mut rng);
        let b = LocalPoint {
            order: a.order,
            offset: [
                rng.random_range(-half..=half),
                rng.random_range(-half..=half),
            ],
        };
        let (pa, pb) = (landscape.absolute(&a), landscape.absolute(&b));
        let d = pa.distance(&pb);
        if d == 0.0 {
            continue;
        }
        done += 1;
        let (ga, gb) = (objective.gradient(pa)?, objective.gradient(pb)?);
        let ratio = (ga[0] - gb[0]).hypot(ga[1] - gb[1]) / d;
        let kind = landscape.region(a.order).kind;
        let slot = by_kind.entry(kind.to_string()).or_insert(0.0);
        *slot = slot.max(ratio);
        if ratio > estimate {
            estimate = ratio;
            witnesses = vec![pa, pb];
        }
    }
    Ok(LipschitzReport {
        pairs: done,
        estimate,
        bound: landscape.lipschitz_bound(),
        by_kind,
        witnesses,
    })
}

/// Lipschitz probe restricted to one region kind.
pub fn lipschitz_probe_kind<O: Objective + ?Sized>(
    landscape: &Landscape,
    objective: &O,
    kind: RegionKind,
    n_pairs: usize,
    seed: u64,
) -> Result<f64, VerificationError> {
    let half = 0.5 * landscape.tau();
    let orders: Vec<usize> = (0..landscape.n_regions())
        .filter(|&o| landscape.region(o).kind == kind)
        .collect();
    if orders.is_empty() {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    let mut done = 0;
    while done < n_pairs {
        let order = orders[rng.random_range(0..orders.len())];
        let mut draw = || LocalPoint {
            order,
            offset: [
                rng.random_range(-half..=half),
                rng.random_range(-half..=half),
            ],
        };
        let (a, b) = (draw(), draw());
        let (pa, pb) = (landscape.absolute(&a), landscape.absolute(&b));
        let d = pa.distance(&pb);
        if d == 0.0 {
            continue;
        }
        done += 1;
        let (ga, gb) = (objective.gradient(pa)?, objective.gradient(pb)?);
        best = best.max((ga[0] - gb[0]).hypot(ga[1] - gb[1]) / d);
    }
    Ok(best)
}
