//! Escape-time bookkeeping and the checks run against measured trajectories.
//!
//! A trajectory is cut into per-block residence counts `tᵢ` (iterates in
//! block `Bᵢ`) and `t′ᵢ` (iterates in the buffer that follows it), with the
//! cumulative first-exit times `Tᵢ = Tᵢ₋₁ + tᵢ + t′ᵢ`. Those counts are then
//! compared against the buffer bound `t′ᵢ ≤ 1/(ηγ)`, the containment
//! property, and the per-saddle recurrence `tₖ₊₁ > (L/γ)·tₖ − 1/(ηγ)`.

use crate::landscape::{travel_axis, Landscape, LandscapeParams, RegionId};
use crate::optimizer::{Event, Iterate, Trajectory};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("iterate {t} moves back from chain position {from} to {to}")]
    Revisit { t: u64, from: usize, to: usize },
    #[error("iterate {t} lies outside the domain")]
    Outside { t: u64 },
    #[error("trajectory is thinned ({recorded} of {total} iterates recorded); segmentation needs every iterate")]
    Thinned { recorded: usize, total: u64 },
    #[error("trajectory is empty")]
    Empty,
    #[error("trajectory was produced on different parameters")]
    ParamsMismatch,
    #[error("L >= 2·gamma is required (got L = {l}, gamma = {gamma})")]
    RatioTooSmall { l: f64, gamma: f64 },
    #[error("need at least {needed} completed saddle records (got {got})")]
    InsufficientData { needed: usize, got: usize },
}

/// Residence counts of one block and its trailing buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeRecord {
    /// 1-based block index.
    pub index: usize,
    pub t: u64,
    /// Iterates in the following buffer; 0 for the final block.
    pub t_prime: u64,
    /// Cumulative count through this block's neighbourhood.
    #[serde(rename = "T")]
    pub cumulative: u64,
    /// The iterates moved on past the neighbourhood.
    pub completed: bool,
}

/// How iterates that move backwards along the chain are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Counting {
    /// Any backward move is an error.
    Strict,
    /// Every iterate is charged to the furthest region reached so far.
    FirstPassage,
}

/// Streaming segmentation; feed it iterates in order.
#[derive(Clone, Debug)]
pub struct Segmenter {
    n_blocks: usize,
    counts: Vec<u64>,
    frontier: Option<usize>,
    mode: Counting,
    error: Option<AnalysisError>,
}

impl Segmenter {
    pub fn new(n_blocks: usize, mode: Counting) -> Self {
        Self {
            n_blocks,
            counts: vec![0; 2 * n_blocks - 1],
            frontier: None,
            mode,
            error: None,
        }
    }

    pub fn push(&mut self, t: u64, region: RegionId) {
        if self.error.is_some() {
            return;
        }
        let Some(order) = region.order else {
            self.error = Some(AnalysisError::Outside { t });
            return;
        };
        let frontier = match self.frontier {
            Some(f) if order < f => match self.mode {
                Counting::Strict => {
                    self.error = Some(AnalysisError::Revisit {
                        t,
                        from: f,
                        to: order,
                    });
                    return;
                }
                Counting::FirstPassage => f,
            },
            _ => order,
        };
        self.frontier = Some(frontier);
        self.counts[frontier] += 1;
    }

    pub fn observe(&mut self, it: &Iterate) {
        self.push(it.t, it.region);
    }

    pub fn finish(&self) -> Result<Vec<EscapeRecord>, AnalysisError> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        let Some(frontier) = self.frontier else {
            return Err(AnalysisError::Empty);
        };
        let mut out = Vec::new();
        let mut cumulative = 0;
        for index in 1..=self.n_blocks {
            let block = 2 * (index - 1);
            if block > frontier {
                break;
            }
            let t = self.counts[block];
            let t_prime = self.counts.get(block + 1).copied().unwrap_or(0);
            cumulative += t + t_prime;
            out.push(EscapeRecord {
                index,
                t,
                t_prime,
                cumulative,
                completed: frontier > block + 1,
            });
        }
        Ok(out)
    }
}

/// Cuts a fully recorded trajectory into escape records. Plain runs must
/// move monotonically along the chain; noisy runs use first-passage
/// counting.
pub fn segment(
    trajectory: &Trajectory,
    params: &LandscapeParams,
) -> Result<Vec<EscapeRecord>, AnalysisError> {
    if trajectory.params != *params {
        return Err(AnalysisError::ParamsMismatch);
    }
    if trajectory.iterates.is_empty() {
        return Err(AnalysisError::Empty);
    }
    if !trajectory.is_complete() {
        return Err(AnalysisError::Thinned {
            recorded: trajectory.iterates.len(),
            total: trajectory.len(),
        });
    }
    let mode = if trajectory.is_noisy() {
        Counting::FirstPassage
    } else {
        Counting::Strict
    };
    let mut seg = Segmenter::new(params.n_blocks(), mode);
    for it in &trajectory.iterates {
        seg.observe(it);
    }
    seg.finish()
}

/// `⌈1/(ηγ)⌉`, the most iterates a plain run may spend in one buffer.
pub fn buffer_bound(eta: f64, gamma: f64) -> u64 {
    // A product a few ulps above an integer must not round the bound up.
    (1.0 / (eta * gamma) - 1e-9).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferResidence {
    pub index: usize,
    pub t_prime: u64,
    /// `bound − t′`; negative when violated.
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Result {
    pub bound: u64,
    pub buffers: Vec<BufferResidence>,
    pub passed: bool,
    /// First buffer over the bound.
    pub witness: Option<usize>,
}

/// Every buffer residence `t′ᵢ` must be at most `⌈1/(ηγ)⌉`.
pub fn check_lemma1(records: &[EscapeRecord], params: &LandscapeParams, eta: f64) -> Lemma1Result {
    let bound = buffer_bound(eta, params.gamma);
    let buffers: Vec<BufferResidence> = records
        .iter()
        .filter(|r| r.index < params.n_blocks())
        .map(|r| BufferResidence {
            index: r.index,
            t_prime: r.t_prime,
            margin: bound as i64 - r.t_prime as i64,
        })
        .collect();
    let witness = buffers.iter().find(|b| b.margin < 0).map(|b| b.index);
    Lemma1Result {
        bound,
        passed: witness.is_none(),
        buffers,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Result {
    /// Containment is only claimed for plain descent.
    pub skipped: bool,
    pub outside_iterates: u64,
    pub projections: u64,
    /// Index of the first offending iterate.
    pub first_violation: Option<u64>,
    pub passed: bool,
}

/// Streaming containment check.
#[derive(Clone, Debug, Default)]
pub struct ContainmentTracker {
    outside: u64,
    projections: u64,
    first: Option<u64>,
}

impl ContainmentTracker {
    pub fn observe(&mut self, it: &Iterate) {
        let outside = it.region.is_outside();
        let projected = it.event == Some(Event::Projected);
        self.outside += outside as u64;
        self.projections += projected as u64;
        if (outside || projected) && self.first.is_none() {
            self.first = Some(it.t);
        }
    }

    pub fn result(&self, skipped: bool) -> Lemma2Result {
        Lemma2Result {
            skipped,
            outside_iterates: self.outside,
            projections: self.projections,
            first_violation: self.first,
            passed: skipped || self.first.is_none(),
        }
    }
}

/// No iterate outside `D` and no projection. Skipped for noisy runs.
pub fn check_lemma2(trajectory: &Trajectory) -> Lemma2Result {
    let mut tracker = ContainmentTracker::default();
    for it in &trajectory.iterates {
        tracker.observe(it);
    }
    tracker.result(trajectory.is_noisy())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    /// Index `k` of the earlier saddle.
    pub k: usize,
    pub t_k: u64,
    pub t_next: u64,
    /// `(L/γ)·tₖ − 1/(ηγ)`.
    pub direct_bound: f64,
    pub direct_ok: bool,
    /// `tₖ₊₁ − c` against `(L/γ)(tₖ − c)` with `c = 4L/(L−γ)`.
    pub shifted_lhs: f64,
    pub shifted_rhs: f64,
    pub shifted_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Result {
    /// `4L/γ`.
    pub t1_bound: f64,
    pub t1: Option<u64>,
    pub t1_ok: bool,
    pub pairs: Vec<PairCheck>,
    pub passed: bool,
}

/// Saddle records (block index up to `n_saddles`) that were fully traversed.
fn completed_saddles(records: &[EscapeRecord], params: &LandscapeParams) -> Vec<EscapeRecord> {
    let mut out: Vec<EscapeRecord> = records
        .iter()
        .filter(|r| r.completed && r.index <= params.n_saddles)
        .copied()
        .collect();
    out.sort_by_key(|r| r.index);
    out
}

/// Checks the per-saddle recurrence on every consecutive pair of completed
/// saddles, plus `t₁ > 4L/γ`.
pub fn check_theorem3(
    records: &[EscapeRecord],
    params: &LandscapeParams,
    eta: f64,
) -> Result<Theorem3Result, AnalysisError> {
    let (l, gamma) = (params.l, params.gamma);
    if l < 2.0 * gamma {
        return Err(AnalysisError::RatioTooSmall { l, gamma });
    }
    let ratio = l / gamma;
    let slack = 1.0 / (eta * gamma);
    let shift = 4.0 * l / (l - gamma);
    let saddles = completed_saddles(records, params);
    let pairs: Vec<PairCheck> = saddles
        .windows(2)
        .filter(|w| w[1].index == w[0].index + 1)
        .map(|w| {
            let (tk, tn) = (w[0].t as f64, w[1].t as f64);
            let direct_bound = ratio * tk - slack;
            let shifted_lhs = tn - shift;
            let shifted_rhs = ratio * (tk - shift);
            PairCheck {
                k: w[0].index,
                t_k: w[0].t,
                t_next: w[1].t,
                direct_bound,
                direct_ok: tn > direct_bound,
                shifted_lhs,
                shifted_rhs,
                shifted_ok: shifted_lhs > shifted_rhs,
            }
        })
        .collect();
    let t1_bound = 4.0 * ratio;
    let t1 = saddles.iter().find(|r| r.index == 1).map(|r| r.t);
    let t1_ok = t1.is_none_or(|t| t as f64 > t1_bound);
    let passed = t1_ok && pairs.iter().all(|p| p.direct_ok && p.shifted_ok);
    Ok(Theorem3Result {
        t1_bound,
        t1,
        t1_ok,
        pairs,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    /// `exp` of the least-squares slope of `ln tₖ` against `k`.
    pub growth_ratio: f64,
    pub saddles_used: usize,
    /// Lower bounds `c + (L/γ)^{k−1}(t₁ − c)` for every saddle, with
    /// `c = 4L/(L−γ)` and `t₁` measured; the first entry is `t₁` itself.
    pub floor_per_saddle: Vec<f64>,
    /// Sum of `floor_per_saddle`.
    pub predicted_floor: f64,
    /// Block iterations up to each completed saddle, paired with the floor
    /// for the same prefix.
    pub prefix: Vec<(u64, f64)>,
    pub prefix_exceeds_floor: bool,
    /// Iterations needed to reach the final block, if it was reached.
    pub total_to_minimum: Option<u64>,
}

/// Fits the per-saddle growth factor and compares measured counts with the
/// floor obtained by unrolling the shifted recurrence from measured `t₁`.
/// Input order does not matter.
pub fn growth_summary(
    records: &[EscapeRecord],
    params: &LandscapeParams,
) -> Result<GrowthSummary, AnalysisError> {
    let saddles = completed_saddles(records, params);
    if saddles.len() < 3 {
        return Err(AnalysisError::InsufficientData {
            needed: 3,
            got: saddles.len(),
        });
    }
    let growth_ratio = fit_ratio(
        &saddles
            .iter()
            .map(|r| (r.index as f64, r.t as f64))
            .collect::<Vec<_>>(),
    );
    let t1 = saddles
        .iter()
        .find(|r| r.index == 1)
        .map_or(saddles[0].t, |r| r.t) as f64;
    let (l, gamma) = (params.l, params.gamma);
    let floor_per_saddle: Vec<f64> = (1..=params.n_saddles)
        .map(|k| {
            if k == 1 || l <= gamma {
                t1
            } else {
                let c = 4.0 * l / (l - gamma);
                c + (l / gamma).powi(k as i32 - 1) * (t1 - c)
            }
        })
        .collect();
    let predicted_floor = floor_per_saddle.iter().sum();
    let mut prefix = Vec::new();
    let (mut measured, mut floor) = (0u64, 0.0);
    for r in &saddles {
        measured += r.t;
        floor += floor_per_saddle[r.index - 1];
        prefix.push((measured, floor));
    }
    let prefix_exceeds_floor = prefix.iter().all(|&(m, f)| m as f64 >= f);
    let total_to_minimum = records
        .iter()
        .find(|r| r.index == params.n_blocks())
        .and_then(|_| {
            records
                .iter()
                .filter(|r| r.index < params.n_blocks())
                .map(|r| r.t + r.t_prime)
                .reduce(|a, b| a + b)
        });
    Ok(GrowthSummary {
        growth_ratio,
        saddles_used: saddles.len(),
        floor_per_saddle,
        predicted_floor,
        prefix,
        prefix_exceeds_floor,
        total_to_minimum,
    })
}

/// `exp(slope)` of the least-squares line through `(k, ln t)`.
fn fit_ratio(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(k, t)| (k, t.max(1.0).ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxy / sxx).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StallReason {
    /// The cross coordinate sits exactly on the center line in a region
    /// that leads into another saddle, so the next block cannot be escaped.
    CrossPinned,
    /// A step left the position bitwise unchanged.
    FixedPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stall {
    pub t: u64,
    pub region: RegionId,
    pub reason: StallReason,
}

/// Streaming stall detection.
#[derive(Clone, Debug)]
pub struct StallDetector {
    final_order: usize,
    prev: Option<(usize, [u64; 2])>,
    found: Option<Stall>,
}

impl StallDetector {
    pub fn new(landscape: &Landscape) -> Self {
        Self {
            final_order: landscape.final_order(),
            prev: None,
            found: None,
        }
    }

    pub fn observe(&mut self, it: &Iterate) {
        if self.found.is_some() {
            return;
        }
        let Some(order) = it.region.order else {
            self.prev = None;
            return;
        };
        let bits = [it.offset[0].to_bits(), it.offset[1].to_bits()];
        let next_block = if order % 2 == 0 { order + 2 } else { order + 1 };
        let cross = it.offset[1 - travel_axis(order)];
        let reason = if next_block < self.final_order && cross == 0.0 {
            Some(StallReason::CrossPinned)
        } else if self.prev == Some((order, bits)) {
            Some(StallReason::FixedPoint)
        } else {
            None
        };
        if let Some(reason) = reason {
            self.found = Some(Stall {
                t: it.t,
                region: it.region,
                reason,
            });
        }
        self.prev = Some((order, bits));
    }

    pub fn stall(&self) -> Option<Stall> {
        self.found
    }
}

/// First iterate at which plain descent can no longer make progress.
pub fn detect_stall(trajectory: &Trajectory, landscape: &Landscape) -> Option<Stall> {
    let mut det = StallDetector::new(landscape);
    for it in &trajectory.iterates {
        det.observe(it);
    }
    det.stall()
}

/// Everything checked on one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    /// `None` for noisy runs.
    pub lemma1: Option<Lemma1Result>,
    pub lemma2: Lemma2Result,
    /// `None` for noisy runs or when `L < 2γ`.
    pub theorem3: Option<Theorem3Result>,
    pub growth: Option<GrowthSummary>,
    /// Why `growth` is absent, when it is.
    pub growth_note: Option<String>,
}

impl TheoryReport {
    /// Whether every check that applies passed.
    pub fn passed(&self) -> bool {
        self.lemma1.as_ref().is_none_or(|r| r.passed)
            && self.lemma2.passed
            && self.theorem3.as_ref().is_none_or(|r| r.passed)
    }
}

impl TheoryReport {
    /// Assembles the report from streamed pieces, for runs whose trajectory
    /// was thinned.
    pub fn build(
        params: &LandscapeParams,
        eta: f64,
        noisy: bool,
        records: &[EscapeRecord],
        lemma2: Lemma2Result,
    ) -> Self {
        let lemma1 = (!noisy).then(|| check_lemma1(records, params, eta));
        let theorem3 = if noisy {
            None
        } else {
            check_theorem3(records, params, eta).ok()
        };
        let (growth, growth_note) = match growth_summary(records, params) {
            Ok(g) => (Some(g), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self {
            lemma1,
            lemma2,
            theorem3,
            growth,
            growth_note,
        }
    }
}

pub fn theory_report(trajectory: &Trajectory, records: &[EscapeRecord]) -> TheoryReport {
    TheoryReport::build(
        &trajectory.params,
        trajectory.config.eta,
        trajectory.is_noisy(),
        records,
        check_lemma2(trajectory),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{init_sample, run, GdConfig, NoiseConfig, Outcome};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize) -> LandscapeParams {
        LandscapeParams::new(1.0, 0.5, 1.0, n).unwrap()
    }

    fn seg_labels(
        n_blocks: usize,
        labels: &[usize],
        mode: Counting,
    ) -> Result<Vec<EscapeRecord>, AnalysisError> {
        let mut s = Segmenter::new(n_blocks, mode);
        for (t, &o) in labels.iter().enumerate() {
            s.push(t as u64, RegionId::from_order(o, n_blocks));
        }
        s.finish()
    }

    fn record(index: usize, t: u64, t_prime: u64) -> EscapeRecord {
        EscapeRecord {
            index,
            t,
            t_prime,
            cumulative: 0,
            completed: true,
        }
    }

    #[test]
    fn segment_single_block() {
        let r = seg_labels(3, &[0; 7], Counting::Strict).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].t, r[0].t_prime, r[0].completed), (7, 0, false));
    }

    #[test]
    fn segment_known_labels() {
        let mut labels = vec![0; 5];
        labels.extend([1; 3]);
        labels.extend([2; 7]);
        let r = seg_labels(4, &labels, Counting::Strict).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].t, r[0].t_prime, r[0].cumulative), (5, 3, 8));
        assert!(r[0].completed);
        assert_eq!((r[1].t, r[1].t_prime, r[1].cumulative), (7, 0, 15));
    }

    #[test]
    fn revisits_are_errors_unless_first_passage() {
        let labels = [0, 0, 1, 0, 1, 2];
        assert_eq!(
            seg_labels(3, &labels, Counting::Strict),
            Err(AnalysisError::Revisit {
                t: 3,
                from: 1,
                to: 0
            })
        );
        let r = seg_labels(3, &labels, Counting::FirstPassage).unwrap();
        assert_eq!((r[0].t, r[0].t_prime), (2, 3));
        assert_eq!(r[1].t, 1);
    }

    #[test]
    fn outside_iterates_are_rejected() {
        let mut s = Segmenter::new(3, Counting::FirstPassage);
        s.push(0, RegionId::from_order(0, 3));
        s.push(1, RegionId::OUTSIDE);
        assert_eq!(s.finish(), Err(AnalysisError::Outside { t: 1 }));
        assert_eq!(
            Segmenter::new(3, Counting::Strict).finish(),
            Err(AnalysisError::Empty)
        );
    }

    #[test]
    fn buffer_bound_examples() {
        let p = params(4);
        assert_eq!(buffer_bound(0.25, 0.5), 8);
        assert_eq!(buffer_bound(1.0 / 6.0, 0.5), 12);
        let ok = check_lemma1(&[], &p, 0.25);
        assert!(ok.passed && ok.buffers.is_empty());
        let r = check_lemma1(&[record(1, 20, 8), record(2, 40, 9)], &p, 0.25);
        assert!(!r.passed);
        assert_eq!(r.witness, Some(2));
        assert_eq!(r.buffers[1].margin, -1);
    }

    #[test]
    fn containment_flags_outside_iterates() {
        let ls = Landscape::new(params(2)).unwrap();
        let cfg = GdConfig::for_landscape(&ls);
        let mut tr = run(&ls, &cfg, None, Point::new(0.52, 0.4), &mut |_| {}).unwrap();
        assert!(check_lemma2(&tr).passed);
        tr.iterates[3].region = RegionId::OUTSIDE;
        let r = check_lemma2(&tr);
        assert!(!r.passed);
        assert_eq!(r.first_violation, Some(3));

        let noise = NoiseConfig::new(0.1, 1);
        let tr = run(&ls, &cfg, Some(&noise), Point::new(0.52, 0.4), &mut |_| {}).unwrap();
        assert!(check_lemma2(&tr).skipped);
    }

    use crate::landscape::Point;

    #[test]
    fn recurrence_examples() {
        let p = params(4);
        let recs = [record(1, 10, 5), record(2, 31, 4), record(3, 97, 5)];
        let r = check_theorem3(&recs, &p, 0.25).unwrap();
        assert_eq!(r.t1_bound, 8.0);
        assert!(r.passed);
        assert_eq!(r.pairs.len(), 2);
        assert_eq!(r.pairs[0].direct_bound, 12.0);
        // t₂ = 2·t₁ − 8 is not strictly above the bound.
        let r = check_theorem3(&[record(1, 10, 5), record(2, 12, 4)], &p, 0.25).unwrap();
        assert!(!r.passed);
        let bad = LandscapeParams::new(1.0, 0.6, 1.0, 4).unwrap();
        assert!(matches!(
            check_theorem3(&recs, &bad, 0.25),
            Err(AnalysisError::RatioTooSmall { .. })
        ));
    }

    #[test]
    fn growth_examples() {
        let p = params(5);
        let flat: Vec<_> = (1..=4).map(|k| record(k, 10, 2)).collect();
        let g = growth_summary(&flat, &p).unwrap();
        assert!((g.growth_ratio - 1.0).abs() < 1e-12);
        let geo: Vec<_> = (1..=4)
            .map(|k| record(k, 10 * 3u64.pow(k as u32 - 1), 2))
            .collect();
        let g = growth_summary(&geo, &p).unwrap();
        assert!((g.growth_ratio - 3.0).abs() < 1e-12);
        // floor_k = 8 + 2^{k-1}(10 - 8)
        assert_eq!(g.floor_per_saddle, vec![10.0, 12.0, 16.0, 24.0, 40.0]);
        assert_eq!(g.predicted_floor, 102.0);
        assert!(g.prefix_exceeds_floor);
        assert_eq!(g.total_to_minimum, None);
        let mut shuffled = geo.clone();
        shuffled.reverse();
        assert_eq!(growth_summary(&shuffled, &p).unwrap(), g);
        assert!(matches!(
            growth_summary(&geo[..2], &p),
            Err(AnalysisError::InsufficientData { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn stall_at_saddle_center() {
        let ls = Landscape::new(params(3)).unwrap();
        let cfg = GdConfig::for_landscape(&ls);
        let tr = run(&ls, &cfg, None, ls.center(0), &mut |_| {}).unwrap();
        let s = detect_stall(&tr, &ls).unwrap();
        assert_eq!(s.t, 0);
        assert_eq!(s.reason, StallReason::CrossPinned);
    }

    #[test]
    fn short_run_has_no_stall() {
        let ls = Landscape::new(params(1)).unwrap();
        let cfg = GdConfig::for_landscape(&ls);
        let start = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(8));
        let tr = run(&ls, &cfg, None, start, &mut |_| {}).unwrap();
        assert_eq!(tr.outcome, Outcome::ReachedMinimum);
        assert_eq!(detect_stall(&tr, &ls), None);
    }

    #[test]
    fn segmentation_of_real_runs_conserves_iterates() {
        for n in [1, 3, 6] {
            let p = params(n);
            let ls = Landscape::new(p).unwrap();
            let cfg = GdConfig::for_landscape(&ls);
            for seed in 0..5 {
                let start = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(seed));
                let tr = run(&ls, &cfg, None, start, &mut |_| {}).unwrap();
                let recs = segment(&tr, &p).unwrap();
                let total: u64 = recs.iter().map(|r| r.t + r.t_prime).sum();
                assert_eq!(total, tr.len());
                let mut acc = 0;
                for r in &recs {
                    acc += r.t + r.t_prime;
                    assert_eq!(r.cumulative, acc);
                }
            }
        }
    }

    #[test]
    fn segment_rejects_thinned_and_foreign_runs() {
        let p = params(2);
        let ls = Landscape::new(p).unwrap();
        let mut cfg = GdConfig::for_landscape(&ls);
        cfg.record_every = 5;
        let tr = run(&ls, &cfg, None, Point::new(0.55, 0.3), &mut |_| {}).unwrap();
        assert!(matches!(
            segment(&tr, &p),
            Err(AnalysisError::Thinned { .. })
        ));
        assert_eq!(segment(&tr, &params(3)), Err(AnalysisError::ParamsMismatch));
    }
}
