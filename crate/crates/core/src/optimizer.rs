//! Plain and noisy gradient descent on the landscape.
//!
//! Runs keep the iterate as a [`LocalPoint`] so the distance to the current
//! center line keeps full relative precision however long the run is.
//! Noisy descent leaves `D` regularly; such iterates are projected back
//! onto `D`. Plain descent from the thin initialization band never leaves
//! it, and a projection there is tagged so the containment check can
//! report it.

use crate::landscape::{Landscape, LandscapeError, LandscapeParams, LocalPoint, Point, RegionId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub eta: f64,
    pub max_iter: u64,
    /// Gradient-norm threshold that ends a plain run inside the final block.
    pub stop_grad_norm: f64,
    /// Keep every `record_every`-th iterate (event iterates are always kept).
    pub record_every: u64,
}

impl GdConfig {
    /// Defaults: `η = 1/(4L)`, a budget of 10⁶ steps, stop at `‖∇f‖ ≤ 1e−10`.
    pub fn for_landscape(landscape: &Landscape) -> Self {
        Self {
            eta: landscape.constants().eta_default,
            max_iter: 1_000_000,
            stop_grad_norm: 1e-10,
            record_every: 1,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |m: String| Err(OptimizerError::InvalidConfig(m));
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta must be positive (got {})", self.eta));
        }
        if self.max_iter < 1 {
            return bad("max_iter must be at least 1".into());
        }
        if self.record_every < 1 {
            return bad("record_every must be at least 1".into());
        }
        if self.stop_grad_norm.is_nan() || self.stop_grad_norm < 0.0 {
            return bad(format!(
                "stop_grad_norm must be non-negative (got {})",
                self.stop_grad_norm
            ));
        }
        Ok(())
    }
}

/// Gaussian perturbation added to every step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Per-coordinate variance.
    pub variance: f64,
    pub seed: u64,
    /// Multiply the noise by `η` (perturbing the gradient rather than the
    /// iterate).
    #[serde(default)]
    pub scale_by_eta: bool,
}

impl NoiseConfig {
    pub fn new(variance: f64, seed: u64) -> Self {
        Self {
            variance,
            seed,
            scale_by_eta: false,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.variance.is_finite() && self.variance >= 0.0 {
            Ok(())
        } else {
            Err(OptimizerError::InvalidConfig(format!(
                "noise variance must be non-negative (got {})",
                self.variance
            )))
        }
    }

    fn is_active(&self) -> bool {
        self.variance > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Event {
    BlockEntry,
    BufferEntry,
    Projected,
    Stalled,
    Converged,
}

impl Event {
    pub fn as_str(self) -> &'static str {
        match self {
            Event::BlockEntry => "BlockEntry",
            Event::BufferEntry => "BufferEntry",
            Event::Projected => "Projected",
            Event::Stalled => "Stalled",
            Event::Converged => "Converged",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub t: u64,
    pub position: Point,
    /// Offset from the center of `region`.
    pub offset: [f64; 2],
    pub f_value: f64,
    pub grad_norm: f64,
    pub region: RegionId,
    pub event: Option<Event>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    ReachedMinimum,
    Budget,
    Stalled,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::ReachedMinimum => "ReachedMinimum",
            Outcome::Budget => "Budget",
            Outcome::Stalled => "Stalled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: LandscapeParams,
    pub config: GdConfig,
    pub noise: Option<NoiseConfig>,
    pub iterates: Vec<Iterate>,
    pub outcome: Outcome,
    /// Index of the last iterate produced (recorded or not).
    pub last_t: u64,
}

impl Trajectory {
    pub fn is_noisy(&self) -> bool {
        self.noise.is_some_and(|n| n.is_active())
    }

    /// Number of iterates produced, including the start.
    pub fn len(&self) -> u64 {
        self.last_t + 1
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    /// Whether every iterate was recorded.
    pub fn is_complete(&self) -> bool {
        self.iterates.len() as u64 == self.len()
    }
}

/// Random start in `B₁` with `|x₁ − s₁|` uniform on `(0, τ/(2e²)]` (random
/// sign) and `x₂` uniform across the block.
pub fn init_sample<R: Rng + ?Sized>(landscape: &Landscape, rng: &mut R) -> Point {
    let tau = landscape.tau();
    let c = landscape.center(0);
    let band = init_band(tau);
    // 1 - U with U ∈ [0, 1) keeps the distance strictly positive.
    let d = (1.0 - rng.random::<f64>()) * band;
    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let x2 = rng.random_range(0.0..tau);
    Point::new(c.x1 + sign * d, x2)
}

/// Half-width `τ/(2e²)` of the initialization band around `s₁`.
pub fn init_band(tau: f64) -> f64 {
    tau / (2.0 * std::f64::consts::E.powi(2))
}

/// One plain gradient step `p − η∇f(p)`.
pub fn gd_step(landscape: &Landscape, p: Point, eta: f64) -> Result<Point, OptimizerError> {
    let g = landscape.eval_grad(p)?;
    Ok(Point::new(p.x1 - eta * g[0], p.x2 - eta * g[1]))
}

/// Nearest point of `D`.
pub fn project_to_domain(landscape: &Landscape, p: Point) -> Point {
    landscape.project(p)
}

fn gaussian(variance: f64) -> Normal<f64> {
    Normal::new(0.0, variance.sqrt()).expect("variance validated as finite and non-negative")
}

/// One noisy step `Π_D(p − η∇f(p) + ζ)` with `ζ ~ N(0, variance·I)`.
pub fn sgd_step<R: Rng + ?Sized>(
    landscape: &Landscape,
    p: Point,
    eta: f64,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Point, OptimizerError> {
    noise.validate()?;
    let g = landscape.eval_grad(p)?;
    let normal = gaussian(noise.variance);
    let scale = if noise.scale_by_eta { eta } else { 1.0 };
    let z1 = scale * normal.sample(rng);
    let z2 = scale * normal.sample(rng);
    let q = Point::new(p.x1 - eta * g[0] + z1, p.x2 - eta * g[1] + z2);
    Ok(landscape.project(q))
}

struct Stepper {
    noise: Option<(Normal<f64>, f64, ChaCha8Rng)>,
}

impl Stepper {
    /// Advances `lp`; the flag reports whether a projection was needed.
    fn step(
        &mut self,
        landscape: &Landscape,
        lp: &LocalPoint,
        grad: [f64; 2],
        eta: f64,
    ) -> (LocalPoint, bool) {
        let mut off = [lp.offset[0] - eta * grad[0], lp.offset[1] - eta * grad[1]];
        if let Some((normal, scale, rng)) = self.noise.as_mut() {
            off[0] += *scale * normal.sample(rng);
            off[1] += *scale * normal.sample(rng);
        }
        match landscape.relocate(lp.order, off) {
            Some(next) => (next, false),
            None => {
                let c = landscape.center(lp.order);
                let q = landscape.project(Point::new(c.x1 + off[0], c.x2 + off[1]));
                let next = landscape.locate(q).expect("projection lands in the domain");
                (next, true)
            }
        }
    }
}

fn same_position(a: &LocalPoint, b: &LocalPoint) -> bool {
    a.order == b.order
        && a.offset[0].to_bits() == b.offset[0].to_bits()
        && a.offset[1].to_bits() == b.offset[1].to_bits()
}

/// Runs descent from `start` until the minimum is reached, the budget runs
/// out, or the iterate stalls.
///
/// A plain run reaches the minimum once it is inside the final block with
/// `‖∇f‖ ≤ stop_grad_norm`; a noisy run (positive variance) on first entry
/// into the final block, since the noise floor keeps the gradient from
/// vanishing. A plain run stalls when the gradient is exactly zero outside
/// the final block or a step leaves the position bitwise unchanged.
///
/// `observer` sees every iterate; the returned trajectory keeps every
/// `record_every`-th one plus every iterate that carries an event and the
/// last one.
pub fn run(
    landscape: &Landscape,
    config: &GdConfig,
    noise: Option<&NoiseConfig>,
    start: Point,
    observer: &mut dyn FnMut(&Iterate),
) -> Result<Trajectory, OptimizerError> {
    config.validate()?;
    if let Some(n) = noise {
        n.validate()?;
    }
    let mut lp = landscape
        .locate(start)
        .ok_or(LandscapeError::OutsideDomain {
            x1: start.x1,
            x2: start.x2,
        })?;
    let noisy = noise.is_some_and(|n| n.is_active());
    let mut stepper = Stepper {
        noise: noise.filter(|n| n.is_active()).map(|n| {
            let scale = if n.scale_by_eta { config.eta } else { 1.0 };
            (
                gaussian(n.variance),
                scale,
                ChaCha8Rng::seed_from_u64(n.seed),
            )
        }),
    };
    let final_order = landscape.final_order();
    let mut iterates = Vec::new();
    let mut prev: Option<LocalPoint> = None;
    let mut projected = false;
    let mut t: u64 = 0;
    let outcome = loop {
        let (f_value, grad) = landscape.eval_local(&lp);
        let grad_norm = grad[0].hypot(grad[1]);
        let region = landscape.region(lp.order);
        let is_final = lp.order == final_order;

        let outcome = if is_final && (noisy || grad_norm <= config.stop_grad_norm) {
            Some(Outcome::ReachedMinimum)
        } else if !noisy
            && ((!is_final && grad == [0.0, 0.0]) || prev.is_some_and(|p| same_position(&p, &lp)))
        {
            Some(Outcome::Stalled)
        } else if t == config.max_iter {
            Some(Outcome::Budget)
        } else {
            None
        };

        let event = match outcome {
            Some(Outcome::ReachedMinimum) => Some(Event::Converged),
            Some(Outcome::Stalled) => Some(Event::Stalled),
            _ if projected => Some(Event::Projected),
            _ if prev.is_some_and(|p| p.order != lp.order) => Some(if region.kind.is_block() {
                Event::BlockEntry
            } else {
                Event::BufferEntry
            }),
            _ => None,
        };

        let it = Iterate {
            t,
            position: landscape.absolute(&lp),
            offset: lp.offset,
            f_value,
            grad_norm,
            region,
            event,
        };
        observer(&it);
        if t.is_multiple_of(config.record_every) || event.is_some() || outcome.is_some() {
            iterates.push(it);
        }
        if let Some(o) = outcome {
            break o;
        }

        let (next, was_projected) = stepper.step(landscape, &lp, grad, config.eta);
        prev = Some(lp);
        lp = next;
        projected = was_projected;
        t += 1;
    };
    Ok(Trajectory {
        params: *landscape.params(),
        config: *config,
        noise: noise.copied(),
        iterates,
        outcome,
        last_t: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::RegionKind;
    use proptest::prelude::{
        prop_assert, prop_assert_eq, prop_assert_ne, proptest, ProptestConfig,
    };

    fn landscape(l: f64, n: usize) -> Landscape {
        Landscape::new(LandscapeParams::new(l, l / 2.0, 1.0, n).unwrap()).unwrap()
    }

    fn quiet() -> impl FnMut(&Iterate) {
        |_| {}
    }

    #[test]
    fn init_stays_in_the_band() {
        let ls = landscape(1.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let band = init_band(1.0);
        assert!((band - 0.0677).abs() < 1e-4);
        for _ in 0..10_000 {
            let p = init_sample(&ls, &mut rng);
            let r = ls.classify(p);
            assert_eq!((r.kind, r.index), (RegionKind::OddBlock, Some(1)));
            let d = (p.x1 - 0.5).abs();
            assert!(d <= band && d > 0.0);
        }
        let a = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(9));
        let b = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn gd_step_rates() {
        let ls = landscape(1.0, 3);
        let q = gd_step(&ls, Point::new(0.6, 0.7), 0.25).unwrap();
        assert!(((q.x1 - 0.5) - 0.1 * 1.25).abs() < 1e-15);
        assert!(((q.x2 - 0.5) - 0.2 * 0.5).abs() < 1e-15);
        let q = gd_step(&ls, Point::new(0.25, 0.5), 0.25).unwrap();
        assert_eq!(q, Point::new(0.75, 0.5));
        assert!(gd_step(&ls, Point::new(-1.0, 0.5), 0.25).is_err());
    }

    #[test]
    fn reflection_is_exact_in_offsets() {
        let ls = landscape(1.0, 3);
        let mut stepper = Stepper { noise: None };
        for d in [0.3, 1e-3, 1e-200, 3.7e-310] {
            let lp = LocalPoint {
                order: 0,
                offset: [-d, 0.1],
            };
            let (_, g) = ls.eval_local(&lp);
            let (next, projected) = stepper.step(&ls, &lp, g, 0.25);
            assert!(!projected);
            assert_eq!(next.offset[0].to_bits(), d.to_bits());
        }
    }

    #[test]
    fn projection_examples() {
        let ls = landscape(1.0, 8);
        let inside = Point::new(2.3, 0.4);
        assert_eq!(project_to_domain(&ls, inside), inside);
        assert_eq!(
            project_to_domain(&ls, Point::new(-0.3, 0.5)),
            Point::new(0.0, 0.5)
        );
        assert_eq!(
            project_to_domain(&ls, Point::new(1.5, -0.2)),
            Point::new(1.5, 0.0)
        );
    }

    #[test]
    fn projection_beats_dense_boundary_samples() {
        // Oracle: nearest of a dense sampling of every region's boundary.
        let ls = landscape(1.0, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut boundary = Vec::new();
        for o in 0..ls.n_regions() {
            let b = ls.bounds(o);
            for k in 0..=400 {
                let s = k as f64 / 400.0;
                let x = b.x1_min + s * (b.x1_max - b.x1_min);
                let y = b.x2_min + s * (b.x2_max - b.x2_min);
                boundary.extend([
                    Point::new(x, b.x2_min),
                    Point::new(x, b.x2_max),
                    Point::new(b.x1_min, y),
                    Point::new(b.x1_max, y),
                ]);
            }
        }
        for _ in 0..300 {
            let p = Point::new(rng.random_range(-2.0..9.0), rng.random_range(-2.0..8.0));
            if !ls.classify(p).is_outside() {
                continue;
            }
            let q = project_to_domain(&ls, p);
            let brute = boundary
                .iter()
                .map(|b| b.distance(&p))
                .fold(f64::INFINITY, f64::min);
            assert!(q.distance(&p) <= brute + 1e-12);
            assert!(q.distance(&p) >= brute - 1.0 / 400.0);
        }
    }

    #[test]
    fn zero_variance_matches_plain_step() {
        let ls = landscape(1.0, 3);
        let noise = NoiseConfig::new(0.0, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Point::new(0.62, 0.31);
        assert_eq!(
            sgd_step(&ls, p, 0.25, &noise, &mut rng).unwrap(),
            gd_step(&ls, p, 0.25).unwrap()
        );
    }

    #[test]
    fn sgd_is_reproducible() {
        let ls = landscape(1.0, 3);
        let noise = NoiseConfig::new(0.1, 5);
        let walk = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = Point::new(0.6, 0.5);
            let mut out = Vec::new();
            for _ in 0..50 {
                p = sgd_step(&ls, p, 0.25, &noise, &mut rng).unwrap();
                out.push(p);
            }
            out
        };
        assert_eq!(walk(3), walk(3));
        assert_ne!(walk(3), walk(4));
    }

    #[test]
    fn sgd_noise_statistics() {
        // Noise recovered from steps taken at a fixed interior point, with
        // the domain made large enough that no projection occurs.
        let ls = Landscape::new(LandscapeParams::new(1.0, 0.5, 10.0, 2).unwrap()).unwrap();
        let noise = NoiseConfig::new(0.1, 17);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = Point::new(5.0 + 0.3, 5.0 - 0.2);
        let base = gd_step(&ls, p, 0.25).unwrap();
        let n = 10_000;
        let mut zs = Vec::with_capacity(2 * n);
        for _ in 0..n {
            let q = sgd_step(&ls, p, 0.25, &noise, &mut rng).unwrap();
            zs.push(q.x1 - base.x1);
            zs.push(q.x2 - base.x2);
        }
        let m = zs.len() as f64;
        let mean = zs.iter().sum::<f64>() / m;
        let var = zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (m - 1.0);
        assert!(mean.abs() <= 3.0 * 0.1f64.sqrt() / m.sqrt(), "{mean}");
        assert!((var - 0.1).abs() <= 0.005, "{var}");
    }

    #[test]
    fn start_at_saddle_stalls_immediately() {
        let ls = landscape(1.0, 3);
        let cfg = GdConfig::for_landscape(&ls);
        let tr = run(&ls, &cfg, None, ls.center(0), &mut quiet()).unwrap();
        assert_eq!(tr.outcome, Outcome::Stalled);
        assert_eq!(tr.last_t, 0);
        assert_eq!(tr.iterates[0].event, Some(Event::Stalled));
    }

    #[test]
    fn start_outside_is_rejected() {
        let ls = landscape(1.0, 3);
        let cfg = GdConfig::for_landscape(&ls);
        assert!(matches!(
            run(&ls, &cfg, None, Point::new(-1.0, 0.0), &mut quiet()),
            Err(OptimizerError::Landscape(
                LandscapeError::OutsideDomain { .. }
            ))
        ));
        let mut bad = cfg;
        bad.record_every = 0;
        assert!(run(&ls, &bad, None, Point::new(0.6, 0.5), &mut quiet()).is_err());
    }

    #[test]
    fn single_saddle_reaches_the_minimum() {
        let ls = landscape(1.0, 1);
        let cfg = GdConfig::for_landscape(&ls);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let start = init_sample(&ls, &mut rng);
            let tr = run(&ls, &cfg, None, start, &mut quiet()).unwrap();
            assert_eq!(tr.outcome, Outcome::ReachedMinimum);
            assert!(tr.last_t < 500, "{}", tr.last_t);
        }
    }

    #[test]
    fn run_matches_brute_force_loop() {
        // Oracle: repeated gd_step on absolute points, which agrees with the
        // offset representation while distances stay well above the ulp.
        let ls = landscape(1.0, 1);
        let cfg = GdConfig::for_landscape(&ls);
        let start = Point::new(0.53, 0.41);
        let tr = run(&ls, &cfg, None, start, &mut quiet()).unwrap();
        let mut p = start;
        for it in tr.iterates.iter().take(12) {
            assert!((it.position.x1 - p.x1).abs() < 1e-12);
            assert!((it.position.x2 - p.x2).abs() < 1e-12);
            p = gd_step(&ls, p, cfg.eta).unwrap();
        }
    }

    #[test]
    fn observer_sees_everything_and_thinning_keeps_events() {
        let ls = landscape(1.0, 3);
        let mut cfg = GdConfig::for_landscape(&ls);
        cfg.record_every = 1000;
        let mut seen = 0u64;
        let tr = run(&ls, &cfg, None, Point::new(0.51, 0.3), &mut |_| seen += 1).unwrap();
        assert_eq!(seen, tr.len());
        assert!(tr.iterates.len() < seen as usize);
        let full = run(
            &ls,
            &GdConfig::for_landscape(&ls),
            None,
            Point::new(0.51, 0.3),
            &mut quiet(),
        )
        .unwrap();
        let events: Vec<_> = full.iterates.iter().filter(|i| i.event.is_some()).collect();
        for e in events {
            assert!(tr.iterates.iter().any(|i| i == e));
        }
    }

    #[test]
    fn noisy_run_reaches_the_final_block() {
        let ls = landscape(1.0, 9);
        let cfg = GdConfig::for_landscape(&ls);
        let noise = NoiseConfig::new(0.1, 3);
        let start = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(3));
        let tr = run(&ls, &cfg, Some(&noise), start, &mut quiet()).unwrap();
        assert_eq!(tr.outcome, Outcome::ReachedMinimum);
        assert_eq!(
            tr.iterates.last().unwrap().region.kind,
            RegionKind::FinalBlock
        );
    }

    fn plain_run(l: f64, n: usize, seed: u64) -> (Landscape, Trajectory) {
        let ls = landscape(l, n);
        let cfg = GdConfig::for_landscape(&ls);
        let start = init_sample(&ls, &mut ChaCha8Rng::seed_from_u64(seed));
        let tr = run(&ls, &cfg, None, start, &mut |_| {}).unwrap();
        (ls, tr)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn plain_descent_invariants(seed in 0u64..10_000, n in 1usize..7, big in proptest::bool::ANY) {
            let (ls, tr) = plain_run(if big { 1.5 } else { 1.0 }, n, seed);
            prop_assert!(tr.is_complete());
            for w in tr.iterates.windows(2) {
                let (a, b) = (&w[0], &w[1]);
                prop_assert!(!b.region.is_outside());
                prop_assert_ne!(b.event, Some(Event::Projected));
                let (oa, ob) = (a.region.order.unwrap(), b.region.order.unwrap());
                prop_assert!(ob == oa || ob == oa + 1, "{} -> {}", oa, ob);
                prop_assert!(b.f_value <= a.f_value, "ascent at t = {}", b.t);
            }
            prop_assert!(ls.n_regions() > 0);
        }

        #[test]
        fn runs_are_deterministic(seed in 0u64..10_000) {
            let (_, a) = plain_run(1.0, 4, seed);
            let (_, b) = plain_run(1.0, 4, seed);
            prop_assert_eq!(a, b);
        }
    }
}
