//! The staircase landscape.
//!
//! The domain `D` is a chain of `τ × τ` cells laid out as a staircase:
//! block `B₁`, buffer `B′₁`, block `B₂`, buffer `B′₂`, ..., final block `Bₙ`.
//! Odd blocks escape along `x₁`, even blocks along `x₂`, and every buffer
//! blends the outgoing quadratic into the incoming one so that `f` is
//! continuously differentiable across the whole chain.
//!
//! Every region occupies exactly one grid cell `[cτ, (c+1)τ] × [rτ, (r+1)τ]`,
//! and the cell index `(c, r)` of the region with chain order `o` always
//! satisfies `c + r = o`. Evaluation is done on [`LocalPoint`]s (cell plus
//! offset from the cell center), which keeps distances to a center line
//! representable down to the subnormal range no matter how far along the
//! chain the point is.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LandscapeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point ({x1}, {x2}) lies outside the domain")]
    OutsideDomain { x1: f64, x2: f64 },
    #[error("region index {index} out of range (landscape has {blocks} blocks)")]
    IndexOutOfRange { index: usize, blocks: usize },
    #[error("region {0} has no geometry")]
    NoGeometry(RegionKind),
    #[error("coordinate {u} outside the buffer interval [{lo}, {hi}]")]
    OutOfRange { u: f64, lo: f64, hi: f64 },
    #[error("degenerate interpolation interval (y0 = y1 = {0})")]
    DegenerateInterval(f64),
}

pub type Result<T, E = LandscapeError> = std::result::Result<T, E>;

/// User-facing construction parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeParams {
    /// Curvature scale of the attracting directions.
    #[serde(rename = "L")]
    pub l: f64,
    /// Curvature of the escape direction.
    pub gamma: f64,
    /// Side length of every block and buffer.
    pub tau: f64,
    /// Number of saddle blocks; the chain has one extra (final) block.
    pub n_saddles: usize,
}

impl Default for LandscapeParams {
    fn default() -> Self {
        Self {
            l: 1.0,
            gamma: 0.5,
            tau: 1.0,
            n_saddles: 9,
        }
    }
}

impl LandscapeParams {
    pub fn new(l: f64, gamma: f64, tau: f64, n_saddles: usize) -> Result<Self> {
        let params = Self {
            l,
            gamma,
            tau,
            n_saddles,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LandscapeError::InvalidParams(msg));
        if !(self.l.is_finite() && self.l > 0.0) {
            return bad(format!("L must be positive and finite (got {})", self.l));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return bad(format!(
                "gamma must be positive and finite (got {})",
                self.gamma
            ));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!(
                "tau must be positive and finite (got {})",
                self.tau
            ));
        }
        if self.l < self.gamma {
            return bad(format!(
                "L >= gamma is required (got L = {}, gamma = {})",
                self.l, self.gamma
            ));
        }
        if self.n_saddles < 1 {
            return bad("n_saddles must be at least 1".into());
        }
        Ok(())
    }

    /// Total number of blocks, saddles plus the final block.
    pub fn n_blocks(&self) -> usize {
        self.n_saddles + 1
    }

    /// Number of regions (blocks and buffers) in the chain.
    pub fn n_regions(&self) -> usize {
        2 * self.n_blocks() - 1
    }
}

/// Constants that follow from [`LandscapeParams`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Curvature on the wrong side of a block, `4L`.
    #[serde(rename = "L2")]
    pub l2: f64,
    /// Drop in the function value from one block to the next.
    pub nu: f64,
    /// `1/(4L)`; one step reflects the wrong side of a block exactly.
    pub eta_default: f64,
    /// `L/γ`, the per-saddle growth factor of the lower bound.
    pub lower_bound_base: f64,
}

pub fn derive_constants(params: &LandscapeParams) -> Result<DerivedConstants> {
    params.validate()?;
    let tau = params.tau;
    let (g1_end, _) = g1_unchecked(2.0 * tau, params);
    Ok(DerivedConstants {
        l2: 4.0 * params.l,
        nu: 0.25 * params.l * tau * tau - g1_end,
        eta_default: 1.0 / (4.0 * params.l),
        lower_bound_base: params.l / params.gamma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionKind {
    OddBlock,
    EvenBlock,
    OddToEvenBuffer,
    EvenToOddBuffer,
    FinalBlock,
    Outside,
}

impl RegionKind {
    pub fn is_block(self) -> bool {
        matches!(
            self,
            RegionKind::OddBlock | RegionKind::EvenBlock | RegionKind::FinalBlock
        )
    }

    pub fn is_buffer(self) -> bool {
        matches!(
            self,
            RegionKind::OddToEvenBuffer | RegionKind::EvenToOddBuffer
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionKind::OddBlock => "OddBlock",
            RegionKind::EvenBlock => "EvenBlock",
            RegionKind::OddToEvenBuffer => "OddToEvenBuffer",
            RegionKind::EvenToOddBuffer => "EvenToOddBuffer",
            RegionKind::FinalBlock => "FinalBlock",
            RegionKind::Outside => "Outside",
        }
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which region of the chain a point belongs to.
///
/// `index` is the 1-based block index (buffers share the index of the block
/// they follow) and `order` the 0-based position in the chain. Both are
/// `None` for [`RegionKind::Outside`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionId {
    pub kind: RegionKind,
    pub index: Option<usize>,
    pub order: Option<usize>,
}

impl RegionId {
    pub const OUTSIDE: RegionId = RegionId {
        kind: RegionKind::Outside,
        index: None,
        order: None,
    };

    /// Region at chain position `order` in a chain of `n_blocks` blocks.
    pub fn from_order(order: usize, n_blocks: usize) -> RegionId {
        let kind = if order.is_multiple_of(2) {
            let index = order / 2 + 1;
            if index == n_blocks {
                RegionKind::FinalBlock
            } else if index % 2 == 1 {
                RegionKind::OddBlock
            } else {
                RegionKind::EvenBlock
            }
        } else if (order / 2 + 1) % 2 == 1 {
            RegionKind::OddToEvenBuffer
        } else {
            RegionKind::EvenToOddBuffer
        };
        RegionId {
            kind,
            index: Some(order / 2 + 1),
            order: Some(order),
        }
    }

    /// Block `index` (1-based); the final block when `index == n_blocks`.
    pub fn block(index: usize, n_blocks: usize) -> RegionId {
        RegionId::from_order(2 * (index.max(1) - 1), n_blocks)
    }

    /// Buffer following block `index`.
    pub fn buffer(index: usize, n_blocks: usize) -> RegionId {
        RegionId::from_order(2 * (index.max(1) - 1) + 1, n_blocks)
    }

    pub fn is_outside(&self) -> bool {
        self.kind == RegionKind::Outside
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(f, "{} {}", self.kind, i),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p.x1 >= self.x1_min && p.x1 <= self.x1_max && p.x2 >= self.x2_min && p.x2 <= self.x2_max
    }

    /// Nearest point of the rectangle to `p`.
    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x1.clamp(self.x1_min, self.x1_max),
            p.x2.clamp(self.x2_min, self.x2_max),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockGeometry {
    pub bounds: Rect,
    /// Saddle (or minimum) location for blocks; for buffers the midpoint,
    /// whose cross coordinate is the center line shared with both
    /// neighbouring blocks.
    pub center: Point,
}

/// Quintic blend endpoints `g₂(τ) = c1`, `g₂(2τ) = c2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferBranch {
    pub c1: f64,
    pub c2: f64,
}

/// A point expressed relative to the center of the region that owns it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPoint {
    pub order: usize,
    pub offset: [f64; 2],
}

/// Which formula of a region is used.
///
/// Blocks and buffers each have an escape-side and a wrong-side piece; the
/// final block has a single bowl.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Escape,
    WrongSide,
}

/// Grid cell of the region at chain position `order`.
pub(crate) fn cell_of_order(order: usize) -> (i64, i64) {
    let k = (order / 4) as i64;
    match order % 4 {
        0 => (2 * k, 2 * k),
        1 => (2 * k + 1, 2 * k),
        2 => (2 * k + 2, 2 * k),
        _ => (2 * k + 2, 2 * k + 1),
    }
}

/// Inverse of [`cell_of_order`]; `None` for cells off the staircase.
pub(crate) fn order_of_cell(col: i64, row: i64) -> Option<usize> {
    if row < 0 {
        return None;
    }
    let on_chain = if row % 2 == 0 {
        (0..=2).contains(&(col - row))
    } else {
        col - row == 1
    };
    on_chain.then(|| (col + row) as usize)
}

/// Axis along which the region at `order` is traversed (0 = x₁, 1 = x₂).
pub fn travel_axis(order: usize) -> usize {
    match order % 4 {
        0 | 1 => 0,
        _ => 1,
    }
}

/// Largest multiple of `period` that does not exceed `x`.
pub fn local_offset(x: f64, period: f64) -> f64 {
    (x / period).floor() * period
}

fn g1_unchecked(u: f64, params: &LandscapeParams) -> (f64, f64) {
    let (l, gamma, tau) = (params.l, params.gamma, params.tau);
    // p(u) - p(τ), factored to avoid cancellation.
    let s = u - tau;
    let rise = s * (0.5 * (gamma - l) * (u + tau) + (l - 2.0 * gamma) * tau);
    let value = rise - 0.25 * gamma * tau * tau;
    let slope = (gamma - l) * u + (l - 2.0 * gamma) * tau;
    (value, slope)
}

fn g2_unchecked(u: f64, branch: BufferBranch, tau: f64) -> (f64, f64) {
    let delta = branch.c1 - branch.c2;
    let s = (u - 2.0 * tau) / tau;
    let s3 = s * s * s;
    let value = branch.c2 - delta * s3 * (10.0 + s * (15.0 + 6.0 * s));
    let slope = -30.0 * delta * (s * (1.0 + s)).powi(2) / tau;
    (value, slope)
}

fn check_buffer_range(u: f64, tau: f64) -> Result<()> {
    if u >= tau && u <= 2.0 * tau {
        Ok(())
    } else {
        Err(LandscapeError::OutOfRange {
            u,
            lo: tau,
            hi: 2.0 * tau,
        })
    }
}

/// Along-travel part of the buffer function and its derivative, for
/// `u ∈ [τ, 2τ]`.
pub fn buffer_g1(u: f64, params: &LandscapeParams) -> Result<(f64, f64)> {
    check_buffer_range(u, params.tau)?;
    Ok(g1_unchecked(u, params))
}

/// Quintic blend from `c1` at `u = τ` to `c2` at `u = 2τ`, with zero slope
/// at both ends.
pub fn buffer_g2(u: f64, branch: BufferBranch, tau: f64) -> Result<(f64, f64)> {
    check_buffer_range(u, tau)?;
    Ok(g2_unchecked(u, branch, tau))
}

/// Cubic Hermite interpolant on `[y0, y1]`, in powers of `y - y0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicHermite {
    pub y0: f64,
    pub coeffs: [f64; 4],
}

impl CubicHermite {
    pub fn value(&self, y: f64) -> f64 {
        let d = y - self.y0;
        let [c0, c1, c2, c3] = self.coeffs;
        c0 + d * (c1 + d * (c2 + d * c3))
    }

    pub fn derivative(&self, y: f64) -> f64 {
        let d = y - self.y0;
        let [_, c1, c2, c3] = self.coeffs;
        c1 + d * (2.0 * c2 + 3.0 * d * c3)
    }
}

/// Cubic matching values `f0, f1` and slopes `df0, df1` at `y0, y1`.
pub fn hermite_cubic(
    f0: f64,
    f1: f64,
    df0: f64,
    df1: f64,
    y0: f64,
    y1: f64,
) -> Result<CubicHermite> {
    let h = y1 - y0;
    if h == 0.0 {
        return Err(LandscapeError::DegenerateInterval(y0));
    }
    let slope = (f1 - f0) / h;
    Ok(CubicHermite {
        y0,
        coeffs: [
            f0,
            df0,
            (3.0 * slope - df1 - 2.0 * df0) / h,
            -(2.0 * slope - df1 - df0) / (h * h),
        ],
    })
}

/// Gradient-bearing objective. Implemented by [`Landscape`]; verification
/// code is written against this trait so it can be pointed at modified
/// surfaces.
pub trait Objective {
    fn value(&self, p: Point) -> Result<f64>;
    fn gradient(&self, p: Point) -> Result<[f64; 2]>;
}

/// A validated landscape instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Landscape {
    params: LandscapeParams,
    consts: DerivedConstants,
}

impl Landscape {
    pub fn new(params: LandscapeParams) -> Result<Self> {
        let consts = derive_constants(&params)?;
        Ok(Self { params, consts })
    }

    pub fn params(&self) -> &LandscapeParams {
        &self.params
    }

    pub fn constants(&self) -> &DerivedConstants {
        &self.consts
    }

    pub fn tau(&self) -> f64 {
        self.params.tau
    }

    pub fn n_blocks(&self) -> usize {
        self.params.n_blocks()
    }

    pub fn n_regions(&self) -> usize {
        self.params.n_regions()
    }

    pub fn final_order(&self) -> usize {
        self.n_regions() - 1
    }

    pub fn region(&self, order: usize) -> RegionId {
        RegionId::from_order(order, self.n_blocks())
    }

    pub fn regions(&self) -> impl Iterator<Item = RegionId> + '_ {
        (0..self.n_regions()).map(|o| self.region(o))
    }

    fn in_chain(&self, col: i64, row: i64) -> Option<usize> {
        order_of_cell(col, row).filter(|&o| o < self.n_regions())
    }

    fn cell_bounds(&self, col: i64, row: i64) -> Rect {
        let tau = self.params.tau;
        Rect {
            x1_min: col as f64 * tau,
            x1_max: (col + 1) as f64 * tau,
            x2_min: row as f64 * tau,
            x2_max: (row + 1) as f64 * tau,
        }
    }

    fn cell_center(&self, col: i64, row: i64) -> Point {
        let tau = self.params.tau;
        Point::new((col as f64 + 0.5) * tau, (row as f64 + 0.5) * tau)
    }

    /// Bounds of the region at chain position `order`.
    pub fn bounds(&self, order: usize) -> Rect {
        let (c, r) = cell_of_order(order);
        self.cell_bounds(c, r)
    }

    pub fn center(&self, order: usize) -> Point {
        let (c, r) = cell_of_order(order);
        self.cell_center(c, r)
    }

    pub fn block_geometry(&self, region: RegionId) -> Result<BlockGeometry> {
        let (Some(index), Some(order)) = (region.index, region.order) else {
            return Err(LandscapeError::NoGeometry(region.kind));
        };
        if order >= self.n_regions() {
            return Err(LandscapeError::IndexOutOfRange {
                index,
                blocks: self.n_blocks(),
            });
        }
        Ok(BlockGeometry {
            bounds: self.bounds(order),
            center: self.center(order),
        })
    }

    /// Region owning `p`. Points on a shared edge belong to the region that
    /// comes first in the chain.
    pub fn classify(&self, p: Point) -> RegionId {
        match self.locate(p) {
            Some(lp) => self.region(lp.order),
            None => RegionId::OUTSIDE,
        }
    }

    /// Owner of `p` together with the offset from its center.
    pub fn locate(&self, p: Point) -> Option<LocalPoint> {
        if !p.is_finite() {
            return None;
        }
        let tau = self.params.tau;
        let c0 = (p.x1 / tau).floor() as i64;
        let r0 = (p.x2 / tau).floor() as i64;
        let mut best: Option<(usize, i64, i64)> = None;
        for col in c0 - 1..=c0 + 1 {
            for row in r0 - 1..=r0 + 1 {
                let Some(order) = self.in_chain(col, row) else {
                    continue;
                };
                if !self.cell_bounds(col, row).contains(p) {
                    continue;
                }
                if best.is_none_or(|(o, _, _)| order < o) {
                    best = Some((order, col, row));
                }
            }
        }
        best.map(|(order, col, row)| {
            let c = self.cell_center(col, row);
            LocalPoint {
                order,
                offset: [p.x1 - c.x1, p.x2 - c.x2],
            }
        })
    }

    /// Absolute coordinates of a local point.
    pub fn absolute(&self, lp: &LocalPoint) -> Point {
        let c = self.center(lp.order);
        Point::new(c.x1 + lp.offset[0], c.x2 + lp.offset[1])
    }

    /// Re-expresses `offset` (relative to the center of the cell of
    /// `order`) in the frame of the region that owns the point. Returns
    /// `None` when the point has left `D`.
    pub fn relocate(&self, order: usize, offset: [f64; 2]) -> Option<LocalPoint> {
        if !(offset[0].is_finite() && offset[1].is_finite()) {
            return None;
        }
        let tau = self.params.tau;
        let half = 0.5 * tau;
        let (mut col, mut row) = cell_of_order(order);
        let mut off = offset;
        for (axis, cell) in [(0, &mut col), (1, &mut row)] {
            if off[axis].abs() > half {
                let shift = (off[axis] / tau).round();
                *cell += shift as i64;
                off[axis] -= shift * tau;
            }
        }
        // On an edge, the neighbouring cell may own the point instead.
        let alternatives = |o: f64| -> [(i64, f64); 2] {
            if o == half {
                [(0, o), (1, -half)]
            } else if o == -half {
                [(0, o), (-1, half)]
            } else {
                [(0, o), (0, o)]
            }
        };
        let mut best: Option<LocalPoint> = None;
        for (dc, o1) in alternatives(off[0]) {
            for (dr, o2) in alternatives(off[1]) {
                if let Some(order) = self.in_chain(col + dc, row + dr) {
                    if best.is_none_or(|b| order < b.order) {
                        best = Some(LocalPoint {
                            order,
                            offset: [o1, o2],
                        });
                    }
                }
            }
        }
        best
    }

    /// Quintic blend endpoints used by buffer `order` on the given side of
    /// its center line.
    pub fn buffer_branch(&self, order: usize, branch: Branch) -> BufferBranch {
        let l = self.params.l;
        let c2 = if order + 1 == self.final_order() {
            l
        } else {
            match branch {
                Branch::Escape => -self.params.gamma,
                Branch::WrongSide => self.consts.l2,
            }
        };
        BufferBranch { c1: l, c2 }
    }

    /// Branch that owns `offset` within region `order`.
    pub fn branch_of(&self, order: usize, offset: [f64; 2]) -> Branch {
        let axis = travel_axis(order);
        let coord = if order.is_multiple_of(2) {
            // Blocks: the escape coordinate decides.
            offset[axis]
        } else {
            // Buffers: the cross coordinate decides.
            offset[1 - axis]
        };
        if coord > 0.0 {
            Branch::Escape
        } else {
            Branch::WrongSide
        }
    }

    /// Value and gradient of a specific piece of region `order`, evaluated
    /// at `offset` without checking which piece owns the point.
    pub fn eval_piece(&self, order: usize, branch: Branch, offset: [f64; 2]) -> (f64, [f64; 2]) {
        let LandscapeParams { l, gamma, tau, .. } = self.params;
        let index = order / 2 + 1;
        let base = -(index as f64) * self.consts.nu;
        let along = travel_axis(order);
        let cross = 1 - along;
        let mut grad = [0.0; 2];
        if order == self.final_order() {
            let [d1, d2] = offset;
            grad[0] = 2.0 * l * d1;
            grad[1] = 2.0 * l * d2;
            return (base + l * (d1 * d1 + d2 * d2), grad);
        }
        if order.is_multiple_of(2) {
            let e = offset[along];
            let c = offset[cross];
            let escape_coef = match branch {
                Branch::Escape => -gamma,
                Branch::WrongSide => self.consts.l2,
            };
            grad[along] = 2.0 * escape_coef * e;
            grad[cross] = 2.0 * l * c;
            (base + (escape_coef * e * e + l * c * c), grad)
        } else {
            let u = offset[along] + 1.5 * tau;
            let w = offset[cross];
            let (g1, dg1) = g1_unchecked(u, &self.params);
            let (g2, dg2) = g2_unchecked(u, self.buffer_branch(order, branch), tau);
            grad[along] = dg1 + dg2 * w * w;
            grad[cross] = 2.0 * g2 * w;
            (base + (g1 + g2 * w * w), grad)
        }
    }

    /// Value and gradient at a local point.
    pub fn eval_local(&self, lp: &LocalPoint) -> (f64, [f64; 2]) {
        let branch = self.branch_of(lp.order, lp.offset);
        self.eval_piece(lp.order, branch, lp.offset)
    }

    fn require(&self, p: Point) -> Result<LocalPoint> {
        self.locate(p)
            .ok_or(LandscapeError::OutsideDomain { x1: p.x1, x2: p.x2 })
    }

    pub fn eval_f(&self, p: Point) -> Result<f64> {
        Ok(self.eval_local(&self.require(p)?).0)
    }

    pub fn eval_grad(&self, p: Point) -> Result<[f64; 2]> {
        Ok(self.eval_local(&self.require(p)?).1)
    }

    /// Euclidean projection onto `D`: the nearest of the per-region clamps.
    /// Ties go to the earlier region.
    pub fn project(&self, p: Point) -> Point {
        if self.locate(p).is_some() {
            return p;
        }
        let mut best = self.bounds(0).clamp(p);
        let mut best_d = best.distance(&p);
        for order in 1..self.n_regions() {
            let q = self.bounds(order).clamp(p);
            let d = q.distance(&p);
            if d < best_d {
                best = q;
                best_d = d;
            }
        }
        best
    }

    /// Global minimum, the center of the final block.
    pub fn minimizer(&self) -> Point {
        self.center(self.final_order())
    }

    /// Analytic bound on the gradient's Lipschitz constant within a
    /// region: `2·L₂ + 30·(L₂ + γ)·(τ/2)²/τ`.
    pub fn lipschitz_bound(&self) -> f64 {
        let tau = self.params.tau;
        let l2 = self.consts.l2;
        2.0 * l2 + 30.0 * (l2 + self.params.gamma) * (0.5 * tau).powi(2) / tau
    }
}

impl Objective for Landscape {
    fn value(&self, p: Point) -> Result<f64> {
        self.eval_f(p)
    }

    fn gradient(&self, p: Point) -> Result<[f64; 2]> {
        self.eval_grad(p)
    }
}
