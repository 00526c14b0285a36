//! Certified area of the parallel set `C^r_eps`, optionally restricted to a
//! rectilinear region, by adaptive quadtree classification.
//!
//! The quadtree root is a dyadic square centred on the unit square, so every
//! cell corner and side is exactly representable. Cells are classified with
//! [`DistanceOracle::classify`]; inside cells count their region-clipped area
//! towards both ends of the enclosure, uncertain cells only towards the upper
//! end. All uncertain cells of one level have the same size, so refining level
//! by level is largest-first refinement.
//!
//! Cells are processed in Morton order in fixed-size chunks and partial sums
//! are merged in chunk order, so results are bit-identical for any number of
//! worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds;
use crate::distance::{CellClass, DistanceOracle, OracleConfig};
use crate::error::{Error, Result};
use crate::ifs::{CantorDustParams, Square};
use crate::interval::{down, up, IntervalValue};

const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionKind {
    Plane,
    UnitSquare,
    /// Open unit square minus the four level-one corner squares.
    GammaCross,
    /// The cross without its central square `[1/r, 1-1/r]²`.
    GammaMinusCenter,
}

/// Closed axis-aligned rectangle with certified edge coordinates.
#[derive(Debug, Clone, Copy)]
struct IRect {
    x0: IntervalValue,
    x1: IntervalValue,
    y0: IntervalValue,
    y1: IntervalValue,
}

/// Overlap length of the exact segment `[a, b]` with `[c, d]`.
fn overlap(a: f64, b: f64, c: IntervalValue, d: IntervalValue) -> IntervalValue {
    let lo = down(b.min(d.lo()) - a.max(c.hi())).max(0.0);
    let hi = up(b.min(d.hi()) - a.max(c.lo())).max(0.0);
    IntervalValue::raw(lo, hi)
}

impl IRect {
    fn clip(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> IntervalValue {
        let w = overlap(x0, x1, self.x0, self.x1);
        if w.hi() == 0.0 {
            return IntervalValue::point(0.0);
        }
        let h = overlap(y0, y1, self.y0, self.y1);
        if h.hi() == 0.0 {
            return IntervalValue::point(0.0);
        }
        w * h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    kind: RegionKind,
    r: f64,
}

impl Region {
    pub fn new(kind: RegionKind, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 2.0) {
            return Err(Error::domain(format!("region parameter r must be > 2, got {r}")));
        }
        Ok(Self { kind, r })
    }

    pub fn kind(&self) -> RegionKind {
        self.kind
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Area of the region; `None` for the plane.
    pub fn area(&self) -> Option<IntervalValue> {
        let r = IntervalValue::point(self.r);
        let one = IntervalValue::point(1.0);
        let corners = 4.0 / (r * r);
        let center = (1.0 - 2.0 / r).sqr();
        match self.kind {
            RegionKind::Plane => None,
            RegionKind::UnitSquare => Some(one),
            RegionKind::GammaCross => Some(one - corners),
            RegionKind::GammaMinusCenter => Some(one - corners - center),
        }
    }

    fn bars(&self) -> (IRect, IRect, IRect) {
        let inv = 1.0 / IntervalValue::point(self.r);
        let a = inv;
        let b = 1.0 - inv;
        let zero = IntervalValue::point(0.0);
        let one = IntervalValue::point(1.0);
        let horizontal = IRect { x0: zero, x1: one, y0: a, y1: b };
        let vertical = IRect { x0: a, x1: b, y0: zero, y1: one };
        let center = IRect { x0: a, x1: b, y0: a, y1: b };
        (horizontal, vertical, center)
    }

    /// Bounding box of `region ∩ C^r_eps`.
    fn bounding_box(&self, eps: f64) -> IRect {
        match self.kind {
            RegionKind::Plane => {
                let lo = IntervalValue::point(-eps);
                let hi = 1.0 + IntervalValue::point(eps);
                IRect { x0: lo, x1: hi, y0: lo, y1: hi }
            }
            _ => {
                let zero = IntervalValue::point(0.0);
                let one = IntervalValue::point(1.0);
                IRect { x0: zero, x1: one, y0: zero, y1: one }
            }
        }
    }
}

/// Precomputed clipping geometry for one `(region, eps)` query.
struct Clipper {
    kind: RegionKind,
    bbox: IRect,
    bars: (IRect, IRect, IRect),
}

impl Clipper {
    fn new(region: &Region, eps: f64) -> Self {
        Self {
            kind: region.kind,
            bbox: region.bounding_box(eps),
            bars: region.bars(),
        }
    }

    /// Certified area of `cell ∩ region`, clamped to `[0, cell area]`.
    fn area(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> IntervalValue {
        let boxed = self.bbox.clip(x0, x1, y0, y1);
        if boxed.hi() == 0.0 {
            return boxed;
        }
        let (h, v, c) = &self.bars;
        let raw = match self.kind {
            RegionKind::Plane | RegionKind::UnitSquare => return boxed,
            RegionKind::GammaCross => h.clip(x0, x1, y0, y1) + v.clip(x0, x1, y0, y1) - c.clip(x0, x1, y0, y1),
            RegionKind::GammaMinusCenter => {
                h.clip(x0, x1, y0, y1) + v.clip(x0, x1, y0, y1) - 2.0 * c.clip(x0, x1, y0, y1)
            }
        };
        IntervalValue::raw(raw.lo().max(0.0), raw.hi().min(boxed.hi()).max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeConfig {
    /// Quadtree depth cap, counted from the root cell.
    pub max_depth: u32,
    pub oracle: OracleConfig,
}

impl Default for VolumeConfig {
    fn default() -> Self {
        Self {
            max_depth: 40,
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeResult {
    pub enclosure: IntervalValue,
    pub cells_inside: u64,
    pub cells_outside: u64,
    /// Uncertain cells left in the final frontier.
    pub cells_uncertain: u64,
    pub depth_reached: u32,
    /// `false` when the depth cap stopped refinement before the enclosure
    /// width fell below the budget. The enclosure is still valid.
    pub budget_met: bool,
    pub budget: f64,
}

impl VolumeResult {
    /// Turns an unmet budget into [`Error::BudgetNotMet`].
    pub fn require_budget(self) -> Result<Self> {
        if self.budget_met {
            Ok(self)
        } else {
            Err(Error::BudgetNotMet {
                width: self.enclosure.width(),
                budget: self.budget,
                depth: self.depth_reached,
            })
        }
    }
}

#[derive(Default)]
struct Partial {
    inside: Option<IntervalValue>,
    uncertain: Option<IntervalValue>,
    n_inside: u64,
    n_outside: u64,
    frontier: Vec<(u64, u64)>,
}

fn add_opt(acc: &mut Option<IntervalValue>, v: IntervalValue) {
    *acc = Some(match *acc {
        Some(a) => a + v,
        None => v,
    });
}

/// Quadtree area engine for one Cantor dust.
pub struct VolumeEngine {
    oracle: DistanceOracle,
    config: VolumeConfig,
}

/// One leaf of a fixed-depth classification, for rendering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifiedCell {
    pub cell: Square,
    pub class: CellClass,
}

impl VolumeEngine {
    pub fn new(params: CantorDustParams) -> Self {
        Self::with_config(params, VolumeConfig::default())
    }

    pub fn with_config(params: CantorDustParams, config: VolumeConfig) -> Self {
        Self {
            oracle: DistanceOracle::with_config(params, config.oracle),
            config,
        }
    }

    pub fn params(&self) -> &CantorDustParams {
        self.oracle.params()
    }

    /// Dyadic root: lower-left corner and side length.
    fn root(eps: f64) -> (f64, f64) {
        let mut half = 0.5;
        while half < 0.5 + eps {
            half *= 2.0;
        }
        (0.5 - half, 2.0 * half)
    }

    fn classify_cells(
        &self,
        cells: &[(u64, u64)],
        origin: f64,
        side: f64,
        eps: f64,
        clip: &Clipper,
    ) -> Result<Partial> {
        let mut part = Partial::default();
        for &(ix, iy) in cells {
            let x0 = origin + ix as f64 * side;
            let y0 = origin + iy as f64 * side;
            let area = clip.area(x0, x0 + side, y0, y0 + side);
            if area.hi() == 0.0 {
                continue;
            }
            let cell = Square { origin: [x0, y0], side };
            match self.oracle.classify(&cell, eps)? {
                CellClass::Inside => {
                    part.n_inside += 1;
                    add_opt(&mut part.inside, area);
                }
                CellClass::Outside => part.n_outside += 1,
                CellClass::Uncertain => {
                    add_opt(&mut part.uncertain, area);
                    part.frontier.push((ix, iy));
                }
            }
        }
        Ok(part)
    }

    /// Enclosure of `λ²(C^r_eps ∩ region)` of width at most `err_budget`
    /// (unless the depth cap is reached first, see
    /// [`VolumeResult::budget_met`]).
    pub fn volume(&self, eps: f64, region: &Region, err_budget: f64) -> Result<VolumeResult> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        if !(err_budget > 0.0) || !err_budget.is_finite() {
            return Err(Error::domain(format!("error budget must be positive, got {err_budget}")));
        }
        let clip = Clipper::new(region, eps);
        let (origin, root_side) = Self::root(eps);

        let mut inside = IntervalValue::point(0.0);
        let mut n_inside = 0u64;
        let mut n_outside = 0u64;
        let mut depth = 0u32;
        let mut pending: Vec<(u64, u64)> = vec![(0, 0)];
        let mut expand = false;
        loop {
            let side = root_side / (1u64 << depth) as f64;
            let parts: Vec<Result<Partial>> = pending
                .par_chunks(CHUNK)
                .map(|chunk| {
                    if expand {
                        let children: Vec<(u64, u64)> = chunk
                            .iter()
                            .flat_map(|&(ix, iy)| {
                                let (x, y) = (2 * ix, 2 * iy);
                                [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
                            })
                            .collect();
                        self.classify_cells(&children, origin, side, eps, &clip)
                    } else {
                        self.classify_cells(chunk, origin, side, eps, &clip)
                    }
                })
                .collect();
            let mut uncertain = IntervalValue::point(0.0);
            let mut frontier = Vec::new();
            for part in parts {
                let part = part?;
                if let Some(v) = part.inside {
                    inside = inside + v;
                }
                if let Some(v) = part.uncertain {
                    uncertain = uncertain + v;
                }
                n_inside += part.n_inside;
                n_outside += part.n_outside;
                frontier.extend(part.frontier);
            }
            let lo = inside.lo().max(0.0);
            let hi = if frontier.is_empty() {
                inside.hi()
            } else {
                up(inside.hi() + uncertain.hi())
            };
            let enclosure = IntervalValue::raw(lo, hi);
            let met = enclosure.width() <= err_budget || frontier.is_empty();
            if met || depth >= self.config.max_depth {
                return Ok(VolumeResult {
                    enclosure,
                    cells_inside: n_inside,
                    cells_outside: n_outside,
                    cells_uncertain: frontier.len() as u64,
                    depth_reached: depth,
                    budget_met: met,
                    budget: err_budget,
                });
            }
            pending = frontier;
            expand = true;
            depth += 1;
        }
    }

    /// Classify the quadtree down to a fixed depth and return all leaves:
    /// inside and outside cells where they were decided, uncertain cells at
    /// `depth`.
    pub fn classify_to_depth(
        &self,
        eps: f64,
        region: &Region,
        depth: u32,
    ) -> Result<Vec<ClassifiedCell>> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        let clip = Clipper::new(region, eps);
        let (origin, root_side) = Self::root(eps);
        let mut leaves = Vec::new();
        let mut pending = vec![(0u64, 0u64)];
        for d in 0..=depth {
            let side = root_side / (1u64 << d) as f64;
            let mut next = Vec::new();
            for (ix, iy) in pending {
                let x0 = origin + ix as f64 * side;
                let y0 = origin + iy as f64 * side;
                if clip.area(x0, x0 + side, y0, y0 + side).hi() == 0.0 {
                    continue;
                }
                let cell = Square { origin: [x0, y0], side };
                let class = self.oracle.classify(&cell, eps)?;
                if class == CellClass::Uncertain && d < depth {
                    let (x, y) = (2 * ix, 2 * iy);
                    next.extend([(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]);
                } else {
                    leaves.push(ClassifiedCell { cell, class });
                }
            }
            pending = next;
        }
        Ok(leaves)
    }
}

pub fn volume(
    params: &CantorDustParams,
    eps: f64,
    region: &Region,
    err_budget: f64,
) -> Result<VolumeResult> {
    VolumeEngine::new(*params).volume(eps, region, err_budget)
}

/// Enclosure of `eps^(2 - D_r)` with `D_r = ln 4 / ln r`.
pub fn scaling_denominator(r: f64, eps: f64) -> IntervalValue {
    let dim = IntervalValue::point(4.0).ln() / IntervalValue::point(r).ln();
    IntervalValue::point(eps).powf(2.0 - dim)
}

/// `λ²(C^r_eps) / eps^(2 - D_r)` together with the underlying volume result.
pub fn normalized_volume_detailed(
    params: &CantorDustParams,
    eps: f64,
    err_budget: f64,
) -> Result<(IntervalValue, VolumeResult)> {
    let region = Region::new(RegionKind::Plane, params.r())?;
    let vol = volume(params, eps, &region, err_budget)?;
    Ok((vol.enclosure / scaling_denominator(params.r(), eps), vol))
}

pub fn normalized_volume(params: &CantorDustParams, eps: f64, err_budget: f64) -> Result<IntervalValue> {
    normalized_volume_detailed(params, eps, err_budget).map(|(v, _)| v)
}

/// Split of `λ²(C^r_eps)` into the level-`n` squares (blue), the corner
/// quarter discs (red) and the fractal-boundary remainder (green).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    /// `4^n r^-2n`.
    pub blue: f64,
    /// `4^n π eps²`.
    pub red: f64,
    pub green: IntervalValue,
    pub volume: VolumeResult,
}

pub fn decompose_volume(
    params: &CantorDustParams,
    n: u32,
    eps: f64,
    err_budget: f64,
) -> Result<Decomposition> {
    let r = params.r();
    let (lo, hi) = bounds::valid_eps_range(r, n)?;
    if !bounds::in_window(eps, lo, hi) {
        return Err(Error::EpsOutOfRange { eps, lo, hi });
    }
    let region = Region::new(RegionKind::Plane, r)?;
    let vol = volume(params, eps, &region, err_budget)?;
    let count = IntervalValue::point(4f64.powi(n as i32));
    let ri = IntervalValue::point(r);
    let side = IntervalValue::point(1.0) / pow_int(ri, n);
    let blue = count * side.sqr();
    let red = count * IntervalValue::pi() * IntervalValue::point(eps).sqr();
    Ok(Decomposition {
        blue: blue.mid(),
        red: red.mid(),
        green: vol.enclosure - blue - red,
        volume: vol,
    })
}

pub(crate) fn pow_int(x: IntervalValue, n: u32) -> IntervalValue {
    (0..n).fold(IntervalValue::point(1.0), |acc, _| acc * x)
}
