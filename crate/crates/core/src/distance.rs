//! Certified distance from a point to the attractor `C^r`.
//!
//! The oracle runs a best-first branch and bound over the tree of
//! construction squares. For a square `Q`, the distance from the query point
//! to `Q` is a lower bound for the distance to `C^r ∩ Q`, and the distance to
//! the nearest corner of `Q` is an upper bound, because every corner of a
//! construction square is a fixed point of some word map and therefore lies
//! in `C^r`.
//!
//! Square positions are carried as intervals: `1/r` and `(r-1)/r` are not
//! exactly representable, so each origin coordinate is an enclosure and each
//! bound is rounded outward.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ifs::{CantorDustParams, Point, Square};
use crate::interval::{down, up, IntervalValue};

/// Deepest construction level the oracle will expand to.
pub const MAX_TREE_DEPTH: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    /// Node expansions allowed per query.
    pub node_cap: usize,
    /// Distance tolerance used by [`DistanceOracle::classify`], as a fraction
    /// of the cell half-diagonal.
    pub classifier_slack: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            node_cap: 1_000_000,
            classifier_slack: 0.125,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    pub lower: f64,
    pub upper: f64,
    pub nodes_expanded: usize,
}

impl DistanceResult {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, d: f64) -> bool {
        self.lower <= d && d <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CellClass {
    Inside,
    Outside,
    Uncertain,
}

#[derive(Clone, Copy)]
struct Node {
    lower: f64,
    /// Word letters packed two bits each from the most significant end, so
    /// integer order is lexicographic order for words of equal length.
    key: u128,
    depth: u8,
    ox: IntervalValue,
    oy: IntervalValue,
}

impl Node {
    fn rank(&self, other: &Self) -> Ordering {
        self.lower
            .total_cmp(&other.lower)
            .then(self.key.cmp(&other.key))
            .then(self.depth.cmp(&other.depth))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.rank(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap; reverse so the smallest lower bound pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.rank(self)
    }
}

/// Translation bits of the four maps, in map order.
const LETTER_OFFSETS: [(bool, bool); 4] = [(false, false), (true, false), (true, true), (false, true)];

/// Branch-and-bound distance oracle for one Cantor dust.
#[derive(Debug, Clone)]
pub struct DistanceOracle {
    params: CantorDustParams,
    config: OracleConfig,
    /// `side[k]` encloses `r^-k`.
    side: Vec<IntervalValue>,
    /// `step[k]` encloses `(r-1)/r · r^-(k-1)`, the offset of a right or upper
    /// child at depth `k` relative to its parent.
    step: Vec<IntervalValue>,
}

impl DistanceOracle {
    pub fn new(params: CantorDustParams) -> Self {
        Self::with_config(params, OracleConfig::default())
    }

    pub fn with_config(params: CantorDustParams, config: OracleConfig) -> Self {
        let r = IntervalValue::point(params.r());
        let inv = 1.0 / r;
        let t = (r - 1.0) / r;
        let mut side = vec![IntervalValue::point(1.0)];
        let mut step = vec![IntervalValue::point(0.0)];
        for k in 1..=MAX_TREE_DEPTH {
            step.push(side[k - 1] * t);
            side.push(side[k - 1] * inv);
        }
        Self {
            params,
            config,
            side,
            step,
        }
    }

    pub fn params(&self) -> &CantorDustParams {
        &self.params
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// Lower bound on the distance from `p` to the square with origin
    /// `(ox, oy)` and side `side`.
    #[inline]
    fn square_lower(p: Point, ox: IntervalValue, oy: IntervalValue, side: IntervalValue) -> f64 {
        let axis = |c: f64, o: IntervalValue| {
            let below = down(o.lo() - c);
            let above = down(c - up(o.hi() + side.hi()));
            below.max(above).max(0.0)
        };
        let dx = axis(p[0], ox);
        let dy = axis(p[1], oy);
        if dx == 0.0 && dy == 0.0 {
            return 0.0;
        }
        down(down(down(dx * dx) + down(dy * dy)).sqrt()).max(0.0)
    }

    /// Upper bound on the distance from `p` to the nearest corner of the
    /// square.
    #[inline]
    fn corner_upper(p: Point, ox: IntervalValue, oy: IntervalValue, side: IntervalValue) -> f64 {
        let axis = |c: f64, o: IntervalValue| {
            let far = c > o.hi() + 0.5 * side.hi();
            let (lo, hi) = if far {
                (down(o.lo() + side.lo()), up(o.hi() + side.hi()))
            } else {
                (o.lo(), o.hi())
            };
            // A zero difference of two floats is exact.
            let gap = |d: f64| if d == 0.0 { 0.0 } else { up(d.abs()) };
            gap(c - lo).max(gap(hi - c))
        };
        let ex = axis(p[0], ox);
        let ey = axis(p[1], oy);
        if ex == 0.0 && ey == 0.0 {
            return 0.0;
        }
        up(up(up(ex * ex) + up(ey * ey)).sqrt())
    }

    /// Distance from `p` to `C^r`, enclosed to width at most `tol`.
    pub fn distance(&self, p: Point, tol: f64) -> Result<DistanceResult> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::Tolerance(tol));
        }
        if !p.iter().all(|c| c.is_finite()) {
            return Err(Error::domain("query point must be finite"));
        }
        let zero = IntervalValue::point(0.0);
        let root = Node {
            lower: Self::square_lower(p, zero, zero, self.side[0]),
            key: 0,
            depth: 0,
            ox: zero,
            oy: zero,
        };
        let mut best = Self::corner_upper(p, zero, zero, self.side[0]);
        let mut heap = BinaryHeap::with_capacity(64);
        heap.push(root);
        let mut expanded = 0usize;
        loop {
            let top = *heap.peek().expect("frontier always holds the witness square");
            if up(best - top.lower) <= tol {
                return Ok(DistanceResult {
                    lower: top.lower.min(best),
                    upper: best,
                    nodes_expanded: expanded,
                });
            }
            heap.pop();
            let depth = usize::from(top.depth) + 1;
            if depth > MAX_TREE_DEPTH {
                return Err(Error::Resource(format!(
                    "tree depth {MAX_TREE_DEPTH} reached before tolerance {tol:e}"
                )));
            }
            expanded += 1;
            if expanded > self.config.node_cap {
                return Err(Error::Resource(format!(
                    "node cap {} exceeded",
                    self.config.node_cap
                )));
            }
            let side = self.side[depth];
            let step = self.step[depth];
            for (letter, &(bx, by)) in LETTER_OFFSETS.iter().enumerate() {
                let ox = if bx { top.ox + step } else { top.ox };
                let oy = if by { top.oy + step } else { top.oy };
                // A child lies inside its parent, so the parent bound still applies.
                let lower = Self::square_lower(p, ox, oy, side).max(top.lower);
                if lower > best {
                    continue;
                }
                best = best.min(Self::corner_upper(p, ox, oy, side));
                heap.push(Node {
                    lower,
                    key: top.key | ((letter as u128) << (2 * (64 - depth))),
                    depth: depth as u8,
                    ox,
                    oy,
                });
            }
        }
    }

    /// Classify a cell against `C^r_eps` using one distance query at the cell
    /// centre and the 1-Lipschitz property of the distance function.
    pub fn classify(&self, cell: &Square, eps: f64) -> Result<CellClass> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("eps must be positive, got {eps}")));
        }
        let c = cell.center();
        let reach = |k: usize| {
            let lo = cell.origin[k];
            let hi = cell.origin[k] + cell.side;
            up((c[k] - lo).abs()).max(up((hi - c[k]).abs()))
        };
        let (ax, ay) = (reach(0), reach(1));
        let half_diag = up(up(up(ax * ax) + up(ay * ay)).sqrt());
        let d = self.distance(c, half_diag * self.config.classifier_slack)?;
        Ok(if up(d.upper + half_diag) <= eps {
            CellClass::Inside
        } else if down(d.lower - half_diag) >= eps {
            CellClass::Outside
        } else {
            CellClass::Uncertain
        })
    }

    /// Data-parallel batch of distance queries, returned in input order.
    pub fn distances(&self, points: &[Point], tol: f64) -> Vec<Result<DistanceResult>> {
        points.par_iter().map(|&p| self.distance(p, tol)).collect()
    }
}

pub fn distance_to_attractor(
    params: &CantorDustParams,
    point: Point,
    tol: f64,
) -> Result<DistanceResult> {
    DistanceOracle::new(*params).distance(point, tol)
}

pub fn classify_cell(params: &CantorDustParams, cell: &Square, eps: f64) -> Result<CellClass> {
    DistanceOracle::new(*params).classify(cell, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{build_cantor_dust, construction_step};

    fn params(r: f64) -> CantorDustParams {
        CantorDustParams::new(r).unwrap()
    }

    #[test]
    fn origin_is_exact_zero() {
        for r in [2.5, 3.0, 30.0] {
            let d = distance_to_attractor(&params(r), [0.0, 0.0], 1e-12).unwrap();
            assert_eq!((d.lower, d.upper), (0.0, 0.0));
        }
    }

    #[test]
    fn centre_of_r5() {
        // Nearest attractor point is (0.2, 0.2) by symmetry; brute force over
        // depth-8 corners confirms it (see the oracle-equivalence tests).
        let d = distance_to_attractor(&params(5.0), [0.5, 0.5], 1e-9).unwrap();
        let exact = 0.3 * std::f64::consts::SQRT_2;
        assert!(d.contains(exact), "{d:?}");
        assert!(d.width() <= 1e-9);
    }

    #[test]
    fn right_of_r3() {
        let d = distance_to_attractor(&params(3.0), [2.0, 0.0], 1e-9).unwrap();
        assert!(d.contains(1.0) && d.width() <= 1e-9, "{d:?}");
    }

    #[test]
    fn bad_tolerance() {
        let p = params(3.0);
        for tol in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(distance_to_attractor(&p, [0.3, 0.3], tol), Err(Error::Tolerance(_))));
        }
    }

    #[test]
    fn node_cap_fails_loudly() {
        let o = DistanceOracle::with_config(
            params(2.5),
            OracleConfig {
                node_cap: 10,
                ..OracleConfig::default()
            },
        );
        assert!(matches!(o.distance([0.37, 0.61], 1e-12), Err(Error::Resource(_))));
    }

    #[test]
    fn construction_squares_are_never_outside() {
        let p = params(3.0);
        let o = DistanceOracle::new(p);
        for n in 0..5 {
            let cell = Square::new([0.0, 0.0], 3f64.powi(-n)).unwrap();
            for eps in [1e-4, 0.01, 0.3] {
                assert_ne!(o.classify(&cell, eps).unwrap(), CellClass::Outside);
            }
        }
        for sq in construction_step(&build_cantor_dust(3.0).unwrap(), 2).unwrap() {
            assert_ne!(o.classify(&sq, 1e-3).unwrap(), CellClass::Outside);
        }
    }

    #[test]
    fn classify_examples() {
        let o = DistanceOracle::new(params(5.0));
        let h = 0.01 / std::f64::consts::SQRT_2;
        let cell = Square::new([0.5 - h, 0.5 - h], 2.0 * h).unwrap();
        assert_eq!(o.classify(&cell, 0.1).unwrap(), CellClass::Outside);
        assert_eq!(o.classify(&Square::UNIT, 2.0).unwrap(), CellClass::Inside);
        assert!(o.classify(&Square::UNIT, 0.0).is_err());
    }

    #[test]
    fn smaller_tolerance_nests() {
        let o = DistanceOracle::new(params(2.5));
        let p = [0.41, -0.13];
        let mut prev = o.distance(p, 0.1).unwrap();
        for tol in [1e-2, 1e-4, 1e-7, 1e-10] {
            let d = o.distance(p, tol).unwrap();
            assert!(d.lower >= prev.lower && d.upper <= prev.upper);
            assert!(d.nodes_expanded >= prev.nodes_expanded);
            prev = d;
        }
    }

    #[test]
    fn deterministic_node_counts() {
        let o = DistanceOracle::new(params(3.0));
        let a = o.distance([0.3, 0.52], 1e-10).unwrap();
        let b = o.distance([0.3, 0.52], 1e-10).unwrap();
        assert_eq!(a, b);
    }
}
