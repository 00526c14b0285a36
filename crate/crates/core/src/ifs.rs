//! Similarities, the four-map Cantor dust system and its construction steps.

use serde::Serialize;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Default cap on the number of squares `construction_step` may return.
pub const DEFAULT_SQUARE_CAP: usize = 1 << 24; // 4^12

/// Default denominator bound for commensurability detection in
/// [`lattice_base`].
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// A contracting homothety `x ↦ ratio·x + translation`.
///
/// The orthogonal part is always the identity; rotations and reflections are
/// not representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Similarity {
    ratio: f64,
    translation: Point,
}

impl Similarity {
    pub fn new(ratio: f64, translation: Point) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::domain(format!("similarity ratio {ratio} not in (0, 1)")));
        }
        if !translation.iter().all(|t| t.is_finite()) {
            return Err(Error::domain("non-finite translation"));
        }
        Ok(Self { ratio, translation })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn translation(&self) -> Point {
        self.translation
    }

    pub fn apply(&self, p: Point) -> Point {
        [
            self.ratio * p[0] + self.translation[0],
            self.ratio * p[1] + self.translation[1],
        ]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            ratio: self.ratio * inner.ratio,
            translation: self.apply(inner.translation),
        }
    }

    pub fn identity() -> Similarity {
        // ratio 1 is not a contraction; only used as the empty-word seed.
        Similarity {
            ratio: 1.0,
            translation: [0.0, 0.0],
        }
    }
}

/// Axis-aligned rectangle; interpreted as open where the context requires.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        min: [0.0, 0.0],
        max: [1.0, 1.0],
    };

    pub fn image(&self, s: &Similarity) -> Rect {
        Rect {
            min: s.apply(self.min),
            max: s.apply(self.max),
        }
    }

    /// Closures share no point.
    fn separated_from(&self, other: &Rect) -> bool {
        (0..2).any(|k| self.max[k] < other.min[k] || other.max[k] < self.min[k])
    }

    fn contains_rect(&self, other: &Rect) -> bool {
        (0..2).all(|k| self.min[k] <= other.min[k] && other.max[k] <= self.max[k])
    }
}

/// An iterated function system of homotheties with a rectangular candidate
/// feasible open set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfSimilarSystem {
    maps: Vec<Similarity>,
    feasible_set: Rect,
}

impl SelfSimilarSystem {
    pub fn new(maps: Vec<Similarity>, feasible_set: Rect) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::domain("a self-similar system needs at least two maps"));
        }
        Ok(Self { maps, feasible_set })
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn feasible_set(&self) -> Rect {
        self.feasible_set
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(Similarity::ratio).collect()
    }

    /// Rectangle check of the open set condition: every image of the feasible
    /// set lies inside it and the images are pairwise strictly separated.
    ///
    /// Images whose closures touch are rejected, so the four-map dust fails
    /// at `r = 2` where neighbouring squares share an edge.
    pub fn satisfies_osc(&self) -> bool {
        let images: Vec<Rect> = self
            .maps
            .iter()
            .map(|m| self.feasible_set.image(m))
            .collect();
        if !images.iter().all(|im| self.feasible_set.contains_rect(im)) {
            return false;
        }
        images.iter().enumerate().all(|(i, a)| {
            images[i + 1..].iter().all(|b| a.separated_from(b))
        })
    }

    /// The composed map `S_w = S_{w_1} ∘ … ∘ S_{w_n}`.
    pub fn word_map(&self, word: &Word) -> Result<Similarity> {
        word.letters().iter().try_fold(Similarity::identity(), |acc, &l| {
            let m = self
                .maps
                .get(usize::from(l).wrapping_sub(1))
                .ok_or_else(|| Error::domain(format!("letter {l} outside the alphabet")))?;
            Ok(acc.compose(m))
        })
    }
}

/// The parameter `r` of the Cantor dust `C^r` together with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CantorDustParams {
    r: f64,
    dimension: f64,
}

impl CantorDustParams {
    pub fn new(r: f64) -> Result<Self> {
        Ok(Self {
            r,
            dimension: minkowski_dimension(r)?,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `ln 4 / ln r`.
    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    pub fn system(&self) -> SelfSimilarSystem {
        build_cantor_dust(self.r).expect("params are validated on construction")
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 2.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("r must be a finite number > 2, got {r}")))
    }
}

/// The four corner homotheties of ratio `1/r` on the unit square, in the
/// order lower-left, lower-right, upper-right, upper-left.
pub fn build_cantor_dust(r: f64) -> Result<SelfSimilarSystem> {
    check_r(r)?;
    let ratio = 1.0 / r;
    let t = (r - 1.0) / r;
    let maps = [[0.0, 0.0], [t, 0.0], [t, t], [0.0, t]]
        .into_iter()
        .map(|tr| Similarity::new(ratio, tr))
        .collect::<Result<Vec<_>>>()?;
    SelfSimilarSystem::new(maps, Rect::UNIT)
}

pub fn minkowski_dimension(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(4f64.ln() / r.ln())
}

/// A finite word over the alphabet `{1, 2, 3, 4}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.iter().any(|l| !(1..=4).contains(l)) {
            return Err(Error::domain("word letters must lie in {1, 2, 3, 4}"));
        }
        Ok(Self(letters))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words of length `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        let count = 4usize.pow(n as u32);
        (0..count).map(move |mut idx| {
            let mut letters = vec![0u8; n];
            for slot in letters.iter_mut().rev() {
                *slot = (idx % 4) as u8 + 1;
                idx /= 4;
            }
            Word(letters)
        })
    }
}

/// Axis-aligned closed square `[x, x + side] × [y, y + side]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square {
    pub origin: Point,
    pub side: f64,
}

impl Square {
    pub const UNIT: Square = Square {
        origin: [0.0, 0.0],
        side: 1.0,
    };

    pub fn new(origin: Point, side: f64) -> Result<Self> {
        if !(side > 0.0) || !origin.iter().all(|c| c.is_finite()) {
            return Err(Error::domain(format!("invalid square side {side}")));
        }
        Ok(Self { origin, side })
    }

    pub fn center(&self) -> Point {
        let h = 0.5 * self.side;
        [self.origin[0] + h, self.origin[1] + h]
    }

    pub fn corners(&self) -> [Point; 4] {
        let [x, y] = self.origin;
        let s = self.side;
        [[x, y], [x + s, y], [x + s, y + s], [x, y + s]]
    }

    pub fn contains(&self, p: Point) -> bool {
        (0..2).all(|k| self.origin[k] <= p[k] && p[k] <= self.origin[k] + self.side)
    }

    /// Euclidean distance from `p` to the square (zero inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.origin[0] - p[0]).max(p[0] - self.origin[0] - self.side).max(0.0);
        let dy = (self.origin[1] - p[1]).max(p[1] - self.origin[1] - self.side).max(0.0);
        dx.hypot(dy)
    }

    fn image(&self, s: &Similarity) -> Square {
        Square {
            origin: s.apply(self.origin),
            side: s.ratio() * self.side,
        }
    }
}

/// The `n`-th construction step: the images of the unit square under all
/// words of length `n`, in lexicographic word order.
pub fn construction_step(system: &SelfSimilarSystem, n: usize) -> Result<Vec<Square>> {
    construction_step_capped(system, n, DEFAULT_SQUARE_CAP)
}

pub fn construction_step_capped(
    system: &SelfSimilarSystem,
    n: usize,
    cap: usize,
) -> Result<Vec<Square>> {
    let k = system.maps().len();
    let count = u32::try_from(n)
        .ok()
        .and_then(|n| k.checked_pow(n))
        .filter(|&c| c <= cap)
        .ok_or_else(|| {
            Error::Resource(format!("{k}^{n} construction squares exceed the cap of {cap}"))
        })?;
    let mut level = vec![Square::UNIT];
    level.reserve(count);
    for _ in 0..n {
        level = level
            .iter()
            .flat_map(|sq| {
                // S_w ∘ S_i maps the unit square onto S_w(S_i([0,1]²)).
                let outer = Similarity {
                    ratio: sq.side,
                    translation: sq.origin,
                };
                system
                    .maps()
                    .iter()
                    .map(move |m| Square::UNIT.image(&outer.compose(m)))
            })
            .collect();
    }
    Ok(level)
}

/// Base `e^a` of a lattice system: the largest `a > 0` with every `ln r_i` in
/// `aℤ`. Returns `None` for a non-lattice list, or when commensurability
/// cannot be established with denominators up to `max_denominator`.
pub fn lattice_base(ratios: &[f64]) -> Option<f64> {
    lattice_base_with_bound(ratios, DEFAULT_MAX_DENOMINATOR)
}

pub fn lattice_base_with_bound(ratios: &[f64], max_denominator: u64) -> Option<f64> {
    if ratios.is_empty() || ratios.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return None;
    }
    let logs: Vec<f64> = ratios.iter().map(|q| -q.ln()).collect();
    let l0 = logs[0];
    // ln r_i / ln r_0 = p_i / q_i
    let mut fracs = Vec::with_capacity(logs.len());
    for &l in &logs {
        fracs.push(rational_approx(l / l0, max_denominator)?);
    }
    let common = fracs.iter().try_fold(1u64, |acc, &(_, q)| {
        let g = gcd(acc, q);
        (acc / g).checked_mul(q)
    })?;
    let numerators: Vec<u64> = fracs.iter().map(|&(p, q)| p * (common / q)).collect();
    let g = numerators.iter().copied().fold(0, gcd);
    let a = l0 * g as f64 / common as f64;
    Some(a.exp())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Continued-fraction search for `p/q ≈ x` with `q <= max_q`, accepting only
/// agreement to a few ulps of `x`.
fn rational_approx(x: f64, max_q: u64) -> Option<(u64, u64)> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let tol = 8.0 * f64::EPSILON * x;
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        if a > u64::MAX as f64 / 2.0 {
            return None;
        }
        let a = a as u64;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_q {
            return None;
        }
        if (x - p2 as f64 / q2 as f64).abs() <= tol {
            return Some((p2, q2));
        }
        let frac = rem - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rem = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}
