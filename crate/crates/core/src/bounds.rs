//! Closed-form quantities behind the non-measurability argument.
//!
//! Each expression is written once against [`Scalar`] and evaluated either in
//! hardware floating point (`*_fast`) or as a certified [`IntervalValue`].
//! The fractions are kept in their displayed form, without algebraic
//! simplification, so each line can be audited against the derivation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{IntervalValue, Scalar};

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r > 2.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("r must be a finite number > 2, got {r}")))
    }
}

/// `log_r 4`
fn log_r4<S: Scalar>(r: S) -> S {
    S::from_f64(4.0).ln() / r.ln()
}

/// Window of radii for which `C^r_eps` splits into `4^n` congruent
/// components: `[√(1/2)·((r-2)/r)·r^-n, ((r-2)/2)·r^-n]`.
pub fn valid_eps_range(r: f64, n: u32) -> Result<(f64, f64)> {
    check_r(r)?;
    let scale = r.powi(-(n as i32));
    Ok((
        0.5f64.sqrt() * ((r - 2.0) / r) * scale,
        ((r - 2.0) / 2.0) * scale,
    ))
}

/// Relative slack for window membership. The conjecture sequences sit exactly
/// on the window endpoints, so membership is decided up to rounding.
pub const WINDOW_REL_TOL: f64 = 1e-12;

pub fn in_window(eps: f64, lo: f64, hi: f64) -> bool {
    eps >= lo * (1.0 - WINDOW_REL_TOL) && eps <= hi * (1.0 + WINDOW_REL_TOL)
}

pub fn eps_in_valid_range(r: f64, n: u32, eps: f64) -> Result<bool> {
    let (lo, hi) = valid_eps_range(r, n)?;
    Ok(in_window(eps, lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SequenceFamily {
    /// `√(1/2)·r^-n`
    Thm41First,
    /// `r^-n`
    Thm41Second,
    /// `(1/2)·((r-2)/r)·r^-(n-1)`
    ConjFirst,
    /// `√(1/2)·((r-2)/r)·r^-n`
    ConjSecond,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceSpec {
    pub family: SequenceFamily,
    pub r: f64,
}

impl SequenceSpec {
    pub fn new(family: SequenceFamily, r: f64) -> Result<Self> {
        check_r(r)?;
        Ok(Self { family, r })
    }
}

fn sequence_expr<S: Scalar>(family: SequenceFamily, r: S, n: u32) -> S {
    let one = S::from_f64(1.0);
    let half_root = S::from_f64(0.5).sqrt();
    let inv = one / r;
    let pow = |k: u32| (0..k).fold(one, |acc, _| acc * inv);
    let q = (r - S::from_f64(2.0)) / r;
    match family {
        SequenceFamily::Thm41First => half_root * pow(n),
        SequenceFamily::Thm41Second => pow(n),
        SequenceFamily::ConjFirst => S::from_f64(0.5) * q * pow(n - 1),
        SequenceFamily::ConjSecond => half_root * q * pow(n),
    }
}

/// `n`-th radius of a null sequence, `n >= 1`.
pub fn sequence_eps(spec: SequenceSpec, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("sequence index starts at 1"));
    }
    Ok(sequence_expr(spec.family, spec.r, n))
}

pub fn sequence_eps_enclosure(spec: SequenceSpec, n: u32) -> Result<IntervalValue> {
    if n == 0 {
        return Err(Error::domain("sequence index starts at 1"));
    }
    Ok(sequence_expr(spec.family, IntervalValue::point(spec.r), n))
}

fn thm41_lower_expr<S: Scalar>(r: S) -> S {
    let one = S::from_f64(1.0);
    let half_root = S::from_f64(0.5).sqrt();
    let numerator = one + S::from_f64(3.0) * half_root + S::pi() / S::from_f64(2.0);
    let denominator = S::from_f64(0.5) * S::from_f64(2.0).sqrt().powf(log_r4(r));
    numerator / denominator
}

/// `(1 + 3√(1/2) + π/2) / ((1/2)·√2^(log_r 4))`, the lower bound for the
/// normalized volume along `ε_{1,n} = √(1/2)·r^-n`.
pub fn ratio_lower_bound_thm41(r: f64) -> Result<IntervalValue> {
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::domain(format!("r must be > 1, got {r}")));
    }
    Ok(thm41_lower_expr(IntervalValue::point(r)))
}

pub fn ratio_lower_bound_thm41_fast(r: f64) -> f64 {
    thm41_lower_expr(r)
}

/// `5 + π`, the upper bound for the normalized volume along `ε_{2,n} = r^-n`.
pub fn ratio_upper_bound_thm41() -> IntervalValue {
    IntervalValue::point(5.0) + IntervalValue::pi()
}

/// Limit of [`ratio_lower_bound_thm41`] as `r → ∞`: `2(1 + 3√(1/2) + π/2)`.
pub fn ratio_lower_bound_thm41_limit() -> IntervalValue {
    let half_root = IntervalValue::point(0.5).sqrt();
    2.0 * (1.0 + 3.0 * half_root + IntervalValue::pi() / 2.0)
}

/// Width target for [`threshold_root`].
pub const THRESHOLD_WIDTH: f64 = 1e-3;

/// Enclosure of the unique `r*` with `ratio_lower_bound_thm41(r*) = 5 + π`,
/// by bisection with certified sign tests.
pub fn threshold_root() -> IntervalValue {
    threshold_root_to(THRESHOLD_WIDTH)
}

/// Bisection down to `width`, or until the sign test becomes inconclusive.
pub fn threshold_root_to(width: f64) -> IntervalValue {
    let target = ratio_upper_bound_thm41();
    let gap = |r: f64| thm41_lower_expr(IntervalValue::point(r)) - target;
    // gap(2) ≈ -3.45 and gap(1000) ≈ +0.65 with certified signs; the bound is
    // strictly increasing in r so the root is unique.
    let (mut lo, mut hi) = (2.0f64, 1000.0f64);
    debug_assert!(gap(lo).hi() < 0.0 && gap(hi).lo() > 0.0);
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid);
        if g.hi() < 0.0 {
            lo = mid;
        } else if g.lo() > 0.0 {
            hi = mid;
        } else {
            break;
        }
    }
    IntervalValue::new(lo, hi).expect("bisection keeps lo < hi")
}

fn h_expr<S: Scalar>(r: S, n: u32) -> S {
    let one = S::from_f64(1.0);
    let inv = one / r;
    let pow = (0..n).fold(one, |acc, _| acc * inv);
    S::from_f64(0.5) * ((r - S::from_f64(2.0)) / r) * pow * (r * r - one).sqrt()
}

/// Distance `h = (1/2)·((r-2)/r)·r^-n·√(r²-1)` between the level-`n` square
/// and the closest boundary point of the green region at `ε_{1,n}` of the
/// conjecture family.
pub fn h_distance(r: f64, n: u32) -> Result<f64> {
    check_r(r)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    Ok(h_expr(r, n))
}

pub fn h_distance_enclosure(r: f64, n: u32) -> Result<IntervalValue> {
    check_r(r)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    Ok(h_expr(IntervalValue::point(r), n))
}

/// Numerator and denominator of `f1`, evaluated separately.
fn f1_parts<S: Scalar>(r: S) -> (S, S) {
    let one = S::from_f64(1.0);
    let two = S::from_f64(2.0);
    let three = S::from_f64(3.0);
    let q = (r - two) / r;
    let root = (r * r - one).sqrt();
    let numerator = one + two * q * root + three * q - (three / r) * q * root
        + q * q * (r - root + r * r * S::pi() / S::from_f64(4.0));
    let d = log_r4(r);
    let denominator = S::from_f64(0.25)
        * (r - two)
        * (r - two)
        * S::from_f64(0.5).powf(-d)
        * (r - two).powf(-d);
    (numerator, denominator)
}

fn f2_parts<S: Scalar>(r: S) -> (S, S) {
    let one = S::from_f64(1.0);
    let two = S::from_f64(2.0);
    let q = (r - two) / r;
    let numerator = one + S::from_f64(8.0).sqrt() * q + S::pi() / two * q * q;
    let d = log_r4(r);
    let denominator =
        S::from_f64(0.5) * q * q * S::from_f64(0.5).sqrt().powf(-d) * q.powf(-d);
    (numerator, denominator)
}

/// Generic `f1`; exposed for precision studies with [`crate::interval::Coarse`].
pub fn f1_expr<S: Scalar>(r: S) -> S {
    let (n, d) = f1_parts(r);
    n / d
}

pub fn f2_expr<S: Scalar>(r: S) -> S {
    let (n, d) = f2_parts(r);
    n / d
}

/// Certified `f1(r)`: lower bound for the normalized volume along the first
/// conjecture sequence.
pub fn f1(r: f64) -> Result<IntervalValue> {
    check_r(r)?;
    Ok(f1_expr(IntervalValue::point(r)))
}

/// Certified `f2(r)`: upper bound for the normalized volume along the second
/// conjecture sequence.
pub fn f2(r: f64) -> Result<IntervalValue> {
    check_r(r)?;
    Ok(f2_expr(IntervalValue::point(r)))
}

pub fn f1_fast(r: f64) -> f64 {
    f1_expr(r)
}

pub fn f2_fast(r: f64) -> f64 {
    f2_expr(r)
}

/// Numerator of `f1`; tends to 1 as `r → 2⁺`.
pub fn f1_numerator(r: f64) -> f64 {
    f1_parts(r).0
}

fn green_lower_expr(r: IntervalValue, n: u32) -> IntervalValue {
    let count = crate::volume::pow_int(IntervalValue::point(4.0), n);
    let scale = 1.0 / crate::volume::pow_int(r, n);
    let half_root = IntervalValue::point(0.5).sqrt();
    count * 4.0 * 0.75 * scale * half_root * scale
}

/// `4^n·4·(3/4)·r^-n·√(1/2)·r^-n`, the lower bound for the green area at
/// `ε_{1,n} = √(1/2)·r^-n`. Requires `r >= 30`.
pub fn green_lower_bound_thm41(r: f64, n: u32) -> Result<f64> {
    green_lower_bound_thm41_enclosure(r, n).map(|v| v.mid())
}

pub fn green_lower_bound_thm41_enclosure(r: f64, n: u32) -> Result<IntervalValue> {
    if !(r.is_finite() && r >= 30.0) {
        return Err(Error::domain(format!("the green lower bound needs r >= 30, got {r}")));
    }
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    Ok(green_lower_expr(IntervalValue::point(r), n))
}

/// Convex-hull bound `4^n·4·eps·r^-n` on the green area at radius `eps`.
pub fn green_upper_convex_hull_at(r: f64, n: u32, eps: f64) -> Result<IntervalValue> {
    check_r(r)?;
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let count = crate::volume::pow_int(IntervalValue::point(4.0), n);
    let scale = 1.0 / crate::volume::pow_int(IntervalValue::point(r), n);
    Ok(count * 4.0 * IntervalValue::point(eps) * scale)
}

/// Convex-hull bound evaluated at the `n`-th radius of `spec`.
pub fn green_upper_convex_hull(spec: SequenceSpec, n: u32) -> Result<f64> {
    let eps = sequence_eps(spec, n)?;
    green_upper_convex_hull_at(spec.r, n, eps).map(|v| v.mid())
}
