//! Outward-rounded interval arithmetic on `f64`.
//!
//! Every operation is evaluated in round-to-nearest and then widened by one
//! unit in the last place on each side. IEEE 754 guarantees that `+ - * /` and
//! `sqrt` are correctly rounded (error at most half an ulp), so the widened
//! result always contains the exact one. `ln` and `exp` come from the platform
//! libm, which is accurate to within one ulp; their results are widened by two
//! ulps.
//!
//! The [`Scalar`] trait lets one closed-form expression be evaluated either in
//! plain hardware floating point (`f64`) or as a certified enclosure
//! ([`IntervalValue`]), and [`Coarse`] emulates a shorter mantissa so that
//! enclosure width can be studied as a function of working precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[inline]
pub(crate) fn down(x: f64) -> f64 {
    x.next_down()
}

#[inline]
pub(crate) fn up(x: f64) -> f64 {
    x.next_up()
}

/// A closed interval `[lo, hi]` certified to contain some real quantity.
#[derive(Clone, Copy, PartialEq)]
pub struct IntervalValue {
    lo: f64,
    hi: f64,
}

impl IntervalValue {
    pub const ENTIRE: IntervalValue = IntervalValue {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// The degenerate interval `[x, x]`; `x` is taken as exact.
    pub const fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    #[inline]
    pub(crate) const fn raw(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// `[lo, hi]` widened by one ulp on each side.
    fn widened(lo: f64, hi: f64) -> Self {
        Self {
            lo: down(lo),
            hi: up(hi),
        }
    }

    fn widened2(lo: f64, hi: f64) -> Self {
        Self {
            lo: down(down(lo)),
            hi: up(up(hi)),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        up(self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &IntervalValue) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `true` when every element of `self` is strictly below every element
    /// of `other`.
    pub fn certainly_lt(&self, other: &IntervalValue) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &IntervalValue) -> bool {
        self.lo > other.hi
    }

    pub fn hull(&self, other: &IntervalValue) -> IntervalValue {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Enclosure of π.
    pub fn pi() -> Self {
        // f64 PI is the nearest double below π.
        Self {
            lo: std::f64::consts::PI,
            hi: up(std::f64::consts::PI),
        }
    }

    pub fn sqr(self) -> Self {
        if self.lo >= 0.0 {
            Self::widened(self.lo * self.lo, self.hi * self.hi)
        } else if self.hi <= 0.0 {
            Self::widened(self.hi * self.hi, self.lo * self.lo)
        } else {
            let m = self.lo.abs().max(self.hi);
            Self {
                lo: 0.0,
                hi: up(m * m),
            }
        }
    }

    /// Square root; the negative part of the argument is discarded.
    pub fn sqrt(self) -> Self {
        let lo = if self.lo <= 0.0 {
            0.0
        } else {
            down(self.lo.sqrt()).max(0.0)
        };
        Self {
            lo,
            hi: up(self.hi.max(0.0).sqrt()),
        }
    }

    /// Natural logarithm; the argument must be positive.
    pub fn ln(self) -> Self {
        debug_assert!(self.lo > 0.0, "ln of non-positive interval");
        Self::widened2(self.lo.ln(), self.hi.ln())
    }

    pub fn exp(self) -> Self {
        let lo = down(down(self.lo.exp())).max(0.0);
        Self {
            lo,
            hi: up(up(self.hi.exp())),
        }
    }

    /// `self^e` for a positive base, evaluated as `exp(e ln self)`.
    pub fn powf(self, e: IntervalValue) -> Self {
        (e * self.ln()).exp()
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Self {
                lo: 0.0,
                hi: self.hi.max(-self.lo),
            }
        }
    }

    pub fn max(self, other: IntervalValue) -> Self {
        Self {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn min(self, other: IntervalValue) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

impl fmt::Debug for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lo, p, self.hi),
            None => write!(f, "[{:?}, {:?}]", self.lo, self.hi),
        }
    }
}

/// Enclosures serialize their endpoints as round-trip decimal strings so that
/// no JSON consumer re-rounds them.
impl Serialize for IntervalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("IntervalValue", 2)?;
        s.serialize_field("lo", &format!("{:?}", self.lo))?;
        s.serialize_field("hi", &format!("{:?}", self.hi))?;
        s.end()
    }
}

impl From<f64> for IntervalValue {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl Neg for IntervalValue {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Add for IntervalValue {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::widened(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for IntervalValue {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::widened(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Mul for IntervalValue {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.lo >= 0.0 && rhs.lo >= 0.0 {
            return Self::widened(self.lo * rhs.lo, self.hi * rhs.hi);
        }
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi)
    }
}

impl Div for IntervalValue {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.lo <= 0.0 && rhs.hi >= 0.0 {
            return Self::ENTIRE;
        }
        let q = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let lo = q.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::widened(lo, hi)
    }
}

macro_rules! scalar_rhs {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<f64> for IntervalValue {
            type Output = IntervalValue;
            fn $m(self, rhs: f64) -> IntervalValue {
                $tr::$m(self, IntervalValue::point(rhs))
            }
        }
        impl $tr<IntervalValue> for f64 {
            type Output = IntervalValue;
            fn $m(self, rhs: IntervalValue) -> IntervalValue {
                $tr::$m(IntervalValue::point(self), rhs)
            }
        }
    )*};
}
scalar_rhs!(Add add, Sub sub, Mul mul, Div div);

/// Number type a closed-form expression can be written against once and then
/// evaluated either fast (`f64`) or certified (`IntervalValue`).
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Embeds `x`, treated as exact.
    fn from_f64(x: f64) -> Self;
    fn pi() -> Self;
    fn sqrt(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;

    fn powf(self, e: Self) -> Self {
        (e * self.ln()).exp()
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, e: Self) -> Self {
        f64::powf(self, e)
    }
}

impl Scalar for IntervalValue {
    fn from_f64(x: f64) -> Self {
        IntervalValue::point(x)
    }
    fn pi() -> Self {
        IntervalValue::pi()
    }
    fn sqrt(self) -> Self {
        IntervalValue::sqrt(self)
    }
    fn ln(self) -> Self {
        IntervalValue::ln(self)
    }
    fn exp(self) -> Self {
        IntervalValue::exp(self)
    }
}

/// Interval arithmetic carried at a `BITS`-bit mantissa (`BITS <= 53`).
///
/// After every operation both endpoints are rounded outward to `BITS`
/// significant bits, which emulates a machine with less working precision.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coarse<const BITS: u32>(pub IntervalValue);

fn truncate_bits(x: f64, bits: u32) -> f64 {
    let shift = 53 - bits.clamp(1, 53);
    f64::from_bits(x.to_bits() & !((1u64 << shift) - 1))
}

fn away_bits(t: f64, bits: u32) -> f64 {
    let shift = 53 - bits.clamp(1, 53);
    f64::from_bits(t.to_bits() + (1u64 << shift))
}

pub(crate) fn round_down_bits(x: f64, bits: u32) -> f64 {
    if !x.is_finite() || x == 0.0 || !x.is_normal() {
        return x;
    }
    let t = truncate_bits(x, bits);
    if t == x || x > 0.0 {
        t
    } else {
        away_bits(t, bits)
    }
}

pub(crate) fn round_up_bits(x: f64, bits: u32) -> f64 {
    if !x.is_finite() || x == 0.0 || !x.is_normal() {
        return x;
    }
    let t = truncate_bits(x, bits);
    if t == x || x < 0.0 {
        t
    } else {
        away_bits(t, bits)
    }
}

impl<const BITS: u32> Coarse<BITS> {
    fn wrap(v: IntervalValue) -> Self {
        Coarse(IntervalValue::raw(
            round_down_bits(v.lo, BITS),
            round_up_bits(v.hi, BITS),
        ))
    }
}

macro_rules! coarse_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl<const BITS: u32> $tr for Coarse<BITS> {
            type Output = Self;
            fn $m(self, rhs: Self) -> Self {
                Self::wrap($tr::$m(self.0, rhs.0))
            }
        }
    )*};
}
coarse_binop!(Add add, Sub sub, Mul mul, Div div);

impl<const BITS: u32> Neg for Coarse<BITS> {
    type Output = Self;
    fn neg(self) -> Self {
        Coarse(-self.0)
    }
}

impl<const BITS: u32> Scalar for Coarse<BITS> {
    fn from_f64(x: f64) -> Self {
        Self::wrap(IntervalValue::point(x))
    }
    fn pi() -> Self {
        Self::wrap(IntervalValue::pi())
    }
    fn sqrt(self) -> Self {
        Self::wrap(self.0.sqrt())
    }
    fn ln(self) -> Self {
        Self::wrap(self.0.ln())
    }
    fn exp(self) -> Self {
        Self::wrap(self.0.exp())
    }
}
