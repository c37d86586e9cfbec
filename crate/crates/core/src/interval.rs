//! Outward-rounded interval arithmetic over `f64` endpoints.
//!
//! Every operation returns an interval that contains the exact real (or
//! complex) result for every choice of operands drawn from the inputs. The
//! rounding mode of the FPU is never touched: each endpoint is computed in
//! round-to-nearest, the rounding error is recovered exactly with an
//! error-free transformation (TwoSum, or an FMA residual), and the endpoint is
//! stepped to the adjacent representable value only when the rounding went the
//! wrong way. Results are therefore at most one ulp wider than optimal and the
//! code is safe to call from any thread.
//!
//! There is deliberately no `PartialEq` on interval types. An interval stands
//! for an unknown number inside it, and the only order predicate offered is
//! [`RealInterval::strictly_less`].
//!
//! Endpoints are IEEE binary64. Wider formats would slot in behind the same
//! helper functions (`add_down`, `mul_up`, ...) without changing callers.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("division by an interval containing zero")]
    DivisionByZero,
    #[error("square root of an interval with negative lower endpoint")]
    NegativeSqrt,
    #[error("invalid interval endpoints")]
    InvalidEndpoints,
    #[error("logarithm of an interval that is not strictly positive")]
    NonPositiveLog,
    #[error("argument of a box not strictly inside the upper half-plane")]
    OutsideUpperHalfPlane,
}

// ---------------------------------------------------------------------------
// Directed-rounding helpers.

/// Below this magnitude an FMA residual may fall into the subnormal range and
/// lose its sign, so the helpers step outward unconditionally.
const EXACT_RESIDUAL_MIN: f64 = 1.0e-291;

fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if s.is_nan() {
        return f64::NEG_INFINITY;
    }
    if s.is_infinite() {
        if a.is_finite() && b.is_finite() && s > 0.0 {
            return f64::MAX;
        }
        return s;
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    if err < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    -add_down(-a, -b)
}

fn sub_down(a: f64, b: f64) -> f64 {
    add_down(a, -b)
}

fn sub_up(a: f64, b: f64) -> f64 {
    add_up(a, -b)
}

fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if p.is_infinite() {
        if a.is_finite() && b.is_finite() && p > 0.0 {
            return f64::MAX;
        }
        return p;
    }
    if p.abs() < EXACT_RESIDUAL_MIN {
        return p.next_down();
    }
    let err = a.mul_add(b, -p);
    if err < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    -mul_down(-a, b)
}

fn div_down(a: f64, b: f64) -> f64 {
    debug_assert!(b != 0.0);
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if q.is_infinite() {
        if a.is_finite() && q > 0.0 {
            return f64::MAX;
        }
        return q;
    }
    if b.is_infinite() {
        // The quotient tends to zero; zero bounds it from either side.
        return 0.0;
    }
    if q.abs() < EXACT_RESIDUAL_MIN || a.abs() < EXACT_RESIDUAL_MIN {
        return q.next_down();
    }
    let rem = (-q).mul_add(b, a);
    if rem != 0.0 && ((rem < 0.0) != (b < 0.0)) {
        q.next_down()
    } else {
        q
    }
}

fn div_up(a: f64, b: f64) -> f64 {
    -div_down(-a, b)
}

fn sqrt_down(x: f64) -> f64 {
    if x == 0.0 || x.is_infinite() {
        return x;
    }
    let s = x.sqrt();
    if x < EXACT_RESIDUAL_MIN {
        return s.next_down().max(0.0);
    }
    let rem = (-s).mul_add(s, x);
    if rem < 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn sqrt_up(x: f64) -> f64 {
    if x == 0.0 || x.is_infinite() {
        return x;
    }
    let s = x.sqrt();
    if x < EXACT_RESIDUAL_MIN {
        return s.next_up();
    }
    let rem = (-s).mul_add(s, x);
    if rem > 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn min4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.min(b).min(c.min(d))
}

fn max4(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a.max(b).max(c.max(d))
}

// ---------------------------------------------------------------------------

/// A closed interval `[lo, hi]` of reals with binary64 endpoints.
#[derive(Clone, Copy, Debug)]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, DomainError> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(DomainError::InvalidEndpoints);
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`. The value must not be NaN.
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN is not a valid interval endpoint");
        Self { lo: x, hi: x }
    }

    /// Interval around a signed integer; exact whenever `n` fits in 53 bits.
    pub fn from_int(n: i64) -> Self {
        let x = n as f64;
        if x as i128 == n as i128 {
            Self::point(x)
        } else {
            Self { lo: x.next_down(), hi: x.next_up() }
        }
    }

    /// Smallest interval of doubles containing the rational `num / den`.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self, DomainError> {
        Self::from_int(num).div(Self::from_int(den))
    }

    /// Smallest interval of doubles containing an exact rational.
    pub fn enclose_rational(x: &BigRational) -> Self {
        let approx = x.to_f64().unwrap_or(f64::NAN);
        if !approx.is_finite() {
            return if x.is_negative() {
                Self { lo: f64::NEG_INFINITY, hi: -f64::MAX }
            } else {
                Self { lo: f64::MAX, hi: f64::INFINITY }
            };
        }
        let exact = |v: f64| BigRational::from_float(v).expect("finite");
        let mut lo = approx;
        while lo.is_finite() && exact(lo) > *x {
            lo = lo.next_down();
        }
        let mut hi = approx;
        while hi.is_finite() && exact(hi) < *x {
            hi = hi.next_up();
        }
        if exact(lo) == *x {
            hi = lo;
        } else if exact(hi) == *x {
            lo = hi;
        }
        Self { lo, hi }
    }

    pub const ZERO: RealInterval = RealInterval { lo: 0.0, hi: 0.0 };
    pub const ONE: RealInterval = RealInterval { lo: 1.0, hi: 1.0 };
    pub const ENTIRE: RealInterval = RealInterval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> f64 {
        sub_up(self.hi, self.lo)
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            if self.lo.is_infinite() && self.hi.is_infinite() {
                return 0.0;
            }
            return if self.lo.is_infinite() { self.hi } else { self.lo };
        }
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    /// Upper bound on `max |x|` over the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Exact containment test for a rational number.
    pub fn contains(&self, x: &BigRational) -> bool {
        let above_lo = if self.lo == f64::NEG_INFINITY {
            true
        } else {
            BigRational::from_float(self.lo).expect("finite") <= *x
        };
        let below_hi = if self.hi == f64::INFINITY {
            true
        } else {
            *x <= BigRational::from_float(self.hi).expect("finite")
        };
        above_lo && below_hi
    }

    /// `true` only when every point of `self` is below every point of
    /// `other`. `false` means "not provably less".
    pub fn strictly_less(&self, other: &RealInterval) -> bool {
        self.hi < other.lo
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.strictly_less(&Self::ZERO)
    }

    pub fn is_strictly_positive(&self) -> bool {
        Self::ZERO.strictly_less(self)
    }

    /// `self` lies in the interior of `other`.
    pub fn interior_of(&self, other: &RealInterval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn subset_of(&self, other: &RealInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &RealInterval) -> Option<RealInterval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(RealInterval { lo, hi })
    }

    pub fn hull(&self, other: &RealInterval) -> RealInterval {
        RealInterval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// `[mid - r, mid + r]` widened outward.
    pub fn around(center: f64, radius: f64) -> Self {
        let r = radius.abs();
        Self { lo: sub_down(center, r), hi: add_up(center, r) }
    }

    pub fn div(self, rhs: RealInterval) -> Result<RealInterval, DomainError> {
        if rhs.contains_zero() {
            return Err(DomainError::DivisionByZero);
        }
        let (a, b) = (self, rhs);
        Ok(RealInterval {
            lo: min4(
                div_down(a.lo, b.lo),
                div_down(a.lo, b.hi),
                div_down(a.hi, b.lo),
                div_down(a.hi, b.hi),
            ),
            hi: max4(div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)),
        })
    }

    pub fn recip(self) -> Result<RealInterval, DomainError> {
        Self::ONE.div(self)
    }

    pub fn sqrt(self) -> Result<RealInterval, DomainError> {
        if self.lo < 0.0 {
            return Err(DomainError::NegativeSqrt);
        }
        Ok(RealInterval { lo: sqrt_down(self.lo), hi: sqrt_up(self.hi) })
    }

    /// Square with the dependency between the two factors taken into account.
    pub fn sqr(self) -> RealInterval {
        if self.lo >= 0.0 {
            RealInterval { lo: mul_down(self.lo, self.lo), hi: mul_up(self.hi, self.hi) }
        } else if self.hi <= 0.0 {
            RealInterval { lo: mul_down(self.hi, self.hi), hi: mul_up(self.lo, self.lo) }
        } else {
            let m = self.mag();
            RealInterval { lo: 0.0, hi: mul_up(m, m) }
        }
    }

    /// Intersect with `[0, +inf)`. Used where the exact value is known to be
    /// non-negative (e.g. a Heron radicand of a genuine triangle).
    pub fn clamp_nonnegative(self) -> Option<RealInterval> {
        self.intersect(&RealInterval { lo: 0.0, hi: f64::INFINITY })
    }

    pub fn scale(self, k: f64) -> RealInterval {
        self * RealInterval::point(k)
    }
}

// ---------------------------------------------------------------------------
// Elementary functions, built from the field operations and `sqrt` by
// argument reduction and a truncated series with an explicit remainder.

/// `2·atanh(u) = ln((1+u)/(1-u))` for a point `|u| ≤ 0.2`.
fn two_atanh_small(u: RealInterval) -> RealInterval {
    const TERMS: i64 = 14;
    let u2 = u.sqr();
    let mut sum = RealInterval::ZERO;
    let mut power = u;
    for k in 0..TERMS {
        sum = sum + power.div(RealInterval::from_int(2 * k + 1)).expect("odd denominator");
        power = power * u2;
    }
    // Tail is bounded by |u|^(2N+1) / ((2N+1)(1-u²)).
    let m = power.mag();
    let tail = mul_up(m, 1.0 / (2 * TERMS + 1) as f64 * 1.2);
    (sum + RealInterval { lo: -tail, hi: tail }).scale(2.0)
}

/// Alternating series for `atan(y)`, `|y| ≤ 0.2`.
fn atan_small(y: RealInterval) -> RealInterval {
    const TERMS: i64 = 14;
    let y2 = y.sqr();
    let mut sum = RealInterval::ZERO;
    let mut power = y;
    for k in 0..TERMS {
        let term = power.div(RealInterval::from_int(2 * k + 1)).expect("odd denominator");
        sum = if k % 2 == 0 { sum + term } else { sum - term };
        power = power * y2;
    }
    let tail = mul_up(power.mag(), 1.0 / (2 * TERMS + 1) as f64 * 1.1);
    sum + RealInterval { lo: -tail, hi: tail }
}

fn ln2() -> RealInterval {
    // ln 2 = 2·atanh(1/3)
    two_atanh_small(RealInterval::from_ratio(1, 3).expect("nonzero"))
}

/// Enclosure of `ln x` for a finite positive double.
fn ln_point(x: f64) -> RealInterval {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut e = x.log2().floor() as i32;
    let mut m = x / 2f64.powi(e);
    if !(m.is_finite() && m > 0.0) {
        // Subnormal input: scale up first.
        let scaled = x * 2f64.powi(64);
        return ln_point(scaled) - ln2().scale(64.0);
    }
    if m > std::f64::consts::SQRT_2 {
        m /= 2.0;
        e += 1;
    } else if m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        e -= 1;
    }
    let m = RealInterval::point(m);
    let u = (m - RealInterval::ONE).div(m + RealInterval::ONE).expect("positive");
    two_atanh_small(u) + ln2() * RealInterval::from_int(e as i64)
}

/// Enclosure of `atan x` for a finite double.
fn atan_point(x: f64) -> RealInterval {
    if x < 0.0 {
        return -atan_point(-x);
    }
    if x > 1.0 {
        // atan x = π/2 - atan(1/x), with 1/x enclosed and atan monotone.
        let r = RealInterval::point(x).recip().expect("positive");
        let inner = atan_point(r.lo).hull(&atan_point(r.hi));
        return RealInterval::PI.scale(0.5) - inner;
    }
    // Two half-angle reductions: atan x = 2·atan(x / (1 + √(1 + x²))).
    let mut y = RealInterval::point(x);
    for _ in 0..2 {
        let root = (RealInterval::ONE + y.sqr()).sqrt().expect("positive");
        y = y.div(RealInterval::ONE + root).expect("positive");
    }
    atan_small(y).scale(4.0)
}

impl RealInterval {
    /// Enclosure of π.
    pub const PI: RealInterval = RealInterval { lo: std::f64::consts::PI, hi: 3.1415926535897936 };

    /// Natural logarithm of a strictly positive interval.
    pub fn ln(self) -> Result<RealInterval, DomainError> {
        if !(self.lo > 0.0) || !self.hi.is_finite() {
            return Err(DomainError::NonPositiveLog);
        }
        Ok(RealInterval { lo: ln_point(self.lo).lo, hi: ln_point(self.hi).hi })
    }

    /// Arctangent, with values in `(-π/2, π/2)`.
    pub fn atan(self) -> RealInterval {
        let lo = if self.lo.is_finite() { atan_point(self.lo).lo } else { -RealInterval::PI.scale(0.5).hi };
        let hi = if self.hi.is_finite() { atan_point(self.hi).hi } else { RealInterval::PI.scale(0.5).hi };
        RealInterval { lo, hi }
    }
}

impl Add for RealInterval {
    type Output = RealInterval;
    fn add(self, rhs: RealInterval) -> RealInterval {
        RealInterval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl Sub for RealInterval {
    type Output = RealInterval;
    fn sub(self, rhs: RealInterval) -> RealInterval {
        RealInterval { lo: sub_down(self.lo, rhs.hi), hi: sub_up(self.hi, rhs.lo) }
    }
}

impl Mul for RealInterval {
    type Output = RealInterval;
    fn mul(self, rhs: RealInterval) -> RealInterval {
        let (a, b) = (self, rhs);
        RealInterval {
            lo: min4(
                mul_down(a.lo, b.lo),
                mul_down(a.lo, b.hi),
                mul_down(a.hi, b.lo),
                mul_down(a.hi, b.hi),
            ),
            hi: max4(mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)),
        }
    }
}

impl Neg for RealInterval {
    type Output = RealInterval;
    fn neg(self) -> RealInterval {
        RealInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl std::iter::Sum for RealInterval {
    fn sum<I: Iterator<Item = RealInterval>>(iter: I) -> RealInterval {
        iter.fold(RealInterval::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.17e}, {:.17e}]", self.lo, self.hi)
    }
}

impl Serialize for RealInterval {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("RealInterval", 3)?;
        s.serialize_field("lo", &hex_float(self.lo))?;
        s.serialize_field("hi", &hex_float(self.hi))?;
        s.serialize_field("approx", &format!("[{:.12e}, {:.12e}]", self.lo, self.hi))?;
        s.end()
    }
}

// ---------------------------------------------------------------------------

/// Axis-aligned rectangle `{x + iy : x ∈ re, y ∈ im}`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexBox {
    pub re: RealInterval,
    pub im: RealInterval,
}

impl ComplexBox {
    pub fn new(re: RealInterval, im: RealInterval) -> Self {
        Self { re, im }
    }

    pub fn point(re: f64, im: f64) -> Self {
        Self { re: RealInterval::point(re), im: RealInterval::point(im) }
    }

    pub fn real(x: RealInterval) -> Self {
        Self { re: x, im: RealInterval::ZERO }
    }

    pub const ONE: ComplexBox = ComplexBox { re: RealInterval::ONE, im: RealInterval::ZERO };

    /// Enclosure of `|z|^2`.
    pub fn norm_sqr(&self) -> RealInterval {
        self.re.sqr() + self.im.sqr()
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self) -> RealInterval {
        self.norm_sqr().sqrt().expect("sum of squares is non-negative")
    }

    /// Enclosure of `cos(arg z) = re / |z|`.
    pub fn cos_arg(&self) -> Result<RealInterval, DomainError> {
        let c = self.re.div(self.abs())?;
        // The true value lies in [-1, 1].
        Ok(c.intersect(&RealInterval { lo: -1.0, hi: 1.0 }).unwrap_or(c))
    }

    /// `arg z ∈ (0, π)` for a box strictly inside the upper half-plane.
    pub fn arg_upper(&self) -> Result<RealInterval, DomainError> {
        if !self.im.is_strictly_positive() {
            return Err(DomainError::OutsideUpperHalfPlane);
        }
        let t = self.re.div(self.im)?;
        let a = RealInterval::PI.scale(0.5) - t.atan();
        Ok(a.intersect(&RealInterval { lo: 0.0, hi: RealInterval::PI.hi }).unwrap_or(a))
    }

    /// Principal logarithm `ln|z| + i·arg z` of a box in the upper half-plane.
    pub fn log_upper(&self) -> Result<ComplexBox, DomainError> {
        let arg = self.arg_upper()?;
        let re = self.norm_sqr().ln()?.scale(0.5);
        Ok(ComplexBox { re, im: arg })
    }

    pub fn conj(self) -> ComplexBox {
        ComplexBox { re: self.re, im: -self.im }
    }

    pub fn div(self, rhs: ComplexBox) -> Result<ComplexBox, DomainError> {
        let den = rhs.norm_sqr();
        if den.contains_zero() {
            return Err(DomainError::DivisionByZero);
        }
        let num = self * rhs.conj();
        Ok(ComplexBox { re: num.re.div(den)?, im: num.im.div(den)? })
    }

    pub fn recip(self) -> Result<ComplexBox, DomainError> {
        ComplexBox::ONE.div(self)
    }

    pub fn contains_point(&self, re: f64, im: f64) -> bool {
        self.re.contains_f64(re) && self.im.contains_f64(im)
    }

    pub fn interior_of(&self, other: &ComplexBox) -> bool {
        self.re.interior_of(&other.re) && self.im.interior_of(&other.im)
    }

    pub fn intersect(&self, other: &ComplexBox) -> Option<ComplexBox> {
        Some(ComplexBox { re: self.re.intersect(&other.re)?, im: self.im.intersect(&other.im)? })
    }

    pub fn mid(&self) -> (f64, f64) {
        (self.re.mid(), self.im.mid())
    }

    pub fn width(&self) -> f64 {
        self.re.width().max(self.im.width())
    }

    pub fn scale(self, k: RealInterval) -> ComplexBox {
        ComplexBox { re: self.re * k, im: self.im * k }
    }
}

impl Add for ComplexBox {
    type Output = ComplexBox;
    fn add(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for ComplexBox {
    type Output = ComplexBox;
    fn sub(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for ComplexBox {
    type Output = ComplexBox;
    fn mul(self, rhs: ComplexBox) -> ComplexBox {
        ComplexBox {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Neg for ComplexBox {
    type Output = ComplexBox;
    fn neg(self) -> ComplexBox {
        ComplexBox { re: -self.re, im: -self.im }
    }
}

impl fmt::Display for ComplexBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

impl Serialize for ComplexBox {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ComplexBox", 2)?;
        s.serialize_field("re", &self.re)?;
        s.serialize_field("im", &self.im)?;
        s.end()
    }
}

// ---------------------------------------------------------------------------
// Hexadecimal float literals, e.g. `0x1.8p+1` for 3.0.

pub fn hex_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sign = if x.is_sign_negative() { "-" } else { "" };
    if x == 0.0 {
        return format!("{sign}0x0p+0");
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let mant = bits & ((1u64 << 52) - 1);
    let (lead, exp) = if exp_bits == 0 { (0, -1022) } else { (1, exp_bits - 1023) };
    let mut frac = format!("{mant:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let exp_sign = if exp < 0 { '-' } else { '+' };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp_sign}{}", exp.abs())
    } else {
        format!("{sign}0x{lead}.{frac}p{exp_sign}{}", exp.abs())
    }
}

pub fn parse_hex_float(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body.strip_prefix("0x")?;
    let (mant_str, exp_str) = body.split_once('p')?;
    let exp: i32 = exp_str.parse().ok()?;
    let (int_part, frac_part) = mant_str.split_once('.').unwrap_or((mant_str, ""));
    if int_part.len() != 1 || frac_part.len() > 13 {
        return None;
    }
    let lead = u64::from_str_radix(int_part, 16).ok()?;
    let frac = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).ok()? << (4 * (13 - frac_part.len()))
    };
    let value = match (lead, exp) {
        (0, _) if frac == 0 => 0.0,
        (0, -1022) => f64::from_bits(frac),
        (1, e) if (-1022..=1023).contains(&e) => f64::from_bits((((e + 1023) as u64) << 52) | frac),
        _ => return None,
    };
    Some(if neg { -value } else { value })
}
