//! Binary floating-point reals carrying an explicit precision tag.
//!
//! A [`Real`] is `mant * 2^exp` with `|mant| < 2^prec`. Every arithmetic
//! result is rounded to nearest-even at the precision of its operands;
//! division and square root carry a sticky bit so they are correctly
//! rounded. Mixing operands of different precision in arithmetic is a
//! programming error and panics; comparisons across precisions return
//! [`Error::PrecisionMismatch`].
//!
//! Transcendentals (`atan`, `pi`) are evaluated in fixed point with
//! [`GUARD_BITS`] extra bits and rounded once at the end.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Mutex;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 192;
pub const MIN_PRECISION: u32 = 64;
pub const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug)]
pub struct Real {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

/// Shift a magnitude right by `s` bits, rounding half to even.
fn shr_round_even(mag: &BigUint, s: u64) -> BigUint {
    if s == 0 {
        return mag.clone();
    }
    let q = mag >> s;
    let rem = mag - (&q << s);
    let half = BigUint::one() << (s - 1);
    match rem.cmp(&half) {
        Ordering::Greater => q + 1u32,
        Ordering::Equal if q.is_odd() => q + 1u32,
        _ => q,
    }
}

fn shr_round_signed(m: &BigInt, s: u64) -> BigInt {
    let mag = shr_round_even(m.magnitude(), s);
    BigInt::from_biguint(m.sign(), mag)
}

impl Real {
    fn normalize(mant: BigInt, exp: i64, prec: u32) -> Real {
        assert!(prec >= 2, "precision must be at least 2 bits");
        if mant.is_zero() {
            return Real {
                mant,
                exp: 0,
                prec,
            };
        }
        let bits = mant.bits();
        let (mut mant, mut exp) = if bits > prec as u64 {
            let s = bits - prec as u64;
            (shr_round_signed(&mant, s), exp + s as i64)
        } else {
            (mant, exp)
        };
        if mant.bits() > prec as u64 {
            // rounding carried into a new bit; the value is a power of two
            mant >>= 1u32;
            exp += 1;
        }
        Real { mant, exp, prec }
    }

    pub fn zero(prec: u32) -> Real {
        Real::normalize(BigInt::zero(), 0, prec)
    }

    pub fn one(prec: u32) -> Real {
        Real::from_int(1, prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Real {
        Real::normalize(n.into(), 0, prec)
    }

    /// Correctly rounded conversion of an exact rational.
    pub fn from_ratio(r: &BigRational, prec: u32) -> Real {
        Real::quotient(r.numer(), r.denom(), 0, prec)
    }

    /// Exact conversion of a finite `f64`, then rounded to `prec`.
    pub fn from_f64(x: f64, prec: u32) -> Real {
        let r = BigRational::from_float(x).expect("finite f64");
        Real::from_ratio(&r, prec)
    }

    /// `n / d * 2^exp`, correctly rounded.
    fn quotient(n: &BigInt, d: &BigInt, exp: i64, prec: u32) -> Real {
        assert!(!d.is_zero(), "division by zero");
        if n.is_zero() {
            return Real::zero(prec);
        }
        let negative = n.is_negative() != d.is_negative();
        let nm = n.magnitude();
        let dm = d.magnitude();
        let shift = (prec as i64 + 3 + dm.bits() as i64 - nm.bits() as i64).max(0) as u64;
        let (q, r) = (nm << shift).div_rem(dm);
        let mut q = q << 1u32;
        if !r.is_zero() {
            q += 1u32;
        }
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Real::normalize(
            BigInt::from_biguint(sign, q),
            exp - shift as i64 - 1,
            prec,
        )
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn abs(&self) -> Real {
        Real {
            mant: self.mant.abs(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    /// Re-round to a different precision. Widening is exact.
    pub fn with_precision(&self, prec: u32) -> Real {
        Real::normalize(self.mant.clone(), self.exp, prec)
    }

    /// Multiply by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Real {
        if self.is_zero() {
            return self.clone();
        }
        Real {
            mant: self.mant.clone(),
            exp: self.exp + k,
            prec: self.prec,
        }
    }

    /// Position just above the leading bit: `|x|` lies in `[2^(t-1), 2^t)`.
    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    /// Binary exponent `e` with `2^e <= |x| < 2^(e+1)`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.top() - 1)
        }
    }

    /// Unit in the last place at this value's precision (zero for zero).
    pub fn ulp(&self) -> Real {
        match self.exponent() {
            None => Real::zero(self.prec),
            Some(e) => Real::normalize(BigInt::one(), e - self.prec as i64 + 1, self.prec),
        }
    }

    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            self.mant.div_floor(&(BigInt::one() << (-self.exp) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (shr_round_signed(&self.mant, s), self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mut v = m.to_f64().unwrap_or(f64::NAN);
        let mut e = e;
        while e > 0 {
            let step = e.min(1000);
            v *= 2f64.powi(step as i32);
            e -= step;
        }
        while e < 0 {
            let step = (-e).min(1000);
            v /= 2f64.powi(step as i32);
            e += step;
        }
        v
    }

    /// Exact comparison of the represented values, ignoring precision tags.
    pub(crate) fn cmp_value(&self, other: &Real) -> Ordering {
        let (sa, sb) = (self.mant.sign(), other.mant.sign());
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.mant.magnitude() << (self.exp - e) as u64;
                let b = other.mant.magnitude() << (other.exp - e) as u64;
                a.cmp(&b)
            }
            o => o,
        };
        if sa == Sign::Minus {
            mag.reverse()
        } else {
            mag
        }
    }

    pub fn try_cmp(&self, other: &Real) -> Result<Ordering> {
        if self.prec != other.prec {
            return Err(Error::PrecisionMismatch {
                left: self.prec,
                right: other.prec,
            });
        }
        Ok(self.cmp_value(other))
    }

    pub fn try_lt(&self, other: &Real) -> Result<bool> {
        Ok(self.try_cmp(other)? == Ordering::Less)
    }

    /// Exact comparison against a rational.
    pub fn cmp_ratio(&self, r: &BigRational) -> Ordering {
        self.to_ratio().cmp(r)
    }

    pub fn sqrt(&self) -> Real {
        assert!(!self.is_negative(), "square root of a negative value");
        if self.is_zero() {
            return self.clone();
        }
        let target = 2 * (self.prec as i64 + 2);
        let mut shift = (target - self.mant.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let n = self.mant.magnitude() << shift as u64;
        let root = n.sqrt();
        let mut r = root.clone() << 1u32;
        if &root * &root != n {
            r += 1u32;
        }
        Real::normalize(
            BigInt::from_biguint(Sign::Plus, r),
            (self.exp - shift) / 2 - 1,
            self.prec,
        )
    }

    pub fn min<'a>(&'a self, other: &'a Real) -> &'a Real {
        if self.cmp_value(other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Real) -> &'a Real {
        if self.cmp_value(other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn square(&self) -> Real {
        self * self
    }

    pub fn recip(&self) -> Real {
        &Real::one(self.prec) / self
    }

    pub fn atan(&self) -> Real {
        let prec = self.prec;
        if self.is_zero() {
            return Real::zero(prec);
        }
        let work = prec + GUARD_BITS;
        let x = self.abs().with_precision(work);
        let one = Real::one(work);
        let r = if x.cmp_value(&one) == Ordering::Greater {
            let half_pi = pi(work).mul_pow2(-1);
            &half_pi - &atan_unit(&x.recip(), work)
        } else {
            atan_unit(&x, work)
        };
        let r = if self.is_negative() { -r } else { r };
        r.with_precision(prec)
    }

    /// Angle of the vector `(x, y)` in `(-π, π]`.
    pub fn atan2(y: &Real, x: &Real) -> Real {
        assert_eq!(y.prec, x.prec, "atan2 operands differ in precision");
        let prec = y.prec;
        let work = prec + GUARD_BITS;
        if x.is_zero() {
            if y.is_zero() {
                return Real::zero(prec);
            }
            let h = pi(work).mul_pow2(-1);
            let h = if y.is_negative() { -h } else { h };
            return h.with_precision(prec);
        }
        let (yw, xw) = (y.with_precision(work), x.with_precision(work));
        let base = (&yw / &xw).atan();
        let r = if x.is_positive() {
            base
        } else if y.is_negative() {
            &base - &pi(work)
        } else {
            &base + &pi(work)
        };
        r.with_precision(prec)
    }

    /// Decimal rendering with `sig` significant digits. Fixed notation for
    /// decimal exponents in `[-6, 20]`, scientific otherwise.
    pub fn to_decimal(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let exact = self.to_ratio().abs();
        let top = self.top();
        let mut e10 = ((top - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let digits = loop {
            let k = sig as i64 - 1 - e10;
            let scaled = if k >= 0 {
                &exact * BigRational::from_integer(BigInt::from(10u32).pow(k as u32))
            } else {
                &exact / BigRational::from_integer(BigInt::from(10u32).pow((-k) as u32))
            };
            let d = round_half_even(&scaled);
            let lo = BigInt::from(10u32).pow(sig as u32 - 1);
            let hi = BigInt::from(10u32).pow(sig as u32);
            if d >= hi {
                e10 += 1;
            } else if d < lo {
                e10 -= 1;
            } else {
                break d.to_string();
            }
        };
        let sign = if self.is_negative() { "-" } else { "" };
        if (-6..=20).contains(&e10) {
            let body = if e10 >= 0 {
                let int_len = (e10 + 1) as usize;
                if int_len >= digits.len() {
                    format!("{}{}", digits, "0".repeat(int_len - digits.len()))
                } else {
                    format!("{}.{}", &digits[..int_len], &digits[int_len..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-e10 - 1) as usize), digits)
            };
            format!("{sign}{body}")
        } else {
            let mantissa = if digits.len() > 1 {
                format!("{}.{}", &digits[..1], &digits[1..])
            } else {
                digits
            };
            format!("{sign}{mantissa}e{e10}")
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn round_half_even(r: &BigRational) -> BigInt {
    let fl = r.floor();
    let frac = r - &fl;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let f = fl.to_integer();
    match frac.cmp(&half) {
        Ordering::Greater => f + 1,
        Ordering::Equal if f.is_odd() => f + 1,
        _ => f,
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.write_str(&self.to_decimal(digits))
    }
}

fn to_fixed(x: &Real, frac: i64) -> BigInt {
    let shift = x.exp + frac;
    if shift >= 0 {
        &x.mant << shift as u64
    } else {
        shr_round_signed(&x.mant, (-shift) as u64)
    }
}

/// `atan(x)` for `0 < x <= 1` at `work` bits, via repeated half-angle
/// reduction followed by the Taylor series.
fn atan_unit(x: &Real, work: u32) -> Real {
    let frac = work as i64 + 16 + (-x.top()).max(0);
    let f = frac as u64;
    let one = BigInt::one() << f;
    let one_sq = BigInt::one() << (2 * f);
    let mut t = to_fixed(x, frac);
    let mut halvings = 0i64;
    let threshold = BigInt::one() << (f - 8);
    while t > threshold {
        let s = (&one_sq + &t * &t).sqrt();
        t = (&t << f) / (&one + s);
        halvings += 1;
    }
    let t2 = (&t * &t) >> f;
    let mut power = t.clone();
    let mut sum = t;
    let mut n = 1u64;
    loop {
        power = (&power * &t2) >> f;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * n + 1);
        if n % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        n += 1;
    }
    Real::normalize(sum, halvings - frac, work)
}

/// `atan(1/n) * 2^f` in fixed point.
fn atan_inv_fixed(n: u64, f: u64) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut term = (BigInt::one() << f) / BigInt::from(n);
    let mut sum = term.clone();
    let mut k = 1u64;
    loop {
        term /= &n2;
        if term.is_zero() {
            break;
        }
        let t = &term / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

/// `π * 2^f` from Machin's formula, accurate to a few units in the last place.
pub(crate) fn pi_fixed(f: u64) -> BigInt {
    let g = f + 16;
    let v = atan_inv_fixed(5, g) * 16 - atan_inv_fixed(239, g) * 4;
    shr_round_signed(&v, 16)
}

static PI_CACHE: Mutex<Option<Real>> = Mutex::new(None);

pub fn pi(prec: u32) -> Real {
    let mut cache = PI_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(c) = cache.as_ref() {
        if c.prec >= prec + 32 {
            return c.with_precision(prec);
        }
    }
    let work = (prec + GUARD_BITS).max(512);
    let f = work as u64 + 8;
    let value = Real::normalize(pi_fixed(f), -(f as i64), work);
    let out = value.with_precision(prec);
    *cache = Some(value);
    out
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a> $trait<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                assert_eq!(
                    self.prec, rhs.prec,
                    "arithmetic on reals of different precision"
                );
                let f: fn(&Real, &Real) -> Real = $body;
                f(self, rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

fn add_impl(a: &Real, b: &Real) -> Real {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let (hi, lo) = if a.top() >= b.top() { (a, b) } else { (b, a) };
    if hi.top() - lo.top() > hi.prec as i64 + 2 {
        return hi.clone();
    }
    let e = a.exp.min(b.exp);
    let m = (&a.mant << (a.exp - e) as u64) + (&b.mant << (b.exp - e) as u64);
    Real::normalize(m, e, a.prec)
}

binop!(Add, add, add_impl);
binop!(Sub, sub, |a, b| add_impl(a, &-b));
binop!(Mul, mul, |a, b| Real::normalize(
    &a.mant * &b.mant,
    a.exp + b.exp,
    a.prec
));
binop!(Div, div, |a, b| Real::quotient(
    &a.mant,
    &b.mant,
    a.exp - b.exp,
    a.prec
));

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mant: -self.mant,
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -(self.clone())
    }
}

/// Returns true when `a` (at precision P) and `b` (at a higher precision)
/// agree to within `ulps` units in the last place of `a`.
pub fn agrees(a: &Real, b: &Real, ulps: u32) -> bool {
    let b = b.with_precision(a.prec);
    let diff = (a - &b).abs();
    let scale = a.abs().max(&b.abs()).ulp();
    let tol = &scale * &Real::from_int(ulps, a.prec);
    diff.cmp_value(&tol) != Ordering::Greater
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 192;

    fn r(x: f64) -> Real {
        Real::from_f64(x, P)
    }

    #[test]
    fn pi_digits() {
        let s = pi(P).to_decimal(50);
        assert_eq!(s, "3.1415926535897932384626433832795028841971693993751");
    }

    #[test]
    fn atan_one_is_quarter_pi() {
        let a = Real::one(P).atan();
        let q = pi(P).mul_pow2(-2);
        assert!(agrees(&a, &q.with_precision(P + 64), 1));
    }

    #[test]
    fn atan_matches_f64_on_a_grid() {
        for i in -40..=40 {
            let x = i as f64 * 0.37;
            let a = r(x).atan().to_f64();
            assert!((a - x.atan()).abs() < 1e-15, "x = {x}");
        }
    }

    #[test]
    fn atan_of_tiny_argument_keeps_relative_precision() {
        // atan(t) = t - t^3/3 + ..., so for t = 2^-300 the correction sits
        // 600 bits below t and rounding returns t itself
        let t = Real::one(P).mul_pow2(-300);
        assert_eq!(t.atan().cmp_value(&t), Ordering::Equal);
        // for t = 3·2^-80 the cubic term is visible at 192 bits
        let t = Real::from_int(3, P).mul_pow2(-80);
        let a = t.atan();
        assert_eq!(a.cmp_value(&t), Ordering::Less);
        let cubic = &t - &(&(&t * &t) * &t / Real::from_int(3, P));
        assert!(agrees(&a, &cubic, 1));
    }

    #[test]
    fn atan_subtraction_identity_across_precisions() {
        // atan(a) - atan(b) = atan((a - b) / (1 + ab)) for ab > -1
        for &(a, b) in &[(1.5, 1.25), (3.0, 0.2), (0.01, 7.0)] {
            for &prec in &[P, 2 * P] {
                let (ra, rb) = (Real::from_f64(a, prec), Real::from_f64(b, prec));
                let lhs = &ra.atan() - &rb.atan();
                let rhs = ((&ra - &rb) / (Real::one(prec) + &ra * &rb)).atan();
                assert!(agrees(&lhs, &rhs, 4), "{a} {b}");
            }
        }
    }

    #[test]
    fn atan2_quadrants() {
        let one = Real::one(P);
        let pi_p = pi(P);
        let a = Real::atan2(&one, &-&one);
        assert!(agrees(&a, &(&pi_p * &r(0.75)).with_precision(P + 8), 2));
        let b = Real::atan2(&-&one, &-&one);
        assert!(agrees(&b, &(&pi_p * &r(-0.75)).with_precision(P + 8), 2));
        let c = Real::atan2(&one, &Real::zero(P));
        assert!(agrees(&c, &pi_p.mul_pow2(-1).with_precision(P + 8), 1));
    }

    #[test]
    fn sqrt_is_correctly_rounded_for_two() {
        let s = Real::from_int(2, P).sqrt();
        // compare with the exact integer square root of 2 * 4^P
        let scaled = (BigInt::from(2) << (2 * P as u64)).sqrt();
        let exact = Real::normalize(scaled, -(P as i64), P + 4);
        assert!(agrees(&s, &exact, 1));
        assert_eq!(
            s.to_decimal(30),
            "1.41421356237309504880168872421"
        );
    }

    #[test]
    fn division_rounds_to_nearest() {
        let third = Real::one(64) / Real::from_int(3, 64);
        let back = &third * &Real::from_int(3, 64);
        let err = (&back - &Real::one(64)).abs();
        assert!(err.cmp_value(&Real::one(64).ulp()) != Ordering::Greater);
    }

    #[test]
    fn comparisons_across_precisions_are_errors() {
        let a = Real::one(64);
        let b = Real::one(128);
        assert!(matches!(
            a.try_cmp(&b),
            Err(Error::PrecisionMismatch { left: 64, right: 128 })
        ));
        assert_eq!(a.try_cmp(&a.clone()).unwrap(), Ordering::Equal);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(r(0.5).to_decimal(3), "0.500");
        assert_eq!(r(1234.5).to_decimal(6), "1234.50");
        assert_eq!(r(-2.0).to_decimal(4), "-2.000");
        assert_eq!(Real::one(P).mul_pow2(-40).to_decimal(5), "9.0949e-13");
        assert_eq!(Real::from_int(10, P).to_decimal(1), "10");
        assert_eq!(Real::zero(P).to_decimal(5), "0");
    }

    #[test]
    fn addition_with_negligible_operand() {
        let big = Real::one(64);
        let tiny = Real::one(64).mul_pow2(-200);
        assert_eq!((&big + &tiny).cmp_value(&big), Ordering::Equal);
        assert_eq!((&tiny - &big).cmp_value(&-&big), Ordering::Equal);
    }

    #[test]
    fn floor_and_ratio_are_exact() {
        let x = r(-2.25);
        assert_eq!(x.floor(), BigInt::from(-3));
        assert_eq!(x.to_ratio(), BigRational::new((-9).into(), 4.into()));
    }
}
