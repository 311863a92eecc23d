//! Exact arithmetic in the real quadratic field ℚ(√d).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{Real, GUARD_BITS};

/// The number `(a + b√d) / c` with `c > 0` and `d` a positive non-square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s = n.sqrt();
    &s * &s == *n
}

/// Sign of `u + v√d` for integers `u`, `v` and positive non-square `d`.
fn sign_of(u: &BigInt, v: &BigInt, d: &BigInt) -> Ordering {
    let su = u.sign_cmp_zero();
    let sv = v.sign_cmp_zero();
    match (su, sv) {
        (Ordering::Equal, s) | (s, Ordering::Equal) => s,
        (s1, s2) if s1 == s2 => s1,
        (su, _) => {
            // opposite signs: compare u² with v²d
            let lhs = u * u;
            let rhs = v * v * d;
            match lhs.cmp(&rhs) {
                Ordering::Greater => su,
                Ordering::Less => su.reverse(),
                Ordering::Equal => Ordering::Equal,
            }
        }
    }
}

trait SignCmp {
    fn sign_cmp_zero(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp_zero(&self) -> Ordering {
        self.cmp(&BigInt::zero())
    }
}

impl QuadSurd {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<QuadSurd> {
        if !d.is_positive() || is_perfect_square(&d) {
            return Err(Error::NotIrrational(format!(
                "√{d} is not a quadratic irrational"
            )));
        }
        if c.is_zero() {
            return Err(Error::InvalidDenominator(c));
        }
        Ok(QuadSurd::reduced(a, b, c, d))
    }

    fn reduced(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> QuadSurd {
        let (a, b, c) = if c.is_negative() { (-a, -b, -c) } else { (a, b, c) };
        let g = a.gcd(&b).gcd(&c);
        let (a, b, c) = if g.is_one() || g.is_zero() {
            (a, b, c)
        } else {
            (a / &g, b / &g, c / &g)
        };
        QuadSurd { a, b, c, d }
    }

    /// `(p + √d) / q`
    pub fn from_pdq(p: &BigInt, d: &BigInt, q: &BigInt) -> Result<QuadSurd> {
        QuadSurd::new(p.clone(), BigInt::one(), q.clone(), d.clone())
    }

    pub fn from_rational(r: &BigRational, d: &BigInt) -> QuadSurd {
        QuadSurd::reduced(r.numer().clone(), BigInt::zero(), r.denom().clone(), d.clone())
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    /// Coefficients `(a, b, c)` of `(a + b√d) / c`.
    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `o` rewritten over this surd's radicand. Panics if the two radicands
    /// generate different fields.
    fn lift(&self, o: &QuadSurd) -> QuadSurd {
        if self.d == o.d {
            return o.clone();
        }
        if o.b.is_zero() {
            return QuadSurd { d: self.d.clone(), ..o.clone() };
        }
        // √d' = (s/d)√d with s = √(d d')
        let prod = &self.d * &o.d;
        let s = prod.sqrt();
        assert!(&s * &s == prod, "surds from different quadratic fields");
        QuadSurd::reduced(&o.a * &self.d, &o.b * s, &o.c * &self.d, self.d.clone())
    }

    pub fn add(&self, o: &QuadSurd) -> QuadSurd {
        let o = &self.lift(o);
        QuadSurd::reduced(
            &self.a * &o.c + &o.a * &self.c,
            &self.b * &o.c + &o.b * &self.c,
            &self.c * &o.c,
            self.d.clone(),
        )
    }

    pub fn neg(&self) -> QuadSurd {
        QuadSurd::reduced(-&self.a, -&self.b, self.c.clone(), self.d.clone())
    }

    pub fn sub(&self, o: &QuadSurd) -> QuadSurd {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &QuadSurd) -> QuadSurd {
        let o = &self.lift(o);
        QuadSurd::reduced(
            &self.a * &o.a + &self.b * &o.b * &self.d,
            &self.a * &o.b + &self.b * &o.a,
            &self.c * &o.c,
            self.d.clone(),
        )
    }

    pub fn recip(&self) -> QuadSurd {
        // c / (a + b√d) = c (a - b√d) / (a² - b²d)
        let den = &self.a * &self.a - &self.b * &self.b * &self.d;
        assert!(!den.is_zero(), "reciprocal of zero");
        QuadSurd::reduced(&self.c * &self.a, -(&self.c * &self.b), den, self.d.clone())
    }

    pub fn div(&self, o: &QuadSurd) -> QuadSurd {
        self.mul(&o.recip())
    }

    pub fn add_rational(&self, r: &BigRational) -> QuadSurd {
        self.add(&QuadSurd::from_rational(r, &self.d))
    }

    /// `(m11 x + m12) / (m21 x + m22)` for integer matrix entries.
    pub fn mobius(&self, m11: &BigInt, m12: &BigInt, m21: &BigInt, m22: &BigInt) -> QuadSurd {
        let lift = |k: &BigInt| QuadSurd::from_rational(&BigRational::from_integer(k.clone()), &self.d);
        let num = self.mul(&lift(m11)).add(&lift(m12));
        let den = self.mul(&lift(m21)).add(&lift(m22));
        num.div(&den)
    }

    pub fn signum(&self) -> Ordering {
        sign_of(&self.a, &self.b, &self.d)
    }

    pub fn cmp_surd(&self, o: &QuadSurd) -> Ordering {
        self.sub(o).signum()
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.sub(&QuadSurd::from_rational(r, &self.d)).signum()
    }

    pub fn floor(&self) -> BigInt {
        // floor((a + b√d)/c) = floor((a + floor(b√d)) / c) when b√d is irrational
        let s = (&self.b * &self.b * &self.d).sqrt();
        let bs = if self.b.is_negative() { -s - 1 } else { s };
        let bs = if self.b.is_zero() { BigInt::zero() } else { bs };
        (&self.a + bs).div_floor(&self.c)
    }

    /// Dyadic rational within `2^-bits` of the exact value.
    pub fn approx_ratio(&self, bits: u32) -> BigRational {
        let s = bits as u64 + self.c.bits() + 2;
        let radicand = (&self.b * &self.b * &self.d) << (2 * s);
        let root = radicand.sqrt();
        let bs = if self.b.is_negative() { -root } else { root };
        let num = (&self.a << s) + bs;
        BigRational::new(num, &self.c << s)
    }

    /// Value rounded to `prec` bits (relative).
    pub fn to_real(&self, prec: u32) -> Real {
        if self.b.is_zero() {
            return Real::from_ratio(&BigRational::new(self.a.clone(), self.c.clone()), prec);
        }
        let mut bits = prec + GUARD_BITS;
        loop {
            let approx = self.approx_ratio(bits);
            let r = Real::from_ratio(&approx, prec + GUARD_BITS);
            // the approximation error is below 2^-bits; accept once that is
            // under 2^-(prec + 32) relative
            if let Some(e) = r.exponent() {
                if bits as i64 >= prec as i64 + 32 - e {
                    return r.with_precision(prec);
                }
            }
            bits = bits.saturating_mul(2);
        }
    }

    /// The positive root of `q x² + (q' - p) x - p' = 0`, i.e. the fixed point
    /// of `x = (p x + p') / (q x + q')`, for a purely periodic expansion
    /// whose cycle has convergent numerators `p, p'` and denominators `q, q'`
    /// (last and second to last).
    pub fn periodic_fixed_point(p: &BigInt, p_prev: &BigInt, q: &BigInt, q_prev: &BigInt) -> Result<QuadSurd> {
        let lin = p - q_prev;
        let disc = &lin * &lin + BigInt::from(4) * q * p_prev;
        let two_q = BigInt::from(2) * q;
        let sq = disc.sqrt();
        if &sq * &sq == disc {
            // fixed point is rational only for degenerate cycles
            return Err(Error::NotIrrational(format!(
                "cycle fixed point has square discriminant {disc}"
            )));
        }
        QuadSurd::new(lin, BigInt::one(), two_q, disc)
    }
}

/// `d = s² d'` with `d'` free of small square factors.
fn split_square(d: &BigInt) -> (BigInt, BigInt) {
    let (mut s, mut rest) = (BigInt::one(), d.clone());
    let mut f = BigInt::from(2);
    let limit = BigInt::from(1u32 << 20);
    while &f * &f <= rest && f < limit {
        let ff = &f * &f;
        while (&rest % &ff).is_zero() {
            rest /= &ff;
            s *= &f;
        }
        f += 1;
    }
    (s, rest)
}

/// Renders as `a + b√d` or `(a + b√d)/c` with the square part of `d`
/// pulled out, e.g. `1 + √2`, `6 - 4√2`, `(1 + √3)/2`.
impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, d) = split_square(&self.d);
        let b = &self.b * s;
        let g = self.a.gcd(&b).gcd(&self.c);
        let (a, b, c) = (&self.a / &g, b / &g, &self.c / &g);
        let mut body = String::new();
        if !a.is_zero() || b.is_zero() {
            body.push_str(&a.to_string());
        }
        if !b.is_zero() {
            let mag = b.abs();
            let coeff = if mag.is_one() { String::new() } else { mag.to_string() };
            match (body.is_empty(), b.is_negative()) {
                (true, false) => {}
                (true, true) => body.push('-'),
                (false, false) => body.push_str(" + "),
                (false, true) => body.push_str(" - "),
            }
            body.push_str(&format!("{coeff}√{d}"));
        }
        if c.is_one() {
            f.write_str(&body)
        } else if b.is_zero() || a.is_zero() {
            write!(f, "{body}/{c}")
        } else {
            write!(f, "({body})/{c}")
        }
    }
}
