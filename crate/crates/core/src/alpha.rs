//! Textual α specifiers and certified numeric access to α.
//!
//! Accepted forms: `rat:p/q`, `quad:P,D,Q` for `(P + √D)/Q`, `sqrt:D`,
//! `phi`, `e`, `pi[:digits]`, `cf:[a0;a1,a2,...]` and
//! `cf:[a0;a1,...,al,(b1,...,bn)]` for a periodic tail.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cf::{expand_quadratic, expand_rational, ContinuedFraction, QuotientRule};
use crate::error::{Error, Result};
use crate::real::{pi_fixed, Real};
use crate::surd::QuadSurd;

pub const DEFAULT_PI_DIGITS: u32 = 1000;
/// Decimal digits withheld from a value-sourced expansion's horizon.
pub const HORIZON_GUARD_DIGITS: u32 = 10;
const MAX_APPROX_BITS: u32 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaSpec {
    Rational { p: BigInt, q: BigInt },
    Quadratic { p: BigInt, d: BigInt, q: BigInt },
    Phi,
    E,
    Pi { digits: u32 },
    /// An empty `period` means a finite expansion.
    Cf { preperiod: Vec<BigInt>, period: Vec<BigInt> },
}

fn parse_int(token: &str) -> Result<BigInt> {
    token
        .trim()
        .parse::<BigInt>()
        .map_err(|_| Error::parse(token.trim(), "expected an integer"))
}

fn parse_list(body: &str) -> Result<Vec<BigInt>> {
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(parse_int).collect()
}

fn parse_cf(s: &str) -> Result<AlphaSpec> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::parse(s, "expected [a0;a1,...]"))?;
    let (head, tail) = match inner.split_once(';') {
        Some((h, t)) => (h, t),
        None => (inner, ""),
    };
    let (head, tail) = (head.trim(), tail.trim());
    let mut preperiod = vec![parse_int(head)?];
    let mut period = Vec::new();
    if let Some(open) = tail.find('(') {
        let close = tail
            .rfind(')')
            .filter(|&c| c > open && tail[c + 1..].trim().is_empty())
            .ok_or_else(|| Error::parse(tail, "periodic tail must be a final (b1,...,bn) group"))?;
        let before = tail[..open].trim().trim_end_matches(',');
        preperiod.extend(parse_list(before)?);
        period = parse_list(&tail[open + 1..close])?;
        if period.is_empty() {
            return Err(Error::parse(tail, "empty period"));
        }
    } else {
        preperiod.extend(parse_list(tail)?);
    }
    Ok(AlphaSpec::Cf { preperiod, period })
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("phi", None) => Ok(AlphaSpec::Phi),
            ("e", None) => Ok(AlphaSpec::E),
            ("pi", None) => Ok(AlphaSpec::Pi {
                digits: DEFAULT_PI_DIGITS,
            }),
            ("pi", Some(d)) => {
                let digits: u32 = d.trim().parse().map_err(|_| Error::parse(d, "expected a digit count"))?;
                if digits <= HORIZON_GUARD_DIGITS {
                    return Err(Error::parse(d, "need more digits than the horizon guard"));
                }
                Ok(AlphaSpec::Pi { digits })
            }
            ("rat", Some(a)) => {
                let (p, q) = a
                    .split_once('/')
                    .ok_or_else(|| Error::parse(a, "expected p/q"))?;
                Ok(AlphaSpec::Rational {
                    p: parse_int(p)?,
                    q: parse_int(q)?,
                })
            }
            ("quad", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::parse(a, "expected P,D,Q"));
                }
                Ok(AlphaSpec::Quadratic {
                    p: parse_int(parts[0])?,
                    d: parse_int(parts[1])?,
                    q: parse_int(parts[2])?,
                })
            }
            ("sqrt", Some(d)) => Ok(AlphaSpec::Quadratic {
                p: BigInt::zero(),
                d: parse_int(d)?,
                q: BigInt::one(),
            }),
            ("cf", Some(body)) => parse_cf(body.trim()),
            _ => Err(Error::parse(s, "unknown α specifier")),
        }
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[BigInt]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            AlphaSpec::Rational { p, q } => write!(f, "rat:{p}/{q}"),
            AlphaSpec::Quadratic { p, d, q } if p.is_zero() && q.is_one() => write!(f, "sqrt:{d}"),
            AlphaSpec::Quadratic { p, d, q } => write!(f, "quad:{p},{d},{q}"),
            AlphaSpec::Phi => f.write_str("phi"),
            AlphaSpec::E => f.write_str("e"),
            AlphaSpec::Pi { digits } => write!(f, "pi:{digits}"),
            AlphaSpec::Cf { preperiod, period } => {
                let rest = list(&preperiod[1..]);
                if period.is_empty() {
                    write!(f, "cf:[{};{}]", preperiod[0], rest)
                } else {
                    let sep = if rest.is_empty() { "" } else { "," };
                    write!(f, "cf:[{};{}{}({})]", preperiod[0], rest, sep, list(period))
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Rational(BigRational),
    Quadratic(QuadSurd),
    /// `Σ 1/n!`
    ESeries,
    /// A truncated decimal value with absolute error below `2·10^-digits`.
    Digits { value: BigRational, digits: u32 },
    /// Limit of the expansion's own convergents.
    CfLimit,
}

/// A positive real α together with its continued fraction and a certified
/// way to approximate it.
#[derive(Clone, Debug)]
pub struct Alpha {
    label: String,
    cf: ContinuedFraction,
    source: Source,
}

/// `⌊π·10^digits⌋`
pub fn pi_decimal_digits(digits: u32) -> BigInt {
    let f = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 64;
    let scaled = pi_fixed(f) * BigInt::from(10u32).pow(digits);
    scaled >> f
}

/// Expansion of a truncated value `n / 10^digits`, certified up to the largest
/// index whose convergent denominator satisfies `q_k² < 10^(digits - guard)`.
pub fn value_sourced_expansion(n: &BigInt, digits: u32) -> Result<ContinuedFraction> {
    let den = BigInt::from(10u32).pow(digits);
    let finite = expand_rational(n, &den)?;
    let quotients = finite.preperiod().to_vec();
    let limit = BigInt::from(10u32).pow(digits.saturating_sub(HORIZON_GUARD_DIGITS));
    let convs = crate::cf::convergents_of(&quotients);
    let horizon = convs
        .iter()
        .take_while(|c| &c.q * &c.q < limit)
        .last()
        .map(|c| c.k)
        .ok_or_else(|| Error::InvalidInput("value too coarse for any certified quotient".into()))?;
    // keep one quotient past the horizon so the refusal is observable
    ContinuedFraction::value_sourced(quotients, horizon.min(convs.len() - 1))
}

impl Alpha {
    pub fn new(spec: &AlphaSpec) -> Result<Alpha> {
        let label = spec.to_string();
        let (cf, source) = match spec {
            AlphaSpec::Rational { p, q } => {
                let cf = expand_rational(p, q)?;
                (cf, Source::Rational(BigRational::new(p.clone(), q.clone())))
            }
            AlphaSpec::Quadratic { p, d, q } => {
                let cf = expand_quadratic(p, d, q)?;
                (cf, Source::Quadratic(QuadSurd::from_pdq(p, d, q)?))
            }
            AlphaSpec::Phi => {
                let (p, d, q) = (BigInt::one(), BigInt::from(5), BigInt::from(2));
                (expand_quadratic(&p, &d, &q)?, Source::Quadratic(QuadSurd::from_pdq(&p, &d, &q)?))
            }
            AlphaSpec::E => (ContinuedFraction::e(), Source::ESeries),
            AlphaSpec::Pi { digits } => {
                let n = pi_decimal_digits(*digits);
                let cf = value_sourced_expansion(&n, *digits)?;
                let value = BigRational::new(n, BigInt::from(10u32).pow(*digits));
                (cf, Source::Digits { value, digits: *digits })
            }
            AlphaSpec::Cf { preperiod, period } => {
                if period.is_empty() {
                    let cf = ContinuedFraction::finite(preperiod.clone())?;
                    let v = cf.exact_value(cf.valid_horizon().expect("finite"))?;
                    (cf, Source::Rational(v))
                } else {
                    let cf = ContinuedFraction::periodic(preperiod.clone(), period.clone())?;
                    let surd = cf.periodic_surd().ok_or(Error::NotPeriodic)?;
                    (cf, Source::Quadratic(surd))
                }
            }
        };
        Ok(Alpha { label, cf, source })
    }

    pub fn parse(text: &str) -> Result<Alpha> {
        Alpha::new(&text.parse()?)
    }

    /// α defined by an arbitrary quotient rule, approximated through its own
    /// convergents.
    pub fn from_rule(rule: QuotientRule) -> Alpha {
        Alpha {
            label: format!("rule:{}", rule.name()),
            cf: ContinuedFraction::from_rule(rule),
            source: Source::CfLimit,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.source, Source::Rational(_))
    }

    pub fn exact_rational(&self) -> Option<&BigRational> {
        match &self.source {
            Source::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn exact_surd(&self) -> Option<&QuadSurd> {
        match &self.source {
            Source::Quadratic(s) => Some(s),
            _ => None,
        }
    }

    /// Bits of absolute accuracy available, `None` when unlimited.
    pub fn available_bits(&self) -> Option<u32> {
        match &self.source {
            Source::Digits { digits, .. } => Some((*digits as f64 * std::f64::consts::LOG2_10).floor() as u32 - 2),
            _ => None,
        }
    }

    /// A rational within `2^-bits` of α.
    pub fn approx_ratio(&self, bits: u32) -> Result<BigRational> {
        match &self.source {
            Source::Rational(r) => Ok(r.clone()),
            Source::Quadratic(s) => Ok(s.approx_ratio(bits)),
            Source::ESeries => Ok(e_series(bits)),
            Source::Digits { value, digits } => {
                let avail = self.available_bits().expect("digits source");
                if bits > avail {
                    return Err(Error::PrecisionFailure(format!(
                        "{} is known to {digits} digits ({avail} bits); {bits} bits requested",
                        self.label
                    )));
                }
                Ok(value.clone())
            }
            Source::CfLimit => {
                let target = BigInt::one() << bits as usize;
                let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
                let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
                let mut k = 0;
                loop {
                    let a = self.cf.quotient_at(k)?;
                    let p = &a * &p1 + &p2;
                    let q = &a * &q1 + &q2;
                    // |α - p1/q1| < 1/(q1 q)
                    if k > 0 && &q1 * &q >= target {
                        return Ok(BigRational::new(p1, q1));
                    }
                    p2 = std::mem::replace(&mut p1, p);
                    q2 = std::mem::replace(&mut q1, q);
                    k += 1;
                }
            }
        }
    }

    /// α rounded to `prec` bits.
    pub fn value(&self, prec: u32) -> Result<Real> {
        match &self.source {
            Source::Rational(r) => Ok(Real::from_ratio(r, prec)),
            Source::Quadratic(s) => Ok(s.to_real(prec)),
            _ => {
                // α ≥ 2^-8 for every non-exact source in use; widen if not
                let mut bits = prec + 40;
                loop {
                    let a = Real::from_ratio(&self.approx_ratio(bits)?, prec + 32);
                    match a.exponent() {
                        Some(e) if bits as i64 >= prec as i64 + 24 - e => return Ok(a.with_precision(prec)),
                        _ if bits > MAX_APPROX_BITS => {
                            return Err(Error::PrecisionFailure("α too close to zero".into()))
                        }
                        _ => bits *= 2,
                    }
                }
            }
        }
    }

    /// `α - h` to `prec` bits of relative accuracy, however small it is.
    pub fn minus_rational(&self, h: &BigRational, prec: u32) -> Result<Real> {
        match &self.source {
            Source::Rational(r) => Ok(Real::from_ratio(&(r - h), prec)),
            Source::Quadratic(s) => Ok(s.add_rational(&-h).to_real(prec)),
            _ => {
                let mut bits = prec + 80 + 2 * h.denom().bits() as u32;
                loop {
                    let diff = self.approx_ratio(bits)? - h;
                    // error ≤ 2^-bits, so |diff| ≥ 2^(prec + 16 - bits) bounds the relative error
                    let threshold = if bits > prec + 16 {
                        BigRational::new(BigInt::one(), BigInt::one() << (bits - prec - 16) as usize)
                    } else {
                        BigRational::one()
                    };
                    if diff.abs() >= threshold {
                        return Ok(Real::from_ratio(&diff, prec));
                    }
                    if bits > MAX_APPROX_BITS {
                        return Err(Error::PrecisionFailure(format!(
                            "cannot separate {} from {h}",
                            self.label
                        )));
                    }
                    bits *= 2;
                }
            }
        }
    }

    /// Exact sign of `α - h`.
    pub fn cmp_rational(&self, h: &BigRational) -> Result<Ordering> {
        match &self.source {
            Source::Rational(r) => Ok(r.cmp(h)),
            Source::Quadratic(s) => Ok(s.cmp_rational(h)),
            _ => {
                let d = self.minus_rational(h, 64)?;
                Ok(if d.is_negative() { Ordering::Less } else { Ordering::Greater })
            }
        }
    }

    /// `⌊α n⌋` for a nonnegative integer `n`, exactly.
    pub fn floor_mul(&self, n: &BigInt) -> Result<BigInt> {
        if n.is_zero() {
            return Ok(BigInt::zero());
        }
        let scale = BigRational::from_integer(n.clone());
        match &self.source {
            Source::Rational(r) => Ok((r * &scale).floor().to_integer()),
            Source::Quadratic(s) => Ok(s.mul(&QuadSurd::from_rational(&scale, s.radicand())).floor()),
            _ => {
                let mut bits = 64 + n.bits() as u32;
                loop {
                    let a = self.approx_ratio(bits)? * &scale;
                    let err = &scale / BigRational::from_integer(BigInt::one() << bits as usize);
                    let lo = (&a - &err).floor();
                    let hi = (&a + &err).floor();
                    if lo == hi {
                        return Ok(lo.to_integer());
                    }
                    if bits > MAX_APPROX_BITS {
                        return Err(Error::PrecisionFailure("α·n too close to an integer".into()));
                    }
                    bits *= 2;
                }
            }
        }
    }
}

/// `e` to within `2^-bits` from its factorial series.
fn e_series(bits: u32) -> BigRational {
    let f = bits as usize + 24;
    let mut term = BigInt::one() << f;
    let mut sum = term.clone();
    let mut n = 1u64;
    while !term.is_zero() {
        term /= n;
        sum += &term;
        n += 1;
    }
    BigRational::new(sum, BigInt::one() << f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_specifier_form() {
        let cases = [
            ("rat:355/113", "rat:355/113"),
            ("quad:1,5,2", "quad:1,5,2"),
            ("sqrt:2", "sqrt:2"),
            ("phi", "phi"),
            ("e", "e"),
            ("pi", "pi:1000"),
            ("pi:50", "pi:50"),
            ("cf:[3;7,16]", "cf:[3;7,16]"),
            ("cf:[1;(2)]", "cf:[1;(2)]"),
            ("cf:[1; 2, 3, (4, 5)]", "cf:[1;2,3,(4,5)]"),
            ("cf:[7]", "cf:[7;]"),
        ];
        for (text, canonical) in cases {
            let spec: AlphaSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), canonical, "{text}");
        }
    }

    #[test]
    fn parse_errors_name_the_token() {
        let err = "rat:3/x".parse::<AlphaSpec>().unwrap_err();
        assert!(matches!(err, Error::Parse { ref token, .. } if token == "x"), "{err}");
        assert!("tau".parse::<AlphaSpec>().is_err());
        assert!("cf:[1;(2".parse::<AlphaSpec>().is_err());
        assert!("cf:[1;(2),3]".parse::<AlphaSpec>().is_err());
        assert!("quad:1,2".parse::<AlphaSpec>().is_err());
        assert!(matches!(Alpha::parse("sqrt:4"), Err(Error::NotIrrational(_))));
    }

    #[test]
    fn pi_digits_and_expansion() {
        let n = pi_decimal_digits(30);
        assert_eq!(n.to_string(), "3141592653589793238462643383279");
        let pi = Alpha::parse("pi").unwrap();
        let q: Vec<String> = pi.cf().quotients(5).unwrap().iter().map(|a| a.to_string()).collect();
        assert_eq!(q, ["3", "7", "15", "1", "292"]);
        assert!(pi.cf().valid_horizon().unwrap() > 400);
    }

    #[test]
    fn short_pi_refuses_uncertified_quotients() {
        let pi = Alpha::parse("pi:20").unwrap();
        let h = pi.cf().valid_horizon().unwrap();
        // q_k² < 10^10 ⇒ q_k < 10^5: denominators up to 99532 (k = 7) qualify,
        // 265381 does not
        assert_eq!(h, 7);
        assert!(matches!(pi.cf().quotient_at(h + 1), Err(Error::HorizonExceeded { .. })));
        assert!(matches!(pi.approx_ratio(200), Err(Error::PrecisionFailure(_))));
    }

    #[test]
    fn e_series_is_accurate() {
        let e = Alpha::parse("e").unwrap();
        assert_eq!(e.value(128).unwrap().to_decimal(30), "2.71828182845904523536028747135");
        // the series route and the convergent route agree
        let via_cf = Alpha::from_rule(QuotientRule::e());
        assert_eq!(
            via_cf.value(128).unwrap().to_decimal(30),
            "2.71828182845904523536028747135"
        );
    }

    #[test]
    fn tiny_differences_keep_relative_precision() {
        let e = Alpha::parse("e").unwrap();
        let c = e.cf().convergents(45).unwrap();
        let h = c[44].value();
        let d = e.minus_rational(&h, 128).unwrap();
        let d2 = e.minus_rational(&h, 256).unwrap();
        assert!(crate::real::agrees(&d, &d2, 1));
        // |α - h_k| < 1/(q_k q_{k+1}) and is tiny
        let bound = BigRational::new(BigInt::one(), &c[44].q * &c[44].q);
        assert_eq!(d.abs().cmp_ratio(&bound), Ordering::Less);
        assert!(d.exponent().unwrap() < -100, "{d}");
    }

    #[test]
    fn floor_mul_is_exact() {
        let s2 = Alpha::parse("sqrt:2").unwrap();
        assert_eq!(s2.floor_mul(&BigInt::from(70)).unwrap(), BigInt::from(98));
        let pi = Alpha::parse("pi").unwrap();
        assert_eq!(pi.floor_mul(&BigInt::from(113)).unwrap(), BigInt::from(354));
        assert_eq!(pi.floor_mul(&BigInt::from(7)).unwrap(), BigInt::from(21));
        let e = Alpha::parse("e").unwrap();
        assert_eq!(e.floor_mul(&BigInt::from(1000)).unwrap(), BigInt::from(2718));
    }

    #[test]
    fn exact_comparisons() {
        let s2 = Alpha::parse("sqrt:2").unwrap();
        assert_eq!(s2.cmp_rational(&BigRational::new(7.into(), 5.into())).unwrap(), Ordering::Greater);
        let pi = Alpha::parse("pi").unwrap();
        assert_eq!(pi.cmp_rational(&BigRational::new(22.into(), 7.into())).unwrap(), Ordering::Less);
    }
}
