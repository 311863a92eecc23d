//! Continued-fraction expansions, their sources, and convergents.
//!
//! Four sources of partial quotients are supported: finite lists (rationals),
//! eventually periodic expansions (quadratic irrationals), index rules such
//! as the expansion of `e`, and quotients extracted from a truncated numeric
//! value. The last kind carries a certified horizon past which quotients are
//! refused.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::surd::{is_perfect_square, QuadSurd};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CfKind {
    Finite,
    EventuallyPeriodic,
    RuleGenerated,
    ValueSourced,
}

/// A deterministic index → quotient map.
#[derive(Clone)]
pub struct QuotientRule {
    name: String,
    rule: Arc<dyn Fn(usize) -> BigInt + Send + Sync>,
}

impl QuotientRule {
    pub fn new(name: impl Into<String>, rule: impl Fn(usize) -> BigInt + Send + Sync + 'static) -> Self {
        QuotientRule {
            name: name.into(),
            rule: Arc::new(rule),
        }
    }

    /// `e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]`
    pub fn e() -> Self {
        QuotientRule::new("e", |k| match k {
            0 => BigInt::from(2),
            k if k % 3 == 2 => BigInt::from(2 * (k + 1) / 3),
            _ => BigInt::one(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, k: usize) -> BigInt {
        (self.rule)(k)
    }
}

impl fmt::Debug for QuotientRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuotientRule").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Finite(Vec<BigInt>),
    Periodic {
        preperiod: Vec<BigInt>,
        period: Vec<BigInt>,
    },
    Rule(QuotientRule),
    Sourced {
        quotients: Vec<BigInt>,
        horizon: usize,
    },
}

#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    repr: Repr,
}

/// Truncation depth for [`ContinuedFraction::evaluate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    /// Value of the convergent with this index.
    Index(usize),
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Convergent {
    pub k: usize,
    pub p: BigInt,
    pub q: BigInt,
}

impl Convergent {
    pub fn value(&self) -> BigRational {
        BigRational::new(self.p.clone(), self.q.clone())
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.p * &self.p + &self.q * &self.q
    }
}

fn check_quotients(quotients: &[BigInt], first_is_a0: bool) -> Result<()> {
    for (i, a) in quotients.iter().enumerate() {
        let is_a0 = first_is_a0 && i == 0;
        if is_a0 && a.is_negative() {
            return Err(Error::InvalidInput(format!(
                "a_0 = {a} is negative; only positive α are supported"
            )));
        }
        if !is_a0 && !a.is_positive() {
            return Err(Error::InvalidInput(format!(
                "partial quotient {a} must be at least 1"
            )));
        }
    }
    Ok(())
}

fn minimal_period(period: Vec<BigInt>) -> Vec<BigInt> {
    let n = period.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (0..n).all(|i| period[i] == period[i % d]) {
            return period[..d].to_vec();
        }
    }
    period
}

impl ContinuedFraction {
    /// A finite expansion, canonicalized so it never ends in 1 (unless it
    /// has a single term).
    pub fn finite(mut quotients: Vec<BigInt>) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidInput("empty continued fraction".into()));
        }
        check_quotients(&quotients, true)?;
        if quotients.len() >= 2 && quotients.last().is_some_and(|a| a.is_one()) {
            quotients.pop();
            *quotients.last_mut().expect("nonempty") += 1;
        }
        Ok(ContinuedFraction {
            repr: Repr::Finite(quotients),
        })
    }

    /// An eventually periodic expansion `[preperiod, (period)]`, reduced to
    /// its minimal period and shortest preperiod. `preperiod[0]` is `a_0`.
    pub fn periodic(mut preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidInput("empty period".into()));
        }
        check_quotients(&preperiod, true)?;
        check_quotients(&period, false)?;
        let mut period = minimal_period(period);
        if preperiod.is_empty() {
            preperiod.push(period[0].clone());
            period.rotate_left(1);
        }
        while preperiod.len() > 1 && preperiod.last() == period.last() {
            preperiod.pop();
            period.rotate_right(1);
        }
        Ok(ContinuedFraction {
            repr: Repr::Periodic { preperiod, period },
        })
    }

    pub fn from_rule(rule: QuotientRule) -> Self {
        ContinuedFraction {
            repr: Repr::Rule(rule),
        }
    }

    pub fn e() -> Self {
        ContinuedFraction::from_rule(QuotientRule::e())
    }

    /// Quotients extracted from a truncated value; only indices up to
    /// `horizon` are certified.
    pub fn value_sourced(quotients: Vec<BigInt>, horizon: usize) -> Result<Self> {
        check_quotients(&quotients, true)?;
        if horizon >= quotients.len() {
            return Err(Error::InvalidInput(format!(
                "horizon {horizon} beyond the {} extracted quotients",
                quotients.len()
            )));
        }
        Ok(ContinuedFraction {
            repr: Repr::Sourced { quotients, horizon },
        })
    }

    pub fn kind(&self) -> CfKind {
        match self.repr {
            Repr::Finite(_) => CfKind::Finite,
            Repr::Periodic { .. } => CfKind::EventuallyPeriodic,
            Repr::Rule(_) => CfKind::RuleGenerated,
            Repr::Sourced { .. } => CfKind::ValueSourced,
        }
    }

    /// `a_0 .. a_l` for periodic expansions, all quotients for finite ones.
    pub fn preperiod(&self) -> &[BigInt] {
        match &self.repr {
            Repr::Finite(q) => q,
            Repr::Periodic { preperiod, .. } => preperiod,
            Repr::Rule(_) => &[],
            Repr::Sourced { quotients, horizon } => &quotients[..=*horizon],
        }
    }

    pub fn period(&self) -> Option<&[BigInt]> {
        match &self.repr {
            Repr::Periodic { period, .. } => Some(period),
            _ => None,
        }
    }

    pub fn rule(&self) -> Option<&QuotientRule> {
        match &self.repr {
            Repr::Rule(r) => Some(r),
            _ => None,
        }
    }

    /// Largest certified index; `None` when unbounded.
    pub fn valid_horizon(&self) -> Option<usize> {
        match &self.repr {
            Repr::Finite(q) => Some(q.len() - 1),
            Repr::Sourced { horizon, .. } => Some(*horizon),
            _ => None,
        }
    }

    pub fn quotient_at(&self, k: usize) -> Result<BigInt> {
        if let Some(h) = self.valid_horizon() {
            if k > h {
                return Err(Error::HorizonExceeded {
                    index: k,
                    horizon: h,
                });
            }
        }
        Ok(match &self.repr {
            Repr::Finite(q) => q[k].clone(),
            Repr::Sourced { quotients, .. } => quotients[k].clone(),
            Repr::Rule(r) => r.apply(k),
            Repr::Periodic { preperiod, period } => {
                if k < preperiod.len() {
                    preperiod[k].clone()
                } else {
                    period[(k - preperiod.len()) % period.len()].clone()
                }
            }
        })
    }

    /// `a_0 .. a_{count-1}`
    pub fn quotients(&self, count: usize) -> Result<Vec<BigInt>> {
        (0..count).map(|k| self.quotient_at(k)).collect()
    }

    /// The first `count` convergents (indices `0 .. count`).
    pub fn convergents(&self, count: usize) -> Result<Vec<Convergent>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        if let Some(h) = self.valid_horizon() {
            if count - 1 > h {
                return Err(Error::HorizonExceeded {
                    index: count - 1,
                    horizon: h,
                });
            }
        }
        let quotients = self.quotients(count)?;
        Ok(convergents_of(&quotients))
    }

    /// Exact value of the convergent with index `k`.
    pub fn exact_value(&self, k: usize) -> Result<BigRational> {
        let c = self.convergents(k + 1)?;
        Ok(c[k].value())
    }

    /// The exact value of an eventually periodic expansion.
    pub fn periodic_surd(&self) -> Option<QuadSurd> {
        let Repr::Periodic { preperiod, period } = &self.repr else {
            return None;
        };
        let tail = pure_period_value(period).ok()?;
        let (p, p_prev, q, q_prev) = last_two_convergents(preperiod);
        // [a_0; ..., a_l, y] = (p_l y + p_{l-1}) / (q_l y + q_{l-1})
        Some(tail.mobius(&p, &p_prev, &q, &q_prev))
    }

    /// The depth-limited value rounded to `prec` bits. `Depth::Infinite` is
    /// available for finite and eventually periodic expansions.
    pub fn evaluate(&self, depth: Depth, prec: u32) -> Result<Real> {
        match depth {
            Depth::Index(k) => Ok(Real::from_ratio(&self.exact_value(k)?, prec)),
            Depth::Infinite => match &self.repr {
                Repr::Finite(q) => Ok(Real::from_ratio(&self.exact_value(q.len() - 1)?, prec)),
                Repr::Periodic { .. } => Ok(self
                    .periodic_surd()
                    .expect("periodic expansions have a surd value")
                    .to_real(prec)),
                _ => Err(Error::InvalidInput(
                    "infinite depth needs a finite or eventually periodic expansion".into(),
                )),
            },
        }
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(xs: &[BigInt]) -> String {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match &self.repr {
            Repr::Finite(q) => {
                if q.len() == 1 {
                    write!(f, "[{}]", q[0])
                } else {
                    write!(f, "[{};{}]", q[0], list(&q[1..]))
                }
            }
            Repr::Periodic { preperiod, period } => {
                let rest = list(&preperiod[1..]);
                let sep = if rest.is_empty() { "" } else { "," };
                write!(f, "[{};{}{}({})]", preperiod[0], rest, sep, list(period))
            }
            Repr::Rule(r) => write!(f, "rule:{}", r.name()),
            Repr::Sourced { quotients, horizon } => {
                let shown = (*horizon).min(8);
                write!(f, "[{};{},...] (certified to k={})", quotients[0], list(&quotients[1..=shown]), horizon)
            }
        }
    }
}

pub(crate) fn convergents_of(quotients: &[BigInt]) -> Vec<Convergent> {
    let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
    quotients
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let p = a * &p1 + &p2;
            let q = a * &q1 + &q2;
            p2 = std::mem::replace(&mut p1, p.clone());
            q2 = std::mem::replace(&mut q1, q.clone());
            Convergent { k, p, q }
        })
        .collect()
}

/// `(p_n, p_{n-1}, q_n, q_{n-1})` for the finite expansion `terms`.
fn last_two_convergents(terms: &[BigInt]) -> (BigInt, BigInt, BigInt, BigInt) {
    let (mut p2, mut p1) = (BigInt::zero(), BigInt::one());
    let (mut q2, mut q1) = (BigInt::one(), BigInt::zero());
    for a in terms {
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    (p1, p2, q1, q2)
}

/// Exact value of the purely periodic expansion `[\overline{c_1; c_2, ..., c_n}]`.
pub fn pure_period_value(cycle: &[BigInt]) -> Result<QuadSurd> {
    if cycle.is_empty() {
        return Err(Error::NotPeriodic);
    }
    let (p, p_prev, q, q_prev) = last_two_convergents(cycle);
    QuadSurd::periodic_fixed_point(&p, &p_prev, &q, &q_prev)
}

/// Exact value of the finite expansion `[t_0; t_1, ..., t_n]`.
pub fn finite_value(terms: &[BigInt]) -> BigRational {
    let (p, _, q, _) = last_two_convergents(terms);
    BigRational::new(p, q)
}

/// Euclidean expansion of `p / q` for `q >= 1`, `p >= 0`.
pub fn expand_rational(p: &BigInt, q: &BigInt) -> Result<ContinuedFraction> {
    if q < &BigInt::one() {
        return Err(Error::InvalidDenominator(q.clone()));
    }
    if p.is_negative() {
        return Err(Error::InvalidInput(format!(
            "{p}/{q} is negative; only positive α are supported"
        )));
    }
    let (mut num, mut den) = (p.clone(), q.clone());
    let mut quotients = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        quotients.push(a);
        num = std::mem::replace(&mut den, r);
    }
    ContinuedFraction::finite(quotients)
}

/// Periodic expansion of the quadratic irrational `(p + √d) / q`.
pub fn expand_quadratic(p: &BigInt, d: &BigInt, q: &BigInt) -> Result<ContinuedFraction> {
    if !d.is_positive() || is_perfect_square(d) {
        return Err(Error::NotIrrational(format!("√{d} is rational or imaginary")));
    }
    if q.is_zero() {
        return Err(Error::InvalidDenominator(q.clone()));
    }
    let surd = QuadSurd::from_pdq(p, d, q)?;
    if surd.signum().is_lt() {
        return Err(Error::InvalidInput(format!(
            "({p} + √{d})/{q} is negative; only positive α are supported"
        )));
    }
    // make q divide d - p²
    let (mut pp, dd, mut qq) = if (d - p * p).is_multiple_of(q) {
        (p.clone(), d.clone(), q.clone())
    } else {
        let qa = q.abs();
        (p * &qa, d * q * q, q * &qa)
    };
    let s = dd.sqrt();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    loop {
        if let Some(&start) = seen.get(&(pp.clone(), qq.clone())) {
            let period = quotients.split_off(start);
            return ContinuedFraction::periodic(quotients, period);
        }
        seen.insert((pp.clone(), qq.clone()), quotients.len());
        let a = if qq.is_positive() {
            (&pp + &s).div_floor(&qq)
        } else {
            (&pp + &s + BigInt::one()).div_floor(&qq)
        };
        let next_p = &a * &qq - &pp;
        let next_q = (&dd - &next_p * &next_p) / &qq;
        quotients.push(a);
        pp = next_p;
        qq = next_q;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentDifference {
    pub k: usize,
    /// `h_{k+1} - h_k`
    pub next: BigRational,
    /// `h_{k+2} - h_k`
    pub skip: BigRational,
}

/// Differences of consecutive and every-other convergents, each checked
/// against its closed form.
pub fn convergent_differences(
    cf: &ContinuedFraction,
    convergents: &[Convergent],
) -> Result<Vec<ConvergentDifference>> {
    if convergents.len() < 3 {
        return Err(Error::InvalidInput("need at least three convergents".into()));
    }
    let mut out = Vec::with_capacity(convergents.len() - 2);
    for w in convergents.windows(3) {
        let (c0, c1, c2) = (&w[0], &w[1], &w[2]);
        let k = c0.k;
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let next = c1.value() - c0.value();
        let skip = c2.value() - c0.value();
        let next_closed = BigRational::new(sign.clone(), &c0.q * &c1.q);
        let a = cf.quotient_at(k + 2)?;
        let skip_closed = BigRational::new(sign * a, &c0.q * &c2.q);
        if next != next_closed {
            return Err(Error::IdentityViolation(format!(
                "h_{} - h_{k} = {next}, expected {next_closed}",
                k + 1
            )));
        }
        if skip != skip_closed {
            return Err(Error::IdentityViolation(format!(
                "h_{} - h_{k} = {skip}, expected {skip_closed}",
                k + 2
            )));
        }
        out.push(ConvergentDifference { k, next, skip });
    }
    Ok(out)
}

/// Checks `p_k q_{k-1} - p_{k-1} q_k = (-1)^{k-1}` and `gcd(p_k, q_k) = 1`.
pub fn check_determinants(convergents: &[Convergent]) -> Result<()> {
    for c in convergents {
        if !c.p.gcd(&c.q).is_one() {
            return Err(Error::IdentityViolation(format!(
                "gcd(p_{}, q_{}) != 1",
                c.k, c.k
            )));
        }
    }
    for w in convergents.windows(2) {
        let det = &w[1].p * &w[0].q - &w[0].p * &w[1].q;
        let expected = if w[1].k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        if det != expected {
            return Err(Error::IdentityViolation(format!(
                "determinant at k = {} is {det}",
                w[1].k
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn bis(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pq(c: &[Convergent]) -> Vec<(i64, i64)> {
        c.iter()
            .map(|c| (c.p.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect()
    }

    fn sqrt2() -> ContinuedFraction {
        expand_quadratic(&0.into(), &2.into(), &1.into()).unwrap()
    }

    #[test]
    fn e_rule_quotients() {
        let e = ContinuedFraction::e();
        assert_eq!(e.quotients(14).unwrap(), bis(&[2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8, 1, 1]));
        assert_eq!(e.valid_horizon(), None);
        assert_eq!(e.kind(), CfKind::RuleGenerated);
    }

    #[test]
    fn periodic_continuation() {
        let s = sqrt2();
        assert_eq!(s.quotient_at(5).unwrap(), BigInt::from(2));
        assert_eq!(s.quotient_at(0).unwrap(), BigInt::from(1));
    }

    #[test]
    fn convergents_of_sqrt2_and_e() {
        assert_eq!(
            pq(&sqrt2().convergents(5).unwrap()),
            vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]
        );
        assert_eq!(
            pq(&ContinuedFraction::e().convergents(4).unwrap()),
            vec![(2, 1), (3, 1), (8, 3), (11, 4)]
        );
        let single = ContinuedFraction::finite(bis(&[5])).unwrap();
        assert_eq!(pq(&single.convergents(1).unwrap()), vec![(5, 1)]);
    }

    #[test]
    fn rational_expansions() {
        let show = |p: i64, q: i64| expand_rational(&p.into(), &q.into()).unwrap().to_string();
        assert_eq!(show(355, 113), "[3;7,16]");
        assert_eq!(show(7, 1), "[7]");
        assert_eq!(show(10, 7), "[1;2,3]");
        assert_eq!(show(0, 5), "[0]");
        assert!(matches!(
            expand_rational(&1.into(), &0.into()),
            Err(Error::InvalidDenominator(_))
        ));
        assert!(expand_rational(&(-1).into(), &2.into()).is_err());
    }

    #[test]
    fn finite_canonical_form_absorbs_trailing_one() {
        let cf = ContinuedFraction::finite(bis(&[3, 7, 15, 1])).unwrap();
        assert_eq!(cf.to_string(), "[3;7,16]");
        assert_eq!(ContinuedFraction::finite(bis(&[1])).unwrap().to_string(), "[1]");
    }

    #[test]
    fn quadratic_expansions() {
        let show = |p: i64, d: i64, q: i64| {
            expand_quadratic(&p.into(), &d.into(), &q.into()).unwrap().to_string()
        };
        assert_eq!(show(0, 2, 1), "[1;(2)]");
        assert_eq!(show(0, 3, 1), "[1;(1,2)]");
        assert_eq!(show(1, 5, 2), "[1;(1)]");
        assert_eq!(show(0, 7, 1), "[2;(1,1,1,4)]");
        // q does not divide d - p²: (1 + √3)/3 ≈ 0.9107; the expansion must
        // re-evaluate to the surd
        let cf = expand_quadratic(&1.into(), &3.into(), &3.into()).unwrap();
        let surd = QuadSurd::from_pdq(&1.into(), &3.into(), &3.into()).unwrap();
        assert_eq!(cf.periodic_surd().unwrap().cmp_surd(&surd), std::cmp::Ordering::Equal);
        assert_eq!(cf.quotient_at(0).unwrap(), BigInt::zero());
        assert!(matches!(
            expand_quadratic(&0.into(), &9.into(), &1.into()),
            Err(Error::NotIrrational(_))
        ));
    }

    #[test]
    fn periodic_canonicalization() {
        let cf = ContinuedFraction::periodic(bis(&[1, 2, 2]), bis(&[2, 2])).unwrap();
        assert_eq!(cf.to_string(), "[1;(2)]");
        let cf = ContinuedFraction::periodic(bis(&[4, 1, 2]), bis(&[1, 2])).unwrap();
        assert_eq!(cf.to_string(), "[4;(1,2)]");
        let cf = ContinuedFraction::periodic(vec![], bis(&[1])).unwrap();
        assert_eq!(cf.to_string(), "[1;(1)]");
    }

    #[test]
    fn evaluation() {
        let s = sqrt2().evaluate(Depth::Infinite, 192).unwrap();
        assert_eq!(s.to_decimal(12), "1.41421356237");
        let silver = ContinuedFraction::periodic(vec![], bis(&[2])).unwrap();
        assert_eq!(
            silver.evaluate(Depth::Infinite, 192).unwrap().to_decimal(12),
            "2.41421356237"
        );
        let cf = ContinuedFraction::finite(bis(&[3, 7, 16])).unwrap();
        assert_eq!(cf.exact_value(2).unwrap(), BigRational::new(355.into(), 113.into()));
        assert_eq!(cf.evaluate(Depth::Index(2), 64).unwrap().to_decimal(9), "3.14159292");
        assert!(ContinuedFraction::e().evaluate(Depth::Infinite, 64).is_err());
    }

    #[test]
    fn horizon_is_enforced() {
        let cf = ContinuedFraction::value_sourced(bis(&[3, 7, 15, 1, 292, 1]), 3).unwrap();
        assert_eq!(cf.quotient_at(3).unwrap(), BigInt::one());
        assert!(matches!(
            cf.quotient_at(4),
            Err(Error::HorizonExceeded { index: 4, horizon: 3 })
        ));
        assert!(cf.convergents(5).is_err());
        assert_eq!(cf.convergents(4).unwrap().len(), 4);
        let fin = ContinuedFraction::finite(bis(&[1, 2])).unwrap();
        assert!(matches!(fin.quotient_at(2), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn difference_identities() {
        let s = sqrt2();
        let c = s.convergents(6).unwrap();
        let d = convergent_differences(&s, &c).unwrap();
        assert_eq!(d[0].next, BigRational::new(1.into(), 2.into()));
        assert_eq!(d[0].skip, BigRational::new(2.into(), 5.into()));
        let e = ContinuedFraction::e();
        let c = e.convergents(5).unwrap();
        let d = convergent_differences(&e, &c).unwrap();
        assert_eq!(d[1].next, BigRational::new((-1).into(), 3.into()));
        assert!(convergent_differences(&e, &c[..2]).is_err());
    }

    #[test]
    fn tampered_convergents_are_caught() {
        let s = sqrt2();
        let mut c = s.convergents(4).unwrap();
        c[2].p += 1;
        assert!(matches!(
            convergent_differences(&s, &c),
            Err(Error::IdentityViolation(_))
        ));
        assert!(check_determinants(&c).is_err());
    }

    #[test]
    fn finite_value_matches_convergent() {
        let terms = bis(&[3, 7, 15, 1, 292]);
        let c = convergents_of(&terms);
        assert_eq!(finite_value(&terms), c[4].value());
    }
}
