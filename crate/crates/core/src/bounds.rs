//! Error bounds, the arctan remainder bracket, bounds on the extrema `m_k` and
//! `M_k`, denominator-ratio asymptotics and the boundedness diagnostic.
//!
//! Every bracket is checked as `lower < value < upper` with 4 ulps of outward
//! slack at the working precision and again at twice that precision; a
//! disagreement between the two is a precision failure, never a verdict.
//! The error term is `ε_k = |α - h_k|` throughout.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::alpha::Alpha;
use crate::cf::{finite_value, pure_period_value, CfKind, ContinuedFraction, Convergent};
use crate::error::{Error, Result};
use crate::real::{Real, GUARD_BITS};
use crate::sector::{half_angle, SectorProfile};
use crate::surd::QuadSurd;

const SLACK_ULPS: i64 = 2; // as a power of two: 4 ulps

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    /// `|α - h_k|`
    AbsError,
    /// `r_k² |α - h_k|`
    ScaledError,
    /// `m_k = r_k² δ_k`
    MinArea,
    /// `M_k = r_{k+1}² δ_k`
    MaxArea,
    /// `|atan(x + ε) - atan x|`
    ArctanPlus,
    /// `|atan(x - ε) - atan x|`
    ArctanMinus,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::AbsError => "abs_error",
            Target::ScaledError => "scaled_error",
            Target::MinArea => "m_k",
            Target::MaxArea => "M_k",
            Target::ArctanPlus => "arctan_plus",
            Target::ArctanMinus => "arctan_minus",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct BoundBracket {
    pub k: usize,
    pub target: Target,
    pub lower: Real,
    pub value: Real,
    pub upper: Real,
    pub holds: bool,
}

/// `lower < value < upper` after widening each bound by 4 ulps.
fn strictly_inside(lower: &Real, value: &Real, upper: &Real) -> bool {
    let slack = |b: &Real| b.abs().max(&value.abs()).ulp().mul_pow2(SLACK_ULPS);
    let lo = lower - &slack(lower);
    let hi = upper + &slack(upper);
    lo.cmp_value(value) == Ordering::Less && value.cmp_value(&hi) == Ordering::Less
}

type Triple = (Real, Real, Real);

/// Evaluates `f` at `prec` and `2·prec`, requiring the same verdict.
fn two_precision(
    k: usize,
    target: Target,
    prec: u32,
    f: impl Fn(u32) -> Result<Triple>,
) -> Result<BoundBracket> {
    let (lower, value, upper) = f(prec)?;
    let holds = strictly_inside(&lower, &value, &upper);
    let (l2, v2, u2) = f(2 * prec)?;
    if strictly_inside(&l2, &v2, &u2) != holds {
        return Err(Error::PrecisionFailure(format!(
            "{target} bracket at k = {k} changes verdict between {prec} and {} bits",
            2 * prec
        )));
    }
    Ok(BoundBracket {
        k,
        target,
        lower,
        value,
        upper,
        holds,
    })
}

/// `3√3/16`, the maximum of `t/(1+t²)²`.
pub fn remainder_constant(prec: u32) -> Real {
    Real::from_int(27, prec + GUARD_BITS).sqrt().mul_pow2(-4).with_precision(prec)
}

/// `|atan(x ± ε) - atan x|` bracketed by `ε/(1+x²) ∓ (3√3/16) ε²`, for both
/// signs of the perturbation.
pub fn arctan_remainder_bracket(x: &BigRational, eps: &BigRational, prec: u32) -> Result<[BoundBracket; 2]> {
    if !x.is_positive() {
        return Err(Error::InvalidInput("x must be positive".into()));
    }
    if !eps.is_positive() || eps >= &BigRational::one() {
        return Err(Error::InvalidInput("ε must lie in (0, 1)".into()));
    }
    let one = &BigRational::one();
    let eval = |sign: i32| {
        move |p: u32| -> Result<Triple> {
            let shifted = if sign > 0 { x + eps } else { x - eps };
            // atan a - atan b = atan((a - b) / (1 + ab))
            let arg = eps / (one + x * &shifted);
            let value = Real::from_ratio(&arg, p + GUARD_BITS).atan().with_precision(p);
            let center = Real::from_ratio(&(eps / (one + x * x)), p);
            let slack = &remainder_constant(p) * &Real::from_ratio(&(eps * eps), p);
            Ok((&center - &slack, value, &center + &slack))
        }
    };
    Ok([
        two_precision(0, Target::ArctanPlus, prec, eval(1))?,
        two_precision(0, Target::ArctanMinus, prec, eval(-1))?,
    ])
}

/// Brackets for one α, with convergents computed once.
#[derive(Clone, Debug)]
pub struct BoundsEngine {
    alpha: Alpha,
    convergents: Vec<Convergent>,
    quotients: Vec<BigInt>,
    prec: u32,
}

impl BoundsEngine {
    /// Prepares brackets for `k = 0..=max_k`, which needs convergents up to
    /// `max_k + 2`. A rational α must have at least `max_k + 3` quotients
    /// beyond `a_0` so that α differs from `h_{k+1}` and `h_{k+2}`.
    pub fn new(alpha: &Alpha, max_k: usize, prec: u32) -> Result<BoundsEngine> {
        let need = max_k + 3;
        if alpha.is_rational() {
            let last = alpha.cf().valid_horizon().expect("finite expansion");
            if last < need {
                return Err(Error::HorizonExceeded {
                    index: need,
                    horizon: last,
                });
            }
        }
        let convergents = alpha.cf().convergents(need)?;
        let quotients = alpha.cf().quotients(need)?;
        Ok(BoundsEngine {
            alpha: alpha.clone(),
            convergents,
            quotients,
            prec,
        })
    }

    pub fn max_k(&self) -> usize {
        self.convergents.len() - 3
    }

    fn check(&self, k: usize) -> Result<()> {
        if k > self.max_k() {
            return Err(Error::HorizonExceeded {
                index: k + 2,
                horizon: self.max_k() + 2,
            });
        }
        Ok(())
    }

    fn parts(&self, k: usize) -> (&Convergent, &Convergent, &Convergent, &BigInt) {
        let c = &self.convergents;
        (&c[k], &c[k + 1], &c[k + 2], &self.quotients[k + 2])
    }

    /// `1 / (1 + (1/a_{k+2}) (q_k/q_{k+1}))`
    fn inner_factor(&self, k: usize) -> BigRational {
        let (ck, ck1, _, a2) = self.parts(k);
        let t = BigRational::new(ck.q.clone(), &ck1.q * a2);
        (BigRational::one() + t).recip()
    }

    /// `a_{k+2}/(q_{k+2} q_k) < |α - h_k| < 1/(q_k q_{k+1})`
    pub fn error_bracket(&self, k: usize) -> Result<BoundBracket> {
        self.check(k)?;
        let (ck, ck1, ck2, a2) = self.parts(k);
        let lower = BigRational::new(a2.clone(), &ck2.q * &ck.q);
        let upper = BigRational::new(BigInt::one(), &ck.q * &ck1.q);
        let h = ck.value();
        two_precision(k, Target::AbsError, self.prec, |p| {
            Ok((
                Real::from_ratio(&lower, p),
                self.alpha.minus_rational(&h, p)?.abs(),
                Real::from_ratio(&upper, p),
            ))
        })
    }

    /// `(h_k²+1)(q_k/q_{k+1}) / (1 + (1/a_{k+2})(q_k/q_{k+1})) < r_k²|α - h_k| < (h_k²+1)(q_k/q_{k+1})`
    pub fn scaled_error_bracket(&self, k: usize) -> Result<BoundBracket> {
        self.check(k)?;
        let (ck, ck1, _, _) = self.parts(k);
        let h = ck.value();
        let upper = (&h * &h + BigRational::one()) * BigRational::new(ck.q.clone(), ck1.q.clone());
        let lower = &upper * self.inner_factor(k);
        let r2 = ck.norm_sq();
        two_precision(k, Target::ScaledError, self.prec, |p| {
            let eps = self.alpha.minus_rational(&h, p)?.abs();
            Ok((
                Real::from_ratio(&lower, p),
                &Real::from_int(r2.clone(), p) * &eps,
                Real::from_ratio(&upper, p),
            ))
        })
    }

    /// `((h²+1)/(α²+1)) · ratio · (inner - c(α²+1)ε_k)` and
    /// `((h²+1)/(α²+1)) · ratio · (1 + c(α²+1)ε_k)` with `c = 3√3/16`.
    fn area_bounds(&self, k: usize, h: &BigRational, ratio: &BigRational, p: u32) -> Result<(Real, Real)> {
        let hk = self.convergents[k].value();
        let a = self.alpha.value(p)?;
        let a2p1 = &a.square() + &Real::one(p);
        let eps = self.alpha.minus_rational(&hk, p)?.abs();
        let corr = &(&remainder_constant(p) * &a2p1) * &eps;
        let lead = &(&Real::from_ratio(&(h * h + BigRational::one()), p) / &a2p1) * &Real::from_ratio(ratio, p);
        let inner = Real::from_ratio(&self.inner_factor(k), p);
        let lower = &lead * &(&inner - &corr);
        let upper = &lead * &(&Real::one(p) + &corr);
        Ok((lower, upper))
    }

    pub fn mk_bracket(&self, k: usize) -> Result<BoundBracket> {
        self.check(k)?;
        let (ck, ck1, _, _) = self.parts(k);
        let h = ck.value();
        let ratio = BigRational::new(ck.q.clone(), ck1.q.clone());
        let r2 = ck.norm_sq();
        two_precision(k, Target::MinArea, self.prec, |p| {
            let (lower, upper) = self.area_bounds(k, &h, &ratio, p)?;
            let value = &Real::from_int(r2.clone(), p) * &half_angle(&self.alpha, &h, p)?;
            Ok((lower, value, upper))
        })
    }

    #[allow(non_snake_case)]
    pub fn Mk_bracket(&self, k: usize) -> Result<BoundBracket> {
        self.check(k)?;
        let (ck, ck1, _, _) = self.parts(k);
        let h_next = ck1.value();
        let ratio = BigRational::new(ck1.q.clone(), ck.q.clone());
        let r2 = ck1.norm_sq();
        let hk = ck.value();
        two_precision(k, Target::MaxArea, self.prec, |p| {
            let (lower, upper) = self.area_bounds(k, &h_next, &ratio, p)?;
            let value = &Real::from_int(r2.clone(), p) * &half_angle(&self.alpha, &hk, p)?;
            Ok((lower, value, upper))
        })
    }

    /// All four brackets at `k`.
    pub fn all_at(&self, k: usize) -> Result<[BoundBracket; 4]> {
        Ok([
            self.error_bracket(k)?,
            self.scaled_error_bracket(k)?,
            self.mk_bracket(k)?,
            self.Mk_bracket(k)?,
        ])
    }

    /// All four brackets for `k = 0..=max_k`, evaluated in parallel.
    pub fn all(&self) -> Result<Vec<BoundBracket>> {
        use rayon::prelude::*;
        let per_k: Vec<Result<[BoundBracket; 4]>> = (0..=self.max_k()).into_par_iter().map(|k| self.all_at(k)).collect();
        let mut out = Vec::with_capacity(4 * per_k.len());
        for r in per_k {
            out.extend(r?);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug)]
pub struct RatioEntry {
    pub k: usize,
    pub a: BigInt,
    /// `q_k / q_{k-1}`
    pub c: BigRational,
    /// residue class `i` with `c_k → C_i`, for eventually periodic expansions
    pub residue: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RatioSequence {
    pub entries: Vec<RatioEntry>,
}

/// `[a_k; a_{k-1}, ..., a_1]` from the first `k + 1` quotients.
pub fn reversed_value(quotients: &[BigInt], k: usize) -> BigRational {
    let rev: Vec<BigInt> = quotients[1..=k].iter().rev().cloned().collect();
    finite_value(&rev)
}

/// `[a_k; a_{k-1}, ..., a_1, a_0]`, which equals `p_k / p_{k-1}` rather than
/// `q_k / q_{k-1}`.
pub fn reversed_value_through_a0(quotients: &[BigInt], k: usize) -> Option<BigRational> {
    if quotients[0].is_zero() {
        // the trailing 1/a_0 is undefined
        return None;
    }
    let rev: Vec<BigInt> = quotients[..=k].iter().rev().cloned().collect();
    Some(finite_value(&rev))
}

/// Residue map for an eventually periodic expansion with preperiod
/// `a_0..a_l` and period length `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueMap {
    pub l: usize,
    pub n: usize,
}

impl ResidueMap {
    pub fn of(cf: &ContinuedFraction) -> Result<ResidueMap> {
        let period = cf.period().ok_or(Error::NotPeriodic)?;
        Ok(ResidueMap {
            l: cf.preperiod().len() - 1,
            n: period.len(),
        })
    }

    /// `i` with `c_{l+jn+i} → C_i`; defined for `k > l`.
    pub fn of_ratio(&self, k: usize) -> Option<usize> {
        (k > self.l).then(|| (k - self.l - 1) % self.n + 1)
    }

    /// `i` for which `m_k` and `M_k` are governed by `C_i` (index `k + 1`
    /// of the ratio sequence).
    pub fn of_extremum(&self, k: usize) -> Option<usize> {
        self.of_ratio(k + 1)
    }

    /// Ratio index `l + j n + i`.
    pub fn ratio_index(&self, i: usize, j: usize) -> usize {
        self.l + j * self.n + i
    }
}

/// `c_k = q_k/q_{k-1}` for `k = 1..=count`, each checked against the exact
/// reversed expansion `[a_k; ..., a_1]` and against `0 < c_k - a_k < 1`
/// (`≤ 1` at `k = 2`).
pub fn ratio_sequence(cf: &ContinuedFraction, count: usize) -> Result<RatioSequence> {
    let convs = cf.convergents(count + 1)?;
    let quotients = cf.quotients(count + 1)?;
    let residues = ResidueMap::of(cf).ok();
    let mut entries = Vec::with_capacity(count);
    for k in 1..=count.min(convs.len() - 1) {
        let c = BigRational::new(convs[k].q.clone(), convs[k - 1].q.clone());
        let rev = reversed_value(&quotients, k);
        if rev != c {
            return Err(Error::IdentityViolation(format!("c_{k} = {c} but [a_{k}; ..., a_1] = {rev}")));
        }
        // c_k - a_k = q_{k-2}/q_{k-1}, which reaches 1 only at k = 2 when a_1 = 1
        let frac = &c - BigRational::from_integer(quotients[k].clone());
        let in_range = frac.is_positive() && (frac < BigRational::one() || k == 2 && frac.is_one());
        if k >= 2 && !in_range {
            return Err(Error::IdentityViolation(format!("c_{k} - a_{k} = {frac} is out of range")));
        }
        entries.push(RatioEntry {
            k,
            a: quotients[k].clone(),
            c,
            residue: residues.and_then(|r| r.of_ratio(k)),
        });
    }
    Ok(RatioSequence { entries })
}

#[derive(Clone, Debug)]
pub struct ResidueLimit {
    pub i: usize,
    /// `b_i, b_{i-1}, ..., b_{i+1}`
    pub cycle: Vec<BigInt>,
    /// `b_{i+1}`, cyclically
    pub next_b: BigInt,
    pub c: QuadSurd,
    /// `1/(C_i + 1/b_{i+1})`
    pub m_bound: QuadSurd,
    /// `1/C_i`
    pub nu_bound: QuadSurd,
    /// `C_i² / (C_i + 1/b_{i+1})`
    pub mu_bound: QuadSurd,
}

#[derive(Clone, Debug)]
pub struct Aggregate {
    /// residue achieving the extremum
    pub i: usize,
    pub exact: QuadSurd,
    pub value: Real,
}

#[derive(Clone, Debug)]
pub struct AsymptoticConstants {
    pub residues: ResidueMap,
    pub period: Vec<BigInt>,
    pub limits: Vec<ResidueLimit>,
    pub m: Aggregate,
    pub nu: Aggregate,
    pub big_m: Aggregate,
    pub mu: Aggregate,
    pub prec: u32,
}

/// Chooses the extreme entry, comparing exactly within one field and
/// numerically (at two precisions) across fields.
fn extreme(items: Vec<(usize, QuadSurd)>, want: Ordering, prec: u32) -> Result<Aggregate> {
    let mut best: Option<(usize, QuadSurd)> = None;
    for (i, s) in items {
        let replace = match &best {
            None => true,
            Some((_, b)) => {
                let ord = if b.radicand() == s.radicand() {
                    s.cmp_surd(b)
                } else {
                    let lo = s.to_real(prec).try_cmp(&b.to_real(prec))?;
                    let hi = s.to_real(2 * prec).try_cmp(&b.to_real(2 * prec))?;
                    if lo != hi {
                        return Err(Error::PrecisionFailure("cannot order residue limits".into()));
                    }
                    lo
                };
                ord == want
            }
        };
        if replace {
            best = Some((i, s));
        }
    }
    let (i, exact) = best.ok_or_else(|| Error::InvalidInput("empty period".into()))?;
    let value = exact.to_real(prec);
    Ok(Aggregate { i, exact, value })
}

/// The limits `C_i = [\overline{b_i; b_{i-1}, ..., b_{i+1}}]` of `c_k` along
/// each residue class and the aggregates `m`, `ν`, `M`, `μ` built from them.
pub fn subsequential_limits(cf: &ContinuedFraction, prec: u32) -> Result<AsymptoticConstants> {
    if cf.kind() != CfKind::EventuallyPeriodic {
        return Err(Error::NotPeriodic);
    }
    let residues = ResidueMap::of(cf)?;
    let period = cf.period().ok_or(Error::NotPeriodic)?.to_vec();
    let n = period.len();
    let b = |i: usize| &period[(i + n - 1) % n]; // b_i, 1-based and cyclic
    let mut limits = Vec::with_capacity(n);
    for i in 1..=n {
        let cycle: Vec<BigInt> = (0..n).map(|j| b(i + n - j).clone()).collect();
        let c = pure_period_value(&cycle)?;
        let next_b = b(i + 1).clone();
        let shifted = c.add_rational(&BigRational::new(BigInt::one(), next_b.clone()));
        limits.push(ResidueLimit {
            i,
            m_bound: shifted.recip(),
            nu_bound: c.recip(),
            mu_bound: c.mul(&c).div(&shifted),
            cycle,
            next_b,
            c,
        });
    }
    let pick = |f: fn(&ResidueLimit) -> &QuadSurd| limits.iter().map(|l| (l.i, f(l).clone())).collect::<Vec<_>>();
    Ok(AsymptoticConstants {
        m: extreme(pick(|l| &l.m_bound), Ordering::Less, prec)?,
        nu: extreme(pick(|l| &l.nu_bound), Ordering::Greater, prec)?,
        big_m: extreme(pick(|l| &l.c), Ordering::Greater, prec)?,
        mu: extreme(pick(|l| &l.mu_bound), Ordering::Less, prec)?,
        residues,
        period,
        limits,
        prec,
    })
}

#[derive(Clone, Debug)]
pub struct ContinuityRow {
    pub j: usize,
    /// ratio index `l + j n + i`
    pub index: usize,
    pub c: BigRational,
    /// `|c_index - C_i|`
    pub diff: Real,
}

#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub i: usize,
    pub limit: QuadSurd,
    pub rows: Vec<ContinuityRow>,
    /// first row from which the differences decrease strictly to the end
    pub monotone_from: Option<usize>,
}

impl ContinuityReport {
    /// Eventually strictly decreasing and ending below `tol`.
    pub fn converges_below(&self, tol: &Real) -> bool {
        self.monotone_from.is_some()
            && self
                .rows
                .last()
                .is_some_and(|r| r.diff.cmp_value(&tol.with_precision(r.diff.prec())) == Ordering::Less)
    }
}

/// `|c_{l+jn+i} - C_i|` for `j = 0..=count`.
pub fn continuity_check(cf: &ContinuedFraction, i: usize, count: usize, prec: u32) -> Result<ContinuityReport> {
    let consts = subsequential_limits(cf, prec)?;
    let map = consts.residues;
    if i == 0 || i > map.n {
        return Err(Error::InvalidInput(format!("residue {i} outside 1..={}", map.n)));
    }
    let limit = consts.limits[i - 1].c.clone();
    let last = map.ratio_index(i, count);
    let convs = cf.convergents(last + 1)?;
    let rows: Vec<ContinuityRow> = (0..=count)
        .map(|j| {
            let index = map.ratio_index(i, j);
            let c = BigRational::new(convs[index].q.clone(), convs[index - 1].q.clone());
            let diff = limit.add_rational(&-&c).to_real(prec).abs();
            ContinuityRow { j, index, c, diff }
        })
        .collect();
    let mut start = rows.len() - 1;
    while start > 0 && rows[start].diff.cmp_value(&rows[start - 1].diff) == Ordering::Less {
        start -= 1;
    }
    let monotone_from = (rows.len() > 1 && start < rows.len() - 1).then_some(start);
    Ok(ContinuityReport {
        i,
        limit,
        rows,
        monotone_from,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundedness {
    /// no sign of growth within the horizon
    BoundedSoFar { max_a: BigInt },
    /// record quotients keep appearing late in the horizon
    UnboundedTrend { witnesses: Vec<usize> },
}

#[derive(Clone, Debug)]
pub struct BoundednessReport {
    pub horizon: usize,
    pub classification: Boundedness,
    pub max_a: BigInt,
    pub max_a_index: usize,
    /// indices `j ≥ 1` where `a_j` exceeds every earlier `a_i`, `i ≥ 1`
    pub record_quotients: Vec<usize>,
    pub min_m: Real,
    pub min_m_index: usize,
    pub max_big_m: Real,
    pub max_big_m_index: usize,
}

/// Finite-horizon look at whether the partial quotients, and with them
/// `1/m_k` and `M_k`, grow without bound. This is a diagnostic over
/// `k = 0..=horizon`, not a proof either way.
pub fn boundedness_diagnostic(alpha: &Alpha, horizon: usize, prec: u32) -> Result<BoundednessReport> {
    let cf = alpha.cf();
    let profile = SectorProfile::build(alpha, horizon + 1, prec)?;
    let count = horizon.min(profile.depth().saturating_sub(1)) + 1;
    let extrema = profile.extrema(count)?;
    let quotients = cf.quotients(count + 1)?;
    let mut record_quotients = Vec::new();
    let mut best = BigInt::zero();
    for (j, a) in quotients.iter().enumerate().skip(1) {
        if *a > best {
            best = a.clone();
            record_quotients.push(j);
        }
    }
    let (max_a_index, max_a) = quotients
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
        .map(|(j, a)| (j, a.clone()))
        .unwrap_or((0, quotients[0].clone()));
    let min_rec = extrema
        .iter()
        .min_by(|x, y| x.m.cmp_value(&y.m))
        .ok_or_else(|| Error::InvalidInput("empty horizon".into()))?;
    let max_rec = extrema
        .iter()
        .max_by(|x, y| x.big_m.cmp_value(&y.big_m).then(y.k.cmp(&x.k)))
        .expect("nonempty");
    let classification = match cf.kind() {
        CfKind::Finite | CfKind::EventuallyPeriodic => Boundedness::BoundedSoFar { max_a: max_a.clone() },
        _ => {
            let late: Vec<usize> = record_quotients.iter().copied().filter(|&j| 2 * j > count).collect();
            if late.is_empty() {
                Boundedness::BoundedSoFar { max_a: max_a.clone() }
            } else {
                Boundedness::UnboundedTrend {
                    witnesses: record_quotients.clone(),
                }
            }
        }
    };
    Ok(BoundednessReport {
        horizon: count - 1,
        classification,
        max_a,
        max_a_index,
        record_quotients,
        min_m: min_rec.m.clone(),
        min_m_index: min_rec.k,
        max_big_m: max_rec.big_m.clone(),
        max_big_m_index: max_rec.k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::{agrees, DEFAULT_PRECISION as P};

    fn alpha(s: &str) -> Alpha {
        Alpha::parse(s).unwrap()
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn sqrt2_error_brackets() {
        let e = BoundsEngine::new(&alpha("sqrt:2"), 5, P).unwrap();
        let b0 = e.error_bracket(0).unwrap();
        assert!(b0.holds);
        assert_eq!(b0.lower.cmp_value(&Real::from_ratio(&q(2, 5), P)), Ordering::Equal);
        assert_eq!(b0.upper.cmp_value(&Real::from_ratio(&q(1, 2), P)), Ordering::Equal);
        let b1 = e.error_bracket(1).unwrap();
        assert_eq!(b1.lower.cmp_value(&Real::from_ratio(&q(1, 12), P)), Ordering::Equal);
        assert_eq!(b1.upper.cmp_value(&Real::from_ratio(&q(1, 10), P)), Ordering::Equal);
        assert_eq!(b1.value.to_decimal(4), "0.08579");
    }

    #[test]
    fn sqrt2_scaled_and_area_brackets() {
        let e = BoundsEngine::new(&alpha("sqrt:2"), 5, P).unwrap();
        let s = e.scaled_error_bracket(0).unwrap();
        assert_eq!(s.upper.cmp_value(&Real::from_ratio(&q(1, 1), P)), Ordering::Equal);
        assert_eq!(s.lower.cmp_value(&Real::from_ratio(&q(4, 5), P)), Ordering::Equal);
        assert_eq!(s.value.to_decimal(5), "0.82843");
        let m = e.mk_bracket(0).unwrap();
        assert!(m.holds);
        assert_eq!(m.upper.to_decimal(5), "0.46785");
        assert_eq!(m.lower.to_decimal(5), "0.13215");
        let big = e.Mk_bracket(0).unwrap();
        assert!(big.holds);
        assert_eq!(big.upper.to_decimal(5), "3.0410");
        assert_eq!(big.lower.to_decimal(5), "0.85895");
        assert_eq!(big.value.to_decimal(6), "2.20894");
    }

    #[test]
    fn golden_scaled_upper() {
        let e = BoundsEngine::new(&alpha("phi"), 3, P).unwrap();
        let s = e.scaled_error_bracket(0).unwrap();
        assert_eq!(s.upper.cmp_value(&Real::from_ratio(&q(2, 1), P)), Ordering::Equal);
        assert_eq!(s.value.to_decimal(6), "1.23607");
    }

    #[test]
    fn every_bracket_holds_for_quadratics() {
        for spec in ["sqrt:2", "sqrt:3", "phi", "quad:1,3,3", "sqrt:7"] {
            let e = BoundsEngine::new(&alpha(spec), 20, P).unwrap();
            for b in e.all().unwrap() {
                assert!(b.holds, "{spec} {} k={}", b.target, b.k);
            }
        }
    }

    #[test]
    fn arctan_remainder_example() {
        let [plus, minus] = arctan_remainder_bracket(&q(1, 1), &q(1, 100), P).unwrap();
        assert!(plus.holds && minus.holds);
        assert_eq!(plus.value.to_decimal(5), "0.0049751");
        assert_eq!(plus.lower.to_decimal(5), "0.0049675");
        assert_eq!(plus.upper.to_decimal(5), "0.0050325");
        assert!(arctan_remainder_bracket(&q(1, 1), &q(1, 1), P).is_err());
        assert!(arctan_remainder_bracket(&q(0, 1), &q(1, 10), P).is_err());
    }

    #[test]
    fn remainder_constant_is_the_maximum() {
        // t/(1+t²)² at t = 1/√3 equals 3√3/16
        let t = Real::from_int(3, P).sqrt().recip();
        let one = Real::one(P);
        let den = (&one + &t.square()).square();
        assert!(agrees(&(&t / &den), &remainder_constant(2 * P), 2));
    }

    #[test]
    fn ratio_examples() {
        let s = ratio_sequence(alpha("sqrt:2").cf(), 4).unwrap();
        let c: Vec<BigRational> = s.entries.iter().map(|e| e.c.clone()).collect();
        assert_eq!(c, vec![q(2, 1), q(5, 2), q(12, 5), q(29, 12)]);
        let e = ratio_sequence(alpha("e").cf(), 5).unwrap();
        assert_eq!(e.entries[4].c, q(32, 7));
        assert_eq!(e.entries[4].a, BigInt::from(4));
    }

    #[test]
    fn a0_terminated_reversal_is_the_numerator_ratio() {
        let cf = alpha("sqrt:2").cf().clone();
        let quotients = cf.quotients(8).unwrap();
        let convs = cf.convergents(8).unwrap();
        for k in 1..8 {
            let through_a0 = reversed_value_through_a0(&quotients, k).unwrap();
            assert_eq!(through_a0, BigRational::new(convs[k].p.clone(), convs[k - 1].p.clone()));
            assert_ne!(through_a0, BigRational::new(convs[k].q.clone(), convs[k - 1].q.clone()));
        }
    }

    #[test]
    fn limits_for_sqrt2_and_phi() {
        let c = subsequential_limits(alpha("sqrt:2").cf(), P).unwrap();
        assert_eq!(c.limits.len(), 1);
        let one_plus_root2 = QuadSurd::new(1.into(), 1.into(), 1.into(), 2.into()).unwrap();
        assert_eq!(c.limits[0].c.cmp_surd(&one_plus_root2), Ordering::Equal);
        assert_eq!(c.mu.exact.cmp_rational(&q(2, 1)), Ordering::Equal);
        assert_eq!(c.nu.value.to_decimal(5), "0.41421");
        assert_eq!(c.m.value.to_decimal(5), "0.34315");
        let c = subsequential_limits(alpha("phi").cf(), P).unwrap();
        assert_eq!(c.mu.exact.cmp_rational(&q(1, 1)), Ordering::Equal);
        assert_eq!(c.m.value.to_decimal(5), "0.38197");
    }

    #[test]
    fn limits_for_sqrt3() {
        let c = subsequential_limits(alpha("sqrt:3").cf(), P).unwrap();
        // (1 + √3)/2 and 1 + √3
        let c1 = QuadSurd::new(1.into(), 1.into(), 2.into(), 3.into()).unwrap();
        let c2 = QuadSurd::new(1.into(), 1.into(), 1.into(), 3.into()).unwrap();
        assert_eq!(c.limits[0].c.cmp_surd(&c1), Ordering::Equal);
        assert_eq!(c.limits[1].c.cmp_surd(&c2), Ordering::Equal);
        assert_eq!(c.big_m.i, 2);
        assert!(matches!(subsequential_limits(alpha("e").cf(), P), Err(Error::NotPeriodic)));
    }

    #[test]
    fn continuity_for_sqrt3() {
        let r = continuity_check(alpha("sqrt:3").cf(), 2, 2, P).unwrap();
        let idx: Vec<usize> = r.rows.iter().map(|x| x.index).collect();
        assert_eq!(idx, [2, 4, 6]);
        assert_eq!(r.rows[2].c, q(41, 15));
        let d: Vec<String> = r.rows.iter().map(|x| x.diff.to_decimal(3)).collect();
        assert_eq!(d, ["0.268", "0.0179", "0.00128"]);
        assert_eq!(r.monotone_from, Some(0));
    }

    #[test]
    fn boundedness_examples() {
        let r = boundedness_diagnostic(&alpha("sqrt:2"), 30, P).unwrap();
        assert_eq!(r.classification, Boundedness::BoundedSoFar { max_a: 2.into() });
        let r = boundedness_diagnostic(&alpha("e"), 30, P).unwrap();
        assert!(matches!(r.classification, Boundedness::UnboundedTrend { .. }));
        assert_eq!(r.max_a, BigInt::from(20));
        assert_eq!(r.max_a_index, 29);
        let r = boundedness_diagnostic(&alpha("pi"), 20, P).unwrap();
        assert!(r.record_quotients.contains(&4));
        // m_k ≈ q_k/q_{k+1} dips and M_k ≈ q_{k+1}/q_k peaks just before a_4
        assert_eq!(r.min_m_index, 3);
        assert_eq!(r.max_big_m_index, 3);
    }
}
