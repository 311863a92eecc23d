//! The convergent-based aperture θ(r) and area A(r).
//!
//! With convergents `h_k = p_k/q_k`, radii `r_k² = p_k² + q_k²` and half-angles
//! `δ_k = |atan h_k - atan α|`, the profile is
//!
//! ```text
//! θ(r) = 2π         for 0 < r ≤ r_0
//! θ(r) = 2 δ_k       for r_k < r ≤ r_{k+1}
//! A(r) = r² θ(r) / 2
//! ```
//!
//! This is the formula exactly as stated, including the 2π branch; the
//! lattice oracle measures how far it is from the true geometry.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::alpha::Alpha;
use crate::cf::Convergent;
use crate::error::{Error, Result};
use crate::real::{agrees, pi, Real, GUARD_BITS};

/// A query radius, either a real number or an exact squared radius.
#[derive(Clone, Debug)]
pub enum Radius {
    Real(Real),
    Squared(BigRational),
}

impl Radius {
    /// `r²` exactly.
    pub fn squared(&self) -> BigRational {
        match self {
            Radius::Real(r) => {
                let q = r.to_ratio();
                &q * &q
            }
            Radius::Squared(s) => s.clone(),
        }
    }

    pub fn to_real(&self, prec: u32) -> Real {
        match self {
            Radius::Real(r) => r.with_precision(prec),
            Radius::Squared(s) => Real::from_ratio(s, prec + GUARD_BITS).sqrt().with_precision(prec),
        }
    }
}

/// Parses `r2:<rational>` as an exact squared radius, anything else as a
/// decimal radius.
pub fn parse_radius(text: &str, prec: u32) -> Result<Radius> {
    let text = text.trim();
    if let Some(s) = text.strip_prefix("r2:") {
        let q = parse_rational(s)?;
        if !q.is_positive() {
            return Err(Error::parse(s, "squared radius must be positive"));
        }
        return Ok(Radius::Squared(q));
    }
    let q = parse_decimal(text)?;
    if !q.is_positive() {
        return Err(Error::parse(text, "radius must be positive"));
    }
    Ok(Radius::Real(Real::from_ratio(&q, prec)))
}

/// `p/q`, an integer, or a plain decimal such as `12.5` or `1e-3`, exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::parse(p, "expected an integer"))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::parse(q, "expected an integer"))?;
        if !q.is_positive() {
            return Err(Error::InvalidDenominator(q));
        }
        return Ok(BigRational::new(p, q));
    }
    parse_decimal(text)
}

pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let bad = || Error::parse(text, "expected a decimal number");
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let v = if scale >= 0 {
        BigRational::from_integer(digits * ten.pow(scale as u32))
    } else {
        BigRational::new(digits, ten.pow((-scale) as u32))
    };
    Ok(if neg { -v } else { v })
}

#[derive(Clone, Debug)]
pub struct Breakpoint {
    pub k: usize,
    /// `p_k² + q_k²`
    pub r2: BigInt,
    pub r: Real,
}

/// Which piece of the profile a radius falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// `0 < r ≤ r_0`, where θ = 2π
    Full,
    /// `r_k < r ≤ r_{k+1}` (or `r > r_k` for the last convergent of a rational)
    Convergent(usize),
}

impl Branch {
    /// `-1` for the full branch, `k` otherwise.
    pub fn label(&self) -> i64 {
        match self {
            Branch::Full => -1,
            Branch::Convergent(k) => *k as i64,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// `|atan h - atan α|` at `prec` bits, computed as `atan(|α - h| / (1 + αh))`
/// so that tiny differences keep full relative precision.
pub fn half_angle(alpha: &Alpha, h: &BigRational, prec: u32) -> Result<Real> {
    let work = prec + GUARD_BITS;
    let diff = alpha.minus_rational(h, work)?;
    if diff.is_zero() {
        return Ok(Real::zero(prec));
    }
    let den = Real::one(work) + &alpha.value(work)? * &Real::from_ratio(h, work);
    Ok((diff.abs() / den).atan().with_precision(prec))
}

/// [`half_angle`] evaluated at `prec` and `2·prec`; the two must agree.
pub fn checked_half_angle(alpha: &Alpha, h: &BigRational, prec: u32) -> Result<Real> {
    let lo = half_angle(alpha, h, prec)?;
    let hi = half_angle(alpha, h, 2 * prec)?;
    if !agrees(&lo, &hi, 2) {
        return Err(Error::PrecisionFailure(format!(
            "half-angle for {h} differs between {prec} and {} bits",
            2 * prec
        )));
    }
    Ok(lo)
}

#[derive(Clone, Debug)]
pub struct SectorProfile {
    alpha: Alpha,
    alpha_value: Real,
    prec: u32,
    convergents: Vec<Convergent>,
    breakpoints: Vec<Breakpoint>,
    half_angles: Vec<Real>,
    /// α is rational and its last convergent is included, so δ vanishes
    /// from there on.
    terminal: bool,
}

#[derive(Clone, Debug)]
pub struct ExtremaRecord {
    pub k: usize,
    /// `r_k² δ_k`
    pub m: Real,
    /// `r_{k+1}² δ_k`
    pub big_m: Real,
    pub r2_lo: BigInt,
    pub r2_hi: BigInt,
}

impl ExtremaRecord {
    /// `M_k / m_k = r_{k+1}² / r_k²` exactly.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.r2_hi.clone(), self.r2_lo.clone())
    }
}

#[derive(Clone, Debug)]
pub struct SeriesPoint {
    pub r: Real,
    pub area: Real,
    pub branch: Branch,
}

impl SectorProfile {
    /// Breakpoints and half-angles for `k = 0..=depth`. A rational α is
    /// clamped to its last convergent.
    pub fn build(alpha: &Alpha, depth: usize, prec: u32) -> Result<SectorProfile> {
        if depth < 1 {
            return Err(Error::InvalidInput("profile depth must be at least 1".into()));
        }
        let cf = alpha.cf();
        let (count, terminal) = match (alpha.is_rational(), cf.valid_horizon()) {
            (true, Some(last)) if last <= depth => (last + 1, true),
            _ => (depth + 1, false),
        };
        let convergents = cf.convergents(count)?;
        let half_angles = convergents
            .iter()
            .map(|c| checked_half_angle(alpha, &c.value(), prec))
            .collect::<Result<Vec<_>>>()?;
        let breakpoints = convergents
            .iter()
            .map(|c| {
                let r2 = c.norm_sq();
                let r = Real::from_int(r2.clone(), prec + GUARD_BITS).sqrt().with_precision(prec);
                Breakpoint { k: c.k, r2, r }
            })
            .collect();
        Ok(SectorProfile {
            alpha: alpha.clone(),
            alpha_value: alpha.value(prec)?,
            prec,
            convergents,
            breakpoints,
            half_angles,
            terminal,
        })
    }

    /// The shallowest profile (at least `min_depth`) whose reach covers
    /// squared radius `r2`.
    pub fn covering(alpha: &Alpha, r2: &BigRational, min_depth: usize, prec: u32) -> Result<SectorProfile> {
        let limit = alpha.cf().valid_horizon();
        let mut depth = min_depth.max(1);
        if let Some(h) = limit {
            depth = depth.min(h.max(1));
        }
        loop {
            let profile = SectorProfile::build(alpha, depth, prec)?;
            match profile.reach() {
                None => return Ok(profile),
                Some(b) if &BigRational::from_integer(b.r2.clone()) >= r2 => return Ok(profile),
                Some(_) => {}
            }
            match limit {
                Some(h) if depth >= h => {
                    return Err(Error::HorizonExceeded {
                        index: h + 1,
                        horizon: h,
                    })
                }
                Some(h) => depth = (depth * 2).min(h),
                None => depth *= 2,
            }
        }
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn alpha_value(&self) -> &Real {
        &self.alpha_value
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn convergents(&self) -> &[Convergent] {
        &self.convergents
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn half_angles(&self) -> &[Real] {
        &self.half_angles
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Largest index with a breakpoint.
    pub fn depth(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Radius up to which every query is answerable, `None` if unbounded.
    pub fn reach(&self) -> Option<&Breakpoint> {
        if self.terminal {
            None
        } else {
            self.breakpoints.last()
        }
    }

    /// Branch of `r`, decided by exact comparison of `r²` against the
    /// integer breakpoints.
    pub fn branch(&self, r: &Radius) -> Result<Branch> {
        let r2 = r.squared();
        if !r2.is_positive() {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        // number of breakpoints with r_k² < r²
        let below = self
            .breakpoints
            .partition_point(|b| BigRational::from_integer(b.r2.clone()) < r2);
        match below {
            0 => Ok(Branch::Full),
            n if n < self.breakpoints.len() || self.terminal => Ok(Branch::Convergent(n - 1)),
            _ => Err(Error::OutOfRange(format!(
                "{} (profile ends at r² = {})",
                r.to_real(self.prec).to_decimal(12),
                self.breakpoints.last().expect("nonempty").r2
            ))),
        }
    }

    pub fn theta_at(&self, branch: Branch) -> Real {
        match branch {
            Branch::Full => pi(self.prec).mul_pow2(1),
            Branch::Convergent(k) => self.half_angles[k].mul_pow2(1),
        }
    }

    /// θ(r)
    pub fn theta_cf(&self, r: &Radius) -> Result<Real> {
        Ok(self.theta_at(self.branch(r)?))
    }

    /// A(r) = r² θ(r) / 2, with its branch.
    pub fn area_with_branch(&self, r: &Radius) -> Result<(Real, Branch)> {
        let branch = self.branch(r)?;
        let r2 = Real::from_ratio(&r.squared(), self.prec);
        let half = match branch {
            Branch::Full => pi(self.prec),
            Branch::Convergent(k) => self.half_angles[k].clone(),
        };
        Ok((&r2 * &half, branch))
    }

    /// A(r)
    pub fn area_cf(&self, r: &Radius) -> Result<Real> {
        Ok(self.area_with_branch(r)?.0)
    }

    /// `m_k` and `M_k` for `k = 0..count`.
    pub fn extrema(&self, count: usize) -> Result<Vec<ExtremaRecord>> {
        if count > self.depth() {
            return Err(Error::HorizonExceeded {
                index: count,
                horizon: self.depth(),
            });
        }
        Ok((0..count)
            .map(|k| {
                let (lo, hi) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
                let d = &self.half_angles[k];
                ExtremaRecord {
                    k,
                    m: &Real::from_int(lo.r2.clone(), self.prec) * d,
                    big_m: &Real::from_int(hi.r2.clone(), self.prec) * d,
                    r2_lo: lo.r2.clone(),
                    r2_hi: hi.r2.clone(),
                }
            })
            .collect())
    }

    /// A uniform grid on `(0, r_max]` (the point `r = 0` replaced by
    /// `r_max·2^-32`) with every breakpoint `r_k ≤ r_max` inserted twice: at
    /// `r_k` on the old branch and one ulp above on the new one.
    pub fn area_series(&self, r_max: &BigRational, samples: usize) -> Result<Vec<SeriesPoint>> {
        if samples < 2 {
            return Err(Error::InvalidInput("need at least 2 samples".into()));
        }
        if !r_max.is_positive() {
            return Err(Error::InvalidInput("r_max must be positive".into()));
        }
        let prec = self.prec;
        let mut points = Vec::with_capacity(samples + 2 * self.breakpoints.len());
        let steps = BigInt::from(samples - 1);
        for j in 0..samples {
            let r = if j == 0 {
                Real::from_ratio(r_max, prec).mul_pow2(-32)
            } else {
                Real::from_ratio(&(r_max * BigRational::new(j.into(), steps.clone())), prec)
            };
            let radius = Radius::Real(r.clone());
            let (area, branch) = self.area_with_branch(&radius)?;
            points.push(SeriesPoint { r, area, branch });
        }
        let r_max2 = r_max * r_max;
        for b in &self.breakpoints {
            let exact = BigRational::from_integer(b.r2.clone());
            if exact > r_max2 {
                break;
            }
            let (area, branch) = self.area_with_branch(&Radius::Squared(exact.clone()))?;
            points.push(SeriesPoint {
                r: b.r.clone(),
                area,
                branch,
            });
            // smallest representable radius beyond both the shell and the
            // rounded r_k
            let mut above = &b.r + &b.r.ulp();
            while Radius::Real(above.clone()).squared() <= exact {
                above = &above + &above.ulp();
            }
            if Radius::Real(above.clone()).squared() <= r_max2 {
                let (area, branch) = self.area_with_branch(&Radius::Real(above.clone()))?;
                points.push(SeriesPoint { r: above, area, branch });
            }
        }
        points.sort_by(|a, b| a.r.cmp_value(&b.r).then(a.branch.cmp(&b.branch)));
        points.dedup_by(|a, b| a.r.cmp_value(&b.r) == Ordering::Equal && a.branch == b.branch);
        Ok(points)
    }
}

impl FromStr for Radius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Radius> {
        parse_radius(s, crate::real::DEFAULT_PRECISION)
    }
}

/// Convenience: `Radius::Squared(n)` for an integer `n`.
pub fn squared(n: impl Into<BigInt>) -> Radius {
    Radius::Squared(BigRational::from_integer(n.into()))
}

impl From<&Real> for Radius {
    fn from(r: &Real) -> Radius {
        Radius::Real(r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::real::DEFAULT_PRECISION as P;

    fn profile(spec: &str, depth: usize) -> SectorProfile {
        SectorProfile::build(&Alpha::parse(spec).unwrap(), depth, P).unwrap()
    }

    fn real(x: f64) -> Radius {
        Radius::Real(Real::from_f64(x, P))
    }

    #[test]
    fn sqrt2_breakpoints_and_first_half_angle() {
        let p = profile("sqrt:2", 6);
        let r2: Vec<i64> = p.breakpoints().iter().map(|b| b.r2.to_string().parse().unwrap()).collect();
        assert_eq!(&r2[..3], &[2, 13, 74]);
        // δ_0 = atan √2 - π/4
        let s2 = Real::from_int(2, P + 64).sqrt();
        let expect = (&s2.atan() - &pi(P + 64).mul_pow2(-2)).with_precision(P);
        assert!(agrees(&p.half_angles()[0], &expect, 2));
        assert_eq!(p.half_angles()[0].to_decimal(8), "0.16991845");
    }

    #[test]
    fn phi_breakpoints() {
        let p = profile("phi", 4);
        assert_eq!(p.breakpoints()[0].r2, BigInt::from(2));
        assert_eq!(p.breakpoints()[1].r2, BigInt::from(5));
    }

    #[test]
    fn theta_and_area_branches() {
        let p = profile("sqrt:2", 6);
        let two_pi = pi(P).mul_pow2(1);
        assert_eq!(p.theta_cf(&real(1.0)).unwrap().cmp_value(&two_pi), Ordering::Equal);
        let d0 = p.half_angles()[0].clone();
        assert_eq!(p.theta_cf(&real(2.0)).unwrap().cmp_value(&d0.mul_pow2(1)), Ordering::Equal);
        // left continuity at r = √13
        assert_eq!(p.branch(&squared(13)).unwrap(), Branch::Convergent(0));
        assert_eq!(p.branch(&Radius::Squared(BigRational::new(131.into(), 10.into()))).unwrap(), Branch::Convergent(1));
        assert_eq!(p.branch(&squared(2)).unwrap(), Branch::Full);
        assert_eq!(p.area_cf(&real(1.0)).unwrap().cmp_value(&pi(P)), Ordering::Equal);
        assert_eq!(p.area_cf(&squared(13)).unwrap().to_decimal(6), "2.20894");
        assert_eq!(p.area_cf(&real(2.0)).unwrap().to_decimal(5), "0.67967");
    }

    #[test]
    fn out_of_range_beyond_profile() {
        let p = profile("sqrt:2", 3);
        let last = p.breakpoints().last().unwrap().r2.clone();
        assert!(p.branch(&squared(last.clone())).is_ok());
        assert!(matches!(p.branch(&squared(last + 1)), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn rational_profile_vanishes() {
        let p = profile("rat:3/2", 40);
        assert!(p.is_terminal());
        assert_eq!(p.depth(), 1);
        assert!(p.area_cf(&squared(14)).unwrap().is_zero());
        assert!(p.area_cf(&squared(10_000)).unwrap().is_zero());
        assert!(!p.area_cf(&squared(13)).unwrap().is_zero());
    }

    #[test]
    fn extrema_examples() {
        let p = profile("sqrt:2", 6);
        let e = p.extrema(5).unwrap();
        assert_eq!(e[0].m.to_decimal(8), "0.33983691");
        assert_eq!(e[0].big_m.to_decimal(6), "2.20894");
        for rec in &e {
            assert_eq!(rec.ratio(), BigRational::new(rec.r2_hi.clone(), rec.r2_lo.clone()));
            let lhs = &rec.big_m * &Real::from_int(rec.r2_lo.clone(), P);
            let rhs = &rec.m * &Real::from_int(rec.r2_hi.clone(), P);
            assert!(agrees(&lhs, &rhs, 2));
        }
        let p = profile("phi", 4);
        let e = p.extrema(1).unwrap();
        assert_eq!(e[0].m.to_decimal(5), "0.46365");
        assert_eq!(e[0].big_m.to_decimal(6), "1.15912");
    }

    #[test]
    fn series_small_grid() {
        let p = profile("sqrt:2", 4);
        let s = p.area_series(&BigRational::one(), 3).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].r.to_decimal(3), "0.500");
        assert!(agrees(&s[1].area, &pi(P).mul_pow2(-2), 1));
        assert_eq!(s[2].area.cmp_value(&pi(P)), Ordering::Equal);
        assert_eq!(s[0].r.cmp_value(&Real::one(P).mul_pow2(-32)), Ordering::Equal);
    }

    #[test]
    fn series_is_a_sawtooth() {
        let p = profile("sqrt:2", 8);
        let s = p.area_series(&BigRational::from_integer(60.into()), 200).unwrap();
        for w in s.windows(2) {
            if w[0].branch == w[1].branch {
                assert_eq!(w[0].area.cmp_value(&w[1].area), Ordering::Less);
            } else {
                assert_eq!(w[1].area.cmp_value(&w[0].area), Ordering::Less);
            }
        }
        let drops = s.windows(2).filter(|w| w[0].branch != w[1].branch).count();
        // r_0..r_4 = √2, √13, √74, √433, √2522 ≤ 60
        assert_eq!(drops, 5);
    }

    #[test]
    fn tiny_half_angles_keep_relative_precision() {
        let p = profile("e", 40);
        let h = p.half_angles();
        for w in h.windows(2) {
            assert_eq!(w[1].cmp_value(&w[0]), Ordering::Less);
        }
        for (c, d) in p.convergents().iter().zip(h).skip(1) {
            let next = &p.alpha().cf().convergents(c.k + 2).unwrap()[c.k + 1];
            let bound = BigRational::new(BigInt::one(), &c.q * &next.q);
            assert_eq!(d.cmp_ratio(&bound), Ordering::Less);
        }
    }

    #[test]
    fn parses_radii() {
        assert!(matches!(parse_radius("r2:13", P).unwrap(), Radius::Squared(_)));
        assert_eq!(parse_decimal("12.5").unwrap(), BigRational::new(25.into(), 2.into()));
        assert_eq!(parse_decimal("1e-3").unwrap(), BigRational::new(1.into(), 1000.into()));
        assert_eq!(parse_rational("281/4").unwrap(), BigRational::new(281.into(), 4.into()));
        assert!(parse_radius("-1", P).is_err());
        assert!(parse_radius("abc", P).is_err());
        assert!(parse_decimal(".").is_err());
    }
}
