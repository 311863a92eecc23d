//! Brute-force geometry: the truly largest lattice-free sector symmetric
//! about the ray `y = αx`, independent of continued fractions.
//!
//! For a radius `r` the sector's half-aperture is the smallest wrapped
//! angular distance `δ(P)` from the ray to a nonzero lattice point `P = (q, p)`
//! with `q² + p² < r²`, capped at π.
//!
//! Two scans produce the candidate points:
//!
//! * [`ScanStrategy::Full`] lists every lattice point of the disk in all four
//!   quadrants and ranks them by the wrapped difference of `atan2` angles.
//! * [`ScanStrategy::Windowed`] lists, for each column `q ≥ 1`, the integers
//!   `p ∈ (α(q-1), αq]` and `p = ⌈αq⌉`, plus `(1, 0)` and `(0, 1)`, ranked by
//!   `tan δ = |αq - p| / (q + αp)`.
//!
//! The windowed list misses no minimiser. A point below the ray with
//! `p ≤ α(q-1)` is beaten by `(q-1, p)`, which is shorter and angularly
//! closer. A point above the ray with `p > ⌈αq⌉` is beaten by `(q, p-1)`.
//! A point outside the closed first quadrant is farther from the ray than
//! `(1, 0)` or `(0, 1)`. Each of these dominating points enters the disk no
//! later than the point it beats.
//!
//! Points are sorted by squared norm with a running best, so any radius up to
//! the build radius is a binary search. Ties (within 4 ulps) go to the
//! smaller `q`, then the smaller `p`. θ is then recomputed from the winner
//! through the same half-angle routine the convergent profile uses.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::Alpha;
use crate::error::{Error, Result};
use crate::real::{agrees, pi, Real, GUARD_BITS};
use crate::sector::{half_angle, Branch, Radius, SectorProfile};

/// Largest radius the oracle will scan.
pub const MAX_SCAN_RADIUS: i64 = 10_000;
/// Radius up to which [`ScanStrategy::Auto`] uses the full scan.
pub const FULL_SCAN_RADIUS: i64 = 10;
const TIE_ULPS: i64 = 2; // power of two: 4 ulps

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanStrategy {
    Full,
    Windowed,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LatticePoint {
    pub q: i64,
    pub p: i64,
}

impl LatticePoint {
    pub fn norm_sq(&self) -> i64 {
        self.q * self.q + self.p * self.p
    }
}

#[derive(Clone, Debug)]
struct Entry {
    point: LatticePoint,
    norm_sq: i64,
    key: Real,
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub r2: BigRational,
    /// `None` when no nonzero lattice point lies strictly inside
    pub best_point: Option<LatticePoint>,
    pub theta_exact: Real,
    pub area_exact: Real,
    pub theta_cf: Real,
    pub cf_branch: Branch,
    pub matches_cf: bool,
}

/// A maximal run of squared radii `(r2_lo, r2_hi]` with one best point.
#[derive(Clone, Debug)]
pub struct OracleInterval {
    pub r2_lo: BigRational,
    pub r2_hi: BigRational,
    pub best_point: Option<LatticePoint>,
    pub half_angle: Real,
    /// infimum of `r² δ`, approached at `r2_lo`
    pub inf_area: Real,
    /// supremum of `r² δ`, attained at `r2_hi`
    pub sup_area: Real,
    /// `k` when the best point is the convergent `(q_k, p_k)`
    pub convergent: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub r_lo: String,
    pub r_hi: String,
    /// exact squared endpoints when they are lattice shells or breakpoints
    pub r2_lo: Option<String>,
    pub r2_hi: Option<String>,
    pub oracle_point: Option<(i64, i64)>,
    pub cf_branch: i64,
}

/// State on `r² ∈ (lo, hi]`.
#[derive(Clone, Debug)]
struct Piece {
    lo: i64,
    hi: i64,
    best: Option<usize>,
    branch: Branch,
    agree: bool,
}

#[derive(Clone, Debug)]
pub struct LatticeOracle {
    alpha: Alpha,
    prec: u32,
    strategy: ScanStrategy,
    /// every query must satisfy `r² ≤ r2_max`
    r2_max: BigRational,
    entries: Vec<Entry>,
    /// index of the best entry among `entries[..=i]`
    prefix_best: Vec<usize>,
    profile: SectorProfile,
    atan_alpha: Real,
}

fn ceil_int(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

fn to_i64(n: &BigInt) -> Result<i64> {
    n.to_i64()
        .ok_or_else(|| Error::ScanBudgetExceeded(n.to_string()))
}

/// `|x|` wrapped into `[0, π]` for `x ∈ (-2π, 2π)`.
fn wrap(x: Real, prec: u32) -> Real {
    let two_pi = pi(prec).mul_pow2(1);
    let a = x.abs();
    if a.cmp_value(&pi(prec)) == Ordering::Greater {
        &two_pi - &a
    } else {
        a
    }
}

/// Half-angle between the ray and `point`, computed the same way as the
/// convergent profile for first-quadrant points.
pub fn point_half_angle(alpha: &Alpha, point: LatticePoint, prec: u32) -> Result<Real> {
    let LatticePoint { q, p } = point;
    if q >= 1 && p >= 0 {
        return half_angle(alpha, &BigRational::new(p.into(), q.into()), prec);
    }
    let work = prec + GUARD_BITS;
    let phi = alpha.value(work)?.atan();
    if q == 0 && p > 0 {
        return Ok((&pi(work).mul_pow2(-1) - &phi).with_precision(prec));
    }
    let ang = Real::atan2(&Real::from_int(p, work), &Real::from_int(q, work));
    Ok(wrap(&ang - &phi, work).with_precision(prec))
}

impl LatticeOracle {
    /// Scans every lattice point with `q² + p² < r_max²`.
    pub fn new(alpha: &Alpha, r_max: &Radius, strategy: ScanStrategy, prec: u32) -> Result<LatticeOracle> {
        let r2_max = r_max.squared();
        if r2_max > BigRational::from_integer(BigInt::from(MAX_SCAN_RADIUS * MAX_SCAN_RADIUS)) {
            return Err(Error::ScanBudgetExceeded(r_max.to_real(prec).to_decimal(12)));
        }
        let strategy = match strategy {
            ScanStrategy::Auto if r2_max <= BigRational::from_integer((FULL_SCAN_RADIUS * FULL_SCAN_RADIUS).into()) => {
                ScanStrategy::Full
            }
            ScanStrategy::Auto => ScanStrategy::Windowed,
            s => s,
        };
        // largest integer norm strictly inside
        let n_max = to_i64(&(ceil_int(&r2_max) - 1))?;
        let work = prec + GUARD_BITS;
        let atan_alpha = alpha.value(work)?.atan();
        let mut entries = match strategy {
            ScanStrategy::Full => full_candidates(n_max, &atan_alpha, prec),
            _ => windowed_candidates(alpha, n_max, prec)?,
        };
        entries.sort_by(|a, b| a.norm_sq.cmp(&b.norm_sq).then(a.point.cmp(&b.point)));
        let mut prefix_best = Vec::with_capacity(entries.len());
        let mut best = 0usize;
        for i in 0..entries.len() {
            if i > 0 && beats(&entries[i], &entries[best]) {
                best = i;
            }
            prefix_best.push(best);
        }
        let profile = SectorProfile::covering(alpha, &r2_max, 2, prec)?;
        Ok(LatticeOracle {
            alpha: alpha.clone(),
            prec,
            strategy,
            r2_max,
            entries,
            prefix_best,
            profile,
            atan_alpha: atan_alpha.with_precision(prec),
        })
    }

    pub fn strategy(&self) -> ScanStrategy {
        self.strategy
    }

    pub fn profile(&self) -> &SectorProfile {
        &self.profile
    }

    pub fn candidate_count(&self) -> usize {
        self.entries.len()
    }

    /// `atan α`
    pub fn ray_angle(&self) -> &Real {
        &self.atan_alpha
    }

    /// Best entry among points with norm `≤ n`.
    fn best_up_to(&self, n: i64) -> Option<usize> {
        let count = self.entries.partition_point(|e| e.norm_sq <= n);
        (count > 0).then(|| self.prefix_best[count - 1])
    }

    fn theta_for(&self, best: Option<usize>) -> Result<Real> {
        match best {
            None => Ok(pi(self.prec).mul_pow2(1)),
            Some(i) => Ok(point_half_angle(&self.alpha, self.entries[i].point, self.prec)?.mul_pow2(1)),
        }
    }

    pub fn best_point(&self, r: &Radius) -> Result<OracleResult> {
        let r2 = r.squared();
        if r2 > self.r2_max {
            return Err(Error::OutOfRange(format!(
                "{} beyond the scanned radius",
                r.to_real(self.prec).to_decimal(12)
            )));
        }
        let n = to_i64(&(ceil_int(&r2) - 1))?;
        let best = self.best_up_to(n);
        let theta_exact = self.theta_for(best)?;
        let area_exact = &Real::from_ratio(&r2, self.prec) * &theta_exact.mul_pow2(-1);
        let cf_branch = self.profile.branch(r)?;
        let theta_cf = self.profile.theta_at(cf_branch);
        let matches_cf = agrees(&theta_cf, &theta_exact, 4);
        Ok(OracleResult {
            r2,
            best_point: best.map(|i| self.entries[i].point),
            theta_exact,
            area_exact,
            theta_cf,
            cf_branch,
            matches_cf,
        })
    }

    /// Squared norms at which the best point changes.
    fn oracle_events(&self) -> Vec<i64> {
        let mut out = Vec::new();
        let mut last = None;
        for (i, e) in self.entries.iter().enumerate() {
            let b = self.prefix_best[i];
            if last != Some(b) {
                if out.last() != Some(&e.norm_sq) {
                    out.push(e.norm_sq);
                }
                last = Some(b);
            }
        }
        out
    }

    /// Piecewise-constant oracle/profile state on `(0, r2_max]`.
    fn pieces(&self) -> Result<Vec<Piece>> {
        let n_top = to_i64(&ceil_int(&self.r2_max))?;
        let mut cuts: Vec<i64> = self.oracle_events();
        for b in self.profile.breakpoints() {
            if let Some(v) = b.r2.to_i64() {
                cuts.push(v);
            }
        }
        cuts.push(0);
        cuts.retain(|&c| c < n_top);
        cuts.sort_unstable();
        cuts.dedup();
        let mut pieces: Vec<Piece> = Vec::with_capacity(cuts.len());
        for (j, &lo) in cuts.iter().enumerate() {
            let hi = cuts.get(j + 1).copied().unwrap_or(n_top);
            let best = self.best_up_to(lo);
            let branch = self.profile.branch(&Radius::Squared(BigRational::from_integer((lo + 1).into())))?;
            let theta = self.theta_for(best)?;
            let agree = agrees(&self.profile.theta_at(branch), &theta, 4);
            match pieces.last_mut() {
                Some(prev) if prev.best == best && prev.branch == branch => prev.hi = hi,
                _ => pieces.push(Piece {
                    lo,
                    hi,
                    best,
                    branch,
                    agree,
                }),
            }
        }
        Ok(pieces)
    }

    /// Samples `(r_min, r_max]` uniformly, compares the oracle with the
    /// convergent profile at each sample, and reports each run of disagreeing
    /// samples sharing one oracle point and one profile branch. Endpoints
    /// are the exact squared radii where that state begins and ends, clipped
    /// to the sampled window.
    pub fn discrepancy_scan(&self, r_min: &Radius, r_max: &Radius, samples: usize) -> Result<Vec<Disagreement>> {
        if samples < 1 {
            return Err(Error::InvalidInput("need at least one sample".into()));
        }
        let (lo2, hi2) = (r_min.squared(), r_max.squared());
        if lo2.is_negative() || hi2 <= lo2 {
            return Err(Error::InvalidInput("need 0 ≤ r_min < r_max".into()));
        }
        if hi2 > self.r2_max {
            return Err(Error::OutOfRange("scan window beyond the oracle's radius".into()));
        }
        let pieces = self.pieces()?;
        let n_top = to_i64(&ceil_int(&self.r2_max))?;
        // the sample grid only picks pieces, so rounded endpoints are fine as
        // long as every sample's norm is clamped into the window
        let a = r_min.to_real(self.prec).to_ratio();
        let width = r_max.to_real(self.prec).to_ratio() - &a;
        let (n_lo, n_hi) = (to_i64(&lo2.floor().to_integer())?, to_i64(&(ceil_int(&hi2) - 1))?);
        let mut hits: Vec<usize> = Vec::new();
        for j in 1..=samples {
            let r = &a + &width * BigRational::new(j.into(), samples.into());
            let n = to_i64(&(ceil_int(&(&r * &r)) - 1))?.clamp(n_lo, n_hi);
            // piece with lo ≤ n < hi
            let idx = pieces.partition_point(|p| p.lo <= n) - 1;
            if !pieces[idx].agree && hits.last() != Some(&idx) {
                hits.push(idx);
            }
        }
        let prec = self.prec;
        let sqrt_of = |x: &BigRational| Real::from_ratio(x, prec + GUARD_BITS).sqrt().with_precision(prec);
        Ok(hits
            .into_iter()
            .map(|idx| {
                let piece = &pieces[idx];
                let (plo, phi) = (
                    BigRational::from_integer(piece.lo.into()),
                    BigRational::from_integer(piece.hi.into()),
                );
                let (a, a_exact) = if plo >= lo2 { (plo, true) } else { (lo2.clone(), false) };
                // a piece ending at the scan radius has no known end
                let (b, b_exact) = if phi <= hi2 && piece.hi < n_top {
                    (phi, true)
                } else {
                    (hi2.clone(), false)
                };
                Disagreement {
                    r_lo: sqrt_of(&a).to_decimal(20),
                    r_hi: sqrt_of(&b).to_decimal(20),
                    r2_lo: a_exact.then(|| a.to_integer().to_string()),
                    r2_hi: b_exact.then(|| b.to_integer().to_string()),
                    oracle_point: piece.best.map(|i| {
                        let pt = self.entries[i].point;
                        (pt.q, pt.p)
                    }),
                    cf_branch: piece.branch.label(),
                }
            })
            .collect())
    }

    /// Maximal intervals of constant best point on `(0, r_max]` with the
    /// infimum and supremum of `r² δ` on each.
    pub fn oracle_extrema(&self) -> Result<Vec<OracleInterval>> {
        let prec = self.prec;
        let mut cuts = self.oracle_events();
        cuts.insert(0, 0);
        let top = self.r2_max.clone();
        let convergents = self.profile.convergents();
        let mut out = Vec::with_capacity(cuts.len());
        for (j, &lo) in cuts.iter().enumerate() {
            let lo_r = BigRational::from_integer(lo.into());
            if lo_r >= top {
                break;
            }
            let hi_r = cuts
                .get(j + 1)
                .map(|&h| BigRational::from_integer(h.into()))
                .filter(|h| h < &top)
                .unwrap_or_else(|| top.clone());
            let best = self.best_up_to(lo);
            let point = best.map(|i| self.entries[i].point);
            let half = self.theta_for(best)?.mul_pow2(-1);
            let convergent = point.and_then(|pt| {
                convergents
                    .iter()
                    .find(|c| c.q == BigInt::from(pt.q) && c.p == BigInt::from(pt.p))
                    .map(|c| c.k)
            });
            out.push(OracleInterval {
                inf_area: &Real::from_ratio(&lo_r, prec) * &half,
                sup_area: &Real::from_ratio(&hi_r, prec) * &half,
                r2_lo: lo_r,
                r2_hi: hi_r,
                best_point: point,
                half_angle: half,
                convergent,
            });
        }
        Ok(out)
    }
}

/// `a` ranks strictly ahead of `b`.
fn beats(a: &Entry, b: &Entry) -> bool {
    let tol = a.key.abs().max(&b.key.abs()).ulp().mul_pow2(TIE_ULPS);
    let diff = &a.key - &b.key;
    if diff.cmp_value(&-&tol) == Ordering::Less {
        return true;
    }
    if diff.cmp_value(&tol) == Ordering::Greater {
        return false;
    }
    a.point < b.point
}

fn full_candidates(n_max: i64, atan_alpha: &Real, prec: u32) -> Vec<Entry> {
    let work = atan_alpha.prec();
    let m = (n_max as f64).sqrt() as i64 + 1;
    let mut pts = Vec::new();
    for q in -m..=m {
        for p in -m..=m {
            let pt = LatticePoint { q, p };
            if (q, p) != (0, 0) && pt.norm_sq() <= n_max {
                pts.push(pt);
            }
        }
    }
    pts.into_par_iter()
        .map(|pt| {
            let ang = Real::atan2(&Real::from_int(pt.p, work), &Real::from_int(pt.q, work));
            Entry {
                point: pt,
                norm_sq: pt.norm_sq(),
                key: wrap(&ang - atan_alpha, work).with_precision(prec),
            }
        })
        .collect()
}

/// `|αq - p| / (q + αp)`, i.e. `tan δ`, for a first-quadrant point.
fn tan_key(alpha: &Alpha, approx: &Real, pt: LatticePoint, prec: u32) -> Result<Real> {
    let work = approx.prec();
    let (q, p) = (Real::from_int(pt.q, work), Real::from_int(pt.p, work));
    let aq = approx * &q;
    let mut num = &aq - &p;
    // cancellation check: keep prec + 16 bits of αq - p
    let lost = match (aq.exponent(), num.exponent()) {
        (Some(ea), Some(en)) => ea - en,
        (Some(_), None) => i64::MAX,
        _ => 0,
    };
    if lost > (work - prec - 16) as i64 {
        if pt.q == 0 {
            num = Real::from_int(pt.p, work);
        } else {
            let h = BigRational::new(pt.p.into(), pt.q.into());
            num = &alpha.minus_rational(&h, work)? * &q;
        }
    }
    let den = &q + &(approx * &p);
    Ok((num.abs() / den).with_precision(prec))
}

fn windowed_candidates(alpha: &Alpha, n_max: i64, prec: u32) -> Result<Vec<Entry>> {
    let mut pts = Vec::new();
    if n_max >= 1 {
        pts.push(LatticePoint { q: 1, p: 0 });
        pts.push(LatticePoint { q: 0, p: 1 });
    }
    let mut prev_floor = 0i64; // ⌊α·0⌋
    let mut q = 1i64;
    while q * q < n_max {
        let fl = to_i64(&alpha.floor_mul(&BigInt::from(q))?)?;
        let p_cap = ((n_max - q * q) as f64).sqrt() as i64 + 1;
        let p_cap = (0..=p_cap).rev().find(|&p| p * p + q * q <= n_max).unwrap_or(0);
        // integers in (α(q-1), αq]
        for p in (prev_floor + 1)..=fl.min(p_cap) {
            pts.push(LatticePoint { q, p });
        }
        // ⌈αq⌉ = ⌊αq⌋ + 1 unless αq is an integer
        let exact = alpha
            .exact_rational()
            .is_some_and(|a| (a * BigRational::from_integer(q.into())).is_integer());
        let ceil = if exact { fl } else { fl + 1 };
        if ceil > fl && ceil <= p_cap {
            pts.push(LatticePoint { q, p: ceil });
        }
        prev_floor = fl;
        q += 1;
    }
    let work = prec + GUARD_BITS + 32;
    let approx = alpha.value(work)?;
    pts.into_par_iter()
        .map(|pt| {
            Ok(Entry {
                point: pt,
                norm_sq: pt.norm_sq(),
                key: tan_key(alpha, &approx, pt, prec)?,
            })
        })
        .collect()
}

/// One-shot query: builds an oracle for exactly this radius.
pub fn best_point(alpha: &Alpha, r: &Radius, prec: u32) -> Result<OracleResult> {
    LatticeOracle::new(alpha, r, ScanStrategy::Auto, prec)?.best_point(r)
}
