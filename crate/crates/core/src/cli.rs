//! The `sector` command line: argument parsing, the seven reports and the
//! exit-status contract.
//!
//! | status | meaning |
//! |--------|---------|
//! | 0 | every check held |
//! | 2 | a bracket or invariant check failed |
//! | 3 | precision failure |
//! | 4 | parse, horizon or other input error |

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::alpha::Alpha;
use crate::bounds::{continuity_check, subsequential_limits, Aggregate, BoundsEngine, ResidueMap};
use crate::cf::{check_determinants, CfKind};
use crate::error::{Error, Result};
use crate::oracle::{LatticeOracle, ScanStrategy};
use crate::real::{Real, MIN_PRECISION};
use crate::sector::{parse_radius, parse_rational, Branch, Radius, SectorProfile};
use crate::surd::QuadSurd;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sector", version, about = "Lattice-free sectors around y = αx")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Clone, Debug, clap::Args)]
pub struct RunConfig {
    /// rat:p/q, quad:P,D,Q, sqrt:D, phi, e, pi[:digits], cf:[a0;a1,...,(b1,...)]
    #[arg(long, global = true)]
    pub alpha: Option<String>,
    /// number of convergents / largest index
    #[arg(long, global = true, default_value_t = 40, value_parser = clap::value_parser!(u64).range(2..))]
    pub depth: u64,
    /// working precision in bits
    #[arg(long, global = true, env = "SECTOR_PRECISION", default_value_t = crate::real::DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u32).range(MIN_PRECISION as i64..))]
    pub precision: u32,
    /// lower end of the radius window (decimal or r2:<rational>)
    #[arg(long, global = true)]
    pub r_min: Option<String>,
    /// upper end of the radius window (decimal or r2:<rational>)
    #[arg(long, global = true)]
    pub r_max: Option<String>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub samples: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// write to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// significant digits for decimal output
    #[arg(long, global = true, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub digits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// partial quotients, convergents and denominator ratios
    Expand,
    /// A(r) sampled on (0, r_max] with every breakpoint
    Area,
    /// m_k, M_k and their brackets
    Extrema,
    /// the four bracket families for k = 0..=depth
    Bounds,
    /// subsequential limits of q_k/q_{k-1} for a periodic expansion
    Limits,
    /// oracle against the convergent formula on a radius grid
    OracleCheck,
    /// intervals where the convergent formula and the oracle disagree
    DiscrepancyScan,
}

/// A rendered report and whether every check in it held.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub text: String,
    pub all_held: bool,
}

impl Outcome {
    pub fn status(&self) -> i32 {
        if self.all_held {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PrecisionFailure(_) | Error::PrecisionMismatch { .. } => EXIT_PRECISION,
        Error::IdentityViolation(_) => EXIT_CHECK_FAILED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let outcome = match execute(cli.command, &cli.config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.config.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    if !outcome.all_held {
        eprintln!("error: at least one check failed");
    }
    outcome.status()
}

/// Runs one command and renders its report.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    let text = cfg
        .alpha
        .as_deref()
        .ok_or_else(|| Error::parse("", "--alpha is required"))?;
    let alpha = Alpha::parse(text)?;
    let ctx = Ctx {
        alpha,
        cfg,
        prec: cfg.precision,
        digits: cfg.digits as usize,
    };
    match command {
        Command::Expand => ctx.expand(),
        Command::Area => ctx.area(),
        Command::Extrema => ctx.extrema(),
        Command::Bounds => ctx.bounds(),
        Command::Limits => ctx.limits(),
        Command::OracleCheck => ctx.oracle_check(),
        Command::DiscrepancyScan => ctx.discrepancy_scan(),
    }
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Table {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// An array of objects keyed by the header, in column order.
    fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| (h.to_string(), Value::String(v.clone())))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn pretty(v: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn ratio_text(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Ctx<'a> {
    alpha: Alpha,
    cfg: &'a RunConfig,
    prec: u32,
    digits: usize,
}

impl Ctx<'_> {
    fn dec(&self, x: &Real) -> String {
        x.to_decimal(self.digits)
    }

    fn format(&self, default: Format) -> Format {
        self.cfg.format.unwrap_or(default)
    }

    fn render(&self, table: &Table, all_held: bool) -> Result<Outcome> {
        let text = match self.format(Format::Csv) {
            Format::Csv => table.csv()?,
            Format::Json => pretty(&table.json())?,
        };
        Ok(Outcome { text, all_held })
    }

    fn radius(&self, flag: Option<&str>, default: &str) -> Result<Radius> {
        parse_radius(flag.unwrap_or(default), self.prec)
    }

    /// Like [`Self::radius`] but zero is allowed.
    fn lower_radius(&self, flag: Option<&str>) -> Result<Radius> {
        let text = flag.unwrap_or("0").trim();
        let zero = text.strip_prefix("r2:").unwrap_or(text);
        match parse_rational(zero) {
            Ok(v) if v.is_zero() => Ok(Radius::Squared(v)),
            _ => parse_radius(text, self.prec),
        }
    }

    fn depth(&self) -> usize {
        self.cfg.depth as usize
    }

    /// Largest bracket index the expansion supports, clamped to `--depth`
    /// for a rational α.
    fn bracket_depth(&self, wanted: usize) -> Result<usize> {
        match (self.alpha.is_rational(), self.alpha.cf().valid_horizon()) {
            (true, Some(last)) if last < 3 => Err(Error::HorizonExceeded { index: 3, horizon: last }),
            (true, Some(last)) => Ok(wanted.min(last - 3)),
            _ => Ok(wanted),
        }
    }

    fn expand(&self) -> Result<Outcome> {
        let cf = self.alpha.cf();
        let count = match (cf.kind(), cf.valid_horizon()) {
            (CfKind::Finite, Some(last)) => self.depth().min(last + 1),
            _ => self.depth(),
        };
        let convergents = cf.convergents(count)?;
        check_determinants(&convergents)?;
        let quotients = cf.quotients(count)?;
        let mut table = Table::new(&["k", "a_k", "p_k", "q_k", "c_k"]);
        for (k, c) in convergents.iter().enumerate() {
            let ratio = match k {
                0 => String::new(),
                _ => ratio_text(&BigRational::new(c.q.clone(), convergents[k - 1].q.clone())),
            };
            table.push(vec![k.to_string(), quotients[k].to_string(), c.p.to_string(), c.q.to_string(), ratio]);
        }
        self.render(&table, true)
    }

    fn area(&self) -> Result<Outcome> {
        let r_max = self.radius(self.cfg.r_max.as_deref(), "60")?;
        let samples = self.cfg.samples.unwrap_or(600) as usize;
        let profile = SectorProfile::covering(&self.alpha, &r_max.squared(), self.depth(), self.prec)?;
        let top = match &r_max {
            Radius::Real(r) => r.to_ratio(),
            // the grid needs a rational end point; stay below the exact radius
            Radius::Squared(_) => {
                let r = r_max.to_real(self.prec);
                let q = r.to_ratio();
                if &q * &q > r_max.squared() {
                    (&r - &r.ulp()).to_ratio()
                } else {
                    q
                }
            }
        };
        let series = profile.area_series(&top, samples)?;
        let mut table = Table::new(&["r", "area", "branch_k"]);
        for p in &series {
            table.push(vec![self.dec(&p.r), self.dec(&p.area), p.branch.label().to_string()]);
        }
        self.render(&table, true)
    }

    fn extrema(&self) -> Result<Outcome> {
        let profile = SectorProfile::build(&self.alpha, self.depth(), self.prec)?;
        let count = profile.depth();
        let records = profile.extrema(count)?;
        let engine = match count.checked_sub(1).map(|k| self.bracket_depth(k)) {
            Some(Ok(k)) => Some(BoundsEngine::new(&self.alpha, k, self.prec)?),
            _ => None,
        };
        let mut table = Table::new(&[
            "k", "r2_k", "r2_k1", "m_k", "M_k", "ratio", "m_lower", "m_upper", "M_lower", "M_upper", "holds",
        ]);
        let mut all_held = true;
        for rec in &records {
            let mut row = vec![
                rec.k.to_string(),
                rec.r2_lo.to_string(),
                rec.r2_hi.to_string(),
                self.dec(&rec.m),
                self.dec(&rec.big_m),
                ratio_text(&rec.ratio()),
            ];
            match engine.as_ref().filter(|e| rec.k <= e.max_k()) {
                Some(e) => {
                    let lo = e.mk_bracket(rec.k)?;
                    let hi = e.Mk_bracket(rec.k)?;
                    let held = lo.holds && hi.holds;
                    all_held &= held;
                    row.extend([
                        self.dec(&lo.lower),
                        self.dec(&lo.upper),
                        self.dec(&hi.lower),
                        self.dec(&hi.upper),
                        held.to_string(),
                    ]);
                }
                None => row.extend(std::iter::repeat_n(String::new(), 5)),
            }
            table.push(row);
        }
        self.render(&table, all_held)
    }

    fn bounds(&self) -> Result<Outcome> {
        let max_k = self.bracket_depth(self.depth())?;
        let engine = BoundsEngine::new(&self.alpha, max_k, self.prec)?;
        let brackets = engine.all()?;
        let mut table = Table::new(&["k", "target", "lower", "value", "upper", "holds"]);
        for b in &brackets {
            table.push(vec![
                b.k.to_string(),
                b.target.name().to_string(),
                self.dec(&b.lower),
                self.dec(&b.value),
                self.dec(&b.upper),
                b.holds.to_string(),
            ]);
        }
        self.render(&table, brackets.iter().all(|b| b.holds))
    }

    fn surd_json(&self, s: &QuadSurd) -> SurdJson {
        SurdJson {
            value: self.dec(&s.to_real(self.prec)),
            exact: s.to_string(),
        }
    }

    fn aggregate_json(&self, a: &Aggregate) -> AggregateJson {
        AggregateJson {
            residue: a.i,
            value: self.dec(&a.value),
            exact: a.exact.to_string(),
        }
    }

    fn limits(&self) -> Result<Outcome> {
        let cf = self.alpha.cf();
        let consts = subsequential_limits(cf, self.prec)?;
        let map: ResidueMap = consts.residues;
        let depth = self.depth();
        let mut convergence = Vec::with_capacity(map.n);
        for i in 1..=map.n {
            let first = map.ratio_index(i, 0);
            if first > depth {
                continue;
            }
            let count = (depth - first) / map.n;
            let report = continuity_check(cf, i, count, self.prec)?;
            convergence.push(ConvergenceJson {
                i,
                limit: self.surd_json(&report.limit),
                monotone_from_j: report.monotone_from,
                rows: report
                    .rows
                    .iter()
                    .map(|r| ConvergenceRow {
                        j: r.j,
                        k: r.index,
                        c_k: ratio_text(&r.c),
                        diff: self.dec(&r.diff),
                    })
                    .collect(),
            });
        }
        let report = LimitsJson {
            alpha: self.alpha.label().to_string(),
            preperiod: cf.preperiod().iter().map(BigInt::to_string).collect(),
            period: consts.period.iter().map(BigInt::to_string).collect(),
            l: map.l,
            n: map.n,
            index_map: (1..=depth)
                .map(|k| IndexEntry {
                    k,
                    residue: map.of_ratio(k),
                })
                .collect(),
            c: consts
                .limits
                .iter()
                .map(|lim| LimitJson {
                    i: lim.i,
                    cycle: lim.cycle.iter().map(BigInt::to_string).collect(),
                    next_b: lim.next_b.to_string(),
                    value: self.dec(&lim.c.to_real(self.prec)),
                    exact: lim.c.to_string(),
                    m_bound: self.surd_json(&lim.m_bound),
                    nu_bound: self.surd_json(&lim.nu_bound),
                    mu_bound: self.surd_json(&lim.mu_bound),
                })
                .collect(),
            m: self.aggregate_json(&consts.m),
            nu: self.aggregate_json(&consts.nu),
            big_m: self.aggregate_json(&consts.big_m),
            mu: self.aggregate_json(&consts.mu),
            convergence,
        };
        let text = match self.format(Format::Json) {
            Format::Json => pretty(&report)?,
            Format::Csv => {
                let mut table = Table::new(&["name", "residue", "value", "exact"]);
                for lim in &report.c {
                    table.push(vec![format!("C_{}", lim.i), lim.i.to_string(), lim.value.clone(), lim.exact.clone()]);
                }
                for (name, a) in [("m", &report.m), ("nu", &report.nu), ("M", &report.big_m), ("mu", &report.mu)] {
                    table.push(vec![name.to_string(), a.residue.to_string(), a.value.clone(), a.exact.clone()]);
                }
                table.csv()?
            }
        };
        Ok(Outcome { text, all_held: true })
    }

    /// `samples` rational radii evenly spaced on `(r_min, r_max]`, the last
    /// one being `r_max` itself.
    fn grid(&self, r_min: &Radius, r_max: &Radius, samples: usize) -> Result<Vec<Radius>> {
        let (lo2, hi2) = (r_min.squared(), r_max.squared());
        if hi2 <= lo2 {
            return Err(Error::InvalidInput("need r_min < r_max".into()));
        }
        let a = r_min.to_real(self.prec).to_ratio();
        let width = r_max.to_real(self.prec).to_ratio() - &a;
        let mut out: Vec<Radius> = (1..samples)
            .map(|j| {
                let r = &a + &width * BigRational::new(j.into(), samples.into());
                Radius::Squared(&r * &r)
            })
            .filter(|r| r.squared() > lo2 && r.squared() < hi2)
            .collect();
        out.push(r_max.clone());
        Ok(out)
    }

    fn oracle_check(&self) -> Result<Outcome> {
        let r_min = self.lower_radius(self.cfg.r_min.as_deref())?;
        let r_max = self.radius(self.cfg.r_max.as_deref(), "30")?;
        let samples = self.cfg.samples.unwrap_or(100) as usize;
        let oracle = LatticeOracle::new(&self.alpha, &r_max, ScanStrategy::Auto, self.prec)?;
        let convergents = oracle.profile().convergents();
        let mut table = Table::new(&["r", "theta_cf", "theta_exact", "best_q", "best_p", "agree"]);
        let mut all_held = true;
        for r in self.grid(&r_min, &r_max, samples)? {
            let res = oracle.best_point(&r)?;
            let (q, p) = match res.best_point {
                Some(pt) => (pt.q.to_string(), pt.p.to_string()),
                None => (String::new(), String::new()),
            };
            // where the oracle's winner is the branch's own convergent, the
            // two apertures must coincide
            if let (Branch::Convergent(k), Some(pt)) = (res.cf_branch, res.best_point) {
                let c = &convergents[k];
                if c.q == BigInt::from(pt.q) && c.p == BigInt::from(pt.p) && !res.matches_cf {
                    all_held = false;
                }
            }
            table.push(vec![
                self.dec(&r.to_real(self.prec)),
                self.dec(&res.theta_cf),
                self.dec(&res.theta_exact),
                q,
                p,
                res.matches_cf.to_string(),
            ]);
        }
        self.render(&table, all_held)
    }

    fn discrepancy_scan(&self) -> Result<Outcome> {
        let r_min = self.lower_radius(self.cfg.r_min.as_deref())?;
        let r_max = self.radius(self.cfg.r_max.as_deref(), "30")?;
        let samples = self.cfg.samples.unwrap_or(10_000) as usize;
        let oracle = LatticeOracle::new(&self.alpha, &r_max, ScanStrategy::Auto, self.prec)?;
        let found = oracle.discrepancy_scan(&r_min, &r_max, samples)?;
        let text = match self.format(Format::Json) {
            Format::Json => pretty(&found)?,
            Format::Csv => {
                let mut table = Table::new(&["r_lo", "r_hi", "r2_lo", "r2_hi", "oracle_q", "oracle_p", "cf_branch"]);
                for d in &found {
                    let (q, p) = match d.oracle_point {
                        Some((q, p)) => (q.to_string(), p.to_string()),
                        None => (String::new(), String::new()),
                    };
                    table.push(vec![
                        d.r_lo.clone(),
                        d.r_hi.clone(),
                        d.r2_lo.clone().unwrap_or_default(),
                        d.r2_hi.clone().unwrap_or_default(),
                        q,
                        p,
                        d.cf_branch.to_string(),
                    ]);
                }
                table.csv()?
            }
        };
        Ok(Outcome { text, all_held: true })
    }
}

#[derive(Serialize)]
struct SurdJson {
    value: String,
    exact: String,
}

#[derive(Serialize)]
struct AggregateJson {
    residue: usize,
    value: String,
    exact: String,
}

#[derive(Serialize)]
struct LimitJson {
    i: usize,
    cycle: Vec<String>,
    next_b: String,
    value: String,
    exact: String,
    m_bound: SurdJson,
    nu_bound: SurdJson,
    mu_bound: SurdJson,
}

#[derive(Serialize)]
struct IndexEntry {
    k: usize,
    residue: Option<usize>,
}

#[derive(Serialize)]
struct ConvergenceRow {
    j: usize,
    k: usize,
    c_k: String,
    diff: String,
}

#[derive(Serialize)]
struct ConvergenceJson {
    i: usize,
    limit: SurdJson,
    monotone_from_j: Option<usize>,
    rows: Vec<ConvergenceRow>,
}

#[derive(Serialize)]
struct LimitsJson {
    alpha: String,
    preperiod: Vec<String>,
    period: Vec<String>,
    l: usize,
    n: usize,
    /// residue class of each ratio index `k`
    index_map: Vec<IndexEntry>,
    #[serde(rename = "C")]
    c: Vec<LimitJson>,
    m: AggregateJson,
    nu: AggregateJson,
    #[serde(rename = "M")]
    big_m: AggregateJson,
    mu: AggregateJson,
    convergence: Vec<ConvergenceJson>,
}
