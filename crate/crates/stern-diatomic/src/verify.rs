//! Range-scale empirical verification: exact domination scans, brute-force
//! record confirmation, the limit constant, ratio convergence along records,
//! the upper-envelope comparison, and the gap ledger.
//!
//! Every scan partitions its index range into disjoint blocks and merges
//! associatively (max of maxima, union of violations, sum of counts), so the
//! produced report is byte-identical regardless of the block decomposition.
//! Exact quantities stay exact; floats go through the precision policy of
//! [`crate::hp`].

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::envelope::{
    gap_sample, gap_slope_on_piece, h_at, refined_breakpoints_for, GapSign, Segment,
};
use crate::error::{Error, Result};
use crate::hp::{agreement_bits, HpCtx, HpFloat};
use crate::sequence::{record_index, record_point, stern_range};
use crate::{Nat, Rat};

/// One failed predicate instance, with the exact values that witness it.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub at: String,
    pub details: String,
}

/// The extremal value a scan tracked (exact or policy-checked float).
#[derive(Clone, Debug)]
pub enum ReportValue {
    Rat(Rat),
    Float(HpFloat),
}

impl ReportValue {
    pub fn render(&self) -> String {
        match self {
            ReportValue::Rat(r) => r.to_string(),
            ReportValue::Float(f) => f.to_decimal_string(),
        }
    }

    fn type_label(&self) -> &'static str {
        match self {
            ReportValue::Rat(_) => "rat",
            ReportValue::Float(_) => "float",
        }
    }
}

/// A typed sample row of a scan report.
pub trait ReportRow {
    const COLUMNS: &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// Result of a range verification: extrema, witnesses, emitted samples.
///
/// Deterministic: identical inputs (including precision) produce
/// byte-identical CSV and JSON, regardless of block decomposition.
#[derive(Clone, Debug)]
pub struct ScanReport<R> {
    pub kind: &'static str,
    pub range: (Nat, Nat),
    pub best_value: ReportValue,
    pub best_arg: Nat,
    pub violations: Vec<Violation>,
    pub samples_emitted: u64,
    /// Per-kind summary values (scanned counts, sign tallies, ...).
    pub extra: Vec<(&'static str, String)>,
    pub rows: Vec<R>,
}

impl<R: ReportRow> ScanReport<R> {
    /// True when the scanned predicate held everywhere.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# kind={}\n", self.kind));
        out.push_str(&format!("# range={}..{}\n", self.range.0, self.range.1));
        out.push_str(&format!(
            "# best={} @ {}\n",
            self.best_value.render(),
            self.best_arg
        ));
        for (k, v) in &self.extra {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str(&format!("# violations={}\n", self.violations.len()));
        for v in &self.violations {
            out.push_str(&format!("# violation at {}: {}\n", v.at, v.details));
        }
        out.push_str(&format!("# samples={}\n", self.samples_emitted));
        out.push_str(&R::COLUMNS.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.cells().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let extra: serde_json::Map<String, serde_json::Value> = self
            .extra
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
            .collect();
        let value = serde_json::json!({
            "kind": self.kind,
            "range": [self.range.0.to_string(), self.range.1.to_string()],
            "best_value": {
                "type": self.best_value.type_label(),
                "value": self.best_value.render(),
            },
            "best_arg": self.best_arg.to_string(),
            "violations": self.violations.iter().map(|v| serde_json::json!({
                "at": v.at, "details": v.details,
            })).collect::<Vec<_>>(),
            "samples_emitted": self.samples_emitted,
            "extra": extra,
            "columns": R::COLUMNS,
            "rows": self.rows.iter().map(|r| r.cells()).collect::<Vec<_>>(),
        });
        serde_json::to_string_pretty(&value).expect("report serialization")
    }
}

/// Block size for scan partitioning. The report is invariant under it.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub block_size: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            block_size: 1 << 16,
        }
    }
}

// ---------------------------------------------------------------------------
// domination: a(m) <= h(m)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct DominationRow {
    pub m: Nat,
    pub a: Nat,
    pub h: Rat,
    pub relation: &'static str,
}

impl ReportRow for DominationRow {
    const COLUMNS: &'static [&'static str] = &["m", "a", "h", "relation"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.a.to_string(),
            self.h.to_string(),
            self.relation.to_string(),
        ]
    }
}

/// Walks consecutive envelope pieces and compares integers against the
/// chord by cross-multiplication, avoiding per-point rational reduction.
struct PieceWalker {
    n: u64,
    seg: Segment,
    // h(m) = (ps * m + rq) / qs with qs > 0
    ps: BigInt,
    rq: BigInt,
    qs: BigInt,
}

impl PieceWalker {
    fn new() -> Result<Self> {
        let seg = Segment::fib(2)?;
        let (ps, rq, qs) = Self::consts(&seg);
        Ok(PieceWalker {
            n: 2,
            seg,
            ps,
            rq,
            qs,
        })
    }

    fn consts(seg: &Segment) -> (BigInt, BigInt, BigInt) {
        let p = seg.slope.numer();
        let q = seg.slope.denom();
        let r = seg.intercept.numer();
        let s = seg.intercept.denom();
        (p * s, r * q, q * s)
    }

    fn advance_to(&mut self, m: &Nat) -> Result<()> {
        while *m >= self.seg.x_hi {
            self.n += 1;
            self.seg = Segment::fib(self.n)?;
            let (ps, rq, qs) = Self::consts(&self.seg);
            self.ps = ps;
            self.rq = rq;
            self.qs = qs;
        }
        Ok(())
    }

    /// `a(m) * qs - (ps * m + rq)`: the sign of `a(m) - h(m)` scaled by the
    /// positive constant `qs` of the current piece.
    fn diff_num(&self, m: &Nat, a: &Nat) -> BigInt {
        let m_int = BigInt::from(m.clone());
        let a_int = BigInt::from(a.clone());
        a_int * &self.qs - (&self.ps * m_int + &self.rq)
    }

    fn h_value(&self, m: &Nat) -> Rat {
        self.seg.eval(&Rat::from_integer(BigInt::from(m.clone())))
    }
}

/// Exact check of `a(m) <= h(m)` for every `m` in `[1, m_max]`.
///
/// Violations carry exact witnesses; equality cases are recorded as rows
/// (they are expected exactly at the record points `m_n`). The tracked best
/// value is the maximum of `a(m) - h(m)`, with its first argmax.
pub fn check_domination(m_max: &Nat) -> Result<ScanReport<DominationRow>> {
    check_domination_with(m_max, &ScanOptions::default())
}

pub fn check_domination_with(
    m_max: &Nat,
    opts: &ScanOptions,
) -> Result<ScanReport<DominationRow>> {
    if m_max.is_zero() {
        return Err(Error::IndexBelowMin { n: 0, min: 1 });
    }
    let mut walker = PieceWalker::new()?;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    // max of a(m) - h(m) kept unreduced as (num, den > 0), so the hot loop
    // compares by cross-multiplication instead of reducing a rational per m
    let mut best: Option<(BigInt, BigInt, Nat)> = None;
    let mut equalities = 0u64;
    let mut scanned = 0u64;

    let mut block_lo = Nat::one();
    while block_lo <= *m_max {
        let block_hi = (&block_lo + Nat::from(opts.block_size - 1)).min(m_max.clone());
        let values = stern_range(&block_lo, &block_hi)?;
        let mut m = block_lo.clone();
        for a in &values {
            walker.advance_to(&m)?;
            let diff = walker.diff_num(&m, a);
            let better = match &best {
                Some((bn, bd, _)) => &diff * bd > bn * &walker.qs,
                None => true,
            };
            if better {
                best = Some((diff.clone(), walker.qs.clone(), m.clone()));
            }
            if diff.is_positive() {
                let hv = walker.h_value(&m);
                violations.push(Violation {
                    at: m.to_string(),
                    details: format!(
                        "a(m) = {a} exceeds h(m) = {hv} by {}",
                        Rat::new(diff, walker.qs.clone())
                    ),
                });
                rows.push(DominationRow {
                    m: m.clone(),
                    a: a.clone(),
                    h: hv,
                    relation: "violation",
                });
            } else if diff.is_zero() {
                equalities += 1;
                rows.push(DominationRow {
                    m: m.clone(),
                    a: a.clone(),
                    h: walker.h_value(&m),
                    relation: "equal",
                });
            }
            scanned += 1;
            m += 1u32;
        }
        block_lo = block_hi + Nat::one();
    }

    let (best_num, best_den, best_arg) = best.expect("non-empty range");
    let best_value = Rat::new(best_num, best_den);
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "domination",
        range: (Nat::one(), m_max.clone()),
        best_value: ReportValue::Rat(best_value),
        best_arg,
        violations,
        samples_emitted: samples,
        extra: vec![
            ("scanned", scanned.to_string()),
            ("equalities", equalities.to_string()),
        ],
        rows,
    })
}

// ---------------------------------------------------------------------------
// records: interval maxima are Fibonacci numbers, first at m_n
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RecordsRow {
    pub n: u64,
    pub m_expected: Nat,
    pub f_expected: Nat,
    pub max_found: Nat,
    pub first_argmax: Nat,
    pub confirmed: bool,
}

impl ReportRow for RecordsRow {
    const COLUMNS: &'static [&'static str] = &[
        "n",
        "m_expected",
        "f_expected",
        "max_found",
        "first_argmax",
        "confirmed",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.m_expected.to_string(),
            self.f_expected.to_string(),
            self.max_found.to_string(),
            self.first_argmax.to_string(),
            self.confirmed.to_string(),
        ]
    }
}

/// Feasibility cap for the brute-force record scan.
pub const RECORDS_MAX_LEVEL: u64 = 26;

/// Brute-force confirmation, for each `n` in `[2, n_max]`, that `max a(m)`
/// over `2^(n-2) <= m <= 2^(n-1)` equals `F_n` and first occurs at `m_n`.
pub fn verify_records(n_max: u64) -> Result<ScanReport<RecordsRow>> {
    verify_records_with(n_max, &ScanOptions::default())
}

pub fn verify_records_with(n_max: u64, opts: &ScanOptions) -> Result<ScanReport<RecordsRow>> {
    if !(2..=RECORDS_MAX_LEVEL).contains(&n_max) {
        return Err(Error::InfeasibleRange {
            lo: "2".into(),
            hi: n_max.to_string(),
            reason: format!("brute-force record scan supports 2 <= n <= {RECORDS_MAX_LEVEL}"),
        });
    }
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut scanned = 0u64;
    let mut best: Option<(Nat, Nat)> = None;

    for n in 2..=n_max {
        let lo = Nat::one() << (n - 2);
        let hi = Nat::one() << (n - 1);
        let mut level_best: Option<(Nat, Nat)> = None;
        let mut block_lo = lo.clone();
        while block_lo <= hi {
            let block_hi = (&block_lo + Nat::from(opts.block_size - 1)).min(hi.clone());
            let values = stern_range(&block_lo, &block_hi)?;
            let mut m = block_lo.clone();
            for a in &values {
                let better = match &level_best {
                    Some((b, _)) => a > b,
                    None => true,
                };
                if better {
                    level_best = Some((a.clone(), m.clone()));
                }
                scanned += 1;
                m += 1u32;
            }
            block_lo = block_hi + Nat::one();
        }
        let (max_found, first_argmax) = level_best.expect("non-empty interval");
        let expected = record_point(n)?;
        let confirmed = max_found == expected.f && first_argmax == expected.m;
        if !confirmed {
            violations.push(Violation {
                at: n.to_string(),
                details: format!(
                    "level {n}: expected max F_{n} = {} first at m_{n} = {}, found {} first at {}",
                    expected.f, expected.m, max_found, first_argmax
                ),
            });
        }
        let better = match &best {
            Some((b, _)) => max_found > *b,
            None => true,
        };
        if better {
            best = Some((max_found.clone(), first_argmax.clone()));
        }
        rows.push(RecordsRow {
            n,
            m_expected: expected.m,
            f_expected: expected.f,
            max_found,
            first_argmax,
            confirmed,
        });
    }

    let (best_value, best_arg) = best.expect("at least one level");
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "records",
        range: (Nat::one(), Nat::one() << (n_max - 1)),
        best_value: ReportValue::Rat(Rat::from_integer(BigInt::from(best_value))),
        best_arg,
        violations,
        samples_emitted: samples,
        extra: vec![("scanned", scanned.to_string())],
        rows,
    })
}

// ---------------------------------------------------------------------------
// the limit constant and ratio machinery
// ---------------------------------------------------------------------------

/// `C = phi^(log2 3) / sqrt 5 = 0.95885419082476738320909430420...`.
///
/// Computed under the dual-precision policy; additionally the alternative
/// closed form `(phi/sqrt 5)(3/2)^(log2 phi)` is evaluated at the same
/// precision and must agree to `prec - 8` bits.
pub fn limit_constant(prec: u32) -> Result<HpFloat> {
    let c = HpFloat::compute(prec, "limit_constant", |ctx| (ctx.limit_c(), None))?;
    let mut ctx = HpCtx::new(prec);
    let alt = ctx.limit_c_alt();
    let agree = agreement_bits(c.value(), &alt, None);
    let need = prec as i64 - 8;
    if agree < need {
        return Err(Error::PrecisionPolicy {
            what: "limit_constant closed forms".into(),
            prec,
            prec2: prec,
            agree,
            need,
        });
    }
    Ok(c)
}

/// `(phi + 1)/sqrt 5 = 1.170820...`, the classical upper bound the limit
/// value improves on.
pub fn calkin_wilf_upper(prec: u32) -> Result<HpFloat> {
    HpFloat::compute(prec, "calkin_wilf_upper", |ctx| (ctx.upper_bound(), None))
}

/// One measured ratio `a(m) / m^(log2 phi)`.
#[derive(Clone, Debug)]
pub struct RatioSample {
    pub m: Nat,
    pub a: Nat,
    pub ratio: HpFloat,
    pub prec: u32,
}

/// `a(m) / m^(log2 phi)` at working precision `prec`.
pub fn ratio(m: &Nat, prec: u32) -> Result<RatioSample> {
    if m.is_zero() {
        return Err(Error::IndexBelowMin { n: 0, min: 1 });
    }
    let a = crate::sequence::stern(m);
    let ratio = ratio_of(m, &a, prec)?;
    Ok(RatioSample {
        m: m.clone(),
        a,
        ratio,
        prec,
    })
}

fn ratio_of(m: &Nat, a: &Nat, prec: u32) -> Result<HpFloat> {
    HpFloat::compute(prec, "ratio", |ctx| {
        let av = ctx.from_nat(a);
        let pl = ctx.power_law(m);
        (ctx.div(&av, &pl), None)
    })
}

/// `|a(m_n) / (C m_n^(log2 phi)) - 1|`, the relative distance of the nth
/// record ratio from the limit; decays like `2^-n`.
///
/// Needs `prec >= 64 + n` working bits: the quantity is produced by
/// cancellation at unit scale, so `n` leading bits vanish and the policy is
/// anchored at 1.
pub fn record_ratio_error(n: u64, prec: u32) -> Result<HpFloat> {
    if n < 2 {
        return Err(Error::IndexBelowMin { n, min: 2 });
    }
    let min = 64 + u32::try_from(n).map_err(|_| Error::IndexBelowMin { n, min: 2 })?;
    if prec < min {
        return Err(Error::PrecisionTooLow { prec, min });
    }
    let rp = record_point(n)?;
    HpFloat::compute(prec, "record_ratio_error", |ctx| {
        let c = ctx.limit_c();
        let pl = ctx.power_law(&rp.m);
        let denom = ctx.mul(&c, &pl);
        let f = ctx.from_nat(&rp.f);
        let r = ctx.div(&f, &denom);
        let one = ctx.one();
        let v = ctx.abs(&ctx.sub(&r, &one));
        (v, Some(one))
    })
}

// ---------------------------------------------------------------------------
// running maximum scan
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct RatioRow {
    pub m: Nat,
    pub a: Nat,
    pub ratio: HpFloat,
}

impl ReportRow for RatioRow {
    const COLUMNS: &'static [&'static str] = &["m", "a", "ratio"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.a.to_string(),
            self.ratio.to_decimal_string(),
        ]
    }
}

/// Incremental running-maximum state over `a(m)/m^(log2 phi)`.
///
/// Candidates are prefiltered in `f64` with a conservative relative margin;
/// only plausible improvements are evaluated at full precision, so the
/// result is exactly the maximum with its first argmax, independent of how
/// callers feed blocks. Resumable from a stored best: feeding the remaining
/// range reproduces the uninterrupted state bit for bit.
pub struct RunningMax {
    prec: u32,
    exponent: f64,
    best: Option<(HpFloat, Nat, Nat)>,
    best_f64: f64,
}

/// Conservative prefilter margin; f64 evaluation of the ratio is accurate to
/// ~1e-13 relative, anything within this band goes to exact evaluation.
const PREFILTER_MARGIN: f64 = 1e-9;

impl RunningMax {
    pub fn new(prec: u32) -> Self {
        RunningMax {
            prec,
            exponent: ((1.0 + 5f64.sqrt()) / 2.0).log2(),
            best: None,
            best_f64: 0.0,
        }
    }

    /// Restore from a previously recorded best.
    pub fn resume(prec: u32, best_ratio: HpFloat, best_m: Nat, best_a: Nat) -> Self {
        let best_f64 = best_ratio.to_f64();
        RunningMax {
            prec,
            exponent: ((1.0 + 5f64.sqrt()) / 2.0).log2(),
            best: Some((best_ratio, best_m, best_a)),
            best_f64,
        }
    }

    /// Offer one `(m, a(m))`; returns true when it became the new maximum.
    pub fn offer(&mut self, m: &Nat, a: &Nat) -> Result<bool> {
        let approx = a.to_f64().unwrap_or(f64::INFINITY)
            / m.to_f64().unwrap_or(1.0).powf(self.exponent);
        if self.best.is_some() && approx <= self.best_f64 * (1.0 - PREFILTER_MARGIN) {
            return Ok(false);
        }
        let exact = ratio_of(m, a, self.prec)?;
        let improves = match &self.best {
            Some((b, _, _)) => exact.cmp(b) == std::cmp::Ordering::Greater,
            None => true,
        };
        if improves {
            self.best_f64 = exact.to_f64();
            self.best = Some((exact, m.clone(), a.clone()));
        }
        Ok(improves)
    }

    pub fn best(&self) -> Option<&(HpFloat, Nat, Nat)> {
        self.best.as_ref()
    }
}

#[derive(Clone, Debug)]
pub struct RunningMaxOptions {
    pub block_size: u64,
    /// Also track the exact maximum of `a(m)/h(m)` (1 exactly at records).
    pub track_h_ratio: bool,
}

impl Default for RunningMaxOptions {
    fn default() -> Self {
        RunningMaxOptions {
            block_size: 1 << 16,
            track_h_ratio: false,
        }
    }
}

/// Scan `a(m)/m^(log2 phi)` over `[m_lo, m_hi]`, tracking the running
/// maximum and emitting a sample at every multiple of `emit_every`
/// (0 disables periodic samples).
pub fn running_max_scan(
    m_lo: &Nat,
    m_hi: &Nat,
    prec: u32,
    emit_every: u64,
) -> Result<ScanReport<RatioRow>> {
    running_max_scan_with(m_lo, m_hi, prec, emit_every, &RunningMaxOptions::default())
}

pub fn running_max_scan_with(
    m_lo: &Nat,
    m_hi: &Nat,
    prec: u32,
    emit_every: u64,
    opts: &RunningMaxOptions,
) -> Result<ScanReport<RatioRow>> {
    if *m_lo < Nat::from(2u32) {
        return Err(Error::IndexBelowMin {
            n: m_lo.to_u64().unwrap_or(0),
            min: 2,
        });
    }
    if m_lo > m_hi {
        return Err(Error::EmptyRange {
            lo: m_lo.to_string(),
            hi: m_hi.to_string(),
        });
    }
    let mut tracker = RunningMax::new(prec);
    let mut h_walker = if opts.track_h_ratio {
        Some(PieceWalker::new()?)
    } else {
        None
    };
    let mut h_best: Option<(Rat, Nat)> = None;
    let mut rows = Vec::new();
    let mut scanned = 0u64;

    let emit_step = Nat::from(emit_every.max(1));
    let mut block_lo = m_lo.clone();
    while block_lo <= *m_hi {
        let block_hi = (&block_lo + Nat::from(opts.block_size - 1)).min(m_hi.clone());
        let values = stern_range(&block_lo, &block_hi)?;
        let mut m = block_lo.clone();
        // emission at m % emit_every == 0, tracked incrementally
        let mut emit_rem: u64 = if emit_every > 0 {
            (&block_lo % &emit_step).to_u64().expect("emit step fits u64")
        } else {
            1
        };
        for a in &values {
            tracker.offer(&m, a)?;
            if let Some(walker) = h_walker.as_mut() {
                walker.advance_to(&m)?;
                let hv = walker.h_value(&m);
                let cand = Rat::from_integer(BigInt::from(a.clone())) / hv;
                let better = match &h_best {
                    Some((b, _)) => cand > *b,
                    None => true,
                };
                if better {
                    h_best = Some((cand, m.clone()));
                }
            }
            if emit_every > 0 {
                if emit_rem == 0 {
                    rows.push(RatioRow {
                        m: m.clone(),
                        a: a.clone(),
                        ratio: ratio_of(&m, a, prec)?,
                    });
                }
                emit_rem += 1;
                if emit_rem == emit_every {
                    emit_rem = 0;
                }
            }
            scanned += 1;
            m += 1u32;
        }
        block_lo = block_hi + Nat::one();
    }

    let (best_ratio, best_m, best_a) = tracker.best().expect("non-empty range").clone();
    let mut extra = vec![
        ("scanned", scanned.to_string()),
        ("best_a", best_a.to_string()),
        ("prec", prec.to_string()),
    ];
    if let Some((hr, hm)) = &h_best {
        extra.push(("h_ratio_max", hr.to_string()));
        extra.push(("h_ratio_argmax", hm.to_string()));
    }
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "running_max",
        range: (m_lo.clone(), m_hi.clone()),
        best_value: ReportValue::Float(best_ratio),
        best_arg: best_m,
        violations: Vec::new(),
        samples_emitted: samples,
        extra,
        rows,
    })
}

// ---------------------------------------------------------------------------
// upper envelope comparison
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct UpperRow {
    pub n: u64,
    pub x_lo: Nat,
    pub x_hi: Nat,
    pub d_lo: HpFloat,
    pub d_hi: HpFloat,
    pub max_d: HpFloat,
    pub argmax: Nat,
    pub min_d: HpFloat,
    pub argmin: Nat,
}

impl ReportRow for UpperRow {
    const COLUMNS: &'static [&'static str] = &[
        "n", "x_lo", "x_hi", "d_lo", "d_hi", "max_d", "argmax", "min_d", "argmin",
    ];
    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.x_lo.to_string(),
            self.x_hi.to_string(),
            self.d_lo.to_decimal_string(),
            self.d_hi.to_decimal_string(),
            self.max_d.to_decimal_string(),
            self.argmax.to_string(),
            self.min_d.to_decimal_string(),
            self.argmin.to_string(),
        ]
    }
}

/// Default interior sample count per interval for [`upper_envelope_report`].
pub const DEFAULT_UPPER_GRID: u32 = 16;

/// `D(x) = sqrt 5 * h(x) - phi^(log2 3) x^(log2 phi)` evaluated at both
/// breakpoints of each interval `[m_n, m_{n+1}]` for `n` in `[n_lo, n_hi]`
/// and at `grid` evenly spaced interior integers; reports the per-interval
/// extrema of `D` with their argmaxes.
///
/// Report only: no threshold is asserted. `D` is convex on each interval
/// (linear minus concave), so its interval maximum sits at a breakpoint,
/// alternates sign with the parity of `n`, and decays like `(phi/2)^n`; the
/// interior minimum is negative and grows with `n`. The policy anchor is the
/// power term, the natural scale of the cancellation.
pub fn upper_envelope_report(
    n_lo: u64,
    n_hi: u64,
    prec: u32,
    grid: u32,
) -> Result<ScanReport<UpperRow>> {
    if n_lo < 2 {
        return Err(Error::IndexBelowMin { n: n_lo, min: 2 });
    }
    if n_lo > n_hi {
        return Err(Error::EmptyRange {
            lo: n_lo.to_string(),
            hi: n_hi.to_string(),
        });
    }
    let d_at = |x: &Nat| -> Result<HpFloat> {
        let hx = h_at(x)?;
        HpFloat::compute(prec, "upper_envelope_d", |ctx| {
            let hv = ctx.from_rat(&hx);
            let lhs = ctx.mul(&ctx.sqrt5(), &hv);
            let phi = ctx.phi();
            let e3 = ctx.log2_3();
            let coeff = ctx.pow(&phi, &e3);
            let pl = ctx.power_law(x);
            let rhs = ctx.mul(&coeff, &pl);
            (ctx.sub(&lhs, &rhs), Some(rhs))
        })
    };

    let mut rows = Vec::new();
    let mut best: Option<(HpFloat, Nat)> = None;
    for n in n_lo..=n_hi {
        let x_lo = record_index(n)?;
        let x_hi = record_index(n + 1)?;
        let width = &x_hi - &x_lo;
        let mut xs: Vec<Nat> = vec![x_lo.clone(), x_hi.clone()];
        for k in 1..grid.max(1) {
            xs.push(&x_lo + (&width * Nat::from(k)) / Nat::from(grid));
        }
        xs.sort();
        xs.dedup();
        let mut max_d: Option<(HpFloat, Nat)> = None;
        let mut min_d: Option<(HpFloat, Nat)> = None;
        let mut d_lo = None;
        let mut d_hi = None;
        for x in &xs {
            let d = d_at(x)?;
            if *x == x_lo {
                d_lo = Some(d.clone());
            }
            if *x == x_hi {
                d_hi = Some(d.clone());
            }
            match &max_d {
                Some((b, _)) if d.cmp(b) != std::cmp::Ordering::Greater => {}
                _ => max_d = Some((d.clone(), x.clone())),
            }
            match &min_d {
                Some((b, _)) if d.cmp(b) != std::cmp::Ordering::Less => {}
                _ => min_d = Some((d.clone(), x.clone())),
            }
        }
        let (max_d, argmax) = max_d.expect("grid non-empty");
        let (min_d, argmin) = min_d.expect("grid non-empty");
        let better = match &best {
            Some((b, _)) => max_d.cmp(b) == std::cmp::Ordering::Greater,
            None => true,
        };
        if better {
            best = Some((max_d.clone(), argmax.clone()));
        }
        rows.push(UpperRow {
            n,
            x_lo,
            x_hi,
            d_lo: d_lo.expect("left endpoint sampled"),
            d_hi: d_hi.expect("right endpoint sampled"),
            max_d,
            argmax,
            min_d,
            argmin,
        });
    }

    let (best_value, best_arg) = best.expect("at least one interval");
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "upper_envelope",
        range: (record_index(n_lo)?, record_index(n_hi + 1)?),
        best_value: ReportValue::Float(best_value),
        best_arg,
        violations: Vec::new(),
        samples_emitted: samples,
        extra: vec![("grid", grid.to_string()), ("prec", prec.to_string())],
        rows,
    })
}

// ---------------------------------------------------------------------------
// gap ledger
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct GapIntRow {
    pub x: Nat,
    pub gap_plus: Rat,
    pub gap_minus: Rat,
}

impl ReportRow for GapIntRow {
    const COLUMNS: &'static [&'static str] = &["x", "gap_plus", "gap_minus"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.x.to_string(),
            self.gap_plus.to_string(),
            self.gap_minus.to_string(),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct GapPieceRow {
    pub sign: GapSign,
    pub lo: Rat,
    pub hi: Rat,
    pub slope: Rat,
    pub rising: bool,
}

impl ReportRow for GapPieceRow {
    const COLUMNS: &'static [&'static str] = &["sign", "lo", "hi", "slope", "rising"];
    fn cells(&self) -> Vec<String> {
        vec![
            self.sign.label().to_string(),
            self.lo.to_string(),
            self.hi.to_string(),
            self.slope.to_string(),
            self.rising.to_string(),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapMode {
    Integers,
    Pieces,
}

/// A gap-ledger report in either mode. Report only: the violations list
/// carries the witnesses of interest (integer mode: non-positive `gap_plus`
/// points; piece mode: rising pieces, which contradict a per-interval
/// monotone-decrease reading) but neither mode is a pass/fail check.
pub enum GapReport {
    Integers(ScanReport<GapIntRow>),
    Pieces(ScanReport<GapPieceRow>),
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        match self {
            GapReport::Integers(r) => r.to_csv(),
            GapReport::Pieces(r) => r.to_csv(),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            GapReport::Integers(r) => r.to_json(),
            GapReport::Pieces(r) => r.to_json(),
        }
    }

    pub fn witnesses(&self) -> &[Violation] {
        match self {
            GapReport::Integers(r) => &r.violations,
            GapReport::Pieces(r) => &r.violations,
        }
    }
}

/// Exact evaluation of both gaps over `[x_lo, x_hi]`, per integer or per
/// affine piece. Requires `5 <= x_lo < x_hi`.
pub fn lemma_gap_report(x_lo: &Nat, x_hi: &Nat, mode: GapMode) -> Result<GapReport> {
    if *x_lo < Nat::from(5u32) {
        return Err(Error::InfeasibleRange {
            lo: x_lo.to_string(),
            hi: x_hi.to_string(),
            reason: "the gap ledger starts at x = 5".into(),
        });
    }
    if x_lo >= x_hi {
        return Err(Error::InvalidInterval {
            lo: x_lo.to_string(),
            hi: x_hi.to_string(),
        });
    }
    match mode {
        GapMode::Integers => gap_integers(x_lo, x_hi).map(GapReport::Integers),
        GapMode::Pieces => gap_pieces(x_lo, x_hi).map(GapReport::Pieces),
    }
}

fn gap_integers(x_lo: &Nat, x_hi: &Nat) -> Result<ScanReport<GapIntRow>> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut min_plus: Option<(Rat, Nat)> = None;
    let mut max_plus: Option<Rat> = None;
    let mut min_minus: Option<Rat> = None;
    let mut max_minus: Option<Rat> = None;
    let mut signs = [0u64; 6]; // plus neg/zero/pos, minus neg/zero/pos

    let mut x = x_lo.clone();
    while x <= *x_hi {
        let xr = Rat::from_integer(BigInt::from(x.clone()));
        let sample = gap_sample(&xr)?;
        let gp = &sample.gap_plus;
        let gm = &sample.gap_minus;
        match gp.cmp(&Rat::zero()) {
            std::cmp::Ordering::Less => signs[0] += 1,
            std::cmp::Ordering::Equal => signs[1] += 1,
            std::cmp::Ordering::Greater => signs[2] += 1,
        }
        match gm.cmp(&Rat::zero()) {
            std::cmp::Ordering::Less => signs[3] += 1,
            std::cmp::Ordering::Equal => signs[4] += 1,
            std::cmp::Ordering::Greater => signs[5] += 1,
        }
        if *gp <= Rat::zero() {
            violations.push(Violation {
                at: x.to_string(),
                details: format!("gap_plus({x}) = {gp} is not strictly positive"),
            });
        }
        if min_plus.as_ref().map_or(true, |(b, _)| *gp < *b) {
            min_plus = Some((gp.clone(), x.clone()));
        }
        if max_plus.as_ref().map_or(true, |b| *gp > *b) {
            max_plus = Some(gp.clone());
        }
        if min_minus.as_ref().map_or(true, |b| *gm < *b) {
            min_minus = Some(gm.clone());
        }
        if max_minus.as_ref().map_or(true, |b| *gm > *b) {
            max_minus = Some(gm.clone());
        }
        rows.push(GapIntRow {
            x: x.clone(),
            gap_plus: sample.gap_plus,
            gap_minus: sample.gap_minus,
        });
        x += 1u32;
    }

    let (best_value, best_arg) = min_plus.expect("non-empty range");
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "gaps_integers",
        range: (x_lo.clone(), x_hi.clone()),
        best_value: ReportValue::Rat(best_value),
        best_arg,
        violations,
        samples_emitted: samples,
        extra: vec![
            ("max_gap_plus", max_plus.expect("non-empty").to_string()),
            ("min_gap_minus", min_minus.expect("non-empty").to_string()),
            ("max_gap_minus", max_minus.expect("non-empty").to_string()),
            (
                "plus_signs_neg_zero_pos",
                format!("{}/{}/{}", signs[0], signs[1], signs[2]),
            ),
            (
                "minus_signs_neg_zero_pos",
                format!("{}/{}/{}", signs[3], signs[4], signs[5]),
            ),
        ],
        rows,
    })
}

fn gap_pieces(x_lo: &Nat, x_hi: &Nat) -> Result<ScanReport<GapPieceRow>> {
    let lo = Rat::from_integer(BigInt::from(x_lo.clone()));
    let hi = Rat::from_integer(BigInt::from(x_hi.clone()));
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut best: Option<(Rat, Nat)> = None;

    for sign in [GapSign::Plus, GapSign::Minus] {
        let points = refined_breakpoints_for(&lo, &hi, sign)?;
        for w in points.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let slope = gap_slope_on_piece(u, v, sign)?;
            let rising = slope > Rat::zero();
            if rising {
                violations.push(Violation {
                    at: u.to_string(),
                    details: format!(
                        "{} gap rises on ({u}, {v}) with slope {slope}; \
                         not monotonically decreasing there",
                        sign.label()
                    ),
                });
            }
            let arg = u.floor().to_integer().to_biguint().expect("x >= 5");
            if best.as_ref().map_or(true, |(b, _)| slope > *b) {
                best = Some((slope.clone(), arg));
            }
            rows.push(GapPieceRow {
                sign,
                lo: u.clone(),
                hi: v.clone(),
                slope,
                rising,
            });
        }
    }

    let (best_value, best_arg) = best.expect("non-empty partition");
    let samples = rows.len() as u64;
    Ok(ScanReport {
        kind: "gaps_pieces",
        range: (x_lo.clone(), x_hi.clone()),
        best_value: ReportValue::Rat(best_value),
        best_arg,
        violations,
        samples_emitted: samples,
        extra: Vec::new(),
        rows,
    })
}
