//! Command implementations behind the `stern` binary. The binary itself only
//! parses arguments; everything observable (output bytes, exit semantics)
//! lives here so integration tests can drive it directly.
//!
//! Exit contract: 0 pass, 1 verification failure, 2 usage/parse/internal
//! error (the binary maps `Err` to 2).

use std::io::Write;
use std::path::{Path, PathBuf};

use num_traits::{One, Zero};

use crate::cli::bfile::{check_entries, fetch_bfile, parse_bfile, BFILE_URL, OFFLINE_FIXTURE};
use crate::cli::checkpoint::Checkpoint;
use crate::cli::table1::table_diff;
use crate::envelope::{h_asymptotic, segment_for, PieceIndex};
use crate::error::{Error, Result};
use crate::hp::{agreement_bits, policy_digits};
use crate::sequence::{record_point, stern, stern_naive, stern_pair, stern_range};
use crate::verify::{
    calkin_wilf_upper, check_domination, lemma_gap_report, limit_constant, upper_envelope_report,
    verify_records, GapMode, RunningMax, DEFAULT_UPPER_GRID,
};
use crate::{Nat, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct GlobalOpts {
    pub prec: u32,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for GlobalOpts {
    fn default() -> Self {
        GlobalOpts {
            prec: 128,
            format: OutputFormat::Csv,
            out: None,
        }
    }
}

/// Did the command's pass predicate hold?
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

pub fn parse_nat(s: &str) -> Result<Nat> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not a non-negative integer")))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not an integer or p/q rational")))
}

fn write_output(g: &GlobalOpts, content: &str) -> Result<()> {
    match &g.out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComputeMethod {
    Fast,
    Naive,
    Pair,
    All,
}

/// Print `a(n)` in decimal. `All` runs every evaluator and insists they
/// agree before printing.
pub fn cmd_compute(n: &str, method: ComputeMethod, g: &GlobalOpts) -> Result<Outcome> {
    let n = parse_nat(n)?;
    let value = match method {
        ComputeMethod::Fast => stern(&n),
        ComputeMethod::Naive => stern_naive(&n),
        ComputeMethod::Pair => stern_pair(&n).0,
        ComputeMethod::All => {
            let fast = stern(&n);
            let naive = stern_naive(&n);
            let pair = stern_pair(&n).0;
            assert!(
                fast == naive && naive == pair,
                "internal error: evaluators disagree at n = {n}: {fast} / {naive} / {pair}"
            );
            fast
        }
    };
    write_output(g, &format!("{value}\n"))?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

/// Recompute the 22-row fixture and diff it. Exit 0 only on a perfect match.
pub fn cmd_table(g: &GlobalOpts) -> Result<Outcome> {
    let rows = table_diff()?;
    let matched = rows.iter().filter(|r| r.matches()).count();
    let content = match g.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("# kind=table1\n");
            out.push_str(&format!("# matched={matched} of {}\n", rows.len()));
            out.push_str("m,a_expected,a_computed,h_expected,h_computed,match\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.m,
                    r.a_expected,
                    r.a_computed,
                    r.h_expected,
                    r.h_computed,
                    r.matches()
                ));
            }
            out
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "kind": "table1",
                "matched": matched,
                "total": rows.len(),
                "rows": rows.iter().map(|r| serde_json::json!({
                    "m": r.m.to_string(),
                    "a_expected": r.a_expected.to_string(),
                    "a_computed": r.a_computed.to_string(),
                    "h_expected": r.h_expected.to_string(),
                    "h_computed": r.h_computed.to_string(),
                    "match": r.matches(),
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
    };
    write_output(g, &content)?;
    Ok(if matched == rows.len() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

// ---------------------------------------------------------------------------
// records
// ---------------------------------------------------------------------------

/// Print the record points `(n, m_n, F_n)` for `n` in `[2, max_n]`; each is
/// cross-checked internally against the sequence.
pub fn cmd_records(max_n: u64, g: &GlobalOpts) -> Result<Outcome> {
    if max_n < 2 {
        return Err(Error::IndexBelowMin { n: max_n, min: 2 });
    }
    let points: Vec<_> = (2..=max_n)
        .map(record_point)
        .collect::<Result<Vec<_>>>()?;
    let content = match g.format {
        OutputFormat::Csv => {
            let mut out = String::from("# kind=records\nn,m,f\n");
            for p in &points {
                out.push_str(&format!("{},{},{}\n", p.n, p.m, p.f));
            }
            out
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "kind": "records",
                "rows": points.iter().map(|p| serde_json::json!({
                    "n": p.n,
                    "m": p.m.to_string(),
                    "f": p.f.to_string(),
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
    };
    write_output(g, &content)?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// envelope
// ---------------------------------------------------------------------------

/// Evaluate `h` at one point: exact value, the piece taken, and optionally
/// the asymptotic approximation at the working precision.
pub fn cmd_envelope(x: &str, asym: bool, g: &GlobalOpts) -> Result<Outcome> {
    let x = parse_rat(x)?;
    let seg = segment_for(&x)?;
    let hv = seg.eval(&x);
    let piece = match seg.index {
        PieceIndex::Initial => "initial".to_string(),
        PieceIndex::Fib(n) => n.to_string(),
    };
    let asym_value = if asym {
        Some(h_asymptotic(&x, g.prec)?)
    } else {
        None
    };
    let content = match g.format {
        OutputFormat::Csv => {
            let mut header = String::from("x,h,piece,x_lo,x_hi,slope,intercept");
            let mut row = format!(
                "{x},{hv},{piece},{},{},{},{}",
                seg.x_lo, seg.x_hi, seg.slope, seg.intercept
            );
            if let Some(a) = &asym_value {
                header.push_str(",h_asymptotic");
                row.push_str(&format!(",{}", a.to_decimal_string()));
            }
            format!("# kind=envelope\n{header}\n{row}\n")
        }
        OutputFormat::Json => {
            let mut map = serde_json::json!({
                "kind": "envelope",
                "x": x.to_string(),
                "h": hv.to_string(),
                "piece": piece,
                "x_lo": seg.x_lo.to_string(),
                "x_hi": seg.x_hi.to_string(),
                "slope": seg.slope.to_string(),
                "intercept": seg.intercept.to_string(),
            });
            if let Some(a) = &asym_value {
                map["h_asymptotic"] = serde_json::Value::String(a.to_decimal_string());
            }
            format!("{}\n", serde_json::to_string_pretty(&map).expect("json"))
        }
    };
    write_output(g, &content)?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// verify subcommands and the gaps report
// ---------------------------------------------------------------------------

fn emit_report<R: crate::verify::ReportRow>(
    report: &crate::verify::ScanReport<R>,
    g: &GlobalOpts,
) -> Result<()> {
    let content = match g.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => format!("{}\n", report.to_json()),
    };
    write_output(g, &content)
}

/// `verify domination --max-m N`: exit 0 only with zero violations.
pub fn cmd_verify_domination(max_m: &str, g: &GlobalOpts) -> Result<Outcome> {
    let max_m = parse_nat(max_m)?;
    let report = check_domination(&max_m)?;
    emit_report(&report, g)?;
    Ok(if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

/// `verify records --max-n N`: exit 0 only when every level is confirmed.
pub fn cmd_verify_records(max_n: u64, g: &GlobalOpts) -> Result<Outcome> {
    let report = verify_records(max_n)?;
    emit_report(&report, g)?;
    Ok(if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

/// `verify gaps` / `gaps`: report only, always exit 0.
pub fn cmd_gaps(from: &str, to: &str, mode: GapMode, g: &GlobalOpts) -> Result<Outcome> {
    let lo = parse_nat(from)?;
    let hi = parse_nat(to)?;
    let report = lemma_gap_report(&lo, &hi, mode)?;
    let content = match g.format {
        OutputFormat::Csv => report.to_csv(),
        OutputFormat::Json => format!("{}\n", report.to_json()),
    };
    write_output(g, &content)?;
    Ok(Outcome::Pass)
}

/// `verify upper`: report only, always exit 0.
pub fn cmd_verify_upper(n_lo: u64, n_hi: u64, grid: Option<u32>, g: &GlobalOpts) -> Result<Outcome> {
    let report =
        upper_envelope_report(n_lo, n_hi, g.prec, grid.unwrap_or(DEFAULT_UPPER_GRID))?;
    emit_report(&report, g)?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// constant
// ---------------------------------------------------------------------------

/// The limit constant and its brackets at the working precision.
pub fn cmd_constant(g: &GlobalOpts) -> Result<Outcome> {
    let c = limit_constant(g.prec)?;
    let upper = calkin_wilf_upper(g.prec)?;
    // agreement of the two closed forms, measured at the working precision
    let mut ctx = crate::hp::HpCtx::new(g.prec);
    let alt = ctx.limit_c_alt();
    let bits = agreement_bits(c.value(), &alt, None);
    let bits_str = if bits == i64::MAX {
        "exact".to_string()
    } else {
        bits.to_string()
    };
    let content = match g.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("# kind=constant\n");
            out.push_str(&format!("# prec={}\n", g.prec));
            out.push_str("key,value\n");
            out.push_str(&format!("limit_constant,{}\n", c.to_decimal_string()));
            out.push_str(&format!("closed_forms_agreement_bits,{bits_str}\n"));
            out.push_str(&format!("calkin_wilf_upper,{}\n", upper.to_decimal_string()));
            out.push_str(&format!("policy_digits,{}\n", policy_digits(g.prec)));
            out
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "kind": "constant",
                "prec": g.prec,
                "limit_constant": c.to_decimal_string(),
                "closed_forms_agreement_bits": bits_str,
                "calkin_wilf_upper": upper.to_decimal_string(),
                "policy_digits": policy_digits(g.prec),
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
    };
    write_output(g, &content)?;
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

const SCAN_HEADER: &str = "m,a,ratio\n";

enum ScanSink {
    Stdout(std::io::Stdout),
    File(std::io::BufWriter<std::fs::File>),
}

impl ScanSink {
    fn write_all(&mut self, s: &str) -> Result<()> {
        match self {
            ScanSink::Stdout(out) => out.write_all(s.as_bytes())?,
            ScanSink::File(f) => f.write_all(s.as_bytes())?,
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        match self {
            ScanSink::Stdout(out) => out.flush()?,
            ScanSink::File(f) => f.flush()?,
        }
        Ok(())
    }
}

/// Keep the header and every data row with index `<= last_m`; drop partial
/// tails and stale summaries so a resumed stream continues byte-exactly.
fn truncate_stream_after(path: &Path, last_m: &Nat) -> Result<()> {
    if !path.exists() {
        // nothing emitted before the first checkpoint; start the stream fresh
        std::fs::write(path, SCAN_HEADER)?;
        return Ok(());
    }
    let text = std::fs::read_to_string(path)?;
    let mut kept = String::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != SCAN_HEADER.trim_end() {
                return Err(Error::Checkpoint {
                    path: path.display().to_string(),
                    reason: "output stream lacks the scan header; refusing to resume".into(),
                });
            }
            kept.push_str(line);
            kept.push('\n');
            continue;
        }
        if line.starts_with('#') {
            continue; // stale summary from an earlier completed run
        }
        let m_str = line.split(',').next().unwrap_or("");
        let m: Nat = match m_str.parse() {
            Ok(v) => v,
            Err(_) => continue, // partial line from an interrupted write
        };
        if m <= *last_m {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    std::fs::write(path, kept)?;
    Ok(())
}

/// Streaming ratio scan over `[2, max_m]` with optional checkpointing.
///
/// Emits `m,a,ratio` rows at every multiple of `emit_every` and a final
/// summary comment. With `--checkpoint`, progress is recorded after each
/// flushed block, and an interrupted scan resumes to a byte-identical
/// stream (resume needs `--out`, so the already-emitted prefix can be
/// reconciled).
pub fn cmd_scan(
    max_m: &str,
    emit_every: u64,
    checkpoint_path: Option<&Path>,
    g: &GlobalOpts,
) -> Result<Outcome> {
    let max_m = parse_nat(max_m)?;
    if max_m < Nat::from(2u32) {
        return Err(Error::IndexBelowMin { n: 0, min: 2 });
    }

    let mut tracker;
    let start;
    match checkpoint_path {
        Some(cp_path) if cp_path.exists() => {
            let cp = Checkpoint::load(cp_path)?;
            if cp.prec != g.prec {
                return Err(Error::Checkpoint {
                    path: cp_path.display().to_string(),
                    reason: format!(
                        "precision mismatch: checkpoint has {}, requested {}",
                        cp.prec, g.prec
                    ),
                });
            }
            let last = cp.last_m()?;
            let best_m = cp.best_m()?;
            let best_a = stern(&best_m);
            tracker = RunningMax::resume(g.prec, cp.best_ratio()?, best_m, best_a);
            start = &last + Nat::one();
            if let Some(path) = &g.out {
                truncate_stream_after(path, &last)?;
            }
        }
        _ => {
            tracker = RunningMax::new(g.prec);
            start = Nat::from(2u32);
            if let Some(path) = &g.out {
                std::fs::write(path, SCAN_HEADER)?;
            }
        }
    }

    let mut sink = match &g.out {
        Some(path) => ScanSink::File(std::io::BufWriter::new(
            std::fs::OpenOptions::new().append(true).open(path)?,
        )),
        None => {
            let mut out = ScanSink::Stdout(std::io::stdout());
            if start == Nat::from(2u32) {
                out.write_all(SCAN_HEADER)?;
            }
            out
        }
    };

    let emit_step = Nat::from(emit_every.max(1));
    let block_size = 1u64 << 16;
    let mut block_lo = start.clone();
    while block_lo <= max_m {
        let block_hi = (&block_lo + Nat::from(block_size - 1)).min(max_m.clone());
        let values = stern_range(&block_lo, &block_hi)?;
        let mut m = block_lo.clone();
        for a in &values {
            tracker.offer(&m, a)?;
            if emit_every > 0 && (&m % &emit_step).is_zero() {
                let r = crate::verify::ratio(&m, g.prec)?;
                sink.write_all(&format!("{},{},{}\n", m, a, r.ratio.to_decimal_string()))?;
            }
            m += 1u32;
        }
        sink.flush()?;
        if let Some(cp_path) = checkpoint_path {
            let (best_ratio, best_m, _) = tracker.best().expect("non-empty scan").clone();
            Checkpoint::new(&block_hi, &best_m, &best_ratio, g.prec).save(cp_path)?;
        }
        block_lo = block_hi + Nat::one();
    }

    let (best_ratio, best_m, best_a) = tracker.best().expect("non-empty scan").clone();
    sink.write_all(&format!(
        "# best_m={} best_a={} best_ratio={} prec={}\n",
        best_m,
        best_a,
        best_ratio.to_decimal_string(),
        g.prec
    ))?;
    sink.flush()?;
    if let Some(cp_path) = checkpoint_path {
        Checkpoint::new(&max_m, &best_m, &best_ratio, g.prec).save(cp_path)?;
    }
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------------
// oeis-check
// ---------------------------------------------------------------------------

/// Cross-check sequence values against a b-file: the embedded offline
/// fixture by default, a local file with `--bfile`, or the live file with
/// `--fetch`.
pub fn cmd_oeis_check(bfile: Option<&Path>, fetch: bool, g: &GlobalOpts) -> Result<Outcome> {
    let (source, text) = if fetch {
        ("url".to_string(), fetch_bfile(BFILE_URL)?)
    } else if let Some(path) = bfile {
        (path.display().to_string(), std::fs::read_to_string(path)?)
    } else {
        ("offline-fixture".to_string(), OFFLINE_FIXTURE.to_string())
    };
    let entries = parse_bfile(&text)?;
    let mismatches = check_entries(&entries);
    let content = match g.format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str("# kind=oeis_check\n");
            out.push_str(&format!("# source={source}\n"));
            out.push_str(&format!("# entries={}\n", entries.len()));
            out.push_str(&format!("# mismatches={}\n", mismatches.len()));
            out.push_str("n,file_value,computed\n");
            for m in &mismatches {
                out.push_str(&format!("{},{},{}\n", m.n, m.file_value, m.computed));
            }
            out
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "kind": "oeis_check",
                "source": source,
                "entries": entries.len(),
                "mismatches": mismatches.iter().map(|m| serde_json::json!({
                    "n": m.n.to_string(),
                    "file_value": m.file_value.to_string(),
                    "computed": m.computed.to_string(),
                })).collect::<Vec<_>>(),
            });
            format!("{}\n", serde_json::to_string_pretty(&value).expect("json"))
        }
    };
    write_output(g, &content)?;
    Ok(if mismatches.is_empty() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_helpers() {
        assert_eq!(parse_nat("42").unwrap(), Nat::from(42u32));
        assert!(parse_nat("-1").is_err());
        assert!(parse_nat("x").is_err());
        assert_eq!(
            parse_rat("21/2").unwrap(),
            Rat::new(21.into(), 2.into())
        );
        assert_eq!(parse_rat("7").unwrap(), Rat::from_integer(7.into()));
        assert!(parse_rat("1.5").is_err());
    }

    #[test]
    fn table_passes_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("table.csv");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        assert_eq!(cmd_table(&g).unwrap(), Outcome::Pass);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("# matched=22 of 22"));
        assert!(text.contains("12,2,2,53/10,53/10,true"));
    }

    #[test]
    fn compute_all_methods() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("value.txt");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        cmd_compute("1365", ComputeMethod::All, &g).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "144\n");
        cmd_compute("0", ComputeMethod::Naive, &g).unwrap();
        assert_eq!(std::fs::read_to_string(&out).unwrap(), "0\n");
        assert!(cmd_compute("12x", ComputeMethod::Fast, &g).is_err());
    }

    #[test]
    fn envelope_single_point() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("h.csv");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        cmd_envelope("22", false, &g).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("22,181/22,6,21,43,5/22,71/22"));
    }

    #[test]
    fn scan_resume_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let uninterrupted = dir.path().join("full.csv");
        let g_full = GlobalOpts {
            out: Some(uninterrupted.clone()),
            ..GlobalOpts::default()
        };
        cmd_scan("4000", 512, None, &g_full).unwrap();

        // interrupted run: scan [2, 1500] with a checkpoint, then resume
        let resumed = dir.path().join("resumed.csv");
        let cp = dir.path().join("scan.ckpt");
        let g_res = GlobalOpts {
            out: Some(resumed.clone()),
            ..GlobalOpts::default()
        };
        cmd_scan("1500", 512, Some(&cp), &g_res).unwrap();
        // simulate losing the trailing summary of the partial run
        let text = std::fs::read_to_string(&resumed).unwrap();
        let without_summary: String = text
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect();
        std::fs::write(&resumed, without_summary).unwrap();

        cmd_scan("4000", 512, Some(&cp), &g_res).unwrap();
        let full = std::fs::read_to_string(&uninterrupted).unwrap();
        let res = std::fs::read_to_string(&resumed).unwrap();
        assert_eq!(full, res);
    }

    #[test]
    fn scan_refuses_corrupt_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let cp = dir.path().join("scan.ckpt");
        std::fs::write(&cp, "garbage").unwrap();
        let g = GlobalOpts::default();
        assert!(matches!(
            cmd_scan("100", 10, Some(&cp), &g),
            Err(Error::Checkpoint { .. })
        ));
    }

    #[test]
    fn oeis_check_offline_and_tampered() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("oeis.csv");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        assert_eq!(cmd_oeis_check(None, false, &g).unwrap(), Outcome::Pass);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("# mismatches=0"));

        let tampered = dir.path().join("tampered.txt");
        std::fs::write(&tampered, "10 3\n11 6\n12 2\n").unwrap();
        assert_eq!(
            cmd_oeis_check(Some(&tampered), false, &g).unwrap(),
            Outcome::Fail
        );
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("11,6,5"));
    }

    #[test]
    fn verify_commands_pass() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("v.csv");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        assert_eq!(
            cmd_verify_domination("2000", &g).unwrap(),
            Outcome::Pass
        );
        assert_eq!(cmd_verify_records(10, &g).unwrap(), Outcome::Pass);
        assert_eq!(
            cmd_gaps("5", "30", GapMode::Integers, &g).unwrap(),
            Outcome::Pass
        );
        assert_eq!(
            cmd_gaps("5", "30", GapMode::Pieces, &g).unwrap(),
            Outcome::Pass
        );
        assert_eq!(cmd_verify_upper(4, 10, None, &g).unwrap(), Outcome::Pass);
        assert!(cmd_verify_records(40, &g).is_err());
    }

    #[test]
    fn constant_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("c.csv");
        let g = GlobalOpts {
            out: Some(out.clone()),
            ..GlobalOpts::default()
        };
        cmd_constant(&g).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.contains("limit_constant,0.9588541908247673832090943042"));
        assert!(text.contains("calkin_wilf_upper,1.17082039"));
    }

    #[test]
    fn json_format_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("t.json");
        let g = GlobalOpts {
            format: OutputFormat::Json,
            out: Some(out.clone()),
            prec: 128,
        };
        cmd_table(&g).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(parsed["matched"], 22);
        cmd_constant(&g).unwrap();
        let parsed: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert!(parsed["limit_constant"]
            .as_str()
            .unwrap()
            .starts_with("0.95885419"));
    }
}
