//! OEIS b-file parsing and cross-checking.
//!
//! A b-file is plain text with one `n value` pair per line, `#` comments
//! ignored, indices strictly increasing. The repository ships an offline
//! fixture with the first 1200 terms of the sequence; `--fetch` can pull the
//! live file instead when networking is available.

use crate::error::{Error, Result};
use crate::sequence::NaiveEvaluator;
use crate::Nat;

/// First 1200 terms, generated independently ahead of this implementation.
pub const OFFLINE_FIXTURE: &str = include_str!("../../fixtures/b002487.txt");

/// URL of the live b-file for the sequence.
pub const BFILE_URL: &str = "https://oeis.org/A002487/b002487.txt";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFileEntry {
    pub n: Nat,
    pub value: Nat,
}

/// Parse b-file text. Rejects malformed lines (with their line number) and
/// non-increasing indices.
pub fn parse_bfile(text: &str) -> Result<Vec<BFileEntry>> {
    let mut entries = Vec::new();
    let mut last_n: Option<Nat> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let n_str = parts.next().ok_or(Error::BFile {
            line: line_no,
            reason: "missing index".into(),
        })?;
        let v_str = parts.next().ok_or(Error::BFile {
            line: line_no,
            reason: "missing value".into(),
        })?;
        if parts.next().is_some() {
            return Err(Error::BFile {
                line: line_no,
                reason: "trailing fields".into(),
            });
        }
        let n: Nat = n_str.parse().map_err(|_| Error::BFile {
            line: line_no,
            reason: format!("bad index `{n_str}`"),
        })?;
        let value: Nat = v_str.parse().map_err(|_| Error::BFile {
            line: line_no,
            reason: format!("bad value `{v_str}`"),
        })?;
        if let Some(prev) = &last_n {
            if n <= *prev {
                return Err(Error::BFile {
                    line: line_no,
                    reason: format!("index {n} not above previous {prev}"),
                });
            }
        }
        last_n = Some(n.clone());
        entries.push(BFileEntry { n, value });
    }
    Ok(entries)
}

/// A mismatch between a b-file entry and the recomputed sequence value.
#[derive(Clone, Debug)]
pub struct BFileMismatch {
    pub n: Nat,
    pub file_value: Nat,
    pub computed: Nat,
}

/// Compare every entry against the recursion evaluator.
pub fn check_entries(entries: &[BFileEntry]) -> Vec<BFileMismatch> {
    let mut eval = NaiveEvaluator::new();
    entries
        .iter()
        .filter_map(|e| {
            let computed = eval.eval(&e.n);
            (computed != e.value).then(|| BFileMismatch {
                n: e.n.clone(),
                file_value: e.value.clone(),
                computed,
            })
        })
        .collect()
}

/// Fetch a b-file over HTTP. Only used behind an explicit flag; the offline
/// fixture is the default.
pub fn fetch_bfile(url: &str) -> Result<String> {
    let mut response = ureq::get(url)
        .call()
        .map_err(|e| Error::Fetch(format!("{e}; consider the offline fixture instead")))?;
    response
        .body_mut()
        .read_to_string()
        .map_err(|e| Error::Fetch(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_parses_and_matches() {
        let entries = parse_bfile(OFFLINE_FIXTURE).unwrap();
        assert!(entries.len() >= 1000, "{} entries", entries.len());
        assert_eq!(entries[0].n, Nat::from(0u32));
        assert_eq!(entries[11].value, Nat::from(5u32));
        let mismatches = check_entries(&entries);
        assert!(mismatches.is_empty());
    }

    #[test]
    fn comment_and_blank_lines_ignored() {
        let entries = parse_bfile("# header\n\n0 0\n1 1\n# trailing\n2 1\n").unwrap();
        assert_eq!(entries.len(), 3);
    }

    #[test]
    fn tampered_entry_detected() {
        let entries = parse_bfile("10 3\n11 6\n").unwrap();
        let mismatches = check_entries(&entries);
        assert_eq!(mismatches.len(), 1);
        assert_eq!(mismatches[0].n, Nat::from(11u32));
        assert_eq!(mismatches[0].file_value, Nat::from(6u32));
        assert_eq!(mismatches[0].computed, Nat::from(5u32));
    }

    #[test]
    fn malformed_lines_rejected_with_line_number() {
        match parse_bfile("0 0\n1 one\n") {
            Err(Error::BFile { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected: {other:?}"),
        }
        match parse_bfile("0 0\n1\n") {
            Err(Error::BFile { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected: {other:?}"),
        }
        match parse_bfile("5 3\n4 1\n") {
            Err(Error::BFile { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected: {other:?}"),
        }
        match parse_bfile("1 1 1\n") {
            Err(Error::BFile { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
