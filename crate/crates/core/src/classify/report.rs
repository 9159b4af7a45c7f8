//! Classification reports and `--expect` files.
//!
//! The table format is one `FAMILY BETA COUNT` line per profile followed by
//! `TOTAL N`; lines starting with `#` are comments. Expect files use the
//! same format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use num_bigint::BigUint;

use crate::decomp::AutomorphismSpec;
use crate::equiv::CanonicalKey;
use crate::gf2core::BinaryCode;

use super::{ClassifyError, ExtremalProfile, Family};

#[derive(Debug, Clone)]
pub struct Representative {
    pub key: CanonicalKey,
    /// The assembled generator matrix, in the standard layout of its type.
    pub code: BinaryCode,
    pub profile: ExtremalProfile,
    pub aut_order: BigUint,
    pub provenance: String,
    pub candidate: u64,
}

/// Inequivalent codes found by one bucket of candidates, before the global
/// merge.
#[derive(Debug, Clone)]
pub struct Subtotal {
    pub label: String,
    pub count: usize,
    pub profiles: BTreeMap<ExtremalProfile, usize>,
}

impl Subtotal {
    pub(crate) fn new(label: &str) -> Self {
        Subtotal {
            label: label.to_string(),
            count: 0,
            profiles: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub spec: AutomorphismSpec,
    /// Further types whose results were merged in.
    pub merged: Vec<AutomorphismSpec>,
    pub representatives: Vec<Representative>,
    pub subtotals: Vec<Subtotal>,
    pub candidates: usize,
    pub rejected: usize,
    pub inputs: Vec<(String, String)>,
    pub elapsed: Duration,
}

impl ClassificationReport {
    pub fn total(&self) -> usize {
        self.representatives.len()
    }

    pub fn counts(&self) -> BTreeMap<ExtremalProfile, usize> {
        let mut m = BTreeMap::new();
        for r in &self.representatives {
            *m.entry(r.profile).or_default() += 1;
        }
        m
    }

    pub fn aut_distribution(&self) -> BTreeMap<BigUint, usize> {
        let mut m = BTreeMap::new();
        for r in &self.representatives {
            *m.entry(r.aut_order.clone()).or_default() += 1;
        }
        m
    }

    pub fn subtotal(&self, label: &str) -> Option<&Subtotal> {
        self.subtotals.iter().find(|s| s.label == label)
    }

    /// Merges another report's representatives, dropping equivalent codes.
    pub fn merge(&mut self, other: &ClassificationReport) {
        for t in std::iter::once(&other.spec).chain(&other.merged) {
            if *t != self.spec && !self.merged.contains(t) {
                self.merged.push(*t);
            }
        }
        for r in &other.representatives {
            if !self.representatives.iter().any(|x| x.key == r.key) {
                self.representatives.push(r.clone());
            }
        }
        self.subtotals.extend(other.subtotals.iter().cloned());
        self.candidates += other.candidates;
        self.rejected += other.rejected;
        self.inputs.extend(other.inputs.iter().cloned());
        self.elapsed += other.elapsed;
    }

    /// The machine-readable table. Contains no timing, so identical runs
    /// give identical text.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# type {}", self.spec);
        for t in &self.merged {
            let _ = writeln!(s, "# type {t}");
        }
        for (name, sum) in &self.inputs {
            let _ = writeln!(s, "# input {name} sha256 {sum}");
        }
        let _ = writeln!(
            s,
            "# candidates {} rejected {}",
            self.candidates, self.rejected
        );
        for sub in &self.subtotals {
            let _ = writeln!(s, "# subtotal {}: {}", sub.label, sub.count);
        }
        for (p, n) in self.counts() {
            let _ = writeln!(s, "{} {} {}", p.family, p.beta, n);
        }
        let _ = writeln!(s, "TOTAL {}", self.total());
        s
    }

    /// One line per representative: digest, profile, group order and origin.
    pub fn to_listing(&self) -> String {
        let mut s = String::new();
        for r in &self.representatives {
            let _ = writeln!(
                s,
                "{} {} {} aut={} {}",
                r.key.digest(),
                r.profile.family,
                r.profile.beta,
                r.aut_order,
                r.provenance
            );
        }
        s
    }

    /// Writes `<digest>.gm` for every representative plus `report.txt`.
    pub fn write_to(&self, dir: &Path) -> Result<(), ClassifyError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| ClassifyError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        for r in &self.representatives {
            let path = dir.join(format!("{}.gm", r.key.digest()));
            fs::write(&path, r.code.to_text()).map_err(io(&path))?;
        }
        let path = dir.join("report.txt");
        fs::write(&path, self.to_table()).map_err(io(&path))?;
        let path = dir.join("representatives.txt");
        fs::write(&path, self.to_listing()).map_err(io(&path))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Expectation {
    pub counts: BTreeMap<ExtremalProfile, usize>,
    pub total: Option<usize>,
}

impl Expectation {
    /// Every mismatch against `report`, one message each.
    pub fn check(&self, report: &ClassificationReport) -> Vec<String> {
        let mut out = Vec::new();
        let got = report.counts();
        if !self.counts.is_empty() {
            for (p, &n) in &self.counts {
                let g = got.get(p).copied().unwrap_or(0);
                if g != n {
                    out.push(format!("{} {}: expected {n}, found {g}", p.family, p.beta));
                }
            }
            for (p, &g) in &got {
                if !self.counts.contains_key(p) {
                    out.push(format!("{} {}: expected 0, found {g}", p.family, p.beta));
                }
            }
        }
        if let Some(t) = self.total {
            if t != report.total() {
                out.push(format!("TOTAL: expected {t}, found {}", report.total()));
            }
        }
        out
    }
}

pub fn parse_expect(text: &str) -> Result<Expectation, ClassifyError> {
    let mut exp = Expectation::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ClassifyError::Expect { line: i + 1, msg };
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["TOTAL", n] => {
                exp.total = Some(n.parse().map_err(|_| err(format!("bad total {n:?}")))?);
            }
            [fam, beta, count] => {
                let family: Family = fam.parse().map_err(err)?;
                let beta: u32 = beta
                    .parse()
                    .map_err(|_| err(format!("bad beta {beta:?}")))?;
                let count: usize = count
                    .parse()
                    .map_err(|_| err(format!("bad count {count:?}")))?;
                if exp
                    .counts
                    .insert(ExtremalProfile { family, beta }, count)
                    .is_some()
                {
                    return Err(err(format!("{fam} {beta} listed twice")));
                }
            }
            _ => return Err(err("expected `FAMILY BETA COUNT` or `TOTAL N`".into())),
        }
    }
    Ok(exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_expect_files() {
        let e = parse_expect("# order 7\nW1 10 23\nW2 0 27\nTOTAL 50\n").unwrap();
        assert_eq!(e.total, Some(50));
        assert_eq!(e.counts.len(), 2);
        assert!(parse_expect("W3 1 1").is_err());
        assert!(matches!(
            parse_expect("W1 1\n"),
            Err(ClassifyError::Expect { line: 1, .. })
        ));
        assert!(parse_expect("W1 10 1\nW1 10 2\n").is_err());
    }
}
