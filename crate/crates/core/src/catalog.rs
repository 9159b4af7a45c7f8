//! Bundled matrices and ingestion of externally classified datasets.
//!
//! A catalog is a directory holding payload files plus an `index.toml`
//! manifest with name, kind, provenance, SHA-256 checksum and declared
//! parameters for every entry. Binary codes use the `.gm` generator-matrix
//! format, module codes the `.mod` format of [`ModuleCode`], and
//! permutation groups a `.perm` file: a `degree N` header followed by one
//! generator per line in 1-based cycle notation.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cyclotomic::ModuleCode;
use crate::equiv::{canonical_key, EquivError};
use crate::gf2core::{BinaryCode, Error as Gf2Error};
use crate::perm::{PermGroup, Permutation};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    Unknown(String),
    #[error("checksum mismatch for {name}: expected {expected}, found {found}")]
    Checksum {
        name: String,
        expected: String,
        found: String,
    },
    #[error("{name}: {msg}")]
    Payload { name: String, msg: String },
    #[error("{name}: declared {param} = {declared}, actual {actual}")]
    Declared {
        name: String,
        param: &'static str,
        declared: String,
        actual: String,
    },
    #[error("malformed manifest {path}: {msg}")]
    Manifest { path: String, msg: String },
    #[error("dataset {name}: {} invalid file(s):\n  {}", failures.len(), failures.join("\n  "))]
    Validation { name: String, failures: Vec<String> },
    #[error("dataset {name}: declared {expected} codes, found {found}")]
    Count {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("dataset {name}: {a} and {b} are equivalent")]
    Duplicate { name: String, a: String, b: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CatalogError + '_ {
    move |source| CatalogError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryKind {
    BinaryCode,
    ModuleCode,
    /// A generator matrix of a subcode, such as the cycle part of an even subcode.
    MatrixFragment,
    PermutationGroup,
}

/// Parameters an entry claims; all optional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeclaredParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub min_weight: Option<usize>,
    pub self_dual: Option<bool>,
    pub self_orthogonal: Option<bool>,
    /// Every row has even weight on each block of this many coordinates.
    pub cycle_even: Option<usize>,
    pub p: Option<usize>,
    pub c: Option<usize>,
    pub rows: Option<usize>,
    pub degree: Option<usize>,
    pub order: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
struct IndexEntry {
    name: String,
    kind: EntryKind,
    file: String,
    provenance: String,
    sha256: String,
    #[serde(default)]
    params: DeclaredParams,
}

#[derive(Debug, Deserialize)]
struct Index {
    entry: Vec<IndexEntry>,
}

#[derive(Debug, Clone)]
pub enum Payload {
    Binary(BinaryCode),
    Module(ModuleCode),
    Group {
        degree: usize,
        generators: Vec<Permutation>,
    },
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: EntryKind,
    pub file: String,
    pub provenance: String,
    pub checksum: String,
    pub params: DeclaredParams,
    /// The payload file exactly as stored.
    pub text: String,
    pub payload: Payload,
}

impl CatalogEntry {
    pub fn binary(&self) -> Option<&BinaryCode> {
        match &self.payload {
            Payload::Binary(c) => Some(c),
            _ => None,
        }
    }

    pub fn module(&self) -> Option<&ModuleCode> {
        match &self.payload {
            Payload::Module(m) => Some(m),
            _ => None,
        }
    }

    pub fn group(&self) -> Option<PermGroup> {
        match &self.payload {
            Payload::Group { degree, generators } => {
                Some(PermGroup::new(*degree, generators.clone()))
            }
            _ => None,
        }
    }

    /// Checks every declared parameter against the payload.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let mismatch =
            |param: &'static str, declared: String, actual: String| CatalogError::Declared {
                name: self.name.clone(),
                param,
                declared,
                actual,
            };
        let p = &self.params;
        match &self.payload {
            Payload::Binary(code) => {
                check_eq(p.n, code.n(), "n", &mismatch)?;
                check_eq(p.k, code.k(), "k", &mismatch)?;
                if code.was_reduced() {
                    return Err(CatalogError::Payload {
                        name: self.name.clone(),
                        msg: "generator rows are linearly dependent".into(),
                    });
                }
                if let Some(d) = p.min_weight {
                    let actual = code.min_weight(None)?.map(|m| m.weight).unwrap_or(0);
                    if actual != d {
                        return Err(mismatch("min_weight", d.to_string(), actual.to_string()));
                    }
                }
                if let Some(sd) = p.self_dual {
                    if code.is_self_dual() != sd {
                        return Err(mismatch("self_dual", sd.to_string(), (!sd).to_string()));
                    }
                }
                if let Some(so) = p.self_orthogonal {
                    if code.is_self_orthogonal() != so {
                        return Err(mismatch(
                            "self_orthogonal",
                            so.to_string(),
                            (!so).to_string(),
                        ));
                    }
                }
                if let Some(block) = p.cycle_even {
                    for (ri, r) in code.rows().iter().enumerate() {
                        for start in (0..code.n()).step_by(block) {
                            let w = (start..(start + block).min(code.n()))
                                .filter(|&j| r.get(j))
                                .count();
                            if w % 2 == 1 {
                                return Err(CatalogError::Payload {
                                    name: self.name.clone(),
                                    msg: format!(
                                        "row {} has odd weight on block starting at {}",
                                        ri + 1,
                                        start + 1
                                    ),
                                });
                            }
                        }
                    }
                }
            }
            Payload::Module(m) => {
                check_eq(p.p, m.p(), "p", &mismatch)?;
                check_eq(p.c, m.c(), "c", &mismatch)?;
                check_eq(p.rows, m.rows().len(), "rows", &mismatch)?;
                if !m.in_p() {
                    return Err(CatalogError::Payload {
                        name: self.name.clone(),
                        msg: "an entry has odd weight".into(),
                    });
                }
            }
            Payload::Group { degree, generators } => {
                check_eq(p.degree, *degree, "degree", &mismatch)?;
                if let Some(order) = p.order {
                    let actual = PermGroup::new(*degree, generators.clone()).order();
                    if actual != order.into() {
                        return Err(mismatch("order", order.to_string(), actual.to_string()));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_eq<T: PartialEq + ToString>(
    declared: Option<T>,
    actual: T,
    param: &'static str,
    mismatch: &dyn Fn(&'static str, String, String) -> CatalogError,
) -> Result<(), CatalogError> {
    match declared {
        Some(d) if d != actual => Err(mismatch(param, d.to_string(), actual.to_string())),
        _ => Ok(()),
    }
}

/// Parses the `.perm` format.
pub fn parse_perm_group(text: &str) -> Result<(usize, Vec<Permutation>), String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or("missing `degree N` header")?;
    let degree: usize = header
        .strip_prefix("degree")
        .and_then(|d| d.trim().parse().ok())
        .ok_or(format!("line {hl}: expected `degree N`"))?;
    let mut gens = Vec::new();
    for (ln, line) in lines {
        gens.push(Permutation::parse_cycles(degree, line).map_err(|e| format!("line {ln}: {e}"))?);
    }
    Ok((degree, gens))
}

pub fn format_perm_group(degree: usize, gens: &[Permutation]) -> String {
    let mut s = format!("degree {degree}\n");
    for g in gens {
        s.push_str(&g.to_string());
        s.push('\n');
    }
    s
}

fn parse_payload(name: &str, kind: EntryKind, text: &str) -> Result<Payload, CatalogError> {
    let err = |msg: String| CatalogError::Payload {
        name: name.to_string(),
        msg,
    };
    Ok(match kind {
        EntryKind::BinaryCode | EntryKind::MatrixFragment => {
            Payload::Binary(BinaryCode::parse(text).map_err(|e| err(e.to_string()))?)
        }
        EntryKind::ModuleCode => {
            Payload::Module(ModuleCode::parse(text).map_err(|e| err(e.to_string()))?)
        }
        EntryKind::PermutationGroup => {
            let (degree, generators) = parse_perm_group(text).map_err(err)?;
            Payload::Group { degree, generators }
        }
    })
}

const BUNDLED_INDEX: &str = include_str!("../catalog/index.toml");

const BUNDLED_FILES: &[(&str, &str)] = &[
    ("E8.gm", include_str!("../catalog/E8.gm")),
    ("C2_4.gm", include_str!("../catalog/C2_4.gm")),
    ("G1_len16.gm", include_str!("../catalog/G1_len16.gm")),
    ("G2_len16.gm", include_str!("../catalog/G2_len16.gm")),
    ("G3_len16.gm", include_str!("../catalog/G3_len16.gm")),
    ("Gpi_R24.gm", include_str!("../catalog/Gpi_R24.gm")),
    (
        "Esigma_10_14_E10.gm",
        include_str!("../catalog/Esigma_10_14_E10.gm"),
    ),
    (
        "Esigma_10_14_B10.gm",
        include_str!("../catalog/Esigma_10_14_B10.gm"),
    ),
    (
        "M1_7_6_2_A1.mod",
        include_str!("../catalog/M1_7_6_2_A1.mod"),
    ),
    (
        "M1_7_6_2_A2.mod",
        include_str!("../catalog/M1_7_6_2_A2.mod"),
    ),
    (
        "M1_7_6_2_A3.mod",
        include_str!("../catalog/M1_7_6_2_A3.mod"),
    ),
    (
        "M1_7_6_2_A4.mod",
        include_str!("../catalog/M1_7_6_2_A4.mod"),
    ),
    (
        "M1_7_6_2_A5.mod",
        include_str!("../catalog/M1_7_6_2_A5.mod"),
    ),
    (
        "M1_7_6_2_A6.mod",
        include_str!("../catalog/M1_7_6_2_A6.mod"),
    ),
    (
        "M1_7_6_2_A7.mod",
        include_str!("../catalog/M1_7_6_2_A7.mod"),
    ),
    (
        "M1_7_6_2_A8.mod",
        include_str!("../catalog/M1_7_6_2_A8.mod"),
    ),
    (
        "M1_7_6_2_A9.mod",
        include_str!("../catalog/M1_7_6_2_A9.mod"),
    ),
    ("M1_7_6_2_I.mod", include_str!("../catalog/M1_7_6_2_I.mod")),
    ("M1_7_3_23.mod", include_str!("../catalog/M1_7_3_23.mod")),
    ("M2_7_3_23.mod", include_str!("../catalog/M2_7_3_23.mod")),
    ("Stab_R24.perm", include_str!("../catalog/Stab_R24.perm")),
    (
        "L_B10_subgroup.perm",
        include_str!("../catalog/L_B10_subgroup.perm"),
    ),
    ("L_E10.perm", include_str!("../catalog/L_E10.perm")),
];

/// A set of catalog entries, keyed by name.
#[derive(Debug)]
pub struct Catalog {
    index: Vec<IndexEntry>,
    files: HashMap<String, String>,
}

impl Catalog {
    /// The catalog compiled into the library.
    pub fn bundled() -> &'static Catalog {
        static CATALOG: OnceLock<Catalog> = OnceLock::new();
        CATALOG.get_or_init(|| {
            let index: Index = toml::from_str(BUNDLED_INDEX).expect("bundled index parses");
            let files = BUNDLED_FILES
                .iter()
                .map(|(f, t)| (f.to_string(), t.to_string()))
                .collect();
            Catalog {
                index: index.entry,
                files,
            }
        })
    }

    /// Loads a catalog directory with an `index.toml`.
    pub fn open(dir: &Path) -> Result<Catalog, CatalogError> {
        let index_path = dir.join("index.toml");
        let text = fs::read_to_string(&index_path).map_err(io_err(&index_path))?;
        let index: Index = toml::from_str(&text).map_err(|e| CatalogError::Manifest {
            path: index_path.display().to_string(),
            msg: e.to_string(),
        })?;
        let mut files = HashMap::new();
        for e in &index.entry {
            let p = dir.join(&e.file);
            files.insert(e.file.clone(), fs::read_to_string(&p).map_err(io_err(&p))?);
        }
        Ok(Catalog {
            index: index.entry,
            files,
        })
    }

    pub fn list(&self) -> Vec<&str> {
        self.index.iter().map(|e| e.name.as_str()).collect()
    }

    /// Looks up, checksums and parses an entry.
    pub fn get(&self, name: &str) -> Result<CatalogEntry, CatalogError> {
        let meta = self
            .index
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
        let text = self
            .files
            .get(&meta.file)
            .ok_or_else(|| CatalogError::Unknown(name.to_string()))?;
        let found = sha256_hex(text.as_bytes());
        if found != meta.sha256 {
            return Err(CatalogError::Checksum {
                name: name.to_string(),
                expected: meta.sha256.clone(),
                found,
            });
        }
        if meta.provenance.trim().is_empty() {
            return Err(CatalogError::Payload {
                name: name.to_string(),
                msg: "empty provenance".into(),
            });
        }
        Ok(CatalogEntry {
            name: meta.name.clone(),
            kind: meta.kind,
            file: meta.file.clone(),
            provenance: meta.provenance.clone(),
            checksum: meta.sha256.clone(),
            params: meta.params.clone(),
            text: text.clone(),
            payload: parse_payload(name, meta.kind, text)?,
        })
    }

    /// Loads and validates every entry.
    pub fn verify_all(&self) -> Result<(), CatalogError> {
        for name in self.list() {
            self.get(name)?.validate()?;
        }
        Ok(())
    }
}

/// Convenience accessors on the bundled catalog.
pub fn get(name: &str) -> Result<CatalogEntry, CatalogError> {
    Catalog::bundled().get(name)
}

pub fn list() -> Vec<&'static str> {
    Catalog::bundled().list()
}

pub fn binary(name: &str) -> Result<BinaryCode, CatalogError> {
    let e = get(name)?;
    e.binary().cloned().ok_or(CatalogError::Payload {
        name: name.to_string(),
        msg: "not a binary code".into(),
    })
}

pub fn module(name: &str) -> Result<ModuleCode, CatalogError> {
    let e = get(name)?;
    e.module().cloned().ok_or(CatalogError::Payload {
        name: name.to_string(),
        msg: "not a module code".into(),
    })
}

pub fn group(name: &str) -> Result<(usize, Vec<Permutation>), CatalogError> {
    match get(name)?.payload {
        Payload::Group { degree, generators } => Ok((degree, generators)),
        _ => Err(CatalogError::Payload {
            name: name.to_string(),
            msg: "not a permutation group".into(),
        }),
    }
}

/// Writes the payload byte-for-byte.
pub fn export(entry: &CatalogEntry, path: &Path) -> Result<(), CatalogError> {
    fs::write(path, entry.text.as_bytes()).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    /// A full classification: entries must be pairwise inequivalent.
    Complete,
    Partial,
    ExternalRequired,
}

/// What an imported dataset must satisfy.
#[derive(Debug, Clone, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub n: usize,
    pub k: usize,
    /// Lower bound on the minimum weight.
    pub min_weight: Option<usize>,
    #[serde(default)]
    pub self_orthogonal: bool,
    pub count: Option<usize>,
    pub completeness: Completeness,
}

#[derive(Debug, Deserialize)]
struct ExternalManifest {
    dataset: Vec<DatasetSpec>,
}

/// Requirements for the external classifications the pipelines can consume.
pub fn external_manifest() -> Vec<DatasetSpec> {
    let m: ExternalManifest =
        toml::from_str(include_str!("../catalog/external.toml")).expect("bundled manifest parses");
    m.dataset
}

pub fn external_spec(name: &str) -> Option<DatasetSpec> {
    external_manifest().into_iter().find(|d| d.name == name)
}

#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub name: String,
    pub code: BinaryCode,
    pub checksum: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub entries: Vec<DatasetEntry>,
    pub completeness: Completeness,
}

fn validate_member(code: &BinaryCode, spec: &DatasetSpec) -> Result<(), String> {
    if code.n() != spec.n {
        return Err(format!("length {} (expected {})", code.n(), spec.n));
    }
    if code.was_reduced() {
        return Err("generator rows are linearly dependent".into());
    }
    if code.k() != spec.k {
        return Err(format!("dimension {} (expected {})", code.k(), spec.k));
    }
    if spec.self_orthogonal {
        for (i, r) in code.rows().iter().enumerate() {
            if r.weight() % 2 == 1 {
                return Err(format!("row {} has odd weight {}", i + 1, r.weight()));
            }
        }
        for (i, a) in code.rows().iter().enumerate() {
            for (j, b) in code.rows().iter().enumerate().skip(i + 1) {
                if a.dot(b) {
                    return Err(format!("rows {} and {} are not orthogonal", i + 1, j + 1));
                }
            }
        }
    }
    if let Some(d) = spec.min_weight {
        let m = code.min_weight(Some(d)).map_err(|e| e.to_string())?;
        if let Some(m) = m {
            if m.weight < d {
                return Err(format!(
                    "has a codeword of weight {} below {d}: {}",
                    m.weight, m.witness
                ));
            }
        }
    }
    Ok(())
}

/// Reads every `.gm` file of `dir` (sorted by file name) and validates it.
pub fn import_dataset(dir: &Path, spec: &DatasetSpec) -> Result<Dataset, CatalogError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "gm"))
        .collect();
    files.sort();
    let mut members = Vec::new();
    let mut failures = Vec::new();
    for path in &files {
        let fname = path.file_name().unwrap().to_string_lossy().to_string();
        match fs::read_to_string(path) {
            Ok(text) => members.push((
                path.file_stem().unwrap().to_string_lossy().to_string(),
                text,
            )),
            Err(e) => failures.push(format!("{fname}: {e}")),
        }
    }
    dataset_from_texts(spec, members, failures)
}

/// Validates named `.gm` texts against `spec`, as [`import_dataset`] does
/// for files.
pub fn dataset_from_texts(
    spec: &DatasetSpec,
    members: Vec<(String, String)>,
    mut failures: Vec<String>,
) -> Result<Dataset, CatalogError> {
    let mut entries = Vec::new();
    for (name, text) in members {
        let code = match BinaryCode::parse(&text) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        if let Err(msg) = validate_member(&code, spec) {
            failures.push(format!("{name}: {msg}"));
            continue;
        }
        entries.push(DatasetEntry {
            name,
            code,
            checksum: sha256_hex(text.as_bytes()),
        });
    }
    if !failures.is_empty() {
        return Err(CatalogError::Validation {
            name: spec.name.clone(),
            failures,
        });
    }
    if let Some(count) = spec.count {
        if count != entries.len() {
            return Err(CatalogError::Count {
                name: spec.name.clone(),
                expected: count,
                found: entries.len(),
            });
        }
    }
    if spec.completeness == Completeness::Complete {
        let mut seen: HashMap<Vec<u8>, String> = HashMap::new();
        for e in &entries {
            let key = canonical_key(&e.code)?.bytes().to_vec();
            if let Some(prev) = seen.insert(key, e.name.clone()) {
                return Err(CatalogError::Duplicate {
                    name: spec.name.clone(),
                    a: prev,
                    b: e.name.clone(),
                });
            }
        }
    }
    Ok(Dataset {
        name: spec.name.clone(),
        entries,
        completeness: spec.completeness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_entries_validate() {
        Catalog::bundled().verify_all().unwrap();
        assert_eq!(list().len(), BUNDLED_FILES.len());
    }

    #[test]
    fn lookups() {
        let g1 = binary("G1_len16").unwrap();
        assert_eq!((g1.n(), g1.k()), (16, 8));
        let r24 = get("Gpi_R24").unwrap();
        assert_eq!(r24.kind, EntryKind::BinaryCode);
        assert_eq!(r24.binary().unwrap().k(), 12);
        let e10 = get("Esigma_10_14_E10").unwrap();
        assert_eq!(e10.kind, EntryKind::MatrixFragment);
        assert!(matches!(get("nope"), Err(CatalogError::Unknown(_))));
    }

    #[test]
    fn corrupted_payload_fails_checksum() {
        let mut cat = Catalog {
            index: Catalog::bundled().index.clone(),
            files: Catalog::bundled().files.clone(),
        };
        let t = cat.files.get_mut("E8.gm").unwrap();
        *t = t.replacen("1000", "1001", 1);
        assert!(matches!(cat.get("E8"), Err(CatalogError::Checksum { .. })));
    }

    #[test]
    fn perm_format_round_trip() {
        let (deg, gens) = group("L_E10").unwrap();
        assert_eq!(deg, 10);
        let text = format_perm_group(deg, &gens);
        let (deg2, gens2) = parse_perm_group(&text).unwrap();
        assert_eq!((deg, gens), (deg2, gens2));
    }

    #[test]
    fn external_manifest_lists_required_inputs() {
        let so23 = external_spec("so_23_10_8").unwrap();
        assert_eq!((so23.n, so23.k, so23.count), (23, 10, Some(3)));
        assert!(external_spec("so_26_10_8").is_some());
    }
}
