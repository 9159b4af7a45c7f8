//! Append-only record of evaluated candidates, so an interrupted run can
//! resume.
//!
//! Line format after the header is `ID PAYLOAD\tSUM`, where `SUM` is the
//! first 16 hex digits of the SHA-256 of `ID PAYLOAD`. A final line without
//! a newline is a torn write and is dropped; any other damaged line is an
//! error.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;
use thiserror::Error;

use crate::catalog::sha256_hex;
use crate::equiv::CanonicalKey;

use super::{ExtremalProfile, Outcome};

const HEADER: &str = "sdcode-checkpoint v1";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: written for a different run (fingerprint {found}, expected {expected})")]
    Fingerprint {
        path: String,
        expected: String,
        found: String,
    },
    #[error("{path}:{line}: {msg}")]
    Corrupt {
        path: String,
        line: usize,
        msg: String,
    },
}

#[derive(Debug)]
pub struct Checkpoint {
    path: PathBuf,
    done: HashMap<u64, Outcome>,
    file: Mutex<File>,
}

fn checksum(body: &str) -> String {
    sha256_hex(body.as_bytes())[..16].to_string()
}

fn encode(id: u64, out: &Outcome) -> String {
    match out {
        Outcome::Rejected(w) => format!("{id} reject {w}"),
        Outcome::Code {
            key,
            profile,
            aut_order,
        } => format!(
            "{id} code {} {} {} {aut_order}",
            hex::encode(key.bytes()),
            profile.family,
            profile.beta
        ),
    }
}

fn decode(body: &str) -> Result<(u64, Outcome), String> {
    let parts: Vec<&str> = body.split(' ').collect();
    let id: u64 = parts
        .first()
        .and_then(|s| s.parse().ok())
        .ok_or("bad candidate id")?;
    let out = match parts[1..] {
        ["reject", w] => Outcome::Rejected(w.parse().map_err(|_| "bad weight")?),
        ["code", key, fam, beta, aut] => {
            let bytes = hex::decode(key).map_err(|_| "bad key hex")?;
            Outcome::Code {
                key: CanonicalKey::from_bytes(bytes).ok_or("bad key length")?,
                profile: ExtremalProfile {
                    family: fam.parse()?,
                    beta: beta.parse().map_err(|_| "bad beta")?,
                },
                aut_order: aut.parse::<BigUint>().map_err(|_| "bad group order")?,
            }
        }
        _ => return Err("unknown record".into()),
    };
    Ok((id, out))
}

impl Checkpoint {
    /// Opens or creates the file. An existing file must carry the same
    /// fingerprint.
    pub fn open(path: &Path, fingerprint: &str) -> Result<Self, CheckpointError> {
        let display = path.display().to_string();
        let io = |source| CheckpointError::Io {
            path: display.clone(),
            source,
        };
        let header = format!("{HEADER} {fingerprint}");
        let mut done = HashMap::new();
        let mut keep = 0u64;
        if path.exists() {
            let mut reader = BufReader::new(File::open(path).map_err(io)?);
            let mut line = String::new();
            let mut lineno = 0;
            loop {
                line.clear();
                let read = reader.read_line(&mut line).map_err(io)?;
                if read == 0 {
                    break;
                }
                lineno += 1;
                if !line.ends_with('\n') {
                    log::warn!("{display}:{lineno}: dropping incomplete record");
                    break;
                }
                let text = line.trim_end_matches('\n');
                if lineno == 1 {
                    if text != header {
                        let found = text.strip_prefix(HEADER).unwrap_or(text).trim().to_string();
                        return Err(CheckpointError::Fingerprint {
                            path: display,
                            expected: fingerprint.to_string(),
                            found,
                        });
                    }
                } else {
                    let corrupt = |msg: String| CheckpointError::Corrupt {
                        path: display.clone(),
                        line: lineno,
                        msg,
                    };
                    let (body, sum) = text
                        .split_once('\t')
                        .ok_or_else(|| corrupt("missing checksum".into()))?;
                    if checksum(body) != sum {
                        return Err(corrupt("checksum mismatch".into()));
                    }
                    let (id, out) = decode(body).map_err(corrupt)?;
                    done.insert(id, out);
                }
                keep += read as u64;
            }
        }
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io)?;
        // Cut off a torn tail before appending.
        file.set_len(keep).map_err(io)?;
        if keep == 0 {
            writeln!(file, "{header}").map_err(io)?;
        }
        Ok(Checkpoint {
            path: path.to_path_buf(),
            done,
            file: Mutex::new(file),
        })
    }

    /// Number of candidates recorded before this run.
    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }

    pub fn get(&self, id: u64) -> Option<Outcome> {
        self.done.get(&id).cloned()
    }

    pub fn record(&self, id: u64, out: &Outcome) -> Result<(), CheckpointError> {
        let body = encode(id, out);
        let line = format!("{body}\t{}\n", checksum(&body));
        let mut file = self.file.lock().unwrap();
        file.write_all(line.as_bytes())
            .map_err(|source| CheckpointError::Io {
                path: self.path.display().to_string(),
                source,
            })
    }
}
