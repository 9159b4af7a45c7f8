//! Classification pipelines: candidate enumeration, symmetry reduction,
//! assembly, minimum-weight filtering and deduplication by canonical key.
//!
//! Candidates are numbered deterministically, evaluated in parallel, and
//! merged in id order, so a report depends only on its inputs.

mod checkpoint;
mod cosets;
mod order7;
mod profile;
mod report;
mod symmetry;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::BigUint;
use thiserror::Error;

use crate::catalog::{CatalogError, Dataset};
use crate::cyclotomic::{ModuleCode, RingError};
use crate::decomp::{assemble, AutomorphismSpec, DecompError};
use crate::equiv::{canonical_form, CanonicalKey, EquivError};
use crate::gf2core::{BinaryCode, Error as Gf2Error};
use crate::perm::Permutation;

pub use checkpoint::{Checkpoint, CheckpointError};
pub use cosets::{
    double_coset_reps, orbit_reps_on_subsets, MAX_COSET_DEGREE, MAX_SUBSET_ORBIT_POINTS,
};
pub use order7::{
    enumerate_m1_cases, golay23, golay_so23_dataset, m1_canonical_key, order7_three_cycle_plan,
    order7_two_fixed_plan, phi_from_m1, three_cycle_phi, M1Equivalence,
};
pub use profile::{beta_profile, ExtremalProfile, Family, EXTREMAL_LENGTH};
pub use report::{parse_expect, ClassificationReport, Expectation, Representative, Subtotal};
pub use symmetry::{compute_l, compute_s, module_symmetries, CycleTransform, TransformGroup};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("not an extremal length-44 profile: {0}")]
    NotExtremal(String),
    #[error("double cosets of S_{degree} exceed the exhaustive limit of {limit}; use orbit representatives with generate-and-dedup")]
    DegreeCap { degree: usize, limit: usize },
    #[error("{0} subsets exceed the enumeration limit")]
    TooManySubsets(u128),
    #[error("unsupported M1 dimensions {0:?} (expected (1,5), (2,4) or (3,3))")]
    UnsupportedDims((usize, usize)),
    #[error("missing input for {spec}: {what}")]
    MissingInput { spec: String, what: String },
    #[error("unsupported automorphism type {0}")]
    UnsupportedSpec(String),
    #[error("malformed expect file, line {line}: {msg}")]
    Expect { line: usize, msg: String },
    #[error("candidate {id}: {msg}")]
    Candidate { id: u64, msg: String },
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One `(C_pi, C_phi)` pair to assemble.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub id: u64,
    /// Subtotal bucket, e.g. `case III, C_pi=E8`.
    pub group: String,
    pub provenance: String,
    pub pi: BinaryCode,
    /// Index into [`Plan::phis`].
    pub phi: usize,
}

/// Every candidate of a run, in evaluation order.
#[derive(Debug, Clone)]
pub struct Plan {
    pub spec: AutomorphismSpec,
    pub phis: Vec<ModuleCode>,
    pub candidates: Vec<Candidate>,
    /// `(name, sha256)` of every external input.
    pub inputs: Vec<(String, String)>,
}

impl Plan {
    pub fn new(spec: AutomorphismSpec) -> Self {
        Plan {
            spec,
            phis: Vec::new(),
            candidates: Vec::new(),
            inputs: Vec::new(),
        }
    }

    pub fn add_phi(&mut self, phi: ModuleCode) -> usize {
        self.phis.push(phi);
        self.phis.len() - 1
    }

    pub fn push(&mut self, group: &str, provenance: String, pi: BinaryCode, phi: usize) {
        let id = self.candidates.len() as u64;
        self.candidates.push(Candidate {
            id,
            group: group.to_string(),
            provenance,
            pi,
            phi,
        });
    }

    /// Adds one candidate per double coset `S tau L` of cycle placements.
    pub fn push_double_cosets(
        &mut self,
        group: &str,
        label: &str,
        pi: &BinaryCode,
        phi: usize,
        max_degree: usize,
    ) -> Result<usize, ClassifyError> {
        let (c, f) = (self.spec.c, self.spec.f);
        let s = compute_s(pi, c, f)?;
        let l = compute_l(&self.phis[phi])?;
        if c > max_degree {
            return Err(ClassifyError::DegreeCap {
                degree: c,
                limit: max_degree,
            });
        }
        let reps = double_coset_reps(&s, &l, c)?;
        log::info!(
            "{group} {label}: |S| = {}, |L| = {}, {} double cosets",
            s.order(),
            l.order(),
            reps.len()
        );
        for tau in &reps {
            let moved = pi.permute(tau.extend(c + f).images())?;
            self.push(group, format!("{label}, tau={tau}"), moved, phi);
        }
        Ok(reps.len())
    }

    /// Checksum over everything that determines the candidates.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.spec.to_string());
        for phi in &self.phis {
            h.update(phi.to_text());
        }
        for c in &self.candidates {
            h.update(format!("{} {} {}\n", c.id, c.phi, c.group));
            h.update(c.pi.to_text());
        }
        hex::encode(h.finalize())[..32].to_string()
    }
}

/// Result of evaluating one candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Minimum weight below 8; carries the weight found.
    Rejected(usize),
    Code {
        key: CanonicalKey,
        profile: ExtremalProfile,
        aut_order: BigUint,
    },
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub threads: usize,
    pub checkpoint: Option<PathBuf>,
    pub max_coset_degree: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            threads: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            checkpoint: None,
            max_coset_degree: MAX_COSET_DEGREE,
        }
    }
}

/// What a run starts from, besides its automorphism type.
#[derive(Debug, Clone, Default)]
pub enum ClassifyInput {
    /// Everything is derived internally (type 7-(6,2)).
    #[default]
    None,
    /// A fixed `C_pi` with one or more `C_phi`; all cycle placements are tried.
    Pairs {
        pi: (String, BinaryCode),
        phis: Vec<(String, ModuleCode)>,
    },
    /// Externally classified datasets (type 7-(3,23) needs `so_23_10_8`).
    Datasets(Vec<Dataset>),
}

/// Minimum weight every reported code must reach.
pub const TARGET_WEIGHT: usize = 8;

pub fn assemble_candidate(plan: &Plan, cand: &Candidate) -> Result<BinaryCode, ClassifyError> {
    Ok(assemble(&cand.pi, &plan.phis[cand.phi], &plan.spec)?)
}

pub fn evaluate(plan: &Plan, cand: &Candidate) -> Result<Outcome, ClassifyError> {
    let code = assemble_candidate(plan, cand)?;
    let mw = code
        .min_weight(Some(TARGET_WEIGHT))?
        .map(|m| m.weight)
        .unwrap_or(0);
    if mw < TARGET_WEIGHT {
        return Ok(Outcome::Rejected(mw));
    }
    let canon = canonical_form(&code)?;
    let profile =
        beta_profile(&code.weight_distribution()?).map_err(|e| ClassifyError::Candidate {
            id: cand.id,
            msg: e.to_string(),
        })?;
    Ok(Outcome::Code {
        key: canon.key,
        profile,
        aut_order: canon.aut.order,
    })
}

/// Applies `f` to every item on up to `threads` workers; results keep
/// item order.
pub fn parallel_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap())
        .collect()
}

/// Evaluates every candidate and deduplicates.
pub fn run_plan(
    plan: &Plan,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let start = Instant::now();
    let checkpoint = match &opts.checkpoint {
        Some(path) => Some(Checkpoint::open(path, &plan.fingerprint())?),
        None => None,
    };
    let resumed = checkpoint.as_ref().map(|c| c.len()).unwrap_or(0);
    if resumed > 0 {
        log::info!("resuming: {resumed} candidates already evaluated");
    }
    let outcomes = parallel_map(
        &plan.candidates,
        opts.threads,
        |cand| -> Result<Outcome, ClassifyError> {
            if let Some(done) = checkpoint.as_ref().and_then(|c| c.get(cand.id)) {
                return Ok(done);
            }
            let out = evaluate(plan, cand)?;
            if let Some(c) = &checkpoint {
                c.record(cand.id, &out)?;
            }
            Ok(out)
        },
    );

    let mut reps: Vec<Representative> = Vec::new();
    let mut seen: BTreeMap<CanonicalKey, usize> = BTreeMap::new();
    let mut subtotals: Vec<Subtotal> = Vec::new();
    let mut group_keys: BTreeMap<String, BTreeMap<CanonicalKey, ExtremalProfile>> = BTreeMap::new();
    let mut rejected = 0;
    for (cand, out) in plan.candidates.iter().zip(outcomes) {
        let out: Outcome = out?;
        if !subtotals.iter().any(|s| s.label == cand.group) {
            subtotals.push(Subtotal::new(&cand.group));
        }
        match out {
            Outcome::Rejected(_) => rejected += 1,
            Outcome::Code {
                key,
                profile,
                aut_order,
            } => {
                group_keys
                    .entry(cand.group.clone())
                    .or_default()
                    .insert(key.clone(), profile);
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key.clone(), reps.len());
                reps.push(Representative {
                    code: assemble_candidate(plan, cand)?,
                    key,
                    profile,
                    aut_order,
                    provenance: cand.provenance.clone(),
                    candidate: cand.id,
                });
            }
        }
    }
    for s in subtotals.iter_mut() {
        if let Some(keys) = group_keys.get(&s.label) {
            s.count = keys.len();
            for p in keys.values() {
                *s.profiles.entry(*p).or_default() += 1;
            }
        }
    }
    Ok(ClassificationReport {
        spec: plan.spec,
        merged: Vec::new(),
        representatives: reps,
        subtotals,
        candidates: plan.candidates.len(),
        rejected,
        inputs: plan.inputs.clone(),
        elapsed: start.elapsed(),
    })
}

/// Builds the plan for `spec` from `input`.
pub fn plan(
    spec: &AutomorphismSpec,
    input: &ClassifyInput,
    opts: &ClassifyOptions,
) -> Result<Plan, ClassifyError> {
    match input {
        ClassifyInput::Pairs { pi, phis } => {
            let mut plan = Plan::new(*spec);
            plan.inputs.push((
                pi.0.clone(),
                crate::catalog::sha256_hex(pi.1.to_text().as_bytes()),
            ));
            for (name, phi) in phis {
                plan.inputs.push((
                    name.clone(),
                    crate::catalog::sha256_hex(phi.to_text().as_bytes()),
                ));
                let idx = plan.add_phi(phi.clone());
                let label = format!("C_pi={}, C_phi={}", pi.0, name);
                plan.push_double_cosets(&label, &label, &pi.1, idx, opts.max_coset_degree)?;
            }
            Ok(plan)
        }
        ClassifyInput::None if (spec.p, spec.c, spec.f) == (7, 6, 2) => {
            order7_two_fixed_plan(opts.max_coset_degree)
        }
        ClassifyInput::Datasets(sets) if (spec.p, spec.c, spec.f) == (7, 3, 23) => {
            let so23 = sets
                .iter()
                .find(|d| d.name == "so_23_10_8")
                .ok_or_else(|| ClassifyError::MissingInput {
                    spec: spec.to_string(),
                    what: "dataset so_23_10_8 ([23,10,8] self-orthogonal codes; `catalog derive so_23_10_8 DIR` builds one)".into(),
                })?;
            order7_three_cycle_plan(so23)
        }
        ClassifyInput::None if (spec.p, spec.c, spec.f) == (7, 3, 23) => {
            Err(ClassifyError::MissingInput {
                spec: spec.to_string(),
                what: "dataset so_23_10_8 ([23,10,8] self-orthogonal codes; `catalog derive so_23_10_8 DIR` builds one)".into(),
            })
        }
        _ if spec.p == 3 => Err(ClassifyError::MissingInput {
            spec: spec.to_string(),
            what: "a C_pi code and Hermitian self-dual C_phi codes (pairs input)".into(),
        }),
        _ => Err(ClassifyError::UnsupportedSpec(spec.to_string())),
    }
}

/// Plans and runs a classification.
pub fn classify(
    spec: &AutomorphismSpec,
    input: &ClassifyInput,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    let plan = plan(spec, input, opts)?;
    log::info!("{spec}: {} candidates", plan.candidates.len());
    run_plan(&plan, opts)
}

/// Every type of order `p` with a self-contained pipeline, merged with a
/// global dedup. For `p = 7` these are 7-(6,2) and 7-(3,23), the latter
/// fed by the Golay-derived `so_23_10_8` dataset.
pub fn classify_order(
    p: usize,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport, ClassifyError> {
    if p != 7 {
        return Err(ClassifyError::UnsupportedSpec(format!("p={p}")));
    }
    let mut report = classify(&AutomorphismSpec::new(7, 6, 2)?, &ClassifyInput::None, opts)?;
    let so23 = ClassifyInput::Datasets(vec![golay_so23_dataset()?]);
    // A shared checkpoint would mix fingerprints, so the second run has none.
    let second = ClassifyOptions {
        checkpoint: None,
        ..opts.clone()
    };
    report.merge(&classify(
        &AutomorphismSpec::new(7, 3, 23)?,
        &so23,
        &second,
    )?);
    Ok(report)
}

/// Relabels `code` so that `sigma` becomes the standard permutation of its
/// type: the cycles become consecutive blocks and the fixed points come last.
/// Returns `None` unless every nontrivial cycle has the same length.
pub fn standardize(
    code: &BinaryCode,
    sigma: &Permutation,
) -> Result<Option<(AutomorphismSpec, BinaryCode)>, ClassifyError> {
    let cycles = sigma.cycles();
    let Some(p) = cycles.first().map(|c| c.len()) else {
        return Ok(None);
    };
    if cycles.iter().any(|c| c.len() != p) {
        return Ok(None);
    }
    let fixed = sigma.fixed_points();
    let spec = AutomorphismSpec::new(p, cycles.len(), fixed.len())?;
    let mut images = vec![0; code.n()];
    for (i, cyc) in cycles.iter().enumerate() {
        // Position p*i + r holds sigma^r of the cycle's first point.
        let mut x = cyc[0];
        for r in 0..p {
            images[x] = p * i + r;
            x = sigma.apply(x);
        }
    }
    for (j, &x) in fixed.iter().enumerate() {
        images[x] = p * cycles.len() + j;
    }
    Ok(Some((spec, code.permute(&images)?)))
}
