//! `sdcode`: command-line access to every stage of the classification
//! pipeline.
//!
//! Inputs are file paths or `catalog:NAME` for bundled entries. Exit status
//! is 0 on success, 1 when a check fails (an `--expect` mismatch, codes that
//! are not equivalent, a candidate that is not self-dual) and 2 for usage or
//! input errors.

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sdcode::catalog::{self, CatalogError, Dataset};
use sdcode::classify::{
    self, golay_so23_dataset, parse_expect, standardize, ClassificationReport, ClassifyError,
    ClassifyInput, ClassifyOptions, MAX_COSET_DEGREE,
};
use sdcode::cyclotomic::{ModuleCode, RingError};
use sdcode::decomp::{self, AutomorphismSpec, DecompError};
use sdcode::equiv;
use sdcode::gf2core::Error as Gf2Error;
use sdcode::{BinaryCode, Permutation};

/// `writeln!` into the output buffer; writing to a `String` cannot fail.
macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

const CATALOG_PREFIX: &str = "catalog:";

#[derive(Parser)]
#[command(
    name = "sdcode",
    version,
    about = "Binary self-dual codes with prescribed automorphisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the weight distribution A_0..A_n and the minimum distance.
    Wenum { code: String },
    /// Print the minimum distance with a codeword attaining it.
    Mindist { code: String },
    /// Print the canonical-key digest and the relabeling that reaches it.
    Canon { code: String },
    /// Decide whether two codes are permutation equivalent.
    Equiv { a: String, b: String },
    /// Print the automorphism group order and generators.
    Aut { code: String },
    /// Split a code into its fixed and even parts under an automorphism.
    Split {
        code: String,
        /// Automorphism type, e.g. `p=7,c=6,f=2` or `7-(6,2)`.
        #[arg(long)]
        spec: String,
        /// The automorphism in 1-based cycle notation. Without it the code
        /// must already be in the standard layout of its type.
        #[arg(long)]
        sigma: Option<String>,
        /// Directory for pi.gm, phi.mod and spec.txt.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a self-dual code from C_pi and C_phi.
    Assemble {
        pi: String,
        phi: String,
        #[arg(long)]
        spec: String,
        /// Write the generator matrix here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify extremal [44,22,8] codes with an automorphism of a given type.
    Classify {
        /// `p=7,c=6,f=2`, `p=7,c=3,f=23`, or `p=7` for every order-7 type.
        #[arg(long)]
        spec: String,
        /// Fixed C_pi (pairs mode, together with --phi).
        #[arg(long)]
        pi: Option<String>,
        /// C_phi candidates (pairs mode); repeatable.
        #[arg(long)]
        phi: Vec<String>,
        /// External dataset as NAME=DIR; repeatable.
        #[arg(long)]
        dataset: Vec<String>,
        /// Counts to check the report against.
        #[arg(long)]
        expect: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Append-only progress file; a rerun resumes from it.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Largest S_c handled by exhaustive double cosets.
        #[arg(long, default_value_t = MAX_COSET_DEGREE)]
        max_coset_degree: usize,
        /// Directory for representatives and the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bundled catalog of matrices and groups.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Validate an external dataset directory against its manifest entry.
    Import {
        /// Manifest name, e.g. `so_23_10_8`.
        name: String,
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List entry names.
    List,
    /// Print an entry with its declared parameters.
    Show { name: String },
    /// Write an entry's payload to a file.
    Export { name: String, path: PathBuf },
    /// Recompute every checksum and declared parameter.
    Verify,
    /// Build a dataset that can be derived internally and write it as .gm files.
    Derive { name: String, dir: PathBuf },
}

/// A failure with its exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl fmt::Display) -> Self {
        Failure {
            code: 2,
            msg: msg.to_string(),
        }
    }

    fn check(msg: impl fmt::Display) -> Self {
        Failure {
            code: 1,
            msg: msg.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Joins multi-line messages so every diagnostic is one line.
fn one_line(s: &str) -> String {
    s.lines().map(str::trim).collect::<Vec<_>>().join("; ")
}

/// Formats a parse error as `path:line: msg` where the line is known.
fn located(path: &str, e: &dyn fmt::Display, line: Option<usize>) -> Failure {
    match line {
        Some(l) => Failure::usage(format!("{path}:{l}: {e}")),
        None => Failure::usage(format!("{path}: {e}")),
    }
}

fn read_text(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

fn load_code(input: &str) -> Result<BinaryCode, Failure> {
    if let Some(name) = input.strip_prefix(CATALOG_PREFIX) {
        return catalog::binary(name).map_err(|e| Failure::usage(one_line(&e.to_string())));
    }
    let text = read_text(input)?;
    BinaryCode::parse(&text).map_err(|e| match e {
        Gf2Error::Parse { line, msg } => located(input, &msg, Some(line)),
        other => located(input, &other, None),
    })
}

fn load_module(input: &str) -> Result<ModuleCode, Failure> {
    if let Some(name) = input.strip_prefix(CATALOG_PREFIX) {
        return catalog::module(name).map_err(|e| Failure::usage(one_line(&e.to_string())));
    }
    let text = read_text(input)?;
    ModuleCode::parse(&text).map_err(|e| match e {
        RingError::Parse { line, msg } => located(input, &msg, Some(line)),
        other => located(input, &other, None),
    })
}

fn parse_spec(text: &str) -> Result<AutomorphismSpec, Failure> {
    text.parse()
        .map_err(|e: DecompError| Failure::usage(format!("--spec: {e}")))
}

/// `p=N` alone selects every supported type of that order.
fn order_only(text: &str) -> Option<usize> {
    text.trim().strip_prefix("p=")?.parse().ok()
}

fn gf2(e: Gf2Error) -> Failure {
    Failure::usage(e)
}

fn cmd_wenum(out: &mut String, input: &str) -> Outcome {
    let code = load_code(input)?;
    let wd = code.weight_distribution().map_err(gf2)?;
    outln!(out, "n {} k {}", code.n(), code.k());
    for (i, c) in wd.counts().iter().enumerate() {
        outln!(out, "A_{i} {c}");
    }
    match wd.counts().iter().skip(1).position(|&c| c > 0) {
        Some(d) => outln!(out, "d = {}", d + 1),
        None => outln!(out, "d = undefined (zero code)"),
    }
    Ok(())
}

fn cmd_mindist(out: &mut String, input: &str) -> Outcome {
    let code = load_code(input)?;
    match code.min_weight(None).map_err(gf2)? {
        Some(m) => {
            outln!(out, "d = {}", m.weight);
            outln!(out, "witness {}", m.witness);
        }
        None => outln!(out, "d = undefined (zero code)"),
    }
    Ok(())
}

fn equiv_failure(e: equiv::EquivError) -> Failure {
    Failure::usage(e)
}

fn cmd_canon(out: &mut String, input: &str) -> Outcome {
    let code = load_code(input)?;
    let canon = equiv::canonical_form(&code).map_err(equiv_failure)?;
    outln!(out, "digest {}", canon.key.digest());
    outln!(out, "relabeling {}", canon.labeling);
    Ok(())
}

fn cmd_equiv(out: &mut String, a: &str, b: &str) -> Outcome {
    let (ca, cb) = (load_code(a)?, load_code(b)?);
    if equiv::are_equivalent(&ca, &cb).map_err(equiv_failure)? {
        outln!(out, "EQUIVALENT");
        Ok(())
    } else {
        outln!(out, "NOT EQUIVALENT");
        Err(Failure::check(format!("{a} and {b} are not equivalent")))
    }
}

fn cmd_aut(out: &mut String, input: &str) -> Outcome {
    let code = load_code(input)?;
    let aut = equiv::aut_order(&code).map_err(equiv_failure)?;
    outln!(out, "order {}", aut.order);
    for g in &aut.generators {
        outln!(out, "generator {g}");
    }
    Ok(())
}

fn decomp_failure(e: DecompError) -> Failure {
    match e {
        DecompError::NotAutomorphism { .. } | DecompError::NotSelfDual(_) => Failure::check(e),
        other => Failure::usage(other),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn cmd_split(
    out: &mut String,
    input: &str,
    spec: &str,
    sigma: Option<&str>,
    dir: &Path,
) -> Outcome {
    let mut spec = parse_spec(spec)?;
    let mut code = load_code(input)?;
    if let Some(cycles) = sigma {
        let perm = Permutation::parse_cycles(code.n(), cycles)
            .map_err(|e| Failure::usage(format!("--sigma: {e}")))?;
        let (found, relabeled) = standardize(&code, &perm)
            .map_err(|e| Failure::usage(format!("--sigma: {e}")))?
            .ok_or_else(|| Failure::usage("--sigma: cycles must all have the same prime length"))?;
        if found != spec {
            return Err(Failure::usage(format!(
                "--sigma has type {found}, but --spec says {spec}"
            )));
        }
        spec = found;
        code = relabeled;
    }
    let parts = decomp::split(&code, &spec).map_err(decomp_failure)?;
    let pi = decomp::project_pi(&parts.fixed, &spec).map_err(decomp_failure)?;
    let phi = decomp::map_phi(&parts.even, &spec).map_err(decomp_failure)?;
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("pi.gm"), &pi.to_text())?;
    write_file(&dir.join("phi.mod"), &phi.to_text())?;
    write_file(&dir.join("spec.txt"), &format!("{spec}\n"))?;
    outln!(out, "type {spec}");
    outln!(out, "dim F {} dim E {}", parts.fixed.k(), parts.even.k());
    outln!(out, "C_pi [{}, {}]", pi.n(), pi.k());
    outln!(
        out,
        "C_phi {} generators over F2[x]/(x^{}-1)",
        phi.rows().len(),
        spec.p
    );
    Ok(())
}

fn cmd_assemble(out: &mut String, pi: &str, phi: &str, spec: &str, dest: Option<&Path>) -> Outcome {
    let spec = parse_spec(spec)?;
    let (cpi, cphi) = (load_code(pi)?, load_module(phi)?);
    let code = decomp::assemble(&cpi, &cphi, &spec).map_err(decomp_failure)?;
    match dest {
        Some(path) => write_file(path, &code.to_text()),
        None => {
            out.push_str(&code.to_text());
            Ok(())
        }
    }
}

fn catalog_failure(e: CatalogError) -> Failure {
    Failure::usage(one_line(&e.to_string()))
}

fn classify_failure(e: ClassifyError) -> Failure {
    Failure::usage(one_line(&e.to_string()))
}

fn load_dataset(arg: &str) -> Result<Dataset, Failure> {
    let (name, dir) = arg
        .split_once('=')
        .ok_or_else(|| Failure::usage(format!("--dataset {arg:?}: expected NAME=DIR")))?;
    let spec = catalog::external_spec(name)
        .ok_or_else(|| Failure::usage(format!("--dataset: no manifest entry named {name:?}")))?;
    catalog::import_dataset(Path::new(dir), &spec).map_err(catalog_failure)
}

struct ClassifyArgs<'a> {
    spec: &'a str,
    pi: Option<&'a str>,
    phi: &'a [String],
    dataset: &'a [String],
    expect: Option<&'a Path>,
    threads: Option<usize>,
    checkpoint: Option<PathBuf>,
    max_coset_degree: usize,
    out: Option<&'a Path>,
}

fn cmd_classify(out: &mut String, a: ClassifyArgs) -> Outcome {
    // Read the expect file before any long computation.
    let expectation = match a.expect {
        Some(path) => {
            let shown = path.display().to_string();
            let text = read_text(&shown)?;
            Some(parse_expect(&text).map_err(|e| match e {
                ClassifyError::Expect { line, msg } => located(&shown, &msg, Some(line)),
                other => Failure::usage(other),
            })?)
        }
        None => None,
    };
    let mut opts = ClassifyOptions {
        checkpoint: a.checkpoint,
        max_coset_degree: a.max_coset_degree,
        ..ClassifyOptions::default()
    };
    if let Some(t) = a.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        opts.threads = t;
    }
    let report: ClassificationReport = if let Some(p) = order_only(a.spec) {
        if a.pi.is_some() || !a.phi.is_empty() || !a.dataset.is_empty() {
            return Err(Failure::usage(
                "--spec p=N derives all inputs; drop --pi, --phi and --dataset",
            ));
        }
        classify::classify_order(p, &opts).map_err(classify_failure)?
    } else {
        let spec = parse_spec(a.spec)?;
        let input = match (a.pi, a.phi.is_empty(), a.dataset.is_empty()) {
            (None, true, true) => ClassifyInput::None,
            (Some(pi), false, true) => ClassifyInput::Pairs {
                pi: (pi.to_string(), load_code(pi)?),
                phis: a
                    .phi
                    .iter()
                    .map(|s| Ok((s.clone(), load_module(s)?)))
                    .collect::<Result<_, Failure>>()?,
            },
            (None, true, false) => ClassifyInput::Datasets(
                a.dataset
                    .iter()
                    .map(|s| load_dataset(s))
                    .collect::<Result<_, _>>()?,
            ),
            _ => {
                return Err(Failure::usage(
                    "give either --pi with at least one --phi, or --dataset, or neither",
                ))
            }
        };
        classify::classify(&spec, &input, &opts).map_err(classify_failure)?
    };
    log::info!("finished in {:.1?}", report.elapsed);
    out.push_str(&report.to_table());
    if let Some(dir) = a.out {
        report.write_to(dir).map_err(classify_failure)?;
    }
    if let Some(exp) = expectation {
        let misses = exp.check(&report);
        if !misses.is_empty() {
            return Err(Failure::check(format!(
                "expectation failed: {}",
                misses.join("; ")
            )));
        }
    }
    Ok(())
}

fn cmd_catalog(out: &mut String, action: &CatalogAction) -> Outcome {
    match action {
        CatalogAction::List => {
            for name in catalog::list() {
                outln!(out, "{name}");
            }
        }
        CatalogAction::Show { name } => {
            let entry = catalog::get(name).map_err(catalog_failure)?;
            outln!(out, "# {} ({:?})", entry.name, entry.kind);
            outln!(out, "# {}", entry.provenance);
            outln!(out, "# sha256 {}", entry.checksum);
            out.push_str(&entry.text);
        }
        CatalogAction::Export { name, path } => {
            let entry = catalog::get(name).map_err(catalog_failure)?;
            catalog::export(&entry, path).map_err(catalog_failure)?;
        }
        CatalogAction::Verify => {
            let cat = catalog::Catalog::bundled();
            cat.verify_all().map_err(catalog_failure)?;
            outln!(out, "{} entries verified", cat.list().len());
        }
        CatalogAction::Derive { name, dir } => {
            if name != "so_23_10_8" {
                return Err(Failure::usage(format!(
                    "no internal derivation for {name:?} (only so_23_10_8)"
                )));
            }
            let set = golay_so23_dataset().map_err(classify_failure)?;
            fs::create_dir_all(dir)
                .map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
            for e in &set.entries {
                let path = dir.join(format!("{}.gm", e.name));
                write_file(&path, &e.code.to_text())?;
                outln!(out, "{}", path.display());
            }
        }
    }
    Ok(())
}

fn cmd_import(out: &mut String, name: &str, dir: &Path) -> Outcome {
    let spec = catalog::external_spec(name)
        .ok_or_else(|| Failure::usage(format!("no manifest entry named {name:?}")))?;
    let set = catalog::import_dataset(dir, &spec).map_err(catalog_failure)?;
    for e in &set.entries {
        outln!(out, "{} sha256 {}", e.name, e.checksum);
    }
    outln!(out, "{}: {} codes valid", set.name, set.entries.len());
    Ok(())
}

fn run(cli: Cli, buf: &mut String) -> Outcome {
    match &cli.command {
        Command::Wenum { code } => cmd_wenum(buf, code),
        Command::Mindist { code } => cmd_mindist(buf, code),
        Command::Canon { code } => cmd_canon(buf, code),
        Command::Equiv { a, b } => cmd_equiv(buf, a, b),
        Command::Aut { code } => cmd_aut(buf, code),
        Command::Split {
            code,
            spec,
            sigma,
            out,
        } => cmd_split(buf, code, spec, sigma.as_deref(), out),
        Command::Assemble { pi, phi, spec, out } => {
            cmd_assemble(buf, pi, phi, spec, out.as_deref())
        }
        Command::Classify {
            spec,
            pi,
            phi,
            dataset,
            expect,
            threads,
            checkpoint,
            max_coset_degree,
            out,
        } => cmd_classify(
            buf,
            ClassifyArgs {
                spec,
                pi: pi.as_deref(),
                phi,
                dataset,
                expect: expect.as_deref(),
                threads: *threads,
                checkpoint: checkpoint.clone(),
                max_coset_degree: *max_coset_degree,
                out: out.as_deref(),
            },
        ),
        Command::Catalog { action } => cmd_catalog(buf, action),
        Command::Import { name, dir } => cmd_import(buf, name, dir),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors and 0 for --help.
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    let mut stdout = std::io::stdout().lock();
    // A closed pipe (`sdcode ... | head`) is not an error.
    if let Err(e) = stdout
        .write_all(out.as_bytes())
        .and_then(|()| stdout.flush())
    {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("sdcode: stdout: {e}");
            return ExitCode::from(2);
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sdcode: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
