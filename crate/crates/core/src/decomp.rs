//! Splitting a code along a prescribed automorphism of odd prime order, and
//! putting it back together.
//!
//! The automorphism has `c` cycles of length `p` on coordinates
//! `0..p*c` (cycle `i` is `p*i .. p*i + p`, mapping each position to the next
//! and the last back to the first) and fixes the final `f` coordinates.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cyclotomic::{form_value, ModuleCode, RingElement, RingError};
use crate::gf2core::{BinaryCode, BitVector, Error as Gf2Error};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("invalid automorphism spec {0:?} (expected `p=7 c=6 f=2`)")]
    SpecSyntax(String),
    #[error("p={0} is not an odd prime")]
    SpecPrime(usize),
    #[error("code length {found} does not match the spec length {expected}")]
    Length { expected: usize, found: usize },
    #[error("the cycle permutation is not an automorphism: image of row {row} leaves the code ({witness})")]
    NotAutomorphism { row: usize, witness: String },
    #[error("row {row} is not constant on cycle {cycle}")]
    NonConstantCycle { row: usize, cycle: usize },
    #[error("row {row} has odd weight on cycle {cycle}")]
    OddCycle { row: usize, cycle: usize },
    #[error("row {row} is nonzero on the fixed points")]
    NonzeroFixed { row: usize },
    #[error("module has p={found}, spec has p={expected}")]
    ModuleShape { expected: usize, found: usize },
    #[error("assembled code is not self-dual: {0}")]
    NotSelfDual(SelfDualityVerdict),
    #[error("projected code is not self-dual")]
    PiNotSelfDual,
    #[error("internal rank inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Cycle structure of an automorphism of type `p-(c,f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AutomorphismSpec {
    pub p: usize,
    pub c: usize,
    pub f: usize,
}

impl AutomorphismSpec {
    pub fn new(p: usize, c: usize, f: usize) -> Result<Self, DecompError> {
        if p < 3 || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(DecompError::SpecPrime(p));
        }
        Ok(AutomorphismSpec { p, c, f })
    }

    pub fn n(&self) -> usize {
        self.p * self.c + self.f
    }

    /// Length of the projected code `C_pi`.
    pub fn pi_len(&self) -> usize {
        self.c + self.f
    }

    pub fn cycle_coords(&self, i: usize) -> std::ops::Range<usize> {
        self.p * i..self.p * i + self.p
    }

    pub fn fixed_coords(&self) -> std::ops::Range<usize> {
        self.p * self.c..self.n()
    }

    /// The automorphism itself as a coordinate permutation.
    pub fn sigma(&self) -> Permutation {
        let cycles: Vec<Vec<usize>> = (0..self.c)
            .map(|i| self.cycle_coords(i).collect())
            .collect();
        Permutation::from_cycles(self.n(), &cycles).expect("cycles are disjoint")
    }
}

impl fmt::Display for AutomorphismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} c={} f={}", self.p, self.c, self.f)
    }
}

impl FromStr for AutomorphismSpec {
    type Err = DecompError;

    /// Accepts `p=7 c=6 f=2`, `p=7,c=6,f=2` and the compact `7-(6,2)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DecompError::SpecSyntax(s.to_string());
        let t = s.trim();
        if let Some((p, rest)) = t.split_once("-(") {
            let rest = rest.strip_suffix(')').ok_or_else(bad)?;
            let (c, f) = rest.split_once(',').ok_or_else(bad)?;
            let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
            return AutomorphismSpec::new(num(p)?, num(c)?, num(f)?);
        }
        let (mut p, mut c, mut f) = (None, None, None);
        for part in t
            .split(|ch: char| ch == ',' || ch.is_whitespace())
            .filter(|x| !x.is_empty())
        {
            let (key, val) = part.split_once('=').ok_or_else(bad)?;
            let val: usize = val.parse().map_err(|_| bad())?;
            match key {
                "p" => p = Some(val),
                "c" => c = Some(val),
                "f" => f = Some(val),
                _ => return Err(bad()),
            }
        }
        AutomorphismSpec::new(p.ok_or_else(bad)?, c.ok_or_else(bad)?, f.ok_or_else(bad)?)
    }
}

/// `F_sigma(C)` and `E_sigma(C)`.
#[derive(Debug, Clone)]
pub struct DecompositionParts {
    pub fixed: BinaryCode,
    pub even: BinaryCode,
    pub spec: AutomorphismSpec,
}

fn check_len(code: &BinaryCode, expected: usize) -> Result<(), DecompError> {
    if code.n() != expected {
        return Err(DecompError::Length {
            expected,
            found: code.n(),
        });
    }
    Ok(())
}

/// Vectors constant on every cycle (arbitrary on fixed points).
fn fixed_space(spec: &AutomorphismSpec) -> BinaryCode {
    let n = spec.n();
    let mut rows = Vec::new();
    for i in 0..spec.c {
        let mut v = BitVector::zeros(n);
        for j in spec.cycle_coords(i) {
            v.set(j, true);
        }
        rows.push(v);
    }
    for j in spec.fixed_coords() {
        let mut v = BitVector::zeros(n);
        v.set(j, true);
        rows.push(v);
    }
    BinaryCode::from_rows(n, rows).unwrap()
}

/// Vectors of even weight on every cycle and zero on fixed points.
fn even_space(spec: &AutomorphismSpec) -> BinaryCode {
    let n = spec.n();
    let mut rows = Vec::new();
    for i in 0..spec.c {
        let base = spec.p * i;
        for a in 0..spec.p - 1 {
            let mut v = BitVector::zeros(n);
            v.set(base + a, true);
            v.set(base + a + 1, true);
            rows.push(v);
        }
    }
    BinaryCode::from_rows(n, rows).unwrap()
}

/// Splits `C` as `F_sigma(C) + E_sigma(C)`.
pub fn split(
    code: &BinaryCode,
    spec: &AutomorphismSpec,
) -> Result<DecompositionParts, DecompError> {
    check_len(code, spec.n())?;
    let sigma = spec.sigma();
    for (i, r) in code.rows().iter().enumerate() {
        let img = r.permuted(sigma.images());
        if !code.contains(&img) {
            return Err(DecompError::NotAutomorphism {
                row: i,
                witness: img.to_string(),
            });
        }
    }
    let fixed = code.intersection(&fixed_space(spec))?.reduced();
    let even = code.intersection(&even_space(spec))?.reduced();
    if fixed.k() + even.k() != code.k() {
        return Err(DecompError::Internal(format!(
            "dim F + dim E = {} + {} differs from dim C = {}",
            fixed.k(),
            even.k(),
            code.k()
        )));
    }
    Ok(DecompositionParts {
        fixed,
        even,
        spec: *spec,
    })
}

/// `pi`: keeps one coordinate per cycle plus the fixed points.
pub fn project_pi(fixed: &BinaryCode, spec: &AutomorphismSpec) -> Result<BinaryCode, DecompError> {
    check_len(fixed, spec.n())?;
    let m = spec.pi_len();
    let mut rows = Vec::with_capacity(fixed.k());
    for (ri, r) in fixed.rows().iter().enumerate() {
        let mut v = BitVector::zeros(m);
        for i in 0..spec.c {
            let first = r.get(spec.p * i);
            if spec.cycle_coords(i).any(|j| r.get(j) != first) {
                return Err(DecompError::NonConstantCycle { row: ri, cycle: i });
            }
            v.set(i, first);
        }
        for (j, pos) in spec.fixed_coords().enumerate() {
            v.set(spec.c + j, r.get(pos));
        }
        rows.push(v);
    }
    Ok(BinaryCode::from_rows(m, rows)?)
}

/// Inverse of `pi`: cycle coordinates are repeated `p` times.
pub fn lift_pi(pi: &BinaryCode, spec: &AutomorphismSpec) -> Result<BinaryCode, DecompError> {
    check_len(pi, spec.pi_len())?;
    let rows = pi.rows().iter().map(|r| lift_pi_row(r, spec)).collect();
    Ok(BinaryCode::from_rows(spec.n(), rows)?)
}

fn lift_pi_row(r: &BitVector, spec: &AutomorphismSpec) -> BitVector {
    let mut v = BitVector::zeros(spec.n());
    for i in 0..spec.c {
        if r.get(i) {
            for j in spec.cycle_coords(i) {
                v.set(j, true);
            }
        }
    }
    for (j, pos) in spec.fixed_coords().enumerate() {
        if r.get(spec.c + j) {
            v.set(pos, true);
        }
    }
    v
}

/// `phi`: reads each cycle restriction as a polynomial. Accepts the even
/// subcode at full length `n` or already restricted to the `p*c` cycle
/// coordinates.
pub fn map_phi(even: &BinaryCode, spec: &AutomorphismSpec) -> Result<ModuleCode, DecompError> {
    let pc = spec.p * spec.c;
    if even.n() != spec.n() && even.n() != pc {
        return Err(DecompError::Length {
            expected: spec.n(),
            found: even.n(),
        });
    }
    let mut rows = Vec::with_capacity(even.k());
    for (ri, r) in even.rows().iter().enumerate() {
        if r.len() > pc && (pc..r.len()).any(|j| r.get(j)) {
            return Err(DecompError::NonzeroFixed { row: ri });
        }
        let mut row = Vec::with_capacity(spec.c);
        for i in 0..spec.c {
            let mut bits = 0u32;
            for (b, j) in spec.cycle_coords(i).enumerate() {
                if r.get(j) {
                    bits |= 1 << b;
                }
            }
            let a = RingElement::new(spec.p, bits);
            if !a.is_even() {
                return Err(DecompError::OddCycle { row: ri, cycle: i });
            }
            row.push(a);
        }
        rows.push(row);
    }
    Ok(ModuleCode::new(spec.p, spec.c, rows)?)
}

/// Inverse of `phi`, padded with zeros on the fixed points.
pub fn lift_phi(phi: &ModuleCode, spec: &AutomorphismSpec) -> Result<BinaryCode, DecompError> {
    if phi.p() != spec.p || phi.c() != spec.c {
        return Err(DecompError::ModuleShape {
            expected: spec.p,
            found: phi.p(),
        });
    }
    let image = phi.binary_image();
    let pad = BitVector::zeros(spec.f);
    let rows = image.rows().iter().map(|r| r.concat(&pad)).collect();
    Ok(BinaryCode::from_rows(spec.n(), rows)?)
}

/// Outcome of the two self-duality conditions on a `(C_pi, C_phi)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfDualityVerdict {
    /// `C_pi` is self-dual.
    pub pi_self_dual: bool,
    /// `C_phi` lies in `P^c`, has GF(2) dimension `c(p-1)/2`, and the
    /// form `sum u_i(x) v_i(x^{-1})` vanishes on every generator pair.
    pub phi_self_dual: bool,
    pub phi_dimension: usize,
    /// First generator pair on which the form is nonzero.
    pub violating_pair: Option<(usize, usize)>,
}

impl SelfDualityVerdict {
    pub fn holds(&self) -> bool {
        self.pi_self_dual && self.phi_self_dual
    }
}

impl fmt::Display for SelfDualityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            return f.write_str("both conditions hold");
        }
        let mut parts = Vec::new();
        if !self.pi_self_dual {
            parts.push("condition (i): C_pi is not self-dual".to_string());
        }
        if !self.phi_self_dual {
            match self.violating_pair {
                Some((a, b)) => parts.push(format!(
                    "condition (ii): form nonzero on generators {a} and {b}"
                )),
                None => parts.push(format!(
                    "condition (ii): C_phi has binary dimension {}",
                    self.phi_dimension
                )),
            }
        }
        f.write_str(&parts.join("; "))
    }
}

/// Checks both self-duality conditions. The form is checked on generator
/// pairs only, which suffices by sesquilinearity.
pub fn check_self_duality_conditions(
    pi: &BinaryCode,
    phi: &ModuleCode,
    spec: &AutomorphismSpec,
) -> Result<SelfDualityVerdict, DecompError> {
    check_len(pi, spec.pi_len())?;
    if phi.p() != spec.p || phi.c() != spec.c {
        return Err(DecompError::ModuleShape {
            expected: spec.p,
            found: phi.p(),
        });
    }
    let pi_self_dual = pi.is_self_dual();
    let phi_dimension = phi.binary_dimension();
    let mut violating_pair = None;
    'outer: for (a, u) in phi.rows().iter().enumerate() {
        for (b, v) in phi.rows().iter().enumerate().skip(a) {
            if !form_value(spec.p, u, v)?.is_zero() {
                violating_pair = Some((a, b));
                break 'outer;
            }
        }
    }
    let phi_self_dual =
        phi.in_p() && violating_pair.is_none() && 2 * phi_dimension == spec.c * (spec.p - 1);
    Ok(SelfDualityVerdict {
        pi_self_dual,
        phi_self_dual,
        phi_dimension,
        violating_pair,
    })
}

/// Stacks `lift_pi(C_pi)` and `lift_phi(C_phi)` without any checks.
pub fn assemble_unchecked(
    pi: &BinaryCode,
    phi: &ModuleCode,
    spec: &AutomorphismSpec,
) -> Result<BinaryCode, DecompError> {
    let mut rows = lift_pi(pi, spec)?.rows().to_vec();
    rows.extend(lift_phi(phi, spec)?.rows().iter().cloned());
    Ok(BinaryCode::from_rows(spec.n(), rows)?)
}

/// Builds `C = F + E` from its two parts and verifies self-duality.
pub fn assemble(
    pi: &BinaryCode,
    phi: &ModuleCode,
    spec: &AutomorphismSpec,
) -> Result<BinaryCode, DecompError> {
    let verdict = check_self_duality_conditions(pi, phi, spec)?;
    if !verdict.holds() {
        return Err(DecompError::NotSelfDual(verdict));
    }
    let code = assemble_unchecked(pi, phi, spec)?;
    if !code.is_self_dual() {
        return Err(DecompError::Internal(
            "conditions hold but the assembled code is not self-dual".into(),
        ));
    }
    Ok(code)
}

/// Block form of a self-dual `C_pi` with respect to `c` cycle and `f` fixed
/// coordinates:
///
/// ```text
/// [ B 0 ]
/// [ 0 D ]
/// [ E F ]
/// ```
#[derive(Debug, Clone)]
pub struct PiStructure {
    pub b: BinaryCode,
    pub d: BinaryCode,
    pub e: Vec<BitVector>,
    pub f: Vec<BitVector>,
    pub k1: usize,
    pub k2: usize,
    pub k3: usize,
}

fn rank_of(rows: &[BitVector], n: usize) -> usize {
    BinaryCode::from_rows(n, rows.to_vec())
        .map(|c| c.k())
        .unwrap_or(0)
}

/// Computes the block form and verifies its rank identities.
pub fn structure_split(pi: &BinaryCode, c: usize, f: usize) -> Result<PiStructure, DecompError> {
    check_len(pi, c + f)?;
    if !pi.is_self_dual() {
        return Err(DecompError::PiNotSelfDual);
    }
    let n = c + f;
    let cyc: Vec<usize> = (0..c).collect();
    let fix: Vec<usize> = (c..n).collect();
    let zero_on = |coords: std::ops::Range<usize>| {
        let mut rows = Vec::new();
        for j in 0..n {
            if !coords.contains(&j) {
                let mut v = BitVector::zeros(n);
                v.set(j, true);
                rows.push(v);
            }
        }
        BinaryCode::from_rows(n, rows).unwrap()
    };
    let b_full = pi.intersection(&zero_on(c..n))?.reduced();
    let d_full = pi.intersection(&zero_on(0..c))?.reduced();
    let b = BinaryCode::from_rows(c, b_full.rows().iter().map(|r| r.gather(&cyc)).collect())?;
    let d = BinaryCode::from_rows(f, d_full.rows().iter().map(|r| r.gather(&fix)).collect())?;
    let (k1, k2) = (b.k(), d.k());

    // Complete B + D to a basis of C_pi.
    let mut basis = b_full.sum(&d_full)?;
    let mut e = Vec::new();
    let mut fm = Vec::new();
    for r in pi.reduced().rows() {
        if !basis.contains(r) {
            e.push(r.gather(&cyc));
            fm.push(r.gather(&fix));
            basis = basis.sum(&BinaryCode::from_rows(n, vec![r.clone()])?)?;
        }
    }
    let k3 = e.len();
    if k1 + k2 + k3 != pi.k() {
        return Err(DecompError::Internal(
            "block dimensions do not add up".into(),
        ));
    }
    if rank_of(&e, c) != k3 || rank_of(&fm, f) != k3 {
        return Err(DecompError::Internal(format!(
            "rank E = {}, rank F = {}, k3 = {k3}",
            rank_of(&e, c),
            rank_of(&fm, f)
        )));
    }
    if 2 * k2 + c != 2 * k1 + f {
        return Err(DecompError::Internal(format!(
            "k2 = {k2} but k1 + (f - c)/2 differs (k1 = {k1})"
        )));
    }
    let mut be = b.rows().to_vec();
    be.extend(e.iter().cloned());
    if !BinaryCode::from_rows(c, be)?.dual().same_space(&b) {
        return Err(DecompError::Internal(
            "span(B, E) dual differs from B".into(),
        ));
    }
    let mut df = d.rows().to_vec();
    df.extend(fm.iter().cloned());
    if !BinaryCode::from_rows(f, df)?.dual().same_space(&d) {
        return Err(DecompError::Internal(
            "span(D, F) dual differs from D".into(),
        ));
    }
    Ok(PiStructure {
        b,
        d,
        e,
        f: fm,
        k1,
        k2,
        k3,
    })
}
