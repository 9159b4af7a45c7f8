//! Order-7 pipelines.
//!
//! For `p = 7`, `P = I1 + I2` with both ideals fields of order 8 and
//! `C_phi = M1 + M2`, where `M2` is forced by `M1` through the form. The
//! substitution `x -> x^{-1}` swaps the ideals, so only `dim M1 <= dim M2`
//! is enumerated.

use std::collections::{BTreeMap, HashSet};

use crate::catalog::{self, dataset_from_texts, Completeness, Dataset, DatasetSpec};
use crate::cyclotomic::{form_complement, IdealSystem, ModuleCode, RingElement};
use crate::decomp::AutomorphismSpec;
use crate::gf2core::{BinaryCode, BitVector};

use super::{ClassifyError, Plan, TARGET_WEIGHT};

/// Equivalence used when classifying the component `M1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M1Equivalence {
    /// Column permutations, scaling each column by a unit, and the
    /// Frobenius substitutions `x -> x^2`, `x -> x^4`.
    Monomial,
    /// Additionally identifies `M1` with the image of its forced `M2` under
    /// `x -> x^{-1}`; only meaningful when both have the same dimension.
    MonomialWithSwap,
}

/// `I1` as the field of order 8: code 0 is zero, code `1 + i` is `x^i e1`.
struct F8 {
    elems: [RingElement; 8],
    add: [[u8; 8]; 8],
    mul: [[u8; 8]; 8],
    inv: [u8; 8],
    /// `frob[t][a]` is `a(x^t)` for `t` in {1, 2, 4}.
    frob: [[u8; 8]; 5],
}

impl F8 {
    fn new(sys: &IdealSystem) -> F8 {
        let e1 = sys.idempotent(0);
        let mut elems = [RingElement::zero(7); 8];
        for i in 0..7 {
            elems[1 + i] = e1.shift(i);
        }
        let code = |a: &RingElement| {
            elems
                .iter()
                .position(|e| e == a)
                .expect("closed under field operations") as u8
        };
        let mut add = [[0u8; 8]; 8];
        let mut mul = [[0u8; 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                add[a][b] = code(&elems[a].add(&elems[b]).unwrap());
                mul[a][b] = code(&elems[a].mul(&elems[b]).unwrap());
            }
        }
        let mut inv = [0u8; 8];
        for a in 1..8 {
            inv[a] = (1..8).find(|&b| mul[a][b as usize] == 1).unwrap();
        }
        let mut frob = [[0u8; 8]; 5];
        for t in [1usize, 2, 4] {
            for a in 0..8 {
                frob[t][a] = code(&elems[a].substitute(t).unwrap());
            }
        }
        F8 {
            elems,
            add,
            mul,
            inv,
            frob,
        }
    }

    fn code(&self, a: &RingElement) -> Option<u8> {
        self.elems.iter().position(|e| e == a).map(|i| i as u8)
    }

    /// Reduced row echelon form; returns the rank.
    fn rref(&self, rows: &mut Vec<Vec<u8>>) -> usize {
        let (k, n) = (rows.len(), rows.first().map_or(0, |r| r.len()));
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..k).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(rank, piv);
            let s = self.inv[rows[rank][col] as usize];
            for x in rows[rank].iter_mut() {
                *x = self.mul[*x as usize][s as usize];
            }
            for r in 0..k {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for j in 0..n {
                        let t = self.mul[f as usize][rows[rank][j] as usize];
                        rows[r][j] = self.add[rows[r][j] as usize][t as usize];
                    }
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        rank
    }

    /// Least form of a reduced matrix under column scaling: scanning row by
    /// row, every entry that can still be made `e1` is.
    fn normalize(&self, rows: &[Vec<u8>]) -> Vec<u8> {
        let n = rows.first().map_or(0, |r| r.len());
        let pivots: Vec<usize> = rows
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).unwrap())
            .collect();
        // Column scaling exponents relative to their component root.
        let mut comp: Vec<usize> = (0..n).collect();
        let mut pot = vec![0usize; n];
        let mut out = Vec::with_capacity(rows.len() * n);
        for (i, row) in rows.iter().enumerate() {
            let pc = pivots[i];
            for (j, &a) in row.iter().enumerate() {
                if a == 0 || j == pc {
                    out.push(a);
                    continue;
                }
                let e = (a - 1) as usize;
                if comp[j] != comp[pc] {
                    // Choose the relative scaling so this entry becomes e1.
                    let d = (14 - e - pot[j] + pot[pc]) % 7;
                    let (from, to) = (comp[j], comp[pc]);
                    for x in 0..n {
                        if comp[x] == from {
                            comp[x] = to;
                            pot[x] = (pot[x] + d) % 7;
                        }
                    }
                    out.push(1);
                } else {
                    out.push(1 + ((e + pot[j] + 7 - pot[pc]) % 7) as u8);
                }
            }
        }
        out
    }

    fn transformed(&self, rows: &[Vec<u8>], t: usize, perm: &[usize]) -> Vec<Vec<u8>> {
        rows.iter()
            .map(|r| {
                let mut out = vec![0u8; r.len()];
                for (j, &a) in r.iter().enumerate() {
                    out[perm[j]] = self.frob[t][a as usize];
                }
                out
            })
            .collect()
    }

    /// Every normalized form in the orbit of `rows`.
    fn orbit_forms(&self, rows: &[Vec<u8>], perms: &[Vec<usize>]) -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(perms.len() * 3);
        for t in [1, 2, 4] {
            for perm in perms {
                let mut m = self.transformed(rows, t, perm);
                self.rref(&mut m);
                out.push(self.normalize(&m));
            }
        }
        out
    }

    fn identity_form(&self, rows: &[Vec<u8>]) -> Vec<u8> {
        let mut m = rows.to_vec();
        self.rref(&mut m);
        self.normalize(&m)
    }

    /// Minimum Hamming weight at least 2 and no zero column.
    fn admissible(&self, rows: &[Vec<u8>]) -> bool {
        let n = rows[0].len();
        if (0..n).any(|j| rows.iter().all(|r| r[j] == 0)) {
            return false;
        }
        let k = rows.len();
        let mut coeffs = vec![0u8; k];
        loop {
            let mut i = 0;
            while i < k && coeffs[i] == 7 {
                coeffs[i] = 0;
                i += 1;
            }
            if i == k {
                return true;
            }
            coeffs[i] += 1;
            let mut wt = 0;
            for j in 0..n {
                let mut acc = 0u8;
                for (r, &a) in rows.iter().zip(&coeffs) {
                    acc = self.add[acc as usize][self.mul[a as usize][r[j] as usize] as usize];
                }
                wt += usize::from(acc != 0);
            }
            if wt < 2 {
                return false;
            }
        }
    }

    fn to_module(&self, rows: &[Vec<u8>]) -> ModuleCode {
        let c = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&a| self.elems[a as usize]).collect())
            .collect();
        ModuleCode::new(7, c, rows).expect("well-formed rows")
    }

    fn from_module(&self, m: &ModuleCode) -> Option<Vec<Vec<u8>>> {
        let mut rows: Vec<Vec<u8>> = m
            .rows()
            .iter()
            .map(|r| r.iter().map(|a| self.code(a)).collect::<Option<Vec<u8>>>())
            .collect::<Option<_>>()?;
        self.rref(&mut rows);
        Some(rows)
    }
}

fn all_perms(c: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..c).collect();
    // Heap's algorithm.
    let mut st = vec![0; c];
    out.push(p.clone());
    let mut i = 0;
    while i < c {
        if st[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(st[i], i);
            }
            out.push(p.clone());
            st[i] += 1;
            i = 0;
        } else {
            st[i] = 0;
            i += 1;
        }
    }
    out
}

/// The `I1` rows of `x -> x^{-1}` applied to the forced `M2` of `m1`.
fn swapped(f8: &F8, sys: &IdealSystem, m1: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let m2 = form_complement(&f8.to_module(m1), 1, sys);
    let mut rows: Vec<Vec<u8>> = m2
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|a| f8.code(&a.conjugate()).expect("x -> x^-1 maps I2 onto I1"))
                .collect()
        })
        .collect();
    f8.rref(&mut rows);
    rows
}

struct M1Classifier {
    sys: IdealSystem,
    f8: F8,
    perms: Vec<Vec<usize>>,
    equivalence: M1Equivalence,
}

impl M1Classifier {
    fn new(c: usize, equivalence: M1Equivalence) -> Result<Self, ClassifyError> {
        let sys = IdealSystem::new(7)?;
        let f8 = F8::new(&sys);
        Ok(M1Classifier {
            sys,
            f8,
            perms: all_perms(c),
            equivalence,
        })
    }

    fn forms(&self, rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
        let mut forms = self.f8.orbit_forms(rows, &self.perms);
        if self.equivalence == M1Equivalence::MonomialWithSwap {
            let sw = swapped(&self.f8, &self.sys, rows);
            if sw.len() == rows.len() {
                forms.extend(self.f8.orbit_forms(&sw, &self.perms));
            }
        }
        forms
    }
}

/// Canonical key of an `M1` over `I1` (generator rows in `I1^c`).
pub fn m1_canonical_key(
    m1: &ModuleCode,
    equivalence: M1Equivalence,
) -> Result<Vec<u8>, ClassifyError> {
    let cl = M1Classifier::new(m1.c(), equivalence)?;
    let rows = cl
        .f8
        .from_module(m1)
        .ok_or_else(|| ClassifyError::Candidate {
            id: 0,
            msg: "M1 has an entry outside I1".into(),
        })?;
    Ok(cl.forms(&rows).into_iter().min().unwrap_or_default())
}

/// Inequivalent admissible `M1` of dimension `dims.0` in `I1^c` with
/// `c = dims.0 + dims.1`, in order of their canonical keys.
///
/// Candidates are `(I | A)` with the first row and first column of `A` in
/// `{0, e1}`. Admissible means minimum weight at least 2, no zero column (a
/// zero column would put a weight-one vector in `M2`), and a binary image of
/// `M1 + M2` with minimum weight at least 8. The last condition removes
/// classes where `M1` and `M2` both have weight-2 vectors on the same pair
/// of cycles.
pub fn enumerate_m1_cases(
    dims: (usize, usize),
    equivalence: M1Equivalence,
) -> Result<Vec<ModuleCode>, ClassifyError> {
    let (k, rest) = dims;
    let c = k + rest;
    if k == 0 || k > rest || c > 8 {
        return Err(ClassifyError::UnsupportedDims(dims));
    }
    let cl = M1Classifier::new(c, equivalence)?;
    // Free positions of A and their alphabets.
    let mut slots: Vec<(usize, usize, u8)> = Vec::new();
    for i in 0..k {
        for j in 0..rest {
            let restricted = i == 0 || j == 0;
            slots.push((i, k + j, if restricted { 2 } else { 8 }));
        }
    }
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut classes: BTreeMap<Vec<u8>, Vec<Vec<u8>>> = BTreeMap::new();
    let mut digits = vec![0u8; slots.len()];
    let mut examined = 0u64;
    loop {
        let mut rows = vec![vec![0u8; c]; k];
        for i in 0..k {
            rows[i][i] = 1;
        }
        for (&(i, j, _), &d) in slots.iter().zip(&digits) {
            rows[i][j] = d;
        }
        examined += 1;
        let form = cl.f8.identity_form(&rows);
        if !seen.contains(&form) && cl.f8.admissible(&rows) {
            let forms = cl.forms(&rows);
            let key = forms.iter().min().unwrap().clone();
            seen.extend(forms);
            let rows: Vec<Vec<u8>> = key.chunks(c).map(|r| r.to_vec()).collect();
            if image_weight_ok(&cl.f8.to_module(&rows))? {
                classes.insert(key, rows);
            }
        }
        // Next candidate, mixed radix.
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < slots[i].2 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            break;
        }
    }
    log::info!(
        "M1 dims {dims:?}: {examined} candidates, {} classes",
        classes.len()
    );
    Ok(classes.values().map(|rows| cl.f8.to_module(rows)).collect())
}

fn image_weight_ok(m1: &ModuleCode) -> Result<bool, ClassifyError> {
    let image = phi_from_m1(m1)?.binary_image();
    Ok(image
        .min_weight(Some(TARGET_WEIGHT))?
        .is_none_or(|m| m.weight >= TARGET_WEIGHT))
}

/// `C_phi = M1 + M2` with `M2` the form complement of `M1` in `I2^c`.
pub fn phi_from_m1(m1: &ModuleCode) -> Result<ModuleCode, ClassifyError> {
    let sys = IdealSystem::new(7)?;
    let m2 = form_complement(m1, 1, &sys);
    Ok(m1.direct_sum(&m2)?)
}

fn named_binary(name: &str) -> Result<BinaryCode, ClassifyError> {
    Ok(catalog::binary(name)?)
}

/// The plan for type 7-(6,2): cases I-III of `dim M1`, each against both
/// self-dual `[8,4]` codes with the fixed points as the last two
/// coordinates.
pub fn order7_two_fixed_plan(max_degree: usize) -> Result<Plan, ClassifyError> {
    let spec = AutomorphismSpec::new(7, 6, 2)?;
    let mut plan = Plan::new(spec);
    let pis = [("E8", named_binary("E8")?), ("C2^4", named_binary("C2_4")?)];
    for (case, dims, eq) in [
        ("I", (1, 5), M1Equivalence::Monomial),
        ("II", (2, 4), M1Equivalence::Monomial),
        ("III", (3, 3), M1Equivalence::MonomialWithSwap),
    ] {
        let m1s = enumerate_m1_cases(dims, eq)?;
        for (mi, m1) in m1s.iter().enumerate() {
            let phi = phi_from_m1(m1)?;
            let idx = plan.add_phi(phi);
            for (name, pi) in &pis {
                let group = format!("case {case}, C_pi={name}");
                let label = format!("case {case}, M1 #{}, C_pi={name}", mi + 1);
                plan.push_double_cosets(&group, &label, pi, idx, max_degree)?;
            }
        }
    }
    Ok(plan)
}

/// `C_phi` for type 7-(3,23): `M1 = <(e1,e1,e1)>` plus its complement.
pub fn three_cycle_phi() -> Result<ModuleCode, ClassifyError> {
    let sys = IdealSystem::new(7)?;
    let m1 = ModuleCode::new(7, 3, vec![vec![sys.idempotent(0); 3]])?;
    phi_from_m1(&m1)
}

/// The plan for type 7-(3,23). `C_pi` has the block form `[0 D; I3 F]`
/// where `D` runs over the dataset and the rows of `F` run over the cosets
/// of `D` in its dual with `F_i . F_j = delta_ij`.
pub fn order7_three_cycle_plan(dataset: &Dataset) -> Result<Plan, ClassifyError> {
    let spec = AutomorphismSpec::new(7, 3, 23)?;
    let mut plan = Plan::new(spec);
    for e in &dataset.entries {
        plan.inputs
            .push((format!("{}/{}", dataset.name, e.name), e.checksum.clone()));
    }
    let phi = plan.add_phi(three_cycle_phi()?);
    for entry in &dataset.entries {
        let d = &entry.code;
        if d.n() != 23 {
            return Err(ClassifyError::Candidate {
                id: 0,
                msg: format!("{}: length {} instead of 23", entry.name, d.n()),
            });
        }
        // Coset representatives of D in its dual.
        let mut span = d.clone();
        let mut q: Vec<BitVector> = Vec::new();
        for r in d.dual().rows() {
            if !span.contains(r) {
                q.push(r.clone());
                span = span.sum(&BinaryCode::from_rows(23, vec![r.clone()])?)?;
            }
        }
        let reps: Vec<BitVector> = (1u32..1 << q.len())
            .map(|mask| {
                let mut v = BitVector::zeros(23);
                for (i, qi) in q.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v.xor_assign(qi);
                    }
                }
                v
            })
            .filter(|v| v.weight() % 2 == 1)
            .collect();
        let group = format!("D={}", entry.name);
        for a in &reps {
            for b in &reps {
                for c in &reps {
                    if a.dot(b) || a.dot(c) || b.dot(c) {
                        continue;
                    }
                    let mut rows: Vec<BitVector> = d
                        .rows()
                        .iter()
                        .map(|r| BitVector::zeros(3).concat(r))
                        .collect();
                    for (i, fi) in [a, b, c].into_iter().enumerate() {
                        let mut e = BitVector::zeros(3);
                        e.set(i, true);
                        rows.push(e.concat(fi));
                    }
                    let pi = BinaryCode::from_rows(26, rows)?;
                    plan.push(
                        &group,
                        format!("D={}, F=({a} | {b} | {c})", entry.name),
                        pi,
                        phi,
                    );
                }
            }
        }
    }
    Ok(plan)
}

/// The binary Golay code of length 23, generated by
/// `1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11`.
pub fn golay23() -> BinaryCode {
    let g = [0usize, 2, 4, 5, 6, 10, 11];
    let rows = (0..12)
        .map(|s| {
            let mut v = BitVector::zeros(23);
            for &e in &g {
                v.set(e + s, true);
            }
            v
        })
        .collect();
    BinaryCode::from_rows(23, rows).unwrap()
}

/// The `[23,10,8]` self-orthogonal codes obtained as hyperplanes of the
/// even Golay subcode, one per weight of coset leader (1, 2 and 3), as a
/// validated dataset named `so_23_10_8`.
pub fn golay_so23_dataset() -> Result<Dataset, ClassifyError> {
    let golay = golay23();
    let evens: Vec<BitVector> = {
        let all_even = BinaryCode::from_rows(
            23,
            (0..22)
                .map(|i| {
                    let mut v = BitVector::zeros(23);
                    v.set(i, true);
                    v.set(i + 1, true);
                    v
                })
                .collect(),
        )?;
        golay.intersection(&all_even)?.reduced().rows().to_vec()
    };
    let even = BinaryCode::from_rows(23, evens)?;
    let mut members = Vec::new();
    for w in 1..=3 {
        let mut v = BitVector::zeros(23);
        for i in 0..w {
            v.set(i, true);
        }
        let perp = BinaryCode::from_rows(23, vec![v])?.dual();
        let h = even.intersection(&perp)?.reduced();
        members.push((format!("golay_hyperplane_leader{w}"), h.to_text()));
    }
    let spec = catalog::external_spec("so_23_10_8").unwrap_or(DatasetSpec {
        name: "so_23_10_8".into(),
        description: String::new(),
        n: 23,
        k: 10,
        min_weight: Some(8),
        self_orthogonal: true,
        count: Some(3),
        completeness: Completeness::Complete,
    });
    Ok(dataset_from_texts(&spec, members, Vec::new())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_tables_are_consistent() {
        let sys = IdealSystem::new(7).unwrap();
        let f = F8::new(&sys);
        for a in 1..8 {
            assert_eq!(f.mul[a][f.inv[a] as usize], 1);
            assert_eq!(f.add[a][a], 0);
        }
        // x e1 generates the multiplicative group.
        let mut x = 1u8;
        for _ in 0..7 {
            x = f.mul[x as usize][2];
        }
        assert_eq!(x, 1);
    }

    #[test]
    fn normalization_is_scaling_invariant() {
        let sys = IdealSystem::new(7).unwrap();
        let f = F8::new(&sys);
        let rows = vec![vec![1, 0, 3, 5, 0, 2], vec![0, 1, 0, 7, 4, 6]];
        let base = f.identity_form(&rows);
        for s in 0..7u8 {
            for col in 0..6 {
                let scaled: Vec<Vec<u8>> = rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .map(|(j, &a)| {
                                if j == col {
                                    f.mul[a as usize][1 + s as usize]
                                } else {
                                    a
                                }
                            })
                            .collect()
                    })
                    .collect();
                assert_eq!(f.identity_form(&scaled), base);
            }
        }
    }

    #[test]
    fn case_one_is_unique() {
        let m = enumerate_m1_cases((1, 5), M1Equivalence::Monomial).unwrap();
        assert_eq!(m.len(), 1);
        let sys = IdealSystem::new(7).unwrap();
        assert!(m[0].same_module(&ModuleCode::new(7, 6, vec![vec![sys.idempotent(0); 6]]).unwrap()));
    }

    #[test]
    fn golay_hyperplanes() {
        let g = golay23();
        assert_eq!(
            (g.k(), g.min_weight(None).unwrap().unwrap().weight),
            (12, 7)
        );
        let ds = golay_so23_dataset().unwrap();
        assert_eq!(ds.entries.len(), 3);
    }

    #[test]
    fn three_cycle_phi_matches_catalog() {
        let phi = three_cycle_phi().unwrap();
        let m1 = catalog::module("M1_7_3_23").unwrap();
        let m2 = catalog::module("M2_7_3_23").unwrap();
        assert!(phi.same_module(&m1.direct_sum(&m2).unwrap()));
    }
}
