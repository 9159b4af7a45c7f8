//! The groups `L` and `S` acting on cycle coordinates.
//!
//! `L` is the permutation part of the transformations of `C_phi` built from
//! a permutation of the cycles, a substitution `x -> x^t` and a cyclic shift
//! on each cycle. `S` is the part of `Aut(C_pi)` that keeps the fixed points
//! fixed as a set, restricted to the cycle coordinates.

use std::collections::HashMap;

use crate::cyclotomic::{ModuleCode, RingElement, RingError};
use crate::equiv::canonical_form_colored;
use crate::gf2core::{rref_u128, BinaryCode};
use crate::perm::{PermGroup, Permutation};

use super::ClassifyError;

/// Cycle `j` moves to `perm(j)`; its polynomial `u(x)` becomes
/// `x^shifts[j] * u(x^t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTransform {
    pub t: usize,
    pub perm: Permutation,
    pub shifts: Vec<usize>,
}

impl CycleTransform {
    /// The same map on the `p*c` binary coordinates.
    pub fn coordinate_map(&self, p: usize) -> Vec<usize> {
        let c = self.shifts.len();
        let mut images = vec![0; p * c];
        for j in 0..c {
            for r in 0..p {
                images[p * j + r] = p * self.perm.apply(j) + (self.t * r + self.shifts[j]) % p;
            }
        }
        images
    }

    pub fn apply(&self, m: &ModuleCode) -> Result<ModuleCode, RingError> {
        let c = m.c();
        let rows = m
            .rows()
            .iter()
            .map(|row| {
                let mut out = vec![RingElement::zero(m.p()); c];
                for (j, a) in row.iter().enumerate() {
                    out[self.perm.apply(j)] = a.substitute(self.t)?.shift(self.shifts[j]);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, RingError>>()?;
        ModuleCode::new(m.p(), c, rows)
    }
}

/// `L` and `S` for one `(C_pi, C_phi)` pair.
#[derive(Debug, Clone)]
pub struct TransformGroup {
    pub degree: usize,
    pub l: PermGroup,
    pub s: PermGroup,
}

impl TransformGroup {
    pub fn new(pi: &BinaryCode, phi: &ModuleCode, f: usize) -> Result<Self, ClassifyError> {
        let c = phi.c();
        Ok(TransformGroup {
            degree: c,
            l: compute_l(phi)?,
            s: compute_s(pi, c, f)?,
        })
    }
}

struct Search {
    p: usize,
    c: usize,
    rows: Vec<u128>,
    /// Per-cycle weights of every codeword, with multiplicities. Empty when
    /// the code is too large to list.
    patterns: Vec<(Vec<u8>, u32)>,
    nodes: u64,
}

/// Largest binary dimension for which all codewords are listed.
const PATTERN_DIM_LIMIT: usize = 22;

fn block(r: u128, j: usize, p: usize) -> u128 {
    (r >> (p * j)) & ((1u128 << p) - 1)
}

fn transform_block(bits: u128, t: usize, s: usize, p: usize) -> u128 {
    let mut out = 0u128;
    let mut b = bits;
    while b != 0 {
        let r = b.trailing_zeros() as usize;
        b &= b - 1;
        out |= 1u128 << ((t * r + s) % p);
    }
    out
}

/// Substitutions and shifts keep the weight on each cycle, so a symmetry
/// must permute these patterns.
fn weight_patterns(rows: &[u128], p: usize, c: usize) -> Vec<(Vec<u8>, u32)> {
    if rows.len() > PATTERN_DIM_LIMIT {
        return Vec::new();
    }
    let mut counts: HashMap<Vec<u8>, u32> = HashMap::new();
    let mut word = 0u128;
    let mut pattern = vec![0u8; c];
    for i in 0..1u64 << rows.len() {
        if i > 0 {
            word ^= rows[i.trailing_zeros() as usize];
        }
        for (j, w) in pattern.iter_mut().enumerate() {
            *w = block(word, j, p).count_ones() as u8;
        }
        *counts.entry(pattern.clone()).or_default() += 1;
    }
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_unstable();
    out
}

impl Search {
    /// Whether the partial map (source cycle `k` goes to `assign[k]`) agrees
    /// with the code on the assigned cycles: both the projection onto them
    /// and the subcode supported inside them must correspond.
    fn consistent(&mut self, t: usize, assign: &[(usize, usize)]) -> bool {
        self.nodes += 1;
        let (p, c) = (self.p, self.c);
        let mut targets: Vec<usize> = assign.iter().map(|a| a.0).collect();
        targets.sort_unstable();
        let slot = |tb: usize| targets.binary_search(&tb).unwrap();
        let free_targets: Vec<usize> = (0..c)
            .filter(|x| targets.binary_search(x).is_err())
            .collect();
        // Unassigned cycles go in the low bits so elimination clears them
        // first; rows left with no low bits span the shortened code.
        let boundary = p * (c - assign.len());
        let mut a: Vec<u128> = Vec::with_capacity(self.rows.len());
        let mut b: Vec<u128> = Vec::with_capacity(self.rows.len());
        for &r in &self.rows {
            let mut va = 0u128;
            for (i, &tb) in free_targets.iter().enumerate() {
                va |= block(r, tb, p) << (p * i);
            }
            for (i, &tb) in targets.iter().enumerate() {
                va |= block(r, tb, p) << (boundary + p * i);
            }
            let mut vb = 0u128;
            for (i, k) in (assign.len()..c).enumerate() {
                vb |= block(r, k, p) << (p * i);
            }
            for (k, &(tb, s)) in assign.iter().enumerate() {
                vb |= transform_block(block(r, k, p), t, s, p) << (boundary + p * slot(tb));
            }
            a.push(va);
            b.push(vb);
        }
        let mut pa: Vec<u128> = a.iter().map(|v| v >> boundary).collect();
        let mut pb: Vec<u128> = b.iter().map(|v| v >> boundary).collect();
        let width = p * assign.len();
        let ra = rref_u128(&mut pa, width);
        let rb = rref_u128(&mut pb, width);
        if ra != rb || pa[..ra] != pb[..rb] {
            return false;
        }
        let ra = rref_u128(&mut a, p * c);
        let rb = rref_u128(&mut b, p * c);
        let low = (1u128 << boundary) - 1;
        let short_a = a[..ra].iter().filter(|&&v| v & low == 0);
        let short_b = b[..rb].iter().filter(|&&v| v & low == 0);
        short_a.eq(short_b)
    }

    /// Whether sending source cycle `k` to `images[k]` maps the weight
    /// patterns restricted to the assigned cycles onto themselves.
    fn patterns_match(&mut self, images: &[usize]) -> bool {
        self.nodes += 1;
        if self.patterns.is_empty() {
            return true;
        }
        let mut src: HashMap<Vec<u8>, u32> = HashMap::new();
        let mut dst: HashMap<Vec<u8>, u32> = HashMap::new();
        for (pattern, n) in &self.patterns {
            *src.entry(pattern[..images.len()].to_vec()).or_default() += n;
            *dst.entry(images.iter().map(|&tb| pattern[tb]).collect())
                .or_default() += n;
        }
        src == dst
    }

    /// Shifts for the cycle permutation `images` and substitution `t`. The
    /// first shift can be taken as 0 because `x * phi = phi`.
    fn shifts(&mut self, t: usize, images: &[usize], assign: &mut Vec<(usize, usize)>) -> bool {
        let k = assign.len();
        if k == self.c {
            return true;
        }
        let choices = if k == 0 { 1 } else { self.p };
        for s in 0..choices {
            assign.push((images[k], s));
            if self.consistent(t, assign) && self.shifts(t, images, assign) {
                return true;
            }
            assign.pop();
        }
        false
    }

    fn lift(&mut self, images: &[usize]) -> Option<CycleTransform> {
        for t in 1..self.p {
            let mut assign = Vec::with_capacity(self.c);
            if self.shifts(t, images, &mut assign) {
                return Some(CycleTransform {
                    t,
                    perm: Permutation::from_images(images.to_vec())
                        .expect("images form a bijection"),
                    shifts: assign.iter().map(|a| a.1).collect(),
                });
            }
        }
        None
    }

    fn extend(&mut self, images: &mut Vec<usize>, used: &mut [bool]) -> Option<CycleTransform> {
        if images.len() == self.c {
            return self.lift(images);
        }
        for tb in 0..self.c {
            if used[tb] {
                continue;
            }
            images.push(tb);
            if self.patterns_match(images) {
                used[tb] = true;
                if let Some(g) = self.extend(images, used) {
                    return Some(g);
                }
                used[tb] = false;
            }
            images.pop();
        }
        None
    }

    /// A symmetry fixing cycles `0..fixed` and sending cycle `fixed` to
    /// `target`.
    fn find(&mut self, fixed: usize, target: usize) -> Option<CycleTransform> {
        let mut images: Vec<usize> = (0..fixed).collect();
        images.push(target);
        if !self.patterns_match(&images) {
            return None;
        }
        let mut used = vec![false; self.c];
        for &x in &images {
            used[x] = true;
        }
        self.extend(&mut images, &mut used)
    }
}

/// Symmetries of `phi` whose cycle permutations generate `L`.
///
/// A stabilizer-chain search over the cycles: level `b` looks for elements
/// fixing cycles `0..b` and moving cycle `b` to each point outside the orbit
/// already generated. Permutations are pruned by per-cycle weight patterns;
/// substitution and shifts are solved only for complete permutations.
pub fn module_symmetries(phi: &ModuleCode) -> Result<Vec<CycleTransform>, ClassifyError> {
    let (p, c) = (phi.p(), phi.c());
    if p * c > 128 {
        return Err(ClassifyError::Gf2(crate::gf2core::Error::LengthTooLarge(
            p * c,
        )));
    }
    let rows = phi.binary_image().rows_u128()?;
    let mut search = Search {
        p,
        c,
        patterns: weight_patterns(&rows, p, c),
        rows,
        nodes: 0,
    };
    let mut gens: Vec<CycleTransform> = Vec::new();
    for b in (0..c).rev() {
        let orbit = |gens: &[CycleTransform]| -> Vec<bool> {
            let local: Vec<&CycleTransform> = gens
                .iter()
                .filter(|g| (0..b).all(|k| g.perm.apply(k) == k))
                .collect();
            let mut seen = vec![false; c];
            seen[b] = true;
            let mut stack = vec![b];
            while let Some(x) = stack.pop() {
                for g in &local {
                    let y = g.perm.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            seen
        };
        let mut seen = orbit(&gens);
        for j in b + 1..c {
            if seen[j] {
                continue;
            }
            if let Some(g) = search.find(b, j) {
                gens.push(g);
                seen = orbit(&gens);
            }
        }
    }
    log::debug!(
        "symmetry search: {} nodes, {} generators",
        search.nodes,
        gens.len()
    );
    for g in &gens {
        debug_assert!(g.apply(phi).map(|m| m.same_module(phi)).unwrap_or(false));
    }
    Ok(gens)
}

/// The group `L` of cycle permutations that extend to a symmetry of `phi`.
pub fn compute_l(phi: &ModuleCode) -> Result<PermGroup, ClassifyError> {
    let gens = module_symmetries(phi)?;
    Ok(PermGroup::new(
        phi.c(),
        gens.into_iter().map(|g| g.perm).collect(),
    ))
}

/// The group `S`: automorphisms of `pi` that map the last `f` coordinates
/// among themselves, restricted to the first `c`.
pub fn compute_s(pi: &BinaryCode, c: usize, f: usize) -> Result<PermGroup, ClassifyError> {
    if pi.n() != c + f {
        return Err(ClassifyError::Decomp(crate::decomp::DecompError::Length {
            expected: c + f,
            found: pi.n(),
        }));
    }
    if c == 0 {
        return Ok(PermGroup::trivial(0));
    }
    let colors: Vec<u32> = (0..c + f).map(|i| u32::from(i >= c)).collect();
    let canon = canonical_form_colored(pi, &colors)?;
    let gens = canon
        .aut
        .generators
        .iter()
        .map(|g| {
            g.restrict(c)
                .expect("colour-preserving automorphisms keep the cycle coordinates")
        })
        .collect();
    Ok(PermGroup::new(c, gens))
}
