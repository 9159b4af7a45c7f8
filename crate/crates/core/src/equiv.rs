//! Permutation equivalence of binary codes.
//!
//! The canonical form is found by an individualization-refinement search in
//! the style of nauty. Coordinates are refined against a block structure made
//! of low-weight codewords (of the code or its dual, whichever is smaller),
//! and every leaf of the search is scored by its refinement trace followed by
//! the RREF of the relabeled generator matrix. The smallest score wins. Two
//! leaves with equal scores differ by a genuine code automorphism, which is
//! used for orbit pruning and to compute the exact group order.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gf2core::{
    check_permutation, permute_u128, rref_u128, BinaryCode, Error as Gf2Error, WeightDistribution,
    DEFAULT_SWEEP_LIMIT,
};
use crate::perm::Permutation;

/// Upper bound on the number of blocks collected from extra weight classes.
const BLOCK_BUDGET: usize = 6000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("length {0} exceeds the supported maximum of 128")]
    TooLong(usize),
    #[error("brute-force oracle supports length at most {max}, got {n}")]
    OracleCap { n: usize, max: usize },
    #[error("colour vector has length {found}, code has length {expected}")]
    ColorLength { expected: usize, found: usize },
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Canonical serialization of a code's equivalence class.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    bytes: Vec<u8>,
}

impl CanonicalKey {
    fn from_rows(n: usize, rows: &[u128]) -> Self {
        let row_bytes = n.div_ceil(8);
        let mut bytes = Vec::with_capacity(4 + rows.len() * row_bytes);
        bytes.extend_from_slice(&(n as u16).to_be_bytes());
        bytes.extend_from_slice(&(rows.len() as u16).to_be_bytes());
        for &r in rows {
            for b in 0..row_bytes {
                let mut byte = 0u8;
                for bit in 0..8 {
                    let i = b * 8 + bit;
                    if i < n && (r >> i) & 1 == 1 {
                        byte |= 0x80 >> bit;
                    }
                }
                bytes.push(byte);
            }
        }
        CanonicalKey { bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Rebuilds a key from [`CanonicalKey::bytes`]; `None` if the length
    /// does not match the header.
    pub fn from_bytes(bytes: Vec<u8>) -> Option<Self> {
        if bytes.len() < 4 {
            return None;
        }
        let n = u16::from_be_bytes([bytes[0], bytes[1]]) as usize;
        let k = u16::from_be_bytes([bytes[2], bytes[3]]) as usize;
        (n <= 128 && bytes.len() == 4 + k * n.div_ceil(8)).then_some(CanonicalKey { bytes })
    }

    /// SHA-256 of the key bytes, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }

    /// The canonical code itself.
    pub fn to_code(&self) -> BinaryCode {
        let n = u16::from_be_bytes([self.bytes[0], self.bytes[1]]) as usize;
        let k = u16::from_be_bytes([self.bytes[2], self.bytes[3]]) as usize;
        let row_bytes = n.div_ceil(8);
        let rows: Vec<u128> = (0..k)
            .map(|r| {
                let chunk = &self.bytes[4 + r * row_bytes..4 + (r + 1) * row_bytes];
                let mut w = 0u128;
                for i in 0..n {
                    if chunk[i / 8] & (0x80 >> (i % 8)) != 0 {
                        w |= 1 << i;
                    }
                }
                w
            })
            .collect();
        BinaryCode::from_u128_rows(n, &rows)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", &self.digest()[..16])
    }
}

/// Exact automorphism group order with generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutGroupInfo {
    pub order: BigUint,
    pub generators: Vec<Permutation>,
}

/// Result of a canonical labeling search.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub key: CanonicalKey,
    /// Moves coordinate `i` to `labeling[i]`; applying it yields the key code.
    pub labeling: Permutation,
    pub aut: AutGroupInfo,
}

/// Cheap equivalence invariants used to reject pairs before searching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invariants {
    pub n: usize,
    pub k: usize,
    pub weights: WeightDistribution,
    /// Sorted per-coordinate counts of minimum-weight words through it.
    pub coordinate_counts: Vec<u64>,
}

pub fn invariants(code: &BinaryCode) -> Result<Invariants, EquivError> {
    let weights = code.weight_distribution()?;
    let mut coordinate_counts = vec![0u64; code.n()];
    if let Some(d) = weights.min_nonzero_weight() {
        for w in code.words_up_to(d, DEFAULT_SWEEP_LIMIT)? {
            let mut rest = w;
            while rest != 0 {
                coordinate_counts[rest.trailing_zeros() as usize] += 1;
                rest &= rest - 1;
            }
        }
    }
    coordinate_counts.sort_unstable();
    Ok(Invariants {
        n: code.n(),
        k: code.k(),
        weights,
        coordinate_counts,
    })
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Points versus low-weight codeword blocks.
struct Structure {
    n: usize,
    blocks: Vec<Vec<u8>>,
    block_seed: Vec<u64>,
    point_blocks: Vec<Vec<u32>>,
}

impl Structure {
    fn build(code: &BinaryCode) -> Result<Structure, EquivError> {
        let n = code.n();
        let source = if code.k() <= n - code.k() {
            code.clone()
        } else {
            code.dual()
        };
        let mut words: Vec<u128> = Vec::new();
        if source.k() > 0 {
            let all = source.words_up_to(n, DEFAULT_SWEEP_LIMIT.max(source.k().min(26)))?;
            let mut by_weight: Vec<Vec<u128>> = vec![Vec::new(); n + 1];
            for w in all {
                by_weight[w.count_ones() as usize].push(w);
            }
            let mut basis: Vec<u128> = Vec::new();
            for class in by_weight.into_iter().skip(1) {
                if class.is_empty() {
                    continue;
                }
                if !words.is_empty()
                    && (basis.len() == source.k() || words.len() + class.len() > BLOCK_BUDGET)
                {
                    break;
                }
                for &w in &class {
                    let mut v = w;
                    for &b in &basis {
                        if v & (1u128 << b.trailing_zeros()) != 0 {
                            v ^= b;
                        }
                    }
                    if v != 0 {
                        let lead = 1u128 << v.trailing_zeros();
                        for b in basis.iter_mut() {
                            if *b & lead != 0 {
                                *b ^= v;
                            }
                        }
                        basis.push(v);
                    }
                }
                words.extend(class);
            }
        }
        let mut blocks = Vec::with_capacity(words.len());
        let mut block_seed = Vec::with_capacity(words.len());
        let mut point_blocks = vec![Vec::new(); n];
        for (bi, &w) in words.iter().enumerate() {
            let mut pts = Vec::with_capacity(w.count_ones() as usize);
            let mut rest = w;
            while rest != 0 {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                pts.push(p as u8);
                point_blocks[p].push(bi as u32);
            }
            block_seed.push(mix(pts.len() as u64 ^ 0x5151));
            blocks.push(pts);
        }
        Ok(Structure {
            n,
            blocks,
            block_seed,
            point_blocks,
        })
    }
}

/// Ordered partition of the points.
#[derive(Clone)]
struct Partition {
    order: Vec<usize>,
    /// Start index of the cell holding each point.
    cell_of: Vec<usize>,
    /// For a cell start index, the exclusive end index.
    cell_end: Vec<usize>,
    cells: usize,
}

impl Partition {
    /// Cells ordered by colour value.
    fn from_colors(colors: &[u32]) -> Self {
        let n = colors.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (colors[p], p));
        let mut part = Partition {
            order,
            cell_of: vec![0; n],
            cell_end: vec![0; n],
            cells: 0,
        };
        let mut start = 0;
        for i in 1..=n {
            if i == n || colors[part.order[i]] != colors[part.order[start]] {
                part.cell_end[start] = i;
                for j in start..i {
                    let p = part.order[j];
                    part.cell_of[p] = start;
                }
                part.cells += 1;
                start = i;
            }
        }
        part
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.order.len()
    }

    fn first_nonsingleton(&self) -> Option<usize> {
        let mut s = 0;
        while s < self.order.len() {
            let e = self.cell_end[s];
            if e - s > 1 {
                return Some(s);
            }
            s = e;
        }
        None
    }

    /// Splits `v` off as a singleton at the front of its cell.
    fn individualize(&mut self, v: usize) {
        let s = self.cell_of[v];
        let e = self.cell_end[s];
        let pos = self.order[s..e].iter().position(|&x| x == v).unwrap() + s;
        self.order[s..=pos].rotate_right(1);
        self.cell_end[s] = s + 1;
        self.cell_end[s + 1] = e;
        for &x in &self.order[s + 1..e] {
            self.cell_of[x] = s + 1;
        }
        self.cells += 1;
    }

    /// Position of every point (the labeling at a discrete leaf).
    fn labeling(&self) -> Vec<usize> {
        let mut lab = vec![0; self.order.len()];
        for (pos, &p) in self.order.iter().enumerate() {
            lab[p] = pos;
        }
        lab
    }
}

/// Colour refinement of points against blocks until stable. Returns a
/// label-invariant hash of everything that happened.
fn refine(st: &Structure, part: &mut Partition, bsig: &mut [u64], psig: &mut [u64]) -> u64 {
    let n = st.n;
    let mut trace = mix(part.cells as u64);
    let mut round = 0u64;
    loop {
        for (b, pts) in st.blocks.iter().enumerate() {
            let mut h = st.block_seed[b];
            for &p in pts {
                h = h.wrapping_add(mix(part.cell_of[p as usize] as u64 + 1));
            }
            bsig[b] = mix(h);
        }
        for p in 0..n {
            let mut h = 0u64;
            for &b in &st.point_blocks[p] {
                h = h.wrapping_add(bsig[b as usize]);
            }
            psig[p] = mix(h ^ (st.point_blocks[p].len() as u64).rotate_left(40));
        }
        let before = part.cells;
        let mut s = 0;
        while s < n {
            let e = part.cell_end[s];
            if e - s > 1 {
                let cell = &mut part.order[s..e];
                cell.sort_unstable_by_key(|&p| (psig[p], p));
                let mut start = s;
                for i in s + 1..=e {
                    if i == e || psig[part.order[i]] != psig[part.order[start]] {
                        part.cell_end[start] = i;
                        for &x in &part.order[start..i] {
                            part.cell_of[x] = start;
                        }
                        if start != s || i != e {
                            trace = mix(trace
                                ^ mix(round ^ ((start as u64) << 8) ^ ((i as u64) << 24))
                                ^ psig[part.order[start]]);
                        }
                        if i > start && start != s {
                            part.cells += 1;
                        }
                        start = i;
                    }
                }
            }
            s = e;
        }
        round += 1;
        if part.cells == before {
            break;
        }
    }
    mix(trace ^ part.cells as u64)
}

struct Leaf {
    trace: Vec<u64>,
    cert: Vec<u128>,
    labeling: Vec<usize>,
    path: Vec<usize>,
}

struct Search<'a> {
    st: &'a Structure,
    rows: Vec<u128>,
    n: usize,
    first: Option<Leaf>,
    best: Option<Leaf>,
    gens: Vec<Vec<usize>>,
    orbit_sizes: Vec<usize>,
    bsig: Vec<u64>,
    psig: Vec<u64>,
    nodes: u64,
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn compare_prefix(trace: &[u64], best: &[u64]) -> Ordering {
    if best.len() >= trace.len() {
        trace.cmp(&best[..trace.len()])
    } else {
        match trace[..best.len()].cmp(best) {
            Ordering::Equal => Ordering::Greater,
            o => o,
        }
    }
}

/// Union-find orbits of the generators that fix every point of `prefix`.
fn orbits_fixing(gens: &[Vec<usize>], prefix: &[usize], n: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        if prefix.iter().any(|&v| g[v] != v) {
            continue;
        }
        for (i, &gi) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, gi));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

impl<'a> Search<'a> {
    fn cert(&self, labeling: &[usize]) -> Vec<u128> {
        let mut rows: Vec<u128> = self
            .rows
            .iter()
            .map(|&r| permute_u128(r, labeling))
            .collect();
        let rank = rref_u128(&mut rows, self.n);
        rows.truncate(rank);
        rows
    }

    fn record_automorphism(&mut self, from: &[usize], to: &[usize]) {
        // from, to: point -> position at two leaves with equal certificates
        let mut inv_to = vec![0; self.n];
        for (p, &pos) in to.iter().enumerate() {
            inv_to[pos] = p;
        }
        let g: Vec<usize> = from.iter().map(|&pos| inv_to[pos]).collect();
        debug_assert!({
            let mut img: Vec<u128> = self.rows.iter().map(|&r| permute_u128(r, &g)).collect();
            let mut orig = self.rows.clone();
            let r1 = rref_u128(&mut img, self.n);
            let r2 = rref_u128(&mut orig, self.n);
            img[..r1] == orig[..r2]
        });
        if g.iter().enumerate().any(|(i, &x)| i != x) {
            self.gens.push(g);
        }
    }

    fn leaf(&mut self, part: &Partition, trace: Vec<u64>, path: Vec<usize>) -> Option<usize> {
        let labeling = part.labeling();
        let cert = self.cert(&labeling);
        let Some(first) = &self.first else {
            let leaf = Leaf {
                trace: trace.clone(),
                cert: cert.clone(),
                labeling: labeling.clone(),
                path: path.clone(),
            };
            self.first = Some(leaf);
            self.best = Some(Leaf {
                trace,
                cert,
                labeling,
                path,
            });
            return None;
        };
        if first.trace == trace && first.cert == cert {
            let from = first.labeling.clone();
            let depth = common_prefix(&first.path, &path);
            self.record_automorphism(&from, &labeling);
            return Some(depth);
        }
        let best = self.best.as_ref().unwrap();
        match (trace.as_slice(), &cert).cmp(&(best.trace.as_slice(), &best.cert)) {
            Ordering::Equal => {
                let from = best.labeling.clone();
                let depth = common_prefix(&best.path, &path);
                self.record_automorphism(&from, &labeling);
                Some(depth)
            }
            Ordering::Less => {
                self.best = Some(Leaf {
                    trace,
                    cert,
                    labeling,
                    path,
                });
                None
            }
            Ordering::Greater => None,
        }
    }

    fn worth_exploring(&self, trace: &[u64]) -> bool {
        let Some(first) = &self.first else {
            return true;
        };
        if first.trace.len() >= trace.len() && first.trace[..trace.len()] == *trace {
            return true;
        }
        compare_prefix(trace, &self.best.as_ref().unwrap().trace) != Ordering::Greater
    }

    fn visit(
        &mut self,
        part: Partition,
        trace: Vec<u64>,
        path: Vec<usize>,
        on_first: bool,
    ) -> Option<usize> {
        self.nodes += 1;
        let depth = path.len();
        if part.is_discrete() {
            return self.leaf(&part, trace, path);
        }
        let s = part.first_nonsingleton().unwrap();
        let mut children: Vec<usize> = part.order[s..part.cell_end[s]].to_vec();
        children.sort_unstable();
        let mut explored: Vec<usize> = Vec::new();
        let mut orbits: Vec<usize> = (0..self.n).collect();
        let mut gens_seen = usize::MAX;
        for (ci, &v) in children.iter().enumerate() {
            if ci > 0 {
                if gens_seen != self.gens.len() {
                    orbits = orbits_fixing(&self.gens, &path, self.n);
                    gens_seen = self.gens.len();
                }
                if explored.iter().any(|&u| orbits[u] == orbits[v]) {
                    continue;
                }
            }
            let mut child = part.clone();
            child.individualize(v);
            let h = refine(self.st, &mut child, &mut self.bsig, &mut self.psig);
            let mut child_trace = trace.clone();
            child_trace.push(h);
            explored.push(v);
            if !self.worth_exploring(&child_trace) {
                continue;
            }
            let mut child_path = path.clone();
            child_path.push(v);
            if let Some(target) = self.visit(child, child_trace, child_path, on_first && ci == 0) {
                if target < depth {
                    return Some(target);
                }
            }
        }
        if on_first {
            let orbits = orbits_fixing(&self.gens, &path, self.n);
            let first_child = children[0];
            let size = children
                .iter()
                .filter(|&&u| orbits[u] == orbits[first_child])
                .count();
            if self.orbit_sizes.len() <= depth {
                self.orbit_sizes.resize(depth + 1, 1);
            }
            self.orbit_sizes[depth] = size;
        }
        None
    }
}

/// Canonical key, labeling and automorphism group in one search.
pub fn canonical_form(code: &BinaryCode) -> Result<Canonical, EquivError> {
    canonical_form_colored(code, &vec![0; code.n()])
}

/// Like [`canonical_form`], restricted to permutations preserving the
/// coordinate colours. The labeling sends lower colours to lower positions,
/// so keys are comparable only between codes with the same colour counts.
pub fn canonical_form_colored(code: &BinaryCode, colors: &[u32]) -> Result<Canonical, EquivError> {
    let n = code.n();
    if n > 128 {
        return Err(EquivError::TooLong(n));
    }
    if colors.len() != n {
        return Err(EquivError::ColorLength {
            expected: n,
            found: colors.len(),
        });
    }
    let st = Structure::build(code)?;
    let mut search = Search {
        st: &st,
        rows: code.rows_u128()?,
        n,
        first: None,
        best: None,
        gens: Vec::new(),
        orbit_sizes: Vec::new(),
        bsig: vec![0; st.blocks.len()],
        psig: vec![0; n],
        nodes: 0,
    };
    let mut root = Partition::from_colors(colors);
    let h = refine(&st, &mut root, &mut search.bsig, &mut search.psig);
    search.visit(root, vec![h], Vec::new(), true);
    log::debug!(
        "canonical search visited {} nodes, {} generators",
        search.nodes,
        search.gens.len()
    );
    let best = search.best.take().unwrap();
    let order = search
        .orbit_sizes
        .iter()
        .fold(BigUint::from(1u32), |acc, &s| acc * BigUint::from(s));
    let generators = search
        .gens
        .into_iter()
        .map(|g| Permutation::from_images(g).expect("automorphisms are bijections"))
        .collect();
    Ok(Canonical {
        key: CanonicalKey::from_rows(n, &best.cert),
        labeling: Permutation::from_images(best.labeling).unwrap(),
        aut: AutGroupInfo { order, generators },
    })
}

pub fn canonical_key(code: &BinaryCode) -> Result<CanonicalKey, EquivError> {
    Ok(canonical_form(code)?.key)
}

pub fn aut_order(code: &BinaryCode) -> Result<AutGroupInfo, EquivError> {
    Ok(canonical_form(code)?.aut)
}

/// Equivalence under coordinate permutations. Codes with different
/// parameters are never equivalent.
pub fn are_equivalent(a: &BinaryCode, b: &BinaryCode) -> Result<bool, EquivError> {
    if a.n() != b.n() || a.k() != b.k() {
        return Ok(false);
    }
    if invariants(a)? != invariants(b)? {
        return Ok(false);
    }
    Ok(canonical_key(a)? == canonical_key(b)?)
}

/// Largest length accepted by the brute-force oracle.
pub const ORACLE_MAX_LEN: usize = 14;

/// Ground-truth equivalence by permutation search: a plain sweep over all
/// `n!` permutations for `n <= 10`, otherwise a backtracking search that
/// checks punctured codes coordinate by coordinate.
pub fn brute_force_equiv(a: &BinaryCode, b: &BinaryCode) -> Result<bool, EquivError> {
    let n = a.n();
    if n > ORACLE_MAX_LEN {
        return Err(EquivError::OracleCap {
            n,
            max: ORACLE_MAX_LEN,
        });
    }
    if n != b.n() || a.k() != b.k() {
        return Ok(false);
    }
    let target = b.reduced();
    if n <= 10 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut found = false;
        heap_permutations(&mut perm, &mut |p| {
            if !found && a.permute(p).unwrap().same_space(&target) {
                found = true;
            }
            found
        });
        return Ok(found);
    }
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend_map(a, &target, 0, &mut image, &mut used))
}

fn puncture_rank(code: &BinaryCode, coords: &[usize]) -> BinaryCode {
    let rows = code.rows().iter().map(|r| r.gather(coords)).collect();
    BinaryCode::from_rows(coords.len(), rows).unwrap()
}

fn extend_map(
    a: &BinaryCode,
    b: &BinaryCode,
    m: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    let n = a.n();
    if m == n {
        return a.permute(image).unwrap().same_space(b);
    }
    for t in 0..n {
        if used[t] {
            continue;
        }
        image[m] = t;
        used[t] = true;
        let src: Vec<usize> = (0..=m).collect();
        let dst: Vec<usize> = image[..=m].to_vec();
        if puncture_rank(a, &src).same_space(&puncture_rank(b, &dst))
            && extend_map(a, b, m + 1, image, used)
        {
            return true;
        }
        used[t] = false;
    }
    image[m] = usize::MAX;
    false
}

/// Heap's algorithm; the callback returns `true` to stop early.
fn heap_permutations(perm: &mut [usize], visit: &mut dyn FnMut(&[usize]) -> bool) {
    let n = perm.len();
    if visit(perm) {
        return;
    }
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if visit(perm) {
                return;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Automorphism group order by exhaustive sweep (`n <= 10`).
pub fn brute_force_aut_order(code: &BinaryCode) -> Result<u64, EquivError> {
    let n = code.n();
    if n > 10 {
        return Err(EquivError::OracleCap { n, max: 10 });
    }
    let target = code.reduced();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0u64;
    heap_permutations(&mut perm, &mut |p| {
        if code.permute(p).unwrap().same_space(&target) {
            count += 1;
        }
        false
    });
    Ok(count)
}

/// Applies a permutation and checks it is one of the code's automorphisms.
pub fn is_automorphism(code: &BinaryCode, perm: &Permutation) -> Result<bool, EquivError> {
    check_permutation(perm.images())?;
    Ok(code.permute(perm.images())?.same_space(code))
}
