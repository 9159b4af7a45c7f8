//! Double coset transversals in `S_c` and orbit representatives on subsets.

use crate::perm::{PermGroup, Permutation};

use super::ClassifyError;

/// Largest degree for which all `c!` permutations are swept.
pub const MAX_COSET_DEGREE: usize = 11;

/// Largest point count for [`orbit_reps_on_subsets`].
pub const MAX_SUBSET_ORBIT_POINTS: usize = 32;

const MAX_SUBSETS: u128 = 1 << 31;

fn factorials(c: usize) -> Vec<u64> {
    let mut f = vec![1u64; c + 1];
    for i in 1..=c {
        f[i] = f[i - 1] * i as u64;
    }
    f
}

fn rank(perm: &[u8], fact: &[u64]) -> u64 {
    let c = perm.len();
    let mut unused: u32 = (1u32 << c) - 1;
    let mut r = 0u64;
    for (i, &x) in perm.iter().enumerate() {
        let smaller = (unused & ((1u32 << x) - 1)).count_ones() as u64;
        r += smaller * fact[c - 1 - i];
        unused &= !(1u32 << x);
    }
    r
}

fn unrank(mut r: u64, c: usize, fact: &[u64]) -> Vec<u8> {
    let mut pool: Vec<u8> = (0..c as u8).collect();
    let mut out = Vec::with_capacity(c);
    for i in 0..c {
        let f = fact[c - 1 - i];
        let idx = (r / f) as usize;
        r %= f;
        out.push(pool.remove(idx));
    }
    out
}

/// One representative of every double coset `S tau L` in `S_c`, where the
/// product applies the left factor first (`s.then(tau).then(l)`).
///
/// Representatives are the elements of least lexicographic rank in their
/// double coset, listed in increasing rank, so the identity comes first.
pub fn double_coset_reps(
    s: &PermGroup,
    l: &PermGroup,
    c: usize,
) -> Result<Vec<Permutation>, ClassifyError> {
    if c > MAX_COSET_DEGREE {
        return Err(ClassifyError::DegreeCap {
            degree: c,
            limit: MAX_COSET_DEGREE,
        });
    }
    if s.degree() != c || l.degree() != c {
        return Err(ClassifyError::Decomp(crate::decomp::DecompError::Length {
            expected: c,
            found: if s.degree() != c {
                s.degree()
            } else {
                l.degree()
            },
        }));
    }
    let fact = factorials(c);
    let total = fact[c];
    let left: Vec<Vec<u8>> = s
        .generators()
        .iter()
        .map(|g| g.images().iter().map(|&x| x as u8).collect())
        .collect();
    let right: Vec<Vec<u8>> = l
        .generators()
        .iter()
        .map(|g| g.images().iter().map(|&x| x as u8).collect())
        .collect();
    let mut visited = vec![0u64; (total as usize).div_ceil(64)];
    let mark = |v: &mut [u64], r: u64| -> bool {
        let (w, b) = ((r / 64) as usize, r % 64);
        let fresh = v[w] >> b & 1 == 0;
        v[w] |= 1 << b;
        fresh
    };
    let mut reps = Vec::new();
    let mut queue: Vec<Vec<u8>> = Vec::new();
    let mut next = vec![0u8; c];
    for r0 in 0..total {
        if visited[(r0 / 64) as usize] >> (r0 % 64) & 1 == 1 {
            continue;
        }
        let tau = unrank(r0, c, &fact);
        mark(&mut visited, r0);
        reps.push(Permutation::from_images(tau.iter().map(|&x| x as usize).collect()).unwrap());
        queue.push(tau);
        while let Some(x) = queue.pop() {
            for g in &left {
                // g.then(x): i -> x[g[i]]
                for i in 0..c {
                    next[i] = x[g[i] as usize];
                }
                if mark(&mut visited, rank(&next, &fact)) {
                    queue.push(next.clone());
                }
            }
            for h in &right {
                // x.then(h): i -> h[x[i]]
                for i in 0..c {
                    next[i] = h[x[i] as usize];
                }
                if mark(&mut visited, rank(&next, &fact)) {
                    queue.push(next.clone());
                }
            }
        }
    }
    Ok(reps)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut b = 1u128;
    for i in 0..k {
        b = b * (n - i) as u128 / (i + 1) as u128;
    }
    b
}

/// Rank of a `k`-subset in colexicographic order.
fn colex_rank(mask: u64, table: &[Vec<u64>]) -> u64 {
    let mut r = 0;
    let mut rest = mask;
    let mut i = 1;
    while rest != 0 {
        let x = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        r += table[x][i];
        i += 1;
    }
    r
}

/// One representative per orbit of `<gens>` on the `k`-subsets of
/// `0..n`. Each representative is the colexicographically least subset of
/// its orbit, given sorted.
pub fn orbit_reps_on_subsets(
    gens: &[Permutation],
    n: usize,
    k: usize,
) -> Result<Vec<Vec<usize>>, ClassifyError> {
    if n > MAX_SUBSET_ORBIT_POINTS {
        return Err(ClassifyError::Gf2(crate::gf2core::Error::LengthTooLarge(n)));
    }
    let total = binomial(n, k);
    if total > MAX_SUBSETS {
        return Err(ClassifyError::TooManySubsets(total));
    }
    if k > n {
        return Ok(Vec::new());
    }
    for g in gens {
        if g.degree() != n {
            return Err(ClassifyError::Decomp(crate::decomp::DecompError::Length {
                expected: n,
                found: g.degree(),
            }));
        }
    }
    let table: Vec<Vec<u64>> = (0..=n)
        .map(|x| (0..=k).map(|i| binomial(x, i) as u64).collect())
        .collect();
    let images: Vec<&[usize]> = gens.iter().map(|g| g.images()).collect();
    let apply = |g: &[usize], mask: u64| -> u64 {
        let mut out = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1 << g[x];
        }
        out
    };
    let mut visited = vec![0u64; (total as usize).div_ceil(64).max(1)];
    let mut reps = Vec::new();
    let mut stack = Vec::new();
    // Gosper's hack walks k-subsets in colex order.
    let mut mask: u64 = if k == 0 { 0 } else { (1u64 << k) - 1 };
    loop {
        let r = colex_rank(mask, &table);
        if visited[(r / 64) as usize] >> (r % 64) & 1 == 0 {
            visited[(r / 64) as usize] |= 1 << (r % 64);
            reps.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
            stack.push(mask);
            while let Some(m) = stack.pop() {
                for g in &images {
                    let img = apply(g, m);
                    let ri = colex_rank(img, &table);
                    if visited[(ri / 64) as usize] >> (ri % 64) & 1 == 0 {
                        visited[(ri / 64) as usize] |= 1 << (ri % 64);
                        stack.push(img);
                    }
                }
            }
        }
        if k == 0 || k == n {
            break;
        }
        let c = mask & mask.wrapping_neg();
        let rr = mask + c;
        mask = (((rr ^ mask) >> 2) / c) | rr;
        if mask >> n != 0 {
            break;
        }
    }
    Ok(reps)
}
