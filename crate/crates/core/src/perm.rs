//! Permutations of `0..n` and permutation groups via Schreier-Sims.
//!
//! A permutation maps point `i` to `images[i]`. Products read left to right:
//! `a.then(&b)` applies `a` first. Cycle notation in text is 1-based, as in
//! the literature: `(1,3,2)(4,5)`.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("invalid cycle notation {0:?}")]
    Syntax(String),
    #[error("point {point} out of range for degree {degree}")]
    OutOfRange { point: usize, degree: usize },
    #[error("point {0} appears twice")]
    Repeated(usize),
    #[error("not a bijection")]
    NotBijective,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(PermError::NotBijective);
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cyc in cycles {
            for &p in cyc {
                if p >= n {
                    return Err(PermError::OutOfRange {
                        point: p + 1,
                        degree: n,
                    });
                }
                if used[p] {
                    return Err(PermError::Repeated(p + 1));
                }
                used[p] = true;
            }
            for (i, &p) in cyc.iter().enumerate() {
                images[p] = cyc[(i + 1) % cyc.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses 1-based cycle notation. Points inside a cycle are separated by
    /// commas or whitespace; when neither appears and the degree is below 10,
    /// each digit is a point, so `(36754)` reads as `(3,6,7,5,4)`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self, PermError> {
        let t = text.trim();
        if t.is_empty() || t == "()" || t == "id" {
            return Ok(Self::identity(n));
        }
        let mut cycles = Vec::new();
        let mut rest = t;
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            if rest_trim.is_empty() {
                break;
            }
            let Some(body_start) = rest_trim.strip_prefix('(') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let Some(close) = body_start.find(')') else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let body = body_start[..close].trim();
            rest = &body_start[close + 1..];
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<String> = if body.contains(',') || body.contains(char::is_whitespace) {
                body.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            } else if n < 10 || body.len() == 1 {
                body.chars().map(|c| c.to_string()).collect()
            } else {
                return Err(PermError::Syntax(text.to_string()));
            };
            let mut cyc = Vec::with_capacity(tokens.len());
            for tok in tokens {
                let v: usize = tok
                    .parse()
                    .map_err(|_| PermError::Syntax(text.to_string()))?;
                if v == 0 || v > n {
                    return Err(PermError::OutOfRange {
                        point: v,
                        degree: n,
                    });
                }
                cyc.push(v - 1);
            }
            cycles.push(cyc);
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: self.images.iter().map(|&x| other.images[x]).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    /// 0-based cycles of length at least two, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cyc.push(x);
                x = self.images[x];
            }
            out.push(cyc);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| lcm(acc, c.len() as u64))
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree())
            .filter(|&i| self.images[i] == i)
            .collect()
    }

    /// Extends to a larger degree by fixing the new points.
    pub fn extend(&self, n: usize) -> Permutation {
        let mut images = self.images.clone();
        images.extend(self.images.len()..n);
        Permutation { images }
    }

    /// Restriction to `0..m`, valid when that range is invariant.
    pub fn restrict(&self, m: usize) -> Option<Permutation> {
        if self.images[..m].iter().all(|&x| x < m) {
            Some(Permutation {
                images: self.images[..m].to_vec(),
            })
        } else {
            None
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

#[derive(Clone)]
struct Level {
    base_point: usize,
    /// `transversal[x]` maps the base point to `x`, for `x` in the orbit.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

/// A permutation group with a stabilizer chain.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            strong: Vec::new(),
            levels: Vec::new(),
        }
    }

    pub fn new(degree: usize, generators: Vec<Permutation>) -> Self {
        let generators: Vec<Permutation> = generators
            .into_iter()
            .filter(|g| !g.is_identity())
            .collect();
        for g in &generators {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        let mut group = PermGroup {
            degree,
            generators: generators.clone(),
            strong: generators,
            levels: Vec::new(),
        };
        group.schreier_sims();
        group
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[vec![0, 1]]).unwrap());
            gens.push(Permutation::from_cycles(degree, &[(0..degree).collect()]).unwrap());
        }
        Self::new(degree, gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| {
            acc * BigUint::from(l.orbit.len())
        })
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (res, _) = self.strip(g.clone(), 0);
        res.is_identity()
    }

    /// A uniformly random element (product of random transversal elements).
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in self.levels.iter().rev() {
            let x = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.then(level.transversal[x].as_ref().unwrap());
        }
        g
    }

    /// Orbits of the group on points, each sorted, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for s in 0..self.degree {
            if seen[s] {
                continue;
            }
            let mut orb = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < orb.len() {
                let x = orb[i];
                for g in &self.generators {
                    let y = g.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        orb.push(y);
                    }
                }
                i += 1;
            }
            orb.sort_unstable();
            out.push(orb);
        }
        out
    }

    fn strip(&self, mut g: Permutation, from: usize) -> (Permutation, usize) {
        for (k, level) in self.levels.iter().enumerate().skip(from) {
            let x = g.apply(level.base_point);
            match &level.transversal[x] {
                None => return (g, k),
                Some(u) => g = g.then(&u.inverse()),
            }
        }
        (g, self.levels.len())
    }

    fn fixes_base_prefix(&self, g: &Permutation, k: usize) -> bool {
        self.levels[..k]
            .iter()
            .all(|l| g.apply(l.base_point) == l.base_point)
    }

    fn level_gens(&self, k: usize) -> Vec<Permutation> {
        self.strong
            .iter()
            .filter(|g| self.fixes_base_prefix(g, k))
            .cloned()
            .collect()
    }

    fn rebuild_level(&mut self, k: usize) {
        let gens = self.level_gens(k);
        let b = self.levels[k].base_point;
        let mut transversal: Vec<Option<Permutation>> = vec![None; self.degree];
        transversal[b] = Some(Permutation::identity(self.degree));
        let mut orbit = vec![b];
        let mut queue = VecDeque::from([b]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = g.apply(x);
                if transversal[y].is_none() {
                    transversal[y] = Some(transversal[x].as_ref().unwrap().then(g));
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        self.levels[k].transversal = transversal;
        self.levels[k].orbit = orbit;
    }

    fn push_level_for(&mut self, g: &Permutation) {
        let b = (0..self.degree)
            .find(|&i| g.apply(i) != i)
            .expect("non-identity permutation moves a point");
        let mut transversal = vec![None; self.degree];
        transversal[b] = Some(Permutation::identity(self.degree));
        self.levels.push(Level {
            base_point: b,
            transversal,
            orbit: vec![b],
        });
    }

    fn schreier_sims(&mut self) {
        let strong = self.strong.clone();
        for g in &strong {
            if self.fixes_base_prefix(g, self.levels.len()) {
                self.push_level_for(g);
            }
        }
        if self.levels.is_empty() {
            return;
        }
        for k in 0..self.levels.len() {
            self.rebuild_level(k);
        }
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let k = i as usize;
            let gens = self.level_gens(k);
            let orbit = self.levels[k].orbit.clone();
            let mut extended = None;
            'search: for &x in &orbit {
                let ux = self.levels[k].transversal[x].clone().unwrap();
                for s in &gens {
                    let sx = s.apply(x);
                    let usx = self.levels[k].transversal[sx].as_ref().unwrap();
                    let schreier = ux.then(s).then(&usx.inverse());
                    let (res, j) = self.strip(schreier, k + 1);
                    if !res.is_identity() {
                        extended = Some((res, j));
                        break 'search;
                    }
                }
            }
            match extended {
                None => i -= 1,
                Some((res, j)) => {
                    if j == self.levels.len() {
                        self.push_level_for(&res);
                    }
                    self.strong.push(res);
                    for l in (k + 1)..=j {
                        self.rebuild_level(l);
                    }
                    i = j as isize;
                }
            }
        }
    }

    /// Enumerates all elements. Intended for small groups only.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for g in &out {
                for &x in &level.orbit {
                    next.push(g.then(level.transversal[x].as_ref().unwrap()));
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PermGroup(degree {}, order {})",
            self.degree,
            self.order()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn closure(degree: usize, gens: &[Permutation]) -> HashSet<Permutation> {
        let id = Permutation::identity(degree);
        let mut set = HashSet::from([id.clone()]);
        let mut queue = vec![id];
        while let Some(g) = queue.pop() {
            for s in gens {
                let h = g.then(s);
                if set.insert(h.clone()) {
                    queue.push(h);
                }
            }
        }
        set
    }

    #[test]
    fn parse_and_display() {
        let p = Permutation::parse_cycles(10, "(1,3,5,7,9)(2,4,6,8,10)").unwrap();
        assert_eq!(p.to_string(), "(1,3,5,7,9)(2,4,6,8,10)");
        assert_eq!(p.order(), 5);
        let q = Permutation::parse_cycles(8, "(36754)").unwrap();
        assert_eq!(q.to_string(), "(3,6,7,5,4)");
        assert!(Permutation::parse_cycles(4, "()").unwrap().is_identity());
        assert!(Permutation::parse_cycles(4, "(1,5)").is_err());
        assert!(Permutation::parse_cycles(4, "(1,2)(2,3)").is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = Permutation::parse_cycles(3, "(1,2)").unwrap();
        let b = Permutation::parse_cycles(3, "(2,3)").unwrap();
        let ab = a.then(&b);
        // 0 -> 1 -> 2
        assert_eq!(ab.apply(0), 2);
        assert!(ab.then(&ab.inverse()).is_identity());
        assert_eq!(ab.pow(3), Permutation::identity(3));
    }

    #[test]
    fn symmetric_orders() {
        assert_eq!(PermGroup::symmetric(1).order(), BigUint::from(1u32));
        assert_eq!(PermGroup::symmetric(5).order(), BigUint::from(120u32));
        assert_eq!(PermGroup::symmetric(10).order(), BigUint::from(3628800u32));
    }

    #[test]
    fn order_matches_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let n = 7;
            let gens: Vec<Permutation> = (0..2)
                .map(|_| {
                    let mut v: Vec<usize> = (0..n).collect();
                    // sparse random permutations give a mix of small groups
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    v.swap(a, b);
                    let c = rng.gen_range(0..n);
                    let d = rng.gen_range(0..n);
                    v.swap(c, d);
                    Permutation::from_images(v).unwrap()
                })
                .collect();
            let g = PermGroup::new(n, gens.clone());
            let elems = closure(n, &gens);
            assert_eq!(g.order(), BigUint::from(elems.len()));
            for e in &elems {
                assert!(g.contains(e));
            }
            let listed: HashSet<Permutation> = g.elements().into_iter().collect();
            assert_eq!(listed, elems);
        }
    }

    #[test]
    fn membership_rejects_outsiders() {
        let c5 = PermGroup::new(
            5,
            vec![Permutation::parse_cycles(5, "(1,2,3,4,5)").unwrap()],
        );
        assert_eq!(c5.order(), BigUint::from(5u32));
        assert!(!c5.contains(&Permutation::parse_cycles(5, "(1,2)").unwrap()));
    }

    #[test]
    fn random_elements_are_members() {
        let g = PermGroup::symmetric(8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            assert!(g.contains(&g.random_element(&mut rng)));
        }
    }
}
