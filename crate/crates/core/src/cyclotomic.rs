//! Arithmetic in `R_p = F2[x]/(x^p - 1)` for odd primes `p <= 31`.
//!
//! A ring element is a `p`-bit mask with the coefficient of `x^i` in bit `i`.
//! The even-weight elements form the ideal `P`, which splits as a direct sum
//! of minimal ideals `I_1 + ... + I_s`, one per irreducible factor `h_j` of
//! `(x^p - 1)/(x - 1)`. Each `I_j` is a field whose identity is the
//! idempotent `e_j`.

use std::fmt;

use crate::gf2core::{BinaryCode, BitVector};
use thiserror::Error;

pub const MAX_PRIME: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{0} is not an odd prime at most 31")]
    BadPrime(usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("element {elem} does not lie in ideal I_{ideal}")]
    NotInIdeal { elem: String, ideal: usize },
    #[error("exponent {t} is not invertible modulo {p}")]
    BadExponent { t: usize, p: usize },
    #[error("2 is not a primitive root modulo {0}; P is not a field")]
    NotAField(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An element of `F2[x]/(x^p - 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    p: u8,
    bits: u32,
}

impl RingElement {
    pub fn new(p: usize, bits: u32) -> Self {
        assert!((3..=MAX_PRIME).contains(&p));
        RingElement {
            p: p as u8,
            bits: bits & mask(p),
        }
    }

    pub fn zero(p: usize) -> Self {
        Self::new(p, 0)
    }

    pub fn one(p: usize) -> Self {
        Self::new(p, 1)
    }

    /// The monomial `x^i`.
    pub fn monomial(p: usize, i: usize) -> Self {
        Self::new(p, 1 << (i % p))
    }

    pub fn p(&self) -> usize {
        self.p as usize
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Membership in `P`, the even-weight ideal.
    pub fn is_even(&self) -> bool {
        self.weight() % 2 == 0
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(RingElement {
            p: self.p,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement, RingError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &RingElement) -> RingElement {
        let p = self.p();
        let mut acc = 0u32;
        let mut a = self.bits;
        while a != 0 {
            let i = a.trailing_zeros();
            a &= a - 1;
            acc ^= rotate(other.bits, i as usize, p);
        }
        RingElement {
            p: self.p,
            bits: acc,
        }
    }

    /// Multiplication by `x^i`, a cyclic shift of the coefficients.
    pub fn shift(&self, i: usize) -> RingElement {
        RingElement {
            p: self.p,
            bits: rotate(self.bits, i % self.p(), self.p()),
        }
    }

    /// `a(x^t)`; a ring automorphism when `gcd(t, p) = 1`.
    pub fn substitute(&self, t: usize) -> Result<RingElement, RingError> {
        let p = self.p();
        if t % p == 0 {
            return Err(RingError::BadExponent { t, p });
        }
        Ok(self.substitute_unchecked(t))
    }

    pub(crate) fn substitute_unchecked(&self, t: usize) -> RingElement {
        let p = self.p();
        let mut out = 0u32;
        let mut a = self.bits;
        while a != 0 {
            let i = a.trailing_zeros() as usize;
            a &= a - 1;
            out |= 1 << ((i * t) % p);
        }
        RingElement {
            p: self.p,
            bits: out,
        }
    }

    /// `a(x^{-1})`.
    pub fn conjugate(&self) -> RingElement {
        self.substitute_unchecked(self.p() - 1)
    }

    pub fn pow(&self, mut e: u64) -> RingElement {
        let mut base = *self;
        let mut acc = RingElement::one(self.p());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    pub fn parse(p: usize, s: &str) -> Result<RingElement, String> {
        if s.len() != p {
            return Err(format!(
                "ring element {s:?} must have exactly {p} characters"
            ));
        }
        let mut bits = 0u32;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => bits |= 1 << i,
                other => return Err(format!("unexpected character {other:?} in ring element")),
            }
        }
        Ok(RingElement::new(p, bits))
    }

    fn check(&self, other: &RingElement) -> Result<(), RingError> {
        if self.p != other.p {
            Err(RingError::ModulusMismatch(self.p(), other.p()))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.p() {
            f.write_str(if self.bits >> i & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}({self})", self.p)
    }
}

fn mask(p: usize) -> u32 {
    ((1u64 << p) - 1) as u32
}

#[inline]
fn rotate(bits: u32, i: usize, p: usize) -> u32 {
    if i == 0 {
        return bits;
    }
    ((bits << i) | (bits >> (p - i))) & mask(p)
}

// Plain polynomials over GF(2), bit i = coefficient of x^i.

fn poly_deg(a: u64) -> i32 {
    63 - a.leading_zeros() as i32
}

fn poly_mul(a: u64, b: u64) -> u64 {
    let mut acc = 0u64;
    let mut a = a;
    let mut shift = 0;
    while a != 0 {
        if a & 1 == 1 {
            acc ^= b << shift;
        }
        a >>= 1;
        shift += 1;
    }
    acc
}

fn poly_divmod(a: u64, b: u64) -> (u64, u64) {
    assert!(b != 0);
    let db = poly_deg(b);
    let mut q = 0u64;
    let mut r = a;
    while r != 0 && poly_deg(r) >= db {
        let s = poly_deg(r) - db;
        q |= 1 << s;
        r ^= b << s;
    }
    (q, r)
}

fn poly_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = poly_divmod(a, b).1;
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo `m` (assumes coprime).
fn poly_inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m, poly_divmod(a, m).1);
    let (mut s0, mut s1) = (0u64, 1u64);
    while r1 != 0 {
        let (q, r) = poly_divmod(r0, r1);
        r0 = r1;
        r1 = r;
        let s = s0 ^ poly_mul(q, s1);
        s0 = s1;
        s1 = s;
    }
    debug_assert_eq!(r0, 1, "not coprime");
    poly_divmod(s0, m).1
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Multiplicative order of 2 modulo `p`.
pub fn order_of_two(p: usize) -> usize {
    let mut x = 2 % p;
    let mut k = 1;
    while x != 1 {
        x = x * 2 % p;
        k += 1;
    }
    k
}

/// The decomposition `P = I_1 + ... + I_s` for a fixed prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSystem {
    p: usize,
    /// Irreducible factors of `(x^p - 1)/(x - 1)`, sorted by bit value.
    factors: Vec<u64>,
    generators: Vec<RingElement>,
    idempotents: Vec<RingElement>,
}

impl IdealSystem {
    pub fn new(p: usize) -> Result<Self, RingError> {
        factor_cyclotomic(p)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of minimal ideals in `P`.
    pub fn s(&self) -> usize {
        self.factors.len()
    }

    /// `h_j` as a bit mask (1-based `j` in the text, 0-based here).
    pub fn factor(&self, j: usize) -> u64 {
        self.factors[j]
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Degree of every `h_j`, which is the multiplicative order of 2 mod p.
    pub fn degree(&self) -> usize {
        poly_deg(self.factors[0]) as usize
    }

    /// `g_j = (x^p - 1)/h_j` reduced into the ring.
    pub fn generator(&self, j: usize) -> RingElement {
        self.generators[j]
    }

    pub fn idempotent(&self, j: usize) -> RingElement {
        self.idempotents[j]
    }

    pub fn idempotents(&self) -> &[RingElement] {
        &self.idempotents
    }

    /// Identity of `P`, the sum of all `e_j`.
    pub fn p_identity(&self) -> RingElement {
        self.idempotents
            .iter()
            .fold(RingElement::zero(self.p), |a, e| {
                RingElement::new(self.p, a.bits ^ e.bits)
            })
    }

    pub fn in_ideal(&self, a: &RingElement, j: usize) -> bool {
        a.p() == self.p && a.mul_unchecked(&self.idempotents[j]) == *a
    }

    /// Index of the ideal containing a nonzero `a`, if it lies in exactly one.
    pub fn ideal_of(&self, a: &RingElement) -> Option<usize> {
        if a.is_zero() {
            return None;
        }
        (0..self.s()).find(|&j| self.in_ideal(a, j))
    }

    /// All elements of `I_j`, zero first, then `x^i e_j`-style enumeration
    /// of the GF(2) span of `e_j, x e_j, ..., x^{d-1} e_j`.
    pub fn ideal_elements(&self, j: usize) -> Vec<RingElement> {
        let basis = self.ideal_basis(j);
        (0..1u32 << basis.len())
            .map(|m| {
                let mut bits = 0;
                for (b, e) in basis.iter().enumerate() {
                    if m >> b & 1 == 1 {
                        bits ^= e.bits;
                    }
                }
                RingElement::new(self.p, bits)
            })
            .collect()
    }

    /// GF(2) basis `e_j, x e_j, ..., x^{d-1} e_j` of `I_j`.
    pub fn ideal_basis(&self, j: usize) -> Vec<RingElement> {
        (0..self.degree())
            .map(|i| self.idempotents[j].shift(i))
            .collect()
    }

    pub fn field_inverse(&self, a: &RingElement, j: usize) -> Result<RingElement, RingError> {
        if a.is_zero() {
            return Err(RingError::ZeroInverse);
        }
        if !self.in_ideal(a, j) {
            return Err(RingError::NotInIdeal {
                elem: a.to_string(),
                ideal: j + 1,
            });
        }
        let q = 1u64 << self.degree();
        Ok(self.field_pow(a, j, q - 2))
    }

    /// `a^m` inside the field `I_j`, where `a^0 = e_j`.
    pub fn field_pow(&self, a: &RingElement, j: usize, m: u64) -> RingElement {
        if m == 0 {
            return self.idempotents[j];
        }
        a.pow(m)
    }

    /// `sum_i u_i(x) v_i(x^{-1})`.
    pub fn form_value(
        &self,
        u: &[RingElement],
        v: &[RingElement],
    ) -> Result<RingElement, RingError> {
        form_value(self.p, u, v)
    }

    /// Whether `P` is a field (2 is a primitive root mod p).
    pub fn is_field(&self) -> bool {
        self.s() == 1
    }
}

/// Factors `(x^p - 1)/(x - 1)` over GF(2) and computes the idempotents.
///
/// Splitting uses the Frobenius-fixed elements `sum_{i in C} x^i` over the
/// 2-cyclotomic cosets `C` mod `p`; gcds with these separate every pair of
/// distinct irreducible factors.
pub fn factor_cyclotomic(p: usize) -> Result<IdealSystem, RingError> {
    if !(3..=MAX_PRIME).contains(&p) || !is_prime(p) {
        return Err(RingError::BadPrime(p));
    }
    let full: u64 = (1u64 << p) | 1;
    let phi: u64 = (1u64 << p) - 1; // 1 + x + ... + x^{p-1}
    let d = order_of_two(p);
    let want = (p - 1) / d;

    let mut seen = vec![false; p];
    let mut coset_sums = Vec::new();
    for start in 1..p {
        if seen[start] {
            continue;
        }
        let mut sum = 0u64;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            sum |= 1 << i;
            i = i * 2 % p;
        }
        coset_sums.push(sum);
    }

    let mut factors = vec![phi];
    for &theta in &coset_sums {
        if factors.len() == want {
            break;
        }
        let mut next = Vec::new();
        for &f in &factors {
            if poly_deg(f) as usize == d {
                next.push(f);
                continue;
            }
            let g = poly_gcd(f, poly_divmod(theta, f).1);
            if g != 1 && g != f && g != 0 {
                next.push(g);
                next.push(poly_divmod(f, g).0);
            } else {
                next.push(f);
            }
        }
        factors = next;
    }
    assert_eq!(
        factors.len(),
        want,
        "factorization did not separate all factors"
    );
    factors.sort_unstable();

    let mut generators = Vec::new();
    let mut idempotents = Vec::new();
    for &h in &factors {
        let g = poly_divmod(full, h).0;
        let ginv = poly_inv_mod(g, h);
        let e = poly_divmod(poly_mul(g, ginv), full).1;
        generators.push(RingElement::new(p, reduce_cyclic(g, p)));
        idempotents.push(RingElement::new(p, reduce_cyclic(e, p)));
    }
    Ok(IdealSystem {
        p,
        factors,
        generators,
        idempotents,
    })
}

fn reduce_cyclic(a: u64, p: usize) -> u32 {
    let mut out = 0u64;
    let mut rest = a;
    while rest != 0 {
        out ^= rest & ((1u64 << p) - 1);
        rest >>= p;
    }
    out as u32
}

/// Polynomial product, exposed for test oracles.
pub fn polynomial_product(a: u64, b: u64) -> u64 {
    poly_mul(a, b)
}

/// `sum_i u_i(x) v_i(x^{-1})` for vectors over `R_p`.
pub fn form_value(
    p: usize,
    u: &[RingElement],
    v: &[RingElement],
) -> Result<RingElement, RingError> {
    if u.len() != v.len() {
        return Err(RingError::LengthMismatch(u.len(), v.len()));
    }
    let mut acc = RingElement::zero(p);
    for (a, b) in u.iter().zip(v) {
        if a.p() != p {
            return Err(RingError::ModulusMismatch(p, a.p()));
        }
        if b.p() != p {
            return Err(RingError::ModulusMismatch(p, b.p()));
        }
        acc.bits ^= a.mul_unchecked(&b.conjugate()).bits;
    }
    Ok(acc)
}

/// A submodule of `P^c`, given by generator rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleCode {
    p: usize,
    c: usize,
    rows: Vec<Vec<RingElement>>,
}

impl ModuleCode {
    pub fn new(p: usize, c: usize, rows: Vec<Vec<RingElement>>) -> Result<Self, RingError> {
        for row in &rows {
            if row.len() != c {
                return Err(RingError::LengthMismatch(c, row.len()));
            }
            for a in row {
                if a.p() != p {
                    return Err(RingError::ModulusMismatch(p, a.p()));
                }
            }
        }
        Ok(ModuleCode { p, c, rows })
    }

    pub fn zero(p: usize, c: usize) -> Self {
        ModuleCode {
            p,
            c,
            rows: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn rows(&self) -> &[Vec<RingElement>] {
        &self.rows
    }

    /// Whether every coordinate of every generator lies in `P`.
    pub fn in_p(&self) -> bool {
        self.rows.iter().flatten().all(|a| a.is_even())
    }

    /// The binary image of length `p*c`: coordinate `i` of a row occupies
    /// positions `p*i .. p*i + p`, and the module is closed under `x`.
    pub fn binary_image(&self) -> BinaryCode {
        let n = self.p * self.c;
        let mut rows = Vec::with_capacity(self.rows.len() * self.p);
        for row in &self.rows {
            for shift in 0..self.p {
                rows.push(row_to_bits(row, shift, n));
            }
        }
        BinaryCode::from_rows(n, rows).expect("lengths agree")
    }

    /// GF(2) dimension of the module.
    pub fn binary_dimension(&self) -> usize {
        self.binary_image().k()
    }

    /// Same module (as a set of vectors).
    pub fn same_module(&self, other: &ModuleCode) -> bool {
        self.p == other.p
            && self.c == other.c
            && self.binary_image().same_space(&other.binary_image())
    }

    /// Multiplies every coordinate of every generator by `a`.
    pub fn scaled(&self, a: &RingElement) -> ModuleCode {
        ModuleCode {
            p: self.p,
            c: self.c,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.mul_unchecked(a)).collect())
                .collect(),
        }
    }

    pub fn direct_sum(&self, other: &ModuleCode) -> Result<ModuleCode, RingError> {
        if self.p != other.p || self.c != other.c {
            return Err(RingError::LengthMismatch(self.c, other.c));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(ModuleCode {
            p: self.p,
            c: self.c,
            rows,
        })
    }

    /// Reads the module text format: header `p c rows`, then rows of
    /// space-separated ring-element strings.
    pub fn parse(text: &str) -> Result<ModuleCode, RingError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
            .filter(|(_, l)| !l.is_empty());
        let Some((hl, header)) = lines.next() else {
            return Err(RingError::Parse {
                line: 0,
                msg: "missing header `p c rows`".into(),
            });
        };
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| RingError::Parse {
                line: hl,
                msg: format!("invalid header {header:?}"),
            })?;
        if nums.len() != 3 {
            return Err(RingError::Parse {
                line: hl,
                msg: "header must be `p c rows`".into(),
            });
        }
        let (p, c, k) = (nums[0], nums[1], nums[2]);
        if !(3..=MAX_PRIME).contains(&p) || !is_prime(p) {
            return Err(RingError::Parse {
                line: hl,
                msg: format!("{p} is not an odd prime at most 31"),
            });
        }
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let row: Vec<RingElement> = line
                .split_whitespace()
                .map(|t| RingElement::parse(p, t))
                .collect::<Result<_, _>>()
                .map_err(|msg| RingError::Parse { line: ln, msg })?;
            if row.len() != c {
                return Err(RingError::Parse {
                    line: ln,
                    msg: format!("row has {} entries, expected {c}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(RingError::Parse {
                line: 0,
                msg: format!("header declares {k} rows but {} were given", rows.len()),
            });
        }
        Ok(ModuleCode { p, c, rows })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.p, self.c, self.rows.len());
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            s.push_str(&parts.join(" "));
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for ModuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModuleCode(p={}, c={}) ", self.p, self.c)?;
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            write!(f, "[{}]", parts.join(" "))?;
        }
        Ok(())
    }
}

/// Packs a module row, each coordinate multiplied by `x^shift`.
pub(crate) fn row_to_bits(row: &[RingElement], shift: usize, n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for (i, a) in row.iter().enumerate() {
        let p = a.p();
        let s = a.shift(shift);
        for b in 0..p {
            if s.bits >> b & 1 == 1 {
                v.set(p * i + b, true);
            }
        }
    }
    v
}

/// Splits `C_phi` into its components `M_j = e_j C_phi`, with the
/// dimension of each over its field `I_j`.
pub fn module_decompose(
    code: &ModuleCode,
    sys: &IdealSystem,
) -> Result<(Vec<ModuleCode>, Vec<usize>), RingError> {
    if code.p != sys.p {
        return Err(RingError::ModulusMismatch(code.p, sys.p));
    }
    let d = sys.degree();
    let mut parts = Vec::with_capacity(sys.s());
    let mut dims = Vec::with_capacity(sys.s());
    for j in 0..sys.s() {
        let m = code.scaled(&sys.idempotent(j));
        dims.push(m.binary_dimension() / d);
        parts.push(m);
    }
    Ok((parts, dims))
}

/// Self-duality of `C_phi` as a code over the field `P` (only when `P` is a
/// field): dimension `c/2` and the form vanishes on generator pairs.
pub fn hermitian_selfdual_check(code: &ModuleCode, sys: &IdealSystem) -> Result<bool, RingError> {
    if !sys.is_field() {
        return Err(RingError::NotAField(sys.p));
    }
    if code.p != sys.p {
        return Err(RingError::ModulusMismatch(code.p, sys.p));
    }
    if !code.in_p() {
        return Ok(false);
    }
    if code.binary_dimension() * 2 != code.c * (code.p - 1) {
        return Ok(false);
    }
    form_vanishes(code, code)
}

/// Whether `form_value(u, v) = 0` for all generator pairs.
pub fn form_vanishes(a: &ModuleCode, b: &ModuleCode) -> Result<bool, RingError> {
    for u in &a.rows {
        for v in &b.rows {
            if !form_value(a.p, u, v)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `{ v in I_j^c : form_value(u, v) = 0 for every generator u of m }`.
pub fn form_complement(m: &ModuleCode, j: usize, sys: &IdealSystem) -> ModuleCode {
    let p = sys.p;
    let c = m.c;
    let basis = sys.ideal_basis(j);
    let d = basis.len();
    let nvars = c * d;
    // One GF(2) equation per (generator, coefficient of x^b).
    let mut eqs: Vec<BitVector> = Vec::new();
    for u in &m.rows {
        let mut columns = Vec::with_capacity(nvars);
        for i in 0..c {
            for e in &basis {
                let mut v = vec![RingElement::zero(p); c];
                v[i] = *e;
                columns.push(form_value(p, u, &v).unwrap().bits);
            }
        }
        for b in 0..p {
            let mut eq = BitVector::zeros(nvars);
            for (var, col) in columns.iter().enumerate() {
                if col >> b & 1 == 1 {
                    eq.set(var, true);
                }
            }
            if !eq.is_zero() {
                eqs.push(eq);
            }
        }
    }
    let sol = BinaryCode::from_rows(nvars, eqs).unwrap().dual();
    let rows = sol
        .rows()
        .iter()
        .map(|s| {
            (0..c)
                .map(|i| {
                    let mut bits = 0u32;
                    for (b, e) in basis.iter().enumerate() {
                        if s.get(i * d + b) {
                            bits ^= e.bits;
                        }
                    }
                    RingElement::new(p, bits)
                })
                .collect()
        })
        .collect();
    ModuleCode { p, c, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: usize, s: &str) -> RingElement {
        RingElement::parse(p, s).unwrap()
    }

    /// Irreducibility by trial division over all lower-degree polynomials.
    fn irreducible_oracle(f: u64) -> bool {
        let d = poly_deg(f);
        (2u64..(1 << (d / 2 + 1)))
            .all(|g| poly_deg(g) == 0 || poly_deg(g) > d / 2 || poly_divmod(f, g).1 != 0)
    }

    #[test]
    fn p3_structure() {
        let sys = factor_cyclotomic(3).unwrap();
        assert_eq!(sys.s(), 1);
        assert_eq!(sys.factor(0), 0b111);
        let e = sys.idempotent(0);
        assert_eq!(e, r(3, "011"));
        let w = r(3, "101");
        assert_eq!(w.mul(&w).unwrap(), r(3, "110"));
        assert_eq!(e.mul(&e).unwrap(), e);
        assert_eq!(w.conjugate(), r(3, "110"));
        assert_eq!(sys.field_inverse(&w, 0).unwrap(), r(3, "110"));
    }

    #[test]
    fn p3_matches_f4() {
        // F4 = {0, 1, a, a^2} with a^2 = a + 1; map e -> 1, w -> a.
        let e = r(3, "011");
        let w = r(3, "101");
        let w2 = r(3, "110");
        let elems = [RingElement::zero(3), e, w, w2];
        let f4_mul = |a: usize, b: usize| -> usize {
            if a == 0 || b == 0 {
                0
            } else {
                (a - 1 + b - 1) % 3 + 1
            }
        };
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(elems[a].mul(&elems[b]).unwrap(), elems[f4_mul(a, b)]);
            }
        }
    }

    #[test]
    fn p7_structure() {
        let sys = factor_cyclotomic(7).unwrap();
        assert_eq!(sys.s(), 2);
        assert_eq!(sys.factor(0), 0b1011);
        assert_eq!(sys.factor(1), 0b1101);
        let e1 = sys.idempotent(0);
        let e2 = sys.idempotent(1);
        assert_eq!(e1, RingElement::new(7, 0b0010111));
        assert_eq!(e2, RingElement::new(7, 0b1101001));
        assert_eq!(e1.substitute(6).unwrap(), e2);
        assert_eq!(e2.conjugate(), e1);
        assert_eq!(e1.mul(&e2).unwrap(), RingElement::zero(7));
        assert_eq!(sys.ideal_elements(0).len(), 8);
        let xe1 = e1.shift(1);
        assert_eq!(sys.field_inverse(&xe1, 0).unwrap(), e1.shift(6));
        assert_eq!(sys.field_inverse(&e1, 0).unwrap(), e1);
    }

    #[test]
    fn p5_factor_matches_trial_division() {
        let sys = factor_cyclotomic(5).unwrap();
        assert_eq!(sys.s(), 1);
        assert_eq!(sys.factor(0), 0b11111);
        assert!(irreducible_oracle(0b11111));
    }

    #[test]
    fn factors_multiply_back() {
        for p in [3, 5, 7, 11, 13, 17, 23, 31] {
            let sys = factor_cyclotomic(p).unwrap();
            let mut prod = 0b11u64; // x + 1
            for &h in sys.factors() {
                if poly_deg(h) <= 12 {
                    assert!(irreducible_oracle(h), "p={p} factor {h:b}");
                }
                prod = poly_mul(prod, h);
            }
            assert_eq!(prod, (1u64 << p) | 1, "p={p}");
            for j in 0..sys.s() {
                let e = sys.idempotent(j);
                assert_eq!(e.mul(&e).unwrap(), e);
                for l in 0..sys.s() {
                    if l != j {
                        assert!(e.mul(&sys.idempotent(l)).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_primes() {
        assert_eq!(factor_cyclotomic(9), Err(RingError::BadPrime(9)));
        assert_eq!(factor_cyclotomic(2), Err(RingError::BadPrime(2)));
        assert_eq!(factor_cyclotomic(37), Err(RingError::BadPrime(37)));
    }

    #[test]
    fn conjugation_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for p in [3, 5, 7, 11] {
            for _ in 0..10_000 {
                let a = RingElement::new(p, rng.gen());
                assert_eq!(a.conjugate().conjugate(), a);
            }
            assert_eq!(RingElement::one(p).conjugate(), RingElement::one(p));
            assert_eq!(RingElement::zero(p).conjugate(), RingElement::zero(p));
        }
    }

    #[test]
    fn idempotents_act_as_identities_p7() {
        let sys = factor_cyclotomic(7).unwrap();
        for j in 0..2 {
            for a in sys.ideal_elements(j) {
                assert_eq!(a.mul(&sys.idempotent(j)).unwrap(), a);
                assert!(a.mul(&sys.idempotent(1 - j)).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn substitution_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for p in [5, 7, 11] {
            let sys = factor_cyclotomic(p).unwrap();
            for _ in 0..200 {
                let a = RingElement::new(p, rng.gen());
                let t1 = rng.gen_range(1..p);
                let t2 = rng.gen_range(1..p);
                let lhs = a.substitute(t1).unwrap().substitute(t2).unwrap();
                assert_eq!(lhs, a.substitute(t1 * t2 % p).unwrap());
                let b = RingElement::new(p, rng.gen());
                assert_eq!(
                    a.mul(&b).unwrap().substitute(t1).unwrap(),
                    a.substitute(t1)
                        .unwrap()
                        .mul(&b.substitute(t1).unwrap())
                        .unwrap()
                );
            }
            // Frobenius permutes each ideal.
            for j in 0..sys.s() {
                for a in sys.ideal_elements(j) {
                    assert!(sys.in_ideal(&a.substitute(2).unwrap(), j));
                }
            }
        }
    }

    #[test]
    fn field_inverse_all_nonzero() {
        for p in [3, 5, 7, 11] {
            let sys = factor_cyclotomic(p).unwrap();
            for j in 0..sys.s() {
                for a in sys.ideal_elements(j).into_iter().skip(1) {
                    let inv = sys.field_inverse(&a, j).unwrap();
                    assert_eq!(a.mul(&inv).unwrap(), sys.idempotent(j));
                }
                assert_eq!(
                    sys.field_inverse(&RingElement::zero(p), j),
                    Err(RingError::ZeroInverse)
                );
            }
        }
    }

    #[test]
    fn form_values() {
        let sys = factor_cyclotomic(7).unwrap();
        let (e1, e2) = (sys.idempotent(0), sys.idempotent(1));
        let z = RingElement::zero(7);
        assert!(form_value(7, &[z, z], &[z, z]).unwrap().is_zero());
        assert!(form_value(7, &[e1, e1, e1], &[e2, e2, z])
            .unwrap()
            .is_zero());
        assert!(form_value(7, &[e1, e1, e1], &[z, e2, e2])
            .unwrap()
            .is_zero());
        let e = r(3, "011");
        assert!(form_value(3, &[e, e], &[e, e]).unwrap().is_zero());
        assert!(form_value(3, &[e], &[e, e]).is_err());
    }

    #[test]
    fn conj_route_matches_square_for_p3() {
        // For p = 3 the substitution x -> x^{-1} acts on P as the Frobenius
        // a -> a^2, so both orthogonality formulations agree.
        let sys = factor_cyclotomic(3).unwrap();
        for a in sys.ideal_elements(0) {
            assert_eq!(a.conjugate(), a.mul(&a).unwrap());
        }
    }

    #[test]
    fn decompose_worked_example() {
        let sys = factor_cyclotomic(7).unwrap();
        let (e1, e2) = (sys.idempotent(0), sys.idempotent(1));
        let z = RingElement::zero(7);
        let code = ModuleCode::new(
            7,
            3,
            vec![vec![e1, e1, e1], vec![e2, e2, z], vec![z, e2, e2]],
        )
        .unwrap();
        let (parts, dims) = module_decompose(&code, &sys).unwrap();
        assert_eq!(dims, vec![1, 2]);
        assert_eq!(dims.iter().sum::<usize>(), 3);
        assert!(form_vanishes(&parts[0], &parts[1]).unwrap());
        assert!(parts[0].direct_sum(&parts[1]).unwrap().same_module(&code));
        // M1 against itself cannot give the full dimension.
        let only_m1 = ModuleCode::new(7, 3, vec![vec![e1, e1, e1]]).unwrap();
        let (_, d) = module_decompose(&only_m1.direct_sum(&only_m1).unwrap(), &sys).unwrap();
        assert_ne!(d.iter().sum::<usize>(), 3);
    }

    #[test]
    fn decompose_single_ideal() {
        let sys = factor_cyclotomic(7).unwrap();
        let e1 = sys.idempotent(0);
        let code = ModuleCode::new(7, 2, vec![vec![e1, e1.shift(2)]]).unwrap();
        let (parts, dims) = module_decompose(&code, &sys).unwrap();
        assert_eq!(dims, vec![1, 0]);
        assert_eq!(parts[1].binary_dimension(), 0);
    }

    #[test]
    fn decompose_random_submodules() {
        let sys = factor_cyclotomic(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let rows: Vec<Vec<RingElement>> = (0..2)
                .map(|_| {
                    (0..4)
                        .map(|_| {
                            let a = RingElement::new(7, rng.gen());
                            a.mul(&sys.p_identity()).unwrap()
                        })
                        .collect()
                })
                .collect();
            let code = ModuleCode::new(7, 4, rows).unwrap();
            let (parts, dims) = module_decompose(&code, &sys).unwrap();
            let sum = parts[0].direct_sum(&parts[1]).unwrap();
            assert!(sum.same_module(&code));
            assert_eq!(dims[0] * 3 + dims[1] * 3, code.binary_dimension());
        }
    }

    #[test]
    fn hermitian_checks_p3() {
        let sys = factor_cyclotomic(3).unwrap();
        let e = sys.idempotent(0);
        let z = RingElement::zero(3);
        let good = ModuleCode::new(3, 2, vec![vec![e, e]]).unwrap();
        assert!(hermitian_selfdual_check(&good, &sys).unwrap());
        let bad = ModuleCode::new(3, 2, vec![vec![e, z]]).unwrap();
        assert!(!hermitian_selfdual_check(&bad, &sys).unwrap());
        let sys7 = factor_cyclotomic(7).unwrap();
        assert_eq!(
            hermitian_selfdual_check(&ModuleCode::zero(7, 2), &sys7),
            Err(RingError::NotAField(7))
        );
    }

    #[test]
    fn form_complement_of_worked_example() {
        let sys = factor_cyclotomic(7).unwrap();
        let (e1, e2) = (sys.idempotent(0), sys.idempotent(1));
        let z = RingElement::zero(7);
        let m1 = ModuleCode::new(7, 3, vec![vec![e1, e1, e1]]).unwrap();
        let m2 = form_complement(&m1, 1, &sys);
        let expected = ModuleCode::new(7, 3, vec![vec![e2, e2, z], vec![z, e2, e2]]).unwrap();
        assert!(m2.same_module(&expected));
    }

    #[test]
    fn module_text_round_trip() {
        let text = "7 3 1\n1110100 1110100 1110100\n";
        let m = ModuleCode::parse(text).unwrap();
        assert_eq!(m.to_text(), text);
        assert!(ModuleCode::parse("7 3 1\n1110100 1110100\n").is_err());
    }
}
