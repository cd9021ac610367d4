//! Finite fields GF(p^k) and the towers GF(q) ⊂ GF(q²) ⊂ GF(q^{2(n+1)}).
//!
//! Elements are integer codes: the element Σ cᵢ·gⁱ (with g the class of the
//! modulus variable and 0 ≤ cᵢ < p) has code Σ cᵢ·pⁱ. Code 0 is zero, code 1
//! is one, and codes below p form the prime subfield. Moving an element
//! between fields always goes through an explicit [`Embedding`]; there is no
//! implicit coercion anywhere.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default cap on field order; constructors reject anything larger unless
/// given an explicit limit.
pub const DEFAULT_MAX_FIELD_ORDER: u64 = 1 << 20;

/// Orders up to this get exp/log tables; larger fields use polynomial
/// arithmetic directly.
const TABLE_ORDER_LIMIT: u64 = 1 << 16;

/// Orders up to this additionally get a full addition table.
const ADD_TABLE_LIMIT: u64 = 512;

/// GF(p^k) with a fixed monic irreducible modulus over GF(p).
///
/// The modulus is the least monic irreducible of degree k, where candidates
/// x^k + c_{k-1}x^{k-1} + ... + c_0 are ordered by the integer Σ cᵢ·pⁱ. This
/// makes every field of a given (p, k) identical across runs and processes.
pub struct Field {
    p: u32,
    k: u32,
    order: u64,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as little-endian coefficient vectors; used only for
// modulus search and as the arithmetic fallback in large fields.

fn pf_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn pf_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai as u64 * bj as u64) % p as u64;
        }
    }
    let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
    pf_trim(&mut out);
    out
}

/// Remainder mod a monic divisor.
fn pf_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    debug_assert_eq!(*m.last().unwrap(), 1);
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate().take(dm) {
                let idx = shift + j;
                let sub = (lead as u64 * mj as u64) % p as u64;
                r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
            }
        }
        r.pop();
        pf_trim(&mut r);
        if r.len() <= dm {
            break;
        }
    }
    r
}

fn pf_powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = pf_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = pf_rem(&pf_mul(&result, &b, p), m, p);
        }
        b = pf_rem(&pf_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn pf_make_monic(v: &mut Vec<u32>, p: u32) {
    if let Some(&lead) = v.last() {
        if lead != 1 {
            let inv = mod_inverse(lead, p);
            for c in v.iter_mut() {
                *c = ((*c as u64 * inv as u64) % p as u64) as u32;
            }
        }
    }
}

fn pf_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    pf_trim(&mut x);
    pf_trim(&mut y);
    while !y.is_empty() {
        let mut ym = y.clone();
        pf_make_monic(&mut ym, p);
        let r = pf_rem(&x, &ym, p);
        x = y;
        y = r;
    }
    pf_make_monic(&mut x, p);
    x
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a nonzero mod p.
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

fn pf_is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    // x^{p^k} must reduce to x.
    let pk = (p as u64).pow(k as u32);
    let mut t = pf_powmod(&x, pk, f, p);
    pf_trim(&mut t);
    if t != x {
        return false;
    }
    // No factor of degree k/l for any prime l | k.
    for l in prime_factors(k as u64) {
        let e = (p as u64).pow((k as u64 / l) as u32);
        let mut t = pf_powmod(&x, e, f, p);
        // t - x
        while t.len() < 2 {
            t.push(0);
        }
        t[1] = (t[1] + p - 1) % p;
        pf_trim(&mut t);
        let g = pf_gcd(&t, f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for code in 0..count {
        let mut f = Vec::with_capacity(k as usize + 1);
        let mut c = code;
        for _ in 0..k {
            f.push((c % p as u64) as u32);
            c /= p as u64;
        }
        f.push(1);
        if pf_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible of every degree exists")
}

impl Field {
    /// Builds GF(p^k) with the default order cap.
    pub fn new(p: u32, k: u32) -> Result<Arc<Field>> {
        Field::new_with_limit(p, k, DEFAULT_MAX_FIELD_ORDER)
    }

    /// Builds GF(p^k), rejecting orders above `limit`.
    pub fn new_with_limit(p: u32, k: u32, limit: u64) -> Result<Arc<Field>> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        let order128 = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
        if order128 > limit as u128 {
            return Err(Error::FieldTooLarge { order: order128, limit });
        }
        let order = order128 as u64;
        let modulus = least_irreducible(p, k);
        let mut field = Field {
            p,
            k,
            order,
            modulus,
            generator: 0,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: Vec::new(),
        };
        if order <= TABLE_ORDER_LIMIT {
            field.build_mul_tables();
        }
        if order <= ADD_TABLE_LIMIT {
            field.build_add_table();
        }
        Ok(Arc::new(field))
    }

    fn find_generator(&self) -> u32 {
        if self.order == 2 {
            return 1;
        }
        let factors = prime_factors(self.order - 1);
        'cand: for g in 2..self.order as u32 {
            for &r in &factors {
                if self.pow_poly(g, (self.order - 1) / r) == 1 {
                    continue 'cand;
                }
            }
            return g;
        }
        unreachable!("the multiplicative group is cyclic")
    }

    fn build_mul_tables(&mut self) {
        self.generator = self.find_generator();
        let m = (self.order - 1) as usize;
        let mut exp = vec![0u32; 2 * m];
        let mut log = vec![0u32; self.order as usize];
        let mut acc = 1u32;
        for (i, slot) in exp.iter_mut().take(m).enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = self.mul_poly(acc, self.generator);
        }
        debug_assert_eq!(acc, 1);
        for i in 0..m {
            exp[m + i] = exp[i];
        }
        self.exp = exp;
        self.log = log;
    }

    fn build_add_table(&mut self) {
        let n = self.order as usize;
        let mut t = vec![0u32; n * n];
        for a in 0..n as u32 {
            for b in 0..=a {
                let s = self.add_digits(a, b);
                t[a as usize * n + b as usize] = s;
                t[b as usize * n + a as usize] = s;
            }
        }
        self.add_table = t;
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// The modulus as little-endian coefficients over GF(p), monic of
    /// degree k.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A fixed generator of the multiplicative group (fields with tables
    /// only; the large-field fallback does not need one).
    pub fn generator(&self) -> u32 {
        assert!(!self.exp.is_empty(), "no generator cached for large fields");
        self.generator
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, s: i64) -> u32 {
        let p = self.p as i64;
        (((s % p) + p) % p) as u32
    }

    pub fn neg_one(&self) -> u32 {
        self.from_int(-1)
    }

    /// Little-endian coordinates of `a` over GF(p).
    pub fn coords(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.k as usize);
        let mut c = a;
        for _ in 0..self.k {
            v.push(c % self.p);
            c /= self.p;
        }
        v
    }

    /// Inverse of [`coords`](Self::coords); short vectors are zero-padded.
    pub fn from_coords(&self, coords: &[u32]) -> Result<u32> {
        if coords.len() > self.k as usize {
            return Err(Error::InvalidParameter(format!(
                "coordinate vector of length {} in a degree-{} field",
                coords.len(),
                self.k
            )));
        }
        let mut code = 0u64;
        for (i, &c) in coords.iter().enumerate() {
            if c >= self.p {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {c} not reduced mod {}",
                    self.p
                )));
            }
            code += c as u64 * (self.p as u64).pow(i as u32);
        }
        Ok(code as u32)
    }

    /// All element codes in ascending order. Code order is coordinate order
    /// with the last coordinate most significant, so enumeration is
    /// deterministic across runs.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0u32;
        let mut pw = 1u32;
        let (mut x, mut y) = (a, b);
        for _ in 0..self.k {
            let s = (x % self.p + y % self.p) % self.p;
            out += s * pw;
            pw = pw.wrapping_mul(self.p);
            x /= self.p;
            y /= self.p;
        }
        out
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if !self.add_table.is_empty() {
            return self.add_table[a as usize * self.order as usize + b as usize];
        }
        self.add_digits(a, b)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u32;
        let mut pw = 1u32;
        let mut x = a;
        for _ in 0..self.k {
            let d = x % self.p;
            out += ((self.p - d) % self.p) * pw;
            pw = pw.wrapping_mul(self.p);
            x /= self.p;
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        self.add(a, self.neg(b))
    }

    fn mul_poly(&self, a: u32, b: u32) -> u32 {
        let pa = self.coords(a);
        let pb = self.coords(b);
        let prod = pf_mul(&pa, &pb, self.p);
        let r = pf_rem(&prod, &self.modulus, self.p);
        self.from_coords(&r).expect("reduced product fits")
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let i = self.log[a as usize] as usize + self.log[b as usize] as usize;
            return self.exp[i];
        }
        self.mul_poly(a, b)
    }

    /// Multiplicative inverse. Panics on zero: callers are expected to guard.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        if !self.exp.is_empty() {
            let m = (self.order - 1) as usize;
            let l = self.log[a as usize] as usize;
            return self.exp[(m - l) % m];
        }
        // a^{order-2}
        self.pow_poly(a, self.order - 2)
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    fn pow_poly(&self, a: u32, mut e: u64) -> u32 {
        let mut result = 1u32;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_poly(result, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        result
    }

    /// a^e with e ≥ 0; pow(0, 0) is 1.
    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if !self.exp.is_empty() {
            let m = self.order - 1;
            let l = self.log[a as usize] as u64;
            let i = l * (e % m) % m;
            return self.exp[i as usize];
        }
        self.pow_poly(a, e)
    }

    /// The Frobenius power a^{p^m}; m is reduced mod k since the order-k
    /// Frobenius is the identity.
    pub fn frobenius(&self, a: u32, m: u32) -> u32 {
        let m = m % self.k;
        let mut out = a;
        for _ in 0..m {
            out = self.pow(out, self.p as u64);
        }
        out
    }

    /// Wraps a code as an owned element.
    pub fn el(self: &Arc<Self>, code: u32) -> Element {
        assert!((code as u64) < self.order, "code out of range");
        Element { field: Arc::clone(self), code }
    }

    pub fn name(&self) -> String {
        format!("GF({})", self.order)
    }
}

/// An element bound to its field. Arithmetic between elements of different
/// fields panics; use an [`Embedding`] to move values between fields.
#[derive(Clone)]
pub struct Element {
    field: Arc<Field>,
    code: u32,
}

impl Element {
    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    pub fn pow(&self, e: u64) -> Element {
        self.field.el(self.field.pow(self.code, e))
    }

    pub fn inv(&self) -> Element {
        self.field.el(self.field.inv(self.code))
    }

    fn assert_same_field(&self, other: &Element) {
        assert!(
            *self.field == *other.field,
            "elements of {} and {} mixed without an embedding",
            self.field.name(),
            other.field.name()
        );
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.code == other.code
    }
}
impl Eq for Element {}

impl std::hash::Hash for Element {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.p.hash(state);
        self.field.modulus.hash(state);
        self.code.hash(state);
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.code, self.field.name())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)
    }
}

impl std::ops::Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.assert_same_field(rhs);
        self.field.el(self.field.add(self.code, rhs.code))
    }
}

impl std::ops::Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.assert_same_field(rhs);
        self.field.el(self.field.sub(self.code, rhs.code))
    }
}

impl std::ops::Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.assert_same_field(rhs);
        self.field.el(self.field.mul(self.code, rhs.code))
    }
}

impl std::ops::Div for &Element {
    type Output = Element;
    fn div(self, rhs: &Element) -> Element {
        self.assert_same_field(rhs);
        self.field.el(self.field.div(self.code, rhs.code))
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.field.el(self.field.neg(self.code))
    }
}

/// A field homomorphism GF(p^a) → GF(p^b) for a | b, realized by sending the
/// source generator to the least root of the source modulus in the target.
/// Stored as a full lookup table, so application is O(1).
#[derive(Clone)]
pub struct Embedding {
    src: Arc<Field>,
    dst: Arc<Field>,
    root: u32,
    table: Vec<u32>,
}

impl Embedding {
    pub fn new(src: &Arc<Field>, dst: &Arc<Field>) -> Result<Embedding> {
        if src.p != dst.p || dst.k % src.k != 0 {
            return Err(Error::NotASubfield { src: src.name(), dst: dst.name() });
        }
        let root = dst
            .elements()
            .find(|&a| {
                // modulus_src(a) over dst; coefficients are prime-field codes
                let mut acc = 0u32;
                for &c in src.modulus.iter().rev() {
                    acc = dst.add(dst.mul(acc, a), c);
                }
                acc == 0
            })
            .expect("source modulus splits in any extension of matching degree");
        let mut table = vec![0u32; src.order as usize];
        for a in src.elements() {
            let coords = src.coords(a);
            let mut acc = 0u32;
            let mut pw = 1u32;
            for &c in &coords {
                acc = dst.add(acc, dst.mul(c, pw));
                pw = dst.mul(pw, root);
            }
            table[a as usize] = acc;
        }
        Ok(Embedding { src: Arc::clone(src), dst: Arc::clone(dst), root, table })
    }

    pub fn source(&self) -> &Arc<Field> {
        &self.src
    }

    pub fn target(&self) -> &Arc<Field> {
        &self.dst
    }

    /// Image of the class of the source modulus variable.
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn apply(&self, a: u32) -> u32 {
        self.table[a as usize]
    }

    pub fn apply_el(&self, a: &Element) -> Element {
        assert!(**a.field() == *self.src, "element not in the embedding source");
        self.dst.el(self.apply(a.code()))
    }

    /// Composite embedding through `self` then `next`.
    pub fn compose(&self, next: &Embedding) -> Result<Embedding> {
        if *self.dst != *next.src {
            return Err(Error::NotASubfield { src: self.dst.name(), dst: next.src.name() });
        }
        let table: Vec<u32> = self.table.iter().map(|&m| next.apply(m)).collect();
        Ok(Embedding {
            src: Arc::clone(&self.src),
            dst: Arc::clone(&next.dst),
            root: next.apply(self.root),
            table,
        })
    }

    /// Sorted image of the whole source field.
    pub fn image(&self) -> Vec<u32> {
        let mut v = self.table.clone();
        v.sort_unstable();
        v
    }
}

/// The three fields GF(q), GF(q²), GF(q^{2(n+1)}) with compatible embeddings
/// (the long embedding is the composite of the two short ones by
/// construction).
#[derive(Clone)]
pub struct Tower {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub base: Arc<Field>,
    pub quad: Arc<Field>,
    pub big: Arc<Field>,
    pub base_to_quad: Embedding,
    pub quad_to_big: Embedding,
    pub base_to_big: Embedding,
}

impl Tower {
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    /// q^{2n}, the degree of the linearized polynomials attached to this
    /// tower.
    pub fn q2n(&self) -> u64 {
        self.q().pow(2 * self.n)
    }
}

pub fn make_tower(p: u32, e: u32, n: u32) -> Result<Tower> {
    make_tower_with_limit(p, e, n, DEFAULT_MAX_FIELD_ORDER)
}

pub fn make_tower_with_limit(p: u32, e: u32, n: u32, limit: u64) -> Result<Tower> {
    if e == 0 || n == 0 {
        return Err(Error::InvalidParameter("need e >= 1 and n >= 1".into()));
    }
    let base = Field::new_with_limit(p, e, limit)?;
    let quad = Field::new_with_limit(p, 2 * e, limit)?;
    let big = Field::new_with_limit(p, 2 * e * (n + 1), limit)?;
    let base_to_quad = Embedding::new(&base, &quad)?;
    let quad_to_big = Embedding::new(&quad, &big)?;
    let base_to_big = base_to_quad.compose(&quad_to_big)?;
    Ok(Tower { p, e, n, base, quad, big, base_to_quad, quad_to_big, base_to_big })
}

/// Elements of `field` in deterministic enumeration order.
pub fn enumerate(field: &Arc<Field>) -> impl Iterator<Item = Element> + '_ {
    field.elements().map(move |c| field.el(c))
}
