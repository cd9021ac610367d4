//! Polynomial arithmetic over the finite fields of [`crate::gf`]:
//! dense univariate [`Poly`], sparse bivariate [`BiPoly`], sparse homogeneous
//! trivariate [`TriPoly`], and q²-step linearized polynomials
//! [`LinearizedPoly`] together with the value-set machinery (minimal value
//! sets, the factorization through x^{p^s} − x, the T-polynomial shape, and
//! the composition identity).
//!
//! All powering goes through base-p digits: in characteristic p the p-th
//! power is termwise, so a^{Σ dⱼ pʲ} is a short product of termwise Frobenius
//! images raised to digits below p. This keeps sparse polynomials sparse.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::Field;

fn ceil_div(a: u64, b: u64) -> u64 {
    (a + b - 1) / b
}

// ---------------------------------------------------------------------------
// dense univariate

/// Dense univariate polynomial, little-endian coefficients, always trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Arc<Field>,
    coeffs: Vec<u32>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| format!("{c}*x^{i}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn new(field: &Arc<Field>, coeffs: Vec<u32>) -> Poly {
        let mut p = Poly { field: Arc::clone(field), coeffs };
        p.trim();
        p
    }

    pub fn zero(field: &Arc<Field>) -> Poly {
        Poly { field: Arc::clone(field), coeffs: Vec::new() }
    }

    pub fn constant(field: &Arc<Field>, c: u32) -> Poly {
        Poly::new(field, vec![c])
    }

    /// c·x^e
    pub fn monomial(field: &Arc<Field>, c: u32, e: usize) -> Poly {
        if c == 0 {
            return Poly::zero(field);
        }
        let mut coeffs = vec![0; e + 1];
        coeffs[e] = c;
        Poly { field: Arc::clone(field), coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, e: usize) -> u32 {
        self.coeffs.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    fn assert_same_field(&self, other: &Poly) {
        assert!(*self.field == *other.field, "polynomials over different fields");
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0; n];
        for (i, slot) in coeffs.iter_mut().enumerate() {
            *slot = self.field.add(self.coeff(i), other.coeff(i));
        }
        Poly::new(&self.field, coeffs)
    }

    pub fn neg(&self) -> Poly {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        Poly { field: Arc::clone(&self.field), coeffs }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: u32) -> Poly {
        if s == 0 {
            return Poly::zero(&self.field);
        }
        let coeffs = self.coeffs.iter().map(|&c| self.field.mul(c, s)).collect();
        Poly::new(&self.field, coeffs)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.assert_same_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut coeffs = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
            }
        }
        Poly::new(&self.field, coeffs)
    }

    /// Termwise p^m-th power (the Frobenius is linear over GF(p)).
    pub fn frobenius_pow(&self, m: u32) -> Poly {
        let p = self.field.characteristic() as usize;
        let stretch = p.pow(m);
        let mut coeffs = vec![0u32; self.coeffs.len().saturating_sub(1) * stretch + 1];
        if self.is_zero() {
            return Poly::zero(&self.field);
        }
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                coeffs[i * stretch] = self.field.frobenius(c, m);
            }
        }
        Poly::new(&self.field, coeffs)
    }

    /// e-th power by base-p digits of e.
    pub fn pow(&self, e: u64) -> Poly {
        let p = self.field.characteristic() as u64;
        let mut result = Poly::constant(&self.field, 1);
        let mut digits = Vec::new();
        let mut rest = e;
        while rest > 0 {
            digits.push((rest % p) as u32);
            rest /= p;
        }
        for (j, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let fj = self.frobenius_pow(j as u32);
            let mut small = fj.clone();
            for _ in 1..d {
                small = small.mul(&fj);
            }
            result = result.mul(&small);
        }
        result
    }

    pub fn eval(&self, x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in self.coeffs.iter().rev() {
            acc = self.field.add(self.field.mul(acc, x), c);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(&self.field);
        }
        let p = self.field.characteristic() as u64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| {
                let m = (i as u64 % p) as u32;
                self.field.mul(c, self.field.from_int(m as i64))
            })
            .collect();
        Poly::new(&self.field, coeffs)
    }

    /// self(g) by Horner.
    pub fn compose(&self, g: &Poly) -> Poly {
        self.assert_same_field(g);
        let mut acc = Poly::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(&self.field, c));
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// sparse bivariate

/// Sparse bivariate polynomial; keys are (y-exponent, x-exponent) so the
/// highest y-rows sit at the end of the map, where monic-in-y reduction
/// wants them.
#[derive(Clone, PartialEq, Eq)]
pub struct BiPoly {
    field: Arc<Field>,
    terms: BTreeMap<(u32, u32), u32>,
}

impl std::fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(ey, ex), &c)| format!("{c}*x^{ex}*y^{ey}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl BiPoly {
    pub fn zero(field: &Arc<Field>) -> BiPoly {
        BiPoly { field: Arc::clone(field), terms: BTreeMap::new() }
    }

    pub fn constant(field: &Arc<Field>, c: u32) -> BiPoly {
        let mut p = BiPoly::zero(field);
        if c != 0 {
            p.terms.insert((0, 0), c);
        }
        p
    }

    /// c·x^ex·y^ey
    pub fn term(field: &Arc<Field>, c: u32, ex: u32, ey: u32) -> BiPoly {
        let mut p = BiPoly::zero(field);
        if c != 0 {
            p.terms.insert((ey, ex), c);
        }
        p
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Iterates (x-exponent, y-exponent, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.terms.iter().map(|(&(ey, ex), &c)| (ex, ey, c))
    }

    pub fn coeff(&self, ex: u32, ey: u32) -> u32 {
        self.terms.get(&(ey, ex)).copied().unwrap_or(0)
    }

    fn assert_same_field(&self, other: &BiPoly) {
        assert!(*self.field == *other.field, "polynomials over different fields");
    }

    fn insert_add(&mut self, key: (u32, u32), c: u32) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(0);
        *entry = self.field.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        self.assert_same_field(other);
        let mut out = self.clone();
        for (&key, &c) in &other.terms {
            out.insert_add(key, c);
        }
        out
    }

    pub fn neg(&self) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&key, &c) in &self.terms {
            out.terms.insert(key, self.field.neg(c));
        }
        out
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: u32) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        if s == 0 {
            return out;
        }
        for (&key, &c) in &self.terms {
            out.terms.insert(key, self.field.mul(c, s));
        }
        out
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        self.assert_same_field(other);
        let mut out = BiPoly::zero(&self.field);
        for (&(ey1, ex1), &c1) in &self.terms {
            for (&(ey2, ex2), &c2) in &other.terms {
                out.insert_add((ey1 + ey2, ex1 + ex2), self.field.mul(c1, c2));
            }
        }
        out
    }

    /// Termwise p^m-th power.
    pub fn frobenius_pow(&self, m: u32) -> BiPoly {
        let p = self.field.characteristic();
        let stretch = p.pow(m);
        let mut out = BiPoly::zero(&self.field);
        for (&(ey, ex), &c) in &self.terms {
            out.terms.insert((ey * stretch, ex * stretch), self.field.frobenius(c, m));
        }
        out
    }

    pub fn pow(&self, e: u64) -> BiPoly {
        let p = self.field.characteristic() as u64;
        let mut result = BiPoly::constant(&self.field, 1);
        let mut digits = Vec::new();
        let mut rest = e;
        while rest > 0 {
            digits.push((rest % p) as u32);
            rest /= p;
        }
        for (j, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let fj = self.frobenius_pow(j as u32);
            let mut small = fj.clone();
            for _ in 1..d {
                small = small.mul(&fj);
            }
            result = result.mul(&small);
        }
        result
    }

    pub fn eval(&self, x: u32, y: u32) -> u32 {
        // group by y-row, Horner in x within rows would need sorted x; with
        // sparse exponents use pow directly (exp/log pow is O(1))
        let mut acc = 0u32;
        for (&(ey, ex), &c) in &self.terms {
            let t = self
                .field
                .mul(c, self.field.mul(self.field.pow(x, ex as u64), self.field.pow(y, ey as u64)));
            acc = self.field.add(acc, t);
        }
        acc
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, ex)| ex).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|&(ey, _)| ey)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(ey, ex)| ex + ey).max()
    }

    /// The coefficient of y^j as a polynomial in x.
    pub fn y_row(&self, j: u32) -> Poly {
        let mut coeffs = Vec::new();
        for (&(ey, ex), &c) in self.terms.range((j, 0)..=(j, u32::MAX)) {
            debug_assert_eq!(ey, j);
            if coeffs.len() <= ex as usize {
                coeffs.resize(ex as usize + 1, 0);
            }
            coeffs[ex as usize] = c;
        }
        Poly::new(&self.field, coeffs)
    }

    /// Monic in y: the top y-row is the constant 1.
    pub fn is_monic_in_y(&self) -> bool {
        match self.degree_y() {
            None => false,
            Some(d) => {
                let row: Vec<_> = self.terms.range((d, 0)..=(d, u32::MAX)).collect();
                row.len() == 1 && *row[0].0 == (d, 0) && *row[0].1 == 1
            }
        }
    }

    pub fn partial_x(&self) -> BiPoly {
        let p = self.field.characteristic() as u64;
        let mut out = BiPoly::zero(&self.field);
        for (&(ey, ex), &c) in &self.terms {
            if ex == 0 {
                continue;
            }
            let m = self.field.from_int((ex as u64 % p) as i64);
            let c2 = self.field.mul(c, m);
            if c2 != 0 {
                out.terms.insert((ey, ex - 1), c2);
            }
        }
        out
    }

    pub fn partial_y(&self) -> BiPoly {
        self.transpose().partial_x().transpose()
    }

    /// Swap the roles of x and y.
    pub fn transpose(&self) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&(ey, ex), &c) in &self.terms {
            out.terms.insert((ex, ey), c);
        }
        out
    }

    /// Some(s) with self = s·other, if the two differ by a nonzero scalar.
    pub fn proportional_scalar(&self, other: &BiPoly) -> Option<u32> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut s = None;
        for ((ka, &va), (kb, &vb)) in self.terms.iter().zip(other.terms.iter()) {
            if ka != kb {
                return None;
            }
            let ratio = self.field.div(va, vb);
            match s {
                None => s = Some(ratio),
                Some(r) if r == ratio => {}
                _ => return None,
            }
        }
        s
    }

    /// Substitute y = b, leaving a polynomial in x.
    pub fn specialize_y(&self, b: u32) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for (&(ey, ex), &c) in &self.terms {
            let s = self.field.mul(c, self.field.pow(b, ey as u64));
            if s != 0 {
                acc = acc.add(&Poly::monomial(&self.field, s, ex as usize));
            }
        }
        acc
    }

    /// Substitute x = a, leaving a polynomial in y.
    pub fn specialize_x(&self, a: u32) -> Poly {
        self.transpose().specialize_y(a)
    }

    /// f(gx, gy): full composition with power memoization.
    pub fn substitute(&self, gx: &BiPoly, gy: &BiPoly) -> BiPoly {
        self.assert_same_field(gx);
        self.assert_same_field(gy);
        let mut pow_x: BTreeMap<u32, BiPoly> = BTreeMap::new();
        let mut pow_y: BTreeMap<u32, BiPoly> = BTreeMap::new();
        let mut out = BiPoly::zero(&self.field);
        for (&(ey, ex), &c) in &self.terms {
            let px = pow_x.entry(ex).or_insert_with(|| gx.pow(ex as u64)).clone();
            let py = pow_y.entry(ey).or_insert_with(|| gy.pow(ey as u64)).clone();
            out = out.add(&px.mul(&py).scale(c));
        }
        out
    }

    /// Shift the origin: returns self(x + a, y + b).
    pub fn shift(&self, a: u32, b: u32) -> BiPoly {
        let x_plus = BiPoly::term(&self.field, 1, 1, 0).add(&BiPoly::constant(&self.field, a));
        let y_plus = BiPoly::term(&self.field, 1, 0, 1).add(&BiPoly::constant(&self.field, b));
        self.substitute(&x_plus, &y_plus)
    }

    /// Remainder of self modulo a divisor monic in y. Exact division step by
    /// step from the top y-row down; terminates because each step strictly
    /// lowers the top y-degree.
    pub fn rem_monic_y(&self, f: &BiPoly) -> BiPoly {
        self.assert_same_field(f);
        assert!(f.is_monic_in_y(), "divisor must be monic in y");
        let df = f.degree_y().unwrap();
        let mut r = self.clone();
        loop {
            let dy = match r.degree_y() {
                None => break,
                Some(d) => d,
            };
            if dy < df {
                break;
            }
            // the top row q(x)·y^dy gets replaced by -q(x)·(f - y^df)·y^{dy-df}
            let top: Vec<((u32, u32), u32)> =
                r.terms.range((dy, 0)..=(dy, u32::MAX)).map(|(&k, &v)| (k, v)).collect();
            for ((_, ex), c) in top {
                r.terms.remove(&(dy, ex));
                for (&(fey, fex), &fc) in &f.terms {
                    if fey == df && fex == 0 {
                        continue;
                    }
                    let key = (dy - df + fey, ex + fex);
                    r.insert_add(key, self.field.neg(self.field.mul(c, fc)));
                }
            }
        }
        r
    }

    /// base^{p^s} mod f (f monic in y), climbing one Frobenius level at a
    /// time so intermediate results stay sparse.
    pub fn frobenius_pow_mod(&self, s: u32, f: &BiPoly) -> BiPoly {
        let mut acc = self.rem_monic_y(f);
        for _ in 0..s {
            acc = acc.frobenius_pow(1).rem_monic_y(f);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// sparse homogeneous trivariate

/// Sparse trivariate polynomial in (X, Y, Z); used for the projective side.
#[derive(Clone, PartialEq, Eq)]
pub struct TriPoly {
    field: Arc<Field>,
    terms: BTreeMap<(u32, u32, u32), u32>,
}

impl std::fmt::Debug for TriPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b, c), &v)| format!("{v}*X^{a}*Y^{b}*Z^{c}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl TriPoly {
    pub fn zero(field: &Arc<Field>) -> TriPoly {
        TriPoly { field: Arc::clone(field), terms: BTreeMap::new() }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Homogenize an affine polynomial to degree d with the third variable.
    pub fn homogenize(f: &BiPoly, d: u32) -> TriPoly {
        let mut out = TriPoly::zero(f.field());
        for (ex, ey, c) in f.terms() {
            assert!(ex + ey <= d, "total degree exceeds homogenization degree");
            out.terms.insert((ex, ey, d - ex - ey), c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32, u32), u32)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    fn insert_add(&mut self, key: (u32, u32, u32), c: u32) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(0);
        *entry = self.field.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn eval(&self, pt: [u32; 3]) -> u32 {
        let mut acc = 0u32;
        for (&(a, b, c), &v) in &self.terms {
            let t = self.field.mul(
                self.field.mul(self.field.pow(pt[0], a as u64), self.field.pow(pt[1], b as u64)),
                self.field.mul(self.field.pow(pt[2], c as u64), v),
            );
            acc = self.field.add(acc, t);
        }
        acc
    }

    /// Set the coordinate `chart` to 1; the two remaining coordinates become
    /// (x, y) in their cyclic order: chart 2 keeps (X, Y), chart 1 gives
    /// (X, Z), chart 0 gives (Y, Z).
    pub fn dehomogenize(&self, chart: usize) -> BiPoly {
        let mut out = BiPoly::zero(&self.field);
        for (&(a, b, c), &v) in &self.terms {
            let (ex, ey) = match chart {
                2 => (a, b),
                1 => (a, c),
                0 => (b, c),
                _ => panic!("chart must be 0, 1 or 2"),
            };
            out.insert_add((ey, ex), v);
        }
        out
    }

    /// F(A·(X,Y,Z)) for a 3×3 matrix A acting on column vectors.
    pub fn compose_linear(&self, a: &[[u32; 3]; 3]) -> TriPoly {
        let rows: Vec<TriPoly> = (0..3)
            .map(|i| {
                let mut row = TriPoly::zero(&self.field);
                row.insert_add((1, 0, 0), a[i][0]);
                row.insert_add((0, 1, 0), a[i][1]);
                row.insert_add((0, 0, 1), a[i][2]);
                row
            })
            .collect();
        let mut pows: [BTreeMap<u32, TriPoly>; 3] =
            [BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
        let mut out = TriPoly::zero(&self.field);
        for (&(e0, e1, e2), &v) in &self.terms {
            let mut term = TriPoly::zero(&self.field);
            term.insert_add((0, 0, 0), v);
            for (i, &e) in [e0, e1, e2].iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = pows[i].entry(e).or_insert_with(|| rows[i].pow(e as u64)).clone();
                term = term.mul(&pw);
            }
            for (key, c) in term.terms {
                out.insert_add(key, c);
            }
        }
        out
    }

    pub fn mul(&self, other: &TriPoly) -> TriPoly {
        let mut out = TriPoly::zero(&self.field);
        for (&(a1, b1, c1), &v1) in &self.terms {
            for (&(a2, b2, c2), &v2) in &other.terms {
                out.insert_add((a1 + a2, b1 + b2, c1 + c2), self.field.mul(v1, v2));
            }
        }
        out
    }

    pub fn frobenius_pow(&self, m: u32) -> TriPoly {
        let stretch = self.field.characteristic().pow(m);
        let mut out = TriPoly::zero(&self.field);
        for (&(a, b, c), &v) in &self.terms {
            out.terms
                .insert((a * stretch, b * stretch, c * stretch), self.field.frobenius(v, m));
        }
        out
    }

    pub fn pow(&self, e: u64) -> TriPoly {
        let p = self.field.characteristic() as u64;
        let mut result = TriPoly::zero(&self.field);
        result.insert_add((0, 0, 0), 1);
        let mut digits = Vec::new();
        let mut rest = e;
        while rest > 0 {
            digits.push((rest % p) as u32);
            rest /= p;
        }
        for (j, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let fj = self.frobenius_pow(j as u32);
            let mut small = fj.clone();
            for _ in 1..d {
                small = small.mul(&fj);
            }
            result = result.mul(&small);
        }
        result
    }

    pub fn scale(&self, s: u32) -> TriPoly {
        let mut out = TriPoly::zero(&self.field);
        if s == 0 {
            return out;
        }
        for (&key, &c) in &self.terms {
            out.terms.insert(key, self.field.mul(c, s));
        }
        out
    }

    /// Some(s) with self = s·other, if the two differ by a nonzero scalar.
    pub fn proportional_scalar(&self, other: &TriPoly) -> Option<u32> {
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let mut s = None;
        for ((ka, &va), (kb, &vb)) in self.terms.iter().zip(other.terms.iter()) {
            if ka != kb {
                return None;
            }
            let ratio = self.field.div(va, vb);
            match s {
                None => s = Some(ratio),
                Some(r) if r == ratio => {}
                _ => return None,
            }
        }
        s
    }
}

// ---------------------------------------------------------------------------
// linearized polynomials with step q²

/// L(x) = a_0·x + a_1·x^{q²} + ... + a_n·x^{q^{2n}} with a_n = 1 and a_0 ≠ 0
/// (so L is separable). Coefficients live in one field; q is a power of its
/// characteristic.
#[derive(Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    field: Arc<Field>,
    q: u64,
    coeffs: Vec<u32>,
}

impl std::fmt::Debug for LinearizedPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| format!("{c}*x^(q^{})", 2 * i))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl LinearizedPoly {
    pub fn new(field: &Arc<Field>, q: u64, coeffs: Vec<u32>) -> Result<LinearizedPoly> {
        let p = field.characteristic() as u64;
        if q < 2 {
            return Err(Error::InvalidParameter("q must be at least 2".into()));
        }
        let mut t = q;
        while t % p == 0 {
            t /= p;
        }
        if t != 1 {
            return Err(Error::InvalidParameter(format!(
                "q = {q} is not a power of the characteristic {p}"
            )));
        }
        if coeffs.is_empty() || *coeffs.last().unwrap() != 1 {
            return Err(Error::InvalidParameter(
                "linearized coefficients must end in 1 (monic)".into(),
            ));
        }
        if coeffs.len() > 1 && coeffs[0] == 0 {
            return Err(Error::InvalidParameter(
                "constant-term coefficient must be a unit (separability)".into(),
            ));
        }
        Ok(LinearizedPoly { field: Arc::clone(field), q, coeffs })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of q²-steps; the ordinary degree is q^{2n}.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn degree(&self) -> u64 {
        self.q.pow(2 * self.n() as u32)
    }

    pub fn eval(&self, x: u32) -> u32 {
        let q2 = self.q * self.q;
        let mut acc = 0u32;
        let mut xq = x;
        for &c in &self.coeffs {
            acc = self.field.add(acc, self.field.mul(c, xq));
            xq = self.field.pow(xq, q2);
        }
        acc
    }

    pub fn as_poly(&self) -> Poly {
        let mut p = Poly::zero(&self.field);
        let mut e = 1u64;
        let q2 = self.q * self.q;
        for &c in &self.coeffs {
            assert!(e <= 1 << 22, "linearized degree too large to densify");
            if c != 0 {
                p = p.add(&Poly::monomial(&self.field, c, e as usize));
            }
            e *= q2;
        }
        p
    }

    /// Substitute x and rescale: coefficients of s_out·L(s_in·x).
    pub fn twist_coeffs(&self, s_in: u32, s_out: u32) -> Vec<u32> {
        let q2 = self.q * self.q;
        let mut pw = s_in;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(self.field.mul(self.field.mul(c, pw), s_out));
            pw = self.field.pow(pw, q2);
        }
        out
    }

    /// All roots of L in its field, by GF(p)-linear algebra on the additive
    /// map. Returned sorted. The size is a power of p dividing q^{2n}.
    pub fn kernel(&self) -> Vec<u32> {
        let p = self.field.characteristic();
        let k = self.field.degree() as usize;
        // columns are images of the GF(p)-basis
        let mut cols: Vec<Vec<u32>> = Vec::with_capacity(k);
        for j in 0..k {
            let basis = (p as u64).pow(j as u32) as u32;
            cols.push(self.field.coords(self.eval(basis)));
        }
        // row-reduce the k×k matrix [cols] over GF(p)
        let mut mat: Vec<Vec<u32>> = (0..k)
            .map(|r| (0..k).map(|c| cols[c][r]).collect())
            .collect();
        let mut pivot_cols = Vec::new();
        let mut rank_row = 0usize;
        for col in 0..k {
            let mut pivot = None;
            for row in rank_row..k {
                if mat[row][col] != 0 {
                    pivot = Some(row);
                    break;
                }
            }
            let Some(pr) = pivot else { continue };
            mat.swap(rank_row, pr);
            let inv = mod_inv_prime(mat[rank_row][col], p);
            for c in 0..k {
                mat[rank_row][c] = (mat[rank_row][c] as u64 * inv as u64 % p as u64) as u32;
            }
            for row in 0..k {
                if row != rank_row && mat[row][col] != 0 {
                    let factor = mat[row][col];
                    for c in 0..k {
                        let sub = (factor as u64 * mat[rank_row][c] as u64) % p as u64;
                        mat[row][c] =
                            ((mat[row][c] as u64 + p as u64 - sub) % p as u64) as u32;
                    }
                }
            }
            pivot_cols.push(col);
            rank_row += 1;
            if rank_row == k {
                break;
            }
        }
        let free_cols: Vec<usize> = (0..k).filter(|c| !pivot_cols.contains(c)).collect();
        // basis of the nullspace, one vector per free column
        let mut basis_vecs: Vec<Vec<u32>> = Vec::new();
        for &fc in &free_cols {
            let mut v = vec![0u32; k];
            v[fc] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - mat[r][fc] % p) % p;
            }
            basis_vecs.push(v);
        }
        // enumerate all GF(p)-combinations
        let count = (p as u64).pow(basis_vecs.len() as u32);
        let mut out = Vec::with_capacity(count as usize);
        for idx in 0..count {
            let mut acc = vec![0u32; k];
            let mut rest = idx;
            for bv in &basis_vecs {
                let d = (rest % p as u64) as u32;
                rest /= p as u64;
                if d != 0 {
                    for (slot, &b) in acc.iter_mut().zip(bv.iter()) {
                        *slot = (*slot + d * b) % p;
                    }
                }
            }
            out.push(self.field.from_coords(&acc).expect("kernel coords fit"));
        }
        out.sort_unstable();
        debug_assert!(out.iter().all(|&z| self.eval(z) == 0));
        out
    }
}

fn mod_inv_prime(a: u32, p: u32) -> u32 {
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

// ---------------------------------------------------------------------------
// value sets

/// The value set {F(a) : a in the coefficient field}, sorted. Exhaustive by
/// design; fields here are small.
pub fn value_set(f: &Poly) -> Vec<u32> {
    let field = f.field();
    let mut seen = vec![false; field.order() as usize];
    for a in field.elements() {
        seen[f.eval(a) as usize] = true;
    }
    (0..field.order() as u32).filter(|&v| seen[v as usize]).collect()
}

/// Whether |V_F| hits the lower bound ⌈#field / deg F⌉.
pub fn is_minimal_value_set(f: &Poly) -> Result<bool> {
    let d = f.degree().ok_or_else(|| {
        Error::InvalidParameter("value-set minimality needs a nonzero polynomial".into())
    })?;
    if d == 0 {
        return Err(Error::InvalidParameter(
            "value-set minimality needs positive degree".into(),
        ));
    }
    let v = value_set(f);
    Ok(v.len() as u64 == ceil_div(f.field().order(), d as u64))
}

/// Outcome of the two value-set factorization identities for F = L^{q+1}:
/// the product over the value set equals θ·(x^{#field} − x)·F', and the
/// reduced product over the nonzero values equals θ·a_0·(x^{#field} − x)/L
/// rearranged as L·Π(F − γᵢ) = θ·a_0·(x^{#field} − x).
pub struct MvspCheck {
    pub holds: bool,
    pub theta: Option<u32>,
    pub value_set_size: usize,
}

pub fn check_mvsp_factorization(l: &LinearizedPoly) -> MvspCheck {
    let field = l.field();
    let q = l.q();
    let f = l.as_poly();
    let fq1 = f.frobenius_pow(log_char(field, q)).mul(&f);
    let v = value_set(&fq1);
    let order = field.order();
    let fprime = fq1.derivative();

    // left side: product over the whole value set
    let mut lhs = Poly::constant(field, 1);
    for &gamma in &v {
        lhs = lhs.mul(&fq1.sub(&Poly::constant(field, gamma)));
    }
    let xq_minus_x =
        Poly::monomial(field, 1, order as usize).sub(&Poly::monomial(field, 1, 1));
    let rhs_no_theta = xq_minus_x.mul(&fprime);
    let (holds1, theta) = match (lhs.degree(), rhs_no_theta.degree()) {
        (Some(dl), Some(dr)) if dl == dr => {
            let theta = field.div(lhs.leading_coeff(), rhs_no_theta.leading_coeff());
            (lhs == rhs_no_theta.scale(theta), Some(theta))
        }
        _ => (false, None),
    };
    let holds2 = theta.is_some_and(|theta| {
        // L·Π_{γ≠0}(F − γ) = θ·a_0·(x^{#field} − x)
        let mut left = f.clone();
        for &gamma in v.iter().filter(|&&g| g != 0) {
            left = left.mul(&fq1.sub(&Poly::constant(field, gamma)));
        }
        let a0 = l.coeffs()[0];
        left == xq_minus_x.scale(field.mul(theta, a0))
    });
    MvspCheck { holds: holds1 && holds2, theta, value_set_size: v.len() }
}

/// q = p^e; recover e so that the q-th power is e Frobenius steps.
pub fn log_char(field: &Arc<Field>, q: u64) -> u32 {
    let p = field.characteristic() as u64;
    let mut e = 0u32;
    let mut t = q;
    while t > 1 {
        t /= p;
        e += 1;
    }
    e
}

/// T(x) = Π_{γ∈V}(x − γ) together with the exponent-shape verdict: the
/// support must consist of the exponents q·tᵢ with tᵢ = (q^{2ui−1}+1)/(q+1)
/// for some factorization u·m of the tower step. The degenerate value set
/// {0} yields T(x) = x with u = m = 0.
pub struct TShape {
    pub t: Poly,
    pub u: u32,
    pub m: u32,
    pub shape_ok: bool,
}

pub fn build_t_and_check_shape(l: &LinearizedPoly) -> TShape {
    let field = l.field();
    let q = l.q();
    let e = log_char(field, q);
    let f = l.as_poly();
    let fq1 = f.frobenius_pow(e).mul(&f);
    let v = value_set(&fq1);
    let mut t = Poly::constant(field, 1);
    for &gamma in &v {
        t = t.mul(&Poly::monomial(field, 1, 1).sub(&Poly::constant(field, gamma)));
    }
    if v == vec![0] {
        return TShape { t, u: 0, m: 0, shape_ok: true };
    }
    // #field = q^{2(n + um)} determines um when it is a q²-power multiple
    let n = l.n() as u32;
    let order = field.order();
    let q2n = q.pow(2 * n);
    let mut um = None;
    if order % q2n == 0 {
        let mut ratio = order / q2n;
        let q2 = q * q;
        let mut steps = 0u32;
        while ratio > 1 && ratio % q2 == 0 {
            ratio /= q2;
            steps += 1;
        }
        if ratio == 1 && steps >= 1 {
            um = Some(steps);
        }
    }
    let Some(um) = um else {
        return TShape { t, u: 0, m: 0, shape_ok: false };
    };
    let support: Vec<u64> = t
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, _)| i as u64)
        .collect();
    for u in 1..=um {
        if um % u != 0 {
            continue;
        }
        let m = um / u;
        // exponents q·t_i, with q·t_0 = 1
        let mut exps = vec![1u64];
        for i in 1..=m {
            let num = q.pow(2 * u * i) + q;
            debug_assert_eq!(num % (q + 1), 0);
            exps.push(num / (q + 1));
        }
        let top = *exps.last().unwrap();
        let ok = support.iter().all(|s| exps.contains(s))
            && t.degree() == Some(top as usize)
            && t.leading_coeff() == 1;
        if ok {
            return TShape { t, u, m, shape_ok: true };
        }
    }
    TShape { t, u: 0, m: 0, shape_ok: false }
}

/// The composition identity T(L^{q+1}) = θ·a_0·(x^{p^s} − x)·L^q, with θ
/// solved from the leading coefficients. `s_pow` is p^s itself.
pub fn check_compos(l: &LinearizedPoly, t: &Poly, s_pow: u64) -> bool {
    let field = l.field();
    let e = log_char(field, l.q());
    let f = l.as_poly();
    let fq1 = f.frobenius_pow(e).mul(&f);
    let lhs = t.compose(&fq1);
    let lq = f.frobenius_pow(e);
    let xps_minus_x =
        Poly::monomial(field, 1, s_pow as usize).sub(&Poly::monomial(field, 1, 1));
    let rhs_no_theta = xps_minus_x.mul(&lq).scale(l.coeffs()[0]);
    match (lhs.degree(), rhs_no_theta.degree()) {
        (Some(dl), Some(dr)) if dl == dr => {
            let theta = field.div(lhs.leading_coeff(), rhs_no_theta.leading_coeff());
            lhs == rhs_no_theta.scale(theta)
        }
        _ => false,
    }
}

/// L^{q²} − β^{-(q²-1)}·L = x^{q^{2(n+1)}} − x, the splitting identity tying
/// L to the Frobenius of the big field.
pub fn check_poly_l(l: &LinearizedPoly, beta: u32) -> bool {
    if beta == 0 {
        return false;
    }
    let field = l.field();
    let q = l.q();
    let e = log_char(field, q);
    let f = l.as_poly();
    let lhs = f
        .frobenius_pow(2 * e)
        .sub(&f.scale(field.inv(field.pow(beta, q * q - 1))));
    let top = q.pow(2 * (l.n() as u32 + 1));
    let rhs =
        Poly::monomial(field, 1, top as usize).sub(&Poly::monomial(field, 1, 1));
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_tower;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normalized_l(p: u32, e: u32, n: u32) -> LinearizedPoly {
        let t = make_tower(p, e, n).unwrap();
        LinearizedPoly::new(&t.big, t.q(), vec![1; n as usize + 1]).unwrap()
    }

    #[test]
    fn linearized_eval_matches_monomial_sum() {
        for (p, e, n) in [(2, 1, 1), (3, 1, 1), (2, 1, 2)] {
            let l = normalized_l(p, e, n);
            let field = l.field().clone();
            let as_poly = l.as_poly();
            for a in field.elements() {
                assert_eq!(l.eval(a), as_poly.eval(a));
            }
        }
    }

    #[test]
    fn linearized_is_additive_and_semilinear() {
        let l = normalized_l(3, 1, 1);
        let field = l.field().clone();
        let q2 = l.q() * l.q();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let subfield: Vec<u32> =
            field.elements().filter(|&x| field.pow(x, q2) == x).collect();
        for _ in 0..1000 {
            let a = rng.gen_range(0..field.order() as u32);
            let b = rng.gen_range(0..field.order() as u32);
            assert_eq!(l.eval(field.add(a, b)), field.add(l.eval(a), l.eval(b)));
            let mu = subfield[rng.gen_range(0..subfield.len())];
            assert_eq!(l.eval(field.mul(mu, a)), field.mul(mu, l.eval(a)));
        }
    }

    #[test]
    fn kernel_matches_brute_force_roots() {
        for ((p, e, n), expected) in [((2, 1, 1), 4), ((3, 1, 1), 9), ((2, 1, 2), 16)] {
            let l = normalized_l(p, e, n);
            let field = l.field().clone();
            let brute: Vec<u32> = field.elements().filter(|&x| l.eval(x) == 0).collect();
            let kernel = l.kernel();
            assert_eq!(kernel, brute);
            assert_eq!(kernel.len(), expected);
            // for n = 1 the kernel is a line over GF(q²): every element is a
            // GF(q²)-multiple of any fixed nonzero one
            if n == 1 {
                let q2 = l.q() * l.q();
                let z0 = *kernel.iter().find(|&&z| z != 0).unwrap();
                let mut line: Vec<u32> = field
                    .elements()
                    .filter(|&mu| field.pow(mu, q2) == mu)
                    .map(|mu| field.mul(mu, z0))
                    .collect();
                line.sort_unstable();
                assert_eq!(kernel, line);
            }
        }
    }

    #[test]
    fn kernel_is_a_module_over_the_quadratic_subfield() {
        let l = normalized_l(2, 1, 2);
        let field = l.field().clone();
        let kernel = l.kernel();
        let q2 = l.q() * l.q();
        let subfield: Vec<u32> =
            field.elements().filter(|&x| field.pow(x, q2) == x).collect();
        for &a in &kernel {
            for &b in &kernel {
                assert!(kernel.binary_search(&field.add(a, b)).is_ok());
            }
            for &mu in &subfield {
                assert!(kernel.binary_search(&field.mul(mu, a)).is_ok());
            }
        }
    }

    #[test]
    fn trivial_kernel_when_no_rational_roots() {
        // g·x + x^4 over GF(16) with g a generator: x^3 = -g has no root in
        // GF(16) since g is not a cube there.
        let field = crate::gf::Field::new(2, 4).unwrap();
        let g = field.generator();
        let l = LinearizedPoly::new(&field, 2, vec![g, 1]).unwrap();
        assert_eq!(l.kernel(), vec![0]);
    }

    #[test]
    fn value_set_of_the_norm_composite() {
        // (x + x^4)^3 on GF(16): L is the trace onto GF(4), the cube is the
        // norm onto GF(2), so the value set is exactly {0, 1}.
        let l = normalized_l(2, 1, 1);
        let field = l.field().clone();
        let f = l.as_poly();
        let fq1 = f.frobenius_pow(1).mul(&f);
        let v = value_set(&fq1);
        assert_eq!(v, vec![0, 1]);
        let mut brute: Vec<u32> = field
            .elements()
            .map(|a| {
                let la = l.eval(a);
                field.mul(field.pow(la, 2), la)
            })
            .collect();
        brute.sort_unstable();
        brute.dedup();
        assert_eq!(v, brute);
    }

    #[test]
    fn minimal_value_set_examples() {
        let f4 = crate::gf::Field::new(2, 2).unwrap();
        // x on GF(4): everything is a value
        assert!(is_minimal_value_set(&Poly::monomial(&f4, 1, 1)).unwrap());
        // x² + x has image {0, 1}, and ⌈4/2⌉ = 2
        let x2x = Poly::new(&f4, vec![0, 1, 1]);
        assert!(is_minimal_value_set(&x2x).unwrap());
        // x² is bijective (Frobenius), so 4 values against ⌈4/2⌉ = 2
        assert!(!is_minimal_value_set(&Poly::monomial(&f4, 1, 2)).unwrap());
        // the curve composite at both small towers
        for (p, e, n) in [(2, 1, 1), (3, 1, 1)] {
            let l = normalized_l(p, e, n);
            let f = l.as_poly();
            let e_exp = log_char(l.field(), l.q());
            let fq1 = f.frobenius_pow(e_exp).mul(&f);
            assert!(is_minimal_value_set(&fq1).unwrap());
        }
        assert!(is_minimal_value_set(&Poly::zero(&f4)).is_err());
        assert!(is_minimal_value_set(&Poly::constant(&f4, 1)).is_err());
    }

    #[test]
    fn negated_shifted_composite_has_the_same_value_set() {
        // -L^{q+1} - c matches L^{q+1} in value set for the normalized c = 1
        // members; in particular both sides are minimal.
        for (p, e, n) in [(2, 1, 1), (3, 1, 1)] {
            let l = normalized_l(p, e, n);
            let field = l.field().clone();
            let f = l.as_poly();
            let e_exp = log_char(&field, l.q());
            let fq1 = f.frobenius_pow(e_exp).mul(&f);
            let shifted = fq1.neg().sub(&Poly::constant(&field, 1));
            assert!(is_minimal_value_set(&shifted).unwrap());
            // value sets agree as sets
            let va = value_set(&fq1);
            let vb = value_set(&shifted);
            assert_eq!(va, vb);
        }
    }

    #[test]
    fn mvsp_factorization_on_the_grid() {
        for (p, e, n) in [(2, 1, 1), (3, 1, 1)] {
            let l = normalized_l(p, e, n);
            let res = check_mvsp_factorization(&l);
            assert!(res.holds);
            // a_0 = 1 forces θ = 1
            assert_eq!(res.theta, Some(1));
            assert_eq!(res.value_set_size, l.q() as usize);
        }
    }

    #[test]
    fn mvsp_factorization_degenerate_positive() {
        // L = x over GF(4), F = x³: value set {0,1} of size ⌈4/3⌉, and
        // x³(x³−1) = (x⁴−x)·x² exactly.
        let f4 = crate::gf::Field::new(2, 2).unwrap();
        let l = LinearizedPoly::new(&f4, 2, vec![1]).unwrap();
        let res = check_mvsp_factorization(&l);
        assert!(res.holds);
        assert_eq!(res.theta, Some(1));
        assert_eq!(res.value_set_size, 2);
    }

    #[test]
    fn mvsp_factorization_rejects_non_minimal() {
        // g·x + x^4 over GF(16) is injective, so the composite has a fat
        // value set and the degrees cannot match.
        let field = crate::gf::Field::new(2, 4).unwrap();
        let g = field.generator();
        let l = LinearizedPoly::new(&field, 2, vec![g, 1]).unwrap();
        let res = check_mvsp_factorization(&l);
        assert!(!res.holds);
        // x over GF(8): value set is everything, 8 ≠ ⌈8/3⌉
        let f8 = crate::gf::Field::new(2, 3).unwrap();
        let l = LinearizedPoly::new(&f8, 2, vec![1]).unwrap();
        assert!(!check_mvsp_factorization(&l).holds);
    }

    #[test]
    fn t_polynomial_shape_on_the_grid() {
        // q = 2: T = x² + x; q = 3: T = x³ - x; both are x^q - x
        let l2 = normalized_l(2, 1, 1);
        let s2 = build_t_and_check_shape(&l2);
        assert!(s2.shape_ok);
        assert_eq!((s2.u, s2.m), (1, 1));
        assert_eq!(s2.t.coeffs(), &[0, 1, 1]);

        let l3 = normalized_l(3, 1, 1);
        let s3 = build_t_and_check_shape(&l3);
        assert!(s3.shape_ok);
        assert_eq!((s3.u, s3.m), (1, 1));
        assert_eq!(s3.t.coeffs(), &[0, 2, 0, 1]);
    }

    #[test]
    fn t_polynomial_degenerate_value_set() {
        // x + x^4 vanishes identically on GF(4), so V = {0} and T = x.
        let f4 = crate::gf::Field::new(2, 2).unwrap();
        let l = LinearizedPoly::new(&f4, 2, vec![1, 1]).unwrap();
        let s = build_t_and_check_shape(&l);
        assert!(s.shape_ok);
        assert_eq!(s.t.coeffs(), &[0, 1]);
        assert_eq!((s.u, s.m), (0, 0));
    }

    #[test]
    fn composition_identity_on_the_grid() {
        for (p, e, n) in [(2, 1, 1), (3, 1, 1)] {
            let l = normalized_l(p, e, n);
            let shape = build_t_and_check_shape(&l);
            let q = l.q();
            let s_pow = q.pow(2 * (n + 1));
            assert!(check_compos(&l, &shape.t, s_pow));
            // wrong Frobenius power: degree mismatch
            assert!(!check_compos(&l, &shape.t, s_pow * p as u64));
        }
    }

    #[test]
    fn splitting_identity_for_l() {
        let l2 = normalized_l(2, 1, 1);
        assert!(check_poly_l(&l2, 1));
        let l3 = normalized_l(3, 1, 1);
        assert!(check_poly_l(&l3, 1));
        // twisted family member: coefficients β^{q^{2(i+1)}-1}
        let field = l2.field().clone();
        let q = l2.q();
        for beta in 2..field.order() as u32 {
            let a0 = field.pow(beta, q * q - 1);
            let l = LinearizedPoly::new(&field, q, vec![a0, 1]).unwrap();
            assert!(check_poly_l(&l, beta), "twisted member fails at β = {beta}");
            if a0 != 1 {
                assert!(!check_poly_l(&l, 1), "mismatched β accepted at β = {beta}");
            }
        }
        assert!(!check_poly_l(&l2, 0));
    }

    #[test]
    fn linearized_constructor_guards() {
        let f4 = crate::gf::Field::new(2, 2).unwrap();
        assert!(LinearizedPoly::new(&f4, 1, vec![1]).is_err());
        assert!(LinearizedPoly::new(&f4, 3, vec![1]).is_err());
        assert!(LinearizedPoly::new(&f4, 2, vec![]).is_err());
        assert!(LinearizedPoly::new(&f4, 2, vec![1, 2]).is_err());
        assert!(LinearizedPoly::new(&f4, 2, vec![0, 1]).is_err());
    }

    // ---- bivariate ----

    fn sample_bipoly(field: &Arc<Field>, rng: &mut ChaCha8Rng, max_deg: u32) -> BiPoly {
        let mut f = BiPoly::zero(field);
        for _ in 0..rng.gen_range(1..6) {
            let c = rng.gen_range(0..field.order() as u32);
            let ex = rng.gen_range(0..=max_deg);
            let ey = rng.gen_range(0..=max_deg);
            f = f.add(&BiPoly::term(field, c, ex, ey));
        }
        f
    }

    #[test]
    fn bipoly_ring_axioms_sampled() {
        let field = crate::gf::Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let a = sample_bipoly(&field, &mut rng, 4);
            let b = sample_bipoly(&field, &mut rng, 4);
            let c = sample_bipoly(&field, &mut rng, 4);
            assert_eq!(a.mul(&b), b.mul(&a));
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // evaluation is a ring hom
            let x = rng.gen_range(0..9);
            let y = rng.gen_range(0..9);
            assert_eq!(a.mul(&b).eval(x, y), field.mul(a.eval(x, y), b.eval(x, y)));
            assert_eq!(a.add(&b).eval(x, y), field.add(a.eval(x, y), b.eval(x, y)));
        }
    }

    #[test]
    fn bipoly_pow_matches_repeated_mul() {
        let field = crate::gf::Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let a = sample_bipoly(&field, &mut rng, 3);
            let mut acc = BiPoly::constant(&field, 1);
            for e in 0..6u64 {
                assert_eq!(a.pow(e), acc);
                acc = acc.mul(&a);
            }
        }
    }

    #[test]
    fn transpose_is_an_involution() {
        let field = crate::gf::Field::new(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let a = sample_bipoly(&field, &mut rng, 5);
            assert_eq!(a.transpose().transpose(), a);
            assert_eq!(a.transpose().eval(3, 5), a.eval(5, 3));
        }
    }

    #[test]
    fn monic_remainder_basics() {
        let t = make_tower(2, 1, 1).unwrap();
        let field = &t.big;
        // f = y² + x·y + 1, monic in y
        let f = BiPoly::term(field, 1, 0, 2)
            .add(&BiPoly::term(field, 1, 1, 1))
            .add(&BiPoly::constant(field, 1));
        assert!(f.is_monic_in_y());
        assert!(f.rem_monic_y(&f).is_zero());
        let yf_plus_1 = BiPoly::term(field, 1, 0, 1).mul(&f).add(&BiPoly::constant(field, 1));
        assert_eq!(yf_plus_1.rem_monic_y(&f), BiPoly::constant(field, 1));
        let x2 = BiPoly::term(field, 1, 2, 0);
        let g = f.mul(&f).add(&BiPoly::term(field, 1, 1, 0).mul(&f)).add(&x2);
        assert_eq!(g.rem_monic_y(&f), x2);
    }

    #[test]
    fn monic_remainder_roundtrip_random() {
        let field = crate::gf::Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        // divisor y³ + x²y + 2x
        let f = BiPoly::term(&field, 1, 0, 3)
            .add(&BiPoly::term(&field, 1, 2, 1))
            .add(&BiPoly::term(&field, 2, 1, 0));
        for _ in 0..1000 {
            let a = sample_bipoly(&field, &mut rng, 4);
            // remainder candidate with y-degree < 3
            let mut r = BiPoly::zero(&field);
            for _ in 0..3 {
                let c = rng.gen_range(0..9);
                let ex = rng.gen_range(0..5);
                let ey = rng.gen_range(0..3);
                r = r.add(&BiPoly::term(&field, c, ex, ey));
            }
            let g = a.mul(&f).add(&r);
            assert_eq!(g.rem_monic_y(&f), r);
        }
    }

    #[test]
    fn frobenius_tower_pow_mod() {
        let field = crate::gf::Field::new(2, 4).unwrap();
        let f = BiPoly::term(&field, 1, 0, 3)
            .add(&BiPoly::term(&field, 1, 1, 1))
            .add(&BiPoly::constant(&field, 1));
        let y = BiPoly::term(&field, 1, 0, 1);
        // y^{2^s} mod f agrees with the naive power reduced once
        for s in 0..6u32 {
            let naive = y.pow(1 << s).rem_monic_y(&f);
            assert_eq!(y.frobenius_pow_mod(s, &f), naive);
        }
    }

    // ---- trivariate ----

    #[test]
    fn homogenize_roundtrip_and_eval() {
        let field = crate::gf::Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let f = sample_bipoly(&field, &mut rng, 3);
            let d = f.total_degree().unwrap_or(0) + rng.gen_range(0..3);
            let hf = TriPoly::homogenize(&f, d);
            assert_eq!(hf.dehomogenize(2), f);
            let x = rng.gen_range(0..9);
            let y = rng.gen_range(0..9);
            assert_eq!(hf.eval([x, y, 1]), f.eval(x, y));
        }
    }

    #[test]
    fn compose_linear_identity_and_scaling() {
        let field = crate::gf::Field::new(2, 4).unwrap();
        let f = BiPoly::term(&field, 1, 3, 0)
            .add(&BiPoly::term(&field, 1, 0, 3))
            .add(&BiPoly::constant(&field, 1));
        let hf = TriPoly::homogenize(&f, 3);
        let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        assert_eq!(hf.compose_linear(&id), hf);
        // scalar matrix scales a degree-d form by λ^d
        let lam = 3u32;
        let scal = [[lam, 0, 0], [0, lam, 0], [0, 0, lam]];
        let lhs = hf.compose_linear(&scal);
        assert_eq!(lhs.proportional_scalar(&hf), Some(field.pow(lam, 3)));
    }

    #[test]
    fn compose_linear_matches_pointwise_evaluation() {
        let field = crate::gf::Field::new(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let f = sample_bipoly(&field, &mut rng, 3);
            let d = f.total_degree().unwrap_or(0);
            let hf = TriPoly::homogenize(&f, d);
            let mut a = [[0u32; 3]; 3];
            for row in &mut a {
                for val in row.iter_mut() {
                    *val = rng.gen_range(0..9);
                }
            }
            let comp = hf.compose_linear(&a);
            for _ in 0..10 {
                let v = [rng.gen_range(0..9), rng.gen_range(0..9), rng.gen_range(0..9)];
                let av = [
                    field.add(field.add(field.mul(a[0][0], v[0]), field.mul(a[0][1], v[1])), field.mul(a[0][2], v[2])),
                    field.add(field.add(field.mul(a[1][0], v[0]), field.mul(a[1][1], v[1])), field.mul(a[1][2], v[2])),
                    field.add(field.add(field.mul(a[2][0], v[0]), field.mul(a[2][1], v[1])), field.mul(a[2][2], v[2])),
                ];
                assert_eq!(comp.eval(v), hf.eval(av));
            }
        }
    }
}
