//! The linear automorphism group of a family member: projective
//! collineations preserving the plane model. Generators come in four
//! families transported from the split model; an independent closed-form
//! list describes the whole group directly. The restriction to the linear
//! parts yields the exact sequence whose kernel is the norm-scalar and
//! translation part and whose image is PGL(2, q) up to a diagonal
//! conjugation.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{build_cn_prime, tu_from_xy_matrix, CurveFamilyParams, PlaneCurve};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::poly::{BiPoly, TriPoly};

// ---------------------------------------------------------------------------
// collineations

/// A projective plane collineation as a canonical 3×3 matrix, row-major,
/// scaled so the first nonzero entry is 1. Matrices act on column vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collineation(pub [u32; 9]);

impl std::fmt::Debug for Collineation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = &self.0;
        write!(
            f,
            "[{} {} {} | {} {} {} | {} {} {}]",
            m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8]
        )
    }
}

fn canonicalize(field: &Arc<Field>, m: [u32; 9]) -> [u32; 9] {
    let lead = m.iter().copied().find(|&c| c != 0).expect("zero matrix");
    let inv = field.inv(lead);
    let mut out = [0u32; 9];
    for (slot, &v) in out.iter_mut().zip(m.iter()) {
        *slot = field.mul(v, inv);
    }
    out
}

fn det3(field: &Arc<Field>, m: &[u32; 9]) -> u32 {
    let mul = |a: u32, b: u32| field.mul(a, b);
    let t1 = mul(m[0], field.sub(mul(m[4], m[8]), mul(m[5], m[7])));
    let t2 = mul(m[1], field.sub(mul(m[3], m[8]), mul(m[5], m[6])));
    let t3 = mul(m[2], field.sub(mul(m[3], m[7]), mul(m[4], m[6])));
    field.add(field.sub(t1, t2), t3)
}

fn adjugate(field: &Arc<Field>, m: &[u32; 9]) -> [u32; 9] {
    let mul = |a: u32, b: u32| field.mul(a, b);
    let sub = |a: u32, b: u32| field.sub(a, b);
    [
        sub(mul(m[4], m[8]), mul(m[5], m[7])),
        sub(mul(m[2], m[7]), mul(m[1], m[8])),
        sub(mul(m[1], m[5]), mul(m[2], m[4])),
        sub(mul(m[5], m[6]), mul(m[3], m[8])),
        sub(mul(m[0], m[8]), mul(m[2], m[6])),
        sub(mul(m[2], m[3]), mul(m[0], m[5])),
        sub(mul(m[3], m[7]), mul(m[4], m[6])),
        sub(mul(m[1], m[6]), mul(m[0], m[7])),
        sub(mul(m[0], m[4]), mul(m[1], m[3])),
    ]
}

impl Collineation {
    pub fn new(field: &Arc<Field>, m: [u32; 9]) -> Result<Collineation> {
        if det3(field, &m) == 0 {
            return Err(Error::InvalidParameter("matrix is not invertible".into()));
        }
        Ok(Collineation(canonicalize(field, m)))
    }

    pub fn identity() -> Collineation {
        Collineation([1, 0, 0, 0, 1, 0, 0, 0, 1])
    }

    pub fn matrix(&self) -> &[u32; 9] {
        &self.0
    }

    /// self ∘ other as maps, i.e. the matrix product self·other.
    pub fn compose(&self, field: &Arc<Field>, other: &Collineation) -> Collineation {
        let a = &self.0;
        let b = &other.0;
        let mut out = [0u32; 9];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0u32;
                for (k, item) in b.iter().skip(j).step_by(3).enumerate() {
                    acc = field.add(acc, field.mul(a[3 * i + k], *item));
                }
                out[3 * i + j] = acc;
            }
        }
        Collineation(canonicalize(field, out))
    }

    pub fn inverse(&self, field: &Arc<Field>) -> Collineation {
        // projectively the adjugate IS the inverse
        Collineation(canonicalize(field, adjugate(field, &self.0)))
    }

    pub fn apply_point(&self, field: &Arc<Field>, pt: [u32; 3]) -> [u32; 3] {
        let m = &self.0;
        let row = |i: usize| {
            field.add(
                field.add(field.mul(m[3 * i], pt[0]), field.mul(m[3 * i + 1], pt[1])),
                field.mul(m[3 * i + 2], pt[2]),
            )
        };
        crate::curve::canonical_point(field, [row(0), row(1), row(2)])
    }

    /// Image of a line under the collineation: coefficients transform by
    /// the inverse transpose, so incidence is preserved.
    pub fn apply_line(&self, field: &Arc<Field>, l: [u32; 3]) -> [u32; 3] {
        let inv = self.inverse(field);
        let m = &inv.0;
        let col = |j: usize| {
            field.add(
                field.add(field.mul(m[j], l[0]), field.mul(m[3 + j], l[1])),
                field.mul(m[6 + j], l[2]),
            )
        };
        crate::curve::canonical_line(field, [col(0), col(1), col(2)])
    }

    /// Affine collineations fix the line at infinity: zero bottom-left
    /// entries (the bottom-right one is then forced nonzero).
    pub fn is_affine(&self) -> bool {
        self.0[6] == 0 && self.0[7] == 0
    }

    /// Rescale so the bottom-right entry is 1; requires an affine matrix.
    pub fn affine_normalized(&self, field: &Arc<Field>) -> [u32; 9] {
        assert!(self.is_affine() && self.0[8] != 0, "not an affine collineation");
        let inv = field.inv(self.0[8]);
        let mut out = [0u32; 9];
        for (slot, &v) in out.iter_mut().zip(self.0.iter()) {
            *slot = field.mul(v, inv);
        }
        out
    }
}

// ---------------------------------------------------------------------------
// curve preservation

/// Whether the collineation maps the curve to itself: the composed defining
/// form must be a scalar multiple of the original. Affine maps take a fast
/// bivariate route; general ones go through the homogeneous form.
pub fn preserves_curve(field: &Arc<Field>, curve: &PlaneCurve, c: &Collineation) -> bool {
    if c.is_affine() {
        let m = c.affine_normalized(field);
        let gx = BiPoly::term(field, m[0], 1, 0)
            .add(&BiPoly::term(field, m[1], 0, 1))
            .add(&BiPoly::constant(field, m[2]));
        let gy = BiPoly::term(field, m[3], 1, 0)
            .add(&BiPoly::term(field, m[4], 0, 1))
            .add(&BiPoly::constant(field, m[5]));
        let composed = curve.f.substitute(&gx, &gy);
        return composed.proportional_scalar(&curve.f).is_some();
    }
    let hf = TriPoly::homogenize(&curve.f, curve.degree as u32);
    let m = &c.0;
    let a = [
        [m[0], m[1], m[2]],
        [m[3], m[4], m[5]],
        [m[6], m[7], m[8]],
    ];
    hf.compose_linear(&a).proportional_scalar(&hf).is_some()
}

// ---------------------------------------------------------------------------
// generators

/// The four generator families, transported to the defining model where
/// they do not live there natively:
///   1. translations of the split model by kernel pairs (q^{4n} maps),
///   2. shears t -> t + d·u with d^q + d = 0 (q maps),
///   3. bidegree scalings diag(e, e^{-q}, 1) of the split model (q²-1 maps),
///   4. native scalings diag(l, 1, 1) with l^{q+1} = 1 (q+1 maps).
pub fn explicit_generators(params: &CurveFamilyParams) -> Vec<Collineation> {
    let field = params.field();
    let q = params.q();
    let tu = build_cn_prime(params);
    let m = tu_from_xy_matrix(params, &tu);
    let conj = Collineation::new(field, [m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2]])
        .expect("coordinate change is invertible");
    let conj_inv = conj.inverse(field);
    let transport = |tu_mat: [u32; 9]| -> Collineation {
        let sigma = Collineation::new(field, tu_mat).expect("generator is invertible");
        conj_inv.compose(field, &sigma).compose(field, &conj)
    };

    let kernel = params.l().kernel();
    let mut gens = Vec::new();
    for &beta in &kernel {
        for &gamma in &kernel {
            gens.push(transport([1, 0, beta, 0, 1, gamma, 0, 0, 1]));
        }
    }
    for d in field.elements().filter(|&d| field.add(field.pow(d, q), d) == 0) {
        gens.push(transport([1, d, 0, 0, 1, 0, 0, 0, 1]));
    }
    let q2 = q * q;
    for eps in field.elements().filter(|&x| x != 0 && field.pow(x, q2) == x) {
        gens.push(transport([eps, 0, 0, 0, field.inv(field.pow(eps, q)), 0, 0, 0, 1]));
    }
    for lam in field.elements().filter(|&x| field.pow(x, q + 1) == 1) {
        gens.push(
            Collineation::new(field, [lam, 0, 0, 0, 1, 0, 0, 0, 1]).expect("scaling"),
        );
    }
    gens
}

/// The whole group in closed form, directly in the defining model:
///   - the mixing family [[a^q, -l·b^q, d], [b, l·a, e], [0,0,1]] with
///     a, b nonzero, N(a) + N(b) = 1, l^{q+1} = 1 and kernel shifts d, e
///     (empty when q = 2 since N(a) = N(b) = 1 cannot sum to 1);
///   - the monomial families [[a,0,d],[0,b,e],[0,0,1]] and
///     [[0,a,d],[b,0,e],[0,0,1]] with a^{q+1} = b^{q+1} = 1.
pub fn closed_form_elements(params: &CurveFamilyParams) -> Vec<Collineation> {
    let field = params.field();
    let q = params.q();
    let kernel = params.l().kernel();
    let mu: Vec<u32> = field.elements().filter(|&x| field.pow(x, q + 1) == 1).collect();
    let nonzero: Vec<u32> = field
        .elements()
        .filter(|&x| x != 0 && field.pow(x, q * q) == x)
        .collect();
    let mut out = Vec::new();
    for &a in &nonzero {
        for &b in &nonzero {
            if field.add(field.pow(a, q + 1), field.pow(b, q + 1)) != 1 {
                continue;
            }
            let aq = field.pow(a, q);
            let bq = field.pow(b, q);
            for &l in &mu {
                for &d in &kernel {
                    for &e in &kernel {
                        out.push(Collineation(canonicalize(
                            field,
                            [aq, field.neg(field.mul(l, bq)), d, b, field.mul(l, a), e, 0, 0, 1],
                        )));
                    }
                }
            }
        }
    }
    for &a in &mu {
        for &b in &mu {
            for &d in &kernel {
                for &e in &kernel {
                    out.push(Collineation(canonicalize(field, [a, 0, d, 0, b, e, 0, 0, 1])));
                    out.push(Collineation(canonicalize(field, [0, a, d, b, 0, e, 0, 0, 1])));
                }
            }
        }
    }
    out
}

/// q^{4n+1}·(q² - 1)·(q + 1)
pub fn expected_group_order(q: u64, n: u32) -> u64 {
    q.pow(4 * n + 1) * (q * q - 1) * (q + 1)
}

// ---------------------------------------------------------------------------
// group closure

pub struct AutGroup {
    field: Arc<Field>,
    elements: Vec<Collineation>,
    set: HashSet<Collineation>,
}

impl std::fmt::Debug for AutGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AutGroup of order {}", self.elements.len())
    }
}

impl AutGroup {
    pub fn from_elements(field: &Arc<Field>, elements: Vec<Collineation>) -> AutGroup {
        let set: HashSet<Collineation> = elements.into_iter().collect();
        let mut elements: Vec<Collineation> = set.iter().copied().collect();
        elements.sort_unstable();
        AutGroup { field: Arc::clone(field), elements, set }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, c: &Collineation) -> bool {
        self.set.contains(c)
    }

    pub fn elements(&self) -> &[Collineation] {
        &self.elements
    }

    /// Orbit of a point under the whole group, canonical and sorted.
    pub fn orbit(&self, pt: [u32; 3]) -> Vec<[u32; 3]> {
        let mut out: Vec<[u32; 3]> = self
            .elements
            .iter()
            .map(|c| c.apply_point(&self.field, pt))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        out.sort_unstable();
        out
    }

    pub fn stabilizer(&self, pt: [u32; 3]) -> AutGroup {
        let norm = crate::curve::canonical_point(&self.field, pt);
        let elements: Vec<Collineation> = self
            .elements
            .iter()
            .filter(|c| c.apply_point(&self.field, norm) == norm)
            .copied()
            .collect();
        AutGroup::from_elements(&self.field, elements)
    }

    /// The conjugate group m·G·m^{-1}.
    pub fn conjugate(&self, m: &Collineation) -> AutGroup {
        let m_inv = m.inverse(&self.field);
        let elements: Vec<Collineation> = self
            .elements
            .iter()
            .map(|c| m.compose(&self.field, c).compose(&self.field, &m_inv))
            .collect();
        AutGroup::from_elements(&self.field, elements)
    }

    /// Closure spot-check on seeded pairs; cheap insurance after parsing a
    /// dump from disk.
    pub fn closed_under_products_sampled(&self, cases: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..cases).all(|_| {
            let a = &self.elements[rng.gen_range(0..self.elements.len())];
            let b = &self.elements[rng.gen_range(0..self.elements.len())];
            self.set.contains(&a.compose(&self.field, b))
        })
    }
}

/// Breadth-first closure of a generating set; errors out if the group grows
/// past `bound` elements.
pub fn generate_group(
    field: &Arc<Field>,
    generators: &[Collineation],
    bound: usize,
) -> Result<AutGroup> {
    let mut set: HashSet<Collineation> = HashSet::new();
    let mut queue: Vec<Collineation> = vec![Collineation::identity()];
    set.insert(Collineation::identity());
    while let Some(cur) = queue.pop() {
        for g in generators {
            let next = cur.compose(field, g);
            if set.insert(next) {
                if set.len() > bound {
                    return Err(Error::ClosureBoundExceeded { bound });
                }
                queue.push(next);
            }
        }
    }
    Ok(AutGroup::from_elements(field, set.into_iter().collect()))
}

// ---------------------------------------------------------------------------
// restriction to the linear part

fn canonical2(field: &Arc<Field>, m: [u32; 4]) -> [u32; 4] {
    let lead = m.iter().copied().find(|&c| c != 0).expect("zero 2x2 block");
    let inv = field.inv(lead);
    [
        field.mul(m[0], inv),
        field.mul(m[1], inv),
        field.mul(m[2], inv),
        field.mul(m[3], inv),
    ]
}

/// What the restriction of the group to linear parts looks like.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExactSequenceReport {
    pub group_order: u64,
    pub kernel_order: u64,
    /// the kernel is exactly {(λx + β, λy + γ) : λ^{q+1} = 1, L(β) = L(γ) = 0}
    pub kernel_shape_ok: bool,
    /// the translation subgroup is normal in the whole group
    pub translations_normal: bool,
    /// kernel = scalar part ⋉ translations: trivial intersection, full product
    pub semidirect_ok: bool,
    pub image_order: u64,
    /// some change of basis over GF(q²) carries the image onto the full
    /// projective linear group of the line over GF(q)
    pub image_is_pgl2: bool,
    /// a witness change of basis, row-major 2×2, when one exists
    pub pgl2_conjugator: Option<[u32; 4]>,
    /// kernel_order · image_order = group_order
    pub orders_multiply: bool,
}

fn mat2_mul(field: &Arc<Field>, x: &[u32; 4], y: &[u32; 4]) -> [u32; 4] {
    [
        field.add(field.mul(x[0], y[0]), field.mul(x[1], y[2])),
        field.add(field.mul(x[0], y[1]), field.mul(x[1], y[3])),
        field.add(field.mul(x[2], y[0]), field.mul(x[3], y[2])),
        field.add(field.mul(x[2], y[1]), field.mul(x[3], y[3])),
    ]
}

/// Search for V over GF(q²) with V·image·V^{-1} = PGL(2, q) as sets of
/// canonical matrices. The image arrives in a unitary-flavoured shape; a
/// rational change of basis straightens it out, and which one works depends
/// on the characteristic, so it is simplest to just find one.
fn find_pgl2_conjugator(
    field: &Arc<Field>,
    q: u64,
    image: &[[u32; 4]],
    pgl2: &HashSet<[u32; 4]>,
) -> Option<[u32; 4]> {
    if image.len() != pgl2.len() {
        return None;
    }
    let sub: Vec<u32> = field.elements().filter(|&x| field.pow(x, q * q) == x).collect();
    for &a in &sub {
        for &b in &sub {
            for &c in &sub {
                for &d in &sub {
                    let v = [a, b, c, d];
                    if v.iter().copied().find(|&x| x != 0) != Some(1) {
                        continue; // canonical representatives only
                    }
                    if field.sub(field.mul(a, d), field.mul(b, c)) == 0 {
                        continue;
                    }
                    // the adjugate is the inverse up to the determinant,
                    // which the canonical form absorbs
                    let vadj = [d, field.neg(b), field.neg(c), a];
                    let ok = image.iter().all(|m| {
                        let conj = mat2_mul(field, &mat2_mul(field, &v, m), &vadj);
                        pgl2.contains(&canonical2(field, conj))
                    });
                    if ok {
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

pub fn restriction_report(params: &CurveFamilyParams, group: &AutGroup) -> ExactSequenceReport {
    let field = params.field();
    let q = params.q();
    let kernel_l = params.l().kernel();
    let is_kernel_root = |x: u32| kernel_l.binary_search(&x).is_ok();

    // every element is affine; split into linear part and translation
    let mut image: HashSet<[u32; 4]> = HashSet::new();
    let mut kernel_elems: Vec<Collineation> = Vec::new();
    for c in group.elements() {
        let m = c.affine_normalized(field);
        let lin = canonical2(field, [m[0], m[1], m[3], m[4]]);
        image.insert(lin);
        if lin == [1, 0, 0, 1] {
            kernel_elems.push(*c);
        }
    }

    // kernel shape: diagonal scalar λ with λ^{q+1} = 1 and kernel shifts
    let kernel_shape_ok = kernel_elems.iter().all(|c| {
        let m = c.affine_normalized(field);
        m[1] == 0
            && m[3] == 0
            && m[0] == m[4]
            && field.pow(m[0], q + 1) == 1
            && is_kernel_root(m[2])
            && is_kernel_root(m[5])
    });

    // translations: λ = 1
    let translations: Vec<Collineation> = kernel_elems
        .iter()
        .filter(|c| {
            let m = c.affine_normalized(field);
            m[0] == 1 && m[4] == 1
        })
        .copied()
        .collect();
    let translation_set: HashSet<Collineation> = translations.iter().copied().collect();
    let translations_normal = group.elements().iter().all(|g| {
        let g_inv = g.inverse(field);
        translations.iter().all(|t| {
            let conj = g.compose(field, t).compose(field, &g_inv);
            translation_set.contains(&conj)
        })
    });

    // scalar complement: diag(λ, λ) parts with no shift
    let scalars: Vec<Collineation> = kernel_elems
        .iter()
        .filter(|c| {
            let m = c.affine_normalized(field);
            m[2] == 0 && m[5] == 0
        })
        .copied()
        .collect();
    let mut product: HashSet<Collineation> = HashSet::new();
    for s in &scalars {
        for t in &translations {
            product.insert(s.compose(field, t));
        }
    }
    let kernel_set: HashSet<Collineation> = kernel_elems.iter().copied().collect();
    let semidirect_ok = scalars.iter().filter(|c| translation_set.contains(c)).count() == 1
        && product.len() == kernel_elems.len()
        && product == kernel_set;

    // the image against PGL(2, q)
    let mut pgl2: HashSet<[u32; 4]> = HashSet::new();
    let base: Vec<u32> = field.elements().filter(|&x| field.pow(x, q) == x).collect();
    for &a in &base {
        for &b in &base {
            for &c in &base {
                for &d in &base {
                    if field.sub(field.mul(a, d), field.mul(b, c)) != 0 {
                        pgl2.insert(canonical2(field, [a, b, c, d]));
                    }
                }
            }
        }
    }
    let mut image_sorted: Vec<[u32; 4]> = image.iter().copied().collect();
    image_sorted.sort_unstable();
    let pgl2_conjugator = find_pgl2_conjugator(field, q, &image_sorted, &pgl2);

    ExactSequenceReport {
        group_order: group.order(),
        kernel_order: kernel_elems.len() as u64,
        kernel_shape_ok,
        translations_normal,
        semidirect_ok,
        image_order: image.len() as u64,
        image_is_pgl2: pgl2_conjugator.is_some(),
        pgl2_conjugator,
        orders_multiply: kernel_elems.len() as u64 * image.len() as u64 == group.order(),
    }
}

// ---------------------------------------------------------------------------
// on-disk group format

/// One canonical matrix per line, nine space-separated element codes,
/// row-major, lines sorted.
pub fn format_group(group: &AutGroup) -> String {
    let mut out = String::new();
    for c in group.elements() {
        let parts: Vec<String> = c.0.iter().map(|v| v.to_string()).collect();
        out.push_str(&parts.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_group(field: &Arc<Field>, text: &str) -> Result<AutGroup> {
    let mut elements = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let codes: Vec<u32> = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>().map_err(|_| Error::SpecParse {
                    line: idx + 1,
                    msg: "matrix entries must be integers".into(),
                })
            })
            .collect::<Result<_>>()?;
        if codes.len() != 9 {
            return Err(Error::SpecParse {
                line: idx + 1,
                msg: format!("expected 9 entries, got {}", codes.len()),
            });
        }
        if codes.iter().any(|&c| c as u64 >= field.order()) {
            return Err(Error::SpecParse {
                line: idx + 1,
                msg: "entry code outside the field".into(),
            });
        }
        let mut m = [0u32; 9];
        m.copy_from_slice(&codes);
        elements.push(Collineation::new(field, m)?);
    }
    Ok(AutGroup::from_elements(field, elements))
}
