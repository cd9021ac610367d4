//! The curve family itself: parameters (a tower, the linearized coefficients
//! a_0..a_{n-1}, and the constant c), the two plane models, singular loci,
//! the numeric invariants (genus, p-rank, canonical degree), and rational
//! point counts. A small text format stores family members on disk.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{make_tower, Field, Tower};
use crate::poly::{log_char, BiPoly, LinearizedPoly, Poly, TriPoly};

/// A member of the family: the curve L(x)^{q+1} + L(y)^{q+1} + c = 0 over
/// the top field of a GF(q) ⊂ GF(q²) ⊂ GF(q^{2(n+1)}) tower, with
/// L(x) = a_0·x + a_1·x^{q²} + ... + a_{n-1}·x^{q^{2(n-1)}} + x^{q^{2n}}.
pub struct CurveFamilyParams {
    tower: Tower,
    alphas: Vec<u32>,
    c: u32,
}

impl PartialEq for CurveFamilyParams {
    fn eq(&self, other: &Self) -> bool {
        self.tower.p == other.tower.p
            && self.tower.e == other.tower.e
            && self.tower.n == other.tower.n
            && self.alphas == other.alphas
            && self.c == other.c
    }
}

impl std::fmt::Debug for CurveFamilyParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CurveFamilyParams(q={}, n={}, alphas={:?}, c={})",
            self.q(),
            self.n(),
            self.alphas,
            self.c
        )
    }
}

impl CurveFamilyParams {
    pub fn new(tower: Tower, alphas: Vec<u32>, c: u32) -> Result<CurveFamilyParams> {
        let n = tower.n as usize;
        if n < 1 {
            return Err(Error::InvalidParameter("the family needs n >= 1".into()));
        }
        if alphas.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} linearized coefficients, got {}",
                alphas.len()
            )));
        }
        let order = tower.big.order();
        if alphas.iter().any(|&a| a as u64 >= order) || c as u64 >= order {
            return Err(Error::InvalidParameter(
                "coefficient code outside the top field".into(),
            ));
        }
        if alphas[0] == 0 {
            return Err(Error::InvalidParameter(
                "a_0 must be nonzero (separability of L)".into(),
            ));
        }
        if c == 0 {
            return Err(Error::InvalidParameter(
                "c must be nonzero (irreducibility of the member)".into(),
            ));
        }
        Ok(CurveFamilyParams { tower, alphas, c })
    }

    /// The member with every a_i = 1 and c = 1; L is then the trace of the
    /// top field onto GF(q²).
    pub fn normalized(p: u32, e: u32, n: u32) -> Result<CurveFamilyParams> {
        let tower = make_tower(p, e, n)?;
        CurveFamilyParams::new(tower, vec![1; n as usize], 1)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.tower.big
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn n(&self) -> u32 {
        self.tower.n
    }

    pub fn alphas(&self) -> &[u32] {
        &self.alphas
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn l(&self) -> LinearizedPoly {
        let mut coeffs = self.alphas.clone();
        coeffs.push(1);
        LinearizedPoly::new(&self.tower.big, self.q(), coeffs).expect("validated in new")
    }

    /// q^{2n}·(q+1), the common degree of both plane models.
    pub fn degree(&self) -> u64 {
        self.tower.q2n() * (self.q() + 1)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CurveModel {
    /// the defining model L(x)^{q+1} + L(y)^{q+1} + c
    Xy,
    /// the split model L(t)^q·L(u) + L(t)·L(u)^q + c'
    Tu,
}

pub struct PlaneCurve {
    pub f: BiPoly,
    pub degree: u64,
    pub model: CurveModel,
}

pub(crate) fn lin_as_bipoly(l: &LinearizedPoly, in_y: bool) -> BiPoly {
    let field = l.field();
    let q2 = l.q() * l.q();
    let mut out = BiPoly::zero(field);
    let mut e = 1u64;
    for &c in l.coeffs() {
        let (ex, ey) = if in_y { (0, e as u32) } else { (e as u32, 0) };
        out = out.add(&BiPoly::term(field, c, ex, ey));
        e *= q2;
    }
    out
}

pub fn build_cn(params: &CurveFamilyParams) -> PlaneCurve {
    let field = params.field();
    let l = params.l();
    let e = log_char(field, params.q());
    let lx = lin_as_bipoly(&l, false);
    let ly = lin_as_bipoly(&l, true);
    let f = lx
        .frobenius_pow(e)
        .mul(&lx)
        .add(&ly.frobenius_pow(e).mul(&ly))
        .add(&BiPoly::constant(field, params.c));
    debug_assert!(f.is_monic_in_y());
    PlaneCurve { f, degree: params.degree(), model: CurveModel::Xy }
}

/// The split model together with the change of coordinates that produced
/// it: t = a^q·x + y, u = x + a^q·y for a fixed a with a^{q+1} = -1 and
/// s = a^q + a ≠ 0.
pub struct TuModel {
    pub curve: PlaneCurve,
    pub alpha: u32,
    /// s = alpha^q + alpha, the unit denominator of the inverse map
    pub denom: u32,
    pub c_prime: u32,
}

pub fn build_cn_prime(params: &CurveFamilyParams) -> TuModel {
    let field = params.field();
    let q = params.q();
    let neg_one = field.neg_one();
    // least alpha with alpha^{q+1} = -1 whose s = alpha^q + alpha is a unit;
    // for q = 2 the natural candidate alpha = 1 fails the unit condition
    let alpha = field
        .elements()
        .find(|&a| {
            field.pow(a, q + 1) == neg_one && field.add(field.pow(a, q), a) != 0
        })
        .expect("mu_{q+1} meets the trace-nonzero condition in every tower");
    let s = field.add(field.pow(alpha, q), alpha);
    let c_prime = field.mul(s, params.c);
    let l = params.l();
    let e = log_char(field, q);
    let lt = lin_as_bipoly(&l, false);
    let lu = lin_as_bipoly(&l, true);
    let f = lt
        .frobenius_pow(e)
        .mul(&lu)
        .add(&lt.mul(&lu.frobenius_pow(e)))
        .add(&BiPoly::constant(field, c_prime));
    TuModel {
        curve: PlaneCurve { f, degree: params.degree(), model: CurveModel::Tu },
        alpha,
        denom: s,
        c_prime,
    }
}

/// Matrix of the coordinate change (x, y) -> (t, u) as a collineation on
/// column vectors (affine in the third coordinate).
pub fn tu_from_xy_matrix(params: &CurveFamilyParams, tu: &TuModel) -> [[u32; 3]; 3] {
    let field = params.field();
    let aq = field.pow(tu.alpha, params.q());
    [[aq, 1, 0], [1, aq, 0], [0, 0, 1]]
}

/// The two models agree: substituting x = (t + a·u)/s, y = (a·t + u)/s into
/// the defining polynomial recovers the split model up to the unit s^{-q}.
pub fn check_tu_consistency(params: &CurveFamilyParams, tu: &TuModel) -> bool {
    let field = params.field();
    let q = params.q();
    let s_inv = field.inv(tu.denom);
    let a = tu.alpha;
    // x and y as polynomials in (t, u); here the bivariate variables are
    // read as x-slot = t, y-slot = u
    let gx = BiPoly::term(field, s_inv, 1, 0)
        .add(&BiPoly::term(field, field.mul(a, s_inv), 0, 1));
    let gy = BiPoly::term(field, field.mul(a, s_inv), 1, 0)
        .add(&BiPoly::term(field, s_inv, 0, 1));
    let f = build_cn(params).f;
    let lhs = f.substitute(&gx, &gy).scale(field.pow(tu.denom, q));
    lhs == tu.curve.f
}

// ---------------------------------------------------------------------------
// projective helpers

/// Scale a nonzero coordinate triple so its first nonzero entry is 1.
pub fn canonical_point(field: &Arc<Field>, pt: [u32; 3]) -> [u32; 3] {
    let lead = pt.iter().copied().find(|&c| c != 0).expect("zero vector is not a point");
    let inv = field.inv(lead);
    [field.mul(pt[0], inv), field.mul(pt[1], inv), field.mul(pt[2], inv)]
}

/// Lines use the same normalization as points.
pub fn canonical_line(field: &Arc<Field>, l: [u32; 3]) -> [u32; 3] {
    canonical_point(field, l)
}

/// The line joining two distinct points, canonical.
pub fn line_through(field: &Arc<Field>, a: [u32; 3], b: [u32; 3]) -> [u32; 3] {
    canonical_line(field, cross(field, a, b))
}

/// Whether the point lies on the line.
pub fn incident(field: &Arc<Field>, l: [u32; 3], pt: [u32; 3]) -> bool {
    let dot = field.add(
        field.add(field.mul(l[0], pt[0]), field.mul(l[1], pt[1])),
        field.mul(l[2], pt[2]),
    );
    dot == 0
}

/// Every point of the projective plane over the field, in canonical form;
/// deterministic order, |K|² + |K| + 1 entries.
pub fn enumerate_plane_points(field: &Arc<Field>) -> Vec<[u32; 3]> {
    let mut pts = Vec::with_capacity((field.order() * field.order() + field.order() + 1) as usize);
    for y in field.elements() {
        for z in field.elements() {
            pts.push([1, y, z]);
        }
    }
    for z in field.elements() {
        pts.push([0, 1, z]);
    }
    pts.push([0, 0, 1]);
    pts
}

fn cross(field: &Arc<Field>, a: [u32; 3], b: [u32; 3]) -> [u32; 3] {
    let m = |i: usize, j: usize| field.mul(a[i], b[j]);
    [
        field.sub(m(1, 2), m(2, 1)),
        field.sub(m(2, 0), m(0, 2)),
        field.sub(m(0, 1), m(1, 0)),
    ]
}

// ---------------------------------------------------------------------------
// singular locus

#[derive(Clone, Debug)]
pub struct SingularPointInfo {
    /// canonical projective coordinates
    pub point: [u32; 3],
    pub multiplicity: u32,
    /// true when the tangent cone splits into `multiplicity` distinct lines
    pub is_ordinary: bool,
    /// canonical line coefficient triples, sorted
    pub tangents: Vec<[u32; 3]>,
}

/// Quotient of g by (x - r), assuming g(r) = 0.
fn divide_linear(g: &Poly, r: u32) -> Poly {
    let field = g.field().clone();
    let coeffs = g.coeffs();
    let mut quot = vec![0u32; coeffs.len() - 1];
    let mut carry = 0u32;
    for i in (1..coeffs.len()).rev() {
        carry = field.add(coeffs[i], field.mul(carry, r));
        quot[i - 1] = carry;
    }
    debug_assert_eq!(field.add(coeffs[0], field.mul(carry, r)), 0);
    Poly::new(&field, quot)
}

/// Roots of a binary form Σ c_i·u^i·v^{m-i} in P¹, as ((u0, v0), mult)
/// pairs; None when the form does not split over the field.
fn factor_binary_form(
    field: &Arc<Field>,
    coeffs: &[u32],
    m: u32,
) -> Option<Vec<([u32; 2], u32)>> {
    let g = Poly::new(field, coeffs.to_vec());
    let gdeg = g.degree().expect("tangent cone form is nonzero") as u32;
    let mut out = Vec::new();
    // the direction (1 : 0) accounts for the degree drop at v = 0
    if gdeg < m {
        out.push(([1, 0], m - gdeg));
    }
    let mut covered = m - gdeg;
    let mut rest = g;
    for r in field.elements() {
        let mut mult = 0u32;
        while rest.degree().is_some_and(|d| d >= 1) && rest.eval(r) == 0 {
            rest = divide_linear(&rest, r);
            mult += 1;
        }
        if mult > 0 {
            out.push(([r, 1], mult));
            covered += mult;
        }
        if rest.degree().map_or(true, |d| d == 0) {
            break;
        }
    }
    (covered == m).then_some(out)
}

/// Multiplicity and tangent cone of a plane curve at a projective point,
/// computed in an affine chart shifted to the point.
fn local_structure(
    field: &Arc<Field>,
    hf: &TriPoly,
    pt: [u32; 3],
) -> (u32, bool, Vec<[u32; 3]>) {
    let chart = if pt[2] != 0 {
        2
    } else if pt[1] != 0 {
        1
    } else {
        0
    };
    let norm = canonical_point(field, pt);
    let scaled = match chart {
        2 => [field.div(norm[0], norm[2]), field.div(norm[1], norm[2])],
        1 => [field.div(norm[0], norm[1]), field.div(norm[2], norm[1])],
        _ => [field.div(norm[1], norm[0]), field.div(norm[2], norm[0])],
    };
    let local = hf.dehomogenize(chart).shift(scaled[0], scaled[1]);
    let m = local
        .terms()
        .map(|(ex, ey, _)| ex + ey)
        .min()
        .expect("curve vanishes identically in the chart");
    // leading form coefficients indexed by the first chart variable
    let mut cone = vec![0u32; m as usize + 1];
    for (ex, ey, c) in local.terms() {
        if ex + ey == m {
            cone[ex as usize] = c;
        }
    }
    let factors = factor_binary_form(field, &cone, m);
    let (ordinary, tangents) = match factors {
        None => (false, Vec::new()),
        Some(list) => {
            let distinct = list.len() as u32 == m;
            let mut lines = Vec::new();
            for ([u0, v0], _) in &list {
                // direction vector in the ambient plane for this chart
                let d = match chart {
                    2 => [*u0, *v0, 0],
                    1 => [*u0, 0, *v0],
                    _ => [0, *u0, *v0],
                };
                lines.push(canonical_line(field, cross(field, norm, d)));
            }
            lines.sort_unstable();
            (distinct, lines)
        }
    };
    (m, ordinary, tangents)
}

/// All singular points of the projective closure, with multiplicities and
/// tangent cones. The affine part is scanned exhaustively; the line at
/// infinity is scanned point by point.
pub fn singular_locus(curve: &PlaneCurve, field: &Arc<Field>) -> Vec<SingularPointInfo> {
    let hf = TriPoly::homogenize(&curve.f, curve.degree as u32);
    let fx = curve.f.partial_x();
    let fy = curve.f.partial_y();
    let order = field.order() as u32;

    // affine candidates: rayon over x-slices, each slice specializes once
    let mut singular: Vec<[u32; 3]> = (0..order)
        .into_par_iter()
        .flat_map_iter(|x| {
            let row = curve.f.specialize_x(x);
            let rowx = fx.specialize_x(x);
            let rowy = fy.specialize_x(x);
            (0..order).filter_map(move |y| {
                (row.eval(y) == 0 && rowx.eval(y) == 0 && rowy.eval(y) == 0)
                    .then_some([x, y, 1])
            })
        })
        .collect();

    // points at infinity: (1 : t : 0) and (0 : 1 : 0)
    let mut at_infinity: Vec<[u32; 3]> = field.elements().map(|t| [1, t, 0]).collect();
    at_infinity.push([0, 1, 0]);
    for pt in at_infinity {
        if hf.eval(pt) == 0 {
            let (m, _, _) = local_structure(field, &hf, pt);
            if m >= 2 {
                singular.push(pt);
            }
        }
    }

    let mut out: Vec<SingularPointInfo> = singular
        .into_iter()
        .map(|pt| {
            let norm = canonical_point(field, pt);
            let (m, ordinary, tangents) = local_structure(field, &hf, norm);
            SingularPointInfo { point: norm, multiplicity: m, is_ordinary: ordinary, tangents }
        })
        .collect();
    out.sort_by_key(|info| info.point);
    out
}

/// Points of the curve on the line at infinity, canonical and sorted.
pub fn points_at_infinity(curve: &PlaneCurve, field: &Arc<Field>) -> Vec<[u32; 3]> {
    let hf = TriPoly::homogenize(&curve.f, curve.degree as u32);
    let mut out = Vec::new();
    for t in field.elements() {
        if hf.eval([1, t, 0]) == 0 {
            out.push(canonical_point(field, [1, t, 0]));
        }
    }
    if hf.eval([0, 1, 0]) == 0 {
        out.push([0, 1, 0]);
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// numeric invariants

fn qp(q: u64, e: u32) -> u128 {
    (q as u128).pow(e)
}

/// g = q^{2n}(q+1)(q^{2n+1} - 2)/2 + 1
pub fn genus_closed_form(q: u64, n: u32) -> u64 {
    let val = qp(q, 2 * n) * (q as u128 + 1) * (qp(q, 2 * n + 1) - 2) / 2 + 1;
    val as u64
}

/// Plücker count for a degree-d plane curve whose singularities are q+1
/// ordinary points of multiplicity q^{2n}.
pub fn genus_plucker(q: u64, n: u32) -> u64 {
    let d = qp(q, 2 * n) * (q as u128 + 1);
    let drop = (q as u128 + 1) * qp(q, 2 * n) * (qp(q, 2 * n) - 1) / 2;
    ((d - 1) * (d - 2) / 2 - drop) as u64
}

/// γ = q^{4n+1} - q^{2n+1} - q^{2n} + 1
pub fn p_rank_closed_form(q: u64, n: u32) -> u64 {
    (qp(q, 4 * n + 1) - qp(q, 2 * n + 1) - qp(q, 2 * n) + 1) as u64
}

/// γ - 1 = q^{2n+1}·(q^{2n} - 1) - q^{2n}, the covering relation between
/// the p-rank of the member and the p-rank of the Hermitian quotient.
pub fn deuring_shafarevich_identity(q: u64, n: u32) -> bool {
    let gamma = p_rank_closed_form(q, n) as u128;
    gamma - 1 == qp(q, 2 * n + 1) * (qp(q, 2 * n) - 1) - qp(q, 2 * n)
}

/// A canonical divisor cut by curves of degree q^{2n+1} - 2 has degree
/// (q^{2n+1} - 2)·d = 2g - 2.
pub fn canonical_degree_matches(q: u64, n: u32) -> bool {
    let d = qp(q, 2 * n) * (q as u128 + 1);
    let g = genus_closed_form(q, n) as u128;
    (qp(q, 2 * n + 1) - 2) * d == 2 * g - 2
}

// ---------------------------------------------------------------------------
// point counts

/// Affine point count by exhaustive scan, for any plane model.
pub fn count_affine_points_scan(curve: &PlaneCurve, field: &Arc<Field>) -> u64 {
    let order = field.order() as u32;
    (0..order)
        .into_par_iter()
        .map(|x| {
            let row = curve.f.specialize_x(x);
            (0..order).filter(|&y| row.eval(y) == 0).count() as u64
        })
        .sum()
}

/// Affine point count through the fibration structure: for each x the
/// number of y with L(y)^{q+1} = -c - L(x)^{q+1}, read off a value table.
pub fn count_affine_points_fast(params: &CurveFamilyParams) -> u64 {
    let field = params.field();
    let l = params.l();
    let q = params.q();
    let mut counts = vec![0u64; field.order() as usize];
    for y in field.elements() {
        let v = field.pow(l.eval(y), q + 1);
        counts[v as usize] += 1;
    }
    field
        .elements()
        .map(|x| {
            let target = field.neg(field.add(params.c, field.pow(l.eval(x), q + 1)));
            counts[target as usize]
        })
        .sum()
}

/// Places of the smooth model over the top field: every affine point is
/// smooth (one place), and each of the q+1 ordinary singular points at
/// infinity carries q^{2n} branches with rational tangents.
pub fn count_places(params: &CurveFamilyParams) -> u64 {
    count_affine_points_fast(params) + (params.q() + 1) * params.tower().q2n()
}

pub fn places_closed_form(q: u64, n: u32) -> u64 {
    (qp(q, 4 * n + 3) - qp(q, 4 * n + 1) + qp(q, 2 * n + 1) + qp(q, 2 * n)) as u64
}

/// Points of the plane curve (not places): affine points plus the q+1
/// singular points at infinity.
pub fn count_plane_points(params: &CurveFamilyParams) -> u64 {
    count_affine_points_fast(params) + params.q() + 1
}

pub fn plane_points_closed_form(q: u64, n: u32) -> u64 {
    (qp(q, 4 * n + 3) - qp(q, 4 * n + 1) + q as u128 + 1) as u64
}

// ---------------------------------------------------------------------------
// report

#[derive(Serialize, Debug, Clone)]
pub struct InvariantsReport {
    pub p: u32,
    pub e: u32,
    pub n: u32,
    pub q: u64,
    pub degree: u64,
    pub genus: u64,
    pub genus_from_plucker: u64,
    pub p_rank: u64,
    pub deuring_shafarevich_ok: bool,
    pub canonical_degree_ok: bool,
    pub affine_points: u64,
    pub places: u64,
    pub plane_points: u64,
    pub singular_points: usize,
}

pub fn invariants_report(params: &CurveFamilyParams) -> InvariantsReport {
    let q = params.q();
    let n = params.n();
    let curve = build_cn(params);
    let sing = singular_locus(&curve, params.field());
    InvariantsReport {
        p: params.tower().p,
        e: params.tower().e,
        n,
        q,
        degree: params.degree(),
        genus: genus_closed_form(q, n),
        genus_from_plucker: genus_plucker(q, n),
        p_rank: p_rank_closed_form(q, n),
        deuring_shafarevich_ok: deuring_shafarevich_identity(q, n),
        canonical_degree_ok: canonical_degree_matches(q, n),
        affine_points: count_affine_points_fast(params),
        places: count_places(params),
        plane_points: count_plane_points(params),
        singular_points: sing.len(),
    }
}

// ---------------------------------------------------------------------------
// on-disk member format

/// Parse the `key = value` member format:
///
/// ```text
/// p = 2
/// e = 1
/// n = 1
/// alpha0 = [1]    # coordinates over GF(p), little-endian power basis
/// c = [1]
/// ```
pub fn parse_curve_spec(text: &str) -> Result<CurveFamilyParams> {
    let mut raw: Vec<(usize, String, String)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let stripped = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        }
        .trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((key, value)) = stripped.split_once('=') else {
            return Err(Error::SpecParse {
                line: line_no,
                msg: "expected `key = value`".into(),
            });
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if raw.iter().any(|(_, k, _)| *k == key) {
            return Err(Error::SpecParse { line: line_no, msg: format!("duplicate key `{key}`") });
        }
        raw.push((line_no, key, value));
    }

    let get_int = |name: &str| -> Result<u32> {
        let Some((line, _, value)) = raw.iter().find(|(_, k, _)| k == name) else {
            return Err(Error::SpecParse { line: 0, msg: format!("missing key `{name}`") });
        };
        value.parse::<u32>().map_err(|_| Error::SpecParse {
            line: *line,
            msg: format!("`{name}` must be a nonnegative integer"),
        })
    };
    let p = get_int("p")?;
    let e = get_int("e")?;
    let n = get_int("n")?;
    let tower = make_tower(p, e, n)?;

    let parse_coords = |name: &str| -> Result<u32> {
        let Some((line, _, value)) = raw.iter().find(|(_, k, _)| k == name) else {
            return Err(Error::SpecParse { line: 0, msg: format!("missing key `{name}`") });
        };
        let inner = value
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or_else(|| Error::SpecParse {
                line: *line,
                msg: format!("`{name}` must be a bracketed digit list"),
            })?;
        let digits: Vec<u32> = inner
            .split(',')
            .map(|d| {
                d.trim().parse::<u32>().map_err(|_| Error::SpecParse {
                    line: *line,
                    msg: format!("bad digit in `{name}`"),
                })
            })
            .collect::<Result<_>>()?;
        tower.big.from_coords(&digits).map_err(|_| Error::SpecParse {
            line: *line,
            msg: format!("digits of `{name}` out of range for GF({p})"),
        })
    };

    let mut alphas = Vec::with_capacity(n as usize);
    for i in 0..n {
        alphas.push(parse_coords(&format!("alpha{i}"))?);
    }
    let c = parse_coords("c")?;

    let known: Vec<String> = ["p", "e", "n", "c"]
        .iter()
        .map(|s| s.to_string())
        .chain((0..n).map(|i| format!("alpha{i}")))
        .collect();
    if let Some((line, key, _)) = raw.iter().find(|(_, k, _)| !known.contains(k)) {
        return Err(Error::SpecParse { line: *line, msg: format!("unknown key `{key}`") });
    }

    CurveFamilyParams::new(tower, alphas, c)
}

pub fn format_curve_spec(params: &CurveFamilyParams) -> String {
    let field = params.field();
    let fmt_el = |code: u32| -> String {
        let coords = field.coords(code);
        let digits: Vec<String> = coords.iter().map(|d| d.to_string()).collect();
        format!("[{}]", digits.join(", "))
    };
    let mut out = String::new();
    out.push_str(&format!("p = {}\n", params.tower().p));
    out.push_str(&format!("e = {}\n", params.tower().e));
    out.push_str(&format!("n = {}\n", params.n()));
    for (i, &a) in params.alphas().iter().enumerate() {
        out.push_str(&format!("alpha{i} = {}\n", fmt_el(a)));
    }
    out.push_str(&format!("c = {}\n", fmt_el(params.c())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GRID: [(u32, u32, u32); 3] = [(2, 1, 1), (3, 1, 1), (2, 1, 2)];

    #[test]
    fn defining_polynomial_evaluates_like_the_formula() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let curve = build_cn(&params);
            assert!(curve.f.is_monic_in_y());
            assert_eq!(curve.f.degree_y(), Some(params.degree() as u32));
            assert_eq!(curve.f.total_degree(), Some(params.degree() as u32));
            let l = params.l();
            let q = params.q();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..100 {
                let a = rng.gen_range(0..field.order() as u32);
                let b = rng.gen_range(0..field.order() as u32);
                let expect = field.add(
                    field.add(field.pow(l.eval(a), q + 1), field.pow(l.eval(b), q + 1)),
                    params.c(),
                );
                assert_eq!(curve.f.eval(a, b), expect);
            }
        }
    }

    #[test]
    fn split_model_is_the_same_curve() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let tu = build_cn_prime(&params);
            // the chosen constant satisfies both defining conditions
            assert_eq!(field.pow(tu.alpha, q + 1), field.neg_one());
            assert_ne!(tu.denom, 0);
            // it is the least such element
            for a in 0..tu.alpha {
                assert!(
                    field.pow(a, q + 1) != field.neg_one()
                        || field.add(field.pow(a, q), a) == 0
                );
            }
            // s lands in the base field
            assert_eq!(field.pow(tu.denom, q), tu.denom);
            assert!(check_tu_consistency(&params, &tu));
        }
    }

    #[test]
    fn split_model_avoids_alpha_one_in_characteristic_two() {
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let tu = build_cn_prime(&params);
        // 1^{q+1} = 1 = -1 in characteristic 2, but 1^q + 1 = 0 disqualifies it
        assert_ne!(tu.alpha, 1);
    }

    #[test]
    fn singular_locus_of_the_defining_model() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let curve = build_cn(&params);
            let sing = singular_locus(&curve, &field);
            // exactly the q+1 fundamental points (a : 1 : 0), a^{q+1} = -1
            let mut expected: Vec<[u32; 3]> = field
                .elements()
                .filter(|&a| field.pow(a, q + 1) == field.neg_one())
                .map(|a| canonical_point(&field, [a, 1, 0]))
                .collect();
            expected.sort_unstable();
            assert_eq!(expected.len(), (q + 1) as usize);
            let got: Vec<[u32; 3]> = sing.iter().map(|s| s.point).collect();
            assert_eq!(got, expected);
            let l = params.l();
            let kernel = l.kernel();
            for info in &sing {
                assert_eq!(info.multiplicity as u64, params.tower().q2n());
                assert!(info.is_ordinary);
                // recover a from the canonical form (1 : 1/a : 0)
                let a = field.inv(info.point[1]);
                let mut expected_tangents: Vec<[u32; 3]> = kernel
                    .iter()
                    .map(|&b| canonical_line(&field, [1, field.neg(a), field.neg(b)]))
                    .collect();
                expected_tangents.sort_unstable();
                assert_eq!(info.tangents, expected_tangents);
            }
        }
    }

    #[test]
    fn singular_locus_of_the_split_model() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let tu = build_cn_prime(&params);
            let sing = singular_locus(&tu.curve, &field);
            // (d : 1 : 0) for d^q + d = 0, together with (1 : 0 : 0)
            let mut expected: Vec<[u32; 3]> = field
                .elements()
                .filter(|&d| field.add(field.pow(d, q), d) == 0)
                .map(|d| canonical_point(&field, [d, 1, 0]))
                .collect();
            expected.push([1, 0, 0]);
            expected.sort_unstable();
            assert_eq!(expected.len(), (q + 1) as usize);
            let got: Vec<[u32; 3]> = sing.iter().map(|s| s.point).collect();
            assert_eq!(got, expected);
            for info in &sing {
                assert_eq!(info.multiplicity as u64, params.tower().q2n());
                assert!(info.is_ordinary);
            }
            // at (1 : 0 : 0) the tangent cone is Π(U - b·W) over the kernel
            let l = params.l();
            let corner = sing.iter().find(|s| s.point == [1, 0, 0]).unwrap();
            let mut expected_tangents: Vec<[u32; 3]> = l
                .kernel()
                .iter()
                .map(|&b| canonical_line(&field, [0, 1, field.neg(b)]))
                .collect();
            expected_tangents.sort_unstable();
            assert_eq!(corner.tangents, expected_tangents);
        }
    }

    #[test]
    fn infinity_section_is_exactly_the_singular_set() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let curve = build_cn(&params);
            let inf = points_at_infinity(&curve, &field);
            let sing: Vec<[u32; 3]> =
                singular_locus(&curve, &field).iter().map(|s| s.point).collect();
            assert_eq!(inf, sing);
        }
    }

    #[test]
    fn genus_against_plucker() {
        let frozen = [(2u64, 1u32, 37u64), (3, 1, 451), (2, 2, 721)];
        for (q, n, g) in frozen {
            assert_eq!(genus_closed_form(q, n), g);
            assert_eq!(genus_plucker(q, n), g);
        }
    }

    #[test]
    fn p_rank_and_covering_identity() {
        let frozen = [(2u64, 1u32, 21u64), (3, 1, 208), (2, 2, 465)];
        for (q, n, gamma) in frozen {
            assert_eq!(p_rank_closed_form(q, n), gamma);
            assert!(deuring_shafarevich_identity(q, n));
        }
    }

    #[test]
    fn canonical_degree() {
        for (q, n) in [(2u64, 1u32), (3, 1), (2, 2)] {
            assert!(canonical_degree_matches(q, n));
        }
    }

    #[test]
    fn point_counts_scan_vs_structure_vs_closed_form() {
        let frozen = [
            (2, 1, 1, 96u64, 108u64, 99u64),
            (3, 1, 1, 1944, 1980, 1948),
            (2, 1, 2, 1536, 1584, 1539),
        ];
        for (p, e, n, affine, places, plane) in frozen {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let curve = build_cn(&params);
            assert_eq!(count_affine_points_scan(&curve, &field), affine);
            assert_eq!(count_affine_points_fast(&params), affine);
            assert_eq!(count_places(&params), places);
            assert_eq!(places_closed_form(params.q(), n), places);
            assert_eq!(count_plane_points(&params), plane);
            assert_eq!(plane_points_closed_form(params.q(), n), plane);
        }
    }

    #[test]
    fn split_model_has_the_same_plane_point_count() {
        // the models differ by a linear change of coordinates, so the total
        // projective point counts agree
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let xy = build_cn(&params);
            let tu = build_cn_prime(&params);
            assert_eq!(
                count_affine_points_scan(&xy, &field)
                    + points_at_infinity(&xy, &field).len() as u64,
                count_affine_points_scan(&tu.curve, &field)
                    + points_at_infinity(&tu.curve, &field).len() as u64
            );
        }
    }

    #[test]
    fn params_validation() {
        assert!(CurveFamilyParams::normalized(2, 1, 1).is_ok());
        let tower = make_tower(2, 1, 1).unwrap();
        assert!(CurveFamilyParams::new(tower, vec![0], 1).is_err());
        let tower = make_tower(2, 1, 1).unwrap();
        assert!(CurveFamilyParams::new(tower, vec![1], 0).is_err());
        let tower = make_tower(2, 1, 1).unwrap();
        assert!(CurveFamilyParams::new(tower, vec![1, 1], 1).is_err());
        let tower = make_tower(2, 1, 1).unwrap();
        assert!(CurveFamilyParams::new(tower, vec![1], 99).is_err());
    }

    #[test]
    fn member_format_roundtrip() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let text = format_curve_spec(&params);
            let parsed = parse_curve_spec(&text).unwrap();
            assert_eq!(parsed, params);
        }
        // a non-normalized member survives too
        let tower = make_tower(2, 1, 1).unwrap();
        let params = CurveFamilyParams::new(tower, vec![7], 11).unwrap();
        let parsed = parse_curve_spec(&format_curve_spec(&params)).unwrap();
        assert_eq!(parsed, params);
    }

    #[test]
    fn member_format_rejects_malformed_input() {
        let ok = "p = 2\ne = 1\nn = 1\nalpha0 = [1]\nc = [1]\n";
        assert!(parse_curve_spec(ok).is_ok());
        for bad in [
            "p = 2\ne = 1\nn = 1\nalpha0 = [1]\n",               // missing c
            "p = 2\ne = 1\nn = 1\nalpha0 = 1\nc = [1]\n",        // not a list
            "p = 2\ne = 1\nn = 1\nalpha0 = [3]\nc = [1]\n",      // digit too big
            "p = 2\ne = 1\nn = 1\nalpha0 = [0]\nc = [1]\n",      // a_0 = 0
            "p = 2\ne = 1\nn = 1\nalpha0 = [1]\nc = [0]\n",      // c = 0
            "p = 2\ne = 1\nn = 1\nalpha0 = [1]\nc = [1]\nz = 1", // unknown key
            "p = 2\np = 2\ne = 1\nn = 1\nalpha0 = [1]\nc = [1]", // duplicate
            "p = 4\ne = 1\nn = 1\nalpha0 = [1]\nc = [1]\n",      // p not prime
            "hello\n",
        ] {
            assert!(parse_curve_spec(bad).is_err(), "accepted: {bad}");
        }
    }

    #[test]
    fn shipped_member_files_parse_to_the_normalized_members() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/specs");
        for (file, p, e, n) in
            [("q2n1.curve", 2, 1, 1), ("q3n1.curve", 3, 1, 1), ("q2n2.curve", 2, 1, 2)]
        {
            let text = std::fs::read_to_string(format!("{dir}/{file}")).unwrap();
            let params = parse_curve_spec(&text).unwrap();
            assert_eq!(params, CurveFamilyParams::normalized(p, e, n).unwrap());
        }
    }

    #[test]
    fn report_is_consistent() {
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let report = invariants_report(&params);
        assert_eq!(report.genus, 37);
        assert_eq!(report.genus, report.genus_from_plucker);
        assert_eq!(report.p_rank, 21);
        assert!(report.deuring_shafarevich_ok);
        assert!(report.canonical_degree_ok);
        assert_eq!(report.places, 108);
        assert_eq!(report.plane_points, 99);
        assert_eq!(report.singular_points, 3);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"genus\":37"));
    }
}
