//! Local geometry at smooth affine points: branch expansion as a truncated
//! power series in the local parameter, valuations of bivariate functions
//! along a branch, the gap-function certificate for the vanishing orders at
//! rational points, and total ramification of the split model's second
//! projection over the kernel values.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{build_cn, build_cn_prime, CurveFamilyParams};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::poly::{log_char, BiPoly};

// ---------------------------------------------------------------------------
// truncated power series

/// Power series in one variable, truncated after T^precision. The length of
/// `coeffs` is precision + 1.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    field: Arc<Field>,
    coeffs: Vec<u32>,
}

impl std::fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| format!("{c}*T^{i}"))
            .collect();
        write!(f, "{} + O(T^{})", parts.join(" + "), self.coeffs.len())
    }
}

impl TruncatedSeries {
    pub fn zero(field: &Arc<Field>, precision: usize) -> TruncatedSeries {
        TruncatedSeries { field: Arc::clone(field), coeffs: vec![0; precision + 1] }
    }

    /// Series from little-endian coefficients, truncated or zero-padded to
    /// the requested precision.
    pub fn from_coeffs(field: &Arc<Field>, mut coeffs: Vec<u32>, precision: usize) -> Self {
        coeffs.resize(precision + 1, 0);
        TruncatedSeries { field: Arc::clone(field), coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Index of the lowest nonzero coefficient; None when the series is 0
    /// within its precision window.
    pub fn ord(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0)
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.field.add(self.coeffs[i], other.coeffs[i])).collect();
        TruncatedSeries { field: Arc::clone(&self.field), coeffs }
    }

    pub fn neg(&self) -> TruncatedSeries {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        TruncatedSeries { field: Arc::clone(&self.field), coeffs }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> TruncatedSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![0u32; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                if b != 0 {
                    coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
                }
            }
        }
        TruncatedSeries { field: Arc::clone(&self.field), coeffs }
    }

    /// Multiplicative inverse; the constant term must be a unit.
    pub fn invert(&self) -> TruncatedSeries {
        assert_ne!(self.coeffs[0], 0, "series with zero constant term has no inverse");
        let a0_inv = self.field.inv(self.coeffs[0]);
        let mut coeffs = vec![0u32; self.coeffs.len()];
        coeffs[0] = a0_inv;
        for k in 1..self.coeffs.len() {
            let mut acc = 0u32;
            for i in 1..=k {
                acc = self.field.add(acc, self.field.mul(self.coeffs[i], coeffs[k - i]));
            }
            coeffs[k] = self.field.neg(self.field.mul(a0_inv, acc));
        }
        TruncatedSeries { field: Arc::clone(&self.field), coeffs }
    }
}

/// Evaluate a bivariate polynomial at (x, y) = (T, ys) by Horner over the
/// y-rows; the x-rows become series truncations directly.
fn substitute_series(f: &BiPoly, ys: &TruncatedSeries) -> TruncatedSeries {
    let field = f.field();
    let precision = ys.precision();
    let dy = f.degree_y().unwrap_or(0);
    let mut acc = TruncatedSeries::zero(field, precision);
    for j in (0..=dy).rev() {
        let row = f.y_row(j);
        let row_series = TruncatedSeries::from_coeffs(field, row.coeffs().to_vec(), precision);
        acc = acc.mul(ys).add(&row_series);
    }
    acc
}

// ---------------------------------------------------------------------------
// branch expansion

/// Newton expansion of the branch of f through the smooth affine point
/// (a, b) with f_y(a, b) ≠ 0: the returned series Y satisfies
/// f(a + T, b + Y(T)) ≡ 0 to the requested precision, Y(0) = 0.
pub fn expand_branch(
    f: &BiPoly,
    a: u32,
    b: u32,
    precision: usize,
) -> Result<TruncatedSeries> {
    let field = f.field();
    if f.eval(a, b) != 0 {
        return Err(Error::InvalidParameter("point is not on the curve".into()));
    }
    if f.partial_y().eval(a, b) == 0 {
        return Err(Error::InvalidParameter(
            "branch expansion needs f_y ≠ 0 at the point".into(),
        ));
    }
    let fs = f.shift(a, b);
    let fy = fs.partial_y();
    let mut y = TruncatedSeries::zero(field, precision);
    // Newton doubles the valid prefix each round
    let mut steps = 0usize;
    loop {
        let residual = substitute_series(&fs, &y);
        if residual.ord().is_none() {
            return Ok(y);
        }
        let den = substitute_series(&fy, &y);
        y = y.sub(&residual.mul(&den.invert()));
        steps += 1;
        assert!(
            steps <= precision.ilog2() as usize + 4,
            "Newton failed to converge at a smooth point"
        );
    }
}

// ---------------------------------------------------------------------------
// valuations

const PRECISION_GROWTH_CAP: usize = 8;

/// Default series precision for a member: twice q^{2n+1}, comfortably past
/// every vanishing order the certificates need.
pub fn default_precision(q: u64, n: u32) -> usize {
    2 * q.pow(2 * n + 1) as usize
}

/// Valuation of g at the place of the smooth affine point `point` of the
/// curve f = 0. Starts at `precision` and doubles up to 8 times before
/// giving up, which distinguishes "g has a huge order" from "g vanishes on
/// the whole branch".
pub fn ord_at(f: &BiPoly, g: &BiPoly, point: (u32, u32), precision: usize) -> Result<u64> {
    if g.is_zero() {
        return Err(Error::InvalidParameter("the zero function has no order".into()));
    }
    let (a, b) = point;
    if f.eval(a, b) != 0 {
        return Err(Error::InvalidParameter("point is not on the curve".into()));
    }
    let fy_val = f.partial_y().eval(a, b);
    let fx_val = f.partial_x().eval(a, b);
    if fy_val == 0 && fx_val == 0 {
        return Err(Error::InvalidParameter(
            "valuations are defined here only at smooth points".into(),
        ));
    }
    // orient so the horizontal coordinate is the local parameter
    let (f_loc, g_loc, pt) = if fy_val != 0 {
        (f.clone(), g.clone(), (a, b))
    } else {
        (f.transpose(), g.transpose(), (b, a))
    };
    let g_shifted = g_loc.shift(pt.0, pt.1);
    let mut prec = precision.max(2);
    let cap = precision.max(2) * (1 << PRECISION_GROWTH_CAP);
    loop {
        let y = expand_branch(&f_loc, pt.0, pt.1, prec)?;
        let val = substitute_series(&g_shifted, &y);
        if let Some(k) = val.ord() {
            return Ok(k as u64);
        }
        prec *= 2;
        if prec > cap {
            return Err(Error::PrecisionExceeded { cap });
        }
    }
}

// ---------------------------------------------------------------------------
// gap-function certificate

/// Evidence for the vanishing order q^{2n+1} - 1 at an affine rational
/// point: the function (x-a)^{q^{2n+1}-q-2}·((x-a)^{q+1} + (y-b)^{q+1}),
/// or its mirror image when the tangent at the point is vertical, attains
/// exactly that order.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub point: (u32, u32),
    pub ord: u64,
    pub expected: u64,
    /// the tangent was vertical, so y - b served as the local parameter
    pub uses_vertical_parameter: bool,
    /// none of the q+1 norm-form factor lines is tangent at the point
    pub alpha_lines_transverse: bool,
}

pub fn verify_gap_at_affine(
    params: &CurveFamilyParams,
    point: (u32, u32),
    precision: usize,
) -> Result<GapCertificate> {
    let field = params.field();
    let q = params.q();
    let n = params.n();
    let curve = build_cn(params);
    let f = &curve.f;
    let (a, b) = point;
    if f.eval(a, b) != 0 {
        return Err(Error::InvalidParameter("point is not on the curve".into()));
    }
    let fx_val = f.partial_x().eval(a, b);
    let fy_val = f.partial_y().eval(a, b);
    let vertical = fy_val == 0;
    if vertical && fx_val == 0 {
        return Err(Error::InvalidParameter("affine points of the family are smooth".into()));
    }

    // the norm form (x-a)^{q+1} + (y-b)^{q+1} splits into the lines
    // (x-a) = α(y-b) with α^{q+1} = -1; the tangent direction
    // (f_y, -f_x) misses all of them exactly when N(-f_y/f_x) ≠ -1
    let alpha_lines_transverse = if vertical {
        true // the vertical tangent x = a is not an α-line (α ≠ 0)
    } else if fx_val == 0 {
        true // horizontal tangent, same reasoning mirrored
    } else {
        let slope = field.neg(field.div(fy_val, fx_val));
        field.pow(slope, q + 1) != field.neg_one()
    };

    let xa = BiPoly::term(field, 1, 1, 0).sub(&BiPoly::constant(field, a));
    let yb = BiPoly::term(field, 1, 0, 1).sub(&BiPoly::constant(field, b));
    let e = log_char(field, q);
    let norm_form = xa
        .frobenius_pow(e)
        .mul(&xa)
        .add(&yb.frobenius_pow(e).mul(&yb));
    let outer = if vertical { &yb } else { &xa };
    let exponent = q.pow(2 * n + 1) - q - 2;
    let gap = outer.pow(exponent).mul(&norm_form);

    let ord = ord_at(f, &gap, point, precision)?;
    Ok(GapCertificate {
        point,
        ord,
        expected: q.pow(2 * n + 1) - 1,
        uses_vertical_parameter: vertical,
        alpha_lines_transverse,
    })
}

// ---------------------------------------------------------------------------
// total ramification of the split projection

/// Over each root u_0 of L the fiber of the second projection of the split
/// model has no affine point: the defining polynomial collapses to the
/// nonzero constant c'. All q^{2n} sheets therefore meet in the single
/// place at infinity of that fiber.
pub fn verify_total_ramification(params: &CurveFamilyParams) -> bool {
    let tu = build_cn_prime(params);
    if tu.c_prime == 0 {
        return false;
    }
    params.l().kernel().iter().all(|&u0| {
        let fiber = tu.curve.f.specialize_y(u0);
        fiber.degree() == Some(0) && fiber.coeff(0) == tu.c_prime
    })
}

// ---------------------------------------------------------------------------
// rational point sampling

/// Every affine rational point, through the fiber structure: for each x,
/// the y with L(y)^{q+1} = -c - L(x)^{q+1}.
pub fn affine_points(params: &CurveFamilyParams) -> Vec<(u32, u32)> {
    let field = params.field();
    let l = params.l();
    let q = params.q();
    let mut by_value: Vec<Vec<u32>> = vec![Vec::new(); field.order() as usize];
    for y in field.elements() {
        by_value[field.pow(l.eval(y), q + 1) as usize].push(y);
    }
    let mut out = Vec::new();
    for x in field.elements() {
        let target = field.neg(field.add(params.c(), field.pow(l.eval(x), q + 1)));
        for &y in &by_value[target as usize] {
            out.push((x, y));
        }
    }
    out
}

/// Deterministic sample of affine rational points.
pub fn sample_affine_points(
    params: &CurveFamilyParams,
    count: usize,
    seed: u64,
) -> Vec<(u32, u32)> {
    let all = affine_points(params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count.min(all.len()));
    let mut taken = vec![false; all.len()];
    while out.len() < count.min(all.len()) {
        let i = rng.gen_range(0..all.len());
        if !taken[i] {
            taken[i] = true;
            out.push(all[i]);
        }
    }
    out
}
