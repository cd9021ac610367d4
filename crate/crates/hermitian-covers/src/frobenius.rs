//! Frobenius nonclassicality. A plane curve is p^s-Frobenius nonclassical
//! when the p^s-power map sends every smooth point onto its own tangent
//! line; for an irreducible curve that is one polynomial congruence,
//!   f_x·(x^{p^s} - x) + f_y·(y^{p^s} - y) ≡ 0  (mod f).
//! The family member is nonclassical exactly for the power equal to the
//! order of its full coefficient field, and exactly when it is projectively
//! equivalent over that field to the normalized member; the classifier
//! recovers the witness scaling.

use rayon::prelude::*;

use crate::curve::CurveFamilyParams;
use crate::error::{Error, Result};
use crate::gf::{make_tower, Field};
use crate::poly::{log_char, BiPoly};

#[derive(Debug, Clone, serde::Serialize)]
pub struct FrobeniusReport {
    pub s: u32,
    /// p^s itself
    pub power: u64,
    pub nonclassical: bool,
    /// monomials left after reduction; zero exactly when nonclassical
    pub remainder_terms: usize,
}

fn tangent_parts(f: &BiPoly) -> Result<(BiPoly, BiPoly)> {
    if !f.is_monic_in_y() {
        return Err(Error::InvalidParameter(
            "the curve must be monic in y for the reduction".into(),
        ));
    }
    let fx = f.partial_x();
    let fy = f.partial_y();
    if fx.is_zero() && fy.is_zero() {
        return Err(Error::InvalidParameter(
            "both partials vanish identically: the polynomial is a p-th power".into(),
        ));
    }
    Ok((fx, fy))
}

fn report_for(f: &BiPoly, fx: &BiPoly, fy: &BiPoly, s: u32, power: u64, ys: &BiPoly) -> FrobeniusReport {
    let field = f.field();
    let x = BiPoly::term(field, 1, 1, 0);
    let y = BiPoly::term(field, 1, 0, 1);
    let xs = BiPoly::term(field, 1, power as u32, 0).sub(&x);
    let t = fx.mul(&xs).add(&fy.mul(&ys.sub(&y)));
    let r = t.rem_monic_y(f);
    FrobeniusReport { s, power, nonclassical: r.is_zero(), remainder_terms: r.num_terms() }
}

const MAX_FROBENIUS_POWER: u64 = 1 << 24;

fn checked_power(p: u64, s: u32) -> Result<u64> {
    let mut power = 1u64;
    for _ in 0..s {
        power *= p;
        if power > MAX_FROBENIUS_POWER {
            return Err(Error::InvalidParameter(format!(
                "Frobenius power p^{s} exceeds the supported bound"
            )));
        }
    }
    Ok(power)
}

/// Decide p^s-Frobenius nonclassicality of a curve monic in y by reducing
/// the tangent-Frobenius polynomial.
pub fn is_frobenius_nonclassical(f: &BiPoly, s: u32) -> Result<FrobeniusReport> {
    let (fx, fy) = tangent_parts(f)?;
    let field = f.field();
    let power = checked_power(field.characteristic() as u64, s)?;
    let ys = BiPoly::term(field, 1, 0, 1).frobenius_pow_mod(s, f);
    Ok(report_for(f, &fx, &fy, s, power, &ys))
}

/// One report per power in 1..=window, sharing a single Frobenius ladder.
pub fn scan_nonclassical_powers(f: &BiPoly, window: u32) -> Result<Vec<FrobeniusReport>> {
    let (fx, fy) = tangent_parts(f)?;
    let field = f.field();
    let p = field.characteristic() as u64;
    checked_power(p, window)?;
    let mut ladder = Vec::with_capacity(window as usize);
    let mut ys = BiPoly::term(field, 1, 0, 1).rem_monic_y(f);
    let mut power = 1u64;
    for s in 1..=window {
        ys = ys.frobenius_pow(1).rem_monic_y(f);
        power *= p;
        ladder.push((s, power, ys.clone()));
    }
    Ok(ladder
        .par_iter()
        .map(|(s, power, ys)| report_for(f, &fx, &fy, *s, *power, ys))
        .collect())
}

/// The scan cap: a few steps beyond the power where the family member goes
/// nonclassical.
pub fn default_scan_window(params: &CurveFamilyParams) -> u32 {
    let e = log_char(params.field(), params.q());
    2 * (params.n() + 1) * e + 4
}

// ---------------------------------------------------------------------------
// classification of family members

#[derive(Debug, Clone, serde::Serialize)]
pub struct FamilyClassification {
    /// s with p^s the full coefficient field order, when the member is
    /// equivalent to the normalized one
    pub nonclassical_power: Option<u32>,
    /// (alpha, beta): L(alpha)^{q+1} = c and beta = 1/L(alpha) rescales the
    /// member to the normalized one
    pub witness: Option<(u32, u32)>,
}

/// Search for a scaling that carries the member onto the normalized one:
/// alpha with L(alpha)^{q+1} = c gives beta = 1/L(alpha), and the member
/// qualifies when beta·L(x/beta^{q²}) has all coefficients 1 and
/// beta^{q+1}·c = 1. Existence of the witness is equivalent to
/// nonclassicality at the full field order.
pub fn classify_family_member(params: &CurveFamilyParams) -> FamilyClassification {
    let field = params.field();
    let q = params.q();
    let l = params.l();
    let e = log_char(field, q);
    let q2 = q * q;
    let ones = vec![1u32; params.n() as usize + 1];
    for alpha in field.elements().filter(|&a| a != 0) {
        let la = l.eval(alpha);
        if la == 0 || field.pow(la, q + 1) != params.c() {
            continue;
        }
        let beta = field.inv(la);
        if field.mul(field.pow(beta, q + 1), params.c()) != 1 {
            continue;
        }
        if l.twist_coeffs(field.inv(field.pow(beta, q2)), beta) == ones {
            return FamilyClassification {
                nonclassical_power: Some(2 * (params.n() + 1) * e),
                witness: Some((alpha, beta)),
            };
        }
    }
    FamilyClassification { nonclassical_power: None, witness: None }
}

/// The member obtained from the normalized one by x -> x/beta^{q²},
/// y -> y/beta^{q²}: coefficients beta^{q^{2(i+1)}-1} and constant
/// beta^{-(q+1)}. Always classifies as nonclassical.
pub fn twisted_member(p: u32, e: u32, n: u32, beta: u32) -> Result<CurveFamilyParams> {
    let tower = make_tower(p, e, n)?;
    let field = tower.big.clone();
    if beta == 0 || beta as u64 >= field.order() {
        return Err(Error::InvalidParameter("the scaling must be a unit".into()));
    }
    let q = tower.q();
    let q2 = q * q;
    let mut alphas = Vec::with_capacity(n as usize);
    let mut pw = beta;
    for _ in 0..n {
        pw = field.pow(pw, q2);
        alphas.push(field.div(pw, beta));
    }
    let c = field.inv(field.pow(beta, q + 1));
    CurveFamilyParams::new(tower, alphas, c)
}

// ---------------------------------------------------------------------------
// the wider family over a subfield

/// The additive-power curve M(x)^k + M(y)^k + c over GF(q') with
/// M(x) = x^{q^n} + ... + x^q + x and k = (q-1)/(q'-1), checked at the
/// power q^{n+1}. Requires q'-1 to divide q-1 and q to be a power of q'.
pub fn check_generalized_family(q: u64, q_prime: u64, n: u32, c: u32) -> Result<FrobeniusReport> {
    if q_prime < 2 || q < 2 {
        return Err(Error::InvalidParameter("both field orders must be at least 2".into()));
    }
    if (q - 1) % (q_prime - 1) != 0 {
        return Err(Error::InvalidParameter(
            "q' - 1 must divide q - 1".into(),
        ));
    }
    let mut t = q_prime;
    while t < q {
        t = t.saturating_mul(q_prime);
    }
    if t != q {
        return Err(Error::InvalidParameter("q must be a power of q'".into()));
    }
    let p = (2..=q_prime).find(|d| q_prime % d == 0).expect("q' has a prime factor");
    let mut e_prime = 0u32;
    let mut r = q_prime;
    while r > 1 {
        if r % p != 0 {
            return Err(Error::InvalidParameter("q' must be a prime power".into()));
        }
        r /= p;
        e_prime += 1;
    }
    let field = Field::new(p as u32, e_prime)?;
    if c == 0 || c as u64 >= field.order() {
        return Err(Error::InvalidParameter(
            "the constant must be a unit of GF(q')".into(),
        ));
    }
    let k = (q - 1) / (q_prime - 1);
    let mut mx = BiPoly::zero(&field);
    let mut my = BiPoly::zero(&field);
    let mut exp = 1u64;
    for _ in 0..=n {
        mx = mx.add(&BiPoly::term(&field, 1, exp as u32, 0));
        my = my.add(&BiPoly::term(&field, 1, 0, exp as u32));
        exp *= q;
    }
    let f = mx.pow(k).add(&my.pow(k)).add(&BiPoly::constant(&field, c));
    // q^{n+1} = p^s
    let e_q = e_prime * (q.ilog(q_prime)) ;
    let s = (n + 1) * e_q;
    is_frobenius_nonclassical(&f, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::build_cn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GRID: [(u32, u32, u32); 3] = [(2, 1, 1), (3, 1, 1), (2, 1, 2)];

    #[test]
    fn family_members_nonclassical_exactly_at_the_full_field_order() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let f = build_cn(&params).f;
            let window = default_scan_window(&params);
            let target = 2 * (n + 1) * e;
            let reports = scan_nonclassical_powers(&f, window).unwrap();
            assert_eq!(reports.len(), window as usize);
            for rep in &reports {
                assert_eq!(rep.nonclassical, rep.s == target, "s = {}", rep.s);
                assert_eq!(rep.nonclassical, rep.remainder_terms == 0);
            }
            // the winning power is the order of the full coefficient field
            assert_eq!(
                reports[target as usize - 1].power,
                params.field().order()
            );
        }
    }

    #[test]
    fn classifier_finds_the_normalized_witness() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let cls = classify_family_member(&params);
            assert_eq!(cls.nonclassical_power, Some(2 * (n + 1) * e));
            let (alpha, beta) = cls.witness.unwrap();
            let l = params.l();
            assert_eq!(field.pow(l.eval(alpha), q + 1), params.c());
            assert_eq!(field.mul(l.eval(alpha), beta), 1);
            assert_eq!(field.mul(field.pow(beta, q + 1), params.c()), 1);
        }
    }

    #[test]
    fn constant_outside_the_norm_image_is_classical() {
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let field = params.field().clone();
        let q = params.q();
        let l = params.l();
        // L maps GF(16) onto GF(4) and the norm crushes GF(4)* to 1, so
        // the composite takes just the two values 0 and 1
        let image: std::collections::HashSet<u32> = field
            .elements()
            .map(|x| field.pow(l.eval(x), q + 1))
            .collect();
        assert_eq!(image.len(), 2);
        let c_out = field
            .elements()
            .find(|&c| c != 0 && !image.contains(&c))
            .unwrap();
        let twisted = CurveFamilyParams::new(params.tower().clone(), vec![1], c_out).unwrap();
        let cls = classify_family_member(&twisted);
        assert!(cls.witness.is_none());
        let report =
            is_frobenius_nonclassical(&build_cn(&twisted).f, 2 * 2 * 1).unwrap();
        assert!(!report.nonclassical);
        assert!(report.remainder_terms > 0);
    }

    #[test]
    fn classifier_and_checker_agree_on_perturbed_members() {
        let mut cases = 0u32;
        for (p, e, n, rounds) in [(2u32, 1u32, 1u32, 8u32), (3, 1, 1, 3), (2, 1, 2, 3)] {
            let normalized = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = normalized.field().clone();
            let target = 2 * (n + 1) * e;
            let mut rng = ChaCha8Rng::seed_from_u64(900 + p as u64 + n as u64);
            for round in 0..rounds {
                let params = if round % 2 == 0 {
                    // a scaled copy of the normalized member
                    let beta = 1 + rng.gen_range(0..field.order() as u32 - 1);
                    twisted_member(p, e, n, beta).unwrap()
                } else {
                    // arbitrary coefficients, usually inequivalent
                    let alphas: Vec<u32> = (0..n)
                        .map(|_| 1 + rng.gen_range(0..field.order() as u32 - 1))
                        .collect();
                    let c = 1 + rng.gen_range(0..field.order() as u32 - 1);
                    CurveFamilyParams::new(normalized.tower().clone(), alphas, c).unwrap()
                };
                let cls = classify_family_member(&params);
                let report =
                    is_frobenius_nonclassical(&build_cn(&params).f, target).unwrap();
                assert_eq!(cls.witness.is_some(), report.nonclassical);
                assert_eq!(cls.nonclassical_power.is_some(), report.nonclassical);
                if round % 2 == 0 {
                    assert!(report.nonclassical, "scaled copies stay nonclassical");
                }
                cases += 1;
            }
        }
        assert!(cases >= 10);
    }

    #[test]
    fn composing_with_a_symmetry_keeps_the_verdict() {
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let field = params.field().clone();
        let f = build_cn(&params).f;
        let group = crate::autgrp::generate_group(
            &field,
            &crate::autgrp::explicit_generators(&params),
            10_000,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let c = group.elements()[rng.gen_range(0..group.elements().len())];
            let m = c.affine_normalized(&field);
            let gx = BiPoly::term(&field, m[0], 1, 0)
                .add(&BiPoly::term(&field, m[1], 0, 1))
                .add(&BiPoly::constant(&field, m[2]));
            let gy = BiPoly::term(&field, m[3], 1, 0)
                .add(&BiPoly::term(&field, m[4], 0, 1))
                .add(&BiPoly::constant(&field, m[5]));
            let composed = f.substitute(&gx, &gy);
            let scale = composed.proportional_scalar(&f).unwrap();
            let g = composed.scale(field.inv(scale));
            for s in [2u32, 4] {
                assert_eq!(
                    is_frobenius_nonclassical(&g, s).unwrap().nonclassical,
                    is_frobenius_nonclassical(&f, s).unwrap().nonclassical
                );
            }
        }
    }

    #[test]
    fn generalized_family_members() {
        // the quartic-over-binary member goes nonclassical at 16
        let report = check_generalized_family(4, 2, 1, 1).unwrap();
        assert!(report.nonclassical);
        assert_eq!(report.power, 16);
        // the degenerate q = q' member is the plain additive curve
        let report = check_generalized_family(2, 2, 1, 1).unwrap();
        assert!(report.nonclassical);
        assert_eq!(report.power, 4);
        let report = check_generalized_family(3, 3, 1, 2).unwrap();
        assert!(report.nonclassical);
        assert_eq!(report.power, 9);
        // malformed parameters
        assert!(check_generalized_family(8, 4, 1, 1).is_err());
        assert!(check_generalized_family(13, 3, 1, 1).is_err());
        assert!(check_generalized_family(4, 2, 1, 0).is_err());
        assert!(check_generalized_family(4, 2, 1, 2).is_err());
    }

    #[test]
    fn malformed_curves_are_rejected() {
        let field = crate::gf::Field::new(3, 1).unwrap();
        // not monic in y
        let f = BiPoly::term(&field, 2, 0, 2).add(&BiPoly::term(&field, 1, 1, 0));
        assert!(is_frobenius_nonclassical(&f, 1).is_err());
        // both partials vanish: a cube in characteristic 3
        let f = BiPoly::term(&field, 1, 0, 3).add(&BiPoly::term(&field, 1, 3, 0));
        assert!(is_frobenius_nonclassical(&f, 1).is_err());
        // power bound
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let f = build_cn(&params).f;
        assert!(is_frobenius_nonclassical(&f, 60).is_err());
    }
}
