//! The rational points of a family member as a (k, d)-arc in the
//! projective plane over the full coefficient field: intersection profile
//! against every line, and the completeness scan showing the arc extends.
//! The extension witnesses at infinity are governed by the quotient set
//! T_λ of the kernel of L by a fixed nonzero kernel element λ.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::curve::{build_cn, canonical_point, enumerate_plane_points, CurveFamilyParams};
use crate::error::Result;
use crate::galois::pencil_lines_basis;
use crate::gf::Field;
use crate::poly::{LinearizedPoly, TriPoly};

// ---------------------------------------------------------------------------
// the plane

/// PG(2, Q) with full incidence both ways. Points and lines use the same
/// canonical triple normalization; the plane is self-dual, so the line
/// list equals the point list.
pub struct ProjPlane {
    field: Arc<Field>,
    points: Vec<[u32; 3]>,
    point_index: HashMap<[u32; 3], u32>,
    lines_through: Vec<Vec<u32>>,
    points_on: Vec<Vec<u32>>,
}

impl ProjPlane {
    pub fn new(field: &Arc<Field>) -> ProjPlane {
        let mut points = enumerate_plane_points(field);
        points.sort_unstable();
        let point_index: HashMap<[u32; 3], u32> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u32))
            .collect();
        let points_on: Vec<Vec<u32>> = points
            .par_iter()
            .map(|&line| {
                let [p1, p2] = pencil_lines_basis(field, line);
                let mut on = Vec::with_capacity(field.order() as usize + 1);
                on.push(point_index[&canonical_point(field, p1)]);
                for t in field.elements() {
                    let pt = [
                        field.add(p2[0], field.mul(t, p1[0])),
                        field.add(p2[1], field.mul(t, p1[1])),
                        field.add(p2[2], field.mul(t, p1[2])),
                    ];
                    on.push(point_index[&canonical_point(field, pt)]);
                }
                on.sort_unstable();
                on
            })
            .collect();
        let mut lines_through = vec![Vec::with_capacity(field.order() as usize + 1); points.len()];
        for (lid, on) in points_on.iter().enumerate() {
            for &pid in on {
                lines_through[pid as usize].push(lid as u32);
            }
        }
        ProjPlane { field: Arc::clone(field), points, point_index, lines_through, points_on }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    /// Q, the order of the plane.
    pub fn order(&self) -> u64 {
        self.field.order()
    }

    pub fn points(&self) -> &[[u32; 3]] {
        &self.points
    }

    /// The lines share the point list through self-duality.
    pub fn lines(&self) -> &[[u32; 3]] {
        &self.points
    }

    pub fn point_id(&self, pt: [u32; 3]) -> Option<u32> {
        self.point_index.get(&canonical_point(&self.field, pt)).copied()
    }

    pub fn line_id(&self, l: [u32; 3]) -> Option<u32> {
        self.point_id(l)
    }

    pub fn lines_through(&self, point_id: u32) -> &[u32] {
        &self.lines_through[point_id as usize]
    }

    pub fn points_on(&self, line_id: u32) -> &[u32] {
        &self.points_on[line_id as usize]
    }
}

// ---------------------------------------------------------------------------
// the arc

/// All rational points of the member in canonical form, sorted; affine
/// points and the points at infinity together.
pub fn rational_point_set(params: &CurveFamilyParams) -> Vec<[u32; 3]> {
    let field = params.field();
    let curve = build_cn(params);
    let hf = TriPoly::homogenize(&curve.f, curve.degree as u32);
    let mut pts: Vec<[u32; 3]> = enumerate_plane_points(field)
        .into_par_iter()
        .filter(|&pt| hf.eval(pt) == 0)
        .collect();
    pts.sort_unstable();
    pts
}

/// (k, d) of the member's arc: q^{4n+3} - q^{4n+1} + q + 1 points, and
/// lines meeting it in at most q^{2n+1} + q^{2n} points.
pub fn arc_parameters_closed_form(q: u64, n: u32) -> (u64, u64) {
    let k = q.pow(4 * n + 3) - q.pow(4 * n + 1) + q + 1;
    let d = q.pow(2 * n + 1) + q.pow(2 * n);
    (k, d)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct IntersectionProfile {
    /// per line id, |line ∩ S|
    pub line_counts: Vec<u32>,
    /// intersection size -> number of lines attaining it
    pub histogram: BTreeMap<u32, u64>,
    pub max: u32,
}

pub fn intersection_profile(plane: &ProjPlane, set: &[[u32; 3]]) -> IntersectionProfile {
    let member: Vec<bool> = {
        let ids: HashSet<u32> = set.iter().filter_map(|&p| plane.point_id(p)).collect();
        (0..plane.points().len() as u32).map(|i| ids.contains(&i)).collect()
    };
    let line_counts: Vec<u32> = (0..plane.points().len())
        .into_par_iter()
        .map(|lid| {
            plane
                .points_on(lid as u32)
                .iter()
                .filter(|&&pid| member[pid as usize])
                .count() as u32
        })
        .collect();
    let mut histogram: BTreeMap<u32, u64> = BTreeMap::new();
    for &c in &line_counts {
        *histogram.entry(c).or_insert(0) += 1;
    }
    let max = line_counts.iter().copied().max().unwrap_or(0);
    IntersectionProfile { line_counts, histogram, max }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ArcReport {
    pub k: u64,
    pub d: u32,
    pub complete: bool,
    /// points off the arc every line through which meets it in at most
    /// d - 1 points, so that adding the point preserves the arc bound
    pub extension_witnesses: Vec<[u32; 3]>,
}

pub fn completeness_check(plane: &ProjPlane, set: &[[u32; 3]], d: u32) -> ArcReport {
    let profile = intersection_profile(plane, set);
    let in_set: HashSet<u32> = set.iter().filter_map(|&p| plane.point_id(p)).collect();
    let extension_witnesses: Vec<[u32; 3]> = (0..plane.points().len() as u32)
        .into_par_iter()
        .filter(|pid| !in_set.contains(pid))
        .filter(|&pid| {
            plane
                .lines_through(pid)
                .iter()
                .all(|&lid| profile.line_counts[lid as usize] + 1 <= d)
        })
        .map(|pid| plane.points()[pid as usize])
        .collect();
    ArcReport {
        k: in_set.len() as u64,
        d,
        complete: extension_witnesses.is_empty(),
        extension_witnesses,
    }
}

// ---------------------------------------------------------------------------
// the quotient set behind the witnesses at infinity

/// The least nonzero kernel element of L; the scale defining T_λ.
pub fn fixed_kernel_scale(params: &CurveFamilyParams) -> u32 {
    *params
        .l()
        .kernel()
        .iter()
        .find(|&&z| z != 0)
        .expect("the kernel of L has q^{2n} > 1 elements")
}

/// T_λ = {α/λ : L(α) = 0}, sorted.
pub fn t_lambda(params: &CurveFamilyParams, lambda: u32) -> Vec<u32> {
    let field = params.field();
    let mut out: Vec<u32> = params
        .l()
        .kernel()
        .iter()
        .map(|&alpha| field.div(alpha, lambda))
        .collect();
    out.sort_unstable();
    out
}

/// L_λ(x) = x^{q²} - λ^{q²-1}·x; its kernel is the GF(q²)-line λ·GF(q²).
pub fn l_lambda(params: &CurveFamilyParams, lambda: u32) -> Result<LinearizedPoly> {
    let field = params.field();
    let q = params.q();
    let scale = field.pow(lambda, q * q - 1);
    LinearizedPoly::new(field, q, vec![field.neg(scale), 1])
}

/// The directions a at infinity that the quotient-set argument certifies
/// as extension witnesses: a outside T_λ with (a : 1 : 0) off the curve.
pub fn certified_witness_directions(params: &CurveFamilyParams) -> Vec<u32> {
    let field = params.field();
    let q = params.q();
    let neg_one = field.neg_one();
    let lambda = fixed_kernel_scale(params);
    let t_l = t_lambda(params, lambda);
    field
        .elements()
        .filter(|&a| t_l.binary_search(&a).is_err() && field.pow(a, q + 1) != neg_one)
        .collect()
}

/// The combinatorial core of the witness argument: for a direction a, the
/// pencil shift (β, γ) -> β - a·γ over ker L × ker L_λ hits every field
/// element exactly once, precisely when a is outside T_λ; and the shift
/// vanishes only at β = a·γ.
pub fn pencil_core_bijection(params: &CurveFamilyParams, a: u32) -> Result<bool> {
    let field = params.field();
    let lambda = fixed_kernel_scale(params);
    let ker_l = params.l().kernel();
    let ker_ll = l_lambda(params, lambda)?.kernel();
    let mut seen: HashSet<u32> = HashSet::with_capacity(field.order() as usize);
    for &beta in &ker_l {
        for &gamma in &ker_ll {
            seen.insert(field.sub(beta, field.mul(a, gamma)));
        }
    }
    Ok(seen.len() as u64 == field.order())
}

// ---------------------------------------------------------------------------
// dumps

pub fn profile_csv(profile: &IntersectionProfile) -> String {
    let mut out = String::from("intersection_size,line_count\n");
    for (&size, &count) in &profile.histogram {
        out.push_str(&format!("{size},{count}\n"));
    }
    out
}

pub fn witnesses_csv(report: &ArcReport) -> String {
    let mut out = String::from("point\n");
    for w in &report.extension_witnesses {
        out.push_str(&format!("{}:{}:{}\n", w[0], w[1], w[2]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const GRID: [(u32, u32, u32); 3] = [(2, 1, 1), (3, 1, 1), (2, 1, 2)];

    #[test]
    fn plane_incidence() {
        let field = crate::gf::Field::new(2, 4).unwrap();
        let plane = ProjPlane::new(&field);
        assert_eq!(plane.points().len(), 273);
        for lid in 0..plane.points().len() as u32 {
            assert_eq!(plane.points_on(lid).len() as u64, plane.order() + 1);
        }
        for pid in 0..plane.points().len() as u32 {
            assert_eq!(plane.lines_through(pid).len() as u64, plane.order() + 1);
        }
        // two distinct points lie on exactly one common line
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let a = rng.gen_range(0..plane.points().len());
            let b = rng.gen_range(0..plane.points().len());
            if a == b {
                continue;
            }
            let la: HashSet<u32> = plane.lines_through(a as u32).iter().copied().collect();
            let common: Vec<u32> = plane
                .lines_through(b as u32)
                .iter()
                .copied()
                .filter(|l| la.contains(l))
                .collect();
            assert_eq!(common.len(), 1);
            let line = plane.points()[common[0] as usize];
            assert!(crate::curve::incident(&field, line, plane.points()[a]));
            assert!(crate::curve::incident(&field, line, plane.points()[b]));
        }
    }

    #[test]
    fn rational_point_counts() {
        for ((p, e, n), k) in [((2u32, 1u32, 1u32), 99u64), ((3, 1, 1), 1948), ((2, 1, 2), 1539)] {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let pts = rational_point_set(&params);
            assert_eq!(pts.len() as u64, k);
            let (k_formula, _) = arc_parameters_closed_form(params.q(), n);
            assert_eq!(k, k_formula);
            assert_eq!(k, crate::curve::count_plane_points(&params));
            // q + 1 of them at infinity, the singular directions
            let at_inf = pts.iter().filter(|p| p[2] == 0).count() as u64;
            assert_eq!(at_inf, params.q() + 1);
        }
    }

    #[test]
    fn intersection_profile_matches_the_arc_parameters() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let plane = ProjPlane::new(&field);
            let set = rational_point_set(&params);
            let profile = intersection_profile(&plane, &set);
            let (_, d) = arc_parameters_closed_form(q, n);
            assert_eq!(profile.max as u64, d);
            assert_eq!(d, params.degree());
            // the line at infinity picks up exactly the singular points
            let z0 = plane.line_id([0, 0, 1]).unwrap();
            assert_eq!(profile.line_counts[z0 as usize] as u64, q + 1);
            // every point lies on Q + 1 lines
            let total: u64 = profile.line_counts.iter().map(|&c| c as u64).sum();
            assert_eq!(total, set.len() as u64 * (plane.order() + 1));
            let lines: u64 = profile.histogram.values().sum();
            assert_eq!(lines, plane.points().len() as u64);
            // some line through every Galois direction attains the maximum
            let neg_one = field.neg_one();
            let mut galois_dirs = vec![[1u32, 0, 0]];
            for a in field.elements() {
                if field.pow(a, q * q) == a && field.pow(a, q + 1) != neg_one {
                    galois_dirs.push(canonical_point(&field, [a, 1, 0]));
                }
            }
            for r in galois_dirs {
                let pid = plane.point_id(r).unwrap();
                let attained = plane
                    .lines_through(pid)
                    .iter()
                    .any(|&lid| profile.line_counts[lid as usize] as u64 == d);
                assert!(attained, "no maximal line through {:?}", r);
            }
        }
    }

    #[test]
    fn the_arc_is_not_complete_and_the_certified_directions_extend_it() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let plane = ProjPlane::new(&field);
            let set = rational_point_set(&params);
            let (_, d) = arc_parameters_closed_form(params.q(), n);
            let report = completeness_check(&plane, &set, d as u32);
            assert_eq!(report.k, set.len() as u64);
            assert!(!report.complete);
            assert!(!report.extension_witnesses.is_empty());
            let witness_set: HashSet<[u32; 3]> =
                report.extension_witnesses.iter().copied().collect();
            for a in certified_witness_directions(&params) {
                let r = canonical_point(&field, [a, 1, 0]);
                assert!(witness_set.contains(&r), "direction {a} should extend the arc");
            }
        }
    }

    #[test]
    fn quotient_set_and_pencil_core() {
        for (p, e, n) in GRID {
            let params = CurveFamilyParams::normalized(p, e, n).unwrap();
            let field = params.field().clone();
            let q = params.q();
            let lambda = fixed_kernel_scale(&params);
            let t_l = t_lambda(&params, lambda);
            assert_eq!(t_l.len() as u64, params.tower().q2n());
            assert!(t_l.binary_search(&0).is_ok());
            assert!(t_l.binary_search(&1).is_ok());
            // the companion kernel is the GF(q²)-line through λ
            let ker = l_lambda(&params, lambda).unwrap().kernel();
            assert_eq!(ker.len() as u64, q * q);
            for &g in &ker {
                let mu = field.div(g, lambda);
                assert_eq!(field.pow(mu, q * q), mu);
            }
            // the shift map is a bijection exactly off T_λ
            for a in field.elements() {
                let bij = pencil_core_bijection(&params, a).unwrap();
                assert_eq!(bij, t_l.binary_search(&a).is_err(), "direction {a}");
            }
            // and the shift vanishes only on the diagonal β = aγ
            let mut rng = ChaCha8Rng::seed_from_u64(5 + q);
            let ker_l = params.l().kernel();
            for _ in 0..200 {
                let a = rng.gen_range(0..field.order() as u32);
                let beta = ker_l[rng.gen_range(0..ker_l.len())];
                let gamma = ker[rng.gen_range(0..ker.len())];
                let shift_is_zero = field.sub(beta, field.mul(a, gamma)) == 0;
                assert_eq!(shift_is_zero, beta == field.mul(a, gamma));
            }
        }
    }

    #[test]
    fn degenerate_sets() {
        let field = crate::gf::Field::new(2, 4).unwrap();
        let plane = ProjPlane::new(&field);
        let profile = intersection_profile(&plane, &[]);
        assert_eq!(profile.max, 0);
        assert_eq!(profile.histogram.get(&0), Some(&273));
        // a single point with the family bound: everything else extends
        let single = [[1u32, 0, 0]];
        let report = completeness_check(&plane, &single, 12);
        assert!(!report.complete);
        assert_eq!(report.extension_witnesses.len(), 272);
    }

    #[test]
    fn csv_shapes() {
        let params = CurveFamilyParams::normalized(2, 1, 1).unwrap();
        let plane = ProjPlane::new(params.field());
        let set = rational_point_set(&params);
        let profile = intersection_profile(&plane, &set);
        let csv = profile_csv(&profile);
        assert!(csv.starts_with("intersection_size,line_count\n"));
        assert_eq!(csv.lines().count(), profile.histogram.len() + 1);
        let report = completeness_check(&plane, &set, 12);
        let wcsv = witnesses_csv(&report);
        assert_eq!(wcsv.lines().count(), report.extension_witnesses.len() + 1);
    }
}
