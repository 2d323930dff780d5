//! Isogeny-orbit experiments on the model: Frobenius orbits, the counts
//! |S_n| of distinct intersection points of twisted curves, enumeration of
//! isogenous pairs, and Zariski-density evidence via hypersurface rank tests.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{make_field, FieldCtx, FieldError, Fq, UniPoly};
use crate::linalg::{nullspace, RankTracker};
use crate::pseries::Axis;
use crate::surface::{
    as_x2_coeffs, embed_curve, pullback_global, sum_of_local_mults, Chart, GlobalCurve,
    SurfaceError,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("enumeration budget exceeded")]
    BudgetExceeded,
    #[error("need at least {needed} pairs for the rank test, have {have}")]
    InsufficientPairs { needed: usize, have: usize },
    #[error("extension degree {0} exceeds the field tower limit")]
    DegreeTooLarge(usize),
    #[error("surface error: {0}")]
    Surface(#[from] SurfaceError),
    #[error("field error: {0}")]
    Field(#[from] FieldError),
}

// --------------------------- orbits ---------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct OrbitData {
    pub r1: u64,
    pub r2: u64,
    /// Joint period r(x) = lcm(r1, r2).
    pub r: u64,
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    a / x * b
}

/// Per-axis Frobenius periods of a point: the degree over F_p of each
/// coordinate, and their lcm.
pub fn frob_orbit(ctx: &FieldCtx, x1: Fq, x2: Fq) -> OrbitData {
    let r1 = ctx.degree_over(x1, 1) as u64;
    let r2 = ctx.degree_over(x2, 1) as u64;
    OrbitData { r1, r2, r: lcm_u64(r1, r2) }
}

// --------------------------- |S_n| ---------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SnReport {
    pub n: u64,
    pub count: u64,
    pub complete: bool,
    pub method: &'static str,
}

/// Number of distinct affine points of pullback(C, axis, n) meet D.
///
/// When D is linear in the fiber coordinate the count is exact over the
/// algebraic closure, by substituting x2 = -B/A into the pullback and
/// taking the degree of the radical. Otherwise the points are enumerated
/// over extensions of degree <= m_max with Bezout-sum certification.
pub fn s_n_count(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    d: &GlobalCurve,
    axis: Axis,
    n: u64,
    m_max: usize,
) -> Result<SnReport, DensityError> {
    let cn = pullback_global(ctx, c, axis, n)?;
    if crate::surface::have_common_component(ctx, &cn.f, &d.f) {
        return Err(DensityError::Surface(SurfaceError::CommonComponent));
    }

    if d.f.max_degree(Axis::T2) == 1 {
        let dc = as_x2_coeffs(&d.f);
        let b = dc[0].clone();
        let a = dc[1].clone();
        if a.gcd(ctx, &b).degree().unwrap_or(0) == 0 {
            // substitute x2 = -B/A and clear denominators
            let cc = as_x2_coeffs(&cn.f);
            let jmax = cc.len() - 1;
            let minus_b = b.scale(ctx, ctx.neg(ctx.one()));
            let mut h = UniPoly::zero();
            for (j, cj) in cc.iter().enumerate() {
                let term = cj
                    .mul(ctx, &minus_b.pow(ctx, j as u32))
                    .mul(ctx, &a.pow(ctx, (jmax - j) as u32));
                h = h.add(ctx, &term);
            }
            let rad_h = h.radical(ctx);
            let total = rad_h.degree().unwrap_or(0) as u64;
            let excluded = rad_h.gcd(ctx, &a.radical(ctx)).degree().unwrap_or(0) as u64;
            return Ok(SnReport {
                n,
                count: total - excluded,
                complete: true,
                method: "radical",
            });
        }
    }

    // general path: full chart enumeration with multiplicity accounting
    let rep = sum_of_local_mults(ctx, &cn, d, m_max).map_err(DensityError::Surface)?;
    let count: u64 = rep
        .points
        .iter()
        .filter(|p| p.chart == Chart::Affine)
        .map(|p| p.degree)
        .sum();
    Ok(SnReport { n, count, complete: rep.complete, method: "enumeration" })
}

// --------------------------- isogenous pairs ---------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IsogenyPair {
    pub x: (Fq, Fq),
    pub y: (Fq, Fq),
    pub a1: u32,
    pub a2: u32,
    /// true when the y-side is obtained from the x-side by the powers,
    /// false for the dual direction.
    pub forward: bool,
}

#[derive(Clone, Debug)]
pub struct PairSet {
    pub ctxm: FieldCtx,
    pub m: usize,
    pub a_max: u32,
    pub pairs: Vec<IsogenyPair>,
    pub c_points: Vec<(Fq, Fq)>,
    pub d_points: Vec<(Fq, Fq)>,
}

/// All affine points of the curve with both coordinates in the field.
fn curve_points(ctxm: &FieldCtx, f: &crate::pseries::TruncSeries2) -> Vec<(Fq, Fq)> {
    let mut out = Vec::new();
    for x1 in ctxm.all_elements() {
        let fiber = fiber_at(ctxm, f, x1);
        if fiber.is_zero() {
            for x2 in ctxm.all_elements() {
                out.push((x1, x2));
            }
            continue;
        }
        for x2 in ctxm.all_elements() {
            if fiber.eval(ctxm, x2).is_zero() {
                out.push((x1, x2));
            }
        }
    }
    out
}

fn fiber_at(ctxm: &FieldCtx, f: &crate::pseries::TruncSeries2, a: Fq) -> UniPoly {
    let d2 = f.max_degree(Axis::T2) as usize;
    let mut coeffs = vec![ctxm.zero(); d2 + 1];
    for (&(i, j), &c) in f.terms() {
        coeffs[j as usize] = ctxm.add(coeffs[j as usize], ctxm.mul(c, ctxm.pow(a, i as u128)));
    }
    UniPoly::from_coeffs(coeffs)
}

/// All pairs (x in C(F_{q^m}), y in D(F_{q^m})) related by coordinatewise
/// Frobenius powers p^{a1}, p^{a2} with 0 <= a_i <= a_max, both directions.
pub fn isogenous_pairs(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    d: &GlobalCurve,
    m: usize,
    a_max: u32,
) -> Result<PairSet, DensityError> {
    let km = ctx.k() * m;
    if km > crate::ffield::MAX_K {
        return Err(DensityError::DegreeTooLarge(km));
    }
    let ctxm = make_field(ctx.p(), km)?;
    // point enumeration is q^m per curve; the pair loop is pruned to
    // points actually on the curves
    if ctxm.order() > crate::ffield::ENUM_BUDGET {
        return Err(DensityError::BudgetExceeded);
    }
    let cf = embed_curve(ctx, &ctxm, &c.f)?;
    let df = embed_curve(ctx, &ctxm, &d.f)?;
    let c_points = curve_points(&ctxm, &cf);
    let d_points = curve_points(&ctxm, &df);

    let on_d = |pt: (Fq, Fq)| eval_curve(&ctxm, &df, pt).is_zero();
    let on_c = |pt: (Fq, Fq)| eval_curve(&ctxm, &cf, pt).is_zero();

    let mut set: BTreeSet<IsogenyPair> = BTreeSet::new();
    for &(x1, x2) in &c_points {
        for a1 in 0..=a_max {
            let y1 = ctxm.frobenius(x1, a1 as u64);
            for a2 in 0..=a_max {
                let y2 = ctxm.frobenius(x2, a2 as u64);
                if on_d((y1, y2)) {
                    set.insert(IsogenyPair {
                        x: (x1, x2),
                        y: (y1, y2),
                        a1,
                        a2,
                        forward: true,
                    });
                }
            }
        }
    }
    for &(y1, y2) in &d_points {
        for a1 in 0..=a_max {
            let x1 = ctxm.frobenius(y1, a1 as u64);
            for a2 in 0..=a_max {
                let x2 = ctxm.frobenius(y2, a2 as u64);
                if on_c((x1, x2)) {
                    // (0,0) in both directions is the same relation
                    let forward = a1 == 0 && a2 == 0;
                    set.insert(IsogenyPair {
                        x: (x1, x2),
                        y: (y1, y2),
                        a1,
                        a2,
                        forward,
                    });
                }
            }
        }
    }
    Ok(PairSet { ctxm, m, a_max, pairs: set.into_iter().collect(), c_points, d_points })
}

fn eval_curve(ctxm: &FieldCtx, f: &crate::pseries::TruncSeries2, (a, b): (Fq, Fq)) -> Fq {
    let mut acc = ctxm.zero();
    for (&(i, j), &c) in f.terms() {
        let t = ctxm.mul(ctxm.pow(a, i as u128), ctxm.pow(b, j as u128));
        acc = ctxm.add(acc, ctxm.mul(c, t));
    }
    acc
}

// --------------------------- rank test ---------------------------

#[derive(Clone, Debug, Serialize)]
pub struct RankTestReport {
    pub bound: [u32; 4],
    pub monomial_count: usize,
    pub pair_count: usize,
    pub pair_rank: usize,
    pub reference_rank: usize,
    pub dense_at_bound: bool,
    /// Coefficients of a separating hypersurface when not dense.
    pub witness: Option<Vec<String>>,
    pub distinct_x_projections: usize,
    pub distinct_y_projections: usize,
}

fn monomial_row(ctxm: &FieldCtx, bound: [u32; 4], v: [Fq; 4]) -> Vec<Fq> {
    let mut row = Vec::new();
    for i in 0..=bound[0] {
        for j in 0..=bound[1] {
            for k in 0..=bound[2] {
                for l in 0..=bound[3] {
                    let t = ctxm.mul(
                        ctxm.mul(ctxm.pow(v[0], i as u128), ctxm.pow(v[1], j as u128)),
                        ctxm.mul(ctxm.pow(v[2], k as u128), ctxm.pow(v[3], l as u128)),
                    );
                    row.push(t);
                }
            }
        }
    }
    row
}

/// DENSE-AT-b iff no hypersurface of multidegree <= b separates the pair
/// set from C x D: the row spaces of the monomial evaluation matrices on
/// the pairs and on a reference sample of C x D must agree.
pub fn density_rank_test(
    pairs: &PairSet,
    bound: [u32; 4],
) -> Result<RankTestReport, DensityError> {
    let ctxm = &pairs.ctxm;
    let ncols: usize = bound.iter().map(|&b| b as usize + 1).product();
    let distinct: BTreeSet<((Fq, Fq), (Fq, Fq))> =
        pairs.pairs.iter().map(|p| (p.x, p.y)).collect();
    if distinct.len() < ncols {
        return Err(DensityError::InsufficientPairs { needed: ncols, have: distinct.len() });
    }

    let mut pair_rows: Vec<Vec<Fq>> = Vec::with_capacity(distinct.len());
    let mut tracker = RankTracker::new(ctxm, ncols);
    for &((x1, x2), (y1, y2)) in &distinct {
        let row = monomial_row(ctxm, bound, [x1, x2, y1, y2]);
        tracker.add_row(row.clone());
        pair_rows.push(row);
    }
    let pair_rank = tracker.rank();

    // reference sample: C x D point grid in canonical order
    let mut ref_tracker = RankTracker::new(ctxm, ncols);
    let mut ref_rows: Vec<Vec<Fq>> = Vec::new();
    'outer: for &(x1, x2) in &pairs.c_points {
        for &(y1, y2) in &pairs.d_points {
            let row = monomial_row(ctxm, bound, [x1, x2, y1, y2]);
            ref_tracker.add_row(row.clone());
            ref_rows.push(row);
            if ref_tracker.is_full() || ref_rows.len() >= 20_000 {
                break 'outer;
            }
        }
    }
    let reference_rank = ref_tracker.rank();
    let dense = pair_rank == reference_rank;

    let witness = if dense {
        None
    } else {
        // a nullspace vector of the pair matrix that is not orthogonal to
        // the reference rows is a separating hypersurface
        let null = nullspace(ctxm, &pair_rows, ncols);
        null.iter()
            .find(|v| {
                ref_rows.iter().any(|r| {
                    let mut acc = ctxm.zero();
                    for (a, b) in r.iter().zip(v.iter()) {
                        acc = ctxm.add(acc, ctxm.mul(*a, *b));
                    }
                    !acc.is_zero()
                })
            })
            .map(|v| v.iter().map(|&c| ctxm.fmt_elem(c)).collect())
    };

    let xs: BTreeSet<(Fq, Fq)> = distinct.iter().map(|&(x, _)| x).collect();
    let ys: BTreeSet<(Fq, Fq)> = distinct.iter().map(|&(_, y)| y).collect();
    Ok(RankTestReport {
        bound,
        monomial_count: ncols,
        pair_count: distinct.len(),
        pair_rank,
        reference_rank,
        dense_at_bound: dense,
        witness,
        distinct_x_projections: xs.len(),
        distinct_y_projections: ys.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseries::{TruncSeries2, EXACT};

    fn curve(ctx: &FieldCtx, terms: &[((u64, u64), i64)]) -> GlobalCurve {
        GlobalCurve::new(TruncSeries2::from_terms(
            terms.iter().map(|&(k, c)| (k, ctx.from_i64(c))),
            EXACT,
        ))
        .unwrap()
    }

    #[test]
    fn orbit_examples() {
        let ctx = make_field(5, 6).unwrap();
        let rational = ctx.from_u64(3);
        let o = frob_orbit(&ctx, rational, rational);
        assert_eq!(o.r, 1);
        // roots of the degree-2 and degree-3 subfield moduli
        let ctx2 = make_field(5, 2).unwrap();
        let ctx3 = make_field(5, 3).unwrap();
        let deg2 = crate::ffield::Embedding::new(&ctx2, &ctx)
            .unwrap()
            .map(&ctx, ctx2.generator());
        let deg3 = crate::ffield::Embedding::new(&ctx3, &ctx)
            .unwrap()
            .map(&ctx, ctx3.generator());
        assert_eq!(ctx.degree_over(deg2, 1), 2);
        assert_eq!(ctx.degree_over(deg3, 1), 3);
        let o = frob_orbit(&ctx, deg2, rational);
        assert_eq!((o.r1, o.r2, o.r), (2, 1, 2));
        let o = frob_orbit(&ctx, deg3, deg2);
        assert_eq!((o.r1, o.r2, o.r), (3, 2, 6));
    }

    #[test]
    fn artin_schreier_counts() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((1, 0), -1)]); // x2 - x1
        let d = curve(&ctx, &[((0, 1), 1), ((1, 0), -1), ((0, 0), -1)]); // x2 - x1 - 1
        for n in 0..=6u64 {
            let rep = s_n_count(&ctx, &c, &d, Axis::T1, n, 6).unwrap();
            assert!(rep.complete);
            let expected = if n == 0 { 0 } else { 5u64.pow(n as u32) };
            assert_eq!(rep.count, expected, "n = {n}");
        }
    }

    #[test]
    fn sn_general_path() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((2, 0), -1)]); // x2 - x1^2
        let d = curve(&ctx, &[((0, 2), 1), ((1, 0), -1)]); // x2^2 - x1 (not x2-linear)
        let rep = s_n_count(&ctx, &c, &d, Axis::T1, 0, 6).unwrap();
        assert!(rep.complete);
        assert_eq!(rep.method, "enumeration");
        // x1^4 = x1: x1 in F_4... over F_5: x1^4 - x1 has 4 distinct roots,
        // each giving one x2 = x1^2
        assert_eq!(rep.count, 4);
    }

    #[test]
    fn pair_enumeration_artin_schreier() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((1, 0), -1)]);
        let d = curve(&ctx, &[((0, 1), 1), ((1, 0), -1), ((0, 0), -1)]);
        // roots of x^{5^a} = x + 1 in F_{5^4} exist only for a = 0 mod ...:
        // the trace obstruction leaves exactly the pairs coming from the
        // a_max = 0 layer empty and the diagonal-power layers on the curve
        let ps = isogenous_pairs(&ctx, &c, &d, 4, 4).unwrap();
        // every pair must satisfy both membership equations exactly
        for p in &ps.pairs {
            assert!(eval_curve(&ps.ctxm, &embed_curve(&ctx, &ps.ctxm, &c.f).unwrap(), p.x)
                .is_zero());
            assert!(eval_curve(&ps.ctxm, &embed_curve(&ctx, &ps.ctxm, &d.f).unwrap(), p.y)
                .is_zero());
        }
        // a_max = 0 reduces to common rational points (none: parallel lines)
        let ps0 = isogenous_pairs(&ctx, &c, &d, 2, 0).unwrap();
        assert!(ps0.pairs.is_empty());
    }

    #[test]
    fn rank_test_full_sample_dense() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((1, 0), -1)]);
        let d = curve(&ctx, &[((0, 1), 1), ((1, 0), -1), ((0, 0), -1)]);
        let ctxm = make_field(5, 2).unwrap();
        let cf = embed_curve(&ctx, &ctxm, &c.f).unwrap();
        let df = embed_curve(&ctx, &ctxm, &d.f).unwrap();
        let c_points = curve_points(&ctxm, &cf);
        let d_points = curve_points(&ctxm, &df);
        let mut pairs = Vec::new();
        for &x in &c_points {
            for &y in &d_points {
                pairs.push(IsogenyPair { x, y, a1: 0, a2: 0, forward: true });
            }
        }
        let ps = PairSet { ctxm, m: 2, a_max: 0, pairs, c_points, d_points };
        let rep = density_rank_test(&ps, [1, 1, 1, 1]).unwrap();
        assert!(rep.dense_at_bound);
    }

    #[test]
    fn rank_test_axis_witness() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((1, 0), -1)]);
        let d = curve(&ctx, &[((0, 1), 1), ((1, 0), -1), ((0, 0), -1)]);
        let ctxm = make_field(5, 2).unwrap();
        let cf = embed_curve(&ctx, &ctxm, &c.f).unwrap();
        let df = embed_curve(&ctx, &ctxm, &d.f).unwrap();
        let c_points = curve_points(&ctxm, &cf);
        let d_points = curve_points(&ctxm, &df);
        // all pairs pinned to a single x: contained in {x} x D
        let x0 = c_points[0];
        let pairs: Vec<IsogenyPair> = d_points
            .iter()
            .map(|&y| IsogenyPair { x: x0, y, a1: 0, a2: 0, forward: true })
            .collect();
        let ps = PairSet { ctxm, m: 2, a_max: 0, pairs, c_points, d_points };
        let rep = density_rank_test(&ps, [1, 1, 1, 1]).unwrap();
        assert!(!rep.dense_at_bound);
        assert!(rep.witness.is_some());
        assert_eq!(rep.distinct_x_projections, 1);
    }
}
