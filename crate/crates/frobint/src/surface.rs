//! The desk-scale global model: P^1 x P^1 over F_q with the partial
//! Frobenius maps acting as q-power maps on each affine coordinate.
//!
//! Curves are bivariate polynomials in (x1, x2); intersection numbers are
//! bidegree counts d1*e2 + d2*e1. The non-ordinary divisor Z = Z1 u Z2 is
//! the union of vertical/horizontal lines over the supersingular
//! j-invariants, and heights are the exact rationals (q^n(C.Z2)+(C.Z1))/(p-1).

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{make_field, Embedding, FieldCtx, FieldError, Fq, UniPoly};
use crate::localint::{local_mult_oracle, LocalIntError, ORACLE_N_MAX};
use crate::pseries::{Axis, SeriesError, TruncSeries2, EXACT};
use crate::sslocus::{SSError, SSLocus};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("curve polynomial is zero")]
    ZeroCurve,
    #[error("curve polynomial must be exact (no truncation)")]
    NotExact,
    #[error("curves share a common component")]
    CommonComponent,
    #[error("curve shares a component with Z")]
    ComponentOfZ,
    #[error("intersection points remain unaccounted at m_max: found {accounted} of {expected}")]
    FieldSearchExhausted { accounted: u64, expected: u64 },
    #[error("field error: {0}")]
    Field(#[from] FieldError),
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("local intersection error: {0}")]
    Local(#[from] LocalIntError),
    #[error("supersingular locus error: {0}")]
    SS(#[from] SSError),
}

/// An effective divisor on the model, as an exact bivariate polynomial.
#[derive(Clone, Debug)]
pub struct GlobalCurve {
    pub f: TruncSeries2,
}

impl GlobalCurve {
    pub fn new(f: TruncSeries2) -> Result<GlobalCurve, SurfaceError> {
        if !f.is_exact() {
            return Err(SurfaceError::NotExact);
        }
        if f.is_stored_zero() {
            return Err(SurfaceError::ZeroCurve);
        }
        Ok(GlobalCurve { f })
    }

    pub fn bidegree(&self) -> (u64, u64) {
        (self.f.max_degree(Axis::T1), self.f.max_degree(Axis::T2))
    }

    pub fn eval(&self, ctx: &FieldCtx, a: Fq, b: Fq) -> Fq {
        let mut acc = ctx.zero();
        for (&(i, j), &c) in self.f.terms() {
            let t = ctx.mul(ctx.pow(a, i as u128), ctx.pow(b, j as u128));
            acc = ctx.add(acc, ctx.mul(c, t));
        }
        acc
    }

    /// The fiber polynomial f(a, x2).
    pub fn fiber_x1(&self, ctx: &FieldCtx, a: Fq) -> UniPoly {
        let d2 = self.bidegree().1 as usize;
        let mut coeffs = vec![ctx.zero(); d2 + 1];
        for (&(i, j), &c) in self.f.terms() {
            let t = ctx.mul(c, ctx.pow(a, i as u128));
            coeffs[j as usize] = ctx.add(coeffs[j as usize], t);
        }
        UniPoly::from_coeffs(coeffs)
    }
}

/// Coefficients of f as a polynomial in x2; index = x2-degree.
pub fn as_x2_coeffs(f: &TruncSeries2) -> Vec<UniPoly> {
    let d2 = f.max_degree(Axis::T2) as usize;
    let mut out = vec![Vec::new(); d2 + 1];
    for (&(i, j), &c) in f.terms() {
        let v: &mut Vec<Fq> = &mut out[j as usize];
        if v.len() <= i as usize {
            v.resize(i as usize + 1, Fq::default());
        }
        v[i as usize] = c;
    }
    out.into_iter().map(UniPoly::from_coeffs).collect()
}

/// Fraction-free determinant of a polynomial matrix (Bareiss).
fn poly_det_bareiss(ctx: &FieldCtx, mut m: Vec<Vec<UniPoly>>) -> UniPoly {
    let n = m.len();
    if n == 0 {
        return UniPoly::constant(ctx.one());
    }
    let mut sign = false;
    let mut prev = UniPoly::constant(ctx.one());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return UniPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = m[i][j].mul(ctx, &m[k][k]);
                let t2 = m[i][k].mul(ctx, &m[k][j]);
                let num = t1.sub(ctx, &t2);
                let (q, r) = num.divrem(ctx, &prev).expect("Bareiss pivot nonzero");
                debug_assert!(r.is_zero(), "Bareiss division not exact");
                m[i][j] = q;
            }
            m[i][k] = UniPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        det.scale(ctx, ctx.neg(ctx.one()))
    } else {
        det
    }
}

/// Res_{x2}(f, g) as a polynomial in x1, via the Sylvester determinant.
pub fn resultant_x2(ctx: &FieldCtx, f: &TruncSeries2, g: &TruncSeries2) -> UniPoly {
    let fc = as_x2_coeffs(f);
    let gc = as_x2_coeffs(g);
    let n = fc.len() - 1;
    let m = gc.len() - 1;
    if n == 0 && m == 0 {
        return UniPoly::constant(ctx.one());
    }
    let size = n + m;
    let zero = UniPoly::zero();
    let mut syl = vec![vec![zero; size]; size];
    for r in 0..m {
        for (idx, c) in fc.iter().enumerate() {
            syl[r][r + n - idx] = c.clone();
        }
    }
    for r in 0..n {
        for (idx, c) in gc.iter().enumerate() {
            syl[m + r][r + m - idx] = c.clone();
        }
    }
    poly_det_bareiss(ctx, syl)
}

fn content_x1(ctx: &FieldCtx, f: &TruncSeries2) -> UniPoly {
    let mut acc = UniPoly::zero();
    for c in as_x2_coeffs(f) {
        acc = acc.gcd(ctx, &c);
    }
    acc
}

/// Whether f and g share a curve component, exactly: their x1-contents share
/// a factor, or the primitive parts have identically vanishing resultant.
pub fn have_common_component(ctx: &FieldCtx, f: &TruncSeries2, g: &TruncSeries2) -> bool {
    let cf = content_x1(ctx, f);
    let cg = content_x1(ctx, g);
    if cf.gcd(ctx, &cg).degree().unwrap_or(0) > 0 {
        return true;
    }
    if f.max_degree(Axis::T2) == 0 || g.max_degree(Axis::T2) == 0 {
        return false; // purely-x1 factors already checked through contents
    }
    resultant_x2(ctx, f, g).is_zero()
}

/// Embed a curve's coefficients into an extension field.
pub fn embed_curve(
    src: &FieldCtx,
    dst: &FieldCtx,
    f: &TruncSeries2,
) -> Result<TruncSeries2, FieldError> {
    let emb = Embedding::new(src, dst)?;
    Ok(TruncSeries2::from_terms(
        f.terms().map(|(&k, &c)| (k, emb.map(dst, c))),
        EXACT,
    ))
}

/// F(x1^{q^n}, x2) for axis 1 (symmetric for axis 2), q = p^k.
pub fn pullback_global(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    axis: Axis,
    n: u64,
) -> Result<GlobalCurve, SurfaceError> {
    let steps = n
        .checked_mul(ctx.k() as u64)
        .ok_or(SurfaceError::Series(SeriesError::ExponentOverflow))?;
    let f = c.f.frobenius_pullback(ctx, axis, steps)?;
    GlobalCurve::new(f)
}

/// Total intersection number on P^1 x P^1: d1*e2 + d2*e1.
pub fn global_intersection(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    d: &GlobalCurve,
) -> Result<u64, SurfaceError> {
    if have_common_component(ctx, &c.f, &d.f) {
        return Err(SurfaceError::CommonComponent);
    }
    let (d1, d2) = c.bidegree();
    let (e1, e2) = d.bidegree();
    Ok(d1 * e2 + d2 * e1)
}

// --------------------------- non-ordinary divisor ---------------------------

/// Z = Z1 u Z2: vertical and horizontal lines over the supersingular
/// j-invariants of F_{p^2}.
#[derive(Clone, Debug)]
pub struct NonOrdDivisor {
    pub ss: SSLocus,
    /// Coefficients of prod (x - j) as integers mod p (the product is
    /// Galois-stable, hence defined over F_p).
    ss_poly_fp: Vec<u64>,
}

impl NonOrdDivisor {
    pub fn new(ss: SSLocus) -> Result<NonOrdDivisor, SurfaceError> {
        let poly = ss.ss_poly();
        let mut fp = Vec::new();
        for i in 0..=poly.degree().unwrap_or(0) {
            let c = poly.get(i);
            if ss.ctx2.frobenius(c, 1) != c {
                return Err(SurfaceError::SS(SSError::InternalMismatch));
            }
            fp.push(c.coeffs(2)[0]);
        }
        Ok(NonOrdDivisor { ss, ss_poly_fp: fp })
    }

    pub fn component_count(&self) -> u64 {
        self.ss.js.len() as u64
    }

    /// prod (x - j) with coefficients lifted into an arbitrary F_{p^k}.
    pub fn ss_poly_in(&self, ctx: &FieldCtx) -> UniPoly {
        UniPoly::from_coeffs(self.ss_poly_fp.iter().map(|&c| ctx.from_u64(c)).collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZIntersectRecord {
    pub n: u64,
    pub axis: Axis,
    pub cz1: u64,
    pub cz2: u64,
    pub total: u64,
    /// q^n (C.Z2) + (C.Z1) for axis 1 (roles swapped for axis 2).
    pub closed_form: u64,
    pub identity_holds: bool,
}

fn curve_shares_z(ctx: &FieldCtx, c: &GlobalCurve, z: &NonOrdDivisor) -> bool {
    let ssp = z.ss_poly_in(ctx);
    let v = content_x1(ctx, &c.f);
    if v.gcd(ctx, &ssp).degree().unwrap_or(0) > 0 {
        return true;
    }
    // horizontal components: content with the roles of x1, x2 swapped
    let swapped = TruncSeries2::from_terms(c.f.terms().map(|(&(i, j), &v)| ((j, i), v)), EXACT);
    let h = content_x1(ctx, &swapped);
    h.gcd(ctx, &ssp).degree().unwrap_or(0) > 0
}

/// (pullback(C, axis, n) . Z1) and (. Z2) by bidegree counts, with the
/// closed-form identity annotated.
pub fn intersect_with_z(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    z: &NonOrdDivisor,
    axis: Axis,
    n: u64,
) -> Result<ZIntersectRecord, SurfaceError> {
    if curve_shares_z(ctx, c, z) {
        return Err(SurfaceError::ComponentOfZ);
    }
    let s = z.component_count();
    let (d1, d2) = c.bidegree();
    let cn = pullback_global(ctx, c, axis, n)?;
    let (n1, n2) = cn.bidegree();
    // Z1 components have bidegree (1,0), Z2 components (0,1)
    let cz1 = s * n2;
    let cz2 = s * n1;
    let total = cz1 + cz2;
    let q = (ctx.order() as u128).pow(n.try_into().unwrap_or(u32::MAX)) as u64;
    let closed_form = match axis {
        Axis::T1 => q * (s * d1) + s * d2,
        Axis::T2 => q * (s * d2) + s * d1,
    };
    Ok(ZIntersectRecord {
        n,
        axis,
        cz1,
        cz2,
        total,
        closed_form,
        identity_holds: total == closed_form,
    })
}

// --------------------------- heights ---------------------------

/// Exact nonnegative rational.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

impl Ratio {
    pub fn new(num: u128, den: u128) -> Ratio {
        assert!(den != 0);
        let g = gcd_u128(num, den);
        Ratio { num: num / g, den: den / g }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightRecord {
    pub n: u64,
    pub axis: Axis,
    pub cz1: u64,
    pub cz2: u64,
    pub h: Ratio,
    pub ratio_to_prev: Option<Ratio>,
    /// |h(n)/h(n-1) - q| < 10^{-2}, checked exactly.
    pub ratio_close: Option<bool>,
    /// q^{n-1} (C.Z2) >= 100 (q-1) (C.Z1): past this point the ratio is
    /// guaranteed within 10^{-2} of q.
    pub past_threshold: Option<bool>,
}

/// h(n) = ((C_n.Z))/(p-1) as exact rationals, with successive ratios.
pub fn faltings_height_series(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    z: &NonOrdDivisor,
    axis: Axis,
    n_max: u64,
) -> Result<Vec<HeightRecord>, SurfaceError> {
    let q = ctx.order() as u128;
    let p = ctx.p() as u128;
    let mut out: Vec<HeightRecord> = Vec::new();
    for n in 0..=n_max {
        let rec = intersect_with_z(ctx, c, z, axis, n)?;
        let h = Ratio::new(rec.total as u128, p - 1);
        let (ratio_to_prev, ratio_close, past_threshold) = match out.last() {
            Some(prev) => {
                let r = Ratio::new(h.num * prev.h.den, h.den * prev.h.num);
                // |r - q| < 1/100 by cross multiplication
                let diff = if r.num >= q * r.den { r.num - q * r.den } else { q * r.den - r.num };
                let close = diff * 100 < r.den;
                let qn_prev = q.pow((n - 1).try_into().unwrap_or(u32::MAX));
                let (base1, base2) = base_z_values(c, z, axis);
                let past = qn_prev * base2 as u128 >= 100 * (q - 1) * base1 as u128;
                (Some(r), Some(close), Some(past))
            }
            None => (None, None, None),
        };
        out.push(HeightRecord {
            n,
            axis,
            cz1: rec.cz1,
            cz2: rec.cz2,
            h,
            ratio_to_prev,
            ratio_close,
            past_threshold,
        });
    }
    Ok(out)
}

/// ((C.Z1), (C.Z2)) with the roles arranged so that the axis-n pullback
/// total is q^n * base2 + base1.
fn base_z_values(c: &GlobalCurve, z: &NonOrdDivisor, axis: Axis) -> (u64, u64) {
    let s = z.component_count();
    let (d1, d2) = c.bidegree();
    match axis {
        Axis::T1 => (s * d2, s * d1),
        Axis::T2 => (s * d1, s * d2),
    }
}

// --------------------------- Bezout enumeration ---------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Affine,
    X1Infinity,
    X2Infinity,
    BothInfinity,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointContribution {
    pub chart: Chart,
    /// Degree over the base field F_q (= Galois orbit size).
    pub degree: u64,
    pub x1: String,
    pub x2: String,
    pub local_mult: u64,
    pub contribution: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BezoutReport {
    pub expected: u64,
    pub accounted: u64,
    pub complete: bool,
    pub points: Vec<PointContribution>,
}

/// x1^{d1} f(1/x1, x2): exponent reversal on the chosen axis.
fn reverse_axis(f: &TruncSeries2, axis: Axis) -> TruncSeries2 {
    let d = f.max_degree(axis);
    TruncSeries2::from_terms(
        f.terms().map(|(&(i, j), &c)| {
            let key = match axis {
                Axis::T1 => (d - i, j),
                Axis::T2 => (i, d - j),
            };
            (key, c)
        }),
        EXACT,
    )
}

/// Binomial coefficient mod p by Lucas' theorem.
fn binom_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        // small-case binomial by multiplicative formula mod p
        let mut b = 1u64;
        for t in 0..ki {
            b = b * (ni - t) % p;
            let inv = mod_inv_u64(t + 1, p);
            b = b * inv % p;
        }
        acc = acc * b % p;
        n /= p;
        k /= p;
    }
    acc
}

fn mod_inv_u64(a: u64, p: u64) -> u64 {
    // Fermat
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// f(t1 + a, t2 + b) as a germ at the origin.
pub fn shift_to_origin(ctx: &FieldCtx, f: &TruncSeries2, a: Fq, b: Fq) -> TruncSeries2 {
    let p = ctx.p();
    let mut terms: std::collections::BTreeMap<(u64, u64), Fq> = std::collections::BTreeMap::new();
    for (&(i, j), &c) in f.terms() {
        for al in 0..=i {
            let bi = binom_mod_p(i, al, p);
            if bi == 0 {
                continue;
            }
            let ca = ctx.mul(ctx.from_u64(bi), ctx.pow(a, (i - al) as u128));
            if ca.is_zero() && i != al {
                continue;
            }
            for be in 0..=j {
                let bj = binom_mod_p(j, be, p);
                if bj == 0 {
                    continue;
                }
                let cb = ctx.mul(ctx.from_u64(bj), ctx.pow(b, (j - be) as u128));
                let t = ctx.mul(c, ctx.mul(ca, cb));
                if t.is_zero() {
                    continue;
                }
                let e = terms.entry((al, be)).or_default();
                *e = ctx.add(*e, t);
            }
        }
    }
    TruncSeries2::from_terms(terms, EXACT)
}

/// Frobenius orbit of a coordinate pair under Gal(F-bar / F_q), returned as
/// the canonical (minimal) representative and the orbit size.
fn canonical_orbit(ctx: &FieldCtx, k_base: usize, a: Fq, b: Fq) -> ((Fq, Fq), u64) {
    let mut cur = (a, b);
    let mut min = cur;
    let mut size = 0u64;
    loop {
        cur = (ctx.frobenius(cur.0, k_base as u64), ctx.frobenius(cur.1, k_base as u64));
        size += 1;
        if cur < min {
            min = cur;
        }
        if cur == (a, b) {
            break;
        }
    }
    (min, size)
}

/// Enumerates the intersection points of C and D over extensions of F_q of
/// degree <= m_max across all four charts, computes each local multiplicity
/// with the linear-algebra oracle in translated coordinates, and reports
/// whether the Bezout number is fully accounted.
pub fn sum_of_local_mults(
    ctx: &FieldCtx,
    c: &GlobalCurve,
    d: &GlobalCurve,
    m_max: usize,
) -> Result<BezoutReport, SurfaceError> {
    let expected = global_intersection(ctx, c, d)?;
    let k = ctx.k();
    let mut points: Vec<PointContribution> = Vec::new();
    let mut accounted = 0u64;

    // chart pairs: (transformed C, transformed D, chart, restrict-to-zero flags)
    let c1 = reverse_axis(&c.f, Axis::T1);
    let d1r = reverse_axis(&d.f, Axis::T1);
    let c2 = reverse_axis(&c.f, Axis::T2);
    let d2r = reverse_axis(&d.f, Axis::T2);
    let c12 = reverse_axis(&c1, Axis::T2);
    let d12 = reverse_axis(&d1r, Axis::T2);

    let r = resultant_x2(ctx, &c.f, &d.f);
    for m in 1..=m_max {
        if k * m > crate::ffield::MAX_K {
            break;
        }
        let ctxm = make_field(ctx.p(), k * m)?;
        let cf = embed_curve(ctx, &ctxm, &c.f)?;
        let df = embed_curve(ctx, &ctxm, &d.f)?;

        // ---- affine chart: roots of the resultant ----
        let embr = Embedding::new(ctx, &ctxm)?;
        let rm = embr.map_poly(&ctxm, &r);
        let mut seen: std::collections::BTreeSet<(Fq, Fq)> = std::collections::BTreeSet::new();
        for (a, _) in crate::ffield::roots_with_multiplicity(&ctxm, &rm) {
            let fa = curve_fiber(&ctxm, &cf, a);
            let ga = curve_fiber(&ctxm, &df, a);
            let common = fa.gcd(&ctxm, &ga);
            let fiber_roots: Vec<Fq> = if common.degree().unwrap_or(0) == 0 {
                continue;
            } else {
                crate::ffield::roots_with_multiplicity(&ctxm, &common)
                    .into_iter()
                    .map(|(b, _)| b)
                    .collect()
            };
            for b in fiber_roots {
                let (canon, deg) = canonical_orbit(&ctxm, k, a, b);
                if deg != m as u64 || seen.contains(&canon) {
                    continue;
                }
                seen.insert(canon);
                let gc = shift_to_origin(&ctxm, &cf, a, b);
                let gd = shift_to_origin(&ctxm, &df, a, b);
                let mult = local_mult_oracle(&ctxm, &gc, &gd, ORACLE_N_MAX)?.value;
                accounted += deg * mult;
                points.push(PointContribution {
                    chart: Chart::Affine,
                    degree: deg,
                    x1: ctxm.fmt_elem(a),
                    x2: ctxm.fmt_elem(b),
                    local_mult: mult,
                    contribution: deg * mult,
                });
            }
        }

        // ---- x1 = infinity: w1 = 0 in the reversed chart ----
        infinity_line_points(
            ctx, &ctxm, &c1, &d1r, Axis::T1, Chart::X1Infinity, m, k, &mut points,
            &mut accounted,
        )?;
        // ---- x2 = infinity ----
        infinity_line_points(
            ctx, &ctxm, &c2, &d2r, Axis::T2, Chart::X2Infinity, m, k, &mut points,
            &mut accounted,
        )?;

        // ---- both infinite: only at m = 1 (the point is rational) ----
        if m == 1 {
            let cc = embed_curve(ctx, &ctxm, &c12)?;
            let dd = embed_curve(ctx, &ctxm, &d12)?;
            if cc.coeff(0, 0).is_zero() && dd.coeff(0, 0).is_zero() {
                let mult = local_mult_oracle(&ctxm, &cc, &dd, ORACLE_N_MAX)?.value;
                accounted += mult;
                points.push(PointContribution {
                    chart: Chart::BothInfinity,
                    degree: 1,
                    x1: "inf".into(),
                    x2: "inf".into(),
                    local_mult: mult,
                    contribution: mult,
                });
            }
        }

        if accounted == expected {
            break;
        }
    }

    points.sort_by(|a, b| {
        (a.chart as u8, a.degree, &a.x1, &a.x2).cmp(&(b.chart as u8, b.degree, &b.x1, &b.x2))
    });
    Ok(BezoutReport { expected, accounted, complete: accounted == expected, points })
}

fn curve_fiber(ctx: &FieldCtx, f: &TruncSeries2, a: Fq) -> UniPoly {
    let d2 = f.max_degree(Axis::T2) as usize;
    let mut coeffs = vec![ctx.zero(); d2 + 1];
    for (&(i, j), &c) in f.terms() {
        let t = ctx.mul(c, ctx.pow(a, i as u128));
        coeffs[j as usize] = ctx.add(coeffs[j as usize], t);
    }
    UniPoly::from_coeffs(coeffs)
}

/// Points on one line at infinity: in the chart reversed along `axis`, the
/// new points have that coordinate equal to 0.
#[allow(clippy::too_many_arguments)]
fn infinity_line_points(
    ctx: &FieldCtx,
    ctxm: &FieldCtx,
    c_rev: &TruncSeries2,
    d_rev: &TruncSeries2,
    axis: Axis,
    chart: Chart,
    m: usize,
    k: usize,
    points: &mut Vec<PointContribution>,
    accounted: &mut u64,
) -> Result<(), SurfaceError> {
    let cf = embed_curve(ctx, ctxm, c_rev)?;
    let df = embed_curve(ctx, ctxm, d_rev)?;
    // restriction to {reversed coordinate = 0}
    let other = axis.other();
    let rc = cf.restrict_to_axis(other);
    let rd = df.restrict_to_axis(other);
    let pc = UniPoly::from_coeffs(rc.coeffs().to_vec());
    let pd = UniPoly::from_coeffs(rd.coeffs().to_vec());
    let common = pc.gcd(ctxm, &pd);
    if common.degree().unwrap_or(0) == 0 {
        return Ok(());
    }
    let mut seen: std::collections::BTreeSet<Fq> = std::collections::BTreeSet::new();
    for (b, _) in crate::ffield::roots_with_multiplicity(ctxm, &common) {
        let (canon, deg) = canonical_orbit(ctxm, k, b, ctxm.zero());
        if deg != m as u64 || !seen.insert(canon.0) {
            continue;
        }
        let (a1, a2) = match axis {
            Axis::T1 => (ctxm.zero(), b),
            Axis::T2 => (b, ctxm.zero()),
        };
        let gc = shift_to_origin(ctxm, &cf, a1, a2);
        let gd = shift_to_origin(ctxm, &df, a1, a2);
        let mult = local_mult_oracle(ctxm, &gc, &gd, ORACLE_N_MAX)?.value;
        *accounted += deg * mult;
        let (sx1, sx2) = match axis {
            Axis::T1 => ("inf".to_string(), ctxm.fmt_elem(b)),
            Axis::T2 => (ctxm.fmt_elem(b), "inf".to_string()),
        };
        points.push(PointContribution {
            chart,
            degree: deg,
            x1: sx1,
            x2: sx2,
            local_mult: mult,
            contribution: deg * mult,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(ctx: &FieldCtx, terms: &[((u64, u64), i64)]) -> GlobalCurve {
        GlobalCurve::new(TruncSeries2::from_terms(
            terms.iter().map(|&(k, c)| (k, ctx.from_i64(c))),
            EXACT,
        ))
        .unwrap()
    }

    #[test]
    fn pullback_examples() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((1, 0), 1), ((0, 1), -1)]);
        let cn = pullback_global(&ctx, &c, Axis::T1, 1).unwrap();
        assert_eq!(cn.bidegree(), (5, 1));
        assert_eq!(cn.f.coeff(5, 0), ctx.one());
        assert_eq!(cn.f.coeff(0, 1), ctx.from_i64(-1));
        // n = 0 identity
        let c0 = pullback_global(&ctx, &c, Axis::T1, 0).unwrap();
        assert_eq!(c0.f, c.f);
        // axis 1 then axis 2 = full Frobenius
        let both = pullback_global(&ctx, &cn, Axis::T2, 1).unwrap();
        assert_eq!(both.bidegree(), (5, 5));
    }

    #[test]
    fn global_intersection_examples() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((1, 0), 1), ((0, 1), -1)]);
        let d = curve(&ctx, &[((1, 0), 1), ((0, 1), 1), ((0, 0), -1)]);
        assert_eq!(global_intersection(&ctx, &c, &d).unwrap(), 2);
        let cn = pullback_global(&ctx, &c, Axis::T1, 1).unwrap();
        assert_eq!(global_intersection(&ctx, &cn, &d).unwrap(), 6);
        assert_eq!(
            global_intersection(&ctx, &c, &c).unwrap_err(),
            SurfaceError::CommonComponent
        );
    }

    #[test]
    fn z_intersection_examples() {
        let ctx = make_field(5, 1).unwrap();
        let z = NonOrdDivisor::new(crate::sslocus::ss_bruteforce(5).unwrap()).unwrap();
        let c = curve(&ctx, &[((1, 0), 1), ((0, 1), -1)]);
        let r0 = intersect_with_z(&ctx, &c, &z, Axis::T1, 0).unwrap();
        assert_eq!((r0.cz1, r0.cz2, r0.total), (1, 1, 2));
        assert!(r0.identity_holds);
        let r1 = intersect_with_z(&ctx, &c, &z, Axis::T1, 1).unwrap();
        assert_eq!((r1.cz1, r1.cz2, r1.total), (1, 5, 6));
        assert!(r1.identity_holds);
        let r2 = intersect_with_z(&ctx, &c, &z, Axis::T2, 1).unwrap();
        assert_eq!((r2.cz1, r2.cz2, r2.total), (5, 1, 6));
        assert!(r2.identity_holds);
        // x1 - j with j supersingular is a component of Z
        let bad = curve(&ctx, &[((1, 0), 1)]);
        assert_eq!(
            intersect_with_z(&ctx, &bad, &z, Axis::T1, 0).unwrap_err(),
            SurfaceError::ComponentOfZ
        );
    }

    #[test]
    fn height_examples() {
        let ctx = make_field(5, 1).unwrap();
        let z = NonOrdDivisor::new(crate::sslocus::ss_bruteforce(5).unwrap()).unwrap();
        let c = curve(&ctx, &[((1, 0), 1), ((0, 1), -1)]);
        let hs = faltings_height_series(&ctx, &c, &z, Axis::T1, 5).unwrap();
        assert_eq!(hs[0].h, Ratio::new(1, 2)); // (5^0+1)/4
        assert_eq!(hs[1].h, Ratio::new(3, 2)); // (5+1)/4
        assert_eq!(hs[2].h, Ratio::new(13, 2)); // 26/4
        for w in hs.windows(2) {
            // strict growth
            assert!(w[1].h.num * w[0].h.den > w[0].h.num * w[1].h.den);
        }
        // once past threshold the exact ratio bound holds
        for r in &hs {
            if r.past_threshold == Some(true) {
                assert_eq!(r.ratio_close, Some(true));
            }
        }
    }

    #[test]
    fn bezout_transverse_lines() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((1, 0), 1), ((0, 1), -1)]); // x1 - x2
        let d = curve(&ctx, &[((1, 0), 1), ((0, 1), 1), ((0, 0), -1)]); // x1 + x2 - 1
        let rep = sum_of_local_mults(&ctx, &c, &d, 6).unwrap();
        assert_eq!(rep.expected, 2);
        assert!(rep.complete, "{rep:?}");
        assert_eq!(rep.points.len(), 2);
    }

    #[test]
    fn bezout_tangent_parabola() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((2, 0), -1)]); // x2 - x1^2
        let d = curve(&ctx, &[((0, 1), 1)]); // x2
        let rep = sum_of_local_mults(&ctx, &c, &d, 6).unwrap();
        // bidegrees (2,1) and (0,1): 2*1 + 1*0
        assert_eq!(rep.expected, 2);
        assert!(rep.complete, "{rep:?}");
        // a single affine tangency of multiplicity 2; no common point at infinity
        let affine: Vec<_> = rep.points.iter().filter(|p| p.chart == Chart::Affine).collect();
        assert_eq!(affine.len(), 1);
        assert_eq!(affine[0].local_mult, 2);
    }

    #[test]
    fn bezout_irrational_points() {
        let ctx = make_field(5, 1).unwrap();
        // x2 = x1^2 meets x2 = 2 at x1 = +-sqrt(2), which is irrational in F5
        let c = curve(&ctx, &[((0, 1), 1), ((2, 0), -1)]);
        let d = curve(&ctx, &[((0, 1), 1), ((0, 0), -2)]);
        let rep = sum_of_local_mults(&ctx, &c, &d, 6).unwrap();
        assert!(rep.complete, "{rep:?}");
        assert!(rep.points.iter().any(|p| p.degree == 2));
    }

    #[test]
    fn resultant_basics() {
        let ctx = make_field(5, 1).unwrap();
        let c = curve(&ctx, &[((0, 1), 1), ((2, 0), -1)]); // x2 - x1^2
        let d = curve(&ctx, &[((0, 1), 1)]); // x2
        let r = resultant_x2(&ctx, &c.f, &d.f);
        // Res_{x2}(x2 - x1^2, x2) = x1^2 up to sign
        assert_eq!(r.degree(), Some(2));
        assert!(r.get(0).is_zero() && r.get(1).is_zero());
    }
}
