//! Local intersection multiplicities at the origin of the (t1, t2) plane.
//!
//! Two independent methods are implemented: valuation of the germ pulled
//! back along a branch parametrization, and a brute-force linear-algebra
//! oracle for dim k[[t1,t2]]/(f,g). Their agreement is the backbone of the
//! test suite. On top of these sit the twisted sequences n -> (C_n . D)_x.

use serde::Serialize;
use thiserror::Error;

use crate::ffield::FieldCtx;
use crate::linalg;
use crate::pseries::{
    substitute_branch_twisted, Axis, BranchParam, SeriesError, TruncSeries2, Valuation, EXACT,
};

/// Hard cap on working precision (number of u-coefficients).
pub const PREC_CAP: usize = 1 << 14;

/// Default stabilization bound for the linear-algebra oracle.
pub const ORACLE_N_MAX: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalIntError {
    #[error("germ does not vanish at the origin")]
    NotThroughOrigin,
    #[error("branch is contained in the curve")]
    BranchOnCurve,
    #[error("valuation still indeterminate at the precision cap; higher input precision may succeed")]
    PrecisionCapExceeded,
    #[error("quotient dimension grows linearly up to N_max: germs share a component")]
    CommonComponent,
    #[error("quotient dimension did not stabilize below N_max = {0}")]
    DidNotStabilize(usize),
    #[error("coordinate axis t{0} divides the germ")]
    AxisContainment(u32),
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
}

/// A curve germ f with f(0,0) = 0, plus axis-divisibility flags
/// (detected up to the stored precision).
#[derive(Clone, Debug)]
pub struct CurveGerm {
    pub f: TruncSeries2,
    pub t1_divides: bool,
    pub t2_divides: bool,
}

impl CurveGerm {
    pub fn new(f: TruncSeries2) -> Result<CurveGerm, LocalIntError> {
        if !f.coeff(0, 0).is_zero() {
            return Err(LocalIntError::NotThroughOrigin);
        }
        let t1_divides = f.terms().all(|(&(i, _), _)| i >= 1);
        let t2_divides = f.terms().all(|(&(_, j), _)| j >= 1);
        Ok(CurveGerm { f, t1_divides, t2_divides })
    }

    /// Transversality hypothesis of the local theorem: t1, t2 do not divide f.
    pub fn is_transversal(&self) -> bool {
        !self.t1_divides && !self.t2_divides
    }

    /// e = val_{t2} f(0, t2).
    pub fn e(&self) -> Valuation {
        self.f.restrict_to_axis(Axis::T2).valuation()
    }

    /// d = val_{t1} f(t1, 0).
    pub fn d(&self) -> Valuation {
        self.f.restrict_to_axis(Axis::T1).valuation()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultMethod {
    BranchValuation,
    LinearAlgebraOracle,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocalMult {
    pub value: u64,
    pub method: MultMethod,
    /// Working precision (u-precision, or the oracle's stabilized N).
    #[serde(serialize_with = "ser_prec")]
    pub precision_used: usize,
}

/// val_u f(alpha1^{p^n}(u), alpha2(u)), retrying at doubled precision while
/// the valuation is indeterminate. `branch_at(prec)` must return the branch
/// correct to at least `min(prec, its own limit)` coefficients.
pub fn branch_intersection_number_with(
    ctx: &FieldCtx,
    germ: &CurveGerm,
    axis: Axis,
    n: u64,
    mut branch_at: impl FnMut(usize) -> Result<BranchParam, SeriesError>,
) -> Result<LocalMult, LocalIntError> {
    let mut prec = 32usize;
    loop {
        let beta = branch_at(prec.min(PREC_CAP))?;
        let s = substitute_branch_twisted(ctx, &germ.f, axis, n, &beta)?;
        match s.valuation() {
            Valuation::Finite(v) => {
                return Ok(LocalMult {
                    value: v as u64,
                    method: MultMethod::BranchValuation,
                    precision_used: s.prec(),
                })
            }
            Valuation::Infinite => return Err(LocalIntError::BranchOnCurve),
            Valuation::Indeterminate(got) => {
                if prec >= PREC_CAP {
                    // if the output precision tracked the requested one, more
                    // retries cannot change the answer: the branch lies on
                    // the curve to the full cap. Otherwise precision was
                    // lost in the pipeline and a retry could still succeed.
                    if got >= PREC_CAP {
                        return Err(LocalIntError::BranchOnCurve);
                    }
                    return Err(LocalIntError::PrecisionCapExceeded);
                }
                prec = (prec * 2).min(PREC_CAP);
            }
        }
    }
}

/// Fixed-branch front end: exact branches never retry; truncated branches
/// are used at their stored precision.
pub fn branch_intersection_number(
    ctx: &FieldCtx,
    germ: &CurveGerm,
    beta: &BranchParam,
) -> Result<LocalMult, LocalIntError> {
    twisted_branch_intersection(ctx, germ, Axis::T1, 0, beta)
}

pub fn twisted_branch_intersection(
    ctx: &FieldCtx,
    germ: &CurveGerm,
    axis: Axis,
    n: u64,
    beta: &BranchParam,
) -> Result<LocalMult, LocalIntError> {
    branch_intersection_number_with(ctx, germ, axis, n, |_| Ok(beta.clone()))
}

/// dim_k k[[t1,t2]]/(f,g) by exact Gaussian elimination on truncations:
/// D(N) = dim of monomials of total degree < N modulo degree-< N truncations
/// of monomial multiples of f and g; returns D(N) once D(N) = D(N+1).
pub fn local_mult_oracle(
    ctx: &FieldCtx,
    f: &TruncSeries2,
    g: &TruncSeries2,
    n_max: usize,
) -> Result<LocalMult, LocalIntError> {
    if !f.coeff(0, 0).is_zero() || !g.coeff(0, 0).is_zero() {
        return Err(LocalIntError::NotThroughOrigin);
    }
    let mut history: Vec<usize> = Vec::new();
    for n in 2..=n_max {
        let d = quotient_dim(ctx, f, g, n);
        if let Some(&prev) = history.last() {
            if d == prev {
                return Ok(LocalMult {
                    value: prev as u64,
                    method: MultMethod::LinearAlgebraOracle,
                    precision_used: n - 1,
                });
            }
        }
        history.push(d);
    }
    // not stabilized: constant positive growth over the last window of 3
    // steps is the signature of a shared component
    if history.len() >= 4 {
        let h = &history[history.len() - 4..];
        let d1 = h[1] - h[0];
        if d1 > 0 && h[2] - h[1] == d1 && h[3] - h[2] == d1 {
            return Err(LocalIntError::CommonComponent);
        }
    }
    Err(LocalIntError::DidNotStabilize(n_max))
}

/// D(N) for the oracle.
fn quotient_dim(ctx: &FieldCtx, f: &TruncSeries2, g: &TruncSeries2, n: usize) -> usize {
    let nu = n as u64;
    // column index for each monomial of total degree < n
    let mut col_of = vec![usize::MAX; n * n];
    let mut ncols = 0usize;
    for i in 0..nu {
        for j in 0..(nu - i) {
            col_of[(i * nu + j) as usize] = ncols;
            ncols += 1;
        }
    }
    let mut rows: Vec<Vec<crate::ffield::Fq>> = Vec::new();
    for h in [f, g] {
        for a in 0..nu {
            for b in 0..(nu - a) {
                let mut row = vec![crate::ffield::Fq::default(); ncols];
                let mut nonzero = false;
                for (&(i, j), &c) in h.terms() {
                    let (ti, tj) = (i + a, j + b);
                    if ti + tj >= nu {
                        continue;
                    }
                    row[col_of[(ti * nu + tj) as usize]] = c;
                    nonzero = true;
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }
    let rank = linalg::rank(ctx, &mut rows, ncols);
    ncols - rank
}

// --------------------------- twisted sequences ---------------------------

#[derive(Clone, Debug, Serialize)]
pub struct TwistEntry {
    pub n: u64,
    pub value: u64,
    #[serde(serialize_with = "ser_prec")]
    pub precision_used: usize,
}

/// EXACT is a sentinel, not a number: serialize it as null.
fn ser_prec<S: serde::Serializer>(p: &usize, s: S) -> Result<S::Ok, S::Error> {
    if *p == crate::pseries::EXACT {
        s.serialize_none()
    } else {
        s.serialize_some(p)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum TwistAnnotation {
    /// k on the un-twisted axis finite: the sequence stabilizes to
    /// (axis restriction valuation) x (that k).
    Stabilizes {
        expected: u64,
        crossover_bound: Option<u64>,
        matches: bool,
    },
    /// Branch component on the un-twisted axis is exactly zero: the value
    /// is exactly (axis valuation) x k x p^n.
    ExactScaling { d: u64, k: u64, matches: bool },
    Unclassified,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistSeqReport {
    pub axis: Axis,
    pub entries: Vec<TwistEntry>,
    pub annotation: TwistAnnotation,
}

/// The sequence n -> val_u f(alpha1^{p^n}, alpha2) (axis 1; symmetric for
/// axis 2), annotated with the closed form from the local theorem.
pub fn twisted_intersection_sequence(
    ctx: &FieldCtx,
    germ: &CurveGerm,
    beta: &BranchParam,
    axis: Axis,
    n_list: &[u64],
) -> Result<TwistSeqReport, LocalIntError> {
    if !germ.is_transversal() {
        let which = if germ.t1_divides { 1 } else { 2 };
        return Err(LocalIntError::AxisContainment(which));
    }
    let mut entries = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let m = twisted_branch_intersection(ctx, germ, axis, n, beta)?;
        entries.push(TwistEntry { n, value: m.value, precision_used: m.precision_used });
    }

    // restriction valuation on the un-twisted axis and the twisted axis
    let (restr_untw, k_tw, k_untw) = match axis {
        Axis::T1 => (germ.e(), beta.k1(), beta.k2()),
        Axis::T2 => (germ.d(), beta.k2(), beta.k1()),
    };
    let annotation = match (restr_untw, k_tw, k_untw) {
        (Valuation::Finite(e), Valuation::Finite(k_t), Valuation::Finite(k_u)) => {
            let expected = (e * k_u) as u64;
            // first n with p^n * k_tw > e * k_untw
            let mut crossover = None;
            let mut q: u128 = 1;
            for n in 0..64u64 {
                if q.saturating_mul(k_t as u128) > (e * k_u) as u128 {
                    crossover = Some(n);
                    break;
                }
                q = q.saturating_mul(ctx.p() as u128);
            }
            let matches = match crossover {
                Some(c) => entries.iter().filter(|t| t.n >= c).all(|t| t.value == expected),
                None => false,
            };
            TwistAnnotation::Stabilizes { expected, crossover_bound: crossover, matches }
        }
        (_, Valuation::Finite(k_t), Valuation::Infinite) => {
            // branch lives on the twisted axis: exact d * k * p^n law, with
            // d the restriction valuation on the twisted axis
            let restr_tw = match axis {
                Axis::T1 => germ.d(),
                Axis::T2 => germ.e(),
            };
            match restr_tw {
                Valuation::Finite(d) => {
                    let matches = entries.iter().all(|t| {
                        checked_pow(ctx.p(), t.n)
                            .map(|q| t.value == (d * k_t) as u64 * q)
                            .unwrap_or(false)
                    });
                    TwistAnnotation::ExactScaling { d: d as u64, k: k_t as u64, matches }
                }
                _ => TwistAnnotation::Unclassified,
            }
        }
        _ => TwistAnnotation::Unclassified,
    };
    Ok(TwistSeqReport { axis, entries, annotation })
}

fn checked_pow(p: u64, n: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Intersection of the axis-1-twisted germ with Z1 = {t1=0} (constant in n)
/// or Z2 = {t2=0} (scales by p^n), computed by honest substitution along the
/// axis parametrization.
pub fn axis_intersection_numbers(
    ctx: &FieldCtx,
    germ: &CurveGerm,
    z_axis: Axis,
    n: u64,
) -> Result<LocalMult, LocalIntError> {
    let zero = crate::pseries::TruncSeries1::poly(Vec::new());
    let u = crate::pseries::TruncSeries1::monomial(ctx.one(), 1, EXACT);
    let beta = match z_axis {
        // Z1 = {t1 = 0}, parametrized by (0, u)
        Axis::T1 => BranchParam::new(zero, u),
        // Z2 = {t2 = 0}, parametrized by (u, 0)
        Axis::T2 => BranchParam::new(u, zero),
    }?;
    match z_axis {
        Axis::T1 if germ.t1_divides => return Err(LocalIntError::AxisContainment(1)),
        Axis::T2 if germ.t2_divides => return Err(LocalIntError::AxisContainment(2)),
        _ => {}
    }
    twisted_branch_intersection(ctx, germ, Axis::T1, n, &beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;
    use crate::pseries::TruncSeries1;

    fn germ(ctx: &FieldCtx, terms: &[((u64, u64), i64)]) -> CurveGerm {
        let f = TruncSeries2::from_terms(
            terms.iter().map(|&(k, c)| (k, ctx.from_i64(c))),
            EXACT,
        );
        CurveGerm::new(f).unwrap()
    }

    fn mono(ctx: &FieldCtx, deg: usize) -> TruncSeries1 {
        TruncSeries1::monomial(ctx.one(), deg, EXACT)
    }

    #[test]
    fn branch_number_examples() {
        let ctx = make_field(5, 1).unwrap();
        let f = germ(&ctx, &[((1, 0), 1), ((0, 1), -1)]);
        let beta = BranchParam::new(mono(&ctx, 1), mono(&ctx, 2)).unwrap();
        assert_eq!(branch_intersection_number(&ctx, &f, &beta).unwrap().value, 1);

        let cusp = germ(&ctx, &[((0, 2), 1), ((3, 0), -1)]);
        let on_curve = BranchParam::new(mono(&ctx, 2), mono(&ctx, 3)).unwrap();
        assert_eq!(
            branch_intersection_number(&ctx, &cusp, &on_curve).unwrap_err(),
            LocalIntError::BranchOnCurve
        );

        let ctx7 = make_field(7, 1).unwrap();
        let cusp7 = germ(&ctx7, &[((0, 2), 1), ((3, 0), -1)]);
        let diag = BranchParam::new(mono(&ctx7, 1), mono(&ctx7, 1)).unwrap();
        let bv = branch_intersection_number(&ctx7, &cusp7, &diag).unwrap();
        assert_eq!(bv.value, 2);
        // agrees with the oracle on (t2^2 - t1^3, t2 - t1)
        let g = TruncSeries2::from_terms(
            [((0u64, 1u64), ctx7.one()), ((1, 0), ctx7.from_i64(-1))],
            EXACT,
        );
        let or = local_mult_oracle(&ctx7, &cusp7.f, &g, ORACLE_N_MAX).unwrap();
        assert_eq!(or.value, 2);
    }

    #[test]
    fn oracle_examples() {
        let ctx = make_field(5, 1).unwrap();
        let t1 = TruncSeries2::from_terms([((1u64, 0u64), ctx.one())], EXACT);
        let t2 = TruncSeries2::from_terms([((0u64, 1u64), ctx.one())], EXACT);
        assert_eq!(local_mult_oracle(&ctx, &t1, &t2, ORACLE_N_MAX).unwrap().value, 1);

        let cusp = TruncSeries2::from_terms(
            [((0u64, 2u64), ctx.one()), ((3, 0), ctx.from_i64(-1))],
            EXACT,
        );
        assert_eq!(local_mult_oracle(&ctx, &cusp, &t2, ORACLE_N_MAX).unwrap().value, 3);

        let other = TruncSeries2::from_terms(
            [((0u64, 2u64), ctx.one()), ((3, 0), ctx.one())],
            EXACT,
        );
        assert_eq!(local_mult_oracle(&ctx, &cusp, &other, ORACLE_N_MAX).unwrap().value, 6);
        // symmetry
        assert_eq!(local_mult_oracle(&ctx, &other, &cusp, ORACLE_N_MAX).unwrap().value, 6);
    }

    #[test]
    fn oracle_common_component() {
        let ctx = make_field(5, 1).unwrap();
        let line = TruncSeries2::from_terms(
            [((0u64, 1u64), ctx.one()), ((1, 0), ctx.from_i64(-1))],
            EXACT,
        );
        assert_eq!(
            local_mult_oracle(&ctx, &line, &line, ORACLE_N_MAX).unwrap_err(),
            LocalIntError::CommonComponent
        );
    }

    #[test]
    fn twist_seq_case1() {
        let ctx = make_field(5, 1).unwrap();
        let f = germ(&ctx, &[((0, 1), 1), ((1, 0), -1)]); // t2 - t1
        let beta = BranchParam::new(mono(&ctx, 1), mono(&ctx, 2)).unwrap();
        let rep =
            twisted_intersection_sequence(&ctx, &f, &beta, Axis::T1, &[1, 2, 3, 4]).unwrap();
        let vals: Vec<u64> = rep.entries.iter().map(|t| t.value).collect();
        assert_eq!(vals, vec![2, 2, 2, 2]);
        match rep.annotation {
            TwistAnnotation::Stabilizes { expected, matches, .. } => {
                assert_eq!(expected, 2);
                assert!(matches);
            }
            _ => panic!("expected stabilizing annotation"),
        }
        // n = 0 gives the untwisted multiplicity
        let rep0 = twisted_intersection_sequence(&ctx, &f, &beta, Axis::T1, &[0]).unwrap();
        assert_eq!(rep0.entries[0].value, 1);
    }

    #[test]
    fn twist_seq_case2() {
        let ctx = make_field(5, 1).unwrap();
        let f = germ(&ctx, &[((0, 1), 1), ((1, 0), -1)]);
        let beta = BranchParam::new(mono(&ctx, 1), TruncSeries1::poly(Vec::new())).unwrap();
        let rep = twisted_intersection_sequence(&ctx, &f, &beta, Axis::T1, &[1, 2, 3]).unwrap();
        let vals: Vec<u64> = rep.entries.iter().map(|t| t.value).collect();
        assert_eq!(vals, vec![5, 25, 125]);
        match rep.annotation {
            TwistAnnotation::ExactScaling { d, k, matches } => {
                assert_eq!((d, k), (1, 1));
                assert!(matches);
            }
            _ => panic!("expected exact-scaling annotation"),
        }
    }

    #[test]
    fn axis_numbers_examples() {
        let ctx3 = make_field(3, 1).unwrap();
        let f = germ(&ctx3, &[((0, 1), 1), ((1, 0), -1)]);
        assert_eq!(axis_intersection_numbers(&ctx3, &f, Axis::T2, 2).unwrap().value, 9);
        assert_eq!(axis_intersection_numbers(&ctx3, &f, Axis::T1, 2).unwrap().value, 1);

        let ctx5 = make_field(5, 1).unwrap();
        let cusp = germ(&ctx5, &[((0, 2), 1), ((3, 0), -1)]);
        assert_eq!(axis_intersection_numbers(&ctx5, &cusp, Axis::T2, 1).unwrap().value, 15);
        // cross-check against the oracle on (t2^2 - t1^15, t2)
        let tw = cusp.f.frobenius_pullback(&ctx5, Axis::T1, 1).unwrap();
        let t2 = TruncSeries2::from_terms([((0u64, 1u64), ctx5.one())], EXACT);
        assert_eq!(local_mult_oracle(&ctx5, &tw, &t2, ORACLE_N_MAX).unwrap().value, 15);

        let contained = germ(&ctx5, &[((1, 0), 1), ((1, 1), 1)]); // t1(1 + t2)
        assert_eq!(
            axis_intersection_numbers(&ctx5, &contained, Axis::T1, 0).unwrap_err(),
            LocalIntError::AxisContainment(1)
        );
    }

    #[test]
    fn precision_retry_loop() {
        // branch given at low precision but regenerable: the retry loop
        // must raise precision until the valuation resolves
        let ctx = make_field(5, 1).unwrap();
        let f = germ(&ctx, &[((0, 1), 1), ((50, 0), -2)]); // t2 - 2 t1^50
        let m = branch_intersection_number_with(&ctx, &f, Axis::T1, 0, |prec| {
            // branch (u, u^50) truncated to the requested precision
            Ok(BranchParam::new(
                TruncSeries1::monomial(ctx.one(), 1, EXACT).truncate(prec),
                TruncSeries1::monomial(ctx.one(), 50, EXACT).truncate(prec),
            )
            .unwrap())
        })
        .unwrap();
        assert_eq!(m.value, 50);
    }
}
