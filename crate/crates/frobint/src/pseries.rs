//! Truncated power series over `F_q` in one variable (u) and two variables
//! (t1, t2), with explicit precision tracking.
//!
//! Precision is never implicit: a series with precision N has exact
//! coefficients below degree N and says nothing above. The sentinel
//! [`EXACT`] marks polynomials known exactly (no truncation error), which
//! is what lets valuation queries distinguish "the series is really zero"
//! from "zero up to the stored precision".

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{FieldCtx, Fq};

/// Precision sentinel: the value is an exactly-known polynomial.
pub const EXACT: usize = usize::MAX;

fn sat_add(a: usize, b: usize) -> usize {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_add(b).min(EXACT - 1)
    }
}

fn sat_mul(a: usize, b: usize) -> usize {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a.saturating_mul(b).min(EXACT - 1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("output precision would be zero")]
    PrecisionUnderflow,
    #[error("germ does not pass through the origin")]
    OriginNotOnCurve,
    #[error("partial derivative along the solve axis vanishes at the origin")]
    NotSmoothAlongAxis,
    #[error("exponent overflow in Frobenius pullback")]
    ExponentOverflow,
    #[error("branch component has a nonzero constant term")]
    BranchNotThroughOrigin,
}

/// One of the two formal coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Axis {
    T1,
    T2,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::T1 => Axis::T2,
            Axis::T2 => Axis::T1,
        }
    }

    pub fn from_index(i: u32) -> Option<Axis> {
        match i {
            1 => Some(Axis::T1),
            2 => Some(Axis::T2),
            _ => None,
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Axis::T1 => 1,
            Axis::T2 => 2,
        }
    }
}

/// Result of a valuation query at finite precision.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Valuation {
    /// Smallest degree with a nonzero coefficient; exact.
    Finite(usize),
    /// No nonzero coefficient below the stored precision N.
    Indeterminate(usize),
    /// The value is exactly the zero polynomial.
    Infinite,
}

impl Valuation {
    /// Lower bound usable in precision arithmetic (EXACT plays infinity).
    pub fn lower_bound(self) -> usize {
        match self {
            Valuation::Finite(v) => v,
            Valuation::Indeterminate(n) => n,
            Valuation::Infinite => EXACT,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }
}

// --------------------------- one variable ---------------------------

/// Truncated series in u: coefficients of degree < prec are exact.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries1 {
    prec: usize,
    coeffs: Vec<Fq>,
}

impl TruncSeries1 {
    pub fn zero(prec: usize) -> Self {
        TruncSeries1 { prec, coeffs: Vec::new() }
    }

    /// Exactly-known polynomial.
    pub fn poly(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TruncSeries1 { prec: EXACT, coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>, prec: usize) -> Self {
        if prec != EXACT {
            coeffs.truncate(prec);
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        TruncSeries1 { prec, coeffs }
    }

    pub fn monomial(c: Fq, deg: usize, prec: usize) -> Self {
        let mut coeffs = vec![Fq::default(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs, prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn truncate(&self, new_prec: usize) -> TruncSeries1 {
        let prec = self.prec.min(new_prec);
        Self::from_coeffs(self.coeffs.clone(), prec)
    }

    pub fn valuation(&self) -> Valuation {
        match self.coeffs.iter().position(|c| !c.is_zero()) {
            Some(v) => Valuation::Finite(v),
            None if self.prec == EXACT => Valuation::Infinite,
            None => Valuation::Indeterminate(self.prec),
        }
    }

    fn val_lower(&self) -> usize {
        self.valuation().lower_bound()
    }

    pub fn add(&self, ctx: &FieldCtx, rhs: &TruncSeries1) -> TruncSeries1 {
        let prec = self.prec.min(rhs.prec);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.add(self.coeff(i), rhs.coeff(i)));
        }
        Self::from_coeffs(out, prec)
    }

    pub fn sub(&self, ctx: &FieldCtx, rhs: &TruncSeries1) -> TruncSeries1 {
        let prec = self.prec.min(rhs.prec);
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.sub(self.coeff(i), rhs.coeff(i)));
        }
        Self::from_coeffs(out, prec)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fq) -> TruncSeries1 {
        Self::from_coeffs(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect(), self.prec)
    }

    pub fn mul(&self, ctx: &FieldCtx, rhs: &TruncSeries1) -> TruncSeries1 {
        // error(a*b) = O(u^{Na+val b}) + O(u^{Nb+val a})
        let prec = sat_add(self.prec, rhs.val_lower()).min(sat_add(rhs.prec, self.val_lower()));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return TruncSeries1::from_coeffs(Vec::new(), prec);
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = if prec == EXACT { full } else { full.min(prec) };
        let mut out = vec![Fq::default(); len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Self::from_coeffs(out, prec)
    }

    pub fn pow(&self, ctx: &FieldCtx, e: usize) -> TruncSeries1 {
        let mut acc = TruncSeries1::poly(vec![ctx.one()]);
        for _ in 0..e {
            acc = acc.mul(ctx, self);
        }
        acc
    }

    /// s^{p^n} via the Frobenius: coefficientwise p^n-th power with
    /// exponents stretched by p^n. Precision scales by the same factor.
    pub fn frob_stretch(&self, ctx: &FieldCtx, n: u64) -> Result<TruncSeries1, SeriesError> {
        let q = checked_p_pow(ctx.p(), n).ok_or(SeriesError::ExponentOverflow)?;
        let prec = sat_mul(self.prec, q as usize);
        let mut out = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (i as u64).checked_mul(q).ok_or(SeriesError::ExponentOverflow)? as usize;
            if prec != EXACT && idx >= prec {
                continue;
            }
            if out.len() <= idx {
                out.resize(idx + 1, Fq::default());
            }
            out[idx] = ctx.frobenius(c, n);
        }
        Ok(Self::from_coeffs(out, prec))
    }

    /// Multiplicative inverse of a unit series, to precision `prec`.
    pub fn inverse(&self, ctx: &FieldCtx, prec: usize) -> Result<TruncSeries1, SeriesError> {
        let a0 = self.coeff(0);
        if a0.is_zero() {
            return Err(SeriesError::PrecisionUnderflow);
        }
        let prec = if prec == EXACT { self.prec } else { prec.min(self.prec) };
        if prec == 0 || prec == EXACT {
            return Err(SeriesError::PrecisionUnderflow);
        }
        let inv0 = ctx.inv(a0).expect("unit constant term");
        let mut out = vec![Fq::default(); prec];
        out[0] = inv0;
        for m in 1..prec {
            let mut acc = Fq::default();
            for i in 1..=m {
                let ai = self.coeff(i);
                if ai.is_zero() {
                    continue;
                }
                acc = ctx.add(acc, ctx.mul(ai, out[m - i]));
            }
            out[m] = ctx.neg(ctx.mul(inv0, acc));
        }
        Ok(Self::from_coeffs(out, prec))
    }
}

fn checked_p_pow(p: u64, n: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

// --------------------------- two variables ---------------------------

/// Truncated series in (t1, t2), total-degree truncation, sparse storage.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncSeries2 {
    prec: usize,
    terms: BTreeMap<(u64, u64), Fq>,
}

impl TruncSeries2 {
    pub fn zero(prec: usize) -> Self {
        TruncSeries2 { prec, terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u64, u64), Fq)>, prec: usize) -> Self {
        let mut map = BTreeMap::new();
        for ((i, j), c) in terms {
            if c.is_zero() {
                continue;
            }
            if prec != EXACT && i + j >= prec as u64 {
                continue;
            }
            map.insert((i, j), c);
        }
        TruncSeries2 { prec, terms: map }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn is_stored_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u64, u64), &Fq)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u64, j: u64) -> Fq {
        self.terms.get(&(i, j)).copied().unwrap_or_default()
    }

    pub fn max_degree(&self, axis: Axis) -> u64 {
        self.terms
            .keys()
            .map(|&(i, j)| match axis {
                Axis::T1 => i,
                Axis::T2 => j,
            })
            .max()
            .unwrap_or(0)
    }

    /// Total-degree valuation lower bound.
    fn val_lower(&self) -> usize {
        match self.terms.keys().map(|&(i, j)| (i + j) as usize).min() {
            Some(v) => v,
            None => self.prec, // EXACT zero handled by caller
        }
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.keys().map(|&(i, j)| (i + j) as usize).min() {
            Some(v) => Valuation::Finite(v),
            None if self.prec == EXACT => Valuation::Infinite,
            None => Valuation::Indeterminate(self.prec),
        }
    }

    pub fn truncate(&self, new_prec: usize) -> TruncSeries2 {
        let prec = self.prec.min(new_prec);
        Self::from_terms(self.terms.iter().map(|(&k, &v)| (k, v)), prec)
    }

    pub fn add(&self, ctx: &FieldCtx, rhs: &TruncSeries2) -> TruncSeries2 {
        let prec = self.prec.min(rhs.prec);
        let mut out = self.terms.clone();
        for (&k, &v) in &rhs.terms {
            let e = out.entry(k).or_default();
            *e = ctx.add(*e, v);
            if e.is_zero() {
                out.remove(&k);
            }
        }
        Self::from_terms(out, prec)
    }

    pub fn sub(&self, ctx: &FieldCtx, rhs: &TruncSeries2) -> TruncSeries2 {
        let neg = rhs.scale(ctx, ctx.neg(ctx.one()));
        self.add(ctx, &neg)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fq) -> TruncSeries2 {
        Self::from_terms(self.terms.iter().map(|(&k, &v)| (k, ctx.mul(v, c))), self.prec)
    }

    pub fn mul(&self, ctx: &FieldCtx, rhs: &TruncSeries2) -> TruncSeries2 {
        let prec = sat_add(self.prec, rhs.val_lower()).min(sat_add(rhs.prec, self.val_lower()));
        let mut out: BTreeMap<(u64, u64), Fq> = BTreeMap::new();
        for (&(i1, j1), &a) in &self.terms {
            for (&(i2, j2), &b) in &rhs.terms {
                let key = (i1 + i2, j1 + j2);
                if prec != EXACT && key.0 + key.1 >= prec as u64 {
                    continue;
                }
                let e = out.entry(key).or_default();
                *e = ctx.add(*e, ctx.mul(a, b));
                if e.is_zero() {
                    out.remove(&key);
                }
            }
        }
        Self::from_terms(out, prec)
    }

    /// Restriction to one axis: f(t1, 0) or f(0, t2) as a series in that axis.
    pub fn restrict_to_axis(&self, axis: Axis) -> TruncSeries1 {
        let mut coeffs = Vec::new();
        for (&(i, j), &c) in &self.terms {
            let (keep, deg) = match axis {
                Axis::T1 => (j == 0, i),
                Axis::T2 => (i == 0, j),
            };
            if !keep {
                continue;
            }
            let deg = deg as usize;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, Fq::default());
            }
            coeffs[deg] = c;
        }
        TruncSeries1::from_coeffs(coeffs, self.prec)
    }

    pub fn partial_derivative(&self, ctx: &FieldCtx, axis: Axis) -> TruncSeries2 {
        let prec = if self.prec == EXACT { EXACT } else { self.prec.saturating_sub(1) };
        let terms = self.terms.iter().filter_map(|(&(i, j), &c)| {
            let (e, key) = match axis {
                Axis::T1 => (i, (i.checked_sub(1)?, j)),
                Axis::T2 => (j, (i, j.checked_sub(1)?)),
            };
            let coeff = ctx.mul(c, ctx.from_u64(e % ctx.p()));
            Some((key, coeff))
        });
        Self::from_terms(terms, prec)
    }

    /// Partial Frobenius pullback: substitutes t_axis -> t_axis^{p^n}.
    pub fn frobenius_pullback(
        &self,
        ctx: &FieldCtx,
        axis: Axis,
        n: u64,
    ) -> Result<TruncSeries2, SeriesError> {
        let q = checked_p_pow(ctx.p(), n).ok_or(SeriesError::ExponentOverflow)?;
        let mut out = BTreeMap::new();
        for (&(i, j), &c) in &self.terms {
            let key = match axis {
                Axis::T1 => (i.checked_mul(q).ok_or(SeriesError::ExponentOverflow)?, j),
                Axis::T2 => (i, j.checked_mul(q).ok_or(SeriesError::ExponentOverflow)?),
            };
            out.insert(key, c);
        }
        // The least possible degree of a truncated-away monomial (i+j >= N)
        // after pullback is still N, achieved on the untwisted axis.
        Ok(Self::from_terms(out, self.prec))
    }
}

// --------------------------- branches ---------------------------

/// A parametrized branch u -> (alpha1(u), alpha2(u)) through the origin.
#[derive(Clone, Debug)]
pub struct BranchParam {
    pub alpha1: TruncSeries1,
    pub alpha2: TruncSeries1,
}

impl BranchParam {
    pub fn new(alpha1: TruncSeries1, alpha2: TruncSeries1) -> Result<BranchParam, SeriesError> {
        if !alpha1.coeff(0).is_zero() || !alpha2.coeff(0).is_zero() {
            return Err(SeriesError::BranchNotThroughOrigin);
        }
        Ok(BranchParam { alpha1, alpha2 })
    }

    pub fn component(&self, axis: Axis) -> &TruncSeries1 {
        match axis {
            Axis::T1 => &self.alpha1,
            Axis::T2 => &self.alpha2,
        }
    }

    pub fn k1(&self) -> Valuation {
        self.alpha1.valuation()
    }

    pub fn k2(&self) -> Valuation {
        self.alpha2.valuation()
    }

    pub fn is_exact(&self) -> bool {
        self.alpha1.is_exact() && self.alpha2.is_exact()
    }

    pub fn truncate(&self, prec: usize) -> BranchParam {
        BranchParam { alpha1: self.alpha1.truncate(prec), alpha2: self.alpha2.truncate(prec) }
    }
}

/// Axis restrictions of a germ: e = val_{t2} f(0,t2), d = val_{t1} f(t1,0).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxisDecomposition {
    pub e: Valuation,
    pub d: Valuation,
}

/// Decompose a germ through the origin into its axis restrictions.
pub fn axis_decompose(f: &TruncSeries2) -> Result<AxisDecomposition, SeriesError> {
    if !f.coeff(0, 0).is_zero() {
        return Err(SeriesError::OriginNotOnCurve);
    }
    Ok(AxisDecomposition {
        e: f.restrict_to_axis(Axis::T2).valuation(),
        d: f.restrict_to_axis(Axis::T1).valuation(),
    })
}

/// f(alpha1(u), alpha2(u)), with sound precision propagation.
pub fn substitute_branch(
    ctx: &FieldCtx,
    f: &TruncSeries2,
    beta: &BranchParam,
) -> Result<TruncSeries1, SeriesError> {
    substitute_branch_twisted(ctx, f, Axis::T1, 0, beta)
}

/// f(alpha1^{p^n}(u), alpha2(u)) for axis 1 (symmetric for axis 2),
/// computed without materializing the pulled-back germ: in characteristic p
/// the twisted powers are coefficientwise Frobenius stretches.
pub fn substitute_branch_twisted(
    ctx: &FieldCtx,
    f: &TruncSeries2,
    axis: Axis,
    n: u64,
    beta: &BranchParam,
) -> Result<TruncSeries1, SeriesError> {
    let q = checked_p_pow(ctx.p(), n).ok_or(SeriesError::ExponentOverflow)? as usize;
    let twisted = beta.component(axis);
    let fixed = beta.component(axis.other());

    // truncation error of f itself, pushed through the substitution
    let k_tw = twisted.val_lower();
    let k_fx = fixed.val_lower();
    let trunc_err = if f.is_exact() {
        EXACT
    } else {
        sat_mul(f.prec(), sat_mul(k_tw, q).min(k_fx))
    };

    let (max_tw, max_fx) = match axis {
        Axis::T1 => (f.max_degree(Axis::T1) as usize, f.max_degree(Axis::T2) as usize),
        Axis::T2 => (f.max_degree(Axis::T2) as usize, f.max_degree(Axis::T1) as usize),
    };

    // powers of the twisted component: (alpha^i)^{p^n}, stretched
    let mut tw_pows = Vec::with_capacity(max_tw + 1);
    let mut acc = TruncSeries1::poly(vec![ctx.one()]);
    tw_pows.push(acc.frob_stretch(ctx, n)?);
    for _ in 1..=max_tw {
        acc = acc.mul(ctx, twisted);
        tw_pows.push(acc.frob_stretch(ctx, n)?);
    }
    // powers of the fixed component
    let mut fx_pows = Vec::with_capacity(max_fx + 1);
    let mut acc = TruncSeries1::poly(vec![ctx.one()]);
    fx_pows.push(acc.clone());
    for _ in 1..=max_fx {
        acc = acc.mul(ctx, fixed);
        fx_pows.push(acc.clone());
    }

    let mut out = TruncSeries1::poly(Vec::new());
    for (&(i, j), &c) in f.terms() {
        let (ti, fj) = match axis {
            Axis::T1 => (i as usize, j as usize),
            Axis::T2 => (j as usize, i as usize),
        };
        let term = tw_pows[ti].mul(ctx, &fx_pows[fj]).scale(ctx, c);
        out = out.add(ctx, &term);
    }
    let prec = out.prec().min(trunc_err);
    if prec == 0 {
        return Err(SeriesError::PrecisionUnderflow);
    }
    Ok(out.truncate(prec))
}

/// Parametrize a germ smooth along one axis as a graph over the other,
/// by u-adic Newton iteration: returns beta with the free axis set to u
/// and the solved axis alpha(u) satisfying g(beta(u)) = 0 mod u^N.
pub fn hensel_parametrize(
    ctx: &FieldCtx,
    g: &TruncSeries2,
    solve_axis: Axis,
    target_prec: usize,
) -> Result<BranchParam, SeriesError> {
    if !g.coeff(0, 0).is_zero() {
        return Err(SeriesError::OriginNotOnCurve);
    }
    let dg = g.partial_derivative(ctx, solve_axis);
    if dg.coeff(0, 0).is_zero() {
        return Err(SeriesError::NotSmoothAlongAxis);
    }
    if target_prec == 0 || target_prec == EXACT {
        return Err(SeriesError::PrecisionUnderflow);
    }
    let u = TruncSeries1::monomial(ctx.one(), 1, EXACT);
    let make_beta = |alpha: &TruncSeries1| -> BranchParam {
        match solve_axis {
            Axis::T2 => BranchParam { alpha1: u.clone(), alpha2: alpha.clone() },
            Axis::T1 => BranchParam { alpha1: alpha.clone(), alpha2: u.clone() },
        }
    };
    let mut alpha = TruncSeries1::zero(1);
    let mut prec = 1usize;
    while prec < target_prec {
        prec = (prec * 2).min(target_prec);
        // lift to the new working precision: coefficients below the old
        // precision are exact, the Newton step corrects the rest
        let lifted = TruncSeries1::from_coeffs(alpha.coeffs().to_vec(), prec);
        let beta = make_beta(&lifted);
        let g_val = substitute_branch(ctx, g, &beta)?.truncate(prec);
        let dg_val = substitute_branch(ctx, &dg, &beta)?.truncate(prec);
        let correction = g_val.mul(ctx, &dg_val.inverse(ctx, prec)?);
        alpha = lifted.sub(ctx, &correction).truncate(prec);
    }
    let alpha = alpha.truncate(target_prec);
    let free = u.truncate(target_prec);
    match solve_axis {
        Axis::T2 => BranchParam::new(free, alpha),
        Axis::T1 => BranchParam::new(alpha, free),
    }
}
