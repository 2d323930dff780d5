//! Supersingular j-invariants in F_{p^2}, by exhaustive point counting and
//! by the Hasse polynomial, cross-checked against each other.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::ffield::{make_field, FieldCtx, FieldError, Fq, UniPoly};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SSError {
    #[error("p must be a prime >= 5")]
    BadPrime(u64),
    #[error("enumeration budget exceeded for p = {0}")]
    BudgetExceeded(u64),
    #[error("Hasse polynomial produced a root at lambda in {{0,1}}")]
    InternalMismatch,
    #[error("field error: {0}")]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SSMethod {
    BruteForce,
    Hasse,
}

/// Sorted supersingular j-invariants, as elements of F_{p^2}.
#[derive(Clone, Debug)]
pub struct SSLocus {
    pub p: u64,
    pub ctx2: FieldCtx,
    pub js: Vec<Fq>,
    pub method: SSMethod,
}

impl SSLocus {
    pub fn js_pretty(&self) -> Vec<String> {
        self.js
            .iter()
            .map(|&j| {
                let co = j.coeffs(self.ctx2.k());
                if co.iter().skip(1).all(|&c| c == 0) {
                    co[0].to_string()
                } else {
                    self.ctx2.fmt_elem(j)
                }
            })
            .collect()
    }

    /// Product over SS_p of (x - j); has coefficients in F_p.
    pub fn ss_poly(&self) -> UniPoly {
        let mut acc = UniPoly::constant(self.ctx2.one());
        for &j in &self.js {
            let lin = UniPoly::from_coeffs(vec![self.ctx2.neg(j), self.ctx2.one()]);
            acc = acc.mul(&self.ctx2, &lin);
        }
        acc
    }
}

fn check_p(p: u64) -> Result<(), SSError> {
    if p < 5 || !crate::ffield::is_prime_u64(p) {
        return Err(SSError::BadPrime(p));
    }
    Ok(())
}

/// Marks j supersingular iff the Frobenius trace over F_{p^2} of a curve
/// with that j-invariant is divisible by p, counting points exhaustively.
pub fn ss_bruteforce(p: u64) -> Result<SSLocus, SSError> {
    check_p(p)?;
    // j-loop times x-loop is p^4 field operations
    if p > 128 || p * p > (1 << 20) {
        return Err(SSError::BudgetExceeded(p));
    }
    let ctx = make_field(p, 2)?;
    let q = ctx.order();
    let squares: HashSet<Fq> = ctx.all_elements().map(|a| ctx.mul(a, a)).collect();
    let j1728 = ctx.from_u64(1728 % p);
    let mut js = Vec::new();
    for j in ctx.all_elements() {
        let (a, b) = if j.is_zero() {
            (ctx.zero(), ctx.one()) // y^2 = x^3 + 1
        } else if j == j1728 {
            (ctx.one(), ctx.zero()) // y^2 = x^3 + x
        } else {
            let c = ctx.div(j, ctx.sub(j1728, j)).expect("j != 1728");
            (ctx.mul(ctx.from_u64(3), c), ctx.mul(ctx.from_u64(2), c))
        };
        let mut count: i64 = 1; // point at infinity
        for x in ctx.all_elements() {
            let v = ctx.add(ctx.mul(ctx.mul(x, x), x), ctx.add(ctx.mul(a, x), b));
            count += if v.is_zero() {
                1
            } else if squares.contains(&v) {
                2
            } else {
                0
            };
        }
        let trace = q as i64 + 1 - count;
        if trace.rem_euclid(p as i64) == 0 {
            js.push(j);
        }
    }
    js.sort();
    Ok(SSLocus { p, ctx2: ctx, js, method: SSMethod::BruteForce })
}

/// Roots of the Hasse polynomial H_p(lambda) = sum binom((p-1)/2, i)^2 l^i,
/// mapped through the lambda-line cover j(l) = 256 (l^2-l+1)^3 / (l^2(l-1)^2).
pub fn ss_hasse(p: u64) -> Result<SSLocus, SSError> {
    check_p(p)?;
    let ctx1 = make_field(p, 1)?;
    let m = (p - 1) / 2;
    // binom(m, i) mod p by the multiplicative recurrence; i <= m < p so all
    // divisions are by units
    let mut coeffs = Vec::with_capacity(m as usize + 1);
    let mut binom = ctx1.one();
    coeffs.push(ctx1.mul(binom, binom));
    for i in 0..m {
        let num = ctx1.from_u64(m - i);
        let den = ctx1.from_u64(i + 1);
        binom = ctx1.mul(binom, ctx1.div(num, den).expect("i+1 < p"));
        coeffs.push(ctx1.mul(binom, binom));
    }
    let h = UniPoly::from_coeffs(coeffs);
    let (ctx2, roots) = crate::ffield::roots_in_extension(&ctx1, &h, 2)?;
    let mut js = Vec::new();
    for (lambda, _) in roots {
        let one = ctx2.one();
        if lambda.is_zero() || lambda == one {
            return Err(SSError::InternalMismatch);
        }
        let lm1 = ctx2.sub(lambda, one);
        let num = ctx2.add(ctx2.mul(lambda, lm1), one); // l^2 - l + 1
        let num = ctx2.mul(ctx2.from_u64(256 % p), ctx2.pow(num, 3));
        let den = ctx2.mul(ctx2.mul(lambda, lambda), ctx2.mul(lm1, lm1));
        let j = ctx2.div(num, den).expect("lambda not in {0,1}");
        if !js.contains(&j) {
            js.push(j);
        }
    }
    js.sort();
    Ok(SSLocus { p, ctx2, js, method: SSMethod::Hasse })
}

/// Both methods plus the agreement verdict.
pub fn ss_both(p: u64) -> Result<(SSLocus, SSLocus, bool), SSError> {
    let bf = ss_bruteforce(p)?;
    let ha = ss_hasse(p)?;
    let agree = bf.js == ha.js;
    Ok((bf, ha, agree))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        let s5 = ss_bruteforce(5).unwrap();
        assert_eq!(s5.js, vec![s5.ctx2.zero()]);

        let s11 = ss_bruteforce(11).unwrap();
        assert_eq!(s11.js, vec![s11.ctx2.zero(), s11.ctx2.one()]);

        let s13 = ss_bruteforce(13).unwrap();
        assert_eq!(s13.js, vec![s13.ctx2.from_u64(5)]);
    }

    #[test]
    fn hasse_poly_p5() {
        // H_5 = 1 + 4l + l^2 and its roots map to j = 0
        let s = ss_hasse(5).unwrap();
        assert_eq!(s.js, vec![s.ctx2.zero()]);
    }

    #[test]
    fn methods_agree() {
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
            let (bf, ha, agree) = ss_both(p).unwrap();
            assert!(agree, "disagreement at p={p}: {:?} vs {:?}", bf.js_pretty(), ha.js_pretty());
        }
    }

    #[test]
    fn galois_stable_and_fp_coefficients() {
        for p in [11u64, 13, 23, 31] {
            let s = ss_bruteforce(p).unwrap();
            for &j in &s.js {
                assert!(s.js.contains(&s.ctx2.frobenius(j, 1)));
            }
            let poly = s.ss_poly();
            for i in 0..=poly.degree().unwrap_or(0) {
                let c = poly.get(i);
                assert_eq!(s.ctx2.frobenius(c, 1), c, "coefficient not in F_p");
            }
        }
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(ss_bruteforce(4).unwrap_err(), SSError::BadPrime(4));
        assert_eq!(ss_bruteforce(3).unwrap_err(), SSError::BadPrime(3));
        assert_eq!(ss_bruteforce(131).unwrap_err(), SSError::BudgetExceeded(131));
    }
}
