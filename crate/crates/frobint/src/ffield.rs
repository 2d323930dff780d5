//! Exact arithmetic in small finite fields `F_{p^k}` (p <= 1000, k <= 12)
//! plus the univariate polynomial utilities everything else is built on.
//!
//! Elements are coefficient vectors of `F_p[x]/(modulus)` with the modulus
//! chosen deterministically (lexicographically smallest irreducible), so
//! serialized elements are portable across runs.

use thiserror::Error;

/// Maximum supported extension degree.
pub const MAX_K: usize = 12;

/// Enumeration budget for exhaustive root searches.
pub const ENUM_BUDGET: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} out of range (expected 1..=12)")]
    DegreeOutOfRange(usize),
    #[error("field order p^k does not fit the enumeration range")]
    OrderTooLarge,
    #[error("enumeration budget exceeded ({0} points)")]
    BudgetExceeded(u64),
    #[error("no embedding of degree {0} into degree {1}")]
    NoEmbedding(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
}

/// An element of `F_{p^k}`, stored as `k` coefficients in `[0, p)`.
/// Unused slots (index >= k) are zero, so derived equality and ordering
/// are consistent within a fixed context.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fq {
    c: [u64; MAX_K],
}

impl Fq {
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn coeffs(&self, k: usize) -> &[u64] {
        &self.c[..k]
    }
}

impl std::fmt::Debug for Fq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let hi = self.c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
        write!(f, "Fq{:?}", &self.c[..hi])
    }
}

/// Field context: prime, extension degree and the (monic) defining modulus.
/// Immutable after construction; all element operations go through it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldCtx {
    p: u64,
    k: usize,
    /// modulus coefficients, degree k, monic: modulus[k] == 1
    modulus: [u64; MAX_K + 1],
    order: u64,
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

// ---- raw prime-field polynomial helpers (used before a ctx exists) ----

fn ppoly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn ppoly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // reduce by monic m
    let dm = m.len() - 1;
    let mut i = prod.len();
    while i > dm {
        i -= 1;
        let c = prod[i];
        if c == 0 {
            continue;
        }
        prod[i] = 0;
        for j in 0..dm {
            let t = (c * m[j]) % p;
            prod[i - dm + j] = (prod[i - dm + j] + p * p - t) % p;
        }
    }
    prod.truncate(dm);
    ppoly_trim(&mut prod);
    prod
}

fn ppoly_powmod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut base = a.to_vec();
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = ppoly_mulmod(&acc, &base, m, p);
        }
        base = ppoly_mulmod(&base, &base, m, p);
        e >>= 1;
    }
    acc
}

fn ppoly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ppoly_trim(&mut r);
    let db = b.len() - 1;
    let lb_inv = mod_inv(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] * lb_inv) % p;
        if c != 0 {
            for j in 0..=db {
                let t = (c * b[j]) % p;
                r[dr - db + j] = (r[dr - db + j] + p * p - t) % p;
            }
        }
        r.pop();
        ppoly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn ppoly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ppoly_trim(&mut a);
    ppoly_trim(&mut b);
    while !b.is_empty() {
        let r = ppoly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p.
/// Exact (not probabilistic): checks x^{p^k} == x mod f and that
/// gcd(x^{p^{k/l}} - x, f) = 1 for every prime l | k.
fn is_irreducible(f: &[u64], k: usize, p: u64) -> bool {
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // h_j = x^{p^j} mod f
    let mut h = x.clone();
    let mut powers = Vec::with_capacity(k);
    for _ in 0..k {
        h = ppoly_powmod(&h, p, f, p);
        powers.push(h.clone());
    }
    if powers[k - 1] != x {
        return false;
    }
    let mut rem = k;
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= rem {
        if rem % d == 0 {
            primes.push(d);
            while rem % d == 0 {
                rem /= d;
            }
        }
        d += 1;
    }
    if rem > 1 {
        primes.push(rem);
    }
    for l in primes {
        let j = k / l;
        // gcd(h_j - x, f) must be trivial
        let mut diff = powers[j - 1].clone();
        if diff.len() < 2 {
            diff.resize(2, 0);
        }
        diff[1] = (diff[1] + p - 1) % p;
        ppoly_trim(&mut diff);
        let g = ppoly_gcd(f, &diff, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Construct `F_{p^k}` with the lexicographically smallest irreducible
/// monic modulus (coefficient order `[c0, ..., c_{k-1}]`).
pub fn make_field(p: u64, k: usize) -> Result<FieldCtx, FieldError> {
    if !is_prime_u64(p) {
        return Err(FieldError::NonPrime(p));
    }
    if k < 1 || k > MAX_K {
        return Err(FieldError::DegreeOutOfRange(k));
    }
    let order = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(p)).ok_or(FieldError::OrderTooLarge)?;
    let mut cand = vec![0u64; k + 1];
    cand[k] = 1;
    let total = order;
    // for k >= 2 an irreducible needs a nonzero constant term, so the whole
    // lex block with c0 = 0 can be skipped
    let start = if k >= 2 { total / p } else { 0 };
    for idx in start..total {
        // lex order on [c0,...,c_{k-1}]: c_{k-1} is the fastest digit
        let mut t = idx;
        for i in (0..k).rev() {
            cand[i] = t % p;
            t /= p;
        }
        if is_irreducible(&cand, k, p) {
            let mut modulus = [0u64; MAX_K + 1];
            modulus[..=k].copy_from_slice(&cand);
            return Ok(FieldCtx { p, k, modulus, order });
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

impl FieldCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// q = p^k
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus_coeffs(&self) -> &[u64] {
        &self.modulus[..=self.k]
    }

    pub fn zero(&self) -> Fq {
        Fq::default()
    }

    pub fn one(&self) -> Fq {
        self.from_u64(1)
    }

    pub fn from_u64(&self, c: u64) -> Fq {
        let mut e = Fq::default();
        e.c[0] = c % self.p;
        e
    }

    pub fn from_i64(&self, c: i64) -> Fq {
        let m = c.rem_euclid(self.p as i64) as u64;
        self.from_u64(m)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fq {
        let mut e = Fq::default();
        for (i, &c) in coeffs.iter().take(self.k).enumerate() {
            e.c[i] = c % self.p;
        }
        e
    }

    /// Ring generator: the class of x for k >= 2, the smallest
    /// multiplicative generator of F_p* for k = 1.
    pub fn generator(&self) -> Fq {
        if self.k >= 2 {
            let mut e = Fq::default();
            e.c[1] = 1;
            return e;
        }
        // order of F_p* is p-1; find the smallest generator
        'outer: for g in 2..self.p {
            let mut rem = self.p - 1;
            let mut d = 2;
            while d * d <= rem {
                if rem % d == 0 {
                    if mod_pow(g, (self.p - 1) / d, self.p) == 1 {
                        continue 'outer;
                    }
                    while rem % d == 0 {
                        rem /= d;
                    }
                }
                d += 1;
            }
            if rem > 1 && mod_pow(g, (self.p - 1) / rem, self.p) == 1 {
                continue;
            }
            return self.from_u64(g);
        }
        self.one() // p = 2
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        let mut r = Fq::default();
        for i in 0..self.k {
            r.c[i] = (a.c[i] + b.c[i]) % self.p;
        }
        r
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        let mut r = Fq::default();
        for i in 0..self.k {
            r.c[i] = (a.c[i] + self.p - b.c[i]) % self.p;
        }
        r
    }

    pub fn neg(&self, a: Fq) -> Fq {
        self.sub(Fq::default(), a)
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        let k = self.k;
        if k == 1 {
            let mut r = Fq::default();
            r.c[0] = a.c[0] * b.c[0] % self.p;
            return r;
        }
        let mut prod = [0u64; 2 * MAX_K - 1];
        for i in 0..k {
            if a.c[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + a.c[i] * b.c[j]) % self.p;
            }
        }
        // reduce by the monic modulus
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let t = c * self.modulus[j] % self.p;
                prod[i - k + j] = (prod[i - k + j] + self.p * self.p - t) % self.p;
            }
        }
        let mut r = Fq::default();
        r.c[..k].copy_from_slice(&prod[..k]);
        r
    }

    pub fn pow(&self, a: Fq, mut e: u128) -> Fq {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fq) -> Result<Fq, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.order as u128 - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^{p^n}. Cycles with period dividing k, so n is reduced mod k.
    pub fn frobenius(&self, a: Fq, n: u64) -> Fq {
        let n = (n % self.k as u64) as usize;
        let mut r = a;
        for _ in 0..n {
            r = self.pow(r, self.p as u128);
        }
        r
    }

    /// p-th root (Frobenius is bijective): a^{p^{k-1}}.
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.frobenius(a, self.k as u64 - 1)
    }

    /// Degree of `a` over the subfield F_{p^s} (s must divide k):
    /// the smallest d with a^{p^{s d}} = a.
    pub fn degree_over(&self, a: Fq, s: usize) -> usize {
        debug_assert!(self.k % s == 0);
        let mut b = a;
        for d in 1..=(self.k / s) {
            b = self.frobenius(b, s as u64);
            if b == a {
                return d;
            }
        }
        unreachable!("Frobenius orbit must close within k/s steps")
    }

    /// Element with the given enumeration index (base-p digits, c0 fastest).
    pub fn elem_from_index(&self, idx: u64) -> Fq {
        let mut e = Fq::default();
        let mut t = idx;
        for i in 0..self.k {
            e.c[i] = t % self.p;
            t /= self.p;
        }
        e
    }

    pub fn all_elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.order).map(move |i| self.elem_from_index(i))
    }

    pub fn fmt_elem(&self, a: Fq) -> String {
        if self.k == 1 {
            return a.c[0].to_string();
        }
        format!("{:?}", &a.c[..self.k])
    }
}

// ------------------------- univariate polynomials -------------------------

/// Dense univariate polynomial over a `FieldCtx`; coefficient vector is
/// trimmed (empty = zero polynomial, so the leading coefficient is nonzero).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UniPoly {
    pub coeffs: Vec<Fq>,
}

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: Fq) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn x() -> Self {
        UniPoly { coeffs: vec![Fq::default(), fq_one_raw()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn get(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, ctx: &FieldCtx, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.add(self.get(i), rhs.get(i)));
        }
        UniPoly::from_coeffs(out)
    }

    pub fn sub(&self, ctx: &FieldCtx, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(ctx.sub(self.get(i), rhs.get(i)));
        }
        UniPoly::from_coeffs(out)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fq) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect())
    }

    pub fn mul(&self, ctx: &FieldCtx, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Fq::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, e: u32) -> UniPoly {
        let mut acc = UniPoly::constant(ctx.one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            base = base.mul(ctx, &base);
            e >>= 1;
        }
        acc
    }

    /// (quotient, remainder) with remainder degree < divisor degree.
    pub fn divrem(&self, ctx: &FieldCtx, rhs: &UniPoly) -> Result<(UniPoly, UniPoly), FieldError> {
        let db = rhs.degree().ok_or(FieldError::DivisionByZero)?;
        let lb_inv = ctx.inv(rhs.coeffs[db])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fq::default(); self.coeffs.len().saturating_sub(db)];
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = ctx.mul(rem[dr], lb_inv);
            if !c.is_zero() {
                quot[dr - db] = c;
                for j in 0..=db {
                    let t = ctx.mul(c, rhs.coeffs[j]);
                    rem[dr - db + j] = ctx.sub(rem[dr - db + j], t);
                }
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Ok((UniPoly::from_coeffs(quot), UniPoly::from_coeffs(rem)))
    }

    pub fn gcd(&self, ctx: &FieldCtx, rhs: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(ctx, &b).expect("b nonzero");
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    pub fn monic(&self, ctx: &FieldCtx) -> UniPoly {
        match self.degree() {
            None => UniPoly::zero(),
            Some(d) => {
                let inv = ctx.inv(self.coeffs[d]).expect("leading coeff nonzero");
                self.scale(ctx, inv)
            }
        }
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> UniPoly {
        let mut out = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(ctx.mul(c, ctx.from_u64(i as u64)));
        }
        UniPoly::from_coeffs(out)
    }

    pub fn eval(&self, ctx: &FieldCtx, x: Fq) -> Fq {
        let mut acc = Fq::default();
        for &c in self.coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), c);
        }
        acc
    }

    /// The polynomial g with g(x)^p = self(x), valid when the derivative
    /// vanishes identically (all exponents divisible by p).
    pub fn pth_root(&self, ctx: &FieldCtx) -> UniPoly {
        let p = ctx.p() as usize;
        let mut out = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            debug_assert!(i % p == 0);
            let j = i / p;
            if out.len() <= j {
                out.resize(j + 1, Fq::default());
            }
            out[j] = ctx.pth_root(c);
        }
        UniPoly::from_coeffs(out)
    }

    /// Product of the distinct irreducible factors (the radical),
    /// correct in characteristic p.
    pub fn radical(&self, ctx: &FieldCtx) -> UniPoly {
        match self.degree() {
            None | Some(0) => return UniPoly::constant(ctx.one()),
            _ => {}
        }
        let d = self.derivative(ctx);
        if d.is_zero() {
            return self.pth_root(ctx).radical(ctx);
        }
        let g = self.gcd(ctx, &d);
        let (w, r) = self.divrem(ctx, &g).expect("gcd divides");
        debug_assert!(r.is_zero());
        // strip the factors already present in w out of g
        let mut y = g;
        loop {
            let h = y.gcd(ctx, &w);
            if h.degree() == Some(0) || h.is_zero() {
                break;
            }
            let (q, _) = y.divrem(ctx, &h).expect("h divides y");
            y = q;
        }
        w.mul(ctx, &y.radical(ctx)).monic(ctx)
    }

    /// Number of distinct roots in an algebraic closure.
    pub fn distinct_root_count(&self, ctx: &FieldCtx) -> u64 {
        self.radical(ctx).degree().unwrap_or(0) as u64
    }
}

fn fq_one_raw() -> Fq {
    let mut e = Fq::default();
    e.c[0] = 1;
    e
}

// ------------------------------ embeddings ------------------------------

/// Field embedding `F_{p^k} -> F_{p^m}` (k | m), realized by mapping the
/// source generator to a deterministically chosen root of the source
/// modulus, found by exhaustive search.
pub struct Embedding {
    src_k: usize,
    /// powers r^0, ..., r^{k-1} of the chosen root, in the target field
    powers: Vec<Fq>,
}

impl Embedding {
    pub fn new(src: &FieldCtx, dst: &FieldCtx) -> Result<Embedding, FieldError> {
        if src.p() != dst.p() || dst.k() % src.k() != 0 {
            return Err(FieldError::NoEmbedding(src.k(), dst.k()));
        }
        if src.k() == 1 {
            return Ok(Embedding { src_k: 1, powers: vec![dst.one()] });
        }
        if dst.order() > ENUM_BUDGET {
            return Err(FieldError::BudgetExceeded(dst.order()));
        }
        // the source modulus, viewed with prime-field coefficients in dst
        let modulus: Vec<Fq> = src.modulus_coeffs().iter().map(|&c| dst.from_u64(c)).collect();
        let mpoly = UniPoly::from_coeffs(modulus);
        for r in dst.all_elements() {
            if mpoly.eval(dst, r).is_zero() {
                let mut powers = vec![dst.one()];
                for _ in 1..src.k() {
                    let last = *powers.last().unwrap();
                    powers.push(dst.mul(last, r));
                }
                return Ok(Embedding { src_k: src.k(), powers });
            }
        }
        Err(FieldError::NoEmbedding(src.k(), dst.k()))
    }

    pub fn map(&self, dst: &FieldCtx, a: Fq) -> Fq {
        let mut out = Fq::default();
        for i in 0..self.src_k {
            let c = a.c[i];
            if c == 0 {
                continue;
            }
            out = dst.add(out, dst.mul(dst.from_u64(c), self.powers[i]));
        }
        out
    }

    pub fn map_poly(&self, dst: &FieldCtx, f: &UniPoly) -> UniPoly {
        UniPoly::from_coeffs(f.coeffs.iter().map(|&c| self.map(dst, c)).collect())
    }
}

/// All roots of `f` in `F_{p^m}` with multiplicities, by exhaustive
/// evaluation plus repeated division. Requires k | m.
pub fn roots_in_extension(
    ctx: &FieldCtx,
    f: &UniPoly,
    m: usize,
) -> Result<(FieldCtx, Vec<(Fq, usize)>), FieldError> {
    if f.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let ext = make_field(ctx.p(), m)?;
    if ext.order() > ENUM_BUDGET {
        return Err(FieldError::BudgetExceeded(ext.order()));
    }
    let emb = Embedding::new(ctx, &ext)?;
    let fe = emb.map_poly(&ext, f);
    let roots = roots_with_multiplicity(&ext, &fe);
    Ok((ext, roots))
}

/// Roots of `f` in its own coefficient field, with multiplicities.
pub fn roots_with_multiplicity(ctx: &FieldCtx, f: &UniPoly) -> Vec<(Fq, usize)> {
    let mut out = Vec::new();
    for r in ctx.all_elements() {
        if !f.eval(ctx, r).is_zero() {
            continue;
        }
        // multiplicity by repeated division
        let lin = UniPoly::from_coeffs(vec![ctx.neg(r), ctx.one()]);
        let mut g = f.clone();
        let mut mult = 0;
        loop {
            let (q, rem) = g.divrem(ctx, &lin).expect("linear divisor");
            if !rem.is_zero() {
                break;
            }
            mult += 1;
            g = q;
            if g.is_zero() {
                break;
            }
        }
        out.push((r, mult));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn make_field_prime_and_quadratic() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.modulus_coeffs(), &[0, 1]); // modulus x for the prime field
        let f4 = make_field(2, 2).unwrap();
        assert_eq!(f4.modulus_coeffs(), &[1, 1, 1]); // x^2 + x + 1
        assert_eq!(make_field(4, 1), Err(FieldError::NonPrime(4)));
        assert_eq!(make_field(5, 0), Err(FieldError::DegreeOutOfRange(0)));
    }

    #[test]
    fn frobenius_examples() {
        let f5 = make_field(5, 1).unwrap();
        let a = f5.from_u64(3);
        assert_eq!(f5.frobenius(a, 3), a); // prime field is fixed
        let f4 = make_field(2, 2).unwrap();
        let a = f4.generator(); // root of x^2+x+1
        let conj = f4.frobenius(a, 1);
        assert_eq!(conj, f4.add(a, f4.one())); // a^2 = a + 1
        assert_eq!(f4.frobenius(a, 0), a);
    }

    #[test]
    fn roots_in_extension_examples() {
        let f5 = make_field(5, 1).unwrap();
        // x^2 - 1 over F5: roots 1, 4
        let f = UniPoly::from_coeffs(vec![f5.from_i64(-1), f5.zero(), f5.one()]);
        let (_, roots) = roots_in_extension(&f5, &f, 1).unwrap();
        let vals: Vec<u64> = roots.iter().map(|(r, _)| r.coeffs(1)[0]).collect();
        assert_eq!(vals, vec![1, 4]);

        let f3 = make_field(3, 1).unwrap();
        let f = UniPoly::from_coeffs(vec![f3.one(), f3.zero(), f3.one()]); // x^2 + 1
        let (_, r1) = roots_in_extension(&f3, &f, 1).unwrap();
        assert!(r1.is_empty());
        let (_, r2) = roots_in_extension(&f3, &f, 2).unwrap();
        assert_eq!(r2.len(), 2);

        let f7 = make_field(7, 1).unwrap();
        // (x-2)^2
        let lin = UniPoly::from_coeffs(vec![f7.from_i64(-2), f7.one()]);
        let sq = lin.mul(&f7, &lin);
        let (_, r) = roots_in_extension(&f7, &sq, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].1, 2);
    }

    #[test]
    fn field_axioms_random() {
        let grid = [(2u64, 1usize), (2, 4), (3, 2), (5, 1), (5, 3), (7, 2), (13, 1), (3, 6)];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &(p, k) in &grid {
            let ctx = make_field(p, k).unwrap();
            for _ in 0..1000 {
                let a = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
                let b = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
                let c = ctx.elem_from_index(rng.gen_range(0..ctx.order()));
                assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
                if !a.is_zero() {
                    assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.one());
                }
                // Frobenius orbit closes: a^q = a
                assert_eq!(ctx.frobenius(a, k as u64), a);
                // frobenius(.,1) is an automorphism
                let fr = |x| ctx.frobenius(x, 1);
                assert_eq!(fr(ctx.add(a, b)), ctx.add(fr(a), fr(b)));
                assert_eq!(fr(ctx.mul(a, b)), ctx.mul(fr(a), fr(b)));
            }
        }
    }

    #[test]
    fn roots_count_matches_degree_when_split() {
        // all roots of x^q - x over F_q lie in the field itself
        let ctx = make_field(3, 2).unwrap();
        let mut coeffs = vec![Fq::default(); 10];
        coeffs[1] = ctx.neg(ctx.one());
        coeffs[9] = ctx.one();
        let f = UniPoly::from_coeffs(coeffs); // x^9 - x
        let roots = roots_with_multiplicity(&ctx, &f);
        assert_eq!(roots.iter().map(|r| r.1).sum::<usize>(), 9);
    }

    #[test]
    fn radical_char_p() {
        let ctx = make_field(5, 1).unwrap();
        let x = UniPoly::x();
        let xm1 = UniPoly::from_coeffs(vec![ctx.from_i64(-1), ctx.one()]);
        // f = x^5 (x-1)^2 -> radical x(x-1), 2 distinct roots
        let f = x.pow(&ctx, 5).mul(&ctx, &xm1.pow(&ctx, 2));
        assert_eq!(f.distinct_root_count(&ctx), 2);
        // x^{25} - x: 25 distinct roots
        let mut coeffs = vec![Fq::default(); 26];
        coeffs[1] = ctx.neg(ctx.one());
        coeffs[25] = ctx.one();
        let f = UniPoly::from_coeffs(coeffs);
        assert_eq!(f.distinct_root_count(&ctx), 25);
    }

    #[test]
    fn embedding_respects_ops() {
        let src = make_field(3, 2).unwrap();
        let dst = make_field(3, 4).unwrap();
        let emb = Embedding::new(&src, &dst).unwrap();
        let a = src.generator();
        let b = src.add(a, src.one());
        assert_eq!(emb.map(&dst, src.mul(a, b)), dst.mul(emb.map(&dst, a), emb.map(&dst, b)));
        assert_eq!(emb.map(&dst, src.add(a, b)), dst.add(emb.map(&dst, a), emb.map(&dst, b)));
    }
}
