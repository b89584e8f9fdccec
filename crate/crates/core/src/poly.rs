//! Exact integer-polynomial utilities (resultants, Sturm chains) and dense
//! polynomial arithmetic over prime fields, including full factorization.
//!
//! Integer polynomials are little-endian `Vec<BigInt>` with no trailing
//! zeros; mod-p polynomials are little-endian `Vec<u64>` with coefficients
//! reduced mod p. Degrees stay tiny (defining polynomials of number fields),
//! so schoolbook arithmetic is deliberate.

use num::bigint::{BigInt, BigUint, Sign};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type IntPoly = Vec<BigInt>;

pub fn int_poly_from_i64(c: &[i64]) -> IntPoly {
    trim_int(c.iter().map(|&x| BigInt::from(x)).collect())
}

pub fn trim_int(mut v: IntPoly) -> IntPoly {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Degree, or `None` for the zero polynomial.
pub fn deg_int(v: &[BigInt]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

pub fn derivative_int(f: &[BigInt]) -> IntPoly {
    if f.len() <= 1 {
        return vec![];
    }
    trim_int(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    )
}

/// Resultant of two nonzero integer polynomials via fraction-free (Bareiss)
/// elimination of the Sylvester matrix.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = match deg_int(f) {
        Some(d) => d,
        None => return BigInt::zero(),
    };
    let n = match deg_int(g) {
        Some(d) => d,
        None => return BigInt::zero(),
    };
    if m == 0 {
        return f[0].pow(n as u32);
    }
    if n == 0 {
        return g[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            mat[i][i + j] = f[m - j].clone();
        }
    }
    for i in 0..m {
        for j in 0..=n {
            mat[n + i][i + j] = g[n - j].clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !m[i][k].is_zero());
            match swap {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev; // exact by Bareiss
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// disc(f) = (-1)^{m(m-1)/2} res(f, f') for monic f of degree m.
pub fn discriminant_monic(f: &[BigInt]) -> BigInt {
    let m = deg_int(f).expect("nonzero polynomial");
    if m <= 1 {
        return BigInt::one();
    }
    let res = resultant(f, &derivative_int(f));
    if (m * (m - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

fn to_rat(f: &[BigInt]) -> Vec<BigRational> {
    f.iter().map(|c| BigRational::from(c.clone())).collect()
}

fn rat_trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    while r.len() > db {
        let dr = r.len() - 1;
        let c = &r[dr] / lb;
        for i in 0..=db {
            let t = &b[i] * &c;
            r[i + dr - db] -= t;
        }
        r = rat_trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn sign_at_infinity(f: &[BigRational], positive: bool) -> i32 {
    let d = f.len() - 1;
    let mut s = match f[d].numer().sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    };
    if !positive && d % 2 == 1 {
        s = -s;
    }
    s
}

/// Number of distinct real roots of a squarefree integer polynomial,
/// counted with a Sturm chain evaluated at +-infinity.
pub fn real_root_count_sturm(f: &[BigInt]) -> u32 {
    let d = deg_int(f).expect("nonzero polynomial");
    if d == 0 {
        return 0;
    }
    let mut chain = vec![to_rat(f), to_rat(&derivative_int(f))];
    loop {
        let n = chain.len();
        let mut r = rat_rem(&chain[n - 2], &chain[n - 1]);
        if r.is_empty() {
            break;
        }
        for c in &mut r {
            *c = -c.clone();
        }
        chain.push(r);
    }
    let changes = |positive: bool| {
        let mut count = 0u32;
        let mut last = 0i32;
        for p in &chain {
            let s = sign_at_infinity(p, positive);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    };
    changes(false) - changes(true)
}

/// Primitive gcd (positive leading coefficient) of two integer polynomials.
pub fn int_poly_gcd(f: &[BigInt], g: &[BigInt]) -> IntPoly {
    let mut a = to_rat(f);
    let mut b = to_rat(g);
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = std::mem::replace(&mut b, r);
    }
    // scale to a primitive integer polynomial
    if a.is_empty() {
        return vec![];
    }
    let mut denom_lcm = BigInt::one();
    for c in &a {
        denom_lcm = num::integer::lcm(denom_lcm, c.denom().clone());
    }
    let mut ints: IntPoly = a
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let mut content = BigInt::zero();
    for c in &ints {
        content = num::integer::gcd(content, c.clone());
    }
    if !content.is_zero() {
        for c in &mut ints {
            *c = &*c / &content;
        }
    }
    if ints.last().is_some_and(|c| c.is_negative()) {
        for c in &mut ints {
            *c = -c.clone();
        }
    }
    ints
}

/// Renders an ascending coefficient list as a human-readable polynomial,
/// e.g. `[ -1, -1, 0, 1 ]` -> `"x^3-x-1"`.
pub fn poly_to_string(coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let lead = out.is_empty();
        if c < 0 {
            out.push('-');
        } else if !lead {
            out.push('+');
        }
        let a = c.unsigned_abs();
        match i {
            0 => out.push_str(&a.to_string()),
            _ => {
                if a != 1 {
                    out.push_str(&a.to_string());
                }
                out.push('x');
                if i > 1 {
                    out.push_str(&format!("^{}", i));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

// ---------------------------------------------------------------------------
// Arithmetic in F_p[x].
// ---------------------------------------------------------------------------

/// Prime modulus context; p < 2^63 so sums of two residues never overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Fp {
        debug_assert!((2..(1 << 63)).contains(&p));
        Fp { p }
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }

    pub fn pow(self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }
}

/// Little-endian dense polynomial over F_p, trimmed.
pub type PolyP = Vec<u64>;

pub fn ptrim(mut v: PolyP) -> PolyP {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn pdeg(v: &[u64]) -> Option<usize> {
    if v.is_empty() {
        None
    } else {
        Some(v.len() - 1)
    }
}

pub fn reduce_i64(fp: Fp, coeffs: &[i64]) -> PolyP {
    ptrim(
        coeffs
            .iter()
            .map(|&c| c.rem_euclid(fp.p as i64) as u64)
            .collect(),
    )
}

pub fn padd(fp: Fp, a: &[u64], b: &[u64]) -> PolyP {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            fp.add(x, y)
        })
        .collect();
    ptrim(out)
}

pub fn psub(fp: Fp, a: &[u64], b: &[u64]) -> PolyP {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            fp.sub(x, y)
        })
        .collect();
    ptrim(out)
}

pub fn pmul(fp: Fp, a: &[u64], b: &[u64]) -> PolyP {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp.add(out[i + j], fp.mul(x, y));
        }
    }
    ptrim(out)
}

pub fn pmake_monic(fp: Fp, a: &[u64]) -> PolyP {
    match a.last() {
        None | Some(1) => a.to_vec(),
        Some(&lc) => {
            let inv = fp.inv(lc);
            ptrim(a.iter().map(|&c| fp.mul(c, inv)).collect())
        }
    }
}

/// Quotient and remainder; `b` must be nonzero.
pub fn pdivrem(fp: Fp, a: &[u64], b: &[u64]) -> (PolyP, PolyP) {
    let db = pdeg(b).expect("division by zero polynomial");
    let lb_inv = fp.inv(b[db]);
    let mut r: PolyP = a.to_vec();
    let mut q = vec![0u64; a.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = fp.mul(r[dr], lb_inv);
        q[dr - db] = c;
        for i in 0..=db {
            r[i + dr - db] = fp.sub(r[i + dr - db], fp.mul(b[i], c));
        }
        r = ptrim(r);
        if r.is_empty() {
            break;
        }
    }
    (ptrim(q), r)
}

pub fn prem(fp: Fp, a: &[u64], b: &[u64]) -> PolyP {
    pdivrem(fp, a, b).1
}

/// Monic gcd.
pub fn pgcd(fp: Fp, a: &[u64], b: &[u64]) -> PolyP {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    while !y.is_empty() {
        let r = prem(fp, &x, &y);
        x = std::mem::replace(&mut y, r);
    }
    pmake_monic(fp, &x)
}

pub fn pmulmod(fp: Fp, a: &[u64], b: &[u64], m: &[u64]) -> PolyP {
    prem(fp, &pmul(fp, a, b), m)
}

pub fn ppowmod(fp: Fp, base: &[u64], mut e: u64, m: &[u64]) -> PolyP {
    let mut acc = prem(fp, &[1], m);
    let mut b = prem(fp, base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = pmulmod(fp, &acc, &b, m);
        }
        b = pmulmod(fp, &b, &b, m);
        e >>= 1;
    }
    acc
}

pub fn ppowmod_big(fp: Fp, base: &[u64], e: &BigUint, m: &[u64]) -> PolyP {
    let mut acc = prem(fp, &[1], m);
    let mut b = prem(fp, base, m);
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = pmulmod(fp, &acc, &b, m);
        }
        b = pmulmod(fp, &b, &b, m);
    }
    acc
}

pub fn pderiv(fp: Fp, f: &[u64]) -> PolyP {
    if f.len() <= 1 {
        return vec![];
    }
    ptrim(
        f.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| fp.mul(c, i as u64 % fp.p))
            .collect(),
    )
}

/// For f with f' = 0 in F_p[x], f(x) = g(x)^p; returns g.
fn frobenius_descend(fp: Fp, f: &[u64]) -> PolyP {
    let p = fp.p as usize;
    let mut g = vec![0u64; (f.len() - 1) / p + 1];
    for (i, &c) in f.iter().enumerate() {
        if c != 0 {
            debug_assert!(i % p == 0);
            g[i / p] = c; // c^(1/p) = c in F_p
        }
    }
    ptrim(g)
}

fn seed_from(fp: Fp, d: usize, g: &[u64]) -> u64 {
    let mut h = 0x9e3779b97f4a7c15u64 ^ fp.p ^ ((d as u64) << 32);
    for &c in g {
        h = h.rotate_left(13) ^ c.wrapping_mul(0xff51afd7ed558ccd);
    }
    h
}

/// Splits a product of distinct irreducibles, all of degree d
/// (Cantor-Zassenhaus for odd p, exhaustive trial division for p = 2).
fn equal_degree_split(fp: Fp, g: &[u64], d: usize) -> Vec<PolyP> {
    let dg = pdeg(g).unwrap();
    if dg == d {
        return vec![g.to_vec()];
    }
    if fp.p == 2 {
        return split_exhaustive(fp, g, d);
    }
    let exponent = (BigUint::from(fp.p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed_from(fp, d, g));
    loop {
        let a: PolyP = ptrim((0..dg).map(|_| rng.gen_range(0..fp.p)).collect());
        if pdeg(&a).is_none() {
            continue;
        }
        let b = ppowmod_big(fp, &a, &exponent, g);
        let h = pgcd(fp, &psub(fp, &b, &[1]), g);
        if let Some(dh) = pdeg(&h) {
            if dh > 0 && dh < dg {
                let (q, r) = pdivrem(fp, g, &h);
                debug_assert!(r.is_empty());
                let mut out = equal_degree_split(fp, &h, d);
                out.extend(equal_degree_split(fp, &q, d));
                return out;
            }
        }
    }
}

/// Trial division by every monic polynomial of degree d; fine for p = 2 and
/// the tiny degrees that occur here.
fn split_exhaustive(fp: Fp, g: &[u64], d: usize) -> Vec<PolyP> {
    let mut rest = g.to_vec();
    let mut out = Vec::new();
    let count = fp.p.pow(d as u32);
    for code in 0..count {
        if pdeg(&rest) == Some(d) {
            out.push(rest.clone());
            return out;
        }
        let mut cand = vec![0u64; d + 1];
        cand[d] = 1;
        let mut c = code;
        for slot in cand.iter_mut().take(d) {
            *slot = c % fp.p;
            c /= fp.p;
        }
        loop {
            let (q, r) = pdivrem(fp, &rest, &cand);
            if r.is_empty() {
                out.push(cand.clone());
                rest = q;
            } else {
                break;
            }
        }
    }
    if pdeg(&rest).is_some_and(|dd| dd > 0) {
        out.push(rest);
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial. Returns
/// (product of degree-d irreducibles, d); when `max_d` cuts the loop short
/// the high-degree remainder is discarded.
fn ddf(fp: Fp, f: &[u64], max_d: usize) -> Vec<(PolyP, usize)> {
    let mut v = f.to_vec();
    let mut out = Vec::new();
    let x: PolyP = vec![0, 1];
    let mut h = prem(fp, &x, &v);
    let mut d = 0usize;
    while let Some(dv) = pdeg(&v) {
        if dv == 0 {
            break;
        }
        if dv < 2 * (d + 1) {
            // remainder is a single irreducible
            out.push((v.clone(), dv));
            break;
        }
        if d == max_d {
            break; // caller only needs factors of degree <= max_d
        }
        d += 1;
        h = ppowmod(fp, &h, fp.p, &v);
        let g = pgcd(fp, &psub(fp, &h, &x), &v);
        if pdeg(&g).is_some_and(|dg| dg > 0) {
            out.push((g.clone(), d));
            let (q, r) = pdivrem(fp, &v, &g);
            debug_assert!(r.is_empty());
            v = q;
            h = prem(fp, &h, &v);
        }
    }
    out
}

fn split_squarefree(fp: Fp, f: &[u64], max_d: usize) -> Vec<PolyP> {
    let mut out = Vec::new();
    for (prod, d) in ddf(fp, f, max_d) {
        if d > max_d {
            continue;
        }
        out.extend(equal_degree_split(fp, &prod, d));
    }
    out
}

/// Distinct monic irreducible factors of degree <= max_d. Handles repeated
/// factors and the f' = 0 case (perfect p-th powers).
pub fn distinct_irreducible_factors(fp: Fp, f: &[u64], max_d: usize) -> Vec<PolyP> {
    let f = pmake_monic(fp, &ptrim(f.to_vec()));
    match pdeg(&f) {
        None | Some(0) => return vec![],
        _ => {}
    }
    let fd = pderiv(fp, &f);
    if fd.is_empty() {
        return distinct_irreducible_factors(fp, &frobenius_descend(fp, &f), max_d);
    }
    let g = pgcd(fp, &f, &fd);
    if pdeg(&g) == Some(0) {
        return split_squarefree(fp, &f, max_d);
    }
    let (w, r) = pdivrem(fp, &f, &g);
    debug_assert!(r.is_empty());
    let mut out = split_squarefree(fp, &w, max_d);
    // strip the found factors; what survives is a perfect p-th power
    let mut h = f;
    for q in &out {
        loop {
            let (quo, rem) = pdivrem(fp, &h, q);
            if rem.is_empty() {
                h = quo;
            } else {
                break;
            }
        }
    }
    if pdeg(&h).is_some_and(|dh| dh > 0) {
        out.extend(distinct_irreducible_factors(fp, &h, max_d));
    }
    out
}

/// Full factorization with multiplicities, factors of degree <= max_d only,
/// sorted by (degree, coefficients) so output order is reproducible.
pub fn factor_mod_p(fp: Fp, f: &[u64], max_d: usize) -> Vec<(PolyP, u32)> {
    let mut factors = distinct_irreducible_factors(fp, f, max_d);
    factors.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut out = Vec::with_capacity(factors.len());
    for q in factors {
        let mut mult = 0u32;
        let mut h = f.to_vec();
        loop {
            let (quo, rem) = pdivrem(fp, &h, &q);
            if rem.is_empty() {
                mult += 1;
                h = quo;
            } else {
                break;
            }
        }
        debug_assert!(mult > 0);
        out.push((q, mult));
    }
    out
}

pub fn is_irreducible_mod_p(fp: Fp, f: &[u64]) -> bool {
    let f = ptrim(f.to_vec());
    let d = match pdeg(&f) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    let fd = pderiv(fp, &f);
    if fd.is_empty() || pdeg(&pgcd(fp, &f, &fd)) != Some(0) {
        return d == 1; // inseparable or repeated factors
    }
    let fs = split_squarefree(fp, &pmake_monic(fp, &f), d);
    fs.len() == 1 && pdeg(&fs[0]) == Some(d)
}
