//! Arithmetic functions on factored ideals and the divisor-sieve weights.
//!
//! Everything here works off a factor list plus the owning table's prime
//! records, so each evaluation is O(number of prime factors) with no
//! factoring. Squarefree-divisor walks are depth-first, excluding each prime
//! before including it, which fixes the term order for the deterministic
//! reductions downstream.

use crate::error::{Error, Result};
use crate::ideals::{FactoredIdeal, IdealTable};

/// Moebius function: 0 unless squarefree, otherwise parity of the factor count.
pub fn moebius(n: &FactoredIdeal) -> i32 {
    if n.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if n.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Ideal totient: product over prime powers q^e || n of q^(e-1) (q - 1).
pub fn euler_phi(table: &IdealTable, n: &FactoredIdeal) -> u64 {
    let mut acc = 1u64;
    for &(id, e) in &n.factors {
        let q = table.prime_norm(id);
        acc *= q.pow(e - 1) * (q - 1);
    }
    acc
}

/// Multiplicative companion of the totient: q^(e-1) (q + 1) per prime power.
pub fn kappa(table: &IdealTable, n: &FactoredIdeal) -> u64 {
    let mut acc = 1u128;
    for &(id, e) in &n.factors {
        let q = table.prime_norm(id) as u128;
        acc *= q.pow(e - 1) * (q + 1);
    }
    u64::try_from(acc).expect("kappa exceeds u64; table limit is far above support")
}

/// Number of divisors.
pub fn divisor_count(n: &FactoredIdeal) -> u64 {
    n.factors.iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Liouville function: (-1)^(total exponent count).
pub fn liouville(n: &FactoredIdeal) -> i32 {
    let omega: u32 = n.factors.iter().map(|&(_, e)| e).sum();
    if omega.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sum of a-th powers of divisor norms, evaluated blockwise per prime power
/// by direct powering.
pub fn sigma(table: &IdealTable, n: &FactoredIdeal, a: f64) -> f64 {
    let mut acc = 1.0f64;
    for &(id, e) in &n.factors {
        let q = table.prime_norm(id) as f64;
        let mut block = 0.0;
        for j in 0..=e {
            block += q.powf(j as f64 * a);
        }
        acc *= block;
    }
    acc
}

/// von Mangoldt weight: log of the prime norm on prime powers, else zero.
pub fn von_mangoldt(table: &IdealTable, n: &FactoredIdeal) -> f64 {
    if n.factors.len() == 1 {
        (table.prime_norm(n.factors[0].0) as f64).ln()
    } else {
        0.0
    }
}

/// Parameters of the truncated logarithmic weight: 1 below w, a log ramp
/// from w to y, 0 above y.
#[derive(Clone, Copy, Debug)]
pub struct WeightParams {
    pub w: f64,
    pub y: f64,
    pub log_ratio: f64,
}

impl WeightParams {
    pub fn new(w: f64, y: f64) -> Result<WeightParams> {
        if !(w >= 1.0 && y > w) {
            return Err(Error::ParamOrder);
        }
        Ok(WeightParams {
            w,
            y,
            log_ratio: (y / w).ln(),
        })
    }
}

/// The ramp itself, as a function of the norm.
pub fn m_weight(d: f64, params: &WeightParams) -> f64 {
    if d <= params.w {
        1.0
    } else if d <= params.y {
        (params.y / d).ln() / params.log_ratio
    } else {
        0.0
    }
}

/// Divisor-sieve weight attached to d: moebius(d) * m(Nd).
pub fn selberg_weight(d: &FactoredIdeal, params: &WeightParams) -> f64 {
    let mu = moebius(d);
    if mu == 0 {
        return 0.0;
    }
    mu as f64 * m_weight(d.norm as f64, params)
}

/// Truncated moebius-log weight: moebius(d) * log(z / Nd) for Nd <= z, else 0.
pub fn mobius_log_weight(d: &FactoredIdeal, z: f64) -> f64 {
    let mu = moebius(d);
    if mu == 0 || (d.norm as f64) > z {
        return 0.0;
    }
    mu as f64 * (z / d.norm as f64).ln()
}

/// Walk the squarefree divisors of n depth-first (exclude the current prime
/// first, then include it), reporting moebius sign and norm. The unit divisor
/// is visited first and n's radical last.
pub fn for_each_squarefree_divisor<F>(table: &IdealTable, n: &FactoredIdeal, mut visit: F)
where
    F: FnMut(i32, u64),
{
    fn walk<F: FnMut(i32, u64)>(
        table: &IdealTable,
        factors: &[(u32, u32)],
        idx: usize,
        mu: i32,
        norm: u64,
        visit: &mut F,
    ) {
        if idx == factors.len() {
            visit(mu, norm);
            return;
        }
        walk(table, factors, idx + 1, mu, norm, visit);
        let q = table.prime_norm(factors[idx].0);
        walk(table, factors, idx + 1, -mu, norm * q, visit);
    }
    walk(table, &n.factors, 0, 1, 1, &mut visit);
}

/// Sieve-weighted divisor sum: sum of selberg weights over divisors of n.
/// Only squarefree divisors contribute.
pub fn delta(table: &IdealTable, n: &FactoredIdeal, params: &WeightParams) -> f64 {
    let mut acc = 0.0;
    for_each_squarefree_divisor(table, n, |mu, dnorm| {
        acc += mu as f64 * m_weight(dnorm as f64, params);
    });
    acc
}

/// Divisor sum of the truncated moebius-log weight. For z >= Nn this
/// telescopes to the von Mangoldt weight of n (log z at the unit ideal).
pub fn mobius_log_divisor_sum(table: &IdealTable, n: &FactoredIdeal, z: f64) -> f64 {
    let mut acc = 0.0;
    for_each_squarefree_divisor(table, n, |mu, dnorm| {
        let d = dnorm as f64;
        if d <= z {
            acc += mu as f64 * (z / d).ln();
        }
    });
    acc
}

/// Upper tail of the moebius-log divisor sum: squarefree divisors with
/// Nd > z weighted by moebius(d) * log(Nd / z).
pub fn mobius_log_tail(table: &IdealTable, n: &FactoredIdeal, z: f64) -> f64 {
    let mut acc = 0.0;
    for_each_squarefree_divisor(table, n, |mu, dnorm| {
        let d = dnorm as f64;
        if d > z {
            acc += mu as f64 * (d / z).ln();
        }
    });
    acc
}
