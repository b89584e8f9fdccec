//! Prime ideals and the canonical table of all integral ideals of bounded
//! norm.
//!
//! Ideals are stored in fully factored form: a sorted list of
//! (prime id, exponent) pairs plus the cached 64-bit norm. Prime ids are
//! assigned in nondecreasing norm order (ties by p, f, e, insertion), so a
//! factor list sorted by id is also sorted by prime norm. The table itself
//! is sorted by (norm, factor sequence) and is immutable once built.

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::NumberField;

/// Default cap on the number of table entries.
pub const DEFAULT_MEMORY_BUDGET: usize = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeIdealRec {
    pub id: u32,
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub norm: u64,
}

pub type FactorList = SmallVec<[(u32, u32); 5]>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredIdeal {
    pub norm: u64,
    pub factors: FactorList,
}

impl FactoredIdeal {
    pub fn unit() -> FactoredIdeal {
        FactoredIdeal {
            norm: 1,
            factors: SmallVec::new(),
        }
    }

    pub fn prime(rec: &PrimeIdealRec) -> FactoredIdeal {
        FactoredIdeal {
            norm: rec.norm,
            factors: SmallVec::from_slice(&[(rec.id, 1)]),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Canonical ordering: by norm, then by the factor sequence.
    pub fn cmp_canonical(&self, other: &FactoredIdeal) -> std::cmp::Ordering {
        self.norm
            .cmp(&other.norm)
            .then_with(|| self.factors[..].cmp(&other.factors[..]))
    }
}

/// Segmented sieve of Eratosthenes.
pub fn rational_primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let mut base_sieve = vec![true; (root + 1) as usize];
    let mut base = Vec::new();
    for p in 2..=root {
        if base_sieve[p as usize] {
            base.push(p);
            let mut m = p * p;
            while m <= root {
                base_sieve[m as usize] = false;
                m += p;
            }
        }
    }
    let mut out: Vec<u64> = base.iter().copied().filter(|&p| p <= limit).collect();
    const SEG: u64 = 1 << 20;
    let mut lo = root + 1;
    let mut seg = vec![true; SEG as usize];
    while lo <= limit {
        let hi = (lo + SEG - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        for s in seg.iter_mut().take(len) {
            *s = true;
        }
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                seg[(m - lo) as usize] = false;
                m += p;
            }
        }
        for (i, &live) in seg.iter().enumerate().take(len) {
            if live {
                out.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    out
}

/// All prime ideals of norm <= limit, obtained by splitting every rational
/// prime p <= limit. Residue degrees above floor(log_p limit) are skipped
/// before factoring since their norms cannot fit under the limit.
pub fn generate_prime_ideals(field: &NumberField, limit: u64) -> Vec<PrimeIdealRec> {
    let rational = rational_primes_up_to(limit);
    let degree = field.degree() as usize;
    let mut recs: Vec<PrimeIdealRec> = rational
        .par_iter()
        .map(|&p| {
            let mut max_f = 0usize;
            let mut pf = 1u64;
            while max_f < degree && pf <= limit / p {
                pf *= p;
                max_f += 1;
            }
            let split = field.split_bounded(p, max_f);
            let mut local = Vec::new();
            for &(e, f) in &split.factors {
                let norm = p.pow(f);
                if norm <= limit {
                    local.push(PrimeIdealRec {
                        id: 0,
                        p,
                        e,
                        f,
                        norm,
                    });
                }
            }
            local
        })
        .flatten()
        .collect();
    recs.sort_by_key(|r| (r.norm, r.p, r.f, r.e));
    for (i, r) in recs.iter_mut().enumerate() {
        r.id = i as u32;
    }
    recs
}

/// Every integral ideal of norm <= limit, canonically sorted.
#[derive(Clone, Debug)]
pub struct IdealTable {
    pub poly: Vec<i64>,
    pub limit: u64,
    pub primes: Vec<PrimeIdealRec>,
    pub ideals: Vec<FactoredIdeal>,
}

pub fn enumerate_ideals(field: &NumberField, limit: u64, budget: usize) -> Result<IdealTable> {
    let primes = generate_prime_ideals(field, limit);
    let mut ideals = Vec::new();
    ideals.push(FactoredIdeal::unit());
    let mut stack: FactorList = SmallVec::new();
    extend(&primes, 0, 1, limit, budget, &mut stack, &mut ideals)?;
    ideals.par_sort_unstable_by(FactoredIdeal::cmp_canonical);
    Ok(IdealTable {
        poly: field.spec.coeffs.clone(),
        limit,
        primes,
        ideals,
    })
}

fn extend(
    primes: &[PrimeIdealRec],
    from: usize,
    norm: u64,
    limit: u64,
    budget: usize,
    stack: &mut FactorList,
    out: &mut Vec<FactoredIdeal>,
) -> Result<()> {
    for i in from..primes.len() {
        let np = primes[i].norm;
        if np > limit / norm {
            break; // norms are nondecreasing in id
        }
        let mut m = norm;
        stack.push((primes[i].id, 0));
        while m <= limit / np {
            m *= np;
            stack.last_mut().unwrap().1 += 1;
            if out.len() >= budget {
                return Err(Error::LimitTooLarge { limit, budget });
            }
            out.push(FactoredIdeal {
                norm: m,
                factors: stack.clone(),
            });
            extend(primes, i + 1, m, limit, budget, stack, out)?;
        }
        stack.pop();
    }
    Ok(())
}

impl IdealTable {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    /// Index just past the last ideal of norm <= q.
    pub fn index_norm_le(&self, q: u64) -> usize {
        self.ideals.partition_point(|n| n.norm <= q)
    }

    /// #{ideals of norm <= q}; q must not exceed the table limit.
    pub fn count_norm_le(&self, q: u64) -> Result<u64> {
        if q > self.limit {
            return Err(Error::TableTooSmall {
                need: q,
                have: self.limit,
            });
        }
        Ok(self.index_norm_le(q) as u64)
    }

    pub fn find(&self, ideal: &FactoredIdeal) -> Option<usize> {
        self.ideals
            .binary_search_by(|probe| probe.cmp_canonical(ideal))
            .ok()
    }

    pub fn prime_norm(&self, id: u32) -> u64 {
        self.primes[id as usize].norm
    }

    /// Cheap table-membership sanity check: ids in range, sorted, nonzero
    /// exponents, and the cached norm consistent with the prime table.
    pub fn validate(&self, n: &FactoredIdeal) -> Result<()> {
        let mut norm = 1u64;
        let mut last: Option<u32> = None;
        for &(id, e) in &n.factors {
            if e == 0 || id as usize >= self.primes.len() {
                return Err(Error::FieldMismatch);
            }
            if last.is_some_and(|l| id <= l) {
                return Err(Error::FieldMismatch);
            }
            last = Some(id);
            for _ in 0..e {
                norm = norm
                    .checked_mul(self.primes[id as usize].norm)
                    .ok_or(Error::NormOverflow)?;
            }
        }
        if norm != n.norm {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn product(&self, a: &FactoredIdeal, b: &FactoredIdeal) -> Result<FactoredIdeal> {
        self.validate(a)?;
        self.validate(b)?;
        let norm = a.norm.checked_mul(b.norm).ok_or(Error::NormOverflow)?;
        Ok(FactoredIdeal {
            norm,
            factors: merge_add(&a.factors, &b.factors),
        })
    }

    pub fn gcd(&self, a: &FactoredIdeal, b: &FactoredIdeal) -> Result<FactoredIdeal> {
        self.validate(a)?;
        self.validate(b)?;
        let mut factors: FactorList = SmallVec::new();
        let mut norm = 1u64;
        let (mut i, mut j) = (0, 0);
        while i < a.factors.len() && j < b.factors.len() {
            let (ia, ea) = a.factors[i];
            let (ib, eb) = b.factors[j];
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let e = ea.min(eb);
                    factors.push((ia, e));
                    norm *= self.prime_norm(ia).pow(e);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(FactoredIdeal { norm, factors })
    }

    pub fn lcm(&self, a: &FactoredIdeal, b: &FactoredIdeal) -> Result<FactoredIdeal> {
        self.validate(a)?;
        self.validate(b)?;
        let factors = merge_max(&a.factors, &b.factors);
        let mut norm = 1u64;
        for &(id, e) in &factors {
            for _ in 0..e {
                norm = norm
                    .checked_mul(self.prime_norm(id))
                    .ok_or(Error::NormOverflow)?;
            }
        }
        Ok(FactoredIdeal { norm, factors })
    }

    pub fn divides(&self, d: &FactoredIdeal, n: &FactoredIdeal) -> Result<bool> {
        self.validate(d)?;
        self.validate(n)?;
        let mut j = 0;
        for &(id, e) in &d.factors {
            while j < n.factors.len() && n.factors[j].0 < id {
                j += 1;
            }
            if j >= n.factors.len() || n.factors[j].0 != id || n.factors[j].1 < e {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn coprime(&self, a: &FactoredIdeal, b: &FactoredIdeal) -> Result<bool> {
        self.validate(a)?;
        self.validate(b)?;
        let (mut i, mut j) = (0, 0);
        while i < a.factors.len() && j < b.factors.len() {
            match a.factors[i].0.cmp(&b.factors[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Ok(false),
            }
        }
        Ok(true)
    }

    /// All divisors of n in odometer order (unit first, n last).
    pub fn divisors<'a>(&'a self, n: &'a FactoredIdeal) -> Divisors<'a> {
        Divisors {
            table: self,
            base: n,
            counters: vec![0; n.factors.len()],
            done: false,
        }
    }
}

/// Exponent-wise disjoint-union merge used internally by sums; callers must
/// pass factor lists from the same table.
pub fn merge_add(a: &FactorList, b: &FactorList) -> FactorList {
    let mut out: FactorList = SmallVec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

fn merge_max(a: &FactorList, b: &FactorList) -> FactorList {
    let mut out: FactorList = SmallVec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1.max(b[j].1)));
            i += 1;
            j += 1;
        }
    }
    out
}

pub struct Divisors<'a> {
    table: &'a IdealTable,
    base: &'a FactoredIdeal,
    counters: Vec<u32>,
    done: bool,
}

impl<'a> Iterator for Divisors<'a> {
    type Item = FactoredIdeal;

    fn next(&mut self) -> Option<FactoredIdeal> {
        if self.done {
            return None;
        }
        let mut factors: FactorList = SmallVec::new();
        let mut norm = 1u64;
        for (slot, &c) in self.counters.iter().enumerate() {
            if c > 0 {
                let id = self.base.factors[slot].0;
                factors.push((id, c));
                norm *= self.table.prime_norm(id).pow(c);
            }
        }
        // odometer increment
        let mut slot = 0;
        loop {
            if slot == self.counters.len() {
                self.done = true;
                break;
            }
            if self.counters[slot] < self.base.factors[slot].1 {
                self.counters[slot] += 1;
                break;
            }
            self.counters[slot] = 0;
            slot += 1;
        }
        Some(FactoredIdeal { norm, factors })
    }
}
