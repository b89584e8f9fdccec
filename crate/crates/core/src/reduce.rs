//! Deterministic parallel reductions.
//!
//! Every floating-point accumulation in this crate goes through one of the
//! helpers here. Terms are split into fixed-size chunks; each chunk is summed
//! sequentially with Neumaier compensation, and the per-chunk partials are
//! folded in a fixed pairwise tree. The chunk boundaries and the fold shape
//! depend only on the term count, never on the thread count, so results are
//! bit-identical whether rayon runs one worker or many.

use rayon::prelude::*;

/// Chunk length for all reductions. Changing this changes rounding at the
/// 1e-16 level and invalidates frozen expectations, so treat it as part of
/// the numeric contract.
pub const CHUNK: usize = 1 << 14;

/// Neumaier-compensated accumulator (Kahan with the branch that also
/// captures error when the incoming term dominates the running sum).
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn tree_fold(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        for pair in v.chunks(2) {
            next.push(if pair.len() == 2 { pair[0] + pair[1] } else { pair[0] });
        }
        v = next;
    }
    v[0]
}

/// Sum term(i) for i in 0..len.
pub fn chunked_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Neumaier::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(term(i));
            }
            acc.value()
        })
        .collect();
    tree_fold(partials)
}

/// Sum a K-vector of terms in one pass (used when several sums share the
/// same expensive per-ideal work).
pub fn chunked_sum_multi<const K: usize, F>(len: usize, term: F) -> [f64; K]
where
    F: Fn(usize) -> [f64; K] + Sync,
{
    let chunks = len.div_ceil(CHUNK);
    let mut partials: Vec<[f64; K]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [Neumaier::default(); K];
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                let t = term(i);
                for k in 0..K {
                    acc[k].add(t[k]);
                }
            }
            let mut out = [0.0; K];
            for k in 0..K {
                out[k] = acc[k].value();
            }
            out
        })
        .collect();
    if partials.is_empty() {
        return [0.0; K];
    }
    while partials.len() > 1 {
        let mut next = Vec::with_capacity(partials.len().div_ceil(2));
        for pair in partials.chunks(2) {
            if pair.len() == 2 {
                let mut s = [0.0; K];
                for k in 0..K {
                    s[k] = pair[0][k] + pair[1][k];
                }
                next.push(s);
            } else {
                next.push(pair[0]);
            }
        }
        partials = next;
    }
    partials[0]
}
