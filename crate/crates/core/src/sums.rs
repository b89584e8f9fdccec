//! Headline sums over an ideal table: the variance of the divisor-sieve
//! weights, the bilinear moebius-log form, the norm-weighted variant, the
//! four-part decomposition of the bilinear form, and the prime log sum.
//!
//! Every sum reduces through `reduce::chunked_sum*`, so reports are
//! bit-identical across thread counts.

use serde::Serialize;

use crate::arith::{
    delta, for_each_squarefree_divisor, mobius_log_tail, selberg_weight, von_mangoldt,
    WeightParams,
};
use crate::error::{Error, Result};
use crate::ideals::{merge_add, FactoredIdeal, IdealTable};
use crate::reduce::{chunked_sum, chunked_sum_multi};

/// Common report for the headline sums. For the bilinear form the two
/// truncation lengths are reported in the `w` and `y` slots.
#[derive(Clone, Debug, Serialize)]
pub struct SumReport {
    pub statement: String,
    pub x: f64,
    pub w: f64,
    pub y: f64,
    pub alpha: Option<f64>,
    pub lhs: f64,
    pub main: f64,
    pub residual: f64,
    pub normalized: f64,
    pub elapsed_ms: u64,
}

impl SumReport {
    pub fn csv_header() -> &'static str {
        "statement,x,w,y,alpha,lhs,main,residual,normalized,elapsed_ms"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.statement,
            self.x,
            self.w,
            self.y,
            self.alpha.map_or(String::new(), |a| a.to_string()),
            self.lhs,
            self.main,
            self.residual,
            self.normalized,
            self.elapsed_ms
        )
    }
}

fn check_range(table: &IdealTable, x: f64) -> Result<usize> {
    // x.is_nan() must land here too, so this is not `x < 1.0`
    if x.is_nan() || x < 1.0 {
        return Err(Error::ParamOrder);
    }
    if x > table.limit as f64 {
        return Err(Error::TableTooSmall {
            need: x.ceil() as u64,
            have: table.limit,
        });
    }
    Ok(table.index_norm_le(x.floor() as u64))
}

/// Variance of the divisor-sieve weights: sum over Nn <= x of Delta(n)^2,
/// against the main term x / log(y/w). The normalized residual is
/// (lhs - main) * log^2(y/w) / (x * c_beta0), the quantity the variance
/// statement bounds.
pub fn barban_vehov_sum(
    table: &IdealTable,
    x: f64,
    w: f64,
    y: f64,
    c_beta0: f64,
) -> Result<SumReport> {
    let params = WeightParams::new(w, y)?;
    if y > x {
        return Err(Error::ParamOrder);
    }
    let end = check_range(table, x)?;
    let lhs = chunked_sum(end, |i| {
        let d = delta(table, &table.ideals[i], &params);
        d * d
    });
    let main = x / params.log_ratio;
    let residual = lhs - main;
    let normalized = residual * params.log_ratio * params.log_ratio / (x * c_beta0);
    Ok(SumReport {
        statement: "thm1.1".into(),
        x,
        w,
        y,
        alpha: None,
        lhs,
        main,
        residual,
        normalized,
        elapsed_ms: 0,
    })
}

/// Independent evaluation of every Delta(n), Nn <= x, by sieving multiples:
/// each weighted divisor d scatters its weight onto all multiples d*m.
/// Quadratic-ish in table density, so meant for cross-checks, not production.
pub fn delta_by_multiples(table: &IdealTable, x: f64, params: &WeightParams) -> Result<Vec<f64>> {
    let end = check_range(table, x)?;
    let xi = x.floor() as u64;
    let mut deltas = vec![0.0f64; end];
    let dmax = (params.y.floor() as u64).min(xi);
    for di in 0..table.index_norm_le(dmax) {
        let d = &table.ideals[di];
        let lam = selberg_weight(d, params);
        if lam == 0.0 {
            continue;
        }
        let cofactor_max = xi / d.norm;
        for mi in 0..table.index_norm_le(cofactor_max) {
            let m = &table.ideals[mi];
            let prod = FactoredIdeal {
                norm: d.norm * m.norm,
                factors: merge_add(&d.factors, &m.factors),
            };
            let idx = table.find(&prod).expect("product stays inside the table");
            deltas[idx] += lam;
        }
    }
    Ok(deltas)
}

/// Bilinear form: sum over Nn <= x of Lambda_{z1}(n) Lambda_{z2}(n), where
/// Lambda_z is the divisor sum of the truncated moebius-log weight. Main
/// term x log(min(z1, z2)).
pub fn bilinear_sum(
    table: &IdealTable,
    x: f64,
    z1: f64,
    z2: f64,
    c_beta0: f64,
) -> Result<SumReport> {
    if !(z1 >= 1.0 && z2 >= 1.0) {
        return Err(Error::ParamOrder);
    }
    let end = check_range(table, x)?;
    let lhs = chunked_sum(end, |i| {
        let n = &table.ideals[i];
        let mut l1 = 0.0;
        let mut l2 = 0.0;
        for_each_squarefree_divisor(table, n, |mu, dnorm| {
            let d = dnorm as f64;
            if d <= z1 {
                l1 += mu as f64 * (z1 / d).ln();
            }
            if d <= z2 {
                l2 += mu as f64 * (z2 / d).ln();
            }
        });
        l1 * l2
    });
    let main = x * z1.min(z2).ln();
    let residual = lhs - main;
    let normalized = residual.abs() / (x * c_beta0);
    Ok(SumReport {
        statement: "thm1.3".into(),
        x,
        w: z1,
        y: z2,
        alpha: None,
        lhs,
        main,
        residual,
        normalized,
        elapsed_ms: 0,
    })
}

/// Norm-weighted variance: sum of Delta(n)^2 Nn^(1 - 2 alpha) for
/// alpha strictly between 1/2 and 1, against
/// main = (log(x/w) / log(y/w)) * x^(2 - 2 alpha). Normalized output is the
/// ratio lhs / (main * c_beta0), which the weighted statement bounds.
pub fn weighted_sum(
    table: &IdealTable,
    x: f64,
    w: f64,
    y: f64,
    alpha: f64,
    c_beta0: f64,
) -> Result<SumReport> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let params = WeightParams::new(w, y)?;
    if y > x {
        return Err(Error::ParamOrder);
    }
    let end = check_range(table, x)?;
    let ex = 1.0 - 2.0 * alpha;
    let lhs = chunked_sum(end, |i| {
        let n = &table.ideals[i];
        let d = delta(table, n, &params);
        d * d * (n.norm as f64).powf(ex)
    });
    let main = ((x / w).ln() / params.log_ratio) * x.powf(2.0 - 2.0 * alpha);
    let residual = lhs - main;
    let normalized = lhs / (main * c_beta0);
    Ok(SumReport {
        statement: "cor1.2".into(),
        x,
        w,
        y,
        alpha: Some(alpha),
        lhs,
        main,
        residual,
        normalized,
        elapsed_ms: 0,
    })
}

/// Four-part split of the bilinear form. For n != (1) the truncated weight
/// expands as Lambda_z(n) = Lambda(n) + A_z(n), where
/// A_z(n) = sum over divisors d | n with Nd > z of mu(d) log(Nd / z);
/// the unit ideal contributes log w log y on its own. Hence
/// B(x, w, y) = cross_term + s1 + s2 + s3 with
///   cross_term = log w log y,
///   s1 = sum over 1 < Nn <= x of Lambda(n)^2,
///   s2 = sum of Lambda(n) (A_w(n) + A_y(n)),
///   s3 = sum of A_w(n) A_y(n).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BilinearParts {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub cross_term: f64,
}

impl BilinearParts {
    pub fn total(&self) -> f64 {
        self.cross_term + self.s1 + self.s2 + self.s3
    }
}

pub fn bilinear_decomposition(
    table: &IdealTable,
    x: f64,
    w: f64,
    y: f64,
) -> Result<BilinearParts> {
    if !(w >= 1.0 && y >= 1.0) {
        return Err(Error::ParamOrder);
    }
    let end = check_range(table, x)?;
    let [s1, s2, s3] = chunked_sum_multi::<3, _>(end, |i| {
        let n = &table.ideals[i];
        if n.is_unit() {
            return [0.0; 3]; // unit term lives in cross_term
        }
        let lam = von_mangoldt(table, n);
        let aw = mobius_log_tail(table, n, w);
        let ay = mobius_log_tail(table, n, y);
        [lam * lam, lam * (aw + ay), aw * ay]
    });
    Ok(BilinearParts {
        s1,
        s2,
        s3,
        cross_term: w.ln() * y.ln(),
    })
}

/// Prime-counting companion: sum of log N(p) over prime ideals of norm <= q.
pub fn chebyshev_prime_log_sum(table: &IdealTable, q: u64) -> Result<f64> {
    if q > table.limit {
        return Err(Error::TableTooSmall {
            need: q,
            have: table.limit,
        });
    }
    let end = table.primes.partition_point(|r| r.norm <= q);
    Ok(chunked_sum(end, |i| (table.primes[i].norm as f64).ln()))
}

/// Truncated weight evaluated directly (decomposition cross-check).
pub fn truncated_weight(table: &IdealTable, n: &FactoredIdeal, z: f64) -> f64 {
    let mut acc = 0.0;
    for_each_squarefree_divisor(table, n, |mu, dnorm| {
        let d = dnorm as f64;
        if d <= z {
            acc += mu as f64 * (z / d).ln();
        }
    });
    acc
}
