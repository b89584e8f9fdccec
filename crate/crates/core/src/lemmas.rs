//! Brute-force verification harness for the supporting estimates.
//!
//! Each check evaluates its left-hand side termwise over the ideal table at
//! every grid point (full prefix rescan, so an independent oracle can
//! reproduce the floating-point result bit for bit), subtracts the analytic
//! main term, and grades the residuals two ways: a fitted decay exponent
//! against the predicted power saving, and a magnitude band against a
//! checked-in baseline of observed constants.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, kappa, moebius};
use crate::constants::SiegelPolicy;
use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::ideals::{FactoredIdeal, IdealTable};
use crate::reduce::{chunked_sum, chunked_sum_multi};

pub type BigRational = Ratio<BigInt>;

/// Per-check verification report. `exponent` is absent when the residuals
/// are too degenerate to fit (e.g. identically zero).
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub field: String,
    pub grid: Vec<u64>,
    pub lhs: Vec<f64>,
    pub main: Vec<f64>,
    pub residual: Vec<f64>,
    pub exponent: Option<f64>,
    pub pass: bool,
    /// Largest banded metric observed in this run; feeds baseline
    /// regeneration and stays out of the serialized report.
    #[serde(skip)]
    pub band_metric_max: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TrendFit {
    pub slope: f64,
    /// max over grid points of |residual| / Q^slope.
    pub band: f64,
}

/// Least-squares slope of log|residual| against log Q. Needs at least four
/// nonzero residuals; fewer means the residuals are (numerically) exact and
/// there is no decay to fit.
pub fn residual_trend(grid: &[u64], residual: &[f64]) -> Result<TrendFit> {
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(residual)
        .filter(|&(_, r)| *r != 0.0)
        .map(|(&q, &r)| ((q as f64).ln(), r.abs().ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::DegenerateResiduals);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    let band = grid
        .iter()
        .zip(residual)
        .map(|(&q, &r)| r.abs() / (q as f64).powf(slope))
        .fold(0.0f64, f64::max);
    Ok(TrendFit { slope, band })
}

/// Observed band constants, keyed by "field label|lemma label".
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Baseline {
    pub version: u32,
    pub bands: BTreeMap<String, f64>,
}

impl Baseline {
    /// Bands shipped with the crate, regenerated via the CLI's
    /// `verify --all --write-baseline`.
    pub fn builtin() -> Baseline {
        serde_json::from_str(include_str!("../data/baseline.json"))
            .expect("embedded baseline parses")
    }

    pub fn empty() -> Baseline {
        Baseline {
            version: 1,
            bands: BTreeMap::new(),
        }
    }

    pub fn from_reader<R: std::io::Read>(r: R) -> Result<Baseline> {
        Ok(serde_json::from_reader(r)?)
    }

    pub fn band(&self, field: &str, lemma: &str) -> Option<f64> {
        self.bands.get(&format!("{field}|{lemma}")).copied()
    }

    pub fn record(&mut self, field: &str, lemma: &str, observed: f64) {
        // double the observed constant for headroom; floor away exact zeros
        let band = (observed * 2.0).max(1e-9);
        self.bands.insert(format!("{field}|{lemma}"), band);
    }
}

/// Everything a check needs: the table, the field's analytic constants, the
/// zero policy and the band baseline.
pub struct LemmaCtx<'a> {
    pub field: &'a NumberField,
    pub table: &'a IdealTable,
    pub s_k: f64,
    pub zeta2: f64,
    pub policy: SiegelPolicy,
    pub baseline: &'a Baseline,
}

/// Default grid: half-decade steps from 10^3 up to `max`, truncated to the
/// table limit.
pub fn default_grid(limit: u64, max: u64) -> Vec<u64> {
    const STEPS: [u64; 7] = [1_000, 3_162, 10_000, 31_623, 100_000, 316_228, 1_000_000];
    let cap = limit.min(max);
    STEPS.iter().copied().filter(|&q| q <= cap).collect()
}

/// Grid ceiling for the cheap counting-style scans.
pub const GRID_MAX_COUNTING: u64 = 1_000_000;
/// Grid ceiling for the heavier per-term checks.
pub const GRID_MAX_DEFAULT: u64 = 100_000;

impl<'a> LemmaCtx<'a> {
    pub fn new(
        field: &'a NumberField,
        table: &'a IdealTable,
        s_k: f64,
        zeta2: f64,
        policy: SiegelPolicy,
        baseline: &'a Baseline,
    ) -> LemmaCtx<'a> {
        LemmaCtx {
            field,
            table,
            s_k,
            zeta2,
            policy,
            baseline,
        }
    }

    fn check_grid(&self, grid: &[u64]) -> Result<()> {
        if grid.is_empty() {
            return Err(Error::ParamOrder);
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::ParamOrder);
        }
        let last = *grid.last().unwrap();
        if last > self.table.limit {
            return Err(Error::TableTooSmall {
                need: last,
                have: self.table.limit,
            });
        }
        Ok(())
    }

    /// Full prefix scan of `term` at every grid point.
    fn prefix_scan<F>(&self, grid: &[u64], term: F) -> Vec<f64>
    where
        F: Fn(&FactoredIdeal, f64) -> f64 + Sync,
    {
        grid.iter()
            .map(|&q| {
                let end = self.table.index_norm_le(q);
                let qf = q as f64;
                chunked_sum(end, |i| term(&self.table.ideals[i], qf))
            })
            .collect()
    }

    fn prefix_scan_multi<const K: usize, F>(&self, grid: &[u64], term: F) -> Vec<[f64; K]>
    where
        F: Fn(&FactoredIdeal, f64) -> [f64; K] + Sync,
    {
        grid.iter()
            .map(|&q| {
                let end = self.table.index_norm_le(q);
                let qf = q as f64;
                chunked_sum_multi::<K, _>(end, |i| term(&self.table.ideals[i], qf))
            })
            .collect()
    }

    /// Assemble a report: residuals, fitted exponent, band check, pass.
    /// `exponent_limit` already includes the universal +0.15 slack;
    /// `metric` is the banded quantity (compared against the baseline);
    /// `extra_ok` carries any check-specific structural condition.
    #[allow(clippy::too_many_arguments)]
    fn finalize(
        &self,
        lemma: String,
        grid: &[u64],
        lhs: Vec<f64>,
        main: Vec<f64>,
        exponent_limit: Option<f64>,
        metric: Vec<f64>,
        extra_ok: bool,
    ) -> LemmaReport {
        let residual: Vec<f64> = lhs.iter().zip(&main).map(|(l, m)| l - m).collect();
        let exponent = residual_trend(grid, &residual).ok().map(|f| f.slope);
        // decay exponents are asymptotic statements; gate on them only when
        // the grid spans at least three decades, otherwise the fit is
        // transient-dominated and the baseline band does the grading
        let wide = grid.last().unwrap_or(&1) / grid.first().unwrap_or(&1) >= 999;
        let slope_ok = match (exponent_limit, exponent) {
            (Some(limit), Some(slope)) if wide => slope <= limit,
            _ => true,
        };
        let metric_max = metric.iter().copied().fold(0.0f64, f64::max);
        let field_label = self.field.label();
        let band_ok = match self.baseline.band(&field_label, &lemma) {
            Some(band) => metric_max <= band,
            None => true, // no baseline for this field: grade on trend alone
        };
        LemmaReport {
            lemma,
            field: field_label,
            grid: grid.to_vec(),
            lhs,
            main,
            residual,
            exponent,
            pass: slope_ok && band_ok && extra_ok,
            band_metric_max: metric_max,
        }
    }

    fn power_frac(&self) -> f64 {
        1.0 - 1.0 / self.field.degree() as f64
    }

    /// Ideal counting against s_k Q.
    pub fn check_counting(&self, grid: &[u64]) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        let lhs = self.prefix_scan(grid, |_, _| 1.0);
        let main: Vec<f64> = grid.iter().map(|&q| self.s_k * q as f64).collect();
        let e = self.power_frac();
        let metric = band_metric(grid, &lhs, &main, e, 0);
        Ok(self.finalize("3.1".into(), grid, lhs, main, Some(e + 0.15), metric, true))
    }

    /// Partial sums of Nn^(-a), 0 < a <= 1, against the three-case main term.
    pub fn check_power(&self, grid: &[u64], a: f64) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::AOutOfRange(a));
        }
        let n_k = self.field.degree() as f64;
        let boundary = self.power_frac();
        let lhs = self.prefix_scan(grid, |n, _| (n.norm as f64).powf(-a));
        let (label, main, limit, metric): (String, Vec<f64>, f64, Vec<f64>) =
            if (a - 1.0).abs() < 1e-12 {
                let main: Vec<f64> = grid.iter().map(|&q| self.s_k * (q as f64).ln()).collect();
                let metric = band_metric(grid, &lhs, &main, 0.0, 0);
                ("3.2[a=1]".into(), main, 0.15, metric)
            } else if boundary > 0.0 && (a - boundary).abs() < 1e-12 {
                let main: Vec<f64> = grid
                    .iter()
                    .map(|&q| self.s_k * n_k * (q as f64).powf(1.0 / n_k))
                    .collect();
                let metric = band_metric(grid, &lhs, &main, 0.0, 1);
                ("3.2[a=bdry]".into(), main, 0.15, metric)
            } else {
                let main: Vec<f64> = grid
                    .iter()
                    .map(|&q| self.s_k / (1.0 - a) * (q as f64).powf(1.0 - a))
                    .collect();
                let e = (1.0 - 1.0 / n_k - a).max(0.0);
                let metric = band_metric(grid, &lhs, &main, e, 0);
                (format!("3.2[a={a}]"), main, e + 0.15, metric)
            };
        Ok(self.finalize(label, grid, lhs, main, Some(limit), metric, true))
    }

    /// Log-weighted power sums at the critical exponent a = 1 - 1/n_k,
    /// against s_k n_k^2 Q^(1/n_k). Degenerate for degree one.
    pub fn check_logpower(&self, grid: &[u64]) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        if self.field.degree() == 1 {
            return Err(Error::DegreeOne);
        }
        let n_k = self.field.degree() as f64;
        let a = self.power_frac();
        let lhs = self.prefix_scan(grid, |n, q| {
            let nn = n.norm as f64;
            (q / nn).ln() / nn.powf(a)
        });
        let main: Vec<f64> = grid
            .iter()
            .map(|&q| self.s_k * n_k * n_k * (q as f64).powf(1.0 / n_k))
            .collect();
        let metric = band_metric(grid, &lhs, &main, 0.0, 2);
        Ok(self.finalize("3.3".into(), grid, lhs, main, Some(0.15), metric, true))
    }

    /// First and second moments of sigma_a, a < 0: the first is dominated by
    /// the second termwise, and the second is O(Q).
    pub fn check_sigma_sums(&self, grid: &[u64], a: f64) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        if a >= 0.0 {
            return Err(Error::AOutOfRange(a));
        }
        let pairs = self.prefix_scan_multi::<2, _>(grid, |n, _| {
            let s = crate::arith::sigma(self.table, n, a);
            [s, s * s]
        });
        let lhs1: Vec<f64> = pairs.iter().map(|p| p[0]).collect();
        let lhs2: Vec<f64> = pairs.iter().map(|p| p[1]).collect();
        let main = vec![0.0; grid.len()];
        let ratios: Vec<f64> = grid
            .iter()
            .zip(&lhs2)
            .map(|(&q, &l)| l / q as f64)
            .collect();
        // termwise domination is exact; the ratio may wobble but must not
        // grow more than 10% step to step
        let dominated = lhs1.iter().zip(&lhs2).all(|(a1, a2)| a1 <= a2);
        let nonexpanding = ratios.windows(2).all(|w| w[1] <= 1.1 * w[0]);
        Ok(self.finalize(
            format!("3.4[a={a}]"),
            grid,
            lhs2,
            main,
            Some(1.15),
            ratios,
            dominated && nonexpanding,
        ))
    }

    /// The two truncated-log sums: Σ 1/(Nn log^2(2Q/Nn)) = O(1) and
    /// Σ sigma_a^2(n)/(Nn^b log^2(2Q/Nn)) = O(Q^(1-b)).
    pub fn check_loginv(&self, grid: &[u64], a: f64, b: f64) -> Result<Vec<LemmaReport>> {
        self.check_grid(grid)?;
        if a >= 0.0 {
            return Err(Error::AOutOfRange(a));
        }
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::AOutOfRange(b));
        }
        let pairs = self.prefix_scan_multi::<2, _>(grid, |n, q| {
            let nn = n.norm as f64;
            let lg = (2.0 * q / nn).ln();
            let s = crate::arith::sigma(self.table, n, a);
            [1.0 / (nn * lg * lg), s * s / (nn.powf(b) * lg * lg)]
        });
        let lhs1: Vec<f64> = pairs.iter().map(|p| p[0]).collect();
        let lhs2: Vec<f64> = pairs.iter().map(|p| p[1]).collect();
        let main = vec![0.0; grid.len()];
        let first = self.finalize(
            "3.5a".into(),
            grid,
            lhs1.clone(),
            main.clone(),
            Some(0.15),
            lhs1,
            true,
        );
        let metric2: Vec<f64> = grid
            .iter()
            .zip(&lhs2)
            .map(|(&q, &l)| l / (q as f64).powf(1.0 - b))
            .collect();
        let second = self.finalize(
            format!("3.5b[a={a},b={b}]"),
            grid,
            lhs2,
            main,
            Some(1.0 - b + 0.15),
            metric2,
            true,
        );
        Ok(vec![first, second])
    }

    /// Exact-rational sum of mu^2(n)/phi(n) up to each grid point.
    pub fn muandphi_exact_prefixes(&self, grid: &[u64]) -> Vec<BigRational> {
        let mut cuts = vec![0usize];
        for &q in grid {
            cuts.push(self.table.index_norm_le(q));
        }
        let mut out = Vec::with_capacity(grid.len());
        let mut acc: BigRational = Zero::zero();
        for w in cuts.windows(2) {
            acc += rational_phi_sum(self.table, w[0], w[1]);
            out.push(acc.clone());
        }
        out
    }

    /// Σ mu^2/phi against s_k log Q; summands are rational so the LHS is
    /// accumulated exactly and converted once per grid point.
    pub fn check_muandphi(&self, grid: &[u64]) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        let lhs: Vec<f64> = self
            .muandphi_exact_prefixes(grid)
            .iter()
            .map(|r| r.to_f64().expect("prefix sum fits in f64"))
            .collect();
        let main: Vec<f64> = grid.iter().map(|&q| self.s_k * (q as f64).ln()).collect();
        let metric = band_metric(grid, &lhs, &main, 0.0, 0);
        Ok(self.finalize("3.6".into(), grid, lhs, main, Some(0.15), metric, true))
    }

    /// Squarefree counting against (s_k / zeta_k(2)) Q.
    pub fn check_sqfrc(&self, grid: &[u64]) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        let lhs = self.prefix_scan(grid, |n, _| if moebius(n) == 0 { 0.0 } else { 1.0 });
        let main: Vec<f64> = grid
            .iter()
            .map(|&q| self.s_k / self.zeta2 * q as f64)
            .collect();
        // the stated saving is 1/n_k (up to epsilon at degree 2); degree one
        // really has a square-root saving, which max() also covers
        let e = self.power_frac().max(0.5);
        let metric = band_metric(grid, &lhs, &main, e, 0);
        Ok(self.finalize("3.7".into(), grid, lhs, main, Some(e + 0.15), metric, true))
    }

    /// Squarefree counting restricted to ideals coprime to r, against
    /// (s_k / zeta_k(2)) (Nr / kappa(r)) Q.
    pub fn check_coprime_sqfr(
        &self,
        grid: &[u64],
        r: &FactoredIdeal,
        r_label: &str,
    ) -> Result<LemmaReport> {
        self.check_grid(grid)?;
        self.table.validate(r)?;
        if moebius(r) == 0 {
            return Err(Error::RNotSquarefree);
        }
        let scale = r.norm as f64 / kappa(self.table, r) as f64;
        let lhs = self.prefix_scan(grid, |n, _| {
            if moebius(n) != 0 && disjoint_support(n, r) {
                1.0
            } else {
                0.0
            }
        });
        let main: Vec<f64> = grid
            .iter()
            .map(|&q| self.s_k / self.zeta2 * scale * q as f64)
            .collect();
        let e = self.power_frac().max(0.5);
        let metric = band_metric(grid, &lhs, &main, e, 0);
        Ok(self.finalize(
            format!("3.8[r={r_label}]"),
            grid,
            lhs,
            main,
            Some(e + 0.15),
            metric,
            true,
        ))
    }

    /// The three unrestricted Moebius decay statements: M(Q)/Q -> 0,
    /// m(Q) -> 0, and l(Q) -> -1/s_k, all under the no-exceptional-zero
    /// policy.
    pub fn check_mobius_sums(&self, grid: &[u64]) -> Result<Vec<LemmaReport>> {
        self.check_grid(grid)?;
        if !self.policy.assume_none {
            return Err(Error::SiegelConfigured);
        }
        let triples = self.prefix_scan_multi::<3, _>(grid, |n, _| {
            let mu = moebius(n) as f64;
            if mu == 0.0 {
                return [0.0; 3];
            }
            let nn = n.norm as f64;
            [mu, mu / nn, mu * nn.ln() / nn]
        });
        let mut out = Vec::with_capacity(3);
        // M(Q): main 0, decays faster than Q / any log power
        let lhs: Vec<f64> = triples.iter().map(|t| t[0]).collect();
        let metric: Vec<f64> = grid
            .iter()
            .zip(&lhs)
            .map(|(&q, &l)| l.abs() / q as f64)
            .collect();
        let decays = metric.last() <= metric.first();
        out.push(self.finalize(
            "3.12a".into(),
            grid,
            lhs,
            vec![0.0; grid.len()],
            Some(1.15),
            metric,
            decays,
        ));
        // m(Q): main 0, absolute decay
        let lhs: Vec<f64> = triples.iter().map(|t| t[1]).collect();
        let metric: Vec<f64> = lhs.iter().map(|l| l.abs()).collect();
        let decays = metric.last() <= metric.first();
        out.push(self.finalize(
            "3.12b".into(),
            grid,
            lhs,
            vec![0.0; grid.len()],
            Some(0.15),
            metric,
            decays,
        ));
        // l(Q): main -1/s_k
        let lhs: Vec<f64> = triples.iter().map(|t| t[2]).collect();
        let main = vec![-1.0 / self.s_k; grid.len()];
        let metric: Vec<f64> = lhs.iter().zip(&main).map(|(l, m)| (l - m).abs()).collect();
        let decays = metric.last() <= metric.first();
        out.push(self.finalize("3.12c".into(), grid, lhs, main, Some(0.15), metric, decays));
        Ok(out)
    }

    fn coprime_mobius_common(&self, grid: &[u64], r: &FactoredIdeal) -> Result<()> {
        self.check_grid(grid)?;
        self.table.validate(r)?;
        if moebius(r) == 0 {
            return Err(Error::RNotSquarefree);
        }
        if !self.policy.assume_none {
            return Err(Error::SiegelConfigured);
        }
        Ok(())
    }

    /// Σ_{(n,r)=1} mu(n)/Nn log(Q/Nn) against Nr/(s_k phi(r)).
    pub fn check_coprime_mobius_log(
        &self,
        grid: &[u64],
        r: &FactoredIdeal,
        r_label: &str,
    ) -> Result<LemmaReport> {
        self.coprime_mobius_common(grid, r)?;
        let lhs = self.prefix_scan(grid, |n, q| {
            let mu = moebius(n) as f64;
            if mu == 0.0 || !disjoint_support(n, r) {
                return 0.0;
            }
            let nn = n.norm as f64;
            mu / nn * (q / nn).ln()
        });
        let target = r.norm as f64 / (self.s_k * euler_phi(self.table, r) as f64);
        let main = vec![target; grid.len()];
        let metric: Vec<f64> = lhs.iter().map(|l| (l - target).abs()).collect();
        let decays = relaxed_decay(&metric);
        Ok(self.finalize(
            format!("3.13[r={r_label}]"),
            grid,
            lhs,
            main,
            Some(0.15),
            metric,
            decays,
        ))
    }

    /// Σ_{(n,r)=1} mu(n)/kappa(n) log(Q/Nn) against
    /// (kappa(r)/Nr) (zeta_k(2)/s_k).
    pub fn check_coprime_mobius_kappa_log(
        &self,
        grid: &[u64],
        r: &FactoredIdeal,
        r_label: &str,
    ) -> Result<LemmaReport> {
        self.coprime_mobius_common(grid, r)?;
        let lhs = self.prefix_scan(grid, |n, q| {
            let mu = moebius(n) as f64;
            if mu == 0.0 || !disjoint_support(n, r) {
                return 0.0;
            }
            mu / kappa(self.table, n) as f64 * (q / n.norm as f64).ln()
        });
        let target = kappa(self.table, r) as f64 / r.norm as f64 * self.zeta2 / self.s_k;
        let main = vec![target; grid.len()];
        let metric: Vec<f64> = lhs.iter().map(|l| (l - target).abs()).collect();
        let decays = relaxed_decay(&metric);
        Ok(self.finalize(
            format!("3.14[r={r_label}]"),
            grid,
            lhs,
            main,
            Some(0.15),
            metric,
            decays,
        ))
    }

    /// Σ_{(n,r)=1} mu(n)/kappa(n): pure decay, main term zero.
    pub fn check_coprime_mobius_kappa(
        &self,
        grid: &[u64],
        r: &FactoredIdeal,
        r_label: &str,
    ) -> Result<LemmaReport> {
        self.coprime_mobius_common(grid, r)?;
        let lhs = self.prefix_scan(grid, |n, _| {
            let mu = moebius(n) as f64;
            if mu == 0.0 || !disjoint_support(n, r) {
                return 0.0;
            }
            mu / kappa(self.table, n) as f64
        });
        let main = vec![0.0; grid.len()];
        let metric: Vec<f64> = lhs.iter().map(|l| l.abs()).collect();
        let decays = relaxed_decay(&metric);
        Ok(self.finalize(
            format!("3.15[r={r_label}]"),
            grid,
            lhs,
            main,
            Some(0.15),
            metric,
            decays,
        ))
    }

    /// The r arguments exercised by the battery: the unit ideal and the
    /// smallest prime ideal.
    fn battery_moduli(&self) -> Vec<(FactoredIdeal, &'static str)> {
        let mut out = vec![(FactoredIdeal::unit(), "1")];
        if let Some(rec) = self.table.primes.first() {
            out.push((FactoredIdeal::prime(rec), "pmin"));
        }
        out
    }

    /// Run one lemma by label, with battery parameter choices.
    pub fn verify_lemma(&self, id: &str, grid: &[u64]) -> Result<Vec<LemmaReport>> {
        match id {
            "3.1" => Ok(vec![self.check_counting(grid)?]),
            "3.2" => {
                let mut out = vec![self.check_power(grid, 1.0)?];
                if self.field.degree() >= 2 {
                    out.push(self.check_power(grid, self.power_frac())?);
                }
                out.push(self.check_power(grid, 0.3)?);
                Ok(out)
            }
            "3.3" => Ok(vec![self.check_logpower(grid)?]),
            "3.4" => Ok(vec![self.check_sigma_sums(grid, -0.5)?]),
            "3.5" => {
                let mut out = self.check_loginv(grid, -0.5, 1.0)?;
                let more = self.check_loginv(grid, -0.5, 0.5)?;
                out.extend(more.into_iter().skip(1)); // 3.5a does not depend on b
                Ok(out)
            }
            "3.6" => Ok(vec![self.check_muandphi(grid)?]),
            "3.7" => Ok(vec![self.check_sqfrc(grid)?]),
            "3.8" => {
                let mut out = Vec::new();
                for (r, label) in self.battery_moduli() {
                    if label == "1" {
                        continue; // coincides with 3.7
                    }
                    out.push(self.check_coprime_sqfr(grid, &r, label)?);
                }
                Ok(out)
            }
            "3.12" => self.check_mobius_sums(grid),
            "3.13" => {
                let mut out = Vec::new();
                for (r, label) in self.battery_moduli() {
                    out.push(self.check_coprime_mobius_log(grid, &r, label)?);
                }
                Ok(out)
            }
            "3.14" => {
                let mut out = Vec::new();
                for (r, label) in self.battery_moduli() {
                    out.push(self.check_coprime_mobius_kappa_log(grid, &r, label)?);
                }
                Ok(out)
            }
            "3.15" => {
                let mut out = Vec::new();
                for (r, label) in self.battery_moduli() {
                    out.push(self.check_coprime_mobius_kappa(grid, &r, label)?);
                }
                Ok(out)
            }
            other => Err(Error::UnknownLemma(other.to_string())),
        }
    }

    /// The whole battery. Counting-style scans stretch to 10^6, the rest to
    /// 10^5; an explicit grid overrides both. The degree-one degenerate
    /// check (3.3) is skipped for the rationals.
    pub fn verify_all(&self, grid_override: Option<&[u64]>) -> Result<Vec<LemmaReport>> {
        let long;
        let short;
        let (long_grid, short_grid): (&[u64], &[u64]) = match grid_override {
            Some(g) => (g, g),
            None => {
                long = default_grid(self.table.limit, GRID_MAX_COUNTING);
                short = default_grid(self.table.limit, GRID_MAX_DEFAULT);
                (&long, &short)
            }
        };
        let mut out = Vec::new();
        out.extend(self.verify_lemma("3.1", long_grid)?);
        out.extend(self.verify_lemma("3.2", short_grid)?);
        if self.field.degree() >= 2 {
            out.extend(self.verify_lemma("3.3", short_grid)?);
        }
        for id in ["3.4", "3.5", "3.6", "3.7", "3.8"] {
            out.extend(self.verify_lemma(id, short_grid)?);
        }
        out.extend(self.verify_lemma("3.12", long_grid)?);
        for id in ["3.13", "3.14", "3.15"] {
            out.extend(self.verify_lemma(id, short_grid)?);
        }
        Ok(out)
    }
}

/// |residual| / Q^e, additionally divided by log^p(Q) when the stated error
/// carries a log power.
fn band_metric(grid: &[u64], lhs: &[f64], main: &[f64], e: f64, log_power: i32) -> Vec<f64> {
    grid.iter()
        .zip(lhs.iter().zip(main))
        .map(|(&q, (l, m))| {
            let qf = q as f64;
            (l - m).abs() / (qf.powf(e) * qf.ln().powi(log_power))
        })
        .collect()
}

fn disjoint_support(n: &FactoredIdeal, r: &FactoredIdeal) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < n.factors.len() && j < r.factors.len() {
        match n.factors[i].0.cmp(&r.factors[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// Last banded value must not exceed the first by more than 10%: the decay
/// statements promise convergence but the residuals oscillate locally.
fn relaxed_decay(metric: &[f64]) -> bool {
    match (metric.first(), metric.last()) {
        (Some(&f), Some(&l)) => l <= f * 1.1 || l < 1e-12,
        _ => true,
    }
}

/// Exact rational value of Σ mu^2(n)/phi(n) over a contiguous index range,
/// reduced as a balanced tree so intermediate denominators stay small.
fn rational_phi_sum(table: &IdealTable, lo: usize, hi: usize) -> BigRational {
    let terms: Vec<BigRational> = (lo..hi)
        .into_par_iter()
        .filter_map(|i| {
            let n = &table.ideals[i];
            if moebius(n) == 0 {
                None
            } else {
                Some(Ratio::new(One::one(), BigInt::from(euler_phi(table, n))))
            }
        })
        .collect();
    tree_sum(&terms)
}

fn tree_sum(terms: &[BigRational]) -> BigRational {
    match terms.len() {
        0 => Zero::zero(),
        1 => terms[0].clone(),
        n => {
            let (a, b) = terms.split_at(n / 2);
            let (x, y) = rayon::join(|| tree_sum(a), || tree_sum(b));
            x + y
        }
    }
}
