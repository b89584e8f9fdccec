//! Analytic constants of the field: the residue of its zeta function at 1,
//! its zeta value at 2, and the policy constant attached to a putative
//! exceptional real zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::NumberField;
use crate::ideals::{generate_prime_ideals, IdealTable};
use crate::oracle::is_fundamental_discriminant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidueMethod {
    /// Degree one: the counting function is exactly floor(Q).
    ExactDegreeOne,
    /// Imaginary quadratic field with fundamental discriminant: closed form
    /// from the class number and unit count.
    #[serde(rename = "exact_quadratic_imaginary")]
    ExactImaginaryQuadratic,
    /// Least-squares extrapolation of the ideal counting function.
    NumericExtrapolation,
    /// Value supplied through configuration, taken at face value.
    UserSupplied,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResidueEstimate {
    pub value: f64,
    pub method: ResidueMethod,
    /// Half-width of a conservative interval around `value`; zero for the
    /// exact methods.
    pub error_bound: f64,
}

/// Class number of the imaginary quadratic field of fundamental discriminant
/// d < 0, by counting reduced binary quadratic forms (a, b, c):
/// b^2 - 4ac = d, |b| <= a <= c, and b >= 0 whenever |b| = a or a = c.
pub fn class_number_by_reduced_forms(d: i64) -> Result<u64> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::NotImaginaryQuadratic(d));
    }
    let mut h = 0u64;
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue; // the mirror form with b > 0 is the reduced one
            }
            h += 1;
        }
        a += 1;
    }
    Ok(h)
}

/// Exact residue for an imaginary quadratic field: 2 pi h / (w sqrt(|d|))
/// with w the number of roots of unity (4 at d = -4, 6 at d = -3, else 2).
pub fn residue_exact_imaginary_quadratic(d: i64) -> Result<ResidueEstimate> {
    let h = class_number_by_reduced_forms(d)?;
    let w = match d {
        -3 => 6.0,
        -4 => 4.0,
        _ => 2.0,
    };
    let value = 2.0 * std::f64::consts::PI * h as f64 / (w * (-d as f64).sqrt());
    Ok(ResidueEstimate {
        value,
        method: ResidueMethod::ExactImaginaryQuadratic,
        error_bound: 0.0,
    })
}

/// Numeric residue: fit count(q) = s q + c q^(1 - 1/n_k) by least squares
/// over a geometric grid of 12 points spanning the top two decades of the
/// table, and report three standard errors as the bound.
pub fn residue_numeric(n_k: u32, table: &IdealTable) -> Result<ResidueEstimate> {
    const MIN_LIMIT: u64 = 10_000;
    if table.limit < MIN_LIMIT {
        return Err(Error::TableTooSmall {
            need: MIN_LIMIT,
            have: table.limit,
        });
    }
    const POINTS: usize = 12;
    let lo = table.limit as f64 / 100.0;
    let ratio = 100.0f64.powf(1.0 / (POINTS as f64 - 1.0));
    let secondary = 1.0 - 1.0 / n_k as f64;
    let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rows = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let mut q = (lo * ratio.powi(i as i32)).round() as u64;
        q = q.min(table.limit).max(2);
        let x1 = q as f64;
        let x2 = (q as f64).powf(secondary);
        let y = table.index_norm_le(q) as f64;
        rows.push((x1, x2, y));
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        t1 += x1 * y;
        t2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    let s_hat = (s22 * t1 - s12 * t2) / det;
    let c_hat = (s11 * t2 - s12 * t1) / det;
    let mut rss = 0.0;
    for &(x1, x2, y) in &rows {
        let r = y - s_hat * x1 - c_hat * x2;
        rss += r * r;
    }
    let sigma2 = rss / (POINTS as f64 - 2.0);
    let var_s = sigma2 * s22 / det;
    Ok(ResidueEstimate {
        value: s_hat,
        method: ResidueMethod::NumericExtrapolation,
        error_bound: 3.0 * var_s.max(0.0).sqrt(),
    })
}

/// Residue supplied by the caller (e.g. from configuration); trusted as is.
pub fn residue_user(value: f64) -> Result<ResidueEstimate> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::InvalidUserResidue(value));
    }
    Ok(ResidueEstimate {
        value,
        method: ResidueMethod::UserSupplied,
        error_bound: 0.0,
    })
}

/// Residue with the best available method for the field.
pub fn residue(field: &NumberField, table: &IdealTable) -> Result<ResidueEstimate> {
    if field.degree() == 1 {
        return Ok(ResidueEstimate {
            value: 1.0,
            method: ResidueMethod::ExactDegreeOne,
            error_bound: 0.0,
        });
    }
    if field.degree() == 2 {
        if let Some(d) = field.inv.d_k_i64() {
            if d < 0 && is_fundamental_discriminant(d) {
                return residue_exact_imaginary_quadratic(d);
            }
        }
    }
    residue_numeric(field.degree(), table)
}

#[derive(Clone, Copy, Debug)]
pub struct ZetaTwo {
    pub value: f64,
    /// Multiplicative tail bound: the true value lies in
    /// [value, value * (1 + tail_bound)].
    pub tail_bound: f64,
}

/// Euler product for zeta_k(2) over prime ideals of norm <= cutoff, with the
/// crude tail estimate exp(2 n_k / cutoff) - 1 (each rational prime p >
/// cutoff contributes at most n_k factors (1 - p^-2)^-1).
pub fn zeta_k_at_2(field: &NumberField, cutoff: u64) -> Result<ZetaTwo> {
    if cutoff < 100 {
        return Err(Error::ParamOrder);
    }
    let primes = generate_prime_ideals(field, cutoff);
    let mut value = 1.0f64;
    for rec in &primes {
        let q = rec.norm as f64;
        value *= 1.0 / (1.0 - 1.0 / (q * q));
    }
    let tail_bound = (2.0 * field.degree() as f64 / cutoff as f64).exp() - 1.0;
    Ok(ZetaTwo { value, tail_bound })
}

/// Stance on an exceptional real zero of the field's zeta function.
#[derive(Clone, Copy, Debug)]
pub struct SiegelPolicy {
    /// Work under the assumption that no exceptional zero exists.
    pub assume_none: bool,
    /// Position of the zero, if one is being entertained.
    pub beta0: Option<f64>,
    /// Derivative of the zeta function at that zero.
    pub zeta_prime_at_beta0: Option<f64>,
}

impl Default for SiegelPolicy {
    fn default() -> Self {
        SiegelPolicy {
            assume_none: true,
            beta0: None,
            zeta_prime_at_beta0: None,
        }
    }
}

/// The constant multiplying every error term: 1 when no exceptional zero is
/// assumed, otherwise 1 / ((1 - beta0)^6 min(1, |zeta_k'(beta0)|)^2).
pub fn c_beta0(policy: &SiegelPolicy) -> Result<f64> {
    if policy.assume_none {
        return Ok(1.0);
    }
    let beta0 = policy.beta0.ok_or(Error::MissingBeta0Data)?;
    let zp = policy.zeta_prime_at_beta0.ok_or(Error::MissingBeta0Data)?;
    if !(0.0 < beta0 && beta0 < 1.0) {
        return Err(Error::MissingBeta0Data);
    }
    let gap = 1.0 - beta0;
    Ok(1.0 / (gap.powi(6) * zp.abs().min(1.0).powi(2)))
}
