//! Metric Hodge dual. The duality operator is an interpretation supplied by
//! this engine: indices are raised with the inverse metric (via minor
//! determinants) and the result is weighted by sqrt|det g| and the sign of
//! the complementary permutation.

use super::{sort_key, DForm};
use crate::expr::{equals_zero, simplify, Domain, Expr, ZeroConfig, ZeroVerdict};
use crate::geometry::{det, Metric};
use num::{BigInt, BigRational, One, Signed};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum HodgeError {
    #[error("form and metric live on different charts")]
    ChartMismatch,
    #[error("metric is degenerate: det g is zero on the probe domain")]
    DegenerateMetric,
    #[error("metric inversion failed: {0}")]
    Inversion(String),
}

/// Factor-wise square root of a canonically nonnegative expression: even
/// powers halve, perfect-square rationals take exact roots, and anything
/// else becomes a rational 1/2 power.
fn sqrt_expr(e: &Expr) -> Expr {
    fn half_power(base: Expr, exp: &BigRational) -> Expr {
        let half = exp / BigRational::from_integer(BigInt::from(2));
        simplify(&Expr::Pow(Box::new(base), half))
    }
    match e {
        Expr::Prod(fs) => {
            let parts: Vec<Expr> = fs.iter().map(sqrt_expr).collect();
            simplify(&Expr::Prod(parts))
        }
        Expr::Pow(b, r) => half_power((**b).clone(), r),
        other => simplify(&Expr::Pow(Box::new(other.clone()), BigRational::new(
            BigInt::one(),
            BigInt::from(2),
        ))),
    }
}

/// Hodge star of `w` with respect to `m`; the metric is probed for
/// degeneracy on the given domain before anything is computed.
pub fn hodge_star(
    w: &DForm,
    m: &Metric,
    domain: &Domain,
    cfg: &ZeroConfig,
) -> Result<DForm, HodgeError> {
    if w.chart() != m.chart() {
        return Err(HodgeError::ChartMismatch);
    }
    let n = w.chart().dim();
    let p = w.degree();
    let detg = m.determinant();
    match equals_zero(&detg, domain, cfg) {
        Ok(ZeroVerdict::Nonzero(_)) => {}
        Ok(_) => return Err(HodgeError::DegenerateMetric),
        Err(e) => return Err(HodgeError::Inversion(e.to_string())),
    }
    let inv = m
        .inverse()
        .map_err(|e| HodgeError::Inversion(e.to_string()))?;
    let volume = sqrt_expr(&simplify(&abs_hint(&detg)));

    let mut out = DForm::zero(w.chart().clone(), n - p);
    for (key_i, a) in w.coeffs() {
        // raise the index block: w^K = Σ_I det(g^{-1}[K, I]) a_I, over
        // increasing K of length p
        let mut k_tuple: Vec<usize> = (0..p).collect();
        loop {
            let minor: Vec<Vec<Expr>> = k_tuple
                .iter()
                .map(|&k| key_i.iter().map(|&i| inv[k][i].clone()).collect())
                .collect();
            let raised = simplify(&Expr::mul(det(&minor), a.clone()));
            if !raised.is_zero() {
                // complementary indices and the permutation sign of (K, K^c)
                let comp: Vec<usize> = (0..n).filter(|i| !k_tuple.contains(i)).collect();
                let mut full = k_tuple.clone();
                full.extend_from_slice(&comp);
                let (sign, _) = sort_key(&full).expect("full tuple is a permutation");
                let mut coeff = Expr::mul(volume.clone(), raised);
                if sign < 0 {
                    coeff = Expr::neg(coeff);
                }
                out.add_term(&comp, coeff).expect("complement key valid");
            }
            if p == 0 || !advance(&mut k_tuple, n) {
                break;
            }
        }
    }
    Ok(out)
}

/// det g enters under a square root; for the diagonal metrics this engine
/// targets the determinant is a product of squares and positives, so the
/// absolute value is a sign fix on the rational constant only.
fn abs_hint(e: &Expr) -> Expr {
    match e {
        Expr::Num(r) if r.is_negative() => Expr::Num(-r.clone()),
        Expr::Prod(fs) => Expr::Prod(fs.iter().map(abs_hint).collect()),
        other => other.clone(),
    }
}

fn advance(tuple: &mut [usize], n: usize) -> bool {
    let p = tuple.len();
    let mut i = p;
    while i > 0 {
        i -= 1;
        if tuple[i] < n - (p - i) {
            tuple[i] += 1;
            for j in (i + 1)..p {
                tuple[j] = tuple[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
