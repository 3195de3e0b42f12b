//! Closure classification and potential recovery for skew-symmetric forms.
//!
//! A closed form's potential is recovered with the radial homotopy operator
//! anchored at a base point: for w of degree p,
//!   (Kw)(x) = Σ_I Σ_l (−1)^l (x_{i_l} − b_{i_l}) ∫₀¹ t^{p−1} a_I(b + t(x−b)) dt
//! on the remaining indices. The t-integral is evaluated symbolically and the
//! result is verified by differentiating it back; a potential is returned
//! only when d(χ) − w simplifies to the canonical zero.

use super::{exterior_derivative, DForm};
use crate::expr::{
    equals_zero, integrate_unit_interval, simplify, Domain, Expr, IntegrateError, ZeroConfig,
    ZeroVerdict,
};
use num::BigRational;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("form is not closed: d(w) has a nonzero coefficient at {key:?}")]
    NotClosed { key: Vec<usize> },
    #[error("homotopy integral not expressible: {0}")]
    NotExpressible(String),
    #[error("recovered candidate failed symbolic verification")]
    VerificationFailed,
    #[error("base point has wrong dimension")]
    BadBasePoint,
}

/// Verdict of `closure_classify`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosureVerdict {
    /// Closed and exact: carries a verified potential with d(χ) = w.
    ClosedExact { potential: DForm, note: String },
    /// Closed, but no potential could be produced on the declared domain.
    ClosedPotentialNotFound { obstruction: String },
    /// Not closed: carries the nonzero differential.
    Unclosed { differential: DForm },
}

/// Radial homotopy potential of a closed form, anchored at `base`.
///
/// Only polynomial/rational-in-t homotopy integrands are handled; anything
/// else is an explicit error — a wrong potential is never returned.
pub fn potential(w: &DForm, base: &[BigRational]) -> Result<DForm, PotentialError> {
    let chart = w.chart().clone();
    let n = chart.dim();
    let p = w.degree();
    if base.len() != n {
        return Err(PotentialError::BadBasePoint);
    }
    // closedness precondition: canonical zero of every d(w) coefficient
    let dw = exterior_derivative(w);
    if let Some((key, _)) = dw.coeffs().iter().next() {
        return Err(PotentialError::NotClosed { key: key.clone() });
    }
    if p == 0 {
        // a closed 0-form is constant in the coordinates; there is no
        // degree −1 object, so the convention is the zero answer only for
        // the zero form
        return Err(PotentialError::NotExpressible(
            "degree-0 forms have no potential".into(),
        ));
    }

    const T: &str = "__t";
    // substitution x_j -> b_j + t*(x_j − b_j)
    let mut radial: HashMap<String, Expr> = HashMap::new();
    for j in 0..n {
        let b = Expr::Num(base[j].clone());
        radial.insert(
            chart.name(j).to_string(),
            Expr::add(
                b.clone(),
                Expr::mul(Expr::sym(T), Expr::sub(chart.coord(j), b)),
            ),
        );
    }

    let mut chi = DForm::zero(chart.clone(), p - 1);
    for (key, a) in w.coeffs() {
        let a_radial = a.subst(&radial);
        let integrand = simplify(&Expr::mul(
            Expr::powi(Expr::sym(T), (p - 1) as i64),
            a_radial,
        ));
        let integral = integrate_unit_interval(&integrand, T).map_err(|e| match e {
            IntegrateError::NotExpressible(msg) => PotentialError::NotExpressible(msg),
        })?;
        for (l, &il) in key.iter().enumerate() {
            let rest: Vec<usize> = key
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != l)
                .map(|(_, &v)| v)
                .collect();
            let displacement = Expr::sub(chart.coord(il), Expr::Num(base[il].clone()));
            let mut term = Expr::mul(displacement, integral.clone());
            if l % 2 == 1 {
                term = Expr::neg(term);
            }
            chi.add_term(&rest, term).expect("valid potential key");
        }
    }
    // soundness gate: d(chi) must reproduce w canonically
    let residual = exterior_derivative(&chi).sub(w).expect("same chart");
    if !residual.is_zero() {
        return Err(PotentialError::VerificationFailed);
    }
    Ok(chi)
}

/// Classifies a form as unclosed, closed-and-exact (with potential), or
/// closed with no recoverable potential, honoring the declared domain.
pub fn closure_classify(
    w: &DForm,
    base: &[BigRational],
    domain: &Domain,
    cfg: &ZeroConfig,
) -> ClosureVerdict {
    let dw = exterior_derivative(w);
    // the differential may be zero only up to simplification strength;
    // accept numerically-zero coefficients as closed for classification,
    // but potential recovery still demands canonical closure
    let mut nonzero = DForm::zero(w.chart().clone(), dw.degree());
    for (key, a) in dw.coeffs() {
        let verdict = equals_zero(a, domain, cfg);
        match verdict {
            Ok(ZeroVerdict::ProvedZero) | Ok(ZeroVerdict::NumericallyZero) => {}
            _ => nonzero.add_term(key, a.clone()).expect("key from dw"),
        }
    }
    if !nonzero.is_zero() {
        return ClosureVerdict::Unclosed {
            differential: nonzero,
        };
    }
    if !domain.excluded_points().is_empty() {
        return ClosureVerdict::ClosedPotentialNotFound {
            obstruction: "declared domain has excluded points; radial segments from the base \
                          point may leave the domain, so the homotopy operator is unsound here"
                .to_string(),
        };
    }
    match potential(w, base) {
        Ok(chi) => ClosureVerdict::ClosedExact {
            potential: chi,
            note: format!(
                "potential gauge anchored at base point ({})",
                base.iter()
                    .map(|b| b.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        },
        Err(e) => ClosureVerdict::ClosedPotentialNotFound {
            obstruction: e.to_string(),
        },
    }
}
