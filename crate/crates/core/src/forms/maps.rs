//! Vector-field contractions and pullbacks along parametrized maps.

use super::{Chart, DForm, FormError};
use crate::expr::{diff, simplify, Expr};
use std::collections::HashMap;
use thiserror::Error;

/// A vector field X = Σ X^i ∂_{x^i} on a chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    chart: Chart,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: Chart, components: Vec<Expr>) -> VectorField {
        assert_eq!(
            components.len(),
            chart.dim(),
            "component count must match chart dimension"
        );
        let components = components.iter().map(simplify).collect();
        VectorField { chart, components }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }
}

/// Interior product i_X w: the degree −1 anti-derivation. Degree-0 input
/// contracts to the zero form (documented, not an error).
pub fn interior_product(x: &VectorField, w: &DForm) -> Result<DForm, FormError> {
    if x.chart != *w.chart() {
        return Err(FormError::ChartMismatch);
    }
    if w.degree() == 0 {
        return Ok(DForm::zero(x.chart.clone(), 0));
    }
    let mut out = DForm::zero(x.chart.clone(), w.degree() - 1);
    for (key, a) in w.coeffs() {
        for (l, &il) in key.iter().enumerate() {
            let xc = &x.components[il];
            if xc.is_zero() {
                continue;
            }
            let rest: Vec<usize> = key
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != l)
                .map(|(_, &v)| v)
                .collect();
            let mut term = Expr::mul(xc.clone(), a.clone());
            if l % 2 == 1 {
                term = Expr::neg(term);
            }
            out.add_term(&rest, term)?;
        }
    }
    Ok(out)
}

/// A smooth map from a parameter chart into a target chart, given by one
/// expression per target coordinate (in the parameter coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamMap {
    source: Chart,
    target: Chart,
    exprs: Vec<Expr>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PullbackError {
    #[error("map provides {got} component expressions for a target chart of dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("form lives on a different chart than the map's target")]
    ChartMismatch,
}

impl ParamMap {
    pub fn new(source: Chart, target: Chart, exprs: Vec<Expr>) -> Result<ParamMap, PullbackError> {
        if exprs.len() != target.dim() {
            return Err(PullbackError::DimensionMismatch {
                got: exprs.len(),
                want: target.dim(),
            });
        }
        let exprs = exprs.iter().map(simplify).collect();
        Ok(ParamMap {
            source,
            target,
            exprs,
        })
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.exprs[i]
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    /// Substitution map target-coordinate name -> expression.
    fn substitution(&self) -> HashMap<String, Expr> {
        self.target
            .names()
            .iter()
            .cloned()
            .zip(self.exprs.iter().cloned())
            .collect()
    }

    /// Jacobian entry ∂φ^i / ∂u^s.
    fn jacobian(&self, i: usize, s: usize) -> Expr {
        diff(&self.exprs[i], self.source.name(s))
    }
}

/// Pullback φ*w onto the parameter chart: coefficients are composed with φ
/// and contracted with minors of the Jacobian. Commutes with the exterior
/// derivative.
pub fn pullback(phi: &ParamMap, w: &DForm) -> Result<DForm, PullbackError> {
    if *w.chart() != phi.target {
        return Err(PullbackError::ChartMismatch);
    }
    let p = w.degree();
    let m = phi.source.dim();
    let subs = phi.substitution();
    let mut out = DForm::zero(phi.source.clone(), p);
    if p > m {
        return Ok(out);
    }
    if p == 0 {
        for (_, a) in w.coeffs() {
            out.add_term(&[], a.subst(&subs)).expect("degree 0 key");
        }
        return Ok(out);
    }
    // iterate increasing source tuples S of length p
    let mut s_tuple: Vec<usize> = (0..p).collect();
    loop {
        let mut acc = Expr::zero();
        for (key, a) in w.coeffs() {
            // det of the Jacobian minor rows=key, cols=s_tuple
            let minor: Vec<Vec<Expr>> = key
                .iter()
                .map(|&i| s_tuple.iter().map(|&s| phi.jacobian(i, s)).collect())
                .collect();
            let d = crate::geometry::det(&minor);
            if d.is_zero() {
                continue;
            }
            acc = Expr::add(acc, Expr::mul(a.subst(&subs), d));
        }
        let acc = simplify(&acc);
        if !acc.is_zero() {
            out.add_term(&s_tuple, acc).expect("increasing key");
        }
        if !advance(&mut s_tuple, m) {
            break;
        }
    }
    Ok(out)
}

/// Advances an increasing index tuple; false when exhausted.
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
