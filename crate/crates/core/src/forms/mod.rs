//! Skew-symmetric differential forms over a coordinate chart: the wedge
//! product, the exterior derivative, connection-aware commutators, closure
//! classification with potential recovery, the metric Hodge dual, interior
//! products, and pullbacks along parametrized maps.

mod closure;
mod commutator;
mod hodge;
mod maps;

pub use closure::{closure_classify, potential, ClosureVerdict, PotentialError};
pub use commutator::{commutator_with_connection, Commutator, CommutatorError};
pub use hodge::{hodge_star, HodgeError};
pub use maps::{interior_product, pullback, ParamMap, PullbackError, VectorField};

use crate::expr::{diff, simplify, Expr};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// An ordered coordinate frame; every form, connection, and metric lives on
/// exactly one chart.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Chart {
    names: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChartError {
    #[error("chart must have at least one coordinate")]
    Empty,
    #[error("duplicate coordinate name `{0}`")]
    Duplicate(String),
}

impl Chart {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Chart, ChartError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ChartError::Empty);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ChartError::Duplicate(n.clone()));
            }
        }
        Ok(Chart { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The coordinate symbol x^i as an expression.
    pub fn coord(&self, i: usize) -> Expr {
        Expr::sym(self.names[i].clone())
    }
}

/// Normalizes an arbitrary index tuple to (sign, increasing tuple); returns
/// None when an index repeats (the skew coefficient is zero).
pub(crate) fn sort_key(key: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = key.to_vec();
    let mut sign = 1i64;
    // insertion sort, counting swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Normalizes an index tuple to (permutation sign, increasing tuple); None
/// when an index repeats.
pub fn sort_index_tuple(key: &[usize]) -> Option<(i64, Vec<usize>)> {
    sort_key(key)
}

/// A degree-p skew-symmetric differential form: coefficients indexed by
/// strictly increasing index tuples; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DForm {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Expr>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormError {
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("index tuple has wrong length for degree {degree}")]
    BadKey { degree: usize },
    #[error("index {index} out of range for a chart of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
}

impl DForm {
    /// The zero form of the given degree.
    pub fn zero(chart: Chart, degree: usize) -> DForm {
        DForm {
            chart,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// A degree-0 form holding a single scalar expression.
    pub fn scalar(chart: Chart, e: Expr) -> DForm {
        let mut w = DForm::zero(chart, 0);
        let e = simplify(&e);
        if !e.is_zero() {
            w.coeffs.insert(Vec::new(), e);
        }
        w
    }

    /// The coordinate 1-form dx^i.
    pub fn basis(chart: Chart, i: usize) -> DForm {
        let mut w = DForm::zero(chart, 1);
        assert!(i < w.chart.dim(), "basis index out of range");
        w.coeffs.insert(vec![i], Expr::one());
        w
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.coeffs
    }

    /// Coefficient at an arbitrary index tuple, with the skew sign applied.
    pub fn coeff(&self, key: &[usize]) -> Expr {
        match sort_key(key) {
            None => Expr::zero(),
            Some((sign, sorted)) => match self.coeffs.get(&sorted) {
                None => Expr::zero(),
                Some(a) if sign == 1 => a.clone(),
                Some(a) => simplify(&Expr::neg(a.clone())),
            },
        }
    }

    /// Adds `e * dx^key` (key in any order) to the form in place.
    pub fn add_term(&mut self, key: &[usize], e: Expr) -> Result<(), FormError> {
        if key.len() != self.degree {
            return Err(FormError::BadKey {
                degree: self.degree,
            });
        }
        for &i in key {
            if i >= self.chart.dim() {
                return Err(FormError::IndexOutOfRange {
                    index: i,
                    dim: self.chart.dim(),
                });
            }
        }
        let Some((sign, sorted)) = sort_key(key) else {
            return Ok(()); // repeated index: the term is identically zero
        };
        let e = if sign == 1 { e } else { Expr::neg(e) };
        let cur = self.coeffs.remove(&sorted).unwrap_or_else(Expr::zero);
        let next = simplify(&Expr::add(cur, e));
        if !next.is_zero() {
            self.coeffs.insert(sorted, next);
        }
        Ok(())
    }

    /// Builds a form from (key, coefficient) pairs; keys may be unsorted.
    pub fn from_terms<I>(chart: Chart, degree: usize, terms: I) -> Result<DForm, FormError>
    where
        I: IntoIterator<Item = (Vec<usize>, Expr)>,
    {
        let mut w = DForm::zero(chart, degree);
        for (key, e) in terms {
            w.add_term(&key, e)?;
        }
        Ok(w)
    }

    pub fn add(&self, other: &DForm) -> Result<DForm, FormError> {
        if self.chart != other.chart {
            return Err(FormError::ChartMismatch);
        }
        assert_eq!(self.degree, other.degree, "degree mismatch in form sum");
        let mut out = self.clone();
        for (k, e) in &other.coeffs {
            out.add_term(k, e.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DForm) -> Result<DForm, FormError> {
        self.add(&other.scale(Expr::int(-1)))
    }

    pub fn scale(&self, e: Expr) -> DForm {
        let mut out = DForm::zero(self.chart.clone(), self.degree);
        for (k, a) in &self.coeffs {
            let c = simplify(&Expr::mul(e.clone(), a.clone()));
            if !c.is_zero() {
                out.coeffs.insert(k.clone(), c);
            }
        }
        out
    }

    /// Applies a function to every coefficient, dropping resulting zeros.
    pub fn map_coeffs(&self, f: impl Fn(&Expr) -> Expr) -> DForm {
        let mut out = DForm::zero(self.chart.clone(), self.degree);
        for (k, a) in &self.coeffs {
            let c = simplify(&f(a));
            if !c.is_zero() {
                out.coeffs.insert(k.clone(), c);
            }
        }
        out
    }
}

impl fmt::Display for DForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, a) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if key.is_empty() {
                write!(f, "{a}")?;
            } else {
                let basis: Vec<String> = key
                    .iter()
                    .map(|&i| format!("d{}", self.chart.name(i)))
                    .collect();
                write!(f, "({a})*{}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Wedge product; graded anticommutative, zero when p + q exceeds the chart
/// dimension.
pub fn wedge(a: &DForm, b: &DForm) -> Result<DForm, FormError> {
    if a.chart != b.chart {
        return Err(FormError::ChartMismatch);
    }
    let degree = a.degree + b.degree;
    let mut out = DForm::zero(a.chart.clone(), degree);
    if degree > a.chart.dim() {
        return Ok(out);
    }
    for (ka, ca) in &a.coeffs {
        for (kb, cb) in &b.coeffs {
            let mut key = ka.clone();
            key.extend_from_slice(kb);
            out.add_term(&key, Expr::mul(ca.clone(), cb.clone()))?;
        }
    }
    Ok(out)
}

/// Exterior derivative: d(a dx^I) = sum_alpha (da/dx^alpha) dx^alpha ^ dx^I.
pub fn exterior_derivative(w: &DForm) -> DForm {
    let n = w.chart.dim();
    let mut out = DForm::zero(w.chart.clone(), w.degree + 1);
    if w.degree + 1 > n {
        return out;
    }
    for (key, a) in &w.coeffs {
        for alpha in 0..n {
            if key.contains(&alpha) {
                continue;
            }
            let da = diff(a, w.chart.name(alpha));
            if da.is_zero() {
                continue;
            }
            let mut k = Vec::with_capacity(key.len() + 1);
            k.push(alpha);
            k.extend_from_slice(key);
            out.add_term(&k, da).expect("derivative key is valid");
        }
    }
    out
}
