//! Commutator of a skew-symmetric form on a manifold with connection: the
//! flat part (coefficient derivatives) plus the connection part (the
//! torsion contraction that vanishes for symmetric connections).

use super::{Chart, DForm};
use crate::expr::{diff, simplify, Expr};
use crate::geometry::Connection;
use std::collections::BTreeMap;
use thiserror::Error;

/// Commutator components of a degree-p form: for each increasing index
/// tuple of length p+1, the flat and connection contributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Commutator {
    chart: Chart,
    degree: usize,
    parts: BTreeMap<Vec<usize>, (Expr, Expr)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CommutatorError {
    #[error("commutator is undefined for degree-0 forms; use the exterior derivative")]
    DegreeZero,
    #[error("form and connection live on different charts")]
    ChartMismatch,
}

impl Commutator {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    /// Degree of the commutator (input degree + 1).
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// (flat, connection) parts per increasing index tuple; tuples with both
    /// parts canonically zero are not stored.
    pub fn parts(&self) -> &BTreeMap<Vec<usize>, (Expr, Expr)> {
        &self.parts
    }

    pub fn flat(&self, key: &[usize]) -> Expr {
        self.parts
            .get(key)
            .map(|(f, _)| f.clone())
            .unwrap_or_else(Expr::zero)
    }

    pub fn connection(&self, key: &[usize]) -> Expr {
        self.parts
            .get(key)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Expr::zero)
    }

    pub fn total(&self, key: &[usize]) -> Expr {
        match self.parts.get(key) {
            None => Expr::zero(),
            Some((f, c)) => simplify(&Expr::add(f.clone(), c.clone())),
        }
    }

    /// The commutator as a plain form (totals as coefficients).
    pub fn total_form(&self) -> DForm {
        let mut w = DForm::zero(self.chart.clone(), self.degree);
        for key in self.parts.keys() {
            let t = self.total(key);
            if !t.is_zero() {
                w.add_term(key, t).expect("keys are valid");
            }
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.parts.keys().all(|k| self.total(k).is_zero())
    }
}

/// Connection contribution to the covariant derivative in the convention
/// a_{β;α} = ∂_α a_β + Γ^σ_{βα} a_σ: here Σ_i Γ^σ_{β_i α} a_{…σ…}.
fn connection_term(w: &DForm, g: &Connection, lower: &[usize], alpha: usize) -> Expr {
    let n = w.chart().dim();
    let mut acc = Expr::zero();
    for (i, &beta) in lower.iter().enumerate() {
        for sigma in 0..n {
            let gamma = g.get(sigma, beta, alpha);
            if gamma.is_zero() {
                continue;
            }
            let mut idx = lower.to_vec();
            idx[i] = sigma;
            let a = w.coeff(&idx);
            if a.is_zero() {
                continue;
            }
            acc = Expr::add(acc, Expr::mul(gamma, a));
        }
    }
    acc
}

/// Commutator of a degree-p form (p ≥ 1) with connection terms: the
/// antisymmetrized covariant derivative. At p = 1 this is exactly
/// K_{αβ} = (∂_α a_β − ∂_β a_α) + (Γ^σ_{βα} − Γ^σ_{αβ}) a_σ.
pub fn commutator_with_connection(
    w: &DForm,
    g: &Connection,
) -> Result<Commutator, CommutatorError> {
    if w.degree() == 0 {
        return Err(CommutatorError::DegreeZero);
    }
    if w.chart() != g.chart() {
        return Err(CommutatorError::ChartMismatch);
    }
    let n = w.chart().dim();
    let p = w.degree();
    let mut parts: BTreeMap<Vec<usize>, (Expr, Expr)> = BTreeMap::new();
    if p + 1 > n {
        return Ok(Commutator {
            chart: w.chart().clone(),
            degree: p + 1,
            parts,
        });
    }
    // iterate over increasing tuples J of length p+1
    let mut tuple: Vec<usize> = (0..=p).collect();
    loop {
        let mut flat = Expr::zero();
        let mut conn = Expr::zero();
        for (j, &alpha) in tuple.iter().enumerate() {
            let rest: Vec<usize> = tuple
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &v)| v)
                .collect();
            let f = diff(&w.coeff(&rest), w.chart().name(alpha));
            let c = connection_term(w, g, &rest, alpha);
            let signed = |e: Expr| if j % 2 == 0 { e } else { Expr::neg(e) };
            flat = Expr::add(flat, signed(f));
            conn = Expr::add(conn, signed(c));
        }
        let flat = simplify(&flat);
        let conn = simplify(&conn);
        if !flat.is_zero() || !conn.is_zero() {
            parts.insert(tuple.clone(), (flat, conn));
        }
        // next increasing tuple
        if !advance(&mut tuple, n) {
            break;
        }
    }
    Ok(Commutator {
        chart: w.chart().clone(),
        degree: p + 1,
        parts,
    })
}

/// Advances an increasing index tuple to its successor; false when done.
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

/// Sanity helper used by tests: the flat part of the commutator is the
/// exterior-derivative coefficient, up to skew normalization.
#[cfg(test)]
pub(crate) fn flat_matches_exterior_derivative(w: &DForm, k: &Commutator) -> bool {
    let dw = super::exterior_derivative(w);
    let mut keys: Vec<Vec<usize>> = dw.coeffs().keys().cloned().collect();
    keys.extend(k.parts().keys().cloned());
    keys.sort();
    keys.dedup();
    for key in keys {
        let lhs = k.flat(&key);
        let rhs = dw.coeff(&key);
        if !simplify(&Expr::sub(lhs, rhs)).is_zero() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn xy() -> Chart {
        Chart::new(["x", "y"]).unwrap()
    }

    #[test]
    fn flat_commutator_of_one_form() {
        let w = DForm::from_terms(
            xy(),
            1,
            [
                (vec![0], Expr::opaque("a", vec![Expr::sym("x"), Expr::sym("y")])),
                (vec![1], Expr::opaque("b", vec![Expr::sym("x"), Expr::sym("y")])),
            ],
        )
        .unwrap();
        let k = commutator_with_connection(&w, &Connection::zero(xy())).unwrap();
        let expected = simplify(&Expr::sub(
            diff(&Expr::opaque("b", vec![Expr::sym("x"), Expr::sym("y")]), "x"),
            diff(&Expr::opaque("a", vec![Expr::sym("x"), Expr::sym("y")]), "y"),
        ));
        assert_eq!(k.flat(&[0, 1]), expected);
        assert!(k.connection(&[0, 1]).is_zero());
        assert!(flat_matches_exterior_derivative(&w, &k));
    }

    #[test]
    fn symmetric_connection_part_vanishes() {
        let mut g = Connection::zero(xy());
        g.set(0, 0, 1, parse_expr("x*y").unwrap()).unwrap();
        g.set(0, 1, 0, parse_expr("x*y").unwrap()).unwrap();
        g.set(1, 0, 1, parse_expr("sin(x)").unwrap()).unwrap();
        g.set(1, 1, 0, parse_expr("sin(x)").unwrap()).unwrap();
        let w = DForm::from_terms(
            xy(),
            1,
            [
                (vec![0], parse_expr("x^2+y").unwrap()),
                (vec![1], parse_expr("exp(x)").unwrap()),
            ],
        )
        .unwrap();
        let k = commutator_with_connection(&w, &g).unwrap();
        for key in k.parts().keys() {
            assert!(k.connection(key).is_zero(), "connection part at {key:?}");
        }
    }

    #[test]
    fn antisymmetric_connection_contributes() {
        // constant a dx with torsion c on sigma = x: K_xy = c*a
        let mut g = Connection::zero(xy());
        g.set(0, 1, 0, Expr::sym("c")).unwrap(); // Gamma^x_{yx} = c, Gamma^x_{xy} = 0
        let w = DForm::from_terms(xy(), 1, [(vec![0], Expr::sym("a"))]).unwrap();
        let k = commutator_with_connection(&w, &g).unwrap();
        assert!(k.flat(&[0, 1]).is_zero());
        assert_eq!(
            k.total(&[0, 1]),
            simplify(&parse_expr("c*a").unwrap())
        );
    }

    #[test]
    fn degree_zero_is_rejected() {
        let w = DForm::scalar(xy(), Expr::sym("x"));
        assert_eq!(
            commutator_with_connection(&w, &Connection::zero(xy())),
            Err(CommutatorError::DegreeZero)
        );
    }

    #[test]
    fn degree_two_flat_part_matches_exterior_derivative() {
        let chart = Chart::new(["x", "y", "z"]).unwrap();
        let w = DForm::from_terms(
            chart.clone(),
            2,
            [
                (vec![0, 1], parse_expr("x*z^2").unwrap()),
                (vec![0, 2], parse_expr("y^3").unwrap()),
                (vec![1, 2], parse_expr("sin(x)*y").unwrap()),
            ],
        )
        .unwrap();
        let k = commutator_with_connection(&w, &Connection::zero(chart)).unwrap();
        assert!(flat_matches_exterior_derivative(&w, &k));
    }

    #[test]
    fn degree_two_symmetric_connection_part_vanishes() {
        let chart = Chart::new(["x", "y", "z"]).unwrap();
        let mut g = Connection::zero(chart.clone());
        g.set(2, 0, 1, parse_expr("x+y").unwrap()).unwrap();
        g.set(2, 1, 0, parse_expr("x+y").unwrap()).unwrap();
        g.set(0, 0, 0, parse_expr("z").unwrap()).unwrap();
        let w = DForm::from_terms(
            chart,
            2,
            [
                (vec![0, 1], parse_expr("x").unwrap()),
                (vec![1, 2], parse_expr("y*z").unwrap()),
            ],
        )
        .unwrap();
        let k = commutator_with_connection(&w, &g).unwrap();
        for key in k.parts().keys() {
            assert!(k.connection(key).is_zero(), "connection part at {key:?}");
        }
    }
}
