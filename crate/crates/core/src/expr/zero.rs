//! Tri-state zero testing: exact simplification first, then deterministic
//! rational sampling over a declared domain box.

use super::{eval_f64, simplify, Bindings, EvalError, Expr, OpaqueEval};
use num::{BigRational, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Axis-aligned sampling boxes with optional excluded points.
#[derive(Debug, Clone, Default)]
pub struct Domain {
    boxes: BTreeMap<String, (BigRational, BigRational)>,
    excluded: Vec<BTreeMap<String, BigRational>>,
    /// Fallback box applied to symbols without a declared one; `None` makes
    /// an undeclared symbol a configuration error.
    default_box: Option<(BigRational, BigRational)>,
}

impl Domain {
    /// Strict domain: every sampled symbol must have a declared box.
    pub fn strict() -> Self {
        Domain::default()
    }

    /// Generic domain: undeclared symbols sample from [1, 2]. Suitable for
    /// library-internal verdicts on symbolic coefficients.
    pub fn generic() -> Self {
        Domain {
            default_box: Some((
                BigRational::from_integer(1.into()),
                BigRational::from_integer(2.into()),
            )),
            ..Domain::default()
        }
    }

    pub fn set_box(&mut self, sym: impl Into<String>, lo: BigRational, hi: BigRational) {
        self.boxes.insert(sym.into(), (lo, hi));
    }

    pub fn set_box_i64(&mut self, sym: impl Into<String>, lo: i64, hi: i64) {
        self.set_box(
            sym,
            BigRational::from_integer(lo.into()),
            BigRational::from_integer(hi.into()),
        );
    }

    pub fn exclude(&mut self, point: BTreeMap<String, BigRational>) {
        self.excluded.push(point);
    }

    pub fn excluded_points(&self) -> &[BTreeMap<String, BigRational>] {
        &self.excluded
    }

    pub fn box_for(&self, sym: &str) -> Option<(BigRational, BigRational)> {
        self.boxes
            .get(sym)
            .cloned()
            .or_else(|| self.default_box.clone())
    }

    pub fn box_for_f64(&self, sym: &str) -> Option<(f64, f64)> {
        self.box_for(sym)
            .map(|(lo, hi)| (lo.to_f64().unwrap(), hi.to_f64().unwrap()))
    }

    fn is_excluded(&self, point: &BTreeMap<String, BigRational>) -> bool {
        self.excluded.iter().any(|ex| {
            ex.iter()
                .all(|(k, v)| point.get(k).map(|p| p == v).unwrap_or(false))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vec<(String, f64)>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    /// Simplification reached the canonical zero.
    ProvedZero,
    /// All sampled magnitudes were ≤ ε.
    NumericallyZero,
    /// A sample exceeded ε; the witness point is reported.
    Nonzero(Witness),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::Nonzero(_))
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ZeroVerdict::ProvedZero)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ZeroError {
    #[error("no sampling box declared for symbol '{0}'")]
    UnboundedSymbol(String),
    #[error("sampling failed: {0} of {1} points evaluated with errors (last: {2})")]
    SamplingFailed(usize, usize, EvalError),
}

#[derive(Debug, Clone)]
pub struct ZeroConfig {
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ZeroConfig {
    fn default() -> Self {
        // fixed-seed generator so verdicts are reproducible
        ZeroConfig {
            epsilon: 1e-9,
            samples: 32,
            seed: 0x5eed_f0e5,
        }
    }
}

/// Decides whether `e` is zero: `ProvedZero` when simplification reaches the
/// canonical zero, otherwise by evaluating at `samples` random rational
/// points inside the domain box.
pub fn equals_zero(e: &Expr, domain: &Domain, cfg: &ZeroConfig) -> Result<ZeroVerdict, ZeroError> {
    let s = simplify(e);
    if s.is_zero() {
        return Ok(ZeroVerdict::ProvedZero);
    }
    let syms: Vec<String> = s.free_symbols().into_iter().collect();
    let mut boxes = Vec::with_capacity(syms.len());
    for sym in &syms {
        let b = domain
            .box_for(sym)
            .ok_or_else(|| ZeroError::UnboundedSymbol(sym.clone()))?;
        boxes.push(b);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = 0usize;
    let mut last_err = None;
    let mut evaluated = 0usize;
    let denom = BigRational::from_integer(64.into());
    let mut attempts = 0usize;
    while evaluated < cfg.samples && attempts < cfg.samples * 4 {
        attempts += 1;
        let mut bindings = Bindings::new();
        let mut point = BTreeMap::new();
        for (sym, (lo, hi)) in syms.iter().zip(&boxes) {
            let k: i64 = rng.gen_range(1..64);
            let frac = BigRational::from_integer(k.into()) / denom.clone();
            let v = lo.clone() + frac * (hi.clone() - lo.clone());
            point.insert(sym.clone(), v.clone());
            bindings.set_rational(sym.clone(), v);
        }
        if domain.is_excluded(&point) {
            continue;
        }
        match eval_f64(&s, &bindings, OpaqueEval::Generic) {
            Ok(v) => {
                evaluated += 1;
                if v.abs() > cfg.epsilon {
                    let witness = Witness {
                        point: syms
                            .iter()
                            .map(|sym| {
                                (sym.clone(), point[sym].to_f64().unwrap_or(f64::NAN))
                            })
                            .collect(),
                        value: v,
                    };
                    return Ok(ZeroVerdict::Nonzero(witness));
                }
            }
            Err(e) => {
                failures += 1;
                last_err = Some(e);
            }
        }
    }
    if evaluated == 0 {
        if let Some(err) = last_err {
            return Err(ZeroError::SamplingFailed(failures, attempts, err));
        }
    }
    Ok(ZeroVerdict::NumericallyZero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn check(text: &str) -> ZeroVerdict {
        equals_zero(
            &parse_expr(text).unwrap(),
            &Domain::generic(),
            &ZeroConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn structural_zero_is_proved() {
        assert_eq!(check("x - x"), ZeroVerdict::ProvedZero);
    }

    #[test]
    fn pythagorean_identity_is_numeric() {
        assert_eq!(check("sin(x)^2 + cos(x)^2 - 1"), ZeroVerdict::NumericallyZero);
    }

    #[test]
    fn nonzero_has_witness() {
        match check("x + 1") {
            ZeroVerdict::Nonzero(w) => {
                assert_eq!(w.point.len(), 1);
                assert!(w.value > 1.0);
            }
            other => panic!("expected nonzero, got {other:?}"),
        }
    }

    #[test]
    fn strict_domain_requires_boxes() {
        let err = equals_zero(
            &parse_expr("x + 1").unwrap(),
            &Domain::strict(),
            &ZeroConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err, ZeroError::UnboundedSymbol("x".into()));
    }

    #[test]
    fn opaque_identity_zero() {
        assert_eq!(check("f(x) - f(x)"), ZeroVerdict::ProvedZero);
        // nonzero generic: f'(x) is not identically zero
        assert!(matches!(check("D(f, 1)(x)"), ZeroVerdict::Nonzero(_)));
    }
}
