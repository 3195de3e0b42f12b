//! Exact symbolic scalar expressions.
//!
//! An [`Expr`] is a tree over rational constants, named symbols, sums,
//! products, integer/rational powers, the built-in functions `ln`, `exp`,
//! `sin`, `cos`, and opaque function applications carrying formal derivative
//! orders. Constants are exact rationals throughout; irrational constants
//! enter only as named symbols.

mod diff;
mod eval;
mod integrate;
mod parse;
mod print;
mod simplify;
mod zero;

pub use diff::diff;
pub use eval::{eval_at, eval_f64, Bindings, EvalError, OpaqueEval, Value};
pub use integrate::{integrate_unit_interval, IntegrateError};
pub use parse::{parse_expr, ParseError};
pub use simplify::simplify;
pub use zero::{equals_zero, Domain, Witness, ZeroConfig, ZeroError, ZeroVerdict};

use num::BigRational;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Builtin {
    Ln,
    Exp,
    Sin,
    Cos,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Ln => "ln",
            Builtin::Exp => "exp",
            Builtin::Sin => "sin",
            Builtin::Cos => "cos",
        }
    }

    pub fn from_name(s: &str) -> Option<Builtin> {
        match s {
            "ln" => Some(Builtin::Ln),
            "exp" => Some(Builtin::Exp),
            "sin" => Some(Builtin::Sin),
            "cos" => Some(Builtin::Cos),
            _ => None,
        }
    }
}

/// Application of an opaque function `f(args)` with a formal derivative
/// order per argument. Derivatives of opaque functions accumulate orders;
/// they never expand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Opaque {
    pub name: String,
    pub args: Vec<Expr>,
    pub orders: Vec<u32>,
}

impl Opaque {
    pub fn new(name: impl Into<String>, args: Vec<Expr>) -> Self {
        let orders = vec![0; args.len()];
        Opaque {
            name: name.into(),
            args,
            orders,
        }
    }
}

/// Symbolic scalar expression tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Exact rational constant.
    Num(BigRational),
    /// Free symbol.
    Sym(String),
    /// n-ary sum (canonically flattened and sorted).
    Sum(Vec<Expr>),
    /// n-ary product (canonically flattened and sorted).
    Prod(Vec<Expr>),
    /// Power with exact rational exponent.
    Pow(Box<Expr>, BigRational),
    /// Built-in function application.
    Call(Builtin, Box<Expr>),
    /// Opaque function application with formal derivative orders.
    Opaque(Opaque),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Num(BigRational::from_integer(n.into()))
    }

    pub fn rational(num: i64, den: i64) -> Expr {
        Expr::Num(BigRational::new(num.into(), den.into()))
    }

    pub fn sym(name: impl Into<String>) -> Expr {
        Expr::Sym(name.into())
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(r) if r.numer() == &num::BigInt::from(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Num(r) if r == &BigRational::from_integer(1.into()))
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self {
            Expr::Num(r) => Some(r),
            _ => None,
        }
    }

    /// Raw sum node; use [`simplify`] afterwards for the canonical form.
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, b])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, Expr::neg(b)])
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::Prod(vec![a, b])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Prod(vec![a, Expr::powi(b, -1)])
    }

    pub fn neg(a: Expr) -> Expr {
        Expr::Prod(vec![Expr::int(-1), a])
    }

    pub fn powi(base: Expr, exp: i64) -> Expr {
        Expr::Pow(Box::new(base), BigRational::from_integer(exp.into()))
    }

    pub fn call(f: Builtin, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    pub fn opaque(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Opaque(Opaque::new(name, args))
    }

    /// Collects the free symbol names of the expression.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Sum(xs) | Expr::Prod(xs) => {
                for x in xs {
                    x.collect_symbols(out);
                }
            }
            Expr::Pow(b, _) => b.collect_symbols(out),
            Expr::Call(_, a) => a.collect_symbols(out),
            Expr::Opaque(op) => {
                for a in &op.args {
                    a.collect_symbols(out);
                }
            }
        }
    }

    /// True if the expression mentions any opaque function application.
    pub fn has_opaque(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Sym(_) => false,
            Expr::Sum(xs) | Expr::Prod(xs) => xs.iter().any(Expr::has_opaque),
            Expr::Pow(b, _) => b.has_opaque(),
            Expr::Call(_, a) => a.has_opaque(),
            Expr::Opaque(_) => true,
        }
    }

    /// Substitutes symbols by expressions and canonicalizes the result.
    pub fn subst(&self, map: &HashMap<String, Expr>) -> Expr {
        simplify(&self.subst_raw(map))
    }

    fn subst_raw(&self, map: &HashMap<String, Expr>) -> Expr {
        match self {
            Expr::Num(_) => self.clone(),
            Expr::Sym(s) => map.get(s).cloned().unwrap_or_else(|| self.clone()),
            Expr::Sum(xs) => Expr::Sum(xs.iter().map(|x| x.subst_raw(map)).collect()),
            Expr::Prod(xs) => Expr::Prod(xs.iter().map(|x| x.subst_raw(map)).collect()),
            Expr::Pow(b, e) => Expr::Pow(Box::new(b.subst_raw(map)), e.clone()),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.subst_raw(map))),
            Expr::Opaque(op) => Expr::Opaque(Opaque {
                name: op.name.clone(),
                args: op.args.iter().map(|a| a.subst_raw(map)).collect(),
                orders: op.orders.clone(),
            }),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Expr::Num(_) => 0,
            Expr::Sym(_) => 1,
            Expr::Call(_, _) => 2,
            Expr::Opaque(_) => 3,
            Expr::Pow(_, _) => 4,
            Expr::Prod(_) => 5,
            Expr::Sum(_) => 6,
        }
    }
}

// Fixed total order used for canonical sorting of sum terms and product
// factors. Tie-breaking is lexicographic on (node kind, contents).
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Expr::Num(a), Expr::Num(b)) => a.cmp(b),
            (Expr::Sym(a), Expr::Sym(b)) => a.cmp(b),
            (Expr::Call(f, a), Expr::Call(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Expr::Opaque(a), Expr::Opaque(b)) => a
                .name
                .cmp(&b.name)
                .then_with(|| a.args.cmp(&b.args))
                .then_with(|| a.orders.cmp(&b.orders)),
            (Expr::Pow(a, ea), Expr::Pow(b, eb)) => a.cmp(b).then_with(|| ea.cmp(eb)),
            (Expr::Prod(a), Expr::Prod(b)) => a.cmp(b),
            (Expr::Sum(a), Expr::Sum(b)) => a.cmp(b),
            _ => self.kind_rank().cmp(&other.kind_rank()),
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print::print_expr(self))
    }
}
