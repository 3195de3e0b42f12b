//! Symbolic-numeric exterior calculus engine.
//!
//! The crate is organized around a small exact expression kernel ([`expr`])
//! on which skew-symmetric differential forms ([`forms`]), connections and
//! curvature ([`geometry`]), evolutionary relations ([`relations`]), the
//! bundled case studies ([`casestudies`]) and grid-based numeric
//! cross-validation ([`numerics`]) are built. All values are immutable after
//! construction and all operations are pure functions.

pub mod casestudies;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod numerics;
pub mod relations;
pub mod report;

pub use expr::{diff, equals_zero, eval_at, parse_expr, simplify};
pub use expr::{Bindings, Domain, Expr, ZeroConfig, ZeroVerdict};
