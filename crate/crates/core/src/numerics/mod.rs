//! Grid-based numeric cross-validation: sampling form coefficients on a
//! regular grid and checking symbolic exterior derivatives against central
//! finite differences.

use crate::expr::{eval_f64, Bindings, EvalError, Expr, OpaqueEval};
use crate::forms::{exterior_derivative, Chart, DForm};
use std::collections::BTreeMap;
use thiserror::Error;

/// Regular axis-aligned grid with ≥ 3 points per axis; the finite-difference
/// scheme is central, second order, applied on interior nodes only.
#[derive(Debug, Clone)]
pub struct GridSampler {
    chart: Chart,
    lo: Vec<f64>,
    points: usize,
    step: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("grid needs at least 3 points per axis, got {0}")]
    TooFewPoints(usize),
    #[error("box has {got} axes for a chart of dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("coefficient evaluation failed at a grid node: {0}")]
    Eval(EvalError),
    #[error("grid step must be positive on every axis")]
    BadStep,
}

impl GridSampler {
    /// Grid over the box [lo_i, hi_i] with `points` nodes per axis.
    pub fn new(
        chart: Chart,
        lo: Vec<f64>,
        hi: Vec<f64>,
        points: usize,
    ) -> Result<GridSampler, SampleError> {
        let n = chart.dim();
        if lo.len() != n || hi.len() != n {
            return Err(SampleError::DimensionMismatch {
                got: lo.len().max(hi.len()),
                want: n,
            });
        }
        if points < 3 {
            return Err(SampleError::TooFewPoints(points));
        }
        let step: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) / ((points - 1) as f64))
            .collect();
        if step.iter().any(|h| !(*h > 0.0)) {
            return Err(SampleError::BadStep);
        }
        Ok(GridSampler {
            chart,
            lo,
            points,
            step,
        })
    }

    /// Grid anchored at `lo` with an explicit step per axis.
    pub fn with_step(
        chart: Chart,
        lo: Vec<f64>,
        points: usize,
        step: Vec<f64>,
    ) -> Result<GridSampler, SampleError> {
        let n = chart.dim();
        let hi: Vec<f64> = lo
            .iter()
            .zip(&step)
            .map(|(a, h)| a + h * ((points - 1) as f64))
            .collect();
        if step.len() != n {
            return Err(SampleError::DimensionMismatch {
                got: step.len(),
                want: n,
            });
        }
        GridSampler::new(chart, lo, hi, points)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self, axis: usize) -> f64 {
        self.step[axis]
    }

    fn node_count(&self) -> usize {
        self.points.pow(self.chart.dim() as u32)
    }

    fn coordinates(&self, flat: usize) -> Vec<f64> {
        let mut idx = flat;
        let mut out = Vec::with_capacity(self.chart.dim());
        for axis in 0..self.chart.dim() {
            let k = idx % self.points;
            idx /= self.points;
            out.push(self.lo[axis] + self.step[axis] * (k as f64));
            let _ = axis;
        }
        out
    }

    fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut idx = flat;
        (0..self.chart.dim())
            .map(|_| {
                let k = idx % self.points;
                idx /= self.points;
                k
            })
            .collect()
    }
}

/// Dense coefficient samples per index key, in grid-flat order.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub values: BTreeMap<Vec<usize>, Vec<f64>>,
}

fn eval_node(
    e: &Expr,
    g: &GridSampler,
    flat: usize,
    extra: &Bindings,
) -> Result<f64, SampleError> {
    let coords = g.coordinates(flat);
    let mut b = extra.clone();
    for (axis, v) in coords.iter().enumerate() {
        b.set_float(g.chart.name(axis).to_string(), *v);
    }
    let v = eval_f64(e, &b, OpaqueEval::Generic).map_err(SampleError::Eval)?;
    if !v.is_finite() {
        return Err(SampleError::Eval(EvalError::DomainError(
            "non-finite value at a grid node".into(),
        )));
    }
    Ok(v)
}

/// Samples every coefficient of `w` at every grid node. Non-coordinate
/// symbols must be bound in `extra`; opaque functions evaluate generically.
pub fn sample_form(
    w: &DForm,
    g: &GridSampler,
    extra: &Bindings,
) -> Result<FieldSamples, SampleError> {
    let mut values = BTreeMap::new();
    for (key, a) in w.coeffs() {
        let mut arr = Vec::with_capacity(g.node_count());
        for flat in 0..g.node_count() {
            arr.push(eval_node(a, g, flat, extra)?);
        }
        values.insert(key.clone(), arr);
    }
    Ok(FieldSamples { values })
}

/// Result of a finite-difference check.
#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub max_rel_err: f64,
    /// nodes × components actually compared
    pub comparisons: usize,
}

const REL_FLOOR: f64 = 1e-12;

/// Checks a claimed exterior derivative `dw` of `w` against second-order
/// central finite differences of `w`'s coefficients on interior grid nodes.
pub fn fd_check_against(
    w: &DForm,
    dw: &DForm,
    g: &GridSampler,
    extra: &Bindings,
) -> Result<FdReport, SampleError> {
    let n = g.chart.dim();
    let p = w.degree();
    let samples = sample_form(w, g, extra)?;
    let mut max_rel_err = 0.0f64;
    let mut comparisons = 0usize;

    // every increasing tuple of length p+1 matters: both stored dw keys and
    // keys whose symbolic coefficient is zero (the FD side must agree there
    // too)
    let mut keys: Vec<Vec<usize>> = Vec::new();
    if p + 1 <= n {
        let mut tuple: Vec<usize> = (0..=p).collect();
        loop {
            keys.push(tuple.clone());
            if !advance(&mut tuple, n) {
                break;
            }
        }
    }

    let mut strides = vec![1usize; n];
    for axis in 1..n {
        strides[axis] = strides[axis - 1] * g.points;
    }

    for key in keys {
        let sym_coeff = dw.coeff(&key);
        for flat in 0..g.node_count() {
            let mi = g.multi_index(flat);
            if mi.iter().any(|&k| k == 0 || k == g.points - 1) {
                continue; // interior nodes only
            }
            // FD value of the flat commutator coefficient at this node
            let mut fd = 0.0f64;
            for (j, &alpha) in key.iter().enumerate() {
                let rest: Vec<usize> = key
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, &v)| v)
                    .collect();
                // coefficient of w at `rest`, with skew sign against stored keys
                let (sign, sorted) = match crate::forms::sort_index_tuple(&rest) {
                    Some(x) => x,
                    None => continue,
                };
                let Some(arr) = samples.values.get(&sorted) else {
                    continue;
                };
                let hi = arr[flat + strides[alpha]];
                let lo = arr[flat - strides[alpha]];
                let mut d = (hi - lo) / (2.0 * g.step[alpha]) * (sign as f64);
                if j % 2 == 1 {
                    d = -d;
                }
                fd += d;
            }
            let sym = if sym_coeff.is_zero() {
                0.0
            } else {
                eval_node(&sym_coeff, g, flat, extra)?
            };
            let denom = sym.abs().max(REL_FLOOR);
            let rel = (fd - sym).abs() / denom;
            if rel > max_rel_err {
                max_rel_err = rel;
            }
            comparisons += 1;
        }
    }
    Ok(FdReport {
        max_rel_err,
        comparisons,
    })
}

/// Convenience wrapper: checks the engine's own exterior derivative.
pub fn fd_check(w: &DForm, g: &GridSampler, extra: &Bindings) -> Result<FdReport, SampleError> {
    fd_check_against(w, &exterior_derivative(w), g, extra)
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
