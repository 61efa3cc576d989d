//! Chronological (time-ordered) exponential of a matrix-valued path.
//!
//! Solves dX/dt = (1/i) A(t) X(t), X(a) = 1, as the ordered product of
//! midpoint factors exp((Δt/i) A(t_mid)) with later times multiplying on the
//! left. The truncated iterated-integral series is kept as an independent
//! oracle for short intervals.

use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::linalg::{identity_defect, CMat};
use crate::quad::GaussLegendre;

/// Piecewise-continuous matrix path A(t) on [a, b].
///
/// `breakpoints` lists the discontinuity points in (a, b); the integration
/// grid is split exactly there.
pub struct MatrixPath<F> {
    a: f64,
    b: f64,
    dim: usize,
    breakpoints: Vec<f64>,
    eval: F,
}

impl<F: Fn(f64) -> CMat + Sync> MatrixPath<F> {
    pub fn new(a: f64, b: f64, dim: usize, breakpoints: Vec<f64>, eval: F) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b || dim == 0 {
            return Err(SpectralError::Config(format!(
                "invalid path domain [{a}, {b}] or dimension {dim}"
            )));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(SpectralError::Config("breakpoints must be ascending".into()));
            }
        }
        if breakpoints.iter().any(|&t| t <= a || t >= b) {
            return Err(SpectralError::Config(
                "breakpoints must lie strictly inside (a, b)".into(),
            ));
        }
        Ok(MatrixPath {
            a,
            b,
            dim,
            breakpoints,
            eval,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, t: f64) -> CMat {
        (self.eval)(t)
    }

    /// Subintervals between consecutive breakpoints.
    fn pieces(&self) -> Vec<(f64, f64)> {
        let mut edges = Vec::with_capacity(self.breakpoints.len() + 2);
        edges.push(self.a);
        edges.extend_from_slice(&self.breakpoints);
        edges.push(self.b);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TexpScheme {
    ProductMidpoint,
    Series,
}

/// Result of a chronological-exponential evaluation.
#[derive(Debug, Clone)]
pub struct TexpResult {
    pub value: CMat,
    pub step_count: usize,
    pub scheme: TexpScheme,
    /// ‖X*X − I‖_F of the result; meaningful when A(t) is Hermitian,
    /// in which case the exact solution is unitary.
    pub unitarity_defect: f64,
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// Matrices here are small (fiber and channel dimensions), so a plain
/// machine-precision Taylor sum after norm reduction is accurate and
/// deterministic.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm = m
        .iter()
        .fold(0.0_f64, |acc, z| acc.max(z.norm()))
        * n as f64;
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scale = 2.0_f64.powi(squarings as i32);
    let t = m.map(|z| z / scale);
    let mut sum = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..60 {
        term = (&term * &t) / Complex64::new(k as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Ordered product of midpoint-rule factors, second order in 1/steps.
///
/// Each subinterval between breakpoints receives at least one step; the
/// remaining budget is distributed proportionally to length.
pub fn texp<F: Fn(f64) -> CMat + Sync>(path: &MatrixPath<F>, steps: usize) -> Result<TexpResult> {
    let pieces = path.pieces();
    if steps < pieces.len() {
        return Err(SpectralError::Config(format!(
            "step budget {steps} cannot cover {} subintervals",
            pieces.len()
        )));
    }
    let total: f64 = pieces.iter().map(|(lo, hi)| hi - lo).sum();
    let mut alloc: Vec<usize> = pieces
        .iter()
        .map(|(lo, hi)| (((hi - lo) / total) * steps as f64).round().max(1.0) as usize)
        .collect();
    // Trim or top up so the total stays near the requested budget.
    let mut assigned: usize = alloc.iter().sum();
    while assigned > steps {
        if let Some(i) = (0..alloc.len()).filter(|&i| alloc[i] > 1).max_by_key(|&i| alloc[i]) {
            alloc[i] -= 1;
            assigned -= 1;
        } else {
            break;
        }
    }
    let mut x = CMat::identity(path.dim(), path.dim());
    let minus_i = Complex64::new(0.0, -1.0);
    let mut used = 0;
    for ((lo, hi), n) in pieces.iter().zip(&alloc) {
        let h = (hi - lo) / *n as f64;
        for j in 0..*n {
            let mid = lo + (j as f64 + 0.5) * h;
            let a = path.evaluate(mid);
            if a.nrows() != path.dim() || a.ncols() != path.dim() {
                return Err(SpectralError::DimensionMismatch {
                    expected: path.dim(),
                    got: a.nrows(),
                });
            }
            let factor = expm(&(a * (minus_i * h)));
            x = factor * x;
        }
        used += n;
    }
    let defect = identity_defect(&(x.adjoint() * &x));
    Ok(TexpResult {
        value: x,
        step_count: used,
        scheme: TexpScheme::ProductMidpoint,
        unitarity_defect: defect,
    })
}

/// Truncated iterated-integral series with nested Gauss–Legendre quadrature.
///
/// Cost grows like quad_points^order; this is an oracle for short intervals,
/// not a production scheme.
pub fn texp_series<F: Fn(f64) -> CMat + Sync>(
    path: &MatrixPath<F>,
    order: usize,
    quad_points: usize,
) -> Result<TexpResult> {
    if order == 0 {
        return Err(SpectralError::Config("series order must be at least 1".into()));
    }
    let rule = GaussLegendre::new(quad_points.max(2));
    let dim = path.dim();
    let (a, b) = path.domain();
    let mut sum = CMat::identity(dim, dim);
    for k in 1..=order {
        sum += iterated_integral(path, &rule, k, a, b)?;
    }
    let defect = identity_defect(&(sum.adjoint() * &sum));
    Ok(TexpResult {
        value: sum,
        step_count: quad_points.max(2).pow(order as u32),
        scheme: TexpScheme::Series,
        unitarity_defect: defect,
    })
}

/// (1/i)^k ∫_a^t dt₁ ∫_a^{t₁} dt₂ … A(t₁)⋯A(t_k), by recursion in k.
fn iterated_integral<F: Fn(f64) -> CMat + Sync>(
    path: &MatrixPath<F>,
    rule: &GaussLegendre,
    k: usize,
    a: f64,
    t: f64,
) -> Result<CMat> {
    let dim = path.dim();
    let minus_i = Complex64::new(0.0, -1.0);
    let mut acc = CMat::zeros(dim, dim);
    for (node, weight) in rule.mapped(a, t) {
        let head = path.evaluate(node);
        if !head.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(SpectralError::Evaluation(format!(
                "path evaluation returned non-finite entries at t = {node}"
            )));
        }
        let tail = if k == 1 {
            CMat::identity(dim, dim)
        } else {
            iterated_integral(path, rule, k - 1, a, node)?
        };
        acc += head * tail * Complex64::new(weight, 0.0);
    }
    Ok(acc * minus_i)
}
