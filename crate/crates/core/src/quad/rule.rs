//! One-dimensional adaptive Gauss-Legendre quadrature.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// An integrand value together with the error already committed to it
/// (e.g. by an inner quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    pub err: f64,
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Self { value, err: 0.0 }
    }
}

/// An integral with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

/// Stopping rule for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    /// Maximum number of panel splits.
    pub max_splits: usize,
}

struct Panel {
    a: f64,
    b: f64,
    whole: f64,
    left: f64,
    right: f64,
    inner_err: f64,
}

impl Panel {
    fn refined(&self) -> f64 {
        self.left + self.right
    }

    fn err(&self) -> f64 {
        (self.whole - self.refined()).abs() + self.inner_err
    }
}

fn apply<F>(f: &mut F, rule: &GaussLegendre, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut sum, mut err) = (0.0, 0.0);
    for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
        let t = mid + half * x;
        let s = f(t)?;
        if !s.value.is_finite() {
            return Err(Error::Accuracy {
                best: f64::NAN,
                bound: f64::INFINITY,
                detail: format!("integrand is not finite at {t:e}"),
            });
        }
        sum += w * s.value;
        err += w * s.err.abs();
    }
    Ok((half * sum, half.abs() * err))
}

fn make_panel<F>(f: &mut F, rule: &GaussLegendre, a: f64, b: f64, whole: Option<f64>) -> Result<Panel>
where
    F: FnMut(f64) -> Result<Sample>,
{
    let mid = 0.5 * (a + b);
    let whole = match whole {
        Some(w) => w,
        None => apply(f, rule, a, b)?.0,
    };
    let (left, le) = apply(f, rule, a, mid)?;
    let (right, re) = apply(f, rule, mid, b)?;
    Ok(Panel { a, b, whole, left, right, inner_err: le + re })
}

fn total(panels: &[Panel]) -> (f64, f64) {
    let mut order: Vec<usize> = (0..panels.len()).collect();
    order.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
    let value = order.iter().map(|&i| panels[i].refined()).sum();
    let err = order.iter().map(|&i| panels[i].err()).sum();
    (value, err)
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Each panel compares the rule on the whole panel with the rule on its two
/// halves; the panel with the largest discrepancy is split next. Panel sums
/// are accumulated in position order, so the result is a deterministic
/// function of the inputs.
pub fn adaptive<F>(f: &mut F, a: f64, b: f64, rule: &GaussLegendre, tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<Sample>,
{
    if a == b {
        return Ok(Estimate { value: 0.0, abs_err: 0.0 });
    }
    let mut panels = vec![make_panel(f, rule, a, b, None)?];
    let mut splits = 0;
    loop {
        let (value, err) = total(&panels);
        if err <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(Estimate { value, abs_err: err });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, p)| {
                let e = p.err();
                if e > be {
                    (i, e)
                } else {
                    (bi, be)
                }
            });
        let p = &panels[worst];
        let mid = 0.5 * (p.a + p.b);
        let too_narrow = (p.b - p.a).abs() <= 64.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
        if splits >= tol.max_splits || too_narrow || mid == p.a || mid == p.b {
            return Err(Error::Accuracy {
                best: value,
                bound: err,
                detail: format!(
                    "adaptive quadrature on [{a:e}, {b:e}] stalled after {splits} splits"
                ),
            });
        }
        let p = panels.swap_remove(worst);
        let left = make_panel(f, rule, p.a, mid, Some(p.left))?;
        let right = make_panel(f, rule, mid, p.b, Some(p.right))?;
        panels.push(left);
        panels.push(right);
        splits += 1;
    }
}

/// Algebraic grading of `[0, 1]` toward both endpoints:
/// `x = v^4 / (v^4 + (1-v)^4)`. Returns `(x, 1 - x, dx/dv)` with the
/// complement computed directly.
pub fn graded(v: f64) -> (f64, f64, f64) {
    let (p, q) = (v.powi(4), (1.0 - v).powi(4));
    let den = p + q;
    let jac = 4.0 * (v * (1.0 - v)).powi(3) / (den * den);
    (p / den, q / den, jac)
}
