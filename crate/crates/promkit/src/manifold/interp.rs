//! Entrywise interpolation of tangent-space elements over the parameter
//! domain. Every scheme here is linear in the data, so each target reduces
//! to one weight vector over the samples; matrices are then accumulated as
//! a single weighted sum regardless of their size.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    PiecewiseLinear,
    Lagrange,
    CubicSpline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extrapolation {
    Error,
    Warn,
}

/// Relative tolerance for snapping the target onto a sample node, which
/// guarantees literal pass-through of the stored element.
const NODE_SNAP: f64 = 1e-13;

fn check_axis(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty interpolation axis".into()));
    }
    if xs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("interpolation axis".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "interpolation axis must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn snap_index(xs: &[f64], x: f64) -> Option<usize> {
    let span = xs.last().unwrap() - xs.first().unwrap();
    let tol = NODE_SNAP * span.max(xs.iter().fold(0.0f64, |a, v| a.max(v.abs()))).max(1e-300);
    xs.iter().position(|&v| (v - x).abs() <= tol)
}

fn handle_hull(xs: &[f64], x: f64, extrapolation: Extrapolation) -> Result<()> {
    if x < xs[0] || x > *xs.last().unwrap() {
        match extrapolation {
            Extrapolation::Error => {
                return Err(Error::InvalidInput(format!(
                    "target {x} outside sample hull [{}, {}]",
                    xs[0],
                    xs.last().unwrap()
                )))
            }
            Extrapolation::Warn => log::warn!(
                "extrapolating: target {x} outside sample hull [{}, {}]",
                xs[0],
                xs.last().unwrap()
            ),
        }
    }
    Ok(())
}

fn linear_weights(xs: &[f64], x: f64) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    if n == 1 {
        w[0] = 1.0;
        return w;
    }
    // Clamp to the end segments; extrapolation extends their straight lines.
    let j = match xs.iter().position(|&v| x < v) {
        Some(0) => 0,
        Some(j) => j - 1,
        None => n - 2,
    };
    let t = (x - xs[j]) / (xs[j + 1] - xs[j]);
    w[j] = 1.0 - t;
    w[j + 1] = t;
    w
}

fn lagrange_weights(xs: &[f64], x: f64) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![1.0; n];
    for i in 0..n {
        for j in 0..n {
            if j != i {
                w[i] *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
    }
    w
}

/// Natural cubic spline evaluation weights: solves the second-derivative
/// tridiagonal system once per cardinal data vector. Sample counts are
/// small, so the O(n^2) cost is irrelevant next to the matrix accumulation.
fn spline_weights(xs: &[f64], x: f64) -> Vec<f64> {
    let n = xs.len();
    if n < 3 {
        return linear_weights(xs, x);
    }
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut data = vec![0.0; n];
        data[i] = 1.0;
        w[i] = natural_spline_eval(xs, &data, x);
    }
    w
}

fn natural_spline_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    // Second derivatives m_i from the natural-spline tridiagonal system
    // (Thomas algorithm); m_0 = m_{n-1} = 0.
    let mut m = vec![0.0; n];
    if n > 2 {
        let k = n - 2;
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            let h0 = xs[i + 1] - xs[i];
            let h1 = xs[i + 2] - xs[i + 1];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
        }
        for i in 1..k {
            let h = xs[i + 1] - xs[i]; // sub-diagonal entry
            let f = h / diag[i - 1];
            diag[i] -= f * upper[i - 1];
            rhs[i] -= f * rhs[i - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
        }
    }
    let j = match xs.iter().position(|&v| x < v) {
        Some(0) => 0,
        Some(j) => j - 1,
        None => n - 2,
    };
    let h = xs[j + 1] - xs[j];
    let a = (xs[j + 1] - x) / h;
    let b = (x - xs[j]) / h;
    a * ys[j]
        + b * ys[j + 1]
        + ((a.powi(3) - a) * m[j] + (b.powi(3) - b) * m[j + 1]) * h * h / 6.0
}

/// Interpolation weights along one axis; `sum_i w_i y_i` evaluates the
/// chosen scheme at `x`. Exact node hits return a cardinal vector so the
/// stored element passes through unchanged.
pub fn weights_1d(xs: &[f64], x: f64, scheme: Scheme, extrapolation: Extrapolation) -> Result<Vec<f64>> {
    check_axis(xs)?;
    if !x.is_finite() {
        return Err(Error::NonFinite("interpolation target".into()));
    }
    if let Some(i) = snap_index(xs, x) {
        let mut w = vec![0.0; xs.len()];
        w[i] = 1.0;
        return Ok(w);
    }
    if xs.len() == 1 {
        return Err(Error::InvalidInput(
            "a single sample only supports evaluation at its own node".into(),
        ));
    }
    handle_hull(xs, x, extrapolation)?;
    Ok(match scheme {
        Scheme::PiecewiseLinear => linear_weights(xs, x),
        Scheme::Lagrange => lagrange_weights(xs, x),
        Scheme::CubicSpline => spline_weights(xs, x),
    })
}

/// Full tensor grid over multiple parameter axes, with a map from grid
/// index to sample index. Built from an unordered list of sample points.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    axes: Vec<Vec<f64>>,
    /// sample index of each grid node, in odometer order (last axis fastest)
    sample_of_node: Vec<usize>,
}

impl TensorGrid {
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("no sample points".into()));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch("inconsistent parameter dimension".into()));
        }
        let mut axes: Vec<Vec<f64>> = vec![Vec::new(); dim];
        for p in points {
            for (d, &v) in p.iter().enumerate() {
                if !axes[d].iter().any(|&u| u == v) {
                    axes[d].push(v);
                }
            }
        }
        for axis in &mut axes {
            axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let total: usize = axes.iter().map(Vec::len).product();
        if total != points.len() {
            return Err(Error::InvalidInput(
                "multi-parameter samples must form a full tensor grid".into(),
            ));
        }
        let mut sample_of_node = vec![usize::MAX; total];
        for (s, p) in points.iter().enumerate() {
            let mut node = 0usize;
            for (d, &v) in p.iter().enumerate() {
                let k = axes[d].iter().position(|&u| u == v).unwrap();
                node = node * axes[d].len() + k;
            }
            if sample_of_node[node] != usize::MAX {
                return Err(Error::InvalidInput("duplicate sample point on tensor grid".into()));
            }
            sample_of_node[node] = s;
        }
        Ok(Self { axes, sample_of_node })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Per-sample weights for `target`, products of the per-axis weights.
    pub fn weights(
        &self,
        target: &[f64],
        scheme: Scheme,
        extrapolation: Extrapolation,
    ) -> Result<Vec<f64>> {
        if target.len() != self.dim() {
            return Err(Error::DimensionMismatch("target parameter dimension".into()));
        }
        let axis_w: Vec<Vec<f64>> = self
            .axes
            .iter()
            .zip(target)
            .map(|(xs, &x)| weights_1d(xs, x, scheme, extrapolation))
            .collect::<Result<_>>()?;
        let mut out = vec![0.0; self.sample_of_node.len()];
        for (node, &s) in self.sample_of_node.iter().enumerate() {
            let mut rem = node;
            let mut w = 1.0;
            for d in (0..self.dim()).rev() {
                let len = self.axes[d].len();
                w *= axis_w[d][rem % len];
                rem /= len;
            }
            out[s] = w;
        }
        Ok(out)
    }
}

/// Weights over the given sample points for one target. Scalar parameters
/// interpolate along the line; higher dimensions require a tensor grid.
pub fn sample_weights(
    points: &[Vec<f64>],
    target: &[f64],
    scheme: Scheme,
    extrapolation: Extrapolation,
) -> Result<Vec<f64>> {
    let dim = target.len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch("sample/target parameter dimension".into()));
    }
    if dim == 1 {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap());
        let xs: Vec<f64> = order.iter().map(|&i| points[i][0]).collect();
        let w_sorted = weights_1d(&xs, target[0], scheme, extrapolation)?;
        let mut w = vec![0.0; points.len()];
        for (k, &i) in order.iter().enumerate() {
            w[i] = w_sorted[k];
        }
        Ok(w)
    } else {
        TensorGrid::from_points(points)?.weights(target, scheme, extrapolation)
    }
}

/// `sum_i w_i M_i` for real matrices of a common shape.
pub fn accumulate(weights: &[f64], elems: &[MatRef<'_, f64>]) -> Result<Mat<f64>> {
    if weights.len() != elems.len() || elems.is_empty() {
        return Err(Error::DimensionMismatch("weights/elements length".into()));
    }
    let (m, n) = (elems[0].nrows(), elems[0].ncols());
    let mut out = Mat::zeros(m, n);
    for (w, e) in weights.iter().zip(elems) {
        if e.nrows() != m || e.ncols() != n {
            return Err(Error::DimensionMismatch("element shapes".into()));
        }
        if *w == 0.0 {
            continue;
        }
        for j in 0..n {
            for i in 0..m {
                out[(i, j)] += w * e[(i, j)];
            }
        }
    }
    Ok(out)
}

/// `sum_i w_i M_i` for complex matrices, interpolating real and imaginary
/// parts componentwise.
pub fn accumulate_c(weights: &[f64], elems: &[MatRef<'_, c64>]) -> Result<Mat<c64>> {
    if weights.len() != elems.len() || elems.is_empty() {
        return Err(Error::DimensionMismatch("weights/elements length".into()));
    }
    let (m, n) = (elems[0].nrows(), elems[0].ncols());
    let mut out = Mat::zeros(m, n);
    for (w, e) in weights.iter().zip(elems) {
        if e.nrows() != m || e.ncols() != n {
            return Err(Error::DimensionMismatch("element shapes".into()));
        }
        if *w == 0.0 {
            continue;
        }
        for j in 0..n {
            for i in 0..m {
                out[(i, j)] += c64::new(w * e[(i, j)].re, w * e[(i, j)].im);
            }
        }
    }
    Ok(out)
}
