//! Logarithm/exponential chart maps for reduced operators on three matrix
//! manifolds: the flat (euclidean) chart, nonsingular matrices under the
//! principal matrix logarithm, and symmetric positive definite matrices.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::linalg::{expm, logm, max_abs, real_part, to_complex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorManifold {
    Euclidean,
    GlNonsingular,
    Spd,
}

fn check_square_same(x0: MatRef<'_, f64>, xi: MatRef<'_, f64>) -> Result<usize> {
    let n = x0.nrows();
    if x0.ncols() != n || xi.nrows() != n || xi.ncols() != n {
        return Err(Error::DimensionMismatch("chart maps need square matrices of equal size".into()));
    }
    Ok(n)
}

fn check_spd(x: MatRef<'_, f64>, name: &str) -> Result<()> {
    let scale = max_abs(x).max(1.0);
    for j in 0..x.ncols() {
        for i in 0..j {
            if (x[(i, j)] - x[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::InvalidInput(format!("{name} is not symmetric")));
            }
        }
    }
    Ok(())
}

/// Symmetric eigendecomposition returning `(U, lambda)`.
fn sym_eigen(x: MatRef<'_, f64>) -> Result<(Mat<f64>, Vec<f64>)> {
    let e = x
        .self_adjoint_eigen(Side::Lower)
        .map_err(|err| Error::Numerical(format!("symmetric eigendecomposition failed: {err:?}")))?;
    let u = e.U().to_owned();
    let vals: Vec<f64> = e.S().column_vector().iter().copied().collect();
    Ok((u, vals))
}

fn sym_function(x: MatRef<'_, f64>, f: impl Fn(f64) -> Result<f64>) -> Result<Mat<f64>> {
    let (u, vals) = sym_eigen(x)?;
    let n = x.nrows();
    let mut scaled = u.clone();
    for (k, l) in vals.iter().enumerate() {
        let fv = f(*l)?;
        for i in 0..n {
            scaled[(i, k)] *= fv;
        }
    }
    Ok(&scaled * u.transpose())
}

/// Tangent representation of `xi` in the chart at `x0`.
pub fn chart_log(
    x0: MatRef<'_, f64>,
    xi: MatRef<'_, f64>,
    manifold: OperatorManifold,
) -> Result<Mat<c64>> {
    match manifold {
        OperatorManifold::Euclidean => {
            if x0.nrows() != xi.nrows() || x0.ncols() != xi.ncols() {
                return Err(Error::DimensionMismatch("euclidean chart shapes".into()));
            }
            Ok(to_complex((xi - x0).as_ref()))
        }
        OperatorManifold::GlNonsingular => {
            let _ = check_square_same(x0, xi)?;
            // Xi X0^{-1} via X0^T Y^T = Xi^T.
            let yt = x0.transpose().partial_piv_lu().solve(xi.transpose());
            let ratio = yt.transpose().to_owned();
            logm(to_complex(ratio.as_ref()).as_ref())
        }
        OperatorManifold::Spd => {
            let _ = check_square_same(x0, xi)?;
            check_spd(x0, "chart reference")?;
            check_spd(xi, "chart argument")?;
            let inv_sqrt = sym_function(x0, |l| {
                if l <= 0.0 {
                    Err(Error::InvalidInput("chart reference is not positive definite".into()))
                } else {
                    Ok(1.0 / l.sqrt())
                }
            })?;
            let middle = &inv_sqrt * xi * &inv_sqrt;
            // Symmetrize against roundoff before the symmetric logarithm.
            let sym = faer::Scale(0.5) * (&middle + middle.transpose());
            let g = sym_function(sym.as_ref(), |l| {
                if l <= 0.0 {
                    Err(Error::InvalidInput("chart argument is not positive definite".into()))
                } else {
                    Ok(l.ln())
                }
            })?;
            Ok(to_complex(g.as_ref()))
        }
    }
}

/// Inverse of [`chart_log`]: maps a tangent matrix back to the manifold.
pub fn chart_exp(
    x0: MatRef<'_, f64>,
    gamma: MatRef<'_, c64>,
    manifold: OperatorManifold,
) -> Result<Mat<c64>> {
    match manifold {
        OperatorManifold::Euclidean => {
            if x0.nrows() != gamma.nrows() || x0.ncols() != gamma.ncols() {
                return Err(Error::DimensionMismatch("euclidean chart shapes".into()));
            }
            Ok(to_complex(x0) + gamma)
        }
        OperatorManifold::GlNonsingular => {
            if x0.nrows() != x0.ncols() || gamma.nrows() != x0.nrows() || gamma.ncols() != x0.ncols() {
                return Err(Error::DimensionMismatch("gl chart shapes".into()));
            }
            let e = expm(gamma)?;
            Ok(&e * to_complex(x0))
        }
        OperatorManifold::Spd => {
            if x0.nrows() != x0.ncols() || gamma.nrows() != x0.nrows() || gamma.ncols() != x0.ncols() {
                return Err(Error::DimensionMismatch("spd chart shapes".into()));
            }
            check_spd(x0, "chart reference")?;
            let g = real_part(gamma);
            let gsym = faer::Scale(0.5) * (&g + g.transpose());
            let sqrt = sym_function(x0, |l| {
                if l <= 0.0 {
                    Err(Error::InvalidInput("chart reference is not positive definite".into()))
                } else {
                    Ok(l.sqrt())
                }
            })?;
            let eg = sym_function(gsym.as_ref(), |l| Ok(l.exp()))?;
            Ok(to_complex((&sqrt * &eg * &sqrt).as_ref()))
        }
    }
}

/// True when `x0` sits where the chart is centered, i.e. `chart_log(x0, x0)`
/// vanishes; used by tests.
pub fn is_origin(gamma: MatRef<'_, c64>, scale: f64) -> bool {
    let mut worst = 0.0f64;
    for j in 0..gamma.ncols() {
        for i in 0..gamma.nrows() {
            worst = worst.max(gamma[(i, j)].norm());
        }
    }
    worst <= 1e-12 * scale.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, imag_part, max_abs};

    fn rel_defect(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
        max_abs((a.to_owned() - b).as_ref()) / max_abs(b).max(1e-30)
    }

    #[test]
    fn log_at_base_is_zero_all_manifolds() {
        let x = Mat::from_fn(3, 3, |i, j| if i == j { 2.0 + i as f64 } else { 0.2 });
        let xs = faer::Scale(0.5) * (&x + x.transpose());
        for m in [OperatorManifold::Euclidean, OperatorManifold::GlNonsingular, OperatorManifold::Spd] {
            let arg = if m == OperatorManifold::Spd { xs.as_ref() } else { x.as_ref() };
            let g = chart_log(arg, arg, m).unwrap();
            assert!(is_origin(g.as_ref(), max_abs(arg)), "{m:?}");
            let back = chart_exp(arg, g.as_ref(), m).unwrap();
            assert!(rel_defect(real_part(back.as_ref()).as_ref(), arg) < 1e-9, "{m:?}");
        }
    }

    #[test]
    fn gl_diagonal_log() {
        let x0 = identity(2);
        let xi = Mat::from_fn(2, 2, |i, j| if i == j { (i + 2) as f64 } else { 0.0 });
        let g = chart_log(x0.as_ref(), xi.as_ref(), OperatorManifold::GlNonsingular).unwrap();
        assert!((g[(0, 0)].re - 2.0f64.ln()).abs() < 1e-12);
        assert!((g[(1, 1)].re - 3.0f64.ln()).abs() < 1e-12);
        assert!(g[(0, 1)].norm() < 1e-13);
        assert!(max_abs(imag_part(g.as_ref()).as_ref()) < 1e-13);
    }

    #[test]
    fn spd_rejects_nonsymmetric() {
        let x0 = identity(2);
        let xi = Mat::from_fn(2, 2, |i, j| if (i, j) == (0, 1) { 1.0 } else if i == j { 2.0 } else { 0.0 });
        assert!(chart_log(x0.as_ref(), xi.as_ref(), OperatorManifold::Spd).is_err());
    }

    #[test]
    fn gl_rejects_negative_real_spectrum() {
        let x0 = identity(2);
        let xi = Mat::from_fn(2, 2, |i, j| if i == j { -1.0 } else { 0.0 });
        assert!(chart_log(x0.as_ref(), xi.as_ref(), OperatorManifold::GlNonsingular).is_err());
    }
}
