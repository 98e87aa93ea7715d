//! Logarithm and exponential maps on the Grassmann manifold G(r, N),
//! with reduced-order bases as Stiefel representatives.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};

use crate::linalg::{max_abs, orthonormality_defect, thin_svd_signed};
use crate::{Error, Result};

/// Smallest admissible singular value of `P = V0^T Vi`; below this the
/// subspace lies outside the logarithm chart at `V0`.
pub const CHART_EPS: f64 = 1e-10;

fn check_basis(v: MatRef<'_, f64>, name: &str) -> Result<()> {
    let defect = orthonormality_defect(v);
    if defect > 1e-8 {
        return Err(Error::Numerical(format!(
            "{name} is not orthonormal (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Maps the subspace spanned by `vi` to the tangent space at `v0`:
/// thin SVD `(I - V0 V0^T) Vi P^{-1} = U Omega W^T` with `P = V0^T Vi`,
/// then `Gamma = U atan(Omega) W^T`.
pub fn grassmann_log(
    v0: MatRef<'_, f64>,
    vi: MatRef<'_, f64>,
    p: MatRef<'_, f64>,
) -> Result<Mat<f64>> {
    let (n, r) = (v0.nrows(), v0.ncols());
    if vi.nrows() != n || vi.ncols() != r || p.nrows() != r || p.ncols() != r {
        return Err(Error::DimensionMismatch("grassmann_log shapes".into()));
    }
    check_basis(v0, "reference basis")?;
    check_basis(vi, "target basis")?;
    let p_sv = p
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    if p_sv.last().copied().unwrap_or(0.0) <= CHART_EPS {
        return Err(Error::Numerical(
            "subspace outside log-chart domain: V0^T Vi is singular".into(),
        ));
    }
    // (I - V0 V0^T) Vi = Vi - V0 P, then right-multiply by P^{-1}.
    let resid = vi - v0 * p;
    let lt = p.transpose().partial_piv_lu().solve(resid.transpose());
    let l = lt.transpose().to_owned();
    let (u, omega, w) = thin_svd_signed(l.as_ref())?;
    // U atan(Omega) W^T with the arctangent absorbed into W's columns.
    let mut wa = w;
    for k in 0..r {
        let a = omega[k].atan();
        for j in 0..wa.nrows() {
            wa[(j, k)] *= a;
        }
    }
    Ok(&u * wa.transpose())
}

/// Maps a tangent matrix at `v0` back to a Stiefel representative of the
/// corresponding subspace: thin SVD `Gamma = U Omega W^T`, then
/// `V = V0 W cos(Omega) W^T + U sin(Omega) W^T`.
pub fn grassmann_exp(v0: MatRef<'_, f64>, gamma: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let (n, r) = (v0.nrows(), v0.ncols());
    if gamma.nrows() != n || gamma.ncols() != r {
        return Err(Error::DimensionMismatch("grassmann_exp shapes".into()));
    }
    check_basis(v0, "reference basis")?;
    if max_abs(gamma) == 0.0 {
        return Ok(v0.to_owned());
    }
    let (u, omega, w) = thin_svd_signed(gamma)?;
    let mut cosw = Mat::zeros(r, r);
    let mut sinw = Mat::zeros(r, r);
    for k in 0..r {
        for j in 0..r {
            cosw[(k, j)] = omega[k].cos() * w[(j, k)];
            sinw[(k, j)] = omega[k].sin() * w[(j, k)];
        }
    }
    Ok(v0 * &w * &cosw + &u * &sinw)
}

/// Principal angles between the column spaces of two orthonormal bases,
/// in ascending order.
///
/// Angles below pi/4 are recovered from the singular values of the
/// projection residual `B - A(A^T B)` via the arcsine; the cosine-based
/// arccosine cannot resolve angles below about 1e-8.
pub fn principal_angles(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Result<Vec<f64>> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch("principal_angles shapes".into()));
    }
    check_basis(a, "first basis")?;
    check_basis(b, "second basis")?;
    let p = a.transpose() * b;
    let cosines = p
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let resid = b - a * &p;
    let sines = resid
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let r = cosines.len();
    // cosines descend (angles ascend); sines descend (angles descend), so
    // the k-th smallest angle pairs with the k-th smallest sine.
    Ok((0..r)
        .map(|k| {
            let c = cosines[k].clamp(-1.0, 1.0);
            if c * c > 0.5 {
                sines[r - 1 - k].clamp(-1.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .collect())
}
