//! Dense linear algebra helpers shared across the crate: deterministic
//! thin SVD, matrix exponential and principal logarithm, and small
//! conversion/norm utilities.

use faer::linalg::solvers::Solve;
use faer::{c64, Mat, MatRef};

use crate::{Error, Result};

/// Thin SVD `A = U diag(s) V^T` with a deterministic sign convention: the
/// entry of largest magnitude in each left singular vector is made positive.
/// Returns `(U, s, V)` with singular values in nonincreasing order.
pub fn thin_svd_signed(a: MatRef<'_, f64>) -> Result<(Mat<f64>, Vec<f64>, Mat<f64>)> {
    let svd = a
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD failed to converge: {e:?}")))?;
    let mut u = svd.U().to_owned();
    let mut v = svd.V().to_owned();
    let s: Vec<f64> = svd.S().column_vector().iter().copied().collect();
    for j in 0..u.ncols() {
        let mut imax = 0;
        let mut best = -1.0f64;
        for i in 0..u.nrows() {
            let m = u[(i, j)].abs();
            if m > best {
                best = m;
                imax = i;
            }
        }
        if u[(imax, j)] < 0.0 {
            for i in 0..u.nrows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.nrows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    Ok((u, s, v))
}

/// `max_ij |(V^T V - I)_ij|`, a measure of column orthonormality.
pub fn orthonormality_defect(v: MatRef<'_, f64>) -> f64 {
    let g = v.transpose() * v;
    let mut worst = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

pub fn identity(n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

pub fn identity_c(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

pub fn to_complex(a: MatRef<'_, f64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0))
}

pub fn real_part(a: MatRef<'_, c64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].re)
}

pub fn imag_part(a: MatRef<'_, c64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)].im)
}

pub fn max_abs(a: MatRef<'_, f64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

pub fn frob_norm(a: MatRef<'_, f64>) -> f64 {
    a.norm_l2()
}

fn one_norm_c(a: MatRef<'_, c64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let mut s = 0.0;
        for i in 0..a.nrows() {
            s += a[(i, j)].norm();
        }
        best = best.max(s);
    }
    best
}

/// Matrix exponential of a complex square matrix by Pade-13 scaling and
/// squaring (Higham's method with fixed degree).
pub fn expm(a: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("expm needs a square matrix".into()));
    }
    const THETA_13: f64 = 5.371920351148152;
    let norm = one_norm_c(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = c64::new(0.5f64.powi(s as i32), 0.0);
    let a1 = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let id = identity_c(n);
    let a2 = &a1 * &a1;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let cb = |k: usize| c64::new(B[k], 0.0);
    let w1: Mat<c64> = faer::Scale(cb(13)) * &a6 + faer::Scale(cb(11)) * &a4 + faer::Scale(cb(9)) * &a2;
    let w2: Mat<c64> = faer::Scale(cb(7)) * &a6 + faer::Scale(cb(5)) * &a4 + faer::Scale(cb(3)) * &a2
        + faer::Scale(cb(1)) * &id;
    let u = &a1 * (&a6 * &w1 + &w2);
    let z1: Mat<c64> = faer::Scale(cb(12)) * &a6 + faer::Scale(cb(10)) * &a4 + faer::Scale(cb(8)) * &a2;
    let v: Mat<c64> = &a6 * &z1
        + faer::Scale(cb(6)) * &a6
        + faer::Scale(cb(4)) * &a4
        + faer::Scale(cb(2)) * &a2
        + faer::Scale(cb(0)) * &id;

    let lhs = &v - &u;
    let rhs = &v + &u;
    let lu = lhs.partial_piv_lu();
    let mut r = lu.solve(&rhs);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// Principal matrix logarithm of a complex square matrix, computed through
/// its eigendecomposition. Requires the matrix to be diagonalizable with no
/// eigenvalue on the closed negative real axis.
pub fn logm(a: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch("logm needs a square matrix".into()));
    }
    let eig = a
        .eigen()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let vecs = eig.U().to_owned();
    let vals: Vec<c64> = eig.S().column_vector().iter().copied().collect();
    let scale = vals.iter().map(|l| l.norm()).fold(0.0f64, f64::max).max(1.0);
    for l in &vals {
        if l.norm() <= 1e-300 {
            return Err(Error::Numerical("logm of a singular matrix".into()));
        }
        if l.re <= 0.0 && l.im.abs() <= 1e-12 * scale {
            return Err(Error::Numerical(
                "eigenvalue on the closed negative real axis; no principal logarithm".into(),
            ));
        }
    }
    // Diagonalization quality check via the conditioning of the eigenvector
    // matrix; near-defective operators are rejected.
    let sv = vecs
        .as_ref()
        .singular_values()
        .map_err(|e| Error::Numerical(format!("SVD failed: {e:?}")))?;
    let smin = sv.last().copied().unwrap_or(0.0);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smin <= 0.0 || smax / smin > 1e12 {
        return Err(Error::Numerical("matrix is defective or near-defective in logm".into()));
    }
    let log_vals = Mat::from_fn(n, n, |i, j| {
        if i == j {
            vals[i].ln()
        } else {
            c64::new(0.0, 0.0)
        }
    });
    let left = &vecs * &log_vals;
    // X = left * S^{-1}  <=>  S^T X^T = left^T
    let xt = vecs.transpose().partial_piv_lu().solve(left.transpose());
    Ok(xt.transpose().to_owned())
}

/// Solves the least-squares problem `A x = b` for complex `A` (tall or
/// square, full column rank) via the normal equations.
pub fn lstsq_normal(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<Mat<c64>> {
    let ata = a.adjoint() * a;
    let atb = a.adjoint() * b;
    let lu = ata.partial_piv_lu();
    Ok(lu.solve(&atb))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> c64 {
        c64::new(re, im)
    }

    #[test]
    fn expm_of_diagonal() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { c(((i + 1) as f64).ln(), 0.0) } else { c(0.0, 0.0) });
        let e = expm(a.as_ref()).unwrap();
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((e[(1, 1)].re - 2.0).abs() < 1e-12);
        assert!(e[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn logm_of_diagonal() {
        let a = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 2.0 } else { 3.0 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let l = logm(a.as_ref()).unwrap();
        assert!((l[(0, 0)].re - 2.0f64.ln()).abs() < 1e-12);
        assert!((l[(1, 1)].re - 3.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn logm_rejects_negative_real_axis() {
        let a = Mat::from_fn(2, 2, |i, j| if i == j { c(-1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(logm(a.as_ref()).is_err());
    }

    #[test]
    fn expm_logm_roundtrip() {
        let a = Mat::from_fn(3, 3, |i, j| c(0.3 * ((i * 3 + j) as f64).sin(), 0.1 * (i as f64 - j as f64)));
        let x = expm(a.as_ref()).unwrap();
        let l = logm(x.as_ref()).unwrap();
        let e = expm(l.as_ref()).unwrap();
        let mut worst = 0.0f64;
        for j in 0..3 {
            for i in 0..3 {
                worst = worst.max((e[(i, j)] - x[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-10, "roundtrip defect {worst}");
    }

    #[test]
    fn signed_svd_is_deterministic_and_accurate() {
        let a = Mat::from_fn(5, 3, |i, j| ((i * 7 + j * 3) as f64).sin());
        let (u, s, v) = thin_svd_signed(a.as_ref()).unwrap();
        let sd = Mat::from_fn(3, 3, |i, j| if i == j { s[i] } else { 0.0 });
        let back = &u * &sd * v.transpose();
        assert!(max_abs((&back - &a).as_ref()) < 1e-12);
        for j in 0..3 {
            let mut imax = 0;
            let mut best = -1.0;
            for i in 0..5 {
                if u[(i, j)].abs() > best {
                    best = u[(i, j)].abs();
                    imax = i;
                }
            }
            assert!(u[(imax, j)] > 0.0);
        }
    }
}
