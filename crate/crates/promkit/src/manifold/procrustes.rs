//! Orthogonal Procrustes alignment of reduced operators into the
//! generalized coordinates of a reference basis.

use faer::{Mat, MatRef};

use crate::linalg::thin_svd_signed;
use crate::{Error, Result};

/// Orthogonal factor `Q = U Z^T` from the SVD `P = U Sigma Z^T` of a Gram
/// block `P^(i,i0) = V_i^T V_{i0}`. Errors when `P` is rank deficient.
pub fn procrustes_rotation(p: MatRef<'_, f64>) -> Result<Mat<f64>> {
    if p.nrows() != p.ncols() {
        return Err(Error::DimensionMismatch("Procrustes needs a square Gram block".into()));
    }
    let (u, sv, z) = thin_svd_signed(p)?;
    if sv.last().copied().unwrap_or(0.0) < 1e-12 {
        return Err(Error::Numerical(
            "alignment ill-posed: rank-deficient Gram block".into(),
        ));
    }
    Ok(&u * z.transpose())
}

/// Aligns each operator `K_i` into the coordinates of sample `i0`:
/// `K~_i = Q_i^T K_i Q_i` with `Q_i` from the Gram block `P^(i,i0)`.
/// `gram` must yield `P^(i,j) = V_i^T V_j`.
pub fn align_operators(
    ops: &[MatRef<'_, f64>],
    gram: impl Fn(usize, usize) -> Mat<f64>,
    i0: usize,
) -> Result<Vec<Mat<f64>>> {
    if i0 >= ops.len() {
        return Err(Error::InvalidInput(format!("reference index {i0} out of range")));
    }
    let mut out = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        if i == i0 {
            out.push(op.to_owned());
        } else {
            let q = procrustes_rotation(gram(i, i0).as_ref())?;
            out.push(q.transpose() * op * &q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;

    #[test]
    fn self_alignment_is_identity() {
        let k = Mat::from_fn(3, 3, |i, j| ((i + 2 * j) as f64).cos());
        let ops = [k.as_ref(), k.as_ref()];
        let aligned = align_operators(&ops, |_, _| identity(3), 0).unwrap();
        for j in 0..3 {
            for i in 0..3 {
                assert_eq!(aligned[0][(i, j)], k[(i, j)]);
                // P = I gives Q = I, so the other operator is unchanged too.
                assert!((aligned[1][(i, j)] - k[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotated_basis_recovers_reference_operator() {
        // V_i = V_0 R with R orthogonal, and K_i expressed in V_i coordinates
        // as R^T K_0 R. Alignment must recover K_0.
        let theta = 0.7f64;
        let r_rot = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => theta.cos(),
            (0, 1) => -theta.sin(),
            _ => theta.sin(),
        });
        let k0 = Mat::from_fn(2, 2, |i, j| 0.5 * ((i * 2 + j) as f64) - 0.3);
        let ki = r_rot.transpose() * &k0 * &r_rot;
        // P^(i,0) = V_i^T V_0 = R^T.
        let p_i0 = r_rot.transpose().to_owned();
        let ops = [k0.as_ref(), ki.as_ref()];
        let aligned = align_operators(
            &ops,
            |i, j| {
                assert_eq!((i, j), (1, 0));
                p_i0.clone()
            },
            0,
        )
        .unwrap();
        for j in 0..2 {
            for i in 0..2 {
                assert!((aligned[1][(i, j)] - k0[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_deficient_gram_is_rejected() {
        let p = Mat::zeros(2, 2);
        assert!(procrustes_rotation(p.as_ref()).is_err());
    }
}
