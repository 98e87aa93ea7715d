//! Trajectory error metrics: per-step and aggregate relative L2 errors
//! between a predicted and a reference QoI trajectory.

use faer::MatRef;

use crate::{Error, Result};

fn check_shapes(pred: MatRef<'_, f64>, reference: MatRef<'_, f64>) -> Result<()> {
    if pred.nrows() != reference.nrows() || pred.ncols() != reference.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "trajectory shapes differ: {}x{} vs {}x{}",
            pred.nrows(),
            pred.ncols(),
            reference.nrows(),
            reference.ncols()
        )));
    }
    if pred.ncols() == 0 {
        return Err(Error::InvalidInput("empty trajectories".into()));
    }
    Ok(())
}

fn col_norms(pred: MatRef<'_, f64>, reference: MatRef<'_, f64>, k: usize) -> (f64, f64) {
    let mut d2 = 0.0f64;
    let mut r2 = 0.0f64;
    for i in 0..pred.nrows() {
        let d = pred[(i, k)] - reference[(i, k)];
        d2 += d * d;
        r2 += reference[(i, k)] * reference[(i, k)];
    }
    (d2.sqrt(), r2.sqrt())
}

/// Per-step relative error `e(t_k) = ||pred_k - ref_k|| / ||ref_k||`.
/// A zero reference column yields the absolute error instead.
pub fn relative_l2_series(pred: MatRef<'_, f64>, reference: MatRef<'_, f64>) -> Result<Vec<f64>> {
    check_shapes(pred, reference)?;
    let mut out = Vec::with_capacity(pred.ncols());
    for k in 0..pred.ncols() {
        let (d, r) = col_norms(pred, reference, k);
        out.push(if r > 0.0 { d / r } else { d });
    }
    Ok(out)
}

/// Aggregate relative error over the whole trajectory,
/// `sqrt(sum_k ||pred_k - ref_k||^2) / sqrt(sum_k ||ref_k||^2)`.
/// By default the sum starts at the first evolved step (`k = 1`), since
/// both trajectories share the initial condition; `include_initial`
/// extends it to `k = 0`.
pub fn total_relative_l2(
    pred: MatRef<'_, f64>,
    reference: MatRef<'_, f64>,
    include_initial: bool,
) -> Result<f64> {
    check_shapes(pred, reference)?;
    let k0 = if include_initial { 0 } else { 1 };
    if k0 >= pred.ncols() {
        return Err(Error::InvalidInput(
            "need at least one evolved step for the aggregate error".into(),
        ));
    }
    let mut d2 = 0.0f64;
    let mut r2 = 0.0f64;
    for k in k0..pred.ncols() {
        let (d, r) = col_norms(pred, reference, k);
        d2 += d * d;
        r2 += r * r;
    }
    if r2 == 0.0 {
        return Ok(d2.sqrt());
    }
    Ok((d2 / r2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;

    #[test]
    fn identical_trajectories_have_zero_error() {
        let m = Mat::from_fn(3, 4, |i, j| (i + j) as f64);
        assert_eq!(relative_l2_series(m.as_ref(), m.as_ref()).unwrap(), vec![0.0; 4]);
        assert_eq!(total_relative_l2(m.as_ref(), m.as_ref(), false).unwrap(), 0.0);
    }

    #[test]
    fn per_step_error_matches_hand_computation() {
        let reference = Mat::from_fn(2, 2, |i, _| if i == 0 { 3.0 } else { 4.0 });
        let mut pred = reference.clone();
        pred[(0, 1)] += 1.0; // ||delta|| = 1, ||ref|| = 5
        let e = relative_l2_series(pred.as_ref(), reference.as_ref()).unwrap();
        assert_eq!(e[0], 0.0);
        assert!((e[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn aggregate_excludes_initial_by_default() {
        let reference = Mat::from_fn(1, 3, |_, _| 2.0);
        let mut pred = reference.clone();
        pred[(0, 0)] = 100.0; // only the shared-initial column differs
        assert_eq!(total_relative_l2(pred.as_ref(), reference.as_ref(), false).unwrap(), 0.0);
        assert!(total_relative_l2(pred.as_ref(), reference.as_ref(), true).unwrap() > 1.0);
    }

    #[test]
    fn zero_reference_column_uses_absolute_error() {
        let reference = Mat::zeros(2, 1);
        let pred = Mat::from_fn(2, 1, |i, _| if i == 0 { 3.0 } else { 4.0 });
        let e = relative_l2_series(pred.as_ref(), reference.as_ref()).unwrap();
        assert!((e[0] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let a = Mat::zeros(2, 3);
        let b = Mat::zeros(2, 4);
        assert!(relative_l2_series(a.as_ref(), b.as_ref()).is_err());
    }
}
