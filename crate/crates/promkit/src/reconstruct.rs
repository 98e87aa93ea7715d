//! Iteration-free reconstruction of observable trajectories from a local
//! reduced-order model: eigendecompose the reduced operator, expand the
//! initial condition in the mode basis and evolve each mode by powers of
//! its eigenvalue. A plain power-iteration route is kept for cross-checks
//! and as a fallback when the operator is defective.

use faer::{c64, Mat, MatRef};

use crate::data::ObservableLift;
use crate::dmd::LocalRom;
use crate::linalg::{lstsq_normal, to_complex};
use crate::{Error, Result};

/// Eigenvector-matrix condition number beyond which the operator is
/// treated as defective and reconstruction falls back to iteration.
const DEFECT_COND: f64 = 1e12;

/// Spectral expansion of a local ROM: modes `Phi = V Psi`, their discrete
/// eigenvalues, and the amplitudes fitted to an initial observable.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    /// N x r matrix of DMD modes.
    pub modes: Mat<c64>,
    /// Discrete-time eigenvalues of the reduced operator.
    pub eigenvalues: Vec<c64>,
    /// Mode amplitudes `omega`, least-squares fit of the initial condition.
    pub amplitudes: Vec<c64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Diagnostics {
    /// Largest eigenvalue magnitude of the reduced operator.
    pub spectral_radius: f64,
    /// Largest imaginary component left in any reconstructed observable,
    /// relative to the trajectory scale.
    pub max_imag_residue: f64,
    /// Largest drift of the constant leading observable from 1, for lifts
    /// that carry one.
    pub affine_drift: f64,
}

#[derive(Debug, Clone)]
pub struct PredictedTrajectory {
    /// N x (steps + 1) observable trajectory, initial condition first.
    pub observables: Mat<f64>,
    pub diagnostics: Diagnostics,
}

fn check_initial(rom: &LocalRom, y0: &[f64]) -> Result<()> {
    if y0.len() != rom.observable_dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial observable has dimension {}, model expects {}",
            y0.len(),
            rom.observable_dim()
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("initial observable".into()));
    }
    Ok(())
}

fn drift_of(lift: &ObservableLift, y: MatRef<'_, f64>) -> f64 {
    let mut worst = 0.0f64;
    let col: Vec<f64> = (0..y.nrows()).map(|i| y[(i, 0)]).collect();
    let mut buf = col;
    for k in 0..y.ncols() {
        for i in 0..y.nrows() {
            buf[i] = y[(i, k)];
        }
        worst = worst.max(lift.leading_drift(&buf));
    }
    worst
}

fn spectral_radius(eigs: &[c64]) -> f64 {
    eigs.iter().map(|l| l.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of the reduced operator, with amplitudes fitted to
/// `y0` by least squares on the modes. Errors when the operator is
/// numerically defective.
pub fn spectral_form(rom: &LocalRom, y0: &[f64]) -> Result<SpectralForm> {
    check_initial(rom, y0)?;
    let r = rom.rank();
    let e = rom
        .operator()
        .eigen()
        .map_err(|err| Error::Numerical(format!("eigendecomposition failed: {err:?}")))?;
    let psi = e.U().to_owned();
    let eigenvalues: Vec<c64> = (0..r).map(|k| e.S().column_vector()[k]).collect();
    let psi_sv = psi
        .as_ref()
        .singular_values()
        .map_err(|err| Error::Numerical(format!("SVD failed: {err:?}")))?;
    let smin = psi_sv.last().copied().unwrap_or(0.0);
    if smin <= 0.0 || psi_sv[0] / smin > DEFECT_COND {
        return Err(Error::Numerical(
            "reduced operator is numerically defective".into(),
        ));
    }
    let modes = to_complex(rom.basis()) * &psi;
    let y0c = Mat::from_fn(y0.len(), 1, |i, _| c64::new(y0[i], 0.0));
    let omega = lstsq_normal(modes.as_ref(), y0c.as_ref())?;
    let amplitudes: Vec<c64> = (0..r).map(|i| omega[(i, 0)]).collect();
    Ok(SpectralForm { modes, eigenvalues, amplitudes })
}

/// Evolves a spectral form over `steps` steps without iterating the
/// operator: column `k` is `Re(Phi Lambda^k omega)`.
pub fn evolve_spectral(
    form: &SpectralForm,
    lift: &ObservableLift,
    steps: usize,
) -> Result<PredictedTrajectory> {
    let (n, r) = (form.modes.nrows(), form.modes.ncols());
    if form.eigenvalues.len() != r || form.amplitudes.len() != r {
        return Err(Error::DimensionMismatch("spectral form shapes".into()));
    }
    let mut observables = Mat::zeros(n, steps + 1);
    let mut coeff: Vec<c64> = form.amplitudes.clone();
    let mut max_imag = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..=steps {
        for i in 0..n {
            let mut y = c64::new(0.0, 0.0);
            for (j, c) in coeff.iter().enumerate() {
                y += form.modes[(i, j)] * c;
            }
            observables[(i, k)] = y.re;
            max_imag = max_imag.max(y.im.abs());
            scale = scale.max(y.re.abs());
        }
        for (c, l) in coeff.iter_mut().zip(&form.eigenvalues) {
            *c *= l;
        }
    }
    if !observables.is_all_finite() {
        return Err(Error::NonFinite("reconstructed trajectory".into()));
    }
    let diagnostics = Diagnostics {
        spectral_radius: spectral_radius(&form.eigenvalues),
        max_imag_residue: max_imag / scale.max(1e-300),
        affine_drift: drift_of(lift, observables.as_ref()),
    };
    Ok(PredictedTrajectory { observables, diagnostics })
}

/// Power-iteration route: `q_{k+1} = K_r q_k` with `q_0 = V^T y_0`, columns
/// `y_k = V q_k`. Used as an oracle for the spectral route and as the
/// fallback for defective operators.
pub fn reconstruct_via_iteration(
    rom: &LocalRom,
    y0: &[f64],
    steps: usize,
) -> Result<PredictedTrajectory> {
    check_initial(rom, y0)?;
    let (n, r) = (rom.observable_dim(), rom.rank());
    let y0m = Mat::from_fn(n, 1, |i, _| y0[i]);
    let mut q = rom.basis().transpose() * &y0m;
    let mut observables = Mat::zeros(n, steps + 1);
    for k in 0..=steps {
        let y = rom.basis() * &q;
        for i in 0..n {
            observables[(i, k)] = y[(i, 0)];
        }
        if k < steps {
            q = rom.operator() * &q;
        }
    }
    if !observables.is_all_finite() {
        return Err(Error::NonFinite("reconstructed trajectory".into()));
    }
    let rho = rom
        .operator()
        .eigen()
        .map(|e| (0..r).map(|k| e.S().column_vector()[k].norm()).fold(0.0, f64::max))
        .unwrap_or(f64::NAN);
    let diagnostics = Diagnostics {
        spectral_radius: rho,
        max_imag_residue: 0.0,
        affine_drift: drift_of(rom.lift(), observables.as_ref()),
    };
    Ok(PredictedTrajectory { observables, diagnostics })
}

/// Iteration-free reconstruction of the observable trajectory from `y0`,
/// falling back to iteration when the operator is defective.
pub fn reconstruct_observables(
    rom: &LocalRom,
    y0: &[f64],
    steps: usize,
) -> Result<PredictedTrajectory> {
    match spectral_form(rom, y0) {
        Ok(form) => evolve_spectral(&form, rom.lift(), steps),
        Err(Error::Numerical(msg)) if msg.contains("defective") => {
            log::warn!("{msg}; using the iteration route");
            reconstruct_via_iteration(rom, y0, steps)
        }
        Err(e) => Err(e),
    }
}

/// Full online prediction for a QoI initial condition: lift, reconstruct
/// observables, unlift each column. Returns the QoI trajectory and the
/// reconstruction diagnostics.
pub fn predict_qoi_trajectory(
    rom: &LocalRom,
    q0: &[f64],
    steps: usize,
) -> Result<(Mat<f64>, Diagnostics)> {
    let lift = rom.lift();
    let y0 = lift.lift(q0)?;
    let y0s: Vec<f64> = (0..y0.nrows()).map(|i| y0[i]).collect();
    let traj = reconstruct_observables(rom, &y0s, steps)?;
    let nq = lift.qoi_dim();
    let mut qois = Mat::zeros(nq, steps + 1);
    let mut ybuf = vec![0.0f64; lift.observable_dim()];
    for k in 0..=steps {
        for i in 0..ybuf.len() {
            ybuf[i] = traj.observables[(i, k)];
        }
        let q = lift.unlift(&ybuf)?;
        for i in 0..nq {
            qois[(i, k)] = q[i];
        }
    }
    Ok((qois, traj.diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ParameterPoint;
    use crate::linalg::identity;

    fn rom_from(op: Mat<f64>, basis: Mat<f64>, lift: ObservableLift) -> LocalRom {
        let r = op.nrows();
        let sv = vec![1.0; r];
        LocalRom::new(ParameterPoint::scalar(0.0).unwrap(), basis, op, sv, lift).unwrap()
    }

    #[test]
    fn scalar_decay_matches_closed_form() {
        let rom = rom_from(
            Mat::from_fn(1, 1, |_, _| 0.5),
            identity(1),
            ObservableLift::Identity { dim: 1 },
        );
        let traj = reconstruct_observables(&rom, &[8.0], 3).unwrap();
        for (k, want) in [8.0, 4.0, 2.0, 1.0].iter().enumerate() {
            assert!((traj.observables[(0, k)] - want).abs() < 1e-12);
        }
        assert!((traj.diagnostics.spectral_radius - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rotation_spectral_equals_iteration() {
        // 2x2 rotation has complex eigenvalues; both routes must agree.
        let th = 0.37f64;
        let op = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => th.cos(),
            (0, 1) => -th.sin(),
            _ => th.sin(),
        });
        let rom = rom_from(op, identity(2), ObservableLift::Identity { dim: 2 });
        let y0 = [1.0, -0.5];
        let a = reconstruct_observables(&rom, &y0, 25).unwrap();
        let b = reconstruct_via_iteration(&rom, &y0, 25).unwrap();
        for k in 0..=25 {
            for i in 0..2 {
                assert!((a.observables[(i, k)] - b.observables[(i, k)]).abs() < 1e-11);
            }
        }
        assert!(a.diagnostics.max_imag_residue < 1e-12);
    }

    #[test]
    fn defective_operator_falls_back_to_iteration() {
        // Jordan block: one eigenvector, cond(Psi) blows up.
        let op = Mat::from_fn(2, 2, |i, j| {
            if i == j {
                0.9
            } else if (i, j) == (0, 1) {
                1.0
            } else {
                0.0
            }
        });
        let rom = rom_from(op.clone(), identity(2), ObservableLift::Identity { dim: 2 });
        let y0 = [1.0, 1.0];
        let traj = reconstruct_observables(&rom, &y0, 3).unwrap();
        // oracle: direct matrix powers
        let mut q = Mat::from_fn(2, 1, |i, _| y0[i]);
        for k in 0..=3 {
            for i in 0..2 {
                assert!((traj.observables[(i, k)] - q[(i, 0)]).abs() < 1e-12, "step {k}");
            }
            q = &op * &q;
        }
    }

    #[test]
    fn affine_lift_drift_is_tracked() {
        // Operator that corrupts the constant slot on purpose.
        let op = Mat::from_fn(2, 2, |i, j| if i == j { if i == 0 { 0.9 } else { 1.0 } } else { 0.0 });
        let rom = rom_from(op, identity(2), ObservableLift::AffineAugment { qoi_dim: 1 });
        let traj = reconstruct_observables(&rom, &[1.0, 2.0], 1).unwrap();
        assert!((traj.diagnostics.affine_drift - 0.1).abs() < 1e-12);
    }

    #[test]
    fn qoi_prediction_unlifts() {
        // Homogeneous form of q <- 0.5 q + 1 via the affine lift.
        let op = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 0) => 1.0,
            (1, 1) => 0.5,
            _ => 0.0,
        });
        let rom = rom_from(op, identity(2), ObservableLift::AffineAugment { qoi_dim: 1 });
        let (qois, diag) = predict_qoi_trajectory(&rom, &[0.0], 4).unwrap();
        let mut want = 0.0f64;
        for k in 0..=4 {
            assert!((qois[(0, k)] - want).abs() < 1e-10, "step {k}");
            want = 0.5 * want + 1.0;
        }
        assert!(diag.affine_drift < 1e-10);
    }

    #[test]
    fn wrong_initial_dimension_is_rejected() {
        let rom = rom_from(identity(2), identity(2), ObservableLift::Identity { dim: 2 });
        assert!(reconstruct_observables(&rom, &[1.0], 2).is_err());
    }
}
