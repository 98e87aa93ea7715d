//! Viscous Burgers equation on the periodic unit interval, finite-volume
//! with a local Lax-Friedrichs (Rusanov) convective flux and explicit
//! centered diffusion. The viscosity is the model parameter; snapshots are
//! taken on a uniform grid inside a late time window after a spin-up from
//! the sinusoidal initial profile.

use faer::Mat;

use crate::data::{ParameterPoint, SnapshotSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgersConfig {
    /// Viscosity (the model parameter).
    pub nu: f64,
    /// Number of finite-volume cells on [0, 1].
    pub n_cells: usize,
    /// CFL safety factor for the explicit substeps.
    pub cfl: f64,
}

impl BurgersConfig {
    pub fn with_nu(nu: f64) -> Self {
        Self { nu, n_cells: 256, cfl: 0.4 }
    }
}

/// Cell-centered initial profile `0.5 + sin(2 pi x)`.
pub fn initial_state(n_cells: usize) -> Vec<f64> {
    (0..n_cells)
        .map(|i| {
            let x = (i as f64 + 0.5) / n_cells as f64;
            0.5 + (2.0 * std::f64::consts::PI * x).sin()
        })
        .collect()
}

fn stable_dt(s: &[f64], dx: f64, nu: f64, cfl: f64) -> f64 {
    let smax = s.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
    let dt_adv = dx / smax;
    let dt_diff = if nu > 0.0 { dx * dx / (2.0 * nu) } else { f64::INFINITY };
    cfl * dt_adv.min(dt_diff)
}

/// One conservative explicit step of size `dt`.
fn explicit_step(s: &mut [f64], dx: f64, dt: f64, nu: f64) {
    let n = s.len();
    // Rusanov interface fluxes; index i is the face between cells i-1 and i
    let mut flux = vec![0.0f64; n];
    for i in 0..n {
        let l = s[(i + n - 1) % n];
        let r = s[i];
        let a = l.abs().max(r.abs());
        flux[i] = 0.25 * (l * l + r * r) - 0.5 * a * (r - l);
    }
    let old = s.to_vec();
    for i in 0..n {
        let conv = (flux[(i + 1) % n] - flux[i]) / dx;
        let diff = nu * (old[(i + 1) % n] - 2.0 * old[i] + old[(i + n - 1) % n]) / (dx * dx);
        s[i] = old[i] + dt * (diff - conv);
    }
}

/// Advances `s` from `t` to `t_end` with stability-limited substeps.
pub fn advance(s: &mut [f64], t: f64, t_end: f64, cfg: &BurgersConfig) -> Result<()> {
    if t_end < t {
        return Err(Error::InvalidInput("time must advance forward".into()));
    }
    let dx = 1.0 / cfg.n_cells as f64;
    let mut now = t;
    while now < t_end - 1e-14 {
        let dt = stable_dt(s, dx, cfg.nu, cfg.cfl).min(t_end - now);
        explicit_step(s, dx, dt, cfg.nu);
        now += dt;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state diverged at t = {now:.4}")));
        }
    }
    Ok(())
}

/// Spins up from `t = 0` and records `n_snapshots + 1` uniformly spaced
/// states covering `[window.0, window.1]`.
pub fn simulate_window(
    cfg: &BurgersConfig,
    window: (f64, f64),
    n_snapshots: usize,
) -> Result<SnapshotSet> {
    if !(cfg.nu >= 0.0) || cfg.n_cells < 8 || !(cfg.cfl > 0.0 && cfg.cfl <= 1.0) {
        return Err(Error::InvalidInput("bad Burgers configuration".into()));
    }
    if !(window.1 > window.0) || window.0 < 0.0 || n_snapshots == 0 {
        return Err(Error::InvalidInput("bad snapshot window".into()));
    }
    let n = cfg.n_cells;
    let dt_snap = (window.1 - window.0) / n_snapshots as f64;
    let mut s = initial_state(n);
    advance(&mut s, 0.0, window.0, cfg)?;
    let mut data = Mat::zeros(n, n_snapshots + 1);
    for k in 0..=n_snapshots {
        for i in 0..n {
            data[(i, k)] = s[i];
        }
        if k < n_snapshots {
            let t = window.0 + k as f64 * dt_snap;
            advance(&mut s, t, t + dt_snap, cfg)?;
        }
    }
    SnapshotSet::new(data, window.0, dt_snap, ParameterPoint::scalar(cfg.nu)?, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(s: &[f64]) -> f64 {
        s.iter().sum::<f64>() / s.len() as f64
    }

    #[test]
    fn momentum_is_conserved() {
        // Both flux differences and periodic diffusion telescope, so the
        // cell average is exactly conserved.
        let cfg = BurgersConfig { nu: 0.01, n_cells: 64, cfl: 0.4 };
        let mut s = initial_state(cfg.n_cells);
        let m0 = mean(&s);
        advance(&mut s, 0.0, 0.5, &cfg).unwrap();
        assert!((mean(&s) - m0).abs() < 1e-12);
    }

    #[test]
    fn strong_viscosity_flattens_the_profile() {
        let cfg = BurgersConfig { nu: 0.05, n_cells: 64, cfl: 0.4 };
        let mut s = initial_state(cfg.n_cells);
        let amp0 = s.iter().fold(0.0f64, |a, v| a.max((v - 0.5).abs()));
        advance(&mut s, 0.0, 1.0, &cfg).unwrap();
        let m = mean(&s);
        let amp1 = s.iter().fold(0.0f64, |a, v| a.max((v - m).abs()));
        assert!(amp1 < 0.3 * amp0, "amp {amp0} -> {amp1}");
    }

    #[test]
    fn refinement_converges_on_smooth_solution() {
        // High viscosity keeps the solution smooth; halving the mesh must
        // shrink the disagreement with a fine reference.
        let t = 0.2;
        let run = |n: usize| {
            let cfg = BurgersConfig { nu: 0.05, n_cells: n, cfl: 0.4 };
            let mut s = initial_state(n);
            advance(&mut s, 0.0, t, &cfg).unwrap();
            s
        };
        let fine = run(256);
        let err = |coarse: &[f64]| {
            let ratio = 256 / coarse.len();
            let mut e = 0.0f64;
            for (i, v) in coarse.iter().enumerate() {
                // compare cell averages of the fine solution
                let avg: f64 =
                    fine[i * ratio..(i + 1) * ratio].iter().sum::<f64>() / ratio as f64;
                e = e.max((v - avg).abs());
            }
            e
        };
        let e64 = err(&run(64));
        let e128 = err(&run(128));
        assert!(e128 < 0.6 * e64, "e64 {e64}, e128 {e128}");
    }

    #[test]
    fn snapshot_window_has_uniform_grid() {
        let cfg = BurgersConfig { nu: 0.02, n_cells: 32, cfl: 0.4 };
        let s = simulate_window(&cfg, (0.5, 0.8), 10).unwrap();
        assert_eq!(s.n_cols(), 11);
        assert!((s.t0() - 0.5).abs() < 1e-15);
        assert!((s.dt() - 0.03).abs() < 1e-15);
        assert_eq!(s.parameter().values(), &[0.02]);
    }

    #[test]
    fn inviscid_limit_stays_bounded() {
        // Rusanov dissipation alone must keep the sawtooth stable.
        let cfg = BurgersConfig { nu: 0.0, n_cells: 64, cfl: 0.4 };
        let mut s = initial_state(cfg.n_cells);
        advance(&mut s, 0.0, 2.0, &cfg).unwrap();
        assert!(s.iter().all(|v| v.abs() < 2.0));
    }
}
