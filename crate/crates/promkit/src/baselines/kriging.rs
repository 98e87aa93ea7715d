//! Gaussian-process regression surrogate over a scalar parameter axis.
//! Each trajectory entry is treated as an independent output sharing one
//! squared-exponential correlation model, so a prediction at a new
//! parameter reduces to a single weight vector applied entrywise to the
//! mean-centered training trajectories.

use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::data::SnapshotSet;
use crate::parallel;
use crate::{Error, Result};

/// Jitter added to the correlation diagonal for numerical stability.
pub const NUGGET: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct KrigingSurrogate {
    params: Vec<f64>,
    /// entry (i, s): trajectory entry i of training sample s, mean-centered
    centered: Mat<f64>,
    /// per-entry mean over the samples
    mean: Vec<f64>,
    corr_lu: faer::linalg::solvers::PartialPivLu<f64>,
    length_scale: f64,
    shape: (usize, usize),
    t0: f64,
    dt: f64,
}

fn corr(a: f64, b: f64, ell: f64) -> f64 {
    let d = (a - b) / ell;
    (-0.5 * d * d).exp()
}

impl KrigingSurrogate {
    /// Fits the surrogate to full trajectories at scalar parameter samples.
    /// The length scale defaults to half the parameter range.
    pub fn fit(datasets: &[SnapshotSet], length_scale: Option<f64>) -> Result<Self> {
        if datasets.len() < 2 {
            return Err(Error::InvalidInput("need >= 2 training samples".into()));
        }
        let shape = (datasets[0].qoi_dim(), datasets[0].n_cols());
        let (t0, dt) = (datasets[0].t0(), datasets[0].dt());
        let mut params = Vec::with_capacity(datasets.len());
        for d in datasets {
            if (d.qoi_dim(), d.n_cols()) != shape {
                return Err(Error::DimensionMismatch("inconsistent trajectory shapes".into()));
            }
            if d.parameter().dim() != 1 {
                return Err(Error::InvalidInput(
                    "the surrogate regresses over a scalar parameter".into(),
                ));
            }
            params.push(d.parameter().values()[0]);
        }
        let lo = params.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = params.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::InvalidInput("parameter samples must not coincide".into()));
        }
        let ell = match length_scale {
            Some(l) if l > 0.0 => l,
            Some(_) => return Err(Error::InvalidInput("length scale must be positive".into())),
            None => 0.5 * (hi - lo),
        };

        let p = params.len();
        let n_entries = shape.0 * shape.1;
        let mut mean = vec![0.0f64; n_entries];
        for d in datasets {
            for k in 0..shape.1 {
                for i in 0..shape.0 {
                    mean[i + shape.0 * k] += d.data()[(i, k)] / p as f64;
                }
            }
        }
        let mut centered = Mat::zeros(n_entries, p);
        for (s, d) in datasets.iter().enumerate() {
            for k in 0..shape.1 {
                for i in 0..shape.0 {
                    let e = i + shape.0 * k;
                    centered[(e, s)] = d.data()[(i, k)] - mean[e];
                }
            }
        }
        let r = Mat::from_fn(p, p, |i, j| {
            corr(params[i], params[j], ell) + if i == j { NUGGET } else { 0.0 }
        });
        let corr_lu = r.partial_piv_lu();
        Ok(Self { params, centered, mean, corr_lu, length_scale: ell, shape, t0, dt })
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Simple-kriging weights for a target parameter.
    pub fn weights(&self, target: f64) -> Result<Vec<f64>> {
        if !target.is_finite() {
            return Err(Error::NonFinite("target parameter".into()));
        }
        let p = self.params.len();
        let rhs = Mat::from_fn(p, 1, |i, _| corr(self.params[i], target, self.length_scale));
        let w = self.corr_lu.solve(&rhs);
        Ok((0..p).map(|i| w[(i, 0)]).collect())
    }

    /// Predicted trajectory at a target parameter, entrywise
    /// `mean + sum_s w_s (y_s - mean)`.
    pub fn predict(&self, target: f64) -> Result<Mat<f64>> {
        let w = self.weights(target)?;
        let (nq, nc) = self.shape;
        let rows: Vec<usize> = (0..nq).collect();
        let cols = parallel::map_collect(&rows, |&i| {
            let mut col = vec![0.0f64; nc];
            for k in 0..nc {
                let e = i + nq * k;
                let mut v = self.mean[e];
                for (s, ws) in w.iter().enumerate() {
                    v += ws * self.centered[(e, s)];
                }
                col[k] = v;
            }
            col
        });
        let out = Mat::from_fn(nq, nc, |i, k| cols[i][k]);
        if !out.is_all_finite() {
            return Err(Error::NonFinite("surrogate prediction".into()));
        }
        Ok(out)
    }
}

/// Convenience: fit on `datasets` and predict at `target` in one call.
pub fn kriging_predict(datasets: &[SnapshotSet], target: f64) -> Result<Mat<f64>> {
    KrigingSurrogate::fit(datasets, None)?.predict(target)
}
