//! Snapshot data model: parameter points, trajectories of QoIs, observable
//! lifts and their inverses, and the on-disk formats for both.

mod io;
mod lift;

pub use io::{
    read_matrix_file, read_model_bundle, read_snapshot_file, write_matrix_file, write_model_bundle,
    write_snapshot_file, SnapshotMeta, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};
pub use lift::ObservableLift;

use faer::{Mat, MatRef};

use crate::{Error, Result};

/// A point in parameter space, `N_par >= 1` finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    values: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("parameter point needs >= 1 entry".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("parameter point".into()));
        }
        Ok(Self { values })
    }

    /// Convenience constructor for a single scalar parameter.
    pub fn scalar(p: f64) -> Result<Self> {
        Self::new(vec![p])
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A trajectory of QoI column vectors at one parameter point, on a uniform
/// time grid `t_k = t0 + k*dt`. Column `k` holds `Q(t_k)`.
#[derive(Debug, Clone)]
pub struct SnapshotSet {
    data: Mat<f64>,
    t0: f64,
    dt: f64,
    parameter: ParameterPoint,
    qoi_names: Vec<String>,
}

impl SnapshotSet {
    pub fn new(
        data: Mat<f64>,
        t0: f64,
        dt: f64,
        parameter: ParameterPoint,
        qoi_names: Vec<String>,
    ) -> Result<Self> {
        if data.ncols() < 2 {
            return Err(Error::InvalidInput(format!(
                "snapshot set needs >= 2 columns, got {}",
                data.ncols()
            )));
        }
        if data.nrows() == 0 {
            return Err(Error::InvalidInput("snapshot set needs >= 1 row".into()));
        }
        if !(dt > 0.0) || !dt.is_finite() || !t0.is_finite() {
            return Err(Error::InvalidInput(format!("bad time grid: t0={t0}, dt={dt}")));
        }
        for j in 0..data.ncols() {
            for i in 0..data.nrows() {
                if !data[(i, j)].is_finite() {
                    return Err(Error::NonFinite(format!("snapshot entry ({i}, {j})")));
                }
            }
        }
        Ok(Self { data, t0, dt, parameter, qoi_names })
    }

    pub fn qoi_dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of stored columns, `N_snap + 1`.
    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> MatRef<'_, f64> {
        self.data.as_ref()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn parameter(&self) -> &ParameterPoint {
        &self.parameter
    }

    pub fn qoi_names(&self) -> &[String] {
        &self.qoi_names
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + self.dt * k as f64
    }

    /// Restricts the trajectory to its first `n_cols` columns.
    pub fn truncated(&self, n_cols: usize) -> Result<Self> {
        if n_cols < 2 || n_cols > self.n_cols() {
            return Err(Error::InvalidInput(format!(
                "cannot truncate {} columns to {n_cols}",
                self.n_cols()
            )));
        }
        let data = self.data.as_ref().subcols(0, n_cols).to_owned();
        Self::new(data, self.t0, self.dt, self.parameter.clone(), self.qoi_names.clone())
    }
}
