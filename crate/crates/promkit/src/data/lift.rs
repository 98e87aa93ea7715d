use faer::Col;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A declared map `g` from QoI space (dimension `N_Q`) to observable space
/// (dimension `N`), together with its inverse `g^{-1}`.
///
/// - `Identity`: `y = q`
/// - `AffineAugment`: `y = [1, q^T]^T`, so linear systems with a constant
///   forcing term become homogeneous in observable space
/// - `ComponentStack`: `y = [1, q_1^T, q_2^T, ...]^T` for QoIs made of
///   several stacked fields
/// - `Hermite`: for a scalar QoI, `y_n = He_n((q - mean)/scale)` for
///   `n = 0..order-1` with probabilists' Hermite polynomials
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableLift {
    Identity { dim: usize },
    AffineAugment { qoi_dim: usize },
    ComponentStack { parts: Vec<usize> },
    Hermite { order: usize, mean: f64, scale: f64 },
}

impl ObservableLift {
    /// Hermite lift normalized by the mean and standard deviation of a
    /// training series of the scalar QoI.
    pub fn hermite_from_series(order: usize, series: &[f64]) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::InvalidInput("empty series for Hermite normalization".into()));
        }
        let n = series.len() as f64;
        let mean = series.iter().sum::<f64>() / n;
        let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let scale = if var.sqrt() > 0.0 { var.sqrt() } else { 1.0 };
        let lift = Self::Hermite { order, mean, scale };
        lift.validate()?;
        Ok(lift)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Identity { dim } if *dim == 0 => {
                Err(Error::InvalidInput("identity lift with zero dimension".into()))
            }
            Self::ComponentStack { parts } if parts.is_empty() || parts.contains(&0) => {
                Err(Error::InvalidInput("component stack needs nonempty positive parts".into()))
            }
            Self::Hermite { order, scale, .. } => {
                if *order < 2 {
                    Err(Error::InvalidInput(
                        "Hermite lift needs order >= 2 (no He_1 slot otherwise)".into(),
                    ))
                } else if !(*scale > 0.0) {
                    Err(Error::InvalidInput("Hermite scale must be positive".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// Dimension `N_Q` of the QoI space.
    pub fn qoi_dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::AffineAugment { qoi_dim } => *qoi_dim,
            Self::ComponentStack { parts } => parts.iter().sum(),
            Self::Hermite { .. } => 1,
        }
    }

    /// Dimension `N` of the observable space.
    pub fn observable_dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::AffineAugment { qoi_dim } => qoi_dim + 1,
            Self::ComponentStack { parts } => 1 + parts.iter().sum::<usize>(),
            Self::Hermite { order, .. } => *order,
        }
    }

    /// Applies `g` to one QoI vector.
    pub fn lift(&self, q: &[f64]) -> Result<Col<f64>> {
        self.validate()?;
        if q.len() != self.qoi_dim() {
            return Err(Error::DimensionMismatch(format!(
                "lift expects QoI dimension {}, got {}",
                self.qoi_dim(),
                q.len()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lift input".into()));
        }
        let n = self.observable_dim();
        let mut y = Col::zeros(n);
        match self {
            Self::Identity { .. } => {
                for (i, v) in q.iter().enumerate() {
                    y[i] = *v;
                }
            }
            Self::AffineAugment { .. } | Self::ComponentStack { .. } => {
                y[0] = 1.0;
                for (i, v) in q.iter().enumerate() {
                    y[i + 1] = *v;
                }
            }
            Self::Hermite { order, mean, scale } => {
                // probabilists' recurrence He_{n+1}(x) = x He_n(x) - n He_{n-1}(x)
                let x = (q[0] - mean) / scale;
                y[0] = 1.0;
                if *order > 1 {
                    y[1] = x;
                }
                for k in 1..order - 1 {
                    y[k + 1] = x * y[k] - k as f64 * y[k - 1];
                }
            }
        }
        Ok(y)
    }

    /// Applies `g^{-1}` to one observable vector.
    pub fn unlift(&self, y: &[f64]) -> Result<Col<f64>> {
        self.validate()?;
        if y.len() != self.observable_dim() {
            return Err(Error::DimensionMismatch(format!(
                "unlift expects observable dimension {}, got {}",
                self.observable_dim(),
                y.len()
            )));
        }
        let nq = self.qoi_dim();
        let mut q = Col::zeros(nq);
        match self {
            Self::Identity { .. } => {
                for i in 0..nq {
                    q[i] = y[i];
                }
            }
            Self::AffineAugment { .. } | Self::ComponentStack { .. } => {
                // The leading slot holds the constant observable 1. Model
                // predictions can drift off that slice, which uniformly
                // rescales the whole vector, so the inverse reads the
                // remaining slots in homogeneous coordinates. The drift
                // magnitude is reported separately by `leading_drift`.
                let scale = if y[0].is_finite() && y[0].abs() > 1e-6 { y[0] } else { 1.0 };
                for i in 0..nq {
                    q[i] = y[i + 1] / scale;
                }
            }
            Self::Hermite { mean, scale, .. } => {
                let c = if y[0].is_finite() && y[0].abs() > 1e-6 { y[0] } else { 1.0 };
                q[0] = mean + scale * (y[1] / c);
            }
        }
        Ok(q)
    }

    /// For lifts with a constant leading observable, `|y_0 - 1|`; zero otherwise.
    pub fn leading_drift(&self, y: &[f64]) -> f64 {
        match self {
            Self::AffineAugment { .. } | Self::ComponentStack { .. } | Self::Hermite { .. } => {
                (y[0] - 1.0).abs()
            }
            Self::Identity { .. } => 0.0,
        }
    }

    /// Splits an unlifted `ComponentStack` QoI vector into its declared parts.
    pub fn split_parts<'a>(&self, q: &'a [f64]) -> Result<Vec<&'a [f64]>> {
        match self {
            Self::ComponentStack { parts } => {
                if q.len() != parts.iter().sum::<usize>() {
                    return Err(Error::DimensionMismatch("split_parts input".into()));
                }
                let mut out = Vec::with_capacity(parts.len());
                let mut off = 0;
                for p in parts {
                    out.push(&q[off..off + p]);
                    off += p;
                }
                Ok(out)
            }
            _ => Err(Error::InvalidInput("split_parts only applies to ComponentStack".into())),
        }
    }
}
