//! Full-order reference solvers used to generate training and validation
//! snapshots: two implicit finite-difference heat-transport problems on
//! structured 2-D grids and an explicit 1-D nonlinear conservation law.

pub mod adv_diff;
pub mod burgers;
pub mod masked_diffusion;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat, MatRef};

use crate::data::{ParameterPoint, SnapshotSet};
use crate::{Error, Result};

/// Uniform structured 2-D grid; node `(i, j)` sits at
/// `(x0 + i dx, y0 + j dy)` and maps to flat index `i + nx * j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2 {
    /// Grid with `nx x ny` nodes spanning `[x0, x1] x [y0, y1]` inclusive.
    pub fn spanning(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidInput("grid needs >= 2 nodes per axis".into()));
        }
        if !(x.1 > x.0) || !(y.1 > y.0) {
            return Err(Error::InvalidInput("degenerate grid extents".into()));
        }
        Ok(Self {
            nx,
            ny,
            dx: (x.1 - x.0) / (nx - 1) as f64,
            dy: (y.1 - y.0) / (ny - 1) as f64,
            x0: x.0,
            y0: y.0,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.ny
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        i + self.nx * j
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.dy
    }
}

/// One-step linear update `q_{k+1} = M^{-1} (E q_k + d)` with sparse `M`
/// and `E`. Implicit schemes keep `M` factored once; the dense propagator
/// `M^{-1} E` is never formed.
pub struct LinearHFMOperator {
    m_lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    e: SparseColMat<usize, f64>,
    d: Col<f64>,
    dim: usize,
}

impl LinearHFMOperator {
    pub fn new(
        m_triplets: &[Triplet<usize, usize, f64>],
        e_triplets: &[Triplet<usize, usize, f64>],
        d: Col<f64>,
        dim: usize,
    ) -> Result<Self> {
        let m = SparseColMat::try_new_from_triplets(dim, dim, m_triplets)
            .map_err(|e| Error::InvalidInput(format!("bad M triplets: {e:?}")))?;
        let e_mat = SparseColMat::try_new_from_triplets(dim, dim, e_triplets)
            .map_err(|e| Error::InvalidInput(format!("bad E triplets: {e:?}")))?;
        if d.nrows() != dim {
            return Err(Error::DimensionMismatch("forcing vector length".into()));
        }
        let m_lu = m
            .sp_lu()
            .map_err(|e| Error::Numerical(format!("sparse LU of M failed: {e:?}")))?;
        Ok(Self { m_lu, e: e_mat, d, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One time step.
    pub fn step(&self, q: MatRef<'_, f64>) -> Result<Mat<f64>> {
        if q.nrows() != self.dim || q.ncols() != 1 {
            return Err(Error::DimensionMismatch("state vector shape".into()));
        }
        let mut rhs = &self.e * q;
        for i in 0..self.dim {
            rhs[(i, 0)] += self.d[i];
        }
        Ok(self.m_lu.solve(&rhs))
    }

    /// `steps + 1` columns of the trajectory from `q0`, initial state first.
    pub fn simulate(&self, q0: MatRef<'_, f64>, steps: usize) -> Result<Mat<f64>> {
        let mut out = Mat::zeros(self.dim, steps + 1);
        let mut q = q0.to_owned();
        for k in 0..=steps {
            for i in 0..self.dim {
                out[(i, k)] = q[(i, 0)];
            }
            if k < steps {
                q = self.step(q.as_ref())?;
                if !q.is_all_finite() {
                    return Err(Error::NonFinite(format!("state diverged at step {}", k + 1)));
                }
            }
        }
        Ok(out)
    }

    /// Galerkin projection onto an orthonormal basis `V`:
    /// `A_r = V^T M^{-1} E V` and `b_r = V^T M^{-1} d`, via one sparse
    /// solve per basis column.
    pub fn project(&self, v: MatRef<'_, f64>) -> Result<(Mat<f64>, Mat<f64>)> {
        if v.nrows() != self.dim {
            return Err(Error::DimensionMismatch("basis row count".into()));
        }
        let ev = &self.e * v;
        let minv_ev = self.m_lu.solve(&ev);
        let a_r = v.transpose() * minv_ev;
        let d_mat = Mat::from_fn(self.dim, 1, |i, _| self.d[i]);
        let minv_d = self.m_lu.solve(&d_mat);
        let b_r = v.transpose() * minv_d;
        Ok((a_r, b_r))
    }

    /// Wraps a simulated trajectory as a snapshot set.
    pub fn snapshots(
        &self,
        q0: MatRef<'_, f64>,
        steps: usize,
        t0: f64,
        dt: f64,
        parameter: ParameterPoint,
    ) -> Result<SnapshotSet> {
        let data = self.simulate(q0, steps)?;
        SnapshotSet::new(data, t0, dt, parameter, vec![])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_indexing_round_trips() {
        let g = Grid2::spanning(5, 3, (0.0, 1.0), (0.0, 2.0)).unwrap();
        assert_eq!(g.n_nodes(), 15);
        assert_eq!(g.idx(4, 2), 14);
        assert!((g.dx - 0.25).abs() < 1e-15);
        assert!((g.y(2) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_operator_steps_exactly() {
        // M = 2I, E = I, d = [0, 2]: q <- (q + d) / 2, fixed point [0, 2].
        let m: Vec<_> = (0..2).map(|i| Triplet::new(i, i, 2.0)).collect();
        let e: Vec<_> = (0..2).map(|i| Triplet::new(i, i, 1.0)).collect();
        let d = Col::from_fn(2, |i| if i == 1 { 2.0 } else { 0.0 });
        let op = LinearHFMOperator::new(&m, &e, d, 2).unwrap();
        let q0 = Mat::from_fn(2, 1, |i, _| if i == 0 { 8.0 } else { 0.0 });
        let traj = op.simulate(q0.as_ref(), 3).unwrap();
        assert!((traj[(0, 3)] - 1.0).abs() < 1e-14);
        assert!((traj[(1, 3)] - 1.75).abs() < 1e-14);
    }

    #[test]
    fn projection_matches_dense_oracle() {
        // Small system: compare V^T M^{-1} E V against the densified form.
        let n = 4;
        let mut mt = Vec::new();
        let mut et = Vec::new();
        for i in 0..n {
            mt.push(Triplet::new(i, i, 2.0 + i as f64));
            et.push(Triplet::new(i, i, 1.0));
            if i + 1 < n {
                mt.push(Triplet::new(i, i + 1, -0.5));
                et.push(Triplet::new(i + 1, i, 0.25));
            }
        }
        let d = Col::from_fn(n, |i| i as f64);
        let op = LinearHFMOperator::new(&mt, &et, d.clone(), n).unwrap();

        let mut m_dense: Mat<f64> = Mat::zeros(n, n);
        for t in &mt {
            m_dense[(t.row, t.col)] += t.val;
        }
        let mut e_dense: Mat<f64> = Mat::zeros(n, n);
        for t in &et {
            e_dense[(t.row, t.col)] += t.val;
        }
        let m_lu = m_dense.partial_piv_lu();
        let a_dense = m_lu.solve(&e_dense);

        // orthonormal 2-column basis
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = Mat::from_fn(n, 2, |i, j| match (i, j) {
            (0, 0) | (1, 0) => s,
            (2, 1) => 1.0,
            _ => 0.0,
        });
        let (a_r, b_r) = op.project(v.as_ref()).unwrap();
        let a_want = v.transpose() * &a_dense * &v;
        let d_mat = Mat::from_fn(n, 1, |i, _| d[i]);
        let b_want = v.transpose() * m_lu.solve(&d_mat);
        for j in 0..2 {
            for i in 0..2 {
                assert!((a_r[(i, j)] - a_want[(i, j)]).abs() < 1e-13);
            }
            assert!((b_r[(j, 0)] - b_want[(j, 0)]).abs() < 1e-13);
        }
    }
}
