//! Heat conduction around a hot square cavity: implicit diffusion on a
//! square plate with a masked interior block held at a fixed temperature,
//! hot and cold vertical edges, and insulated horizontal edges. Derived
//! outputs (flux field, cavity heat rate) feed the nonlinear-observable
//! paths of the toolkit.

use faer::sparse::Triplet;
use faer::{Col, Mat, MatRef};

use super::{Grid2, LinearHFMOperator};
use crate::data::{ParameterPoint, SnapshotSet};
use crate::{Error, Result};

/// Inclusive node-index rectangle held at the cavity temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CavityRect {
    pub i_lo: usize,
    pub i_hi: usize,
    pub j_lo: usize,
    pub j_hi: usize,
}

impl CavityRect {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.i_lo..=self.i_hi).contains(&i) && (self.j_lo..=self.j_hi).contains(&j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskedDiffusionConfig {
    /// Volumetric heat capacity (the model parameter); larger values slow
    /// the transient down.
    pub capacity: f64,
    pub dt: f64,
    pub left_value: f64,
    pub right_value: f64,
    pub cavity_value: f64,
    pub cavity: Option<CavityRect>,
}

impl MaskedDiffusionConfig {
    pub fn with_capacity(capacity: f64) -> Self {
        Self {
            capacity,
            dt: 50.0,
            left_value: 2.0,
            right_value: 1.0,
            cavity_value: 3.0,
            cavity: Some(CavityRect { i_lo: 28, i_hi: 52, j_lo: 28, j_hi: 52 }),
        }
    }
}

/// Default 81 x 81 discretization of the 800 x 800 plate.
pub fn default_grid() -> Grid2 {
    Grid2::spanning(81, 81, (0.0, 800.0), (0.0, 800.0)).unwrap()
}

fn is_dirichlet(grid: &Grid2, cfg: &MaskedDiffusionConfig, i: usize, j: usize) -> Option<f64> {
    if let Some(c) = cfg.cavity {
        if c.contains(i, j) {
            return Some(cfg.cavity_value);
        }
    }
    if i == 0 {
        Some(cfg.left_value)
    } else if i == grid.nx - 1 {
        Some(cfg.right_value)
    } else {
        None
    }
}

/// Implicit-Euler operator for `capacity * ds/dt = lap(s)`:
/// `(cI - dt L) s_{k+1} = c s_k` plus Dirichlet rows.
pub fn build_operator(grid: &Grid2, cfg: &MaskedDiffusionConfig) -> Result<LinearHFMOperator> {
    if !(cfg.capacity > 0.0) || !(cfg.dt > 0.0) {
        return Err(Error::InvalidInput("capacity and dt must be positive".into()));
    }
    if let Some(c) = cfg.cavity {
        if c.i_lo > c.i_hi || c.j_lo > c.j_hi || c.i_hi >= grid.nx || c.j_hi >= grid.ny {
            return Err(Error::InvalidInput("cavity rectangle out of range".into()));
        }
    }
    let n = grid.n_nodes();
    let cx = cfg.dt / (grid.dx * grid.dx);
    let cy = cfg.dt / (grid.dy * grid.dy);
    let mut m = Vec::with_capacity(5 * n);
    let mut e = Vec::with_capacity(n);
    let mut d = Col::zeros(n);

    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let row = grid.idx(i, j);
            if let Some(v) = is_dirichlet(grid, cfg, i, j) {
                m.push(Triplet::new(row, row, 1.0));
                d[row] = v;
                continue;
            }
            e.push(Triplet::new(row, row, cfg.capacity));
            let diag = cfg.capacity + 2.0 * cx + 2.0 * cy;
            let (west, east) = (-cx, -cx);
            let (mut south, mut north) = (-cy, -cy);
            // insulated horizontal edges: mirror ghosts
            if j == 0 {
                north += south;
                south = 0.0;
            }
            if j == grid.ny - 1 {
                south += north;
                north = 0.0;
            }
            m.push(Triplet::new(row, row, diag));
            m.push(Triplet::new(row, grid.idx(i - 1, j), west));
            m.push(Triplet::new(row, grid.idx(i + 1, j), east));
            if south != 0.0 {
                m.push(Triplet::new(row, grid.idx(i, j - 1), south));
            }
            if north != 0.0 {
                m.push(Triplet::new(row, grid.idx(i, j + 1), north));
            }
        }
    }
    LinearHFMOperator::new(&m, &e, d, n)
}

/// Cold start: zero everywhere except the Dirichlet nodes.
pub fn initial_state(grid: &Grid2, cfg: &MaskedDiffusionConfig) -> Mat<f64> {
    Mat::from_fn(grid.n_nodes(), 1, |row, _| {
        let i = row % grid.nx;
        let j = row / grid.nx;
        is_dirichlet(grid, cfg, i, j).unwrap_or(0.0)
    })
}

pub fn simulate_snapshots(grid: &Grid2, capacity: f64, steps: usize) -> Result<SnapshotSet> {
    let cfg = MaskedDiffusionConfig::with_capacity(capacity);
    let op = build_operator(grid, &cfg)?;
    let q0 = initial_state(grid, &cfg);
    op.snapshots(q0.as_ref(), steps, 0.0, cfg.dt, ParameterPoint::scalar(capacity)?)
}

/// Derived output selector for the plate problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffusionQoi {
    /// The temperature field itself.
    State,
    /// Stacked gradient components `[-ds/dx; -ds/dy]`.
    Flux,
    /// Heat rate through the left face of the cavity (scalar).
    HeatRate,
}

impl DiffusionQoi {
    pub fn dim(&self, grid: &Grid2) -> usize {
        match self {
            Self::State => grid.n_nodes(),
            Self::Flux => 2 * grid.n_nodes(),
            Self::HeatRate => 1,
        }
    }
}

fn grad_at(
    s: &dyn Fn(usize, usize) -> f64,
    grid: &Grid2,
    cavity: Option<CavityRect>,
    i: usize,
    j: usize,
) -> (f64, f64) {
    let masked = |a: usize, b: usize| cavity.is_some_and(|c| c.contains(a, b));
    if masked(i, j) {
        return (0.0, 0.0);
    }
    let gx = {
        let has_w = i > 0 && !masked(i - 1, j);
        let has_e = i + 1 < grid.nx && !masked(i + 1, j);
        match (has_w, has_e) {
            (true, true) => (s(i + 1, j) - s(i - 1, j)) / (2.0 * grid.dx),
            (true, false) => (s(i, j) - s(i - 1, j)) / grid.dx,
            (false, true) => (s(i + 1, j) - s(i, j)) / grid.dx,
            (false, false) => 0.0,
        }
    };
    let gy = {
        let has_s = j > 0 && !masked(i, j - 1);
        let has_n = j + 1 < grid.ny && !masked(i, j + 1);
        match (has_s, has_n) {
            (true, true) => (s(i, j + 1) - s(i, j - 1)) / (2.0 * grid.dy),
            (true, false) => (s(i, j) - s(i, j - 1)) / grid.dy,
            (false, true) => (s(i, j + 1) - s(i, j)) / grid.dy,
            (false, false) => 0.0,
        }
    };
    (gx, gy)
}

/// Maps each temperature column to the selected derived output.
pub fn derive_qois(
    state: MatRef<'_, f64>,
    grid: &Grid2,
    cavity: Option<CavityRect>,
    qoi: DiffusionQoi,
) -> Result<Mat<f64>> {
    if state.nrows() != grid.n_nodes() {
        return Err(Error::DimensionMismatch("state rows must match the grid".into()));
    }
    let n = grid.n_nodes();
    let cols = state.ncols();
    match qoi {
        DiffusionQoi::State => Ok(state.to_owned()),
        DiffusionQoi::Flux => {
            let mut out = Mat::zeros(2 * n, cols);
            for k in 0..cols {
                let s = |i: usize, j: usize| state[(grid.idx(i, j), k)];
                for j in 0..grid.ny {
                    for i in 0..grid.nx {
                        let (gx, gy) = grad_at(&s, grid, cavity, i, j);
                        out[(grid.idx(i, j), k)] = -gx;
                        out[(n + grid.idx(i, j), k)] = -gy;
                    }
                }
            }
            Ok(out)
        }
        DiffusionQoi::HeatRate => {
            let c = cavity.ok_or_else(|| {
                Error::InvalidInput("heat-rate output needs a cavity".into())
            })?;
            if c.i_lo == 0 {
                return Err(Error::InvalidInput("cavity touches the domain edge".into()));
            }
            let mut out = Mat::zeros(1, cols);
            for k in 0..cols {
                let s = |i: usize, j: usize| state[(grid.idx(i, j), k)];
                // trapezoid quadrature of -ds/dn along the left face, with
                // the normal derivative one-sided into the domain
                let mut acc = 0.0;
                for j in c.j_lo..=c.j_hi {
                    let dn = (s(c.i_lo, j) - s(c.i_lo - 1, j)) / grid.dx;
                    let w = if j == c.j_lo || j == c.j_hi { 0.5 } else { 1.0 };
                    acc += w * (-dn) * grid.dy;
                }
                out[(0, k)] = acc;
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coarse_cfg() -> (Grid2, MaskedDiffusionConfig) {
        let grid = Grid2::spanning(17, 17, (0.0, 800.0), (0.0, 800.0)).unwrap();
        let mut cfg = MaskedDiffusionConfig::with_capacity(1.5);
        cfg.cavity = Some(CavityRect { i_lo: 6, i_hi: 10, j_lo: 6, j_hi: 10 });
        (grid, cfg)
    }

    #[test]
    fn max_principle_holds() {
        let (grid, cfg) = coarse_cfg();
        let op = build_operator(&grid, &cfg).unwrap();
        let traj = op.simulate(initial_state(&grid, &cfg).as_ref(), 40).unwrap();
        for k in 0..=40 {
            for i in 0..grid.n_nodes() {
                let v = traj[(i, k)];
                assert!((-1e-9..=3.0 + 1e-9).contains(&v), "({i},{k}): {v}");
            }
        }
    }

    #[test]
    fn cavity_nodes_stay_fixed() {
        let (grid, cfg) = coarse_cfg();
        let op = build_operator(&grid, &cfg).unwrap();
        let traj = op.simulate(initial_state(&grid, &cfg).as_ref(), 10).unwrap();
        let c = cfg.cavity.unwrap();
        for k in 0..=10 {
            assert_eq!(traj[(grid.idx(c.i_lo, c.j_lo), k)], 3.0);
            assert_eq!(traj[(grid.idx(8, 8), k)], 3.0);
        }
    }

    #[test]
    fn slower_capacity_means_slower_transient() {
        let (grid, mut cfg) = coarse_cfg();
        let probe = grid.idx(3, 3);
        cfg.capacity = 1.0;
        let fast = build_operator(&grid, &cfg)
            .unwrap()
            .simulate(initial_state(&grid, &cfg).as_ref(), 20)
            .unwrap();
        cfg.capacity = 2.0;
        let slow = build_operator(&grid, &cfg)
            .unwrap()
            .simulate(initial_state(&grid, &cfg).as_ref(), 20)
            .unwrap();
        assert!(fast[(probe, 20)] > slow[(probe, 20)]);
    }

    #[test]
    fn flux_of_linear_field_is_exact() {
        // s = 0.01 x + 0.02 y without a cavity: every difference formula is
        // exact, so the flux must be constant (-0.01, -0.02).
        let grid = Grid2::spanning(9, 9, (0.0, 800.0), (0.0, 800.0)).unwrap();
        let s = Mat::from_fn(grid.n_nodes(), 1, |row, _| {
            let i = row % grid.nx;
            let j = row / grid.nx;
            0.01 * grid.x(i) + 0.02 * grid.y(j)
        });
        let f = derive_qois(s.as_ref(), &grid, None, DiffusionQoi::Flux).unwrap();
        let n = grid.n_nodes();
        for r in 0..n {
            assert!((f[(r, 0)] + 0.01).abs() < 1e-12);
            assert!((f[(n + r, 0)] + 0.02).abs() < 1e-12);
        }
    }

    #[test]
    fn heat_rate_of_linear_field_matches_quadrature_oracle() {
        let (grid, cfg) = coarse_cfg();
        let a = 0.004;
        let s = Mat::from_fn(grid.n_nodes(), 1, |row, _| a * grid.x(row % grid.nx));
        let c = cfg.cavity.unwrap();
        let q = derive_qois(s.as_ref(), &grid, cfg.cavity, DiffusionQoi::HeatRate).unwrap();
        // -ds/dn = -a along the face; trapezoid length = (j_hi - j_lo) * dy
        let len = (c.j_hi - c.j_lo) as f64 * grid.dy;
        assert!((q[(0, 0)] - (-a) * len).abs() < 1e-12);
    }

    #[test]
    fn default_cavity_matches_node_coordinates() {
        let grid = default_grid();
        let cfg = MaskedDiffusionConfig::with_capacity(1.0);
        let c = cfg.cavity.unwrap();
        assert_eq!(grid.x(c.i_lo), 280.0);
        assert_eq!(grid.x(c.i_hi), 520.0);
    }
}
