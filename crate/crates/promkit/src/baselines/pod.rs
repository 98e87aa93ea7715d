//! Intrusive projection baseline: proper orthogonal decomposition of the
//! state snapshots plus Galerkin projection of the full-order operator.
//! Unlike the data-driven path, it needs access to the solver's implicit
//! matrices; its online stage reuses the same basis/operator manifold
//! interpolation machinery.

use faer::{Mat, MatRef};

use crate::data::{ParameterPoint, SnapshotSet};
use crate::dmd::{select_rank, GramTable, RankPolicy};
use crate::linalg::thin_svd_signed;
use crate::manifold::{
    interpolate_basis, interpolate_operator, interpolate_vector, InterpolationConfig,
};
use crate::parallel;
use crate::solvers::LinearHFMOperator;
use crate::{Error, Result};

/// Projection-based ROM at one parameter sample:
/// `a_{k+1} = A_r a_k + b_r`, `q_k = V a_k`.
#[derive(Debug, Clone)]
pub struct PodLocalRom {
    pub parameter: ParameterPoint,
    pub basis: Mat<f64>,
    pub a_r: Mat<f64>,
    pub b_r: Mat<f64>,
    pub singular_values: Vec<f64>,
}

impl PodLocalRom {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn state_dim(&self) -> usize {
        self.basis.nrows()
    }
}

/// POD ROMs at every training sample plus their Gram table.
#[derive(Debug, Clone)]
pub struct PodEnsemble {
    roms: Vec<PodLocalRom>,
    gram: GramTable,
    rank: usize,
    t0: f64,
    dt: f64,
}

impl PodEnsemble {
    pub fn roms(&self) -> &[PodLocalRom] {
        &self.roms
    }

    pub fn gram(&self) -> &GramTable {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Fits one POD ROM: the basis is the leading left singular vectors of
/// the snapshot matrix, the reduced operator pair comes from Galerkin
/// projection of the solver's one-step update.
pub fn pod_fit(snapshots: &SnapshotSet, op: &LinearHFMOperator, r: usize) -> Result<PodLocalRom> {
    if op.dim() != snapshots.qoi_dim() {
        return Err(Error::DimensionMismatch("solver and snapshot dimensions".into()));
    }
    let (u, sv, _) = thin_svd_signed(snapshots.data())?;
    if r == 0 || r > u.ncols() {
        return Err(Error::InvalidInput(format!("rank {r} out of range 1..={}", u.ncols())));
    }
    let v = u.as_ref().subcols(0, r).to_owned();
    let (a_r, b_r) = op.project(v.as_ref())?;
    Ok(PodLocalRom {
        parameter: snapshots.parameter().clone(),
        basis: v,
        a_r,
        b_r,
        singular_values: sv,
    })
}

/// Trains POD ROMs at every sample with a shared rank (the maximum of the
/// per-sample policy ranks).
pub fn pod_train(
    datasets: &[SnapshotSet],
    ops: &[&LinearHFMOperator],
    policy: RankPolicy,
) -> Result<PodEnsemble> {
    if datasets.len() < 2 || datasets.len() != ops.len() {
        return Err(Error::InvalidInput("need >= 2 datasets with matching solvers".into()));
    }
    let (t0, dt) = (datasets[0].t0(), datasets[0].dt());
    let svds = parallel::try_map_collect(datasets, |d| thin_svd_signed(d.data()))?;
    let mut rank = 1usize;
    for (_, sv, _) in &svds {
        rank = rank.max(select_rank(sv, policy)?);
    }
    let items: Vec<usize> = (0..datasets.len()).collect();
    let roms = parallel::try_map_collect(&items, |&i| {
        let (u, sv, _) = &svds[i];
        if rank > u.ncols() {
            return Err(Error::InvalidInput(format!(
                "shared rank {rank} exceeds sample {i} column count"
            )));
        }
        let v = u.as_ref().subcols(0, rank).to_owned();
        let (a_r, b_r) = ops[i].project(v.as_ref())?;
        Ok(PodLocalRom {
            parameter: datasets[i].parameter().clone(),
            basis: v,
            a_r,
            b_r,
            singular_values: sv.clone(),
        })
    })?;
    let bases: Vec<MatRef<'_, f64>> = roms.iter().map(|r| r.basis.as_ref()).collect();
    let gram = GramTable::from_bases(&bases)?;
    Ok(PodEnsemble { roms, gram, rank, t0, dt })
}

/// Full-state trajectory from a POD ROM: project the initial state, march
/// the affine recurrence, lift every step back.
pub fn pod_predict(rom: &PodLocalRom, q0: MatRef<'_, f64>, steps: usize) -> Result<Mat<f64>> {
    if q0.nrows() != rom.state_dim() || q0.ncols() != 1 {
        return Err(Error::DimensionMismatch("initial state shape".into()));
    }
    let mut a = rom.basis.transpose() * q0;
    let mut out = Mat::zeros(rom.state_dim(), steps + 1);
    for k in 0..=steps {
        let q = &rom.basis * &a;
        for i in 0..rom.state_dim() {
            out[(i, k)] = q[(i, 0)];
        }
        if k < steps {
            a = &rom.a_r * &a + &rom.b_r;
        }
    }
    if !out.is_all_finite() {
        return Err(Error::NonFinite("projected trajectory".into()));
    }
    Ok(out)
}

/// Interpolates the POD ensemble onto a target parameter: the basis on the
/// subspace manifold, the operator in a matrix chart after alignment, and
/// the forcing vector flat after rotation.
pub fn interpolate_pod(
    ens: &PodEnsemble,
    target: &ParameterPoint,
    cfg: &InterpolationConfig,
) -> Result<PodLocalRom> {
    let points: Vec<Vec<f64>> =
        ens.roms.iter().map(|r| r.parameter.values().to_vec()).collect();
    let bases: Vec<MatRef<'_, f64>> = ens.roms.iter().map(|r| r.basis.as_ref()).collect();
    let ops: Vec<MatRef<'_, f64>> = ens.roms.iter().map(|r| r.a_r.as_ref()).collect();
    let vecs: Vec<MatRef<'_, f64>> = ens.roms.iter().map(|r| r.b_r.as_ref()).collect();
    let gram = |i: usize, j: usize| ens.gram.get(i, j);

    let basis = interpolate_basis(&points, &bases, gram, target.values(), cfg)?;
    let a_r = interpolate_operator(&points, &ops, gram, target.values(), cfg)?;
    let b_r = interpolate_vector(&points, &vecs, gram, target.values(), cfg)?;
    Ok(PodLocalRom {
        parameter: target.clone(),
        basis,
        a_r,
        b_r,
        singular_values: Vec::new(),
    })
}
