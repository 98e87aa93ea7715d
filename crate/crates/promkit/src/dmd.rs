//! Offline training: builds shifted observable matrices, computes the
//! rank-r truncated SVD and the reduced operator `K_r` for each parameter
//! sample, and assembles the trained ensemble with its Gram table
//! `P^(i,j) = V_i^T V_j`.

use faer::{Mat, MatRef};

use crate::data::{ObservableLift, SnapshotSet};
use crate::linalg::{max_abs, orthonormality_defect, thin_svd_signed};
use crate::parallel;
use crate::{Error, Result};

/// Relative singular-value cutoff defining the numerical rank.
pub const RANK_EPS: f64 = 1e-13;

/// Rank selection policy shared by every sample in an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPolicy {
    /// Fixed rank, capped at the numerical rank of the data.
    Fixed(usize),
    /// Smallest rank capturing at least `1 - eps` of the squared
    /// singular-value energy.
    Energy(f64),
}

/// Per-parameter-sample reduced-order model.
#[derive(Debug, Clone)]
pub struct LocalRom {
    parameter: crate::data::ParameterPoint,
    basis: Mat<f64>,
    operator: Mat<f64>,
    singular_values: Vec<f64>,
    lift: ObservableLift,
}

impl LocalRom {
    pub fn new(
        parameter: crate::data::ParameterPoint,
        basis: Mat<f64>,
        operator: Mat<f64>,
        singular_values: Vec<f64>,
        lift: ObservableLift,
    ) -> Result<Self> {
        let r = basis.ncols();
        if r == 0 {
            return Err(Error::InvalidInput("rank must be >= 1".into()));
        }
        if operator.nrows() != r || operator.ncols() != r {
            return Err(Error::DimensionMismatch("operator must be r x r".into()));
        }
        if singular_values.len() < r {
            return Err(Error::InvalidInput("need at least r singular values".into()));
        }
        if singular_values.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput("singular values must be nonincreasing".into()));
        }
        let defect = orthonormality_defect(basis.as_ref());
        if defect > 1e-10 {
            return Err(Error::Numerical(format!(
                "basis columns not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(Self { parameter, basis, operator, singular_values, lift })
    }

    pub fn parameter(&self) -> &crate::data::ParameterPoint {
        &self.parameter
    }

    /// The N x r reduced-order basis `V`.
    pub fn basis(&self) -> MatRef<'_, f64> {
        self.basis.as_ref()
    }

    /// The r x r reduced operator `K_r`.
    pub fn operator(&self) -> MatRef<'_, f64> {
        self.operator.as_ref()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn lift(&self) -> &ObservableLift {
        &self.lift
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn observable_dim(&self) -> usize {
        self.basis.nrows()
    }
}

/// Symmetric table of Gram blocks `P^(i,j) = V_i^T V_j`; only `i <= j`
/// blocks are stored, the rest follow from `P^(i,j) = (P^(j,i))^T`.
#[derive(Debug, Clone)]
pub struct GramTable {
    n: usize,
    r: usize,
    blocks: Vec<Mat<f64>>,
}

impl GramTable {
    pub fn from_bases(bases: &[MatRef<'_, f64>]) -> Result<Self> {
        let n = bases.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty basis list".into()));
        }
        let r = bases[0].ncols();
        let mut blocks = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                blocks.push(bases[i].transpose() * bases[j]);
            }
        }
        Ok(Self { n, r, blocks })
    }

    pub fn from_upper_blocks(n: usize, r: usize, blocks: Vec<Mat<f64>>) -> Result<Self> {
        if blocks.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} Gram blocks, got {}",
                n * (n + 1) / 2,
                blocks.len()
            )));
        }
        if blocks.iter().any(|b| b.nrows() != r || b.ncols() != r) {
            return Err(Error::DimensionMismatch("Gram blocks must be r x r".into()));
        }
        Ok(Self { n, r, blocks })
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.n);
        i * self.n - i * (i + 1) / 2 + j
    }

    /// Stored block for `i <= j`.
    pub fn block(&self, i: usize, j: usize) -> MatRef<'_, f64> {
        self.blocks[self.upper_index(i, j)].as_ref()
    }

    /// `P^(i,j)` for any pair, transposing the stored block when `i > j`.
    pub fn get(&self, i: usize, j: usize) -> Mat<f64> {
        if i <= j {
            self.block(i, j).to_owned()
        } else {
            self.block(j, i).transpose().to_owned()
        }
    }
}

/// All local ROMs at the training samples plus the precomputed Gram table.
#[derive(Debug, Clone)]
pub struct TrainedEnsemble {
    roms: Vec<LocalRom>,
    gram: GramTable,
    rank: usize,
    t0: f64,
    dt: f64,
}

impl TrainedEnsemble {
    pub fn from_parts(
        roms: Vec<LocalRom>,
        gram: GramTable,
        rank: usize,
        t0: f64,
        dt: f64,
    ) -> Result<Self> {
        if roms.len() < 2 {
            return Err(Error::InvalidInput("ensemble needs >= 2 samples".into()));
        }
        let n_obs = roms[0].observable_dim();
        let lift = roms[0].lift().clone();
        for rom in &roms {
            if rom.rank() != rank || rom.observable_dim() != n_obs || rom.lift() != &lift {
                return Err(Error::DimensionMismatch(
                    "all local ROMs must share rank, observable dimension and lift".into(),
                ));
            }
        }
        if gram.n_samples() != roms.len() || gram.rank() != rank {
            return Err(Error::DimensionMismatch("Gram table shape mismatch".into()));
        }
        // Gram consistency with the stored bases.
        for i in 0..roms.len() {
            for j in i..roms.len() {
                let fresh = roms[i].basis().transpose() * roms[j].basis();
                let defect = max_abs((&fresh - gram.block(i, j)).as_ref());
                if defect > 1e-12 {
                    return Err(Error::Numerical(format!(
                        "Gram block ({i},{j}) inconsistent with bases (defect {defect:.3e})"
                    )));
                }
            }
        }
        Ok(Self { roms, gram, rank, t0, dt })
    }

    pub fn roms(&self) -> &[LocalRom] {
        &self.roms
    }

    pub fn gram(&self) -> &GramTable {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn lift(&self) -> &ObservableLift {
        self.roms[0].lift()
    }

    pub fn observable_dim(&self) -> usize {
        self.roms[0].observable_dim()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn parameters(&self) -> Vec<&crate::data::ParameterPoint> {
        self.roms.iter().map(|r| r.parameter()).collect()
    }

    /// Number of stored reals: `(N*r + r^2 + r^2*(N_MC+1)/2) * N_MC`.
    pub fn storage_count(&self) -> usize {
        storage_count(self.observable_dim(), self.rank, self.roms.len())
    }
}

/// Offline storage footprint of a trained ensemble, in scalar count.
pub fn storage_count(n_obs: usize, r: usize, n_mc: usize) -> usize {
    n_obs * r * n_mc + r * r * n_mc + r * r * n_mc * (n_mc + 1) / 2
}

/// Builds the shifted data matrices of observables: column `k` of `Y1` is
/// `g(Q(t_k))`, column `k` of `Y2` is `g(Q(t_{k+1}))`.
pub fn assemble_shift_matrices(
    s: &SnapshotSet,
    lift: &ObservableLift,
) -> Result<(Mat<f64>, Mat<f64>)> {
    if s.n_cols() < 2 {
        return Err(Error::InvalidInput("need >= 2 snapshots".into()));
    }
    if s.qoi_dim() != lift.qoi_dim() {
        return Err(Error::DimensionMismatch(format!(
            "lift expects QoI dimension {}, snapshots have {}",
            lift.qoi_dim(),
            s.qoi_dim()
        )));
    }
    let n = lift.observable_dim();
    let m = s.n_cols() - 1;
    let mut lifted = Mat::zeros(n, m + 1);
    let mut q = vec![0.0f64; s.qoi_dim()];
    for k in 0..=m {
        for i in 0..s.qoi_dim() {
            q[i] = s.data()[(i, k)];
        }
        let y = lift.lift(&q)?;
        for i in 0..n {
            lifted[(i, k)] = y[i];
        }
    }
    let y1 = lifted.as_ref().subcols(0, m).to_owned();
    let y2 = lifted.as_ref().subcols(1, m).to_owned();
    Ok((y1, y2))
}

/// Resolves the truncation rank from singular values under a policy. The
/// result is always capped at the numerical rank (values above
/// `RANK_EPS * sigma_1`).
pub fn select_rank(singular_values: &[f64], policy: RankPolicy) -> Result<usize> {
    if singular_values.is_empty() {
        return Err(Error::InvalidInput("empty singular value list".into()));
    }
    let s1 = singular_values[0];
    if !(s1 > 0.0) {
        return Err(Error::Numerical("all singular values are zero".into()));
    }
    let numerical_rank = singular_values.iter().take_while(|&&s| s > RANK_EPS * s1).count();
    let r = match policy {
        RankPolicy::Fixed(r) => {
            if r == 0 {
                return Err(Error::InvalidInput("fixed rank must be >= 1".into()));
            }
            r.min(numerical_rank)
        }
        RankPolicy::Energy(eps) => {
            if !(0.0..1.0).contains(&eps) {
                return Err(Error::InvalidInput("energy threshold must be in [0, 1)".into()));
            }
            let total: f64 = singular_values.iter().map(|s| s * s).sum();
            let mut acc = 0.0;
            let mut r = numerical_rank;
            for (k, s) in singular_values.iter().enumerate() {
                acc += s * s;
                if acc / total >= 1.0 - eps {
                    r = k + 1;
                    break;
                }
            }
            r.min(numerical_rank)
        }
    };
    Ok(r.max(1))
}

/// Fits one local ROM: `V` are the leading `r` left singular vectors of
/// `Y1` and `K_r = V^T Y2 Z Sigma^{-1}` from the thin SVD `Y1 = V Sigma Z^T`.
pub fn fit_local_rom(s: &SnapshotSet, lift: &ObservableLift, r: usize) -> Result<LocalRom> {
    let (y1, y2) = assemble_shift_matrices(s, lift)?;
    let (u, sv, z) = thin_svd_signed(y1.as_ref())?;
    fit_from_svd(s, lift, r, &u, &sv, &z, y2.as_ref())
}

fn fit_from_svd(
    s: &SnapshotSet,
    lift: &ObservableLift,
    r: usize,
    u: &Mat<f64>,
    sv: &[f64],
    z: &Mat<f64>,
    y2: MatRef<'_, f64>,
) -> Result<LocalRom> {
    let max_r = u.ncols();
    if r == 0 || r > max_r {
        return Err(Error::InvalidInput(format!(
            "rank {r} out of range 1..={max_r}"
        )));
    }
    if sv[r - 1] < RANK_EPS * sv[0] {
        return Err(Error::Numerical(format!(
            "Sigma numerically singular at rank {r}: sigma_r/sigma_1 = {:.3e}",
            sv[r - 1] / sv[0]
        )));
    }
    let v = u.as_ref().subcols(0, r).to_owned();
    let zr = z.as_ref().subcols(0, r);
    // K_r = V^T Y2 Z Sigma^{-1}, scaling columns by 1/sigma_j.
    let mut k_r = v.transpose() * y2 * zr;
    for j in 0..r {
        let inv = 1.0 / sv[j];
        for i in 0..r {
            k_r[(i, j)] *= inv;
        }
    }
    LocalRom::new(s.parameter().clone(), v, k_r, sv.to_vec(), lift.clone())
}

/// Trains an ensemble: per-sample SVDs, a shared rank resolved as the
/// maximum of the per-sample policy ranks, local ROM fits and the Gram table.
pub fn train_ensemble(
    datasets: &[SnapshotSet],
    lift: &ObservableLift,
    policy: RankPolicy,
) -> Result<TrainedEnsemble> {
    if datasets.len() < 2 {
        return Err(Error::InvalidInput("need >= 2 training datasets".into()));
    }
    let dim = datasets[0].qoi_dim();
    let (t0, dt) = (datasets[0].t0(), datasets[0].dt());
    for d in datasets {
        if d.qoi_dim() != dim {
            return Err(Error::DimensionMismatch("inconsistent QoI dimensions".into()));
        }
        if (d.t0() - t0).abs() > 1e-12 || (d.dt() - dt).abs() > 1e-12 {
            return Err(Error::InvalidInput("training datasets must share the time grid".into()));
        }
    }
    for i in 0..datasets.len() {
        for j in i + 1..datasets.len() {
            if datasets[i].parameter() == datasets[j].parameter() {
                return Err(Error::InvalidInput(format!(
                    "duplicate parameter point at indices {i} and {j}"
                )));
            }
        }
    }

    let decomps = parallel::try_map_collect(datasets, |d| {
        let (y1, y2) = assemble_shift_matrices(d, lift)?;
        let (u, sv, z) = thin_svd_signed(y1.as_ref())?;
        Ok::<_, Error>((u, sv, z, y2))
    })?;

    let mut shared = 1usize;
    for (_, sv, _, _) in &decomps {
        shared = shared.max(select_rank(sv, policy)?);
    }

    let items: Vec<usize> = (0..datasets.len()).collect();
    let roms = parallel::try_map_collect(&items, |&i| {
        let (u, sv, z, y2) = &decomps[i];
        fit_from_svd(&datasets[i], lift, shared, u, sv, z, y2.as_ref())
    })?;

    let bases: Vec<MatRef<'_, f64>> = roms.iter().map(|r| r.basis()).collect();
    let gram = GramTable::from_bases(&bases)?;
    TrainedEnsemble::from_parts(roms, gram, shared, t0, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::ParameterPoint;

    fn snapshots(cols: &[Vec<f64>], p: f64) -> SnapshotSet {
        let n = cols[0].len();
        let m = Mat::from_fn(n, cols.len(), |i, j| cols[j][i]);
        SnapshotSet::new(m, 0.0, 1.0, ParameterPoint::scalar(p).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn shift_matrices_split_columns() {
        let s = snapshots(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]], 0.5);
        let lift = ObservableLift::Identity { dim: 2 };
        let (y1, y2) = assemble_shift_matrices(&s, &lift).unwrap();
        assert_eq!((y1.nrows(), y1.ncols()), (2, 2));
        assert_eq!(y1[(0, 0)], 1.0);
        assert_eq!(y1[(0, 1)], 3.0);
        assert_eq!(y2[(0, 0)], 3.0);
        assert_eq!(y2[(0, 1)], 5.0);
    }

    #[test]
    fn affine_lift_top_row_is_ones() {
        let s = snapshots(&[vec![1.0], vec![2.0], vec![4.0]], 0.5);
        let lift = ObservableLift::AffineAugment { qoi_dim: 1 };
        let (y1, y2) = assemble_shift_matrices(&s, &lift).unwrap();
        for k in 0..2 {
            assert_eq!(y1[(0, k)], 1.0);
            assert_eq!(y2[(0, k)], 1.0);
        }
    }

    #[test]
    fn single_snapshot_is_rejected() {
        let m = Mat::from_fn(2, 1, |_, _| 1.0);
        assert!(SnapshotSet::new(m, 0.0, 1.0, ParameterPoint::scalar(0.0).unwrap(), vec![]).is_err());
    }

    #[test]
    fn rank_cap_at_numerical_rank() {
        assert_eq!(select_rank(&[10.0, 1.0, 1e-16], RankPolicy::Fixed(3)).unwrap(), 2);
    }

    #[test]
    fn rank_energy_threshold() {
        let sv = [0.9f64.sqrt(), 0.1f64.sqrt()];
        assert_eq!(select_rank(&sv, RankPolicy::Energy(0.05)).unwrap(), 2);
        assert_eq!(select_rank(&sv, RankPolicy::Energy(0.2)).unwrap(), 1);
    }

    #[test]
    fn constant_trajectory_gives_identity_operator() {
        let c = vec![1.0, -2.0, 0.5];
        let s = snapshots(&[c.clone(), c.clone(), c.clone(), c], 0.1);
        let rom = fit_local_rom(&s, &ObservableLift::Identity { dim: 3 }, 1).unwrap();
        assert!((rom.operator()[(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_decay_is_recovered() {
        let s = snapshots(&[vec![8.0], vec![4.0], vec![2.0], vec![1.0]], 0.1);
        let rom = fit_local_rom(&s, &ObservableLift::Identity { dim: 1 }, 1).unwrap();
        assert!((rom.operator()[(0, 0)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identical_datasets_share_subspace() {
        let cols: Vec<Vec<f64>> =
            (0..6).map(|k| (0..4).map(|i| ((i * 3 + k) as f64).sin()).collect()).collect();
        let d1 = snapshots(&cols, 1.0);
        let d2 = snapshots(&cols, 2.0);
        let lift = ObservableLift::Identity { dim: 4 };
        let ens = train_ensemble(&[d1, d2], &lift, RankPolicy::Fixed(3)).unwrap();
        let p12 = ens.gram().get(0, 1);
        let sv = p12.as_ref().singular_values().unwrap();
        for s in sv {
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn duplicate_parameters_are_rejected() {
        let cols: Vec<Vec<f64>> = (0..4).map(|k| vec![k as f64, 1.0]).collect();
        let d1 = snapshots(&cols, 1.0);
        let d2 = snapshots(&cols, 1.0);
        let lift = ObservableLift::Identity { dim: 2 };
        assert!(train_ensemble(&[d1, d2], &lift, RankPolicy::Fixed(1)).is_err());
    }

    #[test]
    fn storage_formula() {
        // (N*r + r^2 + r^2*(N_MC+1)/2) * N_MC with the last term kept integral
        assert_eq!(storage_count(100, 10, 2), (100 * 10 + 100) * 2 + 100 * 3);
        assert_eq!(storage_count(7, 3, 4), (7 * 3 + 9) * 4 + 9 * 10);
    }
}
