//! Data generation: runs the full-order solvers for the configured problem
//! and wraps the trajectories (or derived outputs) as snapshot sets.

use faer::Mat;
use promkit::data::{ObservableLift, ParameterPoint, SnapshotSet};
use promkit::solvers::{adv_diff, burgers, masked_diffusion, Grid2, LinearHFMOperator};
use promkit::{Error, Result};

use crate::config::{ExperimentConfig, Problem, QoiKind};

/// Snapshot sets in QoI space for one list of parameters, plus the lift
/// the reduced models should train with.
pub struct GeneratedData {
    pub datasets: Vec<SnapshotSet>,
    pub lift: ObservableLift,
}

fn plate_qoi_sets(
    cfg: &ExperimentConfig,
    params: &[f64],
    steps: usize,
) -> Result<Vec<SnapshotSet>> {
    let grid = masked_diffusion::default_grid();
    let cavity = masked_diffusion::MaskedDiffusionConfig::with_capacity(1.0).cavity;
    let qoi = match cfg.qoi {
        QoiKind::State => masked_diffusion::DiffusionQoi::State,
        QoiKind::Flux => masked_diffusion::DiffusionQoi::Flux,
        QoiKind::HeatRate => masked_diffusion::DiffusionQoi::HeatRate,
    };
    params
        .iter()
        .map(|&p| {
            let s = masked_diffusion::simulate_snapshots(&grid, p, steps)?;
            let derived = masked_diffusion::derive_qois(s.data(), &grid, cavity, qoi)?;
            SnapshotSet::new(derived, s.t0(), s.dt(), ParameterPoint::scalar(p)?, vec![])
        })
        .collect()
}

fn state_dim(problem: Problem, cfg: &ExperimentConfig) -> usize {
    match problem {
        Problem::HeatedInlet => adv_diff::default_grid().n_nodes(),
        Problem::MaskedPlate => masked_diffusion::default_grid().n_nodes(),
        Problem::Burgers => cfg.burgers.n_cells,
    }
}

/// QoI trajectories for `params` and the matching observable lift. For the
/// scalar heat-rate output the polynomial lift is normalized on the pooled
/// training series.
pub fn generate(cfg: &ExperimentConfig, params: &[f64], steps: usize) -> Result<GeneratedData> {
    let datasets: Vec<SnapshotSet> = match cfg.problem {
        Problem::HeatedInlet => {
            let grid = adv_diff::default_grid();
            params
                .iter()
                .map(|&p| adv_diff::simulate_snapshots(&grid, p, steps))
                .collect::<Result<_>>()?
        }
        Problem::MaskedPlate => plate_qoi_sets(cfg, params, steps)?,
        Problem::Burgers => params
            .iter()
            .map(|&p| {
                let bc = burgers::BurgersConfig {
                    nu: p,
                    n_cells: cfg.burgers.n_cells,
                    cfl: 0.4,
                };
                let window = (cfg.burgers.window_start, cfg.burgers.window_end);
                burgers::simulate_window(&bc, window, steps)
            })
            .collect::<Result<_>>()?,
    };
    let qoi_dim = datasets[0].qoi_dim();
    let lift = match (cfg.problem, cfg.qoi) {
        (Problem::MaskedPlate, QoiKind::Flux) => {
            let n = state_dim(Problem::MaskedPlate, cfg);
            ObservableLift::ComponentStack { parts: vec![n, n] }
        }
        (Problem::MaskedPlate, QoiKind::HeatRate) => {
            let mut series = Vec::new();
            for d in &datasets {
                for k in 0..d.n_cols() {
                    series.push(d.data()[(0, k)]);
                }
            }
            ObservableLift::hermite_from_series(cfg.hermite_order, &series)?
        }
        _ => ObservableLift::AffineAugment { qoi_dim },
    };
    Ok(GeneratedData { datasets, lift })
}

/// One reference QoI trajectory at a single parameter.
pub fn reference(cfg: &ExperimentConfig, param: f64, steps: usize) -> Result<SnapshotSet> {
    Ok(generate(cfg, &[param], steps)?.datasets.pop().unwrap())
}

/// Full-state training snapshots and the matching one-step solver
/// operators, for the intrusive projection baseline. Only the linear
/// problems expose their system matrices.
pub fn state_systems(
    cfg: &ExperimentConfig,
    params: &[f64],
    steps: usize,
) -> Result<(Vec<SnapshotSet>, Vec<LinearHFMOperator>)> {
    match cfg.problem {
        Problem::HeatedInlet => {
            let grid = adv_diff::default_grid();
            let mut sets = Vec::new();
            let mut ops = Vec::new();
            for &p in params {
                sets.push(adv_diff::simulate_snapshots(&grid, p, steps)?);
                ops.push(adv_diff::build_operator(&grid, &adv_diff::AdvDiffConfig::with_velocity(p))?);
            }
            Ok((sets, ops))
        }
        Problem::MaskedPlate => {
            let grid = masked_diffusion::default_grid();
            let mut sets = Vec::new();
            let mut ops = Vec::new();
            for &p in params {
                sets.push(masked_diffusion::simulate_snapshots(&grid, p, steps)?);
                let mdc = masked_diffusion::MaskedDiffusionConfig::with_capacity(p);
                ops.push(masked_diffusion::build_operator(&grid, &mdc)?);
            }
            Ok((sets, ops))
        }
        Problem::Burgers => Err(Error::InvalidInput(
            "the projection baseline needs a linear solver; not available for this problem".into(),
        )),
    }
}

/// Full-state initial condition at a parameter (parameter-independent for
/// the linear problems).
pub fn state_initial(cfg: &ExperimentConfig, param: f64) -> Result<Mat<f64>> {
    match cfg.problem {
        Problem::HeatedInlet => {
            let grid = adv_diff::default_grid();
            Ok(adv_diff::initial_state(&grid, &adv_diff::AdvDiffConfig::with_velocity(param)))
        }
        Problem::MaskedPlate => {
            let grid = masked_diffusion::default_grid();
            let mdc = masked_diffusion::MaskedDiffusionConfig::with_capacity(param);
            Ok(masked_diffusion::initial_state(&grid, &mdc))
        }
        Problem::Burgers => Err(Error::InvalidInput(
            "the nonlinear problem has no closed-form window-start state".into(),
        )),
    }
}

/// Grid of the plate problem, for consumers deriving their own outputs.
pub fn plate_grid() -> Grid2 {
    masked_diffusion::default_grid()
}
