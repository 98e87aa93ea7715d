//! Benchmark orchestration: trains the requested methods once, then sweeps
//! the test parameters measuring prediction error against fresh full-order
//! reference runs, with wall-clock accounting for the offline and online
//! stages.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use faer::{Mat, MatRef};
use promkit::baselines::kriging::KrigingSurrogate;
use promkit::baselines::pod::{interpolate_pod, pod_predict, pod_train, PodEnsemble};
use promkit::data::{ParameterPoint, SnapshotSet};
use promkit::dmd::{train_ensemble, TrainedEnsemble};
use promkit::manifold::{interpolate_local_rom, sample_weights};
use promkit::metrics::{relative_l2_series, total_relative_l2};
use promkit::reconstruct::predict_qoi_trajectory;
use promkit::{Error, Result};
use serde::Serialize;

use crate::config::{ExperimentConfig, Problem, QoiKind};
use crate::problems;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Dmd,
    Pod,
    Kriging,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Dmd => "dmd",
            Self::Pod => "pod",
            Self::Kriging => "kriging",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dmd" => Ok(Self::Dmd),
            "pod" => Ok(Self::Pod),
            "kriging" => Ok(Self::Kriging),
            other => Err(Error::InvalidInput(format!(
                "unknown method '{other}' (expected dmd, pod or kriging)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetRow {
    pub parameter: f64,
    pub method: String,
    /// Aggregate relative L2 error over the prediction horizon.
    pub total_error: f64,
    /// Worst per-step relative error.
    pub max_step_error: f64,
    pub online_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodTimings {
    pub data_generation_seconds: f64,
    pub training_seconds: f64,
    pub mean_online_seconds: f64,
    /// Full-order wall time over online prediction wall time, per target.
    pub online_speedup: f64,
    /// Full-order sweep cost over offline + online cost of the method.
    pub total_speedup: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub problem: String,
    pub qoi: String,
    pub n_train: usize,
    pub n_test: usize,
    pub mean_hfm_seconds: f64,
    pub rows: Vec<TargetRow>,
    pub per_method: BTreeMap<String, MethodTimings>,
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Interpolates the stored initial QoI columns of the training sets onto a
/// target parameter; exact pass-through at training nodes.
fn interpolated_initial(
    cfg: &ExperimentConfig,
    datasets: &[SnapshotSet],
    target: f64,
) -> Result<Vec<f64>> {
    let points: Vec<Vec<f64>> =
        datasets.iter().map(|d| d.parameter().values().to_vec()).collect();
    let w = sample_weights(
        &points,
        &[target],
        cfg.interpolation.scheme,
        cfg.interpolation.extrapolation,
    )?;
    let n = datasets[0].qoi_dim();
    let mut q0 = vec![0.0f64; n];
    for (ws, d) in w.iter().zip(datasets) {
        for (i, q) in q0.iter_mut().enumerate() {
            *q += ws * d.data()[(i, 0)];
        }
    }
    Ok(q0)
}

fn error_pair(pred: MatRef<'_, f64>, reference: MatRef<'_, f64>, include_initial: bool) -> Result<(f64, f64)> {
    let cols = pred.ncols().min(reference.ncols());
    let p = pred.subcols(0, cols);
    let r = reference.subcols(0, cols);
    let total = total_relative_l2(p, r, include_initial)?;
    let series = relative_l2_series(p, r)?;
    let skip = usize::from(!include_initial);
    let max_step = series.iter().skip(skip).cloned().fold(0.0f64, f64::max);
    Ok((total, max_step))
}

struct Trained {
    dmd: Option<(TrainedEnsemble, Vec<SnapshotSet>)>,
    pod: Option<PodEnsemble>,
    kriging: Option<KrigingSurrogate>,
    data_seconds: BTreeMap<Method, f64>,
    train_seconds: BTreeMap<Method, f64>,
}

fn train_all(cfg: &ExperimentConfig, methods: &[Method]) -> Result<Trained> {
    let mut out = Trained {
        dmd: None,
        pod: None,
        kriging: None,
        data_seconds: BTreeMap::new(),
        train_seconds: BTreeMap::new(),
    };
    let needs_qoi_data = methods.iter().any(|m| matches!(m, Method::Dmd | Method::Kriging));
    let mut qoi_data = None;
    let mut qoi_data_seconds = 0.0;
    if needs_qoi_data {
        let (data, secs) =
            timed(|| problems::generate(cfg, &cfg.train_parameters, cfg.snapshots))?;
        qoi_data = Some(data);
        qoi_data_seconds = secs;
    }
    for &m in methods {
        match m {
            Method::Dmd => {
                let data = qoi_data.as_ref().unwrap();
                let (ens, secs) =
                    timed(|| train_ensemble(&data.datasets, &data.lift, cfg.rank))?;
                out.dmd = Some((ens, data.datasets.clone()));
                out.data_seconds.insert(m, qoi_data_seconds);
                out.train_seconds.insert(m, secs);
            }
            Method::Kriging => {
                let data = qoi_data.as_ref().unwrap();
                let (gp, secs) = timed(|| KrigingSurrogate::fit(&data.datasets, None))?;
                out.kriging = Some(gp);
                out.data_seconds.insert(m, qoi_data_seconds);
                out.train_seconds.insert(m, secs);
            }
            Method::Pod => {
                if cfg.problem == Problem::Burgers || cfg.qoi != QoiKind::State {
                    return Err(Error::InvalidInput(
                        "the projection baseline supports the state output of the linear problems only"
                            .into(),
                    ));
                }
                let ((sets, ops), gen_secs) =
                    timed(|| problems::state_systems(cfg, &cfg.train_parameters, cfg.snapshots))?;
                let op_refs: Vec<_> = ops.iter().collect();
                let (ens, secs) = timed(|| pod_train(&sets, &op_refs, cfg.rank))?;
                out.pod = Some(ens);
                out.data_seconds.insert(m, gen_secs);
                out.train_seconds.insert(m, secs);
            }
        }
    }
    Ok(out)
}

fn predict_one(
    cfg: &ExperimentConfig,
    trained: &Trained,
    method: Method,
    target: f64,
    steps: usize,
) -> Result<Mat<f64>> {
    match method {
        Method::Dmd => {
            let (ens, train_sets) = trained.dmd.as_ref().unwrap();
            let q0 = interpolated_initial(cfg, train_sets, target)?;
            let rom =
                interpolate_local_rom(ens, &ParameterPoint::scalar(target)?, &cfg.interpolation)?;
            let (pred, _) = predict_qoi_trajectory(&rom, &q0, steps)?;
            Ok(pred)
        }
        Method::Pod => {
            let ens = trained.pod.as_ref().unwrap();
            let rom =
                interpolate_pod(ens, &ParameterPoint::scalar(target)?, &cfg.interpolation)?;
            let q0 = problems::state_initial(cfg, target)?;
            pod_predict(&rom, q0.as_ref(), steps)
        }
        Method::Kriging => trained.kriging.as_ref().unwrap().predict(target),
    }
}

pub fn run_benchmark(cfg: &ExperimentConfig, methods: &[Method]) -> Result<BenchReport> {
    cfg.validate()?;
    if methods.is_empty() {
        return Err(Error::InvalidInput("no methods selected".into()));
    }
    let steps = cfg.prediction_steps();
    let trained = train_all(cfg, methods)?;

    // warm-up run per method so first-use effects (page faults, lazy
    // allocations) don't land in the first target's timing
    for &m in methods {
        let _ = predict_one(cfg, &trained, m, cfg.test_parameters[0], steps)?;
    }

    let mut rows = Vec::new();
    let mut hfm_total = 0.0f64;
    let mut online_total: BTreeMap<Method, f64> = BTreeMap::new();
    for &p in &cfg.test_parameters {
        let (reference, hfm_secs) = timed(|| problems::reference(cfg, p, steps))?;
        hfm_total += hfm_secs;
        for &m in methods {
            let (pred, secs) = timed(|| predict_one(cfg, &trained, m, p, steps))?;
            let (total_error, max_step_error) =
                error_pair(pred.as_ref(), reference.data(), cfg.include_initial)?;
            *online_total.entry(m).or_default() += secs;
            rows.push(TargetRow {
                parameter: p,
                method: m.as_str().to_string(),
                total_error,
                max_step_error,
                online_seconds: secs,
            });
        }
    }

    let n_test = cfg.test_parameters.len();
    let mean_hfm = hfm_total / n_test as f64;
    let mut per_method = BTreeMap::new();
    for &m in methods {
        let online = online_total[&m] / n_test as f64;
        let offline = trained.data_seconds[&m] + trained.train_seconds[&m];
        per_method.insert(
            m.as_str().to_string(),
            MethodTimings {
                data_generation_seconds: trained.data_seconds[&m],
                training_seconds: trained.train_seconds[&m],
                mean_online_seconds: online,
                online_speedup: mean_hfm / online.max(1e-12),
                total_speedup: (n_test as f64 * mean_hfm)
                    / (offline + n_test as f64 * online).max(1e-12),
            },
        );
    }
    Ok(BenchReport {
        problem: cfg.problem.as_str().to_string(),
        qoi: cfg.qoi.as_str().to_string(),
        n_train: cfg.train_parameters.len(),
        n_test,
        mean_hfm_seconds: mean_hfm,
        rows,
        per_method,
    })
}
