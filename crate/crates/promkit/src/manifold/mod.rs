//! Online interpolation of reduced-order bases and operators across the
//! parameter domain. Bases travel through the tangent space of the
//! Grassmann manifold at a reference sample; operators are first rotated
//! into the reference sample's generalized coordinates, then interpolated
//! in a matrix-manifold chart.

pub mod charts;
pub mod grassmann;
pub mod interp;
pub mod procrustes;

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::data::ParameterPoint;
use crate::dmd::{LocalRom, TrainedEnsemble};
use crate::linalg::{imag_part, max_abs, real_part};
use crate::{Error, Result};

pub use charts::{chart_exp, chart_log, OperatorManifold};
pub use grassmann::{grassmann_exp, grassmann_log, principal_angles};
pub use interp::{sample_weights, weights_1d, Extrapolation, Scheme};
pub use procrustes::{align_operators, procrustes_rotation};

/// Which sample anchors the tangent-space charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Sample closest to the target in range-normalized coordinates.
    NearestToTarget,
    /// Explicit sample index.
    Index(usize),
}

/// Which samples participate in the interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    All,
    /// The `k` samples nearest to the target in range-normalized
    /// coordinates; the reference sample is always included.
    Nearest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterpolationConfig {
    pub scheme: Scheme,
    pub neighborhood: Neighborhood,
    pub reference: Reference,
    pub operator_manifold: OperatorManifold,
    pub extrapolation: Extrapolation,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::PiecewiseLinear,
            neighborhood: Neighborhood::All,
            reference: Reference::NearestToTarget,
            operator_manifold: OperatorManifold::GlNonsingular,
            extrapolation: Extrapolation::Error,
        }
    }
}

fn check_points(points: &[Vec<f64>], target: &[f64]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("interpolation needs >= 2 samples".into()));
    }
    let dim = target.len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch(
            "sample and target parameter dimensions must match".into(),
        ));
    }
    if points.iter().flatten().chain(target).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("parameter coordinates".into()));
    }
    Ok(())
}

/// Squared distance in coordinates normalized by the per-axis sample range.
fn normalized_dist2(points: &[Vec<f64>], a: &[f64], b: &[f64]) -> f64 {
    let dim = a.len();
    let mut d2 = 0.0;
    for d in 0..dim {
        let lo = points.iter().map(|p| p[d]).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p[d]).fold(f64::NEG_INFINITY, f64::max);
        let span = (hi - lo).max(1e-300);
        let t = (a[d] - b[d]) / span;
        d2 += t * t;
    }
    d2
}

/// Index of the reference sample for a target parameter.
pub fn resolve_reference(points: &[Vec<f64>], target: &[f64], reference: Reference) -> Result<usize> {
    check_points(points, target)?;
    match reference {
        Reference::Index(i) => {
            if i >= points.len() {
                return Err(Error::InvalidInput(format!("reference index {i} out of range")));
            }
            Ok(i)
        }
        Reference::NearestToTarget => {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (i, p) in points.iter().enumerate() {
                let d = normalized_dist2(points, p, target);
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            Ok(best)
        }
    }
}

/// Indices of the participating samples, in ascending order, always
/// containing `i0`.
pub fn select_neighborhood(
    points: &[Vec<f64>],
    target: &[f64],
    neighborhood: Neighborhood,
    i0: usize,
) -> Result<Vec<usize>> {
    check_points(points, target)?;
    match neighborhood {
        Neighborhood::All => Ok((0..points.len()).collect()),
        Neighborhood::Nearest(k) => {
            if k < 2 {
                return Err(Error::InvalidInput("neighborhood needs >= 2 samples".into()));
            }
            let mut order: Vec<usize> = (0..points.len()).collect();
            order.sort_by(|&a, &b| {
                normalized_dist2(points, &points[a], target)
                    .partial_cmp(&normalized_dist2(points, &points[b], target))
                    .unwrap()
            });
            let mut sel: Vec<usize> = order.into_iter().take(k.min(points.len())).collect();
            if !sel.contains(&i0) {
                sel.pop();
                sel.push(i0);
            }
            sel.sort_unstable();
            Ok(sel)
        }
    }
}

fn cardinal_index(weights: &[f64]) -> Option<usize> {
    let hit = weights.iter().position(|&w| w == 1.0)?;
    weights.iter().enumerate().all(|(i, &w)| i == hit || w == 0.0).then_some(hit)
}

struct Plan {
    i0: usize,
    sel: Vec<usize>,
    weights: Vec<f64>,
}

fn make_plan(points: &[Vec<f64>], target: &[f64], cfg: &InterpolationConfig) -> Result<Plan> {
    let i0 = resolve_reference(points, target, cfg.reference)?;
    let sel = select_neighborhood(points, target, cfg.neighborhood, i0)?;
    let sub: Vec<Vec<f64>> = sel.iter().map(|&i| points[i].clone()).collect();
    let weights = sample_weights(&sub, target, cfg.scheme, cfg.extrapolation)?;
    Ok(Plan { i0, sel, weights })
}

/// Interpolates reduced-order bases onto `target`. `gram` must yield the
/// blocks `P^(i,j) = V_i^T V_j` in global sample indices. A target that
/// coincides with a sample returns that sample's basis unchanged.
pub fn interpolate_basis(
    points: &[Vec<f64>],
    bases: &[MatRef<'_, f64>],
    gram: impl Fn(usize, usize) -> Mat<f64>,
    target: &[f64],
    cfg: &InterpolationConfig,
) -> Result<Mat<f64>> {
    if bases.len() != points.len() {
        return Err(Error::DimensionMismatch("one basis per sample".into()));
    }
    let plan = make_plan(points, target, cfg)?;
    if let Some(k) = cardinal_index(&plan.weights) {
        return Ok(bases[plan.sel[k]].to_owned());
    }
    let v0 = bases[plan.i0];
    let (n, r) = (v0.nrows(), v0.ncols());
    let tangents: Vec<Mat<f64>> = plan
        .sel
        .iter()
        .map(|&i| {
            if i == plan.i0 {
                Ok(Mat::zeros(n, r))
            } else {
                grassmann_log(v0, bases[i], gram(plan.i0, i).as_ref())
            }
        })
        .collect::<Result<_>>()?;
    let refs: Vec<MatRef<'_, f64>> = tangents.iter().map(Mat::as_ref).collect();
    let gamma = interp::accumulate(&plan.weights, &refs)?;
    grassmann_exp(v0, gamma.as_ref())
}

fn operator_tangents(
    x0: MatRef<'_, f64>,
    aligned: &[Mat<f64>],
    manifold: OperatorManifold,
) -> Result<Vec<Mat<c64>>> {
    aligned
        .iter()
        .map(|k| chart_log(x0, k.as_ref(), manifold))
        .collect()
}

/// Interpolates reduced operators onto `target`, after rotating each into
/// the reference sample's generalized coordinates. Falls back from the
/// nonsingular-matrix chart to the flat chart when a principal logarithm
/// does not exist.
pub fn interpolate_operator(
    points: &[Vec<f64>],
    ops: &[MatRef<'_, f64>],
    gram: impl Fn(usize, usize) -> Mat<f64>,
    target: &[f64],
    cfg: &InterpolationConfig,
) -> Result<Mat<f64>> {
    if ops.len() != points.len() {
        return Err(Error::DimensionMismatch("one operator per sample".into()));
    }
    let plan = make_plan(points, target, cfg)?;
    if let Some(k) = cardinal_index(&plan.weights) {
        return Ok(ops[plan.sel[k]].to_owned());
    }
    let sub_ops: Vec<MatRef<'_, f64>> = plan.sel.iter().map(|&i| ops[i]).collect();
    let i0_local = plan.sel.iter().position(|&i| i == plan.i0).unwrap();
    let aligned = align_operators(
        &sub_ops,
        |a, b| gram(plan.sel[a], plan.sel[b]),
        i0_local,
    )?;
    let x0 = aligned[i0_local].as_ref();

    let mut manifold = cfg.operator_manifold;
    let tangents = match operator_tangents(x0, &aligned, manifold) {
        Ok(t) => t,
        Err(e) if manifold == OperatorManifold::GlNonsingular => {
            log::warn!("matrix logarithm chart unavailable ({e}); falling back to flat chart");
            manifold = OperatorManifold::Euclidean;
            operator_tangents(x0, &aligned, manifold)?
        }
        Err(e) => return Err(e),
    };
    let refs: Vec<MatRef<'_, c64>> = tangents.iter().map(Mat::as_ref).collect();
    let gamma = interp::accumulate_c(&plan.weights, &refs)?;
    let k_c = chart_exp(x0, gamma.as_ref(), manifold)?;
    let re = real_part(k_c.as_ref());
    let resid = max_abs(imag_part(k_c.as_ref()).as_ref());
    if resid > 1e-8 * max_abs(re.as_ref()).max(1e-300) {
        return Err(Error::Numerical(format!(
            "interpolated operator has imaginary residue {resid:.3e}"
        )));
    }
    Ok(re)
}

/// Interpolates reduced vectors (e.g. affine forcing terms) onto `target`.
/// Each vector is rotated into the reference coordinates as `Q_i^T b_i`
/// and the result is a flat weighted sum.
pub fn interpolate_vector(
    points: &[Vec<f64>],
    vecs: &[MatRef<'_, f64>],
    gram: impl Fn(usize, usize) -> Mat<f64>,
    target: &[f64],
    cfg: &InterpolationConfig,
) -> Result<Mat<f64>> {
    if vecs.len() != points.len() {
        return Err(Error::DimensionMismatch("one vector per sample".into()));
    }
    let plan = make_plan(points, target, cfg)?;
    if let Some(k) = cardinal_index(&plan.weights) {
        return Ok(vecs[plan.sel[k]].to_owned());
    }
    let aligned: Vec<Mat<f64>> = plan
        .sel
        .iter()
        .map(|&i| {
            if i == plan.i0 {
                Ok(vecs[i].to_owned())
            } else {
                let q = procrustes_rotation(gram(i, plan.i0).as_ref())?;
                Ok(q.transpose() * vecs[i])
            }
        })
        .collect::<Result<_>>()?;
    let refs: Vec<MatRef<'_, f64>> = aligned.iter().map(Mat::as_ref).collect();
    interp::accumulate(&plan.weights, &refs)
}

/// Builds the interpolated local ROM of a trained ensemble at a target
/// parameter. Singular values are carried along by the same weights for
/// diagnostics, clamped to stay nonincreasing under signed weights.
pub fn interpolate_local_rom(
    ens: &TrainedEnsemble,
    target: &ParameterPoint,
    cfg: &InterpolationConfig,
) -> Result<LocalRom> {
    let points: Vec<Vec<f64>> = ens.parameters().iter().map(|p| p.values().to_vec()).collect();
    let bases: Vec<MatRef<'_, f64>> = ens.roms().iter().map(|r| r.basis()).collect();
    let ops: Vec<MatRef<'_, f64>> = ens.roms().iter().map(|r| r.operator()).collect();
    let gram = |i: usize, j: usize| ens.gram().get(i, j);

    let basis = interpolate_basis(&points, &bases, gram, target.values(), cfg)?;
    let operator = interpolate_operator(&points, &ops, gram, target.values(), cfg)?;

    let plan = make_plan(&points, target.values(), cfg)?;
    let r = ens.rank();
    let mut sv = vec![0.0f64; r];
    for (w, &i) in plan.weights.iter().zip(&plan.sel) {
        for (k, s) in sv.iter_mut().enumerate() {
            *s += w * ens.roms()[i].singular_values()[k];
        }
    }
    for k in 0..r {
        let cap = if k == 0 { f64::INFINITY } else { sv[k - 1] };
        sv[k] = sv[k].clamp(0.0, cap);
    }

    LocalRom::new(target.clone(), basis, operator, sv, ens.lift().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmd::GramTable;
    use crate::linalg::identity;

    fn e2(n: usize, k0: usize, k1: usize) -> Mat<f64> {
        Mat::from_fn(n, 2, |i, j| {
            if (j == 0 && i == k0) || (j == 1 && i == k1) {
                1.0
            } else {
                0.0
            }
        })
    }

    fn scalar_points(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn reference_resolution_is_range_normalized() {
        // Axis 0 spans 1000, axis 1 spans 1; raw distance would pick index 0.
        let pts = vec![vec![0.0, 0.0], vec![1000.0, 1.0]];
        let i = resolve_reference(&pts, &[400.0, 0.9], Reference::NearestToTarget).unwrap();
        assert_eq!(i, 1);
    }

    #[test]
    fn node_target_returns_stored_elements() {
        let v0 = e2(4, 0, 1);
        let v1 = {
            let th = 0.4f64;
            Mat::from_fn(4, 2, |i, j| match (i, j) {
                (0, 0) => th.cos(),
                (2, 0) => th.sin(),
                (1, 1) => 1.0,
                _ => 0.0,
            })
        };
        let bases = [v0.as_ref(), v1.as_ref()];
        let gt = GramTable::from_bases(&bases).unwrap();
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig::default();
        let got = interpolate_basis(&pts, &bases, |i, j| gt.get(i, j), &[1.0], &cfg).unwrap();
        for j in 0..2 {
            for i in 0..4 {
                assert_eq!(got[(i, j)].to_bits(), v1[(i, j)].to_bits());
            }
        }
    }

    #[test]
    fn basis_midpoint_halves_rotation_angle() {
        let th = 0.8f64;
        let v0 = e2(3, 0, 1);
        let v1 = Mat::from_fn(3, 2, |i, j| match (i, j) {
            (0, 0) => th.cos(),
            (2, 0) => th.sin(),
            (1, 1) => 1.0,
            _ => 0.0,
        });
        let bases = [v0.as_ref(), v1.as_ref()];
        let gt = GramTable::from_bases(&bases).unwrap();
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig {
            reference: Reference::Index(0),
            ..Default::default()
        };
        let mid = interpolate_basis(&pts, &bases, |i, j| gt.get(i, j), &[0.5], &cfg).unwrap();
        let angles = principal_angles(v0.as_ref(), mid.as_ref()).unwrap();
        let max_angle = angles.iter().cloned().fold(0.0f64, f64::max);
        assert!((max_angle - th / 2.0).abs() < 1e-10, "got {max_angle}");
    }

    #[test]
    fn shared_basis_operator_interpolation_is_entrywise() {
        // Identical bases: Gram blocks are the identity, alignment is trivial
        // and the flat chart must reduce to plain componentwise interpolation.
        let k0 = Mat::from_fn(2, 2, |i, j| if i == j { 2.0 } else { 0.1 });
        let k1 = Mat::from_fn(2, 2, |i, j| if i == j { 4.0 } else { 0.3 });
        let ops = [k0.as_ref(), k1.as_ref()];
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig {
            operator_manifold: OperatorManifold::Euclidean,
            ..Default::default()
        };
        let got = interpolate_operator(&pts, &ops, |_, _| identity(2), &[0.25], &cfg).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                let want = 0.75 * k0[(i, j)] + 0.25 * k1[(i, j)];
                assert!((got[(i, j)] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gl_chart_interpolates_geometrically_on_diagonals() {
        // Positive diagonal operators: the log chart turns interpolation of
        // K = diag(a) into interpolation of ln(a).
        let k0 = Mat::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        let k1 = Mat::from_fn(2, 2, |i, j| if i == j { 4.0 } else { 0.0 });
        let ops = [k0.as_ref(), k1.as_ref()];
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig {
            reference: Reference::Index(0),
            ..Default::default()
        };
        let got = interpolate_operator(&pts, &ops, |_, _| identity(2), &[0.5], &cfg).unwrap();
        assert!((got[(0, 0)] - 2.0).abs() < 1e-10);
        assert!((got[(1, 1)] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn singular_gl_chart_falls_back_to_flat() {
        let k0 = identity(2);
        let k1 = Mat::zeros(2, 2); // singular: no principal logarithm
        let ops = [k0.as_ref(), k1.as_ref()];
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig::default();
        let got = interpolate_operator(&pts, &ops, |_, _| identity(2), &[0.5], &cfg).unwrap();
        assert!((got[(0, 0)] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_outside_hull_errors_by_default() {
        let k0 = identity(2);
        let k1 = faer::Scale(2.0) * identity(2);
        let ops = [k0.as_ref(), k1.as_ref()];
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig::default();
        assert!(interpolate_operator(&pts, &ops, |_, _| identity(2), &[3.0], &cfg).is_err());
    }

    #[test]
    fn nearest_neighborhood_keeps_reference() {
        let pts = scalar_points(&[0.0, 1.0, 2.0, 10.0]);
        let sel = select_neighborhood(&pts, &[1.4], Neighborhood::Nearest(2), 3).unwrap();
        assert!(sel.contains(&3));
        assert_eq!(sel.len(), 2);
    }

    #[test]
    fn vector_interpolation_aligns_then_averages() {
        let b0 = Mat::from_fn(2, 1, |i, _| if i == 0 { 1.0 } else { 0.0 });
        let b1 = Mat::from_fn(2, 1, |i, _| if i == 0 { 0.0 } else { 1.0 });
        // Gram block between samples is a quarter-turn rotation; aligning b1
        // maps it onto b0's direction.
        let rot = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -1.0,
            (1, 0) => 1.0,
            _ => 0.0,
        });
        let pts = scalar_points(&[0.0, 1.0]);
        let cfg = InterpolationConfig {
            reference: Reference::Index(0),
            ..Default::default()
        };
        let vecs = [b0.as_ref(), b1.as_ref()];
        let got = interpolate_vector(
            &pts,
            &vecs,
            |i, j| if i == j { identity(2) } else { rot.clone() },
            &[0.5],
            &cfg,
        )
        .unwrap();
        // Q from P^(1,0) = rot is rot itself; Q^T b1 = [1, 0]^T.
        assert!((got[(0, 0)] - 1.0).abs() < 1e-12);
        assert!(got[(1, 0)].abs() < 1e-12);
    }
}
