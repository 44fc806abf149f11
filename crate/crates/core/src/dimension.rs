//! Graph dimensions of fractal interpolants: closed-form predictors and an
//! empirical box-counting estimator.
//!
//! For data that is not collinear and a scale vector with `Σ|α_i| > 1`, the
//! box dimension of the interpolant's graph is the unique `D ∈ (1, 2)` with
//!
//! ```text
//! Φ(D) = Σ |α_i| a_i^(D-1) = 1,    a_i = x_i - x_(i-1).
//! ```
//!
//! When `Σ|α_i| ≤ 1` the dimension is 1. Under the additional quotient
//! condition checked by [`hausdorff_condition`], the same root is also the
//! Hausdorff dimension of an affine interpolant.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::func::GridFunction;
use crate::{Error, Result};

/// Default vertical tolerance for [`collinear`].
pub const COLLINEAR_TOL: f64 = 1e-9;
/// Default regression window `j ∈ [4, 12]`.
pub const DEFAULT_J_MIN: u32 = 4;
pub const DEFAULT_J_MAX: u32 = 12;

const ROOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictedKind {
    Box,
    Hausdorff,
    DegenerateOne,
}

/// One regression scale: `δ = 2^-j` and the mesh count at that scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleCount {
    pub j: u32,
    pub delta: f64,
    pub count: u64,
}

/// Predicted and/or estimated graph dimension.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DimReport {
    pub predicted: Option<f64>,
    pub predicted_kind: Option<PredictedKind>,
    /// Regression slope clamped to `[1, 2]`.
    pub estimated: Option<f64>,
    pub raw_slope: Option<f64>,
    pub slope_stderr: Option<f64>,
    pub r_squared: Option<f64>,
    pub scales_used: Vec<ScaleCount>,
    /// Why a prediction was withheld, if it was.
    pub diagnostics: Vec<String>,
}

impl DimReport {
    fn predicted(value: f64, kind: PredictedKind) -> Self {
        DimReport { predicted: Some(value), predicted_kind: Some(kind), ..Default::default() }
    }

    fn withheld(reason: impl Into<String>) -> Self {
        DimReport { diagnostics: vec![reason.into()], ..Default::default() }
    }

    /// Copies the estimation fields of `other` into `self`.
    pub fn with_estimate(mut self, other: &DimReport) -> Self {
        self.estimated = other.estimated;
        self.raw_slope = other.raw_slope;
        self.slope_stderr = other.slope_stderr;
        self.r_squared = other.r_squared;
        self.scales_used = other.scales_used.clone();
        self
    }

    /// Writes `scales_used` as `j,delta,count` CSV.
    pub fn write_scales_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "j,delta,count")?;
        for s in &self.scales_used {
            writeln!(w, "{},{:.16e},{}", s.j, s.delta, s.count)?;
        }
        Ok(())
    }
}

/// Interpolation points with `0 = x_0 < … < x_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataSet {
    points: Vec<(f64, f64)>,
}

impl DataSet {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 interpolation points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidArgument("interpolation points must be finite".into()));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::InvalidArgument("abscissae must run from 0 to 1".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("abscissae must be strictly increasing".into()));
        }
        Ok(DataSet { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[1].0 - w[0].0).collect()
    }

    fn intervals(&self) -> usize {
        self.points.len() - 1
    }
}

impl<'de> Deserialize<'de> for DataSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            points: Vec<(f64, f64)>,
        }
        let raw = Raw::deserialize(d)?;
        DataSet::new(raw.points).map_err(serde::de::Error::custom)
    }
}

/// True iff every point lies within vertical distance `tol` of the chord
/// through the first and last points.
pub fn collinear(data: &DataSet, tol: f64) -> bool {
    let pts = data.points();
    let (x0, y0) = pts[0];
    let (xn, yn) = pts[pts.len() - 1];
    let slope = (yn - y0) / (xn - x0);
    pts.iter().all(|&(x, y)| (y - (y0 + slope * (x - x0))).abs() <= tol)
}

fn check_scale_vector(alpha: &[f64], intervals: usize) -> Result<()> {
    if alpha.len() != intervals {
        return Err(Error::InvalidArgument(format!(
            "{} scale factors for {intervals} subintervals",
            alpha.len()
        )));
    }
    for (index, &value) in alpha.iter().enumerate() {
        if !(value.abs() < 1.0) {
            return Err(Error::NonContractive { index, value });
        }
    }
    Ok(())
}

/// `Φ(D) = Σ |α_i| a_i^(D-1)`.
pub fn dimension_function(lengths: &[f64], alpha: &[f64], d: f64) -> f64 {
    lengths.iter().zip(alpha).map(|(a, al)| al.abs() * a.powf(d - 1.0)).sum()
}

/// The unique `D ∈ (1, 2)` solving `Σ |α_i| a_i^(D-1) = 1`, by bisection.
///
/// `Φ` is strictly decreasing because every `a_i < 1`; `Φ(1) = Σ|α_i| > 1`
/// and `Φ(2) = Σ |α_i| a_i < Σ a_i = 1` bracket the root.
pub fn dimension_equation_root(lengths: &[f64], alpha: &[f64]) -> Result<f64> {
    if lengths.is_empty() || lengths.len() != alpha.len() {
        return Err(Error::InvalidArgument(format!(
            "{} lengths for {} scale factors",
            lengths.len(),
            alpha.len()
        )));
    }
    if lengths.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::InvalidArgument("interval lengths must lie in (0, 1)".into()));
    }
    let total: f64 = lengths.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("interval lengths sum to {total}, not 1")));
    }
    check_scale_vector(alpha, lengths.len())?;
    let abs_sum: f64 = alpha.iter().map(|a| a.abs()).sum();
    if abs_sum <= 1.0 {
        return Err(Error::Precondition(format!(
            "Σ|α_i| = {abs_sum} ≤ 1; the graph dimension is 1"
        )));
    }

    let phi = |d: f64| dimension_function(lengths, alpha, d) - 1.0;
    let (mut lo, mut hi) = (1.0f64, 2.0f64);
    loop {
        let mid = 0.5 * (lo + hi);
        let v = phi(mid);
        if v.abs() <= ROOT_TOL || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Box dimension of an interpolant of `data` with scale vector `alpha`.
///
/// Returns a report with `predicted = 1` when `Σ|α_i| ≤ 1`, the root of the
/// dimension equation for non-collinear data, and no prediction (with a
/// diagnostic) when the data are collinear and `Σ|α_i| > 1`.
pub fn predict_box_dim(data: &DataSet, alpha: &[f64]) -> Result<DimReport> {
    check_scale_vector(alpha, data.intervals())?;
    let abs_sum: f64 = alpha.iter().map(|a| a.abs()).sum();
    if abs_sum <= 1.0 {
        return Ok(DimReport::predicted(1.0, PredictedKind::DegenerateOne));
    }
    if collinear(data, COLLINEAR_TOL) {
        return Ok(DimReport::withheld(
            "interpolation points are collinear; the box-dimension formula needs non-collinear data",
        ));
    }
    let d = dimension_equation_root(&data.lengths(), alpha)?;
    Ok(DimReport::predicted(d, PredictedKind::Box))
}

/// Quotients `(y_i - y_(i-1) - α_i (y_N - y_0)) / (x_i - x_(i-1) - α_i)`.
pub fn hausdorff_quotients(data: &DataSet, alpha: &[f64], tol: f64) -> Result<Vec<f64>> {
    check_scale_vector(alpha, data.intervals())?;
    let pts = data.points();
    let span = pts[pts.len() - 1].1 - pts[0].1;
    pts.windows(2)
        .zip(alpha)
        .enumerate()
        .map(|(index, (w, a))| {
            let denom = w[1].0 - w[0].0 - a;
            if denom.abs() <= tol {
                return Err(Error::DegenerateDenominator { index });
            }
            Ok((w[1].1 - w[0].1 - a * span) / denom)
        })
        .collect()
}

/// True iff two of the [`hausdorff_quotients`] differ by more than `tol`.
pub fn hausdorff_condition(data: &DataSet, alpha: &[f64], tol: f64) -> Result<bool> {
    let q = hausdorff_quotients(data, alpha, tol)?;
    let (lo, hi) = q.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    Ok(hi - lo > tol)
}

/// Hausdorff dimension of the affine interpolant of `data`, when both
/// hypotheses (`Σ|α_i| > 1` and the quotient condition) hold.
pub fn predict_hausdorff_dim(data: &DataSet, alpha: &[f64]) -> Result<DimReport> {
    check_scale_vector(alpha, data.intervals())?;
    let abs_sum: f64 = alpha.iter().map(|a| a.abs()).sum();
    if abs_sum <= 1.0 {
        return Ok(DimReport::withheld(format!(
            "hypothesis Σ|α_i| > 1 fails (Σ|α_i| = {abs_sum})"
        )));
    }
    match hausdorff_condition(data, alpha, COLLINEAR_TOL) {
        Ok(true) => {}
        Ok(false) => {
            return Ok(DimReport::withheld(
                "quotient condition fails: all quotients (Δy_i - α_i(y_N - y_0)) / (a_i - α_i) coincide",
            ))
        }
        Err(Error::DegenerateDenominator { index }) => {
            return Ok(DimReport::withheld(format!(
                "quotient condition undefined: a_i - α_i vanishes for branch {index}"
            )))
        }
        Err(e) => return Err(e),
    }
    let s = dimension_equation_root(&data.lengths(), alpha)?;
    Ok(DimReport::predicted(s, PredictedKind::Hausdorff))
}

/// Number of `δ × δ` mesh cells, `δ = 2^-j`, met by the sampled graph.
///
/// Cells tile `[0, 1] × [y_min, y_max]`. In each column the graph meets the
/// cells between the minimum and maximum of the samples falling in that
/// column (endpoints included, so neighbouring columns share a sample).
pub fn box_count(g: &GridFunction, j: u32) -> Result<u64> {
    let m = g.resolution();
    let cols = 1usize.checked_shl(j).filter(|&c| c <= m / 2).ok_or(Error::Scale { j, resolution: m })?;
    let v = g.values();
    let y_min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let inv_delta = cols as f64;
    let count = (0..cols)
        .into_par_iter()
        .map(|c| {
            let lo = (c * m).div_ceil(cols);
            let hi = ((c + 1) * m) / cols;
            let (cmin, cmax) = v[lo..=hi]
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
            let top = ((cmax - y_min) * inv_delta).floor() as u64;
            let bottom = ((cmin - y_min) * inv_delta).floor() as u64;
            top - bottom + 1
        })
        .sum();
    Ok(count)
}

/// Least-squares slope of `log2 N_δ` against `j` over `j_min..=j_max`.
pub fn estimate_box_dim(g: &GridFunction, j_min: u32, j_max: u32) -> Result<DimReport> {
    if j_max < j_min + 2 {
        return Err(Error::Regression(format!(
            "scale window [{j_min}, {j_max}] has fewer than 3 scales"
        )));
    }
    let scales: Vec<ScaleCount> = (j_min..=j_max)
        .map(|j| {
            Ok(ScaleCount { j, delta: (-(j as f64)).exp2(), count: box_count(g, j)? })
        })
        .collect::<Result<_>>()?;

    let n = scales.len() as f64;
    let xs: Vec<f64> = scales.iter().map(|s| s.j as f64).collect();
    let ys: Vec<f64> = scales.iter().map(|s| (s.count as f64).log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (my + slope * (x - mx))).powi(2))
        .sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };

    Ok(DimReport {
        estimated: Some(slope.clamp(1.0, 2.0)),
        raw_slope: Some(slope),
        slope_stderr: Some(stderr),
        r_squared: Some(r_squared),
        scales_used: scales,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{sample, Func};

    fn data(points: &[(f64, f64)]) -> DataSet {
        DataSet::new(points.to_vec()).unwrap()
    }

    #[test]
    fn collinear_examples() {
        assert!(collinear(&data(&[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]), 1e-12));
        assert!(!collinear(&data(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]), 1e-12));
        assert!(collinear(&data(&[(0.0, 0.0), (0.5, 0.5 + 1e-15), (1.0, 1.0)]), 1e-12));
    }

    #[test]
    fn dataset_validation() {
        assert!(DataSet::new(vec![(0.0, 0.0), (1.0, 1.0)]).is_err());
        assert!(DataSet::new(vec![(0.0, 0.0), (0.6, 1.0), (0.6, 0.0), (1.0, 0.0)]).is_err());
        assert!(DataSet::new(vec![(0.1, 0.0), (0.6, 1.0), (1.0, 0.0)]).is_err());
        assert!(DataSet::new(vec![(0.0, f64::NAN), (0.6, 1.0), (1.0, 0.0)]).is_err());
    }

    /// Independent bisection oracle written against the raw equation.
    fn oracle_root(lengths: &[f64], alpha: f64) -> f64 {
        let f = |d: f64| lengths.iter().map(|a| alpha * a.powf(d - 1.0)).sum::<f64>() - 1.0;
        let (mut a, mut b) = (1.0, 2.0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if f(c) > 0.0 {
                a = c
            } else {
                b = c
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn root_examples() {
        let d = dimension_equation_root(&[0.5, 0.5], &[0.75, 0.75]).unwrap();
        assert!((d - (1.0 + 1.5f64.log2())).abs() < 1e-12);
        assert!((d - 1.584_962_5).abs() < 1e-7);

        let a = 2f64.powf(-0.5);
        assert!((dimension_equation_root(&[0.5, 0.5], &[a, a]).unwrap() - 1.5).abs() < 1e-12);

        let d = dimension_equation_root(&[0.25, 0.75], &[0.9, 0.9]).unwrap();
        // frozen from the bisection oracle
        let frozen = oracle_root(&[0.25, 0.75], 0.9);
        assert!((d - frozen).abs() < 1e-12);
        assert!((dimension_function(&[0.25, 0.75], &[0.9, 0.9], d) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn root_preconditions() {
        assert!(matches!(
            dimension_equation_root(&[0.5, 0.5], &[0.3, 0.3]),
            Err(Error::Precondition(_))
        ));
        assert!(dimension_equation_root(&[0.5, 0.6], &[0.8, 0.8]).is_err());
        assert!(dimension_equation_root(&[0.5, 0.5], &[1.0, 0.8]).is_err());
        assert!(dimension_equation_root(&[1.0], &[0.8]).is_err());
    }

    #[test]
    fn box_prediction_examples() {
        let tent = data(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)]);
        let r = predict_box_dim(&tent, &[0.3, 0.3]).unwrap();
        assert_eq!(r.predicted, Some(1.0));
        assert_eq!(r.predicted_kind, Some(PredictedKind::DegenerateOne));

        let r = predict_box_dim(&tent, &[0.75, 0.75]).unwrap();
        assert!((r.predicted.unwrap() - 1.584_962_5).abs() < 1e-7);
        assert_eq!(r.predicted_kind, Some(PredictedKind::Box));

        let line = data(&[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        let r = predict_box_dim(&line, &[0.75, 0.75]).unwrap();
        assert_eq!(r.predicted, None);
        assert_eq!(r.diagnostics.len(), 1);

        assert!(predict_box_dim(&tent, &[1.0, 0.5]).is_err());
        assert!(predict_box_dim(&tent, &[0.5]).is_err());
    }

    #[test]
    fn hausdorff_condition_examples() {
        // parabola x(1-x) at k/4 with α = 1/2: quotients -3/4, -1/4, 1/4, 3/4
        let pts: Vec<(f64, f64)> = (0..=4).map(|k| {
            let x = k as f64 / 4.0;
            (x, x * (1.0 - x))
        }).collect();
        let parabola = data(&pts);
        let q = hausdorff_quotients(&parabola, &[0.5; 4], 1e-12).unwrap();
        for (qi, expected) in q.iter().zip([-0.75, -0.25, 0.25, 0.75]) {
            assert!((qi - expected).abs() < 1e-15);
        }
        assert!(hausdorff_condition(&parabola, &[0.5; 4], 1e-12).unwrap());

        let line: Vec<(f64, f64)> = (0..=4).map(|k| (k as f64 / 4.0, 2.0 * k as f64)).collect();
        assert!(!hausdorff_condition(&data(&line), &[0.5; 4], 1e-12).unwrap());

        let generic = data(&[(0.0, 0.0), (0.5, 1.0), (1.0, 0.3)]);
        // (1 - 0.6·0.3)/(0.5 - 0.6) = -8.2,  (-0.7 - 0.8·0.3)/(0.5 - 0.8) = 3.1333…
        let q = hausdorff_quotients(&generic, &[0.6, 0.8], 1e-12).unwrap();
        assert!((q[0] + 8.2).abs() < 1e-12 && (q[1] - 0.94 / 0.3).abs() < 1e-12);
        assert!(hausdorff_condition(&generic, &[0.6, 0.8], 1e-12).unwrap());

        assert!(matches!(
            hausdorff_condition(&generic, &[0.5, 0.8], 1e-12),
            Err(Error::DegenerateDenominator { index: 0 })
        ));
    }

    #[test]
    fn hausdorff_prediction_examples() {
        let pts: Vec<(f64, f64)> = (0..=4).map(|k| {
            let x = k as f64 / 4.0;
            (x, x * x)
        }).collect();
        let r = predict_hausdorff_dim(&data(&pts), &[0.5; 4]).unwrap();
        assert!((r.predicted.unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(r.predicted_kind, Some(PredictedKind::Hausdorff));

        let r = predict_hausdorff_dim(&data(&pts), &[0.225; 4]).unwrap();
        assert!(r.predicted.is_none() && !r.diagnostics.is_empty());

        let line: Vec<(f64, f64)> = (0..=4).map(|k| (k as f64 / 4.0, k as f64)).collect();
        let r = predict_hausdorff_dim(&data(&line), &[0.5; 4]).unwrap();
        assert!(r.predicted.is_none() && !r.diagnostics.is_empty());
    }

    #[test]
    fn box_count_examples() {
        let m = 1 << 12;
        let constant = sample(&Func::polynomial(vec![3.0]).unwrap(), m);
        for j in 0..=11 {
            assert_eq!(box_count(&constant, j).unwrap(), 1u64 << j);
        }
        let identity = sample(&Func::polynomial(vec![0.0, 1.0]).unwrap(), m);
        for j in 1..=11 {
            let c = box_count(&identity, j).unwrap();
            assert!(c >= 1 << j && c <= 2 << j, "j={j} count={c}");
        }
        assert!(matches!(box_count(&identity, 12), Err(Error::Scale { .. })));
    }

    #[test]
    fn smooth_estimates() {
        let m = 1 << 16;
        let id = sample(&Func::polynomial(vec![0.0, 1.0]).unwrap(), m);
        let r = estimate_box_dim(&id, 3, 10).unwrap();
        assert!((r.raw_slope.unwrap() - 1.0).abs() <= 0.05);
        let c = sample(&Func::polynomial(vec![-2.0]).unwrap(), m);
        let r = estimate_box_dim(&c, 3, 10).unwrap();
        assert!((r.raw_slope.unwrap() - 1.0).abs() <= 0.01);
        assert_eq!(r.scales_used.len(), 8);
        assert!(estimate_box_dim(&c, 3, 4).is_err());
        assert!(matches!(estimate_box_dim(&c, 10, 16), Err(Error::Scale { .. })));

        let mut buf = Vec::new();
        r.write_scales_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("j,delta,count\n3,"));
    }
}
