//! Fractal interpolation functions and α-fractal functions.
//!
//! A [`FifSpec`] fixes a partition `0 = x_0 < … < x_N = 1`, interpolation
//! ordinates `y_i`, a scale vector `α` with `|α_i| < 1` and one of two
//! families of vertical maps:
//!
//! * affine: `F_i(x, y) = c_i x + d_i + α_i y`, with `c_i, d_i` fixed by the
//!   interpolation conditions `F_i(0, y_0) = y_(i-1)` and `F_i(1, y_N) = y_i`;
//! * α-fractal: `F_i(x, y) = α_i y + f(L_i(x)) - α_i b(x)` for a seed `f`
//!   and a base `b` agreeing with `f` at both ends of `[0, 1]`.
//!
//! With `L_i(x) = a_i x + x_(i-1)` the graph of the interpolant is the
//! attractor of `w_i(x, y) = (L_i(x), F_i(x, y))`. The function itself is the
//! fixed point of the Read–Bajraktarević operator
//!
//! ```text
//! (T g)(x) = F_i(L_i⁻¹(x), g(L_i⁻¹(x))),   x ∈ [x_(i-1), x_i],
//! ```
//!
//! which is computed here on a uniform grid with linear interpolation at
//! pre-images that fall between grid nodes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::func::{grid_point, sample, Evaluate, Func, GridFunction, Partition, PiecewiseLinear};
use crate::{Error, Result};

/// Default fixed-point resolution.
pub const DEFAULT_RESOLUTION: usize = 1 << 16;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Iterates discarded by [`chaos_game`] before recording points.
pub const CHAOS_BURN_IN: usize = 100;

/// Tolerance for the α-fractal endpoint conditions `b(0) = f(0)`, `b(1) = f(1)`.
const BASE_ENDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Branch {
    Affine { c: Vec<f64>, d: Vec<f64> },
    AlphaFractal { seed: Func, base: Func },
}

/// One iterated function system whose attractor is the graph of a
/// continuous interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct FifSpec {
    partition: Partition,
    ys: Vec<f64>,
    alpha: Vec<f64>,
    branch: Branch,
}

fn check_alpha(partition: &Partition, alpha: &[f64]) -> Result<()> {
    if alpha.len() != partition.intervals() {
        return Err(Error::InvalidArgument(format!(
            "{} scale factors for {} subintervals",
            alpha.len(),
            partition.intervals()
        )));
    }
    for (index, &value) in alpha.iter().enumerate() {
        if !(value.abs() < 1.0) {
            return Err(Error::NonContractive { index, value });
        }
    }
    Ok(())
}

/// Coefficients `(c, d)` of the affine maps `F_i(x, y) = c_i x + d_i + α_i y`
/// on `[0, 1]`: `d_i = y_(i-1) - α_i y_0`, `c_i = y_i - y_(i-1) - α_i (y_N - y_0)`.
pub fn affine_branch_coeffs(
    partition: &Partition,
    ys: &[f64],
    alpha: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    if ys.len() != partition.knots().len() {
        return Err(Error::InvalidArgument(format!(
            "{} ordinates for {} knots",
            ys.len(),
            partition.knots().len()
        )));
    }
    check_alpha(partition, alpha)?;
    let (y0, yn) = (ys[0], ys[ys.len() - 1]);
    let d: Vec<f64> = alpha.iter().zip(ys).map(|(a, &y)| y - a * y0).collect();
    let c: Vec<f64> = alpha
        .iter()
        .zip(ys.windows(2))
        .map(|(a, w)| w[1] - w[0] - a * (yn - y0))
        .collect();
    Ok((c, d))
}

/// Slopes `a_i = x_i - x_(i-1)` and offsets `x_(i-1)` of `L_i(x) = a_i x + x_(i-1)`.
pub fn affine_map_params(partition: &Partition) -> (Vec<f64>, Vec<f64>) {
    let k = partition.knots();
    (partition.lengths(), k[..k.len() - 1].to_vec())
}

impl FifSpec {
    pub fn affine(partition: Partition, ys: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidArgument("ordinates must be finite".into()));
        }
        let (c, d) = affine_branch_coeffs(&partition, &ys, &alpha)?;
        Ok(FifSpec { partition, ys, alpha, branch: Branch::Affine { c, d } })
    }

    /// α-fractal function of `seed` with base `base`; the ordinates are the
    /// seed's values at the knots.
    pub fn alpha_fractal(partition: Partition, alpha: Vec<f64>, seed: Func, base: Func) -> Result<Self> {
        check_alpha(&partition, &alpha)?;
        for x in [0.0, 1.0] {
            let gap = (seed.value(x) - base.value(x)).abs();
            if !(gap <= BASE_ENDPOINT_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "base differs from seed by {gap:e} at x = {x}"
                )));
            }
        }
        let ys: Vec<f64> = partition.knots().iter().map(|&x| seed.value(x)).collect();
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(Error::InvalidArgument("seed is not finite at the knots".into()));
        }
        Ok(FifSpec { partition, ys, alpha, branch: Branch::AlphaFractal { seed, base } })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn branch(&self) -> &Branch {
        &self.branch
    }

    /// `max_i |α_i|`, the contraction factor of the operator.
    pub fn contraction(&self) -> f64 {
        self.alpha.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    /// Interpolation points `(x_i, y_i)`.
    pub fn data(&self) -> Vec<(f64, f64)> {
        self.partition.knots().iter().copied().zip(self.ys.iter().copied()).collect()
    }

    /// Linear interpolant of the knot data.
    pub fn knot_interpolant(&self) -> PiecewiseLinear {
        PiecewiseLinear::new(self.partition.clone(), self.ys.clone())
            .expect("ordinates match knots by construction")
    }

    /// The IFS map `w_i(x, y)`.
    pub fn map(&self, i: usize, x: f64, y: f64) -> (f64, f64) {
        let k = self.partition.knots();
        let lx = (k[i + 1] - k[i]) * x + k[i];
        let fy = match &self.branch {
            Branch::Affine { c, d } => c[i] * x + d[i] + self.alpha[i] * y,
            Branch::AlphaFractal { seed, base } => {
                self.alpha[i] * y + seed.value(lx) - self.alpha[i] * base.value(x)
            }
        };
        (lx, fy)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("specs always serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BranchKind {
    Affine,
    AlphaFractal,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FifSpecDesc {
    knots: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ys: Option<Vec<f64>>,
    alpha: Vec<f64>,
    branch: BranchKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<Func>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<Func>,
}

impl Serialize for FifSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let desc = match &self.branch {
            Branch::Affine { .. } => FifSpecDesc {
                knots: self.partition.knots().to_vec(),
                ys: Some(self.ys.clone()),
                alpha: self.alpha.clone(),
                branch: BranchKind::Affine,
                seed: None,
                base: None,
            },
            Branch::AlphaFractal { seed, base } => FifSpecDesc {
                knots: self.partition.knots().to_vec(),
                ys: None,
                alpha: self.alpha.clone(),
                branch: BranchKind::AlphaFractal,
                seed: Some(seed.clone()),
                base: Some(base.clone()),
            },
        };
        desc.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FifSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let desc = FifSpecDesc::deserialize(d)?;
        let partition = Partition::new(desc.knots).map_err(D::Error::custom)?;
        let spec = match desc.branch {
            BranchKind::Affine => {
                let ys = desc.ys.ok_or_else(|| D::Error::missing_field("ys"))?;
                FifSpec::affine(partition, ys, desc.alpha)
            }
            BranchKind::AlphaFractal => {
                let seed = desc.seed.ok_or_else(|| D::Error::missing_field("seed"))?;
                let base = desc.base.ok_or_else(|| D::Error::missing_field("base"))?;
                FifSpec::alpha_fractal(partition, desc.alpha, seed, base)
            }
        };
        spec.map_err(D::Error::custom)
    }
}

/// The Read–Bajraktarević operator of a spec, discretised on the uniform
/// grid with `m` intervals.
///
/// Each output node `j` reads the previous iterate at the pre-image
/// `u = L_i⁻¹(j/m)` and computes `offset_j + α_i g(u)`.
#[derive(Debug, Clone)]
pub struct RbOperator {
    resolution: usize,
    source: Vec<usize>,
    weight: Vec<f64>,
    scale: Vec<f64>,
    offset: Vec<f64>,
}

impl RbOperator {
    pub fn new(spec: &FifSpec, m: usize) -> Result<Self> {
        if m < spec.partition.intervals() {
            return Err(Error::InvalidArgument(format!(
                "resolution {m} is coarser than the partition"
            )));
        }
        let knots = spec.partition.knots();
        let rows: Vec<(usize, f64, f64, f64)> = (0..=m)
            .into_par_iter()
            .map(|j| {
                let x = grid_point(j, m);
                let i = spec.partition.interval_of(x);
                let (lo, hi) = (knots[i], knots[i + 1]);
                let u = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
                let pos = u * m as f64;
                let mut k = pos.floor() as usize;
                let mut w = pos - k as f64;
                if k >= m {
                    k = m;
                    w = 0.0;
                }
                let offset = match &spec.branch {
                    Branch::Affine { c, d } => c[i] * u + d[i],
                    Branch::AlphaFractal { seed, base } => {
                        seed.value(x) - spec.alpha[i] * base.value(u)
                    }
                };
                (k, w, spec.alpha[i], offset)
            })
            .collect();
        let mut op = RbOperator {
            resolution: m,
            source: Vec::with_capacity(m + 1),
            weight: Vec::with_capacity(m + 1),
            scale: Vec::with_capacity(m + 1),
            offset: Vec::with_capacity(m + 1),
        };
        for (k, w, a, off) in rows {
            op.source.push(k);
            op.weight.push(w);
            op.scale.push(a);
            op.offset.push(off);
        }
        Ok(op)
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn apply(&self, g: &GridFunction) -> GridFunction {
        assert_eq!(g.resolution(), self.resolution, "grid resolution mismatch");
        let v = g.values();
        let out: Vec<f64> = (0..=self.resolution)
            .into_par_iter()
            .map(|j| {
                let (k, w) = (self.source[j], self.weight[j]);
                let gu = if w == 0.0 { v[k] } else { (1.0 - w) * v[k] + w * v[k + 1] };
                self.offset[j] + self.scale[j] * gu
            })
            .collect();
        GridFunction::from_values_unchecked(out)
    }

    /// `max_j |g - T g|`.
    pub fn residual(&self, g: &GridFunction) -> f64 {
        g.sup_distance(&self.apply(g))
    }
}

/// One application of the Read–Bajraktarević operator to `g`.
pub fn rb_apply(spec: &FifSpec, g: &GridFunction) -> Result<GridFunction> {
    Ok(RbOperator::new(spec, g.resolution())?.apply(g))
}

/// `sup_j |g - T g|` over the grid of `g`.
pub fn self_ref_residual(spec: &FifSpec, g: &GridFunction) -> Result<f64> {
    Ok(RbOperator::new(spec, g.resolution())?.residual(g))
}

/// A solved fractal interpolation function.
#[derive(Debug, Clone)]
pub struct FifFunction {
    spec: FifSpec,
    grid: GridFunction,
    residual: f64,
    iterations: usize,
}

impl FifFunction {
    pub fn spec(&self) -> &FifSpec {
        &self.spec
    }

    pub fn grid(&self) -> &GridFunction {
        &self.grid
    }

    /// Achieved `sup |g - T g|`.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// The solution as a grid-backed [`Func`].
    pub fn to_func(&self) -> Func {
        Func::grid(self.grid.clone())
    }
}

impl Evaluate for FifFunction {
    fn value(&self, x: f64) -> f64 {
        self.grid.value(x)
    }
}

/// Iterates the operator from the knot interpolant until the self-referential
/// residual is at most `tol`.
///
/// With `s = max |α_i|` the loop stops once successive iterates are within
/// `tol (1 - s) / s`; the contraction estimate `‖g - Tg‖ ≤ s ‖g_prev - g‖`
/// then bounds the residual by `tol`. At most
/// `⌈log(tol (1 - s) / R_0) / log s⌉ + 8` iterations are attempted, where
/// `R_0` is the residual of the initial iterate.
pub fn solve_fixed_point(spec: &FifSpec, m: usize, tol: f64) -> Result<FifFunction> {
    solve_with_cap(spec, m, tol, None)
}

fn solve_with_cap(
    spec: &FifSpec,
    m: usize,
    tol: f64,
    cap_override: Option<usize>,
) -> Result<FifFunction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let op = RbOperator::new(spec, m)?;
    let s = spec.contraction();
    let mut current = sample(&spec.knot_interpolant(), m);
    let mut next = op.apply(&current);
    let r0 = current.sup_distance(&next);
    let mut iterations = 1;

    if s > 0.0 && r0 > 0.0 {
        let threshold = tol * (1.0 - s) / s;
        let cap = cap_override.unwrap_or_else(|| {
            ((tol * (1.0 - s) / r0).ln() / s.ln()).ceil().max(0.0) as usize + 8
        });
        let mut step = r0;
        while step > threshold {
            if iterations >= cap {
                return Err(Error::Convergence { iterations, residual: step * s });
            }
            current = next;
            next = op.apply(&current);
            step = current.sup_distance(&next);
            iterations += 1;
        }
    }

    let residual = op.residual(&next);
    if !(residual <= tol) {
        return Err(Error::Convergence { iterations, residual });
    }
    Ok(FifFunction { spec: spec.clone(), grid: next, residual, iterations })
}

/// Random iteration of the IFS maps starting from `(x_0, y_0)`.
///
/// Maps are chosen uniformly with a ChaCha8 generator seeded through
/// `seed_from_u64(seed)`; the first [`CHAOS_BURN_IN`] iterates are dropped.
/// α-fractal specs are accepted only when seed and base evaluate in closed
/// form.
pub fn chaos_game(spec: &FifSpec, n_points: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n_points == 0 {
        return Err(Error::InvalidArgument("chaos game needs at least one point".into()));
    }
    if let Branch::AlphaFractal { seed: f, base } = &spec.branch {
        if !(f.is_closed_form() && base.is_closed_form()) {
            return Err(Error::Unsupported(
                "chaos game on an α-fractal needs closed-form seed and base".into(),
            ));
        }
    }
    let n_maps = spec.partition.intervals();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut x, mut y) = (0.0, spec.ys[0]);
    let mut points = Vec::with_capacity(n_points);
    for step in 0..CHAOS_BURN_IN + n_points {
        let i = rng.gen_range(0..n_maps);
        (x, y) = spec.map(i, x, y);
        if step >= CHAOS_BURN_IN {
            points.push((x, y));
        }
    }
    Ok(points)
}

/// Writes points as `x,y` rows with 17 significant digits.
pub fn write_points_csv<W: Write>(points: &[(f64, f64)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "x,y")?;
    for (x, y) in points {
        writeln!(w, "{x:.16e},{y:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent(alpha: f64) -> FifSpec {
        FifSpec::affine(Partition::uniform(2).unwrap(), vec![0.0, 1.0, 0.0], vec![alpha; 2]).unwrap()
    }

    #[test]
    fn coeff_examples() {
        let p = Partition::uniform(4).unwrap();
        let (c, d) = affine_branch_coeffs(&p, &[0.0; 5], &[0.3, -0.2, 0.9, 0.1]).unwrap();
        assert!(c.iter().chain(&d).all(|&v| v == 0.0));

        let ys = [1.0, 3.0, -2.0, 0.5, 4.0];
        let (c, d) = affine_branch_coeffs(&p, &ys, &[0.0; 4]).unwrap();
        for i in 0..4 {
            assert_eq!(c[i], ys[i + 1] - ys[i]);
            assert_eq!(d[i], ys[i]);
        }

        let (c, d) =
            affine_branch_coeffs(&Partition::uniform(2).unwrap(), &[0.0, 1.0, 0.0], &[0.8, 0.8]).unwrap();
        assert_eq!((c[0], d[0], c[1], d[1]), (1.0, 0.0, -1.0, 1.0));

        assert!(affine_branch_coeffs(&p, &ys[..4], &[0.0; 4]).is_err());
        assert!(matches!(
            affine_branch_coeffs(&p, &ys, &[0.0, 1.0, 0.0, 0.0]),
            Err(Error::NonContractive { index: 1, .. })
        ));
    }

    #[test]
    fn interpolation_conditions_hold() {
        let p = Partition::new(vec![0.0, 0.2, 0.45, 1.0]).unwrap();
        let ys = [0.3, -1.2, 2.5, 0.7];
        let alpha = [0.4, -0.7, 0.65];
        let spec = FifSpec::affine(p, ys.to_vec(), alpha.to_vec()).unwrap();
        for i in 0..3 {
            let (x0, y0) = spec.map(i, 0.0, ys[0]);
            let (x1, y1) = spec.map(i, 1.0, ys[3]);
            assert_eq!(x0, spec.partition().knots()[i]);
            assert!((x1 - spec.partition().knots()[i + 1]).abs() < 1e-15);
            assert!((y0 - ys[i]).abs() < 1e-12);
            assert!((y1 - ys[i + 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn map_param_examples() {
        let (s, o) = affine_map_params(&Partition::uniform(2).unwrap());
        assert_eq!((s, o), (vec![0.5, 0.5], vec![0.0, 0.5]));
        let p = Partition::new(vec![0.0, 0.25, 1.0]).unwrap();
        let (s, o) = affine_map_params(&p);
        assert_eq!((s.clone(), o.clone()), (vec![0.25, 0.75], vec![0.0, 0.25]));
        for i in 0..2 {
            assert_eq!(s[i] * 1.0 + o[i], p.knots()[i + 1]);
        }
    }

    #[test]
    fn zero_alpha_gives_linear_interpolant() {
        let spec = tent(0.0);
        let noise = sample(&Func::weierstrass(0.5, 3.0, 6).unwrap(), 64);
        let out = rb_apply(&spec, &noise).unwrap();
        let pl = sample(&spec.knot_interpolant(), 64);
        assert!(out.sup_distance(&pl) < 1e-15);
        let f = solve_fixed_point(&spec, 64, 1e-10).unwrap();
        assert_eq!(f.iterations(), 1);
        assert_eq!(f.residual(), 0.0);
        assert_eq!(self_ref_residual(&spec, &pl).unwrap(), 0.0);
    }

    #[test]
    fn alpha_fractal_algebraic_fixed_points() {
        let seed = Func::polynomial(vec![0.0, 0.0, 1.0]).unwrap();
        let base = Func::polynomial(vec![0.0, 1.0]).unwrap();
        let p = Partition::uniform(3).unwrap();
        let spec = FifSpec::alpha_fractal(p.clone(), vec![0.5, -0.4, 0.3], seed.clone(), base.clone()).unwrap();
        let m = 300;
        // g = b  =>  T g = f
        let out = rb_apply(&spec, &sample(&base, m)).unwrap();
        assert!(out.sup_distance(&sample(&seed, m)) < 1e-15);
        // b = f  =>  f is fixed
        let degenerate = FifSpec::alpha_fractal(p, vec![0.5, 0.5, 0.5], seed.clone(), seed.clone()).unwrap();
        let fixed = rb_apply(&degenerate, &sample(&seed, m)).unwrap();
        assert!(fixed.sup_distance(&sample(&seed, m)) < 1e-15);
        assert!(FifSpec::alpha_fractal(Partition::uniform(2).unwrap(), vec![0.5; 2], seed, Func::polynomial(vec![1.0]).unwrap()).is_err());
    }

    #[test]
    fn tent_fixed_point_values() {
        let spec = tent(0.5);
        let m = 1 << 12;
        let f = solve_fixed_point(&spec, m, 1e-10).unwrap();
        let g = f.grid().values();
        assert!(f.residual() <= 1e-10);
        assert!((g[m / 2] - 1.0).abs() < 1e-12);
        // f(1/4) = F_1(1/2, f(1/2)) = c_1/2 + d_1 + α_1 f(1/2)
        let (c, d) = match spec.branch() {
            Branch::Affine { c, d } => (c.clone(), d.clone()),
            _ => unreachable!(),
        };
        let expected = c[0] * 0.5 + d[0] + 0.5 * 1.0;
        assert!((g[m / 4] - expected).abs() < 1e-9);

        // oracle: iterate the self-referential equation by hand on dyadic points starting from zero
        let mut vals = std::collections::BTreeMap::<u32, f64>::new();
        let pts: Vec<u32> = (0..=16).collect(); // x = k/16
        for &k in &pts {
            vals.insert(k, 0.0);
        }
        for _ in 0..40 {
            let prev = vals.clone();
            for &k in &pts {
                let (i, u2) = if k <= 8 { (0, 2 * k) } else { (1, 2 * k - 16) };
                let u = u2 as f64 / 16.0;
                vals.insert(k, c[i] * u + d[i] + 0.5 * prev[&u2]);
            }
        }
        for &k in &pts {
            assert!((vals[&k] - g[k as usize * m / 16]).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn residual_of_zero_function() {
        let spec = tent(0.5);
        let m = 64;
        let zero = GridFunction::new(vec![0.0; m + 1]).unwrap();
        // T(0) = c_i u + d_i is the knot interpolant of (0,0),(1/2,1),(1,0)
        let t0 = sample(&spec.knot_interpolant(), m);
        let expected = t0.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert_eq!(self_ref_residual(&spec, &zero).unwrap(), expected);
        assert_eq!(expected, 1.0);
    }

    #[test]
    fn convergence_failure_reports_residual() {
        // dyadic knots make the grid operator exact after log2(m) steps; avoid them
        let p = Partition::new(vec![0.0, 0.3, 1.0]).unwrap();
        let spec = FifSpec::affine(p, vec![0.0, 1.0, 0.0], vec![0.99, 0.99]).unwrap();
        match solve_with_cap(&spec, 256, 1e-10, Some(3)) {
            Err(Error::Convergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
        assert!(solve_fixed_point(&spec, 256, 0.0).is_err());
    }

    #[test]
    fn chaos_game_examples() {
        let pts = chaos_game(&tent(0.0), 2000, 7).unwrap();
        assert_eq!(pts.len(), 2000);
        for (x, y) in &pts {
            let t = if *x <= 0.5 { 2.0 * x } else { 2.0 - 2.0 * x };
            assert!((y - t).abs() < 1e-9);
        }
        let spec = tent(0.6);
        assert_eq!(chaos_game(&spec, 500, 42).unwrap(), chaos_game(&spec, 500, 42).unwrap());
        assert_ne!(chaos_game(&spec, 500, 42).unwrap(), chaos_game(&spec, 500, 43).unwrap());
        assert!(chaos_game(&spec, 0, 1).is_err());

        let grid = Func::grid(GridFunction::new(vec![0.0, 1.0, 0.0]).unwrap());
        let alpha = FifSpec::alpha_fractal(Partition::uniform(2).unwrap(), vec![0.5; 2], grid.clone(), grid).unwrap();
        assert!(matches!(chaos_game(&alpha, 10, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn json_shapes() {
        let spec = FifSpec::from_json(r#"{"knots":[0,0.5,1],"ys":[0,1,0],"alpha":[0.7,0.7],"branch":"affine"}"#).unwrap();
        assert_eq!(spec, tent(0.7));
        assert_eq!(FifSpec::from_json(&spec.to_json()).unwrap(), spec);

        let af = FifSpec::from_json(
            r#"{"knots":[0,0.5,1],"alpha":[0.5,0.5],"branch":"alpha_fractal",
                "seed":{"kind":"polynomial","coeffs":[0,0,1]},"base":{"kind":"polynomial","coeffs":[0,1]}}"#,
        )
        .unwrap();
        assert_eq!(af.ys(), &[0.0, 0.25, 1.0]);
        assert_eq!(FifSpec::from_json(&af.to_json()).unwrap(), af);

        assert!(FifSpec::from_json(r#"{"knots":[0,0.5,1],"ys":[0,1,0],"alpha":[1.2,0.7],"branch":"affine"}"#).is_err());
        let missing = FifSpec::from_json(r#"{"knots":[0,1],"alpha":[0.5],"branch":"affine"}"#).unwrap_err();
        assert!(missing.to_string().contains("ys"));
    }
}
