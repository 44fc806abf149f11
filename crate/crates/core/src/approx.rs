//! Constructive approximation with a prescribed graph dimension.
//!
//! Every pipeline injects roughness through an *anchor*: a concrete
//! function whose graph dimension `β` is known in closed form. The default
//! anchor is the affine fractal interpolant of `(0, 0), (½, 1), (1, 0)` with
//! both scale factors equal to `2^(β-2)`, whose box dimension is exactly
//! `2 + log2(2^(β-2)) = β` and which vanishes at both ends of `[0, 1]`.
//! Adding a Lipschitz function to a graph, or moving it by an affine
//! similarity, leaves its dimension unchanged, which is what makes the
//! constructions below dimension preserving.

use serde::Serialize;

use crate::bernstein::{modulus_smoothness, BernsteinPoly, MODULUS_GRID_T, MODULUS_GRID_X, SUP_GRID};
use crate::dimension::{
    collinear, estimate_box_dim, hausdorff_condition, predict_box_dim, predict_hausdorff_dim,
    DataSet, DimReport, COLLINEAR_TOL,
};
use crate::fif::{solve_fixed_point, FifFunction, FifSpec, DEFAULT_RESOLUTION, DEFAULT_TOL};
use crate::func::{lipschitz_estimate, sample, sup_norm_diff, Evaluate, Func, Partition, Piece};
use crate::{Error, Result};

/// Resolution of grid-backed anchors.
pub const DEFAULT_ANCHOR_RESOLUTION: usize = 1 << 20;
/// Grid on which primitive positivity is checked.
pub const POSITIVITY_GRID: usize = 1 << 14;
/// Largest admissible grid Lipschitz constant in [`lipschitz_invariance_check`].
pub const LIPSCHITZ_CAP: f64 = 1e3;

/// Agreement required between an anchor's predicted dimension and `β`.
const ANCHOR_DIM_TOL: f64 = 1e-10;
/// Threshold for the increment test of the Hausdorff pipeline.
const INCREMENT_TOL: f64 = 1e-9;
/// Largest `k` accepted by [`dense_approximant`] (`2^k + 1` knots).
const MAX_DENSE_LEVEL: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    /// Fixed-point resolution for fractal functions built by the pipelines.
    pub resolution: usize,
    pub tol: f64,
    pub anchor_resolution: usize,
    /// Box pipeline only: instead of failing on a collinear Bernstein triple,
    /// add `(4/n)·x(1-x)` to the seed. The bump vanishes at both ends and
    /// lifts the midpoint by `1/n`, so the sequence still converges to `f`.
    pub perturb_collinear: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            resolution: DEFAULT_RESOLUTION,
            tol: DEFAULT_TOL,
            anchor_resolution: DEFAULT_ANCHOR_RESOLUTION,
            perturb_collinear: false,
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 1.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "β = {beta} must lie strictly inside (1, 2); β = 2 would need |α| = 1 and β = 1 is \
             plain polynomial approximation"
        )))
    }
}

/// A function with a known predicted graph dimension.
#[derive(Debug, Clone)]
pub struct Anchor {
    func: Func,
    predicted: Option<f64>,
}

impl Anchor {
    /// Affine interpolant of `(0,0), (½,1), (1,0)` with `α_1 = α_2 = 2^(β-2)`.
    pub fn default_for(beta: f64, m: usize) -> Result<Anchor> {
        check_beta(beta)?;
        let a = (beta - 2.0).exp2();
        let spec = FifSpec::affine(Partition::uniform(2)?, vec![0.0, 1.0, 0.0], vec![a, a])?;
        Anchor::from_affine_fif(&spec, m)
    }

    /// Solves `spec` on an `m` grid; the predicted dimension comes from the
    /// closed-form box-dimension formula (none for degenerate data).
    pub fn from_affine_fif(spec: &FifSpec, m: usize) -> Result<Anchor> {
        let report = predict_box_dim(&DataSet::new(spec.data())?, spec.alpha())?;
        let fif = solve_fixed_point(spec, m, DEFAULT_TOL)?;
        Ok(Anchor { func: fif.to_func(), predicted: report.predicted })
    }

    /// Wraps a function whose dimension the caller vouches for.
    pub fn with_dimension(func: Func, predicted: Option<f64>) -> Anchor {
        Anchor { func, predicted }
    }

    pub fn func(&self) -> &Func {
        &self.func
    }

    pub fn predicted(&self) -> Option<f64> {
        self.predicted
    }

    /// The anchor plus a constant; the dimension is unchanged.
    pub fn shifted(&self, c: f64) -> Anchor {
        Anchor { func: Func::shifted(c, self.func.clone()), predicted: self.predicted }
    }

    fn require_dimension(&self, beta: f64) -> Result<()> {
        match self.predicted {
            Some(d) if (d - beta).abs() <= ANCHOR_DIM_TOL => Ok(()),
            Some(d) => Err(Error::Config(format!(
                "anchor has predicted dimension {d}, expected β = {beta}"
            ))),
            None => Err(Error::Config(format!(
                "anchor has no predicted dimension, expected β = {beta}"
            ))),
        }
    }
}

/// Validated parameters of the derivative pipeline.
#[derive(Debug, Clone)]
pub struct ApproxConfig {
    pub beta: f64,
    pub n: usize,
    pub nonneg: bool,
    pub anchor: Anchor,
}

impl ApproxConfig {
    pub fn new(beta: f64, n: usize, nonneg: bool, anchor_resolution: usize) -> Result<Self> {
        let anchor = Anchor::default_for(beta, anchor_resolution)?;
        ApproxConfig::with_anchor(beta, n, nonneg, anchor)
    }

    pub fn with_anchor(beta: f64, n: usize, nonneg: bool, anchor: Anchor) -> Result<Self> {
        check_beta(beta)?;
        if n == 0 {
            return Err(Error::InvalidArgument("sequence index n must be >= 1".into()));
        }
        anchor.require_dimension(beta)?;
        Ok(ApproxConfig { beta, n, nonneg, anchor })
    }
}

/// The numerical form of `‖f - p^α‖ ≤ ‖f - p‖ + |α|/(1-|α|) ‖p - B_n p‖`
/// on the default sup grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorChain {
    /// `‖f - p_n^α‖`.
    pub sup_err: f64,
    /// `‖f - p_n‖` (`p_n` including any collinearity bump).
    pub bernstein_err: f64,
    /// `‖p_n - B_n(p_n)‖`.
    pub base_gap: f64,
    /// `‖p_n - p_n^α‖`.
    pub perturbation: f64,
    /// `bernstein_err + |α|/(1-|α|) · base_gap`.
    pub bound: f64,
    /// `tol / (1 - |α|)`: room for the fixed-point tolerance.
    pub solver_slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct BoxApproximation {
    pub fif: FifFunction,
    pub alpha: f64,
    /// Whether the collinearity bump was added to the seed.
    pub perturbed: bool,
    pub report: DimReport,
    pub chain: ErrorChain,
    /// `ω_φ(f; 1/√n)`.
    pub modulus_f: f64,
    /// `ω_φ(p_n; 1/√n)`.
    pub modulus_pn: f64,
}

/// `n`-th member of a sequence of α-fractal functions with box dimension
/// `β` converging uniformly to `f`.
///
/// Uses `Δ = (0, ½, 1)`, `α_1 = α_2 = 2^(β-2)`, seed `p_n = B_n(f)` and base
/// `B_n(p_n)`. Fails with [`Error::Collinear`] when `p_n` sampled at the
/// three knots is collinear, unless `opts.perturb_collinear` is set.
pub fn dim_preserving_sequence(
    f: &Func,
    beta: f64,
    n: usize,
    opts: &PipelineOptions,
) -> Result<BoxApproximation> {
    check_beta(beta)?;
    let alpha = (beta - 2.0).exp2();
    let partition = Partition::uniform(2)?;
    let p_n = Func::Bernstein(BernsteinPoly::build(f, n)?.into());
    let triple = |g: &Func| -> Result<DataSet> {
        DataSet::new(partition.knots().iter().map(|&x| (x, g.value(x))).collect())
    };

    let mut seed = p_n;
    let mut data = triple(&seed)?;
    let mut perturbed = false;
    if collinear(&data, COLLINEAR_TOL) {
        if !opts.perturb_collinear {
            return Err(Error::Collinear(format!(
                "B_{n}(f) at 0, 1/2, 1 is collinear; enable the collinearity perturbation \
                 or use the Hausdorff pipeline"
            )));
        }
        let c = 4.0 / n as f64;
        seed = Func::sum(seed, Func::polynomial(vec![0.0, c, -c])?);
        data = triple(&seed)?;
        perturbed = true;
    }
    let report = predict_box_dim(&data, &[alpha, alpha])?;

    let base = Func::Bernstein(BernsteinPoly::build(&seed, n)?.into());
    let spec = FifSpec::alpha_fractal(partition, vec![alpha, alpha], seed.clone(), base.clone())?;
    let fif = solve_fixed_point(&spec, opts.resolution, opts.tol)?;

    let sup_err = sup_norm_diff(f, &fif, SUP_GRID);
    let bernstein_err = sup_norm_diff(f, &seed, SUP_GRID);
    let base_gap = sup_norm_diff(&seed, &base, SUP_GRID);
    let perturbation = sup_norm_diff(&seed, &fif, SUP_GRID);
    let bound = bernstein_err + alpha / (1.0 - alpha) * base_gap;
    let solver_slack = opts.tol / (1.0 - alpha);
    let chain = ErrorChain {
        sup_err,
        bernstein_err,
        base_gap,
        perturbation,
        bound,
        solver_slack,
        holds: sup_err <= bound + solver_slack,
    };

    let delta = 1.0 / (n as f64).sqrt();
    let modulus_f = modulus_smoothness(f, delta, MODULUS_GRID_T, MODULUS_GRID_X);
    let modulus_pn = modulus_smoothness(&seed, delta, MODULUS_GRID_T, MODULUS_GRID_X);

    Ok(BoxApproximation { fif, alpha, perturbed, report, chain, modulus_f, modulus_pn })
}

#[derive(Debug, Clone)]
pub struct HausdorffApproximation {
    pub spec: FifSpec,
    pub alpha: f64,
    pub alpha_sum: f64,
    /// Whether `y_0` was raised by `1/n`.
    pub perturbed: bool,
    pub report: DimReport,
}

/// `n`-th member of a sequence of affine fractal interpolants with
/// Hausdorff dimension `β` converging to `f`.
///
/// Interpolates `(k/n, f(k/n))` with `α_i = n^(β-2)`. When the first and
/// last increments of the data coincide, `y_0` is raised by `1/n`. The
/// quotient condition is then verified on the returned data.
pub fn hausdorff_preserving_sequence(f: &Func, beta: f64, n: usize) -> Result<HausdorffApproximation> {
    check_beta(beta)?;
    if n < 2 {
        return Err(Error::InvalidArgument("the Hausdorff pipeline needs n >= 2".into()));
    }
    let partition = Partition::uniform(n)?;
    let mut ys: Vec<f64> = partition.knots().iter().map(|&x| f.value(x)).collect();
    let first = ys[1] - ys[0];
    let last = ys[n] - ys[n - 1];
    let perturbed = (first - last).abs() <= INCREMENT_TOL;
    if perturbed {
        ys[0] += 1.0 / n as f64;
    }

    let alpha = (n as f64).powf(beta - 2.0);
    let alphas = vec![alpha; n];
    let data = DataSet::new(partition.knots().iter().copied().zip(ys.iter().copied()).collect())?;
    if !hausdorff_condition(&data, &alphas, COLLINEAR_TOL)? {
        return Err(Error::Condition(
            "all quotients coincide on the (perturbed) data; no dimension guarantee".into(),
        ));
    }
    let report = predict_hausdorff_dim(&data, &alphas)?;
    let spec = FifSpec::affine(partition, ys, alphas)?;
    Ok(HausdorffApproximation { spec, alpha, alpha_sum: alpha * n as f64, perturbed, report })
}

/// Linear interpolant of `f` on `2^k + 1` uniform knots.
fn lipschitz_surrogate(f: &Func, k: usize) -> Result<Func> {
    let knots = Partition::uniform(1 << k)?;
    let values = knots.knots().iter().map(|&x| f.value(x)).collect();
    Func::piecewise_linear(knots.knots().to_vec(), values)
}

/// `g_k + anchor / k`, with `g_k` the linear interpolant of `f` on
/// `2^k + 1` knots. The sum has the anchor's dimension and converges
/// uniformly to `f`.
pub fn dense_approximant(f: &Func, beta: f64, k: usize, anchor: &Anchor) -> Result<Func> {
    check_beta(beta)?;
    if k == 0 || k > MAX_DENSE_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "level k = {k} must lie in 1..={MAX_DENSE_LEVEL}"
        )));
    }
    anchor.require_dimension(beta)?;
    let g = lipschitz_surrogate(f, k)?;
    Ok(Func::sum(g, Func::scaled(1.0 / k as f64, anchor.func.clone())))
}

#[derive(Debug, Clone)]
pub struct DerivativeApproximation {
    /// `F_n = ∫_0^x g_n`.
    pub primitive: Func,
    /// `g_n`, the rough derivative of `F_n`.
    pub derivative: Func,
    /// Constant added to the anchor (nonzero only in the nonnegative variant).
    pub anchor_shift: f64,
    /// Minimum of `∫ f'` on the positivity grid, when nonnegativity was requested.
    pub target_min: Option<f64>,
    /// Minimum of `F_n` on the positivity grid.
    pub primitive_min: f64,
    /// Whether `F_n ≥ 0` on the positivity grid, when requested.
    pub nonneg_holds: Option<bool>,
}

/// `F_n = ∫ g_n` where `g_n = dense_approximant(f', β, n)`: a continuously
/// differentiable approximant of `f = ∫ f'` whose derivative has graph
/// dimension `β`.
///
/// With `config.nonneg` and a nonnegative target primitive the anchor is
/// first shifted to be nonnegative; positivity of `F_n` is checked and
/// reported, not enforced.
pub fn derivative_dim_approximant(fprime: &Func, config: &ApproxConfig) -> Result<DerivativeApproximation> {
    let mut anchor = config.anchor.clone();
    let mut anchor_shift = 0.0;
    let mut target_min = None;
    if config.nonneg {
        let target = Func::antiderivative(fprime.clone());
        let tmin = min_on_grid(&target, POSITIVITY_GRID);
        target_min = Some(tmin);
        if tmin >= 0.0 {
            let amin = min_on_grid(anchor.func(), POSITIVITY_GRID.max(grid_resolution(anchor.func())));
            if amin < 0.0 {
                anchor_shift = -amin;
                anchor = anchor.shifted(anchor_shift);
            }
        }
    }
    let derivative = dense_approximant(fprime, config.beta, config.n, &anchor)?;
    let primitive = Func::antiderivative(derivative.clone());
    let primitive_min = min_on_grid(&primitive, POSITIVITY_GRID);
    Ok(DerivativeApproximation {
        primitive,
        derivative,
        anchor_shift,
        target_min,
        primitive_min,
        nonneg_holds: config.nonneg.then_some(primitive_min >= 0.0),
    })
}

fn min_on_grid(f: &Func, m: usize) -> f64 {
    sample(f, m).values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn grid_resolution(f: &Func) -> usize {
    match f {
        Func::GridBacked(g) => g.resolution(),
        Func::Shifted(_, inner) | Func::Scaled(_, inner) => grid_resolution(inner),
        _ => 0,
    }
}

/// A closed subset `X = ∪ [a_i, b_i]` of `[0, 1]` and a function given on it.
#[derive(Debug, Clone)]
pub struct ExtensionDomain {
    intervals: Vec<(f64, f64)>,
    values: Func,
}

impl ExtensionDomain {
    /// `intervals` must be sorted, pairwise disjoint and inside `[0, 1]`.
    /// `values` is only ever evaluated on their union.
    pub fn new(intervals: Vec<(f64, f64)>, values: Func) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidArgument("the domain needs at least one interval".into()));
        }
        for &(a, b) in &intervals {
            if !(0.0 <= a && a <= b && b <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "[{a}, {b}] is not a closed subinterval of [0, 1]"
                )));
            }
        }
        if let Some(w) = intervals.windows(2).find(|w| w[1].0 < w[0].1) {
            return Err(Error::InvalidArgument(format!(
                "intervals [{}, {}] and [{}, {}] overlap or are unsorted",
                w[0].0, w[0].1, w[1].0, w[1].1
            )));
        }
        Ok(ExtensionDomain { intervals, values })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn values(&self) -> &Func {
        &self.values
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// Open gaps `(l, r)` of `[0, 1] \ X`, including a leading gap `[0, a_1)`
    /// and a trailing gap `(b_last, 1]` when present. Zero-length gaps are skipped.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let mut gaps = Vec::new();
        let (first, last) = (self.intervals[0], self.intervals[self.intervals.len() - 1]);
        if first.0 > 0.0 {
            gaps.push((0.0, first.0));
        }
        for w in self.intervals.windows(2) {
            if w[1].0 > w[0].1 {
                gaps.push((w[0].1, w[1].0));
            }
        }
        if last.1 < 1.0 {
            gaps.push((last.1, 1.0));
        }
        gaps
    }
}

/// Serialized shape of an [`ExtensionDomain`].
#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDomainDesc {
    pub intervals: Vec<(f64, f64)>,
    pub func: Func,
}

impl TryFrom<ExtensionDomainDesc> for ExtensionDomain {
    type Error = Error;

    fn try_from(d: ExtensionDomainDesc) -> Result<Self> {
        ExtensionDomain::new(d.intervals, d.func)
    }
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub func: Func,
    /// Largest mismatch between a gap filler and `f` at the gap's ends.
    pub max_jump: f64,
}

/// Extends `f` from `X` to `[0, 1]` with the default anchor of dimension `β`.
pub fn extend_function(domain: &ExtensionDomain, beta: f64, anchor_resolution: usize) -> Result<Extension> {
    check_beta(beta)?;
    let anchor = Anchor::default_for(beta, anchor_resolution)?;
    extend_with_anchor(domain, &anchor)
}

/// Fills every gap `(l, r)` with `ℓ(x) + A(t) - (1-t)A(0) - tA(1)`,
/// `t = (x - l)/(r - l)`, where `ℓ` is the chord through the gap's end
/// values. A gap touching 0 or 1 uses the single available end value.
pub fn extend_with_anchor(domain: &ExtensionDomain, anchor: &Anchor) -> Result<Extension> {
    let f = domain.values();
    let a = anchor.func();
    let (a0, a1) = (a.value(0.0), a.value(1.0));

    let mut pieces: Vec<Piece> = domain
        .intervals()
        .iter()
        .map(|&(lo, hi)| Piece { lo, hi, func: f.clone() })
        .collect();
    let mut max_jump = 0.0f64;
    for (l, r) in domain.gaps() {
        let left = if domain.contains(l) { f.value(l) } else { f.value(r) };
        let right = if domain.contains(r) { f.value(r) } else { f.value(l) };
        let (c0, c1) = (left - a0, right - a1);
        let filler = Func::rescaled(l, r, Func::sum(Func::polynomial(vec![c0, c1 - c0])?, a.clone()))?;
        if domain.contains(l) {
            max_jump = max_jump.max((filler.value(l) - left).abs());
        }
        if domain.contains(r) {
            max_jump = max_jump.max((filler.value(r) - right).abs());
        }
        pieces.push(Piece { lo: l, hi: r, func: filler });
    }
    Ok(Extension { func: Func::piecewise(pieces)?, max_jump })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub dim_rough: f64,
    pub dim_sum: f64,
    pub delta: f64,
}

/// Box-count slopes of `rough` and `rough + lip` on an `m` grid.
///
/// Rejects `lip` when its grid Lipschitz constant exceeds [`LIPSCHITZ_CAP`].
pub fn lipschitz_invariance_check(
    rough: &Func,
    lip: &Func,
    m: usize,
    j_min: u32,
    j_max: u32,
) -> Result<InvarianceCheck> {
    let lip_const = lipschitz_estimate(lip, 1 << 14);
    if !(lip_const.is_finite() && lip_const <= LIPSCHITZ_CAP) {
        return Err(Error::Precondition(format!(
            "grid Lipschitz constant {lip_const} exceeds the cap {LIPSCHITZ_CAP}"
        )));
    }
    let slope = |f: &Func| -> Result<f64> {
        let r = estimate_box_dim(&sample(f, m), j_min, j_max)?;
        Ok(r.raw_slope.expect("estimation fills the slope"))
    };
    let dim_rough = slope(rough)?;
    let dim_sum = slope(&Func::sum(rough.clone(), lip.clone()))?;
    Ok(InvarianceCheck { dim_rough, dim_sum, delta: (dim_sum - dim_rough).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Func {
        Func::polynomial(c.to_vec()).unwrap()
    }

    fn small_opts() -> PipelineOptions {
        PipelineOptions { resolution: 1 << 12, anchor_resolution: 1 << 12, ..Default::default() }
    }

    #[test]
    fn beta_gate() {
        for beta in [1.0, 2.0, 0.5, f64::NAN] {
            assert!(Anchor::default_for(beta, 64).is_err());
            assert!(hausdorff_preserving_sequence(&poly(&[0.0, 0.0, 1.0]), beta, 4).is_err());
        }
    }

    #[test]
    fn default_anchor_dimension() {
        for beta in [1.1, 1.5, 1.9] {
            let a = Anchor::default_for(beta, 1 << 10).unwrap();
            assert!((a.predicted().unwrap() - beta).abs() <= 1e-10);
            assert_eq!(a.func().value(0.0), 0.0);
            assert_eq!(a.func().value(1.0), 0.0);
        }
    }

    #[test]
    fn box_pipeline_affine_is_collinear() {
        let r = dim_preserving_sequence(&poly(&[0.2, 1.0]), 1.5, 4, &small_opts());
        assert!(matches!(r, Err(Error::Collinear(_))));

        let opts = PipelineOptions { perturb_collinear: true, ..small_opts() };
        let a = dim_preserving_sequence(&poly(&[0.2, 1.0]), 1.5, 4, &opts).unwrap();
        assert!(a.perturbed);
        assert!((a.chain.bernstein_err - 0.25).abs() < 1e-12);
        assert!((a.report.predicted.unwrap() - 1.5).abs() < 1e-10);
    }

    #[test]
    fn box_pipeline_square() {
        let a = dim_preserving_sequence(&poly(&[0.0, 0.0, 1.0]), 1.5, 4, &small_opts()).unwrap();
        assert!((a.alpha - 2f64.powf(-0.5)).abs() < 1e-15);
        assert!((a.report.predicted.unwrap() - 1.5).abs() < 1e-10);
        assert!(a.chain.holds, "{:?}", a.chain);
        // p_4 = x^2 + x(1-x)/4
        assert!((a.chain.bernstein_err - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_pipeline_examples() {
        let h = hausdorff_preserving_sequence(&poly(&[0.0, 0.0, 1.0]), 1.5, 4).unwrap();
        assert!(!h.perturbed);
        assert!((h.alpha - 0.5).abs() < 1e-15);
        assert!((h.alpha_sum - 2.0).abs() < 1e-15);
        assert!((h.report.predicted.unwrap() - 1.5).abs() < 1e-10);
        let incr: Vec<f64> = h.spec.ys().windows(2).map(|w| w[1] - w[0]).collect();
        assert_eq!(incr, vec![1.0 / 16.0, 3.0 / 16.0, 5.0 / 16.0, 7.0 / 16.0]);

        let c = hausdorff_preserving_sequence(&poly(&[0.7]), 1.5, 4).unwrap();
        assert!(c.perturbed);
        assert_eq!(c.spec.ys(), &[0.7 + 0.25, 0.7, 0.7, 0.7, 0.7]);
        assert!(hausdorff_preserving_sequence(&poly(&[0.7]), 1.5, 1).is_err());
    }

    #[test]
    fn dense_rejects_wrong_anchor() {
        let zero = FifSpec::affine(Partition::uniform(2).unwrap(), vec![0.0; 3], vec![0.7, 0.7]).unwrap();
        let anchor = Anchor::from_affine_fif(&zero, 256).unwrap();
        let r = dense_approximant(&poly(&[1.0]), 1.5, 2, &anchor);
        assert!(matches!(r, Err(Error::Config(_))));
        let flat = Anchor::with_dimension(poly(&[0.0]), Some(1.0));
        assert!(matches!(dense_approximant(&poly(&[1.0]), 1.5, 2, &flat), Err(Error::Config(_))));
    }

    #[test]
    fn dense_error_split_and_decay() {
        let anchor = Anchor::default_for(1.5, 1 << 12).unwrap();
        let f = Func::weierstrass(0.5, 3.0, 8).unwrap();
        let anchor_sup = sample(anchor.func(), SUP_GRID).values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut errs = Vec::new();
        for k in 2..=10 {
            let fk = dense_approximant(&f, 1.5, k, &anchor).unwrap();
            let gk = lipschitz_surrogate(&f, k).unwrap();
            let err = sup_norm_diff(&f, &fk, SUP_GRID);
            assert!(err <= sup_norm_diff(&f, &gk, SUP_GRID) + anchor_sup / k as f64 + 1e-12);
            errs.push(err);
        }
        assert!(errs.last().unwrap() < &(errs[0] / 3.0), "{errs:?}");
        assert!(dense_approximant(&f, 1.5, 0, &anchor).is_err());
    }

    #[test]
    fn derivative_of_constant_slope() {
        let one = poly(&[1.0]);
        let mut prev = f64::INFINITY;
        for n in [1, 2, 4, 8, 16] {
            let cfg = ApproxConfig::new(1.5, n, false, 1 << 12).unwrap();
            let d = derivative_dim_approximant(&one, &cfg).unwrap();
            assert_eq!(d.primitive.value(0.0), 0.0);
            let gap = (d.primitive.value(1.0) - 1.0).abs();
            assert!(gap <= sup_norm_diff(&one, &d.derivative, 1 << 16) + 1e-12);
            assert!(gap <= prev);
            prev = gap;
        }
    }

    #[test]
    fn nonneg_variant_shifts_anchor() {
        // ∫(2x - 1) = x^2 - x dips below zero
        let fprime = poly(&[-1.0, 2.0]);
        let cfg = ApproxConfig::new(1.5, 2, true, 1 << 12).unwrap();
        let d = derivative_dim_approximant(&fprime, &cfg).unwrap();
        assert!(d.target_min.unwrap() < 0.0);
        assert_eq!(d.anchor_shift, 0.0);

        let cfg = ApproxConfig::new(1.5, 2, true, 1 << 12).unwrap();
        let d = derivative_dim_approximant(&poly(&[1.0]), &cfg).unwrap();
        assert!(d.target_min.unwrap() >= 0.0);
        assert!(d.anchor_shift >= 0.0);
        assert_eq!(d.nonneg_holds, Some(true));
        assert!(ApproxConfig::new(1.5, 0, false, 64).is_err());
    }

    #[test]
    fn extension_pieces() {
        let f = poly(&[0.0]);
        let dom = ExtensionDomain::new(vec![(0.0, 1.0 / 3.0), (2.0 / 3.0, 1.0)], f).unwrap();
        assert_eq!(dom.gaps(), vec![(1.0 / 3.0, 2.0 / 3.0)]);
        let anchor = Anchor::default_for(1.5, 1 << 10).unwrap();
        let ext = extend_with_anchor(&dom, &anchor).unwrap();
        assert_eq!(ext.func.value(1.0 / 3.0), 0.0);
        assert_eq!(ext.func.value(2.0 / 3.0), 0.0);
        assert!(ext.max_jump <= 1e-12);
        // rescaled anchor peak at the middle of the gap
        assert!((ext.func.value(0.5) - 1.0).abs() < 1e-9);

        let open_ends = ExtensionDomain::new(vec![(0.25, 0.5)], poly(&[1.0, 2.0])).unwrap();
        assert_eq!(open_ends.gaps(), vec![(0.0, 0.25), (0.5, 1.0)]);
        let e = extend_with_anchor(&open_ends, &anchor).unwrap();
        assert_eq!(e.func.value(0.0), 1.5);
        assert_eq!(e.func.value(1.0), 2.0);

        assert!(ExtensionDomain::new(vec![(0.5, 0.7), (0.6, 0.9)], poly(&[0.0])).is_err());
        assert!(ExtensionDomain::new(vec![(0.5, 1.2)], poly(&[0.0])).is_err());
        assert!(extend_function(&dom, 2.0, 64).is_err());
    }

    #[test]
    fn invariance_gate() {
        let steep = poly(&[0.0, 5e3]);
        let r = lipschitz_invariance_check(&poly(&[0.0, 0.0, 1.0]), &steep, 1 << 12, 3, 8);
        assert!(matches!(r, Err(Error::Precondition(_))));
        let zero = poly(&[0.0]);
        let c = lipschitz_invariance_check(&poly(&[0.0, 0.0, 1.0]), &zero, 1 << 12, 3, 8).unwrap();
        assert_eq!(c.delta, 0.0);
    }
}
