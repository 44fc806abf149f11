//! Continuous functions on `[0, 1]`: closed-form primitives, grid-backed
//! samples and combinators, together with uniform sampling and the grid
//! norms every other module relies on.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinPoly;
use crate::{Error, Result};

/// Number of trapezoid panels used for [`Func::AntiDerivative`] tables.
pub const DEFAULT_QUADRATURE_PANELS: usize = 1 << 16;

/// Truncation tail bound for Weierstrass series with an implicit term count.
const WEIERSTRASS_TAIL: f64 = 1e-12;

/// Anything that can be evaluated on the unit interval.
///
/// `value` does not check its argument; callers guarantee `x ∈ [0, 1]`.
pub trait Evaluate: Sync {
    fn value(&self, x: f64) -> f64;
}

impl<T: Evaluate + ?Sized> Evaluate for &T {
    fn value(&self, x: f64) -> f64 {
        (**self).value(x)
    }
}

/// The `j`-th node of the uniform grid with `m` intervals.
#[inline]
pub fn grid_point(j: usize, m: usize) -> f64 {
    j as f64 / m as f64
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(x))
    }
}

/// Strictly increasing knots `0 = x_0 < x_1 < … < x_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Partition {
    knots: Vec<f64>,
}

impl Partition {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least two knots, got {}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidPartition("knots must be finite".into()));
        }
        if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
            return Err(Error::InvalidPartition(
                "first knot must be 0 and last knot must be 1".into(),
            ));
        }
        if let Some(w) = knots.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPartition(format!(
                "knots must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        Ok(Partition { knots })
    }

    /// Uniform partition into `n` subintervals.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidPartition("need at least one interval".into()));
        }
        let mut knots: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        knots[n] = 1.0;
        Partition::new(knots)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.knots.len() - 1
    }

    /// Interval lengths `a_i = x_i - x_(i-1)`.
    pub fn lengths(&self) -> Vec<f64> {
        self.knots.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Zero-based index of the subinterval containing `x`. An interior knot
    /// `x_i` belongs to the subinterval on its left and `0` to the first one.
    pub fn interval_of(&self, x: f64) -> usize {
        let n = self.intervals();
        // first knot index k >= 1 with x <= x_k
        let k = self.knots[1..].partition_point(|&knot| knot < x);
        k.min(n - 1)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let knots = Vec::<f64>::deserialize(d)?;
        Partition::new(knots).map_err(serde::de::Error::custom)
    }
}

/// Uniform samples `values[j] = f(j / m)`, `j = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "a grid function needs resolution >= 1 (at least two samples)".into(),
            ));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {j} is not finite")));
        }
        Ok(GridFunction { values })
    }

    pub(crate) fn from_values_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        GridFunction { values }
    }

    pub fn resolution(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Samples as `(x, y)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.resolution();
        self.values
            .iter()
            .enumerate()
            .map(move |(j, &y)| (grid_point(j, m), y))
    }

    /// Maximum absolute difference between two grids of equal resolution.
    pub fn sup_distance(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid resolutions differ");
        self.values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| (a - b).abs())
            .reduce(|| 0.0, f64::max)
    }

    /// Writes `x,y` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x,y")?;
        for (x, y) in self.points() {
            writeln!(w, "{x:.16e},{y:.16e}")?;
        }
        Ok(())
    }

    /// Reads an `x,y` CSV whose abscissae form the uniform grid `j / m`.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.eq_ignore_ascii_case("x,y")) {
                continue;
            }
            let mut fields = line.split(',');
            let (Some(x), Some(y), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse(format!("line {}: expected two fields", lineno + 1)));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            xs.push(parse(x)?);
            ys.push(parse(y)?);
        }
        if ys.len() < 2 {
            return Err(Error::Parse("need at least two samples".into()));
        }
        let m = ys.len() - 1;
        for (j, &x) in xs.iter().enumerate() {
            if (x - grid_point(j, m)).abs() > 1e-12 {
                return Err(Error::Parse(format!(
                    "x column is not the uniform grid j/{m} (row {j}: {x})"
                )));
            }
        }
        GridFunction::new(ys)
    }
}

impl Evaluate for GridFunction {
    /// Linear interpolation between grid nodes.
    fn value(&self, x: f64) -> f64 {
        let m = self.resolution();
        let pos = x * m as f64;
        let k = (pos.floor().max(0.0) as usize).min(m - 1);
        let w = pos - k as f64;
        if w == 0.0 {
            self.values[k]
        } else {
            (1.0 - w) * self.values[k] + w * self.values[k + 1]
        }
    }
}

/// `Σ_{k=0}^{K} a^k cos(b^k π x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassSeries {
    a: f64,
    b: f64,
    terms: usize,
}

impl WeierstrassSeries {
    /// Series with an explicit truncation index `terms = K`.
    pub fn new(a: f64, b: f64, terms: usize) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidArgument(format!("weierstrass a = {a} must lie in (0, 1)")));
        }
        if !(b > 1.0 && b.is_finite()) {
            return Err(Error::InvalidArgument(format!("weierstrass b = {b} must exceed 1")));
        }
        Ok(WeierstrassSeries { a, b, terms })
    }

    /// Truncates where the tail bound `a^(K+1) / (1 - a)` drops below `1e-12`.
    pub fn with_default_terms(a: f64, b: f64) -> Result<Self> {
        let mut s = WeierstrassSeries::new(a, b, 0)?;
        s.terms = Self::default_terms(a);
        Ok(s)
    }

    pub fn default_terms(a: f64) -> usize {
        let mut k = 0usize;
        while a.powi(k as i32 + 1) / (1.0 - a) >= WEIERSTRASS_TAIL {
            k += 1;
        }
        k
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Box dimension `2 + ln a / ln b` of the untruncated graph, available
    /// only in the rough regime `a·b > 1`.
    pub fn box_dimension(&self) -> Option<f64> {
        (self.a * self.b > 1.0).then(|| 2.0 + self.a.ln() / self.b.ln())
    }
}

impl Evaluate for WeierstrassSeries {
    fn value(&self, x: f64) -> f64 {
        let mut amp = 1.0;
        let mut freq = 1.0;
        let mut sum = 0.0;
        for _ in 0..=self.terms {
            sum += amp * (freq * std::f64::consts::PI * x).cos();
            amp *= self.a;
            freq *= self.b;
        }
        sum
    }
}

/// Linear interpolant through `(knots[i], values[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Partition,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Partition, values: Vec<f64>) -> Result<Self> {
        if values.len() != knots.knots().len() {
            return Err(Error::InvalidArgument(format!(
                "piecewise linear function has {} knots but {} values",
                knots.knots().len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("values must be finite".into()));
        }
        Ok(PiecewiseLinear { knots, values })
    }

    pub fn knots(&self) -> &Partition {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Evaluate for PiecewiseLinear {
    fn value(&self, x: f64) -> f64 {
        let xs = self.knots.knots();
        let i = self.knots.interval_of(x);
        let (x0, x1) = (xs[i], xs[i + 1]);
        let t = (x - x0) / (x1 - x0);
        if t == 0.0 {
            self.values[i]
        } else if t == 1.0 {
            self.values[i + 1]
        } else {
            self.values[i] + t * (self.values[i + 1] - self.values[i])
        }
    }
}

/// Cumulative trapezoid integral `x ↦ ∫_0^x g`, tabulated on a uniform
/// grid and linearly interpolated in between.
#[derive(Debug, Clone)]
pub struct AntiDerivative {
    integrand: Box<Func>,
    table: Arc<GridFunction>,
}

impl AntiDerivative {
    pub fn new(integrand: Func, panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one panel".into()));
        }
        let samples = sample(&integrand, panels);
        let h = 1.0 / panels as f64;
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(panels + 1);
        cumulative.push(0.0);
        for w in samples.values().windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Ok(AntiDerivative {
            integrand: Box::new(integrand),
            table: Arc::new(GridFunction::new(cumulative)?),
        })
    }

    pub fn integrand(&self) -> &Func {
        &self.integrand
    }

    pub fn panels(&self) -> usize {
        self.table.resolution()
    }
}

/// One branch of a [`Func::Piecewise`] function, active on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub func: Func,
}

/// A continuous function on `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "FuncDesc", into = "FuncDesc")]
pub enum Func {
    /// Coefficients in ascending degree.
    Polynomial(Vec<f64>),
    Weierstrass(WeierstrassSeries),
    PiecewiseLinear(PiecewiseLinear),
    GridBacked(Arc<GridFunction>),
    Bernstein(Arc<BernsteinPoly>),
    Sum(Box<Func>, Box<Func>),
    Scaled(f64, Box<Func>),
    /// `f + c`.
    Shifted(f64, Box<Func>),
    AntiDerivative(AntiDerivative),
    /// `inner((x - lo) / (hi - lo))` with the argument clamped to `[0, 1]`.
    Rescaled { lo: f64, hi: f64, inner: Box<Func> },
    /// The first piece whose closed interval contains `x` decides the value.
    Piecewise(Vec<Piece>),
}

impl PartialEq for Func {
    fn eq(&self, other: &Self) -> bool {
        FuncDesc::from(self.clone()) == FuncDesc::from(other.clone())
    }
}

impl Func {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Func> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("polynomial coefficients must be finite".into()));
        }
        Ok(Func::Polynomial(coeffs))
    }

    pub fn weierstrass(a: f64, b: f64, terms: usize) -> Result<Func> {
        Ok(Func::Weierstrass(WeierstrassSeries::new(a, b, terms)?))
    }

    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Func> {
        Ok(Func::PiecewiseLinear(PiecewiseLinear::new(
            Partition::new(knots)?,
            values,
        )?))
    }

    pub fn grid(g: GridFunction) -> Func {
        Func::GridBacked(Arc::new(g))
    }

    pub fn sum(f: Func, g: Func) -> Func {
        Func::Sum(Box::new(f), Box::new(g))
    }

    pub fn scaled(c: f64, f: Func) -> Func {
        Func::Scaled(c, Box::new(f))
    }

    pub fn shifted(c: f64, f: Func) -> Func {
        Func::Shifted(c, Box::new(f))
    }

    /// Antiderivative on the default quadrature grid.
    pub fn antiderivative(f: Func) -> Func {
        Func::antiderivative_with_panels(f, DEFAULT_QUADRATURE_PANELS)
            .expect("default panel count is positive")
    }

    pub fn antiderivative_with_panels(f: Func, panels: usize) -> Result<Func> {
        Ok(Func::AntiDerivative(AntiDerivative::new(f, panels)?))
    }

    pub fn rescaled(lo: f64, hi: f64, inner: Func) -> Result<Func> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rescale window [{lo}, {hi}] must be a nondegenerate subinterval of [0, 1]"
            )));
        }
        Ok(Func::Rescaled { lo, hi, inner: Box::new(inner) })
    }

    pub fn piecewise(pieces: Vec<Piece>) -> Result<Func> {
        if pieces.is_empty() {
            return Err(Error::InvalidArgument("piecewise function needs a piece".into()));
        }
        for p in &pieces {
            if !(0.0 <= p.lo && p.lo <= p.hi && p.hi <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "piece [{}, {}] is not inside [0, 1]",
                    p.lo, p.hi
                )));
            }
        }
        // the pieces must cover [0, 1]
        let mut spans: Vec<(f64, f64)> = pieces.iter().map(|p| (p.lo, p.hi)).collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut reach = 0.0;
        for (lo, hi) in spans {
            if lo > reach {
                return Err(Error::InvalidArgument(format!("pieces leave ({reach}, {lo}) uncovered")));
            }
            reach = f64::max(reach, hi);
        }
        if reach < 1.0 {
            return Err(Error::InvalidArgument(format!("pieces leave ({reach}, 1] uncovered")));
        }
        Ok(Func::Piecewise(pieces))
    }

    /// Checked evaluation.
    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.value(x))
    }

    /// Whether evaluation avoids tabulated data (grids, quadrature tables).
    pub fn is_closed_form(&self) -> bool {
        match self {
            Func::Polynomial(_)
            | Func::Weierstrass(_)
            | Func::PiecewiseLinear(_)
            | Func::Bernstein(_) => true,
            Func::GridBacked(_) | Func::AntiDerivative(_) => false,
            Func::Sum(f, g) => f.is_closed_form() && g.is_closed_form(),
            Func::Scaled(_, f) | Func::Shifted(_, f) => f.is_closed_form(),
            Func::Rescaled { inner, .. } => inner.is_closed_form(),
            Func::Piecewise(ps) => ps.iter().all(|p| p.func.is_closed_form()),
        }
    }

    pub fn from_json(s: &str) -> Result<Func> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function descriptions always serialize")
    }
}

impl Evaluate for Func {
    fn value(&self, x: f64) -> f64 {
        match self {
            Func::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci),
            Func::Weierstrass(w) => w.value(x),
            Func::PiecewiseLinear(p) => p.value(x),
            Func::GridBacked(g) => g.value(x),
            Func::Bernstein(p) => p.value(x),
            Func::Sum(f, g) => f.value(x) + g.value(x),
            Func::Scaled(c, f) => c * f.value(x),
            Func::Shifted(c, f) => f.value(x) + c,
            Func::AntiDerivative(a) => a.table.value(x),
            Func::Rescaled { lo, hi, inner } => {
                inner.value(((x - lo) / (hi - lo)).clamp(0.0, 1.0))
            }
            Func::Piecewise(pieces) => pieces
                .iter()
                .find(|p| p.lo <= x && x <= p.hi)
                .unwrap_or_else(|| pieces.last().expect("nonempty"))
                .func
                .value(x),
        }
    }
}

/// `values[j] = f(j / m)` for `j = 0..=m`.
pub fn sample<F: Evaluate + ?Sized>(f: &F, m: usize) -> GridFunction {
    assert!(m >= 1, "sampling resolution must be positive");
    let values: Vec<f64> = (0..=m)
        .into_par_iter()
        .map(|j| f.value(grid_point(j, m)))
        .collect();
    GridFunction::from_values_unchecked(values)
}

/// `max_j |f(j/m) - g(j/m)|`, a lower bound on `‖f - g‖_∞`.
pub fn sup_norm_diff<F: Evaluate + ?Sized, G: Evaluate + ?Sized>(f: &F, g: &G, m: usize) -> f64 {
    assert!(m >= 1, "grid resolution must be positive");
    (0..=m)
        .into_par_iter()
        .map(|j| {
            let x = grid_point(j, m);
            (f.value(x) - g.value(x)).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// `max_j |f(x_(j+1)) - f(x_j)| · m`, a lower bound on `Lip(f)`.
pub fn lipschitz_estimate<F: Evaluate + ?Sized>(f: &F, m: usize) -> f64 {
    assert!(m >= 2, "Lipschitz estimate needs m >= 2");
    let g = sample(f, m);
    g.values()
        .par_windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .reduce(|| 0.0, f64::max)
        * m as f64
}

/// Serialized shape of [`Func`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FuncDesc {
    Polynomial {
        coeffs: Vec<f64>,
    },
    Weierstrass {
        a: f64,
        b: f64,
        #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
        terms: Option<usize>,
    },
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    Grid {
        values: Vec<f64>,
    },
    Bernstein {
        samples: Vec<f64>,
    },
    Sum {
        left: Box<Func>,
        right: Box<Func>,
    },
    Scaled {
        factor: f64,
        func: Box<Func>,
    },
    Shifted {
        offset: f64,
        func: Box<Func>,
    },
    Antiderivative {
        func: Box<Func>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        panels: Option<usize>,
    },
    Rescaled {
        lo: f64,
        hi: f64,
        func: Box<Func>,
    },
    Piecewise {
        pieces: Vec<Piece>,
    },
}

impl From<Func> for FuncDesc {
    fn from(f: Func) -> Self {
        match f {
            Func::Polynomial(coeffs) => FuncDesc::Polynomial { coeffs },
            Func::Weierstrass(w) => FuncDesc::Weierstrass { a: w.a, b: w.b, terms: Some(w.terms) },
            Func::PiecewiseLinear(p) => FuncDesc::PiecewiseLinear {
                knots: p.knots.knots,
                values: p.values,
            },
            Func::GridBacked(g) => FuncDesc::Grid { values: g.values.clone() },
            Func::Bernstein(p) => FuncDesc::Bernstein { samples: p.samples().to_vec() },
            Func::Sum(left, right) => FuncDesc::Sum { left, right },
            Func::Scaled(factor, func) => FuncDesc::Scaled { factor, func },
            Func::Shifted(offset, func) => FuncDesc::Shifted { offset, func },
            Func::AntiDerivative(a) => {
                let panels = a.panels();
                FuncDesc::Antiderivative {
                    func: a.integrand,
                    panels: (panels != DEFAULT_QUADRATURE_PANELS).then_some(panels),
                }
            }
            Func::Rescaled { lo, hi, inner } => FuncDesc::Rescaled { lo, hi, func: inner },
            Func::Piecewise(pieces) => FuncDesc::Piecewise { pieces },
        }
    }
}

impl TryFrom<FuncDesc> for Func {
    type Error = Error;

    fn try_from(d: FuncDesc) -> Result<Func> {
        match d {
            FuncDesc::Polynomial { coeffs } => Func::polynomial(coeffs),
            FuncDesc::Weierstrass { a, b, terms: Some(k) } => Func::weierstrass(a, b, k),
            FuncDesc::Weierstrass { a, b, terms: None } => {
                Ok(Func::Weierstrass(WeierstrassSeries::with_default_terms(a, b)?))
            }
            FuncDesc::PiecewiseLinear { knots, values } => Func::piecewise_linear(knots, values),
            FuncDesc::Grid { values } => Ok(Func::grid(GridFunction::new(values)?)),
            FuncDesc::Bernstein { samples } => {
                Ok(Func::Bernstein(Arc::new(BernsteinPoly::from_samples(samples)?)))
            }
            FuncDesc::Sum { left, right } => Ok(Func::Sum(left, right)),
            FuncDesc::Scaled { factor, func } => Ok(Func::Scaled(factor, func)),
            FuncDesc::Shifted { offset, func } => Ok(Func::Shifted(offset, func)),
            FuncDesc::Antiderivative { func, panels } => {
                Func::antiderivative_with_panels(*func, panels.unwrap_or(DEFAULT_QUADRATURE_PANELS))
            }
            FuncDesc::Rescaled { lo, hi, func } => Func::rescaled(lo, hi, *func),
            FuncDesc::Piecewise { pieces } => Func::piecewise(pieces),
        }
    }
}
