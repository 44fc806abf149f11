//! Bernstein operator `B_n`, its exact derivative, and the second modulus
//! of smoothness with step-weight `φ(x) = √(x(1-x))`.

use rayon::prelude::*;
use serde::Serialize;

use crate::func::{grid_point, sample, sup_norm_diff, Evaluate, Func};
use crate::{Error, Result};

/// Orders up to this use the de Casteljau recurrence; larger orders switch
/// to log-space binomial weights.
const DE_CASTELJAU_MAX_ORDER: usize = 512;

/// Grid used for Bernstein sup-norm errors (4097 nodes).
pub const SUP_GRID: usize = 4096;
pub const MODULUS_GRID_T: usize = 64;
pub const MODULUS_GRID_X: usize = 4096;

/// `B_n(f)` stored through its control values `f(k/n)`, `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernsteinPoly {
    samples: Vec<f64>,
    /// `ln C(n, k)`, only populated above the de Casteljau cutoff.
    log_binom: Vec<f64>,
}

impl BernsteinPoly {
    /// Builds `B_n(f)`.
    pub fn build<F: Evaluate + ?Sized>(f: &F, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Bernstein order must be >= 1".into()));
        }
        Self::from_samples(sample(f, n).into_values())
    }

    /// Polynomial with the given control values; order is `samples.len() - 1`.
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("Bernstein polynomial needs a sample".into()));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("Bernstein samples must be finite".into()));
        }
        let n = samples.len() - 1;
        let log_binom = if n > DE_CASTELJAU_MAX_ORDER {
            let mut lb = Vec::with_capacity(n + 1);
            lb.push(0.0);
            for k in 1..=n {
                let prev = lb[k - 1];
                lb.push(prev + ((n - k + 1) as f64 / k as f64).ln());
            }
            lb
        } else {
            Vec::new()
        };
        Ok(BernsteinPoly { samples, log_binom })
    }

    pub fn order(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(self.value(x))
    }

    /// Exact derivative `n Σ (f_(k+1) - f_k) b_(k, n-1)(x)`.
    pub fn derivative_eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(self.derivative_value(x))
    }

    pub fn derivative_value(&self, x: f64) -> f64 {
        let n = self.order();
        if n == 0 {
            return 0.0;
        }
        let diffs: Vec<f64> = self.samples.windows(2).map(|w| w[1] - w[0]).collect();
        let d = BernsteinPoly::from_samples(diffs).expect("finite differences of finite samples");
        n as f64 * d.value(x)
    }

    /// The derivative as a Bernstein polynomial of order `n - 1`.
    pub fn derivative(&self) -> BernsteinPoly {
        let n = self.order() as f64;
        let diffs = if self.order() == 0 {
            vec![0.0]
        } else {
            self.samples.windows(2).map(|w| n * (w[1] - w[0])).collect()
        };
        BernsteinPoly::from_samples(diffs).expect("finite differences of finite samples")
    }

    fn de_casteljau(&self, x: f64) -> f64 {
        let mut b = self.samples.clone();
        let y = 1.0 - x;
        for r in 1..b.len() {
            for k in 0..b.len() - r {
                b[k] = y * b[k] + x * b[k + 1];
            }
        }
        b[0]
    }

    fn log_space(&self, x: f64) -> f64 {
        let n = self.order();
        let (lx, ly) = (x.ln(), (1.0 - x).ln());
        let logw = |k: usize| self.log_binom[k] + k as f64 * lx + (n - k) as f64 * ly;
        // the weights are unimodal with peak near k = n·x
        let peak = ((n as f64 * x).round() as usize).min(n);
        let top = logw(peak);
        // Neumaier-compensated sums of w_k f_k and w_k
        let (mut num, mut num_c) = (0.0f64, 0.0f64);
        let (mut den, mut den_c) = (0.0f64, 0.0f64);
        let add = |sum: &mut f64, comp: &mut f64, v: f64| {
            let t = *sum + v;
            if sum.abs() >= v.abs() {
                *comp += (*sum - t) + v;
            } else {
                *comp += (v - t) + *sum;
            }
            *sum = t;
        };
        for k in 0..=n {
            let e = logw(k) - top;
            if e < -745.0 {
                continue;
            }
            let w = e.exp();
            add(&mut num, &mut num_c, w * self.samples[k]);
            add(&mut den, &mut den_c, w);
        }
        (num + num_c) / (den + den_c)
    }
}

impl Evaluate for BernsteinPoly {
    fn value(&self, x: f64) -> f64 {
        let n = self.order();
        if x <= 0.0 {
            return self.samples[0];
        }
        if x >= 1.0 {
            return self.samples[n];
        }
        if n <= DE_CASTELJAU_MAX_ORDER {
            self.de_casteljau(x)
        } else {
            self.log_space(x)
        }
    }
}

/// `B_n(f)`.
pub fn bernstein_build<F: Evaluate + ?Sized>(f: &F, n: usize) -> Result<BernsteinPoly> {
    BernsteinPoly::build(f, n)
}

/// Discretised `ω_φ(f; δ)`: the sup over `t ∈ {0, δ/grid_t, …, δ}` and
/// `x = j/grid_x` of `|f(x - tφ(x)) - 2f(x) + f(x + tφ(x))|`, restricted to
/// `x` where both arguments stay in `[0, 1]`. Lower bound on the modulus.
pub fn modulus_smoothness<F: Evaluate + ?Sized>(
    f: &F,
    delta: f64,
    grid_t: usize,
    grid_x: usize,
) -> f64 {
    if delta <= 0.0 {
        return 0.0;
    }
    let grid_t = grid_t.max(1);
    let grid_x = grid_x.max(1);
    let centre: Vec<f64> = sample(f, grid_x).into_values();
    (0..=grid_x)
        .into_par_iter()
        .map(|j| {
            let x = grid_point(j, grid_x);
            let phi = (x * (1.0 - x)).sqrt();
            let fx2 = 2.0 * centre[j];
            let mut best = 0.0f64;
            for i in 1..=grid_t {
                let t = delta * i as f64 / grid_t as f64;
                let (lo, hi) = (x - t * phi, x + t * phi);
                if lo < 0.0 || hi > 1.0 {
                    continue;
                }
                best = best.max((f.value(lo) - fx2 + f.value(hi)).abs());
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Bernstein error against the weighted modulus at `δ = 1/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TotikReport {
    pub sup_err: f64,
    pub modulus: f64,
    /// `sup_err / modulus`; `0` when both vanish, `∞` when only the modulus does.
    pub ratio: f64,
}

/// Errors and moduli below `ROUNDING_FLOOR · (1 + max|f|)` are reported as 0.
const ROUNDING_FLOOR: f64 = 1e-13;

pub fn totik_error_report(f: &Func, n: usize) -> Result<TotikReport> {
    let p = BernsteinPoly::build(f, n)?;
    let scale = 1.0 + sample(f, SUP_GRID).values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let snap = |v: f64| if v <= ROUNDING_FLOOR * scale { 0.0 } else { v };
    let sup_err = snap(sup_norm_diff(f, &p, SUP_GRID));
    let modulus = snap(modulus_smoothness(
        f,
        1.0 / (n as f64).sqrt(),
        MODULUS_GRID_T,
        MODULUS_GRID_X,
    ));
    let ratio = if modulus > 0.0 {
        sup_err / modulus
    } else if sup_err > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(TotikReport { sup_err, modulus, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Func {
        Func::polynomial(c.to_vec()).unwrap()
    }

    fn binom(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// Direct basis summation, usable for small n only.
    fn basis_sum(samples: &[f64], x: f64) -> f64 {
        let n = samples.len() as u64 - 1;
        samples
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                let k = k as u64;
                s * binom(n, k) * x.powi(k as i32) * (1.0 - x).powi((n - k) as i32)
            })
            .sum()
    }

    #[test]
    fn build_examples() {
        let p = bernstein_build(&poly(&[0.0, 1.0]), 3).unwrap();
        assert_eq!(p.samples(), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0]);
        let c = bernstein_build(&poly(&[7.5]), 5).unwrap();
        assert!(c.samples().iter().all(|&s| s == 7.5));
        let sq = bernstein_build(&poly(&[0.0, 0.0, 1.0]), 4).unwrap();
        assert_eq!(sq.samples(), &[0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0]);
        assert!(bernstein_build(&poly(&[1.0]), 0).is_err());
    }

    #[test]
    fn eval_matches_basis_summation() {
        for n in 1..=10 {
            let p = bernstein_build(&poly(&[0.0, 0.0, 1.0]), n).unwrap();
            for j in 0..=20 {
                let x = j as f64 / 20.0;
                let oracle = basis_sum(p.samples(), x);
                assert!((p.eval(x).unwrap() - oracle).abs() < 1e-14);
                let identity = x * x + x * (1.0 - x) / n as f64;
                assert!((oracle - identity).abs() < 1e-14);
            }
        }
        let p = bernstein_build(&poly(&[0.0, 0.0, 1.0]), 100).unwrap();
        for j in 0..=50 {
            let x = j as f64 / 50.0;
            assert!((p.value(x) - (x * x + x * (1.0 - x) / 100.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn endpoints_and_domain() {
        let p = bernstein_build(&Func::weierstrass(0.5, 3.0, 10).unwrap(), 17).unwrap();
        assert_eq!(p.eval(0.0).unwrap(), p.samples()[0]);
        assert_eq!(p.eval(1.0).unwrap(), p.samples()[17]);
        assert!(p.eval(1.01).is_err());
        assert!(p.derivative_eval(-0.5).is_err());
    }

    #[test]
    fn high_order_affine_reproduction() {
        for n in [513, 1024, 2000] {
            let p = bernstein_build(&poly(&[0.3, -1.7]), n).unwrap();
            for j in 0..=1000 {
                let x = j as f64 / 1000.0;
                assert!((p.value(x) - (0.3 - 1.7 * x)).abs() <= 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn log_space_agrees_with_de_casteljau() {
        let f = Func::weierstrass(0.6, 2.5, 12).unwrap();
        let p = bernstein_build(&f, 600).unwrap();
        for j in 1..100 {
            let x = j as f64 / 100.0;
            assert!((p.log_space(x) - p.de_casteljau(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_examples() {
        let p = bernstein_build(&poly(&[0.0, 1.0]), 6).unwrap();
        let c = bernstein_build(&poly(&[2.0]), 6).unwrap();
        for j in 0..=10 {
            let x = j as f64 / 10.0;
            assert!((p.derivative_eval(x).unwrap() - 1.0).abs() < 1e-14);
            assert_eq!(c.derivative_eval(x).unwrap(), 0.0);
        }
        let q = bernstein_build(&Func::weierstrass(0.5, 3.0, 12).unwrap(), 40).unwrap();
        let h = 1e-6;
        for j in 1..100 {
            let x = j as f64 / 100.0;
            let fd = (q.value(x + h) - q.value(x - h)) / (2.0 * h);
            assert!((q.derivative_eval(x).unwrap() - fd).abs() < 1e-5);
            assert!((q.derivative().value(x) - q.derivative_value(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn modulus_examples() {
        let affine = poly(&[1.0, -3.0]);
        assert!(modulus_smoothness(&affine, 0.3, 64, 4096) < 1e-14);
        assert_eq!(modulus_smoothness(&poly(&[0.0, 0.0, 1.0]), 0.0, 64, 4096), 0.0);

        // brute-force oracle: second difference of x^2 is 2 t^2 x(1-x)
        let delta = 0.25;
        let (gt, gx) = (64, 4096);
        let mut oracle = 0.0f64;
        for j in 0..=gx {
            let x = j as f64 / gx as f64;
            for i in 0..=gt {
                let t = delta * i as f64 / gt as f64;
                let phi = (x * (1.0 - x)).sqrt();
                if x - t * phi >= 0.0 && x + t * phi <= 1.0 {
                    oracle = oracle.max(2.0 * t * t * x * (1.0 - x));
                }
            }
        }
        let w = modulus_smoothness(&poly(&[0.0, 0.0, 1.0]), delta, gt, gx);
        assert!((w - oracle).abs() < 1e-14);
        assert!((w - delta * delta / 2.0).abs() < 1e-12);
    }

    #[test]
    fn totik_examples() {
        let r = totik_error_report(&poly(&[2.0, 5.0]), 9).unwrap();
        assert_eq!((r.sup_err, r.modulus, r.ratio), (0.0, 0.0, 0.0));
        let exact = totik_error_report(&poly(&[2.0]), 3).unwrap();
        assert_eq!((exact.sup_err, exact.modulus, exact.ratio), (0.0, 0.0, 0.0));

        let sq = poly(&[0.0, 0.0, 1.0]);
        let r4 = totik_error_report(&sq, 4).unwrap();
        assert!((r4.sup_err - 1.0 / 16.0).abs() < 1e-15);
        for n in [4, 16, 64, 256] {
            let r = totik_error_report(&sq, n).unwrap();
            assert!((r.sup_err - 0.25 / n as f64).abs() < 1e-12);
            assert!(r.ratio <= 1.0, "n={n} ratio={}", r.ratio);
            assert!((r.ratio - 0.5).abs() < 1e-6);
        }
    }
}
