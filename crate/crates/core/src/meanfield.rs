//! Mean-field approximation of interval rules: the density map
//! `p -> sum of P(cell is 1 next step)` over independent cells, its fixed
//! points, and Monte Carlo densities on real lattices for comparison.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Grid, GridError};
use crate::rule::RuleSpec;

/// Cells in the neighborhood including the center.
pub const N: u32 = 9;

/// Default number of bracketing intervals for [`MeanFieldModel::fixed_points`].
pub const DEFAULT_BRACKETS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanFieldError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// `coef · p^p_exp · q^q_exp` with `q = 1 - p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Term {
    pub coef: u64,
    pub p_exp: u32,
    pub q_exp: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanFieldModel {
    pub rule: RuleSpec,
    /// Like terms merged, sorted by descending p exponent.
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    SuperStable,
    Stable,
    /// Includes the marginal case |derivative| = 1.
    Unstable,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stability::SuperStable => "super-stable",
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub p: f64,
    pub derivative: f64,
    pub stability: Stability,
}

/// Per-generation Monte Carlo statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub generation: u64,
    pub mean: f64,
    /// Sample standard deviation across trials (zero for a single trial).
    pub std: f64,
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * u64::from(n - i) / u64::from(i + 1))
}

fn check_probability(p: f64) -> Result<(), MeanFieldError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(MeanFieldError::Probability(p))
    }
}

/// The exact integer-coefficient density polynomial of `rule`.
pub fn build_polynomial(rule: &RuleSpec) -> MeanFieldModel {
    let mut raw = Vec::new();
    for v in rule.survive().lo()..=rule.survive().hi() {
        let v = u32::from(v);
        raw.push(Term { coef: binomial(N - 1, v), p_exp: v + 1, q_exp: N - 1 - v });
    }
    for v in rule.birth().lo()..=rule.birth().hi() {
        let v = u32::from(v);
        raw.push(Term { coef: binomial(N - 1, v), p_exp: v, q_exp: N - v });
    }
    let mut terms: Vec<Term> = Vec::new();
    raw.sort_by_key(|t| std::cmp::Reverse(t.p_exp));
    for t in raw {
        match terms.last_mut() {
            Some(last) if last.p_exp == t.p_exp => last.coef += t.coef,
            _ => terms.push(t),
        }
    }
    MeanFieldModel { rule: *rule, terms }
}

impl MeanFieldModel {
    pub fn eval(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        self.terms.iter().map(|t| t.coef as f64 * p.powi(t.p_exp as i32) * q.powi(t.q_exp as i32)).sum()
    }

    /// d/dp of the polynomial, from the term list.
    pub fn derivative(&self, p: f64) -> f64 {
        let q = 1.0 - p;
        let pow = |x: f64, e: u32| if e == 0 { 1.0 } else { x.powi(e as i32) };
        self.terms
            .iter()
            .map(|t| {
                let c = t.coef as f64;
                let dp = if t.p_exp > 0 { t.p_exp as f64 * pow(p, t.p_exp - 1) * pow(q, t.q_exp) } else { 0.0 };
                let dq = if t.q_exp > 0 { t.q_exp as f64 * pow(p, t.p_exp) * pow(q, t.q_exp - 1) } else { 0.0 };
                c * (dp - dq)
            })
            .sum()
    }

    /// `p0, f(p0), f(f(p0)), ...`, `steps + 1` values.
    pub fn iterate(&self, p0: f64, steps: usize) -> Result<Vec<f64>, MeanFieldError> {
        check_probability(p0)?;
        let mut out = Vec::with_capacity(steps + 1);
        let mut p = p0;
        out.push(p);
        for _ in 0..steps {
            p = self.eval(p).clamp(0.0, 1.0);
            out.push(p);
        }
        Ok(out)
    }

    pub fn fixed_points(&self, tolerance: f64) -> Result<Vec<FixedPoint>, MeanFieldError> {
        self.fixed_points_with(tolerance, DEFAULT_BRACKETS)
    }

    /// Roots of `f(p) - p` on [0, 1]: exact zeros at partition points plus
    /// bisection of every sign change.
    pub fn fixed_points_with(&self, tolerance: f64, brackets: usize) -> Result<Vec<FixedPoint>, MeanFieldError> {
        if !(tolerance > 0.0) {
            return Err(MeanFieldError::Tolerance(tolerance));
        }
        let brackets = brackets.max(1);
        let g = |p: f64| self.eval(p) - p;
        let mut roots: Vec<f64> = Vec::new();
        let mut prev = (0.0, g(0.0));
        if prev.1 == 0.0 {
            roots.push(0.0);
        }
        for i in 1..=brackets {
            let x = i as f64 / brackets as f64;
            let gx = g(x);
            if gx == 0.0 {
                roots.push(x);
            } else if prev.1 != 0.0 && prev.1.signum() != gx.signum() {
                roots.push(bisect(&g, prev.0, x, prev.1, tolerance));
            }
            prev = (x, gx);
        }
        roots.dedup_by(|a, b| (*a - *b).abs() <= tolerance);
        Ok(roots
            .into_iter()
            .map(|p| {
                let derivative = self.derivative(p);
                let stability = if derivative.abs() <= 1e-12 {
                    Stability::SuperStable
                } else if derivative.abs() < 1.0 {
                    Stability::Stable
                } else {
                    Stability::Unstable
                };
                FixedPoint { p, derivative, stability }
            })
            .collect())
    }

    /// `p<TAB>f(p)` lines for `samples + 1` evenly spaced p in [0, 1].
    pub fn iteration_map(&self, samples: usize) -> String {
        let samples = samples.max(1);
        let mut out = String::from("p\tp_next\n");
        for i in 0..=samples {
            let p = i as f64 / samples as f64;
            out.push_str(&format!("{p:.6}\t{:.9}\n", self.eval(p)));
        }
        out
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, tolerance: f64) -> f64 {
    // Shrink well below the tolerance so the residual bound also holds.
    let width = tolerance * 1e-3;
    for _ in 0..200 {
        if b - a <= width {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

impl fmt::Display for MeanFieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}", t.coef)?;
            for (sym, e) in [("p", t.p_exp), ("q", t.q_exp)] {
                match e {
                    0 => {}
                    1 => write!(f, "·{sym}")?,
                    _ => write!(f, "·{sym}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

/// Densities of `trials` independent Bernoulli(`p0`) soups on a `width` x
/// `height` torus over `steps` generations (generation 0 included). Trial
/// `i` draws from ChaCha8 seeded with `seed + i`.
pub fn monte_carlo_density(
    rule: &RuleSpec,
    p0: f64,
    (width, height): (usize, usize),
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<DensityPoint>, MeanFieldError> {
    check_probability(p0)?;
    if trials == 0 {
        return Err(MeanFieldError::NoTrials);
    }
    let cells = (width * height) as f64;
    let runs: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<f64>, GridError> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
            let mut grid = Grid::bernoulli_torus(width, height, p0, &mut rng)?;
            let mut densities = Vec::with_capacity(steps + 1);
            densities.push(grid.population() as f64 / cells);
            for _ in 0..steps {
                grid.advance(rule)?;
                densities.push(grid.population() as f64 / cells);
            }
            Ok(densities)
        })
        .collect::<Result<_, _>>()?;

    let n = trials as f64;
    Ok((0..=steps)
        .map(|t| {
            let mean = runs.iter().map(|r| r[t]).sum::<f64>() / n;
            let std = if trials > 1 {
                (runs.iter().map(|r| (r[t] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            DensityPoint { generation: t as u64, mean, std }
        })
        .collect())
}
