//! Projected ascent for `sup ∫ f(|u|)G(α|u|^{1/(1−s)})` over
//! piecewise-linear `u` on a uniform grid with zero end values, subject to
//! `[u]^p ≤ 1` or `‖u‖_p^p + [u]^p ≤ 1`.
//!
//! Each step moves along the gradient of the discretised objective taken
//! in the metric of the `s = 1/2` seminorm (plus the mass matrix), rescales
//! into the constraint set, and halves the step until the objective does
//! not decrease. Accepted steps double the next trial step.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::constants::Params;
use crate::error::{Error, Result};
use crate::function_models::GridFunction;
use crate::linalg::{dot, matvec, Cholesky};
use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::report::{Cell, ScanReport};
use crate::seminorm::{gagliardo_p_pl, QuadraticSeminorm};

use super::{MTConfig, Normalization};

const MAX_HALVINGS: usize = 60;
const STALL_ITERS: usize = 5;
const STALL_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalOptions {
    pub n_cells: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub interval: (f64, f64),
    /// Start from `u = 0` instead of seeded random values.
    pub zero_start: bool,
}

impl ExtremalOptions {
    pub fn new(n_cells: usize, max_iters: usize, seed: u64) -> Self {
        Self {
            n_cells,
            max_iters,
            seed,
            interval: (-1.0, 1.0),
            zero_start: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub objective: f64,
    pub constraint_norm: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub best: GridFunction,
    pub objective: f64,
    pub trace: Vec<TraceRow>,
    pub converged: bool,
}

impl ExtremalResult {
    pub fn trace_report(&self) -> ScanReport {
        let mut r = ScanReport::new(&["iter", "objective", "constraint_norm", "step"]);
        for t in &self.trace {
            r.push_row(vec![
                Cell::from(t.iter),
                Cell::Num(t.objective),
                Cell::Num(t.constraint_norm),
                Cell::Num(t.step),
            ]);
        }
        r.set_meta("objective", self.objective);
        r.set_meta("converged", self.converged);
        r
    }
}

enum Constraint {
    Quadratic(Vec<f64>),
    General {
        nodes: Vec<f64>,
        params: Params,
        with_mass: bool,
    },
}

struct Problem<'a> {
    config: &'a MTConfig,
    h: f64,
    m: usize,
    constraint: Constraint,
    metric: Cholesky,
    metric_matrix: Vec<f64>,
}

fn interior(full: &[f64], n: usize) -> Vec<f64> {
    let m = n - 2;
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        out[i * m..(i + 1) * m].copy_from_slice(&full[(i + 1) * n + 1..(i + 1) * n + 1 + m]);
    }
    out
}

fn mass_matrix(m: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        out[i * m + i] = 2.0 * h / 3.0;
        if i + 1 < m {
            out[i * m + i + 1] = h / 6.0;
            out[(i + 1) * m + i] = h / 6.0;
        }
    }
    out
}

impl Problem<'_> {
    fn full(&self, u: &[f64]) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.m + 2);
        v.push(0.0);
        v.extend_from_slice(u);
        v.push(0.0);
        v
    }

    fn objective(&self, u: &[f64]) -> f64 {
        let rule = gauss_legendre(4);
        let v = self.full(u);
        let cells: Vec<f64> = v
            .windows(2)
            .map(|w| {
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(x, wt)| {
                        let t = 0.5 * (1.0 + x);
                        0.5 * wt * self.config.density((w[0] + t * (w[1] - w[0])).abs())
                    })
                    .sum::<f64>()
            })
            .collect();
        self.h * pairwise_sum(&cells)
    }

    fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let rule = gauss_legendre(4);
        let v = self.full(u);
        let mut g = vec![0.0; v.len()];
        for c in 0..v.len() - 1 {
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                let t = 0.5 * (1.0 + x);
                let val = v[c] + t * (v[c + 1] - v[c]);
                let d =
                    self.config.density_derivative(val.abs()) * val.signum() * 0.5 * wt * self.h;
                g[c] += d * (1.0 - t);
                g[c + 1] += d * t;
            }
        }
        g[1..=self.m].to_vec()
    }

    /// Constraint quantity, homogeneous of degree `p`.
    fn constraint(&self, u: &[f64]) -> Result<f64> {
        match &self.constraint {
            Constraint::Quadratic(a) => Ok(dot(&matvec(a, u), u)),
            Constraint::General {
                nodes,
                params,
                with_mass,
            } => {
                let g = GridFunction::new(nodes.clone(), self.full(u))?;
                let mut c = gagliardo_p_pl(&g, *params)?.value;
                if *with_mass {
                    c += g.lp_norm_p_exact(params.p());
                }
                Ok(c)
            }
        }
    }

    /// Rescale into the constraint set; returns the point and its norm.
    fn project(&self, mut u: Vec<f64>) -> Result<(Vec<f64>, f64)> {
        let p = self.config.params.p();
        let c = self.constraint(&u)?.max(0.0);
        let norm = c.powf(1.0 / p);
        if norm > 1.0 {
            for x in &mut u {
                *x /= norm;
            }
            let after = self.constraint(&u)?.max(0.0).powf(1.0 / p);
            return Ok((u, after));
        }
        Ok((u, norm))
    }

    fn metric_norm_sq(&self, d: &[f64]) -> f64 {
        dot(&matvec(&self.metric_matrix, d), d)
    }
}

/// Maximise the discretised functional over the constraint set fixed by
/// `config.normalization`.
pub fn extremal_search(config: &MTConfig, opts: &ExtremalOptions) -> Result<ExtremalResult> {
    let (a, b) = opts.interval;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::input(format!(
            "search interval must be finite with a < b, got ({a}, {b})"
        )));
    }
    if opts.n_cells < 2 {
        return Err(Error::input("extremal search needs at least two cells"));
    }
    let with_mass = match config.normalization {
        Normalization::Seminorm => false,
        Normalization::FullNorm => true,
        Normalization::None => {
            return Err(Error::input(
                "extremal search needs a seminorm or full-norm constraint",
            ))
        }
    };
    let n = opts.n_cells + 1;
    let m = n - 2;
    let h = (b - a) / opts.n_cells as f64;
    let nodes: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
        .collect();
    let half = Params::new(0.5)?;
    let mut metric_matrix = interior(QuadraticSeminorm::assemble(&nodes, half)?.matrix(), n);
    let mass = mass_matrix(m, h);
    if with_mass {
        for (x, y) in metric_matrix.iter_mut().zip(&mass) {
            *x += y;
        }
    }
    let constraint = if config.params.p() == 2.0 {
        Constraint::Quadratic(metric_matrix.clone())
    } else {
        Constraint::General {
            nodes: nodes.clone(),
            params: config.params,
            with_mass,
        }
    };
    let metric = Cholesky::factor(&metric_matrix, m)?;
    let problem = Problem {
        config,
        h,
        m,
        constraint,
        metric,
        metric_matrix,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let start: Vec<f64> = if opts.zero_start {
        vec![0.0; m]
    } else {
        (0..m).map(|_| rng.gen::<f64>()).collect()
    };
    let (mut u, mut norm) = problem.project(start)?;
    let mut value = problem.objective(&u);
    let mut trace = vec![TraceRow {
        iter: 0,
        objective: value,
        constraint_norm: norm,
        step: 0.0,
    }];
    let mut step: Option<f64> = None;
    let mut stall = 0usize;
    let mut perturbed = false;
    let mut converged = false;

    for iter in 1..=opts.max_iters {
        let grad = problem.gradient(&u);
        if grad.iter().all(|&g| g == 0.0) {
            if u.iter().all(|&x| x == 0.0) && !perturbed {
                perturbed = true;
                let kick: Vec<f64> = (0..m).map(|_| 1e-3 * rng.gen::<f64>()).collect();
                let (cand, cand_norm) = problem.project(kick)?;
                let cand_value = problem.objective(&cand);
                if cand_value >= value {
                    u = cand;
                    norm = cand_norm;
                    value = cand_value;
                    trace.push(TraceRow {
                        iter,
                        objective: value,
                        constraint_norm: norm,
                        step: 0.0,
                    });
                    continue;
                }
            }
            converged = true;
            break;
        }
        let dir = problem.metric.solve(&grad);
        let dir_norm = problem.metric_norm_sq(&dir).sqrt();
        let mut eta = step.unwrap_or_else(|| {
            let u_norm = problem.metric_norm_sq(&u).sqrt();
            0.5 * u_norm.max(1e-2) / dir_norm
        });
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x + eta * d).collect();
            let (cand, cand_norm) = problem.project(cand)?;
            let cand_value = problem.objective(&cand);
            if cand_value >= value {
                accepted = Some((cand, cand_norm, cand_value));
                break;
            }
            eta *= 0.5;
        }
        let Some((cand, cand_norm, cand_value)) = accepted else {
            converged = true;
            break;
        };
        let gain = cand_value - value;
        u = cand;
        norm = cand_norm;
        value = cand_value;
        trace.push(TraceRow {
            iter,
            objective: value,
            constraint_norm: norm,
            step: eta,
        });
        step = Some(2.0 * eta);
        if gain <= STALL_REL * value.abs() {
            stall += 1;
            if stall >= STALL_ITERS {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    let best = GridFunction::new(nodes, problem.full(&u))?;
    Ok(ExtremalResult {
        best,
        objective: value,
        trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mt_functional::Variant;

    fn half() -> Params {
        Params::new(0.5).unwrap()
    }

    #[test]
    fn alpha_zero_is_constant() {
        let cfg =
            MTConfig::new(0.0, half(), Normalization::Seminorm, Variant::ExpInterval).unwrap();
        let r = extremal_search(&cfg, &ExtremalOptions::new(16, 50, 1)).unwrap();
        assert!((r.objective - 2.0).abs() < 1e-14);
        assert!(r.converged);
        assert!(r.trace.len() <= 2);
        let cfg = MTConfig::new(0.0, half(), Normalization::Seminorm, Variant::PhiLine).unwrap();
        let r = extremal_search(&cfg, &ExtremalOptions::new(16, 50, 1)).unwrap();
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn trace_is_monotone_and_feasible() {
        let cfg =
            MTConfig::new(2.0, half(), Normalization::Seminorm, Variant::ExpInterval).unwrap();
        let r = extremal_search(&cfg, &ExtremalOptions::new(24, 200, 7)).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].objective >= w[0].objective));
        assert!(r.trace.iter().all(|t| t.constraint_norm <= 1.0 + 1e-9));
        let semi = gagliardo_p_pl(&r.best, half()).unwrap().value;
        assert!(semi <= 1.0 + 1e-9);
    }

    #[test]
    fn zero_start_escapes_for_phi() {
        let cfg = MTConfig::new(2.0, half(), Normalization::Seminorm, Variant::PhiLine).unwrap();
        let mut opts = ExtremalOptions::new(16, 100, 3);
        opts.zero_start = true;
        let r = extremal_search(&cfg, &opts).unwrap();
        assert!(r.objective > 0.0);
        assert!(r.trace.windows(2).all(|w| w[1].objective >= w[0].objective));
    }

    #[test]
    fn rejects_unnormalised() {
        let cfg = MTConfig::new(1.0, half(), Normalization::None, Variant::ExpInterval).unwrap();
        assert_eq!(
            extremal_search(&cfg, &ExtremalOptions::new(8, 5, 0))
                .unwrap_err()
                .kind(),
            "input"
        );
    }
}
