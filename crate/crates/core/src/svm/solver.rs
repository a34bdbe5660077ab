//! SMO solver for the C-SVC dual
//!
//! ```text
//! min_α  ½ Σ_i Σ_j α_i α_j y_i y_j K(x_i, x_j) − Σ_j α_j
//! s.t.   Σ_i α_i y_i = 0,   0 ≤ α_i ≤ C
//! ```
//!
//! Each iteration picks the maximal violating index `i` and the partner `j`
//! giving the largest second-order decrease of the objective, then solves
//! the two-variable subproblem analytically and clips it back onto the box.
//! Iteration stops when the violating-pair gap drops below the tolerance.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::SvmError;
use crate::corpus::shuffle;
use crate::sparse::SparseVector;

/// Curvature floor for non-positive-definite pairs.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seeds the scan order used by working-set selection, which decides
    /// ties between equally violating indices.
    pub seed: u64,
    /// Kernel column cache budget in MiB; 0 disables caching.
    pub cache_mb: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-3,
            max_iterations: 10_000_000,
            seed: 0,
            cache_mb: 100,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(SvmError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(SvmError::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-point KKT residuals of a dual solution, measured on `y_i f(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub max_residual: f64,
    pub worst_index: usize,
    pub n_zero: usize,
    pub n_free: usize,
    pub n_bound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub objective: f64,
    pub iterations: usize,
    /// Violating-pair gap at the last iterate.
    pub gap: f64,
    pub kkt: KktReport,
}

/// LRU cache of kernel matrix columns.
pub(crate) struct KernelCache<'a> {
    rows: &'a [SparseVector],
    kernel: KernelSpec,
    capacity: usize,
    columns: HashMap<usize, (Rc<[f64]>, u64)>,
    clock: u64,
    pub(crate) misses: usize,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(rows: &'a [SparseVector], kernel: KernelSpec, cache_mb: usize) -> Self {
        let n = rows.len().max(1);
        let capacity = if cache_mb == 0 {
            0
        } else {
            ((cache_mb << 20) / (8 * n)).max(2)
        };
        KernelCache {
            rows,
            kernel,
            capacity,
            columns: HashMap::new(),
            clock: 0,
            misses: 0,
        }
    }

    fn compute(&self, i: usize) -> Rc<[f64]> {
        let xi = &self.rows[i];
        self.rows
            .iter()
            .map(|xk| self.kernel.eval_unchecked(xi, xk))
            .collect()
    }

    pub(crate) fn column(&mut self, i: usize) -> Rc<[f64]> {
        self.clock += 1;
        if let Some((col, stamp)) = self.columns.get_mut(&i) {
            *stamp = self.clock;
            return Rc::clone(col);
        }
        self.misses += 1;
        let col = self.compute(i);
        if self.capacity > 0 {
            if self.columns.len() >= self.capacity {
                let oldest = self
                    .columns
                    .iter()
                    .min_by_key(|(_, (_, stamp))| *stamp)
                    .map(|(&k, _)| k)
                    .expect("cache is non-empty");
                self.columns.remove(&oldest);
            }
            self.columns.insert(i, (Rc::clone(&col), self.clock));
        }
        col
    }
}

/// Dual objective from the gradient `G = Qα − 1`: `½ Σ α_i (G_i − 1)`.
fn objective_from_gradient(alpha: &[f64], grad: &[f64]) -> f64 {
    0.5 * alpha
        .iter()
        .zip(grad)
        .map(|(a, g)| a * (g - 1.0))
        .sum::<f64>()
}

/// Solves the dual for `rows` with targets `y ∈ {−1, +1}`.
pub fn solve_dual(
    rows: &[SparseVector],
    y: &[f64],
    c: f64,
    kernel: &KernelSpec,
    config: &SolverConfig,
) -> Result<DualSolution, SvmError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(SvmError::InvalidC(c));
    }
    kernel.validate()?;
    config.validate()?;
    if rows.len() != y.len() {
        return Err(SvmError::InvalidConfig(format!(
            "{} rows but {} targets",
            rows.len(),
            y.len()
        )));
    }
    if y.iter().any(|&t| t != 1.0 && t != -1.0) {
        return Err(SvmError::InvalidConfig("targets must be -1 or +1".into()));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(SvmError::SingleClass);
    }
    if let Some(bad) = rows.iter().find(|r| r.dim() != rows[0].dim()) {
        return Err(SvmError::DimensionMismatch {
            expected: rows[0].dim(),
            found: bad.dim(),
        });
    }

    let n = rows.len();
    let diag: Vec<f64> = rows.iter().map(|x| kernel.eval_unchecked(x, x)).collect();
    let mut cache = KernelCache::new(rows, *kernel, config.cache_mb);
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, config.seed);

    let mut alpha = vec![0.0f64; n];
    let mut grad = vec![-1.0f64; n];
    let at_upper = |a: f64| a >= c;
    let at_lower = |a: f64| a <= 0.0;

    #[cfg(debug_assertions)]
    let mut last_objective = 0.0f64;

    let mut iterations = 0;
    let mut gap;
    loop {
        // i: maximal violator among indices that can move up.
        let mut gmax = f64::NEG_INFINITY;
        let mut pick_i = None;
        for &t in &order {
            let v = if y[t] > 0.0 {
                (!at_upper(alpha[t])).then(|| -grad[t])
            } else {
                (!at_lower(alpha[t])).then(|| grad[t])
            };
            if let Some(v) = v {
                if v >= gmax {
                    gmax = v;
                    pick_i = Some(t);
                }
            }
        }

        let mut gmax2 = f64::NEG_INFINITY;
        let mut pick_j = None;
        let col_i = pick_i.map(|i| cache.column(i));
        if let (Some(i), Some(ki)) = (pick_i, col_i.as_deref()) {
            let mut best = f64::INFINITY;
            for &t in &order {
                let grad_diff = if y[t] > 0.0 {
                    if at_lower(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(grad[t]);
                    gmax + grad[t]
                } else {
                    if at_upper(alpha[t]) {
                        continue;
                    }
                    gmax2 = gmax2.max(-grad[t]);
                    gmax - grad[t]
                };
                if grad_diff > 0.0 {
                    let quad = diag[i] + diag[t] - 2.0 * ki[t];
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj_diff = -(grad_diff * grad_diff) / quad;
                    if obj_diff <= best {
                        best = obj_diff;
                        pick_j = Some(t);
                    }
                }
            }
        }

        gap = gmax + gmax2;
        let (i, j) = match (pick_i, pick_j) {
            (Some(i), Some(j)) if gap >= config.tolerance => (i, j),
            _ => break,
        };
        if iterations >= config.max_iterations {
            let solution = finish(&alpha, &grad, y, c, iterations, gap);
            return Err(SvmError::NotConverged(Box::new(solution)));
        }
        iterations += 1;

        let ki = col_i.expect("column of i was fetched");
        let kj = cache.column(j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let quad = diag[i] + diag[j] - 2.0 * ki[j];
        let quad = if quad > 0.0 { quad } else { TAU };

        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for k in 0..n {
            // Q_ik = y_i y_k K_ik
            grad[k] += y[k] * (y[i] * ki[k] * di + y[j] * kj[k] * dj);
        }

        #[cfg(debug_assertions)]
        {
            let obj = objective_from_gradient(&alpha, &grad);
            debug_assert!(
                obj <= last_objective + 1e-9 * last_objective.abs().max(1.0),
                "dual objective increased from {last_objective} to {obj} at iteration {iterations}"
            );
            last_objective = obj;
        }
    }

    Ok(finish(&alpha, &grad, y, c, iterations, gap.max(0.0)))
}

fn finish(
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    c: f64,
    iterations: usize,
    gap: f64,
) -> DualSolution {
    let bias = bias_from_gradient(alpha, grad, y, c);
    let kkt = kkt_report(alpha, grad, y, c, bias);
    DualSolution {
        alpha: alpha.to_vec(),
        bias,
        objective: objective_from_gradient(alpha, grad),
        iterations,
        gap,
        kkt,
    }
}

/// Mean of `−y_i G_i` over free support vectors, or the midpoint of the
/// feasible interval implied by bounded points when none is free.
fn bias_from_gradient(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for k in 0..alpha.len() {
        let yg = y[k] * grad[k];
        if alpha[k] >= c {
            if y[k] < 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else if alpha[k] <= 0.0 {
            if y[k] > 0.0 {
                upper = upper.min(yg);
            } else {
                lower = lower.max(yg);
            }
        } else {
            n_free += 1;
            free_sum += yg;
        }
    }
    let rho = if n_free > 0 {
        free_sum / n_free as f64
    } else if upper.is_finite() && lower.is_finite() {
        (upper + lower) / 2.0
    } else if upper.is_finite() {
        upper
    } else {
        lower
    };
    -rho
}

fn kkt_report(alpha: &[f64], grad: &[f64], y: &[f64], c: f64, bias: f64) -> KktReport {
    let mut report = KktReport {
        max_residual: 0.0,
        worst_index: 0,
        n_zero: 0,
        n_free: 0,
        n_bound: 0,
    };
    for k in 0..alpha.len() {
        // y_k f(x_k) from the gradient: G_k + 1 + y_k b
        let margin = grad[k] + 1.0 + y[k] * bias;
        let residual = if alpha[k] <= 0.0 {
            report.n_zero += 1;
            (1.0 - margin).max(0.0)
        } else if alpha[k] >= c {
            report.n_bound += 1;
            (margin - 1.0).max(0.0)
        } else {
            report.n_free += 1;
            (margin - 1.0).abs()
        };
        if residual > report.max_residual {
            report.max_residual = residual;
            report.worst_index = k;
        }
    }
    report
}
