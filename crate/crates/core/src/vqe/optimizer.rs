//! Derivative-free local minimizers.
//!
//! `CobylaLike` is an unconstrained linear-approximation trust-region method: a linear model
//! interpolates `n + 1` points, a step of length `rho` goes down the model gradient, and `rho`
//! shrinks from `rho_begin` to `rho_end` when steps stop paying off. `NelderMead` is the
//! classic simplex method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Optimizer {
    CobylaLike { rho_begin: f64, rho_end: f64 },
    NelderMead { initial_step: f64, f_tol: f64, x_tol: f64 },
}

impl Default for Optimizer {
    fn default() -> Self {
        Optimizer::CobylaLike { rho_begin: 1.0, rho_end: 1e-4 }
    }
}

impl Optimizer {
    pub fn nelder_mead() -> Self {
        Optimizer::NelderMead { initial_step: 0.5, f_tol: 1e-10, x_tol: 1e-6 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Optimizer::CobylaLike { rho_begin, rho_end } => rho_end > 0.0 && rho_begin >= rho_end && rho_begin.is_finite(),
            Optimizer::NelderMead { initial_step, f_tol, x_tol } => {
                initial_step > 0.0 && f_tol > 0.0 && x_tol > 0.0 && initial_step.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("optimizer tolerances must be positive and ordered: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Every objective evaluation in call order.
    pub trace: Vec<f64>,
    pub converged: bool,
}

/// Counts evaluations, records the trace, tracks the best point, enforces the budget.
struct Tracker<'a> {
    f: &'a mut dyn FnMut(&[f64]) -> Result<f64>,
    budget: usize,
    trace: Vec<f64>,
    best: (Vec<f64>, f64),
}

impl Tracker<'_> {
    fn exhausted(&self) -> bool {
        self.trace.len() >= self.budget
    }

    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.f)(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteObjective { evaluation: self.trace.len(), value: v });
        }
        self.trace.push(v);
        if v < self.best.1 {
            self.best = (x.to_vec(), v);
        }
        Ok(v)
    }
}

/// Minimizes `f` from `x0`, spending at most `max_evals` evaluations (the start point is
/// always evaluated, so the trace is never empty).
pub fn minimize(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    optimizer: Optimizer,
    max_evals: usize,
) -> Result<Minimum> {
    if x0.is_empty() {
        return Err(Error::Config("cannot optimize over zero parameters".into()));
    }
    optimizer.validate()?;
    let mut t = Tracker { f, budget: max_evals.max(1), trace: Vec::new(), best: (x0.to_vec(), f64::INFINITY) };
    let f0 = t.eval(x0)?;
    let converged = match optimizer {
        Optimizer::CobylaLike { rho_begin, rho_end } => linear_trust_region(&mut t, x0, f0, rho_begin, rho_end)?,
        Optimizer::NelderMead { initial_step, f_tol, x_tol } => nelder_mead(&mut t, x0, f0, initial_step, f_tol, x_tol)?,
    };
    let (x, value) = t.best;
    Ok(Minimum { x, value, trace: t.trace, converged })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Solves `A g = b` by Gaussian elimination with partial pivoting; `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut g = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * g[k]).sum();
        g[row] = (b[row] - s) / a[row][row];
    }
    Some(g)
}

fn linear_trust_region(t: &mut Tracker, x0: &[f64], f0: f64, rho_begin: f64, rho_end: f64) -> Result<bool> {
    let n = x0.len();
    let mut rho = rho_begin;
    let mut base = (x0.to_vec(), f0);
    // Interpolation points other than the base.
    let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n);

    'outer: loop {
        // (Re)build a coordinate stencil around the base when geometry is stale.
        if pts.len() < n || pts.iter().any(|(p, _)| dist(p, &base.0) > 2.0 * rho) {
            pts.clear();
            for i in 0..n {
                if t.exhausted() {
                    break 'outer;
                }
                let mut p = base.0.clone();
                p[i] += rho;
                let v = t.eval(&p)?;
                pts.push((p, v));
            }
            if let Some(k) = (0..n).min_by(|&a, &b| pts[a].1.total_cmp(&pts[b].1)).filter(|&k| pts[k].1 < base.1) {
                std::mem::swap(&mut pts[k], &mut base);
            }
        }
        let a: Vec<Vec<f64>> = pts.iter().map(|(p, _)| p.iter().zip(&base.0).map(|(x, b)| x - b).collect()).collect();
        let d: Vec<f64> = pts.iter().map(|(_, v)| v - base.1).collect();
        let Some(g) = solve(a, d) else {
            pts.clear();
            continue;
        };
        let gnorm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm == 0.0 {
            if rho <= rho_end {
                return Ok(true);
            }
            rho = (rho / 2.0).max(rho_end);
            pts.clear();
            continue;
        }
        if t.exhausted() {
            break;
        }
        let trial: Vec<f64> = base.0.iter().zip(&g).map(|(x, gi)| x - rho * gi / gnorm).collect();
        let ft = t.eval(&trial)?;
        let predicted = rho * gnorm;
        let ratio = (base.1 - ft) / predicted;
        // Drop the interpolation point farthest from the new point.
        let far = (0..n)
            .max_by(|&i, &j| dist(&pts[i].0, &trial).total_cmp(&dist(&pts[j].0, &trial)))
            .expect("n >= 1");
        if ft < base.1 {
            pts[far] = std::mem::replace(&mut base, (trial, ft));
        } else {
            pts[far] = (trial, ft);
        }
        if ratio < 0.1 {
            if rho <= rho_end {
                return Ok(true);
            }
            rho = (rho / 2.0).max(rho_end);
        } else if ratio > 0.7 {
            rho = (rho * 1.5).min(rho_begin);
        }
        if t.exhausted() {
            break;
        }
    }
    Ok(false)
}

fn nelder_mead(t: &mut Tracker, x0: &[f64], f0: f64, step: f64, f_tol: f64, x_tol: f64) -> Result<bool> {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        if t.exhausted() {
            return Ok(false);
        }
        let mut p = x0.to_vec();
        p[i] += step;
        let v = t.eval(&p)?;
        simplex.push((p, v));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let along = |c: &[f64], w: &[f64], k: f64| -> Vec<f64> { c.iter().zip(w).map(|(ci, wi)| ci + k * (wi - ci)).collect() };
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..].iter().map(|(p, _)| dist(p, &simplex[0].0)).fold(0.0, f64::max);
        if spread <= f_tol && size <= x_tol {
            return Ok(true);
        }
        if t.exhausted() {
            return Ok(false);
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let xr = along(&centroid, &worst.0, -alpha);
        let fr = t.eval(&xr)?;
        if fr < simplex[0].1 {
            if t.exhausted() {
                simplex[n] = (xr, fr);
                continue;
            }
            let xe = along(&centroid, &worst.0, -gamma);
            let fe = t.eval(&xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            if t.exhausted() {
                continue;
            }
            let (xc, fc) = if fr < worst.1 {
                let xc = along(&centroid, &worst.0, -rho);
                let fc = t.eval(&xc)?;
                (xc, fc)
            } else {
                let xc = along(&centroid, &worst.0, rho);
                let fc = t.eval(&xc)?;
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    if t.exhausted() {
                        break;
                    }
                    let p = along(&best, &v.0, sigma);
                    let fv = t.eval(&p)?;
                    *v = (p, fv);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both() -> [Optimizer; 2] {
        [Optimizer::default(), Optimizer::nelder_mead()]
    }

    #[test]
    fn convex_quadratic_within_100() {
        for opt in both() {
            let mut f = |x: &[f64]| Ok((x[0] - 1.0).powi(2));
            let m = minimize(&mut f, &[0.0], opt, 100).unwrap();
            assert!((m.x[0] - 1.0).abs() <= 1e-3, "{opt:?}: {:?}", m.x);
            assert!(m.trace.len() <= 100);
        }
    }

    #[test]
    fn rosenbrock_within_500() {
        let mut f = |x: &[f64]| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let m = minimize(&mut f, &[-1.0, 1.0], Optimizer::nelder_mead(), 500).unwrap();
        assert!(m.value < 1e-2, "{}", m.value);
        assert!(m.trace.len() <= 500);
    }

    #[test]
    fn trace_counts_every_evaluation() {
        let mut calls = 0;
        let mut f = |x: &[f64]| {
            calls += 1;
            Ok(x.iter().map(|v| v * v).sum())
        };
        let m = minimize(&mut f, &[1.0, -2.0, 0.5], Optimizer::default(), 37).unwrap();
        assert_eq!(m.trace.len(), calls);
        assert!(calls <= 37);
    }

    #[test]
    fn zero_budget_evaluates_start_once() {
        let mut f = |_: &[f64]| Ok(3.0);
        let m = minimize(&mut f, &[0.2], Optimizer::default(), 0).unwrap();
        assert_eq!((m.trace.clone(), m.x), (vec![3.0], vec![0.2]));
    }

    #[test]
    fn non_finite_aborts() {
        let mut f = |x: &[f64]| Ok(if x[0] > 0.5 { f64::NAN } else { -x[0] });
        let e = minimize(&mut f, &[0.0], Optimizer::default(), 50).unwrap_err();
        assert!(matches!(e, Error::NonFiniteObjective { .. }));
    }

    #[test]
    fn bad_tolerances_rejected() {
        let mut f = |_: &[f64]| Ok(0.0);
        let opt = Optimizer::CobylaLike { rho_begin: 0.1, rho_end: 0.0 };
        assert!(minimize(&mut f, &[0.0], opt, 10).is_err());
    }
}
