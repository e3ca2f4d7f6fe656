//! Dense two-phase primal simplex for `min cᵀz  s.t.  A z = r, z >= 0`.
//!
//! Sized for problems with few rows and many columns. Dantzig pricing, falling back to
//! Bland's rule after a run of degenerate pivots. The final basic solution is recomputed
//! from the original data with a fresh LU solve.

use alloc::vec;
use alloc::vec::Vec;

const PIVOT_EPS: f64 = 1e-12;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpError {
    /// Pivot budget exhausted; `residual` is the phase-one infeasibility at that point.
    IterationLimit { iterations: usize, residual: f64 },
    Infeasible { residual: f64 },
    Unbounded,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LpOptions {
    /// Reduced costs above `-optimality_tol` count as non-negative.
    pub optimality_tol: f64,
    /// Largest phase-one objective still accepted as feasible (relative to `max(1, |r|)`).
    pub feasibility_tol: f64,
    pub max_pivots: usize,
}

struct Tableau {
    rows: usize,
    cols: usize,
    // rows x (cols + 1), last column is the right-hand side
    t: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let w = self.cols + 1;
        let p = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= p;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.t[r * w + pc];
            if factor != 0.0 {
                for (c, pv) in prow.iter().enumerate() {
                    self.t[r * w + c] -= factor * pv;
                }
            }
        }
        let factor = obj[pc];
        if factor != 0.0 {
            for (c, pv) in prow.iter().enumerate() {
                obj[c] -= factor * pv;
            }
        }
        self.basis[pr] = pc;
    }

    /// Runs simplex iterations on the reduced-cost row `obj` (length `cols + 1`, last
    /// entry minus the objective). Columns flagged in `blocked` never enter.
    fn optimize(
        &mut self,
        obj: &mut [f64],
        blocked: &[bool],
        opts: &LpOptions,
        pivots: &mut usize,
    ) -> Result<(), LpError> {
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let mut entering = None;
            let mut best = -opts.optimality_tol;
            for c in 0..self.cols {
                if blocked[c] || obj[c] >= best {
                    continue;
                }
                entering = Some(c);
                if bland {
                    break;
                }
                best = obj[c];
            }
            let Some(pc) = entering else {
                return Ok(());
            };

            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r).max(0.0) / a;
                    let better = match leaving {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - PIVOT_EPS
                                || (ratio <= lratio + PIVOT_EPS && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leaving else {
                return Err(LpError::Unbounded);
            };
            if *pivots >= opts.max_pivots {
                return Err(LpError::IterationLimit {
                    iterations: *pivots,
                    residual: 0.0,
                });
            }
            degenerate_run = if ratio <= PIVOT_EPS { degenerate_run + 1 } else { 0 };
            self.pivot(pr, pc, obj);
            *pivots += 1;
        }
    }
}

/// `a` is row-major with `rows` rows of length `cols`.
pub(crate) fn solve(
    a: &[f64],
    rows: usize,
    cols: usize,
    rhs: &[f64],
    cost: &[f64],
    opts: &LpOptions,
) -> Result<LpSolution, LpError> {
    assert_eq!(a.len(), rows * cols);
    assert_eq!(rhs.len(), rows);
    assert_eq!(cost.len(), cols);

    // phase one: [A | I] with artificial columns, rows flipped so r >= 0
    let total = cols + rows;
    let w = total + 1;
    let mut t = vec![0.0; rows * w];
    for r in 0..rows {
        let flip = if rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..cols {
            t[r * w + c] = flip * a[r * cols + c];
        }
        t[r * w + cols + r] = 1.0;
        t[r * w + total] = flip * rhs[r];
    }
    let mut tab = Tableau {
        rows,
        cols: total,
        t,
        basis: (cols..total).collect(),
    };

    let mut obj = vec![0.0; w];
    for r in 0..rows {
        for c in 0..w {
            if c < cols || c == total {
                obj[c] -= tab.t[r * w + c];
            }
        }
    }
    let mut pivots = 0usize;
    let open = vec![false; total];
    match tab.optimize(&mut obj, &open, opts, &mut pivots) {
        Ok(()) => {}
        Err(LpError::IterationLimit { iterations, .. }) => {
            return Err(LpError::IterationLimit {
                iterations,
                residual: -obj[total],
            })
        }
        Err(e) => return Err(e),
    }
    let rhs_scale = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let infeasibility = -obj[total];
    if infeasibility > opts.feasibility_tol * rhs_scale {
        return Err(LpError::Infeasible {
            residual: infeasibility,
        });
    }

    // drive remaining artificials out of the basis where possible
    let mut redundant = vec![false; rows];
    for r in 0..rows {
        if tab.basis[r] >= cols {
            let pc = (0..cols)
                .filter(|&c| tab.at(r, c).abs() > 1e-9)
                .max_by(|&i, &j| tab.at(r, i).abs().total_cmp(&tab.at(r, j).abs()));
            match pc {
                Some(pc) => {
                    tab.pivot(r, pc, &mut obj);
                    pivots += 1;
                }
                None => redundant[r] = true,
            }
        }
    }

    // phase two
    let mut obj = vec![0.0; w];
    obj[..cols].copy_from_slice(cost);
    for r in 0..rows {
        let b = tab.basis[r];
        if b < cols && cost[b] != 0.0 {
            let cb = cost[b];
            for c in 0..w {
                obj[c] -= cb * tab.t[r * w + c];
            }
        }
    }
    let mut blocked = vec![false; total];
    for flag in blocked.iter_mut().skip(cols) {
        *flag = true;
    }
    tab.optimize(&mut obj, &blocked, opts, &mut pivots)
        .map_err(|e| match e {
            LpError::IterationLimit { iterations, .. } => LpError::IterationLimit {
                iterations,
                residual: 0.0,
            },
            other => other,
        })?;

    // recompute the basic solution from the original rows
    let live: Vec<usize> = (0..rows).filter(|&r| !redundant[r]).collect();
    let basis: Vec<usize> = live.iter().map(|&r| tab.basis[r]).collect();
    let n = live.len();
    let mut m = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for (i, &r) in live.iter().enumerate() {
        for (j, &c) in basis.iter().enumerate() {
            m[i * n + j] = a[r * cols + c];
        }
        b[i] = rhs[r];
    }
    let xb = lu_solve(&mut m, &mut b, n).unwrap_or_else(|| live.iter().map(|&r| tab.rhs(r)).collect());
    let mut x = vec![0.0; cols];
    for (j, &c) in basis.iter().enumerate() {
        x[c] = xb[j].max(0.0);
    }
    let objective = x.iter().zip(cost).map(|(xi, ci)| xi * ci).sum();
    Ok(LpSolution {
        x,
        objective,
        pivots,
    })
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn lu_solve(m: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))?;
        if m[p * n + k].abs() < 1e-14 {
            return None;
        }
        if p != k {
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        for r in k + 1..n {
            let f = m[r * n + k] / m[k * n + k];
            if f != 0.0 {
                for c in k..n {
                    m[r * n + c] -= f * m[k * n + c];
                }
                b[r] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| m[k * n + c] * x[c]).sum();
        x[k] = (b[k] - s) / m[k * n + k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> LpOptions {
        LpOptions {
            optimality_tol: 1e-12,
            feasibility_tol: 1e-9,
            max_pivots: 1000,
        }
    }

    #[test]
    fn small_textbook_problem() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6 → x = 8/5, y = 6/5
        let a = [1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0];
        let sol = solve(&a, 2, 4, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0], &opts()).unwrap();
        assert!((sol.x[0] - 1.6).abs() < 1e-12);
        assert!((sol.x[1] - 1.2).abs() < 1e-12);
        assert!((sol.objective + 2.8).abs() < 1e-12);
    }

    #[test]
    fn l1_of_a_difference() {
        // min u + v  s.t. u - v = -3 → v = 3
        let sol = solve(&[1.0, -1.0], 1, 2, &[-3.0], &[1.0, 1.0], &opts()).unwrap();
        assert_eq!(sol.x, vec![0.0, 3.0]);
        assert_eq!(sol.objective, 3.0);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        // x = -1 with x >= 0
        assert!(matches!(
            solve(&[1.0], 1, 1, &[-1.0], &[0.0], &opts()),
            Err(LpError::Infeasible { .. })
        ));
        // min -x s.t. x - y = 0
        assert_eq!(
            solve(&[1.0, -1.0], 1, 2, &[0.0], &[-1.0, 0.0], &opts()).unwrap_err(),
            LpError::Unbounded
        );
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = [1.0, 1.0, 2.0, 2.0];
        let sol = solve(&a, 2, 2, &[1.0, 2.0], &[1.0, 2.0], &opts()).unwrap();
        assert_eq!(sol.x, vec![1.0, 0.0]);
    }
}
