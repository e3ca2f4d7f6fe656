//! Minimum total variation of the derivative over grid-piecewise-linear interpolants.
//!
//! Each data gap is split into `G` equal cells and the unknown function is linear on every
//! cell. Writing the slope of cell `k` as `d_0 + Σ_{j<=k} (u_j - v_j)` with `u, v >= 0` the
//! jumps at interior grid nodes, interpolation becomes one linear equation per gap (mean
//! cell slope equals the chord slope) and the objective `Σ (u_j + v_j)` is exactly the
//! sum of absolute second differences. The LP is solved by a dense simplex.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::simplex::{self, LpError, LpOptions};
use crate::dataset::Dataset;
use crate::plfun::PiecewiseLinear;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    pub points_per_gap: usize,
    /// Largest accepted interpolation residual, relative to `max(1, max|y|)`.
    pub tol: f64,
    /// Pivot budget.
    pub max_iters: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            points_per_gap: 64,
            tol: 1e-6,
            max_iters: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub min_tv: f64,
    pub minimizer: PiecewiseLinear,
    pub pivots: usize,
    /// Largest `|minimizer(x_i) - y_i|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    NotConverged { iterations: usize, residual: f64 },
    /// Grid nodes inside this gap are not strictly increasing in floating point.
    GridTooCoarse { gap: usize },
    InvalidOptions,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotConverged {
                iterations,
                residual,
            } => write!(
                f,
                "grid solve did not converge after {iterations} pivots (residual {residual:e})"
            ),
            Self::GridTooCoarse { gap } => {
                write!(f, "grid nodes in gap {gap} are not distinct")
            }
            Self::InvalidOptions => {
                f.write_str("points_per_gap must be at least 1 and tol must be positive")
            }
        }
    }
}

impl core::error::Error for OracleError {}

pub fn grid_tv_minimize(d: &Dataset, opts: GridOptions) -> Result<GridSolution, OracleError> {
    let g = opts.points_per_gap;
    if g == 0 || !(opts.tol > 0.0) {
        return Err(OracleError::InvalidOptions);
    }
    let pts = d.points();
    let gaps = pts.len() - 1;
    let n = g * gaps;

    let mut nodes = Vec::with_capacity(n + 1);
    for (i, w) in pts.windows(2).enumerate() {
        let (x0, x1) = (w[0].0, w[1].0);
        for k in 0..g {
            let z = x0 + (x1 - x0) * (k as f64 / g as f64);
            if nodes.last().is_some_and(|&prev| z <= prev) {
                return Err(OracleError::GridTooCoarse { gap: i });
            }
            nodes.push(z);
        }
        if x1 <= *nodes.last().unwrap() {
            return Err(OracleError::GridTooCoarse { gap: i });
        }
    }
    nodes.push(pts[gaps].0);

    // columns: p, q, then (u_j, v_j) for interior nodes j = 1..n-1
    let cols = 2 * n;
    let mut a = vec![0.0; gaps * cols];
    let mut rhs = vec![0.0; gaps];
    for i in 0..gaps {
        let row = &mut a[i * cols..(i + 1) * cols];
        row[0] = 1.0;
        row[1] = -1.0;
        let (lo, hi) = (i * g, (i + 1) * g);
        for j in 1..n {
            let count = hi.saturating_sub(j.max(lo)).min(g);
            if count > 0 {
                let c = count as f64 / g as f64;
                row[2 * j] = c;
                row[2 * j + 1] = -c;
            }
        }
        rhs[i] = (pts[i + 1].1 - pts[i].1) / (pts[i + 1].0 - pts[i].0);
    }
    let mut cost = vec![1.0; cols];
    cost[0] = 0.0;
    cost[1] = 0.0;

    let scale = rhs.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let lp = LpOptions {
        optimality_tol: 1e-10 * scale,
        feasibility_tol: 1e-9,
        max_pivots: opts.max_iters,
    };
    let sol = simplex::solve(&a, gaps, cols, &rhs, &cost, &lp).map_err(|e| match e {
        LpError::IterationLimit {
            iterations,
            residual,
        } => OracleError::NotConverged {
            iterations,
            residual,
        },
        LpError::Infeasible { residual } => OracleError::NotConverged {
            iterations: opts.max_iters,
            residual,
        },
        // the objective is bounded below by zero
        LpError::Unbounded => OracleError::NotConverged {
            iterations: opts.max_iters,
            residual: f64::INFINITY,
        },
    })?;

    let x = &sol.x;
    let mut slope = x[0] - x[1];
    let first_slope = slope;
    let mut changes = Vec::new();
    for j in 1..n {
        let jump = x[2 * j] - x[2 * j + 1];
        if jump != 0.0 {
            slope += jump;
            changes.push((nodes[j], slope));
        }
    }
    let minimizer = PiecewiseLinear::from_slope_changes(pts[0], first_slope, &changes)
        .map_err(|_| OracleError::NotConverged {
            iterations: sol.pivots,
            residual: f64::INFINITY,
        })?;
    let residual = pts
        .iter()
        .map(|&(px, py)| (minimizer.evaluate(px) - py).abs())
        .fold(0.0_f64, f64::max);
    let y_scale = pts.iter().fold(1.0_f64, |m, p| m.max(p.1.abs()));
    if !(residual <= opts.tol * y_scale) {
        return Err(OracleError::NotConverged {
            iterations: sol.pivots,
            residual,
        });
    }
    Ok(GridSolution {
        min_tv: sol.objective,
        minimizer,
        pivots: sol.pivots,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(xs: &[f64], ys: &[f64], g: usize) -> GridSolution {
        let d = Dataset::from_xy(xs, ys).unwrap();
        grid_tv_minimize(
            &d,
            GridOptions {
                points_per_gap: g,
                ..GridOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn collinear_is_affine() {
        let s = solve(&[0., 1., 2.], &[1., 3., 5.], 8);
        assert!(s.min_tv.abs() < 1e-12);
        assert!(s.minimizer.is_affine());
    }

    #[test]
    fn hand_examples() {
        let a = solve(&[0., 1., 2., 3.], &[0., 0., 1., 3.], 64);
        assert!((a.min_tv - 2.0).abs() < 1e-3);
        assert!(a.residual < 1e-9);
        let z = solve(&[0., 1., 2., 3.], &[0., 1., 0., 1.], 64);
        assert!((z.min_tv - 4.0).abs() < 1e-3);
    }

    #[test]
    fn single_cell_grid_is_connect_the_dots() {
        let s = solve(&[0., 1., 3.], &[0., 2., 1.], 1);
        assert!((s.min_tv - 2.5).abs() < 1e-12);
        assert!((s.minimizer.evaluate(2.0) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_options_and_degenerate_grids() {
        let d = Dataset::from_xy(&[0., 1.], &[0., 1.]).unwrap();
        let bad = GridOptions {
            points_per_gap: 0,
            ..GridOptions::default()
        };
        assert_eq!(grid_tv_minimize(&d, bad), Err(OracleError::InvalidOptions));

        let x0 = 1.0_f64;
        let x1 = f64::from_bits(x0.to_bits() + 2);
        let d = Dataset::from_xy(&[x0, x1], &[0., 1.]).unwrap();
        assert_eq!(
            grid_tv_minimize(&d, GridOptions::default()),
            Err(OracleError::GridTooCoarse { gap: 0 })
        );
    }
}
