//! Independent certification of the minimal total variation by a grid LP.
//!
//! The solver in [`grid`] only sees the raw data points; it never consults the
//! characterization. [`certify`] compares the two afterwards.

mod grid;
mod simplex;

pub use grid::{grid_tv_minimize, GridOptions, GridSolution, OracleError};

use crate::characterize::{Characterization, DEFAULT_MEMBERSHIP_TOL};
use crate::dataset::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    /// Closed-form minimum from the characterization.
    pub target: f64,
    /// Grid LP minimum.
    pub achieved: f64,
    /// `|achieved - target|`.
    pub gap: f64,
    pub pass: bool,
    /// Interpolation residual of the grid minimizer.
    pub residual: f64,
    pub pivots: usize,
    /// Advisory: grid minimizers can sit on an envelope edge within discretization error.
    pub minimizer_is_member: bool,
    pub points_per_gap: usize,
    pub tol: f64,
}

/// Certifies with the default grid (64 points per gap).
pub fn certify(
    d: &Dataset,
    ch: &Characterization,
    tol: f64,
) -> Result<CertificateReport, OracleError> {
    certify_with(d, ch, GridOptions::default(), tol)
}

/// Passes iff `|min_tv - C_*| <= tol * max(1, C_*)`.
pub fn certify_with(
    d: &Dataset,
    ch: &Characterization,
    opts: GridOptions,
    tol: f64,
) -> Result<CertificateReport, OracleError> {
    let sol = grid_tv_minimize(d, opts)?;
    let target = ch.minimal_tv;
    let gap = (sol.min_tv - target).abs();
    let membership_tol = DEFAULT_MEMBERSHIP_TOL.max(opts.tol);
    Ok(CertificateReport {
        target,
        achieved: sol.min_tv,
        gap,
        pass: gap <= tol * target.max(1.0),
        residual: sol.residual,
        pivots: sol.pivots,
        minimizer_is_member: ch.check(&sol.minimizer, membership_tol).is_member,
        points_per_gap: opts.points_per_gap,
        tol,
    })
}
