//! Generalization checks for members fitted to samples of a Lipschitz ground truth.
//!
//! Every member's Lipschitz norm is at most that of the chord interpolant, which is at
//! most `L = ‖f_*‖_Lip`. On the uniform design `x_i = i/m` this gives
//! `sup_[0,1] |f - f_*| <= 2L/m`. A localized argument gives the weaker `7L` and `14L/m`.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characterize::{connect_the_dots, localized_slope_bounds, Characterization};
use crate::dataset::{Curvature, Dataset, DatasetError};
use crate::plfun::{Breakpoint, PiecewiseLinear};
use crate::sample::{sample_member, SampleKnobs};

/// Absolute slack allowed on every bound.
pub const BOUND_TOL: f64 = 1e-9;
/// Dense-grid resolution for the sup error, in points per data gap.
pub const GRID_PER_GAP: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub f_star: PiecewiseLinear,
    pub lipschitz: f64,
}

impl GroundTruth {
    pub fn new(f_star: PiecewiseLinear) -> Self {
        let lipschitz = f_star.lipschitz_norm();
        Self { f_star, lipschitz }
    }

    /// Random PL function on `[0, 1]` with `pieces` pieces and Lipschitz norm exactly `l`:
    /// slopes uniform in `[-l, l]`, one of them pinned to `±l`.
    pub fn random(seed: u64, pieces: usize, l: f64) -> Self {
        let pieces = pieces.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut at: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.0..1.0)).collect();
        at.sort_by(f64::total_cmp);
        let mut slopes: Vec<f64> = (0..pieces).map(|_| rng.random_range(-l..=l)).collect();
        let pinned = rng.random_range(0..pieces);
        slopes[pinned] = if rng.random_bool(0.5) { l } else { -l };
        let changes: Vec<(f64, f64)> = at.into_iter().zip(slopes[1..].iter().copied()).collect();
        let y0 = rng.random_range(-1.0..1.0);
        let f = PiecewiseLinear::from_slope_changes((0.0, y0), slopes[0], &changes)
            .expect("finite random ground truth");
        Self::new(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    /// `x_i = i/m` for `i = 1..=m`.
    Uniform(usize),
    Explicit(Vec<f64>),
}

impl Design {
    pub fn abscissae(&self) -> Vec<f64> {
        match self {
            Self::Uniform(m) => (1..=*m).map(|i| i as f64 / *m as f64).collect(),
            Self::Explicit(xs) => xs.clone(),
        }
    }
}

pub fn make_dataset_from(gt: &GroundTruth, design: &Design) -> Result<Dataset, DatasetError> {
    let xs = design.abscissae();
    let ys: Vec<f64> = xs.iter().map(|&x| gt.f_star.evaluate(x)).collect();
    Dataset::from_xy(&xs, &ys)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipReport {
    pub lipschitz: f64,
    pub fd_norm: f64,
    pub member_norms: Vec<f64>,
    /// `max_f ‖f‖_Lip / max(L, tiny)`.
    pub max_ratio: f64,
    /// Every member has `‖f‖_Lip <= ‖f_D‖_Lip + tol`.
    pub below_fd: bool,
    /// `‖f_D‖_Lip <= L + tol`.
    pub fd_below_l: bool,
    pub pass: bool,
}

pub fn verify_lip_domination(d: &Dataset, members: &[PiecewiseLinear], l: f64) -> LipReport {
    let fd_norm = connect_the_dots(d).lipschitz_norm();
    let member_norms: Vec<f64> = members.iter().map(PiecewiseLinear::lipschitz_norm).collect();
    let worst = member_norms.iter().copied().fold(0.0_f64, f64::max);
    let below_fd = worst <= fd_norm + BOUND_TOL;
    let fd_below_l = fd_norm <= l + BOUND_TOL;
    LipReport {
        lipschitz: l,
        fd_norm,
        max_ratio: if l > 0.0 { worst / l } else if worst > 0.0 { f64::INFINITY } else { 0.0 },
        member_norms,
        below_fd,
        fd_below_l,
        pass: below_fd && fd_below_l,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeneralizationError {
    /// The abscissae are not `i/m`, `i = 1..=m`.
    NonUniformDesign { index: usize },
}

impl fmt::Display for GeneralizationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonUniformDesign { index } => {
                write!(f, "design is not x_i = i/m (first mismatch at index {index})")
            }
        }
    }
}

impl core::error::Error for GeneralizationError {}

#[derive(Debug, Clone, PartialEq)]
pub struct SupErrorReport {
    pub m: usize,
    /// `2L/m`.
    pub bound: f64,
    /// `14L/m`.
    pub localized_bound: f64,
    /// Largest `|f - f_*|` on the dense grid.
    pub achieved: f64,
    /// Largest `|f - f_*|` over `[0, 1]`, exact (checked at the union of breakpoints).
    pub exact: f64,
    pub slack: f64,
    pub worst_member: Option<usize>,
    pub pass: bool,
    pub localized_pass: bool,
}

pub fn verify_sup_error(
    gt: &GroundTruth,
    d: &Dataset,
    members: &[PiecewiseLinear],
    grid_per_gap: usize,
) -> Result<SupErrorReport, GeneralizationError> {
    let m = d.len();
    for (i, x) in d.xs().enumerate() {
        let expect = (i + 1) as f64 / m as f64;
        if (x - expect).abs() > 1e-12 {
            return Err(GeneralizationError::NonUniformDesign { index: i });
        }
    }
    let cells = grid_per_gap.max(1) * m;
    let mut achieved = 0.0_f64;
    let mut exact = 0.0_f64;
    let mut worst_member = None;
    for (j, f) in members.iter().enumerate() {
        let err = |x: f64| (f.evaluate(x) - gt.f_star.evaluate(x)).abs();
        let on_grid = (0..=cells)
            .map(|k| err(k as f64 / cells as f64))
            .fold(0.0_f64, f64::max);
        let at_kinks = f
            .breakpoints_in(0.0, 1.0)
            .iter()
            .chain(gt.f_star.breakpoints_in(0.0, 1.0))
            .map(|b| err(b.at))
            .chain([err(0.0), err(1.0)])
            .fold(0.0_f64, f64::max);
        if on_grid.max(at_kinks) > achieved.max(exact) || worst_member.is_none() {
            worst_member = Some(j);
        }
        achieved = achieved.max(on_grid);
        exact = exact.max(at_kinks);
    }
    let bound = 2.0 * gt.lipschitz / m as f64;
    let localized_bound = 14.0 * gt.lipschitz / m as f64;
    let worst = achieved.max(exact);
    Ok(SupErrorReport {
        m,
        bound,
        localized_bound,
        achieved,
        exact,
        slack: bound - worst,
        worst_member,
        pass: worst <= bound + BOUND_TOL,
        localized_pass: worst <= localized_bound + BOUND_TOL,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalizedReport {
    /// `B_i` per data interval.
    pub bounds: Vec<f64>,
    /// Largest `|Df - s_i|` on interval `i` over all members.
    pub deviations: Vec<f64>,
    pub fd_norm: f64,
    pub max_member_norm: f64,
    pub per_interval_pass: bool,
    /// `‖f‖_Lip <= 7 ‖f_D‖_Lip` for every member.
    pub aggregate_pass: bool,
    pub pass: bool,
}

pub fn verify_localized_bounds(d: &Dataset, members: &[PiecewiseLinear]) -> LocalizedReport {
    let bounds = localized_slope_bounds(d);
    let mut deviations = alloc::vec![0.0_f64; bounds.len()];
    let mut max_member_norm = 0.0_f64;
    for f in members {
        for (i, dev) in deviations.iter_mut().enumerate() {
            let s = d.slope(i);
            for slope in f.slopes_on(d.x(i), d.x(i + 1)) {
                *dev = dev.max((slope - s).abs());
            }
        }
        max_member_norm = max_member_norm.max(f.lipschitz_norm());
    }
    let fd_norm = connect_the_dots(d).lipschitz_norm();
    let per_interval_pass = deviations
        .iter()
        .zip(&bounds)
        .all(|(dev, b)| *dev <= b + BOUND_TOL);
    let aggregate_pass = max_member_norm <= 7.0 * fd_norm + BOUND_TOL;
    LocalizedReport {
        bounds,
        deviations,
        fd_norm,
        max_member_norm,
        per_interval_pass,
        aggregate_pass,
        pass: per_interval_pass && aggregate_pass,
    }
}

/// Interior knots `k` where some slope of `f` on `(x_k, x_{k+1})` violates
/// `ε_k(s_{k-1} - s_k) <= ε_k(Df - s_k) <= max(0, ε_k(s_{k+1} - s_k))`, with the
/// magnitude of the worst excess. At the last interior knot `s_{k+1}` is taken as `s_k`.
pub fn gradient_estimate_failures(
    ch: &Characterization,
    f: &PiecewiseLinear,
    tol: f64,
) -> Vec<(usize, f64)> {
    let d = &ch.dataset;
    let s = &ch.profile.slopes;
    let n = s.len();
    (1..n)
        .filter_map(|k| {
            let eps = match ch.profile.curvature_at(k)? {
                Curvature::Convex => 1.0,
                Curvature::Concave => -1.0,
                Curvature::Flat => 0.0,
            };
            let next = s[(k + 1).min(n - 1)];
            let lower = eps * (s[k - 1] - s[k]);
            let upper = (eps * (next - s[k])).max(0.0);
            let worst = f
                .slopes_on(d.x(k), d.x(k + 1))
                .into_iter()
                .map(|df| {
                    let v = eps * (df - s[k]);
                    // flat knots force Df = s_k on the interval
                    let flat = if eps == 0.0 { (df - s[k]).abs() } else { 0.0 };
                    (lower - v).max(v - upper).max(flat)
                })
                .fold(0.0_f64, f64::max);
            (worst > tol).then_some((k, worst))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomDesignReport {
    pub m: usize,
    pub largest_spacing: f64,
    /// Largest `|f - f_*|` on `[x_min, x_max]` over the sampled members.
    pub sup_error: f64,
    /// `sup_error / (L ln(m) / m)`; no threshold is applied.
    pub normalized: f64,
}

/// Exploratory run with iid uniform abscissae. Reports numbers only.
pub fn random_design_experiment(
    gt: &GroundTruth,
    m: usize,
    members: usize,
    seed: u64,
) -> Result<RandomDesignReport, DatasetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
    let d = make_dataset_from(gt, &Design::Explicit(xs))?;
    let ch = crate::characterize::characterize(&d);
    let (lo, hi) = (d.x(0), d.x(m - 1));
    let xs: Vec<f64> = d.xs().collect();
    let largest_spacing = xs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let cells = GRID_PER_GAP * m;
    let mut sup_error = 0.0_f64;
    for j in 0..members {
        let f = sample_member(&ch, seed.wrapping_add(j as u64 + 1), SampleKnobs::default());
        for k in 0..=cells {
            let x = lo + (hi - lo) * (k as f64 / cells as f64);
            sup_error = sup_error.max((f.evaluate(x) - gt.f_star.evaluate(x)).abs());
        }
    }
    let scale = gt.lipschitz * libm::log(m as f64) / m as f64;
    Ok(RandomDesignReport {
        m,
        largest_spacing,
        sup_error,
        normalized: if scale > 0.0 { sup_error / scale } else { 0.0 },
    })
}

/// `|x - c|`, the usual kinked ground truth for examples.
pub fn abs_shift(c: f64) -> PiecewiseLinear {
    PiecewiseLinear::new((c, 0.0), -1.0, alloc::vec![Breakpoint { at: c, jump: 2.0 }])
        .expect("finite")
}
