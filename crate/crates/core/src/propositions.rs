//! Local structure every member must have, checked one property at a time.
//!
//! These are necessary conditions used while proving the interval characterization.
//! They are useful as independent invariants on sampled members and as diagnostics when
//! a candidate interpolant is rejected.

use alloc::vec::Vec;

use crate::characterize::Characterization;
use crate::dataset::Curvature;
use crate::num::{sign_with_tol, unit_scale};
use crate::plfun::PiecewiseLinear;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Proposition {
    /// `Df` is monotone on every data interval.
    Monotone,
    /// `sgn(s_in(x_{i+1}) - s_i) + sgn(s_out(x_i) - s_i) = 0`.
    InOut,
    /// At a convex knot `s_{i-1} <= s_in(x_i) <= s_out(x_i) <= s_i`; mirrored if concave.
    EpsilonSlopes,
    /// Agreement with `f_D` on `(-∞, x_1)` and `(x_{m-2}, ∞)`.
    Ends,
    /// Agreement with `f_D` on `(x_{i-1}, x_{i+1})` around every flat knot.
    Neighbors,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropositionFailure {
    pub proposition: Proposition,
    /// Interval or knot index the failure refers to.
    pub index: usize,
    pub magnitude: f64,
}

/// Runs every check and collects the failures (empty for a member).
pub fn check_all(ch: &Characterization, f: &PiecewiseLinear, tol: f64) -> Vec<PropositionFailure> {
    let mut out = Vec::new();
    out.extend(monotone_on_intervals(ch, f, tol));
    out.extend(in_out_signs(ch, f, tol));
    out.extend(epsilon_slopes(ch, f, tol));
    out.extend(ends(ch, f, tol));
    out.extend(neighbors(ch, f, tol));
    out
}

fn slope_tol(ch: &Characterization, tol: f64) -> f64 {
    tol * unit_scale(ch.profile.slopes.iter().copied())
}

pub fn monotone_on_intervals(
    ch: &Characterization,
    f: &PiecewiseLinear,
    tol: f64,
) -> Vec<PropositionFailure> {
    let st = slope_tol(ch, tol);
    let d = &ch.dataset;
    (0..d.len() - 1)
        .filter_map(|i| {
            let slopes = f.slopes_on(d.x(i), d.x(i + 1));
            let rises = slopes.windows(2).map(|w| w[1] - w[0]);
            let worst_drop = rises.clone().fold(0.0_f64, |m, r| m.max(-r));
            let worst_rise = rises.fold(0.0_f64, |m, r| m.max(r));
            (worst_drop > st && worst_rise > st).then_some(PropositionFailure {
                proposition: Proposition::Monotone,
                index: i,
                magnitude: worst_drop.min(worst_rise),
            })
        })
        .collect()
}

pub fn in_out_signs(ch: &Characterization, f: &PiecewiseLinear, tol: f64) -> Vec<PropositionFailure> {
    let st = slope_tol(ch, tol);
    let d = &ch.dataset;
    (0..d.len() - 1)
        .filter_map(|i| {
            let s = ch.profile.slopes[i];
            let incoming = f.one_sided_slopes(d.x(i + 1)).0;
            let outgoing = f.one_sided_slopes(d.x(i)).1;
            let total = sign_with_tol(incoming - s, st) + sign_with_tol(outgoing - s, st);
            (total != 0).then_some(PropositionFailure {
                proposition: Proposition::InOut,
                index: i,
                magnitude: (incoming - s).abs().max((outgoing - s).abs()),
            })
        })
        .collect()
}

pub fn epsilon_slopes(ch: &Characterization, f: &PiecewiseLinear, tol: f64) -> Vec<PropositionFailure> {
    let st = slope_tol(ch, tol);
    let d = &ch.dataset;
    let s = &ch.profile.slopes;
    (1..d.len().saturating_sub(1))
        .filter_map(|k| {
            let dir = match ch.profile.curvature_at(k)? {
                Curvature::Flat => return None,
                Curvature::Convex => 1.0,
                Curvature::Concave => -1.0,
            };
            let (s_in, s_out) = f.one_sided_slopes(d.x(k));
            // each step of the chain s_{k-1} <= s_in <= s_out <= s_k, oriented
            let chain = [s[k - 1], s_in, s_out, s[k]];
            let worst = chain
                .windows(2)
                .fold(0.0_f64, |m, w| m.max(dir * (w[0] - w[1])));
            (worst > st).then_some(PropositionFailure {
                proposition: Proposition::EpsilonSlopes,
                index: k,
                magnitude: worst,
            })
        })
        .collect()
}

pub fn ends(ch: &Characterization, f: &PiecewiseLinear, tol: f64) -> Vec<PropositionFailure> {
    let d = &ch.dataset;
    let m = d.len();
    let mut out = Vec::new();
    if !f.restriction_equal(&ch.f_d, f64::NEG_INFINITY, d.x(1), tol) {
        out.push(PropositionFailure {
            proposition: Proposition::Ends,
            index: 0,
            magnitude: (f.left_slope() - ch.f_d.left_slope()).abs(),
        });
    }
    if !f.restriction_equal(&ch.f_d, d.x(m - 2), f64::INFINITY, tol) {
        out.push(PropositionFailure {
            proposition: Proposition::Ends,
            index: m - 2,
            magnitude: (f.right_slope() - ch.f_d.right_slope()).abs(),
        });
    }
    out
}

pub fn neighbors(ch: &Characterization, f: &PiecewiseLinear, tol: f64) -> Vec<PropositionFailure> {
    let d = &ch.dataset;
    (1..d.len().saturating_sub(1))
        .filter(|&k| ch.profile.curvature_at(k) == Some(Curvature::Flat))
        .filter_map(|k| {
            let (lo, hi) = (d.x(k - 1), d.x(k + 1));
            (!f.restriction_equal(&ch.f_d, lo, hi, tol)).then(|| PropositionFailure {
                proposition: Proposition::Neighbors,
                index: k,
                magnitude: f
                    .slopes_on(lo, hi)
                    .into_iter()
                    .fold(0.0_f64, |m, s| m.max((s - ch.profile.slopes[k]).abs())),
            })
        })
        .collect()
}
