//! Random members of the minimal-TV family, and interpolating non-members for negative
//! tests.
//!
//! Members are built from tangent slopes: on a convex block spanning knots `a..=b`, pick
//! `t_j` in the slope bracket `[s_{j-1}, s_j]` at every knot and take, on each interval,
//! the max of the two tangent lines through its endpoints (min for concave blocks). The
//! result is convex, interpolates, and stays between the support lines and the chords.
//! The distribution over members is an artifact choice; no natural measure exists on the
//! family.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::characterize::{Characterization, Verdict};
use crate::num::unit_scale;
use crate::plfun::{Breakpoint, PiecewiseLinear};

/// How tangent slopes are drawn inside each slope bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TangentRule {
    /// Uniform on the closed bracket.
    #[default]
    Uniform,
    /// `t_j = s_j` everywhere, which reproduces `f_D`.
    Chord,
    /// Block end knots pinned outward (`t_a = s_{a-1}`, `t_b = s_b`), interior knots at
    /// the bracket midpoint. For single-interval blocks this is the max (min) of the two
    /// support lines.
    SupportLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SampleKnobs {
    pub rule: TangentRule,
}

/// Draws one member; deterministic in `(seed, knobs, dataset)`.
pub fn sample_member(ch: &Characterization, seed: u64, knobs: SampleKnobs) -> PiecewiseLinear {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = &ch.profile.slopes;
    let tangents: Vec<Vec<f64>> = ch
        .blocks
        .iter()
        .map(|b| {
            (b.first_knot..=b.last_knot)
                .map(|j| {
                    let (prev, next) = (s[j - 1], s[j]);
                    match knobs.rule {
                        TangentRule::Uniform => {
                            let (lo, hi) = (prev.min(next), prev.max(next));
                            rng.random_range(lo..=hi)
                        }
                        TangentRule::Chord => next,
                        TangentRule::SupportLines if j == b.first_knot => prev,
                        TangentRule::SupportLines if j == b.last_knot => next,
                        TangentRule::SupportLines => 0.5 * (prev + next),
                    }
                })
                .collect()
        })
        .collect();
    member_from_tangents(ch, &tangents)
}

/// Builds the tangent-construction member from explicit tangent slopes, one vector per
/// block holding `t_a..=t_b`. Slopes are not checked against their brackets; a slope
/// outside its bracket yields a non-member.
pub fn member_from_tangents(ch: &Characterization, tangents: &[Vec<f64>]) -> PiecewiseLinear {
    assert_eq!(tangents.len(), ch.blocks.len(), "one tangent vector per block");
    let d = &ch.dataset;
    let s = &ch.profile.slopes;
    let mut changes: Vec<(f64, f64)> = Vec::with_capacity(3 * d.len());
    for v in &ch.verdicts {
        let i = v.index;
        match v.verdict {
            Verdict::Forced(_) => changes.push((d.x(i), s[i])),
            Verdict::Free { block } => {
                let b = &ch.blocks[block];
                let t = &tangents[block];
                assert_eq!(t.len(), b.last_knot - b.first_knot + 1);
                let (tl, tr) = (t[i - b.first_knot], t[i + 1 - b.first_knot]);
                let (x0, x1) = (d.x(i), d.x(i + 1));
                changes.push((x0, tl));
                let denom = tl - tr;
                if denom != 0.0 {
                    // the two tangent lines cross at x0 + r (x1 - x0)
                    let r = ((s[i] - tr) / denom).clamp(0.0, 1.0);
                    let cross = (x0 + r * (x1 - x0)).clamp(x0, x1);
                    changes.push((cross, tr));
                }
            }
        }
    }
    PiecewiseLinear::from_slope_changes(d.points()[0], s[0], &changes)
        .expect("tangent construction produces finite data")
}

/// An interpolant of the same data that is not a member: a tent is added on one data
/// interval (chosen by `seed`) so that the result leaves the envelope there or kinks a
/// forced interval. With two data points the kink goes right of the data instead.
pub fn perturb_to_nonmember(
    ch: &Characterization,
    f: &PiecewiseLinear,
    seed: u64,
) -> PiecewiseLinear {
    let d = &ch.dataset;
    let m = d.len();
    let scale = unit_scale(ch.profile.slopes.iter().copied());
    if m == 2 {
        let width = d.x(1) - d.x(0);
        let kink = PiecewiseLinear::new(
            (d.x(1), 0.0),
            0.0,
            alloc::vec![Breakpoint {
                at: d.x(1) + width,
                jump: scale,
            }],
        )
        .expect("finite kink");
        return f.plus(&kink);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let i = rng.random_range(0..m - 1);
    let (x0, x1) = (d.x(i), d.x(i + 1));
    let width = x1 - x0;
    let mid = 0.5 * (x0 + x1);
    let eta = width * scale / 8.0;
    let height = match ch.verdicts[i].verdict {
        Verdict::Forced(_) => eta,
        Verdict::Free { block } => {
            let gap = ch.f_d.evaluate(mid) - f.evaluate(mid);
            match ch.blocks[block].sign {
                crate::dataset::Curvature::Concave => gap - eta,
                _ => gap + eta,
            }
        }
    };
    f.plus(&tent(x0, x1, height))
}

/// Zero outside `(lo, hi)`, linear up to `height` at the midpoint and back down.
fn tent(lo: f64, hi: f64, height: f64) -> PiecewiseLinear {
    let mid = 0.5 * (lo + hi);
    let k = height / (mid - lo);
    PiecewiseLinear::new(
        (lo, 0.0),
        0.0,
        alloc::vec![
            Breakpoint { at: lo, jump: k },
            Breakpoint { at: mid, jump: -2.0 * k },
            Breakpoint { at: hi, jump: k },
        ],
    )
    .expect("finite tent")
}
