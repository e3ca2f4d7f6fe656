//! Interval-by-interval description of every minimal-TV interpolant of a dataset.
//!
//! Each data interval `(x_i, x_{i+1})` is either *forced* (every member coincides with
//! the connect-the-dots interpolant `f_D` there) or *free*. Free intervals form maximal
//! runs ("blocks") of constant curvature sign on which members are any convex (resp.
//! concave) interpolant lying under (resp. over) `f_D` and over (resp. under) the two
//! flanking support lines.
//!
//! Membership is decided twice: directly from that geometry, and by comparing the
//! total variation of the derivative with the minimum `C_*`. The two must agree.

use alloc::vec::Vec;

use crate::dataset::{Curvature, Dataset, SlopeProfile};
use crate::num::{unit_scale, ExactSum};
use crate::plfun::PiecewiseLinear;

/// Relative tolerance used by [`check_membership`] when none is supplied.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;

/// The line through a knot with a given slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportLine {
    pub through: (f64, f64),
    pub slope: f64,
}

impl SupportLine {
    pub fn at(&self, x: f64) -> f64 {
        self.through.1 + self.slope * (x - self.through.0)
    }
}

/// Why an interval is pinned to `f_D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForcedReason {
    /// First or last interval: `f_D` on `(-∞, x_1)` and `(x_{m-2}, ∞)`.
    Ends,
    /// An endpoint knot has zero curvature.
    FlatNeighbor,
    /// The endpoint knots have opposite curvature.
    OppositeCurvature,
}

impl ForcedReason {
    pub fn tag(self) -> ViolationTag {
        match self {
            ForcedReason::Ends => ViolationTag::Forced1a,
            ForcedReason::FlatNeighbor => ViolationTag::Forced1b,
            ForcedReason::OppositeCurvature => ViolationTag::Forced1c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Forced(ForcedReason),
    Free { block: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalVerdict {
    /// Interval `(x_index, x_{index+1})`.
    pub index: usize,
    pub verdict: Verdict,
}

/// A maximal run of free intervals spanning knots `first_knot..=last_knot`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeBlock {
    pub first_knot: usize,
    pub last_knot: usize,
    /// `Convex` or `Concave`, never `Flat`.
    pub sign: Curvature,
    /// Extension of the chord entering the block: through knot `first_knot - 1`.
    pub incoming_support: SupportLine,
    /// Extension of the chord leaving the block: through knot `last_knot`.
    pub outgoing_support: SupportLine,
}

impl FreeBlock {
    /// Pointwise bound from the support lines: their max for convex blocks, min for
    /// concave ones.
    pub fn support_bound(&self, x: f64) -> f64 {
        let (a, b) = (self.incoming_support.at(x), self.outgoing_support.at(x));
        match self.sign {
            Curvature::Concave => a.min(b),
            _ => a.max(b),
        }
    }

    pub fn intervals(&self) -> core::ops::Range<usize> {
        self.first_knot..self.last_knot
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Characterization {
    pub dataset: Dataset,
    pub profile: SlopeProfile,
    pub verdicts: Vec<IntervalVerdict>,
    pub blocks: Vec<FreeBlock>,
    /// Slope indices of the discrete inflection points, including both ends.
    pub inflection_set: Vec<usize>,
    /// `Σ_i |s_i - s_{i-1}|` over non-flat knots.
    pub minimal_tv: f64,
    /// `Σ_q |s_{i_q} - s_{i_{q-1}}|` over the inflection set.
    pub minimal_tv_via_inflections: f64,
    pub f_d: PiecewiseLinear,
}

/// The chord interpolant, extended by the first and last chord slopes.
pub fn connect_the_dots(d: &Dataset) -> PiecewiseLinear {
    let last = d.len() - 2;
    PiecewiseLinear::from_knots(d.points(), d.slope(0), d.slope(last))
        .expect("dataset abscissae are finite and strictly increasing")
}

pub fn characterize(d: &Dataset) -> Characterization {
    characterize_with_profile(d, d.slope_profile())
}

pub fn characterize_with_profile(d: &Dataset, profile: SlopeProfile) -> Characterization {
    let m = d.len();
    let eps = |k: usize| profile.curvature_at(k).unwrap_or(Curvature::Flat);

    let mut verdicts = Vec::with_capacity(m - 1);
    let mut blocks: Vec<FreeBlock> = Vec::new();
    for i in 0..m - 1 {
        let verdict = if i == 0 || i == m - 2 {
            Verdict::Forced(ForcedReason::Ends)
        } else {
            let (l, r) = (eps(i), eps(i + 1));
            if l == Curvature::Flat || r == Curvature::Flat {
                Verdict::Forced(ForcedReason::FlatNeighbor)
            } else if l != r {
                Verdict::Forced(ForcedReason::OppositeCurvature)
            } else {
                match blocks.last_mut() {
                    Some(b) if b.last_knot == i => {
                        b.last_knot = i + 1;
                    }
                    _ => blocks.push(FreeBlock {
                        first_knot: i,
                        last_knot: i + 1,
                        sign: l,
                        incoming_support: SupportLine {
                            through: d.points()[i - 1],
                            slope: profile.slopes[i - 1],
                        },
                        outgoing_support: SupportLine {
                            through: d.points()[i + 1],
                            slope: profile.slopes[i + 1],
                        },
                    }),
                }
                Verdict::Free {
                    block: blocks.len() - 1,
                }
            }
        };
        verdicts.push(IntervalVerdict { index: i, verdict });
    }
    for b in &mut blocks {
        b.outgoing_support = SupportLine {
            through: d.points()[b.last_knot],
            slope: profile.slopes[b.last_knot],
        };
    }

    let s = &profile.slopes;
    let mut inflection_set = alloc::vec![0];
    inflection_set.extend((1..m.saturating_sub(2)).filter(|&i| eps(i) != eps(i + 1)));
    if m - 2 > 0 {
        inflection_set.push(m - 2);
    }

    // flat knots count as exactly collinear in both sums, so a run of sub-tolerance
    // slope drift cannot make the two formulas disagree
    let mut adjacent = ExactSum::new();
    for k in 1..s.len() {
        if eps(k) != Curvature::Flat {
            adjacent.add_abs_diff(s[k], s[k - 1]);
        }
    }
    let mut telescoped = ExactSum::new();
    for w in inflection_set.windows(2) {
        if eps(w[0] + 1) != Curvature::Flat {
            telescoped.add_abs_diff(s[w[1]], s[w[0]]);
        }
    }

    Characterization {
        dataset: d.clone(),
        verdicts,
        blocks,
        inflection_set,
        minimal_tv: adjacent.total(),
        minimal_tv_via_inflections: telescoped.total(),
        f_d: connect_the_dots(d),
        profile,
    }
}

/// `B_i = |s_{i+1}-s_i| + |s_i-s_{i-1}| + |s_{i-1}-s_{i-2}|` per interval, with the slope
/// sequence padded by repeating its first and last entries.
pub fn localized_slope_bounds(d: &Dataset) -> Vec<f64> {
    let n = d.len() - 1;
    let s: Vec<f64> = (0..n).map(|i| d.slope(i)).collect();
    let at = |i: isize| s[i.clamp(0, n as isize - 1) as usize];
    (0..n as isize)
        .map(|i| {
            (at(i + 1) - at(i)).abs() + (at(i) - at(i - 1)).abs() + (at(i - 1) - at(i - 2)).abs()
        })
        .collect()
}

/// Machine-readable kind of a membership violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationTag {
    Interp,
    Forced1a,
    Forced1b,
    Forced1c,
    BlockMonotone,
    BlockEnvelope,
    BlockBoundarySlope,
    TvMismatch,
}

impl ViolationTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationTag::Interp => "interp",
            ViolationTag::Forced1a => "forced-1a",
            ViolationTag::Forced1b => "forced-1b",
            ViolationTag::Forced1c => "forced-1c",
            ViolationTag::BlockMonotone => "block-monotone",
            ViolationTag::BlockEnvelope => "block-envelope",
            ViolationTag::BlockBoundarySlope => "block-boundary-slope",
            ViolationTag::TvMismatch => "tv-mismatch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub tag: ViolationTag,
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    pub is_member: bool,
    pub direct_pass: bool,
    pub tv_pass: bool,
    /// `‖Df‖_TV` of the tested function.
    pub tv: f64,
    pub minimal_tv: f64,
    pub violations: Vec<Violation>,
}

impl MembershipReport {
    pub fn has(&self, tag: ViolationTag) -> bool {
        self.violations.iter().any(|v| v.tag == tag)
    }
}

/// Characterizes `d` and tests `f` against it.
pub fn check_membership(d: &Dataset, f: &PiecewiseLinear, tol: f64) -> MembershipReport {
    characterize(d).check(f, tol)
}

impl Characterization {
    pub fn m(&self) -> usize {
        self.dataset.len()
    }

    /// The open range `(lo, hi)` a forced verdict pins to `f_D`; the end intervals
    /// extend to infinity.
    pub fn forced_range(&self, i: usize) -> (f64, f64) {
        let m = self.m();
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            self.dataset.x(i)
        };
        let hi = if i == m - 2 {
            f64::INFINITY
        } else {
            self.dataset.x(i + 1)
        };
        (lo, hi)
    }

    /// The only member is `f_D` itself.
    pub fn is_singleton(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Lower and upper pointwise envelope at `x` inside `block`.
    pub fn block_envelope(&self, block: &FreeBlock, x: f64) -> (f64, f64) {
        let chord = self.f_d.evaluate(x);
        let support = block.support_bound(x);
        match block.sign {
            Curvature::Concave => (chord, support),
            _ => (support, chord),
        }
    }

    /// Both membership tests on `f` with relative tolerance `tol`.
    pub fn check(&self, f: &PiecewiseLinear, tol: f64) -> MembershipReport {
        let d = &self.dataset;
        let value_tol = tol * unit_scale(d.ys());
        let slope_tol = tol * unit_scale(self.profile.slopes.iter().copied());
        let mut violations = Vec::new();

        let mut interpolates = true;
        for &(x, y) in d.points() {
            let err = (f.evaluate(x) - y).abs();
            if err > value_tol {
                interpolates = false;
                violations.push(Violation {
                    tag: ViolationTag::Interp,
                    location: x,
                    magnitude: err,
                });
            }
        }

        for v in &self.verdicts {
            if let Verdict::Forced(reason) = v.verdict {
                let (lo, hi) = self.forced_range(v.index);
                if !f.restriction_equal(&self.f_d, lo, hi, tol) {
                    let chord = self.profile.slopes[v.index];
                    let magnitude = f
                        .slopes_on(lo, hi)
                        .into_iter()
                        .fold(0.0_f64, |acc, s| acc.max((s - chord).abs()));
                    violations.push(Violation {
                        tag: reason.tag(),
                        location: 0.5 * (d.x(v.index) + d.x(v.index + 1)),
                        magnitude,
                    });
                }
            }
        }

        for block in &self.blocks {
            self.check_block(f, block, value_tol, slope_tol, &mut violations);
        }

        let direct_pass = violations.is_empty();

        let tv = f.tv_of_derivative();
        let tv_gap = (tv - self.minimal_tv).abs();
        let tv_ok = tv_gap <= tol * self.minimal_tv.max(1.0);
        if !tv_ok {
            violations.push(Violation {
                tag: ViolationTag::TvMismatch,
                location: f64::NAN,
                magnitude: tv - self.minimal_tv,
            });
        }

        MembershipReport {
            is_member: direct_pass,
            direct_pass,
            tv_pass: interpolates && tv_ok,
            tv,
            minimal_tv: self.minimal_tv,
            violations,
        }
    }

    fn check_block(
        &self,
        f: &PiecewiseLinear,
        block: &FreeBlock,
        value_tol: f64,
        slope_tol: f64,
        out: &mut Vec<Violation>,
    ) {
        let d = &self.dataset;
        let (lo, hi) = (d.x(block.first_knot), d.x(block.last_knot));
        // orient so that members are convex
        let dir = if block.sign == Curvature::Concave { -1.0 } else { 1.0 };

        let slopes = f.slopes_on(lo, hi);
        let inner = f.breakpoints_in(lo, hi);
        for (k, w) in slopes.windows(2).enumerate() {
            let drop = dir * (w[0] - w[1]);
            if drop > slope_tol {
                out.push(Violation {
                    tag: ViolationTag::BlockMonotone,
                    location: inner[k].at,
                    magnitude: drop,
                });
            }
        }
        let entering = block.incoming_support.slope;
        let leaving = block.outgoing_support.slope;
        let first = slopes[0];
        let last = slopes[slopes.len() - 1];
        if dir * (entering - first) > slope_tol {
            out.push(Violation {
                tag: ViolationTag::BlockBoundarySlope,
                location: lo,
                magnitude: (entering - first).abs(),
            });
        }
        if dir * (last - leaving) > slope_tol {
            out.push(Violation {
                tag: ViolationTag::BlockBoundarySlope,
                location: hi,
                magnitude: (last - leaving).abs(),
            });
        }

        let probes = inner
            .iter()
            .map(|b| b.at)
            .chain((block.first_knot..=block.last_knot).map(|k| d.x(k)));
        for x in probes {
            let (lower, upper) = self.block_envelope(block, x);
            let v = f.evaluate(x);
            let excess = (v - upper).max(lower - v);
            if excess > value_tol {
                out.push(Violation {
                    tag: ViolationTag::BlockEnvelope,
                    location: x,
                    magnitude: excess,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plfun::Breakpoint;
    use alloc::vec;

    fn dataset_a() -> Dataset {
        Dataset::from_xy(&[0., 1., 2., 3.], &[0., 0., 1., 3.]).unwrap()
    }

    fn zigzag() -> Dataset {
        Dataset::from_xy(&[0., 1., 2., 3.], &[0., 1., 0., 1.]).unwrap()
    }

    fn kinds(ch: &Characterization) -> Vec<Verdict> {
        ch.verdicts.iter().map(|v| v.verdict).collect()
    }

    #[test]
    fn connect_the_dots_examples() {
        let line = connect_the_dots(&Dataset::from_xy(&[0., 1.], &[0., 1.]).unwrap());
        assert!(line.is_affine());
        assert_eq!(line.evaluate(-3.0), -3.0);

        let fd = connect_the_dots(&dataset_a());
        assert_eq!(fd.left_slope(), 0.0);
        assert_eq!(fd.right_slope(), 2.0);
        let jumps: Vec<_> = fd.breakpoints().iter().map(|b| (b.at, b.jump)).collect();
        assert_eq!(jumps, vec![(1.0, 1.0), (2.0, 1.0)]);

        let collinear = Dataset::from_xy(&[0., 1., 2., 5.], &[1., 3., 5., 11.]).unwrap();
        assert!(connect_the_dots(&collinear).is_affine());
    }

    #[test]
    fn zigzag_is_fully_forced() {
        let ch = characterize(&zigzag());
        assert_eq!(
            kinds(&ch),
            vec![
                Verdict::Forced(ForcedReason::Ends),
                Verdict::Forced(ForcedReason::OppositeCurvature),
                Verdict::Forced(ForcedReason::Ends),
            ]
        );
        assert!(ch.is_singleton());
        assert_eq!(ch.minimal_tv, 4.0);
        assert_eq!(ch.minimal_tv_via_inflections, 4.0);
    }

    #[test]
    fn dataset_a_has_one_convex_block() {
        let ch = characterize(&dataset_a());
        assert_eq!(
            kinds(&ch),
            vec![
                Verdict::Forced(ForcedReason::Ends),
                Verdict::Free { block: 0 },
                Verdict::Forced(ForcedReason::Ends),
            ]
        );
        let b = &ch.blocks[0];
        assert_eq!((b.first_knot, b.last_knot), (1, 2));
        assert_eq!(b.sign, Curvature::Convex);
        assert_eq!(b.incoming_support, SupportLine { through: (0.0, 0.0), slope: 0.0 });
        assert_eq!(b.outgoing_support, SupportLine { through: (2.0, 1.0), slope: 2.0 });
        // chord on (1,2) is y = x - 1
        assert_eq!(ch.block_envelope(b, 1.5), (0.0, 0.5));
        assert_eq!(ch.minimal_tv, 2.0);
        assert_eq!(ch.inflection_set, vec![0, 2]);
    }

    #[test]
    fn collinear_is_singleton_with_zero_tv() {
        let d = Dataset::from_xy(&[0., 1., 2., 5.], &[1., 3., 5., 11.]).unwrap();
        let ch = characterize(&d);
        assert!(ch.is_singleton());
        assert_eq!(ch.minimal_tv, 0.0);
        assert_eq!(
            kinds(&ch),
            vec![
                Verdict::Forced(ForcedReason::Ends),
                Verdict::Forced(ForcedReason::FlatNeighbor),
                Verdict::Forced(ForcedReason::Ends),
            ]
        );
    }

    #[test]
    fn small_datasets_have_no_free_intervals() {
        for ys in [[0., 1., 0.], [0., 0., 1.]] {
            let d = Dataset::from_xy(&[0., 1., 2.], &ys).unwrap();
            let ch = characterize(&d);
            assert!(ch.is_singleton());
            assert_eq!(ch.inflection_set, vec![0, 1]);
        }
        let ch = characterize(&Dataset::from_xy(&[0., 1.], &[2., -1.]).unwrap());
        assert_eq!(ch.verdicts.len(), 1);
        assert_eq!(ch.inflection_set, vec![0]);
        assert_eq!(ch.minimal_tv, 0.0);
        assert!(ch.check(&ch.f_d, 1e-9).is_member);
    }

    #[test]
    fn long_convex_run_forms_one_block() {
        let xs = [0., 1., 2., 3., 4., 5.];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x * x).collect();
        let ch = characterize(&Dataset::from_xy(&xs, &ys).unwrap());
        assert_eq!(ch.blocks.len(), 1);
        assert_eq!((ch.blocks[0].first_knot, ch.blocks[0].last_knot), (1, 4));
        assert_eq!(ch.inflection_set, vec![0, 4]);
        assert_eq!(ch.minimal_tv, 8.0);
    }

    #[test]
    fn localized_bound_examples() {
        let collinear = Dataset::from_xy(&[0., 1., 2., 5.], &[1., 3., 5., 11.]).unwrap();
        assert!(localized_slope_bounds(&collinear).iter().all(|&b| b == 0.0));
        assert_eq!(localized_slope_bounds(&dataset_a())[1], 2.0);
        assert_eq!(localized_slope_bounds(&zigzag())[1], 4.0);
    }

    #[test]
    fn f_d_is_always_a_member() {
        for d in [dataset_a(), zigzag()] {
            let ch = characterize(&d);
            let r = ch.check(&ch.f_d, DEFAULT_MEMBERSHIP_TOL);
            assert!(r.is_member && r.tv_pass, "{r:?}");
        }
    }

    #[test]
    fn convex_member_inside_envelope() {
        // slopes 0.5 then 1.5 on (1,2), kink at (1.5, 0.25)
        let f = PiecewiseLinear::from_knots(
            &[(0., 0.), (1., 0.), (1.5, 0.25), (2., 1.), (3., 3.)],
            0.0,
            2.0,
        )
        .unwrap();
        let r = check_membership(&dataset_a(), &f, 1e-9);
        assert!(r.is_member && r.direct_pass && r.tv_pass, "{r:?}");
        assert_eq!(r.tv, 2.0);
    }

    #[test]
    fn knot_above_chord_is_rejected_by_both_tests() {
        let f = PiecewiseLinear::from_knots(
            &[(0., 0.), (1., 0.), (1.5, 0.75), (2., 1.), (3., 3.)],
            0.0,
            2.0,
        )
        .unwrap();
        let r = check_membership(&dataset_a(), &f, 1e-9);
        assert!(!r.direct_pass && !r.tv_pass);
        assert_eq!(r.tv, 4.0);
        assert!(r
            .violations
            .iter()
            .any(|v| v.tag == ViolationTag::BlockEnvelope && v.location == 1.5));
        assert!(r.has(ViolationTag::BlockMonotone));
        assert!(r.has(ViolationTag::TvMismatch));
    }

    #[test]
    fn kink_on_forced_interval_is_tagged() {
        let ch = characterize(&zigzag());
        let g = ch.f_d.plus(
            &PiecewiseLinear::new(
                (1.0, 0.0),
                0.0,
                vec![
                    Breakpoint { at: 1.0, jump: 1.0 },
                    Breakpoint { at: 1.5, jump: -2.0 },
                    Breakpoint { at: 2.0, jump: 1.0 },
                ],
            )
            .unwrap(),
        );
        let r = ch.check(&g, 1e-9);
        assert!(!r.direct_pass && !r.tv_pass);
        assert!(r.has(ViolationTag::Forced1c));
        assert!(!r.has(ViolationTag::Interp));
    }

    #[test]
    fn non_interpolant_fails_both() {
        let ch = characterize(&dataset_a());
        let r = ch.check(&ch.f_d.plus_affine(0.0, 1e-3), 1e-9);
        assert!(!r.direct_pass && !r.tv_pass);
        assert!(r.has(ViolationTag::Interp));
    }

    #[test]
    fn concave_block_mirrors_convex() {
        let d = Dataset::from_xy(&[0., 1., 2., 3.], &[0., 0., -1., -3.]).unwrap();
        let ch = characterize(&d);
        assert_eq!(ch.blocks[0].sign, Curvature::Concave);
        let good = PiecewiseLinear::from_knots(
            &[(0., 0.), (1., 0.), (1.5, -0.25), (2., -1.), (3., -3.)],
            0.0,
            -2.0,
        )
        .unwrap();
        assert!(ch.check(&good, 1e-9).is_member);
        let bad = PiecewiseLinear::from_knots(
            &[(0., 0.), (1., 0.), (1.5, -0.75), (2., -1.), (3., -3.)],
            0.0,
            -2.0,
        )
        .unwrap();
        let r = ch.check(&bad, 1e-9);
        assert!(!r.direct_pass && !r.tv_pass);
    }
}
