//! Continuous piecewise-linear functions on the real line.
//!
//! A function is stored as an anchor point, the slope of its leftmost piece and the
//! slope jumps `c_j` at its breakpoints `ξ_j`. The second derivative is the atomic
//! measure `Σ c_j δ_{ξ_j}`, so the total variation of the derivative is `Σ |c_j|`.
//! Piece slopes and breakpoint values are cached at construction.

use alloc::vec::Vec;
use core::fmt;

use crate::num::unit_scale;

/// Jumps with `|c| <= MERGE_TOL * (1 + max |c|)` are dropped during canonicalization.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PlError {
    NonFinite,
    EmptyKnots,
    /// Knot `index` does not lie strictly to the right of its predecessor.
    NonIncreasingKnots { index: usize },
}

impl fmt::Display for PlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlError::NonFinite => f.write_str("non-finite value in piecewise-linear data"),
            PlError::EmptyKnots => f.write_str("at least one knot is required"),
            PlError::NonIncreasingKnots { index } => {
                write!(f, "knot {index} is not strictly right of the previous knot")
            }
        }
    }
}

impl core::error::Error for PlError {}

/// A slope discontinuity: at `at` the slope increases by `jump`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub at: f64,
    pub jump: f64,
}

/// Canonical continuous piecewise-linear function.
///
/// Invariants: breakpoints strictly increasing, every jump nonzero after the merge
/// tolerance, and the anchor sits on the first breakpoint when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    anchor: (f64, f64),
    left_slope: f64,
    breakpoints: Vec<Breakpoint>,
    // slopes[j]: slope to the right of breakpoint j
    slopes: Vec<f64>,
    // values[j]: f(breakpoints[j].at)
    values: Vec<f64>,
}

impl PiecewiseLinear {
    /// Builds and canonicalizes: sorts breakpoints, merges equal locations and drops
    /// negligible jumps.
    pub fn new(
        anchor: (f64, f64),
        left_slope: f64,
        mut breakpoints: Vec<Breakpoint>,
    ) -> Result<Self, PlError> {
        let finite = anchor.0.is_finite()
            && anchor.1.is_finite()
            && left_slope.is_finite()
            && breakpoints
                .iter()
                .all(|b| b.at.is_finite() && b.jump.is_finite());
        if !finite {
            return Err(PlError::NonFinite);
        }
        breakpoints.sort_by(|a, b| a.at.total_cmp(&b.at));
        let mut merged: Vec<Breakpoint> = Vec::with_capacity(breakpoints.len());
        for bp in breakpoints {
            match merged.last_mut() {
                Some(last) if last.at == bp.at => last.jump += bp.jump,
                _ => merged.push(bp),
            }
        }
        let max_jump = merged.iter().fold(0.0_f64, |m, b| m.max(b.jump.abs()));
        let cutoff = MERGE_TOL * (1.0 + max_jump);
        merged.retain(|b| b.jump.abs() > cutoff);
        Ok(Self::from_canonical_parts(anchor, left_slope, merged))
    }

    fn from_canonical_parts(anchor: (f64, f64), left_slope: f64, bps: Vec<Breakpoint>) -> Self {
        let mut slopes = Vec::with_capacity(bps.len());
        let mut s = left_slope;
        for b in &bps {
            s += b.jump;
            slopes.push(s);
        }
        let mut values = alloc::vec![0.0; bps.len()];
        if !bps.is_empty() {
            // integrate outward from the piece that contains the anchor
            let p = bps.partition_point(|b| b.at <= anchor.0);
            if p == 0 {
                values[0] = anchor.1 + left_slope * (bps[0].at - anchor.0);
            } else {
                values[p - 1] = anchor.1 + slopes[p - 1] * (bps[p - 1].at - anchor.0);
                for j in (0..p - 1).rev() {
                    values[j] = values[j + 1] - slopes[j] * (bps[j + 1].at - bps[j].at);
                }
            }
            let start = p.max(1);
            for j in start..bps.len() {
                values[j] = values[j - 1] + slopes[j - 1] * (bps[j].at - bps[j - 1].at);
            }
        }
        let anchor = match bps.first() {
            Some(b) => (b.at, values[0]),
            None => anchor,
        };
        Self {
            anchor,
            left_slope,
            breakpoints: bps,
            slopes,
            values,
        }
    }

    /// The affine function `slope * x + intercept`.
    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::from_canonical_parts((0.0, intercept), slope, Vec::new())
    }

    /// Interpolates `knots` (strictly increasing in x) with chords and extends affinely
    /// with `left_slope` / `right_slope` outside the knot range.
    pub fn from_knots(
        knots: &[(f64, f64)],
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self, PlError> {
        let first = *knots.first().ok_or(PlError::EmptyKnots)?;
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(PlError::NonFinite);
        }
        if let Some(i) = knots.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(PlError::NonIncreasingKnots { index: i + 1 });
        }
        let mut bps = Vec::with_capacity(knots.len());
        let mut incoming = left_slope;
        for (i, &(x, _)) in knots.iter().enumerate() {
            let outgoing = match knots.get(i + 1) {
                Some(&(x1, y1)) => (y1 - knots[i].1) / (x1 - x),
                None => right_slope,
            };
            bps.push(Breakpoint {
                at: x,
                jump: outgoing - incoming,
            });
            incoming = outgoing;
        }
        Self::new(first, left_slope, bps)
    }

    /// Builds from the slope taken after each location, `changes` sorted by location.
    pub fn from_slope_changes(
        anchor: (f64, f64),
        left_slope: f64,
        changes: &[(f64, f64)],
    ) -> Result<Self, PlError> {
        let mut current = left_slope;
        let mut bps = Vec::with_capacity(changes.len());
        for &(at, slope) in changes {
            bps.push(Breakpoint {
                at,
                jump: slope - current,
            });
            current = slope;
        }
        Self::new(anchor, left_slope, bps)
    }

    pub fn anchor(&self) -> (f64, f64) {
        self.anchor
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.slopes.last().copied().unwrap_or(self.left_slope)
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    /// `f` at each breakpoint, in breakpoint order.
    pub fn breakpoint_values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_affine(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Slope of piece `p`: piece 0 lies left of the first breakpoint, piece `j` right of
    /// breakpoint `j - 1`.
    pub fn piece_slope(&self, p: usize) -> f64 {
        if p == 0 {
            self.left_slope
        } else {
            self.slopes[p - 1]
        }
    }

    pub fn piece_slopes(&self) -> impl Iterator<Item = f64> + '_ {
        core::iter::once(self.left_slope).chain(self.slopes.iter().copied())
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let p = self.breakpoints.partition_point(|b| b.at <= x);
        if p == 0 {
            match self.breakpoints.first() {
                Some(b) => self.values[0] + self.left_slope * (x - b.at),
                None => self.anchor.1 + self.left_slope * (x - self.anchor.0),
            }
        } else {
            self.values[p - 1] + self.slopes[p - 1] * (x - self.breakpoints[p - 1].at)
        }
    }

    /// Reference evaluation that integrates the jumps from the anchor on every call,
    /// without the cached breakpoint values.
    pub fn evaluate_by_integration(&self, x: f64) -> f64 {
        let (x0, v0) = self.anchor;
        let (lo, hi, sign) = if x >= x0 { (x0, x, 1.0) } else { (x, x0, -1.0) };
        let mut slope = self.left_slope;
        for b in &self.breakpoints {
            if b.at <= lo {
                slope += b.jump;
            }
        }
        let mut acc = 0.0;
        let mut pos = lo;
        for b in &self.breakpoints {
            if b.at > lo && b.at < hi {
                acc += slope * (b.at - pos);
                pos = b.at;
                slope += b.jump;
            }
        }
        acc += slope * (hi - pos);
        v0 + sign * acc
    }

    /// Incoming and outgoing slopes at `x`.
    pub fn one_sided_slopes(&self, x: f64) -> (f64, f64) {
        let before = self.breakpoints.partition_point(|b| b.at < x);
        let upto = self.breakpoints.partition_point(|b| b.at <= x);
        (self.piece_slope(before), self.piece_slope(upto))
    }

    pub fn tv_of_derivative(&self) -> f64 {
        self.breakpoints.iter().map(|b| b.jump.abs()).sum()
    }

    pub fn lipschitz_norm(&self) -> f64 {
        self.piece_slopes().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    /// Slopes of the pieces meeting the open interval `(lo, hi)`, left to right.
    pub fn slopes_on(&self, lo: f64, hi: f64) -> Vec<f64> {
        let first = self.breakpoints.partition_point(|b| b.at <= lo);
        let last = self.breakpoints.partition_point(|b| b.at < hi);
        (first..=last).map(|p| self.piece_slope(p)).collect()
    }

    /// Breakpoints strictly inside `(lo, hi)`.
    pub fn breakpoints_in(&self, lo: f64, hi: f64) -> &[Breakpoint] {
        let first = self.breakpoints.partition_point(|b| b.at <= lo);
        let last = self.breakpoints.partition_point(|b| b.at < hi);
        &self.breakpoints[first..last.max(first)]
    }

    /// True when `self` and `other` have the same piece structure on `(lo, hi)`:
    /// matching breakpoints (ignoring jumps below `tol`), matching slope entering the
    /// interval and matching value at a reference point. Bounds may be infinite.
    pub fn restriction_equal(&self, other: &Self, lo: f64, hi: f64, tol: f64) -> bool {
        let slope_scale = unit_scale(self.slopes_on(lo, hi).into_iter().chain(other.slopes_on(lo, hi)));
        let jump_tol = tol * slope_scale;
        let significant = |f: &Self| -> Vec<Breakpoint> {
            f.breakpoints_in(lo, hi)
                .iter()
                .copied()
                .filter(|b| b.jump.abs() > jump_tol)
                .collect()
        };
        let (a, b) = (significant(self), significant(other));
        if a.len() != b.len() {
            return false;
        }
        let same_breaks = a.iter().zip(&b).all(|(p, q)| {
            (p.at - q.at).abs() <= tol * unit_scale([p.at, q.at])
                && (p.jump - q.jump).abs() <= jump_tol
        });
        if !same_breaks {
            return false;
        }
        let entering = |f: &Self| {
            if lo == f64::NEG_INFINITY {
                f.left_slope
            } else {
                f.one_sided_slopes(lo).1
            }
        };
        if (entering(self) - entering(other)).abs() > jump_tol {
            return false;
        }
        let r = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        let (u, v) = (self.evaluate(r), other.evaluate(r));
        (u - v).abs() <= tol * unit_scale([u, v])
    }

    /// Structural comparison up to a relative tolerance, independent of where the
    /// anchors sit.
    pub fn approx_same(&self, other: &Self, tol: f64) -> bool {
        if self.breakpoints.len() != other.breakpoints.len() {
            return false;
        }
        let slope_scale = unit_scale(self.piece_slopes().chain(other.piece_slopes()));
        let breaks = self.breakpoints.iter().zip(&other.breakpoints).all(|(p, q)| {
            (p.at - q.at).abs() <= tol * unit_scale([p.at, q.at])
                && (p.jump - q.jump).abs() <= tol * slope_scale
        });
        let slope = (self.left_slope - other.left_slope).abs() <= tol * slope_scale;
        let at = |x: f64| {
            let (u, v) = (self.evaluate(x), other.evaluate(x));
            (u - v).abs() <= tol * unit_scale([u, v])
        };
        breaks && slope && at(self.anchor.0) && at(other.anchor.0)
    }

    /// Re-runs canonicalization on this function's own parts.
    pub fn canonicalized(&self) -> Self {
        Self::new(self.anchor, self.left_slope, self.breakpoints.clone())
            .expect("canonical parts are finite")
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let bps = self
            .breakpoints
            .iter()
            .map(|b| Breakpoint {
                at: b.at,
                jump: alpha * b.jump,
            })
            .collect();
        Self::new(
            (self.anchor.0, alpha * self.anchor.1),
            alpha * self.left_slope,
            bps,
        )
        .expect("scaling by a finite factor keeps values finite")
    }

    /// `f(x) + slope * x + intercept`.
    pub fn plus_affine(&self, slope: f64, intercept: f64) -> Self {
        let (x0, v0) = self.anchor;
        Self::new(
            (x0, v0 + slope * x0 + intercept),
            self.left_slope + slope,
            self.breakpoints.clone(),
        )
        .expect("affine shift keeps values finite")
    }

    /// Pointwise sum.
    pub fn plus(&self, other: &Self) -> Self {
        let x0 = self.anchor.0;
        let mut bps = self.breakpoints.clone();
        bps.extend_from_slice(&other.breakpoints);
        Self::new(
            (x0, self.evaluate(x0) + other.evaluate(x0)),
            self.left_slope + other.left_slope,
            bps,
        )
        .expect("sum of finite functions is finite")
    }
}
