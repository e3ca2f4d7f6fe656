//! One-hidden-layer ReLU networks with a linear skip unit,
//! `z(x) = a x + b + Σ_j w2_j [w1_j x + b1_j]_+`, and their exact correspondence with
//! piecewise-linear functions.
//!
//! The weight cost `½ Σ (w1² + w2²)` leaves the biases and the linear unit free. A unit
//! contributes a slope jump of `w2 |w1|` at `-b1 / w1`; by AM–GM its cost is at least
//! that jump's magnitude, with equality exactly when `|w1| = |w2|`. Synthesis therefore
//! uses balanced units `±√|c|` and realizes cost = `‖Df‖_TV`.

use alloc::vec::Vec;

use crate::plfun::{Breakpoint, PiecewiseLinear};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReluUnit {
    pub w1: f64,
    pub b1: f64,
    pub w2: f64,
}

impl ReluUnit {
    pub fn evaluate(&self, x: f64) -> f64 {
        self.w2 * (self.w1 * x + self.b1).max(0.0)
    }

    /// Kink location, `None` for a constant unit (`w1 = 0`).
    pub fn kink(&self) -> Option<f64> {
        (self.w1 != 0.0).then(|| -self.b1 / self.w1)
    }

    pub fn cost(&self) -> f64 {
        0.5 * (self.w1 * self.w1 + self.w2 * self.w2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReluNetwork {
    /// Slope of the linear unit.
    pub a: f64,
    /// Output bias.
    pub b: f64,
    pub units: Vec<ReluUnit>,
}

impl ReluNetwork {
    pub fn width(&self) -> usize {
        self.units.len()
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.a * x + self.b + self.units.iter().map(|u| u.evaluate(x)).sum::<f64>()
    }

    /// `½ Σ_j (w1_j² + w2_j²)`.
    pub fn cost(&self) -> f64 {
        self.units.iter().map(ReluUnit::cost).sum()
    }

    /// Balanced synthesis: one unit per breakpoint, all with positive input weight.
    pub fn from_pl(f: &PiecewiseLinear) -> Self {
        let units = f
            .breakpoints()
            .iter()
            .map(|bp| {
                let w = libm::sqrt(bp.jump.abs());
                ReluUnit {
                    w1: w,
                    b1: -bp.at * w,
                    w2: if bp.jump < 0.0 { -w } else { w },
                }
            })
            .collect();
        // every unit is off left of its kink, so the linear unit is the leftmost piece
        let (x0, v0) = match f.breakpoints().first() {
            Some(bp) => (bp.at, f.breakpoint_values()[0]),
            None => f.anchor(),
        };
        Self {
            a: f.left_slope(),
            b: v0 - f.left_slope() * x0,
            units,
        }
    }

    /// Exact extraction. Units with `w1 < 0` are active on the left, so their slope
    /// `w2 w1` belongs to the leftmost piece; colliding kinks merge.
    pub fn to_pl(&self) -> PiecewiseLinear {
        let mut left_slope = self.a;
        let mut bps = Vec::with_capacity(self.units.len());
        for u in &self.units {
            if let Some(at) = u.kink() {
                if u.w1 < 0.0 {
                    left_slope += u.w2 * u.w1;
                }
                bps.push(Breakpoint {
                    at,
                    jump: u.w2 * u.w1.abs(),
                });
            }
        }
        let x0 = bps.iter().map(|b| b.at).fold(f64::INFINITY, f64::min);
        let x0 = if x0.is_finite() { x0 } else { 0.0 };
        PiecewiseLinear::new((x0, self.evaluate(x0)), left_slope, bps)
            .expect("finite network parameters give a finite function")
    }
}

/// Network whose function is `f` and whose cost equals `‖Df‖_TV`.
pub fn pl_to_network(f: &PiecewiseLinear) -> ReluNetwork {
    ReluNetwork::from_pl(f)
}

pub fn network_to_pl(net: &ReluNetwork) -> PiecewiseLinear {
    net.to_pl()
}
