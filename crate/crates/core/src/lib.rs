//! Minimal-norm ("ridgeless") one-layer ReLU interpolation of one-dimensional data.
//!
//! Given a dataset `(x_i, y_i)` this crate describes every continuous piecewise-linear
//! interpolant whose derivative has the smallest possible total variation, which is the
//! same family as the ReLU networks `z(x) = a x + b + Σ w2 [w1 x + b1]_+` interpolating the
//! data with the smallest weight cost `½ Σ (w1² + w2²)`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, plotting and the command
//! line live in the companion `ridgeless` crate.
//!
//! Indexing is 0-based throughout: knots `0..m`, chord slopes `slopes[i]` between knots
//! `i` and `i + 1`, data interval `i` is `(x_i, x_{i+1})`, and the discrete curvature is
//! defined at interior knots `1..m-1`.

#![no_std]

extern crate alloc;

pub mod characterize;
pub mod dataset;
pub mod generalization;
pub mod network;
pub mod oracle;
pub mod plfun;
pub mod propositions;
pub mod sample;

mod num;

pub use characterize::{
    characterize, check_membership, connect_the_dots, localized_slope_bounds, Characterization,
    ForcedReason, FreeBlock, IntervalVerdict, MembershipReport, SupportLine, Verdict, Violation,
    ViolationTag, DEFAULT_MEMBERSHIP_TOL,
};
pub use dataset::{Curvature, Dataset, DatasetError, SlopeProfile, DEFAULT_CURVATURE_TOL};
pub use network::{ReluNetwork, ReluUnit};
pub use plfun::{Breakpoint, PiecewiseLinear, PlError};
pub use sample::{perturb_to_nonmember, sample_member, SampleKnobs, TangentRule};
pub use generalization::{
    make_dataset_from, verify_localized_bounds, verify_lip_domination, verify_sup_error, Design,
    GroundTruth,
};
pub use oracle::{certify, certify_with, grid_tv_minimize, CertificateReport, GridOptions, OracleError};
