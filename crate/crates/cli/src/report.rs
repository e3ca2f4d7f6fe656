//! JSON report shapes and the plain-text renderings printed by the command line.

use std::fmt::Write as _;

use ridgeless_core::generalization::{LipReport, LocalizedReport, RandomDesignReport, SupErrorReport};
use ridgeless_core::oracle::CertificateReport;
use ridgeless_core::{Characterization, Curvature, MembershipReport, SupportLine, Verdict};
use serde::Serialize;

/// `printf("%.17g")`: 17 significant digits, trailing zeros dropped.
pub fn g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Serialize)]
pub struct SupportJson {
    pub through: [f64; 2],
    pub slope: f64,
}

impl From<&SupportLine> for SupportJson {
    fn from(l: &SupportLine) -> Self {
        Self {
            through: [l.through.0, l.through.1],
            slope: l.slope,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictJson {
    pub index: usize,
    pub interval: [f64; 2],
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct BlockJson {
    pub first_knot: usize,
    pub last_knot: usize,
    pub sign: i8,
    pub incoming_support: SupportJson,
    pub outgoing_support: SupportJson,
}

#[derive(Debug, Serialize)]
pub struct CharacterizationJson {
    pub m: usize,
    pub slopes: Vec<f64>,
    /// Curvature sign at knots `1..m-1`.
    pub curvatures: Vec<i8>,
    pub verdicts: Vec<VerdictJson>,
    pub blocks: Vec<BlockJson>,
    pub inflection_set: Vec<usize>,
    pub minimal_tv: f64,
    pub minimal_tv_via_inflections: f64,
    pub singleton: bool,
}

impl From<&Characterization> for CharacterizationJson {
    fn from(ch: &Characterization) -> Self {
        let d = &ch.dataset;
        let verdicts = ch
            .verdicts
            .iter()
            .map(|v| {
                let interval = [d.x(v.index), d.x(v.index + 1)];
                match v.verdict {
                    Verdict::Forced(r) => VerdictJson {
                        index: v.index,
                        interval,
                        kind: "forced",
                        reason: Some(r.tag().as_str()),
                        block: None,
                    },
                    Verdict::Free { block } => VerdictJson {
                        index: v.index,
                        interval,
                        kind: "free",
                        reason: None,
                        block: Some(block),
                    },
                }
            })
            .collect();
        let blocks = ch
            .blocks
            .iter()
            .map(|b| BlockJson {
                first_knot: b.first_knot,
                last_knot: b.last_knot,
                sign: b.sign.sign(),
                incoming_support: (&b.incoming_support).into(),
                outgoing_support: (&b.outgoing_support).into(),
            })
            .collect();
        Self {
            m: ch.m(),
            slopes: ch.profile.slopes.clone(),
            curvatures: ch.profile.signs(),
            verdicts,
            blocks,
            inflection_set: ch.inflection_set.clone(),
            minimal_tv: ch.minimal_tv,
            minimal_tv_via_inflections: ch.minimal_tv_via_inflections,
            singleton: ch.is_singleton(),
        }
    }
}

fn sign_word(c: Curvature) -> &'static str {
    match c {
        Curvature::Convex => "convex",
        Curvature::Concave => "concave",
        Curvature::Flat => "flat",
    }
}

pub fn characterization_text(ch: &Characterization) -> String {
    let d = &ch.dataset;
    let mut out = String::new();
    writeln!(out, "points {}", ch.m()).unwrap();
    writeln!(out, "minimal_tv {}", g17(ch.minimal_tv)).unwrap();
    let set: Vec<String> = ch.inflection_set.iter().map(usize::to_string).collect();
    writeln!(out, "inflection_set {}", set.join(" ")).unwrap();
    for v in &ch.verdicts {
        let span = format!("({}, {})", g17(d.x(v.index)), g17(d.x(v.index + 1)));
        match v.verdict {
            Verdict::Forced(r) => writeln!(out, "interval {} {span} forced {}", v.index, r.tag().as_str()),
            Verdict::Free { block } => writeln!(out, "interval {} {span} free block {block}", v.index),
        }
        .unwrap();
    }
    for (k, b) in ch.blocks.iter().enumerate() {
        writeln!(
            out,
            "block {k} knots {}..={} {} support_in {} support_out {}",
            b.first_knot,
            b.last_knot,
            sign_word(b.sign),
            g17(b.incoming_support.slope),
            g17(b.outgoing_support.slope)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub tag: &'static str,
    pub location: f64,
    pub magnitude: f64,
}

#[derive(Debug, Serialize)]
pub struct MembershipJson {
    pub is_member: bool,
    pub direct_pass: bool,
    pub tv_pass: bool,
    pub tv: f64,
    pub minimal_tv: f64,
    pub violations: Vec<ViolationJson>,
}

impl From<&MembershipReport> for MembershipJson {
    fn from(r: &MembershipReport) -> Self {
        Self {
            is_member: r.is_member,
            direct_pass: r.direct_pass,
            tv_pass: r.tv_pass,
            tv: r.tv,
            minimal_tv: r.minimal_tv,
            violations: r
                .violations
                .iter()
                .map(|v| ViolationJson {
                    tag: v.tag.as_str(),
                    location: v.location,
                    magnitude: v.magnitude,
                })
                .collect(),
        }
    }
}

pub fn membership_text(r: &MembershipReport) -> String {
    let mut out = String::new();
    writeln!(out, "member {}", r.is_member).unwrap();
    writeln!(out, "direct_pass {}", r.direct_pass).unwrap();
    writeln!(out, "tv_pass {}", r.tv_pass).unwrap();
    writeln!(out, "tv {}", g17(r.tv)).unwrap();
    writeln!(out, "minimal_tv {}", g17(r.minimal_tv)).unwrap();
    for v in &r.violations {
        writeln!(
            out,
            "violation {} at {} magnitude {}",
            v.tag.as_str(),
            g17(v.location),
            g17(v.magnitude)
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Serialize)]
pub struct CertificateJson {
    pub target: f64,
    pub achieved: f64,
    pub gap: f64,
    pub pass: bool,
    pub residual: f64,
    /// Simplex pivots taken.
    pub iterations: usize,
    pub minimizer_is_member_advisory: bool,
    pub points_per_gap: usize,
    pub tol: f64,
}

impl From<&CertificateReport> for CertificateJson {
    fn from(r: &CertificateReport) -> Self {
        Self {
            target: r.target,
            achieved: r.achieved,
            gap: r.gap,
            pass: r.pass,
            residual: r.residual,
            iterations: r.pivots,
            minimizer_is_member_advisory: r.minimizer_is_member,
            points_per_gap: r.points_per_gap,
            tol: r.tol,
        }
    }
}

pub fn certificate_text(r: &CertificateReport) -> String {
    format!(
        "target {}\nachieved {}\ngap {}\npass {}\nresidual {}\niterations {}\nminimizer_is_member {} (advisory)\n",
        g17(r.target),
        g17(r.achieved),
        g17(r.gap),
        r.pass,
        g17(r.residual),
        r.pivots,
        r.minimizer_is_member
    )
}

#[derive(Debug, Serialize)]
pub struct LipJson {
    pub lipschitz: f64,
    pub fd_norm: f64,
    pub max_member_norm: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

impl From<&LipReport> for LipJson {
    fn from(r: &LipReport) -> Self {
        Self {
            lipschitz: r.lipschitz,
            fd_norm: r.fd_norm,
            max_member_norm: r.member_norms.iter().copied().fold(0.0, f64::max),
            max_ratio: r.max_ratio,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SupJson {
    pub m: usize,
    pub bound: f64,
    pub localized_bound: f64,
    pub achieved_grid: f64,
    pub achieved_exact: f64,
    pub slack: f64,
    pub worst_member: Option<usize>,
    pub pass: bool,
    pub localized_pass: bool,
}

impl From<&SupErrorReport> for SupJson {
    fn from(r: &SupErrorReport) -> Self {
        Self {
            m: r.m,
            bound: r.bound,
            localized_bound: r.localized_bound,
            achieved_grid: r.achieved,
            achieved_exact: r.exact,
            slack: r.slack,
            worst_member: r.worst_member,
            pass: r.pass,
            localized_pass: r.localized_pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LocalizedJson {
    pub bounds: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_member_norm: f64,
    pub fd_norm: f64,
    pub per_interval_pass: bool,
    pub aggregate_pass: bool,
    pub pass: bool,
}

impl From<&LocalizedReport> for LocalizedJson {
    fn from(r: &LocalizedReport) -> Self {
        Self {
            bounds: r.bounds.clone(),
            deviations: r.deviations.clone(),
            max_member_norm: r.max_member_norm,
            fd_norm: r.fd_norm,
            per_interval_pass: r.per_interval_pass,
            aggregate_pass: r.aggregate_pass,
            pass: r.pass,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RandomDesignJson {
    pub m: usize,
    pub largest_spacing: f64,
    pub sup_error: f64,
    pub normalized: f64,
}

impl From<&RandomDesignReport> for RandomDesignJson {
    fn from(r: &RandomDesignReport) -> Self {
        Self {
            m: r.m,
            largest_spacing: r.largest_spacing,
            sup_error: r.sup_error,
            normalized: r.normalized,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundsJson {
    pub members: usize,
    /// Largest `|y_i - f_*(x_i)|`; the bounds assume this is zero.
    pub data_mismatch: f64,
    pub lipschitz: LipJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_error: Option<SupJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_error_skipped: Option<String>,
    pub localized: LocalizedJson,
    pub gradient_estimate_failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_design: Option<RandomDesignJson>,
    pub pass: bool,
}

pub fn bounds_text(b: &BoundsJson) -> String {
    let mut out = String::new();
    writeln!(out, "members {}", b.members).unwrap();
    writeln!(out, "data_mismatch {}", g17(b.data_mismatch)).unwrap();
    writeln!(
        out,
        "lipschitz L {} fd {} max_member {} pass {}",
        g17(b.lipschitz.lipschitz),
        g17(b.lipschitz.fd_norm),
        g17(b.lipschitz.max_member_norm),
        b.lipschitz.pass
    )
    .unwrap();
    match (&b.sup_error, &b.sup_error_skipped) {
        (Some(s), _) => writeln!(
            out,
            "sup_error achieved {} bound {} localized_bound {} pass {} localized_pass {}",
            g17(s.achieved_grid.max(s.achieved_exact)),
            g17(s.bound),
            g17(s.localized_bound),
            s.pass,
            s.localized_pass
        )
        .unwrap(),
        (None, Some(why)) => writeln!(out, "sup_error skipped: {why}").unwrap(),
        (None, None) => {}
    }
    writeln!(
        out,
        "localized per_interval {} aggregate {} max_member {} fd {}",
        b.localized.per_interval_pass,
        b.localized.aggregate_pass,
        g17(b.localized.max_member_norm),
        g17(b.localized.fd_norm)
    )
    .unwrap();
    writeln!(out, "gradient_estimate_failures {}", b.gradient_estimate_failures).unwrap();
    if let Some(r) = &b.random_design {
        writeln!(
            out,
            "random_design m {} largest_spacing {} sup_error {} normalized {}",
            r.m,
            g17(r.largest_spacing),
            g17(r.sup_error),
            g17(r.normalized)
        )
        .unwrap();
    }
    writeln!(out, "pass {}", b.pass).unwrap();
    out
}
