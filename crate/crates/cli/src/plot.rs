//! Static SVG 1.1 figure: data, the chord interpolant, free-block envelopes and sampled
//! members. The minimal total variation is embedded as metadata.

use std::fmt::Write as _;

use ridgeless_core::{Characterization, PiecewiseLinear};

use crate::report::g17;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 50.0;
const METADATA_NS: &str = "urn:ridgeless:plot";
const MEMBER_COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn point(&self, (x, y): (f64, f64)) -> String {
        format!("{:.3},{:.3}", self.px(x), self.py(y))
    }
}

/// Abscissae where `f` may bend inside `[lo, hi]`, plus the ends.
fn vertices(f: &PiecewiseLinear, lo: f64, hi: f64) -> Vec<f64> {
    let mut xs = vec![lo];
    xs.extend(f.breakpoints_in(lo, hi).iter().map(|b| b.at).filter(|&x| x > lo && x < hi));
    xs.push(hi);
    xs
}

fn polyline(frame: &Frame, f: &PiecewiseLinear, lo: f64, hi: f64) -> String {
    vertices(f, lo, hi)
        .into_iter()
        .map(|x| frame.point((x, f.evaluate(x))))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Envelope outline of one block: chord boundary forward, support boundary back.
fn envelope_points(ch: &Characterization, block: usize, samples: usize) -> Vec<(f64, f64)> {
    let b = &ch.blocks[block];
    let (lo, hi) = (ch.dataset.x(b.first_knot), ch.dataset.x(b.last_knot));
    let xs: Vec<f64> = (0..=samples)
        .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
        .collect();
    let mut pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, ch.f_d.evaluate(x))).collect();
    pts.extend(xs.iter().rev().map(|&x| (x, b.support_bound(x))));
    pts
}

pub fn render(ch: &Characterization, members: &[PiecewiseLinear]) -> String {
    let d = &ch.dataset;
    let (x0, x1) = (d.x(0), d.x(d.len() - 1));
    let pad = 0.1 * (x1 - x0);
    let (lo, hi) = (x0 - pad, x1 + pad);

    let mut ys: Vec<f64> = d.ys().collect();
    for f in std::iter::once(&ch.f_d).chain(members) {
        ys.extend(vertices(f, lo, hi).into_iter().map(|x| f.evaluate(x)));
    }
    for k in 0..ch.blocks.len() {
        ys.extend(envelope_points(ch, k, 32).into_iter().map(|p| p.1));
    }
    let (ymin, ymax) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let ypad = 0.1 * (ymax - ymin).max(1e-9);
    let frame = Frame {
        x: (lo, hi),
        y: (ymin - ypad, ymax + ypad),
    };

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(svg, "<title>Minimal-TV interpolants of {} points</title>", d.len()).unwrap();
    writeln!(
        svg,
        r#"<metadata><rl:summary xmlns:rl="{METADATA_NS}" minimal_tv="{}" points="{}" blocks="{}" members="{}"/></metadata>"#,
        g17(ch.minimal_tv),
        d.len(),
        ch.blocks.len(),
        members.len()
    )
    .unwrap();
    writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="white" stroke="#888"/>"##,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    for (x, anchor) in [(lo, "start"), (hi, "end")] {
        writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="{anchor}">{}</text>"#,
            frame.px(x),
            HEIGHT - MARGIN + 16.0,
            fmt_tick(x)
        )
        .unwrap();
    }
    for y in [frame.y.0, frame.y.1] {
        writeln!(
            svg,
            r#"<text x="{:.3}" y="{:.3}" font-size="12" text-anchor="end">{}</text>"#,
            MARGIN - 4.0,
            frame.py(y) + 4.0,
            fmt_tick(y)
        )
        .unwrap();
    }

    svg.push_str("<g id=\"envelopes\">\n");
    for k in 0..ch.blocks.len() {
        let pts: Vec<String> = envelope_points(ch, k, 32).into_iter().map(|p| frame.point(p)).collect();
        writeln!(
            svg,
            r##"<polygon points="{}" fill="#9ecae1" fill-opacity="0.45" stroke="#3182bd" stroke-width="0.8"/>"##,
            pts.join(" ")
        )
        .unwrap();
    }
    svg.push_str("</g>\n<g id=\"members\">\n");
    for (k, f) in members.iter().enumerate() {
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.2" stroke-opacity="0.8"/>"#,
            polyline(&frame, f, lo, hi),
            MEMBER_COLORS[k % MEMBER_COLORS.len()]
        )
        .unwrap();
    }
    svg.push_str("</g>\n");
    writeln!(
        svg,
        r#"<polyline id="f_d" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        polyline(&frame, &ch.f_d, lo, hi)
    )
    .unwrap();
    svg.push_str("<g id=\"data\">\n");
    for &p in d.points() {
        let (cx, cy) = (frame.px(p.0), frame.py(p.1));
        writeln!(svg, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="#c00"/>"##).unwrap();
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}
