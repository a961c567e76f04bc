//! Standalone SVG 1.1 rendering of ROC/PR curves and SHAP beeswarms.
//!
//! Output is a pure function of the inputs (and the jitter seed), with
//! coordinates printed at two decimals, so reruns are byte-identical.

use std::fmt::Write;

use covboost::dataset::{Feature, NUM_FEATURES};
use covboost::rng::derive_seed;
use covboost::shap::FeatureRanking;

pub const MARGIN: f64 = 60.0;
pub const PLOT_SIZE: f64 = 480.0;

const LINE_COLOR: &str = "#1f77b4";
const VALUE_COLORS: [&str; 2] = ["#1f77b4", "#d62728"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Roc,
    Pr,
}

impl CurveKind {
    fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            CurveKind::Roc => ("False positive rate", "True positive rate"),
            CurveKind::Pr => ("Recall", "Precision"),
        }
    }
}

/// Maps a unit-square point to canvas coordinates (y grows downward).
pub fn map_unit(x: f64, y: f64) -> (f64, f64) {
    (MARGIN + x * PLOT_SIZE, MARGIN + (1.0 - y) * PLOT_SIZE)
}

fn header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
}

fn point_list(points: impl Iterator<Item = (f64, f64)>) -> String {
    points
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Curve through `points` (x, y in [0, 1]) with an optional pointwise band
/// given as `(x, y_lo, y_hi)` triples.
pub fn curve_svg(kind: CurveKind, points: &[(f64, f64)], band: Option<&[(f64, f64, f64)]>) -> String {
    let side = 2.0 * MARGIN + PLOT_SIZE;
    let mut out = String::new();
    header(&mut out, side, side);

    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT_SIZE}" height="{PLOT_SIZE}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let (x, y0) = map_unit(t, 0.0);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#,
            y0 + 20.0
        );
        let (x0, y) = map_unit(0.0, t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.1}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let (xlabel, ylabel) = kind.axis_labels();
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{xlabel}</text>"#,
        MARGIN + PLOT_SIZE / 2.0,
        side - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{0:.2}" text-anchor="middle" font-size="14" transform="rotate(-90 15 {0:.2})">{ylabel}</text>"#,
        MARGIN + PLOT_SIZE / 2.0
    );

    if let Some(band) = band {
        let upper = band.iter().map(|&(x, _, hi)| map_unit(x, hi));
        let lower = band.iter().rev().map(|&(x, lo, _)| map_unit(x, lo));
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{LINE_COLOR}" fill-opacity="0.25" stroke="none"/>"#,
            point_list(upper.chain(lower))
        );
    }
    if kind == CurveKind::Roc {
        let (x0, y0) = map_unit(0.0, 0.0);
        let (x1, y1) = map_unit(1.0, 1.0);
        let _ = writeln!(
            out,
            r##"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="#999999" stroke-dasharray="4 4"/>"##
        );
    }
    let _ = writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="{LINE_COLOR}" stroke-width="2"/>"#,
        point_list(points.iter().map(|&(x, y)| map_unit(x, y)))
    );
    out.push_str("</svg>\n");
    out
}

/// One explained (record, feature) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmPoint {
    pub feature: Feature,
    pub record_index: usize,
    pub shap_value: f64,
    pub feature_value: bool,
}

const STRIP_HEIGHT: f64 = 48.0;
const LABEL_WIDTH: f64 = 180.0;
const SWARM_WIDTH: f64 = 540.0;
const DOT_RADIUS: f64 = 2.5;

/// Beeswarm with one horizontal strip per feature, strongest mean |SHAP|
/// on top.
///
/// Within a strip, points are visited in an order drawn from `seed` and
/// dropped into pixel bins one dot wide; the k-th arrival in a bin is
/// offset alternately above and below the strip centre, wrapping once the
/// strip is full. A small seeded wobble breaks up the resulting grid.
pub fn beeswarm_svg(points: &[SwarmPoint], seed: u64) -> String {
    let mut sums = [0.0f64; NUM_FEATURES];
    let mut counts = [0usize; NUM_FEATURES];
    for p in points {
        sums[p.feature.index()] += p.shap_value.abs();
        counts[p.feature.index()] += 1;
    }
    let means: [f64; NUM_FEATURES] = std::array::from_fn(|i| {
        if counts[i] == 0 {
            0.0
        } else {
            sums[i] / counts[i] as f64
        }
    });
    let order = FeatureRanking::from_means(means).features();

    let (mut lo, mut hi) = points.iter().fold((0.0f64, 0.0f64), |(lo, hi), p| {
        (lo.min(p.shap_value), hi.max(p.shap_value))
    });
    if hi - lo <= 0.0 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let to_x = |v: f64| LABEL_WIDTH + (v - lo) / (hi - lo) * SWARM_WIDTH;

    let top = 40.0;
    let width = LABEL_WIDTH + SWARM_WIDTH + 40.0;
    let axis_y = top + STRIP_HEIGHT * NUM_FEATURES as f64;
    let height = axis_y + 70.0;
    let mut out = String::new();
    header(&mut out, width, height);

    let zx = to_x(0.0);
    let _ = writeln!(
        out,
        r##"<line x1="{zx:.2}" y1="{top:.2}" x2="{zx:.2}" y2="{axis_y:.2}" stroke="#999999" stroke-dasharray="4 4"/>"##
    );
    let _ = writeln!(
        out,
        r#"<line x1="{LABEL_WIDTH:.2}" y1="{axis_y:.2}" x2="{:.2}" y2="{axis_y:.2}" stroke="black"/>"#,
        LABEL_WIDTH + SWARM_WIDTH
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let x = to_x(v);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{axis_y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            axis_y + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{v:.2}</text>"#,
            axis_y + 20.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">SHAP value (log-odds)</text>"#,
        LABEL_WIDTH + SWARM_WIDTH / 2.0,
        axis_y + 42.0
    );
    for (v, color) in VALUE_COLORS.iter().enumerate() {
        let x = LABEL_WIDTH + 150.0 * v as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="12" width="10" height="10" fill="{color}"/><text x="{:.2}" y="21">feature value {v}</text>"#,
            x + 14.0
        );
    }

    let step = 2.0 * DOT_RADIUS * 0.9;
    let max_level = ((STRIP_HEIGHT / 2.0 - DOT_RADIUS) / step).floor() as usize;
    let n_bins = (SWARM_WIDTH / (2.0 * DOT_RADIUS)).ceil() as usize + 1;
    let mut bins = vec![0usize; n_bins];
    for (row, feature) in order.iter().enumerate() {
        let centre = top + STRIP_HEIGHT * (row as f64 + 0.5);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LABEL_WIDTH - 10.0,
            centre + 4.0,
            feature.name()
        );
        let mut strip: Vec<(u64, &SwarmPoint)> = points
            .iter()
            .filter(|p| p.feature == *feature)
            .map(|p| {
                (
                    derive_seed(seed, ((feature.index() as u64) << 56) ^ p.record_index as u64),
                    p,
                )
            })
            .collect();
        strip.sort_by_key(|&(h, p)| (h, p.record_index));
        bins.iter_mut().for_each(|b| *b = 0);
        for (h, p) in strip {
            let x = to_x(p.shap_value);
            let bin = (((x - LABEL_WIDTH) / (2.0 * DOT_RADIUS)) as usize).min(n_bins - 1);
            let k = bins[bin];
            bins[bin] += 1;
            let level = k.div_ceil(2) % (max_level + 1);
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            let wobble = ((h >> 11) as f64 * (1.0 / (1u64 << 53) as f64) - 0.5) * step * 0.5;
            let y = centre + sign * level as f64 * step + wobble;
            let _ = writeln!(
                out,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="{DOT_RADIUS}" fill="{}"/>"#,
                VALUE_COLORS[p.feature_value as usize]
            );
        }
    }
    out.push_str("</svg>\n");
    out
}
