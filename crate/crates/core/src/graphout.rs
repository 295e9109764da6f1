//! Graph geometry and SVG rendering for climb traces.
//!
//! Two scaling modes: `Thumbnail` stretches the whole trace across a box,
//! `Detail` draws at a fixed 100 px per second so the graph scrolls
//! horizontally. Each second of the trace gets a background band whose
//! darkness follows that second's score.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::ClimbTrace;
use crate::metrics::{per_second_scores, WindowScore};

pub const DETAIL_PX_PER_SECOND: f64 = 100.0;

/// Score at which a window's background reaches full darkness.
pub const DARKNESS_SATURATION_SCORE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("trace is empty")]
    EmptyTrace,
    #[error("box dimensions must be positive")]
    InvalidBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    Thumbnail,
    Detail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shade {
    pub window: usize,
    pub darkness: f64,
    /// Score the darkness was derived from.
    pub score: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tick {
    pub x: f64,
    pub seconds: u32,
}

/// Renderer-independent description of a trace graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub mode: GraphMode,
    pub width: f64,
    pub height: f64,
    pub px_per_second: f64,
    /// Magnitude mapped to `y = 0`.
    pub y_max: f64,
    pub points: Vec<Point>,
    pub shading: Vec<Shade>,
    pub ticks: Vec<Tick>,
}

/// Linear darkness in `[0, 1]` for each window score.
pub fn shade(scores: &[WindowScore]) -> Vec<f64> {
    scores
        .iter()
        .map(|w| (f64::from(w.score) / DARKNESS_SATURATION_SCORE).min(1.0))
        .collect()
}

pub fn layout(
    trace: &ClimbTrace,
    mode: GraphMode,
    box_width: f64,
    box_height: f64,
) -> Result<GraphSpec, GraphError> {
    if trace.is_empty() {
        return Err(GraphError::EmptyTrace);
    }
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !valid(box_height) || (mode == GraphMode::Thumbnail && !valid(box_width)) {
        return Err(GraphError::InvalidBox);
    }

    let duration = trace.duration();
    let (width, px_per_second) = match mode {
        GraphMode::Detail => (
            (DETAIL_PX_PER_SECOND * duration).ceil(),
            DETAIL_PX_PER_SECOND,
        ),
        GraphMode::Thumbnail => (
            box_width,
            if duration > 0.0 { box_width / duration } else { 0.0 },
        ),
    };

    let y_max = trace.values().iter().copied().fold(0.0, f64::max);
    let last = trace.len() - 1;
    let points = trace
        .values()
        .iter()
        .enumerate()
        .map(|(i, &m)| {
            let x = match mode {
                GraphMode::Detail => DETAIL_PX_PER_SECOND * trace.time_at(i),
                // Pin the ends so the trace spans the box exactly.
                GraphMode::Thumbnail if i == last => box_width,
                GraphMode::Thumbnail => trace.time_at(i) * px_per_second,
            };
            let y = if y_max > 0.0 {
                box_height - m / y_max * box_height
            } else {
                box_height
            };
            Point { x, y }
        })
        .collect();

    let scores = per_second_scores(trace.series()).unwrap_or_default();
    let shading = scores
        .iter()
        .zip(shade(&scores))
        .map(|(w, darkness)| Shade {
            window: w.window,
            darkness,
            score: w.score,
        })
        .collect();

    let ticks = match mode {
        GraphMode::Detail => (0..=duration.floor() as u32)
            .map(|s| Tick {
                x: DETAIL_PX_PER_SECOND * f64::from(s),
                seconds: s,
            })
            .collect(),
        GraphMode::Thumbnail => Vec::new(),
    };

    Ok(GraphSpec {
        mode,
        width,
        height: box_height,
        px_per_second,
        y_max,
        points,
        shading,
        ticks,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SvgOptions {
    /// Print each window's score inside its band.
    pub score_labels: bool,
}

pub fn render_svg(spec: &GraphSpec) -> Vec<u8> {
    render_svg_with(spec, SvgOptions::default())
}

/// Deterministic SVG 1.1. Coordinates are printed with two decimals.
pub fn render_svg_with(spec: &GraphSpec, options: SvgOptions) -> Vec<u8> {
    let mut out = String::new();
    let (w, h) = (spec.width, spec.height);
    let _ = writeln!(out, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"##
    );

    for s in &spec.shading {
        let x0 = s.window as f64 * spec.px_per_second;
        let x1 = (x0 + spec.px_per_second).min(w);
        if x1 <= x0 {
            continue;
        }
        let _ = writeln!(
            out,
            r##"  <rect class="shade" x="{x0:.2}" y="0" width="{:.2}" height="{h:.2}" fill="#000000" fill-opacity="{:.3}"/>"##,
            x1 - x0,
            s.darkness
        );
        if options.score_labels {
            let _ = writeln!(
                out,
                r##"  <text class="score" x="{:.2}" y="12" font-size="10" text-anchor="middle">{}</text>"##,
                (x0 + x1) / 2.0,
                s.score
            );
        }
    }

    if spec.mode == GraphMode::Detail && !spec.ticks.is_empty() {
        let _ = writeln!(out, r##"  <g class="ticks" stroke="#999999" stroke-width="1">"##);
        for t in &spec.ticks {
            let _ = writeln!(
                out,
                r##"    <line x1="{x:.2}" y1="{h:.2}" x2="{x:.2}" y2="{:.2}"/>"##,
                h - 6.0,
                x = t.x
            );
        }
        let _ = writeln!(out, "  </g>");
        let _ = writeln!(out, r##"  <g class="tick-labels" font-size="9" fill="#666666">"##);
        for t in &spec.ticks {
            let _ = writeln!(
                out,
                r##"    <text x="{:.2}" y="{:.2}">{}s</text>"##,
                t.x + 2.0,
                h - 8.0,
                t.seconds
            );
        }
        let _ = writeln!(out, "  </g>");
    }

    out.push_str(r##"  <polyline class="trace" fill="none" stroke="#d0413e" stroke-width="1.5" points=""##);
    for (i, p) in spec.points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{:.2},{:.2}", p.x, p.y);
    }
    out.push_str("\"/>\n</svg>\n");
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(values: Vec<f64>) -> ClimbTrace {
        ClimbTrace::new(values, 0, vec![]).unwrap()
    }

    fn wave(n: usize) -> Vec<f64> {
        (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7).sin().abs()).collect()
    }

    #[test]
    fn detail_width_is_100px_per_second() {
        let spec = layout(&trace(wave(201)), GraphMode::Detail, 300.0, 120.0).unwrap();
        assert_eq!(spec.width, 1000.0);
        assert_eq!(spec.ticks.len(), 11);
        assert_eq!(spec.points[20].x, 100.0);
    }

    #[test]
    fn thumbnail_spans_box() {
        let spec = layout(&trace(wave(137)), GraphMode::Thumbnail, 300.0, 80.0).unwrap();
        assert_eq!(spec.points.first().unwrap().x, 0.0);
        assert_eq!(spec.points.last().unwrap().x, 300.0);
        assert_eq!(spec.width, 300.0);
        assert!(spec.ticks.is_empty());
    }

    #[test]
    fn flat_trace_is_flat() {
        let spec = layout(&trace(vec![1.0; 50]), GraphMode::Detail, 10.0, 80.0).unwrap();
        assert!(spec.points.iter().all(|p| p.y == spec.points[0].y));
        let zero = layout(&trace(vec![0.0; 5]), GraphMode::Detail, 10.0, 80.0).unwrap();
        assert!(zero.points.iter().all(|p| p.y == 80.0));
    }

    #[test]
    fn single_sample_thumbnail() {
        let spec = layout(&trace(vec![1.0]), GraphMode::Thumbnail, 300.0, 80.0).unwrap();
        assert_eq!(spec.points.len(), 1);
        assert!(spec.shading.is_empty());
    }

    #[test]
    fn invalid_box() {
        assert_eq!(
            layout(&trace(vec![1.0; 3]), GraphMode::Thumbnail, 0.0, 80.0),
            Err(GraphError::InvalidBox)
        );
    }

    #[test]
    fn shade_rules() {
        let w = |score| WindowScore { window: 0, score };
        assert_eq!(shade(&[w(0), w(50), w(240)]), vec![0.0, 0.5, 1.0]);
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn svg_structure() {
        let spec = layout(&trace(wave(40)), GraphMode::Detail, 10.0, 80.0).unwrap();
        assert_eq!(spec.shading.len(), 2);
        let svg = String::from_utf8(render_svg(&spec)).unwrap();
        assert_eq!(count(&svg, "<rect"), 2);
        assert_eq!(count(&svg, "<polyline"), 1);
        assert!(!svg.contains("class=\"score\""));
        assert_eq!(render_svg(&spec), svg.as_bytes());

        let labelled = String::from_utf8(render_svg_with(
            &spec,
            SvgOptions { score_labels: true },
        ))
        .unwrap();
        assert_eq!(count(&labelled, "class=\"score\""), 2);

        let mut bare = spec.clone();
        bare.shading.clear();
        bare.ticks.clear();
        let svg = String::from_utf8(render_svg(&bare)).unwrap();
        assert_eq!(count(&svg, "<rect"), 0);
        assert_eq!(count(&svg, "<polyline"), 1);
    }
}
