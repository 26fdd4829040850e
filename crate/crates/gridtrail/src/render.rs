//! Deterministic SVG export for trails and covering trees: grid nodes as
//! circles, segments as numbered edges, the bounding box as a dashed square.
//! Structures with k >= 3 are flattened either by an orthographic projection
//! onto a chosen axis pair or as per-layer small multiples.

use crate::geom::{Rat, Segment};
use num::ToPrimitive;
use svg::node::element::{Circle, Group, Line, Rectangle, Text};
use svg::Document;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("projection axis {0} out of range for dimension {1}")]
    BadAxis(usize, usize),
    #[error("projection axes must be distinct")]
    EqualAxes,
    #[error("layer axis {0} out of range for dimension {1}")]
    BadLayerAxis(usize, usize),
    #[error("nothing to draw")]
    Empty,
}

/// How to flatten a k-dimensional structure onto the page.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Orthographic projection: keep the two named axes, drop the rest.
    /// For k = 1 use Axes(0, 0) is invalid; use `default_projection`.
    Axes(usize, usize),
    /// One panel per value {0,1,2} of the named axis; segments constant on
    /// that axis are drawn in their panel, others as faint projections.
    Layers(usize),
}

/// The natural projection for a given dimension: the first two axes
/// (or the single axis against a zero ordinate for k = 1).
pub fn default_projection(k: usize) -> Projection {
    let _ = k;
    Projection::Axes(0, 1)
}

const UNIT: f64 = 60.0;
const MARGIN: f64 = 40.0;
const PANEL_GAP: f64 = 30.0;

fn rat_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(0.0)
}

fn fmt(x: f64) -> String {
    // Fixed three decimals keeps output byte-stable across platforms.
    format!("{:.3}", x)
}

struct Frame {
    ox: f64,
    oy: f64,
}

impl Frame {
    /// Map projected grid units to page coordinates (y grows downward).
    fn page(&self, u: f64, v: f64) -> (f64, f64) {
        (self.ox + u * UNIT, self.oy + (2.0 - v) * UNIT)
    }
}

fn project(coords: &[Rat], ax: usize, ay: Option<usize>) -> (f64, f64) {
    let u = rat_f64(&coords[ax]);
    let v = ay.map(|a| rat_f64(&coords[a])).unwrap_or(0.0);
    (u, v)
}

fn dashed_box(frame: &Frame) -> Rectangle {
    let (x, y) = frame.page(0.0, 2.0);
    Rectangle::new()
        .set("x", fmt(x))
        .set("y", fmt(y))
        .set("width", fmt(2.0 * UNIT))
        .set("height", fmt(2.0 * UNIT))
        .set("fill", "none")
        .set("stroke", "#555555")
        .set("stroke-width", "1")
        .set("stroke-dasharray", "6,4")
}

fn grid_circles(frame: &Frame, one_dim: bool) -> Group {
    let mut g = Group::new();
    let vs: &[i64] = if one_dim { &[0] } else { &[0, 1, 2] };
    for &v in vs {
        for u in 0..3i64 {
            let (x, y) = frame.page(u as f64, v as f64);
            g = g.add(
                Circle::new()
                    .set("cx", fmt(x))
                    .set("cy", fmt(y))
                    .set("r", "4")
                    .set("fill", "#222222"),
            );
        }
    }
    g
}

fn edge(frame: &Frame, a: (f64, f64), b: (f64, f64), index: usize, faint: bool) -> Group {
    let (x1, y1) = frame.page(a.0, a.1);
    let (x2, y2) = frame.page(b.0, b.1);
    let mut g = Group::new().add(
        Line::new()
            .set("x1", fmt(x1))
            .set("y1", fmt(y1))
            .set("x2", fmt(x2))
            .set("y2", fmt(y2))
            .set("stroke", if faint { "#bbbbbb" } else { "#c0392b" })
            .set("stroke-width", if faint { "1" } else { "2" }),
    );
    if !faint {
        g = g.add(
            Text::new(format!("{}", index))
                .set("x", fmt((x1 + x2) / 2.0 + 5.0))
                .set("y", fmt((y1 + y2) / 2.0 - 5.0))
                .set("font-size", "12")
                .set("font-family", "sans-serif")
                .set("fill", "#c0392b"),
        );
    }
    g
}

/// Render segments (a trail's consecutive edges or a tree's edge set) as a
/// standalone SVG document. Segment numbering follows input order from 1.
pub fn render_segments(
    k: usize,
    segments: &[Segment],
    projection: Projection,
) -> Result<String, RenderError> {
    if segments.is_empty() {
        return Err(RenderError::Empty);
    }
    match projection {
        Projection::Axes(ax, ay) => {
            if k >= 2 && ax == ay {
                return Err(RenderError::EqualAxes);
            }
            if ax >= k {
                return Err(RenderError::BadAxis(ax, k));
            }
            let ay = if k == 1 {
                None
            } else {
                if ay >= k {
                    return Err(RenderError::BadAxis(ay, k));
                }
                Some(ay)
            };
            let frame = Frame {
                ox: MARGIN,
                oy: MARGIN,
            };
            let mut doc = Document::new()
                .set("width", fmt(2.0 * MARGIN + 2.0 * UNIT))
                .set("height", fmt(2.0 * MARGIN + 2.0 * UNIT))
                .set(
                    "viewBox",
                    format!(
                        "0 0 {} {}",
                        fmt(2.0 * MARGIN + 2.0 * UNIT),
                        fmt(2.0 * MARGIN + 2.0 * UNIT)
                    ),
                );
            doc = doc.add(dashed_box(&frame));
            for (i, s) in segments.iter().enumerate() {
                let a = project(s.a().coords(), ax, ay);
                let b = project(s.b().coords(), ax, ay);
                doc = doc.add(edge(&frame, a, b, i + 1, false));
            }
            doc = doc.add(grid_circles(&frame, k == 1));
            Ok(doc.to_string())
        }
        Projection::Layers(axis) => {
            if axis >= k {
                return Err(RenderError::BadLayerAxis(axis, k));
            }
            if k < 3 {
                return Err(RenderError::BadLayerAxis(axis, k));
            }
            // Panels keep the two lowest remaining axes.
            let rest: Vec<usize> = (0..k).filter(|&a| a != axis).collect();
            let (ax, ay) = (rest[0], rest[1]);
            let panel_w = 2.0 * MARGIN + 2.0 * UNIT;
            let total_w = 3.0 * panel_w + 2.0 * PANEL_GAP;
            let total_h = 2.0 * MARGIN + 2.0 * UNIT + 20.0;
            let mut doc = Document::new()
                .set("width", fmt(total_w))
                .set("height", fmt(total_h))
                .set("viewBox", format!("0 0 {} {}", fmt(total_w), fmt(total_h)));
            for layer in 0..3i64 {
                let frame = Frame {
                    ox: MARGIN + layer as f64 * (panel_w + PANEL_GAP),
                    oy: MARGIN,
                };
                let mut g = Group::new().add(dashed_box(&frame));
                let lv = Rat::from_integer(layer.into());
                for (i, s) in segments.iter().enumerate() {
                    let in_layer =
                        s.a().coords()[axis] == lv && s.b().coords()[axis] == lv;
                    let crosses = !in_layer
                        && (s.a().coords()[axis] != s.b().coords()[axis]
                            || s.a().coords()[axis] == lv);
                    if in_layer {
                        let a = project(s.a().coords(), ax, Some(ay));
                        let b = project(s.b().coords(), ax, Some(ay));
                        g = g.add(edge(&frame, a, b, i + 1, false));
                    } else if crosses {
                        let a = project(s.a().coords(), ax, Some(ay));
                        let b = project(s.b().coords(), ax, Some(ay));
                        g = g.add(edge(&frame, a, b, i + 1, true));
                    }
                }
                g = g.add(grid_circles(&frame, false));
                let (lx, ly) = frame.page(0.0, -0.4);
                g = g.add(
                    Text::new(format!("axis {} = {}", axis, layer))
                        .set("x", fmt(lx))
                        .set("y", fmt(ly))
                        .set("font-size", "13")
                        .set("font-family", "sans-serif")
                        .set("fill", "#222222"),
                );
                doc = doc.add(g);
            }
            Ok(doc.to_string())
        }
    }
}
