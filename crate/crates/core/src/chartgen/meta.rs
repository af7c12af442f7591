//! Ground-truth meta record written next to every rendered chart.

use serde::{Deserialize, Serialize};

use super::{ChartKind, CANVAS_HEIGHT, CANVAS_WIDTH};
use crate::catalog::{DataSeries, ValueKind};
use crate::scalar::Scalar;
use crate::trend::TrendClass;

pub const META_FORMAT_VERSION: u32 = 1;

/// Axis-aligned box in canvas units, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn within(&self, width: f64, height: f64) -> bool {
        const EPS: f64 = 1e-6;
        [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite())
            && self.x >= -EPS
            && self.y >= -EPS
            && self.w >= 0.0
            && self.h >= 0.0
            && self.right() <= width + EPS
            && self.bottom() <= height + EPS
    }

    pub fn overlaps(&self, other: &BBox) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x && x <= self.right() && y >= self.y && y <= self.bottom()
    }

    pub(super) fn rounded(self) -> Self {
        Self { x: round2(self.x), y: round2(self.y), w: round2(self.w), h: round2(self.h) }
    }
}

pub(super) fn round2(v: f64) -> f64 {
    let r = (v * 100.0).round() / 100.0;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Affine map between a data interval and a canvas interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAxis<T = f64> {
    pub d0: T,
    pub d1: T,
    pub p0: T,
    pub p1: T,
}

impl<T: Scalar> LinearAxis<T> {
    pub fn forward(&self, v: T) -> T {
        self.p0 + (v - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }

    pub fn inverse(&self, p: T) -> T {
        self.d0 + (p - self.p0) / (self.p1 - self.p0) * (self.d1 - self.d0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBox {
    pub text: String,
    pub font_size: f64,
    /// Text drawn rotated a quarter turn counter-clockwise.
    pub rotated: bool,
    pub bbox: BBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxisOrientation {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueAxis {
    pub orientation: AxisOrientation,
    /// Data values at the two ends of the axis.
    pub domain: [f64; 2],
    /// Canvas coordinates (y for vertical, x for horizontal) of `domain[0]` and `domain[1]`.
    pub pixel_range: [f64; 2],
}

impl ValueAxis {
    pub fn transform(&self) -> LinearAxis<f64> {
        LinearAxis { d0: self.domain[0], d1: self.domain[1], p0: self.pixel_range[0], p1: self.pixel_range[1] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryTick {
    pub label: String,
    /// Canvas coordinate of the slot center along the category axis.
    pub position: f64,
    pub font_size: f64,
    pub rotated: bool,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTick {
    pub label: String,
    pub value: f64,
    pub position: f64,
    pub font_size: f64,
    pub bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub name: String,
    pub name_bbox: BBox,
    pub marker_bbox: BBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendMeta {
    /// Resolved placement: `inside-top-right`, `inside-top-left`,
    /// `inside-bottom-right`, `inside-bottom-left`, `outside-right`, or `below-title`.
    pub placement: String,
    pub bbox: BBox,
    pub entries: Vec<LegendEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleMeta {
    pub marker_shape: String,
    pub bar_thickness: f64,
    pub line_style: super::LineStyle,
    pub legend_position: super::LegendPosition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeta {
    pub x_label: String,
    pub y_value: f64,
    /// `[x, y]` canvas position of the mark: line vertex, marker center, or bar end midpoint.
    pub canvas: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub name: String,
    pub color: String,
    pub color_hex: String,
    pub trend_class: TrendClass,
    pub points: Vec<PointMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartMeta {
    pub format_version: u32,
    pub image_index: u64,
    pub chart_kind: ChartKind,
    pub canvas: Canvas,
    pub title: TextBox,
    pub x_label: TextBox,
    pub y_label: TextBox,
    pub indicator: String,
    pub y_unit: String,
    pub entity_kind: String,
    pub temporal: bool,
    pub value_kind: ValueKind,
    pub plot_area: BBox,
    pub value_axis: ValueAxis,
    pub category_ticks: Vec<CategoryTick>,
    pub value_ticks: Vec<ValueTick>,
    pub legend: LegendMeta,
    pub style: StyleMeta,
    pub series: Vec<SeriesMeta>,
}

impl ChartMeta {
    pub fn series_names(&self) -> Vec<&str> {
        self.series.iter().map(|s| s.name.as_str()).collect()
    }

    /// Every box in the record with a short name for diagnostics.
    pub fn bboxes(&self) -> Vec<(String, BBox)> {
        let mut out = vec![
            ("title".to_string(), self.title.bbox),
            ("x_label".to_string(), self.x_label.bbox),
            ("y_label".to_string(), self.y_label.bbox),
            ("plot_area".to_string(), self.plot_area),
            ("legend".to_string(), self.legend.bbox),
        ];
        for (i, t) in self.category_ticks.iter().enumerate() {
            out.push((format!("category_ticks[{i}]"), t.bbox));
        }
        for (i, t) in self.value_ticks.iter().enumerate() {
            out.push((format!("value_ticks[{i}]"), t.bbox));
        }
        for (i, e) in self.legend.entries.iter().enumerate() {
            out.push((format!("legend.entries[{i}].name_bbox"), e.name_bbox));
            out.push((format!("legend.entries[{i}].marker_bbox"), e.marker_bbox));
        }
        out
    }
}

/// Maximum distance in canvas units between a point and the axis image of its value.
pub const ROUND_TRIP_TOLERANCE: f64 = 0.5;

/// Lists every invariant violation checkable from the record alone.
pub fn check_meta(meta: &ChartMeta) -> Vec<String> {
    let mut v = Vec::new();
    let (w, h) = (meta.canvas.width, meta.canvas.height);
    if w != CANVAS_WIDTH || h != CANVAS_HEIGHT {
        v.push(format!("canvas {w}x{h} is not {CANVAS_WIDTH}x{CANVAS_HEIGHT}"));
    }
    for (name, b) in meta.bboxes() {
        if !b.within(w, h) {
            v.push(format!("{name} bbox {b:?} outside canvas"));
        }
    }
    if meta.legend.bbox.overlaps(&meta.title.bbox) {
        v.push("legend overlaps title".into());
    }
    if !(1..=2).contains(&meta.series.len()) {
        v.push(format!("{} series", meta.series.len()));
    }
    if meta.legend.entries.len() != meta.series.len() {
        v.push(format!("{} legend entries for {} series", meta.legend.entries.len(), meta.series.len()));
    }
    if !(2..=8).contains(&meta.category_ticks.len()) {
        v.push(format!("{} category ticks", meta.category_ticks.len()));
    }
    let d = meta.value_axis.domain;
    let p = meta.value_axis.pixel_range;
    if !(d[1] > d[0]) || p[0] == p[1] {
        v.push(format!("degenerate value axis {d:?} -> {p:?}"));
        return v;
    }
    let axis = meta.value_axis.transform();
    let vertical = meta.value_axis.orientation == AxisOrientation::Vertical;
    let labels: Vec<&str> = meta.category_ticks.iter().map(|t| t.label.as_str()).collect();
    for s in &meta.series {
        if s.points.len() != labels.len() {
            v.push(format!("series `{}` has {} points for {} ticks", s.name, s.points.len(), labels.len()));
        }
        for (i, pt) in s.points.iter().enumerate() {
            if labels.get(i) != Some(&pt.x_label.as_str()) {
                v.push(format!("series `{}` point {i} label `{}` off the category axis", s.name, pt.x_label));
            }
            let [cx, cy] = pt.canvas;
            let coord = if vertical { cy } else { cx };
            let err = (coord - axis.forward(pt.y_value)).abs();
            if !err.is_finite() || err > ROUND_TRIP_TOLERANCE {
                v.push(format!("series `{}` point {i}: canvas {coord} is {err} units from value {}", s.name, pt.y_value));
            }
            let p = &meta.plot_area;
            let slack = ROUND_TRIP_TOLERANCE;
            if !BBox::new(p.x - slack, p.y - slack, p.w + 2.0 * slack, p.h + 2.0 * slack).contains_point(cx, cy) {
                v.push(format!("series `{}` point {i} outside plot area", s.name));
            }
        }
    }
    v
}

/// Rebuilds the plotted series from a meta record.
pub fn series_from_meta(meta: &ChartMeta) -> Vec<DataSeries> {
    meta.series
        .iter()
        .map(|s| DataSeries {
            series_name: s.name.clone(),
            x_labels: s.points.iter().map(|p| p.x_label.clone()).collect(),
            y_values: s.points.iter().map(|p| p.y_value).collect(),
            y_unit: meta.y_unit.clone(),
            temporal: meta.temporal,
            value_kind: meta.value_kind,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_round_trip() {
        let a = LinearAxis { d0: 0.0f64, d1: 100.0, p0: 400.0, p1: 50.0 };
        assert_eq!(a.forward(0.0), 400.0);
        assert_eq!(a.forward(100.0), 50.0);
        assert!((a.inverse(a.forward(42.0)) - 42.0).abs() < 1e-9);
        let f = LinearAxis { d0: 0.0f32, d1: 10.0, p0: 0.0, p1: 100.0 };
        assert_eq!(f.forward(5.0), 50.0);
    }

    #[test]
    fn bbox_bounds() {
        assert!(BBox::new(0.0, 0.0, 640.0, 480.0).within(640.0, 480.0));
        assert!(!BBox::new(-5.0, 0.0, 10.0, 10.0).within(640.0, 480.0));
        assert!(!BBox::new(635.0, 0.0, 10.0, 10.0).within(640.0, 480.0));
        assert!(BBox::new(0.0, 0.0, 10.0, 10.0).overlaps(&BBox::new(5.0, 5.0, 10.0, 10.0)));
        assert!(!BBox::new(0.0, 0.0, 10.0, 10.0).overlaps(&BBox::new(10.0, 0.0, 10.0, 10.0)));
    }
}
