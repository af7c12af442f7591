//! Randomized chart specifications, SVG rendering, and ground-truth meta records.

mod meta;
mod render;
mod ticks;

pub use meta::{
    check_meta, series_from_meta, AxisOrientation, BBox, Canvas, CategoryTick, ChartMeta, LegendEntry, LegendMeta,
    LinearAxis, PointMeta, SeriesMeta, StyleMeta, TextBox, ValueAxis, ValueTick, META_FORMAT_VERSION,
};
pub use render::render;
pub use ticks::{format_ticks, nice_ticks, nice_ticks_within, pad_degenerate};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{DataSeries, SeriesSample};
use crate::rng::SplitMix64;

pub const CANVAS_WIDTH: f64 = 640.0;
pub const CANVAS_HEIGHT: f64 = 480.0;

#[derive(Debug, Error, PartialEq)]
pub enum ChartError {
    #[error("a chart needs 1 or 2 series, got {0}")]
    Arity(usize),
    #[error("series `{0}` does not share the first series' x labels")]
    LabelMismatch(String),
    #[error("series `{series}`: {reason}")]
    BadSeries { series: String, reason: String },
    #[error("bar charts need non-negative values; `{series}` has {value} at `{x_label}`")]
    NegativeBar { series: String, x_label: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartKind {
    Line,
    HorizontalBar,
    VerticalBar,
    Scatter,
}

impl ChartKind {
    pub const ALL: [ChartKind; 4] = [ChartKind::Line, ChartKind::HorizontalBar, ChartKind::VerticalBar, ChartKind::Scatter];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartKind::Line => "line",
            ChartKind::HorizontalBar => "horizontal-bar",
            ChartKind::VerticalBar => "vertical-bar",
            ChartKind::Scatter => "scatter",
        }
    }

    pub fn is_bar(self) -> bool {
        matches!(self, ChartKind::HorizontalBar | ChartKind::VerticalBar)
    }

    /// Noun phrase used in descriptions.
    pub fn phrase(self) -> &'static str {
        match self {
            ChartKind::Line => "line chart",
            ChartKind::HorizontalBar => "horizontal bar chart",
            ChartKind::VerticalBar => "bar chart",
            ChartKind::Scatter => "scatter plot",
        }
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ChartKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown chart kind `{s}`"))
    }
}

/// (name, hex)
pub const COLORS: [(&str, &str); 20] = [
    ("blue", "#1f77b4"),
    ("orange", "#ff7f0e"),
    ("green", "#2ca02c"),
    ("red", "#d62728"),
    ("purple", "#9467bd"),
    ("brown", "#8c564b"),
    ("pink", "#e377c2"),
    ("gray", "#7f7f7f"),
    ("olive", "#bcbd22"),
    ("cyan", "#17becf"),
    ("navy", "#1f3a93"),
    ("teal", "#008080"),
    ("maroon", "#800000"),
    ("gold", "#d4a017"),
    ("indigo", "#4b0082"),
    ("coral", "#ff7f50"),
    ("lime", "#32cd32"),
    ("slate", "#708090"),
    ("magenta", "#c71585"),
    ("sienna", "#a0522d"),
];

pub const MARKERS: [&str; 10] = [
    "circle",
    "square",
    "triangle-up",
    "triangle-down",
    "diamond",
    "plus",
    "cross",
    "star",
    "pentagon",
    "hexagon",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineStyle {
    Solid,
    Dashed,
    Dotted,
    DashDot,
}

impl LineStyle {
    pub const ALL: [LineStyle; 4] = [LineStyle::Solid, LineStyle::Dashed, LineStyle::Dotted, LineStyle::DashDot];

    pub fn dasharray(self) -> Option<&'static str> {
        match self {
            LineStyle::Solid => None,
            LineStyle::Dashed => Some("8 4"),
            LineStyle::Dotted => Some("2 3"),
            LineStyle::DashDot => Some("8 3 2 3"),
        }
    }
}

/// Requested legend placement. `InsideBest` takes the first free plot corner
/// and falls back to `OutsideRight` when every corner overlaps the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegendPosition {
    InsideBest,
    OutsideRight,
    BelowTitle,
}

impl LegendPosition {
    pub const ALL: [LegendPosition; 3] = [LegendPosition::InsideBest, LegendPosition::OutsideRight, LegendPosition::BelowTitle];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StyleSpec {
    /// Index into [`MARKERS`]; drawn for every chart, used only by scatter plots.
    pub marker_shape: usize,
    /// Indices into [`COLORS`], one per series, pairwise distinct.
    pub colors: Vec<usize>,
    /// Fraction of a category slot covered by its bar group.
    pub bar_thickness: f64,
    pub line_style: LineStyle,
    pub legend_position: LegendPosition,
    pub title_font_size: f64,
    pub label_font_size: f64,
    pub tick_font_size: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub image_index: u64,
    pub kind: ChartKind,
    pub series: Vec<DataSeries>,
    pub title: String,
    /// Label of the category or time axis.
    pub x_label: String,
    /// Label of the value axis, unit included.
    pub y_label: String,
    pub indicator: String,
    pub entity_kind: String,
    pub style: StyleSpec,
}

impl ChartSpec {
    pub fn validate(&self) -> Result<(), ChartError> {
        let n = self.series.len();
        if !(1..=2).contains(&n) {
            return Err(ChartError::Arity(n));
        }
        let first = &self.series[0];
        if self.kind.is_bar() {
            for s in &self.series {
                if let Some((x, &v)) = s.x_labels.iter().zip(&s.y_values).find(|(_, v)| **v < 0.0) {
                    return Err(ChartError::NegativeBar { series: s.series_name.clone(), x_label: x.clone(), value: v });
                }
            }
        }
        for s in &self.series {
            s.validate().map_err(|e| ChartError::BadSeries { series: s.series_name.clone(), reason: e.to_string() })?;
            if s.x_labels != first.x_labels {
                return Err(ChartError::LabelMismatch(s.series_name.clone()));
            }
        }
        let s = &self.style;
        if s.colors.len() != n || s.colors.iter().any(|&c| c >= COLORS.len()) || (n == 2 && s.colors[0] == s.colors[1]) {
            return Err(ChartError::BadSeries { series: first.series_name.clone(), reason: "invalid color assignment".into() });
        }
        if s.marker_shape >= MARKERS.len() || !(0.4..=0.9).contains(&s.bar_thickness) {
            return Err(ChartError::BadSeries { series: first.series_name.clone(), reason: "invalid style".into() });
        }
        Ok(())
    }
}

/// Fixed-metrics text model: each code point is `0.6·font_size` wide, a line is `1.2·font_size` tall.
pub fn estimate_text_bbox(text: &str, font_size: f64) -> (f64, f64) {
    (0.6 * font_size * text.chars().count() as f64, 1.2 * font_size)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Draws a style and composes title and axis labels for `sample`.
pub fn build_chart_spec(
    sample: &SeriesSample,
    kind: ChartKind,
    image_index: u64,
    rng: &mut SplitMix64,
) -> Result<ChartSpec, ChartError> {
    let series = &sample.series;
    let n = series.len();
    if !(1..=2).contains(&n) {
        return Err(ChartError::Arity(n));
    }
    if let Some(s) = series.iter().find(|s| s.x_labels != series[0].x_labels) {
        return Err(ChartError::LabelMismatch(s.series_name.clone()));
    }

    let colors = rng.sample_indices(COLORS.len(), n);
    let style = StyleSpec {
        marker_shape: rng.below(MARKERS.len()),
        colors,
        bar_thickness: (rng.uniform(0.4, 0.9) * 100.0).round() / 100.0,
        line_style: *rng.pick(&LineStyle::ALL),
        legend_position: *rng.pick(&LegendPosition::ALL),
        title_font_size: rng.range_inclusive(14, 18) as f64,
        label_font_size: rng.range_inclusive(11, 13) as f64,
        tick_font_size: rng.range_inclusive(9, 11) as f64,
    };

    let ind = &sample.indicator;
    let first = &series[0];
    let title = if first.temporal {
        let names: Vec<&str> = series.iter().map(|s| s.series_name.as_str()).collect();
        format!(
            "{} of {}, {}–{}",
            capitalize(&ind.name),
            names.join(" and "),
            first.x_labels[0],
            first.x_labels[first.x_labels.len() - 1]
        )
    } else {
        format!("{} by {}", capitalize(&ind.name), sample.entity_kind)
    };
    let x_label = if first.temporal { "Year".to_string() } else { capitalize(&sample.entity_kind) };
    let y_label = if ind.unit.is_empty() { capitalize(&ind.name) } else { format!("{} ({})", capitalize(&ind.name), ind.unit) };

    let spec = ChartSpec {
        image_index,
        kind,
        series: series.clone(),
        title,
        x_label,
        y_label,
        indicator: ind.name.clone(),
        entity_kind: sample.entity_kind.clone(),
        style,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{synth_catalog, sample_series, SampleOptions};

    #[test]
    fn text_metrics() {
        assert_eq!(estimate_text_bbox("", 10.0), (0.0, 12.0));
        assert_eq!(estimate_text_bbox("ab", 10.0), (12.0, 12.0));
        let (w, h) = estimate_text_bbox("2015", 8.0);
        assert!((w - 19.2).abs() < 1e-12 && (h - 9.6).abs() < 1e-12);
    }

    #[test]
    fn spec_is_deterministic_and_colors_distinct() {
        let cat = synth_catalog(1, 30, 20).unwrap();
        let mut rng = SplitMix64::new(9);
        let sample = sample_series(&cat, true, 2, SampleOptions::default(), &mut rng).unwrap();
        let a = build_chart_spec(&sample, ChartKind::Line, 0, &mut SplitMix64::new(5)).unwrap();
        let b = build_chart_spec(&sample, ChartKind::Line, 0, &mut SplitMix64::new(5)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.style.colors[0], a.style.colors[1]);
        assert!(a.title.contains(" and "));
    }

    #[test]
    fn all_markers_appear() {
        let cat = synth_catalog(2, 10, 10).unwrap();
        let mut rng = SplitMix64::new(3);
        let sample = sample_series(&cat, false, 1, SampleOptions::default(), &mut rng).unwrap();
        let mut seen = [false; 10];
        for _ in 0..1000 {
            seen[build_chart_spec(&sample, ChartKind::Scatter, 0, &mut rng).unwrap().style.marker_shape] = true;
        }
        assert!(seen.iter().all(|s| *s));
    }

    #[test]
    fn mismatched_labels_rejected() {
        let cat = synth_catalog(1, 30, 20).unwrap();
        let mut rng = SplitMix64::new(9);
        let mut sample = sample_series(&cat, true, 2, SampleOptions::default(), &mut rng).unwrap();
        sample.series[1].x_labels[0] = "1900".into();
        assert!(matches!(build_chart_spec(&sample, ChartKind::Line, 0, &mut rng), Err(ChartError::LabelMismatch(_))));
    }
}
