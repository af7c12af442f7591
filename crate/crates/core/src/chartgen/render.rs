//! Layout and SVG emission.
//!
//! Layout, in canvas units with the origin at the top-left corner:
//! a 10-unit outer margin; the title centered on top; an optional legend row
//! under the title or a legend column on the right; the value-axis label and
//! tick labels on the left (vertical value axis) or at the bottom (horizontal
//! bars); category labels on the other axis, turned a quarter turn when they
//! do not fit their slot. The plot area takes whatever remains.

use std::fmt::Write as _;

use super::meta::{round2, BBox, Canvas, CategoryTick, ChartMeta, LegendEntry, LegendMeta, PointMeta, SeriesMeta, StyleMeta, TextBox, ValueAxis, ValueTick};
use super::meta::{AxisOrientation, META_FORMAT_VERSION};
use super::ticks::{format_ticks, nice_ticks_within};
use super::{estimate_text_bbox, ChartError, ChartKind, ChartSpec, LegendPosition, CANVAS_HEIGHT, CANVAS_WIDTH, COLORS, MARKERS};
use crate::trend::{classify_trend_lenient, ClassifierConfig};

const MARGIN: f64 = 10.0;
const GAP: f64 = 6.0;
const TICK_LEN: f64 = 4.0;
const MIN_FONT: f64 = 7.0;
const SWATCH: f64 = 12.0;
const LEGEND_PAD: f64 = 5.0;
const MARKER_R: f64 = 5.0;

const TRIANGLE_UP: &[(f64, f64)] = &[(0.0, -1.0), (0.866, 0.5), (-0.866, 0.5)];
const TRIANGLE_DOWN: &[(f64, f64)] = &[(0.0, 1.0), (0.866, -0.5), (-0.866, -0.5)];
const DIAMOND: &[(f64, f64)] = &[(0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)];
const PENTAGON: &[(f64, f64)] = &[(0.0, -1.0), (0.9511, -0.309), (0.5878, 0.809), (-0.5878, 0.809), (-0.9511, -0.309)];
const HEXAGON: &[(f64, f64)] = &[(0.0, -1.0), (0.866, -0.5), (0.866, 0.5), (0.0, 1.0), (-0.866, 0.5), (-0.866, -0.5)];
const STAR: &[(f64, f64)] = &[
    (0.0, -1.0),
    (0.2245, -0.309),
    (0.9511, -0.309),
    (0.3633, 0.118),
    (0.5878, 0.809),
    (0.0, 0.382),
    (-0.5878, 0.809),
    (-0.3633, 0.118),
    (-0.9511, -0.309),
    (-0.2245, -0.309),
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum LegendMode {
    Inside,
    OutsideRight,
    BelowTitle,
}

/// Drawn geometry of one series.
struct SeriesMarks {
    points: Vec<(f64, f64)>,
    /// Bar rectangles, empty for line and scatter charts.
    bars: Vec<BBox>,
}

struct Layout {
    title: TextBox,
    x_label: TextBox,
    y_label: TextBox,
    plot: BBox,
    value_axis: ValueAxis,
    category_ticks: Vec<CategoryTick>,
    value_ticks: Vec<ValueTick>,
    legend: LegendMeta,
    marks: Vec<SeriesMarks>,
}

/// Font size at which `text` fits in `room`, never below [`MIN_FONT`]; the
/// text is shortened with an ellipsis if even that is too wide.
fn fit_text(text: &str, font: f64, room: f64) -> (String, f64) {
    let chars = text.chars().count().max(1) as f64;
    let fs = font.min(room / (0.6 * chars)).max(MIN_FONT);
    let fs = (fs * 2.0).floor() / 2.0;
    let fs = fs.max(MIN_FONT);
    if estimate_text_bbox(text, fs).0 <= room {
        return (text.to_string(), fs);
    }
    let keep = ((room / (0.6 * fs)).floor() as usize).saturating_sub(1);
    let mut s: String = text.chars().take(keep).collect();
    s.push('…');
    (s, fs)
}

fn text_box(text: String, font_size: f64, rotated: bool, x: f64, y: f64) -> TextBox {
    let (w, h) = estimate_text_bbox(&text, font_size);
    let (w, h) = if rotated { (h, w) } else { (w, h) };
    TextBox { text, font_size, rotated, bbox: BBox::new(x, y, w, h).rounded() }
}

struct LegendShape {
    w: f64,
    h: f64,
    horizontal: bool,
    font: f64,
}

fn legend_shape(spec: &ChartSpec, want_horizontal: bool) -> LegendShape {
    let font = (spec.style.label_font_size - 1.0).max(MIN_FONT);
    let row = SWATCH.max(1.2 * font);
    let widths: Vec<f64> = spec.series.iter().map(|s| estimate_text_bbox(&s.series_name, font).0).collect();
    let n = widths.len() as f64;
    if want_horizontal {
        let w = 2.0 * LEGEND_PAD + widths.iter().map(|tw| SWATCH + 4.0 + tw).sum::<f64>() + (n - 1.0) * 12.0;
        if w <= CANVAS_WIDTH - 2.0 * MARGIN {
            return LegendShape { w, h: 2.0 * LEGEND_PAD + row, horizontal: true, font };
        }
    }
    let tw = widths.iter().copied().fold(0.0, f64::max);
    LegendShape {
        w: 2.0 * LEGEND_PAD + SWATCH + 4.0 + tw,
        h: 2.0 * LEGEND_PAD + n * row + (n - 1.0) * 3.0,
        horizontal: false,
        font,
    }
}

fn place_legend(spec: &ChartSpec, shape: &LegendShape, x: f64, y: f64, placement: &str) -> LegendMeta {
    let row = SWATCH.max(1.2 * shape.font);
    let mut entries = Vec::new();
    let (mut cx, mut cy) = (x + LEGEND_PAD, y + LEGEND_PAD);
    for s in &spec.series {
        let (tw, th) = estimate_text_bbox(&s.series_name, shape.font);
        let marker = BBox::new(cx, cy + (row - SWATCH) / 2.0, SWATCH, SWATCH).rounded();
        let name = BBox::new(cx + SWATCH + 4.0, cy + (row - th) / 2.0, tw, th).rounded();
        entries.push(LegendEntry { name: s.series_name.clone(), name_bbox: name, marker_bbox: marker });
        if shape.horizontal {
            cx += SWATCH + 4.0 + tw + 12.0;
        } else {
            cy += row + 3.0;
        }
    }
    LegendMeta { placement: placement.to_string(), bbox: BBox::new(x, y, shape.w, shape.h).rounded(), entries }
}

fn value_range(spec: &ChartSpec) -> (f64, f64) {
    let vals = spec.series.iter().flat_map(|s| s.y_values.iter().copied());
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if spec.kind.is_bar() {
        (0.0, if hi > 0.0 { hi } else { 1.0 })
    } else {
        (lo, hi)
    }
}

fn layout(spec: &ChartSpec, mode: LegendMode) -> Layout {
    let st = &spec.style;
    let n = spec.series[0].x_labels.len();
    let arity = spec.series.len();
    let horizontal_bars = spec.kind == ChartKind::HorizontalBar;

    let (title_text, title_fs) = fit_text(&spec.title, st.title_font_size, CANVAS_WIDTH - 2.0 * MARGIN);
    let tw = estimate_text_bbox(&title_text, title_fs).0;
    let title = text_box(title_text, title_fs, false, (CANVAS_WIDTH - tw) / 2.0, MARGIN);
    let mut top = title.bbox.bottom() + 8.0;

    let shape = legend_shape(spec, mode == LegendMode::BelowTitle);
    let mut legend = None;
    if mode == LegendMode::BelowTitle {
        legend = Some(place_legend(spec, &shape, round2((CANVAS_WIDTH - shape.w) / 2.0), round2(top), "below-title"));
        top += shape.h + 8.0;
    }
    let mut right = CANVAS_WIDTH - MARGIN;
    if mode == LegendMode::OutsideRight {
        right -= shape.w + 10.0;
    }

    let (lo, hi) = value_range(spec);
    let ticks: Vec<f64> = nice_ticks_within(lo, hi, 4, 6, 5);
    let tick_labels = format_ticks(&ticks);
    let tick_fs = st.tick_font_size;
    let label_fs = st.label_font_size;
    let label_h = 1.2 * label_fs;
    let max_tick_w = tick_labels.iter().map(|l| estimate_text_bbox(l, tick_fs).0).fold(0.0, f64::max);
    let cat_labels = &spec.series[0].x_labels;
    let max_cat_w = cat_labels.iter().map(|l| estimate_text_bbox(l, tick_fs).0).fold(0.0, f64::max);

    let (plot, cat_rotated);
    if horizontal_bars {
        let left = MARGIN + label_h + GAP + max_cat_w + GAP;
        right = right.min(CANVAS_WIDTH - MARGIN - max_tick_w / 2.0);
        let bottom = CANVAS_HEIGHT - MARGIN - label_h - GAP - 1.2 * tick_fs - GAP;
        plot = BBox::new(left, top, right - left, bottom - top).rounded();
        cat_rotated = false;
    } else {
        let left = MARGIN + label_h + GAP + max_tick_w + GAP;
        let slot = (right - left) / n as f64;
        cat_rotated = max_cat_w > slot - 4.0;
        let zone = if cat_rotated { max_cat_w } else { 1.2 * tick_fs };
        let bottom = CANVAS_HEIGHT - MARGIN - label_h - GAP - zone - GAP;
        plot = BBox::new(left, top, right - left, bottom - top).rounded();
    }

    // Value axis.
    let (d0, d1) = (ticks[0], ticks[ticks.len() - 1]);
    let value_axis = if horizontal_bars {
        ValueAxis { orientation: AxisOrientation::Horizontal, domain: [d0, d1], pixel_range: [plot.x, plot.right()] }
    } else {
        ValueAxis { orientation: AxisOrientation::Vertical, domain: [d0, d1], pixel_range: [plot.bottom(), plot.y] }
    };
    let axis = value_axis.transform();
    let value_ticks: Vec<ValueTick> = ticks
        .iter()
        .zip(&tick_labels)
        .map(|(&v, l)| {
            let pos = round2(axis.forward(v));
            let (w, h) = estimate_text_bbox(l, tick_fs);
            let bbox = if horizontal_bars {
                BBox::new(pos - w / 2.0, plot.bottom() + GAP, w, h)
            } else {
                BBox::new(plot.x - GAP - w, pos - h / 2.0, w, h)
            };
            ValueTick { label: l.clone(), value: v, position: pos, font_size: tick_fs, bbox: bbox.rounded() }
        })
        .collect();

    // Category axis.
    let (cat_start, cat_len) = if horizontal_bars { (plot.y, plot.h) } else { (plot.x, plot.w) };
    let slot = cat_len / n as f64;
    let category_ticks: Vec<CategoryTick> = cat_labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let pos = round2(cat_start + (i as f64 + 0.5) * slot);
            let (w, h) = estimate_text_bbox(l, tick_fs);
            let bbox = if horizontal_bars {
                BBox::new(plot.x - GAP - w, pos - h / 2.0, w, h)
            } else if cat_rotated {
                BBox::new(pos - h / 2.0, plot.bottom() + GAP, h, w)
            } else {
                BBox::new(pos - w / 2.0, plot.bottom() + GAP, w, h)
            };
            CategoryTick { label: l.clone(), position: pos, font_size: tick_fs, rotated: cat_rotated, bbox: bbox.rounded() }
        })
        .collect();

    // Axis titles: the value label sits along the value axis.
    let (bottom_text, left_text) = if horizontal_bars { (&spec.y_label, &spec.x_label) } else { (&spec.x_label, &spec.y_label) };
    let (bt, bfs) = fit_text(bottom_text, label_fs, plot.w);
    let bw = estimate_text_bbox(&bt, bfs).0;
    let bottom_box = text_box(bt, bfs, false, plot.x + (plot.w - bw) / 2.0, CANVAS_HEIGHT - MARGIN - label_h);
    let (lt, lfs) = fit_text(left_text, label_fs, plot.h);
    let lw = estimate_text_bbox(&lt, lfs).0;
    let left_box = text_box(lt, lfs, true, MARGIN, plot.y + (plot.h - lw) / 2.0);
    let (x_label, y_label) = if horizontal_bars { (left_box, bottom_box) } else { (bottom_box, left_box) };

    // Marks.
    let baseline = axis.forward(d0.max(0.0).min(d1));
    let group = slot * st.bar_thickness;
    let bar = group / arity as f64;
    let marks: Vec<SeriesMarks> = spec
        .series
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut points = Vec::new();
            let mut bars = Vec::new();
            for (i, &v) in s.y_values.iter().enumerate() {
                let c = cat_start + (i as f64 + 0.5) * slot;
                let p = axis.forward(v);
                match spec.kind {
                    ChartKind::Line | ChartKind::Scatter => points.push((round2(c), round2(p))),
                    ChartKind::VerticalBar => {
                        let x0 = c - group / 2.0 + j as f64 * bar;
                        bars.push(BBox::new(x0, p.min(baseline), bar, (baseline - p).abs()).rounded());
                        points.push((round2(x0 + bar / 2.0), round2(p)));
                    }
                    ChartKind::HorizontalBar => {
                        let y0 = c - group / 2.0 + j as f64 * bar;
                        bars.push(BBox::new(baseline.min(p), y0, (p - baseline).abs(), bar).rounded());
                        points.push((round2(p), round2(y0 + bar / 2.0)));
                    }
                }
            }
            SeriesMarks { points, bars }
        })
        .collect();

    let legend = match (legend, mode) {
        (Some(l), _) => l,
        (None, LegendMode::OutsideRight) => {
            let y = (plot.y + (plot.h - shape.h) / 2.0).max(top);
            place_legend(spec, &shape, round2(CANVAS_WIDTH - MARGIN - shape.w), round2(y), "outside-right")
        }
        (None, _) => match free_corner(spec.kind, &plot, &shape, &marks) {
            Some((x, y, name)) => place_legend(spec, &shape, x, y, name),
            // Caller relays out with the legend outside.
            None => LegendMeta { placement: String::new(), bbox: BBox::new(0.0, 0.0, 0.0, 0.0), entries: Vec::new() },
        },
    };

    Layout { title, x_label, y_label, plot, value_axis, category_ticks, value_ticks, legend, marks }
}

/// First plot corner (top-right, top-left, bottom-right, bottom-left) where the legend touches no data.
fn free_corner(kind: ChartKind, plot: &BBox, shape: &LegendShape, marks: &[SeriesMarks]) -> Option<(f64, f64, &'static str)> {
    const INSET: f64 = 6.0;
    if shape.w + 2.0 * INSET > plot.w || shape.h + 2.0 * INSET > plot.h {
        return None;
    }
    let (l, r) = (plot.x + INSET, plot.right() - INSET - shape.w);
    let (t, b) = (plot.y + INSET, plot.bottom() - INSET - shape.h);
    let corners = [(r, t, "inside-top-right"), (l, t, "inside-top-left"), (r, b, "inside-bottom-right"), (l, b, "inside-bottom-left")];
    corners.into_iter().map(|(x, y, n)| (round2(x), round2(y), n)).find(|&(x, y, _)| {
        // Grow the box by the marker radius so markers and strokes stay clear.
        let zone = BBox::new(x - MARKER_R, y - MARKER_R, shape.w + 2.0 * MARKER_R, shape.h + 2.0 * MARKER_R);
        marks.iter().all(|m| {
            if m.bars.iter().any(|bar| bar.overlaps(&zone)) {
                return false;
            }
            if m.points.iter().any(|&(px, py)| zone.contains_point(px, py)) {
                return false;
            }
            if kind == ChartKind::Line {
                for w in m.points.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if (0..=32).any(|k| {
                        let t = k as f64 / 32.0;
                        zone.contains_point(x0 + t * (x1 - x0), y0 + t * (y1 - y0))
                    }) {
                        return false;
                    }
                }
            }
            true
        })
    })
}

fn num(v: f64) -> String {
    format!("{}", round2(v))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn text_el(svg: &mut String, text: &str, bbox: &BBox, fs: f64, rotated: bool, class: &str) {
    let (cx, cy) = (num(bbox.x + bbox.w / 2.0), num(bbox.y + bbox.h / 2.0));
    let rot = if rotated { format!(" transform=\"rotate(-90 {cx} {cy})\"") } else { String::new() };
    let _ = writeln!(
        svg,
        "<text class=\"{class}\" x=\"{cx}\" y=\"{cy}\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\"{rot}>{}</text>",
        num(fs),
        escape(text)
    );
}

fn marker_el(svg: &mut String, shape: &str, cx: f64, cy: f64, r: f64, color: &str) {
    let poly = |pts: &[(f64, f64)]| {
        pts.iter().map(|(x, y)| format!("{},{}", num(cx + x * r), num(cy + y * r))).collect::<Vec<_>>().join(" ")
    };
    let _ = match shape {
        "circle" => writeln!(svg, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>", num(cx), num(cy), num(r)),
        "square" => writeln!(
            svg,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{color}\"/>",
            num(cx - r),
            num(cy - r),
            num(2.0 * r),
            num(2.0 * r)
        ),
        "plus" => writeln!(
            svg,
            "<path d=\"M{} {}H{}M{} {}V{}\" stroke=\"{color}\" stroke-width=\"2\" fill=\"none\"/>",
            num(cx - r),
            num(cy),
            num(cx + r),
            num(cx),
            num(cy - r),
            num(cy + r)
        ),
        "cross" => writeln!(
            svg,
            "<path d=\"M{} {}L{} {}M{} {}L{} {}\" stroke=\"{color}\" stroke-width=\"2\" fill=\"none\"/>",
            num(cx - r),
            num(cy - r),
            num(cx + r),
            num(cy + r),
            num(cx - r),
            num(cy + r),
            num(cx + r),
            num(cy - r)
        ),
        other => {
            let pts = match other {
                "triangle-up" => TRIANGLE_UP,
                "triangle-down" => TRIANGLE_DOWN,
                "diamond" => DIAMOND,
                "star" => STAR,
                "pentagon" => PENTAGON,
                _ => HEXAGON,
            };
            writeln!(svg, "<polygon points=\"{}\" fill=\"{color}\"/>", poly(pts))
        }
    };
}

fn rect_el(svg: &mut String, b: &BBox, attrs: &str) {
    let _ = writeln!(svg, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {attrs}/>", num(b.x), num(b.y), num(b.w), num(b.h));
}

fn emit_svg(spec: &ChartSpec, lay: &Layout) -> String {
    let st = &spec.style;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"monospace\">",
        w = CANVAS_WIDTH,
        h = CANVAS_HEIGHT
    );
    rect_el(&mut svg, &BBox::new(0.0, 0.0, CANVAS_WIDTH, CANVAS_HEIGHT), "fill=\"#ffffff\"");
    text_el(&mut svg, &lay.title.text, &lay.title.bbox, lay.title.font_size, false, "title");

    let p = &lay.plot;
    let vertical = lay.value_axis.orientation == AxisOrientation::Vertical;
    for t in &lay.value_ticks {
        let (x1, y1, x2, y2, tx1, ty1) = if vertical {
            (p.x, t.position, p.right(), t.position, p.x - TICK_LEN, t.position)
        } else {
            (t.position, p.y, t.position, p.bottom(), t.position, p.bottom() + TICK_LEN)
        };
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>",
            num(x1),
            num(y1),
            num(x2),
            num(y2)
        );
        let (ax, ay) = if vertical { (p.x, t.position) } else { (t.position, p.bottom()) };
        let _ = writeln!(
            svg,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1\"/>",
            num(tx1),
            num(ty1),
            num(ax),
            num(ay)
        );
        text_el(&mut svg, &t.label, &t.bbox, t.font_size, false, "value-tick");
    }
    for t in &lay.category_ticks {
        text_el(&mut svg, &t.label, &t.bbox, t.font_size, t.rotated, "category-tick");
    }
    let _ = writeln!(
        svg,
        "<path d=\"M{} {}V{}H{}\" stroke=\"#000000\" stroke-width=\"1\" fill=\"none\"/>",
        num(p.x),
        num(p.y),
        num(p.bottom()),
        num(p.right())
    );
    text_el(&mut svg, &lay.x_label.text, &lay.x_label.bbox, lay.x_label.font_size, lay.x_label.rotated, "x-label");
    text_el(&mut svg, &lay.y_label.text, &lay.y_label.bbox, lay.y_label.font_size, lay.y_label.rotated, "y-label");

    let marker = MARKERS[st.marker_shape];
    for (j, m) in lay.marks.iter().enumerate() {
        let color = COLORS[st.colors[j]].1;
        match spec.kind {
            ChartKind::Line => {
                let pts: Vec<String> = m.points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
                let dash = st.line_style.dasharray().map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>",
                    pts.join(" ")
                );
            }
            ChartKind::Scatter => {
                for &(x, y) in &m.points {
                    marker_el(&mut svg, marker, x, y, MARKER_R, color);
                }
            }
            ChartKind::VerticalBar | ChartKind::HorizontalBar => {
                for b in &m.bars {
                    rect_el(&mut svg, b, &format!("fill=\"{color}\""));
                }
            }
        }
    }

    let lg = &lay.legend;
    rect_el(&mut svg, &lg.bbox, "fill=\"#ffffff\" stroke=\"#888888\" stroke-width=\"1\"");
    for (j, e) in lg.entries.iter().enumerate() {
        let color = COLORS[st.colors[j]].1;
        let mb = &e.marker_bbox;
        match spec.kind {
            ChartKind::Scatter => marker_el(&mut svg, marker, mb.x + mb.w / 2.0, mb.y + mb.h / 2.0, MARKER_R, color),
            ChartKind::Line => {
                let dash = st.line_style.dasharray().map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
                let _ = writeln!(
                    svg,
                    "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"2\"{dash}/>",
                    num(mb.x),
                    num(mb.right()),
                    y = num(mb.y + mb.h / 2.0)
                );
            }
            _ => rect_el(&mut svg, mb, &format!("fill=\"{color}\"")),
        }
        let fs = e.name_bbox.h / 1.2;
        text_el(&mut svg, &e.name, &e.name_bbox, fs, false, "legend-name");
    }
    svg.push_str("</svg>\n");
    svg
}

/// Lays out and draws `spec`, returning the SVG document and its meta record.
pub fn render(spec: &ChartSpec) -> Result<(String, ChartMeta), ChartError> {
    spec.validate()?;
    let lay = match spec.style.legend_position {
        LegendPosition::OutsideRight => layout(spec, LegendMode::OutsideRight),
        LegendPosition::BelowTitle => layout(spec, LegendMode::BelowTitle),
        LegendPosition::InsideBest => {
            let l = layout(spec, LegendMode::Inside);
            if l.legend.entries.is_empty() {
                layout(spec, LegendMode::OutsideRight)
            } else {
                l
            }
        }
    };
    let svg = emit_svg(spec, &lay);

    let cfg = ClassifierConfig::default();
    let series = spec
        .series
        .iter()
        .zip(&lay.marks)
        .enumerate()
        .map(|(j, (s, m))| {
            let (color, hex) = COLORS[spec.style.colors[j]];
            SeriesMeta {
                name: s.series_name.clone(),
                color: color.to_string(),
                color_hex: hex.to_string(),
                trend_class: classify_trend_lenient(&s.y_values, &cfg).expect("validated series has at least two points"),
                points: s
                    .x_labels
                    .iter()
                    .zip(&s.y_values)
                    .zip(&m.points)
                    .map(|((x, &y), &(cx, cy))| PointMeta { x_label: x.clone(), y_value: y, canvas: [cx, cy] })
                    .collect(),
            }
        })
        .collect();
    let first = &spec.series[0];
    let meta = ChartMeta {
        format_version: META_FORMAT_VERSION,
        image_index: spec.image_index,
        chart_kind: spec.kind,
        canvas: Canvas { width: CANVAS_WIDTH, height: CANVAS_HEIGHT },
        title: lay.title,
        x_label: lay.x_label,
        y_label: lay.y_label,
        indicator: spec.indicator.clone(),
        y_unit: first.y_unit.clone(),
        entity_kind: spec.entity_kind.clone(),
        temporal: first.temporal,
        value_kind: first.value_kind,
        plot_area: lay.plot,
        value_axis: lay.value_axis,
        category_ticks: lay.category_ticks,
        value_ticks: lay.value_ticks,
        legend: lay.legend,
        style: StyleMeta {
            marker_shape: MARKERS[spec.style.marker_shape].to_string(),
            bar_thickness: spec.style.bar_thickness,
            line_style: spec.style.line_style,
            legend_position: spec.style.legend_position,
        },
        series,
    };
    Ok((svg, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{sample_series, synth_catalog, DataSeries, SampleOptions, ValueKind};
    use crate::chartgen::{build_chart_spec, check_meta, LineStyle, StyleSpec};
    use crate::rng::SplitMix64;

    fn simple(kind: ChartKind, values: Vec<f64>) -> ChartSpec {
        let n = values.len();
        ChartSpec {
            image_index: 3,
            kind,
            series: vec![DataSeries {
                series_name: "Peru".into(),
                x_labels: (0..n).map(|i| (2010 + i).to_string()).collect(),
                y_values: values,
                y_unit: "tonnes".into(),
                temporal: true,
                value_kind: ValueKind::Float,
            }],
            title: "Rice production of Peru".into(),
            x_label: "Year".into(),
            y_label: "Rice production (tonnes)".into(),
            indicator: "rice production".into(),
            entity_kind: "country".into(),
            style: StyleSpec {
                marker_shape: 7,
                colors: vec![2],
                bar_thickness: 0.6,
                line_style: LineStyle::Dashed,
                legend_position: LegendPosition::InsideBest,
                title_font_size: 16.0,
                label_font_size: 12.0,
                tick_font_size: 10.0,
            },
        }
    }

    #[test]
    fn byte_identical_on_repeat() {
        let s = simple(ChartKind::Scatter, vec![1.0, 42.0, 17.0]);
        assert_eq!(render(&s).unwrap().0, render(&s).unwrap().0);
    }

    #[test]
    fn point_round_trips() {
        let s = simple(ChartKind::Line, vec![10.0, 42.0, 17.0]);
        let (_, meta) = render(&s).unwrap();
        let p = &meta.series[0].points[1];
        assert_eq!(p.x_label, "2011");
        let back = meta.value_axis.transform().inverse(p.canvas[1]);
        let units = (meta.value_axis.transform().forward(back) - meta.value_axis.transform().forward(42.0)).abs();
        assert!(units <= 0.5);
        assert!(check_meta(&meta).is_empty(), "{:?}", check_meta(&meta));
    }

    #[test]
    fn flat_series_is_padded() {
        let (_, meta) = render(&simple(ChartKind::Line, vec![5.0, 5.0, 5.0])).unwrap();
        assert!(meta.value_axis.domain[0] <= 4.0 && meta.value_axis.domain[1] >= 6.0);
        assert!(check_meta(&meta).is_empty());
    }

    #[test]
    fn negative_bar_rejected() {
        let s = simple(ChartKind::VerticalBar, vec![5.0, -1.0, 5.0]);
        assert!(matches!(render(&s), Err(ChartError::NegativeBar { .. })));
    }

    #[test]
    fn horizontal_bars_swap_axes() {
        let (_, meta) = render(&simple(ChartKind::HorizontalBar, vec![3.0, 8.0, 1.0, 4.0])).unwrap();
        assert_eq!(meta.value_axis.orientation, AxisOrientation::Horizontal);
        let axis = meta.value_axis.transform();
        for p in &meta.series[0].points {
            assert!((axis.inverse(p.canvas[0]) - p.y_value).abs() * (axis.p1 - axis.p0).abs() / (axis.d1 - axis.d0) <= 0.5);
        }
        assert!(check_meta(&meta).is_empty());
    }

    #[test]
    fn seeded_charts_satisfy_meta_invariants() {
        let cat = synth_catalog(5, 60, 40).unwrap();
        let mut rng = SplitMix64::new(1);
        for i in 0..100 {
            let temporal = i % 2 == 0;
            let sample = sample_series(&cat, temporal, 1 + i % 2, SampleOptions::default(), &mut rng).unwrap();
            let kind = ChartKind::ALL[i % 4];
            let spec = build_chart_spec(&sample, kind, i as u64, &mut rng).unwrap();
            let (svg, meta) = render(&spec).unwrap();
            assert!(svg.starts_with("<svg"));
            let v = check_meta(&meta);
            assert!(v.is_empty(), "chart {i}: {v:?}");
        }
    }
}
