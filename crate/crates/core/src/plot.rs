//! Deterministic SVG rendering of coverage-precision plots.
//!
//! A scene carries per-value mean traces with milestone markers, the
//! half-dominated region polygons and reliability isocurves (hyperbolas of
//! constant precision times coverage). Rendering is byte-stable for a given
//! scene: fixed canvas, fixed palette, fixed number formatting and no
//! hash-ordered iteration anywhere.

use std::fmt::Write as _;
use std::path::Path;

use crate::experiment::RunRecord;
use crate::report::{half_dominated_region, trace_series, Parameter, RegionPolygon, ReportError};

/// Fill/stroke palette, one entry per grouped value (cycled when exceeded).
pub const PALETTE: [&str; 6] = [
    "#00c000", "#00c0ff", "#a060ff", "#ff2080", "#ffb000", "#707070",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 28.0;
const MARGIN_BOTTOM: f64 = 46.0;

/// One labeled mean path over checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub label: String,
    /// (coverage, precision) per checkpoint.
    pub points: Vec<(f64, f64)>,
    /// Indices into `points` to mark with milestone dots.
    pub milestones: Vec<usize>,
}

/// One labeled half-dominated region.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionLayer {
    pub label: String,
    pub polygon: RegionPolygon,
}

/// Everything one plot shows.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotScene {
    pub title: String,
    pub traces: Vec<Trace>,
    pub regions: Vec<RegionLayer>,
    /// Reliability levels for the isocurves `precision * coverage = G`.
    pub isocurve_levels: Vec<f64>,
}

/// Precision coordinate of the reliability isocurve at a given coverage.
pub fn isocurve_y(level: f64, coverage: f64) -> f64 {
    level / coverage
}

fn data_extent(scene: &PlotScene) -> (f64, f64) {
    let mut x_max: f64 = 0.0;
    let mut y_max: f64 = 0.0;
    for t in &scene.traces {
        for &(c, p) in &t.points {
            x_max = x_max.max(c);
            y_max = y_max.max(p);
        }
    }
    for r in &scene.regions {
        for &(c, p) in r.polygon.vertices() {
            x_max = x_max.max(c);
            y_max = y_max.max(p);
        }
    }
    if x_max <= 0.0 {
        x_max = 1.0;
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    (x_max * 1.05, y_max * 1.05)
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, c: f64) -> f64 {
        MARGIN_LEFT + c / self.x_max * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, p: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - p / self.y_max * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

/// Renders a scene to SVG text.
pub fn render_svg(scene: &PlotScene) -> String {
    let (x_max, y_max) = data_extent(scene);
    let frame = Frame { x_max, y_max };
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    if !scene.title.is_empty() {
        let _ = writeln!(
            svg,
            r#"  <text x="{:.1}" y="18" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            xml_escape(&scene.title)
        );
    }

    // Reliability isocurves, clipped to the frame.
    for &level in &scene.isocurve_levels {
        if level.is_nan() || level <= 0.0 {
            continue;
        }
        let x_start = (level / y_max).max(x_max / 400.0);
        if x_start >= x_max {
            continue;
        }
        let mut d = String::new();
        let steps = 128;
        for s in 0..=steps {
            let c = x_start + (x_max - x_start) * s as f64 / steps as f64;
            let p = isocurve_y(level, c).min(y_max);
            let cmd = if s == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{}{:.2} {:.2} ", cmd, frame.x(c), frame.y(p));
        }
        let _ = writeln!(
            svg,
            r##"  <path d="{}" fill="none" stroke="#c8c8c8" stroke-width="0.8"/>"##,
            d.trim_end()
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="9" fill="#a0a0a0">G={}</text>"##,
            frame.x(x_max) - 30.0,
            frame.y(isocurve_y(level, x_max).min(y_max)) - 3.0,
            trim_float(level)
        );
    }

    // Region polygons under the traces.
    for (idx, region) in scene.regions.iter().enumerate() {
        let mut pts = String::new();
        for &(c, p) in region.polygon.vertices() {
            let _ = write!(pts, "{:.2},{:.2} ", frame.x(c), frame.y(p));
        }
        let _ = writeln!(
            svg,
            r#"  <polygon points="{}" fill="{}" fill-opacity="0.22" stroke="{}" stroke-width="0.8"/>"#,
            pts.trim_end(),
            color(idx),
            color(idx)
        );
    }

    // Traces with milestone markers.
    for (idx, trace) in scene.traces.iter().enumerate() {
        if trace.points.is_empty() {
            continue;
        }
        let mut pts = String::new();
        for &(c, p) in &trace.points {
            let _ = write!(pts, "{:.2},{:.2} ", frame.x(c), frame.y(p));
        }
        let _ = writeln!(
            svg,
            r#"  <polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"/>"#,
            pts.trim_end(),
            color(idx)
        );
        for &m in &trace.milestones {
            if let Some(&(c, p)) = trace.points.get(m) {
                let _ = writeln!(
                    svg,
                    r##"  <circle cx="{:.2}" cy="{:.2}" r="3.2" fill="{}" stroke="#ffffff" stroke-width="0.8"/>"##,
                    frame.x(c),
                    frame.y(p),
                    color(idx)
                );
            }
        }
    }

    draw_axes(&mut svg, &frame);
    draw_legend(&mut svg, scene);
    svg.push_str("</svg>\n");
    svg
}

fn draw_axes(svg: &mut String, frame: &Frame) {
    let x0 = MARGIN_LEFT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        svg,
        r##"  <line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="#000000" stroke-width="1"/>"##
    );
    let _ = writeln!(
        svg,
        r##"  <line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="#000000" stroke-width="1"/>"##
    );
    for i in 0..=5 {
        let c = frame.x_max * i as f64 / 5.0;
        let x = frame.x(c);
        let _ = writeln!(
            svg,
            r##"  <line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="#000000" stroke-width="1"/>"##,
            y0 + 4.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            y0 + 16.0,
            trim_float_2(c)
        );
        let p = frame.y_max * i as f64 / 5.0;
        let y = frame.y(p);
        let _ = writeln!(
            svg,
            r##"  <line x1="{:.2}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="#000000" stroke-width="1"/>"##,
            x0 - 4.0
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            x0 - 8.0,
            trim_float_2(p)
        );
    }
    let _ = writeln!(
        svg,
        r#"  <text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle">coverage</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"  <text x="16" y="{:.1}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">precision</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn draw_legend(svg: &mut String, scene: &PlotScene) {
    let mut labels: Vec<&str> = scene.traces.iter().map(|t| t.label.as_str()).collect();
    if labels.is_empty() {
        labels = scene.regions.iter().map(|r| r.label.as_str()).collect();
    }
    for (idx, label) in labels.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 + idx as f64 * 14.0;
        let x = WIDTH - MARGIN_RIGHT - 110.0;
        let _ = writeln!(
            svg,
            r#"  <rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/>"#,
            y - 9.0,
            color(idx)
        );
        let _ = writeln!(
            svg,
            r#"  <text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            x + 14.0,
            xml_escape(label)
        );
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn trim_float(v: f64) -> String {
    format!("{v}")
}

fn trim_float_2(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Picks round isocurve levels spanning the observed reliability range.
pub fn nice_isocurve_levels(max_reliability: f64, count: usize) -> Vec<f64> {
    if max_reliability.is_nan() || max_reliability <= 0.0 || count == 0 {
        return Vec::new();
    }
    let raw_step = max_reliability / count as f64;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw_step)
        .unwrap_or(10.0 * magnitude);
    (1..=count).map(|i| step * i as f64).collect()
}

/// Builds the full plot scene for one grouping parameter: mean traces with
/// milestones, half-dominated regions over the final points of each value,
/// and auto-selected reliability isocurves.
pub fn build_scene(records: &[RunRecord], parameter: Parameter) -> Result<PlotScene, ReportError> {
    let traces = trace_series(records, parameter)?;
    let labels = parameter.distinct_values(records);
    let mut regions = Vec::with_capacity(labels.len());
    let mut max_reliability: f64 = 0.0;
    for label in &labels {
        let finals: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| parameter.value_label(r) == *label)
            .map(|r| (r.final_objectives.0, r.final_objectives.1))
            .collect();
        for &(c, p) in &finals {
            max_reliability = max_reliability.max(c * p);
        }
        regions.push(RegionLayer {
            label: label.clone(),
            polygon: half_dominated_region(&finals, 0.5)?,
        });
    }
    Ok(PlotScene {
        title: format!("coverage-precision by {}", parameter.name()),
        traces: traces
            .into_iter()
            .map(|t| Trace {
                label: t.label,
                points: t.points.iter().map(|&(_, c, p)| (c, p)).collect(),
                milestones: t.milestones,
            })
            .collect(),
        regions,
        isocurve_levels: nice_isocurve_levels(max_reliability, 4),
    })
}

/// Writes the scene to an SVG file.
pub fn emit_plot(scene: &PlotScene, path: &Path) -> Result<(), ReportError> {
    std::fs::write(path, render_svg(scene)).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isocurve_passes_through_product_points() {
        assert_eq!(isocurve_y(2.0, 0.5), 4.0);
        assert_eq!(isocurve_y(1.0, 1.0), 1.0);
    }

    #[test]
    fn empty_scene_renders_axes_only() {
        let svg = render_svg(&PlotScene::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("coverage"));
        assert!(svg.contains("precision"));
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let scene = PlotScene {
            title: "fixture".into(),
            traces: vec![Trace {
                label: "0.4".into(),
                points: vec![(0.1, 0.5), (0.3, 1.5), (0.6, 2.5)],
                milestones: vec![1],
            }],
            regions: vec![RegionLayer {
                label: "0.4".into(),
                polygon: half_dominated_region(&[(0.5, 2.0), (0.7, 1.0)], 0.5).unwrap(),
            }],
            isocurve_levels: vec![0.5, 1.0],
        };
        assert_eq!(render_svg(&scene), render_svg(&scene));
    }

    #[test]
    fn nice_levels_are_round_and_cover_range() {
        assert_eq!(nice_isocurve_levels(8.0, 4), vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(nice_isocurve_levels(0.9, 4), vec![0.25, 0.5, 0.75, 1.0]);
        assert!(nice_isocurve_levels(0.0, 4).is_empty());
    }
}
