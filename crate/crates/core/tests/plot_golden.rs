//! Golden-file check: the SVG renderer must be byte-stable across builds
//! for a fixed scene.

use qdkit::plot::{render_svg, PlotScene, RegionLayer, Trace};
use qdkit::report::half_dominated_region;

fn fixture_scene() -> PlotScene {
    PlotScene {
        title: "fixture scene".into(),
        traces: vec![
            Trace {
                label: "0.1".into(),
                points: vec![(0.04, 0.4), (0.12, 1.1), (0.22, 2.3), (0.30, 3.1)],
                milestones: vec![1, 2],
            },
            Trace {
                label: "0.4".into(),
                points: vec![(0.06, 0.3), (0.25, 0.9), (0.45, 1.8), (0.62, 2.4)],
                milestones: vec![1, 2],
            },
        ],
        regions: vec![
            RegionLayer {
                label: "0.1".into(),
                polygon: half_dominated_region(&[(0.28, 3.0), (0.33, 2.6), (0.30, 3.2)], 0.5)
                    .unwrap(),
            },
            RegionLayer {
                label: "0.4".into(),
                polygon: half_dominated_region(&[(0.58, 2.1), (0.66, 1.9), (0.62, 2.5)], 0.5)
                    .unwrap(),
            },
        ],
        isocurve_levels: vec![0.5, 1.0, 1.5, 2.0],
    }
}

#[test]
fn svg_output_matches_golden_file() {
    let golden = include_str!("golden/scene.svg");
    let rendered = render_svg(&fixture_scene());
    assert_eq!(rendered, golden, "renderer output drifted from the golden file");
}

#[test]
fn isocurve_level_two_passes_through_half_four() {
    assert_eq!(qdkit::plot::isocurve_y(2.0, 0.5), 4.0);
}
