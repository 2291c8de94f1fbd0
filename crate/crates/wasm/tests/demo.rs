use ucv_wasm::{certificate_json, figure_svg, scene_svg};

const TWO_POINTS: &str = r#"{
  "norm": "euclidean",
  "world": {"kind": "box", "min": [-10, -10], "max": [10, 10]},
  "sites": [{"kind": "point", "at": [-3, 0]}, {"kind": "point", "at": [3, 0]}],
  "rho": 10
}"#;

#[test]
fn renders_scene() {
    let svg = scene_svg(TWO_POINTS, 64).unwrap();
    assert_eq!(svg.matches("<path").count(), 2);
    assert_eq!(svg, scene_svg(TWO_POINTS, 64).unwrap());
}

#[test]
fn reports_bad_input() {
    assert!(scene_svg("{}", 64).unwrap_err().contains("/norm"));
    assert!(scene_svg(TWO_POINTS, 2).is_err());
    assert!(figure_svg(0.1, "wobble").is_err());
    assert!(figure_svg(2.0, "shift").is_err());
}

#[test]
fn certificate_matches_closed_form() {
    let cert: serde_json::Value = serde_json::from_str(&certificate_json(TWO_POINTS, 0.5, false).unwrap()).unwrap();
    let delta = cert["Delta"].as_f64().unwrap();
    assert!((delta - 2.50025005001250350e-7).abs() < 1e-18);
    let err = certificate_json(&TWO_POINTS.replace("euclidean", "linf"), 0.5, false).unwrap_err();
    assert!(err.contains("uniformly convex"));
}

#[test]
fn figure_slider_endpoints_differ() {
    let base = figure_svg(0.0, "shift").unwrap();
    let moved = figure_svg(0.2, "shift").unwrap();
    let grown = figure_svg(0.2, "square").unwrap();
    assert_ne!(base, moved);
    assert_ne!(base, grown);
    assert_eq!(base, figure_svg(0.0, "square").unwrap());
}
