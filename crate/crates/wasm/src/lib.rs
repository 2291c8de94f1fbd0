//! Browser bindings for the `www/` demo page.
//!
//! Each export wraps a plain function that returns `Result<String, String>`,
//! so the logic can be exercised natively.

use wasm_bindgen::prelude::*;

use ucvoronoi::stability::{fig5, fig6_shifted, fig6_square};
use ucvoronoi::svg::render_svg;
use ucvoronoi::{build_cell, parse_scene, CellOptions, Configuration, Scene};

/// Caps the ray count so one call stays interactive.
pub const MAX_DIRECTIONS: usize = 4096;

/// Renders every cell of a JSON scene, with `directions` rays per anchor.
pub fn scene_svg(scene_json: &str, directions: usize) -> Result<String, String> {
    let scene = parse_scene(scene_json).map_err(|e| e.to_string())?;
    let config = scene.config().map_err(|e| e.to_string())?;
    cells_svg(&scene, &config, directions)
}

/// The stability certificate of a JSON scene, as JSON.
pub fn certificate_json(scene_json: &str, epsilon: f64, interior: bool) -> Result<String, String> {
    let config = parse_scene(scene_json)
        .and_then(|s| s.config())
        .map_err(|e| e.to_string())?;
    let cert = if interior {
        ucvoronoi::certify_interior(&config, epsilon)
    } else {
        ucvoronoi::certify(&config, epsilon)
    }
    .map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&cert).map_err(|e| e.to_string())
}

/// The ℓ∞ four-site scene, perturbed by `beta`: `"shift"` moves the
/// central site to `(β, β)`, `"square"` grows the lower site into a square
/// of half-width `β`. Only the central cell is drawn.
pub fn figure_svg(beta: f64, variant: &str) -> Result<String, String> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(format!("beta must lie in [0, 1], got {beta}"));
    }
    let config = match variant {
        _ if beta == 0.0 => fig5(),
        "shift" => fig6_shifted(beta),
        "square" => fig6_square(beta),
        other => return Err(format!("unknown variant `{other}`")),
    };
    let scene = Scene::from_config(&config);
    let cell = build_cell(&config, 0, &CellOptions::for_dim(2)).map_err(|e| e.to_string())?;
    render_svg(&scene, &[cell]).map_err(|e| e.to_string())
}

fn cells_svg(scene: &Scene, config: &Configuration, directions: usize) -> Result<String, String> {
    if !(4..=MAX_DIRECTIONS).contains(&directions) {
        return Err(format!("directions must lie in [4, {MAX_DIRECTIONS}]"));
    }
    let mut opts = CellOptions::for_dim(2).with_directions(directions);
    // keep continuous sites cheap enough for the browser
    opts.anchors = Some(24);
    let cells = (0..config.len())
        .map(|k| build_cell(config, k, &opts))
        .collect::<ucvoronoi::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    render_svg(scene, &cells).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn render_scene(scene_json: &str, directions: u32) -> Result<String, JsError> {
    scene_svg(scene_json, directions as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certify(scene_json: &str, epsilon: f64, interior: bool) -> Result<String, JsError> {
    certificate_json(scene_json, epsilon, interior).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn figure(beta: f64, variant: &str) -> Result<String, JsError> {
    figure_svg(beta, variant).map_err(|e| JsError::new(&e))
}
