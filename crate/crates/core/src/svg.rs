//! Deterministic SVG rendering of planar scenes and cell fans.

use std::fmt::Write;

use crate::cells::{unit_directions, CellApprox};
use crate::error::{Error, Result};
use crate::scene::{RenderSettings, Scene};
use crate::sites::Site;
use crate::space::NormedSpace;
use crate::vector::{self, Point};
use crate::world::World;

/// Maps world coordinates to pixels (y up).
struct Frame {
    lo: [f64; 2],
    scale: f64,
    height: f64,
    pad: f64,
}

impl Frame {
    fn new(lo: [f64; 2], hi: [f64; 2], r: &RenderSettings) -> Self {
        let pad = 10.0;
        let w = r.width as f64 - 2.0 * pad;
        let h = r.height as f64 - 2.0 * pad;
        let scale = (w / (hi[0] - lo[0])).min(h / (hi[1] - lo[1]));
        Self {
            lo,
            scale,
            height: r.height as f64,
            pad,
        }
    }

    fn xy(&self, p: &[f64]) -> (f64, f64) {
        (
            self.pad + (p[0] - self.lo[0]) * self.scale,
            self.height - self.pad - (p[1] - self.lo[1]) * self.scale,
        )
    }

    fn pt(&self, p: &[f64]) -> String {
        let (x, y) = self.xy(p);
        format!("{x:.4},{y:.4}")
    }
}

/// Renders the world outline, the sites, and one path per fan, colored by
/// site index. Output depends only on the inputs.
pub fn render_svg(scene: &Scene, cells: &[CellApprox]) -> Result<String> {
    if scene.space.dim != 2 {
        return Err(Error::NotTwoDimensional);
    }
    let (lo, hi) = view_box(scene);
    let r = &scene.render;
    let frame = Frame::new(lo, hi, r);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = r.width,
        h = r.height
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let outline = world_polygon(&scene.world, &scene.space, lo, hi);
    let _ = writeln!(
        out,
        r#"<polygon class="world" points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        outline.iter().map(|p| frame.pt(p)).collect::<Vec<_>>().join(" ")
    );
    for cell in cells {
        let color = &r.colors[cell.k % r.colors.len()];
        for fan in &cell.fans {
            let mut d = String::new();
            let anchor = frame.pt(&fan.anchor);
            for i in 0..fan.rays.len() {
                let _ = write!(d, "M{anchor}L{}", frame.pt(&fan.endpoint(i)));
            }
            let _ = writeln!(
                out,
                r#"<path class="cell-{}" d="{d}" fill="none" stroke="{color}" stroke-width="0.5" stroke-opacity="0.6"/>"#,
                cell.k
            );
        }
    }
    for (k, site) in scene.sites.iter().enumerate() {
        draw_site(&mut out, &frame, &scene.space, site, k);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn view_box(scene: &Scene) -> ([f64; 2], [f64; 2]) {
    if let Some((lo, hi)) = scene.world.bounding_box() {
        return ([lo[0], lo[1]], [hi[0], hi[1]]);
    }
    // unbounded: frame the sites with a margin
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for s in &scene.sites {
        for p in s.sample(&scene.space, 8).points {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
    }
    let margin = ((hi[0] - lo[0]).max(hi[1] - lo[1])).max(1.0);
    ([lo[0] - margin, lo[1] - margin], [hi[0] + margin, hi[1] + margin])
}

fn world_polygon(world: &World, space: &NormedSpace, lo: [f64; 2], hi: [f64; 2]) -> Vec<Point> {
    let rect = vec![
        vec![lo[0], lo[1]],
        vec![hi[0], lo[1]],
        vec![hi[0], hi[1]],
        vec![lo[0], hi[1]],
    ];
    match world {
        World::Box { .. } => rect,
        World::Ball { center, radius } => disc_outline(space, center, *radius, 256),
        World::Halfspaces { normals, offsets, .. } => normals
            .iter()
            .zip(offsets)
            .fold(rect, |poly, (a, b)| dedup(clip(&poly, a, *b))),
    }
}

fn dedup(mut poly: Vec<Point>) -> Vec<Point> {
    let close = |a: &Point, b: &Point| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9);
    poly.dedup_by(|a, b| close(a, b));
    while poly.len() > 1 && close(&poly[0], &poly[poly.len() - 1]) {
        poly.pop();
    }
    poly
}

fn disc_outline(space: &NormedSpace, center: &[f64], radius: f64, n: usize) -> Vec<Point> {
    unit_directions(space, n, 0)
        .iter()
        .map(|u| vector::along(center, u, radius))
        .collect()
}

/// Sutherland–Hodgman clip of a polygon against `a·x <= b`.
fn clip(poly: &[Point], a: &[f64], b: f64) -> Vec<Point> {
    let inside = |p: &Point| vector::dot(a, p) <= b + 1e-12;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let cur = &poly[i];
        let next = &poly[(i + 1) % poly.len()];
        if inside(cur) {
            out.push(cur.clone());
        }
        if inside(cur) != inside(next) {
            let (fc, fn_) = (vector::dot(a, cur) - b, vector::dot(a, next) - b);
            out.push(vector::lerp(cur, next, fc / (fc - fn_)));
        }
    }
    out
}

fn draw_site(out: &mut String, frame: &Frame, space: &NormedSpace, site: &Site, k: usize) {
    let class = format!("site-{k}");
    match site {
        Site::Points { coords } => {
            for p in coords {
                let (x, y) = frame.xy(p);
                let _ = writeln!(out, r#"<circle class="{class}" cx="{x:.4}" cy="{y:.4}" r="3" fill="black"/>"#);
            }
        }
        Site::Segment { a, b } => {
            let ((x1, y1), (x2, y2)) = (frame.xy(a), frame.xy(b));
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="black" stroke-width="2"/>"#
            );
        }
        Site::Disc { center, radius } => {
            let pts = disc_outline(space, center, *radius, 128);
            polygon(out, frame, &class, &pts);
        }
        Site::Box { min, max } => {
            let pts = [
                vec![min[0], min[1]],
                vec![max[0], min[1]],
                vec![max[0], max[1]],
                vec![min[0], max[1]],
            ];
            polygon(out, frame, &class, &pts);
        }
        Site::Union { members } => {
            for m in members {
                draw_site(out, frame, space, m, k);
            }
        }
    }
}

fn polygon(out: &mut String, frame: &Frame, class: &str, pts: &[Point]) {
    let _ = writeln!(
        out,
        r#"<polygon class="{class}" points="{}" fill="black"/>"#,
        pts.iter().map(|p| frame.pt(p)).collect::<Vec<_>>().join(" ")
    );
}
