//! The closed convex domain that contains every site and every cell.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::NormedSpace;
use crate::vector::{self, Point};

/// Relative slack for membership in curved or computed worlds.
const MEMBERSHIP_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum World {
    /// Axis-aligned box. Infinite bounds are allowed and make the world unbounded.
    Box { min: Point, max: Point },
    /// Closed ball of the scene norm.
    Ball { center: Point, radius: f64 },
    /// `{x : normal_i · x <= offset_i}`. `bounds` is an enclosing box when
    /// the intersection is known to be bounded.
    Halfspaces {
        normals: Vec<Point>,
        offsets: Vec<f64>,
        bounds: Option<(Point, Point)>,
    },
}

impl World {
    pub fn square(half: f64) -> Self {
        World::Box {
            min: vec![-half, -half],
            max: vec![half, half],
        }
    }

    pub fn cube(min: f64, max: f64, dim: usize) -> Self {
        World::Box {
            min: vec![min; dim],
            max: vec![max; dim],
        }
    }

    /// The whole space ℝ^dim, as an unbounded box.
    pub fn unbounded(dim: usize) -> Self {
        World::Box {
            min: vec![f64::NEG_INFINITY; dim],
            max: vec![f64::INFINITY; dim],
        }
    }

    /// Full-dimensional simplex with `dim + 1` vertices, as halfspaces.
    pub fn simplex(vertices: &[Point]) -> Result<Self> {
        let n = vertices.len();
        if n < 2 {
            return Err(Error::DomainError("simplex needs at least two vertices".into()));
        }
        let dim = vertices[0].len();
        if n != dim + 1 || vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::DomainError(format!(
                "a full-dimensional simplex in R^{dim} needs {} vertices",
                dim + 1
            )));
        }
        // barycentric coordinates: lambda = M^-1 (x - v0), with M = [v1-v0, ..., vd-v0]
        let v0 = &vertices[0];
        let m = DMatrix::from_fn(dim, dim, |r, c| vertices[c + 1][r] - v0[r]);
        let inv = m
            .try_inverse()
            .ok_or_else(|| Error::DomainError("simplex vertices are affinely dependent".into()))?;
        let v0v = DVector::from_column_slice(v0);
        let shift = &inv * &v0v;
        let mut normals = Vec::with_capacity(dim + 1);
        let mut offsets = Vec::with_capacity(dim + 1);
        // lambda_i >= 0  <=>  -row_i · x <= -row_i · v0
        for i in 0..dim {
            normals.push(inv.row(i).iter().map(|v| -v).collect());
            offsets.push(-shift[i]);
        }
        // sum lambda_i <= 1
        let colsum: Vec<f64> = (0..dim).map(|c| inv.column(c).sum()).collect();
        offsets.push(1.0 + shift.sum());
        normals.push(colsum);
        let mut lo = v0.clone();
        let mut hi = v0.clone();
        for v in vertices {
            for i in 0..dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        Ok(World::Halfspaces {
            normals,
            offsets,
            bounds: Some((lo, hi)),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            World::Box { min, .. } => min.len(),
            World::Ball { center, .. } => center.len(),
            World::Halfspaces {
                normals, bounds, ..
            } => normals
                .first()
                .map(Vec::len)
                .or_else(|| bounds.as_ref().map(|b| b.0.len()))
                .unwrap_or(0),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            World::Box { min, max } => min.iter().chain(max).all(|v| v.is_finite()),
            World::Ball { .. } => true,
            World::Halfspaces { bounds, .. } => bounds.is_some(),
        }
    }

    /// Structural checks: nonempty interior and consistent lengths.
    pub fn validate(&self, space: &NormedSpace) -> Result<()> {
        if self.dim() != space.dim {
            return Err(Error::DimensionMismatch {
                expected: space.dim,
                got: self.dim(),
            });
        }
        match self {
            World::Box { min, max } => {
                if min.len() != max.len() {
                    return Err(Error::DomainError("box bounds differ in length".into()));
                }
                if min.iter().zip(max).any(|(a, b)| !(a < b) || a.is_nan() || b.is_nan()) {
                    return Err(Error::DomainError(
                        "box must be full-dimensional (min < max on every axis)".into(),
                    ));
                }
            }
            World::Ball { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite()) || center.iter().any(|v| !v.is_finite()) {
                    return Err(Error::DomainError("ball needs a finite positive radius".into()));
                }
            }
            World::Halfspaces {
                normals, offsets, ..
            } => {
                if normals.len() != offsets.len() || normals.is_empty() {
                    return Err(Error::DomainError(
                        "halfspaces need matching, nonempty normal and offset lists".into(),
                    ));
                }
                if normals.iter().any(|n| n.len() != space.dim || vector::is_zero(n)) {
                    return Err(Error::DomainError("halfspace normals must be nonzero".into()));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, space: &NormedSpace, x: &[f64]) -> Result<bool> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.contains_unchecked(space, x))
    }

    pub(crate) fn contains_unchecked(&self, space: &NormedSpace, x: &[f64]) -> bool {
        match self {
            World::Box { min, max } => x
                .iter()
                .zip(min.iter().zip(max))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi),
            World::Ball { center, radius } => {
                space.dist(x, center) <= radius * (1.0 + MEMBERSHIP_SLACK)
            }
            World::Halfspaces {
                normals, offsets, ..
            } => normals
                .iter()
                .zip(offsets)
                .all(|(a, b)| vector::dot(a, x) <= b + MEMBERSHIP_SLACK * (1.0 + b.abs())),
        }
    }

    /// `sup{t >= 0 : p + t θ ∈ X}`; infinite when the ray never leaves.
    pub fn ray_exit(&self, space: &NormedSpace, p: &[f64], theta: &[f64]) -> Result<f64> {
        space.check_dim(theta)?;
        if !self.contains(space, p)? {
            return Err(Error::PointOutsideWorld);
        }
        Ok(self.ray_exit_unchecked(space, p, theta))
    }

    pub(crate) fn ray_exit_unchecked(&self, space: &NormedSpace, p: &[f64], theta: &[f64]) -> f64 {
        match self {
            World::Box { min, max } => {
                let mut t = f64::INFINITY;
                for i in 0..p.len() {
                    let d = theta[i];
                    if d > 0.0 {
                        t = t.min((max[i] - p[i]) / d);
                    } else if d < 0.0 {
                        t = t.min((min[i] - p[i]) / d);
                    }
                }
                t.max(0.0)
            }
            World::Ball { center, radius } => ball_exit(space, center, *radius, p, theta),
            World::Halfspaces {
                normals, offsets, ..
            } => {
                let mut t = f64::INFINITY;
                for (a, b) in normals.iter().zip(offsets) {
                    let rate = vector::dot(a, theta);
                    if rate > 0.0 {
                        t = t.min((b - vector::dot(a, p)) / rate);
                    }
                }
                t.max(0.0)
            }
        }
    }

    /// Scene-norm distance from an interior point to ∂X. Distances to
    /// hyperplanes use the dual norm of the normal.
    pub fn point_boundary_distance(&self, space: &NormedSpace, x: &[f64]) -> f64 {
        match self {
            World::Box { min, max } => x
                .iter()
                .zip(min.iter().zip(max))
                .map(|(v, (lo, hi))| (v - lo).min(hi - v))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            World::Ball { center, radius } => (radius - space.dist(x, center)).max(0.0),
            World::Halfspaces {
                normals, offsets, ..
            } => {
                let dual = space.norm.dual();
                normals
                    .iter()
                    .zip(offsets)
                    .map(|(a, b)| (b - vector::dot(a, x)) / dual.eval(a))
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0)
            }
        }
    }

    pub fn bounding_box(&self) -> Option<(Point, Point)> {
        match self {
            World::Box { min, max } => self.is_bounded().then(|| (min.clone(), max.clone())),
            // every ℓp unit ball has extent exactly 1 along each axis
            World::Ball { center, radius } => Some((
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            )),
            World::Halfspaces { bounds, .. } => bounds.clone(),
        }
    }

    /// Scene-norm diameter (for halfspace worlds, the diagonal of the
    /// enclosing box, an upper bound).
    pub fn diameter(&self, space: &NormedSpace) -> Result<f64> {
        match self {
            World::Ball { radius, .. } => Ok(2.0 * radius),
            _ => {
                let (lo, hi) = self.bounding_box().ok_or(Error::UnboundedWorld)?;
                Ok(space.dist(&lo, &hi))
            }
        }
    }

    /// Lebesgue measure of the enclosing box.
    pub fn bounding_volume(&self) -> Result<f64> {
        let (lo, hi) = self.bounding_box().ok_or(Error::UnboundedWorld)?;
        Ok(lo.iter().zip(&hi).map(|(a, b)| b - a).product())
    }

    /// Uniform sample from X by rejection from the enclosing box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, space: &NormedSpace, rng: &mut R) -> Result<Point> {
        let (lo, hi) = self.bounding_box().ok_or(Error::UnboundedWorld)?;
        for _ in 0..1_000_000 {
            let x: Point = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| a + (b - a) * rng.random::<f64>())
                .collect();
            if self.contains_unchecked(space, &x) {
                return Ok(x);
            }
        }
        Err(Error::DomainError("world has negligible volume inside its bounds".into()))
    }
}

fn ball_exit(space: &NormedSpace, center: &[f64], radius: f64, p: &[f64], theta: &[f64]) -> f64 {
    let rel = vector::sub(p, center);
    if matches!(space.norm, crate::space::Norm::Lp { p } if p == 2.0) {
        // |rel + t θ|² = r²
        let a = vector::dot(theta, theta);
        let b = 2.0 * vector::dot(&rel, theta);
        let c = vector::dot(&rel, &rel) - radius * radius;
        let disc = (b * b - 4.0 * a * c).max(0.0);
        // c <= 0 for interior p, so the larger root is the exit
        let q = -0.5 * (b + b.signum() * disc.sqrt());
        let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
        return r1.max(r2).max(0.0);
    }
    // convex in t: bisect the boundary crossing
    let speed = space.norm.eval(theta);
    let mut lo = 0.0;
    let mut hi = (radius + space.norm.eval(&rel)) / speed;
    let mut buf = vec![0.0; p.len()];
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        vector::along_into(&mut buf, &rel, theta, mid);
        if space.norm.eval(&buf) <= radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
