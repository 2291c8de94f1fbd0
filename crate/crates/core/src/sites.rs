//! Sites as distance / nearest-point oracles, configurations of sites, and
//! the separation (η) and boundedness (ρ) quantities of a configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Norm, NormedSpace};
use crate::vector::{self, Point};
use crate::world::World;

/// Golden-section tolerance on the segment parameter.
const SEGMENT_TOL: f64 = 1e-12;

/// A closed, nonempty generator of a Voronoi cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Site {
    Points { coords: Vec<Point> },
    Segment { a: Point, b: Point },
    /// Closed ball of the scene norm.
    Disc { center: Point, radius: f64 },
    /// Solid axis-aligned box.
    Box { min: Point, max: Point },
    Union { members: Vec<Site> },
}

impl Site {
    pub fn point(p: Point) -> Self {
        Site::Points { coords: vec![p] }
    }

    pub fn points(coords: Vec<Point>) -> Self {
        Site::Points { coords }
    }

    pub fn segment(a: Point, b: Point) -> Self {
        Site::Segment { a, b }
    }

    pub fn disc(center: Point, radius: f64) -> Self {
        Site::Disc { center, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            Site::Points { coords } => coords.first().map_or(0, Vec::len),
            Site::Segment { a, .. } => a.len(),
            Site::Disc { center, .. } => center.len(),
            Site::Box { min, .. } => min.len(),
            Site::Union { members } => members.first().map_or(0, Site::dim),
        }
    }

    /// Finite point sets are the only sites where every derived quantity is exact.
    pub fn is_finite(&self) -> bool {
        match self {
            Site::Points { .. } => true,
            Site::Union { members } => members.iter().all(Site::is_finite),
            _ => false,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check = |p: &Point| {
            if p.len() != dim {
                Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                })
            } else if p.iter().any(|v| !v.is_finite()) {
                Err(Error::DomainError("site coordinates must be finite".into()))
            } else {
                Ok(())
            }
        };
        match self {
            Site::Points { coords } => {
                if coords.is_empty() {
                    return Err(Error::DomainError("point site must be nonempty".into()));
                }
                coords.iter().try_for_each(check)
            }
            Site::Segment { a, b } => check(a).and(check(b)),
            Site::Disc { center, radius } => {
                check(center)?;
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::DomainError("disc radius must be finite and >= 0".into()));
                }
                Ok(())
            }
            Site::Box { min, max } => {
                check(min)?;
                check(max)?;
                if min.iter().zip(max).any(|(a, b)| a > b) {
                    return Err(Error::DomainError("box site needs min <= max".into()));
                }
                Ok(())
            }
            Site::Union { members } => {
                if members.is_empty() {
                    return Err(Error::DomainError("union site must be nonempty".into()));
                }
                members.iter().try_for_each(|m| m.validate(dim))
            }
        }
    }

    /// Distance from `x` to the site (no nearest point, no allocation for
    /// the common kinds).
    pub fn distance_to(&self, space: &NormedSpace, x: &[f64]) -> f64 {
        match self {
            Site::Points { coords } => coords
                .iter()
                .map(|q| space.dist(x, q))
                .fold(f64::INFINITY, f64::min),
            Site::Segment { a, b } => segment_nearest(space, a, b, x).0,
            Site::Disc { center, radius } => (space.dist(x, center) - radius).max(0.0),
            Site::Box { min, max } => space.norm.eval_iter(
                x.iter()
                    .zip(min.iter().zip(max))
                    .map(|(v, (lo, hi))| v - v.clamp(*lo, *hi)),
            ),
            Site::Union { members } => members
                .iter()
                .map(|m| m.distance_to(space, x))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Distance and an attaining nearest point. Ties go to the earliest
    /// point in construction order.
    pub fn nearest(&self, space: &NormedSpace, x: &[f64]) -> (f64, Point) {
        match self {
            Site::Points { coords } => {
                let mut best = (f64::INFINITY, 0);
                for (i, q) in coords.iter().enumerate() {
                    let d = space.dist(x, q);
                    if d < best.0 {
                        best = (d, i);
                    }
                }
                (best.0, coords[best.1].clone())
            }
            Site::Segment { a, b } => {
                let (d, t) = segment_nearest(space, a, b, x);
                (d, vector::lerp(a, b, t))
            }
            Site::Disc { center, radius } => {
                let d = space.dist(x, center);
                if d <= *radius {
                    (0.0, x.to_vec())
                } else {
                    let q = vector::lerp(center, x, radius / d);
                    (d - radius, q)
                }
            }
            Site::Box { min, max } => {
                let q: Point = x
                    .iter()
                    .zip(min.iter().zip(max))
                    .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
                    .collect();
                (space.dist(x, &q), q)
            }
            Site::Union { members } => {
                let mut best: Option<(f64, Point)> = None;
                for m in members {
                    let cand = m.nearest(space, x);
                    if best.as_ref().is_none_or(|b| cand.0 < b.0) {
                        best = Some(cand);
                    }
                }
                best.expect("validated unions are nonempty")
            }
        }
    }

    /// Every point of the site lies in the world.
    pub fn within(&self, world: &World, space: &NormedSpace) -> bool {
        match self {
            Site::Points { coords } => coords.iter().all(|p| world.contains_unchecked(space, p)),
            Site::Segment { a, b } => {
                world.contains_unchecked(space, a) && world.contains_unchecked(space, b)
            }
            Site::Disc { center, radius } => {
                world.contains_unchecked(space, center)
                    && world.point_boundary_distance(space, center) >= *radius
            }
            Site::Box { min, max } => box_corners(min, max)
                .iter()
                .all(|c| world.contains_unchecked(space, c)),
            Site::Union { members } => members.iter().all(|m| m.within(world, space)),
        }
    }

    /// `d(site, ∂X)` for a site inside a bounded convex world. The distance
    /// to ∂X is concave inside X, so convex sites attain it at extreme points.
    pub fn boundary_distance(&self, world: &World, space: &NormedSpace) -> f64 {
        let at = |p: &[f64]| world.point_boundary_distance(space, p);
        match self {
            Site::Points { coords } => coords.iter().map(|p| at(p)).fold(f64::INFINITY, f64::min),
            Site::Segment { a, b } => at(a).min(at(b)),
            Site::Disc { center, radius } => (at(center) - radius).max(0.0),
            Site::Box { min, max } => box_corners(min, max)
                .iter()
                .map(|c| at(c))
                .fold(f64::INFINITY, f64::min),
            Site::Union { members } => members
                .iter()
                .map(|m| m.boundary_distance(world, space))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// A finite sample of the site and the largest distance from a site
    /// point to its nearest sample. `per_feature` sets how many samples a
    /// segment, circle or box edge receives.
    pub fn sample(&self, space: &NormedSpace, per_feature: usize) -> SiteSample {
        let per_feature = per_feature.max(1);
        match self {
            Site::Points { coords } => SiteSample {
                points: coords.clone(),
                dispersion: 0.0,
            },
            Site::Segment { a, b } => {
                let n = per_feature;
                let points = (0..=n).map(|i| vector::lerp(a, b, i as f64 / n as f64)).collect();
                SiteSample {
                    points,
                    dispersion: space.dist(a, b) / (2.0 * n as f64),
                }
            }
            Site::Disc { center, radius } => sample_disc(space, center, *radius, per_feature),
            Site::Box { min, max } => sample_box(space, min, max, per_feature),
            Site::Union { members } => {
                let mut points = Vec::new();
                let mut dispersion: f64 = 0.0;
                for m in members {
                    let s = m.sample(space, per_feature);
                    points.extend(s.points);
                    dispersion = dispersion.max(s.dispersion);
                }
                SiteSample { points, dispersion }
            }
        }
    }
}

fn box_corners(min: &[f64], max: &[f64]) -> Vec<Point> {
    let d = min.len();
    (0..1usize << d)
        .map(|mask| {
            (0..d)
                .map(|i| if mask >> i & 1 == 1 { max[i] } else { min[i] })
                .collect()
        })
        .collect()
}

/// Nearest parameter on `[a, b]` and the distance. Closed form in ℓ2,
/// golden-section search on the convex profile otherwise.
pub(crate) fn segment_nearest(space: &NormedSpace, a: &[f64], b: &[f64], x: &[f64]) -> (f64, f64) {
    let dist_at = |t: f64| {
        space
            .norm
            .eval_iter(x.iter().zip(a.iter().zip(b)).map(|(v, (p, q))| v - (p + t * (q - p))))
    };
    let len2: f64 = a.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum();
    if len2 == 0.0 {
        return (space.dist(x, a), 0.0);
    }
    if matches!(space.norm, Norm::Lp { p } if p == 2.0) {
        let proj: f64 = x
            .iter()
            .zip(a.iter().zip(b))
            .map(|(v, (p, q))| (v - p) * (q - p))
            .sum::<f64>()
            / len2;
        let t = proj.clamp(0.0, 1.0);
        return (dist_at(t), t);
    }
    let t = golden_min(dist_at, 0.0, 1.0, SEGMENT_TOL);
    // the minimizer of a piecewise-linear profile may sit at an endpoint
    let candidates = [(dist_at(t), t), (dist_at(0.0), 0.0), (dist_at(1.0), 1.0)];
    candidates
        .into_iter()
        .fold((f64::INFINITY, 0.0), |best, c| if c.0 < best.0 { c } else { best })
}

/// Minimizer of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// A sampled site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteSample {
    pub points: Vec<Point>,
    /// Upper bound on the distance from any site point to the nearest sample.
    pub dispersion: f64,
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Point> {
    let mut out: Vec<Point> = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn half_step_norm(space: &NormedSpace, steps: &[f64]) -> f64 {
    space.norm.eval_iter(steps.iter().map(|s| 0.5 * s))
}

fn sample_box(space: &NormedSpace, min: &[f64], max: &[f64], per_feature: usize) -> SiteSample {
    // keep the full grid tractable in higher dimensions
    let n = grid_resolution(per_feature, min.len());
    let axes: Vec<Vec<f64>> = min.iter().zip(max).map(|(a, b)| grid_axis(*a, *b, n)).collect();
    let steps: Vec<f64> = min.iter().zip(max).map(|(a, b)| (b - a) / n as f64).collect();
    SiteSample {
        points: cartesian(&axes),
        dispersion: half_step_norm(space, &steps),
    }
}

fn grid_resolution(per_feature: usize, dim: usize) -> usize {
    let cap = (2_000_000f64).powf(1.0 / dim as f64) as usize;
    per_feature.min(cap.max(1)).max(1)
}

/// Grid points inside the disc plus radial projections of nearby outside
/// grid points onto its boundary; dispersion is at most twice the grid's.
fn sample_disc(space: &NormedSpace, center: &[f64], radius: f64, per_feature: usize) -> SiteSample {
    if radius == 0.0 {
        return SiteSample {
            points: vec![center.to_vec()],
            dispersion: 0.0,
        };
    }
    let d = center.len();
    let n = grid_resolution(per_feature, d);
    let axes: Vec<Vec<f64>> = center.iter().map(|c| grid_axis(c - radius, c + radius, n)).collect();
    let step = 2.0 * radius / n as f64;
    let grid_disp = half_step_norm(space, &vec![step; d]);
    let mut points = Vec::new();
    for g in cartesian(&axes) {
        let r = space.dist(&g, center);
        if r <= radius {
            points.push(g);
        } else if r <= radius + grid_disp {
            points.push(vector::lerp(center, &g, radius / r));
        }
    }
    SiteSample {
        points,
        dispersion: 2.0 * grid_disp,
    }
}

/// Estimated quantity with a one-sided error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    /// The true value lies in `[value, value + error]` for Hausdorff
    /// estimates and in `[value - error, value]` for set distances.
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// Checked distance from `x` to a site with an attaining nearest point.
pub fn site_distance(space: &NormedSpace, site: &Site, x: &[f64]) -> Result<(f64, Point)> {
    space.check_dim(x)?;
    if site.dim() != space.dim {
        return Err(Error::DimensionMismatch {
            expected: space.dim,
            got: site.dim(),
        });
    }
    Ok(site.nearest(space, x))
}

/// Hausdorff distance. Exact for finite point sets; otherwise each side is
/// sampled with `per_feature` samples per segment/circle/edge, measured
/// against the exact distance oracle of the other side, and the reported
/// error is the larger sample dispersion.
pub fn hausdorff(space: &NormedSpace, a: &Site, b: &Site, per_feature: usize) -> Estimate {
    let sa = a.sample(space, per_feature);
    let sb = b.sample(space, per_feature);
    let directed = |from: &SiteSample, to: &Site| {
        from.points
            .iter()
            .map(|p| to.distance_to(space, p))
            .fold(0.0, f64::max)
    };
    Estimate {
        value: directed(&sa, b).max(directed(&sb, a)),
        error: sa.dispersion.max(sb.dispersion),
    }
}

/// `inf{d(a, b) : a ∈ A, b ∈ B}`. Exact up to the golden-section tolerance
/// whenever one side is a point set, a disc, or both sides are convex.
pub fn set_distance(space: &NormedSpace, a: &Site, b: &Site) -> Estimate {
    match (a, b) {
        (Site::Union { members }, _) => min_estimate(members.iter().map(|m| set_distance(space, m, b))),
        (_, Site::Union { members }) => min_estimate(members.iter().map(|m| set_distance(space, a, m))),
        (Site::Points { coords }, other) | (other, Site::Points { coords }) => Estimate::exact(
            coords
                .iter()
                .map(|p| other.distance_to(space, p))
                .fold(f64::INFINITY, f64::min),
        ),
        (Site::Disc { center, radius }, other) | (other, Site::Disc { center, radius }) => {
            Estimate::exact((other.distance_to(space, center) - radius).max(0.0))
        }
        (Site::Box { min: l1, max: h1 }, Site::Box { min: l2, max: h2 }) => Estimate::exact(
            space.norm.eval_iter(
                (0..l1.len()).map(|i| (l2[i] - h1[i]).max(l1[i] - h2[i]).max(0.0)),
            ),
        ),
        (Site::Segment { a: p, b: q }, other) | (other, Site::Segment { a: p, b: q }) => {
            // distance to a convex set is convex along the segment
            let f = |t: f64| other.distance_to(space, &vector::lerp(p, q, t));
            let t = golden_min(f, 0.0, 1.0, SEGMENT_TOL);
            Estimate::exact(f(t).min(f(0.0)).min(f(1.0)))
        }
    }
}

fn min_estimate(it: impl Iterator<Item = Estimate>) -> Estimate {
    it.fold(
        Estimate {
            value: f64::INFINITY,
            error: 0.0,
        },
        |best, e| if e.value < best.value { e } else { best },
    )
}

/// Sites in a world under a norm. The cell of site `k` is dominated against
/// the union of all the other sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub space: NormedSpace,
    pub world: World,
    pub sites: Vec<Site>,
    /// A trusted analytic ρ that replaces the sampled estimate.
    pub rho_override: Option<f64>,
}

impl Configuration {
    pub fn new(space: NormedSpace, world: World, sites: Vec<Site>) -> Result<Self> {
        world.validate(&space)?;
        if sites.len() < 2 {
            return Err(Error::DomainError("a configuration needs at least two sites".into()));
        }
        for site in &sites {
            site.validate(space.dim)?;
            if !site.within(&world, &space) {
                return Err(Error::PointOutsideWorld);
            }
        }
        Ok(Self {
            space,
            world,
            sites,
            rho_override: None,
        })
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho_override = Some(rho);
        self
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// `d(x, A_k)` where `A_k` is the union of every site except `k`.
    #[inline]
    pub fn distance_to_others(&self, k: usize, x: &[f64]) -> f64 {
        self.sites
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, s)| s.distance_to(&self.space, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when some other site is strictly closer to `x` than `r`.
    #[inline]
    pub(crate) fn others_within(&self, k: usize, x: &[f64], r: f64) -> bool {
        self.sites
            .iter()
            .enumerate()
            .any(|(j, s)| j != k && s.distance_to(&self.space, x) < r)
    }

    /// The union `A_k` as a site.
    pub fn others(&self, k: usize) -> Site {
        Site::Union {
            members: self
                .sites
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Smallest distance from a site point to ∂X.
    pub fn boundary_gap(&self) -> Result<f64> {
        if !self.world.is_bounded() {
            return Err(Error::UnboundedWorld);
        }
        Ok(self
            .sites
            .iter()
            .map(|s| s.boundary_distance(&self.world, &self.space))
            .fold(f64::INFINITY, f64::min))
    }
}

/// `η = min_{j≠k} d(P_k, P_j)`.
pub fn eta(config: &Configuration) -> Estimate {
    let mut best = Estimate {
        value: f64::INFINITY,
        error: 0.0,
    };
    for (k, a) in config.sites.iter().enumerate() {
        for b in &config.sites[k + 1..] {
            let e = set_distance(&config.space, a, b);
            if e.value < best.value {
                best = e;
            }
        }
    }
    best
}

/// A sampled over-estimate of the smallest ρ with `B(x, ρ) ∩ A_k ≠ ∅` for
/// every `x ∈ X` and every `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    /// `max_sample + margin`; strictly above the true supremum.
    pub rho: f64,
    pub max_sample: f64,
    /// Sampling dispersion in the scene norm.
    pub margin: f64,
    pub samples: usize,
}

/// Grid over the world's bounding box with about `samples` points. Since
/// `x ↦ d(x, A_k)` is 1-Lipschitz, adding the grid dispersion bounds the
/// supremum over the whole box, hence over `X`.
pub fn rho_estimate(config: &Configuration, samples: usize) -> Result<RhoEstimate> {
    let (lo, hi) = config.world.bounding_box().ok_or(Error::UnboundedWorld)?;
    let d = config.space.dim;
    let per_axis = ((samples.max(2) as f64).powf(1.0 / d as f64).round() as usize).max(2);
    let n = per_axis - 1;
    let axes: Vec<Vec<f64>> = lo.iter().zip(&hi).map(|(a, b)| grid_axis(*a, *b, n)).collect();
    let steps: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / n as f64).collect();
    let margin = half_step_norm(&config.space, &steps);
    let mut max_sample: f64 = 0.0;
    let mut dists = vec![0.0; config.len()];
    let mut count = 0;
    for g in cartesian(&axes) {
        for (slot, s) in dists.iter_mut().zip(&config.sites) {
            *slot = s.distance_to(&config.space, &g);
        }
        // max over k of min over j != k is the second-smallest distance
        let (mut first, mut second) = (f64::INFINITY, f64::INFINITY);
        for &v in &dists {
            if v < first {
                second = first;
                first = v;
            } else if v < second {
                second = v;
            }
        }
        max_sample = max_sample.max(second);
        count += 1;
    }
    // strictly above the supremum even when the grid hits it exactly
    let margin = margin.max(f64::EPSILON * max_sample.max(1.0));
    Ok(RhoEstimate {
        rho: max_sample + margin,
        max_sample,
        margin,
        samples: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e2() -> NormedSpace {
        NormedSpace::euclidean(2)
    }

    #[test]
    fn site_distance_examples() {
        let (d, q) = site_distance(&e2(), &Site::point(vec![2.0, 0.0]), &[0.0, 0.0]).unwrap();
        assert_eq!((d, q), (2.0, vec![2.0, 0.0]));

        let seg = Site::segment(vec![-1.0, 0.0], vec![1.0, 0.0]);
        let (d, q) = site_distance(&e2(), &seg, &[0.0, 3.0]).unwrap();
        assert_eq!(d, 3.0);
        assert!(q[0].abs() < 1e-15 && q[1] == 0.0);

        let pts = Site::points(vec![vec![2.0, 0.0], vec![0.0, -2.0]]);
        let linf = NormedSpace::linf(2);
        let (d, q) = site_distance(&linf, &pts, &[1.0, -1.0]).unwrap();
        assert_eq!((d, q), (1.0, vec![2.0, 0.0]));
        // brute check: both points tie
        assert_eq!(linf.dist(&[1.0, -1.0], &[0.0, -2.0]), 1.0);

        assert!(site_distance(&e2(), &seg, &[0.0]).is_err());
    }

    #[test]
    fn segment_nearest_in_lp_matches_dense_scan() {
        let l3 = NormedSpace::lp(3.0, 2).unwrap();
        let l1 = NormedSpace::l1(2);
        let seg = Site::segment(vec![-2.0, 1.0], vec![3.0, -0.5]);
        for space in [l3, l1, NormedSpace::linf(2)] {
            for x in [[0.0, 3.0], [4.0, 4.0], [-5.0, 0.0], [0.3, 0.4]] {
                let (d, q) = seg.nearest(&space, &x);
                let scan = (0..=100_000)
                    .map(|i| {
                        let t = i as f64 / 100_000.0;
                        space.dist(&x, &vector::lerp(&[-2.0, 1.0], &[3.0, -0.5], t))
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(d <= scan + 1e-9, "{d} vs {scan}");
                assert!((space.dist(&x, &q) - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn disc_and_box_nearest() {
        let l3 = NormedSpace::lp(3.0, 2).unwrap();
        let disc = Site::disc(vec![1.0, 1.0], 0.5);
        let (d, q) = disc.nearest(&l3, &[3.0, 2.0]);
        assert!((l3.dist(&q, &[1.0, 1.0]) - 0.5).abs() < 1e-12);
        assert!((l3.dist(&q, &[3.0, 2.0]) - d).abs() < 1e-12);
        assert_eq!(disc.nearest(&l3, &[1.1, 1.0]).0, 0.0);

        let b = Site::Box {
            min: vec![-1.0, -1.0],
            max: vec![1.0, 1.0],
        };
        let (d, q) = b.nearest(&e2(), &[4.0, 5.0]);
        assert_eq!(q, vec![1.0, 1.0]);
        assert_eq!(d, 5.0);
        assert_eq!(b.distance_to(&e2(), &[4.0, 5.0]), 5.0);
    }

    #[test]
    fn hausdorff_examples() {
        let a = Site::points(vec![vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert_eq!(hausdorff(&e2(), &a, &a, 10).value, 0.0);
        let h = hausdorff(&e2(), &Site::point(vec![0.0, 0.0]), &Site::point(vec![3.0, 4.0]), 10);
        assert_eq!(h, Estimate::exact(5.0));
        let seg = Site::segment(vec![0.0, 0.0], vec![1.0, 0.0]);
        let h = hausdorff(&e2(), &seg, &Site::point(vec![0.0, 0.0]), 1000);
        assert!((h.value - 1.0).abs() <= h.error + 1e-15);
        assert!((h.error - 0.0005).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_segment_oracle() {
        // dense scan of both segments with a brute-force double loop
        let s1 = Site::segment(vec![0.0, 0.0], vec![4.0, 1.0]);
        let s2 = Site::segment(vec![0.5, 1.0], vec![3.0, 3.0]);
        let h = hausdorff(&e2(), &s1, &s2, 1000);
        let pts = |a: [f64; 2], b: [f64; 2]| -> Vec<Point> {
            (0..=2000).map(|i| vector::lerp(&a, &b, i as f64 / 2000.0)).collect()
        };
        let p1 = pts([0.0, 0.0], [4.0, 1.0]);
        let p2 = pts([0.5, 1.0], [3.0, 3.0]);
        let directed = |x: &[Point], y: &[Point]| {
            x.iter()
                .map(|a| y.iter().map(|b| e2().dist(a, b)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let brute = directed(&p1, &p2).max(directed(&p2, &p1));
        assert!((h.value - brute).abs() < h.error + 2e-3, "{h:?} {brute}");
    }

    fn two_points(a: Point, b: Point) -> Configuration {
        Configuration::new(e2(), World::square(10.0), vec![Site::point(a), Site::point(b)]).unwrap()
    }

    #[test]
    fn eta_examples() {
        let linf = NormedSpace::linf(2);
        let fig5 = Configuration::new(
            linf,
            World::square(10.0),
            vec![
                Site::point(vec![0.0, 0.0]),
                Site::point(vec![2.0, 0.0]),
                Site::point(vec![-2.0, 0.0]),
                Site::point(vec![0.0, -2.0]),
            ],
        )
        .unwrap();
        // enumeration of all six pairwise ℓ∞ distances: 2, 2, 2, 4, 2, 2
        assert_eq!(eta(&fig5).value, 2.0);
        assert_eq!(eta(&two_points(vec![0.0, 0.0], vec![0.0, 0.0])).value, 0.0);
        assert_eq!(eta(&two_points(vec![0.0, 0.0], vec![6.0, 0.0])).value, 6.0);
    }

    #[test]
    fn set_distance_convex_pairs() {
        let s = e2();
        let seg = Site::segment(vec![0.0, 0.0], vec![4.0, 0.0]);
        let seg2 = Site::segment(vec![1.0, 3.0], vec![2.0, 1.0]);
        assert!((set_distance(&s, &seg, &seg2).value - 1.0).abs() < 1e-9);
        let disc = Site::disc(vec![0.0, 5.0], 1.0);
        assert!((set_distance(&s, &seg, &disc).value - 4.0).abs() < 1e-12);
        let b1 = Site::Box { min: vec![0.0, 0.0], max: vec![1.0, 1.0] };
        let b2 = Site::Box { min: vec![4.0, 5.0], max: vec![6.0, 6.0] };
        assert_eq!(set_distance(&s, &b1, &b2).value, 5.0);
        assert!((set_distance(&s, &b1, &Site::segment(vec![3.0, 1.0], vec![3.0, 4.0])).value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rho_estimate_examples() {
        let c = two_points(vec![-1.0, 0.0], vec![1.0, 0.0]);
        let r = rho_estimate(&c, 40_401).unwrap();
        // grid brute force: the worst point is a corner, at distance √221
        let sqrt221 = 221f64.sqrt();
        assert!(r.max_sample <= sqrt221 + 1e-12);
        assert!((r.max_sample - sqrt221).abs() < 1e-9);
        assert!(r.rho > sqrt221);
        assert!((r.margin - (0.05f64 * 0.05 * 2.0).sqrt()).abs() < 1e-12);

        let coincident = two_points(vec![0.0, 0.0], vec![0.0, 0.0]);
        let r = rho_estimate(&coincident, 10_000).unwrap();
        assert!((r.max_sample - 200f64.sqrt()).abs() < 1e-9);

        let unbounded = Configuration::new(
            e2(),
            World::unbounded(2),
            vec![Site::point(vec![0.0, 0.0]), Site::point(vec![1.0, 0.0])],
        )
        .unwrap();
        assert_eq!(rho_estimate(&unbounded, 100), Err(Error::UnboundedWorld));
    }

    #[test]
    fn boundary_distance_examples() {
        let w = World::square(10.0);
        let s = e2();
        assert_eq!(Site::point(vec![0.0, 0.0]).boundary_distance(&w, &s), 10.0);
        assert_eq!(Site::point(vec![9.0, 0.0]).boundary_distance(&w, &s), 1.0);
        let seg = Site::segment(vec![-1.0, 8.0], vec![1.0, 8.0]);
        let closed = seg.boundary_distance(&w, &s);
        // dense sampling oracle
        let sampled = (0..=1000)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / 1000.0;
                w.point_boundary_distance(&s, &[x, 8.0])
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(closed, 2.0);
        assert!((closed - sampled).abs() < 1e-12);
    }

    #[test]
    fn configuration_rejects_sites_outside_world() {
        let r = Configuration::new(
            e2(),
            World::square(1.0),
            vec![Site::point(vec![0.0, 0.0]), Site::disc(vec![0.5, 0.0], 0.6)],
        );
        assert_eq!(r, Err(Error::PointOutsideWorld));
        let r = Configuration::new(e2(), World::square(1.0), vec![Site::point(vec![0.0, 0.0])]);
        assert!(r.is_err());
    }
}
