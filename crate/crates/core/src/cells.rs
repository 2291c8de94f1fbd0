//! Voronoi cells as fans of segments.
//!
//! Every point of a dominance region lies on a segment `[p, p + T(θ,p) θ]`
//! for some anchor `p` of the site and some unit direction `θ`, where
//!
//! ```text
//! T(θ, p) = sup { t >= 0 : p + tθ ∈ X and d(p + tθ, p) <= d(p + tθ, A) }.
//! ```
//!
//! The feasible `t` form an interval `[0, T]`, so `T` is found by bisection.
//! A [`CellApprox`] stores `T` for a finite set of anchors and directions;
//! its resolution metadata quantifies how far the fan can be from the cell.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sites::{segment_nearest, Configuration, Site};
use crate::space::{Norm, NormedSpace};
use crate::vector::{self, Point};

/// Hard cap on bisection steps.
pub const MAX_BISECTION_STEPS: usize = 200;

/// Bisection settings for [`compute_t`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TOptions {
    /// Width of the final bracket.
    pub tol: f64,
    pub max_steps: usize,
    /// Optional ρ bound; `T <= ρ` whenever every ball of radius ρ meets `A`.
    pub rho: Option<f64>,
}

impl TOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            max_steps: MAX_BISECTION_STEPS,
            rho: None,
        }
    }

    /// `1e-9 × diameter` of the world.
    pub fn for_config(config: &Configuration) -> Result<Self> {
        let diam = config.world.diameter(&config.space)?;
        Ok(Self {
            tol: 1e-9 * diam,
            max_steps: MAX_BISECTION_STEPS,
            rho: config.rho_override,
        })
    }
}

/// `d(x, P_k) - d(x, A_k)`; nonpositive exactly on the cell of site `k`.
pub fn dominance_gap(config: &Configuration, k: usize, x: &[f64]) -> Result<f64> {
    check_site(config, k)?;
    if !config.world.contains(&config.space, x)? {
        return Err(Error::PointOutsideWorld);
    }
    Ok(config.sites[k].distance_to(&config.space, x) - config.distance_to_others(k, x))
}

fn check_site(config: &Configuration, k: usize) -> Result<()> {
    if k >= config.len() {
        return Err(Error::DomainError(format!(
            "site index {k} out of range for {} sites",
            config.len()
        )));
    }
    Ok(())
}

/// Largest `t` in `[0, upper]` satisfying a predicate that holds on an
/// initial interval. The supremum is closed, so a predicate that holds at
/// `upper` returns `upper` itself; otherwise the midpoint of the final
/// bracket is returned.
pub fn bisect_sup(mut feasible: impl FnMut(f64) -> bool, upper: f64, tol: f64, max_steps: usize) -> f64 {
    if feasible(upper) {
        return upper;
    }
    let (mut lo, mut hi) = (0.0, upper);
    let mut steps = 0;
    while hi - lo > tol && steps < max_steps {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    0.5 * (lo + hi)
}

/// The anchor-based predicate `d(p + tθ, p) <= d(p + tθ, A_k)`. Since
/// `|θ| = 1`, the left side is `t`.
fn ray_predicate<'a>(
    config: &'a Configuration,
    k: usize,
    p: &'a [f64],
    theta: &'a [f64],
) -> impl FnMut(f64) -> bool + 'a {
    let mut buf = vec![0.0; p.len()];
    move |t: f64| {
        vector::along_into(&mut buf, p, theta, t);
        !config.others_within(k, &buf, t)
    }
}

/// `T(θ, p)` without precondition checks, searched on `[0, upper]`.
pub(crate) fn t_on_interval(
    config: &Configuration,
    k: usize,
    p: &[f64],
    theta: &[f64],
    upper: f64,
    tol: f64,
    max_steps: usize,
) -> f64 {
    bisect_sup(ray_predicate(config, k, p, theta), upper, tol, max_steps)
}

/// Result of a search for `T` without an a priori upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RayLength {
    Finite(f64),
    /// The predicate still held at the search cap.
    Unbounded { checked_to: f64 },
}

impl RayLength {
    pub fn is_unbounded(&self) -> bool {
        matches!(self, RayLength::Unbounded { .. })
    }
}

/// `T(θ, p)` for possibly unbounded worlds: the bracket is grown by doubling
/// up to `cap` before bisecting. No separation precondition is enforced,
/// which is what the counterexample scenarios need.
pub fn t_unbounded(
    config: &Configuration,
    k: usize,
    p: &[f64],
    theta: &[f64],
    tol: f64,
    cap: f64,
) -> RayLength {
    let exit = config.world.ray_exit_unchecked(&config.space, p, theta);
    let mut pred = ray_predicate(config, k, p, theta);
    if exit.is_finite() {
        return RayLength::Finite(bisect_sup(pred, exit, tol, MAX_BISECTION_STEPS));
    }
    let mut hi = 1.0;
    while pred(hi) {
        if hi >= cap {
            return RayLength::Unbounded { checked_to: hi };
        }
        hi *= 2.0;
    }
    RayLength::Finite(bisect_sup(pred, hi, tol, MAX_BISECTION_STEPS))
}

/// `T(θ, p)` by bisection on `[0, min(L(θ), ρ)]`.
pub fn compute_t(
    config: &Configuration,
    k: usize,
    p: &[f64],
    theta: &[f64],
    opts: &TOptions,
) -> Result<f64> {
    check_site(config, k)?;
    let space = &config.space;
    space.check_dim(p)?;
    space.check_dim(theta)?;
    if (space.norm.eval(theta) - 1.0).abs() > 1e-9 {
        return Err(Error::PreconditionViolated("theta must be a unit vector of the scene norm".into()));
    }
    let exit = config.world.ray_exit(space, p, theta)?;
    let scale = 1.0 + space.norm.eval(p);
    if config.sites[k].distance_to(space, p) > 1e-9 * scale {
        return Err(Error::PreconditionViolated("anchor is not a point of the site".into()));
    }
    if config.distance_to_others(k, p) <= 0.0 {
        return Err(Error::AnchorOnOtherSite);
    }
    let upper = opts.rho.map_or(exit, |r| exit.min(r));
    if !upper.is_finite() {
        return Err(Error::UnboundedWorld);
    }
    Ok(t_on_interval(config, k, p, theta, upper, opts.tol, opts.max_steps))
}

/// `n` directions, unit in the scene norm. In the plane they are uniform in
/// Euclidean angle starting at `+e1`, counterclockwise, and exactly
/// symmetric under the square's symmetry group when `8 | n`. In 3-d a
/// Fibonacci lattice is used; higher dimensions draw Gaussian directions
/// from `seed`.
pub fn unit_directions(space: &NormedSpace, n: usize, seed: u64) -> Vec<Point> {
    let raw: Vec<Point> = match space.dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..n).map(|i| circle_direction(i, n)).collect(),
        3 => fibonacci_sphere(n),
        d => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| loop {
                    let v: Point = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    if vector::euclidean(&v) > 1e-12 {
                        break v;
                    }
                })
                .collect()
        }
    };
    raw.into_iter().map(|v| renormalize(space, &v)).collect()
}

fn renormalize(space: &NormedSpace, v: &[f64]) -> Point {
    let n = space.norm.eval(v);
    v.iter().map(|x| x / n).collect()
}

/// `(cos, sin)` of `2π i / n`, built from one quadrant by exact sign flips
/// and mirrored about the diagonal.
fn circle_direction(i: usize, n: usize) -> Point {
    let quadrant = (4 * i) / n;
    let r = 4 * i - quadrant * n; // angle within quadrant is (π/2) r / n
    let (c, s) = if r == 0 {
        (1.0, 0.0)
    } else if 2 * r == n {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else if 2 * r < n {
        let a = FRAC_PI_2 * r as f64 / n as f64;
        (a.cos(), a.sin())
    } else {
        let b = FRAC_PI_2 * (n - r) as f64 / n as f64;
        (b.sin(), b.cos())
    };
    match quadrant {
        0 => vec![c, s],
        1 => vec![-s, c],
        2 => vec![-c, -s],
        _ => vec![s, -c],
    }
}

fn fibonacci_sphere(n: usize) -> Vec<Point> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

fn angle_of(v: &[f64]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

/// One segment `[p, p + T θ]` of a fan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaySegment {
    pub theta: Point,
    #[serde(rename = "T")]
    pub t: f64,
}

/// Segments sharing one anchor. In the plane the rays are sorted by angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fan {
    #[serde(rename = "p")]
    pub anchor: Point,
    pub rays: Vec<RaySegment>,
}

impl Fan {
    pub fn endpoint(&self, i: usize) -> Point {
        vector::along(&self.anchor, &self.rays[i].theta, self.rays[i].t)
    }

    fn endpoints(&self) -> Vec<Point> {
        (0..self.rays.len()).map(|i| self.endpoint(i)).collect()
    }
}

/// A Voronoi cell approximated by fans of segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellApprox {
    /// Index of the site in its configuration.
    pub k: usize,
    pub fans: Vec<Fan>,
    /// Base number of directions per anchor (before any refinement).
    pub directions: usize,
    pub space: NormedSpace,
    /// Bisection bracket width.
    pub tol: f64,
    /// Largest distance from a site point to its nearest anchor.
    pub anchor_dispersion: f64,
    /// Estimated Hausdorff distance between the fan and the true cell:
    /// half the largest gap between neighbouring endpoints, plus anchor
    /// dispersion and bisection tolerance.
    pub resolution: f64,
    /// Distance threshold used by [`cell_membership`].
    pub membership_radius: f64,
}

/// Settings for [`build_cell`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOptions {
    pub directions: usize,
    /// Anchors per continuous site piece; `None` uses 256 per unit length,
    /// capped at 4096.
    pub anchors: Option<usize>,
    /// Bisection tolerance; `None` uses `1e-9 × diameter`.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl CellOptions {
    pub fn for_dim(dim: usize) -> Self {
        Self {
            directions: if dim <= 2 { 720 } else { 4096 },
            anchors: None,
            tol: None,
            seed: 0,
        }
    }

    pub fn with_directions(mut self, n: usize) -> Self {
        self.directions = n;
        self
    }
}

/// Anchors of one site, and their dispersion. Point sites use every
/// point; continuous pieces are sampled on their boundary, since the rays
/// from boundary anchors sweep the interior as well.
pub fn site_anchors(site: &Site, space: &NormedSpace, per_piece: Option<usize>) -> (Vec<Point>, f64) {
    let count_for = |length: f64| {
        per_piece.unwrap_or_else(|| ((256.0 * length).ceil() as usize).clamp(2, 4096)).max(2)
    };
    match site {
        Site::Points { coords } => (coords.clone(), 0.0),
        Site::Segment { a, b } => {
            let len = space.dist(a, b);
            if len == 0.0 {
                return (vec![a.clone()], 0.0);
            }
            let m = count_for(len);
            let pts = (0..m).map(|i| vector::lerp(a, b, i as f64 / (m - 1) as f64)).collect();
            (pts, len / (2.0 * (m - 1) as f64))
        }
        Site::Disc { center, radius } => {
            if *radius == 0.0 {
                return (vec![center.clone()], 0.0);
            }
            let m = count_for(TAU * radius);
            let pts: Vec<Point> = unit_directions(space, m, 0)
                .iter()
                .map(|u| vector::along(center, u, *radius))
                .collect();
            let disp = max_cyclic_gap(space, &pts) / 2.0;
            (pts, disp)
        }
        Site::Box { min, max } => box_boundary_anchors(space, min, max, count_for),
        Site::Union { members } => {
            let mut pts = Vec::new();
            let mut disp: f64 = 0.0;
            for m in members {
                let (p, d) = site_anchors(m, space, per_piece);
                pts.extend(p);
                disp = disp.max(d);
            }
            (pts, disp)
        }
    }
}

fn box_boundary_anchors(
    space: &NormedSpace,
    min: &[f64],
    max: &[f64],
    count_for: impl Fn(f64) -> usize,
) -> (Vec<Point>, f64) {
    let d = min.len();
    if d == 2 {
        let corners = [
            vec![min[0], min[1]],
            vec![max[0], min[1]],
            vec![max[0], max[1]],
            vec![min[0], max[1]],
        ];
        let mut pts = Vec::new();
        let mut disp: f64 = 0.0;
        for e in 0..4 {
            let (a, b) = (&corners[e], &corners[(e + 1) % 4]);
            let len = space.dist(a, b);
            if len == 0.0 {
                pts.push(a.clone());
                continue;
            }
            let m = count_for(len);
            pts.extend((0..m - 1).map(|i| vector::lerp(a, b, i as f64 / (m - 1) as f64)));
            disp = disp.max(len / (2.0 * (m - 1) as f64));
        }
        pts.dedup();
        return (pts, disp);
    }
    // higher dimensions: boundary points of a regular grid
    let n = 16usize;
    let steps: Vec<f64> = min.iter().zip(max).map(|(a, b)| (b - a) / n as f64).collect();
    let mut pts = Vec::new();
    let total = (n + 1).pow(d as u32);
    for idx in 0..total {
        let mut rem = idx;
        let mut on_face = false;
        let p: Point = (0..d)
            .map(|i| {
                let j = rem % (n + 1);
                rem /= n + 1;
                on_face |= j == 0 || j == n;
                min[i] + steps[i] * j as f64
            })
            .collect();
        if on_face {
            pts.push(p);
        }
    }
    let disp = space.norm.eval_iter(steps.iter().map(|s| 0.5 * s));
    (pts, disp)
}

fn max_cyclic_gap(space: &NormedSpace, pts: &[Point]) -> f64 {
    (0..pts.len())
        .map(|i| space.dist(&pts[i], &pts[(i + 1) % pts.len()]))
        .fold(0.0, f64::max)
}

/// Anchors of site `k` with the separation precondition checked.
fn checked_anchors(config: &Configuration, k: usize, opts: &CellOptions) -> Result<(Vec<Point>, f64)> {
    let (anchors, disp) = site_anchors(&config.sites[k], &config.space, opts.anchors);
    for a in &anchors {
        if config.distance_to_others(k, a) <= 0.0 {
            return Err(Error::AnchorOnOtherSite);
        }
    }
    Ok((anchors, disp))
}

/// Fan of `opts.directions` rays per anchor for the cell of site `k`.
pub fn build_cell(config: &Configuration, k: usize, opts: &CellOptions) -> Result<CellApprox> {
    check_site(config, k)?;
    if opts.directions < 4 {
        return Err(Error::DomainError("need at least 4 directions".into()));
    }
    let (anchors, disp) = checked_anchors(config, k, opts)?;
    let dirs = unit_directions(&config.space, opts.directions, opts.seed);
    let per_fan = vec![dirs; anchors.len()];
    assemble(config, k, anchors, disp, &per_fan, opts)
}

/// Builds with `N` directions and `M` anchors per continuous piece.
pub fn build_cell_with(config: &Configuration, k: usize, n: usize, m: usize, tol: f64) -> Result<CellApprox> {
    let opts = CellOptions {
        directions: n,
        anchors: Some(m),
        tol: Some(tol),
        seed: 0,
    };
    build_cell(config, k, &opts)
}

/// Rebuilds the cell of site `k` on the same direction sets as `template`,
/// fan by fan. Anchors of `config`'s site `k` must correspond one-to-one
/// with the template's (same site kinds and sampling counts).
pub fn build_cell_like(config: &Configuration, k: usize, template: &CellApprox, opts: &CellOptions) -> Result<CellApprox> {
    check_site(config, k)?;
    let (anchors, disp) = checked_anchors(config, k, opts)?;
    if anchors.len() != template.fans.len() {
        return Err(Error::ResolutionMismatch);
    }
    let per_fan: Vec<Vec<Point>> = template
        .fans
        .iter()
        .map(|f| f.rays.iter().map(|r| r.theta.clone()).collect())
        .collect();
    let mut cell = assemble(config, k, anchors, disp, &per_fan, opts)?;
    cell.directions = template.directions;
    Ok(cell)
}

fn assemble(
    config: &Configuration,
    k: usize,
    anchors: Vec<Point>,
    anchor_dispersion: f64,
    per_fan: &[Vec<Point>],
    opts: &CellOptions,
) -> Result<CellApprox> {
    let mut topts = TOptions::for_config(config)?;
    if let Some(tol) = opts.tol {
        topts.tol = tol;
    }
    let fans = anchors
        .into_iter()
        .zip(per_fan)
        .map(|(anchor, dirs)| {
            let rays = trace_rays(config, k, &anchor, dirs, &topts);
            Fan { anchor, rays }
        })
        .collect();
    let mut cell = CellApprox {
        k,
        fans,
        directions: per_fan.first().map_or(0, Vec::len),
        space: config.space,
        tol: topts.tol,
        anchor_dispersion,
        resolution: 0.0,
        membership_radius: 0.0,
    };
    cell.refresh_metadata();
    Ok(cell)
}

fn trace_rays(config: &Configuration, k: usize, anchor: &[f64], dirs: &[Point], topts: &TOptions) -> Vec<RaySegment> {
    let one = |theta: &Point| {
        let exit = config.world.ray_exit_unchecked(&config.space, anchor, theta);
        let upper = topts.rho.map_or(exit, |r| exit.min(r));
        RaySegment {
            theta: theta.clone(),
            t: t_on_interval(config, k, anchor, theta, upper, topts.tol, topts.max_steps),
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        dirs.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        dirs.iter().map(one).collect()
    }
}

impl CellApprox {
    pub fn ray_count(&self) -> usize {
        self.fans.iter().map(|f| f.rays.len()).sum()
    }

    /// Longest segment in the cell.
    pub fn reach(&self) -> f64 {
        self.fans
            .iter()
            .flat_map(|f| f.rays.iter().map(|r| r.t))
            .fold(0.0, f64::max)
    }

    fn dim(&self) -> usize {
        self.space.dim
    }

    fn refresh_metadata(&mut self) {
        let space = self.space;
        let mut endpoint_gap: f64 = 0.0;
        let mut dir_gap: f64 = 0.0;
        for fan in &self.fans {
            if fan.rays.len() < 2 {
                continue;
            }
            let ends = fan.endpoints();
            let dirs: Vec<Point> = fan.rays.iter().map(|r| r.theta.clone()).collect();
            if self.dim() == 2 {
                endpoint_gap = endpoint_gap.max(max_cyclic_gap(&space, &ends));
                dir_gap = dir_gap.max(max_cyclic_gap(&space, &dirs));
            } else {
                endpoint_gap = endpoint_gap.max(max_nn_gap(&space, &ends));
                dir_gap = dir_gap.max(max_nn_gap(&space, &dirs));
            }
        }
        self.resolution = 0.5 * endpoint_gap + self.anchor_dispersion + self.tol;
        self.membership_radius = 0.5 * dir_gap * self.reach() + self.anchor_dispersion + self.tol;
    }

    /// Inserts bisected directions between neighbouring planar rays whose
    /// endpoints are farther apart than `2 × target`, until the estimated
    /// resolution drops below `target` or `max_rays_per_fan` is reached.
    pub fn refine(&mut self, config: &Configuration, target: f64, max_rays_per_fan: usize) -> Result<()> {
        if self.dim() != 2 {
            return Err(Error::NotTwoDimensional);
        }
        let topts = TOptions {
            tol: self.tol,
            max_steps: MAX_BISECTION_STEPS,
            rho: config.rho_override,
        };
        let k = self.k;
        let space = self.space;
        for fan in &mut self.fans {
            loop {
                let n = fan.rays.len();
                if n >= max_rays_per_fan {
                    break;
                }
                let ends = fan.endpoints();
                let mut refined = Vec::with_capacity(2 * n);
                let mut inserted = 0;
                for i in 0..n {
                    let j = (i + 1) % n;
                    refined.push(fan.rays[i].clone());
                    if n + inserted >= max_rays_per_fan {
                        continue;
                    }
                    if space.dist(&ends[i], &ends[j]) > 2.0 * target {
                        let a = angle_of(&fan.rays[i].theta);
                        let mut b = angle_of(&fan.rays[j].theta);
                        if b <= a {
                            b += TAU;
                        }
                        let mid = 0.5 * (a + b);
                        if (b - a) < 1e-12 {
                            continue;
                        }
                        let theta = renormalize(&space, &[mid.cos(), mid.sin()]);
                        let exit = config.world.ray_exit_unchecked(&space, &fan.anchor, &theta);
                        let upper = topts.rho.map_or(exit, |r| exit.min(r));
                        let t = t_on_interval(config, k, &fan.anchor, &theta, upper, topts.tol, topts.max_steps);
                        refined.push(RaySegment { theta, t });
                        inserted += 1;
                    }
                }
                fan.rays = refined;
                if inserted == 0 {
                    break;
                }
            }
        }
        self.refresh_metadata();
        Ok(())
    }
}

fn max_nn_gap(space: &NormedSpace, pts: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, a) in pts.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, b) in pts.iter().enumerate() {
            if i != j {
                best = best.min(space.dist(a, b));
            }
        }
        worst = worst.max(best);
    }
    worst
}

fn segment_distance(space: &NormedSpace, anchor: &[f64], ray: &RaySegment, x: &[f64]) -> f64 {
    let end = vector::along(anchor, &ray.theta, ray.t);
    segment_nearest(space, anchor, &end, x).0
}

/// Scene-norm distance from `x` to the union of the cell's segments.
pub fn distance_to_fans(cell: &CellApprox, x: &[f64]) -> f64 {
    cell.fans
        .iter()
        .map(|f| {
            f.rays
                .iter()
                .map(|r| segment_distance(&cell.space, &f.anchor, r, x))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Approximate membership: `x` is within `membership_radius` of a segment.
/// In the plane only the rays angularly adjacent to `x` are examined, which
/// is where a point of the cell finds its covering segment.
pub fn cell_membership(cell: &CellApprox, x: &[f64]) -> bool {
    let radius = cell.membership_radius;
    let bounds = norm_equivalence(&cell.space);
    let near = |anchor: &[f64], r: &RaySegment| within_segment(&cell.space, bounds, anchor, r, x, radius);
    for fan in &cell.fans {
        let rel = vector::sub(x, &fan.anchor);
        if cell.space.norm.eval(&rel) <= radius {
            return true;
        }
        let n = fan.rays.len();
        if cell.dim() == 2 && n >= 8 {
            let a = angle_of(&rel);
            let idx = fan.rays.partition_point(|r| angle_of(&r.theta) <= a);
            for off in 0..4usize {
                for i in [idx + n - 1 - off, idx + off] {
                    if near(&fan.anchor, &fan.rays[i % n]) {
                        return true;
                    }
                }
            }
        } else if fan.rays.iter().any(|r| near(&fan.anchor, r)) {
            return true;
        }
    }
    false
}

/// `(lo, hi)` with `lo |v|_2 <= |v| <= hi |v|_2`.
fn norm_equivalence(space: &NormedSpace) -> (f64, f64) {
    let d = space.dim as f64;
    match space.norm {
        Norm::L1 => (1.0, d.sqrt()),
        Norm::Linf => (d.powf(-0.5), 1.0),
        Norm::Lp { p } if p >= 2.0 => (d.powf(1.0 / p - 0.5), 1.0),
        Norm::Lp { p } => (1.0, d.powf(1.0 / p - 0.5)),
    }
}

/// `dist(x, segment) <= r`, deciding from the Euclidean distance when the
/// norm-equivalence bounds settle it.
fn within_segment(space: &NormedSpace, (lo, hi): (f64, f64), anchor: &[f64], ray: &RaySegment, x: &[f64], r: f64) -> bool {
    let mut dd = 0.0;
    let mut rel_dot = 0.0;
    for i in 0..x.len() {
        let d = ray.theta[i] * ray.t;
        dd += d * d;
        rel_dot += (x[i] - anchor[i]) * d;
    }
    let s = if dd > 0.0 { (rel_dot / dd).clamp(0.0, 1.0) } else { 0.0 };
    let e2 = x
        .iter()
        .zip(anchor)
        .zip(&ray.theta)
        .map(|((xi, ai), ti)| {
            let v = xi - ai - s * ray.t * ti;
            v * v
        })
        .sum::<f64>()
        .sqrt();
    if lo * e2 > r {
        return false;
    }
    // the Euclidean minimizer gives an upper bound in any norm
    if hi * e2 <= r || space.norm.eval_iter((0..x.len()).map(|i| x[i] - anchor[i] - s * ray.t * ray.theta[i])) <= r {
        return true;
    }
    segment_distance(space, anchor, ray, x) <= r
}

/// Hausdorff distance between two cells with its measurement resolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellDistance {
    pub value: f64,
    /// `|value - D(R, R')| <= resolution` up to the fan-resolution estimates.
    pub resolution: f64,
}

fn check_compatible(a: &CellApprox, b: &CellApprox) -> Result<()> {
    if a.space != b.space || a.directions != b.directions {
        return Err(Error::ResolutionMismatch);
    }
    Ok(())
}

/// Sampled Hausdorff distance between the segment unions of two cells.
/// Every segment is sampled at spacing `max(resolution)`; each sample is
/// measured against the other fan through a bucket grid (planar) or by
/// brute force.
pub fn cell_hausdorff(a: &CellApprox, b: &CellApprox) -> Result<CellDistance> {
    check_compatible(a, b)?;
    let spacing = a.resolution.max(b.resolution).max(1e-6);
    let value = directed_fan_distance(a, b, spacing).max(directed_fan_distance(b, a, spacing));
    Ok(CellDistance {
        value,
        resolution: a.resolution + b.resolution + 0.5 * spacing,
    })
}

fn directed_fan_distance(from: &CellApprox, to: &CellApprox, spacing: f64) -> f64 {
    let index = SegmentIndex::new(to);
    let mut worst: f64 = 0.0;
    for fan in &from.fans {
        for ray in &fan.rays {
            let steps = (ray.t / spacing).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let x = vector::along(&fan.anchor, &ray.theta, ray.t * s as f64 / steps as f64);
                worst = worst.max(index.distance(&x, worst));
            }
        }
    }
    worst
}

/// Bound on `D(fan_a, fan_b)` when both cells share their direction sets
/// fan by fan: segments paired by index are within the larger of their
/// endpoint distances, and the Hausdorff distance of two unions is at most
/// the largest pairwise one. `None` if the fans do not correspond.
pub fn paired_fan_bound(a: &CellApprox, b: &CellApprox) -> Option<f64> {
    if a.space != b.space || a.fans.len() != b.fans.len() {
        return None;
    }
    let space = &a.space;
    let mut bound: f64 = 0.0;
    for (fa, fb) in a.fans.iter().zip(&b.fans) {
        if fa.rays.len() != fb.rays.len() {
            return None;
        }
        let anchor_shift = space.dist(&fa.anchor, &fb.anchor);
        bound = bound.max(anchor_shift);
        for (i, (ra, rb)) in fa.rays.iter().zip(&fb.rays).enumerate() {
            if ra.theta != rb.theta {
                return None;
            }
            bound = bound.max(space.dist(&fa.endpoint(i), &fb.endpoint(i)));
        }
    }
    Some(bound)
}

/// Planar bucket grid over a cell's segments for nearest-segment queries.
struct SegmentIndex<'a> {
    cell: &'a CellApprox,
    segments: Vec<(usize, usize)>,
    grid: Option<Grid>,
    /// Lower bound of `|v| / |v|_2` for the scene norm.
    norm_floor: f64,
}

struct Grid {
    origin: [f64; 2],
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> SegmentIndex<'a> {
    fn new(cell: &'a CellApprox) -> Self {
        let segments: Vec<(usize, usize)> = cell
            .fans
            .iter()
            .enumerate()
            .flat_map(|(f, fan)| (0..fan.rays.len()).map(move |r| (f, r)))
            .collect();
        let norm_floor = norm_equivalence(&cell.space).0;
        let grid = (cell.space.dim == 2 && !segments.is_empty()).then(|| Grid::build(cell, &segments));
        Self {
            cell,
            segments,
            grid,
            norm_floor,
        }
    }

    fn seg_dist(&self, s: (usize, usize), x: &[f64]) -> f64 {
        let fan = &self.cell.fans[s.0];
        segment_distance(&self.cell.space, &fan.anchor, &fan.rays[s.1], x)
    }

    /// Distance from `x` to the indexed union. The search stops early once
    /// every remaining segment is provably farther than `already` would
    /// matter for a running maximum... it still returns the exact minimum
    /// whenever that minimum exceeds `already`.
    fn distance(&self, x: &[f64], already: f64) -> f64 {
        let Some(grid) = &self.grid else {
            return self
                .segments
                .iter()
                .map(|&s| self.seg_dist(s, x))
                .fold(f64::INFINITY, f64::min);
        };
        let cx = ((x[0] - grid.origin[0]) / grid.size).floor() as i64;
        let cy = ((x[1] - grid.origin[1]) / grid.size).floor() as i64;
        let mut best = f64::INFINITY;
        let max_ring = (grid.nx.max(grid.ny) as i64) + cx.abs().max(cy.abs()) + 1;
        let mut seen = std::collections::HashSet::new();
        for ring in 0..=max_ring {
            for (bx, by) in ring_cells(cx, cy, ring) {
                if bx < 0 || by < 0 || bx >= grid.nx as i64 || by >= grid.ny as i64 {
                    continue;
                }
                for &s in &grid.buckets[by as usize * grid.nx + bx as usize] {
                    if seen.insert(s) {
                        best = best.min(self.seg_dist(self.segments[s as usize], x));
                    }
                }
            }
            let floor = self.norm_floor * ring as f64 * grid.size;
            // nothing unexamined can beat `best`, or can raise the running max
            if floor >= best || best <= already {
                break;
            }
        }
        best
    }
}

fn ring_cells(cx: i64, cy: i64, r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(cx, cy)];
    }
    let mut out = Vec::with_capacity(8 * r as usize);
    for dx in -r..=r {
        out.push((cx + dx, cy - r));
        out.push((cx + dx, cy + r));
    }
    for dy in -r + 1..r {
        out.push((cx - r, cy + dy));
        out.push((cx + r, cy + dy));
    }
    out
}

impl Grid {
    fn build(cell: &CellApprox, segments: &[(usize, usize)]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        let seg_box = |&(f, r): &(usize, usize)| {
            let fan = &cell.fans[f];
            let e = fan.endpoint(r);
            let a = &fan.anchor;
            ([a[0].min(e[0]), a[1].min(e[1])], [a[0].max(e[0]), a[1].max(e[1])])
        };
        let boxes: Vec<_> = segments.iter().map(seg_box).collect();
        for (l, h) in &boxes {
            for i in 0..2 {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        let side = ((segments.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let size = extent / side as f64;
        let nx = (((hi[0] - lo[0]) / size).floor() as usize + 1).max(1);
        let ny = (((hi[1] - lo[1]) / size).floor() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (s, (l, h)) in boxes.iter().enumerate() {
            // walk the buckets the segment actually crosses
            let (f, r) = segments[s];
            let fan = &cell.fans[f];
            let a = &fan.anchor;
            let e = fan.endpoint(r);
            let len = ((e[0] - a[0]).powi(2) + (e[1] - a[1]).powi(2)).sqrt();
            let steps = ((len / (0.5 * size)).ceil() as usize).max(1);
            let mut last = usize::MAX;
            for i in 0..=steps {
                let t = i as f64 / steps as f64;
                let px = a[0] + t * (e[0] - a[0]);
                let py = a[1] + t * (e[1] - a[1]);
                let bx = (((px - lo[0]) / size).floor() as usize).min(nx - 1);
                let by = (((py - lo[1]) / size).floor() as usize).min(ny - 1);
                for (qx, qy) in neighbours(bx, by, nx, ny) {
                    let b = qy * nx + qx;
                    if b != last && buckets[b].last() != Some(&(s as u32)) {
                        buckets[b].push(s as u32);
                    }
                }
                last = by * nx + bx;
            }
            let _ = (l, h);
        }
        Grid {
            origin: lo,
            size,
            nx,
            ny,
            buckets,
        }
    }
}

/// The bucket and its 8 neighbours, so that sampled walks cannot skip a
/// bucket the segment clips at a corner.
fn neighbours(bx: usize, by: usize, nx: usize, ny: usize) -> impl Iterator<Item = (usize, usize)> {
    let xs = bx.saturating_sub(1)..=(bx + 1).min(nx - 1);
    xs.flat_map(move |x| (by.saturating_sub(1)..=(by + 1).min(ny - 1)).map(move |y| (x, y)))
}

/// Monte Carlo cell volume with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub volume: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Fraction of uniform samples of the world's bounding box that lie in `X`
/// and satisfy the exact dominance predicate, times the box volume.
pub fn cell_volume(config: &Configuration, k: usize, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    check_site(config, k)?;
    let (lo, hi) = config.world.bounding_box().ok_or(Error::UnboundedWorld)?;
    let box_volume = config.world.bounding_volume()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; lo.len()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for i in 0..x.len() {
            x[i] = lo[i] + (hi[i] - lo[i]) * rng.random::<f64>();
        }
        if config.world.contains_unchecked(&config.space, &x)
            && config.sites[k].distance_to(&config.space, &x) <= config.distance_to_others(k, &x)
        {
            hits += 1;
        }
    }
    let n = samples.max(1) as f64;
    let frac = hits as f64 / n;
    Ok(VolumeEstimate {
        volume: box_volume * frac,
        stderr: box_volume * (frac * (1.0 - frac) / n).sqrt(),
        samples,
    })
}

/// Grid points of the world's bounding box (spacing `h`, aligned to the
/// lower corner) that lie in the cell of site `k` by the exact predicate.
pub fn raster_cell(config: &Configuration, k: usize, h: f64) -> Result<Vec<Point>> {
    check_site(config, k)?;
    let (lo, hi) = config.world.bounding_box().ok_or(Error::UnboundedWorld)?;
    let counts: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| ((b - a) / h).round() as usize).collect();
    let total: usize = counts.iter().map(|c| c + 1).product();
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let x: Point = (0..lo.len())
            .map(|i| {
                let j = rem % (counts[i] + 1);
                rem /= counts[i] + 1;
                if j == counts[i] {
                    hi[i]
                } else {
                    lo[i] + h * j as f64
                }
            })
            .collect();
        if config.world.contains_unchecked(&config.space, &x)
            && config.sites[k].distance_to(&config.space, &x) <= config.distance_to_others(k, &x)
        {
            out.push(x);
        }
    }
    Ok(out)
}
