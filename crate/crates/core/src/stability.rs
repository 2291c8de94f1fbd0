//! Stability certificates, the perturbation experiment, and the
//! counterexample suite.
//!
//! In a uniformly convex space with `η > 0` and a finite `ρ`, every
//! `ε ∈ (0, η/6)` admits an explicit `Δ` such that moving each site by less
//! than `Δ` (Hausdorff) moves each cell by less than `ε`:
//!
//! ```text
//! general:   C = δ(η/(12ρ+5η)) / (16(ρ + 5η/12)),          Δ = min(Cε², ε/2)
//! interior:  C = min(δ(η/(12ρ+5η))/16, g/(8(ρ + η/6))),   Δ = Cε
//! ```
//!
//! where `g` is the distance from the sites to `∂X`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cells::{self, build_cell, build_cell_like, paired_fan_bound, raster_cell, CellApprox, CellOptions, RayLength};
use crate::error::{Error, Result};
use crate::sites::{eta, hausdorff, rho_estimate, Configuration, Site};
use crate::space::NormedSpace;
use crate::vector::{self, Point};
use crate::world::World;

/// Grid size used for ρ when the configuration carries no override.
pub const RHO_SAMPLES: usize = 40_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    General,
    Interior { boundary_gap: f64 },
}

/// The stability constants for one configuration and `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityCertificate {
    pub epsilon: f64,
    /// Lower bound on η actually used.
    pub eta: f64,
    pub rho: f64,
    /// How far `rho` may exceed the true ρ (0 for a trusted override).
    pub rho_margin: f64,
    /// `δ(η/(12ρ+5η))`
    pub delta_value: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// Strict-dominance margin `ε δ(η/(12ρ+5η)) / 2`.
    pub lambda: f64,
    pub regime: Regime,
}

impl StabilityCertificate {
    /// General-regime constants from raw `η`, `ρ`.
    pub fn general(space: &NormedSpace, eta: f64, rho: f64, epsilon: f64) -> Result<Self> {
        let delta_value = check_inputs(space, eta, rho, epsilon)?;
        let c = delta_value / (16.0 * (rho + 5.0 * eta / 12.0));
        Ok(Self {
            epsilon,
            eta,
            rho,
            rho_margin: 0.0,
            delta_value,
            c,
            delta: (c * epsilon * epsilon).min(0.5 * epsilon),
            lambda: 0.5 * epsilon * delta_value,
            regime: Regime::General,
        })
    }

    /// Interior-regime constants; `boundary_gap` is `d(⋃P_k, ∂X)`.
    pub fn interior(space: &NormedSpace, eta: f64, rho: f64, boundary_gap: f64, epsilon: f64) -> Result<Self> {
        let delta_value = check_inputs(space, eta, rho, epsilon)?;
        if boundary_gap <= 0.0 {
            return Err(Error::SitesTouchBoundary);
        }
        if epsilon > 8.0 * boundary_gap {
            return Err(Error::EpsilonExceedsBoundaryBound {
                epsilon,
                limit: 8.0 * boundary_gap,
            });
        }
        let c = (delta_value / 16.0).min(boundary_gap / (8.0 * (rho + eta / 6.0)));
        Ok(Self {
            epsilon,
            eta,
            rho,
            rho_margin: 0.0,
            delta_value,
            c,
            delta: c * epsilon,
            lambda: 0.5 * epsilon * delta_value,
            regime: Regime::Interior { boundary_gap },
        })
    }
}

fn check_inputs(space: &NormedSpace, eta: f64, rho: f64, epsilon: f64) -> Result<f64> {
    if !space.is_uniformly_convex() {
        return Err(Error::NotUniformlyConvex);
    }
    if !(eta > 0.0) {
        return Err(Error::EtaZero);
    }
    if !(epsilon > 0.0) {
        return Err(Error::DomainError(format!("epsilon must be positive, got {epsilon}")));
    }
    if epsilon >= eta / 6.0 {
        return Err(Error::EpsilonTooLarge {
            epsilon,
            limit: eta / 6.0,
        });
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::DomainError(format!("rho must be positive and finite, got {rho}")));
    }
    space.modulus_of_convexity(eta / (12.0 * rho + 5.0 * eta))
}

/// `(η lower bound, ρ upper bound, ρ margin)` for a configuration.
fn eta_rho(config: &Configuration) -> Result<(f64, f64, f64)> {
    if !config.space.is_uniformly_convex() {
        return Err(Error::NotUniformlyConvex);
    }
    let e = eta(config);
    let eta = e.value - e.error;
    if !(eta > 0.0) {
        return Err(Error::EtaZero);
    }
    match config.rho_override {
        Some(rho) => Ok((eta, rho, 0.0)),
        None => {
            let r = rho_estimate(config, RHO_SAMPLES)?;
            Ok((eta, r.rho, r.margin))
        }
    }
}

/// General-regime certificate for `config`.
pub fn certify(config: &Configuration, epsilon: f64) -> Result<StabilityCertificate> {
    let (eta, rho, margin) = eta_rho(config)?;
    let mut cert = StabilityCertificate::general(&config.space, eta, rho, epsilon)?;
    cert.rho_margin = margin;
    Ok(cert)
}

/// Interior-regime certificate: `Δ` linear in `ε` when the sites stay away
/// from `∂X`.
pub fn certify_interior(config: &Configuration, epsilon: f64) -> Result<StabilityCertificate> {
    let (eta, rho, margin) = eta_rho(config)?;
    let gap = config.boundary_gap()?;
    let mut cert = StabilityCertificate::interior(&config.space, eta, rho, gap, epsilon)?;
    cert.rho_margin = margin;
    Ok(cert)
}

/// Outcome of [`strict_segment_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentBound {
    pub r: f64,
    /// `d(x, p) < d(x, A) - r`
    pub holds: bool,
    pub d_xp: f64,
    pub d_xa: f64,
}

/// For `x ∈ [p, y)` with `y` dominated by `p` against `A`, the margin
/// `r = min(σ, 0.4 d(p,A), d(y,x) δ(d(p,A) / (10(d(x,A) + σ + d(y,x)))))`
/// and whether `x` is strictly dominated by that margin.
pub fn strict_segment_bound(
    space: &NormedSpace,
    a: &Site,
    p: &[f64],
    y: &[f64],
    x: &[f64],
    sigma: f64,
) -> Result<SegmentBound> {
    if !space.is_uniformly_convex() {
        return Err(Error::NotUniformlyConvex);
    }
    for v in [p, y, x] {
        space.check_dim(v)?;
    }
    let pre = |msg: &str| Err(Error::PreconditionViolated(msg.into()));
    if !(sigma > 0.0) {
        return pre("sigma must be positive");
    }
    let d_pa = a.distance_to(space, p);
    if !(d_pa > 0.0) {
        return pre("d(p, A) must be positive");
    }
    let d_yp = space.dist(y, p);
    let d_ya = a.distance_to(space, y);
    if d_yp > d_ya * (1.0 + 1e-12) + 1e-15 {
        return pre("y is not dominated by p: d(y, p) > d(y, A)");
    }
    if !on_half_open_segment(p, y, x) {
        return pre("x does not lie on [p, y)");
    }
    let d_yx = space.dist(y, x);
    let d_xa = a.distance_to(space, x);
    let d_xp = space.dist(x, p);
    let arg = (d_pa / (10.0 * (d_xa + sigma + d_yx))).min(2.0);
    let r = sigma.min(0.4 * d_pa).min(d_yx * space.modulus_of_convexity(arg)?);
    Ok(SegmentBound {
        r,
        holds: d_xp < d_xa - r,
        d_xp,
        d_xa,
    })
}

fn on_half_open_segment(p: &[f64], y: &[f64], x: &[f64]) -> bool {
    let dir = vector::sub(y, p);
    let len2 = vector::dot(&dir, &dir);
    if len2 == 0.0 {
        return false;
    }
    let rel = vector::sub(x, p);
    let s = vector::dot(&rel, &dir) / len2;
    let off = vector::euclidean(&vector::sub(&rel, &vector::scale(&dir, s)));
    let scale = len2.sqrt();
    (0.0..1.0).contains(&s) && off <= 1e-9 * scale && x != y
}

/// Settings for [`run_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentOptions {
    pub trials: usize,
    pub seed: u64,
    /// Perturbation size as a fraction of `Δ` (0 gives the identity).
    pub scale: f64,
    pub cell: CellOptions,
    /// Cap on refined rays per fan while forcing resolution below `ε/10`.
    pub max_rays_per_fan: usize,
    /// Use the interior-regime certificate.
    pub interior: bool,
}

impl ExperimentOptions {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            scale: 1.0,
            cell: CellOptions::for_dim(dim),
            max_rays_per_fan: 1 << 15,
            interior: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Constructive bound on `D(P_k, P'_k)` per site.
    pub site_shift: Vec<f64>,
    /// Sampled lower estimate of `D(P_k, P'_k)`, as a cross-check.
    pub site_shift_sampled: Vec<f64>,
    /// Upper bound on `D(fan_k, fan'_k)` per cell.
    pub cell_shift: Vec<f64>,
    /// `resolution(R_k) + resolution(R'_k)` per cell.
    pub resolution: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub certificate: StabilityCertificate,
    pub seed: u64,
    /// Resolution of each unperturbed cell.
    pub base_resolution: Vec<f64>,
    pub rays_per_cell: Vec<usize>,
    pub trials: Vec<TrialRecord>,
    pub pass: bool,
}

/// Perturbs every site by less than `Δ` and checks that every rebuilt cell
/// moves by less than `ε` plus the measurement resolution.
///
/// Perturbed cells reuse the direction sets of the unperturbed ones, so
/// paired segments give an upper bound on the fan-to-fan distance.
pub fn run_experiment(config: &Configuration, epsilon: f64, opts: &ExperimentOptions) -> Result<ExperimentReport> {
    let cert = if opts.interior {
        certify_interior(config, epsilon)?
    } else {
        certify(config, epsilon)?
    };
    let target = epsilon / 10.0;
    let mut cell_opts = opts.cell;
    // fixed anchor counts keep fans of continuous sites in correspondence
    cell_opts.anchors = Some(cell_opts.anchors.unwrap_or(64));
    let base: Vec<CellApprox> = (0..config.len())
        .map(|k| refined_cell(config, k, &cell_opts, target, opts.max_rays_per_fan))
        .collect::<Result<_>>()?;
    let radius = cert.delta * (1.0 - 1e-6) * opts.scale;
    let mut trials = Vec::with_capacity(opts.trials);
    for trial in 0..opts.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(trial as u64);
        let (moved, site_shift) = perturb_config(config, radius, &mut rng)?;
        let site_shift_sampled: Vec<f64> = config
            .sites
            .iter()
            .zip(&moved.sites)
            .map(|(a, b)| hausdorff(&config.space, a, b, 64).value)
            .collect();
        if site_shift.iter().chain(&site_shift_sampled).any(|&d| d >= cert.delta) {
            return Err(Error::PreconditionViolated("perturbation exceeded Delta".into()));
        }
        let mut cell_shift = Vec::with_capacity(config.len());
        let mut resolution = Vec::with_capacity(config.len());
        for (k, b) in base.iter().enumerate() {
            let c = build_cell_like(&moved, k, b, &cell_opts)?;
            let shift = paired_fan_bound(b, &c).ok_or(Error::ResolutionMismatch)?;
            cell_shift.push(shift);
            resolution.push(b.resolution + c.resolution);
        }
        let pass = cell_shift
            .iter()
            .zip(&resolution)
            .all(|(d, r)| *d < epsilon + r);
        trials.push(TrialRecord {
            trial,
            site_shift,
            site_shift_sampled,
            cell_shift,
            resolution,
            pass,
        });
    }
    Ok(ExperimentReport {
        certificate: cert,
        seed: opts.seed,
        base_resolution: base.iter().map(|c| c.resolution).collect(),
        rays_per_cell: base.iter().map(CellApprox::ray_count).collect(),
        pass: trials.iter().all(|t| t.pass),
        trials,
    })
}

fn refined_cell(config: &Configuration, k: usize, opts: &CellOptions, target: f64, cap: usize) -> Result<CellApprox> {
    let mut cell = build_cell(config, k, opts)?;
    if config.space.dim == 2 {
        // leave room for the bisection tolerance and anchor spacing
        let budget = target - cell.anchor_dispersion - cell.tol;
        if budget > 0.0 && cell.resolution >= target {
            cell.refine(config, 0.99 * budget, cap)?;
        }
    }
    Ok(cell)
}

/// A random vector of scene norm at most `radius`.
fn jitter(space: &NormedSpace, rng: &mut impl Rng, radius: f64) -> Point {
    loop {
        let v: Point = (0..space.dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let n = space.norm.eval(&v);
        if n > 1e-9 {
            let len = radius * rng.random::<f64>();
            return v.iter().map(|x| x * len / n).collect();
        }
    }
}

/// Moves one site by Hausdorff distance at most `radius`; returns the new
/// site and a constructive bound on the distance moved.
fn perturb_site(space: &NormedSpace, site: &Site, radius: f64, rng: &mut impl Rng) -> (Site, f64) {
    let mv = |p: &Point, rng: &mut _| {
        let d = jitter(space, rng, radius);
        (vector::add(p, &d), space.norm.eval(&d))
    };
    match site {
        Site::Points { coords } => {
            let mut bound: f64 = 0.0;
            let coords = coords
                .iter()
                .map(|p| {
                    let (q, d) = mv(p, rng);
                    bound = bound.max(d);
                    q
                })
                .collect();
            (Site::Points { coords }, bound)
        }
        // a point (1-s)a + s b moves by at most max(|da|, |db|)
        Site::Segment { a, b } => {
            let (a2, da) = mv(a, rng);
            let (b2, db) = mv(b, rng);
            (Site::Segment { a: a2, b: b2 }, da.max(db))
        }
        Site::Disc { center, radius: r } => {
            let split = rng.random::<f64>();
            let d = jitter(space, rng, radius * split);
            let dc = space.norm.eval(&d);
            let dr = (radius * (1.0 - split)) * rng.random_range(-1.0..=1.0);
            let r2 = (r + dr).max(0.0);
            (
                Site::Disc {
                    center: vector::add(center, &d),
                    radius: r2,
                },
                dc + (r2 - r).abs(),
            )
        }
        // translation moves every point by exactly |d|
        Site::Box { min, max } => {
            let d = jitter(space, rng, radius);
            (
                Site::Box {
                    min: vector::add(min, &d),
                    max: vector::add(max, &d),
                },
                space.norm.eval(&d),
            )
        }
        Site::Union { members } => {
            let mut bound: f64 = 0.0;
            let members = members
                .iter()
                .map(|m| {
                    let (s, d) = perturb_site(space, m, radius, rng);
                    bound = bound.max(d);
                    s
                })
                .collect();
            (Site::Union { members }, bound)
        }
    }
}

/// Perturbs every site, redrawing until all stay inside the world.
pub fn perturb_config(config: &Configuration, radius: f64, rng: &mut impl Rng) -> Result<(Configuration, Vec<f64>)> {
    let mut sites = Vec::with_capacity(config.len());
    let mut shifts = Vec::with_capacity(config.len());
    for site in &config.sites {
        let mut attempt = 0;
        let (moved, shift) = loop {
            let (s, d) = perturb_site(&config.space, site, radius, rng);
            if s.within(&config.world, &config.space) {
                break (s, d);
            }
            attempt += 1;
            if attempt > 1000 {
                // keep the site; a zero move is a valid perturbation
                break (site.clone(), 0.0);
            }
        };
        sites.push(moved);
        shifts.push(shift);
    }
    let mut moved = Configuration::new(config.space, config.world.clone(), sites)?;
    moved.rho_override = config.rho_override;
    Ok((moved, shifts))
}

/// A finite or infinite nonnegative quantity; infinity serializes as the
/// string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    Finite(f64),
    Infinite,
}

impl Magnitude {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Magnitude::Infinite)
    }

    pub fn value(&self) -> f64 {
        match self {
            Magnitude::Finite(v) => *v,
            Magnitude::Infinite => f64::INFINITY,
        }
    }
}

impl From<RayLength> for Magnitude {
    fn from(r: RayLength) -> Self {
        match r {
            RayLength::Finite(v) => Magnitude::Finite(v),
            RayLength::Unbounded { .. } => Magnitude::Infinite,
        }
    }
}

impl Serialize for Magnitude {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Magnitude::Finite(v) => s.serialize_f64(*v),
            Magnitude::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub label: String,
    pub value: Magnitude,
}

fn measure(label: impl Into<String>, value: Magnitude) -> Measurement {
    Measurement {
        label: label.into(),
        value,
    }
}

/// Report of one scripted instability scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub name: String,
    pub claim: String,
    pub measurements: Vec<Measurement>,
    /// Whether the instability was reproduced.
    pub reproduced: bool,
}

pub const COUNTEREXAMPLES: [&str; 4] = ["linf_square", "eta_zero", "eta_zero_rectangle", "rho_unbounded"];

/// Runs a named instability scenario.
pub fn counterexample(name: &str) -> Result<CounterexampleReport> {
    match name {
        "linf_square" => linf_square(0.05),
        "eta_zero" => eta_zero(0.01),
        "eta_zero_rectangle" => eta_zero_rectangle(0.5, 0.01),
        "rho_unbounded" => rho_unbounded(0.1),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

/// Four sites in the ℓ∞ square `[-10, 10]²`: `(0,0)`, `(2,0)`, `(-2,0)`,
/// `(0,-2)`.
pub fn fig5() -> Configuration {
    Configuration::new(
        NormedSpace::linf(2),
        World::square(10.0),
        vec![
            Site::point(vec![0.0, 0.0]),
            Site::point(vec![2.0, 0.0]),
            Site::point(vec![-2.0, 0.0]),
            Site::point(vec![0.0, -2.0]),
        ],
    )
    .expect("fixed scene")
}

/// `fig5` with the first site moved to `(β, β)`.
pub fn fig6_shifted(beta: f64) -> Configuration {
    let mut c = fig5();
    c.sites[0] = Site::point(vec![beta, beta]);
    c
}

/// `fig5` with the last site grown into the square
/// `[-β, β] × [-2-β, -2+β]` (an ℓ∞ disc).
pub fn fig6_square(beta: f64) -> Configuration {
    let mut c = fig5();
    c.sites[3] = Site::disc(vec![0.0, -2.0], beta);
    c
}

/// Raster Hausdorff distance between two finite point sets.
pub fn raster_hausdorff(space: &NormedSpace, a: &[Point], b: &[Point]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    directed(space, a, b).max(directed(space, b, a))
}

fn directed(space: &NormedSpace, from: &[Point], to: &[Point]) -> f64 {
    let nearest = |x: &Point| to.iter().map(|y| space.dist(x, y)).fold(f64::INFINITY, f64::min);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        from.par_iter().map(nearest).reduce(|| 0.0, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        from.iter().map(nearest).fold(0.0, f64::max)
    }
}

/// Grid spacing for raster oracles; a power of two keeps grid points exact.
const RASTER_STEP: f64 = 0.25;

fn linf_square(beta: f64) -> Result<CounterexampleReport> {
    let before = raster_cell(&fig5(), 0, RASTER_STEP)?;
    let mut measurements = Vec::new();
    let mut reproduced = true;
    for b in [0.2, 0.1, beta, beta / 2.0] {
        let moved = fig6_shifted(b);
        let after = raster_cell(&moved, 0, RASTER_STEP)?;
        let d = raster_hausdorff(&moved.space, &before, &after);
        let site_shift = moved.space.dist(&[0.0, 0.0], &[b, b]);
        measurements.push(measure(format!("site_shift(beta={b})"), Magnitude::Finite(site_shift)));
        measurements.push(measure(format!("cell_shift(beta={b})"), Magnitude::Finite(d)));
        reproduced &= d >= 1.0;
    }
    Ok(CounterexampleReport {
        name: "linf_square".into(),
        claim: "moving P1=(0,0) to (beta,beta) removes the two lower rays of its cell; \
                the cell shift stays above 1 as beta shrinks"
            .into(),
        measurements,
        reproduced,
    })
}

fn two_points(beta: f64) -> Configuration {
    Configuration::new(
        NormedSpace::euclidean(2),
        World::square(10.0),
        vec![Site::point(vec![0.0, beta]), Site::point(vec![0.0, -beta])],
    )
    .expect("fixed scene")
}

fn eta_zero(beta: f64) -> Result<CounterexampleReport> {
    let apart = two_points(beta);
    let merged = two_points(0.0);
    let a = raster_cell(&apart, 0, RASTER_STEP)?;
    let b = raster_cell(&merged, 0, RASTER_STEP)?;
    let d = raster_hausdorff(&apart.space, &a, &b);
    Ok(CounterexampleReport {
        name: "eta_zero".into(),
        claim: "the cell of (0,beta) against (0,-beta) is the upper half of X for beta>0 \
                and all of X for beta=0"
            .into(),
        measurements: vec![
            measure("site_shift", Magnitude::Finite(beta)),
            measure("cell_shift", Magnitude::Finite(d)),
        ],
        reproduced: (d - 10.0).abs() <= 0.05,
    })
}

/// The rectangle `[-a,a] × [-10,-β]` against the segment `[-10,10] × {0}`.
pub fn rectangle_config(a: f64, beta: f64) -> Configuration {
    Configuration::new(
        NormedSpace::euclidean(2),
        World::square(10.0),
        vec![
            Site::Box {
                min: vec![-a, -10.0],
                max: vec![a, -beta],
            },
            Site::segment(vec![-10.0, 0.0], vec![10.0, 0.0]),
        ],
    )
    .expect("fixed scene")
}

/// Fraction of grid points of `[-a,a] × [0,10]` inside the rectangle's cell.
pub fn rectangle_containment(a: f64, beta: f64) -> f64 {
    let config = rectangle_config(a, beta);
    let (nx, ny) = (20usize, 100usize);
    let mut inside = 0;
    for i in 0..=nx {
        for j in 0..=ny {
            let x = [-a + 2.0 * a * i as f64 / nx as f64, 10.0 * j as f64 / ny as f64];
            let gap = config.sites[0].distance_to(&config.space, &x) - config.distance_to_others(0, &x);
            if gap <= 0.0 {
                inside += 1;
            }
        }
    }
    inside as f64 / ((nx + 1) * (ny + 1)) as f64
}

fn eta_zero_rectangle(a: f64, beta: f64) -> Result<CounterexampleReport> {
    let touching = rectangle_containment(a, 0.0);
    let apart = rectangle_containment(a, beta);
    Ok(CounterexampleReport {
        name: "eta_zero_rectangle".into(),
        claim: "the cell of [-a,a]x[-10,-beta] contains [-a,a]x[0,10] only when beta=0".into(),
        measurements: vec![
            measure("contained_fraction(beta=0)", Magnitude::Finite(touching)),
            measure(format!("contained_fraction(beta={beta})"), Magnitude::Finite(apart)),
        ],
        reproduced: touching == 1.0 && apart < 1.0,
    })
}

fn rho_unbounded(beta: f64) -> Result<CounterexampleReport> {
    let config = |b: f64| {
        Configuration::new(
            NormedSpace::euclidean(2),
            World::unbounded(2),
            vec![Site::point(vec![b, 1.0]), Site::point(vec![0.0, -1.0])],
        )
        .expect("fixed scene")
    };
    let moved = config(beta);
    // this direction is parallel to the tilted bisector, so its ray stays in
    // the cell forever while sinking below the β = 0 cell {y >= 0}
    let theta = moved.space.normalize(&[2.0, -beta])?;
    let anchor = [beta, 1.0];
    // beyond ~1e7 the tie t = sqrt(t² + 4 + β²) is lost to rounding
    let cap = 1e6;
    let ray = cells::t_unbounded(&moved, 0, &anchor, &theta, 1e-9, cap);
    let gaps: Vec<f64> = [1e2, 1e4, 1e6]
        .iter()
        .map(|&t| (-(anchor[1] + t * theta[1])).max(0.0))
        .collect();
    let growing = gaps.windows(2).all(|w| w[1] > 100.0 * w[0]);
    let d = if ray.is_unbounded() && growing {
        Magnitude::Infinite
    } else {
        Magnitude::Finite(gaps[2])
    };
    Ok(CounterexampleReport {
        name: "rho_unbounded".into(),
        claim: "in the unbounded plane, moving (0,1) to (beta,1) tilts the bisector and \
                the cells drift apart without bound"
            .into(),
        measurements: vec![
            measure("site_shift", Magnitude::Finite(beta)),
            measure("ray_length", ray.into()),
            measure("cell_shift", d),
        ],
        reproduced: d.is_infinite(),
    })
}
