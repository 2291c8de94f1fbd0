//! Chord lengths `L(θ)`, the emanation property, and continuity of `T(·, p)`.
//!
//! `p` has the emanation property in direction `θ` when nearby directions
//! do not produce much shorter chords: for some `β > 0`, every `φ ∈ Θ_p`
//! with `|φ - θ| < β` satisfies `L(φ) >= L(θ) - ε`. Together with upper
//! semicontinuity of `T` it makes `T(·, p)` continuous at `θ`, with modulus
//!
//! ```text
//! Δ = min(β1, β2, λ/(4ρ)),   λ = ε δ(η_p / (10(ρ + η_p/4))) / 2.
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cells;
use crate::error::{Error, Result};
use crate::sites::{rho_estimate, Configuration, Site};
use crate::space::NormedSpace;
use crate::stability::{Magnitude, RHO_SAMPLES};
use crate::vector::{self, Point};
use crate::world::World;

/// `L(θ)`: length of the chord of `X` from `p` in direction `θ`.
pub fn chord_length(world: &World, space: &NormedSpace, p: &[f64], theta: &[f64]) -> Result<f64> {
    world.ray_exit(space, p, theta)
}

/// `θ ∈ Θ_p`: the ray from `p` meets `X` in more than `p`.
pub fn in_theta_p(world: &World, space: &NormedSpace, p: &[f64], theta: &[f64]) -> Result<bool> {
    Ok(chord_length(world, space, p, theta)? > 0.0)
}

/// Settings for the shrinking-radius direction scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Random directions per radius.
    pub samples: usize,
    pub seed: u64,
    /// First radius tried.
    pub beta_max: f64,
    /// The scan gives up below this radius.
    pub beta_floor: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            samples: 256,
            seed: 0,
            beta_max: 1.0,
            beta_floor: 1e-9,
        }
    }
}

/// Outcome of a direction scan. `beta` is empirical: the largest sampled
/// radius at which no sampled direction violated the condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub holds: bool,
    pub beta: f64,
    /// Reference value at `θ` (`L(θ)` or `T(θ)`).
    pub reference: f64,
    /// The worst violating direction seen at the smallest failing radius.
    pub witness: Option<Witness>,
    pub empirical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub phi: Point,
    pub value: f64,
}

/// Directions `φ` with `|φ - θ| < β`: random perturbations plus moves
/// along each coordinate axis, which reach faces a random draw misses in
/// high dimension.
fn nearby_directions(space: &NormedSpace, theta: &[f64], beta: f64, samples: usize, rng: &mut impl Rng) -> Vec<Point> {
    let mut out = Vec::with_capacity(samples + 8 * space.dim);
    let mut push = |v: Point| {
        if let Ok(phi) = space.normalize(&v) {
            if space.dist(&phi, theta) < beta {
                out.push(phi);
            }
        }
    };
    for i in 0..space.dim {
        for frac in [1.0, 0.5, 0.25, 0.125] {
            for sign in [1.0, -1.0] {
                let mut v = theta.to_vec();
                v[i] += sign * frac * 0.5 * beta;
                push(v);
            }
        }
    }
    let mut attempts = 0;
    let mut drawn = 0;
    while drawn < samples && attempts < 20 * samples {
        attempts += 1;
        let u: Point = (0..space.dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let n = space.norm.eval(&u);
        if n == 0.0 {
            continue;
        }
        let r = beta * rng.random::<f64>() / n;
        push(vector::along(theta, &u, 0.5 * r));
        drawn += 1;
    }
    out
}

/// Halving-radius scan: the largest `β` at which `accept(φ)` held for every
/// sampled `φ`.
fn scan(
    space: &NormedSpace,
    theta: &[f64],
    opts: &ScanOptions,
    reference: f64,
    mut value: impl FnMut(&[f64]) -> Option<f64>,
    accept: impl Fn(f64) -> bool,
) -> ScanResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut beta = opts.beta_max;
    let mut witness = None;
    while beta >= opts.beta_floor {
        let mut worst: Option<Witness> = None;
        for phi in nearby_directions(space, theta, beta, opts.samples, &mut rng) {
            // directions leaving X at once are outside Θ_p
            let Some(v) = value(&phi) else { continue };
            if !accept(v) && worst.as_ref().is_none_or(|w| v < w.value) {
                worst = Some(Witness { phi, value: v });
            }
        }
        match worst {
            None => {
                return ScanResult {
                    holds: true,
                    beta,
                    reference,
                    witness,
                    empirical: true,
                }
            }
            Some(w) => witness = Some(w),
        }
        beta *= 0.5;
    }
    ScanResult {
        holds: false,
        beta: 0.0,
        reference,
        witness,
        empirical: true,
    }
}

/// Empirical emanation check at `(p, θ, ε)`.
pub fn emanation_check(
    world: &World,
    space: &NormedSpace,
    p: &[f64],
    theta: &[f64],
    epsilon: f64,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    let l = chord_length(world, space, p, theta)?;
    if !(l > 0.0) {
        return Err(Error::DirectionNotInThetaP);
    }
    let chord = |phi: &[f64]| {
        let v = world.ray_exit_unchecked(space, p, phi);
        (v > 0.0).then_some(v)
    };
    Ok(scan(space, theta, opts, l, chord, |v| v >= l - epsilon))
}

/// Upper-semicontinuity scan of `T(·, p)`: the largest sampled `β` with
/// `T(φ) <= T(θ) + ε` for every sampled `φ`.
pub fn usc_scan(config: &Configuration, k: usize, p: &[f64], theta: &[f64], epsilon: f64, opts: &ScanOptions) -> Result<ScanResult> {
    let topts = t_options(config)?;
    let t0 = cells::compute_t(config, k, p, theta, &topts)?;
    let t_at = |phi: &[f64]| {
        let exit = config.world.ray_exit_unchecked(&config.space, p, phi);
        let upper = topts.rho.map_or(exit, |r| exit.min(r));
        Some(cells::t_on_interval(config, k, p, phi, upper, topts.tol, topts.max_steps))
    };
    Ok(scan(&config.space, theta, opts, t0, t_at, |v| v <= t0 + epsilon))
}

fn t_options(config: &Configuration) -> Result<cells::TOptions> {
    let mut topts = cells::TOptions::for_config(config)?;
    if topts.rho.is_none() {
        topts.rho = Some(rho_estimate(config, RHO_SAMPLES)?.rho);
    }
    Ok(topts)
}

/// Continuity modulus of `T(·, p)` at a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TContinuity {
    pub epsilon: f64,
    /// `d(p, A_k)`
    pub eta_p: f64,
    pub rho: f64,
    pub lambda: f64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
}

impl TContinuity {
    pub fn new(space: &NormedSpace, eta_p: f64, rho: f64, epsilon: f64, beta1: f64, beta2: f64) -> Result<Self> {
        if !space.is_uniformly_convex() {
            return Err(Error::NotUniformlyConvex);
        }
        if !(eta_p > 0.0) {
            return Err(Error::AnchorOnOtherSite);
        }
        if !(epsilon > 0.0) {
            return Err(Error::DomainError(format!("epsilon must be positive, got {epsilon}")));
        }
        if epsilon >= eta_p / 6.0 {
            return Err(Error::EpsilonTooLarge {
                epsilon,
                limit: eta_p / 6.0,
            });
        }
        let lambda = 0.5 * epsilon * space.modulus_of_convexity(eta_p / (10.0 * (rho + eta_p / 4.0)))?;
        Ok(Self {
            epsilon,
            eta_p,
            rho,
            lambda,
            beta1,
            beta2,
            delta: beta1.min(beta2).min(lambda / (4.0 * rho)).max(0.0),
        })
    }
}

/// `Δ = min(β1, β2, λ/(4ρ))` for anchor `p` of site `k`.
pub fn t_continuity_delta(config: &Configuration, k: usize, p: &[f64], epsilon: f64, beta1: f64, beta2: f64) -> Result<TContinuity> {
    if !config.space.is_uniformly_convex() {
        return Err(Error::NotUniformlyConvex);
    }
    let eta_p = config.distance_to_others(k, p);
    let rho = match config.rho_override {
        Some(r) => r,
        None => rho_estimate(config, RHO_SAMPLES)?.rho,
    };
    TContinuity::new(&config.space, eta_p, rho, epsilon, beta1, beta2)
}

/// Estimates `β1` (upper semicontinuity of `T`) and `β2` (emanation) by
/// scans, then evaluates `Δ`.
pub fn estimate_t_continuity(config: &Configuration, k: usize, p: &[f64], theta: &[f64], epsilon: f64, opts: &ScanOptions) -> Result<TContinuity> {
    let b1 = usc_scan(config, k, p, theta, epsilon, opts)?;
    let b2 = emanation_check(&config.world, &config.space, p, theta, epsilon, opts)?;
    t_continuity_delta(config, k, p, epsilon, b1.beta, b2.beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuityCheck {
    pub samples: usize,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Samples `φ` with `|φ - θ| < Δ` and checks `|T(θ) - T(φ)| <= ε`.
pub fn verify_t_continuity(
    config: &Configuration,
    k: usize,
    p: &[f64],
    theta: &[f64],
    epsilon: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<ContinuityCheck> {
    let topts = t_options(config)?;
    let t0 = cells::compute_t(config, k, p, theta, &topts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = &config.space;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < samples {
        let u: Point = (0..space.dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let Ok(phi) = space.normalize(&vector::along(theta, &u, delta * rng.random::<f64>())) else {
            continue;
        };
        if space.dist(&phi, theta) >= delta {
            continue;
        }
        let t = cells::compute_t(config, k, p, &phi, &topts)?;
        worst = worst.max((t - t0).abs());
        count += 1;
    }
    Ok(ContinuityCheck {
        samples,
        max_deviation: worst,
        pass: worst <= epsilon,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TSample {
    pub label: String,
    pub theta: Point,
    #[serde(rename = "T")]
    pub t: Magnitude,
}

/// Report of a named discontinuity of `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessReport {
    pub name: String,
    pub claim: String,
    pub samples: Vec<TSample>,
    /// Extra named values (chord lengths, scan results).
    pub values: Vec<(String, f64)>,
    pub reproduced: bool,
}

pub const WITNESSES: [&str; 4] = ["linf_corners", "non_emanation", "zero_site_distance", "unbounded"];

/// Runs a named discontinuity scenario.
pub fn t_discontinuity_witness(name: &str) -> Result<WitnessReport> {
    match name {
        "linf_corners" => linf_corners(),
        "non_emanation" => non_emanation(20),
        "zero_site_distance" => zero_site_distance(100),
        "unbounded" => unbounded(10),
        other => Err(Error::UnknownScenario(other.to_string())),
    }
}

fn sample(config: &Configuration, k: usize, p: &[f64], theta: Point, label: impl Into<String>, tol: f64) -> TSample {
    let t = cells::t_unbounded(config, k, p, &theta, tol, 1e6);
    TSample {
        label: label.into(),
        theta,
        t: t.into(),
    }
}

fn linf_corners() -> Result<WitnessReport> {
    let space = NormedSpace::linf(2);
    let config = Configuration::new(
        space,
        World::square(10.0),
        vec![
            Site::point(vec![0.0, 0.0]),
            Site::points(vec![vec![0.0, -2.0], vec![2.0, 0.0], vec![-2.0, 0.0]]),
        ],
    )?;
    let p = [0.0, 0.0];
    let h = 1e-3;
    let mut samples = Vec::new();
    let mut reproduced = true;
    for (sx, sy) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
        let corner = vec![sx, sy];
        let near_a = vec![sx, sy * (1.0 - h)];
        let near_b = vec![sx * (1.0 - h), sy];
        let at = sample(&config, 0, &p, corner, format!("theta=({sx},{sy})"), 1e-12);
        let a = sample(&config, 0, &p, near_a, format!("phi=({sx},{}) ", sy * (1.0 - h)), 1e-12);
        let b = sample(&config, 0, &p, near_b, format!("phi=({},{sy})", sx * (1.0 - h)), 1e-12);
        let jump = (at.t.value() - a.t.value()).abs().max((at.t.value() - b.t.value()).abs());
        reproduced &= jump > 0.5;
        samples.extend([at, a, b]);
    }
    Ok(WitnessReport {
        name: "linf_corners".into(),
        claim: "with p=(0,0) and A={(0,-2),(2,0),(-2,0)} in l_inf, T(.,p) jumps at the four \
                corner directions (+-1,+-1)"
            .into(),
        samples,
        values: vec![("direction_offset".into(), h)],
        reproduced,
    })
}

/// Vertices `-e1`, `e1` and `e1/2 + e_n/n` for `2 <= n <= dim`.
pub fn non_emanation_world(dim: usize) -> Result<World> {
    let e = |i: usize, s: f64| {
        let mut v = vec![0.0; dim];
        v[i] = s;
        v
    };
    let mut vertices = vec![e(0, -1.0), e(0, 1.0)];
    for n in 2..=dim {
        let mut v = e(0, 0.5);
        v[n - 1] = 1.0 / n as f64;
        vertices.push(v);
    }
    World::simplex(&vertices)
}

/// `θ_n = (e1/2 + e_n/n) / |e1/2 + e_n/n|`.
pub fn theta_n(dim: usize, n: usize) -> Point {
    let mut v = vec![0.0; dim];
    v[0] = 0.5;
    v[n - 1] = 1.0 / n as f64;
    let norm = vector::euclidean(&v);
    v.iter().map(|x| x / norm).collect()
}

fn non_emanation(dim: usize) -> Result<WitnessReport> {
    let space = NormedSpace::euclidean(dim);
    let world = non_emanation_world(dim)?;
    let origin = vec![0.0; dim];
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let config = Configuration::new(
        space,
        world.clone(),
        vec![Site::point(origin.clone()), Site::point(vector::scale(&e1, -1.0))],
    )?;
    let mut samples = vec![sample(&config, 0, &origin, e1.clone(), "theta_1", 1e-12)];
    let mut values = Vec::new();
    let mut reproduced = true;
    for n in 2..=dim {
        let th = theta_n(dim, n);
        let l = chord_length(&world, &space, &origin, &th)?;
        let expected = (0.25 + 1.0 / (n * n) as f64).sqrt();
        reproduced &= (l - expected).abs() <= 1e-12 && l < 0.99;
        values.push((format!("L(theta_{n})"), l));
        samples.push(sample(&config, 0, &origin, th, format!("theta_{n}"), 1e-12));
    }
    // at scales above the truncation the chord collapses near θ_1
    let floor = 1.0 / dim as f64;
    let scan = emanation_check(
        &world,
        &space,
        &origin,
        &e1,
        0.01,
        &ScanOptions {
            beta_floor: floor,
            ..ScanOptions::default()
        },
    )?;
    values.push(("emanation_beta_floor".into(), floor));
    values.push(("emanation_holds".into(), if scan.holds { 1.0 } else { 0.0 }));
    reproduced &= !scan.holds;
    Ok(WitnessReport {
        name: "non_emanation".into(),
        claim: "in the truncated simplex, L(theta_n)=sqrt(0.25+1/n^2) < 0.99 = L(theta_1)-0.01, \
                so T(.,0) is discontinuous at theta_1"
            .into(),
        samples,
        values,
        reproduced,
    })
}

fn zero_site_distance(n: usize) -> Result<WitnessReport> {
    let config = Configuration::new(
        NormedSpace::euclidean(2),
        World::square(1.0),
        vec![
            Site::point(vec![0.0, 0.0]),
            Site::segment(vec![-1.0, 0.0], vec![1.0, 0.0]),
        ],
    )?;
    let p = [0.0, 0.0];
    let inv = 1.0 / n as f64;
    let at = sample(&config, 0, &p, vec![0.0, 1.0], "theta=(0,1)", 1e-12);
    let near = sample(&config, 0, &p, vec![inv, (1.0 - inv * inv).sqrt()], format!("phi_{n}"), 1e-12);
    let reproduced = (at.t.value() - 1.0).abs() <= 1e-9 && near.t.value().abs() <= 1e-9;
    Ok(WitnessReport {
        name: "zero_site_distance".into(),
        claim: "X=[-1,1]^2, p=(0,0), A=[-1,1]x{0}: T(theta,p)=1 but T(phi,p)=0".into(),
        samples: vec![at, near],
        values: vec![],
        reproduced,
    })
}

fn unbounded(n: usize) -> Result<WitnessReport> {
    let config = Configuration::new(
        NormedSpace::euclidean(2),
        World::unbounded(2),
        vec![Site::point(vec![0.0, -1.0]), Site::point(vec![0.0, 1.0])],
    )?;
    let p = [0.0, -1.0];
    let inv = 1.0 / n as f64;
    let at = sample(&config, 0, &p, vec![1.0, 0.0], "theta=(1,0)", 1e-9);
    let near = sample(&config, 0, &p, vec![(1.0 - inv * inv).sqrt(), inv], format!("phi_{n}"), 1e-9);
    let reproduced = at.t.is_infinite() && !near.t.is_infinite();
    Ok(WitnessReport {
        name: "unbounded".into(),
        claim: "p=(0,-1), A={(0,1)} in the plane: T(theta,p)=inf but T(phi,p)<inf".into(),
        samples: vec![at, near],
        values: vec![],
        reproduced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_points_emanate() {
        let world = World::cube(0.0, 1.0, 2);
        let space = NormedSpace::euclidean(2);
        for (i, theta) in cells::unit_directions(&space, 16, 0).iter().enumerate() {
            let r = emanation_check(&world, &space, &[0.3, 0.6], theta, 0.1, &ScanOptions::default()).unwrap();
            assert!(r.holds, "direction {i}");
            assert!(r.beta > 0.0);
        }
    }

    #[test]
    fn corner_excludes_outward_directions() {
        let world = World::cube(0.0, 1.0, 2);
        let space = NormedSpace::euclidean(2);
        let r = emanation_check(&world, &space, &[0.0, 0.0], &[1.0, 0.0], 0.1, &ScanOptions::default()).unwrap();
        assert!(r.holds);
        assert_eq!(
            emanation_check(&world, &space, &[0.0, 0.0], &[-1.0, 0.0], 0.1, &ScanOptions::default()),
            Err(Error::DirectionNotInThetaP)
        );
        let phi = [-(1.0f64 - 0.01).sqrt(), -0.1];
        assert!(!in_theta_p(&world, &space, &[0.0, 0.0], &phi).unwrap());
    }

    #[test]
    fn t_continuity_example() {
        let t = TContinuity::new(&NormedSpace::euclidean(2), 6.0, 10.0, 0.5, 1.0, 1.0).unwrap();
        assert!((t.lambda - 8.508_064_000_149_459_67e-5).abs() < 1e-18);
        assert!((t.delta - 2.127_016_000_037_364_92e-6).abs() < 1e-19);
        let zero = TContinuity::new(&NormedSpace::euclidean(2), 6.0, 10.0, 0.5, 0.0, 1.0).unwrap();
        assert_eq!(zero.delta, 0.0);
        assert!(matches!(
            TContinuity::new(&NormedSpace::euclidean(2), 6.0, 10.0, 1.0, 1.0, 1.0),
            Err(Error::EpsilonTooLarge { .. })
        ));
        assert_eq!(
            TContinuity::new(&NormedSpace::linf(2), 6.0, 10.0, 0.5, 1.0, 1.0),
            Err(Error::NotUniformlyConvex)
        );
    }

    #[test]
    fn witnesses_reproduce() {
        for name in WITNESSES {
            let r = t_discontinuity_witness(name).unwrap();
            assert!(r.reproduced, "{name}: {r:?}");
        }
        assert!(matches!(t_discontinuity_witness("x"), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn unbounded_witness_values() {
        let r = t_discontinuity_witness("unbounded").unwrap();
        assert!((r.samples[1].t.value() - 10.0).abs() < 1e-6);
    }

    #[test]
    fn estimated_modulus_is_verified() {
        let config = Configuration::new(
            NormedSpace::euclidean(2),
            World::square(10.0),
            vec![Site::point(vec![-1.0, 0.0]), Site::point(vec![1.0, 0.0])],
        )
        .unwrap();
        let p = [-1.0, 0.0];
        let theta = [0.6, 0.8];
        let tc = estimate_t_continuity(&config, 0, &p, &theta, 0.3, &ScanOptions::default()).unwrap();
        assert!(tc.delta > 0.0);
        let check = verify_t_continuity(&config, 0, &p, &theta, 0.3, tc.delta, 200, 1).unwrap();
        assert!(check.pass, "{check:?}");
    }
}
