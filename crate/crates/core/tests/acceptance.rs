//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the report is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucvoronoi::cells::{self, build_cell, cell_membership, compute_t, unit_directions, CellOptions, TOptions};
use ucvoronoi::emanation::{self, ScanOptions};
use ucvoronoi::stability::{self, counterexample, run_experiment, strict_segment_bound, ExperimentOptions, Magnitude};
use ucvoronoi::vector::{self, Point};
use ucvoronoi::{sites, Configuration, NormedSpace, Site, World};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const LP: [f64; 3] = [1.5, 2.0, 3.0];

fn random_vec(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Point {
    (0..dim).map(|_| rng.random_range(-scale..scale)).collect()
}

fn random_direction(rng: &mut ChaCha8Rng, space: &NormedSpace) -> Point {
    loop {
        let v = random_vec(rng, space.dim, 1.0);
        if let Ok(u) = space.normalize(&v) {
            return u;
        }
    }
}

/// Random point sites in `[-10, 10]²`, all points pairwise at least `sep`
/// apart.
fn random_point_sites(rng: &mut ChaCha8Rng, space: &NormedSpace, k: usize, max_pts: usize, sep: f64, half: f64) -> Vec<Site> {
    let mut all: Vec<Point> = Vec::new();
    let mut sites = Vec::new();
    for _ in 0..k {
        let m = rng.random_range(1..=max_pts);
        let mut pts = Vec::new();
        while pts.len() < m {
            let p = random_vec(rng, 2, half);
            if all.iter().all(|q| space.dist(&p, q) >= sep) {
                all.push(p.clone());
                pts.push(p);
            }
        }
        sites.push(Site::points(pts));
    }
    sites
}

fn c1_strong_triangle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0usize;
    let mut failures = 0usize;
    for dim in [2usize, 5, 20] {
        for p in [1.5, 2.0, 3.0, 4.0] {
            let space = NormedSpace::lp(p, dim).unwrap();
            for i in 0..100_000 {
                let x1 = random_vec(&mut rng, dim, 1.0);
                // mix generic, near-parallel, near-opposite and rescaled pairs
                let x2 = match i % 4 {
                    0 => random_vec(&mut rng, dim, 1.0),
                    1 => vector::along(&vector::scale(&x1, rng.random_range(0.1..10.0)), &random_vec(&mut rng, dim, 1.0), 1e-3),
                    2 => vector::along(&vector::scale(&x1, -rng.random_range(0.5..2.0)), &random_vec(&mut rng, dim, 1.0), 0.05),
                    _ => vector::scale(&random_vec(&mut rng, dim, 1.0), 10f64.powf(rng.random_range(-3.0..3.0))),
                };
                let Ok(st) = space.check_strong_triangle(&x1, &x2) else {
                    continue;
                };
                checked += 1;
                worst = worst.max(st.lhs - st.rhs);
                if !st.holds(1e-9) {
                    failures += 1;
                }
            }
        }
    }
    outcome(
        failures == 0 && checked >= 1_190_000,
        format!("{checked} pairs, {failures} violations, max lhs-rhs {worst:.3e}"),
    )
}

fn c2_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 2048;
    let mut compared = 0usize;
    let mut excluded = 0usize;
    let mut disagreements = 0usize;
    for c in 0..50 {
        let space = NormedSpace::lp(LP[c % 3], 2).unwrap();
        let k = rng.random_range(2..=6);
        let sites = random_point_sites(&mut rng, &space, k, 4, 0.05, 9.5);
        let config = Configuration::new(space, World::square(10.0), sites).unwrap();
        let diam = config.world.diameter(&space).unwrap();
        let band = 4.0 * diam / n as f64;
        let cells: Vec<_> = (0..k)
            .map(|j| build_cell(&config, j, &CellOptions::for_dim(2).with_directions(n)).unwrap())
            .collect();
        for _ in 0..10_000 {
            let x = random_vec(&mut rng, 2, 10.0);
            let near_wall = config.world.point_boundary_distance(&space, &x) <= band;
            for (j, cell) in cells.iter().enumerate() {
                let gap = cells::dominance_gap(&config, j, &x).unwrap();
                // the gap is 2-Lipschitz, so |gap| > 2·band keeps x a band away
                if near_wall || gap.abs() <= 2.0 * band {
                    excluded += 1;
                    continue;
                }
                compared += 1;
                if cell_membership(cell, &x) != (gap <= 0.0) {
                    disagreements += 1;
                }
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("{compared} comparisons, {excluded} in band, {disagreements} disagreements"),
    )
}

/// Random mixed configuration for predicate checks.
fn random_mixed_config(rng: &mut ChaCha8Rng) -> Configuration {
    let space = NormedSpace::lp(LP[rng.random_range(0..3)], 2).unwrap();
    loop {
        let k = rng.random_range(2..=4);
        let mut sites = random_point_sites(rng, &space, k, 3, 0.5, 9.0);
        if rng.random_bool(0.5) {
            let a = random_vec(rng, 2, 9.0);
            let b = random_vec(rng, 2, 9.0);
            sites.push(Site::segment(a, b));
        }
        if rng.random_bool(0.3) {
            sites.push(Site::disc(random_vec(rng, 2, 8.0), rng.random_range(0.1..1.0)));
        }
        let config = Configuration::new(space, World::square(10.0), sites).unwrap();
        if sites::eta(&config).value > 0.1 {
            return config;
        }
    }
}

fn c3_interval_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let tol = 1e-9;
    let (mut informative, mut violations) = (0usize, 0usize);
    let mut config = random_mixed_config(&mut rng);
    for trial in 0..10_000 {
        if trial % 100 == 0 {
            config = random_mixed_config(&mut rng);
        }
        let k = rng.random_range(0..config.len());
        let p = match &config.sites[k] {
            Site::Points { coords } => coords[rng.random_range(0..coords.len())].clone(),
            Site::Segment { a, b } => vector::lerp(a, b, rng.random::<f64>()),
            Site::Disc { center, radius } => {
                let u = random_direction(&mut rng, &config.space);
                vector::along(center, &u, radius * rng.random::<f64>())
            }
            _ => unreachable!(),
        };
        let theta = random_direction(&mut rng, &config.space);
        let exit = config.world.ray_exit(&config.space, &p, &theta).unwrap();
        let holds = |t: f64| {
            let x = vector::along(&p, &theta, t);
            config.space.dist(&x, &p) <= config.distance_to_others(k, &x) + tol
        };
        // half the trials straddle the computed T
        let t2 = if trial % 2 == 0 {
            rng.random_range(0.0..=exit)
        } else {
            let t = cells::t_unbounded(&config, k, &p, &theta, 1e-12, 1e3);
            match t {
                cells::RayLength::Finite(t) => (t * rng.random_range(0.9..1.1)).min(exit),
                _ => exit,
            }
        };
        let t1 = rng.random_range(0.0..=t2);
        if holds(t2) {
            informative += 1;
            if !holds(t1) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0 && informative > 1000,
        format!("10000 trials, {informative} with the predicate true at t2, {violations} violations"),
    )
}

fn c4_bisection_accuracy() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let space = NormedSpace::euclidean(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = random_vec(&mut rng, 2, 9.0);
        let b = loop {
            let b = random_vec(&mut rng, 2, 9.0);
            if space.dist(&a, &b) > 0.1 {
                break b;
            }
        };
        let config = Configuration::new(space, World::square(10.0), vec![Site::point(a.clone()), Site::point(b.clone())]).unwrap();
        let theta = random_direction(&mut rng, &space);
        let exit = config.world.ray_exit(&space, &a, &theta).unwrap();
        // t = |a + tθ - b|  ⇔  t = |a-b|² / (2 θ·(b-a))
        let ab = vector::sub(&b, &a);
        let toward = vector::dot(&theta, &ab);
        let analytic = if toward > 0.0 {
            (vector::dot(&ab, &ab) / (2.0 * toward)).min(exit)
        } else {
            exit
        };
        // the default tolerance (1e-9 × diameter) is coarser than 1e-8 here
        let opts = TOptions::with_tol(1e-10);
        let t = compute_t(&config, 0, &a, &theta, &opts).unwrap();
        worst = worst.max((t - analytic).abs());
    }
    outcome(worst <= 1e-8, format!("1000 instances, max |T - analytic| = {worst:.3e}"))
}

fn c5_main_theorem() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0usize;
    let mut trials = 0usize;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_resolution_ratio: f64 = 0.0;
    for c in 0..20 {
        let space = NormedSpace::lp(LP[c % 3], 2).unwrap();
        let k = rng.random_range(3..=4);
        let sites = random_point_sites(&mut rng, &space, k, 1, 2.0, 8.0);
        let config = Configuration::new(space, World::square(10.0), sites).unwrap();
        let eta = sites::eta(&config).value;
        let epsilon = eta / 12.0;
        let mut opts = ExperimentOptions::new(2, 20, 500 + c as u64);
        opts.cell = opts.cell.with_directions(256);
        let report = match run_experiment(&config, epsilon, &opts) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("config {c}: {e}")),
        };
        for t in &report.trials {
            trials += 1;
            if !t.pass {
                failures += 1;
            }
            for (d, r) in t.cell_shift.iter().zip(&t.resolution) {
                worst_ratio = worst_ratio.max(d / epsilon);
                // each of the two cells must be resolved below ε/10
                worst_resolution_ratio = worst_resolution_ratio.max(r / (2.0 * epsilon / 10.0));
            }
        }
        for r in &report.base_resolution {
            worst_resolution_ratio = worst_resolution_ratio.max(r / (epsilon / 10.0));
        }
    }
    outcome(
        failures == 0 && worst_resolution_ratio < 1.0,
        format!(
            "{trials} trials, {failures} failures, max D(R,R')/eps {worst_ratio:.3e}, \
             max resolution/(eps/10) {worst_resolution_ratio:.3}"
        ),
    )
}

fn c6_strict_segment() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut done, mut failures) = (0usize, 0usize);
    while done < 10_000 {
        let dim = if rng.random_bool(0.5) { 2 } else { 3 };
        let space = NormedSpace::lp(LP[rng.random_range(0..3)], dim).unwrap();
        let a = if rng.random_bool(0.5) {
            Site::points((0..rng.random_range(1..=4)).map(|_| random_vec(&mut rng, dim, 5.0)).collect())
        } else {
            Site::segment(random_vec(&mut rng, dim, 5.0), random_vec(&mut rng, dim, 5.0))
        };
        let p = random_vec(&mut rng, dim, 5.0);
        let dpa = a.distance_to(&space, &p);
        if dpa < 1e-3 {
            continue;
        }
        let y = if rng.random_bool(0.5) {
            let u = random_direction(&mut rng, &space);
            vector::along(&p, &u, rng.random_range(0.01..0.5) * dpa)
        } else {
            let y = random_vec(&mut rng, dim, 8.0);
            if space.dist(&y, &p) > a.distance_to(&space, &y) {
                continue;
            }
            y
        };
        if space.dist(&y, &p) < 1e-6 {
            continue;
        }
        let x = vector::lerp(&p, &y, rng.random_range(0.0..1.0));
        let sigma = rng.random_range(0.01..5.0);
        match strict_segment_bound(&space, &a, &p, &y, &x, sigma) {
            Ok(b) => {
                done += 1;
                if !b.holds {
                    failures += 1;
                }
            }
            Err(e) => return outcome(false, format!("admissible instance rejected: {e}")),
        }
    }
    outcome(failures == 0, format!("{done} instances, {failures} failures"))
}

fn finite(m: &Magnitude) -> f64 {
    m.value()
}

fn c7_counterexamples() -> Outcome {
    let eta = counterexample("eta_zero").unwrap();
    let d_eta = finite(&eta.measurements[1].value);
    let linf = counterexample("linf_square").unwrap();
    let find = |label: &str| {
        linf.measurements
            .iter()
            .find(|m| m.label == label)
            .map(|m| finite(&m.value))
            .unwrap()
    };
    let d_linf = find("cell_shift(beta=0.05)");
    let shift = find("site_shift(beta=0.05)");
    let rho = counterexample("rho_unbounded").unwrap();
    let rho_inf = rho.measurements.iter().any(|m| m.label == "cell_shift" && m.value.is_infinite());
    let touching = stability::rectangle_containment(0.5, 0.0);
    let apart = stability::rectangle_containment(0.5, 0.01);
    let pass = (d_eta - 10.0).abs() <= 0.05
        && d_linf >= 1.0
        && (shift - 0.05).abs() < 1e-15
        && d_linf / shift >= 20.0
        && rho_inf
        && touching == 1.0
        && apart < 1.0;
    outcome(
        pass,
        format!(
            "eta_zero D={d_eta}; linf_square D={d_linf:.3} for shift {shift} (x{:.0}); \
             rho_unbounded {}; rectangle contained {touching} at beta=0, {apart} at beta=0.01",
            d_linf / shift,
            if rho_inf { "inf" } else { "finite" }
        ),
    )
}

fn c8_t_continuity() -> Outcome {
    let zero = emanation::t_discontinuity_witness("zero_site_distance").unwrap();
    let (t_theta, t_phi) = (zero.samples[0].t.value(), zero.samples[1].t.value());
    let zero_ok = (t_theta - 1.0).abs() <= 1e-9 && t_phi.abs() <= 1e-9;

    let config = Configuration::new(
        NormedSpace::euclidean(2),
        World::square(10.0),
        vec![Site::point(vec![-1.0, 0.0]), Site::point(vec![1.0, 0.0])],
    )
    .unwrap();
    let p = [-1.0, 0.0];
    let epsilon = 0.3;
    let mut cont_ok = true;
    let mut worst: f64 = 0.0;
    let mut min_delta = f64::INFINITY;
    for theta in unit_directions(&config.space, 8, 0) {
        let tc = emanation::estimate_t_continuity(&config, 0, &p, &theta, epsilon, &ScanOptions::default()).unwrap();
        min_delta = min_delta.min(tc.delta);
        if tc.delta > 0.0 {
            let check = emanation::verify_t_continuity(&config, 0, &p, &theta, epsilon, tc.delta, 1000, 8).unwrap();
            worst = worst.max(check.max_deviation);
            cont_ok &= check.pass;
        } else {
            cont_ok = false;
        }
    }

    let dim = 20;
    let world = emanation::non_emanation_world(dim).unwrap();
    let space = NormedSpace::euclidean(dim);
    let origin = vec![0.0; dim];
    let mut l_err: f64 = 0.0;
    for n in 2..=dim {
        let l = emanation::chord_length(&world, &space, &origin, &emanation::theta_n(dim, n)).unwrap();
        l_err = l_err.max((l - (0.25 + 1.0 / (n * n) as f64).sqrt()).abs());
    }
    let l_ok = l_err <= 1e-12;
    outcome(
        zero_ok && cont_ok && l_ok,
        format!(
            "T(theta)={t_theta}, T(phi)={t_phi:.1e}; continuity max |dT|={worst:.2e} <= {epsilon} \
             (min Delta {min_delta:.2e}); max |L(theta_n) - sqrt(0.25+1/n^2)| = {l_err:.1e}"
        ),
    )
}

fn c9_volume_trend() -> Outcome {
    let space = NormedSpace::euclidean(2);
    let base_sites = vec![vec![-3.0, -2.0], vec![4.0, -1.0], vec![0.5, 5.0]];
    let make = |pts: &[Point]| {
        Configuration::new(space, World::square(10.0), pts.iter().cloned().map(Site::point).collect()).unwrap()
    };
    let base = make(&base_sites);
    let eta = sites::eta(&base).value;
    let cert = stability::certify(&base, eta / 12.0).unwrap();
    let samples = 1_000_000;
    let seed = 9;
    let volumes = |config: &Configuration| -> Vec<cells::VolumeEstimate> {
        (0..config.len())
            .map(|k| cells::cell_volume(config, k, samples, seed).unwrap())
            .collect()
    };
    let v0 = volumes(&base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Point> = (0..3).map(|_| random_direction(&mut rng, &space)).collect();
    let mut devs = Vec::new();
    let mut within = true;
    for (i, size) in [cert.delta, cert.delta / 2.0, cert.delta / 4.0].into_iter().enumerate() {
        let moved: Vec<Point> = base_sites.iter().zip(&dirs).map(|(p, u)| vector::along(p, u, size)).collect();
        let v = volumes(&make(&moved));
        let dev = v.iter().zip(&v0).map(|(a, b)| (a.volume - b.volume).abs()).fold(0.0, f64::max);
        devs.push(dev);
        if i == 2 {
            within = v.iter().zip(&v0).all(|(a, b)| (a.volume - b.volume).abs() <= 3.0 * b.stderr);
        }
    }
    let monotone = devs.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        monotone && within,
        format!(
            "Delta={:.3e}; max volume deviation at Delta, Delta/2, Delta/4: {:?}; stderr {:.3}",
            cert.delta,
            devs,
            v0.iter().map(|v| v.stderr).fold(0.0, f64::max)
        ),
    )
}

/// Rays from `anchor` pointing downward with `T > 5`, read back from JSON.
fn long_lower_rays(cell_json: &serde_json::Value, anchor: &[f64]) -> usize {
    cell_json["fans"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|f| {
            let p: Vec<f64> = serde_json::from_value(f["p"].clone()).unwrap();
            p == anchor
        })
        .flat_map(|f| f["rays"].as_array().unwrap().iter())
        .filter(|r| r["theta"][1].as_f64().unwrap() < 0.0 && r["T"].as_f64().unwrap() > 5.0)
        .count()
}

fn c10_figures() -> Outcome {
    let opts = CellOptions::for_dim(2);
    let json = |config: &Configuration| {
        let cell = build_cell(config, 0, &opts).unwrap();
        serde_json::to_value(&cell).unwrap()
    };
    let fig5 = json(&stability::fig5());
    let square = json(&stability::fig6_square(0.2));
    let shifted = json(&stability::fig6_shifted(0.2));
    let before = long_lower_rays(&fig5, &[0.0, 0.0]);
    let after_square = long_lower_rays(&square, &[0.0, 0.0]);
    let after_shifted = long_lower_rays(&shifted, &[0.0, 0.0]) + long_lower_rays(&shifted, &[0.2, 0.2]);
    outcome(
        before >= 2 && after_square == 0 && after_shifted == 0,
        format!(
            "long lower rays of cell 1: {before} (Fig. 5), {after_square} (P4 grown to a square), \
             {after_shifted} (P1 moved to (0.2,0.2))"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("1 strong triangle inequality", c1_strong_triangle, Some(Duration::from_secs(10))),
        ("2 fan membership vs dominance predicate", c2_oracle_equivalence, Some(Duration::from_secs(60))),
        ("3 interval property of the ray predicate", c3_interval_property, Some(Duration::from_secs(10))),
        ("4 bisection accuracy", c4_bisection_accuracy, None),
        ("5 empirical soundness of Delta", c5_main_theorem, Some(Duration::from_secs(600))),
        ("6 strict segment margin", c6_strict_segment, None),
        ("7 counterexamples", c7_counterexamples, None),
        ("8 continuity of T and its failures", c8_t_continuity, None),
        ("9 volume stability trend", c9_volume_trend, None),
        ("10 figure rays", c10_figures, None),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, budget) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.pass = false;
                o.detail.push_str(&format!("; over the {}s budget", b.as_secs()));
            }
        }
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
