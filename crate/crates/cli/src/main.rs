//! `ucv`: build cells, render figures, certify and test stability.
//!
//! Exit codes: 0 on success, 1 when a computation fails or a check does
//! not pass, 2 on usage, scene or I/O errors. Errors are printed to stderr
//! as `{"error": kind, "message": ..}`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use ucvoronoi::emanation::{t_discontinuity_witness, WITNESSES};
use ucvoronoi::stability::{counterexample, run_experiment, ExperimentOptions, COUNTEREXAMPLES};
use ucvoronoi::svg::render_svg;
use ucvoronoi::{build_cell, certify, certify_interior, parse_scene, CellApprox, CellOptions, Error, Scene};

#[derive(Parser)]
#[command(name = "ucv", version, about = "Voronoi cells in uniformly convex spaces and their stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build every cell of a scene as segment fans.
    Cells {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        cells: CellArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Render a planar scene and its cells to SVG.
    Render {
        #[command(flatten)]
        scene: SceneArgs,
        #[command(flatten)]
        cells: CellArgs,
        /// Draw only the world and the sites.
        #[arg(long)]
        no_cells: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compute the stability certificate (ε, η, ρ, C, λ, Δ).
    Certify {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        epsilon: f64,
        /// Use the linear-in-ε bound for sites away from the boundary.
        #[arg(long)]
        interior: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Perturb sites within Δ and measure how far the cells move.
    Experiment {
        #[command(flatten)]
        scene: SceneArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        interior: bool,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        cells: CellArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reproduce one of the instability scenarios.
    Counterexample {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(COUNTEREXAMPLES))]
        name: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Reproduce one of the discontinuities of T.
    Tcontinuity {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(WITNESSES))]
        name: String,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct SceneArgs {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
}

#[derive(Args)]
struct CellArgs {
    /// Ray directions per anchor.
    #[arg(long)]
    directions: Option<usize>,
    /// Anchors per continuous site piece.
    #[arg(long)]
    anchors: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OutArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also render an SVG (planar scenes only).
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// A failure together with its exit code.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Schema { .. } | Error::Io(_) | Error::UnknownScenario(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

/// What a successful command produced, and whether its checks passed.
struct Report {
    json: Value,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            emit_error(&Failure {
                code: 2,
                kind: "UsageError".into(),
                message: e.to_string().trim_end().to_string(),
            });
            return ExitCode::from(2);
        }
    };
    if let Err(f) = configure_threads() {
        emit_error(&f);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            emit_error(&f);
            ExitCode::from(f.code)
        }
    }
}

fn emit_error(f: &Failure) {
    eprintln!("{}", json!({"error": f.kind, "message": f.message}));
}

/// `UCV_THREADS` caps the worker pool; 0 or unset means one per core.
fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("UCV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Failure {
        code: 2,
        kind: "UsageError".into(),
        message: format!("UCV_THREADS must be a non-negative integer, got `{raw}`"),
    })?;
    // fails only if a pool already exists, which cannot happen here
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(command: Command) -> Result<bool, Failure> {
    let (report, out) = match command {
        Command::Cells { scene, cells, out } => {
            let scene = load_scene(&scene.scene)?;
            let built = build_cells(&scene, &cells)?;
            write_svg(&out, &scene, &built)?;
            let json = json!({"cells": built});
            (Report { json, pass: true }, out)
        }
        Command::Render {
            scene,
            cells,
            no_cells,
            out,
        } => {
            let scene = load_scene(&scene.scene)?;
            let built = if no_cells { Vec::new() } else { build_cells(&scene, &cells)? };
            let svg = render_svg(&scene, &built)?;
            match out.svg.as_ref().or(out.out.as_ref()) {
                Some(path) => write_file(path, &svg)?,
                None => print!("{svg}"),
            }
            return Ok(true);
        }
        Command::Certify {
            scene,
            epsilon,
            interior,
            out,
        } => {
            let config = load_scene(&scene.scene)?.config()?;
            let cert = if interior {
                certify_interior(&config, epsilon)?
            } else {
                certify(&config, epsilon)?
            };
            (Report { json: json!(cert), pass: true }, out)
        }
        Command::Experiment {
            scene,
            epsilon,
            interior,
            trials,
            cells,
            out,
        } => {
            let scene = load_scene(&scene.scene)?;
            let config = scene.config()?;
            let mut opts = ExperimentOptions::new(scene.space.dim, trials, cells.seed);
            opts.interior = interior;
            opts.cell = cell_options(&scene, &cells);
            let report = run_experiment(&config, epsilon, &opts)?;
            (
                Report {
                    pass: report.pass,
                    json: json!(report),
                },
                out,
            )
        }
        Command::Counterexample { name, out } => {
            let report = counterexample(&name)?;
            (
                Report {
                    pass: report.reproduced,
                    json: json!(report),
                },
                out,
            )
        }
        Command::Tcontinuity { name, out } => {
            let report = t_discontinuity_witness(&name)?;
            (
                Report {
                    pass: report.reproduced,
                    json: json!(report),
                },
                out,
            )
        }
    };
    let text = serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n";
    match &out.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(report.pass)
}

fn load_scene(path: &Path) -> Result<Scene, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        kind: "IoError".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(parse_scene(&text)?)
}

fn cell_options(scene: &Scene, args: &CellArgs) -> CellOptions {
    let mut opts = CellOptions::for_dim(scene.space.dim);
    if let Some(n) = args.directions {
        opts.directions = n;
    }
    opts.anchors = args.anchors;
    opts.seed = args.seed;
    opts
}

fn build_cells(scene: &Scene, args: &CellArgs) -> Result<Vec<CellApprox>, Failure> {
    let config = scene.config()?;
    let opts = cell_options(scene, args);
    Ok((0..config.len())
        .map(|k| build_cell(&config, k, &opts))
        .collect::<ucvoronoi::Result<_>>()?)
}

fn write_svg(out: &OutArgs, scene: &Scene, cells: &[CellApprox]) -> Result<(), Failure> {
    if let Some(path) = &out.svg {
        write_file(path, &render_svg(scene, cells)?)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure {
        code: 2,
        kind: "IoError".into(),
        message: format!("{}: {e}", path.display()),
    })
}
