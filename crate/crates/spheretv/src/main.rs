use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spheretv::container::{write_atomic, Container, Kind};
use spheretv::dense::{densify_analysis, densify_synthesis};
use spheretv::experiment::{
    build_transform, read_gridded_map, run_experiment, BaseMap, ExperimentConfig,
};
use spheretv::render::render_png;
use spheretv::{Error, Result};
use spheretv_core::harmonic::conj_sym_extend;
use spheretv_core::inpaint::{
    make_test_image, random_caps_map, run_image_trial, run_trial, topography_map, Domain, TrialSpec,
};
use spheretv_core::prox::{SolverConfig, SolverReport};
use spheretv_core::{Complex64, HarmonicCoeffs, SamplingScheme, SphereImage};

#[derive(Parser)]
#[command(
    name = "spherecli",
    version,
    about = "Harmonic transforms and total-variation inpainting on the sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
    ForwardAdjoint,
    InverseAdjoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaseKind {
    Caps,
    Topography,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one transform to a container.
    Transform {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        direction: Direction,
        #[arg(long)]
        scheme: Option<SamplingScheme>,
        #[arg(long)]
        bandlimit: Option<usize>,
        /// Also compare the dense operator with the dense transpose of its
        /// counterpart (L ≤ 8).
        #[arg(long)]
        densify_check: bool,
    },
    /// Build a ground-truth container.
    Truth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "mw")]
        scheme: SamplingScheme,
        #[arg(long, default_value_t = 32)]
        bandlimit: usize,
        #[arg(long, value_enum, default_value = "caps")]
        base: BaseKind,
        /// Text gridded map used instead of a synthetic base.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 0.002)]
        sigma_s: f64,
        /// Write the raw base samples instead of the smoothed test image.
        #[arg(long)]
        raw: bool,
    },
    /// Solve one inpainting problem.
    Inpaint {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        ratio: f64,
        #[arg(long, default_value = "harmonic")]
        domain: Domain,
        #[arg(long)]
        scheme: Option<SamplingScheme>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.99)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        sigma_n: f64,
        /// Solver configuration JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run a full experiment matrix.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Overrides the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render an image container in the Mollweide projection.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        min: f64,
        #[arg(long, default_value_t = 1.0)]
        max: f64,
        #[arg(long, default_value_t = 800)]
        width: usize,
    },
}

fn max_abs(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_imag(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
}

fn check_flags(
    c: &Container,
    scheme: Option<SamplingScheme>,
    bandlimit: Option<usize>,
) -> Result<()> {
    if let Some(s) = scheme {
        if s != c.header.scheme {
            return Err(Error::KindMismatch {
                expected: format!("{s} data"),
                found: format!("{} data", c.header.scheme),
            });
        }
    }
    if let Some(l) = bandlimit {
        if l != c.header.bandlimit {
            return Err(Error::KindMismatch {
                expected: format!("L={l}"),
                found: format!("L={}", c.header.bandlimit),
            });
        }
    }
    Ok(())
}

fn input_coeffs(c: &Container) -> Result<HarmonicCoeffs> {
    match c.kind() {
        Kind::HalfCoeffs => Ok(conj_sym_extend(&c.to_half()?)?),
        _ => c.to_coeffs(),
    }
}

fn write_image(out: &Path, image: &SphereImage<Complex64>) -> Result<()> {
    println!(
        "max |imag| of output image: {:.3e}",
        max_imag(image.samples())
    );
    Container::from_image(&image.re()).write(out)
}

fn cmd_transform(
    input: &Path,
    out: &Path,
    direction: Direction,
    scheme: Option<SamplingScheme>,
    bandlimit: Option<usize>,
    densify_check: bool,
) -> Result<()> {
    let c = Container::read(input)?;
    check_flags(&c, scheme, bandlimit)?;
    let t = build_transform(c.header.scheme, c.header.bandlimit)?;
    let t = t.as_ref();
    match direction {
        Direction::Inverse => {
            let coeffs = input_coeffs(&c)?;
            let image = t.inverse(&coeffs)?;
            let back = t.forward(&image)?;
            println!(
                "round-trip max abs error: {:.3e}",
                max_abs(back.values(), coeffs.values())
            );
            write_image(out, &image)?;
        }
        Direction::ForwardAdjoint => {
            let coeffs = input_coeffs(&c)?;
            write_image(out, &t.forward_adjoint(&coeffs)?)?;
        }
        Direction::Forward | Direction::InverseAdjoint => {
            let image = c.to_image()?.to_complex();
            let coeffs = match direction {
                Direction::Forward => t.forward(&image)?,
                _ => t.inverse_adjoint(&image)?,
            };
            if matches!(direction, Direction::Forward) {
                let back = t.inverse(&coeffs)?;
                println!(
                    "band-limiting max abs change: {:.3e}",
                    max_abs(back.samples(), image.samples())
                );
            }
            println!(
                "max abs coefficient: {:.3e}",
                coeffs.values().iter().map(|v| v.norm()).fold(0.0, f64::max)
            );
            Container::from_coeffs(c.header.scheme, &coeffs).write(out)?;
        }
    }
    if densify_check {
        if c.header.bandlimit > 8 {
            return Err(Error::Config("densify check is limited to L ≤ 8".into()));
        }
        let gap = match direction {
            Direction::Inverse | Direction::InverseAdjoint => {
                densify_synthesis(t, |x| t.inverse(x))?
                    .adjoint_gap(&densify_analysis(t, |x| t.inverse_adjoint(x))?)
            }
            Direction::Forward | Direction::ForwardAdjoint => {
                densify_analysis(t, |x| t.forward(x))?
                    .adjoint_gap(&densify_synthesis(t, |x| t.forward_adjoint(x))?)
            }
        };
        println!("densified transpose max abs mismatch: {gap:.3e}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_truth(
    out: &Path,
    scheme: SamplingScheme,
    bandlimit: usize,
    base: BaseKind,
    map: Option<&Path>,
    seed: u64,
    sigma_s: f64,
    raw: bool,
) -> Result<()> {
    let t = build_transform(scheme, bandlimit)?;
    let samples = match (map, base) {
        (Some(path), _) => read_gridded_map(path)?.resample(t.grid()),
        (None, BaseKind::Caps) => random_caps_map(t.grid(), 5, seed),
        (None, BaseKind::Topography) => topography_map(t.as_ref(), 4.0, seed)?,
    };
    if raw {
        return Container::from_image(&samples).write(out);
    }
    let truth = make_test_image(&samples, t.as_ref(), sigma_s)?;
    Container::from_coeffs(scheme, &truth.coeffs).write(out)
}

#[derive(Serialize)]
struct InpaintReport {
    scheme: SamplingScheme,
    domain: Domain,
    ratio: f64,
    seed: u64,
    #[serde(rename = "M")]
    m: usize,
    epsilon: f64,
    snr_db: f64,
    snr_kind: &'static str,
    truth_feasible: bool,
    tv_truth: f64,
    solver: SolverReport,
}

#[allow(clippy::too_many_arguments)]
fn cmd_inpaint(
    truth: &Path,
    ratio: f64,
    domain: Domain,
    scheme: Option<SamplingScheme>,
    seed: u64,
    alpha: f64,
    sigma_n: f64,
    config: Option<&Path>,
    out: &Path,
    report: &Path,
) -> Result<()> {
    let c = Container::read(truth)?;
    let scheme = scheme.unwrap_or(c.header.scheme);
    let solver: SolverConfig = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        }
        None => SolverConfig::default(),
    };
    let t = build_transform(scheme, c.header.bandlimit)?;
    let spec = TrialSpec {
        scheme,
        domain,
        ratio,
        ratio_index: 0,
        trial: 0,
        sigma_n,
        alpha,
        master_seed: seed,
    };
    let start = Instant::now();
    let (mut outcome, snr_kind) = match c.kind() {
        Kind::Image => {
            if c.header.scheme != scheme {
                return Err(Error::KindMismatch {
                    expected: format!("{scheme} image"),
                    found: format!("{} image", c.header.scheme),
                });
            }
            (
                run_image_trial(&c.to_image()?, t.as_ref(), &spec, &solver)?,
                "image",
            )
        }
        _ => (
            run_trial(&input_coeffs(&c)?, t.as_ref(), &spec, &solver)?,
            "harmonic",
        ),
    };
    outcome.report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Container::from_image(&outcome.image).write(out)?;
    let r = InpaintReport {
        scheme,
        domain,
        ratio,
        seed,
        m: outcome.m,
        epsilon: outcome.epsilon,
        snr_db: outcome.snr_db,
        snr_kind,
        truth_feasible: outcome.truth_feasible,
        tv_truth: outcome.tv_truth,
        solver: outcome.report,
    };
    write_atomic(report, serde_json::to_string_pretty(&r)?.as_bytes())?;
    println!(
        "snr={:.2} dB residual={:.4e} epsilon={:.4e} iterations={}",
        r.snr_db, r.solver.residual, r.epsilon, r.solver.iterations
    );
    Ok(())
}

fn cmd_experiment(config: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let BaseMap::File { path } = &mut cfg.base_map {
        if path.is_relative() {
            *path = config.parent().unwrap_or(Path::new(".")).join(&*path);
        }
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let results = run_experiment(&cfg)?;
    write_atomic(
        &out_dir.join("results.csv"),
        &results.to_csv(cfg.record_wall_time)?,
    )?;
    write_atomic(
        &out_dir.join("summary.json"),
        results.summary_json(&cfg)?.as_bytes(),
    )?;
    for cell in &results.cells {
        eprintln!(
            "{} {} ratio={}: mean snr {:.2} dB over {}/{}",
            cell.scheme, cell.domain, cell.ratio, cell.mean_snr_db, cell.successes, cell.trials
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Transform {
            input,
            out,
            direction,
            scheme,
            bandlimit,
            densify_check,
        } => cmd_transform(&input, &out, direction, scheme, bandlimit, densify_check),
        Command::Truth {
            out,
            scheme,
            bandlimit,
            base,
            map,
            seed,
            sigma_s,
            raw,
        } => cmd_truth(
            &out,
            scheme,
            bandlimit,
            base,
            map.as_deref(),
            seed,
            sigma_s,
            raw,
        ),
        Command::Inpaint {
            truth,
            ratio,
            domain,
            scheme,
            seed,
            alpha,
            sigma_n,
            config,
            out,
            report,
        } => cmd_inpaint(
            &truth,
            ratio,
            domain,
            scheme,
            seed,
            alpha,
            sigma_n,
            config.as_deref(),
            &out,
            &report,
        ),
        Command::Experiment {
            config,
            out_dir,
            seed,
        } => cmd_experiment(&config, &out_dir, seed),
        Command::Render {
            input,
            out,
            min,
            max,
            width,
        } => {
            let c = Container::read(&input)?;
            render_png(&c.to_image()?, &out, width, min, max)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
