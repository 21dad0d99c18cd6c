//! Multi-trial experiment harness: configuration, execution and reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spheretv_core::gradient::WeightedGradient;
use spheretv_core::inpaint::{
    make_test_image, measurement_count, random_caps_map, run_image_trial, run_trial,
    topography_map, Domain, GriddedMap, TrialOutcome, TrialSpec,
};
use spheretv_core::prox::SolverConfig;
use spheretv_core::{
    DhTransform, HarmonicCoeffs, HarmonicTransform, MwTransform, QuadratureWeights, SamplingScheme,
    SphereImage,
};

use crate::error::{Error, Result};
use crate::fft::RustFftPlanner;

/// Source of the map the ground truth is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseMap {
    /// Sum of random spherical caps.
    Caps { n_caps: usize, seed: u64 },
    /// Power-law random field clipped below its midpoint.
    Topography { slope: f64, seed: u64 },
    /// Text file: `n_lat n_lon` then `n_lat * n_lon` values, North row first.
    File { path: PathBuf },
}

impl Default for BaseMap {
    fn default() -> Self {
        BaseMap::Caps { n_caps: 5, seed: 7 }
    }
}

/// How the base map becomes the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    /// Thresholded, smoothed and shared across schemes as one coefficient
    /// vector; scored in harmonic space.
    #[default]
    TestImage,
    /// The map's samples on each grid as-is; scored by the weighted image SNR.
    RawMap,
}

fn default_sigma_s() -> f64 {
    0.002
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "L")]
    pub bandlimit: usize,
    pub schemes: Vec<SamplingScheme>,
    pub domains: Vec<Domain>,
    pub ratios: Vec<f64>,
    pub trials: usize,
    pub sigma_n: f64,
    pub alpha: f64,
    pub master_seed: u64,
    #[serde(default = "default_sigma_s")]
    pub sigma_s: f64,
    #[serde(default)]
    pub base_map: BaseMap,
    #[serde(default)]
    pub truth: Truth,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Write measured wall times into the CSV (makes it run-dependent).
    #[serde(default)]
    pub record_wall_time: bool,
    /// Worker threads; `None` uses every core.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bandlimit == 0 {
            return Err(Error::Config("L must be positive".into()));
        }
        if self.schemes.is_empty()
            || self.domains.is_empty()
            || self.ratios.is_empty()
            || self.trials == 0
        {
            return Err(Error::Config(
                "schemes, domains, ratios and trials must be non-empty".into(),
            ));
        }
        if !(self.sigma_n >= 0.0) {
            return Err(Error::Config(format!(
                "sigma_n must be non-negative, got {}",
                self.sigma_n
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        for &scheme in &self.schemes {
            let n = scheme.distinct_count(self.bandlimit);
            for &ratio in &self.ratios {
                if !(ratio > 0.0) || measurement_count(ratio, self.bandlimit) > n {
                    return Err(Error::Config(format!(
                        "ratio {ratio} is not in (0, {n}/L²] for {scheme}"
                    )));
                }
            }
        }
        self.solver.validate()?;
        Ok(())
    }

    fn specs(&self) -> Vec<TrialSpec> {
        let mut specs = Vec::new();
        for &scheme in &self.schemes {
            for &domain in &self.domains {
                for (ratio_index, &ratio) in self.ratios.iter().enumerate() {
                    for trial in 0..self.trials {
                        specs.push(TrialSpec {
                            scheme,
                            domain,
                            ratio,
                            ratio_index,
                            trial,
                            sigma_n: self.sigma_n,
                            alpha: self.alpha,
                            master_seed: self.master_seed,
                        });
                    }
                }
            }
        }
        specs
    }
}

pub fn build_transform(
    scheme: SamplingScheme,
    bandlimit: usize,
) -> Result<Box<dyn HarmonicTransform>> {
    Ok(match scheme {
        SamplingScheme::Mw => Box::new(MwTransform::with_planner(bandlimit, &RustFftPlanner)?),
        SamplingScheme::Dh => Box::new(DhTransform::with_planner(bandlimit, &RustFftPlanner)?),
    })
}

/// Reads a text gridded map: `n_lat n_lon` followed by the values.
pub fn read_gridded_map(path: &Path) -> Result<GriddedMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut tokens = text.split_whitespace();
    let mut next_usize = |what: &str| -> Result<usize> {
        tokens
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("{}: missing {what}", path.display())))
    };
    let n_lat = next_usize("row count")?;
    let n_lon = next_usize("column count")?;
    let values = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GriddedMap::new(n_lat, n_lon, values)?)
}

fn base_samples(base: &BaseMap, transform: &dyn HarmonicTransform) -> Result<SphereImage> {
    Ok(match base {
        BaseMap::Caps { n_caps, seed } => random_caps_map(transform.grid(), *n_caps, *seed),
        BaseMap::Topography { slope, seed } => topography_map(transform, *slope, *seed)?,
        BaseMap::File { path } => read_gridded_map(path)?.resample(transform.grid()),
    })
}

/// Ground truth for every scheme of an experiment.
pub enum GroundTruth {
    Shared(HarmonicCoeffs),
    PerScheme(Vec<(SamplingScheme, SphereImage)>),
}

impl GroundTruth {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        match config.truth {
            Truth::TestImage => {
                let mw = build_transform(SamplingScheme::Mw, config.bandlimit)?;
                let base = base_samples(&config.base_map, mw.as_ref())?;
                Ok(GroundTruth::Shared(
                    make_test_image(&base, mw.as_ref(), config.sigma_s)?.coeffs,
                ))
            }
            Truth::RawMap => {
                let mut images = Vec::new();
                for &scheme in &config.schemes {
                    let t = build_transform(scheme, config.bandlimit)?;
                    images.push((scheme, base_samples(&config.base_map, t.as_ref())?));
                }
                Ok(GroundTruth::PerScheme(images))
            }
        }
    }

    pub fn image(&self, transform: &dyn HarmonicTransform) -> Result<SphereImage> {
        match self {
            GroundTruth::Shared(c) => Ok(transform.inverse(c)?.re()),
            GroundTruth::PerScheme(v) => v
                .iter()
                .find(|(s, _)| *s == transform.grid().scheme())
                .map(|(_, img)| img.clone())
                .ok_or_else(|| {
                    Error::Config(format!("no truth for {}", transform.grid().scheme()))
                }),
        }
    }

    fn run(
        &self,
        transform: &dyn HarmonicTransform,
        spec: &TrialSpec,
        solver: &SolverConfig,
    ) -> Result<TrialOutcome> {
        Ok(match self {
            GroundTruth::Shared(c) => run_trial(c, transform, spec, solver)?,
            GroundTruth::PerScheme(_) => {
                run_image_trial(&self.image(transform)?, transform, spec, solver)?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub scheme: SamplingScheme,
    pub domain: Domain,
    pub ratio: f64,
    pub trial: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub epsilon: f64,
    pub snr_db: f64,
    pub iterations: usize,
    pub objective: f64,
    pub residual: f64,
    pub converged: bool,
    pub tv_truth: f64,
    pub truth_feasible: bool,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub scheme: SamplingScheme,
    pub domain: Domain,
    pub ratio: f64,
    pub mean_snr_db: f64,
    pub successes: usize,
    pub trials: usize,
}

/// `Σ|∇̃x|` next to the band-limited proxy `Σ q Υ(|∇̃x|/q)` for one truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvDiagnostic {
    pub scheme: SamplingScheme,
    pub tv: f64,
    pub tv_band_limited: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResults {
    pub records: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
    pub diagnostics: Vec<TvDiagnostic>,
}

fn tv_diagnostic(transform: &dyn HarmonicTransform, truth: &SphereImage) -> Result<TvDiagnostic> {
    let grid = transform.grid();
    let weights = QuadratureWeights::new(grid);
    let magnitude = WeightedGradient::new(grid, &weights)?
        .apply(truth.samples())?
        .magnitude();
    let n_phi = grid.n_phi();
    let unweighted: Vec<f64> = magnitude
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let q = weights.ring(i / n_phi);
            if q > 0.0 {
                g / q
            } else {
                0.0
            }
        })
        .collect();
    let smoothed = transform.band_limit(&SphereImage::from_samples(grid, unweighted)?)?;
    Ok(TvDiagnostic {
        scheme: grid.scheme(),
        tv: magnitude.iter().sum(),
        tv_band_limited: spheretv_core::grid::integrate(&smoothed, &weights)?,
    })
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let truth = GroundTruth::build(config)?;
    let transforms = config
        .schemes
        .iter()
        .map(|&s| Ok((s, build_transform(s, config.bandlimit)?)))
        .collect::<Result<Vec<_>>>()?;
    let transform_for = |scheme: SamplingScheme| {
        transforms
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, t)| t.as_ref())
            .expect("one transform per scheme")
    };
    let diagnostics = transforms
        .iter()
        .map(|(_, t)| tv_diagnostic(t.as_ref(), &truth.image(t.as_ref())?))
        .collect::<Result<Vec<_>>>()?;

    let specs = config.specs();
    let total = specs.len();
    let run_one = |(i, spec): (usize, &TrialSpec)| {
        let start = Instant::now();
        let outcome = truth.run(transform_for(spec.scheme), spec, &config.solver);
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let label = format!(
            "{} {} ratio={} trial={}",
            spec.scheme, spec.domain, spec.ratio, spec.trial
        );
        let m = measurement_count(spec.ratio, config.bandlimit);
        match outcome {
            Ok(o) => {
                eprintln!(
                    "[{}/{total}] {label}: snr={:.2} dB iters={} {:.0} ms",
                    i + 1,
                    o.snr_db,
                    o.report.iterations,
                    wall_ms
                );
                TrialRecord {
                    scheme: spec.scheme,
                    domain: spec.domain,
                    ratio: spec.ratio,
                    trial: spec.trial,
                    m: o.m,
                    epsilon: o.epsilon,
                    snr_db: o.snr_db,
                    iterations: o.report.iterations,
                    objective: o.report.objective,
                    residual: o.report.residual,
                    converged: o.report.converged,
                    tv_truth: o.tv_truth,
                    truth_feasible: o.truth_feasible,
                    wall_ms,
                    error: None,
                }
            }
            Err(e) => {
                eprintln!("[{}/{total}] {label}: failed: {e}", i + 1);
                TrialRecord {
                    scheme: spec.scheme,
                    domain: spec.domain,
                    ratio: spec.ratio,
                    trial: spec.trial,
                    m,
                    epsilon: f64::NAN,
                    snr_db: f64::NAN,
                    iterations: 0,
                    objective: f64::NAN,
                    residual: f64::NAN,
                    converged: false,
                    tv_truth: f64::NAN,
                    truth_feasible: false,
                    wall_ms,
                    error: Some(e.to_string()),
                }
            }
        }
    };
    let records: Vec<TrialRecord> = match config.threads {
        Some(1) => specs.iter().enumerate().map(run_one).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| specs.par_iter().enumerate().map(run_one).collect()),
        None => specs.par_iter().enumerate().map(run_one).collect(),
    };

    let cells = records
        .chunks(config.trials)
        .map(|chunk| {
            let ok: Vec<&TrialRecord> = chunk.iter().filter(|r| r.succeeded()).collect();
            let mean = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().map(|r| r.snr_db).sum::<f64>() / ok.len() as f64
            };
            CellSummary {
                scheme: chunk[0].scheme,
                domain: chunk[0].domain,
                ratio: chunk[0].ratio,
                mean_snr_db: mean,
                successes: ok.len(),
                trials: chunk.len(),
            }
        })
        .collect();
    Ok(ExperimentResults {
        records,
        cells,
        diagnostics,
    })
}

impl ExperimentResults {
    pub fn cell(&self, scheme: SamplingScheme, domain: Domain, ratio: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.scheme == scheme && c.domain == domain && c.ratio == ratio)
    }

    /// CSV with columns `scheme, domain, ratio, trial, M, snr_db, iterations,
    /// residual, wall_ms`; `wall_ms` is left empty unless requested.
    pub fn to_csv(&self, with_wall_time: bool) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "scheme",
            "domain",
            "ratio",
            "trial",
            "M",
            "snr_db",
            "iterations",
            "residual",
            "wall_ms",
        ])?;
        for r in &self.records {
            let wall = if with_wall_time {
                format!("{:.3}", r.wall_ms)
            } else {
                String::new()
            };
            w.write_record([
                r.scheme.name().to_string(),
                r.domain.name().to_string(),
                r.ratio.to_string(),
                r.trial.to_string(),
                r.m.to_string(),
                r.snr_db.to_string(),
                r.iterations.to_string(),
                r.residual.to_string(),
                wall,
            ])?;
        }
        w.into_inner().map_err(|e| Error::Config(e.to_string()))
    }

    pub fn summary_json(&self, config: &ExperimentConfig) -> Result<String> {
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a ExperimentConfig,
            cells: &'a [CellSummary],
            tv_diagnostics: &'a [TvDiagnostic],
            trials: &'a [TrialRecord],
        }
        Ok(serde_json::to_string_pretty(&Summary {
            config,
            cells: &self.cells,
            tv_diagnostics: &self.diagnostics,
            trials: &self.records,
        })?)
    }
}
