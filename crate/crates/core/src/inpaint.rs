//! Random-mask measurements, the spatial and harmonic TV inpainting problems,
//! fidelity metrics and test-image construction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gradient::WeightedGradient;
use crate::grid::{QuadratureWeights, SamplingScheme, SphereGrid, SphereImage};
use crate::harmonic::{
    conj_sym_restrict, extend_unchecked, half_index, HalfCoeffs, HarmonicCoeffs, HarmonicTransform,
};
use crate::linalg::{dist, norm, norm_c};
use crate::prox::{
    douglas_rachford, power_iteration_bound, BallDual, DataBall, LinearOpPair, SolverConfig,
    SolverReport, TvDual, TvProx,
};
use crate::rng::{derive_seed, SeededRng};
use crate::special::chi2_epsilon;

/// Which unknowns the inpainting problem is posed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Domain {
    Spatial,
    Harmonic,
}

impl Domain {
    pub fn name(self) -> &'static str {
        match self {
            Domain::Spatial => "spatial",
            Domain::Harmonic => "harmonic",
        }
    }
}

impl core::fmt::Display for Domain {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spatial" => Ok(Domain::Spatial),
            "harmonic" => Ok(Domain::Harmonic),
            other => Err(Error::InvalidParameter(format!("unknown domain '{other}'"))),
        }
    }
}

/// Φ: selects `M` distinct sample points of a grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementOp {
    indices: Vec<usize>,
    n_samples: usize,
    n_distinct: usize,
}

impl MeasurementOp {
    /// `indices` are flat lattice indices; each must address a distinct point.
    pub fn new(grid: &SphereGrid, mut indices: Vec<usize>) -> Result<Self> {
        let distinct = grid.distinct_count();
        let limit = grid.distinct_indices().last().map_or(0, |&i| i + 1);
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= limit) {
            return Err(Error::InvalidParameter(format!(
                "sample index {bad} is not a distinct point"
            )));
        }
        Ok(Self {
            indices,
            n_samples: grid.n_samples(),
            n_distinct: distinct,
        })
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    /// Number of distinct points the mask draws from.
    pub fn n(&self) -> usize {
        self.n_distinct
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Gather from a full-lattice sample vector.
    pub fn gather(&self, x: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| x[i]).collect()
    }

    /// Scatter into a zero full-lattice sample vector.
    pub fn scatter(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_samples];
        for (&i, &v) in self.indices.iter().zip(y) {
            x[i] = v;
        }
        x
    }
}

/// Uniformly random mask of `m` distinct points (partial Fisher-Yates).
pub fn random_mask(grid: &SphereGrid, m: usize, seed: u64) -> Result<MeasurementOp> {
    let mut pool = grid.distinct_indices();
    if m > pool.len() {
        return Err(Error::TooManyMeasurements {
            requested: m,
            available: pool.len(),
        });
    }
    let mut rng = SeededRng::new(seed);
    for i in 0..m {
        let j = i + rng.below(pool.len() - i);
        pool.swap(i, j);
    }
    pool.truncate(m);
    MeasurementOp::new(grid, pool)
}

pub fn apply_mask(op: &MeasurementOp, x: &SphereImage) -> Result<Vec<f64>> {
    if x.samples().len() != op.n_samples {
        return Err(Error::DimensionMismatch {
            expected: op.n_samples,
            found: x.samples().len(),
        });
    }
    Ok(op.gather(x.samples()))
}

pub fn mask_adjoint(op: &MeasurementOp, y: &[f64], grid: &SphereGrid) -> Result<SphereImage> {
    if y.len() != op.m() {
        return Err(Error::DimensionMismatch {
            expected: op.m(),
            found: y.len(),
        });
    }
    SphereImage::from_samples(grid, op.scatter(y))
}

/// `y + n` with `n ~ N(0, σ²)` i.i.d.
pub fn add_noise(y: &[f64], sigma_n: f64, seed: u64) -> Vec<f64> {
    if sigma_n == 0.0 {
        return y.to_vec();
    }
    let mut rng = SeededRng::new(seed);
    y.iter().map(|v| v + sigma_n * rng.normal()).collect()
}

/// Duplicates the South-pole value across its ring (identity on DH).
fn expand_op(grid: &SphereGrid) -> LinearOpPair<'static> {
    let n = grid.n_samples();
    let d = grid.distinct_count();
    LinearOpPair::new_unchecked(
        d,
        n,
        move |x| {
            let mut full = vec![0.0; n];
            full[..d].copy_from_slice(x);
            let pole = x[d - 1];
            full[d..].iter_mut().for_each(|v| *v = pole);
            full
        },
        move |full| {
            let mut x = full[..d].to_vec();
            x[d - 1] += full[d..].iter().sum::<f64>();
            x
        },
    )
}

/// Λ′ = Re Λ Π acting on interleaved half coefficients.
pub fn real_synthesis_op(transform: &dyn HarmonicTransform) -> LinearOpPair<'_> {
    let bandlimit = transform.bandlimit();
    let dim = 2 * HalfCoeffs::len_for(bandlimit);
    let grid = transform.grid().clone();
    LinearOpPair::new_unchecked(
        dim,
        grid.n_samples(),
        move |x| {
            let half =
                HalfCoeffs::from_real_vec(bandlimit, x).expect("length fixed at construction");
            transform
                .inverse(&extend_unchecked(&half))
                .expect("band-limit fixed at construction")
                .re()
                .into_samples()
        },
        move |img| {
            let image = SphereImage::from_samples(
                &grid,
                img.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            )
            .expect("length fixed at construction");
            let full = transform
                .inverse_adjoint(&image)
                .expect("grid fixed at construction");
            conj_sym_restrict(&full).to_real_vec()
        },
    )
}

fn check_measurements(y: &[f64], mask: &MeasurementOp, grid: &SphereGrid) -> Result<()> {
    if mask.n_samples != grid.n_samples() {
        return Err(Error::DimensionMismatch {
            expected: grid.n_samples(),
            found: mask.n_samples,
        });
    }
    if y.len() != mask.m() {
        return Err(Error::DimensionMismatch {
            expected: mask.m(),
            found: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("measurements"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct SpatialSolution {
    /// DR solution before band-limiting, on the full lattice.
    pub raw: SphereImage,
    /// `Υ x*`.
    pub image: SphereImage,
    pub coeffs: HarmonicCoeffs,
    pub report: SolverReport,
}

#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    pub half: HalfCoeffs,
    pub coeffs: HarmonicCoeffs,
    pub image: SphereImage,
    pub report: SolverReport,
}

/// `argmin ‖x‖_TV` s.t. `‖y − Φx‖₂ ≤ ε` over the distinct points of the
/// grid, followed by band-limiting.
pub fn solve_spatial(
    y: &[f64],
    mask: &MeasurementOp,
    transform: &dyn HarmonicTransform,
    config: &SolverConfig,
) -> Result<SpatialSolution> {
    config.validate()?;
    let grid = transform.grid().clone();
    check_measurements(y, mask, &grid)?;
    let weights = QuadratureWeights::new(&grid);
    let gradient = WeightedGradient::new(&grid, &weights)?;
    let synth = expand_op(&grid);
    let mask_op = {
        let idx = mask.indices.clone();
        let d = grid.distinct_count();
        LinearOpPair::new_unchecked(
            d,
            idx.len(),
            move |x| idx.iter().map(|&i| x[i]).collect(),
            {
                let idx = mask.indices.clone();
                move |v| {
                    let mut x = vec![0.0; d];
                    for (&i, &a) in idx.iter().zip(v) {
                        x[i] = a;
                    }
                    x
                }
            },
        )
    };
    let ball = DataBall::tight(&mask_op, y.to_vec(), config.epsilon)?;
    let tv = TvProx::new(&synth, &gradient, config.inner_prox_iters, config.seed);
    let x0 = mask_op.adjoint(y);
    let (x, report) = run_dr(&tv, &ball, &synth, &gradient, &x0, config)?;
    let raw = SphereImage::from_samples(&grid, synth.apply(&x))?;
    let coeffs = transform.forward_real(&raw)?;
    let image = transform.inverse(&coeffs)?.re();
    Ok(SpatialSolution {
        raw,
        image,
        coeffs,
        report,
    })
}

/// `argmin ‖Λ′x̂′‖_TV` s.t. `‖y − ΦΛ′x̂′‖₂ ≤ ε` over half coefficients.
pub fn solve_harmonic(
    y: &[f64],
    mask: &MeasurementOp,
    transform: &dyn HarmonicTransform,
    config: &SolverConfig,
) -> Result<HarmonicSolution> {
    config.validate()?;
    let grid = transform.grid().clone();
    check_measurements(y, mask, &grid)?;
    let weights = QuadratureWeights::new(&grid);
    let gradient = WeightedGradient::new(&grid, &weights)?;
    let synth = real_synthesis_op(transform);
    let measure = LinearOpPair::new_unchecked(
        synth.in_dim(),
        mask.m(),
        |x| mask.gather(&synth.apply(x)),
        |v| synth.adjoint(&mask.scatter(v)),
    );
    let ball_norm = power_iteration_bound(&measure, 30, derive_seed(config.seed, &[1]));
    let ball = DataBall::new(&measure, y.to_vec(), config.epsilon, ball_norm)?
        .with_limits(config.ball_iters, config.ball_tol);
    let tv = TvProx::new(
        &synth,
        &gradient,
        config.inner_prox_iters,
        derive_seed(config.seed, &[2]),
    );
    let x0 = measure.adjoint(y);
    let (x, report) = run_dr(&tv, &ball, &synth, &gradient, &x0, config)?;
    let half = HalfCoeffs::from_real_vec(transform.bandlimit(), &x)?;
    let coeffs = extend_unchecked(&half);
    let image = SphereImage::from_samples(&grid, synth.apply(&x))?;
    Ok(HarmonicSolution {
        half,
        coeffs,
        image,
        report,
    })
}

const POLISH_ROUNDS: usize = 20;

fn run_dr(
    tv: &TvProx<'_>,
    ball: &DataBall<'_>,
    synth: &LinearOpPair<'_>,
    gradient: &WeightedGradient,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolverReport)> {
    let mut tv_state = TvDual::default();
    let mut ball_state = BallDual::default();
    let objective = |x: &[f64]| gradient.tv_norm(&synth.apply(x)).unwrap_or(f64::NAN);
    let (x, mut report) = douglas_rachford(
        |z, gamma| tv.prox(z, gamma, &mut tv_state),
        |v| ball.project(v, &mut ball_state),
        objective,
        |x| ball.residual(x),
        x0,
        config,
    )?;
    let stopped = report.converged || report.iterations < config.max_iters;
    if ball.is_feasible(&x) {
        return Ok((x, report));
    }
    // Inner projections are inexact; finish on the constraint set.
    let mut polished = x;
    let mut state = BallDual::default();
    for _ in 0..POLISH_ROUNDS {
        polished = ball.project_with(&polished, &mut state, 10 * config.ball_iters.max(1))?;
        if ball.is_feasible(&polished) {
            break;
        }
    }
    report.residual = ball.residual(&polished);
    report.objective = objective(&polished);
    report.converged = stopped && ball.is_feasible(&polished);
    Ok((polished, report))
}

/// `20 log₁₀(‖x̂‖ / ‖x̂* − x̂‖)`; `+∞` on exact recovery.
pub fn snr_harmonic(truth: &HarmonicCoeffs, recovered: &HarmonicCoeffs) -> Result<f64> {
    if truth.bandlimit() != recovered.bandlimit() {
        return Err(Error::DimensionMismatch {
            expected: truth.values().len(),
            found: recovered.values().len(),
        });
    }
    let err: Vec<Complex64> = truth
        .values()
        .iter()
        .zip(recovered.values())
        .map(|(a, b)| b - a)
        .collect();
    let e = norm_c(&err);
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * libm::log10(norm_c(truth.values()) / e))
}

/// `10 log₁₀(xᵀQx / (x* − x)ᵀQ(x* − x))`.
pub fn snr_image(
    truth: &SphereImage,
    recovered: &SphereImage,
    weights: &QuadratureWeights,
) -> Result<f64> {
    let grid = truth.grid();
    recovered.check_grid(&grid)?;
    let err = SphereImage::from_samples(
        &grid,
        truth
            .samples()
            .iter()
            .zip(recovered.samples())
            .map(|(a, b)| (b - a) * (b - a))
            .collect(),
    )?;
    let energy = truth.map(|v| v * v);
    let e = crate::grid::integrate(&err, weights)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * libm::log10(crate::grid::integrate(&energy, weights)? / e))
}

/// A real map on a regular latitude-longitude lattice, row 0 at the North
/// pole, cell-centred in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedMap {
    pub n_lat: usize,
    pub n_lon: usize,
    pub values: Vec<f64>,
}

impl GriddedMap {
    pub fn new(n_lat: usize, n_lon: usize, values: Vec<f64>) -> Result<Self> {
        if n_lat == 0 || n_lon == 0 {
            return Err(Error::InvalidParameter(
                "gridded map needs at least one cell".into(),
            ));
        }
        if values.len() != n_lat * n_lon {
            return Err(Error::DimensionMismatch {
                expected: n_lat * n_lon,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gridded map"));
        }
        Ok(Self {
            n_lat,
            n_lon,
            values,
        })
    }

    /// Nearest-cell lookup at `(θ, φ)`.
    pub fn sample(&self, theta: f64, phi: f64) -> f64 {
        let i = ((theta / PI) * self.n_lat as f64) as usize;
        let j = ((phi.rem_euclid(2.0 * PI) / (2.0 * PI)) * self.n_lon as f64) as usize;
        self.values[i.min(self.n_lat - 1) * self.n_lon + j.min(self.n_lon - 1)]
    }

    pub fn resample(&self, grid: &SphereGrid) -> SphereImage {
        let mut samples = Vec::with_capacity(grid.n_samples());
        for &theta in grid.thetas() {
            for &phi in grid.phis() {
                samples.push(self.sample(theta, phi));
            }
        }
        SphereImage::from_samples(grid, samples).expect("one sample per grid point")
    }
}

fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let s = libm::sin(theta);
    [s * libm::cos(phi), s * libm::sin(phi), libm::cos(theta)]
}

/// Sum of `n_caps` spherical caps with random centres, radii and heights.
pub fn random_caps_map(grid: &SphereGrid, n_caps: usize, seed: u64) -> SphereImage {
    let mut rng = SeededRng::new(seed);
    let caps: Vec<([f64; 3], f64, f64)> = (0..n_caps)
        .map(|_| {
            let z: f64 = 2.0 * rng.uniform() - 1.0;
            let centre = unit_vector(libm::acos(z), 2.0 * PI * rng.uniform());
            let radius = 0.25 + 0.6 * rng.uniform();
            let height = 0.5 + rng.uniform();
            (centre, libm::cos(radius), height)
        })
        .collect();
    let mut samples = Vec::with_capacity(grid.n_samples());
    for &theta in grid.thetas() {
        for &phi in grid.phis() {
            let u = unit_vector(theta, phi);
            let v: f64 = caps
                .iter()
                .filter(|(c, cos_r, _)| u[0] * c[0] + u[1] * c[1] + u[2] * c[2] >= *cos_r)
                .map(|(_, _, h)| h)
                .sum();
            samples.push(v);
        }
    }
    SphereImage::from_samples(grid, samples).expect("one sample per grid point")
}

/// Random field with angular power `∝ ℓ^{-slope}`, clipped to a constant
/// below the midpoint of its range; a stand-in for a topographic map.
pub fn topography_map(
    transform: &dyn HarmonicTransform,
    slope: f64,
    seed: u64,
) -> Result<SphereImage> {
    let bandlimit = transform.bandlimit();
    let mut rng = SeededRng::new(seed);
    let mut half = HalfCoeffs::zeros(bandlimit);
    let mut values = half.clone().into_values();
    for l in 1..bandlimit {
        let amp = libm::pow(l as f64, -slope / 2.0);
        values[half_index(l, 0)] = Complex64::new(amp * rng.normal(), 0.0);
        for m in 1..=l {
            let s = amp / core::f64::consts::SQRT_2;
            values[half_index(l, m)] = Complex64::new(s * rng.normal(), s * rng.normal());
        }
    }
    half = HalfCoeffs::from_values(bandlimit, values)?;
    let field = transform.inverse(&extend_unchecked(&half))?.re();
    let (lo, hi) = min_max(field.samples());
    if !(hi > lo) {
        return Err(Error::DegenerateMap);
    }
    let mid = 0.5 * (lo + hi);
    Ok(field.map(|&v| if v < mid { mid } else { v }))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Ground truth shared by every scheme: one coefficient vector.
#[derive(Debug, Clone)]
pub struct TestImage {
    pub coeffs: HarmonicCoeffs,
    /// The thresholded `{0, 1}` map before smoothing, on the base grid.
    pub binary: SphereImage,
}

impl TestImage {
    /// Synthesis of the truth on a transform's grid.
    pub fn image(&self, transform: &dyn HarmonicTransform) -> Result<SphereImage> {
        Ok(transform.inverse(&self.coeffs)?.re())
    }
}

/// Thresholds `base` at the midpoint of its range to `{0, 1}`, transforms
/// with `transform`, and smooths by `exp(−ℓ² σ_s)`.
pub fn make_test_image(
    base: &SphereImage,
    transform: &dyn HarmonicTransform,
    sigma_s: f64,
) -> Result<TestImage> {
    base.check_grid(transform.grid())?;
    if !base.is_finite() {
        return Err(Error::NonFinite("base map"));
    }
    if !(sigma_s >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "smoothing scale must be non-negative, got {sigma_s}"
        )));
    }
    let (lo, hi) = min_max(base.samples());
    if !(hi > lo) {
        return Err(Error::DegenerateMap);
    }
    let mid = 0.5 * (lo + hi);
    let binary = base.map(|&v| if v > mid { 1.0 } else { 0.0 });
    let raw = transform.forward_real(&binary)?;
    let bandlimit = transform.bandlimit();
    let mut half = Vec::with_capacity(HalfCoeffs::len_for(bandlimit));
    for l in 0..bandlimit {
        let g = libm::exp(-((l * l) as f64) * sigma_s);
        half.push(Complex64::new(raw.get(l, 0).re * g, 0.0));
        for m in 1..=l {
            half.push(raw.get(l, m as i64) * g);
        }
    }
    let coeffs = extend_unchecked(&HalfCoeffs::from_values(bandlimit, half)?);
    Ok(TestImage { coeffs, binary })
}

/// Measurement count for a ratio `M / L²`.
pub fn measurement_count(ratio: f64, bandlimit: usize) -> usize {
    libm::round(ratio * (bandlimit * bandlimit) as f64) as usize
}

/// One cell entry of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub scheme: SamplingScheme,
    pub domain: Domain,
    pub ratio: f64,
    pub ratio_index: usize,
    pub trial: usize,
    pub sigma_n: f64,
    pub alpha: f64,
    pub master_seed: u64,
}

impl TrialSpec {
    pub fn seed(&self) -> u64 {
        let scheme = match self.scheme {
            SamplingScheme::Mw => 0,
            SamplingScheme::Dh => 1,
        };
        let domain = match self.domain {
            Domain::Spatial => 0,
            Domain::Harmonic => 1,
        };
        derive_seed(
            self.master_seed,
            &[scheme, domain, self.ratio_index as u64, self.trial as u64],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub m: usize,
    pub epsilon: f64,
    pub snr_db: f64,
    pub report: SolverReport,
    pub tv_solution: f64,
    pub tv_truth: f64,
    /// Whether the ground truth itself satisfies the data constraint.
    pub truth_feasible: bool,
    /// The recovered image on the transform's grid.
    pub image: SphereImage,
}

struct Solved {
    m: usize,
    epsilon: f64,
    coeffs: HarmonicCoeffs,
    image: SphereImage,
    report: SolverReport,
    tv_truth: f64,
    truth_feasible: bool,
}

fn solve_trial(
    truth_image: &SphereImage,
    transform: &dyn HarmonicTransform,
    spec: &TrialSpec,
    solver: &SolverConfig,
) -> Result<Solved> {
    let grid = transform.grid().clone();
    if grid.scheme() != spec.scheme {
        return Err(Error::GridMismatch {
            expected: String::from(spec.scheme.name()),
            found: format!("{}", grid.scheme()),
        });
    }
    truth_image.check_grid(&grid)?;
    let seed = spec.seed();
    let m = measurement_count(spec.ratio, transform.bandlimit());
    let mask = random_mask(&grid, m, derive_seed(seed, &[0]))?;
    let clean = apply_mask(&mask, truth_image)?;
    let y = add_noise(&clean, spec.sigma_n, derive_seed(seed, &[1]));
    let epsilon = chi2_epsilon(spec.sigma_n, m, spec.alpha)?;
    let truth_feasible = dist(&y, &clean) <= epsilon;
    let config = SolverConfig {
        epsilon,
        seed: derive_seed(seed, &[2]),
        ..*solver
    };

    let weights = QuadratureWeights::new(&grid);
    let gradient = WeightedGradient::new(&grid, &weights)?;
    let tv_truth = gradient.tv_norm(truth_image.samples())?;
    let (coeffs, image, report) = match spec.domain {
        Domain::Spatial => {
            let s = solve_spatial(&y, &mask, transform, &config)?;
            (s.coeffs, s.image, s.report)
        }
        Domain::Harmonic => {
            let s = solve_harmonic(&y, &mask, transform, &config)?;
            (s.coeffs, s.image, s.report)
        }
    };
    Ok(Solved {
        m,
        epsilon,
        coeffs,
        image,
        report,
        tv_truth,
        truth_feasible,
    })
}

/// Draws the mask and noise for `spec`, solves, and scores against `truth`
/// in harmonic space.
pub fn run_trial(
    truth: &HarmonicCoeffs,
    transform: &dyn HarmonicTransform,
    spec: &TrialSpec,
    solver: &SolverConfig,
) -> Result<TrialOutcome> {
    let truth_image = transform.inverse(truth)?.re();
    let s = solve_trial(&truth_image, transform, spec, solver)?;
    Ok(TrialOutcome {
        m: s.m,
        epsilon: s.epsilon,
        snr_db: snr_harmonic(truth, &s.coeffs)?,
        tv_solution: s.report.objective,
        report: s.report,
        tv_truth: s.tv_truth,
        truth_feasible: s.truth_feasible,
        image: s.image,
    })
}

/// As [`run_trial`] for a truth given by samples (not necessarily
/// band-limited); scored by the weighted image SNR.
pub fn run_image_trial(
    truth: &SphereImage,
    transform: &dyn HarmonicTransform,
    spec: &TrialSpec,
    solver: &SolverConfig,
) -> Result<TrialOutcome> {
    let s = solve_trial(truth, transform, spec, solver)?;
    let weights = QuadratureWeights::new(transform.grid());
    let snr_db = snr_image(truth, &s.image, &weights)?;
    Ok(TrialOutcome {
        m: s.m,
        epsilon: s.epsilon,
        snr_db,
        tv_solution: s.report.objective,
        report: s.report,
        tv_truth: s.tv_truth,
        truth_feasible: s.truth_feasible,
        image: s.image,
    })
}

/// `‖v‖₂` of a sample image; convenience for reports.
pub fn image_norm(x: &SphereImage) -> f64 {
    norm(x.samples())
}
