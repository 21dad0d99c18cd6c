//! Proximity operators, operator norms and the Douglas-Rachford driver.
//!
//! Everything here works on real vectors. Complex unknowns are handled by the
//! caller through an interleaved `(re, im)` view, with adjoints taken under
//! the real inner product.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gradient::{GradientField, WeightedGradient};
use crate::harmonic::{south_pole_dirac, HarmonicTransform, MwTransform};
use crate::linalg::{axpy, dist, dot, norm};
use crate::rng::SeededRng;

pub type VecMap<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a>;

const ADJOINT_TOLERANCE: f64 = 1e-10;
const ADJOINT_TRIALS: usize = 5;
const NORM_SAFETY: f64 = 1.01;

/// A real linear map together with its transpose.
pub struct LinearOpPair<'a> {
    in_dim: usize,
    out_dim: usize,
    apply: VecMap<'a>,
    adjoint: VecMap<'a>,
}

impl core::fmt::Debug for LinearOpPair<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("LinearOpPair")
            .field("in_dim", &self.in_dim)
            .field("out_dim", &self.out_dim)
            .finish()
    }
}

impl<'a> LinearOpPair<'a> {
    /// Builds the pair and spot-checks `⟨Ax, y⟩ = ⟨x, Aᵀy⟩` on random vectors.
    pub fn new(
        in_dim: usize,
        out_dim: usize,
        apply: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a,
        adjoint: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a,
    ) -> Result<Self> {
        let op = Self::new_unchecked(in_dim, out_dim, apply, adjoint);
        let worst = op.adjoint_error(ADJOINT_TRIALS, 0x5EED)?;
        if worst > ADJOINT_TOLERANCE {
            return Err(Error::AdjointMismatch(worst));
        }
        Ok(op)
    }

    pub fn new_unchecked(
        in_dim: usize,
        out_dim: usize,
        apply: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a,
        adjoint: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'a,
    ) -> Self {
        Self {
            in_dim,
            out_dim,
            apply: Box::new(apply),
            adjoint: Box::new(adjoint),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked(n, n, |x| x.to_vec(), |y| y.to_vec())
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.in_dim, "operator input length");
        (self.apply)(x)
    }

    pub fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.out_dim, "operator adjoint input length");
        (self.adjoint)(y)
    }

    /// Largest relative violation of the adjoint identity over random pairs.
    pub fn adjoint_error(&self, trials: usize, seed: u64) -> Result<f64> {
        let mut rng = SeededRng::new(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let x: Vec<f64> = (0..self.in_dim).map(|_| rng.normal()).collect();
            let y: Vec<f64> = (0..self.out_dim).map(|_| rng.normal()).collect();
            let ax = self.apply(&x);
            let aty = self.adjoint(&y);
            if ax.len() != self.out_dim || aty.len() != self.in_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.out_dim,
                    found: ax.len(),
                });
            }
            let lhs = dot(&ax, &y);
            let rhs = dot(&x, &aty);
            let scale = (norm(&ax) * norm(&y))
                .max(norm(&x) * norm(&aty))
                .max(f64::MIN_POSITIVE);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        Ok(worst)
    }
}

/// Power iteration on `AᵀA`; returns the estimate `‖A x_k‖` for unit `x_k`,
/// which never decreases with `iters`.
pub fn power_iteration_norm(op: &LinearOpPair<'_>, iters: usize, seed: u64) -> f64 {
    if op.in_dim() == 0 || op.out_dim() == 0 {
        return 0.0;
    }
    let mut rng = SeededRng::new(seed);
    let mut x: Vec<f64> = (0..op.in_dim()).map(|_| rng.normal()).collect();
    let n0 = norm(&x);
    x.iter_mut().for_each(|v| *v /= n0);
    let mut estimate = norm(&op.apply(&x));
    for _ in 0..iters {
        let y = op.adjoint(&op.apply(&x));
        let ny = norm(&y);
        if ny == 0.0 {
            break;
        }
        x = y.into_iter().map(|v| v / ny).collect();
        estimate = estimate.max(norm(&op.apply(&x)));
    }
    estimate
}

/// Power-iteration estimate scaled by the safety factor used for step sizes.
pub fn power_iteration_bound(op: &LinearOpPair<'_>, iters: usize, seed: u64) -> f64 {
    NORM_SAFETY * power_iteration_norm(op, iters, seed)
}

/// `‖Λ δ̂‖₂` over the stored MW lattice (pole ring repeated) for the
/// unit-norm band-limited Dirac on the South pole.
pub fn dirac_opnorm(bandlimit: usize) -> Result<f64> {
    dirac_opnorm_with(&MwTransform::new(bandlimit)?)
}

pub fn dirac_opnorm_with(transform: &MwTransform) -> Result<f64> {
    let image = transform.inverse(&south_pole_dirac(transform.bandlimit()))?;
    Ok(libm::sqrt(
        image.samples().iter().map(|z| z.norm_sqr()).sum(),
    ))
}

/// `x ↦ -∇̃ S x` flattened as `(ũ, ṽ)`, with transpose `g ↦ -Sᵀ ∇̃ᵀ g`.
pub fn tv_operator<'a>(
    synth: &'a LinearOpPair<'a>,
    gradient: &'a WeightedGradient,
) -> LinearOpPair<'a> {
    let (nt, np) = (gradient.grid().n_theta(), gradient.grid().n_phi());
    LinearOpPair::new_unchecked(
        synth.in_dim(),
        2 * nt * np,
        move |x| {
            let g = gradient
                .apply(&synth.apply(x))
                .expect("synthesis matches gradient grid");
            g.to_vec().into_iter().map(|v| -v).collect()
        },
        move |y| {
            let g = GradientField::from_vec(nt, np, y).expect("dual length matches grid");
            let x = gradient.adjoint(&g).expect("dual shape matches grid");
            synth.adjoint(&x).into_iter().map(|v| -v).collect()
        },
    )
}

/// Warm-start state of the TV dual.
#[derive(Debug, Clone, Default)]
pub struct TvDual(Option<Vec<f64>>);

/// `argmin_x ½‖x − z‖² + λ ‖S x‖_TV` by fast gradient projection on the dual.
pub struct TvProx<'a> {
    op: LinearOpPair<'a>,
    n_samples: usize,
    norm: f64,
    max_iters: usize,
    tol: f64,
}

impl<'a> TvProx<'a> {
    pub fn new(
        synth: &'a LinearOpPair<'a>,
        gradient: &'a WeightedGradient,
        max_iters: usize,
        seed: u64,
    ) -> Self {
        let op = tv_operator(synth, gradient);
        let norm = power_iteration_bound(&op, 50, seed);
        Self::with_norm(synth, gradient, max_iters, norm)
    }

    pub fn with_norm(
        synth: &'a LinearOpPair<'a>,
        gradient: &'a WeightedGradient,
        max_iters: usize,
        norm: f64,
    ) -> Self {
        let n_samples = gradient.grid().n_samples();
        Self {
            op: tv_operator(synth, gradient),
            n_samples,
            norm,
            max_iters,
            tol: 1e-6,
        }
    }

    /// Relative dual change below which the inner loop stops early.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn operator(&self) -> &LinearOpPair<'a> {
        &self.op
    }

    pub fn operator_norm(&self) -> f64 {
        self.norm
    }

    fn tv_of_flat(&self, g: &[f64]) -> f64 {
        let (u, v) = g.split_at(self.n_samples);
        u.iter().zip(v).map(|(a, b)| libm::hypot(*a, *b)).sum()
    }

    pub fn objective(&self, x: &[f64], z: &[f64], lambda: f64) -> f64 {
        let d = dist(x, z);
        0.5 * d * d + lambda * self.tv_of_flat(&self.op.apply(x))
    }

    pub fn prox(&self, z: &[f64], lambda: f64, state: &mut TvDual) -> Result<Vec<f64>> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "TV prox needs lambda > 0, got {lambda}"
            )));
        }
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("TV prox input"));
        }
        if self.norm == 0.0 {
            return Ok(z.to_vec());
        }
        let n = self.n_samples;
        let step = 1.0 / (lambda * self.norm * self.norm);

        let mut best = z.to_vec();
        let mut best_obj = lambda * self.tv_of_flat(&self.op.apply(z));

        let mut p = state
            .0
            .take()
            .filter(|p| p.len() == 2 * n)
            .unwrap_or_else(|| vec![0.0; 2 * n]);
        let mut r = p.clone();
        let mut t = 1.0;
        for _ in 0..self.max_iters {
            // x_r = z + λ Aᵀ r, and A x_r drives the dual step.
            let mut x = z.to_vec();
            axpy(lambda, &self.op.adjoint(&r), &mut x);
            let ax = self.op.apply(&x);
            let d = dist(&x, z);
            let obj = 0.5 * d * d + lambda * self.tv_of_flat(&ax);
            if obj < best_obj {
                best_obj = obj;
                best = x;
            }

            let mut next = r.clone();
            axpy(-step, &ax, &mut next);
            project_pairs(&mut next, n);

            let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t * t));
            let beta = (t - 1.0) / t_next;
            let change = dist(&next, &p);
            let size = norm(&next);
            r = next
                .iter()
                .zip(&p)
                .map(|(a, b)| a + beta * (a - b))
                .collect();
            p = next;
            t = t_next;
            if change <= self.tol * size.max(1e-300) {
                break;
            }
        }
        let mut x = z.to_vec();
        axpy(lambda, &self.op.adjoint(&p), &mut x);
        if self.objective(&x, z, lambda) < best_obj {
            best = x;
        }
        state.0 = Some(p);
        Ok(best)
    }
}

fn project_pairs(p: &mut [f64], n: usize) {
    let (u, v) = p.split_at_mut(n);
    for (a, b) in u.iter_mut().zip(v.iter_mut()) {
        let r = libm::hypot(*a, *b);
        if r > 1.0 {
            *a /= r;
            *b /= r;
        }
    }
}

/// Euclidean projection of `x` onto the ball `‖x − centre‖ ≤ radius`.
pub fn project_ball(x: &[f64], centre: &[f64], radius: f64) -> Vec<f64> {
    let d = dist(x, centre);
    if d <= radius || d == 0.0 {
        return x.to_vec();
    }
    let s = radius / d;
    x.iter().zip(centre).map(|(a, c)| c + (a - c) * s).collect()
}

/// Warm-start state of the data-ball dual.
#[derive(Debug, Clone, Default)]
pub struct BallDual(Option<Vec<f64>>);

/// Projection onto `{x : ‖y − A x‖₂ ≤ ε}`.
pub struct DataBall<'a> {
    op: &'a LinearOpPair<'a>,
    y: Vec<f64>,
    epsilon: f64,
    mu: f64,
    tight: bool,
    max_iters: usize,
    tol: f64,
}

impl<'a> DataBall<'a> {
    /// `norm` bounds `‖A‖`; the dual step is `1/norm²`.
    pub fn new(op: &'a LinearOpPair<'a>, y: Vec<f64>, epsilon: f64, norm: f64) -> Result<Self> {
        if y.len() != op.out_dim() {
            return Err(Error::DimensionMismatch {
                expected: op.out_dim(),
                found: y.len(),
            });
        }
        if !(epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be non-negative, got {epsilon}"
            )));
        }
        if op.out_dim() == 0 && norm_sq(&y) > epsilon * epsilon {
            return Err(Error::Infeasible(
                "no measurements but non-zero data".into(),
            ));
        }
        let mu = if norm > 0.0 { 1.0 / (norm * norm) } else { 1.0 };
        Ok(Self {
            op,
            y,
            epsilon,
            mu,
            tight: false,
            max_iters: 200,
            tol: 1e-8,
        })
    }

    /// For operators with `A Aᵀ = I` the projection is closed form.
    pub fn tight(op: &'a LinearOpPair<'a>, y: Vec<f64>, epsilon: f64) -> Result<Self> {
        let mut ball = Self::new(op, y, epsilon, 1.0)?;
        ball.tight = true;
        Ok(ball)
    }

    pub fn with_limits(mut self, max_iters: usize, tol: f64) -> Self {
        self.max_iters = max_iters;
        self.tol = tol;
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        dist(&self.op.apply(x), &self.y)
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.residual(x) <= self.epsilon * (1.0 + 1e-6) + 1e-12
    }

    pub fn project(&self, x0: &[f64], state: &mut BallDual) -> Result<Vec<f64>> {
        self.project_with(x0, state, self.max_iters)
    }

    /// Dual forward-backward: `x = x0 − Aᵀu`,
    /// `u ← v − μ P_B(v/μ)` with `v = u + μ A x`, accelerated.
    pub fn project_with(
        &self,
        x0: &[f64],
        state: &mut BallDual,
        max_iters: usize,
    ) -> Result<Vec<f64>> {
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data-ball projection input"));
        }
        let ax0 = self.op.apply(x0);
        if dist(&ax0, &self.y) <= self.epsilon {
            return Ok(x0.to_vec());
        }
        if self.tight {
            let target = project_ball(&ax0, &self.y, self.epsilon);
            let corr: Vec<f64> = ax0.iter().zip(&target).map(|(a, b)| a - b).collect();
            let mut x = x0.to_vec();
            axpy(-1.0, &self.op.adjoint(&corr), &mut x);
            return Ok(x);
        }
        let m = self.op.out_dim();
        let mu = self.mu;
        let mut u = state
            .0
            .take()
            .filter(|u| u.len() == m)
            .unwrap_or_else(|| vec![0.0; m]);
        let mut w = u.clone();
        let mut t = 1.0;
        for _ in 0..max_iters {
            let mut x = x0.to_vec();
            axpy(-1.0, &self.op.adjoint(&w), &mut x);
            let ax = self.op.apply(&x);
            let v: Vec<f64> = w.iter().zip(&ax).map(|(a, b)| a + mu * b).collect();
            let scaled: Vec<f64> = v.iter().map(|a| a / mu).collect();
            let pb = project_ball(&scaled, &self.y, self.epsilon);
            let next: Vec<f64> = v.iter().zip(&pb).map(|(a, b)| a - mu * b).collect();

            let t_next = 0.5 * (1.0 + libm::sqrt(1.0 + 4.0 * t * t));
            let beta = (t - 1.0) / t_next;
            let change = dist(&next, &u);
            let size = norm(&next);
            w = next
                .iter()
                .zip(&u)
                .map(|(a, b)| a + beta * (a - b))
                .collect();
            u = next;
            t = t_next;
            if change <= self.tol * size.max(1e-300) {
                break;
            }
        }
        let mut x = x0.to_vec();
        axpy(-1.0, &self.op.adjoint(&u), &mut x);
        state.0 = Some(u);
        Ok(x)
    }
}

fn norm_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct SolverConfig {
    pub gamma: f64,
    pub max_iters: usize,
    pub rel_obj_tol: f64,
    pub inner_prox_iters: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Iteration cap of the data-ball dual.
    pub ball_iters: usize,
    /// Relative dual change stopping the data-ball iterations.
    pub ball_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            max_iters: 500,
            rel_obj_tol: 1e-5,
            inner_prox_iters: 20,
            epsilon: 0.0,
            seed: 0,
            ball_iters: 20,
            ball_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if !(self.rel_obj_tol > 0.0) || !(self.ball_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if self.max_iters == 0 || self.inner_prox_iters == 0 {
            return Err(Error::InvalidParameter(
                "iteration counts must be at least one".into(),
            ));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverReport {
    pub iterations: usize,
    pub objective: f64,
    pub residual: f64,
    pub converged: bool,
    /// Filled in by callers that own a clock.
    pub wall_ms: f64,
}

/// Douglas-Rachford splitting for `min f(x) + g(x)` where `g` is the
/// indicator of a closed convex set:
///
/// ```text
/// x_n     = P_g(y_n)
/// y_{n+1} = y_n + prox_{γf}(2x_n − y_n) − x_n
/// ```
///
/// The returned point is always `x_n`, so it lies in the constraint set.
/// `feasible` is the caller's tolerance test for that set.
pub fn douglas_rachford(
    mut prox_f: impl FnMut(&[f64], f64) -> Result<Vec<f64>>,
    mut prox_g: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    objective: impl Fn(&[f64]) -> f64,
    residual: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    config: &SolverConfig,
) -> Result<(Vec<f64>, SolverReport)> {
    config.validate()?;
    let feasible_bound = config.epsilon * (1.0 + 1e-6) + 1e-12;
    let mut y = x0.to_vec();
    let mut x = prox_g(&y)?;
    let mut obj = objective(&x);
    let mut iterations = 0;
    let mut stopped = false;
    for n in 1..=config.max_iters {
        iterations = n;
        let reflected: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.0 * a - b).collect();
        let p = prox_f(&reflected, config.gamma)?;
        let mut step_size = 0.0;
        for ((yi, pi), xi) in y.iter_mut().zip(&p).zip(&x) {
            let d = pi - xi;
            *yi += d;
            step_size += d * d;
        }
        let next = prox_g(&y)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                iteration: n,
                reason: "non-finite iterate".into(),
            });
        }
        let next_obj = objective(&next);
        if !next_obj.is_finite() {
            return Err(Error::Diverged {
                iteration: n,
                reason: "non-finite objective".into(),
            });
        }
        let (step, size) = (libm::sqrt(step_size), norm(&y));
        let fixed = step.is_finite() && size.is_finite() && step <= 1e-12 * (1.0 + size);
        let rel = (next_obj - obj).abs() / next_obj.abs().max(f64::MIN_POSITIVE);
        x = next;
        let flat = rel <= config.rel_obj_tol || (next_obj == 0.0 && obj == 0.0);
        obj = next_obj;
        if fixed || flat {
            stopped = true;
            break;
        }
    }
    let res = residual(&x);
    let report = SolverReport {
        iterations,
        objective: obj,
        residual: res,
        converged: stopped && res <= feasible_bound,
        wall_ms: 0.0,
    };
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_norm_is_one() {
        let op = LinearOpPair::identity(10);
        assert!((power_iteration_norm(&op, 20, 1) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn diagonal_norm() {
        let d = [3.0, 1.0, 0.5];
        let op = LinearOpPair::new(
            3,
            3,
            move |x| x.iter().zip(d).map(|(a, b)| a * b).collect(),
            move |x| x.iter().zip(d).map(|(a, b)| a * b).collect(),
        )
        .unwrap();
        assert!((power_iteration_norm(&op, 100, 2) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn bad_adjoint_is_rejected() {
        let r = LinearOpPair::new(2, 2, |x| vec![x[0] + x[1], x[1]], |y| y.to_vec());
        assert!(matches!(r, Err(Error::AdjointMismatch(_))));
    }

    #[test]
    fn one_dimensional_constrained_problem() {
        let op = LinearOpPair::identity(1);
        let ball = DataBall::tight(&op, vec![3.0], 1.0).unwrap();
        let mut st = BallDual::default();
        let config = SolverConfig {
            epsilon: 1.0,
            ..SolverConfig::default()
        };
        let soft = |z: &[f64], g: f64| Ok(vec![z[0].signum() * (z[0].abs() - g).max(0.0)]);
        let (x, rep) = douglas_rachford(
            soft,
            |v| ball.project(v, &mut st),
            |x| x[0].abs(),
            |x| (x[0] - 3.0).abs(),
            &[0.0],
            &config,
        )
        .unwrap();
        assert!((x[0] - 2.0).abs() < 1e-6, "{x:?}");
        assert!(rep.converged);
    }

    #[test]
    fn identical_projections_stop_immediately() {
        let op = LinearOpPair::identity(3);
        let ball = DataBall::tight(&op, vec![0.0; 3], 2.0).unwrap();
        let (mut s1, mut s2) = (BallDual::default(), BallDual::default());
        let x0 = [0.5, -0.5, 1.0];
        let config = SolverConfig {
            epsilon: 2.0,
            ..SolverConfig::default()
        };
        let (x, rep) = douglas_rachford(
            |v, _| ball.project(v, &mut s1),
            |v| ball.project(v, &mut s2),
            |_| 0.0,
            norm,
            &x0,
            &config,
        )
        .unwrap();
        assert_eq!(x, x0);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn ball_projection_closed_form() {
        let x = [3.0, 4.0];
        assert_eq!(project_ball(&x, &[0.0, 0.0], 10.0), x);
        let p = project_ball(&x, &[0.0, 0.0], 1.0);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);
    }
}
