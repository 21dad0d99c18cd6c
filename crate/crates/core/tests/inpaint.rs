mod common;

use common::{random_real_coeffs, random_vec};
use proptest::prelude::*;
use spheretv_core::gradient::WeightedGradient;
use spheretv_core::grid::integrate;
use spheretv_core::inpaint::*;
use spheretv_core::prox::SolverConfig;
use spheretv_core::rng::SeededRng;
use spheretv_core::{
    Complex64, DhTransform, HalfCoeffs, HarmonicCoeffs, HarmonicTransform, MwTransform,
    QuadratureWeights, SamplingScheme, SphereGrid, SphereImage,
};

#[test]
fn mask_draws() {
    let g = SphereGrid::new(SamplingScheme::Mw, 32).unwrap();
    let a = random_mask(&g, 512, 5).unwrap();
    assert_eq!(a.m(), 512);
    assert!(a.indices().windows(2).all(|w| w[0] < w[1]));
    assert_eq!(a, random_mask(&g, 512, 5).unwrap());
    assert_eq!(measurement_count(0.5, 32), 512);

    let full = random_mask(&g, g.distinct_count(), 1).unwrap();
    assert_eq!(full.indices(), g.distinct_indices().as_slice());
    assert_eq!(random_mask(&g, 0, 1).unwrap().m(), 0);
    assert!(random_mask(&g, g.distinct_count() + 1, 1).is_err());
    assert!(MeasurementOp::new(&g, vec![g.n_samples() - 1]).is_err());
}

#[test]
fn mask_and_adjoint() {
    let mut rng = SeededRng::new(2);
    let g = SphereGrid::new(SamplingScheme::Dh, 8).unwrap();
    let op = random_mask(&g, 40, 9).unwrap();
    for _ in 0..100 {
        let x = SphereImage::from_samples(&g, random_vec(g.n_samples(), &mut rng)).unwrap();
        let y = random_vec(40, &mut rng);
        let lhs: f64 = apply_mask(&op, &x)
            .unwrap()
            .iter()
            .zip(&y)
            .map(|(a, b)| a * b)
            .sum();
        let back = mask_adjoint(&op, &y, &g).unwrap();
        let rhs: f64 = x
            .samples()
            .iter()
            .zip(back.samples())
            .map(|(a, b)| a * b)
            .sum();
        assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
    let ones = SphereImage::from_samples(&g, vec![1.0; g.n_samples()]).unwrap();
    let ind = mask_adjoint(&op, &apply_mask(&op, &ones).unwrap(), &g).unwrap();
    for (i, &v) in ind.samples().iter().enumerate() {
        assert_eq!(v, if op.indices().contains(&i) { 1.0 } else { 0.0 });
    }
    // One unit entry per row of the dense operator.
    for row in 0..op.m() {
        let mut e = vec![0.0; op.m()];
        e[row] = 1.0;
        let col = op.scatter(&e);
        assert_eq!(col.iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(col.iter().filter(|&&v| v != 0.0).count(), 1);
    }
    let x = SphereImage::from_samples(&g, random_vec(g.n_samples(), &mut rng)).unwrap();
    let full = random_mask(&g, g.distinct_count(), 0).unwrap();
    assert_eq!(apply_mask(&full, &x).unwrap(), x.samples());
}

#[test]
fn noise_statistics() {
    let y = vec![0.0; 1_000_000];
    let sigma = 0.01;
    let noisy = add_noise(&y, sigma, 77);
    let mean = noisy.iter().sum::<f64>() / noisy.len() as f64;
    let var = noisy.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (noisy.len() - 1) as f64;
    assert!(
        (var / (sigma * sigma) - 1.0).abs() < 0.01,
        "variance ratio {}",
        var / (sigma * sigma)
    );
    assert_eq!(noisy, add_noise(&y, sigma, 77));
    let clean = vec![1.0, 2.0];
    assert_eq!(add_noise(&clean, 0.0, 3), clean);
}

#[test]
fn snr_formulas() {
    let mut rng = SeededRng::new(3);
    let truth = random_real_coeffs(6, &mut rng);
    assert_eq!(snr_harmonic(&truth, &truth).unwrap(), f64::INFINITY);
    assert!(
        snr_harmonic(&truth, &HarmonicCoeffs::zeros(6))
            .unwrap()
            .abs()
            < 1e-12
    );
    let e = random_real_coeffs(6, &mut rng);
    let s = 0.1 * truth.norm() / e.norm();
    let off: Vec<Complex64> = truth
        .values()
        .iter()
        .zip(e.values())
        .map(|(a, b)| a + b * s)
        .collect();
    let off = HarmonicCoeffs::from_values(6, off).unwrap();
    assert!((snr_harmonic(&truth, &off).unwrap() - 20.0).abs() < 1e-10);

    let t = MwTransform::new(6).unwrap();
    let q = QuadratureWeights::new(t.grid());
    let x = t.inverse(&truth).unwrap().re();
    assert_eq!(snr_image(&x, &x, &q).unwrap(), f64::INFINITY);
    let d = t.inverse(&e).unwrap().re();
    let energy = integrate(&x.map(|v| v * v), &q).unwrap();
    let err = integrate(&d.map(|v| v * v), &q).unwrap();
    let k = (0.01 * energy / err).sqrt();
    let y = SphereImage::from_samples(
        t.grid(),
        x.samples()
            .iter()
            .zip(d.samples())
            .map(|(a, b)| a + k * b)
            .collect(),
    )
    .unwrap();
    assert!((snr_image(&x, &y, &q).unwrap() - 20.0).abs() < 1e-9);
}

fn noiseless_full(scheme: SamplingScheme, domain: Domain, l: usize) -> f64 {
    let t: Box<dyn HarmonicTransform> = match scheme {
        SamplingScheme::Mw => Box::new(MwTransform::new(l).unwrap()),
        SamplingScheme::Dh => Box::new(DhTransform::new(l).unwrap()),
    };
    let truth = random_real_coeffs(l, &mut SeededRng::new(4));
    let x = t.inverse(&truth).unwrap().re();
    let mask = random_mask(t.grid(), t.grid().distinct_count(), 1).unwrap();
    let y = apply_mask(&mask, &x).unwrap();
    let config = SolverConfig::default();
    match domain {
        Domain::Spatial => {
            let s = solve_spatial(&y, &mask, t.as_ref(), &config).unwrap();
            assert!(s.report.residual <= 1e-9);
            let bl = t.band_limit(&s.image).unwrap();
            let d = bl
                .samples()
                .iter()
                .zip(s.image.samples())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(d <= 1e-9);
            snr_harmonic(&truth, &s.coeffs).unwrap()
        }
        Domain::Harmonic => {
            let s = solve_harmonic(&y, &mask, t.as_ref(), &config).unwrap();
            assert_eq!(s.half.values().len(), l * (l + 1) / 2);
            assert!(t.inverse(&s.coeffs).unwrap().max_abs_imag() <= 1e-10);
            snr_harmonic(&truth, &s.coeffs).unwrap()
        }
    }
}

#[test]
fn noiseless_full_sampling_recovers_truth() {
    for (scheme, domain, l) in [
        (SamplingScheme::Mw, Domain::Spatial, 8),
        (SamplingScheme::Mw, Domain::Harmonic, 8),
        (SamplingScheme::Mw, Domain::Harmonic, 4),
        (SamplingScheme::Dh, Domain::Spatial, 6),
    ] {
        let snr = noiseless_full(scheme, domain, l);
        assert!(snr >= 80.0, "{scheme} {domain} L={l}: {snr} dB");
    }
}

#[test]
fn test_image_recipe() {
    let t = MwTransform::new(32).unwrap();
    let base = random_caps_map(t.grid(), 5, 7);
    let img = make_test_image(&base, &t, 0.002).unwrap();
    assert!(img.binary.samples().iter().all(|&v| v == 0.0 || v == 1.0));
    assert!(img.coeffs.conjugate_symmetry_error() < 1e-12);
    let x = img.image(&t).unwrap();
    let back = t.band_limit(&x).unwrap();
    let d = back
        .samples()
        .iter()
        .zip(x.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(d < 1e-10);
    let q = QuadratureWeights::new(t.grid());
    let w = WeightedGradient::new(t.grid(), &q).unwrap();
    assert!(w.tv_norm(x.samples()).unwrap() < w.tv_norm(img.binary.samples()).unwrap());

    let flat = make_test_image(&base, &t, 1e6).unwrap().image(&t).unwrap();
    let (lo, hi) = flat
        .samples()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    assert!(hi - lo < 1e-10);

    let constant = SphereImage::from_samples(t.grid(), vec![2.0; t.grid().n_samples()]).unwrap();
    assert!(make_test_image(&constant, &t, 0.002).is_err());
}

#[test]
fn gridded_map_ingestion() {
    let map = GriddedMap::new(2, 4, vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
    let g = SphereGrid::new(SamplingScheme::Dh, 4).unwrap();
    let x = map.resample(&g);
    for t in 0..g.n_theta() {
        let want = if g.thetas()[t] < std::f64::consts::FRAC_PI_2 {
            1.0
        } else {
            0.0
        };
        assert!((0..g.n_phi()).all(|p| *x.get(t, p) == want));
    }
    assert!(GriddedMap::new(2, 2, vec![0.0; 3]).is_err());
    assert!(GriddedMap::new(1, 1, vec![f64::NAN]).is_err());
}

#[test]
fn topography_is_clipped_below_midpoint() {
    let t = MwTransform::new(16).unwrap();
    let x = topography_map(&t, 2.0, 3).unwrap();
    let lo = x.samples().iter().cloned().fold(f64::INFINITY, f64::min);
    let at_floor = x.samples().iter().filter(|&&v| v == lo).count();
    assert!(at_floor > x.samples().len() / 10);
}

#[test]
fn noisy_trial_is_feasible_and_deterministic() {
    let t = MwTransform::new(8).unwrap();
    let base = random_caps_map(t.grid(), 5, 7);
    let truth = make_test_image(&base, &t, 0.002).unwrap();
    for domain in [Domain::Spatial, Domain::Harmonic] {
        let spec = TrialSpec {
            scheme: SamplingScheme::Mw,
            domain,
            ratio: 1.0,
            ratio_index: 0,
            trial: 0,
            sigma_n: 0.01,
            alpha: 0.99,
            master_seed: 42,
        };
        let a = run_trial(&truth.coeffs, &t, &spec, &SolverConfig::default()).unwrap();
        assert_eq!(a.m, 64);
        assert!(a.report.residual <= a.epsilon * (1.0 + 1e-6));
        if a.truth_feasible {
            assert!(
                a.tv_solution <= 1.05 * a.tv_truth,
                "{domain}: {} vs {}",
                a.tv_solution,
                a.tv_truth
            );
        }
        let b = run_trial(&truth.coeffs, &t, &spec, &SolverConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = run_image_trial(
            &truth.image(&t).unwrap(),
            &t,
            &spec,
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(c.report, a.report);
    }
}

#[test]
fn trial_seeds_are_distinct_per_cell() {
    let base = TrialSpec {
        scheme: SamplingScheme::Mw,
        domain: Domain::Spatial,
        ratio: 0.5,
        ratio_index: 0,
        trial: 0,
        sigma_n: 0.01,
        alpha: 0.99,
        master_seed: 1,
    };
    let variants = [
        base,
        TrialSpec {
            scheme: SamplingScheme::Dh,
            ..base
        },
        TrialSpec {
            domain: Domain::Harmonic,
            ..base
        },
        TrialSpec {
            ratio_index: 1,
            ..base
        },
        TrialSpec { trial: 1, ..base },
        TrialSpec {
            master_seed: 2,
            ..base
        },
    ];
    let mut seeds: Vec<u64> = variants.iter().map(|s| s.seed()).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), variants.len());
}

#[test]
fn half_coefficient_count() {
    assert_eq!(HalfCoeffs::len_for(32), 32 * 33 / 2);
}

proptest! {
    #[test]
    fn masks_are_sorted_distinct_points(l in 1usize..24, dh in any::<bool>(), frac in 0.0f64..=1.0, seed in any::<u64>()) {
        let scheme = if dh { SamplingScheme::Dh } else { SamplingScheme::Mw };
        let g = SphereGrid::new(scheme, l).unwrap();
        let m = (frac * g.distinct_count() as f64) as usize;
        let op = random_mask(&g, m, seed).unwrap();
        prop_assert_eq!(op.m(), m);
        prop_assert!(op.indices().windows(2).all(|w| w[0] < w[1]));
        prop_assert!(op.indices().iter().all(|&i| i < g.distinct_count()));
        prop_assert_eq!(op, random_mask(&g, m, seed).unwrap());
    }

    #[test]
    fn snr_is_scale_invariant(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut rng = SeededRng::new(seed);
        let a = random_real_coeffs(5, &mut rng);
        let b = random_real_coeffs(5, &mut rng);
        let s = |c: &HarmonicCoeffs| {
            HarmonicCoeffs::from_values(5, c.values().iter().map(|v| v * scale).collect()).unwrap()
        };
        let base = snr_harmonic(&a, &b).unwrap();
        prop_assert!((snr_harmonic(&s(&a), &s(&b)).unwrap() - base).abs() < 1e-9);
    }
}
