use predint_core::boot::{parametric_bootstrap, BootstrapBatch, SampleShape};
use predint_core::dist::Kernel;
use predint_core::fit::{fit_ml, Family, FitResult, Sample};
use predint_core::gpq::{
    gpq_bootstrap_bound, gpq_bound_from_batch, gpq_predictive_cdf, gpq_transform,
    normal_exact_bound,
};
use predint_core::predict::{calibration_predictive_cdf, Side};
use predint_core::rng::RngPolicy;
use predint_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synthetic_fit(kernel: Kernel) -> FitResult {
    FitResult { kernel, loglik: 0.0, converged: true, iterations: 0, gradient_norm: 0.0 }
}

fn identity_batch(kernel: Kernel, b: usize) -> BootstrapBatch {
    BootstrapBatch {
        replicates: b as u32,
        estimates: vec![kernel; b],
        replicate_indices: (0..b as u64).collect(),
        u_values: None,
        failures: 0,
    }
}

fn draw_sample(kernel: Kernel, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    kernel.draw_vec(&mut rng, count).unwrap()
}

#[test]
fn transform_fixtures() {
    let id = gpq_transform((0.0, 1.0), (0.0, 1.0)).unwrap();
    assert_eq!((id.mu_ss, id.sigma_ss), (0.0, 1.0));

    let shifted = gpq_transform((1.0, 2.0), (0.0, 1.0)).unwrap();
    assert_eq!((shifted.mu_ss, shifted.sigma_ss), (3.0, 4.0));

    let scaled = gpq_transform((0.0, 1.0), (0.5, 2.0)).unwrap();
    assert_eq!((scaled.mu_ss, scaled.sigma_ss), (-0.25, 0.5));

    assert!(matches!(
        gpq_transform((0.0, 1.0), (0.0, 0.0)),
        Err(Error::DegenerateSample(_))
    ));
    assert!(matches!(
        gpq_transform((0.0, 0.0), (0.0, 1.0)),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn transform_fixes_identity_estimates_bit_for_bit() {
    for (mu, sigma) in [(0.1, 0.3), (-7.25, 1.9e-3), (3.0e8, 42.0)] {
        let draw = gpq_transform((mu, sigma), (mu, sigma)).unwrap();
        assert_eq!(draw.mu_ss.to_bits(), mu.to_bits());
        assert_eq!(draw.sigma_ss.to_bits(), sigma.to_bits());
    }
}

#[test]
fn identity_batch_collapses_to_the_plugin_cdf() {
    let fit = synthetic_fit(Kernel::Normal { location: 2.0, scale: 0.8 });
    let cdf = gpq_predictive_cdf(&fit, &identity_batch(fit.kernel, 64)).unwrap();
    for i in -30..=30 {
        let y = 2.0 + 0.2 * i as f64;
        assert_eq!(cdf.evaluate(y).to_bits(), fit.kernel.cdf(y).to_bits());
    }
    assert_eq!(cdf.provenance(), "gpq_bootstrap");
}

#[test]
fn gpq_and_calibration_cdfs_agree_pointwise() {
    let cases = [
        (Family::Normal, Kernel::Normal { location: 4.0, scale: 2.0 }, 300usize, 0x69D0u64),
        (Family::Sev, Kernel::Sev { location: -1.0, scale: 0.7 }, 200, 0x69D1),
    ];
    for (family, truth, b, seed) in cases {
        let xs = draw_sample(truth, 12, seed);
        let sample = Sample::complete(xs).unwrap();
        let fit = fit_ml(family, &sample).unwrap();
        let policy = RngPolicy::new(seed ^ 0xFFFF);
        let batch =
            parametric_bootstrap(&fit, SampleShape::of(&sample), b as u32, &policy).unwrap();
        let gpq = gpq_predictive_cdf(&fit, &batch).unwrap();
        let calibration = calibration_predictive_cdf(&fit, &batch).unwrap();

        let lo = fit.kernel.quantile(1e-4).unwrap();
        let hi = fit.kernel.quantile(1.0 - 1e-4).unwrap();
        let mut worst = 0.0f64;
        for i in 0..=1000 {
            let y = lo + (hi - lo) * i as f64 / 1000.0;
            worst = worst.max((gpq.evaluate(y) - calibration.evaluate(y)).abs());
        }
        assert!(
            worst <= 1e-12,
            "{}: GPQ and calibration cdfs disagree by {worst:e}",
            family.name()
        );
    }
}

#[test]
fn gpq_quantile_tracks_the_exact_t_interval() {
    let n = 10usize;
    let xs = draw_sample(Kernel::Normal { location: 10.0, scale: 3.0 }, n, 0x69D2);
    let sample = Sample::complete(xs).unwrap();
    let fit = fit_ml(Family::Normal, &sample).unwrap();
    let (xbar, sigma_hat) = fit.kernel.loc_scale().map(|(_, m, s)| (m, s)).unwrap();
    let policy = RngPolicy::new(0x69D3);
    let batch = parametric_bootstrap(&fit, SampleShape::of(&sample), 5000, &policy).unwrap();
    let cdf = gpq_predictive_cdf(&fit, &batch).unwrap();
    let endpoint = cdf.quantile(0.95).unwrap();

    let nf = n as f64;
    let s = sigma_hat * (nf / (nf - 1.0)).sqrt();
    let t95 = Kernel::StudentT { df: nf - 1.0 }.quantile(0.95).unwrap();
    let exact = xbar + t95 * s * (1.0 + 1.0 / nf).sqrt();
    assert!(
        (endpoint - exact).abs() <= 0.02 * sigma_hat,
        "GPQ 0.95 quantile {endpoint} vs exact bound {exact}"
    );

    let bound = gpq_bound_from_batch(&fit, &batch, 0.05, Side::Upper).unwrap();
    assert!((bound.endpoint - endpoint).abs() <= 1e-9);
    assert_eq!(bound.method, "gpq_bootstrap");
}

#[test]
fn gpq_bounds_are_affine_equivariant_with_paired_seeds() {
    let policy = RngPolicy::new(0x69D4);
    let (a, b) = (5.0, 3.0);
    let base = draw_sample(Kernel::Normal { location: 0.5, scale: 1.1 }, 12, 0x69D5);
    let moved: Vec<f64> = base.iter().map(|x| a + b * x).collect();

    let cases: [(Family, Option<usize>); 2] = [(Family::Normal, None), (Family::Sev, Some(8))];
    for (family, events) in cases {
        let make = |values: Vec<f64>| match events {
            None => Sample::complete(values).unwrap(),
            Some(r) => Sample::type2(values, r).unwrap(),
        };
        let sample_x = make(base.clone());
        let sample_y = make(moved.clone());
        let fit_x = fit_ml(family, &sample_x).unwrap();
        let fit_y = fit_ml(family, &sample_y).unwrap();
        let bound_x = gpq_bootstrap_bound(&sample_x, &fit_x, 400, 0.05, Side::Upper, &policy).unwrap();
        let bound_y = gpq_bootstrap_bound(&sample_y, &fit_y, 400, 0.05, Side::Upper, &policy).unwrap();
        let transported = a + b * bound_x.endpoint;
        assert!(
            (bound_y.endpoint - transported).abs() <= 1e-10 * (1.0 + transported.abs()),
            "{}: endpoint {} vs transported {transported}",
            family.name(),
            bound_y.endpoint
        );
    }
}

#[test]
fn censoring_every_unit_reproduces_the_complete_path_bit_for_bit() {
    let xs = draw_sample(Kernel::Sev { location: 2.0, scale: 0.9 }, 10, 0x69D6);
    let policy = RngPolicy::new(0x69D7);

    let complete = Sample::complete(xs.clone()).unwrap();
    let censored = Sample::type2(xs, 10).unwrap();
    let fit_c = fit_ml(Family::Sev, &complete).unwrap();
    let fit_t = fit_ml(Family::Sev, &censored).unwrap();
    let (mc, sc) = fit_c.kernel.loc_scale().map(|(_, m, s)| (m, s)).unwrap();
    let (mt, st) = fit_t.kernel.loc_scale().map(|(_, m, s)| (m, s)).unwrap();
    assert_eq!(mc.to_bits(), mt.to_bits());
    assert_eq!(sc.to_bits(), st.to_bits());

    let bound_c = gpq_bootstrap_bound(&complete, &fit_c, 200, 0.1, Side::Upper, &policy).unwrap();
    let bound_t = gpq_bootstrap_bound(&censored, &fit_t, 200, 0.1, Side::Upper, &policy).unwrap();
    assert_eq!(bound_c.endpoint.to_bits(), bound_t.endpoint.to_bits());
}

#[test]
fn exact_normal_bound_median_is_the_sample_mean() {
    let sample = Sample::complete(vec![3.0, 5.0, 8.0, 9.5]).unwrap();
    let bound = normal_exact_bound(&sample, 0.5, Side::Upper).unwrap();
    let mean = (3.0 + 5.0 + 8.0 + 9.5) / 4.0f64;
    assert_eq!(bound.endpoint.to_bits(), mean.to_bits());
    assert_eq!(bound.method, "normal_exact");
}

#[test]
fn exact_normal_bound_matches_the_cauchy_identity_at_two_points() {
    let sample = Sample::complete(vec![-1.0, 1.0]).unwrap();
    let bound = normal_exact_bound(&sample, 0.05, Side::Upper).unwrap();
    let t95 = (core::f64::consts::PI * 0.45).tan();
    let expected = t95 * 2.0f64.sqrt() * 1.5f64.sqrt();
    assert!(
        (bound.endpoint - expected).abs() <= 1e-10 * expected,
        "endpoint {} vs Cauchy-identity value {expected}",
        bound.endpoint
    );

    let lower = normal_exact_bound(&sample, 0.05, Side::Lower).unwrap();
    assert!((lower.endpoint + expected).abs() <= 1e-10 * expected);
}

#[test]
fn exact_normal_bound_has_exact_coverage() {
    let truth = Kernel::Normal { location: 7.0, scale: 2.0 };
    let mut rng = ChaCha8Rng::seed_from_u64(0x69D8);
    let reps = 100_000u32;
    let mut hits = 0u64;
    for _ in 0..reps {
        let values = truth.draw_vec(&mut rng, 10).unwrap();
        let sample = Sample::complete(values).unwrap();
        let bound = normal_exact_bound(&sample, 0.05, Side::Upper).unwrap();
        let y = truth.draw(&mut rng).unwrap();
        if y <= bound.endpoint {
            hits += 1;
        }
    }
    let coverage = hits as f64 / reps as f64;
    let band = 3.0 * (0.95 * 0.05 / reps as f64).sqrt();
    assert!(
        (coverage - 0.95).abs() <= band,
        "coverage {coverage} outside 0.95 +/- {band}"
    );
}

#[test]
fn invalid_gpq_requests_are_rejected() {
    let gamma = synthetic_fit(Kernel::Gamma { shape: 2.0, rate: 1.0 });
    let batch = identity_batch(Kernel::Normal { location: 0.0, scale: 1.0 }, 4);
    assert!(matches!(
        gpq_predictive_cdf(&gamma, &batch),
        Err(Error::UnsupportedFamily { family: "gamma", .. })
    ));

    let flat = Sample::complete(vec![4.0, 4.0, 4.0]).unwrap();
    assert!(matches!(
        normal_exact_bound(&flat, 0.05, Side::Upper),
        Err(Error::DegenerateSample(_))
    ));
    let censored = Sample::type2(vec![1.0, 2.0, 3.0, 4.0], 3).unwrap();
    assert!(matches!(
        normal_exact_bound(&censored, 0.05, Side::Upper),
        Err(Error::InvalidArgument(_))
    ));
    let sample = Sample::complete(vec![1.0, 2.0]).unwrap();
    assert!(matches!(
        normal_exact_bound(&sample, 1.5, Side::Upper),
        Err(Error::InvalidProbability { .. })
    ));
}
