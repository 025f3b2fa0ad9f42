use ballapprox::deviation::{delta_s, Budgets, SphereMethod};
use ballapprox::experiment::{run_sweep, ExperimentConfig, Mode, RadiusPolicy};
use ballapprox::sampling::random_polytope;
use ballapprox::SeededStream;

#[test]
fn radial_and_uniform_estimators_agree() {
    for (n, pts, r) in [(2, 30, 0.99), (3, 200, 0.985), (4, 120, 0.95)] {
        let p = random_polytope(n, pts, 1.0, SeededStream::new(31, n as u64)).unwrap();
        let est = |method| {
            let b = Budgets { sphere_samples: 400_000, facet_samples: 400_000, volume_samples: 0, sphere_method: method };
            delta_s(n, r, &p, SeededStream::new(32, n as u64), &b).unwrap()
        };
        let (u, rad) = (est(SphereMethod::Uniform), est(SphereMethod::Radial));
        assert_eq!(rad.sphere_method, SphereMethod::Radial, "n={n}: radial fallback triggered");
        let sigma = (u.ds_stderr.powi(2) + rad.ds_stderr.powi(2)).sqrt();
        assert!((u.ds_mean - rad.ds_mean).abs() <= 3.0 * sigma, "n={n}: {} vs {} (σ {sigma})", u.ds_mean, rad.ds_mean);
        assert!(rad.ds_stderr < u.ds_stderr, "n={n}: radial should be the tighter estimator here");
    }
}

#[test]
fn sweep_time_grows_linearly_in_trials() {
    let cfg = |trials| ExperimentConfig {
        n: 3,
        points: vec![400],
        mode: Mode::ShrunkBall,
        trials,
        sphere_samples: 20_000,
        facet_samples: 20_000,
        sphere_method: SphereMethod::Uniform,
        radius: RadiusPolicy::Analytic,
        seed: 5,
        weighted_fit: false,
    };
    let time = |trials| {
        let t = std::time::Instant::now();
        run_sweep(&cfg(trials)).unwrap();
        t.elapsed().as_secs_f64()
    };
    time(4);
    let ratio = time(64) / time(16);
    assert!((2.0..=8.0).contains(&ratio), "4× trials took {ratio:.2}× as long");
}

#[test]
fn zero_trials_is_rejected() {
    let cfg = ExperimentConfig {
        n: 3,
        points: vec![100],
        mode: Mode::UnitBall,
        trials: 0,
        sphere_samples: 10,
        facet_samples: 10,
        sphere_method: SphereMethod::Uniform,
        radius: RadiusPolicy::Analytic,
        seed: 1,
        weighted_fit: false,
    };
    assert_eq!(run_sweep(&cfg).unwrap_err().tag(), "invalid-argument");
}
