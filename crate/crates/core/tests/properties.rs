use ballapprox::deviation::{delta_s, facet_components, sphere_components, Budgets, SphereMethod};
use ballapprox::geometry::{
    calibrate_gamma, cap_area_from_height, cap_height_from_area, cap_radius_bounds, fit_cap_radius_constant,
    gamma_ratio_bound, sphere_area, CapGeometry,
};
use ballapprox::linalg::dot;
use ballapprox::lowerbound::{facet_certificates, image_total, t_image_area};
use ballapprox::sampling::{random_polytope, sample_sphere};
use ballapprox::{convex_hull, Locator, Polytope, SeededStream};
use proptest::prelude::*;
use rand::Rng;

fn cloud(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = SeededStream::new(seed, 7).rng();
    (0..count).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn hull_contains_every_input(n in 2usize..=5, extra in 0usize..40, seed in any::<u64>()) {
        let pts = cloud(n, n + 1 + extra, seed);
        let hull = convex_hull(&pts).unwrap();
        for p in &pts {
            prop_assert!(hull.contains_with_slack(p, 1e-9));
        }
        for f in &hull.facets {
            prop_assert!((dot(&f.normal, &f.normal) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hull_of_hull_vertices_is_the_same(n in 2usize..=4, extra in 0usize..30, seed in any::<u64>()) {
        let hull = convex_hull(&cloud(n, n + 1 + extra, seed)).unwrap();
        let again = convex_hull(&hull.vertices).unwrap();
        prop_assert_eq!(again.vertex_count(), hull.vertex_count());
        prop_assert_eq!(again.facet_count(), hull.facet_count());
        prop_assert!((again.volume() - hull.volume()).abs() <= 1e-10 * hull.volume());
        prop_assert!((again.surface_area() - hull.surface_area()).abs() <= 1e-10 * hull.surface_area());
    }

    #[test]
    fn sphere_hulls_satisfy_euler_and_ridge_counts(n in 2usize..=5, extra in 0usize..60, seed in any::<u64>()) {
        let p = random_polytope(n, n + 1 + extra, 1.0, SeededStream::new(seed, 0)).unwrap();
        prop_assert!(p.is_simplicial());
        let ridges = p.ridges().len();
        prop_assert_eq!(n * p.facet_count(), 2 * ridges);
        match n {
            2 => prop_assert_eq!(p.vertex_count(), p.facet_count()),
            3 => prop_assert_eq!(p.vertex_count() + p.facet_count(), ridges + 2),
            _ => {}
        }
    }

    #[test]
    fn locator_agrees_with_brute_force(n in 2usize..=5, extra in 4usize..80, seed in any::<u64>()) {
        let p = random_polytope(n, n + 1 + extra, 1.0, SeededStream::new(seed, 1)).unwrap();
        prop_assume!(p.origin_in_interior());
        let loc = Locator::new(&p);
        let probes = sample_sphere(n, 0.97, SeededStream::new(seed, 2), 200).unwrap();
        for x in &probes {
            prop_assert_eq!(loc.contains(x), p.contains(x));
            if let Some(f) = loc.exit_facet(x) {
                let best = p.facets.iter().map(|g| dot(&g.normal, x) / g.offset).fold(f64::MIN, f64::max);
                let got = dot(&p.facets[f].normal, x) / p.facets[f].offset;
                prop_assert!(got >= best - 1e-12);
            }
        }
    }

    #[test]
    fn cap_height_round_trip(n in 2usize..=10, p in -1.0f64..1.0) {
        let s = cap_area_from_height(n, p).unwrap();
        let back = cap_height_from_area(n, s).unwrap();
        prop_assert!((back - p).abs() < 1e-10, "n={} p={} back={}", n, p, back);
    }

    #[test]
    fn cap_area_decreases_with_height(n in 2usize..=10, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        prop_assert!(cap_area_from_height(n, lo).unwrap() > cap_area_from_height(n, hi).unwrap());
    }

    #[test]
    fn cap_radius_sandwich(n in 2usize..=8, frac in 1e-6f64..0.5) {
        let omega = sphere_area(n);
        let grid: Vec<f64> = (1..=200).map(|k| omega * 0.5 * k as f64 / 200.0).collect();
        let c = fit_cap_radius_constant(n, &grid).unwrap();
        prop_assert!(c <= 10.0);
        let s = frac * omega;
        let (lo, hi) = cap_radius_bounds(n, s, c.max(1e-9) * 1.0001 + 1e-12).unwrap();
        let r = CapGeometry::from_area(n, frac).unwrap().r;
        // the grid constant extends to areas off the grid by continuity only,
        // so allow a small relative excess between grid points
        let slack = 1e-3 * r;
        prop_assert!(lo - slack <= r && r <= hi + slack, "n={} s={} r={} [{}, {}]", n, s, r, lo, hi);
    }

    #[test]
    fn calibration_stays_in_bracket(n in 3usize..=6, points in 1000u64..10_000_000) {
        // the upper end only holds once γ is small, hence N ≥ 10³
        let cal = calibrate_gamma(n, points).unwrap();
        prop_assert!(cal.in_bracket(), "{:?}", cal);
        prop_assert!(cal.gamma > 0.0 && cal.gamma < 1.0);
    }

    #[test]
    fn component_identities_are_exact(n in 2usize..=4, extra in 0usize..30, r in 0.5f64..1.3, seed in any::<u64>()) {
        let p = random_polytope(n, n + 1 + extra, 1.0, SeededStream::new(seed, 3)).unwrap();
        let s = sphere_components(n, r, &p, SeededStream::new(seed, 4), 2000).unwrap();
        let sphere = r.powi(n as i32 - 1) * sphere_area(n);
        prop_assert!((s.inside.mean + s.outside.mean - sphere).abs() <= 1e-12 * sphere);
        let f = facet_components(n, r, &p, SeededStream::new(seed, 5), 2000).unwrap();
        let area = p.surface_area();
        prop_assert!((f.inside.mean + f.outside.mean - area).abs() <= 1e-12 * area);
    }

    #[test]
    fn deviation_is_nonnegative_within_noise(n in 2usize..=4, extra in 0usize..40, r in 0.6f64..1.4, seed in any::<u64>()) {
        let p = random_polytope(n, n + 1 + extra, 1.0, SeededStream::new(seed, 6)).unwrap();
        for method in [SphereMethod::Uniform, SphereMethod::Radial] {
            let b = Budgets { sphere_samples: 4000, facet_samples: 4000, volume_samples: 0, sphere_method: method };
            let d = delta_s(n, r, &p, SeededStream::new(seed, 8), &b).unwrap();
            prop_assert!(d.ds_mean >= -3.0 * d.ds_stderr - 1e-12, "{:?}", d);
        }
    }
}

#[test]
fn gamma_ratio_bound_holds_up_to_200() {
    for n in 2..=200 {
        let (v, ok) = gamma_ratio_bound(n);
        assert!(ok, "n={n}: {v}");
    }
}

#[test]
fn nested_inscribed_polytope_matches_exact_areas() {
    // P ⊂ B: sphere_in = 0 and facet_out = 0, so Δ_s = ω - area(∂P) exactly
    for (n, pts) in [(2, 12), (3, 80), (4, 60)] {
        let p = random_polytope(n, pts, 0.9, SeededStream::new(5, n as u64)).unwrap();
        let d = delta_s(n, 1.0, &p, SeededStream::new(6, 0), &Budgets::default()).unwrap();
        let exact = sphere_area(n) - p.surface_area();
        assert!((d.ds_mean - exact).abs() <= 3.0 * d.ds_stderr + 1e-10, "n={n}: {} vs {exact}", d.ds_mean);
    }
}

#[test]
fn stderr_halves_when_budgets_quadruple() {
    let p = random_polytope(3, 60, 1.0, SeededStream::new(9, 0)).unwrap();
    for method in [SphereMethod::Uniform, SphereMethod::Radial] {
        // average over independent replicas so the ratio itself is stable
        let mean_se = |k: u64| {
            (0..8)
                .map(|i| {
                    let b = Budgets { sphere_samples: k, facet_samples: k, volume_samples: 0, sphere_method: method };
                    delta_s(3, 0.96, &p, SeededStream::new(10, i), &b).unwrap().ds_stderr
                })
                .sum::<f64>()
                / 8.0
        };
        let ratio = mean_se(160_000) / mean_se(40_000);
        assert!((ratio - 0.5).abs() <= 0.05, "{method:?}: ratio {ratio}");
    }
}

// T images of distinct facets are disjoint, but they do not cover the sphere:
// only the part of each cap lying over its own facet is hit. Oracle value from
// 2-d quadrature of 1/sqrt(1 - ρ²) over the facet (scipy dblquad).
const TETRA_T_IMAGE_TOTAL: f64 = 5.383019690600472;

#[test]
fn regular_tetrahedron_t_images() {
    let s = 1.0 / 3.0f64.sqrt();
    let verts = vec![vec![s, s, s], vec![s, -s, -s], vec![-s, s, -s], vec![-s, -s, s]];
    let p = convex_hull(&verts).unwrap();
    let total = image_total(&p, SeededStream::new(3, 0), 200_000, t_image_area).unwrap();
    assert!((total.mean - TETRA_T_IMAGE_TOTAL).abs() <= 3.0 * total.stderr, "{total:?}");
    assert!(total.mean <= sphere_area(3));
}

#[test]
fn certificates_on_shapes() {
    let oct = Polytope::cross_polytope(3, 1.0).unwrap();
    for c in facet_certificates(3, &oct, SeededStream::new(1, 0), 20_000).unwrap() {
        assert_eq!(c.inner.as_str(), "pass");
    }
    let cube = Polytope::hypercube(3, 1.0).unwrap();
    for c in facet_certificates(3, &cube, SeededStream::new(1, 1), 20_000).unwrap() {
        assert_eq!(c.outer.as_str(), "pass");
    }
}
