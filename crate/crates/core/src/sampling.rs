//! Seeded random generation: uniform points on spheres and in simplices,
//! random inscribed polytopes, and the closed-form Wendel and Miles values.
//!
//! Generator: ChaCha8 (`rand_chacha`), keyed by `seed_from_u64(seed)` with
//! the ChaCha stream number set to `stream_id`. Both are portable, so a
//! `(seed, stream_id)` pair reproduces the same draws on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::hull::{convex_hull, Polytope};
use crate::linalg;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeededStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Derived substream `k` of this stream. Children of distinct parents or
    /// with distinct `k` land on different stream ids (SplitMix64 mixing).
    pub fn child(&self, k: u64) -> SeededStream {
        let mut z = self
            .stream_id
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(k.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        SeededStream { seed: self.seed, stream_id: z }
    }
}

/// One uniform point on `r·S^{n-1}`, written into `out`.
#[inline]
pub fn sphere_point<R: Rng>(rng: &mut R, r: f64, out: &mut [f64]) {
    loop {
        let mut s = 0.0;
        for x in out.iter_mut() {
            *x = rng.sample(StandardNormal);
            s += *x * *x;
        }
        if s > 1e-300 {
            let k = r / s.sqrt();
            out.iter_mut().for_each(|x| *x *= k);
            return;
        }
    }
}

/// `count` iid uniform points on the sphere of radius `r` in R^n.
pub fn sample_sphere(n: usize, r: f64, stream: SeededStream, count: usize) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { dim: n, min: 2, max: usize::MAX });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let mut rng = stream.rng();
    Ok((0..count)
        .map(|_| {
            let mut p = vec![0.0; n];
            sphere_point(&mut rng, r, &mut p);
            p
        })
        .collect())
}

/// Hull of `points` iid uniform points on `r·S^{n-1}`. A numerically
/// degenerate draw is redrawn from child substreams, at most 3 times.
pub fn random_polytope(n: usize, points: usize, r: f64, stream: SeededStream) -> Result<Polytope> {
    if points < n + 1 {
        return Err(Error::InvalidArgument(format!("need at least {} points in R^{n}, got {points}", n + 1)));
    }
    let mut last = None;
    for attempt in 0..=3u64 {
        let s = if attempt == 0 { stream } else { stream.child(u64::MAX - attempt) };
        match convex_hull(&sample_sphere(n, r, s, points)?) {
            Ok(p) => return Ok(p),
            Err(e @ Error::DegenerateInput(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Probability that the hull of `points` iid symmetric points in R^n misses
/// the origin in its interior: `2^{-N+1} Σ_{k<n} C(N-1, k)`.
pub fn wendel_probability(n: usize, points: u64) -> f64 {
    if points == 0 {
        return 1.0;
    }
    let m = (points - 1) as f64;
    let ln2 = std::f64::consts::LN_2;
    let mut total = 0.0;
    for k in 0..n.min(points as usize) {
        let k = k as f64;
        let ln_binom = libm::lgamma(m + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(m - k + 1.0);
        total += (ln_binom - m * ln2).exp();
    }
    total.min(1.0)
}

/// `E[vol_n(simplex)^2]` for n+1 iid uniform points on `r·S^{n-1}`.
pub fn miles_moment(n: usize, r: f64) -> f64 {
    (n as f64 + 1.0) * r.powi(2 * n as i32) / (linalg::factorial(n) * (n as f64).powi(n as i32))
}

/// Uniform sampler on a k-simplex given by k+1 vertices in R^n.
#[derive(Clone, Debug)]
pub struct SimplexSampler {
    vertices: Vec<Vec<f64>>,
    volume: f64,
}

impl SimplexSampler {
    pub fn new(vertices: &[Vec<f64>]) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::DegenerateInput("simplex needs at least two vertices".into()));
        }
        let n = vertices[0].len();
        if vertices.len() > n + 1 || vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidArgument("simplex vertices of inconsistent dimension".into()));
        }
        let volume = linalg::simplex_volume(vertices);
        if volume < 1e-14 {
            return Err(Error::DegenerateInput(format!("simplex volume {volume:e} below 1e-14")));
        }
        Ok(Self { vertices: vertices.to_vec(), volume })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Barycentric weights from normalized exponential spacings.
    #[inline]
    pub fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        let k = self.vertices.len();
        let mut w = [0.0f64; 16];
        let mut s = 0.0;
        for wi in w.iter_mut().take(k) {
            *wi = rng.sample(Exp1);
            s += *wi;
        }
        out.iter_mut().for_each(|x| *x = 0.0);
        for (wi, v) in w.iter().take(k).zip(&self.vertices) {
            let c = wi / s;
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
    }
}

/// `count` iid uniform points in the simplex spanned by `vertices`.
pub fn sample_simplex(vertices: &[Vec<f64>], stream: SeededStream, count: usize) -> Result<Vec<Vec<f64>>> {
    let sampler = SimplexSampler::new(vertices)?;
    let n = vertices[0].len();
    let mut rng = stream.rng();
    Ok((0..count)
        .map(|_| {
            let mut p = vec![0.0; n];
            sampler.sample_into(&mut rng, &mut p);
            p
        })
        .collect())
}

/// Monte Carlo estimate (mean, stderr) of `E[vol_n^2]` of the simplex on
/// n+1 uniform points of `r·S^{n-1}`.
pub fn miles_monte_carlo(n: usize, r: f64, trials: usize, stream: SeededStream) -> (f64, f64) {
    let mut rng = stream.rng();
    let mut pts = vec![vec![0.0; n]; n + 1];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..trials {
        for p in pts.iter_mut() {
            sphere_point(&mut rng, r, p);
        }
        let v = linalg::signed_simplex_volume(&pts);
        let v2 = v * v;
        sum += v2;
        sum_sq += v2 * v2;
    }
    mean_stderr(sum, sum_sq, trials)
}

/// Monte Carlo estimate of `P(0 ∉ int P_N)` with its binomial stderr.
/// Each trial draws N sphere points and tests whether the origin is
/// separated from them by a hyperplane, through the hull's facet offsets.
pub fn wendel_monte_carlo(n: usize, points: usize, trials: usize, stream: SeededStream) -> Result<(f64, f64)> {
    let mut misses = 0usize;
    for t in 0..trials {
        let p = random_polytope(n, points, 1.0, stream.child(t as u64))?;
        if !p.origin_in_interior() {
            misses += 1;
        }
    }
    let q = misses as f64 / trials as f64;
    Ok((q, (q * (1.0 - q) / trials as f64).sqrt()))
}

pub(crate) fn mean_stderr(sum: f64, sum_sq: f64, count: usize) -> (f64, f64) {
    if count == 0 {
        return (0.0, 0.0);
    }
    let k = count as f64;
    let mean = sum / k;
    if count < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - k * mean * mean) / (k - 1.0)).max(0.0);
    (mean, (var / k).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_have_radius() {
        let pts = sample_sphere(5, 2.5, SeededStream::new(1, 0), 100).unwrap();
        assert!(pts.iter().all(|p| (linalg::norm(p) - 2.5).abs() < 1e-12));
        assert!(sample_sphere(3, 1.0, SeededStream::new(1, 0), 0).unwrap().is_empty());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_sphere(3, 1.0, SeededStream::new(7, 3), 5).unwrap();
        let b = sample_sphere(3, 1.0, SeededStream::new(7, 3), 5).unwrap();
        let c = sample_sphere(3, 1.0, SeededStream::new(7, 4), 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let s = SeededStream::new(7, 3);
        assert_ne!(s.child(0), s.child(1));
        assert_ne!(s.child(0).stream_id, SeededStream::new(7, 4).child(0).stream_id);
    }

    #[test]
    fn wendel_closed_forms() {
        assert!((wendel_probability(2, 3) - 0.75).abs() < 1e-15);
        for n in 2..=8 {
            assert!((wendel_probability(n, n as u64 + 1) - (1.0 - 0.5f64.powi(n as i32))).abs() < 1e-14);
        }
        assert!(wendel_probability(3, 100) <= 0.5f64.powi(99) * 3.0 * 1e6);
        assert_eq!(wendel_probability(3, 2), 1.0);
    }

    #[test]
    fn miles_closed_forms() {
        assert!((miles_moment(2, 1.0) - 0.375).abs() < 1e-15);
        assert!((miles_moment(3, 1.0) - 2.0 / 81.0).abs() < 1e-15);
        assert!((miles_moment(2, 2.0) - 6.0).abs() < 1e-13);
    }

    #[test]
    fn tetrahedron_from_four_points() {
        let p = random_polytope(3, 4, 1.0, SeededStream::new(11, 0)).unwrap();
        assert_eq!(p.facet_count(), 4);
        let q = random_polytope(3, 100, 1.0, SeededStream::new(11, 0)).unwrap();
        let q2 = random_polytope(3, 100, 1.0, SeededStream::new(11, 0)).unwrap();
        assert_eq!(q, q2);
        assert_eq!(q.vertex_count(), 100);
    }

    #[test]
    fn simplex_sampling_moments() {
        let seg = sample_simplex(&[vec![0.0, 0.0], vec![1.0, 0.0]], SeededStream::new(2, 0), 40_000).unwrap();
        let mx = seg.iter().map(|p| p[0]).sum::<f64>() / 40_000.0;
        assert!((mx - 0.5).abs() < 4.0 * (1.0 / 12.0f64 / 40_000.0).sqrt());

        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let k = 40_000;
        let pts = sample_simplex(&tri, SeededStream::new(3, 0), k).unwrap();
        let mean_x = pts.iter().map(|p| p[0]).sum::<f64>() / k as f64;
        // Var of a barycentric coordinate on a triangle is 1/18
        assert!((mean_x - 1.0 / 3.0).abs() < 4.0 * (1.0 / 18.0 / k as f64).sqrt());
        let frac = pts.iter().filter(|p| p[0] + p[1] < 0.5).count() as f64 / k as f64;
        assert!((frac - 0.25).abs() < 4.0 * (0.25 * 0.75 / k as f64).sqrt());

        let flat = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]];
        assert!(matches!(sample_simplex(&flat, SeededStream::new(0, 0), 1), Err(Error::DegenerateInput(_))));
    }
}
