//! Monte Carlo estimation of the symmetric surface-area deviation between a
//! ball `rB` and a polytope `P`,
//!
//! `Δ_s = area(∂B ∩ Pᶜ) + area(∂P ∩ Bᶜ) − area(∂B ∩ P) − area(∂P ∩ B)`,
//!
//! and of the volume deviation `Δ_v = vol(B ∪ P) − vol(B ∩ P)`.
//!
//! Facets are fan-triangulated and sampled with a budget proportional to
//! area. Pieces certified to lie inside (all vertices within `r`) or outside
//! (hyperplane at distance `≥ r`) the ball are resolved exactly.
//!
//! Two sphere estimators are available:
//! * `Uniform`: uniform points on `r·S^{n-1}` tested against `P`.
//! * `Radial`: requires every facet offset to be at least
//!   `RADIAL_MIN_OFFSET · r` (so `0 ∈ int P`), otherwise `Uniform` is used.
//!   The part of the sphere outside `P` is the radial image of `∂P ∩ int(rB)`, so
//!   `area(∂B ∩ Pᶜ) = Σ_i ∫_{F_i ∩ rB} r^{n-1} t_i / |x|^n dx`,
//!   estimated from the same facet samples. Sphere and facet terms then share
//!   their noise and `Δ_s` is far more precise.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::sphere_area;
use crate::hull::{Locator, Polytope};
use crate::linalg::{self, dot};
use crate::sampling::{sphere_point, SeededStream, SimplexSampler};

/// Sphere samples per independent substream block.
const SPHERE_BLOCK: u64 = 1 << 16;

/// The radial weight is at most `(r / min t_i)^{n-1}`; below this ratio of
/// `min t_i` to `r` the uniform estimator is used instead.
pub const RADIAL_MIN_OFFSET: f64 = 0.25;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Measured {
    pub mean: f64,
    pub stderr: f64,
}

impl Measured {
    pub fn exact(mean: f64) -> Self {
        Self { mean, stderr: 0.0 }
    }
}

/// Inside/outside split of one boundary with respect to the other body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitArea {
    pub inside: Measured,
    pub outside: Measured,
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereMethod {
    Uniform,
    Radial,
}

#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    pub sphere_samples: u64,
    pub facet_samples: u64,
    /// Zero skips the volume estimate.
    pub volume_samples: u64,
    pub sphere_method: SphereMethod,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { sphere_samples: 100_000, facet_samples: 100_000, volume_samples: 0, sphere_method: SphereMethod::Uniform }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationEstimate {
    pub ds_mean: f64,
    pub ds_stderr: f64,
    pub dv: Option<Measured>,
    pub sphere_in: Measured,
    pub sphere_out: Measured,
    pub facet_in: Measured,
    pub facet_out: Measured,
    pub sphere_samples: u64,
    pub facet_samples: u64,
    pub radius: f64,
    pub sphere_method: SphereMethod,
}

fn check(n: usize, r: f64, poly: &Polytope) -> Result<()> {
    if n != poly.dim {
        return Err(Error::InvalidArgument(format!("dimension {n} does not match polytope dimension {}", poly.dim)));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r}")));
    }
    Ok(())
}

/// Uniform sphere samples tested for membership in `P`.
pub fn sphere_components(n: usize, r: f64, poly: &Polytope, stream: SeededStream, samples: u64) -> Result<SplitArea> {
    check(n, r, poly)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("sphere sample count must be at least 1".into()));
    }
    let total = r.powi(n as i32 - 1) * sphere_area(n);
    let locator = Locator::new(poly);
    let blocks = samples.div_ceil(SPHERE_BLOCK);
    let inside: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = SPHERE_BLOCK.min(samples - b * SPHERE_BLOCK);
            let mut rng = stream.child(b).rng();
            let mut x = vec![0.0; n];
            let mut hits = 0u64;
            for _ in 0..count {
                sphere_point(&mut rng, r, &mut x);
                hits += locator.contains(&x) as u64;
            }
            hits
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let q = inside as f64 / samples as f64;
    let se = total * (q * (1.0 - q) / samples as f64).sqrt();
    let inside_area = total * q;
    Ok(SplitArea {
        inside: Measured { mean: inside_area, stderr: se },
        outside: Measured { mean: total - inside_area, stderr: se },
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PieceClass {
    Inside,
    Outside,
    Crossing,
}

struct Piece {
    sampler: SimplexSampler,
    area: f64,
    class: PieceClass,
}

/// Simplicial pieces of every facet, classified against `rB`.
struct Pieces {
    per_facet: Vec<Vec<Piece>>,
    total_area: f64,
}

impl Pieces {
    fn new(poly: &Polytope, r: f64) -> Result<Self> {
        let mut per_facet = Vec::with_capacity(poly.facet_count());
        let mut total_area = 0.0;
        for (i, f) in poly.facets.iter().enumerate() {
            let mut pieces = Vec::new();
            for simplex in poly.facet_simplices(i) {
                let pts: Vec<Vec<f64>> = simplex.iter().map(|&v| poly.vertices[v].clone()).collect();
                let sampler = SimplexSampler::new(&pts)
                    .map_err(|_| Error::DegenerateInput(format!("facet {i} has (near) zero area")))?;
                let max_norm = pts.iter().map(|p| linalg::norm(p)).fold(0.0, f64::max);
                let class = if max_norm <= r {
                    PieceClass::Inside
                } else if f.offset.abs() >= r - 1e-12 * r {
                    PieceClass::Outside
                } else {
                    PieceClass::Crossing
                };
                total_area += sampler.volume();
                pieces.push(Piece { area: sampler.volume(), sampler, class });
            }
            per_facet.push(pieces);
        }
        Ok(Self { per_facet, total_area })
    }

    fn sampled(&self, radial: bool) -> impl Iterator<Item = &Piece> {
        self.per_facet
            .iter()
            .flatten()
            .filter(move |p| p.class == PieceClass::Crossing || (radial && p.class == PieceClass::Inside))
    }

    fn allocation(&self, piece: &Piece, budget: u64, sampled_area: f64) -> u64 {
        ((budget as f64 * piece.area / sampled_area).round() as u64).max(2)
    }
}

/// Per-facet sums: values and variances of the piece-wise estimators.
#[derive(Clone, Copy, Default)]
struct FacetTally {
    facet_in: f64,
    facet_in_var: f64,
    sphere_out: f64,
    sphere_out_var: f64,
    // var of Σ a_j mean(1{|x|<=r}(w-1)), the shared-sample difference
    diff_var: f64,
    samples: u64,
}

fn facet_tally(
    pieces: &Pieces,
    facet: usize,
    poly: &Polytope,
    r: f64,
    radial: bool,
    budget: u64,
    sampled_area: f64,
    stream: SeededStream,
) -> FacetTally {
    let n = poly.dim;
    let t = poly.facets[facet].offset;
    let r2 = r * r;
    let rn1 = r.powi(n as i32 - 1);
    let mut rng = stream.rng();
    let mut x = vec![0.0; n];
    let mut tally = FacetTally::default();
    for piece in &pieces.per_facet[facet] {
        let a = piece.area;
        let sample = piece.class == PieceClass::Crossing || (radial && piece.class == PieceClass::Inside);
        if !sample {
            if piece.class == PieceClass::Inside {
                tally.facet_in += a;
            }
            continue;
        }
        let k = pieces.allocation(piece, budget, sampled_area);
        let (mut hits, mut sw, mut sw2, mut sg, mut sg2) = (0u64, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..k {
            piece.sampler.sample_into(&mut rng, &mut x);
            let d2 = dot(&x, &x);
            if d2 <= r2 {
                hits += 1;
                if radial {
                    let w = rn1 * t / d2.powf(0.5 * n as f64);
                    sw += w;
                    sw2 += w * w;
                    let g = w - 1.0;
                    sg += g;
                    sg2 += g * g;
                }
            }
        }
        let kf = k as f64;
        let q = hits as f64 / kf;
        tally.facet_in += a * q;
        tally.facet_in_var += a * a * q * (1.0 - q) / kf;
        if radial {
            let var = |s: f64, s2: f64| ((s2 / kf - (s / kf).powi(2)).max(0.0)) / (kf - 1.0);
            tally.sphere_out += a * sw / kf;
            tally.sphere_out_var += a * a * var(sw, sw2);
            tally.diff_var += a * a * var(sg, sg2);
        }
        tally.samples += k;
    }
    tally
}

fn facet_tallies(poly: &Polytope, r: f64, radial: bool, budget: u64, stream: SeededStream) -> Result<(Pieces, Vec<FacetTally>)> {
    let pieces = Pieces::new(poly, r)?;
    let sampled_area: f64 = pieces.sampled(radial).map(|p| p.area).sum();
    let tallies = (0..poly.facet_count())
        .into_par_iter()
        .map(|i| facet_tally(&pieces, i, poly, r, radial, budget, sampled_area, stream.child(i as u64)))
        .collect();
    Ok((pieces, tallies))
}

/// Stratified facet samples tested against `|x| ≤ r`; `samples` is the total
/// budget shared by all pieces that cross the sphere.
pub fn facet_components(n: usize, r: f64, poly: &Polytope, stream: SeededStream, samples: u64) -> Result<SplitArea> {
    check(n, r, poly)?;
    let (pieces, tallies) = facet_tallies(poly, r, false, samples, stream)?;
    let (mut inside, mut var, mut count) = (0.0, 0.0, 0);
    for t in &tallies {
        inside += t.facet_in;
        var += t.facet_in_var;
        count += t.samples;
    }
    let se = var.sqrt();
    Ok(SplitArea {
        inside: Measured { mean: inside, stderr: se },
        outside: Measured { mean: pieces.total_area - inside, stderr: se },
        samples: count,
    })
}

/// `Δ_s(rB, P)` with its four boundary components.
///
/// The returned `ds_mean` is always `sphere_out + facet_out − sphere_in −
/// facet_in` evaluated in that order. The stderr accounts for the exact
/// anticorrelation of in/out pairs (and, for the radial method, of the
/// shared facet samples).
pub fn delta_s(n: usize, r: f64, poly: &Polytope, stream: SeededStream, budgets: &Budgets) -> Result<DeviationEstimate> {
    check(n, r, poly)?;
    if budgets.facet_samples == 0 {
        return Err(Error::InvalidArgument("facet sample count must be at least 1".into()));
    }
    let sphere_total = r.powi(n as i32 - 1) * sphere_area(n);
    let min_offset = poly.facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
    let radial = budgets.sphere_method == SphereMethod::Radial && min_offset >= RADIAL_MIN_OFFSET * r;
    let method = if radial { SphereMethod::Radial } else { SphereMethod::Uniform };
    let (pieces, tallies) = facet_tallies(poly, r, radial, budgets.facet_samples, stream.child(1))?;

    let mut facet_in = 0.0;
    let mut facet_in_var = 0.0;
    let mut facet_samples = 0;
    let mut sphere_out_sum = 0.0;
    let mut sphere_out_var = 0.0;
    let mut diff_var = 0.0;
    for t in &tallies {
        facet_in += t.facet_in;
        facet_in_var += t.facet_in_var;
        sphere_out_sum += t.sphere_out;
        sphere_out_var += t.sphere_out_var;
        diff_var += t.diff_var;
        facet_samples += t.samples;
    }
    let facet_se = facet_in_var.sqrt();
    let facet_in = Measured { mean: facet_in, stderr: facet_se };
    let facet_out = Measured { mean: pieces.total_area - facet_in.mean, stderr: facet_se };

    let (sphere_in, sphere_out, sphere_samples, ds_var) = if radial {
        let se = sphere_out_var.sqrt();
        let out = Measured { mean: sphere_out_sum, stderr: se };
        let inn = Measured { mean: sphere_total - sphere_out_sum, stderr: se };
        (inn, out, 0, 4.0 * diff_var)
    } else {
        if budgets.sphere_samples == 0 {
            return Err(Error::InvalidArgument("sphere sample count must be at least 1".into()));
        }
        let s = sphere_components(n, r, poly, stream.child(0), budgets.sphere_samples)?;
        let v = 4.0 * (s.outside.stderr.powi(2) + facet_in_var);
        (s.inside, s.outside, s.samples, v)
    };

    let ds_mean = sphere_out.mean + facet_out.mean - sphere_in.mean - facet_in.mean;
    let dv = if budgets.volume_samples > 0 {
        Some(delta_v(n, r, poly, stream.child(2), budgets.volume_samples)?)
    } else {
        None
    };
    Ok(DeviationEstimate {
        ds_mean,
        ds_stderr: ds_var.sqrt(),
        dv,
        sphere_in,
        sphere_out,
        facet_in,
        facet_out,
        sphere_samples,
        facet_samples,
        radius: r,
        sphere_method: method,
    })
}

/// `Δ_v(rB, P)` by uniform sampling of the bounding box of `P ∪ rB`.
pub fn delta_v(n: usize, r: f64, poly: &Polytope, stream: SeededStream, samples: u64) -> Result<Measured> {
    check(n, r, poly)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("volume sample count must be at least 1".into()));
    }
    let mut lo = vec![-r; n];
    let mut hi = vec![r; n];
    for v in &poly.vertices {
        for k in 0..n {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let locator = Locator::new(poly);
    let r2 = r * r;
    let blocks = samples.div_ceil(SPHERE_BLOCK);
    let hits: u64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            use rand::Rng;
            let count = SPHERE_BLOCK.min(samples - b * SPHERE_BLOCK);
            let mut rng = stream.child(b).rng();
            let mut x = vec![0.0; n];
            let mut h = 0u64;
            for _ in 0..count {
                for k in 0..n {
                    x[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
                }
                let in_ball = dot(&x, &x) <= r2;
                h += (in_ball != locator.contains(&x)) as u64;
            }
            h
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let q = hits as f64 / samples as f64;
    Ok(Measured { mean: box_volume * q, stderr: box_volume * (q * (1.0 - q) / samples as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cube() -> Polytope {
        Polytope::hypercube(3, 1.0).unwrap()
    }

    #[test]
    fn cube_sphere_and_facets() {
        let c = cube();
        let s = sphere_components(3, 1.0, &c, SeededStream::new(1, 0), 10_000).unwrap();
        assert_eq!(s.inside.mean, 4.0 * PI);
        assert_eq!(s.outside.mean, 0.0);
        let f = facet_components(3, 1.0, &c, SeededStream::new(1, 0), 10_000).unwrap();
        assert_eq!(f.inside.mean, 0.0);
        assert!((f.outside.mean - 24.0).abs() < 1e-12);
        let d = delta_s(3, 1.0, &c, SeededStream::new(1, 0), &Budgets::default()).unwrap();
        assert!((d.ds_mean - (24.0 - 4.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn tiny_tetrahedron_is_inside_ball() {
        let s3 = 3f64.sqrt();
        let pts = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![-1.0 / s3, -1.0 / s3, -1.0 / s3],
        ];
        let small: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|x| x * 1e-3).collect()).collect();
        let p = crate::hull::convex_hull(&small).unwrap();
        let s = sphere_components(3, 1.0, &p, SeededStream::new(2, 0), 1000).unwrap();
        assert_eq!(s.inside.mean, 0.0);
        assert_eq!(s.outside.mean, 4.0 * PI);
    }

    #[test]
    fn octahedron_is_inscribed() {
        let o = Polytope::cross_polytope(3, 1.0).unwrap();
        let f = facet_components(3, 1.0, &o, SeededStream::new(3, 0), 1000).unwrap();
        assert!((f.inside.mean - 4.0 * 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.outside.mean, 0.0);
        for method in [SphereMethod::Uniform, SphereMethod::Radial] {
            let b = Budgets { sphere_method: method, ..Budgets::default() };
            let d = delta_s(3, 1.0, &o, SeededStream::new(3, 0), &b).unwrap();
            let expect = 4.0 * PI - 4.0 * 3f64.sqrt();
            assert!((d.ds_mean - expect).abs() < 4.0 * d.ds_stderr + 1e-12, "{method:?}: {} vs {expect}", d.ds_mean);
        }
    }

    #[test]
    fn component_identities_are_exact() {
        let p = crate::sampling::random_polytope(3, 60, 1.0, SeededStream::new(5, 0)).unwrap();
        for method in [SphereMethod::Uniform, SphereMethod::Radial] {
            let b = Budgets { sphere_samples: 20_000, facet_samples: 20_000, volume_samples: 0, sphere_method: method };
            let d = delta_s(3, 0.95, &p, SeededStream::new(9, 0), &b).unwrap();
            assert_eq!(d.ds_mean, d.sphere_out.mean + d.facet_out.mean - d.sphere_in.mean - d.facet_in.mean);
            assert_eq!(d.sphere_in.mean + d.sphere_out.mean, 0.95f64.powi(2) * 4.0 * PI);
            assert!((d.facet_in.mean + d.facet_out.mean - p.surface_area()).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(delta_s(4, 1.0, &cube(), SeededStream::new(0, 0), &Budgets::default()).is_err());
    }
}
