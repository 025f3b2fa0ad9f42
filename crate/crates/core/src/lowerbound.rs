//! Numerical certificates for the lower bound on the symmetric surface-area
//! deviation of a polytope with M facets from the unit ball.
//!
//! Per facet `F_i` (hyperplane `⟨ξ_i, x⟩ = t_i`):
//! * the normal projection `T` pushes `F_i ∩ B` along `ξ_i` onto the sphere,
//!   stretching area by `1/⟨ξ_i, T(x)⟩ = 1/√(1 − |x|² + t_i²)`;
//!   inner margin `μ(T(F_i∩B)) − μ(F_i∩B) − (1/32) μ(F_i∩B)^q / κ^{2/(n−1)}`;
//! * the radial projection `R(x) = x/|x|` shrinks `F_i ∩ Bᶜ` by
//!   `⟨ξ_i, x⟩/|x|^n`; outer margin
//!   `μ(F_i∩Bᶜ) − μ(R(F_i∩Bᶜ)) − (1/128) μ(F_i∩Bᶜ)^q / κ^{2/(n−1)}`,
//!   meaningful when `0 ∈ int P ⊆ 2B`.
//!
//! Here `q = (n+1)/(n−1)` and `κ = vol_{n−1}(B^{n−1})`. All areas are Monte
//! Carlo estimates over uniform facet samples; margin stderrs use the delta
//! method on the per-sample linearization.

use rand::Rng;
use serde::Serialize;

use crate::deviation::{delta_s, Budgets, DeviationEstimate, Measured, SphereMethod};
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, sphere_area};
use crate::hull::Polytope;
use crate::linalg::{self, dot};
use crate::sampling::{SeededStream, SimplexSampler};

/// Gate width, in standard errors.
pub const GATE_SIGMAS: f64 = 3.0;
/// Budget multiplier for the automatic re-run of non-passing checks.
pub const RERUN_FACTOR: u64 = 10;
/// Slack of the per-sample inequality checks.
pub const POINTWISE_SLACK: f64 = 1e-12;
const TANGENT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
    NotApplicable,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Inconclusive => "inconclusive",
            Outcome::Fail => "fail",
            Outcome::NotApplicable => "not-applicable",
        }
    }
}

/// `margin ≥ 3σ` passes, `margin < −3σ` fails, anything between is
/// inconclusive. An exact zero margin passes.
pub fn classify(m: Measured) -> Outcome {
    let gate = GATE_SIGMAS * m.stderr;
    if m.mean >= gate {
        Outcome::Pass
    } else if m.mean < -gate {
        Outcome::Fail
    } else {
        Outcome::Inconclusive
    }
}

fn q_exp(n: usize) -> f64 {
    (n as f64 + 1.0) / (n as f64 - 1.0)
}

fn kappa_pow(n: usize) -> f64 {
    ball_volume(n - 1).powf(2.0 / (n as f64 - 1.0))
}

/// Volume radius of an (n−1)-dimensional region of the given area.
pub fn volume_radius(n: usize, area: f64) -> f64 {
    (area.max(0.0) / ball_volume(n - 1)).powf(1.0 / (n as f64 - 1.0))
}

/// The right-hand side `c · area^q / κ^{2/(n−1)}` of the facet inequalities.
pub fn facet_bound(n: usize, area: f64, c: f64) -> f64 {
    c * area.max(0.0).powf(q_exp(n)) / kappa_pow(n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FacetCertificate {
    pub facet_index: usize,
    pub area_in: Measured,
    pub area_out: Measured,
    pub t_area: Measured,
    pub r_area: Option<Measured>,
    pub vr_in: f64,
    pub vr_out: f64,
    pub margin_inner: Measured,
    pub margin_outer: Option<Measured>,
    pub inner: Outcome,
    pub outer: Outcome,
    pub samples: u64,
    pub rerun: bool,
    pub pointwise_checked: u64,
    pub pointwise_violations: u64,
}

fn facet_samplers(poly: &Polytope, facet: usize) -> Result<Vec<SimplexSampler>> {
    poly.facet_simplices(facet)
        .into_iter()
        .map(|s| {
            let pts: Vec<Vec<f64>> = s.iter().map(|&v| poly.vertices[v].clone()).collect();
            SimplexSampler::new(&pts).map_err(|_| Error::DegenerateInput(format!("facet {facet} has (near) zero area")))
        })
        .collect()
}

// Sufficient statistics of one simplex piece.
#[derive(Default)]
struct PieceStats {
    area: f64,
    k: f64,
    hits_in: f64,
    // Σ 1_in (f − 1), Σ 1_in (f − 1)²  with f the T factor
    sf: f64,
    sff: f64,
    hits_out: f64,
    // Σ 1_out (1 − g), Σ 1_out (1 − g)²  with g the R factor
    sg: f64,
    sgg: f64,
}

struct PointPair {
    dist2: f64,
    value: f64,
    norm2: f64,
}

struct FacetSamples {
    pieces: Vec<PieceStats>,
    inner_pairs: Vec<PointPair>,
    outer_pairs: Vec<PointPair>,
}

fn sample_facet(poly: &Polytope, facet: usize, stream: SeededStream, budget: u64, keep_pairs: bool) -> Result<FacetSamples> {
    let n = poly.dim;
    let f = &poly.facets[facet];
    let samplers = facet_samplers(poly, facet)?;
    let total: f64 = samplers.iter().map(|s| s.volume()).sum();
    let foot: Vec<f64> = f.normal.iter().map(|x| x * f.offset).collect();
    let mut rng = stream.rng();
    let mut x = vec![0.0; n];
    let mut out = FacetSamples { pieces: Vec::new(), inner_pairs: Vec::new(), outer_pairs: Vec::new() };
    for s in &samplers {
        let k = ((budget as f64 * s.volume() / total).round() as u64).max(2);
        let mut st = PieceStats { area: s.volume(), k: k as f64, ..Default::default() };
        for _ in 0..k {
            s.sample_into(&mut rng, &mut x);
            let d2 = dot(&x, &x);
            let h = dot(&f.normal, &x);
            let dist2: f64 = x.iter().zip(&foot).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= 1.0 {
                // ⟨ξ, T(x)⟩² = 1 − |x|² + ⟨x, ξ⟩²
                let c2 = 1.0 - d2 + h * h;
                let fac = 1.0 / c2.sqrt();
                st.hits_in += 1.0;
                st.sf += fac - 1.0;
                st.sff += (fac - 1.0) * (fac - 1.0);
                if keep_pairs {
                    out.inner_pairs.push(PointPair { dist2, value: c2, norm2: d2 });
                }
            } else {
                let norm = d2.sqrt();
                let g = h / norm.powi(n as i32);
                st.hits_out += 1.0;
                st.sg += 1.0 - g;
                st.sgg += (1.0 - g) * (1.0 - g);
                if keep_pairs {
                    out.outer_pairs.push(PointPair { dist2, value: h / norm, norm2: d2 });
                }
            }
        }
        out.pieces.push(st);
    }
    Ok(out)
}

// Estimate of Σ a_j mean_j(1·(φ + β)) together with its stderr, for the
// statistic φ whose sums are (s1, s, ss) per piece.
fn combine(pieces: &[PieceStats], pick: impl Fn(&PieceStats) -> (f64, f64, f64), beta: f64) -> Measured {
    let (mut mean, mut var) = (0.0, 0.0);
    for p in pieces {
        let (s1, s, ss) = pick(p);
        let m1 = (s + beta * s1) / p.k;
        let m2 = (ss + 2.0 * beta * s + beta * beta * s1) / p.k;
        mean += p.area * m1;
        if p.k > 1.0 {
            var += p.area * p.area * (m2 - m1 * m1).max(0.0) / (p.k - 1.0);
        }
    }
    Measured { mean, stderr: var.sqrt() }
}

fn build_certificate(
    poly: &Polytope,
    facet: usize,
    samples: &FacetSamples,
    outer_applicable: bool,
) -> FacetCertificate {
    let n = poly.dim;
    let t = poly.facets[facet].offset;
    let tangent_or_beyond = t.abs() >= 1.0 - TANGENT_TOL;
    let p = &samples.pieces;
    let inner_stats = |s: &PieceStats| (s.hits_in, s.sf, s.sff);
    let outer_stats = |s: &PieceStats| (s.hits_out, s.sg, s.sgg);
    let zero = |s: &PieceStats| (s.hits_in, 0.0, 0.0);

    let (area_in, t_area, margin_inner) = if tangent_or_beyond {
        (Measured::exact(0.0), Measured::exact(0.0), Measured::exact(0.0))
    } else {
        let a_in = combine(p, zero, 1.0);
        let t_area = combine(p, inner_stats, 1.0);
        let d = facet_bound(n, a_in.mean, 1.0 / 32.0) * q_exp(n) / a_in.mean.max(f64::MIN_POSITIVE);
        let lin = combine(p, inner_stats, -d);
        let margin = t_area.mean - a_in.mean - facet_bound(n, a_in.mean, 1.0 / 32.0);
        (a_in, t_area, Measured { mean: margin, stderr: lin.stderr })
    };
    let zero_out = |s: &PieceStats| (s.hits_out, 0.0, 0.0);
    let area_out = if tangent_or_beyond {
        Measured::exact(p.iter().map(|s| s.area).sum())
    } else {
        combine(p, zero_out, 1.0)
    };
    let vr_in = volume_radius(n, area_in.mean);
    let vr_out = volume_radius(n, area_out.mean);

    let (r_area, margin_outer, outer) = if outer_applicable {
        let shrink = combine(p, outer_stats, 0.0);
        let r_area = Measured { mean: area_out.mean - shrink.mean, stderr: combine(p, outer_stats, -1.0).stderr };
        let d = facet_bound(n, area_out.mean, 1.0 / 128.0) * q_exp(n) / area_out.mean.max(f64::MIN_POSITIVE);
        let lin = combine(p, outer_stats, -d);
        let margin = area_out.mean - r_area.mean - facet_bound(n, area_out.mean, 1.0 / 128.0);
        let m = Measured { mean: margin, stderr: lin.stderr };
        (Some(r_area), Some(m), classify(m))
    } else {
        (None, None, Outcome::NotApplicable)
    };

    // Per-sample inequalities; they hold identically, so any violation is a
    // numerical defect.
    let mut checked = 0u64;
    let mut violations = 0u64;
    let r4 = vr_in * vr_in / 4.0;
    for pp in &samples.inner_pairs {
        checked += 1;
        if pp.value > 1.0 + POINTWISE_SLACK {
            violations += 1;
        }
        if pp.dist2 > r4 && pp.value > 1.0 - r4 + POINTWISE_SLACK {
            violations += 1;
        }
    }
    let rho4 = vr_out * vr_out / 4.0;
    for pp in &samples.outer_pairs {
        checked += 1;
        let bound = (1.0 - rho4 / pp.norm2).max(0.0).sqrt();
        if pp.dist2 > rho4 && pp.value > bound + POINTWISE_SLACK {
            violations += 1;
        }
    }

    FacetCertificate {
        facet_index: facet,
        area_in,
        area_out,
        t_area,
        r_area,
        vr_in,
        vr_out,
        margin_inner,
        margin_outer,
        inner: classify(margin_inner),
        outer,
        samples: p.iter().map(|s| s.k as u64).sum(),
        rerun: false,
        pointwise_checked: checked,
        pointwise_violations: violations,
    }
}

/// `0 ∈ int P` and every vertex within `2`: the hypotheses of the outer
/// (radial) inequality.
pub fn outer_preconditions(poly: &Polytope) -> bool {
    poly.origin_in_interior() && poly.max_vertex_norm() <= 2.0
}

/// Certificate of one facet with `samples` uniform facet points.
pub fn facet_certificate(poly: &Polytope, facet: usize, stream: SeededStream, samples: u64) -> Result<FacetCertificate> {
    let s = sample_facet(poly, facet, stream, samples, true)?;
    Ok(build_certificate(poly, facet, &s, outer_preconditions(poly)))
}

/// Certificates of every facet. Facets whose inner or outer check does not
/// pass are recomputed once with a 10× budget on a fresh substream.
pub fn facet_certificates(n: usize, poly: &Polytope, stream: SeededStream, samples: u64) -> Result<Vec<FacetCertificate>> {
    if n != poly.dim {
        return Err(Error::InvalidArgument(format!("dimension {n} does not match polytope dimension {}", poly.dim)));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("at least two samples per facet are needed".into()));
    }
    use rayon::prelude::*;
    (0..poly.facet_count())
        .into_par_iter()
        .map(|i| {
            let s = stream.child(i as u64);
            let cert = facet_certificate(poly, i, s, samples)?;
            let settled = |o: Outcome| matches!(o, Outcome::Pass | Outcome::NotApplicable);
            if settled(cert.inner) && settled(cert.outer) {
                return Ok(cert);
            }
            let mut again = facet_certificate(poly, i, s.child(RERUN_FACTOR), samples * RERUN_FACTOR)?;
            again.rerun = true;
            Ok(again)
        })
        .collect()
}

/// `μ(T(F ∩ B))`.
pub fn t_image_area(n: usize, poly: &Polytope, facet: usize, stream: SeededStream, samples: u64) -> Result<Measured> {
    if n != poly.dim {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    if poly.facets[facet].offset.abs() >= 1.0 - TANGENT_TOL {
        return Err(Error::EmptyIntersection(format!("{facet} (hyperplane misses the open ball)")));
    }
    let s = sample_facet(poly, facet, stream, samples, false)?;
    Ok(combine(&s.pieces, |p| (p.hits_in, p.sf, p.sff), 1.0))
}

/// `μ(R(F ∩ Bᶜ))`; needs `0 ∈ int P`.
pub fn r_image_area(n: usize, poly: &Polytope, facet: usize, stream: SeededStream, samples: u64) -> Result<Measured> {
    if n != poly.dim {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    if !poly.origin_in_interior() {
        return Err(Error::InvalidArgument("radial projection needs the origin inside the polytope".into()));
    }
    if poly.facet_points(facet).iter().all(|v| linalg::norm(v) <= 1.0) {
        return Err(Error::EmptyIntersection(format!("{facet} (facet inside the ball)")));
    }
    let s = sample_facet(poly, facet, stream, samples, false)?;
    let shrink = combine(&s.pieces, |p| (p.hits_out, p.sg, p.sgg), 0.0);
    let area_out = combine(&s.pieces, |p| (p.hits_out, 0.0, 0.0), 1.0);
    let se = combine(&s.pieces, |p| (p.hits_out, p.sg, p.sgg), -1.0).stderr;
    Ok(Measured { mean: area_out.mean - shrink.mean, stderr: se })
}

/// Sum of a per-facet image area over all facets, skipping empty ones.
pub fn image_total(
    poly: &Polytope,
    stream: SeededStream,
    samples: u64,
    image: fn(usize, &Polytope, usize, SeededStream, u64) -> Result<Measured>,
) -> Result<Measured> {
    let (mut mean, mut var) = (0.0, 0.0);
    for i in 0..poly.facet_count() {
        match image(poly.dim, poly, i, stream.child(i as u64), samples) {
            Ok(m) => {
                mean += m.mean;
                var += m.stderr * m.stderr;
            }
            Err(Error::EmptyIntersection(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Measured { mean, stderr: var.sqrt() })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub lhs: Measured,
    pub rhs: Measured,
    pub margin: Measured,
    pub outcome: Outcome,
}

impl BoundCheck {
    fn new(name: &'static str, lhs: Measured, rhs: Measured) -> Self {
        // lhs and rhs share samples; adding their stderrs bounds the
        // stderr of the difference whatever the correlation
        let margin = Measured { mean: lhs.mean - rhs.mean, stderr: lhs.stderr + rhs.stderr };
        Self { name, lhs, rhs, margin, outcome: classify(margin) }
    }

    fn not_applicable(name: &'static str) -> Self {
        Self {
            name,
            lhs: Measured::default(),
            rhs: Measured::default(),
            margin: Measured::default(),
            outcome: Outcome::NotApplicable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateReport {
    pub facets: usize,
    pub surface_area: f64,
    pub ds: Measured,
    pub checks: Vec<BoundCheck>,
}

/// Aggregated inequalities with M = facet count, evaluated against a unit
/// ball deviation estimate `dev`:
/// * `inner`: `μ(∂B∩Pᶜ) − μ(∂P∩B) ≥ (1/32) μ(∂P∩B)^q / (κ M)^{2/(n−1)}`
/// * `outer`: `μ(∂P∩Bᶜ) − μ(∂B∩P) ≥ (1/128) μ(∂P∩Bᶜ)^q / (κ M)^{2/(n−1)}`
/// * `holder`: `Δ_s ≥ μ(∂P)^q / (128 · 2^{2/(n−1)} (κ M)^{2/(n−1)})`
/// * `final`: `Δ_s ≥ 2^{−12} μ(∂B)^q / (κ M)^{2/(n−1)}`, when also `μ(∂P) ≥ μ(∂B)/2`.
///
/// The last three need `0 ∈ int P ⊆ 2B`.
pub fn aggregate_lower_bound(n: usize, poly: &Polytope, dev: &DeviationEstimate) -> AggregateReport {
    let m = poly.facet_count() as f64;
    let e = 2.0 / (n as f64 - 1.0);
    let q = q_exp(n);
    let denom = kappa_pow(n) * m.powf(e);
    let half = dev.ds_stderr / 2.0;
    let power = |area: Measured, c: f64| {
        let v = c * area.mean.max(0.0).powf(q) / denom;
        let dv = c * q * area.mean.max(0.0).powf(q - 1.0) / denom * area.stderr;
        Measured { mean: v, stderr: dv }
    };

    let inner_lhs = Measured { mean: dev.sphere_out.mean - dev.facet_in.mean, stderr: half };
    let mut checks = vec![BoundCheck::new("inner", inner_lhs, power(dev.facet_in, 1.0 / 32.0))];

    let surface = dev.facet_in.mean + dev.facet_out.mean;
    let ds = Measured { mean: dev.ds_mean, stderr: dev.ds_stderr };
    if outer_preconditions(poly) {
        let outer_lhs = Measured { mean: dev.facet_out.mean - dev.sphere_in.mean, stderr: half };
        checks.push(BoundCheck::new("outer", outer_lhs, power(dev.facet_out, 1.0 / 128.0)));
        let holder = surface.powf(q) / (128.0 * 2f64.powf(e) * denom);
        checks.push(BoundCheck::new("holder", ds, Measured::exact(holder)));
        let omega = sphere_area(n);
        if surface >= omega / 2.0 {
            let fin = omega.powf(q) / (4096.0 * denom);
            checks.push(BoundCheck::new("final", ds, Measured::exact(fin)));
        } else {
            checks.push(BoundCheck::not_applicable("final"));
        }
    } else {
        checks.push(BoundCheck::not_applicable("outer"));
        checks.push(BoundCheck::not_applicable("holder"));
        checks.push(BoundCheck::not_applicable("final"));
    }
    AggregateReport { facets: poly.facet_count(), surface_area: surface, ds, checks }
}

#[derive(Clone, Copy, Debug)]
pub struct CertifyBudgets {
    /// Samples per facet for the facet certificates.
    pub facet_samples: u64,
    /// Total facet samples of the deviation estimate (and sphere samples
    /// when the radial estimator does not apply).
    pub deviation_samples: u64,
}

impl Default for CertifyBudgets {
    fn default() -> Self {
        Self { facet_samples: 20_000, deviation_samples: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolytopeCertification {
    pub dim: usize,
    pub facets: usize,
    pub vertices: usize,
    pub outer_applicable: bool,
    pub certificates: Vec<FacetCertificate>,
    pub aggregate: AggregateReport,
    pub aggregate_rerun: bool,
}

impl PolytopeCertification {
    pub fn pointwise_violations(&self) -> u64 {
        self.certificates.iter().map(|c| c.pointwise_violations).sum()
    }

    pub fn pointwise_checked(&self) -> u64 {
        self.certificates.iter().map(|c| c.pointwise_checked).sum()
    }

    /// Every certificate outcome (facet inner, facet outer, aggregates).
    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> + '_ {
        self.certificates
            .iter()
            .flat_map(|c| [c.inner, c.outer])
            .chain(self.aggregate.checks.iter().map(|c| c.outcome))
    }
}

fn deviation_budgets(samples: u64) -> Budgets {
    Budgets { sphere_samples: samples, facet_samples: samples, volume_samples: 0, sphere_method: SphereMethod::Radial }
}

/// Facet certificates plus aggregate checks against the unit ball. A
/// non-passing aggregate triggers one re-run of the deviation at 10× budget.
pub fn certify(n: usize, poly: &Polytope, stream: SeededStream, budgets: &CertifyBudgets) -> Result<PolytopeCertification> {
    let certificates = facet_certificates(n, poly, stream.child(0), budgets.facet_samples)?;
    let dev = delta_s(n, 1.0, poly, stream.child(1), &deviation_budgets(budgets.deviation_samples))?;
    let mut aggregate = aggregate_lower_bound(n, poly, &dev);
    let mut aggregate_rerun = false;
    if aggregate.checks.iter().any(|c| matches!(c.outcome, Outcome::Fail | Outcome::Inconclusive)) {
        let b = deviation_budgets(budgets.deviation_samples * RERUN_FACTOR);
        let dev = delta_s(n, 1.0, poly, stream.child(2), &b)?;
        aggregate = aggregate_lower_bound(n, poly, &dev);
        aggregate_rerun = true;
    }
    Ok(PolytopeCertification {
        dim: n,
        facets: poly.facet_count(),
        vertices: poly.vertex_count(),
        outer_applicable: outer_preconditions(poly),
        certificates,
        aggregate,
        aggregate_rerun,
    })
}

/// Random polytope for certification: `points` directions on the sphere
/// with radii uniform in `[r_min, r_max]`, redrawn (child substreams) until
/// the origin is interior.
pub fn random_certify_polytope(n: usize, points: usize, r_min: f64, r_max: f64, stream: SeededStream) -> Result<Polytope> {
    if !(0.0 < r_min && r_min <= r_max) {
        return Err(Error::InvalidArgument(format!("bad radius range [{r_min}, {r_max}]")));
    }
    for attempt in 0..64u64 {
        let mut rng = stream.child(attempt).rng();
        let pts: Vec<Vec<f64>> = (0..points)
            .map(|_| {
                let mut p = vec![0.0; n];
                let r = r_min + (r_max - r_min) * rng.random::<f64>();
                crate::sampling::sphere_point(&mut rng, r, &mut p);
                p
            })
            .collect();
        match crate::hull::convex_hull(&pts) {
            Ok(p) if p.origin_in_interior() => return Ok(p),
            Ok(_) | Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateInput("no draw contained the origin in 64 attempts".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classification() {
        assert_eq!(classify(Measured { mean: 1.0, stderr: 0.1 }), Outcome::Pass);
        assert_eq!(classify(Measured { mean: 0.1, stderr: 0.1 }), Outcome::Inconclusive);
        assert_eq!(classify(Measured { mean: -0.1, stderr: 0.1 }), Outcome::Inconclusive);
        assert_eq!(classify(Measured { mean: -1.0, stderr: 0.1 }), Outcome::Fail);
        assert_eq!(classify(Measured::exact(0.0)), Outcome::Pass);
    }

    #[test]
    fn cube_outer_certificates_pass() {
        let c = Polytope::hypercube(3, 1.0).unwrap();
        let certs = facet_certificates(3, &c, SeededStream::new(1, 0), 20_000).unwrap();
        for cert in &certs {
            assert_eq!(cert.outer, Outcome::Pass);
            assert_eq!(cert.inner, Outcome::Pass);
            assert_eq!(cert.area_out.mean, 4.0);
            let r = cert.r_area.unwrap();
            assert!((r.mean - 4.0 * PI / 6.0).abs() < 4.0 * r.stderr, "{r:?}");
            assert_eq!(cert.pointwise_violations, 0);
        }
    }

    #[test]
    fn octahedron_inner_certificates_pass() {
        let o = Polytope::cross_polytope(3, 1.0).unwrap();
        let certs = facet_certificates(3, &o, SeededStream::new(2, 0), 20_000).unwrap();
        for cert in &certs {
            assert_eq!(cert.inner, Outcome::Pass);
            assert!((cert.area_in.mean - 3f64.sqrt() / 2.0).abs() < 1e-12);
            assert!(cert.t_area.mean >= cert.area_in.mean);
            assert_eq!(cert.pointwise_violations, 0);
        }
    }

    #[test]
    fn outer_not_applicable_without_origin() {
        let c = Polytope::hypercube(3, 0.5).unwrap().translated(&[2.0, 0.0, 0.0]);
        let certs = facet_certificates(3, &c, SeededStream::new(3, 0), 1000).unwrap();
        assert!(certs.iter().all(|c| c.outer == Outcome::NotApplicable && c.r_area.is_none()));
    }

    #[test]
    fn empty_intersections() {
        let c = Polytope::hypercube(3, 1.0).unwrap();
        assert!(matches!(t_image_area(3, &c, 0, SeededStream::new(0, 0), 100), Err(Error::EmptyIntersection(_))));
        let o = Polytope::cross_polytope(3, 1.0).unwrap();
        assert!(matches!(r_image_area(3, &o, 0, SeededStream::new(0, 0), 100), Err(Error::EmptyIntersection(_))));
    }

    #[test]
    fn cube_aggregate_values() {
        let c = Polytope::hypercube(3, 1.0).unwrap();
        let cert = certify(3, &c, SeededStream::new(4, 0), &CertifyBudgets { facet_samples: 2000, deviation_samples: 2000 }).unwrap();
        let fin = cert.aggregate.checks.iter().find(|c| c.name == "final").unwrap();
        assert!((fin.rhs.mean - 0.0020453077171808547).abs() < 1e-12);
        assert!((fin.lhs.mean - (24.0 - 4.0 * PI)).abs() < 1e-12);
        assert!(cert.outcomes().all(|o| o != Outcome::Fail));
    }
}
