//! Reproducible experiment drivers: convergence sweeps, deficit-constant
//! estimation, γ calibration checks and batch certification.
//!
//! Every trial draws from its own substream `seed → child(N) → child(trial)`
//! and results are reduced in trial order, so outputs do not depend on the
//! thread count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::deviation::{delta_s, Budgets, Measured, SphereMethod};
use crate::error::{Error, Result};
use crate::geometry::{calibrate_gamma, gamma_for_surface_area, mueller_constant, sphere_area};
use crate::lowerbound::{certify, random_certify_polytope, CertifyBudgets, Outcome, PolytopeCertification};
use crate::sampling::{random_polytope, SeededStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Ball of radius `1 − γ` against polytopes inscribed in the unit sphere.
    ShrunkBall,
    /// Unit ball, deviation by Monte Carlo.
    UnitBall,
    /// Unit ball; the polytope is inside, so the deviation is the exact
    /// surface deficit.
    Inscribed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RadiusPolicy {
    Fixed(f64),
    /// `r = 1 − γ` with γ from the asymptotic deficit constant.
    Analytic,
    /// `r = 1 − γ` with γ matching the mean surface area of `pilot` extra
    /// polytopes.
    MonteCarlo { pilot: usize },
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub points: Vec<usize>,
    pub mode: Mode,
    pub trials: usize,
    pub sphere_samples: u64,
    pub facet_samples: u64,
    pub sphere_method: SphereMethod,
    pub radius: RadiusPolicy,
    pub seed: u64,
    pub weighted_fit: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=crate::hull::MAX_DIM).contains(&self.n) {
            return Err(Error::UnsupportedDimension { dim: self.n, min: 2, max: crate::hull::MAX_DIM });
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.points.is_empty() {
            return Err(Error::InvalidArgument("empty point-count list".into()));
        }
        if let Some(&bad) = self.points.iter().find(|&&p| p < self.n + 1) {
            return Err(Error::InvalidArgument(format!("N = {bad} is below n + 1 = {}", self.n + 1)));
        }
        if self.facet_samples == 0 || (self.sphere_method == SphereMethod::Uniform && self.sphere_samples == 0) {
            return Err(Error::InvalidArgument("sample budgets must be at least 1".into()));
        }
        match self.radius {
            RadiusPolicy::Fixed(r) if !(r > 0.0 && r.is_finite()) => {
                Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
            }
            RadiusPolicy::MonteCarlo { pilot: 0 } => Err(Error::InvalidArgument("pilot trials must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub n: usize,
    pub points: usize,
    pub gamma: f64,
    pub radius: f64,
    pub trials: usize,
    pub ds_mean: f64,
    pub ds_stderr: f64,
    pub sphere_in: Measured,
    pub sphere_out: Measured,
    pub facet_in: Measured,
    pub facet_out: Measured,
    pub hull_facets: f64,
    pub seed: u64,
    pub wall_time: f64,
    /// `ok` or an error tag for rows that could not be computed.
    pub status: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub fit: Option<SlopeFit>,
}

/// Least-squares line through `(x, y)` with optional weights; slope stderr
/// from the residual scatter.
pub fn fit_line(x: &[f64], y: &[f64], w: Option<&[f64]>) -> Option<SlopeFit> {
    let k = x.len();
    if k < 2 {
        return None;
    }
    let ones = vec![1.0; k];
    let w = w.unwrap_or(&ones);
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if k > 2 {
        let rss: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (c - intercept - slope * a).powi(2)).sum();
        (rss / (k as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(SlopeFit { slope, stderr, intercept, points: k })
}

fn mean_se(values: &[f64]) -> Measured {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return Measured { mean, stderr: 0.0 };
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Measured { mean, stderr: (var / k).sqrt() }
}

fn trial_stream(seed: u64, points: usize, trial: usize) -> SeededStream {
    SeededStream::new(seed, 0).child(points as u64).child(trial as u64)
}

fn surface_areas(n: usize, points: usize, trials: usize, seed: u64, offset: usize) -> Result<Vec<(f64, usize)>> {
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let p = random_polytope(n, points, 1.0, trial_stream(seed, points, offset + t))?;
            Ok((p.surface_area(), p.facet_count()))
        })
        .collect()
}

fn sweep_row(cfg: &ExperimentConfig, points: usize) -> Result<SweepRecord> {
    let n = cfg.n;
    let start = Instant::now();
    let gamma = match (cfg.mode, cfg.radius) {
        (Mode::UnitBall | Mode::Inscribed, _) => 0.0,
        (Mode::ShrunkBall, RadiusPolicy::Fixed(r)) => 1.0 - r,
        (Mode::ShrunkBall, RadiusPolicy::Analytic) => calibrate_gamma(n, points as u64)?.gamma,
        (Mode::ShrunkBall, RadiusPolicy::MonteCarlo { pilot }) => {
            // pilot polytopes come after the trial substreams
            let areas = surface_areas(n, points, pilot, cfg.seed, cfg.trials)?;
            let mean = areas.iter().map(|a| a.0).sum::<f64>() / pilot as f64;
            gamma_for_surface_area(n, mean)?
        }
    };
    let radius = 1.0 - gamma;
    let omega = sphere_area(n);
    let budgets = Budgets {
        sphere_samples: cfg.sphere_samples,
        facet_samples: cfg.facet_samples,
        volume_samples: 0,
        sphere_method: cfg.sphere_method,
    };
    let per_trial: Vec<[f64; 6]> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_stream(cfg.seed, points, t);
            let p = random_polytope(n, points, 1.0, s)?;
            let facets = p.facet_count() as f64;
            if cfg.mode == Mode::Inscribed {
                let a = p.surface_area();
                return Ok([0.0, omega, a, 0.0, omega - a, facets]);
            }
            let d = delta_s(n, radius, &p, s.child(1), &budgets)?;
            Ok([d.sphere_in.mean, d.sphere_out.mean, d.facet_in.mean, d.facet_out.mean, d.ds_mean, facets])
        })
        .collect::<Result<_>>()?;
    let column = |k: usize| mean_se(&per_trial.iter().map(|r| r[k]).collect::<Vec<_>>());
    let (sphere_in, sphere_out, facet_in, facet_out) = (column(0), column(1), column(2), column(3));
    let ds = column(4);
    Ok(SweepRecord {
        n,
        points,
        gamma,
        radius,
        trials: cfg.trials,
        ds_mean: sphere_out.mean + facet_out.mean - sphere_in.mean - facet_in.mean,
        ds_stderr: ds.stderr,
        sphere_in,
        sphere_out,
        facet_in,
        facet_out,
        hull_facets: column(5).mean,
        seed: cfg.seed,
        wall_time: start.elapsed().as_secs_f64(),
        status: "ok".into(),
    })
}

/// One row per N (mean over trials) and the fitted exponent of
/// `log ds_mean` against `log N`. Rows whose calibration or hull fails carry
/// the error tag in `status` and are left out of the fit.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut records = Vec::with_capacity(cfg.points.len());
    for &points in &cfg.points {
        match sweep_row(cfg, points) {
            Ok(r) => records.push(r),
            Err(e @ (Error::InvalidArgument(_) | Error::UnsupportedDimension { .. })) => return Err(e),
            Err(e) => records.push(SweepRecord {
                n: cfg.n,
                points,
                gamma: f64::NAN,
                radius: f64::NAN,
                trials: cfg.trials,
                ds_mean: f64::NAN,
                ds_stderr: f64::NAN,
                sphere_in: Measured::default(),
                sphere_out: Measured::default(),
                facet_in: Measured::default(),
                facet_out: Measured::default(),
                hull_facets: f64::NAN,
                seed: cfg.seed,
                wall_time: 0.0,
                status: e.tag().into(),
            }),
        }
    }
    let usable: Vec<&SweepRecord> = records.iter().filter(|r| r.status == "ok" && r.ds_mean > 0.0).collect();
    let x: Vec<f64> = usable.iter().map(|r| (r.points as f64).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|r| r.ds_mean.ln()).collect();
    let w: Vec<f64> = usable
        .iter()
        .map(|r| {
            let rel = r.ds_stderr / r.ds_mean;
            if rel > 0.0 { 1.0 / (rel * rel) } else { 1.0 }
        })
        .collect();
    let fit = fit_line(&x, &y, cfg.weighted_fit.then_some(&w[..]));
    Ok(SweepResult { records, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuellerRow {
    pub n: usize,
    pub points: usize,
    pub trials: usize,
    pub mean_surface: Measured,
    pub deficit: Measured,
    /// `N^{2/(n−1)} · deficit`.
    pub scaled: Measured,
    pub constant: f64,
    pub relative_error: f64,
    pub nonpositive_trials: usize,
}

/// Scaled surface deficit of random inscribed polytopes, with exact facet
/// areas.
pub fn run_mueller(n: usize, points: &[usize], trials: usize, seed: u64) -> Result<Vec<MuellerRow>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let omega = sphere_area(n);
    let constant = mueller_constant(n);
    points
        .iter()
        .map(|&np| {
            let areas = surface_areas(n, np, trials, seed, 0)?;
            let surf: Vec<f64> = areas.iter().map(|a| a.0).collect();
            let deficits: Vec<f64> = surf.iter().map(|a| omega - a).collect();
            let deficit = mean_se(&deficits);
            let scale = (np as f64).powf(2.0 / (n as f64 - 1.0));
            let scaled = Measured { mean: deficit.mean * scale, stderr: deficit.stderr * scale };
            Ok(MuellerRow {
                n,
                points: np,
                trials,
                mean_surface: mean_se(&surf),
                deficit,
                scaled,
                constant,
                relative_error: scaled.mean / constant - 1.0,
                nonpositive_trials: deficits.iter().filter(|&&d| d <= 0.0).count(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub n: usize,
    pub points: usize,
    pub status: String,
    pub gamma: f64,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
    pub in_bracket: bool,
    pub gamma_mc: Option<Measured>,
    /// `γ · N^{2/(n−1)}` for the analytic value.
    pub scaled_gamma: f64,
    pub scaled_gamma_mc: Option<f64>,
    pub relative_difference: Option<f64>,
}

/// Analytic γ next to the Monte Carlo γ matching the mean surface area of
/// `trials` random polytopes (skipped when `trials == 0`).
pub fn run_calibration_check(n: usize, points: &[usize], trials: usize, seed: u64) -> Result<Vec<CalibrationRow>> {
    let e = 2.0 / (n as f64 - 1.0);
    points
        .iter()
        .map(|&np| {
            let scale = (np as f64).powf(e);
            let analytic = calibrate_gamma(n, np as u64);
            let mc = if trials > 0 && np > n {
                let areas = surface_areas(n, np, trials, seed, 0)?;
                let a = mean_se(&areas.iter().map(|a| a.0).collect::<Vec<_>>());
                let g = gamma_for_surface_area(n, a.mean)?;
                // dγ/dA = −(1−γ)/((n−1) A)
                let dg = (1.0 - g) / ((n as f64 - 1.0) * a.mean) * a.stderr;
                Some(Measured { mean: g, stderr: dg })
            } else {
                None
            };
            Ok(match analytic {
                Ok(c) => CalibrationRow {
                    n,
                    points: np,
                    status: "ok".into(),
                    gamma: c.gamma,
                    gamma_lower: c.gamma_lower,
                    gamma_upper: c.gamma_upper,
                    in_bracket: c.in_bracket(),
                    gamma_mc: mc,
                    scaled_gamma: c.gamma * scale,
                    scaled_gamma_mc: mc.map(|m| m.mean * scale),
                    relative_difference: mc.map(|m| m.mean / c.gamma - 1.0),
                },
                Err(err @ Error::AsymptoticInvalid { .. }) => CalibrationRow {
                    n,
                    points: np,
                    status: err.tag().into(),
                    gamma: f64::NAN,
                    gamma_lower: f64::NAN,
                    gamma_upper: f64::NAN,
                    in_bracket: false,
                    gamma_mc: mc,
                    scaled_gamma: f64::NAN,
                    scaled_gamma_mc: mc.map(|m| m.mean * scale),
                    relative_difference: None,
                },
                Err(err) => return Err(err),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub inconclusive: usize,
    pub fail: usize,
    pub not_applicable: usize,
}

impl Tally {
    pub fn add(&mut self, o: Outcome) {
        match o {
            Outcome::Pass => self.pass += 1,
            Outcome::Inconclusive => self.inconclusive += 1,
            Outcome::Fail => self.fail += 1,
            Outcome::NotApplicable => self.not_applicable += 1,
        }
    }

    pub fn applicable(&self) -> usize {
        self.pass + self.inconclusive + self.fail
    }

    pub fn inconclusive_rate(&self) -> f64 {
        if self.applicable() == 0 {
            0.0
        } else {
            self.inconclusive as f64 / self.applicable() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyEntry {
    pub index: usize,
    pub points: usize,
    pub certification: PolytopeCertification,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyReport {
    pub n: usize,
    pub m_target: usize,
    pub count: usize,
    pub seed: u64,
    pub radius_range: (f64, f64),
    pub inner: Tally,
    pub outer: Tally,
    pub aggregate: Tally,
    pub total: Tally,
    pub pointwise_checked: u64,
    pub pointwise_violations: u64,
    pub entries: Vec<CertifyEntry>,
}

/// Vertex radii of certification polytopes: wide enough that facets cross
/// the unit sphere, inside `2B` so the radial inequality applies.
pub const CERTIFY_RADII: (f64, f64) = (0.8, 1.6);

/// `count` random polytopes with at most `m_target` facets, each certified.
/// The vertex count starts from a dimension-based guess and drops until the
/// facet bound holds.
pub fn run_certify(n: usize, m_target: usize, count: usize, seed: u64, budgets: &CertifyBudgets) -> Result<CertifyReport> {
    if !(2..=crate::hull::MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension { dim: n, min: 2, max: crate::hull::MAX_DIM });
    }
    if m_target < n + 1 {
        return Err(Error::InvalidArgument(format!("a polytope in R^{n} has at least {} facets", n + 1)));
    }
    let (r_min, r_max) = CERTIFY_RADII;
    let start = match n {
        2 => m_target,
        3 => (m_target + 4) / 2,
        _ => (m_target / 3).max(n + 1),
    };
    let entries: Vec<CertifyEntry> = (0..count)
        .map(|i| {
            let base = SeededStream::new(seed, 0).child(i as u64);
            let mut points = start;
            let poly = loop {
                let p = random_certify_polytope(n, points, r_min, r_max, base.child(points as u64))?;
                if p.facet_count() <= m_target || points == n + 1 {
                    break p;
                }
                points -= 1;
            };
            let certification = certify(n, &poly, base.child(u64::MAX), budgets)?;
            Ok(CertifyEntry { index: i, points, certification })
        })
        .collect::<Result<_>>()?;

    let (mut inner, mut outer, mut aggregate) = (Tally::default(), Tally::default(), Tally::default());
    let (mut checked, mut violations) = (0, 0);
    for e in &entries {
        for c in &e.certification.certificates {
            inner.add(c.inner);
            outer.add(c.outer);
        }
        for c in &e.certification.aggregate.checks {
            aggregate.add(c.outcome);
        }
        checked += e.certification.pointwise_checked();
        violations += e.certification.pointwise_violations();
    }
    let total = Tally {
        pass: inner.pass + outer.pass + aggregate.pass,
        inconclusive: inner.inconclusive + outer.inconclusive + aggregate.inconclusive,
        fail: inner.fail + outer.fail + aggregate.fail,
        not_applicable: inner.not_applicable + outer.not_applicable + aggregate.not_applicable,
    };
    Ok(CertifyReport {
        n,
        m_target,
        count,
        seed,
        radius_range: CERTIFY_RADII,
        inner,
        outer,
        aggregate,
        total,
        pointwise_checked: checked,
        pointwise_violations: violations,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_fit_recovers_slope() {
        let x: Vec<f64> = (1..6).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 1.5 * v).collect();
        let f = fit_line(&x, &y, None).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12 && f.stderr < 1e-12);
        assert!(fit_line(&[1.0], &[1.0], None).is_none());
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = ExperimentConfig {
            n: 3,
            points: vec![100],
            mode: Mode::ShrunkBall,
            trials: 0,
            sphere_samples: 10,
            facet_samples: 10,
            sphere_method: SphereMethod::Radial,
            radius: RadiusPolicy::Analytic,
            seed: 1,
            weighted_fit: false,
        };
        assert!(matches!(run_sweep(&cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn small_sweep_identity_and_determinism() {
        let cfg = ExperimentConfig {
            n: 3,
            points: vec![20, 40],
            mode: Mode::ShrunkBall,
            trials: 3,
            sphere_samples: 2000,
            facet_samples: 2000,
            sphere_method: SphereMethod::Uniform,
            radius: RadiusPolicy::Analytic,
            seed: 5,
            weighted_fit: false,
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        for (r, s) in a.records.iter().zip(&b.records) {
            assert_eq!(r.ds_mean, s.ds_mean);
            assert_eq!(r.ds_mean, r.sphere_out.mean + r.facet_out.mean - r.sphere_in.mean - r.facet_in.mean);
        }
    }

    #[test]
    fn certify_empty_batch() {
        let r = run_certify(3, 20, 0, 1, &CertifyBudgets::default()).unwrap();
        assert!(r.entries.is_empty());
        assert_eq!(r.total, Tally::default());
    }
}
