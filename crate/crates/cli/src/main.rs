//! `ballapprox`: experiment runner for random-polytope approximation of the
//! Euclidean ball.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use ballapprox::deviation::{delta_s, Budgets, SphereMethod};
use ballapprox::experiment::{
    run_calibration_check, run_certify, run_mueller, run_sweep, ExperimentConfig, Mode, RadiusPolicy,
};
use ballapprox::geometry::{calibrate_gamma, cap_height_from_area, sphere_area, CapGeometry};
use ballapprox::lowerbound::CertifyBudgets;
use ballapprox::sampling::{miles_moment, miles_monte_carlo, random_polytope, wendel_monte_carlo, wendel_probability};
use ballapprox::{Error, Polytope, SeededStream};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{json_string, Cell, Table};

#[derive(Parser, Debug)]
#[command(name = "ballapprox", version, about = "Random polytopes versus the Euclidean ball: deviations, calibration and lower-bound certificates")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Ambient dimension n.
    #[arg(long, short = 'n', global = true, default_value_t = 3)]
    dim: usize,
    /// Master seed; every trial uses its own derived substream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Add a wall_time column (makes outputs run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Uniform,
    Radial,
}

impl From<MethodArg> for SphereMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Uniform => SphereMethod::Uniform,
            MethodArg::Radial => SphereMethod::Radial,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    ShrunkBall,
    UnitBall,
    Inscribed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GammaArg {
    Analytic,
    Mc,
    Fixed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Shape {
    Cube,
    Cross,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spherical cap table: height p, radius r, normalized area s.
    Cap {
        /// Cap heights; defaults to an 11-point grid on [0, 1].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Vec<f64>,
    },
    /// Analytic shrink factor γ(n, N), optionally against Monte Carlo.
    Calibrate {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<usize>,
        /// Random polytopes per N for the Monte Carlo γ (0 skips it).
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Probability that the origin is outside the hull of N sphere points.
    Wendel {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Second moment of the volume of a random inscribed simplex.
    Miles {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
    },
    /// Symmetric surface-area deviation of one polytope from rB.
    ///
    /// Columns: n,radius,vertices,facets,method,ds_mean,ds_stderr,
    /// sphere_in,sphere_in_stderr,sphere_out,sphere_out_stderr,facet_in,
    /// facet_in_stderr,facet_out,facet_out_stderr,dv_mean,dv_stderr,
    /// sphere_samples,facet_samples
    Deviation {
        /// Polytope JSON ({dim, vertices, facets:[{normal, offset, vertices}]}).
        #[arg(long, conflicts_with_all = ["points", "shape"])]
        load: Option<PathBuf>,
        /// Random inscribed polytope with this many vertices.
        #[arg(long, conflicts_with = "shape")]
        points: Option<usize>,
        #[arg(long, value_enum)]
        shape: Option<Shape>,
        /// Half edge of the cube or vertex radius of the cross-polytope.
        #[arg(long, default_value_t = 1.0)]
        size: f64,
        /// Write the polytope used to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 1_000_000)]
        sphere_samples: u64,
        #[arg(long, default_value_t = 1_000_000)]
        facet_samples: u64,
        #[arg(long, default_value_t = 0)]
        volume_samples: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        method: MethodArg,
    },
    /// Δ_s against N for random inscribed polytopes; fits the log-log slope.
    ///
    /// CSV columns: n,N,gamma,radius,trials,ds_mean,ds_stderr,sphere_in,
    /// sphere_in_stderr,sphere_out,sphere_out_stderr,facet_in,
    /// facet_in_stderr,facet_out,facet_out_stderr,hull_facets,seed,status
    /// [,wall_time]. The slope goes to stderr (CSV) or the "fit" key (JSON).
    Sweep {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<usize>,
        #[arg(long, value_enum, default_value = "shrunk-ball")]
        mode: ModeArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 100_000)]
        sphere_samples: u64,
        #[arg(long, default_value_t = 100_000)]
        facet_samples: u64,
        #[arg(long, value_enum, default_value = "uniform")]
        method: MethodArg,
        /// How γ is chosen in shrunk-ball mode.
        #[arg(long, value_enum, default_value = "analytic")]
        gamma: GammaArg,
        /// Ball radius for --gamma fixed.
        #[arg(long)]
        radius: Option<f64>,
        /// Pilot polytopes for --gamma mc.
        #[arg(long, default_value_t = 200)]
        pilot: usize,
        /// Weight the fit by inverse relative variance.
        #[arg(long)]
        weighted: bool,
    },
    /// Scaled surface deficit N^{2/(n-1)}(ω − E area) against its limit.
    Mueller {
        #[arg(long, value_delimiter = ',', required = true)]
        points: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Facet and aggregate lower-bound certificates for random polytopes.
    Certify {
        /// Largest allowed facet count M.
        #[arg(long, default_value_t = 50)]
        max_facets: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 20_000)]
        facet_samples: u64,
        #[arg(long, default_value_t = 200_000)]
        deviation_samples: u64,
    },
}

enum Emit {
    Table(Table, Option<serde_json::Value>),
    Json(serde_json::Value),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::AsymptoticInvalid { .. } | Error::DegenerateInput(_) | Error::EmptyIntersection(_) => 3,
        _ => 2,
    }
}

fn measured_cells(m: ballapprox::Measured) -> [Cell; 2] {
    [m.mean.into(), m.stderr.into()]
}

fn run(cli: &Cli) -> Result<Emit, Error> {
    let c = &cli.common;
    let n = c.dim;
    match &cli.command {
        Command::Cap { p } => {
            let grid: Vec<f64> = if p.is_empty() { (0..=10).map(|i| i as f64 / 10.0).collect() } else { p.clone() };
            let omega = sphere_area(n);
            let mut t = Table::new(vec!["n", "p", "r", "s", "area", "p_inverse", "roundtrip_error"]);
            for &h in &grid {
                let cap = CapGeometry::from_height(n, h)?;
                let back = cap_height_from_area(n, cap.s)?;
                t.push(vec![
                    n.into(),
                    h.into(),
                    cap.r.into(),
                    cap.s.into(),
                    (cap.s * omega).into(),
                    back.into(),
                    (back - h).abs().into(),
                ]);
            }
            Ok(Emit::Table(t, None))
        }
        Command::Calibrate { points, trials } => {
            let rows = run_calibration_check(n, points, *trials, c.seed)?;
            let mut t = Table::new(vec![
                "n",
                "N",
                "status",
                "gamma",
                "gamma_lower",
                "gamma_upper",
                "in_bracket",
                "gamma_mc",
                "gamma_mc_stderr",
                "gamma_scaled",
                "gamma_mc_scaled",
                "relative_difference",
            ]);
            for r in rows {
                t.push(vec![
                    r.n.into(),
                    r.points.into(),
                    r.status.into(),
                    r.gamma.into(),
                    r.gamma_lower.into(),
                    r.gamma_upper.into(),
                    r.in_bracket.into(),
                    r.gamma_mc.map(|m| m.mean).into(),
                    r.gamma_mc.map(|m| m.stderr).into(),
                    r.scaled_gamma.into(),
                    r.scaled_gamma_mc.into(),
                    r.relative_difference.into(),
                ]);
            }
            Ok(Emit::Table(t, None))
        }
        Command::Wendel { points, trials } => {
            let mut t = Table::new(vec!["n", "N", "exact", "mc", "mc_stderr", "z"]);
            for &np in points {
                let exact = wendel_probability(n, np as u64);
                let (mc, se, z) = if *trials > 0 {
                    let s = SeededStream::new(c.seed, 0).child(np as u64);
                    let (q, se) = wendel_monte_carlo(n, np, *trials, s)?;
                    let z = if se > 0.0 { (q - exact) / se } else { 0.0 };
                    (Some(q), Some(se), Some(z))
                } else {
                    (None, None, None)
                };
                t.push(vec![n.into(), np.into(), exact.into(), mc.into(), se.into(), z.into()]);
            }
            Ok(Emit::Table(t, None))
        }
        Command::Miles { radius, trials } => {
            if *trials == 0 || radius.is_nan() || *radius <= 0.0 {
                return Err(Error::InvalidArgument("need trials >= 1 and radius > 0".into()));
            }
            let exact = miles_moment(n, *radius);
            let (mc, se) = miles_monte_carlo(n, *radius, *trials, SeededStream::new(c.seed, 0));
            let mut t = Table::new(vec!["n", "radius", "trials", "exact", "mc", "mc_stderr", "z"]);
            let z = if se > 0.0 { (mc - exact) / se } else { 0.0 };
            t.push(vec![n.into(), (*radius).into(), (*trials).into(), exact.into(), mc.into(), se.into(), z.into()]);
            Ok(Emit::Table(t, None))
        }
        Command::Deviation {
            load,
            points,
            shape,
            size,
            dump,
            radius,
            sphere_samples,
            facet_samples,
            volume_samples,
            method,
        } => {
            let poly = if let Some(path) = load {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
                Polytope::from_json(&text)?
            } else if let Some(np) = points {
                random_polytope(n, *np, 1.0, SeededStream::new(c.seed, 0))?
            } else {
                match shape.unwrap_or(Shape::Cube) {
                    Shape::Cube => Polytope::hypercube(n, *size)?,
                    Shape::Cross => Polytope::cross_polytope(n, *size)?,
                }
            };
            if let Some(path) = dump {
                std::fs::write(path, poly.to_json())
                    .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
            }
            let budgets = Budgets {
                sphere_samples: *sphere_samples,
                facet_samples: *facet_samples,
                volume_samples: *volume_samples,
                sphere_method: (*method).into(),
            };
            let d = delta_s(poly.dim, *radius, &poly, SeededStream::new(c.seed, 1), &budgets)?;
            let mut t = Table::new(vec![
                "n",
                "radius",
                "vertices",
                "facets",
                "method",
                "ds_mean",
                "ds_stderr",
                "sphere_in",
                "sphere_in_stderr",
                "sphere_out",
                "sphere_out_stderr",
                "facet_in",
                "facet_in_stderr",
                "facet_out",
                "facet_out_stderr",
                "dv_mean",
                "dv_stderr",
                "sphere_samples",
                "facet_samples",
            ]);
            let mut row = vec![
                poly.dim.into(),
                (*radius).into(),
                poly.vertex_count().into(),
                poly.facet_count().into(),
                match d.sphere_method {
                    SphereMethod::Uniform => "uniform",
                    SphereMethod::Radial => "radial",
                }
                .into(),
                d.ds_mean.into(),
                d.ds_stderr.into(),
            ];
            for m in [d.sphere_in, d.sphere_out, d.facet_in, d.facet_out] {
                row.extend(measured_cells(m));
            }
            row.push(d.dv.map(|m| m.mean).into());
            row.push(d.dv.map(|m| m.stderr).into());
            row.push(d.sphere_samples.into());
            row.push(d.facet_samples.into());
            t.push(row);
            Ok(Emit::Table(t, None))
        }
        Command::Sweep {
            points,
            mode,
            trials,
            sphere_samples,
            facet_samples,
            method,
            gamma,
            radius,
            pilot,
            weighted,
        } => {
            let mode = match mode {
                ModeArg::ShrunkBall => Mode::ShrunkBall,
                ModeArg::UnitBall => Mode::UnitBall,
                ModeArg::Inscribed => Mode::Inscribed,
            };
            let radius = match gamma {
                GammaArg::Analytic => RadiusPolicy::Analytic,
                GammaArg::Mc => RadiusPolicy::MonteCarlo { pilot: *pilot },
                GammaArg::Fixed => RadiusPolicy::Fixed(
                    radius.ok_or_else(|| Error::InvalidArgument("--gamma fixed needs --radius".into()))?,
                ),
            };
            let cfg = ExperimentConfig {
                n,
                points: points.clone(),
                mode,
                trials: *trials,
                sphere_samples: *sphere_samples,
                facet_samples: *facet_samples,
                sphere_method: (*method).into(),
                radius,
                seed: c.seed,
                weighted_fit: *weighted,
            };
            cfg.validate()?;
            if mode == Mode::ShrunkBall && radius == RadiusPolicy::Analytic {
                // every N must calibrate before any work is done
                for &np in points {
                    calibrate_gamma(n, np as u64)?;
                }
            }
            let result = run_sweep(&cfg)?;
            let mut columns = vec![
                "n",
                "N",
                "gamma",
                "radius",
                "trials",
                "ds_mean",
                "ds_stderr",
                "sphere_in",
                "sphere_in_stderr",
                "sphere_out",
                "sphere_out_stderr",
                "facet_in",
                "facet_in_stderr",
                "facet_out",
                "facet_out_stderr",
                "hull_facets",
                "seed",
                "status",
            ];
            if c.timing {
                columns.push("wall_time");
            }
            let mut t = Table::new(columns);
            for r in &result.records {
                let mut row: Vec<Cell> = vec![
                    r.n.into(),
                    r.points.into(),
                    r.gamma.into(),
                    r.radius.into(),
                    r.trials.into(),
                    r.ds_mean.into(),
                    r.ds_stderr.into(),
                ];
                for m in [r.sphere_in, r.sphere_out, r.facet_in, r.facet_out] {
                    row.extend(measured_cells(m));
                }
                row.push(r.hull_facets.into());
                row.push(r.seed.into());
                row.push(r.status.clone().into());
                if c.timing {
                    row.push(r.wall_time.into());
                }
                t.push(row);
            }
            let fit = serde_json::to_value(result.fit).unwrap();
            Ok(Emit::Table(t, Some(fit)))
        }
        Command::Mueller { points, trials } => {
            let rows = run_mueller(n, points, *trials, c.seed)?;
            let mut t = Table::new(vec![
                "n",
                "N",
                "trials",
                "mean_surface",
                "mean_surface_stderr",
                "deficit",
                "deficit_stderr",
                "scaled",
                "scaled_stderr",
                "constant",
                "relative_error",
                "nonpositive_trials",
            ]);
            for r in rows {
                let mut row: Vec<Cell> = vec![r.n.into(), r.points.into(), r.trials.into()];
                row.extend(measured_cells(r.mean_surface));
                row.extend(measured_cells(r.deficit));
                row.extend(measured_cells(r.scaled));
                row.push(r.constant.into());
                row.push(r.relative_error.into());
                row.push(r.nonpositive_trials.into());
                t.push(row);
            }
            Ok(Emit::Table(t, None))
        }
        Command::Certify { max_facets, count, facet_samples, deviation_samples } => {
            let budgets = CertifyBudgets { facet_samples: *facet_samples, deviation_samples: *deviation_samples };
            let report = run_certify(n, *max_facets, *count, c.seed, &budgets)?;
            if c.format == Some(Format::Csv) {
                let mut t = Table::new(vec![
                    "index",
                    "points",
                    "facets",
                    "outer_applicable",
                    "pass",
                    "inconclusive",
                    "fail",
                    "not_applicable",
                    "pointwise_violations",
                ]);
                for e in &report.entries {
                    let mut tally = ballapprox::experiment::Tally::default();
                    e.certification.outcomes().for_each(|o| tally.add(o));
                    t.push(vec![
                        e.index.into(),
                        e.points.into(),
                        e.certification.facets.into(),
                        e.certification.outer_applicable.into(),
                        tally.pass.into(),
                        tally.inconclusive.into(),
                        tally.fail.into(),
                        tally.not_applicable.into(),
                        e.certification.pointwise_violations().into(),
                    ]);
                }
                return Ok(Emit::Table(t, None));
            }
            Ok(Emit::Json(serde_json::to_value(&report).unwrap()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.common.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let emitted = match run(&cli) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.tag());
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match (emitted, cli.common.format) {
        (Emit::Table(t, extra), Some(Format::Json)) => {
            let mut v = serde_json::Map::new();
            v.insert("rows".into(), t.to_json_value());
            if let Some(fit) = extra {
                v.insert("fit".into(), fit);
            }
            json_string(&serde_json::Value::Object(v))
        }
        (Emit::Table(t, extra), _) => {
            if let Some(fit) = extra.filter(|f| !f.is_null()) {
                eprintln!("# fit {}", serde_json::to_string(&fit).unwrap());
            }
            t.to_csv()
        }
        (Emit::Json(v), _) => json_string(&v),
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
