//! `beamcov` command-line front end.
//!
//! Exit status: 0 on success, 1 when a value fails validation, 2 when the
//! arguments cannot be parsed. Relative output paths are resolved against
//! `BEAMCOV_OUT_DIR` when that variable is set.

use crate::baselines::SamplingConfig;
use crate::beam::{BeamWeights, Scheme};
use crate::composite::MultiRegionSpec;
use crate::error::{invalid, Result};
use crate::evaluator::{
    benchmark, parse_schemes, pattern_grid, run_scheme, worst_case_gain, DesignReport, EvalRegion, GridSpec,
    Scenario, DEFAULT_POINTS_PER_BEAMWIDTH,
};
use crate::ff_design::{rolloff_approx, rolloff_band, unconstrained_gain_direct, unconstrained_gain_ff, AngularRegion};
use crate::geometry::{build_array, ArrayConfig};
use crate::io::{load_weights, save_pattern, save_report, save_weights};
use crate::nf_design::{range_gain_closed_form, range_gain_direct, RangeRegion, DEFAULT_THETA_TH};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

/// Environment variable that relocates relative output paths.
pub const OUT_DIR_ENV: &str = "BEAMCOV_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "beamcov", version, about = "Closed-form beam coverage design for uniform linear arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design a weight vector and report its worst-case gain.
    Design {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "proposed")]
        scheme: String,
        /// Weights CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Evaluate weights read from a CSV file over the target region.
    Evaluate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Weights CSV input.
        #[arg(long)]
        weights: PathBuf,
        #[command(flatten)]
        outputs: OutputArgs,
    },
    /// Time several schemes and compare their worst-case gains.
    Benchmark {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "proposed,dft,sampling")]
        schemes: String,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Roll-off curves: exact convolution, piecewise model, direct sum.
    Rolloff {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 30.0)]
        f_ghz: f64,
        #[arg(long, default_value_t = 0.2)]
        mu: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Range profiles of angle-only designs at a near-field reference point.
    Defocus {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 30.0)]
        f_ghz: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta0: f64,
        /// Reference range (m).
        #[arg(long, default_value_t = 15.0)]
        r0: f64,
        /// Comma-separated angular half-widths.
        #[arg(long, default_value = "0.0125,0.05,0.1")]
        mus: String,
        #[arg(long, default_value_t = 10.0)]
        r_min: f64,
        #[arg(long, default_value_t = 100.0)]
        r_max: f64,
        #[arg(long, default_value_t = 91)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Far,
    Near,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "far")]
    mode: Mode,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 30.0)]
    f_ghz: f64,
    /// Transmit power P_t.
    #[arg(long, default_value_t = 1.0)]
    pt: f64,
    /// Lower spatial angle (default -0.3 far, -0.15 near).
    #[arg(long, allow_negative_numbers = true)]
    theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta_max: Option<f64>,
    /// Inverse-range bounds (1/m).
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["r_min", "r_max"])]
    xi_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    xi_max: Option<f64>,
    /// Range bounds (m); default 17 to 23 in near mode.
    #[arg(long, allow_negative_numbers = true)]
    r_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r_max: Option<f64>,
    /// Read angles as physical degrees, converted by theta = sin(phi).
    #[arg(long)]
    degrees: bool,
    /// Samples per dimension of the sampling baseline.
    #[arg(long, default_value_t = 20)]
    s: usize,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    /// SCA stopping tolerance (default 1e-4 sqrt(P_t)).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_THETA_TH)]
    theta_th: f64,
    /// Sub-regions for multi-region designs, as `lo:hi,lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    regions: Option<String>,
    /// Superposition weights, one per sub-region (default equal).
    #[arg(long)]
    betas: Option<String>,
    /// Verification grid points per resolution cell.
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_BEAMWIDTH)]
    ppb: usize,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Pattern CSV over the verification grid.
    #[arg(long)]
    pattern: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Fully resolved inputs, echoed into every report.
#[derive(Debug, Clone, Serialize)]
struct ScenarioSpec {
    command: String,
    mode: Mode,
    n: usize,
    f_ghz: f64,
    pt: f64,
    theta_min: f64,
    theta_max: f64,
    xi_min: f64,
    xi_max: f64,
    degrees: bool,
    schemes: Vec<Scheme>,
    s: usize,
    iters: usize,
    eps: f64,
    theta_th: f64,
    regions: Vec<[f64; 2]>,
    betas: Vec<f64>,
    points_per_beamwidth: usize,
    repeats: Option<usize>,
    weights_in: Option<String>,
    weights_out: Option<String>,
    pattern_out: Option<String>,
}

struct Resolved {
    cfg: ArrayConfig,
    scenario: Scenario,
    spec: ScenarioSpec,
}

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid(format!("--{name}: '{s}' is not a number")))
        })
        .collect()
}

fn resolve(args: &ScenarioArgs, command: &str, schemes: Vec<Scheme>) -> Result<Resolved> {
    let cfg = build_array(args.n, args.f_ghz * 1e9, args.pt)?;
    let angle = |v: f64| if args.degrees { v.to_radians().sin() } else { v };
    let (def_lo, def_hi) = match args.mode {
        Mode::Far => (-0.3, 0.3),
        Mode::Near => (-0.15, 0.15),
    };

    let mut regions = Vec::new();
    if let Some(text) = &args.regions {
        for part in text.split(',').filter(|s| !s.trim().is_empty()) {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| invalid(format!("--regions: '{part}' is not of the form lo:hi")))?;
            let lo = parse_list("regions", lo)?;
            let hi = parse_list("regions", hi)?;
            if lo.len() != 1 || hi.len() != 1 {
                return Err(invalid(format!("--regions: '{part}' is not of the form lo:hi")));
            }
            regions.push([angle(lo[0]), angle(hi[0])]);
        }
    }
    let hull = |f: fn(&[f64; 2]) -> f64, pick: fn(f64, f64) -> f64| regions.iter().map(f).reduce(pick);
    let theta_min = args
        .theta_min
        .map(angle)
        .or_else(|| hull(|r| r[0], f64::min))
        .unwrap_or(def_lo);
    let theta_max = args
        .theta_max
        .map(angle)
        .or_else(|| hull(|r| r[1], f64::max))
        .unwrap_or(def_hi);
    let ang = AngularRegion::new(theta_min, theta_max)?;

    let explicit_range = args.xi_min.is_some() || args.xi_max.is_some() || args.r_min.is_some() || args.r_max.is_some();
    let rng = match args.mode {
        Mode::Far if explicit_range => {
            return Err(invalid("range bounds require --mode near"));
        }
        Mode::Far => RangeRegion::far_field(),
        Mode::Near => match (args.xi_min, args.xi_max, args.r_min, args.r_max) {
            (Some(a), Some(b), None, None) => RangeRegion::new(a, b)?,
            (None, None, Some(a), Some(b)) => RangeRegion::from_ranges(a, b)?,
            (None, None, None, None) => RangeRegion::from_ranges(17.0, 23.0)?,
            _ => return Err(invalid("give both --xi-min/--xi-max or both --r-min/--r-max")),
        },
    };

    let mut sampling = SamplingConfig::with_samples(&cfg, args.s);
    sampling.max_iters = args.iters;
    if let Some(eps) = args.eps {
        sampling.tolerance = eps;
    }
    sampling.validate()?;

    let betas = match &args.betas {
        Some(text) => parse_list("betas", text)?,
        None => vec![1.0; regions.len()],
    };
    let multi_region = if regions.is_empty() {
        if schemes.contains(&Scheme::MultiRegion) {
            return Err(invalid("multi-region scheme needs --regions"));
        }
        None
    } else {
        let pairs = regions
            .iter()
            .map(|r| Ok((AngularRegion::new(r[0], r[1])?, rng)))
            .collect::<Result<Vec<_>>>()?;
        Some(MultiRegionSpec::new(pairs, betas.clone(), cfg.num_antennas())?)
    };

    let spec = ScenarioSpec {
        command: command.to_string(),
        mode: args.mode,
        n: args.n,
        f_ghz: args.f_ghz,
        pt: args.pt,
        theta_min,
        theta_max,
        xi_min: rng.xi_min(),
        xi_max: rng.xi_max(),
        degrees: args.degrees,
        schemes,
        s: sampling.num_samples,
        iters: sampling.max_iters,
        eps: sampling.tolerance,
        theta_th: args.theta_th,
        regions,
        betas,
        points_per_beamwidth: args.ppb,
        repeats: None,
        weights_in: None,
        weights_out: None,
        pattern_out: None,
    };
    let scenario = Scenario {
        ang,
        rng,
        theta_th: args.theta_th,
        sampling,
        multi_region,
    };
    Ok(Resolved { cfg, scenario, spec })
}

fn out_path(path: &PathBuf) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.clone(),
    }
}

/// Worst case over the target; multi-region targets take the minimum over their sub-regions.
fn evaluate(r: &Resolved, w: &BeamWeights) -> Result<DesignReport> {
    let ppb = r.spec.points_per_beamwidth;
    match &r.scenario.multi_region {
        Some(spec) if w.scheme == Scheme::MultiRegion => {
            let mut worst: Option<DesignReport> = None;
            for (ang, rng) in spec.regions() {
                let rep = worst_case_gain(&r.cfg, w, &EvalRegion::from_regions(ang, rng), ppb)?;
                if worst.as_ref().is_none_or(|b| rep.worst_case_gain < b.worst_case_gain) {
                    worst = Some(rep);
                }
            }
            Ok(worst.expect("spec has at least one region"))
        }
        _ => worst_case_gain(&r.cfg, w, &r.scenario.eval_region(), ppb),
    }
}

fn write_outputs(r: &Resolved, w: &BeamWeights, outputs: &OutputArgs, report: &DesignReport) -> Result<()> {
    if let Some(p) = &outputs.pattern {
        let grid = GridSpec::for_region(&r.cfg, &r.scenario.eval_region(), r.spec.points_per_beamwidth)?;
        save_pattern(&out_path(p), &pattern_grid(&r.cfg, w, &grid.theta_axis(), &grid.xi_axis())?)?;
    }
    if let Some(p) = &outputs.report {
        save_report(&out_path(p), &r.spec, std::slice::from_ref(report))?;
    }
    Ok(())
}

fn summary(report: &DesignReport) -> String {
    let mut line = format!(
        "{}: worst-case gain {:.4} dB ({:.6}), runtime {:.4} ms",
        report.scheme,
        report.worst_case_gain_db(),
        report.worst_case_gain,
        report.runtime_ms
    );
    if let Some(c) = report.converged {
        line.push_str(if c { ", converged" } else { ", not converged" });
    }
    line
}

fn curve_writer(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(out_path(p))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Design {
            scenario,
            scheme,
            out,
            outputs,
        } => {
            let scheme: Scheme = scheme.parse()?;
            let mut r = resolve(&scenario, "design", vec![scheme])?;
            r.spec.weights_out = out.as_ref().map(|p| out_path(p).display().to_string());
            r.spec.pattern_out = outputs.pattern.as_ref().map(|p| out_path(p).display().to_string());
            let start = Instant::now();
            let (w, converged) = run_scheme(&r.cfg, &r.scenario, scheme)?;
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let mut report = evaluate(&r, &w)?;
            report.runtime_ms = runtime_ms;
            report.converged = converged;
            report.repeats = 1;
            if let Some(p) = &out {
                save_weights(&out_path(p), &w)?;
            }
            write_outputs(&r, &w, &outputs, &report)?;
            for d in &w.diagnostics {
                eprintln!("note: {d}");
            }
            println!("{}", summary(&report));
        }
        Command::Evaluate {
            scenario,
            weights,
            outputs,
        } => {
            let mut r = resolve(&scenario, "evaluate", vec![Scheme::External])?;
            r.spec.weights_in = Some(weights.display().to_string());
            r.spec.pattern_out = outputs.pattern.as_ref().map(|p| out_path(p).display().to_string());
            let w = load_weights(&weights)?;
            let report = evaluate(&r, &w)?;
            write_outputs(&r, &w, &outputs, &report)?;
            println!("{}", summary(&report));
        }
        Command::Benchmark {
            scenario,
            schemes,
            repeats,
            report,
        } => {
            let list = parse_schemes(&schemes)?;
            if list.is_empty() {
                return Err(invalid("--schemes is empty"));
            }
            let mut r = resolve(&scenario, "benchmark", list.clone())?;
            r.spec.repeats = Some(repeats);
            let reports = benchmark(&r.cfg, &r.scenario, &list, repeats, r.spec.points_per_beamwidth)?;
            if let Some(p) = &report {
                save_report(&out_path(p), &r.spec, &reports)?;
            }
            for rep in &reports {
                println!("{}", summary(rep));
            }
        }
        Command::Rolloff { n, f_ghz, mu, points, out } => {
            let cfg = build_array(n, f_ghz * 1e9, 1.0)?;
            if points < 2 {
                return Err(invalid("--points must be at least 2"));
            }
            let span = mu + 4.0 / n as f64;
            let (lo, hi) = rolloff_band(n, mu);
            let mut w = curve_writer(&out)?;
            writeln!(w, "d_theta,convolution,piecewise_model,direct_sum")?;
            let mut worst: f64 = 0.0;
            for i in 0..points {
                let d = -span + 2.0 * span * (i as f64 / (points - 1) as f64);
                let exact = unconstrained_gain_ff(&cfg, mu, d)?;
                let model = rolloff_approx(n, mu, d)?;
                let direct = unconstrained_gain_direct(&cfg, mu, d)?;
                if d.abs() > lo && d.abs() < hi {
                    worst = worst.max((exact - model).abs());
                }
                writeln!(w, "{d:.16e},{exact:.16e},{model:.16e},{direct:.16e}")?;
            }
            w.flush()?;
            eprintln!("rolloff: band ({lo:.6}, {hi:.6}), max in-band model error {worst:.6}");
        }
        Command::Defocus {
            n,
            f_ghz,
            theta0,
            r0,
            mus,
            r_min,
            r_max,
            points,
            out,
        } => {
            let cfg = build_array(n, f_ghz * 1e9, 1.0)?;
            let rng = RangeRegion::from_ranges(r_min, r_max)?;
            if !(r0 > 0.0) {
                return Err(invalid(format!("r0 must be positive, got {r0} m")));
            }
            if points < 2 {
                return Err(invalid("--points must be at least 2"));
            }
            let mus = parse_list("mus", &mus)?;
            let (ra, rb) = (1.0 / rng.xi_max(), 1.0 / rng.xi_min());
            let mut w = curve_writer(&out)?;
            writeln!(w, "range,mu,closed_form,direct_sum")?;
            for &mu in &mus {
                for i in 0..points {
                    let r = ra + (rb - ra) * (i as f64 / (points - 1) as f64);
                    let d_xi = 1.0 / r - 1.0 / r0;
                    let cf = range_gain_closed_form(&cfg, theta0, 1.0 / r0, mu, d_xi)?;
                    let ds = range_gain_direct(&cfg, theta0, 1.0 / r0, mu, d_xi)?;
                    writeln!(w, "{r:.16e},{mu},{cf:.16e},{ds:.16e}")?;
                }
            }
            w.flush()?;
            eprintln!("defocus: {} range profiles written", mus.len());
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => {
                    if !e.render().to_string().contains("Usage:") {
                        eprintln!("\n{}", Cli::command().render_usage());
                    }
                    2
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
