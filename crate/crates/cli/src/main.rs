//! `wpspectrum`: command-line access to the exact and asymptotic statistics
//! of short closed geodesics on random Weil-Petersson surfaces.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage error, 3 data error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use wpspectrum::plot::{write_plot_csv, Series};
use wpspectrum::suites::{self, parse_rat};
use wpspectrum_core::exact::Rat;
use wpspectrum_core::hp::eval_pipoly;
use wpspectrum_core::volumes::VolumeSignature;
use wpspectrum_core::{limits, moments, sim, topology};

#[derive(Parser)]
#[command(name = "wpspectrum", version, about = "Statistics of short closed geodesics on random Weil-Petersson surfaces")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Significant fractional digits in reported high-precision strings
    #[arg(long, global = true, default_value_t = 30)]
    digits: u32,
    /// Dataset file (overrides WPSPECTRUM_DATA and the bundled table)
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Simulation seed
    #[arg(long, global = true, default_value_t = 20160401)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Volume polynomials and volume-estimate validators
    Volumes {
        #[command(subcommand)]
        cmd: VolumesCmd,
    },
    /// Multicurve orbit enumeration
    Orbits {
        #[command(subcommand)]
        cmd: OrbitsCmd,
    },
    /// Exact expected counts and factorial moments
    Moments {
        #[command(subcommand)]
        cmd: MomentsCmd,
    },
    /// Large-genus limit laws
    Limits {
        #[command(subcommand)]
        cmd: LimitsCmd,
    },
    /// Limiting length-spectrum simulator
    Simulate {
        #[command(subcommand)]
        cmd: SimulateCmd,
    },
    /// Aggregate verification
    Verify {
        #[command(subcommand)]
        cmd: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum VolumesCmd {
    /// Print one volume polynomial (and optionally its value at lengths)
    Show {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: u32,
        /// Comma-separated boundary lengths
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<f64>>,
    },
    /// Run a volume validator suite
    Verify {
        #[arg(long)]
        suite: String,
    },
}

#[derive(Subcommand)]
enum OrbitsCmd {
    /// List the orbits of ordered K-tuples of disjoint simple closed curves
    List {
        #[arg(long)]
        g: u32,
        #[arg(long = "K")]
        k: u32,
    },
}

#[derive(Subcommand)]
enum MomentsCmd {
    /// Expected number of simple closed geodesics with length in [a, b]
    Expect {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Joint factorial moment over disjoint windows
    Joint {
        #[arg(long)]
        g: u32,
        /// Intervals as a1:b1,a2:b2,...
        #[arg(long, value_delimiter = ',')]
        intervals: Vec<String>,
        /// Tuple orders r1,r2,...
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u32>,
    },
    /// Second-moment upper bound for the no-short-geodesic probability
    Sysbound {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        c: String,
    },
}

#[derive(Subcommand)]
enum LimitsCmd {
    /// Window mass of the limiting process
    Lambda {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// The limiting expected systole
    SystoleMean {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Limiting probability of a systole below eps
    Thin {
        #[arg(long)]
        eps: f64,
    },
    /// Thick-part comparison constant
    Bm,
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Sample spectra and optionally write them as JSON lines
    Run {
        #[arg(long)]
        cutoff: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        workers: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a statistical verification suite against the limit law
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 6.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Run every module's verification suite and aggregate
    All {
        #[arg(long, default_value_t = 6.0)]
        cutoff: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Write convergence sweeps as CSV plot data
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let digits = cli.digits;
    match cli.command {
        Command::Volumes { cmd } => {
            let table = wpspectrum::resolve_table(cli.data.as_deref())?;
            match cmd {
                VolumesCmd::Show { g, n, lengths } => {
                    let mut payload = json!({
                        "g": g,
                        "n": n,
                    });
                    if n == 0 {
                        let v = table.volume_constant(g, 0)?;
                        payload["exact"] = json!(v.to_string());
                        payload["value"] = json!(eval_pipoly(&v, digits).to_f64());
                    } else {
                        let sig = VolumeSignature::new(g, n)?;
                        let poly = table.volume_polynomial(sig)?;
                        let monomials: Vec<Value> = poly
                            .monomials()
                            .map(|(d, c)| json!({"d": d, "coeff": c.to_string()}))
                            .collect();
                        payload["polynomial"] = json!(monomials);
                        payload["constant"] = json!(table.volume_constant(g, n)?.to_string());
                        if let Some(ls) = lengths {
                            let v = table.volume_value(g, n, &ls, digits)?;
                            payload["lengths"] = json!(ls);
                            payload["value"] = json!(v.to_f64());
                            payload["value_str"] = json!(v.to_decimal_string(digits));
                        }
                    }
                    emit(&cli.format, ok_payload("volumes", payload));
                    Ok(ExitCode::SUCCESS)
                }
                VolumesCmd::Verify { suite } => {
                    let reports = match suite.as_str() {
                        "tau-bound" => vec![suites::tau_bound_suite(&table)],
                        "exp-bound" => vec![suites::exp_bound_suite(&table)],
                        "sinh" => vec![suites::sinh_suite(&table)],
                        "ratio" => vec![suites::ratio_suite(&table)],
                        "alpha" => vec![suites::alpha_suite(&table)],
                        "partition" => vec![suites::partition_suite(&table)],
                        "all" => vec![
                            suites::tau_bound_suite(&table),
                            suites::exp_bound_suite(&table),
                            suites::sinh_suite(&table),
                            suites::ratio_suite(&table),
                            suites::alpha_suite(&table),
                            suites::partition_suite(&table),
                        ],
                        other => return Err(format!("unknown suite: {other}").into()),
                    };
                    finish_reports("volumes", &cli.format, reports)
                }
            }
        }
        Command::Orbits { cmd } => match cmd {
            OrbitsCmd::List { g, k } => {
                let orbits = topology::enumerate_orbits(g, k)?;
                let items: Vec<Value> = orbits
                    .iter()
                    .map(|(s, inv)| {
                        json!({
                            "vertices": s.vertices,
                            "edges": s.edges,
                            "m_gamma": inv.m_gamma,
                            "nonseparating": inv.is_nonseparating_type,
                            "complement": inv.complement_signatures,
                            "gluing_multiplicity": inv.gluing_multiplicity,
                        })
                    })
                    .collect();
                emit(
                    &cli.format,
                    ok_payload("orbits", json!({"g": g, "K": k, "count": items.len(), "orbits": items})),
                );
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Moments { cmd } => {
            let table = wpspectrum::resolve_table(cli.data.as_deref())?;
            match cmd {
                MomentsCmd::Expect { g, a, b } => {
                    let a = parse_rat(&a)?;
                    let b = parse_rat(&b)?;
                    let r = moments::expected_simple_count(&table, g, a, b, digits)?;
                    emit(&cli.format, ok_payload("moments", moment_json(&r, digits)));
                    Ok(ExitCode::SUCCESS)
                }
                MomentsCmd::Joint { g, intervals, orders } => {
                    let mut ivs = Vec::new();
                    for s in &intervals {
                        let (a, b) = s
                            .split_once(':')
                            .ok_or_else(|| format!("interval must be a:b, got {s}"))?;
                        ivs.push((parse_rat(a)?, parse_rat(b)?));
                    }
                    let spec = moments::IntervalSpec::new(ivs, orders)?;
                    let r = moments::joint_factorial_moment(&table, g, &spec, digits)?;
                    emit(&cli.format, ok_payload("moments", moment_json(&r, digits)));
                    Ok(ExitCode::SUCCESS)
                }
                MomentsCmd::Sysbound { g, c } => {
                    let c = parse_rat(&c)?;
                    let r = moments::systole_tail_bound(&table, g, c, digits)?;
                    emit(
                        &cli.format,
                        ok_payload(
                            "moments",
                            json!({
                                "g": r.g,
                                "c": r.c,
                                "bound": r.bound,
                                "mean": r.mean,
                                "second_factorial_moment": r.second_factorial,
                            }),
                        ),
                    );
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Limits { cmd } => match cmd {
            LimitsCmd::Lambda { a, b, tol } => {
                let v = limits::lambda(a, b, tol)?;
                emit(
                    &cli.format,
                    ok_payload(
                        "limits",
                        json!({
                            "a": a,
                            "b": b,
                            "value": v.to_f64(),
                            "value_str": v.value.to_decimal_string(digits),
                            "method_agreement": v.agreement,
                        }),
                    ),
                );
                Ok(ExitCode::SUCCESS)
            }
            LimitsCmd::SystoleMean { tol } => {
                let s = limits::expected_systole_limit(tol)?;
                emit(
                    &cli.format,
                    ok_payload(
                        "limits",
                        json!({
                            "value": s.to_f64(),
                            "value_str": s.value.to_decimal_string(digits),
                            "truncation": s.truncation,
                            "tail_bound": s.tail_bound,
                        }),
                    ),
                );
                Ok(ExitCode::SUCCESS)
            }
            LimitsCmd::Thin { eps } => {
                emit(
                    &cli.format,
                    ok_payload(
                        "limits",
                        json!({"eps": eps, "probability": limits::thin_part_probability(eps)}),
                    ),
                );
                Ok(ExitCode::SUCCESS)
            }
            LimitsCmd::Bm => {
                let (b, p) = limits::bm_thick_probability();
                emit(&cli.format, ok_payload("limits", json!({"b": b, "probability": p})));
                Ok(ExitCode::SUCCESS)
            }
        },
        Command::Simulate { cmd } => match cmd {
            SimulateCmd::Run { cutoff, trials, workers, out } => {
                let cfg = sim::SimConfig::new(cutoff, trials, cli.seed, workers)?;
                let lines = run_parallel(&cfg);
                match out {
                    Some(path) => {
                        std::fs::write(&path, lines)?;
                        emit(
                            &cli.format,
                            ok_payload(
                                "simulate",
                                json!({"trials": trials, "cutoff": cutoff, "out": path}),
                            ),
                        );
                    }
                    None => print!("{lines}"),
                }
                Ok(ExitCode::SUCCESS)
            }
            SimulateCmd::Verify { suite, cutoff, trials } => {
                let cfg = sim::SimConfig::new(cutoff, trials, cli.seed, 1)?;
                let reports = if suite == "all" {
                    suites::all_simulate_suites(&cfg)?
                } else {
                    vec![suites::simulate_suite(&suite, &cfg)?]
                };
                finish_reports("simulate", &cli.format, reports)
            }
        },
        Command::Verify { cmd } => match cmd {
            VerifyCmd::All { cutoff, trials, plot } => {
                let table = wpspectrum::resolve_table(cli.data.as_deref())?;
                let cfg = sim::SimConfig::new(cutoff, trials, cli.seed, 1)?;
                let reports = suites::verify_all(&table, &cfg);
                if let Some(path) = plot {
                    let trend = suites::moment_trend(&table, &zero(), &one());
                    let ratio = wpspectrum_core::volumes::ratio_sequence(&table, 0)
                        .map(|pts| {
                            pts.iter()
                                .map(|p| (p.g as f64, p.residual_times_g2))
                                .collect::<Vec<_>>()
                        })
                        .unwrap_or_default();
                    write_plot_csv(
                        &path,
                        &[
                            Series {
                                name: "moment_gap_times_g".into(),
                                points: trend.iter().map(|p| (p.g as f64, p.gap_times_g)).collect(),
                            },
                            Series { name: "ratio_residual_times_g2".into(), points: ratio },
                        ],
                    )?;
                }
                finish_reports("verify", &cli.format, reports)
            }
        },
    }
}

fn one() -> Rat {
    use num_traits::One;
    Rat::one()
}

fn zero() -> Rat {
    use num_traits::Zero;
    Rat::zero()
}

fn moment_json(r: &moments::MomentResult, digits: u32) -> Value {
    let per_orbit: Vec<Value> = r
        .per_orbit
        .iter()
        .map(|c| {
            json!({
                "orbit": c.orbit_id,
                "m_gamma": c.m_gamma,
                "nonseparating": c.is_nonseparating,
                "exact": c.exact.to_string(),
            })
        })
        .collect();
    json!({
        "g": r.g,
        "exact": r.exact.to_string(),
        "volume": r.volume.to_string(),
        "value": r.value.to_f64(),
        "value_str": r.value.to_decimal_string(digits),
        "limit_prediction": r.limit_prediction,
        "within_simple_regime": r.within_simple_regime,
        "per_orbit": per_orbit,
    })
}

fn ok_payload(module: &str, payload: Value) -> Value {
    json!({
        "module": module,
        "version": env!("CARGO_PKG_VERSION"),
        "status": "ok",
        "payload": payload,
        "diagnostics": [],
    })
}

fn finish_reports(
    module: &str,
    format: &Format,
    reports: Vec<suites::SuiteReport>,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let passed = reports.iter().all(|r| r.passed);
    let mut value = ok_payload(module, suites::reports_to_json(&reports));
    if !passed {
        value["status"] = json!("fail");
    }
    emit(format, value);
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit(format: &Format, value: Value) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
        Format::Csv => {
            // flatten suite reports to name,observed,expected,threshold,pass
            println!("name,observed,expected,threshold,pass");
            if let Some(suites) = value["payload"]["suites"].as_array() {
                for s in suites {
                    let suite = s["suite"].as_str().unwrap_or("");
                    if let Some(checks) = s["checks"].as_array() {
                        for c in checks {
                            println!(
                                "{}:{},{},{},{},{}",
                                suite,
                                c["name"].as_str().unwrap_or(""),
                                c["observed"],
                                c["expected"],
                                c["threshold"],
                                c["pass"]
                            );
                        }
                    }
                }
            } else {
                for (k, v) in value["payload"].as_object().into_iter().flatten() {
                    println!("{k},{v},,,");
                }
            }
        }
    }
}

/// Sample trials in parallel chunks; output is in trial order regardless of
/// the worker count (each trial's stream depends only on seed and index).
fn run_parallel(cfg: &sim::SimConfig) -> String {
    let sampler = std::sync::Arc::new(sim::SpectrumSampler::new(cfg.cutoff));
    let workers = cfg.workers.max(1) as u64;
    let chunk = cfg.trials.div_ceil(workers);
    let mut handles = Vec::new();
    for w in 0..workers {
        let sampler = sampler.clone();
        let seed = cfg.seed;
        let lo = w * chunk;
        let hi = ((w + 1) * chunk).min(cfg.trials);
        handles.push(std::thread::spawn(move || {
            let mut buf = String::new();
            for t in lo..hi {
                let spec = sampler.sample(seed, t);
                buf.push('[');
                for (i, l) in spec.lengths.iter().enumerate() {
                    if i > 0 {
                        buf.push(',');
                    }
                    buf.push_str(&format!("{l}"));
                }
                buf.push_str("]\n");
            }
            buf
        }));
    }
    let mut out = String::new();
    for h in handles {
        out.push_str(&h.join().expect("worker"));
    }
    out
}
