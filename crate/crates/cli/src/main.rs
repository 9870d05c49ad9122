//! `potts`: phase structure of the annealed q-state Potts model on rank-1
//! inhomogeneous random graphs.
//!
//! Every subcommand prints a machine-readable payload (JSON, or CSV where a
//! table is the natural shape) with an `inputs` echo block: feeding those
//! values back reproduces the payload bit for bit. Exit codes: 0 success,
//! 2 usage or precondition failure, 3 numeric failure (the diagnostic starts
//! with the module error name).

mod emit;

use clap::{Parser, Subcommand};
use emit::Obj;
use potts_core::critical::{self, CriticalPoint};
use potts_core::error::{Error, Result};
use potts_core::landscape::{calibrate_counterexample, cubic_crossing_kernel, PottsConfig};
use potts_core::oracle::OracleInstance;
use potts_core::variational;
use potts_core::weights::WeightDistribution;

#[derive(Parser)]
#[command(name = "potts", version, about = "Annealed Potts phase structure on rank-1 random graphs")]
struct Cli {
    /// Reserved. There are no randomized code paths; passing a seed is an error.
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Relative tolerance for expectation quadrature (default 1e-10).
    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    /// Absolute tolerance for root finding (default 1e-12).
    #[arg(long, global = true)]
    root_tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical temperature: Newton on the criticality function at B=0,
    /// equal-area root for B>0.
    Critical {
        /// Weight law, e.g. dirac:lambda=1, pareto:tau=5, uniform:a=1,b=2
        #[arg(long)]
        dist: String,
        /// Number of colors (q >= 3)
        #[arg(long)]
        q: u32,
        /// External field on color 1
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        /// Output format (json)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Phase regime: always ordered, first order, second order, or concave.
    Classify {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        q: u32,
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Pareto smoothing exponent tau(q) with its bound and asymptote.
    TauQ {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Landscape scan: t, F, F', F'' on a geometric grid.
    ScanF2 {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        q: u32,
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        /// Number of grid rows
        #[arg(long)]
        points: usize,
        /// Right end of the grid (default: 1.5x the sign-change scan ceiling)
        #[arg(long)]
        t_max: Option<f64>,
        /// Output format (csv or json)
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Order-parameter sweep over a temperature range with jump detection.
    Sweep {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        q: u32,
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        #[arg(long)]
        beta_min: f64,
        #[arg(long)]
        beta_max: f64,
        #[arg(long)]
        steps: usize,
        /// Output format (csv or json)
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Optimal order parameter at one temperature.
    Solve {
        #[arg(long)]
        dist: String,
        #[arg(long)]
        q: u32,
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Exact finite-n annealed partition function by enumeration.
    Oracle {
        /// Comma-separated weight vector, e.g. 1,1,2,5
        #[arg(long)]
        weights: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        beta: f64,
        #[arg(long = "B", default_value_t = 0.0)]
        field: f64,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Two-atom law calibrated so the landscape curvature vanishes at t=1.
    Counterexample {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        x1: f64,
        #[arg(long)]
        x2: f64,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(payload) => {
            println!("{payload}");
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(if e.is_usage() { 2 } else { 3 });
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    if cli.seed.is_some() {
        return Err(Error::Parse(
            "--seed is reserved: no randomized paths exist".into(),
        ));
    }
    if let Some(t) = cli.rel_tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parse(format!("--rel-tol must be positive, got {t}")));
        }
    }
    if let Some(t) = cli.root_tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parse(format!("--root-tol must be positive, got {t}")));
        }
    }

    match &cli.command {
        Command::Critical { dist, q, field, format } => {
            require_json(format)?;
            let cfg = make_config(cli, dist, *q, *field)?;
            let solve = critical::critical_point(&cfg)?;
            let inputs = inputs_block("critical", &[("dist", dist), ("q", &q.to_string()), ("B", &field.to_string())]);
            Ok(critical_obj(Obj::new().raw("inputs", &inputs), &solve.point)
                .int("iterations", solve.iterations as u128)
                .finish())
        }
        Command::Classify { dist, q, field, format } => {
            require_json(format)?;
            let cfg = make_config(cli, dist, *q, *field)?;
            let report = critical::classify(&cfg)?;
            let inputs = inputs_block("classify", &[("dist", dist), ("q", &q.to_string()), ("B", &field.to_string())]);
            let critical_json = match &report.critical {
                Some(p) => critical_obj(Obj::new(), p).finish(),
                None => "null".to_string(),
            };
            let uncertainty = match report.beta_c_uncertainty {
                Some(u) => emit::num(u),
                None => "null".to_string(),
            };
            Ok(Obj::new()
                .raw("inputs", &inputs)
                .str("regime", report.regime.as_str())
                .raw("critical", &critical_json)
                .raw("beta_c_uncertainty", &uncertainty)
                .raw("jumps", &emit::num_array(&report.jumps))
                .str("detail", &report.detail)
                .finish())
        }
        Command::TauQ { q, format } => {
            require_json(format)?;
            let t = critical::tau_q::<f64>(*q)?;
            let inputs = inputs_block("tau-q", &[("q", &q.to_string())]);
            Ok(Obj::new()
                .raw("inputs", &inputs)
                .num("tau_q", t.tau_q)
                .num("r_q", t.r_q)
                .num("lower_bound", critical::r_q_lower_bound::<f64>(*q))
                .num("asymptotic", critical::r_q_asymptotic::<f64>(*q))
                .num("residual", t.residual)
                .finish())
        }
        Command::ScanF2 { dist, q, field, points, t_max, format } => {
            let fmt = require_table_format(format)?;
            if *points < 2 {
                return Err(Error::InvalidParameter(format!(
                    "--points must be at least 2, got {points}"
                )));
            }
            let cfg = make_config(cli, dist, *q, *field)?;
            let hi = match t_max {
                Some(t) if t.is_finite() && *t > 0.0 => *t,
                Some(t) => {
                    return Err(Error::InvalidParameter(format!(
                        "--t-max must be a positive real, got {t}"
                    )))
                }
                None => default_scan_ceiling(&cfg)?,
            };
            let lo = hi * 1e-6;
            let ratio = (hi / lo).powf(1.0 / (*points as f64 - 1.0));
            let mut rows = Vec::with_capacity(*points);
            let mut t = lo;
            for i in 0..*points {
                let ti = if i + 1 == *points { hi } else { t };
                rows.push((ti, cfg.scr_f(ti)?, cfg.scr_f_d1(ti)?, cfg.scr_f_d2(ti)?));
                t *= ratio;
            }
            let inputs = inputs_block(
                "scan-f2",
                &[("dist", dist), ("q", &q.to_string()), ("B", &field.to_string()), ("points", &points.to_string()), ("t_max", &hi.to_string())],
            );
            match fmt {
                Table::Csv => {
                    let mut out = String::from("t,F,F1,F2\n");
                    for (t, f, f1, f2) in rows {
                        out.push_str(&format!(
                            "{},{},{},{}\n",
                            emit::num(t), emit::num(f), emit::num(f1), emit::num(f2)
                        ));
                    }
                    out.pop();
                    Ok(out)
                }
                Table::Json => {
                    let body: Vec<String> = rows
                        .iter()
                        .map(|&(t, f, f1, f2)| {
                            Obj::new().num("t", t).num("F", f).num("F1", f1).num("F2", f2).finish()
                        })
                        .collect();
                    Ok(Obj::new()
                        .raw("inputs", &inputs)
                        .raw("rows", &format!("[{}]", body.join(",")))
                        .finish())
                }
            }
        }
        Command::Sweep { dist, q, field, beta_min, beta_max, steps, format } => {
            let fmt = require_table_format(format)?;
            let cfg = make_config(cli, dist, *q, *field)?;
            let res = variational::sweep(&cfg, *beta_min, *beta_max, *steps)?;
            let inputs = inputs_block(
                "sweep",
                &[("dist", dist), ("q", &q.to_string()), ("B", &field.to_string()), ("beta_min", &beta_min.to_string()), ("beta_max", &beta_max.to_string()), ("steps", &steps.to_string())],
            );
            match fmt {
                Table::Csv => {
                    let mut out = String::from("beta,s_star,x1,pressure,jump_flag\n");
                    for (i, row) in res.rows.iter().enumerate() {
                        let flag = res.jump_indices.contains(&i);
                        out.push_str(&format!(
                            "{},{},{},{},{}\n",
                            emit::num(row.beta), emit::num(row.s_star), emit::num(row.x1),
                            emit::num(row.pressure), u8::from(flag)
                        ));
                    }
                    out.pop();
                    Ok(out)
                }
                Table::Json => {
                    let body: Vec<String> = res
                        .rows
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            Obj::new()
                                .num("beta", row.beta)
                                .num("s_star", row.s_star)
                                .num("x1", row.x1)
                                .num("pressure", row.pressure)
                                .bool("jump_flag", res.jump_indices.contains(&i))
                                .finish()
                        })
                        .collect();
                    Ok(Obj::new()
                        .raw("inputs", &inputs)
                        .raw("rows", &format!("[{}]", body.join(",")))
                        .raw("jump_indices", &emit::int_array(&res.jump_indices))
                        .finish())
                }
            }
        }
        Command::Solve { dist, q, field, beta, format } => {
            require_json(format)?;
            let cfg = make_config(cli, dist, *q, *field)?;
            let sol = variational::solve(&cfg, *beta)?;
            let inputs = inputs_block(
                "solve",
                &[("dist", dist), ("q", &q.to_string()), ("B", &field.to_string()), ("beta", &beta.to_string())],
            );
            Ok(Obj::new()
                .raw("inputs", &inputs)
                .num("s_star", sol.s_star)
                .num("t_star_scaled", sol.t_star_scaled)
                .raw("y_vector", &emit::num_array(&sol.y_vector))
                .num("x1", sol.x1)
                .num("pressure", sol.pressure)
                .bool("degenerate", sol.degenerate)
                .finish())
        }
        Command::Oracle { weights, q, beta, field, format } => {
            require_json(format)?;
            let ws = parse_weights(weights)?;
            let inst = OracleInstance::new(ws, *q, *beta, *field)?;
            let inputs = inputs_block(
                "oracle",
                &[("weights", weights), ("q", &q.to_string()), ("beta", &beta.to_string()), ("B", &field.to_string())],
            );
            Ok(Obj::new()
                .raw("inputs", &inputs)
                .num("log_EZn", inst.log_partition()?)
                .num("phi_n", inst.finite_pressure()?)
                .num("mean_X1", inst.annealed_mean_x1()?)
                .int("n", inst.n() as u128)
                .int("configs_evaluated", inst.configs().unwrap_or(0))
                .finish())
        }
        Command::Counterexample { q, x1, x2, format } => {
            require_json(format)?;
            let (c1, c2) = calibrate_counterexample::<f64>(*q, *x1, *x2)?;
            let dist = WeightDistribution::two_atom(*x1, *x2, c1)?;
            let cfg = PottsConfig::new(*q, 0.0, dist)?;
            let zc = cfg.zero_crossing()?;
            let inputs = inputs_block(
                "counterexample",
                &[("q", &q.to_string()), ("x1", &x1.to_string()), ("x2", &x2.to_string())],
            );
            Ok(Obj::new()
                .raw("inputs", &inputs)
                .num("c1", c1)
                .num("c2", c2)
                .num("f_x1", cubic_crossing_kernel(*q, *x1))
                .num("f_x2", cubic_crossing_kernel(*q, *x2))
                .raw("sign_changes", &emit::num_array(&zc.sign_changes))
                .finish())
        }
    }
}

enum Table {
    Csv,
    Json,
}

fn require_json(format: &str) -> Result<()> {
    if format == "json" {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "this subcommand only emits json, got --format {format}"
        )))
    }
}

fn require_table_format(format: &str) -> Result<Table> {
    match format {
        "csv" => Ok(Table::Csv),
        "json" => Ok(Table::Json),
        other => Err(Error::Parse(format!(
            "--format must be csv or json, got {other}"
        ))),
    }
}

fn make_config(cli: &Cli, dist: &str, q: u32, field: f64) -> Result<PottsConfig<f64>> {
    let d = WeightDistribution::parse(dist)?;
    let mut cfg = PottsConfig::new(q, field, d)?;
    if let Some(t) = cli.rel_tol {
        cfg = cfg.with_rel_tol(t);
    }
    if let Some(t) = cli.root_tol {
        cfg = cfg.with_root_tol(t);
    }
    Ok(cfg)
}

fn parse_weights(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("--weights: invalid number '{}'", s.trim())))
        })
        .collect()
}

fn default_scan_ceiling(cfg: &PottsConfig<f64>) -> Result<f64> {
    let log_qm1 = (cfg.qf() - 1.0).ln();
    let w_min = cfg.dist().min_support();
    if cfg.field() < log_qm1 {
        let w_eff = if w_min > 0.0 { w_min } else { cfg.dist().quantile01()? };
        Ok(1.5 * (log_qm1 - cfg.field()) / w_eff)
    } else {
        // concave regime: no curvature ceiling exists; cover the region where
        // the landscape saturates
        let w_eff = if w_min > 0.0 { w_min } else { cfg.dist().quantile01()? };
        Ok((10.0 + cfg.field()) / w_eff)
    }
}

fn inputs_block(subcommand: &str, pairs: &[(&str, &str)]) -> String {
    let mut obj = Obj::new().str("subcommand", subcommand);
    for (k, v) in pairs {
        obj = obj.str(k, v);
    }
    obj.finish()
}

fn critical_obj(obj: Obj, p: &CriticalPoint<f64>) -> Obj {
    obj.num("t_c", p.t_c)
        .num("beta_c", p.beta_c)
        .num("beta_prime_c", p.beta_prime_c)
        .num("s_low", p.s_low)
        .num("s_high", p.s_high)
        .str("order", p.order.as_str())
}
