//! `lmoment`: L-values on the critical line, their moments over primitive
//! characters, main-term predictions, and brute-force identity checks, with
//! CSV or JSON output.
//!
//! Exit codes: 0 on success with all verifications passing, 1 when any
//! verification row fails, 2 on usage errors.

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lmoment::analytic;
use lmoment::characters::DirichletCharacter;
use lmoment::moments::{self, MomentOrder, MomentSpec};
use lmoment::{predict, verify};
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::time::Instant;

mod output;
use output::{sig15, Table};

#[derive(Debug, Parser)]
#[command(name = "lmoment", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Output path; standard output when omitted.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
    /// Worker threads (overrides LMOMENT_WORKERS; default 1).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Seed for sampled verifications.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Closed-form main-term predictions for one (q, T).
    Predict(PredictArgs),
    /// Empirical moment against its prediction for one (q, T).
    Moment(MomentArgs),
    /// The head/tail decomposition experiment at one (q, T).
    Decompose(DecomposeArgs),
    /// One L-value, by the Hurwitz-zeta oracle or the smoothed series.
    Lvalue(LvalueArgs),
    /// The cutoff weight at one (x, t, parity).
    Weight(WeightArgs),
    /// Identity and profile verifications.
    Verify(VerifyArgs),
    /// Moments over a (q, T) grid, emitting the ratio table.
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
struct PredictArgs {
    #[arg(long)]
    q: u64,
    #[arg(long = "T")]
    t_max: f64,
}

#[derive(Debug, Args, Serialize)]
struct MomentArgs {
    #[arg(long)]
    q: u64,
    #[arg(long = "T")]
    t_max: f64,
    /// Moment order, 2 or 4.
    #[arg(long, default_value_t = 4)]
    order: u8,
    /// Gauss-Legendre panel width.
    #[arg(long, default_value_t = 0.25)]
    panel: f64,
    /// Nodes per panel.
    #[arg(long, default_value_t = 8)]
    points: usize,
    /// Series truncation target.
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
    /// Restrict to even (0) or odd (1) characters.
    #[arg(long)]
    parity: Option<u8>,
}

#[derive(Debug, Args, Serialize)]
struct DecomposeArgs {
    #[arg(long)]
    q: u64,
    #[arg(long = "T")]
    t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    panel: f64,
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 1e-4)]
    eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LMethodArg {
    Oracle,
    Smoothed,
}

#[derive(Debug, Args, Serialize)]
struct LvalueArgs {
    #[arg(long)]
    q: u64,
    /// Character exponents, comma separated (e.g. "1,0"); empty for q = 1.
    #[arg(long, default_value = "")]
    chi: String,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, value_enum, default_value_t = LMethodArg::Oracle)]
    method: LMethodArg,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
}

#[derive(Debug, Args, Serialize)]
struct WeightArgs {
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 0)]
    parity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum VerifyTarget {
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    Bijection,
    All,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: VerifyTarget,
    /// Largest modulus for the lemma3/lemma5/lemma6 sweeps.
    #[arg(long)]
    q_max: Option<u64>,
    /// Random (m, n) pairs per modulus for lemma3.
    #[arg(long, default_value_t = 200)]
    pairs: usize,
    /// Moduli k for lemma4.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11")]
    k: Vec<u64>,
    /// Block sizes z (z1 = z2 = z) for lemma4.
    #[arg(long, value_delimiter = ',', default_value = "4,16,64,256")]
    z: Vec<u64>,
    /// Checkpoints x for lemma5/lemma6.
    #[arg(long, value_delimiter = ',', default_value = "100,10000,1000000")]
    x: Vec<u64>,
    /// Largest cutoff for the bijection check.
    #[arg(long, default_value_t = 1000)]
    z_max: u64,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    /// Moduli of the grid.
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,7,8,9,11,13")]
    q: Vec<u64>,
    /// Integration lengths of the grid.
    #[arg(long = "T", value_delimiter = ',', default_value = "10,40,160")]
    t_max: Vec<f64>,
    /// Moment order, 2 or 4.
    #[arg(long, default_value_t = 4)]
    order: u8,
    #[arg(long, default_value_t = 0.25)]
    panel: f64,
    #[arg(long, default_value_t = 8)]
    points: usize,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long)]
    parity: Option<u8>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_pass) => std::process::exit(if all_pass { 0 } else { 1 }),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let workers = cli
        .workers
        .or_else(|| {
            std::env::var("LMOMENT_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);
    if workers == 0 {
        bail!("workers must be at least 1");
    }
    let started = Instant::now();
    let (name, table) = moments::with_workers(workers, || dispatch(&cli))?;
    let timing_ms = started.elapsed().as_millis() as u64;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Predict(_) | Command::Lvalue(_) | Command::Weight(_) => Format::Json,
        _ => Format::Csv,
    });
    let rendered = match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let envelope = serde_json::json!({
                "command": name,
                "config": {
                    "args": &cli.command,
                    "workers": workers,
                    "seed": cli.seed,
                },
                "results": table.results,
                "timing_ms": timing_ms,
            });
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(table.all_pass)
}

fn dispatch(cli: &Cli) -> anyhow::Result<(&'static str, Table)> {
    Ok(match &cli.command {
        Command::Predict(args) => ("predict", predict_cmd(args)?),
        Command::Moment(args) => ("moment", moment_cmd(args)?),
        Command::Decompose(args) => ("decompose", decompose_cmd(args)?),
        Command::Lvalue(args) => ("lvalue", lvalue_cmd(args)?),
        Command::Weight(args) => ("weight", weight_cmd(args)?),
        Command::Verify(args) => ("verify", verify_cmd(args, cli.seed)?),
        Command::Sweep(args) => ("sweep", sweep_cmd(args)?),
    })
}

fn predict_cmd(args: &PredictArgs) -> anyhow::Result<Table> {
    let table = predict::PredictionTable::new(args.q, args.t_max);
    let mut out = Table::new(vec![
        "q",
        "T",
        "fourth_moment",
        "truncated_square",
        "second_moment",
        "montgomery_scale",
        "excess_ratio",
        "in_hypothesis",
    ]);
    out.push_row(
        vec![
            table.q.to_string(),
            sig15(table.t_max),
            sig15(table.fourth_moment),
            sig15(table.truncated_square),
            sig15(table.second_moment),
            sig15(table.montgomery_scale),
            sig15(table.excess_ratio),
            table.in_hypothesis.to_string(),
        ],
        serde_json::to_value(&table)?,
    );
    Ok(out)
}

fn moment_spec(q: u64, t_max: f64, order: u8, panel: f64, points: usize, eps: f64, parity: Option<u8>) -> anyhow::Result<MomentSpec> {
    let mut spec = MomentSpec::new(q, t_max, MomentOrder::from_u8(order)?);
    spec.panel_width = panel;
    spec.points_per_panel = points;
    spec.eps_series = eps;
    spec.parity_filter = parity;
    spec.validate()?;
    Ok(spec)
}

fn moment_table() -> Table {
    Table::new(vec![
        "q",
        "T",
        "order",
        "empirical",
        "predicted",
        "ratio",
        "quad_error",
        "char_count",
    ])
}

fn push_moment_row(table: &mut Table, r: &moments::MomentResult) -> anyhow::Result<()> {
    table.push_row(
        vec![
            r.q.to_string(),
            sig15(r.t_max),
            r.order.to_string(),
            sig15(r.empirical),
            sig15(r.predicted),
            sig15(r.ratio),
            sig15(r.quadrature_error),
            r.char_count.to_string(),
        ],
        serde_json::to_value(r)?,
    );
    Ok(())
}

fn moment_cmd(args: &MomentArgs) -> anyhow::Result<Table> {
    let spec = moment_spec(args.q, args.t_max, args.order, args.panel, args.points, args.eps, args.parity)?;
    let result = moments::moment(&spec)?;
    let mut table = moment_table();
    push_moment_row(&mut table, &result)?;
    Ok(table)
}

fn sweep_cmd(args: &SweepArgs) -> anyhow::Result<Table> {
    let mut table = moment_table();
    for &q in &args.q {
        for &t_max in &args.t_max {
            let spec = moment_spec(q, t_max, args.order, args.panel, args.points, args.eps, args.parity)?;
            let result = moments::moment(&spec)?;
            push_moment_row(&mut table, &result)?;
        }
    }
    Ok(table)
}

fn decompose_cmd(args: &DecomposeArgs) -> anyhow::Result<Table> {
    let spec = moment_spec(args.q, args.t_max, 4, args.panel, args.points, args.eps, None)?;
    let d = moments::decomposed_fourth_moment(args.q, args.t_max, &spec)?;
    let mut table = Table::new(vec![
        "q",
        "T",
        "z",
        "z0",
        "a_square",
        "cross",
        "b_square",
        "total",
        "fourth_moment",
        "head_main_ratio",
        "char_count",
    ]);
    table.push_row(
        vec![
            d.q.to_string(),
            sig15(d.t_max),
            sig15(d.cutoffs.z),
            sig15(d.cutoffs.z0),
            sig15(d.a_square),
            sig15(d.cross),
            sig15(d.b_square),
            sig15(d.total),
            sig15(d.fourth_moment),
            sig15(d.head_main_ratio),
            d.char_count.to_string(),
        ],
        serde_json::to_value(&d)?,
    );
    Ok(table)
}

fn parse_character(q: u64, chi: &str) -> anyhow::Result<DirichletCharacter> {
    let id = format!("{q}:{chi}");
    Ok(DirichletCharacter::from_id(&id)?)
}

fn lvalue_cmd(args: &LvalueArgs) -> anyhow::Result<Table> {
    let chi = parse_character(args.q, &args.chi)?;
    let result = match args.method {
        LMethodArg::Oracle => {
            analytic::l_oracle(Complex64::new(0.5, args.t), &chi)?
        }
        LMethodArg::Smoothed => analytic::lvalue::smoothed_l_square_result(args.t, &chi, args.eps)?,
    };
    let mut table = Table::new(vec![
        "character",
        "method",
        "s_re",
        "s_im",
        "value_re",
        "value_im",
        "abs_square",
        "error_estimate",
    ]);
    let abs_square = match args.method {
        // the smoothed engine reports |L|^2 directly in value_re
        LMethodArg::Smoothed => result.value_re,
        LMethodArg::Oracle => result.value().norm_sqr(),
    };
    table.push_row(
        vec![
            result.character.clone(),
            format!("{:?}", result.method).to_lowercase(),
            sig15(result.s_re),
            sig15(result.s_im),
            sig15(result.value_re),
            sig15(result.value_im),
            sig15(abs_square),
            sig15(result.error_estimate),
        ],
        serde_json::json!({
            "lvalue": result,
            "abs_square": abs_square,
        }),
    );
    Ok(table)
}

fn weight_cmd(args: &WeightArgs) -> anyhow::Result<Table> {
    if args.parity > 1 {
        bail!("parity must be 0 or 1");
    }
    let w = analytic::weight(args.x, args.t, args.parity)?;
    let mut table = Table::new(vec![
        "x", "t", "parity", "tau", "value", "quad_error", "line", "raw_imag",
    ]);
    table.push_row(
        vec![
            sig15(w.x),
            sig15(w.t),
            w.parity.to_string(),
            sig15(w.tau),
            sig15(w.value),
            sig15(w.quad_error),
            sig15(w.line),
            sig15(w.raw_imag),
        ],
        serde_json::to_value(w)?,
    );
    Ok(table)
}

fn lemma_table() -> Table {
    Table::new(vec![
        "lemma",
        "params",
        "lhs",
        "rhs",
        "residual",
        "implied_constant",
        "pass",
    ])
}

fn push_report(table: &mut Table, r: &verify::LemmaReport) -> anyhow::Result<()> {
    table.push_row(
        vec![
            r.lemma.clone(),
            r.params.clone(),
            sig15(r.lhs),
            sig15(r.rhs),
            sig15(r.residual),
            r.implied_constant.map(sig15).unwrap_or_default(),
            r.pass.to_string(),
        ],
        serde_json::to_value(r)?,
    );
    if !r.pass {
        table.all_pass = false;
    }
    Ok(())
}

fn verify_cmd(args: &VerifyArgs, seed: u64) -> anyhow::Result<Table> {
    let mut table = lemma_table();
    let run_lemma3 = |table: &mut Table| -> anyhow::Result<()> {
        let q_max = args.q_max.unwrap_or(100);
        for r in verify::lemma3_sweep(q_max, args.pairs, seed)? {
            push_report(table, &r)?;
        }
        Ok(())
    };
    let run_lemma4 = |table: &mut Table| -> anyhow::Result<()> {
        for r in verify::lemma4_sweep(&args.k, &args.z)? {
            push_report(table, &r)?;
        }
        Ok(())
    };
    let run_lemma5 = |table: &mut Table| -> anyhow::Result<()> {
        let q_max = args.q_max.unwrap_or(210);
        for r in verify::lemma5_sweep(q_max, &args.x)? {
            push_report(table, &r)?;
        }
        Ok(())
    };
    let run_lemma6 = |table: &mut Table| -> anyhow::Result<()> {
        let q_max = args.q_max.unwrap_or(50);
        let max_x = args.x.iter().copied().max().unwrap_or(1_000_000);
        let two_omega = lmoment::numeric::two_pow_omega_table(max_x as usize);
        for q in 2..=q_max {
            let trend = verify::lemma6_trend(q, &args.x, &two_omega)?;
            for r in &trend.reports {
                push_report(table, r)?;
            }
            let trend_report = verify::LemmaReport {
                lemma: "lemma6-trend".into(),
                params: format!("q={q}"),
                lhs: trend.reports.first().map(|r| r.residual).unwrap_or(f64::NAN),
                rhs: trend.reports.last().map(|r| r.residual).unwrap_or(f64::NAN),
                residual: 0.0,
                implied_constant: None,
                pass: trend.monotone_toward_one,
            };
            push_report(table, &trend_report)?;
        }
        Ok(())
    };
    let run_bijection = |table: &mut Table| -> anyhow::Result<()> {
        let mut z = 1u64;
        let mut last = 0u64;
        while z <= args.z_max {
            push_report(table, &verify::diagonal_bijection(z)?)?;
            last = z;
            z *= 10;
        }
        if last != args.z_max {
            push_report(table, &verify::diagonal_bijection(args.z_max)?)?;
        }
        Ok(())
    };
    match args.target {
        VerifyTarget::Lemma3 => run_lemma3(&mut table)?,
        VerifyTarget::Lemma4 => run_lemma4(&mut table)?,
        VerifyTarget::Lemma5 => run_lemma5(&mut table)?,
        VerifyTarget::Lemma6 => run_lemma6(&mut table)?,
        VerifyTarget::Bijection => run_bijection(&mut table)?,
        VerifyTarget::All => {
            run_lemma3(&mut table)?;
            run_lemma4(&mut table)?;
            run_lemma5(&mut table)?;
            run_lemma6(&mut table)?;
            run_bijection(&mut table)?;
        }
    }
    Ok(table)
}
