//! `pdx`: simulate maximal degrees of Poisson–Delaunay graphs, evaluate the
//! tail model, and run the self-check suites.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use pdx_core::analytic::{asymptotic_max_degree, hilhorst_pmf, l_d, PmfSource};
use pdx_core::experiments::{run_experiment_with, run_palm, Diagnostics, ExperimentConfig};
use pdx_core::report::{histogram_svg, read_result, to_json, write_result, Format};
use pdx_core::sampling::DEFAULT_PAD_FACTOR;
use pdx_core::{suites, TypicalDegreeModel};

#[derive(Parser)]
#[command(name = "pdx", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run maximal-degree trials and write a result file
    Simulate {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_PAD_FACTOR)]
        pad_factor: f64,
        /// Worker threads (PDX_THREADS takes precedence)
        #[arg(long)]
        workers: Option<usize>,
        /// Output path; standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutFormat::Json)]
        format: OutFormat,
        /// Comma-separated: clusters, e_rho, block_tail, pad_check
        #[arg(long, value_delimiter = ',')]
        diag: Vec<Diag>,
    },
    /// Print the predictors for a window of volume rho
    Predict {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        /// `hilhorst` or `parametric:C`
        #[arg(long, default_value = "hilhorst", value_parser = parse_model)]
        model: PmfSource,
    },
    /// Print the planar pmf table k, q(k), G(k)
    Pmf {
        #[arg(long, default_value_t = 20)]
        kmax: u32,
    },
    /// Degree histogram of a point added at the window center
    Palm {
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a property suite; exits with status 1 on failure
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw the maximal-degree histogram of a result file as SVG
    Hist {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Diag {
    Clusters,
    #[value(name = "e_rho")]
    ERho,
    #[value(name = "block_tail")]
    BlockTail,
    #[value(name = "pad_check")]
    PadCheck,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Planarity,
    Flower,
    Union,
    Mcintegral,
}

fn parse_model(s: &str) -> Result<PmfSource, String> {
    match s.split_once(':') {
        None if s == "hilhorst" => Ok(PmfSource::hilhorst()),
        Some(("parametric", c)) => c
            .parse::<f64>()
            .map(|c| PmfSource::Parametric { c })
            .map_err(|e| format!("bad constant {c:?}: {e}")),
        _ => Err(format!(
            "unknown model {s:?}; expected hilhorst or parametric:C"
        )),
    }
}

fn workers(flag: Option<usize>) -> anyhow::Result<usize> {
    match std::env::var("PDX_THREADS") {
        Ok(v) => v
            .parse::<usize>()
            .with_context(|| format!("PDX_THREADS={v:?} is not a thread count")),
        Err(_) => Ok(flag.unwrap_or_else(pdx_core::experiments::default_workers)),
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Simulate {
            rho,
            trials,
            seed,
            alpha,
            pad_factor,
            workers: w,
            out,
            format,
            diag,
        } => {
            let mut diagnostics = Diagnostics::default();
            for d in diag {
                match d {
                    Diag::Clusters => diagnostics.clusters = true,
                    Diag::ERho => diagnostics.e_rho = true,
                    Diag::BlockTail => diagnostics.block_tail = true,
                    Diag::PadCheck => diagnostics.pad_check = true,
                }
            }
            let config = ExperimentConfig {
                rho,
                trials,
                master_seed: seed,
                alpha,
                pad_factor,
                workers: workers(w)?,
                diagnostics,
            };
            let file = run_experiment_with(&config, out.as_deref())?;
            let format = match format {
                OutFormat::Json => Format::Json,
                OutFormat::Csv => Format::Csv,
            };
            match &out {
                Some(p) => write_result(p, &file, format)?,
                None => match format {
                    Format::Json => stdout.write_all(to_json(&file)?.as_bytes())?,
                    Format::Csv => stdout
                        .write_all(pdx_core::report::histogram_csv(&file.summary).as_bytes())?,
                },
            }
            let s = &file.summary;
            eprintln!(
                "trials {}  mean delta {}  I {}  P(I or I+1) {}",
                s.trials,
                s.mean_delta.map_or("-".into(), |m| format!("{m:.4}")),
                s.i_rho.map_or("-".into(), |i| i.to_string()),
                s.p_two.map_or("-".into(), |p| format!("{p:.4}")),
            );
        }
        Command::Predict { rho, dim, model } => {
            if dim != 2 && matches!(model, PmfSource::Hilhorst { .. }) {
                bail!("the hilhorst model is planar; use --model parametric:C for dim {dim}");
            }
            let tail = TypicalDegreeModel::build(model, dim)?.interpolate();
            writeln!(stdout, "rho = {rho}")?;
            writeln!(stdout, "I = {}", tail.predictor_i(rho)?)?;
            writeln!(stdout, "J = {}", tail.predictor_j(rho, dim)?)?;
            writeln!(stdout, "l_d = {}", l_d(dim)?)?;
            match asymptotic_max_degree(rho, dim) {
                Ok(a) => writeln!(stdout, "asymptotic = {a:.4}")?,
                Err(_) => writeln!(stdout, "asymptotic = undefined")?,
            }
        }
        Command::Pmf { kmax } => {
            if kmax < 3 {
                bail!("--kmax must be at least 3");
            }
            writeln!(stdout, "k,q,G")?;
            for k in 3..=kmax {
                let g = (k + 1..=k + 60)
                    .map(hilhorst_pmf)
                    .sum::<pdx_core::Result<f64>>()?;
                writeln!(stdout, "{k},{:.4e},{g:.4e}", hilhorst_pmf(k)?)?;
            }
        }
        Command::Palm {
            trials,
            rho,
            seed,
            workers: w,
        } => {
            let palm = run_palm(rho, trials, seed, DEFAULT_PAD_FACTOR, workers(w)?)?;
            let h = &palm.histogram;
            writeln!(stdout, "degree,count,probability")?;
            for (&k, &c) in &h.counts {
                writeln!(stdout, "{k},{c},{}", h.pmf(k))?;
            }
            eprintln!(
                "trials {}  kept {}  discarded {}  mean degree {:.4}",
                palm.trials,
                h.total,
                palm.discarded,
                h.mean()
            );
        }
        Command::Verify { suite, seed } => {
            let report = match suite {
                Suite::Planarity => suites::planarity(seed, Default::default())?,
                Suite::Flower => suites::flower(seed, Default::default())?,
                Suite::Union => suites::union(seed, Default::default())?,
                Suite::Mcintegral => suites::mcintegral(seed, Default::default())?,
            };
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(stdout, "{tag} {}: {}", c.name, c.detail)?;
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Hist { input, svg } => {
            let file = read_result(&input)?;
            std::fs::write(&svg, histogram_svg(&file.summary))
                .with_context(|| format!("writing {}", svg.display()))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
