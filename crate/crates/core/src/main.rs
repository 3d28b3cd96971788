use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ratesplit_swipt::algorithms::StrategyKind;
use ratesplit_swipt::experiments::{
    emit, format_power_table, region_monotonicity_violations, run,
    tradeoff_monotonicity_violations, write_csv, write_json, OutputFormat, RowStatus, ScenarioFile,
    SweepKind, SweepResult, SweepSpec,
};
use ratesplit_swipt::{Error, Result};

/// Weighted-sum-rate precoder optimization for multi-antenna SWIPT with
/// rate-splitting, MU-LP and SC-SIC.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// WSR against the energy threshold.
    Tradeoff(RunArgs),
    /// Rate-region boundary over the IR-2 weight grid.
    Region(RunArgs),
    /// Single operating point with a power-allocation table.
    Point(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Rs,
    Mulp,
    Scsic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON; the built-in deterministic scenario is used if absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    strategy: StrategyArg,
    /// Output file; results go to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out, else CSV.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Random starts per strategy, in addition to the deterministic one.
    #[arg(long)]
    seeds: Option<usize>,
    /// Suppress the summary on stderr.
    #[arg(long)]
    quiet: bool,
}

fn strategies(arg: StrategyArg, num_irs: usize) -> Result<Vec<StrategyKind>> {
    Ok(match arg {
        StrategyArg::Rs => vec![StrategyKind::Rs],
        StrategyArg::Mulp => vec![StrategyKind::Mulp],
        StrategyArg::Scsic if num_irs != 2 => {
            return Err(Error::UnsupportedStrategy {
                strategy: "SCSIC".into(),
                num_irs,
            })
        }
        StrategyArg::Scsic => vec![StrategyKind::Scsic],
        StrategyArg::All if num_irs == 2 => StrategyKind::ALL.to_vec(),
        StrategyArg::All => vec![StrategyKind::Rs, StrategyKind::Mulp],
    })
}

fn output_format(args: &RunArgs) -> OutputFormat {
    match args.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => match args
            .out
            .as_ref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
        {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        },
    }
}

fn summarize(result: &SweepResult) -> String {
    let mut text = String::new();
    match result.kind {
        SweepKind::Point => text.push_str(&format_power_table(result)),
        kind => {
            for row in &result.rows {
                let detail = match &row.point {
                    Some(p) => {
                        let rates: Vec<String> = p
                            .per_ir_total_rates
                            .iter()
                            .map(|r| format!("{r:.4}"))
                            .collect();
                        format!("wsr {:.4}  rates [{}]", p.wsr, rates.join(", "))
                    }
                    None => row.status.name().to_string(),
                };
                text.push_str(&format!(
                    "{} {:>10.4}  {:<6} {detail}\n",
                    kind.name(),
                    row.coordinate,
                    row.strategy.name()
                ));
            }
            let flagged = match kind {
                SweepKind::Region => region_monotonicity_violations(result, 1e-3),
                _ => tradeoff_monotonicity_violations(result, 1e-3),
            };
            for (strategy, coord) in flagged {
                text.push_str(&format!(
                    "warning: {} is not monotone at {} = {coord} (local optimum)\n",
                    strategy.name(),
                    kind.name()
                ));
            }
        }
    }
    for row in result.rows.iter().filter(|r| r.status != RowStatus::Ok) {
        if let Some(msg) = &row.message {
            text.push_str(&format!(
                "{} at {}: {msg}\n",
                row.strategy.name(),
                row.coordinate
            ));
        }
    }
    text
}

fn execute(kind: SweepKind, args: &RunArgs) -> Result<SweepResult> {
    let file = match &args.config {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::paper(1.0, 4.0 * PI / 9.0, 2.0 * PI / 9.0, 35.0),
    };
    let (scenario, _) = file.scenario()?;
    let mut spec =
        SweepSpec::from_file(kind, &file, strategies(args.strategy, scenario.num_irs())?)?;
    if let Some(n) = args.seeds {
        spec.algorithm.num_random_starts = n;
    }
    let result = run(&spec)?;
    let format = output_format(args);
    match &args.out {
        Some(path) => emit(&result, format, path)?,
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            match format {
                OutputFormat::Csv => write_csv(&result, &mut lock)?,
                OutputFormat::Json => {
                    write_json(&result, &mut lock)?;
                    writeln!(lock)?;
                }
            }
        }
    }
    if !args.quiet {
        eprint!("{}", summarize(&result));
    }
    Ok(result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Tradeoff(a) => (SweepKind::Tradeoff, a),
        Command::Region(a) => (SweepKind::Region, a),
        Command::Point(a) => (SweepKind::Point, a),
    };
    match execute(kind, args) {
        Ok(result) if result.any_failed() => ExitCode::from(1),
        Ok(result) if result.any_infeasible() => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
