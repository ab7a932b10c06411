//! `tprism`: contact sequence → prism complex → curvature → verification and statistics.

mod config;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{ensure_dir, usage, write, RunArgs, RunConfig};
use tprism_core::curvature::{curvature_records, records_csv, CurvatureRecord};
use tprism_core::stats::{figure_data, h_table, h_table_csv, table_stats, write_outputs, FIGURES};
use tprism_core::verify::{run_suite, VerificationReport};
use tprism_core::PrismComplex;

#[derive(Debug, Parser)]
#[command(name = "tprism", version, about = "Forman-Ricci curvature on spatiotemporal prism complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic contact sequence (`contacts.txt`, or stdout without --out)
    Generate,
    /// Build the prism complex and write its simplices (`complex.txt`)
    Build,
    /// Per-edge curvatures (`curvature.csv`)
    Curvature,
    /// Run the identity suite (`verify.json`); exits 1 if a hard check fails
    Verify,
    /// Aggregate statistics (`summary.json`)
    Stats,
    /// Figure data CSVs
    Figdata {
        /// only this payload, printed to stdout: scatter, hist, by_class or dt_dep
        #[arg(long)]
        which: Option<String>,
    },
    /// Every stage, writing all outputs into --out
    Pipeline,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

struct Stages {
    pc: PrismComplex,
    records: Vec<CurvatureRecord>,
}

fn build(cfg: &RunConfig) -> Result<PrismComplex> {
    let seq = cfg.binned()?;
    PrismComplex::build(&seq, cfg.options, cfg.weights).map_err(|e| usage(e.to_string()))
}

fn curvature(cfg: &RunConfig) -> Result<Stages> {
    let pc = build(cfg)?;
    let records = curvature_records(&pc);
    Ok(Stages { pc, records })
}

fn emit(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    match &cfg.out {
        Some(dir) => {
            ensure_dir(dir)?;
            write(dir, name, contents)
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn report_failures(report: &VerificationReport) {
    for check in report.failed_hard() {
        eprintln!(
            "hard check `{}` failed: {} of {} violations, max error {:e}; {}",
            check.name, check.violations, check.population, check.max_error, check.notes
        );
    }
}

/// Returns `Ok(false)` when a hard verification check fails.
fn run(cli: Cli) -> Result<bool> {
    let cfg = cli.run.resolve()?;
    match cli.command {
        Command::Generate => {
            if !matches!(cfg.source, config::Source::Synthetic(_)) {
                return Err(usage("generate needs --model"));
            }
            emit(&cfg, "contacts.txt", &cfg.contacts()?.to_text())?;
        }
        Command::Build => {
            let pc = build(&cfg)?;
            emit(&cfg, "complex.txt", &pc.complex().dump())?;
        }
        Command::Curvature => {
            let s = curvature(&cfg)?;
            emit(&cfg, "curvature.csv", &records_csv(&s.records))?;
        }
        Command::Verify => {
            let report = run_suite(&build(&cfg)?);
            emit(&cfg, "verify.json", &(report.to_json() + "\n"))?;
            report_failures(&report);
            return Ok(report.passed());
        }
        Command::Stats => {
            let s = curvature(&cfg)?;
            let summary = table_stats(&s.records, s.pc.complex().count(2)).map_err(|e| usage(e.to_string()))?;
            emit(&cfg, "summary.json", &(summary.to_json() + "\n"))?;
        }
        Command::Figdata { which } => {
            let s = curvature(&cfg)?;
            match which {
                Some(w) => print!("{}", figure_data(&s.records, &w).map_err(|e| usage(e.to_string()))?),
                None => {
                    let dir = cfg.out_dir()?;
                    ensure_dir(dir)?;
                    for w in FIGURES {
                        write(dir, &format!("{w}.csv"), &figure_data(&s.records, w)?)?;
                    }
                }
            }
        }
        Command::Pipeline => {
            let dir = cfg.out_dir()?.to_path_buf();
            ensure_dir(&dir)?;
            let seq = cfg.binned()?;
            write(&dir, "contacts.txt", &seq.to_text())?;
            let pc = PrismComplex::build(&seq, cfg.options, cfg.weights).map_err(|e| usage(e.to_string()))?;
            let records = curvature_records(&pc);
            write(&dir, "curvature.csv", &records_csv(&records))?;
            let report = run_suite(&pc);
            write(&dir, "verify.json", &(report.to_json() + "\n"))?;
            let h = h_table(cfg.weights.g, cfg.options.slice_gap);
            write(&dir, "h_factor.csv", &h_table_csv(&h))?;
            match table_stats(&records, pc.complex().count(2)) {
                Ok(summary) => {
                    write_outputs(&dir, &summary, &records)?;
                    println!(
                        "{} edges, {} triangles, {:.1}% disagree, mean F {:.3}, mean F_aug {:.3}",
                        summary.n_edges, summary.n_triangles, summary.pct_disagree, summary.mean_f, summary.mean_f_aug
                    );
                }
                Err(e) => eprintln!("no statistics: {e}"),
            }
            report_failures(&report);
            return Ok(report.passed());
        }
    }
    Ok(true)
}
