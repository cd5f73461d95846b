use clap::{Parser, Subcommand, ValueEnum};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use lowthrust_mpc::analysis::{
    dcprime_sweep, emit_plots, nonlinearity_index, resolve_out_dir, run_scenario, sweep_figure,
    write_sweep_csv, NonlinearityConfig, PlotOutcome, ScenarioFile, TableFormat, OUT_DIR_ENV,
};
use lowthrust_mpc::error::{Error, Result};
use lowthrust_mpc::guidance::GuidanceLog;

#[derive(Parser)]
#[command(
    name = "lowthrust-mpc",
    version,
    about = "Low-thrust LEO transfer guidance"
)]
struct Cli {
    /// Output directory; overrides LOWTHRUST_OUT_DIR and the scenario file.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Seed for thrust errors and sampling; overrides the scenario file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate the reference and fly the guidance loop.
    Run { scenario: PathBuf },
    /// Error-free runs over several reference duty cycles.
    SweepDc {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        values: Vec<f64>,
    },
    /// Nonlinearity index of five coordinate systems from the scenario's initial state.
    Nonlinearity {
        scenario: PathBuf,
        #[arg(long, default_value_t = 15)]
        orbits: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Redraw the plots of a saved log.
    Plot { log: PathBuf },
}

fn load(path: &Path, seed: Option<u64>) -> Result<ScenarioFile> {
    let mut sc = ScenarioFile::load(path)?;
    if let Some(s) = seed {
        sc.errors.seed = s;
    }
    Ok(sc)
}

fn report_plots(p: &PlotOutcome) {
    match p {
        PlotOutcome::Written(files) => files.iter().for_each(|f| println!("wrote {}", f.display())),
        PlotOutcome::Skipped(msg) => println!("{msg}"),
    }
}

fn write_table(
    path: &Path,
    format: TableFormat,
    json: impl FnOnce() -> Result<String>,
    csv: impl FnOnce(BufWriter<File>) -> Result<()>,
) -> Result<()> {
    match format {
        TableFormat::Json => std::fs::write(path, json()?)?,
        TableFormat::Csv => csv(BufWriter::new(File::create(path)?))?,
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    let format = TableFormat::from(cli.format);
    match cli.command {
        Command::Run { scenario } => {
            let sc = load(&scenario, cli.seed)?;
            let out = resolve_out_dir(cli.out_dir.as_deref(), Some(&sc));
            let art = run_scenario(&sc, &out)?;
            let s = &art.log.summary;
            println!(
                "{}: {} segments, {} recomputations, dv {:.3} m/s, tof {:.3} d, da {:.4} km, dv' {:.4} m/s",
                sc.name, s.segments, s.recomputations, s.dv_ms, s.tof_days, s.da_km, s.dv_prime_ms
            );
            if let (Some(di), Some(dr)) = (s.di_deg, s.draan_deg) {
                println!("di {di:.6} deg, draan {dr:.6} deg");
            }
            println!("wrote {}", art.log_json.display());
            println!("wrote {}", art.trajectory_csv.display());
            report_plots(&art.plots);
        }
        Command::SweepDc { scenario, values } => {
            let sc = load(&scenario, cli.seed)?;
            let out = resolve_out_dir(cli.out_dir.as_deref(), Some(&sc));
            let rows = dcprime_sweep(&sc, &values)?;
            std::fs::create_dir_all(&out)?;
            for r in &rows {
                match &r.error {
                    None => println!(
                        "DC' {:.3}: reference {:.3} d / {:.3} m/s, flown {:.3} d / {:.3} m/s, {} recomputations",
                        r.dc_ref,
                        r.reference_tof_days.unwrap_or(f64::NAN),
                        r.reference_dv_ms.unwrap_or(f64::NAN),
                        r.tof_days.unwrap_or(f64::NAN),
                        r.dv_ms.unwrap_or(f64::NAN),
                        r.recomputations.unwrap_or(0)
                    ),
                    Some(e) => println!("DC' {:.3}: failed: {e}", r.dc_ref),
                }
            }
            let table = out.join(format!("dc_sweep.{}", format.extension()));
            write_table(
                &table,
                format,
                || Ok(serde_json::to_string_pretty(&rows)?),
                |w| write_sweep_csv(&rows, w),
            )?;
            let svg = out.join("dc_sweep.svg");
            sweep_figure(&rows).write(&svg)?;
            println!("wrote {}", svg.display());
        }
        Command::Nonlinearity {
            scenario,
            orbits,
            samples,
        } => {
            let sc = load(&scenario, None)?;
            let out = resolve_out_dir(cli.out_dir.as_deref(), Some(&sc));
            let x0 = sc.mission()?.x0;
            let mut cfg = NonlinearityConfig {
                orbits,
                samples,
                ..Default::default()
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let report = nonlinearity_index(&x0, &cfg)?;
            for c in &report.curves {
                println!(
                    "{:<24} {:.4e}",
                    c.system.name(),
                    c.index.last().copied().unwrap_or(f64::NAN)
                );
            }
            std::fs::create_dir_all(&out)?;
            let table = out.join(format!("nonlinearity.{}", format.extension()));
            write_table(
                &table,
                format,
                || Ok(serde_json::to_string_pretty(&report)?),
                |w| report.write_csv(w),
            )?;
            let svg = out.join("nonlinearity.svg");
            report.figure().write(&svg)?;
            println!("wrote {}", svg.display());
        }
        Command::Plot { log } => {
            let text = std::fs::read_to_string(&log)?;
            let parsed = GuidanceLog::from_json(&text)
                .map_err(|e| Error::Scenario(format!("{}: {e}", log.display())))?;
            let out = cli
                .out_dir
                .clone()
                .or_else(|| {
                    std::env::var_os(OUT_DIR_ENV)
                        .filter(|v| !v.is_empty())
                        .map(PathBuf::from)
                })
                .unwrap_or_else(|| log.parent().map(Path::to_path_buf).unwrap_or_default());
            let out = if out.as_os_str().is_empty() {
                PathBuf::from(".")
            } else {
                out
            };
            report_plots(&emit_plots(&parsed, &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
