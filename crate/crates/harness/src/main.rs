use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakfill::catalog::find_suite;
use weakfill::error::HarnessError;
use weakfill::{list_experiments, run_experiment, ExperimentConfig, Result};
use weakfill_core::filling::build_filling;
use weakfill_core::metric_space::{estimate_regularity, make_space, MetricMeasureSpace, SpaceSpec};

#[derive(Parser)]
#[command(name = "weakfill", version, about = "Weak-type Sobolev seminorms on hyperbolic fillings")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment suite; exits with status 1 if a check fails.
    Run {
        #[arg(long)]
        experiment: Option<String>,
        /// JSON config; omitted fields take the suite defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for report.json and report.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available suites.
    List,
    /// Build a generated space, print its summary and optionally export its points.
    Space {
        #[arg(long)]
        spec: SpaceSpec,
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Build a hyperbolic filling and optionally export it as JSON.
    Fill {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

fn load_config(experiment: Option<&str>, config: Option<&Path>) -> Result<ExperimentConfig> {
    match (experiment, config) {
        (id, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let mut value: serde_json::Value = serde_json::from_str(&text)?;
            if let (Some(id), Some(obj)) = (id, value.as_object_mut()) {
                match obj.get("experiment").and_then(|v| v.as_str()) {
                    Some(other) if other != id => {
                        return Err(HarnessError::Config(format!(
                            "--experiment {id} disagrees with `{other}` in {}",
                            path.display()
                        )));
                    }
                    _ => {
                        obj.insert("experiment".into(), id.into());
                    }
                }
            }
            ExperimentConfig::from_json(&value.to_string())
        }
        (Some(id), None) => Ok(ExperimentConfig::default_for(find_suite(id)?)),
        (None, None) => Err(HarnessError::Config("give --experiment or --config".into())),
    }
}

fn write_points(space: &MetricMeasureSpace, path: &Path) -> Result<()> {
    let io = |e| HarnessError::io(path, e);
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(out, "# {} ({} points)", space.label(), space.len()).map_err(io)?;
    for i in 0..space.len() {
        let coords = space
            .coords(i)
            .ok_or_else(|| HarnessError::Config("space has no coordinates to export".into()))?;
        let line: Vec<String> = coords.iter().map(|c| format!("{c}")).collect();
        writeln!(out, "{} w={}", line.join(" "), space.weight(i)).map_err(io)?;
    }
    out.flush().map_err(io)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { experiment, config, out } => {
            let mut config = load_config(experiment.as_deref(), config.as_deref())?;
            if out.is_some() {
                config.output_dir = out;
            }
            let report = run_experiment(&config)?;
            print!("{}", report.summary());
            if let Some(dir) = &config.output_dir {
                println!("wrote {}", dir.display());
            }
            Ok(report.passed)
        }
        Command::List => {
            for s in list_experiments() {
                println!("{:<16} {}\n{:<16} {}\n{:<16} checks: {}\n", s.id, s.title, "", s.statement, "", s.checks);
            }
            Ok(true)
        }
        Command::Space { spec, export } => {
            let space = make_space(&spec)?;
            println!(
                "{}: {} points, resolution {:.4e}, max depth {}",
                space.label(),
                space.len(),
                space.resolution(),
                space.max_depth()
            );
            match estimate_regularity(&space) {
                Ok(r) => println!("regularity: Q ~ {:.3} on radii {:.3e}..{:.3e}", r.q, r.fit_range.0, r.fit_range.1),
                Err(e) => println!("regularity: {e}"),
            }
            if let Some(path) = export {
                write_points(&space, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Fill {
            space,
            depth,
            seed,
            export,
        } => {
            let space = make_space(&space)?;
            let filling = build_filling(&space, depth, seed)?;
            println!(
                "{} levels, {} vertices, {} edges, max degree {}, level sizes {:?}",
                filling.max_level() + 1,
                filling.num_vertices(),
                filling.edges().len(),
                filling.max_degree(),
                filling.level_sizes()
            );
            if let Some(path) = export {
                let json = serde_json::to_string(&filling.to_record())?;
                std::fs::write(&path, json).map_err(|e| HarnessError::io(&path, e))?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
