use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ultralip::geometry::Window;
use ultralip_cli::problem::ConfigOverride;
use ultralip_cli::run::{run, SavedExtension};
use ultralip_cli::{eval, load, CliError};

#[derive(Parser)]
#[command(name = "ultralip", version, about = "Lipschitz extensions over Q_p: build and certify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a problem file.
    Run {
        problem: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        precision: Option<u32>,
        /// Order range as `lo:hi`.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<Window>,
        /// Directory for report.json, report.txt and extension files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate an extension at a rational point.
    Eval {
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 0)]
        y_index: usize,
        /// Extension file written by `run --out`; built afresh if omitted.
        #[arg(long)]
        extension: Option<PathBuf>,
    },
}

fn parse_window(s: &str) -> Result<Window, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok(Window::new(lo, hi))
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Run {
            problem,
            seed,
            samples,
            precision,
            window,
            out,
            format,
        } => {
            let problem = load(&problem)?;
            let flags = ConfigOverride {
                seed,
                samples,
                precision,
                window,
                exhaustive_cap: None,
            };
            let output = run(&problem, &flags);
            let report = &output.report;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("report.json"), report.to_json())?;
                std::fs::write(dir.join("report.txt"), report.to_text())?;
                for (index, saved) in &output.extensions {
                    let name = format!("extension-{index}.json");
                    let text = serde_json::to_string_pretty(saved).expect("extension serializes");
                    std::fs::write(dir.join(name), text)?;
                }
            }
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(if report.overall.passed() { 0 } else { 1 })
        }
        Command::Eval {
            problem,
            x,
            y_index,
            extension,
        } => {
            let problem = load(&problem)?;
            let saved = match extension {
                None => None,
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    Some(
                        serde_json::from_str::<SavedExtension>(&text)
                            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?,
                    )
                }
            };
            println!("{}", eval(&problem, saved, &x, y_index)?);
            Ok(0)
        }
    }
}
