use clap::{Parser, Subcommand};
use monolab::catalog;
use monolab::cli::report::to_canonical_string;
use monolab::cli::{parse_scene, run_scene, RunOptions, EXIT_INCOMPLETE, EXIT_INTERNAL, EXIT_OK, EXIT_PARSE};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "monolab", version, about = "Local maximal monotonicity analysis of set-valued operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analysis requests of a scene file.
    Run {
        scene: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for SVG plots of one-dimensional requests.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the tolerance derived from each box.
        #[arg(long)]
        tol: Option<f64>,
        /// Add wall-clock times to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Browse the built-in operators.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

fn run(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Run {
            scene,
            out,
            plot,
            seed,
            tol,
            timing,
        } => {
            let text = std::fs::read_to_string(&scene).map_err(|e| format!("{}: {e}", scene.display()))?;
            let scene_v = match parse_scene(&text) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("{}: {e}", scene.display());
                    return Ok(EXIT_PARSE);
                }
            };
            let opts = RunOptions {
                seed,
                tol,
                plot: plot.is_some(),
                timing,
            };
            let res = run_scene(&scene_v, &opts);
            let json = to_canonical_string(&res.report);
            match out {
                Some(p) => std::fs::write(&p, json).map_err(|e| format!("{}: {e}", p.display()))?,
                None => print!("{json}"),
            }
            if let Some(dir) = plot {
                std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                for p in &res.plots {
                    let path = dir.join(&p.file);
                    std::fs::write(&path, &p.svg).map_err(|e| format!("{}: {e}", path.display()))?;
                }
            }
            Ok(if res.incomplete { EXIT_INCOMPLETE } else { EXIT_OK })
        }
        Command::Catalog { action } => {
            match action {
                CatalogAction::List => {
                    for name in catalog::NAMES {
                        let e = catalog::expected(name).map_err(|e| e.to_string())?;
                        println!("{name:<28} n={}  {}", e.dim, e.description);
                    }
                }
                CatalogAction::Show { name } => match catalog::expected(&name) {
                    Ok(e) => print!("{}", to_canonical_string(&e)),
                    Err(e) => {
                        eprintln!("{e}");
                        return Ok(EXIT_PARSE);
                    }
                },
            }
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INTERNAL
        }
    };
    ExitCode::from(code as u8)
}
