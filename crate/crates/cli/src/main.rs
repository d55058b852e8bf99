use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussnet_cli::catalog::catalog;
use gaussnet_cli::config::{self, ConfigError};
use gaussnet_cli::{run, summary_text, CliError};
use gaussnet_core::dynamics::NetworkModel;
use gaussnet_core::graph::{load_edge_list, Partition};
use gaussnet_core::rewire::{rewire, RewireMode, RewireParams};

#[derive(Parser)]
#[command(name = "gaussnet", version, about = "Gaussian state transfer and routing experiments on oscillator networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write its tables.
    Run {
        config: PathBuf,
        /// Output directory, replacing `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        realizations: Option<usize>,
        /// Also write fidelity tensors.
        #[arg(long)]
        tensors: bool,
    },
    /// Check a config without running it.
    Validate {
        config: PathBuf,
        /// Print diagnostics as JSON.
        #[arg(long)]
        json: bool,
    },
    /// List the available scenarios and their bundled configs.
    List {
        #[arg(long)]
        json: bool,
    },
    /// Randomize an edge list within a pk, pkk, pk_ck or pkk_ck ensemble.
    Rewire {
        edges_in: PathBuf,
        mode: String,
        seed: u64,
        edges_out: PathBuf,
        #[arg(long)]
        one_indexed: bool,
    },
    /// Print normal-mode frequencies and mean node overlaps per community.
    Spectrum {
        edges_in: PathBuf,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        omega0: f64,
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Number of slowest modes to print; all by default.
        #[arg(long)]
        modes: Option<usize>,
        #[arg(long)]
        one_indexed: bool,
    },
}

fn input_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Config(ConfigError::Io { path: path.display().to_string(), message: message.to_string() })
}

fn runtime_error(what: &str, message: impl ToString) -> CliError {
    CliError::Output { path: what.to_string(), message: message.to_string() }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Run { config: path, out, workers, seed, realizations, tensors } => {
            let (mut cfg, base) = config::load(&path)?;
            if let Some(d) = out {
                cfg.output.dir = d;
            }
            if workers.is_some() {
                cfg.workers = workers;
            }
            if seed.is_some() {
                cfg.ensemble.seed = seed;
            }
            if let Some(r) = realizations {
                cfg.ensemble.realizations = r;
            }
            cfg.output.tensors |= tensors;
            let report = run(&cfg, &base)?;
            print!("{}", summary_text(&report));
            Ok(())
        }
        Command::Validate { config: path, json } => {
            let result = config::load(&path).and_then(|(cfg, base)| cfg.validate(&base));
            match (&result, json) {
                (Ok(()), false) => println!("{}: ok", path.display()),
                (Ok(()), true) => println!("{}", serde_json::json!({ "config": path, "ok": true, "diagnostics": [] })),
                (Err(e), false) => {
                    for d in e.diagnostics() {
                        eprintln!("{}: {d}", path.display());
                    }
                }
                (Err(e), true) => println!("{}", serde_json::json!({ "config": path, "ok": false, "diagnostics": e.diagnostics() })),
            }
            result.map_err(|e| CliError::Config(ConfigError::Invalid(e.diagnostics())))
        }
        Command::List { json } => {
            let entries = catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                for e in &entries {
                    println!("{:<20} {}", e.id.as_str(), e.produces);
                    for c in &e.configs {
                        println!("{:<20}   {}", "", c.display());
                    }
                }
            }
            Ok(())
        }
        Command::Rewire { edges_in, mode, seed, edges_out, one_indexed } => {
            let mode: RewireMode = mode.parse().map_err(|e| input_error(Path::new("mode"), e))?;
            let g = load_edge_list(&edges_in, one_indexed).map_err(|e| input_error(&edges_in, e))?;
            let r = rewire(&g, mode, seed, &RewireParams::default()).map_err(|e| runtime_error("rewire", e))?;
            r.graph.save_edge_list(&edges_out).map_err(|e| runtime_error(&edges_out.display().to_string(), e))?;
            println!("{mode}: {} nodes, {} edges, clustering spectrum distance {:.4}", r.graph.n(), r.graph.edge_count(), r.ck_distance);
            if let Some(w) = r.warning {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Spectrum { edges_in, partition, omega0, g, modes, one_indexed } => {
            let graph = load_edge_list(&edges_in, one_indexed).map_err(|e| input_error(&edges_in, e))?;
            let part = match &partition {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| input_error(p, e))?;
                    Partition::parse(&text, graph.n()).map_err(|e| input_error(p, e))?
                }
                None => Partition::single(graph.n()),
            };
            let net = NetworkModel::new(graph, omega0, g).map_err(|e| input_error(&edges_in, e))?;
            let k = net.basis().vectors();
            let members = part.members();
            let mut header = vec!["mode".to_string(), "omega".to_string()];
            header.extend((0..members.len()).map(|c| format!("overlap_c{c}")));
            println!("{}", header.join("\t"));
            let shown = modes.unwrap_or(net.n()).min(net.n());
            for m in 0..shown {
                let mut row = vec![m.to_string(), format!("{:.6}", net.basis().frequencies()[m])];
                for nodes in &members {
                    let avg = nodes.iter().map(|&i| k[(i, m)].abs()).sum::<f64>() / nodes.len() as f64;
                    row.push(format!("{avg:.6}"));
                }
                println!("{}", row.join("\t"));
            }
            Ok(())
        }
    }
}
