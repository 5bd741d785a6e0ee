// SPDX-License-Identifier: Apache-2.0

//! `smtquery`: ingest SMT-LIB string benchmarks, run solvers on them and
//! query the collection.

use std::error::Error;
use std::fmt::Write as _;
use std::io::{self, IsTerminal};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Deserialize;

use smtquery::extractors::EXTRACTORS;
use smtquery::harness::{
    find_solver, install_interrupt_handler, load_solvers_conf, run_solver, schedule_runs,
    set_max_concurrent_runs, ScheduleOptions, DEFAULT_TIMEOUT,
};
use smtquery::predicates::CATALOG;
use smtquery::qlang::{repl, report_error, run_query};
use smtquery::store::IngestOptions;
use smtquery::transforms::TRANSFORMS;
use smtquery::{AstCache, Engine, SolverConfig, Store};

type BoxResult<T> = Result<T, Box<dyn Error>>;

const CONFIG_FILE: &str = "smtquery.toml";

#[derive(Parser, Debug)]
#[command(
    name = "smtquery",
    version,
    about = "Query engine for SMT-LIB string-constraint benchmark collections",
    arg_required_else_help = true
)]
struct Cli {
    /// Benchmark tree laid out as <set>/<track>/<file>.smt2
    #[arg(long, global = true)]
    root: Option<PathBuf>,
    /// SQLite database file
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// Directory for cached syntax trees [default: next to the database]
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Default solver timeout in seconds
    #[arg(long, global = true)]
    timeout: Option<f64>,
    /// Worker threads and concurrent solver processes
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Solver configuration file
    #[arg(long, global = true)]
    solvers: Option<PathBuf>,
    /// Directory receiving extractor output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Configuration file [default: ./smtquery.toml when present]
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also render SVG next to the CSV of plot extractors
    #[arg(long, global = true)]
    render: bool,
    /// Run one query instead of starting the interactive prompt
    #[arg(long, global = true)]
    query: Option<String>,
    /// Let initdb replace an existing database
    #[arg(long, global = true)]
    force: bool,
    /// Translate SMT-LIB 2.5 syntax while ingesting (writes *.26 copies)
    #[arg(long, global = true)]
    translate25: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create a fresh database with every instance under the root
    #[command(name = "initdb")]
    InitDb,
    /// Register instances added to the root since the last scan
    #[command(name = "allocateNew", alias = "allocatenew")]
    AllocateNew,
    /// Run every configured solver on every instance lacking a result
    #[command(name = "updateResults", alias = "updateresults")]
    UpdateResults,
    /// Read queries from standard input, or run the one given by --query
    #[command(name = "qlang")]
    Qlang,
    /// Run one solver on one instance and print the outcome
    #[command(name = "smtsolver")]
    SmtSolver {
        solver: String,
        set: String,
        track: String,
        file: String,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    root: Option<PathBuf>,
    db: Option<PathBuf>,
    cache: Option<PathBuf>,
    timeout: Option<f64>,
    jobs: Option<usize>,
    solvers: Option<PathBuf>,
    output: Option<PathBuf>,
}

/// Flags, then the config file, then built-in defaults.
struct Settings {
    root: PathBuf,
    db: PathBuf,
    cache: PathBuf,
    timeout: Duration,
    jobs: usize,
    solvers: PathBuf,
    solvers_explicit: bool,
    output: PathBuf,
}

impl Settings {
    fn resolve(cli: &Cli) -> BoxResult<Settings> {
        let file = match &cli.config {
            Some(p) => read_config(p)?,
            None if Path::new(CONFIG_FILE).exists() => read_config(Path::new(CONFIG_FILE))?,
            None => FileConfig::default(),
        };
        let db = cli
            .db
            .clone()
            .or(file.db)
            .unwrap_or_else(|| PathBuf::from("data/smtquery.db"));
        let cache = cli
            .cache
            .clone()
            .or(file.cache)
            .unwrap_or_else(|| db.parent().unwrap_or(Path::new(".")).join("cache"));
        let timeout = match cli.timeout.or(file.timeout) {
            Some(t) if t.is_finite() && t > 0.0 => Duration::from_secs_f64(t),
            Some(t) => return Err(format!("timeout must be positive, got {t}").into()),
            None => DEFAULT_TIMEOUT,
        };
        let jobs = cli
            .jobs
            .or(file.jobs)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1);
        let solvers_explicit = cli.solvers.is_some() || file.solvers.is_some();
        Ok(Settings {
            root: cli
                .root
                .clone()
                .or(file.root)
                .unwrap_or_else(|| PathBuf::from("data/smtfiles")),
            db,
            cache,
            timeout,
            jobs,
            solvers: cli
                .solvers
                .clone()
                .or(file.solvers)
                .unwrap_or_else(|| PathBuf::from("solvers.conf")),
            solvers_explicit,
            output: cli
                .output
                .clone()
                .or(file.output)
                .unwrap_or_else(|| PathBuf::from("output")),
        })
    }

    fn solver_configs(&self) -> BoxResult<Vec<SolverConfig>> {
        if !self.solvers_explicit && !self.solvers.exists() {
            return Ok(Vec::new());
        }
        Ok(load_solvers_conf(&self.solvers, self.timeout)?)
    }

    fn ingest(&self, cli: &Cli) -> IngestOptions {
        IngestOptions {
            translate25: cli.translate25,
        }
    }
}

fn read_config(path: &Path) -> BoxResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn catalog_help() -> String {
    let mut s = String::from("Predicates:\n");
    for p in CATALOG {
        let args = match p.arity {
            0 => String::new(),
            1 => "(solver)".into(),
            _ => "(solver, solver)".into(),
        };
        let _ = writeln!(s, "  {:<36}{}", format!("{}{args}", p.name), p.description);
    }
    s.push_str("\nFunctions (Apply):\n");
    for t in TRANSFORMS {
        let _ = writeln!(s, "  {:<36}{}", t.name, t.description);
    }
    s.push_str("\nExtractors:\n");
    for e in EXTRACTORS {
        let _ = writeln!(s, "  {:<36}{}", e.name, e.description);
    }
    s.push_str(
        "\nQuery syntax:\n  Select Name|Hash|Content From <datasets> [Where <condition>]\n  \
         Extract <extractor> From <datasets> [Where <condition>] [Apply <function>]\n",
    );
    s
}

fn run(cli: &Cli) -> BoxResult<()> {
    let settings = Settings::resolve(cli)?;
    set_max_concurrent_runs(settings.jobs);
    match &cli.command {
        Command::InitDb => {
            let store = Store::init_db(
                &settings.db,
                &settings.root,
                cli.force,
                settings.ingest(cli),
            )?;
            println!(
                "Initialized {} with {} instance(s)",
                settings.db.display(),
                store.count_rows("instances")?
            );
        }
        Command::AllocateNew => {
            let store = Store::open(&settings.db)?;
            let added = store.allocate_new(&settings.root, settings.ingest(cli))?;
            println!("{added} new instance(s)");
        }
        Command::UpdateResults => {
            let store = Store::open(&settings.db)?;
            let solvers = settings.solver_configs()?;
            if solvers.is_empty() {
                return Err(
                    format!("no solvers configured in {}", settings.solvers.display()).into(),
                );
            }
            let report = schedule_runs(
                &store,
                &store.all_instances()?,
                &solvers,
                ScheduleOptions {
                    parallelism: settings.jobs,
                    progress: true,
                },
            )?;
            println!(
                "{} run(s), {} validation record(s)",
                report.runs, report.validations
            );
        }
        Command::Qlang => {
            let store = Store::open(&settings.db)?;
            let solvers = settings.solver_configs()?;
            let cache = AstCache::new(&settings.cache);
            let engine = Engine {
                store: &store,
                cache: Some(&cache),
                solvers: &solvers,
                jobs: settings.jobs,
                output_root: settings.output.clone(),
                render: cli.render,
                progress: true,
            };
            let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
            match &cli.query {
                Some(q) => {
                    if let Err(e) = run_query(&engine, q, &mut out, &mut err) {
                        report_error(&mut err, q, &e)?;
                        return Err(Reported.into());
                    }
                }
                None => {
                    let stdin = io::stdin();
                    let prompt = stdin.is_terminal();
                    repl(&engine, stdin.lock(), &mut out, &mut err, prompt)?;
                }
            }
        }
        Command::SmtSolver {
            solver,
            set,
            track,
            file,
        } => {
            let store = Store::open(&settings.db)?;
            let solvers = settings.solver_configs()?;
            let cfg = find_solver(&solvers, solver)
                .ok_or_else(|| format!("solver `{solver}` is not configured"))?;
            let inst = store
                .find_instance(set, track, file)?
                .ok_or_else(|| format!("no instance {set}:{track}:{file}"))?;
            let outcome = run_solver(cfg, &inst.path)?;
            println!("{} {:.3}s", outcome.result, outcome.time);
            if let Some(model) = outcome.model {
                println!("{model}");
            }
        }
    }
    Ok(())
}

/// An error already printed to stderr.
#[derive(Debug)]
struct Reported;

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("error reported")
    }
}

impl Error for Reported {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let mut cmd = Cli::command().after_help(catalog_help());
    let cli = match cmd
        .try_get_matches_from_mut(std::env::args_os())
        .and_then(|mut m| Cli::from_arg_matches_mut(&mut m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    install_interrupt_handler();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.is::<Reported>() {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
