mod commands;
mod config;
mod output;
mod runner;
mod schema;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};

use config::{coerce, parse_document, resolve, ConfigError, Entry, ErrorKind};
use output::to_json;
use runner::{run_in, run_sweep, EXIT_USAGE};
use schema::Subcommand;

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("LANDAU_BUILD_HASH"), ")");

fn flag(key: &str) -> String {
    key.replace('_', "-")
}

fn cli() -> Command {
    let mut app = Command::new("landau")
        .version(VERSION)
        .about("Phase mixing, Landau damping and plasma echo experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in Subcommand::RUNNABLE {
        let mut cmd = Command::new(sub.name())
            .about(sub.about())
            .arg(Arg::new("config").long("config").value_name("FILE").help("Config file; flags override its values"))
            .arg(Arg::new("out").long("out").value_name("DIR").help("Output directory (overrides output_dir)"));
        for p in sub.params().iter().filter(|p| p.key != "output_dir") {
            cmd = cmd.arg(
                Arg::new(p.key)
                    .long(flag(p.key))
                    .value_name(p.kind.to_string().to_uppercase())
                    .allow_hyphen_values(true)
                    .help(p.help),
            );
        }
        app = app.subcommand(cmd);
    }
    app.subcommand(
        Command::new("run")
            .about("Run the subcommand named by the config's section header")
            .arg(Arg::new("config").required(true).value_name("FILE"))
            .arg(Arg::new("out").long("out").value_name("DIR").help("Output directory (overrides output_dir)")),
    )
    .subcommand(
        Command::new(Subcommand::Sweep.name())
            .about(Subcommand::Sweep.about())
            .arg(Arg::new("config").required(true).value_name("FILE"))
            .arg(Arg::new("out").long("out").value_name("DIR").help("Output directory (overrides output_dir)")),
    )
}

fn print_errors(errors: &[ConfigError]) {
    for e in errors {
        eprintln!("{}", to_json(e));
    }
}

fn configure_threads() {
    let Ok(text) = std::env::var("VEL_THREADS") else { return };
    match text.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // Only fails when a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => runner::report_error("usage", &format!("ignoring VEL_THREADS='{text}': expected a positive integer")),
    }
}

fn execute(name: &str, m: &ArgMatches) -> i32 {
    let default = name.parse::<Subcommand>().ok().filter(|s| *s != Subcommand::Sweep);
    let text = match m.get_one::<String>("config") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                runner::report_error("io", &format!("cannot read {path}: {e}"));
                return EXIT_USAGE;
            }
        },
        None => String::new(),
    };
    let (mut doc, mut errors) = parse_document(&text, default);

    if let Some(sub) = default {
        for p in sub.params().iter().filter(|p| p.key != "output_dir") {
            if let Some(raw) = m.get_one::<String>(p.key) {
                match coerce(p.kind, raw) {
                    Ok(value) => {
                        doc.entries.insert(p.key.to_string(), Entry { value, raw: raw.clone(), line: 0 });
                    }
                    Err(msg) => errors.push(ConfigError {
                        error: ErrorKind::Type,
                        line: 0,
                        message: format!("--{}: {msg}", flag(p.key)),
                    }),
                }
            }
        }
    }
    let cfg = resolve(&doc, &mut errors);
    let Some(cfg) = cfg.filter(|_| errors.is_empty()) else {
        print_errors(&errors);
        return EXIT_USAGE;
    };
    if name == Subcommand::Sweep.name() && cfg.sweep.is_empty() {
        runner::report_error("usage", "sweep needs a [sweep] section");
        return EXIT_USAGE;
    }
    let dir = PathBuf::from(m.get_one::<String>("out").cloned().unwrap_or_else(|| cfg.output_dir.clone()));
    if cfg.sweep.is_empty() {
        run_in(&cfg, &dir)
    } else {
        run_sweep(&cfg, &dir)
    }
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    configure_threads();
    let (name, sub) = matches.subcommand().expect("subcommand required");
    ExitCode::from(execute(name, sub) as u8)
}
