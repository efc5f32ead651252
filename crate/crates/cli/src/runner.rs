use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::commands::{dispatch, CmdError};
use crate::config::{RunConfig, Value};
use crate::output::{to_json, Output};
use crate::VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ALERT: i32 = 2;

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    subcommand: &'a str,
    parameters: &'a std::collections::BTreeMap<String, Value>,
    status: &'a str,
    exit_code: i32,
    wall_time_s: f64,
    files: &'a [String],
}

fn write_manifest(out: &Output, m: &Manifest) -> std::io::Result<()> {
    std::fs::write(out.dir().join("manifest.json"), to_json(m) + "\n")
}

/// One run into `dir`; returns the exit status.
pub fn run_in(cfg: &RunConfig, dir: &Path) -> i32 {
    let start = Instant::now();
    let mut out = match Output::create(dir) {
        Ok(o) => o,
        Err(e) => {
            report_error("io", &format!("cannot create {}: {e}", dir.display()));
            return EXIT_USAGE;
        }
    };
    let mut params = cfg.parameters.clone();
    params.insert("output_dir".into(), Value::Str(dir.display().to_string()));
    let result = dispatch(cfg.subcommand, &mut params, &mut out);
    let (status, code) = match &result {
        Ok(s) => (s.name(), s.exit_code()),
        Err(e) => {
            let (kind, code) = match e {
                CmdError::Solver(_) => ("solver", EXIT_ALERT),
                CmdError::Usage(_) => ("usage", EXIT_USAGE),
                CmdError::Io(_) => ("io", EXIT_USAGE),
            };
            let record = json!({"error": kind, "message": e.to_string()});
            report_error(kind, &e.to_string());
            if let Err(io) = out.ndjson("error.ndjson", &[record]) {
                report_error("io", &io.to_string());
            }
            ("error", code)
        }
    };
    let manifest = Manifest {
        tool: "landau",
        version: VERSION,
        subcommand: cfg.subcommand.name(),
        parameters: &params,
        status,
        exit_code: code,
        wall_time_s: start.elapsed().as_secs_f64(),
        files: out.files(),
    };
    if let Err(e) = write_manifest(&out, &manifest) {
        report_error("io", &format!("cannot write manifest: {e}"));
        return EXIT_USAGE;
    }
    code
}

pub fn report_error(kind: &str, message: &str) {
    eprintln!("{}", to_json(&json!({"error": kind, "message": message})));
}

/// Every combination of the sweep axes, first axis slowest.
fn combinations(cfg: &RunConfig) -> Vec<Vec<(String, String, Value)>> {
    let mut combos: Vec<Vec<(String, String, Value)>> = vec![Vec::new()];
    for axis in &cfg.sweep {
        let mut next = Vec::new();
        for c in &combos {
            for (raw, v) in axis.raw.iter().zip(&axis.values) {
                let mut c = c.clone();
                c.push((axis.key.clone(), raw.clone(), v.clone()));
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Runs every sweep entry into its own subdirectory `key=value[,key=value]`.
pub fn run_sweep(cfg: &RunConfig, dir: &Path) -> i32 {
    let start = Instant::now();
    let mut out = match Output::create(dir) {
        Ok(o) => o,
        Err(e) => {
            report_error("io", &format!("cannot create {}: {e}", dir.display()));
            return EXIT_USAGE;
        }
    };
    let mut worst = EXIT_OK;
    let mut entries = Vec::new();
    for combo in combinations(cfg) {
        let name: Vec<String> = combo.iter().map(|(k, raw, _)| format!("{k}={raw}")).collect();
        let name = name.join(",");
        let mut entry = cfg.clone();
        entry.sweep.clear();
        for (k, _, v) in &combo {
            entry.parameters.insert(k.clone(), v.clone());
        }
        let sub_dir: PathBuf = dir.join(&name);
        let code = run_in(&entry, &sub_dir);
        out.register(&format!("{name}/manifest.json"));
        worst = if code == EXIT_USAGE || worst == EXIT_USAGE { EXIT_USAGE } else { worst.max(code) };
        entries.push(json!({"dir": name, "exit_code": code}));
    }
    let mut params = cfg.parameters.clone();
    params.insert("output_dir".into(), Value::Str(dir.display().to_string()));
    params.insert("subcommand".into(), Value::Str(cfg.subcommand.name().into()));
    for axis in &cfg.sweep {
        params.insert(format!("sweep.{}", axis.key), Value::Str(axis.raw.join(",")));
    }
    if let Err(e) = out.ndjson("sweep.ndjson", &entries) {
        report_error("io", &e.to_string());
        return EXIT_USAGE;
    }
    let manifest = Manifest {
        tool: "landau",
        version: VERSION,
        subcommand: "sweep",
        parameters: &params,
        status: if worst == EXIT_OK { "ok" } else { "partial" },
        exit_code: worst,
        wall_time_s: start.elapsed().as_secs_f64(),
        files: out.files(),
    };
    if let Err(e) = write_manifest(&out, &manifest) {
        report_error("io", &format!("cannot write manifest: {e}"));
        return EXIT_USAGE;
    }
    worst
}
