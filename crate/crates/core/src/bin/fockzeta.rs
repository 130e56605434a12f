use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fockzeta::fock::graded_dim;
use fockzeta::regularized::zeta_table;
use fockzeta::report::{emit_reports, Format};
use fockzeta::suite::{run_suite, RunConfig};

#[derive(Parser)]
#[command(name = "fockzeta", version, about = "Exact verification of free-boson vertex operator identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite (core, zeta, regularized, voa, all) or check ids, comma separated.
    Verify(VerifyArgs),
    /// Print a table of exact values.
    Table(TableArgs),
}

#[derive(Args)]
struct VerifyArgs {
    selection: Option<String>,
    /// Flat key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    weight_cap: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_window: Option<String>,
    /// One per formal variable, in order; the last value fills the rest.
    #[arg(long, allow_hyphen_values = true)]
    y_order: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    mode_range: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// json-lines or table
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report elapsed milliseconds (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Bernoulli,
    Zeta,
    Partitions,
}

#[derive(Args)]
struct TableArgs {
    kind: TableKind,
    #[arg(long, default_value_t = 12)]
    max: u32,
    #[arg(long, default_value = "table")]
    format: String,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.apply_file_text(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    if let Some(s) = &args.selection {
        flags.push(("suite", s.clone()));
    }
    let scalars = [
        ("weight-cap", &args.weight_cap),
        ("x-window", &args.x_window),
        ("mode-range", &args.mode_range),
        ("seed", &args.seed),
        ("format", &args.format),
    ];
    for (k, v) in scalars {
        if let Some(v) = v {
            flags.push((k, v.clone()));
        }
    }
    if !args.y_order.is_empty() {
        flags.push(("y-order", args.y_order.join(",")));
    }
    if let Some(out) = &args.out {
        flags.push(("out", out.display().to_string()));
    }
    if args.timing {
        flags.push(("timing", "true".into()));
    }
    for (k, v) in flags {
        cfg.set(k, &v).map_err(|e| e.to_string())?;
    }
    Ok(cfg)
}

fn write_output(out: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn verify(args: VerifyArgs) -> ExitCode {
    let cfg = match build_config(&args) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let reports = run_suite(&cfg);
    let text = emit_reports(&reports, cfg.format, cfg.timing);
    if let Err(e) = write_output(cfg.out.as_ref(), &text) {
        return usage(e);
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn table(args: TableArgs) -> ExitCode {
    let format: Format = match args.format.parse() {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let rows: Vec<Vec<(&str, Value)>> = match args.kind {
        TableKind::Bernoulli => zeta_table(args.max as usize)
            .into_iter()
            .map(|r| vec![("k", json!(r.k)), ("B_k", json!(r.bernoulli.to_string()))])
            .collect(),
        TableKind::Zeta => zeta_table(args.max as usize)
            .into_iter()
            .map(|r| {
                vec![
                    ("k", json!(r.k)),
                    ("B_k", json!(r.bernoulli.to_string())),
                    ("zeta(1-k)", json!(r.zeta.map(|z| z.to_string()))),
                ]
            })
            .collect(),
        TableKind::Partitions => (0..=args.max).map(|n| vec![("n", json!(n)), ("dim", json!(graded_dim(n)))]).collect(),
    };
    let mut text = String::new();
    match format {
        Format::JsonLines => {
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|(k, v)| format!("{}:{v}", json!(k))).collect();
                text.push('{');
                text.push_str(&cells.join(","));
                text.push_str("}\n");
            }
        }
        Format::Table => {
            for r in &rows {
                let cells: Vec<String> = r
                    .iter()
                    .map(|(k, v)| match v {
                        Value::String(s) => format!("{k}={s}"),
                        Value::Null => format!("{k}=-"),
                        other => format!("{k}={other}"),
                    })
                    .collect();
                text.push_str(&cells.join("  "));
                text.push('\n');
            }
        }
    }
    match write_output(None, &text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => usage(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Verify(a) => verify(a),
        Command::Table(a) => table(a),
    }
}
