use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use qmeas::params::parse_assignment;
use qmeas::{list_json, list_text, run_scenario, verify, CliError, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "qmeas", version, about = "Generalized-measurement scenarios with checked expected values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and print its values table.
    Run {
        scenario: String,
        /// Parameter override, repeatable.
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// JSON object of parameter values (and optionally "seed").
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// List scenarios and their parameters.
    List {
        #[arg(long, value_enum, default_value_t = ListFormat::Text)]
        format: ListFormat,
    },
    /// Run every scenario at its defaults.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

fn read_config(path: &PathBuf) -> Result<(Map<String, Value>, Option<u64>), CliError> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!("config {}: expected a JSON object", path.display())));
    };
    let seed = match map.remove("seed") {
        None => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| CliError::Usage("config seed must be a non-negative integer".into()))?),
    };
    Ok((map, seed))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Run { scenario, params, seed, format, out, config } => {
            let overrides = params.iter().map(|a| parse_assignment(a)).collect::<Result<Vec<_>, _>>()?;
            let (config, config_seed) = match &config {
                Some(path) => {
                    let (m, s) = read_config(path)?;
                    (Some(m), s)
                }
                None => (None, None),
            };
            let seed = seed.or(config_seed).unwrap_or(DEFAULT_SEED);
            let result = run_scenario(&scenario, &overrides, config.as_ref(), seed)?;
            let text = match format {
                Format::Json => result.render_json(),
                Format::Csv => result.render_csv(),
            };
            match out {
                Some(path) => fs::write(path, text)?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
            if !result.pass() {
                for f in result.failures() {
                    eprintln!("check failed: {f}");
                }
            }
            Ok(result.pass())
        }
        Command::List { format } => {
            let text = match format {
                ListFormat::Json => {
                    let mut s = serde_json::to_string_pretty(&list_json()).expect("static descriptors");
                    s.push('\n');
                    s
                }
                ListFormat::Text => list_text(),
            };
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(true)
        }
        Command::Verify { seed } => {
            let (ok, report) = verify(seed);
            std::io::stdout().write_all(report.as_bytes())?;
            Ok(ok)
        }
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
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qmeas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
