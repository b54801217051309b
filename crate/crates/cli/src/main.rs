use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use laguerre_dg_cli::config;
use laguerre_dg_cli::run::execute;
use laguerre_dg_cli::CliError;

#[derive(Parser)]
#[command(name = "laguerre-dg", version, about = "Laguerre absorbing layers: spectra, rules and coupled runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    output: PathBuf,
    /// `key=value` patch applied to the config; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads for independent table rows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct VariantArgs {
    #[arg(long, value_parser = ["strong_collocation", "weak_nodal", "weak_modal"])]
    form: Option<String>,
    #[arg(long, value_parser = ["functions", "polynomials"])]
    basis: Option<String>,
    #[arg(long, value_parser = ["gl", "glr"])]
    nodes: Option<String>,
    #[arg(long, value_parser = ["inflow", "outflow"])]
    direction: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "M")]
    modes: Option<usize>,
    #[arg(long = "u", allow_hyphen_values = true)]
    velocity: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Quadrature nodes and weights.
    Rule {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        variant: VariantArgs,
    },
    /// Dense operator matrix and forcing vector of one advection variant.
    Operator {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        variant: VariantArgs,
    },
    /// Eigenvalues and stability summary of one advection variant.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        variant: VariantArgs,
    },
    /// Any scenario from a config file.
    Run {
        #[command(flatten)]
        common: Common,
    },
}

fn quoted(key: &str, v: &Option<String>) -> Option<String> {
    v.as_ref().map(|s| format!("{key}=\"{s}\""))
}

/// Turns direct flags into overrides on a skeleton config, so flags and
/// config files go through the same validation.
fn flag_overrides(v: &VariantArgs) -> Vec<String> {
    let mut out: Vec<String> = [
        quoted("form", &v.form),
        quoted("basis", &v.basis),
        quoted("nodes", &v.nodes),
        quoted("direction", &v.direction),
    ]
    .into_iter()
    .flatten()
    .collect();
    out.extend(v.beta.map(|b| format!("beta={b:?}")));
    out.extend(v.modes.map(|m| format!("modes={m}")));
    out.extend(v.velocity.map(|u| format!("velocity={u:?}")));
    out
}

fn load(common: &Common, scenario: Option<&str>, variant: Option<&VariantArgs>) -> Result<config::ExperimentConfig, CliError> {
    let mut text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    if let Some(s) = scenario {
        if common.config.is_none() {
            text = format!("scenario = \"{s}\"\n");
        }
        overrides.push(format!("scenario=\"{s}\""));
    }
    if let Some(v) = variant {
        if scenario == Some("rule") {
            let v = VariantArgs {
                form: None,
                direction: None,
                velocity: None,
                basis: v.basis.clone(),
                nodes: v.nodes.clone(),
                beta: v.beta,
                modes: v.modes,
            };
            overrides.extend(flag_overrides(&v));
        } else {
            overrides.extend(flag_overrides(v));
        }
    }
    overrides.extend(common.overrides.iter().cloned());
    if common.config.is_none() && scenario.is_none() {
        return Err(CliError::Config("run needs --config".into()));
    }
    config::load(&text, &overrides)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, cfg) = match &cli.command {
        Command::Rule { common, variant } => (common, load(common, Some("rule"), Some(variant))),
        Command::Operator { common, variant } => (common, load(common, Some("operator"), Some(variant))),
        Command::Spectrum { common, variant } => (common, load(common, Some("spectrum"), Some(variant))),
        Command::Run { common } => (common, load(common, None, None)),
    };
    let result = cfg.and_then(|cfg| execute(&cfg, &common.output, common.jobs));
    match result {
        Ok(report) => {
            // a closed pipe (`| head`) is not an error worth reporting
            let mut out = std::io::stdout().lock();
            for l in &report.lines {
                let _ = writeln!(out, "{l}");
            }
            for f in &report.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
