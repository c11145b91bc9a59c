use clap::{Arg, ArgAction, Command};
use modnls::cli::{self, CONFIG_KEYS, EXIT_CONFIG_ERROR, EXIT_VERDICT_FAILED};
use modnls::config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

fn with_common_args(cmd: Command) -> Command {
    let mut cmd = cmd.arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("TOML configuration file (flat dotted keys)"),
    );
    for key in CONFIG_KEYS {
        cmd = cmd.arg(
            Arg::new(*key)
                .long(key)
                .value_name("VALUE")
                .action(ArgAction::Set)
                .help("override the configuration key of the same name"),
        );
    }
    cmd
}

fn with_input_arg(cmd: Command) -> Command {
    cmd.arg(
        Arg::new("input")
            .long("input")
            .value_name("FIELD_CSV")
            .help("input field file; defaults to the unit Gaussian on the configured grid"),
    )
}

fn main() -> ExitCode {
    let cmd = Command::new("modnls")
        .about("Splitting-scheme solver and inequality verifier for the 1D cubic NLS")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .subcommand(with_common_args(Command::new("schedule").about(
            "emit the step schedule (CSV) and its summary (JSON) for the configured parameters",
        )))
        .subcommand(with_input_arg(with_common_args(
            Command::new("norms").about("norm table (Lebesgue and modulation) for a field"),
        )))
        .subcommand(with_input_arg(with_common_args(
            Command::new("split").about("split a field with certified budgets; writes phi/psi"),
        )))
        .subcommand(
            with_input_arg(with_common_args(
                Command::new("evolve").about("evolve a field and write the trajectory directory"),
            ))
            .arg(
                Arg::new("kind")
                    .long("kind")
                    .value_name("nls|free|picard")
                    .default_value("nls"),
            ),
        )
        .subcommand(with_common_args(
            Command::new("run").about("run the full scheme and write the step-ledger report"),
        ))
        .subcommand(with_common_args(
            Command::new("verify").about("run the whole verification suite; nonzero exit on failure"),
        ))
        .subcommand(with_common_args(
            Command::new("calibrate").about("measure the estimate constants on probe corpora"),
        ));

    let matches = cmd.get_matches();
    let (name, sub) = matches.subcommand().expect("subcommand required");

    let config_path = sub.get_one::<String>("config").map(PathBuf::from);
    let mut overrides = Vec::new();
    for key in CONFIG_KEYS {
        if let Some(value) = sub.get_one::<String>(*key) {
            overrides.push((key.to_string(), value.clone()));
        }
    }
    let cfg = match RunConfig::load(config_path.as_deref(), &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG_ERROR as u8);
        }
    };
    let result = match name {
        "schedule" => cli::cmd_schedule(&cfg),
        "norms" => {
            let input = sub.get_one::<String>("input").map(PathBuf::from);
            cli::cmd_norms(&cfg, &input)
        }
        "split" => {
            let input = sub.get_one::<String>("input").map(PathBuf::from);
            cli::cmd_split(&cfg, &input)
        }
        "evolve" => {
            let input = sub.get_one::<String>("input").map(PathBuf::from);
            let kind = sub.get_one::<String>("kind").map(String::as_str).unwrap_or("nls");
            cli::cmd_evolve(&cfg, &input, kind)
        }
        "run" => cli::cmd_run(&cfg),
        "verify" => cli::cmd_verify(&cfg),
        "calibrate" => cli::cmd_calibrate(&cfg),
        _ => unreachable!("subcommand gate"),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VERDICT_FAILED as u8)
        }
    }
}
