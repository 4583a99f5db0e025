mod args;
mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::config::{resolve, Settings};
use crate::error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let msg = first.trim_start_matches("error: ");
            return fail(CliError::usage(msg));
        }
    };
    let level = match cli.global.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_env("COGSIM_LOG").init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.kind.exit_code() as u8)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let global = Settings::from_global(&cli.global);
    let flags = match &cli.command {
        Command::Validate(a) => {
            let mut s = global.with_data(&a.data);
            s.baseline = a.baseline.clone();
            s
        }
        Command::Fit(a) => global.with_data(&a.data).with_search(&a.search),
        Command::Simulate(a) => {
            let mut s = global.with_data(&a.data).with_hp(&a.hp);
            s.samples = a.samples;
            s
        }
        Command::Difficulty(a) => {
            let mut s = global.with_data(&a.data).with_hp(&a.hp).with_baseline_source(a.baseline_source);
            s.samples = a.samples;
            s.baseline = a.baseline.clone();
            s
        }
        Command::Evaluate(a) => {
            let mut s = global.with_data(&a.data).with_search(&a.search);
            s.folds = a.folds;
            s.baseline = a.baseline.clone();
            s
        }
        Command::Project(a) => {
            let mut s = global.with_data(&a.data).with_hp(&a.hp);
            s.word = a.word.clone();
            s.samples = a.samples;
            s.replicates = a.replicates;
            s.level = a.level;
            s
        }
    };
    let settings = resolve(flags, cli.global.config.as_deref())?;

    if let Some(n) = settings.threads {
        if n == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::compute(format!("cannot start thread pool: {e}")))?;
    }

    match &cli.command {
        Command::Validate(_) => commands::validate(&settings),
        Command::Fit(_) => commands::fit(&settings),
        Command::Simulate(a) => commands::simulate(&settings, &a.word),
        Command::Difficulty(a) => commands::difficulty_cmd(&settings, &a.word),
        Command::Evaluate(_) => commands::evaluate(&settings),
        Command::Project(_) => commands::project(&settings),
    }
}
