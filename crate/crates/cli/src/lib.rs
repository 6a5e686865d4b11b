//! Command-line experiment driver for `airy-gibbs`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};

use crate::config::{Params, COMMON_KEYS};
pub use crate::error::CliError;
use crate::experiments::{find, EXPERIMENTS};
use crate::output::{create_run_dir, write_run};

fn flag(name: &str) -> String {
    name.replace('_', "-")
}

pub fn command() -> Command {
    let mut cmd = Command::new("airy-gibbs")
        .about("Simulate non-intersecting line ensembles, Gibbs resampling and last passage percolation")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .global(true)
                .help("key=value config file; flags override it"),
        )
        .arg(
            Arg::new("out")
                .long("out")
                .value_name("DIR")
                .global(true)
                .help("results root [default: results]"),
        )
        .subcommand(Command::new("run").about("Run the experiment named by experiment= in --config"));
    for k in COMMON_KEYS {
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(flag(k.name))
                .value_name("VALUE")
                .global(true)
                .help(format!("{} [default: {}]", k.help, k.default)),
        );
    }
    for e in EXPERIMENTS {
        let mut sub = Command::new(e.name).about(e.about);
        for k in e.keys {
            sub = sub.arg(
                Arg::new(k.name)
                    .long(flag(k.name))
                    .value_name("VALUE")
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

fn flag_values(m: &ArgMatches, names: impl Iterator<Item = &'static str>) -> BTreeMap<String, String> {
    names
        .filter_map(|n| m.get_one::<String>(n).map(|v| (n.to_string(), v.clone())))
        .collect()
}

/// Parses arguments, runs one experiment and returns the run directory.
pub fn run_from_matches(matches: &ArgMatches) -> Result<PathBuf, CliError> {
    let (sub, sm) = matches
        .subcommand()
        .ok_or_else(|| CliError::Usage("missing subcommand".into()))?;
    let config_path = sm.get_one::<String>("config");
    let file = match config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
            config::parse(&text)?
        }
        None if sub == "run" => return Err(CliError::Usage("run needs --config PATH".into())),
        None => BTreeMap::new(),
    };
    let name = if sub == "run" {
        file.get("experiment")
            .cloned()
            .ok_or_else(|| CliError::Usage("config has no experiment= line".into()))?
    } else {
        sub.to_string()
    };
    let exp = find(&name).ok_or_else(|| CliError::Usage(format!("unknown experiment {name}")))?;
    let mut flags = flag_values(sm, COMMON_KEYS.iter().map(|k| k.name));
    if sub != "run" {
        flags.extend(flag_values(sm, exp.keys.iter().map(|k| k.name)));
    }
    let params = Params::resolve(exp.name, exp.keys, &file, &flags)?;
    let root = sm
        .get_one::<String>("out")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("results"));
    run_experiment(&params, &root)
}

pub fn run_experiment(params: &Params, root: &Path) -> Result<PathBuf, CliError> {
    let exp =
        find(&params.experiment).ok_or_else(|| CliError::Usage(format!("unknown experiment {}", params.experiment)))?;
    let started = std::time::Instant::now();
    let art = (exp.run)(params)?;
    log::info!("{} finished in {:.1?}", exp.name, started.elapsed());
    let dir = create_run_dir(root, exp.name)?;
    write_run(&dir, &params.snapshot(), &art)?;
    Ok(dir)
}
