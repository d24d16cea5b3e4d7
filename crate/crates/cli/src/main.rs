use clap::{Arg, ArgAction, Command as Cli};
use grauert_cli::config::{Origin, KEYS};
use grauert_cli::{run, RawConfig, EXIT_ERROR};
use std::path::PathBuf;
use std::process::ExitCode;

fn cli() -> Cli {
    let mut cmd = Cli::new("grauert")
        .about("Tempered spectral sums, Husimi functions and Gaussian beams on model Grauert tubes")
        .arg(Arg::new("command_pos").value_name("COMMAND").help("overrides the command key"))
        .arg(Arg::new("config").long("config").short('c').value_name("FILE").value_parser(clap::value_parser!(PathBuf)));
    for (key, help) in KEYS {
        let flag = key.replace('_', "-");
        let mut arg = Arg::new(*key).long(flag.clone()).value_name("VALUE").help(*help).action(ArgAction::Set);
        if flag != *key {
            arg = arg.alias(*key);
        }
        cmd = cmd.arg(arg);
    }
    cmd
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let mut raw = match matches.get_one::<PathBuf>("config") {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match RawConfig::parse(&text) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_ERROR as u8);
                }
            },
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(EXIT_ERROR as u8);
            }
        },
        None => RawConfig::default(),
    };
    let mut overrides: Vec<(&str, String)> =
        KEYS.iter().filter_map(|(k, _)| matches.get_one::<String>(k).map(|v| (*k, v.clone()))).collect();
    if let Some(c) = matches.get_one::<String>("command_pos") {
        overrides.push(("command", c.clone()));
    }
    for (k, v) in overrides {
        raw.set(k, &v, Origin::Flag).expect("flags are generated from the key list");
    }
    let cfg = match raw.validate() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let env = std::env::var("GW_WORKERS").ok();
    ExitCode::from(run(&cfg, env.as_deref()) as u8)
}
