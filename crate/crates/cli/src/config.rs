//! `--config` files: TOML tables named after subcommands whose keys are flag
//! names. They are spliced in front of the command-line flags, so anything
//! given on the command line wins.
//!
//! ```toml
//! [normalize]
//! median-kernel = 11
//! flip-y = "auto"
//!
//! [compare]
//! metrics = "mpjpe,dtw"
//! allow-reflection = false
//! ```

use std::ffi::OsString;
use std::path::Path;

use crate::fail::{CliError, CliResult};

pub const SUBCOMMANDS: [&str; 7] = [
    "ingest",
    "retarget",
    "normalize",
    "resample",
    "compare",
    "aggregate",
    "synth",
];

/// Finds `--config <path>` or `--config=<path>` in the raw arguments.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

/// Flags for `subcommand` from the parsed file.
pub fn flags_for(text: &str, subcommand: &str) -> CliResult<Vec<OsString>> {
    let doc: toml::Table =
        toml::from_str(text).map_err(|e| CliError::parse(format!("config: {}", e.message())))?;
    for (key, value) in &doc {
        if !SUBCOMMANDS.contains(&key.as_str()) {
            return Err(CliError::validation(format!(
                "config: unknown section [{key}]"
            )));
        }
        if !value.is_table() {
            return Err(CliError::validation(format!(
                "config: `{key}` must be a table of flag defaults"
            )));
        }
    }
    let Some(section) = doc.get(subcommand).and_then(|v| v.as_table()) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for (key, value) in section {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            toml::Value::Boolean(true) => out.push(flag.into()),
            toml::Value::Boolean(false) => {}
            toml::Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            toml::Value::Integer(i) => {
                out.push(flag.into());
                out.push(i.to_string().into());
            }
            toml::Value::Float(f) => {
                out.push(flag.into());
                out.push(f.to_string().into());
            }
            _ => {
                return Err(CliError::validation(format!(
                    "config: [{subcommand}] {key} must be a string, number or boolean"
                )))
            }
        }
    }
    Ok(out)
}

/// Drops config flags (and their values) already present on the command line.
fn without_given(flags: Vec<OsString>, given: &[String]) -> Vec<OsString> {
    let mut out = Vec::new();
    let mut skipping = false;
    for f in flags {
        let s = f.to_string_lossy();
        if s.starts_with("--") {
            skipping = given.iter().any(|g| *g == s);
        }
        if !skipping {
            out.push(f);
        }
    }
    out
}

/// Splices config defaults right after the subcommand name.
pub fn expand_args(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::io(format!("{}: {e}", Path::new(&path).display())))?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let sub = args[pos].to_string_lossy().into_owned();
    let given: Vec<String> = args[pos + 1..]
        .iter()
        .map(|a| {
            a.to_string_lossy()
                .split('=')
                .next()
                .unwrap_or("")
                .to_string()
        })
        .collect();
    let extra = without_given(flags_for(&text, &sub)?, &given);
    let mut out = args;
    out.splice(pos + 1..pos + 1, extra);
    Ok(out)
}
