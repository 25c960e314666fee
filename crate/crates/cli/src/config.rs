//! Flat `key = value` run files.
//!
//! Keys are long flag names without the dashes. Values from the file are
//! spliced into the argument list ahead of the ones typed on the command
//! line, so typed flags win.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use clap::Command;

pub fn read(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if out.insert(key.clone(), value).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", i + 1));
        }
    }
    Ok(out)
}

/// Finds `--config FILE` (or `--config=FILE`) anywhere in `args`.
pub fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Inserts `--key value` pairs for the chosen subcommand right after its
/// name. `out` is handled by the caller. Keys that belong to no subcommand
/// are an error; keys of other subcommands are skipped, so one file can
/// drive several runs.
pub fn splice(
    args: Vec<String>,
    values: &BTreeMap<String, String>,
    cmd: &Command,
) -> Result<Vec<String>, String> {
    let known_anywhere = |key: &str| {
        key == "out"
            || cmd
                .get_subcommands()
                .any(|s| s.get_arguments().any(|a| a.get_long() == Some(key)))
    };
    for key in values.keys() {
        if !known_anywhere(key) {
            return Err(format!("unknown config key '{key}'"));
        }
    }
    let Some(pos) = args
        .iter()
        .position(|a| cmd.get_subcommands().any(|s| s.get_name() == a))
    else {
        return Ok(args);
    };
    let sub = cmd.find_subcommand(&args[pos]).expect("matched above");
    let mut extra = Vec::new();
    for (key, value) in values {
        let Some(arg) = sub.get_arguments().find(|a| a.get_long() == Some(key)) else {
            continue;
        };
        let takes_value = arg.get_num_args().map(|n| n.takes_values()).unwrap_or(true);
        if takes_value {
            extra.push(format!("--{key}={value}"));
        } else if matches!(value.as_str(), "true" | "1" | "yes") {
            extra.push(format!("--{key}"));
        }
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, extra);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let m = parse("# run\nproblem = p2\nn_terms=21 # odd\n\nlambda = \"-1\"\n").unwrap();
        assert_eq!(m["problem"], "p2");
        assert_eq!(m["n-terms"], "21");
        assert_eq!(m["lambda"], "-1");
    }

    #[test]
    fn rejects_junk() {
        assert!(parse("problem p2").is_err());
        assert!(parse("a = 1\na = 2").is_err());
    }

    #[test]
    fn finds_config_flag() {
        let a: Vec<String> = ["epibvp", "--config", "x.cfg", "scan"].map(String::from).to_vec();
        assert_eq!(config_path(&a).as_deref(), Some("x.cfg"));
        let b: Vec<String> = ["epibvp", "scan", "--config=y"].map(String::from).to_vec();
        assert_eq!(config_path(&b).as_deref(), Some("y"));
    }
}
