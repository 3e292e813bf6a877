//! Flat `key = value` configuration files.
//!
//! Keys name long flags of the subcommand being run (plus `threads`).
//! File entries are spliced into the argument list unless the user gave the
//! same flag, so anything on the command line wins.

use std::ffi::OsString;
use std::path::Path;

use clap::{ArgAction, Command};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse(text: &str) -> CliResult<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            return Err(CliError::Usage(format!(
                "config line {}: sections are not supported",
                i + 1
            )));
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`",
                i + 1
            )));
        };
        let key = key.trim();
        let value = value.trim().trim_matches('"');
        if key.is_empty() || key.contains('.') || key.contains(char::is_whitespace) {
            return Err(CliError::Usage(format!(
                "config line {}: invalid key '{key}'",
                i + 1
            )));
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key '{key}'",
                i + 1
            )));
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line: i + 1,
        });
    }
    Ok(entries)
}

pub fn load(path: &Path) -> CliResult<Vec<Entry>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text)
}

/// Index of the subcommand token in `argv`, skipping global flags.
fn subcommand_index(argv: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < argv.len() {
        let a = argv[i].to_string_lossy();
        if a == "--config" || a == "--threads" {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Inserts the file entries as flags right after the subcommand name,
/// dropping any the user already passed.
pub fn splice(argv: &[OsString], entries: &[Entry], root: &Command) -> CliResult<Vec<OsString>> {
    let Some(idx) = subcommand_index(argv) else {
        return Ok(argv.to_vec());
    };
    let name = argv[idx].to_string_lossy().to_string();
    let Some(sub) = root.find_subcommand(&name) else {
        return Ok(argv.to_vec());
    };
    let given = |key: &str| {
        let flag = format!("--{key}");
        argv.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        })
    };
    let mut tokens = Vec::new();
    for e in entries {
        let arg = sub.get_arguments().chain(root.get_arguments()).find(|a| {
            a.get_long() == Some(e.key.as_str())
                && e.key != "config"
                && e.key != "help"
                && e.key != "version"
        });
        let Some(arg) = arg else {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{}' for '{name}'",
                e.line, e.key
            )));
        };
        if given(&e.key) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => match e.value.as_str() {
                "true" => tokens.push(OsString::from(format!("--{}", e.key))),
                "false" => {}
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: '{}' expects true or false, found '{other}'",
                        e.line, e.key
                    )))
                }
            },
            _ => {
                tokens.push(OsString::from(format!("--{}", e.key)));
                tokens.push(OsString::from(&e.value));
            }
        }
    }
    let mut out = Vec::with_capacity(argv.len() + tokens.len());
    out.extend_from_slice(&argv[..=idx]);
    out.extend(tokens);
    out.extend_from_slice(&argv[idx + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let e = parse("# header\n\ngroup = G  # trailing\ngrid=5\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!((e[0].key.as_str(), e[0].value.as_str()), ("group", "G"));
        assert_eq!(
            (e[1].key.as_str(), e[1].value.as_str(), e[1].line),
            ("grid", "5", 4)
        );
    }

    #[test]
    fn rejects_nesting_and_garbage() {
        assert!(parse("[density]\ngrid = 3").is_err());
        assert!(parse("a.b = 3").is_err());
        assert!(parse("just words").is_err());
        assert!(parse("grid = 1\ngrid = 2").is_err());
    }

    #[test]
    fn finds_subcommand_after_globals() {
        let argv: Vec<OsString> = [
            "satotate",
            "--threads",
            "2",
            "--config",
            "x",
            "density",
            "--grid",
            "3",
        ]
        .iter()
        .map(OsString::from)
        .collect();
        assert_eq!(subcommand_index(&argv), Some(5));
    }
}
