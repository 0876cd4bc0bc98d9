//! Minimal flag parser.
//!
//! Flags come as `--key value` or `--key=value`; a fixed per-command set of
//! boolean switches takes no value. Everything that is not a recognized
//! command-level flag is handed to the caller untouched, which lets `train`
//! route arbitrary `--<config-key> <value>` overrides into the configuration
//! schema (the flag namespace *is* the config-key namespace).

use crate::errors::{CliError, Result};

/// Parsed command line: `(key, value)` pairs in order plus positionals.
#[derive(Debug, Default)]
pub struct Args {
    /// Flag pairs in command-line order. Boolean switches carry `"true"`.
    pub flags: Vec<(String, String)>,
    /// Positional arguments in order.
    pub positional: Vec<String>,
}

impl Args {
    /// Parse raw arguments. `switches` lists flag names that take no value.
    pub fn parse(raw: &[String], switches: &[&str]) -> Result<Args> {
        let mut out = Args::default();
        let mut it = raw.iter().peekable();
        while let Some(arg) = it.next() {
            if let Some(stripped) = arg.strip_prefix("--") {
                if stripped.is_empty() {
                    // `--` terminates flag parsing.
                    out.positional.extend(it.cloned());
                    break;
                }
                if let Some((k, v)) = stripped.split_once('=') {
                    out.flags.push((k.to_string(), v.to_string()));
                } else if switches.contains(&stripped) {
                    out.flags.push((stripped.to_string(), String::from("true")));
                } else {
                    let v = it.next().ok_or_else(|| {
                        CliError::Usage(format!("flag --{stripped} expects a value"))
                    })?;
                    out.flags.push((stripped.to_string(), v.clone()));
                }
            } else {
                out.positional.push(arg.clone());
            }
        }
        Ok(out)
    }

    /// Last value of flag `key`, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.flags
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `true` when the switch was given.
    pub fn switch(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// All flags whose key is not in `known`, in order (config overrides).
    pub fn unknown_flags<'a>(&'a self, known: &'a [&str]) -> impl Iterator<Item = (&'a str, &'a str)> {
        self.flags
            .iter()
            .filter(move |(k, _)| !known.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Reject positionals for commands that take none.
    pub fn no_positionals(&self, command: &str) -> Result<()> {
        if let Some(p) = self.positional.first() {
            return Err(CliError::Usage(format!(
                "`{command}` takes no positional arguments (got `{p}`)"
            )));
        }
        Ok(())
    }

    /// Reject flags outside `known` for commands with a closed flag set.
    pub fn only_known(&self, command: &str, known: &[&str]) -> Result<()> {
        if let Some((k, _)) = self
            .flags
            .iter()
            .find(|(k, _)| !known.contains(&k.as_str()))
        {
            return Err(CliError::Usage(format!(
                "unknown flag --{k} for `{command}`"
            )));
        }
        Ok(())
    }
}

/// Parse a typed flag value with a uniform error message.
pub fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse::<T>().map_err(|_| {
        CliError::Usage(format!(
            "flag --{key}: cannot parse `{value}` as {}",
            std::any::type_name::<T>()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_pairs_switches_and_positionals() {
        let raw = strs(&["--a", "1", "--svg", "--b=x=y", "pos1", "--", "--not-a-flag"]);
        let args = Args::parse(&raw, &["svg"]).unwrap();
        assert_eq!(args.get("a"), Some("1"));
        assert!(args.switch("svg"));
        assert_eq!(args.get("b"), Some("x=y"));
        assert_eq!(args.positional, vec!["pos1", "--not-a-flag"]);
    }

    #[test]
    fn missing_value_is_usage_error() {
        let raw = strs(&["--a"]);
        let err = Args::parse(&raw, &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn last_value_wins_and_unknowns_flow_through() {
        let raw = strs(&["--seed", "1", "--seed", "2", "--width", "50"]);
        let args = Args::parse(&raw, &[]).unwrap();
        assert_eq!(args.get("seed"), Some("2"));
        let unknown: Vec<_> = args.unknown_flags(&["seed"]).collect();
        assert_eq!(unknown, vec![("width", "50")]);
    }
}
