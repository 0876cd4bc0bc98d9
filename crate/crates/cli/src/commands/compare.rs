//! `pinnspect compare` — relative L2 error of a dump's predictions against
//! oracle snapshots, as a markdown table (stdout) and `comparison.csv`.

use std::path::{Path, PathBuf};

use pinnspect_core::oracle::relative_l2_error;

use crate::args::Args;
use crate::dumpio;
use crate::errors::{CliError, Result};
use crate::io::{fmt_f64, parse_xu_csv, read_bytes, resolve_out_dir, Csv};
use crate::manifest::{run_digest, Manifest};

const COMMAND_FLAGS: [&str; 4] = ["dump", "snapshots", "times", "out"];

/// Entry point. Snapshot files come as positionals or via a comma-separated
/// `--snapshots` list; times are parsed from `…t<value>.csv` file names
/// unless `--times` overrides them (one entry per snapshot).
pub fn run(raw: &[String]) -> Result<()> {
    let args = Args::parse(raw, &[])?;
    args.only_known("compare", &COMMAND_FLAGS)?;
    let dump_path = args
        .get("dump")
        .ok_or_else(|| CliError::Usage("compare requires --dump <file>".into()))?;

    let mut snapshot_paths: Vec<PathBuf> =
        args.positional.iter().map(PathBuf::from).collect();
    if let Some(list) = args.get("snapshots") {
        snapshot_paths.extend(list.split(',').map(|s| PathBuf::from(s.trim())));
    }
    if snapshot_paths.is_empty() {
        return Err(CliError::Usage(
            "compare requires at least one snapshot CSV (positional or --snapshots)".into(),
        ));
    }

    let times: Vec<f64> = match args.get("times") {
        Some(list) => {
            let parsed: Vec<f64> = list
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        CliError::Usage(format!("--times: cannot parse `{}`", s.trim()))
                    })
                })
                .collect::<Result<_>>()?;
            if parsed.len() != snapshot_paths.len() {
                return Err(CliError::Usage(format!(
                    "--times lists {} entries for {} snapshots",
                    parsed.len(),
                    snapshot_paths.len()
                )));
            }
            parsed
        }
        None => snapshot_paths
            .iter()
            .map(|p| time_from_name(p))
            .collect::<Result<_>>()?,
    };

    let out_dir = resolve_out_dir(args.get("out"))?;
    let dump_bytes = read_bytes(dump_path.as_ref())?;
    let dump = dumpio::decode(&dump_bytes)?;
    let (x_lo, x_hi) = dump.config.x_domain;
    let (t_lo, t_hi) = dump.config.t_domain;

    let mut digest_parts: Vec<(&str, Vec<u8>)> = vec![("dump", dump_bytes.clone())];
    let mut rows = Vec::new();
    for (path, &t) in snapshot_paths.iter().zip(&times) {
        let bytes = read_bytes(path)?;
        digest_parts.push(("snapshot", bytes));
        let (x, u) = parse_xu_csv(path)?;
        if !(t_lo..=t_hi).contains(&t) {
            return Err(CliError::GridMismatch(format!(
                "{}: t={t} outside the dump's t domain [{t_lo}, {t_hi}]",
                path.display()
            )));
        }
        if let Some(bad) = x.iter().find(|&&v| !(x_lo..=x_hi).contains(&v)) {
            return Err(CliError::GridMismatch(format!(
                "{}: x={bad} outside the dump's x domain [{x_lo}, {x_hi}]",
                path.display()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(CliError::GridMismatch(format!(
                "{}: snapshot field contains non-finite values",
                path.display()
            )));
        }
        let mut prediction = Vec::with_capacity(x.len());
        for &xi in &x {
            let out = dump
                .params
                .forward(&[xi, t])
                .map_err(|e| CliError::Internal(e.to_string()))?;
            prediction.push(out[0]);
        }
        let rel = relative_l2_error(&prediction, &u).map_err(|e| match e {
            pinnspect_core::Error::DegenerateInput { detail } => CliError::GridMismatch(detail),
            other => CliError::Internal(other.to_string()),
        })?;
        rows.push((t, x.len(), rel));
    }

    // Markdown table to stdout.
    println!("| t | n | rel_l2 |");
    println!("|---|---|--------|");
    for &(t, n, rel) in &rows {
        println!("| {t} | {n} | {rel:.6e} |");
    }

    let mut csv = Csv::new("t,n,rel_l2");
    for &(t, n, rel) in &rows {
        csv.row(&[fmt_f64(t), n.to_string(), fmt_f64(rel)]);
    }
    let digest_refs: Vec<(&str, &[u8])> = digest_parts
        .iter()
        .map(|(l, b)| (*l, b.as_slice()))
        .collect();
    let mut manifest = Manifest::new("compare", run_digest("compare", &digest_refs), Some(dump.seed));
    csv.save(&out_dir.join("comparison.csv"))?;
    manifest.push_output("comparison.csv");
    manifest.save(&out_dir)?;
    Ok(())
}

/// Parse the snapshot time from a `…t<value>.csv` file name.
fn time_from_name(path: &Path) -> Result<f64> {
    let stem = path
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_suffix(".csv"))
        .unwrap_or_default();
    stem.rfind('t')
        .and_then(|i| stem[i + 1..].parse::<f64>().ok())
        .ok_or_else(|| {
            CliError::Usage(format!(
                "cannot parse a snapshot time from `{}`; name files `…t<value>.csv` or pass --times",
                path.display()
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_times_from_names() {
        assert_eq!(time_from_name(Path::new("snapshot_t0.5.csv")).unwrap(), 0.5);
        assert_eq!(time_from_name(Path::new("out/t1e-2.csv")).unwrap(), 0.01);
        assert!(time_from_name(Path::new("data.csv")).is_err());
    }
}
