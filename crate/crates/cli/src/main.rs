//! `pinnspect` — train physics-informed networks on 1-D viscous Burgers,
//! run the random-matrix forensics battery on the trained weights, and emit
//! the analytic kernel counterpoint, oracle snapshots and comparison tables.
//!
//! See `pinnspect help` (or the crate README) for the config schema, file
//! formats and exit codes.

use pinnspect_cli::commands;
use pinnspect_cli::{CliError, Result};

const USAGE: &str = "\
pinnspect — Burgers PINN training and weight forensics

USAGE:
  pinnspect <command> [flags]

COMMANDS:
  train     Train a network; writes weights.pswd, history.csv, manifest.json.
            Flags: --config <file>, --preset reference|desk, --out <dir>,
            plus any config key as a flag (e.g. --seed 7 --optimizer.rate 1e-3).
  analyze   Forensics battery on a dump; writes report.json + CSVs.
            Flags: --dump <file>, --out <dir>, --svg.
  kernel    Burgers weight-kernel matrix and band-energy curve.
            Flags: --n <points>, --h <width>|--h-dx <spacings>, --nu <f64>,
            --field zero|sin2pi|csv:<path>, --out <dir>.
  oracle    Finite-difference reference solver; one x,u CSV per time.
            Flags: --n <points>, --nu <f64>, --cfl <f64>,
            --mode full|diffusion-only|frozen-advection,
            --times <t1,t2,…>|--t-end <t>, --ic sin2pi|csv:<path>, --out <dir>.
  compare   Relative L2 of a dump's predictions against snapshot CSVs.
            Flags: --dump <file>, --snapshots <a.csv,b.csv>|positionals,
            --times <t1,…>, --out <dir>.
  help      Print this text.

OUTPUT DIRECTORY:
  --out beats the PINNSPECT_OUT environment variable beats the current
  directory. Every run writes a manifest.json; identical manifests imply
  identical outputs.

EXIT CODES:
  0 success · 1 I/O or internal · 2 usage/bad config (names the key) ·
  3 divergence/instability (prints checkpoint path) · 4 corrupt dump
  (names the failed check) · 5 under-resolved kernel · 6 grid mismatch
";

fn dispatch(argv: &[String]) -> Result<()> {
    let (command, rest) = argv
        .split_first()
        .ok_or_else(|| CliError::Usage("missing command; try `pinnspect help`".into()))?;
    match command.as_str() {
        "train" => commands::train::run(rest),
        "analyze" => commands::analyze::run(rest),
        "kernel" => commands::kernel::run(rest),
        "oracle" => commands::oracle::run(rest),
        "compare" => commands::compare::run(rest),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            Ok(())
        }
        other => Err(CliError::Usage(format!(
            "unknown command `{other}`; try `pinnspect help`"
        ))),
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&argv) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("pinnspect: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `pinnspect help` for usage");
            }
            std::process::exit(e.exit_code());
        }
    }
}
