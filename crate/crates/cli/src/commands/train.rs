//! `pinnspect train` — run the PINN trainer, write dump + history CSV.

use std::time::Instant;

use pinnspect_core::dump::{CreationMeta, WeightDump};
use pinnspect_core::pinn::{train, Clock, TrainOutcome};

use crate::args::Args;
use crate::config::{canonical_config, parse_config_text, ConfigBuilder};
use crate::dumpio;
use crate::errors::{core_error, CliError, Result};
use crate::io::{fmt_f64, read_text, resolve_out_dir, Csv};
use crate::manifest::{run_digest, sha256_hex, Manifest};

/// Monotonic wall clock for history timestamps.
struct WallClock(Instant);

impl Clock for WallClock {
    fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

const COMMAND_FLAGS: [&str; 3] = ["config", "preset", "out"];

/// Entry point.
pub fn run(raw: &[String]) -> Result<()> {
    let args = Args::parse(raw, &[])?;
    args.no_positionals("train")?;

    // Base: config file pairs (if any), preset from file or --preset flag,
    // then command-line `--<config-key> <value>` overrides, last wins.
    let mut pairs = Vec::new();
    if let Some(path) = args.get("config") {
        pairs = parse_config_text(&read_text(path.as_ref())?)?;
    }
    let default_preset = args.get("preset").unwrap_or("reference");
    let mut builder = ConfigBuilder::from_pairs(&pairs, default_preset)?;
    for (k, v) in args.unknown_flags(&COMMAND_FLAGS) {
        builder.apply(k, v)?;
    }
    let config = builder.finish()?;

    let out_dir = resolve_out_dir(args.get("out"))?;
    let config_digest = sha256_hex(canonical_config(&config).as_bytes());
    eprintln!(
        "training: {} hidden layers × {}, {} steps (+{} fine-tune), seed {}",
        config.hidden_layers,
        config.width,
        config.optimizer.steps,
        config.optimizer.phase2_steps,
        config.seed
    );

    let started = Instant::now();
    let outcome = train(&config, &WallClock(started)).map_err(core_error)?;
    eprintln!("trained in {:.1}s", started.elapsed().as_secs_f64());

    let mut dump = WeightDump::from_outcome(&config, &outcome);
    dump.creation = CreationMeta {
        tool: String::from("pinnspect"),
        tool_version: String::from(env!("CARGO_PKG_VERSION")),
        config_digest: config_digest.clone(),
    };

    let history_csv = history_csv(&outcome);
    let diverged = outcome.diverged_at;
    let dump_name = if diverged.is_some() {
        "checkpoint.pswd"
    } else {
        "weights.pswd"
    };

    let mut manifest = Manifest::new(
        "train",
        run_digest("train", &[("config", canonical_config(&config).as_bytes())]),
        Some(config.seed),
    );
    let dump_path = out_dir.join(dump_name);
    dumpio::save(&dump_path, &dump)?;
    manifest.push_output(dump_name);
    history_csv.save(&out_dir.join("history.csv"))?;
    manifest.push_output("history.csv");
    manifest.save(&out_dir)?;

    if let Some(step) = diverged {
        return Err(CliError::Divergence {
            step,
            checkpoint: dump_path,
        });
    }

    let h = &dump.history;
    println!(
        "wrote {} (steps {}, final loss {:.6e}, residual {:.6e})",
        dump_path.display(),
        h.steps_run,
        h.final_total,
        h.final_residual
    );
    Ok(())
}

/// History CSV: per-step minibatch records and full-set evaluations, tagged
/// by scope. Header: `step,scope,total,residual,ic,bc`. Wall-clock timings
/// are deliberately not written: run outputs must be bit-reproducible from
/// `(config, seed)` (timings go to stderr instead).
fn history_csv(outcome: &TrainOutcome) -> Csv {
    let mut csv = Csv::new("step,scope,total,residual,ic,bc");
    for (scope, records) in [
        ("step", &outcome.history.steps),
        ("full", &outcome.history.full_evals),
    ] {
        for r in records {
            csv.row(&[
                r.step.to_string(),
                scope.to_string(),
                fmt_f64(r.total),
                fmt_f64(r.residual),
                fmt_f64(r.ic),
                fmt_f64(r.bc),
            ]);
        }
    }
    csv
}
