//! `pinnspect oracle` — run the finite-difference reference solver and write
//! one `x,u` snapshot CSV per requested time.

use pinnspect_core::fmath;
use pinnspect_core::oracle::{solve_burgers, InitialCondition, OracleConfig, OracleMode};
use pinnspect_core::Error as CoreError;

use crate::args::{parse_value, Args};
use crate::errors::{CliError, Result};
use crate::io::{fmt_f64, parse_xu_csv, resolve_out_dir, Csv};
use crate::manifest::{run_digest, Manifest};

const COMMAND_FLAGS: [&str; 8] = ["n", "nu", "cfl", "mode", "times", "t-end", "ic", "out"];

/// Entry point.
pub fn run(raw: &[String]) -> Result<()> {
    let args = Args::parse(raw, &[])?;
    args.no_positionals("oracle")?;
    args.only_known("oracle", &COMMAND_FLAGS)?;

    let n: usize = parse_value(
        "n",
        args.get("n")
            .ok_or_else(|| CliError::Usage("oracle requires --n <grid points>".into()))?,
    )?;
    let nu: f64 = match args.get("nu") {
        Some(v) => parse_value("nu", v)?,
        None => 0.01 / fmath::PI,
    };
    let cfl: f64 = match args.get("cfl") {
        Some(v) => parse_value("cfl", v)?,
        None => 0.4,
    };
    let mode = match args.get("mode") {
        Some(v) => OracleMode::parse(v).map_err(|_| {
            CliError::Usage(format!(
                "--mode expects full | diffusion-only | frozen-advection, got `{v}`"
            ))
        })?,
        None => OracleMode::Full,
    };
    let initial = match args.get("ic") {
        None | Some("sin2pi") => InitialCondition::Sin2Pi,
        Some(other) => {
            let path = other.strip_prefix("csv:").ok_or_else(|| {
                CliError::Usage(format!("--ic expects sin2pi | csv:<path>, got `{other}`"))
            })?;
            let (_, u) = parse_xu_csv(path.as_ref())?;
            InitialCondition::Custom(u)
        }
    };
    let time_tokens: Vec<String> = match (args.get("times"), args.get("t-end")) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--times and --t-end are mutually exclusive".into(),
            ))
        }
        (Some(list), None) => list.split(',').map(|s| s.trim().to_string()).collect(),
        (None, Some(t)) => vec![t.trim().to_string()],
        (None, None) => vec![String::from("1")],
    };
    let out_dir = resolve_out_dir(args.get("out"))?;

    let mut descriptor = format!("n={n} nu={} cfl={} mode={}", fmt_f64(nu), fmt_f64(cfl), mode.name());
    if let InitialCondition::Custom(u) = &initial {
        descriptor.push_str(" ic=custom:");
        for v in u {
            descriptor.push_str(&fmt_f64(*v));
            descriptor.push(' ');
        }
    }
    let mut manifest = Manifest::new(
        "oracle",
        run_digest(
            "oracle",
            &[
                ("params", descriptor.as_bytes()),
                ("times", time_tokens.join(",").as_bytes()),
            ],
        ),
        None,
    );

    for token in &time_tokens {
        validate_time_token(token)?;
        let t: f64 = parse_value("times", token)?;
        let cfg = OracleConfig {
            n,
            nu,
            t_end: t,
            cfl,
            mode,
            initial: initial.clone(),
        };
        let run = solve_burgers(&cfg).map_err(|e| match e {
            CoreError::Instability { detail } => CliError::Instability(detail),
            CoreError::Config { key, detail } => CliError::BadConfig { key, detail },
            other => CliError::Internal(other.to_string()),
        })?;
        let name = format!("snapshot_t{token}.csv");
        let comment = format!(
            "oracle t={} n={n} nu={} mode={} steps={}",
            fmt_f64(t),
            fmt_f64(nu),
            mode.name(),
            run.steps
        );
        let mut csv = Csv::with_comment(&comment, "x,u");
        for (x, u) in run.snapshot.x.iter().zip(&run.snapshot.u) {
            csv.row(&[fmt_f64(*x), fmt_f64(*u)]);
        }
        csv.save(&out_dir.join(&name))?;
        manifest.push_output(&name);
        println!(
            "t={token}: {} steps, mean drift {:.3e}, energy {:.6} -> {:.6}, wrote {name}",
            run.steps, run.mean_drift, run.energy_initial, run.energy_final
        );
    }
    manifest.save(&out_dir)?;
    Ok(())
}

/// Time tokens appear verbatim in file names; keep them to number-ish
/// characters so they cannot form path components.
fn validate_time_token(token: &str) -> Result<()> {
    if token.is_empty()
        || !token
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
    {
        return Err(CliError::Usage(format!(
            "--times entries must be plain numbers, got `{token}`"
        )));
    }
    Ok(())
}
