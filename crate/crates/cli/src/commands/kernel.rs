//! `pinnspect kernel` — emit the Burgers weight-kernel matrix and its
//! band-energy curve.

use pinnspect_core::fmath;
use pinnspect_core::forensics::band_energy;
use pinnspect_core::lab::{burgers_kernel_matrix, KernelSpec};
use pinnspect_core::Error as CoreError;

use crate::args::{parse_value, Args};
use crate::errors::{CliError, Result};
use crate::io::{fmt_f64, parse_xu_csv, resolve_out_dir, Csv};
use crate::manifest::{run_digest, Manifest};

const COMMAND_FLAGS: [&str; 6] = ["n", "h", "h-dx", "nu", "field", "out"];

/// Entry point.
pub fn run(raw: &[String]) -> Result<()> {
    let args = Args::parse(raw, &[])?;
    args.no_positionals("kernel")?;
    args.only_known("kernel", &COMMAND_FLAGS)?;

    let n: usize = parse_value(
        "n",
        args.get("n")
            .ok_or_else(|| CliError::Usage("kernel requires --n <grid points>".into()))?,
    )?;
    let nu: f64 = match args.get("nu") {
        Some(v) => parse_value("nu", v)?,
        None => 0.01 / fmath::PI,
    };
    let h: f64 = match (args.get("h"), args.get("h-dx")) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--h (absolute) and --h-dx (grid spacings) are mutually exclusive".into(),
            ))
        }
        (Some(v), None) => parse_value("h", v)?,
        (None, Some(v)) => parse_value::<f64>("h-dx", v)? / n as f64,
        (None, None) => 3.0 / n as f64,
    };

    let field_desc = args.get("field").unwrap_or("zero").to_string();
    let u_field = parse_field(&field_desc, n)?;
    let out_dir = resolve_out_dir(args.get("out"))?;

    let spec = KernelSpec {
        n,
        h,
        nu,
        u_field,
    };
    let w = burgers_kernel_matrix(&spec).map_err(|e| match e {
        // The resolvability guard names `h`; that is the documented exit-5 path.
        CoreError::Config { key, detail } if key == "h" => CliError::UnderResolved(detail),
        CoreError::Config { key, detail } => CliError::BadConfig { key, detail },
        other => CliError::Internal(other.to_string()),
    })?;

    // Matrix CSV: one comment line with the construction parameters, then n
    // rows of n quadrature weights (no column header — the column index is
    // the source node).
    let comment = format!(
        "burgers_kernel n={n} h={} h_over_dx={} nu={} field={field_desc}",
        fmt_f64(h),
        fmt_f64(h * n as f64),
        fmt_f64(nu)
    );
    let mut matrix_csv = Csv::comment_only(&comment);
    for i in 0..n {
        matrix_csv.row(&w.row(i).iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>());
    }

    // Band-energy curve of the kernel matrix (wrapped distance matches the
    // kernel's periodic structure; plain included for contrast).
    let mut band_csv = Csv::with_comment(&comment, "halfwidth,plain,wrapped");
    let mut k10_wrapped = None;
    for k in 0..=(n / 2).min(n - 1) {
        let b = band_energy(&w, k).map_err(|e| CliError::Internal(e.to_string()))?;
        if k == 10 {
            k10_wrapped = Some(b.wrapped);
        }
        band_csv.row(&[k.to_string(), fmt_f64(b.plain), fmt_f64(b.wrapped)]);
    }

    let mut manifest = Manifest::new(
        "kernel",
        run_digest("kernel", &[("params", comment.as_bytes())]),
        None,
    );
    matrix_csv.save(&out_dir.join("kernel.csv"))?;
    manifest.push_output("kernel.csv");
    band_csv.save(&out_dir.join("band_energy.csv"))?;
    manifest.push_output("band_energy.csv");
    manifest.save(&out_dir)?;

    print!("kernel n={n} h={:.6} ({:.2} dx) nu={:.6}", h, h * n as f64, nu);
    if let Some(b) = k10_wrapped {
        print!(" band_energy(k=10) wrapped={b:.6}");
    }
    println!();
    println!("wrote {}", out_dir.join("kernel.csv").display());
    Ok(())
}

/// Parse the `--field` source: `zero`, `sin2pi`, or `csv:<path>` with an
/// `x,u` snapshot of exactly `n` rows.
fn parse_field(desc: &str, n: usize) -> Result<Vec<f64>> {
    match desc {
        "zero" => Ok(vec![0.0; n]),
        "sin2pi" => Ok((0..n)
            .map(|i| fmath::sin(2.0 * fmath::PI * i as f64 / n as f64))
            .collect()),
        other => {
            let path = other.strip_prefix("csv:").ok_or_else(|| {
                CliError::Usage(format!(
                    "--field expects zero | sin2pi | csv:<path>, got `{other}`"
                ))
            })?;
            let (_, u) = parse_xu_csv(path.as_ref())?;
            if u.len() != n {
                return Err(CliError::Usage(format!(
                    "--field {path}: {} samples for an n={n} grid",
                    u.len()
                )));
            }
            Ok(u)
        }
    }
}
