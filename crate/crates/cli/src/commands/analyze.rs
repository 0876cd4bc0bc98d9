//! `pinnspect analyze` — run the forensics battery on a dump, write the
//! report JSON, plot-ready CSVs and optional SVG quick-looks.

use std::path::Path;

use pinnspect_core::forensics::{analyze_dump, AnalysisOutput};

use crate::args::Args;
use crate::dumpio;
use crate::errors::{CliError, Result};
use crate::io::{fmt_f64, read_bytes, resolve_out_dir, write_atomic, Csv};
use crate::manifest::{run_digest, Manifest, REPORT_FORMAT_VERSION};
use crate::svgplot::{eigen_scatter, line_plot, Series};

const COMMAND_FLAGS: [&str; 3] = ["dump", "out", "svg"];

/// Top-level schema of `report.json`.
///
/// Every scalar inside is finite or `null`: optional statistics (the
/// generalized-Gaussian fit on short samples) serialize as `null` and the
/// `summary.flags` list carries the reason; the serializer rejects non-finite
/// numbers outright, so a report that exists is a report whose numbers parse.
#[derive(serde::Serialize)]
struct ReportJson<'a> {
    report_format_version: u32,
    summary: &'a pinnspect_core::forensics::AnalysisSummary,
}

/// Entry point.
pub fn run(raw: &[String]) -> Result<()> {
    let args = Args::parse(raw, &["svg"])?;
    args.no_positionals("analyze")?;
    args.only_known("analyze", &COMMAND_FLAGS)?;
    let dump_path = args
        .get("dump")
        .ok_or_else(|| CliError::Usage("analyze requires --dump <file>".into()))?;
    let out_dir = resolve_out_dir(args.get("out"))?;
    let svg = args.switch("svg");

    let dump_bytes = read_bytes(dump_path.as_ref())?;
    let dump = dumpio::decode(&dump_bytes)?;
    let output = analyze_dump(&dump).map_err(|e| CliError::CorruptDump {
        check: String::from("analyzability"),
        detail: e.to_string(),
    })?;
    let summary = &output.summary;

    let mut manifest = Manifest::new(
        "analyze",
        run_digest(
            "analyze",
            &[("dump", &dump_bytes), ("svg", &[svg as u8])],
        ),
        Some(dump.seed),
    );

    // report.json
    let report = ReportJson {
        report_format_version: REPORT_FORMAT_VERSION,
        summary,
    };
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Internal(format!("report serialization: {e}")))?;
    text.push('\n');
    write_atomic(&out_dir.join("report.json"), text.as_bytes())?;
    manifest.push_output("report.json");

    // densities.csv
    let mut densities = Csv::new("subject,x,density");
    for curve in output.weight_densities.iter().chain(&output.bias_densities) {
        for &(x, d) in &curve.points {
            densities.row(&[curve.name.clone(), fmt_f64(x), fmt_f64(d)]);
        }
    }
    densities.save(&out_dir.join("densities.csv"))?;
    manifest.push_output("densities.csv");

    // eigenvalues.csv (entry-standardized spectra)
    let mut eigen = Csv::new("layer,re,im");
    for layer in &summary.spectral.layers {
        for &(re, im) in &layer.eigenvalues {
            eigen.row(&[layer.layer_index.to_string(), fmt_f64(re), fmt_f64(im)]);
        }
    }
    eigen.save(&out_dir.join("eigenvalues.csv"))?;
    manifest.push_output("eigenvalues.csv");

    // singular_values.csv (descending, trained + moment-matched baseline)
    let mut sv = Csv::new("layer,index,trained,baseline");
    for layer in &summary.spectral.layers {
        for (i, (t, b)) in layer
            .singular_values
            .iter()
            .zip(&layer.baseline_singular_values)
            .enumerate()
        {
            sv.row(&[
                layer.layer_index.to_string(),
                i.to_string(),
                fmt_f64(*t),
                fmt_f64(*b),
            ]);
        }
    }
    sv.save(&out_dir.join("singular_values.csv"))?;
    manifest.push_output("singular_values.csv");

    // band_energy.csv
    let mut band = Csv::new("layer,halfwidth,plain,wrapped,baseline_plain,baseline_wrapped");
    for layer in &summary.spectral.layers {
        for (t, b) in layer.band_energy.iter().zip(&layer.baseline_band_energy) {
            band.row(&[
                layer.layer_index.to_string(),
                t.halfwidth.to_string(),
                fmt_f64(t.plain),
                fmt_f64(t.wrapped),
                fmt_f64(b.plain),
                fmt_f64(b.wrapped),
            ]);
        }
    }
    band.save(&out_dir.join("band_energy.csv"))?;
    manifest.push_output("band_energy.csv");

    if svg {
        write_svgs(&out_dir, &output)?;
        for name in ["densities.svg", "eigenvalues.svg", "singular_values.svg"] {
            manifest.push_output(name);
        }
    }
    manifest.save(&out_dir)?;

    // Human summary to stdout.
    println!(
        "analyzed seed {}: {} square hidden layers",
        summary.seed, summary.n_square_layers
    );
    for (fit, layer) in summary.weight_fits.iter().zip(&summary.spectral.layers) {
        let beta = fit
            .fit
            .beta
            .map(|b| format!("{b:.3}"))
            .unwrap_or_else(|| String::from("null"));
        println!(
            "  {}: sigma_max {:.4}  kurtosis {:.3}  beta {}  radius_q99 {:.4}",
            fit.name, layer.sigma_max, fit.fit.kurtosis, beta, layer.radius_q99
        );
    }
    if let Some(spread) = summary.spectral.radius_rel_spread {
        println!(
            "  radius spread {:.4} around mean {:.4}; detector fired: {}",
            spread, summary.spectral.mean_radius, summary.spectral.detector_fired
        );
    }
    for flag in &summary.flags {
        println!("  flag: {flag}");
    }
    println!("report written to {}", out_dir.join("report.json").display());
    Ok(())
}

fn write_svgs(out_dir: &Path, output: &AnalysisOutput) -> Result<()> {
    let summary = &output.summary;
    let density_series: Vec<Series> = output
        .weight_densities
        .iter()
        .map(|c| Series {
            name: c.name.clone(),
            points: c.points.clone(),
        })
        .collect();
    line_plot(
        &out_dir.join("densities.svg"),
        "weight densities (KDE)",
        "value",
        "density",
        &density_series,
    )?;

    let eigen_series: Vec<Series> = summary
        .spectral
        .layers
        .iter()
        .map(|l| Series {
            name: format!("w{}", l.layer_index),
            points: l.eigenvalues.clone(),
        })
        .collect();
    eigen_scatter(
        &out_dir.join("eigenvalues.svg"),
        "normalized eigenvalues vs unit circle",
        &eigen_series,
        1.1,
    )?;

    let mut sv_series = Vec::new();
    for l in &summary.spectral.layers {
        sv_series.push(Series {
            name: format!("w{}", l.layer_index),
            points: l
                .singular_values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as f64, v))
                .collect(),
        });
        sv_series.push(Series {
            name: format!("w{} baseline", l.layer_index),
            points: l
                .baseline_singular_values
                .iter()
                .enumerate()
                .map(|(i, &v)| (i as f64, v))
                .collect(),
        });
    }
    line_plot(
        &out_dir.join("singular_values.svg"),
        "singular values (descending)",
        "index",
        "sigma",
        &sv_series,
    )
}
