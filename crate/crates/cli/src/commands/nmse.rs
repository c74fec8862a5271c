use anyhow::{bail, Context, Result};
use hmimo::experiments::{run_nmse_sweep, to_db, ExperimentConfig};
use hmimo::{ArrayGeometry, EstimatorKind};

use crate::args::{NmseArgs, SpacingPreset};
use crate::output::{num, sibling, Csv, Manifest};
use crate::plot::{line_chart, Series};

/// Parses `ls,mmse,...`, dropping repeats (with a warning on stderr).
pub fn parse_estimators(list: &str) -> Result<Vec<EstimatorKind>> {
    let mut out = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind: EstimatorKind = name.parse()?;
        if out.contains(&kind) {
            eprintln!("warning: estimator `{kind}` listed more than once; using it once");
        } else {
            out.push(kind);
        }
    }
    if out.is_empty() {
        bail!("no estimators given");
    }
    Ok(out)
}

/// `LO:STEP:HI` (inclusive) or a single value, in dB.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let parse = |s: &str| s.parse::<f64>().with_context(|| format!("malformed SNR range `{spec}`"));
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [lo, step, hi] => {
            let (lo, step, hi) = (parse(lo)?, parse(step)?, parse(hi)?);
            if !(lo.is_finite() && hi.is_finite() && step > 0.0 && step.is_finite() && hi >= lo) {
                bail!("malformed SNR range `{spec}` (need LO <= HI and STEP > 0)");
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                bail!("SNR range `{spec}` has too many points");
            }
            // round away accumulated binary noise so grid points print cleanly
            Ok((0..count).map(|k| ((lo + k as f64 * step) * 1e9).round() / 1e9).collect())
        }
        _ => bail!("malformed SNR range `{spec}` (expected LO:STEP:HI)"),
    }
}

fn resolve_geometry(args: &NmseArgs) -> Result<ArrayGeometry> {
    let g = &args.geometry;
    let spacing = match args.spacing {
        SpacingPreset::Quarter => 0.25,
        SpacingPreset::Sixteenth => 0.0625,
        SpacingPreset::Custom => return Ok(*g),
    };
    Ok(ArrayGeometry::new(g.n_x(), g.n_y(), spacing, spacing)?)
}

pub fn run(args: &NmseArgs) -> Result<()> {
    let mut manifest = Manifest::start("nmse");
    let config = ExperimentConfig {
        geometry: resolve_geometry(args)?,
        field: args.field,
        estimators: parse_estimators(&args.estimators)?,
        snr_grid_db: parse_snr_grid(&args.snr)?,
        trials: args.trials as usize,
        master_seed: args.seed,
        retention: args.retention,
        truncate_fraction: args.truncate_fraction,
        renormalize: !args.no_renormalize,
        beta: args.beta,
    };
    let records = run_nmse_sweep(&config)?;

    let mut csv = Csv::new(&["estimator", "snr_db", "nmse_db", "nmse_linear", "analytic_db", "stderr", "trials"]);
    for r in &records {
        csv.row(&[
            r.estimator.to_string(),
            num(r.snr_db),
            num(to_db(r.empirical_nmse)),
            num(r.empirical_nmse),
            r.analytic_nmse.map(|a| num(to_db(a))).unwrap_or_default(),
            num(r.stderr),
            r.trials.to_string(),
        ]);
    }
    csv.write(&args.out)?;
    manifest.output(&args.out);

    if args.plot {
        let series: Vec<Series> = config
            .estimators
            .iter()
            .map(|&k| Series {
                label: k.to_string(),
                points: records
                    .iter()
                    .filter(|r| r.estimator == k)
                    .map(|r| (r.snr_db, to_db(r.empirical_nmse)))
                    .collect(),
            })
            .collect();
        let svg = sibling(&args.out, ".svg");
        line_chart(&svg, &format!("NMSE, {}", config.geometry), "SNR [dB]", "NMSE [dB]", &series)?;
        manifest.output(&svg);
    }

    let estimators: Vec<String> = config.estimators.iter().map(ToString::to_string).collect();
    let grid: Vec<String> = config.snr_grid_db.iter().map(|s| s.to_string()).collect();
    manifest.set("geometry", config.geometry);
    manifest.set("field", config.field);
    manifest.set("estimators", estimators.join(","));
    manifest.set("snr_grid_db", grid.join(","));
    manifest.set("trials", config.trials);
    manifest.set("retention", config.retention);
    manifest.set("truncate_fraction", config.truncate_fraction);
    manifest.set("renormalize", config.renormalize);
    manifest.set("beta", config.beta);
    manifest.set("master_seed", config.master_seed);
    manifest.finish(&args.out)?;
    println!("{} records written to {}", records.len(), args.out.display());
    Ok(())
}
