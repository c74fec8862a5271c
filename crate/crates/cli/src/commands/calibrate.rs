use anyhow::Result;
use hmimo::experiments::{calibrate, default_policies, ExperimentConfig};
use hmimo::{ArrayGeometry, Retention};

use crate::args::CalibrateArgs;
use crate::output::{num, Csv, Manifest};

/// Acceptance band around each reference gap, in dB.
const BAND_DB: f64 = 2.0;

pub fn run(args: &CalibrateArgs) -> Result<()> {
    let mut manifest = Manifest::start("calibrate");
    let side = args.side as usize;
    let mut config = ExperimentConfig::upa_sweep(0.25)?;
    config.geometry = ArrayGeometry::upa(side, side, 0.25)?;
    config.truncate_fraction = args.truncate_fraction;
    let policies: Vec<Retention> = match &args.policies {
        Some(list) => list.split(',').map(|s| s.trim().parse()).collect::<hmimo::Result<_>>()?,
        None => default_policies(),
    };
    let report = calibrate(&config, &policies, args.snr)?;

    let mut csv = Csv::new(&[
        "retention",
        "spacing",
        "rank_iso",
        "keep",
        "ls_db",
        "mmse_db",
        "rsls_db",
        "rsls_iso_db",
        "ls_mmse_gap_db",
        "ls_iso_gap_db",
        "deviation_db",
    ]);
    for i in 0..policies.len() {
        for row in [&report.quarter[i], &report.sixteenth[i]] {
            csv.row(&[
                row.retention.to_string(),
                num(row.spacing),
                row.rank_iso.to_string(),
                row.keep.to_string(),
                num(row.nmse_db[0]),
                num(row.nmse_db[1]),
                num(row.nmse_db[2]),
                num(row.nmse_db[3]),
                num(row.ls_mmse_gap()),
                num(row.ls_iso_gap()),
                num(report.deviation(i)),
            ]);
        }
    }
    csv.write(&args.out)?;
    manifest.output(&args.out);

    let t = report.targets;
    println!(
        "targets at {} dB: LS-MMSE {} dB (λ/4), LS-RSLS-iso {} dB (λ/4), {} dB (λ/16)",
        args.snr, t.ls_mmse_quarter, t.ls_iso_quarter, t.ls_iso_sixteenth
    );
    for i in 0..policies.len() {
        let (q, s) = (&report.quarter[i], &report.sixteenth[i]);
        println!(
            "{:<12} rank_iso {:>4}/{:>4}  gaps {:6.2} {:6.2} {:6.2}  max deviation {:5.2} dB",
            q.retention.to_string(),
            q.rank_iso,
            s.rank_iso,
            q.ls_mmse_gap(),
            q.ls_iso_gap(),
            s.ls_iso_gap(),
            report.deviation(i)
        );
    }
    let best = report.best();
    let dev = report.deviation(best);
    let verdict = if dev <= BAND_DB { "within" } else { "outside" };
    println!("best retention {} ({verdict} ±{BAND_DB} dB, max deviation {dev:.2} dB)", policies[best]);

    manifest.set("side", side);
    manifest.set("snr_db", args.snr);
    manifest.set("truncate_fraction", args.truncate_fraction);
    let names: Vec<String> = policies.iter().map(ToString::to_string).collect();
    manifest.set("policies", names.join(","));
    manifest.set("best_retention", policies[best]);
    manifest.set("best_deviation_db", num(dev));
    manifest.finish(&args.out)?;
    Ok(())
}
