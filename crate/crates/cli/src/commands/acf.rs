use anyhow::Result;
use hmimo::experiments::{max_abs_error, run_acf, AcfConfig};

use crate::args::AcfArgs;
use crate::output::{num, sibling, Csv, Manifest};
use crate::plot::{line_chart, Series};

pub fn run(args: &AcfArgs) -> Result<()> {
    let mut manifest = Manifest::start("acf");
    let config = AcfConfig {
        geometry: args.geometry,
        field: args.field,
        generator: args.model,
        realizations: args.realizations as usize,
        seed: args.seed,
        max_lag: args.max_lag,
    };
    let records = run_acf(&config)?;

    let mut csv = Csv::new(&["lag_x", "lag_y", "empirical", "closed_form", "abs_error"]);
    for r in &records {
        csv.row(&[num(r.lag_x), num(r.lag_y), num(r.empirical), num(r.closed_form), num(r.abs_error())]);
    }
    csv.write(&args.out)?;
    manifest.output(&args.out);

    if args.plot {
        let cut: Vec<_> = records.iter().filter(|r| r.lag_y == 0.0).collect();
        let series = [
            Series {
                label: "empirical".into(),
                points: cut.iter().map(|r| (r.lag_x, r.empirical)).collect(),
            },
            Series {
                label: "closed form".into(),
                points: cut.iter().map(|r| (r.lag_x, r.closed_form)).collect(),
            },
        ];
        let svg = sibling(&args.out, ".svg");
        line_chart(&svg, &format!("ACF, {} ({})", args.geometry, args.field), "x / wavelength", "correlation", &series)?;
        manifest.output(&svg);
    }

    let worst = max_abs_error(&records);
    manifest.set("geometry", args.geometry);
    manifest.set("model", args.model);
    manifest.set("field", args.field);
    manifest.set("realizations", args.realizations);
    manifest.set("max_lag", args.max_lag);
    manifest.set("master_seed", args.seed);
    manifest.set("lags", records.len());
    manifest.set("max_abs_error", num(worst));
    manifest.finish(&args.out)?;
    println!("{} lags, max |empirical - closed form| = {worst:.4}", records.len());
    Ok(())
}
