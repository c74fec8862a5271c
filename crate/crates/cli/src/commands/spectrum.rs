use anyhow::Result;
use hmimo::correlation::{asymptotic_rank, clarke_correlation_matrix};
use hmimo::Retention;

use crate::args::SpectrumArgs;
use crate::output::{num, Csv, Manifest};

/// Policies always summarised.
fn standard_policies() -> Vec<Retention> {
    vec![
        Retention::RelativeThreshold(1e-3),
        Retention::RelativeThreshold(1e-5),
        Retention::RelativeThreshold(1e-8),
        Retention::RelativeThreshold(1e-10),
        Retention::RelativeThreshold(1e-13),
        Retention::PowerFraction(0.99),
        Retention::PowerFraction(0.999999),
        Retention::PowerFraction(1.0),
    ]
}

pub fn run(args: &SpectrumArgs) -> Result<()> {
    let mut manifest = Manifest::start("spectrum");
    let g = &args.geometry;
    let r = clarke_correlation_matrix(g, args.field, args.beta)?;
    let eig = r.eigen()?;
    let values = eig.values();
    let lmax = values[0];
    let n = g.len();
    let sum: f64 = values.iter().sum();
    let asym = asymptotic_rank(g);

    let mut summary = vec![
        format!("geometry={g} field={} beta={} n={n}", args.field, args.beta),
        format!("eigenvalue_sum={} target={}", num(sum), num(n as f64 * args.beta)),
        format!("asymptotic_rank={}", num(asym)),
        format!("asymptotic_ratio={}", num(asym / n as f64)),
        format!("min_relative_eigenvalue={}", num(eig.min_relative_eigenvalue())),
    ];
    let mut policies = standard_policies();
    if let Some(p) = args.retention {
        if !policies.contains(&p) {
            policies.push(p);
        }
    }
    for p in &policies {
        let rank = eig.effective_rank(*p)?;
        summary.push(format!("effective_rank[{p}]={rank} ratio={}", num(rank as f64 / n as f64)));
        manifest.set(&format!("effective_rank[{p}]"), rank);
    }

    let mut csv = Csv::new(&["index", "eigenvalue", "normalized"]);
    for line in &summary {
        csv.comment(line);
    }
    for (i, &l) in values.iter().enumerate() {
        csv.row(&[i.to_string(), num(l), num(if lmax > 0.0 { l / lmax } else { 0.0 })]);
    }
    csv.write(&args.out)?;
    manifest.output(&args.out);

    manifest.set("geometry", g);
    manifest.set("field", args.field);
    manifest.set("beta", args.beta);
    manifest.set("asymptotic_rank", num(asym));
    manifest.finish(&args.out)?;
    for line in &summary {
        println!("{line}");
    }
    Ok(())
}
