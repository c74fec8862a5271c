use anyhow::{bail, Result};
use hmimo::channel::generate_correlated;
use hmimo::correlation::clarke_correlation_matrix;
use hmimo::experiments::AcfGenerator;
use hmimo::{ArrayGeometry, PlaneWaveModel, Retention};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::args::{DumpFormat, GenArgs};
use crate::output::{num, write_bytes, Manifest};

/// First line of every dump.
pub fn header(args: &GenArgs, rx: &ArrayGeometry, tx: &ArrayGeometry) -> String {
    format!(
        "# hmimo-realizations v1 rx={rx} tx={tx} model={} field={} seed={} count={} rows={} cols={}",
        args.model,
        args.field,
        args.seed,
        args.count,
        rx.len(),
        tx.len()
    )
}

pub fn run(args: &GenArgs) -> Result<()> {
    let mut manifest = Manifest::start("gen");
    let rx = args.rx.with_offset_z(args.link_distance)?;
    let tx = args.tx.unwrap_or_else(ArrayGeometry::single);
    let draw: Box<dyn Fn(u64) -> DMatrix<Complex64>> = match args.model {
        AcfGenerator::PlaneWave => {
            let model = PlaneWaveModel::build(&tx, &rx, args.field)?;
            let seed = args.seed;
            Box::new(move |k| model.realization(seed, k))
        }
        AcfGenerator::Toeplitz => {
            if tx.len() != 1 {
                bail!("the toeplitz generator produces SIMO channels only; drop --tx");
            }
            let r = clarke_correlation_matrix(&rx, args.field, 1.0)?;
            let s = r.eigen()?.subspace(Retention::PowerFraction(1.0))?;
            let seed = args.seed;
            Box::new(move |k| generate_correlated(&s, seed, k).matrix)
        }
    };

    let head = header(args, &rx, &tx);
    let mut energy = 0.0;
    let bytes = match args.format {
        DumpFormat::Csv => {
            let mut text = format!("{head}\nrealization,row,col,re,im\n");
            for k in 0..args.count {
                let h = draw(k);
                energy += h.norm_squared();
                for r in 0..h.nrows() {
                    for c in 0..h.ncols() {
                        let z = h[(r, c)];
                        text.push_str(&format!("{k},{r},{c},{},{}\n", num(z.re), num(z.im)));
                    }
                }
            }
            text.into_bytes()
        }
        DumpFormat::Bin => {
            let mut out = format!("{head}\n").into_bytes();
            for k in 0..args.count {
                let h = draw(k);
                energy += h.norm_squared();
                for r in 0..h.nrows() {
                    for c in 0..h.ncols() {
                        let z = h[(r, c)];
                        out.extend_from_slice(&z.re.to_le_bytes());
                        out.extend_from_slice(&z.im.to_le_bytes());
                    }
                }
            }
            out
        }
    };
    write_bytes(&args.out, &bytes)?;
    manifest.output(&args.out);

    let mean = energy / args.count as f64;
    manifest.set("rx", rx);
    manifest.set("tx", tx);
    manifest.set("model", args.model);
    manifest.set("field", args.field);
    manifest.set("count", args.count);
    manifest.set("format", format!("{:?}", args.format).to_lowercase());
    manifest.set("master_seed", args.seed);
    manifest.set("mean_frobenius_energy", num(mean));
    manifest.finish(&args.out)?;
    println!(
        "{} realizations of {}x{}, mean |H|_F^2 = {mean:.4} (expected {})",
        args.count,
        rx.len(),
        tx.len(),
        rx.len() * tx.len()
    );
    Ok(())
}
