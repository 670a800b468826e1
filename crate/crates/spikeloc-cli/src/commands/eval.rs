use std::path::PathBuf;

use clap::Args as ClapArgs;
use spikeloc::corrupt::Severity;
use spikeloc::data::Split;
use spikeloc::error::{Error, Result};
use spikeloc::eval::{corruption_sweep, eval_clean, eval_corrupted, CorruptionKind};
use spikeloc::metrics::rad;

use super::{load_config, load_model, load_split};

#[derive(ClapArgs)]
pub struct Args {
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Run the full corruption x severity sweep.
    #[arg(long)]
    sweep: bool,
    /// Evaluate one corruption (requires --severity).
    #[arg(long)]
    corruption: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    severity: Option<u8>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    timesteps: Option<usize>,
}

pub fn run(args: Args) -> Result<()> {
    let mut cfg = load_config(
        args.config.as_deref(),
        args.seed,
        args.scheme.as_deref(),
        args.timesteps,
    )?;
    let (ckpt, model) = load_model(&args.checkpoint)?;
    // The checkpoint fixes T; config may still select the scheme.
    cfg.timesteps = ckpt.spec.t;
    println!("{}", cfg.audit_line());
    let scheme = cfg.scheme_with_params();
    let (_, val_set) = load_split(&args.manifest, Some(Split::Val))?;
    println!(
        "evaluating {} val samples (checkpoint epoch {})",
        val_set.len(),
        ckpt.epoch
    );

    let clean = eval_clean(&model, &val_set, &scheme, ckpt.spec.t, cfg.encode_seed())?;
    println!("clean mIoU {clean:.2}%");

    if args.sweep {
        let report = corruption_sweep(&model, &val_set, &scheme, ckpt.spec.t, cfg.encode_seed())?;
        for cell in &report.cells {
            println!(
                "{:<20} severity {}  mIoU {:>6.2}%  RAD {:>6.2}",
                cell.corruption, cell.severity, cell.miou, cell.rad
            );
        }
        for (name, mrad) in report.mrads()? {
            println!("{name:<20} mRAD {mrad:.2}");
        }
        if let Some(out) = &args.out {
            std::fs::create_dir_all(out)?;
            std::fs::write(out.join("eval.csv"), report.to_csv())?;
            std::fs::write(out.join("summary.json"), report.to_summary())?;
            println!("wrote {}/eval.csv and summary.json", out.display());
        }
    } else if let Some(name) = &args.corruption {
        let severity = Severity::new(
            args.severity
                .ok_or_else(|| Error::Config("--corruption requires --severity".into()))?,
        )?;
        let kind = CorruptionKind::parse(name)?;
        let miou = eval_corrupted(
            &model,
            &val_set,
            &scheme,
            ckpt.spec.t,
            cfg.encode_seed(),
            kind,
            severity,
        )?;
        println!(
            "{} severity {}  mIoU {miou:.2}%  RAD {:.2}",
            kind.name(),
            severity.level(),
            rad(clean, miou)?
        );
    } else if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        std::fs::write(
            out.join("eval.csv"),
            format!("corruption,severity,miou,rad\nclean,0,{clean:?},0.0\n"),
        )?;
        println!("wrote {}/eval.csv", out.display());
    }
    Ok(())
}
