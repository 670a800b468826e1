use std::path::PathBuf;

use clap::{Args as ClapArgs, Subcommand};
use spikeloc::data::{fnv1a, generate, load_dataset, save_dataset, Split};
use spikeloc::error::Result;

use super::{ensure_writable, load_config};

#[derive(ClapArgs)]
pub struct Args {
    #[command(subcommand)]
    action: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Generate a dataset into a directory.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overwrite an existing dataset directory.
        #[arg(long)]
        force: bool,
    },
    /// Print counts and label statistics for an existing manifest.
    Inspect {
        #[arg(long)]
        manifest: PathBuf,
    },
}

pub fn run(args: Args) -> Result<()> {
    match args.action {
        Action::Gen {
            out,
            config,
            seed,
            force,
        } => {
            let cfg = load_config(config.as_deref(), seed, None, None)?;
            println!("{}", cfg.audit_line());
            ensure_writable(&out.join("manifest.txt"), force)?;
            let mut params = cfg.dataset.clone();
            params.seed = cfg.data_seed();
            let samples = generate(&params)?;
            let manifest = save_dataset(&out, &params, &samples)?;
            let hash = fnv1a(&std::fs::read(&manifest)?);
            let train = samples.iter().filter(|s| s.split == Split::Train).count();
            let val = samples.len() - train;
            println!(
                "wrote {} samples ({train} train / {val} val) to {}",
                samples.len(),
                out.display()
            );
            println!("manifest {} hash {hash:016x}", manifest.display());
            Ok(())
        }
        Action::Inspect { manifest } => {
            let (params, samples) = load_dataset(&manifest, None)?;
            println!(
                "config: image_size={} modality={} seed={}",
                params.image_size,
                params.modality.name(),
                params.seed
            );
            if samples.is_empty() {
                println!("0 samples");
                return Ok(());
            }
            let train = samples.iter().filter(|s| s.split == Split::Train).count();
            let areas: Vec<f64> = samples.iter().map(|s| s.bbox.area()).collect();
            let mean_area = areas.iter().sum::<f64>() / areas.len() as f64;
            let min_area = areas.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_area = areas.iter().cloned().fold(0.0f64, f64::max);
            println!(
                "{} samples ({} train / {} val)",
                samples.len(),
                train,
                samples.len() - train
            );
            println!("label area: mean {mean_area:.4} min {min_area:.4} max {max_area:.4}");
            println!("manifest hash {:016x}", fnv1a(&std::fs::read(&manifest)?));
            Ok(())
        }
    }
}
