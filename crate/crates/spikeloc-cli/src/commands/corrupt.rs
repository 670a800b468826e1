use std::path::PathBuf;

use clap::Args as ClapArgs;
use spikeloc::corrupt::Severity;
use spikeloc::data::{read_pgm, write_pgm};
use spikeloc::error::{Error, Result};
use spikeloc::eval::CorruptionKind;
use spikeloc::rng::Rng;
use spikeloc::tensor::SpikeTensor;

use super::ensure_writable;

#[derive(ClapArgs)]
pub struct Args {
    /// Input image (.pgm, static corruptions) or spike tensor (.spkt,
    /// event corruptions).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    corruption: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    severity: u8,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    force: bool,
}

pub fn run(args: Args) -> Result<()> {
    let severity = Severity::new(args.severity)?;
    let kind = CorruptionKind::parse(&args.corruption)?;
    println!(
        "config: corruption={} severity={} seed={}",
        kind.name(),
        severity.level(),
        args.seed
    );
    ensure_writable(&args.out, args.force)?;
    let mut rng = Rng::new(args.seed);
    match kind {
        CorruptionKind::Static(c) => {
            let img = read_pgm(&args.input)?;
            let out = c.apply(&img, severity, &mut rng);
            write_pgm(&args.out, &out)?;
            let mean = out.data().iter().sum::<f64>() / out.data().len() as f64;
            println!("wrote {} mean_intensity={mean:.4}", args.out.display());
        }
        CorruptionKind::Event(c) => {
            if args.input.extension().is_some_and(|e| e == "pgm") {
                return Err(Error::Config(format!(
                    "corruption '{}' applies to spike tensors (.spkt), not images",
                    c.name()
                )));
            }
            let tensor = SpikeTensor::read_file(&args.input)?;
            let out = c.apply(&tensor, severity, &mut rng);
            out.write_file(&args.out)?;
            println!(
                "wrote {} spikes {} -> {} (rate {:.4})",
                args.out.display(),
                tensor.count_ones(),
                out.count_ones(),
                out.mean_rate()
            );
        }
    }
    Ok(())
}
