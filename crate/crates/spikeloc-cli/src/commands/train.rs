use std::path::PathBuf;

use clap::Args as ClapArgs;
use spikeloc::codec::CodingScheme;
use spikeloc::data::Split;
use spikeloc::error::Result;
use spikeloc::net::{train, NetworkSpec};

use super::{ensure_writable, load_config, load_split};

#[derive(ClapArgs)]
pub struct Args {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    timesteps: Option<usize>,
    #[arg(long)]
    force: bool,
}

pub fn run(args: Args) -> Result<()> {
    let cfg = load_config(
        args.config.as_deref(),
        args.seed,
        args.scheme.as_deref(),
        args.timesteps,
    )?;
    println!("{}", cfg.audit_line());
    std::fs::create_dir_all(&args.out)?;
    let ckpt_path = args.out.join("best.ckpt");
    let log_path = args.out.join("log.csv");
    ensure_writable(&ckpt_path, args.force)?;

    let (params, train_set) = load_split(&args.manifest, Some(Split::Train))?;
    let (_, val_set) = load_split(&args.manifest, Some(Split::Val))?;
    println!("dataset: {} train / {} val", train_set.len(), val_set.len());

    let scheme = cfg.scheme_with_params();
    let input_dims = input_dims_for(&scheme, params.image_size);
    let preset = match (&scheme, cfg.network_preset.as_str()) {
        (CodingScheme::Trainable, "snn-tiny") => "snn-tiny-trainable",
        (_, other) => other,
    };
    let spec = NetworkSpec::preset(preset, input_dims, cfg.timesteps)?;

    let train_cfg = cfg.train_config();
    let out = train(spec, &train_set, &val_set, &train_cfg)?;

    let mut log = String::from("epoch,train_loss,val_miou\n");
    for entry in &out.logs {
        println!(
            "epoch {:>3}  loss {:.4}  val mIoU {:.2}%",
            entry.epoch, entry.train_loss, entry.val_miou
        );
        log.push_str(&format!(
            "{},{:?},{:?}\n",
            entry.epoch, entry.train_loss, entry.val_miou
        ));
    }
    std::fs::write(&log_path, log)?;
    out.best.write_file(&ckpt_path)?;
    println!(
        "best: epoch {} val mIoU {:.2}% -> {}",
        out.best_epoch,
        out.best_val_miou,
        ckpt_path.display()
    );
    Ok(())
}

/// Input tensor dims per scheme: event slicing yields 2 polarity channels,
/// static schemes keep the grayscale channel.
pub fn input_dims_for(scheme: &CodingScheme, image_size: usize) -> (usize, usize, usize) {
    match scheme {
        CodingScheme::EventSlice => (2, image_size, image_size),
        _ => (1, image_size, image_size),
    }
}
