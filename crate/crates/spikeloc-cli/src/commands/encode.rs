use std::path::PathBuf;

use clap::Args as ClapArgs;
use spikeloc::codec::{self, CodingScheme, DeltaChannels, TrainableEncoder};
use spikeloc::data::read_pgm;
use spikeloc::error::{Error, Result};
use spikeloc::events::EventStream;
use spikeloc::rng::Rng;
use spikeloc::tensor::SpikeTensor;

use super::{ensure_writable, load_config};

#[derive(ClapArgs)]
pub struct Args {
    /// Input image (.pgm) or event stream (.evts).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    timesteps: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint supplying the trained first layer for trainable coding.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
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
    ensure_writable(&args.out, args.force)?;
    let scheme = cfg.scheme_with_params();
    let t = cfg.timesteps;

    let is_events = args.input.extension().is_some_and(|e| e == "evts");
    let tensor: SpikeTensor = match (&scheme, is_events) {
        (CodingScheme::EventSlice, true) => {
            let stream = EventStream::read_file(&args.input)?;
            let tensor = codec::slice_events(&stream, t)?;
            println!("events={} windows={}", stream.len(), t);
            tensor
        }
        (CodingScheme::EventSlice, false) => {
            return Err(Error::Config(
                "event-slice coding expects an .evts input".into(),
            ));
        }
        (_, true) => {
            return Err(Error::Config(format!(
                "scheme '{}' expects a static .pgm image",
                scheme.name()
            )));
        }
        (scheme, false) => {
            let img = read_pgm(&args.input)?;
            match scheme {
                CodingScheme::Rate => {
                    let mut rng = Rng::new(cfg.encode_seed());
                    codec::encode_rate(&img, t, &mut rng)
                }
                CodingScheme::Ttfs { tau } => codec::encode_ttfs(&img, t, *tau),
                CodingScheme::Phase => {
                    let (tensor, weights) = codec::encode_phase(&img, t);
                    println!(
                        "phase weights: {}",
                        weights
                            .weights
                            .iter()
                            .take(8)
                            .map(|w| format!("{w}"))
                            .collect::<Vec<_>>()
                            .join(",")
                    );
                    tensor
                }
                CodingScheme::Saccades { dx, dy, threshold } => {
                    codec::encode_saccades(&img, t, *dx, *dy, *threshold, DeltaChannels::OnOnly)?
                }
                CodingScheme::Trainable => {
                    let enc = match &args.checkpoint {
                        Some(path) => {
                            let (_, model) = super::load_model(path)?;
                            model.as_trainable_encoder()?
                        }
                        None => TrainableEncoder::seeded(
                            img.channels(),
                            img.height(),
                            img.width(),
                            &mut Rng::new(cfg.init_seed()),
                        ),
                    };
                    codec::encode_trainable(&img, t, &enc)?
                }
                CodingScheme::EventSlice => unreachable!("handled above"),
            }
        }
    };

    tensor.write_file(&args.out)?;
    let (td, c, h, w) = tensor.dims();
    println!(
        "wrote {} dims={td}x{c}x{h}x{w} spikes={} rate={:.4}",
        args.out.display(),
        tensor.count_ones(),
        tensor.mean_rate()
    );
    Ok(())
}
