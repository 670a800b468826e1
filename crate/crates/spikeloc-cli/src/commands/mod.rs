pub mod corrupt;
pub mod dataset;
pub mod encode;
pub mod energy;
pub mod eval;
pub mod train;

use crate::config::RunConfig;
use spikeloc::data::{load_dataset, Sample, Split};
use spikeloc::error::{Error, Result};
use spikeloc::net::{Checkpoint, Model, TrainSample};
use std::path::Path;

/// Loads the config file when given, defaults otherwise, then applies the
/// shared command-line overrides.
pub fn load_config(
    path: Option<&Path>,
    seed: Option<u64>,
    scheme: Option<&str>,
    timesteps: Option<usize>,
) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(name) = scheme {
        cfg.scheme = spikeloc::codec::CodingScheme::parse(name)?;
    }
    if let Some(t) = timesteps {
        cfg.timesteps = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_split(
    manifest: &Path,
    split: Option<Split>,
) -> Result<(spikeloc::data::GenParams, Vec<TrainSample>)> {
    let (params, samples) = load_dataset(manifest, split)?;
    let train: Vec<TrainSample> = samples.iter().map(Sample::to_train_sample).collect();
    Ok((params, train))
}

pub fn load_model(checkpoint: &Path) -> Result<(Checkpoint, Model)> {
    let ckpt = Checkpoint::read_file(checkpoint)?;
    let model = Model::from_checkpoint(&ckpt)?;
    Ok((ckpt, model))
}

pub fn ensure_writable(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::Data(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}
