//! End-to-end training: per-epoch encoding, shuffled mini-batches, BPTT
//! gradients averaged in batch order, Adam updates, and best-checkpoint
//! tracking by validation mIoU.
//!
//! Every random stream derives from a named seed, so a rerun with the same
//! configuration reproduces the checkpoint bit-exactly regardless of the
//! worker thread count.

use super::engine::{ExecMode, Gradients, ModelInput};
use super::loss::{decode_box, diou_loss_and_grad};
use super::{AdamState, Checkpoint, Model, NetworkSpec};
use crate::bbox::BBox;
use crate::codec::{self, CodingScheme, DeltaChannels};
use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::metrics::mean_iou;
use crate::parallel;
use crate::rng::Rng;
use crate::tensor::{DenseImage, SpikeTensor};

/// Stream tag for validation/evaluation encodes (kept apart from the
/// per-epoch training streams).
pub(crate) const EVAL_STREAM: u64 = 0x4556_414c; // "EVAL"

/// Raw sample content fed to the encoder.
#[derive(Debug, Clone)]
pub enum SampleInput {
    Image(DenseImage),
    Events(EventStream),
}

/// One labeled training/evaluation sample.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub id: u64,
    pub input: SampleInput,
    pub target: BBox,
}

/// Network-ready encoding of a sample.
#[derive(Debug, Clone)]
pub enum Encoded {
    Spikes {
        tensor: SpikeTensor,
        scale: Option<Vec<f64>>,
    },
    Image(DenseImage),
}

/// Applies a coding scheme to a sample. `rng` drives stochastic schemes
/// (rate coding); deterministic schemes ignore it.
pub fn encode_input(
    scheme: &CodingScheme,
    input: &SampleInput,
    t: usize,
    rng: &mut Rng,
) -> Result<Encoded> {
    match (scheme, input) {
        (CodingScheme::Rate, SampleInput::Image(img)) => Ok(Encoded::Spikes {
            tensor: codec::encode_rate(img, t, rng),
            scale: None,
        }),
        (CodingScheme::Ttfs { tau }, SampleInput::Image(img)) => Ok(Encoded::Spikes {
            tensor: codec::encode_ttfs(img, t, *tau),
            scale: None,
        }),
        (CodingScheme::Phase, SampleInput::Image(img)) => {
            let (tensor, weights) = codec::encode_phase(img, t);
            Ok(Encoded::Spikes {
                tensor,
                scale: Some(weights.weights),
            })
        }
        (CodingScheme::Saccades { dx, dy, threshold }, SampleInput::Image(img)) => {
            Ok(Encoded::Spikes {
                tensor: codec::encode_saccades(
                    img,
                    t,
                    *dx,
                    *dy,
                    *threshold,
                    DeltaChannels::OnOnly,
                )?,
                scale: None,
            })
        }
        (CodingScheme::Trainable, SampleInput::Image(img)) => Ok(Encoded::Image(img.clone())),
        (CodingScheme::EventSlice, SampleInput::Events(events)) => Ok(Encoded::Spikes {
            tensor: codec::slice_events(events, t)?,
            scale: None,
        }),
        (scheme, SampleInput::Events(_)) => Err(Error::Config(format!(
            "scheme '{}' requires static images, but the sample holds events",
            scheme.name()
        ))),
        (CodingScheme::EventSlice, SampleInput::Image(_)) => Err(Error::Config(
            "event-slice coding requires event samples".into(),
        )),
    }
}

impl Model {
    /// Forward an encoded sample (spiking mode, no tape).
    pub fn forward_encoded(&self, encoded: &Encoded) -> Result<[f64; 4]> {
        match encoded {
            Encoded::Spikes { tensor, scale } => Ok(self
                .forward(ModelInput::Spikes(tensor), scale.as_deref())?
                .raw),
            Encoded::Image(img) => Ok(self.forward(ModelInput::Image(img), None)?.raw),
        }
    }

    /// Predicted box for an encoded sample.
    pub fn predict(&self, encoded: &Encoded) -> Result<BBox> {
        Ok(decode_box(&self.forward_encoded(encoded)?))
    }
}

/// Training hyperparameters and seeds.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: u32,
    pub batch_size: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub scheme: CodingScheme,
    pub t: usize,
    pub init_seed: u64,
    pub encode_seed: u64,
    /// Redraw stochastic encodings every epoch (augmentation).
    pub fresh_encode: bool,
    /// Cosine-anneal the learning rate from `lr` to ~0 over the run.
    pub cosine_lr: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            batch_size: 32,
            lr: 5e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            scheme: CodingScheme::Rate,
            t: 4,
            init_seed: 1,
            encode_seed: 2,
            fresh_encode: true,
            cosine_lr: true,
        }
    }
}

/// One line of the per-epoch metrics log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: u32,
    pub train_loss: f64,
    pub val_miou: f64,
}

/// Training result: the checkpoint with the best validation mIoU.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub best: Checkpoint,
    pub best_epoch: u32,
    pub best_val_miou: f64,
    pub logs: Vec<EpochLog>,
}

/// Encoding stream for training sample `id`. With `fresh_encode`,
/// stochastic schemes redraw every epoch (spike-level augmentation);
/// otherwise the draw is fixed across epochs.
const TRAIN_STREAM: u64 = 0x5452_4149; // "TRAI"

fn train_stream(encode_seed: u64, epoch: u32, id: u64, fresh: bool) -> Rng {
    let epoch_key = if fresh { epoch as u64 } else { 0 };
    Rng::new(encode_seed)
        .derive(TRAIN_STREAM)
        .derive(epoch_key)
        .derive(id)
}

/// Encoding stream for evaluation (epoch-independent).
pub(crate) fn eval_stream(encode_seed: u64, id: u64) -> Rng {
    Rng::new(encode_seed).derive(EVAL_STREAM).derive(id)
}

/// Mean validation mIoU of `model` over `samples` (percent).
pub fn validate_miou(
    model: &Model,
    samples: &[TrainSample],
    scheme: &CodingScheme,
    t: usize,
    encode_seed: u64,
) -> Result<f64> {
    let results = parallel::map_indexed(samples.len(), |i| {
        let sample = &samples[i];
        let mut rng = eval_stream(encode_seed, sample.id);
        let encoded = encode_input(scheme, &sample.input, t, &mut rng)?;
        model.predict(&encoded)
    });
    let mut preds = Vec::with_capacity(samples.len());
    for r in results {
        preds.push(r?);
    }
    let targets: Vec<BBox> = samples.iter().map(|s| s.target).collect();
    mean_iou(&preds, &targets)
}

/// Trains a fresh model on `train_samples`, validating on `val_samples`.
pub fn train(
    spec: NetworkSpec,
    train_samples: &[TrainSample],
    val_samples: &[TrainSample],
    cfg: &TrainConfig,
) -> Result<TrainOutput> {
    if train_samples.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    if cfg.batch_size == 0 {
        return Err(Error::Config("batch size must be >= 1".into()));
    }
    if spec.t != cfg.t {
        return Err(Error::Config(format!(
            "network T={} but config T={}",
            spec.t, cfg.t
        )));
    }

    let mut model = Model::init(spec, &mut Rng::new(cfg.init_seed))?;
    let mut adam = AdamState::new(&model, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
    let shuffle_root = Rng::new(cfg.init_seed).derive(0x5348_5546); // "SHUF"

    let mut best = model.to_checkpoint(0, cfg.init_seed, Some(&adam));
    let mut best_val = f64::NEG_INFINITY;
    let mut best_epoch = 0u32;
    let mut logs = Vec::with_capacity(cfg.epochs as usize);

    for epoch in 1..=cfg.epochs {
        if cfg.cosine_lr {
            let progress = (epoch - 1) as f64 / cfg.epochs as f64;
            adam.lr = cfg.lr * 0.5 * (1.0 + (std::f64::consts::PI * progress).cos());
        }
        let mut order: Vec<usize> = (0..train_samples.len()).collect();
        shuffle_root.derive(epoch as u64).shuffle(&mut order);

        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let results = parallel::map_indexed(batch.len(), |bi| -> Result<(f64, Gradients)> {
                let sample = &train_samples[batch[bi]];
                let mut rng = train_stream(cfg.encode_seed, epoch, sample.id, cfg.fresh_encode);
                let encoded = encode_input(&cfg.scheme, &sample.input, cfg.t, &mut rng)?;
                let (raw, tape) = match &encoded {
                    Encoded::Spikes { tensor, scale } => model.forward_traced(
                        ModelInput::Spikes(tensor),
                        scale.as_deref(),
                        ExecMode::Spiking,
                    )?,
                    Encoded::Image(img) => {
                        model.forward_traced(ModelInput::Image(img), None, ExecMode::Spiking)?
                    }
                };
                let (loss, grad_raw) = diou_loss_and_grad(&raw, &sample.target)?;
                let grads = model.backward(&tape, &grad_raw)?;
                Ok((loss, grads))
            });

            // Fixed-order reduction keeps results thread-count independent.
            let mut batch_loss = 0.0;
            let mut grads = Gradients::zeros_of(&model);
            for r in results {
                let (loss, g) = r?;
                batch_loss += loss;
                grads.add(&g);
            }
            let inv = 1.0 / batch.len() as f64;
            batch_loss *= inv;
            grads.scale(inv);
            if !batch_loss.is_finite() {
                return Err(Error::Numeric(format!(
                    "training diverged at epoch {epoch}: loss {batch_loss}"
                )));
            }
            adam.apply(&mut model.params, &grads)?;
            epoch_loss += batch_loss;
            batches += 1;
        }
        let train_loss = epoch_loss / batches as f64;

        let val_miou = if val_samples.is_empty() {
            0.0
        } else {
            validate_miou(&model, val_samples, &cfg.scheme, cfg.t, cfg.encode_seed)?
        };
        logs.push(EpochLog {
            epoch,
            train_loss,
            val_miou,
        });
        if val_miou > best_val {
            best_val = val_miou;
            best_epoch = epoch;
            best = model.to_checkpoint(epoch, cfg.init_seed, Some(&adam));
        }
    }

    if cfg.epochs == 0 {
        best_val = 0.0;
    }
    Ok(TrainOutput {
        best,
        best_epoch,
        best_val_miou: best_val,
        logs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::LayerSpec;
    use crate::neuron::IfConfig;

    fn toy_spec(t: usize) -> NetworkSpec {
        NetworkSpec {
            input: (1, 16, 16),
            t,
            layers: vec![
                LayerSpec::Conv2d {
                    c_in: 1,
                    c_out: 4,
                    k: 3,
                    stride: 2,
                    pad: 1,
                },
                LayerSpec::If {
                    cfg: IfConfig::default(),
                },
                LayerSpec::Flatten,
                LayerSpec::Accumulator {
                    c_in: 4 * 8 * 8,
                    outputs: 4,
                },
            ],
            image_encoder: false,
            delayed_input: false,
        }
    }

    fn bright_square_sample(id: u64) -> TrainSample {
        let mut data = vec![0.1; 256];
        for y in 4..10 {
            for x in 6..12 {
                data[y * 16 + x] = 0.9;
            }
        }
        TrainSample {
            id,
            input: SampleInput::Image(DenseImage::gray(16, 16, data).unwrap()),
            target: BBox::new(6.0 / 16.0, 4.0 / 16.0, 12.0 / 16.0, 10.0 / 16.0).unwrap(),
        }
    }

    #[test]
    fn overfits_single_sample() {
        let sample = vec![bright_square_sample(0)];
        let cfg = TrainConfig {
            epochs: 250,
            batch_size: 1,
            lr: 5e-3,
            t: 3,
            scheme: CodingScheme::Rate,
            fresh_encode: false,
            ..TrainConfig::default()
        };
        let out = train(toy_spec(3), &sample, &sample, &cfg).unwrap();
        let last = out.logs.last().unwrap();
        assert!(last.train_loss < 0.05, "final loss {}", last.train_loss);
    }

    #[test]
    fn zero_lr_keeps_parameters() {
        let samples = vec![bright_square_sample(0), bright_square_sample(1)];
        let cfg = TrainConfig {
            epochs: 3,
            batch_size: 2,
            lr: 0.0,
            t: 3,
            ..TrainConfig::default()
        };
        let out = train(toy_spec(3), &samples, &samples, &cfg).unwrap();
        let init = Model::init(toy_spec(3), &mut Rng::new(cfg.init_seed)).unwrap();
        let final_params = &out.best.params;
        // lr = 0: every epoch's model equals the init, so best == init.
        assert_eq!(&init.params, final_params);
    }

    #[test]
    fn zero_epochs_returns_initial_checkpoint() {
        let samples = vec![bright_square_sample(0)];
        let cfg = TrainConfig {
            epochs: 0,
            t: 3,
            ..TrainConfig::default()
        };
        let out = train(toy_spec(3), &samples, &samples, &cfg).unwrap();
        assert!(out.logs.is_empty());
        let init = Model::init(toy_spec(3), &mut Rng::new(cfg.init_seed)).unwrap();
        assert_eq!(out.best.params, init.params);
    }

    #[test]
    fn reruns_are_bit_exact() {
        let samples: Vec<TrainSample> = (0..8).map(bright_square_sample).collect();
        let cfg = TrainConfig {
            epochs: 2,
            batch_size: 4,
            t: 3,
            ..TrainConfig::default()
        };
        let a = train(toy_spec(3), &samples, &samples, &cfg).unwrap();
        let b = train(toy_spec(3), &samples, &samples, &cfg).unwrap();
        assert_eq!(a.best.to_bytes(), b.best.to_bytes());
        assert_eq!(a.logs, b.logs);
    }

    #[test]
    fn every_static_scheme_trains_one_epoch() {
        let samples: Vec<TrainSample> = (0..4).map(bright_square_sample).collect();
        for scheme in [
            CodingScheme::Rate,
            CodingScheme::Ttfs { tau: 1.0 },
            CodingScheme::Phase,
            CodingScheme::Saccades {
                dx: 2.0,
                dy: 2.0,
                threshold: 0.1,
            },
        ] {
            let cfg = TrainConfig {
                epochs: 1,
                batch_size: 2,
                t: 3,
                scheme: scheme.clone(),
                ..TrainConfig::default()
            };
            let out = train(toy_spec(3), &samples, &samples, &cfg);
            assert!(out.is_ok(), "{} failed: {:?}", scheme.name(), out.err());
        }
    }

    #[test]
    fn trainable_scheme_trains_end_to_end() {
        let samples: Vec<TrainSample> = (0..4).map(bright_square_sample).collect();
        let spec = NetworkSpec::snn_tiny_trainable((1, 16, 16), 3);
        let cfg = TrainConfig {
            epochs: 2,
            batch_size: 2,
            t: 3,
            scheme: CodingScheme::Trainable,
            ..TrainConfig::default()
        };
        let out = train(spec, &samples, &samples, &cfg).unwrap();
        assert_eq!(out.logs.len(), 2);
        // The learned encoder doubles as a standalone coding scheme.
        let model = Model::from_checkpoint(&out.best).unwrap();
        let enc = model.as_trainable_encoder().unwrap();
        let img = DenseImage::gray(16, 16, vec![0.5; 256]).unwrap();
        let tensor = crate::codec::encode_trainable(&img, 3, &enc).unwrap();
        assert_eq!(tensor.dims(), (3, 32, 8, 8));
    }

    #[test]
    fn scheme_modality_mismatch_rejected() {
        let events = EventStream::new(
            4,
            4,
            vec![crate::events::DvsEvent {
                timestamp_us: 0,
                x: 0,
                y: 0,
                polarity: 1,
            }],
        )
        .unwrap();
        let sample = SampleInput::Events(events);
        let mut rng = Rng::new(1);
        assert!(encode_input(&CodingScheme::Rate, &sample, 4, &mut rng).is_err());
        let img = SampleInput::Image(DenseImage::gray(4, 4, vec![0.5; 16]).unwrap());
        assert!(encode_input(&CodingScheme::EventSlice, &img, 4, &mut rng).is_err());
    }
}
