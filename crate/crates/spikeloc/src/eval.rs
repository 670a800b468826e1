//! Evaluation pipelines: clean mIoU and corruption sweeps with RAD/mRAD.
//!
//! Static corruptions perturb the image before encoding; event corruptions
//! perturb the sliced spike tensor, mirroring where each noise source
//! physically enters the pipeline.

use crate::bbox::BBox;
use crate::codec::CodingScheme;
use crate::corrupt::{EventCorruption, Severity, StaticCorruption};
use crate::error::{Error, Result};
use crate::metrics::{mean_iou, rad, EvalReport, SweepCell};
use crate::net::{encode_input, Encoded, Model, SampleInput, TrainSample};
use crate::parallel;
use crate::rng::Rng;

pub use crate::net::validate_miou as eval_clean;

/// Either corruption family, for single-corruption CLI runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorruptionKind {
    Static(StaticCorruption),
    Event(EventCorruption),
}

impl CorruptionKind {
    pub fn parse(name: &str) -> Result<Self> {
        StaticCorruption::parse(name)
            .map(CorruptionKind::Static)
            .or_else(|| EventCorruption::parse(name).map(CorruptionKind::Event))
            .ok_or_else(|| Error::Config(format!("unknown corruption '{name}'")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            CorruptionKind::Static(c) => c.name(),
            CorruptionKind::Event(c) => c.name(),
        }
    }
}

const CORRUPT_STREAM: u64 = 0x434f_5252; // "CORR"

fn corrupt_stream(encode_seed: u64, corruption: &str, severity: Severity, id: u64) -> Rng {
    let tag = crate::data::fnv1a(corruption.as_bytes()) ^ severity.level() as u64;
    Rng::new(encode_seed)
        .derive(CORRUPT_STREAM)
        .derive(tag)
        .derive(id)
}

/// mIoU over `samples` with one corruption applied at one severity.
pub fn eval_corrupted(
    model: &Model,
    samples: &[TrainSample],
    scheme: &CodingScheme,
    t: usize,
    encode_seed: u64,
    corruption: CorruptionKind,
    severity: Severity,
) -> Result<f64> {
    match (corruption, scheme) {
        (CorruptionKind::Event(_), CodingScheme::EventSlice) => {}
        (CorruptionKind::Static(_), CodingScheme::EventSlice) => {
            return Err(Error::Config(format!(
                "corruption '{}' targets static images but the pipeline is event-based; \
                 use hot_pixels or background_activity",
                corruption.name()
            )));
        }
        (CorruptionKind::Event(_), _) => {
            return Err(Error::Config(format!(
                "corruption '{}' targets event streams but the pipeline encodes static \
                 images; use one of the static corruptions",
                corruption.name()
            )));
        }
        (CorruptionKind::Static(_), _) => {}
    }

    let results = parallel::map_indexed(samples.len(), |i| -> Result<BBox> {
        let sample = &samples[i];
        let mut corrupt_rng = corrupt_stream(encode_seed, corruption.name(), severity, sample.id);
        let mut encode_rng = crate::net::eval_stream(encode_seed, sample.id);
        let encoded = match (corruption, &sample.input) {
            (CorruptionKind::Static(c), SampleInput::Image(img)) => {
                let corrupted = c.apply(img, severity, &mut corrupt_rng);
                encode_input(scheme, &SampleInput::Image(corrupted), t, &mut encode_rng)?
            }
            (CorruptionKind::Event(c), SampleInput::Events(_)) => {
                let encoded = encode_input(scheme, &sample.input, t, &mut encode_rng)?;
                match encoded {
                    Encoded::Spikes { tensor, scale } => Encoded::Spikes {
                        tensor: c.apply(&tensor, severity, &mut corrupt_rng),
                        scale,
                    },
                    Encoded::Image(_) => unreachable!("event slicing yields spikes"),
                }
            }
            (CorruptionKind::Static(_), SampleInput::Events(_)) => {
                return Err(Error::Config("static corruption on an event sample".into()));
            }
            (CorruptionKind::Event(_), SampleInput::Image(_)) => {
                return Err(Error::Config("event corruption on a static sample".into()));
            }
        };
        model.predict(&encoded)
    });
    let mut preds = Vec::with_capacity(samples.len());
    for r in results {
        preds.push(r?);
    }
    let targets: Vec<BBox> = samples.iter().map(|s| s.target).collect();
    mean_iou(&preds, &targets)
}

/// Full sweep: every corruption of the pipeline's modality at severities
/// 1..=5, with RAD against the clean score.
pub fn corruption_sweep(
    model: &Model,
    samples: &[TrainSample],
    scheme: &CodingScheme,
    t: usize,
    encode_seed: u64,
) -> Result<EvalReport> {
    let miou_clean = eval_clean(model, samples, scheme, t, encode_seed)?;
    let corruptions: Vec<CorruptionKind> = if matches!(scheme, CodingScheme::EventSlice) {
        EventCorruption::ALL
            .iter()
            .map(|&c| CorruptionKind::Event(c))
            .collect()
    } else {
        StaticCorruption::ALL
            .iter()
            .map(|&c| CorruptionKind::Static(c))
            .collect()
    };
    let mut cells = Vec::with_capacity(corruptions.len() * 5);
    for corruption in corruptions {
        for severity in Severity::all() {
            let miou =
                eval_corrupted(model, samples, scheme, t, encode_seed, corruption, severity)?;
            cells.push(SweepCell {
                corruption: corruption.name().to_string(),
                severity: severity.level(),
                miou,
                rad: rad(miou_clean, miou)?,
            });
        }
    }
    Ok(EvalReport { miou_clean, cells })
}
