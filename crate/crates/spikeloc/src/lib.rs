//! Spiking neural network toolkit for single-object localization.
//!
//! Trains convolutional integrate-and-fire networks with surrogate-gradient
//! BPTT on frame- or event-based inputs, converts static images to spike
//! trains under five neural coding schemes, measures robustness against
//! parameterized sensor corruptions, and estimates inference energy from
//! per-layer spike rates.

pub mod bbox;
pub mod codec;
pub mod corrupt;
pub mod data;
pub mod energy;
pub mod error;
pub mod eval;
pub mod events;
pub mod kernels;
pub mod metrics;
pub mod net;
pub mod neuron;
pub mod noise;
pub mod parallel;
pub mod rng;
pub mod tensor;

pub use bbox::BBox;
pub use error::{Error, Result};
pub use events::{DvsEvent, EventStream};
pub use rng::Rng;
pub use tensor::{ActivationTensor, DenseImage, SpikeTensor};
