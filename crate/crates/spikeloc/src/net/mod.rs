//! Trainable spiking network: layer specifications, parameter storage,
//! BPTT engine with surrogate gradients, DIoU loss, Adam, checkpoints,
//! and the training loop.

mod adam;
mod checkpoint;
mod engine;
mod loss;
mod train;

pub use adam::AdamState;
pub use checkpoint::{AdamMoments, Checkpoint};
pub use engine::{ExecMode, Gradients, LayerActivations, ModelInput, RunOutput, Tape};
pub use loss::{decode_box, diou, diou_loss_and_grad};
pub use train::{
    encode_input, train, validate_miou, Encoded, EpochLog, SampleInput, TrainConfig, TrainOutput,
    TrainSample,
};

pub(crate) use train::eval_stream;

use crate::error::{Error, Result};
use crate::kernels::ConvShape;
use crate::neuron::IfConfig;
use crate::rng::Rng;

/// One layer of the network specification.
#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Conv2d {
        c_in: usize,
        c_out: usize,
        k: usize,
        stride: usize,
        pad: usize,
    },
    If {
        cfg: IfConfig,
    },
    Linear {
        c_in: usize,
        c_out: usize,
    },
    /// 2x2 max pooling, stride 2.
    Pool,
    Flatten,
    /// Spike-element-wise residual block (ADD variant): two conv+IF stages
    /// plus the identity path. Convolutions are k x k, stride 1, padded to
    /// preserve the spatial size.
    SewBlock {
        channels: usize,
        k: usize,
        cfg: IfConfig,
    },
    /// Fully connected IF layer with infinite threshold; final membrane
    /// potentials are the regression output.
    Accumulator {
        c_in: usize,
        outputs: usize,
    },
}

/// Number of regression outputs (one bounding box).
pub const BBOX_OUTPUTS: usize = 4;

/// Shape flowing between layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Map { c: usize, h: usize, w: usize },
    Flat(usize),
}

impl Shape {
    pub fn len(&self) -> usize {
        match *self {
            Shape::Map { c, h, w } => c * h * w,
            Shape::Flat(n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Full network specification: ordered layers, time-steps, input dims.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub input: (usize, usize, usize), // (C, H, W)
    pub t: usize,
    pub layers: Vec<LayerSpec>,
    /// Trainable coding: the first conv+IF pair runs once on the dense
    /// image and its binary output is repeated over the T time-steps.
    pub image_encoder: bool,
    /// Drive each weighted layer with the previous step's presynaptic
    /// spikes (one-step axonal delay) instead of the current step's.
    pub delayed_input: bool,
}

impl NetworkSpec {
    /// Validates shape composition and the accumulator contract, returning
    /// the per-layer output shapes.
    pub fn infer_shapes(&self) -> Result<Vec<Shape>> {
        if self.t == 0 {
            return Err(Error::Config("network requires T >= 1".into()));
        }
        let (c, h, w) = self.input;
        let mut shape = Shape::Map { c, h, w };
        let mut shapes = Vec::with_capacity(self.layers.len());
        let mut accumulators = 0usize;
        for (i, layer) in self.layers.iter().enumerate() {
            shape = match (layer, shape) {
                (
                    LayerSpec::Conv2d {
                        c_in,
                        c_out,
                        k,
                        stride,
                        pad,
                    },
                    Shape::Map { c, h, w },
                ) => {
                    if *c_in != c {
                        return Err(Error::Shape(format!(
                            "layer {i}: conv expects {c_in} channels, got {c}"
                        )));
                    }
                    if *k == 0 || *stride == 0 || h + 2 * pad < *k || w + 2 * pad < *k {
                        return Err(Error::Shape(format!("layer {i}: conv geometry invalid")));
                    }
                    let cs = ConvShape {
                        c_in: *c_in,
                        h_in: h,
                        w_in: w,
                        c_out: *c_out,
                        k: *k,
                        stride: *stride,
                        pad: *pad,
                    };
                    Shape::Map {
                        c: *c_out,
                        h: cs.h_out(),
                        w: cs.w_out(),
                    }
                }
                (LayerSpec::If { cfg }, s) => {
                    cfg.validate()?;
                    s
                }
                (LayerSpec::SewBlock { channels, k, cfg }, Shape::Map { c, h, w }) => {
                    cfg.validate()?;
                    if *channels != c {
                        return Err(Error::Shape(format!(
                            "layer {i}: SEW block expects {channels} channels, got {c}"
                        )));
                    }
                    if k % 2 == 0 {
                        return Err(Error::Config(format!(
                            "layer {i}: SEW kernel must be odd to preserve dims"
                        )));
                    }
                    Shape::Map { c, h, w }
                }
                (LayerSpec::Pool, Shape::Map { c, h, w }) => {
                    if h < 2 || w < 2 {
                        return Err(Error::Shape(format!(
                            "layer {i}: pool needs at least 2x2 input"
                        )));
                    }
                    Shape::Map {
                        c,
                        h: h / 2,
                        w: w / 2,
                    }
                }
                (LayerSpec::Flatten, Shape::Map { c, h, w }) => Shape::Flat(c * h * w),
                (LayerSpec::Linear { c_in, c_out }, Shape::Flat(n)) => {
                    if *c_in != n {
                        return Err(Error::Shape(format!(
                            "layer {i}: linear expects {c_in} inputs, got {n}"
                        )));
                    }
                    Shape::Flat(*c_out)
                }
                (LayerSpec::Accumulator { c_in, outputs }, Shape::Flat(n)) => {
                    if *c_in != n {
                        return Err(Error::Shape(format!(
                            "layer {i}: accumulator expects {c_in} inputs, got {n}"
                        )));
                    }
                    if *outputs != BBOX_OUTPUTS {
                        return Err(Error::Config(format!(
                            "layer {i}: accumulator must have {BBOX_OUTPUTS} outputs"
                        )));
                    }
                    accumulators += 1;
                    Shape::Flat(*outputs)
                }
                (other, s) => {
                    return Err(Error::Shape(format!(
                        "layer {i}: {other:?} cannot follow shape {s:?}"
                    )));
                }
            };
            shapes.push(shape);
        }
        if accumulators != 1 || !matches!(self.layers.last(), Some(LayerSpec::Accumulator { .. })) {
            return Err(Error::Config(
                "network needs exactly one accumulator, at the end".into(),
            ));
        }
        if self.image_encoder
            && !(matches!(self.layers.first(), Some(LayerSpec::Conv2d { .. }))
                && matches!(self.layers.get(1), Some(LayerSpec::If { .. })))
        {
            return Err(Error::Config(
                "image encoder requires leading conv + IF layers".into(),
            ));
        }
        Ok(shapes)
    }

    /// The desk-scale default network for a given spike input.
    pub fn snn_tiny(input: (usize, usize, usize), t: usize) -> Self {
        let (c, h, w) = input;
        let h2 = (h + 1) / 2;
        let w2 = (w + 1) / 2;
        let h4 = (h2 + 1) / 2;
        let w4 = (w2 + 1) / 2;
        let flat = 16 * (h4 / 2) * (w4 / 2);
        NetworkSpec {
            input,
            t,
            layers: vec![
                LayerSpec::Conv2d {
                    c_in: c,
                    c_out: 8,
                    k: 3,
                    stride: 2,
                    pad: 1,
                },
                LayerSpec::If {
                    cfg: IfConfig::default(),
                },
                LayerSpec::SewBlock {
                    channels: 8,
                    k: 3,
                    cfg: IfConfig::default(),
                },
                LayerSpec::Conv2d {
                    c_in: 8,
                    c_out: 16,
                    k: 3,
                    stride: 2,
                    pad: 1,
                },
                LayerSpec::If {
                    cfg: IfConfig::default(),
                },
                LayerSpec::Pool,
                LayerSpec::Flatten,
                LayerSpec::Accumulator {
                    c_in: flat,
                    outputs: BBOX_OUTPUTS,
                },
            ],
            image_encoder: false,
            delayed_input: false,
        }
    }

    /// The trainable-coding variant: a learned 32-channel encoder conv in
    /// front of the standard body.
    pub fn snn_tiny_trainable(input: (usize, usize, usize), t: usize) -> Self {
        let (c, h, w) = input;
        let h2 = (h + 1) / 2;
        let w2 = (w + 1) / 2;
        let mut body = NetworkSpec::snn_tiny((32, h2, w2), t);
        let mut layers = vec![
            LayerSpec::Conv2d {
                c_in: c,
                c_out: 32,
                k: 3,
                stride: 2,
                pad: 1,
            },
            LayerSpec::If {
                cfg: IfConfig::default(),
            },
        ];
        layers.append(&mut body.layers);
        NetworkSpec {
            input,
            t,
            layers,
            image_encoder: true,
            delayed_input: false,
        }
    }

    /// Look up a named preset.
    pub fn preset(name: &str, input: (usize, usize, usize), t: usize) -> Result<Self> {
        match name {
            "snn-tiny" => Ok(NetworkSpec::snn_tiny(input, t)),
            "snn-tiny-trainable" => Ok(NetworkSpec::snn_tiny_trainable(input, t)),
            other => Err(Error::Config(format!("unknown network preset '{other}'"))),
        }
    }
}

/// Named parameter tensor (f32-representable values held as f64).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTensor {
    pub name: String,
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

impl ParamTensor {
    pub fn zeros_like(&self) -> Vec<f64> {
        vec![0.0; self.values.len()]
    }
}

/// Rounds through f32 so checkpoints (stored as f32) are lossless.
pub(crate) fn quantize_f32(v: f64) -> f64 {
    (v as f32) as f64
}

/// Runtime layer with parameter indices into `Model::params`.
#[derive(Debug, Clone)]
pub(crate) enum Rt {
    Conv {
        shape: ConvShape,
        w: usize,
        b: usize,
    },
    If {
        cfg: IfConfig,
    },
    Sew {
        shape: ConvShape,
        w1: usize,
        b1: usize,
        w2: usize,
        b2: usize,
        cfg: IfConfig,
    },
    Pool {
        c: usize,
        h: usize,
        w: usize,
    },
    Flatten,
    Linear {
        in_dim: usize,
        out_dim: usize,
        w: usize,
        b: usize,
    },
    Acc {
        in_dim: usize,
        out_dim: usize,
        w: usize,
        b: usize,
    },
}

/// A network with allocated parameters.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: NetworkSpec,
    pub params: Vec<ParamTensor>,
    pub(crate) rt: Vec<Rt>,
    pub(crate) shapes: Vec<Shape>,
}

impl Model {
    /// Allocates and He-uniform-initializes parameters for `spec`.
    pub fn init(spec: NetworkSpec, rng: &mut Rng) -> Result<Self> {
        Model::build(spec, |name, dims, fan_in, params| {
            let n: usize = dims.iter().product();
            let values = if name.ends_with(".bias") {
                vec![0.0; n]
            } else {
                let limit = (6.0 / fan_in as f64).sqrt();
                (0..n)
                    .map(|_| quantize_f32(rng.next_range(-limit, limit)))
                    .collect()
            };
            params.push(ParamTensor { name, dims, values });
        })
    }

    /// Rebuilds a model from checkpointed parameters, validating names and
    /// shapes against the spec.
    pub fn from_params(spec: NetworkSpec, params: Vec<ParamTensor>) -> Result<Self> {
        let reference = Model::build(spec.clone(), |name, dims, _fan_in, out| {
            out.push(ParamTensor {
                name,
                dims,
                values: Vec::new(),
            });
        })?;
        if reference.params.len() != params.len() {
            return Err(Error::Data(format!(
                "checkpoint has {} tensors, spec needs {}",
                params.len(),
                reference.params.len()
            )));
        }
        for (expect, got) in reference.params.iter().zip(&params) {
            if expect.name != got.name || expect.dims != got.dims {
                return Err(Error::Data(format!(
                    "checkpoint tensor '{}' {:?} does not match spec tensor '{}' {:?}",
                    got.name, got.dims, expect.name, expect.dims
                )));
            }
            if got.values.len() != got.dims.iter().product::<usize>() {
                return Err(Error::Data(format!(
                    "tensor '{}' has wrong value count",
                    got.name
                )));
            }
        }
        let mut model = reference;
        model.params = params;
        Ok(model)
    }

    /// Walks the spec, materializing runtime layers and declaring every
    /// parameter tensor through `alloc(name, dims, fan_in, params)`.
    fn build<F>(spec: NetworkSpec, mut alloc: F) -> Result<Self>
    where
        F: FnMut(String, Vec<usize>, usize, &mut Vec<ParamTensor>),
    {
        let shapes = spec.infer_shapes()?;
        let (c0, h0, w0) = spec.input;
        let mut shape = Shape::Map {
            c: c0,
            h: h0,
            w: w0,
        };
        let mut params: Vec<ParamTensor> = Vec::new();
        let mut rt = Vec::new();
        for (i, layer) in spec.layers.iter().enumerate() {
            match (layer, shape) {
                (
                    LayerSpec::Conv2d {
                        c_in,
                        c_out,
                        k,
                        stride,
                        pad,
                    },
                    Shape::Map { h, w, .. },
                ) => {
                    let cs = ConvShape {
                        c_in: *c_in,
                        h_in: h,
                        w_in: w,
                        c_out: *c_out,
                        k: *k,
                        stride: *stride,
                        pad: *pad,
                    };
                    let wi = params.len();
                    alloc(
                        format!("l{i}.weight"),
                        vec![*c_out, *c_in, *k, *k],
                        c_in * k * k,
                        &mut params,
                    );
                    let bi = params.len();
                    alloc(
                        format!("l{i}.bias"),
                        vec![*c_out],
                        c_in * k * k,
                        &mut params,
                    );
                    rt.push(Rt::Conv {
                        shape: cs,
                        w: wi,
                        b: bi,
                    });
                    shape = Shape::Map {
                        c: *c_out,
                        h: cs.h_out(),
                        w: cs.w_out(),
                    };
                }
                (LayerSpec::If { cfg }, _) => {
                    rt.push(Rt::If { cfg: *cfg });
                }
                (LayerSpec::SewBlock { channels, k, cfg }, Shape::Map { c, h, w }) => {
                    let cs = ConvShape {
                        c_in: c,
                        h_in: h,
                        w_in: w,
                        c_out: *channels,
                        k: *k,
                        stride: 1,
                        pad: k / 2,
                    };
                    let fan = channels * k * k;
                    let w1 = params.len();
                    alloc(
                        format!("l{i}.conv1.weight"),
                        vec![*channels, *channels, *k, *k],
                        fan,
                        &mut params,
                    );
                    let b1 = params.len();
                    alloc(
                        format!("l{i}.conv1.bias"),
                        vec![*channels],
                        fan,
                        &mut params,
                    );
                    let w2 = params.len();
                    alloc(
                        format!("l{i}.conv2.weight"),
                        vec![*channels, *channels, *k, *k],
                        fan,
                        &mut params,
                    );
                    let b2 = params.len();
                    alloc(
                        format!("l{i}.conv2.bias"),
                        vec![*channels],
                        fan,
                        &mut params,
                    );
                    rt.push(Rt::Sew {
                        shape: cs,
                        w1,
                        b1,
                        w2,
                        b2,
                        cfg: *cfg,
                    });
                }
                (LayerSpec::Pool, Shape::Map { c, h, w }) => {
                    rt.push(Rt::Pool { c, h, w });
                    shape = Shape::Map {
                        c,
                        h: h / 2,
                        w: w / 2,
                    };
                }
                (LayerSpec::Flatten, Shape::Map { c, h, w }) => {
                    rt.push(Rt::Flatten);
                    shape = Shape::Flat(c * h * w);
                }
                (LayerSpec::Linear { c_in, c_out }, Shape::Flat(_)) => {
                    let wi = params.len();
                    alloc(
                        format!("l{i}.weight"),
                        vec![*c_out, *c_in],
                        *c_in,
                        &mut params,
                    );
                    let bi = params.len();
                    alloc(format!("l{i}.bias"), vec![*c_out], *c_in, &mut params);
                    rt.push(Rt::Linear {
                        in_dim: *c_in,
                        out_dim: *c_out,
                        w: wi,
                        b: bi,
                    });
                    shape = Shape::Flat(*c_out);
                }
                (LayerSpec::Accumulator { c_in, outputs }, Shape::Flat(_)) => {
                    let wi = params.len();
                    alloc(
                        format!("l{i}.weight"),
                        vec![*outputs, *c_in],
                        *c_in,
                        &mut params,
                    );
                    let bi = params.len();
                    alloc(format!("l{i}.bias"), vec![*outputs], *c_in, &mut params);
                    rt.push(Rt::Acc {
                        in_dim: *c_in,
                        out_dim: *outputs,
                        w: wi,
                        b: bi,
                    });
                    shape = Shape::Flat(*outputs);
                }
                (other, s) => {
                    return Err(Error::Shape(format!("layer {i}: {other:?} after {s:?}")));
                }
            }
        }
        Ok(Model {
            spec,
            params,
            rt,
            shapes,
        })
    }

    /// Total parameter count.
    pub fn param_count(&self) -> usize {
        self.params.iter().map(|p| p.values.len()).sum()
    }

    /// The leading conv+IF pair as a standalone trainable coding scheme.
    pub fn as_trainable_encoder(&self) -> Result<crate::codec::TrainableEncoder> {
        if !self.spec.image_encoder {
            return Err(Error::Config("model has no image encoder".into()));
        }
        let (Rt::Conv { shape, w, b }, Rt::If { cfg }) = (&self.rt[0], &self.rt[1]) else {
            return Err(Error::Config("model has no image encoder".into()));
        };
        Ok(crate::codec::TrainableEncoder {
            shape: *shape,
            weights: self.params[*w].values.clone(),
            bias: self.params[*b].values.clone(),
            if_cfg: *cfg,
        })
    }
}
