//! Bit-exact checkpoint serialization.
//!
//! Layout: magic "SNNW", version u8 = 1, u32 LE spec-blob length, the
//! canonical spec blob, u32 LE tensor count, then per tensor: u16 LE name
//! length + name, u8 rank, u32 LE dims, f32 LE values. Adam moments follow
//! a "MOMS" marker using the same tensor encoding.
//!
//! The spec blob is a canonical binary form of the network specification
//! followed by the run state (epoch, seed, Adam step).

use super::adam::AdamState;
use super::{LayerSpec, Model, NetworkSpec, ParamTensor};
use crate::error::{Error, Result};
use crate::neuron::{IfConfig, ResetMode};

const MAGIC: &[u8; 4] = b"SNNW";
const MOMS: &[u8; 4] = b"MOMS";
const VERSION: u8 = 1;

/// First and second Adam moment tensors plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamMoments {
    pub step: u64,
    pub m: Vec<ParamTensor>,
    pub v: Vec<ParamTensor>,
}

/// Serialized training state: spec, parameters, optional optimizer moments.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub spec: NetworkSpec,
    pub epoch: u32,
    pub seed: u64,
    pub params: Vec<ParamTensor>,
    pub moments: Option<AdamMoments>,
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::Data("checkpoint: truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn done(&self) -> bool {
        self.pos == self.bytes.len()
    }
}

fn push_if(out: &mut Vec<u8>, cfg: &IfConfig) {
    out.extend_from_slice(&cfg.threshold.to_le_bytes());
    out.push(match cfg.reset_mode {
        ResetMode::ToZero => 0,
        ResetMode::SubtractTheta => 1,
    });
    out.push(u8::from(cfg.infinite_threshold));
}

fn read_if(r: &mut Reader) -> Result<IfConfig> {
    let threshold = r.f64()?;
    let reset_mode = match r.u8()? {
        0 => ResetMode::ToZero,
        1 => ResetMode::SubtractTheta,
        other => return Err(Error::Data(format!("checkpoint: bad reset mode {other}"))),
    };
    let infinite_threshold = r.u8()? != 0;
    Ok(IfConfig {
        threshold,
        reset_mode,
        infinite_threshold,
    })
}

/// Canonical spec blob: network layout plus (epoch, seed, adam step).
fn spec_to_blob(spec: &NetworkSpec, epoch: u32, seed: u64, adam_step: u64) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&(spec.t as u32).to_le_bytes());
    for d in [spec.input.0, spec.input.1, spec.input.2] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.push(u8::from(spec.image_encoder) | (u8::from(spec.delayed_input) << 1));
    out.extend_from_slice(&(spec.layers.len() as u32).to_le_bytes());
    for layer in &spec.layers {
        match layer {
            LayerSpec::Conv2d {
                c_in,
                c_out,
                k,
                stride,
                pad,
            } => {
                out.push(1);
                for v in [c_in, c_out, k, stride, pad] {
                    out.extend_from_slice(&(*v as u32).to_le_bytes());
                }
            }
            LayerSpec::If { cfg } => {
                out.push(2);
                push_if(&mut out, cfg);
            }
            LayerSpec::Linear { c_in, c_out } => {
                out.push(3);
                for v in [c_in, c_out] {
                    out.extend_from_slice(&(*v as u32).to_le_bytes());
                }
            }
            LayerSpec::Pool => out.push(4),
            LayerSpec::Flatten => out.push(5),
            LayerSpec::SewBlock { channels, k, cfg } => {
                out.push(6);
                out.extend_from_slice(&(*channels as u32).to_le_bytes());
                out.extend_from_slice(&(*k as u32).to_le_bytes());
                push_if(&mut out, cfg);
            }
            LayerSpec::Accumulator { c_in, outputs } => {
                out.push(7);
                for v in [c_in, outputs] {
                    out.extend_from_slice(&(*v as u32).to_le_bytes());
                }
            }
        }
    }
    out.extend_from_slice(&epoch.to_le_bytes());
    out.extend_from_slice(&seed.to_le_bytes());
    out.extend_from_slice(&adam_step.to_le_bytes());
    out
}

fn spec_from_blob(blob: &[u8]) -> Result<(NetworkSpec, u32, u64, u64)> {
    let mut r = Reader::new(blob);
    let t = r.u32()? as usize;
    let c = r.u32()? as usize;
    let h = r.u32()? as usize;
    let w = r.u32()? as usize;
    let flags = r.u8()?;
    let n_layers = r.u32()? as usize;
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let layer = match r.u8()? {
            1 => LayerSpec::Conv2d {
                c_in: r.u32()? as usize,
                c_out: r.u32()? as usize,
                k: r.u32()? as usize,
                stride: r.u32()? as usize,
                pad: r.u32()? as usize,
            },
            2 => LayerSpec::If {
                cfg: read_if(&mut r)?,
            },
            3 => LayerSpec::Linear {
                c_in: r.u32()? as usize,
                c_out: r.u32()? as usize,
            },
            4 => LayerSpec::Pool,
            5 => LayerSpec::Flatten,
            6 => LayerSpec::SewBlock {
                channels: r.u32()? as usize,
                k: r.u32()? as usize,
                cfg: read_if(&mut r)?,
            },
            7 => LayerSpec::Accumulator {
                c_in: r.u32()? as usize,
                outputs: r.u32()? as usize,
            },
            other => {
                return Err(Error::Data(format!(
                    "checkpoint: unknown layer tag {other}"
                )))
            }
        };
        layers.push(layer);
    }
    let epoch = r.u32()?;
    let seed = r.u64()?;
    let adam_step = r.u64()?;
    if !r.done() {
        return Err(Error::Data(
            "checkpoint: trailing bytes in spec blob".into(),
        ));
    }
    let spec = NetworkSpec {
        input: (c, h, w),
        t,
        layers,
        image_encoder: flags & 1 != 0,
        delayed_input: flags & 2 != 0,
    };
    Ok((spec, epoch, seed, adam_step))
}

fn push_tensor(out: &mut Vec<u8>, tensor: &ParamTensor) {
    out.extend_from_slice(&(tensor.name.len() as u16).to_le_bytes());
    out.extend_from_slice(tensor.name.as_bytes());
    out.push(tensor.dims.len() as u8);
    for d in &tensor.dims {
        out.extend_from_slice(&(*d as u32).to_le_bytes());
    }
    for &v in &tensor.values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

fn read_tensor(r: &mut Reader) -> Result<ParamTensor> {
    let name_len = r.u16()? as usize;
    let name = String::from_utf8(r.take(name_len)?.to_vec())
        .map_err(|_| Error::Data("checkpoint: tensor name is not UTF-8".into()))?;
    let rank = r.u8()? as usize;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        dims.push(r.u32()? as usize);
    }
    let count: usize = dims.iter().product();
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f32::from_le_bytes(r.take(4)?.try_into().unwrap()) as f64);
    }
    Ok(ParamTensor { name, dims, values })
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let adam_step = self.moments.as_ref().map(|m| m.step).unwrap_or(0);
        let blob = spec_to_blob(&self.spec, self.epoch, self.seed, adam_step);
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&(blob.len() as u32).to_le_bytes());
        out.extend_from_slice(&blob);
        out.extend_from_slice(&(self.params.len() as u32).to_le_bytes());
        for tensor in &self.params {
            push_tensor(&mut out, tensor);
        }
        if let Some(moments) = &self.moments {
            out.extend_from_slice(MOMS);
            out.extend_from_slice(&((moments.m.len() + moments.v.len()) as u32).to_le_bytes());
            for (m, v) in moments.m.iter().zip(&moments.v) {
                push_tensor(&mut out, m);
                push_tensor(&mut out, v);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4)? != MAGIC {
            return Err(Error::Data("checkpoint: bad magic".into()));
        }
        if r.u8()? != VERSION {
            return Err(Error::Data("checkpoint: unsupported version".into()));
        }
        let blob_len = r.u32()? as usize;
        let (spec, epoch, seed, adam_step) = spec_from_blob(r.take(blob_len)?)?;
        let n_params = r.u32()? as usize;
        let mut params = Vec::with_capacity(n_params);
        for _ in 0..n_params {
            params.push(read_tensor(&mut r)?);
        }
        let moments = if !r.done() {
            if r.take(4)? != MOMS {
                return Err(Error::Data("checkpoint: bad moments marker".into()));
            }
            let count = r.u32()? as usize;
            if count != 2 * n_params {
                return Err(Error::Data("checkpoint: moment count mismatch".into()));
            }
            let mut m = Vec::with_capacity(n_params);
            let mut v = Vec::with_capacity(n_params);
            for _ in 0..n_params {
                m.push(read_tensor(&mut r)?);
                v.push(read_tensor(&mut r)?);
            }
            Some(AdamMoments {
                step: adam_step,
                m,
                v,
            })
        } else {
            None
        };
        if !r.done() {
            return Err(Error::Data("checkpoint: trailing bytes".into()));
        }
        Ok(Checkpoint {
            spec,
            epoch,
            seed,
            params,
            moments,
        })
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        Checkpoint::from_bytes(&std::fs::read(path)?)
    }
}

impl Model {
    /// Snapshot the model (and optionally optimizer state) for saving.
    pub fn to_checkpoint(&self, epoch: u32, seed: u64, adam: Option<&AdamState>) -> Checkpoint {
        let moments = adam.map(|a| AdamMoments {
            step: a.step,
            m: self
                .params
                .iter()
                .zip(&a.m)
                .map(|(p, m)| ParamTensor {
                    name: format!("{}.m", p.name),
                    dims: p.dims.clone(),
                    values: m.clone(),
                })
                .collect(),
            v: self
                .params
                .iter()
                .zip(&a.v)
                .map(|(p, v)| ParamTensor {
                    name: format!("{}.v", p.name),
                    dims: p.dims.clone(),
                    values: v.clone(),
                })
                .collect(),
        });
        Checkpoint {
            spec: self.spec.clone(),
            epoch,
            seed,
            params: self.params.clone(),
            moments,
        }
    }

    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        Model::from_params(ckpt.spec.clone(), ckpt.params.clone())
    }
}
