//! Neural coding schemes: conversion of static images and event streams
//! into binary spike tensors.
//!
//! Five schemes for static images (rate, time-to-first-spike, phase,
//! saccades, trainable) plus fixed-window slicing for event streams.

use crate::error::{Error, Result};
use crate::events::EventStream;
use crate::kernels::{conv2d_forward, ConvShape};
use crate::neuron::IfConfig;
use crate::rng::Rng;
use crate::tensor::{DenseImage, SpikeTensor};

/// Length of one phase-coding cycle (bits of an 8-bit intensity).
pub const PHASE_CYCLE: usize = 8;

/// TTFS intensity cutoff: pixels at or below it never spike.
pub const TTFS_CUTOFF: f64 = 0.01;

/// Default delta-modulation threshold for saccades coding.
pub const SACCADE_THRESHOLD: f64 = 0.1;

/// Coding scheme selector with per-scheme parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CodingScheme {
    Rate,
    Ttfs { tau: f64 },
    Phase,
    Saccades { dx: f64, dy: f64, threshold: f64 },
    Trainable,
    EventSlice,
}

impl CodingScheme {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rate" => Ok(CodingScheme::Rate),
            "ttfs" => Ok(CodingScheme::Ttfs { tau: 1.0 }),
            "phase" => Ok(CodingScheme::Phase),
            "saccades" => Ok(CodingScheme::Saccades {
                dx: 2.0,
                dy: 2.0,
                threshold: SACCADE_THRESHOLD,
            }),
            "trainable" => Ok(CodingScheme::Trainable),
            "event-slice" | "events" => Ok(CodingScheme::EventSlice),
            other => Err(Error::Config(format!("unknown coding scheme '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CodingScheme::Rate => "rate",
            CodingScheme::Ttfs { .. } => "ttfs",
            CodingScheme::Phase => "phase",
            CodingScheme::Saccades { .. } => "saccades",
            CodingScheme::Trainable => "trainable",
            CodingScheme::EventSlice => "event-slice",
        }
    }
}

/// Rate coding: every element is an independent Bernoulli draw with
/// success probability equal to the pixel intensity.
pub fn encode_rate(img: &DenseImage, t: usize, rng: &mut Rng) -> SpikeTensor {
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let mut out = SpikeTensor::zeros(t, c, h, w);
    for ti in 0..t {
        for (i, &p) in img.data().iter().enumerate() {
            if rng.next_bool(p) {
                out.set_linear(ti * c * h * w + i, true);
            }
        }
    }
    out
}

/// Continuous first-spike time of an intensity under the RC-circuit model:
/// `tau * ln(I / (I - cutoff))` above the cutoff, no spike otherwise.
pub fn ttfs_time(intensity: f64, tau: f64) -> Option<f64> {
    if intensity > TTFS_CUTOFF {
        Some(tau * (intensity / (intensity - TTFS_CUTOFF)).ln())
    } else {
        None
    }
}

/// Time-to-first-spike coding: at most one spike per pixel, brighter
/// pixels first. Continuous times are rank-mapped onto steps `1..=T` so the
/// earliest time lands on step 1 and everything at or beyond the 99th
/// percentile clamps to step T.
pub fn encode_ttfs(img: &DenseImage, t: usize, tau: f64) -> SpikeTensor {
    assert!(t >= 1 && tau > 0.0);
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let times: Vec<Option<f64>> = img.data().iter().map(|&v| ttfs_time(v, tau)).collect();

    let mut finite: Vec<f64> = times.iter().flatten().copied().collect();
    let mut out = SpikeTensor::zeros(t, c, h, w);
    if finite.is_empty() {
        return out;
    }
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t_min = finite[0];
    let p99_idx = ((finite.len() as f64 * 0.99).ceil() as usize).clamp(1, finite.len()) - 1;
    let t_hi = finite[p99_idx];

    let n = c * h * w;
    for (i, time) in times.iter().enumerate() {
        let Some(time) = *time else { continue };
        let step = if t_hi > t_min {
            let frac = (time.min(t_hi) - t_min) / (t_hi - t_min);
            1 + (frac * (t - 1) as f64).round() as usize
        } else {
            1
        };
        let step = step.clamp(1, t);
        out.set_linear((step - 1) * n + i, true);
    }
    out
}

/// Synaptic weights replicating bit significance in phase coding:
/// `w(t) = 2^-(1 + (t-1) mod 8)`, period 8, `w(1) = 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseWeights {
    pub weights: Vec<f64>,
}

pub fn phase_weights(t: usize) -> PhaseWeights {
    let weights = (1..=t)
        .map(|step| (2.0f64).powi(-(1 + ((step - 1) % PHASE_CYCLE) as i32)))
        .collect();
    PhaseWeights { weights }
}

/// Phase coding: step t carries bit `1 + (t-1) mod 8` (MSB first) of the
/// 8-bit pixel intensity; the cycle repeats until T steps exist. The
/// returned weights are applied as input scaling by the first layer, so
/// the tensor itself stays binary.
pub fn encode_phase(img: &DenseImage, t: usize) -> (SpikeTensor, PhaseWeights) {
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let levels: Vec<u8> = img
        .data()
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    let n = c * h * w;
    let mut out = SpikeTensor::zeros(t, c, h, w);
    for step in 1..=t {
        let bit = (step - 1) % PHASE_CYCLE; // 0 = MSB
        for (i, &v) in levels.iter().enumerate() {
            if (v >> (7 - bit)) & 1 == 1 {
                out.set_linear((step - 1) * n + i, true);
            }
        }
    }
    (out, phase_weights(t))
}

/// Channel layout emitted by delta modulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaChannels {
    /// Positive changes only; channel count preserved.
    OnOnly,
    /// Two channels per input channel: index 0 = Off, 1 = On.
    Signed,
}

/// Emits spikes where intensity changes between consecutive frames exceed
/// the threshold. `frames` holds T+1 frames; the output has T steps.
pub fn delta_modulate(
    frames: &[Vec<f64>],
    c: usize,
    h: usize,
    w: usize,
    threshold: f64,
    channels: DeltaChannels,
) -> Result<SpikeTensor> {
    if frames.len() < 2 {
        return Err(Error::Config(
            "delta modulation needs at least 2 frames".into(),
        ));
    }
    if threshold <= 0.0 {
        return Err(Error::Config("delta threshold must be > 0".into()));
    }
    let t = frames.len() - 1;
    let n = c * h * w;
    let c_out = match channels {
        DeltaChannels::OnOnly => c,
        DeltaChannels::Signed => 2 * c,
    };
    let mut out = SpikeTensor::zeros(t, c_out, h, w);
    for step in 0..t {
        let (prev, cur) = (&frames[step], &frames[step + 1]);
        for i in 0..n {
            let d = cur[i] - prev[i];
            let (ci, rest) = (i / (h * w), i % (h * w));
            match channels {
                DeltaChannels::OnOnly => {
                    if d > threshold {
                        out.set_linear((step * c + ci) * h * w + rest, true);
                    }
                }
                DeltaChannels::Signed => {
                    if d > threshold {
                        out.set_linear((step * c_out + 2 * ci + 1) * h * w + rest, true);
                    } else if d < -threshold {
                        out.set_linear((step * c_out + 2 * ci) * h * w + rest, true);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Sub-pixel image translation by (ox, oy), bilinear sampling with
/// clamp-to-edge padding.
pub fn translate_bilinear(img: &DenseImage, ox: f64, oy: f64) -> Vec<f64> {
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let mut out = vec![0.0; c * h * w];
    for ci in 0..c {
        for y in 0..h {
            for x in 0..w {
                let sx = x as f64 - ox;
                let sy = y as f64 - oy;
                let x0 = sx.floor();
                let y0 = sy.floor();
                let fx = sx - x0;
                let fy = sy - y0;
                let clamp_x = |v: f64| (v.max(0.0) as usize).min(w - 1);
                let clamp_y = |v: f64| (v.max(0.0) as usize).min(h - 1);
                let (x0c, x1c) = (clamp_x(x0), clamp_x(x0 + 1.0));
                let (y0c, y1c) = (clamp_y(y0), clamp_y(y0 + 1.0));
                let v00 = img.get(ci, y0c, x0c);
                let v01 = img.get(ci, y0c, x1c);
                let v10 = img.get(ci, y1c, x0c);
                let v11 = img.get(ci, y1c, x1c);
                let top = v00 * (1.0 - fx) + v01 * fx;
                let bot = v10 * (1.0 - fx) + v11 * fx;
                out[(ci * h + y) * w + x] = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    out
}

/// Triangular saccade trajectory: T+1 offsets starting and ending at the
/// origin, legs to (+dx,+dy), then (+2dx, 0), then back. Leg 1 and 2 get
/// T/3 moves each, the remainder goes to the last leg.
pub fn saccade_offsets(t: usize, dx: f64, dy: f64) -> Vec<(f64, f64)> {
    let corners = [(0.0, 0.0), (dx, dy), (2.0 * dx, 0.0), (0.0, 0.0)];
    let n1 = t / 3;
    let n2 = t / 3;
    let bounds = [0, n1, n1 + n2, t]; // remainder lands in the last leg
    let mut offsets = Vec::with_capacity(t + 1);
    offsets.push(corners[0]);
    for i in 1..=t {
        let leg = if i <= bounds[1] {
            0
        } else if i <= bounds[2] {
            1
        } else {
            2
        };
        let span = (bounds[leg + 1] - bounds[leg]) as f64;
        let frac = (i - bounds[leg]) as f64 / span;
        let (ax, ay) = corners[leg];
        let (bx, by) = corners[leg + 1];
        offsets.push((ax + (bx - ax) * frac, ay + (by - ay) * frac));
    }
    offsets
}

/// The T+1 translated frames traversed by the saccade trajectory.
pub fn saccade_frames(img: &DenseImage, t: usize, dx: f64, dy: f64) -> Vec<Vec<f64>> {
    saccade_offsets(t, dx, dy)
        .into_iter()
        .map(|(ox, oy)| translate_bilinear(img, ox, oy))
        .collect()
}

/// Saccades coding: simulated eye movement over a static image followed by
/// delta modulation of consecutive frames.
pub fn encode_saccades(
    img: &DenseImage,
    t: usize,
    dx: f64,
    dy: f64,
    threshold: f64,
    channels: DeltaChannels,
) -> Result<SpikeTensor> {
    if t < 2 {
        return Err(Error::Config("saccades coding requires T >= 2".into()));
    }
    let frames = saccade_frames(img, t, dx, dy);
    delta_modulate(
        &frames,
        img.channels(),
        img.height(),
        img.width(),
        threshold,
        channels,
    )
}

/// A trained (or seeded) first convolution acting as a coding scheme.
#[derive(Debug, Clone)]
pub struct TrainableEncoder {
    pub shape: ConvShape,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub if_cfg: IfConfig,
}

/// Output channel count of the trainable encoder.
pub const TRAINABLE_CHANNELS: usize = 32;

impl TrainableEncoder {
    /// Randomly initialized encoder: 32 output channels, kernel 3, stride 2.
    pub fn seeded(c_in: usize, h_in: usize, w_in: usize, rng: &mut Rng) -> Self {
        let shape = ConvShape {
            c_in,
            h_in,
            w_in,
            c_out: TRAINABLE_CHANNELS,
            k: 3,
            stride: 2,
            pad: 1,
        };
        let limit = (6.0 / (shape.c_in * shape.k * shape.k) as f64).sqrt();
        let weights = (0..shape.weight_len())
            .map(|_| (rng.next_range(-limit, limit) as f32) as f64)
            .collect();
        let bias = vec![0.0; shape.c_out];
        TrainableEncoder {
            shape,
            weights,
            bias,
            if_cfg: IfConfig::default(),
        }
    }
}

/// Trainable coding: one convolution plus a single-step IF activation; the
/// resulting binary map is repeated identically over the T time-steps.
pub fn encode_trainable(img: &DenseImage, t: usize, enc: &TrainableEncoder) -> Result<SpikeTensor> {
    if img.channels() != enc.shape.c_in
        || img.height() != enc.shape.h_in
        || img.width() != enc.shape.w_in
    {
        return Err(Error::Shape(format!(
            "trainable encoder expects {}x{}x{}, got {}x{}x{}",
            enc.shape.c_in,
            enc.shape.h_in,
            enc.shape.w_in,
            img.channels(),
            img.height(),
            img.width()
        )));
    }
    let mut drive = vec![0.0; enc.shape.out_len()];
    conv2d_forward(&enc.shape, img.data(), &enc.weights, &enc.bias, &mut drive);
    let theta = enc.if_cfg.threshold;
    let spikes: Vec<bool> = drive
        .iter()
        .map(|&u| !enc.if_cfg.infinite_threshold && u >= theta)
        .collect();
    let (oc, oh, ow) = (enc.shape.c_out, enc.shape.h_out(), enc.shape.w_out());
    let n = oc * oh * ow;
    let mut out = SpikeTensor::zeros(t, oc, oh, ow);
    for ti in 0..t {
        for (i, &s) in spikes.iter().enumerate() {
            if s {
                out.set_linear(ti * n + i, true);
            }
        }
    }
    Ok(out)
}

/// Event-frame slicing: the stream's time span is split into T equal
/// windows; an element is set when at least one event of that polarity
/// fell in the window at that pixel. Output channels: 0 = Off, 1 = On.
pub fn slice_events(stream: &EventStream, t: usize) -> Result<SpikeTensor> {
    if stream.is_empty() {
        return Err(Error::Data("cannot slice an empty event stream".into()));
    }
    if t < 1 {
        return Err(Error::Config("slice_events requires T >= 1".into()));
    }
    let (h, w) = (stream.height() as usize, stream.width() as usize);
    let t0 = stream.events().first().unwrap().timestamp_us;
    let t1 = stream.events().last().unwrap().timestamp_us;
    let span = (t1 - t0) as u64;
    let mut out = SpikeTensor::zeros(t, 2, h, w);
    for e in stream.events() {
        // Exact integer window index: floor(dt * T / span), last endpoint
        // folded into the final window.
        let dt = (e.timestamp_us - t0) as u64;
        let window = if span > 0 {
            ((dt * t as u64 / span) as usize).min(t - 1)
        } else {
            0
        };
        out.set(
            window,
            e.polarity as usize,
            e.y as usize,
            e.x as usize,
            true,
        );
    }
    Ok(out)
}
