//! Dense and binary tensor containers plus the bit-exact SPKT file format.
//!
//! `SpikeTensor` packs one bit per element, MSB-first within each byte,
//! elements ordered T -> C -> H -> W row-major. That layout is the single
//! source of truth for golden-file tests and the on-disk format.

use crate::error::{Error, Result};

const SPKT_MAGIC: &[u8; 4] = b"SPKT";
const SPKT_VERSION: u8 = 1;

/// Real-valued image, values normalized to `[0, 1]`, row-major C -> H -> W.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseImage {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl DenseImage {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != channels * height * width {
            return Err(Error::Shape(format!(
                "image data length {} != {}x{}x{}",
                data.len(),
                channels,
                height,
                width
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(Error::Data(
                "image values must be finite and in [0,1]".into(),
            ));
        }
        Ok(DenseImage {
            channels,
            height,
            width,
            data,
        })
    }

    /// Single-channel (grayscale) image.
    pub fn gray(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        DenseImage::new(1, height, width, data)
    }

    pub fn constant(channels: usize, height: usize, width: usize, value: f64) -> Result<Self> {
        DenseImage::new(
            channels,
            height,
            width,
            vec![value; channels * height * width],
        )
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    /// Rebuild from possibly out-of-range values by clamping to `[0, 1]`.
    pub fn from_clamped(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Self {
        let data = data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        DenseImage {
            channels,
            height,
            width,
            data,
        }
    }
}

/// Binary spike train of shape T x C x H x W, bit-packed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTensor {
    t: usize,
    c: usize,
    h: usize,
    w: usize,
    bits: Vec<u8>,
}

impl SpikeTensor {
    pub fn zeros(t: usize, c: usize, h: usize, w: usize) -> Self {
        let n = t * c * h * w;
        SpikeTensor {
            t,
            c,
            h,
            w,
            bits: vec![0u8; n.div_ceil(8)],
        }
    }

    /// Build from a predicate over (t, c, y, x).
    pub fn from_fn<F: FnMut(usize, usize, usize, usize) -> bool>(
        t: usize,
        c: usize,
        h: usize,
        w: usize,
        mut f: F,
    ) -> Self {
        let mut out = SpikeTensor::zeros(t, c, h, w);
        for ti in 0..t {
            for ci in 0..c {
                for y in 0..h {
                    for x in 0..w {
                        if f(ti, ci, y, x) {
                            out.set(ti, ci, y, x, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Build from `{0,1}`-valued reals; asserts binarity in debug builds.
    pub fn from_values(t: usize, c: usize, h: usize, w: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), t * c * h * w);
        debug_assert!(
            values.iter().all(|&v| v == 0.0 || v == 1.0),
            "spike tensor values must be binary"
        );
        let mut out = SpikeTensor::zeros(t, c, h, w);
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 {
                out.set_linear(i, true);
            }
        }
        out
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.t, self.c, self.h, self.w)
    }

    pub fn timesteps(&self) -> usize {
        self.t
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.t * self.c * self.h * self.w
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    fn linear(&self, t: usize, c: usize, y: usize, x: usize) -> usize {
        debug_assert!(t < self.t && c < self.c && y < self.h && x < self.w);
        ((t * self.c + c) * self.h + y) * self.w + x
    }

    #[inline]
    pub fn get(&self, t: usize, c: usize, y: usize, x: usize) -> bool {
        self.get_linear(self.linear(t, c, y, x))
    }

    #[inline]
    pub fn get_linear(&self, i: usize) -> bool {
        (self.bits[i / 8] >> (7 - (i % 8))) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, t: usize, c: usize, y: usize, x: usize, v: bool) {
        let i = self.linear(t, c, y, x);
        self.set_linear(i, v);
    }

    #[inline]
    pub fn set_linear(&mut self, i: usize, v: bool) {
        let mask = 1u8 << (7 - (i % 8));
        if v {
            self.bits[i / 8] |= mask;
        } else {
            self.bits[i / 8] &= !mask;
        }
    }

    /// Total number of set bits.
    pub fn count_ones(&self) -> u64 {
        self.bits.iter().map(|b| b.count_ones() as u64).sum()
    }

    /// Mean spike rate over all elements.
    pub fn mean_rate(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.count_ones() as f64 / self.len() as f64
        }
    }

    /// One time-step as an f64 frame (C x H x W), 0.0 / 1.0 values.
    pub fn frame_values(&self, t: usize) -> Vec<f64> {
        let n = self.c * self.h * self.w;
        let base = t * n;
        (0..n)
            .map(|i| if self.get_linear(base + i) { 1.0 } else { 0.0 })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 1 + 16 + self.bits.len());
        out.extend_from_slice(SPKT_MAGIC);
        out.push(SPKT_VERSION);
        for dim in [self.t, self.c, self.h, self.w] {
            out.extend_from_slice(&(dim as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.bits);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 21 {
            return Err(Error::Data("SPKT: truncated header".into()));
        }
        if &bytes[0..4] != SPKT_MAGIC {
            return Err(Error::Data("SPKT: bad magic".into()));
        }
        if bytes[4] != SPKT_VERSION {
            return Err(Error::Data(format!(
                "SPKT: unsupported version {}",
                bytes[4]
            )));
        }
        let mut dims = [0usize; 4];
        for (i, d) in dims.iter_mut().enumerate() {
            let off = 5 + 4 * i;
            *d = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap()) as usize;
        }
        let [t, c, h, w] = dims;
        let n = t
            .checked_mul(c)
            .and_then(|v| v.checked_mul(h))
            .and_then(|v| v.checked_mul(w))
            .ok_or_else(|| Error::Data("SPKT: dimension overflow".into()))?;
        let payload = &bytes[21..];
        if payload.len() != n.div_ceil(8) {
            return Err(Error::Data(format!(
                "SPKT: payload length {} != expected {}",
                payload.len(),
                n.div_ceil(8)
            )));
        }
        Ok(SpikeTensor {
            t,
            c,
            h,
            w,
            bits: payload.to_vec(),
        })
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        SpikeTensor::from_bytes(&bytes)
    }
}

/// Integer-valued activation tensor for internal layer outputs, where
/// residual addition may exceed 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationTensor {
    pub t: usize,
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub values: Vec<u32>,
}

impl ActivationTensor {
    pub fn new(t: usize, c: usize, h: usize, w: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != t * c * h * w {
            return Err(Error::Shape("activation tensor length mismatch".into()));
        }
        Ok(ActivationTensor { t, c, h, w, values })
    }

    /// Sum of all activation values (spike count with multiplicity).
    pub fn total(&self) -> u64 {
        self.values.iter().map(|&v| v as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
