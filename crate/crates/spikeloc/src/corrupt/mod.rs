//! Corruption suite: five static-image corruptions and two event-stream
//! corruptions, each parameterized by a severity level from 1 (weakest)
//! to 5 (strongest).

pub mod frost;
pub mod jpeg;

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::tensor::{DenseImage, SpikeTensor};

/// Gaussian noise standard deviation per severity.
pub const GAUSSIAN_SIGMA: [f64; 5] = [0.08, 0.12, 0.18, 0.26, 0.38];
/// Fraction of pixels broken by salt & pepper noise per severity.
pub const SALT_PEPPER_FRACTION: [f64; 5] = [0.03, 0.06, 0.09, 0.17, 0.27];
/// JPEG quality percentage per severity.
pub const JPEG_QUALITY: [u8; 5] = [25, 18, 15, 10, 7];
/// Defocus disk radius in pixels per severity.
pub const DEFOCUS_RADIUS: [usize; 5] = [3, 4, 6, 8, 10];
/// Frost blend intensities (rho, omega) per severity.
pub const FROST_RHO_OMEGA: [(f64, f64); 5] =
    [(1.0, 0.4), (0.8, 0.6), (0.7, 0.7), (0.65, 0.7), (0.6, 0.75)];
/// Fraction of pixel coordinates turned into hot pixels per severity.
pub const HOT_PIXEL_FRACTION: [f64; 5] = [0.03, 0.06, 0.09, 0.17, 0.27];
/// Poisson rate of spurious background events per severity.
pub const BACKGROUND_ACTIVITY_LAMBDA: [f64; 5] = [0.08, 0.12, 0.18, 0.26, 0.38];

/// Validated severity level in `1..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Severity(u8);

impl Severity {
    pub fn new(level: u8) -> Result<Self> {
        if (1..=5).contains(&level) {
            Ok(Severity(level))
        } else {
            Err(Error::Config(format!(
                "severity must be in 1..=5, got {level}"
            )))
        }
    }

    pub fn level(&self) -> u8 {
        self.0
    }

    pub fn index(&self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn all() -> [Severity; 5] {
        [
            Severity(1),
            Severity(2),
            Severity(3),
            Severity(4),
            Severity(5),
        ]
    }
}

/// Static-image corruption family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaticCorruption {
    Gaussian,
    SaltPepper,
    Jpeg,
    Defocus,
    Frost,
}

impl StaticCorruption {
    pub const ALL: [StaticCorruption; 5] = [
        StaticCorruption::Gaussian,
        StaticCorruption::SaltPepper,
        StaticCorruption::Jpeg,
        StaticCorruption::Defocus,
        StaticCorruption::Frost,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StaticCorruption::Gaussian => "gaussian",
            StaticCorruption::SaltPepper => "salt_pepper",
            StaticCorruption::Jpeg => "jpeg",
            StaticCorruption::Defocus => "defocus",
            StaticCorruption::Frost => "frost",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }

    pub fn apply(&self, img: &DenseImage, severity: Severity, rng: &mut Rng) -> DenseImage {
        match self {
            StaticCorruption::Gaussian => corrupt_gaussian(img, severity, rng),
            StaticCorruption::SaltPepper => corrupt_salt_pepper(img, severity, rng),
            StaticCorruption::Jpeg => corrupt_jpeg(img, severity),
            StaticCorruption::Defocus => corrupt_defocus(img, severity),
            StaticCorruption::Frost => corrupt_frost(img, severity, rng),
        }
    }
}

/// Event-stream corruption family (applied to the sliced spike tensor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventCorruption {
    HotPixels,
    BackgroundActivity,
}

impl EventCorruption {
    pub const ALL: [EventCorruption; 2] = [
        EventCorruption::HotPixels,
        EventCorruption::BackgroundActivity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EventCorruption::HotPixels => "hot_pixels",
            EventCorruption::BackgroundActivity => "background_activity",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }

    pub fn apply(&self, x: &SpikeTensor, severity: Severity, rng: &mut Rng) -> SpikeTensor {
        match self {
            EventCorruption::HotPixels => corrupt_hot_pixels(x, severity, rng),
            EventCorruption::BackgroundActivity => corrupt_background_activity(x, severity, rng),
        }
    }
}

/// Additive pixel noise `N(0, sigma)`, clamped to `[0, 1]`.
pub fn corrupt_gaussian(img: &DenseImage, severity: Severity, rng: &mut Rng) -> DenseImage {
    let sigma = GAUSSIAN_SIGMA[severity.index()];
    let data = img
        .data()
        .iter()
        .map(|&v| v + sigma * rng.next_normal())
        .collect();
    DenseImage::from_clamped(img.channels(), img.height(), img.width(), data)
}

/// Breaks exactly `round(sp * H * W)` pixel coordinates, each going fully
/// black or fully white with a fair coin, across all channels.
pub fn corrupt_salt_pepper(img: &DenseImage, severity: Severity, rng: &mut Rng) -> DenseImage {
    let sp = SALT_PEPPER_FRACTION[severity.index()];
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let count = (sp * (h * w) as f64).round() as usize;
    let mut data = img.data().to_vec();
    for idx in rng.sample_indices(h * w, count) {
        let value = if rng.next_bool(0.5) { 1.0 } else { 0.0 };
        for ci in 0..c {
            data[ci * h * w + idx] = value;
        }
    }
    DenseImage::new(c, h, w, data).expect("values stay in range")
}

/// Lossy JPEG-style quantization at the severity's quality percentage.
pub fn corrupt_jpeg(img: &DenseImage, severity: Severity) -> DenseImage {
    jpeg::degrade(img, JPEG_QUALITY[severity.index()])
}

/// Convolution with a normalized aliased disk kernel (clamp-to-edge).
pub fn corrupt_defocus(img: &DenseImage, severity: Severity) -> DenseImage {
    let r = DEFOCUS_RADIUS[severity.index()];
    let kernel = disk_kernel(r);
    let side = 2 * r + 1;
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let mut out = vec![0.0; c * h * w];
    for ci in 0..c {
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for ky in 0..side {
                    let iy = (y + ky).saturating_sub(r).min(h - 1);
                    for kx in 0..side {
                        let kv = kernel[ky * side + kx];
                        if kv == 0.0 {
                            continue;
                        }
                        let ix = (x + kx).saturating_sub(r).min(w - 1);
                        acc += kv * img.get(ci, iy, ix);
                    }
                }
                out[(ci * h + y) * w + x] = acc;
            }
        }
    }
    DenseImage::from_clamped(c, h, w, out)
}

/// Normalized disk: a cell is inside when its center distance is <= r.
pub fn disk_kernel(r: usize) -> Vec<f64> {
    let side = 2 * r + 1;
    let mut k = vec![0.0; side * side];
    let mut total = 0.0;
    for y in 0..side {
        for x in 0..side {
            let dy = y as f64 - r as f64;
            let dx = x as f64 - r as f64;
            if (dy * dy + dx * dx).sqrt() <= r as f64 {
                k[y * side + x] = 1.0;
                total += 1.0;
            }
        }
    }
    for v in &mut k {
        *v /= total;
    }
    k
}

/// Blends a fresh procedural crystal field over the image:
/// `rho * img + omega * frost`.
pub fn corrupt_frost(img: &DenseImage, severity: Severity, rng: &mut Rng) -> DenseImage {
    let (rho, omega) = FROST_RHO_OMEGA[severity.index()];
    let texture = frost::frost_texture(img.height(), img.width(), rng);
    frost::frost_blend(img, rho, omega, &texture)
}

/// Fixes `round(p * H * W)` random pixel coordinates to 1 in every
/// time-step and every channel.
pub fn corrupt_hot_pixels(x: &SpikeTensor, severity: Severity, rng: &mut Rng) -> SpikeTensor {
    let p = HOT_PIXEL_FRACTION[severity.index()];
    let (t, c, h, w) = x.dims();
    let count = (p * (h * w) as f64).round() as usize;
    let mut out = x.clone();
    for idx in rng.sample_indices(h * w, count) {
        let (y, xx) = (idx / w, idx % w);
        for ti in 0..t {
            for ci in 0..c {
                out.set(ti, ci, y, xx, true);
            }
        }
    }
    out
}

/// Spurious background events: per time-step and element, a Poisson draw
/// with rate lambda fires when at least one event occurs; OR-ed onto the
/// input so existing spikes are never erased.
pub fn corrupt_background_activity(
    x: &SpikeTensor,
    severity: Severity,
    rng: &mut Rng,
) -> SpikeTensor {
    let lambda = BACKGROUND_ACTIVITY_LAMBDA[severity.index()];
    let mut out = x.clone();
    for i in 0..x.len() {
        if rng.next_poisson(lambda) >= 1 {
            out.set_linear(i, true);
        }
    }
    out
}
