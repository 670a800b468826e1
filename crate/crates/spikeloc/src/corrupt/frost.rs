//! Procedural frost textures: seeded multi-octave value noise shaped into
//! anisotropic crystal streaks, so no photographic assets are needed and
//! runs stay reproducible.

use crate::noise::fractal_noise;
use crate::rng::Rng;
use crate::tensor::DenseImage;

/// A single-channel crystal field in `[0, 1]` of size `h x w`.
pub fn frost_texture(h: usize, w: usize, rng: &mut Rng) -> Vec<f64> {
    // Oversampled noise field, rotated and stretched to form streaks.
    let angle = rng.next_range(0.0, std::f64::consts::PI);
    let stretch = rng.next_range(2.5, 4.0);
    let size = (h.max(w) * 2).max(16);
    let field = fractal_noise(size, size, 4, 3, rng);
    let (sin_a, cos_a) = angle.sin_cos();

    let mut out = vec![0.0; h * w];
    for y in 0..h {
        for x in 0..w {
            // Rotate, compress one axis, wrap into the oversampled field.
            let xf = x as f64;
            let yf = y as f64;
            let u = (xf * cos_a - yf * sin_a) / stretch;
            let v = xf * sin_a + yf * cos_a;
            let ui = (u.rem_euclid(size as f64 - 1.0)) as usize;
            let vi = (v.rem_euclid(size as f64 - 1.0)) as usize;
            let n = field[vi * size + ui];
            // Ridged profile: bright veins where the noise crosses 0.5.
            let ridge = 1.0 - (2.0 * n - 1.0).abs();
            let crystal = ((ridge - 0.55) * 2.8).clamp(0.0, 1.0);
            out[y * w + x] = crystal;
        }
    }
    out
}

/// `rho * img + omega * texture`, clamped to `[0, 1]`. The texture is
/// broadcast across channels.
pub fn frost_blend(img: &DenseImage, rho: f64, omega: f64, texture: &[f64]) -> DenseImage {
    let (c, h, w) = (img.channels(), img.height(), img.width());
    assert_eq!(texture.len(), h * w);
    let mut out = vec![0.0; c * h * w];
    for ci in 0..c {
        for i in 0..h * w {
            out[ci * h * w + i] = rho * img.data()[ci * h * w + i] + omega * texture[i];
        }
    }
    DenseImage::from_clamped(c, h, w, out)
}
