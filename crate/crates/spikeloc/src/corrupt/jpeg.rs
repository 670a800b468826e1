//! Luma-only JPEG degradation: 8x8 block DCT, quantization with the
//! standard luminance table scaled by the IJG quality factor, and inverse
//! DCT. Quantization is the lossy step; no entropy coding is performed.

use crate::tensor::DenseImage;

/// Standard JPEG luminance quantization table (zig-zag-free, row-major).
const BASE_LUMA_QUANT: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// IJG quality scaling of the base table; entries clamp to `1..=255`.
pub fn quant_table(quality: u8) -> [f64; 64] {
    let q = quality.clamp(1, 100) as i64;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0.0; 64];
    for (o, &b) in out.iter_mut().zip(BASE_LUMA_QUANT.iter()) {
        *o = ((b as i64 * scale + 50) / 100).clamp(1, 255) as f64;
    }
    out
}

/// Orthonormal 8x8 DCT basis: `M[u][x] = c(u)/2 * cos((2x+1)u*pi/16)`.
fn dct_matrix() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (u, row) in m.iter_mut().enumerate() {
        let c = if u == 0 { (0.5f64).sqrt() } else { 1.0 };
        for (x, v) in row.iter_mut().enumerate() {
            *v = c / 2.0 * ((2.0 * x as f64 + 1.0) * u as f64 * std::f64::consts::PI / 16.0).cos();
        }
    }
    m
}

/// Applies JPEG-style quantization loss to every channel of `img`.
pub fn degrade(img: &DenseImage, quality: u8) -> DenseImage {
    let (c, h, w) = (img.channels(), img.height(), img.width());
    let table = quant_table(quality);
    let m = dct_matrix();
    let bh = h.div_ceil(8);
    let bw = w.div_ceil(8);
    let mut out = vec![0.0; c * h * w];

    let mut block = [[0.0f64; 8]; 8];
    let mut coef = [[0.0f64; 8]; 8];
    let mut tmp = [[0.0f64; 8]; 8];
    for ci in 0..c {
        for by in 0..bh {
            for bx in 0..bw {
                // Gather the block with clamp-to-edge padding, level-shifted.
                for (dy, row) in block.iter_mut().enumerate() {
                    let y = (by * 8 + dy).min(h - 1);
                    for (dx, v) in row.iter_mut().enumerate() {
                        let x = (bx * 8 + dx).min(w - 1);
                        *v = img.get(ci, y, x) * 255.0 - 128.0;
                    }
                }
                // coef = M * block * M^T
                mat8(&m, &block, &mut tmp, false, false);
                mat8(&tmp, &m, &mut coef, false, true);
                // Quantize / dequantize.
                for u in 0..8 {
                    for v in 0..8 {
                        let t = table[u * 8 + v];
                        coef[u][v] = (coef[u][v] / t).round() * t;
                    }
                }
                // block = M^T * coef * M
                mat8(&m, &coef, &mut tmp, true, false);
                mat8(&tmp, &m, &mut block, false, false);
                for (dy, row) in block.iter().enumerate() {
                    let y = by * 8 + dy;
                    if y >= h {
                        continue;
                    }
                    for (dx, v) in row.iter().enumerate() {
                        let x = bx * 8 + dx;
                        if x >= w {
                            continue;
                        }
                        out[(ci * h + y) * w + x] = ((v + 128.0) / 255.0).clamp(0.0, 1.0);
                    }
                }
            }
        }
    }
    DenseImage::from_clamped(c, h, w, out)
}

/// `out = a(^T) * b(^T)` for 8x8 matrices.
fn mat8(
    a: &[[f64; 8]; 8],
    b: &[[f64; 8]; 8],
    out: &mut [[f64; 8]; 8],
    transpose_a: bool,
    transpose_b: bool,
) {
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for (k, b_row) in b.iter().enumerate() {
                let av = if transpose_a { a[k][i] } else { a[i][k] };
                let bv = if transpose_b { b[j][k] } else { b_row[j] };
                acc += av * bv;
            }
            out[i][j] = acc;
        }
    }
}
