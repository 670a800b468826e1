//! Lattice value noise used by the frost corruption and the synthetic
//! dataset backgrounds.

use crate::rng::Rng;

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Smooth value noise in `[0, 1]`: random values on a `cells x cells`
/// lattice, smoothstep-interpolated across an `h x w` grid.
pub fn value_noise(h: usize, w: usize, cells: usize, rng: &mut Rng) -> Vec<f64> {
    let cells = cells.max(1);
    let lattice: Vec<f64> = (0..(cells + 1) * (cells + 1))
        .map(|_| rng.next_uniform())
        .collect();
    let at = |i: usize, j: usize| lattice[i * (cells + 1) + j];
    let mut out = vec![0.0; h * w];
    for y in 0..h {
        let fy = if h > 1 {
            y as f64 / (h - 1) as f64
        } else {
            0.0
        } * cells as f64;
        let iy = (fy as usize).min(cells - 1);
        let ty = smoothstep(fy - iy as f64);
        for x in 0..w {
            let fx = if w > 1 {
                x as f64 / (w - 1) as f64
            } else {
                0.0
            } * cells as f64;
            let ix = (fx as usize).min(cells - 1);
            let tx = smoothstep(fx - ix as f64);
            let top = at(iy, ix) * (1.0 - tx) + at(iy, ix + 1) * tx;
            let bot = at(iy + 1, ix) * (1.0 - tx) + at(iy + 1, ix + 1) * tx;
            out[y * w + x] = top * (1.0 - ty) + bot * ty;
        }
    }
    out
}

/// Sum of `octaves` noise layers with doubling frequency and halving
/// amplitude, normalized back into `[0, 1]`.
pub fn fractal_noise(
    h: usize,
    w: usize,
    base_cells: usize,
    octaves: usize,
    rng: &mut Rng,
) -> Vec<f64> {
    let mut out = vec![0.0; h * w];
    let mut amp = 1.0;
    let mut total = 0.0;
    for o in 0..octaves.max(1) {
        let layer = value_noise(h, w, base_cells << o, rng);
        for (acc, v) in out.iter_mut().zip(&layer) {
            *acc += amp * v;
        }
        total += amp;
        amp *= 0.5;
    }
    for v in &mut out {
        *v /= total;
    }
    out
}
