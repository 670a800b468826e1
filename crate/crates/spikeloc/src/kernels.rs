//! Dense 2-D convolution, pooling, and linear kernels on flat f64 buffers.
//!
//! Forward convolution and the weight-gradient pass iterate the nonzero
//! input elements and scatter weighted contributions; spike activations are
//! sparse binary maps, so this is substantially cheaper than a dense gather.
//! All accumulation orders are fixed, so results are bitwise reproducible.

/// Geometry of a 2-D convolution with square kernel and zero padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvShape {
    pub c_in: usize,
    pub h_in: usize,
    pub w_in: usize,
    pub c_out: usize,
    pub k: usize,
    pub stride: usize,
    pub pad: usize,
}

impl ConvShape {
    pub fn h_out(&self) -> usize {
        (self.h_in + 2 * self.pad - self.k) / self.stride + 1
    }

    pub fn w_out(&self) -> usize {
        (self.w_in + 2 * self.pad - self.k) / self.stride + 1
    }

    pub fn in_len(&self) -> usize {
        self.c_in * self.h_in * self.w_in
    }

    pub fn out_len(&self) -> usize {
        self.c_out * self.h_out() * self.w_out()
    }

    pub fn weight_len(&self) -> usize {
        self.c_out * self.c_in * self.k * self.k
    }
}

/// Output positions (oy/ox, weight tap) reached by one input row/col index.
#[inline]
fn taps(
    i: usize,
    pad: usize,
    k: usize,
    stride: usize,
    out_extent: usize,
) -> impl Iterator<Item = (usize, usize)> {
    // oy * stride = i + pad - ky  =>  ky = i + pad - oy * stride
    (0..k).filter_map(move |kt| {
        let shifted = i + pad;
        if shifted < kt {
            return None;
        }
        let num = shifted - kt;
        if num % stride != 0 {
            return None;
        }
        let o = num / stride;
        if o < out_extent {
            Some((o, kt))
        } else {
            None
        }
    })
}

/// `out = conv(input) + bias`, weights laid out `[c_out][c_in][k][k]`.
pub fn conv2d_forward(
    shape: &ConvShape,
    input: &[f64],
    weights: &[f64],
    bias: &[f64],
    out: &mut [f64],
) {
    debug_assert_eq!(input.len(), shape.in_len());
    debug_assert_eq!(weights.len(), shape.weight_len());
    debug_assert_eq!(bias.len(), shape.c_out);
    debug_assert_eq!(out.len(), shape.out_len());

    let (oh, ow) = (shape.h_out(), shape.w_out());
    let plane_out = oh * ow;
    for co in 0..shape.c_out {
        out[co * plane_out..(co + 1) * plane_out].fill(bias[co]);
    }

    let nonzeros = collect_nonzeros(input);
    let ksq = shape.k * shape.k;
    for co in 0..shape.c_out {
        let w_co = &weights[co * shape.c_in * ksq..(co + 1) * shape.c_in * ksq];
        let out_co = &mut out[co * plane_out..(co + 1) * plane_out];
        for &(idx, v) in &nonzeros {
            let ci = idx / (shape.h_in * shape.w_in);
            let rem = idx % (shape.h_in * shape.w_in);
            let iy = rem / shape.w_in;
            let ix = rem % shape.w_in;
            let w_ci = &w_co[ci * ksq..(ci + 1) * ksq];
            for (oy, ky) in taps(iy, shape.pad, shape.k, shape.stride, oh) {
                for (ox, kx) in taps(ix, shape.pad, shape.k, shape.stride, ow) {
                    out_co[oy * ow + ox] += w_ci[ky * shape.k + kx] * v;
                }
            }
        }
    }
}

/// Gradient with respect to the convolution input.
pub fn conv2d_backward_input(
    shape: &ConvShape,
    grad_out: &[f64],
    weights: &[f64],
    grad_in: &mut [f64],
) {
    debug_assert_eq!(grad_out.len(), shape.out_len());
    debug_assert_eq!(grad_in.len(), shape.in_len());
    grad_in.fill(0.0);

    let (oh, ow) = (shape.h_out(), shape.w_out());
    let ksq = shape.k * shape.k;
    for co in 0..shape.c_out {
        let go_co = &grad_out[co * oh * ow..(co + 1) * oh * ow];
        let w_co = &weights[co * shape.c_in * ksq..(co + 1) * shape.c_in * ksq];
        for oy in 0..oh {
            for ox in 0..ow {
                let g = go_co[oy * ow + ox];
                if g == 0.0 {
                    continue;
                }
                let base_y = oy * shape.stride;
                let base_x = ox * shape.stride;
                for ci in 0..shape.c_in {
                    let w_ci = &w_co[ci * ksq..(ci + 1) * ksq];
                    let gin_ci = &mut grad_in
                        [ci * shape.h_in * shape.w_in..(ci + 1) * shape.h_in * shape.w_in];
                    for ky in 0..shape.k {
                        let iy = base_y + ky;
                        if iy < shape.pad || iy - shape.pad >= shape.h_in {
                            continue;
                        }
                        let row = (iy - shape.pad) * shape.w_in;
                        for kx in 0..shape.k {
                            let ix = base_x + kx;
                            if ix < shape.pad || ix - shape.pad >= shape.w_in {
                                continue;
                            }
                            gin_ci[row + (ix - shape.pad)] += w_ci[ky * shape.k + kx] * g;
                        }
                    }
                }
            }
        }
    }
}

/// Accumulates weight and bias gradients (does not clear them first).
pub fn conv2d_backward_params(
    shape: &ConvShape,
    input: &[f64],
    grad_out: &[f64],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
) {
    debug_assert_eq!(grad_w.len(), shape.weight_len());
    debug_assert_eq!(grad_b.len(), shape.c_out);

    let (oh, ow) = (shape.h_out(), shape.w_out());
    let plane_out = oh * ow;
    let ksq = shape.k * shape.k;
    let nonzeros = collect_nonzeros(input);

    for co in 0..shape.c_out {
        let go_co = &grad_out[co * plane_out..(co + 1) * plane_out];
        grad_b[co] += go_co.iter().sum::<f64>();
        let gw_co = &mut grad_w[co * shape.c_in * ksq..(co + 1) * shape.c_in * ksq];
        for &(idx, v) in &nonzeros {
            let ci = idx / (shape.h_in * shape.w_in);
            let rem = idx % (shape.h_in * shape.w_in);
            let iy = rem / shape.w_in;
            let ix = rem % shape.w_in;
            let gw_ci = &mut gw_co[ci * ksq..(ci + 1) * ksq];
            for (oy, ky) in taps(iy, shape.pad, shape.k, shape.stride, oh) {
                for (ox, kx) in taps(ix, shape.pad, shape.k, shape.stride, ow) {
                    gw_ci[ky * shape.k + kx] += go_co[oy * ow + ox] * v;
                }
            }
        }
    }
}

fn collect_nonzeros(input: &[f64]) -> Vec<(usize, f64)> {
    input
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| if v != 0.0 { Some((i, v)) } else { None })
        .collect()
}

/// 2x2 max pooling with stride 2. Ties resolve to the first element in
/// (dy, dx) scan order; winner indices are recorded for the backward pass.
pub fn maxpool2_forward(
    c: usize,
    h: usize,
    w: usize,
    input: &[f64],
    out: &mut [f64],
    argmax: &mut [u32],
) {
    let (oh, ow) = (h / 2, w / 2);
    debug_assert_eq!(out.len(), c * oh * ow);
    debug_assert_eq!(argmax.len(), c * oh * ow);
    for ci in 0..c {
        let plane = &input[ci * h * w..(ci + 1) * h * w];
        for oy in 0..oh {
            for ox in 0..ow {
                let mut best = f64::NEG_INFINITY;
                let mut best_idx = 0usize;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let iy = oy * 2 + dy;
                        let ix = ox * 2 + dx;
                        let v = plane[iy * w + ix];
                        if v > best {
                            best = v;
                            best_idx = iy * w + ix;
                        }
                    }
                }
                let o = (ci * oh + oy) * ow + ox;
                out[o] = best;
                argmax[o] = (ci * h * w + best_idx) as u32;
            }
        }
    }
}

pub fn maxpool2_backward(grad_out: &[f64], argmax: &[u32], grad_in: &mut [f64]) {
    grad_in.fill(0.0);
    for (g, &idx) in grad_out.iter().zip(argmax) {
        grad_in[idx as usize] += *g;
    }
}

/// `out[j] = bias[j] + sum_i weights[j][i] * input[i]`.
pub fn linear_forward(
    in_dim: usize,
    out_dim: usize,
    input: &[f64],
    weights: &[f64],
    bias: &[f64],
    out: &mut [f64],
) {
    debug_assert_eq!(input.len(), in_dim);
    debug_assert_eq!(weights.len(), in_dim * out_dim);
    debug_assert_eq!(out.len(), out_dim);
    for j in 0..out_dim {
        let row = &weights[j * in_dim..(j + 1) * in_dim];
        let mut acc = bias[j];
        for (wv, xv) in row.iter().zip(input) {
            acc += wv * xv;
        }
        out[j] = acc;
    }
}

pub fn linear_backward_input(
    in_dim: usize,
    out_dim: usize,
    grad_out: &[f64],
    weights: &[f64],
    grad_in: &mut [f64],
) {
    grad_in.fill(0.0);
    for j in 0..out_dim {
        let g = grad_out[j];
        if g == 0.0 {
            continue;
        }
        let row = &weights[j * in_dim..(j + 1) * in_dim];
        for (gi, wv) in grad_in.iter_mut().zip(row) {
            *gi += wv * g;
        }
    }
}

pub fn linear_backward_params(
    in_dim: usize,
    out_dim: usize,
    input: &[f64],
    grad_out: &[f64],
    grad_w: &mut [f64],
    grad_b: &mut [f64],
) {
    for j in 0..out_dim {
        let g = grad_out[j];
        grad_b[j] += g;
        if g == 0.0 {
            continue;
        }
        let row = &mut grad_w[j * in_dim..(j + 1) * in_dim];
        for (gw, xv) in row.iter_mut().zip(input) {
            *gw += xv * g;
        }
    }
}
