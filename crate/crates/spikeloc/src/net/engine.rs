//! Layer-major forward pass with taped state and reverse-mode BPTT.
//!
//! The network is feedforward across layers; the only recurrence is each IF
//! layer's membrane over time, so every layer maps an input time series to
//! an output time series. The backward pass walks layers in reverse and
//! time backwards inside each IF scan.
//!
//! Two execution modes share one code path:
//! - `Spiking`: Heaviside forward; backward substitutes the arctan
//!   surrogate derivative at every threshold and treats the to-zero reset
//!   mask as detached.
//! - `Soft`: the Heaviside is replaced by the smooth sigmoid itself, making
//!   the whole network differentiable; backward is the exact chain rule.
//!   This is the path finite-difference checks validate.

use super::{Model, Rt, Shape};
use crate::error::{Error, Result};
use crate::neuron::{surrogate_grad, surrogate_value, IfConfig, ResetMode, SurrogateConfig};
use crate::tensor::{ActivationTensor, DenseImage, SpikeTensor};

type Frames = Vec<Vec<f64>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Spiking,
    Soft,
}

/// Network input: a spike train, or a dense image for encoder-fronted nets.
#[derive(Debug, Clone, Copy)]
pub enum ModelInput<'a> {
    Spikes(&'a SpikeTensor),
    Image(&'a DenseImage),
}

/// Per-layer spiking output captured during a forward pass.
#[derive(Debug, Clone)]
pub struct LayerActivations {
    pub name: String,
    pub tensor: ActivationTensor,
}

/// Forward result: raw accumulator potentials plus activation maps.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub raw: [f64; 4],
    pub activations: Vec<LayerActivations>,
}

/// Recorded forward state, consumed by [`Model::backward`].
#[derive(Debug, Clone)]
pub struct Tape {
    mode: ExecMode,
    t_steps: usize,
    recs: Vec<TapeRec>,
    pub raw: [f64; 4],
}

#[derive(Debug, Clone)]
enum TapeRec {
    Conv {
        xin: Frames,
    },
    If {
        u: Frames,
    },
    Sew {
        xin: Frames,
        u1: Frames,
        s1: Frames,
        u2: Frames,
    },
    Pool {
        argmax: Vec<Vec<u32>>,
    },
    Flatten,
    Linear {
        xin: Frames,
    },
    Acc {
        xsum: Vec<f64>,
    },
    Encoder {
        img: Vec<f64>,
        u: Vec<f64>,
    },
    Skip,
}

/// Per-parameter gradients, parallel to `Model::params`.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub by_param: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_of(model: &Model) -> Self {
        Gradients {
            by_param: model.params.iter().map(|p| p.zeros_like()).collect(),
        }
    }

    pub fn add(&mut self, other: &Gradients) {
        for (a, b) in self.by_param.iter_mut().zip(&other.by_param) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for p in &mut self.by_param {
            for v in p {
                *v *= factor;
            }
        }
    }

    /// Mutable access to two distinct parameter slots (weight and bias).
    fn pair_mut(&mut self, i: usize, j: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
        debug_assert_ne!(i, j);
        if i < j {
            let (a, b) = self.by_param.split_at_mut(j);
            (&mut a[i], &mut b[0])
        } else {
            let (a, b) = self.by_param.split_at_mut(i);
            (&mut b[0], &mut a[j])
        }
    }
}

fn shift(frames: &Frames) -> Frames {
    let n = frames[0].len();
    let mut out = Vec::with_capacity(frames.len());
    out.push(vec![0.0; n]);
    out.extend(frames[..frames.len() - 1].iter().cloned());
    out
}

fn unshift_grad(grads: Frames) -> Frames {
    let n = grads[0].len();
    let mut out: Frames = grads.into_iter().skip(1).collect();
    out.push(vec![0.0; n]);
    out
}

fn if_scan(
    frames: &Frames,
    cfg: &IfConfig,
    mode: ExecMode,
    scfg: &SurrogateConfig,
) -> (Frames, Frames) {
    let n = frames[0].len();
    let mut v = vec![0.0; n];
    let mut s_seq = Vec::with_capacity(frames.len());
    let mut u_seq = Vec::with_capacity(frames.len());
    for f in frames {
        let mut u_t = vec![0.0; n];
        let mut s_t = vec![0.0; n];
        for i in 0..n {
            let u = v[i] + f[i];
            u_t[i] = u;
            if cfg.infinite_threshold {
                v[i] = u;
                continue;
            }
            let s = match mode {
                ExecMode::Spiking => {
                    if u >= cfg.threshold {
                        1.0
                    } else {
                        0.0
                    }
                }
                ExecMode::Soft => surrogate_value(u - cfg.threshold, scfg),
            };
            v[i] = match cfg.reset_mode {
                ResetMode::ToZero => u * (1.0 - s),
                ResetMode::SubtractTheta => u - cfg.threshold * s,
            };
            s_t[i] = s;
        }
        u_seq.push(u_t);
        s_seq.push(s_t);
    }
    (s_seq, u_seq)
}

fn if_backscan(
    grad_s: &Frames,
    u_seq: &Frames,
    cfg: &IfConfig,
    mode: ExecMode,
    scfg: &SurrogateConfig,
) -> Frames {
    let t_steps = grad_s.len();
    let n = grad_s[0].len();
    let mut dv = vec![0.0; n];
    let mut grad_in = vec![vec![0.0; n]; t_steps];
    for t in (0..t_steps).rev() {
        for i in 0..n {
            let du = if cfg.infinite_threshold {
                // V = U identity; the (all-zero) spike output carries no path.
                dv[i]
            } else {
                let u = u_seq[t][i];
                let x = u - cfg.threshold;
                let g = surrogate_grad(x, scfg);
                let dv_du = match (mode, cfg.reset_mode) {
                    (ExecMode::Spiking, ResetMode::ToZero) => {
                        // Reset mask detached: d(U * (1 - s))/dU ~ (1 - s).
                        if u >= cfg.threshold {
                            0.0
                        } else {
                            1.0
                        }
                    }
                    (ExecMode::Soft, ResetMode::ToZero) => {
                        let s = surrogate_value(x, scfg);
                        (1.0 - s) - u * g
                    }
                    (_, ResetMode::SubtractTheta) => 1.0 - cfg.threshold * g,
                };
                grad_s[t][i] * g + dv[i] * dv_du
            };
            grad_in[t][i] = du;
            dv[i] = du;
        }
    }
    grad_in
}

impl Model {
    /// Spiking forward pass returning raw potentials and activation maps.
    pub fn forward(&self, input: ModelInput<'_>, scale: Option<&[f64]>) -> Result<RunOutput> {
        let (raw, _, acts) = self.run(input, scale, ExecMode::Spiking, false, true)?;
        Ok(RunOutput {
            raw,
            activations: acts,
        })
    }

    /// Forward pass that records a tape for BPTT.
    pub fn forward_traced(
        &self,
        input: ModelInput<'_>,
        scale: Option<&[f64]>,
        mode: ExecMode,
    ) -> Result<([f64; 4], Tape)> {
        let (raw, tape, _) = self.run(input, scale, mode, true, false)?;
        Ok((raw, tape.expect("tape requested")))
    }

    fn input_frames(
        &self,
        input: ModelInput<'_>,
        scale: Option<&[f64]>,
    ) -> Result<(Frames, Option<Vec<f64>>)> {
        let (c, h, w) = self.spec.input;
        match input {
            ModelInput::Spikes(x) => {
                if self.spec.image_encoder {
                    return Err(Error::Config(
                        "image-encoder network expects a dense image input".into(),
                    ));
                }
                if x.dims() != (self.spec.t, c, h, w) {
                    return Err(Error::Shape(format!(
                        "input dims {:?} do not match network {:?}",
                        x.dims(),
                        (self.spec.t, c, h, w)
                    )));
                }
                if let Some(s) = scale {
                    if s.len() != self.spec.t {
                        return Err(Error::Shape("input scale length must equal T".into()));
                    }
                }
                let mut frames: Frames = (0..self.spec.t).map(|t| x.frame_values(t)).collect();
                if let Some(s) = scale {
                    for (t, f) in frames.iter_mut().enumerate() {
                        for v in f.iter_mut() {
                            *v *= s[t];
                        }
                    }
                }
                Ok((frames, None))
            }
            ModelInput::Image(img) => {
                if !self.spec.image_encoder {
                    return Err(Error::Config(
                        "network without image encoder expects spike input".into(),
                    ));
                }
                if (img.channels(), img.height(), img.width()) != (c, h, w) {
                    return Err(Error::Shape("image dims do not match network input".into()));
                }
                if scale.is_some() {
                    return Err(Error::Config(
                        "input scale does not apply to image-encoder networks".into(),
                    ));
                }
                Ok((Vec::new(), Some(img.data().to_vec())))
            }
        }
    }

    fn run(
        &self,
        input: ModelInput<'_>,
        scale: Option<&[f64]>,
        mode: ExecMode,
        record: bool,
        collect_acts: bool,
    ) -> Result<([f64; 4], Option<Tape>, Vec<LayerActivations>)> {
        let scfg = SurrogateConfig::default();
        let t_steps = self.spec.t;
        let (frames0, image) = self.input_frames(input, scale)?;
        let mut recs: Vec<TapeRec> = Vec::with_capacity(self.rt.len());
        let mut acts: Vec<LayerActivations> = Vec::new();
        let collect_acts = collect_acts && matches!(mode, ExecMode::Spiking);

        let mut start_layer = 0usize;
        let mut frames: Frames;
        if let Some(img) = image {
            // Single-step encoder: conv once, IF once, repeat spikes over T.
            let (Rt::Conv { shape, w, b }, Rt::If { cfg }) = (&self.rt[0], &self.rt[1]) else {
                unreachable!("validated by infer_shapes");
            };
            let mut drive = vec![0.0; shape.out_len()];
            crate::kernels::conv2d_forward(
                shape,
                &img,
                &self.params[*w].values,
                &self.params[*b].values,
                &mut drive,
            );
            let s: Vec<f64> = drive
                .iter()
                .map(|&u| {
                    if cfg.infinite_threshold {
                        0.0
                    } else {
                        match mode {
                            ExecMode::Spiking => {
                                if u >= cfg.threshold {
                                    1.0
                                } else {
                                    0.0
                                }
                            }
                            ExecMode::Soft => surrogate_value(u - cfg.threshold, &scfg),
                        }
                    }
                })
                .collect();
            if record {
                recs.push(TapeRec::Encoder { img, u: drive });
                recs.push(TapeRec::Skip);
            }
            if collect_acts {
                acts.push(LayerActivations {
                    name: "l1".into(),
                    tensor: frames_to_activation(&vec![s.clone(); t_steps], self.shapes[1]),
                });
            }
            frames = vec![s; t_steps];
            start_layer = 2;
        } else {
            if collect_acts {
                if let ModelInput::Spikes(x) = input {
                    acts.push(LayerActivations {
                        name: "input".into(),
                        tensor: spike_to_activation(x),
                    });
                }
            }
            frames = frames0;
        }

        let mut raw = [0.0f64; 4];
        for (li, rt) in self.rt.iter().enumerate().skip(start_layer) {
            match rt {
                Rt::Conv { shape, w, b } => {
                    let xin = if self.spec.delayed_input {
                        shift(&frames)
                    } else {
                        frames
                    };
                    let mut out = Vec::with_capacity(t_steps);
                    for f in &xin {
                        let mut o = vec![0.0; shape.out_len()];
                        crate::kernels::conv2d_forward(
                            shape,
                            f,
                            &self.params[*w].values,
                            &self.params[*b].values,
                            &mut o,
                        );
                        out.push(o);
                    }
                    if record {
                        recs.push(TapeRec::Conv { xin });
                    }
                    frames = out;
                }
                Rt::If { cfg } => {
                    let (s_seq, u_seq) = if_scan(&frames, cfg, mode, &scfg);
                    if record {
                        recs.push(TapeRec::If { u: u_seq });
                    }
                    if collect_acts {
                        acts.push(LayerActivations {
                            name: format!("l{li}"),
                            tensor: frames_to_activation(&s_seq, self.shapes[li]),
                        });
                    }
                    frames = s_seq;
                }
                Rt::Sew {
                    shape,
                    w1,
                    b1,
                    w2,
                    b2,
                    cfg,
                } => {
                    let xin = frames.clone();
                    let branch_in = if self.spec.delayed_input {
                        shift(&frames)
                    } else {
                        frames
                    };
                    let mut d1 = Vec::with_capacity(t_steps);
                    for f in &branch_in {
                        let mut o = vec![0.0; shape.out_len()];
                        crate::kernels::conv2d_forward(
                            shape,
                            f,
                            &self.params[*w1].values,
                            &self.params[*b1].values,
                            &mut o,
                        );
                        d1.push(o);
                    }
                    let (s1, u1) = if_scan(&d1, cfg, mode, &scfg);
                    let conv2_in = if self.spec.delayed_input {
                        shift(&s1)
                    } else {
                        s1.clone()
                    };
                    let mut d2 = Vec::with_capacity(t_steps);
                    for f in &conv2_in {
                        let mut o = vec![0.0; shape.out_len()];
                        crate::kernels::conv2d_forward(
                            shape,
                            f,
                            &self.params[*w2].values,
                            &self.params[*b2].values,
                            &mut o,
                        );
                        d2.push(o);
                    }
                    let (s2, u2) = if_scan(&d2, cfg, mode, &scfg);
                    // ADD element-wise residual connection.
                    let out: Frames = s2
                        .iter()
                        .zip(&xin)
                        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                        .collect();
                    if collect_acts {
                        acts.push(LayerActivations {
                            name: format!("l{li}.s1"),
                            tensor: frames_to_activation(&s1, self.shapes[li]),
                        });
                        acts.push(LayerActivations {
                            name: format!("l{li}"),
                            tensor: frames_to_activation(&out, self.shapes[li]),
                        });
                    }
                    if record {
                        recs.push(TapeRec::Sew { xin, u1, s1, u2 });
                    }
                    frames = out;
                }
                Rt::Pool { c, h, w } => {
                    let (oh, ow) = (h / 2, w / 2);
                    let mut out = Vec::with_capacity(t_steps);
                    let mut arg = Vec::with_capacity(t_steps);
                    for f in &frames {
                        let mut o = vec![0.0; c * oh * ow];
                        let mut a = vec![0u32; c * oh * ow];
                        crate::kernels::maxpool2_forward(*c, *h, *w, f, &mut o, &mut a);
                        out.push(o);
                        arg.push(a);
                    }
                    if record {
                        recs.push(TapeRec::Pool { argmax: arg });
                    }
                    if collect_acts {
                        acts.push(LayerActivations {
                            name: format!("l{li}"),
                            tensor: frames_to_activation(&out, self.shapes[li]),
                        });
                    }
                    frames = out;
                }
                Rt::Flatten => {
                    if record {
                        recs.push(TapeRec::Flatten);
                    }
                }
                Rt::Linear {
                    in_dim,
                    out_dim,
                    w,
                    b,
                } => {
                    let xin = if self.spec.delayed_input {
                        shift(&frames)
                    } else {
                        frames
                    };
                    let mut out = Vec::with_capacity(t_steps);
                    for f in &xin {
                        let mut o = vec![0.0; *out_dim];
                        crate::kernels::linear_forward(
                            *in_dim,
                            *out_dim,
                            f,
                            &self.params[*w].values,
                            &self.params[*b].values,
                            &mut o,
                        );
                        out.push(o);
                    }
                    if record {
                        recs.push(TapeRec::Linear { xin });
                    }
                    frames = out;
                }
                Rt::Acc {
                    in_dim,
                    out_dim,
                    w,
                    b,
                } => {
                    let xin = if self.spec.delayed_input {
                        shift(&frames)
                    } else {
                        frames
                    };
                    let mut v = vec![0.0; *out_dim];
                    let mut xsum = vec![0.0; *in_dim];
                    let mut step_out = vec![0.0; *out_dim];
                    for f in &xin {
                        crate::kernels::linear_forward(
                            *in_dim,
                            *out_dim,
                            f,
                            &self.params[*w].values,
                            &self.params[*b].values,
                            &mut step_out,
                        );
                        for (acc, o) in v.iter_mut().zip(&step_out) {
                            *acc += o;
                        }
                        for (acc, x) in xsum.iter_mut().zip(f) {
                            *acc += x;
                        }
                    }
                    if record {
                        recs.push(TapeRec::Acc { xsum });
                    }
                    raw.copy_from_slice(&v);
                    frames = Vec::new();
                }
            }
        }

        let tape = record.then(|| Tape {
            mode,
            t_steps,
            recs,
            raw,
        });
        Ok((raw, tape, acts))
    }

    /// Reverse-mode BPTT over a recorded tape. Returns per-parameter
    /// gradients of whatever scalar produced `grad_raw`.
    pub fn backward(&self, tape: &Tape, grad_raw: &[f64; 4]) -> Result<Gradients> {
        if tape.recs.len() != self.rt.len() {
            return Err(Error::Shape("tape does not match network layout".into()));
        }
        let scfg = SurrogateConfig::default();
        let t_steps = tape.t_steps;
        let mut grads = Gradients::zeros_of(self);
        let mut grad_frames: Frames = Vec::new();

        for (li, rt) in self.rt.iter().enumerate().rev() {
            match (rt, &tape.recs[li]) {
                (
                    Rt::Acc {
                        in_dim,
                        out_dim,
                        w,
                        b,
                    },
                    TapeRec::Acc { xsum },
                ) => {
                    // V_T = sum_t (W f_t + b): dW = g (x) sum_t f_t, db = T g.
                    let gw = &mut grads.by_param[*w];
                    for j in 0..*out_dim {
                        for i in 0..*in_dim {
                            gw[j * in_dim + i] += grad_raw[j] * xsum[i];
                        }
                    }
                    for (gb, g) in grads.by_param[*b].iter_mut().zip(grad_raw) {
                        *gb += t_steps as f64 * g;
                    }
                    let mut gx = vec![0.0; *in_dim];
                    crate::kernels::linear_backward_input(
                        *in_dim,
                        *out_dim,
                        grad_raw,
                        &self.params[*w].values,
                        &mut gx,
                    );
                    grad_frames = vec![gx; t_steps];
                    if self.spec.delayed_input {
                        grad_frames = unshift_grad(grad_frames);
                    }
                }
                (
                    Rt::Linear {
                        in_dim,
                        out_dim,
                        w,
                        b,
                    },
                    TapeRec::Linear { xin },
                ) => {
                    let mut gin = Vec::with_capacity(t_steps);
                    for (f, go) in xin.iter().zip(&grad_frames) {
                        let (gw, gb) = grads.pair_mut(*w, *b);
                        crate::kernels::linear_backward_params(*in_dim, *out_dim, f, go, gw, gb);
                        let mut gx = vec![0.0; *in_dim];
                        crate::kernels::linear_backward_input(
                            *in_dim,
                            *out_dim,
                            go,
                            &self.params[*w].values,
                            &mut gx,
                        );
                        gin.push(gx);
                    }
                    grad_frames = gin;
                    if self.spec.delayed_input {
                        grad_frames = unshift_grad(grad_frames);
                    }
                }
                (Rt::Flatten, TapeRec::Flatten) => {}
                (Rt::Pool { c, h, w }, TapeRec::Pool { argmax }) => {
                    let mut gin = Vec::with_capacity(t_steps);
                    for (go, arg) in grad_frames.iter().zip(argmax) {
                        let mut g = vec![0.0; c * h * w];
                        crate::kernels::maxpool2_backward(go, arg, &mut g);
                        gin.push(g);
                    }
                    grad_frames = gin;
                }
                (Rt::If { cfg }, TapeRec::If { u }) => {
                    grad_frames = if_backscan(&grad_frames, u, cfg, tape.mode, &scfg);
                }
                (
                    Rt::Sew {
                        shape,
                        w1,
                        b1,
                        w2,
                        b2,
                        cfg,
                    },
                    TapeRec::Sew { xin, u1, s1, u2 },
                ) => {
                    // Identity path.
                    let mut gin: Frames = grad_frames.clone();
                    // Branch: IF2 <- conv2 <- IF1 <- conv1.
                    let g_d2 = if_backscan(&grad_frames, u2, cfg, tape.mode, &scfg);
                    let conv2_in: Frames = if self.spec.delayed_input {
                        shift(s1)
                    } else {
                        s1.clone()
                    };
                    let mut g_s1 = Vec::with_capacity(t_steps);
                    for (f, go) in conv2_in.iter().zip(&g_d2) {
                        let (gw2, gb2) = grads.pair_mut(*w2, *b2);
                        crate::kernels::conv2d_backward_params(shape, f, go, gw2, gb2);
                        let mut gx = vec![0.0; shape.in_len()];
                        crate::kernels::conv2d_backward_input(
                            shape,
                            go,
                            &self.params[*w2].values,
                            &mut gx,
                        );
                        g_s1.push(gx);
                    }
                    if self.spec.delayed_input {
                        g_s1 = unshift_grad(g_s1);
                    }
                    let g_d1 = if_backscan(&g_s1, u1, cfg, tape.mode, &scfg);
                    let branch_in: Frames = if self.spec.delayed_input {
                        shift(xin)
                    } else {
                        xin.clone()
                    };
                    let mut g_x_branch = Vec::with_capacity(t_steps);
                    for (f, go) in branch_in.iter().zip(&g_d1) {
                        let (gw1, gb1) = grads.pair_mut(*w1, *b1);
                        crate::kernels::conv2d_backward_params(shape, f, go, gw1, gb1);
                        let mut gx = vec![0.0; shape.in_len()];
                        crate::kernels::conv2d_backward_input(
                            shape,
                            go,
                            &self.params[*w1].values,
                            &mut gx,
                        );
                        g_x_branch.push(gx);
                    }
                    if self.spec.delayed_input {
                        g_x_branch = unshift_grad(g_x_branch);
                    }
                    for (gi, gb) in gin.iter_mut().zip(&g_x_branch) {
                        for (a, b) in gi.iter_mut().zip(gb) {
                            *a += b;
                        }
                    }
                    grad_frames = gin;
                }
                (Rt::Conv { shape, w, b }, TapeRec::Conv { xin }) => {
                    let mut gin = Vec::with_capacity(t_steps);
                    for (f, go) in xin.iter().zip(&grad_frames) {
                        let (gw, gb) = grads.pair_mut(*w, *b);
                        crate::kernels::conv2d_backward_params(shape, f, go, gw, gb);
                        let mut gx = vec![0.0; shape.in_len()];
                        crate::kernels::conv2d_backward_input(
                            shape,
                            go,
                            &self.params[*w].values,
                            &mut gx,
                        );
                        gin.push(gx);
                    }
                    grad_frames = gin;
                    if self.spec.delayed_input {
                        grad_frames = unshift_grad(grad_frames);
                    }
                }
                (Rt::If { cfg }, TapeRec::Skip) => {
                    // Encoder IF (single step): sum the repeated-frame grads.
                    let TapeRec::Encoder { img, u } = &tape.recs[li - 1] else {
                        return Err(Error::Shape("tape does not match network layout".into()));
                    };
                    let n = u.len();
                    let mut g_s = vec![0.0; n];
                    for go in &grad_frames {
                        for (a, b) in g_s.iter_mut().zip(go) {
                            *a += b;
                        }
                    }
                    let g_drive: Vec<f64> = g_s
                        .iter()
                        .zip(u)
                        .map(|(g, &uv)| {
                            if cfg.infinite_threshold {
                                0.0
                            } else {
                                g * surrogate_grad(uv - cfg.threshold, &scfg)
                            }
                        })
                        .collect();
                    let Rt::Conv { shape, w, b } = &self.rt[li - 1] else {
                        return Err(Error::Shape("tape does not match network layout".into()));
                    };
                    let (gw, gb) = grads.pair_mut(*w, *b);
                    crate::kernels::conv2d_backward_params(shape, img, &g_drive, gw, gb);
                    break; // no gradient flows to the raw image
                }
                _ => return Err(Error::Shape("tape does not match network layout".into())),
            }
        }
        Ok(grads)
    }
}

fn frames_to_activation(frames: &Frames, shape: Shape) -> ActivationTensor {
    let (c, h, w) = match shape {
        Shape::Map { c, h, w } => (c, h, w),
        Shape::Flat(n) => (n, 1, 1),
    };
    let mut values = Vec::with_capacity(frames.len() * c * h * w);
    for f in frames {
        values.extend(f.iter().map(|&v| v.round() as u32));
    }
    ActivationTensor::new(frames.len(), c, h, w, values).expect("shape consistent")
}

fn spike_to_activation(x: &SpikeTensor) -> ActivationTensor {
    let (t, c, h, w) = x.dims();
    let values = (0..x.len()).map(|i| u32::from(x.get_linear(i))).collect();
    ActivationTensor::new(t, c, h, w, values).expect("shape consistent")
}
