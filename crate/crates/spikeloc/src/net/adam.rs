//! Adam optimizer with bias correction.
//!
//! Parameters and moments are rounded through f32 after every step so the
//! in-memory state always matches the f32 checkpoint encoding bit-exactly.

use super::engine::Gradients;
use super::{quantize_f32, Model, ParamTensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step: u64,
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(model: &Model, lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        AdamState {
            lr,
            beta1,
            beta2,
            eps,
            step: 0,
            m: model.params.iter().map(|p| p.zeros_like()).collect(),
            v: model.params.iter().map(|p| p.zeros_like()).collect(),
        }
    }

    /// One Adam update over all parameter tensors.
    pub fn apply(&mut self, params: &mut [ParamTensor], grads: &Gradients) -> Result<()> {
        if params.len() != grads.by_param.len() {
            return Err(Error::Shape(
                "gradient count does not match parameters".into(),
            ));
        }
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        for ((tensor, grad), (m, v)) in params
            .iter_mut()
            .zip(&grads.by_param)
            .zip(self.m.iter_mut().zip(&mut self.v))
        {
            if let Some(bad) = grad.iter().position(|g| !g.is_finite()) {
                return Err(Error::Numeric(format!(
                    "non-finite gradient in '{}' at index {bad}",
                    tensor.name
                )));
            }
            for i in 0..tensor.values.len() {
                let g = grad[i];
                m[i] = self.beta1 * m[i] + (1.0 - self.beta1) * g;
                v[i] = self.beta2 * v[i] + (1.0 - self.beta2) * g * g;
                let m_hat = m[i] / bc1;
                let v_hat = v[i] / bc2;
                tensor.values[i] =
                    quantize_f32(tensor.values[i] - self.lr * m_hat / (v_hat.sqrt() + self.eps));
                m[i] = quantize_f32(m[i]);
                v[i] = quantize_f32(v[i]);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{LayerSpec, NetworkSpec};
    use crate::rng::Rng;

    fn scalar_model() -> Model {
        // Smallest valid network; only the accumulator holds parameters.
        let spec = NetworkSpec {
            input: (1, 2, 2),
            t: 1,
            layers: vec![
                LayerSpec::Flatten,
                LayerSpec::Accumulator {
                    c_in: 4,
                    outputs: 4,
                },
            ],
            image_encoder: false,
            delayed_input: false,
        };
        Model::init(spec, &mut Rng::new(1)).unwrap()
    }

    #[test]
    fn zero_gradient_leaves_params_unchanged() {
        let mut model = scalar_model();
        let before = model.params.clone();
        let grads = Gradients::zeros_of(&model);
        let mut adam = AdamState::new(&model, 0.1, 0.9, 0.999, 1e-8);
        adam.apply(&mut model.params, &grads).unwrap();
        assert_eq!(before, model.params);
        assert_eq!(adam.step, 1);
    }

    #[test]
    fn first_step_magnitude_close_to_lr() {
        let mut model = scalar_model();
        let start = model.params[0].values[0];
        let mut grads = Gradients::zeros_of(&model);
        grads.by_param[0][0] = 1.0;
        let mut adam = AdamState::new(&model, 0.1, 0.9, 0.999, 1e-8);
        adam.apply(&mut model.params, &grads).unwrap();
        let delta = model.params[0].values[0] - start;
        assert!((delta + 0.1).abs() < 1e-6, "delta {delta}");
    }

    #[test]
    fn non_finite_gradient_names_tensor() {
        let mut model = scalar_model();
        let mut grads = Gradients::zeros_of(&model);
        grads.by_param[1][0] = f64::NAN;
        let mut adam = AdamState::new(&model, 0.1, 0.9, 0.999, 1e-8);
        let err = adam.apply(&mut model.params, &grads).unwrap_err();
        assert!(err.to_string().contains("l1.bias"), "{err}");
    }

    #[test]
    fn deterministic_trajectories() {
        let run = || {
            let mut model = scalar_model();
            let mut adam = AdamState::new(&model, 0.05, 0.9, 0.999, 1e-8);
            let mut rng = Rng::new(77);
            for _ in 0..20 {
                let mut grads = Gradients::zeros_of(&model);
                for p in &mut grads.by_param {
                    for g in p.iter_mut() {
                        *g = rng.next_range(-1.0, 1.0);
                    }
                }
                adam.apply(&mut model.params, &grads).unwrap();
            }
            model.params
        };
        assert_eq!(run(), run());
    }
}
