//! Integrate-and-fire neuron dynamics and the arctan surrogate family.
//!
//! The IF neuron accumulates input current into a membrane potential and
//! emits a binary spike when the potential reaches the threshold. During
//! backpropagation the Heaviside step is replaced by the derivative of a
//! smooth arctan sigmoid (see [`surrogate_grad`]).

use crate::error::{Error, Result};

/// Membrane reset behavior after a spike.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResetMode {
    /// Potential returns to the resting value 0.
    ToZero,
    /// Threshold is subtracted, keeping the overshoot.
    SubtractTheta,
}

/// Integrate-and-fire layer configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfConfig {
    pub threshold: f64,
    pub reset_mode: ResetMode,
    /// Accumulator mode: the neuron never spikes and integrates forever.
    pub infinite_threshold: bool,
}

impl Default for IfConfig {
    fn default() -> Self {
        IfConfig {
            threshold: 1.0,
            reset_mode: ResetMode::ToZero,
            infinite_threshold: false,
        }
    }
}

impl IfConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.infinite_threshold && (!self.threshold.is_finite() || self.threshold <= 0.0) {
            return Err(Error::Config("IF threshold must be finite and > 0".into()));
        }
        Ok(())
    }

    pub fn accumulator() -> Self {
        IfConfig {
            threshold: 1.0,
            reset_mode: ResetMode::ToZero,
            infinite_threshold: true,
        }
    }
}

/// Membrane potentials of a layer, one per neuron. Reset to 0 at sequence start.
#[derive(Debug, Clone, PartialEq)]
pub struct MembraneState {
    pub potentials: Vec<f64>,
}

impl MembraneState {
    pub fn resting(n: usize) -> Self {
        MembraneState {
            potentials: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }
}

/// One discrete IF time-step over a layer of neurons.
///
/// Charges `V' = V + input`, emits a spike where `V' >= threshold`
/// (the boundary itself spikes), then resets per [`ResetMode`]. With
/// `infinite_threshold` the layer never spikes and simply accumulates.
pub fn if_step(
    state: &MembraneState,
    input_current: &[f64],
    cfg: &IfConfig,
) -> Result<(Vec<f64>, MembraneState)> {
    if input_current.len() != state.len() {
        return Err(Error::Shape(format!(
            "if_step: input length {} != state length {}",
            input_current.len(),
            state.len()
        )));
    }
    let mut spikes = vec![0.0; state.len()];
    let mut next = MembraneState {
        potentials: Vec::with_capacity(state.len()),
    };
    for (i, (&v, &x)) in state.potentials.iter().zip(input_current).enumerate() {
        let charged = v + x;
        if cfg.infinite_threshold {
            next.potentials.push(charged);
            continue;
        }
        if charged >= cfg.threshold {
            spikes[i] = 1.0;
            next.potentials.push(match cfg.reset_mode {
                ResetMode::ToZero => 0.0,
                ResetMode::SubtractTheta => charged - cfg.threshold,
            });
        } else {
            next.potentials.push(charged);
        }
    }
    Ok((spikes, next))
}

/// Surrogate slope configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateConfig {
    pub alpha: f64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig { alpha: 2.0 }
    }
}

/// Smooth stand-in for the Heaviside step:
/// `sigma(x) = arctan(pi/2 * alpha * x) / pi + 1/2`.
pub fn surrogate_value(x: f64, cfg: &SurrogateConfig) -> f64 {
    (std::f64::consts::FRAC_PI_2 * cfg.alpha * x).atan() / std::f64::consts::PI + 0.5
}

/// Analytic derivative of [`surrogate_value`]:
/// `alpha/2 / (1 + (pi/2 * alpha * x)^2)`.
pub fn surrogate_grad(x: f64, cfg: &SurrogateConfig) -> f64 {
    let z = std::f64::consts::FRAC_PI_2 * cfg.alpha * x;
    cfg.alpha / 2.0 / (1.0 + z * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(inputs: &[f64], cfg: &IfConfig) -> (Vec<f64>, MembraneState) {
        let mut state = MembraneState::resting(1);
        let mut spikes = Vec::new();
        for &x in inputs {
            let (s, next) = if_step(&state, &[x], cfg).unwrap();
            spikes.push(s[0]);
            state = next;
        }
        (spikes, state)
    }

    #[test]
    fn constant_drive_spikes_at_steps_3_and_6() {
        let cfg = IfConfig::default();
        let (spikes, _) = scan(&[0.4; 6], &cfg);
        assert_eq!(spikes, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_input_stays_silent() {
        let cfg = IfConfig::default();
        let (spikes, state) = scan(&[0.0; 10], &cfg);
        assert!(spikes.iter().all(|&s| s == 0.0));
        assert_eq!(state.potentials[0], 0.0);
    }

    #[test]
    fn infinite_threshold_accumulates() {
        let cfg = IfConfig::accumulator();
        let (spikes, state) = scan(&[0.3, 0.5, -0.1], &cfg);
        assert!(spikes.iter().all(|&s| s == 0.0));
        assert!((state.potentials[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn boundary_potential_spikes() {
        // Theta(0) = 1: reaching the threshold exactly emits a spike.
        let cfg = IfConfig::default();
        let (spikes, state) = scan(&[1.0], &cfg);
        assert_eq!(spikes, vec![1.0]);
        assert_eq!(state.potentials[0], 0.0);
    }

    #[test]
    fn subtract_reset_keeps_overshoot() {
        let cfg = IfConfig {
            reset_mode: ResetMode::SubtractTheta,
            ..IfConfig::default()
        };
        let (spikes, state) = scan(&[1.3], &cfg);
        assert_eq!(spikes, vec![1.0]);
        assert!((state.potentials[0] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn subtract_reset_conserves_potential() {
        // With non-negative inputs, theta * total spikes <= total input.
        let cfg = IfConfig {
            reset_mode: ResetMode::SubtractTheta,
            ..IfConfig::default()
        };
        let mut rng = crate::rng::Rng::new(17);
        for _ in 0..50 {
            let inputs: Vec<f64> = (0..32).map(|_| rng.next_uniform()).collect();
            let (spikes, _) = {
                let mut state = MembraneState::resting(1);
                let mut spikes = Vec::new();
                for &x in &inputs {
                    let (s, next) = if_step(&state, &[x], &cfg).unwrap();
                    spikes.push(s[0]);
                    state = next;
                }
                (spikes, state)
            };
            let emitted: f64 = spikes.iter().sum::<f64>() * cfg.threshold;
            let injected: f64 = inputs.iter().sum();
            assert!(emitted <= injected + 1e-12);
        }
    }

    #[test]
    fn accumulator_identity() {
        // Infinite threshold: V_T equals the running input sum exactly.
        let cfg = IfConfig::accumulator();
        let mut rng = crate::rng::Rng::new(4);
        let inputs: Vec<f64> = (0..64).map(|_| rng.next_range(-1.0, 1.0)).collect();
        let (_, state) = {
            let mut state = MembraneState::resting(1);
            for &x in &inputs {
                let (_, next) = if_step(&state, &[x], &cfg).unwrap();
                state = next;
            }
            ((), state)
        };
        let total: f64 = inputs.iter().sum();
        assert!((state.potentials[0] - total).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let state = MembraneState::resting(3);
        assert!(if_step(&state, &[0.0; 2], &IfConfig::default()).is_err());
    }

    #[test]
    fn surrogate_at_zero_is_half() {
        let cfg = SurrogateConfig::default();
        assert!((surrogate_value(0.0, &cfg) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn surrogate_approaches_one() {
        let cfg = SurrogateConfig::default();
        assert!(surrogate_value(1e6, &cfg) > 0.999);
        assert!(surrogate_value(-1e6, &cfg) < 0.001);
    }

    #[test]
    fn surrogate_odd_symmetry() {
        let cfg = SurrogateConfig::default();
        for &x in &[-3.0, -0.7, 0.01, 0.5, 2.0, 10.0] {
            let s = surrogate_value(x, &cfg) + surrogate_value(-x, &cfg);
            assert!((s - 1.0).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn surrogate_grad_at_zero_alpha_two() {
        let cfg = SurrogateConfig { alpha: 2.0 };
        assert!((surrogate_grad(0.0, &cfg) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn surrogate_grad_matches_finite_differences() {
        let cfg = SurrogateConfig::default();
        let h = 1e-6;
        for &x in &[-1.0, -0.1, 0.3, 2.0] {
            let fd = (surrogate_value(x + h, &cfg) - surrogate_value(x - h, &cfg)) / (2.0 * h);
            let g = surrogate_grad(x, &cfg);
            assert!((fd - g).abs() / g.abs() < 1e-6, "x={x} fd={fd} g={g}");
        }
    }

    #[test]
    fn surrogate_grad_is_even() {
        let cfg = SurrogateConfig { alpha: 3.5 };
        for &x in &[0.0, 0.2, 1.7, 9.0] {
            assert_eq!(surrogate_grad(x, &cfg), surrogate_grad(-x, &cfg));
        }
    }
}
