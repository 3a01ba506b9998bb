//! ADAM optimizer over a set of dense parameter matrices, with the stepped
//! exponential learning-rate decay used by the training schedule
//! (initial rate 0.01, multiplied by 0.95 every 100 steps).

use alloc::vec::Vec;

use crate::matrix::DenseMatrix;

/// Optimizer hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamConfig {
    pub base_lr: f64,
    /// Multiplier applied to the learning rate every `decay_every` steps.
    pub decay_rate: f64,
    pub decay_every: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            base_lr: 0.01,
            decay_rate: 0.95,
            decay_every: 100,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter first and second moment accumulators plus the step counter.
#[derive(Clone, Debug)]
pub struct AdamState {
    config: AdamConfig,
    step_count: u64,
    first_moment: Vec<DenseMatrix>,
    second_moment: Vec<DenseMatrix>,
}

impl AdamState {
    /// Fresh state for parameters of the given shapes.
    pub fn new(config: AdamConfig, shapes: &[(usize, usize)]) -> Self {
        let first_moment = shapes
            .iter()
            .map(|&(r, c)| DenseMatrix::zeros(r, c))
            .collect::<Vec<_>>();
        let second_moment = first_moment.clone();
        AdamState {
            config,
            step_count: 0,
            first_moment,
            second_moment,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// Learning rate the next `step` call will use:
    /// `base_lr * decay_rate^floor(step_count / decay_every)`.
    pub fn effective_lr(&self) -> f64 {
        let decays = (self.step_count / self.config.decay_every) as f64;
        self.config.base_lr * libm::pow(self.config.decay_rate, decays)
    }

    /// One ADAM update with bias correction. Panics if `params` and `grads`
    /// do not match the shapes this state was built with.
    pub fn step(&mut self, params: &mut [DenseMatrix], grads: &[DenseMatrix]) {
        assert_eq!(params.len(), self.first_moment.len(), "parameter count");
        assert_eq!(grads.len(), self.first_moment.len(), "gradient count");

        let lr = self.effective_lr();
        let t = (self.step_count + 1) as i32;
        let c = &self.config;
        let bias1 = 1.0 - libm::pow(c.beta1, t as f64);
        let bias2 = 1.0 - libm::pow(c.beta2, t as f64);

        for ((param, grad), (m, v)) in params
            .iter_mut()
            .zip(grads)
            .zip(self.first_moment.iter_mut().zip(&mut self.second_moment))
        {
            assert_eq!(param.shape(), m.shape(), "parameter shape mismatch");
            assert_eq!(grad.shape(), m.shape(), "gradient shape mismatch");
            for ((p, &g), (mi, vi)) in param
                .data_mut()
                .iter_mut()
                .zip(grad.data())
                .zip(m.data_mut().iter_mut().zip(v.data_mut()))
            {
                *mi = c.beta1 * *mi + (1.0 - c.beta1) * g;
                *vi = c.beta2 * *vi + (1.0 - c.beta2) * g * g;
                let m_hat = *mi / bias1;
                let v_hat = *vi / bias2;
                *p -= lr * m_hat / (libm::sqrt(v_hat) + c.epsilon);
            }
        }
        self.step_count += 1;
    }
}
