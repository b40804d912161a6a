use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::ParamSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates for every tensor of a [`ParamSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub step: u64,
    m: Vec<Array2<f64>>,
    v: Vec<Array2<f64>>,
}

impl AdamState {
    pub fn new(params: &ParamSet, config: AdamConfig) -> Self {
        let zeros = || params.tensors().iter().map(|t| Array2::zeros(t.shape())).collect();
        AdamState {
            config,
            step: 0,
            m: zeros(),
            v: zeros(),
        }
    }

    /// Applies one bias-corrected update from the gradient slots. Gradients
    /// are left in place; callers zero them between steps.
    pub fn step(&mut self, params: &mut ParamSet) {
        assert_eq!(self.m.len(), params.len(), "optimiser built for a different parameter set");
        self.step += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let t = self.step as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for id in 0..params.len() {
            let g = params.grad(id).clone();
            let m = &mut self.m[id];
            let v = &mut self.v[id];
            Zip::from(&mut *m).and(&g).for_each(|m, &g| *m = beta1 * *m + (1.0 - beta1) * g);
            Zip::from(&mut *v).and(&g).for_each(|v, &g| *v = beta2 * *v + (1.0 - beta2) * g * g);
            Zip::from(params.value_mut(id))
                .and(&*m)
                .and(&*v)
                .for_each(|p, &m, &v| *p -= lr * (m / c1) / ((v / c2).sqrt() + eps));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tape;
    use ndarray::array;

    #[test]
    fn zero_gradient_keeps_parameters() {
        let mut p = ParamSet::new();
        p.add("w", array![[1.0, -2.0]]);
        let before = p.clone();
        let mut adam = AdamState::new(&p, AdamConfig::default());
        adam.step(&mut p);
        assert_eq!(p.value(0), before.value(0));
        assert_eq!(adam.step, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = ParamSet::new();
        p.add("w", array![[0.0]]);
        p.grad_mut(0)[[0, 0]] = 1.0;
        let mut adam = AdamState::new(&p, AdamConfig::default());
        adam.step(&mut p);
        // m̂ = 1, v̂ = 1, so the update is lr / (1 + eps)
        let expect = -1e-3 / (1.0 + 1e-8);
        assert!((p.value(0)[[0, 0]] - expect).abs() < 1e-18);
    }

    #[test]
    fn steps_descend_a_quadratic() {
        let mut p = ParamSet::new();
        let w = p.add("w", array![[3.0, -1.5]]);
        let mut adam = AdamState::new(&p, AdamConfig { lr: 0.1, ..AdamConfig::default() });
        let loss = |p: &mut ParamSet| {
            let mut t = Tape::new();
            let x = t.param(p, w);
            let sq = t.matmul_t(x, x).unwrap();
            let s = t.sum(sq);
            p.zero_grad();
            t.backward(s, p).unwrap();
            t.scalar(s)
        };
        let l0 = loss(&mut p);
        adam.step(&mut p);
        let l1 = loss(&mut p);
        adam.step(&mut p);
        let l2 = loss(&mut p);
        assert!(l1 < l0 && l2 < l1, "{l0} {l1} {l2}");
    }
}
