use serde::{Deserialize, Serialize};

use super::{NnError, ParamStore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates, keyed like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub first: ParamStore,
    pub second: ParamStore,
    pub step: u64,
}

impl OptimizerState {
    pub fn new(params: &ParamStore) -> Self {
        OptimizerState {
            first: params.zeros_like(),
            second: params.zeros_like(),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update of `params` in place.
pub fn adam_step(
    params: &mut ParamStore,
    grads: &ParamStore,
    state: &mut OptimizerState,
    cfg: &AdamConfig,
) -> Result<(), NnError> {
    params.same_layout(grads)?;
    params.same_layout(&state.first)?;
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for (name, p) in params.iter_mut() {
        let g = grads.get(name)?;
        let m = state.first.get_mut(name)?;
        for (mi, gi) in m.data_mut().iter_mut().zip(g.data()) {
            *mi = cfg.beta1 * *mi + (1.0 - cfg.beta1) * gi;
        }
        let v = state.second.get_mut(name)?;
        for (vi, gi) in v.data_mut().iter_mut().zip(g.data()) {
            *vi = cfg.beta2 * *vi + (1.0 - cfg.beta2) * gi * gi;
        }
        let m = state.first.get(name)?.data();
        let v = state.second.get(name)?.data();
        for ((pi, mi), vi) in p.data_mut().iter_mut().zip(m).zip(v) {
            let m_hat = mi / c1;
            let v_hat = vi / c2;
            *pi -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}
