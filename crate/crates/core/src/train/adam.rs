use super::TrainError;
use crate::mlm::Params;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

/// First and second moments plus the number of steps taken.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Params,
    pub v: Params,
    pub t: u64,
}

impl AdamState {
    pub fn new(params: &Params) -> Self {
        AdamState {
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
        }
    }
}

/// One Adam update of a flat tensor at step `t` (1-based). Weight decay is
/// decoupled: `theta -= lr * wd * theta` happens before the moment step.
pub fn adam_update(
    theta: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    t: u64,
    lr: f64,
    weight_decay: f64,
) {
    let c1 = 1.0 - BETA1.powi(t as i32);
    let c2 = 1.0 - BETA2.powi(t as i32);
    for i in 0..theta.len() {
        theta[i] -= lr * weight_decay * theta[i];
        m[i] = BETA1 * m[i] + (1.0 - BETA1) * grad[i];
        v[i] = BETA2 * v[i] + (1.0 - BETA2) * grad[i] * grad[i];
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        theta[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

/// Applies one step to every tensor. Refuses non-finite gradients before
/// touching anything.
pub fn adam_step(
    params: &mut Params,
    grads: &Params,
    state: &mut AdamState,
    lr: f64,
    weight_decay: f64,
) -> Result<(), TrainError> {
    for (name, g) in grads.tensors() {
        if g.iter().any(|x| !x.is_finite()) {
            return Err(TrainError::NonFiniteGradient { tensor: name });
        }
    }
    state.t += 1;
    let t = state.t;
    let g = grads.tensors();
    let m = state.m.tensors_mut();
    let v = state.v.tensors_mut();
    for ((((_, theta), (_, g)), (_, m)), (_, v)) in params.tensors_mut().into_iter().zip(g).zip(m).zip(v) {
        adam_update(theta, g, m, v, t, lr, weight_decay);
    }
    Ok(())
}
