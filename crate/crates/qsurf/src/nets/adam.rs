//! Adam optimizer over the MLP parameter shapes.

use super::mlp::{Gradients, MlpModel};

#[derive(Debug, Clone)]
pub struct AdamState {
    m: Gradients,
    v: Gradients,
    step: u64,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> Self {
        AdamState {
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
            step: 0,
        }
    }
}

/// One bias-corrected Adam update applied in place.
pub fn adam_step(
    model: &mut MlpModel,
    grads: &Gradients,
    state: &mut AdamState,
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    state.step += 1;
    let bc1 = 1.0 - beta1.powi(state.step as i32);
    let bc2 = 1.0 - beta2.powi(state.step as i32);
    let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
        *m = beta1 * *m + (1.0 - beta1) * g;
        *v = beta2 * *v + (1.0 - beta2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
    };
    for (li, layer) in model.layers.iter_mut().enumerate() {
        for (o, wrow) in layer.weights.iter_mut().enumerate() {
            for (i, w) in wrow.iter_mut().enumerate() {
                update(
                    w,
                    grads.weights[li][o][i],
                    &mut state.m.weights[li][o][i],
                    &mut state.v.weights[li][o][i],
                );
            }
        }
        for (o, b) in layer.biases.iter_mut().enumerate() {
            update(
                b,
                grads.biases[li][o],
                &mut state.m.biases[li][o],
                &mut state.v.biases[li][o],
            );
        }
    }
}
