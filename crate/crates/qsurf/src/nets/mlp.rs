//! Dense multilayer perceptron with manual backpropagation.

use crate::error::{Error, Result};
use crate::numkit::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
    Relu,
    Linear,
}

impl Activation {
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Relu => z.max(0.0),
            Activation::Linear => z,
        }
    }

    /// Derivative expressed through the pre-activation z.
    fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "linear" => Ok(Activation::Linear),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

impl std::fmt::Display for Activation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Activation::Tanh => write!(f, "tanh"),
            Activation::Relu => write!(f, "relu"),
            Activation::Linear => write!(f, "linear"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    /// weights[out][in]
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<Layer>,
}

/// Per-layer gradients, same shape as the model parameters.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            weights: model
                .layers
                .iter()
                .map(|l| vec![vec![0.0; l.weights[0].len()]; l.weights.len()])
                .collect(),
            biases: model.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in self.weights.iter_mut() {
            for row in l.iter_mut() {
                for x in row.iter_mut() {
                    *x *= factor;
                }
            }
        }
        for l in self.biases.iter_mut() {
            for x in l.iter_mut() {
                *x *= factor;
            }
        }
    }

    /// Add the gradient of l2 * sum(w^2): 2 * l2 * w per weight, biases
    /// excluded.
    pub fn add_l2(&mut self, model: &MlpModel, l2: f64) {
        if l2 == 0.0 {
            return;
        }
        for (g, l) in self.weights.iter_mut().zip(&model.layers) {
            for (grow, wrow) in g.iter_mut().zip(&l.weights) {
                for (gx, wx) in grow.iter_mut().zip(wrow) {
                    *gx += 2.0 * l2 * wx;
                }
            }
        }
    }
}

/// Activations cached during a forward pass, consumed by backward().
pub struct ForwardCache {
    /// activations[0] is the input; activations[i+1] the output of layer i.
    pub activations: Vec<Vec<f64>>,
    /// Pre-activation values per layer.
    pub pre_activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().unwrap()
    }
}

impl MlpModel {
    /// Glorot-uniform initialization (+-sqrt(6/(fan_in+fan_out))) from the
    /// given stream; hidden layers share one activation, output is linear.
    pub fn new(sizes: &[usize], hidden_activation: Activation, rng: &mut Rng) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output sizes");
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for i in 0..sizes.len() - 1 {
            let (fan_in, fan_out) = (sizes[i], sizes[i + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = (0..fan_out)
                .map(|_| {
                    (0..fan_in)
                        .map(|_| (rng.next_f64() * 2.0 - 1.0) * bound)
                        .collect()
                })
                .collect();
            let activation = if i == sizes.len() - 2 {
                Activation::Linear
            } else {
                hidden_activation
            };
            layers.push(Layer {
                weights,
                biases: vec![0.0; fan_out],
                activation,
            });
        }
        MlpModel { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().biases.len()
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        let mut a = input.to_vec();
        for layer in &self.layers {
            let mut next = Vec::with_capacity(layer.biases.len());
            for (wrow, b) in layer.weights.iter().zip(&layer.biases) {
                let z: f64 = wrow.iter().zip(&a).map(|(w, x)| w * x).sum::<f64>() + b;
                next.push(layer.activation.apply(z));
            }
            a = next;
        }
        Ok(a)
    }

    pub fn forward_cached(&self, input: &[f64]) -> Result<ForwardCache> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: input.len(),
            });
        }
        let mut activations = vec![input.to_vec()];
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let a = activations.last().unwrap();
            let mut z_vec = Vec::with_capacity(layer.biases.len());
            for (wrow, b) in layer.weights.iter().zip(&layer.biases) {
                z_vec.push(wrow.iter().zip(a).map(|(w, x)| w * x).sum::<f64>() + b);
            }
            let a_next = z_vec.iter().map(|&z| layer.activation.apply(z)).collect();
            pre_activations.push(z_vec);
            activations.push(a_next);
        }
        Ok(ForwardCache {
            activations,
            pre_activations,
        })
    }

    /// Gradients of a scalar loss w.r.t. all parameters, given the loss
    /// gradient at the network output.
    pub fn backward(&self, cache: &ForwardCache, output_grad: &[f64]) -> Gradients {
        let mut grads = Gradients::zeros_like(self);
        let mut delta: Vec<f64> = output_grad.to_vec();
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let z = &cache.pre_activations[li];
            let a_prev = &cache.activations[li];
            // delta on pre-activations of this layer
            let delta_z: Vec<f64> = delta
                .iter()
                .zip(z)
                .map(|(d, &z)| d * layer.activation.derivative(z))
                .collect();
            for (o, &dz) in delta_z.iter().enumerate() {
                grads.biases[li][o] += dz;
                for (i, &ap) in a_prev.iter().enumerate() {
                    grads.weights[li][o][i] += dz * ap;
                }
            }
            if li > 0 {
                let fan_in = layer.weights[0].len();
                let mut prev = vec![0.0; fan_in];
                for (o, &dz) in delta_z.iter().enumerate() {
                    for i in 0..fan_in {
                        prev[i] += layer.weights[o][i] * dz;
                    }
                }
                delta = prev;
            }
        }
        grads
    }

    /// Sum of squared weights (biases excluded), for L2 regularization.
    pub fn weight_squared_norm(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter())
            .flat_map(|row| row.iter())
            .map(|w| w * w)
            .sum()
    }

    pub fn all_parameters_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.weights.iter().flatten().all(|w| w.is_finite())
                && l.biases.iter().all(|b| b.is_finite())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_net_outputs_zero() {
        let mut rng = Rng::new(1);
        let mut m = MlpModel::new(&[3, 4, 2], Activation::Tanh, &mut rng);
        for l in m.layers.iter_mut() {
            for row in l.weights.iter_mut() {
                row.iter_mut().for_each(|w| *w = 0.0);
            }
        }
        assert_eq!(m.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn identity_linear_layer() {
        let m = MlpModel {
            layers: vec![Layer {
                weights: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                biases: vec![0.0, 0.0],
                activation: Activation::Linear,
            }],
        };
        assert_eq!(m.forward(&[0.3, -0.7]).unwrap(), vec![0.3, -0.7]);
    }

    #[test]
    fn forward_is_pure() {
        let mut rng = Rng::new(2);
        let m = MlpModel::new(&[2, 5, 3], Activation::Tanh, &mut rng);
        let x = [0.4, -1.1];
        assert_eq!(m.forward(&x).unwrap(), m.forward(&x).unwrap());
        assert!(m.forward(&[1.0]).is_err());
    }

    #[test]
    fn zero_output_grad_gives_zero_param_grads() {
        let mut rng = Rng::new(3);
        let m = MlpModel::new(&[2, 3, 2], Activation::Tanh, &mut rng);
        let cache = m.forward_cached(&[0.5, -0.5]).unwrap();
        let g = m.backward(&cache, &[0.0, 0.0]);
        assert!(g.weights.iter().flatten().flatten().all(|&x| x == 0.0));
        assert!(g.biases.iter().flatten().all(|&x| x == 0.0));
    }

    /// Central finite-difference oracle on a 2-3-2 tanh net with a squared
    /// loss against a fixed target.
    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = Rng::new(4);
        let model = MlpModel::new(&[2, 3, 2], Activation::Tanh, &mut rng);
        let input = [0.3, -0.8];
        let target = [0.1, 0.7];
        let loss = |m: &MlpModel| -> f64 {
            let y = m.forward(&input).unwrap();
            y.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum()
        };
        let cache = model.forward_cached(&input).unwrap();
        let out_grad: Vec<f64> = cache
            .output()
            .iter()
            .zip(&target)
            .map(|(y, t)| 2.0 * (y - t))
            .collect();
        let analytic = model.backward(&cache, &out_grad);

        let h = 1e-5;
        for li in 0..model.layers.len() {
            for o in 0..model.layers[li].weights.len() {
                for i in 0..model.layers[li].weights[o].len() {
                    let mut plus = model.clone();
                    plus.layers[li].weights[o][i] += h;
                    let mut minus = model.clone();
                    minus.layers[li].weights[o][i] -= h;
                    let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                    let an = analytic.weights[li][o][i];
                    let rel = (fd - an).abs() / fd.abs().max(an.abs()).max(1e-8);
                    assert!(rel < 1e-4, "layer {li} w[{o}][{i}] fd={fd} an={an}");
                }
                let mut plus = model.clone();
                plus.layers[li].biases[o] += h;
                let mut minus = model.clone();
                minus.layers[li].biases[o] -= h;
                let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                let an = analytic.biases[li][o];
                let rel = (fd - an).abs() / fd.abs().max(an.abs()).max(1e-8);
                assert!(rel < 1e-4, "layer {li} b[{o}] fd={fd} an={an}");
            }
        }
    }

    /// The L2 term adds 2*l2*w to each weight gradient; check against finite
    /// differences of the regularized loss.
    #[test]
    fn l2_gradient_matches_finite_differences() {
        let mut rng = Rng::new(5);
        let model = MlpModel::new(&[2, 3, 1], Activation::Tanh, &mut rng);
        let l2 = 0.3;
        let input = [0.2, 0.9];
        let loss = |m: &MlpModel| -> f64 {
            m.forward(&input).unwrap()[0] + l2 * m.weight_squared_norm()
        };
        let cache = model.forward_cached(&input).unwrap();
        let mut analytic = model.backward(&cache, &[1.0]);
        analytic.add_l2(&model, l2);
        let h = 1e-5;
        for li in 0..model.layers.len() {
            for o in 0..model.layers[li].weights.len() {
                for i in 0..model.layers[li].weights[o].len() {
                    let mut plus = model.clone();
                    plus.layers[li].weights[o][i] += h;
                    let mut minus = model.clone();
                    minus.layers[li].weights[o][i] -= h;
                    let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
                    let an = analytic.weights[li][o][i];
                    let rel = (fd - an).abs() / fd.abs().max(an.abs()).max(1e-8);
                    assert!(rel < 1e-4, "layer {li} w[{o}][{i}] fd={fd} an={an}");
                }
            }
        }
    }
}
