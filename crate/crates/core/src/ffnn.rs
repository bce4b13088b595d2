//! Single-hidden-layer feed-forward network with bias neurons, trained by
//! full-batch ADAM on the mean squared error.
//!
//! The walk-forward forecaster retrains one of these every day on a trailing
//! batch. Everything here is seeded and sequential, so a fixed seed plus
//! fixed inputs reproduces the trained weights bit for bit.

use rand::Rng;

use crate::rng::stream_rng;
use crate::{Error, Result};

pub const DEFAULT_TANH_A: f64 = 1.7159;
pub const DEFAULT_TANH_B: f64 = 2.0 / 3.0;

/// Neuron activation for one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// 1/(1+e^{−z})
    Logistic,
    /// a·tanh(b·z), bounded in (−a, a)
    Tanh { a: f64, b: f64 },
    /// identity, used for the output layer
    Linear,
}

impl Activation {
    pub fn default_tanh() -> Self {
        Activation::Tanh {
            a: DEFAULT_TANH_A,
            b: DEFAULT_TANH_B,
        }
    }

    fn apply(&self, z: f64) -> f64 {
        match *self {
            Activation::Logistic => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh { a, b } => a * (b * z).tanh(),
            Activation::Linear => z,
        }
    }

    fn derivative(&self, z: f64) -> f64 {
        match *self {
            Activation::Logistic => {
                let y = 1.0 / (1.0 + (-z).exp());
                y * (1.0 - y)
            }
            Activation::Tanh { a, b } => {
                let t = (b * z).tanh();
                a * b * (1.0 - t * t)
            }
            Activation::Linear => 1.0,
        }
    }

    fn tag(&self) -> String {
        match *self {
            Activation::Logistic => "logistic".into(),
            Activation::Tanh { a, b } => format!("tanh {a} {b}"),
            Activation::Linear => "linear".into(),
        }
    }

    fn from_tag(tag: &str) -> Result<Self> {
        let parts: Vec<&str> = tag.split_whitespace().collect();
        match parts.as_slice() {
            ["logistic"] => Ok(Activation::Logistic),
            ["linear"] => Ok(Activation::Linear),
            ["tanh", a, b] => {
                let a: f64 = a.parse().map_err(|_| bad_tag(tag))?;
                let b: f64 = b.parse().map_err(|_| bad_tag(tag))?;
                Ok(Activation::Tanh { a, b })
            }
            _ => Err(bad_tag(tag)),
        }
    }
}

fn bad_tag(tag: &str) -> Error {
    Error::Integrity(format!("unknown activation tag '{tag}'"))
}

/// Feed-forward network: layer sizes, per-connection-layer weight matrices
/// with a trailing bias row, and one activation per non-input layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    /// `weights[l]` is (layer_sizes[l]+1) × layer_sizes[l+1], row-major;
    /// the last row is the bias neuron's.
    weights: Vec<Vec<f64>>,
    activations: Vec<Activation>,
}

impl Network {
    /// Seeded network with uniform ±√(6/(fan_in+fan_out)) weights.
    /// The output layer must have exactly one neuron.
    pub fn new(layer_sizes: &[usize], activations: &[Activation], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::Shape("need at least input and output layers".into()));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::Shape("zero-size layer".into()));
        }
        if *layer_sizes.last().expect("nonempty") != 1 {
            return Err(Error::Shape("output layer must have one neuron".into()));
        }
        if activations.len() != layer_sizes.len() - 1 {
            return Err(Error::Shape(format!(
                "{} layers need {} activations, got {}",
                layer_sizes.len(),
                layer_sizes.len() - 1,
                activations.len()
            )));
        }
        for act in activations {
            if let Activation::Tanh { a, b } = act {
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(Error::Range(format!(
                        "tanh parameters must be positive, got a={a}, b={b}"
                    )));
                }
            }
        }

        let mut rng = stream_rng(seed, 0);
        let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
        for l in 0..layer_sizes.len() - 1 {
            let fan_in = layer_sizes[l];
            let fan_out = layer_sizes[l + 1];
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w: Vec<f64> = (0..(fan_in + 1) * fan_out)
                .map(|_| rng.random_range(-bound..bound))
                .collect();
            weights.push(w);
        }
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            activations: activations.to_vec(),
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn activations(&self) -> &[Activation] {
        &self.activations
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.weights
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    fn weight(&self, layer: usize, from: usize, to: usize) -> f64 {
        self.weights[layer][from * self.layer_sizes[layer + 1] + to]
    }

    /// Forward pass to the scalar output.
    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        if input.len() != self.input_size() {
            return Err(Error::Shape(format!(
                "input has {} values, network expects {}",
                input.len(),
                self.input_size()
            )));
        }
        let mut current = input.to_vec();
        for l in 0..self.weights.len() {
            current = self.layer_forward(l, &current).0;
        }
        Ok(current[0])
    }

    /// One layer: returns (activations, pre-activations).
    fn layer_forward(&self, layer: usize, input: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let fan_in = self.layer_sizes[layer];
        let fan_out = self.layer_sizes[layer + 1];
        let act = self.activations[layer];
        let mut outputs = Vec::with_capacity(fan_out);
        let mut pre = Vec::with_capacity(fan_out);
        for k in 0..fan_out {
            let mut z = self.weight(layer, fan_in, k); // bias neuron, constant 1
            for (i, x) in input.iter().enumerate() {
                z += self.weight(layer, i, k) * x;
            }
            pre.push(z);
            outputs.push(act.apply(z));
        }
        (outputs, pre)
    }

    /// Forward pass keeping every layer's activations and pre-activations.
    fn trace(&self, input: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut activations = vec![input.to_vec()];
        let mut pres = Vec::with_capacity(self.weights.len());
        for l in 0..self.weights.len() {
            let (out, pre) = self.layer_forward(l, activations.last().expect("seeded"));
            activations.push(out);
            pres.push(pre);
        }
        (activations, pres)
    }

    /// Empty gradient/moment buffers matching the weight shapes.
    pub fn zeroed_like(&self) -> Vec<Vec<f64>> {
        self.weights.iter().map(|w| vec![0.0; w.len()]).collect()
    }

    /// Plain-text versioned checkpoint; floats use the shortest
    /// round-trippable form, so load(save(net)) is bit-exact.
    pub fn save_checkpoint(&self) -> String {
        let mut out = String::from("emhlab-net 1\n");
        out.push_str("layers");
        for s in &self.layer_sizes {
            out.push_str(&format!(" {s}"));
        }
        out.push('\n');
        for act in &self.activations {
            out.push_str(&format!("activation {}\n", act.tag()));
        }
        for (l, w) in self.weights.iter().enumerate() {
            let rows = self.layer_sizes[l] + 1;
            let cols = self.layer_sizes[l + 1];
            out.push_str(&format!("weights {l} {rows} {cols}\n"));
            for r in 0..rows {
                let row: Vec<String> = (0..cols).map(|c| format!("{}", w[r * cols + c])).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn load_checkpoint(text: &str) -> Result<Network> {
        let mut lines = text.lines();
        let bad = |msg: &str| Error::Integrity(format!("checkpoint: {msg}"));
        match lines.next() {
            Some("emhlab-net 1") => {}
            other => return Err(bad(&format!("unsupported header {other:?}"))),
        }
        let layer_line = lines.next().ok_or_else(|| bad("missing layers line"))?;
        let layer_sizes: Vec<usize> = layer_line
            .strip_prefix("layers")
            .ok_or_else(|| bad("expected layers line"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(&format!("bad layer size '{t}'"))))
            .collect::<Result<_>>()?;
        if layer_sizes.len() < 2 {
            return Err(bad("too few layers"));
        }

        let mut activations = Vec::with_capacity(layer_sizes.len() - 1);
        for _ in 0..layer_sizes.len() - 1 {
            let line = lines.next().ok_or_else(|| bad("missing activation line"))?;
            let tag = line
                .strip_prefix("activation ")
                .ok_or_else(|| bad("expected activation line"))?;
            activations.push(Activation::from_tag(tag)?);
        }

        let mut weights = Vec::with_capacity(layer_sizes.len() - 1);
        for l in 0..layer_sizes.len() - 1 {
            let rows = layer_sizes[l] + 1;
            let cols = layer_sizes[l + 1];
            let header = lines.next().ok_or_else(|| bad("missing weights header"))?;
            let expected = format!("weights {l} {rows} {cols}");
            if header != expected {
                return Err(bad(&format!("expected '{expected}', got '{header}'")));
            }
            let mut w = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let line = lines.next().ok_or_else(|| bad("missing weight row"))?;
                for tok in line.split_whitespace() {
                    let x: f64 = tok
                        .parse()
                        .map_err(|_| bad(&format!("bad weight '{tok}'")))?;
                    w.push(x);
                }
            }
            if w.len() != rows * cols {
                return Err(bad(&format!(
                    "layer {l}: expected {} weights, found {}",
                    rows * cols,
                    w.len()
                )));
            }
            weights.push(w);
        }

        Ok(Network {
            layer_sizes,
            weights,
            activations,
        })
    }
}

/// Input-output pairs for one training step.
#[derive(Debug, Clone)]
pub struct TrainingBatch {
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl TrainingBatch {
    pub fn new(inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() {
            return Err(Error::Precondition("empty training batch".into()));
        }
        if inputs.len() != targets.len() {
            return Err(Error::Shape(format!(
                "{} inputs vs {} targets",
                inputs.len(),
                targets.len()
            )));
        }
        let dim = inputs[0].len();
        if inputs.iter().any(|i| i.len() != dim) {
            return Err(Error::Shape("ragged batch inputs".into()));
        }
        Ok(TrainingBatch { inputs, targets })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Mean squared error of the network over the batch.
pub fn loss(net: &Network, batch: &TrainingBatch) -> Result<f64> {
    let mut total = 0.0;
    for (input, target) in batch.inputs.iter().zip(&batch.targets) {
        let out = net.forward(input)?;
        total += (out - target) * (out - target);
    }
    Ok(total / batch.len() as f64)
}

/// Exact gradient of [`loss`] with respect to every weight, bias rows
/// included, by reverse accumulation.
pub fn gradients(net: &Network, batch: &TrainingBatch) -> Result<Vec<Vec<f64>>> {
    let mut grads = net.zeroed_like();
    let n_layers = net.weights.len();
    let scale = 2.0 / batch.len() as f64;

    for (input, target) in batch.inputs.iter().zip(&batch.targets) {
        if input.len() != net.input_size() {
            return Err(Error::Shape(format!(
                "batch input has {} values, network expects {}",
                input.len(),
                net.input_size()
            )));
        }
        let (acts, pres) = net.trace(input);
        let output = acts[n_layers][0];

        // delta at the output pre-activation
        let mut delta = vec![
            scale
                * (output - target)
                * net.activations[n_layers - 1].derivative(pres[n_layers - 1][0]),
        ];

        for l in (0..n_layers).rev() {
            let fan_in = net.layer_sizes[l];
            let fan_out = net.layer_sizes[l + 1];
            let grad = &mut grads[l];
            for k in 0..fan_out {
                let dk = delta[k];
                for i in 0..fan_in {
                    grad[i * fan_out + k] += acts[l][i] * dk;
                }
                grad[fan_in * fan_out + k] += dk; // bias input is 1
            }
            if l > 0 {
                let mut next = vec![0.0f64; fan_in];
                for (i, slot) in next.iter_mut().enumerate() {
                    let mut sum = 0.0;
                    for (k, dk) in delta.iter().enumerate() {
                        sum += net.weight(l, i, k) * dk;
                    }
                    *slot = net.activations[l - 1].derivative(pres[l - 1][i]) * sum;
                }
                delta = next;
            }
        }
    }
    Ok(grads)
}

/// ADAM hyperparameters.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        AdamHyper {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// ADAM optimizer state: step count plus first/second moment accumulators
/// shaped like the weights.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub step: u64,
    pub first_moment: Vec<Vec<f64>>,
    pub second_moment: Vec<Vec<f64>>,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(net: &Network, hyper: AdamHyper) -> Self {
        AdamState {
            step: 0,
            first_moment: net.zeroed_like(),
            second_moment: net.zeroed_like(),
            hyper,
        }
    }
}

/// One ADAM update with bias-corrected moments.
pub fn adam_step(net: &mut Network, state: &mut AdamState, grads: &[Vec<f64>]) -> Result<()> {
    if grads.len() != net.weights.len()
        || grads
            .iter()
            .zip(net.weights.iter())
            .any(|(g, w)| g.len() != w.len())
    {
        return Err(Error::Shape(
            "gradient shapes do not match the weights".into(),
        ));
    }
    state.step += 1;
    let h = state.hyper;
    let bias1 = 1.0 - h.beta1.powi(state.step as i32);
    let bias2 = 1.0 - h.beta2.powi(state.step as i32);

    for l in 0..grads.len() {
        let w = &mut net.weights[l];
        let m = &mut state.first_moment[l];
        let v = &mut state.second_moment[l];
        for j in 0..w.len() {
            let g = grads[l][j];
            m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g;
            v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g * g;
            let m_hat = m[j] / bias1;
            let v_hat = v[j] / bias2;
            w[j] -= h.learning_rate * m_hat / (v_hat.sqrt() + h.epsilon);
        }
    }
    Ok(())
}

/// Walk-forward training step: full-batch gradient plus ADAM update,
/// `epochs` times. The trained network is only ever used for the very next
/// prediction.
pub fn train_walkforward(
    net: &mut Network,
    state: &mut AdamState,
    batch: &TrainingBatch,
    epochs: usize,
) -> Result<()> {
    for _ in 0..epochs {
        let grads = gradients(net, batch)?;
        adam_step(net, state, &grads)?;
    }
    Ok(())
}
