//! Rectifier feedforward networks: evaluation, pre-activations, activation
//! patterns, and the exact affine map the network applies near a point.
//!
//! A net is `f = W_out ∘ h_L ∘ … ∘ h_1` where each hidden layer applies
//! `h_l = max(W_l h_{l−1} + b_l, 0)` elementwise and the output layer is
//! affine. All operations are pure reads; nets are immutable once built.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One affine stage `x ↦ W x + b`.
#[derive(Debug, Clone)]
pub struct Layer {
    w: Array2<f64>,
    b: Array1<f64>,
}

impl Layer {
    pub fn new(w: Array2<f64>, b: Array1<f64>) -> Result<Self> {
        if w.nrows() == 0 || w.ncols() == 0 {
            return Err(Error::Invalid("layer must have at least one unit and one input".into()));
        }
        if w.nrows() != b.len() {
            return Err(Error::DimMismatch(format!(
                "layer weight matrix has {} rows but bias has {} entries",
                w.nrows(),
                b.len()
            )));
        }
        if w.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("layer contains non-finite entries".into()));
        }
        Ok(Layer { w, b })
    }

    /// Linear map with zero bias.
    pub fn linear(w: Array2<f64>) -> Result<Self> {
        let b = Array1::zeros(w.nrows());
        Layer::new(w, b)
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn bias(&self) -> &Array1<f64> {
        &self.b
    }

    pub fn out_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn in_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn apply(&self, x: &Array1<f64>) -> Array1<f64> {
        self.w.dot(x) + &self.b
    }
}

/// A rectifier feedforward network with at least one hidden layer and an
/// affine output layer (whose bias defaults to zero but is permitted, so
/// imported nets load without loss).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawNet", into = "RawNet")]
pub struct ReLUNet {
    input_dim: usize,
    hidden: Vec<Layer>,
    output: Layer,
}

impl ReLUNet {
    pub fn new(input_dim: usize, hidden: Vec<Layer>, output: Layer) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Invalid("input dimension must be positive".into()));
        }
        if hidden.is_empty() {
            return Err(Error::Invalid("a ReLU net needs at least one hidden layer".into()));
        }
        let mut prev = input_dim;
        for (l, layer) in hidden.iter().enumerate() {
            if layer.in_dim() != prev {
                return Err(Error::DimMismatch(format!(
                    "hidden[{l}].W: expected {prev} columns (width of previous layer), got {}",
                    layer.in_dim()
                )));
            }
            prev = layer.out_dim();
        }
        if output.in_dim() != prev {
            return Err(Error::DimMismatch(format!(
                "output.W: expected {prev} columns (width of last hidden layer), got {}",
                output.in_dim()
            )));
        }
        Ok(ReLUNet {
            input_dim,
            hidden,
            output,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.output.out_dim()
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    pub fn hidden_widths(&self) -> Vec<usize> {
        self.hidden.iter().map(Layer::out_dim).collect()
    }

    pub fn hidden_layers(&self) -> &[Layer] {
        &self.hidden
    }

    pub fn output_layer(&self) -> &Layer {
        &self.output
    }

    /// Net computing the post-activation of one unit: hidden layers
    /// `1..=layer` with an output row selecting unit `unit` (1-based
    /// indices).
    pub fn truncate_to_unit(&self, layer: usize, unit: usize) -> Result<ReLUNet> {
        if layer == 0 || layer > self.depth() {
            return Err(Error::Usage(format!(
                "layer index {layer} out of range 1..={}",
                self.depth()
            )));
        }
        let width = self.hidden[layer - 1].out_dim();
        if unit == 0 || unit > width {
            return Err(Error::Usage(format!(
                "unit index {unit} out of range 1..={width} in layer {layer}"
            )));
        }
        let mut w = Array2::zeros((1, width));
        w[[0, unit - 1]] = 1.0;
        ReLUNet::new(
            self.input_dim,
            self.hidden[..layer].to_vec(),
            Layer::linear(w)?,
        )
    }

    fn check_input(&self, x: &Array1<f64>) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimMismatch(format!(
                "input has {} entries but the net expects {}",
                x.len(),
                self.input_dim
            )));
        }
        Ok(())
    }

    /// Forward pass `W_out·h_L + b_out` with `h_l = max(W_l h_{l−1} + b_l, 0)`.
    pub fn eval(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        self.check_input(x)?;
        let mut h = x.clone();
        for layer in &self.hidden {
            h = layer.apply(&h).mapv(|v| v.max(0.0));
        }
        Ok(self.output.apply(&h))
    }

    /// Convenience for scalar-output nets.
    pub fn eval_scalar(&self, x: &Array1<f64>) -> Result<f64> {
        let y = self.eval(x)?;
        if y.len() != 1 {
            return Err(Error::Usage(format!(
                "net has {} outputs; expected a scalar",
                y.len()
            )));
        }
        Ok(y[0])
    }

    /// Pre-activation vectors `f_1, …, f_L` of the forward pass at `x`.
    pub fn pre_activations(&self, x: &Array1<f64>) -> Result<Vec<Array1<f64>>> {
        self.check_input(x)?;
        let mut h = x.clone();
        let mut pre = Vec::with_capacity(self.hidden.len());
        for layer in &self.hidden {
            let f = layer.apply(&h);
            h = f.mapv(|v| v.max(0.0));
            pre.push(f);
        }
        Ok(pre)
    }

    /// Indicator bits `s_{l,j} = 1 ⟺ f_{l,j} > 0`; exact zeros get bit 0.
    pub fn activation_pattern(&self, x: &Array1<f64>) -> Result<ActivationPattern> {
        let pre = self.pre_activations(x)?;
        Ok(ActivationPattern {
            bits: pre
                .iter()
                .map(|f| f.iter().map(|&v| v > 0.0).collect())
                .collect(),
        })
    }

    /// The affine map the net applies on the linear region containing `x`:
    /// `eval(x') = u·x' + c` for every `x'` sharing the activation pattern.
    pub fn local_affine(&self, x: &Array1<f64>) -> Result<LocalAffine> {
        let pattern = self.activation_pattern(x)?;
        self.pattern_affine(&pattern)
    }

    /// The affine map obtained by fixing the indicators to `pattern`:
    /// `u = W_out·diag(s_L)·W_L ⋯ diag(s_1)·W_1` with the matching
    /// telescoped bias.
    pub fn pattern_affine(&self, pattern: &ActivationPattern) -> Result<LocalAffine> {
        if pattern.bits.len() != self.depth() {
            return Err(Error::DimMismatch(format!(
                "pattern has {} layers but the net has {}",
                pattern.bits.len(),
                self.depth()
            )));
        }
        let mut a = Array2::eye(self.input_dim);
        let mut c = Array1::zeros(self.input_dim);
        for (l, layer) in self.hidden.iter().enumerate() {
            let bits = &pattern.bits[l];
            if bits.len() != layer.out_dim() {
                return Err(Error::DimMismatch(format!(
                    "pattern layer {} has {} bits but the layer has {} units",
                    l + 1,
                    bits.len(),
                    layer.out_dim()
                )));
            }
            let mut next_a = layer.w.dot(&a);
            let mut next_c = layer.w.dot(&c) + &layer.b;
            for (j, &on) in bits.iter().enumerate() {
                if !on {
                    next_a.row_mut(j).fill(0.0);
                    next_c[j] = 0.0;
                }
            }
            a = next_a;
            c = next_c;
        }
        Ok(LocalAffine {
            u: self.output.w.dot(&a),
            c: self.output.w.dot(&c) + &self.output.b,
        })
    }

    /// Total parameter count: all weight entries plus hidden biases; the
    /// output bias counts only when it is not identically zero.
    pub fn param_count(&self) -> usize {
        let mut n = 0;
        for layer in &self.hidden {
            n += layer.w.len() + layer.b.len();
        }
        n += self.output.w.len();
        if self.output.b.iter().any(|&v| v != 0.0) {
            n += self.output.b.len();
        }
        n
    }

    /// Product of layer row-sum (∞→∞ operator) norms: a Lipschitz constant
    /// for the whole net in the max norm.
    pub fn lipschitz_inf_bound(&self) -> f64 {
        let row_sum = |w: &Array2<f64>| {
            w.rows()
                .into_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0f64, f64::max)
        };
        let mut k = row_sum(&self.output.w);
        for layer in &self.hidden {
            k *= row_sum(&layer.w);
        }
        k
    }
}

/// Per-layer indicator bits of which rectifier units fire.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivationPattern {
    bits: Vec<Vec<bool>>,
}

impl ActivationPattern {
    pub fn new(bits: Vec<Vec<bool>>) -> Self {
        ActivationPattern { bits }
    }

    pub fn all_zero(widths: &[usize]) -> Self {
        ActivationPattern {
            bits: widths.iter().map(|&w| vec![false; w]).collect(),
        }
    }

    pub fn layers(&self) -> &[Vec<bool>] {
        &self.bits
    }

    pub fn layer(&self, l: usize) -> &[bool] {
        &self.bits[l]
    }

    /// Compact text form like `10|01`, layer bits separated by `|`.
    pub fn key(&self) -> String {
        self.bits
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl std::fmt::Display for ActivationPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.key())
    }
}

/// The exact affine map `x ↦ u·x + c` a net applies on one linear region.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalAffine {
    /// Weight, one row per output dimension (`n_out × n_0`).
    pub u: Array2<f64>,
    /// Bias, one entry per output dimension.
    pub c: Array1<f64>,
}

impl LocalAffine {
    pub fn eval(&self, x: &Array1<f64>) -> Array1<f64> {
        self.u.dot(x) + &self.c
    }

    /// Row view for scalar-output maps.
    pub fn scalar(&self) -> Result<(Array1<f64>, f64)> {
        if self.u.nrows() != 1 {
            return Err(Error::Usage(format!(
                "affine map has {} output rows; expected a scalar map",
                self.u.nrows()
            )));
        }
        Ok((self.u.row(0).to_owned(), self.c[0]))
    }
}

// --- JSON form ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RawLayer {
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    #[serde(default)]
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawNet {
    input_dim: usize,
    hidden: Vec<RawLayer>,
    output: RawLayer,
}

fn layer_from_raw(raw: RawLayer, what: &str) -> Result<Layer> {
    let rows = raw.w.len();
    let cols = raw.w.first().map_or(0, |r| r.len());
    if raw.w.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid(format!("{what}.W: rows have unequal lengths")));
    }
    let w = Array2::from_shape_vec((rows, cols), raw.w.concat())
        .map_err(|e| Error::Invalid(format!("{what}.W: {e}")))?;
    let b = if raw.b.is_empty() {
        Array1::zeros(rows)
    } else {
        if raw.b.len() != rows {
            return Err(Error::DimMismatch(format!(
                "{what}.b: expected {rows} entries to match W, got {}",
                raw.b.len()
            )));
        }
        Array1::from_vec(raw.b)
    };
    Layer::new(w, b).map_err(|e| match e {
        Error::Invalid(msg) => Error::Invalid(format!("{what}: {msg}")),
        Error::DimMismatch(msg) => Error::DimMismatch(format!("{what}: {msg}")),
        other => other,
    })
}

impl TryFrom<RawNet> for ReLUNet {
    type Error = Error;
    fn try_from(raw: RawNet) -> Result<Self> {
        let mut hidden = Vec::with_capacity(raw.hidden.len());
        for (l, layer) in raw.hidden.into_iter().enumerate() {
            hidden.push(layer_from_raw(layer, &format!("hidden[{l}]"))?);
        }
        let output = layer_from_raw(raw.output, "output")?;
        ReLUNet::new(raw.input_dim, hidden, output)
    }
}

impl From<ReLUNet> for RawNet {
    fn from(net: ReLUNet) -> Self {
        let to_raw = |layer: &Layer| RawLayer {
            w: layer.w.rows().into_iter().map(|r| r.to_vec()).collect(),
            b: layer.b.to_vec(),
        };
        RawNet {
            input_dim: net.input_dim,
            hidden: net.hidden.iter().map(to_raw).collect(),
            output: to_raw(&net.output),
        }
    }
}
