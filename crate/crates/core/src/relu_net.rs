//! ReLU networks as weight tuples `((A_1, b_1), …, (A_L, b_L))`.
//!
//! Matrices are stored as coordinate triples so that the number of nonzero
//! weights is exact: a stored triple whose value is `0.0` does not count.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::growth::GrowthPair;

/// Sparse `rows × cols` matrix in coordinate format.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidNetwork(format!(
                "matrix shape {rows}×{cols} has an empty dimension"
            )));
        }
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        for &(i, j, v) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::InvalidNetwork(format!(
                    "entry ({i}, {j}) outside a {rows}×{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidNetwork(format!("entry ({i}, {j}) is {v}")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidNetwork(format!("entry ({i}, {j}) stored twice")));
            }
        }
        Ok(Self { rows, cols, entries })
    }

    /// Every entry set to `value`.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        let entries = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j, value)))
            .collect();
        Self::new(rows, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// `‖A‖_{ℓ^0}`.
    pub fn nonzeros(&self) -> usize {
        self.entries.iter().filter(|e| e.2 != 0.0).count()
    }

    /// `‖A‖_∞ = max |A_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.2.abs()))
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for &(i, j, v) in &self.entries {
            out[i] += v * x[j];
        }
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect(),
        }
    }
}

/// One affine map `x ↦ A x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    weights: SparseMatrix,
    bias: Vec<f64>,
}

impl Layer {
    pub fn new(weights: SparseMatrix, bias: Vec<f64>) -> Result<Self> {
        if bias.len() != weights.rows {
            return Err(Error::InvalidNetwork(format!(
                "bias of length {} for a matrix with {} rows",
                bias.len(),
                weights.rows
            )));
        }
        if let Some(b) = bias.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidNetwork(format!("bias entry is {b}")));
        }
        Ok(Self { weights, bias })
    }

    /// Layer with zero bias.
    pub fn linear(weights: SparseMatrix) -> Self {
        let bias = vec![0.0; weights.rows];
        Self { weights, bias }
    }

    pub fn weights(&self) -> &SparseMatrix {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn out_dim(&self) -> usize {
        self.weights.rows
    }

    pub fn in_dim(&self) -> usize {
        self.weights.cols
    }

    fn nonzeros(&self) -> usize {
        self.weights.nonzeros() + self.bias.iter().filter(|&&b| b != 0.0).count()
    }

    fn max_abs(&self) -> f64 {
        self.bias
            .iter()
            .fold(self.weights.max_abs(), |m, b| m.max(b.abs()))
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = self.bias.clone();
        self.weights.apply_into(x, &mut out);
        out
    }
}

/// An immutable ReLU network. Complexity quantities are computed at construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkRecord", into = "NetworkRecord")]
pub struct Network {
    layers: Vec<Layer>,
    weight_count: usize,
    weight_magnitude: f64,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidNetwork("a network needs at least one layer".into()));
        }
        for (k, pair) in layers.windows(2).enumerate() {
            if pair[1].in_dim() != pair[0].out_dim() {
                return Err(Error::InvalidNetwork(format!(
                    "layer {} expects {} inputs but layer {} produces {}",
                    k + 2,
                    pair[1].in_dim(),
                    k + 1,
                    pair[0].out_dim()
                )));
            }
        }
        let weight_count = layers.iter().map(Layer::nonzeros).sum();
        let weight_magnitude = layers.iter().fold(0.0, |m: f64, l| m.max(l.max_abs()));
        Ok(Self {
            layers,
            weight_count,
            weight_magnitude,
        })
    }

    /// The network with every weight zero: one layer `d → 1`.
    pub fn zero(input_dim: usize) -> Result<Self> {
        let a = SparseMatrix::new(1, input_dim, Vec::new())?;
        Self::new(vec![Layer::linear(a)])
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// `L(Φ)`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `W(Φ)`: nonzero entries over all matrices and biases.
    pub fn weight_count(&self) -> usize {
        self.weight_count
    }

    /// `m(Φ)`: largest absolute entry.
    pub fn weight_magnitude(&self) -> f64 {
        self.weight_magnitude
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    /// Architecture `(N_0, …, N_L)`.
    pub fn architecture(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(Layer::out_dim))
            .collect()
    }

    /// `R_ϱΦ(x)`: ReLU between layers, none after the last.
    pub fn realize(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("network input contains {v}")));
        }
        Ok(self.forward(x))
    }

    /// Scalar realization for `d_out = 1` networks; the caller guarantees shapes.
    pub(crate) fn eval_scalar(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.output_dim(), 1);
        self.forward(x)[0]
    }

    fn forward(&self, x: &[f64]) -> Vec<f64> {
        let (last, hidden) = self.layers.split_last().expect("non-empty");
        let mut h = x.to_vec();
        for layer in hidden {
            h = layer.forward(&h);
            h.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        last.forward(&h)
    }

    /// Multiplies `A_L` and `b_L` by `s`.
    pub fn with_output_scale(&self, s: f64) -> Result<Self> {
        let mut layers = self.layers.clone();
        let last = layers.last_mut().expect("non-empty");
        *last = Layer::new(
            last.weights.scaled(s),
            last.bias.iter().map(|b| b * s).collect(),
        )?;
        Self::new(layers)
    }

    /// Relabels the neurons of hidden layer `hidden` (1-based, `< L`) by `perm`:
    /// neuron `k` of the new network is neuron `perm[k]` of the old one.
    pub fn permute_hidden(&self, hidden: usize, perm: &[usize]) -> Result<Self> {
        if hidden == 0 || hidden >= self.depth() {
            return Err(Error::InvalidNetwork(format!("layer {hidden} is not hidden")));
        }
        let width = self.layers[hidden - 1].out_dim();
        let mut inverse = vec![usize::MAX; width];
        if perm.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                got: perm.len(),
            });
        }
        for (new, &old) in perm.iter().enumerate() {
            if old >= width || inverse[old] != usize::MAX {
                return Err(Error::InvalidNetwork("not a permutation".into()));
            }
            inverse[old] = new;
        }
        let mut layers = self.layers.clone();
        let producer = &self.layers[hidden - 1];
        layers[hidden - 1] = Layer::new(
            SparseMatrix::new(
                producer.weights.rows,
                producer.weights.cols,
                producer
                    .weights
                    .entries
                    .iter()
                    .map(|&(i, j, v)| (inverse[i], j, v))
                    .collect(),
            )?,
            perm.iter().map(|&old| producer.bias[old]).collect(),
        )?;
        let consumer = &self.layers[hidden];
        layers[hidden] = Layer::new(
            SparseMatrix::new(
                consumer.weights.rows,
                consumer.weights.cols,
                consumer
                    .weights
                    .entries
                    .iter()
                    .map(|&(i, j, v)| (i, inverse[j], v))
                    .collect(),
            )?,
            consumer.bias.clone(),
        )?;
        Self::new(layers)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Checks `R_ϱΦ ∈ Σ_n`: `d_in = d`, `d_out = 1`, `W ≤ n`, `L ≤ ℓ(n)`, `m ≤ c(n)`.
///
/// An infinite `ℓ(n)` or `c(n)` makes the corresponding constraint vacuous.
pub fn in_sigma(net: &Network, n: u64, growth: &GrowthPair, d: usize) -> bool {
    if net.input_dim() != d || net.output_dim() != 1 || (net.weight_count() as u64) > n {
        return false;
    }
    let depth_ok = match growth.depth_at(n) {
        Extended::Infinite => true,
        Extended::Finite(l) => (net.depth() as f64) <= l,
    };
    let coeff_ok = match growth.coeff_at(n) {
        Extended::Infinite => true,
        Extended::Finite(c) => net.weight_magnitude() <= c,
    };
    depth_ok && coeff_ok
}

/// `d · C^L · n^{⌊L/2⌋}`, saturating to `+∞` on overflow.
pub fn lipschitz_bound(d: usize, c: f64, depth: u32, n: u64) -> f64 {
    if c == 0.0 || d == 0 || n == 0 {
        return 0.0;
    }
    let log = (d as f64).ln() + depth as f64 * c.ln() + (depth / 2) as f64 * (n as f64).ln();
    if log > f64::MAX.ln() {
        return f64::INFINITY;
    }
    let exact = d as f64 * c.powi(depth as i32) * (n as f64).powi((depth / 2) as i32);
    if exact.is_finite() {
        exact
    } else {
        log.exp()
    }
}

/// Shape of a random network for Lipschitz audits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomNetSpec {
    pub input_dim: usize,
    pub depth: usize,
    pub max_width: usize,
    /// Upper bound on `W(Φ)`.
    pub weight_budget: usize,
    /// Entries are drawn uniformly from `[-magnitude, magnitude]`.
    pub magnitude: f64,
}

/// Draws a scalar-output network with exactly `spec.depth` layers, at most
/// `spec.weight_budget` nonzero weights and entries in `[-C, C]`.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, spec: &RandomNetSpec) -> Result<Network> {
    if spec.depth == 0 || spec.input_dim == 0 || spec.max_width == 0 {
        return Err(Error::InvalidNetwork(format!("degenerate random spec {spec:?}")));
    }
    let mut dims = vec![spec.input_dim];
    for _ in 1..spec.depth {
        dims.push(rng.random_range(1..=spec.max_width));
    }
    dims.push(1);

    // Slot k addresses matrix entries first, then biases, layer by layer.
    let slots: Vec<(usize, Option<(usize, usize)>, usize)> = dims
        .windows(2)
        .enumerate()
        .flat_map(|(l, w)| {
            let (cols, rows) = (w[0], w[1]);
            (0..rows)
                .flat_map(move |i| (0..cols).map(move |j| (l, Some((i, j)), 0)))
                .chain((0..rows).map(move |i| (l, None, i)))
        })
        .collect();
    let keep = spec.weight_budget.min(slots.len());
    let chosen = sample(rng, slots.len(), keep);

    let mut entries: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); spec.depth];
    let mut biases: Vec<Vec<f64>> = dims[1..].iter().map(|&r| vec![0.0; r]).collect();
    for k in chosen.iter() {
        let v = rng.random_range(-spec.magnitude..=spec.magnitude);
        match slots[k] {
            (l, Some((i, j)), _) => entries[l].push((i, j, v)),
            (l, None, i) => biases[l][i] = v,
        }
    }
    let layers = entries
        .into_iter()
        .zip(biases)
        .enumerate()
        .map(|(l, (e, b))| Layer::new(SparseMatrix::new(dims[l + 1], dims[l], e)?, b))
        .collect::<Result<Vec<_>>>()?;
    Network::new(layers)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerRecord {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkRecord {
    layers: Vec<LayerRecord>,
}

impl TryFrom<NetworkRecord> for Network {
    type Error = Error;

    fn try_from(rec: NetworkRecord) -> Result<Self> {
        let layers = rec
            .layers
            .into_iter()
            .map(|l| Layer::new(SparseMatrix::new(l.rows, l.cols, l.entries)?, l.bias))
            .collect::<Result<Vec<_>>>()?;
        Network::new(layers)
    }
}

impl From<Network> for NetworkRecord {
    fn from(net: Network) -> Self {
        NetworkRecord {
            layers: net
                .layers
                .into_iter()
                .map(|l| LayerRecord {
                    rows: l.weights.rows,
                    cols: l.weights.cols,
                    entries: l.weights.entries,
                    bias: l.bias,
                })
                .collect(),
        }
    }
}
