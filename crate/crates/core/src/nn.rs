//! Single-hidden-layer feedforward network trained by full-batch gradient
//! descent.
//!
//! The hidden layer uses `tanh`, the output is linear, and the loss is the
//! plain mean squared error `(1/N)·Σ(ŷ−y)²`. Weights are stored row-major:
//! `w_ih[j * n_in + i]` connects input `i` to hidden unit `j`, and
//! `w_ho[k * n_hidden + j]` connects hidden unit `j` to output `k`.

use alloc::format;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::{rng, Error, Result};

/// Layer sizes. The output layer always has a single neuron.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TopologyDoc")]
pub struct Topology {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
}

#[derive(Deserialize)]
struct TopologyDoc {
    n_in: usize,
    n_hidden: usize,
    n_out: usize,
}

impl TryFrom<TopologyDoc> for Topology {
    type Error = Error;

    fn try_from(doc: TopologyDoc) -> Result<Self> {
        if doc.n_out != 1 {
            return Err(Error::InvalidTopology(format!(
                "n_out must be 1, got {}",
                doc.n_out
            )));
        }
        Self::new(doc.n_in, doc.n_hidden)
    }
}

impl Topology {
    pub fn new(n_in: usize, n_hidden: usize) -> Result<Self> {
        if n_in == 0 || n_hidden == 0 {
            return Err(Error::InvalidTopology(format!(
                "layer sizes must be at least 1 (got {n_in}-{n_hidden}-1)"
            )));
        }
        Ok(Self {
            n_in,
            n_hidden,
            n_out: 1,
        })
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    /// Number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        (self.n_in + 1) * self.n_hidden + (self.n_hidden + 1) * self.n_out
    }

    pub fn with_inputs(&self, n_in: usize) -> Result<Self> {
        Self::new(n_in, self.n_hidden)
    }

    pub fn with_hidden(&self, n_hidden: usize) -> Result<Self> {
        Self::new(self.n_in, n_hidden)
    }
}

impl core::fmt::Display for Topology {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}-{}-{}", self.n_in, self.n_hidden, self.n_out)
    }
}

/// Weights and biases of a network. Gradients share this layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsDoc", into = "ParamsDoc")]
pub struct NetworkParameters {
    topology: Topology,
    w_ih: Vec<f64>,
    b_h: Vec<f64>,
    w_ho: Vec<f64>,
    b_o: Vec<f64>,
}

pub type Gradients = NetworkParameters;

/// On-disk form: topology plus row-major nested weight arrays.
#[derive(Serialize, Deserialize)]
struct ParamsDoc {
    topology: Topology,
    w_ih: Vec<Vec<f64>>,
    b_h: Vec<f64>,
    w_ho: Vec<Vec<f64>>,
    b_o: Vec<f64>,
}

impl From<NetworkParameters> for ParamsDoc {
    fn from(p: NetworkParameters) -> Self {
        let n_in = p.topology.n_in;
        let n_hidden = p.topology.n_hidden;
        Self {
            topology: p.topology,
            w_ih: p.w_ih.chunks(n_in).map(<[f64]>::to_vec).collect(),
            b_h: p.b_h,
            w_ho: p.w_ho.chunks(n_hidden).map(<[f64]>::to_vec).collect(),
            b_o: p.b_o,
        }
    }
}

impl TryFrom<ParamsDoc> for NetworkParameters {
    type Error = Error;

    fn try_from(doc: ParamsDoc) -> Result<Self> {
        let flatten = |rows: Vec<Vec<f64>>, n_rows: usize, n_cols: usize| -> Result<Vec<f64>> {
            if rows.len() != n_rows {
                return Err(Error::DimensionMismatch {
                    expected: n_rows,
                    got: rows.len(),
                });
            }
            let mut flat = Vec::with_capacity(n_rows * n_cols);
            for r in rows {
                if r.len() != n_cols {
                    return Err(Error::DimensionMismatch {
                        expected: n_cols,
                        got: r.len(),
                    });
                }
                flat.extend(r);
            }
            Ok(flat)
        };
        let t = doc.topology;
        Self::from_parts(
            t,
            flatten(doc.w_ih, t.n_hidden, t.n_in)?,
            doc.b_h,
            flatten(doc.w_ho, t.n_out, t.n_hidden)?,
            doc.b_o,
        )
    }
}

impl NetworkParameters {
    pub fn from_parts(
        topology: Topology,
        w_ih: Vec<f64>,
        b_h: Vec<f64>,
        w_ho: Vec<f64>,
        b_o: Vec<f64>,
    ) -> Result<Self> {
        let check = |v: &[f64], len: usize, what: &'static str| -> Result<()> {
            if v.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(what));
            }
            Ok(())
        };
        let Topology {
            n_in,
            n_hidden,
            n_out,
        } = topology;
        check(&w_ih, n_hidden * n_in, "w_ih")?;
        check(&b_h, n_hidden, "b_h")?;
        check(&w_ho, n_out * n_hidden, "w_ho")?;
        check(&b_o, n_out, "b_o")?;
        Ok(Self {
            topology,
            w_ih,
            b_h,
            w_ho,
            b_o,
        })
    }

    pub fn zeros(topology: Topology) -> Self {
        let Topology {
            n_in,
            n_hidden,
            n_out,
        } = topology;
        Self {
            topology,
            w_ih: alloc::vec![0.0; n_hidden * n_in],
            b_h: alloc::vec![0.0; n_hidden],
            w_ho: alloc::vec![0.0; n_out * n_hidden],
            b_o: alloc::vec![0.0; n_out],
        }
    }

    /// Every entry drawn independently from U[-0.5, 0.5] with a ChaCha8
    /// stream seeded by `seed`, in the order w_ih, b_h, w_ho, b_o.
    pub fn init(topology: Topology, seed: u64) -> Self {
        let mut rng = rng::seeded(seed);
        let mut p = Self::zeros(topology);
        p.for_each_mut(|v| *v = rng.gen_range(-0.5..=0.5));
        p
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn w_ih(&self) -> &[f64] {
        &self.w_ih
    }

    pub fn b_h(&self) -> &[f64] {
        &self.b_h
    }

    pub fn w_ho(&self) -> &[f64] {
        &self.w_ho
    }

    pub fn b_o(&self) -> &[f64] {
        &self.b_o
    }

    /// All entries in storage order (w_ih, b_h, w_ho, b_o).
    pub fn iter(&self) -> impl Iterator<Item = &f64> + '_ {
        self.w_ih
            .iter()
            .chain(&self.b_h)
            .chain(&self.w_ho)
            .chain(&self.b_o)
    }

    pub fn for_each_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        self.w_ih
            .iter_mut()
            .chain(&mut self.b_h)
            .chain(&mut self.w_ho)
            .chain(&mut self.b_o)
            .for_each(&mut f);
    }

    /// Flat copy of all entries in storage order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().copied().collect()
    }

    /// Inverse of [`to_flat`](Self::to_flat).
    pub fn from_flat(topology: Topology, flat: &[f64]) -> Result<Self> {
        if flat.len() != topology.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: topology.parameter_count(),
                got: flat.len(),
            });
        }
        let mut p = Self::zeros(topology);
        let mut it = flat.iter();
        p.for_each_mut(|v| *v = *it.next().unwrap());
        Ok(p)
    }

    /// Returns `(prediction, hidden_activations)`.
    pub fn forward(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_width(x.len())?;
        let mut hidden = alloc::vec![0.0; self.topology.n_hidden];
        let y = self.forward_into(x, &mut hidden);
        Ok((y, hidden))
    }

    fn forward_into(&self, x: &[f64], hidden: &mut [f64]) -> f64 {
        let n_in = self.topology.n_in;
        for (j, h) in hidden.iter_mut().enumerate() {
            let w = &self.w_ih[j * n_in..(j + 1) * n_in];
            let z = w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b_h[j];
            *h = activation(z);
        }
        self.w_ho
            .iter()
            .zip(hidden.iter())
            .map(|(w, h)| w * h)
            .sum::<f64>()
            + self.b_o[0]
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.topology.n_in {
            return Err(Error::DimensionMismatch {
                expected: self.topology.n_in,
                got: width,
            });
        }
        Ok(())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.topology != other.topology {
            return Err(Error::DimensionMismatch {
                expected: self.topology.parameter_count(),
                got: other.topology.parameter_count(),
            });
        }
        Ok(())
    }
}

/// Hidden-layer squashing function.
pub fn activation(z: f64) -> f64 {
    libm::tanh(z)
}

/// Mean squared error `(1/N)·Σ(ŷ−y)²`.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    if predictions.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: targets.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("mse of zero samples"));
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Exact gradient of [`mse_loss`] over the batch with respect to every
/// weight and bias.
pub fn backward(
    params: &NetworkParameters,
    batch_x: &Matrix,
    batch_y: &[f64],
) -> Result<Gradients> {
    loss_and_gradients(params, batch_x, batch_y).map(|(_, g)| g)
}

fn loss_and_gradients(
    params: &NetworkParameters,
    batch_x: &Matrix,
    batch_y: &[f64],
) -> Result<(f64, Gradients)> {
    if batch_x.rows() == 0 {
        return Err(Error::EmptyInput("gradient of an empty batch"));
    }
    if batch_x.rows() != batch_y.len() {
        return Err(Error::LengthMismatch {
            left: batch_x.rows(),
            right: batch_y.len(),
        });
    }
    params.check_width(batch_x.cols())?;

    let Topology { n_in, n_hidden, .. } = params.topology;
    let scale = 2.0 / batch_y.len() as f64;
    let mut grads = NetworkParameters::zeros(params.topology);
    let mut hidden = alloc::vec![0.0; n_hidden];
    let mut loss = 0.0;

    for (x, &y) in batch_x.iter_rows().zip(batch_y) {
        let err = params.forward_into(x, &mut hidden) - y;
        loss += err * err;
        let d_out = scale * err;
        grads.b_o[0] += d_out;
        for (j, &h) in hidden.iter().enumerate() {
            grads.w_ho[j] += d_out * h;
            let d_hidden = d_out * params.w_ho[j] * (1.0 - h * h);
            grads.b_h[j] += d_hidden;
            let row = &mut grads.w_ih[j * n_in..(j + 1) * n_in];
            for (g, xi) in row.iter_mut().zip(x) {
                *g += d_hidden * xi;
            }
        }
    }
    Ok((loss / batch_y.len() as f64, grads))
}

/// `p' = p − learning_rate·g` for every entry.
pub fn gd_step(
    params: &NetworkParameters,
    gradients: &Gradients,
    learning_rate: f64,
) -> Result<NetworkParameters> {
    params.check_shape(gradients)?;
    if learning_rate.is_nan() || learning_rate <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "learning rate must be positive, got {learning_rate}"
        )));
    }
    let mut next = params.clone();
    let mut g = gradients.iter();
    next.for_each_mut(|p| *p -= learning_rate * g.next().unwrap());
    Ok(next)
}

/// Applies [`NetworkParameters::forward`] to every row, preserving order.
pub fn predict(params: &NetworkParameters, rows: &Matrix) -> Result<Vec<f64>> {
    if rows.rows() == 0 {
        return Ok(Vec::new());
    }
    params.check_width(rows.cols())?;
    let mut hidden = alloc::vec![0.0; params.topology.n_hidden];
    Ok(rows
        .iter_rows()
        .map(|x| params.forward_into(x, &mut hidden))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Consecutive non-improving validation epochs tolerated before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            max_epochs: 1000,
            patience: 25,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(Error::InvalidConfig("patience must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub train_loss_curve: Vec<f64>,
    pub val_loss_curve: Vec<f64>,
    pub final_params: NetworkParameters,
    pub best_val_loss: f64,
}

/// Borrowed inputs and targets.
#[derive(Debug, Clone, Copy)]
pub struct Samples<'a> {
    pub x: &'a Matrix,
    pub y: &'a [f64],
}

impl<'a> Samples<'a> {
    pub fn new(x: &'a Matrix, y: &'a [f64]) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Full-batch gradient descent, one step per epoch.
///
/// After every step the train and validation losses of the updated
/// parameters are recorded. Training stops after `max_epochs`, or once the
/// validation loss has failed to improve on its best value for `patience`
/// consecutive epochs. The returned parameters are those with the lowest
/// validation loss.
pub fn train(
    train_set: Samples<'_>,
    val_set: Samples<'_>,
    topology: Topology,
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    if val_set.is_empty() {
        return Err(Error::EmptyInput("validation set"));
    }
    for width in [train_set.x.cols(), val_set.x.cols()] {
        if width != topology.n_in() {
            return Err(Error::DimensionMismatch {
                expected: topology.n_in(),
                got: width,
            });
        }
    }

    let mut params = NetworkParameters::init(topology, config.seed);
    let mut best = params.clone();
    let mut best_val_loss = f64::INFINITY;
    let mut train_curve = Vec::with_capacity(config.max_epochs);
    let mut val_curve = Vec::with_capacity(config.max_epochs);
    let mut stale = 0;

    for epoch in 1..=config.max_epochs {
        let grads = backward(&params, train_set.x, train_set.y)?;
        params = gd_step(&params, &grads, config.learning_rate)?;

        let train_loss = mse_loss(&predict(&params, train_set.x)?, train_set.y)?;
        let val_loss = mse_loss(&predict(&params, val_set.x)?, val_set.y)?;
        for loss in [train_loss, val_loss] {
            if !loss.is_finite() {
                return Err(Error::Divergence { epoch, loss });
            }
        }
        train_curve.push(train_loss);
        val_curve.push(val_loss);

        if val_loss < best_val_loss {
            best_val_loss = val_loss;
            best = params.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= config.patience {
                break;
            }
        }
    }

    Ok(TrainReport {
        epochs_run: train_curve.len(),
        train_loss_curve: train_curve,
        val_loss_curve: val_curve,
        final_params: best,
        best_val_loss,
    })
}
