//! Single-sample stochastic gradient streams over a dataset.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, LossKind, ObjectiveScale};
use crate::error::{Error, Result};

/// How samples are drawn: i.i.d. uniform, or a fresh random permutation per
/// pass over the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleOrder {
    WithReplacement,
    ShuffleEachEpoch,
}

/// Draws one sample at a time and emits its subgradient, scaled so the
/// expectation matches the objective under the chosen [`ObjectiveScale`]
/// (factor `n` for the sum objective, 1 for the mean).
///
/// Owns its RNG: identical seeds give identical draw sequences. One epoch is
/// `n` draws under either order.
#[derive(Debug, Clone)]
pub struct StochasticOracle<'a> {
    data: &'a Dataset,
    kind: LossKind,
    scale: ObjectiveScale,
    order: SampleOrder,
    rng: ChaCha8Rng,
    perm: Vec<usize>,
    pos: usize,
    draws: usize,
}

/// What one draw produced (besides the gradient written to the buffer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawInfo {
    /// Row index that was sampled.
    pub index: usize,
    /// Scaled per-sample loss: an unbiased estimate of the objective.
    pub loss_estimate: f64,
}

impl<'a> StochasticOracle<'a> {
    pub fn new(
        data: &'a Dataset,
        kind: LossKind,
        seed: u64,
        order: SampleOrder,
        scale: ObjectiveScale,
    ) -> Result<Self> {
        if data.n() == 0 {
            return Err(Error::Config("cannot sample from an empty dataset".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..data.n()).collect();
        if order == SampleOrder::ShuffleEachEpoch {
            perm.shuffle(&mut rng);
        }
        Ok(Self {
            data,
            kind,
            scale,
            order,
            rng,
            perm,
            pos: 0,
            draws: 0,
        })
    }

    /// Write the next scaled subgradient at `w` into `out` (length `d`,
    /// overwritten) and report which sample produced it.
    pub fn fill_next(&mut self, w: &[f64], out: &mut [f64]) -> Result<DrawInfo> {
        if w.len() != self.data.dim() || out.len() != self.data.dim() {
            return Err(Error::Config(format!(
                "oracle over dimension {} fed buffers of length {} / {}",
                self.data.dim(),
                w.len(),
                out.len()
            )));
        }
        let index = match self.order {
            SampleOrder::WithReplacement => self.rng.random_range(0..self.data.n()),
            SampleOrder::ShuffleEachEpoch => {
                if self.pos == self.data.n() {
                    self.perm.shuffle(&mut self.rng);
                    self.pos = 0;
                }
                let i = self.perm[self.pos];
                self.pos += 1;
                i
            }
        };
        let factor = self.scale.per_sample_factor(self.data.n());
        let (value, coeff) = self
            .kind
            .loss_coeff(w, self.data.row(index), self.data.label(index));
        out.fill(0.0);
        self.data.row(index).add_scaled_into(coeff * factor, out);
        self.draws += 1;
        Ok(DrawInfo {
            index,
            loss_estimate: value * factor,
        })
    }

    /// Convenience wrapper allocating the gradient buffer.
    pub fn next_grad(&mut self, w: &[f64]) -> Result<(Vec<f64>, DrawInfo)> {
        let mut out = vec![0.0; self.data.dim()];
        let info = self.fill_next(w, &mut out)?;
        Ok((out, info))
    }

    /// Completed passes over the data.
    pub fn epoch(&self) -> usize {
        self.draws / self.data.n()
    }

    /// Total draws so far.
    pub fn draws(&self) -> usize {
        self.draws
    }

    /// Draws per epoch (the sample count).
    pub fn samples_per_epoch(&self) -> usize {
        self.data.n()
    }
}
