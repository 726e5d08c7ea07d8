use crate::error::Result;
use crate::vector::GradVector;

/// Common step contract shared by every optimizer in the crate.
///
/// A learner exposes the iterate it will play next. `step` feeds the
/// subgradient observed at that iterate and returns the following one.
pub trait OnlineLearner: Send {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn iterate(&self) -> &GradVector;

    fn step(&mut self, g: &GradVector) -> Result<&GradVector>;

    /// Number of scale epochs used so far, for learners that have them.
    fn epochs(&self) -> Option<usize> {
        None
    }
}

/// Plays the origin forever. Useful as a reference learner against the adversary.
#[derive(Debug, Clone)]
pub struct ZeroPlayer {
    w: GradVector,
}

impl ZeroPlayer {
    pub fn new(dim: usize) -> Self {
        ZeroPlayer {
            w: GradVector::zeros(dim),
        }
    }
}

impl OnlineLearner for ZeroPlayer {
    fn name(&self) -> &str {
        "zero"
    }

    fn dim(&self) -> usize {
        self.w.dim()
    }

    fn iterate(&self) -> &GradVector {
        &self.w
    }

    fn step(&mut self, g: &GradVector) -> Result<&GradVector> {
        g.check_dim(self.w.dim())?;
        Ok(&self.w)
    }
}
