//! Hinge loss for binary linear classification and its subgradient.

use std::fmt;

use crate::error::{Error, Result};
use crate::vector::GradVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "+1",
            Label::Negative => "-1",
        })
    }
}

/// A binary example with sparse features. Indices are 1-based and strictly
/// increasing; values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseExample {
    features: Vec<(u32, f64)>,
    label: Label,
}

impl SparseExample {
    pub fn new(features: Vec<(u32, f64)>, label: Label) -> Result<Self> {
        let mut prev = 0u32;
        for &(idx, val) in &features {
            if idx <= prev {
                return Err(Error::InvalidInput(format!(
                    "feature indices must be >= 1 and strictly increasing (got {idx} after {prev})"
                )));
            }
            if !val.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "feature {idx} has non-finite value {val}"
                )));
            }
            prev = idx;
        }
        Ok(SparseExample { features, label })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_parts(features: Vec<(u32, f64)>, label: Label) -> Self {
        SparseExample { features, label }
    }

    pub fn features(&self) -> &[(u32, f64)] {
        &self.features
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn max_index(&self) -> u32 {
        self.features.last().map_or(0, |&(i, _)| i)
    }

    /// `<w, x>`; errors if a feature index exceeds the dimension of `w`.
    pub fn dot(&self, w: &GradVector) -> Result<f64> {
        let max = self.max_index() as usize;
        if max > w.dim() {
            return Err(Error::InvalidInput(format!(
                "feature index {max} exceeds dimension {}",
                w.dim()
            )));
        }
        Ok(self
            .features
            .iter()
            .map(|&(i, v)| w[i as usize - 1] * v)
            .sum())
    }

    /// Serializes as a libsvm line, e.g. `+1 3:0.5 7:1.2`.
    pub fn to_libsvm(&self) -> String {
        let mut out = self.label.to_string();
        for (i, v) in &self.features {
            out.push_str(&format!(" {i}:{v}"));
        }
        out
    }
}

/// Subgradient of the hinge loss, a multiple of the example's feature vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HingeGradient {
    /// `g = coef * x`; zero when the margin is satisfied.
    pub coef: f64,
}

impl HingeGradient {
    pub fn is_zero(&self) -> bool {
        self.coef == 0.0
    }

    /// Writes `coef * x` into `out`, which must be all-zero on entry.
    pub fn scatter(&self, x: &SparseExample, out: &mut GradVector) {
        if self.coef == 0.0 {
            return;
        }
        let vals = out.values_mut();
        for &(i, v) in x.features() {
            vals[i as usize - 1] = self.coef * v;
        }
    }

    /// Resets the entries written by [`scatter`](Self::scatter).
    pub fn clear(x: &SparseExample, out: &mut GradVector) {
        let vals = out.values_mut();
        for &(i, _) in x.features() {
            vals[i as usize - 1] = 0.0;
        }
    }

    pub fn to_dense(&self, x: &SparseExample, dim: usize) -> GradVector {
        let mut g = GradVector::zeros(dim);
        self.scatter(x, &mut g);
        g
    }
}

/// `max(0, 1 - y <w, x>)`.
pub fn hinge_loss(w: &GradVector, x: &SparseExample) -> Result<f64> {
    Ok(hinge_eval(w, x)?.0)
}

/// `-y x` while the margin is violated (`y <w, x> < 1`), zero otherwise,
/// including at the kink `y <w, x> = 1`.
pub fn hinge_subgradient(w: &GradVector, x: &SparseExample) -> Result<HingeGradient> {
    Ok(hinge_eval(w, x)?.1)
}

/// Loss and subgradient with a single dot product.
pub fn hinge_eval(w: &GradVector, x: &SparseExample) -> Result<(f64, HingeGradient)> {
    let y = x.label().sign();
    let margin = y * x.dot(w)?;
    let slack = 1.0 - margin;
    if slack > 0.0 {
        Ok((slack, HingeGradient { coef: -y }))
    } else {
        Ok((0.0, HingeGradient { coef: 0.0 }))
    }
}
