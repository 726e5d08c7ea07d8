use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// Dense real vector carrying gradients, iterates and comparators.
///
/// Entries are finite on construction. Arithmetic that mixes dimensions
/// panics; public entry points check dimensions and return
/// [`Error::DimensionMismatch`] first.
#[derive(Clone, PartialEq)]
pub struct GradVector(Vec<f64>);

impl GradVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput(
                "vector dimension must be positive".into(),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at coordinate {i}",
                values[i]
            )));
        }
        Ok(GradVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        GradVector(vec![0.0; dim])
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    /// Unit vector `scale * e_index`.
    pub fn axis(dim: usize, index: usize, scale: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.0[index] = scale;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.0.iter()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        if self.0.len() == 1 {
            return self.0[0].abs();
        }
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &GradVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dot of mismatched dimensions");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &GradVector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance of mismatched dimensions");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub(crate) fn add_assign(&mut self, other: &GradVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub(crate) fn fill_zero(&mut self) {
        self.0.iter_mut().for_each(|v| *v = 0.0);
    }

    pub(crate) fn copy_from(&mut self, other: &GradVector) {
        self.0.copy_from_slice(&other.0);
    }
}

impl Index<usize> for GradVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for GradVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl TryFrom<Vec<f64>> for GradVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        GradVector::new(values)
    }
}
