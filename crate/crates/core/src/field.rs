use std::ops::Index;

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// One finite real value per sample point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self(values))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn abs(&self) -> Self {
        Self(self.0.iter().map(|v| v.abs()).collect())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|v| c * v).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::FieldLength { found: other.len(), expected: self.len() });
        }
        Self::new(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Errors unless the field has exactly one value per point of `space`.
    pub fn check_for(&self, space: &MetricMeasureSpace) -> Result<()> {
        if self.is_empty() {
            return Err(Error::EmptyField);
        }
        if self.len() != space.len() {
            return Err(Error::FieldLength { found: self.len(), expected: space.len() });
        }
        Ok(())
    }
}

impl Index<usize> for ScalarField {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<ScalarField> for Vec<f64> {
    fn from(f: ScalarField) -> Self {
        f.0
    }
}
