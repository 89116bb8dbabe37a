//! Named, ordered collections of learnable arrays.
//!
//! A `ParamSet` is the unit that training updates, EMA blends, and
//! checkpoints persist. Two ParamSets used together (EMA, optimizer state)
//! must agree on the full name/shape map.

use indexmap::IndexMap;
use thiserror::Error;

use crate::real::Real;
use crate::tensor::Tensor;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("parameter {0:?} missing from the other set")]
    Missing(String),
    #[error("parameter {name:?} shape mismatch: {a:?} vs {b:?}")]
    ShapeMismatch { name: String, a: Vec<usize>, b: Vec<usize> },
    #[error("parameter {0:?} already defined")]
    Duplicate(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet<T> {
    entries: IndexMap<String, Tensor<T>>,
}

impl<T: Real> Default for ParamSet<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> ParamSet<T> {
    pub fn new() -> Self {
        Self { entries: IndexMap::new() }
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Tensor<T>) -> Result<(), ParamError> {
        let name = name.into();
        if self.entries.contains_key(&name) {
            return Err(ParamError::Duplicate(name));
        }
        self.entries.insert(name, value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.entries.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.entries.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor<T>)> {
        self.entries.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Tensor<T>)> {
        self.entries.iter_mut()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.entries.keys()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total scalar count across all entries.
    pub fn count(&self) -> usize {
        self.entries.values().map(Tensor::len).sum()
    }

    /// Check that `other` has the same names in the same order with the same
    /// shapes. Returns the first offending parameter otherwise.
    pub fn check_compatible(&self, other: &Self) -> Result<(), ParamError> {
        for (name, value) in &self.entries {
            match other.entries.get(name) {
                None => return Err(ParamError::Missing(name.clone())),
                Some(o) if o.shape() != value.shape() => {
                    return Err(ParamError::ShapeMismatch {
                        name: name.clone(),
                        a: value.shape().to_vec(),
                        b: o.shape().to_vec(),
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(name) = other.entries.keys().find(|k| !self.entries.contains_key(*k)) {
            return Err(ParamError::Missing(name.clone()));
        }
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> ParamSet<U> {
        ParamSet {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.cast())).collect(),
        }
    }

    /// Map every entry to a zero tensor of the same shape (gradient or
    /// optimizer-moment skeletons).
    pub fn zeros_like(&self) -> Self {
        ParamSet {
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), Tensor::zeros(v.shape().to_vec())))
                .collect(),
        }
    }
}
