use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of named tensor factors and their dimensions.
///
/// Flat indices are row-major over the factors: the first label is the most
/// significant digit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        dims: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let dims: Vec<usize> = dims.into_iter().collect();
        if labels.len() != dims.len() {
            return Err(Error::LayoutArity {
                labels: labels.len(),
                dims: dims.len(),
            });
        }
        let mut seen = HashSet::new();
        for (label, &dim) in labels.iter().zip(&dims) {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            if dim == 0 {
                return Err(Error::InvalidDimension {
                    label: label.clone(),
                    dim,
                });
            }
        }
        Ok(Self { labels, dims })
    }

    /// Single-factor layout.
    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new([label], [dim])
    }

    /// Layout where every factor shares the dimension `d`.
    pub fn uniform(labels: &[&str], d: usize) -> Result<Self> {
        Self::new(
            labels.iter().copied(),
            std::iter::repeat_n(d, labels.len()),
        )
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Concatenation `self` then `other`; labels must stay unique.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        Self::new(
            self.labels.iter().chain(&other.labels).cloned(),
            self.dims.iter().chain(&other.dims).copied(),
        )
    }

    /// Layout restricted to the factors not in `drop`, original order kept.
    pub(crate) fn without(&self, drop: &[usize]) -> Self {
        let (labels, dims) = self
            .labels
            .iter()
            .zip(&self.dims)
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, (l, &d))| (l.clone(), d))
            .unzip();
        Self { labels, dims }
    }

    pub(crate) fn reordered(&self, order: &[usize]) -> Self {
        Self {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            dims: order.iter().map(|&i| self.dims[i]).collect(),
        }
    }

    /// Row-major strides of each factor in the flat index.
    pub(crate) fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}:{d}"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}
