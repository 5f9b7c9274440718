//! Labelled samples and datasets.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense class id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One labelled feature vector. `index` is the original row id and never
/// changes when the sample is copied into folds or noisy variants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: Label,
    pub index: usize,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: Label, index: usize) -> Self {
        Self {
            features,
            label,
            index,
        }
    }
}

/// An ordered, validated collection of samples sharing one dimensionality.
///
/// Invariants enforced at construction: non-empty, every feature vector has
/// length [`Dataset::dim`], all values finite, sample indices unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    samples: Vec<Sample>,
    dim: usize,
    classes: Vec<Label>,
    label_names: Vec<String>,
    normalized: bool,
    positions: BTreeMap<usize, usize>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyDataset)?;
        let dim = first.features.len();
        let mut positions = BTreeMap::new();
        for (pos, s) in samples.iter().enumerate() {
            if s.features.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.features.len(),
                });
            }
            if s.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index: s.index });
            }
            if positions.insert(s.index, pos).is_some() {
                return Err(Error::DuplicateIndex(s.index));
            }
        }
        let mut classes: Vec<Label> = samples.iter().map(|s| s.label).collect();
        classes.sort_unstable();
        classes.dedup();
        Ok(Self {
            name: String::new(),
            samples,
            dim,
            classes,
            label_names: Vec::new(),
            normalized: false,
            positions,
        })
    }

    /// Builds a dataset whose sample indices are the row positions `0..n`.
    pub fn from_rows(features: Vec<Vec<f64>>, labels: Vec<u32>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let samples = features
            .into_iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (f, l))| Sample::new(f, Label(l), i))
            .collect();
        Self::new(samples)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches the original label strings, indexed by label id.
    pub fn with_label_names(mut self, names: Vec<String>) -> Self {
        self.label_names = names;
        self
    }

    pub(crate) fn mark_normalized(mut self) -> Self {
        self.normalized = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct labels, ascending.
    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn label_name(&self, label: Label) -> Option<&str> {
        self.label_names.get(label.0 as usize).map(String::as_str)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Position of the sample with original index `index`.
    pub fn position(&self, index: usize) -> Option<usize> {
        self.positions.get(&index).copied()
    }

    pub fn get(&self, index: usize) -> Option<&Sample> {
        self.position(index).map(|p| &self.samples[p])
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.samples.iter().map(|s| s.index)
    }

    /// Copies the samples with the given original indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let samples = indices
            .iter()
            .map(|&i| self.get(i).cloned().ok_or(Error::UnknownIndex(i)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::new(samples)?;
        out.name = self.name.clone();
        out.label_names = self.label_names.clone();
        out.normalized = self.normalized;
        Ok(out)
    }

    /// Same samples and metadata with labels replaced position by position.
    pub fn relabel(&self, labels: &[Label]) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} labels for {} samples",
                labels.len(),
                self.len()
            )));
        }
        let samples = self
            .samples
            .iter()
            .zip(labels)
            .map(|(s, &l)| Sample::new(s.features.clone(), l, s.index))
            .collect();
        let mut out = Self::new(samples)?;
        out.name = self.name.clone();
        out.label_names = self.label_names.clone();
        out.normalized = self.normalized;
        Ok(out)
    }

    /// Same samples and metadata with new feature vectors (used by normalization).
    pub(crate) fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Self> {
        let samples = self
            .samples
            .iter()
            .zip(features)
            .map(|(s, f)| Sample::new(f, s.label, s.index))
            .collect();
        let mut out = Self::new(samples)?;
        out.name = self.name.clone();
        out.label_names = self.label_names.clone();
        out.normalized = self.normalized;
        Ok(out)
    }
}
