//! Distance-based clustering: agglomerative hierarchical clustering with a
//! dendrogram cut, and partitioning around medoids.

mod hierarchical;
mod pam;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use hierarchical::{cut, hierarchical, Dendrogram, Linkage, Merge};
pub use pam::{pam, pam_cost, PamFit};

/// A partition of `n` items into `G` non-empty clusters labelled `1..=G`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    g: usize,
}

impl ClusterAssignment {
    /// Validates labels already in `1..=G` with every cluster used.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let g = labels.iter().copied().max().unwrap_or(0);
        if labels.is_empty() || labels.contains(&0) {
            return Err(Error::invalid("labels must be non-empty and 1-based"));
        }
        let mut seen = vec![false; g];
        for &l in &labels {
            seen[l - 1] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("cluster {} is empty", empty + 1)));
        }
        Ok(Self { labels, g })
    }

    /// Relabels arbitrary cluster identifiers by order of first occurrence.
    pub fn from_raw<T: Eq + std::hash::Hash + Copy>(raw: &[T]) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = map.len() + 1;
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Self::new(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn g(&self) -> usize {
        self.g
    }

    #[inline]
    pub fn same(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.g];
        for &l in &self.labels {
            s[l - 1] += 1;
        }
        s
    }
}
