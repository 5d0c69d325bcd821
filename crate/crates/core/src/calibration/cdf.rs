use serde::Serialize;

use crate::consensus::ConsensusMatrix;

/// Lower and upper bounds `(x1, x2)` of the ambiguous co-membership range.
pub const DEFAULT_PAC_BOUNDS: (f64, f64) = (0.1, 0.9);

/// Empirical CDF of the off-diagonal consensus entries.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(gamma: &ConsensusMatrix) -> Self {
        let mut sorted = gamma.upper_triangle();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    /// Proportion of pairs with `Gamma_ij <= x`.
    pub fn eval(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Area under the CDF over `[0, 1]`, i.e. `1 - mean(Gamma_ij)`.
    pub fn area(&self) -> f64 {
        if self.sorted.is_empty() {
            return 0.0;
        }
        1.0 - self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfScores {
    /// Area under the consensus CDF.
    pub area: f64,
    /// Proportion of ambiguous clustering `CDF(x2) - CDF(x1)`.
    pub pac: f64,
}

pub fn cdf_scores(gamma: &ConsensusMatrix, bounds: (f64, f64)) -> CdfScores {
    let cdf = EmpiricalCdf::new(gamma);
    CdfScores { area: cdf.area(), pac: cdf.eval(bounds.1) - cdf.eval(bounds.0) }
}

/// Delta scores for areas indexed by consecutive `G = 2, 3, ...`:
/// `Delta_2 = a_2`, `Delta_G = (a_G - a_{G-1}) / a_{G-1}`. A zero previous
/// area yields `-inf`.
pub fn delta_score(areas: &[f64]) -> Vec<f64> {
    areas
        .iter()
        .enumerate()
        .map(|(t, &a)| {
            if t == 0 {
                a
            } else if areas[t - 1] == 0.0 {
                f64::NEG_INFINITY
            } else {
                (a - areas[t - 1]) / areas[t - 1]
            }
        })
        .collect()
}
