use std::cmp::Ordering;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::score::WithinBetweenTallies;
use crate::{Error, Result};

/// Score used to pick the calibrated cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Consensus,
    Delta,
    Pac,
    Silhouette,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 4] = [ScoreKind::Consensus, ScoreKind::Delta, ScoreKind::Pac, ScoreKind::Silhouette];

    pub fn name(self) -> &'static str {
        match self {
            ScoreKind::Consensus => "consensus",
            ScoreKind::Delta => "delta",
            ScoreKind::Pac => "pac",
            ScoreKind::Silhouette => "silhouette",
        }
    }

    fn minimise(self) -> bool {
        matches!(self, ScoreKind::Pac)
    }
}

impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "consensus" | "sc" => Ok(ScoreKind::Consensus),
            "delta" => Ok(ScoreKind::Delta),
            "pac" => Ok(ScoreKind::Pac),
            "silhouette" => Ok(ScoreKind::Silhouette),
            other => Err(Error::invalid(format!("unknown score '{other}'"))),
        }
    }
}

impl std::fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything computed for one `(lambda, G)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellScores {
    pub lambda: f64,
    pub g: usize,
    pub tallies: WithinBetweenTallies,
    /// Consensus score, `-inf` when undefined.
    pub consensus: f64,
    pub area: f64,
    pub pac: f64,
    /// `None` when `G - 1` is not on the grid (and `G != 2`).
    pub delta: Option<f64>,
    pub silhouette: Option<f64>,
    /// Whether every weight fit at this `lambda` converged.
    pub converged: bool,
}

impl CellScores {
    /// The value of `kind` if it can take part in the selection.
    pub fn value(&self, kind: ScoreKind) -> Option<f64> {
        let v = match kind {
            ScoreKind::Consensus => Some(self.consensus),
            ScoreKind::Delta => self.delta,
            ScoreKind::Pac => Some(self.pac),
            ScoreKind::Silhouette => self.silhouette,
        }?;
        // -inf is the undefined sentinel for maximised scores.
        (v.is_finite()).then_some(v)
    }
}

/// Scores for a full grid, stored lambda-major: cell `(l, t)` sits at
/// `l * gs.len() + t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreGrid {
    lambdas: Vec<f64>,
    gs: Vec<usize>,
    cells: Vec<CellScores>,
}

impl ScoreGrid {
    pub fn new(lambdas: Vec<f64>, gs: Vec<usize>, mut cells: Vec<CellScores>) -> Result<Self> {
        if lambdas.is_empty() || gs.is_empty() {
            return Err(Error::invalid("score grid needs at least one lambda and one G"));
        }
        if cells.len() != lambdas.len() * gs.len() {
            return Err(Error::Dimension { expected: lambdas.len() * gs.len(), found: cells.len() });
        }
        for (idx, c) in cells.iter().enumerate() {
            let (l, t) = (idx / gs.len(), idx % gs.len());
            if c.g != gs[t] || c.lambda.to_bits() != lambdas[l].to_bits() {
                return Err(Error::invalid(format!("cell {idx} does not match grid position")));
            }
        }
        fill_delta(&gs, &mut cells);
        Ok(Self { lambdas, gs, cells })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn gs(&self) -> &[usize] {
        &self.gs
    }

    pub fn cells(&self) -> &[CellScores] {
        &self.cells
    }

    pub fn cell(&self, l: usize, t: usize) -> &CellScores {
        &self.cells[l * self.gs.len() + t]
    }

    /// Cells sharing one lambda, in G order.
    pub fn row(&self, l: usize) -> &[CellScores] {
        let w = self.gs.len();
        &self.cells[l * w..(l + 1) * w]
    }
}

/// Fill each row's delta from its areas wherever `G - 1` is also present.
fn fill_delta(gs: &[usize], cells: &mut [CellScores]) {
    let w = gs.len();
    for row in cells.chunks_mut(w) {
        for t in 0..w {
            let g = gs[t];
            row[t].delta = if g == 2 {
                Some(row[t].area)
            } else if let Some(prev) = gs.iter().position(|&x| x + 1 == g) {
                let a0 = row[prev].area;
                Some(if a0 == 0.0 { f64::NEG_INFINITY } else { (row[t].area - a0) / a0 })
            } else {
                None
            };
        }
    }
}

/// Outcome of a grid search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Calibration {
    Calibrated { lambda_index: usize, g_index: usize, lambda: f64, g: usize, score: f64 },
    NoStableStructure,
}

impl Calibration {
    pub fn is_calibrated(&self) -> bool {
        matches!(self, Calibration::Calibrated { .. })
    }

    pub fn indices(&self) -> Option<(usize, usize)> {
        match *self {
            Calibration::Calibrated { lambda_index, g_index, .. } => Some((lambda_index, g_index)),
            Calibration::NoStableStructure => None,
        }
    }
}

/// Best cell under `kind`. Ties go to the smaller G, then the smaller lambda.
pub fn calibrate(grid: &ScoreGrid, kind: ScoreKind) -> Calibration {
    let w = grid.gs.len();
    let mut best: Option<(usize, f64)> = None;
    for (idx, cell) in grid.cells.iter().enumerate() {
        let Some(v) = cell.value(kind) else { continue };
        let better = match best {
            None => true,
            Some((b, bv)) => {
                let by_score = if kind.minimise() { bv.total_cmp(&v) } else { v.total_cmp(&bv) };
                let cur = &grid.cells[b];
                by_score
                    .then_with(|| cur.g.cmp(&cell.g))
                    .then_with(|| cur.lambda.total_cmp(&cell.lambda))
                    == Ordering::Greater
            }
        };
        if better {
            best = Some((idx, v));
        }
    }
    match best {
        None => Calibration::NoStableStructure,
        Some((idx, score)) => Calibration::Calibrated {
            lambda_index: idx / w,
            g_index: idx % w,
            lambda: grid.cells[idx].lambda,
            g: grid.cells[idx].g,
            score,
        },
    }
}
