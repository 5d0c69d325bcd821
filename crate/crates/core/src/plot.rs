//! Static SVG renderings: the calibration curve and the consensus heatmap.

use std::fmt::Write;

use crate::calibration::{Calibration, ScoreGrid, ScoreKind};
use crate::cluster::ClusterAssignment;
use crate::consensus::ConsensusMatrix;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// Score against G, one polyline per lambda, with the calibrated cell
/// circled. Undefined cells break the line.
pub fn calibration_svg(grid: &ScoreGrid, kind: ScoreKind, cal: &Calibration) -> String {
    let values: Vec<f64> = grid.cells().iter().filter_map(|c| c.value(kind)).collect();
    let (mut lo, mut hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let gs = grid.gs();
    let (g0, g1) = (gs[0] as f64, (*gs.last().unwrap() as f64).max(gs[0] as f64 + 1.0));
    let x = |g: usize| MARGIN + (g as f64 - g0) / (g1 - g0) * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = header();
    axes(&mut s);
    for &g in gs {
        let _ = write!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{g}</text>"#,
            x(g),
            HEIGHT - MARGIN + 16.0
        );
    }
    for (v, anchor) in [(lo, HEIGHT - MARGIN), (hi, MARGIN)] {
        let _ = write!(s, r#"<text x="{:.1}" y="{anchor:.1}" font-size="11" text-anchor="end">{v:.3}</text>"#, MARGIN - 6.0);
    }
    let _ = write!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">number of clusters G</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    );
    let _ = write!(s, r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">{kind} score</text>"#, HEIGHT / 2.0, HEIGHT / 2.0);

    for (l, &lambda) in grid.lambdas().iter().enumerate() {
        let colour = PALETTE[l % PALETTE.len()];
        let mut segment = String::new();
        let flush = |seg: &mut String, s: &mut String| {
            if !seg.is_empty() {
                let _ = write!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#, seg.trim_end());
                seg.clear();
            }
        };
        for c in grid.row(l) {
            match c.value(kind) {
                Some(v) => {
                    let _ = write!(segment, "{:.1},{:.1} ", x(c.g), y(v));
                }
                None => flush(&mut segment, &mut s),
            }
        }
        flush(&mut segment, &mut s);
        if grid.lambdas().len() > 1 {
            let _ = write!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{colour}">lambda={lambda:.3}</text>"#,
                WIDTH - MARGIN + 4.0,
                MARGIN + 12.0 * l as f64
            );
        }
    }
    if let Calibration::Calibrated { g, score, .. } = *cal {
        let _ = write!(
            s,
            r##"<circle cx="{:.1}" cy="{:.1}" r="6" fill="none" stroke="#d62728" stroke-width="2"/>"##,
            x(g),
            y(score)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Consensus matrix with items ordered by stable cluster, then index.
pub fn heatmap_svg(gamma: &ConsensusMatrix, z: &ClusterAssignment) -> String {
    let n = gamma.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (z.labels()[i], i));
    let side = HEIGHT - 2.0 * MARGIN;
    let cell = side / n as f64;
    let mut s = header();
    for (r, &i) in order.iter().enumerate() {
        for (c, &j) in order.iter().enumerate() {
            let v = gamma.get(i, j).clamp(0.0, 1.0);
            let shade = (255.0 * (1.0 - v)).round() as u8;
            let _ = write!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
                MARGIN + c as f64 * cell,
                MARGIN + r as f64 * cell,
                cell + 0.05,
                cell + 0.05
            );
        }
    }
    // Cluster boundaries.
    let mut offset = 0;
    for size in z.sizes() {
        let _ = write!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
            MARGIN + offset as f64 * cell,
            MARGIN + offset as f64 * cell,
            size as f64 * cell,
            size as f64 * cell
        );
        offset += size;
    }
    let _ = write!(s, r#"<text x="{:.1}" y="{:.1}" font-size="12">consensus (G = {})</text>"#, MARGIN, MARGIN - 10.0, z.g());
    s.push_str("</svg>\n");
    s
}

fn header() -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}"><rect width="100%" height="100%" fill="white"/>"#
    )
}

fn axes(s: &mut String) {
    let _ = write!(
        s,
        r#"<line x1="{MARGIN}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{b}" stroke="black"/>"#,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::{calibrate, CellScores, WithinBetweenTallies};
    use crate::consensus::{consensus_matrix, ComembershipCounts};
    use ndarray::array;

    #[test]
    fn calibration_curve_marks_the_selected_cell() {
        let cells = [2usize, 3, 4]
            .iter()
            .zip([1.0, f64::NEG_INFINITY, 3.0])
            .map(|(&g, sc)| CellScores {
                lambda: 0.0,
                g,
                tallies: WithinBetweenTallies::default(),
                consensus: sc,
                area: 0.5,
                pac: 0.1,
                delta: None,
                silhouette: None,
                converged: true,
            })
            .collect();
        let grid = ScoreGrid::new(vec![0.0], vec![2, 3, 4], cells).unwrap();
        let cal = calibrate(&grid, ScoreKind::Consensus);
        let svg = calibration_svg(&grid, ScoreKind::Consensus, &cal);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn heatmap_has_one_cell_per_entry() {
        let h = array![[2u32, 2, 2], [2, 2, 2], [2, 2, 2]];
        let c = array![[2u32, 0, 2], [0, 2, 0], [2, 0, 2]];
        let gamma = consensus_matrix(&ComembershipCounts { c, lambda: 0.0, g: 2 }, &h).unwrap();
        let z = ClusterAssignment::new(vec![1, 2, 1]).unwrap();
        let svg = heatmap_svg(&gamma, &z);
        assert_eq!(svg.matches("<rect").count(), 1 + 9 + 2);
    }
}
