//! Malevich-square geometry of qubit probability triples: triangle sides,
//! square areas, triad mosaics extracted from density matrices, the area
//! entropy, and deterministic SVG rendering.
//!
//! Each probability triple `(p1, p2, p3)` defines a triangle whose side for
//! `s = 1, 2, 3` (cyclically, `p4 = p1`) is
//!
//! ```text
//! l_s = sqrt(2 + 2 p_s^2 - 4 p_s - 2 p_{s+1} + 2 p_{s+1}^2 + 2 p_s p_{s+1})
//! ```
//!
//! and the three squares erected on the sides (red, black, white in that
//! fixed role order) carry the quantitative content through their areas
//! `S_s = l_s^2`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qudit_prob::{artificial_qubit_triples, density_to_table, QubitTriple, TableError};
use crate::statespace::DensityMatrix;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TriadError {
    #[error("disjoint grouping needs N^2 - 1 divisible by 3, impossible for dim {0}")]
    DisjointUnavailable(usize),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Fixed color roles of the three squares.
pub const SQUARE_COLORS: [&str; 3] = ["#d40000", "#000000", "#ffffff"];

/// Squared side lengths, which double as the square areas. The quadratic is
/// nonnegative on all of `[0,1]^3` (minimum zero at consecutive
/// probabilities `(1, 0)`); a value below round-off of zero indicates
/// formula misuse and panics.
fn side_radicands(t: &QubitTriple) -> [f64; 3] {
    let p = [t.p1, t.p2, t.p3, t.p1];
    let mut radicands = [0.0; 3];
    for s in 0..3 {
        let (a, b) = (p[s], p[s + 1]);
        let radicand = 2.0 + 2.0 * a * a - 4.0 * a - 2.0 * b + 2.0 * b * b + 2.0 * a * b;
        assert!(
            radicand >= -1e-12,
            "side radicand {radicand} negative for triple {t:?}"
        );
        radicands[s] = radicand.max(0.0);
    }
    radicands
}

/// Triangle side lengths for a probability triple, cyclic in the three
/// probabilities.
pub fn triad_sides(t: &QubitTriple) -> [f64; 3] {
    side_radicands(t).map(f64::sqrt)
}

/// Square areas `S_s = l_s^2` and their sum; evaluated from the quadratic
/// directly so dyadic inputs give exact areas.
pub fn triad_areas(t: &QubitTriple) -> ([f64; 3], f64) {
    let areas = side_radicands(t);
    (areas, areas.iter().sum())
}

/// Bloch-ball coordinates `X_s = 2 p_s - 1`; the triple is admissible
/// exactly when the squared norm stays at most one.
pub fn bloch_parameters(t: &QubitTriple) -> [f64; 3] {
    [2.0 * t.p1 - 1.0, 2.0 * t.p2 - 1.0, 2.0 * t.p3 - 1.0]
}

/// One probability triple with its triangle sides and square areas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MalevichTriad {
    pub source: QubitTriple,
    pub sides: [f64; 3],
    pub areas: [f64; 3],
}

impl MalevichTriad {
    pub fn from_triple(source: QubitTriple) -> Self {
        let areas = side_radicands(&source);
        Self {
            source,
            sides: areas.map(f64::sqrt),
            areas,
        }
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

/// Provenance of one triad within a mosaic: an artificial-qubit pair, or a
/// positional chunk of the disjoint grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriadLabel {
    Pair { j: usize, k: usize },
    Chunk { index: usize },
}

/// How a density matrix is decomposed into probability triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MosaicMode {
    /// One triad per artificial qubit: N(N-1)/2 triads.
    Pairwise,
    /// The N^2 - 1 probabilities chunked into (N^2 - 1)/3 disjoint triples.
    Disjoint,
}

/// Ordered collection of labeled triads representing one qudit state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriadMosaic {
    pub mode: MosaicMode,
    pub triads: Vec<(TriadLabel, MalevichTriad)>,
}

impl TriadMosaic {
    pub fn len(&self) -> usize {
        self.triads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triads.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.triads.iter().map(|(_, t)| t.total_area()).sum()
    }
}

/// Extracts the triad mosaic of a density matrix.
///
/// Pairwise mode takes the probability triple of every artificial qubit, in
/// ascending `(j, k)` order; this matches the one-triad qubit and
/// three-triad qutrit pictures. Disjoint mode partitions the N^2 - 1
/// independent probabilities into triples instead: first the anchored
/// triples `(p1^(j1), p2^(j1), p3^(jj))` for `j = 2..=N`, then the
/// remaining off-diagonal probabilities in ascending `(j, k)` order, two
/// per pair, chunked in threes. For a ququart this yields the five-triad
/// mosaic.
pub fn triads_from_density(
    rho: &DensityMatrix,
    mode: MosaicMode,
) -> Result<TriadMosaic, TriadError> {
    let triads = match mode {
        MosaicMode::Pairwise => artificial_qubit_triples(rho)?
            .into_iter()
            .map(|((j, k), triple)| {
                (
                    TriadLabel::Pair { j, k },
                    MalevichTriad::from_triple(triple),
                )
            })
            .collect(),
        MosaicMode::Disjoint => {
            let n = rho.dim();
            if !(n * n - 1).is_multiple_of(3) {
                return Err(TriadError::DisjointUnavailable(n));
            }
            let table = density_to_table(rho)?;
            let mut flat = Vec::with_capacity(n * n - 1);
            for j in 2..=n {
                let (p1, p2) = table.offdiag(j, 1).expect("anchored pair");
                flat.push(p1);
                flat.push(p2);
                flat.push(table.diag(j).expect("diagonal entry"));
            }
            for j in 3..=n {
                for k in 2..j {
                    let (p1, p2) = table.offdiag(j, k).expect("off-diagonal pair");
                    flat.push(p1);
                    flat.push(p2);
                }
            }
            flat.chunks_exact(3)
                .enumerate()
                .map(|(index, chunk)| {
                    let triple = QubitTriple::new(chunk[0], chunk[1], chunk[2])
                        .expect("table probabilities are in range");
                    (
                        TriadLabel::Chunk { index },
                        MalevichTriad::from_triple(triple),
                    )
                })
                .collect()
        }
    };
    Ok(TriadMosaic { mode, triads })
}

/// Shannon entropy (nats) of the distribution obtained by normalizing every
/// square's area by the grand total of the mosaic.
pub fn area_entropy(mosaic: &TriadMosaic) -> f64 {
    let total = mosaic.total_area();
    assert!(total > 0.0, "mosaic with zero total area");
    let mut entropy = 0.0;
    for (_, triad) in &mosaic.triads {
        for &area in &triad.areas {
            let p = area / total;
            if p > 0.0 {
                entropy -= p * p.ln();
            }
        }
    }
    entropy
}

/// Rendering style for SVG mosaics; all lengths in pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StyleConfig {
    pub unit_px: f64,
    pub gap_px: f64,
    pub background: String,
    pub outline_width: f64,
}

impl Default for StyleConfig {
    fn default() -> Self {
        Self {
            unit_px: 80.0,
            gap_px: 12.0,
            background: "#ffffff".to_string(),
            outline_width: 2.0,
        }
    }
}

/// Renders a mosaic as an SVG document: one row per triad holding its red,
/// black and white squares (white squares get a black outline), sides drawn
/// proportional to the triangle sides so areas are truthful. Output is
/// byte-deterministic in the mosaic and style.
pub fn render_svg(mosaic: &TriadMosaic, style: &StyleConfig) -> String {
    // the side formula is bounded by sqrt(2) on [0,1]^2
    let slot = std::f64::consts::SQRT_2 * style.unit_px;
    let gap = style.gap_px;
    let rows = mosaic.triads.len();
    let width = 3.0 * slot + 4.0 * gap;
    let height = rows as f64 * (slot + gap) + gap;

    let mut svg = String::new();
    svg.push_str(&format!(
        r#"<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    ));
    svg.push('\n');
    svg.push_str(&format!(
        r#"<rect x="0" y="0" width="{width}" height="{height}" fill="{}"/>"#,
        style.background
    ));
    svg.push('\n');
    for (row, (_, triad)) in mosaic.triads.iter().enumerate() {
        let baseline = gap + row as f64 * (slot + gap) + slot;
        for (col, (&side, &color)) in triad.sides.iter().zip(&SQUARE_COLORS).enumerate() {
            let px = side * style.unit_px;
            if px <= 0.0 {
                continue;
            }
            let x = gap + col as f64 * (slot + gap) + 0.5 * (slot - px);
            let y = baseline - px;
            let outline = if color == "#ffffff" {
                format!(r##" stroke="#000000" stroke-width="{}""##, style.outline_width)
            } else {
                String::new()
            };
            svg.push_str(&format!(
                r#"<rect x="{x}" y="{y}" width="{px}" height="{px}" fill="{color}"{outline}/>"#
            ));
            svg.push('\n');
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Sidecar metadata for a rendered mosaic.
#[derive(Debug, Clone, Serialize)]
pub struct MosaicMetadata {
    pub mode: MosaicMode,
    pub triads: Vec<TriadRecord>,
    pub total_area: f64,
    pub area_entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriadRecord {
    pub label: TriadLabel,
    pub source: [f64; 3],
    pub sides: [f64; 3],
    pub areas: [f64; 3],
    pub bloch: [f64; 3],
}

impl MosaicMetadata {
    pub fn from_mosaic(mosaic: &TriadMosaic) -> Self {
        Self {
            mode: mosaic.mode,
            triads: mosaic
                .triads
                .iter()
                .map(|(label, triad)| TriadRecord {
                    label: *label,
                    source: [triad.source.p1, triad.source.p2, triad.source.p3],
                    sides: triad.sides,
                    areas: triad.areas,
                    bloch: bloch_parameters(&triad.source),
                })
                .collect(),
            total_area: mosaic.total_area(),
            area_entropy: area_entropy(mosaic),
        }
    }
}
