use std::path::Path;

use crate::align::GainMatrix;
use crate::error::{Error, Result};
use crate::infer::SegmentAlignment;
use crate::scalar::GainScalar;

/// Binary PGM (P5, maxval 255) of the gain matrix: one pixel per cell,
/// performance rows top to bottom, score onsets left to right, brightness
/// `round(255 * gain / B)`. Cells on the given alignment paths are drawn
/// at 255.
pub fn heatmap_pgm<T: GainScalar>(
    matrix: &GainMatrix<T>,
    alignments: Option<&[SegmentAlignment<T>]>,
) -> Vec<u8> {
    let (rows, cols) = (matrix.rows(), matrix.cols());
    let scale = match matrix.upper_bound() {
        Some(b) => b.to_f64().unwrap_or(1.0),
        None => matrix
            .values()
            .iter()
            .filter_map(|v| v.to_f64())
            .fold(0.0, f64::max)
            .max(1.0),
    };
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    let header = out.len();
    out.extend(matrix.values().iter().map(|&v| {
        let g = v.to_f64().unwrap_or(0.0);
        (255.0 * g / scale).round().clamp(0.0, 255.0) as u8
    }));
    for a in alignments.into_iter().flatten() {
        for &(r, c) in &a.path {
            out[header + r * cols + c] = 255;
        }
    }
    out
}

pub fn emit_heatmap<T: GainScalar>(
    matrix: &GainMatrix<T>,
    alignments: Option<&[SegmentAlignment<T>]>,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, heatmap_pgm(matrix, alignments)).map_err(|e| Error::io(path, e))
}
