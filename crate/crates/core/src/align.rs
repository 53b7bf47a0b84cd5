//! Local pitch metric and the bounded Smith-Waterman-style gain accumulation.
//!
//! Rows are performed notes, columns are score onsets. Each cell extends
//! either the cell above (another note on the same onset) or the cell
//! diagonally above-left (next note on the next onset); there is no
//! horizontal move, so a local alignment never skips score onsets.

use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::performance::Performance;
use crate::scalar::GainScalar;
use crate::score::{PitchSet, Score, Segment};

/// Gain bound used unless configured otherwise.
pub const DEFAULT_BOUND: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Match,
    Mismatch,
}

impl Metric {
    pub fn sign(self) -> i8 {
        match self {
            Metric::Match => 1,
            Metric::Mismatch => -1,
        }
    }
}

/// `+1` when the performed pitch sounds at the score onset, `-1` otherwise.
#[inline]
pub fn local_metric(pitch: u8, onset_pitches: PitchSet) -> Metric {
    if onset_pitches.contains(pitch) {
        Metric::Match
    } else {
        Metric::Mismatch
    }
}

/// Bounded gain step.
///
/// A match adds `1 - g/B`, so repeated matches approach `B` with shrinking
/// increments. A mismatch subtracts 1 while `g > 1` and halves `g` once
/// `g <= 1`, so the gain never goes negative.
#[inline]
pub fn bounded_update<T: Float>(prev: T, metric: Metric, bound: T) -> T {
    match metric {
        Metric::Match => prev + (T::one() - prev / bound),
        Metric::Mismatch if prev > T::one() => prev - T::one(),
        Metric::Mismatch => prev / (T::one() + T::one()),
    }
}

/// How a cell's gain follows from its best predecessor and the local metric.
pub trait GainRule<T> {
    fn update(&self, prev: T, metric: Metric) -> T;

    fn upper_bound(&self) -> Option<T> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedGain<T> {
    pub bound: T,
}

impl<T: Float> GainRule<T> for BoundedGain<T> {
    #[inline]
    fn update(&self, prev: T, metric: Metric) -> T {
        bounded_update(prev, metric, self.bound)
    }

    fn upper_bound(&self) -> Option<T> {
        Some(self.bound)
    }
}

/// Plain `±1` steps floored at zero: the textbook local-alignment update.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClampedUnitGain;

impl<T> GainRule<T> for ClampedUnitGain
where
    T: num_traits::PrimInt + num_traits::Signed,
{
    #[inline]
    fn update(&self, prev: T, metric: Metric) -> T {
        let next = match metric {
            Metric::Match => prev + T::one(),
            Metric::Mismatch => prev - T::one(),
        };
        next.max(T::zero())
    }
}

/// Dense row-major accumulated gain, `rows` performed notes by `cols` onsets.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
    upper_bound: Option<T>,
    row_pitches: Vec<u8>,
    col_pitches: Vec<PitchSet>,
}

impl<T: Copy> GainMatrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn upper_bound(&self) -> Option<T> {
        self.upper_bound
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Local metric of cell `(row, col)`, recomputed from the inputs.
    #[inline]
    pub fn metric(&self, row: usize, col: usize) -> Metric {
        local_metric(self.row_pitches[row], self.col_pitches[col])
    }

    /// Pitch set of score onset `col`.
    pub fn onset_pitches(&self, col: usize) -> PitchSet {
        self.col_pitches[col]
    }

    /// Bytes held by the gain values.
    pub fn storage_bytes(&self) -> usize {
        self.values.len() * std::mem::size_of::<T>()
    }
}

/// Fills the gain matrix under an arbitrary update rule.
pub fn accumulate_with<T, R>(
    performance: &Performance,
    score: &Score,
    rule: &R,
) -> Result<GainMatrix<T>>
where
    T: Copy + PartialOrd + Zero,
    R: GainRule<T>,
{
    fill(performance, score, rule, &[])
}

/// Like [`accumulate`], but a diagonal step into the first column of a
/// segment starts from zero: every segment's ridges are built from its own
/// columns only. Vertical steps are unaffected.
pub fn accumulate_windowed<T: GainScalar>(
    performance: &Performance,
    score: &Score,
    segments: &[Segment],
    bound: T,
) -> Result<GainMatrix<T>> {
    check_bound(bound)?;
    let mut cut = vec![false; score.len()];
    for s in segments {
        if let Some(c) = cut.get_mut(s.start) {
            *c = true;
        }
    }
    fill(performance, score, &BoundedGain { bound }, &cut)
}

fn fill<T, R>(
    performance: &Performance,
    score: &Score,
    rule: &R,
    cut: &[bool],
) -> Result<GainMatrix<T>>
where
    T: Copy + PartialOrd + Zero,
    R: GainRule<T>,
{
    if performance.is_empty() {
        return Err(Error::Degenerate("performance has no notes"));
    }
    if score.is_empty() {
        return Err(Error::Degenerate("score has no onsets"));
    }
    let rows = performance.len();
    let cols = score.len();
    let col_pitches = score.pitch_sets();
    let mut values = vec![T::zero(); rows * cols];

    let (first, _) = values.split_at_mut(cols);
    let pitch = performance.pitches[0];
    for (cell, &onset) in first.iter_mut().zip(&col_pitches) {
        *cell = rule.update(T::zero(), local_metric(pitch, onset));
    }
    for i in 1..rows {
        let pitch = performance.pitches[i];
        let (done, rest) = values.split_at_mut(i * cols);
        let above = &done[(i - 1) * cols..];
        let current = &mut rest[..cols];
        let top = if above[0] >= T::zero() {
            above[0]
        } else {
            T::zero()
        };
        current[0] = rule.update(top, local_metric(pitch, col_pitches[0]));
        for j in 1..cols {
            let vertical = above[j];
            let diagonal = if cut.get(j) == Some(&true) {
                T::zero()
            } else {
                above[j - 1]
            };
            let best = if vertical >= diagonal {
                vertical
            } else {
                diagonal
            };
            current[j] = rule.update(best, local_metric(pitch, col_pitches[j]));
        }
    }
    Ok(GainMatrix {
        rows,
        cols,
        values,
        upper_bound: rule.upper_bound(),
        row_pitches: performance.pitches.clone(),
        col_pitches,
    })
}

/// Bounded gain matrix of `performance` against the (not unfolded) score.
pub fn accumulate<T: GainScalar>(
    performance: &Performance,
    score: &Score,
    bound: T,
) -> Result<GainMatrix<T>> {
    check_bound(bound)?;
    accumulate_with(performance, score, &BoundedGain { bound })
}

fn check_bound<T: GainScalar>(bound: T) -> Result<()> {
    if bound > T::one() && bound.is_finite() {
        Ok(())
    } else {
        Err(Error::Degenerate(
            "gain bound must be finite and greater than 1",
        ))
    }
}
