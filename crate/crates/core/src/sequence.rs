//! Symmetrical components of cosine-referenced phasors.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::waveform::ScenarioSegment;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("positive-sequence component is zero; unbalance ratios are undefined")]
    ZeroPositiveSequence,
}

/// Phasors of phases a, b and c including the structural `∓2π/3` shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorTriple {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl PhasorTriple {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        Self { a, b, c }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.a * k, self.b * k, self.c * k)
    }

    /// Largest componentwise distance to `other`.
    pub fn max_abs_diff(&self, other: &PhasorTriple) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceComponents {
    pub zero: Complex64,
    pub positive: Complex64,
    pub negative: Complex64,
}

/// `|negative|/|positive|` and `|zero|/|positive|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnbalanceMetrics {
    pub negative_ratio: f64,
    pub zero_ratio: f64,
}

/// The rotation operator `a = e^{j2π/3}`.
fn rotator() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

pub fn to_phasors(segment: &ScenarioSegment) -> PhasorTriple {
    let v = segment.amplitudes();
    let phi = segment.total_phases();
    PhasorTriple::new(
        Complex64::from_polar(v[0], phi[0]),
        Complex64::from_polar(v[1], phi[1]),
        Complex64::from_polar(v[2], phi[2]),
    )
}

pub fn fortescue(p: &PhasorTriple) -> SequenceComponents {
    let a = rotator();
    let a2 = a * a;
    SequenceComponents {
        zero: (p.a + p.b + p.c) / 3.0,
        positive: (p.a + a * p.b + a2 * p.c) / 3.0,
        negative: (p.a + a2 * p.b + a * p.c) / 3.0,
    }
}

/// Inverse of [`fortescue`].
pub fn reconstruct(s: &SequenceComponents) -> PhasorTriple {
    let a = rotator();
    let a2 = a * a;
    PhasorTriple::new(
        s.zero + s.positive + s.negative,
        s.zero + a2 * s.positive + a * s.negative,
        s.zero + a * s.positive + a2 * s.negative,
    )
}

/// Negative- and zero-sequence magnitudes relative to the positive sequence.
///
/// The positive sequence counts as zero when it is below `1e-12` of the
/// largest component, which absorbs rounding of `1 + a + a² ≈ 0`.
pub fn unbalance_metrics(s: &SequenceComponents) -> Result<UnbalanceMetrics, SequenceError> {
    let pos = s.positive.norm();
    let largest = pos.max(s.negative.norm()).max(s.zero.norm());
    if pos == 0.0 || pos <= 1e-12 * largest {
        return Err(SequenceError::ZeroPositiveSequence);
    }
    Ok(UnbalanceMetrics {
        negative_ratio: s.negative.norm() / pos,
        zero_ratio: s.zero.norm() / pos,
    })
}
