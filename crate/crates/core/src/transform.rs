//! Frame transformations: the locus frame `abc → 123`, amplitude-invariant
//! Clarke `abc → αβ0`, and the Park rotation to `dq0`.

use std::fmt;

use thiserror::Error;

use crate::locus::{build_basis, LocusBasis, LocusError, OrientationChoice};
use crate::matrix::{norm, scale, Matrix3, Vec3};
use crate::waveform::{sample_series, PhasorScenario, SampleFrame, WaveformError};

/// `|det| ≤ SINGULARITY_TOLERANCE·Π‖columns‖` is treated as singular.
pub const SINGULARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error(transparent)]
    Locus(#[from] LocusError),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error("singular basis matrix (determinant {det:.3e})")]
    SingularMatrix { det: f64 },
    #[error("segment index {index} out of range for a scenario with {count} segment(s)")]
    SegmentOutOfRange { index: usize, count: usize },
    #[error("series angles must be strictly increasing (row {index})")]
    NonIncreasingAngles { index: usize },
}

/// Forward and inverse matrices of a locus frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTransform {
    /// `abc → 123`.
    pub forward: Matrix3,
    /// `[e₁ e₂ e₃]` as columns, `123 → abc`.
    pub inverse: Matrix3,
    pub theta_o: f64,
    pub det_inverse: f64,
    /// Whether `e₁`, `e₂` were normalized to unit length.
    pub normalized: bool,
}

/// Builds the frame with inverse `[e₁ e₂ e₃]` and inverts it in closed form.
///
/// With `normalized` the first two columns are unit vectors, so the 1- and
/// 2-coordinates keep the lengths of the semi-axes as amplitudes.
pub fn assemble(basis: &LocusBasis, normalized: bool) -> Result<FrameTransform, TransformError> {
    let (e1, e2) = if normalized {
        (unit(basis.e1)?, unit(basis.e2)?)
    } else {
        (basis.e1, basis.e2)
    };
    let inverse = Matrix3::from_columns([e1, e2, basis.e3]);
    let det = inverse.determinant();
    let column_scale = norm(e1) * norm(e2) * norm(basis.e3);
    if !(det.abs() > SINGULARITY_TOLERANCE * column_scale) {
        return Err(TransformError::SingularMatrix { det });
    }
    let forward = inverse.adjugate().scaled(1.0 / det);
    if !forward.is_finite() {
        return Err(TransformError::SingularMatrix { det });
    }
    Ok(FrameTransform {
        forward,
        inverse,
        theta_o: basis.theta_o,
        det_inverse: det,
        normalized,
    })
}

fn unit(v: Vec3) -> Result<Vec3, TransformError> {
    let n = norm(v);
    if n == 0.0 {
        return Err(TransformError::SingularMatrix { det: 0.0 });
    }
    Ok(scale(v, 1.0 / n))
}

/// Maps an `abc` triple to `123` coordinates.
pub fn apply(transform: &FrameTransform, triple: Vec3) -> Vec3 {
    transform.forward.mul_vec(triple)
}

/// Amplitude-invariant Clarke matrix, the inverse of
/// `[(1, −½, −½) (0, √3/2, −√3/2) (1, 1, 1)]`.
pub fn clarke_matrix() -> Matrix3 {
    let k = 1.0 / 3f64.sqrt();
    Matrix3::from_rows([
        [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
        [0.0, k, -k],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ])
}

/// Park rotation of an `(x, y)` pair by `angle`: `d` follows `x` at angle 0
/// and `q` lags.
pub fn park_rotate(angle: f64, (x, y): (f64, f64)) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (c * x + s * y, -s * x + c * y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Abc,
    Gvl123,
    ClarkeAb0,
    Dq0,
}

impl FrameKind {
    /// CSV column names after the angle column.
    pub fn columns(&self) -> [&'static str; 3] {
        match self {
            FrameKind::Abc => ["Va", "Vb", "Vc"],
            FrameKind::Gvl123 => ["V1", "V2", "V3"],
            FrameKind::ClarkeAb0 => ["Valpha", "Vbeta", "V0"],
            FrameKind::Dq0 => ["Vd", "Vq", "V0"],
        }
    }
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrameKind::Abc => "abc",
            FrameKind::Gvl123 => "gvl123",
            FrameKind::ClarkeAb0 => "clarke_ab0",
            FrameKind::Dq0 => "dq0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub angle: f64,
    pub values: Vec3,
}

/// Time series of three coordinates in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedSeries {
    frame_kind: FrameKind,
    rows: Vec<SeriesRow>,
}

impl TransformedSeries {
    pub fn new(frame_kind: FrameKind, rows: Vec<SeriesRow>) -> Result<Self, TransformError> {
        if let Some(i) = rows.windows(2).position(|w| !(w[1].angle > w[0].angle)) {
            return Err(TransformError::NonIncreasingAngles { index: i + 1 });
        }
        Ok(Self { frame_kind, rows })
    }

    pub fn abc(frames: &[SampleFrame]) -> Self {
        Self {
            frame_kind: FrameKind::Abc,
            rows: frames
                .iter()
                .map(|f| SeriesRow {
                    angle: f.angle,
                    values: f.values,
                })
                .collect(),
        }
    }

    pub fn frame_kind(&self) -> FrameKind {
        self.frame_kind
    }

    pub fn rows(&self) -> &[SeriesRow] {
        &self.rows
    }

    /// One coordinate channel as a vector.
    pub fn channel(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[k]).collect()
    }

    fn map(&self, kind: FrameKind, f: impl Fn(&SeriesRow) -> Vec3) -> Self {
        Self {
            frame_kind: kind,
            rows: self
                .rows
                .iter()
                .map(|r| SeriesRow {
                    angle: r.angle,
                    values: f(r),
                })
                .collect(),
        }
    }

    /// Maps every row through `matrix`.
    pub fn through(&self, kind: FrameKind, matrix: &Matrix3) -> Self {
        self.map(kind, |r| matrix.mul_vec(r.values))
    }

    /// Rotates channels 1–2 by each row's angle; channel 3 passes through.
    pub fn to_dq0(&self) -> Self {
        self.map(FrameKind::Dq0, |r| {
            let (d, q) = park_rotate(r.angle, (r.values[0], r.values[1]));
            [d, q, r.values[2]]
        })
    }
}

/// Which segment the locus frame is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SegmentSelection {
    /// The segment active at angle 0.
    #[default]
    AtStart,
    Index(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GvlPipeline {
    pub coordinates: TransformedSeries,
    pub dq0: TransformedSeries,
    pub transform: FrameTransform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClarkePipeline {
    pub ab0: TransformedSeries,
    pub dq0: TransformedSeries,
}

/// Builds the locus frame for the selected segment.
pub fn frame_for_segment(
    scenario: &PhasorScenario,
    selection: SegmentSelection,
    choice: OrientationChoice,
    normalized: bool,
) -> Result<FrameTransform, TransformError> {
    let segments = scenario.segments();
    let segment = match selection {
        SegmentSelection::AtStart => scenario.segment_at(0.0),
        SegmentSelection::Index(index) => {
            segments
                .get(index)
                .ok_or(TransformError::SegmentOutOfRange {
                    index,
                    count: segments.len(),
                })?
        }
    };
    let basis = build_basis(segment, choice)?;
    assemble(&basis, normalized)
}

/// Samples `scenario` and maps it through `abc → 123 → dq0`.
pub fn pipeline_gvl(
    scenario: &PhasorScenario,
    selection: SegmentSelection,
    choice: OrientationChoice,
    samples_per_period: usize,
    periods: f64,
) -> Result<GvlPipeline, TransformError> {
    let transform = frame_for_segment(scenario, selection, choice, false)?;
    let frames = sample_series(scenario, samples_per_period, periods)?;
    Ok(gvl_from_abc(&TransformedSeries::abc(&frames), transform))
}

/// Maps an existing `abc` series through a given locus frame.
pub fn gvl_from_abc(abc: &TransformedSeries, transform: FrameTransform) -> GvlPipeline {
    let coordinates = abc.through(FrameKind::Gvl123, &transform.forward);
    let dq0 = coordinates.to_dq0();
    GvlPipeline {
        coordinates,
        dq0,
        transform,
    }
}

/// Samples `scenario` and maps it through `abc → αβ0 → dq0`.
pub fn pipeline_clarke_park(
    scenario: &PhasorScenario,
    samples_per_period: usize,
    periods: f64,
) -> Result<ClarkePipeline, TransformError> {
    let frames = sample_series(scenario, samples_per_period, periods)?;
    Ok(clarke_from_abc(&TransformedSeries::abc(&frames)))
}

pub fn clarke_from_abc(abc: &TransformedSeries) -> ClarkePipeline {
    let ab0 = abc.through(FrameKind::ClarkeAb0, &clarke_matrix());
    let dq0 = ab0.to_dq0();
    ClarkePipeline { ab0, dq0 }
}

/// Balanced reference: the Clarke matrix with rows 1–2 divided by `amplitude`.
pub fn scaled_clarke_matrix(amplitude: f64) -> Matrix3 {
    let c = clarke_matrix();
    Matrix3::from_rows([
        c.row(0).map(|x| x / amplitude),
        c.row(1).map(|x| x / amplitude),
        c.row(2),
    ])
}
