//! Locus-aligned basis vectors.
//!
//! Over one period the space vector `v(θ) = (v_a, v_b, v_c)` of a sinusoidal
//! segment traces an ellipse centred at the origin. For any orientation angle
//! `θₒ` it can be written as
//!
//! ```text
//! v(θ) = cos(θ − θₒ)·e₁ + sin(θ − θₒ)·e₂,   e₁ = v(θₒ),  e₂ = v(θₒ + π/2)
//! ```
//!
//! and `e₃ = √3·(e₁×e₂)/‖e₁×e₂‖` completes the frame. The ellipse collapses to
//! a line segment when the phase signals are linearly dependent; no frame
//! exists then.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

use crate::matrix::{cross, dot, norm, scale, Vec3};
use crate::waveform::{evaluate, wrap_angle, SampleFrame, ScenarioSegment};

/// `‖e₁×e₂‖ ≤ DEGENERACY_TOLERANCE·‖e₁‖·‖e₂‖` marks a linear locus.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Basis vectors shorter than this are treated as zero.
pub const ZERO_VECTOR_NORM: f64 = 1e-12;
/// `A ≤ CIRCLE_TOLERANCE·C` marks a circular locus.
pub const CIRCLE_TOLERANCE: f64 = 1e-9;
/// Allowed deviation of a sample pair from a quarter period, in radians.
pub const QUARTER_PERIOD_TOLERANCE: f64 = 1e-9;
/// Lowest sampling rate accepted for interpolated basis estimation.
pub const MIN_STREAM_SAMPLES_PER_PERIOD: f64 = 64.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LocusError {
    #[error("degenerate locus: basis vectors are collinear (degeneracy metric {metric:.3e})")]
    DegenerateLocus { metric: f64 },
    #[error("undefined orientation: phase a has zero amplitude")]
    UndefinedOrientation,
    #[error("circular locus: every orientation maximizes the norm (A = {amplitude:.3e}, C = {level:.3e})")]
    CircularLocus { amplitude: f64, level: f64 },
    #[error("samples are {separation} rad apart, expected a quarter period (π/2)")]
    NotQuarterPeriod { separation: f64 },
    #[error("series spans [{first}, {last}] rad but [{from}, {to}] rad is required")]
    InsufficientSpan {
        first: f64,
        last: f64,
        from: f64,
        to: f64,
    },
    #[error("sampling rate of {samples_per_period:.1} samples per period is below the minimum of {MIN_STREAM_SAMPLES_PER_PERIOD}")]
    InsufficientRate { samples_per_period: f64 },
    #[error("series is not uniformly sampled near frame {index}")]
    NonUniformSampling { index: usize },
}

/// How the orientation angle `θₒ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrientationChoice {
    /// Sample `e₁` when phase a peaks (`θₒ = −φ_a`).
    PhaseAPeak,
    /// Sample `e₁` where the locus norm is largest (semi-major axis).
    MaxNorm,
    /// A caller-supplied angle in `(-π, π]`.
    Explicit(f64),
}

impl OrientationChoice {
    pub fn explicit(angle: f64) -> Self {
        OrientationChoice::Explicit(wrap_angle(angle))
    }
}

/// `‖v(θ)‖² = C − A·sin(2θ + ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormProfile {
    pub c_level: f64,
    pub a_amplitude: f64,
    pub psi: f64,
}

impl NormProfile {
    pub fn norm_squared_at(&self, theta: f64) -> f64 {
        self.c_level - self.a_amplitude * (2.0 * theta + self.psi).sin()
    }

    pub fn is_circular(&self) -> bool {
        self.a_amplitude <= CIRCLE_TOLERANCE * self.c_level
    }
}

/// Basis vectors of the locus frame for one orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusBasis {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
    pub theta_o: f64,
    /// `‖e₁×e₂‖ / (‖e₁‖·‖e₂‖)`, 0 when either vector vanishes.
    pub degeneracy: f64,
}

impl LocusBasis {
    /// Completes a basis from a pair of quarter-period samples.
    pub fn from_vectors(e1: Vec3, e2: Vec3, theta_o: f64) -> Result<Self, LocusError> {
        let e3 = normal_vector(e1, e2)?;
        Ok(Self {
            e1,
            e2,
            e3,
            theta_o,
            degeneracy: degeneracy_metric(e1, e2),
        })
    }
}

/// `e₁ = v(θₒ)` and `e₂ = v(θₒ + π/2)`.
pub fn basis_vectors(segment: &ScenarioSegment, theta_o: f64) -> (Vec3, Vec3) {
    (
        evaluate(segment, theta_o),
        evaluate(segment, theta_o + FRAC_PI_2),
    )
}

/// Sine of the angle between `e1` and `e2`; 0 when either is (near) zero.
pub fn degeneracy_metric(e1: Vec3, e2: Vec3) -> f64 {
    let (n1, n2) = (norm(e1), norm(e2));
    if n1 <= ZERO_VECTOR_NORM || n2 <= ZERO_VECTOR_NORM {
        return 0.0;
    }
    (norm(cross(e1, e2)) / (n1 * n2)).min(1.0)
}

/// Unit normal of the locus plane scaled to length √3.
pub fn normal_vector(e1: Vec3, e2: Vec3) -> Result<Vec3, LocusError> {
    let metric = degeneracy_metric(e1, e2);
    if metric <= DEGENERACY_TOLERANCE {
        return Err(LocusError::DegenerateLocus { metric });
    }
    let c = cross(e1, e2);
    Ok(scale(c, 3f64.sqrt() / norm(c)))
}

/// Orientation at which phase a reaches its peak, `−φ_a` in `(-π, π]`.
pub fn theta_phase_a_peak(segment: &ScenarioSegment) -> Result<f64, LocusError> {
    if segment.amplitudes()[0] == 0.0 {
        return Err(LocusError::UndefinedOrientation);
    }
    Ok(wrap_angle(-segment.phase_offsets()[0]))
}

/// Closed-form coefficients of `‖v(θ)‖²`.
///
/// With total phases `ϕ_k`, `N = ΣV_k²cos 2ϕ_k` and `D = ΣV_k²sin 2ϕ_k`,
/// `ψ = atan2(−N, D)` keeps `A` non-negative.
pub fn norm_profile(segment: &ScenarioSegment) -> NormProfile {
    let amps = segment.amplitudes();
    let phases = segment.total_phases();
    let (mut n, mut d, mut c) = (0.0, 0.0, 0.0);
    for (v, phi) in amps.iter().zip(phases) {
        let w = v * v;
        n += w * (2.0 * phi).cos();
        d += w * (2.0 * phi).sin();
        c += w;
    }
    let psi = if n == 0.0 && d == 0.0 { 0.0 } else { (-n).atan2(d) };
    NormProfile {
        c_level: 0.5 * c,
        a_amplitude: 0.5 * n.hypot(d),
        psi,
    }
}

/// Orientation that aligns `e₁` with the semi-major axis, `−π/4 − ψ/2`.
pub fn theta_max_norm(segment: &ScenarioSegment) -> Result<f64, LocusError> {
    let profile = norm_profile(segment);
    if profile.is_circular() {
        return Err(LocusError::CircularLocus {
            amplitude: profile.a_amplitude,
            level: profile.c_level,
        });
    }
    Ok(wrap_angle(-FRAC_PI_4 - profile.psi / 2.0))
}

/// Resolves the orientation angle for `choice`.
///
/// `MaxNorm` falls back to `PhaseAPeak` on a circular locus.
pub fn resolve_orientation(
    segment: &ScenarioSegment,
    choice: OrientationChoice,
) -> Result<f64, LocusError> {
    match choice {
        OrientationChoice::Explicit(angle) => Ok(wrap_angle(angle)),
        OrientationChoice::PhaseAPeak => theta_phase_a_peak(segment),
        OrientationChoice::MaxNorm => match theta_max_norm(segment) {
            Err(LocusError::CircularLocus { .. }) => theta_phase_a_peak(segment),
            other => other,
        },
    }
}

pub fn build_basis(
    segment: &ScenarioSegment,
    choice: OrientationChoice,
) -> Result<LocusBasis, LocusError> {
    let theta_o = resolve_orientation(segment, choice)?;
    let (e1, e2) = basis_vectors(segment, theta_o);
    LocusBasis::from_vectors(e1, e2, theta_o)
}

/// Takes `e₁`, `e₂` directly from two frames a quarter period apart.
/// The implied orientation is `first.angle`.
pub fn basis_from_samples(
    first: &SampleFrame,
    second: &SampleFrame,
) -> Result<(Vec3, Vec3), LocusError> {
    let separation = second.angle - first.angle;
    if (separation - FRAC_PI_2).abs() > QUARTER_PERIOD_TOLERANCE {
        return Err(LocusError::NotQuarterPeriod { separation });
    }
    Ok((first.values, second.values))
}

/// Estimates `e₁`, `e₂` from a uniformly sampled series by linear
/// interpolation at `t1_angle` and `t1_angle + π/2`.
pub fn basis_from_stream(
    series: &[SampleFrame],
    t1_angle: f64,
) -> Result<(Vec3, Vec3), LocusError> {
    let t2_angle = t1_angle + FRAC_PI_2;
    let span_error = || LocusError::InsufficientSpan {
        first: series.first().map_or(f64::NAN, |f| f.angle),
        last: series.last().map_or(f64::NAN, |f| f.angle),
        from: t1_angle,
        to: t2_angle,
    };
    if series.len() < 2 {
        return Err(span_error());
    }
    let first = series[0].angle;
    let step = series[1].angle - first;
    if !(step > 0.0) {
        return Err(LocusError::NonUniformSampling { index: 1 });
    }
    let rate = 2.0 * PI / step;
    if rate < MIN_STREAM_SAMPLES_PER_PERIOD - 1e-9 {
        return Err(LocusError::InsufficientRate {
            samples_per_period: rate,
        });
    }
    if let Some(index) = series
        .windows(2)
        .position(|w| ((w[1].angle - w[0].angle) - step).abs() > 1e-6 * step)
    {
        return Err(LocusError::NonUniformSampling { index: index + 1 });
    }
    let last = series[series.len() - 1].angle;
    let tol = QUARTER_PERIOD_TOLERANCE;
    if t1_angle < first - tol || t2_angle > last + tol {
        return Err(span_error());
    }
    let interpolate = |angle: f64| -> Vec3 {
        let pos = ((angle - first) / step).max(0.0);
        let i = (pos.floor() as usize).min(series.len() - 2);
        let frac = pos - i as f64;
        let (lo, hi) = (series[i].values, series[i + 1].values);
        [0, 1, 2].map(|k| lo[k] + frac * (hi[k] - lo[k]))
    };
    Ok((interpolate(t1_angle), interpolate(t2_angle)))
}

/// `e₁·e₂` relative to `‖e₁‖·‖e₂‖`.
pub fn relative_skew(basis: &LocusBasis) -> f64 {
    dot(basis.e1, basis.e2) / (norm(basis.e1) * norm(basis.e2))
}
