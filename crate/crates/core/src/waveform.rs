//! Piecewise sinusoidal three-phase signal model.
//!
//! A [`PhasorScenario`] is an ordered list of [`ScenarioSegment`]s sharing one
//! fundamental frequency. Each segment stores per-phase amplitudes and phase
//! offsets; the structural `-2π/3` / `+2π/3` shifts of phases b and c are
//! applied only when a segment is evaluated.

use std::f64::consts::{PI, TAU};

use serde::Deserialize;
use thiserror::Error;

/// Structural phase shifts of phases a, b and c.
pub const STRUCTURAL_SHIFTS: [f64; 3] = [0.0, -2.0 * PI / 3.0, 2.0 * PI / 3.0];

/// Lowest sampling rate at which a quarter-period pair of samples exists.
pub const MIN_SAMPLES_PER_PERIOD: usize = 4;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveformError {
    #[error("malformed scenario document: {0}")]
    Malformed(String),
    #[error("missing field `{field}`{}", segment_suffix(*.segment))]
    MissingField {
        field: &'static str,
        segment: Option<usize>,
    },
    #[error("non-positive frequency: {0} Hz")]
    NonPositiveFrequency(f64),
    #[error("non-finite value in field `{field}`{}", segment_suffix(*.segment))]
    NonFinite {
        field: &'static str,
        segment: Option<usize>,
    },
    #[error("scenario has no segments")]
    NoSegments,
    #[error("first segment must start at angle 0, found {0} rad")]
    FirstSegmentNotAtZero(f64),
    #[error("non-increasing segment start at segment {index}: {start} rad after {previous} rad")]
    NonIncreasingSegments {
        index: usize,
        previous: f64,
        start: f64,
    },
    #[error("negative amplitude {value} for phase {phase} in segment {segment}")]
    NegativeAmplitude {
        segment: usize,
        phase: char,
        value: f64,
    },
    #[error("samples per period must be at least {MIN_SAMPLES_PER_PERIOD}, got {0}")]
    SampleRateTooLow(usize),
    #[error("number of periods must be positive and finite, got {0}")]
    InvalidPeriods(f64),
}

fn segment_suffix(segment: Option<usize>) -> String {
    segment.map(|i| format!(" in segment {i}")).unwrap_or_default()
}

const PHASE_NAMES: [char; 3] = ['a', 'b', 'c'];

/// Amplitudes and phase offsets of one stretch of a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSegment {
    start_angle: f64,
    amplitudes: [f64; 3],
    phase_offsets: [f64; 3],
}

impl ScenarioSegment {
    /// Builds a segment, wrapping the phase offsets into `(-π, π]`.
    ///
    /// The segment index reported in errors is 0.
    pub fn new(
        start_angle: f64,
        amplitudes: [f64; 3],
        phase_offsets: [f64; 3],
    ) -> Result<Self, WaveformError> {
        Self::checked(0, start_angle, amplitudes, phase_offsets)
    }

    fn checked(
        index: usize,
        start_angle: f64,
        amplitudes: [f64; 3],
        phase_offsets: [f64; 3],
    ) -> Result<Self, WaveformError> {
        if !start_angle.is_finite() {
            return Err(WaveformError::NonFinite {
                field: "start_periods",
                segment: Some(index),
            });
        }
        if amplitudes.iter().any(|v| !v.is_finite()) {
            return Err(WaveformError::NonFinite {
                field: "amplitudes_pu",
                segment: Some(index),
            });
        }
        if phase_offsets.iter().any(|v| !v.is_finite()) {
            return Err(WaveformError::NonFinite {
                field: "phase_offsets_deg",
                segment: Some(index),
            });
        }
        if let Some(k) = amplitudes.iter().position(|&v| v < 0.0) {
            return Err(WaveformError::NegativeAmplitude {
                segment: index,
                phase: PHASE_NAMES[k],
                value: amplitudes[k],
            });
        }
        Ok(Self {
            start_angle,
            amplitudes,
            phase_offsets: phase_offsets.map(wrap_angle),
        })
    }

    /// A balanced segment starting at angle 0: equal amplitudes and offsets.
    pub fn balanced(amplitude: f64, phase_offset: f64) -> Result<Self, WaveformError> {
        Self::new(0.0, [amplitude; 3], [phase_offset; 3])
    }

    /// Value of `ωt` at which this segment takes over, in radians.
    pub fn start_angle(&self) -> f64 {
        self.start_angle
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        self.amplitudes
    }

    /// Phase offsets in `(-π, π]`, without the structural shifts.
    pub fn phase_offsets(&self) -> [f64; 3] {
        self.phase_offsets
    }

    /// Phase offsets including the structural shifts of phases b and c.
    pub fn total_phases(&self) -> [f64; 3] {
        [
            self.phase_offsets[0] + STRUCTURAL_SHIFTS[0],
            self.phase_offsets[1] + STRUCTURAL_SHIFTS[1],
            self.phase_offsets[2] + STRUCTURAL_SHIFTS[2],
        ]
    }

    /// Instantaneous phase values `(v_a, v_b, v_c)` at electrical angle `angle`.
    pub fn evaluate(&self, angle: f64) -> [f64; 3] {
        evaluate(self, angle)
    }
}

/// Instantaneous phase values of `segment` at electrical angle `angle` (`ωt`).
pub fn evaluate(segment: &ScenarioSegment, angle: f64) -> [f64; 3] {
    let total = segment.total_phases();
    let amps = segment.amplitudes;
    [
        amps[0] * (angle + total[0]).cos(),
        amps[1] * (angle + total[1]).cos(),
        amps[2] * (angle + total[2]).cos(),
    ]
}

/// A piecewise three-phase scenario at a fixed fundamental frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasorScenario {
    omega: f64,
    segments: Vec<ScenarioSegment>,
}

impl PhasorScenario {
    /// Validates ordering: at least one segment, the first at angle 0, then
    /// strictly increasing start angles.
    pub fn new(omega: f64, segments: Vec<ScenarioSegment>) -> Result<Self, WaveformError> {
        if !omega.is_finite() {
            return Err(WaveformError::NonFinite {
                field: "frequency_hz",
                segment: None,
            });
        }
        if omega <= 0.0 {
            return Err(WaveformError::NonPositiveFrequency(omega / TAU));
        }
        let first = segments.first().ok_or(WaveformError::NoSegments)?;
        if first.start_angle != 0.0 {
            return Err(WaveformError::FirstSegmentNotAtZero(first.start_angle));
        }
        for (i, pair) in segments.windows(2).enumerate() {
            if pair[1].start_angle <= pair[0].start_angle {
                return Err(WaveformError::NonIncreasingSegments {
                    index: i + 1,
                    previous: pair[0].start_angle,
                    start: pair[1].start_angle,
                });
            }
        }
        Ok(Self { omega, segments })
    }

    /// Single-segment scenario.
    pub fn single(omega: f64, segment: ScenarioSegment) -> Result<Self, WaveformError> {
        let segment = ScenarioSegment { start_angle: 0.0, ..segment };
        Self::new(omega, vec![segment])
    }

    /// Angular frequency in rad/s.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn frequency_hz(&self) -> f64 {
        self.omega / TAU
    }

    pub fn segments(&self) -> &[ScenarioSegment] {
        &self.segments
    }

    pub fn segment_at(&self, angle: f64) -> &ScenarioSegment {
        segment_at(self, angle)
    }

    /// Evaluates whichever segment is active at `angle`.
    pub fn evaluate(&self, angle: f64) -> [f64; 3] {
        evaluate(segment_at(self, angle), angle)
    }
}

/// The segment active at `angle`: the one with the largest start angle not
/// exceeding it. Switch angles belong to the later segment.
pub fn segment_at(scenario: &PhasorScenario, angle: f64) -> &ScenarioSegment {
    let idx = scenario
        .segments
        .partition_point(|s| s.start_angle <= angle)
        .saturating_sub(1);
    &scenario.segments[idx]
}

/// One time-stamped phase triple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleFrame {
    /// Electrical angle `ωt` in radians.
    pub angle: f64,
    pub values: [f64; 3],
}

/// Samples `scenario` on a uniform grid of `samples_per_period` points per
/// period over `[0, 2π·periods]`, endpoints included.
pub fn sample_series(
    scenario: &PhasorScenario,
    samples_per_period: usize,
    periods: f64,
) -> Result<Vec<SampleFrame>, WaveformError> {
    if samples_per_period < MIN_SAMPLES_PER_PERIOD {
        return Err(WaveformError::SampleRateTooLow(samples_per_period));
    }
    if !(periods.is_finite() && periods > 0.0) {
        return Err(WaveformError::InvalidPeriods(periods));
    }
    // Tolerate rounding in rational period counts such as 2.0/3.0 * 3.
    let steps = (samples_per_period as f64 * periods + 1e-9).floor() as usize;
    let step = TAU / samples_per_period as f64;
    Ok((0..=steps)
        .map(|k| {
            let angle = k as f64 * step;
            SampleFrame {
                angle,
                values: scenario.evaluate(angle),
            }
        })
        .collect())
}

#[derive(Debug, Deserialize)]
struct RawScenario {
    frequency_hz: Option<f64>,
    segments: Option<Vec<RawSegment>>,
}

#[derive(Debug, Deserialize)]
struct RawSegment {
    start_periods: Option<f64>,
    amplitudes_pu: Option<[f64; 3]>,
    phase_offsets_deg: Option<[f64; 3]>,
}

/// Parses a JSON scenario document.
///
/// Phase offsets are given in degrees and segment starts in periods; both are
/// converted to radians here.
pub fn parse_scenario(text: &str) -> Result<PhasorScenario, WaveformError> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| WaveformError::Malformed(e.to_string()))?;
    let frequency = raw.frequency_hz.ok_or(WaveformError::MissingField {
        field: "frequency_hz",
        segment: None,
    })?;
    if !frequency.is_finite() {
        return Err(WaveformError::NonFinite {
            field: "frequency_hz",
            segment: None,
        });
    }
    if frequency <= 0.0 {
        return Err(WaveformError::NonPositiveFrequency(frequency));
    }
    let raw_segments = raw.segments.ok_or(WaveformError::MissingField {
        field: "segments",
        segment: None,
    })?;
    let segments = raw_segments
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let missing = |field| WaveformError::MissingField {
                field,
                segment: Some(i),
            };
            let start = s.start_periods.ok_or_else(|| missing("start_periods"))?;
            let amplitudes = s.amplitudes_pu.ok_or_else(|| missing("amplitudes_pu"))?;
            let offsets = s
                .phase_offsets_deg
                .ok_or_else(|| missing("phase_offsets_deg"))?;
            ScenarioSegment::checked(i, TAU * start, amplitudes, offsets.map(f64::to_radians))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PhasorScenario::new(TAU * frequency, segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unbalanced_segment() -> ScenarioSegment {
        ScenarioSegment::new(
            0.0,
            [0.7, 1.0, 0.4],
            [-7.0 * PI / 18.0, -PI / 18.0, -PI / 2.0],
        )
        .unwrap()
    }

    fn two_segment() -> PhasorScenario {
        PhasorScenario::new(
            TAU * 50.0,
            vec![
                ScenarioSegment::balanced(1.0, 0.0).unwrap(),
                ScenarioSegment::new(TAU, [0.7, 1.0, 0.4], [0.0; 3]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn balanced_at_zero() {
        let v = evaluate(&ScenarioSegment::balanced(1.0, 0.0).unwrap(), 0.0);
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!((v[1] + 0.5).abs() < 1e-15);
        assert!((v[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn unbalanced_example_triple() {
        let v = evaluate(&unbalanced_segment(), 7.0 * PI / 18.0);
        // Oracle: cos of the total phases written out by hand.
        let expected = [
            0.7 * 0f64.cos(),
            1.0 * (7.0 * PI / 18.0 - PI / 18.0 - 2.0 * PI / 3.0).cos(),
            0.4 * (7.0 * PI / 18.0 - PI / 2.0 + 2.0 * PI / 3.0).cos(),
        ];
        for k in 0..3 {
            assert!((v[k] - expected[k]).abs() < 1e-15);
        }
        assert!((v[0] - 0.7).abs() < 1e-12);
        assert!((v[1] - 0.5).abs() < 1e-12);
        assert!((v[2] + 0.0695).abs() < 1e-4);
    }

    #[test]
    fn offsets_are_wrapped() {
        let s = ScenarioSegment::new(0.0, [1.0; 3], [3.0 * PI, -PI, 0.5]).unwrap();
        let p = s.phase_offsets();
        assert!((p[0] - PI).abs() < 1e-12);
        assert!((p[1] - PI).abs() < 1e-12);
        assert_eq!(p[2], 0.5);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(7.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.0), 0.0);
    }

    #[test]
    fn segment_lookup_boundaries() {
        let sc = two_segment();
        assert_eq!(sc.segment_at(0.0).start_angle(), 0.0);
        assert_eq!(sc.segment_at(TAU).start_angle(), TAU);
        assert_eq!(sc.segment_at(TAU - 1e-12).start_angle(), 0.0);
        assert_eq!(sc.segment_at(100.0).start_angle(), TAU);

        let one = PhasorScenario::single(1.0, unbalanced_segment()).unwrap();
        for a in [0.0, 1.0, 1e6] {
            assert_eq!(one.segment_at(a), &one.segments()[0]);
        }
    }

    #[test]
    fn sample_grid() {
        let sc = PhasorScenario::single(1.0, ScenarioSegment::balanced(1.0, 0.0).unwrap()).unwrap();
        let frames = sample_series(&sc, 4, 1.0).unwrap();
        let angles: Vec<f64> = frames.iter().map(|f| f.angle).collect();
        assert_eq!(angles.len(), 5);
        for (a, e) in angles.iter().zip([0.0, PI / 2.0, PI, 1.5 * PI, TAU]) {
            assert!((a - e).abs() < 1e-15);
        }
        assert_eq!(sample_series(&sc, 10, 2.5).unwrap().len(), 26);
        assert_eq!(sample_series(&sc, 3, 1.0), Err(WaveformError::SampleRateTooLow(3)));
        assert_eq!(sample_series(&sc, 8, 0.0), Err(WaveformError::InvalidPeriods(0.0)));
    }

    #[test]
    fn sample_matches_evaluate_at_grid_point() {
        let sc = PhasorScenario::single(1.0, unbalanced_segment()).unwrap();
        // 7π/18 = 2π·(7/36): index 7000/36 is not integral at 1000/period,
        // so use 36 000 samples per period where it lands on index 7000.
        let frames = sample_series(&sc, 36_000, 1.0).unwrap();
        let f = frames[7000];
        let direct = evaluate(&sc.segments()[0], 7.0 * PI / 18.0);
        for k in 0..3 {
            assert!((f.values[k] - direct[k]).abs() < 1e-12);
        }
        let coarse = sample_series(&sc, 1000, 1.0).unwrap();
        for f in &coarse {
            let direct = evaluate(&sc.segments()[0], f.angle);
            assert_eq!(f.values, direct);
        }
    }

    #[test]
    fn parse_two_segment_file() {
        let text = include_str!("../scenarios/balanced_to_unbalanced.json");
        let sc = parse_scenario(text).unwrap();
        assert_eq!(sc.segments().len(), 2);
        assert!((sc.frequency_hz() - 50.0).abs() < 1e-12);
        let unb = sc.segments()[1];
        assert!((unb.start_angle() - TAU).abs() < 1e-15);
        assert_eq!(unb.amplitudes(), [0.7, 1.0, 0.4]);
        let expected = [-7.0 * PI / 18.0, -PI / 18.0, -PI / 2.0];
        for k in 0..3 {
            assert!((unb.phase_offsets()[k] - expected[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn parse_single_segment() {
        let sc = parse_scenario(include_str!("../scenarios/balanced.json")).unwrap();
        assert_eq!(sc.segments().len(), 1);
    }

    #[test]
    fn parse_diagnostics() {
        let neg = r#"{"frequency_hz": 50, "segments": [
            {"start_periods": 0, "amplitudes_pu": [1, -0.1, 1], "phase_offsets_deg": [0, 0, 0]}]}"#;
        let err = parse_scenario(neg).unwrap_err();
        assert!(matches!(err, WaveformError::NegativeAmplitude { phase: 'b', .. }));
        assert!(err.to_string().contains("negative amplitude"));

        let order = r#"{"frequency_hz": 50, "segments": [
            {"start_periods": 0, "amplitudes_pu": [1, 1, 1], "phase_offsets_deg": [0, 0, 0]},
            {"start_periods": 0, "amplitudes_pu": [1, 1, 1], "phase_offsets_deg": [0, 0, 0]}]}"#;
        assert!(matches!(
            parse_scenario(order),
            Err(WaveformError::NonIncreasingSegments { index: 1, .. })
        ));

        let freq = r#"{"frequency_hz": 0, "segments": []}"#;
        assert_eq!(parse_scenario(freq), Err(WaveformError::NonPositiveFrequency(0.0)));

        let missing = r#"{"frequency_hz": 50, "segments": [
            {"start_periods": 0, "amplitudes_pu": [1, 1, 1]}]}"#;
        assert_eq!(
            parse_scenario(missing),
            Err(WaveformError::MissingField {
                field: "phase_offsets_deg",
                segment: Some(0)
            })
        );
        assert_eq!(
            parse_scenario(r#"{"segments": []}"#),
            Err(WaveformError::MissingField {
                field: "frequency_hz",
                segment: None
            })
        );
        assert_eq!(
            parse_scenario(r#"{"frequency_hz": 50, "segments": []}"#),
            Err(WaveformError::NoSegments)
        );
        let late = r#"{"frequency_hz": 50, "segments": [
            {"start_periods": 0.5, "amplitudes_pu": [1, 1, 1], "phase_offsets_deg": [0, 0, 0]}]}"#;
        assert!(matches!(
            parse_scenario(late),
            Err(WaveformError::FirstSegmentNotAtZero(_))
        ));
        assert!(matches!(
            parse_scenario("{ not json"),
            Err(WaveformError::Malformed(_))
        ));
        assert!(matches!(
            parse_scenario(r#"{"frequency_hz": 50, "segments": [{"start_periods": 0, "amplitudes_pu": [1, 1], "phase_offsets_deg": [0, 0, 0]}]}"#),
            Err(WaveformError::Malformed(_))
        ));
    }

    fn segment_strategy() -> impl Strategy<Value = ScenarioSegment> {
        (
            prop::array::uniform3(0.0..2.0f64),
            prop::array::uniform3(-PI..PI),
        )
            .prop_map(|(v, p)| ScenarioSegment::new(0.0, v, p).unwrap())
    }

    proptest! {
        #[test]
        fn periodic(seg in segment_strategy(), theta in -20.0..20.0f64) {
            let a = evaluate(&seg, theta);
            let b = evaluate(&seg, theta + TAU);
            for k in 0..3 {
                prop_assert!((a[k] - b[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn balanced_sums_to_zero(v in 0.0..2.0f64, phi in -PI..PI, theta in -20.0..20.0f64) {
            let seg = ScenarioSegment::balanced(v, phi).unwrap();
            let s: f64 = evaluate(&seg, theta).iter().sum();
            prop_assert!(s.abs() < 1e-12);
        }

        #[test]
        fn linear_in_amplitude(seg in segment_strategy(), theta in -20.0..20.0f64, exp in -4i32..4) {
            // Power-of-two scale factors keep the product exact.
            let k = 2f64.powi(exp);
            let scaled = ScenarioSegment::new(0.0, seg.amplitudes().map(|v| v * k), seg.phase_offsets()).unwrap();
            let a = evaluate(&seg, theta);
            let b = evaluate(&scaled, theta);
            for i in 0..3 {
                prop_assert_eq!(b[i], a[i] * k);
            }
        }
    }
}
