//! Command-line front end.
//!
//! Every subcommand reads a JSON scenario file. `simulate` and `measure`
//! write CSV files with an angle column `t` (`ωt` in radians) followed by
//! three coordinate columns.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 degenerate
//! locus, 4 measurement error.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::locus::{
    basis_from_stream, basis_vectors, degeneracy_metric, LocusBasis, LocusError,
    OrientationChoice, DEGENERACY_TOLERANCE,
};
use crate::matrix::{format_decimal, norm};
use crate::transform::{
    assemble, clarke_from_abc, frame_for_segment, gvl_from_abc, FrameKind, FrameTransform,
    SegmentSelection, SeriesRow, TransformError, TransformedSeries,
};
use crate::waveform::{parse_scenario, sample_series, PhasorScenario, WaveformError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid scenario: {0}")]
    Scenario(#[from] WaveformError),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Degenerate(String),
    #[error("measurement failed: {0}")]
    Measurement(LocusError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Csv { .. } => 1,
            CliError::Scenario(_) | CliError::Invalid(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Measurement(_) => 4,
        }
    }
}

impl From<TransformError> for CliError {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Locus(LocusError::DegenerateLocus { .. })
            | TransformError::SingularMatrix { .. } => CliError::Degenerate(e.to_string()),
            TransformError::Waveform(w) => CliError::Scenario(w),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gvl", version, about = "Locus-aligned transformations for unbalanced three-phase signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a scenario file and summarize its segments.
    Validate {
        scenario: PathBuf,
    },
    /// Print the forward and inverse matrices of one segment.
    Matrix(MatrixArgs),
    /// Sample a scenario and write the requested frames as CSV.
    Simulate(SimulateArgs),
    /// Estimate the basis from sampled data and compare with the analytic frame.
    Measure(MeasureArgs),
}

#[derive(Debug, Args, Clone)]
pub struct MatrixArgs {
    pub scenario: PathBuf,
    /// phase-a-peak, max-norm, or angle:<rad>
    #[arg(long, default_value = "phase-a-peak", value_parser = parse_orientation)]
    pub orientation: OrientationChoice,
    /// Zero-based segment index; defaults to the segment active at t = 0.
    #[arg(long)]
    pub segment: Option<usize>,
    /// Normalize e1 and e2 to unit length.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum FrameArg {
    Abc,
    Gvl123,
    Clarke,
    Dq0,
}

#[derive(Debug, Args, Clone)]
pub struct SimulateArgs {
    pub scenario: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "abc,gvl123,dq0")]
    pub frames: Vec<FrameArg>,
    #[arg(long, default_value = "phase-a-peak", value_parser = parse_orientation)]
    pub orientation: OrientationChoice,
    #[arg(long)]
    pub segment: Option<usize>,
    #[arg(long)]
    pub normalized: bool,
    /// Samples per period.
    #[arg(long, default_value_t = 1000)]
    pub rate: usize,
    /// Number of periods, decimal or a fraction such as 5/2.
    #[arg(long, default_value = "1", value_parser = parse_periods)]
    pub periods: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Digits after the decimal point in CSV output.
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

#[derive(Debug, Args, Clone)]
pub struct MeasureArgs {
    pub scenario: PathBuf,
    /// Samples per period (at least 64).
    #[arg(long, default_value_t = 1000)]
    pub rate: usize,
    #[arg(long, default_value = "1", value_parser = parse_periods)]
    pub periods: f64,
    /// Electrical angle of the first measurement, in radians.
    #[arg(long = "t1-angle", default_value_t = 0.0, allow_negative_numbers = true)]
    pub t1_angle: f64,
    /// Standard deviation of additive Gaussian noise, per-unit.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the sampled series (`V_abc_measured.csv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub precision: usize,
}

pub fn parse_orientation(s: &str) -> Result<OrientationChoice, String> {
    match s {
        "phase-a-peak" => Ok(OrientationChoice::PhaseAPeak),
        "max-norm" => Ok(OrientationChoice::MaxNorm),
        _ => {
            let angle = s
                .strip_prefix("angle:")
                .ok_or_else(|| format!("unknown orientation `{s}`"))?;
            let angle: f64 = angle
                .trim()
                .parse()
                .map_err(|e| format!("invalid angle `{angle}`: {e}"))?;
            if !angle.is_finite() {
                return Err(format!("invalid angle `{angle}`"));
            }
            Ok(OrientationChoice::explicit(angle))
        }
    }
}

pub fn parse_periods(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|e| format!("invalid numerator: {e}"))?;
            let d: f64 = d.trim().parse().map_err(|e| format!("invalid denominator: {e}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|e| format!("invalid period count: {e}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("period count must be positive, got `{s}`"))
    }
}

/// File-name label: `classical`, `desired`, or `angle<millirad>`.
pub fn orientation_label(choice: OrientationChoice) -> String {
    match choice {
        OrientationChoice::PhaseAPeak => "classical".to_string(),
        OrientationChoice::MaxNorm => "desired".to_string(),
        OrientationChoice::Explicit(angle) => format!("angle{}", (angle * 1000.0).round() as i64),
    }
}

pub fn load_scenario(path: &Path) -> Result<PhasorScenario, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_scenario(&text)?)
}

fn selection(segment: Option<usize>) -> SegmentSelection {
    segment.map_or(SegmentSelection::AtStart, SegmentSelection::Index)
}

pub fn cmd_validate(path: &Path) -> Result<String, CliError> {
    let scenario = load_scenario(path)?;
    let mut out = String::new();
    writeln!(out, "scenario: {}", path.display()).unwrap();
    writeln!(out, "frequency_hz: {}", scenario.frequency_hz()).unwrap();
    writeln!(out, "segments: {}", scenario.segments().len()).unwrap();
    for (i, seg) in scenario.segments().iter().enumerate() {
        let (e1, e2) = basis_vectors(seg, 0.0);
        let metric = degeneracy_metric(e1, e2);
        let offsets = seg.phase_offsets().map(f64::to_degrees);
        write!(
            out,
            "segment {i}: start {:.6} rad, amplitudes [{}, {}, {}] pu, offsets [{:.3}, {:.3}, {:.3}] deg, degeneracy {:.6}",
            seg.start_angle(),
            seg.amplitudes()[0],
            seg.amplitudes()[1],
            seg.amplitudes()[2],
            offsets[0],
            offsets[1],
            offsets[2],
            metric
        )
        .unwrap();
        if metric <= DEGENERACY_TOLERANCE {
            write!(out, " (below threshold {DEGENERACY_TOLERANCE:e}: linear locus)").unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn cmd_matrix(args: &MatrixArgs) -> Result<String, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let t = frame_for_segment(
        &scenario,
        selection(args.segment),
        args.orientation,
        args.normalized,
    )?;
    let (e1, e2) = (t.inverse.column(0), t.inverse.column(1));
    let mut out = String::new();
    writeln!(
        out,
        "segment: {}",
        args.segment.map_or("0 (active at t = 0)".to_string(), |i| i.to_string())
    )
    .unwrap();
    writeln!(out, "orientation: {}", orientation_label(args.orientation)).unwrap();
    writeln!(out, "theta_o: {:.6} rad", t.theta_o).unwrap();
    writeln!(out, "normalized: {}", t.normalized).unwrap();
    writeln!(out, "forward (abc -> 123):\n{}", t.forward).unwrap();
    writeln!(out, "inverse [e1 e2 e3]:\n{}", t.inverse.formatted(6)).unwrap();
    writeln!(out, "|e1|: {:.6}", norm(e1)).unwrap();
    writeln!(out, "|e2|: {:.6}", norm(e2)).unwrap();
    writeln!(out, "degeneracy: {:.6}", degeneracy_metric(e1, e2)).unwrap();
    writeln!(out, "det(inverse): {:.6}", t.det_inverse).unwrap();
    Ok(out)
}

/// Writes `series` as CSV: header `t,<columns>`, fixed `precision` decimals.
pub fn write_series_csv(
    path: &Path,
    series: &TransformedSeries,
    precision: usize,
) -> Result<(), CliError> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let [c1, c2, c3] = series.frame_kind().columns();
    w.write_record(["t", c1, c2, c3]).map_err(csv_err)?;
    for row in series.rows() {
        let [a, b, c] = row.values;
        w.write_record([row.angle, a, b, c].map(|x| format_decimal(x, precision)))
            .map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a CSV written by [`write_series_csv`]; the frame is inferred from
/// the header.
pub fn read_series_csv(path: &Path) -> Result<TransformedSeries, CliError> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let kind = [
        FrameKind::Abc,
        FrameKind::Gvl123,
        FrameKind::ClarkeAb0,
        FrameKind::Dq0,
    ]
    .into_iter()
    .find(|k| header.len() == 4 && header[0] == "t" && header[1..] == k.columns())
    .ok_or_else(|| CliError::Invalid(format!("{}: unrecognized header {header:?}", path.display())))?;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        let mut nums = [0.0; 4];
        for (slot, field) in nums.iter_mut().zip(record.iter()) {
            *slot = field.parse().map_err(|e| {
                CliError::Invalid(format!("{}: bad number `{field}`: {e}", path.display()))
            })?;
        }
        rows.push(SeriesRow {
            angle: nums[0],
            values: [nums[1], nums[2], nums[3]],
        });
    }
    TransformedSeries::new(kind, rows).map_err(|e| CliError::Invalid(e.to_string()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Samples the scenario and writes one CSV per requested frame. Returns the
/// paths written.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<Vec<PathBuf>, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    let requested: BTreeSet<FrameArg> = args.frames.iter().copied().collect();
    if requested.is_empty() {
        return Err(CliError::Invalid("no frames requested".into()));
    }
    let frames = sample_series(&scenario, args.rate, args.periods)?;
    let abc = TransformedSeries::abc(&frames);
    let label = orientation_label(args.orientation);

    let mut outputs: Vec<(String, TransformedSeries)> = Vec::new();
    if requested.contains(&FrameArg::Abc) {
        outputs.push(("V_abc.csv".into(), abc.clone()));
    }
    if requested.contains(&FrameArg::Gvl123) || requested.contains(&FrameArg::Dq0) {
        let transform = frame_for_segment(
            &scenario,
            selection(args.segment),
            args.orientation,
            args.normalized,
        )?;
        let gvl = gvl_from_abc(&abc, transform);
        if requested.contains(&FrameArg::Gvl123) {
            outputs.push((format!("V_123_{label}.csv"), gvl.coordinates));
        }
        if requested.contains(&FrameArg::Dq0) {
            outputs.push((format!("V_dq0_{label}.csv"), gvl.dq0));
        }
    }
    if requested.contains(&FrameArg::Clarke) {
        let clarke = clarke_from_abc(&abc);
        outputs.push(("V_ab0_clarke.csv".into(), clarke.ab0));
        if requested.contains(&FrameArg::Dq0) {
            outputs.push(("V_dq0_clarke.csv".into(), clarke.dq0));
        }
    }

    create_dir(&args.out)?;
    outputs
        .into_iter()
        .map(|(name, series)| {
            let path = args.out.join(name);
            write_series_csv(&path, &series, args.precision)?;
            Ok(path)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub samples_per_period: usize,
    pub t1_angle: f64,
    pub noise: f64,
    pub estimated: FrameTransform,
    pub analytic: FrameTransform,
    /// Largest entrywise difference of the forward matrices.
    pub max_deviation: f64,
    pub written: Option<PathBuf>,
}

impl fmt::Display for MeasureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples per period: {}", self.samples_per_period)?;
        writeln!(f, "t1 angle: {:.6} rad", self.t1_angle)?;
        writeln!(f, "noise sigma: {}", self.noise)?;
        writeln!(f, "estimated forward (abc -> 123):\n{}", self.estimated.forward)?;
        writeln!(f, "analytic forward (abc -> 123):\n{}", self.analytic.forward)?;
        writeln!(f, "max deviation: {:.3e}", self.max_deviation)?;
        if let Some(path) = &self.written {
            writeln!(f, "samples written to {}", path.display())?;
        }
        Ok(())
    }
}

/// Estimates the frame from quarter-period samples of a (possibly noisy)
/// sampled series and compares it with the analytic frame at the same angle.
pub fn cmd_measure(args: &MeasureArgs) -> Result<MeasureReport, CliError> {
    let scenario = load_scenario(&args.scenario)?;
    if !(args.noise.is_finite() && args.noise >= 0.0) {
        return Err(CliError::Invalid(format!(
            "noise standard deviation must be non-negative, got {}",
            args.noise
        )));
    }
    let mut frames = sample_series(&scenario, args.rate, args.periods)?;
    if args.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let normal = Normal::new(0.0, args.noise)
            .map_err(|e| CliError::Invalid(format!("invalid noise: {e}")))?;
        for frame in &mut frames {
            for v in &mut frame.values {
                *v += normal.sample(&mut rng);
            }
        }
    }

    let (e1, e2) = basis_from_stream(&frames, args.t1_angle).map_err(CliError::Measurement)?;
    let estimated = LocusBasis::from_vectors(e1, e2, args.t1_angle)
        .map_err(|e| CliError::Degenerate(format!("estimated basis: {e}")))?;
    let estimated = assemble(&estimated, false)?;

    let segment = scenario.segment_at(args.t1_angle);
    let (a1, a2) = basis_vectors(segment, args.t1_angle);
    let analytic = LocusBasis::from_vectors(a1, a2, args.t1_angle)
        .map_err(|e| CliError::Degenerate(format!("analytic basis: {e}")))?;
    let analytic = assemble(&analytic, false)?;

    let written = match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            let path = dir.join("V_abc_measured.csv");
            write_series_csv(&path, &TransformedSeries::abc(&frames), args.precision)?;
            Some(path)
        }
        None => None,
    };

    Ok(MeasureReport {
        samples_per_period: args.rate,
        t1_angle: args.t1_angle,
        noise: args.noise,
        max_deviation: estimated.forward.max_abs_diff(&analytic.forward),
        estimated,
        analytic,
        written,
    })
}

/// Runs one parsed command and returns its standard output text.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Validate { scenario } => cmd_validate(scenario),
        Command::Matrix(args) => cmd_matrix(args),
        Command::Simulate(args) => {
            let written = cmd_simulate(args)?;
            Ok(written
                .iter()
                .map(|p| format!("wrote {}\n", p.display()))
                .collect())
        }
        Command::Measure(args) => cmd_measure(args).map(|r| r.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_flags() {
        assert_eq!(parse_orientation("phase-a-peak"), Ok(OrientationChoice::PhaseAPeak));
        assert_eq!(parse_orientation("max-norm"), Ok(OrientationChoice::MaxNorm));
        assert_eq!(parse_orientation("angle:0.5"), Ok(OrientationChoice::Explicit(0.5)));
        assert_eq!(parse_orientation("angle:-1.2"), Ok(OrientationChoice::Explicit(-1.2)));
        assert!(parse_orientation("angle:abc").is_err());
        assert!(parse_orientation("sideways").is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(orientation_label(OrientationChoice::PhaseAPeak), "classical");
        assert_eq!(orientation_label(OrientationChoice::MaxNorm), "desired");
        assert_eq!(orientation_label(OrientationChoice::Explicit(1.2217)), "angle1222");
        assert_eq!(orientation_label(OrientationChoice::Explicit(-1.0483)), "angle-1048");
    }

    #[test]
    fn period_counts() {
        assert_eq!(parse_periods("2"), Ok(2.0));
        assert_eq!(parse_periods("5/2"), Ok(2.5));
        assert_eq!(parse_periods("0.25"), Ok(0.25));
        assert!(parse_periods("0").is_err());
        assert!(parse_periods("-1").is_err());
        assert!(parse_periods("1/0").is_err());
        assert!(parse_periods("x").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Invalid("x".into()).exit_code(), 2);
        assert_eq!(CliError::Scenario(WaveformError::NoSegments).exit_code(), 2);
        let degenerate: CliError =
            TransformError::Locus(LocusError::DegenerateLocus { metric: 0.0 }).into();
        assert_eq!(degenerate.exit_code(), 3);
        assert_eq!(
            CliError::Measurement(LocusError::InsufficientRate { samples_per_period: 32.0 })
                .exit_code(),
            4
        );
    }
}
