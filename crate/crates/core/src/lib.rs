//! Generalized vector locus transformation for unbalanced three-phase
//! four-wire systems.
//!
//! The space vector of a sinusoidal three-phase set traces an ellipse. Sampling
//! it twice, a quarter period apart, gives two in-plane basis vectors; a
//! √3-scaled normal completes the frame. In that frame the first two
//! coordinates are unit-amplitude quadrature sinusoids and the third is zero,
//! so a synchronous Park rotation yields constant `d` and `q`.
//!
//! ```
//! use std::f64::consts::PI;
//! use gvl::locus::{build_basis, OrientationChoice};
//! use gvl::transform::assemble;
//! use gvl::waveform::ScenarioSegment;
//!
//! let segment = ScenarioSegment::new(
//!     0.0,
//!     [0.7, 1.0, 0.4],
//!     [-7.0 * PI / 18.0, -PI / 18.0, -PI / 2.0],
//! )?;
//! let basis = build_basis(&segment, OrientationChoice::PhaseAPeak)?;
//! let frame = assemble(&basis, false)?;
//! assert_eq!(frame.forward.row(2).map(|x| (x * 1000.0).round() / 1000.0), [-0.116, 0.234, 0.515]);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cli;
pub mod locus;
pub mod matrix;
pub mod sequence;
pub mod transform;
pub mod waveform;

pub use locus::{LocusBasis, LocusError, NormProfile, OrientationChoice};
pub use matrix::{Matrix3, Vec3};
pub use sequence::{PhasorTriple, SequenceComponents, SequenceError};
pub use transform::{FrameKind, FrameTransform, TransformError, TransformedSeries};
pub use waveform::{PhasorScenario, SampleFrame, ScenarioSegment, WaveformError};
