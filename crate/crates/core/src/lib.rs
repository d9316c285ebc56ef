//! Dominant Pólya sequences: a reinforced urn whose colors carry random,
//! color-dependent weights, together with the statistics and Monte Carlo
//! harness used to check its limit behavior.

pub mod base;
pub mod color;
pub mod error;
pub mod index;
pub mod montecarlo;
pub mod presets;
pub mod rng;
pub mod stats;
pub mod urn;
pub mod weights;

pub use base::{BaseMeasure, ContinuousLaw, DiscreteLaw};
pub use color::{Color, Interval, LabelSet, SetExpr};
pub use error::{Error, Result};
pub use index::{IndexKind, SampleIndex};
pub use rng::{CounterRng, ReplicateStreams, StreamRole};
pub use urn::{Checkpoint, ProbabilityKind, Trajectory, UrnState};
pub use weights::{MeanFunction, NoiseSpec, ValidationReport, WeightModel};
