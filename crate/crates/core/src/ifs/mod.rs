//! IFS maps on a compact interval, their derivative moduli, words and the
//! distortion constants of composed maps.

mod antichain;
mod distortion;
mod map;
mod model;
mod similitude_check;
mod word;

pub use antichain::{antichain_threshold, verify_antichain, AntichainCertificate};
pub use distortion::{distortion_report, DepthDistortion, DistortionReport};
pub use map::MapDescriptor;
pub use model::{IfsModel, Interval, ModelConfig, SoscReport};
pub use similitude_check::{
    check_infinitesimal_similitude, check_map, ProbeOutcome, SimilitudeCheck,
};
pub use word::{Word, WordBounds, DEFAULT_WORD_CAP};

/// Inequality checks use sampled constants inflated by this factor.
pub const CONSTANT_SLACK: f64 = 1.05;
