//! Depth-first MIMO sphere decoding with exact operation counting.
//!
//! The crate provides two tree-search detectors over the same lattice model:
//!
//! * a conventional depth-first sphere decoder that evaluates every partial
//!   weight from scratch, and
//! * a reduced-complexity decoder that resolves `R(i,j)·x` products through a
//!   precomputed [`CheckTable`](decoder::CheckTable), caches the
//!   child-independent residual of each parent, and replays sibling partial
//!   weights made redundant by the structural zeros of the interleaved
//!   real-valued representation.
//!
//! Both return the exact maximum-likelihood solution. Every real
//! multiplication and addition is tallied in an [`OpCount`](decoder::OpCount)
//! so the two can be compared on identical channel and noise draws.
//!
//! The [`sim`] module runs burst-structured Monte-Carlo experiments over
//! Rayleigh flat-fading channels and [`report`] renders the results as CSV and
//! SVG.

pub mod decoder;
pub mod error;
pub mod lattice;
pub mod report;
pub mod sim;

pub use decoder::{ml_brute_force, CheckTable, DecodeResult, Features, OpCount, SearchContext};
pub use error::{Error, Result};
pub use lattice::{
    make_constellation, qr_factor, to_interleaved_real, to_stacked_real, ComplexChannel,
    Constellation, QrFactors, RealLattice, Representation, C64,
};
pub use sim::{run_experiment, DecoderKind, ExperimentConfig, TrialRecord};
