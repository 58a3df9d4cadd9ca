//! Iterated digit maps and the exhaustive searches that pin down where they end.
//!
//! Four processes are covered:
//!
//! - [`collatz`]: the `x/2` / `3x+1` map, trajectories and range verification.
//! - [`kaprekar`]: the generalized Kaprekar routine `K_{u,v}` in any base at a
//!   fixed digit length, with exhaustive terminal classification.
//! - [`digitproc`]: digit-factorial (`dfp`) and digit-power (`dpp`) sums plus
//!   the descent and trap bounds that make their state space finite.
//! - [`verifier`]: multiset-reduced exhaustive confirmation that every `dfp` /
//!   `dpp` trajectory ends in a known cycle catalog.
//!
//! [`cycledetect`] is the shared terminal-cycle machinery, [`digits`] the
//! base-b decomposition and multiset enumeration, [`report`] the text / CSV /
//! JSON rendering, and [`cli`] the command-line front end.

pub mod cli;
pub mod collatz;
pub mod cycledetect;
pub mod digitproc;
pub mod digits;
pub mod kaprekar;
pub mod report;
pub mod verifier;

pub use cycledetect::{Cycle, TrajectoryResult};
pub use digitproc::ProcessKind;
pub use digits::{DigitMultiset, Digits};
pub use kaprekar::{KaprekarClassification, KaprekarConfig};
pub use verifier::{CycleCatalog, VerificationReport};
