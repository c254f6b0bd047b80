//! Quaternary belief-propagation decoders with memory effects for quantum
//! stabilizer codes.
//!
//! The crate provides:
//!
//! - [`pauli`]: phase-free N-qubit Pauli algebra over `{I, X, Y, Z}`;
//! - [`codes`]: check matrices with Tanner adjacency, the five-qubit /
//!   rotated surface / rotated toric / bicycle constructions, logical
//!   operator extraction, and a text file format;
//! - [`channel`]: depolarizing priors and error sampling;
//! - [`bp`]: the decoder family: log-domain MBP (with fixed inhibition and
//!   step scale 1/alpha), normalized BP, a linear-domain twin, and the
//!   adaptive alpha-grid wrapper;
//! - [`energy`]: energy-landscape diagnostics (distance and
//!   check-satisfaction terms, exact gradient, reference descent step, and
//!   the bounded / Taylor / negative-only / mismatch approximations);
//! - [`verify`]: degeneracy-aware outcome classification with brute-force
//!   coset and distance oracles;
//! - [`sim`]: a deterministic Monte-Carlo harness with event-based stopping,
//!   Clopper-Pearson intervals, and bounded-distance reference curves.

pub mod bp;
pub mod channel;
pub mod cli;
pub mod codes;
pub mod energy;
pub mod gf2;
pub mod pauli;
pub mod sim;
pub mod verify;

pub use bp::{
    boxplus, compare_decision_traces, decode, decode_adaptive, decode_linear, lambda_w,
    DecodeResult, DecodeStatus, DecoderConfig, Domain, Mode, Schedule,
};
pub use channel::ChannelPrior;
pub use codes::{
    compute_logicals, gen_bicycle, gen_five_qubit, gen_surface, gen_toric, load_check_matrix,
    parse_check_matrix, write_check_matrix, CheckMatrix, Code, CodeError,
};
pub use pauli::{Pauli1, PauliString};
pub use sim::{bdd_tail, confidence_interval, degeneracy_split, run_point, StopRule, TrialStats};
pub use verify::{brute_force_coset, classify, in_stabilizer_group, Outcome};
