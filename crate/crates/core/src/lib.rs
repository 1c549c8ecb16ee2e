//! State-vector simulation of quantum oracle algorithms in which the oracle
//! mode `k` is itself a quantum register.
//!
//! The crate is split along the lines of the simulation stack:
//!
//! - [`statevector`]: dense complex amplitudes over named registers, gates,
//!   projective measurement and marginals.
//! - [`oracle`]: function families `{f_k}`, their classification, the family
//!   file format and the truth table of the mode-controlled gate `F(k, x)`.
//! - [`algorithms`]: Deutsch, Deutsch-Jozsa and Grover circuits with either a
//!   sharp (classical) mode or a superposed mode register.
//! - [`protocol`]: the examiner/examinee game, trial statistics and the
//!   backdated-collapse audit.
//! - [`cli`]: the `oraclesim` command line front end.

pub mod algorithms;
pub mod bits;
pub mod cli;
mod error;
pub mod oracle;
pub mod protocol;
pub mod rng;
pub mod statevector;

pub use algorithms::{Algorithm, AlgorithmRun, Variant};
pub use bits::BitString;
pub use error::{Error, Result};
pub use oracle::{FunctionFamily, ModeClass};
pub use protocol::{Answer, ProtocolTranscript, TrialStats};
pub use rng::SeededRng;
pub use statevector::{MeasurementRecord, RegisterLayout, StateVector};
