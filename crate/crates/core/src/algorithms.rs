//! Deutsch, Deutsch-Jozsa and Grover circuits.
//!
//! Each algorithm runs in one of two variants. In the sharp variant the
//! oracle computes a single `f_k` on layout `(x, y)`. In the superposed
//! variant the mode lives in an extra register `k` on layout `(k, x, y)`
//! and the oracle computes `F(k, x) = f_k(x)`.
//!
//! Circuits are split at the point where the ancilla has just been prepared,
//! so callers can intervene there (see `protocol` for the backdated audit).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::bits::{BitString, BitStringError};
use crate::error::{Error, Result};
use crate::oracle::{self, FamilyError, FunctionFamily};
use crate::statevector::{RegisterLayout, StateVector, DEFAULT_QUBIT_CAP};

pub const MODE_REGISTER: &str = "k";
pub const INPUT_REGISTER: &str = "x";
pub const TARGET_REGISTER: &str = "y";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Deutsch,
    DeutschJozsa,
    Grover,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Deutsch => "deutsch",
            Algorithm::DeutschJozsa => "deutsch_jozsa",
            Algorithm::Grover => "grover",
        }
    }

    /// The family `{f_k}` this algorithm is posed over at arity `n`.
    pub fn family(&self, n: usize) -> Result<FunctionFamily> {
        match self {
            Algorithm::Deutsch if n != 1 => Err(Error::ArityOutOfRange {
                what: "deutsch",
                n,
                min: 1,
                max: 1,
            }),
            Algorithm::Deutsch => Ok(oracle::deutsch_family()),
            Algorithm::DeutschJozsa => Ok(oracle::balanced_constant_family(n)?),
            Algorithm::Grover => Ok(oracle::delta_family(n)?),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm {0:?} (expected deutsch, deutsch-jozsa or grover)")]
pub struct UnknownAlgorithm(String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "deutsch" => Ok(Algorithm::Deutsch),
            "deutsch-jozsa" | "deutsch_jozsa" | "dj" => Ok(Algorithm::DeutschJozsa),
            "grover" => Ok(Algorithm::Grover),
            other => Err(UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Whether the oracle mode is a classical choice or a quantum register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Superposed,
    Sharp(BitString),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VariantParseError {
    #[error("expected `superposed` or `sharp:<label>`, got {0:?}")]
    Unrecognized(String),
    #[error("invalid sharp label: {0}")]
    Label(#[from] BitStringError),
}

impl FromStr for Variant {
    type Err = VariantParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "superposed" {
            return Ok(Variant::Superposed);
        }
        match s.strip_prefix("sharp:") {
            Some(label) => Ok(Variant::Sharp(label.parse()?)),
            None => Err(VariantParseError::Unrecognized(s.to_string())),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Superposed => f.write_str("superposed"),
            Variant::Sharp(label) => write!(f, "sharp:{label}"),
        }
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `round(π / (4·asin(2^(−n/2))) − 1/2)`, at least 1.
pub fn optimal_grover_iterations(n: usize) -> usize {
    let theta = (2f64).powf(-(n as f64) / 2.0).asin();
    let t = (PI / (4.0 * theta) - 0.5).round();
    (t as usize).max(1)
}

/// `sin²((2T + 1)·asin(2^(−n/2)))`.
pub fn grover_success_probability(n: usize, iterations: usize) -> f64 {
    let theta = (2f64).powf(-(n as f64) / 2.0).asin();
    ((2 * iterations + 1) as f64 * theta).sin().powi(2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub variant: Variant,
    pub n: usize,
    /// Grover loop count; `None` for the Deutsch family of algorithms.
    pub iterations: Option<usize>,
    pub pre_measurement_state: StateVector,
}

impl AlgorithmRun {
    pub fn layout(&self) -> &RegisterLayout {
        self.pre_measurement_state.layout()
    }
}

/// A configured algorithm instance: family, loop count and qubit cap.
#[derive(Debug, Clone)]
pub struct Circuit {
    algorithm: Algorithm,
    family: FunctionFamily,
    iterations: usize,
    qubit_cap: usize,
    mode_table: Vec<bool>,
}

impl Circuit {
    /// `iterations` applies to Grover only; `None` picks the optimal count.
    pub fn new(algorithm: Algorithm, n: usize, iterations: Option<usize>) -> Result<Self> {
        let family = algorithm.family(n)?;
        Ok(Self::with_family(algorithm, family, iterations))
    }

    pub fn with_family(
        algorithm: Algorithm,
        family: FunctionFamily,
        iterations: Option<usize>,
    ) -> Self {
        let iterations = match algorithm {
            Algorithm::Grover => {
                iterations.unwrap_or_else(|| optimal_grover_iterations(family.n()))
            }
            _ => 0,
        };
        let mode_table = family.oracle_table();
        Circuit {
            algorithm,
            family,
            iterations,
            qubit_cap: DEFAULT_QUBIT_CAP,
            mode_table,
        }
    }

    pub fn with_qubit_cap(mut self, cap: usize) -> Self {
        self.qubit_cap = cap;
        self
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn family(&self) -> &FunctionFamily {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn iterations(&self) -> Option<usize> {
        (self.algorithm == Algorithm::Grover).then_some(self.iterations)
    }

    pub fn layout(&self, superposed: bool) -> Result<RegisterLayout> {
        let mut regs = Vec::with_capacity(3);
        if superposed {
            regs.push((MODE_REGISTER, self.family.label_width()));
        }
        regs.push((INPUT_REGISTER, self.family.n()));
        regs.push((TARGET_REGISTER, 1));
        Ok(RegisterLayout::new(regs)?.with_qubit_cap(self.qubit_cap))
    }

    /// `(k, x, y)` with `k` in an even superposition over `modes` and `x, y`
    /// still `|0…0⟩`. A complete family is prepared with Hadamards on `k`.
    pub fn prepare_ancilla(&self, modes: &[BitString]) -> Result<StateVector> {
        let state = StateVector::new(self.layout(true)?)?;
        let width = self.family.label_width();
        for m in modes {
            if m.width() != width {
                return Err(FamilyError::UnknownLabel(*m).into());
            }
        }
        if self.family.is_complete() && modes.len() == self.family.len() {
            let mut sorted: Vec<u64> = modes.iter().map(|m| m.value()).collect();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() == modes.len() {
                return Ok(state.apply_hadamard_register(MODE_REGISTER)?);
            }
        }
        let values: Vec<u64> = modes.iter().map(|m| m.value()).collect();
        Ok(state.set_superposition(MODE_REGISTER, &values)?)
    }

    /// Ancilla over every mode of the family.
    pub fn prepare_all_modes(&self) -> Result<StateVector> {
        let labels: Vec<BitString> = self.family.labels().collect();
        self.prepare_ancilla(&labels)
    }

    /// Everything after ancilla preparation, up to just before measurement.
    pub fn evolve(&self, state: StateVector) -> Result<StateVector> {
        self.evolve_with(state, &[MODE_REGISTER, INPUT_REGISTER], &self.mode_table)
    }

    fn evolve_with(
        &self,
        state: StateVector,
        inputs: &[&str],
        table: &[bool],
    ) -> Result<StateVector> {
        let y = state.layout().qubit(TARGET_REGISTER, 0)?;
        let mut state = state
            .apply_hadamard_register(INPUT_REGISTER)?
            .apply_x(y)?
            .apply_hadamard(y)?;
        match self.algorithm {
            Algorithm::Deutsch | Algorithm::DeutschJozsa => {
                state = state
                    .apply_xor_oracle(inputs, TARGET_REGISTER, table)?
                    .apply_hadamard_register(INPUT_REGISTER)?;
            }
            Algorithm::Grover => {
                for _ in 0..self.iterations {
                    state = state
                        .apply_xor_oracle(inputs, TARGET_REGISTER, table)?
                        .apply_grover_diffusion(INPUT_REGISTER)?;
                }
            }
        }
        Ok(state)
    }

    /// Superposed circuit with the ancilla spread over `modes`.
    pub fn run_with_modes(&self, modes: &[BitString]) -> Result<StateVector> {
        self.evolve(self.prepare_ancilla(modes)?)
    }

    pub fn run_superposed(&self) -> Result<StateVector> {
        self.evolve(self.prepare_all_modes()?)
    }

    /// Classic circuit on `(x, y)` for a single mode.
    pub fn run_sharp(&self, label: BitString) -> Result<StateVector> {
        let table = self.family.mode(label)?.table().to_vec();
        let state = StateVector::new(self.layout(false)?)?;
        self.evolve_with(state, &[INPUT_REGISTER], &table)
    }

    pub fn run(&self, variant: Variant) -> Result<AlgorithmRun> {
        let state = match variant {
            Variant::Superposed => self.run_superposed()?,
            Variant::Sharp(label) => self.run_sharp(label)?,
        };
        Ok(AlgorithmRun {
            algorithm: self.algorithm,
            variant,
            n: self.family.n(),
            iterations: self.iterations(),
            pre_measurement_state: state,
        })
    }
}

pub fn run_deutsch(variant: Variant) -> Result<AlgorithmRun> {
    Circuit::new(Algorithm::Deutsch, 1, None)?.run(variant)
}

pub fn run_deutsch_jozsa(n: usize, variant: Variant) -> Result<AlgorithmRun> {
    Circuit::new(Algorithm::DeutschJozsa, n, None)?.run(variant)
}

pub fn run_grover(n: usize, variant: Variant, iterations: usize) -> Result<AlgorithmRun> {
    Circuit::new(Algorithm::Grover, n, Some(iterations))?.run(variant)
}
