//! Dense state-vector engine over named registers.
//!
//! Basis indices are the big-endian concatenation of register values in
//! declaration order: the first register holds the most significant bits.
//! Global qubit index 0 is the most significant qubit of the first register,
//! so a layout `k:2, x:1, y:1` puts `k1 k0 x y` at global indices `0 1 2 3`.
//!
//! Gates take the state by value and hand it back; measurement and
//! projection borrow and return a fresh state.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::rng::SeededRng;

pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Largest layout representable at all, independent of the configurable cap.
const HARD_QUBIT_LIMIT: usize = 48;

/// Maximum |‖ψ‖² − 1| accepted by operations that require a normalized state.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Amplitudes at or below this magnitude are omitted from dumps.
pub const DUMP_THRESHOLD: f64 = 1e-12;

/// Projected squared norm below which an outcome is treated as impossible.
const IMPOSSIBLE_OUTCOME: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("layout has no qubits")]
    EmptyLayout,
    #[error("register name must be non-empty")]
    EmptyRegisterName,
    #[error("register {0:?} declared twice")]
    DuplicateRegister(String),
    #[error("register {0:?} has zero width")]
    ZeroWidth(String),
    #[error("layout needs {qubits} qubits, cap is {cap}")]
    CapacityExceeded { qubits: usize, cap: usize },
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("qubit index {index} out of range for {total} qubits")]
    QubitOutOfRange { index: usize, total: usize },
    #[error("expected {expected} amplitudes, got {found}")]
    AmplitudeCount { expected: usize, found: usize },
    #[error("superposition index set is empty")]
    EmptyIndexSet,
    #[error("basis value {value} out of range for register {register:?} of width {width}")]
    IndexOutOfRange {
        register: String,
        value: u64,
        width: usize,
    },
    #[error("register {0:?} is not in |0…0⟩")]
    NotInZeroState(String),
    #[error("truth table has {found} entries, inputs need {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("oracle target {0:?} must have width 1")]
    TargetWidth(String),
    #[error("register {0:?} used more than once in oracle wiring")]
    OverlappingRegisters(String),
    #[error("state is not normalized (‖ψ‖² = {0})")]
    Unnormalized(f64),
    #[error("outcome {outcome} has width {found}, register {register:?} has width {expected}")]
    OutcomeWidth {
        register: String,
        outcome: BitString,
        expected: usize,
        found: usize,
    },
    #[error("outcome {outcome} on register {register:?} has zero probability")]
    ImpossibleOutcome {
        register: String,
        outcome: BitString,
    },
    #[error("states have different layouts")]
    LayoutMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    name: String,
    width: usize,
    offset: usize,
}

impl Register {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Global index of this register's most significant qubit.
    pub fn offset(&self) -> usize {
        self.offset
    }

    fn mask(&self) -> usize {
        (1usize << self.width) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<Register>,
    total_qubits: usize,
    qubit_cap: usize,
}

impl RegisterLayout {
    pub fn new<S: Into<String>>(
        registers: impl IntoIterator<Item = (S, usize)>,
    ) -> Result<Self, StateError> {
        let mut out: Vec<Register> = Vec::new();
        let mut offset = 0;
        for (name, width) in registers {
            let name = name.into();
            if name.is_empty() {
                return Err(StateError::EmptyRegisterName);
            }
            if out.iter().any(|r| r.name == name) {
                return Err(StateError::DuplicateRegister(name));
            }
            if width == 0 {
                return Err(StateError::ZeroWidth(name));
            }
            out.push(Register {
                name,
                width,
                offset,
            });
            offset += width;
        }
        if offset == 0 {
            return Err(StateError::EmptyLayout);
        }
        if offset > HARD_QUBIT_LIMIT {
            return Err(StateError::CapacityExceeded {
                qubits: offset,
                cap: HARD_QUBIT_LIMIT,
            });
        }
        Ok(RegisterLayout {
            registers: out,
            total_qubits: offset,
            qubit_cap: DEFAULT_QUBIT_CAP,
        })
    }

    pub fn with_qubit_cap(mut self, cap: usize) -> Self {
        self.qubit_cap = cap.min(HARD_QUBIT_LIMIT);
        self
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn qubit_cap(&self) -> usize {
        self.qubit_cap
    }

    pub fn dimension(&self) -> usize {
        1usize << self.total_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, name: &str) -> Result<&Register, StateError> {
        self.registers
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| StateError::UnknownRegister(name.to_string()))
    }

    /// Global index of qubit `bit` of register `name`, `bit = 0` being its
    /// most significant qubit.
    pub fn qubit(&self, name: &str, bit: usize) -> Result<usize, StateError> {
        let reg = self.register(name)?;
        if bit >= reg.width {
            return Err(StateError::QubitOutOfRange {
                index: bit,
                total: reg.width,
            });
        }
        Ok(reg.offset + bit)
    }

    fn shift(&self, reg: &Register) -> usize {
        self.total_qubits - reg.offset - reg.width
    }

    fn value_in(&self, reg: &Register, index: usize) -> usize {
        (index >> self.shift(reg)) & reg.mask()
    }

    /// Basis index of a full classical assignment, one value per register in
    /// declaration order.
    pub fn basis_index(&self, values: &[u64]) -> Result<usize, StateError> {
        if values.len() != self.registers.len() {
            return Err(StateError::AmplitudeCount {
                expected: self.registers.len(),
                found: values.len(),
            });
        }
        let mut index = 0usize;
        for (reg, &v) in self.registers.iter().zip(values) {
            if v as usize > reg.mask() {
                return Err(StateError::IndexOutOfRange {
                    register: reg.name.clone(),
                    value: v,
                    width: reg.width,
                });
            }
            index = (index << reg.width) | v as usize;
        }
        Ok(index)
    }

    /// Ket label such as `01|1|0`.
    pub fn ket_label(&self, index: usize) -> String {
        self.registers
            .iter()
            .map(|r| BitString::new(self.value_in(r, index) as u64, r.width).to_string())
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Layout with `name` removed, keeping the cap.
    pub fn without(&self, name: &str) -> Result<RegisterLayout, StateError> {
        self.register(name)?;
        let rest = self
            .registers
            .iter()
            .filter(|r| r.name != name)
            .map(|r| (r.name.clone(), r.width));
        Ok(RegisterLayout::new(rest)?.with_qubit_cap(self.qubit_cap))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub register: String,
    pub outcome: BitString,
    pub probability: f64,
    pub seed_path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub layout: Vec<(String, usize)>,
    pub amplitudes: Vec<KetAmplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KetAmplitude {
    pub ket: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` over `layout`.
    pub fn new(layout: RegisterLayout) -> Result<Self, StateError> {
        check_cap(&layout)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { layout, amplitudes })
    }

    /// Wraps raw amplitudes. No normalization is applied.
    pub fn from_amplitudes(
        layout: RegisterLayout,
        amplitudes: Vec<Complex64>,
    ) -> Result<Self, StateError> {
        check_cap(&layout)?;
        if amplitudes.len() != layout.dimension() {
            return Err(StateError::AmplitudeCount {
                expected: layout.dimension(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { layout, amplitudes })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Amplitude of the basis state given by one value per register.
    pub fn amplitude(&self, values: &[u64]) -> Result<Complex64, StateError> {
        Ok(self.amplitudes[self.layout.basis_index(values)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    pub fn normalized(mut self) -> Self {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
        self
    }

    fn require_normalized(&self) -> Result<(), StateError> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOLERANCE {
            return Err(StateError::Unnormalized(n));
        }
        Ok(())
    }

    /// Writes an equal-weight real superposition over `values` into register
    /// `name`, which must currently be `|0…0⟩`. This is a state preparation,
    /// not a gate: mode counts need not be powers of two.
    pub fn set_superposition(mut self, name: &str, values: &[u64]) -> Result<Self, StateError> {
        let reg = self.layout.register(name)?.clone();
        let set: BTreeSet<u64> = values.iter().copied().collect();
        if set.is_empty() {
            return Err(StateError::EmptyIndexSet);
        }
        if let Some(&v) = set.iter().find(|&&v| v as usize > reg.mask()) {
            return Err(StateError::IndexOutOfRange {
                register: reg.name,
                value: v,
                width: reg.width,
            });
        }
        let shift = self.layout.shift(&reg);
        let zeroed = self
            .amplitudes
            .iter()
            .enumerate()
            .all(|(i, a)| self.layout.value_in(&reg, i) == 0 || *a == Complex64::new(0.0, 0.0));
        if !zeroed {
            return Err(StateError::NotInZeroState(reg.name));
        }
        let scale = 1.0 / (set.len() as f64).sqrt();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            if self.layout.value_in(&reg, i) != 0 || a.norm_sqr() == 0.0 {
                continue;
            }
            for &v in &set {
                out[i | ((v as usize) << shift)] = a * scale;
            }
        }
        self.amplitudes = out;
        Ok(self)
    }

    fn bit_of(&self, qubit: usize) -> Result<usize, StateError> {
        let total = self.layout.total_qubits;
        if qubit >= total {
            return Err(StateError::QubitOutOfRange {
                index: qubit,
                total,
            });
        }
        Ok(1usize << (total - 1 - qubit))
    }

    pub fn apply_hadamard(mut self, qubit: usize) -> Result<Self, StateError> {
        let bit = self.bit_of(qubit)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a = self.amplitudes[i];
                let b = self.amplitudes[i | bit];
                self.amplitudes[i] = (a + b) * s;
                self.amplitudes[i | bit] = (a - b) * s;
            }
        }
        Ok(self)
    }

    pub fn apply_x(mut self, qubit: usize) -> Result<Self, StateError> {
        let bit = self.bit_of(qubit)?;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                self.amplitudes.swap(i, i | bit);
            }
        }
        Ok(self)
    }

    /// Hadamard on every qubit of a register.
    pub fn apply_hadamard_register(self, name: &str) -> Result<Self, StateError> {
        let reg = self.layout.register(name)?.clone();
        (reg.offset..reg.offset + reg.width).try_fold(self, |s, q| s.apply_hadamard(q))
    }

    /// `|inputs⟩|y⟩ → |inputs⟩|y ⊕ table[inputs]⟩`, where `inputs` is the
    /// big-endian concatenation of the listed registers.
    pub fn apply_xor_oracle(
        mut self,
        inputs: &[&str],
        target: &str,
        table: &[bool],
    ) -> Result<Self, StateError> {
        let target_reg = self.layout.register(target)?.clone();
        if target_reg.width != 1 {
            return Err(StateError::TargetWidth(target_reg.name));
        }
        let mut regs: Vec<Register> = Vec::with_capacity(inputs.len());
        for &name in inputs {
            let reg = self.layout.register(name)?;
            if name == target || regs.iter().any(|r| r.name == name) {
                return Err(StateError::OverlappingRegisters(name.to_string()));
            }
            regs.push(reg.clone());
        }
        let input_width: usize = regs.iter().map(|r| r.width).sum();
        let expected = 1usize << input_width;
        if table.len() != expected {
            return Err(StateError::TableLength {
                expected,
                found: table.len(),
            });
        }
        let shifts: Vec<(usize, usize, usize)> = regs
            .iter()
            .map(|r| (self.layout.shift(r), r.mask(), r.width))
            .collect();
        let target_bit = 1usize << self.layout.shift(&target_reg);
        for i in 0..self.amplitudes.len() {
            if i & target_bit != 0 {
                continue;
            }
            let key = shifts
                .iter()
                .fold(0usize, |acc, &(s, m, w)| (acc << w) | ((i >> s) & m));
            if table[key] {
                self.amplitudes.swap(i, i | target_bit);
            }
        }
        Ok(self)
    }

    /// Inversion about the mean, `H^⊗w (2|0⟩⟨0| − I) H^⊗w`, on register
    /// `name` for every setting of the other registers.
    pub fn apply_grover_diffusion(mut self, name: &str) -> Result<Self, StateError> {
        let reg = self.layout.register(name)?.clone();
        let shift = self.layout.shift(&reg);
        let size = 1usize << reg.width;
        let field = reg.mask() << shift;
        for base in 0..self.amplitudes.len() {
            if base & field != 0 {
                continue;
            }
            let sum: Complex64 = (0..size)
                .map(|v| self.amplitudes[base | (v << shift)])
                .sum();
            let twice_mean = sum * (2.0 / size as f64);
            for v in 0..size {
                let idx = base | (v << shift);
                self.amplitudes[idx] = twice_mean - self.amplitudes[idx];
            }
        }
        Ok(self)
    }

    /// Born-rule distribution of register `name`, indexed by its value.
    pub fn marginal_distribution(&self, name: &str) -> Result<Vec<f64>, StateError> {
        self.joint_distribution(&[name])
    }

    /// Joint distribution over several registers, indexed by the big-endian
    /// concatenation of their values in the order given.
    pub fn joint_distribution(&self, names: &[&str]) -> Result<Vec<f64>, StateError> {
        self.require_normalized()?;
        let mut fields = Vec::with_capacity(names.len());
        let mut width = 0;
        for &name in names {
            let reg = self.layout.register(name)?;
            if fields.iter().any(|(n, _, _, _)| *n == name) {
                return Err(StateError::OverlappingRegisters(name.to_string()));
            }
            fields.push((name, self.layout.shift(reg), reg.mask(), reg.width));
            width += reg.width;
        }
        let mut probs = vec![0.0; 1usize << width];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let key = fields
                .iter()
                .fold(0usize, |acc, &(_, s, m, w)| (acc << w) | ((i >> s) & m));
            probs[key] += a.norm_sqr();
        }
        Ok(probs)
    }

    fn check_outcome(&self, name: &str, outcome: BitString) -> Result<Register, StateError> {
        let reg = self.layout.register(name)?;
        if outcome.width() != reg.width {
            return Err(StateError::OutcomeWidth {
                register: reg.name.clone(),
                outcome,
                expected: reg.width,
                found: outcome.width(),
            });
        }
        Ok(reg.clone())
    }

    /// `|o⟩⟨o| ψ` on register `name`, optionally renormalized.
    ///
    /// A state already inside the outcome subspace is returned unchanged when
    /// no rescaling is needed, which makes projection exactly idempotent.
    pub fn project(
        &self,
        name: &str,
        outcome: BitString,
        normalize: bool,
    ) -> Result<StateVector, StateError> {
        let reg = self.check_outcome(name, outcome)?;
        let zero = Complex64::new(0.0, 0.0);
        let mut removed = false;
        let mut amplitudes = self.amplitudes.clone();
        for (i, a) in amplitudes.iter_mut().enumerate() {
            if self.layout.value_in(&reg, i) as u64 != outcome.value() && *a != zero {
                *a = zero;
                removed = true;
            }
        }
        let kept: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if kept < IMPOSSIBLE_OUTCOME {
            return Err(StateError::ImpossibleOutcome {
                register: reg.name,
                outcome,
            });
        }
        let projected = StateVector {
            layout: self.layout.clone(),
            amplitudes,
        };
        if !normalize || (!removed && (kept - 1.0).abs() <= 1e-12) {
            return Ok(projected);
        }
        Ok(projected.normalized())
    }

    /// Samples register `name`, returning the record and the collapsed,
    /// renormalized state.
    pub fn measure(
        &self,
        name: &str,
        rng: &mut SeededRng,
    ) -> Result<(MeasurementRecord, StateVector), StateError> {
        let probs = self.marginal_distribution(name)?;
        let width = self.layout.register(name)?.width;
        let (u, seed_path) = rng.draw_unit();
        let mut acc = 0.0;
        let mut chosen = None;
        for (v, &p) in probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(v);
            if u < acc {
                break;
            }
        }
        // Only reachable with an all-zero state, which require_normalized rejects.
        let v = chosen.ok_or(StateError::Unnormalized(0.0))?;
        let outcome = BitString::new(v as u64, width);
        let collapsed = self.project(name, outcome, true)?;
        let record = MeasurementRecord {
            register: name.to_string(),
            outcome,
            probability: probs[v],
            seed_path,
        };
        Ok((record, collapsed))
    }

    /// State of the remaining registers given that `name` holds `outcome`,
    /// normalized. The register is removed from the layout.
    pub fn conditional(&self, name: &str, outcome: BitString) -> Result<StateVector, StateError> {
        let reg = self.check_outcome(name, outcome)?;
        let projected = self.project(name, outcome, true)?;
        let layout = self.layout.without(name)?;
        let shift = self.layout.shift(&reg);
        let low = (1usize << shift) - 1;
        let mut amplitudes = Vec::with_capacity(layout.dimension());
        for j in 0..layout.dimension() {
            let high = j >> shift;
            let i =
                (high << (shift + reg.width)) | ((outcome.value() as usize) << shift) | (j & low);
            amplitudes.push(projected.amplitudes[i]);
        }
        Ok(StateVector { layout, amplitudes })
    }

    fn aligning_phase(&self, other: &StateVector) -> Result<Complex64, StateError> {
        if self.layout.registers != other.layout.registers {
            return Err(StateError::LayoutMismatch);
        }
        let best = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a * b.conj())
            .max_by(|p, q| p.norm_sqr().total_cmp(&q.norm_sqr()));
        Ok(match best {
            Some(p) if p.norm() > 0.0 => p / p.norm(),
            _ => Complex64::new(1.0, 0.0),
        })
    }

    /// `‖a − c·b‖₂` with `c` the unit phase of the largest overlap component.
    pub fn distance_up_to_global_phase(&self, other: &StateVector) -> Result<f64, StateError> {
        let c = self.aligning_phase(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - c * b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Largest per-amplitude deviation after phase alignment.
    pub fn max_deviation_up_to_global_phase(&self, other: &StateVector) -> Result<f64, StateError> {
        let c = self.aligning_phase(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - c * b).norm())
            .fold(0.0, f64::max))
    }

    pub fn equal_up_to_global_phase(
        &self,
        other: &StateVector,
        tol: f64,
    ) -> Result<bool, StateError> {
        Ok(self.distance_up_to_global_phase(other)? <= tol)
    }

    pub fn to_dump(&self) -> StateDump {
        StateDump {
            layout: self
                .layout
                .registers
                .iter()
                .map(|r| (r.name.clone(), r.width))
                .collect(),
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm() > DUMP_THRESHOLD)
                .map(|(i, a)| KetAmplitude {
                    ket: self.layout.ket_label(i),
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

fn check_cap(layout: &RegisterLayout) -> Result<(), StateError> {
    if layout.total_qubits > layout.qubit_cap {
        return Err(StateError::CapacityExceeded {
            qubits: layout.total_qubits,
            cap: layout.qubit_cap,
        });
    }
    Ok(())
}

/// One ket per line, e.g. `-0.353553 |10|1|1>`.
impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() <= DUMP_THRESHOLD {
                continue;
            }
            if a.im.abs() <= DUMP_THRESHOLD {
                write!(f, "{:>9.6}", a.re)?;
            } else {
                write!(f, "({:.6}{:+.6}i)", a.re, a.im)?;
            }
            writeln!(f, " |{}>", self.layout.ket_label(i))?;
        }
        Ok(())
    }
}
