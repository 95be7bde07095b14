//! Registers, GHZ preparation, record unitaries and the protocol schedule.
//!
//! The register holds three system qubits `S1..S3` and six single-qubit
//! observer memories `A1..A3`, `B1..B3`, each starting in the ready state
//! |R⟩ = |0⟩. The outside observer W is never part of the register.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::sign::Sign;
use crate::statevec::{Basis, StateError, StateVector, Unitary};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("`{0}` is not a register label (expected S1..S3, A1..A3 or B1..B3)")]
    InvalidLabel(String),
    #[error("GHZ preparation needs three distinct system qubits, got {0}")]
    BadPreparation(String),
    #[error("label {0} appears twice in the register")]
    DuplicateLabel(SystemLabel),
    #[error("label {0} is not in the register")]
    NotInRegister(SystemLabel),
    #[error("{0} is not an observer memory")]
    NotMemory(SystemLabel),
    #[error("{0} is not a system qubit")]
    NotSystem(SystemLabel),
    #[error("observer {agent} cannot interact with {target}: indices differ")]
    IndexMismatch { agent: SystemLabel, target: SystemLabel },
    #[error("a record in the Z basis is undefined under the literal encoding")]
    LiteralZ,
    #[error("interaction is already an inverse")]
    AlreadyInverse,
    #[error("inverse event {index} ({agent} on {target}) has no matching forward event immediately before it on those qubits")]
    UnmatchedInverse {
        index: usize,
        agent: SystemLabel,
        target: SystemLabel,
    },
    #[error("observer {0} records in more than one basis")]
    MixedRecordBasis(SystemLabel),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemKind {
    S,
    A,
    B,
}

/// A register label such as `S1` or `B3`. Orders S before A before B, then by
/// index, which is also the canonical register order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemLabel {
    kind: SystemKind,
    index: u8,
}

impl SystemLabel {
    pub fn new(kind: SystemKind, index: u8) -> Result<Self, ScenarioError> {
        if !(1..=3).contains(&index) {
            let prefix = match kind {
                SystemKind::S => "S",
                SystemKind::A => "A",
                SystemKind::B => "B",
            };
            return Err(ScenarioError::InvalidLabel(format!("{prefix}{index}")));
        }
        Ok(SystemLabel { kind, index })
    }

    pub const fn s(index: u8) -> Self {
        SystemLabel {
            kind: SystemKind::S,
            index,
        }
    }

    pub const fn a(index: u8) -> Self {
        SystemLabel {
            kind: SystemKind::A,
            index,
        }
    }

    pub const fn b(index: u8) -> Self {
        SystemLabel {
            kind: SystemKind::B,
            index,
        }
    }

    pub fn kind(self) -> SystemKind {
        self.kind
    }

    pub fn index(self) -> u8 {
        self.index
    }

    pub fn is_memory(self) -> bool {
        self.kind != SystemKind::S
    }
}

impl FromStr for SystemLabel {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || ScenarioError::InvalidLabel(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('S') => SystemKind::S,
            Some('A') => SystemKind::A,
            Some('B') => SystemKind::B,
            _ => return Err(invalid()),
        };
        let index = match (chars.next(), chars.next()) {
            (Some(d @ '1'..='3'), None) => d as u8 - b'0',
            _ => return Err(invalid()),
        };
        SystemLabel::new(kind, index)
    }
}

impl fmt::Display for SystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            SystemKind::S => "S",
            SystemKind::A => "A",
            SystemKind::B => "B",
        };
        write!(f, "{prefix}{}", self.index)
    }
}

/// Bijection from labels to qubit indices, in canonical label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterLayout {
    labels: Vec<SystemLabel>,
}

impl RegisterLayout {
    pub fn new(mut labels: Vec<SystemLabel>) -> Result<Self, ScenarioError> {
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(ScenarioError::DuplicateLabel(w[0]));
        }
        Ok(RegisterLayout { labels })
    }

    /// S1 S2 S3 A1 A2 A3 B1 B2 B3 on qubits 0..9.
    pub fn three_party() -> Self {
        let labels = (1..=3)
            .map(SystemLabel::s)
            .chain((1..=3).map(SystemLabel::a))
            .chain((1..=3).map(SystemLabel::b))
            .collect();
        RegisterLayout { labels }
    }

    pub fn qubit(&self, label: SystemLabel) -> Option<usize> {
        self.labels.binary_search(&label).ok()
    }

    pub fn labels(&self) -> &[SystemLabel] {
        &self.labels
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }

    fn require(&self, label: SystemLabel) -> Result<usize, ScenarioError> {
        self.qubit(label).ok_or(ScenarioError::NotInRegister(label))
    }
}

/// How a memory stores an outcome and how Wigner reads it back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// A memory records |l⟩ in the basis of the interaction it took part in
    /// and is read in that same basis.
    Literal,
    /// Memories record +1 → |0⟩, −1 → |1⟩ and are read in Z.
    Computational,
}

impl Encoding {
    pub fn record_state(self, basis: Basis, outcome: Sign) -> [Complex64; 2] {
        match self {
            Encoding::Literal => basis.eigenvector(outcome),
            Encoding::Computational => Basis::Z.eigenvector(outcome),
        }
    }

    /// Basis of the pointer measurement on a memory that records in `record_basis`.
    pub fn pointer_basis(self, record_basis: Basis) -> Basis {
        match self {
            Encoding::Literal => record_basis,
            Encoding::Computational => Basis::Z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Literal => "literal",
            Encoding::Computational => "computational",
        }
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(Encoding::Literal),
            "computational" => Ok(Encoding::Computational),
            other => Err(format!(
                "unknown encoding `{other}` (expected literal or computational)"
            )),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The GHZ state (|000⟩ + |111⟩)/√2 on three system qubits.
pub fn ghz_state(qubits: &[SystemLabel]) -> Result<StateVector, ScenarioError> {
    check_preparation(qubits)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0] = Complex64::new(h, 0.0);
    amps[7] = Complex64::new(h, 0.0);
    Ok(StateVector::new(amps)?)
}

fn check_preparation(qubits: &[SystemLabel]) -> Result<(), ScenarioError> {
    let describe = || qubits.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    if qubits.len() != 3 {
        return Err(ScenarioError::BadPreparation(describe()));
    }
    if let Some(l) = qubits.iter().find(|l| l.is_memory()) {
        return Err(ScenarioError::NotSystem(*l));
    }
    if qubits[0] == qubits[1] || qubits[0] == qubits[2] || qubits[1] == qubits[2] {
        return Err(ScenarioError::BadPreparation(describe()));
    }
    Ok(())
}

/// The (system, memory) record unitary Σ_l P_l ⊗ V_l, where P_l projects the
/// system onto |l⟩ in `basis` and V_l has columns |record(l)⟩, |record(−l)⟩.
/// It maps |l⟩|R⟩ to |l⟩|record(l)⟩.
pub fn record_unitary(basis: Basis, encoding: Encoding) -> Result<Unitary, ScenarioError> {
    if basis == Basis::Z && encoding == Encoding::Literal {
        return Err(ScenarioError::LiteralZ);
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    for l in Sign::BOTH {
        let p = basis.projector(l);
        let v = Unitary::from_columns(&[
            encoding.record_state(basis, l).to_vec(),
            encoding.record_state(basis, -l).to_vec(),
        ])?;
        // P_l ⊗ V_l, system on the more significant qubit
        for r1 in 0..2 {
            for c1 in 0..2 {
                for r2 in 0..2 {
                    for c2 in 0..2 {
                        entries[(r1 * 2 + r2) * 4 + c1 * 2 + c2] += p[r1 * 2 + c1] * v.entry(r2, c2);
                    }
                }
            }
        }
    }
    Ok(Unitary::new(4, entries)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// An observer memory (`agent`) recording a system qubit (`target`) in `basis`,
/// or the inverse of that record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interaction {
    pub agent: SystemLabel,
    pub target: SystemLabel,
    pub basis: Basis,
    pub direction: Direction,
}

impl Interaction {
    pub fn record(agent: SystemLabel, target: SystemLabel, basis: Basis) -> Result<Self, ScenarioError> {
        if !agent.is_memory() {
            return Err(ScenarioError::NotMemory(agent));
        }
        if target.is_memory() {
            return Err(ScenarioError::NotSystem(target));
        }
        if agent.index() != target.index() {
            return Err(ScenarioError::IndexMismatch { agent, target });
        }
        Ok(Interaction {
            agent,
            target,
            basis,
            direction: Direction::Forward,
        })
    }

    pub fn touches(&self, label: SystemLabel) -> bool {
        self.agent == label || self.target == label
    }

    /// The (system, memory) unitary of this event under `encoding`.
    pub fn unitary(&self, encoding: Encoding) -> Result<Unitary, ScenarioError> {
        let u = record_unitary(self.basis, encoding)?;
        Ok(match self.direction {
            Direction::Forward => u,
            Direction::Inverse => u.adjoint(),
        })
    }
}

impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dagger = match self.direction {
            Direction::Forward => "",
            Direction::Inverse => "†",
        };
        write!(f, "U[{}{}; {}]{dagger}", self.target, self.agent, self.basis)
    }
}

pub fn inverse_of(e: &Interaction) -> Result<Interaction, ScenarioError> {
    if e.direction == Direction::Inverse {
        return Err(ScenarioError::AlreadyInverse);
    }
    Ok(Interaction {
        direction: Direction::Inverse,
        ..*e
    })
}

/// GHZ preparation followed by an ordered list of interactions, all relative to W.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    encoding: Encoding,
    layout: RegisterLayout,
    preparation: [SystemLabel; 3],
    events: Vec<Interaction>,
    // (system qubit, memory qubit) per event
    targets: Vec<[usize; 2]>,
}

impl Schedule {
    pub fn new(
        encoding: Encoding,
        layout: RegisterLayout,
        preparation: [SystemLabel; 3],
        events: Vec<Interaction>,
    ) -> Result<Self, ScenarioError> {
        check_preparation(&preparation)?;
        for l in preparation {
            layout.require(l)?;
        }
        let mut targets = Vec::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            // re-validate pairing for events not built through `Interaction::record`
            Interaction::record(e.agent, e.target, e.basis)?;
            e.unitary(encoding)?;
            targets.push([layout.require(e.target)?, layout.require(e.agent)?]);
            if e.direction == Direction::Inverse {
                let previous = events[..i]
                    .iter()
                    .rev()
                    .find(|p| p.touches(e.agent) || p.touches(e.target));
                let matched = previous.is_some_and(|p| {
                    p.direction == Direction::Forward
                        && p.agent == e.agent
                        && p.target == e.target
                        && p.basis == e.basis
                });
                if !matched {
                    return Err(ScenarioError::UnmatchedInverse {
                        index: i + 1,
                        agent: e.agent,
                        target: e.target,
                    });
                }
            }
        }
        for e in &events {
            let mixed = events.iter().any(|o| o.agent == e.agent && o.basis != e.basis);
            if mixed {
                return Err(ScenarioError::MixedRecordBasis(e.agent));
            }
        }
        Ok(Schedule {
            encoding,
            layout,
            preparation,
            events,
            targets,
        })
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn preparation(&self) -> [SystemLabel; 3] {
        self.preparation
    }

    pub fn events(&self) -> &[Interaction] {
        &self.events
    }

    /// GHZ on the prepared system qubits, |R⟩ = |0⟩ everywhere else.
    pub fn initial_state(&self) -> StateVector {
        let n = self.layout.num_qubits();
        let mask: usize = self
            .preparation
            .iter()
            .map(|l| 1usize << (n - 1 - self.layout.qubit(*l).expect("validated")))
            .sum();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(h, 0.0);
        amps[mask] = Complex64::new(h, 0.0);
        StateVector::new(amps).expect("GHZ amplitudes are normalized")
    }

    /// Applies event `index` (0-based) to `state`.
    pub fn apply_event(&self, state: &StateVector, index: usize) -> StateVector {
        let e = &self.events[index];
        let u = e.unitary(self.encoding).expect("validated at construction");
        state
            .apply(&u, &self.targets[index])
            .expect("targets validated at construction")
    }

    /// The state after every event.
    pub fn run(&self) -> StateVector {
        (0..self.events.len()).fold(self.initial_state(), |s, i| self.apply_event(&s, i))
    }

    /// Basis in which `memory` records: that of its interactions, or the
    /// default for its kind (A: Y, B: X) when it never interacts.
    pub fn record_basis(&self, memory: SystemLabel) -> Basis {
        self.events
            .iter()
            .find(|e| e.agent == memory)
            .map(|e| e.basis)
            .unwrap_or(match memory.kind() {
                SystemKind::A => Basis::Y,
                _ => Basis::X,
            })
    }

    /// Basis of Wigner's pointer measurement on `memory`.
    pub fn pointer_basis(&self, memory: SystemLabel) -> Basis {
        self.encoding.pointer_basis(self.record_basis(memory))
    }
}

/// The full three-party protocol:
/// U_SA1, U_SA2, U_SA3, U_SA1†, U_SB1, U_SA2†, U_SB2, U_SA3†, U_SB3.
pub fn full_protocol(encoding: Encoding) -> Schedule {
    let mut events = Vec::with_capacity(9);
    let records: Vec<Interaction> = (1..=3)
        .map(|m| Interaction::record(SystemLabel::a(m), SystemLabel::s(m), Basis::Y).expect("paired labels"))
        .collect();
    events.extend(records.iter().copied());
    for (m, a_record) in (1..=3).zip(&records) {
        events.push(inverse_of(a_record).expect("forward event"));
        events.push(Interaction::record(SystemLabel::b(m), SystemLabel::s(m), Basis::X).expect("paired labels"));
    }
    Schedule::new(
        encoding,
        RegisterLayout::three_party(),
        [SystemLabel::s(1), SystemLabel::s(2), SystemLabel::s(3)],
        events,
    )
    .expect("the built-in protocol is well formed")
}
