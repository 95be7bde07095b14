//! Absolute valuations of the six friend outcomes and the GHZ parity constraints.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::perspective::{exact_distribution, Context};
use crate::scenario::{SystemKind, SystemLabel};
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("constraint `{0}` repeats a label")]
    RepeatedLabel(String),
    #[error("{constraints} constraint(s) cannot be paired with {contexts} context(s)")]
    PairingLength { constraints: usize, contexts: usize },
    #[error("context `{context}` does not measure every label of constraint `{constraint}`")]
    PairingMismatch { constraint: String, context: String },
}

/// One of the six friend outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Label {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl Label {
    pub const ALL: [Label; 6] = [Label::A1, Label::A2, Label::A3, Label::B1, Label::B2, Label::B3];

    fn slot(self) -> usize {
        self as usize
    }

    /// The outcome recorded by an observer memory.
    pub fn of_memory(memory: SystemLabel) -> Option<Label> {
        let i = usize::from(memory.index()) - 1;
        match memory.kind() {
            SystemKind::A => Some(Label::ALL[i]),
            SystemKind::B => Some(Label::ALL[3 + i]),
            SystemKind::S => None,
        }
    }

    pub fn memory(self) -> SystemLabel {
        let i = self.slot();
        if i < 3 {
            SystemLabel::a(i as u8 + 1)
        } else {
            SystemLabel::b(i as u8 - 2)
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.memory())
    }
}

/// A total ±1 valuation of the six labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment([Sign; 6]);

impl Assignment {
    pub fn new(values: [Sign; 6]) -> Self {
        Assignment(values)
    }

    pub fn value(&self, label: Label) -> Sign {
        self.0[label.slot()]
    }

    pub fn values(&self) -> [Sign; 6] {
        self.0
    }

    /// The `rank`-th assignment in lexicographic order over (A1..B3) with
    /// +1 < −1; A1 varies slowest.
    pub fn from_rank(rank: u8) -> Self {
        assert!(rank < 64, "there are only 64 assignments");
        let mut values = [Sign::Plus; 6];
        for (i, v) in values.iter_mut().enumerate() {
            if rank & (1 << (5 - i)) != 0 {
                *v = Sign::Minus;
            }
        }
        Assignment(values)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = Label::ALL.iter().map(|l| format!("{l}={}", self.value(*l))).collect();
        f.write_str(&parts.join(" "))
    }
}

/// A parity condition: the product of three labels equals `parity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    name: String,
    labels: [Label; 3],
    parity: Sign,
}

impl Constraint {
    pub fn new(name: impl Into<String>, labels: [Label; 3], parity: Sign) -> Result<Self, AssignmentError> {
        let name = name.into();
        if labels[0] == labels[1] || labels[0] == labels[2] || labels[1] == labels[2] {
            return Err(AssignmentError::RepeatedLabel(name));
        }
        Ok(Constraint { name, labels, parity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn labels(&self) -> [Label; 3] {
        self.labels
    }

    pub fn parity(&self) -> Sign {
        self.parity
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.labels;
        write!(f, "({}) {a}*{b}*{c} = {}", self.name, self.parity)
    }
}

/// (i) B1B2B3 = +1, (ii) B1A2A3 = −1, (iii) A1B2A3 = −1, (iv) A1A2B3 = −1.
pub fn ghz_constraints() -> Vec<Constraint> {
    use Label::*;
    [
        ("i", [B1, B2, B3], Sign::Plus),
        ("ii", [B1, A2, A3], Sign::Minus),
        ("iii", [A1, B2, A3], Sign::Minus),
        ("iv", [A1, A2, B3], Sign::Minus),
    ]
    .into_iter()
    .map(|(n, l, p)| Constraint::new(n, l, p).expect("distinct labels"))
    .collect()
}

pub fn satisfies(a: &Assignment, c: &Constraint) -> bool {
    Sign::product(c.labels.iter().map(|l| a.value(*l))) == c.parity
}

/// All 64 assignments in lexicographic order.
pub fn all_assignments() -> impl Iterator<Item = Assignment> {
    (0..64u8).map(Assignment::from_rank)
}

pub fn enumerate_satisfying(cs: &[Constraint]) -> Vec<Assignment> {
    all_assignments()
        .filter(|a| cs.iter().all(|c| satisfies(a, c)))
        .collect()
}

/// A sub-multiset of constraints in which every label occurs an even number of
/// times while the parities multiply to −1; multiplying its equations gives
/// +1 = −1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCertificate {
    /// Positions in the input list, ascending.
    pub members: Vec<usize>,
}

/// Smallest certificate (first in lexicographic order among equal sizes), if
/// any. Searches every subset of `cs`, so intended for a handful of constraints.
pub fn parity_witness(cs: &[Constraint]) -> Option<ParityCertificate> {
    (1..=cs.len())
        .flat_map(|size| (0..cs.len()).combinations(size))
        .find(|members| {
            let mut counts = [0usize; 6];
            for &i in members {
                for l in cs[i].labels {
                    counts[l.slot()] += 1;
                }
            }
            let parity = Sign::product(members.iter().map(|&i| cs[i].parity));
            counts.iter().all(|c| c % 2 == 0) && parity == Sign::Minus
        })
        .map(|members| ParityCertificate { members })
}

/// Whether the support of one context's exact distribution obeys its constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckRow {
    pub constraint: String,
    pub context: String,
    pub pass: bool,
    /// Total probability of support tuples that violate the constraint.
    pub violating_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
    pub satisfying_count: usize,
    pub certificate: Option<ParityCertificate>,
}

impl CrossCheckReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Checks each constraint against the context at the same position, then
/// enumerates the absolute assignments of the whole constraint list.
pub fn cross_check(cs: &[Constraint], contexts: &[Context]) -> Result<CrossCheckReport, AssignmentError> {
    if cs.len() != contexts.len() {
        return Err(AssignmentError::PairingLength {
            constraints: cs.len(),
            contexts: contexts.len(),
        });
    }
    let rows = cs
        .iter()
        .zip(contexts)
        .map(|(c, ctx)| check_pair(c, ctx))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrossCheckReport {
        rows,
        satisfying_count: enumerate_satisfying(cs).len(),
        certificate: parity_witness(cs),
    })
}

fn check_pair(c: &Constraint, ctx: &Context) -> Result<CrossCheckRow, AssignmentError> {
    let mismatch = || AssignmentError::PairingMismatch {
        constraint: c.name.clone(),
        context: ctx.name().to_string(),
    };
    let memories = ctx.measured_memories();
    let slots = c
        .labels
        .iter()
        .map(|l| memories.iter().position(|m| *m == l.memory()).ok_or_else(mismatch))
        .collect::<Result<Vec<_>, _>>()?;
    let dist = exact_distribution(ctx);
    let violating_probability: f64 = dist
        .support()
        .filter(|e| Sign::product(slots.iter().map(|&s| e.outcomes[s])) != c.parity)
        .map(|e| e.probability)
        .sum();
    Ok(CrossCheckRow {
        constraint: c.name.clone(),
        context: ctx.name().to_string(),
        pass: violating_probability == 0.0,
        violating_probability,
    })
}

/// For each constraint, the first context that measures exactly its three
/// labels, falling back to the first that measures at least them.
pub fn pair_contexts(cs: &[Constraint], contexts: &[Context]) -> Vec<Option<usize>> {
    cs.iter()
        .map(|c| {
            let wanted: Vec<SystemLabel> = c.labels.iter().map(|l| l.memory()).collect();
            let covers = |ctx: &Context| wanted.iter().all(|m| ctx.measured_memories().contains(m));
            contexts
                .iter()
                .position(|ctx| covers(ctx) && ctx.measurements().len() == 3)
                .or_else(|| contexts.iter().position(covers))
        })
        .collect()
}
