//! Wigner's measurement contexts.
//!
//! A [`Context`] inserts pointer measurements on observer memories into a
//! [`Schedule`]. Its joint outcome distribution is computed exactly by
//! collapsing the global state (relative to W) at each measurement and forking
//! the run per outcome, in schedule order. Measurements sharing an insertion
//! point run in list order.
//!
//! Sampling uses ChaCha8 seeded through `SeedableRng::seed_from_u64`, and maps
//! the top 53 bits of each `next_u64` draw to a uniform in [0, 1). The stream
//! depends only on the seed, not on the platform.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};
use thiserror::Error;

use crate::scenario::{full_protocol, Encoding, Schedule, SystemLabel};
use crate::sign::Sign;
use crate::statevec::StateVector;
use crate::TOLERANCE;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("{0} is not an observer memory")]
    NotMemory(SystemLabel),
    #[error("{0} is not in the register")]
    NotInRegister(SystemLabel),
    #[error("measurement `{label}` is inserted after event {insert_after}, but the schedule has {events} events")]
    InsertionOutOfRange {
        label: String,
        insert_after: usize,
        events: usize,
    },
    #[error("outcome label `{0}` is used twice in one context")]
    DuplicateLabel(String),
    #[error("memory {0} is measured more than once in one context")]
    MeasuredTwice(SystemLabel),
    #[error("memory {0} is not measured in this context")]
    NotMeasured(SystemLabel),
    #[error("event {event} acts on {target} between the two measurements")]
    InterveningEvent { target: SystemLabel, event: usize },
    #[error("the repeated measurement of {0} would precede the original")]
    RepeatBeforeOriginal(SystemLabel),
    #[error("shot count must be at least 1")]
    ZeroShots,
}

/// Wigner reading a memory in its pointer basis after event `insert_after`
/// (0 = straight after preparation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointerMeasurement {
    pub target: SystemLabel,
    pub insert_after: usize,
    pub label: String,
}

impl PointerMeasurement {
    /// A measurement labelled with the superscript-W convention, e.g. `B1^W`.
    pub fn wigner(target: SystemLabel, insert_after: usize) -> Self {
        PointerMeasurement {
            target,
            insert_after,
            label: format!("{target}^W"),
        }
    }
}

/// A named choice and placement of Wigner's measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    name: String,
    schedule: Schedule,
    measurements: Vec<PointerMeasurement>,
}

impl Context {
    pub fn new(
        name: impl Into<String>,
        schedule: Schedule,
        measurements: Vec<PointerMeasurement>,
    ) -> Result<Self, ContextError> {
        let events = schedule.events().len();
        for (i, m) in measurements.iter().enumerate() {
            if !m.target.is_memory() {
                return Err(ContextError::NotMemory(m.target));
            }
            if schedule.layout().qubit(m.target).is_none() {
                return Err(ContextError::NotInRegister(m.target));
            }
            if m.insert_after > events {
                return Err(ContextError::InsertionOutOfRange {
                    label: m.label.clone(),
                    insert_after: m.insert_after,
                    events,
                });
            }
            let earlier = &measurements[..i];
            if earlier.iter().any(|o| o.label == m.label) {
                return Err(ContextError::DuplicateLabel(m.label.clone()));
            }
            if earlier.iter().any(|o| o.target == m.target) {
                return Err(ContextError::MeasuredTwice(m.target));
            }
        }
        Ok(Context {
            name: name.into(),
            schedule,
            measurements,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn measurements(&self) -> &[PointerMeasurement] {
        &self.measurements
    }

    pub fn labels(&self) -> Vec<String> {
        self.measurements.iter().map(|m| m.label.clone()).collect()
    }

    pub fn measured_memories(&self) -> Vec<SystemLabel> {
        self.measurements.iter().map(|m| m.target).collect()
    }

    /// The same context with the measurement of `target` moved to a new
    /// insertion point.
    pub fn with_moved(&self, target: SystemLabel, insert_after: usize) -> Result<Context, ContextError> {
        let mut measurements = self.measurements.clone();
        let m = measurements
            .iter_mut()
            .find(|m| m.target == target)
            .ok_or(ContextError::NotMeasured(target))?;
        m.insert_after = insert_after;
        Context::new(self.name.clone(), self.schedule.clone(), measurements)
    }

    /// Insertion points to which the measurement of `target` can move without
    /// crossing an event that acts on it.
    pub fn legal_insertion_points(&self, target: SystemLabel) -> Result<std::ops::RangeInclusive<usize>, ContextError> {
        let m = self
            .measurements
            .iter()
            .find(|m| m.target == target)
            .ok_or(ContextError::NotMeasured(target))?;
        let events = self.schedule.events();
        // event k (1-based) sits between insertion points k-1 and k
        let lo = (1..=m.insert_after)
            .rev()
            .find(|&k| events[k - 1].touches(target))
            .unwrap_or(0);
        let hi = (m.insert_after + 1..=events.len())
            .find(|&k| events[k - 1].touches(target))
            .map_or(events.len(), |k| k - 1);
        Ok(lo..=hi)
    }
}

/// One outcome tuple, ordered like the context's measurement list.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEntry {
    pub outcomes: Vec<Sign>,
    pub probability: f64,
}

impl JointEntry {
    pub fn product(&self) -> Sign {
        Sign::product(self.outcomes.iter().copied())
    }
}

/// All 2^k outcome tuples of a context, sorted with +1 before −1 in each slot.
/// Unreachable tuples are present with probability exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub labels: Vec<String>,
    pub entries: Vec<JointEntry>,
}

impl JointDistribution {
    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    /// Tuples with probability above [`TOLERANCE`].
    pub fn support(&self) -> impl Iterator<Item = &JointEntry> {
        self.entries.iter().filter(|e| e.probability > TOLERANCE)
    }

    pub fn probability_of(&self, outcomes: &[Sign]) -> f64 {
        self.entries
            .iter()
            .find(|e| e.outcomes == outcomes)
            .map_or(0.0, |e| e.probability)
    }

    pub fn product_expectation(&self) -> f64 {
        self.entries.iter().map(|e| e.product().as_f64() * e.probability).sum()
    }

    /// The common product of every support tuple, if there is one.
    pub fn deterministic_product(&self) -> Option<Sign> {
        let mut products = self.support().map(JointEntry::product);
        let first = products.next()?;
        products.all(|p| p == first).then_some(first)
    }

    /// Largest probability difference over matching tuples; `None` if the two
    /// distributions are over different labels.
    pub fn max_abs_diff(&self, other: &JointDistribution) -> Option<f64> {
        if self.labels != other.labels || self.entries.len() != other.entries.len() {
            return None;
        }
        let mut worst = 0.0f64;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if a.outcomes != b.outcomes {
                return None;
            }
            worst = worst.max((a.probability - b.probability).abs());
        }
        Some(worst)
    }
}

/// C1..C4: the measurement triples B1B2B3, B1A2A3, A1B2A3, A1A2B3.
///
/// A-memories are read after all three A records and before any inverse
/// (point 3); B-memories right after their own record.
pub fn builtin_contexts(encoding: Encoding) -> Vec<Context> {
    let schedule = full_protocol(encoding);
    let w = PointerMeasurement::wigner;
    let (a, b) = (SystemLabel::a, SystemLabel::b);
    let specs = [
        ("C1", [w(b(1), 9), w(b(2), 9), w(b(3), 9)]),
        ("C2", [w(b(1), 5), w(a(2), 3), w(a(3), 3)]),
        ("C3", [w(a(1), 3), w(b(2), 7), w(a(3), 3)]),
        ("C4", [w(a(1), 3), w(a(2), 3), w(b(3), 9)]),
    ];
    specs
        .into_iter()
        .map(|(name, ms)| Context::new(name, schedule.clone(), ms.to_vec()).expect("built-in contexts are valid"))
        .collect()
}

/// C2 with the A2, A3 pointers read only after the full protocol, when both
/// memories are back in |R⟩.
pub fn deferred_context(encoding: Encoding) -> Context {
    let w = PointerMeasurement::wigner;
    Context::new(
        "C2-deferred",
        full_protocol(encoding),
        vec![
            w(SystemLabel::b(1), 5),
            w(SystemLabel::a(2), 9),
            w(SystemLabel::a(3), 9),
        ],
    )
    .expect("deferred context is valid")
}

pub fn exact_distribution(c: &Context) -> JointDistribution {
    branch_distribution(&c.schedule, &c.measurements)
}

pub fn product_expectation(c: &Context) -> f64 {
    exact_distribution(c).product_expectation()
}

struct Branch {
    // None once the branch has probability zero
    state: Option<StateVector>,
    probability: f64,
    outcomes: Vec<Sign>,
}

fn branch_distribution(schedule: &Schedule, measurements: &[PointerMeasurement]) -> JointDistribution {
    let k = measurements.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| measurements[i].insert_after);
    let mut pending = order.into_iter().peekable();

    let mut branches = vec![Branch {
        state: Some(schedule.initial_state()),
        probability: 1.0,
        outcomes: vec![Sign::Plus; k],
    }];
    let events = schedule.events().len();
    for point in 0..=events {
        while let Some(slot) = pending.next_if(|&i| measurements[i].insert_after == point) {
            let m = &measurements[slot];
            let qubit = schedule.layout().qubit(m.target).expect("validated target");
            let basis = schedule.pointer_basis(m.target);
            branches = branches
                .into_iter()
                .flat_map(|b| split(b, slot, qubit, basis))
                .collect();
        }
        if point < events {
            for b in &mut branches {
                if let Some(s) = b.state.take() {
                    b.state = Some(schedule.apply_event(&s, point));
                }
            }
        }
    }

    let mut entries: Vec<JointEntry> = branches
        .into_iter()
        .map(|b| JointEntry {
            outcomes: b.outcomes,
            probability: b.probability,
        })
        .collect();
    entries.sort_by(|x, y| x.outcomes.cmp(&y.outcomes));
    JointDistribution {
        labels: measurements.iter().map(|m| m.label.clone()).collect(),
        entries,
    }
}

fn split(b: Branch, slot: usize, qubit: usize, basis: crate::statevec::Basis) -> [Branch; 2] {
    let child = |outcome: Sign, state: Option<StateVector>, probability: f64| {
        let mut outcomes = b.outcomes.clone();
        outcomes[slot] = outcome;
        Branch {
            state,
            probability,
            outcomes,
        }
    };
    match &b.state {
        None => [child(Sign::Plus, None, 0.0), child(Sign::Minus, None, 0.0)],
        Some(s) => {
            let d = s.measure(qubit, basis).expect("validated qubit");
            let mut children = d.entries.into_iter().map(|br| {
                if br.usable {
                    child(br.outcome, Some(br.post_state), b.probability * br.probability)
                } else {
                    child(br.outcome, None, 0.0)
                }
            });
            [children.next().expect("+1 branch"), children.next().expect("-1 branch")]
        }
    }
}

/// `shots` i.i.d. draws from the exact distribution of `c`.
pub fn sample(c: &Context, shots: usize, seed: u64) -> Result<Vec<Vec<Sign>>, ContextError> {
    if shots == 0 {
        return Err(ContextError::ZeroShots);
    }
    let dist = exact_distribution(c);
    Ok(sample_from(&dist, shots, seed))
}

pub(crate) fn sample_from(dist: &JointDistribution, shots: usize, seed: u64) -> Vec<Vec<Sign>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last_reachable = dist
        .entries
        .iter()
        .rposition(|e| e.probability > 0.0)
        .expect("a distribution has at least one reachable tuple");
    (0..shots)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let mut acc = 0.0;
            let pick = dist
                .entries
                .iter()
                .position(|e| {
                    acc += e.probability;
                    e.probability > 0.0 && u < acc
                })
                .unwrap_or(last_reachable);
            dist.entries[pick].outcomes.clone()
        })
        .collect()
}

/// Whether re-reading `target`'s pointer immediately after Wigner's first
/// reading always agrees with it.
pub fn repeatability_check(c: &Context, target: SystemLabel) -> Result<bool, ContextError> {
    let first = c
        .measurements
        .iter()
        .find(|m| m.target == target)
        .ok_or(ContextError::NotMeasured(target))?;
    repeatability_check_at(c, target, first.insert_after)
}

/// Like [`repeatability_check`], with the second reading at `second_insert_after`.
/// No event may act on `target` between the two readings.
pub fn repeatability_check_at(
    c: &Context,
    target: SystemLabel,
    second_insert_after: usize,
) -> Result<bool, ContextError> {
    let position = c
        .measurements
        .iter()
        .position(|m| m.target == target)
        .ok_or(ContextError::NotMeasured(target))?;
    let first = &c.measurements[position];
    if second_insert_after < first.insert_after {
        return Err(ContextError::RepeatBeforeOriginal(target));
    }
    let events = c.schedule.events();
    if second_insert_after > events.len() {
        return Err(ContextError::InsertionOutOfRange {
            label: first.label.clone(),
            insert_after: second_insert_after,
            events: events.len(),
        });
    }
    if let Some(k) = (first.insert_after..second_insert_after).find(|&k| events[k].touches(target)) {
        return Err(ContextError::InterveningEvent { target, event: k + 1 });
    }
    let mut measurements = c.measurements.clone();
    measurements.insert(
        position + 1,
        PointerMeasurement {
            target,
            insert_after: second_insert_after,
            label: format!("{}'", first.label),
        },
    );
    let dist = branch_distribution(&c.schedule, &measurements);
    let disagreement: f64 = dist
        .entries
        .iter()
        .filter(|e| e.outcomes[position] != e.outcomes[position + 1])
        .map(|e| e.probability)
        .sum();
    Ok(disagreement < TOLERANCE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_labels() {
        let cs = builtin_contexts(Encoding::Literal);
        assert_eq!(cs.len(), 4);
        assert_eq!(cs[0].labels(), ["B1^W", "B2^W", "B3^W"]);
        assert_eq!(cs[1].labels(), ["B1^W", "A2^W", "A3^W"]);
        assert_eq!(cs[2].labels(), ["A1^W", "B2^W", "A3^W"]);
        assert_eq!(cs[3].labels(), ["A1^W", "A2^W", "B3^W"]);
    }

    #[test]
    fn context_validation() {
        let s = full_protocol(Encoding::Literal);
        let w = PointerMeasurement::wigner;
        assert_eq!(
            Context::new("x", s.clone(), vec![w(SystemLabel::s(1), 0)]),
            Err(ContextError::NotMemory(SystemLabel::s(1)))
        );
        assert!(matches!(
            Context::new("x", s.clone(), vec![w(SystemLabel::b(1), 10)]),
            Err(ContextError::InsertionOutOfRange { insert_after: 10, .. })
        ));
        assert_eq!(
            Context::new("x", s.clone(), vec![w(SystemLabel::b(1), 9), w(SystemLabel::b(1), 5)]),
            Err(ContextError::DuplicateLabel("B1^W".into()))
        );
        let mut again = w(SystemLabel::b(1), 5);
        again.label = "other".into();
        assert_eq!(
            Context::new("x", s, vec![w(SystemLabel::b(1), 9), again]),
            Err(ContextError::MeasuredTwice(SystemLabel::b(1)))
        );
    }

    #[test]
    fn single_b_pointer_is_unbiased() {
        let c = Context::new(
            "B1 only",
            full_protocol(Encoding::Literal),
            vec![PointerMeasurement::wigner(SystemLabel::b(1), 9)],
        )
        .unwrap();
        let d = exact_distribution(&c);
        assert_eq!(d.entries.len(), 2);
        assert!((d.probability_of(&[Sign::Plus]) - 0.5).abs() < TOLERANCE);
        assert!((d.probability_of(&[Sign::Minus]) - 0.5).abs() < TOLERANCE);
    }

    #[test]
    fn empty_context_has_one_tuple() {
        let c = Context::new("none", full_protocol(Encoding::Literal), vec![]).unwrap();
        let d = exact_distribution(&c);
        assert_eq!(d.entries.len(), 1);
        assert!((d.entries[0].probability - 1.0).abs() < TOLERANCE);
        assert_eq!(d.product_expectation(), d.entries[0].probability);
    }

    #[test]
    fn legal_points_for_builtins() {
        let cs = builtin_contexts(Encoding::Literal);
        assert_eq!(cs[0].legal_insertion_points(SystemLabel::b(1)).unwrap(), 5..=9);
        assert_eq!(cs[1].legal_insertion_points(SystemLabel::a(2)).unwrap(), 2..=5);
        assert_eq!(cs[2].legal_insertion_points(SystemLabel::a(1)).unwrap(), 1..=3);
    }

    #[test]
    fn zero_shots_rejected() {
        let c = &builtin_contexts(Encoding::Literal)[0];
        assert_eq!(sample(c, 0, 1), Err(ContextError::ZeroShots));
    }

    #[test]
    fn repeat_errors() {
        let c = &builtin_contexts(Encoding::Literal)[1];
        // U_SA2† is event 6; A2 is first read at point 3
        assert_eq!(
            repeatability_check_at(c, SystemLabel::a(2), 6),
            Err(ContextError::InterveningEvent {
                target: SystemLabel::a(2),
                event: 6
            })
        );
        assert_eq!(
            repeatability_check(c, SystemLabel::b(3)),
            Err(ContextError::NotMeasured(SystemLabel::b(3)))
        );
        assert_eq!(
            repeatability_check_at(c, SystemLabel::a(2), 2),
            Err(ContextError::RepeatBeforeOriginal(SystemLabel::a(2)))
        );
        assert_eq!(repeatability_check_at(c, SystemLabel::a(2), 5), Ok(true));
    }
}
