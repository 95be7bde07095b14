use std::collections::HashMap;

use super::ast::{Decl, EventRef, Ident, ScenarioAst, Span};
use super::CompileError;
use crate::assignments::{ghz_constraints, Constraint, Label};
use crate::perspective::{builtin_contexts, Context, PointerMeasurement};
use crate::scenario::{
    full_protocol, inverse_of, Direction, Encoding, Interaction, RegisterLayout, Schedule, SystemLabel,
};

/// A schedule with its measurement contexts and parity constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub schedule: Schedule,
    pub contexts: Vec<Context>,
    pub constraints: Vec<Constraint>,
}

impl Scenario {
    /// The programmatic three-party scenario: full protocol, C1..C4, (i)..(iv).
    pub fn builtin(encoding: Encoding) -> Self {
        Scenario {
            schedule: full_protocol(encoding),
            contexts: builtin_contexts(encoding),
            constraints: ghz_constraints(),
        }
    }
}

fn err(span: Span, message: impl Into<String>) -> CompileError {
    CompileError {
        line: span.line,
        column: span.column,
        message: message.into(),
    }
}

/// Semantic checks and lowering of a parsed scenario.
pub fn compile(ast: &ScenarioAst, encoding: Encoding) -> Result<Scenario, CompileError> {
    let Some(first) = ast.nodes.first() else {
        return Err(err(Span { line: 1, column: 1 }, "scenario is empty"));
    };

    let mut names: HashMap<&str, SystemLabel> = HashMap::new();
    for node in &ast.nodes {
        match &node.decl {
            Decl::System(id) => {
                let label = register_label(id)?;
                if label.is_memory() {
                    return Err(err(id.span, format!("`{}` is an observer name, not a system", id.name)));
                }
                names.insert(&id.name, label);
            }
            Decl::Observer(id) => {
                let label = register_label(id)?;
                if !label.is_memory() {
                    return Err(err(id.span, format!("`{}` is a system name, not an observer", id.name)));
                }
                names.insert(&id.name, label);
            }
            _ => {}
        }
    }
    let lookup = |id: &Ident| names[id.name.as_str()];
    let layout = RegisterLayout::new(names.values().copied().collect()).map_err(|e| err(first.span, e.to_string()))?;

    let mut preparation = None;
    let mut events: Vec<Interaction> = Vec::new();
    for node in &ast.nodes {
        match &node.decl {
            Decl::Prepare(qubits) => {
                if preparation.is_some() {
                    return Err(err(node.span, "the state is prepared more than once"));
                }
                if !events.is_empty() {
                    return Err(err(node.span, "`prepare` must come before every interaction"));
                }
                for q in qubits {
                    if lookup(q).is_memory() {
                        return Err(err(q.span, format!("`{}` is not a system qubit", q.name)));
                    }
                }
                let labels = qubits.each_ref().map(lookup);
                if labels[0] == labels[1] || labels[0] == labels[2] || labels[1] == labels[2] {
                    return Err(err(node.span, "GHZ preparation needs three distinct systems"));
                }
                preparation = Some(labels);
            }
            Decl::Interact {
                observer,
                system,
                basis,
            } => {
                if preparation.is_none() {
                    return Err(err(node.span, "interaction before `prepare ghz`"));
                }
                let (agent, target) = (lookup(observer), lookup(system));
                let e = Interaction::record(agent, target, *basis).map_err(|e| err(node.span, e.to_string()))?;
                if events.iter().any(|o| o.agent == agent && o.basis != *basis) {
                    return Err(err(
                        node.span,
                        format!("observer `{}` already records in another basis", observer.name),
                    ));
                }
                events.push(e);
            }
            Decl::Undo { observer, system } => {
                if preparation.is_none() {
                    return Err(err(node.span, "interaction before `prepare ghz`"));
                }
                let (agent, target) = (lookup(observer), lookup(system));
                let previous = events.iter().rev().find(|p| p.touches(agent) || p.touches(target));
                let inverse = previous
                    .filter(|p| p.direction == Direction::Forward && p.agent == agent && p.target == target)
                    .and_then(|p| inverse_of(p).ok())
                    .ok_or_else(|| {
                        err(
                            node.span,
                            format!(
                                "unmatched `undo {} {}`: the last event on these qubits is not `interact {} {}`",
                                observer.name, system.name, observer.name, system.name
                            ),
                        )
                    })?;
                events.push(inverse);
            }
            _ => {}
        }
    }
    let Some(preparation) = preparation else {
        return Err(err(first.span, "missing `prepare ghz`"));
    };
    let event_count = events.len();
    let schedule = Schedule::new(encoding, layout, preparation, events).map_err(|e| err(first.span, e.to_string()))?;

    let mut label_memory: HashMap<String, SystemLabel> = HashMap::new();
    let mut contexts = Vec::new();
    for node in &ast.nodes {
        let Decl::Context { name, measures } = &node.decl else {
            continue;
        };
        let mut pointer = Vec::with_capacity(measures.len());
        for m in measures {
            let memory = lookup(&m.memory);
            if !memory.is_memory() {
                return Err(err(
                    m.memory.span,
                    format!(
                        "Wigner can only measure observer memories, `{}` is a system",
                        m.memory.name
                    ),
                ));
            }
            if pointer.iter().any(|p: &PointerMeasurement| p.target == memory) {
                return Err(err(
                    m.span,
                    format!("`{}` is measured twice in context `{}`", m.memory.name, name.name),
                ));
            }
            let text = m.label.text();
            if let Some(previous) = label_memory.insert(text.clone(), memory) {
                if previous != memory {
                    return Err(err(
                        m.label.span,
                        format!("outcome label `{text}` already names a reading of {previous}"),
                    ));
                }
            }
            let insert_after = match &m.after {
                None => event_count,
                Some(event) => resolve_event(schedule.events(), event, &lookup, m.span)?,
            };
            pointer.push(PointerMeasurement {
                target: memory,
                insert_after,
                label: text,
            });
        }
        let context =
            Context::new(name.name.clone(), schedule.clone(), pointer).map_err(|e| err(node.span, e.to_string()))?;
        contexts.push(context);
    }

    let mut constraints = Vec::new();
    for node in &ast.nodes {
        let Decl::Constraint { name, labels, parity } = &node.decl else {
            continue;
        };
        let mut resolved = [Label::A1; 3];
        for (slot, outcome) in resolved.iter_mut().zip(labels) {
            let memory = label_memory[&outcome.text()];
            *slot = Label::of_memory(memory).expect("outcome labels name memories");
        }
        let c = Constraint::new(name.name.clone(), resolved, *parity).map_err(|_| {
            err(
                node.span,
                format!("constraint `{}` uses the same outcome twice", name.name),
            )
        })?;
        constraints.push(c);
    }

    Ok(Scenario {
        schedule,
        contexts,
        constraints,
    })
}

fn register_label(id: &Ident) -> Result<SystemLabel, CompileError> {
    if id.name == "W" {
        return Err(err(
            id.span,
            "`W` is the external observer and is not part of the register",
        ));
    }
    id.name.parse::<SystemLabel>().map_err(|_| {
        err(
            id.span,
            format!(
                "`{}` is not a register name (expected S1..S3, A1..A3 or B1..B3)",
                id.name
            ),
        )
    })
}

fn resolve_event(
    events: &[Interaction],
    event: &EventRef,
    lookup: &impl Fn(&Ident) -> SystemLabel,
    span: Span,
) -> Result<usize, CompileError> {
    let (observer, system, direction) = match event {
        EventRef::Prepare => return Ok(0),
        EventRef::Interact { observer, system } => (observer, system, Direction::Forward),
        EventRef::Undo { observer, system } => (observer, system, Direction::Inverse),
    };
    let (agent, target) = (lookup(observer), lookup(system));
    let matches: Vec<usize> = events
        .iter()
        .enumerate()
        .filter(|(_, e)| e.agent == agent && e.target == target && e.direction == direction)
        .map(|(i, _)| i + 1)
        .collect();
    match matches.as_slice() {
        [k] => Ok(*k),
        [] => Err(err(span, format!("no event `{event}` in the schedule"))),
        _ => Err(err(span, format!("event `{event}` occurs more than once"))),
    }
}
