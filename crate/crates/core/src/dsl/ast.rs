use std::fmt;

use crate::sign::Sign;
use crate::statevec::Basis;

/// 1-based line and column (in characters) of a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

/// An outcome label such as `B1^W`: a base identifier and optional superscript.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeName {
    pub base: String,
    pub superscript: Option<String>,
    pub span: Span,
}

impl OutcomeName {
    pub fn text(&self) -> String {
        match &self.superscript {
            Some(sup) => format!("{}^{sup}", self.base),
            None => self.base.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventRef {
    Prepare,
    Interact { observer: Ident, system: Ident },
    Undo { observer: Ident, system: Ident },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    pub memory: Ident,
    pub label: OutcomeName,
    /// Absent means after the last event.
    pub after: Option<EventRef>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    System(Ident),
    Observer(Ident),
    Prepare([Ident; 3]),
    Interact {
        observer: Ident,
        system: Ident,
        basis: Basis,
    },
    Undo {
        observer: Ident,
        system: Ident,
    },
    Context {
        name: Ident,
        measures: Vec<Measure>,
    },
    Constraint {
        name: Ident,
        labels: [OutcomeName; 3],
        parity: Sign,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub decl: Decl,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScenarioAst {
    pub nodes: Vec<Node>,
}

impl ScenarioAst {
    /// Number of `interact` and `undo` nodes.
    pub fn interaction_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.decl, Decl::Interact { .. } | Decl::Undo { .. }))
            .count()
    }

    pub fn context_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.decl, Decl::Context { .. }))
            .count()
    }

    /// A copy with every span reset, for structural comparison.
    pub fn without_spans(&self) -> ScenarioAst {
        let id = |i: &Ident| Ident {
            name: i.name.clone(),
            span: Span::default(),
        };
        let out = |o: &OutcomeName| OutcomeName {
            span: Span::default(),
            ..o.clone()
        };
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let decl = match &n.decl {
                    Decl::System(i) => Decl::System(id(i)),
                    Decl::Observer(i) => Decl::Observer(id(i)),
                    Decl::Prepare(qs) => Decl::Prepare(qs.each_ref().map(id)),
                    Decl::Interact {
                        observer,
                        system,
                        basis,
                    } => Decl::Interact {
                        observer: id(observer),
                        system: id(system),
                        basis: *basis,
                    },
                    Decl::Undo { observer, system } => Decl::Undo {
                        observer: id(observer),
                        system: id(system),
                    },
                    Decl::Context { name, measures } => Decl::Context {
                        name: id(name),
                        measures: measures
                            .iter()
                            .map(|m| Measure {
                                memory: id(&m.memory),
                                label: out(&m.label),
                                after: m.after.as_ref().map(|e| match e {
                                    EventRef::Prepare => EventRef::Prepare,
                                    EventRef::Interact { observer, system } => EventRef::Interact {
                                        observer: id(observer),
                                        system: id(system),
                                    },
                                    EventRef::Undo { observer, system } => EventRef::Undo {
                                        observer: id(observer),
                                        system: id(system),
                                    },
                                }),
                                span: Span::default(),
                            })
                            .collect(),
                    },
                    Decl::Constraint { name, labels, parity } => Decl::Constraint {
                        name: id(name),
                        labels: labels.each_ref().map(out),
                        parity: *parity,
                    },
                };
                Node {
                    decl,
                    span: Span::default(),
                }
            })
            .collect();
        ScenarioAst { nodes }
    }
}

impl fmt::Display for EventRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventRef::Prepare => f.write_str("prepare"),
            EventRef::Interact { observer, system } => write!(f, "interact {} {}", observer.name, system.name),
            EventRef::Undo { observer, system } => write!(f, "undo {} {}", observer.name, system.name),
        }
    }
}

/// Canonical source form; parsing it back gives the same AST up to spans.
impl fmt::Display for ScenarioAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            match &n.decl {
                Decl::System(i) => writeln!(f, "system {}", i.name)?,
                Decl::Observer(i) => writeln!(f, "observer {}", i.name)?,
                Decl::Prepare([a, b, c]) => writeln!(f, "prepare ghz {} {} {}", a.name, b.name, c.name)?,
                Decl::Interact {
                    observer,
                    system,
                    basis,
                } => writeln!(f, "interact {} {} in {basis}", observer.name, system.name)?,
                Decl::Undo { observer, system } => writeln!(f, "undo {} {}", observer.name, system.name)?,
                Decl::Context { name, measures } => {
                    writeln!(f, "context {} {{", name.name)?;
                    for m in measures {
                        write!(f, "  measure {} as {}", m.memory.name, m.label.text())?;
                        if let Some(e) = &m.after {
                            write!(f, " after {e}")?;
                        }
                        writeln!(f)?;
                    }
                    writeln!(f, "}}")?;
                }
                Decl::Constraint { name, labels, parity } => writeln!(
                    f,
                    "constraint {}: {}*{}*{} = {parity}",
                    name.name,
                    labels[0].text(),
                    labels[1].text(),
                    labels[2].text()
                )?,
            }
        }
        Ok(())
    }
}
