use std::collections::HashSet;

use super::ast::{Decl, EventRef, Ident, Measure, Node, OutcomeName, ScenarioAst, Span};
use super::lexer::{Lexer, Token, TokenKind};
use super::ParseError;
use crate::statevec::Basis;

const STATEMENTS: [&str; 7] = [
    "`system`",
    "`observer`",
    "`prepare`",
    "`interact`",
    "`undo`",
    "`context`",
    "`constraint`",
];

/// Parses `.rfs` source. Stops at the first error.
pub fn parse(source: &str) -> Result<ScenarioAst, ParseError> {
    Parser::new(source).file()
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<Token>,
    // systems and observers share one namespace
    declared: HashSet<String>,
    outcome_labels: HashSet<String>,
    contexts: HashSet<String>,
    constraints: HashSet<String>,
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        Parser {
            lexer: Lexer::new(source),
            lookahead: None,
            declared: HashSet::new(),
            outcome_labels: HashSet::new(),
            contexts: HashSet::new(),
            constraints: HashSet::new(),
        }
    }

    fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.lookahead.is_none() {
            self.lookahead = Some(self.lexer.next_token()?);
        }
        Ok(self.lookahead.as_ref().expect("filled above"))
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        self.peek()?;
        Ok(self.lookahead.take().expect("filled by peek"))
    }

    fn unexpected(token: &Token, expected: &[&str]) -> ParseError {
        let message = format!("unexpected {}", token.kind.describe());
        ParseError::new(token.span, message, expected.to_vec())
    }

    fn file(&mut self) -> Result<ScenarioAst, ParseError> {
        let mut nodes = Vec::new();
        loop {
            let token = self.next()?;
            match &token.kind {
                TokenKind::Newline => continue,
                TokenKind::Eof => return Ok(ScenarioAst { nodes }),
                TokenKind::Ident(word) => {
                    let decl = match word.as_str() {
                        "system" => Decl::System(self.declaration()?),
                        "observer" => Decl::Observer(self.declaration()?),
                        "prepare" => self.prepare()?,
                        "interact" => self.interact()?,
                        "undo" => {
                            let (observer, system) = self.pair()?;
                            Decl::Undo { observer, system }
                        }
                        "context" => self.context()?,
                        "constraint" => self.constraint()?,
                        other => {
                            return Err(ParseError::new(
                                token.span,
                                format!("unknown statement `{other}`"),
                                STATEMENTS.to_vec(),
                            ))
                        }
                    };
                    nodes.push(Node { decl, span: token.span });
                    self.end_of_statement()?;
                }
                _ => return Err(Self::unexpected(&token, &STATEMENTS)),
            }
        }
    }

    fn end_of_statement(&mut self) -> Result<(), ParseError> {
        let token = self.next()?;
        match token.kind {
            TokenKind::Newline => Ok(()),
            TokenKind::Eof => {
                self.lookahead = Some(token);
                Ok(())
            }
            _ => Err(Self::unexpected(&token, &["end of line"])),
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        let token = self.next()?;
        match token.kind {
            TokenKind::Ident(name) => Ok(Ident { name, span: token.span }),
            _ => Err(Self::unexpected(&token, &[what])),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Span, ParseError> {
        let token = self.next()?;
        match &token.kind {
            TokenKind::Ident(w) if w == word => Ok(token.span),
            _ => Err(Self::unexpected(&token, &[&format!("`{word}`")])),
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Span, ParseError> {
        let token = self.next()?;
        if token.kind == kind {
            Ok(token.span)
        } else {
            Err(Self::unexpected(&token, &[&kind.describe()]))
        }
    }

    /// A reference to an already declared system or observer.
    fn known(&mut self, what: &str) -> Result<Ident, ParseError> {
        let id = self.ident(what)?;
        if !self.declared.contains(&id.name) {
            return Err(ParseError::new(
                id.span,
                format!("unknown identifier `{}`", id.name),
                Vec::<String>::new(),
            ));
        }
        Ok(id)
    }

    fn declaration(&mut self) -> Result<Ident, ParseError> {
        let id = self.ident("identifier")?;
        if !self.declared.insert(id.name.clone()) {
            return Err(duplicate(&id));
        }
        Ok(id)
    }

    fn prepare(&mut self) -> Result<Decl, ParseError> {
        self.keyword("ghz")?;
        let a = self.known("system name")?;
        let b = self.known("system name")?;
        let c = self.known("system name")?;
        Ok(Decl::Prepare([a, b, c]))
    }

    fn pair(&mut self) -> Result<(Ident, Ident), ParseError> {
        let observer = self.known("observer name")?;
        let system = self.known("system name")?;
        Ok((observer, system))
    }

    fn interact(&mut self) -> Result<Decl, ParseError> {
        let (observer, system) = self.pair()?;
        self.keyword("in")?;
        let token = self.next()?;
        let basis = match &token.kind {
            TokenKind::Ident(b) if b == "X" => Basis::X,
            TokenKind::Ident(b) if b == "Y" => Basis::Y,
            _ => return Err(Self::unexpected(&token, &["`X`", "`Y`"])),
        };
        Ok(Decl::Interact {
            observer,
            system,
            basis,
        })
    }

    fn outcome_name(&mut self) -> Result<OutcomeName, ParseError> {
        let base = self.ident("outcome label")?;
        let superscript = if self.peek()?.kind == TokenKind::Caret {
            self.next()?;
            Some(self.ident("superscript identifier")?.name)
        } else {
            None
        };
        Ok(OutcomeName {
            base: base.name,
            superscript,
            span: base.span,
        })
    }

    fn context(&mut self) -> Result<Decl, ParseError> {
        let name = self.ident("context name")?;
        if !self.contexts.insert(name.name.clone()) {
            return Err(duplicate(&name));
        }
        self.expect(TokenKind::LBrace)?;
        self.expect(TokenKind::Newline)?;
        let mut measures = Vec::new();
        let mut local_labels = HashSet::new();
        loop {
            let token = self.next()?;
            match &token.kind {
                TokenKind::Newline => continue,
                TokenKind::RBrace => break,
                TokenKind::Ident(w) if w == "measure" => {
                    let memory = self.known("memory name")?;
                    self.keyword("as")?;
                    let label = self.outcome_name()?;
                    let text = label.text();
                    if !local_labels.insert(text.clone()) {
                        return Err(ParseError::new(
                            label.span,
                            format!("duplicate outcome label `{text}` in context `{}`", name.name),
                            Vec::<String>::new(),
                        ));
                    }
                    let after = match &self.peek()?.kind {
                        TokenKind::Ident(w) if w == "after" => {
                            self.next()?;
                            Some(self.event_ref()?)
                        }
                        _ => None,
                    };
                    let has_after = after.is_some();
                    measures.push(Measure {
                        memory,
                        label,
                        after,
                        span: token.span,
                    });
                    let end = self.next()?;
                    if end.kind != TokenKind::Newline {
                        let expected: &[&str] = if !has_after {
                            &["`after`", "end of line"]
                        } else {
                            &["end of line"]
                        };
                        return Err(Self::unexpected(&end, expected));
                    }
                }
                _ => return Err(Self::unexpected(&token, &["`measure`", "`}`"])),
            }
        }
        self.outcome_labels.extend(local_labels);
        Ok(Decl::Context { name, measures })
    }

    fn event_ref(&mut self) -> Result<EventRef, ParseError> {
        let token = self.next()?;
        match &token.kind {
            TokenKind::Ident(w) if w == "prepare" => Ok(EventRef::Prepare),
            TokenKind::Ident(w) if w == "interact" => {
                let (observer, system) = self.pair()?;
                Ok(EventRef::Interact { observer, system })
            }
            TokenKind::Ident(w) if w == "undo" => {
                let (observer, system) = self.pair()?;
                Ok(EventRef::Undo { observer, system })
            }
            _ => Err(Self::unexpected(&token, &["`prepare`", "`interact`", "`undo`"])),
        }
    }

    fn constraint(&mut self) -> Result<Decl, ParseError> {
        let name = self.ident("constraint name")?;
        if !self.constraints.insert(name.name.clone()) {
            return Err(duplicate(&name));
        }
        self.expect(TokenKind::Colon)?;
        let first = self.known_label()?;
        self.expect(TokenKind::Star)?;
        let second = self.known_label()?;
        self.expect(TokenKind::Star)?;
        let third = self.known_label()?;
        self.expect(TokenKind::Equals)?;
        let token = self.next()?;
        let TokenKind::Sign(parity) = token.kind else {
            return Err(Self::unexpected(&token, &["`+1`", "`-1`"]));
        };
        Ok(Decl::Constraint {
            name,
            labels: [first, second, third],
            parity,
        })
    }

    fn known_label(&mut self) -> Result<OutcomeName, ParseError> {
        let label = self.outcome_name()?;
        if !self.outcome_labels.contains(&label.text()) {
            return Err(ParseError::new(
                label.span,
                format!("unknown outcome label `{}`", label.text()),
                Vec::<String>::new(),
            ));
        }
        Ok(label)
    }
}

fn duplicate(id: &Ident) -> ParseError {
    ParseError::new(
        id.span,
        format!("duplicate declaration of `{}`", id.name),
        Vec::<String>::new(),
    )
}
