//! Recursive-descent parser from tokens to a [`Platform`].
//!
//! Links declared inside a composite resolve relative to that composite
//! and are hoisted, fully qualified, into the platform's link list, so the
//! in-memory representation is independent of where a link was written.

use std::collections::BTreeMap;

use crate::diag::{DiagCode, Diagnostic, SourceSpan};
use crate::model::{
    validate_with_spans, Complexity, Component, ComponentId, DeviceClassification, Link, Origin,
    Platform, Role, ServiceKind, SpanTable, SymmetryClass,
};
use crate::txn::{Application, Transaction};

use super::lexer::{lex, Token, TokenKind};

/// Parse model text into a validated platform. On failure, one or more
/// error diagnostics locate the problem in the source.
pub fn parse(text: &str, file: &str) -> Result<Platform, Vec<Diagnostic>> {
    let tokens = lex(text, file).map_err(|d| vec![d])?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        file: file.to_string(),
        spans: BTreeMap::new(),
    };
    let platform = parser.model().map_err(|d| vec![d])?;

    let table = SpanTable {
        file: file.to_string(),
        spans: parser.spans,
    };
    let diags = validate_with_spans(&platform, &table);
    let errors: Vec<Diagnostic> = diags.into_iter().filter(Diagnostic::is_error).collect();
    if errors.is_empty() {
        Ok(platform)
    } else {
        Err(errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    file: String,
    spans: BTreeMap<String, SourceSpan>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn span_of(&self, t: &Token) -> SourceSpan {
        SourceSpan::new(&self.file, t.line, t.column)
    }

    fn eof_span(&self) -> SourceSpan {
        self.tokens
            .last()
            .map(|t| SourceSpan::new(&self.file, t.line, t.column))
            .unwrap_or_else(|| SourceSpan::new(&self.file, 1, 1))
    }

    fn err(&self, message: impl Into<String>, span: SourceSpan) -> Diagnostic {
        Diagnostic::new(DiagCode::Parse, message, span)
    }

    fn expect(&mut self, kind: &TokenKind) -> Result<Token, Diagnostic> {
        match self.bump() {
            Some(t) if t.kind == *kind => Ok(t),
            Some(t) => Err(self.err(
                format!("expected {}, found {}", kind.describe(), t.kind.describe()),
                self.span_of(&t),
            )),
            None => Err(self.err(
                format!("expected {}, found end of input", kind.describe()),
                self.eof_span(),
            )),
        }
    }

    fn expect_ident(&mut self) -> Result<(String, SourceSpan), Diagnostic> {
        match self.bump() {
            Some(Token {
                kind: TokenKind::Ident(s),
                line,
                column,
            }) => Ok((s, SourceSpan::new(&self.file, line, column))),
            Some(t) => Err(self.err(
                format!("expected identifier, found {}", t.kind.describe()),
                self.span_of(&t),
            )),
            None => Err(self.err("expected identifier, found end of input", self.eof_span())),
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<SourceSpan, Diagnostic> {
        let (s, span) = self.expect_ident()?;
        if s == word {
            Ok(span)
        } else {
            Err(self.err(format!("expected `{word}`, found `{s}`"), span))
        }
    }

    fn expect_number(&mut self) -> Result<u64, Diagnostic> {
        match self.bump() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => Ok(n),
            Some(t) => Err(self.err(
                format!("expected number, found {}", t.kind.describe()),
                self.span_of(&t),
            )),
            None => Err(self.err("expected number, found end of input", self.eof_span())),
        }
    }

    fn at_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(s), .. }) if s == word)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// QID = IDENT { "." IDENT }, returned with the span of its first
    /// segment.
    fn qid(&mut self) -> Result<(String, SourceSpan), Diagnostic> {
        let (mut s, span) = self.expect_ident()?;
        while self.eat(&TokenKind::Dot) {
            let (seg, _) = self.expect_ident()?;
            s.push('.');
            s.push_str(&seg);
        }
        Ok((s, span))
    }

    fn model(&mut self) -> Result<Platform, Diagnostic> {
        self.expect_keyword("platform")?;
        let (name, name_span) = self.expect_ident()?;
        self.spans.insert(name.clone(), name_span);
        let mut platform = Platform::new(name);
        self.expect(&TokenKind::LBrace)?;

        while !self.eat(&TokenKind::RBrace) {
            let Some(t) = self.peek().cloned() else {
                return Err(self.err("expected item or `}`, found end of input", self.eof_span()));
            };
            let TokenKind::Ident(word) = &t.kind else {
                return Err(self.err(
                    format!("expected item, found {}", t.kind.describe()),
                    self.span_of(&t),
                ));
            };
            match word.as_str() {
                "initiator" | "target" | "transporter" => {
                    let c = self.atomic(&[])?;
                    platform.components.push(c);
                }
                "composite" => {
                    let c = self.composite(&[], &mut platform.links)?;
                    platform.components.push(c);
                }
                "link" => {
                    let link = self.link(&[])?;
                    platform.links.push(link);
                }
                "symmetry" => {
                    let sc = self.symmetry()?;
                    platform.symmetries.push(sc);
                }
                "application" => {
                    let app = self.application()?;
                    platform.applications.push(app);
                }
                other => {
                    return Err(self.err(
                        format!("expected item, found `{other}`"),
                        self.span_of(&t),
                    ))
                }
            }
        }
        if let Some(t) = self.peek().cloned() {
            return Err(self.err(
                format!("unexpected {} after platform", t.kind.describe()),
                self.span_of(&t),
            ));
        }
        Ok(platform)
    }

    /// Qualified id of `name` under the composite `prefix`.
    fn qualify(prefix: &[String], name: &str) -> String {
        if prefix.is_empty() {
            name.to_string()
        } else {
            format!("{}.{}", prefix.join("."), name)
        }
    }

    fn atomic(&mut self, prefix: &[String]) -> Result<Component, Diagnostic> {
        let (role_word, role_span) = self.expect_ident()?;
        let role = match role_word.as_str() {
            "initiator" => Role::Initiator,
            "target" => Role::Target,
            "transporter" => Role::Transporter,
            _ => return Err(self.err(format!("expected role, found `{role_word}`"), role_span)),
        };
        let (name, name_span) = self.expect_ident()?;
        self.spans
            .insert(Self::qualify(prefix, &name), name_span.clone());
        let mut component = Component::new(name, role);

        if self.eat(&TokenKind::LBrace) {
            while !self.eat(&TokenKind::RBrace) {
                self.attr(&mut component)?;
            }
            // The grammar requires `;` after the declaration; after an
            // attribute block it is accepted but not required.
            self.eat(&TokenKind::Semi);
        } else {
            self.expect(&TokenKind::Semi)?;
        }
        Ok(component)
    }

    fn attr(&mut self, component: &mut Component) -> Result<(), Diagnostic> {
        let (word, span) = self.expect_ident()?;
        match word.as_str() {
            "service" => loop {
                let (name, _) = self.expect_ident()?;
                component.services.insert(ServiceKind::new(name));
                if !self.eat(&TokenKind::Comma) {
                    break self.expect(&TokenKind::Semi).map(|_| ())?;
                }
            },
            "capacity" => {
                let value = self.expect_number()?;
                self.expect_keyword("Bps")?;
                self.expect(&TokenKind::Semi)?;
                component.capacity = Some(value);
            }
            "class" => {
                let (origin_word, origin_span) = self.expect_ident()?;
                let origin = match origin_word.as_str() {
                    "cots" => Origin::CotsDevice,
                    "cots_soft_ip" => Origin::CotsIpSoft,
                    "cots_hard_ip" => Origin::CotsIpHard,
                    "custom" => Origin::Custom,
                    other => {
                        return Err(self.err(
                            format!("unknown device origin `{other}`"),
                            origin_span,
                        ))
                    }
                };
                let (cx_word, cx_span) = self.expect_ident()?;
                let complexity = match cx_word.as_str() {
                    "simple" => Complexity::Simple,
                    "complex" => Complexity::Complex,
                    other => {
                        return Err(
                            self.err(format!("unknown complexity `{other}`"), cx_span)
                        )
                    }
                };
                let notes = match self.peek() {
                    Some(Token {
                        kind: TokenKind::Str(_),
                        ..
                    }) => match self.bump().map(|t| t.kind) {
                        Some(TokenKind::Str(s)) => s,
                        _ => unreachable!(),
                    },
                    _ => String::new(),
                };
                self.expect(&TokenKind::Semi)?;
                component.classification = Some(DeviceClassification {
                    origin,
                    complexity,
                    notes,
                });
            }
            other => return Err(self.err(format!("unknown attribute `{other}`"), span)),
        }
        Ok(())
    }

    fn composite(
        &mut self,
        prefix: &[String],
        links: &mut Vec<Link>,
    ) -> Result<Component, Diagnostic> {
        self.expect_keyword("composite")?;
        let (name, name_span) = self.expect_ident()?;
        self.spans
            .insert(Self::qualify(prefix, &name), name_span.clone());
        let mut inner_prefix = prefix.to_vec();
        inner_prefix.push(name.clone());

        let mut children = Vec::new();
        self.expect(&TokenKind::LBrace)?;
        while !self.eat(&TokenKind::RBrace) {
            let Some(t) = self.peek().cloned() else {
                return Err(self.err("expected item or `}`, found end of input", self.eof_span()));
            };
            let TokenKind::Ident(word) = &t.kind else {
                return Err(self.err(
                    format!("expected component or link, found {}", t.kind.describe()),
                    self.span_of(&t),
                ));
            };
            match word.as_str() {
                "initiator" | "target" | "transporter" => {
                    children.push(self.atomic(&inner_prefix)?)
                }
                "composite" => children.push(self.composite(&inner_prefix, links)?),
                "link" => {
                    let link = self.link(&inner_prefix)?;
                    links.push(link);
                }
                other => {
                    return Err(self.err(
                        format!("expected component or link, found `{other}`"),
                        self.span_of(&t),
                    ))
                }
            }
        }
        self.eat(&TokenKind::Semi);
        Ok(Component::composite(name, children))
    }

    /// `link QID -> QID ;`; endpoints resolve relative to the enclosing
    /// composite.
    fn link(&mut self, prefix: &[String]) -> Result<Link, Diagnostic> {
        self.expect_keyword("link")?;
        let (from, from_span) = self.qid()?;
        self.expect(&TokenKind::Arrow)?;
        let (to, to_span) = self.qid()?;
        self.expect(&TokenKind::Semi)?;
        let from = Self::qualify(prefix, &from);
        let to = Self::qualify(prefix, &to);
        self.spans
            .insert(format!("link {from} -> {to}"), from_span.clone());
        self.spans.insert(format!("link {from} -> {to} from"), from_span);
        self.spans.insert(format!("link {from} -> {to} to"), to_span);
        Ok(Link::new(ComponentId::new(from), ComponentId::new(to)))
    }

    fn symmetry(&mut self) -> Result<SymmetryClass, Diagnostic> {
        self.expect_keyword("symmetry")?;
        let (name, name_span) = self.expect_ident()?;
        self.spans.insert(format!("symmetry {name}"), name_span);
        self.expect(&TokenKind::LBrace)?;
        let mut members = Vec::new();
        loop {
            let (member, span) = self.qid()?;
            self.spans
                .insert(format!("symmetry {name} {member}"), span);
            members.push(ComponentId::new(member));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(&TokenKind::RBrace)?;
        self.eat(&TokenKind::Semi);
        Ok(SymmetryClass::new(name, members))
    }

    fn application(&mut self) -> Result<Application, Diagnostic> {
        self.expect_keyword("application")?;
        let (name, name_span) = self.expect_ident()?;
        self.spans
            .insert(format!("application {name}"), name_span);
        let mut app = Application::new(name.clone());
        self.expect(&TokenKind::LBrace)?;
        while !self.eat(&TokenKind::RBrace) {
            app.transactions.push(self.transaction(&name)?);
        }
        Ok(app)
    }

    fn transaction(&mut self, app: &str) -> Result<Transaction, Diagnostic> {
        self.expect_keyword("transaction")?;
        let (name, name_span) = self.expect_ident()?;
        self.spans
            .insert(format!("transaction {app}.{name}"), name_span);
        self.expect(&TokenKind::Colon)?;

        let mut path = Vec::new();
        loop {
            let (hop, span) = self.qid()?;
            self.spans
                .insert(format!("transaction {app}.{name} {hop}"), span);
            path.push(ComponentId::new(hop));
            if !self.eat(&TokenKind::Arrow) {
                break;
            }
        }

        self.expect_keyword("uses")?;
        let (service, _) = self.expect_ident()?;

        let mut rate = 0;
        let mut payload = 0;
        if self.at_ident("rate") {
            self.bump();
            rate = self.expect_number()?;
            self.expect(&TokenKind::PerSec)?;
        }
        if self.at_ident("size") {
            self.bump();
            payload = self.expect_number()?;
            self.expect_keyword("B")?;
        }
        self.expect(&TokenKind::Semi)?;

        Ok(Transaction {
            app: app.to_string(),
            name,
            path,
            service: ServiceKind::new(service),
            rate,
            payload,
        })
    }
}
