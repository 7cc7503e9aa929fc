//! Recursive-descent parser for the surface syntax.
//!
//! Precedence: prefix-dot > postfix restriction/relabelling > `|` > `+`.
//! One token of lookahead everywhere except after `[`, where the second
//! token picks between hole `[_n]`, match `[a=b]P` and delimitation `[k]P`.

use std::collections::{BTreeMap, BTreeSet};

use super::lex::{lex, Tok, TokKind};
use super::{Diagnostic, SourceSpan, SpanTree};
use crate::names::{KillerLabel, Name, Polarity, PriorityLevel};
use crate::term::{GuardSet, Pattern, PatternItem, PrefixAction, Term, Tuple};

/// Words with fixed meaning; rejected as names and killer labels.
pub const RESERVED: [&str; 6] = ["new", "tau", "theta", "up", "down", "kill"];

pub(crate) struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

type PResult<T> = Result<T, Diagnostic>;

pub(crate) fn parse(src: &str) -> PResult<(Term, SpanTree)> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, src };
    let (t, tree) = p.term()?;
    if let Some(tok) = p.peek_tok() {
        return Err(Diagnostic {
            span: tok.span,
            message: format!("expected end of input, found {}", tok.kind.describe()),
        });
    }
    Ok((t, tree))
}

impl<'a> Parser<'a> {
    fn peek_tok(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek(&self) -> Option<&TokKind> {
        self.peek_tok().map(|t| &t.kind)
    }

    fn peek2(&self) -> Option<&TokKind> {
        self.toks.get(self.pos + 1).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan {
            start: self.src.len(),
            end: self.src.len(),
        }
    }

    fn here(&self) -> SourceSpan {
        self.peek_tok()
            .map(|t| t.span)
            .unwrap_or_else(|| self.eof_span())
    }

    fn err<T>(&self, span: SourceSpan, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic {
            span,
            message: message.into(),
        })
    }

    fn expect(&mut self, kind: &TokKind, what: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Some(k) if k == kind => Ok(self.bump().unwrap().span),
            Some(k) => {
                let found = k.describe();
                self.err(self.here(), format!("expected {what}, found {found}"))
            }
            None => self.err(
                self.eof_span(),
                format!("expected {what}, found end of input"),
            ),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Some(TokKind::Ident(s)) => {
                let s = s.clone();
                let span = self.bump().unwrap().span;
                if RESERVED.contains(&s.as_str()) {
                    return self.err(span, format!("`{s}` is a reserved word"));
                }
                Ok((s, span))
            }
            Some(k) => {
                let found = k.describe();
                self.err(self.here(), format!("expected {what}, found {found}"))
            }
            None => self.err(
                self.eof_span(),
                format!("expected {what}, found end of input"),
            ),
        }
    }

    fn name(&mut self) -> PResult<(Name, SourceSpan)> {
        let (s, span) = self.ident("a name")?;
        Ok((Name::new(s), span))
    }

    fn killer(&mut self) -> PResult<(KillerLabel, SourceSpan)> {
        let (s, span) = self.ident("a killer label")?;
        Ok((KillerLabel::new(s), span))
    }

    // term := sum
    fn term(&mut self) -> PResult<(Term, SpanTree)> {
        let (first, ftree) = self.par()?;
        if !matches!(self.peek(), Some(TokKind::Plus)) {
            return Ok((first, ftree));
        }
        let mut branches = vec![first];
        let mut trees = vec![ftree];
        while matches!(self.peek(), Some(TokKind::Plus)) {
            self.bump();
            let (b, t) = self.par()?;
            branches.push(b);
            trees.push(t);
        }
        let span = SourceSpan {
            start: trees.first().unwrap().span.start,
            end: trees.last().unwrap().span.end,
        };
        Ok((
            Term::Sum(branches),
            SpanTree {
                span,
                children: trees,
            },
        ))
    }

    // par := unary ("|" unary)*   (left-associative)
    fn par(&mut self) -> PResult<(Term, SpanTree)> {
        let (mut acc, mut tree) = self.unary()?;
        while matches!(self.peek(), Some(TokKind::Pipe)) {
            self.bump();
            let (r, rtree) = self.unary()?;
            let span = SourceSpan {
                start: tree.span.start,
                end: rtree.span.end,
            };
            acc = Term::par(acc, r);
            tree = SpanTree {
                span,
                children: vec![tree, rtree],
            };
        }
        Ok((acc, tree))
    }

    // unary := item ("\" "{" lab ("," lab)* "}" | "[" name "->" name ("," ...)* "]")*
    fn unary(&mut self) -> PResult<(Term, SpanTree)> {
        let (mut acc, mut tree) = self.item()?;
        loop {
            match self.peek() {
                Some(TokKind::Backslash) => {
                    self.bump();
                    self.expect(&TokKind::LBrace, "`{` after `\\`")?;
                    let mut labels = BTreeSet::new();
                    loop {
                        let (n, lvl) = self.restriction_label()?;
                        labels.insert((n, lvl));
                        match self.peek() {
                            Some(TokKind::Comma) => {
                                self.bump();
                            }
                            _ => break,
                        }
                    }
                    let end = self.expect(&TokKind::RBrace, "`}` closing the restriction set")?;
                    let span = SourceSpan {
                        start: tree.span.start,
                        end: end.end,
                    };
                    acc = Term::RestrictSet(labels, Box::new(acc));
                    tree = SpanTree {
                        span,
                        children: vec![tree],
                    };
                }
                Some(TokKind::LBrack)
                    if matches!(self.peek2(), Some(TokKind::Ident(_))) && self.relabel_ahead() =>
                {
                    self.bump();
                    let mut map = BTreeMap::new();
                    loop {
                        let (from, _) = self.name()?;
                        self.expect(&TokKind::Arrow, "`->` in relabelling")?;
                        let (to, _) = self.name()?;
                        map.insert(from, to);
                        match self.peek() {
                            Some(TokKind::Comma) => {
                                self.bump();
                            }
                            _ => break,
                        }
                    }
                    let end = self.expect(&TokKind::RBrack, "`]` closing the relabelling")?;
                    let span = SourceSpan {
                        start: tree.span.start,
                        end: end.end,
                    };
                    acc = Term::Relabel(Box::new(acc), map);
                    tree = SpanTree {
                        span,
                        children: vec![tree],
                    };
                }
                _ => break,
            }
        }
        Ok((acc, tree))
    }

    /// Distinguishes the postfix relabelling `P[a->b]` from a following
    /// delimitation or match (which can only start a new term, never follow
    /// one; no juxtaposition exists, so `[` here must open a relabelling,
    /// but only commit when an arrow follows the identifier).
    fn relabel_ahead(&self) -> bool {
        matches!(
            self.toks.get(self.pos + 2).map(|t| &t.kind),
            Some(TokKind::Arrow)
        )
    }

    fn restriction_label(&mut self) -> PResult<(Name, PriorityLevel)> {
        if matches!(self.peek(), Some(TokKind::Underscore)) {
            self.bump();
            let (n, _) = self.name()?;
            Ok((n, PriorityLevel::Prioritized))
        } else {
            let (n, _) = self.name()?;
            Ok((n, PriorityLevel::Ordinary))
        }
    }

    fn item(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.here();
        match self.peek() {
            Some(TokKind::Nat(0)) => {
                let span = self.bump().unwrap().span;
                Ok((
                    Term::Nil,
                    SpanTree {
                        span,
                        children: vec![],
                    },
                ))
            }
            Some(TokKind::LParen) => {
                if let Some(TokKind::Ident(s)) = self.peek2() {
                    if s == "new" {
                        return self.new_restriction();
                    }
                }
                self.bump();
                let inner = self.term()?;
                self.expect(&TokKind::RParen, "`)`")?;
                Ok(inner)
            }
            Some(TokKind::Bang) => {
                self.bump();
                let (body, btree) = self.unary()?;
                let span = SourceSpan {
                    start: start.start,
                    end: btree.span.end,
                };
                Ok((
                    Term::Bang(Box::new(body)),
                    SpanTree {
                        span,
                        children: vec![btree],
                    },
                ))
            }
            Some(TokKind::LBrack) => self.bracket_item(),
            Some(TokKind::Ident(s)) => match s.as_str() {
                "tau" => self.prefixed(),
                "theta" => self.theta(),
                "up" => self.priority_call(true),
                "down" => self.priority_call(false),
                "kill" => self.kill(),
                "new" => self.err(start, "`new` is only valid as `(new name ...)`"),
                _ => {
                    if matches!(self.peek2(), Some(TokKind::Lt)) {
                        self.def_call()
                    } else {
                        self.prefixed()
                    }
                }
            },
            Some(TokKind::LBrace) | Some(TokKind::Quote) | Some(TokKind::Underscore) => {
                self.prefixed()
            }
            Some(k) => {
                let found = k.describe();
                self.err(start, format!("expected a term, found {found}"))
            }
            None => self.err(self.eof_span(), "expected a term, found end of input"),
        }
    }

    fn new_restriction(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.bump().unwrap().span; // (
        self.bump(); // new
        let mut names = vec![self.name()?.0];
        while matches!(self.peek(), Some(TokKind::Ident(_))) {
            names.push(self.name()?.0);
        }
        self.expect(&TokKind::RParen, "`)` closing the restriction")?;
        let (body, btree) = self.unary()?;
        let span = SourceSpan {
            start: start.start,
            end: btree.span.end,
        };
        let mut term = body;
        let mut tree = btree;
        for n in names.into_iter().rev() {
            term = Term::Nu(n, Box::new(term));
            tree = SpanTree {
                span,
                children: vec![tree],
            };
        }
        Ok((term, tree))
    }

    fn bracket_item(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.here();
        match (self.peek(), self.peek2()) {
            (Some(TokKind::LBrack), Some(TokKind::Underscore)) => {
                self.bump();
                self.bump();
                let idx = match self.peek() {
                    Some(TokKind::Nat(n)) => {
                        let n = *n;
                        let span = self.bump().unwrap().span;
                        if n == 0 || n > u32::MAX as u64 {
                            return self.err(span, "hole index must be at least 1");
                        }
                        n as u32
                    }
                    _ => return self.err(self.here(), "expected a hole index after `[_`"),
                };
                let end = self.expect(&TokKind::RBrack, "`]` closing the hole")?;
                let span = SourceSpan {
                    start: start.start,
                    end: end.end,
                };
                Ok((
                    Term::Hole(idx),
                    SpanTree {
                        span,
                        children: vec![],
                    },
                ))
            }
            (Some(TokKind::LBrack), Some(TokKind::Ident(_))) => {
                match self.toks.get(self.pos + 2).map(|t| &t.kind) {
                    Some(TokKind::Eq) => {
                        self.bump();
                        let (l, _) = self.name()?;
                        self.bump(); // =
                        let (r, _) = self.name()?;
                        self.expect(&TokKind::RBrack, "`]` closing the match")?;
                        let (body, btree) = self.item()?;
                        let span = SourceSpan {
                            start: start.start,
                            end: btree.span.end,
                        };
                        Ok((
                            Term::Match(l, r, Box::new(body)),
                            SpanTree {
                                span,
                                children: vec![btree],
                            },
                        ))
                    }
                    Some(TokKind::RBrack) => {
                        self.bump();
                        let (k, _) = self.killer()?;
                        self.bump(); // ]
                        let (body, btree) = self.item()?;
                        let span = SourceSpan {
                            start: start.start,
                            end: btree.span.end,
                        };
                        Ok((
                            Term::Delimit(k, Box::new(body)),
                            SpanTree {
                                span,
                                children: vec![btree],
                            },
                        ))
                    }
                    _ => self.err(
                        start,
                        "expected `[_n]` (hole), `[a=b]` (match) or `[k]` (delimitation)",
                    ),
                }
            }
            _ => self.err(
                start,
                "expected `[_n]` (hole), `[a=b]` (match) or `[k]` (delimitation)",
            ),
        }
    }

    fn theta(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.bump().unwrap().span;
        self.expect(&TokKind::LParen, "`(` after `theta`")?;
        let (body, btree) = self.term()?;
        let end = self.expect(&TokKind::RParen, "`)` closing `theta`")?;
        let span = SourceSpan {
            start: start.start,
            end: end.end,
        };
        Ok((
            Term::Theta(Box::new(body)),
            SpanTree {
                span,
                children: vec![btree],
            },
        ))
    }

    fn priority_call(&mut self, up: bool) -> PResult<(Term, SpanTree)> {
        let start = self.bump().unwrap().span;
        self.expect(&TokKind::LParen, "`(`")?;
        let (body, btree) = self.term()?;
        self.expect(&TokKind::Comma, "`,` before the action name")?;
        let (n, _) = self.name()?;
        let end = self.expect(&TokKind::RParen, "`)`")?;
        let span = SourceSpan {
            start: start.start,
            end: end.end,
        };
        let term = if up {
            Term::Prioritize(Box::new(body), n)
        } else {
            Term::Deprioritize(Box::new(body), n)
        };
        Ok((
            term,
            SpanTree {
                span,
                children: vec![btree],
            },
        ))
    }

    fn kill(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.bump().unwrap().span;
        self.expect(&TokKind::LParen, "`(` after `kill`")?;
        let (k, _) = self.killer()?;
        let end = self.expect(&TokKind::RParen, "`)` closing `kill`")?;
        let span = SourceSpan {
            start: start.start,
            end: end.end,
        };
        Ok((
            Term::Kill(k),
            SpanTree {
                span,
                children: vec![],
            },
        ))
    }

    fn def_call(&mut self) -> PResult<(Term, SpanTree)> {
        let (id, start) = self.ident("a definition name")?;
        self.expect(&TokKind::Lt, "`<`")?;
        let mut args = Vec::new();
        if !matches!(self.peek(), Some(TokKind::Gt)) {
            loop {
                args.push(self.name()?.0);
                match self.peek() {
                    Some(TokKind::Comma) => {
                        self.bump();
                    }
                    _ => break,
                }
            }
        }
        let end = self.expect(&TokKind::Gt, "`>` closing the call")?;
        let span = SourceSpan {
            start: start.start,
            end: end.end,
        };
        Ok((
            Term::DefCall(id, args),
            SpanTree {
                span,
                children: vec![],
            },
        ))
    }

    /// A prefixed term: `guard? simpleprefix "." item`, with the send prefix
    /// also allowed bare (continuation `0`).
    fn prefixed(&mut self) -> PResult<(Term, SpanTree)> {
        let start = self.here();
        let (action, is_send) = self.prefix_action()?;
        match self.peek() {
            Some(TokKind::Dot) => {
                self.bump();
                if self.peek().is_none() {
                    return self.err(self.eof_span(), "expected term after prefix dot");
                }
                let (cont, ctree) = self.item()?;
                let span = SourceSpan {
                    start: start.start,
                    end: ctree.span.end,
                };
                Ok((
                    Term::prefix(action, cont),
                    SpanTree {
                        span,
                        children: vec![ctree],
                    },
                ))
            }
            _ if is_send => {
                let span = SourceSpan {
                    start: start.start,
                    end: self.prev_end(),
                };
                let nil = SpanTree {
                    span,
                    children: vec![],
                };
                Ok((
                    Term::prefix(action, Term::Nil),
                    SpanTree {
                        span,
                        children: vec![nil],
                    },
                ))
            }
            Some(k) => {
                let found = k.describe();
                self.err(
                    self.here(),
                    format!("expected `.` after prefix, found {found}"),
                )
            }
            None => self.err(self.eof_span(), "expected `.` after prefix"),
        }
    }

    fn prev_end(&self) -> usize {
        self.toks
            .get(self.pos.saturating_sub(1))
            .map(|t| t.span.end)
            .unwrap_or(0)
    }

    /// Returns the action and whether it was a send prefix.
    fn prefix_action(&mut self) -> PResult<(PrefixAction, bool)> {
        let guard = if matches!(self.peek(), Some(TokKind::LBrace)) {
            self.bump();
            let mut names = BTreeSet::new();
            if !matches!(self.peek(), Some(TokKind::RBrace)) {
                loop {
                    names.insert(self.name()?.0);
                    match self.peek() {
                        Some(TokKind::Comma) => {
                            self.bump();
                        }
                        _ => break,
                    }
                }
            }
            self.expect(&TokKind::RBrace, "`}` closing the guard")?;
            self.expect(&TokKind::Colon, "`:` after the guard")?;
            GuardSet(names)
        } else {
            GuardSet::empty()
        };

        match self.peek() {
            Some(TokKind::Ident(s)) if s == "tau" => {
                self.bump();
                Ok((PrefixAction::Tau { guard }, false))
            }
            Some(TokKind::Quote) => {
                self.bump();
                let level = self.opt_level();
                let (name, _) = self.name()?;
                Ok((
                    PrefixAction::Act {
                        name,
                        polarity: Polarity::Output,
                        level,
                        guard,
                    },
                    false,
                ))
            }
            Some(TokKind::Underscore) => {
                self.bump();
                let (name, _) = self.name()?;
                Ok((
                    PrefixAction::Act {
                        name,
                        polarity: Polarity::Input,
                        level: PriorityLevel::Prioritized,
                        guard,
                    },
                    false,
                ))
            }
            Some(TokKind::Ident(_)) => {
                let (first, span) = self.name()?;
                let mut subject = vec![first];
                while matches!(self.peek(), Some(TokKind::Colon)) {
                    self.bump();
                    subject.push(self.name()?.0);
                }
                match self.peek() {
                    Some(TokKind::Bang) => {
                        self.bump();
                        let payload = self.payload()?;
                        if !guard.is_empty() {
                            return self.err(span, "priority guards apply to ccs-style prefixes");
                        }
                        Ok((
                            PrefixAction::Send {
                                subject: Tuple(subject),
                                payload,
                            },
                            true,
                        ))
                    }
                    Some(TokKind::Question) => {
                        self.bump();
                        let pattern = self.pattern()?;
                        if !guard.is_empty() {
                            return self.err(span, "priority guards apply to ccs-style prefixes");
                        }
                        Ok((
                            PrefixAction::Receive {
                                subject: Tuple(subject),
                                pattern,
                            },
                            false,
                        ))
                    }
                    _ if subject.len() == 1 => Ok((
                        PrefixAction::Act {
                            name: subject.pop().unwrap(),
                            polarity: Polarity::Input,
                            level: PriorityLevel::Ordinary,
                            guard,
                        },
                        false,
                    )),
                    _ => self.err(self.here(), "expected `!` or `?` after a polyadic subject"),
                }
            }
            Some(k) => {
                let found = k.describe();
                self.err(self.here(), format!("expected a prefix, found {found}"))
            }
            None => self.err(self.eof_span(), "expected a prefix, found end of input"),
        }
    }

    fn opt_level(&mut self) -> PriorityLevel {
        if matches!(self.peek(), Some(TokKind::Underscore)) {
            self.bump();
            PriorityLevel::Prioritized
        } else {
            PriorityLevel::Ordinary
        }
    }

    fn payload(&mut self) -> PResult<Tuple> {
        self.expect(&TokKind::Lt, "`<` opening the payload")?;
        let mut names = vec![self.name()?.0];
        while matches!(self.peek(), Some(TokKind::Comma)) {
            self.bump();
            names.push(self.name()?.0);
        }
        self.expect(&TokKind::Gt, "`>` closing the payload")?;
        Ok(Tuple(names))
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        self.expect(&TokKind::LParen, "`(` opening the pattern")?;
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(TokKind::At) => {
                    self.bump();
                    items.push(PatternItem::Protected(self.name()?.0));
                }
                _ => items.push(PatternItem::Placeholder(self.name()?.0)),
            }
            match self.peek() {
                Some(TokKind::Comma) => {
                    self.bump();
                }
                _ => break,
            }
        }
        let rp = self.expect(&TokKind::RParen, "`)` closing the pattern")?;
        let pat = Pattern(items);
        if !pat.is_linear() {
            return self.err(rp, "pattern placeholders must be pairwise distinct");
        }
        Ok(pat)
    }
}
