//! Minimal-parenthesization printer. `parse(pretty(t))` is alpha-equivalent
//! to `t` (structurally equal, in fact: the printer never renames).

use std::fmt::Write;

use crate::names::{Polarity, PriorityLevel};
use crate::term::{GuardSet, PatternItem, PrefixAction, Term};

/// Precedence levels, loosest first: sum < par < postfix < item.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    Par,
    Postfix,
    Item,
}

fn prec_of(t: &Term) -> Prec {
    match t {
        Term::Sum(_) => Prec::Sum,
        Term::Par(_, _) => Prec::Par,
        Term::RestrictSet(_, _) | Term::Relabel(_, _) => Prec::Postfix,
        _ => Prec::Item,
    }
}

pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    go(t, Prec::Sum, &mut out);
    out
}

fn go(t: &Term, min: Prec, out: &mut String) {
    let wrap = prec_of(t) < min;
    if wrap {
        out.push('(');
        go(t, Prec::Sum, out);
        out.push(')');
        return;
    }
    match t {
        Term::Nil => out.push('0'),
        Term::Prefix(act, cont) => {
            write_action(act, out);
            if matches!(act, PrefixAction::Send { .. }) && **cont == Term::Nil {
                return;
            }
            out.push('.');
            go(cont, Prec::Item, out);
        }
        Term::Sum(bs) => {
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                go(b, Prec::Par, out);
            }
        }
        Term::Par(l, r) => {
            // Left-associative: the left child may stay flat.
            go(l, Prec::Par, out);
            out.push_str(" | ");
            go(r, Prec::Postfix, out);
        }
        Term::Nu(n, body) => {
            let mut names = vec![n];
            let mut inner: &Term = body;
            while let Term::Nu(n2, b2) = inner {
                names.push(n2);
                inner = b2;
            }
            out.push_str("(new");
            for n in names {
                let _ = write!(out, " {n}");
            }
            out.push(')');
            // Bodies that get parenthesized read fine without a space.
            if prec_of(inner) >= Prec::Item {
                out.push(' ');
            }
            go(inner, Prec::Item, out);
        }
        Term::RestrictSet(labels, body) => {
            go_postfix_body(body, out);
            out.push_str("\\{");
            for (i, (n, lvl)) in labels.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if lvl.is_prioritized() {
                    out.push('_');
                }
                let _ = write!(out, "{n}");
            }
            out.push('}');
        }
        Term::Relabel(body, map) => {
            go_postfix_body(body, out);
            out.push('[');
            for (i, (from, to)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{from}->{to}");
            }
            out.push(']');
        }
        Term::Bang(body) => {
            out.push('!');
            go(body, Prec::Item, out);
        }
        Term::Match(l, r, body) => {
            let _ = write!(out, "[{l}={r}] ");
            go(body, Prec::Item, out);
        }
        Term::DefCall(id, args) => {
            out.push_str(id);
            out.push('<');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{a}");
            }
            out.push('>');
        }
        Term::Theta(body) => {
            out.push_str("theta(");
            go(body, Prec::Sum, out);
            out.push(')');
        }
        Term::Prioritize(body, n) => {
            out.push_str("up(");
            go(body, Prec::Sum, out);
            let _ = write!(out, ", {n})");
        }
        Term::Deprioritize(body, n) => {
            out.push_str("down(");
            go(body, Prec::Sum, out);
            let _ = write!(out, ", {n})");
        }
        Term::Kill(k) => {
            let _ = write!(out, "kill({k})");
        }
        Term::Delimit(k, body) => {
            let _ = write!(out, "[{k}]");
            go(body, Prec::Item, out);
        }
        Term::Hole(i) => {
            let _ = write!(out, "[_{i}]");
        }
    }
}

/// Render the body of a postfix operator. Bodies whose printed form ends in
/// an open `(new ..)`/`!` scope would grab a following postfix during
/// reparsing (those constructs take a full unary as body), so they get
/// parenthesized even though their precedence alone would not require it.
fn go_postfix_body(body: &Term, out: &mut String) {
    if ends_open(body) {
        out.push('(');
        go(body, Prec::Sum, out);
        out.push(')');
    } else {
        go(body, Prec::Postfix, out);
    }
}

fn ends_open(t: &Term) -> bool {
    match t {
        Term::Nu(_, _) | Term::Bang(_) => true,
        Term::Prefix(act, cont) => {
            !(matches!(act, PrefixAction::Send { .. }) && **cont == Term::Nil) && ends_open(cont)
        }
        Term::Match(_, _, body) | Term::Delimit(_, body) => ends_open(body),
        _ => false,
    }
}

pub(crate) fn write_guard(g: &GuardSet, out: &mut String) {
    if g.is_empty() {
        return;
    }
    out.push('{');
    for (i, n) in g.0.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{n}");
    }
    out.push_str("}:");
}

fn write_action(act: &PrefixAction, out: &mut String) {
    match act {
        PrefixAction::Tau { guard } => {
            write_guard(guard, out);
            out.push_str("tau");
        }
        PrefixAction::Act {
            name,
            polarity,
            level,
            guard,
        } => {
            write_guard(guard, out);
            if *polarity == Polarity::Output {
                out.push('\'');
            }
            if *level == PriorityLevel::Prioritized {
                out.push('_');
            }
            let _ = write!(out, "{name}");
        }
        PrefixAction::Send { subject, payload } => {
            for (i, n) in subject.0.iter().enumerate() {
                if i > 0 {
                    out.push(':');
                }
                let _ = write!(out, "{n}");
            }
            out.push_str("!<");
            for (i, n) in payload.0.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{n}");
            }
            out.push('>');
        }
        PrefixAction::Receive { subject, pattern } => {
            for (i, n) in subject.0.iter().enumerate() {
                if i > 0 {
                    out.push(':');
                }
                let _ = write!(out, "{n}");
            }
            out.push_str("?(");
            for (i, it) in pattern.0.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match it {
                    PatternItem::Placeholder(n) => {
                        let _ = write!(out, "{n}");
                    }
                    PatternItem::Protected(n) => {
                        let _ = write!(out, "@{n}");
                    }
                }
            }
            out.push(')');
        }
    }
}

/// Render a prefix action exactly as the grammar spells it; also used for
/// printed transition labels.
pub fn pretty_action(act: &PrefixAction) -> String {
    let mut out = String::new();
    write_action(act, &mut out);
    out
}
