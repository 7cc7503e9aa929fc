//! Parser and pretty-printer for the unified term syntax.
//!
//! The grammar (whitespace-insensitive, `#` line comments):
//!
//! ```text
//! term    := sum ;  sum := par ("+" par)* ;  par := unary ("|" unary)*
//! unary   := item postfix*
//! postfix := "\" "{" lab ("," lab)* "}"            # restriction
//!          | "[" name "->" name ("," ...)* "]"     # relabelling
//! item    := "0" | prefix "." item | "(new" name+ ")" unary
//!          | "!" unary | "[" name "=" name "]" item
//!          | "theta(" term ")" | "up(" term "," name ")" | "down(" term "," name ")"
//!          | "kill(" klabel ")" | "[" klabel "]" item
//!          | ident "<" (name ("," name)*)? ">"     # definition call
//!          | send-prefix                           # bare output, continuation 0
//!          | "(" term ")" | "[_" nat "]"
//! prefix  := guard? simpleprefix ;  guard := "{" (name ("," name)*)? "}" ":"
//! simpleprefix := "tau" | lab | "'" lab | receive-prefix | send-prefix
//! lab     := "_"? ident                            # "_" marks the prioritized level
//! subject := ident (":" ident)*                    # polyadic-synchronization tuple
//! send-prefix    := subject "!" "<" name ("," name)* ">"
//! receive-prefix := subject "?" "(" patitem ("," patitem)* ")"
//! patitem := ident | "@" ident                     # "@" marks a protected name
//! ```
//!
//! Precedence: prefix-dot > restriction/relabelling > `|` > `+`.
//!
//! Machine-generated names print as `#i` (canonical bound names), `~i`
//! (input-instantiation candidates) and `t#i` (capture-avoiding renames);
//! they cannot be written in source terms.

mod lex;
mod parse;
pub(crate) mod pretty;

use std::fmt;

use thiserror::Error;

use crate::profile::{validate, CalculusProfile, TermPath};
use crate::term::Term;

pub use pretty::{pretty, pretty_action};

/// Byte offsets into the source input.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub span: SourceSpan,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (at bytes {}..{})",
            self.message, self.span.start, self.span.end
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("{0}")]
    Parse(Diagnostic),
    #[error("profile violation{}: {}", if .0.len() > 1 { "s" } else { "" },
            .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Profile(Vec<Diagnostic>),
}

impl SurfaceError {
    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        match self {
            SurfaceError::Parse(d) => vec![d],
            SurfaceError::Profile(ds) => ds.iter().collect(),
        }
    }
}

/// Span bookkeeping produced alongside parsing; children align with
/// [`Term::children`].
#[derive(Debug, Clone)]
pub(crate) struct SpanTree {
    pub span: SourceSpan,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn at_path(&self, path: &TermPath) -> SourceSpan {
        let mut node = self;
        for &i in path {
            match node.children.get(i) {
                Some(c) => node = c,
                None => break,
            }
        }
        node.span
    }
}

/// Parse a term and validate it against `profile`. Profile violations are
/// reported with the spans of the offending subterms.
pub fn parse_term(src: &str, profile: &CalculusProfile) -> Result<Term, SurfaceError> {
    let (term, spans) = parse::parse(src).map_err(SurfaceError::Parse)?;
    let violations = validate(&term, profile);
    if violations.is_empty() {
        return Ok(term);
    }
    let diags = violations
        .into_iter()
        .map(|v| Diagnostic {
            span: spans.at_path(&v.path),
            message: v.message,
        })
        .collect();
    Err(SurfaceError::Profile(diags))
}

/// Parse without profile validation (holes allowed anywhere). Used for
/// contexts and wherever the profile is checked separately.
pub fn parse_unchecked(src: &str) -> Result<Term, SurfaceError> {
    parse::parse(src)
        .map(|(t, _)| t)
        .map_err(SurfaceError::Parse)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", pretty(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::{Name, Polarity, PriorityLevel};
    use crate::profile::DefinitionEnv;
    use crate::subst::alpha_eq;
    use crate::term::{GuardSet, PatternItem, PrefixAction, Term, Tuple};

    fn roundtrip(src: &str) {
        let t = parse_unchecked(src).unwrap();
        let printed = pretty(&t);
        let back = parse_unchecked(&printed)
            .unwrap_or_else(|e| panic!("pretty output `{printed}` failed to parse: {e}"));
        assert!(
            alpha_eq(&t, &back),
            "round trip changed `{src}` -> `{printed}`"
        );
    }

    #[test]
    fn parses_pi_example_context() {
        let t = parse_term("(new x)(x?(a).[a=b] y!<c> | x!<b>)", &CalculusProfile::Pi);
        match t {
            Ok(Term::Nu(x, body)) => {
                assert_eq!(x, Name::new("x"));
                assert!(matches!(*body, Term::Par(_, _)));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn parses_theta_sum_with_nil() {
        let t = parse_unchecked("theta(a.0 + 0)").unwrap();
        assert_eq!(
            t,
            Term::Theta(Box::new(Term::Sum(vec![
                Term::prefix(
                    PrefixAction::Act {
                        name: Name::new("a"),
                        polarity: Polarity::Input,
                        level: PriorityLevel::Ordinary,
                        guard: GuardSet::empty(),
                    },
                    Term::Nil
                ),
                Term::Nil
            ])))
        );
    }

    #[test]
    fn parse_error_after_dot_has_span() {
        let err = parse_unchecked("a.").unwrap_err();
        match err {
            SurfaceError::Parse(d) => {
                assert!(d.message.contains("expected term after prefix dot"));
                assert!(d.span.start <= 2 && d.span.end <= 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn profile_violation_has_span() {
        let err = parse_term("a.theta(b.0)", &CalculusProfile::ccs()).unwrap_err();
        match err {
            SurfaceError::Profile(ds) => {
                assert_eq!(ds.len(), 1);
                // Points at `theta(b.0)`, not the whole term.
                assert_eq!(ds[0].span.start, 2);
                assert_eq!(ds[0].span.end, 12);
            }
            other => panic!("expected profile error, got {other:?}"),
        }
    }

    #[test]
    fn bccsp_superset_of_plain_prefixes() {
        let order = crate::profile::PriorityOrder::empty();
        assert!(parse_term("a.0 + tau.0", &CalculusProfile::BccspTheta { order }).is_ok());
    }

    #[test]
    fn restriction_binds_tighter_than_par_and_sum() {
        let t = parse_unchecked("a.0 | b.0\\{c}").unwrap();
        match t {
            Term::Par(l, r) => {
                assert!(matches!(*l, Term::Prefix(_, _)));
                assert!(matches!(*r, Term::RestrictSet(_, _)));
            }
            other => panic!("unexpected: {other:?}"),
        }
        let t = parse_unchecked("a.b.0\\{c}").unwrap();
        match t {
            Term::RestrictSet(_, body) => assert!(matches!(*body, Term::Prefix(_, _))),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn prioritized_labels() {
        let t = parse_unchecked("(_a.0 | [_1])\\{_a} + 'b.0").unwrap();
        assert!(matches!(t, Term::Sum(_)));
        roundtrip("(_a.0 | '_a.0)\\{_a} + 'b.0");
    }

    #[test]
    fn pattern_linearity_rejected() {
        let err = parse_unchecked("x?(y, y).0").unwrap_err();
        assert!(err.to_string().contains("pairwise distinct"));
        assert!(parse_unchecked("x?(y, @y).0").is_ok());
    }

    #[test]
    fn reserved_words_rejected_as_names() {
        assert!(parse_unchecked("tau!<a>").is_err());
        assert!(parse_unchecked("(new tau) 0").is_err());
        assert!(parse_unchecked("kill(new)").is_err());
    }

    #[test]
    fn roundtrip_corpus_shapes() {
        for src in [
            "0",
            "a.0",
            "'a.0",
            "tau.0",
            "a.0 + b.0 + tau.0",
            "a.0 | 'a.0",
            "(a.0 | 'a.0)\\{a}",
            "(new x)(x?(a).[a=b] y!<c> | x!<b>)",
            "(new z)(z:a!<d> | z:b?(w).y!<c>)",
            "(new z)(z!<a> | z?(@b).y!<c>)",
            "theta(a.0 + 0)",
            "theta(a.0 + tau.0)",
            "((a.0 + {a}:b.'c.0) | 'b.0 | 0)\\{a,b}",
            "{a,b}:tau.0",
            "(_a.0 | '_a.0)\\{_a} + 'b.0",
            "up((_a.0 | 0)\\{_a} + 'b.0, b)",
            "down(a.0, b)",
            "[k](kill(k) | a!<n>)",
            "[k]([j](b?(x).0) | a!<n,m>)",
            "!a?(x).x!<x>",
            "x!<a>.y!<b>",
            "A<>",
            "A<a,b>",
            "a.0[a->b, c->d]",
            "(a.0 | b.0)[a->b]\\{b}",
            "x?(u,@v,w).u!<w>",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn roundtrip_contexts() {
        for src in [
            "[_1]",
            "theta(a.0 + [_1])",
            "(new x)(x?(a).[_1] | x!<b>)",
            "((a.0 + {a}:b.'c.0) | 'b.0 | [_1])\\{a,b}",
            "(_a.0 | [_1])\\{_a} + 'b.0",
            "up((_a.0 | [_1])\\{_a} + 'b.0, b)",
            "[k]([_1] | a!<n>)",
            "[_1] | [_2]",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn pretty_structure_is_preserved_exactly() {
        // Nested sums/pars keep their association through parentheses.
        let t = Term::Sum(vec![
            Term::Sum(vec![Term::Nil, Term::Nil]),
            Term::par(Term::Nil, Term::par(Term::Nil, Term::Nil)),
        ]);
        let printed = pretty(&t);
        let back = parse_unchecked(&printed).unwrap();
        assert_eq!(t, back, "printed as `{printed}`");
    }

    #[test]
    fn pretty_machine_names() {
        let t = crate::subst::alpha_canonical(&parse_unchecked("(new z) z!<a>").unwrap());
        assert_eq!(pretty(&t), "(new #0) #0!<a>");
    }

    #[test]
    fn parse_with_definitions() {
        let mut env = DefinitionEnv::empty();
        let body = parse_unchecked("a.A<a>").unwrap();
        env.define("A", vec![Name::new("a")], body).unwrap();
        let p = CalculusProfile::Ccs { env };
        assert!(parse_term("A<b> | 'a.0", &p).is_ok());
    }

    #[test]
    fn spans_stay_within_input() {
        for src in [
            "a.", "x?(", ")", "a..b", "theta(", "[_0]", "{a:tau.0", "a.0 + ", "'",
        ] {
            if let Err(e) = parse_unchecked(src) {
                for d in e.diagnostics() {
                    assert!(d.span.start <= src.len() && d.span.end <= src.len());
                }
            }
        }
    }

    #[test]
    fn send_without_continuation_is_nil() {
        assert_eq!(
            parse_unchecked("x!<b>").unwrap(),
            Term::prefix(
                PrefixAction::Send {
                    subject: Tuple::single(Name::new("x")),
                    payload: Tuple::single(Name::new("b")),
                },
                Term::Nil
            )
        );
    }

    #[test]
    fn receive_requires_dot() {
        assert!(parse_unchecked("x?(a)").is_err());
        assert!(parse_unchecked("x?(a).0").is_ok());
    }

    #[test]
    fn protected_pattern_items() {
        let t = parse_unchecked("z?(@b).0").unwrap();
        match t {
            Term::Prefix(PrefixAction::Receive { pattern, .. }, _) => {
                assert_eq!(pattern.0, vec![PatternItem::Protected(Name::new("b"))]);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn comments_and_whitespace() {
        let t = parse_unchecked("a.0 # trailing comment\n + b.0").unwrap();
        assert!(matches!(t, Term::Sum(ref bs) if bs.len() == 2));
    }
}
