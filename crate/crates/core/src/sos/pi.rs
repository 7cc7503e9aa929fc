//! Early-style rules for the pi family with match, polyadic synchronization
//! and pattern matching.
//!
//! Input prefixes are kept symbolic (`LateIn`) while walking the term, so
//! internal synchronisation can match an output tuple against the pattern
//! directly; only at the root are the surviving inputs instantiated over the
//! universe. Restriction turns a free output into a bound output (recording
//! the extruded names) and the scope is re-established around the target on
//! synchronisation.

use std::collections::BTreeSet;

use crate::names::Name;
use crate::subst::{apply_subst, Substitution};
use crate::term::{free_names_with_holes_erased, Pattern, PatternItem, PrefixAction, Term, Tuple};

use super::{Label, SosError, Step, Universe};

/// Match a pattern against a tuple: `None` if the lengths differ or a
/// protected name faces a different name; otherwise the least substitution
/// mapping each placeholder to its facing name.
pub fn match_pattern(pattern: &Pattern, tuple: &Tuple) -> Option<Substitution> {
    if pattern.len() != tuple.len() {
        return None;
    }
    let mut pairs: Vec<(Name, Name)> = Vec::new();
    for (item, actual) in pattern.0.iter().zip(tuple.0.iter()) {
        match item {
            PatternItem::Protected(n) => {
                if n != actual {
                    return None;
                }
            }
            PatternItem::Placeholder(n) => {
                if let Some((_, prev)) = pairs.iter().find(|(p, _)| p == n) {
                    if prev != actual {
                        return None;
                    }
                } else {
                    pairs.push((n.clone(), actual.clone()));
                }
            }
        }
    }
    Some(Substitution::from_pairs(pairs))
}

/// Re-applied context of a pending input: parallel siblings and restrictions
/// crossed on the way up, innermost first.
#[derive(Clone, Debug)]
pub(super) enum Frame {
    /// The input is the left component; the sibling sits on the right.
    ParLeft(Term),
    /// The input is the right component.
    ParRight(Term),
    Res(Name),
    Delim(crate::names::KillerLabel),
}

#[derive(Clone, Debug)]
pub(super) struct LateIn {
    pub subject: Tuple,
    pub pattern: Pattern,
    pub cont: Term,
    pub frames: Vec<Frame>,
}

impl LateIn {
    pub(super) fn rebuild(&self, subst: &Substitution) -> Term {
        let mut t = apply_subst(&self.cont, subst);
        for f in &self.frames {
            t = match f {
                Frame::ParLeft(sib) => Term::par(t, sib.clone()),
                Frame::ParRight(sib) => Term::par(sib.clone(), t),
                Frame::Res(n) => Term::Nu(n.clone(), Box::new(t)),
                Frame::Delim(k) => Term::Delimit(k.clone(), Box::new(t)),
            };
        }
        t
    }
}

/// A pending transition: either a concrete labelled step or a symbolic input.
pub(super) enum Raw {
    Step(Label, Term),
    In(LateIn),
}

pub(super) fn root_steps(
    t: &Term,
    universe: &Universe,
    allow_bang: bool,
) -> Result<Vec<Step>, SosError> {
    let mut effective = universe.names.clone();
    effective.extend(free_names_with_holes_erased(t));
    let raws = walk(t, allow_bang)?;
    Ok(expand(raws, &effective))
}

pub(super) fn expand(raws: Vec<Raw>, universe: &BTreeSet<Name>) -> Vec<Step> {
    let mut out = Vec::new();
    for raw in raws {
        match raw {
            Raw::Step(label, target) => out.push(Step { label, target }),
            Raw::In(li) => {
                for received in instantiations(&li.pattern, universe) {
                    let subst = match_pattern(&li.pattern, &received)
                        .expect("instantiations match by construction");
                    let target = li.rebuild(&subst);
                    out.push(Step {
                        label: Label::Receive {
                            subject: li.subject.clone(),
                            received,
                        },
                        target,
                    });
                }
            }
        }
    }
    out
}

/// All tuples over the universe that the pattern accepts: protected positions
/// are fixed, placeholder positions range over the whole universe.
fn instantiations(pattern: &Pattern, universe: &BTreeSet<Name>) -> Vec<Tuple> {
    let mut tuples: Vec<Vec<Name>> = vec![vec![]];
    for item in &pattern.0 {
        let candidates: Vec<&Name> = match item {
            PatternItem::Protected(n) => vec![n],
            PatternItem::Placeholder(_) => universe.iter().collect(),
        };
        let mut next = Vec::with_capacity(tuples.len() * candidates.len());
        for prefix in &tuples {
            for c in &candidates {
                let mut row = prefix.clone();
                row.push((*c).clone());
                next.push(row);
            }
        }
        tuples = next;
    }
    tuples.into_iter().map(Tuple).collect()
}

pub(super) fn walk(t: &Term, allow_bang: bool) -> Result<Vec<Raw>, SosError> {
    match t {
        Term::Nil => Ok(vec![]),
        Term::Prefix(PrefixAction::Tau { guard }, cont) => {
            debug_assert!(guard.is_empty());
            Ok(vec![Raw::Step(Label::tau(), cont.as_ref().clone())])
        }
        Term::Prefix(PrefixAction::Send { subject, payload }, cont) => Ok(vec![Raw::Step(
            Label::Send {
                subject: subject.clone(),
                payload: payload.clone(),
                extruded: BTreeSet::new(),
            },
            cont.as_ref().clone(),
        )]),
        Term::Prefix(PrefixAction::Receive { subject, pattern }, cont) => {
            Ok(vec![Raw::In(LateIn {
                subject: subject.clone(),
                pattern: pattern.clone(),
                cont: cont.as_ref().clone(),
                frames: vec![],
            })])
        }
        Term::Match(l, r, body) => {
            if l == r {
                walk(body, allow_bang)
            } else {
                Ok(vec![])
            }
        }
        Term::Sum(branches) => {
            let mut out = Vec::new();
            for b in branches {
                out.extend(walk(b, allow_bang)?);
            }
            Ok(out)
        }
        Term::Par(l, r) => {
            let ls = walk(l, allow_bang)?;
            let rs = walk(r, allow_bang)?;
            Ok(par_steps(ls, rs, l, r))
        }
        Term::Nu(z, body) => {
            let inner = walk(body, allow_bang)?;
            let mut out = Vec::new();
            for raw in inner {
                match raw {
                    Raw::Step(
                        Label::Send {
                            subject,
                            payload,
                            mut extruded,
                        },
                        tgt,
                    ) => {
                        if subject.contains(z) {
                            continue;
                        }
                        if payload.contains(z) && !extruded.contains(z) {
                            // Scope opening: the restriction moves to the label.
                            extruded.insert(z.clone());
                            out.push(Raw::Step(
                                Label::Send {
                                    subject,
                                    payload,
                                    extruded,
                                },
                                tgt,
                            ));
                        } else {
                            out.push(Raw::Step(
                                Label::Send {
                                    subject,
                                    payload,
                                    extruded,
                                },
                                Term::Nu(z.clone(), Box::new(tgt)),
                            ));
                        }
                    }
                    Raw::Step(label @ Label::Tau { .. }, tgt) => {
                        out.push(Raw::Step(label, Term::Nu(z.clone(), Box::new(tgt))));
                    }
                    Raw::Step(other, _) => {
                        unreachable!("unexpected label under restriction: {other}")
                    }
                    Raw::In(mut li) => {
                        if li.subject.contains(z) {
                            continue;
                        }
                        li.frames.push(Frame::Res(z.clone()));
                        out.push(Raw::In(li));
                    }
                }
            }
            Ok(out)
        }
        Term::Bang(body) => {
            if !allow_bang {
                return Ok(vec![]);
            }
            let base = walk(body, allow_bang)?;
            let mut out = Vec::new();
            for raw in &base {
                match raw {
                    Raw::Step(label, tgt) => out.push(Raw::Step(
                        label.clone(),
                        Term::par(tgt.clone(), Term::Bang(body.clone())),
                    )),
                    Raw::In(li) => {
                        let mut li = li.clone();
                        li.frames.push(Frame::ParLeft(Term::Bang(body.clone())));
                        out.push(Raw::In(li));
                    }
                }
            }
            // Two copies communicating: !P --tau--> (P' | P''s) | !P.
            for send in &base {
                if let Raw::Step(
                    Label::Send {
                        subject,
                        payload,
                        extruded,
                    },
                    out_tgt,
                ) = send
                {
                    for input in &base {
                        if let Raw::In(li) = input {
                            if li.subject == *subject {
                                if let Some(subst) = match_pattern(&li.pattern, payload) {
                                    let pair = close_scope(
                                        Term::par(out_tgt.clone(), li.rebuild(&subst)),
                                        extruded,
                                    );
                                    out.push(Raw::Step(
                                        Label::tau(),
                                        Term::par(pair, Term::Bang(body.clone())),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
        other => Err(SosError::Unsupported(format!("pi semantics: {other}"))),
    }
}

/// Interleaving plus communication for one par node. Shared with the cows
/// engine, which layers kill handling on top.
pub(super) fn par_steps(ls: Vec<Raw>, rs: Vec<Raw>, l: &Term, r: &Term) -> Vec<Raw> {
    let mut out = Vec::new();
    for raw in &ls {
        match raw {
            Raw::Step(label, tgt) => {
                if let Label::Send { extruded, .. } = label {
                    debug_assert!(
                        extruded
                            .iter()
                            .all(|e| !free_names_with_holes_erased(r).contains(e)),
                        "extruded name free in sibling"
                    );
                }
                out.push(Raw::Step(label.clone(), Term::par(tgt.clone(), r.clone())));
            }
            Raw::In(li) => {
                let mut li = li.clone();
                li.frames.push(Frame::ParLeft(r.clone()));
                out.push(Raw::In(li));
            }
        }
    }
    for raw in &rs {
        match raw {
            Raw::Step(label, tgt) => {
                out.push(Raw::Step(label.clone(), Term::par(l.clone(), tgt.clone())))
            }
            Raw::In(li) => {
                let mut li = li.clone();
                li.frames.push(Frame::ParRight(l.clone()));
                out.push(Raw::In(li));
            }
        }
    }
    // Communication, in both orientations. The input side is instantiated by
    // the payload directly, so internal steps never consult the universe.
    for (sender, receiver, sender_left) in [(&ls, &rs, true), (&rs, &ls, false)] {
        for s in sender.iter() {
            if let Raw::Step(
                Label::Send {
                    subject,
                    payload,
                    extruded,
                },
                out_tgt,
            ) = s
            {
                for i in receiver.iter() {
                    if let Raw::In(li) = i {
                        if li.subject == *subject {
                            if let Some(subst) = match_pattern(&li.pattern, payload) {
                                let in_tgt = li.rebuild(&subst);
                                let pair = if sender_left {
                                    Term::par(out_tgt.clone(), in_tgt)
                                } else {
                                    Term::par(in_tgt, out_tgt.clone())
                                };
                                out.push(Raw::Step(Label::tau(), close_scope(pair, extruded)));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Re-establish the scope of extruded names over a communication target.
fn close_scope(t: Term, extruded: &BTreeSet<Name>) -> Term {
    let mut t = t;
    for e in extruded.iter().rev() {
        t = Term::Nu(e.clone(), Box::new(t));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sos::{transitions_pimpm, Step};
    use crate::subst::{alpha_canonical, alpha_eq};
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    fn steps_of(src: &str) -> Vec<Step> {
        transitions_pimpm(&t(src)).unwrap().into_iter().collect()
    }

    #[test]
    fn match_pattern_cases() {
        let pat_protected = Pattern(vec![PatternItem::Protected(Name::new("b"))]);
        assert!(match_pattern(&pat_protected, &Tuple::single(Name::new("a"))).is_none());
        assert!(
            match_pattern(&pat_protected, &Tuple::single(Name::new("b")))
                .unwrap()
                .is_identity()
        );

        let pat_var = Pattern(vec![PatternItem::Placeholder(Name::new("x"))]);
        let s = match_pattern(&pat_var, &Tuple::single(Name::new("a"))).unwrap();
        assert_eq!(s.apply_name(&Name::new("x")), Name::new("a"));

        let pat = Pattern(vec![
            PatternItem::Placeholder(Name::new("x")),
            PatternItem::Protected(Name::new("b")),
            PatternItem::Placeholder(Name::new("y")),
        ]);
        let tup = Tuple(vec![Name::new("n"), Name::new("b"), Name::new("m")]);
        let s = match_pattern(&pat, &tup).unwrap();
        assert_eq!(s.apply_name(&Name::new("x")), Name::new("n"));
        assert_eq!(s.apply_name(&Name::new("y")), Name::new("m"));
        // Length mismatch.
        assert!(match_pattern(&pat, &Tuple(vec![Name::new("n")])).is_none());
    }

    #[test]
    fn example_trace_match_unblocking() {
        // The input instantiates a with b, which satisfies the match.
        let steps = steps_of("(new x)(x?(a).[a=b] y!<c> | x!<b>)");
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].label, Label::tau());
        assert!(alpha_eq(&steps[0].target, &t("(new x)([b=b] y!<c> | 0)")));

        let next = transitions_pimpm(&steps[0].target).unwrap();
        assert_eq!(next.len(), 1);
        let s = next.iter().next().unwrap();
        assert_eq!(s.label.to_string(), "y!<c>");
        assert!(alpha_eq(&s.target, &t("(new x)(0 | 0)")));
    }

    #[test]
    fn failed_match_blocks() {
        assert!(steps_of("[a=b] y!<c>").is_empty());
        assert_eq!(steps_of("[a=a] y!<c>").len(), 1);
    }

    #[test]
    fn polyadic_subjects_must_agree() {
        assert!(steps_of("(new z)(z:a!<d> | z:b?(w).y!<c>)").is_empty());
        let steps = steps_of("(new z)(z:a!<d> | z:a?(w).y!<c>)");
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].label, Label::tau());
    }

    #[test]
    fn protected_pattern_gates_sync() {
        let steps = steps_of("(new z)(z!<b> | z?(@b).y!<c>)");
        assert_eq!(steps.len(), 1);
        assert!(alpha_eq(&steps[0].target, &t("(new z)(0 | y!<c>)")));
        assert!(steps_of("(new z)(z!<a> | z?(@b).y!<c>)").is_empty());
    }

    #[test]
    fn input_instantiation_universe() {
        // fn = {x}; pool contributes one reserved name.
        let steps = steps_of("x?(y).0");
        let labels: BTreeSet<String> = steps.iter().map(|s| s.label.to_string()).collect();
        assert!(labels.contains("x?(x)"));
        assert!(labels.contains("x?(~0)"));
        assert_eq!(steps.len(), 2);
    }

    #[test]
    fn restriction_blocks_subjects() {
        assert!(steps_of("(new x) x?(y).0").is_empty());
        assert!(steps_of("(new x) x!<a>").is_empty());
    }

    #[test]
    fn scope_extrusion() {
        let steps = steps_of("(new z) x!<z>");
        assert_eq!(steps.len(), 1);
        match &steps[0].label {
            Label::Send {
                extruded, payload, ..
            } => {
                assert_eq!(extruded.len(), 1);
                assert_eq!(payload.0.len(), 1);
                assert!(extruded.contains(&payload.0[0]));
            }
            other => panic!("expected bound output, got {other}"),
        }
        assert_eq!(steps[0].target, Term::Nil);
    }

    #[test]
    fn scope_closes_on_sync() {
        let steps = steps_of("(new z)(x!<z>.z?(w).0) | x?(v).v!<a>");
        let taus: Vec<&Step> = steps.iter().filter(|s| s.label == Label::tau()).collect();
        assert_eq!(taus.len(), 1);
        // The bound name is re-restricted around both components.
        assert!(alpha_eq(&taus[0].target, &t("(new z)(z?(w).0 | z!<a>)")));
    }

    #[test]
    fn bang_unfolds_once_per_step() {
        let steps = steps_of("!a?(x).0");
        assert!(!steps.is_empty());
        for s in &steps {
            assert!(alpha_eq(&s.target, &t("0 | !a?(x).0")));
        }
    }

    #[test]
    fn bang_self_communication() {
        let steps = steps_of("!(a!<n> + a?(x).x!<x>)");
        assert!(steps.iter().any(|s| s.label == Label::tau()));
    }

    #[test]
    fn tau_steps_do_not_depend_on_universe() {
        let term = alpha_canonical(&t("(new x)(x?(a).[a=b] y!<c> | x!<b>)"));
        let small = super::super::transitions_with_universe(
            &term,
            &crate::profile::CalculusProfile::PiMpm,
            &Universe {
                names: [Name::new("q")].into_iter().collect(),
            },
        )
        .unwrap();
        let big = transitions_pimpm(&term).unwrap();
        assert_eq!(small, big);
    }
}

#[cfg(test)]
mod branching_tests {
    use super::*;
    use crate::sos::transitions_pimpm;
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    #[test]
    fn sum_of_input_and_output() {
        let steps = transitions_pimpm(&t("x?(y).0 + z!<w>")).unwrap();
        assert!(steps.iter().any(|s| s.label.to_string() == "z!<w>"));
        assert!(steps
            .iter()
            .any(|s| matches!(s.label, Label::Receive { .. })));
    }

    #[test]
    fn arity_mismatch_blocks_sync() {
        assert!(transitions_pimpm(&t("(new z)(z!<a,b> | z?(w).y!<c>)"))
            .unwrap()
            .is_empty());
        assert_eq!(
            transitions_pimpm(&t("(new z)(z!<a,b> | z?(v,w).y!<c>)"))
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn competing_outputs_both_sync() {
        let steps = transitions_pimpm(&t("(new z)((z!<a> | z!<b>) | z?(w).w!<w>)")).unwrap();
        let taus: Vec<_> = steps.iter().filter(|s| s.label == Label::tau()).collect();
        assert_eq!(taus.len(), 2);
        let targets: Vec<String> = taus.iter().map(|s| s.target.to_string()).collect();
        assert!(targets.iter().any(|t| t.contains("a!<a>")), "{targets:?}");
        assert!(targets.iter().any(|t| t.contains("b!<b>")), "{targets:?}");
    }

    #[test]
    fn repeated_payload_name_matches_repeated_placeholderless_pattern() {
        // Protected positions may repeat; both must face the same literal.
        let steps = transitions_pimpm(&t("(new z)(z!<b,b> | z?(@b,@b).y!<c>)")).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(transitions_pimpm(&t("(new z)(z!<a,b> | z?(@b,@b).y!<c>)"))
            .unwrap()
            .is_empty());
    }
}
