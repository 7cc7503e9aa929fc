//! Rules for the orchestration fragment: tuple communication, kill signals
//! and scope delimitation with eager kills.
//!
//! A kill step bubbling through a par node terminates the sibling
//! (`P|Q --kill--> P' | halt(Q)`). The delimiter of the matching label turns
//! the kill into an internal step, and eagerly: while a kill for its label is
//! derivable, nothing else inside the scope may move.

use crate::term::{PrefixAction, Term};

use super::pi::{par_steps, Frame, LateIn, Raw};
use super::{Label, SosError, Step, Universe};

pub(super) fn root_steps(t: &Term, universe: &Universe) -> Result<Vec<Step>, SosError> {
    let mut effective = universe.names.clone();
    effective.extend(crate::term::free_names_with_holes_erased(t));
    let raws = walk(t)?;
    Ok(super::pi::expand(raws, &effective))
}

fn walk(t: &Term) -> Result<Vec<Raw>, SosError> {
    match t {
        Term::Nil => Ok(vec![]),
        Term::Kill(k) => Ok(vec![Raw::Step(Label::Kill(k.clone()), Term::Nil)]),
        Term::Prefix(PrefixAction::Send { subject, payload }, cont) => {
            debug_assert_eq!(**cont, Term::Nil);
            Ok(vec![Raw::Step(
                Label::Send {
                    subject: subject.clone(),
                    payload: payload.clone(),
                    extruded: Default::default(),
                },
                cont.as_ref().clone(),
            )])
        }
        Term::Prefix(PrefixAction::Receive { subject, pattern }, cont) => {
            Ok(vec![Raw::In(LateIn {
                subject: subject.clone(),
                pattern: pattern.clone(),
                cont: cont.as_ref().clone(),
                frames: vec![],
            })])
        }
        Term::Par(l, r) => {
            let ls = walk(l)?;
            let rs = walk(r)?;
            // Kill steps terminate the sibling; everything else interleaves
            // and synchronises as in the pi engine.
            let (l_kills, ls): (Vec<Raw>, Vec<Raw>) = split_kills(ls);
            let (r_kills, rs): (Vec<Raw>, Vec<Raw>) = split_kills(rs);
            let mut out = par_steps(ls, rs, l, r);
            for raw in l_kills {
                if let Raw::Step(label, tgt) = raw {
                    out.push(Raw::Step(label, Term::par(tgt, halt(r))));
                }
            }
            for raw in r_kills {
                if let Raw::Step(label, tgt) = raw {
                    out.push(Raw::Step(label, Term::par(halt(l), tgt)));
                }
            }
            Ok(out)
        }
        Term::Delimit(k, body) => {
            let inner = walk(body)?;
            let has_matching_kill = inner
                .iter()
                .any(|raw| matches!(raw, Raw::Step(Label::Kill(k2), _) if k2 == k));
            let mut out = Vec::new();
            if has_matching_kill {
                // Eagerness: only the kill fires, relabelled as internal.
                for raw in inner {
                    if let Raw::Step(Label::Kill(k2), tgt) = raw {
                        if k2 == *k {
                            out.push(Raw::Step(
                                Label::tau(),
                                Term::Delimit(k.clone(), Box::new(tgt)),
                            ));
                        }
                    }
                }
            } else {
                for raw in inner {
                    match raw {
                        Raw::Step(label, tgt) => {
                            out.push(Raw::Step(label, Term::Delimit(k.clone(), Box::new(tgt))))
                        }
                        Raw::In(mut li) => {
                            li.frames.push(Frame::Delim(k.clone()));
                            out.push(Raw::In(li));
                        }
                    }
                }
            }
            Ok(out)
        }
        other => Err(SosError::Unsupported(format!("cows semantics: {other}"))),
    }
}

fn split_kills(raws: Vec<Raw>) -> (Vec<Raw>, Vec<Raw>) {
    raws.into_iter()
        .partition(|r| matches!(r, Raw::Step(Label::Kill(_), _)))
}

/// Immediate termination of every concurrent process of the fragment;
/// delimitation wrappers survive around the terminated body.
pub fn halt(t: &Term) -> Term {
    match t {
        Term::Delimit(k, body) => Term::Delimit(k.clone(), Box::new(halt(body))),
        _ => Term::Nil,
    }
}


#[cfg(test)]
mod namespace_tests {
    use crate::sos::transitions_cows;
    use crate::surface::parse_unchecked;

    #[test]
    fn killer_labels_never_block_subjects() {
        // The delimiter label `a` shares its text with the channel name `a`;
        // the namespaces are disjoint, so the output still fires.
        let t = parse_unchecked("[a](a!<n>)").unwrap();
        let steps = transitions_cows(&t).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps.iter().next().unwrap().label.to_string(), "a!<n>");
    }
}
