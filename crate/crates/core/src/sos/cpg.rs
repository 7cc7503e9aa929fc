//! Priority-guard rules. Labels have the shape `S:mu`; a guarded step fires
//! only if the parallel environment does not offer a co-action of the guard.
//!
//! Offers are computed unconditionally (guard side-conditions of the offered
//! actions are ignored), which keeps the side-conditions non-circular.
//! Restriction blocks the action itself but leaves guard sets untouched.

use std::collections::BTreeSet;

use crate::names::{Name, Polarity, PriorityLevel};
use crate::profile::DefinitionEnv;
use crate::term::{GuardSet, PrefixAction, Term};

use super::{Label, SosError, Step, MAX_UNFOLD};

pub(super) fn root_steps(t: &Term, env: &DefinitionEnv) -> Result<Vec<Step>, SosError> {
    steps(t, env, false, 0)
}

pub(super) fn offers(
    t: &Term,
    env: &DefinitionEnv,
) -> Result<BTreeSet<(Name, Polarity)>, SosError> {
    let raw = steps(t, env, true, 0)?;
    Ok(raw
        .into_iter()
        .filter_map(|s| match s.label {
            Label::Act { name, polarity, .. } => Some((name, polarity)),
            _ => None,
        })
        .collect())
}

/// A guard passes against a sibling iff the sibling offers no co-action of a
/// guard member (guards name input actions; their co-actions are outputs).
fn guard_passes(guard: &GuardSet, sibling_offers: &BTreeSet<(Name, Polarity)>) -> bool {
    guard
        .0
        .iter()
        .all(|n| !sibling_offers.contains(&(n.clone(), Polarity::Output)))
}

fn steps(t: &Term, env: &DefinitionEnv, raw: bool, depth: u32) -> Result<Vec<Step>, SosError> {
    match t {
        Term::Nil => Ok(vec![]),
        Term::Prefix(PrefixAction::Tau { guard }, cont) => Ok(vec![Step {
            label: Label::Tau {
                level: PriorityLevel::Ordinary,
                guard: guard.clone(),
            },
            target: cont.as_ref().clone(),
        }]),
        Term::Prefix(
            PrefixAction::Act {
                name,
                polarity,
                level,
                guard,
            },
            cont,
        ) => {
            debug_assert!(!level.is_prioritized());
            Ok(vec![Step {
                label: Label::Act {
                    name: name.clone(),
                    polarity: *polarity,
                    level: *level,
                    guard: guard.clone(),
                },
                target: cont.as_ref().clone(),
            }])
        }
        Term::Sum(branches) => {
            let mut out = Vec::new();
            for b in branches {
                out.extend(steps(b, env, raw, depth)?);
            }
            Ok(out)
        }
        Term::Par(l, r) => {
            let ls = steps(l, env, raw, depth)?;
            let rs = steps(r, env, raw, depth)?;
            let offers_l = if raw {
                BTreeSet::new()
            } else {
                offers(l, env)?
            };
            let offers_r = if raw {
                BTreeSet::new()
            } else {
                offers(r, env)?
            };
            let mut out = Vec::new();
            for s in &ls {
                let guard = s.label.guard().cloned().unwrap_or_default();
                if raw || guard_passes(&guard, &offers_r) {
                    out.push(Step {
                        label: s.label.clone(),
                        target: Term::par(s.target.clone(), r.as_ref().clone()),
                    });
                }
            }
            for s in &rs {
                let guard = s.label.guard().cloned().unwrap_or_default();
                if raw || guard_passes(&guard, &offers_l) {
                    out.push(Step {
                        label: s.label.clone(),
                        target: Term::par(l.as_ref().clone(), s.target.clone()),
                    });
                }
            }
            // Sync: each side's guard is checked against the other side's
            // offers; the resulting internal step carries the union.
            for sl in &ls {
                for sr in &rs {
                    if let (
                        Label::Act {
                            name: nl,
                            polarity: pl,
                            guard: gl,
                            ..
                        },
                        Label::Act {
                            name: nr,
                            polarity: pr,
                            guard: gr,
                            ..
                        },
                    ) = (&sl.label, &sr.label)
                    {
                        if nl == nr && *pl == pr.flip() {
                            let ok =
                                raw || (guard_passes(gl, &offers_r) && guard_passes(gr, &offers_l));
                            if ok {
                                out.push(Step {
                                    label: Label::Tau {
                                        level: PriorityLevel::Ordinary,
                                        guard: gl.union(gr),
                                    },
                                    target: Term::par(sl.target.clone(), sr.target.clone()),
                                });
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
        Term::RestrictSet(labels, body) => {
            let inner = steps(body, env, raw, depth)?;
            Ok(inner
                .into_iter()
                .filter(|s| match &s.label {
                    Label::Act { name, level, .. } => !labels.contains(&(name.clone(), *level)),
                    _ => true,
                })
                .map(|s| Step {
                    label: s.label,
                    target: Term::RestrictSet(labels.clone(), Box::new(s.target)),
                })
                .collect())
        }
        Term::Relabel(body, map) => {
            let inner = steps(body, env, raw, depth)?;
            let rename = |g: &GuardSet| {
                GuardSet(
                    g.0.iter()
                        .map(|n| map.get(n).cloned().unwrap_or_else(|| n.clone()))
                        .collect(),
                )
            };
            Ok(inner
                .into_iter()
                .map(|s| {
                    let label = match s.label {
                        Label::Act {
                            name,
                            polarity,
                            level,
                            guard,
                        } => Label::Act {
                            name: map.get(&name).cloned().unwrap_or(name),
                            polarity,
                            level,
                            guard: rename(&guard),
                        },
                        Label::Tau { level, guard } => Label::Tau {
                            level,
                            guard: rename(&guard),
                        },
                        other => other,
                    };
                    Step {
                        label,
                        target: Term::Relabel(Box::new(s.target), map.clone()),
                    }
                })
                .collect())
        }
        Term::DefCall(id, args) => {
            if depth >= MAX_UNFOLD {
                return Err(SosError::UnguardedRecursion(id.clone()));
            }
            let (params, _) = env
                .lookup(id)
                .ok_or_else(|| SosError::UndefinedCall(id.clone()))?;
            if params.len() != args.len() {
                return Err(SosError::CallArity {
                    name: id.clone(),
                    got: args.len(),
                    expected: params.len(),
                });
            }
            let body = env.unfold(id, args).expect("arity checked");
            steps(&body, env, raw, depth + 1)
        }
        other => Err(SosError::Unsupported(format!("cpg semantics: {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sos::{cpg_offers, transitions_cpg};
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    fn env() -> DefinitionEnv {
        DefinitionEnv::empty()
    }

    fn offer_names(t0: &Term) -> Vec<String> {
        cpg_offers(t0, &env())
            .unwrap()
            .into_iter()
            .map(|(n, p)| {
                if p == Polarity::Output {
                    format!("'{n}")
                } else {
                    n.to_string()
                }
            })
            .collect()
    }

    #[test]
    fn offers_basic() {
        assert_eq!(offer_names(&t("'a.0")), vec!["'a"]);
        assert_eq!(offer_names(&t("0")), Vec::<String>::new());
        // Offers ignore the guard condition.
        assert_eq!(offer_names(&t("{a}:b.'c.0")), vec!["b"]);
    }

    #[test]
    fn offers_respect_restriction() {
        assert!(offer_names(&t("('a.0)\\{a}")).is_empty());
    }

    #[test]
    fn guarded_sync_survives_restriction() {
        let steps = transitions_cpg(&t("((a.0 + {a}:b.'c.0) | 'b.0 | [_1])\\{a,b}"), &env());
        // Context term has a hole; plug with nil first.
        assert!(steps.is_err());
        let filled = crate::term::plug(
            &t("((a.0 + {a}:b.'c.0) | 'b.0 | [_1])\\{a,b}"),
            &[Term::Nil],
        )
        .unwrap();
        let steps = transitions_cpg(&filled, &env()).unwrap();
        assert_eq!(steps.len(), 1);
        let s = steps.iter().next().unwrap();
        assert_eq!(s.label.to_string(), "{a}:tau");
        assert_eq!(s.target, t("(('c.0 | 0) | 0)\\{a,b}"));
    }

    #[test]
    fn sibling_offer_blocks_guarded_sync() {
        let filled = crate::term::plug(
            &t("((a.0 + {a}:b.'c.0) | 'b.0 | [_1])\\{a,b}"),
            &[t("'a.0")],
        )
        .unwrap();
        let steps = transitions_cpg(&filled, &env()).unwrap();
        assert_eq!(steps.len(), 1, "got {steps:?}");
        let s = steps.iter().next().unwrap();
        assert_eq!(s.label.to_string(), "tau");
    }

    #[test]
    fn empty_sibling_offers_nothing() {
        let steps = transitions_cpg(&t("{a}:b.0 | 0"), &env()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps.iter().next().unwrap().label.to_string(), "{a}:b");
    }

    #[test]
    fn guard_blocks_against_live_sibling() {
        let steps = transitions_cpg(&t("{a}:b.0 | 'a.0"), &env()).unwrap();
        let labels: Vec<String> = steps.iter().map(|s| s.label.to_string()).collect();
        // {a}:b is blocked by the sibling's 'a offer; the sibling still moves.
        assert_eq!(labels, vec!["'a"]);
    }

    #[test]
    fn visibility_ignores_guards() {
        let steps = transitions_cpg(&t("{a}:b.0 | 0"), &env()).unwrap();
        assert!(steps.iter().next().unwrap().label.is_visible());
        let steps = transitions_cpg(&t("{a}:tau.0 | 0"), &env()).unwrap();
        assert!(steps.iter().next().unwrap().label.is_invisible());
    }
}
