//! CCS-family rules, shared by plain CCS and the two-level priority variants.
//!
//! Preemption is applied at every sum node, every par node and at the root:
//! whenever a prioritized internal step is derivable at a node, all
//! ordinary-level steps of that node are pruned. Prioritized *visible* steps
//! never preempt anything.

use crate::names::PriorityLevel;
use crate::profile::DefinitionEnv;
use crate::term::{PrefixAction, Term};

use super::{Label, SosError, Step, MAX_UNFOLD};

/// Which priority treatment the shared CCS rules run under.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PriorityVariant {
    /// Plain CCS: no levels, preemption vacuous.
    Plain,
    /// Two-level static priority with global preemption.
    Sg,
    /// As `Sg`, extended with the `up`/`down` lifting operators.
    Prio,
}

pub(super) fn root_steps(
    t: &Term,
    env: &DefinitionEnv,
    variant: PriorityVariant,
) -> Result<Vec<Step>, SosError> {
    Ok(prune(steps(t, env, variant, 0)?))
}

fn steps(
    t: &Term,
    env: &DefinitionEnv,
    variant: PriorityVariant,
    depth: u32,
) -> Result<Vec<Step>, SosError> {
    match t {
        Term::Nil => Ok(vec![]),
        Term::Prefix(PrefixAction::Tau { guard }, cont) => {
            debug_assert!(guard.is_empty());
            Ok(vec![Step {
                label: Label::tau(),
                target: cont.as_ref().clone(),
            }])
        }
        Term::Prefix(
            PrefixAction::Act {
                name,
                polarity,
                level,
                guard,
            },
            cont,
        ) => {
            debug_assert!(guard.is_empty());
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
                out.extend(steps(b, env, variant, depth)?);
            }
            Ok(prune(out))
        }
        Term::Par(l, r) => {
            let ls = steps(l, env, variant, depth)?;
            let rs = steps(r, env, variant, depth)?;
            let mut out = Vec::new();
            for s in &ls {
                out.push(Step {
                    label: s.label.clone(),
                    target: Term::par(s.target.clone(), r.as_ref().clone()),
                });
            }
            for s in &rs {
                out.push(Step {
                    label: s.label.clone(),
                    target: Term::par(l.as_ref().clone(), s.target.clone()),
                });
            }
            // Synchronisation: complementary actions at the same level.
            for sl in &ls {
                for sr in &rs {
                    if let (
                        Label::Act {
                            name: nl,
                            polarity: pl,
                            level: ll,
                            ..
                        },
                        Label::Act {
                            name: nr,
                            polarity: pr,
                            level: lr,
                            ..
                        },
                    ) = (&sl.label, &sr.label)
                    {
                        if nl == nr && *pl == pr.flip() && ll == lr {
                            out.push(Step {
                                label: Label::Tau {
                                    level: *ll,
                                    guard: crate::term::GuardSet::empty(),
                                },
                                target: Term::par(sl.target.clone(), sr.target.clone()),
                            });
                        }
                    }
                }
            }
            Ok(prune(out))
        }
        Term::RestrictSet(labels, body) => {
            let inner = steps(body, env, variant, depth)?;
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
            let inner = steps(body, env, variant, depth)?;
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
                            guard,
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
            steps(&body, env, variant, depth + 1)
        }
        Term::Prioritize(body, action) if variant == PriorityVariant::Prio => {
            let inner = steps(body, env, variant, depth)?;
            Ok(inner
                .into_iter()
                .map(|s| {
                    let label = match s.label {
                        Label::Act {
                            name,
                            polarity,
                            level: PriorityLevel::Ordinary,
                            guard,
                        } if name == *action => Label::Act {
                            name,
                            polarity,
                            level: PriorityLevel::Prioritized,
                            guard,
                        },
                        other => other,
                    };
                    Step {
                        label,
                        target: Term::Prioritize(Box::new(s.target), action.clone()),
                    }
                })
                .collect())
        }
        Term::Deprioritize(body, action) if variant == PriorityVariant::Prio => {
            let inner = steps(body, env, variant, depth)?;
            Ok(inner
                .into_iter()
                .map(|s| {
                    let label = match s.label {
                        Label::Act {
                            name,
                            polarity,
                            level: PriorityLevel::Prioritized,
                            guard,
                        } if name == *action => Label::Act {
                            name,
                            polarity,
                            level: PriorityLevel::Ordinary,
                            guard,
                        },
                        other => other,
                    };
                    Step {
                        label,
                        target: Term::Deprioritize(Box::new(s.target), action.clone()),
                    }
                })
                .collect())
        }
        other => Err(SosError::Unsupported(format!("ccs semantics: {other}"))),
    }
}

/// Node-level preemption: a derivable prioritized tau prunes every
/// ordinary-level step of the node.
fn prune(steps: Vec<Step>) -> Vec<Step> {
    let has_prio_tau = steps.iter().any(|s| {
        matches!(
            s.label,
            Label::Tau {
                level: PriorityLevel::Prioritized,
                ..
            }
        )
    });
    if !has_prio_tau {
        return steps;
    }
    steps
        .into_iter()
        .filter(|s| s.label.level().is_prioritized())
        .collect()
}


#[cfg(test)]
mod level_tests {
    use super::*;
    use crate::names::{Name, PriorityLevel};
    use crate::sos::transitions_ccs_priority;
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    #[test]
    fn restriction_is_level_exact() {
        // \{a} names the ordinary level only; the prioritized _a passes.
        let steps = transitions_ccs_priority(
            &t("(_a.0 | a.0)\\{a}"),
            &DefinitionEnv::empty(),
            PriorityVariant::Sg,
        )
        .unwrap();
        let labels: Vec<String> = steps.iter().map(|s| s.label.to_string()).collect();
        assert_eq!(labels, vec!["_a"]);
        // And \{_a} blocks only the prioritized level.
        let steps = transitions_ccs_priority(
            &t("(_a.0 | a.0)\\{_a}"),
            &DefinitionEnv::empty(),
            PriorityVariant::Sg,
        )
        .unwrap();
        let labels: Vec<String> = steps.iter().map(|s| s.label.to_string()).collect();
        assert_eq!(labels, vec!["a"]);
    }

    #[test]
    fn relabelling_preserves_levels() {
        let term = Term::Relabel(
            Box::new(t("_a.0")),
            [(Name::new("a"), Name::new("b"))].into_iter().collect(),
        );
        let steps =
            transitions_ccs_priority(&term, &DefinitionEnv::empty(), PriorityVariant::Sg).unwrap();
        let s = steps.iter().next().unwrap();
        assert_eq!(s.label.to_string(), "_b");
        assert_eq!(s.label.level(), PriorityLevel::Prioritized);
    }

    #[test]
    fn up_leaves_already_prioritized_steps_alone() {
        let steps = transitions_ccs_priority(
            &t("up('_b.0, b)"),
            &DefinitionEnv::empty(),
            PriorityVariant::Prio,
        )
        .unwrap();
        assert_eq!(steps.iter().next().unwrap().label.to_string(), "'_b");
    }

    #[test]
    fn prioritized_tau_from_nested_par_preempts_at_root_sum() {
        // The prioritized sync sits two pars down; the sum still prunes.
        let steps = transitions_ccs_priority(
            &t("((_c.0 | '_c.0) | 0)\\{_c} + a.0"),
            &DefinitionEnv::empty(),
            PriorityVariant::Sg,
        )
        .unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps.iter().next().unwrap().label.to_string(), "_tau");
    }
}
