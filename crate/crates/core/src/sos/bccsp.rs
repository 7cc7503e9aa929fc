//! Rules for the basic calculus with the priority operator `theta`.

use crate::names::Polarity;
use crate::profile::{OrderedAction, PriorityOrder};
use crate::term::{PrefixAction, Term};

use super::{Label, SosError, Step};

pub(super) fn root_steps(t: &Term, order: &PriorityOrder) -> Result<Vec<Step>, SosError> {
    steps(t, order)
}

fn to_ordered(label: &Label) -> OrderedAction {
    match label {
        Label::Tau { .. } => OrderedAction::Tau,
        Label::Act { name, .. } => OrderedAction::Act(name.clone()),
        other => unreachable!("bccsp label {other}"),
    }
}

fn steps(t: &Term, order: &PriorityOrder) -> Result<Vec<Step>, SosError> {
    match t {
        Term::Nil => Ok(vec![]),
        Term::Prefix(PrefixAction::Tau { .. }, cont) => Ok(vec![Step {
            label: Label::tau(),
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
            debug_assert_eq!(*polarity, Polarity::Input);
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
                out.extend(steps(b, order)?);
            }
            Ok(out)
        }
        Term::Theta(body) => {
            let inner = steps(body, order)?;
            let initials: Vec<OrderedAction> = inner.iter().map(|s| to_ordered(&s.label)).collect();
            Ok(inner
                .into_iter()
                .filter(|s| {
                    let mine = to_ordered(&s.label);
                    !initials.iter().any(|other| order.lt(&mine, other))
                })
                .map(|s| Step {
                    label: s.label,
                    target: Term::Theta(Box::new(s.target)),
                })
                .collect())
        }
        other => Err(SosError::Unsupported(format!("bccsp semantics: {other}"))),
    }
}
