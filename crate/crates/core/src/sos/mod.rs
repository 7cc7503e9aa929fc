//! One-step transition generators for each calculus.
//!
//! All engines work on alpha-canonical input and produce alpha-canonical
//! targets, so `transitions` is a pure function of the canonical form of the
//! term and the profile.

mod bccsp;
mod ccs;
mod cows;
mod cpg;
mod pi;

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::names::{KillerLabel, Name, Polarity, PriorityLevel};
use crate::profile::{CalculusProfile, DefinitionEnv, PriorityOrder, Violation};
use crate::subst::alpha_canonical;
use crate::surface::pretty_action;
use crate::term::{
    free_names_with_holes_erased, GuardSet, Pattern, PatternItem, PrefixAction, Term, Tuple,
};

pub use ccs::PriorityVariant;
pub use pi::match_pattern;

/// Transition labels across all calculi.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Label {
    /// Internal step; carries a priority level (sync of prioritized actions)
    /// and a guard (priority-guard syncs).
    Tau {
        level: PriorityLevel,
        guard: GuardSet,
    },
    /// CCS-style visible action.
    Act {
        name: Name,
        polarity: Polarity,
        level: PriorityLevel,
        guard: GuardSet,
    },
    /// Free or bound output; `extruded` names had their restriction opened
    /// and is always a subset of the payload names.
    Send {
        subject: Tuple,
        payload: Tuple,
        extruded: BTreeSet<Name>,
    },
    /// Early-instantiated input.
    Receive { subject: Tuple, received: Tuple },
    /// Kill signal; internal by classification (not an interaction offer).
    Kill(KillerLabel),
}

impl Label {
    pub fn tau() -> Label {
        Label::Tau {
            level: PriorityLevel::Ordinary,
            guard: GuardSet::empty(),
        }
    }

    pub fn is_visible(&self) -> bool {
        matches!(
            self,
            Label::Act { .. } | Label::Send { .. } | Label::Receive { .. }
        )
    }

    pub fn is_invisible(&self) -> bool {
        !self.is_visible()
    }

    pub fn level(&self) -> PriorityLevel {
        match self {
            Label::Tau { level, .. } | Label::Act { level, .. } => *level,
            _ => PriorityLevel::Ordinary,
        }
    }

    pub fn guard(&self) -> Option<&GuardSet> {
        match self {
            Label::Tau { guard, .. } | Label::Act { guard, .. } => Some(guard),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau { level, guard } => {
                let mut s = String::new();
                crate::surface::pretty::write_guard(guard, &mut s);
                if level.is_prioritized() {
                    s.push('_');
                }
                s.push_str("tau");
                f.write_str(&s)
            }
            Label::Act {
                name,
                polarity,
                level,
                guard,
            } => {
                let act = PrefixAction::Act {
                    name: name.clone(),
                    polarity: *polarity,
                    level: *level,
                    guard: guard.clone(),
                };
                f.write_str(&pretty_action(&act))
            }
            Label::Send {
                subject,
                payload,
                extruded,
            } => {
                let mut s = String::new();
                for (i, n) in subject.0.iter().enumerate() {
                    if i > 0 {
                        s.push(':');
                    }
                    let _ = write!(s, "{n}");
                }
                s.push('!');
                if !extruded.is_empty() {
                    s.push_str("(new");
                    for n in extruded {
                        let _ = write!(s, " {n}");
                    }
                    s.push(')');
                }
                s.push('<');
                for (i, n) in payload.0.iter().enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    let _ = write!(s, "{n}");
                }
                s.push('>');
                f.write_str(&s)
            }
            Label::Receive { subject, received } => {
                let act = PrefixAction::Receive {
                    subject: subject.clone(),
                    pattern: Pattern(
                        received
                            .0
                            .iter()
                            .map(|n| PatternItem::Placeholder(n.clone()))
                            .collect(),
                    ),
                };
                f.write_str(&pretty_action(&act))
            }
            Label::Kill(k) => write!(f, "kill({k})"),
        }
    }
}

/// One transition: a label and the (alpha-canonical, hole-free) target.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Step {
    pub label: Label,
    pub target: Term,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "--{}--> {}", self.label, self.target)
    }
}

/// Candidate names for early input instantiation: the free names of the
/// explored root(s) plus a pool of reserved `~i` names standing in for
/// genuinely new names. Keeping the universe fixed across an exploration (and
/// shared between the two sides of a simulation check) keeps input labels
/// aligned between systems.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Universe {
    pub names: BTreeSet<Name>,
}

impl Universe {
    pub fn for_term(t: &Term) -> Universe {
        Universe::for_terms(&[t])
    }

    pub fn for_terms(ts: &[&Term]) -> Universe {
        let mut names = BTreeSet::new();
        let mut positions = 0usize;
        for t in ts {
            names.extend(free_names_with_holes_erased(t));
            positions += placeholder_positions(t);
        }
        // One reserved name per placeholder position, at least one, capped.
        let pool = positions.clamp(1, 8) as u32;
        for i in 0..pool {
            names.insert(Name::input_candidate(i));
        }
        Universe { names }
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

fn placeholder_positions(t: &Term) -> usize {
    let mut n = 0;
    if let Term::Prefix(PrefixAction::Receive { pattern, .. }, _) = t {
        n += pattern.placeholders().len();
    }
    n + t
        .children()
        .iter()
        .map(|c| placeholder_positions(c))
        .sum::<usize>()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SosError {
    #[error("profile violation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Profile(Vec<Violation>),
    #[error("term contains hole [_{0}]; transitions need a process")]
    NotAProcess(u32),
    #[error("call of undefined process {0}")]
    UndefinedCall(String),
    #[error("call of {name} with {got} argument(s), expected {expected}")]
    CallArity {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("definition {0} is unguardedly recursive (unfold limit reached)")]
    UnguardedRecursion(String),
    #[error("construct not supported by this semantics: {0}")]
    Unsupported(String),
}

/// Unfold depth for definition calls before declaring unguarded recursion.
const MAX_UNFOLD: u32 = 128;

/// The complete finite set of one-step transitions of `t` under `profile`.
pub fn transitions(t: &Term, profile: &CalculusProfile) -> Result<BTreeSet<Step>, SosError> {
    transitions_with_universe(t, profile, &Universe::for_term(t))
}

/// As [`transitions`], with an explicit input-instantiation universe. The
/// universe is only consulted by the pi-family and cows input rules.
pub fn transitions_with_universe(
    t: &Term,
    profile: &CalculusProfile,
    universe: &Universe,
) -> Result<BTreeSet<Step>, SosError> {
    let (steps, _) = transitions_bounded(t, profile, universe, true)?;
    Ok(steps)
}

/// Engine entry used by the explorer: `allow_bang = false` suppresses
/// replication unfolding. The second component reports whether steps may have
/// been suppressed that way.
pub(crate) fn transitions_bounded(
    t: &Term,
    profile: &CalculusProfile,
    universe: &Universe,
    allow_bang: bool,
) -> Result<(BTreeSet<Step>, bool), SosError> {
    let violations = crate::profile::validate(t, profile);
    if !violations.is_empty() {
        return Err(SosError::Profile(violations));
    }
    if let Some(h) = t.holes().into_iter().next() {
        return Err(SosError::NotAProcess(h));
    }
    let canon = alpha_canonical(t);
    let raw: Vec<Step> = match profile {
        CalculusProfile::Ccs { env } => ccs::root_steps(&canon, env, PriorityVariant::Plain)?,
        CalculusProfile::CcsSg { env } => ccs::root_steps(&canon, env, PriorityVariant::Sg)?,
        CalculusProfile::CcsPrio { env } => ccs::root_steps(&canon, env, PriorityVariant::Prio)?,
        CalculusProfile::Cpg { env } => cpg::root_steps(&canon, env)?,
        CalculusProfile::BccspTheta { order } => bccsp::root_steps(&canon, order)?,
        CalculusProfile::Pi | CalculusProfile::PiMpm => {
            pi::root_steps(&canon, universe, allow_bang)?
        }
        CalculusProfile::CowsFragment => cows::root_steps(&canon, universe)?,
    };
    let suppressed = !allow_bang && canon.any_subterm(&|x| matches!(x, Term::Bang(_)));
    let steps = raw
        .into_iter()
        .map(|s| Step {
            label: s.label,
            target: alpha_canonical(&s.target),
        })
        .collect();
    Ok((steps, suppressed))
}

/// Standard CCS transitions (prefix, sum, interleaving plus synchronisation,
/// restriction, relabelling, definition unfolding).
pub fn transitions_ccs(t: &Term, env: &DefinitionEnv) -> Result<BTreeSet<Step>, SosError> {
    finish(ccs::root_steps(
        &alpha_canonical(t),
        env,
        PriorityVariant::Plain,
    )?)
}

/// CCS with priority levels: `variant` selects plain two-level preemption or
/// the extension with the `up`/`down` operators.
pub fn transitions_ccs_priority(
    t: &Term,
    env: &DefinitionEnv,
    variant: PriorityVariant,
) -> Result<BTreeSet<Step>, SosError> {
    finish(ccs::root_steps(&alpha_canonical(t), env, variant)?)
}

/// Priority-guard transitions. Labels carry their guard sets; a guarded step
/// survives parallel composition only when the sibling offers no co-action of
/// the guard.
pub fn transitions_cpg(t: &Term, env: &DefinitionEnv) -> Result<BTreeSet<Step>, SosError> {
    finish(cpg::root_steps(&alpha_canonical(t), env)?)
}

/// The unconditional visible offers of a priority-guard term: every visible
/// action reachable in one raw step, ignoring all guard side-conditions.
pub fn cpg_offers(t: &Term, env: &DefinitionEnv) -> Result<BTreeSet<(Name, Polarity)>, SosError> {
    cpg::offers(&alpha_canonical(t), env)
}

/// Transitions under the priority operator: a step of `theta(P)` survives iff
/// no other initial action of `P` has higher priority.
pub fn transitions_bccsp(t: &Term, order: &PriorityOrder) -> Result<BTreeSet<Step>, SosError> {
    finish(bccsp::root_steps(&alpha_canonical(t), order)?)
}

/// Transitions of the pi family with match, polyadic synchronization and
/// pattern matching. Input prefixes are instantiated early over the term's
/// universe; internal synchronisation matches output tuples against input
/// patterns directly, so tau steps never depend on the universe.
pub fn transitions_pimpm(t: &Term) -> Result<BTreeSet<Step>, SosError> {
    let canon = alpha_canonical(t);
    let uni = Universe::for_term(&canon);
    finish(pi::root_steps(&canon, &uni, true)?)
}

/// Transitions of the cows fragment: eager kills, scope delimitation and
/// tuple-based communication.
pub fn transitions_cows(t: &Term) -> Result<BTreeSet<Step>, SosError> {
    let canon = alpha_canonical(t);
    let uni = Universe::for_term(&canon);
    finish(cows::root_steps(&canon, &uni)?)
}

/// Termination of every concurrent process of the fragment; delimiters are
/// preserved as empty scopes.
pub fn halt(t: &Term) -> Term {
    cows::halt(t)
}

fn finish(steps: Vec<Step>) -> Result<BTreeSet<Step>, SosError> {
    Ok(steps
        .into_iter()
        .map(|s| Step {
            label: s.label,
            target: alpha_canonical(&s.target),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_unchecked;

    fn t(src: &str) -> Term {
        parse_unchecked(src).unwrap()
    }

    #[test]
    fn generator_is_pure_in_the_canonical_form() {
        // Alpha-variants produce identical step sets.
        let profile = CalculusProfile::PiMpm;
        let a = t("(new u)(u?(p).[p=b] y!<c> | u!<b>)");
        let b = t("(new v)(v?(q).[q=b] y!<c> | v!<b>)");
        assert_eq!(
            transitions(&a, &profile).unwrap(),
            transitions(&b, &profile).unwrap()
        );
        let again = transitions(&a, &profile).unwrap();
        assert_eq!(transitions(&a, &profile).unwrap(), again);
    }

    #[test]
    fn dispatcher_rejects_profile_violations() {
        assert!(matches!(
            transitions(&t("theta(a.0)"), &CalculusProfile::ccs()),
            Err(SosError::Profile(_))
        ));
        assert!(matches!(
            transitions(&t("a.[_1]"), &CalculusProfile::ccs()),
            Err(SosError::NotAProcess(1))
        ));
    }

    #[test]
    fn label_visibility_classification() {
        let steps = transitions(&t("kill(k)"), &CalculusProfile::CowsFragment).unwrap();
        assert!(steps.iter().next().unwrap().label.is_invisible());
        let steps = transitions(
            &t("{a}:b.0"),
            &CalculusProfile::Cpg {
                env: DefinitionEnv::empty(),
            },
        )
        .unwrap();
        assert!(steps.iter().next().unwrap().label.is_visible());
        let steps = transitions(
            &t("{a}:tau.0"),
            &CalculusProfile::Cpg {
                env: DefinitionEnv::empty(),
            },
        )
        .unwrap();
        assert!(steps.iter().next().unwrap().label.is_invisible());
    }

    #[test]
    fn label_printing_matches_surface_grammar() {
        let cases = [
            ("tau.0", CalculusProfile::ccs(), "tau"),
            ("'a.0", CalculusProfile::ccs(), "'a"),
            ("x:y!<n,m>", CalculusProfile::PiMpm, "x:y!<n,m>"),
            ("kill(k)", CalculusProfile::CowsFragment, "kill(k)"),
        ];
        for (src, profile, expected) in cases {
            let steps = transitions(&t(src), &profile).unwrap();
            assert_eq!(steps.iter().next().unwrap().label.to_string(), expected);
        }
    }

    #[test]
    fn universe_pool_scales_with_patterns() {
        let small = Universe::for_term(&t("x?(w).0"));
        assert!(small
            .names
            .contains(&crate::names::Name::input_candidate(0)));
        assert!(!small
            .names
            .contains(&crate::names::Name::input_candidate(1)));
        let bigger = Universe::for_term(&t("x?(u,v).y?(w).0"));
        assert!(bigger
            .names
            .contains(&crate::names::Name::input_candidate(2)));
    }
}
