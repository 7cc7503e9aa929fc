//! Calculus profiles: which AST constructs each calculus admits, plus the
//! per-calculus payloads (priority order, definition environment).
//!
//! Admissibility table (rows are `Term`/prefix constructs, columns profiles):
//!
//! | construct            | ccs | pi | pimpm | bccsp-theta | cpg | ccs-sg | ccs-prio | cows |
//! |----------------------|-----|----|-------|-------------|-----|--------|----------|------|
//! | `0`, `tau.P`         |  x  |  x |   x   |      x      |  x  |   x    |    x     |      |
//! | `0` alone            |  x  |  x |   x   |      x      |  x  |   x    |    x     |  x   |
//! | act prefix `a`/`'a`  |  x  |    |       |   x (no `'`)|  x  |   x    |    x     |      |
//! | prioritized `_a`     |     |    |       |             |     |   x    |    x     |      |
//! | guard `{S}:`         |     |    |       |             |  x  |        |          |      |
//! | send/receive         |     |  x (monadic) | x |       |     |        |          |  x (send w/o cont, all-placeholder receive) |
//! | `+`                  |  x  |  x |   x   |      x      |  x  |   x    |    x     |      |
//! | `\|`                 |  x  |  x |   x   |             |  x  |   x    |    x     |  x   |
//! | `(new n)`            |     |  x |   x   |             |     |        |          |      |
//! | `\{L}`               |  x  |    |       |             |  x  |   x    |    x     |      |
//! | `!P`                 |     |  x |   x   |             |     |        |          |      |
//! | `[a=b]`              |     |  x |   x   |             |     |        |          |      |
//! | relabel / `A<..>`    |  x  |    |       |             |  x  |   x    |    x     |      |
//! | `theta(P)`           |     |    |       |      x      |     |        |          |      |
//! | `up`/`down`          |     |    |       |             |     |        |    x     |      |
//! | `kill(k)`, `[k]P`    |     |    |       |             |     |        |          |  x   |
//!
//! Holes are admitted everywhere (contexts are validated like processes).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::names::{Name, Polarity};
use crate::subst::Substitution;
use crate::term::{free_names, PrefixAction, Term};

/// Actions ordered by a priority relation: plain names or the internal step.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum OrderedAction {
    Tau,
    Act(Name),
}

impl fmt::Display for OrderedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderedAction::Tau => write!(f, "tau"),
            OrderedAction::Act(n) => write!(f, "{n}"),
        }
    }
}

/// An irreflexive, transitive priority relation: `(a, b)` means `a < b`
/// (`b` preempts `a`).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PriorityOrder {
    pairs: BTreeSet<(OrderedAction, OrderedAction)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("priority order is reflexive at {0}")]
    Reflexive(OrderedAction),
    #[error("priority order is not transitive: {0} < {1} < {2} but not {0} < {2}")]
    NotTransitive(OrderedAction, OrderedAction, OrderedAction),
}

impl PriorityOrder {
    pub fn empty() -> Self {
        PriorityOrder::default()
    }

    pub fn new(
        pairs: impl IntoIterator<Item = (OrderedAction, OrderedAction)>,
    ) -> Result<Self, OrderError> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        for (a, b) in &pairs {
            if a == b {
                return Err(OrderError::Reflexive(a.clone()));
            }
        }
        for (a, b) in &pairs {
            for (b2, c) in &pairs {
                if b == b2 && !pairs.contains(&(a.clone(), c.clone())) {
                    return Err(OrderError::NotTransitive(a.clone(), b.clone(), c.clone()));
                }
            }
        }
        Ok(PriorityOrder { pairs })
    }

    pub fn lt(&self, a: &OrderedAction, b: &OrderedAction) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(OrderedAction, OrderedAction)> {
        self.pairs.iter()
    }
}

/// Parameterized process definitions, `A(params) = body`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DefinitionEnv {
    map: BTreeMap<String, (Vec<Name>, Term)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DefError {
    #[error("definition {name}: duplicate parameter {param}")]
    DuplicateParam { name: String, param: Name },
    #[error("definition {name}: body is a context, not a process")]
    BodyWithHoles { name: String },
}

impl DefinitionEnv {
    pub fn empty() -> Self {
        DefinitionEnv::default()
    }

    /// Register a definition. Action names not listed among the parameters
    /// are global constants (the usual ccs reading), so bodies may mention
    /// them freely; only parameter shapes and hole-freeness are checked.
    pub fn define(
        &mut self,
        name: impl Into<String>,
        params: Vec<Name>,
        body: Term,
    ) -> Result<(), DefError> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for p in &params {
            if !seen.insert(p.clone()) {
                return Err(DefError::DuplicateParam {
                    name,
                    param: p.clone(),
                });
            }
        }
        free_names(&body).map_err(|_| DefError::BodyWithHoles { name: name.clone() })?;
        self.map.insert(name, (params, body));
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&(Vec<Name>, Term)> {
        self.map.get(name)
    }

    /// Unfold a call: the body with arguments substituted for parameters.
    pub fn unfold(&self, name: &str, args: &[Name]) -> Option<Term> {
        let (params, body) = self.lookup(name)?;
        if params.len() != args.len() {
            return None;
        }
        let s = Substitution::from_pairs(params.iter().cloned().zip(args.iter().cloned()));
        Some(crate::subst::apply_subst(body, &s))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(Vec<Name>, Term))> {
        self.map.iter()
    }
}

/// Which calculus a term is interpreted in, with per-calculus payload.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CalculusProfile {
    Ccs { env: DefinitionEnv },
    Pi,
    PiMpm,
    BccspTheta { order: PriorityOrder },
    Cpg { env: DefinitionEnv },
    CcsSg { env: DefinitionEnv },
    CcsPrio { env: DefinitionEnv },
    CowsFragment,
}

impl CalculusProfile {
    pub fn ccs() -> Self {
        CalculusProfile::Ccs {
            env: DefinitionEnv::empty(),
        }
    }

    /// Stable identifier used in witness files and on the command line.
    pub fn key(&self) -> &'static str {
        match self {
            CalculusProfile::Ccs { .. } => "ccs",
            CalculusProfile::Pi => "pi",
            CalculusProfile::PiMpm => "pimpm",
            CalculusProfile::BccspTheta { .. } => "bccsp-theta",
            CalculusProfile::Cpg { .. } => "cpg",
            CalculusProfile::CcsSg { .. } => "ccs-sg",
            CalculusProfile::CcsPrio { .. } => "ccs-prio",
            CalculusProfile::CowsFragment => "cows",
        }
    }

    pub fn env(&self) -> Option<&DefinitionEnv> {
        match self {
            CalculusProfile::Ccs { env }
            | CalculusProfile::Cpg { env }
            | CalculusProfile::CcsSg { env }
            | CalculusProfile::CcsPrio { env } => Some(env),
            _ => None,
        }
    }

    fn is_pi_family(&self) -> bool {
        matches!(self, CalculusProfile::Pi | CalculusProfile::PiMpm)
    }

    fn is_ccs_family(&self) -> bool {
        matches!(
            self,
            CalculusProfile::Ccs { .. }
                | CalculusProfile::Cpg { .. }
                | CalculusProfile::CcsSg { .. }
                | CalculusProfile::CcsPrio { .. }
        )
    }
}

/// Path to a subterm: child indices from the root, per [`Term::children`].
pub type TermPath = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: TermPath,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at /")?;
        for (i, p) in self.path.iter().enumerate() {
            if i > 0 {
                write!(f, "/")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Check that every construct of `t` is admitted by `p`. Returns all
/// violations with subterm paths; empty means ok.
pub fn validate_profile(t: &Term, p: &CalculusProfile) -> Vec<Violation> {
    let mut out = Vec::new();
    walk(t, p, &mut Vec::new(), &mut out);
    out
}

fn deny(out: &mut Vec<Violation>, path: &TermPath, msg: impl Into<String>) {
    out.push(Violation {
        path: path.clone(),
        message: msg.into(),
    });
}

fn walk(t: &Term, p: &CalculusProfile, path: &mut TermPath, out: &mut Vec<Violation>) {
    use CalculusProfile as P;
    match t {
        Term::Nil | Term::Hole(_) => {}
        Term::Prefix(act, _) => check_prefix(act, p, path, out),
        Term::Sum(bs) => {
            if matches!(p, P::CowsFragment) {
                deny(out, path, "choice is not part of the cows fragment");
            }
            if bs.len() < 2 {
                deny(out, path, "sum must have at least two branches");
            }
        }
        Term::Par(_, _) => {
            if matches!(p, P::BccspTheta { .. }) {
                deny(out, path, "parallel composition is not part of bccsp-theta");
            }
        }
        Term::Nu(_, _) => {
            if !p.is_pi_family() {
                deny(
                    out,
                    path,
                    format!("(new ..) restriction is not admitted in {}", p.key()),
                );
            }
        }
        Term::RestrictSet(labels, _) => {
            if !p.is_ccs_family() {
                deny(
                    out,
                    path,
                    format!("\\{{..}} restriction is not admitted in {}", p.key()),
                );
            }
            if labels.iter().any(|(_, lvl)| lvl.is_prioritized())
                && !matches!(p, P::CcsSg { .. } | P::CcsPrio { .. })
            {
                deny(
                    out,
                    path,
                    "prioritized restriction labels need ccs-sg or ccs-prio",
                );
            }
        }
        Term::Bang(_) => {
            if !p.is_pi_family() {
                deny(
                    out,
                    path,
                    format!("replication is not admitted in {}", p.key()),
                );
            }
        }
        Term::Match(_, _, _) => {
            if !p.is_pi_family() {
                deny(
                    out,
                    path,
                    format!("name match is not admitted in {}", p.key()),
                );
            }
        }
        Term::Relabel(_, _) => {
            if !p.is_ccs_family() {
                deny(
                    out,
                    path,
                    format!("relabelling is not admitted in {}", p.key()),
                );
            }
        }
        Term::DefCall(id, args) => {
            if !p.is_ccs_family() {
                deny(
                    out,
                    path,
                    format!("definition calls are not admitted in {}", p.key()),
                );
            } else {
                match p.env().and_then(|e| e.lookup(id)) {
                    None => deny(out, path, format!("call of undefined process {id}")),
                    Some((params, _)) if params.len() != args.len() => deny(
                        out,
                        path,
                        format!(
                            "call of {id} with {} argument(s), expected {}",
                            args.len(),
                            params.len()
                        ),
                    ),
                    Some(_) => {}
                }
            }
        }
        Term::Theta(_) => {
            if !matches!(p, P::BccspTheta { .. }) {
                deny(out, path, format!("theta is not admitted in {}", p.key()));
            }
        }
        Term::Prioritize(_, _) | Term::Deprioritize(_, _) => {
            if !matches!(p, P::CcsPrio { .. }) {
                deny(
                    out,
                    path,
                    format!("up/down operators are not admitted in {}", p.key()),
                );
            }
        }
        Term::Kill(_) | Term::Delimit(_, _) => {
            if !matches!(p, P::CowsFragment) {
                deny(
                    out,
                    path,
                    format!("kill scopes are not admitted in {}", p.key()),
                );
            }
        }
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        walk(c, p, path, out);
        path.pop();
    }
}

fn check_prefix(
    act: &PrefixAction,
    p: &CalculusProfile,
    path: &TermPath,
    out: &mut Vec<Violation>,
) {
    use CalculusProfile as P;
    match act {
        PrefixAction::Tau { guard } => {
            if matches!(p, P::CowsFragment) {
                deny(out, path, "tau prefix is not part of the cows fragment");
            }
            if !guard.is_empty() && !matches!(p, P::Cpg { .. }) {
                deny(out, path, "priority guards need the cpg profile");
            }
        }
        PrefixAction::Act {
            polarity,
            level,
            guard,
            ..
        } => {
            if !p.is_ccs_family() && !matches!(p, P::BccspTheta { .. }) {
                deny(
                    out,
                    path,
                    format!("ccs-style prefix is not admitted in {}", p.key()),
                );
            }
            if matches!(p, P::BccspTheta { .. }) && *polarity == Polarity::Output {
                deny(out, path, "bccsp-theta actions have no co-actions");
            }
            if level.is_prioritized() && !matches!(p, P::CcsSg { .. } | P::CcsPrio { .. }) {
                deny(out, path, "prioritized actions need ccs-sg or ccs-prio");
            }
            if !guard.is_empty() && !matches!(p, P::Cpg { .. }) {
                deny(out, path, "priority guards need the cpg profile");
            }
        }
        PrefixAction::Send { subject, payload } => {
            if !p.is_pi_family() && !matches!(p, P::CowsFragment) {
                deny(
                    out,
                    path,
                    format!("output prefix is not admitted in {}", p.key()),
                );
            }
            if matches!(p, P::Pi) && subject.len() != 1 {
                deny(out, path, "polyadic subjects need the pimpm profile");
            }
            if matches!(p, P::Pi) && payload.len() != 1 {
                deny(out, path, "polyadic payloads need the pimpm profile");
            }
            if subject.is_empty() || payload.is_empty() {
                deny(out, path, "subjects and payloads must be nonempty");
            }
        }
        PrefixAction::Receive { subject, pattern } => {
            if !p.is_pi_family() && !matches!(p, P::CowsFragment) {
                deny(
                    out,
                    path,
                    format!("input prefix is not admitted in {}", p.key()),
                );
            }
            if matches!(p, P::Pi) && subject.len() != 1 {
                deny(out, path, "polyadic subjects need the pimpm profile");
            }
            if matches!(p, P::Pi) && pattern.len() != 1 {
                deny(out, path, "polyadic patterns need the pimpm profile");
            }
            if subject.is_empty() || pattern.is_empty() {
                deny(out, path, "subjects and patterns must be nonempty");
            }
            if !pattern.all_placeholders() && !matches!(p, P::PiMpm) {
                deny(out, path, "protected pattern names need the pimpm profile");
            }
            if !pattern.is_linear() {
                deny(out, path, "pattern placeholders must be pairwise distinct");
            }
        }
    }
}

/// The extra check for an output in the cows fragment: invocations carry no
/// continuation. Applied during validation of the whole term.
pub fn validate_cows_invocations(t: &Term) -> Vec<Violation> {
    let mut out = Vec::new();
    cows_walk(t, &mut Vec::new(), &mut out);
    out
}

fn cows_walk(t: &Term, path: &mut TermPath, out: &mut Vec<Violation>) {
    if let Term::Prefix(PrefixAction::Send { .. }, cont) = t {
        if **cont != Term::Nil {
            deny(out, path, "cows invocations have no continuation");
        }
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        cows_walk(c, path, out);
        path.pop();
    }
}

/// Full profile validation: admissibility plus profile-specific shape checks.
pub fn validate(t: &Term, p: &CalculusProfile) -> Vec<Violation> {
    let mut out = validate_profile(t, p);
    if matches!(p, CalculusProfile::CowsFragment) {
        out.extend(validate_cows_invocations(t));
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    out
}
