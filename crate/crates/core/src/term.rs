//! The unified process AST shared by all supported calculi, plus the basic
//! operations on it: free names, closedness, independence and hole plugging.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::names::{KillerLabel, Name, Polarity, PriorityLevel};

/// A nonempty sequence of names. Channel subjects and output payloads are
/// tuples; interaction requires exact tuple equality on subjects.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Tuple(pub Vec<Name>);

impl Tuple {
    pub fn single(n: Name) -> Self {
        Tuple(vec![n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.0.contains(n)
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// One position of an input pattern.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PatternItem {
    /// Binds the matched name in the continuation.
    Placeholder(Name),
    /// `@x`: matches only the literal name `x`; a free occurrence of `x`.
    Protected(Name),
}

/// A nonempty sequence of pattern items. Placeholders must be pairwise
/// distinct (linearity), which makes the matching substitution unique.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Pattern(pub Vec<PatternItem>);

impl Pattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The binding names of this pattern, in positional order.
    pub fn placeholders(&self) -> Vec<&Name> {
        self.0
            .iter()
            .filter_map(|it| match it {
                PatternItem::Placeholder(n) => Some(n),
                PatternItem::Protected(_) => None,
            })
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        let ps = self.placeholders();
        let set: BTreeSet<_> = ps.iter().collect();
        set.len() == ps.len()
    }

    pub fn all_placeholders(&self) -> bool {
        self.0
            .iter()
            .all(|it| matches!(it, PatternItem::Placeholder(_)))
    }
}

/// A finite set of visible action names guarding a prefix (priority guards).
/// The guarded action fires only if the environment offers no co-action of a
/// guard member.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GuardSet(pub BTreeSet<Name>);

impl GuardSet {
    pub fn empty() -> Self {
        GuardSet(BTreeSet::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &GuardSet) -> GuardSet {
        GuardSet(self.0.union(&other.0).cloned().collect())
    }
}

/// Prefix actions: what can stand before the dot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PrefixAction {
    /// Internal step. The guard is nonempty only under priority guards.
    Tau { guard: GuardSet },
    /// CCS-style action `a` / `'a`, optionally prioritized and guarded.
    Act {
        name: Name,
        polarity: Polarity,
        level: PriorityLevel,
        guard: GuardSet,
    },
    /// Output `s!<p>` over a (possibly polyadic) subject.
    Send { subject: Tuple, payload: Tuple },
    /// Input `s?(items)` binding the pattern placeholders in the continuation.
    Receive { subject: Tuple, pattern: Pattern },
}

/// Process terms and contexts. A term without holes is a process; a term with
/// holes `1..=k` (each occurring at least once) is a k-hole context.
///
/// Binders: `Nu` binds its name in the body, `Receive` binds exactly the
/// placeholder names of its pattern in the continuation, and `Delimit` binds
/// its killer label in the body. `RestrictSet` is *not* a binder: restricted
/// labels count as free occurrences.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Term {
    Nil,
    Prefix(PrefixAction, Box<Term>),
    /// At least two branches.
    Sum(Vec<Term>),
    Par(Box<Term>, Box<Term>),
    /// Single-name restriction of the pi family.
    Nu(Name, Box<Term>),
    /// CCS-family restriction `P\{a, _b}` over (name, level) pairs.
    RestrictSet(BTreeSet<(Name, PriorityLevel)>, Box<Term>),
    /// Replication `!P`.
    Bang(Box<Term>),
    /// Name match `[a=b]P`.
    Match(Name, Name, Box<Term>),
    /// Relabelling `P` under a finite name-to-name map.
    Relabel(Box<Term>, BTreeMap<Name, Name>),
    /// Call of a parameterized definition, `A<a1, ..., an>`.
    DefCall(String, Vec<Name>),
    /// Priority operator: only maximal-priority initial actions survive.
    Theta(Box<Term>),
    /// `up(P, b)`: lifts ordinary `b`/`'b` steps of `P` to the prioritized level.
    Prioritize(Box<Term>, Name),
    /// `down(P, b)`: lowers prioritized `b`/`'b` steps of `P` to the ordinary level.
    Deprioritize(Box<Term>, Name),
    /// `kill(k)`: terminates everything concurrent inside the enclosing `[k]`.
    Kill(KillerLabel),
    /// Kill-scope delimiter `[k]P`; binds `k` in `P`.
    Delimit(KillerLabel, Box<Term>),
    /// Context hole `[_i]`, `i >= 1`.
    Hole(u32),
}

impl Term {
    pub fn prefix(action: PrefixAction, cont: Term) -> Term {
        Term::Prefix(action, Box::new(cont))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Box::new(l), Box::new(r))
    }

    pub fn nu(n: Name, body: Term) -> Term {
        Term::Nu(n, Box::new(body))
    }

    /// Immediate subterms, in a fixed order shared with profile validation
    /// and the parser's span bookkeeping.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Nil | Term::DefCall(_, _) | Term::Kill(_) | Term::Hole(_) => vec![],
            Term::Prefix(_, c) => vec![c],
            Term::Sum(bs) => bs.iter().collect(),
            Term::Par(l, r) => vec![l, r],
            Term::Nu(_, b)
            | Term::RestrictSet(_, b)
            | Term::Bang(b)
            | Term::Match(_, _, b)
            | Term::Relabel(b, _)
            | Term::Theta(b)
            | Term::Prioritize(b, _)
            | Term::Deprioritize(b, _)
            | Term::Delimit(_, b) => vec![b],
        }
    }

    /// All hole indices occurring in the term.
    pub fn holes(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut BTreeSet<u32>) {
        if let Term::Hole(i) = self {
            out.insert(*i);
        }
        for c in self.children() {
            c.collect_holes(out);
        }
    }

    pub fn is_process(&self) -> bool {
        self.holes().is_empty()
    }

    /// `true` iff the holes are exactly `1..=k` for some `k >= 1`.
    pub fn is_context(&self) -> bool {
        let hs = self.holes();
        !hs.is_empty() && hs.iter().copied().eq(1..=hs.len() as u32)
    }

    /// Does any subterm satisfy `pred`?
    pub fn any_subterm(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any_subterm(pred))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("context not a process: term contains hole [_{0}]")]
    NotAProcess(u32),
    #[error("term is not a well-formed context: holes {found:?} are not 1..={arity}")]
    BadContext { found: Vec<u32>, arity: usize },
    #[error("plug arity mismatch: context has {expected} hole(s), got {got} filler(s)")]
    PlugArity { expected: usize, got: usize },
    #[error("filler {index} contains holes")]
    FillerWithHoles { index: usize },
}

fn first_hole(t: &Term) -> Option<u32> {
    t.holes().into_iter().next()
}

/// The set of names with a free occurrence in `t`.
///
/// Every name position counts as an occurrence: action names, subjects,
/// payloads, protected pattern names, match operands, relabelling maps,
/// definition-call arguments, restriction sets, guard sets and the
/// prioritize/deprioritize action. Placeholder pattern names are binding
/// occurrences and never show up. Killer labels are not names.
pub fn free_names(t: &Term) -> Result<BTreeSet<Name>, TermError> {
    if let Some(h) = first_hole(t) {
        return Err(TermError::NotAProcess(h));
    }
    let mut out = BTreeSet::new();
    collect_free(t, &mut out);
    Ok(out)
}

/// Free names of a context, with holes contributing nothing. Used where a
/// context is legitimate input (witness validation, diagnostics).
pub fn free_names_with_holes_erased(t: &Term) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut out);
    out
}

fn collect_free(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Nil | Term::Kill(_) | Term::Hole(_) => {}
        Term::Prefix(act, cont) => {
            match act {
                PrefixAction::Tau { guard } => out.extend(guard.0.iter().cloned()),
                PrefixAction::Act { name, guard, .. } => {
                    out.insert(name.clone());
                    out.extend(guard.0.iter().cloned());
                }
                PrefixAction::Send { subject, payload } => {
                    out.extend(subject.0.iter().cloned());
                    out.extend(payload.0.iter().cloned());
                }
                PrefixAction::Receive { subject, pattern } => {
                    out.extend(subject.0.iter().cloned());
                    for it in &pattern.0 {
                        if let PatternItem::Protected(n) = it {
                            out.insert(n.clone());
                        }
                    }
                    // Placeholders bind in the continuation.
                    let mut inner = BTreeSet::new();
                    collect_free(cont, &mut inner);
                    for p in pattern.placeholders() {
                        inner.remove(p);
                    }
                    out.extend(inner);
                    return;
                }
            }
            collect_free(cont, out);
        }
        Term::Sum(bs) => {
            for b in bs {
                collect_free(b, out);
            }
        }
        Term::Par(l, r) => {
            collect_free(l, out);
            collect_free(r, out);
        }
        Term::Nu(n, body) => {
            let mut inner = BTreeSet::new();
            collect_free(body, &mut inner);
            inner.remove(n);
            out.extend(inner);
        }
        Term::RestrictSet(labels, body) => {
            out.extend(labels.iter().map(|(n, _)| n.clone()));
            collect_free(body, out);
        }
        Term::Bang(body) | Term::Theta(body) => collect_free(body, out),
        Term::Match(l, r, body) => {
            out.insert(l.clone());
            out.insert(r.clone());
            collect_free(body, out);
        }
        Term::Relabel(body, map) => {
            for (k, v) in map {
                out.insert(k.clone());
                out.insert(v.clone());
            }
            collect_free(body, out);
        }
        Term::DefCall(_, args) => out.extend(args.iter().cloned()),
        Term::Prioritize(body, n) | Term::Deprioritize(body, n) => {
            out.insert(n.clone());
            collect_free(body, out);
        }
        Term::Delimit(_, body) => collect_free(body, out),
    }
}

pub fn is_closed(t: &Term) -> Result<bool, TermError> {
    free_names(t).map(|fns| fns.is_empty())
}

/// Name independence: the free-name sets are disjoint.
pub fn independent(p: &Term, q: &Term) -> Result<bool, TermError> {
    let fp = free_names(p)?;
    let fq = free_names(q)?;
    Ok(fp.is_disjoint(&fq))
}

/// Replace `Hole(i)` by `fillers[i-1]`, literally.
///
/// This is deliberately *not* capture-avoiding: free names of a filler may be
/// captured by binders enclosing the hole. The standard substitution
/// intuition is wrong here — capture is the mechanism that lets an enclosing
/// input prefix instantiate names inside the plugged process.
pub fn plug(context: &Term, fillers: &[Term]) -> Result<Term, TermError> {
    let hs = context.holes();
    let arity = hs.len();
    if !context.is_context() {
        return Err(TermError::BadContext {
            found: hs.into_iter().collect(),
            arity,
        });
    }
    if fillers.len() != arity {
        return Err(TermError::PlugArity {
            expected: arity,
            got: fillers.len(),
        });
    }
    for (i, f) in fillers.iter().enumerate() {
        if !f.holes().is_empty() {
            return Err(TermError::FillerWithHoles { index: i + 1 });
        }
    }
    Ok(plug_rec(context, fillers))
}

fn plug_rec(t: &Term, fillers: &[Term]) -> Term {
    match t {
        Term::Hole(i) => fillers[(*i - 1) as usize].clone(),
        Term::Nil | Term::Kill(_) | Term::DefCall(_, _) => t.clone(),
        Term::Prefix(a, c) => Term::Prefix(a.clone(), Box::new(plug_rec(c, fillers))),
        Term::Sum(bs) => Term::Sum(bs.iter().map(|b| plug_rec(b, fillers)).collect()),
        Term::Par(l, r) => Term::par(plug_rec(l, fillers), plug_rec(r, fillers)),
        Term::Nu(n, b) => Term::Nu(n.clone(), Box::new(plug_rec(b, fillers))),
        Term::RestrictSet(ls, b) => Term::RestrictSet(ls.clone(), Box::new(plug_rec(b, fillers))),
        Term::Bang(b) => Term::Bang(Box::new(plug_rec(b, fillers))),
        Term::Match(l, r, b) => Term::Match(l.clone(), r.clone(), Box::new(plug_rec(b, fillers))),
        Term::Relabel(b, m) => Term::Relabel(Box::new(plug_rec(b, fillers)), m.clone()),
        Term::Theta(b) => Term::Theta(Box::new(plug_rec(b, fillers))),
        Term::Prioritize(b, n) => Term::Prioritize(Box::new(plug_rec(b, fillers)), n.clone()),
        Term::Deprioritize(b, n) => Term::Deprioritize(Box::new(plug_rec(b, fillers)), n.clone()),
        Term::Delimit(k, b) => Term::Delimit(k.clone(), Box::new(plug_rec(b, fillers))),
    }
}
