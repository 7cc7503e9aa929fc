//! Bounded state-space exploration, the weak transition closure and the
//! three-valued visibility predicates.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::names::{Name, Polarity};
use crate::profile::CalculusProfile;
use crate::sos::{transitions_bounded, transitions_with_universe, Label, SosError, Step, Universe};
use crate::subst::alpha_canonical;
use crate::term::Term;

/// Exploration limits; all at least 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ExplorationBounds {
    pub max_states: usize,
    pub max_depth: usize,
    /// Replication copies materialized along any path.
    pub max_bang_unfold: usize,
}

impl Default for ExplorationBounds {
    fn default() -> Self {
        ExplorationBounds {
            max_states: 10_000,
            max_depth: 64,
            max_bang_unfold: 3,
        }
    }
}

impl ExplorationBounds {
    pub fn scaled(&self, factor: usize) -> ExplorationBounds {
        ExplorationBounds {
            max_states: self.max_states.saturating_mul(factor),
            max_depth: self.max_depth.saturating_mul(factor),
            max_bang_unfold: self.max_bang_unfold.saturating_mul(factor),
        }
    }
}

/// Which bound cut the exploration short.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum BoundHit {
    MaxStates,
    MaxDepth,
    MaxBangUnfold,
}

impl BoundHit {
    pub fn identifier(self) -> &'static str {
        match self {
            BoundHit::MaxStates => "max_states",
            BoundHit::MaxDepth => "max_depth",
            BoundHit::MaxBangUnfold => "max_bang_unfold",
        }
    }
}

impl fmt::Display for BoundHit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.identifier())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Edge {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
}

/// A finite explored transition graph. States are alpha-canonical terms,
/// deduplicated structurally; `complete` is true iff exploration exhausted
/// every reachable state within the bounds.
#[derive(Clone, Debug)]
pub struct Lts {
    pub states: Vec<Term>,
    pub root: usize,
    pub edges: Vec<Edge>,
    pub complete: bool,
    pub bounds_used: ExplorationBounds,
    pub truncated_by: Option<BoundHit>,
    /// Input-instantiation universe the exploration ran with; kept so traces
    /// can be replayed through the transition function.
    pub universe: Universe,
    adjacency: Vec<Vec<usize>>,
}

impl Lts {
    fn new(
        states: Vec<Term>,
        root: usize,
        edges: Vec<Edge>,
        complete: bool,
        bounds_used: ExplorationBounds,
        truncated_by: Option<BoundHit>,
        universe: Universe,
    ) -> Lts {
        let mut adjacency = vec![Vec::new(); states.len()];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.src].push(i);
        }
        Lts {
            states,
            root,
            edges,
            complete,
            bounds_used,
            truncated_by,
            universe,
            adjacency,
        }
    }

    /// Build an LTS from explicit edges, for imported or synthetic systems.
    /// States are given opaque placeholder terms.
    pub fn from_edges(n_states: usize, root: usize, edges: Vec<(usize, Label, usize)>) -> Lts {
        assert!(root < n_states, "root out of range");
        let states = (0..n_states)
            .map(|i| Term::DefCall(format!("s{i}"), vec![]))
            .collect::<Vec<_>>();
        let edges = edges
            .into_iter()
            .map(|(src, label, dst)| {
                assert!(src < n_states && dst < n_states, "edge out of range");
                Edge { src, label, dst }
            })
            .collect();
        Lts::new(
            states,
            root,
            edges,
            true,
            ExplorationBounds::default(),
            None,
            Universe {
                names: BTreeSet::new(),
            },
        )
    }

    pub fn out_edges(&self, s: usize) -> impl Iterator<Item = &Edge> {
        self.adjacency[s].iter().map(move |&i| &self.edges[i])
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Graphviz rendering: one node per state labelled with the printed term,
    /// one edge per step labelled with the printed label.
    pub fn to_dot(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "digraph lts {{");
        let _ = writeln!(out, "    rankdir=LR;");
        let _ = writeln!(out, "    node [shape=box, fontname=\"monospace\"];");
        for (i, t) in self.states.iter().enumerate() {
            let shape = if i == self.root {
                ", peripheries=2"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "    s{} [label=\"{}\"{}];",
                i,
                escape_dot(&t.to_string()),
                shape
            );
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "    s{} -> s{} [label=\"{}\"];",
                e.src,
                e.dst,
                escape_dot(&e.label.to_string())
            );
        }
        let _ = writeln!(out, "}}");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "states": self.states.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "src": e.src,
                "label": e.label.to_string(),
                "dst": e.dst,
            })).collect::<Vec<_>>(),
            "root": self.root,
            "complete": self.complete,
        })
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Breadth-first closure under the transition relation, deduplicating states
/// by alpha-canonical form. Stops at the bounds and reports `complete=false`.
pub fn explore(
    t: &Term,
    profile: &CalculusProfile,
    bounds: &ExplorationBounds,
) -> Result<Lts, SosError> {
    let universe = Universe::for_term(&alpha_canonical(t));
    explore_with_universe(t, profile, bounds, &universe)
}

/// As [`explore`] with a caller-supplied universe. Two systems that will be
/// compared by simulation must be explored with a shared universe so their
/// input labels align.
pub fn explore_with_universe(
    t: &Term,
    profile: &CalculusProfile,
    bounds: &ExplorationBounds,
    universe: &Universe,
) -> Result<Lts, SosError> {
    // Bounds are all at least 1; zeros are treated as 1.
    let bounds = &ExplorationBounds {
        max_states: bounds.max_states.max(1),
        max_depth: bounds.max_depth.max(1),
        max_bang_unfold: bounds.max_bang_unfold.max(1),
    };
    let root = alpha_canonical(t);
    let mut states: Vec<Term> = vec![root.clone()];
    let mut index: HashMap<Term, usize> = HashMap::from([(root, 0)]);
    let mut depth: Vec<usize> = vec![0];
    let mut unfolds: Vec<usize> = vec![0];
    let mut edges: Vec<Edge> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    let mut complete = true;
    let mut truncated_by: Option<BoundHit> = None;
    let cut = |complete: &mut bool, truncated: &mut Option<BoundHit>, hit: BoundHit| {
        *complete = false;
        truncated.get_or_insert(hit);
    };

    while let Some(s) = queue.pop_front() {
        let allow_bang = unfolds[s] < bounds.max_bang_unfold;
        let (steps, truncated) = transitions_bounded(&states[s], profile, universe, allow_bang)?;
        if truncated {
            cut(&mut complete, &mut truncated_by, BoundHit::MaxBangUnfold);
        }
        if depth[s] >= bounds.max_depth {
            if !steps.is_empty() {
                cut(&mut complete, &mut truncated_by, BoundHit::MaxDepth);
            }
            continue;
        }
        for step in steps {
            let used_unfold = step_unfolds(&states[s], &step, profile);
            let dst = match index.get(&step.target) {
                Some(&i) => i,
                None => {
                    if states.len() >= bounds.max_states {
                        cut(&mut complete, &mut truncated_by, BoundHit::MaxStates);
                        continue;
                    }
                    let i = states.len();
                    states.push(step.target.clone());
                    index.insert(step.target.clone(), i);
                    depth.push(depth[s] + 1);
                    unfolds.push(unfolds[s] + usize::from(used_unfold));
                    queue.push_back(i);
                    i
                }
            };
            edges.push(Edge {
                src: s,
                label: step.label,
                dst,
            });
        }
    }
    Ok(Lts::new(
        states,
        0,
        edges,
        complete,
        *bounds,
        truncated_by,
        universe.clone(),
    ))
}

/// Whether a step's derivation may have unfolded a replication. Conservative:
/// any step of a term containing replication counts.
fn step_unfolds(src: &Term, _step: &Step, profile: &CalculusProfile) -> bool {
    matches!(profile, CalculusProfile::Pi | CalculusProfile::PiMpm)
        && src.any_subterm(&|t| matches!(t, Term::Bang(_)))
}

/// All states reachable from `s` via zero or more invisible edges.
pub fn weak_reach(lts: &Lts, s: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(q) = queue.pop_front() {
        for e in lts.out_edges(q) {
            if e.label.is_invisible() && seen.insert(e.dst) {
                queue.push_back(e.dst);
            }
        }
    }
    seen
}

/// Three-valued outcome of a bounded check. A positive visibility verdict
/// carries a witness trace: invisible steps followed by one visible step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Holds(Option<Vec<Step>>),
    Fails,
    Unknown(BoundHit),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails)
    }

    pub fn trace(&self) -> Option<&[Step]> {
        match self {
            Verdict::Holds(Some(tr)) => Some(tr),
            _ => None,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Verdict::Holds(_) => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds(_) => write!(f, "holds"),
            Verdict::Fails => write!(f, "fails"),
            Verdict::Unknown(b) => write!(f, "unknown ({b})"),
        }
    }
}

/// A visible-label pattern: subject (single name for ccs-style actions) and
/// polarity, with the payload optionally constrained.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelPattern {
    pub subject: Vec<Name>,
    pub polarity: Polarity,
    pub payload: Option<Vec<Name>>,
}

impl LabelPattern {
    pub fn act(name: Name, polarity: Polarity) -> LabelPattern {
        LabelPattern {
            subject: vec![name],
            polarity,
            payload: None,
        }
    }

    pub fn matches(&self, label: &Label) -> bool {
        match label {
            Label::Act { name, polarity, .. } => {
                self.subject.len() == 1
                    && self.subject[0] == *name
                    && self.polarity == *polarity
                    && self.payload.is_none()
            }
            Label::Send {
                subject, payload, ..
            } => {
                self.polarity == Polarity::Output
                    && self.subject == subject.0
                    && self.payload.as_ref().is_none_or(|p| *p == payload.0)
            }
            Label::Receive { subject, received } => {
                self.polarity == Polarity::Input
                    && self.subject == subject.0
                    && self.payload.as_ref().is_none_or(|p| *p == received.0)
            }
            Label::Tau { .. } | Label::Kill(_) => false,
        }
    }
}

fn unknown_reason(lts: &Lts) -> BoundHit {
    lts.truncated_by.unwrap_or(BoundHit::MaxStates)
}

/// Search an explored LTS for a weakly reachable edge satisfying `accept`.
fn search_visible(lts: &Lts, accept: &dyn Fn(&Label) -> bool) -> Verdict {
    // BFS over invisible edges with predecessor tracking for the trace.
    let mut parent: HashMap<usize, (usize, usize)> = HashMap::new(); // state -> (pred state, edge idx)
    let mut seen = BTreeSet::from([lts.root]);
    let mut queue = VecDeque::from([lts.root]);
    while let Some(q) = queue.pop_front() {
        for (i, e) in lts.adjacency[q].iter().map(|&i| (i, &lts.edges[i])) {
            if e.label.is_visible() && accept(&e.label) {
                let mut trace = vec![Step {
                    label: e.label.clone(),
                    target: lts.states[e.dst].clone(),
                }];
                let mut cur = q;
                while let Some(&(pred, edge_idx)) = parent.get(&cur) {
                    let pe = &lts.edges[edge_idx];
                    trace.push(Step {
                        label: pe.label.clone(),
                        target: lts.states[pe.dst].clone(),
                    });
                    cur = pred;
                }
                trace.reverse();
                return Verdict::Holds(Some(trace));
            }
            if e.label.is_invisible() && seen.insert(e.dst) {
                parent.insert(e.dst, (q, i));
                queue.push_back(e.dst);
            }
        }
    }
    if lts.complete {
        Verdict::Fails
    } else {
        Verdict::Unknown(unknown_reason(lts))
    }
}

/// Can the process weakly perform a visible action matching `pattern`?
pub fn can_perform(
    t: &Term,
    profile: &CalculusProfile,
    bounds: &ExplorationBounds,
    pattern: &LabelPattern,
) -> Result<Verdict, SosError> {
    let lts = explore(t, profile, bounds)?;
    Ok(can_perform_lts(&lts, pattern))
}

pub fn can_perform_lts(lts: &Lts, pattern: &LabelPattern) -> Verdict {
    search_visible(lts, &|l| pattern.matches(l))
}

/// Is the process visible, i.e. can it weakly perform any visible action?
pub fn is_visible(
    t: &Term,
    profile: &CalculusProfile,
    bounds: &ExplorationBounds,
) -> Result<Verdict, SosError> {
    let lts = explore(t, profile, bounds)?;
    Ok(is_visible_lts(&lts))
}

pub fn is_visible_lts(lts: &Lts) -> Verdict {
    search_visible(lts, &|_| true)
}

/// Logical negation of [`is_visible`], with `Unknown` preserved. The positive
/// verdict carries no witness (it asserts the absence of one).
pub fn is_invisible(
    t: &Term,
    profile: &CalculusProfile,
    bounds: &ExplorationBounds,
) -> Result<Verdict, SosError> {
    let lts = explore(t, profile, bounds)?;
    Ok(is_invisible_lts(&lts))
}

pub fn is_invisible_lts(lts: &Lts) -> Verdict {
    match is_visible_lts(lts) {
        Verdict::Holds(_) => Verdict::Fails,
        Verdict::Fails => Verdict::Holds(None),
        Verdict::Unknown(b) => Verdict::Unknown(b),
    }
}

/// Replay a trace step-by-step through the transition function (with the
/// universe the LTS was explored under). True iff every step is derivable.
pub fn replay_trace(
    t: &Term,
    profile: &CalculusProfile,
    universe: &Universe,
    trace: &[Step],
) -> Result<bool, SosError> {
    let mut current = alpha_canonical(t);
    for step in trace {
        let steps = transitions_with_universe(&current, profile, universe)?;
        if !steps.contains(step) {
            return Ok(false);
        }
        current = step.target.clone();
    }
    Ok(true)
}
