//! Stratified simulation on explored transition systems and its greatest
//! fixpoint, computed two independent ways.
//!
//! The stratified relation starts from the universal relation; each stratum
//! demands that every move of the left system is weakly matched by the right
//! system into the previous stratum. On finite systems the chain is
//! decreasing, so it converges; the worklist algorithm computes the greatest
//! weak simulation directly as a cross-check.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::lts::{BoundHit, Lts};
use crate::sos::Label;

/// A set of state pairs (left-system state, right-system state) together with
/// the stratum it represents.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SimRelation {
    pub pairs: BTreeSet<(usize, usize)>,
    pub depth: SimDepth,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SimDepth {
    K(u32),
    /// Fixpoint, with the stratum index at which the chain stabilized.
    Omega {
        converged_at: u32,
    },
}

impl SimRelation {
    pub fn contains_roots(&self, lq: &Lts, lp: &Lts) -> bool {
        self.pairs.contains(&(lq.root, lp.root))
    }

    /// Relation dump as JSON pairs of state indices.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "depth": match self.depth {
                SimDepth::K(k) => serde_json::json!(k),
                SimDepth::Omega { converged_at } =>
                    serde_json::json!({"omega": true, "converged_at": converged_at}),
            },
            "pairs": self.pairs.iter().map(|(q, p)| serde_json::json!([q, p])).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("{side} system is incomplete (hit {bound}); simulation needs complete state spaces")]
    Incomplete { side: &'static str, bound: BoundHit },
}

fn require_complete(lq: &Lts, lp: &Lts) -> Result<(), SimError> {
    if !lq.complete {
        return Err(SimError::Incomplete {
            side: "left",
            bound: lq.truncated_by.unwrap_or(BoundHit::MaxStates),
        });
    }
    if !lp.complete {
        return Err(SimError::Incomplete {
            side: "right",
            bound: lp.truncated_by.unwrap_or(BoundHit::MaxStates),
        });
    }
    Ok(())
}

/// Precomputed weak-move tables of the right-hand system.
struct WeakMoves {
    /// Invisible closure: states reachable via zero or more invisible edges.
    closure: Vec<BTreeSet<usize>>,
    /// For each state, targets of a weak visible move per label.
    visible: Vec<BTreeMap<Label, BTreeSet<usize>>>,
}

impl WeakMoves {
    fn build(lts: &Lts) -> WeakMoves {
        let n = lts.state_count();
        let closure: Vec<BTreeSet<usize>> =
            (0..n).map(|s| crate::lts::weak_reach(lts, s)).collect();
        let mut visible: Vec<BTreeMap<Label, BTreeSet<usize>>> = vec![BTreeMap::new(); n];
        for p in 0..n {
            for &p1 in &closure[p] {
                for e in lts.out_edges(p1) {
                    if e.label.is_visible() {
                        let entry = visible[p].entry(e.label.clone()).or_default();
                        entry.extend(closure[e.dst].iter().copied());
                    }
                }
            }
        }
        WeakMoves { closure, visible }
    }

    /// Does `p` weakly match a move labelled `label` into a state such that
    /// the resulting pair survives `relation`?
    fn matches(
        &self,
        p: usize,
        label: &Label,
        q_target: usize,
        relation: &BTreeSet<(usize, usize)>,
    ) -> bool {
        if label.is_invisible() {
            self.closure[p]
                .iter()
                .any(|&p2| relation.contains(&(q_target, p2)))
        } else {
            self.visible[p]
                .get(label)
                .is_some_and(|ts| ts.iter().any(|&p2| relation.contains(&(q_target, p2))))
        }
    }
}

fn universal(lq: &Lts, lp: &Lts) -> BTreeSet<(usize, usize)> {
    let mut pairs = BTreeSet::new();
    for q in 0..lq.state_count() {
        for p in 0..lp.state_count() {
            pairs.insert((q, p));
        }
    }
    pairs
}

fn transfer(
    lq: &Lts,
    moves: &WeakMoves,
    relation: &BTreeSet<(usize, usize)>,
) -> BTreeSet<(usize, usize)> {
    relation
        .iter()
        .filter(|&&(q, p)| {
            lq.out_edges(q)
                .all(|e| moves.matches(p, &e.label, e.dst, relation))
        })
        .copied()
        .collect()
}

/// The k-th stratum: the universal relation refined `k` times.
pub fn sim_k(lq: &Lts, lp: &Lts, k: u32) -> Result<SimRelation, SimError> {
    require_complete(lq, lp)?;
    let moves = WeakMoves::build(lp);
    let mut relation = universal(lq, lp);
    for _ in 0..k {
        let next = transfer(lq, &moves, &relation);
        if next == relation {
            break;
        }
        relation = next;
    }
    Ok(SimRelation {
        pairs: relation,
        depth: SimDepth::K(k),
    })
}

/// Iterate the strata to their limit. Returns the fixpoint and the stratum
/// index at which the chain stabilized.
pub fn sim_omega(lq: &Lts, lp: &Lts) -> Result<SimRelation, SimError> {
    require_complete(lq, lp)?;
    let moves = WeakMoves::build(lp);
    let mut relation = universal(lq, lp);
    let mut k = 0u32;
    loop {
        let next = transfer(lq, &moves, &relation);
        if next == relation {
            return Ok(SimRelation {
                pairs: relation,
                depth: SimDepth::Omega { converged_at: k },
            });
        }
        relation = next;
        k += 1;
    }
}

/// Least stratum at which the root pair drops out, or `None` if the fixpoint
/// retains it.
pub fn distinguishing_depth(lq: &Lts, lp: &Lts) -> Result<Option<u32>, SimError> {
    require_complete(lq, lp)?;
    let moves = WeakMoves::build(lp);
    let roots = (lq.root, lp.root);
    let mut relation = universal(lq, lp);
    let mut k = 0u32;
    loop {
        if !relation.contains(&roots) {
            return Ok(Some(k));
        }
        let next = transfer(lq, &moves, &relation);
        if next == relation {
            return Ok(None);
        }
        relation = next;
        k += 1;
    }
}

/// A sequence of left-system moves demonstrating that the roots are not
/// related, or `None` when they are.
pub fn distinguishing_trace(lq: &Lts, lp: &Lts) -> Result<Option<Vec<Label>>, SimError> {
    require_complete(lq, lp)?;
    let moves = WeakMoves::build(lp);
    // Keep all strata for the walk-down.
    let mut strata = vec![universal(lq, lp)];
    loop {
        let next = transfer(lq, &moves, strata.last().unwrap());
        if &next == strata.last().unwrap() {
            break;
        }
        strata.push(next);
    }
    let fix = strata.last().unwrap();
    if fix.contains(&(lq.root, lp.root)) {
        return Ok(None);
    }
    let mut trace = Vec::new();
    let (mut q, mut p) = (lq.root, lp.root);
    // Walk down: at each level pick an unmatched move of q, then descend
    // along the strongest continuation of p.
    while let Some(k) = (0..strata.len()).find(|&k| !strata[k].contains(&(q, p))) {
        debug_assert!(k >= 1, "pairs cannot drop from the universal relation");
        let prev = &strata[k - 1];
        // Find a move of q unmatched into the previous stratum.
        let Some(edge) = lq
            .out_edges(q)
            .find(|e| !moves.matches(p, &e.label, e.dst, prev))
        else {
            break;
        };
        trace.push(edge.label.clone());
        // Descend along the strongest surviving continuation, if any.
        let candidates: Vec<usize> = if edge.label.is_invisible() {
            moves.closure[p].iter().copied().collect()
        } else {
            moves.visible[p]
                .get(&edge.label)
                .map(|s| s.iter().copied().collect())
                .unwrap_or_default()
        };
        let Some(&p2) = candidates
            .iter()
            .max_by_key(|&&p2| (0..strata.len()).find(|&k| !strata[k].contains(&(edge.dst, p2))))
        else {
            break; // no continuation at all: the move itself distinguishes
        };
        q = edge.dst;
        p = p2;
    }
    Ok(Some(trace))
}

/// Greatest weak simulation by worklist refinement, used to cross-check the
/// stratified fixpoint. Starts from the universal relation and deletes
/// violating pairs, re-examining dependants of every deletion.
pub fn weak_simulation_gfp(lq: &Lts, lp: &Lts) -> Result<BTreeSet<(usize, usize)>, SimError> {
    require_complete(lq, lp)?;
    let moves = WeakMoves::build(lp);
    let mut relation = universal(lq, lp);
    // Reverse reachability on the left system, for targeted rechecks.
    let mut preds_q: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); lq.state_count()];
    for e in &lq.edges {
        preds_q[e.dst].insert(e.src);
    }
    let mut work: VecDeque<(usize, usize)> = relation.iter().copied().collect();
    let mut queued: BTreeSet<(usize, usize)> = relation.clone();
    while let Some((q, p)) = work.pop_front() {
        queued.remove(&(q, p));
        if !relation.contains(&(q, p)) {
            continue;
        }
        let ok = lq
            .out_edges(q)
            .all(|e| moves.matches(p, &e.label, e.dst, &relation));
        if ok {
            continue;
        }
        relation.remove(&(q, p));
        // Any pair whose left state can reach q might have used (q, p).
        for &qp in &preds_q[q] {
            for pp in 0..lp.state_count() {
                if relation.contains(&(qp, pp)) && queued.insert((qp, pp)) {
                    work.push_back((qp, pp));
                }
            }
        }
    }
    Ok(relation)
}

impl fmt::Display for SimDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimDepth::K(k) => write!(f, "k={k}"),
            SimDepth::Omega { converged_at } => write!(f, "omega (converged at {converged_at})"),
        }
    }
}


#[cfg(test)]
mod depth_tests {
    use super::*;
    use crate::lts::{explore_with_universe, ExplorationBounds};
    use crate::profile::CalculusProfile;
    use crate::sos::Universe;
    use crate::surface::parse_unchecked;

    #[test]
    fn no_distinguishing_depth_for_related_roots() {
        let q = parse_unchecked("0").unwrap();
        let p = parse_unchecked("0").unwrap();
        let uni = Universe::for_terms(&[&q, &p]);
        let bounds = ExplorationBounds::default();
        let profile = CalculusProfile::ccs();
        let lq = explore_with_universe(&q, &profile, &bounds, &uni).unwrap();
        let lp = explore_with_universe(&p, &profile, &bounds, &uni).unwrap();
        assert_eq!(distinguishing_depth(&lq, &lp).unwrap(), None);
        assert_eq!(distinguishing_trace(&lq, &lp).unwrap(), None);
    }
}
