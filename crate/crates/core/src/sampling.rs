//! Seeded random generation of terms, contexts and transition systems, used
//! by the randomized verification suites and the `sample` command.
//!
//! Invisible candidates are built so that every reachable prefix has a bound
//! subject (restriction over the whole subject pool), which makes them
//! invisible by construction; callers certify the property with
//! [`crate::lts::is_invisible`] anyway and discard the rare failures.

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

use crate::lts::Lts;
use crate::names::{Name, Polarity, PriorityLevel};
use crate::sos::Label;
use crate::term::{
    free_names_with_holes_erased, GuardSet, Pattern, PatternItem, PrefixAction, Term, Tuple,
};

pub fn rng_from_seed(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

const CCS_NAMES: [&str; 3] = ["a", "b", "c"];
const PI_SUBJECTS: [&str; 2] = ["x", "y"];
const PI_PAYLOADS: [&str; 3] = ["a", "b", "c"];

fn name(rng: &mut StdRng, pool: &[&str]) -> Name {
    Name::new(*pool.choose(rng).unwrap())
}

// ---------------------------------------------------------------------------
// CCS
// ---------------------------------------------------------------------------

fn ccs_act(rng: &mut StdRng) -> PrefixAction {
    PrefixAction::Act {
        name: name(rng, &CCS_NAMES),
        polarity: if rng.random_bool(0.5) {
            Polarity::Input
        } else {
            Polarity::Output
        },
        level: PriorityLevel::Ordinary,
        guard: GuardSet::empty(),
    }
}

/// A finite-control CCS process: prefixes, sums, parallel and restriction,
/// no definitions.
pub fn gen_ccs_process(rng: &mut StdRng, depth: u32) -> Term {
    if depth == 0 {
        return Term::Nil;
    }
    match rng.random_range(0..10u32) {
        0 | 1 => Term::Nil,
        2 | 3 => Term::prefix(ccs_act(rng), gen_ccs_process(rng, depth - 1)),
        4 => Term::prefix(
            PrefixAction::Tau {
                guard: GuardSet::empty(),
            },
            gen_ccs_process(rng, depth - 1),
        ),
        5 | 6 => Term::Sum(vec![
            gen_ccs_process(rng, depth - 1),
            gen_ccs_process(rng, depth - 1),
        ]),
        7 | 8 => Term::par(
            gen_ccs_process(rng, depth - 1),
            gen_ccs_process(rng, depth - 1),
        ),
        _ => {
            let labels: BTreeSet<(Name, PriorityLevel)> = CCS_NAMES
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .map(|n| (Name::new(*n), PriorityLevel::Ordinary))
                .collect();
            let body = gen_ccs_process(rng, depth - 1);
            if labels.is_empty() {
                body
            } else {
                Term::RestrictSet(labels, Box::new(body))
            }
        }
    }
}

/// An invisible CCS candidate: a random process restricted over the whole
/// name pool, so only internal steps survive.
pub fn gen_ccs_invisible(rng: &mut StdRng, depth: u32) -> Term {
    let body = gen_ccs_process(rng, depth);
    let labels: BTreeSet<(Name, PriorityLevel)> = CCS_NAMES
        .iter()
        .map(|n| (Name::new(*n), PriorityLevel::Ordinary))
        .collect();
    Term::RestrictSet(labels, Box::new(body))
}

/// A one-hole CCS context: the hole wrapped in random layers.
pub fn gen_ccs_context(rng: &mut StdRng, layers: u32) -> Term {
    let mut ctx = Term::Hole(1);
    for _ in 0..layers {
        ctx = match rng.random_range(0..8u32) {
            0 | 1 => Term::prefix(ccs_act(rng), ctx),
            2 => Term::prefix(
                PrefixAction::Tau {
                    guard: GuardSet::empty(),
                },
                ctx,
            ),
            3 => Term::Sum(vec![ctx, gen_ccs_process(rng, 2)]),
            4 => Term::Sum(vec![gen_ccs_process(rng, 2), ctx]),
            5 => Term::par(ctx, gen_ccs_process(rng, 2)),
            6 => Term::par(gen_ccs_process(rng, 2), ctx),
            _ => {
                let labels: BTreeSet<(Name, PriorityLevel)> = CCS_NAMES
                    .iter()
                    .filter(|_| rng.random_bool(0.4))
                    .map(|n| (Name::new(*n), PriorityLevel::Ordinary))
                    .collect();
                if labels.is_empty() {
                    ctx
                } else {
                    Term::RestrictSet(labels, Box::new(ctx))
                }
            }
        };
    }
    ctx
}

// ---------------------------------------------------------------------------
// Pi family
// ---------------------------------------------------------------------------

/// Controls which constructs the pi generator may emit.
#[derive(Clone, Copy, Debug)]
pub struct PiGenOptions {
    /// Allow the name-match operator.
    pub matching: bool,
    /// Allow polyadic subjects/payloads and protected pattern names.
    pub mpm: bool,
}

impl PiGenOptions {
    pub fn plain() -> Self {
        PiGenOptions {
            matching: false,
            mpm: false,
        }
    }

    pub fn full() -> Self {
        PiGenOptions {
            matching: true,
            mpm: true,
        }
    }
}

fn pi_subject(rng: &mut StdRng, opts: PiGenOptions) -> Tuple {
    if opts.mpm && rng.random_bool(0.3) {
        Tuple(vec![name(rng, &PI_SUBJECTS), name(rng, &PI_PAYLOADS)])
    } else {
        Tuple::single(name(rng, &PI_SUBJECTS))
    }
}

fn pi_payload(rng: &mut StdRng, opts: PiGenOptions, arity: usize) -> Tuple {
    let n = if opts.mpm { arity } else { 1 };
    Tuple((0..n).map(|_| name(rng, &PI_PAYLOADS)).collect())
}

fn pi_pattern(rng: &mut StdRng, opts: PiGenOptions, fresh: &mut u32) -> Pattern {
    let arity = if opts.mpm && rng.random_bool(0.3) {
        2
    } else {
        1
    };
    Pattern(
        (0..arity)
            .map(|_| {
                if opts.mpm && rng.random_bool(0.3) {
                    PatternItem::Protected(name(rng, &PI_PAYLOADS))
                } else {
                    *fresh += 1;
                    PatternItem::Placeholder(Name::new(format!("w{fresh}")))
                }
            })
            .collect(),
    )
}

fn gen_pi_rec(rng: &mut StdRng, depth: u32, opts: PiGenOptions, fresh: &mut u32) -> Term {
    if depth == 0 {
        return Term::Nil;
    }
    match rng.random_range(0..10u32) {
        0 | 1 => Term::Nil,
        2 | 3 => {
            let subject = pi_subject(rng, opts);
            let payload = pi_payload(rng, opts, 2);
            Term::prefix(
                PrefixAction::Send { subject, payload },
                gen_pi_rec(rng, depth - 1, opts, fresh),
            )
        }
        4 | 5 => {
            let subject = pi_subject(rng, opts);
            let pattern = pi_pattern(rng, opts, fresh);
            Term::prefix(
                PrefixAction::Receive { subject, pattern },
                gen_pi_rec(rng, depth - 1, opts, fresh),
            )
        }
        6 => Term::prefix(
            PrefixAction::Tau {
                guard: GuardSet::empty(),
            },
            gen_pi_rec(rng, depth - 1, opts, fresh),
        ),
        7 => Term::Sum(vec![
            gen_pi_rec(rng, depth - 1, opts, fresh),
            gen_pi_rec(rng, depth - 1, opts, fresh),
        ]),
        8 => Term::par(
            gen_pi_rec(rng, depth - 1, opts, fresh),
            gen_pi_rec(rng, depth - 1, opts, fresh),
        ),
        _ => {
            if opts.matching && rng.random_bool(0.6) {
                Term::Match(
                    name(rng, &PI_PAYLOADS),
                    name(rng, &PI_PAYLOADS),
                    Box::new(gen_pi_rec(rng, depth - 1, opts, fresh)),
                )
            } else {
                Term::nu(
                    name(rng, &PI_SUBJECTS),
                    gen_pi_rec(rng, depth - 1, opts, fresh),
                )
            }
        }
    }
}

/// A pi-family process. Subjects and payloads are drawn from disjoint pools
/// and restriction binds subject names only, so bound names never sit in
/// payload position (no scope extrusion in generated terms).
pub fn gen_pi_process(rng: &mut StdRng, depth: u32, opts: PiGenOptions) -> Term {
    let mut fresh = 0;
    gen_pi_rec(rng, depth, opts, &mut fresh)
}

/// An invisible pi candidate: every free subject name gets restricted.
pub fn gen_pi_invisible(rng: &mut StdRng, depth: u32, opts: PiGenOptions) -> Term {
    let body = gen_pi_process(rng, depth, opts);
    restrict_subjects(body)
}

fn restrict_subjects(body: Term) -> Term {
    let free = free_names_with_holes_erased(&body);
    let mut t = body;
    for s in PI_SUBJECTS {
        let n = Name::new(s);
        if free.contains(&n) {
            t = Term::nu(n, t);
        }
    }
    t
}

/// A closed invisible pi candidate: all free names restricted.
pub fn gen_pi_closed_invisible(rng: &mut StdRng, depth: u32, opts: PiGenOptions) -> Term {
    let body = gen_pi_process(rng, depth, opts);
    let free = free_names_with_holes_erased(&body);
    let mut t = body;
    for n in free {
        t = Term::nu(n, t);
    }
    t
}

/// A one-hole pi context; input prefixes above the hole generate the
/// substitutions that matter for the freeness checks.
pub fn gen_pi_context(rng: &mut StdRng, layers: u32, opts: PiGenOptions) -> Term {
    let mut fresh = 100;
    let mut ctx = Term::Hole(1);
    for _ in 0..layers {
        ctx = match rng.random_range(0..8u32) {
            0 | 1 => {
                let subject = pi_subject(rng, opts);
                let pattern = pi_pattern(rng, opts, &mut fresh);
                Term::prefix(PrefixAction::Receive { subject, pattern }, ctx)
            }
            2 => {
                let subject = pi_subject(rng, opts);
                let payload = pi_payload(rng, opts, 2);
                Term::prefix(PrefixAction::Send { subject, payload }, ctx)
            }
            3 => Term::Sum(vec![ctx, gen_pi_process(rng, 2, opts)]),
            4 => Term::par(ctx, gen_pi_process(rng, 2, opts)),
            5 => Term::par(gen_pi_process(rng, 2, opts), ctx),
            6 => Term::nu(name(rng, &PI_SUBJECTS), ctx),
            _ => {
                if opts.matching {
                    Term::Match(
                        name(rng, &PI_PAYLOADS),
                        name(rng, &PI_PAYLOADS),
                        Box::new(ctx),
                    )
                } else {
                    Term::prefix(
                        PrefixAction::Tau {
                            guard: GuardSet::empty(),
                        },
                        ctx,
                    )
                }
            }
        };
    }
    ctx
}

// ---------------------------------------------------------------------------
// Random transition systems
// ---------------------------------------------------------------------------

fn random_label(rng: &mut StdRng) -> Label {
    match rng.random_range(0..4u32) {
        0 => Label::tau(),
        1 => Label::Act {
            name: Name::new("a"),
            polarity: Polarity::Input,
            level: PriorityLevel::Ordinary,
            guard: GuardSet::empty(),
        },
        2 => Label::Act {
            name: Name::new("a"),
            polarity: Polarity::Output,
            level: PriorityLevel::Ordinary,
            guard: GuardSet::empty(),
        },
        _ => Label::Act {
            name: Name::new("b"),
            polarity: Polarity::Input,
            level: PriorityLevel::Ordinary,
            guard: GuardSet::empty(),
        },
    }
}

/// A random finite LTS over a small label alphabet.
pub fn gen_random_lts(rng: &mut StdRng, max_states: usize) -> Lts {
    let n = rng.random_range(1..=max_states.max(1));
    let mut edges = Vec::new();
    for src in 0..n {
        let degree = rng.random_range(0..=3u32);
        for _ in 0..degree {
            edges.push((src, random_label(rng), rng.random_range(0..n)));
        }
    }
    Lts::from_edges(n, 0, edges)
}
