//! Shared fixtures for the criterion benchmarks.

use repfree_core::profile::CalculusProfile;
use repfree_core::surface::parse_unchecked;
use repfree_core::term::Term;

/// The match-unblocking context with its invisible process plugged in.
pub fn match_system() -> (Term, CalculusProfile) {
    let t = parse_unchecked("(new x)(x?(a).[a=b] y!<c> | x!<b>)").unwrap();
    (t, CalculusProfile::Pi)
}

/// A ccs system with enough interleaving to exercise the explorer.
pub fn interleaving_system() -> (Term, CalculusProfile) {
    let t = parse_unchecked("(a.b.0 | 'a.c.0 | b.'c.0 | 'b.0) + tau.(a.0 | 'a.0 | a.0 | 'a.0)")
        .unwrap();
    (t, CalculusProfile::ccs())
}

/// Two systems whose simulation check needs several strata.
pub fn sim_pair() -> (Term, Term, CalculusProfile) {
    let q = parse_unchecked("a.(b.0 + tau.c.0) | 'a.tau.b.0").unwrap();
    let p = parse_unchecked("a.b.0 + a.tau.c.0 + tau.(a.0 | 'a.b.0)").unwrap();
    (q, p, CalculusProfile::ccs())
}
