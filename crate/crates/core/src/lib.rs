//! A workbench for process calculi: a unified term language with per-calculus
//! profiles, one-step operational semantics for seven calculi, bounded state
//! space exploration with three-valued visibility predicates, stratified
//! simulation, and a checker for replacement-freeness violation witnesses.
//!
//! The crates in this workspace split as: this crate holds the algorithms and
//! data model, `repfree-cli` the command-line front end, `repfree-bench` the
//! criterion benchmarks.

pub mod lts;
pub mod names;
pub mod profile;
pub mod sampling;
pub mod sim;
pub mod sos;
pub mod subst;
pub mod surface;
pub mod term;
pub mod witness;

pub use lts::{
    can_perform, explore, explore_with_universe, is_invisible, is_visible, weak_reach, BoundHit,
    ExplorationBounds, LabelPattern, Lts, Verdict,
};
pub use names::{KillerLabel, Name, Polarity, PriorityLevel};
pub use profile::{CalculusProfile, DefinitionEnv, OrderedAction, PriorityOrder};
pub use sim::{distinguishing_depth, sim_k, sim_omega, weak_simulation_gfp, SimRelation};
pub use sos::{
    cpg_offers, halt, match_pattern, transitions, transitions_bccsp, transitions_ccs,
    transitions_ccs_priority, transitions_cows, transitions_cpg, transitions_pimpm, Label,
    SosError, Step, Universe,
};
pub use subst::{alpha_canonical, alpha_eq, apply_subst, Substitution};
pub use surface::{parse_term, parse_unchecked, pretty, SourceSpan, SurfaceError};
pub use term::{
    free_names, independent, is_closed, plug, GuardSet, Pattern, PatternItem, PrefixAction, Term,
    TermError, Tuple,
};
pub use witness::{
    run_corpus, verify_witness, CorpusSummary, Mode, Overall, WitnessCase, WitnessReport,
};
