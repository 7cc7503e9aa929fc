//! Acceptance suite: one test per criterion, each printing a PASS line when
//! it completes (run with `cargo test --test acceptance -- --nocapture` to
//! see them).

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use repfree_core::lts::{
    explore, explore_with_universe, is_invisible, is_visible_lts, replay_trace, weak_reach,
    ExplorationBounds, Verdict,
};
use repfree_core::profile::CalculusProfile;
use repfree_core::sampling::{
    gen_ccs_context, gen_ccs_invisible, gen_ccs_process, gen_pi_closed_invisible, gen_pi_context,
    gen_pi_invisible, gen_pi_process, gen_random_lts, rng_from_seed, PiGenOptions,
};
use repfree_core::sim::{sim_k, sim_omega, weak_simulation_gfp};
use repfree_core::sos::Universe;
use repfree_core::surface::{parse_unchecked, pretty};
use repfree_core::term::{plug, Term};
use repfree_core::witness::{load_witness, run_corpus, verify_witness, Overall};
use repfree_core::{alpha_eq, Lts};

fn corpus_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus"))
}

fn trace_labels(v: &Verdict) -> Vec<String> {
    v.trace()
        .map(|t| t.iter().map(|s| s.label.to_string()).collect())
        .unwrap_or_default()
}

/// Criterion 1: the eight-case witness corpus verifies as violation-confirmed
/// with the expected traces, each case under a second, the corpus under five.
#[test]
fn criterion_1_witness_corpus() {
    let expected_traces: &[(&str, &[&str])] = &[
        ("pi-match", &["tau", "y!<c>"]),
        ("pi-polyadic", &["tau", "tau", "y!<c>"]),
        ("pi-pattern", &["tau", "tau", "y!<c>"]),
        ("bccsp-theta", &["a"]),
        ("cpg", &["{a}:tau", "'c"]),
        ("ccs-sg", &["'b"]),
        ("ccs-prio", &["'_b"]),
        ("cows", &["a!<n>"]),
    ];
    let corpus_start = Instant::now();
    let summary = run_corpus(corpus_dir(), None);
    let corpus_elapsed = corpus_start.elapsed();
    assert!(
        summary.file_errors.is_empty(),
        "file errors: {:?}",
        summary.file_errors
    );
    assert_eq!(
        summary.rows.len(),
        8,
        "corpus must hold exactly the eight cases"
    );
    for row in &summary.rows {
        assert_eq!(
            row.overall,
            Overall::ViolationConfirmed,
            "case {} not confirmed: {:?}",
            row.id,
            row.report
        );
        assert!(row.matched, "case {} did not match its expectation", row.id);
        let expected = expected_traces
            .iter()
            .find(|(id, _)| *id == row.id)
            .unwrap_or_else(|| panic!("unexpected case id {}", row.id))
            .1;
        assert_eq!(
            trace_labels(&row.report.ci_visible),
            expected,
            "case {}: trace mismatch",
            row.id
        );
        assert!(
            row.report.cp_visible.fails(),
            "case {}: C[P] must be invisible",
            row.id
        );
    }
    // Per-case timing: re-verify each case individually under the limit.
    for file in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = file.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let case = load_witness(&path).unwrap();
        let t0 = Instant::now();
        verify_witness(&case).unwrap();
        let dt = t0.elapsed();
        assert!(dt < Duration::from_secs(1), "case {} took {dt:?}", case.id);
    }
    assert!(
        corpus_elapsed < Duration::from_secs(5),
        "corpus took {corpus_elapsed:?}"
    );
    println!("ACCEPTANCE 1 witness corpus (8/8 confirmed, traces exact): PASS");
}

struct FreenessStats {
    triples: usize,
    visible_ci: usize,
}

/// Check the freeness transfer and the simulation membership on one triple.
fn check_triple(
    profile: &CalculusProfile,
    context: &Term,
    invisible: &Term,
    process: &Term,
    bounds: &ExplorationBounds,
) -> Option<bool> {
    let ci = plug(context, std::slice::from_ref(invisible)).unwrap();
    let cp = plug(context, std::slice::from_ref(process)).unwrap();
    let uni = Universe::for_terms(&[&ci, &cp]);
    let lci = explore_with_universe(&ci, profile, bounds, &uni).unwrap();
    let lcp = explore_with_universe(&cp, profile, bounds, &uni).unwrap();
    if !lci.complete || !lcp.complete {
        return None; // skip: bounded out (does not count towards the quota)
    }
    let vi = is_visible_lts(&lci);
    let vp = repfree_core::lts::is_visible_lts(&lcp);
    if vi.holds() {
        assert!(
            vp.holds(),
            "freeness transfer violated:\n C = {context}\n I = {invisible}\n P = {process}"
        );
    }
    let sim = sim_omega(&lci, &lcp).unwrap();
    assert!(
        sim.contains_roots(&lci, &lcp),
        "root pair left the simulation:\n C = {context}\n I = {invisible}\n P = {process}"
    );
    Some(vi.holds())
}

/// Criterion 2: strong-freeness property suite for ccs (>= 1000 triples) and
/// the match-free pi fragment (>= 500 triples); invisible side certified.
#[test]
fn criterion_2_strong_freeness_ccs_and_pi() {
    let start = Instant::now();
    let bounds = ExplorationBounds::default();

    let mut rng = rng_from_seed(0xC05);
    let profile = CalculusProfile::ccs();
    let mut stats = FreenessStats {
        triples: 0,
        visible_ci: 0,
    };
    while stats.triples < 1000 {
        let invisible = gen_ccs_invisible(&mut rng, 3);
        if !is_invisible(&invisible, &profile, &bounds).unwrap().holds() {
            continue; // certification failed; discard the candidate
        }
        let context = gen_ccs_context(&mut rng, 3);
        let process = gen_ccs_process(&mut rng, 3);
        if let Some(vis) = check_triple(&profile, &context, &invisible, &process, &bounds) {
            stats.triples += 1;
            stats.visible_ci += usize::from(vis);
        }
    }
    assert!(
        stats.visible_ci > 100,
        "suite too degenerate: {} visible",
        stats.visible_ci
    );
    let ccs_triples = stats.triples;

    let mut rng = rng_from_seed(0x91);
    let opts = PiGenOptions::plain();
    let profile = CalculusProfile::Pi;
    let mut stats = FreenessStats {
        triples: 0,
        visible_ci: 0,
    };
    while stats.triples < 500 {
        let invisible = gen_pi_invisible(&mut rng, 3, opts);
        if !is_invisible(&invisible, &profile, &bounds).unwrap().holds() {
            continue;
        }
        let context = gen_pi_context(&mut rng, 3, opts);
        let process = gen_pi_process(&mut rng, 3, opts);
        if let Some(vis) = check_triple(&profile, &context, &invisible, &process, &bounds) {
            stats.triples += 1;
            stats.visible_ci += usize::from(vis);
        }
    }
    assert!(
        stats.visible_ci > 50,
        "suite too degenerate: {} visible",
        stats.visible_ci
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "suite took {elapsed:?}");
    println!(
        "ACCEPTANCE 2 strong freeness (ccs {} triples, pi {} triples, 0 counterexamples): PASS",
        ccs_triples, stats.triples
    );
}

/// Criterion 3: weak-freeness property suite for the full pi variant with
/// closed invisible processes (>= 500 triples), alongside the open-invisible
/// violations of criterion 1 exhibiting the strong/weak asymmetry.
#[test]
fn criterion_3_weak_freeness_pimpm() {
    let start = Instant::now();
    let bounds = ExplorationBounds::default();
    let opts = PiGenOptions::full();
    let profile = CalculusProfile::PiMpm;
    let mut rng = rng_from_seed(0x3A7);
    let mut triples = 0usize;
    let mut visible_ci = 0usize;
    while triples < 500 {
        let invisible = gen_pi_closed_invisible(&mut rng, 3, opts);
        assert!(repfree_core::term::is_closed(&invisible).unwrap());
        if !is_invisible(&invisible, &profile, &bounds).unwrap().holds() {
            continue;
        }
        let context = gen_pi_context(&mut rng, 3, opts);
        let process = gen_pi_process(&mut rng, 3, opts);
        if let Some(vis) = check_triple(&profile, &context, &invisible, &process, &bounds) {
            triples += 1;
            visible_ci += usize::from(vis);
        }
    }
    assert!(
        visible_ci > 50,
        "suite too degenerate: {visible_ci} visible"
    );

    // The strong/weak asymmetry: the three open-invisible witnesses confirm.
    let summary = run_corpus(corpus_dir(), None);
    for id in ["pi-match", "pi-polyadic", "pi-pattern"] {
        let row = summary.rows.iter().find(|r| r.id == id).unwrap();
        assert_eq!(row.overall, Overall::ViolationConfirmed, "{id}");
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "suite took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 weak freeness (pimpm {triples} closed triples, 0 counterexamples; \
         3 open-invisible violations confirmed): PASS"
    );
}

/// Criterion 4: on random finite LTS pairs, strata are anti-monotone up to
/// convergence and the stratified fixpoint equals the worklist greatest
/// fixpoint exactly.
#[test]
fn criterion_4_simulation_machinery() {
    let mut rng = rng_from_seed(0x51);
    let mut pairs = 0usize;
    while pairs < 200 {
        let lq = gen_random_lts(&mut rng, 5);
        let lp = gen_random_lts(&mut rng, 5);
        let fix = sim_omega(&lq, &lp).unwrap();
        let mut prev = sim_k(&lq, &lp, 0).unwrap().pairs;
        let mut k = 1;
        loop {
            let cur = sim_k(&lq, &lp, k).unwrap().pairs;
            assert!(
                cur.is_subset(&prev),
                "stratum {k} is not contained in stratum {}",
                k - 1
            );
            if cur == prev {
                break;
            }
            prev = cur;
            k += 1;
        }
        assert_eq!(prev, fix.pairs, "strata converged to a different relation");
        let gfp = weak_simulation_gfp(&lq, &lp).unwrap();
        assert_eq!(
            fix.pairs, gfp,
            "stratified fixpoint != direct greatest fixpoint"
        );
        pairs += 1;
    }
    println!("ACCEPTANCE 4 simulation machinery (200 LTS pairs, exact equality): PASS");
}

/// Criterion 5: predicate invariants over every corpus state space —
/// invisibility closure, exact trace replay, and stability of resolved
/// verdicts under 4x larger bounds.
#[test]
fn criterion_5_predicate_invariants() {
    let summary = run_corpus(corpus_dir(), None);
    assert!(summary.file_errors.is_empty());
    for file in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = file.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let case = load_witness(&path).unwrap();
        let ci = plug(&case.context, std::slice::from_ref(&case.invisible)).unwrap();
        let cp = plug(&case.context, std::slice::from_ref(&case.process)).unwrap();
        for term in [&case.invisible, &ci, &cp] {
            let lts = explore(term, &case.profile, &case.bounds).unwrap();
            assert!(lts.complete, "{}: corpus spaces must be finite", case.id);

            // Invisibility closure: invisible states only reach invisible states.
            for s in 0..lts.state_count() {
                let sub = explore(&lts.states[s], &case.profile, &case.bounds).unwrap();
                if is_visible_lts(&sub).fails() {
                    for r in weak_reach(&sub, sub.root) {
                        let deriv = explore(&sub.states[r], &case.profile, &case.bounds).unwrap();
                        assert!(
                            is_visible_lts(&deriv).fails(),
                            "{}: a derivative of an invisible state is visible",
                            case.id
                        );
                    }
                }
            }

            // Holds traces replay exactly.
            let v = is_visible_lts(&lts);
            if let Some(trace) = v.trace() {
                assert!(
                    replay_trace(term, &case.profile, &lts.universe, trace).unwrap(),
                    "{}: trace does not replay",
                    case.id
                );
            }

            // Larger bounds never flip a resolved verdict.
            let big = explore(term, &case.profile, &case.bounds.scaled(4)).unwrap();
            let v_big = is_visible_lts(&big);
            match (v.holds(), v_big.holds(), v.fails(), v_big.fails()) {
                (true, got, _, _) => assert!(got, "{}: holds flipped", case.id),
                (_, _, true, got) => assert!(got, "{}: fails flipped", case.id),
                _ => {}
            }
        }
    }
    println!("ACCEPTANCE 5 predicate invariants (closure, replay, bound stability): PASS");
}

/// Criterion 6: parse/pretty round trip on all corpus files and >= 1000
/// generated terms, up to alpha-equivalence.
#[test]
fn criterion_6_round_trip() {
    // Corpus files: every term field reparses to an alpha-equivalent term.
    let mut corpus_terms = 0usize;
    for file in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = file.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let case = load_witness(&path).unwrap();
        for term in [&case.context, &case.invisible, &case.process] {
            let printed = pretty(term);
            let back = parse_unchecked(&printed)
                .unwrap_or_else(|e| panic!("{}: `{printed}` fails to reparse: {e}", case.id));
            assert!(
                alpha_eq(term, &back),
                "{}: round trip changed `{printed}`",
                case.id
            );
            corpus_terms += 1;
        }
    }
    assert_eq!(corpus_terms, 24);

    let mut rng = rng_from_seed(0x60D);
    let mut generated = 0usize;
    while generated < 1000 {
        let term = match generated % 4 {
            0 => gen_ccs_process(&mut rng, 4),
            1 => gen_pi_process(&mut rng, 4, PiGenOptions::plain()),
            2 => gen_pi_process(&mut rng, 4, PiGenOptions::full()),
            _ => gen_pi_closed_invisible(&mut rng, 3, PiGenOptions::full()),
        };
        let printed = pretty(&term);
        let back = parse_unchecked(&printed)
            .unwrap_or_else(|e| panic!("generated `{printed}` fails to reparse: {e}"));
        assert!(alpha_eq(&term, &back), "round trip changed `{printed}`");
        generated += 1;
    }
    println!("ACCEPTANCE 6 round trip (24 corpus terms + {generated} generated): PASS");
}

/// Supplementary: the confirmed weak-mode corpus cases stay confirmed when
/// re-run in strong mode (closed invisible processes are invisible).
#[test]
fn weak_cases_confirm_in_strong_mode() {
    for file in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = file.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let mut case = load_witness(&path).unwrap();
        if matches!(case.mode, repfree_core::witness::Mode::Weak) {
            case.mode = repfree_core::witness::Mode::Strong;
            let report = verify_witness(&case).unwrap();
            assert_eq!(report.overall, Overall::ViolationConfirmed, "{}", case.id);
        }
    }
}

/// Supplementary: corpus LTS exports are well-formed and states deduplicate.
#[test]
fn corpus_spaces_are_small_and_exportable() {
    for file in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = file.unwrap().path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let case = load_witness(&path).unwrap();
        let ci = plug(&case.context, std::slice::from_ref(&case.invisible)).unwrap();
        let lts: Lts = explore(&ci, &case.profile, &case.bounds).unwrap();
        assert!(
            lts.state_count() <= 16,
            "{}: unexpectedly large space",
            case.id
        );
        let states: BTreeSet<&Term> = lts.states.iter().collect();
        assert_eq!(
            states.len(),
            lts.state_count(),
            "{}: duplicate states",
            case.id
        );
        let dot = lts.to_dot();
        assert!(dot.starts_with("digraph lts {"));
        let json = lts.to_json();
        assert_eq!(json["states"].as_array().unwrap().len(), lts.state_count());
    }
}

/// Supplementary: the committed regression cases (freeness-preserving
/// variants of the witness shapes) all refute, including the weak-mode
/// re-reading of the open-invisible match witness.
#[test]
fn regression_corpus_refutes() {
    let summary = run_corpus(&corpus_dir().join("regression"), None);
    assert!(summary.file_errors.is_empty(), "{:?}", summary.file_errors);
    assert_eq!(summary.rows.len(), 3);
    for row in &summary.rows {
        assert_eq!(row.overall, Overall::ViolationRefuted, "{}", row.id);
        assert!(row.matched, "{}", row.id);
    }
}
