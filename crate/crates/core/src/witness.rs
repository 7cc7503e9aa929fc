//! Replacement-freeness violation witnesses: the data model, the JSON file
//! format and the verification pipeline.
//!
//! A witness is a triple of a one-hole context `C`, an invisible process `I`
//! (closed, in weak mode) and a process `P`. It demonstrates a violation when
//! `C[I]` can weakly perform a visible action but `C[P]` cannot. Invisibility
//! of `I` is checked, never trusted from the file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::lts::{is_invisible, is_visible, ExplorationBounds, Verdict};
use crate::names::Name;
use crate::profile::{CalculusProfile, DefinitionEnv, OrderedAction, PriorityOrder, Violation};
use crate::surface::{parse_unchecked, SurfaceError};
use crate::term::{is_closed, plug, Term};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    Strong,
    Weak,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Expectation {
    Violation,
    NoViolation,
}

impl Expectation {
    pub fn key(self) -> &'static str {
        match self {
            Expectation::Violation => "violation",
            Expectation::NoViolation => "no-violation",
        }
    }
}

/// A fully compiled witness case.
#[derive(Clone, Debug)]
pub struct WitnessCase {
    pub id: String,
    pub profile: CalculusProfile,
    pub mode: Mode,
    pub context: Term,
    pub invisible: Term,
    pub process: Term,
    pub expect: Expectation,
    pub bounds: ExplorationBounds,
    pub note: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Overall {
    ViolationConfirmed,
    ViolationRefuted,
    Inconclusive,
}

impl Overall {
    pub fn key(self) -> &'static str {
        match self {
            Overall::ViolationConfirmed => "violation-confirmed",
            Overall::ViolationRefuted => "violation-refuted",
            Overall::Inconclusive => "inconclusive",
        }
    }

    pub fn matches(self, expect: Expectation) -> bool {
        matches!(
            (self, expect),
            (Overall::ViolationConfirmed, Expectation::Violation)
                | (Overall::ViolationRefuted, Expectation::NoViolation)
        )
    }
}

/// Per-check verdicts of one witness verification.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub id: String,
    pub invisible_check: Verdict,
    /// Only checked in weak mode.
    pub closed_check: Option<bool>,
    pub ci_visible: Verdict,
    pub cp_visible: Verdict,
    pub overall: Overall,
}

impl WitnessReport {
    pub fn to_json(&self) -> serde_json::Value {
        let verdict = |v: &Verdict| match v {
            Verdict::Holds(Some(trace)) => serde_json::json!({
                "verdict": "holds",
                "trace": trace.iter().map(|s| s.label.to_string()).collect::<Vec<_>>(),
            }),
            Verdict::Holds(None) => serde_json::json!({"verdict": "holds"}),
            Verdict::Fails => serde_json::json!({"verdict": "fails"}),
            Verdict::Unknown(b) => {
                serde_json::json!({"verdict": "unknown", "bound": b.identifier()})
            }
        };
        serde_json::json!({
            "id": self.id,
            "invisible_check": verdict(&self.invisible_check),
            "closed_check": self.closed_check,
            "ci_visible": verdict(&self.ci_visible),
            "cp_visible": verdict(&self.cp_visible),
            "overall": self.overall.key(),
        })
    }
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid witness file {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("field {field}: {source}")]
    Term {
        field: &'static str,
        source: SurfaceError,
    },
    #[error("field {field}: profile violations: {}",
            .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Profile {
        field: &'static str,
        violations: Vec<Violation>,
    },
    #[error("context must have exactly hole [_1], found holes {0:?}")]
    ContextShape(Vec<u32>),
    #[error("{field} must be a process, it contains holes")]
    UnexpectedHoles { field: &'static str },
    #[error("semantics error: {0}")]
    Sos(#[from] crate::sos::SosError),
    #[error("term error: {0}")]
    TermError(#[from] crate::term::TermError),
    #[error("invalid priority order: {0}")]
    Order(#[from] crate::profile::OrderError),
    #[error("invalid definition: {0}")]
    Def(#[from] crate::profile::DefError),
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct DefJson {
    params: Vec<String>,
    body: String,
}

#[derive(Deserialize)]
struct WitnessJson {
    version: u32,
    id: String,
    calculus: String,
    mode: String,
    #[serde(default)]
    order: Vec<(String, String)>,
    #[serde(default)]
    definitions: BTreeMap<String, DefJson>,
    context: String,
    invisible: String,
    process: String,
    expect: String,
    #[serde(default)]
    bounds: Option<BoundsJson>,
    #[serde(default)]
    note: Option<String>,
}

#[derive(Deserialize)]
struct BoundsJson {
    #[serde(default = "default_max_states")]
    max_states: usize,
    #[serde(default = "default_max_depth")]
    max_depth: usize,
    #[serde(default = "default_max_bang_unfold")]
    max_bang_unfold: usize,
}

fn default_max_states() -> usize {
    ExplorationBounds::default().max_states
}
fn default_max_depth() -> usize {
    ExplorationBounds::default().max_depth
}
fn default_max_bang_unfold() -> usize {
    ExplorationBounds::default().max_bang_unfold
}

fn ordered_action(s: &str) -> OrderedAction {
    if s == "tau" {
        OrderedAction::Tau
    } else {
        OrderedAction::Act(Name::new(s))
    }
}

/// Parse and compile a witness case from its JSON source.
pub fn parse_witness(src: &str, path: &Path) -> Result<WitnessCase, WitnessError> {
    let json: WitnessJson = serde_json::from_str(src).map_err(|e| WitnessError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if json.version != 1 {
        return Err(WitnessError::Format {
            path: path.to_path_buf(),
            message: format!("unsupported version {}", json.version),
        });
    }
    let mode = match json.mode.as_str() {
        "strong" => Mode::Strong,
        "weak" => Mode::Weak,
        other => {
            return Err(WitnessError::Format {
                path: path.to_path_buf(),
                message: format!("unknown mode {other:?}"),
            })
        }
    };
    let expect = match json.expect.as_str() {
        "violation" => Expectation::Violation,
        "no-violation" => Expectation::NoViolation,
        other => {
            return Err(WitnessError::Format {
                path: path.to_path_buf(),
                message: format!("unknown expectation {other:?}"),
            })
        }
    };
    let mut env = DefinitionEnv::empty();
    for (name, def) in &json.definitions {
        let body = parse_unchecked(&def.body).map_err(|source| WitnessError::Term {
            field: "definitions",
            source,
        })?;
        env.define(
            name.clone(),
            def.params.iter().map(Name::new).collect(),
            body,
        )?;
    }
    let order = PriorityOrder::new(
        json.order
            .iter()
            .map(|(a, b)| (ordered_action(a), ordered_action(b))),
    )?;
    let profile = match json.calculus.as_str() {
        "ccs" => CalculusProfile::Ccs { env },
        "pi" => CalculusProfile::Pi,
        "pimpm" => CalculusProfile::PiMpm,
        "bccsp-theta" => CalculusProfile::BccspTheta { order },
        "cpg" => CalculusProfile::Cpg { env },
        "ccs-sg" => CalculusProfile::CcsSg { env },
        "ccs-prio" => CalculusProfile::CcsPrio { env },
        "cows" => CalculusProfile::CowsFragment,
        other => {
            return Err(WitnessError::Format {
                path: path.to_path_buf(),
                message: format!("unknown calculus {other:?}"),
            })
        }
    };
    let parse_field = |field: &'static str, src: &str| {
        parse_unchecked(src).map_err(|source| WitnessError::Term { field, source })
    };
    let context = parse_field("context", &json.context)?;
    let invisible = parse_field("invisible", &json.invisible)?;
    let process = parse_field("process", &json.process)?;
    let bounds = json
        .bounds
        .map(|b| ExplorationBounds {
            max_states: b.max_states,
            max_depth: b.max_depth,
            max_bang_unfold: b.max_bang_unfold,
        })
        .unwrap_or_default();
    Ok(WitnessCase {
        id: json.id,
        profile,
        mode,
        context,
        invisible,
        process,
        expect,
        bounds,
        note: json.note,
    })
}

pub fn load_witness(path: &Path) -> Result<WitnessCase, WitnessError> {
    let src = fs::read_to_string(path).map_err(|source| WitnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_witness(&src, path)
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

fn validate_field(
    t: &Term,
    profile: &CalculusProfile,
    field: &'static str,
) -> Result<(), WitnessError> {
    let violations = crate::profile::validate(t, profile);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(WitnessError::Profile { field, violations })
    }
}

/// Run the full pipeline on one case: invisibility of `I`, closedness in weak
/// mode, then visibility of `C[I]` and `C[P]`.
pub fn verify_witness(case: &WitnessCase) -> Result<WitnessReport, WitnessError> {
    validate_field(&case.context, &case.profile, "context")?;
    validate_field(&case.invisible, &case.profile, "invisible")?;
    validate_field(&case.process, &case.profile, "process")?;
    let holes: Vec<u32> = case.context.holes().into_iter().collect();
    if holes != [1] {
        return Err(WitnessError::ContextShape(holes));
    }
    for (field, t) in [("invisible", &case.invisible), ("process", &case.process)] {
        if !t.holes().is_empty() {
            return Err(WitnessError::UnexpectedHoles { field });
        }
    }

    let invisible_check = is_invisible(&case.invisible, &case.profile, &case.bounds)?;
    let closed_check = match case.mode {
        Mode::Weak => Some(is_closed(&case.invisible)?),
        Mode::Strong => None,
    };
    let ci = plug(&case.context, std::slice::from_ref(&case.invisible))?;
    let cp = plug(&case.context, std::slice::from_ref(&case.process))?;
    let ci_visible = is_visible(&ci, &case.profile, &case.bounds)?;
    let cp_visible = is_visible(&cp, &case.profile, &case.bounds)?;

    let any_unknown = matches!(invisible_check, Verdict::Unknown(_))
        || matches!(ci_visible, Verdict::Unknown(_))
        || matches!(cp_visible, Verdict::Unknown(_));
    let confirmed = invisible_check.holds()
        && closed_check.unwrap_or(true)
        && ci_visible.holds()
        && cp_visible.fails();
    let overall = if confirmed {
        Overall::ViolationConfirmed
    } else if any_unknown {
        Overall::Inconclusive
    } else {
        Overall::ViolationRefuted
    };
    Ok(WitnessReport {
        id: case.id.clone(),
        invisible_check,
        closed_check,
        ci_visible,
        cp_visible,
        overall,
    })
}

// ---------------------------------------------------------------------------
// Corpus runner
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct CorpusRow {
    pub file: PathBuf,
    pub id: String,
    pub overall: Overall,
    pub expected: Expectation,
    pub matched: bool,
    pub report: WitnessReport,
}

#[derive(Debug, Default)]
pub struct CorpusSummary {
    pub rows: Vec<CorpusRow>,
    pub file_errors: Vec<(PathBuf, String)>,
}

impl CorpusSummary {
    pub fn all_matched(&self) -> bool {
        self.rows.iter().all(|r| r.matched)
    }

    pub fn any_inconclusive(&self) -> bool {
        self.rows.iter().any(|r| r.overall == Overall::Inconclusive)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cases": self.rows.iter().map(|r| serde_json::json!({
                "file": r.file.display().to_string(),
                "id": r.id,
                "overall": r.overall.key(),
                "expected": r.expected.key(),
                "matched": r.matched,
                "report": r.report.to_json(),
            })).collect::<Vec<_>>(),
            "errors": self.file_errors.iter().map(|(p, m)| serde_json::json!({
                "file": p.display().to_string(),
                "error": m,
            })).collect::<Vec<_>>(),
            "ok": self.file_errors.is_empty() && self.all_matched() && !self.any_inconclusive(),
        })
    }
}

/// Verify every `*.json` witness in `dir` (sorted by file name). Unreadable
/// or invalid files are reported per-file and do not stop the run.
pub fn run_corpus(dir: &Path, overrides: Option<ExplorationBounds>) -> CorpusSummary {
    let mut summary = CorpusSummary::default();
    let entries = match fs::read_dir(dir) {
        Ok(es) => es,
        Err(e) => {
            summary.file_errors.push((dir.to_path_buf(), e.to_string()));
            return summary;
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    for file in files {
        let mut case = match load_witness(&file) {
            Ok(c) => c,
            Err(e) => {
                summary.file_errors.push((file, e.to_string()));
                continue;
            }
        };
        if let Some(b) = overrides {
            case.bounds = b;
        }
        match verify_witness(&case) {
            Ok(report) => {
                let matched = report.overall.matches(case.expect);
                summary.rows.push(CorpusRow {
                    file,
                    id: case.id,
                    overall: report.overall,
                    expected: case.expect,
                    matched,
                    report,
                });
            }
            Err(e) => summary.file_errors.push((file, e.to_string())),
        }
    }
    summary.rows.sort_by(|a, b| a.id.cmp(&b.id));
    summary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_unchecked as parse;

    fn case(
        profile: CalculusProfile,
        mode: Mode,
        ctx: &str,
        inv: &str,
        proc_: &str,
        expect: Expectation,
    ) -> WitnessCase {
        WitnessCase {
            id: "test".into(),
            profile,
            mode,
            context: parse(ctx).unwrap(),
            invisible: parse(inv).unwrap(),
            process: parse(proc_).unwrap(),
            expect,
            bounds: ExplorationBounds::default(),
            note: None,
        }
    }

    #[test]
    fn match_triple_confirmed() {
        let c = case(
            CalculusProfile::Pi,
            Mode::Strong,
            "(new x)(x?(a).[_1] | x!<b>)",
            "[a=b] y!<c>",
            "0",
            Expectation::Violation,
        );
        let r = verify_witness(&c).unwrap();
        assert_eq!(r.overall, Overall::ViolationConfirmed);
        assert!(r.invisible_check.holds());
        let trace = r.ci_visible.trace().unwrap();
        let labels: Vec<String> = trace.iter().map(|s| s.label.to_string()).collect();
        assert_eq!(labels, vec!["tau", "y!<c>"]);
        assert!(r.cp_visible.fails());
    }

    #[test]
    fn trivial_triple_refuted() {
        // C[I] = 0 is invisible, so the condition is vacuous.
        let c = case(
            CalculusProfile::ccs(),
            Mode::Strong,
            "[_1]",
            "0",
            "a.0",
            Expectation::NoViolation,
        );
        let r = verify_witness(&c).unwrap();
        assert_eq!(r.overall, Overall::ViolationRefuted);
        assert!(r.overall.matches(Expectation::NoViolation));
    }

    #[test]
    fn weak_mode_requires_closed_invisible() {
        // I is invisible but has free names: rejected as a weak-mode witness.
        let c = case(
            CalculusProfile::Pi,
            Mode::Weak,
            "(new x)(x?(a).[_1] | x!<b>)",
            "[a=b] y!<c>",
            "0",
            Expectation::Violation,
        );
        let r = verify_witness(&c).unwrap();
        assert_eq!(r.closed_check, Some(false));
        assert_eq!(r.overall, Overall::ViolationRefuted);
    }

    #[test]
    fn visible_candidate_rejected() {
        let c = case(
            CalculusProfile::ccs(),
            Mode::Strong,
            "[_1]",
            "a.0",
            "0",
            Expectation::Violation,
        );
        let r = verify_witness(&c).unwrap();
        assert!(r.invisible_check.fails());
        assert_eq!(r.overall, Overall::ViolationRefuted);
    }

    #[test]
    fn context_shape_enforced() {
        let c = case(
            CalculusProfile::ccs(),
            Mode::Strong,
            "[_1] | [_2]",
            "0",
            "a.0",
            Expectation::Violation,
        );
        assert!(matches!(
            verify_witness(&c),
            Err(WitnessError::ContextShape(_))
        ));
    }

    #[test]
    fn ccs_analog_of_priority_triple_is_no_violation() {
        // Dropping the priority level from the two-level witness restores
        // freeness: the ordinary sum keeps its visible branch.
        let c = case(
            CalculusProfile::ccs(),
            Mode::Weak,
            "(a.0 | [_1])\\{a} + 'b.0",
            "0",
            "'a.0",
            Expectation::NoViolation,
        );
        let r = verify_witness(&c).unwrap();
        assert_eq!(r.overall, Overall::ViolationRefuted);
        assert!(r.cp_visible.holds());
    }

    #[test]
    fn witness_json_roundtrip() {
        let src = r#"{
            "version": 1,
            "id": "demo",
            "calculus": "bccsp-theta",
            "mode": "weak",
            "order": [["a", "tau"]],
            "context": "theta(a.0 + [_1])",
            "invisible": "0",
            "process": "tau.0",
            "expect": "violation",
            "bounds": {"max_states": 100, "max_depth": 16, "max_bang_unfold": 1}
        }"#;
        let case = parse_witness(src, Path::new("demo.json")).unwrap();
        assert_eq!(case.bounds.max_states, 100);
        let r = verify_witness(&case).unwrap();
        assert_eq!(r.overall, Overall::ViolationConfirmed);
        assert_eq!(r.closed_check, Some(true));
        let json = r.to_json();
        assert_eq!(json["overall"], "violation-confirmed");
        assert_eq!(json["ci_visible"]["trace"][0], "a");
    }

    #[test]
    fn corpus_runner_reports_errors_and_continues() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("bad.json"), "{not json").unwrap();
        fs::write(
            dir.path().join("good.json"),
            r#"{"version":1,"id":"good","calculus":"ccs","mode":"strong",
                "context":"a.[_1]","invisible":"0","process":"b.0",
                "expect":"no-violation"}"#,
        )
        .unwrap();
        let summary = run_corpus(dir.path(), None);
        assert_eq!(summary.rows.len(), 1);
        assert_eq!(summary.file_errors.len(), 1);
        assert!(summary.rows[0].matched);
    }

    #[test]
    fn empty_corpus_is_success() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run_corpus(dir.path(), None);
        assert!(summary.rows.is_empty());
        assert!(summary.all_matched());
        assert!(!summary.any_inconclusive());
        assert_eq!(summary.to_json()["ok"], true);
    }
}
