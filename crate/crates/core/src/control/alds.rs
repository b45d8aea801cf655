//! Information-state dialogue scripts.
//!
//! ```text
//! SCENARIO origin ONCE
//! WHEN entity:countries
//! STEP 0 EXPECT true SAY "Where do you come from?" THEN 1 ELSE abort
//! STEP 1 EXPECT entity:countries SAY "I like {entity}." THEN END ELSE retry
//! ```
//!
//! Predicates are `&`-joined atoms: `da=<Label>`, `sentiment=<class>`,
//! `entity:<gazetteer>`, `category:<id>`, `kw:<word>`, `role=<Role>`,
//! `turn>=<n>` and `true`; a leading `!` negates an atom. `ONCE` scripts
//! start at most once per participant, `DUTY` scripts count as bartender
//! duties for the exclusion policy.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use super::state::{ActiveScenario, InformationState};
use super::{CandidateSource, ControlError, ResponseCandidate, Role, Target, PRIORITY_ALDS};
use crate::perception::{DialogueAct, PerceptionReport, SentimentClass};

pub const SLOTS: [&str; 4] = ["user", "other", "entity", "focus"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    True,
    Da(DialogueAct),
    Sentiment(SentimentClass),
    Entity(String),
    Category(String),
    Keyword(String),
    Role(Role),
    TurnAtLeast(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    /// `(negated, atom)` pairs, all of which must hold.
    pub atoms: Vec<(bool, Atom)>,
}

pub struct PredicateContext<'a> {
    pub role: Option<Role>,
    pub turn: usize,
    pub report: &'a PerceptionReport,
}

impl Predicate {
    pub fn parse(src: &str) -> Result<Self, String> {
        let atoms = src
            .split('&')
            .flat_map(|part| part.split(" AND "))
            .map(str::trim)
            .map(|raw| {
                let (negated, body) = match raw.strip_prefix('!') {
                    Some(rest) => (true, rest.trim()),
                    None => (false, raw),
                };
                parse_atom(body).map(|a| (negated, a))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { atoms })
    }

    pub fn eval(&self, ctx: &PredicateContext<'_>) -> bool {
        self.atoms.iter().all(|(negated, atom)| atom_holds(atom, ctx) != *negated)
    }
}

fn parse_atom(s: &str) -> Result<Atom, String> {
    if s.is_empty() {
        return Err("empty predicate atom".into());
    }
    if s == "true" {
        return Ok(Atom::True);
    }
    if let Some(v) = s.strip_prefix("da=") {
        return v.parse().map(Atom::Da);
    }
    if let Some(v) = s.strip_prefix("sentiment=") {
        return v.parse().map(Atom::Sentiment);
    }
    if let Some(v) = s.strip_prefix("role=") {
        return v.parse().map(Atom::Role);
    }
    if let Some(v) = s.strip_prefix("turn>=") {
        return v
            .parse()
            .map(Atom::TurnAtLeast)
            .map_err(|_| format!("bad turn count {v:?}"));
    }
    let named = |prefix: &str| {
        s.strip_prefix(prefix)
            .filter(|v| !v.is_empty() && !v.contains(char::is_whitespace))
            .map(str::to_lowercase)
    };
    if let Some(v) = named("entity:") {
        return Ok(Atom::Entity(v));
    }
    if let Some(v) = named("category:") {
        return Ok(Atom::Category(v));
    }
    if let Some(v) = named("kw:") {
        return Ok(Atom::Keyword(v));
    }
    Err(format!("unknown predicate atom {s:?}"))
}

fn atom_holds(atom: &Atom, ctx: &PredicateContext<'_>) -> bool {
    let r = ctx.report;
    match atom {
        Atom::True => true,
        Atom::Da(da) => r.dialogue_act.label == *da,
        Atom::Sentiment(c) => r.sentiment.klass == *c,
        Atom::Entity(g) => r.has_entity(g),
        Atom::Category(c) => r.categories.contains(c),
        Atom::Keyword(w) => r.has_word(w),
        Atom::Role(role) => ctx.role == Some(*role),
        Atom::TurnAtLeast(n) => ctx.turn >= *n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next {
    Step(usize),
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnMiss {
    Retry,
    Abort,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AldsStep {
    pub expect: Predicate,
    pub template: String,
    pub on_match: Next,
    pub on_miss: OnMiss,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AldsScenario {
    pub id: String,
    pub once: bool,
    pub duty: bool,
    pub initiation: Predicate,
    pub steps: Vec<AldsStep>,
}

static STEP_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r#"^STEP\s+(\d+)\s+EXPECT\s+(.+?)\s+SAY\s+"((?:[^"\\]|\\.)*)"\s+THEN\s+(\S+)\s+ELSE\s+(\S+)$"#,
    )
    .unwrap()
});
static SLOT_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\{([^{}]*)\}").unwrap());

pub(crate) fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(n) = chars.next() {
                out.push(n);
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// Parses one `.alds` script; `file` is used in error messages.
pub fn parse_alds(text: &str, file: &str) -> Result<Vec<AldsScenario>, ControlError> {
    let mut out: Vec<AldsScenario> = Vec::new();
    // line of each scenario header, for errors raised when it is closed
    let mut header_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| ControlError::script(file, line_no, m);
        if let Some(rest) = line.strip_prefix("SCENARIO ") {
            let mut parts = rest.split_whitespace();
            let id = parts.next().ok_or_else(|| err("missing scenario id".into()))?;
            if out.iter().any(|s| s.id == id) {
                return Err(err(format!("duplicate scenario {id:?}")));
            }
            let mut scn = AldsScenario {
                id: id.to_string(),
                once: false,
                duty: false,
                initiation: Predicate { atoms: vec![] },
                steps: vec![],
            };
            for flag in parts {
                match flag {
                    "ONCE" => scn.once = true,
                    "DUTY" => scn.duty = true,
                    other => return Err(err(format!("unknown scenario flag {other:?}"))),
                }
            }
            out.push(scn);
            header_lines.push(line_no);
            continue;
        }
        let current = out
            .last_mut()
            .ok_or_else(|| err("statement outside a SCENARIO block".into()))?;
        if let Some(pred) = line.strip_prefix("WHEN ") {
            if !current.initiation.atoms.is_empty() {
                return Err(err("second WHEN in one scenario".into()));
            }
            current.initiation = Predicate::parse(pred).map_err(err)?;
        } else if let Some(c) = STEP_RE.captures(line) {
            let n: usize = c[1].parse().map_err(|_| err("bad step number".into()))?;
            if n != current.steps.len() {
                return Err(err(format!("expected STEP {}, found STEP {n}", current.steps.len())));
            }
            let template = unescape(&c[3]);
            for slot in SLOT_RE.captures_iter(&template) {
                if !SLOTS.contains(&&slot[1]) {
                    return Err(err(format!("unknown template slot {{{}}}", &slot[1])));
                }
            }
            let on_match = match &c[4] {
                "END" => Next::End,
                n => Next::Step(n.parse().map_err(|_| err(format!("bad THEN target {n:?}")))?),
            };
            let on_miss = match &c[5] {
                "retry" => OnMiss::Retry,
                "abort" => OnMiss::Abort,
                "skip" => OnMiss::Skip,
                other => return Err(err(format!("bad ELSE action {other:?}"))),
            };
            current.steps.push(AldsStep {
                expect: Predicate::parse(&c[2]).map_err(err)?,
                template,
                on_match,
                on_miss,
            });
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    for (scn, line) in out.iter().zip(header_lines) {
        let err = |m: String| ControlError::script(file, line, m);
        if scn.initiation.atoms.is_empty() {
            return Err(err(format!("scenario {:?} has no WHEN", scn.id)));
        }
        if scn.steps.is_empty() {
            return Err(err(format!("scenario {:?} has no steps", scn.id)));
        }
        for step in &scn.steps {
            if let Next::Step(n) = step.on_match {
                if n >= scn.steps.len() {
                    return Err(err(format!("scenario {:?}: THEN {n} out of range", scn.id)));
                }
            }
        }
    }
    Ok(out)
}

pub fn load_alds(path: &Path) -> Result<Vec<AldsScenario>, ControlError> {
    let text = fs::read_to_string(path).map_err(|e| ControlError::Io(path.display().to_string(), e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    parse_alds(&text, &name)
}

/// Fills `{slot}` markers; `None` when any slot has no value.
pub fn fill_template(
    template: &str,
    report: &PerceptionReport,
    sender: &str,
    state: &InformationState,
) -> Option<String> {
    let mut missing = None;
    let filled = SLOT_RE.replace_all(template, |c: &regex::Captures<'_>| {
        let value = match &c[1] {
            "user" => Some(sender.to_string()),
            "other" => state.roles.other_than(sender).map(str::to_string),
            "entity" => report.first_entity().map(|e| e.phrase.clone()),
            "focus" => report.focus.focus_terms.first().cloned(),
            _ => None,
        };
        value.unwrap_or_else(|| {
            missing = Some(c[1].to_string());
            String::new()
        })
    });
    match missing {
        Some(slot) => {
            log::warn!("template slot {{{slot}}} unresolved in {template:?}; candidate dropped");
            None
        }
        None => Some(filled.into_owned()),
    }
}

/// Change to a participant's script state produced by [`match_scenarios`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioDelta {
    pub participant: String,
    /// `None` leaves the state untouched, `Some(None)` clears it.
    pub active: Option<Option<ActiveScenario>>,
    pub started: Option<String>,
}

impl ScenarioDelta {
    fn unchanged(participant: &str) -> Self {
        Self {
            participant: participant.to_string(),
            active: None,
            started: None,
        }
    }

    pub fn apply(self, state: &mut InformationState) {
        if let Some(id) = self.started {
            state.started.insert((self.participant.clone(), id));
        }
        match self.active {
            Some(Some(a)) => {
                state.active.insert(self.participant, a);
            }
            Some(None) => {
                state.active.remove(&self.participant);
            }
            None => {}
        }
    }
}

enum StepOutcome {
    Said(Option<ResponseCandidate>, Option<usize>),
    Waiting(usize),
    Aborted,
}

fn run_step(
    scn: &AldsScenario,
    index: usize,
    ctx: &PredicateContext<'_>,
    sender: &str,
    state: &InformationState,
) -> StepOutcome {
    let step = &scn.steps[index];
    let next = match step.on_match {
        Next::Step(n) => Some(n),
        Next::End => None,
    };
    if step.expect.eval(ctx) {
        let candidate = fill_template(&step.template, ctx.report, sender, state).map(|text| {
            ResponseCandidate::new(
                text,
                CandidateSource::Alds,
                PRIORITY_ALDS,
                Target::Participant(sender.to_string()),
            )
        });
        return StepOutcome::Said(candidate, next);
    }
    match step.on_miss {
        OnMiss::Retry => StepOutcome::Waiting(index),
        OnMiss::Abort => StepOutcome::Aborted,
        OnMiss::Skip => StepOutcome::Said(None, next),
    }
}

fn settle(scn: &AldsScenario, outcome: StepOutcome) -> (Vec<ResponseCandidate>, Option<ActiveScenario>) {
    let active = |step| ActiveScenario {
        scenario: scn.id.clone(),
        step,
        duty: scn.duty,
    };
    match outcome {
        StepOutcome::Said(c, next) => (c.into_iter().collect(), next.map(active)),
        StepOutcome::Waiting(step) => (vec![], Some(active(step))),
        StepOutcome::Aborted => (vec![], None),
    }
}

/// Continues the sender's active script, or starts the first script in
/// `library` whose initiation predicate holds.
pub fn match_scenarios(
    report: &PerceptionReport,
    sender: &str,
    state: &InformationState,
    library: &[AldsScenario],
) -> (Vec<ResponseCandidate>, ScenarioDelta) {
    let ctx = PredicateContext {
        role: state.roles.role_of(sender),
        turn: state.turn(sender),
        report,
    };
    let mut delta = ScenarioDelta::unchanged(sender);
    let mut skip: BTreeSet<&str> = BTreeSet::new();

    if let Some(act) = state.active.get(sender) {
        match library.iter().find(|s| s.id == act.scenario) {
            Some(scn) if act.step < scn.steps.len() => {
                let outcome = run_step(scn, act.step, &ctx, sender, state);
                if !matches!(outcome, StepOutcome::Aborted) {
                    let (cands, active) = settle(scn, outcome);
                    delta.active = Some(active);
                    return (cands, delta);
                }
                skip.insert(scn.id.as_str());
            }
            _ => {}
        }
        delta.active = Some(None);
    }

    for scn in library {
        if skip.contains(scn.id.as_str())
            || (scn.once && state.started.contains(&(sender.to_string(), scn.id.clone())))
        {
            continue;
        }
        if scn.initiation.eval(&ctx) {
            let (cands, active) = settle(scn, run_step(scn, 0, &ctx, sender, state));
            delta.active = Some(active);
            delta.started = Some(scn.id.clone());
            return (cands, delta);
        }
    }
    (vec![], delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::profile::AffectiveProfile;
    use crate::control::RoleAssignment;
    use crate::perception::{
        CategoryProfile, DialogueActLabel, EntityMention, FocusResult, SentimentResult,
        SurfaceFeatures, VadResult,
    };

    const SCRIPT: &str = r#"
# bar duties
SCENARIO serve DUTY
WHEN da=Order & entity:drinks
STEP 0 EXPECT true SAY "here you are! enjoy! [order served]" THEN END ELSE abort

SCENARIO origin ONCE
WHEN entity:countries
STEP 0 EXPECT true SAY "Where do you come from?" THEN 1 ELSE abort
STEP 1 EXPECT entity:countries SAY "I like {entity}. When you are away, do you miss it?" THEN 2 ELSE retry
STEP 2 EXPECT !da=Bye SAY "Why is it like that, why do you feel this way?" THEN END ELSE skip
"#;

    fn report(da: DialogueAct, entity: Option<(&str, &str)>) -> PerceptionReport {
        PerceptionReport {
            tokens: vec![],
            sentiment: SentimentResult::from_scores(0.0, 0.0),
            vad: VadResult::default(),
            categories: CategoryProfile::default(),
            dialogue_act: DialogueActLabel { label: da, confidence: 1.0 },
            surface: SurfaceFeatures::default(),
            entities: entity
                .map(|(g, p)| EntityMention { gazetteer: g.into(), phrase: p.into(), span: (0, p.len()) })
                .into_iter()
                .collect(),
            focus: FocusResult::default(),
        }
    }

    fn state() -> InformationState {
        InformationState::new("s", RoleAssignment::dyadic("ana"), AffectiveProfile::neutral(), 1)
    }

    fn step(
        lib: &[AldsScenario],
        st: &mut InformationState,
        r: &PerceptionReport,
    ) -> Vec<String> {
        let (c, d) = match_scenarios(r, "ana", st, lib);
        d.apply(st);
        c.into_iter().map(|c| c.text).collect()
    }

    #[test]
    fn parses_script() {
        let lib = parse_alds(SCRIPT, "t.alds").unwrap();
        assert_eq!(lib.len(), 2);
        assert!(lib[0].duty && !lib[0].once);
        assert_eq!(lib[1].steps.len(), 3);
        assert_eq!(lib[1].steps[2].on_miss, OnMiss::Skip);
        assert_eq!(lib[1].steps[2].expect.atoms, vec![(true, Atom::Da(DialogueAct::Bye))]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "SCENARIO a\nWHEN da=Shout\n";
        assert!(matches!(parse_alds(bad, "x"), Err(ControlError::Script { line: 2, .. })));
        let bad = "SCENARIO a\nWHEN true\nSTEP 0 EXPECT true SAY \"hi {name}\" THEN END ELSE abort\n";
        assert!(matches!(parse_alds(bad, "x"), Err(ControlError::Script { line: 3, .. })));
        let bad = "SCENARIO a\nWHEN true\nSTEP 0 EXPECT true SAY \"hi\" THEN 4 ELSE abort\n";
        assert!(parse_alds(bad, "x").is_err());
        assert!(parse_alds("SCENARIO a\nWHEN true\n", "x").is_err());
        assert!(parse_alds("WHEN true\n", "x").is_err());
    }

    #[test]
    fn order_with_drink_is_served() {
        let lib = parse_alds(SCRIPT, "t").unwrap();
        let mut st = state();
        let out = step(&lib, &mut st, &report(DialogueAct::Order, Some(("drinks", "water"))));
        assert_eq!(out, vec!["here you are! enjoy! [order served]"]);
        assert!(st.active.is_empty());
    }

    #[test]
    fn unmatched_report_yields_nothing() {
        let lib = parse_alds(SCRIPT, "t").unwrap();
        let mut st = state();
        assert!(step(&lib, &mut st, &report(DialogueAct::Statement, None)).is_empty());
        assert_eq!(st, state());
    }

    #[test]
    fn origin_arc() {
        let lib = parse_alds(SCRIPT, "t").unwrap();
        let mut st = state();
        let out = step(&lib, &mut st, &report(DialogueAct::Statement, Some(("countries", "Germany"))));
        assert_eq!(out, vec!["Where do you come from?"]);
        // retry keeps waiting for a country
        assert!(step(&lib, &mut st, &report(DialogueAct::Statement, None)).is_empty());
        assert_eq!(st.active["ana"].step, 1);
        let out = step(&lib, &mut st, &report(DialogueAct::Statement, Some(("countries", "Colombia"))));
        assert_eq!(out, vec!["I like Colombia. When you are away, do you miss it?"]);
        let out = step(&lib, &mut st, &report(DialogueAct::YesAnswer, None));
        assert_eq!(out, vec!["Why is it like that, why do you feel this way?"]);
        assert!(st.active.is_empty());
        // run-once
        assert!(step(&lib, &mut st, &report(DialogueAct::Statement, Some(("countries", "Peru")))).is_empty());
    }

    #[test]
    fn unresolved_slot_drops_candidate() {
        let lib = parse_alds(
            "SCENARIO a\nWHEN true\nSTEP 0 EXPECT true SAY \"ask {other}\" THEN END ELSE abort\n",
            "t",
        )
        .unwrap();
        let mut st = state();
        assert!(step(&lib, &mut st, &report(DialogueAct::Statement, None)).is_empty());
    }
}
