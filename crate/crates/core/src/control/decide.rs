use std::cmp::Reverse;

use rand::Rng;

use super::exclusion::{shorten_response, Action, ExclusionPolicy, REQUIRED_SHORT_ANSWERS};
use super::profile::apply_profile;
use super::state::InformationState;
use super::{CandidateSource, ResponseCandidate, Target, PRIORITY_FALLBACK};
use crate::lexicon::LexiconBundle;

pub struct DecisionContext<'a> {
    pub sender: &'a str,
    pub bundle: &'a LexiconBundle,
    /// Generic lines used when no candidate applies.
    pub fallbacks: &'a [String],
    pub policy: Option<&'a ExclusionPolicy>,
}

impl DecisionContext<'_> {
    fn short_answers(&self) -> Vec<String> {
        match self.policy {
            Some(p) => p.short_answers.clone(),
            None => REQUIRED_SHORT_ANSWERS.map(String::from).to_vec(),
        }
    }
}

/// Highest priority first; ties go to the more specific, then to a fixed
/// order on source and text so the choice ignores input order.
pub fn best_candidate(candidates: &[ResponseCandidate]) -> Option<&ResponseCandidate> {
    candidates
        .iter()
        .filter(|c| !c.text.trim().is_empty())
        .min_by_key(|c| (Reverse(c.priority), c.specificity, c.source, c.text.as_str()))
}

/// Final system response for one inbound utterance, or `None` for silence.
pub fn decide_response(
    candidates: &[ResponseCandidate],
    action: Action,
    state: &mut InformationState,
    ctx: &DecisionContext<'_>,
) -> Option<ResponseCandidate> {
    if state.terminal {
        return None;
    }
    let to_sender = Target::Participant(ctx.sender.to_string());
    let triad = state.roles.triad().ok().map(|(i, e)| (i.to_string(), e.to_string()));

    match action {
        Action::Omit => return None,
        Action::Redirect | Action::IncludedSideQuery => {
            let policy = ctx.policy?;
            let (included, excluded) = triad?;
            let (text, target) = if action == Action::Redirect {
                (policy.redirect_text(&included, &excluded), Target::Participant(excluded))
            } else {
                (policy.side_query_text(&included, &excluded), Target::Participant(included))
            };
            return Some(ResponseCandidate::new(text, CandidateSource::Scripted, PRIORITY_FALLBACK, target));
        }
        _ => {}
    }

    let short = ctx.short_answers();
    let chosen = match best_candidate(candidates) {
        Some(c) => c.clone(),
        None if action == Action::RespondShort || ctx.fallbacks.is_empty() => {
            let text = short[state.rng.random_range(0..short.len())].clone();
            ResponseCandidate::new(text, CandidateSource::ShortAnswer, PRIORITY_FALLBACK, to_sender.clone())
        }
        None => {
            let text = ctx.fallbacks[state.rng.random_range(0..ctx.fallbacks.len())].clone();
            ResponseCandidate::new(text, CandidateSource::Pattern, PRIORITY_FALLBACK, to_sender.clone())
        }
    };

    let profile = state.profile.clone();
    let mut out = apply_profile(&chosen, &profile, ctx.bundle, &mut state.rng);
    if action == Action::RespondShort {
        out.text = shorten_response(&out.text, &short, &ctx.bundle.modifiers, &mut state.rng);
    }
    if triad.is_some() {
        out.text = format!("{}, {}", ctx.sender, out.text);
    }
    out.target = to_sender;
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::profile::AffectiveProfile;
    use crate::control::{RoleAssignment, PRIORITY_ALDS, PRIORITY_PATTERN};
    use crate::lexicon::{CategoryLexicon, ModifierTables, VadLexicon};

    fn bundle() -> LexiconBundle {
        LexiconBundle::new(vec![], VadLexicon::default(), CategoryLexicon::default(), ModifierTables::default(), vec![])
            .unwrap()
    }

    fn cand(text: &str, source: CandidateSource, priority: i32) -> ResponseCandidate {
        ResponseCandidate::new(text, source, priority, Target::Broadcast)
    }

    fn decide(cands: &[ResponseCandidate], action: Action, roles: RoleAssignment, sender: &str) -> Option<String> {
        let b = bundle();
        let fallbacks = vec!["i see.".to_string()];
        let policy = ExclusionPolicy::default();
        let mut st = InformationState::new("s", roles, AffectiveProfile::neutral(), 5);
        let ctx = DecisionContext { sender, bundle: &b, fallbacks: &fallbacks, policy: Some(&policy) };
        decide_response(cands, action, &mut st, &ctx).map(|c| c.text)
    }

    #[test]
    fn alds_beats_pattern() {
        let cands = [
            cand("pattern line", CandidateSource::Pattern, PRIORITY_PATTERN),
            cand("script line", CandidateSource::Alds, PRIORITY_ALDS),
        ];
        let out = decide(&cands, Action::RespondFull, RoleAssignment::dyadic("ana"), "ana");
        assert_eq!(out.as_deref(), Some("script line"));
    }

    #[test]
    fn empty_candidates_fall_back() {
        let out = decide(&[], Action::RespondFull, RoleAssignment::triadic("ana", "ben"), "ana");
        assert_eq!(out.as_deref(), Some("ana, i see."));
        let out = decide(&[], Action::RespondShort, RoleAssignment::triadic("ana", "ben"), "ben").unwrap();
        let answer = out.strip_prefix("ben, ").unwrap();
        assert!(REQUIRED_SHORT_ANSWERS.contains(&answer));
    }

    #[test]
    fn omit_is_silent() {
        let cands = [cand("x", CandidateSource::Alds, PRIORITY_ALDS)];
        assert_eq!(decide(&cands, Action::Omit, RoleAssignment::triadic("a", "b"), "b"), None);
    }

    #[test]
    fn short_response_is_shortened_and_prefixed() {
        let cands = [cand("I like Colombia. When you are away, do you miss it?", CandidateSource::Alds, 2)];
        let out = decide(&cands, Action::RespondShort, RoleAssignment::triadic("Juliana", "Maria"), "Maria");
        assert_eq!(out.as_deref(), Some("Maria, I like Colombia."));
    }

    #[test]
    fn redirect_and_side_query_use_policy_templates() {
        let r = RoleAssignment::triadic("Juliana", "Maria");
        assert_eq!(
            decide(&[], Action::Redirect, r.clone(), "Maria").as_deref(),
            Some("Maria, I think Juliana might have a really good answer to it.")
        );
        assert_eq!(
            decide(&[], Action::IncludedSideQuery, r, "Juliana").as_deref(),
            Some("Juliana, do you know what Maria is talking about?")
        );
    }
}
