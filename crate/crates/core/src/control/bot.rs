//! The conversational agent of one session: perception, scripts, patterns,
//! routing and profile post-processing wired together.

use std::sync::Arc;

use super::alds::match_scenarios;
use super::decide::{decide_response, DecisionContext};
use super::exclusion::{exclusion_route, is_duty, Action, Route};
use super::kit::ScenarioKit;
use super::patterns::{match_patterns, normalize};
use super::profile::{apply_profile, ProfileKind};
use super::state::{Event, InformationState};
use super::{CandidateSource, ControlError, ResponseCandidate, Role, RoleAssignment, Target, PRIORITY_FALLBACK};
use crate::perception::{Perceiver, Utterance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BotUtterance {
    pub text: String,
    pub target: Target,
    /// Routing decision that produced the line; `None` for opening and farewell.
    pub action: Option<Action>,
}

#[derive(Debug, Clone)]
pub struct Bot {
    kit: Arc<ScenarioKit>,
    perceiver: Perceiver,
    state: InformationState,
    profile_kind: ProfileKind,
    fallbacks: Vec<String>,
}

impl Bot {
    pub fn new(
        kit: Arc<ScenarioKit>,
        perceiver: Perceiver,
        session_id: &str,
        roles: RoleAssignment,
        profile_kind: ProfileKind,
        seed: u64,
        duration_ms: u64,
    ) -> Result<Self, ControlError> {
        if roles.is_triadic() {
            roles.triad()?;
        }
        let profile = kit
            .profile(profile_kind)
            .cloned()
            .ok_or_else(|| ControlError::config(&kit.name, format!("no {profile_kind} profile")))?;
        let state = InformationState::new(session_id, roles, profile, seed).with_duration(duration_ms);
        let fallbacks = kit.fallback_lines();
        Ok(Self {
            kit,
            perceiver,
            state,
            profile_kind,
            fallbacks,
        })
    }

    #[allow(clippy::misnamed_getters)]
    pub fn name(&self) -> &str {
        &self.kit.bot_name
    }

    pub fn state(&self) -> &InformationState {
        &self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.terminal
    }

    /// True when `text` names the bot (case-insensitive substring).
    pub fn mentions_bot(&self, text: &str) -> bool {
        text.to_lowercase().contains(&self.kit.bot_name)
    }

    fn scripted(&mut self, text: &str) -> BotUtterance {
        let c = ResponseCandidate::new(text, CandidateSource::Scripted, PRIORITY_FALLBACK, Target::Broadcast);
        let out = apply_profile(&c, &self.state.profile, &self.perceiver.bundle, &mut self.state.rng);
        self.state.advance(&Event::Outbound {
            target: Target::Broadcast,
            text: out.text.clone(),
        });
        BotUtterance {
            text: out.text,
            target: Target::Broadcast,
            action: None,
        }
    }

    /// The line that opens the session.
    pub fn opening(&mut self) -> BotUtterance {
        let text = self.kit.opening_for(self.profile_kind).to_string();
        self.scripted(&text)
    }

    /// Farewell once the session duration is reached; at most once.
    pub fn tick(&mut self, elapsed_ms: u64) -> Option<BotUtterance> {
        if self.state.advance(&Event::Tick { elapsed_ms }) {
            let text = self.kit.farewell_for(self.profile_kind).to_string();
            Some(self.scripted(&text))
        } else {
            None
        }
    }

    /// Ends the session now, returning the farewell unless already ended.
    pub fn close(&mut self) -> Option<BotUtterance> {
        if self.state.finish() {
            let text = self.kit.farewell_for(self.profile_kind).to_string();
            Some(self.scripted(&text))
        } else {
            None
        }
    }

    /// Handles one human utterance and returns the system's replies, in order.
    pub fn on_message(&mut self, utterance: &Utterance) -> Vec<BotUtterance> {
        let sender = utterance.sender.as_str();
        let Some(role) = self.state.roles.role_of(sender) else {
            log::warn!("message from unknown participant {sender:?} ignored");
            return vec![];
        };
        if self.state.terminal {
            return vec![];
        }
        let report = self.perceiver.perceive(utterance);
        self.state.advance(&Event::Inbound {
            sender: sender.to_string(),
            report: Box::new(report.clone()),
        });

        // the excluded participant is only answered when addressing the bot
        let addressed = role != Role::Excluded || self.mentions_bot(&utterance.text);
        if !addressed {
            return vec![];
        }

        let route = match (&self.kit.exclusion, self.state.roles.is_triadic()) {
            (Some(policy), true) => match exclusion_route(&report, sender, &mut self.state, policy) {
                Ok(r) => r,
                Err(e) => {
                    log::error!("routing failed: {e}");
                    return vec![];
                }
            },
            _ => Route {
                action: if is_duty(&report) { Action::BartenderDuty } else { Action::RespondFull },
                side_query: false,
            },
        };
        if route.action == Action::Omit {
            return vec![];
        }

        let (mut candidates, delta) = match_scenarios(&report, sender, &self.state, &self.kit.scenarios);
        delta.apply(&mut self.state);
        let words = normalize(&report.tokens, &[self.kit.bot_name.as_str()]);
        candidates.extend(match_patterns(&words, &self.kit.patterns));

        let ctx = DecisionContext {
            sender,
            bundle: &self.perceiver.bundle,
            fallbacks: &self.fallbacks,
            policy: self.kit.exclusion.as_ref(),
        };
        let mut out = Vec::new();
        if let Some(reply) = decide_response(&candidates, route.action, &mut self.state, &ctx) {
            out.push(BotUtterance {
                text: reply.text,
                target: reply.target,
                action: Some(route.action),
            });
        }
        if route.side_query {
            if let Some(q) = decide_response(&[], Action::IncludedSideQuery, &mut self.state, &ctx) {
                out.push(BotUtterance {
                    text: q.text,
                    target: q.target,
                    action: Some(Action::IncludedSideQuery),
                });
            }
        }
        for u in &out {
            self.state.advance(&Event::Outbound {
                target: u.target.clone(),
                text: u.text.clone(),
            });
        }
        out
    }
}
