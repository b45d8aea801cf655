use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::profile::AffectiveProfile;
use super::{RoleAssignment, Target};
use crate::perception::PerceptionReport;

pub const HISTORY_LEN: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveScenario {
    pub scenario: String,
    pub step: usize,
    pub duty: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformationState {
    pub session_id: String,
    pub turns: BTreeMap<String, usize>,
    pub history: BTreeMap<String, VecDeque<PerceptionReport>>,
    /// Active script per participant.
    pub active: BTreeMap<String, ActiveScenario>,
    /// `(participant, scenario)` pairs already started, for run-once scripts.
    pub started: BTreeSet<(String, String)>,
    pub profile: AffectiveProfile,
    pub roles: RoleAssignment,
    pub rng: ChaCha8Rng,
    pub elapsed_ms: u64,
    pub duration_ms: Option<u64>,
    pub terminal: bool,
    pub outbound: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Inbound {
        sender: String,
        report: Box<PerceptionReport>,
    },
    Outbound {
        target: Target,
        text: String,
    },
    Tick {
        elapsed_ms: u64,
    },
}

impl InformationState {
    pub fn new(
        session_id: impl Into<String>,
        roles: RoleAssignment,
        profile: AffectiveProfile,
        seed: u64,
    ) -> Self {
        Self {
            session_id: session_id.into(),
            turns: roles.roles.keys().map(|n| (n.clone(), 0)).collect(),
            history: BTreeMap::new(),
            active: BTreeMap::new(),
            started: BTreeSet::new(),
            profile,
            roles,
            rng: ChaCha8Rng::seed_from_u64(seed),
            elapsed_ms: 0,
            duration_ms: None,
            terminal: false,
            outbound: 0,
        }
    }

    pub fn with_duration(mut self, duration_ms: u64) -> Self {
        self.duration_ms = Some(duration_ms);
        self
    }

    pub fn turn(&self, participant: &str) -> usize {
        self.turns.get(participant).copied().unwrap_or(0)
    }

    pub fn last_report(&self, participant: &str) -> Option<&PerceptionReport> {
        self.history.get(participant).and_then(|h| h.back())
    }

    /// Applies one event. Returns true when this event made the state terminal.
    pub fn advance(&mut self, event: &Event) -> bool {
        match event {
            Event::Inbound { sender, report } => {
                *self.turns.entry(sender.clone()).or_insert(0) += 1;
                let h = self.history.entry(sender.clone()).or_default();
                h.push_back((**report).clone());
                while h.len() > HISTORY_LEN {
                    h.pop_front();
                }
                false
            }
            Event::Outbound { .. } => {
                self.outbound += 1;
                false
            }
            Event::Tick { elapsed_ms } => {
                self.elapsed_ms = self.elapsed_ms.max(*elapsed_ms);
                match self.duration_ms {
                    Some(d) if !self.terminal && self.elapsed_ms >= d => {
                        self.terminal = true;
                        true
                    }
                    _ => false,
                }
            }
        }
    }

    pub fn finish(&mut self) -> bool {
        !std::mem::replace(&mut self.terminal, true)
    }
}

pub fn advance_state(mut state: InformationState, event: &Event) -> InformationState {
    state.advance(event);
    state
}
