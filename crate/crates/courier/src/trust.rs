//! Pairwise trust and the two trust-gated cooperation decisions.
//!
//! Trust in a peer is a scalar in [0, 1] updated from delegation
//! outcomes. A decision compares stored trust against a required level
//! built from the base threshold plus mood, privacy and load modifiers.
//! The met agent's perceived emotion never enters here directly; it only
//! reaches a decision through the decider's own mood.

use std::collections::BTreeMap;

use crate::affect::MoodLabel;
use crate::world::AgentId;

pub const ONTIME_TRUST_GAIN: f64 = 0.1;
pub const DELAY_TRUST_LOSS_PER_CYCLE: f64 = 0.05;
const PRIVACY_DISCOUNT: f64 = 0.1;
const LOAD_STEP: f64 = 0.05;
const MOOD_STEP: f64 = 0.1;

fn clamp01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Bonus/malus the decider's own mood puts on the trust required:
/// positive moods encourage cooperation, negative and antisocial moods
/// discourage it.
pub fn mood_modifier(label: MoodLabel) -> f64 {
    match label {
        MoodLabel::Joy | MoodLabel::Surprise => -MOOD_STEP,
        MoodLabel::Sad | MoodLabel::Fearful | MoodLabel::Angry => MOOD_STEP,
        MoodLabel::Neutral => 0.0,
    }
}

/// Inputs to one trust-gated decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustDecisionContext {
    pub mood_label: MoodLabel,
    /// The box in question is private for the decider.
    pub own_privacy_involved: bool,
    /// Requester side: boxes currently carried. Responder side: boxes
    /// already carried and assigned.
    pub load: u32,
}

/// Trust required to ask a peer to take over a box. Privacy and load
/// both lower the bar: needing help makes the agent less picky.
pub fn required_trust_to_request(ctx: &TrustDecisionContext, base: f64) -> f64 {
    let privacy = if ctx.own_privacy_involved {
        PRIVACY_DISCOUNT
    } else {
        0.0
    };
    clamp01(base + mood_modifier(ctx.mood_label) - privacy - LOAD_STEP * ctx.load as f64)
}

/// Trust required to accept a delegation offer. Existing load raises
/// the bar; the box being private for the responder lowers it.
pub fn required_trust_to_accept(ctx: &TrustDecisionContext, base: f64) -> f64 {
    let privacy = if ctx.own_privacy_involved {
        PRIVACY_DISCOUNT
    } else {
        0.0
    };
    clamp01(base + mood_modifier(ctx.mood_label) - privacy + LOAD_STEP * ctx.load as f64)
}

/// Trust equal to the requirement suffices.
pub fn decide(trust_in_peer: f64, required: f64) -> bool {
    trust_in_peer >= required
}

/// One agent's view of its peers. Unknown peers read as
/// `default_trust` without mutating the store.
#[derive(Debug, Clone)]
pub struct TrustStore {
    values: BTreeMap<AgentId, f64>,
    pub default_trust: f64,
    pub base_threshold: f64,
}

impl TrustStore {
    pub fn new(default_trust: f64, base_threshold: f64) -> Self {
        TrustStore {
            values: BTreeMap::new(),
            default_trust,
            base_threshold,
        }
    }

    pub fn get(&self, peer: AgentId) -> f64 {
        self.values.get(&peer).copied().unwrap_or(self.default_trust)
    }

    /// Delivery without delay earns +0.1; each cycle of delay costs
    /// 0.05 (no success bonus on a late delivery). Returns the new value.
    pub fn update_on_outcome(&mut self, peer: AgentId, delay_cycles: u32) -> f64 {
        let current = self.get(peer);
        let updated = if delay_cycles == 0 {
            current + ONTIME_TRUST_GAIN
        } else {
            current - DELAY_TRUST_LOSS_PER_CYCLE * delay_cycles as f64
        };
        let updated = clamp01(updated);
        self.values.insert(peer, updated);
        updated
    }

    pub fn values(&self) -> impl Iterator<Item = (AgentId, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}
