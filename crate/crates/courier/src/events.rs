//! Structured run log. One run with a fixed (config, seed) always
//! produces a byte-identical JSONL serialization.

use serde::Serialize;

use crate::affect::MoodLabel;
use crate::protocol::{ConversationId, Performative};
use crate::world::{AgentId, Cell, PackageId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisclosureKind {
    Box,
    Cell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    Request,
    Accept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardReason {
    OnTimeDelivery,
    LateDelivery,
    PrivacyDisclosure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Assign {
        cycle: u64,
        package: PackageId,
        agent: AgentId,
        deadline: u64,
    },
    Meeting {
        cycle: u64,
        cell: Cell,
        agents: Vec<AgentId>,
    },
    Disclosure {
        cycle: u64,
        agent: AgentId,
        kind: DisclosureKind,
    },
    TrustDecision {
        cycle: u64,
        kind: DecisionKind,
        decider: AgentId,
        peer: AgentId,
        package: PackageId,
        mood: MoodLabel,
        mood_modifier: f64,
        trust: f64,
        required: f64,
        granted: bool,
    },
    Message {
        cycle: u64,
        performative: Performative,
        sender: AgentId,
        receiver: AgentId,
        conversation: ConversationId,
        package: PackageId,
    },
    Handoff {
        cycle: u64,
        package: PackageId,
        from: AgentId,
        to: AgentId,
    },
    Delivery {
        cycle: u64,
        package: PackageId,
        carrier: AgentId,
        delay: u64,
        on_time: bool,
        chain: Vec<AgentId>,
    },
    TrustUpdate {
        cycle: u64,
        agent: AgentId,
        peer: AgentId,
        value: f64,
    },
    Reward {
        cycle: u64,
        agent: AgentId,
        amount: f64,
        reason: RewardReason,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    events: Vec<Event>,
}

impl EventLog {
    pub fn push(&mut self, event: Event) {
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One JSON object per line, in emission order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }
}
