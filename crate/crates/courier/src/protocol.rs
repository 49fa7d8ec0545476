//! Contract-net (CFP) conversations and delegation chains.
//!
//! Each delegation is one strictly 1-to-1 CFP exchange:
//! cfp -> propose|refuse -> accept_proposal -> inform_done|inform_failure.
//! The initiator never rejects a proposal because its trust gate runs
//! before the cfp is sent. Repeated delegations of one package form a
//! chain whose links carry trust feedback when the package lands.

use serde::Serialize;
use thiserror::Error;

use crate::world::{AgentId, PackageId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Performative {
    Cfp,
    Propose,
    Refuse,
    AcceptProposal,
    RejectProposal,
    InformDone,
    InformFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ConversationId(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    pub performative: Performative,
    pub sender: AgentId,
    pub receiver: AgentId,
    pub conversation: ConversationId,
    pub package: PackageId,
    pub deadline_cycle: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CfpState {
    Started,
    Proposed,
    Refused,
    Accepted,
    Rejected,
    Done,
    Failed,
}

impl CfpState {
    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            CfpState::Refused | CfpState::Rejected | CfpState::Done | CfpState::Failed
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("agent {0} cannot delegate to itself")]
    SelfDelegation(AgentId),
    #[error("initiator {0} does not carry package {1}")]
    PackageNotCarried(AgentId, PackageId),
    #[error("illegal transition from {from:?} in conversation {id:?}")]
    IllegalTransition { id: ConversationId, from: CfpState },
    #[error("chain link {delegator} -> {delegatee} does not continue from {expected}")]
    BrokenChain {
        delegator: AgentId,
        delegatee: AgentId,
        expected: AgentId,
    },
}

/// One CFP exchange between a single initiator and responder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfpConversation {
    pub id: ConversationId,
    pub initiator: AgentId,
    pub responder: AgentId,
    pub package: PackageId,
    pub deadline_cycle: u64,
    pub state: CfpState,
}

impl CfpConversation {
    pub fn initiate(
        id: ConversationId,
        initiator: AgentId,
        responder: AgentId,
        package: PackageId,
        deadline_cycle: u64,
        initiator_carries: bool,
    ) -> Result<(Self, Message), ProtocolError> {
        if initiator == responder {
            return Err(ProtocolError::SelfDelegation(initiator));
        }
        if !initiator_carries {
            return Err(ProtocolError::PackageNotCarried(initiator, package));
        }
        let conv = CfpConversation {
            id,
            initiator,
            responder,
            package,
            deadline_cycle,
            state: CfpState::Started,
        };
        let msg = conv.message(Performative::Cfp, initiator, responder);
        Ok((conv, msg))
    }

    fn message(&self, performative: Performative, sender: AgentId, receiver: AgentId) -> Message {
        Message {
            performative,
            sender,
            receiver,
            conversation: self.id,
            package: self.package,
            deadline_cycle: self.deadline_cycle,
        }
    }

    fn illegal(&self) -> ProtocolError {
        ProtocolError::IllegalTransition {
            id: self.id,
            from: self.state,
        }
    }

    /// Responder's answer: propose on accept, refuse (terminal) otherwise.
    pub fn respond(&mut self, accept: bool) -> Result<Message, ProtocolError> {
        if self.state != CfpState::Started {
            return Err(self.illegal());
        }
        self.state = if accept {
            CfpState::Proposed
        } else {
            CfpState::Refused
        };
        let performative = if accept {
            Performative::Propose
        } else {
            Performative::Refuse
        };
        Ok(self.message(performative, self.responder, self.initiator))
    }

    /// Initiator confirms a proposal; the world hand-off follows.
    pub fn conclude(&mut self) -> Result<Message, ProtocolError> {
        if self.state != CfpState::Proposed {
            return Err(self.illegal());
        }
        self.state = CfpState::Accepted;
        Ok(self.message(Performative::AcceptProposal, self.initiator, self.responder))
    }

    /// Result notification at delivery time: done when the package
    /// landed without delay, failure otherwise.
    pub fn finish(&mut self, delay_cycles: u64) -> Result<Message, ProtocolError> {
        if self.state != CfpState::Accepted {
            return Err(self.illegal());
        }
        self.state = if delay_cycles == 0 {
            CfpState::Done
        } else {
            CfpState::Failed
        };
        let performative = if delay_cycles == 0 {
            Performative::InformDone
        } else {
            Performative::InformFailure
        };
        Ok(self.message(performative, self.responder, self.initiator))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainLink {
    pub delegator: AgentId,
    pub delegatee: AgentId,
    pub cycle: u64,
}

/// Ordered hand-off history of one package. Consecutive links share an
/// agent; the first delegator is the owner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelegationChain {
    pub package: PackageId,
    pub owner: AgentId,
    links: Vec<ChainLink>,
}

impl DelegationChain {
    pub fn new(package: PackageId, owner: AgentId) -> Self {
        DelegationChain {
            package,
            owner,
            links: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        delegator: AgentId,
        delegatee: AgentId,
        cycle: u64,
    ) -> Result<(), ProtocolError> {
        let expected = self.last_carrier();
        if delegator != expected {
            return Err(ProtocolError::BrokenChain {
                delegator,
                delegatee,
                expected,
            });
        }
        self.links.push(ChainLink {
            delegator,
            delegatee,
            cycle,
        });
        Ok(())
    }

    pub fn last_carrier(&self) -> AgentId {
        self.links.last().map(|l| l.delegatee).unwrap_or(self.owner)
    }

    /// Who delegated the package to `agent` most recently, if anyone.
    pub fn direct_delegator_of(&self, agent: AgentId) -> Option<AgentId> {
        self.links
            .iter()
            .rev()
            .find(|l| l.delegatee == agent)
            .map(|l| l.delegator)
    }

    pub fn links(&self) -> &[ChainLink] {
        &self.links
    }

    /// Owner plus every delegatee, deduplicated, first appearance order.
    pub fn members(&self) -> Vec<AgentId> {
        let mut members = vec![self.owner];
        for l in &self.links {
            if !members.contains(&l.delegatee) {
                members.push(l.delegatee);
            }
        }
        members
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn started() -> CfpConversation {
        CfpConversation::initiate(
            ConversationId(0),
            AgentId(1),
            AgentId(2),
            PackageId(5),
            30,
            true,
        )
        .unwrap()
        .0
    }

    #[test]
    fn full_successful_exchange() {
        let (mut conv, cfp) = CfpConversation::initiate(
            ConversationId(9),
            AgentId(1),
            AgentId(2),
            PackageId(3),
            12,
            true,
        )
        .unwrap();
        assert_eq!(cfp.performative, Performative::Cfp);
        assert_eq!(conv.state, CfpState::Started);

        let propose = conv.respond(true).unwrap();
        assert_eq!(propose.performative, Performative::Propose);
        assert_eq!(propose.sender, AgentId(2));
        assert_eq!(conv.state, CfpState::Proposed);

        let accept = conv.conclude().unwrap();
        assert_eq!(accept.performative, Performative::AcceptProposal);
        assert_eq!(conv.state, CfpState::Accepted);

        let done = conv.finish(0).unwrap();
        assert_eq!(done.performative, Performative::InformDone);
        assert_eq!(conv.state, CfpState::Done);
        assert!(conv.state.is_terminal());
    }

    #[test]
    fn refusal_is_terminal() {
        let mut conv = started();
        let refuse = conv.respond(false).unwrap();
        assert_eq!(refuse.performative, Performative::Refuse);
        assert_eq!(conv.state, CfpState::Refused);
        assert!(matches!(
            conv.respond(true),
            Err(ProtocolError::IllegalTransition { .. })
        ));
    }

    #[test]
    fn late_delivery_informs_failure() {
        let mut conv = started();
        conv.respond(true).unwrap();
        conv.conclude().unwrap();
        let fail = conv.finish(3).unwrap();
        assert_eq!(fail.performative, Performative::InformFailure);
        assert_eq!(conv.state, CfpState::Failed);
    }

    #[test]
    fn self_delegation_and_uncarried_package_are_rejected() {
        assert_eq!(
            CfpConversation::initiate(ConversationId(0), AgentId(1), AgentId(1), PackageId(0), 0, true)
                .unwrap_err(),
            ProtocolError::SelfDelegation(AgentId(1))
        );
        assert_eq!(
            CfpConversation::initiate(ConversationId(0), AgentId(1), AgentId(2), PackageId(0), 0, false)
                .unwrap_err(),
            ProtocolError::PackageNotCarried(AgentId(1), PackageId(0))
        );
    }

    #[test]
    fn conclude_requires_a_proposal() {
        let mut conv = started();
        assert!(matches!(
            conv.conclude(),
            Err(ProtocolError::IllegalTransition { .. })
        ));
    }

    #[test]
    fn responding_twice_is_a_violation() {
        let mut conv = started();
        conv.respond(true).unwrap();
        assert!(matches!(
            conv.respond(true),
            Err(ProtocolError::IllegalTransition { .. })
        ));
    }

    #[test]
    fn chain_links_must_be_consecutive() {
        let mut chain = DelegationChain::new(PackageId(0), AgentId(0));
        chain.push(AgentId(0), AgentId(1), 3).unwrap();
        chain.push(AgentId(1), AgentId(2), 7).unwrap();
        assert_eq!(chain.last_carrier(), AgentId(2));
        assert_eq!(chain.members(), vec![AgentId(0), AgentId(1), AgentId(2)]);
        assert_eq!(chain.direct_delegator_of(AgentId(2)), Some(AgentId(1)));
        assert_eq!(chain.direct_delegator_of(AgentId(0)), None);

        assert!(matches!(
            chain.push(AgentId(0), AgentId(3), 9),
            Err(ProtocolError::BrokenChain { .. })
        ));
    }
}
