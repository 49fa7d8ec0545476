//! Deterministic multi-agent simulator of cooperative grid logistics:
//! carrier agents with PAD-based emotions, privacy-sensitive meetings,
//! trust-gated delegation over a contract-net protocol, and a batch
//! experiment harness.

pub mod affect;
pub mod agent;
pub mod config;
pub mod engine;
pub mod events;
pub mod harness;
pub mod protocol;
pub mod trust;
pub mod world;
