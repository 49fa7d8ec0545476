//! Deterministic cycle scheduler binding world, agents, affect, trust
//! and the delegation protocol together.
//!
//! Phase order within one cycle:
//!   1. perception
//!   2. deliberation + movement, ascending agent id
//!   3. meeting detection
//!   4. per meeting pair: privacy sampling, disclosures, mood
//!      observation, at most one CFP exchange and hand-off
//!   5. delivery detection, reward/penalty credit, trust feedback
//!   6. per agent: event PAD deltas, arousal update, pleasure and
//!      dominance decay
//!
//! A single seeded RNG stream serves the whole run: initialization
//! draws first (positions, personalities, idle set, destinations,
//! assignments, box privacy), then per-cycle draws in phase order.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affect::{
    self, AffectParams, MoodLabel, PadDimension, PadState, Personality, SourceVector,
};
use crate::agent::{self, BeliefBase, Desire, IdleAction};
use crate::config::{ConfigError, Scenario, SimConfig};
use crate::events::{DecisionKind, DisclosureKind, Event, EventLog, RewardReason};
use crate::protocol::{CfpConversation, CfpState, ConversationId, DelegationChain};
use crate::trust::{self, TrustDecisionContext, TrustStore};
use crate::world::{
    self, chebyshev_distance, AgentBody, AgentId, Cell, Grid, Package, PackageId,
};

/// Event-driven pleasure adjustment (reward felt / goal failed).
const EVENT_PLEASURE_DELTA: f64 = 0.1;
/// Dominance loss when meeting an angry-mooded agent.
const ANGER_DOMINANCE_DELTA: f64 = -0.1;
/// Dominance swing for above/below-average performance per task.
const PERFORMANCE_DOMINANCE_DELTA: f64 = 0.1;

/// Dominance adjustment for a changed carried-task count.
fn task_count_delta(count: usize) -> f64 {
    match count {
        0 => 0.1,
        1 => 0.05,
        n => -0.05 * (n as f64 - 1.0),
    }
}

/// Explicit initial placement, for reproducing hand-built scenarios.
#[derive(Debug, Clone)]
pub struct Layout {
    pub agent_positions: Vec<Cell>,
    pub personalities: Vec<Personality>,
    pub packages: Vec<PackageSetup>,
}

#[derive(Debug, Clone)]
pub struct PackageSetup {
    pub owner: AgentId,
    pub destination: Cell,
    pub private_for_owner: bool,
}

/// Append-only reward and completion accounting.
#[derive(Debug, Clone)]
pub struct RewardLedger {
    agent_reward: Vec<f64>,
    agent_completed: Vec<u32>,
    total: f64,
}

impl RewardLedger {
    fn new(n_agents: usize) -> Self {
        RewardLedger {
            agent_reward: vec![0.0; n_agents],
            agent_completed: vec![0; n_agents],
            total: 0.0,
        }
    }

    fn credit(&mut self, agent: AgentId, amount: f64) {
        self.agent_reward[agent.0 as usize] += amount;
        self.total += amount;
    }

    fn complete(&mut self, agent: AgentId) {
        self.agent_completed[agent.0 as usize] += 1;
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn agent_reward(&self, agent: AgentId) -> f64 {
        self.agent_reward[agent.0 as usize]
    }

    pub fn agent_completed(&self, agent: AgentId) -> u32 {
        self.agent_completed[agent.0 as usize]
    }

    /// Mean accumulated reward per completed task over agents with at
    /// least one completion; zero before any completion.
    fn population_mean_reward_per_task(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0u32;
        for (r, c) in self.agent_reward.iter().zip(&self.agent_completed) {
            if *c > 0 {
                sum += r / *c as f64;
                n += 1;
            }
        }
        (n > 0).then(|| sum / n as f64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub on_time: u32,
    pub late: u32,
    pub disclosures: u32,
    pub cfp_sent: u32,
    pub cfp_accepted: u32,
    pub cfp_refused: u32,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub total_reward: f64,
    pub cycles: u64,
    pub on_time: u32,
    pub late: u32,
    pub disclosures: u32,
    pub cfp_sent: u32,
    pub cfp_accepted: u32,
    pub cfp_refused: u32,
    pub terminated: bool,
    pub log: EventLog,
}

struct Mind {
    beliefs: BeliefBase,
    desire: Desire,
    pad: PadState,
    trust: TrustStore,
    prev_sources: SourceVector,
}

/// Per-cycle scratch per agent: PAD deltas collected during phases 4-5
/// and this cycle's emotion sources.
#[derive(Default, Clone)]
struct CycleFx {
    deltas: Vec<(PadDimension, f64)>,
    sources: SourceVector,
}

pub struct SimState {
    cfg: SimConfig,
    params: AffectParams,
    rng: ChaCha8Rng,
    grid: Grid,
    cycle: u64,
    bodies: Vec<AgentBody>,
    minds: Vec<Mind>,
    packages: Vec<Package>,
    dests: Vec<Cell>,
    conversations: Vec<CfpConversation>,
    open_by_package: BTreeMap<PackageId, Vec<usize>>,
    chains: BTreeMap<PackageId, DelegationChain>,
    ledger: RewardLedger,
    counters: Counters,
    log: EventLog,
    prev_counts: Vec<usize>,
    next_conversation: u64,
}

impl SimState {
    /// Seeded random initialization per the configured parameters.
    pub fn new(cfg: SimConfig) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = cfg.n_agents as usize;

        let random_cell = |rng: &mut ChaCha8Rng| Cell {
            x: rng.gen_range(0..cfg.grid_size as i32),
            y: rng.gen_range(0..cfg.grid_size as i32),
        };

        let agent_positions: Vec<Cell> = (0..n).map(|_| random_cell(&mut rng)).collect();
        let personalities: Vec<Personality> = (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                if u < cfg.p_neurotic {
                    Personality::Neurotic
                } else if u < cfg.p_neurotic + cfg.p_psychotic {
                    Personality::Psychotic
                } else {
                    Personality::Extroverted
                }
            })
            .collect();

        // Idle set: the first `idle_count` agents of a shuffled order.
        let mut order: Vec<u32> = (0..cfg.n_agents).collect();
        order.shuffle(&mut rng);
        let idle_count = cfg.idle_agent_count() as usize;
        let mut busy: Vec<u32> = order[idle_count..].to_vec();
        busy.sort_unstable();
        let mut busy_shuffled = busy.clone();
        busy_shuffled.shuffle(&mut rng);

        let mut packages = Vec::with_capacity(cfg.n_packages as usize);
        for i in 0..cfg.n_packages as usize {
            let destination = random_cell(&mut rng);
            let owner = if i < busy_shuffled.len() {
                busy_shuffled[i]
            } else {
                busy[rng.gen_range(0..busy.len())]
            };
            packages.push(PackageSetup {
                owner: AgentId(owner),
                destination,
                private_for_owner: rng.gen_bool(cfg.privacy_prob),
            });
        }

        Self::build(
            cfg,
            Layout {
                agent_positions,
                personalities,
                packages,
            },
            rng,
        )
    }

    /// Deterministic construction from an explicit layout. The RNG is
    /// still seeded from the config for per-cycle draws.
    pub fn with_layout(mut cfg: SimConfig, layout: Layout) -> Result<Self, ConfigError> {
        cfg.n_agents = layout.agent_positions.len() as u32;
        cfg.n_packages = layout.packages.len() as u32;
        cfg.validate()?;
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Self::build(cfg, layout, rng)
    }

    fn build(cfg: SimConfig, layout: Layout, rng: ChaCha8Rng) -> Result<Self, ConfigError> {
        assert_eq!(layout.agent_positions.len(), layout.personalities.len());
        let grid = Grid {
            size: cfg.grid_size,
        };
        let n = layout.agent_positions.len();
        let bodies: Vec<AgentBody> = layout
            .agent_positions
            .iter()
            .zip(&layout.personalities)
            .enumerate()
            .map(|(i, (pos, pers))| {
                assert!(grid.contains(*pos), "agent position outside the grid");
                AgentBody::new(AgentId(i as u32), *pos, *pers)
            })
            .collect();
        let minds: Vec<Mind> = (0..n)
            .map(|_| Mind {
                beliefs: BeliefBase::default(),
                desire: Desire::Idle,
                pad: PadState::NEUTRAL,
                trust: TrustStore::new(cfg.initial_trust, cfg.base_threshold),
                prev_sources: SourceVector::default(),
            })
            .collect();

        let mut state = SimState {
            params: cfg.affect_params(),
            rng,
            grid,
            cycle: 0,
            bodies,
            minds,
            packages: Vec::new(),
            dests: Vec::new(),
            conversations: Vec::new(),
            open_by_package: BTreeMap::new(),
            chains: BTreeMap::new(),
            ledger: RewardLedger::new(n),
            counters: Counters::default(),
            log: EventLog::default(),
            prev_counts: vec![0; n],
            next_conversation: 0,
            cfg,
        };

        for (i, setup) in layout.packages.iter().enumerate() {
            assert!(
                state.grid.contains(setup.destination),
                "package destination outside the grid"
            );
            let id = PackageId(i as u32);
            let owner_pos = state.bodies[setup.owner.0 as usize].position;
            let deadline = (state.cfg.deadline_slack
                * chebyshev_distance(owner_pos, setup.destination) as f64)
                .ceil() as u64;
            let mut pkg = Package {
                id,
                owner: setup.owner,
                carrier: None,
                destination: setup.destination,
                assignment_cycle: 0,
                deadline_cycle: deadline,
                privacy_for: BTreeMap::new(),
                delivered_cycle: None,
            };
            world::assign_package(
                &mut pkg,
                &mut state.bodies[setup.owner.0 as usize],
                Some(setup.private_for_owner),
                state.cfg.privacy_prob,
                &mut state.rng,
            )
            .expect("fresh package");
            state.log.push(Event::Assign {
                cycle: 0,
                package: id,
                agent: setup.owner,
                deadline,
            });
            state.dests.push(setup.destination);
            state.packages.push(pkg);
        }
        for i in 0..n {
            state.prev_counts[i] = state.bodies[i].carried.len();
        }
        Ok(state)
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn all_delivered(&self) -> bool {
        self.packages.iter().all(Package::is_delivered)
    }

    pub fn pad(&self, agent: AgentId) -> PadState {
        self.minds[agent.0 as usize].pad
    }

    pub fn trust_value(&self, agent: AgentId, peer: AgentId) -> f64 {
        self.minds[agent.0 as usize].trust.get(peer)
    }

    pub fn ledger(&self) -> &RewardLedger {
        &self.ledger
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn package(&self, id: PackageId) -> &Package {
        &self.packages[id.0 as usize]
    }

    fn dest_of(&self, p: PackageId) -> Cell {
        self.dests[p.0 as usize]
    }

    /// The mood a trust decision sees: frozen to neutral when emotions
    /// are disabled.
    fn decision_mood(&self, agent: usize) -> MoodLabel {
        if self.cfg.scenario == Scenario::NoEmotions {
            MoodLabel::Neutral
        } else {
            affect::mood(&self.minds[agent].pad, &self.params).label
        }
    }

    pub fn step(&mut self) {
        let n = self.bodies.len();
        let mut fx: Vec<CycleFx> = vec![CycleFx::default(); n];

        self.phase_perception();
        self.phase_deliberation_and_movement();
        let pairs = self.phase_meetings();
        for (a, b) in pairs {
            self.meeting_pair(a.0 as usize, b.0 as usize, &mut fx);
        }
        self.phase_deliveries(&mut fx);
        self.phase_task_count_dominance(&mut fx);
        if self.cfg.scenario != Scenario::NoEmotions {
            self.phase_affect(&fx);
        }
        self.check_invariants();
        self.cycle += 1;
    }

    fn phase_perception(&mut self) {
        let busy: Vec<(AgentId, Cell)> = self
            .bodies
            .iter()
            .filter(|b| b.is_busy())
            .map(|b| (b.id, b.position))
            .collect();
        let mut assigned: Vec<Vec<PackageId>> = vec![Vec::new(); self.bodies.len()];
        for p in &self.packages {
            if let (Some(carrier), false) = (p.carrier, p.is_delivered()) {
                assigned[carrier.0 as usize].push(p.id);
            }
        }
        for (i, mind) in self.minds.iter_mut().enumerate() {
            let me = AgentId(i as u32);
            mind.beliefs.pending = assigned[i]
                .iter()
                .copied()
                .filter(|p| mind.beliefs.current != Some(*p) && !mind.beliefs.moving.contains(p))
                .collect();
            mind.beliefs.busy_carriers = busy
                .iter()
                .copied()
                .filter(|(id, _)| *id != me)
                .collect();
        }
    }

    fn phase_deliberation_and_movement(&mut self) {
        for i in 0..self.bodies.len() {
            match self.minds[i].desire {
                Desire::Idle => {
                    let action = agent::plan_idle(
                        &self.minds[i].beliefs,
                        self.bodies[i].position,
                        |p| self.dests[p.0 as usize],
                    );
                    match action {
                        IdleAction::Adopt { current, moving } => {
                            let mind = &mut self.minds[i];
                            mind.beliefs.pending.clear();
                            mind.beliefs.current = Some(current);
                            mind.beliefs.moving.extend(moving);
                            mind.desire = Desire::Moving;
                        }
                        IdleAction::Chase(target) => {
                            world::step_toward(&mut self.bodies[i], None, target, &self.grid);
                        }
                        IdleAction::Stay => {}
                    }
                }
                Desire::Moving => {
                    self.minds[i].beliefs.absorb_pending();
                    let current = self.minds[i]
                        .beliefs
                        .current
                        .expect("moving desire implies a current package");
                    let target = self.dest_of(current);
                    world::step_toward(&mut self.bodies[i], Some(current), target, &self.grid);
                }
            }
        }
    }

    fn phase_meetings(&mut self) -> Vec<(AgentId, AgentId)> {
        let groups = world::detect_meetings(&self.bodies);
        for (cell, agents) in &groups {
            self.log.push(Event::Meeting {
                cycle: self.cycle,
                cell: *cell,
                agents: agents.clone(),
            });
        }
        world::meeting_pairs(&groups)
    }

    fn carries_own_private_box(&self, agent: usize) -> bool {
        let id = AgentId(agent as u32);
        self.bodies[agent]
            .carried
            .iter()
            .any(|p| self.packages[p.0 as usize].private_for(id))
    }

    fn disclose(&mut self, agent: usize, kind: DisclosureKind, fx: &mut [CycleFx]) {
        let id = AgentId(agent as u32);
        let amount = -self.cfg.privacy_penalty;
        self.ledger.credit(id, amount);
        self.counters.disclosures += 1;
        self.log.push(Event::Disclosure {
            cycle: self.cycle,
            agent: id,
            kind,
        });
        self.log.push(Event::Reward {
            cycle: self.cycle,
            agent: id,
            amount,
            reason: RewardReason::PrivacyDisclosure,
        });
        fx[agent]
            .deltas
            .push((PadDimension::Pleasure, -EVENT_PLEASURE_DELTA));
        fx[agent].sources.own_privacy = true;
    }

    fn meeting_pair(&mut self, a: usize, b: usize, fx: &mut [CycleFx]) {
        // Privacy disclosures: a fresh cell draw per agent per meeting,
        // plus any carried box private for its own carrier.
        for (me, _) in [(a, b), (b, a)] {
            if self.rng.gen_bool(self.cfg.privacy_prob) {
                self.disclose(me, DisclosureKind::Cell, fx);
            }
            if self.carries_own_private_box(me) {
                self.disclose(me, DisclosureKind::Box, fx);
            }
        }
        // Observation of the other agent.
        for (me, other) in [(a, b), (b, a)] {
            if self.decision_mood(other) == MoodLabel::Angry {
                fx[me].sources.anger_perceived = true;
                fx[me]
                    .deltas
                    .push((PadDimension::Dominance, ANGER_DOMINANCE_DELTA));
            }
            if self.carries_own_private_box(other) {
                fx[me].sources.alien_privacy = true;
            }
        }
        if self.cfg.scenario == Scenario::NoTrust {
            return;
        }
        // At most one CFP per pair per cycle, lower id tries first.
        let (lo, hi) = (a.min(b), a.max(b));
        for (initiator, responder) in [(lo, hi), (hi, lo)] {
            if self.cfp_attempt(initiator, responder) {
                break;
            }
        }
    }

    /// Run the initiator's trust gate and, when it passes, a full CFP
    /// exchange. Returns true when a CFP actually ran (so the pair is
    /// spent for this cycle).
    fn cfp_attempt(&mut self, initiator: usize, responder: usize) -> bool {
        if self.minds[initiator].desire != Desire::Moving {
            return false;
        }
        let init_id = AgentId(initiator as u32);
        let resp_id = AgentId(responder as u32);
        // Candidate: farthest moving package, never the current one and
        // never straight back to the agent it came from.
        let eligible: Vec<PackageId> = self.minds[initiator]
            .beliefs
            .moving
            .iter()
            .copied()
            .filter(|p| {
                self.chains
                    .get(p)
                    .and_then(|c| c.direct_delegator_of(init_id))
                    != Some(resp_id)
            })
            .collect();
        let Some(candidate) = agent::farthest_package(eligible, self.bodies[initiator].position, |p| {
            self.dests[p.0 as usize]
        }) else {
            return false;
        };

        let mood = self.decision_mood(initiator);
        let ctx = TrustDecisionContext {
            mood_label: mood,
            own_privacy_involved: self.packages[candidate.0 as usize].private_for(init_id),
            load: self.bodies[initiator].carried.len() as u32,
        };
        let required = trust::required_trust_to_request(&ctx, self.cfg.base_threshold);
        let trust_in_peer = self.minds[initiator].trust.get(resp_id);
        let granted = trust::decide(trust_in_peer, required);
        self.log.push(Event::TrustDecision {
            cycle: self.cycle,
            kind: DecisionKind::Request,
            decider: init_id,
            peer: resp_id,
            package: candidate,
            mood,
            mood_modifier: trust::mood_modifier(mood),
            trust: trust_in_peer,
            required,
            granted,
        });
        if !granted {
            return false;
        }

        let conv_id = ConversationId(self.next_conversation);
        self.next_conversation += 1;
        let deadline = self.packages[candidate.0 as usize].deadline_cycle;
        let (mut conv, cfp) = CfpConversation::initiate(
            conv_id,
            init_id,
            resp_id,
            candidate,
            deadline,
            self.bodies[initiator].carried.contains(&candidate),
        )
        .expect("moving beliefs track carried packages");
        self.log_message(&cfp);
        self.counters.cfp_sent += 1;

        // The responder's privacy mark is decided now and, on
        // acceptance, becomes the fixed mark of the assignment.
        let resp_privacy = self.packages[candidate.0 as usize]
            .privacy_for
            .get(&resp_id)
            .copied()
            .unwrap_or_else(|| self.rng.gen_bool(self.cfg.privacy_prob));
        let resp_mood = self.decision_mood(responder);
        let ctx2 = TrustDecisionContext {
            mood_label: resp_mood,
            own_privacy_involved: resp_privacy,
            load: self.bodies[responder].carried.len() as u32,
        };
        let required2 = trust::required_trust_to_accept(&ctx2, self.cfg.base_threshold);
        let trust2 = self.minds[responder].trust.get(init_id);
        let accept = trust::decide(trust2, required2);
        self.log.push(Event::TrustDecision {
            cycle: self.cycle,
            kind: DecisionKind::Accept,
            decider: resp_id,
            peer: init_id,
            package: candidate,
            mood: resp_mood,
            mood_modifier: trust::mood_modifier(resp_mood),
            trust: trust2,
            required: required2,
            granted: accept,
        });
        let answer = conv.respond(accept).expect("fresh conversation");
        self.log_message(&answer);

        if accept {
            let confirm = conv.conclude().expect("proposed conversation");
            self.log_message(&confirm);
            self.counters.cfp_accepted += 1;

            self.bodies[initiator].carried.retain(|p| *p != candidate);
            self.bodies[initiator].start_delay_pending.remove(&candidate);
            self.minds[initiator].beliefs.moving.remove(&candidate);
            world::assign_package(
                &mut self.packages[candidate.0 as usize],
                &mut self.bodies[responder],
                Some(resp_privacy),
                self.cfg.privacy_prob,
                &mut self.rng,
            )
            .expect("undelivered candidate");
            let owner = self.packages[candidate.0 as usize].owner;
            self.chains
                .entry(candidate)
                .or_insert_with(|| DelegationChain::new(candidate, owner))
                .push(init_id, resp_id, self.cycle)
                .expect("hand-offs follow the carrier");
            self.open_by_package
                .entry(candidate)
                .or_default()
                .push(self.conversations.len());
            self.log.push(Event::Handoff {
                cycle: self.cycle,
                package: candidate,
                from: init_id,
                to: resp_id,
            });
        } else {
            self.counters.cfp_refused += 1;
        }
        self.conversations.push(conv);
        true
    }

    fn log_message(&mut self, msg: &crate::protocol::Message) {
        self.log.push(Event::Message {
            cycle: self.cycle,
            performative: msg.performative,
            sender: msg.sender,
            receiver: msg.receiver,
            conversation: msg.conversation,
            package: msg.package,
        });
    }

    fn phase_deliveries(&mut self, fx: &mut [CycleFx]) {
        let due: Vec<(usize, AgentId)> = self
            .packages
            .iter()
            .filter(|p| !p.is_delivered())
            .filter_map(|p| {
                let carrier = p.carrier?;
                (self.bodies[carrier.0 as usize].position == p.destination)
                    .then_some((p.id.0 as usize, carrier))
            })
            .collect();
        for (pkg_idx, carrier) in due {
            self.deliver(pkg_idx, carrier, fx);
        }
    }

    fn deliver(&mut self, pkg_idx: usize, carrier: AgentId, fx: &mut [CycleFx]) {
        let cycle = self.cycle;
        let pkg_id = PackageId(pkg_idx as u32);
        let (deadline, owner) = {
            let pkg = &mut self.packages[pkg_idx];
            pkg.delivered_cycle = Some(cycle);
            pkg.carrier = None;
            (pkg.deadline_cycle, pkg.owner)
        };
        let delay = cycle.saturating_sub(deadline);
        let on_time = delay == 0;

        // World and belief bookkeeping for the delivering agent.
        let ci = carrier.0 as usize;
        self.bodies[ci].carried.retain(|p| *p != pkg_id);
        self.bodies[ci].start_delay_pending.remove(&pkg_id);
        let position = self.bodies[ci].position;
        let dests = &self.dests;
        let mind = &mut self.minds[ci];
        if mind.beliefs.current == Some(pkg_id) {
            if mind
                .beliefs
                .promote_after_delivery(position, |p| dests[p.0 as usize])
                .is_none()
            {
                mind.desire = Desire::Idle;
            }
        } else {
            mind.beliefs.moving.remove(&pkg_id);
        }

        let members: Vec<AgentId> = self
            .chains
            .get(&pkg_id)
            .map(|c| c.members())
            .unwrap_or_else(|| vec![owner]);
        if on_time {
            self.counters.on_time += 1;
        } else {
            self.counters.late += 1;
        }
        self.log.push(Event::Delivery {
            cycle,
            package: pkg_id,
            carrier,
            delay,
            on_time,
            chain: members.clone(),
        });

        // Joint credit along the chain.
        let (amount, reason, pleasure) = if on_time {
            (
                self.cfg.ontime_reward,
                RewardReason::OnTimeDelivery,
                EVENT_PLEASURE_DELTA,
            )
        } else {
            (
                -self.cfg.delay_penalty,
                RewardReason::LateDelivery,
                -EVENT_PLEASURE_DELTA,
            )
        };
        for &m in &members {
            self.ledger.credit(m, amount);
            self.log.push(Event::Reward {
                cycle,
                agent: m,
                amount,
                reason,
            });
            fx[m.0 as usize]
                .deltas
                .push((PadDimension::Pleasure, pleasure));
        }

        // Trust feedback along each delegation link.
        if let Some(chain) = self.chains.get(&pkg_id) {
            let links: Vec<_> = chain.links().to_vec();
            for link in links {
                let value = self.minds[link.delegator.0 as usize]
                    .trust
                    .update_on_outcome(link.delegatee, delay as u32);
                self.log.push(Event::TrustUpdate {
                    cycle,
                    agent: link.delegator,
                    peer: link.delegatee,
                    value,
                });
            }
        }

        // Result notifications to every delegator in the chain.
        if let Some(conv_indices) = self.open_by_package.remove(&pkg_id) {
            for idx in conv_indices {
                let msg = self.conversations[idx]
                    .finish(delay)
                    .expect("accepted conversation");
                self.log_message(&msg);
            }
        }

        // Completion counts first, then the performance comparison.
        for &m in &members {
            self.ledger.complete(m);
        }
        for &m in &members {
            let mean = self
                .ledger
                .population_mean_reward_per_task()
                .expect("this agent just completed a task");
            let own =
                self.ledger.agent_reward(m) / self.ledger.agent_completed(m) as f64;
            let delta = if own > mean {
                PERFORMANCE_DOMINANCE_DELTA
            } else if own < mean {
                -PERFORMANCE_DOMINANCE_DELTA
            } else {
                0.0
            };
            if delta != 0.0 {
                fx[m.0 as usize].deltas.push((PadDimension::Dominance, delta));
            }
        }
    }

    fn phase_task_count_dominance(&mut self, fx: &mut [CycleFx]) {
        for i in 0..self.bodies.len() {
            let count = self.bodies[i].carried.len();
            if count != self.prev_counts[i] {
                fx[i]
                    .deltas
                    .push((PadDimension::Dominance, task_count_delta(count)));
                self.prev_counts[i] = count;
            }
        }
    }

    fn phase_affect(&mut self, fx: &[CycleFx]) {
        for (i, mind) in self.minds.iter_mut().enumerate() {
            let personality = self.bodies[i].personality;
            let mut pad = affect::apply_event_deltas(&mind.pad, &fx[i].deltas);
            pad = affect::update_arousal(&pad, &mind.prev_sources, &fx[i].sources, &self.params);
            pad = affect::decay_pleasure(&pad, personality, &self.params);
            pad = affect::decay_dominance(&pad, personality, &self.params);
            mind.pad = pad;
            mind.prev_sources = fx[i].sources;
        }
    }

    /// Cross-module consistency checks, run at every cycle boundary.
    fn check_invariants(&self) {
        for (i, mind) in self.minds.iter().enumerate() {
            assert!(
                mind.pad.in_bounds(),
                "agent {i}: PAD out of bounds: {:?}",
                mind.pad
            );
            for (peer, v) in mind.trust.values() {
                assert!(
                    (0.0..=1.0).contains(&v),
                    "agent {i}: trust in {peer} out of bounds: {v}"
                );
            }
            assert_eq!(
                mind.beliefs.current.is_some(),
                mind.desire == Desire::Moving,
                "agent {i}: current package must exist exactly while moving"
            );
            if let Some(current) = mind.beliefs.current {
                assert!(
                    !mind.beliefs.moving.contains(&current),
                    "agent {i}: current package also in moving set"
                );
            }
            assert!(
                self.grid.contains(self.bodies[i].position),
                "agent {i}: outside the grid"
            );
        }
        for p in &self.packages {
            match (p.carrier, p.delivered_cycle) {
                (Some(carrier), None) => {
                    assert!(
                        self.bodies[carrier.0 as usize].carried.contains(&p.id),
                        "package {}: carrier {carrier} does not list it",
                        p.id
                    );
                }
                (None, Some(_)) => {}
                (carrier, delivered) => panic!(
                    "package {}: inconsistent carrier/delivery state {carrier:?}/{delivered:?}",
                    p.id
                ),
            }
        }
        for body in &self.bodies {
            for p in &body.carried {
                assert_eq!(
                    self.packages[p.0 as usize].carrier,
                    Some(body.id),
                    "carried set of {} disagrees with package {p}",
                    body.id
                );
            }
        }
        for conv in &self.conversations {
            assert!(
                conv.state.is_terminal() || conv.state == CfpState::Accepted,
                "conversation {:?} parked in non-terminal state {:?}",
                conv.id,
                conv.state
            );
        }
    }

    pub fn run_to_completion(mut self) -> RunResult {
        while !self.all_delivered() && self.cycle < self.cfg.cycle_cap {
            self.step();
        }
        let terminated = self.all_delivered();
        let cycles = if terminated {
            self.packages
                .iter()
                .filter_map(|p| p.delivered_cycle)
                .max()
                .unwrap_or(0)
        } else {
            self.cycle
        };
        RunResult {
            total_reward: self.ledger.total(),
            cycles,
            on_time: self.counters.on_time,
            late: self.counters.late,
            disclosures: self.counters.disclosures,
            cfp_sent: self.counters.cfp_sent,
            cfp_accepted: self.counters.cfp_accepted,
            cfp_refused: self.counters.cfp_refused,
            terminated,
            log: self.log,
        }
    }
}

/// Run one full simulation for the given configuration.
pub fn run(cfg: SimConfig) -> Result<RunResult, ConfigError> {
    Ok(SimState::new(cfg)?.run_to_completion())
}
