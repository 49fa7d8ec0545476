//! Grid, agent bodies, packages, movement and meeting detection.
//!
//! Movement is Moore-neighborhood, one cell per cycle, measured with
//! the Chebyshev metric. Personality-induced start delays are held per
//! package and consumed on the first movement attempt serving it.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affect::Personality;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct AgentId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct PackageId(pub u32);

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub size: u32,
}

impl Grid {
    pub fn contains(&self, c: Cell) -> bool {
        c.x >= 0 && c.y >= 0 && (c.x as u32) < self.size && (c.y as u32) < self.size
    }
}

pub fn chebyshev_distance(a: Cell, b: Cell) -> u32 {
    (a.x - b.x).unsigned_abs().max((a.y - b.y).unsigned_abs())
}

/// A transportable task. `privacy_for` marks are sampled once per agent
/// at assignment time and never resampled.
#[derive(Debug, Clone)]
pub struct Package {
    pub id: PackageId,
    pub owner: AgentId,
    pub carrier: Option<AgentId>,
    pub destination: Cell,
    pub assignment_cycle: u64,
    pub deadline_cycle: u64,
    pub privacy_for: BTreeMap<AgentId, bool>,
    pub delivered_cycle: Option<u64>,
}

impl Package {
    pub fn is_delivered(&self) -> bool {
        self.delivered_cycle.is_some()
    }

    pub fn private_for(&self, agent: AgentId) -> bool {
        self.privacy_for.get(&agent).copied().unwrap_or(false)
    }
}

#[derive(Debug, Clone)]
pub struct AgentBody {
    pub id: AgentId,
    pub position: Cell,
    pub personality: Personality,
    /// Carried package ids in pickup order.
    pub carried: Vec<PackageId>,
    /// Remaining hold cycles per package, consumed when serving it.
    pub start_delay_pending: BTreeMap<PackageId, u32>,
}

impl AgentBody {
    pub fn new(id: AgentId, position: Cell, personality: Personality) -> Self {
        AgentBody {
            id,
            position,
            personality,
            carried: Vec::new(),
            start_delay_pending: BTreeMap::new(),
        }
    }

    pub fn is_busy(&self) -> bool {
        !self.carried.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorldError {
    #[error("package {0} is already delivered")]
    AlreadyDelivered(PackageId),
}

/// One Moore step toward `target`. If a start delay is pending for the
/// package being served, the agent stays put and the hold is consumed.
pub fn step_toward(body: &mut AgentBody, serving: Option<PackageId>, target: Cell, grid: &Grid) {
    if body.position == target {
        return;
    }
    if let Some(pkg) = serving {
        if let Some(hold) = body.start_delay_pending.get_mut(&pkg) {
            *hold -= 1;
            if *hold == 0 {
                body.start_delay_pending.remove(&pkg);
            }
            return;
        }
    }
    let step = |from: i32, to: i32| from + (to - from).signum();
    let next = Cell {
        x: step(body.position.x, target.x),
        y: step(body.position.y, target.y),
    };
    debug_assert!(grid.contains(next));
    body.position = next;
}

/// Hand a package to `body` (initial assignment or delegation). The
/// privacy mark for the new carrier is fixed here; `presampled` carries
/// a draw made earlier in the same exchange, if any. Registers the
/// 1-cycle personality hold: neurotics on every pickup, psychotics on
/// delegated pickups.
pub fn assign_package<R: Rng>(
    pkg: &mut Package,
    body: &mut AgentBody,
    presampled_privacy: Option<bool>,
    privacy_prob: f64,
    rng: &mut R,
) -> Result<(), WorldError> {
    if pkg.is_delivered() {
        return Err(WorldError::AlreadyDelivered(pkg.id));
    }
    pkg.carrier = Some(body.id);
    pkg.privacy_for
        .entry(body.id)
        .or_insert_with(|| presampled_privacy.unwrap_or_else(|| rng.gen_bool(privacy_prob)));
    if !body.carried.contains(&pkg.id) {
        body.carried.push(pkg.id);
    }
    let delegated = body.id != pkg.owner;
    if body.personality == Personality::Neurotic
        || (delegated && body.personality == Personality::Psychotic)
    {
        body.start_delay_pending.insert(pkg.id, 1);
    }
    Ok(())
}

/// Groups of two or more agents sharing a cell this cycle, ordered by
/// cell, with ascending agent ids inside each group.
pub fn detect_meetings(bodies: &[AgentBody]) -> Vec<(Cell, Vec<AgentId>)> {
    let mut by_cell: BTreeMap<Cell, Vec<AgentId>> = BTreeMap::new();
    for b in bodies {
        by_cell.entry(b.position).or_default().push(b.id);
    }
    by_cell
        .into_iter()
        .filter(|(_, ids)| ids.len() >= 2)
        .map(|(cell, mut ids)| {
            ids.sort();
            (cell, ids)
        })
        .collect()
}

/// Every unordered pair within each meeting group.
pub fn meeting_pairs(groups: &[(Cell, Vec<AgentId>)]) -> Vec<(AgentId, AgentId)> {
    let mut pairs = Vec::new();
    for (_, ids) in groups {
        for i in 0..ids.len() {
            for j in (i + 1)..ids.len() {
                pairs.push((ids[i], ids[j]));
            }
        }
    }
    pairs
}
