//! BDI deliberation: belief bookkeeping, the idle/moving desires and
//! the package-selection rules of the two plans.
//!
//! "Closest" and "farthest" are measured from the agent's position to
//! the package destination in Chebyshev distance; ties go to the lower
//! package id.

use std::collections::{BTreeMap, BTreeSet};

use crate::world::{chebyshev_distance, AgentId, Cell, PackageId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Desire {
    Idle,
    Moving,
}

/// What the agent currently believes about its tasks and the carriers
/// around it. `current` is set exactly while the desire is `Moving`.
#[derive(Debug, Clone, Default)]
pub struct BeliefBase {
    pub pending: BTreeSet<PackageId>,
    pub busy_carriers: BTreeMap<AgentId, Cell>,
    pub current: Option<PackageId>,
    pub moving: BTreeSet<PackageId>,
}

/// Outcome of the idle plan for one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdleAction {
    /// Adopt the closest pending package as current, the rest as moving
    /// beliefs, and switch to the moving desire.
    Adopt {
        current: PackageId,
        moving: Vec<PackageId>,
    },
    /// No pending work: head for the closest busy carrier.
    Chase(Cell),
    /// Nothing to do and nobody to chase.
    Stay,
}

pub fn closest_package<I>(ids: I, position: Cell, dest_of: impl Fn(PackageId) -> Cell) -> Option<PackageId>
where
    I: IntoIterator<Item = PackageId>,
{
    ids.into_iter()
        .min_by_key(|&p| (chebyshev_distance(position, dest_of(p)), p))
}

pub fn farthest_package<I>(ids: I, position: Cell, dest_of: impl Fn(PackageId) -> Cell) -> Option<PackageId>
where
    I: IntoIterator<Item = PackageId>,
{
    ids.into_iter()
        .max_by(|&a, &b| {
            let da = chebyshev_distance(position, dest_of(a));
            let db = chebyshev_distance(position, dest_of(b));
            da.cmp(&db).then(b.cmp(&a))
        })
}

pub fn closest_busy_carrier(beliefs: &BeliefBase, position: Cell) -> Option<Cell> {
    beliefs
        .busy_carriers
        .iter()
        .min_by_key(|(id, cell)| (chebyshev_distance(position, **cell), **id))
        .map(|(_, cell)| *cell)
}

pub fn plan_idle(
    beliefs: &BeliefBase,
    position: Cell,
    dest_of: impl Fn(PackageId) -> Cell,
) -> IdleAction {
    if let Some(current) = closest_package(beliefs.pending.iter().copied(), position, &dest_of) {
        let moving = beliefs
            .pending
            .iter()
            .copied()
            .filter(|&p| p != current)
            .collect();
        IdleAction::Adopt { current, moving }
    } else if let Some(cell) = closest_busy_carrier(beliefs, position) {
        IdleAction::Chase(cell)
    } else {
        IdleAction::Stay
    }
}

impl BeliefBase {
    /// Moving plan prelude: newly perceived pending packages also become
    /// moving beliefs.
    pub fn absorb_pending(&mut self) {
        let pending = std::mem::take(&mut self.pending);
        self.moving.extend(pending);
    }

    /// After the current package lands: promote the closest moving
    /// package, or report that the agent should fall back to idle.
    pub fn promote_after_delivery(
        &mut self,
        position: Cell,
        dest_of: impl Fn(PackageId) -> Cell,
    ) -> Option<PackageId> {
        self.current = None;
        let next = closest_package(self.moving.iter().copied(), position, dest_of)?;
        self.moving.remove(&next);
        self.current = Some(next);
        Some(next)
    }
}
