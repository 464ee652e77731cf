//! Exploration context: the universe plus the fresh-id counter of one path.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::universe::Universe;
use crate::value::{ChannelId, Value};

/// Fresh ids are `pool + minted`; a context must not be shared between
/// concurrent activities.
#[derive(Clone, Copy, Debug)]
pub struct Context<'u> {
    universe: &'u Universe,
    minted: usize,
}

impl<'u> Context<'u> {
    pub fn new(universe: &'u Universe, minted: usize) -> Self {
        Context { universe, minted }
    }

    pub fn universe(&self) -> &'u Universe {
        self.universe
    }

    pub fn minted(&self) -> usize {
        self.minted
    }

    pub fn minted_set(&self) -> BTreeSet<ChannelId> {
        self.universe.minted(self.minted)
    }

    /// The next fresh channel, or `BudgetExceeded`.
    pub fn fresh(&self) -> Result<ChannelId> {
        if self.minted >= self.universe.fresh_budget() {
            return Err(Error::BudgetExceeded { budget: self.universe.fresh_budget() });
        }
        Ok(self.universe.fresh(self.minted))
    }

    /// Context after minting one more channel.
    pub fn child(&self) -> Context<'u> {
        Context { universe: self.universe, minted: self.minted + 1 }
    }

    pub fn enumeration(&self) -> Vec<Value> {
        self.universe.enumeration(&self.minted_set())
    }
}
