//! The finite value domain that makes receive enumeration decidable.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::value::{ChannelId, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    data_values: BTreeSet<Value>,
    pool: u32,
    fresh_budget: usize,
    depth_budget: usize,
}

impl Universe {
    pub fn new(
        data_values: impl IntoIterator<Item = Value>,
        pool: u32,
        fresh_budget: usize,
        depth_budget: usize,
    ) -> Result<Self> {
        let data_values: BTreeSet<Value> = data_values.into_iter().collect();
        if let Some(v) = data_values.iter().find(|v| v.contains_chan()) {
            return Err(Error::InvalidUniverse(format!("data value {v} contains a channel")));
        }
        if pool == 0 {
            return Err(Error::InvalidUniverse("pool must contain at least one channel".into()));
        }
        if depth_budget == 0 {
            return Err(Error::InvalidUniverse("depth budget must be at least 1".into()));
        }
        Ok(Universe { data_values, pool, fresh_budget, depth_budget })
    }

    pub fn data_values(&self) -> &BTreeSet<Value> {
        &self.data_values
    }

    pub fn pool(&self) -> u32 {
        self.pool
    }

    pub fn fresh_budget(&self) -> usize {
        self.fresh_budget
    }

    pub fn depth_budget(&self) -> usize {
        self.depth_budget
    }

    pub fn pool_channels(&self) -> impl Iterator<Item = ChannelId> {
        (0..self.pool).map(ChannelId)
    }

    /// The `index`-th fresh channel.
    pub fn fresh(&self, index: usize) -> ChannelId {
        ChannelId(self.pool + index as u32)
    }

    /// The first `count` fresh channels.
    pub fn minted(&self, count: usize) -> BTreeSet<ChannelId> {
        (0..count).map(|i| self.fresh(i)).collect()
    }

    pub fn is_fresh(&self, c: ChannelId) -> bool {
        c.0 >= self.pool && !c.is_placeholder()
    }

    /// Values a receive is instantiated with: data values, pool channels and
    /// the given minted channels, in canonical order.
    pub fn enumeration(&self, minted: &BTreeSet<ChannelId>) -> Vec<Value> {
        let mut out: BTreeSet<Value> = self.data_values.clone();
        out.extend(self.pool_channels().map(Value::Chan));
        out.extend(minted.iter().copied().map(Value::Chan));
        out.into_iter().collect()
    }
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new([Value::Unit], 2, 3, 6).expect("default universe is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_channel_data() {
        let err = Universe::new([Value::Chan(ChannelId(0))], 1, 1, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidUniverse(_)));
        let err = Universe::new([Value::pair(Value::Unit, Value::Chan(ChannelId(0)))], 1, 1, 1);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_empty_pool_and_zero_depth() {
        assert!(Universe::new([], 0, 1, 1).is_err());
        assert!(Universe::new([], 1, 1, 0).is_err());
    }

    #[test]
    fn enumeration_is_ordered() {
        let u = Universe::new([Value::Nat(2), Value::Unit], 2, 3, 4).unwrap();
        let e = u.enumeration(&u.minted(1));
        assert_eq!(
            e,
            vec![
                Value::Unit,
                Value::Nat(2),
                Value::Chan(ChannelId(0)),
                Value::Chan(ChannelId(1)),
                Value::Chan(ChannelId(2)),
            ]
        );
    }
}
