//! Channels and data values.

use std::fmt;

/// First placeholder id. Ids at or above this value never denote real
/// channels; reification uses them as de-Bruijn-style binder slots.
const PLACEHOLDER_BASE: u32 = 1 << 30;

/// Opaque channel identity.
///
/// Ids below the universe's pool size are public pool channels, ids at or
/// above it (but below the placeholder range) are fresh channels minted
/// during exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId(pub u32);

impl ChannelId {
    pub fn placeholder(level: usize) -> Self {
        ChannelId(PLACEHOLDER_BASE + level as u32)
    }

    /// Binder level when this id is a reification placeholder.
    pub fn placeholder_level(self) -> Option<usize> {
        (self.0 >= PLACEHOLDER_BASE).then(|| (self.0 - PLACEHOLDER_BASE) as usize)
    }

    pub fn is_placeholder(self) -> bool {
        self.0 >= PLACEHOLDER_BASE
    }

    /// Applies the transposition `(a b)`.
    pub fn swap(self, a: ChannelId, b: ChannelId) -> ChannelId {
        if self == a {
            b
        } else if self == b {
            a
        } else {
            self
        }
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.placeholder_level() {
            Some(level) => write!(f, "b{level}"),
            None => write!(f, "c{}", self.0),
        }
    }
}

/// Closed data values. The derived order is the canonical value order:
/// `Unit < Bool(false) < Bool(true) < Nat < Chan < Pair`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Nat(u64),
    Chan(ChannelId),
    Pair(Box<Value>, Box<Value>),
}

impl Value {
    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn as_chan(&self) -> Option<ChannelId> {
        match self {
            Value::Chan(c) => Some(*c),
            _ => None,
        }
    }

    pub fn contains_chan(&self) -> bool {
        match self {
            Value::Chan(_) => true,
            Value::Pair(a, b) => a.contains_chan() || b.contains_chan(),
            _ => false,
        }
    }

    pub fn mentions(&self, c: ChannelId) -> bool {
        match self {
            Value::Chan(d) => *d == c,
            Value::Pair(a, b) => a.mentions(c) || b.mentions(c),
            _ => false,
        }
    }

    pub fn channels(&self, out: &mut impl Extend<ChannelId>) {
        match self {
            Value::Chan(c) => out.extend(Some(*c)),
            Value::Pair(a, b) => {
                a.channels(out);
                b.channels(out);
            }
            _ => {}
        }
    }

    pub fn swap(&self, a: ChannelId, b: ChannelId) -> Value {
        match self {
            Value::Chan(c) => Value::Chan(c.swap(a, b)),
            Value::Pair(x, y) => Value::pair(x.swap(a, b), y.swap(a, b)),
            v => v.clone(),
        }
    }

    /// Replaces every occurrence of `from` by `to` (not a transposition).
    pub fn replace(&self, from: ChannelId, to: ChannelId) -> Value {
        match self {
            Value::Chan(c) if *c == from => Value::Chan(to),
            Value::Pair(x, y) => Value::pair(x.replace(from, to), y.replace(from, to)),
            v => v.clone(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "()"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Chan(c) => write!(f, "{c}"),
            Value::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

impl From<ChannelId> for Value {
    fn from(c: ChannelId) -> Self {
        Value::Chan(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_order_matches_documented_total_order() {
        let mut vals = vec![
            Value::pair(Value::Unit, Value::Unit),
            Value::Chan(ChannelId(1)),
            Value::Nat(3),
            Value::Bool(true),
            Value::Chan(ChannelId(0)),
            Value::Nat(0),
            Value::Bool(false),
            Value::Unit,
        ];
        vals.sort();
        assert_eq!(
            vals,
            vec![
                Value::Unit,
                Value::Bool(false),
                Value::Bool(true),
                Value::Nat(0),
                Value::Nat(3),
                Value::Chan(ChannelId(0)),
                Value::Chan(ChannelId(1)),
                Value::pair(Value::Unit, Value::Unit),
            ]
        );
    }

    #[test]
    fn pairs_compare_lexicographically() {
        let a = Value::pair(Value::Nat(1), Value::Nat(9));
        let b = Value::pair(Value::Nat(2), Value::Nat(0));
        assert!(a < b);
    }

    #[test]
    fn placeholders_are_disjoint_from_small_ids() {
        assert_eq!(ChannelId::placeholder(3).placeholder_level(), Some(3));
        assert_eq!(ChannelId(7).placeholder_level(), None);
        assert_eq!(ChannelId::placeholder(0).to_string(), "b0");
    }
}
