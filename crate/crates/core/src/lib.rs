//! Executable semantics for a higher-order-abstract-syntax process calculus.
//!
//! Processes are built from Rust closures ([`Process`]) and observed through
//! a finite [`Universe`] of data values and channel ids. Two transition
//! systems are provided, a basic one ([`basic_transitions`]) with separate
//! scope-opening steps and a proper one ([`proper_transitions`]) that
//! bundles openings with outputs.

pub mod algebra;
pub mod basic;
pub mod bisim;
pub mod canonical;
pub mod context;
pub mod error;
pub mod lts;
pub mod process;
pub mod proper;
pub mod residual;
pub mod syntax;
pub mod universe;
pub mod value;

pub use basic::{basic_transitions, Basic, BasicAction, BasicResidual, Rule, Step, StepSet};
pub use bisim::{bisimilarity, is_simulation, Game, Method, Mode, Moves, Play, Verdict};
pub use canonical::{alpha_equal, free_channels, reify, CanonicalTerm};
pub use context::Context;
pub use error::{Error, Result};
pub use lts::{explore, weak_saturate, Limits, LtsGraph, State, StateId, System};
pub use process::{replicate, Node, Process};
pub use proper::{proper_transitions, OutputRest, Proper, ProperAction, ProperResidual};
pub use residual::{Element, ResidualFamily};
pub use universe::Universe;
pub use value::{ChannelId, Value};
