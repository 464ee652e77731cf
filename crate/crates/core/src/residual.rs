//! The common shape of residual types.
//!
//! A residual packages a label with a single target. Both transition systems
//! implement [`ResidualFamily`], which is what the generic layers (weak
//! saturation, bisimulation, the axiom checkers) are written against.

use std::fmt::{Debug, Display};

pub trait Element: Clone + Ord + Debug + Display + 'static {}

impl<T: Clone + Ord + Debug + Display + 'static> Element for T {}

pub trait ResidualFamily {
    /// Everything except the target, binders instantiated.
    type Shape: Element;
    type Of<T: Element>: Element;

    fn shape<T: Element>(r: &Self::Of<T>) -> Self::Shape;
    fn target<T: Element>(r: &Self::Of<T>) -> &T;
    fn from_parts<T: Element>(shape: Self::Shape, target: T) -> Self::Of<T>;

    fn map<T: Element, U: Element>(r: &Self::Of<T>, f: impl FnOnce(&T) -> U) -> Self::Of<U> {
        Self::from_parts(Self::shape(r), f(Self::target(r)))
    }

    /// The residual extending `t` with the silent label.
    fn silent<T: Element>(t: T) -> Self::Of<T>;

    /// Converse of [`ResidualFamily::silent`].
    fn unsilent<T: Element>(r: &Self::Of<T>) -> Option<&T>;

    /// The family's lifting operation, as a predicate.
    fn lift<A: Element, B: Element>(x: &dyn Fn(&A, &B) -> bool, c: &Self::Of<A>, d: &Self::Of<B>) -> bool;

    /// Removes one silent layer from a nested residual.
    fn fuse<T: Element>(n: &Self::Of<Self::Of<T>>) -> Vec<Self::Of<T>>;
}

/// `silent⁻¹ ⊔ lift silent⁻¹`, evaluated on a single nested residual.
pub fn derived_fuse<F: ResidualFamily, T: Element>(n: &F::Of<F::Of<T>>) -> Vec<F::Of<T>> {
    let mut out = Vec::new();
    if let Some(inner) = F::unsilent(n) {
        out.push(inner.clone());
    }
    if let Some(t) = F::unsilent(F::target(n)) {
        out.push(F::from_parts(F::shape(n), t.clone()));
    }
    out.sort();
    out.dedup();
    out
}
