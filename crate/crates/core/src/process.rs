//! Higher-order process terms.
//!
//! Binders are host closures: a receive carries a function from the received
//! value to the remainder, a channel creation a function from the new channel
//! to the remainder. Terms may be infinite (see [`replicate`]); they are only
//! ever inspected one constructor at a time through [`Process::view`].

use std::fmt;
use std::rc::Rc;

use crate::value::{ChannelId, Value};

pub type ValueCont = Rc<dyn Fn(Value) -> Process>;
pub type ChannelCont = Rc<dyn Fn(ChannelId) -> Process>;

#[derive(Clone)]
pub struct Process(Rc<Repr>);

enum Repr {
    Node(Node),
    Replicate(Process),
}

/// One layer of a process.
#[derive(Clone)]
pub enum Node {
    Stop,
    Send(ChannelId, Value),
    Receive(ChannelId, ValueCont),
    Parallel(Process, Process),
    NewChannel(ChannelCont),
}

impl Process {
    fn node(node: Node) -> Self {
        Process(Rc::new(Repr::Node(node)))
    }

    pub fn stop() -> Self {
        Process::node(Node::Stop)
    }

    pub fn send(chan: ChannelId, val: impl Into<Value>) -> Self {
        Process::node(Node::Send(chan, val.into()))
    }

    pub fn receive(chan: ChannelId, cont: impl Fn(Value) -> Process + 'static) -> Self {
        Process::node(Node::Receive(chan, Rc::new(cont)))
    }

    pub fn parallel(p: Process, q: Process) -> Self {
        Process::node(Node::Parallel(p, q))
    }

    pub fn new_channel(cont: impl Fn(ChannelId) -> Process + 'static) -> Self {
        Process::node(Node::NewChannel(Rc::new(cont)))
    }

    /// The outermost constructor. Replication unrolls once on demand.
    pub fn view(&self) -> Node {
        match &*self.0 {
            Repr::Node(n) => n.clone(),
            Repr::Replicate(p) => Node::Parallel(p.clone(), self.clone()),
        }
    }

    /// Applies the channel transposition `(a b)` to the whole term.
    ///
    /// Continuations are wrapped rather than evaluated, so this is cheap and
    /// works on infinite terms. For a continuation `f` the result is
    /// `x ↦ (a b)·f((a b)·x)`.
    pub fn swap(&self, a: ChannelId, b: ChannelId) -> Process {
        if a == b {
            return self.clone();
        }
        match &*self.0 {
            Repr::Replicate(p) => replicate(p.swap(a, b)),
            Repr::Node(node) => match node {
                Node::Stop => self.clone(),
                Node::Send(c, v) => Process::send(c.swap(a, b), v.swap(a, b)),
                Node::Receive(c, f) => {
                    let f = f.clone();
                    Process::receive(c.swap(a, b), move |v| f(v.swap(a, b)).swap(a, b))
                }
                Node::Parallel(p, q) => Process::parallel(p.swap(a, b), q.swap(a, b)),
                Node::NewChannel(f) => {
                    let f = f.clone();
                    Process::new_channel(move |x| f(x.swap(a, b)).swap(a, b))
                }
            },
        }
    }
}

/// `p∞`: the infinite term satisfying `p∞ = p ∥ p∞`.
pub fn replicate(p: Process) -> Process {
    Process(Rc::new(Repr::Replicate(p)))
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Repr::Replicate(p) => write!(f, "!({p:?})"),
            Repr::Node(Node::Stop) => write!(f, "0"),
            Repr::Node(Node::Send(c, v)) => write!(f, "{c}<{v}>"),
            Repr::Node(Node::Receive(c, _)) => write!(f, "{c}(..)"),
            Repr::Node(Node::Parallel(p, q)) => write!(f, "({p:?} | {q:?})"),
            Repr::Node(Node::NewChannel(_)) => write!(f, "new .."),
        }
    }
}
