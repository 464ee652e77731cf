use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueExpr {
    Unit,
    Bool(bool),
    Nat(u64),
    Ident(String, Pos),
    Pair(Box<ValueExpr>, Box<ValueExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceTerm {
    pub kind: SourceKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Stop,
    Send { chan: ValueExpr, val: ValueExpr },
    Receive { chan: ValueExpr, binder: String, body: Rc<SourceTerm> },
    Par(Rc<SourceTerm>, Rc<SourceTerm>),
    New { binder: String, body: Rc<SourceTerm> },
    Repl(Rc<SourceTerm>),
    If { lhs: ValueExpr, rhs: ValueExpr, then: Rc<SourceTerm>, otherwise: Rc<SourceTerm> },
}

impl SourceTerm {
    /// Structural equality ignoring positions.
    pub fn same_shape(&self, other: &SourceTerm) -> bool {
        use SourceKind::*;
        match (&self.kind, &other.kind) {
            (Stop, Stop) => true,
            (Send { chan: c1, val: v1 }, Send { chan: c2, val: v2 }) => c1.same_shape(c2) && v1.same_shape(v2),
            (Receive { chan: c1, binder: x1, body: b1 }, Receive { chan: c2, binder: x2, body: b2 }) => {
                c1.same_shape(c2) && x1 == x2 && b1.same_shape(b2)
            }
            (Par(l1, r1), Par(l2, r2)) => l1.same_shape(l2) && r1.same_shape(r2),
            (New { binder: x1, body: b1 }, New { binder: x2, body: b2 }) => x1 == x2 && b1.same_shape(b2),
            (Repl(b1), Repl(b2)) => b1.same_shape(b2),
            (If { lhs: l1, rhs: r1, then: t1, otherwise: e1 }, If { lhs: l2, rhs: r2, then: t2, otherwise: e2 }) => {
                l1.same_shape(l2) && r1.same_shape(r2) && t1.same_shape(t2) && e1.same_shape(e2)
            }
            _ => false,
        }
    }
}

impl ValueExpr {
    pub fn same_shape(&self, other: &ValueExpr) -> bool {
        match (self, other) {
            (ValueExpr::Ident(a, _), ValueExpr::Ident(b, _)) => a == b,
            (ValueExpr::Pair(a1, b1), ValueExpr::Pair(a2, b2)) => a1.same_shape(a2) && b1.same_shape(b2),
            (a, b) => a == b,
        }
    }
}
