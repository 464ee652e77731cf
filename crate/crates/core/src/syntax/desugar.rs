use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::process::{replicate, Process};
use crate::value::{ChannelId, Value};

use super::ast::{SourceKind, SourceTerm, ValueExpr};

/// Binder values, innermost last.
#[derive(Clone, Default)]
struct Scope(Option<Rc<(String, Value, Scope)>>);

impl Scope {
    fn bind(&self, name: &str, v: Value) -> Scope {
        Scope(Some(Rc::new((name.to_string(), v, self.clone()))))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = self;
        while let Some(node) = &cur.0 {
            if node.0 == name {
                return Some(&node.1);
            }
            cur = &node.2;
        }
        None
    }
}

type Env = Rc<BTreeMap<String, ChannelId>>;

/// Turns a parsed term into a higher-order process. Every free identifier
/// must be a key of `env`.
pub fn desugar(ast: &SourceTerm, env: &BTreeMap<String, ChannelId>) -> Result<Process> {
    check_scopes(ast, env, &mut Vec::new())?;
    Ok(build(&Rc::new(ast.clone()), &Rc::new(env.clone()), &Scope::default()))
}

/// Identifiers not bound by an enclosing binder, in name order.
pub fn free_names(ast: &SourceTerm) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(ast, &mut Vec::new(), &mut out);
    out
}

/// Assigns pool ids to the free names of `terms` in name order.
pub fn default_env<'a>(terms: impl IntoIterator<Item = &'a SourceTerm>) -> BTreeMap<String, ChannelId> {
    let names: BTreeSet<String> = terms.into_iter().flat_map(free_names).collect();
    names.into_iter().enumerate().map(|(i, n)| (n, ChannelId(i as u32))).collect()
}

fn collect_free(t: &SourceTerm, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    fn value(v: &ValueExpr, bound: &[String], out: &mut BTreeSet<String>) {
        match v {
            ValueExpr::Ident(n, _) if !bound.contains(n) => {
                out.insert(n.clone());
            }
            ValueExpr::Pair(a, b) => {
                value(a, bound, out);
                value(b, bound, out);
            }
            _ => {}
        }
    }
    match &t.kind {
        SourceKind::Stop => {}
        SourceKind::Send { chan, val } => {
            value(chan, bound, out);
            value(val, bound, out);
        }
        SourceKind::Receive { chan, binder, body } => {
            value(chan, bound, out);
            bound.push(binder.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        SourceKind::New { binder, body } => {
            bound.push(binder.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        SourceKind::Par(l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        SourceKind::Repl(b) => collect_free(b, bound, out),
        SourceKind::If { lhs, rhs, then, otherwise } => {
            value(lhs, bound, out);
            value(rhs, bound, out);
            collect_free(then, bound, out);
            collect_free(otherwise, bound, out);
        }
    }
}

fn check_scopes(t: &SourceTerm, env: &BTreeMap<String, ChannelId>, bound: &mut Vec<String>) -> Result<()> {
    let mut free = BTreeSet::new();
    collect_free(t, bound, &mut free);
    if let Some(name) = free.into_iter().find(|n| !env.contains_key(n)) {
        let pos = first_use(t, &name).unwrap_or(t.pos);
        return Err(Error::UnboundIdentifier { name, line: pos.line, column: pos.column });
    }
    Ok(())
}

fn first_use(t: &SourceTerm, name: &str) -> Option<super::ast::Pos> {
    fn in_value(v: &ValueExpr, name: &str) -> Option<super::ast::Pos> {
        match v {
            ValueExpr::Ident(n, p) if n == name => Some(*p),
            ValueExpr::Pair(a, b) => in_value(a, name).or_else(|| in_value(b, name)),
            _ => None,
        }
    }
    match &t.kind {
        SourceKind::Stop => None,
        SourceKind::Send { chan, val } => in_value(chan, name).or_else(|| in_value(val, name)),
        SourceKind::Receive { chan, binder, body } => {
            in_value(chan, name).or_else(|| if binder == name { None } else { first_use(body, name) })
        }
        SourceKind::New { binder, body } => (binder != name).then(|| first_use(body, name)).flatten(),
        SourceKind::Par(l, r) => first_use(l, name).or_else(|| first_use(r, name)),
        SourceKind::Repl(b) => first_use(b, name),
        SourceKind::If { lhs, rhs, then, otherwise } => in_value(lhs, name)
            .or_else(|| in_value(rhs, name))
            .or_else(|| first_use(then, name))
            .or_else(|| first_use(otherwise, name)),
    }
}

fn eval(v: &ValueExpr, env: &Env, scope: &Scope) -> Value {
    match v {
        ValueExpr::Unit => Value::Unit,
        ValueExpr::Bool(b) => Value::Bool(*b),
        ValueExpr::Nat(n) => Value::Nat(*n),
        ValueExpr::Ident(name, _) => scope
            .lookup(name)
            .cloned()
            .or_else(|| env.get(name).map(|c| Value::Chan(*c)))
            .expect("identifiers are resolved before building"),
        ValueExpr::Pair(a, b) => Value::pair(eval(a, env, scope), eval(b, env, scope)),
    }
}

/// A channel position holding a non-channel value makes the prefix inert.
fn build(t: &Rc<SourceTerm>, env: &Env, scope: &Scope) -> Process {
    match &t.kind {
        SourceKind::Stop => Process::stop(),
        SourceKind::Send { chan, val } => match eval(chan, env, scope).as_chan() {
            Some(c) => Process::send(c, eval(val, env, scope)),
            None => Process::stop(),
        },
        SourceKind::Receive { chan, binder, body } => match eval(chan, env, scope).as_chan() {
            Some(c) => {
                let (body, env, scope, binder) = (body.clone(), env.clone(), scope.clone(), binder.clone());
                Process::receive(c, move |v| build(&body, &env, &scope.bind(&binder, v)))
            }
            None => Process::stop(),
        },
        SourceKind::New { binder, body } => {
            let (body, env, scope, binder) = (body.clone(), env.clone(), scope.clone(), binder.clone());
            Process::new_channel(move |c| build(&body, &env, &scope.bind(&binder, Value::Chan(c))))
        }
        SourceKind::Par(l, r) => Process::parallel(build(l, env, scope), build(r, env, scope)),
        SourceKind::Repl(b) => replicate(build(b, env, scope)),
        SourceKind::If { lhs, rhs, then, otherwise } => {
            if eval(lhs, env, scope) == eval(rhs, env, scope) {
                build(then, env, scope)
            } else {
                build(otherwise, env, scope)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::canonical::{reify, CanonicalTerm};
    use crate::syntax::parse;
    use crate::universe::Universe;

    fn env(names: &[&str]) -> BTreeMap<String, ChannelId> {
        names.iter().enumerate().map(|(i, n)| (n.to_string(), ChannelId(i as u32))).collect()
    }

    #[test]
    fn unbound_identifier_is_reported_with_position() {
        let ast = parse("a<()> | b<()>").unwrap();
        let err = desugar(&ast, &env(&["a"])).unwrap_err();
        assert_eq!(err, Error::UnboundIdentifier { name: "b".into(), line: 1, column: 9 });
    }

    #[test]
    fn replicated_send() {
        let u = Universe::default();
        let none = BTreeSet::new();
        let p = desugar(&parse("!a<()>").unwrap(), &env(&["a"])).unwrap();
        let direct = replicate(Process::send(ChannelId(0), Value::Unit));
        assert_eq!(reify(&p, &u, &none, 5).unwrap(), reify(&direct, &u, &none, 5).unwrap());
    }

    #[test]
    fn conditional_forward_branches_per_value() {
        let u = Universe::new([Value::Unit], 2, 2, 5).unwrap();
        let none = BTreeSet::new();
        // forwards everything except x
        let p = desugar(&parse("a(y). if y = x then 0 else b<y>").unwrap(), &env(&["a", "b", "x"])).unwrap();
        let t = reify(&p, &u, &none, 3).unwrap();
        let CanonicalTerm::ReceiveTable(_, table) = t else { panic!() };
        for (v, entry) in table {
            let expected = if v == Value::Chan(ChannelId(2)) {
                CanonicalTerm::Stop
            } else {
                CanonicalTerm::Send(ChannelId(1), v.clone())
            };
            assert_eq!(entry, expected, "entry for {v}");
        }
    }

    #[test]
    fn shadowing_is_innermost_wins() {
        let u = Universe::new([Value::Unit], 2, 2, 6).unwrap();
        let none = BTreeSet::new();
        let p = desugar(&parse("new b. new b. a<b>").unwrap(), &env(&["a"])).unwrap();
        let t = reify(&p, &u, &none, 4).unwrap();
        let inner = CanonicalTerm::Send(ChannelId(0), Value::Chan(ChannelId::placeholder(1)));
        assert_eq!(t, CanonicalTerm::new_scope(CanonicalTerm::new_scope(inner)));
    }

    #[test]
    fn parsed_new_matches_direct_construction() {
        let u = Universe::default();
        let none = BTreeSet::new();
        let p = desugar(&parse("new b. a<b>").unwrap(), &env(&["a"])).unwrap();
        let direct = Process::new_channel(|b| Process::send(ChannelId(0), Value::Chan(b)));
        assert_eq!(reify(&p, &u, &none, 6).unwrap(), reify(&direct, &u, &none, 6).unwrap());
    }

    #[test]
    fn default_env_orders_names() {
        let ast = parse("z<()> | a(x). x<m>").unwrap();
        assert_eq!(default_env([&ast]), env(&["a", "m", "z"]));
    }
}
