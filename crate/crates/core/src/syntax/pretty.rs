use std::collections::BTreeMap;

use crate::canonical::CanonicalTerm;
use crate::value::{ChannelId, Value};

/// Receive variables are encoded as channel ids counting down from the top
/// of the id space while printing.
fn var(k: usize) -> ChannelId {
    ChannelId(u32::MAX - k as u32)
}

fn var_index(c: ChannelId) -> Option<usize> {
    let k = u32::MAX - c.0;
    (k < 1 << 16).then_some(k as usize)
}

/// Prints `t` with free channels named `c{id}`.
pub fn pretty(t: &CanonicalTerm) -> String {
    pretty_with(t, &|c| format!("c{}", c.0))
}

/// Prints `t` in the parser's notation, naming free channels with `names`.
///
/// Bound channels print as `b{level}` and receive variables as `x{k}`. A
/// receive whose table is the instance of a single body prints as that
/// body; otherwise it prints as an `if` chain over the table keys.
pub fn pretty_with(t: &CanonicalTerm, names: &dyn Fn(ChannelId) -> String) -> String {
    let mut p = Printer { names, out: String::new() };
    p.term(t, 0, 0);
    p.out
}

struct Printer<'a> {
    names: &'a dyn Fn(ChannelId) -> String,
    out: String,
}

impl Printer<'_> {
    fn chan(&self, c: ChannelId) -> String {
        if let Some(k) = var_index(c) {
            format!("x{k}")
        } else if let Some(l) = c.placeholder_level() {
            format!("b{l}")
        } else {
            (self.names)(c)
        }
    }

    fn value(&self, v: &Value) -> String {
        match v {
            Value::Chan(c) => self.chan(*c),
            Value::Pair(a, b) => format!("({}, {})", self.value(a), self.value(b)),
            other => other.to_string(),
        }
    }

    /// `vars` counts enclosing receives, `level` enclosing `new`s.
    fn term(&mut self, t: &CanonicalTerm, vars: usize, level: usize) {
        match t {
            CanonicalTerm::Stop => self.out.push('0'),
            CanonicalTerm::Cut => self.out.push_str("0 # cut\n"),
            CanonicalTerm::Send(c, v) => {
                let s = format!("{}<{}>", self.chan(*c), self.value(v));
                self.out.push_str(&s);
            }
            CanonicalTerm::New(body) => {
                self.out.push_str(&format!("new b{level}. "));
                self.term(body, vars, level + 1);
            }
            CanonicalTerm::Parallel(l, r) => {
                self.operand(
                    l,
                    !matches!(**l, CanonicalTerm::Stop | CanonicalTerm::Send(..) | CanonicalTerm::Cut),
                    vars,
                    level,
                );
                self.out.push_str(" | ");
                self.operand(r, matches!(**r, CanonicalTerm::Parallel(..)), vars, level);
            }
            CanonicalTerm::ReceiveTable(c, table) => {
                let x = var(vars);
                self.out.push_str(&format!("{}({}). ", self.chan(*c), self.chan(x)));
                if let Some(body) = template(table, x) {
                    self.term(&body, vars + 1, level);
                    return;
                }
                let default = most_frequent(table);
                for (k, entry) in table.iter().filter(|(_, e)| Some(*e) != default) {
                    self.out.push_str(&format!("if {} = {} then ", self.chan(x), self.value(k)));
                    self.term(entry, vars + 1, level);
                    self.out.push_str(" else ");
                }
                match default {
                    Some(d) => self.term(d, vars + 1, level),
                    None => self.out.push('0'),
                }
            }
        }
    }

    fn operand(&mut self, t: &CanonicalTerm, parens: bool, vars: usize, level: usize) {
        if parens {
            self.out.push('(');
        }
        self.term(t, vars, level);
        if parens {
            self.out.push(')');
        }
    }
}

/// Ties go to the entry of the smallest key.
fn most_frequent(table: &BTreeMap<Value, CanonicalTerm>) -> Option<&CanonicalTerm> {
    let mut counts: Vec<(&CanonicalTerm, usize)> = Vec::new();
    for e in table.values() {
        match counts.iter_mut().find(|(t, _)| *t == e) {
            Some((_, n)) => *n += 1,
            None => counts.push((e, 1)),
        }
    }
    let best = counts.iter().map(|(_, n)| *n).max()?;
    counts.into_iter().find(|(_, n)| *n == best).map(|(t, _)| t)
}

/// A body `b` with `b[k/x] == table[k]` for every key, if one exists.
fn template(table: &BTreeMap<Value, CanonicalTerm>, x: ChannelId) -> Option<CanonicalTerm> {
    let x = Value::Chan(x);
    table.iter().find_map(|(k, entry)| {
        let body = substitute(entry, k, &x);
        table.iter().all(|(k2, e2)| substitute(&body, &x, k2) == *e2).then_some(body)
    })
}

/// Replaces value `from` by `to` in sent values and channel positions.
/// Table keys are left alone.
fn substitute(t: &CanonicalTerm, from: &Value, to: &Value) -> CanonicalTerm {
    let chan = |c: ChannelId| match (from, to) {
        (Value::Chan(f), Value::Chan(t)) if *f == c => Some(*t),
        (Value::Chan(f), _) if *f == c => None,
        _ => Some(c),
    };
    match t {
        CanonicalTerm::Stop | CanonicalTerm::Cut => t.clone(),
        CanonicalTerm::Send(c, v) => match chan(*c) {
            Some(c) => CanonicalTerm::Send(c, substitute_value(v, from, to)),
            None => CanonicalTerm::Stop,
        },
        CanonicalTerm::ReceiveTable(c, table) => match chan(*c) {
            Some(c) => CanonicalTerm::ReceiveTable(
                c,
                table.iter().map(|(k, e)| (k.clone(), substitute(e, from, to))).collect(),
            ),
            None => CanonicalTerm::Stop,
        },
        CanonicalTerm::Parallel(l, r) => CanonicalTerm::par(substitute(l, from, to), substitute(r, from, to)),
        CanonicalTerm::New(b) => CanonicalTerm::new_scope(substitute(b, from, to)),
    }
}

fn substitute_value(v: &Value, from: &Value, to: &Value) -> Value {
    if v == from {
        return to.clone();
    }
    match v {
        Value::Pair(a, b) => Value::pair(substitute_value(a, from, to), substitute_value(b, from, to)),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::canonical::reify;
    use crate::syntax::{default_env, desugar, parse};
    use crate::universe::Universe;

    fn reparse(text: &str, u: &Universe, depth: usize) -> CanonicalTerm {
        let ast = parse(text).unwrap_or_else(|e| panic!("{e} in {text:?}"));
        let env: BTreeMap<String, ChannelId> = default_env([&ast])
            .into_keys()
            .map(|n| {
                let id = n[1..].parse().unwrap();
                (n, ChannelId(id))
            })
            .collect();
        reify(&desugar(&ast, &env).unwrap(), u, &BTreeSet::new(), depth).unwrap()
    }

    #[test]
    fn stop_and_bound_send() {
        assert_eq!(pretty(&CanonicalTerm::Stop), "0");
        let t = CanonicalTerm::new_scope(CanonicalTerm::Send(ChannelId::placeholder(0), Value::Unit));
        assert_eq!(pretty(&t), "new b0. b0<()>");
    }

    #[test]
    fn forwarder_prints_as_single_body() {
        let u = Universe::default();
        let t = reparse("c0(y). c1<y>", &u, 4);
        assert_eq!(pretty(&t), "c0(x0). c1<x0>");
    }

    #[test]
    fn tables_without_a_template_print_as_conditionals() {
        let u = Universe::default();
        let text = "c0(y). if y = () then c1<()> else 0";
        let t = reparse(text, &u, 4);
        let printed = pretty(&t);
        assert_eq!(printed, "c0(x0). if x0 = () then c1<()> else 0");
        assert_eq!(reparse(&printed, &u, 4), t);
    }

    #[test]
    fn parallel_operands_are_parenthesised() {
        let u = Universe::default();
        let t = reparse("(c0(y). c1<y>) | (c1<()> | new z. z<()>)", &u, 6);
        let printed = pretty(&t);
        assert_eq!(printed, "(c0(x0). c1<x0>) | (c1<()> | new b0. b0<()>)");
        assert_eq!(reparse(&printed, &u, 6), t);
    }

    #[test]
    fn cut_is_marked() {
        let t = CanonicalTerm::par(CanonicalTerm::Cut, CanonicalTerm::Stop);
        let printed = pretty(&t);
        assert_eq!(printed, "0 # cut\n | 0");
        assert!(parse(&printed).is_ok());
    }

    #[test]
    fn custom_names() {
        let t = CanonicalTerm::Send(ChannelId(1), Value::Chan(ChannelId(0)));
        assert_eq!(pretty_with(&t, &|c| ["a", "b"][c.0 as usize].to_string()), "b<a>");
    }
}
