use std::rc::Rc;

use crate::error::{Error, Result};

use super::ast::{Pos, SourceKind, SourceTerm, ValueExpr};
use super::lexer::{tokenize, Tok};

/// Nesting limit; deeper input is rejected instead of exhausting the stack.
const MAX_NESTING: usize = 256;

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    nesting: usize,
}

/// Parses a single term.
pub fn parse(text: &str) -> Result<SourceTerm> {
    let mut p = Parser::new(text)?;
    let t = p.proc()?;
    p.expect(&Tok::Eof)?;
    Ok(t)
}

/// Parses a `;`-separated list of terms (trailing `;` allowed).
pub fn parse_program(text: &str) -> Result<Vec<SourceTerm>> {
    let mut p = Parser::new(text)?;
    let mut terms = vec![p.proc()?];
    while p.eat(&Tok::Semi) {
        if p.peek() == &Tok::Eof {
            break;
        }
        terms.push(p.proc()?);
    }
    p.expect(&Tok::Eof)?;
    Ok(terms)
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser { toks: tokenize(text)?, at: 0, nesting: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let pos = self.pos();
        Err(Error::Syntax { line: pos.line, column: pos.column, message: message.into() })
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", t.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return self.error("nesting too deep");
        }
        Ok(())
    }

    fn proc(&mut self) -> Result<SourceTerm> {
        self.enter()?;
        let mut left = self.prefix()?;
        while self.peek() == &Tok::Bar {
            let pos = self.pos();
            self.bump();
            let right = self.prefix()?;
            left = SourceTerm { kind: SourceKind::Par(Rc::new(left), Rc::new(right)), pos };
        }
        self.nesting -= 1;
        Ok(left)
    }

    fn prefix(&mut self) -> Result<SourceTerm> {
        self.enter()?;
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Nat(0) => {
                self.bump();
                SourceKind::Stop
            }
            Tok::New => {
                self.bump();
                let binder = self.ident()?;
                self.expect(&Tok::Dot)?;
                SourceKind::New { binder, body: Rc::new(self.proc()?) }
            }
            Tok::Bang => {
                self.bump();
                SourceKind::Repl(Rc::new(self.prefix()?))
            }
            Tok::If => {
                self.bump();
                let lhs = self.value()?;
                self.expect(&Tok::Eq)?;
                let rhs = self.value()?;
                self.expect(&Tok::Then)?;
                let then = Rc::new(self.proc()?);
                self.expect(&Tok::Else)?;
                let otherwise = Rc::new(self.proc()?);
                SourceKind::If { lhs, rhs, then, otherwise }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.proc()?;
                self.expect(&Tok::RParen)?;
                self.nesting -= 1;
                return Ok(inner);
            }
            Tok::Ident(name) => {
                self.bump();
                let chan = ValueExpr::Ident(name, pos);
                match self.peek() {
                    Tok::Lt => {
                        self.bump();
                        let val = self.value()?;
                        self.expect(&Tok::Gt)?;
                        SourceKind::Send { chan, val }
                    }
                    Tok::LParen => {
                        self.bump();
                        let binder = self.ident()?;
                        self.expect(&Tok::RParen)?;
                        self.expect(&Tok::Dot)?;
                        SourceKind::Receive { chan, binder, body: Rc::new(self.proc()?) }
                    }
                    other => {
                        return self.error(format!("expected `<` or `(` after channel, found {}", other.describe()))
                    }
                }
            }
            other => return self.error(format!("expected a process, found {}", other.describe())),
        };
        self.nesting -= 1;
        Ok(SourceTerm { kind, pos })
    }

    fn value(&mut self) -> Result<ValueExpr> {
        self.enter()?;
        let pos = self.pos();
        let v = match self.peek().clone() {
            Tok::True => {
                self.bump();
                ValueExpr::Bool(true)
            }
            Tok::False => {
                self.bump();
                ValueExpr::Bool(false)
            }
            Tok::Nat(n) => {
                self.bump();
                ValueExpr::Nat(n)
            }
            Tok::Ident(s) => {
                self.bump();
                ValueExpr::Ident(s, pos)
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    ValueExpr::Unit
                } else {
                    let a = self.value()?;
                    self.expect(&Tok::Comma)?;
                    let b = self.value()?;
                    self.expect(&Tok::RParen)?;
                    ValueExpr::Pair(Box::new(a), Box::new(b))
                }
            }
            other => return self.error(format!("expected a value, found {}", other.describe())),
        };
        self.nesting -= 1;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ident(s: &str) -> ValueExpr {
        ValueExpr::Ident(s.into(), Pos::default())
    }

    fn node(kind: SourceKind) -> Rc<SourceTerm> {
        Rc::new(SourceTerm { kind, pos: Pos::default() })
    }

    fn send(c: &str, v: &str) -> Rc<SourceTerm> {
        node(SourceKind::Send { chan: ident(c), val: ident(v) })
    }

    #[test]
    fn zero_is_stop() {
        assert_eq!(parse("0").unwrap().kind, SourceKind::Stop);
    }

    #[test]
    fn receive_body_extends_right() {
        let t = parse("a(x). b<x> | c<x>").unwrap();
        let expected = node(SourceKind::Receive {
            chan: ident("a"),
            binder: "x".into(),
            body: node(SourceKind::Par(send("b", "x"), send("c", "x"))),
        });
        assert!(t.same_shape(&expected));
    }

    #[test]
    fn parentheses_stop_binder_scope() {
        let t = parse("(a(x). b<x>) | c<x>").unwrap();
        let SourceKind::Par(l, r) = &t.kind else { panic!("expected parallel, got {t:?}") };
        assert!(matches!(l.kind, SourceKind::Receive { .. }));
        assert!(r.same_shape(&send("c", "x")));
    }

    #[test]
    fn new_sends_bound_channel() {
        let t = parse("new b. a<b>").unwrap();
        let expected = node(SourceKind::New { binder: "b".into(), body: send("a", "b") });
        assert!(t.same_shape(&expected));
    }

    #[test]
    fn parallel_is_left_associative() {
        let t = parse("a<()> | b<()> | c<()>").unwrap();
        let SourceKind::Par(l, _) = &t.kind else { panic!() };
        assert!(matches!(l.kind, SourceKind::Par(..)));
    }

    #[test]
    fn values() {
        let t = parse("a<((), (true, 7))>").unwrap();
        let SourceKind::Send { val, .. } = t.kind else { panic!() };
        assert_eq!(
            val,
            ValueExpr::Pair(
                Box::new(ValueExpr::Unit),
                Box::new(ValueExpr::Pair(Box::new(ValueExpr::Bool(true)), Box::new(ValueExpr::Nat(7))))
            )
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse("a<()> |\n  b(").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 5, .. }), "{err:?}");
        assert!(parse("").is_err());
        assert!(parse("1").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_crashing() {
        let text = "(".repeat(10_000);
        assert!(parse(&text).is_err());
    }

    #[test]
    fn programs_hold_several_terms() {
        let ts = parse_program("a<()>; 0;\n# done\n").unwrap();
        assert_eq!(ts.len(), 2);
    }
}
