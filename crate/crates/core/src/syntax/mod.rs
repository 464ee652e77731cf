//! Textual notation for first-order process terms.
//!
//! ```text
//! proc  := "0" | chan "<" value ">" | chan "(" ident ")" "." proc
//!        | "new" ident "." proc | "!" proc
//!        | "if" value "=" value "then" proc "else" proc
//!        | "(" proc ")" | proc "|" proc
//! value := "()" | "true" | "false" | nat | ident | "(" value "," value ")"
//! ```
//!
//! `|` is left-associative and binds loosest; binder bodies extend to the
//! end of the enclosing group. A file holds one or more terms separated by
//! `;`, with `#` line comments.

mod ast;
mod desugar;
mod lexer;
mod parser;
mod pretty;

pub use ast::{Pos, SourceKind, SourceTerm, ValueExpr};
pub use desugar::{default_env, desugar, free_names};
pub use parser::{parse, parse_program};
pub use pretty::{pretty, pretty_with};
