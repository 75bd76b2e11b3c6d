//! Concrete syntax: parser, source AST, and lowering.
//!
//! The pretty-printed form of every core value (`Display` on types,
//! contexts, and processes) is valid input, and parsing a printed value
//! gives the value back exactly.

pub mod ast;
pub mod lexer;
pub mod parser;

pub use ast::{Decl, Directive, LowerError, SourceFile, SrcCtx, SrcProc, SrcType};
pub use lexer::ParseError;
pub use parser::{parse_ann_type, parse_context, parse_plain_type, parse_process, parse_source};
