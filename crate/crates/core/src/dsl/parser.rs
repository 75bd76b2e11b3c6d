//! Recursive-descent parser for the concrete syntax.
//!
//! Grammar, one declaration per `;`:
//!
//! ```text
//! decl  := "type" NAME "=" type | "ctx" NAME "=" ctxbody | "proc" NAME "=" proc
//!        | "check" NAME NAME | "check_cp" NAME NAME | "synth" NAME
//!        | "synth_plain" NAME | "live" NAME | "run" NAME | "erase" NAME
//! type  := "1" ("[" names? "]")? | "bot" ("[" NAME "]")? | "~" NAME | NAME
//!        | "(" type op type ")" ("[" NAME "]")?          op := * | @ | + | &
//! proc  := "fwd" NAME NAME | "close" NAME | "wait" NAME "." proc
//!        | "out" NAME "[" NAME "]" "(" proc ")" "(" proc ")"
//!        | "in" NAME "(" NAME ")" "." proc | "inl" NAME "." proc
//!        | "inr" NAME "." proc | "case" NAME "(" proc ")" "(" proc ")"
//!        | "cut" NAME ":" type "(" proc ")" "(" proc ")"
//!        | "mcut" "[" names "]" "ctx" ":" ctxbody "fwd" ":" proc
//!          ("transit" ":" "[" (NAME "=" proc),* "]")?
//!          "parts" ":" "(" proc ("|" proc)* ")"
//! ctxbody := "{" endpoint ("," endpoint)* "}"
//! endpoint := NAME ":" ("." | type) ("queue" "[" qentry ("," qentry)* "]")?
//! qentry := "[" NAME "]" ("*" | "l" | "r" | NAME ":" type)
//! ```
//!
//! Comments are `--` to end of line. Keywords are reserved and cannot name
//! endpoints or declarations.

use crate::dsl::ast::{
    Decl, Directive, SourceFile, SrcCtx, SrcEndpoint, SrcOp, SrcProc, SrcQEntry, SrcType,
};
use crate::dsl::lexer::{lex, ParseError, Spanned, Tok};

const KEYWORDS: &[&str] = &[
    "type", "ctx", "proc", "fwd", "close", "wait", "out", "in", "inl", "inr", "case", "cut",
    "mcut", "transit", "parts", "queue", "bot", "check", "check_cp", "synth", "synth_plain",
    "live", "run", "erase",
];

pub fn parse_source(text: &str) -> Result<SourceFile, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut decls = Vec::new();
    while !p.at_end() {
        decls.push(p.decl()?);
        p.expect(Tok::Semi)?;
    }
    let file = SourceFile { decls };
    crate::dsl::ast::validate_file(&file)?;
    Ok(file)
}

/// Parse a standalone type in annotated form.
pub fn parse_ann_type(text: &str) -> Result<crate::syntax::AnnType, ParseError> {
    let t = parse_fragment(text, |p| p.ty())?;
    t.to_ann().map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Parse a standalone type in plain form.
pub fn parse_plain_type(text: &str) -> Result<crate::syntax::PlainType, ParseError> {
    let t = parse_fragment(text, |p| p.ty())?;
    t.to_plain().map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Parse a standalone context body `{ .. }`.
pub fn parse_context(text: &str) -> Result<crate::context::Context, ParseError> {
    let c = parse_fragment(text, |p| p.ctx_body())?;
    c.to_context(&SourceFile::default())
        .map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Parse a standalone process (no aliases, no seed: counter starts at 1).
pub fn parse_process(text: &str) -> Result<crate::process::Process, ParseError> {
    let sp = parse_fragment(text, |p| p.proc())?;
    let mut fresh = crate::process::FreshNames::new();
    sp.to_process(&SourceFile::default(), &mut fresh)
        .map_err(|e| ParseError::new(1, 1, e.to_string()))
}

fn parse_fragment<T>(
    text: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let out = f(&mut p)?;
    if !p.at_end() {
        let s = p.peek_spanned();
        return Err(ParseError::new(s.line, s.col, "trailing input"));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|s| &s.tok)
    }

    fn peek_spanned(&self) -> Spanned {
        self.toks.get(self.pos).cloned().unwrap_or_else(|| {
            let (line, col) = self
                .toks
                .last()
                .map(|s| (s.line, s.col + 1))
                .unwrap_or((1, 1));
            Spanned { tok: Tok::Semi, line, col }
        })
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let s = self.peek_spanned();
        ParseError::new(s.line, s.col, msg)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.err_here(format!("expected {want:?}, found {t}"))),
            None => Err(self.err_here(format!("expected {want:?}, found end of input"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err_here(format!("expected keyword {kw}")))
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Ident(s)) => Err(self.err_here(format!("{s} is a reserved word"))),
            _ => Err(self.err_here("expected a name")),
        }
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        match self.peek() {
            Some(Tok::Ident(kw)) => match kw.as_str() {
                "type" => {
                    self.pos += 1;
                    let n = self.name()?;
                    self.expect(Tok::Eq)?;
                    Ok(Decl::TypeAlias(n, self.ty()?))
                }
                "ctx" => {
                    self.pos += 1;
                    let n = self.name()?;
                    self.expect(Tok::Eq)?;
                    Ok(Decl::Ctx(n, self.ctx_body()?))
                }
                "proc" => {
                    self.pos += 1;
                    let n = self.name()?;
                    self.expect(Tok::Eq)?;
                    Ok(Decl::Proc(n, self.proc()?))
                }
                "check" => {
                    self.pos += 1;
                    let proc = self.name()?;
                    let ctx = self.name()?;
                    Ok(Decl::Directive(Directive::Check { proc, ctx }))
                }
                "check_cp" => {
                    self.pos += 1;
                    let proc = self.name()?;
                    let ctx = self.name()?;
                    Ok(Decl::Directive(Directive::CheckCp { proc, ctx }))
                }
                "synth" => {
                    self.pos += 1;
                    Ok(Decl::Directive(Directive::Synth { ctx: self.name()? }))
                }
                "synth_plain" => {
                    self.pos += 1;
                    Ok(Decl::Directive(Directive::SynthPlain { ctx: self.name()? }))
                }
                "live" => {
                    self.pos += 1;
                    Ok(Decl::Directive(Directive::Live { ctx: self.name()? }))
                }
                "run" => {
                    self.pos += 1;
                    Ok(Decl::Directive(Directive::Run { proc: self.name()? }))
                }
                "erase" => {
                    self.pos += 1;
                    Ok(Decl::Directive(Directive::Erase { ctx: self.name()? }))
                }
                other => Err(self.err_here(format!("expected a declaration, found {other}"))),
            },
            _ => Err(self.err_here("expected a declaration")),
        }
    }

    fn ty(&mut self) -> Result<SrcType, ParseError> {
        match self.peek() {
            Some(Tok::Num(n)) if n == "1" => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LBracket) {
                    self.pos += 1;
                    let mut names = Vec::new();
                    if self.peek() != Some(&Tok::RBracket) {
                        names.push(self.name()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            names.push(self.name()?);
                        }
                    }
                    self.expect(Tok::RBracket)?;
                    Ok(SrcType::One(Some(names)))
                } else {
                    Ok(SrcType::One(None))
                }
            }
            Some(Tok::Num(n)) => Err(self.err_here(format!("unexpected number {n} in a type"))),
            Some(Tok::Ident(s)) if s == "bot" => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LBracket) {
                    self.pos += 1;
                    let u = self.name()?;
                    self.expect(Tok::RBracket)?;
                    Ok(SrcType::Bot(Some(u)))
                } else {
                    Ok(SrcType::Bot(None))
                }
            }
            Some(Tok::Tilde) => {
                self.pos += 1;
                Ok(SrcType::Dual(self.name()?))
            }
            Some(Tok::Ident(_)) => Ok(SrcType::Ident(self.name()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let l = self.ty()?;
                // `(T)` is grouping; `(T op T)` a connective.
                if self.peek() == Some(&Tok::RParen) {
                    self.pos += 1;
                    if self.peek() == Some(&Tok::LBracket) {
                        self.pos += 1;
                        let u = self.name()?;
                        self.expect(Tok::RBracket)?;
                        return match l {
                            SrcType::Bin(op, a, b, None) => {
                                Ok(SrcType::Bin(op, a, b, Some(u)))
                            }
                            _ => Err(self.err_here("annotation on a grouped non-connective")),
                        };
                    }
                    return Ok(l);
                }
                let op = match self.bump() {
                    Some(Tok::Star) => SrcOp::Tensor,
                    Some(Tok::At) => SrcOp::Par,
                    Some(Tok::Plus) => SrcOp::Plus,
                    Some(Tok::Amp) => SrcOp::With,
                    _ => return Err(self.err_here("expected a type operator (* @ + &)")),
                };
                let r = self.ty()?;
                self.expect(Tok::RParen)?;
                let ann = if self.peek() == Some(&Tok::LBracket) {
                    self.pos += 1;
                    let u = self.name()?;
                    self.expect(Tok::RBracket)?;
                    Some(u)
                } else {
                    None
                };
                Ok(SrcType::Bin(op, Box::new(l), Box::new(r), ann))
            }
            _ => Err(self.err_here("expected a type")),
        }
    }

    fn ctx_body(&mut self) -> Result<SrcCtx, ParseError> {
        self.expect(Tok::LBrace)?;
        let mut endpoints = Vec::new();
        if self.peek() != Some(&Tok::RBrace) {
            endpoints.push(self.endpoint()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                endpoints.push(self.endpoint()?);
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(SrcCtx { endpoints })
    }

    fn endpoint(&mut self) -> Result<SrcEndpoint, ParseError> {
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let ty = if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            None
        } else {
            Some(self.ty()?)
        };
        let mut queue = Vec::new();
        if self.at_keyword("queue") {
            self.pos += 1;
            self.expect(Tok::LBracket)?;
            if self.peek() != Some(&Tok::RBracket) {
                queue.push(self.qentry()?);
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    queue.push(self.qentry()?);
                }
            }
            self.expect(Tok::RBracket)?;
        }
        Ok(SrcEndpoint { name, ty, queue })
    }

    fn qentry(&mut self) -> Result<SrcQEntry, ParseError> {
        self.expect(Tok::LBracket)?;
        let target = self.name()?;
        self.expect(Tok::RBracket)?;
        match self.peek() {
            Some(Tok::Star) => {
                self.pos += 1;
                Ok(SrcQEntry::Star(target))
            }
            Some(Tok::Ident(s)) if s == "l" && !matches!(self.peek2(), Some(Tok::Colon)) => {
                self.pos += 1;
                Ok(SrcQEntry::Left(target))
            }
            Some(Tok::Ident(s)) if s == "r" && !matches!(self.peek2(), Some(Tok::Colon)) => {
                self.pos += 1;
                Ok(SrcQEntry::Right(target))
            }
            Some(Tok::Ident(s)) if s == "q" && !matches!(self.peek2(), Some(Tok::Colon)) => {
                Err(self.err_here("the q marker is not supported (exponentials are out of scope)"))
            }
            Some(Tok::Ident(_)) => {
                let n = self.name()?;
                self.expect(Tok::Colon)?;
                let t = self.ty()?;
                Ok(SrcQEntry::Msg(target, n, t))
            }
            _ => Err(self.err_here("expected a queue payload (*, l, r, or name : type)")),
        }
    }

    fn proc(&mut self) -> Result<SrcProc, ParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let p = self.proc()?;
                self.expect(Tok::RParen)?;
                Ok(p)
            }
            Some(Tok::Ident(kw)) => {
                let kw = kw.clone();
                match kw.as_str() {
                    "fwd" => {
                        self.pos += 1;
                        Ok(SrcProc::Link(self.name()?, self.name()?))
                    }
                    "close" => {
                        self.pos += 1;
                        Ok(SrcProc::Close(self.name()?))
                    }
                    "wait" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::Dot)?;
                        Ok(SrcProc::Wait(x, Box::new(self.proc()?)))
                    }
                    "out" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::LBracket)?;
                        let y = self.name()?;
                        self.expect(Tok::RBracket)?;
                        self.expect(Tok::LParen)?;
                        let p = self.proc()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::LParen)?;
                        let q = self.proc()?;
                        self.expect(Tok::RParen)?;
                        Ok(SrcProc::Send(x, y, Box::new(p), Box::new(q)))
                    }
                    "in" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::LParen)?;
                        let y = self.name()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Dot)?;
                        Ok(SrcProc::Recv(x, y, Box::new(self.proc()?)))
                    }
                    "inl" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::Dot)?;
                        Ok(SrcProc::Inl(x, Box::new(self.proc()?)))
                    }
                    "inr" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::Dot)?;
                        Ok(SrcProc::Inr(x, Box::new(self.proc()?)))
                    }
                    "case" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::LParen)?;
                        let p = self.proc()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::LParen)?;
                        let q = self.proc()?;
                        self.expect(Tok::RParen)?;
                        Ok(SrcProc::Case(x, Box::new(p), Box::new(q)))
                    }
                    "cut" => {
                        self.pos += 1;
                        let x = self.name()?;
                        self.expect(Tok::Colon)?;
                        let t = self.ty()?;
                        self.expect(Tok::LParen)?;
                        let p = self.proc()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::LParen)?;
                        let q = self.proc()?;
                        self.expect(Tok::RParen)?;
                        Ok(SrcProc::Cut { name: x, ty: t, left: Box::new(p), right: Box::new(q) })
                    }
                    "mcut" => {
                        self.pos += 1;
                        self.expect(Tok::LBracket)?;
                        let mut cuts = vec![self.name()?];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            cuts.push(self.name()?);
                        }
                        self.expect(Tok::RBracket)?;
                        self.eat_keyword("ctx")?;
                        self.expect(Tok::Colon)?;
                        let ctx = self.ctx_body()?;
                        self.eat_keyword("fwd")?;
                        self.expect(Tok::Colon)?;
                        let fwd = self.proc()?;
                        let mut transit = Vec::new();
                        if self.at_keyword("transit") {
                            self.pos += 1;
                            self.expect(Tok::Colon)?;
                            self.expect(Tok::LBracket)?;
                            if self.peek() != Some(&Tok::RBracket) {
                                loop {
                                    let y = self.name()?;
                                    self.expect(Tok::Eq)?;
                                    let p = self.proc()?;
                                    transit.push((y, p));
                                    if self.peek() == Some(&Tok::Comma) {
                                        self.pos += 1;
                                    } else {
                                        break;
                                    }
                                }
                            }
                            self.expect(Tok::RBracket)?;
                        }
                        self.eat_keyword("parts")?;
                        self.expect(Tok::Colon)?;
                        self.expect(Tok::LParen)?;
                        let mut parts = vec![self.proc()?];
                        while self.peek() == Some(&Tok::Pipe) {
                            self.pos += 1;
                            parts.push(self.proc()?);
                        }
                        self.expect(Tok::RParen)?;
                        Ok(SrcProc::MCut { cuts, ctx, fwd: Box::new(fwd), transit, parts })
                    }
                    other => Err(self.err_here(format!("expected a process, found {other}"))),
                }
            }
            _ => Err(self.err_here("expected a process")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forwarder::fixtures;
    use crate::process::Process;
    use crate::syntax::name;

    #[test]
    fn parses_the_criss_cross_context() {
        let ctx = parse_context(
            "{ x : (~name @ ((~cost * bot[y])[y]))[y], y : (cost @ ((name * 1[x])[x]))[x] }",
        )
        .unwrap();
        assert_eq!(ctx, fixtures::criss_cross_ctx());
    }

    #[test]
    fn parses_the_criss_cross_forwarder() {
        let p = parse_process(
            "in x(u). in y(v). out y[u'](fwd u u')(out x[v'](fwd v' v)(wait x. close y))",
        )
        .unwrap();
        assert_eq!(p, fixtures::criss_cross_forwarder());
    }

    #[test]
    fn printing_then_parsing_is_identity() {
        let ctx = fixtures::criss_cross_ctx();
        let printed = ctx.to_string();
        assert_eq!(parse_context(&printed).unwrap(), ctx);

        let p = fixtures::criss_cross_forwarder();
        assert_eq!(parse_process(&p.to_string()).unwrap(), p);

        // And printing is a fixed point of parse-then-print.
        assert_eq!(parse_context(&printed).unwrap().to_string(), printed);
    }

    #[test]
    fn unicode_operators_are_accepted() {
        let a = parse_plain_type("(a ⊗ ⊥)").unwrap();
        let b = parse_plain_type("(a * bot)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn queue_entries_parse_in_raw_order() {
        let ctx = parse_context(
            "{ x : . queue [ [y]*, [z] m : a ], y : 1[x], z : (a * 1[y])[x] }",
        );
        // The context itself is ill-typed nonsense but well-formed; the
        // entries canonicalise by target.
        let ctx = ctx.unwrap();
        let entries = ctx.get(&name("x")).unwrap().queue.entries();
        assert_eq!(entries.len(), 2);
    }

    #[test]
    fn q_marker_is_rejected() {
        let err = parse_context("{ x : . queue [ [y]q ], y : 1[x] }").unwrap_err();
        assert!(err.message.contains("not supported"));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_source("proc P = close ;").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.col > 1);
    }

    #[test]
    fn directives_resolve_names() {
        let src = "\
ctx C = { x : 1[] };
proc P = close x;
check P C;
";
        let file = parse_source(src).unwrap();
        assert_eq!(file.directives().count(), 1);
        let bad = "check P C;";
        assert!(parse_source(bad).is_err());
    }

    #[test]
    fn cut_sugar_lowers_to_a_composition() {
        let file = parse_source("proc P = cut x : a (fwd x y)(fwd x z);").unwrap();
        let sp = file.proc("P").unwrap();
        let mut fresh = crate::process::FreshNames::new();
        let p = sp.to_process(&file, &mut fresh).unwrap();
        let Process::MCut(m) = &p else { panic!("expected a composition") };
        assert_eq!(m.cut_names.len(), 2);
        assert_eq!(m.parts.len(), 2);
    }
}
