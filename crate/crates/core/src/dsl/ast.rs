//! Source-level syntax trees and their lowering to core values.
//!
//! Types are parsed with optional annotations; each use site decides
//! whether it needs a plain type, an annotated one, or (for context
//! declarations) per-endpoint annotated types with queues. Type aliases
//! are expanded during lowering, and a `cut` sugar form expands to a
//! two-party composition through the expanded identity forwarder.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::compose::identity_forwarder;
use crate::context::{Context, EndpointState, Usage};
use crate::dsl::lexer::ParseError;
use crate::process::{FreshNames, MCut, Process};
use crate::queue::{Queue, QueueEntry, QueuePayload};
use crate::syntax::{AnnType, Name, PlainType};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SrcOp {
    Tensor,
    Par,
    Plus,
    With,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SrcType {
    /// Atom or alias; resolved against the declaration table.
    Ident(String),
    /// `~a` — dual atom, or the dual of a plain alias.
    Dual(String),
    /// `1` or `1[u,..]` (`Some` means annotated; the list may be empty).
    One(Option<Vec<String>>),
    /// `bot` or `bot[u]`.
    Bot(Option<String>),
    /// `(T op T)` with optional `[u]` annotation.
    Bin(SrcOp, Box<SrcType>, Box<SrcType>, Option<String>),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SrcQEntry {
    Star(String),
    Left(String),
    Right(String),
    Msg(String, String, SrcType),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SrcEndpoint {
    pub name: String,
    /// `None` for a done endpoint (`x : .`).
    pub ty: Option<SrcType>,
    pub queue: Vec<SrcQEntry>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SrcCtx {
    pub endpoints: Vec<SrcEndpoint>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SrcProc {
    Link(String, String),
    Close(String),
    Wait(String, Box<SrcProc>),
    Send(String, String, Box<SrcProc>, Box<SrcProc>),
    Recv(String, String, Box<SrcProc>),
    Inl(String, Box<SrcProc>),
    Inr(String, Box<SrcProc>),
    Case(String, Box<SrcProc>, Box<SrcProc>),
    Cut { name: String, ty: SrcType, left: Box<SrcProc>, right: Box<SrcProc> },
    MCut {
        cuts: Vec<String>,
        ctx: SrcCtx,
        fwd: Box<SrcProc>,
        transit: Vec<(String, SrcProc)>,
        parts: Vec<SrcProc>,
    },
}

/// One `check`/`synth`/`run`-style instruction embedded in a file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Directive {
    Check { proc: String, ctx: String },
    CheckCp { proc: String, ctx: String },
    Synth { ctx: String },
    SynthPlain { ctx: String },
    Live { ctx: String },
    Run { proc: String },
    Erase { ctx: String },
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Decl {
    TypeAlias(String, SrcType),
    Ctx(String, SrcCtx),
    Proc(String, SrcProc),
    Directive(Directive),
}

/// A parsed file: declarations in order, names unique across kinds.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
}

impl SourceFile {
    pub fn alias(&self, name: &str) -> Option<&SrcType> {
        self.decls.iter().find_map(|d| match d {
            Decl::TypeAlias(n, t) if n == name => Some(t),
            _ => None,
        })
    }

    pub fn ctx(&self, name: &str) -> Option<&SrcCtx> {
        self.decls.iter().find_map(|d| match d {
            Decl::Ctx(n, c) if n == name => Some(c),
            _ => None,
        })
    }

    pub fn proc(&self, name: &str) -> Option<&SrcProc> {
        self.decls.iter().find_map(|d| match d {
            Decl::Proc(n, p) if n == name => Some(p),
            _ => None,
        })
    }

    pub fn directives(&self) -> impl Iterator<Item = &Directive> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Directive(dir) => Some(dir),
            _ => None,
        })
    }

    /// The single context declaration, if there is exactly one.
    pub fn sole_ctx(&self) -> Option<(&str, &SrcCtx)> {
        let mut found = None;
        for d in &self.decls {
            if let Decl::Ctx(n, c) = d {
                if found.is_some() {
                    return None;
                }
                found = Some((n.as_str(), c));
            }
        }
        found
    }

    /// The single process declaration, if there is exactly one.
    pub fn sole_proc(&self) -> Option<(&str, &SrcProc)> {
        let mut found = None;
        for d in &self.decls {
            if let Decl::Proc(n, p) = d {
                if found.is_some() {
                    return None;
                }
                found = Some((n.as_str(), p));
            }
        }
        found
    }
}

/// A lowering failure; positions are not tracked past parsing, so these
/// carry the offending name instead.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum LowerError {
    #[error("unknown declaration {0}")]
    Unknown(String),
    #[error("type must be plain here, but {0} is annotated")]
    UnexpectedAnnotation(String),
    #[error("missing annotation on {0}")]
    MissingAnnotation(String),
    #[error("the marker payload {0} is not supported")]
    UnsupportedMarker(String),
    #[error("~ applied to annotated alias {0}")]
    DualOfAnnotated(String),
    #[error("{0}")]
    BadContext(String),
}

impl SrcType {
    /// Expand aliases, leaving annotations as written.
    fn expand(&self, file: &SourceFile) -> Result<SrcType, LowerError> {
        match self {
            SrcType::Ident(n) => match file.alias(n) {
                Some(t) => t.expand(file),
                None => Ok(self.clone()),
            },
            SrcType::Dual(n) => match file.alias(n) {
                Some(t) => {
                    let p = t.expand(file)?.to_plain()?;
                    Ok(plain_to_src(&crate::syntax::dual(&p)))
                }
                None => Ok(self.clone()),
            },
            SrcType::One(_) | SrcType::Bot(_) => Ok(self.clone()),
            SrcType::Bin(op, l, r, ann) => Ok(SrcType::Bin(
                op.clone(),
                Box::new(l.expand(file)?),
                Box::new(r.expand(file)?),
                ann.clone(),
            )),
        }
    }

    /// Interpret as a plain type; annotations anywhere are an error.
    pub fn to_plain(&self) -> Result<PlainType, LowerError> {
        match self {
            SrcType::Ident(a) => Ok(PlainType::Atom(Name::new(a))),
            SrcType::Dual(a) => Ok(PlainType::DualAtom(Name::new(a))),
            SrcType::One(None) => Ok(PlainType::One),
            SrcType::One(Some(_)) => Err(LowerError::UnexpectedAnnotation("1[..]".into())),
            SrcType::Bot(None) => Ok(PlainType::Bot),
            SrcType::Bot(Some(_)) => Err(LowerError::UnexpectedAnnotation("bot[..]".into())),
            SrcType::Bin(op, l, r, None) => {
                let (l, r) = (l.to_plain()?, r.to_plain()?);
                Ok(match op {
                    SrcOp::Tensor => PlainType::tensor(l, r),
                    SrcOp::Par => PlainType::par(l, r),
                    SrcOp::Plus => PlainType::plus(l, r),
                    SrcOp::With => PlainType::with(l, r),
                })
            }
            SrcType::Bin(_, _, _, Some(u)) => {
                Err(LowerError::UnexpectedAnnotation(format!("(..)[{u}]")))
            }
        }
    }

    /// Interpret as an annotated type; every connective needs its target,
    /// except the left operands of tensor and par, which must be plain.
    pub fn to_ann(&self) -> Result<AnnType, LowerError> {
        match self {
            SrcType::Ident(a) => Ok(AnnType::Atom(Name::new(a))),
            SrcType::Dual(a) => Ok(AnnType::DualAtom(Name::new(a))),
            SrcType::One(Some(us)) => Ok(AnnType::One(us.iter().map(Name::new).collect())),
            SrcType::One(None) => Err(LowerError::MissingAnnotation("1".into())),
            SrcType::Bot(Some(u)) => Ok(AnnType::Bot(Name::new(u))),
            SrcType::Bot(None) => Err(LowerError::MissingAnnotation("bot".into())),
            SrcType::Bin(op, l, r, Some(u)) => {
                let u = Name::new(u);
                Ok(match op {
                    SrcOp::Tensor => AnnType::tensor(l.to_plain()?, u, r.to_ann()?),
                    SrcOp::Par => AnnType::par(l.to_plain()?, u, r.to_ann()?),
                    SrcOp::Plus => AnnType::plus(l.to_ann()?, u, r.to_ann()?),
                    SrcOp::With => AnnType::with(l.to_ann()?, u, r.to_ann()?),
                })
            }
            SrcType::Bin(_, _, _, None) => Err(LowerError::MissingAnnotation("(..)".into())),
        }
    }
}

fn plain_to_src(t: &PlainType) -> SrcType {
    match t {
        PlainType::Atom(a) => SrcType::Ident(a.as_str().into()),
        PlainType::DualAtom(a) => SrcType::Dual(a.as_str().into()),
        PlainType::One => SrcType::One(None),
        PlainType::Bot => SrcType::Bot(None),
        PlainType::Tensor(l, r) => {
            SrcType::Bin(SrcOp::Tensor, Box::new(plain_to_src(l)), Box::new(plain_to_src(r)), None)
        }
        PlainType::Par(l, r) => {
            SrcType::Bin(SrcOp::Par, Box::new(plain_to_src(l)), Box::new(plain_to_src(r)), None)
        }
        PlainType::Plus(l, r) => {
            SrcType::Bin(SrcOp::Plus, Box::new(plain_to_src(l)), Box::new(plain_to_src(r)), None)
        }
        PlainType::With(l, r) => {
            SrcType::Bin(SrcOp::With, Box::new(plain_to_src(l)), Box::new(plain_to_src(r)), None)
        }
    }
}

impl SrcCtx {
    /// Lower to a forwarder context: annotated types, queues, done marks.
    pub fn to_context(&self, file: &SourceFile) -> Result<Context, LowerError> {
        let mut pairs = Vec::new();
        for ep in &self.endpoints {
            let usage = match &ep.ty {
                Some(t) => Usage::Active(t.expand(file)?.to_ann()?),
                None => Usage::Done,
            };
            let mut queue = Queue::new();
            for entry in &ep.queue {
                let (target, payload) = match entry {
                    SrcQEntry::Star(u) => (u, QueuePayload::Star),
                    SrcQEntry::Left(u) => (u, QueuePayload::Left),
                    SrcQEntry::Right(u) => (u, QueuePayload::Right),
                    SrcQEntry::Msg(u, n, t) => (
                        u,
                        QueuePayload::Msg(Name::new(n), t.expand(file)?.to_plain()?),
                    ),
                };
                queue.enqueue(QueueEntry::new(Name::new(target), payload));
            }
            pairs.push((Name::new(&ep.name), EndpointState { queue, usage }));
        }
        Context::build(pairs).map_err(|e| LowerError::BadContext(e.to_string()))
    }

    /// Lower to a plain context: no annotations, no queues, no done marks.
    pub fn to_cp_context(&self, file: &SourceFile) -> Result<crate::context::CpContext, LowerError> {
        let mut pairs = Vec::new();
        for ep in &self.endpoints {
            let Some(ty) = &ep.ty else {
                return Err(LowerError::BadContext(format!(
                    "done endpoint {} in a plain context",
                    ep.name
                )));
            };
            if !ep.queue.is_empty() {
                return Err(LowerError::BadContext(format!(
                    "queue on {} in a plain context",
                    ep.name
                )));
            }
            pairs.push((Name::new(&ep.name), ty.expand(file)?.to_plain()?));
        }
        crate::context::CpContext::build(pairs).map_err(|e| LowerError::BadContext(e.to_string()))
    }
}

impl SrcProc {
    pub fn to_process(
        &self,
        file: &SourceFile,
        fresh: &mut FreshNames,
    ) -> Result<Process, LowerError> {
        match self {
            SrcProc::Link(x, y) => Ok(Process::Link(Name::new(x), Name::new(y))),
            SrcProc::Close(x) => Ok(Process::Close(Name::new(x))),
            SrcProc::Wait(x, p) => Ok(Process::wait(Name::new(x), p.to_process(file, fresh)?)),
            SrcProc::Send(x, y, p, q) => Ok(Process::send(
                Name::new(x),
                Name::new(y),
                p.to_process(file, fresh)?,
                q.to_process(file, fresh)?,
            )),
            SrcProc::Recv(x, y, p) => Ok(Process::recv(
                Name::new(x),
                Name::new(y),
                p.to_process(file, fresh)?,
            )),
            SrcProc::Inl(x, p) => Ok(Process::inl(Name::new(x), p.to_process(file, fresh)?)),
            SrcProc::Inr(x, p) => Ok(Process::inr(Name::new(x), p.to_process(file, fresh)?)),
            SrcProc::Case(x, p, q) => Ok(Process::case(
                Name::new(x),
                p.to_process(file, fresh)?,
                q.to_process(file, fresh)?,
            )),
            SrcProc::Cut { name, ty, left, right } => {
                let t = ty.expand(file)?.to_plain()?;
                let x = Name::new(name);
                let left = left.to_process(file, fresh)?;
                let right = right.to_process(file, fresh)?;
                let mut avoid: BTreeSet<Name> = left.free_names();
                avoid.extend(right.free_names());
                avoid.insert(x.clone());
                let xl = fresh.fresh(name, &avoid);
                avoid.insert(xl.clone());
                let xr = fresh.fresh(name, &avoid);
                avoid.insert(xr.clone());
                // left : t at x, right : dual t at x; the identity between
                // them carries xl : dual t, xr : t.
                let fwd = identity_forwarder(&xl, &xr, &t, fresh);
                let fwd_ctx = Context::of_types([
                    (xl.clone(), crate::syntax::annotate(&crate::syntax::dual(&t), &xr)),
                    (xr.clone(), crate::syntax::annotate(&t, &xl)),
                ])
                .map_err(|e| LowerError::BadContext(e.to_string()))?;
                Ok(Process::mcut(MCut {
                    cut_names: vec![xl.clone(), xr.clone()],
                    fwd_ctx,
                    forwarder: fwd,
                    transit: Vec::new(),
                    parts: vec![left.rename_free(&x, &xl), right.rename_free(&x, &xr)],
                }))
            }
            SrcProc::MCut { cuts, ctx, fwd, transit, parts } => {
                let fwd_ctx = ctx.to_context(file)?;
                let forwarder = fwd.to_process(file, fresh)?;
                let transit = transit
                    .iter()
                    .map(|(y, p)| Ok((Name::new(y), p.to_process(file, fresh)?)))
                    .collect::<Result<Vec<_>, LowerError>>()?;
                let parts = parts
                    .iter()
                    .map(|p| p.to_process(file, fresh))
                    .collect::<Result<Vec<_>, LowerError>>()?;
                Ok(Process::mcut(MCut {
                    cut_names: cuts.iter().map(Name::new).collect(),
                    fwd_ctx,
                    forwarder,
                    transit,
                    parts,
                }))
            }
        }
    }
}

/// Validate declaration-name uniqueness and resolvability of directives.
pub fn validate_file(file: &SourceFile) -> Result<(), ParseError> {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    for d in &file.decls {
        let (kind, name) = match d {
            Decl::TypeAlias(n, _) => ("type", n.as_str()),
            Decl::Ctx(n, _) => ("ctx", n.as_str()),
            Decl::Proc(n, _) => ("proc", n.as_str()),
            Decl::Directive(_) => continue,
        };
        if seen.insert(name, kind).is_some() {
            return Err(ParseError::new(0, 0, format!("duplicate declaration name {name}")));
        }
    }
    for dir in file.directives() {
        let check = |kind: &str, n: &str| -> Result<(), ParseError> {
            let found = match kind {
                "proc" => file.proc(n).is_some(),
                _ => file.ctx(n).is_some(),
            };
            if found {
                Ok(())
            } else {
                Err(ParseError::new(0, 0, format!("directive refers to unknown {kind} {n}")))
            }
        };
        match dir {
            Directive::Check { proc, ctx } | Directive::CheckCp { proc, ctx } => {
                check("proc", proc)?;
                check("ctx", ctx)?;
            }
            Directive::Synth { ctx }
            | Directive::SynthPlain { ctx }
            | Directive::Live { ctx }
            | Directive::Erase { ctx } => check("ctx", ctx)?,
            Directive::Run { proc } => check("proc", proc)?,
        }
    }
    Ok(())
}
