//! Syntax-directed checker for the plain linear process judgement.
//!
//! Multiplicative and additive fragment, with links restricted to atoms.
//! Context splits at `Send` and at multi-cuts are inferred from free names:
//! linearity makes the split unique whenever one exists. Binary cut is a
//! special case of [`Process::MCut`] with two parts and an identity
//! forwarder; the checker treats every composition through the multi-cut
//! rule, validating the forwarder premise with [`check_forwarder`] and the
//! side condition tying queued messages to transit processes.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::context::{CpContext, Usage};
use crate::forwarder::{check_forwarder_with, CheckOptions, Derivation as FwdDerivation};
use crate::process::{MCut, Process};
use crate::queue::QueuePayload;
use crate::syntax::{dual, erase, Name, PlainType};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CpRule {
    Ax,
    One,
    Bot,
    Tensor,
    Par,
    PlusL,
    PlusR,
    With,
    MCutQ,
}

impl fmt::Display for CpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CpRule::Ax => "Ax",
            CpRule::One => "One",
            CpRule::Bot => "Bot",
            CpRule::Tensor => "Tensor",
            CpRule::Par => "Par",
            CpRule::PlusL => "PlusL",
            CpRule::PlusR => "PlusR",
            CpRule::With => "With",
            CpRule::MCutQ => "MCutQ",
        };
        f.write_str(s)
    }
}

/// Proof tree for the plain judgement. For `MCutQ` nodes the children are
/// the part derivations followed by the transit derivations, and
/// `forwarder` holds the forwarder premise's derivation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CpDerivation {
    pub rule: CpRule,
    pub endpoint: Option<Name>,
    pub children: Vec<CpDerivation>,
    pub forwarder: Option<Box<FwdDerivation>>,
    pub conclusion: CpContext,
}

impl CpDerivation {
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(CpDerivation::node_count).sum::<usize>()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum TypeError {
    #[error("endpoint {0} is unused")]
    UnusedEndpoint(Name),
    #[error("unknown endpoint {0}")]
    UnknownEndpoint(Name),
    #[error("type mismatch at {0}: {1}")]
    TypeMismatch(Name, String),
    #[error("link at non-atomic type: {0}")]
    NonAtomicLink(String),
    #[error("cannot split context: {0}")]
    SplitFailure(String),
    #[error("multi-cut side condition violated: {0}")]
    SideConditionViolation(String),
    #[error("duplicate name {0}")]
    DuplicateName(Name),
    #[error("forwarder premise failed: {0}")]
    ForwarderPremise(String),
}

/// Check `p` against exactly `ctx` (linear: every endpoint used once).
pub fn check_cp(p: &Process, ctx: &CpContext) -> Result<CpDerivation, TypeError> {
    check_cp_with(p, ctx, CheckOptions::default())
}

pub fn check_cp_with(
    p: &Process,
    ctx: &CpContext,
    opts: CheckOptions,
) -> Result<CpDerivation, TypeError> {
    match p {
        Process::Link(x, y) => {
            if ctx.len() != 2 {
                return Err(extra_endpoint_error(ctx, &[x, y]));
            }
            let tx = lookup(ctx, x)?;
            let ty = lookup(ctx, y)?;
            let ok = matches!(
                (tx, ty),
                (PlainType::DualAtom(a), PlainType::Atom(b))
                | (PlainType::Atom(a), PlainType::DualAtom(b)) if a == b
            );
            if !ok {
                let atoms = matches!(tx, PlainType::Atom(_) | PlainType::DualAtom(_))
                    && matches!(ty, PlainType::Atom(_) | PlainType::DualAtom(_));
                if atoms {
                    return Err(TypeError::TypeMismatch(
                        x.clone(),
                        format!("cannot link {tx} with {ty}"),
                    ));
                }
                return Err(TypeError::NonAtomicLink(format!("{x} : {tx}, {y} : {ty}")));
            }
            Ok(node(CpRule::Ax, Some(x.clone()), vec![], None, ctx))
        }
        Process::Close(x) => {
            if ctx.len() != 1 {
                return Err(extra_endpoint_error(ctx, &[x]));
            }
            match lookup(ctx, x)? {
                PlainType::One => Ok(node(CpRule::One, Some(x.clone()), vec![], None, ctx)),
                t => Err(TypeError::TypeMismatch(x.clone(), format!("close at {t}"))),
            }
        }
        Process::Wait(x, body) => {
            match lookup(ctx, x)? {
                PlainType::Bot => {}
                t => return Err(TypeError::TypeMismatch(x.clone(), format!("wait at {t}"))),
            }
            let mut rest = ctx.clone();
            rest.remove(x);
            let child = check_cp_with(body, &rest, opts)?;
            Ok(node(CpRule::Bot, Some(x.clone()), vec![child], None, ctx))
        }
        Process::Recv(x, y, body) => {
            let (a, b) = match lookup(ctx, x)? {
                PlainType::Par(a, b) => ((**a).clone(), (**b).clone()),
                t => return Err(TypeError::TypeMismatch(x.clone(), format!("in at {t}"))),
            };
            if ctx.contains(y) {
                return Err(TypeError::DuplicateName(y.clone()));
            }
            let mut premise = ctx.clone();
            premise.insert(x.clone(), b);
            premise.insert(y.clone(), a);
            let child = check_cp_with(body, &premise, opts)?;
            Ok(node(CpRule::Par, Some(x.clone()), vec![child], None, ctx))
        }
        Process::Send(x, y, payload, cont) => {
            let (a, b) = match lookup(ctx, x)? {
                PlainType::Tensor(a, b) => ((**a).clone(), (**b).clone()),
                t => return Err(TypeError::TypeMismatch(x.clone(), format!("out at {t}"))),
            };
            if ctx.contains(y) {
                return Err(TypeError::DuplicateName(y.clone()));
            }
            let mut payload_free = payload.free_names();
            payload_free.remove(y);
            if payload_free.contains(x) {
                return Err(TypeError::SplitFailure(format!(
                    "payload of out {x} uses {x} itself"
                )));
            }
            for n in &payload_free {
                if !ctx.contains(n) {
                    return Err(TypeError::UnknownEndpoint(n.clone()));
                }
            }
            let mut delta = ctx.restrict(&payload_free);
            delta.insert(y.clone(), a);
            let payload_deriv = check_cp_with(payload, &delta, opts)?;

            let mut sigma = ctx.clone();
            for n in &payload_free {
                sigma.remove(n);
            }
            sigma.insert(x.clone(), b);
            let cont_deriv = check_cp_with(cont, &sigma, opts)?;
            Ok(node(CpRule::Tensor, Some(x.clone()), vec![payload_deriv, cont_deriv], None, ctx))
        }
        Process::Inl(x, body) => check_plus(p, x, body, ctx, opts, false),
        Process::Inr(x, body) => check_plus(p, x, body, ctx, opts, true),
        Process::Case(x, l, r) => {
            let (a, b) = match lookup(ctx, x)? {
                PlainType::With(a, b) => ((**a).clone(), (**b).clone()),
                t => return Err(TypeError::TypeMismatch(x.clone(), format!("case at {t}"))),
            };
            let mut lctx = ctx.clone();
            lctx.insert(x.clone(), a);
            let lchild = check_cp_with(l, &lctx, opts)?;
            let mut rctx = ctx.clone();
            rctx.insert(x.clone(), b);
            let rchild = check_cp_with(r, &rctx, opts)?;
            Ok(node(CpRule::With, Some(x.clone()), vec![lchild, rchild], None, ctx))
        }
        Process::MCut(m) => check_mcut(m, ctx, opts),
    }
}

fn check_plus(
    _p: &Process,
    x: &Name,
    body: &Process,
    ctx: &CpContext,
    opts: CheckOptions,
    right: bool,
) -> Result<CpDerivation, TypeError> {
    let (a, b) = match lookup(ctx, x)? {
        PlainType::Plus(a, b) => ((**a).clone(), (**b).clone()),
        t => return Err(TypeError::TypeMismatch(x.clone(), format!("inl/inr at {t}"))),
    };
    let mut premise = ctx.clone();
    let (ty, rule) = if right { (b, CpRule::PlusR) } else { (a, CpRule::PlusL) };
    premise.insert(x.clone(), ty);
    let child = check_cp_with(body, &premise, opts)?;
    Ok(node(rule, Some(x.clone()), vec![child], None, ctx))
}

/// Validate a multi-cut composition against an outer context.
///
/// Checks the three premise families of the composition rule — transit
/// processes, parts, and the forwarder judgement — plus the side condition
/// that the queued messages are exactly the transit endpoints at dual type.
pub fn validate_mcut(m: &Process, outer: &CpContext) -> Result<(), TypeError> {
    match m {
        Process::MCut(inner) => check_mcut(inner, outer, CheckOptions::default()).map(|_| ()),
        _ => Err(TypeError::SplitFailure("not a multi-cut composition".into())),
    }
}

fn check_mcut(m: &MCut, ctx: &CpContext, opts: CheckOptions) -> Result<CpDerivation, TypeError> {
    if m.parts.len() != m.cut_names.len() || m.parts.is_empty() {
        return Err(TypeError::SplitFailure(format!(
            "{} cut names for {} parts",
            m.cut_names.len(),
            m.parts.len()
        )));
    }
    let cut_set: BTreeSet<&Name> = m.cut_names.iter().collect();
    if cut_set.len() != m.cut_names.len() {
        return Err(TypeError::SplitFailure("repeated cut name".into()));
    }

    // Forwarder-context endpoints: cuts must be active; everything else is
    // done, or a free atom endpoint that passes through to the conclusion.
    let mut free_atoms: Vec<(Name, PlainType)> = Vec::new();
    for (n, st) in m.fwd_ctx.iter() {
        match (&st.usage, cut_set.contains(n)) {
            (Usage::Active(_), true) => {}
            (Usage::Done, true) => {
                return Err(TypeError::TypeMismatch(n.clone(), "cut endpoint marked done".into()))
            }
            (Usage::Done, false) => {}
            (Usage::Active(t), false) => {
                let plain = erase(t);
                if !matches!(plain, PlainType::Atom(_) | PlainType::DualAtom(_)) {
                    return Err(TypeError::TypeMismatch(
                        n.clone(),
                        format!("free forwarder endpoint at non-atomic type {plain}"),
                    ));
                }
                free_atoms.push((n.clone(), plain));
            }
        }
    }
    for x in &m.cut_names {
        if m.fwd_ctx.get(x).is_none() {
            return Err(TypeError::UnknownEndpoint(x.clone()));
        }
    }

    // Forwarder premise.
    let fwd_deriv = check_forwarder_with(&m.forwarder, &m.fwd_ctx, opts)
        .map_err(|e| TypeError::ForwarderPremise(e.to_string()))?;

    // Side condition: the multiset of queued messages equals the transit
    // endpoints with their types; each transit then checks at the dual.
    let mut queued: Vec<(Name, PlainType)> = Vec::new();
    for (_, st) in m.fwd_ctx.iter() {
        for p in st.queue.payloads() {
            if let QueuePayload::Msg(z, t) = p {
                queued.push((z.clone(), t.clone()));
            }
        }
    }
    if queued.len() != m.transit.len() {
        return Err(TypeError::SideConditionViolation(format!(
            "{} queued messages vs {} transit processes",
            queued.len(),
            m.transit.len()
        )));
    }
    let mut transit_types: Vec<(usize, Name, PlainType)> = Vec::new();
    for (j, (y, _)) in m.transit.iter().enumerate() {
        let Some(pos) = queued.iter().position(|(z, _)| z == y) else {
            return Err(TypeError::SideConditionViolation(format!(
                "transit {y} has no matching queued message"
            )));
        };
        let (_, t) = queued.remove(pos);
        transit_types.push((j, y.clone(), dual(&t)));
    }

    // Partition the outer context by free names.
    let mut used: BTreeSet<Name> = BTreeSet::new();
    let mut claim = |proc_free: &BTreeSet<Name>| -> Result<CpContext, TypeError> {
        let mut slice = CpContext::empty();
        for n in proc_free {
            if let Some(t) = ctx.get(n) {
                if !used.insert(n.clone()) {
                    return Err(TypeError::SplitFailure(format!(
                        "endpoint {n} used by two premises"
                    )));
                }
                slice.insert(n.clone(), t.clone());
            } else {
                return Err(TypeError::UnknownEndpoint(n.clone()));
            }
        }
        Ok(slice)
    };

    let mut children = Vec::new();
    for (i, part) in m.parts.iter().enumerate() {
        let x = &m.cut_names[i];
        let ty = match &m.fwd_ctx.get(x).expect("checked").usage {
            Usage::Active(t) => dual(&erase(t)),
            Usage::Done => unreachable!("cuts are active"),
        };
        let mut free = part.free_names();
        if !free.remove(x) {
            return Err(TypeError::UnusedEndpoint(x.clone()));
        }
        for other in &m.cut_names {
            if other != x && free.contains(other) {
                return Err(TypeError::SplitFailure(format!(
                    "part {i} mentions foreign cut endpoint {other}"
                )));
            }
        }
        let mut sigma = claim(&free)?;
        sigma.insert(x.clone(), ty);
        children.push(check_cp_with(part, &sigma, opts)?);
    }
    for (j, y, ty) in transit_types {
        let proc = &m.transit[j].1;
        let mut free = proc.free_names();
        if !free.remove(&y) {
            return Err(TypeError::UnusedEndpoint(y.clone()));
        }
        let mut delta = claim(&free)?;
        delta.insert(y.clone(), ty);
        children.push(check_cp_with(proc, &delta, opts)?);
    }
    for (n, t) in free_atoms {
        match ctx.get(&n) {
            Some(outer_t) if *outer_t == t => {
                if !used.insert(n.clone()) {
                    return Err(TypeError::SplitFailure(format!(
                        "endpoint {n} used by two premises"
                    )));
                }
            }
            Some(outer_t) => {
                return Err(TypeError::TypeMismatch(
                    n.clone(),
                    format!("forwarder sees {t}, outer context has {outer_t}"),
                ))
            }
            None => return Err(TypeError::UnknownEndpoint(n.clone())),
        }
    }
    if let Some(unused) = ctx.names().find(|n| !used.contains(*n)) {
        return Err(TypeError::UnusedEndpoint(unused.clone()));
    }

    Ok(CpDerivation {
        rule: CpRule::MCutQ,
        endpoint: None,
        children,
        forwarder: Some(Box::new(fwd_deriv)),
        conclusion: ctx.clone(),
    })
}

fn node(
    rule: CpRule,
    endpoint: Option<Name>,
    children: Vec<CpDerivation>,
    forwarder: Option<Box<FwdDerivation>>,
    ctx: &CpContext,
) -> CpDerivation {
    CpDerivation { rule, endpoint, children, forwarder, conclusion: ctx.clone() }
}

fn lookup<'c>(ctx: &'c CpContext, x: &Name) -> Result<&'c PlainType, TypeError> {
    ctx.get(x).ok_or_else(|| TypeError::UnknownEndpoint(x.clone()))
}

fn extra_endpoint_error(ctx: &CpContext, principals: &[&Name]) -> TypeError {
    match ctx.names().find(|n| !principals.contains(n)) {
        Some(n) => TypeError::UnusedEndpoint(n.clone()),
        None => TypeError::UnknownEndpoint(principals[0].clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::erase_context;
    use crate::forwarder::fixtures;
    use crate::syntax::name;

    #[test]
    fn close_at_one_accepts() {
        let ctx = CpContext::build([(name("x"), PlainType::One)]).unwrap();
        let d = check_cp(&Process::Close(name("x")), &ctx).unwrap();
        assert_eq!(d.rule, CpRule::One);
    }

    #[test]
    fn link_at_dual_atoms_accepts() {
        let ctx = CpContext::build([
            (name("x"), PlainType::dual_atom("a")),
            (name("y"), PlainType::atom("a")),
        ])
        .unwrap();
        assert!(check_cp(&Process::Link(name("x"), name("y")), &ctx).is_ok());
    }

    #[test]
    fn weakening_fails() {
        let ctx = CpContext::build([
            (name("x"), PlainType::One),
            (name("z"), PlainType::One),
        ])
        .unwrap();
        let err = check_cp(&Process::Close(name("x")), &ctx).unwrap_err();
        assert_eq!(err, TypeError::UnusedEndpoint(name("z")));
    }

    #[test]
    fn criss_cross_forwarder_is_cp_typable_after_erasure() {
        let ctx = fixtures::criss_cross_ctx();
        let p = fixtures::criss_cross_forwarder();
        let cp_ctx = erase_context(&ctx).unwrap();
        let d = check_cp(&p, &cp_ctx).unwrap();
        assert_eq!(d.rule, CpRule::Par);
    }

    #[test]
    fn send_split_is_inferred_from_free_names() {
        // out x[y](fwd y u)(wait x. close z) at x : a * bot, u : ~a, z : 1
        let ctx = CpContext::build([
            (name("x"), PlainType::tensor(PlainType::atom("a"), PlainType::Bot)),
            (name("u"), PlainType::dual_atom("a")),
            (name("z"), PlainType::One),
        ])
        .unwrap();
        let p = Process::send(
            name("x"),
            name("y"),
            Process::Link(name("y"), name("u")),
            Process::wait(name("x"), Process::Close(name("z"))),
        );
        assert!(check_cp(&p, &ctx).is_ok());
    }
}
