//! The process term language, free names, alpha-equivalence, and renaming.
//!
//! Besides the usual session constructs there is one structural form,
//! [`Process::MCut`]: the composition of several processes through a
//! forwarder, together with the forwarder's typing context and the list of
//! in-transit message processes. The context is part of the syntax because
//! the composition is not checkable (nor deterministically reducible)
//! without it: it fixes the cut types and records which queued message each
//! transit process realises.

use std::collections::BTreeSet;
use std::fmt;

use crate::context::{Context, Usage};
use crate::queue::QueuePayload;
use crate::syntax::Name;

/// A process term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Process {
    /// `fwd x y` — link two endpoints. Symmetric.
    Link(Name, Name),
    /// `close x` — close the session at `x`.
    Close(Name),
    /// `wait x. P` — wait for `x` to close, continue as `P`.
    Wait(Name, Box<Process>),
    /// `out x[y](P)(Q)` — send fresh endpoint `y` over `x`; `y` is bound in
    /// the payload `P` only, the continuation is `Q`.
    Send(Name, Name, Box<Process>, Box<Process>),
    /// `in x(y). P` — receive endpoint `y` over `x`; `y` is bound in `P`.
    Recv(Name, Name, Box<Process>),
    /// `inl x. P` / `inr x. P` — select a branch at `x`.
    Inl(Name, Box<Process>),
    Inr(Name, Box<Process>),
    /// `case x (P)(Q)` — offer both branches at `x`.
    Case(Name, Box<Process>, Box<Process>),
    /// Multi-cut composition, see [`MCut`].
    MCut(Box<MCut>),
}

/// Composition of `parts` through a `forwarder`, with in-transit messages.
///
/// `cut_names[i]` is bound in `parts[i]` and in the forwarder; every transit
/// name is bound in its own process and appears as a queued message in
/// `fwd_ctx`. Endpoints of `fwd_ctx` that are neither cut names nor done are
/// free endpoints of the whole composition (this only ever happens at atom
/// type, where the forwarder is an identity link).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MCut {
    pub cut_names: Vec<Name>,
    pub fwd_ctx: Context,
    pub forwarder: Process,
    pub transit: Vec<(Name, Process)>,
    pub parts: Vec<Process>,
}

impl Process {
    pub fn wait(x: Name, p: Process) -> Self {
        Process::Wait(x, Box::new(p))
    }

    pub fn send(x: Name, y: Name, payload: Process, cont: Process) -> Self {
        Process::Send(x, y, Box::new(payload), Box::new(cont))
    }

    pub fn recv(x: Name, y: Name, body: Process) -> Self {
        Process::Recv(x, y, Box::new(body))
    }

    pub fn inl(x: Name, p: Process) -> Self {
        Process::Inl(x, Box::new(p))
    }

    pub fn inr(x: Name, p: Process) -> Self {
        Process::Inr(x, Box::new(p))
    }

    pub fn case(x: Name, l: Process, r: Process) -> Self {
        Process::Case(x, Box::new(l), Box::new(r))
    }

    pub fn mcut(m: MCut) -> Self {
        Process::MCut(Box::new(m))
    }

    /// Node count; strictly positive.
    pub fn size(&self) -> usize {
        match self {
            Process::Link(..) | Process::Close(_) => 1,
            Process::Wait(_, p) | Process::Recv(_, _, p) | Process::Inl(_, p) | Process::Inr(_, p) => {
                1 + p.size()
            }
            Process::Send(_, _, p, q) | Process::Case(_, p, q) => 1 + p.size() + q.size(),
            Process::MCut(m) => {
                1 + m.forwarder.size()
                    + m.transit.iter().map(|(_, p)| p.size()).sum::<usize>()
                    + m.parts.iter().map(Process::size).sum::<usize>()
            }
        }
    }

    /// Free names under the binding discipline described on each variant.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Link(x, y) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Process::Close(x) => {
                out.insert(x.clone());
            }
            Process::Wait(x, p) | Process::Inl(x, p) | Process::Inr(x, p) => {
                out.insert(x.clone());
                p.collect_free(out);
            }
            Process::Recv(x, y, p) => {
                out.insert(x.clone());
                let mut inner = p.free_names();
                inner.remove(y);
                out.extend(inner);
            }
            Process::Send(x, y, p, q) => {
                out.insert(x.clone());
                let mut payload = p.free_names();
                payload.remove(y);
                out.extend(payload);
                q.collect_free(out);
            }
            Process::Case(x, p, q) => {
                out.insert(x.clone());
                p.collect_free(out);
                q.collect_free(out);
            }
            Process::MCut(m) => {
                let mut inner = m.forwarder.free_names();
                for (_, p) in &m.transit {
                    inner.extend(p.free_names());
                }
                for p in &m.parts {
                    inner.extend(p.free_names());
                }
                for x in &m.cut_names {
                    inner.remove(x);
                }
                for (y, _) in &m.transit {
                    inner.remove(y);
                }
                // Internal context endpoints are bound; free atom endpoints
                // of the forwarder context remain visible through the term.
                for (n, st) in m.fwd_ctx.iter() {
                    if st.usage.is_done() {
                        inner.remove(n);
                    }
                }
                out.extend(inner);
            }
        }
    }

    /// Rename one free name throughout. `to` must not be captured; callers
    /// pass fresh names.
    pub fn rename_free(&self, from: &Name, to: &Name) -> Process {
        if from == to {
            return self.clone();
        }
        let r = |n: &Name| if n == from { to.clone() } else { n.clone() };
        match self {
            Process::Link(x, y) => Process::Link(r(x), r(y)),
            Process::Close(x) => Process::Close(r(x)),
            Process::Wait(x, p) => Process::wait(r(x), p.rename_free(from, to)),
            Process::Inl(x, p) => Process::inl(r(x), p.rename_free(from, to)),
            Process::Inr(x, p) => Process::inr(r(x), p.rename_free(from, to)),
            Process::Recv(x, y, p) => {
                let body = if y == from { (**p).clone() } else { p.rename_free(from, to) };
                Process::recv(r(x), y.clone(), body)
            }
            Process::Send(x, y, p, q) => {
                let payload = if y == from { (**p).clone() } else { p.rename_free(from, to) };
                Process::send(r(x), y.clone(), payload, q.rename_free(from, to))
            }
            Process::Case(x, p, q) => {
                Process::case(r(x), p.rename_free(from, to), q.rename_free(from, to))
            }
            Process::MCut(m) => {
                let bound_here = m.cut_names.contains(from)
                    || m.transit.iter().any(|(y, _)| y == from)
                    || m.fwd_ctx.get(from).is_some_and(|st| st.usage.is_done());
                if bound_here {
                    return self.clone();
                }
                Process::mcut(MCut {
                    cut_names: m.cut_names.clone(),
                    fwd_ctx: rename_ctx_endpoint(&m.fwd_ctx, from, to),
                    forwarder: m.forwarder.rename_free(from, to),
                    transit: m
                        .transit
                        .iter()
                        .map(|(y, p)| (y.clone(), p.rename_free(from, to)))
                        .collect(),
                    parts: m.parts.iter().map(|p| p.rename_free(from, to)).collect(),
                })
            }
        }
    }

    /// Alpha-equivalence. Links compare symmetrically.
    pub fn alpha_eq(&self, other: &Process) -> bool {
        alpha_eq_in(self, other, &mut Vec::new())
    }

    /// Rename bound names so they are pairwise distinct and avoid `avoid`.
    /// Deterministic given the fresh-name counter.
    pub fn rename_apart(&self, avoid: &BTreeSet<Name>, fresh: &mut FreshNames) -> Process {
        let mut taken = avoid.clone();
        taken.extend(self.free_names());
        self.rename_apart_in(&mut taken, fresh)
    }

    fn rename_apart_in(&self, taken: &mut BTreeSet<Name>, fresh: &mut FreshNames) -> Process {
        match self {
            Process::Link(..) | Process::Close(_) => self.clone(),
            Process::Wait(x, p) => Process::wait(x.clone(), p.rename_apart_in(taken, fresh)),
            Process::Inl(x, p) => Process::inl(x.clone(), p.rename_apart_in(taken, fresh)),
            Process::Inr(x, p) => Process::inr(x.clone(), p.rename_apart_in(taken, fresh)),
            Process::Case(x, p, q) => Process::case(
                x.clone(),
                p.rename_apart_in(taken, fresh),
                q.rename_apart_in(taken, fresh),
            ),
            Process::Recv(x, y, p) => {
                let (y2, body) = freshen_binder(y, p, taken, fresh);
                Process::recv(x.clone(), y2, body.rename_apart_in(taken, fresh))
            }
            Process::Send(x, y, p, q) => {
                let (y2, payload) = freshen_binder(y, p, taken, fresh);
                Process::send(
                    x.clone(),
                    y2,
                    payload.rename_apart_in(taken, fresh),
                    q.rename_apart_in(taken, fresh),
                )
            }
            Process::MCut(m) => {
                let mut cut_names = m.cut_names.clone();
                let mut fwd_ctx = m.fwd_ctx.clone();
                let mut forwarder = m.forwarder.clone();
                let mut transit = m.transit.clone();
                let mut parts = m.parts.clone();
                for i in 0..cut_names.len() {
                    let old = cut_names[i].clone();
                    if !taken.insert(old.clone()) {
                        let new = fresh.fresh(old.as_str(), taken);
                        taken.insert(new.clone());
                        forwarder = forwarder.rename_free(&old, &new);
                        fwd_ctx = rename_ctx_endpoint(&fwd_ctx, &old, &new);
                        parts[i] = parts[i].rename_free(&old, &new);
                        cut_names[i] = new;
                    }
                }
                for j in 0..transit.len() {
                    let old = transit[j].0.clone();
                    if !taken.insert(old.clone()) {
                        let new = fresh.fresh(old.as_str(), taken);
                        taken.insert(new.clone());
                        forwarder = forwarder.rename_free(&old, &new);
                        fwd_ctx = rename_ctx_msg(&fwd_ctx, &old, &new);
                        let body = transit[j].1.rename_free(&old, &new);
                        transit[j] = (new, body);
                    }
                }
                let forwarder = forwarder.rename_apart_in(taken, fresh);
                let transit = transit
                    .into_iter()
                    .map(|(y, p)| {
                        let p = p.rename_apart_in(taken, fresh);
                        (y, p)
                    })
                    .collect();
                let parts = parts
                    .into_iter()
                    .map(|p| p.rename_apart_in(taken, fresh))
                    .collect();
                Process::mcut(MCut { cut_names, fwd_ctx, forwarder, transit, parts })
            }
        }
    }
}

fn freshen_binder(
    y: &Name,
    body: &Process,
    taken: &mut BTreeSet<Name>,
    fresh: &mut FreshNames,
) -> (Name, Process) {
    if taken.insert(y.clone()) {
        (y.clone(), body.clone())
    } else {
        let y2 = fresh.fresh(y.as_str(), taken);
        taken.insert(y2.clone());
        (y2.clone(), body.rename_free(y, &y2))
    }
}

/// Rename an endpoint of a context: its key, and every annotation or queue
/// target pointing at it.
pub(crate) fn rename_ctx_endpoint(ctx: &Context, from: &Name, to: &Name) -> Context {
    let r = |n: &Name| if n == from { to.clone() } else { n.clone() };
    Context::build(ctx.iter().map(|(n, st)| {
        let usage = match &st.usage {
            Usage::Active(t) => Usage::Active(rename_type_targets(t, from, to)),
            Usage::Done => Usage::Done,
        };
        let mut queue = crate::queue::Queue::new();
        for e in st.queue.entries() {
            queue.enqueue(crate::queue::QueueEntry::new(r(&e.target), e.payload));
        }
        (r(n), crate::context::EndpointState { queue, usage })
    }))
    .expect("renaming preserves well-formedness")
}

/// Rename a queued message name (a transit name) inside a context.
pub(crate) fn rename_ctx_msg(ctx: &Context, from: &Name, to: &Name) -> Context {
    Context::build(ctx.iter().map(|(n, st)| {
        let mut queue = crate::queue::Queue::new();
        for e in st.queue.entries() {
            let payload = match e.payload {
                QueuePayload::Msg(m, t) if m == *from => QueuePayload::Msg(to.clone(), t),
                p => p,
            };
            queue.enqueue(crate::queue::QueueEntry::new(e.target, payload));
        }
        (n.clone(), crate::context::EndpointState { queue, usage: st.usage.clone() })
    }))
    .expect("renaming preserves well-formedness")
}

fn rename_type_targets(t: &crate::syntax::AnnType, from: &Name, to: &Name) -> crate::syntax::AnnType {
    use crate::syntax::AnnType as A;
    let r = |n: &Name| if n == from { to.clone() } else { n.clone() };
    match t {
        A::Atom(a) => A::Atom(a.clone()),
        A::DualAtom(a) => A::DualAtom(a.clone()),
        A::One(us) => A::One(us.iter().map(|u| r(u)).collect()),
        A::Bot(u) => A::Bot(r(u)),
        A::Tensor(l, u, rt) => A::tensor((**l).clone(), r(u), rename_type_targets(rt, from, to)),
        A::Par(l, u, rt) => A::par((**l).clone(), r(u), rename_type_targets(rt, from, to)),
        A::Plus(l, u, rt) => A::plus(
            rename_type_targets(l, from, to),
            r(u),
            rename_type_targets(rt, from, to),
        ),
        A::With(l, u, rt) => A::with(
            rename_type_targets(l, from, to),
            r(u),
            rename_type_targets(rt, from, to),
        ),
    }
}

fn alpha_eq_in(p: &Process, q: &Process, pairs: &mut Vec<(Name, Name)>) -> bool {
    fn matches(pairs: &[(Name, Name)], a: &Name, b: &Name) -> bool {
        for (x, y) in pairs.iter().rev() {
            if x == a || y == b {
                return x == a && y == b;
            }
        }
        a == b
    }
    match (p, q) {
        (Process::Link(a, b), Process::Link(c, d)) => {
            (matches(pairs, a, c) && matches(pairs, b, d))
                || (matches(pairs, a, d) && matches(pairs, b, c))
        }
        (Process::Close(a), Process::Close(b)) => matches(pairs, a, b),
        (Process::Wait(a, p1), Process::Wait(b, q1))
        | (Process::Inl(a, p1), Process::Inl(b, q1))
        | (Process::Inr(a, p1), Process::Inr(b, q1)) => {
            matches(pairs, a, b) && alpha_eq_in(p1, q1, pairs)
        }
        (Process::Case(a, p1, p2), Process::Case(b, q1, q2)) => {
            matches(pairs, a, b) && alpha_eq_in(p1, q1, pairs) && alpha_eq_in(p2, q2, pairs)
        }
        (Process::Recv(a, y1, p1), Process::Recv(b, y2, q1)) => {
            if !matches(pairs, a, b) {
                return false;
            }
            pairs.push((y1.clone(), y2.clone()));
            let ok = alpha_eq_in(p1, q1, pairs);
            pairs.pop();
            ok
        }
        (Process::Send(a, y1, p1, p2), Process::Send(b, y2, q1, q2)) => {
            if !matches(pairs, a, b) {
                return false;
            }
            pairs.push((y1.clone(), y2.clone()));
            let ok = alpha_eq_in(p1, q1, pairs);
            pairs.pop();
            ok && alpha_eq_in(p2, q2, pairs)
        }
        (Process::MCut(m1), Process::MCut(m2)) => {
            if m1.cut_names.len() != m2.cut_names.len()
                || m1.transit.len() != m2.transit.len()
                || m1.parts.len() != m2.parts.len()
            {
                return false;
            }
            // Compare binders positionally; context equality is required up
            // to the same renaming, which we approximate by renaming list
            // binders of m2 into those of m1.
            let mut other = (**m2).clone();
            for (a, b) in m1.cut_names.iter().zip(m2.cut_names.clone()) {
                if *a != b {
                    other = rename_mcut_cut(&other, &b, a);
                }
            }
            for ((a, _), (b, _)) in m1.transit.iter().zip(m2.transit.clone()) {
                if *a != b {
                    other = rename_mcut_transit(&other, &b, a);
                }
            }
            m1.fwd_ctx == other.fwd_ctx
                && alpha_eq_in(&m1.forwarder, &other.forwarder, pairs)
                && m1
                    .transit
                    .iter()
                    .zip(other.transit.iter())
                    .all(|((_, p1), (_, q1))| alpha_eq_in(p1, q1, pairs))
                && m1
                    .parts
                    .iter()
                    .zip(other.parts.iter())
                    .all(|(p1, q1)| alpha_eq_in(p1, q1, pairs))
        }
        _ => false,
    }
}

fn rename_mcut_cut(m: &MCut, from: &Name, to: &Name) -> MCut {
    MCut {
        cut_names: m
            .cut_names
            .iter()
            .map(|n| if n == from { to.clone() } else { n.clone() })
            .collect(),
        fwd_ctx: rename_ctx_endpoint(&m.fwd_ctx, from, to),
        forwarder: m.forwarder.rename_free(from, to),
        transit: m.transit.clone(),
        parts: m.parts.iter().map(|p| p.rename_free(from, to)).collect(),
    }
}

fn rename_mcut_transit(m: &MCut, from: &Name, to: &Name) -> MCut {
    MCut {
        cut_names: m.cut_names.clone(),
        fwd_ctx: rename_ctx_msg(&m.fwd_ctx, from, to),
        forwarder: m.forwarder.rename_free(from, to),
        transit: m
            .transit
            .iter()
            .map(|(y, p)| {
                if y == from {
                    (to.clone(), p.rename_free(from, to))
                } else {
                    (y.clone(), p.clone())
                }
            })
            .collect(),
        parts: m.parts.clone(),
    }
}

/// Deterministic fresh-name supply: a monotone counter suffixing a base.
#[derive(Clone, Debug)]
pub struct FreshNames {
    next: u64,
}

impl FreshNames {
    pub fn new() -> Self {
        FreshNames { next: 1 }
    }

    /// Start the counter at `seed` (the CLI's `--seed`).
    pub fn seeded(seed: u64) -> Self {
        FreshNames { next: seed.max(1) }
    }

    /// First `base<k>` not in `avoid`, advancing the counter past it.
    pub fn fresh(&mut self, base: &str, avoid: &BTreeSet<Name>) -> Name {
        loop {
            let candidate = Name::new(format!("{base}{}", self.next));
            self.next += 1;
            if !avoid.contains(&candidate) {
                return candidate;
            }
        }
    }
}

impl Default for FreshNames {
    fn default() -> Self {
        FreshNames::new()
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Link(x, y) => write!(f, "fwd {x} {y}"),
            Process::Close(x) => write!(f, "close {x}"),
            Process::Wait(x, p) => write!(f, "wait {x}. {p}"),
            Process::Send(x, y, p, q) => write!(f, "out {x}[{y}]({p})({q})"),
            Process::Recv(x, y, p) => write!(f, "in {x}({y}). {p}"),
            Process::Inl(x, p) => write!(f, "inl {x}. {p}"),
            Process::Inr(x, p) => write!(f, "inr {x}. {p}"),
            Process::Case(x, p, q) => write!(f, "case {x} ({p})({q})"),
            Process::MCut(m) => {
                write!(f, "mcut [")?;
                for (i, n) in m.cut_names.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{n}")?;
                }
                write!(f, "] ctx: {} fwd: {}", m.fwd_ctx, m.forwarder)?;
                if !m.transit.is_empty() {
                    write!(f, " transit: [")?;
                    for (i, (y, p)) in m.transit.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{y} = {p}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, " parts: (")?;
                for (i, p) in m.parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    fn link(a: &str, b: &str) -> Process {
        Process::Link(name(a), name(b))
    }

    #[test]
    fn free_names_respect_binders() {
        assert_eq!(
            link("x", "y").free_names(),
            BTreeSet::from([name("x"), name("y")])
        );
        let p = Process::recv(name("x"), name("y"), link("y", "z"));
        assert_eq!(p.free_names(), BTreeSet::from([name("x"), name("z")]));
        let q = Process::send(name("x"), name("y"), link("y", "u"), Process::Close(name("x")));
        assert_eq!(q.free_names(), BTreeSet::from([name("x"), name("u")]));
    }

    #[test]
    fn alpha_eq_and_link_symmetry() {
        let p = Process::recv(name("x"), name("y"), link("y", "z"));
        let q = Process::recv(name("x"), name("w"), link("w", "z"));
        assert!(p.alpha_eq(&q));
        assert!(link("x", "y").alpha_eq(&link("y", "x")));
        let r = Process::wait(name("x"), Process::Close(name("y")));
        assert!(!Process::Close(name("x")).alpha_eq(&r));
    }

    #[test]
    fn rename_apart_avoids_and_preserves() {
        let p = Process::recv(name("x"), name("y"), link("y", "z"));
        let mut fresh = FreshNames::new();
        let avoid = BTreeSet::from([name("y")]);
        let q = p.rename_apart(&avoid, &mut fresh);
        assert_eq!(q, Process::recv(name("x"), name("y1"), link("y1", "z")));
        assert!(p.alpha_eq(&q));
        assert_eq!(p.free_names(), q.free_names());
        assert_eq!(p.size(), q.size());

        // Idempotent when already apart.
        let mut fresh2 = FreshNames::new();
        let r = q.rename_apart(&BTreeSet::new(), &mut fresh2);
        assert_eq!(q, r);
    }

    #[test]
    fn rename_apart_distinct_binders() {
        // Two binders with the same name must come out distinct.
        let p = Process::recv(
            name("x"),
            name("y"),
            Process::recv(name("z"), name("y"), link("y", "w")),
        );
        let mut fresh = FreshNames::new();
        let q = p.rename_apart(&BTreeSet::new(), &mut fresh);
        if let Process::Recv(_, y1, body) = &q {
            if let Process::Recv(_, y2, _) = &**body {
                assert_ne!(y1, y2);
                return;
            }
        }
        panic!("shape changed");
    }
}
