//! Typing contexts: a queue and a usage state per endpoint.
//!
//! A context entry is either `Active` with an annotated type, or `Done`: the
//! endpoint's own session has finished but its queue may still hold items to
//! forward. Contexts are closed by construction — every forwarding target
//! written in a type or queue entry must name an endpoint of the context.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::queue::{Queue, QueuePayload};
use crate::syntax::{erase, AnnType, Name, PlainType};

/// Usage state of an endpoint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Usage {
    Active(AnnType),
    Done,
}

impl Usage {
    pub fn active(&self) -> Option<&AnnType> {
        match self {
            Usage::Active(t) => Some(t),
            Usage::Done => None,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, Usage::Done)
    }
}

/// Queue plus usage for a single endpoint.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndpointState {
    pub queue: Queue,
    pub usage: Usage,
}

impl EndpointState {
    pub fn active(ty: AnnType) -> Self {
        EndpointState { queue: Queue::new(), usage: Usage::Active(ty) }
    }

    pub fn done(queue: Queue) -> Self {
        EndpointState { queue, usage: Usage::Done }
    }

    pub fn with_queue(queue: Queue, ty: AnnType) -> Self {
        EndpointState { queue, usage: Usage::Active(ty) }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ContextError {
    #[error("duplicate name {0}")]
    DuplicateName(Name),
    #[error("annotation target {0} does not name an endpoint of the context")]
    UnknownTarget(Name),
    #[error("annotation list of 1 repeats name {0}")]
    RepeatedGatherName(Name),
}

/// A forwarder typing context: finitely many named endpoints, each with a
/// queue and a usage state. Iteration order is lexicographic by name.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Context {
    entries: BTreeMap<Name, EndpointState>,
}

impl Context {
    pub fn empty() -> Self {
        Context::default()
    }

    /// Build and validate: names distinct, annotation lists duplicate-free,
    /// and every target resolvable within the context.
    pub fn build(
        pairs: impl IntoIterator<Item = (Name, EndpointState)>,
    ) -> Result<Self, ContextError> {
        let mut entries = BTreeMap::new();
        for (n, st) in pairs {
            if entries.insert(n.clone(), st).is_some() {
                return Err(ContextError::DuplicateName(n));
            }
        }
        let ctx = Context { entries };
        ctx.check_closed()?;
        Ok(ctx)
    }

    /// Convenience constructor: all endpoints active with empty queues.
    pub fn of_types(
        pairs: impl IntoIterator<Item = (Name, AnnType)>,
    ) -> Result<Self, ContextError> {
        Context::build(pairs.into_iter().map(|(n, t)| (n, EndpointState::active(t))))
    }

    fn check_closed(&self) -> Result<(), ContextError> {
        for st in self.entries.values() {
            if let Usage::Active(t) = &st.usage {
                if let AnnType::One(us) = t {
                    let mut seen = std::collections::BTreeSet::new();
                    for u in us {
                        if !seen.insert(u) {
                            return Err(ContextError::RepeatedGatherName(u.clone()));
                        }
                    }
                }
                for u in t.targets() {
                    if !self.entries.contains_key(u) {
                        return Err(ContextError::UnknownTarget(u.clone()));
                    }
                }
            }
            for t in st.queue.targets() {
                if !self.entries.contains_key(t) {
                    return Err(ContextError::UnknownTarget(t.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, n: &Name) -> Option<&EndpointState> {
        self.entries.get(n)
    }

    pub fn get_mut(&mut self, n: &Name) -> Option<&mut EndpointState> {
        self.entries.get_mut(n)
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.entries.contains_key(n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &EndpointState)> {
        self.entries.iter()
    }

    /// Names of all `Active` endpoints, in order.
    pub fn active_names(&self) -> Vec<Name> {
        self.entries
            .iter()
            .filter(|(_, st)| !st.usage.is_done())
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Replace the type of an active endpoint.
    pub(crate) fn set_type(&mut self, n: &Name, ty: AnnType) {
        if let Some(st) = self.entries.get_mut(n) {
            st.usage = Usage::Active(ty);
        }
    }

    pub(crate) fn insert(&mut self, n: Name, st: EndpointState) {
        self.entries.insert(n, st);
    }

    /// Termination measure: active type sizes plus queued message weights.
    /// Strictly decreases along every forwarder rule premise.
    pub fn measure(&self) -> usize {
        self.entries
            .values()
            .map(|st| {
                let ty = st.usage.active().map_or(0, AnnType::size);
                ty + st.queue.weight()
            })
            .sum()
    }

    /// True if no type or queued message mentions a `Plus`/`With`.
    pub fn is_multiplicative(&self) -> bool {
        self.entries.values().all(|st| {
            st.usage.active().map_or(true, AnnType::is_multiplicative)
                && st.queue.payloads().all(|p| match p {
                    QueuePayload::Msg(_, t) => t.is_multiplicative(),
                    QueuePayload::Left | QueuePayload::Right => false,
                    QueuePayload::Star => true,
                })
        })
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ ")?;
        for (i, (n, st)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            match &st.usage {
                Usage::Active(t) => write!(f, "{n} : {t}")?,
                Usage::Done => write!(f, "{n} : .")?,
            }
            if !st.queue.is_empty() {
                write!(f, " queue {}", st.queue)?;
            }
        }
        write!(f, " }}")
    }
}

/// A plain typing context: distinct names mapped to plain types.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CpContext {
    entries: BTreeMap<Name, PlainType>,
}

impl CpContext {
    pub fn empty() -> Self {
        CpContext::default()
    }

    pub fn build(
        pairs: impl IntoIterator<Item = (Name, PlainType)>,
    ) -> Result<Self, ContextError> {
        let mut entries = BTreeMap::new();
        for (n, t) in pairs {
            if entries.insert(n.clone(), t).is_some() {
                return Err(ContextError::DuplicateName(n));
            }
        }
        Ok(CpContext { entries })
    }

    pub fn get(&self, n: &Name) -> Option<&PlainType> {
        self.entries.get(n)
    }

    pub fn contains(&self, n: &Name) -> bool {
        self.entries.contains_key(n)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &PlainType)> {
        self.entries.iter()
    }

    pub(crate) fn insert(&mut self, n: Name, t: PlainType) -> Option<PlainType> {
        self.entries.insert(n, t)
    }

    pub(crate) fn remove(&mut self, n: &Name) -> Option<PlainType> {
        self.entries.remove(n)
    }

    /// Keep only the named endpoints.
    pub fn restrict(&self, keep: &std::collections::BTreeSet<Name>) -> CpContext {
        CpContext {
            entries: self
                .entries
                .iter()
                .filter(|(n, _)| keep.contains(*n))
                .map(|(n, t)| (n.clone(), t.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for CpContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ ")?;
        for (i, (n, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n} : {t}")?;
        }
        write!(f, " }}")
    }
}

/// Erase a forwarder context to a plain one, following the embedding:
/// active endpoints keep their erased type, done endpoints vanish, queued
/// messages contribute their own binding, and markers contribute nothing.
pub fn erase_context(ctx: &Context) -> Result<CpContext, ContextError> {
    let mut out = CpContext::empty();
    for (n, st) in ctx.iter() {
        if let Usage::Active(t) = &st.usage {
            if out.insert(n.clone(), erase(t)).is_some() {
                return Err(ContextError::DuplicateName(n.clone()));
            }
        }
        for p in st.queue.payloads() {
            if let QueuePayload::Msg(m, t) = p {
                if out.insert(m.clone(), t.clone()).is_some() {
                    return Err(ContextError::DuplicateName(m.clone()));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::QueueEntry;
    use crate::syntax::{annotate, name};

    #[test]
    fn build_rejects_unknown_targets() {
        let err = Context::of_types([(name("x"), AnnType::Bot(name("z")))]).unwrap_err();
        assert_eq!(err, ContextError::UnknownTarget(name("z")));
    }

    #[test]
    fn erase_context_of_active_endpoint() {
        let a = PlainType::par(PlainType::atom("a"), PlainType::One);
        let ctx = Context::build([
            (name("x"), EndpointState::active(annotate(&a, &name("y")))),
            (name("y"), EndpointState::active(AnnType::Atom(name("b")))),
        ])
        .unwrap();
        let cp = erase_context(&ctx).unwrap();
        assert_eq!(cp.get(&name("x")), Some(&a));
        assert_eq!(cp.get(&name("y")), Some(&PlainType::atom("b")));
    }

    #[test]
    fn erase_context_drops_done_and_star() {
        let ctx = Context::build([
            (name("y"), EndpointState::active(AnnType::One(vec![name("x")]))),
            (
                name("x"),
                EndpointState::done(Queue::from_entries([QueueEntry::star(name("y"))])),
            ),
        ])
        .unwrap();
        let cp = erase_context(&ctx).unwrap();
        assert_eq!(cp.len(), 1);
        assert_eq!(cp.get(&name("y")), Some(&PlainType::One));
    }

    #[test]
    fn erase_context_lifts_queued_messages() {
        let t = annotate(&PlainType::atom("c"), &name("y"));
        let ctx = Context::build([
            (
                name("x"),
                EndpointState::with_queue(
                    Queue::from_entries([QueueEntry::msg(
                        name("y"),
                        name("u"),
                        PlainType::dual_atom("name"),
                    )]),
                    t,
                ),
            ),
            (name("y"), EndpointState::active(AnnType::Atom(name("d")))),
        ])
        .unwrap();
        let cp = erase_context(&ctx).unwrap();
        assert_eq!(cp.get(&name("u")), Some(&PlainType::dual_atom("name")));
        assert_eq!(cp.get(&name("x")), Some(&PlainType::atom("c")));
        assert_eq!(cp.len(), 3);
    }

    #[test]
    fn erase_context_duplicate_message_name_fails() {
        let ctx = Context::build([
            (
                name("x"),
                EndpointState::with_queue(
                    Queue::from_entries([QueueEntry::msg(name("x"), name("x"), PlainType::One)]),
                    AnnType::Atom(name("a")),
                ),
            ),
        ])
        .unwrap();
        assert!(matches!(erase_context(&ctx), Err(ContextError::DuplicateName(_))));
    }
}
