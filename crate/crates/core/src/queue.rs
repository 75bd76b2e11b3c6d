//! Per-endpoint queues of boxed in-transit items.
//!
//! Each entry carries the endpoint it must eventually be forwarded to.
//! Entries bound for distinct targets commute freely; for a fixed target the
//! arrival order is significant and preserved. Queues are therefore stored
//! canonically as one FIFO per target, which makes the commuting equivalence
//! definitional: two raw entry sequences are equivalent exactly when they
//! canonicalise to the same value.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;

use crate::syntax::{Name, PlainType};

/// One boxed item: a close token, a choice marker, or a message.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum QueuePayload {
    Star,
    Left,
    Right,
    Msg(Name, PlainType),
}

impl QueuePayload {
    /// Size contribution for termination measures: message payloads weigh
    /// their type size, bare markers weigh nothing (a marker is never
    /// decomposed further, only discharged).
    pub fn weight(&self) -> usize {
        match self {
            QueuePayload::Msg(_, t) => t.size(),
            _ => 0,
        }
    }
}

/// A payload together with its forwarding target.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QueueEntry {
    pub target: Name,
    pub payload: QueuePayload,
}

impl QueueEntry {
    pub fn new(target: Name, payload: QueuePayload) -> Self {
        QueueEntry { target, payload }
    }

    pub fn star(target: Name) -> Self {
        QueueEntry::new(target, QueuePayload::Star)
    }

    pub fn msg(target: Name, name: Name, ty: PlainType) -> Self {
        QueueEntry::new(target, QueuePayload::Msg(name, ty))
    }
}

/// Canonical queue: a FIFO of payloads per forwarding target.
///
/// Empty FIFOs are never stored, so structural equality coincides with the
/// commuting equivalence on raw entry sequences.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Queue {
    fifos: BTreeMap<Name, VecDeque<QueuePayload>>,
}

impl Queue {
    pub fn new() -> Self {
        Queue::default()
    }

    /// Canonicalise a raw entry sequence (oldest first).
    pub fn from_entries(entries: impl IntoIterator<Item = QueueEntry>) -> Self {
        let mut q = Queue::new();
        for e in entries {
            q.enqueue(e);
        }
        q
    }

    /// Append `entry` at the back of its target's FIFO.
    pub fn enqueue(&mut self, entry: QueueEntry) {
        self.fifos.entry(entry.target).or_default().push_back(entry.payload);
    }

    /// Head of the FIFO for `target`, if any, without removing it.
    pub fn peek_for(&self, target: &Name) -> Option<&QueuePayload> {
        self.fifos.get(target).and_then(|f| f.front())
    }

    /// Remove and return the FIFO head for `target`.
    pub fn pop_for(&mut self, target: &Name) -> Option<QueuePayload> {
        let fifo = self.fifos.get_mut(target)?;
        let head = fifo.pop_front();
        if fifo.is_empty() {
            self.fifos.remove(target);
        }
        head
    }

    /// Functional form of [`Queue::pop_for`]: the removed head and the rest.
    pub fn dequeue_for(&self, target: &Name) -> Option<(QueuePayload, Queue)> {
        let mut rest = self.clone();
        let head = rest.pop_for(target)?;
        Some((head, rest))
    }

    pub fn is_empty(&self) -> bool {
        self.fifos.is_empty()
    }

    /// Total number of queued items.
    pub fn len(&self) -> usize {
        self.fifos.values().map(VecDeque::len).sum()
    }

    /// All entries in canonical display order: targets alphabetically, each
    /// FIFO oldest first. Raw arrival interleavings across targets are not
    /// recoverable, by design.
    pub fn entries(&self) -> Vec<QueueEntry> {
        self.fifos
            .iter()
            .flat_map(|(t, fifo)| {
                fifo.iter().map(move |p| QueueEntry::new(t.clone(), p.clone()))
            })
            .collect()
    }

    /// The multiset of payloads, ignoring targets.
    pub fn payloads(&self) -> impl Iterator<Item = &QueuePayload> {
        self.fifos.values().flatten()
    }

    /// Targets that currently have a nonempty FIFO.
    pub fn targets(&self) -> impl Iterator<Item = &Name> {
        self.fifos.keys()
    }

    /// Sum of payload weights, used by termination measures.
    pub fn weight(&self) -> usize {
        self.payloads().map(QueuePayload::weight).sum()
    }
}

impl fmt::Display for Queue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for QueueEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            QueuePayload::Star => write!(f, "[{}]*", self.target),
            QueuePayload::Left => write!(f, "[{}]l", self.target),
            QueuePayload::Right => write!(f, "[{}]r", self.target),
            QueuePayload::Msg(n, t) => write!(f, "[{}] {} : {}", self.target, n, t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    #[test]
    fn enqueue_preserves_fifo_order_per_target() {
        let mut q = Queue::new();
        q.enqueue(QueueEntry::msg(name("y"), name("u"), PlainType::atom("a")));
        q.enqueue(QueueEntry::msg(name("y"), name("v"), PlainType::atom("b")));
        let (head, rest) = q.dequeue_for(&name("y")).unwrap();
        assert_eq!(head, QueuePayload::Msg(name("u"), PlainType::atom("a")));
        assert_eq!(
            rest.peek_for(&name("y")),
            Some(&QueuePayload::Msg(name("v"), PlainType::atom("b")))
        );
    }

    #[test]
    fn dequeue_missing_target_is_none() {
        let q = Queue::from_entries([QueueEntry::star(name("y"))]);
        assert!(q.dequeue_for(&name("z")).is_none());
        let (head, rest) = q.dequeue_for(&name("y")).unwrap();
        assert_eq!(head, QueuePayload::Star);
        assert!(rest.is_empty());
    }

    #[test]
    fn independent_targets_commute_same_target_order_matters() {
        let a = QueueEntry::msg(name("y"), name("u"), PlainType::atom("a"));
        let b = QueueEntry::msg(name("z"), name("v"), PlainType::atom("b"));
        let q1 = Queue::from_entries([a.clone(), b.clone()]);
        let q2 = Queue::from_entries([b, a]);
        assert_eq!(q1, q2);

        let c = QueueEntry::msg(name("y"), name("u"), PlainType::atom("a"));
        let d = QueueEntry::msg(name("y"), name("v"), PlainType::atom("b"));
        let q3 = Queue::from_entries([c.clone(), d.clone()]);
        let q4 = Queue::from_entries([d, c]);
        assert_ne!(q3, q4);
    }
}
