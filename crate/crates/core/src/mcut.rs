//! The multi-cut reduction engine.
//!
//! A validated composition `mcut [x1..xn] ctx: Γ fwd: Q transit: [ỹ ◁ P̃]
//! parts: (R1 | .. | Rn)` is executed by repeatedly firing one reduction:
//! the forwarder is the scheduler, so its outermost action picks the
//! principal redex; when the matched part is not ready (its own outermost
//! prefix acts on an external endpoint), the composition commutes under
//! that prefix instead. Inner compositions spawned by message delivery are
//! normalised eagerly: the engine always reduces the innermost composition
//! first.
//!
//! Termination is witnessed at run time: every step must lexicographically
//! decrease (sum of cut-type sizes, sum of part sizes) of the composition
//! it rewrites, and a violation is reported as an engine bug rather than
//! silently looping.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::context::Usage;
use crate::process::{MCut, Process};
use crate::queue::{QueueEntry, QueuePayload};
use crate::syntax::{annotate, dual, AnnType, Name};

pub use crate::cp::validate_mcut;

/// What a single reduction did.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StepKind {
    /// A part sent into the forwarder; the payload went in transit.
    SendMsg,
    /// The forwarder delivered a transit process to a receiving part,
    /// spawning a smaller inner composition.
    RecvMsg,
    /// A part closed against a waiting forwarder.
    CloseWait,
    /// The forwarder closed against the last waiting part (terminal).
    WaitClose,
    /// A part offered a choice and the forwarder picked a branch.
    ChoiceOffer,
    /// A part selected a branch of the forwarder's offer.
    ChoiceSelect,
    /// A link forwarder collapsed two link parts (terminal).
    AxCollapse,
    /// The composition moved under a part's external prefix.
    Commute,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StepKind::SendMsg => "SendMsg",
            StepKind::RecvMsg => "RecvMsg",
            StepKind::CloseWait => "CloseWait",
            StepKind::WaitClose => "WaitClose",
            StepKind::ChoiceOffer => "ChoiceOffer",
            StepKind::ChoiceSelect => "ChoiceSelect",
            StepKind::AxCollapse => "AxCollapse",
            StepKind::Commute => "Commute",
        };
        f.write_str(s)
    }
}

/// One reduction: what happened, the endpoints involved, and the whole
/// process afterwards.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TraceEntry {
    pub kind: StepKind,
    pub endpoints: Vec<Name>,
    pub result: Process,
}

/// The sequence of reductions of one run; consecutive entries are related
/// by exactly one step.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RunTrace {
    pub entries: Vec<TraceEntry>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.entries.iter().map(|e| e.kind).collect()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum RunError {
    #[error("stuck: {0}")]
    Stuck(String),
    #[error("termination measure violated: {0}")]
    MeasureViolation(String),
}

/// `(sum of cut-type sizes, sum of part sizes)` of a composition.
pub fn mcut_measure(m: &MCut) -> (usize, usize) {
    let types = m
        .cut_names
        .iter()
        .map(|x| match &m.fwd_ctx.get(x).map(|st| &st.usage) {
            Some(Usage::Active(t)) => t.size(),
            _ => 0,
        })
        .sum();
    let parts = m.parts.iter().map(Process::size).sum();
    (types, parts)
}

/// Does the process still contain a composition node?
pub fn is_cut_free(p: &Process) -> bool {
    match p {
        Process::Link(..) | Process::Close(_) => true,
        Process::Wait(_, p) | Process::Recv(_, _, p) | Process::Inl(_, p) | Process::Inr(_, p) => {
            is_cut_free(p)
        }
        Process::Send(_, _, p, q) | Process::Case(_, p, q) => is_cut_free(p) && is_cut_free(q),
        Process::MCut(_) => false,
    }
}

/// Apply exactly one reduction at the innermost-leftmost composition.
/// Returns `None` when the process is already cut-free.
pub fn reduce_step(p: &Process) -> Result<Option<(TraceEntry, Process)>, RunError> {
    match rewrite_innermost(p)? {
        Some((kind, endpoints, next)) => {
            let entry = TraceEntry { kind, endpoints, result: next.clone() };
            Ok(Some((entry, next)))
        }
        None => Ok(None),
    }
}

/// Reduce to a cut-free process, recording the full trace.
///
/// Bound names are made apart first so deliveries never capture. The
/// composition must have been validated (see [`validate_mcut`]); on
/// validated input the engine cannot get stuck, and `Stuck` or
/// `MeasureViolation` indicate an engine bug or an unvalidated input.
pub fn normalize(p: &Process) -> Result<(Process, RunTrace), RunError> {
    normalize_seeded(p, 1)
}

/// [`normalize`] with an explicit fresh-name seed.
pub fn normalize_seeded(p: &Process, seed: u64) -> Result<(Process, RunTrace), RunError> {
    let mut fresh = crate::process::FreshNames::seeded(seed);
    let mut current = p.rename_apart(&BTreeSet::new(), &mut fresh);
    let mut trace = RunTrace::default();
    while let Some((entry, next)) = reduce_step(&current)? {
        trace.entries.push(entry);
        current = next;
    }
    debug_assert!(is_cut_free(&current));
    Ok((current, trace))
}

// ---------------------------------------------------------------------------
// Redex location

fn rewrite_innermost(p: &Process) -> Result<Option<(StepKind, Vec<Name>, Process)>, RunError> {
    match p {
        Process::Link(..) | Process::Close(_) => Ok(None),
        Process::Wait(x, b) => Ok(rewrite_innermost(b)?
            .map(|(k, ns, b2)| (k, ns, Process::wait(x.clone(), b2)))),
        Process::Inl(x, b) => Ok(rewrite_innermost(b)?
            .map(|(k, ns, b2)| (k, ns, Process::inl(x.clone(), b2)))),
        Process::Inr(x, b) => Ok(rewrite_innermost(b)?
            .map(|(k, ns, b2)| (k, ns, Process::inr(x.clone(), b2)))),
        Process::Recv(x, y, b) => Ok(rewrite_innermost(b)?
            .map(|(k, ns, b2)| (k, ns, Process::recv(x.clone(), y.clone(), b2)))),
        Process::Send(x, y, pl, q) => {
            if let Some((k, ns, pl2)) = rewrite_innermost(pl)? {
                return Ok(Some((k, ns, Process::send(x.clone(), y.clone(), pl2, (**q).clone()))));
            }
            Ok(rewrite_innermost(q)?
                .map(|(k, ns, q2)| (k, ns, Process::send(x.clone(), y.clone(), (**pl).clone(), q2))))
        }
        Process::Case(x, l, r) => {
            if let Some((k, ns, l2)) = rewrite_innermost(l)? {
                return Ok(Some((k, ns, Process::case(x.clone(), l2, (**r).clone()))));
            }
            Ok(rewrite_innermost(r)?
                .map(|(k, ns, r2)| (k, ns, Process::case(x.clone(), (**l).clone(), r2))))
        }
        Process::MCut(m) => {
            for (i, part) in m.parts.iter().enumerate() {
                if let Some((k, ns, part2)) = rewrite_innermost(part)? {
                    let mut m2 = (**m).clone();
                    m2.parts[i] = part2;
                    return Ok(Some((k, ns, Process::mcut(m2))));
                }
            }
            for (j, (y, proc)) in m.transit.iter().enumerate() {
                if let Some((k, ns, proc2)) = rewrite_innermost(proc)? {
                    let mut m2 = (**m).clone();
                    m2.transit[j] = (y.clone(), proc2);
                    return Ok(Some((k, ns, Process::mcut(m2))));
                }
            }
            reduce_mcut_root(m).map(Some)
        }
    }
}

// ---------------------------------------------------------------------------
// The root reduction

fn reduce_mcut_root(m: &MCut) -> Result<(StepKind, Vec<Name>, Process), RunError> {
    let before = mcut_measure(m);
    let (kind, endpoints, result) = principal_or_commute(m)?;
    check_measures(before, &result, kind)?;
    Ok((kind, endpoints, result))
}

fn principal_or_commute(m: &MCut) -> Result<(StepKind, Vec<Name>, Process), RunError> {
    match try_principal(m)? {
        Some(step) => Ok(step),
        None => try_commute(m),
    }
}

fn part_index(m: &MCut, x: &Name) -> Option<usize> {
    m.cut_names.iter().position(|n| n == x)
}

fn try_principal(m: &MCut) -> Result<Option<(StepKind, Vec<Name>, Process)>, RunError> {
    match &m.forwarder {
        Process::Link(a, b) => {
            // Both sides must resolve to an external endpoint: through a
            // link part for cut names, directly for free atom endpoints.
            let resolve = |n: &Name| -> Result<Option<Name>, RunError> {
                match part_index(m, n) {
                    None => Ok(Some(n.clone())), // free atom endpoint
                    Some(i) => match &m.parts[i] {
                        Process::Link(p, q) if p == n => Ok(Some(q.clone())),
                        Process::Link(p, q) if q == n => Ok(Some(p.clone())),
                        Process::Link(..) => Err(RunError::Stuck(format!(
                            "link part does not mention its cut endpoint {n}"
                        ))),
                        _ => Ok(None), // not ready; commute
                    },
                }
            };
            match (resolve(a)?, resolve(b)?) {
                (Some(ea), Some(eb)) => Ok(Some((
                    StepKind::AxCollapse,
                    vec![a.clone(), b.clone()],
                    Process::Link(ea, eb),
                ))),
                _ => Ok(None),
            }
        }
        Process::Close(x) => {
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder closes non-cut endpoint {x}"
                )));
            };
            match &m.parts[i] {
                Process::Wait(w, body) if w == x => {
                    if m.parts.len() != 1 {
                        return Err(RunError::Stuck(
                            "closing forwarder with more than one part".into(),
                        ));
                    }
                    Ok(Some((StepKind::WaitClose, vec![x.clone()], (**body).clone())))
                }
                _ => Ok(None),
            }
        }
        Process::Wait(x, fwd_body) => {
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder waits on non-cut endpoint {x}"
                )));
            };
            match &m.parts[i] {
                Process::Close(w) if w == x => {
                    let target = match m.fwd_ctx.get(x).map(|st| &st.usage) {
                        Some(Usage::Active(AnnType::Bot(u))) => u.clone(),
                        _ => {
                            return Err(RunError::Stuck(format!(
                                "forwarder waits on {x} but its type is not bot"
                            )))
                        }
                    };
                    let mut next = (*m).clone();
                    next.forwarder = (**fwd_body).clone();
                    let st = next.fwd_ctx.get_mut(x).expect("cut endpoint present");
                    st.queue.enqueue(QueueEntry::star(target));
                    st.usage = Usage::Done;
                    next.cut_names.remove(i);
                    next.parts.remove(i);
                    Ok(Some((StepKind::CloseWait, vec![x.clone()], Process::mcut(next))))
                }
                _ => Ok(None),
            }
        }
        Process::Recv(x, y, fwd_body) => {
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder receives on non-cut endpoint {x}"
                )));
            };
            match &m.parts[i] {
                Process::Send(w, py, payload, cont) if w == x => {
                    let (left, target) = match m.fwd_ctx.get(x).map(|st| &st.usage) {
                        Some(Usage::Active(AnnType::Par(l, u, r))) => {
                            ((**l).clone(), (u.clone(), (**r).clone()))
                        }
                        _ => {
                            return Err(RunError::Stuck(format!(
                                "forwarder receives on {x} but its type is not par"
                            )))
                        }
                    };
                    let (u, right) = target;
                    let mut next = (*m).clone();
                    next.forwarder = (**fwd_body).clone();
                    {
                        let st = next.fwd_ctx.get_mut(x).expect("cut endpoint present");
                        st.queue.enqueue(QueueEntry::msg(u, y.clone(), left));
                        st.usage = Usage::Active(right);
                    }
                    next.transit.insert(0, (y.clone(), payload.rename_free(py, y)));
                    next.parts[i] = (**cont).clone();
                    Ok(Some((
                        StepKind::SendMsg,
                        vec![x.clone(), y.clone()],
                        Process::mcut(next),
                    )))
                }
                _ => Ok(None),
            }
        }
        Process::Send(x, y, payload, fwd_body) => {
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder sends on non-cut endpoint {x}"
                )));
            };
            match &m.parts[i] {
                Process::Recv(w, ry, body) if w == x => {
                    let (left, u, right) = match m.fwd_ctx.get(x).map(|st| &st.usage) {
                        Some(Usage::Active(AnnType::Tensor(l, u, r))) => {
                            ((**l).clone(), u.clone(), (**r).clone())
                        }
                        _ => {
                            return Err(RunError::Stuck(format!(
                                "forwarder sends on {x} but its type is not tensor"
                            )))
                        }
                    };
                    let mut next = (*m).clone();
                    let popped = next
                        .fwd_ctx
                        .get_mut(&u)
                        .and_then(|st| st.queue.pop_for(x));
                    let Some(QueuePayload::Msg(z, ztype)) = popped else {
                        return Err(RunError::Stuck(format!(
                            "no queued message at {u} for {x}"
                        )));
                    };
                    if ztype != dual(&left) {
                        return Err(RunError::Stuck(format!(
                            "queued message {z} has type {ztype}, expected {}",
                            dual(&left)
                        )));
                    }
                    let Some(j) = next.transit.iter().position(|(n, _)| n == &z) else {
                        return Err(RunError::Stuck(format!(
                            "no transit process for message {z}"
                        )));
                    };
                    let (_, delivered) = next.transit.remove(j);
                    // The spawned session: the receiving continuation meets
                    // the delivered message through the payload forwarder.
                    let inner_ctx = crate::context::Context::of_types([
                        (y.clone(), annotate(&left, &z)),
                        (z.clone(), annotate(&dual(&left), y)),
                    ])
                    .expect("two distinct endpoints");
                    let inner = MCut {
                        cut_names: vec![y.clone(), z.clone()],
                        fwd_ctx: inner_ctx,
                        forwarder: (**payload).clone(),
                        transit: Vec::new(),
                        parts: vec![body.rename_free(ry, y), delivered],
                    };
                    next.forwarder = (**fwd_body).clone();
                    next.fwd_ctx.set_type(x, right);
                    next.parts[i] = Process::mcut(inner);
                    Ok(Some((
                        StepKind::RecvMsg,
                        vec![x.clone(), z.clone()],
                        Process::mcut(next),
                    )))
                }
                _ => Ok(None),
            }
        }
        Process::Case(x, fwd_l, fwd_r) => {
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder offers on non-cut endpoint {x}"
                )));
            };
            let selected = match &m.parts[i] {
                Process::Inl(w, body) if w == x => Some((false, body)),
                Process::Inr(w, body) if w == x => Some((true, body)),
                _ => None,
            };
            let Some((is_right, part_body)) = selected else { return Ok(None) };
            let (lt, u, rt) = match m.fwd_ctx.get(x).map(|st| &st.usage) {
                Some(Usage::Active(AnnType::With(l, u, r))) => {
                    ((**l).clone(), u.clone(), (**r).clone())
                }
                _ => {
                    return Err(RunError::Stuck(format!(
                        "forwarder offers on {x} but its type is not with"
                    )))
                }
            };
            let mut next = (*m).clone();
            let (marker, branch_ty, branch_fwd) = if is_right {
                (QueuePayload::Right, rt, (**fwd_r).clone())
            } else {
                (QueuePayload::Left, lt, (**fwd_l).clone())
            };
            next.forwarder = branch_fwd;
            {
                let st = next.fwd_ctx.get_mut(x).expect("cut endpoint present");
                st.queue.enqueue(QueueEntry::new(u, marker));
                st.usage = Usage::Active(branch_ty);
            }
            next.parts[i] = (**part_body).clone();
            Ok(Some((StepKind::ChoiceSelect, vec![x.clone()], Process::mcut(next))))
        }
        Process::Inl(x, fwd_body) | Process::Inr(x, fwd_body) => {
            let is_right = matches!(&m.forwarder, Process::Inr(..));
            let Some(i) = part_index(m, x) else {
                return Err(RunError::Stuck(format!(
                    "forwarder selects on non-cut endpoint {x}"
                )));
            };
            match &m.parts[i] {
                Process::Case(w, bl, br) if w == x => {
                    let (lt, u, rt) = match m.fwd_ctx.get(x).map(|st| &st.usage) {
                        Some(Usage::Active(AnnType::Plus(l, u, r))) => {
                            ((**l).clone(), u.clone(), (**r).clone())
                        }
                        _ => {
                            return Err(RunError::Stuck(format!(
                                "forwarder selects on {x} but its type is not plus"
                            )))
                        }
                    };
                    let mut next = (*m).clone();
                    let popped = next
                        .fwd_ctx
                        .get_mut(&u)
                        .and_then(|st| st.queue.pop_for(x));
                    let expected = if is_right { QueuePayload::Right } else { QueuePayload::Left };
                    if popped.as_ref() != Some(&expected) {
                        return Err(RunError::Stuck(format!(
                            "no matching choice marker at {u} for {x}"
                        )));
                    }
                    next.forwarder = (**fwd_body).clone();
                    next.fwd_ctx.set_type(x, if is_right { rt } else { lt });
                    next.parts[i] = if is_right { (**br).clone() } else { (**bl).clone() };
                    Ok(Some((StepKind::ChoiceOffer, vec![x.clone()], Process::mcut(next))))
                }
                _ => Ok(None),
            }
        }
        Process::MCut(_) => Err(RunError::Stuck("forwarder is itself a composition".into())),
    }
}

/// Push the composition under the first part whose outermost prefix acts on
/// an external endpoint.
fn try_commute(m: &MCut) -> Result<(StepKind, Vec<Name>, Process), RunError> {
    for i in 0..m.parts.len() {
        if let Some(step) = commute_part(m, i) {
            return Ok(step);
        }
    }
    Err(RunError::Stuck(
        "no principal redex and no part with an external prefix".into(),
    ))
}

fn check_measures(
    before: (usize, usize),
    result: &Process,
    kind: StepKind,
) -> Result<(), RunError> {
    // Every composition at the top of the replacement must be strictly
    // smaller. The inner composition spawned by a delivery sits inside a
    // part of the outer one and is covered by its own future steps.
    let tops = top_mcuts(result);
    for m in tops {
        let after = mcut_measure(m);
        if after >= before {
            return Err(RunError::MeasureViolation(format!(
                "{kind}: {before:?} -> {after:?}"
            )));
        }
    }
    Ok(())
}

/// Compositions at the top of a step result: the root, or those directly
/// under the prefix a commute introduced.
fn top_mcuts(p: &Process) -> Vec<&MCut> {
    match p {
        Process::MCut(m) => vec![m],
        Process::Wait(_, b) | Process::Recv(_, _, b) | Process::Inl(_, b) | Process::Inr(_, b) => {
            match &**b {
                Process::MCut(m) => vec![m],
                _ => vec![],
            }
        }
        Process::Send(_, _, pl, q) => {
            let mut out = Vec::new();
            if let Process::MCut(m) = &**pl {
                out.push(&**m);
            }
            if let Process::MCut(m) = &**q {
                out.push(&**m);
            }
            out
        }
        Process::Case(_, l, r) => {
            let mut out = Vec::new();
            if let Process::MCut(m) = &**l {
                out.push(&**m);
            }
            if let Process::MCut(m) = &**r {
                out.push(&**m);
            }
            out
        }
        _ => vec![],
    }
}

/// Every applicable step of the root composition of `p`, principal first,
/// then one commute per eligible part. Used by confluence tests; the
/// deterministic engine always picks the first.
pub fn enumerate_root_steps(p: &Process) -> Result<Vec<(StepKind, Process)>, RunError> {
    let Process::MCut(m) = p else { return Ok(Vec::new()) };
    let mut out = Vec::new();
    if let Some((k, _, next)) = try_principal(m)? {
        out.push((k, next));
    }
    for i in 0..m.parts.len() {
        if let Some((k, _, next)) = commute_part(m, i) {
            out.push((k, next));
        }
    }
    Ok(out)
}

/// Push the composition under part `i`'s prefix, if that prefix acts on an
/// external endpoint.
fn commute_part(m: &MCut, i: usize) -> Option<(StepKind, Vec<Name>, Process)> {
    let part = &m.parts[i];
    let x = &m.cut_names[i];
    let rebuilt = |new_part: Process| {
        let mut m2 = m.clone();
        m2.parts[i] = new_part;
        Process::mcut(m2)
    };
    match part {
        Process::Wait(w, body) if w != x => Some((
            StepKind::Commute,
            vec![w.clone()],
            Process::wait(w.clone(), rebuilt((**body).clone())),
        )),
        Process::Recv(w, y, body) if w != x => Some((
            StepKind::Commute,
            vec![w.clone()],
            Process::recv(w.clone(), y.clone(), rebuilt((**body).clone())),
        )),
        Process::Inl(w, body) if w != x => Some((
            StepKind::Commute,
            vec![w.clone()],
            Process::inl(w.clone(), rebuilt((**body).clone())),
        )),
        Process::Inr(w, body) if w != x => Some((
            StepKind::Commute,
            vec![w.clone()],
            Process::inr(w.clone(), rebuilt((**body).clone())),
        )),
        Process::Send(w, y, payload, cont) if w != x => {
            let mut in_payload = payload.free_names();
            in_payload.remove(y);
            let next = if in_payload.contains(x) {
                Process::send(w.clone(), y.clone(), rebuilt((**payload).clone()), (**cont).clone())
            } else {
                Process::send(w.clone(), y.clone(), (**payload).clone(), rebuilt((**cont).clone()))
            };
            Some((StepKind::Commute, vec![w.clone()], next))
        }
        Process::Case(w, l, r) if w != x => Some((
            StepKind::Commute,
            vec![w.clone()],
            // The whole composition is duplicated into both branches,
            // mirroring the additive context duplication.
            Process::case(w.clone(), rebuilt((**l).clone()), rebuilt((**r).clone())),
        )),
        _ => None,
    }
}
