//! Transition semantics of typing contexts and the live-path check.
//!
//! The transitions mirror the forwarder rules with the process stripped
//! away: a par type enqueues a fresh message, a tensor consumes the matching
//! queue head, bot marks the endpoint done leaving a close token behind, and
//! the two closing shapes step to the terminal success state. Scoped to the
//! multiplicative fragment, exactly as the compatibility characterisation
//! is. There are no infinite runs — every step strictly shrinks the context
//! measure — so exhaustive search needs no fairness and no visited set.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::context::{Context, EndpointState, Usage};
use crate::process::FreshNames;
use crate::queue::{QueueEntry, QueuePayload};
use crate::syntax::{dual, AnnType, Name};

/// Transition labels. The symbol in a label is the *dual* of the connective
/// that fired: receiving on a par is the environment's tensor, and so on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Label {
    /// `x*u` — a par at `x` enqueued a message bound for `u`.
    ParStep(Name, Name),
    /// `x@u` — a tensor at `x` consumed the head of `u`'s queue.
    TensorStep(Name, Name),
    /// `x1u` — a bot at `x` enqueued a close token bound for `u`.
    BotStep(Name, Name),
    /// `x#[u1,..]` — the final gather into the unit at `x`.
    OneStep(Name, Vec<Name>),
    /// `x<->y` — the axiom on two dual atoms.
    AxStep(Name, Name),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::ParStep(x, u) => write!(f, "{x}*{u}"),
            Label::TensorStep(x, u) => write!(f, "{x}@{u}"),
            Label::BotStep(x, u) => write!(f, "{x}1{u}"),
            Label::OneStep(x, us) => {
                write!(f, "{x}#[")?;
                for (i, u) in us.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{u}")?;
                }
                write!(f, "]")
            }
            Label::AxStep(x, y) => write!(f, "{x}<->{y}"),
        }
    }
}

/// State of a run: still running, or successfully terminated.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LtsState {
    Running(Context),
    Success,
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum LtsError {
    #[error("context semantics is defined on the multiplicative fragment only")]
    NonMultiplicative,
}

/// All transitions enabled in `ctx`, in deterministic order.
///
/// Fresh message names invented by par steps take the first `m<k>` not
/// already used in the context.
pub fn step(ctx: &Context) -> Result<Vec<(Label, LtsState)>, LtsError> {
    if !ctx.is_multiplicative() {
        return Err(LtsError::NonMultiplicative);
    }
    let mut fresh = FreshNames::new();
    Ok(step_inner(ctx, &mut fresh))
}

fn used_names(ctx: &Context) -> BTreeSet<Name> {
    let mut used: BTreeSet<Name> = ctx.names().cloned().collect();
    for (_, st) in ctx.iter() {
        for p in st.queue.payloads() {
            if let QueuePayload::Msg(m, _) = p {
                used.insert(m.clone());
            }
        }
    }
    used
}

fn step_inner(ctx: &Context, fresh: &mut FreshNames) -> Vec<(Label, LtsState)> {
    let mut out = Vec::new();

    // Axiom: the whole context is two dual atoms with empty queues.
    if ctx.len() == 2 {
        let mut it = ctx.iter();
        let (n1, e1) = it.next().expect("two entries");
        let (n2, e2) = it.next().expect("two entries");
        if e1.queue.is_empty() && e2.queue.is_empty() {
            if let (Usage::Active(t1), Usage::Active(t2)) = (&e1.usage, &e2.usage) {
                let ok = matches!(
                    (t1, t2),
                    (AnnType::DualAtom(a), AnnType::Atom(b))
                    | (AnnType::Atom(a), AnnType::DualAtom(b)) if a == b
                );
                if ok {
                    out.push((Label::AxStep(n1.clone(), n2.clone()), LtsState::Success));
                }
            }
        }
    }

    for (x, st) in ctx.iter() {
        let Usage::Active(ty) = &st.usage else { continue };
        match ty {
            AnnType::One(gather) => {
                if !st.queue.is_empty() {
                    continue;
                }
                let others: BTreeSet<&Name> = ctx.names().filter(|n| *n != x).collect();
                let gather_set: BTreeSet<&Name> = gather.iter().collect();
                if gather_set != others {
                    continue;
                }
                let all_starred = others.iter().all(|u| {
                    let st = ctx.get(u).expect("present");
                    st.usage.is_done()
                        && matches!(
                            st.queue.entries().as_slice(),
                            [e] if e.payload == QueuePayload::Star && e.target == *x
                        )
                });
                if all_starred {
                    out.push((Label::OneStep(x.clone(), gather.clone()), LtsState::Success));
                }
            }
            AnnType::Bot(u) => {
                let mut next = ctx.clone();
                let mut queue = st.queue.clone();
                queue.enqueue(QueueEntry::star(u.clone()));
                next.insert(x.clone(), EndpointState::done(queue));
                out.push((Label::BotStep(x.clone(), u.clone()), LtsState::Running(next)));
            }
            AnnType::Par(a, u, b) => {
                let m = fresh.fresh("m", &used_names(ctx));
                let mut next = ctx.clone();
                let mut queue = st.queue.clone();
                queue.enqueue(QueueEntry::msg(u.clone(), m, (**a).clone()));
                next.insert(x.clone(), EndpointState::with_queue(queue, (**b).clone()));
                out.push((Label::ParStep(x.clone(), u.clone()), LtsState::Running(next)));
            }
            AnnType::Tensor(a, u, b) => {
                let Some(src) = ctx.get(u) else { continue };
                let Some(QueuePayload::Msg(_, t)) = src.queue.peek_for(x) else { continue };
                if *t != dual(a) {
                    continue;
                }
                let mut next = ctx.clone();
                next.get_mut(u).expect("present").queue.pop_for(x);
                next.set_type(x, (**b).clone());
                out.push((Label::TensorStep(x.clone(), u.clone()), LtsState::Running(next)));
            }
            AnnType::Atom(_) | AnnType::DualAtom(_) => {}
            AnnType::Plus(..) | AnnType::With(..) => unreachable!("checked multiplicative"),
        }
    }
    out
}

/// Depth-first search for a live path: a run reaching success on which every
/// queued item is eventually forwarded and every forwarding annotation is
/// eventually executed. Returns a witness label sequence, or `None`.
pub fn live_path(ctx: &Context) -> Result<Option<Vec<Label>>, LtsError> {
    if !ctx.is_multiplicative() {
        return Err(LtsError::NonMultiplicative);
    }
    let mut fresh = FreshNames::new();
    let mut states = vec![ctx.clone()];
    let mut labels = Vec::new();
    if dfs(ctx, &mut fresh, &mut states, &mut labels) {
        debug_assert!(path_is_live(&states, &labels));
        Ok(Some(labels))
    } else {
        Ok(None)
    }
}

fn dfs(
    ctx: &Context,
    fresh: &mut FreshNames,
    states: &mut Vec<Context>,
    labels: &mut Vec<Label>,
) -> bool {
    for (label, next) in step_inner(ctx, fresh) {
        labels.push(label);
        match next {
            LtsState::Success => return true,
            LtsState::Running(next_ctx) => {
                states.push(next_ctx.clone());
                if dfs(&next_ctx, fresh, states, labels) {
                    return true;
                }
                states.pop();
            }
        }
        labels.pop();
    }
    false
}

/// Verify the liveness conditions on a complete path (`states[i]` is the
/// context before `labels[i]`; the path ends in success).
///
/// 1. every queued message at `u` bound for `x` is later consumed by the
///    tensor step `x@u`;
/// 2. every queued close token at `u` bound for `x` ends in a final gather
///    `x#[..u..]`;
/// 3. every tensor annotation `x ..*u..` is eventually fired as `x@u`;
/// 4. every unit `x : 1[us]` ends the path with exactly `x#[us]`.
///
/// These hold for every successful run of this finite system: success states
/// carry no residual obligations and each obligation can only be discharged
/// by its matching label. The function exists to state — and in tests,
/// check — the definition directly.
pub fn path_is_live(states: &[Context], labels: &[Label]) -> bool {
    if states.len() != labels.len() {
        return false;
    }
    for (i, ctx) in states.iter().enumerate() {
        for (u, st) in ctx.iter() {
            for e in st.queue.entries() {
                match e.payload {
                    QueuePayload::Msg(..) => {
                        let x = &e.target;
                        let consumed = labels[i..].iter().any(
                            |l| matches!(l, Label::TensorStep(a, b) if a == x && b == u),
                        );
                        if !consumed {
                            return false;
                        }
                    }
                    QueuePayload::Star => {
                        let x = &e.target;
                        let ok = matches!(
                            labels.last(),
                            Some(Label::OneStep(a, us)) if a == x && us.contains(u)
                        );
                        if !ok {
                            return false;
                        }
                    }
                    QueuePayload::Left | QueuePayload::Right => return false,
                }
            }
            if let Usage::Active(t) = &st.usage {
                if !type_obligations_met(u, t, &labels[i..], labels) {
                    return false;
                }
            }
        }
    }
    true
}

fn type_obligations_met(x: &Name, t: &AnnType, rest: &[Label], all: &[Label]) -> bool {
    match t {
        AnnType::Atom(_) | AnnType::DualAtom(_) => true,
        AnnType::Bot(_) => true, // discharged by its own bot step, tracked via the star
        AnnType::One(us) => {
            matches!(all.last(), Some(Label::OneStep(a, vs)) if a == x && {
                let s1: BTreeSet<&Name> = us.iter().collect();
                let s2: BTreeSet<&Name> = vs.iter().collect();
                s1 == s2
            })
        }
        AnnType::Tensor(_, u, b) => {
            rest.iter()
                .any(|l| matches!(l, Label::TensorStep(a, v) if a == x && v == u))
                && type_obligations_met(x, b, rest, all)
        }
        AnnType::Par(_, _, b) => type_obligations_met(x, b, rest, all),
        AnnType::Plus(..) | AnnType::With(..) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forwarder::fixtures;
    use crate::syntax::name;

    #[test]
    fn two_dual_atoms_step_to_success() {
        let ctx = Context::of_types([
            (name("x"), AnnType::DualAtom(name("a"))),
            (name("y"), AnnType::Atom(name("a"))),
        ])
        .unwrap();
        let steps = step(&ctx).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].0, Label::AxStep(name("x"), name("y")));
        assert_eq!(steps[0].1, LtsState::Success);
    }

    #[test]
    fn criss_cross_live_path() {
        let ctx = fixtures::criss_cross_ctx();
        let path = live_path(&ctx).unwrap().expect("live");
        let rendered: Vec<String> = path.iter().map(|l| l.to_string()).collect();
        assert_eq!(rendered, vec!["x*y", "y*x", "y@x", "x@y", "x1y", "y#[x]"]);
    }

    #[test]
    fn mismatched_atoms_have_no_live_path() {
        let ctx = Context::of_types([
            (name("x"), AnnType::Atom(name("a"))),
            (name("y"), AnnType::Atom(name("b"))),
        ])
        .unwrap();
        assert_eq!(live_path(&ctx).unwrap(), None);
    }

    #[test]
    fn bot_step_ignores_pending_queue_items() {
        // A done endpoint keeps forwarding duties; bot can fire regardless
        // of what is still queued.
        let ctx = Context::build([
            (
                name("x"),
                EndpointState::with_queue(
                    crate::queue::Queue::from_entries([QueueEntry::msg(
                        name("z"),
                        name("m"),
                        crate::syntax::PlainType::atom("a"),
                    )]),
                    AnnType::Bot(name("y")),
                ),
            ),
            (
                name("y"),
                EndpointState::active(AnnType::One(vec![name("x"), name("z")])),
            ),
            (
                name("z"),
                EndpointState::active(AnnType::tensor(
                    crate::syntax::PlainType::dual_atom("a"),
                    name("x"),
                    AnnType::Bot(name("y")),
                )),
            ),
        ])
        .unwrap();
        let steps = step(&ctx).unwrap();
        assert!(steps
            .iter()
            .any(|(l, _)| matches!(l, Label::BotStep(x, u) if x == &name("x") && u == &name("y"))));
    }

    #[test]
    fn additives_are_rejected() {
        let ctx = Context::of_types([(
            name("x"),
            AnnType::plus(
                AnnType::One(vec![name("x")]),
                name("x"),
                AnnType::One(vec![name("x")]),
            ),
        )])
        .unwrap();
        assert_eq!(step(&ctx).unwrap_err(), LtsError::NonMultiplicative);
        assert_eq!(live_path(&ctx).unwrap_err(), LtsError::NonMultiplicative);
    }
}
