//! Checker for the forwarder judgement `P |- Γ`.
//!
//! The judgement types exactly those processes that relay everything they
//! receive. Receiving rules (`in`, `wait`, `case`) push a boxed item onto
//! the principal endpoint's queue, tagged with the forwarding target written
//! in the type annotation; sending rules (`out`, `close`, `inl`/`inr`) pop
//! the matching item off the source endpoint's queue. The checker is
//! syntax-directed and never backtracks: each term constructor together
//! with the annotations forces the rule instance.

use std::fmt;

use thiserror::Error;

use crate::context::{Context, EndpointState, Usage};
use crate::process::Process;
use crate::queue::{QueueEntry, QueuePayload};
use crate::syntax::{annotate, dual, AnnType, Name};

/// Rules of the forwarder system.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FwdRule {
    Ax,
    One,
    Bot,
    Tensor,
    Par,
    PlusL,
    PlusR,
    With,
}

impl fmt::Display for FwdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FwdRule::Ax => "Ax",
            FwdRule::One => "One",
            FwdRule::Bot => "Bot",
            FwdRule::Tensor => "Tensor",
            FwdRule::Par => "Par",
            FwdRule::PlusL => "PlusL",
            FwdRule::PlusR => "PlusR",
            FwdRule::With => "With",
        };
        f.write_str(s)
    }
}

/// Explicit proof tree for the forwarder judgement.
///
/// `targets` holds the forwarding target(s) of the rule: the gather list for
/// `One`, the peer endpoint for `Ax`, and the single annotation target
/// otherwise. For `Tensor` the first child is the payload derivation and the
/// second the continuation; `source_done` records whether the message was
/// taken from a done endpoint's queue.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub rule: FwdRule,
    pub endpoint: Name,
    pub targets: Vec<Name>,
    pub children: Vec<Derivation>,
    pub conclusion: Context,
    pub source_done: bool,
}

impl Derivation {
    /// Number of nodes in the tree.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// Rule/endpoint pairs along the main spine (skipping tensor payload
    /// subderivations), root first. This is the order the rules appear in
    /// when the derivation is read bottom-up as a proof.
    pub fn spine(&self) -> Vec<(FwdRule, Name)> {
        let mut out = vec![(self.rule, self.endpoint.clone())];
        let next = match self.rule {
            FwdRule::Tensor => self.children.get(1),
            FwdRule::With => None, // both branches are spines of their own
            _ => self.children.first(),
        };
        if let Some(d) = next {
            out.extend(d.spine());
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FwdErrorKind {
    /// Term shape does not match the type shape at the principal endpoint.
    RuleMismatch,
    /// Queue head for the source endpoint has the wrong target or payload.
    WrongTarget,
    /// The rule needs a queued item that is not there.
    EmptyQueue,
    /// Rule `One` found leftover non-star queue items.
    ResidualQueue,
    /// A link at a non-atomic type.
    NonAtomicLink,
    /// Endpoints left over at a closing rule.
    Unclosed,
}

impl fmt::Display for FwdErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FwdErrorKind::RuleMismatch => "RuleMismatch",
            FwdErrorKind::WrongTarget => "WrongTarget",
            FwdErrorKind::EmptyQueue => "EmptyQueue",
            FwdErrorKind::ResidualQueue => "ResidualQueue",
            FwdErrorKind::NonAtomicLink => "NonAtomicLink",
            FwdErrorKind::Unclosed => "Unclosed",
        };
        f.write_str(s)
    }
}

/// A forwarder typing failure, carrying the context at the failing node.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{kind}: {message} (at {context})")]
pub struct FwdError {
    pub kind: FwdErrorKind,
    pub message: String,
    pub context: Context,
}

impl FwdError {
    fn new(kind: FwdErrorKind, message: impl Into<String>, context: &Context) -> Self {
        FwdError { kind, message: message.into(), context: context.clone() }
    }
}

/// Switches for judgement variants left open by the rules.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Accept `close x` at `x : 1` with an empty gather list when no other
    /// endpoint exists (the degenerate one-party session).
    pub allow_empty_gather: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { allow_empty_gather: true }
    }
}

/// Check `p |- ctx` with default options.
pub fn check_forwarder(p: &Process, ctx: &Context) -> Result<Derivation, FwdError> {
    check_forwarder_with(p, ctx, CheckOptions::default())
}

/// Check `p |- ctx`, producing the full derivation.
pub fn check_forwarder_with(
    p: &Process,
    ctx: &Context,
    opts: CheckOptions,
) -> Result<Derivation, FwdError> {
    match p {
        Process::Link(x, y) => rule_ax(x, y, ctx),
        Process::Close(x) => rule_one(x, ctx, opts),
        Process::Wait(x, body) => {
            let (u, st) = expect_active(ctx, x)?;
            let AnnType::Bot(target) = u else {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("wait {x} but {x} is not of bot type"),
                    ctx,
                ));
            };
            let target = target.clone();
            let mut premise = ctx.clone();
            let mut queue = st.queue.clone();
            queue.enqueue(QueueEntry::star(target.clone()));
            premise.insert(x.clone(), EndpointState::done(queue));
            let child = check_forwarder_with(body, &premise, opts)?;
            Ok(node(FwdRule::Bot, x.clone(), vec![target], vec![child], ctx, false))
        }
        Process::Recv(x, y, body) => {
            let (u, st) = expect_active(ctx, x)?;
            let AnnType::Par(left, target, right) = u else {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("in {x}(..) but {x} is not of par type"),
                    ctx,
                ));
            };
            if ctx.contains(y) {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("bound message name {y} clashes with an endpoint"),
                    ctx,
                ));
            }
            let (left, target, right) = ((**left).clone(), target.clone(), (**right).clone());
            let mut premise = ctx.clone();
            let mut queue = st.queue.clone();
            queue.enqueue(QueueEntry::msg(target.clone(), y.clone(), left));
            premise.insert(x.clone(), EndpointState::with_queue(queue, right));
            let child = check_forwarder_with(body, &premise, opts)?;
            Ok(node(FwdRule::Par, x.clone(), vec![target], vec![child], ctx, false))
        }
        Process::Send(x, y, payload, cont) => {
            let (u, _) = expect_active(ctx, x)?;
            let AnnType::Tensor(left, target, right) = u else {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("out {x}[..] but {x} is not of tensor type"),
                    ctx,
                ));
            };
            let (left, target, right) = ((**left).clone(), target.clone(), (**right).clone());
            let (payload_item, source_done) = take_queue_head(ctx, &target, x)?;
            let QueuePayload::Msg(z, ztype) = payload_item else {
                return Err(FwdError::new(
                    FwdErrorKind::WrongTarget,
                    format!("queue head of {target} for {x} is not a message"),
                    ctx,
                ));
            };
            if ztype != dual(&left) {
                return Err(FwdError::new(
                    FwdErrorKind::WrongTarget,
                    format!("queued message {z} : {ztype} is not dual to the sent type {left}"),
                    ctx,
                ));
            }
            if ctx.contains(y) {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("bound payload name {y} clashes with an endpoint"),
                    ctx,
                ));
            }
            // Payload premise: a fresh two-endpoint session between the
            // boxed name and the sent name, annotated with each other.
            let payload_ctx = Context::of_types([
                (z.clone(), annotate(&dual(&left), y)),
                (y.clone(), annotate(&left, &z)),
            ])
            .map_err(|e| FwdError::new(FwdErrorKind::RuleMismatch, e.to_string(), ctx))?;
            let payload_deriv = check_forwarder_with(payload, &payload_ctx, opts)?;

            let mut premise = ctx.clone();
            premise.get_mut(&target).expect("present").queue.pop_for(x);
            premise.set_type(x, right);
            let cont_deriv = check_forwarder_with(cont, &premise, opts)?;
            Ok(node(
                FwdRule::Tensor,
                x.clone(),
                vec![target],
                vec![payload_deriv, cont_deriv],
                ctx,
                source_done,
            ))
        }
        Process::Inl(x, body) => rule_plus(x, body, ctx, opts, false),
        Process::Inr(x, body) => rule_plus(x, body, ctx, opts, true),
        Process::Case(x, lbody, rbody) => {
            let (u, st) = expect_active(ctx, x)?;
            let AnnType::With(lt, target, rt) = u else {
                return Err(FwdError::new(
                    FwdErrorKind::RuleMismatch,
                    format!("case {x} but {x} is not of with type"),
                    ctx,
                ));
            };
            let (lt, target, rt) = ((**lt).clone(), target.clone(), (**rt).clone());
            let queue = st.queue.clone();
            let branch = |marker: QueuePayload, ty: AnnType, body: &Process| {
                let mut premise = ctx.clone();
                let mut q = queue.clone();
                q.enqueue(QueueEntry::new(target.clone(), marker));
                premise.insert(x.clone(), EndpointState::with_queue(q, ty));
                check_forwarder_with(body, &premise, opts)
            };
            let lchild = branch(QueuePayload::Left, lt, lbody)?;
            let rchild = branch(QueuePayload::Right, rt, rbody)?;
            Ok(node(FwdRule::With, x.clone(), vec![target], vec![lchild, rchild], ctx, false))
        }
        Process::MCut(_) => Err(FwdError::new(
            FwdErrorKind::RuleMismatch,
            "forwarders contain no cuts",
            ctx,
        )),
    }
}

fn node(
    rule: FwdRule,
    endpoint: Name,
    targets: Vec<Name>,
    children: Vec<Derivation>,
    conclusion: &Context,
    source_done: bool,
) -> Derivation {
    Derivation { rule, endpoint, targets, children, conclusion: conclusion.clone(), source_done }
}

fn expect_active<'c>(ctx: &'c Context, x: &Name) -> Result<(&'c AnnType, &'c EndpointState), FwdError> {
    let st = ctx.get(x).ok_or_else(|| {
        FwdError::new(FwdErrorKind::RuleMismatch, format!("unknown endpoint {x}"), ctx)
    })?;
    match &st.usage {
        Usage::Active(t) => Ok((t, st)),
        Usage::Done => Err(FwdError::new(
            FwdErrorKind::RuleMismatch,
            format!("endpoint {x} is already done"),
            ctx,
        )),
    }
}

/// Pop the queue head of `source` destined for `dest`. The source endpoint
/// may be active or done; which one it was is reported back.
fn take_queue_head(
    ctx: &Context,
    source: &Name,
    dest: &Name,
) -> Result<(QueuePayload, bool), FwdError> {
    let st = ctx.get(source).ok_or_else(|| {
        FwdError::new(FwdErrorKind::RuleMismatch, format!("unknown source endpoint {source}"), ctx)
    })?;
    match st.queue.peek_for(dest) {
        Some(p) => Ok((p.clone(), st.usage.is_done())),
        None => Err(FwdError::new(
            FwdErrorKind::EmptyQueue,
            format!("no queued item at {source} destined for {dest}"),
            ctx,
        )),
    }
}

fn rule_ax(x: &Name, y: &Name, ctx: &Context) -> Result<Derivation, FwdError> {
    if ctx.len() != 2 {
        return Err(FwdError::new(
            FwdErrorKind::Unclosed,
            "a link closes exactly two endpoints",
            ctx,
        ));
    }
    let (tx, sx) = expect_active(ctx, x)?;
    let (ty, sy) = expect_active(ctx, y)?;
    if !sx.queue.is_empty() || !sy.queue.is_empty() {
        return Err(FwdError::new(
            FwdErrorKind::ResidualQueue,
            "link endpoints must have empty queues",
            ctx,
        ));
    }
    let ok = matches!(
        (tx, ty),
        (AnnType::DualAtom(a), AnnType::Atom(b)) | (AnnType::Atom(a), AnnType::DualAtom(b)) if a == b
    );
    if !ok {
        let atoms = matches!(tx, AnnType::Atom(_) | AnnType::DualAtom(_))
            && matches!(ty, AnnType::Atom(_) | AnnType::DualAtom(_));
        let kind = if atoms { FwdErrorKind::RuleMismatch } else { FwdErrorKind::NonAtomicLink };
        return Err(FwdError::new(kind, format!("cannot link {x} : {tx} with {y} : {ty}"), ctx));
    }
    Ok(node(FwdRule::Ax, x.clone(), vec![y.clone()], vec![], ctx, false))
}

fn rule_one(x: &Name, ctx: &Context, opts: CheckOptions) -> Result<Derivation, FwdError> {
    let (t, st) = expect_active(ctx, x)?;
    let AnnType::One(gather) = t else {
        return Err(FwdError::new(
            FwdErrorKind::RuleMismatch,
            format!("close {x} but {x} is not of unit type"),
            ctx,
        ));
    };
    if gather.is_empty() && !opts.allow_empty_gather {
        return Err(FwdError::new(
            FwdErrorKind::RuleMismatch,
            "empty gather list on 1 is disabled",
            ctx,
        ));
    }
    if !st.queue.is_empty() {
        return Err(FwdError::new(
            FwdErrorKind::ResidualQueue,
            format!("closing endpoint {x} still has queued items"),
            ctx,
        ));
    }
    let gather: std::collections::BTreeSet<&Name> = gather.iter().collect();
    let others: std::collections::BTreeSet<&Name> = ctx.names().filter(|n| *n != x).collect();
    if gather != others {
        return Err(FwdError::new(
            FwdErrorKind::Unclosed,
            format!("gather list of {x} must name exactly the remaining endpoints"),
            ctx,
        ));
    }
    for u in &others {
        let st = ctx.get(u).expect("present");
        if !st.usage.is_done() {
            return Err(FwdError::new(
                FwdErrorKind::Unclosed,
                format!("endpoint {u} is still active at close"),
                ctx,
            ));
        }
        let entries = st.queue.entries();
        match entries.as_slice() {
            [e] if e.payload == QueuePayload::Star && e.target == *x => {}
            [e] if e.payload == QueuePayload::Star => {
                return Err(FwdError::new(
                    FwdErrorKind::WrongTarget,
                    format!("close token at {u} is destined for {} not {x}", e.target),
                    ctx,
                ));
            }
            [] => {
                return Err(FwdError::new(
                    FwdErrorKind::EmptyQueue,
                    format!("done endpoint {u} has no close token for {x}"),
                    ctx,
                ));
            }
            _ => {
                return Err(FwdError::new(
                    FwdErrorKind::ResidualQueue,
                    format!("done endpoint {u} still has items to forward"),
                    ctx,
                ));
            }
        }
    }
    let targets: Vec<Name> = others.into_iter().cloned().collect();
    Ok(node(FwdRule::One, x.clone(), targets, vec![], ctx, false))
}

fn rule_plus(
    x: &Name,
    body: &Process,
    ctx: &Context,
    opts: CheckOptions,
    right: bool,
) -> Result<Derivation, FwdError> {
    let (u, _) = expect_active(ctx, x)?;
    let AnnType::Plus(lt, target, rt) = u else {
        return Err(FwdError::new(
            FwdErrorKind::RuleMismatch,
            format!("in{}l/r {x} but {x} is not of plus type", if right { "r" } else { "" }),
            ctx,
        ));
    };
    let (lt, target, rt) = ((**lt).clone(), target.clone(), (**rt).clone());
    let (head, source_done) = take_queue_head(ctx, &target, x)?;
    let (want, ty, rule) = if right {
        (QueuePayload::Right, rt, FwdRule::PlusR)
    } else {
        (QueuePayload::Left, lt, FwdRule::PlusL)
    };
    if head != want {
        return Err(FwdError::new(
            FwdErrorKind::WrongTarget,
            format!("queue head of {target} for {x} is not the expected choice marker"),
            ctx,
        ));
    }
    let mut premise = ctx.clone();
    premise.get_mut(&target).expect("present").queue.pop_for(x);
    premise.set_type(x, ty);
    let child = check_forwarder_with(body, &premise, opts)?;
    Ok(node(rule, x.clone(), vec![target], vec![child], ctx, source_done))
}

/// Contexts used by tests and examples: the criss-cross protocol.
#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::syntax::{name, PlainType};

    /// `x : (~name @ ((~cost * bot[y])[y]))[y]`
    pub fn criss_cross_x_type() -> AnnType {
        AnnType::par(
            PlainType::dual_atom("name"),
            name("y"),
            AnnType::tensor(PlainType::dual_atom("cost"), name("y"), AnnType::Bot(name("y"))),
        )
    }

    /// `y : (cost @ ((name * 1[x])[x]))[x]`
    pub fn criss_cross_y_type() -> AnnType {
        AnnType::par(
            PlainType::atom("cost"),
            name("x"),
            AnnType::tensor(PlainType::atom("name"), name("x"), AnnType::One(vec![name("x")])),
        )
    }

    pub fn criss_cross_ctx() -> Context {
        Context::of_types([
            (name("x"), criss_cross_x_type()),
            (name("y"), criss_cross_y_type()),
        ])
        .unwrap()
    }

    /// The forwarder witnessing criss-cross compatibility:
    /// `in x(u). in y(v). out y[u'](fwd u u')(out x[v'](fwd v' v)(wait x. close y))`
    pub fn criss_cross_forwarder() -> Process {
        Process::recv(
            name("x"),
            name("u"),
            Process::recv(
                name("y"),
                name("v"),
                Process::send(
                    name("y"),
                    name("u'"),
                    Process::Link(name("u"), name("u'")),
                    Process::send(
                        name("x"),
                        name("v'"),
                        Process::Link(name("v'"), name("v")),
                        Process::wait(name("x"), Process::Close(name("y"))),
                    ),
                ),
            ),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::queue::Queue;
    use crate::syntax::{name, PlainType};

    fn atom_ctx() -> Context {
        Context::of_types([
            (name("x"), AnnType::DualAtom(name("a"))),
            (name("y"), AnnType::Atom(name("a"))),
        ])
        .unwrap()
    }

    #[test]
    fn ax_accepts_dual_atoms_either_orientation() {
        let ctx = atom_ctx();
        let d = check_forwarder(&Process::Link(name("x"), name("y")), &ctx).unwrap();
        assert_eq!(d.rule, FwdRule::Ax);
        let d2 = check_forwarder(&Process::Link(name("y"), name("x")), &ctx).unwrap();
        assert_eq!(d2.rule, FwdRule::Ax);
    }

    #[test]
    fn ax_rejects_non_dual_and_non_atomic() {
        let ctx = Context::of_types([
            (name("x"), AnnType::Atom(name("a"))),
            (name("y"), AnnType::Atom(name("a"))),
        ])
        .unwrap();
        let err = check_forwarder(&Process::Link(name("x"), name("y")), &ctx).unwrap_err();
        assert_eq!(err.kind, FwdErrorKind::RuleMismatch);

        let t = PlainType::par(PlainType::atom("a"), PlainType::Bot);
        let ctx = Context::of_types([
            (name("x"), annotate(&t, &name("y"))),
            (name("y"), annotate(&dual(&t), &name("x"))),
        ])
        .unwrap();
        let err = check_forwarder(&Process::Link(name("x"), name("y")), &ctx).unwrap_err();
        assert_eq!(err.kind, FwdErrorKind::NonAtomicLink);
    }

    #[test]
    fn criss_cross_derivation_matches_the_worked_example() {
        let ctx = fixtures::criss_cross_ctx();
        let p = fixtures::criss_cross_forwarder();
        let d = check_forwarder(&p, &ctx).unwrap();
        let spine: Vec<(FwdRule, String)> = d
            .spine()
            .into_iter()
            .map(|(r, n)| (r, n.as_str().to_owned()))
            .collect();
        let expect = vec![
            (FwdRule::Par, "x".to_owned()),
            (FwdRule::Par, "y".to_owned()),
            (FwdRule::Tensor, "y".to_owned()),
            (FwdRule::Tensor, "x".to_owned()),
            (FwdRule::Bot, "x".to_owned()),
            (FwdRule::One, "y".to_owned()),
        ];
        assert_eq!(spine, expect);
        assert_eq!(d.node_count(), 8); // six spine rules plus two axiom payloads

        // Both tensor payload children are axioms.
        let tensor_y = &d.children[0].children[0];
        assert_eq!(tensor_y.rule, FwdRule::Tensor);
        assert_eq!(tensor_y.children[0].rule, FwdRule::Ax);
    }

    #[test]
    fn gathered_close_accepts() {
        let ctx = Context::of_types([
            (name("x"), AnnType::Bot(name("z"))),
            (name("y"), AnnType::Bot(name("z"))),
            (name("z"), AnnType::One(vec![name("x"), name("y")])),
        ])
        .unwrap();
        let p = Process::wait(
            name("x"),
            Process::wait(name("y"), Process::Close(name("z"))),
        );
        let d = check_forwarder(&p, &ctx).unwrap();
        assert_eq!(d.rule, FwdRule::Bot);
    }

    #[test]
    fn send_before_message_arrives_is_empty_queue() {
        // x expects to pull a message from y's queue, but nothing was
        // received on y yet.
        let t = AnnType::tensor(PlainType::atom("a"), name("y"), AnnType::Bot(name("y")));
        let ctx = Context::of_types([
            (name("x"), t),
            (
                name("y"),
                annotate(&PlainType::par(PlainType::dual_atom("a"), PlainType::One), &name("x")),
            ),
        ])
        .unwrap();
        let p = Process::send(
            name("x"),
            name("w"),
            Process::Link(name("w"), name("w2")),
            Process::wait(name("x"), Process::Close(name("y"))),
        );
        let err = check_forwarder(&p, &ctx).unwrap_err();
        assert_eq!(err.kind, FwdErrorKind::EmptyQueue);
    }

    #[test]
    fn residual_queue_at_close_is_rejected() {
        let ctx = Context::build([
            (name("z"), EndpointState::active(AnnType::One(vec![name("x")]))),
            (
                name("x"),
                EndpointState::done(Queue::from_entries([
                    QueueEntry::star(name("z")),
                    QueueEntry::msg(name("z"), name("m"), PlainType::atom("a")),
                ])),
            ),
        ])
        .unwrap();
        let err = check_forwarder(&Process::Close(name("z")), &ctx).unwrap_err();
        assert_eq!(err.kind, FwdErrorKind::ResidualQueue);
    }

    #[test]
    fn degenerate_close_follows_the_switch() {
        let ctx = Context::of_types([(name("x"), AnnType::One(vec![]))]).unwrap();
        assert!(check_forwarder(&Process::Close(name("x")), &ctx).is_ok());
        let strict = CheckOptions { allow_empty_gather: false };
        assert!(check_forwarder_with(&Process::Close(name("x")), &ctx, strict).is_err());
    }

    #[test]
    fn verdict_is_a_function_of_the_canonical_context() {
        // Same queue content presented in two raw orders with independent
        // targets; identical derivations must come out. The message is
        // pulled from a done endpoint's queue, which the rules permit.
        let base = |entries: Vec<QueueEntry>| {
            Context::build([
                (name("x"), EndpointState::done(Queue::from_entries(entries))),
                (
                    name("y"),
                    EndpointState::active(AnnType::tensor(
                        PlainType::atom("a"),
                        name("x"),
                        AnnType::Bot(name("z")),
                    )),
                ),
                (
                    name("z"),
                    EndpointState::active(AnnType::One(vec![name("x"), name("y")])),
                ),
            ])
            .unwrap()
        };
        let e1 = QueueEntry::msg(name("y"), name("m"), PlainType::dual_atom("a"));
        let e2 = QueueEntry::star(name("z"));
        let c1 = base(vec![e1.clone(), e2.clone()]);
        let c2 = base(vec![e2, e1]);
        assert_eq!(c1, c2);
        let p = Process::send(
            name("y"),
            name("p"),
            Process::Link(name("m"), name("p")),
            Process::wait(name("y"), Process::Close(name("z"))),
        );
        let d1 = check_forwarder(&p, &c1).expect("derivable");
        let d2 = check_forwarder(&p, &c2).expect("derivable");
        assert_eq!(d1, d2);
        assert!(d1.source_done);
    }
}
