//! Backtracking proof search for forwarders.
//!
//! [`synth_annotated`] reads the rules bottom-up on a fully annotated
//! context: at every state the applicable rules are enumerated in a fixed
//! order (Ax, One, Tensor, PlusL, PlusR, Par, Case, Bot; endpoints
//! lexicographically), so the first witness is reproducible. Termination is
//! by the context measure, which strictly shrinks along every premise.
//!
//! [`synth_plain`] searches the same rule space but chooses forwarding
//! targets lazily: applying a receiving rule at `x` picks any other endpoint
//! as the target, a branch point of the search. Choices are recorded in an
//! assignment keyed by the position of the connective in the original type,
//! which keeps the two premises of an external choice consistent and lets
//! the witness annotation be reconstructed afterwards.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::context::{Context, Usage};
use crate::forwarder::{check_forwarder_with, CheckOptions, Derivation};
use crate::process::{FreshNames, Process};
use crate::queue::{Queue, QueueEntry, QueuePayload};
use crate::syntax::{annotate, dual, AnnType, Name, PlainType};

/// Whether annotations are given up front or reconstructed by the search.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum AnnotationMode {
    #[default]
    Fixed,
    Infer,
}

/// Search configuration.
#[derive(Clone, Debug)]
pub struct SynthConfig {
    /// Bound on the derivation depth; 0 means unbounded (the measure bounds
    /// the search anyway).
    pub max_depth: usize,
    /// Return every derivation instead of stopping at the first.
    pub enumerate_all: bool,
    /// See [`CheckOptions::allow_empty_gather`].
    pub allow_empty_gather: bool,
    /// Informational; [`synth_annotated`] always runs `Fixed`,
    /// [`synth_plain`] always runs `Infer`.
    pub annotation_mode: AnnotationMode,
    /// Hard cap on the number of returned witnesses in `enumerate_all`
    /// mode; `None` means all of them.
    pub limit: Option<usize>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_depth: 0,
            enumerate_all: false,
            allow_empty_gather: true,
            annotation_mode: AnnotationMode::Fixed,
            limit: None,
        }
    }
}

impl SynthConfig {
    pub fn first() -> Self {
        SynthConfig::default()
    }

    pub fn all() -> Self {
        SynthConfig { enumerate_all: true, ..SynthConfig::default() }
    }

    fn effective_limit(&self) -> usize {
        if self.enumerate_all {
            self.limit.unwrap_or(usize::MAX)
        } else {
            1
        }
    }
}

/// Synthesise forwarders for a fully annotated context.
///
/// Every returned pair passes [`crate::forwarder::check_forwarder`] by
/// construction; an empty result means the context is not derivable.
pub fn synth_annotated(ctx: &Context, cfg: &SynthConfig) -> Vec<(Process, Derivation)> {
    let mut engine = Engine::new(cfg, ctx.names().cloned().collect());
    let sctx = SCtx::from_annotated(ctx);
    let found = engine.search(&sctx, &Store::new(), 0);
    let opts = CheckOptions { allow_empty_gather: cfg.allow_empty_gather };
    found
        .into_iter()
        .map(|(p, _)| {
            let d = check_forwarder_with(&p, ctx, opts)
                .expect("synthesised forwarder must check");
            (p, d)
        })
        .collect()
}

/// Decide whether the annotated context is derivable at all.
pub fn derivable(ctx: &Context, cfg: &SynthConfig) -> bool {
    let mut engine = Engine::new(cfg, ctx.names().cloned().collect());
    let sctx = SCtx::from_annotated(ctx);
    !engine
        .search(&sctx, &Store::new(), 0)
        .is_empty()
}

/// Synthesise forwarders for plain types, reconstructing a witness
/// annotation. Erasing each returned context yields the input types.
pub fn synth_plain(
    types: &crate::context::CpContext,
    cfg: &SynthConfig,
) -> Vec<(Process, Context, Derivation)> {
    let names: BTreeSet<Name> = types.names().cloned().collect();
    let mut engine = Engine::new(cfg, names.clone());
    engine.infer = true;
    let sctx = SCtx::from_plain(types);
    let found = engine.search(&sctx, &Store::new(), 0);
    let opts = CheckOptions { allow_empty_gather: cfg.allow_empty_gather };
    found
        .into_iter()
        .map(|(p, store)| {
            let witness = rebuild_witness(types, &store, &names);
            let d = check_forwarder_with(&p, &witness, opts)
                .expect("synthesised forwarder must check against its witness");
            (p, witness, d)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Search state

/// Path of a connective inside an endpoint's original type: 0 = left
/// operand, 1 = right operand.
type Path = Vec<u8>;

#[derive(Clone, PartialEq, Eq, Debug)]
enum SType {
    /// Annotations fixed (given up front, or committed payload sessions).
    Ann(AnnType),
    /// Plain type whose head annotation is still to be chosen; the path
    /// addresses it in the owner's original type.
    Inf(PlainType, Path),
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum SUsage {
    Active(SType),
    Done,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct SEndpoint {
    queue: Queue,
    usage: SUsage,
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct SCtx {
    entries: BTreeMap<Name, SEndpoint>,
}

impl SCtx {
    fn from_annotated(ctx: &Context) -> Self {
        SCtx {
            entries: ctx
                .iter()
                .map(|(n, st)| {
                    let usage = match &st.usage {
                        Usage::Active(t) => SUsage::Active(SType::Ann(t.clone())),
                        Usage::Done => SUsage::Done,
                    };
                    (n.clone(), SEndpoint { queue: st.queue.clone(), usage })
                })
                .collect(),
        }
    }

    fn from_plain(types: &crate::context::CpContext) -> Self {
        SCtx {
            entries: types
                .iter()
                .map(|(n, t)| {
                    (
                        n.clone(),
                        SEndpoint {
                            queue: Queue::new(),
                            usage: SUsage::Active(SType::Inf(t.clone(), Path::new())),
                        },
                    )
                })
                .collect(),
        }
    }

    fn measure(&self) -> usize {
        self.entries
            .values()
            .map(|e| {
                let t = match &e.usage {
                    SUsage::Active(SType::Ann(t)) => t.size(),
                    SUsage::Active(SType::Inf(t, _)) => t.size(),
                    SUsage::Done => 0,
                };
                t + e.queue.weight()
            })
            .sum()
    }
}

/// Target/gather choices made so far, keyed by connective position.
#[derive(Clone, PartialEq, Eq, Debug)]
enum Choice {
    Target(Name),
    Gather(Vec<Name>),
}

type Store = BTreeMap<(Name, Path), Choice>;

// ---------------------------------------------------------------------------
// The engine

struct Engine<'c> {
    cfg: &'c SynthConfig,
    infer: bool,
    fresh: FreshNames,
    avoid: BTreeSet<Name>,
    /// Canonicalised states known underivable (annotated mode only).
    dead: HashSet<Vec<u8>>,
}

impl<'c> Engine<'c> {
    fn new(cfg: &'c SynthConfig, avoid: BTreeSet<Name>) -> Self {
        Engine { cfg, infer: false, fresh: FreshNames::new(), avoid, dead: HashSet::new() }
    }

    /// All solutions of `sctx` under `store`, up to the configured limit.
    /// Each solution carries the store it committed to.
    fn search(&mut self, sctx: &SCtx, store: &Store, depth: usize) -> Vec<(Process, Store)> {
        let limit = self.cfg.effective_limit();
        if self.cfg.max_depth != 0 && depth > self.cfg.max_depth {
            return Vec::new();
        }
        let memo_key = if !self.infer { Some(canonical_key(sctx)) } else { None };
        if let Some(k) = &memo_key {
            if self.dead.contains(k) {
                return Vec::new();
            }
        }

        let mut out = Vec::new();
        let mut truncated = false;
        self.moves(sctx, store, depth, limit, &mut out, &mut truncated);

        if out.is_empty() && !truncated {
            if let Some(k) = memo_key {
                self.dead.insert(k);
            }
        }
        out
    }

    fn push(
        &mut self,
        out: &mut Vec<(Process, Store)>,
        limit: usize,
        truncated: &mut bool,
        sol: (Process, Store),
    ) -> bool {
        out.push(sol);
        if out.len() >= limit {
            *truncated = true;
            return true;
        }
        false
    }

    fn moves(
        &mut self,
        sctx: &SCtx,
        store: &Store,
        depth: usize,
        limit: usize,
        out: &mut Vec<(Process, Store)>,
        truncated: &mut bool,
    ) {
        // Ax: the whole context is two dual atoms with empty queues.
        if let Some(p) = try_ax(sctx) {
            if self.push(out, limit, truncated, (p, store.clone())) {
                return;
            }
        }
        // One: a closing endpoint gathering every other (done) endpoint.
        let names: Vec<Name> = sctx.entries.keys().cloned().collect();
        for x in &names {
            if let Some((p, slot, gather)) = self.try_one(sctx, store, x) {
                let mut store2 = store.clone();
                if let Some(slot) = slot {
                    store2.insert(slot, Choice::Gather(gather));
                }
                if self.push(out, limit, truncated, (p, store2)) {
                    return;
                }
            }
        }
        // Tensor, PlusL, PlusR: consuming rules.
        for x in &names {
            if self.consuming_moves(sctx, store, depth, limit, x, out, truncated) {
                return;
            }
        }
        // Par, Case, Bot: enqueuing rules.
        for x in &names {
            if self.enqueuing_moves(sctx, store, depth, limit, x, out, truncated) {
                return;
            }
        }
    }

    /// Head type of an active endpoint plus the slot it occupies (None once
    /// annotations are fixed).
    fn head<'s>(&self, sctx: &'s SCtx, x: &Name) -> Option<(HeadView<'s>, Option<Path>)> {
        match &sctx.entries.get(x)?.usage {
            SUsage::Active(SType::Ann(t)) => Some((HeadView::Ann(t), None)),
            SUsage::Active(SType::Inf(t, path)) => Some((HeadView::Inf(t), Some(path.clone()))),
            SUsage::Done => None,
        }
    }

    /// Candidate targets for a choice slot: the stored assignment if any,
    /// otherwise every other endpoint in order.
    fn target_candidates(
        &self,
        sctx: &SCtx,
        store: &Store,
        x: &Name,
        slot: &(Name, Path),
    ) -> Vec<(Name, bool)> {
        if let Some(Choice::Target(u)) = store.get(slot) {
            return vec![(u.clone(), false)];
        }
        sctx.entries
            .keys()
            .filter(|u| *u != x)
            .map(|u| (u.clone(), true))
            .collect()
    }

    fn try_one(
        &self,
        sctx: &SCtx,
        store: &Store,
        x: &Name,
    ) -> Option<(Process, Option<(Name, Path)>, Vec<Name>)> {
        let (head, slot_path) = self.head(sctx, x)?;
        let endpoint = sctx.entries.get(x).expect("present");
        if !endpoint.queue.is_empty() {
            return None;
        }
        let others: Vec<Name> = sctx.entries.keys().filter(|n| *n != x).cloned().collect();
        // Every other endpoint must be done holding exactly one close token
        // destined for x.
        for u in &others {
            let st = sctx.entries.get(u).expect("present");
            if !matches!(st.usage, SUsage::Done) {
                return None;
            }
            match st.queue.entries().as_slice() {
                [e] if e.payload == QueuePayload::Star && e.target == *x => {}
                _ => return None,
            }
        }
        match head {
            HeadView::Ann(AnnType::One(gather)) => {
                let gather_set: BTreeSet<&Name> = gather.iter().collect();
                let others_set: BTreeSet<&Name> = others.iter().collect();
                if gather_set != others_set {
                    return None;
                }
                if gather.is_empty() && !self.cfg.allow_empty_gather {
                    return None;
                }
                Some((Process::Close(x.clone()), None, gather.clone()))
            }
            HeadView::Inf(PlainType::One) => {
                if others.is_empty() && !self.cfg.allow_empty_gather {
                    return None;
                }
                let slot = (x.clone(), slot_path.expect("inferred"));
                if let Some(Choice::Gather(g)) = store.get(&slot) {
                    let gs: BTreeSet<&Name> = g.iter().collect();
                    let os: BTreeSet<&Name> = others.iter().collect();
                    if gs != os {
                        return None;
                    }
                }
                Some((Process::Close(x.clone()), Some(slot), others))
            }
            _ => None,
        }
    }

    fn consuming_moves(
        &mut self,
        sctx: &SCtx,
        store: &Store,
        depth: usize,
        limit: usize,
        x: &Name,
        out: &mut Vec<(Process, Store)>,
        truncated: &mut bool,
    ) -> bool {
        let Some((head, slot_path)) = self.head(sctx, x) else { return false };
        match head.shape(slot_path.as_ref()) {
            Some(HeadShape::Tensor(left, right)) => {
                let slot = slot_path.map(|p| (x.clone(), p));
                let candidates = match (&slot, head.fixed_target()) {
                    (None, Some(u)) => vec![(u.clone(), false)],
                    (Some(slot), None) => self.target_candidates(sctx, store, x, slot),
                    _ => unreachable!("slot iff inferred"),
                };
                for (u, assign) in candidates {
                    let Some(st) = sctx.entries.get(&u) else { continue };
                    let Some(QueuePayload::Msg(z, ztype)) = st.queue.peek_for(x) else {
                        continue;
                    };
                    if *ztype != dual(&left) {
                        continue;
                    }
                    let z = z.clone();
                    // Payload session between the boxed name and a fresh one.
                    let mut scope = self.avoid.clone();
                    scope.insert(z.clone());
                    let y = self.fresh.fresh("p", &scope);
                    self.avoid.insert(y.clone());
                    let payload_ctx = SCtx {
                        entries: BTreeMap::from([
                            (
                                z.clone(),
                                SEndpoint {
                                    queue: Queue::new(),
                                    usage: SUsage::Active(SType::Ann(annotate(&dual(&left), &y))),
                                },
                            ),
                            (
                                y.clone(),
                                SEndpoint {
                                    queue: Queue::new(),
                                    usage: SUsage::Active(SType::Ann(annotate(&left, &z))),
                                },
                            ),
                        ]),
                    };
                    let mut store2 = store.clone();
                    if assign {
                        store2.insert(slot.clone().expect("inferred"), Choice::Target(u.clone()));
                    }
                    let mut cont = sctx.clone();
                    cont.entries.get_mut(&u).expect("present").queue.pop_for(x);
                    cont.entries.get_mut(x).expect("present").usage =
                        SUsage::Active(right.clone());
                    debug_assert!(cont.measure() < sctx.measure());
                    for (payload_p, payload_store) in self.search(&payload_ctx, &store2, depth + 1)
                    {
                        for (cont_p, cont_store) in self.search(&cont, &payload_store, depth + 1) {
                            let p = Process::send(
                                x.clone(),
                                y.clone(),
                                payload_p.clone(),
                                cont_p,
                            );
                            if self.push(out, limit, truncated, (p, cont_store)) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            Some(HeadShape::Plus(left, right)) => {
                let slot = slot_path.map(|p| (x.clone(), p));
                let candidates = match (&slot, head.fixed_target()) {
                    (None, Some(u)) => vec![(u.clone(), false)],
                    (Some(slot), None) => self.target_candidates(sctx, store, x, slot),
                    _ => unreachable!("slot iff inferred"),
                };
                for (u, assign) in candidates {
                    let Some(st) = sctx.entries.get(&u) else { continue };
                    let marker = match st.queue.peek_for(x) {
                        Some(QueuePayload::Left) => false,
                        Some(QueuePayload::Right) => true,
                        _ => continue,
                    };
                    let branch = if marker { right.clone() } else { left.clone() };
                    let mut store2 = store.clone();
                    if assign {
                        store2.insert(slot.clone().expect("inferred"), Choice::Target(u.clone()));
                    }
                    let mut cont = sctx.clone();
                    cont.entries.get_mut(&u).expect("present").queue.pop_for(x);
                    cont.entries.get_mut(x).expect("present").usage = SUsage::Active(branch);
                    debug_assert!(cont.measure() < sctx.measure());
                    for (body, st2) in self.search(&cont, &store2, depth + 1) {
                        let p = if marker {
                            Process::inr(x.clone(), body)
                        } else {
                            Process::inl(x.clone(), body)
                        };
                        if self.push(out, limit, truncated, (p, st2)) {
                            return true;
                        }
                    }
                }
                false
            }
            _ => false,
        }
    }

    fn enqueuing_moves(
        &mut self,
        sctx: &SCtx,
        store: &Store,
        depth: usize,
        limit: usize,
        x: &Name,
        out: &mut Vec<(Process, Store)>,
        truncated: &mut bool,
    ) -> bool {
        let Some((head, slot_path)) = self.head(sctx, x) else { return false };
        match head.shape(slot_path.as_ref()) {
            Some(HeadShape::Par(left, right)) => {
                let slot = slot_path.map(|p| (x.clone(), p));
                let candidates = match (&slot, head.fixed_target()) {
                    (None, Some(u)) => vec![(u.clone(), false)],
                    (Some(slot), None) => self.target_candidates(sctx, store, x, slot),
                    _ => unreachable!("slot iff inferred"),
                };
                for (u, assign) in candidates {
                    let m = self.fresh.fresh("m", &self.avoid.clone());
                    self.avoid.insert(m.clone());
                    let mut store2 = store.clone();
                    if assign {
                        store2.insert(slot.clone().expect("inferred"), Choice::Target(u.clone()));
                    }
                    let mut cont = sctx.clone();
                    {
                        let e = cont.entries.get_mut(x).expect("present");
                        e.queue.enqueue(QueueEntry::msg(u.clone(), m.clone(), left.clone()));
                        e.usage = SUsage::Active(right.clone());
                    }
                    debug_assert!(cont.measure() < sctx.measure());
                    for (body, st2) in self.search(&cont, &store2, depth + 1) {
                        let p = Process::recv(x.clone(), m.clone(), body);
                        if self.push(out, limit, truncated, (p, st2)) {
                            return true;
                        }
                    }
                }
                false
            }
            Some(HeadShape::With(left, right)) => {
                let slot = slot_path.map(|p| (x.clone(), p));
                let candidates = match (&slot, head.fixed_target()) {
                    (None, Some(u)) => vec![(u.clone(), false)],
                    (Some(slot), None) => self.target_candidates(sctx, store, x, slot),
                    _ => unreachable!("slot iff inferred"),
                };
                for (u, assign) in candidates {
                    let mut store2 = store.clone();
                    if assign {
                        store2.insert(slot.clone().expect("inferred"), Choice::Target(u.clone()));
                    }
                    let mk_branch = |ty: &SType, marker: QueuePayload| {
                        let mut branch = sctx.clone();
                        let e = branch.entries.get_mut(x).expect("present");
                        e.queue.enqueue(QueueEntry::new(u.clone(), marker));
                        e.usage = SUsage::Active(ty.clone());
                        branch
                    };
                    let lctx = mk_branch(&left, QueuePayload::Left);
                    let rctx = mk_branch(&right, QueuePayload::Right);
                    debug_assert!(lctx.measure() < sctx.measure());
                    for (lp, lstore) in self.search(&lctx, &store2, depth + 1) {
                        for (rp, rstore) in self.search(&rctx, &lstore, depth + 1) {
                            let p = Process::case(x.clone(), lp.clone(), rp);
                            if self.push(out, limit, truncated, (p, rstore)) {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            Some(HeadShape::Bot) => {
                let slot = slot_path.map(|p| (x.clone(), p));
                let candidates = match (&slot, head.fixed_target()) {
                    (None, Some(u)) => vec![(u.clone(), false)],
                    (Some(slot), None) => self.target_candidates(sctx, store, x, slot),
                    _ => unreachable!("slot iff inferred"),
                };
                for (u, assign) in candidates {
                    let mut store2 = store.clone();
                    if assign {
                        store2.insert(slot.clone().expect("inferred"), Choice::Target(u.clone()));
                    }
                    let mut cont = sctx.clone();
                    {
                        let e = cont.entries.get_mut(x).expect("present");
                        e.queue.enqueue(QueueEntry::star(u.clone()));
                        e.usage = SUsage::Done;
                    }
                    debug_assert!(cont.measure() < sctx.measure());
                    for (body, st2) in self.search(&cont, &store2, depth + 1) {
                        let p = Process::wait(x.clone(), body);
                        if self.push(out, limit, truncated, (p, st2)) {
                            return true;
                        }
                    }
                }
                false
            }
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// Head views

enum HeadView<'t> {
    Ann(&'t AnnType),
    Inf(&'t PlainType),
}

/// Uniform view of a head connective: operands are search types, the left
/// operand of tensor/par stays plain.
enum HeadShape {
    Tensor(PlainType, SType),
    Par(PlainType, SType),
    Plus(SType, SType),
    With(SType, SType),
    Bot,
}

impl<'t> HeadView<'t> {
    fn fixed_target(&self) -> Option<&Name> {
        match self {
            HeadView::Ann(t) => match t {
                AnnType::Tensor(_, u, _)
                | AnnType::Par(_, u, _)
                | AnnType::Plus(_, u, _)
                | AnnType::With(_, u, _)
                | AnnType::Bot(u) => Some(u),
                _ => None,
            },
            HeadView::Inf(..) => None,
        }
    }

    /// Decompose the head connective. For inferred types `path` is the
    /// position of the head; residual operands extend it.
    fn shape(&self, path: Option<&Path>) -> Option<HeadShape> {
        let sub = |dir: u8| {
            let mut p = path.cloned().unwrap_or_default();
            p.push(dir);
            p
        };
        match self {
            HeadView::Ann(t) => match t {
                AnnType::Tensor(l, _, r) => {
                    Some(HeadShape::Tensor((**l).clone(), SType::Ann((**r).clone())))
                }
                AnnType::Par(l, _, r) => {
                    Some(HeadShape::Par((**l).clone(), SType::Ann((**r).clone())))
                }
                AnnType::Plus(l, _, r) => Some(HeadShape::Plus(
                    SType::Ann((**l).clone()),
                    SType::Ann((**r).clone()),
                )),
                AnnType::With(l, _, r) => Some(HeadShape::With(
                    SType::Ann((**l).clone()),
                    SType::Ann((**r).clone()),
                )),
                AnnType::Bot(_) => Some(HeadShape::Bot),
                _ => None,
            },
            HeadView::Inf(t) => match t {
                PlainType::Tensor(l, r) => Some(HeadShape::Tensor(
                    (**l).clone(),
                    SType::Inf((**r).clone(), sub(1)),
                )),
                PlainType::Par(l, r) => Some(HeadShape::Par(
                    (**l).clone(),
                    SType::Inf((**r).clone(), sub(1)),
                )),
                PlainType::Plus(l, r) => Some(HeadShape::Plus(
                    SType::Inf((**l).clone(), sub(0)),
                    SType::Inf((**r).clone(), sub(1)),
                )),
                PlainType::With(l, r) => Some(HeadShape::With(
                    SType::Inf((**l).clone(), sub(0)),
                    SType::Inf((**r).clone(), sub(1)),
                )),
                PlainType::Bot => Some(HeadShape::Bot),
                _ => None,
            },
        }
    }
}

fn try_ax(sctx: &SCtx) -> Option<Process> {
    if sctx.entries.len() != 2 {
        return None;
    }
    let mut it = sctx.entries.iter();
    let (n1, e1) = it.next()?;
    let (n2, e2) = it.next()?;
    if !e1.queue.is_empty() || !e2.queue.is_empty() {
        return None;
    }
    let atom = |e: &SEndpoint| match &e.usage {
        SUsage::Active(SType::Ann(AnnType::Atom(a))) => Some((a.clone(), false)),
        SUsage::Active(SType::Ann(AnnType::DualAtom(a))) => Some((a.clone(), true)),
        SUsage::Active(SType::Inf(PlainType::Atom(a), _)) => Some((a.clone(), false)),
        SUsage::Active(SType::Inf(PlainType::DualAtom(a), _)) => Some((a.clone(), true)),
        _ => None,
    };
    let (a1, neg1) = atom(e1)?;
    let (a2, neg2) = atom(e2)?;
    if a1 != a2 || neg1 == neg2 {
        return None;
    }
    // Emit the link with the dual side first.
    if neg1 {
        Some(Process::Link(n1.clone(), n2.clone()))
    } else {
        Some(Process::Link(n2.clone(), n1.clone()))
    }
}

// ---------------------------------------------------------------------------
// Memo keys and witness reconstruction

/// Canonical byte encoding of an annotated-mode state. Message names are
/// replaced by their order of appearance so that states reached with
/// different fresh-name histories compare equal.
fn canonical_key(sctx: &SCtx) -> Vec<u8> {
    use std::fmt::Write;
    let mut rename: BTreeMap<Name, usize> = BTreeMap::new();
    let mut next = 0usize;
    let mut s = String::new();
    for (n, e) in &sctx.entries {
        let _ = write!(s, "{n}|");
        match &e.usage {
            SUsage::Done => s.push('.'),
            SUsage::Active(SType::Ann(t)) => {
                let _ = write!(s, "{t}");
            }
            SUsage::Active(SType::Inf(t, path)) => {
                let _ = write!(s, "?{t}@{path:?}");
            }
        }
        for entry in e.queue.entries() {
            match entry.payload {
                QueuePayload::Star => {
                    let _ = write!(s, ";[{}]*", entry.target);
                }
                QueuePayload::Left => {
                    let _ = write!(s, ";[{}]l", entry.target);
                }
                QueuePayload::Right => {
                    let _ = write!(s, ";[{}]r", entry.target);
                }
                QueuePayload::Msg(ref m, ref t) => {
                    let k = *rename.entry(m.clone()).or_insert_with(|| {
                        let k = next;
                        next += 1;
                        k
                    });
                    let _ = write!(s, ";[{}]#{k}:{t}", entry.target);
                }
            }
        }
        s.push('\n');
    }
    s.into_bytes()
}

/// Rebuild the witness annotation of every endpoint from the final store.
/// Connectives the derivation never exposed get a default target: the first
/// other endpoint, or the endpoint itself in a one-party context.
fn rebuild_witness(
    types: &crate::context::CpContext,
    store: &Store,
    names: &BTreeSet<Name>,
) -> Context {
    let pairs: Vec<(Name, AnnType)> = types
        .iter()
        .map(|(x, t)| {
            let default = names.iter().find(|n| *n != x).unwrap_or(x).clone();
            (x.clone(), rebuild_type(x, t, &mut Vec::new(), store, &default))
        })
        .collect();
    Context::of_types(pairs).expect("witness context is well-formed")
}

fn rebuild_type(
    owner: &Name,
    t: &PlainType,
    path: &mut Path,
    store: &Store,
    default: &Name,
) -> AnnType {
    let target = |path: &Path| match store.get(&(owner.clone(), path.clone())) {
        Some(Choice::Target(u)) => u.clone(),
        _ => default.clone(),
    };
    match t {
        PlainType::Atom(a) => AnnType::Atom(a.clone()),
        PlainType::DualAtom(a) => AnnType::DualAtom(a.clone()),
        PlainType::One => match store.get(&(owner.clone(), path.clone())) {
            Some(Choice::Gather(g)) => AnnType::One(g.clone()),
            _ => AnnType::One(vec![default.clone()]),
        },
        PlainType::Bot => AnnType::Bot(target(path)),
        PlainType::Tensor(l, r) => {
            let u = target(path);
            path.push(1);
            let right = rebuild_type(owner, r, path, store, default);
            path.pop();
            AnnType::tensor((**l).clone(), u, right)
        }
        PlainType::Par(l, r) => {
            let u = target(path);
            path.push(1);
            let right = rebuild_type(owner, r, path, store, default);
            path.pop();
            AnnType::par((**l).clone(), u, right)
        }
        PlainType::Plus(l, r) => {
            let u = target(path);
            path.push(0);
            let left = rebuild_type(owner, l, path, store, default);
            path.pop();
            path.push(1);
            let right = rebuild_type(owner, r, path, store, default);
            path.pop();
            AnnType::plus(left, u, right)
        }
        PlainType::With(l, r) => {
            let u = target(path);
            path.push(0);
            let left = rebuild_type(owner, l, path, store, default);
            path.pop();
            path.push(1);
            let right = rebuild_type(owner, r, path, store, default);
            path.pop();
            AnnType::with(left, u, right)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::CpContext;
    use crate::forwarder::fixtures;
    use crate::syntax::name;

    #[test]
    fn criss_cross_synthesises_the_worked_forwarder() {
        let ctx = fixtures::criss_cross_ctx();
        let found = synth_annotated(&ctx, &SynthConfig::first());
        assert_eq!(found.len(), 1);
        assert!(found[0].0.alpha_eq(&fixtures::criss_cross_forwarder()));
    }

    #[test]
    fn non_dual_atoms_are_not_derivable() {
        let ctx = Context::of_types([
            (name("x"), AnnType::Atom(name("a"))),
            (name("y"), AnnType::Atom(name("a"))),
        ])
        .unwrap();
        assert!(synth_annotated(&ctx, &SynthConfig::all()).is_empty());
    }

    #[test]
    fn gathered_close_first_witness_is_lexicographic() {
        let ctx = Context::of_types([
            (name("x"), AnnType::Bot(name("z"))),
            (name("y"), AnnType::Bot(name("z"))),
            (name("z"), AnnType::One(vec![name("x"), name("y")])),
        ])
        .unwrap();
        let found = synth_annotated(&ctx, &SynthConfig::first());
        let expect = Process::wait(
            name("x"),
            Process::wait(name("y"), Process::Close(name("z"))),
        );
        assert_eq!(found[0].0, expect);

        // Both rule orders are found in all-mode.
        let all = synth_annotated(&ctx, &SynthConfig::all());
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn plain_criss_cross_reconstructs_an_annotation() {
        let types = CpContext::build([
            (
                name("x"),
                PlainType::par(
                    PlainType::dual_atom("name"),
                    PlainType::tensor(PlainType::dual_atom("cost"), PlainType::Bot),
                ),
            ),
            (
                name("y"),
                PlainType::par(
                    PlainType::atom("cost"),
                    PlainType::tensor(PlainType::atom("name"), PlainType::One),
                ),
            ),
        ])
        .unwrap();
        let found = synth_plain(&types, &SynthConfig::first());
        assert!(!found.is_empty());
        let (p, witness, _) = &found[0];
        assert_eq!(witness, &fixtures::criss_cross_ctx());
        assert!(p.alpha_eq(&fixtures::criss_cross_forwarder()));
        // Erasure coherence.
        let erased = crate::context::erase_context(witness).unwrap();
        assert_eq!(&erased, &types);
    }

    #[test]
    fn degenerate_single_one_follows_switch() {
        let types = CpContext::build([(name("x"), PlainType::One)]).unwrap();
        let found = synth_plain(&types, &SynthConfig::first());
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].0, Process::Close(name("x")));
        let strict = SynthConfig { allow_empty_gather: false, ..SynthConfig::first() };
        assert!(synth_plain(&types, &strict).is_empty());
    }

    #[test]
    fn two_bots_without_a_one_are_incompatible() {
        let types = CpContext::build([
            (name("x"), PlainType::Bot),
            (name("y"), PlainType::Bot),
        ])
        .unwrap();
        assert!(synth_plain(&types, &SynthConfig::all()).is_empty());
    }

    #[test]
    fn every_witness_is_sound() {
        let types = CpContext::build([
            (name("x"), PlainType::par(PlainType::dual_atom("a"), PlainType::Bot)),
            (name("y"), PlainType::tensor(PlainType::atom("a"), PlainType::One)),
        ])
        .unwrap();
        let found = synth_plain(&types, &SynthConfig::all());
        assert!(!found.is_empty());
        for (p, w, d) in &found {
            assert_eq!(&d.conclusion, w);
            assert!(check_forwarder_with(p, w, CheckOptions::default()).is_ok());
        }
    }
}
