//! Identity forwarders and mechanically built compositions.
//!
//! [`identity_forwarder`] produces the fully expanded two-endpoint
//! forwarder between `a` and `b`: every payload is relayed through a fresh
//! session, down to links at the atoms. Read as a plain process (through
//! the embedding) it is the expanded identity between `b : t` and
//! `a : dual t`, which is exactly what a mechanically generated participant
//! of a multiparty session looks like.
//!
//! [`composite_from_witness`] turns a synthesised forwarder for types
//! `x_i : T_i` into a runnable composition: each part is the identity
//! between the cut endpoint `x_i : dual T_i` and a fresh external endpoint
//! `w_i : T_i`, so the composition is typed by the original context and
//! normalising it exercises the full reduction engine.

use std::collections::BTreeSet;

use crate::context::{Context, CpContext};
use crate::process::{FreshNames, MCut, Process};
use crate::syntax::{Name, PlainType};

/// The expanded identity forwarder for `{ a : dual(t)(b), b : t(a) }`.
pub fn identity_forwarder(a: &Name, b: &Name, t: &PlainType, fresh: &mut FreshNames) -> Process {
    let mut avoid = BTreeSet::from([a.clone(), b.clone()]);
    idf(a, b, t, fresh, &mut avoid)
}

fn idf(
    a: &Name,
    b: &Name,
    t: &PlainType,
    fresh: &mut FreshNames,
    avoid: &mut BTreeSet<Name>,
) -> Process {
    match t {
        PlainType::Atom(_) | PlainType::DualAtom(_) => Process::Link(a.clone(), b.clone()),
        PlainType::One => Process::wait(a.clone(), Process::Close(b.clone())),
        PlainType::Bot => Process::wait(b.clone(), Process::Close(a.clone())),
        PlainType::Tensor(l, r) => {
            // a : dual(l) par dual(r), b : l tensor r — receive on a, resend on b.
            let m = fresh.fresh("m", avoid);
            avoid.insert(m.clone());
            let p = fresh.fresh("p", avoid);
            avoid.insert(p.clone());
            let payload = idf(&m, &p, l, fresh, avoid);
            let cont = idf(a, b, r, fresh, avoid);
            Process::recv(a.clone(), m, Process::send(b.clone(), p, payload, cont))
        }
        PlainType::Par(l, r) => {
            // b : l par r — receive on b, resend on a.
            let m = fresh.fresh("m", avoid);
            avoid.insert(m.clone());
            let p = fresh.fresh("p", avoid);
            avoid.insert(p.clone());
            let payload = idf(&p, &m, l, fresh, avoid);
            let cont = idf(a, b, r, fresh, avoid);
            Process::recv(b.clone(), m, Process::send(a.clone(), p, payload, cont))
        }
        PlainType::Plus(l, r) => {
            // b : l plus r selects, a : dual l with dual r offers.
            let left = Process::inl(b.clone(), idf(a, b, l, fresh, avoid));
            let right = Process::inr(b.clone(), idf(a, b, r, fresh, avoid));
            Process::case(a.clone(), left, right)
        }
        PlainType::With(l, r) => {
            let left = Process::inl(a.clone(), idf(a, b, l, fresh, avoid));
            let right = Process::inr(a.clone(), idf(a, b, r, fresh, avoid));
            Process::case(b.clone(), left, right)
        }
    }
}

/// Build a runnable composition from a synthesis witness.
///
/// `witness` is a forwarder context over endpoints `x_i : T_i` (as produced
/// by [`crate::synth::synth_plain`], queues empty) and `forwarder` its
/// process. Each part links `x_i` to a fresh external endpoint `w_i : T_i`;
/// the returned outer context types exactly those `w_i`.
pub fn composite_from_witness(
    forwarder: &Process,
    witness: &Context,
    fresh: &mut FreshNames,
) -> (Process, CpContext) {
    let mut avoid: BTreeSet<Name> = witness.names().cloned().collect();
    avoid.extend(forwarder.free_names());
    let mut parts = Vec::new();
    let mut cut_names = Vec::new();
    let mut outer = Vec::new();
    for (x, st) in witness.iter() {
        let ty = match st.usage.active() {
            Some(t) => crate::syntax::erase(t),
            None => continue,
        };
        let w = fresh.fresh(&format!("w_{x}"), &avoid);
        avoid.insert(w.clone());
        // Part at x : dual T_i, external w : T_i.
        let part = identity_forwarder(x, &w, &ty, fresh);
        cut_names.push(x.clone());
        parts.push(part);
        outer.push((w, ty));
    }
    let m = MCut {
        cut_names,
        fwd_ctx: witness.clone(),
        forwarder: forwarder.clone(),
        transit: Vec::new(),
        parts,
    };
    let outer = CpContext::build(outer).expect("fresh externals are distinct");
    (Process::mcut(m), outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::erase_context;
    use crate::cp::check_cp;
    use crate::forwarder::check_forwarder;
    use crate::syntax::{annotate, dual, name};

    fn idf_ctx(a: &Name, b: &Name, t: &PlainType) -> Context {
        Context::of_types([
            (a.clone(), annotate(&dual(t), b)),
            (b.clone(), annotate(t, a)),
        ])
        .unwrap()
    }

    #[test]
    fn identity_forwarder_checks_at_every_small_type() {
        let leaves = [
            PlainType::atom("a"),
            PlainType::dual_atom("a"),
            PlainType::One,
            PlainType::Bot,
        ];
        let mut types: Vec<PlainType> = leaves.to_vec();
        for l in &leaves {
            for r in &leaves {
                types.push(PlainType::tensor(l.clone(), r.clone()));
                types.push(PlainType::par(l.clone(), r.clone()));
                types.push(PlainType::plus(l.clone(), r.clone()));
                types.push(PlainType::with(l.clone(), r.clone()));
            }
        }
        let (a, b) = (name("a0"), name("b0"));
        for t in &types {
            let mut fresh = FreshNames::new();
            let p = identity_forwarder(&a, &b, t, &mut fresh);
            let ctx = idf_ctx(&a, &b, t);
            let d = check_forwarder(&p, &ctx);
            assert!(d.is_ok(), "identity at {t} failed: {:?}", d.err());
            // And it is a plain process at the erased context.
            let cp = erase_context(&ctx).unwrap();
            assert!(check_cp(&p, &cp).is_ok(), "identity at {t} not plain-typable");
        }
    }
}
