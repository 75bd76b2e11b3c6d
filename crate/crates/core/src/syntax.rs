//! Names, session types, duality, and the annotation/erasure maps.
//!
//! Types come in two flavours. [`PlainType`] is the ordinary linear-logic
//! formula grammar (atoms, units, tensor/par, plus/with). [`AnnType`]
//! additionally records, on every connective, the endpoint the corresponding
//! message or close token must be forwarded to. The left operand of tensor
//! and par stays plain: it is annotated lazily, at the point where the
//! message it describes is actually consumed.

use std::fmt;
use std::sync::Arc;

/// An endpoint or message name. Compares by exact text.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(text: impl AsRef<str>) -> Self {
        let text = text.as_ref();
        debug_assert!(
            !text.is_empty() && !text.chars().any(char::is_whitespace),
            "names must be nonempty and whitespace-free: {text:?}"
        );
        Name(Arc::from(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

/// Shorthand for building a [`Name`] in tests and examples.
pub fn name(text: &str) -> Name {
    Name::new(text)
}

/// A session type without forwarding annotations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum PlainType {
    Atom(Name),
    DualAtom(Name),
    One,
    Bot,
    Tensor(Box<PlainType>, Box<PlainType>),
    Par(Box<PlainType>, Box<PlainType>),
    Plus(Box<PlainType>, Box<PlainType>),
    With(Box<PlainType>, Box<PlainType>),
}

impl PlainType {
    pub fn atom(a: &str) -> Self {
        PlainType::Atom(Name::new(a))
    }

    pub fn dual_atom(a: &str) -> Self {
        PlainType::DualAtom(Name::new(a))
    }

    pub fn tensor(l: PlainType, r: PlainType) -> Self {
        PlainType::Tensor(Box::new(l), Box::new(r))
    }

    pub fn par(l: PlainType, r: PlainType) -> Self {
        PlainType::Par(Box::new(l), Box::new(r))
    }

    pub fn plus(l: PlainType, r: PlainType) -> Self {
        PlainType::Plus(Box::new(l), Box::new(r))
    }

    pub fn with(l: PlainType, r: PlainType) -> Self {
        PlainType::With(Box::new(l), Box::new(r))
    }

    /// Number of connective and leaf nodes; always at least 1.
    pub fn size(&self) -> usize {
        match self {
            PlainType::Atom(_) | PlainType::DualAtom(_) | PlainType::One | PlainType::Bot => 1,
            PlainType::Tensor(l, r)
            | PlainType::Par(l, r)
            | PlainType::Plus(l, r)
            | PlainType::With(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// True if the type contains no `Plus` or `With`.
    pub fn is_multiplicative(&self) -> bool {
        match self {
            PlainType::Atom(_) | PlainType::DualAtom(_) | PlainType::One | PlainType::Bot => true,
            PlainType::Tensor(l, r) | PlainType::Par(l, r) => {
                l.is_multiplicative() && r.is_multiplicative()
            }
            PlainType::Plus(..) | PlainType::With(..) => false,
        }
    }
}

/// A session type whose connectives carry forwarding targets.
///
/// `One` carries the collection of endpoints whose close tokens it gathers;
/// the list is kept in insertion order but compared as a set of distinct
/// names. The left operand of `Tensor`/`Par` is plain by construction.
#[derive(Clone, Eq, Debug)]
pub enum AnnType {
    Atom(Name),
    DualAtom(Name),
    One(Vec<Name>),
    Bot(Name),
    Tensor(Box<PlainType>, Name, Box<AnnType>),
    Par(Box<PlainType>, Name, Box<AnnType>),
    Plus(Box<AnnType>, Name, Box<AnnType>),
    With(Box<AnnType>, Name, Box<AnnType>),
}

impl PartialEq for AnnType {
    fn eq(&self, other: &Self) -> bool {
        use AnnType::*;
        match (self, other) {
            (Atom(a), Atom(b)) | (DualAtom(a), DualAtom(b)) => a == b,
            (One(us), One(vs)) => {
                let mut us: Vec<_> = us.clone();
                let mut vs: Vec<_> = vs.clone();
                us.sort();
                vs.sort();
                us == vs
            }
            (Bot(u), Bot(v)) => u == v,
            (Tensor(l1, u1, r1), Tensor(l2, u2, r2)) | (Par(l1, u1, r1), Par(l2, u2, r2)) => {
                l1 == l2 && u1 == u2 && r1 == r2
            }
            (Plus(l1, u1, r1), Plus(l2, u2, r2)) | (With(l1, u1, r1), With(l2, u2, r2)) => {
                l1 == l2 && u1 == u2 && r1 == r2
            }
            _ => false,
        }
    }
}

impl std::hash::Hash for AnnType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        use AnnType::*;
        std::mem::discriminant(self).hash(state);
        match self {
            Atom(a) | DualAtom(a) => a.hash(state),
            One(us) => {
                let mut us = us.clone();
                us.sort();
                us.hash(state);
            }
            Bot(u) => u.hash(state),
            Tensor(l, u, r) | Par(l, u, r) => {
                l.hash(state);
                u.hash(state);
                r.hash(state);
            }
            Plus(l, u, r) | With(l, u, r) => {
                l.hash(state);
                u.hash(state);
                r.hash(state);
            }
        }
    }
}

impl AnnType {
    pub fn tensor(l: PlainType, target: Name, r: AnnType) -> Self {
        AnnType::Tensor(Box::new(l), target, Box::new(r))
    }

    pub fn par(l: PlainType, target: Name, r: AnnType) -> Self {
        AnnType::Par(Box::new(l), target, Box::new(r))
    }

    pub fn plus(l: AnnType, target: Name, r: AnnType) -> Self {
        AnnType::Plus(Box::new(l), target, Box::new(r))
    }

    pub fn with(l: AnnType, target: Name, r: AnnType) -> Self {
        AnnType::With(Box::new(l), target, Box::new(r))
    }

    pub fn size(&self) -> usize {
        match self {
            AnnType::Atom(_) | AnnType::DualAtom(_) | AnnType::One(_) | AnnType::Bot(_) => 1,
            AnnType::Tensor(l, _, r) | AnnType::Par(l, _, r) => 1 + l.size() + r.size(),
            AnnType::Plus(l, _, r) | AnnType::With(l, _, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        match self {
            AnnType::Atom(_) | AnnType::DualAtom(_) | AnnType::One(_) | AnnType::Bot(_) => true,
            AnnType::Tensor(l, _, r) | AnnType::Par(l, _, r) => {
                l.is_multiplicative() && r.is_multiplicative()
            }
            AnnType::Plus(..) | AnnType::With(..) => false,
        }
    }

    /// Every forwarding target mentioned anywhere in the type.
    pub fn targets(&self) -> Vec<&Name> {
        let mut out = Vec::new();
        self.collect_targets(&mut out);
        out
    }

    fn collect_targets<'a>(&'a self, out: &mut Vec<&'a Name>) {
        match self {
            AnnType::Atom(_) | AnnType::DualAtom(_) => {}
            AnnType::One(us) => out.extend(us.iter()),
            AnnType::Bot(u) => out.push(u),
            AnnType::Tensor(_, u, r) | AnnType::Par(_, u, r) => {
                out.push(u);
                r.collect_targets(out);
            }
            AnnType::Plus(l, u, r) | AnnType::With(l, u, r) => {
                out.push(u);
                l.collect_targets(out);
                r.collect_targets(out);
            }
        }
    }
}

impl fmt::Display for PlainType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlainType::Atom(a) => write!(f, "{a}"),
            PlainType::DualAtom(a) => write!(f, "~{a}"),
            PlainType::One => write!(f, "1"),
            PlainType::Bot => write!(f, "bot"),
            PlainType::Tensor(l, r) => write!(f, "({l} * {r})"),
            PlainType::Par(l, r) => write!(f, "({l} @ {r})"),
            PlainType::Plus(l, r) => write!(f, "({l} + {r})"),
            PlainType::With(l, r) => write!(f, "({l} & {r})"),
        }
    }
}

impl fmt::Display for AnnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnType::Atom(a) => write!(f, "{a}"),
            AnnType::DualAtom(a) => write!(f, "~{a}"),
            AnnType::One(us) => {
                write!(f, "1[")?;
                for (i, u) in us.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{u}")?;
                }
                write!(f, "]")
            }
            AnnType::Bot(u) => write!(f, "bot[{u}]"),
            AnnType::Tensor(l, u, r) => write!(f, "({l} * {r})[{u}]"),
            AnnType::Par(l, u, r) => write!(f, "({l} @ {r})[{u}]"),
            AnnType::Plus(l, u, r) => write!(f, "({l} + {r})[{u}]"),
            AnnType::With(l, u, r) => write!(f, "({l} & {r})[{u}]"),
        }
    }
}

/// De Morgan dual: swaps `Atom`/`DualAtom`, `One`/`Bot`, `Tensor`/`Par`,
/// `Plus`/`With`, recursing on operands. Involutive.
pub fn dual(t: &PlainType) -> PlainType {
    match t {
        PlainType::Atom(a) => PlainType::DualAtom(a.clone()),
        PlainType::DualAtom(a) => PlainType::Atom(a.clone()),
        PlainType::One => PlainType::Bot,
        PlainType::Bot => PlainType::One,
        PlainType::Tensor(l, r) => PlainType::par(dual(l), dual(r)),
        PlainType::Par(l, r) => PlainType::tensor(dual(l), dual(r)),
        PlainType::Plus(l, r) => PlainType::with(dual(l), dual(r)),
        PlainType::With(l, r) => PlainType::plus(dual(l), dual(r)),
    }
}

/// Annotate every connective of `t` with the single target `x`.
///
/// `One` gets the singleton list `[x]`; the left operands of `Tensor` and
/// `Par` stay plain, as the grammar demands.
pub fn annotate(t: &PlainType, x: &Name) -> AnnType {
    match t {
        PlainType::Atom(a) => AnnType::Atom(a.clone()),
        PlainType::DualAtom(a) => AnnType::DualAtom(a.clone()),
        PlainType::One => AnnType::One(vec![x.clone()]),
        PlainType::Bot => AnnType::Bot(x.clone()),
        PlainType::Tensor(l, r) => AnnType::tensor((**l).clone(), x.clone(), annotate(r, x)),
        PlainType::Par(l, r) => AnnType::par((**l).clone(), x.clone(), annotate(r, x)),
        PlainType::Plus(l, r) => AnnType::plus(annotate(l, x), x.clone(), annotate(r, x)),
        PlainType::With(l, r) => AnnType::with(annotate(l, x), x.clone(), annotate(r, x)),
    }
}

/// Strip all annotations. Inverse of [`annotate`]: `erase(annotate(t, x)) == t`.
pub fn erase(t: &AnnType) -> PlainType {
    match t {
        AnnType::Atom(a) => PlainType::Atom(a.clone()),
        AnnType::DualAtom(a) => PlainType::DualAtom(a.clone()),
        AnnType::One(_) => PlainType::One,
        AnnType::Bot(_) => PlainType::Bot,
        AnnType::Tensor(l, _, r) => PlainType::tensor((**l).clone(), erase(r)),
        AnnType::Par(l, _, r) => PlainType::par((**l).clone(), erase(r)),
        AnnType::Plus(l, _, r) => PlainType::plus(erase(l), erase(r)),
        AnnType::With(l, _, r) => PlainType::with(erase(l), erase(r)),
    }
}

/// Structural dual of an annotated type, keeping targets in place.
///
/// Only defined on uniformly single-annotated formulas: a `One` whose list
/// is not a singleton has no annotated dual (the dual of a gathering unit is
/// not representable), in which case `None` is returned.
pub fn ann_dual(t: &AnnType) -> Option<AnnType> {
    Some(match t {
        AnnType::Atom(a) => AnnType::DualAtom(a.clone()),
        AnnType::DualAtom(a) => AnnType::Atom(a.clone()),
        AnnType::One(us) => match us.as_slice() {
            [u] => AnnType::Bot(u.clone()),
            _ => return None,
        },
        AnnType::Bot(u) => AnnType::One(vec![u.clone()]),
        AnnType::Tensor(l, u, r) => AnnType::par(dual(l), u.clone(), ann_dual(r)?),
        AnnType::Par(l, u, r) => AnnType::tensor(dual(l), u.clone(), ann_dual(r)?),
        AnnType::Plus(l, u, r) => AnnType::with(ann_dual(l)?, u.clone(), ann_dual(r)?),
        AnnType::With(l, u, r) => AnnType::plus(ann_dual(l)?, u.clone(), ann_dual(r)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn criss_cross_x() -> PlainType {
        // name^ @ (cost^ * bot)
        PlainType::par(
            PlainType::dual_atom("name"),
            PlainType::tensor(PlainType::dual_atom("cost"), PlainType::Bot),
        )
    }

    #[test]
    fn dual_swaps_atoms() {
        assert_eq!(dual(&PlainType::atom("a")), PlainType::dual_atom("a"));
    }

    #[test]
    fn dual_of_criss_cross_type() {
        // Dualising x's protocol yields cost/name in positive polarity with a
        // trailing unit.
        let expect = PlainType::tensor(
            PlainType::atom("name"),
            PlainType::par(PlainType::atom("cost"), PlainType::One),
        );
        assert_eq!(dual(&criss_cross_x()), expect);
    }

    #[test]
    fn annotate_forces_singleton_one_and_plain_lefts() {
        let x = name("x");
        assert_eq!(annotate(&PlainType::atom("a"), &x), AnnType::Atom(name("a")));
        assert_eq!(annotate(&PlainType::One, &x), AnnType::One(vec![x.clone()]));

        let t = PlainType::par(
            PlainType::atom("cost"),
            PlainType::tensor(PlainType::atom("name"), PlainType::One),
        );
        let ann = annotate(&t, &x);
        let expect = AnnType::par(
            PlainType::atom("cost"),
            x.clone(),
            AnnType::tensor(PlainType::atom("name"), x.clone(), AnnType::One(vec![x.clone()])),
        );
        assert_eq!(ann, expect);
        assert_eq!(erase(&ann), t);
    }

    #[test]
    fn one_lists_compare_as_sets() {
        let a = AnnType::One(vec![name("x"), name("y")]);
        let b = AnnType::One(vec![name("y"), name("x")]);
        assert_eq!(a, b);
    }

    #[test]
    fn ann_dual_undefined_on_gathering_one() {
        let t = AnnType::One(vec![name("x"), name("y")]);
        assert_eq!(ann_dual(&t), None);
    }

    prop_compose! {
        fn arb_leaf()(k in 0..4usize) -> PlainType {
            match k {
                0 => PlainType::atom("a"),
                1 => PlainType::dual_atom("a"),
                2 => PlainType::One,
                _ => PlainType::Bot,
            }
        }
    }

    fn arb_plain() -> impl Strategy<Value = PlainType> {
        arb_leaf().prop_recursive(4, 32, 2, |inner| {
            (0..4usize, inner.clone(), inner).prop_map(|(k, l, r)| match k {
                0 => PlainType::tensor(l, r),
                1 => PlainType::par(l, r),
                2 => PlainType::plus(l, r),
                _ => PlainType::with(l, r),
            })
        })
    }

    proptest! {
        #[test]
        fn dual_is_involutive(t in arb_plain()) {
            prop_assert_eq!(dual(&dual(&t)), t);
        }

        #[test]
        fn erase_annotate_roundtrip(t in arb_plain()) {
            let x = name("x");
            prop_assert_eq!(erase(&annotate(&t, &x)), t);
        }

        #[test]
        fn dual_commutes_with_annotate(t in arb_plain()) {
            let x = name("x");
            let d = ann_dual(&annotate(&t, &x)).expect("uniformly single-annotated");
            prop_assert_eq!(erase(&d), dual(&t));
            prop_assert_eq!(d, annotate(&dual(&t), &x));
        }

        #[test]
        fn dual_preserves_size(t in arb_plain()) {
            prop_assert_eq!(dual(&t).size(), t.size());
        }
    }
}
