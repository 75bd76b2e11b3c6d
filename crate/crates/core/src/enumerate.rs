//! Exhaustive families of types and contexts for sweep-style checking.
//!
//! The families are small but complete: every plain (or annotated) type up
//! to a size bound over a one-atom alphabet, and every context assigning
//! such types to a fixed set of endpoints. Annotation targets range over
//! the *other* endpoints of the context and gather lists over the nonempty
//! subsets of the others, matching how the search chooses them; degenerate
//! shapes (self-targets, empty gather lists) are covered by dedicated unit
//! tests instead of the sweeps.
//!
//! Context families are exposed as indexed cartesian products so sweeps can
//! be chunked and parallelised without materialising the whole family.

use crate::context::{Context, CpContext};
use crate::syntax::{AnnType, Name, PlainType};

/// All plain types of `size(t) <= max_size` over the single atom `a`.
/// Sizes are odd (leaf = 1, binary node = 1 + left + right).
pub fn plain_types(max_size: usize, with_additives: bool) -> Vec<PlainType> {
    let mut by_size: Vec<Vec<PlainType>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1] = vec![
            PlainType::atom("a"),
            PlainType::dual_atom("a"),
            PlainType::One,
            PlainType::Bot,
        ];
    }
    for size in 2..=max_size {
        let mut out = Vec::new();
        for lsize in 1..size - 1 {
            let rsize = size - 1 - lsize;
            if rsize == 0 || rsize >= size {
                continue;
            }
            for l in &by_size[lsize] {
                for r in &by_size[rsize] {
                    out.push(PlainType::tensor(l.clone(), r.clone()));
                    out.push(PlainType::par(l.clone(), r.clone()));
                    if with_additives {
                        out.push(PlainType::plus(l.clone(), r.clone()));
                        out.push(PlainType::with(l.clone(), r.clone()));
                    }
                }
            }
        }
        by_size[size] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// Nonempty subsets of `names`, as sorted vectors.
fn nonempty_subsets(names: &[Name]) -> Vec<Vec<Name>> {
    let mut out = Vec::new();
    let n = names.len();
    for mask in 1u32..(1 << n) {
        let subset: Vec<Name> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| names[i].clone())
            .collect();
        out.push(subset);
    }
    out
}

/// All annotated multiplicative types of `size <= max_size` for an endpoint
/// named `owner` in a context with the given `endpoints`.
pub fn ann_types(max_size: usize, owner: &Name, endpoints: &[Name]) -> Vec<AnnType> {
    let others: Vec<Name> = endpoints.iter().filter(|n| *n != owner).cloned().collect();
    let gathers = nonempty_subsets(&others);
    let plains = plain_types(max_size.saturating_sub(2).max(1), false);

    let mut by_size: Vec<Vec<AnnType>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        let mut leaves = vec![AnnType::Atom(Name::new("a")), AnnType::DualAtom(Name::new("a"))];
        for u in &others {
            leaves.push(AnnType::Bot(u.clone()));
        }
        for g in &gathers {
            leaves.push(AnnType::One(g.clone()));
        }
        by_size[1] = leaves;
    }
    for size in 2..=max_size {
        let mut out = Vec::new();
        for lsize in 1..size - 1 {
            let rsize = size - 1 - lsize;
            if rsize == 0 {
                continue;
            }
            for l in plains.iter().filter(|t| t.size() == lsize) {
                for r in &by_size[rsize] {
                    for u in &others {
                        out.push(AnnType::tensor(l.clone(), u.clone(), r.clone()));
                        out.push(AnnType::par(l.clone(), u.clone(), r.clone()));
                    }
                }
            }
        }
        by_size[size] = out;
    }
    by_size.into_iter().flatten().collect()
}

/// An indexed family of contexts: the cartesian product of per-endpoint
/// type menus. `context(i)` decodes index `i` in mixed radix.
pub struct ContextFamily {
    endpoints: Vec<Name>,
    menus: Vec<Vec<AnnType>>,
}

impl ContextFamily {
    /// Annotated multiplicative contexts over `endpoints` with per-endpoint
    /// type size at most `max_size`.
    pub fn annotated(endpoints: &[Name], max_size: usize) -> Self {
        let menus = endpoints
            .iter()
            .map(|owner| ann_types(max_size, owner, endpoints))
            .collect();
        ContextFamily { endpoints: endpoints.to_vec(), menus }
    }

    pub fn len(&self) -> u64 {
        self.menus.iter().map(|m| m.len() as u64).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn context(&self, mut index: u64) -> Context {
        let pairs: Vec<(Name, AnnType)> = self
            .endpoints
            .iter()
            .zip(&self.menus)
            .map(|(n, menu)| {
                let k = (index % menu.len() as u64) as usize;
                index /= menu.len() as u64;
                (n.clone(), menu[k].clone())
            })
            .collect();
        Context::of_types(pairs).expect("enumerated contexts are well-formed")
    }
}

/// An indexed family of plain contexts (multiplicatives plus additives).
pub struct PlainFamily {
    endpoints: Vec<Name>,
    menu: Vec<PlainType>,
}

impl PlainFamily {
    pub fn new(endpoints: &[Name], max_size: usize, with_additives: bool) -> Self {
        PlainFamily {
            endpoints: endpoints.to_vec(),
            menu: plain_types(max_size, with_additives),
        }
    }

    pub fn len(&self) -> u64 {
        (self.menu.len() as u64).pow(self.endpoints.len() as u32)
    }

    pub fn context(&self, mut index: u64) -> CpContext {
        let pairs: Vec<(Name, PlainType)> = self
            .endpoints
            .iter()
            .map(|n| {
                let k = (index % self.menu.len() as u64) as usize;
                index /= self.menu.len() as u64;
                (n.clone(), self.menu[k].clone())
            })
            .collect();
        CpContext::build(pairs).expect("enumerated contexts are well-formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::name;

    #[test]
    fn plain_type_counts() {
        // Leaves: a, ~a, 1, bot. Size three: 2 connectives * 4 * 4 (or 4
        // connectives with additives).
        assert_eq!(plain_types(1, false).len(), 4);
        assert_eq!(plain_types(3, false).len(), 4 + 32);
        assert_eq!(plain_types(3, true).len(), 4 + 64);
        assert_eq!(plain_types(4, true).len(), 4 + 64); // sizes are odd
    }

    #[test]
    fn ann_type_counts_two_party() {
        let (x, y) = (name("x"), name("y"));
        let endpoints = [x.clone(), y.clone()];
        // Leaves: a, ~a, bot[y], 1[y] = 4; size three: 2 conns * 4 lefts *
        // 1 target * 4 rights = 32.
        assert_eq!(ann_types(1, &x, &endpoints).len(), 4);
        assert_eq!(ann_types(4, &x, &endpoints).len(), 36);
    }

    #[test]
    fn family_indexing_is_total() {
        let names = [name("x"), name("y")];
        let fam = ContextFamily::annotated(&names, 4);
        assert_eq!(fam.len(), 36 * 36);
        let ctx = fam.context(fam.len() - 1);
        assert_eq!(ctx.len(), 2);
    }
}
