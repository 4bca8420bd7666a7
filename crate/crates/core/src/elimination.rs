//! Exact sum-product variable elimination and a brute-force reference.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::FactorError;
use crate::factor::{Factor, VarId};

/// Default cap on the number of cells [`brute_force_joint`] will enumerate.
pub const DEFAULT_JOINT_CAP: usize = 10_000_000;

/// Collects every variable's cardinality, failing on disagreement.
fn cardinalities(factors: &[Factor]) -> Result<BTreeMap<VarId, usize>, FactorError> {
    let mut cards = BTreeMap::new();
    for f in factors {
        for (v, c) in f.scope().iter().zip(f.cards()) {
            if let Some(prev) = cards.insert(*v, *c) {
                if prev != *c {
                    return Err(FactorError::StateCountMismatch {
                        var: *v,
                        left: prev,
                        right: *c,
                    });
                }
            }
        }
    }
    Ok(cards)
}

/// Greedy min-fill elimination order for every variable not in `keep`.
/// Ties are broken by the smaller variable id.
pub fn elimination_order(factors: &[Factor], keep: &BTreeSet<VarId>) -> Vec<VarId> {
    let mut adj: BTreeMap<VarId, BTreeSet<VarId>> = BTreeMap::new();
    for f in factors {
        for &u in f.scope() {
            let entry = adj.entry(u).or_default();
            entry.extend(f.scope().iter().copied().filter(|w| *w != u));
        }
    }
    let mut remaining: BTreeSet<VarId> = adj.keys().copied().filter(|v| !keep.contains(v)).collect();
    let mut order = Vec::with_capacity(remaining.len());

    while !remaining.is_empty() {
        let mut best: Option<(usize, VarId)> = None;
        for &v in &remaining {
            let nbrs: Vec<VarId> = adj[&v].iter().copied().collect();
            let mut fill = 0;
            for (i, a) in nbrs.iter().enumerate() {
                for b in &nbrs[i + 1..] {
                    if !adj[a].contains(b) {
                        fill += 1;
                    }
                }
            }
            // BTreeSet iteration is ascending, so strict < keeps the smallest id on ties
            if best.is_none_or(|(f, _)| fill < f) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.expect("remaining is nonempty");
        let nbrs: Vec<VarId> = adj[&v].iter().copied().collect();
        for (i, a) in nbrs.iter().enumerate() {
            for b in &nbrs[i + 1..] {
                adj.get_mut(a).unwrap().insert(*b);
                adj.get_mut(b).unwrap().insert(*a);
            }
        }
        for n in &nbrs {
            adj.get_mut(n).unwrap().remove(&v);
        }
        adj.remove(&v);
        remaining.remove(&v);
        order.push(v);
    }
    order
}

/// Unnormalized joint over `keep`, computed by sum-product elimination.
///
/// The returned factor's scope is `keep` in ascending id order. Every
/// variable in `keep` must be mentioned by at least one factor.
pub fn eliminate(factors: &[Factor], keep: &BTreeSet<VarId>) -> Result<Factor, FactorError> {
    let cards = cardinalities(factors)?;
    if let Some(v) = keep.iter().find(|v| !cards.contains_key(v)) {
        return Err(FactorError::UnknownVariable(*v));
    }
    let order = elimination_order(factors, keep);
    let mut pool: Vec<Factor> = factors.to_vec();
    for v in order {
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = pool.into_iter().partition(|f| f.contains(v));
        pool = rest;
        let mut prod = Factor::scalar(1.0);
        for f in &touching {
            prod = prod.product(f)?;
        }
        pool.push(prod.marginalize(v)?);
    }
    let mut result = Factor::scalar(1.0);
    for f in &pool {
        result = result.product(f)?;
    }
    let order: Vec<VarId> = keep.iter().copied().collect();
    result.permute(&order)
}

/// Full joint by direct enumeration, with the default cell cap.
pub fn brute_force_joint(factors: &[Factor]) -> Result<Factor, FactorError> {
    brute_force_joint_capped(factors, DEFAULT_JOINT_CAP)
}

/// Full joint over every variable, scope in ascending id order. Each cell
/// is the plain product of the matching cell of every factor.
pub fn brute_force_joint_capped(factors: &[Factor], cap: usize) -> Result<Factor, FactorError> {
    let cards = cardinalities(factors)?;
    let scope: Vec<VarId> = cards.keys().copied().collect();
    let card_list: Vec<usize> = cards.values().copied().collect();
    let cells: u128 = card_list.iter().map(|&c| c as u128).product();
    if cells > cap as u128 {
        return Err(FactorError::Capacity { cells, cap });
    }
    let positions: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| {
            f.scope()
                .iter()
                .map(|v| scope.iter().position(|s| s == v).unwrap())
                .collect()
        })
        .collect();

    let total = cells as usize;
    let mut data = Vec::with_capacity(total);
    let mut states = vec![0usize; scope.len()];
    let mut local = Vec::new();
    for _ in 0..total {
        let mut value = 1.0;
        for (f, pos) in factors.iter().zip(&positions) {
            local.clear();
            local.extend(pos.iter().map(|&p| states[p]));
            value *= f.data()[f.index_of(&local)];
        }
        data.push(value);
        for d in (0..states.len()).rev() {
            states[d] += 1;
            if states[d] < card_list[d] {
                break;
            }
            states[d] = 0;
        }
    }
    Factor::new(scope, card_list, data)
}

/// Sums a joint down to `keep` by repeated marginalization.
pub fn marginal_of(joint: &Factor, keep: &BTreeSet<VarId>) -> Result<Factor, FactorError> {
    let mut out = joint.clone();
    for v in joint.scope() {
        if !keep.contains(v) {
            out = out.marginalize(*v)?;
        }
    }
    Ok(out.canonical())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn deterministic_chain_forces_state() {
        // A uniform over 3, B = A, C = (B + 1) mod 3
        let a = Factor::uniform(v(0), 3);
        let mut ab = vec![0.0; 9];
        let mut bc = vec![0.0; 9];
        for s in 0..3 {
            ab[s * 3 + s] = 1.0;
            bc[s * 3 + (s + 1) % 3] = 1.0;
        }
        let ab = Factor::new(vec![v(0), v(1)], vec![3, 3], ab).unwrap();
        let bc = Factor::new(vec![v(1), v(2)], vec![3, 3], bc).unwrap();
        let ev = a.reduce(v(0), 2).unwrap();
        let ab = ab.reduce(v(0), 2).unwrap();
        let out = eliminate(&[ev, ab, bc], &BTreeSet::from([v(2)])).unwrap();
        let out = out.normalized().unwrap();
        assert_eq!(out.data(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn keep_everything_is_plain_product() {
        let a = Factor::new(vec![v(0)], vec![2], vec![0.25, 0.75]).unwrap();
        let ab = Factor::new(vec![v(0), v(1)], vec![2, 2], vec![0.1, 0.9, 0.6, 0.4]).unwrap();
        let keep = BTreeSet::from([v(0), v(1)]);
        let out = eliminate(&[a.clone(), ab.clone()], &keep).unwrap();
        assert_eq!(out, a.product(&ab).unwrap().canonical());
    }

    #[test]
    fn brute_force_single_factor_identity() {
        let ab = Factor::new(vec![v(3), v(1)], vec![2, 3], vec![1., 2., 3., 4., 5., 6.]).unwrap();
        assert_eq!(brute_force_joint(&[ab.clone()]).unwrap(), ab.canonical());
    }

    #[test]
    fn brute_force_cap() {
        let a = Factor::uniform(v(0), 10);
        let b = Factor::uniform(v(1), 10);
        assert!(matches!(
            brute_force_joint_capped(&[a, b], 99),
            Err(FactorError::Capacity { cells: 100, cap: 99 })
        ));
    }

    #[test]
    fn inconsistent_scopes_rejected() {
        let a = Factor::uniform(v(0), 2);
        let b = Factor::uniform(v(0), 3);
        assert!(matches!(
            eliminate(&[a.clone(), b.clone()], &BTreeSet::new()),
            Err(FactorError::StateCountMismatch { .. })
        ));
        assert!(brute_force_joint(&[a, b]).is_err());
    }

    #[test]
    fn min_fill_prefers_leaves_and_smaller_ids() {
        // star around 0 with leaves 1,2,3: leaves have zero fill, center has 3
        let fs: Vec<Factor> = (1..4)
            .map(|i| Factor::new(vec![v(0), v(i)], vec![2, 2], vec![1.0; 4]).unwrap())
            .collect();
        let order = elimination_order(&fs, &BTreeSet::new());
        assert_eq!(order, vec![v(1), v(2), v(0), v(3)]);
    }
}
