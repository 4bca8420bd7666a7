//! Random networks and an enumeration oracle that reads the document form
//! directly, independent of the engine's factor algebra.

use std::collections::{BTreeMap, BTreeSet};

use dst_core::elimination::{brute_force_joint, eliminate};
use dst_core::network::{ConstraintDoc, CptDoc, NetworkDoc, VariableDoc, NETWORK_FORMAT};
use dst_core::query::{query_resolved, Targets};
use dst_core::{Factor, Network, StateSpace, UtilityNode, VarId, VariableKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const REL_TOL: f64 = 1e-12;

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1e-300)
}

pub fn random_factor(rng: &mut ChaCha8Rng, scope: Vec<VarId>, cards: &[usize]) -> Factor {
    let c: Vec<usize> = scope.iter().map(|v| cards[v.index()]).collect();
    let n: usize = c.iter().product();
    let data = (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(0.01..1.0)
            }
        })
        .collect();
    Factor::new(scope, c, data).unwrap()
}

/// Random Bayesian-network-shaped factor set: one factor per variable over
/// itself and up to three earlier variables.
pub fn random_factors(seed: u64) -> (Vec<Factor>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=12);
    let mut cards: Vec<usize> = (0..n).map(|_| rng.random_range(1..=4)).collect();
    // keep the brute-force joint small enough to enumerate quickly
    while cards.iter().product::<usize>() > 1 << 18 {
        let i = cards.iter().position(|c| *c > 2).unwrap();
        cards[i] = 2;
    }
    let mut factors = Vec::new();
    for v in 0..n {
        let mut scope: Vec<VarId> = (0..v)
            .filter(|_| rng.random_bool(0.3))
            .map(|p| VarId(p as u32))
            .collect();
        scope.truncate(3);
        scope.push(VarId(v as u32));
        factors.push(random_factor(&mut rng, scope, &cards));
    }
    (factors, cards)
}

pub struct RandomId {
    pub doc: NetworkDoc,
    pub cards: Vec<usize>,
    pub kinds: Vec<VariableKind>,
}

pub fn normalize_columns(data: &mut [f64], card: usize) {
    for col in data.chunks_mut(card) {
        let s: f64 = col.iter().sum();
        if s == 0.0 {
            col[0] = 1.0;
        } else {
            col.iter_mut().for_each(|x| *x /= s);
        }
    }
}

/// Random influence diagram: decisions first (the last one may depend on
/// the first through an admissibility table), then chance nodes, then two
/// utilities.
pub fn random_id(seed: u64) -> RandomId {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_dec = rng.random_range(1..=3);
    let n_chance = rng.random_range(1..=7);
    let n = n_dec + n_chance;
    let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
    let name = |i: usize| format!("V{i}");
    let mut kinds = Vec::new();
    let mut variables = Vec::new();
    let mut cpts = Vec::new();
    let mut constraints = Vec::new();
    for i in 0..n {
        let kind = if i < n_dec {
            VariableKind::Decision
        } else {
            VariableKind::Chance
        };
        let parents: Vec<usize> = match kind {
            VariableKind::Decision if i > 0 && i == n_dec - 1 && rng.random_bool(0.5) => vec![0],
            VariableKind::Decision => vec![],
            VariableKind::Chance => {
                let mut p: Vec<usize> = (0..i).filter(|_| rng.random_bool(0.35)).collect();
                p.truncate(3);
                p
            }
        };
        let cells: usize = parents.iter().map(|p| cards[*p]).product::<usize>() * cards[i];
        let mut scope: Vec<String> = parents.iter().map(|p| name(*p)).collect();
        scope.push(name(i));
        match kind {
            VariableKind::Chance => {
                let mut data: Vec<f64> = (0..cells).map(|_| rng.random_range(0.0..1.0)).collect();
                normalize_columns(&mut data, cards[i]);
                cpts.push(CptDoc {
                    node: name(i),
                    scope,
                    data,
                    reconstructed: false,
                    reconstructed_columns: vec![],
                    source: None,
                });
            }
            VariableKind::Decision if !parents.is_empty() => {
                let mut data: Vec<f64> = (0..cells)
                    .map(|_| if rng.random_bool(0.7) { 1.0 } else { 0.0 })
                    .collect();
                for col in data.chunks_mut(cards[i]) {
                    if col.iter().all(|x| *x == 0.0) {
                        col[0] = 1.0;
                    }
                }
                constraints.push(ConstraintDoc {
                    node: name(i),
                    scope,
                    data,
                    reason: "test constraint".into(),
                });
            }
            VariableKind::Decision => {}
        }
        kinds.push(kind);
        variables.push(VariableDoc {
            id: name(i),
            name: name(i),
            kind,
            states: StateSpace::labeled((0..cards[i]).map(|s| format!("s{s}"))),
            parents: parents.iter().map(|p| name(*p)).collect(),
            units: None,
        });
    }
    let mut utilities = Vec::new();
    for u in 0..2 {
        let mut parents: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.3)).collect();
        parents.truncate(3);
        if parents.is_empty() {
            parents.push(n - 1);
        }
        let cells: usize = parents.iter().map(|p| cards[*p]).product();
        utilities.push(UtilityNode {
            id: format!("U{u}"),
            name: format!("U{u}"),
            parent_ids: vec![],
            parents: parents.iter().map(|p| name(*p)).collect(),
            table: (0..cells).map(|_| rng.random_range(-100.0..0.0)).collect(),
            units: "x".into(),
        });
    }
    RandomId {
        doc: NetworkDoc {
            format: NETWORK_FORMAT.into(),
            variables,
            cpts,
            constraints,
            utilities,
        },
        cards,
        kinds,
    }
}

/// Joint over all variables by enumeration straight from the document, with
/// unlocked decisions uniform over their admissible states.
pub fn oracle_joint(id: &RandomId) -> Vec<(Vec<usize>, f64)> {
    let n = id.cards.len();
    let index = |doc_scope: &[String], states: &[usize]| -> usize {
        let mut k = 0;
        for s in doc_scope {
            let v: usize = s[1..].parse().unwrap();
            k = k * id.cards[v] + states[v];
        }
        k
    };
    let total: usize = id.cards.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut states = vec![0; n];
    for _ in 0..total {
        let mut p = 1.0;
        for c in &id.doc.cpts {
            p *= c.data[index(&c.scope, &states)];
        }
        for (i, kind) in id.kinds.iter().enumerate() {
            if *kind != VariableKind::Decision {
                continue;
            }
            let name = format!("V{i}");
            match id.doc.constraints.iter().find(|c| c.node == name) {
                Some(c) => {
                    let here = c.data[index(&c.scope, &states)];
                    let base = index(&c.scope, &states) - states[i];
                    let admissible: f64 = c.data[base..base + id.cards[i]].iter().sum();
                    p *= here / admissible;
                }
                None => p /= id.cards[i] as f64,
            }
        }
        out.push((states.clone(), p));
        for d in (0..n).rev() {
            states[d] += 1;
            if states[d] < id.cards[d] {
                break;
            }
            states[d] = 0;
        }
    }
    out
}

fn random_evidence(cards: &[usize], ev_seed: u64) -> BTreeMap<VarId, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(ev_seed);
    let mut evidence = BTreeMap::new();
    for (i, c) in cards.iter().enumerate() {
        if rng.random_bool(0.3) {
            evidence.insert(VarId(i as u32), rng.random_range(0..*c));
        }
    }
    evidence
}

/// Sums the brute-force joint (ascending-id scope, row-major) down to
/// `keep`, keeping only cells that agree with the evidence.
fn brute_marginal(joint: &Factor, evidence: &BTreeMap<VarId, usize>, keep: &[VarId]) -> Vec<f64> {
    let scope = joint.scope();
    let cards = joint.cards();
    let out_cards: Vec<usize> = keep
        .iter()
        .map(|k| cards[scope.iter().position(|v| v == k).unwrap()])
        .collect();
    let mut out = vec![0.0; out_cards.iter().product()];
    let mut states = vec![0usize; scope.len()];
    for p in joint.data() {
        let agrees = evidence
            .iter()
            .all(|(v, s)| states[scope.iter().position(|x| x == v).unwrap()] == *s);
        if agrees {
            let k = keep.iter().zip(&out_cards).fold(0, |k, (v, c)| {
                k * c + states[scope.iter().position(|x| x == v).unwrap()]
            });
            out[k] += p;
        }
        for d in (0..states.len()).rev() {
            states[d] += 1;
            if states[d] < cards[d] {
                break;
            }
            states[d] = 0;
        }
    }
    out
}

/// Elimination on evidence-reduced factors against the brute-force joint,
/// for every single unobserved variable and one pair.
pub fn check_elimination(seed: u64, ev_seed: u64) -> Result<(), String> {
    let (factors, cards) = random_factors(seed);
    let evidence = random_evidence(&cards, ev_seed);
    let reduced: Vec<Factor> = factors
        .iter()
        .map(|f| {
            evidence.iter().fold(f.clone(), |acc, (v, s)| {
                if acc.contains(*v) {
                    acc.reduce(*v, *s).unwrap()
                } else {
                    acc
                }
            })
        })
        .collect();
    let joint = brute_force_joint(&factors).map_err(|e| e.to_string())?;
    let free: Vec<VarId> = (0..cards.len())
        .map(|i| VarId(i as u32))
        .filter(|v| !evidence.contains_key(v))
        .collect();
    let mut keeps: Vec<Vec<VarId>> = free.iter().map(|v| vec![*v]).collect();
    keeps.push(free.iter().take(2).copied().collect());
    for keep in keeps {
        let want = brute_marginal(&joint, &evidence, &keep);
        let set: BTreeSet<VarId> = keep.iter().copied().collect();
        let got = eliminate(&reduced, &set).map_err(|e| e.to_string())?;
        if got.scope() != keep.as_slice() {
            return Err(format!("seed {seed}: scope {:?} vs {:?}", got.scope(), keep));
        }
        for (a, b) in got.data().iter().zip(&want) {
            if !close(*a, *b) {
                return Err(format!("seed {seed}/{ev_seed}: {a} vs {b} over {keep:?}"));
            }
        }
    }
    Ok(())
}

/// Scenario query on a random influence diagram against the enumeration
/// oracle: consistency flag, every posterior and every expected utility.
pub fn check_query(seed: u64, ev_seed: u64) -> Result<(), String> {
    let id = random_id(seed);
    let net = Network::from_doc(&id.doc).map_err(|e| e.to_string())?;
    if !dst_core::network::validate_network(&net).is_empty() {
        return Err(format!("seed {seed}: generated network does not validate"));
    }
    let evidence = random_evidence(&id.cards, ev_seed);
    let joint: Vec<(Vec<usize>, f64)> = oracle_joint(&id)
        .into_iter()
        .filter(|(s, _)| evidence.iter().all(|(v, e)| s[v.index()] == *e))
        .collect();
    let mass: f64 = joint.iter().map(|(_, p)| p).sum();
    let r = query_resolved(&net, &evidence, &Targets::All).map_err(|e| e.to_string())?;
    if r.consistent != (mass > 0.0) {
        return Err(format!(
            "seed {seed}/{ev_seed}: consistent={} but mass {mass}",
            r.consistent
        ));
    }
    if mass == 0.0 {
        return match r.reason {
            Some(_) => Ok(()),
            None => Err("inconsistent result without a reason".into()),
        };
    }
    let within = |a: f64, b: f64| (a - b).abs() <= REL_TOL * b.abs().max(1.0);
    for (i, card) in id.cards.iter().enumerate() {
        let mut m = vec![0.0; *card];
        for (s, p) in &joint {
            m[s[i]] += p / mass;
        }
        let got = &r.posteriors[&format!("V{i}")];
        if !got.iter().zip(&m).all(|(a, b)| within(*a, *b)) {
            return Err(format!("seed {seed}/{ev_seed} V{i}: {got:?} vs {m:?}"));
        }
    }
    for u in &id.doc.utilities {
        let parents: Vec<usize> = u.parents.iter().map(|p| p[1..].parse().unwrap()).collect();
        let eu: f64 = joint
            .iter()
            .map(|(s, p)| {
                let k = parents.iter().fold(0, |k, v| k * id.cards[*v] + s[*v]);
                p / mass * u.table[k]
            })
            .sum();
        let got = r.utilities[&u.id];
        if !within(got, eu) {
            return Err(format!("seed {seed}/{ev_seed} {}: {got} vs {eu}", u.id));
        }
    }
    Ok(())
}
