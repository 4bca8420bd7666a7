//! Scenario queries over an influence diagram.
//!
//! Unlocked decisions behave as chance nodes with a uniform distribution
//! (restricted to admissible states when the decision has an admissibility
//! table). Locked nodes are hard evidence. Expected utilities are
//! conditional on the locks.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::elimination::eliminate;
use crate::error::QueryError;
use crate::factor::{Factor, VarId, VariableKind};
use crate::network::Network;

/// Locked states keyed by node id. A state is given by its label, its
/// numeric value for numbered nodes, or `#i` for a raw state index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockSet {
    #[serde(default)]
    pub locks: BTreeMap<String, String>,
}

impl LockSet {
    pub fn new() -> Self {
        LockSet::default()
    }

    pub fn with(mut self, node: impl Into<String>, state: impl Into<String>) -> Self {
        self.insert(node, state);
        self
    }

    pub fn insert(&mut self, node: impl Into<String>, state: impl Into<String>) {
        self.locks.insert(node.into(), state.into());
    }

    pub fn remove(&mut self, node: &str) -> Option<String> {
        self.locks.remove(node)
    }

    pub fn contains(&self, node: &str) -> bool {
        self.locks.contains_key(node)
    }

    pub fn is_empty(&self) -> bool {
        self.locks.is_empty()
    }

    /// Parses `Node=State` pairs as given on a command line.
    pub fn parse_pairs<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<LockSet, String> {
        let mut out = LockSet::new();
        for p in pairs {
            let (node, state) = p
                .split_once('=')
                .ok_or_else(|| format!("lock `{p}` is not of the form Node=State"))?;
            out.insert(node.trim(), state.trim());
        }
        Ok(out)
    }

    /// Resolves every lock against the network.
    pub fn resolve(&self, net: &Network) -> Result<BTreeMap<VarId, usize>, QueryError> {
        self.locks
            .iter()
            .map(|(node, state)| net.resolve_state(node, state))
            .collect()
    }
}

/// Which nodes get a posterior vector in a [`ScenarioResult`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    /// Every chance and decision node.
    All,
    /// Only the listed nodes.
    Only(BTreeSet<VarId>),
}

/// Outcome of one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Posterior distribution per node id, in state order.
    pub posteriors: BTreeMap<String, Vec<f64>>,
    /// Expected value per utility id. Empty when inconsistent.
    pub utilities: BTreeMap<String, f64>,
}

/// Runs one scenario, returning posteriors for every node.
pub fn query(net: &Network, locks: &LockSet) -> Result<ScenarioResult, QueryError> {
    query_targets(net, locks, &Targets::All)
}

/// Runs one scenario, computing posteriors only for `targets`.
pub fn query_targets(net: &Network, locks: &LockSet, targets: &Targets) -> Result<ScenarioResult, QueryError> {
    let evidence = locks.resolve(net)?;
    Ok(query_resolved(net, &evidence, targets)?)
}

/// Core query on already resolved locks.
pub fn query_resolved(
    net: &Network,
    evidence: &BTreeMap<VarId, usize>,
    targets: &Targets,
) -> Result<ScenarioResult, crate::error::FactorError> {
    let engine = Engine::new(net, evidence)?;

    if engine.total_mass(net)? <= 0.0 {
        return Ok(ScenarioResult {
            consistent: false,
            reason: Some(inconsistency_reason(net, evidence)),
            posteriors: BTreeMap::new(),
            utilities: BTreeMap::new(),
        });
    }

    let wanted: Vec<VarId> = match targets {
        Targets::All => net.ids().collect(),
        Targets::Only(set) => set.iter().copied().collect(),
    };
    let mut posteriors = BTreeMap::new();
    for v in wanted {
        let card = net.variable(v).card();
        let dist = match evidence.get(&v) {
            Some(&s) => {
                let mut d = vec![0.0; card];
                d[s] = 1.0;
                d
            }
            None => {
                let joint = engine.joint(net, &[v])?;
                let z = joint.sum();
                joint.data().iter().map(|x| x / z).collect()
            }
        };
        posteriors.insert(net.variable(v).id.clone(), dist);
    }

    let mut utilities = BTreeMap::new();
    for u in net.utilities() {
        let free: Vec<VarId> = u
            .parent_ids
            .iter()
            .copied()
            .filter(|p| !evidence.contains_key(p))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let joint = engine.joint(net, &free)?;
        let z = joint.sum();
        let cards: Vec<usize> = u.parent_ids.iter().map(|p| net.variable(*p).card()).collect();
        let mut expected = 0.0;
        for (i, &p) in joint.data().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let free_states = joint.states_of(i);
            let idx = u.parent_ids.iter().zip(&cards).fold(0, |acc, (pid, c)| {
                let s = match evidence.get(pid) {
                    Some(&s) => s,
                    None => free_states[free.iter().position(|f| f == pid).unwrap()],
                };
                acc * c + s
            });
            expected += p / z * u.table[idx];
        }
        utilities.insert(u.id.clone(), expected);
    }

    Ok(ScenarioResult {
        consistent: true,
        reason: None,
        posteriors,
        utilities,
    })
}

/// Evidence-reduced factors of a network, one per node.
struct Engine<'a> {
    evidence: &'a BTreeMap<VarId, usize>,
    /// Factor owned by each node (its CPT or decision prior), reduced.
    factors: Vec<Factor>,
}

impl<'a> Engine<'a> {
    fn new(net: &Network, evidence: &'a BTreeMap<VarId, usize>) -> Result<Self, crate::error::FactorError> {
        let mut factors = Vec::with_capacity(net.variables().len());
        for v in net.ids() {
            let mut f = match net.variable(v).kind {
                VariableKind::Chance => net.cpt(v).expect("chance node has a CPT").factor.clone(),
                VariableKind::Decision => net.decision_prior(v),
            };
            for (&e, &s) in evidence {
                if f.contains(e) {
                    f = f.reduce(e, s)?;
                }
            }
            factors.push(f);
        }
        Ok(Engine { evidence, factors })
    }

    /// Ancestors of `seeds` (inclusive). Nodes outside this set are barren
    /// for a query over `seeds` and contribute a factor of one.
    fn relevant(net: &Network, seeds: impl Iterator<Item = VarId>) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        let mut stack: Vec<VarId> = seeds.collect();
        while let Some(v) = stack.pop() {
            if out.insert(v) {
                stack.extend(net.parents(v).iter().copied());
            }
        }
        out
    }

    /// Unnormalized joint over `keep` (ascending id order) given the evidence.
    fn joint(&self, net: &Network, keep: &[VarId]) -> Result<Factor, crate::error::FactorError> {
        let nodes = Self::relevant(net, keep.iter().copied().chain(self.evidence.keys().copied()));
        let factors: Vec<Factor> = nodes.iter().map(|v| self.factors[v.index()].clone()).collect();
        let keep: BTreeSet<VarId> = keep.iter().copied().collect();
        eliminate(&factors, &keep)
    }

    fn total_mass(&self, net: &Network) -> Result<f64, crate::error::FactorError> {
        Ok(self.joint(net, &[])?.sum())
    }
}

/// Explains why a set of locks has zero probability.
fn inconsistency_reason(net: &Network, evidence: &BTreeMap<VarId, usize>) -> String {
    let describe = |v: VarId, s: usize| {
        let var = net.variable(v);
        format!("{}={}", var.id, var.states.label(s))
    };
    // An admissibility table that rules out the locked combination outright.
    for d in net.decision_ids() {
        let Some(c) = net.constraint(d) else { continue };
        if !c.factor.scope().iter().all(|v| evidence.contains_key(v)) {
            continue;
        }
        let mut f = c.factor.clone();
        for v in c.factor.scope() {
            f = f.reduce(*v, evidence[v]).expect("evidence is in range");
        }
        if f.sum() == 0.0 {
            let locked = c
                .factor
                .scope()
                .iter()
                .map(|v| describe(*v, evidence[v]))
                .collect::<Vec<_>>()
                .join(", ");
            return format!("inadmissible combination {locked}: {}", c.reason);
        }
    }
    let locked = evidence
        .iter()
        .map(|(v, s)| describe(*v, *s))
        .collect::<Vec<_>>()
        .join(", ");
    format!("the locked states have zero joint probability ({locked})")
}

/// Runs one query per state of decision `d`, other locks held fixed.
pub fn sweep_decision(net: &Network, locks: &LockSet, d: &str) -> Result<Vec<(String, ScenarioResult)>, QueryError> {
    let id = net.var_id(d).ok_or_else(|| QueryError::UnknownNode {
        name: d.to_string(),
        suggestion: crate::network::nearest(d, net.variables().iter().map(|v| v.id.as_str())),
    })?;
    if net.variable(id).kind != VariableKind::Decision {
        return Err(QueryError::NotADecision(d.to_string()));
    }
    if locks.contains(d) {
        return Err(QueryError::AlreadyLocked(d.to_string()));
    }
    let base = locks.resolve(net)?;
    let space = &net.variable(id).states;
    (0..space.len())
        .map(|s| {
            let mut ev = base.clone();
            ev.insert(id, s);
            Ok((space.label(s), query_resolved(net, &ev, &Targets::All)?))
        })
        .collect()
}

/// One row of a [`Comparison`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub locks: LockSet,
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Expected value per utility, in [`Comparison::utilities`] order.
    /// `None` for inconsistent rows.
    pub values: Vec<Option<f64>>,
}

/// Scenarios as rows, utilities as columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub utilities: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Evaluates every scenario and tabulates its expected utilities.
pub fn compare_scenarios(net: &Network, scenarios: &[LockSet]) -> Result<Comparison, QueryError> {
    if scenarios.is_empty() {
        return Err(QueryError::NoScenarios);
    }
    let utilities: Vec<String> = net.utilities().iter().map(|u| u.id.clone()).collect();
    let rows = scenarios
        .iter()
        .map(|locks| {
            let r = query_targets(net, locks, &Targets::Only(BTreeSet::new()))?;
            Ok(ComparisonRow {
                locks: locks.clone(),
                consistent: r.consistent,
                reason: r.reason,
                values: utilities.iter().map(|u| r.utilities.get(u).copied()).collect(),
            })
        })
        .collect::<Result<Vec<_>, QueryError>>()?;
    Ok(Comparison { utilities, rows })
}
