//! Influence-diagram container and its JSON file format.
//!
//! A [`Network`] holds chance and decision variables, one CPT per chance
//! variable, optional admissibility tables for decisions with parents, and
//! utility tables. Construction only checks that references resolve and
//! tables have the right size; [`validate_network`] performs the semantic
//! checks (acyclicity, normalization, scope consistency).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ModelError, QueryError};
use crate::factor::{Factor, StateSpace, VarId, Variable, VariableKind};

/// Format tag written into every network file.
pub const NETWORK_FORMAT: &str = "dst-network/1";

const NORMALIZATION_TOL: f64 = 1e-9;

/// Conditional probability table of a chance variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    /// Scope is `parents ++ [child]`.
    pub factor: Factor,
    /// Parent configurations whose column was inferred rather than transcribed.
    pub reconstructed_columns: Vec<usize>,
    pub source: Option<String>,
}

/// 0/1 table restricting which states of a decision are admissible for
/// each configuration of its parents.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionConstraint {
    /// Scope is `parents ++ [decision]`.
    pub factor: Factor,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilityNode {
    pub id: String,
    pub name: String,
    #[serde(skip)]
    pub parent_ids: Vec<VarId>,
    pub parents: Vec<String>,
    /// One value per parent configuration, row-major in `parents` order.
    pub table: Vec<f64>,
    pub units: String,
}

/// An immutable influence diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    variables: Vec<Variable>,
    index: HashMap<String, VarId>,
    parents: Vec<Vec<VarId>>,
    cpts: Vec<Option<Cpt>>,
    constraints: Vec<Option<DecisionConstraint>>,
    utilities: Vec<UtilityNode>,
}

// ---------------------------------------------------------------------------
// File format

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub format: String,
    pub variables: Vec<VariableDoc>,
    pub cpts: Vec<CptDoc>,
    #[serde(default)]
    pub constraints: Vec<ConstraintDoc>,
    pub utilities: Vec<UtilityNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariableDoc {
    pub id: String,
    pub name: String,
    pub kind: VariableKind,
    pub states: StateSpace,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptDoc {
    pub node: String,
    pub scope: Vec<String>,
    pub data: Vec<f64>,
    #[serde(default)]
    pub reconstructed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reconstructed_columns: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDoc {
    pub node: String,
    pub scope: Vec<String>,
    pub data: Vec<f64>,
    pub reason: String,
}

impl Network {
    /// Builds a network from its document form. Only referential integrity
    /// and table sizes are checked here.
    pub fn from_doc(doc: &NetworkDoc) -> Result<Network, ModelError> {
        let mut index = HashMap::new();
        let mut variables = Vec::with_capacity(doc.variables.len());
        for (i, v) in doc.variables.iter().enumerate() {
            if index.insert(v.id.clone(), VarId(i as u32)).is_some() {
                return Err(ModelError::DuplicateVariable(v.id.clone()));
            }
            variables.push(Variable {
                id: v.id.clone(),
                name: v.name.clone(),
                kind: v.kind,
                states: v.states.clone(),
                units: v.units.clone(),
            });
        }
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| ModelError::UnknownVariable(id.to_string()))
        };
        let parents = doc
            .variables
            .iter()
            .map(|v| v.parents.iter().map(|p| lookup(p)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;

        let table = |node: &str, scope: &[String], data: &[f64]| -> Result<Factor, ModelError> {
            let ids = scope.iter().map(|s| lookup(s)).collect::<Result<Vec<_>, _>>()?;
            let cards = ids.iter().map(|v| variables[v.index()].card()).collect();
            Factor::new(ids, cards, data.to_vec()).map_err(|e| ModelError::Table {
                node: node.to_string(),
                reason: e.to_string(),
            })
        };

        let mut cpts = vec![None; variables.len()];
        for c in &doc.cpts {
            let node = lookup(&c.node)?;
            let factor = table(&c.node, &c.scope, &c.data)?;
            if cpts[node.index()].is_some() {
                return Err(ModelError::Table {
                    node: c.node.clone(),
                    reason: "more than one CPT".into(),
                });
            }
            cpts[node.index()] = Some(Cpt {
                factor,
                reconstructed_columns: c.reconstructed_columns.clone(),
                source: c.source.clone(),
            });
        }
        let mut constraints = vec![None; variables.len()];
        for c in &doc.constraints {
            let node = lookup(&c.node)?;
            constraints[node.index()] = Some(DecisionConstraint {
                factor: table(&c.node, &c.scope, &c.data)?,
                reason: c.reason.clone(),
            });
        }
        let mut utilities = Vec::with_capacity(doc.utilities.len());
        for u in &doc.utilities {
            if index.contains_key(&u.id) || utilities.iter().any(|x: &UtilityNode| x.id == u.id) {
                return Err(ModelError::DuplicateVariable(u.id.clone()));
            }
            let parent_ids = u.parents.iter().map(|p| lookup(p)).collect::<Result<Vec<_>, _>>()?;
            let expected: usize = parent_ids.iter().map(|p| variables[p.index()].card()).product();
            if u.table.len() != expected {
                return Err(ModelError::Table {
                    node: u.id.clone(),
                    reason: format!("utility table has {} values, expected {expected}", u.table.len()),
                });
            }
            if u.table.iter().any(|x| !x.is_finite()) {
                return Err(ModelError::Table {
                    node: u.id.clone(),
                    reason: "utility values must be finite".into(),
                });
            }
            utilities.push(UtilityNode {
                parent_ids,
                ..u.clone()
            });
        }
        Ok(Network {
            variables,
            index,
            parents,
            cpts,
            constraints,
            utilities,
        })
    }

    pub fn to_doc(&self) -> NetworkDoc {
        let name = |v: &VarId| self.variables[v.index()].id.clone();
        let variables = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| VariableDoc {
                id: v.id.clone(),
                name: v.name.clone(),
                kind: v.kind,
                states: v.states.clone(),
                parents: self.parents[i].iter().map(name).collect(),
                units: v.units.clone(),
            })
            .collect();
        let cpts = self
            .cpts
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
            .map(|(i, c)| CptDoc {
                node: self.variables[i].id.clone(),
                scope: c.factor.scope().iter().map(name).collect(),
                data: c.factor.data().to_vec(),
                reconstructed: !c.reconstructed_columns.is_empty(),
                reconstructed_columns: c.reconstructed_columns.clone(),
                source: c.source.clone(),
            })
            .collect();
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
            .map(|(i, c)| ConstraintDoc {
                node: self.variables[i].id.clone(),
                scope: c.factor.scope().iter().map(name).collect(),
                data: c.factor.data().to_vec(),
                reason: c.reason.clone(),
            })
            .collect();
        NetworkDoc {
            format: NETWORK_FORMAT.to_string(),
            variables,
            cpts,
            constraints,
            utilities: self.utilities.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("network serializes")
    }

    pub fn from_json(text: &str) -> Result<Network, ModelError> {
        let doc: NetworkDoc = serde_json::from_str(text)?;
        Network::from_doc(&doc)
    }

    /// Short content hash of the serialized network.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest[..6].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.index()]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.variables.len()).map(|i| VarId(i as u32))
    }

    pub fn parents(&self, id: VarId) -> &[VarId] {
        &self.parents[id.index()]
    }

    pub fn cpt(&self, id: VarId) -> Option<&Cpt> {
        self.cpts[id.index()].as_ref()
    }

    pub fn constraint(&self, id: VarId) -> Option<&DecisionConstraint> {
        self.constraints[id.index()].as_ref()
    }

    pub fn utilities(&self) -> &[UtilityNode] {
        &self.utilities
    }

    pub fn utility(&self, id: &str) -> Option<&UtilityNode> {
        self.utilities.iter().find(|u| u.id == id)
    }

    pub fn chance_ids(&self) -> Vec<VarId> {
        self.ids()
            .filter(|v| self.variable(*v).kind == VariableKind::Chance)
            .collect()
    }

    pub fn decision_ids(&self) -> Vec<VarId> {
        self.ids()
            .filter(|v| self.variable(*v).kind == VariableKind::Decision)
            .collect()
    }

    /// Replaces the CPT of `node`. The new table must have the same scope.
    pub fn with_cpt(&self, node: VarId, cpt: Cpt) -> Result<Network, ModelError> {
        let old = self.cpt(node).ok_or_else(|| ModelError::Table {
            node: self.variable(node).id.clone(),
            reason: "node has no CPT".into(),
        })?;
        if old.factor.scope() != cpt.factor.scope() {
            return Err(ModelError::Table {
                node: self.variable(node).id.clone(),
                reason: "replacement CPT has a different scope".into(),
            });
        }
        let mut out = self.clone();
        out.cpts[node.index()] = Some(cpt);
        Ok(out)
    }

    /// Replaces a utility table, keeping its parents.
    pub fn with_utility_table(&self, id: &str, table: Vec<f64>) -> Result<Network, ModelError> {
        let mut out = self.clone();
        let u = out
            .utilities
            .iter_mut()
            .find(|u| u.id == id)
            .ok_or_else(|| ModelError::UnknownVariable(id.to_string()))?;
        if u.table.len() != table.len() {
            return Err(ModelError::Table {
                node: id.to_string(),
                reason: "replacement table has the wrong length".into(),
            });
        }
        u.table = table;
        Ok(out)
    }

    /// Prior factor of a decision as used by queries: its admissibility
    /// table with every column scaled to a uniform distribution over the
    /// admissible states, or a plain uniform table when it has none.
    pub fn decision_prior(&self, id: VarId) -> Factor {
        let card = self.variable(id).card();
        match self.constraint(id) {
            None => Factor::uniform(id, card),
            Some(c) => {
                let mut data = c.factor.data().to_vec();
                for col in data.chunks_mut(card) {
                    let s: f64 = col.iter().sum();
                    if s > 0.0 {
                        col.iter_mut().for_each(|x| *x /= s);
                    }
                }
                Factor::new(c.factor.scope().to_vec(), c.factor.cards().to_vec(), data)
                    .expect("same shape as the constraint")
            }
        }
    }

    /// Equivalent network in which every decision is a chance node whose
    /// CPT is its [`Network::decision_prior`].
    pub fn with_decisions_as_chance(&self) -> Network {
        let mut out = self.clone();
        for id in self.decision_ids() {
            let mut prior = self.decision_prior(id);
            let mut order = self.parents(id).to_vec();
            order.push(id);
            prior = prior.permute(&order).expect("prior scope is parents + self");
            out.variables[id.index()].kind = VariableKind::Chance;
            out.cpts[id.index()] = Some(Cpt {
                factor: prior,
                reconstructed_columns: vec![],
                source: None,
            });
            out.constraints[id.index()] = None;
        }
        out
    }

    /// Resolves a `node` / `state` pair from user input. The state may be a
    /// label, a numbered value, or `#i` for a raw index.
    pub fn resolve_state(&self, node: &str, state: &str) -> Result<(VarId, usize), QueryError> {
        let id = self.var_id(node).ok_or_else(|| {
            if self.utility(node).is_some() {
                return QueryError::NotLockable(node.to_string());
            }
            QueryError::UnknownNode {
                name: node.to_string(),
                suggestion: nearest(node, self.variables.iter().map(|v| v.id.as_str())),
            }
        })?;
        let space = &self.variable(id).states;
        if let Some(i) = state.strip_prefix('#').and_then(|s| s.parse::<usize>().ok()) {
            if i < space.len() {
                return Ok((id, i));
            }
        } else if let Some(i) = space.find(state) {
            return Ok((id, i));
        }
        let labels = space.labels();
        Err(QueryError::UnknownState {
            node: node.to_string(),
            state: state.to_string(),
            suggestion: nearest(state, labels.iter().map(String::as_str)),
        })
    }

    /// Labels of every parent configuration of `vars`, row-major.
    pub fn config_label(&self, vars: &[VarId], states: &[usize]) -> String {
        vars.iter()
            .zip(states)
            .map(|(v, s)| {
                let var = self.variable(*v);
                format!("{}={}", var.id, var.states.label(*s))
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Closest candidate by normalized edit distance, if reasonably close.
pub(crate) fn nearest<'a>(input: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    let lower = input.to_lowercase();
    candidates
        .map(|c| (strsim::normalized_levenshtein(&lower, &c.to_lowercase()), c))
        .filter(|(score, _)| *score > 0.3)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c.to_string())
}

// ---------------------------------------------------------------------------
// Validation

/// A problem found by [`validate_network`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Cycle {
        nodes: Vec<String>,
    },
    InvalidStates {
        node: String,
        reason: String,
    },
    MissingCpt {
        node: String,
    },
    UnexpectedCpt {
        node: String,
    },
    CptScope {
        node: String,
        expected: Vec<String>,
        actual: Vec<String>,
    },
    UnnormalizedCpt {
        node: String,
        parent_config: String,
        sum: f64,
    },
    ConstraintScope {
        node: String,
    },
    ConstraintNotBinary {
        node: String,
    },
    EmptyConstraintColumn {
        node: String,
        parent_config: String,
    },
    UtilityParents {
        node: String,
        reason: String,
    },
    Missing {
        node: String,
    },
    Custom {
        message: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Cycle { nodes } => write!(f, "cycle: {}", nodes.join(" -> ")),
            Diagnostic::InvalidStates { node, reason } => write!(f, "{node}: invalid states: {reason}"),
            Diagnostic::MissingCpt { node } => write!(f, "{node}: chance node has no CPT"),
            Diagnostic::UnexpectedCpt { node } => write!(f, "{node}: decision node has a CPT"),
            Diagnostic::CptScope { node, expected, actual } => write!(
                f,
                "{node}: CPT scope [{}] does not match parents + self [{}]",
                actual.join(", "),
                expected.join(", ")
            ),
            Diagnostic::UnnormalizedCpt {
                node,
                parent_config,
                sum,
            } => write!(f, "{node}: unnormalized CPT column at {{{parent_config}}} (sum {sum})"),
            Diagnostic::ConstraintScope { node } => {
                write!(f, "{node}: admissibility table scope does not match parents + self")
            }
            Diagnostic::ConstraintNotBinary { node } => {
                write!(f, "{node}: admissibility table must contain only 0 and 1")
            }
            Diagnostic::EmptyConstraintColumn { node, parent_config } => {
                write!(f, "{node}: no admissible state at {{{parent_config}}}")
            }
            Diagnostic::UtilityParents { node, reason } => write!(f, "{node}: {reason}"),
            Diagnostic::Missing { node } => write!(f, "required node `{node}` is missing"),
            Diagnostic::Custom { message } => f.write_str(message),
        }
    }
}

/// Structural and numerical checks. Returns an empty list for a valid
/// network; never fails.
pub fn validate_network(net: &Network) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let name = |v: VarId| net.variable(v).id.clone();

    for v in net.ids() {
        if let Err(reason) = net.variable(v).states.check() {
            diags.push(Diagnostic::InvalidStates { node: name(v), reason });
        }
    }

    if let Some(cycle) = find_cycle(net) {
        diags.push(Diagnostic::Cycle {
            nodes: cycle.into_iter().map(name).collect(),
        });
    }

    for v in net.ids() {
        let var = net.variable(v);
        let mut expected = net.parents(v).to_vec();
        expected.push(v);
        match (var.kind, net.cpt(v)) {
            (VariableKind::Chance, None) => diags.push(Diagnostic::MissingCpt { node: name(v) }),
            (VariableKind::Decision, Some(_)) => diags.push(Diagnostic::UnexpectedCpt { node: name(v) }),
            (VariableKind::Chance, Some(cpt)) => {
                if cpt.factor.scope() != expected.as_slice() {
                    diags.push(Diagnostic::CptScope {
                        node: name(v),
                        expected: expected.iter().map(|x| name(*x)).collect(),
                        actual: cpt.factor.scope().iter().map(|x| name(*x)).collect(),
                    });
                    continue;
                }
                let parents = net.parents(v);
                let probe = Factor::new(
                    parents.to_vec(),
                    parents.iter().map(|p| net.variable(*p).card()).collect(),
                    vec![0.0; parents.iter().map(|p| net.variable(*p).card()).product()],
                )
                .expect("probe factor");
                for (col, sum) in cpt.factor.column_sums().into_iter().enumerate() {
                    if (sum - 1.0).abs() > NORMALIZATION_TOL {
                        diags.push(Diagnostic::UnnormalizedCpt {
                            node: name(v),
                            parent_config: net.config_label(parents, &probe.states_of(col)),
                            sum,
                        });
                    }
                }
            }
            (VariableKind::Decision, None) => {}
        }
        if let Some(c) = net.constraint(v) {
            if var.kind != VariableKind::Decision || c.factor.scope() != expected.as_slice() {
                diags.push(Diagnostic::ConstraintScope { node: name(v) });
                continue;
            }
            if c.factor.data().iter().any(|x| *x != 0.0 && *x != 1.0) {
                diags.push(Diagnostic::ConstraintNotBinary { node: name(v) });
            }
            let parents = net.parents(v);
            let probe_cards: Vec<usize> = parents.iter().map(|p| net.variable(*p).card()).collect();
            let probe = Factor::new(
                parents.to_vec(),
                probe_cards.clone(),
                vec![0.0; probe_cards.iter().product()],
            )
            .expect("probe factor");
            for (col, sum) in c.factor.column_sums().into_iter().enumerate() {
                if sum == 0.0 {
                    diags.push(Diagnostic::EmptyConstraintColumn {
                        node: name(v),
                        parent_config: net.config_label(parents, &probe.states_of(col)),
                    });
                }
            }
        } else if var.kind == VariableKind::Decision && !net.parents(v).is_empty() {
            diags.push(Diagnostic::ConstraintScope { node: name(v) });
        }
    }

    for u in net.utilities() {
        if u.parent_ids.is_empty() {
            diags.push(Diagnostic::UtilityParents {
                node: u.id.clone(),
                reason: "utility node has no parents".into(),
            });
        }
    }
    diags
}

/// Returns one directed cycle (as a closed walk) if the parent graph has any.
fn find_cycle(net: &Network) -> Option<Vec<VarId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = net.variables().len();
    let mut mark = vec![Mark::New; n];
    let mut stack: Vec<VarId> = Vec::new();

    fn visit(net: &Network, v: VarId, mark: &mut [Mark], stack: &mut Vec<VarId>) -> Option<Vec<VarId>> {
        mark[v.index()] = Mark::Active;
        stack.push(v);
        for &p in net.parents(v) {
            match mark[p.index()] {
                Mark::Active => {
                    let start = stack.iter().position(|x| *x == p).unwrap();
                    // stack runs child -> parent; report parent -> child
                    let mut cycle: Vec<VarId> = stack[start..].to_vec();
                    cycle.reverse();
                    cycle.push(cycle[0]);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(net, p, mark, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        mark[v.index()] = Mark::Done;
        None
    }

    for i in 0..n {
        if mark[i] == Mark::New {
            if let Some(c) = visit(net, VarId(i as u32), &mut mark, &mut stack) {
                return Some(c);
            }
        }
    }
    None
}

/// Parent-before-child ordering of all variables. Panics on cycles.
pub fn topological_order(net: &Network) -> Vec<VarId> {
    let n = net.variables().len();
    let mut indeg: Vec<usize> = (0..n).map(|i| net.parents(VarId(i as u32)).len()).collect();
    let mut children: BTreeMap<VarId, Vec<VarId>> = BTreeMap::new();
    for v in net.ids() {
        for p in net.parents(v) {
            children.entry(*p).or_default().push(v);
        }
    }
    let mut ready: Vec<VarId> = net.ids().filter(|v| indeg[v.index()] == 0).collect();
    ready.reverse();
    let mut out = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        out.push(v);
        for c in children.get(&v).into_iter().flatten() {
            indeg[c.index()] -= 1;
            if indeg[c.index()] == 0 {
                ready.push(*c);
            }
        }
    }
    assert_eq!(out.len(), n, "network has a cycle");
    out
}
