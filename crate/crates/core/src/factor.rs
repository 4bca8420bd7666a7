//! Discrete variables and dense factor tables.
//!
//! A [`Factor`] is a nonnegative table over an ordered scope of variables,
//! stored row-major with the last scope variable varying fastest. Empty
//! scopes hold a single scalar.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::FactorError;

/// Index of a variable inside a network or a free-standing factor set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Chance,
    Decision,
}

/// The states of a discrete variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSpace {
    Labeled(Vec<String>),
    /// One real value per state, strictly increasing.
    Numbered(Vec<f64>),
    /// Interval boundaries; `n` states need `n + 1` nondecreasing values.
    Interval(Vec<f64>),
}

impl StateSpace {
    pub fn labeled<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        StateSpace::Labeled(labels.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            StateSpace::Labeled(l) => l.len(),
            StateSpace::Numbered(v) => v.len(),
            StateSpace::Interval(b) => b.len().saturating_sub(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the state-space invariants, returning a reason on failure.
    pub fn check(&self) -> Result<(), String> {
        if self.is_empty() {
            return Err("state space has no states".into());
        }
        match self {
            StateSpace::Labeled(labels) => {
                for (i, l) in labels.iter().enumerate() {
                    if labels[..i].contains(l) {
                        return Err(format!("duplicate label `{l}`"));
                    }
                }
            }
            StateSpace::Numbered(values) => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err("non-finite state value".into());
                }
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("numbered values must be strictly increasing".into());
                }
            }
            StateSpace::Interval(bounds) => {
                if bounds.iter().any(|v| !v.is_finite()) {
                    return Err("non-finite interval boundary".into());
                }
                if bounds.windows(2).any(|w| w[0] > w[1]) {
                    return Err("interval boundaries must be nondecreasing".into());
                }
                let zero_width = bounds.windows(2).filter(|w| w[0] == w[1]).count();
                if zero_width > 1 {
                    return Err("at most one zero-width interval is allowed".into());
                }
            }
        }
        Ok(())
    }

    /// Display label of state `i`: the label itself, the number, or `lo-hi`.
    pub fn label(&self, i: usize) -> String {
        match self {
            StateSpace::Labeled(l) => l[i].clone(),
            StateSpace::Numbered(v) => format!("{}", v[i]),
            StateSpace::Interval(b) => format!("{}-{}", b[i], b[i + 1]),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    /// Interval midpoint, or the state value of a numbered space.
    pub fn midpoint(&self, i: usize) -> Option<f64> {
        match self {
            StateSpace::Labeled(_) => None,
            StateSpace::Numbered(v) => Some(v[i]),
            StateSpace::Interval(b) => Some(0.5 * (b[i] + b[i + 1])),
        }
    }

    /// Numeric value of a state (same as [`StateSpace::midpoint`]).
    pub fn value(&self, i: usize) -> Option<f64> {
        self.midpoint(i)
    }

    /// Maps a real value onto a state. Intervals are half-open `[lo, hi)`
    /// except that a zero-width interval catches its single point; values
    /// outside the boundary range clamp to the terminal states. Numbered
    /// spaces pick the nearest value, ties going to the smaller one.
    pub fn bin(&self, x: f64) -> Option<usize> {
        match self {
            StateSpace::Labeled(_) => None,
            StateSpace::Numbered(values) => {
                let mut best = 0;
                for (i, v) in values.iter().enumerate() {
                    if (x - v).abs() < (x - values[best]).abs() {
                        best = i;
                    }
                }
                Some(best)
            }
            StateSpace::Interval(b) => {
                let n = b.len() - 1;
                if x < b[0] {
                    return Some(0);
                }
                for i in 0..n {
                    let (lo, hi) = (b[i], b[i + 1]);
                    if lo == hi {
                        if x == lo {
                            return Some(i);
                        }
                    } else if x >= lo && x < hi {
                        return Some(i);
                    }
                }
                Some(n - 1)
            }
        }
    }

    /// Resolves user input to a state index: an exact label, or a number
    /// equal to a numbered state's value.
    pub fn find(&self, text: &str) -> Option<usize> {
        let text = text.trim();
        if let Some(i) = (0..self.len()).find(|&i| self.label(i) == text) {
            return Some(i);
        }
        if let StateSpace::Labeled(labels) = self {
            return labels.iter().position(|l| l.eq_ignore_ascii_case(text));
        }
        if let StateSpace::Numbered(values) = self {
            if let Ok(x) = text.parse::<f64>() {
                return values.iter().position(|v| *v == x);
            }
        }
        None
    }
}

/// A discrete variable of an influence diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub id: String,
    pub name: String,
    pub kind: VariableKind,
    pub states: StateSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

impl Variable {
    pub fn card(&self) -> usize {
        self.states.len()
    }
}

/// A full or partial assignment of state indices to variables.
pub type Assignment = BTreeMap<VarId, usize>;

/// Dense nonnegative table over an ordered scope of discrete variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    scope: Vec<VarId>,
    cards: Vec<usize>,
    data: Vec<f64>,
}

impl Factor {
    pub fn new(scope: Vec<VarId>, cards: Vec<usize>, data: Vec<f64>) -> Result<Self, FactorError> {
        assert_eq!(scope.len(), cards.len(), "scope and cardinality lists differ in length");
        for (i, v) in scope.iter().enumerate() {
            if scope[..i].contains(v) {
                return Err(FactorError::DuplicateVariable(*v));
            }
        }
        let expected: usize = cards.iter().product();
        if data.len() != expected {
            return Err(FactorError::TableSize {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < 0.0) {
            return Err(FactorError::InvalidEntry { index, value });
        }
        Ok(Factor { scope, cards, data })
    }

    pub fn scalar(value: f64) -> Self {
        Factor {
            scope: Vec::new(),
            cards: Vec::new(),
            data: vec![value],
        }
    }

    /// Uniform distribution over one variable.
    pub fn uniform(var: VarId, card: usize) -> Self {
        Factor {
            scope: vec![var],
            cards: vec![card],
            data: vec![1.0 / card as f64; card],
        }
    }

    pub fn scope(&self) -> &[VarId] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn contains(&self, var: VarId) -> bool {
        self.scope.contains(&var)
    }

    pub fn card_of(&self, var: VarId) -> Option<usize> {
        self.position(var).map(|p| self.cards[p])
    }

    fn position(&self, var: VarId) -> Option<usize> {
        self.scope.iter().position(|v| *v == var)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Scales the table to unit mass. Returns `None` for an all-zero table.
    pub fn normalized(&self) -> Option<Factor> {
        let z = self.sum();
        if z <= 0.0 {
            return None;
        }
        let mut out = self.clone();
        out.data.iter_mut().for_each(|x| *x /= z);
        Some(out)
    }

    /// Row-major strides of the scope.
    fn strides(cards: &[usize]) -> Vec<usize> {
        let mut strides = vec![1; cards.len()];
        for i in (0..cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        strides
    }

    /// Flat index of a full assignment to this factor's scope.
    pub fn index_of(&self, states: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.scope.len());
        states.iter().zip(&self.cards).fold(0, |acc, (s, c)| acc * c + s)
    }

    /// Value at an assignment that covers the scope.
    pub fn value(&self, assignment: &Assignment) -> Result<f64, FactorError> {
        let mut idx = 0;
        for (v, c) in self.scope.iter().zip(&self.cards) {
            let s = *assignment.get(v).ok_or(FactorError::NotInScope(*v))?;
            if s >= *c {
                return Err(FactorError::StateOutOfRange {
                    var: *v,
                    state: s,
                    card: *c,
                });
            }
            idx = idx * c + s;
        }
        Ok(self.data[idx])
    }

    /// Pointwise product over the union of both scopes. The result scope is
    /// `self`'s scope followed by the variables only `other` mentions.
    pub fn product(&self, other: &Factor) -> Result<Factor, FactorError> {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (v, c) in other.scope.iter().zip(&other.cards) {
            match self.position(*v) {
                Some(p) if self.cards[p] != *c => {
                    return Err(FactorError::StateCountMismatch {
                        var: *v,
                        left: self.cards[p],
                        right: *c,
                    })
                }
                Some(_) => {}
                None => {
                    scope.push(*v);
                    cards.push(*c);
                }
            }
        }

        // Stride of each result variable inside each operand (0 if absent).
        let sa = Self::strides(&self.cards);
        let sb = Self::strides(&other.cards);
        let stride_a: Vec<usize> = scope.iter().map(|v| self.position(*v).map_or(0, |p| sa[p])).collect();
        let stride_b: Vec<usize> = scope.iter().map(|v| other.position(*v).map_or(0, |p| sb[p])).collect();

        let total: usize = cards.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut counter = vec![0usize; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..total {
            data.push(self.data[ia] * other.data[ib]);
            // odometer increment, last variable fastest
            for d in (0..scope.len()).rev() {
                counter[d] += 1;
                ia += stride_a[d];
                ib += stride_b[d];
                if counter[d] < cards[d] {
                    break;
                }
                ia -= stride_a[d] * cards[d];
                ib -= stride_b[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor { scope, cards, data })
    }

    /// Sums `var` out of the table.
    pub fn marginalize(&self, var: VarId) -> Result<Factor, FactorError> {
        let p = self.position(var).ok_or(FactorError::NotInScope(var))?;
        let card = self.cards[p];
        let inner: usize = self.cards[p + 1..].iter().product();
        let outer: usize = self.cards[..p].iter().product();
        let mut data = vec![0.0; outer * inner];
        for o in 0..outer {
            for s in 0..card {
                let base = (o * card + s) * inner;
                let dst = &mut data[o * inner..(o + 1) * inner];
                for (d, x) in dst.iter_mut().zip(&self.data[base..base + inner]) {
                    *d += x;
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(p);
        cards.remove(p);
        Ok(Factor { scope, cards, data })
    }

    /// Slices the table at `var = state`, dropping `var` from the scope.
    /// The result is not renormalized.
    pub fn reduce(&self, var: VarId, state: usize) -> Result<Factor, FactorError> {
        let p = self.position(var).ok_or(FactorError::NotInScope(var))?;
        let card = self.cards[p];
        if state >= card {
            return Err(FactorError::StateOutOfRange { var, state, card });
        }
        let inner: usize = self.cards[p + 1..].iter().product();
        let outer: usize = self.cards[..p].iter().product();
        let mut data = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + state) * inner;
            data.extend_from_slice(&self.data[base..base + inner]);
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(p);
        cards.remove(p);
        Ok(Factor { scope, cards, data })
    }

    /// Reorders the table to `order`, which must be a permutation of the scope.
    pub fn permute(&self, order: &[VarId]) -> Result<Factor, FactorError> {
        if order.len() != self.scope.len() {
            let missing = self
                .scope
                .iter()
                .find(|v| !order.contains(v))
                .or_else(|| order.iter().find(|v| !self.scope.contains(v)))
                .copied()
                .unwrap_or(VarId(u32::MAX));
            return Err(FactorError::NotInScope(missing));
        }
        let positions = order
            .iter()
            .map(|v| self.position(*v).ok_or(FactorError::NotInScope(*v)))
            .collect::<Result<Vec<_>, _>>()?;
        if order == self.scope.as_slice() {
            return Ok(self.clone());
        }
        let src_strides = Self::strides(&self.cards);
        let cards: Vec<usize> = positions.iter().map(|&p| self.cards[p]).collect();
        let strides: Vec<usize> = positions.iter().map(|&p| src_strides[p]).collect();
        let total = self.data.len();
        let mut data = Vec::with_capacity(total);
        let mut counter = vec![0usize; cards.len()];
        let mut src = 0usize;
        for _ in 0..total {
            data.push(self.data[src]);
            for d in (0..cards.len()).rev() {
                counter[d] += 1;
                src += strides[d];
                if counter[d] < cards[d] {
                    break;
                }
                src -= strides[d] * cards[d];
                counter[d] = 0;
            }
        }
        Ok(Factor {
            scope: order.to_vec(),
            cards,
            data,
        })
    }

    /// Same table with the scope sorted by variable id.
    pub fn canonical(&self) -> Factor {
        let mut order = self.scope.clone();
        order.sort();
        self.permute(&order).expect("sorted scope is a permutation")
    }

    /// Iterates over the parent configurations of a CPT-shaped factor whose
    /// last scope variable is the child, yielding each column's sum.
    pub fn column_sums(&self) -> Vec<f64> {
        match self.cards.last() {
            None => vec![self.data[0]],
            Some(&child) => self.data.chunks(child).map(|c| c.iter().sum()).collect(),
        }
    }

    /// Decodes a flat index back into per-variable states.
    pub fn states_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for d in (0..self.cards.len()).rev() {
            out[d] = index % self.cards[d];
            index /= self.cards[d];
        }
        out
    }
}
