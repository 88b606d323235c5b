//! Variables, schemas, complete assignments and contexts.
//!
//! Variables are identified by their position in a [`DomainSchema`]. Sets of
//! variables are bitmasks ([`VarSet`]); the state-space cap of 2^24 bounds a
//! schema to at most 24 variables, so a `u32` always suffices.
//!
//! All enumerations are row-major: the first declared variable is the most
//! significant digit and the last one varies fastest.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest state space any schema may have.
pub const MAX_STATES: u128 = 1 << 24;

/// A set of variable indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct VarSet(u32);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    pub fn from_bits(bits: u32) -> Self {
        VarSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(var: usize) -> Self {
        debug_assert!(var < 32);
        VarSet(1 << var)
    }

    /// The first `n` variables.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            VarSet(u32::MAX)
        } else {
            VarSet((1u32 << n) - 1)
        }
    }

    pub fn contains(self, var: usize) -> bool {
        var < 32 && self.0 & (1 << var) != 0
    }

    pub fn with(self, var: usize) -> Self {
        VarSet(self.0 | (1 << var))
    }

    pub fn without(self, var: usize) -> Self {
        VarSet(self.0 & !(1 << var))
    }

    pub fn union(self, other: VarSet) -> Self {
        VarSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VarSet) -> Self {
        VarSet(self.0 & other.0)
    }

    pub fn difference(self, other: VarSet) -> Self {
        VarSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: VarSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let var = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(var)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in ascending bitmask order (the empty set first,
    /// `self` last).
    pub fn subsets(self) -> impl Iterator<Item = VarSet> {
        let mask = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == mask {
                None
            } else {
                Some((current.wrapping_sub(mask)) & mask)
            };
            Some(VarSet(current))
        })
    }

    /// Compares by sorted member lists rather than by bitmask.
    pub fn cmp_lexicographic(self, other: VarSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter().fold(VarSet::EMPTY, VarSet::with)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

/// Ordered declaration of the discrete variables of a domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DomainSchema {
    variables: Vec<Variable>,
    strides: Vec<usize>,
    states: usize,
}

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl DomainSchema {
    pub fn new<S: Into<String>>(variables: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let variables: Vec<Variable> = variables
            .into_iter()
            .map(|(name, cardinality)| Variable {
                name: name.into(),
                cardinality,
            })
            .collect();
        let mut states: u128 = 1;
        for (i, var) in variables.iter().enumerate() {
            if !is_identifier(&var.name) {
                return Err(Error::InvalidSchema(format!(
                    "`{}` is not a valid variable name",
                    var.name
                )));
            }
            if variables[..i].iter().any(|v| v.name == var.name) {
                return Err(Error::InvalidSchema(format!(
                    "variable `{}` declared twice",
                    var.name
                )));
            }
            if var.cardinality < 2 {
                return Err(Error::InvalidSchema(format!(
                    "variable `{}` has cardinality {} (must be at least 2)",
                    var.name, var.cardinality
                )));
            }
            states = states.saturating_mul(var.cardinality as u128);
            if states > MAX_STATES {
                return Err(Error::CapExceeded {
                    states,
                    cap: MAX_STATES,
                });
            }
        }
        let mut strides = vec![1; variables.len()];
        for i in (0..variables.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * variables[i + 1].cardinality;
        }
        Ok(DomainSchema {
            variables,
            strides,
            states: states as usize,
        })
    }

    /// A schema of binary variables.
    pub fn binary(names: &[&str]) -> Result<Self> {
        Self::new(names.iter().map(|&n| (n, 2)))
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn name(&self, var: usize) -> &str {
        &self.variables[var].name
    }

    pub fn cardinality(&self, var: usize) -> usize {
        self.variables[var].cardinality
    }

    /// Total number of complete assignments.
    pub fn states(&self) -> usize {
        self.states
    }

    /// Row-major stride of a variable within the full table.
    pub fn stride(&self, var: usize) -> usize {
        self.strides[var]
    }

    pub fn all(&self) -> VarSet {
        VarSet::full(self.len())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: impl IntoIterator<Item = S>) -> Result<VarSet> {
        names
            .into_iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().collect())
    }

    /// Fails with `UnknownVariable` if `set` names an index beyond the schema.
    pub fn check_set(&self, set: VarSet) -> Result<()> {
        if set.is_subset(self.all()) {
            Ok(())
        } else {
            let stray = set.difference(self.all()).iter().next().unwrap_or(0);
            Err(Error::UnknownVariable(format!("#{stray}")))
        }
    }

    pub fn check_var(&self, var: usize) -> Result<()> {
        if var < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVariable(format!("#{var}")))
        }
    }

    /// Number of joint values of the variables in `set`.
    pub fn states_of(&self, set: VarSet) -> usize {
        set.iter().map(|v| self.cardinality(v)).product()
    }

    /// The schema restricted to `set`, keeping declaration order.
    pub fn sub_schema(&self, set: VarSet) -> Result<DomainSchema> {
        self.check_set(set)?;
        DomainSchema::new(set.iter().map(|v| {
            (
                self.variables[v].name.clone(),
                self.variables[v].cardinality,
            )
        }))
    }

    pub fn names(&self, set: VarSet) -> Vec<&str> {
        set.iter().map(|v| self.name(v)).collect()
    }

    /// `{a,b}` rendering of a variable set.
    pub fn render_set(&self, set: VarSet) -> String {
        format!("{{{}}}", self.names(set).join(","))
    }

    /// Decode a row-major state index.
    pub fn assignment(&self, index: usize) -> Assignment {
        let values = self
            .variables
            .iter()
            .zip(&self.strides)
            .map(|(v, &s)| (index / s) % v.cardinality)
            .collect();
        Assignment { values }
    }

    pub fn index(&self, x: &Assignment) -> usize {
        x.values.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    /// All complete assignments in row-major order.
    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.states).map(|i| self.assignment(i))
    }

    pub fn check_assignment(&self, x: &Assignment) -> Result<()> {
        if x.values.len() != self.len() {
            return Err(Error::InvalidTable(format!(
                "assignment binds {} variables, schema has {}",
                x.values.len(),
                self.len()
            )));
        }
        for (var, &value) in x.values.iter().enumerate() {
            if value >= self.cardinality(var) {
                return Err(Error::BadContext {
                    input: format!("{}={}", self.name(var), value),
                    reason: format!("value out of range 0..{}", self.cardinality(var)),
                });
            }
        }
        Ok(())
    }

    /// Every context over `scope`, lexicographically (first variable most
    /// significant).
    pub fn contexts(&self, scope: VarSet) -> Vec<Context> {
        let vars = scope.to_vec();
        let total = self.states_of(scope);
        let mut out = Vec::with_capacity(total);
        let mut values = vec![0usize; vars.len()];
        for _ in 0..total {
            out.push(Context {
                scope,
                values: values.clone(),
            });
            for i in (0..vars.len()).rev() {
                values[i] += 1;
                if values[i] < self.cardinality(vars[i]) {
                    break;
                }
                values[i] = 0;
            }
        }
        out
    }

    /// Parse `a=1,c=0`; an empty string (or `-`) is the empty context.
    pub fn parse_context(&self, input: &str) -> Result<Context> {
        let trimmed = input.trim();
        if trimmed.is_empty() || trimmed == "-" {
            return Ok(Context::empty());
        }
        let bad = |reason: String| Error::BadContext {
            input: input.to_string(),
            reason,
        };
        let mut pairs = Vec::new();
        for part in trimmed.split(',') {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("`{part}` is not of the form name=value")))?;
            let var = self
                .index_of(name.trim())
                .map_err(|_| bad(format!("unknown variable `{}`", name.trim())))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| bad(format!("`{}` is not a value index", value.trim())))?;
            if value >= self.cardinality(var) {
                return Err(bad(format!(
                    "value {value} out of range for `{}` (cardinality {})",
                    self.name(var),
                    self.cardinality(var)
                )));
            }
            pairs.push((var, value));
        }
        Context::from_pairs(pairs).map_err(|e| bad(e.to_string()))
    }

    /// `a=1,c=0` rendering; the empty context renders as the empty string.
    pub fn render_context(&self, ctx: &Context) -> String {
        ctx.iter()
            .map(|(var, value)| format!("{}={}", self.name(var), value))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// A complete assignment: one value per schema variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<usize>,
}

impl Assignment {
    pub fn new(values: Vec<usize>) -> Self {
        Assignment { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, var: usize) -> usize {
        self.values[var]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `x|_W`.
    pub fn project(&self, scope: VarSet) -> Result<Context> {
        if !scope.is_subset(VarSet::full(self.values.len())) {
            let stray = scope
                .difference(VarSet::full(self.values.len()))
                .iter()
                .next()
                .unwrap_or(0);
            return Err(Error::UnknownVariable(format!("#{stray}")));
        }
        Ok(Context {
            scope,
            values: scope.iter().map(|v| self.values[v]).collect(),
        })
    }

    /// The full assignment viewed as a context over every variable.
    pub fn as_context(&self) -> Context {
        Context {
            scope: VarSet::full(self.values.len()),
            values: self.values.clone(),
        }
    }
}

/// A partial assignment `x_W`. Values are stored in ascending variable order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Context {
    scope: VarSet,
    values: Vec<usize>,
}

impl Context {
    pub fn empty() -> Self {
        Context::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
        pairs.sort_unstable();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::OverlappingSets(format!(
                    "variable #{} bound twice",
                    w[0].0
                )));
            }
        }
        if let Some(&(var, _)) = pairs.iter().find(|(v, _)| *v >= 32) {
            return Err(Error::UnknownVariable(format!("#{var}")));
        }
        Ok(Context {
            scope: pairs.iter().map(|&(v, _)| v).collect(),
            values: pairs.into_iter().map(|(_, x)| x).collect(),
        })
    }

    pub fn scope(&self) -> VarSet {
        self.scope
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.scope.is_empty()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.scope.iter().zip(self.values.iter().copied())
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        if !self.scope.contains(var) {
            return None;
        }
        let rank = VarSet::from_bits(self.scope.bits() & ((1u32 << var) - 1)).len();
        Some(self.values[rank])
    }

    /// Combine two contexts over disjoint scopes.
    pub fn join(&self, other: &Context) -> Result<Context> {
        if !self.scope.is_disjoint(other.scope) {
            return Err(Error::OverlappingSets(format!(
                "contexts share variables {:?}",
                self.scope.intersection(other.scope)
            )));
        }
        Context::from_pairs(self.iter().chain(other.iter()))
    }

    /// True when the two contexts agree on every shared variable.
    pub fn is_consistent_with(&self, other: &Context) -> bool {
        let shared = self.scope.intersection(other.scope);
        shared.iter().all(|v| self.get(v) == other.get(v))
    }

    /// True when `x` extends this context.
    pub fn is_satisfied_by(&self, x: &Assignment) -> bool {
        self.iter()
            .all(|(var, value)| x.values.get(var) == Some(&value))
    }

    pub fn restrict(&self, scope: VarSet) -> Context {
        Context {
            scope: self.scope.intersection(scope),
            values: self
                .iter()
                .filter(|(v, _)| scope.contains(*v))
                .map(|(_, x)| x)
                .collect(),
        }
    }
}

/// Relative comparison `|x - y| <= tol * max(|x|, |y|)`.
pub fn approx_eq(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_all() {
        let set: VarSet = [0, 2, 3].into_iter().collect();
        let subs: Vec<_> = set.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert_eq!(subs[0], VarSet::EMPTY);
        assert_eq!(*subs.last().unwrap(), set);
        assert!(subs.iter().all(|s| s.is_subset(set)));
        assert_eq!(VarSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn schema_rejects_duplicates_small_cards_and_cap() {
        assert!(matches!(
            DomainSchema::binary(&["a", "a"]),
            Err(Error::InvalidSchema(_))
        ));
        assert!(matches!(
            DomainSchema::new([("a", 1)]),
            Err(Error::InvalidSchema(_))
        ));
        let names: Vec<String> = (0..25).map(|i| format!("x{i}")).collect();
        assert!(matches!(
            DomainSchema::new(names.iter().map(|n| (n.as_str(), 2))),
            Err(Error::CapExceeded { .. })
        ));
        let names: Vec<String> = (0..24).map(|i| format!("x{i}")).collect();
        assert_eq!(
            DomainSchema::new(names.iter().map(|n| (n.as_str(), 2)))
                .unwrap()
                .states(),
            1 << 24
        );
    }

    #[test]
    fn row_major_order() {
        let s = DomainSchema::new([("a", 2), ("b", 3)]).unwrap();
        assert_eq!(s.assignment(0).values(), &[0, 0]);
        assert_eq!(s.assignment(1).values(), &[0, 1]);
        assert_eq!(s.assignment(3).values(), &[1, 0]);
        for i in 0..s.states() {
            assert_eq!(s.index(&s.assignment(i)), i);
        }
    }

    #[test]
    fn project_definition() {
        let x = Assignment::new(vec![1, 0, 1]);
        let bc = VarSet::from_iter([1, 2]);
        let ctx = x.project(bc).unwrap();
        assert_eq!(ctx.iter().collect::<Vec<_>>(), vec![(1, 0), (2, 1)]);
        assert!(x.project(VarSet::EMPTY).unwrap().is_empty());
        assert_eq!(x.project(VarSet::full(3)).unwrap(), x.as_context());
        assert!(matches!(
            x.project(VarSet::singleton(5)),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn context_parse_and_render() {
        let s = DomainSchema::binary(&["a", "b", "c"]).unwrap();
        let ctx = s.parse_context("c=1, a=0").unwrap();
        assert_eq!(s.render_context(&ctx), "a=0,c=1");
        assert_eq!(ctx.get(2), Some(1));
        assert_eq!(ctx.get(1), None);
        assert!(s.parse_context("").unwrap().is_empty());
        assert!(matches!(
            s.parse_context("d=0"),
            Err(Error::BadContext { .. })
        ));
        assert!(matches!(
            s.parse_context("a=2"),
            Err(Error::BadContext { .. })
        ));
        assert!(matches!(
            s.parse_context("a=0,a=1"),
            Err(Error::BadContext { .. })
        ));
    }

    #[test]
    fn contexts_are_lexicographic() {
        let s = DomainSchema::new([("a", 2), ("b", 3)]).unwrap();
        let all = s.contexts(s.all());
        assert_eq!(all.len(), 6);
        assert_eq!(all[1].values(), &[0, 1]);
        assert_eq!(all[3].values(), &[1, 0]);
        assert_eq!(s.contexts(VarSet::EMPTY), vec![Context::empty()]);
    }

    #[test]
    fn join_and_consistency() {
        let left = Context::from_pairs([(0, 1)]).unwrap();
        let right = Context::from_pairs([(2, 0)]).unwrap();
        let both = left.join(&right).unwrap();
        assert_eq!(both.scope(), VarSet::from_iter([0, 2]));
        assert!(left.join(&both).is_err());
        assert!(both.is_consistent_with(&left));
        assert!(!both.is_consistent_with(&Context::from_pairs([(0, 0)]).unwrap()));
        assert!(both.is_consistent_with(&Context::from_pairs([(1, 1)]).unwrap()));
    }
}
