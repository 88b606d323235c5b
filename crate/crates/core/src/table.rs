//! Exact joint probability tables over small discrete domains.

use std::sync::Arc;

use crate::domain::{Assignment, Context, DomainSchema, VarSet};
use crate::error::{Error, Result};

/// A normalized probability table `p(X)`, stored row-major in the schema's
/// declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    schema: Arc<DomainSchema>,
    probs: Vec<f64>,
}

impl JointTable {
    /// Scale a nonnegative table so that it sums to one.
    pub fn normalize(schema: impl Into<Arc<DomainSchema>>, raw: Vec<f64>) -> Result<Self> {
        let schema = schema.into();
        if raw.len() != schema.states() {
            return Err(Error::InvalidTable(format!(
                "expected {} entries, found {}",
                schema.states(),
                raw.len()
            )));
        }
        if let Some((i, v)) = raw
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidTable(format!(
                "entry {i} is {v}; entries must be finite and nonnegative"
            )));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::AllZero);
        }
        let probs = raw.into_iter().map(|v| v / total).collect();
        Ok(JointTable { schema, probs })
    }

    /// Tabulate an unnormalized weight function and normalize it.
    pub fn from_fn(
        schema: impl Into<Arc<DomainSchema>>,
        weight: impl Fn(&Assignment) -> f64,
    ) -> Result<Self> {
        let schema = schema.into();
        let raw = schema.assignments().map(|x| weight(&x)).collect();
        Self::normalize(schema, raw)
    }

    pub fn uniform(schema: impl Into<Arc<DomainSchema>>) -> Self {
        let schema = schema.into();
        let n = schema.states();
        JointTable {
            schema,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<DomainSchema> {
        &self.schema
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: &Assignment) -> f64 {
        self.probs[self.schema.index(x)]
    }

    pub fn is_positive(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn min(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The marginal over `set` as a flat row-major vector in the schema's order.
    pub(crate) fn marginal_values(&self, set: VarSet) -> Vec<f64> {
        let index = projection_index(&self.schema, set);
        let mut out = vec![0.0; self.schema.states_of(set)];
        for (p, &slot) in self.probs.iter().zip(&index) {
            out[slot] += p;
        }
        out
    }

    /// `p(X_S)` over the sub-schema of `set`.
    pub fn marginal(&self, set: VarSet) -> Result<JointTable> {
        let schema = self.schema.sub_schema(set)?;
        Ok(JointTable {
            schema: Arc::new(schema),
            probs: self.marginal_values(set),
        })
    }

    pub fn marginal_by_name<S: AsRef<str>>(
        &self,
        names: impl IntoIterator<Item = S>,
    ) -> Result<JointTable> {
        self.marginal(self.schema.set_of(names)?)
    }

    /// Probability mass of a context, `p(x_W)`.
    pub fn context_mass(&self, ctx: &Context) -> Result<f64> {
        self.schema.check_set(ctx.scope())?;
        Ok(self
            .schema
            .assignments()
            .zip(&self.probs)
            .filter(|(x, _)| ctx.is_satisfied_by(x))
            .map(|(_, p)| p)
            .sum())
    }

    /// `p(X \ X_W | x_W)` over the sub-schema of the remaining variables.
    pub fn condition(&self, ctx: &Context) -> Result<JointTable> {
        self.schema.check_set(ctx.scope())?;
        for (var, value) in ctx.iter() {
            if value >= self.schema.cardinality(var) {
                return Err(Error::BadContext {
                    input: self.schema.render_context(ctx),
                    reason: format!("value {value} out of range for `{}`", self.schema.name(var)),
                });
            }
        }
        let rest = self.schema.all().difference(ctx.scope());
        let sub = self.schema.sub_schema(rest)?;
        let offset: usize = ctx.iter().map(|(v, x)| x * self.schema.stride(v)).sum();
        let rest_vars = rest.to_vec();
        let raw: Vec<f64> = (0..sub.states())
            .map(|i| {
                let y = sub.assignment(i);
                let idx = offset
                    + rest_vars
                        .iter()
                        .zip(y.values())
                        .map(|(&v, &x)| x * self.schema.stride(v))
                        .sum::<usize>();
                self.probs[idx]
            })
            .collect();
        let mass: f64 = raw.iter().sum();
        if mass <= 0.0 {
            return Err(Error::ZeroContext(self.schema.render_context(ctx)));
        }
        Ok(JointTable {
            schema: Arc::new(sub),
            probs: raw.into_iter().map(|v| v / mass).collect(),
        })
    }
}

/// For every complete state, its row-major index within the marginal over `set`.
pub(crate) fn projection_index(schema: &DomainSchema, set: VarSet) -> Vec<usize> {
    let vars = set.to_vec();
    let mut strides = vec![0usize; schema.len()];
    let mut s = 1;
    for &v in vars.iter().rev() {
        strides[v] = s;
        s *= schema.cardinality(v);
    }
    (0..schema.states())
        .map(|i| {
            vars.iter()
                .map(|&v| ((i / schema.stride(v)) % schema.cardinality(v)) * strides[v])
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(names: &[&str]) -> Arc<DomainSchema> {
        Arc::new(DomainSchema::binary(names).unwrap())
    }

    #[test]
    fn normalize_examples() {
        let s = binary(&["a", "b"]);
        let p = JointTable::normalize(s.clone(), vec![1.0; 4]).unwrap();
        assert_eq!(p.probs(), &[0.25; 4]);
        let p = JointTable::normalize(s.clone(), vec![2.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(p.probs(), &[0.5, 0.0, 0.0, 0.5]);
        assert!(!p.is_positive());
        assert!(matches!(
            JointTable::normalize(s.clone(), vec![0.0; 4]),
            Err(Error::AllZero)
        ));
        assert!(matches!(
            JointTable::normalize(s.clone(), vec![1.0; 3]),
            Err(Error::InvalidTable(_))
        ));
        assert!(matches!(
            JointTable::normalize(s, vec![1.0, -1.0, 1.0, 1.0]),
            Err(Error::InvalidTable(_))
        ));
    }

    #[test]
    fn marginal_examples() {
        let s = binary(&["a", "b"]);
        let p = JointTable::uniform(s.clone());
        assert_eq!(p.marginal_by_name(["a"]).unwrap().probs(), &[0.5, 0.5]);
        let q = JointTable::normalize(s.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(q.marginal(s.all()).unwrap(), q);
        let b = q.marginal_by_name(["b"]).unwrap();
        assert!((b.probs()[0] - 0.4).abs() < 1e-15);
        assert!(matches!(
            q.marginal_by_name(["z"]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn condition_examples() {
        let s = binary(&["a", "b"]);
        let p = JointTable::uniform(s.clone());
        let ctx = s.parse_context("b=0").unwrap();
        let c = p.condition(&ctx).unwrap();
        assert_eq!(c.schema().names(c.schema().all()), vec!["a"]);
        assert_eq!(c.probs(), &[0.5, 0.5]);
        assert_eq!(p.condition(&Context::empty()).unwrap(), p);

        let q = JointTable::normalize(s.clone(), vec![1.0, 0.0, 3.0, 0.0]).unwrap();
        assert!(matches!(
            q.condition(&s.parse_context("b=1").unwrap()),
            Err(Error::ZeroContext(_))
        ));
    }

    #[test]
    fn projection_index_matches_decoding() {
        let s = DomainSchema::new([("a", 2), ("b", 3), ("c", 2)]).unwrap();
        let set = VarSet::from_iter([0, 2]);
        let idx = projection_index(&s, set);
        for (i, &slot) in idx.iter().enumerate() {
            let x = s.assignment(i);
            assert_eq!(slot, x.value(0) * 2 + x.value(2));
        }
    }
}
