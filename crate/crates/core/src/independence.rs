//! Exact conditional and context-specific independence tests, and the
//! dependency-model algebra built on top of them.
//!
//! A CSI assertion `<a, b | U, x_W>` holds in `p` when, for every `x_U` and
//! every `x_a, x_b` with `p(x_b, x_U, x_W) > 0`,
//!
//! ```text
//! p(x_a, x_b | x_U, x_W) = p(x_a | x_U, x_W) * p(x_b | x_U, x_W)
//! ```
//!
//! which is the product form of `p(x_a | x_b, x_U, x_W) = p(x_a | x_U, x_W)`.
//! A plain CI assertion is the special case of an empty context.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::domain::{approx_eq, Context, DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::table::JointTable;

/// Default relative tolerance for every equality test on probabilities.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest universe of CSI triplets `build_csi_model` will enumerate.
pub const MAX_TRIPLETS: u128 = 1 << 22;

/// Dependency models are stored densely over `(a, U)`; this bounds the domain.
pub const MAX_MODEL_VARS: usize = 16;

/// A canonical independence query `<a, b | U, x_W>` with `a < b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triplet {
    a: usize,
    b: usize,
    cond: VarSet,
    context: Context,
}

impl Triplet {
    pub fn new(a: usize, b: usize, cond: VarSet, context: Context) -> Result<Self> {
        check_disjoint(a, b, cond, &context)?;
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Ok(Triplet {
            a,
            b,
            cond,
            context,
        })
    }

    /// Plain conditional independence `<a, b | U>`.
    pub fn ci(a: usize, b: usize, cond: VarSet) -> Result<Self> {
        Self::new(a, b, cond, Context::empty())
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn cond(&self) -> VarSet {
        self.cond
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    /// Parse `a b | u,v | c=0` against a schema. Either trailing section may
    /// be `{}` or empty.
    pub fn parse(schema: &DomainSchema, line: &str) -> Result<Self> {
        let bad = |reason: &str| Error::Parse {
            line: 0,
            message: format!("`{line}`: {reason}"),
        };
        let mut parts = line.split('|');
        let pair = parts.next().ok_or_else(|| bad("missing pair"))?;
        let cond = parts.next().unwrap_or("");
        let ctx = parts.next().unwrap_or("");
        if parts.next().is_some() {
            return Err(bad("too many `|` separators"));
        }
        let names: Vec<&str> = pair.split_whitespace().collect();
        if names.len() != 2 {
            return Err(bad("expected two variable names before `|`"));
        }
        let strip = |s: &str| {
            s.trim()
                .trim_start_matches('{')
                .trim_end_matches('}')
                .trim()
                .to_string()
        };
        let cond_names = strip(cond);
        let cond = if cond_names.is_empty() {
            VarSet::EMPTY
        } else {
            schema.set_of(cond_names.split(',').map(str::trim))?
        };
        let context = schema.parse_context(&strip(ctx))?;
        Triplet::new(
            schema.index_of(names[0])?,
            schema.index_of(names[1])?,
            cond,
            context,
        )
    }

    /// Canonical one-line rendering: `a b | {u,v} | {c=0}`.
    pub fn render(&self, schema: &DomainSchema) -> String {
        format!(
            "{} {} | {} | {{{}}}",
            schema.name(self.a),
            schema.name(self.b),
            schema.render_set(self.cond),
            schema.render_context(&self.context)
        )
    }
}

fn check_disjoint(a: usize, b: usize, cond: VarSet, ctx: &Context) -> Result<()> {
    if a == b {
        return Err(Error::OverlappingSets(format!(
            "triplet pairs variable #{a} with itself"
        )));
    }
    let pair = VarSet::singleton(a).with(b);
    if !cond.is_disjoint(pair) {
        return Err(Error::OverlappingSets(
            "conditioning set contains a or b".into(),
        ));
    }
    if !ctx.scope().is_disjoint(pair.union(cond)) {
        return Err(Error::OverlappingSets(
            "context overlaps the pair or the conditioning set".into(),
        ));
    }
    Ok(())
}

fn validate(schema: &DomainSchema, a: usize, b: usize, cond: VarSet, ctx: &Context) -> Result<()> {
    schema.check_var(a)?;
    schema.check_var(b)?;
    schema.check_set(cond)?;
    schema.check_set(ctx.scope())?;
    check_disjoint(a, b, cond, ctx)?;
    for (var, value) in ctx.iter() {
        if value >= schema.cardinality(var) {
            return Err(Error::BadContext {
                input: schema.render_context(ctx),
                reason: format!("value {value} out of range for `{}`", schema.name(var)),
            });
        }
    }
    Ok(())
}

/// Strides of each variable of `set` within a row-major table over `set`.
fn local_strides(schema: &DomainSchema, set: VarSet) -> Vec<usize> {
    let mut strides = vec![0usize; schema.len()];
    let mut s = 1;
    for v in set.to_vec().into_iter().rev() {
        strides[v] = s;
        s *= schema.cardinality(v);
    }
    strides
}

/// Conditional independence `<a, b | U>` in `p`.
pub fn test_ci(p: &JointTable, a: usize, b: usize, cond: VarSet, tol: f64) -> Result<bool> {
    test_csi(p, a, b, cond, &Context::empty(), tol)
}

/// Context-specific independence `<a, b | U, x_W>` in `p`.
pub fn test_csi(
    p: &JointTable,
    a: usize,
    b: usize,
    cond: VarSet,
    ctx: &Context,
    tol: f64,
) -> Result<bool> {
    let schema = p.schema();
    validate(schema, a, b, cond, ctx)?;
    let scope = cond.union(ctx.scope()).with(a).with(b);
    let q = p.marginal_values(scope);
    let strides = local_strides(schema, scope);
    let base: usize = ctx.iter().map(|(v, x)| x * strides[v]).sum();
    let (ka, kb) = (schema.cardinality(a), schema.cardinality(b));
    let mut pa = vec![0.0; ka];
    let mut pb = vec![0.0; kb];
    for xu in schema.contexts(cond) {
        let offset = base + xu.iter().map(|(v, x)| x * strides[v]).sum::<usize>();
        let cell = |i: usize, j: usize| q[offset + i * strides[a] + j * strides[b]];
        pa.iter_mut().for_each(|v| *v = 0.0);
        pb.iter_mut().for_each(|v| *v = 0.0);
        let mut total = 0.0;
        for (i, sa) in pa.iter_mut().enumerate() {
            for (j, sb) in pb.iter_mut().enumerate() {
                let v = cell(i, j);
                *sa += v;
                *sb += v;
                total += v;
            }
        }
        if total <= 0.0 {
            continue;
        }
        for (i, &ma) in pa.iter().enumerate() {
            for (j, &mb) in pb.iter().enumerate() {
                if mb <= 0.0 {
                    continue;
                }
                let joint = cell(i, j) / total;
                let product = (ma / total) * (mb / total);
                if !approx_eq(joint, product, tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Evaluate a canonical triplet against `p`.
pub fn test_triplet(p: &JointTable, t: &Triplet, tol: f64) -> Result<bool> {
    test_csi(p, t.a, t.b, t.cond, &t.context, tol)
}

/// Every canonical triplet over the schema, in canonical order.
pub fn triplet_universe(schema: &DomainSchema) -> Vec<Triplet> {
    let n = schema.len();
    let all = schema.all();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let rest = all.without(a).without(b);
            for cond in rest.subsets() {
                for scope in rest.difference(cond).subsets() {
                    for context in schema.contexts(scope) {
                        out.push(Triplet {
                            a,
                            b,
                            cond,
                            context,
                        });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn universe_size(schema: &DomainSchema) -> u128 {
    let n = schema.len();
    let mut total = 0u128;
    for a in 0..n {
        for b in a + 1..n {
            let per: u128 = (0..n)
                .filter(|&v| v != a && v != b)
                .map(|v| schema.cardinality(v) as u128 + 2)
                .product();
            total += per;
        }
    }
    total
}

/// A context-specific dependency model `I_c`: a truth value for every
/// canonical triplet, contexts included.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiModel {
    schema: Arc<DomainSchema>,
    truth: BTreeMap<Triplet, bool>,
}

impl CsiModel {
    pub fn from_fn(
        schema: impl Into<Arc<DomainSchema>>,
        mut truth: impl FnMut(&Triplet) -> bool,
    ) -> Result<Self> {
        let schema = schema.into();
        let size = universe_size(&schema);
        if size > MAX_TRIPLETS {
            return Err(Error::CapExceeded {
                states: size,
                cap: MAX_TRIPLETS,
            });
        }
        let truth = triplet_universe(&schema)
            .into_iter()
            .map(|t| {
                let v = truth(&t);
                (t, v)
            })
            .collect();
        Ok(CsiModel { schema, truth })
    }

    pub fn all_true(schema: impl Into<Arc<DomainSchema>>) -> Result<Self> {
        Self::from_fn(schema, |_| true)
    }

    pub fn all_false(schema: impl Into<Arc<DomainSchema>>) -> Result<Self> {
        Self::from_fn(schema, |_| false)
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<DomainSchema> {
        &self.schema
    }

    pub fn get(&self, t: &Triplet) -> Option<bool> {
        self.truth.get(t).copied()
    }

    /// Truth value of a triplet; triplets outside the universe are false.
    pub fn holds(&self, t: &Triplet) -> bool {
        self.get(t).unwrap_or(false)
    }

    /// Overwrite one entry.
    pub fn set(&mut self, t: &Triplet, value: bool) -> Result<()> {
        match self.truth.get_mut(t) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::UnknownVariable(t.render(&self.schema))),
        }
    }

    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Triplet, bool)> {
        self.truth.iter().map(|(t, &v)| (t, v))
    }

    /// True triplets in canonical order.
    pub fn independences(&self) -> impl Iterator<Item = &Triplet> {
        self.truth.iter().filter(|(_, &v)| v).map(|(t, _)| t)
    }
}

/// `I_c` as induced by a positive distribution: every triplet is decided by
/// [`test_csi`].
pub fn build_csi_model(p: &JointTable, tol: f64) -> Result<CsiModel> {
    if !p.is_positive() {
        return Err(Error::NotPositive);
    }
    let mut failure = None;
    let model = CsiModel::from_fn(p.schema_arc().clone(), |t| match test_triplet(p, t, tol) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            false
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(model),
    }
}

/// A dependency model over a sub-domain, optionally reduced under a fixed
/// context. Stored as, for each `(a, U)`, the set of `b` with `<a, b | U>`.
#[derive(Clone, PartialEq, Eq)]
pub struct DependencyModel {
    schema: Arc<DomainSchema>,
    domain: VarSet,
    context: Context,
    independent: Vec<VarSet>,
}

impl fmt::Debug for DependencyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let triplets: Vec<String> = self.triplets().map(|t| t.render(&self.schema)).collect();
        f.debug_struct("DependencyModel")
            .field("domain", &self.schema.render_set(self.domain))
            .field("context", &self.schema.render_context(&self.context))
            .field("independences", &triplets)
            .finish()
    }
}

impl DependencyModel {
    /// Build a total model over `domain` by evaluating `truth(a, b, U)` once per
    /// canonical triplet (`a < b`).
    pub fn from_fn(
        schema: impl Into<Arc<DomainSchema>>,
        domain: VarSet,
        context: Context,
        mut truth: impl FnMut(usize, usize, VarSet) -> bool,
    ) -> Result<Self> {
        let schema = schema.into();
        let n = schema.len();
        if n > MAX_MODEL_VARS {
            return Err(Error::InvalidSchema(format!(
                "dependency models support at most {MAX_MODEL_VARS} variables, schema has {n}"
            )));
        }
        schema.check_set(domain)?;
        schema.check_set(context.scope())?;
        if !domain.is_disjoint(context.scope()) {
            return Err(Error::OverlappingSets(
                "model domain overlaps its context".into(),
            ));
        }
        let mut independent = vec![VarSet::EMPTY; n << n];
        let vars = domain.to_vec();
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                let rest = domain.without(a).without(b);
                for cond in rest.subsets() {
                    if truth(a, b, cond) {
                        let u = cond.bits() as usize;
                        independent[(a << n) | u] = independent[(a << n) | u].with(b);
                        independent[(b << n) | u] = independent[(b << n) | u].with(a);
                    }
                }
            }
        }
        Ok(DependencyModel {
            schema,
            domain,
            context,
            independent,
        })
    }

    pub fn all_true(schema: impl Into<Arc<DomainSchema>>, domain: VarSet) -> Result<Self> {
        Self::from_fn(schema, domain, Context::empty(), |_, _, _| true)
    }

    pub fn all_false(schema: impl Into<Arc<DomainSchema>>, domain: VarSet) -> Result<Self> {
        Self::from_fn(schema, domain, Context::empty(), |_, _, _| false)
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn schema_arc(&self) -> &Arc<DomainSchema> {
        &self.schema
    }

    pub fn domain(&self) -> VarSet {
        self.domain
    }

    /// The fixed context a reduced model lives under (empty otherwise).
    pub fn context(&self) -> &Context {
        &self.context
    }

    /// The variables `b` with `<a, b | U>` true.
    pub fn independent_of(&self, a: usize, cond: VarSet) -> VarSet {
        if !self.domain.contains(a) || !cond.is_subset(self.domain) {
            return VarSet::EMPTY;
        }
        self.independent[(a << self.schema.len()) | cond.bits() as usize]
    }

    pub fn holds(&self, a: usize, b: usize, cond: VarSet) -> bool {
        self.independent_of(a, cond).contains(b)
    }

    /// Set-valued query: every `a` in `left` is independent of every `b` in
    /// `right` given `cond`.
    pub fn holds_sets(&self, left: VarSet, right: VarSet, cond: VarSet) -> bool {
        left.iter()
            .all(|a| right.is_subset(self.independent_of(a, cond)))
    }

    /// True triplets in canonical order, carrying the model's context.
    pub fn triplets(&self) -> impl Iterator<Item = Triplet> + '_ {
        let vars = self.domain.to_vec();
        let mut out = Vec::new();
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                for cond in self.domain.without(a).without(b).subsets() {
                    if self.holds(a, b, cond) {
                        out.push(Triplet {
                            a,
                            b,
                            cond,
                            context: self.context.clone(),
                        });
                    }
                }
            }
        }
        out.sort();
        out.into_iter()
    }

    pub fn is_all_true(&self) -> bool {
        let vars = self.domain.to_vec();
        vars.iter().enumerate().all(|(i, &a)| {
            vars[i + 1..].iter().all(|&b| {
                self.domain
                    .without(a)
                    .without(b)
                    .subsets()
                    .all(|cond| self.holds(a, b, cond))
            })
        })
    }
}

/// The reduced dependency model `I_{x_W}` over `X \ W`: `<a, b | U>` is the
/// conjunction over every `x_U` of `I_c(<a, b | x_U, x_W>)`.
pub fn reduce(ic: &CsiModel, ctx: &Context) -> Result<DependencyModel> {
    let schema = ic.schema_arc().clone();
    schema.check_set(ctx.scope())?;
    let domain = schema.all().difference(ctx.scope());
    let mut failure = None;
    let model = DependencyModel::from_fn(schema.clone(), domain, ctx.clone(), |a, b, cond| {
        schema
            .contexts(cond)
            .into_iter()
            .all(|xu| match xu.join(ctx) {
                Ok(context) => ic.holds(&Triplet {
                    a,
                    b,
                    cond: VarSet::EMPTY,
                    context,
                }),
                Err(e) => {
                    failure.get_or_insert(e);
                    false
                }
            })
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(model),
    }
}

/// First triplet asserted by `model` that fails in `p`, if any.
///
/// Variables are matched by name. When `p` binds the model's context variables
/// the assertions are tested as CSIs under that context; when `p` is already
/// the conditional `p(X \ X_W | x_W)` they are tested as plain CIs.
pub fn i_map_violation(
    model: &DependencyModel,
    p: &JointTable,
    tol: f64,
) -> Result<Option<Triplet>> {
    let ms = model.schema();
    let ps = p.schema();
    let map = |v: usize| ps.index_of(ms.name(v));
    let domain_map: Vec<Option<usize>> = (0..ms.len())
        .map(|v| {
            if model.domain().contains(v) {
                map(v).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let ctx_vars: Vec<(usize, Option<usize>)> = model
        .context()
        .iter()
        .map(|(v, _)| (v, ps.index_of(ms.name(v)).ok()))
        .collect();
    let bound = ctx_vars.iter().filter(|(_, m)| m.is_some()).count();
    let ctx = if bound == ctx_vars.len() {
        Context::from_pairs(
            model
                .context()
                .iter()
                .map(|(v, x)| (map(v).expect("checked above"), x)),
        )?
    } else if bound == 0 {
        Context::empty()
    } else {
        let missing = ctx_vars.iter().find(|(_, m)| m.is_none()).unwrap().0;
        return Err(Error::UnknownVariable(ms.name(missing).to_string()));
    };
    for t in model.triplets() {
        let a = domain_map[t.a].expect("domain variable");
        let b = domain_map[t.b].expect("domain variable");
        let cond: VarSet = t
            .cond
            .iter()
            .map(|v| domain_map[v].expect("domain variable"))
            .collect();
        if !test_csi(p, a, b, cond, &ctx, tol)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Every independence asserted by `model` holds in `p`.
pub fn is_i_map(model: &DependencyModel, p: &JointTable, tol: f64) -> Result<bool> {
    Ok(i_map_violation(model, p, tol)?.is_none())
}

/// First true triplet of `ic` refuted by `p`, if any.
pub fn csi_map_violation(ic: &CsiModel, p: &JointTable, tol: f64) -> Result<Option<Triplet>> {
    if ic.schema() != p.schema() {
        return Err(Error::SchemaMismatch(
            "CSI model and distribution are over different schemas".into(),
        ));
    }
    for t in ic.independences() {
        if !test_triplet(p, t, tol)? {
            return Ok(Some(t.clone()));
        }
    }
    Ok(None)
}

/// Every CSI asserted by `ic` holds in `p`.
pub fn is_csi_map(ic: &CsiModel, p: &JointTable, tol: f64) -> Result<bool> {
    Ok(csi_map_violation(ic, p, tol)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema3() -> Arc<DomainSchema> {
        Arc::new(DomainSchema::binary(&["a", "b", "c"]).unwrap())
    }

    /// `p(a, b, c)` proportional to `exp(theta * [a = b = c = 1])`.
    fn d2() -> JointTable {
        JointTable::from_fn(schema3(), |x| {
            if x.values() == [1, 1, 1] {
                1f64.exp()
            } else {
                1.0
            }
        })
        .unwrap()
    }

    #[test]
    fn independent_coins_are_independent() {
        let s = Arc::new(DomainSchema::binary(&["a", "b"]).unwrap());
        let p =
            JointTable::from_fn(s, |x| [0.3, 0.7][x.value(0)] * [0.6, 0.4][x.value(1)]).unwrap();
        assert!(test_ci(&p, 0, 1, VarSet::EMPTY, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn malformed_triplets_are_rejected() {
        let p = JointTable::uniform(schema3());
        assert!(matches!(
            test_ci(&p, 0, 0, VarSet::EMPTY, DEFAULT_TOL),
            Err(Error::OverlappingSets(_))
        ));
        assert!(matches!(
            test_ci(&p, 0, 1, VarSet::singleton(0), DEFAULT_TOL),
            Err(Error::OverlappingSets(_))
        ));
        assert!(matches!(
            test_ci(&p, 0, 7, VarSet::EMPTY, DEFAULT_TOL),
            Err(Error::UnknownVariable(_))
        ));
        let ctx = Context::from_pairs([(2, 0)]).unwrap();
        assert!(matches!(
            test_csi(&p, 0, 1, VarSet::singleton(2), &ctx, DEFAULT_TOL),
            Err(Error::OverlappingSets(_))
        ));
    }

    #[test]
    fn d2_context_specific_independence() {
        let p = d2();
        let c0 = Context::from_pairs([(2, 0)]).unwrap();
        let c1 = Context::from_pairs([(2, 1)]).unwrap();
        assert!(test_csi(&p, 0, 1, VarSet::EMPTY, &c0, DEFAULT_TOL).unwrap());
        assert!(!test_csi(&p, 0, 1, VarSet::EMPTY, &c1, DEFAULT_TOL).unwrap());
        assert!(!test_ci(&p, 0, 1, VarSet::singleton(2), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn uniform_makes_everything_independent() {
        let p = JointTable::uniform(schema3());
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        assert!(ic.iter().all(|(_, v)| v));
        // 3 pairs, one remaining variable in {none, U, W=0, W=1}.
        assert_eq!(ic.len(), 12);
    }

    #[test]
    fn build_requires_positivity() {
        let p =
            JointTable::normalize(schema3(), vec![1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            build_csi_model(&p, DEFAULT_TOL),
            Err(Error::NotPositive)
        ));
    }

    #[test]
    fn reduce_examples() {
        let s = schema3();
        let all = CsiModel::all_true(s.clone()).unwrap();
        let r = reduce(&all, &Context::from_pairs([(1, 0)]).unwrap()).unwrap();
        assert!(r.is_all_true());
        assert_eq!(r.domain(), VarSet::from_iter([0, 2]));

        let ic = build_csi_model(&d2(), DEFAULT_TOL).unwrap();
        let r1 = reduce(&ic, &Context::from_pairs([(2, 1)]).unwrap()).unwrap();
        assert!(!r1.holds(0, 1, VarSet::EMPTY));
        let r0 = reduce(&ic, &Context::from_pairs([(2, 0)]).unwrap()).unwrap();
        assert!(r0.holds(0, 1, VarSet::EMPTY));
        let r = reduce(&ic, &Context::empty()).unwrap();
        for a in 0..3 {
            for b in a + 1..3 {
                let t = Triplet::ci(a, b, VarSet::EMPTY).unwrap();
                assert_eq!(r.holds(a, b, VarSet::EMPTY), ic.holds(&t));
            }
        }
    }

    #[test]
    fn map_checks() {
        let s = schema3();
        let p = d2();
        let none = DependencyModel::all_false(s.clone(), s.all()).unwrap();
        assert!(is_i_map(&none, &p, DEFAULT_TOL).unwrap());
        let ab = DependencyModel::from_fn(s.clone(), s.all(), Context::empty(), |a, b, u| {
            (a, b, u) == (0, 1, VarSet::EMPTY)
        })
        .unwrap();
        assert!(!is_i_map(&ab, &p, DEFAULT_TOL).unwrap());

        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        assert!(is_csi_map(&ic, &p, DEFAULT_TOL).unwrap());
        assert!(is_csi_map(&CsiModel::all_false(s.clone()).unwrap(), &p, DEFAULT_TOL).unwrap());
        assert!(!is_csi_map(&CsiModel::all_true(s).unwrap(), &p, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn reduced_model_checks_against_the_conditional() {
        let p = d2();
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let ctx = Context::from_pairs([(2, 0)]).unwrap();
        let r = reduce(&ic, &ctx).unwrap();
        let cond = p.condition(&ctx).unwrap();
        assert!(is_i_map(&r, &cond, DEFAULT_TOL).unwrap());
        assert!(is_i_map(&r, &p, DEFAULT_TOL).unwrap());
        // Asserting the c=0 independence under c=1 is refuted.
        let wrong = p
            .condition(&Context::from_pairs([(2, 1)]).unwrap())
            .unwrap();
        assert!(!is_i_map(&r, &wrong, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn triplet_parse_round_trip() {
        let s = schema3();
        let t = Triplet::new(1, 0, VarSet::EMPTY, Context::from_pairs([(2, 0)]).unwrap()).unwrap();
        assert_eq!(t.a(), 0);
        let line = t.render(&s);
        assert_eq!(line, "a b | {} | {c=0}");
        assert_eq!(Triplet::parse(&s, &line).unwrap(), t);
        assert_eq!(
            Triplet::parse(&s, "b a | c |").unwrap(),
            Triplet::ci(0, 1, VarSet::singleton(2)).unwrap()
        );
    }
}
