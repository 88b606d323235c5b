//! Log-linear models with Kronecker-delta features.
//!
//! A feature is a partial assignment `f_C`; it is active on a complete
//! assignment `x` when `x|_C = f_C`. A model assigns a weight to each feature
//! and defines
//!
//! ```text
//! p(x) = exp(sum_alpha theta_alpha * delta(f_alpha, x) - ln Z)
//! ```

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::domain::{Assignment, Context, DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::independence::{reduce, CsiModel, DependencyModel, Triplet};
use crate::table::JointTable;

/// An assignment to a subset of the variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    assignment: Context,
}

impl fmt::Debug for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Feature{:?}", self.assignment.iter().collect::<Vec<_>>())
    }
}

/// Canonical order: by scope size, then scope members, then values.
impl Ord for Feature {
    fn cmp(&self, other: &Self) -> Ordering {
        self.scope()
            .len()
            .cmp(&other.scope().len())
            .then_with(|| self.scope().cmp_lexicographic(other.scope()))
            .then_with(|| self.values().cmp(other.values()))
    }
}

impl PartialOrd for Feature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Context> for Feature {
    fn from(assignment: Context) -> Self {
        Feature { assignment }
    }
}

impl Feature {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Feature {
            assignment: Context::from_pairs(pairs)?,
        })
    }

    /// Parse `a=1,b=0` against a schema.
    pub fn parse(schema: &DomainSchema, input: &str) -> Result<Self> {
        Ok(schema.parse_context(input)?.into())
    }

    pub fn scope(&self) -> VarSet {
        self.assignment.scope()
    }

    pub fn values(&self) -> &[usize] {
        self.assignment.values()
    }

    pub fn assignment(&self) -> &Context {
        &self.assignment
    }

    /// Kronecker delta: 1 when `x|_C` equals the feature's values.
    pub fn delta(&self, x: &Assignment) -> u8 {
        u8::from(self.assignment.is_satisfied_by(x))
    }

    pub fn matches(&self, ctx: &Context, mode: MatchMode) -> bool {
        let consistent = self.assignment.is_consistent_with(ctx);
        match mode {
            MatchMode::Consistent => consistent,
            MatchMode::Strict => consistent && ctx.scope().is_subset(self.scope()),
        }
    }

    pub fn render(&self, schema: &DomainSchema) -> String {
        schema.render_context(&self.assignment)
    }

    fn check(&self, schema: &DomainSchema) -> Result<()> {
        schema.check_set(self.scope())?;
        for (var, value) in self.assignment.iter() {
            if value >= schema.cardinality(var) {
                return Err(Error::InvalidFeature(format!(
                    "value {value} out of range for `{}`",
                    schema.name(var)
                )));
            }
        }
        if self.scope().is_empty() {
            return Err(Error::InvalidFeature("feature with empty scope".into()));
        }
        Ok(())
    }
}

/// `delta(f, x)`.
pub fn delta(f: &Feature, x: &Assignment) -> u8 {
    f.delta(x)
}

/// How a feature `f_C` is compared with a context `x_W`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// `f_C` agrees with `x_W` on `C ∩ W`.
    #[default]
    Consistent,
    /// `W ⊆ C` and `f_C|_W = x_W`.
    Strict,
}

/// Whether feature `f` is subject to the independences of context `ctx`.
pub fn matches(f: &Feature, ctx: &Context, mode: MatchMode) -> bool {
    f.matches(ctx, mode)
}

fn check_features(schema: &DomainSchema, features: &[Feature]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for f in features {
        f.check(schema)?;
        if !seen.insert(f) {
            return Err(Error::InvalidFeature(format!(
                "duplicate feature {}",
                f.render(schema)
            )));
        }
    }
    Ok(())
}

/// `sum_alpha theta_alpha * delta(f_alpha, x)` for every state, row-major.
fn energies(schema: &DomainSchema, features: &[Feature], weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; schema.states()];
    for (f, &w) in features.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (i, e) in out.iter_mut().enumerate() {
            let x = schema.assignment(i);
            if f.assignment.is_satisfied_by(&x) {
                *e += w;
            }
        }
    }
    out
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `ln Z`, with a max shift for stability.
pub fn partition(schema: &DomainSchema, features: &[Feature], weights: &[f64]) -> Result<f64> {
    if features.len() != weights.len() {
        return Err(Error::InvalidFeature(format!(
            "{} features but {} weights",
            features.len(),
            weights.len()
        )));
    }
    check_features(schema, features)?;
    Ok(log_sum_exp(&energies(schema, features, weights)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogLinearModel {
    schema: Arc<DomainSchema>,
    features: Vec<Feature>,
    weights: Vec<f64>,
    log_z: f64,
}

impl LogLinearModel {
    /// A model whose `ln Z` is computed from the weights.
    pub fn new(
        schema: impl Into<Arc<DomainSchema>>,
        features: Vec<Feature>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let schema = schema.into();
        let log_z = partition(&schema, &features, &weights)?;
        Ok(LogLinearModel {
            schema,
            features,
            weights,
            log_z,
        })
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn log_prob(&self, x: &Assignment) -> f64 {
        let energy: f64 = self
            .features
            .iter()
            .zip(&self.weights)
            .map(|(f, w)| w * f64::from(f.delta(x)))
            .sum();
        energy - self.log_z
    }

    /// `p(x)` under the model.
    pub fn evaluate(&self, x: &Assignment) -> f64 {
        self.log_prob(x).exp()
    }

    pub fn to_table(&self) -> JointTable {
        let probs = energies(&self.schema, &self.features, &self.weights)
            .into_iter()
            .map(|e| (e - self.log_z).exp())
            .collect();
        JointTable::normalize(self.schema.clone(), probs).expect("exponentials are positive")
    }

    /// Features whose weight exceeds `eps` in magnitude.
    pub fn support(&self, eps: f64) -> Vec<Feature> {
        self.features
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| w.abs() > eps)
            .map(|(f, _)| f.clone())
            .collect()
    }

    pub fn weight_of(&self, f: &Feature) -> Option<f64> {
        self.features
            .iter()
            .position(|g| g == f)
            .map(|i| self.weights[i])
    }
}

/// Every canonical feature (no in-scope variable at its default value) whose
/// scope lies within one of `scopes`, in canonical order.
pub fn canonical_features(
    schema: &DomainSchema,
    scopes: &[VarSet],
    default: &Assignment,
) -> Vec<Feature> {
    let mut out = BTreeSet::new();
    for &outer in scopes {
        for scope in outer.subsets().filter(|s| !s.is_empty()) {
            for ctx in schema.contexts(scope) {
                if ctx.iter().all(|(v, x)| x != default.value(v)) {
                    out.insert(Feature::from(ctx));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Möbius-inversion parameters of `ln p` relative to a default assignment
/// (all zeros unless given). Reconstructs `p` exactly.
pub fn canonical_parameters(
    p: &JointTable,
    default: Option<&Assignment>,
) -> Result<LogLinearModel> {
    if !p.is_positive() {
        return Err(Error::NotPositive);
    }
    let schema = p.schema();
    let default = match default {
        Some(d) => {
            schema.check_assignment(d)?;
            d.clone()
        }
        None => Assignment::new(vec![0; schema.len()]),
    };
    let ln_p: Vec<f64> = p.probs().iter().map(|v| v.ln()).collect();
    let base = schema.index(&default);
    let features = canonical_features(schema, &[schema.all()], &default);
    let weights = features
        .iter()
        .map(|f| {
            let scope = f.scope();
            scope
                .subsets()
                .map(|sub| {
                    let idx = f.assignment.iter().filter(|(v, _)| sub.contains(*v)).fold(
                        base as isize,
                        |acc, (v, x)| {
                            acc + (x as isize - default.value(v) as isize)
                                * schema.stride(v) as isize
                        },
                    );
                    let sign = if (scope.len() - sub.len()) % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    };
                    sign * ln_p[idx as usize]
                })
                .sum()
        })
        .collect();
    LogLinearModel::new(p.schema_arc().clone(), features, weights)
}

/// A feature joining an independent pair under a context it matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub feature: Feature,
    pub triplet: Triplet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    pub verdict: bool,
    pub mode: MatchMode,
    pub violations: Vec<Violation>,
    /// (feature, context) pairs on which the two matching readings disagree
    /// while the reduced model asserts at least one independence.
    pub ambiguous_matches: usize,
}

impl FactorizationReport {
    fn from_violations(
        mode: MatchMode,
        violations: Vec<Violation>,
        ambiguous_matches: usize,
    ) -> Self {
        FactorizationReport {
            verdict: violations.is_empty(),
            mode,
            violations,
            ambiguous_matches,
        }
    }

    /// Distinct features that appear in some violation.
    pub fn offending_features(&self) -> BTreeSet<Feature> {
        self.violations.iter().map(|v| v.feature.clone()).collect()
    }
}

/// Check features against a list of already-reduced models.
pub fn factorizes_reduced(
    features: &[Feature],
    reduced: &[DependencyModel],
    mode: MatchMode,
) -> FactorizationReport {
    let mut violations = Vec::new();
    let mut ambiguous = 0;
    for model in reduced {
        let ctx = model.context();
        let triplets: Vec<Triplet> = model.triplets().collect();
        if triplets.is_empty() {
            continue;
        }
        for f in features {
            let consistent = f.matches(ctx, MatchMode::Consistent);
            let strict = f.matches(ctx, MatchMode::Strict);
            if consistent != strict {
                ambiguous += 1;
            }
            if !f.matches(ctx, mode) {
                continue;
            }
            let scope = f.scope();
            for t in &triplets {
                if scope.contains(t.a()) && scope.contains(t.b()) {
                    violations.push(Violation {
                        feature: f.clone(),
                        triplet: t.clone(),
                    });
                }
            }
        }
    }
    FactorizationReport::from_violations(mode, violations, ambiguous)
}

/// Reduced models of `ic` for every context over every scope in `family`.
pub fn reduced_models(ic: &CsiModel, family: &[VarSet]) -> Result<Vec<DependencyModel>> {
    let schema = ic.schema();
    let mut out = Vec::new();
    for &scope in family {
        for ctx in schema.contexts(scope) {
            out.push(reduce(ic, &ctx)?);
        }
    }
    Ok(out)
}

/// Features factorize according to `ic`: for every context `x_W`, every
/// `<a, b | U>` true in the reduced model and every feature matching `x_W`,
/// the feature's scope does not contain both `a` and `b`.
pub fn factorizes(
    features: &[Feature],
    ic: &CsiModel,
    mode: MatchMode,
) -> Result<FactorizationReport> {
    let family: Vec<VarSet> = ic.schema().all().subsets().collect();
    factorizes_over(features, ic, &family, mode)
}

/// [`factorizes`] restricted to contexts over the scopes in `family`.
pub fn factorizes_over(
    features: &[Feature],
    ic: &CsiModel,
    family: &[VarSet],
    mode: MatchMode,
) -> Result<FactorizationReport> {
    Ok(factorizes_reduced(
        features,
        &reduced_models(ic, family)?,
        mode,
    ))
}

fn design_matrix(schema: &DomainSchema, features: &[Feature]) -> DMatrix<f64> {
    DMatrix::from_fn(schema.states(), features.len(), |i, j| {
        f64::from(features[j].delta(&schema.assignment(i)))
    })
}

fn center_columns(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
}

/// Numerical rank of `d` and, given a target, the minimum-norm least-squares
/// solution of `d * theta = target`.
///
/// Works through the eigendecomposition of the Gram matrix on the smaller
/// side. nalgebra's SVD does not reliably reconstruct rank-deficient 0/1
/// design matrices; the symmetric eigensolver does.
fn min_norm_solve(d: DMatrix<f64>, target: Option<&DVector<f64>>) -> (Option<DVector<f64>>, usize) {
    let wide = d.nrows() <= d.ncols();
    let gram = if wide {
        &d * d.transpose()
    } else {
        d.transpose() * &d
    };
    let eig = gram.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let eps = 1e-10 * max.max(1.0);
    let rank = eig.eigenvalues.iter().filter(|&&l| l > eps).count();
    let theta = target.map(|t| {
        // Pseudo-inverse of the Gram matrix applied to `rhs`.
        let pinv = |rhs: DVector<f64>| {
            let mut c = eig.eigenvectors.transpose() * rhs;
            for (ci, &l) in c.iter_mut().zip(eig.eigenvalues.iter()) {
                *ci = if l > eps { *ci / l } else { 0.0 };
            }
            &eig.eigenvectors * c
        };
        if wide {
            d.transpose() * pinv(t.clone())
        } else {
            pinv(d.transpose() * t)
        }
    });
    (theta, rank)
}

/// Dimension of the span of the features modulo constants: the number of free
/// parameters the feature set actually carries.
pub fn effective_parameters(schema: &DomainSchema, features: &[Feature]) -> Result<usize> {
    check_features(schema, features)?;
    if features.is_empty() {
        return Ok(0);
    }
    let mut d = design_matrix(schema, features);
    center_columns(&mut d);
    Ok(min_norm_solve(d, None).1)
}

#[derive(Debug, Clone)]
pub struct RestrictedFit {
    pub model: LogLinearModel,
    /// `max_x |ln p(x) - ln q(x)|` for the fitted model `q`.
    pub residual: f64,
    /// Effective number of free parameters of the feature set.
    pub rank: usize,
}

/// Least-squares fit of `ln p(x) = sum theta * delta + c` over every state,
/// restricted to `features`. The constant is absorbed into `ln Z`.
pub fn fit_restricted(p: &JointTable, features: &[Feature]) -> Result<RestrictedFit> {
    if !p.is_positive() {
        return Err(Error::NotPositive);
    }
    let schema = p.schema();
    check_features(schema, features)?;
    let ln_p = DVector::from_iterator(schema.states(), p.probs().iter().map(|v| v.ln()));
    let (weights, rank) = if features.is_empty() {
        (Vec::new(), 0)
    } else {
        let mut d = design_matrix(schema, features);
        center_columns(&mut d);
        let target = ln_p.add_scalar(-ln_p.mean());
        let (theta, rank) = min_norm_solve(d, Some(&target));
        (
            theta
                .map(|t| t.iter().copied().collect())
                .unwrap_or_default(),
            rank,
        )
    };
    let model = LogLinearModel::new(p.schema_arc().clone(), features.to_vec(), weights)?;
    let residual = schema
        .assignments()
        .zip(ln_p.iter())
        .map(|(x, &lp)| (lp - model.log_prob(&x)).abs())
        .fold(0.0, f64::max);
    Ok(RestrictedFit {
        model,
        residual,
        rank,
    })
}
