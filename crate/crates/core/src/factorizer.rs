//! Context-specific factorization of log-linear models and end-to-end
//! verification of its guarantees.
//!
//! For every context `x_W` the reduced model `I_{x_W}` is turned into its
//! pairwise graph; each maximal clique `C` contributes the features
//! `(y_C, x_W)` for every `y_C`, and each nonempty context contributes the
//! feature `x_W` itself. The union is then pruned of every feature that joins
//! an independent pair under a context it matches. Whether the surviving
//! features still represent `p` is decided by an exact least-squares fit in
//! log-space.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::{Assignment, Context, DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::graph::{graph_isomorph_mismatch, pairwise_graph, UndirectedGraph};
use crate::independence::{
    csi_map_violation, i_map_violation, is_i_map, CsiModel, DependencyModel, Triplet, DEFAULT_TOL,
};
use crate::loglinear::{
    canonical_features, effective_parameters, factorizes_reduced, fit_restricted, reduced_models,
    FactorizationReport, Feature, MatchMode,
};
use crate::table::JointTable;

/// Fitted log-probabilities within this bound count as an exact representation.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub tol: f64,
    pub residual_threshold: f64,
    pub mode: MatchMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_TOL,
            residual_threshold: DEFAULT_RESIDUAL_THRESHOLD,
            mode: MatchMode::Consistent,
        }
    }
}

/// Every subset of the schema's variables: the full context family.
pub fn all_scopes(schema: &DomainSchema) -> Vec<VarSet> {
    schema.all().subsets().collect()
}

fn not_isomorph(model: &DependencyModel) -> Result<()> {
    match graph_isomorph_mismatch(model) {
        None => Ok(()),
        Some(t) => Err(Error::NotGraphIsomorph {
            context: format!("{{{}}}", model.schema().render_context(model.context())),
            witness: t.render(model.schema()),
        }),
    }
}

/// Per-context clique features and context features, before pruning.
fn candidate_features(
    schema: &DomainSchema,
    reduced: &[DependencyModel],
) -> Result<BTreeSet<Feature>> {
    let mut out = BTreeSet::new();
    for model in reduced {
        not_isomorph(model)?;
        let ctx = model.context();
        if !ctx.is_empty() {
            out.insert(Feature::from(ctx.clone()));
        }
        for clique in pairwise_graph(model).cliques() {
            for y in schema.contexts(clique) {
                out.insert(Feature::from(y.join(ctx)?));
            }
        }
    }
    Ok(out)
}

fn factorize_reduced(
    schema: &DomainSchema,
    reduced: &[DependencyModel],
    mode: MatchMode,
) -> Result<Vec<Feature>> {
    let candidates: Vec<Feature> = candidate_features(schema, reduced)?.into_iter().collect();
    let offending = factorizes_reduced(&candidates, reduced, mode).offending_features();
    Ok(candidates
        .into_iter()
        .filter(|f| !offending.contains(f))
        .collect())
}

/// The context-specific feature set for the contexts over each scope in
/// `family`, in canonical order.
pub fn factorize_csi(
    p: &JointTable,
    ic: &CsiModel,
    family: &[VarSet],
    mode: MatchMode,
) -> Result<Vec<Feature>> {
    if !p.is_positive() {
        return Err(Error::NotPositive);
    }
    if ic.schema() != p.schema() {
        return Err(Error::SchemaMismatch(
            "CSI model and distribution are over different schemas".into(),
        ));
    }
    for &scope in family {
        p.schema().check_set(scope)?;
    }
    let reduced = reduced_models(ic, family)?;
    factorize_reduced(p.schema(), &reduced, mode)
}

/// Outcome of the plain (context-free) factorization route.
#[derive(Debug, Clone)]
pub struct CiFactorization {
    pub graph: UndirectedGraph,
    pub cliques: Vec<VarSet>,
    pub features: Vec<Feature>,
    /// No true `<a, b | U>` has `a` and `b` together in a clique.
    pub separated_pairs_respected: bool,
    pub residual: f64,
    pub verified: bool,
}

/// Factorize `p` over the cliques of a graph-isomorph I-map `model`.
pub fn verify_ci_factorization(
    p: &JointTable,
    model: &DependencyModel,
    tol: f64,
    residual_threshold: f64,
) -> Result<CiFactorization> {
    let schema = p.schema();
    if !p.is_positive() {
        return Err(Error::precondition(
            "positivity",
            "distribution has a zero entry",
        ));
    }
    if model.schema() != schema || model.domain() != schema.all() || !model.context().is_empty() {
        return Err(Error::SchemaMismatch(
            "dependency model must cover the distribution's full domain".into(),
        ));
    }
    if let Some(t) = i_map_violation(model, p, tol)? {
        return Err(Error::precondition(
            "I-map",
            format!("{} does not hold in the distribution", t.render(schema)),
        ));
    }
    if let Some(t) = graph_isomorph_mismatch(model) {
        return Err(Error::precondition(
            "graph-isomorph",
            format!(
                "{} disagrees with separation in the pairwise graph",
                t.render(schema)
            ),
        ));
    }
    let graph = pairwise_graph(model);
    let cliques = graph.cliques();
    let default = Assignment::new(vec![0; schema.len()]);
    let features = canonical_features(schema, &cliques, &default);
    let separated_pairs_respected = model.triplets().all(|t| {
        !cliques
            .iter()
            .any(|c| c.contains(t.a()) && c.contains(t.b()))
    });
    let residual = fit_restricted(p, &features)?.residual;
    Ok(CiFactorization {
        graph,
        cliques,
        features,
        separated_pairs_respected,
        residual,
        verified: separated_pairs_respected && residual <= residual_threshold,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContextVerdict {
    pub context: Context,
    pub graph_isomorph: bool,
    pub counterexample: Option<Triplet>,
    /// The reduced model is an I-map of `p(X \ X_W | x_W)`; `None` when the
    /// conditional is undefined.
    pub conditional_i_map: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureCounts {
    /// Free parameters of the saturated model: states - 1.
    pub saturated: usize,
    /// Free parameters after pruning with conditional independences only.
    pub ci_pruned: Option<usize>,
    /// Free parameters of the context-specific feature set.
    pub csi_pruned: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    schema: Arc<DomainSchema>,
    pub options: VerifyOptions,
    pub positive: bool,
    pub csi_map: bool,
    pub csi_map_counterexample: Option<Triplet>,
    pub contexts: Vec<ContextVerdict>,
    pub features: Vec<Feature>,
    pub factorization: Option<FactorizationReport>,
    pub residual: Option<f64>,
    pub counts: FeatureCounts,
    pub theorem_verified: bool,
}

impl TheoremReport {
    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn all_graph_isomorph(&self) -> bool {
        self.contexts.iter().all(|c| c.graph_isomorph)
    }

    pub fn preconditions_hold(&self) -> bool {
        self.positive && self.csi_map && self.all_graph_isomorph()
    }

    /// The first unmet precondition, named.
    pub fn failed_precondition(&self) -> Option<(String, String)> {
        let s = &self.schema;
        if !self.positive {
            return Some(("positivity".into(), "distribution has a zero entry".into()));
        }
        if !self.csi_map {
            let witness = self
                .csi_map_counterexample
                .as_ref()
                .map(|t| format!("{} does not hold", t.render(s)))
                .unwrap_or_default();
            return Some(("CSI-map".into(), witness));
        }
        self.contexts.iter().find(|c| !c.graph_isomorph).map(|c| {
            let witness = c
                .counterexample
                .as_ref()
                .map(|t| t.render(s))
                .unwrap_or_default();
            (
                "graph-isomorph".into(),
                format!("context {{{}}}: {}", s.render_context(&c.context), witness),
            )
        })
    }

    pub fn render_text(&self) -> String {
        let s = &self.schema;
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let names: Vec<String> = s
            .variables()
            .iter()
            .map(|v| format!("{}({})", v.name, v.cardinality))
            .collect();
        writeln!(out, "variables: {}", names.join(" ")).unwrap();
        writeln!(out, "positive: {}", yes(self.positive)).unwrap();
        write!(out, "csi-map: {}", yes(self.csi_map)).unwrap();
        if let Some(t) = &self.csi_map_counterexample {
            write!(out, " (refuted: {})", t.render(s)).unwrap();
        }
        out.push('\n');
        let iso = self.contexts.iter().filter(|c| c.graph_isomorph).count();
        writeln!(
            out,
            "contexts: {} checked, {} graph-isomorph",
            self.contexts.len(),
            iso
        )
        .unwrap();
        for c in &self.contexts {
            write!(out, "  {{{}}}: ", s.render_context(&c.context)).unwrap();
            if c.graph_isomorph {
                out.push_str("graph-isomorph");
            } else {
                out.push_str("not graph-isomorph");
                if let Some(t) = &c.counterexample {
                    write!(out, " ({})", t.render(s)).unwrap();
                }
            }
            if c.conditional_i_map == Some(false) {
                out.push_str(", not an I-map of the conditional");
            }
            out.push('\n');
        }
        match &self.factorization {
            Some(f) => {
                writeln!(
                    out,
                    "factorization: {} ({} matching, {} violations, {} ambiguous matches)",
                    if f.verdict { "holds" } else { "fails" },
                    match f.mode {
                        MatchMode::Consistent => "consistent",
                        MatchMode::Strict => "strict",
                    },
                    f.violations.len(),
                    f.ambiguous_matches
                )
                .unwrap();
                for v in f.violations.iter().take(10) {
                    writeln!(
                        out,
                        "  feature {} joins {}",
                        v.feature.render(s),
                        v.triplet.render(s)
                    )
                    .unwrap();
                }
            }
            None => out.push_str("factorization: not attempted\n"),
        }
        if !self.features.is_empty() {
            writeln!(out, "features: {}", self.features.len()).unwrap();
            for f in &self.features {
                writeln!(out, "  {}", f.render(s)).unwrap();
            }
        }
        match self.residual {
            Some(r) => writeln!(
                out,
                "residual: {} (threshold {:e}, {})",
                format_residual(r),
                self.options.residual_threshold,
                if r <= self.options.residual_threshold {
                    "within"
                } else {
                    "exceeded"
                }
            )
            .unwrap(),
            None => out.push_str("residual: not computed\n"),
        }
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |n| n.to_string());
        writeln!(
            out,
            "parameters: saturated {}, ci-pruned {}, csi-pruned {}",
            self.counts.saturated,
            opt(self.counts.ci_pruned),
            opt(self.counts.csi_pruned)
        )
        .unwrap();
        if let Some((name, witness)) = self.failed_precondition() {
            writeln!(out, "failed precondition: {name}: {witness}").unwrap();
        }
        writeln!(out, "verified: {}", yes(self.theorem_verified)).unwrap();
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = &self.schema;
        let contexts: Vec<_> = self
            .contexts
            .iter()
            .map(|c| {
                serde_json::json!({
                    "context": s.render_context(&c.context),
                    "graph_isomorph": c.graph_isomorph,
                    "counterexample": c.counterexample.as_ref().map(|t| t.render(s)),
                    "conditional_i_map": c.conditional_i_map,
                })
            })
            .collect();
        let factorization = self.factorization.as_ref().map(|f| {
            serde_json::json!({
                "verdict": f.verdict,
                "mode": f.mode,
                "ambiguous_matches": f.ambiguous_matches,
                "violations": f.violations.iter().map(|v| serde_json::json!({
                    "feature": v.feature.render(s),
                    "triplet": v.triplet.render(s),
                })).collect::<Vec<_>>(),
            })
        });
        serde_json::json!({
            "variables": s.variables(),
            "options": self.options,
            "positive": self.positive,
            "csi_map": self.csi_map,
            "csi_map_counterexample": self.csi_map_counterexample.as_ref().map(|t| t.render(s)),
            "contexts": contexts,
            "factorization": factorization,
            "features": self.features.iter().map(|f| f.render(s)).collect::<Vec<_>>(),
            "residual": self.residual,
            "counts": self.counts,
            "failed_precondition": self.failed_precondition().map(|(n, w)| serde_json::json!({"name": n, "witness": w})),
            "theorem_verified": self.theorem_verified,
        })
    }
}

/// Stable rendering of fit residuals: values at the level of rounding noise
/// print as a bound.
pub fn format_residual(r: f64) -> String {
    if r < 1e-12 {
        "<1e-12".to_string()
    } else {
        format!("{r:.3e}")
    }
}

/// Check every precondition over all contexts and, when they hold, build and
/// validate the context-specific factorization.
pub fn verify_cshc(p: &JointTable, ic: &CsiModel, options: VerifyOptions) -> Result<TheoremReport> {
    verify_cshc_over(p, ic, &all_scopes(p.schema()), options)
}

/// [`verify_cshc`] restricted to contexts over the scopes in `family`.
pub fn verify_cshc_over(
    p: &JointTable,
    ic: &CsiModel,
    family: &[VarSet],
    options: VerifyOptions,
) -> Result<TheoremReport> {
    let schema = p.schema_arc().clone();
    let positive = p.is_positive();
    let csi_map_counterexample = csi_map_violation(ic, p, options.tol)?;
    let csi_map = csi_map_counterexample.is_none();
    for &scope in family {
        schema.check_set(scope)?;
    }
    let reduced = reduced_models(ic, family)?;
    let mut contexts = Vec::with_capacity(reduced.len());
    for model in &reduced {
        let counterexample = graph_isomorph_mismatch(model);
        let conditional_i_map = match p.condition(model.context()) {
            Ok(cond) => is_i_map(model, &cond, options.tol).ok(),
            Err(_) => None,
        };
        contexts.push(ContextVerdict {
            context: model.context().clone(),
            graph_isomorph: counterexample.is_none(),
            counterexample,
            conditional_i_map,
        });
    }
    let mut counts = FeatureCounts {
        saturated: schema.states() - 1,
        ci_pruned: None,
        csi_pruned: None,
    };
    let mut report = TheoremReport {
        schema: schema.clone(),
        options,
        positive,
        csi_map,
        csi_map_counterexample,
        contexts,
        features: Vec::new(),
        factorization: None,
        residual: None,
        counts,
        theorem_verified: false,
    };
    if !report.preconditions_hold() {
        return Ok(report);
    }
    let features = factorize_reduced(&schema, &reduced, options.mode)?;
    let factorization = factorizes_reduced(&features, &reduced, options.mode);
    let fit = fit_restricted(p, &features)?;
    counts.csi_pruned = Some(fit.rank);
    counts.ci_pruned = ci_route_parameters(&schema, ic, options.mode)?;
    report.theorem_verified = factorization.verdict && fit.residual <= options.residual_threshold;
    report.features = features;
    report.factorization = Some(factorization);
    report.residual = Some(fit.residual);
    report.counts = counts;
    Ok(report)
}

/// Free parameters of the context-free route, when the unconditioned reduced
/// model is graph-isomorph.
fn ci_route_parameters(
    schema: &DomainSchema,
    ic: &CsiModel,
    mode: MatchMode,
) -> Result<Option<usize>> {
    let reduced = reduced_models(ic, &[VarSet::EMPTY])?;
    if graph_isomorph_mismatch(&reduced[0]).is_some() {
        return Ok(None);
    }
    let features = factorize_reduced(schema, &reduced, mode)?;
    Ok(Some(effective_parameters(schema, &features)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SparsityReport {
    pub saturated: usize,
    pub ci_pruned: usize,
    pub csi_pruned: usize,
}

impl SparsityReport {
    pub fn ci_ratio(&self) -> f64 {
        ratio(self.ci_pruned, self.saturated)
    }

    pub fn csi_ratio(&self) -> f64 {
        ratio(self.csi_pruned, self.saturated)
    }

    pub fn csi_over_ci(&self) -> f64 {
        ratio(self.csi_pruned, self.ci_pruned)
    }

    pub fn render_text(&self) -> String {
        format!(
            "route        parameters  ratio\n\
             saturated    {:>10}  {:.4}\n\
             ci-pruned    {:>10}  {:.4}\n\
             csi-pruned   {:>10}  {:.4}\n\
             csi/ci       {:>10}  {:.4}\n",
            self.saturated,
            1.0,
            self.ci_pruned,
            self.ci_ratio(),
            self.csi_pruned,
            self.csi_ratio(),
            "",
            self.csi_over_ci()
        )
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Parameter counts of the saturated, CI-pruned and CSI-pruned routes.
pub fn sparsity_report(
    p: &JointTable,
    ic: &CsiModel,
    options: VerifyOptions,
) -> Result<SparsityReport> {
    let report = verify_cshc(p, ic, options)?;
    if let Some((name, witness)) = report.failed_precondition() {
        return Err(Error::PreconditionFailed {
            precondition: name,
            witness,
        });
    }
    match (report.counts.ci_pruned, report.counts.csi_pruned) {
        (Some(ci), Some(csi)) => Ok(SparsityReport {
            saturated: report.counts.saturated,
            ci_pruned: ci,
            csi_pruned: csi,
        }),
        _ => Err(Error::precondition(
            "graph-isomorph",
            "the unconditioned reduced model has no pairwise graph encoding",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::{build_csi_model, reduce};
    use crate::testkit;

    fn opts() -> VerifyOptions {
        VerifyOptions::default()
    }

    fn render(p: &JointTable, fs: &[Feature]) -> Vec<String> {
        fs.iter().map(|f| f.render(p.schema())).collect()
    }

    #[test]
    fn all_true_model_gives_singletons() {
        let p = testkit::coins();
        let ic = CsiModel::all_true(p.schema_arc().clone()).unwrap();
        let fs = factorize_csi(&p, &ic, &[VarSet::EMPTY], MatchMode::Consistent).unwrap();
        assert!(fs.iter().all(|f| f.scope().len() == 1));
        assert_eq!(fs.len(), 6);
    }

    #[test]
    fn d2_single_context_variable() {
        let p = testkit::d2();
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let c = p.schema().set_of(["c"]).unwrap();
        let fs = factorize_csi(&p, &ic, &[c], MatchMode::Consistent).unwrap();
        let names = render(&p, &fs);
        for f in [
            "a=0,c=0",
            "a=1,c=0",
            "b=1,c=0",
            "a=1,b=1,c=1",
            "a=0,b=0,c=1",
        ] {
            assert!(names.contains(&f.to_string()), "{f} missing from {names:?}");
        }
        // No a-b interaction survives under c=0.
        assert!(!fs
            .iter()
            .any(|f| f.scope().len() == 3 && f.values()[2] == 0));
        assert!(fit_restricted(&p, &fs).unwrap().residual <= DEFAULT_RESIDUAL_THRESHOLD);
    }

    #[test]
    fn d2_theorem_and_counts() {
        let p = testkit::d2();
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let report = verify_cshc(&p, &ic, opts()).unwrap();
        assert!(report.preconditions_hold());
        assert!(report.theorem_verified, "{}", report.render_text());
        assert_eq!(report.contexts.len(), 27);
        let s = sparsity_report(&p, &ic, opts()).unwrap();
        assert_eq!((s.saturated, s.ci_pruned, s.csi_pruned), (7, 7, 4));
    }

    #[test]
    fn coins_and_chain_counts() {
        for (p, want) in [(testkit::coins(), (7, 3, 3)), (testkit::chain(), (7, 5, 5))] {
            let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
            let s = sparsity_report(&p, &ic, opts()).unwrap();
            assert_eq!((s.saturated, s.ci_pruned, s.csi_pruned), want);
        }
    }

    #[test]
    fn fabricated_csi_refutes_csi_map() {
        let p = testkit::d2();
        let mut ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        ic.set(&Triplet::parse(p.schema(), "a b | | c=1").unwrap(), true)
            .unwrap();
        let report = verify_cshc(&p, &ic, opts()).unwrap();
        assert!(!report.csi_map);
        assert!(!report.theorem_verified);
        assert_eq!(report.failed_precondition().unwrap().0, "CSI-map");
        assert!(matches!(
            sparsity_report(&p, &ic, opts()),
            Err(Error::PreconditionFailed { .. })
        ));
    }

    #[test]
    fn uniform_is_verified_with_minimal_features() {
        let p = JointTable::uniform(testkit::binary_schema(3));
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let report = verify_cshc(&p, &ic, opts()).unwrap();
        assert!(report.theorem_verified);
        assert_eq!(report.counts.csi_pruned, Some(3));
    }

    #[test]
    fn xor_is_verified_but_dense() {
        let p = testkit::xor();
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let report = verify_cshc(&p, &ic, opts()).unwrap();
        assert!(report.theorem_verified);
        assert_eq!(report.counts.csi_pruned, Some(7));
        let singles: Vec<Feature> = p
            .schema()
            .all()
            .iter()
            .map(|v| Feature::from_pairs([(v, 1)]).unwrap())
            .collect();
        assert!(fit_restricted(&p, &singles).unwrap().residual > 0.1);
    }

    #[test]
    fn ci_route_examples() {
        let coins = testkit::coins();
        let all =
            DependencyModel::all_true(coins.schema_arc().clone(), coins.schema().all()).unwrap();
        let r =
            verify_ci_factorization(&coins, &all, DEFAULT_TOL, DEFAULT_RESIDUAL_THRESHOLD).unwrap();
        assert!(r.cliques.iter().all(|c| c.len() == 1));
        assert!(r.verified);

        let chain = testkit::chain();
        let ic = build_csi_model(&chain, DEFAULT_TOL).unwrap();
        let model = reduce(&ic, &Context::empty()).unwrap();
        let r = verify_ci_factorization(&chain, &model, DEFAULT_TOL, DEFAULT_RESIDUAL_THRESHOLD)
            .unwrap();
        assert_eq!(
            r.cliques,
            vec![VarSet::from_iter([0, 1]), VarSet::from_iter([1, 2])]
        );
        assert!(r.verified && r.separated_pairs_respected);

        let xor = testkit::xor();
        let bogus = DependencyModel::from_fn(
            xor.schema_arc().clone(),
            xor.schema().all(),
            Context::empty(),
            |a, b, u| (a, b, u) == (0, 1, VarSet::EMPTY),
        )
        .unwrap();
        match verify_ci_factorization(&xor, &bogus, DEFAULT_TOL, DEFAULT_RESIDUAL_THRESHOLD) {
            Err(Error::PreconditionFailed { precondition, .. }) => {
                assert_eq!(precondition, "I-map")
            }
            other => panic!("expected I-map failure, got {other:?}"),
        }
    }

    #[test]
    fn empty_family_matches_ci_route() {
        for (_, p) in testkit::fixtures() {
            let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
            let report = verify_cshc_over(&p, &ic, &[VarSet::EMPTY], opts()).unwrap();
            let model = reduce(&ic, &Context::empty()).unwrap();
            let ci = verify_ci_factorization(&p, &model, DEFAULT_TOL, DEFAULT_RESIDUAL_THRESHOLD);
            assert_eq!(
                report.theorem_verified,
                ci.map(|r| r.verified).unwrap_or(false)
            );
        }
    }

    #[test]
    fn report_renders_deterministically() {
        let p = testkit::d2();
        let ic = build_csi_model(&p, DEFAULT_TOL).unwrap();
        let a = verify_cshc(&p, &ic, opts()).unwrap();
        let b = verify_cshc(&p, &ic, opts()).unwrap();
        assert_eq!(a.render_text(), b.render_text());
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.render_text().ends_with("verified: yes\n"));
    }
}
