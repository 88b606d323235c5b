//! Undirected graphs as encodings of dependency models: the pairwise Markov
//! construction, separation, maximal cliques and Pearl-axiom diagnostics.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::domain::{DomainSchema, VarSet};
use crate::error::{Error, Result};
use crate::independence::{DependencyModel, Triplet};

#[derive(Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    schema: Arc<DomainSchema>,
    nodes: VarSet,
    adjacency: Vec<VarSet>,
}

impl fmt::Debug for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_adjacency())
    }
}

impl UndirectedGraph {
    pub fn empty(schema: impl Into<Arc<DomainSchema>>, nodes: VarSet) -> Result<Self> {
        let schema = schema.into();
        schema.check_set(nodes)?;
        let n = schema.len();
        Ok(UndirectedGraph {
            schema,
            nodes,
            adjacency: vec![VarSet::EMPTY; n],
        })
    }

    pub fn complete(schema: impl Into<Arc<DomainSchema>>, nodes: VarSet) -> Result<Self> {
        let mut g = Self::empty(schema, nodes)?;
        for v in nodes.iter() {
            g.adjacency[v] = nodes.without(v);
        }
        Ok(g)
    }

    /// Build from a list of edges over the given nodes.
    pub fn from_edges(
        schema: impl Into<Arc<DomainSchema>>,
        nodes: VarSet,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut g = Self::empty(schema, nodes)?;
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::OverlappingSets(format!(
                "self-loop on `{}`",
                self.schema.name(a)
            )));
        }
        self.adjacency[a] = self.adjacency[a].with(b);
        self.adjacency[b] = self.adjacency[b].with(a);
        Ok(())
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if self.nodes.contains(v) {
            Ok(())
        } else if v < self.schema.len() {
            Err(Error::UnknownVariable(format!(
                "`{}` is not a node of this graph",
                self.schema.name(v)
            )))
        } else {
            Err(Error::UnknownVariable(format!("#{v}")))
        }
    }

    pub fn schema(&self) -> &DomainSchema {
        &self.schema
    }

    pub fn nodes(&self) -> VarSet {
        self.nodes
    }

    pub fn neighbors(&self, v: usize) -> VarSet {
        self.adjacency.get(v).copied().unwrap_or_default()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).contains(b)
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.nodes
            .iter()
            .flat_map(|a| {
                self.neighbors(a)
                    .iter()
                    .filter(move |&b| b > a)
                    .map(move |b| (a, b))
            })
            .collect()
    }

    /// Nodes reachable from `start` without entering `blocked`.
    fn reachable(&self, start: usize, blocked: VarSet) -> VarSet {
        let mut seen = VarSet::singleton(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let mut next = VarSet::EMPTY;
            for v in frontier.iter() {
                next = next.union(self.neighbors(v));
            }
            frontier = next.difference(seen).difference(blocked);
            seen = seen.union(frontier);
        }
        seen
    }

    /// Every path from `a` to `b` passes through `cond`.
    pub fn separates(&self, a: usize, b: usize, cond: VarSet) -> Result<bool> {
        self.check_node(a)?;
        self.check_node(b)?;
        for v in cond.iter() {
            self.check_node(v)?;
        }
        if a == b || cond.contains(a) || cond.contains(b) {
            return Err(Error::OverlappingSets(
                "separation query needs distinct a, b outside the separator".into(),
            ));
        }
        Ok(!self.reachable(a, cond).contains(b))
    }

    /// The dependency model read off the graph by separation.
    pub fn separation_model(&self) -> DependencyModel {
        DependencyModel::from_fn(
            self.schema.clone(),
            self.nodes,
            Default::default(),
            |a, b, cond| !self.reachable(a, cond).contains(b),
        )
        .expect("graph nodes lie within the schema")
    }

    /// All maximal cliques, each as a sorted node set, sorted lexicographically.
    pub fn cliques(&self) -> Vec<VarSet> {
        let mut out = Vec::new();
        self.extend_cliques(VarSet::EMPTY, self.nodes, VarSet::EMPTY, &mut out);
        out.sort_by(|x, y| x.cmp_lexicographic(*y));
        out
    }

    // Bron-Kerbosch without pivoting.
    fn extend_cliques(
        &self,
        clique: VarSet,
        mut candidates: VarSet,
        mut excluded: VarSet,
        out: &mut Vec<VarSet>,
    ) {
        if candidates.is_empty() {
            if excluded.is_empty() && !clique.is_empty() {
                out.push(clique);
            }
            return;
        }
        for v in candidates.iter() {
            let nb = self.neighbors(v);
            self.extend_cliques(
                clique.with(v),
                candidates.intersection(nb),
                excluded.intersection(nb),
                out,
            );
            candidates = candidates.without(v);
            excluded = excluded.with(v);
        }
    }

    pub fn is_clique(&self, set: VarSet) -> bool {
        set.iter()
            .all(|v| set.without(v).is_subset(self.neighbors(v)))
    }

    /// `a: b c` lines in node order.
    pub fn render_adjacency(&self) -> String {
        let mut out = String::new();
        for v in self.nodes.iter() {
            out.push_str(self.schema.name(v));
            out.push(':');
            for u in self.neighbors(v).iter() {
                out.push(' ');
                out.push_str(self.schema.name(u));
            }
            out.push('\n');
        }
        out
    }
}

/// Edge `(a, b)` is absent iff `<a, b | domain \ {a, b}>` holds.
pub fn pairwise_graph(model: &DependencyModel) -> UndirectedGraph {
    let domain = model.domain();
    let mut g = UndirectedGraph::empty(model.schema_arc().clone(), domain)
        .expect("model domain lies within its schema");
    let vars = domain.to_vec();
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            if !model.holds(a, b, domain.without(a).without(b)) {
                g.add_edge(a, b).expect("distinct domain nodes");
            }
        }
    }
    g
}

/// First triplet on which `model` and separation in its pairwise graph
/// disagree.
pub fn graph_isomorph_mismatch(model: &DependencyModel) -> Option<Triplet> {
    let g = pairwise_graph(model);
    let domain = model.domain();
    let vars = domain.to_vec();
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            for cond in domain.without(a).without(b).subsets() {
                let separated = !g.reachable(a, cond).contains(b);
                if separated != model.holds(a, b, cond) {
                    return Some(
                        Triplet::new(a, b, cond, model.context().clone())
                            .expect("canonical triplet"),
                    );
                }
            }
        }
    }
    None
}

/// The pairwise graph reproduces the model exactly through separation.
pub fn is_graph_isomorph(model: &DependencyModel) -> bool {
    graph_isomorph_mismatch(model).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Symmetry,
    Decomposition,
    Intersection,
    StrongUnion,
    Transitivity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::Symmetry,
        Axiom::Decomposition,
        Axiom::Intersection,
        Axiom::StrongUnion,
        Axiom::Transitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Symmetry => "symmetry",
            Axiom::Decomposition => "decomposition",
            Axiom::Intersection => "intersection",
            Axiom::StrongUnion => "strong union",
            Axiom::Transitivity => "transitivity",
        }
    }
}

/// A set-valued independence statement `<A, B | U>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SetStatement {
    pub left: VarSet,
    pub right: VarSet,
    pub cond: VarSet,
}

impl SetStatement {
    fn new(left: VarSet, right: VarSet, cond: VarSet) -> Self {
        SetStatement { left, right, cond }
    }

    pub fn render(&self, schema: &DomainSchema) -> String {
        format!(
            "<{}, {} | {}>",
            schema.render_set(self.left),
            schema.render_set(self.right),
            schema.render_set(self.cond)
        )
    }
}

/// Premises that hold in the model together with the conclusion(s) that do
/// not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomWitness {
    pub premises: Vec<SetStatement>,
    pub refuted: Vec<SetStatement>,
}

impl AxiomWitness {
    pub fn render(&self, schema: &DomainSchema) -> String {
        let join = |v: &[SetStatement], sep: &str| {
            v.iter()
                .map(|s| s.render(schema))
                .collect::<Vec<_>>()
                .join(sep)
        };
        format!(
            "{} => {} (refuted)",
            join(&self.premises, " & "),
            join(&self.refuted, " or ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub counterexample: Option<AxiomWitness>,
}

impl AxiomVerdict {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub verdicts: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(AxiomVerdict::holds)
    }

    pub fn verdict(&self, axiom: Axiom) -> &AxiomVerdict {
        self.verdicts
            .iter()
            .find(|v| v.axiom == axiom)
            .expect("report covers every axiom")
    }
}

/// Exhaustively quantify each Pearl axiom over the model's domain.
///
/// Set-valued statements `<A, B | U>` hold when every pair `a` in `A`, `b` in
/// `B` is independent given `U`. Quantifiers run over nonempty disjoint `A`,
/// `B` in ascending bitmask order, then over the remaining sets, so the first
/// witness found is a smallest one.
pub fn check_pearl_axioms(model: &DependencyModel) -> AxiomReport {
    let verdicts = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomVerdict {
            axiom,
            counterexample: find_counterexample(model, axiom),
        })
        .collect();
    AxiomReport { verdicts }
}

fn find_counterexample(model: &DependencyModel, axiom: Axiom) -> Option<AxiomWitness> {
    let domain = model.domain();
    let holds = |s: &SetStatement| model.holds_sets(s.left, s.right, s.cond);
    let st = SetStatement::new;
    for left in domain.subsets().filter(|s| !s.is_empty()) {
        for right in domain.difference(left).subsets().filter(|s| !s.is_empty()) {
            let rest = domain.difference(left).difference(right);
            match axiom {
                Axiom::Symmetry => {
                    for cond in rest.subsets() {
                        let fwd = st(left, right, cond);
                        let back = st(right, left, cond);
                        if holds(&fwd) != holds(&back) {
                            let (premise, refuted) = if holds(&fwd) {
                                (fwd, back)
                            } else {
                                (back, fwd)
                            };
                            return Some(AxiomWitness {
                                premises: vec![premise],
                                refuted: vec![refuted],
                            });
                        }
                    }
                }
                Axiom::Decomposition => {
                    for extra in rest.subsets().filter(|s| !s.is_empty()) {
                        for cond in rest.difference(extra).subsets() {
                            let premise = st(left, right.union(extra), cond);
                            if !holds(&premise) {
                                continue;
                            }
                            let refuted: Vec<_> = [st(left, right, cond), st(left, extra, cond)]
                                .into_iter()
                                .filter(|s| !holds(s))
                                .collect();
                            if !refuted.is_empty() {
                                return Some(AxiomWitness {
                                    premises: vec![premise],
                                    refuted,
                                });
                            }
                        }
                    }
                }
                Axiom::Intersection => {
                    for extra in rest.subsets().filter(|s| !s.is_empty()) {
                        for cond in rest.difference(extra).subsets() {
                            let p1 = st(left, right, cond.union(extra));
                            let p2 = st(left, extra, cond.union(right));
                            if !(holds(&p1) && holds(&p2)) {
                                continue;
                            }
                            let conclusion = st(left, right.union(extra), cond);
                            if !holds(&conclusion) {
                                return Some(AxiomWitness {
                                    premises: vec![p1, p2],
                                    refuted: vec![conclusion],
                                });
                            }
                        }
                    }
                }
                Axiom::StrongUnion => {
                    for cond in rest.subsets() {
                        let premise = st(left, right, cond);
                        if !holds(&premise) {
                            continue;
                        }
                        for extra in rest.difference(cond).subsets().filter(|s| !s.is_empty()) {
                            let conclusion = st(left, right, cond.union(extra));
                            if !holds(&conclusion) {
                                return Some(AxiomWitness {
                                    premises: vec![premise],
                                    refuted: vec![conclusion],
                                });
                            }
                        }
                    }
                }
                Axiom::Transitivity => {
                    for cond in rest.subsets() {
                        let premise = st(left, right, cond);
                        if !holds(&premise) {
                            continue;
                        }
                        for c in rest.difference(cond).iter() {
                            let via_left = st(left, VarSet::singleton(c), cond);
                            let via_right = st(VarSet::singleton(c), right, cond);
                            if !holds(&via_left) && !holds(&via_right) {
                                return Some(AxiomWitness {
                                    premises: vec![premise],
                                    refuted: vec![via_left, via_right],
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Context;

    fn schema(n: usize) -> Arc<DomainSchema> {
        let names = ["a", "b", "c", "d", "e"];
        Arc::new(DomainSchema::binary(&names[..n]).unwrap())
    }

    fn path3() -> UndirectedGraph {
        let s = schema(3);
        UndirectedGraph::from_edges(s.clone(), s.all(), [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn pairwise_graph_extremes() {
        let s = schema(3);
        let t = DependencyModel::all_true(s.clone(), s.all()).unwrap();
        assert!(pairwise_graph(&t).edges().is_empty());
        let f = DependencyModel::all_false(s.clone(), s.all()).unwrap();
        assert_eq!(
            pairwise_graph(&f),
            UndirectedGraph::complete(s.clone(), s.all()).unwrap()
        );
    }

    #[test]
    fn separation_examples() {
        let g = path3();
        assert!(g.separates(0, 2, VarSet::singleton(1)).unwrap());
        assert!(!g.separates(0, 2, VarSet::EMPTY).unwrap());
        let s = schema(3);
        let k = UndirectedGraph::complete(s.clone(), s.all()).unwrap();
        assert!(!k.separates(0, 1, VarSet::singleton(2)).unwrap());
        assert!(matches!(
            g.separates(0, 7, VarSet::EMPTY),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn clique_examples() {
        let s = schema(3);
        let e = UndirectedGraph::empty(s.clone(), s.all()).unwrap();
        assert_eq!(
            e.cliques(),
            vec![
                VarSet::singleton(0),
                VarSet::singleton(1),
                VarSet::singleton(2)
            ]
        );
        let k = UndirectedGraph::complete(s.clone(), s.all()).unwrap();
        assert_eq!(k.cliques(), vec![s.all()]);
        assert_eq!(
            path3().cliques(),
            vec![VarSet::from_iter([0, 1]), VarSet::from_iter([1, 2])]
        );
    }

    #[test]
    fn strong_union_counterexample() {
        let s = schema(3);
        let m = DependencyModel::from_fn(s.clone(), s.all(), Context::empty(), |a, b, u| {
            (a, b, u) == (0, 1, VarSet::EMPTY)
        })
        .unwrap();
        assert!(!is_graph_isomorph(&m));
        let report = check_pearl_axioms(&m);
        let su = report.verdict(Axiom::StrongUnion);
        let w = su.counterexample.as_ref().unwrap();
        assert_eq!(
            w.render(&s),
            "<{a}, {b} | {}> => <{a}, {b} | {c}> (refuted)"
        );
        assert!(report.verdict(Axiom::Symmetry).holds());
    }

    #[test]
    fn separation_model_of_path_is_isomorph() {
        let g = path3();
        let m = g.separation_model();
        assert!(is_graph_isomorph(&m));
        assert_eq!(pairwise_graph(&m), g);
        assert!(check_pearl_axioms(&m).all_hold());
    }

    #[test]
    fn adjacency_rendering() {
        assert_eq!(path3().render_adjacency(), "a: b\nb: a c\nc: b\n");
    }
}
