//! Seeded generators, named fixtures and brute-force oracles.
//!
//! Everything here is deterministic per seed. The oracles deliberately avoid
//! the library's own code paths: CSIs are re-derived by comparing conditional
//! tables gathered into hash maps.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{approx_eq, Assignment, Context, DomainSchema, VarSet};
use crate::error::Result;
use crate::graph::UndirectedGraph;
use crate::independence::{CsiModel, Triplet};
use crate::loglinear::{Feature, LogLinearModel};
use crate::table::JointTable;

/// Smallest raw entry drawn by [`random_positive`], before normalization.
pub const DEFAULT_FLOOR: f64 = 1e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn binary_schema(n: usize) -> Arc<DomainSchema> {
    const NAMES: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    Arc::new(DomainSchema::binary(&NAMES[..n]).expect("valid binary schema"))
}

/// A random positive table: raw entries uniform on `[floor, 1)`.
pub fn random_positive_with_floor(
    schema: impl Into<Arc<DomainSchema>>,
    seed: u64,
    floor: f64,
) -> JointTable {
    let schema = schema.into();
    let mut r = rng(seed);
    let raw = (0..schema.states())
        .map(|_| r.gen_range(floor..1.0))
        .collect();
    JointTable::normalize(schema, raw).expect("positive raw entries")
}

pub fn random_positive(schema: impl Into<Arc<DomainSchema>>, seed: u64) -> JointTable {
    random_positive_with_floor(schema, seed, DEFAULT_FLOOR)
}

#[derive(Debug, Clone)]
pub struct PlantSpec {
    pub schema: Arc<DomainSchema>,
    pub features: Vec<(Feature, f64)>,
    pub seed: u64,
}

impl PlantSpec {
    pub fn new(schema: impl Into<Arc<DomainSchema>>, seed: u64) -> Self {
        PlantSpec {
            schema: schema.into(),
            features: Vec::new(),
            seed,
        }
    }

    /// Add `weight * delta(f, x)` where `f` is given as `a=1,b=0`.
    pub fn with(mut self, feature: &str, weight: f64) -> Result<Self> {
        let f = Feature::parse(&self.schema, feature)?;
        self.features.push((f, weight));
        Ok(self)
    }
}

/// `p(x) ∝ exp(sum of planted weights over matching features)`.
pub fn plant(spec: &PlantSpec) -> Result<JointTable> {
    let (features, weights) = spec.features.iter().cloned().unzip();
    Ok(LogLinearModel::new(spec.schema.clone(), features, weights)?.to_table())
}

fn plant3(features: &[(&str, f64)], seed: u64) -> JointTable {
    let mut spec = PlantSpec::new(binary_schema(3), seed);
    for &(f, w) in features {
        spec = spec.with(f, w).expect("fixture feature");
    }
    plant(&spec).expect("fixture plant")
}

/// One three-way interaction `(a=1,b=1,c=1)`: `a` and `b` are independent
/// given `c=0` but not given `c=1`.
pub fn d2() -> JointTable {
    plant3(&[("a=1,b=1,c=1", 1.0)], 2)
}

/// The D2 interaction planted at `c=0`, so the CSI sits in the context that
/// is not the default assignment.
pub fn d2_flipped() -> JointTable {
    plant3(&[("a=1,b=1,c=0", 1.0)], 3)
}

/// `a - b - c`: `a` and `c` independent given `b`.
pub fn chain() -> JointTable {
    plant3(&[("a=1,b=1", 0.8), ("b=1,c=1", -0.6)], 4)
}

/// A parity interaction on `c = a xor b` with unary biases, so no pair is
/// marginally independent but no pairwise model fits.
pub fn xor() -> JointTable {
    JointTable::from_fn(binary_schema(3), |x| {
        let (a, b, c) = (x.value(0), x.value(1), x.value(2));
        let parity = if c == a ^ b { 2.0 } else { 0.0 };
        (parity + 0.3 * a as f64 - 0.4 * b as f64 + 0.5 * c as f64).exp()
    })
    .expect("positive")
}

/// Three independent biased coins.
pub fn coins() -> JointTable {
    plant3(&[("a=1", 0.3), ("b=1", -0.2), ("c=1", 0.5)], 5)
}

/// Every named fixture, in a fixed order.
pub fn fixtures() -> Vec<(&'static str, JointTable)> {
    vec![
        ("uniform", JointTable::uniform(binary_schema(3))),
        ("coins", coins()),
        ("d2", d2()),
        ("d2-flipped", d2_flipped()),
        ("chain", chain()),
        ("xor", xor()),
    ]
}

/// The named fixtures whose CSIs come from planted structure.
pub fn planted_fixtures() -> Vec<(&'static str, JointTable)> {
    fixtures()
        .into_iter()
        .filter(|(name, _)| *name != "xor")
        .collect()
}

pub fn fixture(name: &str) -> Option<JointTable> {
    fixtures()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, p)| p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphShape {
    Chain,
    Star,
    /// `a - b - c` closed into a triangle; a fourth node hangs off `c`.
    Triangle,
}

impl GraphShape {
    pub const ALL: [GraphShape; 3] = [GraphShape::Chain, GraphShape::Star, GraphShape::Triangle];
}

pub fn shape_graph(shape: GraphShape, n: usize) -> UndirectedGraph {
    let schema = binary_schema(n);
    let nodes = schema.all();
    let mut edges = Vec::new();
    match shape {
        GraphShape::Chain => edges.extend((1..n).map(|i| (i - 1, i))),
        GraphShape::Star => edges.extend((1..n).map(|i| (0, i))),
        GraphShape::Triangle => {
            edges.extend([(0, 1), (1, 2), (0, 2)]);
            edges.extend((3..n).map(|i| (i - 1, i)));
        }
    }
    UndirectedGraph::from_edges(schema, nodes, edges).expect("valid edges")
}

/// Random log-potentials on every assignment of every maximal clique.
pub fn plant_from_graph(graph: &UndirectedGraph, seed: u64) -> JointTable {
    let schema = Arc::new(graph.schema().clone());
    let mut r = rng(seed);
    let mut features = Vec::new();
    let mut weights = Vec::new();
    for clique in graph.cliques() {
        for y in schema.contexts(clique) {
            features.push(Feature::from(y));
            weights.push(r.gen_range(-1.5..1.5));
        }
    }
    LogLinearModel::new(schema, features, weights)
        .expect("clique features")
        .to_table()
}

/// One to three random features of scope size one to three.
pub fn random_plant_spec(schema: impl Into<Arc<DomainSchema>>, seed: u64) -> PlantSpec {
    let schema = schema.into();
    let mut r = rng(seed);
    let n = schema.len();
    let mut spec = PlantSpec::new(schema.clone(), seed);
    for _ in 0..r.gen_range(1..=3) {
        let size = r.gen_range(1..=n.min(3));
        let mut scope = VarSet::EMPTY;
        while scope.len() < size {
            scope = scope.with(r.gen_range(0..n));
        }
        let pairs: Vec<(usize, usize)> = scope
            .iter()
            .map(|v| (v, r.gen_range(0..schema.cardinality(v))))
            .collect();
        let f = Feature::from_pairs(pairs).expect("distinct vars");
        let w = r.gen_range(-2.0..2.0);
        if spec.features.iter().all(|(g, _)| *g != f) {
            spec.features.push((f, w));
        }
    }
    spec
}

pub fn random_plant(schema: impl Into<Arc<DomainSchema>>, seed: u64) -> JointTable {
    plant(&random_plant_spec(schema, seed)).expect("in-schema features")
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub table: JointTable,
    /// Built from planted structure rather than drawn at random.
    pub planted: bool,
}

/// The standard test corpus: 220 random tables over three and four binary
/// variables, random plants, graph plants and the named fixtures.
pub fn standard_corpus() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for seed in 0..120 {
        out.push(CorpusEntry {
            name: format!("random3-{seed}"),
            table: random_positive(binary_schema(3), seed),
            planted: false,
        });
    }
    for seed in 0..100 {
        out.push(CorpusEntry {
            name: format!("random4-{seed}"),
            table: random_positive(binary_schema(4), 1000 + seed),
            planted: false,
        });
    }
    for seed in 0..40 {
        let n = 3 + (seed as usize % 2);
        out.push(CorpusEntry {
            name: format!("plant{n}-{seed}"),
            table: random_plant(binary_schema(n), 2000 + seed),
            planted: true,
        });
    }
    for shape in GraphShape::ALL {
        for n in 3..=4 {
            for seed in 0..3 {
                out.push(CorpusEntry {
                    name: format!("{shape:?}{n}-{seed}").to_lowercase(),
                    table: plant_from_graph(&shape_graph(shape, n), 3000 + seed),
                    planted: true,
                });
            }
        }
    }
    for (name, table) in fixtures() {
        out.push(CorpusEntry {
            name: name.to_string(),
            table,
            planted: name != "xor",
        });
    }
    out
}

type Key = Vec<usize>;

fn key(x: &Assignment, vars: &[usize]) -> Key {
    vars.iter().map(|&v| x.value(v)).collect()
}

/// Second implementation of the full CSI enumeration. For each triplet the
/// conditional table `p(a | b, u, w)` is compared against `p(a | u, w)` on
/// every row with positive mass.
pub fn oracle_csi_set(p: &JointTable, tol: f64) -> CsiModel {
    let schema = p.schema_arc().clone();
    let n = schema.len();
    let mut model = CsiModel::all_false(schema.clone()).expect("within cap");
    let rows: Vec<(Assignment, f64)> = schema
        .assignments()
        .zip(p.probs().iter().copied())
        .collect();
    for a in 0..n {
        for b in a + 1..n {
            let others: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
            // Each other variable is either conditioned, fixed by the context, or free.
            let mut roles = vec![0u8; others.len()];
            loop {
                let cond: Vec<usize> = others
                    .iter()
                    .zip(&roles)
                    .filter(|(_, r)| **r == 1)
                    .map(|(v, _)| *v)
                    .collect();
                let ctx_vars: Vec<usize> = others
                    .iter()
                    .zip(&roles)
                    .filter(|(_, r)| **r == 2)
                    .map(|(v, _)| *v)
                    .collect();
                let mut by_abuw: HashMap<(usize, usize, Key, Key), f64> = HashMap::new();
                let mut by_auw: HashMap<(usize, Key, Key), f64> = HashMap::new();
                let mut by_buw: HashMap<(usize, Key, Key), f64> = HashMap::new();
                let mut by_uw: HashMap<(Key, Key), f64> = HashMap::new();
                for (x, px) in &rows {
                    let (u, w) = (key(x, &cond), key(x, &ctx_vars));
                    let (xa, xb) = (x.value(a), x.value(b));
                    *by_abuw.entry((xa, xb, u.clone(), w.clone())).or_default() += px;
                    *by_auw.entry((xa, u.clone(), w.clone())).or_default() += px;
                    *by_buw.entry((xb, u.clone(), w.clone())).or_default() += px;
                    *by_uw.entry((u, w)).or_default() += px;
                }
                let mut contexts: Vec<Key> = by_uw.keys().map(|(_, w)| w.clone()).collect();
                contexts.sort();
                contexts.dedup();
                for w in contexts {
                    let holds = by_abuw.iter().filter(|((_, _, _, kw), _)| *kw == w).all(
                        |((xa, xb, u, _), &pabuw)| {
                            let pbuw = by_buw[&(*xb, u.clone(), w.clone())];
                            if pbuw <= 0.0 {
                                return true;
                            }
                            let puw = by_uw[&(u.clone(), w.clone())];
                            let pauw = by_auw[&(*xa, u.clone(), w.clone())];
                            approx_eq(pabuw / pbuw, pauw / puw, tol)
                        },
                    );
                    if holds {
                        let ctx =
                            Context::from_pairs(ctx_vars.iter().copied().zip(w.iter().copied()))
                                .expect("distinct");
                        let t = Triplet::new(a, b, cond.iter().copied().collect(), ctx)
                            .expect("disjoint");
                        model.set(&t, true).expect("triplet in universe");
                    }
                }
                // Next role vector, base 3.
                let mut i = 0;
                while i < roles.len() && roles[i] == 2 {
                    roles[i] = 0;
                    i += 1;
                }
                if i == roles.len() {
                    break;
                }
                roles[i] += 1;
            }
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::{test_ci, test_csi, DEFAULT_TOL};

    #[test]
    fn random_positive_is_deterministic_and_floored() {
        let s = binary_schema(3);
        let p = random_positive(s.clone(), 7);
        assert_eq!(p, random_positive(s.clone(), 7));
        assert_ne!(p, random_positive(s, 8));
        assert!(p.is_positive());
        let max = p.probs().iter().copied().fold(0.0, f64::max);
        assert!(p.min() / max >= DEFAULT_FLOOR);
    }

    #[test]
    fn empty_plant_is_uniform() {
        let s = binary_schema(3);
        let p = plant(&PlantSpec::new(s.clone(), 0)).unwrap();
        for v in p.probs() {
            assert!(approx_eq(*v, 0.125, 1e-12));
        }
    }

    #[test]
    fn d2_and_chain_independences() {
        let p = d2();
        let c0 = p.schema().parse_context("c=0").unwrap();
        let c1 = p.schema().parse_context("c=1").unwrap();
        assert!(test_csi(&p, 0, 1, VarSet::EMPTY, &c0, DEFAULT_TOL).unwrap());
        assert!(!test_csi(&p, 0, 1, VarSet::EMPTY, &c1, DEFAULT_TOL).unwrap());
        let q = chain();
        assert!(test_ci(&q, 0, 2, VarSet::singleton(1), DEFAULT_TOL).unwrap());
        assert!(!test_ci(&q, 0, 2, VarSet::EMPTY, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn xor_has_no_marginal_independence() {
        let p = xor();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            assert!(!test_ci(&p, a, b, VarSet::EMPTY, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn oracle_on_uniform_and_d2() {
        let u = JointTable::uniform(binary_schema(3));
        assert!(oracle_csi_set(&u, DEFAULT_TOL).iter().all(|(_, v)| v));
        let p = d2();
        let oracle = oracle_csi_set(&p, DEFAULT_TOL);
        let s = p.schema();
        let t = |line: &str| Triplet::parse(s, line).unwrap();
        assert!(oracle.holds(&t("a b | | c=0")));
        assert!(!oracle.holds(&t("a b | | c=1")));
        assert!(oracle.holds(&t("a c | | b=0")));
        assert!(!oracle.holds(&t("a b | c |")));
    }

    #[test]
    fn graph_shapes() {
        assert_eq!(
            shape_graph(GraphShape::Chain, 4).edges(),
            vec![(0, 1), (1, 2), (2, 3)]
        );
        assert_eq!(
            shape_graph(GraphShape::Star, 3).edges(),
            vec![(0, 1), (0, 2)]
        );
        assert_eq!(shape_graph(GraphShape::Triangle, 4).cliques().len(), 2);
        let p = plant_from_graph(&shape_graph(GraphShape::Chain, 3), 1);
        assert!(test_ci(&p, 0, 2, VarSet::singleton(1), 1e-9).unwrap());
    }

    #[test]
    fn corpus_is_large_enough() {
        let corpus = standard_corpus();
        assert!(corpus.iter().filter(|e| !e.planted).count() >= 200);
        assert!(corpus.iter().all(|e| e.table.is_positive()));
    }
}
