//! Time functions, null lengths and null distance estimates.
//!
//! The null length of a piecewise causal path is Σ|τ(vᵢ) − τ(vᵢ₋₁)| over its
//! breakpoints. The estimator minimizes it over polygonal paths in a causal
//! graph, so its value is an upper bound for the null distance; closed forms
//! for flat products live next to it as oracles.

use std::fmt;
use std::sync::Arc;

use petgraph::graph::{NodeIndex, UnGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::bilinear::Vector;
use crate::cone::classify;
use crate::flatspace::time_t;
use crate::lattice::{build_graph_with, BuildOptions, CausalGraph, Direction, GridSpec, PiecewisePath};
use crate::spacetime::{BoxRegion, PointFn, SpacetimeStructure};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeKind {
    /// T(p) = Σ_{i<ν} pⁱ
    CanonicalT { nu: usize },
    /// The prepended product coordinate p⁰.
    ProductT,
    /// T^(2k+1)
    OddPower { nu: usize, k: u32 },
    /// τ_M(p¹, …) + p⁰ on ℝ × M.
    CompositeSum { base: Box<TimeKind> },
    Custom { name: String },
}

/// A scalar field used to weight piecewise causal paths.
#[derive(Clone)]
pub struct TimeFunction {
    kind: TimeKind,
    f: PointFn<f64>,
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction").field("kind", &self.kind).finish()
    }
}

impl TimeFunction {
    pub fn canonical(nu: usize) -> Self {
        Self {
            kind: TimeKind::CanonicalT { nu },
            f: Arc::new(move |p| time_t(p, nu)),
        }
    }

    pub fn product_t() -> Self {
        Self {
            kind: TimeKind::ProductT,
            f: Arc::new(|p| p[0]),
        }
    }

    pub fn odd_power(nu: usize, k: u32) -> Self {
        let e = 2 * k as i32 + 1;
        Self {
            kind: TimeKind::OddPower { nu, k },
            f: Arc::new(move |p| time_t(p, nu).powi(e)),
        }
    }

    /// τ_M ∘ π_M + t on ℝ × M, with t the first coordinate.
    pub fn composite_sum(base: &TimeFunction) -> Self {
        let inner = base.f.clone();
        Self {
            kind: TimeKind::CompositeSum {
                base: Box::new(base.kind.clone()),
            },
            f: Arc::new(move |p| inner(&p[1..]) + p[0]),
        }
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            kind: TimeKind::Custom { name: name.into() },
            f: Arc::new(f),
        }
    }

    /// Rebuilds a non-custom time function from its description.
    pub fn from_kind(kind: &TimeKind) -> Result<Self> {
        Ok(match kind {
            TimeKind::CanonicalT { nu } => Self::canonical(*nu),
            TimeKind::ProductT => Self::product_t(),
            TimeKind::OddPower { nu, k } => Self::odd_power(*nu, *k),
            TimeKind::CompositeSum { base } => Self::composite_sum(&Self::from_kind(base)?),
            TimeKind::Custom { name } => {
                return Err(Error::InvalidConfig(format!("custom time function {name} has no closed form")))
            }
        })
    }

    pub fn kind(&self) -> &TimeKind {
        &self.kind
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
}

/// Σ|τ(vᵢ) − τ(vᵢ₋₁)| over the path's vertices.
pub fn null_length(tau: &TimeFunction, path: &PiecewisePath) -> f64 {
    path.vertices()
        .windows(2)
        .map(|w| (tau.eval(w[1].as_slice()) - tau.eval(w[0].as_slice())).abs())
        .sum()
}

/// The zigzag from 0 to the last basis vector eₙ: 2j null legs along
/// ±e₁ + eₙ of length 1/(2j) each, alternately future and past directed.
pub fn zigzag(n: usize, j: usize) -> PiecewisePath {
    let legs = 2 * j;
    let step = 1.0 / legs as f64;
    let vertices = (0..=legs)
        .map(|m| {
            let mut v = Vector::zeros(n);
            if m % 2 == 1 {
                v[0] = step;
            }
            v[n - 1] = m as f64 / legs as f64;
            v
        })
        .collect();
    let directions = (0..legs)
        .map(|m| if m % 2 == 0 { Direction::Future } else { Direction::Past })
        .collect();
    PiecewisePath::new(vertices, directions).expect("zigzag vertices are distinct")
}

/// A distance that may be infinite; serializes as a number or "unreachable".
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Finite(f64),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(x) => Some(x),
            Distance::Unreachable => None,
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(x) => serializer.serialize_f64(*x),
            Distance::Unreachable => serializer.serialize_str("unreachable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEcho {
    pub h: f64,
    pub r: usize,
    #[serde(rename = "box")]
    pub bounds: BoxRegion,
}

impl From<&GridSpec> for GridEcho {
    fn from(g: &GridSpec) -> Self {
        Self {
            h: g.h,
            r: g.radius,
            bounds: g.bounds.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    pub value: Distance,
    pub exact: bool,
    pub grid: GridEcho,
    pub witness: Vec<Vec<f64>>,
    #[serde(skip)]
    pub directions: Vec<Direction>,
}

impl DistanceResult {
    /// A closed-form value with no witness path.
    pub fn oracle(value: f64, grid: &GridSpec) -> Self {
        Self {
            value: Distance::Finite(value),
            exact: true,
            grid: grid.into(),
            witness: vec![],
            directions: vec![],
        }
    }

    pub fn witness_path(&self) -> Option<PiecewisePath> {
        if self.witness.is_empty() {
            return None;
        }
        let vertices = self.witness.iter().map(|p| Vector::from_column_slice(p)).collect();
        PiecewisePath::new(vertices, self.directions.clone()).ok()
    }
}

/// A causal graph symmetrized and weighted by |Δτ|, ready for repeated
/// shortest-path queries.
#[derive(Debug, Clone)]
pub struct NullGraph<'a> {
    graph: &'a CausalGraph,
    weighted: UnGraph<(), f64, u32>,
    times: Vec<f64>,
}

impl<'a> NullGraph<'a> {
    pub fn new(graph: &'a CausalGraph, tau: &TimeFunction) -> Self {
        let times: Vec<f64> = (0..graph.node_count()).map(|i| tau.eval(graph.point(i))).collect();
        let mut weighted = UnGraph::with_capacity(graph.node_count(), graph.edge_count());
        for _ in 0..graph.node_count() {
            weighted.add_node(());
        }
        for (a, e) in graph.edges() {
            let b = e.node as usize;
            weighted.add_edge(NodeIndex::new(a), NodeIndex::new(b), (times[b] - times[a]).abs());
        }
        Self {
            graph,
            weighted,
            times,
        }
    }

    pub fn graph(&self) -> &CausalGraph {
        self.graph
    }

    pub fn time(&self, node: usize) -> f64 {
        self.times[node]
    }

    /// Shortest path between two nodes.
    pub fn between(&self, from: usize, to: usize) -> Result<DistanceResult> {
        for node in [from, to] {
            if node >= self.graph.node_count() {
                return Err(Error::UnknownNode(node));
            }
        }
        let grid = self.graph.grid().into();
        let found = petgraph::algo::astar(
            &self.weighted,
            NodeIndex::new(from),
            |n| n.index() == to,
            |e| *e.weight(),
            |_| 0.0,
        );
        let Some((value, nodes)) = found else {
            return Ok(DistanceResult {
                value: Distance::Unreachable,
                exact: false,
                grid,
                witness: vec![],
                directions: vec![],
            });
        };
        let nodes: Vec<usize> = nodes.into_iter().map(|n| n.index()).collect();
        let directions = nodes
            .windows(2)
            .map(|w| {
                if self.graph.has_edge(w[0], w[1]) {
                    Direction::Future
                } else {
                    Direction::Past
                }
            })
            .collect();
        Ok(DistanceResult {
            value: Distance::Finite(value),
            exact: false,
            grid,
            witness: nodes.iter().map(|&n| self.graph.point(n).to_vec()).collect(),
            directions,
        })
    }

    /// Shortest path between the nodes nearest to `p` and `q`.
    pub fn estimate(&self, p: &[f64], q: &[f64]) -> Result<DistanceResult> {
        let from = self.snap(p)?;
        let to = self.snap(q)?;
        self.between(from, to)
    }

    fn snap(&self, p: &[f64]) -> Result<usize> {
        self.graph.snap(p).ok_or_else(|| Error::NotOnGrid { point: p.to_vec() })
    }
}

/// Builds the causal graph for `grid` and estimates the null distance
/// between `p` and `q` on it.
pub fn estimate(
    s: &SpacetimeStructure,
    tau: &TimeFunction,
    grid: &GridSpec,
    p: &[f64],
    q: &[f64],
) -> Result<DistanceResult> {
    estimate_with(s, tau, grid, &BuildOptions::default(), p, q)
}

pub fn estimate_with(
    s: &SpacetimeStructure,
    tau: &TimeFunction,
    grid: &GridSpec,
    opts: &BuildOptions,
    p: &[f64],
    q: &[f64],
) -> Result<DistanceResult> {
    let graph = build_graph_with(s, grid, opts)?;
    NullGraph::new(&graph, tau).estimate(p, q)
}

/// max{|Δt|, d_σ} on a product ℝ × Σ; points carry t first.
pub fn product_oracle(base_dist: impl Fn(&[f64], &[f64]) -> f64, p: &[f64], q: &[f64]) -> f64 {
    (q[0] - p[0]).abs().max(base_dist(&p[1..], &q[1..]))
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Arc-length distance on a circle of the given circumference, in the
/// periodic coordinate.
pub fn circle_distance(circumference: f64) -> impl Fn(&[f64], &[f64]) -> f64 + Clone {
    move |a, b| {
        let d = (b[0] - a[0]).rem_euclid(circumference);
        d.min(circumference - d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    ChronologicalInterior,
    CausalBoundary,
    Exterior,
}

/// Locates q relative to ∂J⁺(p) on a product by comparing Δt with d_σ.
pub fn boundary_classify(base_dist: impl Fn(&[f64], &[f64]) -> f64, p: &[f64], q: &[f64], tol: f64) -> BoundaryClass {
    let dt = q[0] - p[0];
    let ds = base_dist(&p[1..], &q[1..]);
    if (dt - ds).abs() <= tol {
        BoundaryClass::CausalBoundary
    } else if dt > ds {
        BoundaryClass::ChronologicalInterior
    } else {
        BoundaryClass::Exterior
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub min_ratio: f64,
    pub worst_pair: (Vec<f64>, Vec<f64>),
    pub pairs: usize,
}

/// Samples causally related pairs p ≤ q in `region` (straight chord future
/// causal at its midpoint) and reports the smallest (τ(q) − τ(p)) / ‖q − p‖.
///
/// Pairs are drawn uniformly from region × region and ordered; at most
/// 100·n_pairs + 10⁴ draws are made.
pub fn anti_lipschitz_probe(
    s: &SpacetimeStructure,
    tau: &TimeFunction,
    region: &BoxRegion,
    n_pairs: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = 100 * n_pairs + 10_000;
    let mut report: Option<ProbeReport> = None;
    let mut found = 0;
    for _ in 0..max_draws {
        if found == n_pairs {
            break;
        }
        let a = region.sample(&mut rng);
        let b = region.sample(&mut rng);
        let chord = &b - &a;
        let mid = (&a + &b) * 0.5;
        if !s.contains(a.as_slice()) || !s.contains(b.as_slice()) {
            continue;
        }
        let Ok(class) = classify(s, mid.as_slice(), chord.as_slice(), 0.0) else {
            continue;
        };
        let (p, q) = if class.is_future_causal() {
            (a, b)
        } else if class.is_past_causal() {
            (b, a)
        } else {
            continue;
        };
        found += 1;
        let ratio = (tau.eval(q.as_slice()) - tau.eval(p.as_slice())) / chord.norm();
        if report.as_ref().map_or(true, |r| ratio < r.min_ratio) {
            report = Some(ProbeReport {
                min_ratio: ratio,
                worst_pair: (p.as_slice().to_vec(), q.as_slice().to_vec()),
                pairs: 0,
            });
        }
    }
    let mut report = report.ok_or(Error::NoCausalPairs)?;
    report.pairs = found;
    Ok(report)
}
