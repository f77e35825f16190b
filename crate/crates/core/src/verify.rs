//! Named, seeded verification suites.
//!
//! Every suite returns a [`SuiteReport`] whose checks carry the expected and
//! observed values as JSON. Reports depend only on the suite name, the
//! parameters and the seed; wall-clock time is kept out of the serialized
//! form.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bilinear::{positive_functional_vector, signature, SymForm, Vector};
use crate::cone::{classify, classify_with, interior_vector, strict_witness, ConeClass, TOL_EXACT};
use crate::flatspace::{FlatSpace, OrderMode};
use crate::lattice::{build_graph, diamond, find_closed_timelike, reach, validate_path, CausalGraph, Direction, GridSpec};
use crate::nulldist::{
    boundary_classify, euclidean_distance, null_length, product_oracle, zigzag, anti_lipschitz_probe, BoundaryClass,
    Distance, NullGraph, TimeFunction,
};
use crate::spacetime::{
    conformal, extend_negative, flat, from_frame, validate, BoxRegion, ConformalFactor, MetricField, PointFn,
    SpacetimeStructure, StructureDesc, TimeFrame, VALIDATION_TOL,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 42;

/// Relative slack for comparisons that are exact up to floating rounding.
const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            params: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn real(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize> {
        match self.params.get(key) {
            None => Ok(default),
            Some(&x) if x >= 0.0 && x.fract() == 0.0 && x < 1e9 => Ok(x as usize),
            Some(&x) => Err(Error::InvalidConfig(format!("{key} must be a nonnegative integer, got {x}"))),
        }
    }

    fn optional_count(&self, key: &str) -> Result<Option<usize>> {
        if self.params.contains_key(key) {
            self.count(key, 0).map(Some)
        } else {
            Ok(None)
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub expected: Value,
    pub observed: Value,
    pub pass: bool,
}

fn check(id: &str, description: &str, expected: impl Serialize, observed: impl Serialize, pass: bool) -> Check {
    Check {
        id: id.to_string(),
        description: description.to_string(),
        expected: serde_json::to_value(expected).unwrap_or(Value::Null),
        observed: serde_json::to_value(observed).unwrap_or(Value::Null),
        pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Duration,
}

type SuiteFn = fn(&SuiteConfig) -> Result<Vec<Check>>;

pub struct SuiteInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Keys of [`CLAIMS`] this suite exercises.
    pub claims: &'static [&'static str],
    pub params: &'static [&'static str],
    run: SuiteFn,
}

/// The in-scope statements the suites are bound to.
pub const CLAIMS: &[(&str, &str)] = &[
    ("null_length", "null length of a piecewise causal path is the sum of |Δτ| over its pieces"),
    ("null_distance", "null distance is the infimum of null lengths over piecewise causal paths"),
    ("product_dtau", "on products, d̂_t equals |Δt| for causally related points"),
    ("product_max", "on products, d̂_t = max{|Δt|, d_σ}"),
    ("causal_boundary", "q ∈ ∂J⁺(p) on products iff Δt = d_σ"),
    ("incomplete_fiber", "causality encodation fails on ℝ × (ℝⁿ ∖ {0})"),
    ("heine_borel_product", "product diamonds are bounded; removing points breaks compactness"),
    ("completeness_product", "½(|Δt| + d_σ) ≤ d̂_t ≤ |Δt| + d_σ"),
    ("gh_diamonds", "global hyperbolicity via compact causal diamonds"),
    ("cauchy_time", "T grows without bound along causal lines in flat space"),
    ("ctc_compact", "compact cone structures admit closed timelike curves"),
    ("proper_cone_null_distance", "null distance of a proper cone structure with a time function"),
    ("spacetime_definition", "an (n−ν,ν)-spacetime carries ν pointwise independent timelike fields"),
    ("metric_from_frame", "g = h − 2h|ξ×ξ has index ν and makes the frame timelike"),
    ("frame_validation", "frame fields are timelike and independent"),
    ("cone_classification", "future directed means g(v,v) ≤ 0 and g(v,Xᵢ) ≤ 0 for all i"),
    ("strict_witness", "a nonzero future causal vector has g(v,X_j) < 0 for some j"),
    ("interior_vector", "a vector with ⟨v,bᵢ⟩ > 0 for all basis vectors exists"),
    ("conformal_invariance", "causal structure and null distance are conformally invariant"),
    ("cone_continuity", "the frame defines a continuous proper cone structure"),
    ("flat_order", "closed-form causal order of ℝ^(n−ν,ν)"),
    ("flat_time_function", "T = Σ_{i≤ν} xⁱ is a time function"),
    ("steepness", "2dT(v) is bounded below by the Euclidean norm of v"),
    ("flat_diamond_bounds", "flat diamonds are bounded in all coordinates"),
    ("degenerate_tau", "T^(2k+1) gives a null distance that does not distinguish points"),
    ("product_cones", "C′ = [0,∞) × C on ℝ × M"),
    ("composite_time", "τ_M ∘ π_M + t is a time function on ℝ × M"),
    ("perturbed_temporal", "t is temporal for the perturbed frame"),
    ("notgh", "global hyperbolicity of M′ is not inherited from M when ν < n"),
];

pub fn suites() -> &'static [SuiteInfo] {
    SUITES
}

static SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        name: "product_max_formula",
        summary: "estimator against max{|Δt|, d_σ} on flat Lorentzian products",
        claims: &["product_max", "completeness_product", "null_distance", "product_dtau"],
        params: &["h", "r", "pairs", "half_width"],
        run: product_max_formula,
    },
    SuiteInfo {
        name: "causal_boundary",
        summary: "boundary classification agrees with the flat causal order",
        claims: &["causal_boundary", "product_dtau", "cone_classification"],
        params: &["samples"],
        run: causal_boundary,
    },
    SuiteInfo {
        name: "incomplete_fiber",
        summary: "straddling pair on ℝ × (ℝ² ∖ {0}) with max formula equal to Δt but no causal connection",
        claims: &["incomplete_fiber"],
        params: &["h", "r"],
        run: incomplete_fiber,
    },
    SuiteInfo {
        name: "heine_borel_product",
        summary: "bounded product diamonds and a punctured diamond accumulating at a removed point",
        claims: &["heine_borel_product", "gh_diamonds"],
        params: &["pairs", "h"],
        run: heine_borel_product,
    },
    SuiteInfo {
        name: "flat_gh",
        summary: "discrete reach sets and diamonds of flat space against the closed-form order",
        claims: &["flat_order", "flat_diamond_bounds", "gh_diamonds"],
        params: &["pairs", "h", "r"],
        run: flat_gh,
    },
    SuiteInfo {
        name: "degenerate_tau",
        summary: "zigzag null lengths under T^(2k+1) and the ν=2 exact pair",
        claims: &["degenerate_tau", "null_length", "null_distance", "proper_cone_null_distance"],
        params: &["k", "j_max"],
        run: degenerate_tau,
    },
    SuiteInfo {
        name: "steepness",
        summary: "2dT(v) ≥ ‖v‖ on random future causal vectors",
        claims: &["steepness", "flat_time_function", "cauchy_time"],
        params: &["samples"],
        run: steepness,
    },
    SuiteInfo {
        name: "interior_vector",
        summary: "positive-functional and interior vectors over random bases and frames",
        claims: &["interior_vector", "metric_from_frame", "spacetime_definition"],
        params: &["samples"],
        run: interior_vector_suite,
    },
    SuiteInfo {
        name: "strict_witness",
        summary: "a strictly negative frame pairing for every nonzero future causal vector",
        claims: &["strict_witness", "cone_classification"],
        params: &["samples"],
        run: strict_witness_suite,
    },
    SuiteInfo {
        name: "conformal",
        summary: "graphs and distance results unchanged under Ω²g",
        claims: &["conformal_invariance", "proper_cone_null_distance"],
        params: &["h", "r", "pairs", "half_width"],
        run: conformal_suite,
    },
    SuiteInfo {
        name: "perturbed_temporal",
        summary: "dt(v) > 0 for future causal v on the perturbed product",
        claims: &["perturbed_temporal"],
        params: &["samples", "eps"],
        run: perturbed_temporal,
    },
    SuiteInfo {
        name: "composite_time",
        summary: "τ_M + t increases along discrete causal chains; product cones contain [0,∞) × C",
        claims: &["composite_time", "product_cones"],
        params: &["chains", "chain_len", "h"],
        run: composite_time,
    },
    SuiteInfo {
        name: "notgh",
        summary: "counterexample to inherited global hyperbolicity",
        claims: &["notgh", "gh_diamonds"],
        params: &["j", "j_max", "diamond_j_max", "eps"],
        run: notgh,
    },
    SuiteInfo {
        name: "cone_continuity",
        summary: "Hausdorff distance of unit cone slices shrinks with point separation",
        claims: &["cone_continuity", "metric_from_frame", "frame_validation", "spacetime_definition"],
        params: &["directions"],
        run: cone_continuity,
    },
    SuiteInfo {
        name: "torus_ctc",
        summary: "closed timelike curves on periodic flat lattices",
        claims: &["ctc_compact"],
        params: &["h"],
        run: torus_ctc,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let info = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    if let Some(key) = config.params.keys().find(|k| !info.params.contains(&k.as_str())) {
        return Err(Error::InvalidConfig(format!(
            "suite {name} does not take parameter {key} (accepted: {})",
            info.params.join(", ")
        )));
    }
    let start = Instant::now();
    let checks = (info.run)(config)?;
    Ok(SuiteReport {
        suite: name.to_string(),
        pass: checks.iter().all(|c| c.pass),
        seed: config.seed,
        params: config.params.clone(),
        checks,
        elapsed: start.elapsed(),
    })
}

/// Runs every registered suite with default parameters, in registry order.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES
        .par_iter()
        .map(|s| run_suite(s.name, &SuiteConfig::new(seed)))
        .collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= SLACK * a.abs().max(b.abs()).max(1.0)
}

fn lattice_pairs(graph: &CausalGraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = graph.node_count();
    (0..count)
        .map(|_| loop {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b || n == 1 {
                break (a, b);
            }
        })
        .collect()
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.0..1.0)))
}

fn condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn product_max_formula(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.real("h", 0.05);
    let r = cfg.count("r", 2)?;
    let pairs = cfg.count("pairs", 50)?;
    let half = cfg.real("half_width", 2.0);
    let s = flat(2, 1)?;
    let tau = TimeFunction::canonical(1);
    let grid = GridSpec::new(BoxRegion::cube(2, -half, half), h, r);
    let graph = build_graph(&s, &grid)?;
    let ng = NullGraph::new(&graph, &tau);
    let mut rng = cfg.rng();

    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    let mut lower_fail = Vec::new();
    let mut upper_fail = Vec::new();
    let mut bounds_ok = true;
    for (a, b) in lattice_pairs(&graph, pairs, &mut rng) {
        let (p, q) = (graph.point(a), graph.point(b));
        let oracle = product_oracle(euclidean_distance, p, q);
        let dt = (q[0] - p[0]).abs();
        let ds = euclidean_distance(&p[1..], &q[1..]);
        bounds_ok &= 0.5 * (dt + ds) <= oracle && oracle <= dt + ds;
        let value = match ng.between(a, b)?.value {
            Distance::Finite(v) => v,
            Distance::Unreachable => f64::INFINITY,
        };
        let ratio = value / oracle;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        let record = json!({"p": p, "q": q, "oracle": oracle, "value": value});
        if value < oracle - SLACK * oracle.max(1.0) {
            lower_fail.push(record.clone());
        }
        if value > 1.05 * oracle + SLACK * oracle.max(1.0) {
            upper_fail.push(record);
        }
    }
    let mut checks = vec![
        check(
            "random_pairs_lower",
            "estimate ≥ max{|Δt|, d_σ} for random lattice pairs",
            "ratio ≥ 1",
            json!({"min_ratio": min_ratio, "failures": lower_fail}),
            lower_fail.is_empty(),
        ),
        check(
            "random_pairs_upper",
            "estimate ≤ 1.05·max{|Δt|, d_σ} for random lattice pairs",
            "ratio ≤ 1.05",
            json!({"max_ratio": max_ratio, "failures": upper_fail}),
            upper_fail.is_empty(),
        ),
        check(
            "two_sided_bounds",
            "½(|Δt| + d_σ) ≤ max{|Δt|, d_σ} ≤ |Δt| + d_σ on the sampled pairs",
            true,
            bounds_ok,
            bounds_ok,
        ),
    ];

    let axis_pairs: [(&str, [f64; 2], [f64; 2]); 6] = [
        ("time", [-2.0, 0.0], [2.0, 0.0]),
        ("time", [0.0, -1.0], [1.0, -1.0]),
        ("time", [-1.5, 1.5], [0.5, 1.5]),
        ("space", [0.0, 0.0], [0.0, 1.0]),
        ("space", [-1.0, -2.0], [-1.0, 2.0]),
        ("space", [1.0, -0.5], [1.0, 0.5]),
    ];
    let mut observed = Vec::new();
    let mut exact = true;
    for (kind, p, q) in axis_pairs {
        let oracle = product_oracle(euclidean_distance, &p, &q);
        let value = ng.estimate(&p, &q)?.value.finite().unwrap_or(f64::INFINITY);
        exact &= close(value, oracle);
        observed.push(json!({"kind": kind, "p": p, "q": q, "oracle": oracle, "value": value}));
    }
    checks.push(check(
        "axis_aligned_exact",
        "pure-time and pure-space pairs (even step count) hit the oracle",
        "value = oracle",
        observed,
        exact,
    ));

    // An odd number of lattice steps in pure space cannot close with null
    // legs alone: Σ|Δt| over steps with ΣΔt = 0 is an even multiple of h.
    let (p, q) = ([0.0, 0.0], [0.0, 3.0 * h]);
    let value = ng.estimate(&p, &q)?.value.finite().unwrap_or(f64::INFINITY);
    checks.push(check(
        "odd_parity_space",
        "pure-space pair three steps apart costs 4h",
        4.0 * h,
        value,
        close(value, 4.0 * h),
    ));

    let (p, q) = ([-1.0, -0.6], [0.2, 1.0]);
    let oracle = product_oracle(euclidean_distance, &p, &q);
    let mut values = Vec::new();
    for hh in [4.0 * h, 2.0 * h, h] {
        let g = build_graph(&s, &GridSpec::new(BoxRegion::cube(2, -half, half), hh, r))?;
        values.push(NullGraph::new(&g, &tau).estimate(&p, &q)?.value.finite().unwrap_or(f64::INFINITY));
    }
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + SLACK * w[0])
        && values.iter().all(|&v| v >= oracle - SLACK * oracle);
    checks.push(check(
        "refinement_from_above",
        "estimates at h, h/2, h/4 are non-increasing and stay above the oracle",
        json!({"oracle": oracle}),
        json!({"values": values}),
        monotone,
    ));
    Ok(checks)
}

fn causal_boundary(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.count("samples", 1000)?;
    let mut rng = cfg.rng();
    let mut boundary_bad = 0;
    let mut interior_bad = 0;
    let mut exterior_bad = 0;
    let mut dtau_bad = 0;
    for i in 0..samples {
        let m = 1 + i % 2;
        let n = m + 1;
        let order = FlatSpace::new(n, 1)?;
        let s = flat(n, 1)?;
        let p = uniform(&mut rng, n);
        let dt = rng.gen_range(0.1..1.0);
        let dir = gaussian(&mut rng, m).normalize();
        let at = |scale: f64| {
            let mut q = p.clone();
            q[0] += dt;
            for j in 0..m {
                q[j + 1] += scale * dt * dir[j];
            }
            q
        };

        let q = at(1.0);
        let class = boundary_classify(euclidean_distance, p.as_slice(), q.as_slice(), 1e-9);
        let chord = &q - &p;
        let cone = classify(&s, p.as_slice(), chord.as_slice(), 1e-9)?;
        if class != BoundaryClass::CausalBoundary || cone != ConeClass::FutureBoundary {
            boundary_bad += 1;
        }

        let q = at(rng.gen_range(0.0..0.9));
        let class = boundary_classify(euclidean_distance, p.as_slice(), q.as_slice(), 1e-9);
        let related = order.leq(p.as_slice(), q.as_slice(), OrderMode::Chronological);
        if class != BoundaryClass::ChronologicalInterior || !related {
            interior_bad += 1;
        }
        if product_oracle(euclidean_distance, p.as_slice(), q.as_slice()) != q[0] - p[0] {
            dtau_bad += 1;
        }

        let q = at(rng.gen_range(1.1..2.0));
        let class = boundary_classify(euclidean_distance, p.as_slice(), q.as_slice(), 1e-9);
        if class != BoundaryClass::Exterior || order.leq(p.as_slice(), q.as_slice(), OrderMode::Causal) {
            exterior_bad += 1;
        }
    }
    Ok(vec![
        check(
            "boundary_samples",
            "q = p + (Δt, Δt·u) is classified causal_boundary and its chord FutureBoundary",
            0,
            boundary_bad,
            boundary_bad == 0,
        ),
        check(
            "interior_samples",
            "|Δx| < Δt is chronological_interior and p ≪ q",
            0,
            interior_bad,
            interior_bad == 0,
        ),
        check(
            "exterior_samples",
            "|Δx| > Δt is exterior and p ≰ q",
            0,
            exterior_bad,
            exterior_bad == 0,
        ),
        check(
            "dtau_causal_branch",
            "max formula returns Δt for chronologically related pairs",
            0,
            dtau_bad,
            dtau_bad == 0,
        ),
    ])
}

fn incomplete_fiber(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.real("h", 0.25);
    let r = cfg.count("r", 2)?;
    let full = flat(3, 1)?;
    let punctured = StructureDesc::Punctured {
        base: Box::new(StructureDesc::Flat { n: 3, nu: 1 }),
        axes: vec![1, 2],
    }
    .build()?;
    let p = [0.0, -1.0, 0.0];
    let q = [2.0, 1.0, 0.0];
    let oracle = product_oracle(euclidean_distance, &p, &q);
    let mid = [1.0, 0.0, 0.0];
    let chord = [2.0, 2.0, 0.0];
    let chord_class = classify(&full, &p, &chord, TOL_EXACT)?;

    let grid = GridSpec::new(BoxRegion::new(vec![0.0, -1.0, -1.0], vec![2.0, 1.0, 1.0])?, h, r);
    let reached = |s: &SpacetimeStructure| -> Result<bool> {
        let g = build_graph(s, &grid)?;
        let (a, b) = (g.node_at(&p), g.node_at(&q));
        match (a, b) {
            (Some(a), Some(b)) => Ok(reach(&g, a, Direction::Future)?.contains(b)),
            _ => Err(Error::NotOnGrid { point: p.to_vec() }),
        }
    };
    let full_reach = reached(&full)?;
    let punctured_reach = reached(&punctured)?;
    Ok(vec![
        check(
            "max_formula_equals_dt",
            "max{|Δt|, d_σ} = Δt for p = (0,−1,0), q = (2,1,0)",
            2.0,
            oracle,
            oracle == 2.0,
        ),
        check(
            "only_chord_is_null",
            "the straight chord is null, so it is the only causal connection",
            ConeClass::FutureBoundary,
            chord_class,
            chord_class == ConeClass::FutureBoundary,
        ),
        check(
            "chord_hits_puncture",
            "the chord's midpoint (1,0,0) is removed",
            false,
            punctured.contains(&mid),
            !punctured.contains(&mid),
        ),
        check(
            "reachable_without_puncture",
            "q is in the discrete future of p on the full product",
            true,
            full_reach,
            full_reach,
        ),
        check(
            "unreachable_with_puncture",
            "q is not in the discrete future of p once the fiber is punctured",
            false,
            punctured_reach,
            !punctured_reach,
        ),
    ])
}

fn heine_borel_product(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pairs = cfg.count("pairs", 200)?;
    let h = cfg.real("h", 0.25);
    let mut rng = cfg.rng();
    let mut outside = 0;
    let mut nonempty = 0;
    for n in [2, 3] {
        let s = flat(n, 1)?;
        let order = FlatSpace::new(n, 1)?;
        let g = build_graph(&s, &GridSpec::new(BoxRegion::cube(n, -1.0, 1.0), h, 2))?;
        for (a, b) in lattice_pairs(&g, pairs, &mut rng) {
            let d = diamond(&g, a, b)?;
            if d.is_empty() {
                continue;
            }
            nonempty += 1;
            match order.diamond_box(g.point(a), g.point(b)) {
                Some(bx) => outside += d.iter().filter(|&x| !bx.contains(g.point(x))).count(),
                None => outside += d.len(),
            }
        }
    }

    let punctured = StructureDesc::Punctured {
        base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
        axes: vec![0, 1],
    }
    .build()?;
    let mut sequence = Vec::new();
    let mut all_in = true;
    for k in 2..=6 {
        let hk = 0.5f64.powi(k);
        let g = build_graph(&punctured, &GridSpec::new(BoxRegion::cube(2, -1.0, 1.0), hk, 2))?;
        let node = g.node_at(&[-hk, 0.0]);
        let (p, q) = (g.node_at(&[-1.0, 0.0]), g.node_at(&[1.0, 0.0]));
        let inside = match (node, p, q) {
            (Some(x), Some(p), Some(q)) => diamond(&g, p, q)?.contains(x),
            _ => false,
        };
        all_in &= inside;
        sequence.push(json!({"h": hk, "node": [-hk, 0.0], "in_diamond": inside}));
    }
    let removed = !punctured.contains(&[0.0, 0.0]);
    Ok(vec![
        check(
            "diamonds_in_box",
            "discrete diamonds of flat(2,1) and flat(3,1) lie in the closed-form bounding box",
            0,
            json!({"outside": outside, "nonempty_diamonds": nonempty}),
            outside == 0,
        ),
        check(
            "punctured_sequence",
            "(−h,0) lies in the diamond of (−1,0),(1,0) for h = 2^−k, k = 2..6",
            true,
            sequence,
            all_in,
        ),
        check("limit_removed", "the limit point (0,0) is not in the domain", true, removed, removed),
    ])
}

fn flat_gh(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let pairs = cfg.count("pairs", 1000)?;
    let h = cfg.real("h", 0.25);
    let r = cfg.count("r", 2)?;
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for (n, nu) in [(2, 1), (3, 1), (3, 2), (2, 2)] {
        let s = flat(n, nu)?;
        let order = FlatSpace::new(n, nu)?;
        let g = build_graph(&s, &GridSpec::new(BoxRegion::cube(n, -1.0, 1.0), h, r))?;
        let mut reach_bad = 0;
        let mut box_bad = 0;
        let mut diamond_sizes = 0usize;
        for (a, b) in lattice_pairs(&g, pairs, &mut rng) {
            let (pa, pb) = (g.point(a), g.point(b));
            let fut = reach(&g, a, Direction::Future)?;
            reach_bad += fut.iter().filter(|&x| !order.leq(pa, g.point(x), OrderMode::Causal)).count();
            let past = reach(&g, b, Direction::Past)?;
            reach_bad += past.iter().filter(|&x| !order.leq(g.point(x), pb, OrderMode::Causal)).count();
            let d = fut.intersection(&past);
            diamond_sizes += d.len();
            box_bad += match order.diamond_box(pa, pb) {
                Some(bx) => d.iter().filter(|&x| !bx.contains(g.point(x))).count(),
                None => d.len(),
            };
        }
        checks.push(check(
            &format!("reach_sound_{n}_{nu}"),
            &format!("discrete J± on flat({n},{nu}) stays inside the closed-form order"),
            0,
            reach_bad,
            reach_bad == 0,
        ));
        checks.push(check(
            &format!("diamond_bounded_{n}_{nu}"),
            &format!("discrete diamonds on flat({n},{nu}) stay inside the bounding box"),
            0,
            json!({"outside": box_bad, "total_diamond_nodes": diamond_sizes}),
            box_bad == 0,
        ));

        // Coarse diamonds survive refinement: every coarse edge is a chain of
        // fine edges along the same offset direction.
        let coarse = build_graph(&s, &GridSpec::new(BoxRegion::cube(n, -1.0, 1.0), 2.0 * h, r))?;
        let mut lost = 0;
        for (a, b) in lattice_pairs(&coarse, 20, &mut rng) {
            let dc = diamond(&coarse, a, b)?;
            let (fa, fb) = (g.node_at(coarse.point(a)), g.node_at(coarse.point(b)));
            let (Some(fa), Some(fb)) = (fa, fb) else {
                lost += dc.len();
                continue;
            };
            let df = diamond(&g, fa, fb)?;
            lost += dc
                .iter()
                .filter(|&x| g.node_at(coarse.point(x)).map_or(true, |y| !df.contains(y)))
                .count();
        }
        checks.push(check(
            &format!("refinement_monotone_{n}_{nu}"),
            &format!("diamonds at spacing 2h are contained in diamonds at h on flat({n},{nu})"),
            0,
            lost,
            lost == 0,
        ));
    }

    // For ν ≥ 2 the closed-form order is not transitive: two future null
    // steps can end spacelike to the start.
    let s = flat(3, 2)?;
    let order = FlatSpace::new(3, 2)?;
    let (u, w) = ([1.0, 0.0, 1.0], [0.0, 1.0, 1.0]);
    let steps_causal = classify(&s, &[0.0; 3], &u, 0.0)?.is_future_causal()
        && classify(&s, &u, &w, 0.0)?.is_future_causal();
    let end_related = order.leq(&[0.0; 3], &[1.0, 1.0, 2.0], OrderMode::Causal);
    checks.push(check(
        "two_step_witness_3_2",
        "on flat(3,2), (0,0,0) → (1,0,1) → (1,1,2) uses two future null steps, yet (1,1,2) is outside the closed-form future",
        json!({"steps_future_causal": true, "closed_form_related": false}),
        json!({"steps_future_causal": steps_causal, "closed_form_related": end_related}),
        steps_causal && !end_related,
    ));
    Ok(checks)
}

fn degenerate_tau(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let ks: Vec<u32> = match cfg.optional_count("k")? {
        Some(k) if (1..=8).contains(&k) => vec![k as u32],
        Some(k) => return Err(Error::InvalidConfig(format!("k must be in 1..=8, got {k}"))),
        None => vec![1, 2],
    };
    let j_max = cfg.count("j_max", 50)?.max(1);
    let mut checks = Vec::new();
    for &k in &ks {
        let tau = TimeFunction::odd_power(2, k);
        let mut worst: f64 = 0.0;
        for j in 1..=j_max {
            let expected = 1.0 / (4f64.powi(k as i32) * (j as f64).powi(2 * k as i32));
            let got = null_length(&tau, &zigzag(3, j));
            worst = worst.max((got - expected).abs() / expected);
        }
        checks.push(check(
            &format!("closed_form_k{k}"),
            &format!("L̂(β_j) = 1/(4^{k} j^{}) for j = 1..{j_max}", 2 * k),
            json!({"max_rel_error": 1e-12}),
            json!({"max_rel_error": worst}),
            worst <= 1e-12,
        ));
        if j_max >= 10 {
            let expected = 1.0 / (4f64.powi(k as i32) * 10f64.powi(2 * k as i32));
            let got = null_length(&tau, &zigzag(3, 10));
            checks.push(check(
                &format!("k{k}_j10"),
                "null length of β_10",
                expected,
                got,
                (got - expected).abs() <= 1e-12 * expected,
            ));
        }
    }

    let s = flat(3, 2)?;
    let causal = (1..=5).all(|j| validate_path(&s, &zigzag(3, j), 3, TOL_EXACT).pass);
    checks.push(check(
        "zigzag_piecewise_causal",
        "β_j alternates future and past null legs (j = 1..5)",
        true,
        causal,
        causal,
    ));

    let tau3 = TimeFunction::odd_power(2, 1);
    let mut values = Vec::new();
    let mut within = true;
    for h in [0.25, 0.125, 0.0625] {
        let grid = GridSpec::new(BoxRegion::new(vec![-0.25, -0.25, -0.25], vec![0.25, 0.25, 1.25])?, h, 2);
        let g = build_graph(&s, &grid)?;
        let v = NullGraph::new(&g, &tau3)
            .estimate(&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0])?
            .value
            .finite()
            .unwrap_or(f64::INFINITY);
        within &= v <= h * h * (1.0 + SLACK);
        values.push(json!({"h": h, "value": v}));
    }
    let vals: Vec<f64> = values.iter().map(|v| v["value"].as_f64().unwrap_or(f64::INFINITY)).collect();
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    checks.push(check(
        "estimate_vanishes",
        "d̂_{T³}((0,0,0),(0,0,1)) estimates decrease with h and stay below the zigzag bound h²",
        "strictly decreasing, value ≤ h²",
        values,
        decreasing && within,
    ));

    let grid = GridSpec::new(BoxRegion::new(vec![-0.25, -0.25, -0.25], vec![0.25, 0.25, 1.25])?, 0.05, 2);
    let g = build_graph(&s, &grid)?;
    let v = NullGraph::new(&g, &TimeFunction::canonical(2))
        .estimate(&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0])?
        .value
        .finite()
        .unwrap_or(f64::INFINITY);
    checks.push(check(
        "nu2_exact_pair",
        "d̂_T((0,0,0),(0,0,1)) on flat(3,2) at h = 0.05 lies in [1, 1.05]",
        json!([1.0, 1.05]),
        v,
        v >= 1.0 - SLACK && v <= 1.05,
    ));
    Ok(checks)
}

/// A future causal vector of flat(n,ν): nonnegative time part, spatial part
/// no longer than the time part.
fn flat_causal_sample(rng: &mut ChaCha8Rng, n: usize, nu: usize) -> Vector {
    let mut v = Vector::zeros(n);
    loop {
        for i in 0..nu {
            v[i] = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) };
        }
        if v.rows(0, nu).norm() > 0.0 {
            break;
        }
    }
    if n > nu {
        let time_norm = v.rows(0, nu).norm();
        let dir = gaussian(rng, n - nu).normalize();
        let scale = rng.gen_range(0.0..1.0) * time_norm;
        for j in nu..n {
            v[j] = scale * dir[j - nu];
        }
    }
    v
}

fn steepness(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.count("samples", 10_000)?;
    let mut rng = cfg.rng();
    let combos: Vec<(usize, usize)> = (1..=5).flat_map(|n| (1..=n).map(move |nu| (n, nu))).collect();
    let mut min_ratio = f64::INFINITY;
    let mut not_causal = 0;
    for i in 0..samples {
        let (n, nu) = combos[i % combos.len()];
        let v = flat_causal_sample(&mut rng, n, nu);
        let s = flat(n, nu)?;
        if !classify(&s, &vec![0.0; n], v.as_slice(), TOL_EXACT)?.is_future_causal() {
            not_causal += 1;
        }
        let dt: f64 = v.rows(0, nu).sum();
        min_ratio = min_ratio.min(2.0 * dt / v.norm());
    }
    let probe = anti_lipschitz_probe(
        &flat(3, 2)?,
        &TimeFunction::canonical(2),
        &BoxRegion::cube(3, -1.0, 1.0),
        samples.min(2000),
        cfg.seed,
    )?;
    Ok(vec![
        check(
            "samples_future_causal",
            "sampled vectors are future causal",
            0,
            not_causal,
            not_causal == 0,
        ),
        check(
            "steepness_bound",
            "2dT(v)/‖v‖ over the samples, 1 ≤ ν ≤ n ≤ 5",
            json!({"min_ratio": 1.0}),
            json!({"min_ratio": min_ratio}),
            samples == 0 || min_ratio >= 1.0,
        ),
        check(
            "anti_lipschitz",
            "(T(q) − T(p))/‖q − p‖ ≥ ½ on causal chords of flat(3,2), so T is unbounded along causal lines",
            json!({"min_ratio": 0.5}),
            json!({"min_ratio": probe.min_ratio, "pairs": probe.pairs}),
            probe.min_ratio >= 0.5,
        ),
    ])
}

fn random_well_conditioned(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
        if condition(&m) <= 1e6 {
            return m;
        }
    }
}

fn columns(m: &DMatrix<f64>) -> Vec<Vector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

fn interior_vector_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.count("samples", 1000)?;
    let mut rng = cfg.rng();
    let mut functional_bad = 0;
    let mut worst_pairing = f64::INFINITY;
    for _ in 0..samples {
        let m = rng.gen_range(1..=6);
        let basis = columns(&random_well_conditioned(&mut rng, m, m));
        let a = random_well_conditioned(&mut rng, m, m);
        let inner = SymForm::new(a.transpose() * &a + DMatrix::identity(m, m) * 0.1)?;
        for form in [SymForm::identity(m), inner] {
            match positive_functional_vector(&basis, &form) {
                Ok(v) => {
                    let least = basis
                        .iter()
                        .map(|b| form.apply(v.as_slice(), b.as_slice()))
                        .fold(f64::INFINITY, f64::min);
                    worst_pairing = worst_pairing.min(least);
                    if !(least > 0.0) {
                        functional_bad += 1;
                    }
                }
                Err(_) => functional_bad += 1,
            }
        }
    }

    let mut interior_bad = 0;
    let mut index_bad = 0;
    for _ in 0..samples {
        let n = rng.gen_range(2..=5);
        let nu = rng.gen_range(1..=n);
        let x = random_well_conditioned(&mut rng, n, nu);
        let frame = TimeFrame::constant(n, columns(&x))?;
        let origin = Vector::zeros(n);
        let s = match from_frame(&MetricField::euclidean(n), frame, std::slice::from_ref(&origin)) {
            Ok(s) => s,
            Err(_) => {
                interior_bad += 1;
                continue;
            }
        };
        if signature(&s.form_at(origin.as_slice()), 1e-9).negative != nu {
            index_bad += 1;
        }
        let ok = interior_vector(&s, origin.as_slice())
            .map(|v| classify_with(&s.form_at(origin.as_slice()), &s.frame_at(origin.as_slice()), v.as_slice(), 0.0))
            == Ok(ConeClass::FutureTimelike);
        if !ok {
            interior_bad += 1;
        }
    }
    Ok(vec![
        check(
            "positive_functional",
            "⟨v, bᵢ⟩ > 0 for every basis vector, Euclidean and random SPD inner products",
            0,
            json!({"failures": functional_bad, "least_pairing": worst_pairing}),
            functional_bad == 0,
        ),
        check(
            "frame_metric_index",
            "the metric built from a random frame has exactly ν negative directions",
            0,
            index_bad,
            index_bad == 0,
        ),
        check(
            "interior_vector_timelike",
            "interior_vector is future timelike for random frames (condition ≤ 1e6)",
            0,
            interior_bad,
            interior_bad == 0,
        ),
    ])
}

fn strict_witness_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.count("samples", 1000)?;
    let mut rng = cfg.rng();
    let mut flat_bad = 0;
    let mut frame_bad = 0;
    let mut frame_tested = 0;
    let mut reversed_bad = 0;
    for i in 0..samples {
        let n = rng.gen_range(2..=5);
        let nu = rng.gen_range(1..=n);
        let origin = vec![0.0; n];
        if i % 2 == 0 {
            let s = flat(n, nu)?;
            let v = flat_causal_sample(&mut rng, n, nu);
            let ok = match strict_witness(&s, &origin, v.as_slice(), 0.0) {
                Ok(j) => s.form_at(&origin).apply(v.as_slice(), s.frame_at(&origin)[j - 1].as_slice()) < 0.0,
                Err(_) => false,
            };
            if !ok {
                flat_bad += 1;
            }
            if strict_witness(&s, &origin, (-v).as_slice(), 0.0) != Err(Error::NotFutureCausal) {
                reversed_bad += 1;
            }
        } else {
            let x = random_well_conditioned(&mut rng, n, nu);
            let s = from_frame(&MetricField::euclidean(n), TimeFrame::constant(n, columns(&x))?, &[Vector::zeros(n)])?;
            let form = s.form_at(&origin);
            let frame = s.frame_at(&origin);
            for _ in 0..200 {
                let mut v = uniform(&mut rng, n);
                let class = classify_with(&form, &frame, v.as_slice(), 0.0);
                if class.is_past_causal() {
                    v = -v;
                } else if !class.is_future_causal() {
                    continue;
                }
                frame_tested += 1;
                let ok = matches!(strict_witness(&s, &origin, v.as_slice(), 0.0),
                    Ok(j) if form.apply(v.as_slice(), frame[j - 1].as_slice()) < 0.0);
                if !ok {
                    frame_bad += 1;
                }
                break;
            }
        }
    }
    Ok(vec![
        check(
            "flat_boundary_vectors",
            "flat(n,ν) future causal vectors with vanishing time components still have a strict pairing",
            0,
            flat_bad,
            flat_bad == 0,
        ),
        check(
            "random_frames",
            "future causal vectors of random frame-derived metrics have a strict pairing",
            0,
            json!({"failures": frame_bad, "tested": frame_tested}),
            frame_bad == 0,
        ),
        check(
            "past_vectors_rejected",
            "−v is reported as not future causal",
            0,
            reversed_bad,
            reversed_bad == 0,
        ),
    ])
}

fn conformal_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.real("h", 0.05);
    let r = cfg.count("r", 2)?;
    let pairs = cfg.count("pairs", 20)?;
    let half = cfg.real("half_width", 2.0);
    let s = flat(2, 1)?;
    let omega = ConformalFactor::OnePlusHalfSin { axis: 0 };
    let scaled = conformal(&s, move |p| omega.eval(p));
    let grid = GridSpec::new(BoxRegion::cube(2, -half, half), h, r);
    let g0 = build_graph(&s, &grid)?;
    let g1 = build_graph(&scaled, &grid)?;
    let same_graph = g0 == g1;
    let tau = TimeFunction::canonical(1);
    let (n0, n1) = (NullGraph::new(&g0, &tau), NullGraph::new(&g1, &tau));
    let mut rng = cfg.rng();
    let mut differing = 0;
    for (a, b) in lattice_pairs(&g0, pairs, &mut rng) {
        let r0 = n0.between(a, b)?;
        let r1 = n1.between(a, b)?;
        let bytes_equal = serde_json::to_string(&r0).ok() == serde_json::to_string(&r1).ok();
        let bits_equal = match (r0.value, r1.value) {
            (Distance::Finite(x), Distance::Finite(y)) => x.to_bits() == y.to_bits(),
            (x, y) => x == y,
        };
        if !(bytes_equal && bits_equal && r0.directions == r1.directions) {
            differing += 1;
        }
    }
    Ok(vec![
        check(
            "graph_identical",
            "the causal graph of Ω²g equals that of g, Ω = 1 + ½ sin(p¹)",
            true,
            json!({"equal": same_graph, "nodes": g0.node_count(), "edges": g0.edge_count()}),
            same_graph,
        ),
        check(
            "distance_results_identical",
            "distance results agree bit for bit on random lattice pairs",
            0,
            differing,
            differing == 0,
        ),
    ])
}

fn perturbed_temporal(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let samples = cfg.count("samples", 10_000)?;
    let eps_list = match cfg.params.get("eps") {
        Some(&e) => vec![e],
        None => vec![0.1, 1.0],
    };
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for eps in eps_list {
        let s = extend_negative(&flat(2, 1)?, eps);
        let mut found = 0;
        let mut bad = 0;
        let mut min_dt = f64::INFINITY;
        let mut draws = 0;
        while found < samples && draws < 100 * samples + 1000 {
            draws += 1;
            let p = uniform(&mut rng, 3);
            let v = uniform(&mut rng, 3);
            let class = classify(&s, p.as_slice(), v.as_slice(), 0.0)?;
            let v = if class.is_future_causal() {
                v
            } else if class.is_past_causal() {
                -v
            } else {
                continue;
            };
            found += 1;
            min_dt = min_dt.min(v[0]);
            if !(v[0] > 0.0) {
                bad += 1;
            }
        }
        checks.push(check(
            &format!("dt_positive_eps_{eps}"),
            &format!("dt(v) > 0 for future causal v in ℝ × flat(2,1) with ε = {eps}"),
            json!({"violations": 0, "samples": samples}),
            json!({"violations": bad, "samples": found, "min_dt": min_dt}),
            bad == 0 && found == samples,
        ));
    }
    Ok(checks)
}

fn composite_time(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let chains = cfg.count("chains", 1000)?;
    let chain_len = cfg.count("chain_len", 20)?;
    let h = cfg.real("h", 0.25);
    let base = flat(2, 2)?;
    let tau = TimeFunction::composite_sum(&TimeFunction::canonical(2));
    let mut rng = cfg.rng();
    let mut checks = Vec::new();
    for eps in [0.0, 0.5] {
        let s = extend_negative(&base, eps);
        let g = build_graph(&s, &GridSpec::new(BoxRegion::cube(3, -1.0, 1.0), h, 2))?;
        let mut steps = 0;
        let mut bad = 0;
        for _ in 0..chains {
            let mut a = rng.gen_range(0..g.node_count());
            for _ in 0..chain_len {
                let Some(e) = g.out_edges(a).choose(&mut rng) else {
                    break;
                };
                let b = e.node as usize;
                steps += 1;
                if !(tau.eval(g.point(b)) > tau.eval(g.point(a))) {
                    bad += 1;
                }
                a = b;
            }
        }
        checks.push(check(
            &format!("tau_increases_eps_{eps}"),
            &format!("τ_M + t strictly increases along random causal chains in ℝ × flat(2,2), ε = {eps}"),
            0,
            json!({"violations": bad, "steps": steps}),
            bad == 0 && steps > 0,
        ));
    }

    let lifted = extend_negative(&flat(2, 1)?, 0.0);
    let mut bad = 0;
    let samples = chains.max(1);
    for _ in 0..samples {
        let v = flat_causal_sample(&mut rng, 2, 1);
        let a = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.0) };
        let w = Vector::from_vec(vec![a, v[0], v[1]]);
        if !classify(&lifted, &[0.0; 3], w.as_slice(), TOL_EXACT)?.is_future_causal() {
            bad += 1;
        }
    }
    let dt_class = classify(&lifted, &[0.0; 3], &[1.0, 0.0, 0.0], TOL_EXACT)?;
    checks.push(check(
        "product_cone_contains_lift",
        "(a, v) is future causal in ℝ × M for a ≥ 0 and v future causal in M",
        0,
        bad,
        bad == 0,
    ));
    checks.push(check(
        "dt_in_cone",
        "∂t is future causal in ℝ × M",
        true,
        dt_class.is_future_causal(),
        dt_class.is_future_causal(),
    ));
    Ok(checks)
}

/// The structure ℝ × (ℝ^{1,1} ∖ J⁺(0)) in coordinates (t, x, y).
pub fn notgh_structure(eps: f64) -> Result<SpacetimeStructure> {
    StructureDesc::ExtendNegative {
        base: Box::new(StructureDesc::ExcludeFuture {
            base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
            apex: vec![0.0, 0.0],
        }),
        eps,
    }
    .build()
}

fn notgh(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let single = cfg.optional_count("j")?;
    if single.is_some_and(|j| j < 2) {
        return Err(Error::InvalidConfig("j must be at least 2".into()));
    }
    let j_max = cfg.count("j_max", 100)?;
    let diamond_j_max = cfg.count("diamond_j_max", 8)?;
    let eps = cfg.real("eps", 0.0);
    let js: Vec<usize> = match single {
        Some(j) => vec![j],
        None => (2..=j_max).collect(),
    };

    let anchor = notgh_structure(0.0)?;
    let p = [-2.0, -1.0, 1.0];
    let q = [2.0, 1.0, -2.0];
    let g = anchor.form_at(&p);
    let frame = anchor.frame_at(&p);
    let (x1, x2) = (frame[0].as_slice(), frame[1].as_slice());

    type Formula = fn(f64) -> f64;
    let alpha = |j: f64| [2.0, 1.0 - 1.0 / j, -1.0 - 1.0 / j];
    // The vector whose products reproduce the displayed β_j values.
    let beta = |j: f64| [-2.0, -1.0 - 1.0 / j, -2.0 * (1.0 + 1.0 / j)];
    let quantities: [(&str, &str, Formula, Box<dyn Fn(f64) -> f64>); 6] = [
        ("alpha_norm", "g′(α̇_j, α̇_j) = −4 + 4/j", |j| -4.0 + 4.0 / j, Box::new(|j| g.apply(&alpha(j), &alpha(j)))),
        ("alpha_x1", "g′(α̇_j, X₁) = −1 + 1/j", |j| -1.0 + 1.0 / j, Box::new(|j| g.apply(&alpha(j), x1))),
        ("alpha_x2", "g′(α̇_j, X₂) = −2", |_| -2.0, Box::new(|j| g.apply(&alpha(j), x2))),
        (
            "beta_norm",
            "g′(β̇_j, β̇_j) = −1 + 6/j + 3/j²",
            |j| -1.0 + 6.0 / j + 3.0 / (j * j),
            Box::new(|j| g.apply(&beta(j), &beta(j))),
        ),
        ("beta_x1", "g′(β̇_j, X₁) = 1 + 1/j", |j| 1.0 + 1.0 / j, Box::new(|j| g.apply(&beta(j), x1))),
        ("beta_x2", "g′(β̇_j, X₂) = 2", |_| 2.0, Box::new(|j| g.apply(&beta(j), x2))),
    ];
    let mut checks = Vec::new();
    for (id, description, expected, observed) in &quantities {
        let mut worst: f64 = 0.0;
        for &j in &js {
            worst = worst.max((expected(j as f64) - observed(j as f64)).abs());
        }
        let j0 = js[0] as f64;
        checks.push(check(
            id,
            description,
            json!({"j": js[0], "value": expected(j0), "max_abs_error": 1e-12}),
            json!({"j": js[0], "value": observed(j0), "max_abs_error": worst}),
            worst <= 1e-12,
        ));
    }

    // The straight chord from q to x_j itself is past causal for every j.
    let mut chord_bad = 0;
    for &j in &js {
        let jf = j as f64;
        let xj = [0.0, -1.0 / jf, -1.0 / jf];
        let w: Vec<f64> = xj.iter().zip(&q).map(|(a, b)| a - b).collect();
        if !classify_with(&g, &frame, &w, TOL_EXACT).is_past_causal() {
            chord_bad += 1;
        }
    }
    checks.push(check(
        "chord_q_to_xj_past_causal",
        "x_j − q is past causal (g′ = −1 − 6/j)",
        0,
        chord_bad,
        chord_bad == 0,
    ));

    let s = notgh_structure(eps)?;
    let dj: Vec<usize> = match single {
        Some(j) => vec![j],
        None => (2..=diamond_j_max).collect(),
    };
    let mut members = Vec::new();
    let mut all_in = true;
    for j in dj {
        let h = 1.0 / j as f64;
        let grid = GridSpec::new(BoxRegion::new(vec![-2.0, -1.0, -3.0], vec![2.0, 1.0, 2.0])?, h, 2);
        let graph = build_graph(&s, &grid)?;
        let xj = [0.0, -h, -h];
        let inside = match (graph.node_at(&p), graph.node_at(&q), graph.node_at(&xj)) {
            (Some(a), Some(b), Some(x)) => diamond(&graph, a, b)?.contains(x),
            _ => false,
        };
        all_in &= inside;
        members.push(json!({"j": j, "h": h, "in_diamond": inside}));
    }
    checks.push(check(
        "xj_in_discrete_diamond",
        "x_j = (0, −1/j, −1/j) lies in the discrete diamond of p and q on the grid h = 1/j",
        true,
        members,
        all_in,
    ));
    let limit_in = s.contains(&[0.0, 0.0, 0.0]);
    checks.push(check(
        "limit_excluded",
        "the limit (0,0,0) of x_j violates the domain predicate",
        false,
        limit_in,
        !limit_in,
    ));
    Ok(checks)
}

/// Frame-derived metric on ℝ³ with a point-dependent frame.
pub fn varying_frame_structure(nu: usize) -> Result<SpacetimeStructure> {
    let mut fields: Vec<PointFn<Vector>> = vec![Arc::new(|p: &[f64]| {
        Vector::from_vec(vec![1.0, 0.4 * p[0].sin(), 0.3 * p[1].cos()])
    })];
    if nu == 2 {
        fields.push(Arc::new(|p: &[f64]| {
            Vector::from_vec(vec![0.2 * p[2].cos(), 1.0, 0.25 * p[0].sin()])
        }));
    }
    let probes: Vec<Vector> = (0..27)
        .map(|i| {
            Vector::from_vec(vec![
                (i % 3) as f64 - 1.0,
                ((i / 3) % 3) as f64 - 1.0,
                (i / 9) as f64 - 1.0,
            ])
        })
        .collect();
    from_frame(&MetricField::euclidean(3), TimeFrame::from_fns(3, fields), &probes)
}

fn hausdorff(a: &[Vector], b: &[Vector]) -> f64 {
    let directed = |x: &[Vector], y: &[Vector]| {
        x.iter()
            .map(|u| y.iter().map(|w| (u - w).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (false, false) => directed(a, b).max(directed(b, a)),
        _ => f64::INFINITY,
    }
}

fn cone_continuity(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let count = cfg.count("directions", 4000)?;
    let mut rng = cfg.rng();
    let sphere: Vec<Vector> = (0..count).map(|_| gaussian(&mut rng, 3).normalize()).collect();
    let base = [0.3, -0.2, 0.1];
    let e = Vector::from_vec(vec![1.0, 1.0, 1.0]).normalize();
    let deltas = [0.5, 0.1, 0.02, 0.004];
    let mut checks = Vec::new();
    for nu in [1, 2] {
        let s = varying_frame_structure(nu)?;
        let probes = BoxRegion::cube(3, -2.0, 2.0).uniform_points(200, cfg.seed);
        let report = validate(&s, &probes, VALIDATION_TOL);
        checks.push(check(
            &format!("frame_valid_nu{nu}"),
            "frame fields are timelike and independent, metric index ν at 200 probes",
            true,
            report.pass,
            report.pass,
        ));
        let slice = |p: &[f64]| -> Vec<Vector> {
            let form = s.form_at(p);
            let frame = s.frame_at(p);
            sphere
                .iter()
                .filter(|u| classify_with(&form, &frame, u.as_slice(), 0.0).is_future_causal())
                .cloned()
                .collect()
        };
        let at_base = slice(&base);
        let distances: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                let p: Vec<f64> = base.iter().zip(e.iter()).map(|(b, x)| b + d * x).collect();
                hausdorff(&at_base, &slice(&p))
            })
            .collect();
        let last = *distances.last().expect("nonempty");
        let shrinking = distances.windows(2).all(|w| w[1] <= w[0]) && last < distances[0] && last <= 0.1;
        checks.push(check(
            &format!("hausdorff_shrinks_nu{nu}"),
            "sampled Hausdorff distance of unit cone slices at separations 0.5, 0.1, 0.02, 0.004",
            "non-increasing, final ≤ 0.1",
            json!({"slice_size": at_base.len(), "distances": distances}),
            shrinking,
        ));
    }
    Ok(checks)
}

fn torus_ctc(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let h = cfg.real("h", 0.5);
    let mut checks = Vec::new();
    for (n, nu) in [(2, 1), (2, 2), (3, 2)] {
        let s = flat(n, nu)?;
        let bounds = BoxRegion::cube(n, 0.0, 2.0);
        let torus = build_graph(&s, &GridSpec::new(bounds.clone(), h, 1).torus())?;
        let cycle = find_closed_timelike(&torus);
        let valid = cycle.as_ref().is_some_and(|c| {
            (0..c.len()).all(|i| {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                torus.out_edges(a).iter().any(|e| e.node as usize == b && e.timelike)
            })
        });
        checks.push(check(
            &format!("torus_cycle_{n}_{nu}"),
            &format!("periodic flat({n},{nu}) has a closed timelike edge cycle"),
            true,
            json!({"cycle_length": cycle.as_ref().map(Vec::len)}),
            valid,
        ));
        let open = build_graph(&s, &GridSpec::new(bounds, h, 1))?;
        let none = find_closed_timelike(&open).is_none();
        checks.push(check(
            &format!("open_box_acyclic_{n}_{nu}"),
            &format!("the non-periodic box of flat({n},{nu}) has no closed timelike cycle"),
            true,
            none,
            none,
        ));
    }
    Ok(checks)
}
