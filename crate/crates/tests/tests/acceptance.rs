//! Acceptance criteria 1–10, one `PASS`/`FAIL` line each.
//!
//! Every criterion is computed directly from the library API rather than by
//! reading suite reports, so the suites and this file cross-check each other.
//! Tolerances and runtime limits are pinned below.

use std::process::ExitCode;
use std::time::Instant;

use conecalc::bilinear::{positive_functional_vector, SymForm, Vector};
use conecalc::cone::{classify, classify_with, interior_vector, strict_witness};
use conecalc::flatspace::{FlatSpace, OrderMode};
use conecalc::lattice::{build_graph, diamond, find_closed_timelike, reach, CausalGraph, Direction, GridSpec};
use conecalc::nulldist::{euclidean_distance, null_length, product_oracle, zigzag, Distance, NullGraph, TimeFunction};
use conecalc::spacetime::{conformal, extend_negative, flat, from_frame, ConformalFactor, MetricField, TimeFrame};
use conecalc::verify::{notgh_structure, run_all};
use conecalc::{BoxRegion, ConeClass};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const SEED: u64 = 42;

/// Relative error allowed for closed-form null lengths.
const C1_REL_TOL: f64 = 1e-12;
/// Absolute error allowed for the chord inner products.
const C2_ABS_TOL: f64 = 1e-12;
/// Upper factor for estimator/oracle.
const C3_UPPER: f64 = 1.05;
/// Relative slack for "equals" and for the lower bound: the only error
/// source is summing lattice coordinates in floating point.
const FP_REL: f64 = 1e-12;
/// Admissible interval for the ν = 2 pair.
const C4_RANGE: (f64, f64) = (1.0, 1.05);
/// Largest condition number accepted for random frames and bases.
const C8_MAX_CONDITION: f64 = 1e6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= FP_REL * a.abs().max(b.abs()).max(1.0)
}

fn finite(d: Distance) -> f64 {
    d.finite().unwrap_or(f64::INFINITY)
}

fn c1_degenerate_tau() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in [1u32, 2] {
        let tau = TimeFunction::odd_power(2, k);
        for j in 1..=50usize {
            let expected = 1.0 / (4f64.powi(k as i32) * (j as f64).powi(2 * k as i32));
            let got = null_length(&tau, &zigzag(3, j));
            worst = worst.max((got - expected).abs() / expected);
        }
    }
    Outcome {
        pass: worst <= C1_REL_TOL,
        detail: format!("max relative error {worst:.2e} (tol {C1_REL_TOL:.0e}) over k∈{{1,2}}, j=1..50"),
    }
}

fn c2_counterexample() -> Outcome {
    let s = notgh_structure(0.0).expect("notgh structure");
    let p = [-2.0, -1.0, 1.0];
    let q = [2.0, 1.0, -2.0];
    let g = s.form_at(&p);
    let frame = s.frame_at(&p);
    let (x1, x2) = (frame[0].as_slice(), frame[1].as_slice());
    let mut worst: f64 = 0.0;
    for j in 2..=100usize {
        let jf = j as f64;
        let alpha = [2.0, 1.0 - 1.0 / jf, -1.0 - 1.0 / jf];
        let beta = [-2.0, -1.0 - 1.0 / jf, -2.0 * (1.0 + 1.0 / jf)];
        let pairs = [
            (g.apply(&alpha, &alpha), -4.0 + 4.0 / jf),
            (g.apply(&alpha, x1), -1.0 + 1.0 / jf),
            (g.apply(&alpha, x2), -2.0),
            (g.apply(&beta, &beta), -1.0 + 6.0 / jf + 3.0 / (jf * jf)),
            (g.apply(&beta, x1), 1.0 + 1.0 / jf),
            (g.apply(&beta, x2), 2.0),
        ];
        for (got, expected) in pairs {
            worst = worst.max((got - expected).abs());
        }
    }
    let mut outside = Vec::new();
    for j in 2..=8usize {
        let h = 1.0 / j as f64;
        let grid = GridSpec::new(BoxRegion::new(vec![-2.0, -1.0, -3.0], vec![2.0, 1.0, 2.0]).unwrap(), h, 2);
        let graph = build_graph(&s, &grid).expect("notgh lattice");
        let inside = match (graph.node_at(&p), graph.node_at(&q), graph.node_at(&[0.0, -h, -h])) {
            (Some(a), Some(b), Some(x)) => diamond(&graph, a, b).unwrap().contains(x),
            _ => false,
        };
        if !inside {
            outside.push(j);
        }
    }
    let limit_excluded = !s.contains(&[0.0, 0.0, 0.0]);
    Outcome {
        pass: worst <= C2_ABS_TOL && outside.is_empty() && limit_excluded,
        detail: format!(
            "max abs error {worst:.2e} (tol {C2_ABS_TOL:.0e}) over j=2..100; x_j outside diamond for j∈{outside:?} \
             (h=1/j, j=2..8); (0,0,0) excluded: {limit_excluded}"
        ),
    }
}

/// The flat(2,1) scenario shared by criteria 3 and 5.
fn product_grid() -> GridSpec {
    GridSpec::new(BoxRegion::cube(2, -2.0, 2.0), 0.05, 2)
}

fn random_pairs(graph: &CausalGraph, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let n = graph.node_count();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            out.push((a, b));
        }
    }
    out
}

/// Pure-time and pure-space lattice pairs, ten of each.
fn axis_pairs(graph: &CausalGraph, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for axis in [0usize, 1] {
        let mut found = 0;
        while found < 10 {
            let a = rng.gen_range(0..graph.node_count());
            let mut q = graph.point(a).to_vec();
            q[axis] = -2.0 + 0.05 * rng.gen_range(0..=80) as f64;
            match graph.node_at(&q) {
                Some(b) if b != a => {
                    out.push((a, b));
                    found += 1;
                }
                _ => {}
            }
        }
    }
    out
}

fn c3_product_max() -> Outcome {
    let s = flat(2, 1).unwrap();
    let graph = build_graph(&s, &product_grid()).unwrap();
    let tau = TimeFunction::canonical(1);
    let ng = NullGraph::new(&graph, &tau);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut out_of_range = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (a, b) in random_pairs(&graph, 50, &mut rng) {
        let oracle = product_oracle(euclidean_distance, graph.point(a), graph.point(b));
        let value = finite(ng.between(a, b).unwrap().value);
        let ratio = value / oracle;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        if value < oracle * (1.0 - FP_REL) || value > C3_UPPER * oracle * (1.0 + FP_REL) {
            out_of_range.push(format!("{:?}→{:?}: {value:.4} vs {oracle:.4}", graph.point(a), graph.point(b)));
        }
    }
    let mut inexact = Vec::new();
    for (a, b) in axis_pairs(&graph, &mut rng) {
        let oracle = product_oracle(euclidean_distance, graph.point(a), graph.point(b));
        let value = finite(ng.between(a, b).unwrap().value);
        if !rel_close(value, oracle) {
            inexact.push(format!("{:?}→{:?}: {value:.4} vs {oracle:.4}", graph.point(a), graph.point(b)));
        }
    }
    Outcome {
        pass: out_of_range.is_empty() && inexact.is_empty(),
        detail: format!(
            "ratio range [{lo:.6}, {hi:.6}] (need [1, {C3_UPPER}]); {} of 50 random pairs outside {:?}; \
             {} of 20 axis-aligned pairs inexact {:?}",
            out_of_range.len(),
            out_of_range,
            inexact.len(),
            inexact
        ),
    }
}

fn c4_nu2_pair() -> Outcome {
    let s = flat(3, 2).unwrap();
    let grid = GridSpec::new(BoxRegion::new(vec![-0.25, -0.25, -0.25], vec![0.25, 0.25, 1.25]).unwrap(), 0.05, 2);
    let graph = build_graph(&s, &grid).unwrap();
    let value = finite(
        NullGraph::new(&graph, &TimeFunction::canonical(2))
            .estimate(&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0])
            .unwrap()
            .value,
    );
    Outcome {
        pass: value >= C4_RANGE.0 * (1.0 - FP_REL) && value <= C4_RANGE.1,
        detail: format!("d̂_T = {value} (need [{}, {}])", C4_RANGE.0, C4_RANGE.1),
    }
}

fn c5_conformal() -> Outcome {
    let s = flat(2, 1).unwrap();
    let omega = ConformalFactor::OnePlusHalfSin { axis: 0 };
    let scaled = conformal(&s, move |p| omega.eval(p));
    let g0 = build_graph(&s, &product_grid()).unwrap();
    let g1 = build_graph(&scaled, &product_grid()).unwrap();
    let tau = TimeFunction::canonical(1);
    let (n0, n1) = (NullGraph::new(&g0, &tau), NullGraph::new(&g1, &tau));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pairs = random_pairs(&g0, 50, &mut rng);
    pairs.extend(axis_pairs(&g0, &mut rng));
    let mut differing = 0;
    for &(a, b) in &pairs {
        let (r0, r1) = (n0.between(a, b).unwrap(), n1.between(a, b).unwrap());
        let bits = match (r0.value, r1.value) {
            (Distance::Finite(x), Distance::Finite(y)) => x.to_bits() == y.to_bits(),
            (x, y) => x == y,
        };
        let bytes = serde_json::to_vec(&r0).unwrap() == serde_json::to_vec(&r1).unwrap();
        if !(bits && bytes && r0.directions == r1.directions) {
            differing += 1;
        }
    }
    let same = g0 == g1;
    Outcome {
        pass: same && differing == 0,
        detail: format!(
            "graphs identical: {same} ({} nodes, {} edges); {differing} of {} results differ",
            g0.node_count(),
            g0.edge_count(),
            pairs.len()
        ),
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Rejection-samples a future causal vector at `p`; past causal draws are negated.
fn future_causal(s: &conecalc::SpacetimeStructure, p: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v = gaussian(rng, s.dim());
        let class = classify(s, p, &v, 0.0).unwrap();
        if class.is_future_causal() {
            return v;
        }
        if class.is_past_causal() {
            return v.iter().map(|x| -x).collect();
        }
    }
}

fn c6_steepness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let combos: Vec<(usize, usize)> = (1..=5).flat_map(|n| (1..=n).map(move |nu| (n, nu))).collect();
    let structures: Vec<_> = combos.iter().map(|&(n, nu)| flat(n, nu).unwrap()).collect();
    let mut steep_bad = 0;
    let mut min_ratio = f64::INFINITY;
    for i in 0..10_000 {
        let (n, nu) = combos[i % combos.len()];
        let v = future_causal(&structures[i % combos.len()], &vec![0.0; n], &mut rng);
        let dt: f64 = v[..nu].iter().sum();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        min_ratio = min_ratio.min(2.0 * dt / norm);
        if 2.0 * dt < norm {
            steep_bad += 1;
        }
    }
    let mut temporal_bad = Vec::new();
    for eps in [0.1, 1.0] {
        let s = extend_negative(&flat(2, 1).unwrap(), eps);
        let mut bad = 0;
        for _ in 0..10_000 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = future_causal(&s, &p, &mut rng);
            if !(v[0] > 0.0) {
                bad += 1;
            }
        }
        temporal_bad.push((eps, bad));
    }
    Outcome {
        pass: steep_bad == 0 && temporal_bad.iter().all(|&(_, b)| b == 0),
        detail: format!(
            "{steep_bad} steepness violations in 10⁴ samples (min 2dT/‖v‖ = {min_ratio:.4}); \
             dt ≤ 0 counts per ε: {temporal_bad:?}"
        ),
    }
}

fn c7_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, nu) in [(2, 1), (3, 1), (3, 2), (2, 2)] {
        let s = flat(n, nu).unwrap();
        let order = FlatSpace::new(n, nu).unwrap();
        let graph = build_graph(&s, &GridSpec::new(BoxRegion::cube(n, -1.0, 1.0), 0.25, 2)).unwrap();
        let (mut reach_bad, mut box_bad) = (0usize, 0usize);
        for (a, b) in random_pairs(&graph, 1000, &mut rng) {
            let (pa, pb) = (graph.point(a), graph.point(b));
            let fut = reach(&graph, a, Direction::Future).unwrap();
            let past = reach(&graph, b, Direction::Past).unwrap();
            reach_bad += fut.iter().filter(|&x| !order.leq(pa, graph.point(x), OrderMode::Causal)).count();
            reach_bad += past.iter().filter(|&x| !order.leq(graph.point(x), pb, OrderMode::Causal)).count();
            let d = fut.intersection(&past);
            box_bad += match order.diamond_box(pa, pb) {
                Some(bx) => d.iter().filter(|&x| !bx.contains(graph.point(x))).count(),
                None => d.len(),
            };
        }
        pass &= reach_bad == 0 && box_bad == 0;
        parts.push(format!("flat({n},{nu}): {reach_bad} reach / {box_bad} box violations"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn well_conditioned(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0));
        let sv = m.clone().singular_values();
        if sv.min() > 0.0 && sv.max() / sv.min() <= C8_MAX_CONDITION {
            return m;
        }
    }
}

fn c8_interior_and_witness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut interior_bad, mut witness_bad, mut functional_bad) = (0, 0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=5);
        let nu = rng.gen_range(1..=n);
        let x = well_conditioned(&mut rng, n, nu);
        let frame: Vec<Vector> = x.column_iter().map(|c| c.into_owned()).collect();
        let origin = vec![0.0; n];
        let s = match from_frame(
            &MetricField::euclidean(n),
            TimeFrame::constant(n, frame).unwrap(),
            &[Vector::zeros(n)],
        ) {
            Ok(s) => s,
            Err(_) => {
                interior_bad += 1;
                continue;
            }
        };
        let (form, frame) = (s.form_at(&origin), s.frame_at(&origin));
        let ok = interior_vector(&s, &origin)
            .is_ok_and(|v| classify_with(&form, &frame, v.as_slice(), 0.0) == ConeClass::FutureTimelike);
        if !ok {
            interior_bad += 1;
        }
        let v = future_causal(&s, &origin, &mut rng);
        let ok = matches!(strict_witness(&s, &origin, &v, 0.0), Ok(j) if form.apply(&v, frame[j - 1].as_slice()) < 0.0);
        if !ok {
            witness_bad += 1;
        }
    }
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let basis: Vec<Vector> = well_conditioned(&mut rng, m, m).column_iter().map(|c| c.into_owned()).collect();
        let inner = SymForm::identity(m);
        let ok = positive_functional_vector(&basis, &inner)
            .is_ok_and(|v| basis.iter().all(|b| inner.apply(v.as_slice(), b.as_slice()) > 0.0));
        if !ok {
            functional_bad += 1;
        }
    }
    Outcome {
        pass: interior_bad == 0 && witness_bad == 0 && functional_bad == 0,
        detail: format!(
            "failures over 10³ each: interior vector {interior_bad}, strict witness {witness_bad}, \
             positive functional {functional_bad}"
        ),
    }
}

fn c9_torus() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, nu) in [(2, 1), (2, 2), (3, 2)] {
        let s = flat(n, nu).unwrap();
        let bounds = BoxRegion::cube(n, 0.0, 2.0);
        let torus = build_graph(&s, &GridSpec::new(bounds.clone(), 0.5, 1).torus()).unwrap();
        let cycle = find_closed_timelike(&torus);
        let closed = cycle.as_ref().is_some_and(|c| {
            (0..c.len()).all(|i| {
                let (a, b) = (c[i], c[(i + 1) % c.len()]);
                torus.out_edges(a).iter().any(|e| e.node as usize == b && e.timelike)
            })
        });
        let open = build_graph(&s, &GridSpec::new(bounds, 0.5, 1)).unwrap();
        let acyclic = find_closed_timelike(&open).is_none();
        pass &= closed && acyclic;
        parts.push(format!(
            "flat({n},{nu}): torus cycle {:?}, open box acyclic {acyclic}",
            cycle.map(|c| c.len())
        ));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn c10_determinism() -> Outcome {
    let first = serde_json::to_vec(&run_all(SEED).unwrap()).unwrap();
    let second = serde_json::to_vec(&run_all(SEED).unwrap()).unwrap();
    Outcome {
        pass: first == second,
        detail: format!("two full runs, seed {SEED}: {} bytes each, identical: {}", first.len(), first == second),
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Option<f64>, fn() -> Outcome); 10] = [
        (1, "degenerate-τ anchor", Some(1.0), c1_degenerate_tau),
        (2, "counterexample anchor", Some(10.0), c2_counterexample),
        (3, "product max formula", Some(60.0), c3_product_max),
        (4, "ν=2 exact pair", Some(60.0), c4_nu2_pair),
        (5, "conformal invariance", Some(60.0), c5_conformal),
        (6, "steepness and temporal", Some(5.0), c6_steepness),
        (7, "oracle–graph soundness", Some(30.0), c7_soundness),
        (8, "interior vector and strict witness", Some(5.0), c8_interior_and_witness),
        (9, "torus closed timelike curves", Some(5.0), c9_torus),
        (10, "determinism", None, c10_determinism),
    ];
    let mut passed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let in_time = limit.map_or(true, |l| secs < l);
        let pass = outcome.pass && in_time;
        passed += usize::from(pass);
        let limit = limit.map_or("none".to_string(), |l| format!("{l}s"));
        println!(
            "criterion {id:>2} {}: {name} — {} [{secs:.2}s, limit {limit}]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("acceptance: {passed}/10 criteria passed");
    if passed == 10 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
