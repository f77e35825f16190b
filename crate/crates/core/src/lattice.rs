//! Causal graphs on coordinate lattices.
//!
//! Nodes are the points of hℤⁿ inside a box and inside the structure's
//! domain. For every node and every stencil offset o (integer vectors with
//! Chebyshev norm ≤ r and coprime components) an edge a → a + o·h is kept
//! when the chord o·h is future causal at the segment midpoint and the
//! midpoint is in the domain. Chords are built from the integer offset, not
//! from coordinate differences, so equal offsets classify identically
//! everywhere on a constant metric.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bilinear::{SymForm, Vector};
use crate::cone::{classify_with, diagnose, ConeClass};
use crate::spacetime::{BoxRegion, SpacetimeStructure};
use crate::{Error, Result};

/// Default node-count cap for [`build_graph`].
pub const DEFAULT_MAX_NODES: usize = 2_000_000;

const SNAP_EPS: f64 = 1e-9;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub bounds: BoxRegion,
    pub h: f64,
    pub periodic: Vec<bool>,
    pub radius: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Axis {
    k_lo: i64,
    count: usize,
    periodic: bool,
}

impl GridSpec {
    pub fn new(bounds: BoxRegion, h: f64, radius: usize) -> Self {
        let periodic = vec![false; bounds.dim()];
        Self {
            bounds,
            h,
            periodic,
            radius,
        }
    }

    /// Marks every axis periodic.
    pub fn torus(mut self) -> Self {
        self.periodic = vec![true; self.bounds.dim()];
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn axes(&self) -> Result<Vec<Axis>> {
        let h = self.h;
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        if self.radius == 0 {
            return Err(Error::InvalidGrid("stencil radius must be at least 1".into()));
        }
        if self.periodic.len() != self.dim() {
            return Err(Error::InvalidGrid("periodic flags do not match the box dimension".into()));
        }
        let mut axes = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let (lo, hi) = (self.bounds.lo[i], self.bounds.hi[i]);
            if (hi - lo) / h > 1e9 {
                return Err(Error::InvalidGrid(format!("axis {i} has too many lattice points")));
            }
            let axis = if self.periodic[i] {
                let ratio = (hi - lo) / h;
                let count = ratio.round();
                let start = lo / h;
                let k_lo = start.round();
                if count < 1.0
                    || (ratio - count).abs() > SNAP_EPS * count.max(1.0)
                    || (start - k_lo).abs() > SNAP_EPS * k_lo.abs().max(1.0)
                {
                    return Err(Error::InvalidGrid(format!(
                        "periodic axis {i} needs endpoints on the lattice"
                    )));
                }
                Axis {
                    k_lo: k_lo as i64,
                    count: count as usize,
                    periodic: true,
                }
            } else {
                let k_lo = (lo / h - SNAP_EPS).ceil() as i64;
                let k_hi = (hi / h + SNAP_EPS).floor() as i64;
                if k_hi < k_lo {
                    return Err(Error::InvalidGrid(format!("axis {i} contains no lattice point")));
                }
                Axis {
                    k_lo,
                    count: (k_hi - k_lo + 1) as usize,
                    periodic: false,
                }
            };
            axes.push(axis);
        }
        Ok(axes)
    }

    /// Number of lattice points in the box, before the domain is applied.
    pub fn lattice_size(&self) -> Result<usize> {
        let axes = self.axes()?;
        axes.iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .ok_or_else(|| Error::InvalidGrid("lattice size overflows".into()))
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Integer offsets with Chebyshev norm ≤ `radius` and coprime components, in
/// lexicographic order.
pub fn stencil(dim: usize, radius: usize) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let total = side.pow(dim as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut o = vec![0i64; dim];
        for slot in o.iter_mut().rev() {
            *slot = (code % side) as i64 - r;
            code /= side;
        }
        if o.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            out.push(o);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Future,
    Past,
}

/// One directed causal step. In the outgoing lists `node` is the target; in
/// the incoming lists it is the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub node: u32,
    pub offset: u32,
    pub timelike: bool,
}

/// Options for [`build_graph_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Tolerance for the chord classification; 0 keeps the closed cone.
    pub tol: f64,
    pub max_nodes: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            tol: 0.0,
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalGraph {
    grid: GridSpec,
    dim: usize,
    axes: Vec<Axis>,
    stencil: Vec<Vec<i64>>,
    coords: Vec<f64>,
    keys: Vec<i64>,
    lookup: Vec<u32>,
    out_start: Vec<usize>,
    out_edges: Vec<Edge>,
    in_start: Vec<usize>,
    in_edges: Vec<Edge>,
}

pub fn build_graph(s: &SpacetimeStructure, grid: &GridSpec) -> Result<CausalGraph> {
    build_graph_with(s, grid, &BuildOptions::default())
}

pub fn build_graph_with(s: &SpacetimeStructure, grid: &GridSpec, opts: &BuildOptions) -> Result<CausalGraph> {
    let n = s.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let axes = grid.axes()?;
    let total = grid.lattice_size()?;
    if total > opts.max_nodes {
        return Err(Error::GridTooLarge {
            nodes: total,
            cap: opts.max_nodes,
        });
    }
    let h = grid.h;

    let mut lookup = vec![NONE; total];
    let mut coords = Vec::new();
    let mut keys = Vec::new();
    let mut k = vec![0i64; n];
    let mut point = vec![0.0; n];
    for (linear, slot) in lookup.iter_mut().enumerate() {
        let mut rest = linear;
        for i in (0..n).rev() {
            k[i] = axes[i].k_lo + (rest % axes[i].count) as i64;
            rest /= axes[i].count;
        }
        for i in 0..n {
            point[i] = k[i] as f64 * h;
        }
        if s.contains(&point) {
            *slot = (keys.len() / n) as u32;
            coords.extend_from_slice(&point);
            keys.extend_from_slice(&k);
        }
    }
    let node_count = keys.len() / n;
    if node_count == 0 {
        return Err(Error::EmptyGraph);
    }

    let offsets = stencil(n, grid.radius);
    let displacements: Vec<Vec<f64>> = offsets
        .iter()
        .map(|o| o.iter().map(|&x| x as f64 * h).collect())
        .collect();
    let constant = match (s.metric().constant_form(), s.frame().is_constant()) {
        (Some(form), true) => Some((form.clone(), s.frame_at(&vec![0.0; n]))),
        _ => None,
    };

    let per_node: Vec<Vec<Edge>> = (0..node_count)
        .into_par_iter()
        .map(|a| {
            let ka = &keys[a * n..(a + 1) * n];
            let pa = &coords[a * n..(a + 1) * n];
            let mut edges = Vec::new();
            let mut mid = vec![0.0; n];
            for (oi, o) in offsets.iter().enumerate() {
                let Some(b) = target(&axes, &lookup, ka, o) else {
                    continue;
                };
                if b as usize == a {
                    continue;
                }
                let d = &displacements[oi];
                for i in 0..n {
                    mid[i] = wrap_coord(&axes[i], pa[i] + 0.5 * d[i], h);
                }
                if !s.contains(&mid) {
                    continue;
                }
                let class = match &constant {
                    Some((form, frame)) => classify_with(form, frame, d, opts.tol),
                    None => classify_with(&s.form_at(&mid), &s.frame_at(&mid), d, opts.tol),
                };
                if class.is_future_causal() {
                    edges.push(Edge {
                        node: b,
                        offset: oi as u32,
                        timelike: class == ConeClass::FutureTimelike,
                    });
                }
            }
            edges
        })
        .collect();

    let mut out_start = Vec::with_capacity(node_count + 1);
    let mut out_edges = Vec::new();
    out_start.push(0);
    for edges in &per_node {
        out_edges.extend_from_slice(edges);
        out_start.push(out_edges.len());
    }

    let mut in_count = vec![0usize; node_count + 1];
    for e in &out_edges {
        in_count[e.node as usize + 1] += 1;
    }
    for i in 0..node_count {
        in_count[i + 1] += in_count[i];
    }
    let in_start = in_count.clone();
    let mut fill = in_count;
    let mut in_edges = vec![
        Edge {
            node: 0,
            offset: 0,
            timelike: false
        };
        out_edges.len()
    ];
    for a in 0..node_count {
        for e in &out_edges[out_start[a]..out_start[a + 1]] {
            let slot = &mut fill[e.node as usize];
            in_edges[*slot] = Edge { node: a as u32, ..*e };
            *slot += 1;
        }
    }

    Ok(CausalGraph {
        grid: grid.clone(),
        dim: n,
        axes,
        stencil: offsets,
        coords,
        keys,
        lookup,
        out_start,
        out_edges,
        in_start,
        in_edges,
    })
}

fn target(axes: &[Axis], lookup: &[u32], from: &[i64], offset: &[i64]) -> Option<u32> {
    let mut linear = 0usize;
    for (i, axis) in axes.iter().enumerate() {
        let mut rel = from[i] + offset[i] - axis.k_lo;
        let count = axis.count as i64;
        if axis.periodic {
            rel = rel.rem_euclid(count);
        } else if rel < 0 || rel >= count {
            return None;
        }
        linear = linear * axis.count + rel as usize;
    }
    match lookup[linear] {
        NONE => None,
        id => Some(id),
    }
}

fn wrap_coord(axis: &Axis, x: f64, h: f64) -> f64 {
    if !axis.periodic {
        return x;
    }
    let lo = axis.k_lo as f64 * h;
    let period = axis.count as f64 * h;
    lo + (x - lo).rem_euclid(period)
}

impl CausalGraph {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.keys.len() / self.dim
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.len()
    }

    pub fn point(&self, node: usize) -> &[f64] {
        &self.coords[node * self.dim..(node + 1) * self.dim]
    }

    /// Integer lattice coordinates of a node.
    pub fn key(&self, node: usize) -> &[i64] {
        &self.keys[node * self.dim..(node + 1) * self.dim]
    }

    pub fn stencil_offset(&self, index: u32) -> &[i64] {
        &self.stencil[index as usize]
    }

    pub fn out_edges(&self, node: usize) -> &[Edge] {
        &self.out_edges[self.out_start[node]..self.out_start[node + 1]]
    }

    pub fn in_edges(&self, node: usize) -> &[Edge] {
        &self.in_edges[self.in_start[node]..self.in_start[node + 1]]
    }

    /// All edges as (source, edge) pairs in deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        (0..self.node_count()).flat_map(move |a| self.out_edges(a).iter().map(move |e| (a, e)))
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.out_edges(from).iter().any(|e| e.node as usize == to)
    }

    fn lattice_key(&self, p: &[f64]) -> Option<Vec<i64>> {
        if p.len() != self.dim {
            return None;
        }
        let h = self.grid.h;
        p.iter()
            .map(|&x| {
                let k = (x / h).round();
                ((x / h - k).abs() <= 1e-6).then_some(k as i64)
            })
            .collect()
    }

    fn lookup_key(&self, key: &[i64]) -> Option<usize> {
        let mut linear = 0usize;
        for (axis, &k) in self.axes.iter().zip(key) {
            let mut rel = k - axis.k_lo;
            let count = axis.count as i64;
            if axis.periodic {
                rel = rel.rem_euclid(count);
            } else if rel < 0 || rel >= count {
                return None;
            }
            linear = linear * axis.count + rel as usize;
        }
        match self.lookup[linear] {
            NONE => None,
            id => Some(id as usize),
        }
    }

    /// The node sitting exactly (to 1e−6·h) on `p`.
    pub fn node_at(&self, p: &[f64]) -> Option<usize> {
        self.lattice_key(p).and_then(|k| self.lookup_key(&k))
    }

    /// Nearest node within h/2 per axis; ties go to the lexicographically
    /// smallest node.
    pub fn snap(&self, p: &[f64]) -> Option<usize> {
        if p.len() != self.dim {
            return None;
        }
        let h = self.grid.h;
        let mut best: Option<(f64, usize)> = None;
        for mask in 0u32..(1 << self.dim) {
            let key: Vec<i64> = p
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = (x / h).floor() as i64;
                    if mask & (1 << i) == 0 {
                        f
                    } else {
                        f + 1
                    }
                })
                .collect();
            let within = key
                .iter()
                .zip(p)
                .all(|(&k, &x)| (k as f64 * h - x).abs() <= 0.5 * h * (1.0 + SNAP_EPS));
            if !within {
                continue;
            }
            let Some(node) = self.lookup_key(&key) else {
                continue;
            };
            let d: f64 = key.iter().zip(p).map(|(&k, &x)| (k as f64 * h - x).powi(2)).sum();
            let better = match best {
                None => true,
                Some((bd, bn)) => d < bd || (d == bd && node < bn),
            };
            if better {
                best = Some((d, node));
            }
        }
        best.map(|(_, n)| n)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    pub fn export(&self) -> GraphExport {
        GraphExport {
            h: self.grid.h,
            radius: self.grid.radius,
            bounds: self.grid.bounds.clone(),
            nodes: (0..self.node_count()).map(|i| self.point(i).to_vec()).collect(),
            edges: self
                .edges()
                .map(|(a, e)| ExportEdge {
                    from: a,
                    to: e.node as usize,
                    timelike: e.timelike,
                })
                .collect(),
        }
    }
}

/// Adjacency dump for debugging.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphExport {
    pub h: f64,
    pub radius: usize,
    pub bounds: BoxRegion,
    pub nodes: Vec<Vec<f64>>,
    pub edges: Vec<ExportEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportEdge {
    pub from: usize,
    pub to: usize,
    pub timelike: bool,
}

/// A set of graph nodes with O(1) membership and sorted iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    mask: Vec<bool>,
    members: Vec<usize>,
}

impl NodeSet {
    fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self { mask, members }
    }

    pub fn contains(&self, node: usize) -> bool {
        self.mask.get(node).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn intersection(&self, other: &NodeSet) -> NodeSet {
        let mask = self
            .mask
            .iter()
            .zip(&other.mask)
            .map(|(a, b)| *a && *b)
            .collect();
        Self::from_mask(mask)
    }
}

/// Discrete J⁺(p) (or J⁻(p)): everything reachable along edges, p included.
pub fn reach(graph: &CausalGraph, node: usize, direction: Direction) -> Result<NodeSet> {
    graph.check_node(node)?;
    let mut mask = vec![false; graph.node_count()];
    let mut queue = VecDeque::from([node]);
    mask[node] = true;
    while let Some(a) = queue.pop_front() {
        let edges = match direction {
            Direction::Future => graph.out_edges(a),
            Direction::Past => graph.in_edges(a),
        };
        for e in edges {
            let b = e.node as usize;
            if !mask[b] {
                mask[b] = true;
                queue.push_back(b);
            }
        }
    }
    Ok(NodeSet::from_mask(mask))
}

/// Discrete causal diamond J⁺(p) ∩ J⁻(q).
pub fn diamond(graph: &CausalGraph, p: usize, q: usize) -> Result<NodeSet> {
    let future = reach(graph, p, Direction::Future)?;
    let past = reach(graph, q, Direction::Past)?;
    Ok(future.intersection(&past))
}

/// A directed cycle made of timelike edges, if one exists.
///
/// The returned nodes `[v₀, …, v_k]` satisfy vᵢ → vᵢ₊₁ and v_k → v₀.
pub fn find_closed_timelike(graph: &CausalGraph) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = graph.node_count();
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, position in its edge list)
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        mark[root] = Mark::Active;
        while let Some(&mut (a, ref mut pos)) = stack.last_mut() {
            let edges = graph.out_edges(a);
            let next = edges[*pos..].iter().position(|e| e.timelike).map(|i| *pos + i);
            match next {
                Some(i) => {
                    *pos = i + 1;
                    let b = edges[i].node as usize;
                    match mark[b] {
                        Mark::New => {
                            mark[b] = Mark::Active;
                            stack.push((b, 0));
                        }
                        Mark::Active => {
                            let start = stack.iter().position(|&(x, _)| x == b).expect("active node on stack");
                            return Some(stack[start..].iter().map(|&(x, _)| x).collect());
                        }
                        Mark::Done => {}
                    }
                }
                None => {
                    mark[a] = Mark::Done;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// A polygonal path whose segments are declared future or past directed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    vertices: Vec<Vector>,
    directions: Vec<Direction>,
}

impl PiecewisePath {
    pub fn new(vertices: Vec<Vector>, directions: Vec<Direction>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPath("path needs at least one vertex".into()));
        }
        if directions.len() + 1 != vertices.len() {
            return Err(Error::InvalidPath(format!(
                "{} vertices need {} directions, got {}",
                vertices.len(),
                vertices.len() - 1,
                directions.len()
            )));
        }
        let n = vertices[0].len();
        if let Some(bad) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidPath(format!("vertices {i} and {} coincide", i + 1)));
        }
        Ok(Self {
            vertices,
            directions,
        })
    }

    pub fn point(p: Vector) -> Self {
        Self {
            vertices: vec![p],
            directions: vec![],
        }
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn segment_count(&self) -> usize {
        self.directions.len()
    }

    /// This path followed by `other`; `other` must start where this one ends.
    pub fn concat(&self, other: &PiecewisePath) -> Result<Self> {
        let last = self.vertices.last().expect("nonempty path");
        if other.vertices[0] != *last {
            return Err(Error::InvalidPath("paths do not join".into()));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend(other.vertices[1..].iter().cloned());
        let mut directions = self.directions.clone();
        directions.extend_from_slice(&other.directions);
        Self::new(vertices, directions)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSample {
    pub point: Vec<f64>,
    pub in_domain: bool,
    pub class: Option<ConeClass>,
    pub norm_sq: f64,
    pub frame_products: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentCheck {
    pub index: usize,
    pub declared: Direction,
    pub samples: Vec<SegmentSample>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub segments: Vec<SegmentCheck>,
    pub pass: bool,
}

/// Checks every segment chord against its declared direction at
/// `samples_per_segment` interior points (at least one).
pub fn validate_path(s: &SpacetimeStructure, path: &PiecewisePath, samples_per_segment: usize, tol: f64) -> PathReport {
    let count = samples_per_segment.max(1);
    let segments: Vec<SegmentCheck> = path
        .vertices
        .windows(2)
        .zip(&path.directions)
        .enumerate()
        .map(|(index, (w, &declared))| {
            let chord = &w[1] - &w[0];
            let samples: Vec<SegmentSample> = (1..=count)
                .map(|k| {
                    let t = k as f64 / (count + 1) as f64;
                    let point = &w[0] + &chord * t;
                    match diagnose(s, point.as_slice(), chord.as_slice(), tol) {
                        Ok(d) => SegmentSample {
                            point: point.as_slice().to_vec(),
                            in_domain: true,
                            class: Some(d.class),
                            norm_sq: d.norm_sq,
                            frame_products: d.frame_products,
                        },
                        Err(_) => SegmentSample {
                            point: point.as_slice().to_vec(),
                            in_domain: false,
                            class: None,
                            norm_sq: f64::NAN,
                            frame_products: vec![],
                        },
                    }
                })
                .collect();
            let pass = samples.iter().all(|smp| match (smp.class, declared) {
                (Some(c), Direction::Future) => c.is_future_causal(),
                (Some(c), Direction::Past) => c.is_past_causal(),
                (None, _) => false,
            });
            SegmentCheck {
                index,
                declared,
                samples,
                pass,
            }
        })
        .collect();
    let pass = segments.iter().all(|c| c.pass);
    PathReport { segments, pass }
}

/// Form and frame at a point, for callers that classify many chords there.
pub fn local_cone(s: &SpacetimeStructure, p: &[f64]) -> (SymForm, Vec<Vector>) {
    (s.form_at(p), s.frame_at(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::{flat, StructureDesc};
    use nalgebra::dvector;

    fn minkowski_unit() -> CausalGraph {
        let grid = GridSpec::new(BoxRegion::cube(2, -1.0, 1.0), 1.0, 1);
        build_graph(&flat(2, 1).unwrap(), &grid).unwrap()
    }

    #[test]
    fn stencil_is_coprime_and_ordered() {
        let s = stencil(2, 1);
        assert_eq!(s.len(), 8);
        assert_eq!(s[0], vec![-1, -1]);
        let s2 = stencil(2, 2);
        assert_eq!(s2.len(), 16);
        assert!(!s2.contains(&vec![2, 0]) && !s2.contains(&vec![2, 2]));
        assert!(s2.contains(&vec![2, 1]));
        assert_eq!(stencil(3, 2).len(), 98);
    }

    #[test]
    fn origin_edges_in_minkowski() {
        let g = minkowski_unit();
        let o = g.node_at(&[0.0, 0.0]).unwrap();
        let targets: Vec<Vec<f64>> = g.out_edges(o).iter().map(|e| g.point(e.node as usize).to_vec()).collect();
        assert_eq!(targets, vec![vec![1.0, -1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let up = g.node_at(&[1.0, 0.0]).unwrap();
        assert!(g.out_edges(o).iter().any(|e| e.node as usize == up && e.timelike));
        assert!(!g.has_edge(o, g.node_at(&[0.0, 1.0]).unwrap()));
    }

    #[test]
    fn excluded_nodes_are_absent() {
        let base = StructureDesc::ExcludeFuture {
            base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
            apex: vec![0.0, 0.0],
        }
        .build()
        .unwrap();
        let grid = GridSpec::new(BoxRegion::cube(2, -2.0, 2.0), 1.0, 1);
        let g = build_graph(&base, &grid).unwrap();
        assert!(g.node_at(&[1.0, 0.0]).is_none());
        assert!(g.node_at(&[0.0, 0.0]).is_none());
        assert!(g.node_at(&[-1.0, 0.0]).is_some());
    }

    #[test]
    fn empty_and_oversized_grids() {
        let s = flat(2, 1).unwrap().restricted(|_| false);
        let grid = GridSpec::new(BoxRegion::cube(2, -1.0, 1.0), 1.0, 1);
        assert_eq!(build_graph(&s, &grid).unwrap_err(), Error::EmptyGraph);

        let big = GridSpec::new(BoxRegion::cube(2, -1.0, 1.0), 0.01, 1);
        let err = build_graph_with(&flat(2, 1).unwrap(), &big, &BuildOptions { tol: 0.0, max_nodes: 100 }).unwrap_err();
        assert_eq!(err, Error::GridTooLarge { nodes: 201 * 201, cap: 100 });

        let bad = GridSpec::new(BoxRegion::cube(2, 0.0, 4.5), 1.0, 1).torus();
        assert!(matches!(build_graph(&flat(2, 1).unwrap(), &bad), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn reach_in_small_box() {
        let grid = GridSpec::new(BoxRegion::cube(2, 0.0, 2.0), 1.0, 1);
        let g = build_graph(&flat(2, 1).unwrap(), &grid).unwrap();
        let o = g.node_at(&[0.0, 0.0]).unwrap();
        let fut = reach(&g, o, Direction::Future).unwrap();
        let pts: Vec<Vec<f64>> = fut.iter().map(|i| g.point(i).to_vec()).collect();
        assert_eq!(
            pts,
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![2.0, 2.0]]
        );
        assert!(reach(&g, 99, Direction::Future).is_err());
    }

    #[test]
    fn isolated_node_reaches_itself() {
        let s = flat(2, 1).unwrap().restricted(|p| p[0] == 0.0 && p[1] == 0.0 || p[1] > 0.5);
        let grid = GridSpec::new(BoxRegion::cube(2, -1.0, 1.0), 1.0, 1);
        let g = build_graph(&s, &grid).unwrap();
        let o = g.node_at(&[0.0, 0.0]).unwrap();
        assert_eq!(reach(&g, o, Direction::Future).unwrap().as_slice(), &[o]);
    }

    #[test]
    fn diamond_examples() {
        let grid = GridSpec::new(BoxRegion::new(vec![0.0, -2.0], vec![2.0, 2.0]).unwrap(), 1.0, 1);
        let g = build_graph(&flat(2, 1).unwrap(), &grid).unwrap();
        let p = g.node_at(&[0.0, 0.0]).unwrap();
        let q = g.node_at(&[2.0, 0.0]).unwrap();
        let d = diamond(&g, p, q).unwrap();
        let pts: Vec<Vec<f64>> = d.iter().map(|i| g.point(i).to_vec()).collect();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, -1.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]]);
        assert_eq!(diamond(&g, p, p).unwrap().as_slice(), &[p]);
        let spacelike = g.node_at(&[0.0, 1.0]).unwrap();
        assert!(diamond(&g, p, spacelike).unwrap().is_empty());
    }

    #[test]
    fn torus_has_closed_timelike_curves() {
        let torus = GridSpec::new(BoxRegion::cube(2, 0.0, 4.0), 1.0, 1).torus();
        let g = build_graph(&flat(2, 1).unwrap(), &torus).unwrap();
        let cycle = find_closed_timelike(&g).expect("cycle on the torus");
        for w in 0..cycle.len() {
            let (a, b) = (cycle[w], cycle[(w + 1) % cycle.len()]);
            assert!(g.out_edges(a).iter().any(|e| e.node as usize == b && e.timelike));
        }
        let all = reach(&g, 0, Direction::Future).unwrap();
        assert_eq!(all.len(), g.node_count());

        let open = GridSpec::new(BoxRegion::cube(2, 0.0, 4.0), 1.0, 1);
        assert!(find_closed_timelike(&build_graph(&flat(2, 1).unwrap(), &open).unwrap()).is_none());

        let g22 = build_graph(&flat(2, 2).unwrap(), &torus).unwrap();
        assert!(find_closed_timelike(&g22).is_some());
    }

    #[test]
    fn snapping_prefers_nearest_then_lexicographic() {
        let g = minkowski_unit();
        assert_eq!(g.snap(&[0.2, -0.1]), g.node_at(&[0.0, 0.0]));
        assert_eq!(g.snap(&[0.5, 0.5]), g.node_at(&[0.0, 0.0]));
        assert_eq!(g.snap(&[0.5, 0.6]), g.node_at(&[0.0, 1.0]));
        assert_eq!(g.snap(&[3.0, 0.0]), None);
    }

    #[test]
    fn zigzag_is_piecewise_causal() {
        let path = PiecewisePath::new(
            vec![dvector![0.0, 0.0], dvector![0.5, 0.5], dvector![0.0, 1.0]],
            vec![Direction::Future, Direction::Past],
        )
        .unwrap();
        let report = validate_path(&flat(2, 1).unwrap(), &path, 4, 0.0);
        assert!(report.pass);
        assert!(report.segments.iter().all(|s| s.samples.iter().all(|x| x.norm_sq == 0.0)));

        let wrong = PiecewisePath::new(
            vec![dvector![0.0, 0.0], dvector![0.5, 0.5]],
            vec![Direction::Past],
        )
        .unwrap();
        assert!(!validate_path(&flat(2, 1).unwrap(), &wrong, 1, 0.0).pass);
    }

    #[test]
    fn path_construction_errors() {
        assert!(PiecewisePath::new(vec![], vec![]).is_err());
        assert!(PiecewisePath::new(vec![dvector![0.0], dvector![0.0]], vec![Direction::Future]).is_err());
        assert!(PiecewisePath::new(vec![dvector![0.0], dvector![1.0]], vec![]).is_err());
    }
}
