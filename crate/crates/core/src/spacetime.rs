//! Construction and validation of (n−ν,ν)-spacetime structures.
//!
//! Metric fields and frames are closures over coordinate points and compose
//! lazily. Fields that do not depend on the point are stored as constants,
//! which lets the lattice builder evaluate them once.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bilinear::{gram_schmidt, signature, Signature, SymForm, Vector};
use crate::flatspace::{FlatSpace, OrderMode};
use crate::{Error, Result};

/// Tolerance used for signature and frame checks on composed fields.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

pub type PointFn<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// Axis-aligned coordinate box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::InvalidGrid("box has lo > hi on some axis".into()));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; n],
            hi: vec![hi; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// True if some axis has zero width.
    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(a, b)| a >= b)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(a, b)| if a < b { rng.gen_range(*a..*b) } else { *a }),
        )
    }

    /// `count` uniform points drawn from a seeded generator.
    pub fn uniform_points(&self, count: usize, seed: u64) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Flat,
    Riemannian,
    FrameDerived,
    ProductNeg,
    ProductPos,
    Warped,
    ConformalScaled,
    Custom,
}

#[derive(Clone)]
enum FormSource {
    Constant(SymForm),
    Field(PointFn<SymForm>),
}

/// A symmetric 2-tensor field of fixed dimension and index.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    index: usize,
    kind: MetricKind,
    source: FormSource,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("index", &self.index)
            .field("kind", &self.kind)
            .field("constant", &self.is_constant())
            .finish()
    }
}

impl MetricField {
    /// A point-independent metric; the index is read off the form.
    pub fn constant(kind: MetricKind, form: SymForm) -> Self {
        let index = signature(&form, VALIDATION_TOL).negative;
        Self {
            dim: form.dim(),
            index,
            kind,
            source: FormSource::Constant(form),
        }
    }

    pub fn from_fn(
        dim: usize,
        index: usize,
        kind: MetricKind,
        f: impl Fn(&[f64]) -> SymForm + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            index,
            kind,
            source: FormSource::Field(Arc::new(f)),
        }
    }

    /// The Euclidean metric on ℝᵐ.
    pub fn euclidean(m: usize) -> Self {
        Self::constant(MetricKind::Riemannian, SymForm::identity(m))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.source, FormSource::Constant(_))
    }

    pub fn constant_form(&self) -> Option<&SymForm> {
        match &self.source {
            FormSource::Constant(form) => Some(form),
            FormSource::Field(_) => None,
        }
    }

    pub fn form_at(&self, p: &[f64]) -> SymForm {
        match &self.source {
            FormSource::Constant(form) => form.clone(),
            FormSource::Field(f) => f(p),
        }
    }
}

#[derive(Clone)]
enum FieldSource {
    Constant(Vector),
    Field(PointFn<Vector>),
}

impl FieldSource {
    fn at(&self, p: &[f64]) -> Vector {
        match self {
            FieldSource::Constant(v) => v.clone(),
            FieldSource::Field(f) => f(p),
        }
    }
}

/// An ordered list of ν vector fields orienting time.
#[derive(Clone)]
pub struct TimeFrame {
    dim: usize,
    fields: Vec<FieldSource>,
}

impl fmt::Debug for TimeFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFrame")
            .field("dim", &self.dim)
            .field("len", &self.fields.len())
            .field("constant", &self.is_constant())
            .finish()
    }
}

impl TimeFrame {
    pub fn constant(dim: usize, vectors: Vec<Vector>) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Self {
            dim,
            fields: vectors.into_iter().map(FieldSource::Constant).collect(),
        })
    }

    /// The first `nu` coordinate fields E₁..E_ν.
    pub fn coordinate(dim: usize, nu: usize) -> Self {
        let fields = (0..nu)
            .map(|i| {
                let mut e = Vector::zeros(dim);
                e[i] = 1.0;
                FieldSource::Constant(e)
            })
            .collect();
        Self { dim, fields }
    }

    pub fn from_fns(dim: usize, fields: Vec<PointFn<Vector>>) -> Self {
        Self {
            dim,
            fields: fields.into_iter().map(FieldSource::Field).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.fields
            .iter()
            .all(|f| matches!(f, FieldSource::Constant(_)))
    }

    pub fn at(&self, p: &[f64]) -> Vec<Vector> {
        self.fields.iter().map(|f| f.at(p)).collect()
    }

    pub fn field_at(&self, i: usize, p: &[f64]) -> Vector {
        self.fields[i].at(p)
    }

    /// Lifts every field to ℝ×M by prepending a zero component.
    fn lifted(&self) -> Vec<FieldSource> {
        self.fields
            .iter()
            .map(|f| match f {
                FieldSource::Constant(v) => FieldSource::Constant(prepend(0.0, v)),
                FieldSource::Field(g) => {
                    let g = g.clone();
                    FieldSource::Field(Arc::new(move |p: &[f64]| prepend(0.0, &g(&p[1..]))))
                }
            })
            .collect()
    }

    /// Extends every field to M×Σ by appending `extra` zero components.
    fn padded(&self, extra: usize) -> Vec<FieldSource> {
        let n = self.dim;
        self.fields
            .iter()
            .map(|f| match f {
                FieldSource::Constant(v) => FieldSource::Constant(append_zeros(v, extra)),
                FieldSource::Field(g) => {
                    let g = g.clone();
                    FieldSource::Field(Arc::new(move |p: &[f64]| append_zeros(&g(&p[..n]), extra)))
                }
            })
            .collect()
    }
}

fn prepend(x: f64, v: &Vector) -> Vector {
    Vector::from_iterator(v.len() + 1, std::iter::once(x).chain(v.iter().copied()))
}

fn append_zeros(v: &Vector, extra: usize) -> Vector {
    Vector::from_iterator(
        v.len() + extra,
        v.iter().copied().chain(std::iter::repeat(0.0).take(extra)),
    )
}

/// Membership predicate for the coordinate domain. Defaults to everything.
#[derive(Clone, Default)]
pub struct Domain(Option<PointFn<bool>>);

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => f.write_str("Domain(full)"),
            Some(_) => f.write_str("Domain(predicate)"),
        }
    }
}

impl Domain {
    pub fn full() -> Self {
        Self(None)
    }

    pub fn from_fn(f: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        Self(Some(Arc::new(f)))
    }

    pub fn is_full(&self) -> bool {
        self.0.is_none()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.0.as_ref().map_or(true, |f| f(p))
    }

    /// Points of ℝ×M whose M-part lies in this domain.
    fn lifted(&self) -> Self {
        match &self.0 {
            None => Self(None),
            Some(f) => {
                let f = f.clone();
                Self(Some(Arc::new(move |p: &[f64]| f(&p[1..]))))
            }
        }
    }

    /// Points of M×Σ whose M-part lies in this domain.
    fn truncated(&self, n: usize) -> Self {
        match &self.0 {
            None => Self(None),
            Some(f) => {
                let f = f.clone();
                Self(Some(Arc::new(move |p: &[f64]| f(&p[..n]))))
            }
        }
    }

    /// Intersection with another predicate.
    pub fn and(&self, g: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        match &self.0 {
            None => Self::from_fn(g),
            Some(f) => {
                let f = f.clone();
                Self::from_fn(move |p| f(p) && g(p))
            }
        }
    }
}

/// Metric, time frame and domain: the object every query runs against.
#[derive(Clone, Debug)]
pub struct SpacetimeStructure {
    metric: MetricField,
    frame: TimeFrame,
    domain: Domain,
}

impl SpacetimeStructure {
    pub fn new(metric: MetricField, frame: TimeFrame, domain: Domain) -> Result<Self> {
        if frame.dim() != metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: metric.dim(),
                found: frame.dim(),
            });
        }
        if frame.len() != metric.index() {
            return Err(Error::InvalidIndex {
                n: metric.dim(),
                nu: frame.len(),
            });
        }
        Ok(Self {
            metric,
            frame,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn index(&self) -> usize {
        self.metric.index()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn frame(&self) -> &TimeFrame {
        &self.frame
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.domain.contains(p)
    }

    pub fn form_at(&self, p: &[f64]) -> SymForm {
        self.metric.form_at(p)
    }

    pub fn frame_at(&self, p: &[f64]) -> Vec<Vector> {
        self.frame.at(p)
    }

    /// Same metric and domain, different frame of the same length.
    pub fn with_frame(self, frame: TimeFrame) -> Result<Self> {
        Self::new(self.metric, frame, self.domain)
    }

    /// Restricts the domain by an additional predicate.
    pub fn restricted(self, keep: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        let domain = self.domain.and(keep);
        Self { domain, ..self }
    }
}

/// ℝ^(n−ν,ν): metric diag(−1 × ν, +1 × (n−ν)) with frame E₁..E_ν.
pub fn flat(n: usize, nu: usize) -> Result<SpacetimeStructure> {
    if nu == 0 || nu > n || n > MAX_DIM {
        return Err(Error::InvalidIndex { n, nu });
    }
    let diag: Vec<f64> = (0..n).map(|i| if i < nu { -1.0 } else { 1.0 }).collect();
    let metric = MetricField::constant(MetricKind::Flat, SymForm::diagonal(&diag));
    SpacetimeStructure::new(metric, TimeFrame::coordinate(n, nu), Domain::full())
}

fn frame_matrix(vectors: &[Vector]) -> DMatrix<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i])
}

/// g = h − 2·h(P·,P·) with P the h-orthogonal projection onto span(X).
/// `None` when the frame is degenerate for h.
fn reflect_along_frame(h: &SymForm, frame: &[Vector]) -> Option<SymForm> {
    let x = frame_matrix(frame);
    let hm = h.entries();
    let hx = hm * &x;
    let gram = x.transpose() * &hx;
    let chol = Cholesky::new(gram)?;
    let correction = &hx * chol.solve(&hx.transpose());
    Some(SymForm::symmetrized(hm - correction * 2.0))
}

fn frame_is_independent(frame: &[Vector]) -> bool {
    match frame.first() {
        None => true,
        Some(v) => gram_schmidt(frame, &SymForm::identity(v.len())).is_ok(),
    }
}

fn check_positive_definite(form: &SymForm, p: &[f64]) -> Result<()> {
    let sig = signature(form, VALIDATION_TOL);
    if sig.positive != form.dim() {
        return Err(Error::NotPositiveDefinite { point: p.to_vec() });
    }
    Ok(())
}

/// Builds the index-ν metric that makes the frame timelike out of a
/// Riemannian metric `h`: g(v,w) = h(v,w) − 2·h(Pv,Pw).
///
/// `h` and the frame are checked at every probe point.
pub fn metric_from_frame(h: &MetricField, frame: &TimeFrame, probes: &[Vector]) -> Result<MetricField> {
    if h.dim() != frame.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: frame.dim(),
        });
    }
    let nu = frame.len();
    if nu == 0 || nu > h.dim() {
        return Err(Error::InvalidIndex { n: h.dim(), nu });
    }
    for p in probes {
        let p = p.as_slice();
        let hp = h.form_at(p);
        check_positive_definite(&hp, p)?;
        let xs = frame.at(p);
        if !frame_is_independent(&xs) || reflect_along_frame(&hp, &xs).is_none() {
            return Err(Error::FrameDependence { point: p.to_vec() });
        }
    }
    if let (Some(hc), true) = (h.constant_form(), frame.is_constant()) {
        let xs = frame.at(&vec![0.0; h.dim()]);
        let g = reflect_along_frame(hc, &xs).ok_or_else(|| Error::FrameDependence {
            point: vec![0.0; h.dim()],
        })?;
        let mut metric = MetricField::constant(MetricKind::FrameDerived, g);
        metric.index = nu;
        return Ok(metric);
    }
    let (h, frame) = (h.clone(), frame.clone());
    Ok(MetricField::from_fn(h.dim(), nu, MetricKind::FrameDerived, move |p| {
        let hp = h.form_at(p);
        // A degenerate frame leaves h untouched; validate() flags the wrong signature.
        reflect_along_frame(&hp, &frame.at(p)).unwrap_or(hp)
    }))
}

/// Spacetime whose metric is derived from `h` and the frame itself.
pub fn from_frame(h: &MetricField, frame: TimeFrame, probes: &[Vector]) -> Result<SpacetimeStructure> {
    let metric = metric_from_frame(h, &frame, probes)?;
    SpacetimeStructure::new(metric, frame, Domain::full())
}

/// M′ = ℝ×M with metric −dt² ⊕ g and frame (X₁,…,X_ν, ∂_t − ε·ΣXᵢ).
///
/// The new coordinate is prepended.
pub fn extend_negative(s: &SpacetimeStructure, eps: f64) -> SpacetimeStructure {
    let n = s.dim();
    let minus = SymForm::diagonal(&[-1.0]);
    let metric = match s.metric.constant_form() {
        Some(g) => {
            let mut m = MetricField::constant(MetricKind::ProductNeg, minus.direct_sum(g));
            m.index = s.index() + 1;
            m
        }
        None => {
            let base = s.metric.clone();
            MetricField::from_fn(n + 1, s.index() + 1, MetricKind::ProductNeg, move |p| {
                minus.direct_sum(&base.form_at(&p[1..]))
            })
        }
    };

    let mut fields = s.frame.lifted();
    let time_field = if s.frame.is_constant() {
        let sum = s
            .frame
            .at(&vec![0.0; n])
            .into_iter()
            .fold(Vector::zeros(n), |acc, x| acc + x);
        FieldSource::Constant(prepend(1.0, &(sum * -eps)))
    } else {
        let frame = s.frame.clone();
        FieldSource::Field(Arc::new(move |p: &[f64]| {
            let sum = frame
                .at(&p[1..])
                .into_iter()
                .fold(Vector::zeros(n), |acc, x| acc + x);
            prepend(1.0, &(sum * -eps))
        }))
    };
    fields.push(time_field);
    SpacetimeStructure {
        metric,
        frame: TimeFrame { dim: n + 1, fields },
        domain: s.domain.lifted(),
    }
}

/// M″ = ℝ×M with metric dt² ⊕ g and the lifted frame.
pub fn extend_positive(s: &SpacetimeStructure) -> SpacetimeStructure {
    let n = s.dim();
    let plus = SymForm::diagonal(&[1.0]);
    let metric = match s.metric.constant_form() {
        Some(g) => {
            let mut m = MetricField::constant(MetricKind::ProductPos, plus.direct_sum(g));
            m.index = s.index();
            m
        }
        None => {
            let base = s.metric.clone();
            MetricField::from_fn(n + 1, s.index(), MetricKind::ProductPos, move |p| {
                plus.direct_sum(&base.form_at(&p[1..]))
            })
        }
    };
    SpacetimeStructure {
        metric,
        frame: TimeFrame {
            dim: n + 1,
            fields: s.frame.lifted(),
        },
        domain: s.domain.lifted(),
    }
}

/// Warped product M ×_f Σ with metric g ⊕ f²σ. Coordinates of M come first.
pub fn warped_product(
    s: &SpacetimeStructure,
    sigma: &MetricField,
    warp: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    probes: &[Vector],
) -> Result<SpacetimeStructure> {
    let n = s.dim();
    let m = sigma.dim();
    if sigma.index() != 0 {
        return Err(Error::NotPositiveDefinite { point: vec![] });
    }
    for p in probes {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        let value = warp(p.as_slice());
        if !(value > 0.0) {
            return Err(Error::NonPositiveWarp {
                point: p.as_slice().to_vec(),
                value,
            });
        }
    }
    let (base, fiber) = (s.metric.clone(), sigma.clone());
    let metric = MetricField::from_fn(n + m, s.index(), MetricKind::Warped, move |p| {
        let f = warp(&p[..n]);
        base.form_at(&p[..n])
            .direct_sum(&fiber.form_at(&p[n..]).scaled(f * f))
    });
    Ok(SpacetimeStructure {
        metric,
        frame: TimeFrame {
            dim: n + m,
            fields: s.frame.padded(m),
        },
        domain: s.domain.truncated(n),
    })
}

/// Conformal rescaling g ↦ Ω²g; the frame and domain are kept.
pub fn conformal(s: &SpacetimeStructure, omega: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> SpacetimeStructure {
    let base = s.metric.clone();
    let metric = MetricField::from_fn(s.dim(), s.index(), MetricKind::ConformalScaled, move |p| {
        let w = omega(p);
        base.form_at(p).scaled(w * w)
    });
    SpacetimeStructure {
        metric,
        frame: s.frame.clone(),
        domain: s.domain.clone(),
    }
}

/// Per-probe outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCheck {
    pub point: Vec<f64>,
    pub in_domain: bool,
    pub signature: Signature,
    pub signature_ok: bool,
    /// g(Xᵢ, Xᵢ) for every frame field.
    pub frame_norms: Vec<f64>,
    pub frame_negative: bool,
    pub frame_independent: bool,
}

impl ProbeCheck {
    pub fn pass(&self) -> bool {
        self.in_domain && self.signature_ok && self.frame_negative && self.frame_independent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub probes: Vec<ProbeCheck>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &ProbeCheck> {
        self.probes.iter().filter(|c| !c.pass())
    }
}

/// Samples the defining conditions of a spacetime structure at probe points:
/// signature (n−ν, ν, 0), g(Xᵢ,Xᵢ) < 0, and frame independence.
pub fn validate(s: &SpacetimeStructure, probes: &[Vector], tol: f64) -> ValidationReport {
    let n = s.dim();
    let nu = s.index();
    let checks: Vec<ProbeCheck> = probes
        .iter()
        .map(|p| {
            let p = p.as_slice();
            let in_domain = s.contains(p);
            let form = s.form_at(p);
            let sig = signature(&form, tol);
            let xs = s.frame_at(p);
            let frame_norms: Vec<f64> = xs
                .iter()
                .map(|x| form.apply(x.as_slice(), x.as_slice()))
                .collect();
            ProbeCheck {
                point: p.to_vec(),
                in_domain,
                signature: sig,
                signature_ok: sig.positive == n - nu && sig.negative == nu && sig.zero == 0,
                frame_negative: frame_norms.iter().all(|&q| q < -tol),
                frame_norms,
                frame_independent: xs.len() == nu && frame_is_independent(&xs),
            }
        })
        .collect();
    let pass = !checks.is_empty() && checks.iter().all(ProbeCheck::pass);
    ValidationReport {
        probes: checks,
        pass,
    }
}

/// Conformal factors available in serialized descriptions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConformalFactor {
    /// Ω(p) = value.
    Constant { value: f64 },
    /// Ω(p) = 1 + ½·sin(p[axis]).
    OnePlusHalfSin { axis: usize },
}

impl ConformalFactor {
    pub fn eval(&self, p: &[f64]) -> f64 {
        match *self {
            ConformalFactor::Constant { value } => value,
            ConformalFactor::OnePlusHalfSin { axis } => 1.0 + 0.5 * p[axis].sin(),
        }
    }
}

/// Serializable description of a structure: a kind tag plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StructureDesc {
    Flat {
        n: usize,
        nu: usize,
    },
    /// Euclidean h with a constant frame; the metric comes from the frame.
    FrameDerived {
        frame: Vec<Vec<f64>>,
    },
    ExtendNegative {
        base: Box<StructureDesc>,
        eps: f64,
    },
    ExtendPositive {
        base: Box<StructureDesc>,
    },
    /// Warped product with a Euclidean fiber and a constant warp factor.
    Warped {
        base: Box<StructureDesc>,
        fiber_dim: usize,
        warp: f64,
    },
    Conformal {
        base: Box<StructureDesc>,
        omega: ConformalFactor,
    },
    /// Removes the points whose listed coordinates all vanish.
    Punctured {
        base: Box<StructureDesc>,
        axes: Vec<usize>,
    },
    /// Removes the flat causal future of `apex` (order of the base's index).
    ExcludeFuture {
        base: Box<StructureDesc>,
        apex: Vec<f64>,
    },
    /// Replaces the frame by constant vectors; may yield invalid structures.
    WithFrame {
        base: Box<StructureDesc>,
        frame: Vec<Vec<f64>>,
    },
}

impl StructureDesc {
    pub fn build(&self) -> Result<SpacetimeStructure> {
        match self {
            StructureDesc::Flat { n, nu } => flat(*n, *nu),
            StructureDesc::FrameDerived { frame } => {
                let n = frame.first().map_or(0, Vec::len);
                let frame = TimeFrame::constant(n, frame.iter().map(|v| Vector::from_vec(v.clone())).collect())?;
                from_frame(&MetricField::euclidean(n), frame, &[Vector::zeros(n)])
            }
            StructureDesc::ExtendNegative { base, eps } => Ok(extend_negative(&base.build()?, *eps)),
            StructureDesc::ExtendPositive { base } => Ok(extend_positive(&base.build()?)),
            StructureDesc::Warped {
                base,
                fiber_dim,
                warp,
            } => {
                let b = base.build()?;
                let w = *warp;
                warped_product(&b, &MetricField::euclidean(*fiber_dim), move |_| w, &[Vector::zeros(b.dim())])
            }
            StructureDesc::Conformal { base, omega } => {
                let omega = omega.clone();
                Ok(conformal(&base.build()?, move |p| omega.eval(p)))
            }
            StructureDesc::Punctured { base, axes } => {
                let b = base.build()?;
                if let Some(&bad) = axes.iter().find(|&&a| a >= b.dim()) {
                    return Err(Error::DimensionMismatch {
                        expected: b.dim(),
                        found: bad + 1,
                    });
                }
                let axes = axes.clone();
                Ok(b.restricted(move |p| axes.iter().any(|&a| p[a] != 0.0)))
            }
            StructureDesc::ExcludeFuture { base, apex } => {
                let b = base.build()?;
                if apex.len() != b.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: b.dim(),
                        found: apex.len(),
                    });
                }
                let order = FlatSpace::new(b.dim(), b.index())?;
                let apex = apex.clone();
                Ok(b.restricted(move |p| !order.leq(&apex, p, OrderMode::Causal)))
            }
            StructureDesc::WithFrame { base, frame } => {
                let b = base.build()?;
                let frame = TimeFrame::constant(b.dim(), frame.iter().map(|v| Vector::from_vec(v.clone())).collect())?;
                b.with_frame(frame)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn probes(n: usize) -> Vec<Vector> {
        BoxRegion::cube(n, -3.0, 3.0).uniform_points(100, 7)
    }

    fn form_eq(a: &SymForm, rows: &[&[f64]], tol: f64) -> bool {
        let b = SymForm::from_rows(rows).unwrap();
        (a.entries() - b.entries()).amax() <= tol
    }

    #[test]
    fn flat_examples() {
        let s = flat(2, 1).unwrap();
        assert_eq!(s.form_at(&[0.3, 0.1]), SymForm::diagonal(&[-1.0, 1.0]));
        assert_eq!(s.frame_at(&[0.0, 0.0]), vec![dvector![1.0, 0.0]]);

        let s = flat(3, 2).unwrap();
        assert_eq!(s.form_at(&[0.0; 3]), SymForm::diagonal(&[-1.0, -1.0, 1.0]));
        assert_eq!(s.frame_at(&[0.0; 3]), vec![dvector![1.0, 0.0, 0.0], dvector![0.0, 1.0, 0.0]]);

        let s = flat(2, 2).unwrap();
        assert_eq!(s.form_at(&[0.0; 2]), SymForm::diagonal(&[-1.0, -1.0]));
        assert_eq!(s.frame().len(), 2);
    }

    #[test]
    fn flat_rejects_invalid_index() {
        assert_eq!(flat(2, 0).unwrap_err(), Error::InvalidIndex { n: 2, nu: 0 });
        assert_eq!(flat(2, 3).unwrap_err(), Error::InvalidIndex { n: 2, nu: 3 });
        assert!(flat(17, 1).is_err());
    }

    #[test]
    fn metric_from_frame_examples() {
        let origin = [dvector![0.0, 0.0]];
        let frame = TimeFrame::constant(2, vec![dvector![1.0, 0.0]]).unwrap();
        let g = metric_from_frame(&MetricField::euclidean(2), &frame, &origin).unwrap();
        assert!(form_eq(&g.form_at(&[0.0, 0.0]), &[&[-1.0, 0.0], &[0.0, 1.0]], 1e-15));

        let frame = TimeFrame::constant(2, vec![dvector![1.0, 1.0]]).unwrap();
        let g = metric_from_frame(&MetricField::euclidean(2), &frame, &origin).unwrap();
        let form = g.form_at(&[0.0, 0.0]);
        assert!(form_eq(&form, &[&[0.0, -1.0], &[-1.0, 0.0]], 1e-15));
        assert!((form.apply(&[1.0, 1.0], &[1.0, 1.0]) + 2.0).abs() < 1e-15);
        assert_eq!(g.index(), 1);

        let frame = TimeFrame::coordinate(3, 2);
        let g = metric_from_frame(&MetricField::euclidean(3), &frame, &[Vector::zeros(3)]).unwrap();
        assert!(form_eq(
            &g.form_at(&[0.0; 3]),
            &[&[-1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0]],
            1e-15
        ));
    }

    #[test]
    fn metric_from_frame_reports_dependent_point() {
        let frame = TimeFrame::from_fns(
            2,
            vec![
                Arc::new(|_: &[f64]| dvector![1.0, 0.0]),
                Arc::new(|p: &[f64]| dvector![p[0], 1.0 - p[0]]),
            ],
        );
        let probes = [dvector![0.0, 0.0], dvector![1.0, 0.0]];
        let err = metric_from_frame(&MetricField::euclidean(2), &frame, &probes).unwrap_err();
        assert_eq!(err, Error::FrameDependence { point: vec![1.0, 0.0] });
    }

    #[test]
    fn metric_from_frame_variable_fields() {
        let frame = TimeFrame::from_fns(2, vec![Arc::new(|p: &[f64]| dvector![1.0, 0.5 * p[0].sin()])]);
        let s = from_frame(&MetricField::euclidean(2), frame, &probes(2)).unwrap();
        assert!(!s.metric().is_constant());
        assert!(validate(&s, &probes(2), VALIDATION_TOL).pass);
        // g(X, X) = −h(X, X)
        let p = [0.7, -0.2];
        let x = s.frame_at(&p)[0].clone();
        let gxx = s.form_at(&p).apply(x.as_slice(), x.as_slice());
        assert!((gxx + x.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn extend_negative_examples() {
        let m = extend_negative(&flat(1, 1).unwrap(), 0.0);
        assert_eq!(m.form_at(&[0.0, 0.0]), SymForm::diagonal(&[-1.0, -1.0]));
        assert_eq!(m.frame_at(&[0.0, 0.0]), vec![dvector![0.0, 1.0], dvector![1.0, 0.0]]);
        assert_eq!(m.index(), 2);

        let m = extend_negative(&flat(2, 1).unwrap(), 0.5);
        assert_eq!(m.form_at(&[0.0; 3]), SymForm::diagonal(&[-1.0, -1.0, 1.0]));
        let frame = m.frame_at(&[0.0; 3]);
        assert_eq!(frame[0], dvector![0.0, 1.0, 0.0]);
        assert_eq!(frame[1], dvector![1.0, -0.5, 0.0]);
        assert!(validate(&m, &probes(3), VALIDATION_TOL).pass);
    }

    #[test]
    fn extend_positive_examples() {
        let m = extend_positive(&flat(2, 1).unwrap());
        assert_eq!(m.form_at(&[0.0; 3]), SymForm::diagonal(&[1.0, -1.0, 1.0]));
        assert_eq!(m.frame_at(&[0.0; 3]), vec![dvector![0.0, 1.0, 0.0]]);
        assert_eq!((m.dim(), m.index()), (3, 1));

        let m = extend_positive(&flat(2, 2).unwrap());
        assert_eq!(m.form_at(&[0.0; 3]), SymForm::diagonal(&[1.0, -1.0, -1.0]));
        assert_eq!((m.dim(), m.index()), (3, 2));
        assert!(validate(&m, &probes(3), VALIDATION_TOL).pass);
    }

    #[test]
    fn warped_examples() {
        let base = flat(2, 1).unwrap();
        let trivial = warped_product(&base, &MetricField::euclidean(1), |_| 1.0, &probes(2)).unwrap();
        assert_eq!(trivial.form_at(&[0.0; 3]), SymForm::diagonal(&[-1.0, 1.0, 1.0]));

        let w = warped_product(&base, &MetricField::euclidean(1), |_| 2.0, &probes(2)).unwrap();
        assert_eq!(w.form_at(&[0.0; 3]), SymForm::diagonal(&[-1.0, 1.0, 4.0]));
        assert_eq!(w.frame_at(&[0.0; 3]), vec![dvector![1.0, 0.0, 0.0]]);

        let w = warped_product(&flat(2, 2).unwrap(), &MetricField::euclidean(2), |_| 1.0, &probes(2)).unwrap();
        assert_eq!((w.dim(), w.index()), (4, 2));
        assert!(validate(&w, &probes(4), VALIDATION_TOL).pass);

        let up = extend_positive(&w);
        assert_eq!((up.dim(), up.index()), (5, 2));
        assert!(validate(&up, &probes(5), VALIDATION_TOL).pass);
    }

    #[test]
    fn warped_rejects_nonpositive_warp() {
        let base = flat(2, 1).unwrap();
        let err = warped_product(&base, &MetricField::euclidean(1), |p| p[0], &[dvector![-1.0, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            Error::NonPositiveWarp {
                point: vec![-1.0, 0.0],
                value: -1.0
            }
        );
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&flat(3, 2).unwrap(), &probes(3), VALIDATION_TOL).pass);

        let spacelike = flat(2, 1)
            .unwrap()
            .with_frame(TimeFrame::constant(2, vec![dvector![0.0, 1.0]]).unwrap())
            .unwrap();
        let report = validate(&spacelike, &probes(2), VALIDATION_TOL);
        assert!(!report.pass);
        assert!(report.probes.iter().all(|c| !c.frame_negative && c.frame_norms == vec![1.0]));

        let doubled = flat(3, 2)
            .unwrap()
            .with_frame(TimeFrame::constant(3, vec![dvector![1.0, 0.0, 0.0], dvector![1.0, 0.0, 0.0]]).unwrap())
            .unwrap();
        let report = validate(&doubled, &probes(3), VALIDATION_TOL);
        assert!(!report.pass);
        assert!(report.probes.iter().all(|c| c.frame_negative && !c.frame_independent));
    }

    #[test]
    fn validate_flags_points_outside_domain() {
        let s = flat(2, 1).unwrap().restricted(|p| p[0] < 0.0);
        let report = validate(&s, &[dvector![1.0, 0.0]], VALIDATION_TOL);
        assert!(!report.pass);
        assert!(!report.probes[0].in_domain);
    }

    #[test]
    fn conformal_keeps_verdicts() {
        let s = from_frame(
            &MetricField::euclidean(3),
            TimeFrame::constant(3, vec![dvector![1.0, 0.2, 0.0], dvector![0.0, 1.0, 0.3]]).unwrap(),
            &[Vector::zeros(3)],
        )
        .unwrap();
        let c = conformal(&s, |p| 1.0 + 0.5 * p[0].sin());
        let ps = probes(3);
        assert_eq!(validate(&s, &ps, VALIDATION_TOL).pass, validate(&c, &ps, VALIDATION_TOL).pass);
        assert!(validate(&c, &ps, VALIDATION_TOL).pass);
    }

    #[test]
    fn desc_round_trip_and_build() {
        let desc = StructureDesc::ExtendNegative {
            base: Box::new(StructureDesc::ExcludeFuture {
                base: Box::new(StructureDesc::Flat { n: 2, nu: 1 }),
                apex: vec![0.0, 0.0],
            }),
            eps: 0.0,
        };
        let json = serde_json::to_string(&desc).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"extend_negative","base":{"kind":"exclude_future","base":{"kind":"flat","n":2,"nu":1},"apex":[0.0,0.0]},"eps":0.0}"#
        );
        let back: StructureDesc = serde_json::from_str(&json).unwrap();
        assert_eq!(back, desc);
        let s = back.build().unwrap();
        assert_eq!((s.dim(), s.index()), (3, 2));
        assert!(!s.contains(&[0.0, 0.0, 0.0]));
        assert!(!s.contains(&[5.0, 1.0, 0.5]));
        assert!(s.contains(&[0.0, -0.5, -0.5]));
    }
}
