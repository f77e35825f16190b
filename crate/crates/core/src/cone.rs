//! Pointwise cone queries.
//!
//! A nonzero v is future directed causal at p when g_p(v,v) ≤ 0 and
//! g_p(v,Xᵢ(p)) ≤ 0 for every frame field, and future directed timelike when
//! all of these are strict. Past directed flips the frame inequalities. For
//! ν ≥ 2 a vector with g(v,v) ≤ 0 can be neither.

use serde::{Deserialize, Serialize};

use crate::bilinear::{positive_functional_vector, SymForm, Vector};
use crate::spacetime::SpacetimeStructure;
use crate::{Error, Result};

/// Default tolerance for closed-form metrics.
pub const TOL_EXACT: f64 = 1e-12;
/// Default tolerance for composed metrics.
pub const TOL_COMPOSED: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeClass {
    FutureTimelike,
    FutureBoundary,
    PastTimelike,
    PastBoundary,
    UndirectedCausal,
    Spacelike,
    Zero,
}

impl ConeClass {
    pub fn is_future_causal(self) -> bool {
        matches!(self, ConeClass::FutureTimelike | ConeClass::FutureBoundary)
    }

    pub fn is_past_causal(self) -> bool {
        matches!(self, ConeClass::PastTimelike | ConeClass::PastBoundary)
    }

    pub fn is_timelike(self) -> bool {
        matches!(self, ConeClass::FutureTimelike | ConeClass::PastTimelike)
    }

    /// The class of −v.
    pub fn reversed(self) -> Self {
        match self {
            ConeClass::FutureTimelike => ConeClass::PastTimelike,
            ConeClass::FutureBoundary => ConeClass::PastBoundary,
            ConeClass::PastTimelike => ConeClass::FutureTimelike,
            ConeClass::PastBoundary => ConeClass::FutureBoundary,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConeClass::FutureTimelike => "FutureTimelike",
            ConeClass::FutureBoundary => "FutureBoundary",
            ConeClass::PastTimelike => "PastTimelike",
            ConeClass::PastBoundary => "PastBoundary",
            ConeClass::UndirectedCausal => "UndirectedCausal",
            ConeClass::Spacelike => "Spacelike",
            ConeClass::Zero => "Zero",
        }
    }
}

/// Raw inequality values behind a classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeDiagnostics {
    /// g(v, v)
    pub norm_sq: f64,
    /// g(v, Xᵢ) for every frame field
    pub frame_products: Vec<f64>,
    pub class: ConeClass,
}

/// Classification from precomputed inequality values.
pub fn class_from_values(v_norm: f64, norm_sq: f64, frame_products: &[f64], tol: f64) -> ConeClass {
    if v_norm <= tol {
        return ConeClass::Zero;
    }
    if norm_sq > tol {
        return ConeClass::Spacelike;
    }
    if norm_sq < -tol && frame_products.iter().all(|&q| q < -tol) {
        return ConeClass::FutureTimelike;
    }
    if norm_sq < -tol && frame_products.iter().all(|&q| q > tol) {
        return ConeClass::PastTimelike;
    }
    if frame_products.iter().all(|&q| q <= tol) {
        ConeClass::FutureBoundary
    } else if frame_products.iter().all(|&q| q >= -tol) {
        ConeClass::PastBoundary
    } else {
        ConeClass::UndirectedCausal
    }
}

/// Classifies `v` against a form and frame given directly.
pub fn classify_with(form: &SymForm, frame: &[Vector], v: &[f64], tol: f64) -> ConeClass {
    let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let norm_sq = form.apply(v, v);
    // Early exits keep the lattice builder from evaluating every frame product.
    if v_norm <= tol {
        return ConeClass::Zero;
    }
    if norm_sq > tol {
        return ConeClass::Spacelike;
    }
    let products: Vec<f64> = frame.iter().map(|x| form.apply(v, x.as_slice())).collect();
    class_from_values(v_norm, norm_sq, &products, tol)
}

fn check_query(s: &SpacetimeStructure, p: &[f64], v: &[f64]) -> Result<()> {
    let n = s.dim();
    for x in [p, v] {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
    }
    if !s.contains(p) {
        return Err(Error::OutsideDomain { point: p.to_vec() });
    }
    Ok(())
}

/// Classification together with the inequality values it was read from.
pub fn diagnose(s: &SpacetimeStructure, p: &[f64], v: &[f64], tol: f64) -> Result<ConeDiagnostics> {
    check_query(s, p, v)?;
    let form = s.form_at(p);
    let frame = s.frame_at(p);
    let norm_sq = form.apply(v, v);
    let frame_products: Vec<f64> = frame.iter().map(|x| form.apply(v, x.as_slice())).collect();
    let v_norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let class = class_from_values(v_norm, norm_sq, &frame_products, tol);
    Ok(ConeDiagnostics {
        norm_sq,
        frame_products,
        class,
    })
}

pub fn classify(s: &SpacetimeStructure, p: &[f64], v: &[f64], tol: f64) -> Result<ConeClass> {
    check_query(s, p, v)?;
    Ok(classify_with(&s.form_at(p), &s.frame_at(p), v, tol))
}

/// A future directed timelike vector in the span of the frame at `p`.
///
/// Runs the positive-functional construction on the frame basis with inner
/// product ⟨u,w⟩ = −g_p(u,w), which is positive definite on the frame span.
/// The result pairs strictly negatively with every frame field under g.
pub fn interior_vector(s: &SpacetimeStructure, p: &[f64]) -> Result<Vector> {
    if p.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: p.len(),
        });
    }
    if !s.contains(p) {
        return Err(Error::OutsideDomain { point: p.to_vec() });
    }
    let form = s.form_at(p);
    let frame = s.frame_at(p);
    let nu = frame.len();
    // Work in frame coordinates: the inner product is the Gram matrix of −g.
    let gram = nalgebra::DMatrix::from_fn(nu, nu, |i, j| {
        -form.apply(frame[i].as_slice(), frame[j].as_slice())
    });
    let gram = SymForm::symmetrized(gram);
    let basis: Vec<Vector> = (0..nu)
        .map(|i| {
            let mut e = Vector::zeros(nu);
            e[i] = 1.0;
            e
        })
        .collect();
    let coeffs = positive_functional_vector(&basis, &gram)
        .map_err(|_| Error::FrameDependence { point: p.to_vec() })?;
    let v = frame
        .iter()
        .zip(coeffs.iter())
        .fold(Vector::zeros(s.dim()), |acc, (x, c)| acc + x * *c);
    if classify_with(&form, &frame, v.as_slice(), 0.0) != ConeClass::FutureTimelike {
        return Err(Error::FrameDependence { point: p.to_vec() });
    }
    Ok(v)
}

/// Smallest frame number j (counting from 1) with g_p(v, X_j) < −tol.
///
/// For a nonzero future causal vector at least one such j exists; an error
/// means that guarantee was violated numerically.
pub fn strict_witness(s: &SpacetimeStructure, p: &[f64], v: &[f64], tol: f64) -> Result<usize> {
    let diag = diagnose(s, p, v, tol)?;
    if !diag.class.is_future_causal() {
        return Err(Error::NotFutureCausal);
    }
    diag.frame_products
        .iter()
        .position(|&q| q < -tol)
        .map(|j| j + 1)
        .ok_or(Error::NoStrictWitness)
}
