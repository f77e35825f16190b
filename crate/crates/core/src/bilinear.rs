//! Floating point linear algebra over symmetric bilinear forms of arbitrary
//! signature.
//!
//! The interesting piece is [`positive_functional_vector`], the constructive
//! induction that produces a vector pairing strictly positively with every
//! member of a basis. The cone module uses it (with the inner product −g on
//! the frame span) to build interior timelike vectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// Tangent vectors and coordinate points share one type.
pub type Vector = DVector<f64>;

/// Relative residual below which a Gram–Schmidt step counts as dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

/// A symmetric matrix representing a bilinear form in coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SymForm {
    entries: DMatrix<f64>,
}

impl SymForm {
    /// Wraps a matrix, rejecting non-square, non-finite or non-symmetric input.
    /// Symmetry is checked bit for bit.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = entries.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                if entries[(i, j)] != entries[(j, i)] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: DMatrix::identity(n, n),
        }
    }

    /// Symmetrizes `m` as ½(m + mᵀ). Used for forms assembled from products
    /// of matrices, where rounding breaks exact symmetry.
    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.5 * (m[(i, j)] + m[(j, i)])
            }
        });
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// The form multiplied by a scalar.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            entries: &self.entries * factor,
        }
    }

    /// Orthogonal direct sum: `self` acts on the leading coordinates, `other`
    /// on the trailing ones.
    pub fn direct_sum(&self, other: &SymForm) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut entries = DMatrix::zeros(a + b, a + b);
        entries.view_mut((0, 0), (a, a)).copy_from(&self.entries);
        entries.view_mut((a, a), (b, b)).copy_from(&other.entries);
        Self { entries }
    }

    /// vᵀ·G·w without dimension checks.
    ///
    /// Accumulates Σ_i G_ii·(v_i w_i) + Σ_{i<j} G_ij·(v_i w_j + v_j w_i) in
    /// row-major order. Every term is commutative in (v, w), so the result is
    /// bit-for-bit symmetric.
    pub fn apply(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.dim();
        debug_assert!(v.len() == n && w.len() == n);
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.entries[(i, i)] * (v[i] * w[i]);
            for j in (i + 1)..n {
                let g = self.entries[(i, j)];
                if g != 0.0 {
                    acc += g * (v[i] * w[j] + v[j] * w[i]);
                }
            }
        }
        acc
    }
}

/// Evaluates the form on a pair of vectors.
pub fn evaluate(form: &SymForm, v: &[f64], w: &[f64]) -> Result<f64> {
    for x in [v, w] {
        if x.len() != form.dim() {
            return Err(Error::DimensionMismatch {
                expected: form.dim(),
                found: x.len(),
            });
        }
    }
    Ok(form.apply(v, w))
}

/// Eigenvalue sign counts of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_nondegenerate(&self) -> bool {
        self.zero == 0
    }
}

/// Counts eigenvalues above `tol`, below `-tol`, and in between.
pub fn signature(form: &SymForm, tol: f64) -> Signature {
    let eig = SymmetricEigen::new(form.entries.clone());
    let mut sig = Signature {
        positive: 0,
        negative: 0,
        zero: 0,
    };
    for &lambda in eig.eigenvalues.iter() {
        if lambda > tol {
            sig.positive += 1;
        } else if lambda < -tol {
            sig.negative += 1;
        } else {
            sig.zero += 1;
        }
    }
    sig
}

fn check_basis(basis: &[Vector], inner: &SymForm) -> Result<()> {
    for b in basis {
        if b.len() != inner.dim() {
            return Err(Error::DimensionMismatch {
                expected: inner.dim(),
                found: b.len(),
            });
        }
        if b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    Ok(())
}

/// Orthogonalizes `basis` with respect to the positive definite `inner`.
///
/// The result spans the same flag of subspaces as the input: the first k
/// output vectors span the first k input vectors. Each step runs two
/// projection sweeps, which keeps the output orthogonal to ~1e−12 on well
/// conditioned input.
pub fn gram_schmidt(basis: &[Vector], inner: &SymForm) -> Result<Vec<Vector>> {
    check_basis(basis, inner)?;
    let mut out: Vec<Vector> = Vec::with_capacity(basis.len());
    let mut norms_sq: Vec<f64> = Vec::with_capacity(basis.len());
    for (index, b) in basis.iter().enumerate() {
        let b_norm_sq = inner.apply(b.as_slice(), b.as_slice());
        if !(b_norm_sq > 0.0) {
            return Err(Error::LinearDependence { index });
        }
        let mut e = b.clone();
        for _sweep in 0..2 {
            for (prev, &prev_sq) in out.iter().zip(&norms_sq) {
                let c = inner.apply(e.as_slice(), prev.as_slice()) / prev_sq;
                e.axpy(-c, prev, 1.0);
            }
        }
        let e_norm_sq = inner.apply(e.as_slice(), e.as_slice());
        if !(e_norm_sq.max(0.0).sqrt() >= DEPENDENCE_TOL * b_norm_sq.sqrt()) {
            return Err(Error::LinearDependence { index });
        }
        norms_sq.push(e_norm_sq);
        out.push(e);
    }
    Ok(out)
}

/// Returns a nonzero `v` with `inner(v, b) > 0` for every basis vector `b`.
///
/// Induction on the basis length: start from `v = b₁`; at step m, with `eₘ`
/// the m-th Gram–Schmidt vector, set `v ← v + a·eₘ` where
/// `a = (−⟨v,bₘ⟩ + max(1, |⟨v,bₘ⟩|)) / ⟨bₘ,eₘ⟩`. Then `⟨v,bₘ⟩` becomes
/// `max(1, |⟨v,bₘ⟩|)` while the earlier pairings are untouched because
/// `eₘ` is orthogonal to `b₁..bₘ₋₁`.
pub fn positive_functional_vector(basis: &[Vector], inner: &SymForm) -> Result<Vector> {
    let Some(first) = basis.first() else {
        return Err(Error::LinearDependence { index: 0 });
    };
    let ortho = gram_schmidt(basis, inner)?;
    let mut v = first.clone();
    for (b, e) in basis.iter().zip(&ortho).skip(1) {
        let current = inner.apply(v.as_slice(), b.as_slice());
        let along = inner.apply(b.as_slice(), e.as_slice());
        let a = (-current + current.abs().max(1.0)) / along;
        v.axpy(a, e, 1.0);
    }
    Ok(v)
}
