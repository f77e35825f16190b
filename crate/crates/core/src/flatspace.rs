//! Closed-form causal structure of flat ℝ^(n−ν,ν).
//!
//! With the first ν coordinates negative, p ≤ q holds iff qⁱ ≥ pⁱ for every
//! i ≤ ν and Σ_{i≤ν}(Δⁱ)² ≥ Σ_{j>ν}(Δʲ)². Every discrete computation on a
//! flat structure is checked against this module.

use serde::{Deserialize, Serialize};

use crate::spacetime::BoxRegion;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderMode {
    /// p ≤ q: closed cone, null displacements included.
    Causal,
    /// p ≪ q: every inequality strict.
    Chronological,
}

/// ℝ^(n−ν,ν) as an order oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatSpace {
    n: usize,
    nu: usize,
}

impl FlatSpace {
    pub fn new(n: usize, nu: usize) -> Result<Self> {
        if nu == 0 || nu > n {
            return Err(Error::InvalidIndex { n, nu });
        }
        Ok(Self { n, nu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.nu
    }

    /// Causal (or chronological) order between two points.
    pub fn leq(&self, p: &[f64], q: &[f64], mode: OrderMode) -> bool {
        debug_assert!(p.len() == self.n && q.len() == self.n);
        let (time, space) = split_sq(p, q, self.nu);
        match mode {
            OrderMode::Causal => {
                p == q || ((0..self.nu).all(|i| q[i] >= p[i]) && time >= space)
            }
            OrderMode::Chronological => (0..self.nu).all(|i| q[i] > p[i]) && time > space,
        }
    }

    /// The canonical time function T(p) = Σ_{i≤ν} pⁱ.
    pub fn time(&self, p: &[f64]) -> f64 {
        time_t(p, self.nu)
    }

    /// A box containing J⁺(p) ∩ J⁻(q), or `None` if qⁱ < pⁱ for some i ≤ ν.
    ///
    /// Time axes range over [pⁱ, qⁱ]; spatial axes over pʲ ± √R with
    /// R = 2ν·max_{i≤ν}(qⁱ − pⁱ)². The box is loose and can be nonempty when
    /// the diamond itself is empty.
    pub fn diamond_box(&self, p: &[f64], q: &[f64]) -> Option<BoxRegion> {
        if (0..self.nu).any(|i| q[i] < p[i]) {
            return None;
        }
        let max_sq = (0..self.nu)
            .map(|i| (q[i] - p[i]) * (q[i] - p[i]))
            .fold(0.0, f64::max);
        let radius = (2.0 * self.nu as f64 * max_sq).sqrt();
        let (lo, hi) = (0..self.n)
            .map(|i| {
                if i < self.nu {
                    (p[i], q[i])
                } else {
                    (p[i] - radius, p[i] + radius)
                }
            })
            .unzip();
        Some(BoxRegion { lo, hi })
    }
}

/// Σ_{i<nu} pⁱ.
pub fn time_t(p: &[f64], nu: usize) -> f64 {
    p[..nu].iter().sum()
}

fn split_sq(p: &[f64], q: &[f64], nu: usize) -> (f64, f64) {
    let mut time = 0.0;
    let mut space = 0.0;
    for (i, (a, b)) in p.iter().zip(q).enumerate() {
        let d = b - a;
        if i < nu {
            time += d * d;
        } else {
            space += d * d;
        }
    }
    (time, space)
}
