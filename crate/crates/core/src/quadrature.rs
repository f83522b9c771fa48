//! Gauss–Legendre quadrature on the reference element (−1/2, 1/2) and the
//! Lagrangian nodal basis attached to its points.
//!
//! The basis parameter `q` is the number of nodes per element, so the local
//! polynomial degree is `q − 1` and the formal order of the DG scheme is `q`.

use crate::error::{BgkError, Result};

pub const MAX_NODES: usize = 8;

/// Gauss nodes, weights, endpoint traces and derivative matrix of one
/// reference element of unit length.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalBasis {
    q: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    endpoint_left: Vec<f64>,
    endpoint_right: Vec<f64>,
    /// Row-major `q × q`: entry `(k, k')` is `dφ_k/dξ` at node `k'`.
    deriv: Vec<f64>,
}

impl NodalBasis {
    pub fn new(q: usize) -> Result<Self> {
        if !(1..=MAX_NODES).contains(&q) {
            return Err(BgkError::invalid(format!(
                "nodes per element must be in 1..={MAX_NODES}, got {q}"
            )));
        }
        let (x, w) = gauss_legendre(q);
        let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * xi).collect();
        let weights: Vec<f64> = w.iter().map(|wi| 0.5 * wi).collect();

        // barycentric weights 1 / Π_{m≠k} (ξ_k − ξ_m)
        let bary: Vec<f64> = (0..q)
            .map(|k| {
                let prod: f64 = (0..q)
                    .filter(|&m| m != k)
                    .map(|m| nodes[k] - nodes[m])
                    .product();
                1.0 / prod
            })
            .collect();

        let mut deriv = vec![0.0; q * q];
        for k in 0..q {
            for kp in 0..q {
                if k != kp {
                    deriv[k * q + kp] = (bary[k] / bary[kp]) / (nodes[kp] - nodes[k]);
                }
            }
        }
        // dφ_k/dξ at its own node: the functions sum to one, so their derivatives sum to zero.
        for kp in 0..q {
            let off: f64 = (0..q).filter(|&k| k != kp).map(|k| deriv[k * q + kp]).sum();
            deriv[kp * q + kp] = -off;
        }

        let mut basis = NodalBasis {
            q,
            nodes,
            weights,
            endpoint_left: Vec::new(),
            endpoint_right: Vec::new(),
            deriv,
        };
        basis.endpoint_left = basis.values_at(-0.5);
        basis.endpoint_right = basis.values_at(0.5);
        Ok(basis)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn degree(&self) -> usize {
        self.q - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `φ_k(−1/2)` for every `k`.
    pub fn endpoint_left(&self) -> &[f64] {
        &self.endpoint_left
    }

    /// `φ_k(+1/2)` for every `k`.
    pub fn endpoint_right(&self) -> &[f64] {
        &self.endpoint_right
    }

    /// `dφ_k/dξ` evaluated at node `kp` (reference coordinate).
    #[inline]
    pub fn deriv(&self, k: usize, kp: usize) -> f64 {
        self.deriv[k * self.q + kp]
    }

    /// All basis functions evaluated at reference coordinate `xi`.
    pub fn values_at(&self, xi: f64) -> Vec<f64> {
        let q = self.q;
        if let Some(hit) = self.nodes.iter().position(|&n| n == xi) {
            let mut v = vec![0.0; q];
            v[hit] = 1.0;
            return v;
        }
        (0..q)
            .map(|k| {
                (0..q)
                    .filter(|&m| m != k)
                    .map(|m| (xi - self.nodes[m]) / (self.nodes[k] - self.nodes[m]))
                    .product()
            })
            .collect()
    }

    /// `Σ_k coeffs_k φ_k(ξ)`.
    pub fn eval_nodal(&self, coeffs: &[f64], xi: f64) -> f64 {
        debug_assert_eq!(coeffs.len(), self.q);
        self.values_at(xi)
            .iter()
            .zip(coeffs)
            .map(|(phi, c)| phi * c)
            .sum()
    }

    /// Quadrature mean `Σ_k ω_k c_k` over the reference element.
    pub fn mean(&self, coeffs: &[f64]) -> f64 {
        self.weights.iter().zip(coeffs).map(|(w, c)| w * c).sum()
    }

    /// Trace at the left end `Σ_k φ_k(−1/2) c_k`.
    #[inline]
    pub fn trace_left(&self, coeffs: &[f64]) -> f64 {
        self.endpoint_left.iter().zip(coeffs).map(|(p, c)| p * c).sum()
    }

    /// Trace at the right end `Σ_k φ_k(+1/2) c_k`.
    #[inline]
    pub fn trace_right(&self, coeffs: &[f64]) -> f64 {
        self.endpoint_right.iter().zip(coeffs).map(|(p, c)| p * c).sum()
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], ascending.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}
