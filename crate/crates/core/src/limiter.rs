//! TVB minmod limiter for the macroscopic field, applied per conserved
//! component or per characteristic field of the Euler system.

use std::str::FromStr;

use crate::dg::{BoundaryKind, MacroField, Mesh1D};
use crate::error::{BgkError, Result};
use crate::quadrature::NodalBasis;

/// Variables the minmod is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitVariables {
    #[default]
    Conserved,
    /// Fields of the γ = 3 Euler Jacobian frozen at the cell mean.
    Characteristic,
}

impl FromStr for LimitVariables {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conserved" | "component" => Ok(LimitVariables::Conserved),
            "characteristic" | "char" => Ok(LimitVariables::Characteristic),
            other => Err(BgkError::invalid(format!("unknown limiter variables '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    pub enabled: bool,
    pub m_tvb: f64,
    pub variables: LimitVariables,
}

impl Default for LimiterConfig {
    fn default() -> Self {
        LimiterConfig {
            enabled: true,
            m_tvb: 20.0,
            variables: LimitVariables::Conserved,
        }
    }
}

impl LimiterConfig {
    pub fn tvb(m_tvb: f64) -> Result<Self> {
        if !(m_tvb >= 0.0 && m_tvb.is_finite()) {
            return Err(BgkError::invalid(format!("TVB constant must be non-negative, got {m_tvb}")));
        }
        Ok(LimiterConfig {
            m_tvb,
            ..Self::default()
        })
    }

    pub fn off() -> Self {
        LimiterConfig {
            enabled: false,
            ..Self::default()
        }
    }

    pub fn with_variables(mut self, variables: LimitVariables) -> Self {
        self.variables = variables;
        self
    }
}

type Mat3 = [[f64; 3]; 3];

const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[inline]
fn apply(m: &Mat3, v: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|a| m[a][0] * v[0] + m[a][1] * v[1] + m[a][2] * v[2])
}

/// Right and left eigenvectors of the γ = 3 Euler flux Jacobian at `u`.
pub fn euler_eigenvectors(u: [f64; 3]) -> Result<(Mat3, Mat3)> {
    let [rho, m, e] = u;
    let vel = m / rho;
    let p = 2.0 * e - m * vel;
    if !(rho > 0.0 && p > 0.0) {
        return Err(BgkError::Realizability {
            rho,
            temperature: p / rho,
            location: None,
        });
    }
    let c = (3.0 * p / rho).sqrt();
    let h = (e + p) / rho;
    let r = [
        [1.0, 1.0, 1.0],
        [vel - c, vel, vel + c],
        [h - vel * c, 0.5 * vel * vel, h + vel * c],
    ];
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    let mut l = [[0.0; 3]; 3];
    for (a, row) in l.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            let (r0, r1) = ((b + 1) % 3, (b + 2) % 3);
            let (c0, c1) = ((a + 1) % 3, (a + 2) % 3);
            *x = (r[r0][c0] * r[r1][c1] - r[r0][c1] * r[r1][c0]) / det;
        }
    }
    Ok((r, l))
}

#[inline]
pub fn minmod(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Returns `a` untouched when `|a| ≤ threshold`, otherwise `minmod(a, b, c)`.
#[inline]
pub fn modified_minmod(a: f64, b: f64, c: f64, threshold: f64) -> f64 {
    if a.abs() <= threshold {
        a
    } else {
        minmod(a, b, c)
    }
}

/// Applies the limiter; cell means are preserved exactly.
pub fn tvb_limit(u: &MacroField, basis: &NodalBasis, mesh: &Mesh1D, cfg: &LimiterConfig) -> Result<MacroField> {
    if !cfg.enabled {
        return Ok(u.clone());
    }
    let nx = mesh.nx();
    let q = basis.q();
    if u.nx() != nx || u.q() != q {
        return Err(BgkError::invalid("macro field does not match the mesh"));
    }
    if q == 1 {
        return Ok(u.clone());
    }
    let (w, xi) = (basis.weights(), basis.nodes());
    let (el, er) = (basis.endpoint_left(), basis.endpoint_right());
    let xi2: f64 = w.iter().zip(xi).map(|(w, x)| w * x * x).sum();

    let means: Vec<[f64; 3]> = (0..nx)
        .map(|i| {
            let e = u.element(i);
            std::array::from_fn(|c| (0..q).map(|k| w[k] * e[k][c]).sum())
        })
        .collect();
    let (ghost_l, ghost_r) = match mesh.boundary() {
        BoundaryKind::Periodic => (means[nx - 1], means[0]),
        BoundaryKind::Dirichlet { left, right } => (*left, *right),
        BoundaryKind::Extrapolate => (means[0], means[nx - 1]),
    };

    let mut out = u.clone();
    let mut fields = vec![[0.0; 3]; q];
    for i in 0..nx {
        let h = mesh.h(i);
        let threshold = cfg.m_tvb * h * h;
        let prev = if i == 0 { ghost_l } else { means[i - 1] };
        let next = if i + 1 == nx { ghost_r } else { means[i + 1] };
        let mean = means[i];
        let (r, l) = match cfg.variables {
            LimitVariables::Conserved => (IDENTITY, IDENTITY),
            LimitVariables::Characteristic => euler_eigenvectors(mean).map_err(|e| {
                e.at(crate::error::NodeLocation {
                    element: i,
                    node: usize::MAX,
                    x: mesh.center(i),
                })
            })?,
        };
        for (k, node) in u.element(i).iter().enumerate() {
            fields[k] = apply(&l, *node);
        }
        let wm = apply(&l, mean);
        let dp = apply(&l, std::array::from_fn(|c| next[c] - mean[c]));
        let dm = apply(&l, std::array::from_fn(|c| mean[c] - prev[c]));
        let mut changed = false;
        for a in 0..3 {
            let (mut ur, mut ul) = (0.0, 0.0);
            for k in 0..q {
                ur += er[k] * fields[k][a];
                ul += el[k] * fields[k][a];
            }
            let dev_r = ur - wm[a];
            let dev_l = wm[a] - ul;
            let lim_r = modified_minmod(dev_r, dp[a], dm[a], threshold);
            let lim_l = modified_minmod(dev_l, dp[a], dm[a], threshold);
            if lim_r == dev_r && lim_l == dev_l {
                continue;
            }
            let a1: f64 = (0..q).map(|k| w[k] * xi[k] * fields[k][a]).sum::<f64>() / xi2;
            let dev = minmod(0.5 * a1, dp[a], dm[a]);
            for k in 0..q {
                fields[k][a] = wm[a] + 2.0 * dev * xi[k];
            }
            changed = true;
        }
        if changed {
            let nodes = &mut out.nodes_mut()[i * q..(i + 1) * q];
            for k in 0..q {
                nodes[k] = apply(&r, fields[k]);
            }
        }
    }
    out.primitives(mesh, basis)?;
    Ok(out)
}
