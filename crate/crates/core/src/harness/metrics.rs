//! Error norms and diagnostics used by the studies.

use crate::dg::{KineticField, Mesh1D};
use crate::error::{BgkError, Result};
use crate::harness::run::RunOutput;
use crate::quadrature::NodalBasis;
use crate::velocity::VelocityGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Rho,
    U,
    T,
    P,
    QEps,
}

impl Quantity {
    pub fn of(self, run: &RunOutput) -> &[f64] {
        let p = &run.profile;
        match self {
            Quantity::Rho => &p.rho,
            Quantity::U => &p.u,
            Quantity::T => &p.t,
            Quantity::P => &p.p,
            Quantity::QEps => &p.q_eps,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Quantity::Rho => "rho",
            Quantity::U => "u",
            Quantity::T => "T",
            Quantity::P => "p",
            Quantity::QEps => "Qeps",
        }
    }
}

/// `L¹` differences between two consecutive meshes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Errors {
    pub rho: f64,
    /// Averaged over velocity points; absent unless both runs carry `g`.
    pub g: Option<f64>,
}

/// `(1/|Ω|) Σ ∫ |w_coarse − w_fine| dx` over the fine elements, row width `w`,
/// averaged over the `w` columns.
pub fn l1_nodal_difference(
    coarse_mesh: &Mesh1D,
    coarse: &[f64],
    fine_mesh: &Mesh1D,
    fine: &[f64],
    q: usize,
    w: usize,
) -> Result<f64> {
    let basis = NodalBasis::new(q)?;
    let (nc, nf) = (coarse_mesh.nx(), fine_mesh.nx());
    if coarse.len() != nc * q * w || fine.len() != nf * q * w {
        return Err(BgkError::MeshMismatch("field length does not match mesh".into()));
    }
    let same_domain = (coarse_mesh.a() - fine_mesh.a()).abs() < 1e-12 * coarse_mesh.length()
        && (coarse_mesh.b() - fine_mesh.b()).abs() < 1e-12 * coarse_mesh.length();
    if !same_domain {
        return Err(BgkError::MeshMismatch("meshes cover different domains".into()));
    }
    let mut total = 0.0;
    let mut vals = vec![0.0; q];
    for i in 0..nf {
        let h = fine_mesh.h(i);
        for k in 0..q {
            let x = fine_mesh.node_x(&basis, i, k);
            let (ic, xi) = coarse_mesh
                .locate(x)
                .ok_or_else(|| BgkError::MeshMismatch(format!("node {x} outside the coarse mesh")))?;
            let phi = basis.values_at(xi);
            for c in 0..w {
                for (kc, v) in vals.iter_mut().enumerate() {
                    *v = coarse[((ic * q) + kc) * w + c];
                }
                let wc: f64 = phi.iter().zip(&vals).map(|(p, v)| p * v).sum();
                let wf = fine[((i * q) + k) * w + c];
                total += basis.weights()[k] * h * (wc - wf).abs();
            }
        }
    }
    Ok(total / (fine_mesh.length() * w as f64))
}

/// Consecutive-mesh error of `ρ` and `g`; the fine run must halve the coarse spacing.
pub fn l1_error_consecutive(coarse: &RunOutput, fine: &RunOutput) -> Result<L1Errors> {
    if fine.mesh.nx() != 2 * coarse.mesh.nx() {
        return Err(BgkError::MeshMismatch(format!(
            "fine mesh has {} elements, expected {}",
            fine.mesh.nx(),
            2 * coarse.mesh.nx()
        )));
    }
    if fine.q != coarse.q {
        return Err(BgkError::MeshMismatch("runs use different polynomial degrees".into()));
    }
    if (fine.t - coarse.t).abs() > 1e-12 * coarse.t.abs().max(1.0) {
        return Err(BgkError::MeshMismatch("runs stopped at different times".into()));
    }
    let rho = l1_nodal_difference(
        &coarse.mesh,
        &coarse.profile.rho,
        &fine.mesh,
        &fine.profile.rho,
        coarse.q,
        1,
    )?;
    let g = match (&coarse.g, &fine.g) {
        (Some(gc), Some(gf)) => {
            if gc.nv() != gf.nv() {
                return Err(BgkError::MeshMismatch("velocity grids differ".into()));
            }
            Some(l1_nodal_difference(
                &coarse.mesh,
                gc.as_slice(),
                &fine.mesh,
                gf.as_slice(),
                coarse.q,
                gc.nv(),
            )?)
        }
        _ => None,
    };
    Ok(L1Errors { rho, g })
}

/// `log₂(e_h / e_{h/2})`.
pub fn observed_order(e_h: f64, e_h2: f64) -> f64 {
    (e_h / e_h2).log2()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(BgkError::invalid("slope fit needs at least two paired samples"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(BgkError::invalid("slope fit needs positive samples"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

fn node_weights(mesh: &Mesh1D, q: usize) -> Result<Vec<f64>> {
    let basis = NodalBasis::new(q)?;
    let mut w = Vec::with_capacity(mesh.nx() * q);
    for i in 0..mesh.nx() {
        for k in 0..q {
            w.push(basis.weights()[k] * mesh.h(i));
        }
    }
    Ok(w)
}

/// `Σ ω|w₁ − w₂| / Σ ω|w₁|` over nodal values with quadrature weights `ω`.
pub fn relative_difference_weighted(weights: &[f64], w1: &[f64], w2: &[f64]) -> Result<f64> {
    if w1.len() != w2.len() || w1.len() != weights.len() {
        return Err(BgkError::MeshMismatch("node sets differ".into()));
    }
    let num: f64 = weights.iter().zip(w1.iter().zip(w2)).map(|(w, (a, b))| w * (a - b).abs()).sum();
    let den: f64 = weights.iter().zip(w1).map(|(w, a)| w * a.abs()).sum();
    if den == 0.0 {
        return Err(BgkError::invalid("reference quantity vanishes identically"));
    }
    Ok(num / den)
}

/// Relative difference of two runs on the same nodes, normalized by `run1`.
pub fn relative_difference(run1: &RunOutput, run2: &RunOutput, quantity: Quantity) -> Result<f64> {
    if run1.mesh.interfaces() != run2.mesh.interfaces() || run1.q != run2.q {
        return Err(BgkError::MeshMismatch("runs do not share a node set".into()));
    }
    let w = node_weights(&run1.mesh, run1.q)?;
    relative_difference_weighted(&w, quantity.of(run1), quantity.of(run2))
}

/// Evaluates a nodal field of `mesh`/`q` at arbitrary points.
pub fn resample(mesh: &Mesh1D, q: usize, values: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    let basis = NodalBasis::new(q)?;
    if values.len() != mesh.nx() * q {
        return Err(BgkError::MeshMismatch("field length does not match mesh".into()));
    }
    xs.iter()
        .map(|&x| {
            let (i, xi) = mesh
                .locate(x)
                .ok_or_else(|| BgkError::MeshMismatch(format!("point {x} outside the mesh")))?;
            Ok(basis.eval_nodal(&values[i * q..(i + 1) * q], xi))
        })
        .collect()
}

/// Relative difference of `run` against `reference` evaluated at the nodes of `run`,
/// normalized by the reference.
pub fn relative_difference_resampled(reference: &RunOutput, run: &RunOutput, quantity: Quantity) -> Result<f64> {
    let r = resample(&reference.mesh, reference.q, quantity.of(reference), &run.profile.x)?;
    let w = node_weights(&run.mesh, run.q)?;
    relative_difference_weighted(&w, &r, quantity.of(run))
}

/// `max over nodes |ε⟨m g⟩|`, per component.
pub fn conservation_defect(g: &KineticField, eps: &[f64], grid: &VelocityGrid) -> [f64; 3] {
    let mut out = [0.0f64; 3];
    for n in 0..g.node_count() {
        let m = grid.moment_vector_unchecked(g.node(n));
        for c in 0..3 {
            out[c] = out[c].max((eps[n] * m[c]).abs());
        }
    }
    out
}

/// `(1/|Ω|) ∫ |w_h − w_exact| dx` by nodal quadrature.
pub fn l1_error_exact(run: &RunOutput, quantity: Quantity, exact: impl Fn(f64) -> f64) -> Result<f64> {
    let w = node_weights(&run.mesh, run.q)?;
    let vals = quantity.of(run);
    let s: f64 = w
        .iter()
        .zip(vals.iter().zip(&run.profile.x))
        .map(|(w, (v, &x))| w * (v - exact(x)).abs())
        .sum();
    Ok(s / run.mesh.length())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::BoundaryKind;

    #[test]
    fn order_examples() {
        assert!((observed_order(1.97e-2, 1.00e-2) - 0.978).abs() < 1e-3);
        assert_eq!(observed_order(4e-2, 1e-2), 2.0);
        assert!((observed_order(7.76e-5, 1.00e-5) - 2.956).abs() < 1e-3);
        let x = [1e-2, 1e-3, 1e-4];
        let y: Vec<f64> = x.iter().map(|e| 3.0 * e * e).collect();
        assert!((log_log_slope(&x, &y).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l1_constant_offset() {
        let c = Mesh1D::uniform(0.0, 2.0, 5, BoundaryKind::Periodic).unwrap();
        let f = Mesh1D::uniform(0.0, 2.0, 10, BoundaryKind::Periodic).unwrap();
        for q in 1..=3 {
            let a = vec![1.0; 5 * q];
            let b = vec![1.25; 10 * q];
            let e = l1_nodal_difference(&c, &a, &f, &b, q, 1).unwrap();
            assert!((e - 0.25).abs() < 1e-14);
            let same = l1_nodal_difference(&c, &a, &f, &vec![1.0; 10 * q], q, 1).unwrap();
            assert!(same.abs() < 1e-14);
        }
        let other = Mesh1D::uniform(0.0, 3.0, 10, BoundaryKind::Periodic).unwrap();
        assert!(l1_nodal_difference(&c, &[1.0; 5], &other, &[1.0; 10], 1, 1).is_err());
    }

    #[test]
    fn relative_difference_scaling() {
        let w = [0.5, 0.5, 1.0];
        let a = [1.0, -2.0, 3.0];
        let b: Vec<f64> = a.iter().map(|x| 1.01 * x).collect();
        assert!((relative_difference_weighted(&w, &a, &b).unwrap() - 0.01).abs() < 1e-14);
        assert_eq!(relative_difference_weighted(&w, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn resample_linear_exact() {
        let m = Mesh1D::uniform(0.0, 1.0, 4, BoundaryKind::Periodic).unwrap();
        let b = NodalBasis::new(2).unwrap();
        let vals: Vec<f64> = m.node_coordinates(&b).iter().map(|x| 2.0 * x + 1.0).collect();
        let r = resample(&m, 2, &vals, &[0.0, 0.33, 1.0]).unwrap();
        for (x, v) in [0.0, 0.33, 1.0].iter().zip(r) {
            assert!((v - (2.0 * x + 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn conservation_defect_of_zero() {
        let g = KineticField::zeros(3, 2, 4);
        let grid = VelocityGrid::new(5.0, 4).unwrap();
        assert_eq!(conservation_defect(&g, &[1.0; 6], &grid), [0.0; 3]);
    }
}
