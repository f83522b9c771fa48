//! Pointwise kinetic closures for the one-dimensional BGK model (`d = 1`):
//! conserved/primitive conversion, the Maxwellian, the projection `Π_M`
//! onto `span{M, vM, v²M}`, and the Chapman–Enskog factors.
//!
//! With `d = 1` the energy is `E = ½ρu² + ½ρT`, the pressure is `p = ρT`
//! and the ratio of specific heats is `γ = (d + 2)/d = 3`.

use crate::error::{BgkError, Result};
use crate::velocity::VelocityGrid;

pub const GAMMA: f64 = 3.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Conserved variables `(ρ, ρu, E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

/// Primitive variables derived from a realizable [`MacroState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub rho: f64,
    pub u: f64,
    pub t: f64,
    pub p: f64,
}

impl MacroState {
    pub fn new(rho: f64, mom: f64, energy: f64) -> Self {
        MacroState { rho, mom, energy }
    }

    pub fn from_array(u: [f64; 3]) -> Self {
        MacroState::new(u[0], u[1], u[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }

    /// Conserved state from density, velocity and temperature.
    pub fn from_primitive(rho: f64, u: f64, t: f64) -> Self {
        MacroState::new(rho, rho * u, 0.5 * rho * u * u + 0.5 * rho * t)
    }

    /// Conserved state from density, velocity and pressure.
    pub fn from_rho_u_p(rho: f64, u: f64, p: f64) -> Self {
        MacroState::new(rho, rho * u, 0.5 * rho * u * u + 0.5 * p)
    }

    pub fn primitives(&self) -> Result<Primitive> {
        primitives(self.to_array())
    }
}

/// `(ρ, u, T, p)` from conserved variables; errors unless `ρ > 0` and `T > 0`.
#[inline]
pub fn primitives(u: [f64; 3]) -> Result<Primitive> {
    let rho = u[0];
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(BgkError::Realizability {
            rho,
            temperature: f64::NAN,
            location: None,
        });
    }
    let vel = u[1] / rho;
    let t = 2.0 * u[2] / rho - vel * vel;
    if !(t > 0.0) || !t.is_finite() {
        return Err(BgkError::Realizability {
            rho,
            temperature: t,
            location: None,
        });
    }
    Ok(Primitive {
        rho,
        u: vel,
        t,
        p: rho * t,
    })
}

impl Primitive {
    /// Largest characteristic speed `|u| + √(γT)`.
    #[inline]
    pub fn max_wave_speed(&self) -> f64 {
        self.u.abs() + (GAMMA * self.t).sqrt()
    }

    pub fn conserved(&self) -> [f64; 3] {
        MacroState::from_primitive(self.rho, self.u, self.t).to_array()
    }
}

/// Maxwellian `ρ/√(2πT) exp(−(v−u)²/(2T))` sampled on the grid.
pub fn maxwellian(rho: f64, u: f64, t: f64, grid: &VelocityGrid) -> Vec<f64> {
    let mut out = vec![0.0; grid.len()];
    maxwellian_into(rho, u, t, grid, &mut out);
    out
}

#[inline]
pub fn maxwellian_into(rho: f64, u: f64, t: f64, grid: &VelocityGrid, out: &mut [f64]) {
    let scale = rho * INV_SQRT_2PI / t.sqrt();
    let inv2t = 0.5 / t;
    for (o, &v) in out.iter_mut().zip(grid.points()) {
        let c = v - u;
        *o = scale * (-c * c * inv2t).exp();
    }
}

/// Maxwellian of a conserved state, with realizability checked.
pub fn maxwellian_of(state: [f64; 3], grid: &VelocityGrid) -> Result<Vec<f64>> {
    let p = primitives(state)?;
    Ok(maxwellian(p.rho, p.u, p.t, grid))
}

/// `Π_M f` for the Maxwellian `m` of the primitive state `prim`.
pub fn project(f: &[f64], prim: &Primitive, m: &[f64], grid: &VelocityGrid) -> Vec<f64> {
    let [a0, a1, a2] = projection_coefficients(f, prim, grid);
    let inv2t = 0.5 / prim.t;
    grid.points()
        .iter()
        .zip(m)
        .map(|(&v, &mj)| {
            let c = v - prim.u;
            (a0 + a1 * c + a2 * (c * c * inv2t - 0.5)) * mj
        })
        .collect()
}

/// `Π_M f` for the conserved state `state`, building the Maxwellian on the grid.
pub fn project_state(f: &[f64], state: [f64; 3], grid: &VelocityGrid) -> Result<Vec<f64>> {
    if f.len() != grid.len() {
        return Err(BgkError::invalid("sample count does not match velocity grid"));
    }
    let prim = primitives(state)?;
    let m = maxwellian(prim.rho, prim.u, prim.t, grid);
    Ok(project(f, &prim, &m, grid))
}

/// Replaces `f` by `(I − Π_M) f`.
#[inline]
pub fn subtract_projection(f: &mut [f64], prim: &Primitive, m: &[f64], grid: &VelocityGrid) {
    let [a0, a1, a2] = projection_coefficients(f, prim, grid);
    let inv2t = 0.5 / prim.t;
    for ((fj, &v), &mj) in f.iter_mut().zip(grid.points()).zip(m) {
        let c = v - prim.u;
        *fj -= (a0 + a1 * c + a2 * (c * c * inv2t - 0.5)) * mj;
    }
}

#[inline]
fn projection_coefficients(f: &[f64], prim: &Primitive, grid: &VelocityGrid) -> [f64; 3] {
    let inv2t = 0.5 / prim.t;
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    for (&v, &fj) in grid.points().iter().zip(f) {
        let c = v - prim.u;
        s0 += fj;
        s1 += c * fj;
        s2 += (c * c * inv2t - 0.5) * fj;
    }
    let dv = grid.dv();
    let rho = prim.rho;
    [
        dv * s0 / rho,
        dv * s1 / (rho * prim.t),
        2.0 / rho * dv * s2,
    ]
}

/// Chapman–Enskog factor `A(v) = ((v−u)²/(2T) − 3/2)(v−u)/√T`.
pub fn ce_factor_a(grid: &VelocityGrid, u: f64, t: f64) -> Vec<f64> {
    let st = t.sqrt();
    grid.points()
        .iter()
        .map(|&v| {
            let c = v - u;
            (c * c / (2.0 * t) - 1.5) * c / st
        })
        .collect()
}

/// One-dimensional reduction of the Chapman–Enskog tensor
/// `B = ½((v−u)⊗(v−u)/(2T) − |v−u|²/(dT) I)`, i.e. `−(v−u)²/(4T)`.
pub fn ce_factor_b(grid: &VelocityGrid, u: f64, t: f64) -> Vec<f64> {
    grid.points()
        .iter()
        .map(|&v| {
            let c = v - u;
            0.5 * (c * c / (2.0 * t) - c * c / t)
        })
        .collect()
}

/// The strain `∂u + (∂u)ᵗ − (2/d)(∂·u) I` multiplying `B`; zero for `d = 1`.
pub fn strain_factor_1d(du_dx: f64) -> f64 {
    du_dx + du_dx - 2.0 * du_dx
}

/// Leading-order microscopic part `−A r M/√T` for `r ≈ ∂ₓT`.
pub fn ce_leading_g(state: [f64; 3], r: f64, grid: &VelocityGrid) -> Result<Vec<f64>> {
    let prim = primitives(state)?;
    let mut out = vec![0.0; grid.len()];
    ce_leading_g_into(&prim, r, grid, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn ce_leading_g_into(prim: &Primitive, r: f64, grid: &VelocityGrid, out: &mut [f64]) {
    let scale = prim.rho * INV_SQRT_2PI / prim.t.sqrt();
    let inv2t = 0.5 / prim.t;
    let coef = -r / prim.t; // −r/√T from the source times 1/√T inside A
    for (o, &v) in out.iter_mut().zip(grid.points()) {
        let c = v - prim.u;
        let e = c * c * inv2t;
        *o = coef * (e - 1.5) * c * scale * (-e).exp();
    }
}

/// Rescaled heat flux `⟨½|v−u|²(v−u) g⟩`.
pub fn rescaled_heat_flux(g: &[f64], u: f64, grid: &VelocityGrid) -> f64 {
    let s: f64 = grid
        .points()
        .iter()
        .zip(g)
        .map(|(&v, &gj)| {
            let c = v - u;
            0.5 * c * c * c * gj
        })
        .sum();
    grid.dv() * s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> VelocityGrid {
        VelocityGrid::new(12.0, 100).unwrap()
    }

    #[test]
    fn primitive_examples() {
        let p = primitives([1.0, 0.0, 0.5]).unwrap();
        assert_eq!((p.rho, p.u, p.t, p.p), (1.0, 0.0, 1.0, 1.0));
        let p = primitives([0.125, 0.0, 0.05]).unwrap();
        assert!((p.t - 0.8).abs() < 1e-15 && (p.p - 0.1).abs() < 1e-15);
        // Lax left state (0.445, 0.698, 3.528) in conserved form
        let p = primitives([0.445, 0.31061, 1.87240289]).unwrap();
        assert!((p.u - 0.698).abs() < 1e-12);
        assert!((p.p - 3.528).abs() < 1e-8);
    }

    #[test]
    fn realizability_errors() {
        assert!(matches!(
            primitives([0.0, 0.0, 1.0]),
            Err(BgkError::Realizability { .. })
        ));
        assert!(matches!(
            primitives([1.0, 2.0, 1.0]),
            Err(BgkError::Realizability { .. })
        ));
        assert!(primitives([f64::NAN, 0.0, 1.0]).is_err());
    }

    #[test]
    fn maxwellian_point_values() {
        let g = VelocityGrid::new(1.0, 2).unwrap(); // points ±0.5
        let m = maxwellian(1.0, 0.5, 1.0, &g);
        assert!((m[1] - INV_SQRT_2PI).abs() < 1e-15);
        let m = maxwellian(2.0, 0.5, 1.0, &g);
        assert!((m[1] - 2.0 * INV_SQRT_2PI).abs() < 1e-15);
        let m = maxwellian(1.0, 1.5, 0.25, &g);
        // v = 0.5 sits one unit below the mean: exp(−1/(2·0.25)) / √(2π·0.25)
        let expect = (-2.0f64).exp() / (std::f64::consts::PI / 2.0).sqrt();
        assert!((m[1] - expect).abs() < 1e-15);
        let m = maxwellian(1.0, 0.5, 0.25, &g);
        assert!((m[1] - 1.0 / (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn maxwellian_moments_match_state() {
        let g = grid();
        for &(rho, u, t) in &[(1.0, 0.0, 1.0), (0.3, -1.2, 2.0), (2.5, 3.0, 0.5), (1.0, 1.0, 1.5)] {
            let m = maxwellian(rho, u, t, &g);
            let mv = g.moment_vector(&m).unwrap();
            let expect = MacroState::from_primitive(rho, u, t).to_array();
            for (a, b) in mv.iter().zip(expect) {
                assert!((a - b).abs() < 1e-10, "{rho} {u} {t}");
            }
        }
    }

    #[test]
    fn projection_fixes_collision_invariants() {
        let g = grid();
        let state = MacroState::from_primitive(1.3, 0.4, 0.9).to_array();
        let m = maxwellian_of(state, &g).unwrap();
        let pm = project_state(&m, state, &g).unwrap();
        for (a, b) in pm.iter().zip(&m) {
            assert!((a - b).abs() < 1e-10);
        }
        let vm: Vec<f64> = g.points().iter().zip(&m).map(|(v, mj)| v * mj).collect();
        let pvm = project_state(&vm, state, &g).unwrap();
        for (a, b) in pvm.iter().zip(&vm) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn projection_annihilates_moment_free_functions() {
        let g = grid();
        let state = MacroState::from_primitive(1.0, 0.2, 1.1).to_array();
        let prim = primitives(state).unwrap();
        let m = maxwellian(prim.rho, prim.u, prim.t, &g);
        let mut f: Vec<f64> = g
            .points()
            .iter()
            .zip(&m)
            .map(|(&v, &mj)| (v.powi(3) - 0.3 * v.powi(4) + 0.1) * mj)
            .collect();
        subtract_projection(&mut f, &prim, &m, &g);
        let pf = project(&f, &prim, &m, &g);
        assert!(pf.iter().all(|x| x.abs() < 1e-10));
        let mom = g.moment_vector(&f).unwrap();
        assert!(mom.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn ce_factor_examples() {
        let g = VelocityGrid::new(1.0, 2).unwrap();
        let a = ce_factor_a(&g, 0.5, 1.0);
        assert_eq!(a[1], 0.0);
        let a = ce_factor_a(&g, -0.5, 1.0); // v − u = 1
        assert!((a[1] + 1.0).abs() < 1e-15);

        let g = grid();
        let a = ce_factor_a(&g, 0.0, 1.0);
        let m = maxwellian(1.0, 0.0, 1.0, &g);
        let a2m: Vec<f64> = a.iter().zip(&m).map(|(x, y)| x * x * y).collect();
        let kappa = g.moment(&a2m, crate::velocity::Weight::One).unwrap();
        assert!((kappa - 1.5).abs() < 1e-8);

        let am: Vec<f64> = a.iter().zip(&m).map(|(x, y)| x * y).collect();
        assert!(g.moment(&am, crate::velocity::Weight::One).unwrap().abs() < 1e-12);
        assert!(g.moment(&am, crate::velocity::Weight::V).unwrap().abs() < 1e-12);
    }

    #[test]
    fn strain_factor_vanishes_in_one_dimension() {
        let g = grid();
        let b = ce_factor_b(&g, 0.0, 1.0);
        let m = maxwellian(1.0, 0.0, 1.0, &g);
        // μ = T⟨B² M⟩ = 1/16 · ⟨c⁴ M⟩ = 3/16 at (1, 0, 1)
        let b2m: Vec<f64> = b.iter().zip(&m).map(|(x, y)| x * x * y).collect();
        let mu = g.moment(&b2m, crate::velocity::Weight::One).unwrap();
        assert!((mu - 3.0 / 16.0).abs() < 1e-10);
        for du in [-3.0, 0.0, 0.7, 12.5] {
            assert_eq!(strain_factor_1d(du), 0.0);
        }
    }

    #[test]
    fn leading_g_properties() {
        let g = grid();
        let state = [1.0, 0.0, 0.5];
        let zero = ce_leading_g(state, 0.0, &g).unwrap();
        assert!(zero.iter().all(|&x| x == 0.0));
        let lead = ce_leading_g(state, 1.0, &g).unwrap();
        let mom = g.moment_vector(&lead).unwrap();
        assert!(mom.iter().all(|x| x.abs() < 1e-10));
        let heat = g.moment(&lead, crate::velocity::Weight::Custom(&|v| 0.5 * v * v * v)).unwrap();
        assert!((heat + 1.5).abs() < 1e-8);
        // matches −A r M/√T assembled from the public pieces
        let a = ce_factor_a(&g, 0.0, 1.0);
        let m = maxwellian(1.0, 0.0, 1.0, &g);
        for ((l, aj), mj) in lead.iter().zip(&a).zip(&m) {
            assert!((l + aj * mj).abs() < 1e-15);
        }
    }

    #[test]
    fn heat_flux_of_leading_g_is_minus_kappa_r() {
        let g = grid();
        let (rho, u, t, r) = (1.2, 0.5, 0.8, -0.7);
        let lead = ce_leading_g(MacroState::from_primitive(rho, u, t).to_array(), r, &g).unwrap();
        let q = rescaled_heat_flux(&lead, u, &g);
        assert!((q + 1.5 * rho * t * r).abs() < 1e-8);
        let m = maxwellian(1.0, 0.0, 1.0, &g);
        assert!(rescaled_heat_flux(&m, 0.0, &g).abs() < 1e-14);
        assert_eq!(rescaled_heat_flux(&vec![0.0; 100], 0.3, &g), 0.0);
    }
}
