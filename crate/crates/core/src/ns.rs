//! Local DG discretization of the one-dimensional compressible
//! Navier–Stokes limit, `κ = (3/2)ρT`, with no viscous stress (`σ = 0` in 1D).

use crate::dg::{Discretization, MacroField};
use crate::error::{BgkError, Result};
use crate::imex::ButcherPair;
use crate::limiter::{tvb_limit, LimiterConfig};

/// Nodal viscous flux moments `(0, 0, −(3/2) ρ T r_h)`.
pub fn viscous_moments(disc: &Discretization, u: &MacroField) -> Result<Vec<[f64; 3]>> {
    let prims = u.primitives(&disc.mesh, &disc.basis)?;
    let t: Vec<f64> = prims.iter().map(|p| p.t).collect();
    let r = disc.compute_r(&t)?;
    Ok(prims
        .iter()
        .zip(&r)
        .map(|(p, &ri)| [0.0, 0.0, -1.5 * p.rho * p.t * ri])
        .collect())
}

/// `dU/dt` of the Euler equations plus `ε` times the heat-conduction flux.
///
/// The viscous interface flux takes the side opposite to `T̂`, as the
/// `⟨vmg⟩` flux does in the kinetic scheme. `alpha` fixes the
/// Lax–Friedrichs speed; `None` computes it from `u`.
pub fn ns_rhs(disc: &Discretization, u: &MacroField, alpha: Option<f64>) -> Result<MacroField> {
    let vis = viscous_moments(disc, u)?;
    disc.macro_rhs_with_moments(u, Some(&vis), alpha)
}

/// Diffusion number bound `C_ν` per `q` for the explicit viscous term.
pub fn viscous_constant(q: usize) -> Result<f64> {
    match q {
        1 => Ok(0.25),
        2 => Ok(0.03),
        3 => Ok(0.008),
        4 => Ok(0.002),
        _ => Err(BgkError::invalid(format!("no viscous step rule for q = {q}"))),
    }
}

/// `Δt ≤ C_ν h² / κ` with `κ = 3 ε_max max(ρT) / min(ρ)`: conductivity from
/// the densest point acting on the lightest heat capacity `ρ/2`.
/// Infinite when `ε` vanishes.
pub fn viscous_dt(disc: &Discretization, u: &MacroField) -> Result<f64> {
    let prims = u.primitives(&disc.mesh, &disc.basis)?;
    let eps_max = disc.eps.nodal().iter().fold(0.0f64, |a, &e| a.max(e));
    let p_max = prims.iter().fold(0.0f64, |a, p| a.max(p.p));
    let rho_min = prims.iter().fold(f64::INFINITY, |a, p| a.min(p.rho));
    let kappa = 3.0 * eps_max * p_max / rho_min;
    if kappa == 0.0 {
        return Ok(f64::INFINITY);
    }
    let h_min = (0..disc.mesh.nx()).map(|i| disc.mesh.h(i)).fold(f64::INFINITY, f64::min);
    Ok(viscous_constant(disc.q())? * h_min * h_min / kappa)
}

/// One explicit Runge–Kutta step with the explicit table of `pair`.
pub fn ns_step(
    disc: &Discretization,
    u: &MacroField,
    dt: f64,
    pair: &ButcherPair,
    limiter: Option<&LimiterConfig>,
    step_index: usize,
) -> Result<MacroField> {
    explicit_rk(disc, u, dt, pair, limiter, step_index, true)
}

/// Same as [`ns_step`] with the viscous term dropped.
pub fn euler_step(
    disc: &Discretization,
    u: &MacroField,
    dt: f64,
    pair: &ButcherPair,
    limiter: Option<&LimiterConfig>,
    step_index: usize,
) -> Result<MacroField> {
    explicit_rk(disc, u, dt, pair, limiter, step_index, false)
}

fn explicit_rk(
    disc: &Discretization,
    u: &MacroField,
    dt: f64,
    pair: &ButcherPair,
    limiter: Option<&LimiterConfig>,
    step_index: usize,
    viscous: bool,
) -> Result<MacroField> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(BgkError::invalid(format!("time step must be positive, got {dt}")));
    }
    let limiter = limiter.filter(|l| l.enabled);
    let limit = |v: MacroField| match limiter {
        Some(cfg) => tvb_limit(&v, &disc.basis, &disc.mesh, cfg),
        None => Ok(v),
    };
    let alpha = Discretization::max_wave_speed(
        &u.primitives(&disc.mesh, &disc.basis)
            .map_err(|e| e.in_stage(step_index, 0))?,
    );
    let s = pair.stages();
    let b = pair.b_exp();
    let needed: Vec<bool> = (0..s)
        .map(|j| b[j] != 0.0 || (j + 1..s).any(|l| pair.a_exp(l, j) != 0.0))
        .collect();
    let mut k: Vec<Option<MacroField>> = Vec::with_capacity(s);
    let mut last = u.clone();
    for l in 0..s {
        let err = |e: BgkError| e.in_stage(step_index, l + 1);
        let mut ul = u.clone();
        for j in 0..l {
            let a = pair.a_exp(l, j);
            if a != 0.0 {
                ul.axpy(dt * a, k[j].as_ref().expect("stage derivative retained"));
            }
        }
        let ul = limit(ul).map_err(err)?;
        let kl = if needed[l] {
            let rhs = if viscous {
                ns_rhs(disc, &ul, Some(alpha))
            } else {
                disc.macro_rhs_with_moments(&ul, None, Some(alpha))
            };
            Some(rhs.map_err(err)?)
        } else {
            None
        };
        k.push(kl);
        last = ul;
    }
    if pair.is_gsa() {
        return Ok(last);
    }
    let mut out = u.clone();
    for j in 0..s {
        if b[j] != 0.0 {
            out.axpy(dt * b[j], k[j].as_ref().expect("stage derivative retained"));
        }
    }
    let out = limit(out).map_err(|e| e.in_stage(step_index, s + 1))?;
    out.primitives(&disc.mesh, &disc.basis)
        .map_err(|e| e.in_stage(step_index, s + 1))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::{BoundaryKind, EpsProfile, FluxSelect, Mesh1D};
    use crate::kinetic::MacroState;
    use crate::quadrature::NodalBasis;
    use crate::velocity::VelocityGrid;

    fn disc(eps: f64, flux: FluxSelect) -> Discretization {
        let pi = std::f64::consts::PI;
        Discretization::new(
            NodalBasis::new(3).unwrap(),
            Mesh1D::uniform(-pi, pi, 16, BoundaryKind::Periodic).unwrap(),
            VelocityGrid::new(12.0, 8).unwrap(),
            EpsProfile::Constant(eps),
            flux,
        )
        .unwrap()
    }

    fn smooth(d: &Discretization) -> MacroField {
        MacroField::from_fn(&d.mesh, &d.basis, |x| {
            MacroState::from_rho_u_p(1.0 + 0.2 * x.sin(), 1.0, 1.0).to_array()
        })
    }

    #[test]
    fn viscous_dt_formula() {
        let d = disc(0.1, FluxSelect::AltLr);
        let u = MacroField::from_fn(&d.mesh, &d.basis, |_| MacroState::from_rho_u_p(0.5, 0.2, 2.0).to_array());
        let h = d.mesh.h(0);
        let expect = 0.008 * h * h / (3.0 * 0.1 * 2.0 / 0.5);
        assert!((viscous_dt(&d, &u).unwrap() - expect).abs() < 1e-12 * expect);
        assert_eq!(viscous_dt(&disc(0.0, FluxSelect::AltLr), &u).unwrap(), f64::INFINITY);
    }

    #[test]
    fn constant_state_is_stationary() {
        let d = disc(0.1, FluxSelect::AltLr);
        let u = MacroField::from_fn(&d.mesh, &d.basis, |_| [1.0, 0.3, 0.9]);
        assert!(ns_rhs(&d, &u, None).unwrap().flat().iter().all(|x| x.abs() < 1e-13));
        let next = ns_step(&d, &u, 1e-3, &ButcherPair::euler(), None, 0).unwrap();
        for (a, b) in next.flat().iter().zip(u.flat()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_eps_is_euler_and_viscosity_only_hits_energy() {
        let d0 = disc(0.0, FluxSelect::AltLr);
        let u = smooth(&d0);
        assert_eq!(ns_rhs(&d0, &u, None).unwrap(), d0.macro_rhs_with_moments(&u, None, None).unwrap());
        let d = disc(0.1, FluxSelect::Central);
        let a = ns_rhs(&d, &u, None).unwrap();
        let b = d.macro_rhs_with_moments(&u, None, None).unwrap();
        let mut energy_differs = false;
        for (x, y) in a.nodes().iter().zip(b.nodes()) {
            assert_eq!(x[0], y[0]);
            assert_eq!(x[1], y[1]);
            energy_differs |= x[2] != y[2];
        }
        assert!(energy_differs);
    }

    #[test]
    fn total_energy_conserved() {
        let d = disc(0.05, FluxSelect::AltLr);
        let mut u = smooth(&d);
        let e0 = u.integral(&d.mesh, &d.basis);
        let pair = ButcherPair::ars443();
        for n in 0..50 {
            u = ns_step(&d, &u, 2e-3, &pair, None, n).unwrap();
        }
        let e1 = u.integral(&d.mesh, &d.basis);
        for c in 0..3 {
            assert!((e1[c] - e0[c]).abs() <= 1e-12 * e0[c].abs().max(1.0), "{c}");
        }
    }

    #[test]
    fn constant_temperature_has_no_heat_flux() {
        let d = disc(0.5, FluxSelect::AltLr);
        let u = MacroField::from_fn(&d.mesh, &d.basis, |x| {
            MacroState::from_primitive(1.0 + 0.3 * x.cos(), 0.4, 0.7).to_array()
        });
        let vis = viscous_moments(&d, &u).unwrap();
        assert!(vis.iter().all(|m| m[2].abs() < 1e-12 && m[0] == 0.0 && m[1] == 0.0));
    }
}
