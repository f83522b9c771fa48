//! Registry of the benchmark problems and the initial data generators.

use std::fmt;
use std::str::FromStr;

use crate::dg::{BoundaryKind, EpsProfile, FluxSelect};
use crate::error::{BgkError, Result};
use crate::kinetic::{self, MacroState};
use crate::limiter::{LimitVariables, LimiterConfig};
use crate::schemes::Scheme;
use crate::velocity::VelocityGrid;

/// Which model and integrator advance the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Micro-macro BGK with the IMEX pair.
    Bgk(Scheme),
    /// Local DG Navier–Stokes with the explicit table of the pair.
    #[default]
    Ns,
    Euler,
    /// Full distribution, first-order upwind in space, forward Euler in time.
    ExplicitBgk,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Bgk(Scheme::One) => "scheme1",
            SolverKind::Bgk(Scheme::Two) => "scheme2",
            SolverKind::Ns => "ns",
            SolverKind::Euler => "euler",
            SolverKind::ExplicitBgk => "explicit-bgk",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scheme1" | "bgk1" => Ok(SolverKind::Bgk(Scheme::One)),
            "scheme2" | "bgk2" | "bgk" => Ok(SolverKind::Bgk(Scheme::Two)),
            "ns" | "navier-stokes" => Ok(SolverKind::Ns),
            "euler" => Ok(SolverKind::Euler),
            "explicit-bgk" | "explicit" => Ok(SolverKind::ExplicitBgk),
            other => Err(BgkError::invalid(format!("unknown solver '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySpec {
    Periodic,
    /// Ghost states fixed to the initial data at the two ends.
    DirichletInitial,
    Extrapolate,
}

impl FromStr for BoundarySpec {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(BoundarySpec::Periodic),
            "dirichlet" | "inflow" => Ok(BoundarySpec::DirichletInitial),
            "extrapolate" | "outflow" => Ok(BoundarySpec::Extrapolate),
            other => Err(BgkError::invalid(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Initial macroscopic and kinetic data.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `ρ = 1 + 0.2 sin x`, `u = 1`, `p = 1`, with the leading-order `g`.
    Smooth,
    /// Piecewise constant `(ρ, u, p)` states separated at `x0`, `g = 0`.
    Riemann { left: [f64; 3], right: [f64; 3], x0: f64 },
    /// Shock at `x0` running into `ρ = 1 + 0.1 sin x`, `u = 0`, `p = 1`.
    ShuOsher { left: [f64; 3], x0: f64 },
    /// Sum of two shifted Maxwellians of drift `±u_tilde`.
    DoubleMaxwellian { u_tilde: f64 },
}

impl InitialData {
    /// Conserved state at `x`.
    pub fn state(&self, x: f64) -> [f64; 3] {
        match self {
            InitialData::Smooth => MacroState::from_rho_u_p(1.0 + 0.2 * x.sin(), 1.0, 1.0).to_array(),
            InitialData::Riemann { left, right, x0 } => {
                let s = if x <= *x0 { left } else { right };
                MacroState::from_rho_u_p(s[0], s[1], s[2]).to_array()
            }
            InitialData::ShuOsher { left, x0 } => {
                if x < *x0 {
                    MacroState::from_rho_u_p(left[0], left[1], left[2]).to_array()
                } else {
                    MacroState::from_rho_u_p(1.0 + 0.1 * x.sin(), 0.0, 1.0).to_array()
                }
            }
            InitialData::DoubleMaxwellian { u_tilde } => {
                let (rho, t) = mixed_profiles(x);
                MacroState::from_primitive(rho, 0.0, t + u_tilde * u_tilde).to_array()
            }
        }
    }

    /// Initial `g` at `x`, given the local Knudsen number.
    pub fn g(&self, x: f64, eps: f64, grid: &VelocityGrid, out: &mut [f64]) -> Result<()> {
        match self {
            InitialData::Smooth => {
                let rho = 1.0 + 0.2 * x.sin();
                let dtdx = -0.2 * x.cos() / (rho * rho);
                out.copy_from_slice(&kinetic::ce_leading_g(self.state(x), dtdx, grid)?);
            }
            InitialData::Riemann { .. } | InitialData::ShuOsher { .. } => out.fill(0.0),
            InitialData::DoubleMaxwellian { .. } => {
                if !(eps > 0.0) {
                    return Err(BgkError::invalid("double-Maxwellian data need a positive Knudsen number"));
                }
                let f = self.f(x, eps, grid)?;
                let m = kinetic::maxwellian_of(self.state(x), grid)?;
                for ((o, fj), mj) in out.iter_mut().zip(f).zip(m) {
                    *o = (fj - mj) / eps;
                }
            }
        }
        Ok(())
    }

    /// Initial full distribution `f` at `x`.
    pub fn f(&self, x: f64, eps: f64, grid: &VelocityGrid) -> Result<Vec<f64>> {
        match self {
            InitialData::DoubleMaxwellian { u_tilde } => {
                let (rho, t) = mixed_profiles(x);
                let a = kinetic::maxwellian(0.5 * rho, *u_tilde, t, grid);
                let b = kinetic::maxwellian(0.5 * rho, -*u_tilde, t, grid);
                Ok(a.iter().zip(&b).map(|(p, q)| p + q).collect())
            }
            _ => {
                let mut m = kinetic::maxwellian_of(self.state(x), grid)?;
                if eps > 0.0 {
                    let mut g = vec![0.0; grid.len()];
                    self.g(x, eps, grid, &mut g)?;
                    for (mj, gj) in m.iter_mut().zip(g) {
                        *mj += eps * gj;
                    }
                }
                Ok(m)
            }
        }
    }

    /// Position of the initial discontinuity, if any.
    pub fn jump(&self) -> Option<f64> {
        match self {
            InitialData::Riemann { x0, .. } | InitialData::ShuOsher { x0, .. } => Some(*x0),
            _ => None,
        }
    }
}

/// `(ρ̃, T̃)` of the mixed-regime data: `1 + 0.875 sin(2πx)`, `0.5 + 0.4 sin(2πx)`.
fn mixed_profiles(x: f64) -> (f64, f64) {
    let s = (2.0 * std::f64::consts::PI * x).sin();
    (1.0 + 0.875 * s, 0.5 + 0.4 * s)
}

/// Full description of one run.
#[derive(Debug, Clone)]
pub struct CaseSpec {
    pub name: String,
    pub domain: (f64, f64),
    pub v_cut: f64,
    pub nx: usize,
    pub nv: usize,
    pub q: usize,
    pub eps: EpsProfile,
    pub t_end: f64,
    pub boundary: BoundarySpec,
    pub initial: InitialData,
    pub limiter: LimiterConfig,
    pub flux: FluxSelect,
    pub solver: SolverKind,
    pub pair: String,
    /// Overrides the per-degree CFL constant.
    pub cfl: Option<f64>,
    /// Where the distribution slice is recorded.
    pub probe_x: Option<f64>,
}

pub const CASE_NAMES: [&str; 6] = ["smooth", "sod", "lax", "shu-osher", "shu-osher-compare", "mixed"];

impl CaseSpec {
    fn base(name: &str, domain: (f64, f64), v_cut: f64, nx: usize, t_end: f64, initial: InitialData) -> Self {
        CaseSpec {
            name: name.to_string(),
            domain,
            v_cut,
            nx,
            nv: 100,
            q: 3,
            eps: EpsProfile::Constant(1e-6),
            t_end,
            boundary: BoundarySpec::DirichletInitial,
            initial,
            limiter: LimiterConfig::default(),
            flux: FluxSelect::AltLr,
            solver: SolverKind::Bgk(Scheme::Two),
            pair: "ars443".to_string(),
            cfl: None,
            probe_x: None,
        }
    }

    /// Smooth periodic problem on `[−π, π]`; no limiter.
    pub fn smooth() -> Self {
        let pi = std::f64::consts::PI;
        CaseSpec {
            eps: EpsProfile::Constant(1.0),
            boundary: BoundarySpec::Periodic,
            limiter: LimiterConfig::off(),
            probe_x: Some(0.0),
            ..Self::base("smooth", (-pi, pi), 12.0, 10, 0.001, InitialData::Smooth)
        }
    }

    /// Sod tube. Limits characteristic fields: component-wise limiting loses
    /// positivity of T near the shock shortly after start-up for q ≥ 2.
    pub fn sod() -> Self {
        CaseSpec {
            probe_x: Some(0.5),
            limiter: LimiterConfig::default().with_variables(LimitVariables::Characteristic),
            ..Self::base(
                "sod",
                (-0.2, 1.2),
                4.5,
                50,
                0.14,
                InitialData::Riemann {
                    left: [1.0, 0.0, 1.0],
                    right: [0.125, 0.0, 0.1],
                    x0: 0.5,
                },
            )
        }
    }

    pub fn lax() -> Self {
        CaseSpec {
            probe_x: Some(0.5),
            ..Self::base(
                "lax",
                (-0.5, 1.5),
                8.0,
                100,
                0.1,
                InitialData::Riemann {
                    left: [0.445, 0.698, 3.528],
                    right: [0.5, 0.0, 0.571],
                    x0: 0.5,
                },
            )
        }
    }

    pub fn shu_osher() -> Self {
        CaseSpec {
            boundary: BoundarySpec::Extrapolate,
            probe_x: Some(0.0),
            ..Self::base(
                "shu-osher",
                (-12.0, 12.0),
                10.0,
                200,
                1.0,
                InitialData::ShuOsher {
                    left: [1.756757, 2.005122, 10.333333],
                    x0: -2.0,
                },
            )
        }
    }

    /// Coarse-mesh Shu–Osher variant with `M_tvb = 1`.
    pub fn shu_osher_compare() -> Self {
        CaseSpec {
            name: "shu-osher-compare".to_string(),
            nx: 100,
            limiter: LimiterConfig::tvb(1.0).expect("valid constant"),
            ..Self::shu_osher()
        }
    }

    /// Variable Knudsen number `ε₀ + ½(tanh(1 − a₀x) + tanh(1 + a₀x))` on `[−0.5, 0.5]`.
    pub fn mixed(a0: f64, eps0: f64) -> Self {
        CaseSpec {
            eps: EpsProfile::Tanh { eps0, a0 },
            boundary: BoundarySpec::Periodic,
            probe_x: Some(0.0),
            ..Self::base("mixed", (-0.5, 0.5), 10.0, 40, 0.1, InitialData::DoubleMaxwellian { u_tilde: 0.75 })
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "smooth" => Ok(Self::smooth()),
            "sod" => Ok(Self::sod()),
            "lax" => Ok(Self::lax()),
            "shu-osher" | "shu_osher" => Ok(Self::shu_osher()),
            "shu-osher-compare" => Ok(Self::shu_osher_compare()),
            "mixed" => Ok(Self::mixed(11.0, 1e-6)),
            other => Err(BgkError::invalid(format!(
                "unknown case '{other}' (expected one of {})",
                CASE_NAMES.join(", ")
            ))),
        }
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        match self.boundary {
            BoundarySpec::Periodic => BoundaryKind::Periodic,
            BoundarySpec::Extrapolate => BoundaryKind::Extrapolate,
            BoundarySpec::DirichletInitial => BoundaryKind::Dirichlet {
                left: self.initial.state(self.domain.0),
                right: self.initial.state(self.domain.1),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BgkError::Config(m));
        if !(self.domain.1 > self.domain.0) {
            return bad(format!("empty domain {:?}", self.domain));
        }
        if self.nx == 0 {
            return bad("nx must be positive".into());
        }
        if self.nv == 0 || !self.nv.is_multiple_of(2) {
            return bad(format!("nv must be positive and even, got {}", self.nv));
        }
        if !(1..=crate::quadrature::MAX_NODES).contains(&self.q) {
            return bad(format!("q must lie in 1..={}, got {}", crate::quadrature::MAX_NODES, self.q));
        }
        if !(self.v_cut > 0.0) {
            return bad(format!("velocity cutoff must be positive, got {}", self.v_cut));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("final time must be non-negative, got {}", self.t_end));
        }
        if !(self.limiter.m_tvb >= 0.0) {
            return bad("TVB constant must be non-negative".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::riemann::{rankine_hugoniot_residual, GasState};

    #[test]
    fn smooth_initial_values() {
        let c = CaseSpec::smooth();
        assert_eq!(c.initial.state(0.0)[0], 1.0);
        assert!((c.initial.state(std::f64::consts::FRAC_PI_2)[0] - 1.2).abs() < 1e-15);
        let p = kinetic::primitives(c.initial.state(0.0)).unwrap();
        assert!((p.t - 1.0).abs() < 1e-15);
        let grid = VelocityGrid::new(12.0, 100).unwrap();
        let mut g = vec![0.0; 100];
        c.initial.g(0.0, 1.0, &grid, &mut g).unwrap();
        // Q_ε = −(3/2) ρ T ∂ₓT with ∂ₓT(0) = −0.2
        let q = kinetic::rescaled_heat_flux(&g, 1.0, &grid);
        assert!((q - 0.3).abs() < 1e-8, "{q}");
    }

    #[test]
    fn sod_left_state() {
        assert_eq!(CaseSpec::sod().initial.state(0.0), [1.0, 0.0, 0.5]);
        assert_eq!(CaseSpec::sod().initial.state(0.9), [0.125, 0.0, 0.05]);
    }

    #[test]
    fn shu_osher_left_state_satisfies_jump_conditions() {
        let (s, res) = rankine_hugoniot_residual(
            GasState::new(1.756757, 2.005122, 10.333333),
            GasState::new(1.0, 0.0, 1.0),
            3.0,
        );
        assert!(res < 1e-5, "{res}");
        assert!((s - 4.6547466).abs() < 1e-4, "{s}");
    }

    #[test]
    fn mixed_eps_profile_and_moments() {
        let c = CaseSpec::mixed(11.0, 1e-6);
        assert!((c.eps.eval(0.0) - (1e-6 + 1f64.tanh())).abs() < 1e-15);
        let grid = VelocityGrid::new(10.0, 200).unwrap();
        for x in [-0.3, 0.0, 0.17] {
            let f = c.initial.f(x, c.eps.eval(x), &grid).unwrap();
            let m = grid.moment_vector(&f).unwrap();
            let u = c.initial.state(x);
            for k in 0..3 {
                assert!((m[k] - u[k]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn registry_lookup() {
        for n in CASE_NAMES {
            let c = CaseSpec::by_name(n).unwrap();
            c.validate().unwrap();
        }
        assert!(CaseSpec::by_name("nope").is_err());
        assert_eq!(CaseSpec::shu_osher_compare().nx, 100);
        assert_eq!(CaseSpec::shu_osher().nx, 200);
    }
}
