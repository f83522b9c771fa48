//! Time loop shared by the CLI, the studies and the C interface.

use std::time::Instant;

use crate::dg::{Discretization, KineticField, MacroField, Mesh1D};
use crate::error::{BgkError, Result};
use crate::harness::cases::{CaseSpec, SolverKind};
use crate::harness::metrics;
use crate::imex::{cfl_dt, ButcherPair, ImexStepper};
use crate::kinetic::{self, primitives};
use crate::ns;
use crate::quadrature::NodalBasis;
use crate::schemes::{kinetic_moments, rhs_explicit_bgk, Scheme};
use crate::velocity::VelocityGrid;

/// Relative tolerance below which the remaining time is treated as zero.
const TIME_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
enum SolverState {
    MicroMacro { u: MacroField, g: KineticField, scheme: Scheme },
    Macro { u: MacroField, viscous: bool },
    Kinetic { f: KineticField },
}

/// Nodal profiles at the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub q_eps: Vec<f64>,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Distribution slice at the node nearest a probe position.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub x: f64,
    pub v: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub case: String,
    pub solver: SolverKind,
    pub t: f64,
    pub steps: usize,
    pub wall_seconds: f64,
    pub profile: Profile,
    /// Rows `(t, max|ε⟨g⟩|, max|ε⟨vg⟩|, max|ε⟨v²g/2⟩|)`.
    pub conservation: Vec<[f64; 4]>,
    pub probe: Option<Probe>,
    pub mesh: Mesh1D,
    pub q: usize,
    pub macro_field: MacroField,
    pub g: Option<KineticField>,
    pub nv: usize,
}

pub struct Simulation {
    case: CaseSpec,
    disc: Discretization,
    pair: ButcherPair,
    state: SolverState,
    t: f64,
    steps: usize,
    conservation: Vec<[f64; 4]>,
    wall_seconds: f64,
}

impl Simulation {
    pub fn new(case: CaseSpec) -> Result<Self> {
        case.validate()?;
        let basis = NodalBasis::new(case.q)?;
        let mesh = Mesh1D::uniform(case.domain.0, case.domain.1, case.nx, case.boundary_kind())?;
        let grid = VelocityGrid::new(case.v_cut, case.nv)?;
        let disc = Discretization::new(basis, mesh, grid, case.eps.clone(), case.flux)?;
        let pair = ButcherPair::by_name(&case.pair)?;
        let init = &case.initial;
        let u = MacroField::from_fn(&disc.mesh, &disc.basis, |x| init.state(x));
        u.primitives(&disc.mesh, &disc.basis)?;
        let xs = disc.mesh.node_coordinates(&disc.basis);
        let nv = disc.nv();
        let state = match case.solver {
            SolverKind::Bgk(scheme) => {
                let mut n = 0;
                let g = KineticField::from_fn(&disc.mesh, &disc.basis, nv, |x, out| {
                    let e = disc.eps.nodal()[n];
                    n += 1;
                    init.g(x, e, &disc.grid, out)
                })?;
                SolverState::MicroMacro { u, g, scheme }
            }
            SolverKind::Ns => SolverState::Macro { u, viscous: true },
            SolverKind::Euler => SolverState::Macro { u, viscous: false },
            SolverKind::ExplicitBgk => {
                let mut f = KineticField::zeros(disc.nx(), disc.q(), nv);
                for (n, &x) in xs.iter().enumerate() {
                    let v = init.f(x, disc.eps.nodal()[n], &disc.grid)?;
                    f.node_mut(n).copy_from_slice(&v);
                }
                SolverState::Kinetic { f }
            }
        };
        let mut sim = Simulation {
            case,
            disc,
            pair,
            state,
            t: 0.0,
            steps: 0,
            conservation: Vec::new(),
            wall_seconds: 0.0,
        };
        sim.record_conservation();
        Ok(sim)
    }

    pub fn case(&self) -> &CaseSpec {
        &self.case
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn node_count(&self) -> usize {
        self.disc.node_count()
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.case.t_end * (1.0 - TIME_TOL)
    }

    /// Conserved variables at the nodes.
    pub fn macro_field(&self) -> Result<MacroField> {
        match &self.state {
            SolverState::MicroMacro { u, .. } | SolverState::Macro { u, .. } => Ok(u.clone()),
            SolverState::Kinetic { f } => kinetic_moments(&self.disc, f),
        }
    }

    /// The micro part `g`; for the full distribution `(f − M)/ε`.
    pub fn kinetic_g(&self) -> Result<Option<KineticField>> {
        match &self.state {
            SolverState::MicroMacro { g, .. } => Ok(Some(g.clone())),
            SolverState::Macro { .. } => Ok(None),
            SolverState::Kinetic { f } => {
                let u = kinetic_moments(&self.disc, f)?;
                let prims = u.primitives(&self.disc.mesh, &self.disc.basis)?;
                let m = self.disc.maxwellians(&prims);
                let mut g = f.clone();
                g.axpy(-1.0, &m);
                for n in 0..g.node_count() {
                    let e = self.disc.eps.nodal()[n];
                    for x in g.node_mut(n) {
                        *x /= e;
                    }
                }
                Ok(Some(g))
            }
        }
    }

    /// Stable step size from the current state (before clamping).
    pub fn stable_dt(&self) -> Result<f64> {
        let u = self.macro_field()?;
        let dt = cfl_dt(&self.disc, &u, self.case.cfl)?;
        Ok(match self.state {
            SolverState::Kinetic { .. } => dt.min(self.disc.eps.min()),
            SolverState::Macro { viscous: true, .. } => dt.min(ns::viscous_dt(&self.disc, &u)?),
            _ => dt,
        })
    }

    /// Advances by one stable step, clamped to `t_end`; returns the step taken.
    pub fn step(&mut self) -> Result<f64> {
        let target = self.case.t_end;
        self.step_toward(target)
    }

    fn step_toward(&mut self, target: f64) -> Result<f64> {
        let remaining = target - self.t;
        if remaining <= TIME_TOL * target.abs().max(1.0) {
            return Ok(0.0);
        }
        let mut dt = self.stable_dt()?;
        if dt >= remaining {
            dt = remaining;
        }
        self.step_with(dt)?;
        if (target - self.t).abs() <= TIME_TOL * target.abs().max(1.0) {
            self.t = target;
        }
        Ok(dt)
    }

    /// Advances by exactly `dt`.
    pub fn step_with(&mut self, dt: f64) -> Result<()> {
        let started = Instant::now();
        let index = self.steps + 1;
        let disc = &self.disc;
        let limiter = Some(&self.case.limiter).filter(|l| l.enabled);
        let next = match &self.state {
            SolverState::MicroMacro { u, g, scheme } => {
                let out = ImexStepper::new(disc, &self.pair, *scheme)
                    .with_limiter(limiter)
                    .step(u, g, dt, index)?;
                SolverState::MicroMacro {
                    u: out.u,
                    g: out.g,
                    scheme: *scheme,
                }
            }
            SolverState::Macro { u, viscous } => {
                let u = if *viscous {
                    ns::ns_step(disc, u, dt, &self.pair, limiter, index)?
                } else {
                    ns::euler_step(disc, u, dt, &self.pair, limiter, index)?
                };
                SolverState::Macro { u, viscous: *viscous }
            }
            SolverState::Kinetic { f } => {
                let rhs = rhs_explicit_bgk(disc, f).map_err(|e| e.in_stage(index, 1))?;
                let mut f = f.clone();
                f.axpy(dt, &rhs);
                kinetic_moments(disc, &f)?
                    .primitives(&disc.mesh, &disc.basis)
                    .map_err(|e| e.in_stage(index, 2))?;
                SolverState::Kinetic { f }
            }
        };
        self.state = next;
        self.t += dt;
        self.steps += 1;
        self.record_conservation();
        self.wall_seconds += started.elapsed().as_secs_f64();
        Ok(())
    }

    /// Steps until `t` (clamped to the final time of the case).
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(BgkError::invalid("target time must be finite"));
        }
        let target = t.min(self.case.t_end);
        while self.step_toward(target)? > 0.0 {}
        Ok(())
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        let t_end = self.case.t_end;
        self.advance_to(t_end)
    }

    fn record_conservation(&mut self) {
        if let SolverState::MicroMacro { g, .. } = &self.state {
            let c = metrics::conservation_defect(g, self.disc.eps.nodal(), &self.disc.grid);
            self.conservation.push([self.t, c[0], c[1], c[2]]);
        }
    }

    /// `max_x |ε⟨m g⟩|` now; zeros for solvers without a micro part.
    pub fn conservation_defect(&self) -> [f64; 3] {
        match &self.state {
            SolverState::MicroMacro { g, .. } => {
                metrics::conservation_defect(g, self.disc.eps.nodal(), &self.disc.grid)
            }
            _ => [0.0; 3],
        }
    }

    pub fn conservation_series(&self) -> &[[f64; 4]] {
        &self.conservation
    }

    pub fn profile(&self) -> Result<Profile> {
        let disc = &self.disc;
        let u = self.macro_field()?;
        let prims = u.primitives(&disc.mesh, &disc.basis)?;
        let x = disc.mesh.node_coordinates(&disc.basis);
        let q_eps = match &self.state {
            SolverState::MicroMacro { g, .. } => (0..g.node_count())
                .map(|n| kinetic::rescaled_heat_flux(g.node(n), prims[n].u, &disc.grid))
                .collect(),
            SolverState::Macro { viscous: true, .. } => ns::viscous_moments(disc, &u)?
                .iter()
                .map(|m| m[2])
                .collect(),
            SolverState::Macro { viscous: false, .. } => vec![0.0; x.len()],
            SolverState::Kinetic { .. } => {
                let g = self.kinetic_g()?.expect("kinetic state has g");
                (0..g.node_count())
                    .map(|n| kinetic::rescaled_heat_flux(g.node(n), prims[n].u, &disc.grid))
                    .collect()
            }
        };
        Ok(Profile {
            rho: prims.iter().map(|p| p.rho).collect(),
            u: prims.iter().map(|p| p.u).collect(),
            t: prims.iter().map(|p| p.t).collect(),
            p: prims.iter().map(|p| p.p).collect(),
            q_eps,
            x,
        })
    }

    /// `f` and `g` at the node nearest `x`.
    pub fn probe(&self, x: f64) -> Result<Probe> {
        let disc = &self.disc;
        let xs = disc.mesh.node_coordinates(&disc.basis);
        let n = xs
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .map(|(n, _)| n)
            .ok_or_else(|| BgkError::invalid("empty mesh"))?;
        let u = self.macro_field()?;
        let p = primitives(u.nodes()[n])?;
        let m = kinetic::maxwellian(p.rho, p.u, p.t, &disc.grid);
        let e = disc.eps.nodal()[n];
        let (f, g) = match &self.state {
            SolverState::Kinetic { f } => {
                let f = f.node(n).to_vec();
                let g = f.iter().zip(&m).map(|(a, b)| (a - b) / e).collect();
                (f, g)
            }
            _ => {
                let g = match self.kinetic_g()? {
                    Some(g) => g.node(n).to_vec(),
                    None => vec![0.0; disc.nv()],
                };
                (m.iter().zip(&g).map(|(a, b)| a + e * b).collect(), g)
            }
        };
        Ok(Probe {
            x: xs[n],
            v: disc.grid.points().to_vec(),
            f,
            g,
        })
    }

    pub fn output(&self) -> Result<RunOutput> {
        let probe = match self.case.probe_x {
            Some(x) => Some(self.probe(x)?),
            None => None,
        };
        Ok(RunOutput {
            case: self.case.name.clone(),
            solver: self.case.solver,
            t: self.t,
            steps: self.steps,
            wall_seconds: self.wall_seconds,
            profile: self.profile()?,
            conservation: self.conservation.clone(),
            probe,
            mesh: self.disc.mesh.clone(),
            q: self.disc.q(),
            macro_field: self.macro_field()?,
            g: self.kinetic_g()?,
            nv: self.disc.nv(),
        })
    }
}

/// Builds, runs to the final time and collects the output.
pub fn run(case: CaseSpec) -> Result<RunOutput> {
    let name = case.name.clone();
    let mut sim = Simulation::new(case).map_err(|e| e.in_case(&name))?;
    sim.run_to_end().map_err(|e| e.in_case(&name))?;
    sim.output().map_err(|e| e.in_case(&name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::EpsProfile;

    #[test]
    fn lands_exactly_on_final_time() {
        let mut c = CaseSpec::smooth();
        c.t_end = 0.0123;
        c.q = 2;
        let out = run(c).unwrap();
        assert_eq!(out.t, 0.0123);
        assert!(out.steps > 1);
        assert_eq!(out.conservation.len(), out.steps + 1);
    }

    #[test]
    fn all_solvers_run_on_sod() {
        for solver in ["scheme1", "scheme2", "ns", "euler", "explicit-bgk"] {
            let mut c = CaseSpec::sod();
            c.nx = 20;
            c.nv = 40;
            c.t_end = 0.002;
            c.eps = EpsProfile::Constant(1e-2);
            c.solver = solver.parse().unwrap();
            if solver == "explicit-bgk" {
                c.q = 1;
            }
            let out = run(c).unwrap();
            assert_eq!(out.t, 0.002);
            assert!(out.profile.rho.iter().all(|r| *r > 0.05 && *r < 1.2), "{solver}");
        }
    }

    #[test]
    fn deterministic() {
        let mut c = CaseSpec::sod();
        c.nx = 16;
        c.t_end = 0.003;
        let a = run(c.clone()).unwrap();
        let b = run(c).unwrap();
        assert_eq!(a.profile, b.profile);
    }

    #[test]
    fn advance_in_pieces_matches_single_run() {
        let mut c = CaseSpec::smooth();
        c.t_end = 0.01;
        let mut sim = Simulation::new(c.clone()).unwrap();
        sim.advance_to(0.004).unwrap();
        assert!((sim.time() - 0.004).abs() < 1e-15);
        sim.advance_to(1.0).unwrap();
        assert_eq!(sim.time(), 0.01);
        assert!(sim.step().unwrap() == 0.0);
    }
}
