//! Multi-run studies producing the tables behind the convergence,
//! asymptotic and conservation figures.

use std::str::FromStr;

use crate::dg::EpsProfile;
use crate::error::{BgkError, Result};
use crate::harness::cases::{CaseSpec, SolverKind};
use crate::harness::metrics::{self, Quantity};
use crate::harness::run::{run, RunOutput, Simulation};
use crate::schemes::Scheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    Convergence,
    EpsSweep,
    Conservation,
    SchemeCompare,
}

impl FromStr for StudyKind {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(StudyKind::Convergence),
            "eps-sweep" => Ok(StudyKind::EpsSweep),
            "conservation" => Ok(StudyKind::Conservation),
            "scheme-compare" => Ok(StudyKind::SchemeCompare),
            other => Err(BgkError::invalid(format!("unknown study '{other}'"))),
        }
    }
}

/// A study result as a numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub nx: usize,
    /// Difference between this mesh and the next finer one.
    pub rho_error: f64,
    /// Order against the previous (coarser) row.
    pub rho_order: Option<f64>,
    pub g_error: Option<f64>,
    pub g_order: Option<f64>,
}

/// Runs `base` on each mesh and compares consecutive pairs; `nxs` must double.
pub fn convergence(base: &CaseSpec, nxs: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if nxs.len() < 2 || nxs.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(BgkError::invalid("convergence meshes must double: e.g. 10,20,40"));
    }
    let runs: Vec<RunOutput> = nxs
        .iter()
        .map(|&nx| run(CaseSpec { nx, ..base.clone() }))
        .collect::<Result<_>>()?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(nxs.len() - 1);
    for (pair, &nx) in runs.windows(2).zip(nxs) {
        let e = metrics::l1_error_consecutive(&pair[0], &pair[1])?;
        let (rho_order, g_order) = match rows.last() {
            Some(prev) => (
                Some(metrics::observed_order(prev.rho_error, e.rho)),
                match (prev.g_error, e.g) {
                    (Some(a), Some(b)) => Some(metrics::observed_order(a, b)),
                    _ => None,
                },
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            nx,
            rho_error: e.rho,
            rho_order,
            g_error: e.g,
            g_order,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSweepRow {
    pub eps: f64,
    pub rho: f64,
    pub u: f64,
    pub t: f64,
}

/// Advances two runs with one shared step sequence, each step the smaller of
/// their stable steps.
pub fn run_lockstep(a: CaseSpec, b: CaseSpec) -> Result<(RunOutput, RunOutput)> {
    if a.t_end != b.t_end {
        return Err(BgkError::invalid("lockstep runs need the same final time"));
    }
    let (na, nb) = (a.name.clone(), b.name.clone());
    let mut sa = Simulation::new(a).map_err(|e| e.in_case(&na))?;
    let mut sb = Simulation::new(b).map_err(|e| e.in_case(&nb))?;
    while !sa.is_finished() {
        let remaining = sa.case().t_end - sa.time();
        let dt = sa
            .stable_dt()
            .map_err(|e| e.in_case(&na))?
            .min(sb.stable_dt().map_err(|e| e.in_case(&nb))?)
            .min(remaining);
        sa.step_with(dt).map_err(|e| e.in_case(&na))?;
        sb.step_with(dt).map_err(|e| e.in_case(&nb))?;
    }
    Ok((sa.output()?, sb.output()?))
}

/// Relative difference between the micro-macro solution and the Navier–Stokes
/// reference on the same mesh, step sequence and fluxes, for each `ε`.
pub fn eps_sweep(base: &CaseSpec, eps: &[f64]) -> Result<Vec<EpsSweepRow>> {
    let scheme = match base.solver {
        SolverKind::Bgk(s) => s,
        _ => Scheme::Two,
    };
    eps.iter()
        .map(|&e| {
            let (bgk, ns) = run_lockstep(
                CaseSpec {
                    eps: EpsProfile::Constant(e),
                    solver: SolverKind::Bgk(scheme),
                    ..base.clone()
                },
                CaseSpec {
                    eps: EpsProfile::Constant(e),
                    solver: SolverKind::Ns,
                    ..base.clone()
                },
            )?;
            Ok(EpsSweepRow {
                eps: e,
                rho: metrics::relative_difference(&bgk, &ns, Quantity::Rho)?,
                u: metrics::relative_difference(&bgk, &ns, Quantity::U)?,
                t: metrics::relative_difference(&bgk, &ns, Quantity::T)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationRow {
    pub v_cut: f64,
    /// `max over t and x of |ε⟨m g⟩|`.
    pub defect: [f64; 3],
}

pub fn conservation(base: &CaseSpec, v_cuts: &[f64]) -> Result<Vec<ConservationRow>> {
    if !matches!(base.solver, SolverKind::Bgk(_)) {
        return Err(BgkError::invalid("conservation study needs a micro-macro solver"));
    }
    v_cuts
        .iter()
        .map(|&v_cut| {
            let out = run(CaseSpec { v_cut, ..base.clone() })?;
            let mut defect = [0.0f64; 3];
            for row in &out.conservation {
                for c in 0..3 {
                    defect[c] = defect[c].max(row[c + 1]);
                }
            }
            Ok(ConservationRow { v_cut, defect })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeCompareRow {
    pub rho: f64,
    pub u: f64,
    pub t: f64,
    pub seconds_scheme1: f64,
    pub seconds_scheme2: f64,
}

/// Relative difference and cost of the two micro-macro schemes on one case.
pub fn scheme_compare(base: &CaseSpec) -> Result<SchemeCompareRow> {
    let one = run(CaseSpec {
        solver: SolverKind::Bgk(Scheme::One),
        ..base.clone()
    })?;
    let two = run(CaseSpec {
        solver: SolverKind::Bgk(Scheme::Two),
        ..base.clone()
    })?;
    Ok(SchemeCompareRow {
        rho: metrics::relative_difference(&two, &one, Quantity::Rho)?,
        u: metrics::relative_difference(&two, &one, Quantity::U)?,
        t: metrics::relative_difference(&two, &one, Quantity::T)?,
        seconds_scheme1: one.wall_seconds,
        seconds_scheme2: two.wall_seconds,
    })
}

const NAN: f64 = f64::NAN;

pub fn convergence_table(rows: &[ConvergenceRow]) -> Table {
    Table {
        header: vec!["nx", "rho_error", "rho_order", "g_error", "g_order"],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.nx as f64,
                    r.rho_error,
                    r.rho_order.unwrap_or(NAN),
                    r.g_error.unwrap_or(NAN),
                    r.g_order.unwrap_or(NAN),
                ]
            })
            .collect(),
    }
}

pub fn eps_sweep_table(rows: &[EpsSweepRow]) -> Table {
    Table {
        header: vec!["eps", "rel_rho", "rel_u", "rel_T"],
        rows: rows.iter().map(|r| vec![r.eps, r.rho, r.u, r.t]).collect(),
    }
}

pub fn conservation_table(rows: &[ConservationRow]) -> Table {
    Table {
        header: vec!["vc", "c0", "c1", "c2"],
        rows: rows
            .iter()
            .map(|r| vec![r.v_cut, r.defect[0], r.defect[1], r.defect[2]])
            .collect(),
    }
}

pub fn scheme_compare_table(r: &SchemeCompareRow) -> Table {
    Table {
        header: vec!["rel_rho", "rel_u", "rel_T", "seconds_scheme1", "seconds_scheme2"],
        rows: vec![vec![r.rho, r.u, r.t, r.seconds_scheme1, r.seconds_scheme2]],
    }
}
