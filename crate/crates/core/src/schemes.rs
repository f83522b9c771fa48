//! Semi-discrete right-hand sides split into the parts the IMEX integrator
//! treats explicitly and implicitly.
//!
//! The micro equation is written as `ε ∂ₜg = micro_explicit + micro_stiff`.

use std::fmt;
use std::str::FromStr;

use crate::dg::{Discretization, KineticField, MacroField};
use crate::error::{BgkError, NodeLocation, Result};
use crate::kinetic::{self, Primitive};

/// Which discretization of the `(I − Π)(v ∂ₓM)` source is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Projected DG derivative of `vM`.
    One,
    /// Chapman–Enskog form `−A r M / √T` with `r ≈ ∂ₓT`.
    #[default]
    Two,
}

impl Scheme {
    /// Projections `(I − Π)` evaluated per node and right-hand side call.
    pub fn projections_per_node(self) -> usize {
        match self {
            Scheme::One => 2,
            Scheme::Two => 1,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::One => "1",
            Scheme::Two => "2",
        })
    }
}

impl FromStr for Scheme {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "i" | "one" | "scheme1" => Ok(Scheme::One),
            "2" | "ii" | "two" | "scheme2" => Ok(Scheme::Two),
            other => Err(BgkError::invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SplitRhs {
    pub macro_rhs: MacroField,
    /// `−(I − Π)𝒟_{h,1}(εvg)`.
    pub micro_explicit: KineticField,
    /// `−g + s`, with `s` the scheme's source.
    pub micro_stiff: KineticField,
    /// Projection evaluations performed while assembling.
    pub projections: usize,
}

/// Nodal primitives and Maxwellians of a macroscopic field.
#[derive(Debug, Clone)]
pub(crate) struct Equilibrium {
    pub prims: Vec<Primitive>,
    pub maxwell: KineticField,
}

impl Equilibrium {
    pub(crate) fn new(disc: &Discretization, u: &MacroField) -> Result<Self> {
        let prims = u.primitives(&disc.mesh, &disc.basis)?;
        let maxwell = disc.maxwellians(&prims);
        Ok(Equilibrium { prims, maxwell })
    }
}

/// Applies `(I − Π)` node by node, in place; returns the number of projections.
pub(crate) fn project_out(disc: &Discretization, eq: &Equilibrium, f: &mut KineticField) -> usize {
    for n in 0..f.node_count() {
        let (p, m) = (&eq.prims[n], eq.maxwell.node(n));
        kinetic::subtract_projection(f.node_mut(n), p, m, &disc.grid);
    }
    f.node_count()
}

/// `−(I − Π)𝒟_{h,1}(εvg)`.
pub(crate) fn micro_transport(
    disc: &Discretization,
    eq: &Equilibrium,
    g: &KineticField,
) -> Result<(KineticField, usize)> {
    let mut d1 = disc.dh1_upwind(g)?;
    let count = project_out(disc, eq, &mut d1);
    for x in d1.as_mut_slice() {
        *x = -*x;
    }
    Ok((d1, count))
}

/// The stiff source `s` (without the `−g` relaxation term).
pub(crate) fn stiff_source(
    disc: &Discretization,
    scheme: Scheme,
    eq: &Equilibrium,
) -> Result<(KineticField, usize)> {
    match scheme {
        Scheme::Two => {
            let t: Vec<f64> = eq.prims.iter().map(|p| p.t).collect();
            let r = disc.compute_r(&t)?;
            let mut s = KineticField::zeros(disc.nx(), disc.q(), disc.nv());
            for (n, p) in eq.prims.iter().enumerate() {
                kinetic::ce_leading_g_into(p, r[n], &disc.grid, s.node_mut(n));
            }
            Ok((s, 0))
        }
        Scheme::One => {
            let mut d2 = disc.dh2_vm(&eq.maxwell)?;
            let count = project_out(disc, eq, &mut d2);
            for x in d2.as_mut_slice() {
                *x = -*x;
            }
            Ok((d2, count))
        }
    }
}

fn check_shapes(disc: &Discretization, u: &MacroField, g: &KineticField) -> Result<()> {
    if u.nx() != disc.nx() || u.q() != disc.q() {
        return Err(BgkError::invalid("macro field does not match the discretization"));
    }
    if g.nx() != disc.nx() || g.q() != disc.q() || g.nv() != disc.nv() {
        return Err(BgkError::invalid("kinetic field does not match the discretization"));
    }
    Ok(())
}

fn rhs_split(disc: &Discretization, scheme: Scheme, u: &MacroField, g: &KineticField) -> Result<SplitRhs> {
    check_shapes(disc, u, g)?;
    let eq = Equilibrium::new(disc, u)?;
    let macro_rhs = disc.macro_rhs(u, g)?;
    let (micro_explicit, p1) = micro_transport(disc, &eq, g)?;
    let (mut micro_stiff, p2) = stiff_source(disc, scheme, &eq)?;
    micro_stiff.axpy(-1.0, g);
    Ok(SplitRhs {
        macro_rhs,
        micro_explicit,
        micro_stiff,
        projections: p1 + p2,
    })
}

/// Scheme II: the source is `−A r M/√T`.
pub fn rhs_scheme2(disc: &Discretization, u: &MacroField, g: &KineticField) -> Result<SplitRhs> {
    rhs_split(disc, Scheme::Two, u, g)
}

/// Scheme I: the source is `−(I − Π)𝒟_{h,2}(vM)`.
pub fn rhs_scheme1(disc: &Discretization, u: &MacroField, g: &KineticField) -> Result<SplitRhs> {
    rhs_split(disc, Scheme::One, u, g)
}

pub fn rhs_for(disc: &Discretization, scheme: Scheme, u: &MacroField, g: &KineticField) -> Result<SplitRhs> {
    rhs_split(disc, scheme, u, g)
}

/// Conserved moments of a full distribution at every node.
pub fn kinetic_moments(disc: &Discretization, f: &KineticField) -> Result<MacroField> {
    let data = (0..f.node_count())
        .map(|n| disc.grid.moment_vector(f.node(n)))
        .collect::<Result<Vec<_>>>()?;
    MacroField::from_nodes(f.nx(), f.q(), data)
}

/// `−𝒟_h(vf) + (M[f] − f)/ε` for the full distribution; Dirichlet ghosts are Maxwellians.
pub fn rhs_explicit_bgk(disc: &Discretization, f: &KineticField) -> Result<KineticField> {
    if f.nx() != disc.nx() || f.q() != disc.q() || f.nv() != disc.nv() {
        return Err(BgkError::invalid("distribution does not match the discretization"));
    }
    let u = kinetic_moments(disc, f)?;
    let eq = Equilibrium::new(disc, &u)?;
    let ghosts = disc.ghost_maxwellians()?;
    let ghost = ghosts.as_ref().map(|(l, r)| (l.as_slice(), r.as_slice()));
    let mut out = disc.transport_derivative(f, false, ghost)?;
    let nv = disc.nv();
    let q = disc.q();
    for n in 0..f.node_count() {
        let e = disc.eps.nodal()[n];
        if !(e > 0.0) {
            return Err(BgkError::invalid(format!(
                "explicit BGK needs a positive Knudsen number, got {e} at node {n}"
            ))
            .at(NodeLocation {
                element: n / q,
                node: n % q,
                x: disc.mesh.node_x(&disc.basis, n / q, n % q),
            }));
        }
        let inv = 1.0 / e;
        let (fo, m) = (f.node(n), eq.maxwell.node(n));
        let o = out.node_mut(n);
        for j in 0..nv {
            o[j] = -o[j] + (m[j] - fo[j]) * inv;
        }
    }
    Ok(out)
}
