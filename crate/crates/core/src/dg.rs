//! Mesh, nodal DG field containers, numerical fluxes and the discrete
//! spatial operators of the micro-macro system.
//!
//! Every weak-form solve here is diagonal: the basis is nodal at the Gauss
//! points, so the element mass matrix is `diag(ω_k h_i)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{BgkError, NodeLocation, Result};
use crate::kinetic::{self, primitives, Primitive};
use crate::quadrature::NodalBasis;
use crate::velocity::VelocityGrid;

/// How traces outside `[a, b]` are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    Periodic,
    /// Ghost elements hold fixed conserved states with `g = 0`.
    Dirichlet { left: [f64; 3], right: [f64; 3] },
    /// Ghost traces copy the adjacent interior trace.
    Extrapolate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    interfaces: Vec<f64>,
    boundary: BoundaryKind,
}

impl Mesh1D {
    pub fn uniform(a: f64, b: f64, nx: usize, boundary: BoundaryKind) -> Result<Self> {
        if nx == 0 {
            return Err(BgkError::invalid("mesh needs at least one element"));
        }
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(BgkError::invalid(format!("invalid domain [{a}, {b}]")));
        }
        let h = (b - a) / nx as f64;
        let mut interfaces: Vec<f64> = (0..=nx).map(|i| a + i as f64 * h).collect();
        interfaces[nx] = b;
        Ok(Mesh1D { interfaces, boundary })
    }

    pub fn from_interfaces(interfaces: Vec<f64>, boundary: BoundaryKind) -> Result<Self> {
        if interfaces.len() < 2 || interfaces.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(BgkError::invalid("interfaces must be strictly increasing"));
        }
        Ok(Mesh1D { interfaces, boundary })
    }

    pub fn nx(&self) -> usize {
        self.interfaces.len() - 1
    }

    pub fn a(&self) -> f64 {
        self.interfaces[0]
    }

    pub fn b(&self) -> f64 {
        self.interfaces[self.nx()]
    }

    pub fn length(&self) -> f64 {
        self.b() - self.a()
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn boundary(&self) -> &BoundaryKind {
        &self.boundary
    }

    #[inline]
    pub fn h(&self, i: usize) -> f64 {
        self.interfaces[i + 1] - self.interfaces[i]
    }

    pub fn h_max(&self) -> f64 {
        (0..self.nx()).map(|i| self.h(i)).fold(0.0, f64::max)
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.interfaces[i] + self.interfaces[i + 1])
    }

    /// Physical coordinate of node `k` of element `i`.
    #[inline]
    pub fn node_x(&self, basis: &NodalBasis, i: usize, k: usize) -> f64 {
        self.center(i) + self.h(i) * basis.nodes()[k]
    }

    /// All node coordinates in element-major order.
    pub fn node_coordinates(&self, basis: &NodalBasis) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nx() * basis.q());
        for i in 0..self.nx() {
            for k in 0..basis.q() {
                out.push(self.node_x(basis, i, k));
            }
        }
        out
    }

    /// Element containing `x` and the reference coordinate inside it.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        if x < self.a() || x > self.b() {
            return None;
        }
        let i = match self
            .interfaces
            .binary_search_by(|p| p.partial_cmp(&x).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(m) => m.min(self.nx() - 1),
            Err(m) => m.saturating_sub(1).min(self.nx() - 1),
        };
        Some((i, (x - self.center(i)) / self.h(i)))
    }

    /// Same element partition with a different boundary treatment.
    pub fn with_boundary(&self, boundary: BoundaryKind) -> Self {
        Mesh1D {
            interfaces: self.interfaces.clone(),
            boundary,
        }
    }
}

/// Nodal conserved variables `U_i^k`, element-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroField {
    nx: usize,
    q: usize,
    data: Vec<[f64; 3]>,
}

impl MacroField {
    pub fn zeros(nx: usize, q: usize) -> Self {
        MacroField {
            nx,
            q,
            data: vec![[0.0; 3]; nx * q],
        }
    }

    pub fn from_nodes(nx: usize, q: usize, data: Vec<[f64; 3]>) -> Result<Self> {
        if data.len() != nx * q {
            return Err(BgkError::invalid("macro field length does not match nx·q"));
        }
        Ok(MacroField { nx, q, data })
    }

    /// Samples `init(x)` at every node.
    pub fn from_fn(mesh: &Mesh1D, basis: &NodalBasis, init: impl Fn(f64) -> [f64; 3]) -> Self {
        let data = mesh.node_coordinates(basis).into_iter().map(init).collect();
        MacroField {
            nx: mesh.nx(),
            q: basis.q(),
            data,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.data
    }

    pub fn nodes_mut(&mut self) -> &mut [[f64; 3]] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, i: usize, k: usize) -> [f64; 3] {
        self.data[i * self.q + k]
    }

    pub fn element(&self, i: usize) -> &[[f64; 3]] {
        &self.data[i * self.q..(i + 1) * self.q]
    }

    pub fn flat(&self) -> &[f64] {
        self.data.as_flattened()
    }

    /// One conserved component at every node.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.data.iter().map(|u| u[c]).collect()
    }

    /// `self + scale · other`, in place.
    pub fn axpy(&mut self, scale: f64, other: &MacroField) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            for c in 0..3 {
                a[c] += scale * b[c];
            }
        }
    }

    /// `∫ U_h dx` by Gauss quadrature.
    pub fn integral(&self, mesh: &Mesh1D, basis: &NodalBasis) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for i in 0..self.nx {
            let h = mesh.h(i);
            for k in 0..self.q {
                let u = self.at(i, k);
                for c in 0..3 {
                    acc[c] += basis.weights()[k] * h * u[c];
                }
            }
        }
        acc
    }

    /// Primitive variables at every node; the first non-realizable node is reported.
    pub fn primitives(&self, mesh: &Mesh1D, basis: &NodalBasis) -> Result<Vec<Primitive>> {
        self.data
            .iter()
            .enumerate()
            .map(|(n, &u)| {
                primitives(u).map_err(|e| {
                    let (i, k) = (n / self.q, n % self.q);
                    e.at(NodeLocation {
                        element: i,
                        node: k,
                        x: mesh.node_x(basis, i, k),
                    })
                })
            })
            .collect()
    }
}

/// Nodal kinetic values `g_i^k(v_j)`, laid out `[(i·q + k)·n_v + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KineticField {
    nx: usize,
    q: usize,
    nv: usize,
    data: Vec<f64>,
}

impl KineticField {
    pub fn zeros(nx: usize, q: usize, nv: usize) -> Self {
        KineticField {
            nx,
            q,
            nv,
            data: vec![0.0; nx * q * nv],
        }
    }

    pub fn from_vec(nx: usize, q: usize, nv: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nx * q * nv {
            return Err(BgkError::invalid("kinetic field length does not match nx·q·nv"));
        }
        Ok(KineticField { nx, q, nv, data })
    }

    /// Fills node `(i, k)` with `init(x, out)`.
    pub fn from_fn(
        mesh: &Mesh1D,
        basis: &NodalBasis,
        nv: usize,
        mut init: impl FnMut(f64, &mut [f64]) -> Result<()>,
    ) -> Result<Self> {
        let mut field = KineticField::zeros(mesh.nx(), basis.q(), nv);
        for (n, x) in mesh.node_coordinates(basis).into_iter().enumerate() {
            init(x, field.node_mut(n))?;
        }
        Ok(field)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Velocity column at flat node index `n = i·q + k`.
    #[inline]
    pub fn node(&self, n: usize) -> &[f64] {
        &self.data[n * self.nv..(n + 1) * self.nv]
    }

    #[inline]
    pub fn node_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.data[n * self.nv..(n + 1) * self.nv]
    }

    #[inline]
    pub fn at(&self, i: usize, k: usize) -> &[f64] {
        self.node(i * self.q + k)
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.q
    }

    pub fn same_shape(&self, other: &KineticField) -> bool {
        self.nx == other.nx && self.q == other.q && self.nv == other.nv
    }

    pub fn axpy(&mut self, scale: f64, other: &KineticField) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Closed-form Knudsen number profile.
#[derive(Clone)]
pub enum EpsProfile {
    Constant(f64),
    /// `ε₀ + ½(tanh(1 − a₀x) + tanh(1 + a₀x))`.
    Tanh { eps0: f64, a0: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl EpsProfile {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            EpsProfile::Constant(e) => *e,
            EpsProfile::Tanh { eps0, a0 } => {
                eps0 + 0.5 * ((1.0 - a0 * x).tanh() + (1.0 + a0 * x).tanh())
            }
            EpsProfile::Custom(f) => f(x),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            EpsProfile::Constant(e) => Some(*e),
            _ => None,
        }
    }
}

impl fmt::Debug for EpsProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsProfile::Constant(e) => write!(f, "Constant({e})"),
            EpsProfile::Tanh { eps0, a0 } => write!(f, "Tanh {{ eps0: {eps0}, a0: {a0} }}"),
            EpsProfile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// `ε(x)` with cached nodal and interface samples.
///
/// A zero value is accepted as the formal `ε → 0` limit of the stepping
/// formulas; negative or non-finite samples are rejected.
#[derive(Debug, Clone)]
pub struct EpsCoefficient {
    profile: EpsProfile,
    nodal: Vec<f64>,
    interfaces: Vec<f64>,
}

impl EpsCoefficient {
    pub fn new(profile: EpsProfile, mesh: &Mesh1D, basis: &NodalBasis) -> Result<Self> {
        let nodal: Vec<f64> = mesh
            .node_coordinates(basis)
            .into_iter()
            .map(|x| profile.eval(x))
            .collect();
        let interfaces: Vec<f64> = mesh.interfaces().iter().map(|&x| profile.eval(x)).collect();
        if let Some(bad) = nodal.iter().chain(&interfaces).find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(BgkError::invalid(format!("Knudsen number must be non-negative, got {bad}")));
        }
        Ok(EpsCoefficient {
            profile,
            nodal,
            interfaces,
        })
    }

    pub fn profile(&self) -> &EpsProfile {
        &self.profile
    }

    /// `ε(x_i^k)`, flat node index.
    pub fn nodal(&self) -> &[f64] {
        &self.nodal
    }

    /// `ε(x_{m−1/2})` for interfaces `m = 0..=nx`.
    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn min(&self) -> f64 {
        self.nodal.iter().chain(&self.interfaces).fold(f64::INFINITY, |m, &e| m.min(e))
    }
}

/// Choice of the numerical-flux pair `(⟨vmg⟩̂, T̂)` (or `(⟨vmg⟩̂, M̂)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FluxSelect {
    /// `⟨vmg⟩̂ = ⟨vmg⟩⁻`, `T̂ = T⁺`.
    #[default]
    AltLr,
    /// `⟨vmg⟩̂ = ⟨vmg⟩⁺`, `T̂ = T⁻`.
    AltRl,
    Central,
}

impl FluxSelect {
    /// Returns `(⟨vmg⟩̂, T̂)` for traces `(minus, plus)` of each member.
    pub fn pair(self, g_minus: f64, g_plus: f64, t_minus: f64, t_plus: f64) -> (f64, f64) {
        (self.moment_side(g_minus, g_plus), self.state_side(t_minus, t_plus))
    }

    /// The `⟨vmg⟩̂` (or viscous-flux) member of the pair.
    #[inline]
    pub fn moment_side(self, minus: f64, plus: f64) -> f64 {
        match self {
            FluxSelect::AltLr => minus,
            FluxSelect::AltRl => plus,
            FluxSelect::Central => 0.5 * (minus + plus),
        }
    }

    /// The `T̂` / `M̂` member of the pair, always on the opposite side.
    #[inline]
    pub fn state_side(self, minus: f64, plus: f64) -> f64 {
        match self {
            FluxSelect::AltLr => plus,
            FluxSelect::AltRl => minus,
            FluxSelect::Central => 0.5 * (minus + plus),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FluxSelect::AltLr => "alt-lr",
            FluxSelect::AltRl => "alt-rl",
            FluxSelect::Central => "central",
        }
    }
}

impl FromStr for FluxSelect {
    type Err = BgkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alt-lr" | "alternating" | "lr" => Ok(FluxSelect::AltLr),
            "alt-rl" | "rl" => Ok(FluxSelect::AltRl),
            "central" => Ok(FluxSelect::Central),
            other => Err(BgkError::invalid(format!("unknown flux selector '{other}'"))),
        }
    }
}

/// Euler flux `(ρu, ρu² + p, (E + p)u)`.
#[inline]
pub fn euler_flux(u: [f64; 3]) -> Result<[f64; 3]> {
    let p = primitives(u)?;
    Ok(euler_flux_prim(u, &p))
}

#[inline]
fn euler_flux_prim(u: [f64; 3], p: &Primitive) -> [f64; 3] {
    [u[1], u[1] * p.u + p.p, (u[2] + p.p) * p.u]
}

/// `½(F(U⁻) + F(U⁺)) − (α/2)(U⁺ − U⁻)`.
pub fn lax_friedrichs(minus: [f64; 3], plus: [f64; 3], alpha: f64) -> Result<[f64; 3]> {
    let fm = euler_flux(minus)?;
    let fp = euler_flux(plus)?;
    Ok(std::array::from_fn(|c| {
        0.5 * (fm[c] + fp[c]) - 0.5 * alpha * (plus[c] - minus[c])
    }))
}

/// Upwind flux for `v g`.
#[inline]
pub fn upwind_vg(v: f64, g_minus: f64, g_plus: f64) -> f64 {
    if v > 0.0 {
        v * g_minus
    } else if v < 0.0 {
        v * g_plus
    } else {
        0.0
    }
}

/// Left/right traces at every interface for a nodal field of row width `w`.
///
/// `minus[m]`/`plus[m]` are the rows left/right of interface `m`
/// (`x_{m−1/2}` in element numbering). `ghost` supplies the outside rows
/// `(left, right)` for Dirichlet boundaries.
pub(crate) struct InterfaceTraces {
    w: usize,
    minus: Vec<f64>,
    plus: Vec<f64>,
}

impl InterfaceTraces {
    pub(crate) fn new(
        mesh: &Mesh1D,
        basis: &NodalBasis,
        data: &[f64],
        w: usize,
        ghost: Option<(&[f64], &[f64])>,
    ) -> Result<Self> {
        let nx = mesh.nx();
        let q = basis.q();
        debug_assert_eq!(data.len(), nx * q * w);
        let mut minus = vec![0.0; (nx + 1) * w];
        let mut plus = vec![0.0; (nx + 1) * w];
        let (el, er) = (basis.endpoint_left(), basis.endpoint_right());
        for i in 0..nx {
            let left = &mut plus[i * w..(i + 1) * w];
            for k in 0..q {
                let row = &data[(i * q + k) * w..(i * q + k + 1) * w];
                let lk = el[k];
                for (o, &x) in left.iter_mut().zip(row) {
                    *o += lk * x;
                }
            }
            let right = &mut minus[(i + 1) * w..(i + 2) * w];
            for k in 0..q {
                let row = &data[(i * q + k) * w..(i * q + k + 1) * w];
                let rk = er[k];
                for (o, &x) in right.iter_mut().zip(row) {
                    *o += rk * x;
                }
            }
        }
        match mesh.boundary() {
            BoundaryKind::Periodic => {
                let (head, tail) = minus.split_at_mut(nx * w);
                head[..w].copy_from_slice(&tail[..w]);
                let (head, tail) = plus.split_at_mut(nx * w);
                tail[..w].copy_from_slice(&head[..w]);
            }
            BoundaryKind::Extrapolate => {
                let (head, tail) = (plus[..w].to_vec(), minus[nx * w..].to_vec());
                minus[..w].copy_from_slice(&head);
                plus[nx * w..].copy_from_slice(&tail);
            }
            BoundaryKind::Dirichlet { .. } => {
                let (gl, gr) = ghost.ok_or_else(|| {
                    BgkError::Boundary("Dirichlet boundary needs ghost values for this quantity".into())
                })?;
                if gl.len() != w || gr.len() != w {
                    return Err(BgkError::Boundary("ghost row has the wrong width".into()));
                }
                minus[..w].copy_from_slice(gl);
                plus[nx * w..].copy_from_slice(gr);
            }
        }
        Ok(InterfaceTraces { w, minus, plus })
    }

    #[inline]
    pub(crate) fn minus(&self, m: usize) -> &[f64] {
        &self.minus[m * self.w..(m + 1) * self.w]
    }

    #[inline]
    pub(crate) fn plus(&self, m: usize) -> &[f64] {
        &self.plus[m * self.w..(m + 1) * self.w]
    }

    pub(crate) fn interface_count(&self) -> usize {
        self.minus.len() / self.w
    }
}

/// Nodal DG weak derivative of a width-`w` field:
/// `out_k = [−Σ_{k'} ω_{k'} val_{k'} φ_k'(ξ_{k'}) + ĥ_{i+1/2} φ_k(½) − ĥ_{i−1/2} φ_k(−½)] / (ω_k h_i)`.
pub(crate) fn weak_derivative(
    mesh: &Mesh1D,
    basis: &NodalBasis,
    w: usize,
    vals: &[f64],
    hats: &[f64],
    out: &mut [f64],
) {
    let q = basis.q();
    let (el, er, wt) = (basis.endpoint_left(), basis.endpoint_right(), basis.weights());
    for i in 0..mesh.nx() {
        let h = mesh.h(i);
        let hat_l = &hats[i * w..(i + 1) * w];
        let hat_r = &hats[(i + 1) * w..(i + 2) * w];
        for k in 0..q {
            let o = &mut out[(i * q + k) * w..(i * q + k + 1) * w];
            let (lk, rk) = (el[k], er[k]);
            for ((oc, &hl), &hr) in o.iter_mut().zip(hat_l).zip(hat_r) {
                *oc = hr * rk - hl * lk;
            }
            for kp in 0..q {
                let coef = wt[kp] * basis.deriv(k, kp);
                if coef == 0.0 {
                    continue;
                }
                let row = &vals[(i * q + kp) * w..(i * q + kp + 1) * w];
                for (oc, &x) in o.iter_mut().zip(row) {
                    *oc -= coef * x;
                }
            }
            let scale = 1.0 / (wt[k] * h);
            for oc in o.iter_mut() {
                *oc *= scale;
            }
        }
    }
}

/// Everything that defines the spatial and velocity discretization of a run.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub basis: NodalBasis,
    pub mesh: Mesh1D,
    pub grid: VelocityGrid,
    pub eps: EpsCoefficient,
    pub flux: FluxSelect,
}

impl Discretization {
    pub fn new(
        basis: NodalBasis,
        mesh: Mesh1D,
        grid: VelocityGrid,
        eps: EpsProfile,
        flux: FluxSelect,
    ) -> Result<Self> {
        let eps = EpsCoefficient::new(eps, &mesh, &basis)?;
        Ok(Discretization {
            basis,
            mesh,
            grid,
            eps,
            flux,
        })
    }

    pub fn nx(&self) -> usize {
        self.mesh.nx()
    }

    pub fn q(&self) -> usize {
        self.basis.q()
    }

    pub fn nv(&self) -> usize {
        self.grid.len()
    }

    pub fn node_count(&self) -> usize {
        self.nx() * self.q()
    }

    fn dirichlet_states(&self) -> Option<([f64; 3], [f64; 3])> {
        match self.mesh.boundary() {
            BoundaryKind::Dirichlet { left, right } => Some((*left, *right)),
            _ => None,
        }
    }

    /// Ghost Maxwellians for Dirichlet boundaries.
    pub(crate) fn ghost_maxwellians(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        match self.dirichlet_states() {
            Some((l, r)) => Ok(Some((
                kinetic::maxwellian_of(l, &self.grid)?,
                kinetic::maxwellian_of(r, &self.grid)?,
            ))),
            None => Ok(None),
        }
    }

    /// `𝒟_{h,1}(ε v g)` with upwind interface fluxes.
    pub fn dh1_upwind(&self, g: &KineticField) -> Result<KineticField> {
        self.transport_derivative(g, true, None)
    }

    /// Upwind DG derivative of `v f` with an explicit Dirichlet ghost distribution.
    pub(crate) fn transport_derivative(
        &self,
        g: &KineticField,
        with_eps: bool,
        ghost: Option<(&[f64], &[f64])>,
    ) -> Result<KineticField> {
        let nv = self.nv();
        let zeros = vec![0.0; nv];
        let ghost = match (ghost, self.dirichlet_states()) {
            (Some(gh), _) => Some(gh),
            (None, Some(_)) => Some((zeros.as_slice(), zeros.as_slice())),
            (None, None) => None,
        };
        let traces = InterfaceTraces::new(&self.mesh, &self.basis, g.as_slice(), nv, ghost)?;
        let v = self.grid.points();
        let mut hats = vec![0.0; traces.interface_count() * nv];
        for m in 0..traces.interface_count() {
            let e = if with_eps { self.eps.interfaces()[m] } else { 1.0 };
            let (gm, gp) = (traces.minus(m), traces.plus(m));
            for j in 0..nv {
                hats[m * nv + j] = e * upwind_vg(v[j], gm[j], gp[j]);
            }
        }
        let mut vals = g.as_slice().to_vec();
        for n in 0..self.node_count() {
            let e = if with_eps { self.eps.nodal()[n] } else { 1.0 };
            for (x, &vj) in vals[n * nv..(n + 1) * nv].iter_mut().zip(v) {
                *x *= e * vj;
            }
        }
        let mut out = KineticField::zeros(self.nx(), self.q(), nv);
        weak_derivative(&self.mesh, &self.basis, nv, &vals, &hats, out.as_mut_slice());
        Ok(out)
    }

    /// `𝒟_{h,2}(v M)` with `M̂` chosen by the flux selector.
    pub fn dh2_vm(&self, maxwell: &KineticField) -> Result<KineticField> {
        let nv = self.nv();
        let ghosts = self.ghost_maxwellians()?;
        let ghost = ghosts.as_ref().map(|(l, r)| (l.as_slice(), r.as_slice()));
        let traces = InterfaceTraces::new(&self.mesh, &self.basis, maxwell.as_slice(), nv, ghost)?;
        let v = self.grid.points();
        let mut hats = vec![0.0; traces.interface_count() * nv];
        for m in 0..traces.interface_count() {
            let (mm, mp) = (traces.minus(m), traces.plus(m));
            for j in 0..nv {
                hats[m * nv + j] = v[j] * self.flux.state_side(mm[j], mp[j]);
            }
        }
        let mut vals = maxwell.as_slice().to_vec();
        for n in 0..self.node_count() {
            for (x, &vj) in vals[n * nv..(n + 1) * nv].iter_mut().zip(v) {
                *x *= vj;
            }
        }
        let mut out = KineticField::zeros(self.nx(), self.q(), nv);
        weak_derivative(&self.mesh, &self.basis, nv, &vals, &hats, out.as_mut_slice());
        Ok(out)
    }

    /// `r_h ≈ ∂ₓT` from nodal temperatures, `T̂` chosen by the flux selector.
    pub fn compute_r(&self, temperature: &[f64]) -> Result<Vec<f64>> {
        if temperature.len() != self.node_count() {
            return Err(BgkError::invalid("temperature length does not match mesh"));
        }
        let ghost = match self.dirichlet_states() {
            Some((l, r)) => Some(([primitives(l)?.t], [primitives(r)?.t])),
            None => None,
        };
        let ghost_ref = ghost.as_ref().map(|(l, r)| (&l[..], &r[..]));
        let traces = InterfaceTraces::new(&self.mesh, &self.basis, temperature, 1, ghost_ref)?;
        let hats: Vec<f64> = (0..traces.interface_count())
            .map(|m| self.flux.state_side(traces.minus(m)[0], traces.plus(m)[0]))
            .collect();
        let mut out = vec![0.0; self.node_count()];
        weak_derivative(&self.mesh, &self.basis, 1, temperature, &hats, &mut out);
        Ok(out)
    }

    /// Global Lax–Friedrichs speed `max |u| + √(γT)` over all nodes.
    pub fn max_wave_speed(prims: &[Primitive]) -> f64 {
        prims.iter().fold(0.0, |m, p| m.max(p.max_wave_speed()))
    }

    /// Macroscopic right-hand side from precomputed flux moments.
    ///
    /// `flux_moments[n]` is `⟨v m g⟩` (or the viscous analogue) at node `n`;
    /// it enters the volume term weighted by `ε(x_i^k)` and the interface
    /// term weighted by `ε(x_{i±1/2})`, with the side picked by the selector.
    /// `alpha` is the global Lax–Friedrichs speed; `None` computes it from `u`.
    pub fn macro_rhs_with_moments(
        &self,
        u: &MacroField,
        flux_moments: Option<&[[f64; 3]]>,
        alpha: Option<f64>,
    ) -> Result<MacroField> {
        let n_nodes = self.node_count();
        let prims = u.primitives(&self.mesh, &self.basis)?;
        let alpha = alpha.unwrap_or_else(|| Self::max_wave_speed(&prims));

        let mut vals = vec![0.0; n_nodes * 3];
        for n in 0..n_nodes {
            let f = euler_flux_prim(u.nodes()[n], &prims[n]);
            vals[3 * n..3 * n + 3].copy_from_slice(&f);
        }

        let u_ghost = self.dirichlet_states();
        let u_ghost_ref = u_ghost.as_ref().map(|(l, r)| (&l[..], &r[..]));
        let u_tr = InterfaceTraces::new(&self.mesh, &self.basis, u.flat(), 3, u_ghost_ref)?;
        let n_if = u_tr.interface_count();
        let mut hats = vec![0.0; n_if * 3];
        for m in 0..n_if {
            let um: [f64; 3] = u_tr.minus(m).try_into().unwrap();
            let up: [f64; 3] = u_tr.plus(m).try_into().unwrap();
            let lf = lax_friedrichs(um, up, alpha).map_err(|e| {
                e.at(NodeLocation {
                    element: m.min(self.nx().saturating_sub(1)),
                    node: usize::MAX,
                    x: self.mesh.interfaces()[m],
                })
            })?;
            hats[3 * m..3 * m + 3].copy_from_slice(&lf);
        }

        if let Some(gm) = flux_moments {
            if gm.len() != n_nodes {
                return Err(BgkError::invalid("flux moment length does not match mesh"));
            }
            let eps_n = self.eps.nodal();
            for n in 0..n_nodes {
                for c in 0..3 {
                    vals[3 * n + c] += eps_n[n] * gm[n][c];
                }
            }
            let zero = [0.0; 3];
            let ghost = u_ghost.map(|_| (&zero[..], &zero[..]));
            let g_tr = InterfaceTraces::new(&self.mesh, &self.basis, gm.as_flattened(), 3, ghost)?;
            let eps_i = self.eps.interfaces();
            for m in 0..n_if {
                let (a, b) = (g_tr.minus(m), g_tr.plus(m));
                for c in 0..3 {
                    hats[3 * m + c] += eps_i[m] * self.flux.moment_side(a[c], b[c]);
                }
            }
        }

        let mut out = vec![0.0; n_nodes * 3];
        weak_derivative(&self.mesh, &self.basis, 3, &vals, &hats, &mut out);
        let data = out.chunks_exact(3).map(|c| [-c[0], -c[1], -c[2]]).collect();
        MacroField::from_nodes(self.nx(), self.q(), data)
    }

    /// `⟨v m g⟩` at every node.
    pub fn flux_moments(&self, g: &KineticField) -> Vec<[f64; 3]> {
        (0..g.node_count())
            .map(|n| self.grid.flux_moment_vector(g.node(n)))
            .collect()
    }

    /// Semi-discrete macroscopic equation: `dU/dt` at every node.
    pub fn macro_rhs(&self, u: &MacroField, g: &KineticField) -> Result<MacroField> {
        let gm = self.flux_moments(g);
        self.macro_rhs_with_moments(u, Some(&gm), None)
    }

    /// Nodal Maxwellians of a macroscopic field.
    pub fn maxwellians(&self, prims: &[Primitive]) -> KineticField {
        let nv = self.nv();
        let mut m = KineticField::zeros(self.nx(), self.q(), nv);
        for (n, p) in prims.iter().enumerate() {
            kinetic::maxwellian_into(p.rho, p.u, p.t, &self.grid, m.node_mut(n));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(q: usize, nx: usize, boundary: BoundaryKind, eps: f64) -> Discretization {
        Discretization::new(
            NodalBasis::new(q).unwrap(),
            Mesh1D::uniform(0.0, 1.0, nx, boundary).unwrap(),
            VelocityGrid::new(1.0, 2).unwrap(),
            EpsProfile::Constant(eps),
            FluxSelect::AltLr,
        )
        .unwrap()
    }

    #[test]
    fn euler_flux_examples() {
        assert_eq!(euler_flux([1.0, 0.0, 0.5]).unwrap(), [0.0, 1.0, 0.0]);
        let f = euler_flux([0.125, 0.0, 0.05]).unwrap();
        assert!(f[0] == 0.0 && (f[1] - 0.1).abs() < 1e-15 && f[2] == 0.0);
        let f = euler_flux([0.445, 0.31061, 1.87240289]).unwrap();
        let expect = [0.31061, 3.74480578, 3.76948121722];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(euler_flux([-1.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn lax_friedrichs_examples() {
        let u = [0.7, 0.3, 1.1];
        let f = euler_flux(u).unwrap();
        assert_eq!(lax_friedrichs(u, u, 2.5).unwrap(), f);
        let (l, r) = ([1.0, 0.0, 0.5], [0.125, 0.0, 0.05]);
        let fm = lax_friedrichs(l, r, 0.0).unwrap();
        assert_eq!(fm, [0.0, 0.55, 0.0]);
        let fs = lax_friedrichs(l, r, 3f64.sqrt()).unwrap();
        let expect = [0.75777223, 0.55, 0.38971143];
        for (a, b) in fs.iter().zip(expect) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn upwind_examples() {
        assert_eq!(upwind_vg(2.0, 3.0, 7.0), 6.0);
        assert_eq!(upwind_vg(-2.0, 3.0, 7.0), -14.0);
        assert_eq!(upwind_vg(1.5, 4.0, 4.0), 6.0);
        assert_eq!(upwind_vg(-1.5, 4.0, 4.0), -6.0);
    }

    #[test]
    fn pair_flux_examples() {
        assert_eq!(FluxSelect::Central.moment_side(3.0, 5.0), 4.0);
        assert_eq!(FluxSelect::AltLr.pair(3.0, 5.0, 1.0, 2.0), (3.0, 2.0));
        assert_eq!(FluxSelect::AltRl.pair(3.0, 5.0, 1.0, 2.0), (5.0, 1.0));
        for s in [FluxSelect::AltLr, FluxSelect::AltRl, FluxSelect::Central] {
            assert_eq!(s.pair(2.0, 2.0, 9.0, 9.0), (2.0, 9.0));
        }
        assert!("upwind".parse::<FluxSelect>().is_err());
        assert_eq!("central".parse::<FluxSelect>().unwrap(), FluxSelect::Central);
    }

    #[test]
    fn mesh_geometry() {
        let m = Mesh1D::uniform(-0.2, 1.2, 50, BoundaryKind::Periodic).unwrap();
        let total: f64 = (0..50).map(|i| m.h(i)).sum();
        assert!((total - 1.4).abs() < 1e-13);
        assert!(m.interfaces().windows(2).all(|w| w[1] > w[0]));
        assert_eq!(m.locate(-0.2).unwrap().0, 0);
        assert_eq!(m.locate(1.2).unwrap().0, 49);
        assert!(m.locate(1.3).is_none());
        assert!(Mesh1D::uniform(1.0, 0.0, 4, BoundaryKind::Periodic).is_err());
        assert!(Mesh1D::from_interfaces(vec![0.0, 0.5, 0.5, 1.0], BoundaryKind::Periodic).is_err());
    }

    #[test]
    fn dh1_of_zero_and_constant() {
        let d = disc(3, 6, BoundaryKind::Periodic, 0.7);
        let g = KineticField::zeros(6, 3, 2);
        assert!(d.dh1_upwind(&g).unwrap().as_slice().iter().all(|&x| x == 0.0));
        let g = KineticField::from_vec(6, 3, 2, vec![1.3; 36]).unwrap();
        assert!(d.dh1_upwind(&g).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn dh1_exact_for_polynomials_with_exact_traces() {
        // g(x) = x, v = ±0.5: ghost traces supplied exactly via Dirichlet ghosts
        for q in 2..=4 {
            let mesh = Mesh1D::uniform(0.0, 1.0, 5, BoundaryKind::Dirichlet {
                left: [1.0, 0.0, 0.5],
                right: [1.0, 0.0, 0.5],
            })
            .unwrap();
            let d = Discretization::new(
                NodalBasis::new(q).unwrap(),
                mesh,
                VelocityGrid::new(1.0, 2).unwrap(),
                EpsProfile::Constant(1.0),
                FluxSelect::AltLr,
            )
            .unwrap();
            let g = KineticField::from_fn(&d.mesh, &d.basis, 2, |x, out| {
                out.fill(x);
                Ok(())
            })
            .unwrap();
            let ghost_l = [0.0, 0.0];
            let ghost_r = [1.0, 1.0];
            let dg = d.transport_derivative(&g, true, Some((&ghost_l, &ghost_r))).unwrap();
            for n in 0..d.node_count() {
                for (j, &v) in d.grid.points().iter().enumerate() {
                    let exact = v;
                    assert!((dg.node(n)[j] - exact).abs() < 1e-11, "q={q}");
                }
            }
        }
    }

    #[test]
    fn compute_r_exact_for_linear_temperature() {
        for q in 2..=4 {
            // T(x) = 1 + 0.5 x on [0, 1]; ghosts carry T(0) = 1 and T(1) = 1.5
            let left = crate::kinetic::MacroState::from_primitive(1.0, 0.0, 1.0).to_array();
            let right = crate::kinetic::MacroState::from_primitive(1.0, 0.0, 1.5).to_array();
            let mesh = Mesh1D::uniform(0.0, 1.0, 7, BoundaryKind::Dirichlet { left, right }).unwrap();
            for flux in [FluxSelect::AltLr, FluxSelect::AltRl, FluxSelect::Central] {
                let d = Discretization::new(
                    NodalBasis::new(q).unwrap(),
                    mesh.clone(),
                    VelocityGrid::new(1.0, 2).unwrap(),
                    EpsProfile::Constant(1.0),
                    flux,
                )
                .unwrap();
                let t: Vec<f64> = d.mesh.node_coordinates(&d.basis).iter().map(|x| 1.0 + 0.5 * x).collect();
                let r = d.compute_r(&t).unwrap();
                assert!(r.iter().all(|ri| (ri - 0.5).abs() < 1e-12), "q={q} {flux:?}");
            }
        }
    }

    #[test]
    fn compute_r_constant_is_zero() {
        let d = disc(3, 8, BoundaryKind::Periodic, 1.0);
        let r = d.compute_r(&[0.8; 24]).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn compute_r_converges_for_smooth_periodic() {
        // a one-sided derivative of an interpolant loses one order against the basis degree
        let pi = std::f64::consts::PI;
        for q in 2..=4 {
            let err = |nx: usize| {
                let d = Discretization::new(
                    NodalBasis::new(q).unwrap(),
                    Mesh1D::uniform(-pi, pi, nx, BoundaryKind::Periodic).unwrap(),
                    VelocityGrid::new(1.0, 2).unwrap(),
                    EpsProfile::Constant(1.0),
                    FluxSelect::AltLr,
                )
                .unwrap();
                let xs = d.mesh.node_coordinates(&d.basis);
                let t: Vec<f64> = xs.iter().map(|x| 1.0 + 0.2 * x.sin()).collect();
                let r = d.compute_r(&t).unwrap();
                let mut e = 0.0;
                for i in 0..nx {
                    for k in 0..q {
                        let n = i * q + k;
                        e += d.basis.weights()[k] * d.mesh.h(i) * (r[n] - 0.2 * xs[n].cos()).abs();
                    }
                }
                e
            };
            let order = (err(20) / err(40)).log2();
            assert!(order > (q - 1) as f64 - 0.2, "q={q} order={order}");
        }
    }

    #[test]
    fn dirichlet_without_ghost_fails() {
        let d = disc(2, 4, BoundaryKind::Dirichlet { left: [1.0, 0.0, 0.5], right: [1.0, 0.0, 0.5] }, 1.0);
        let data = vec![0.0; 8];
        assert!(matches!(
            InterfaceTraces::new(&d.mesh, &d.basis, &data, 1, None),
            Err(BgkError::Boundary(_))
        ));
    }

    #[test]
    fn macro_rhs_freestream_and_conservation() {
        let d = disc(3, 10, BoundaryKind::Periodic, 0.3);
        let u = MacroField::from_fn(&d.mesh, &d.basis, |_| [1.0, 0.2, 0.8]);
        let g = KineticField::zeros(10, 3, 2);
        let rhs = d.macro_rhs(&u, &g).unwrap();
        assert!(rhs.nodes().iter().flatten().all(|x| x.abs() < 1e-12));

        let two_pi = 2.0 * std::f64::consts::PI;
        let u = MacroField::from_fn(&d.mesh, &d.basis, |x| {
            let rho = 1.0 + 0.3 * (two_pi * x).sin();
            crate::kinetic::MacroState::from_primitive(rho, 0.5, 1.0 + 0.1 * (two_pi * x).cos()).to_array()
        });
        let g = KineticField::from_fn(&d.mesh, &d.basis, 2, |x, out| {
            out[0] = (two_pi * x).cos();
            out[1] = x * x;
            Ok(())
        })
        .unwrap();
        let rhs = d.macro_rhs(&u, &g).unwrap();
        let tot = rhs.integral(&d.mesh, &d.basis);
        assert!(tot.iter().all(|x| x.abs() < 1e-12), "{tot:?}");
    }
}
