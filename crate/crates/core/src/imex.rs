//! Implicit-explicit Runge–Kutta stepping for the micro-macro system.
//!
//! Transport terms go through the explicit table, relaxation and source
//! through the implicit one. The implicit solve is diagonal per node and
//! velocity because the source depends only on the stage `U`.

use crate::dg::{Discretization, KineticField, MacroField};
use crate::error::{BgkError, Result};
use crate::limiter::{tvb_limit, LimiterConfig};
use crate::schemes::{micro_transport, stiff_source, Equilibrium, Scheme};

const TABLE_TOL: f64 = 1e-14;

/// A double Butcher tableau; matrices are dense row-major `s × s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherPair {
    name: String,
    s: usize,
    a_exp: Vec<f64>,
    b_exp: Vec<f64>,
    c_exp: Vec<f64>,
    a_imp: Vec<f64>,
    b_imp: Vec<f64>,
    c_imp: Vec<f64>,
}

impl ButcherPair {
    /// Builds a pair; `c̃` and `c` are the row sums.
    pub fn new(
        name: impl Into<String>,
        a_exp: Vec<Vec<f64>>,
        b_exp: Vec<f64>,
        a_imp: Vec<Vec<f64>>,
        b_imp: Vec<f64>,
    ) -> Result<Self> {
        let s = b_exp.len();
        if s == 0 || b_imp.len() != s || a_exp.len() != s || a_imp.len() != s {
            return Err(BgkError::invalid("tableau dimensions disagree"));
        }
        let flat = |rows: Vec<Vec<f64>>, lower_strict: bool| -> Result<Vec<f64>> {
            let mut out = vec![0.0; s * s];
            for (l, row) in rows.into_iter().enumerate() {
                if row.len() > s {
                    return Err(BgkError::invalid("tableau row too long"));
                }
                for (j, v) in row.into_iter().enumerate() {
                    let allowed = if lower_strict { j < l } else { j <= l };
                    if !allowed && v != 0.0 {
                        return Err(BgkError::invalid(format!(
                            "entry ({l}, {j}) must vanish in a {} tableau",
                            if lower_strict { "strictly lower triangular" } else { "lower triangular" }
                        )));
                    }
                    out[l * s + j] = v;
                }
            }
            Ok(out)
        };
        let a_exp = flat(a_exp, true)?;
        let a_imp = flat(a_imp, false)?;
        let row_sums = |a: &[f64]| (0..s).map(|l| a[l * s..(l + 1) * s].iter().sum()).collect();
        let c_exp = row_sums(&a_exp);
        let c_imp = row_sums(&a_imp);
        if a_imp.iter().enumerate().any(|(n, &v)| n % (s + 1) == 0 && v < 0.0) {
            return Err(BgkError::invalid("implicit diagonal must be non-negative"));
        }
        Ok(ButcherPair {
            name: name.into(),
            s,
            a_exp,
            b_exp,
            c_exp,
            a_imp,
            b_imp,
            c_imp,
        })
    }

    /// The globally stiffly accurate ARS(4,4,3) pair.
    pub fn ars443() -> Self {
        ButcherPair::new(
            "ars443",
            vec![
                vec![],
                vec![0.5],
                vec![11.0 / 18.0, 1.0 / 18.0],
                vec![5.0 / 6.0, -5.0 / 6.0, 0.5],
                vec![0.25, 1.75, 0.75, -1.75],
            ],
            vec![0.25, 1.75, 0.75, -1.75, 0.0],
            vec![
                vec![],
                vec![0.0, 0.5],
                vec![0.0, 1.0 / 6.0, 0.5],
                vec![0.0, -0.5, 0.5, 0.5],
                vec![0.0, 1.5, -1.5, 0.5, 0.5],
            ],
            vec![0.0, 1.5, -1.5, 0.5, 0.5],
        )
        .expect("static tableau")
    }

    /// Forward Euler for transport, backward Euler for relaxation.
    pub fn euler() -> Self {
        ButcherPair::new(
            "euler",
            vec![vec![], vec![1.0]],
            vec![1.0, 0.0],
            vec![vec![], vec![0.0, 1.0]],
            vec![0.0, 1.0],
        )
        .expect("static tableau")
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "ars443" | "ars(4,4,3)" => Ok(Self::ars443()),
            "euler" | "imex-euler" => Ok(Self::euler()),
            other => Err(BgkError::invalid(format!("unknown IMEX pair '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn stages(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn a_exp(&self, l: usize, j: usize) -> f64 {
        self.a_exp[l * self.s + j]
    }

    #[inline]
    pub fn a_imp(&self, l: usize, j: usize) -> f64 {
        self.a_imp[l * self.s + j]
    }

    pub fn b_exp(&self) -> &[f64] {
        &self.b_exp
    }

    pub fn b_imp(&self) -> &[f64] {
        &self.b_imp
    }

    pub fn c_exp(&self) -> &[f64] {
        &self.c_exp
    }

    pub fn c_imp(&self) -> &[f64] {
        &self.c_imp
    }

    /// Mutable weights, for building perturbed tableaux.
    pub fn with_b_exp(mut self, b: Vec<f64>) -> Result<Self> {
        if b.len() != self.s {
            return Err(BgkError::invalid("weight vector has the wrong length"));
        }
        self.b_exp = b;
        Ok(self)
    }

    pub fn validate_gsa(&self) -> GsaReport {
        validate_gsa(self)
    }

    pub fn is_gsa(&self) -> bool {
        validate_gsa(self).passed()
    }

    /// One step of `y' = λ_E y + λ_I y` with `λ_E` explicit and `λ_I` implicit.
    pub fn step_scalar_linear(&self, y: f64, dt: f64, lambda_e: f64, lambda_i: f64) -> f64 {
        let s = self.s;
        let mut ys = vec![0.0; s];
        for l in 0..s {
            let mut acc = y;
            for j in 0..l {
                acc += dt * (self.a_exp(l, j) * lambda_e + self.a_imp(l, j) * lambda_i) * ys[j];
            }
            ys[l] = acc / (1.0 - dt * self.a_imp(l, l) * lambda_i);
        }
        let mut out = y;
        for l in 0..s {
            out += dt * (self.b_exp[l] * lambda_e + self.b_imp[l] * lambda_i) * ys[l];
        }
        out
    }
}

/// Result of checking the structural conditions on a pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GsaReport {
    pub violations: Vec<String>,
}

impl GsaReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks strict lower-triangularity of `Ã`, `c̃_s = c_s = 1`,
/// and that the last rows of `Ã` and `A` equal `b̃` and `b`.
pub fn validate_gsa(pair: &ButcherPair) -> GsaReport {
    let s = pair.s;
    let mut v = Vec::new();
    for l in 0..s {
        for j in l..s {
            if pair.a_exp(l, j) != 0.0 {
                v.push(format!("explicit entry ã_{}{} = {} is not strictly lower", l + 1, j + 1, pair.a_exp(l, j)));
            }
        }
        for j in l + 1..s {
            if pair.a_imp(l, j) != 0.0 {
                v.push(format!("implicit entry a_{}{} is above the diagonal", l + 1, j + 1));
            }
        }
    }
    if (pair.c_exp[s - 1] - 1.0).abs() > TABLE_TOL {
        v.push(format!("c̃_s = {} ≠ 1", pair.c_exp[s - 1]));
    }
    if (pair.c_imp[s - 1] - 1.0).abs() > TABLE_TOL {
        v.push(format!("c_s = {} ≠ 1", pair.c_imp[s - 1]));
    }
    for j in 0..s {
        if (pair.a_exp(s - 1, j) - pair.b_exp[j]).abs() > TABLE_TOL {
            v.push(format!("ã_s{} = {} ≠ b̃_{} = {}", j + 1, pair.a_exp(s - 1, j), j + 1, pair.b_exp[j]));
        }
        if (pair.a_imp(s - 1, j) - pair.b_imp[j]).abs() > TABLE_TOL {
            v.push(format!("a_s{} = {} ≠ b_{} = {}", j + 1, pair.a_imp(s - 1, j), j + 1, pair.b_imp[j]));
        }
    }
    GsaReport { violations: v }
}

/// CFL constant for `q` nodes per element.
pub fn cfl_constant(q: usize) -> Result<f64> {
    match q {
        1 => Ok(0.2),
        2 => Ok(0.1),
        3 => Ok(0.05),
        4 => Ok(0.01),
        _ => Err(BgkError::invalid(format!("no CFL rule for q = {q}"))),
    }
}

/// `Δt = C Δx / max(Λ, V_c)`, with `Δx^{4/3}` for `q = 4`.
pub fn cfl_dt_from_speed(lambda: f64, v_cut: f64, q: usize, h: f64, c_override: Option<f64>) -> Result<f64> {
    let c = match c_override {
        Some(c) if c > 0.0 => c,
        Some(c) => return Err(BgkError::invalid(format!("CFL constant must be positive, got {c}"))),
        None => cfl_constant(q)?,
    };
    let hx = if q == 4 { h.powf(4.0 / 3.0) } else { h };
    Ok(c * hx / lambda.max(v_cut))
}

/// Time step for the macroscopic field `u` on `disc`.
pub fn cfl_dt(disc: &Discretization, u: &MacroField, c_override: Option<f64>) -> Result<f64> {
    let prims = u.primitives(&disc.mesh, &disc.basis)?;
    let lambda = Discretization::max_wave_speed(&prims);
    cfl_dt_from_speed(lambda, disc.grid.v_cut(), disc.q(), disc.mesh.h_max(), c_override)
}

/// Stage quantities retained by [`ImexStepper::step`].
#[derive(Debug, Clone, Default)]
pub struct StageHistory {
    /// `dU/dt` at each stage (absent when no later row uses it).
    pub macro_rhs: Vec<Option<MacroField>>,
    /// `−(I − Π)𝒟_{h,1}(εvg)` at each stage.
    pub micro_explicit: Vec<Option<KineticField>>,
    /// `−g + s` at each stage.
    pub micro_stiff: Vec<KineticField>,
    /// Stage macroscopic fields after limiting.
    pub stage_u: Vec<MacroField>,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub u: MacroField,
    pub g: KineticField,
    pub history: StageHistory,
}

/// One IMEX step for the micro-macro system.
#[derive(Debug, Clone, Copy)]
pub struct ImexStepper<'a> {
    pub disc: &'a Discretization,
    pub pair: &'a ButcherPair,
    pub scheme: Scheme,
    pub limiter: Option<&'a LimiterConfig>,
}

impl<'a> ImexStepper<'a> {
    pub fn new(disc: &'a Discretization, pair: &'a ButcherPair, scheme: Scheme) -> Self {
        ImexStepper {
            disc,
            pair,
            scheme,
            limiter: None,
        }
    }

    pub fn with_limiter(mut self, limiter: Option<&'a LimiterConfig>) -> Self {
        self.limiter = limiter.filter(|l| l.enabled);
        self
    }

    fn limit(&self, u: MacroField) -> Result<MacroField> {
        match self.limiter {
            Some(cfg) => tvb_limit(&u, &self.disc.basis, &self.disc.mesh, cfg),
            None => Ok(u),
        }
    }

    /// Advances `(u, g)` by `dt`; `step_index` only labels errors.
    pub fn step(&self, u: &MacroField, g: &KineticField, dt: f64, step_index: usize) -> Result<StepOutput> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(BgkError::invalid(format!("time step must be positive, got {dt}")));
        }
        let disc = self.disc;
        let pair = self.pair;
        let s = pair.stages();
        let alpha = {
            let prims = u
                .primitives(&disc.mesh, &disc.basis)
                .map_err(|e| e.in_stage(step_index, 0))?;
            Discretization::max_wave_speed(&prims)
        };
        let eps = disc.eps.nodal();
        let nv = disc.nv();

        // a stage's explicit terms are needed only if a later row or b̃ uses them
        let exp_needed: Vec<bool> = (0..s)
            .map(|j| pair.b_exp()[j] != 0.0 || (j + 1..s).any(|l| pair.a_exp(l, j) != 0.0))
            .collect();
        let gsa = pair.is_gsa();

        let mut hist = StageHistory::default();
        let mut last_g = g.clone();
        for l in 0..s {
            let stage_err = |e: BgkError| e.in_stage(step_index, l + 1);
            let mut ul = u.clone();
            for j in 0..l {
                let a = pair.a_exp(l, j);
                if a != 0.0 {
                    let k = hist.macro_rhs[j].as_ref().expect("explicit term retained");
                    ul.axpy(dt * a, k);
                }
            }
            let ul = self.limit(ul).map_err(stage_err)?;
            let eq = Equilibrium::new(disc, &ul).map_err(stage_err)?;
            let all = pair.a_imp(l, l);
            let source = if all != 0.0 {
                Some(stiff_source(disc, self.scheme, &eq).map_err(stage_err)?.0)
            } else {
                None
            };

            let mut gl = g.clone();
            let trivial = l == 0 && all == 0.0;
            for n in 0..gl.node_count() {
                if trivial {
                    break;
                }
                let e = eps[n];
                let denom = e + dt * all;
                let row = gl.node_mut(n);
                if denom == 0.0 {
                    if l == 0 {
                        continue;
                    }
                    return Err(stage_err(BgkError::invalid(
                        "implicit stage is singular: zero Knudsen number with a vanishing diagonal",
                    )));
                }
                for x in row.iter_mut() {
                    *x *= e;
                }
                for j in 0..l {
                    let (ae, ai) = (pair.a_exp(l, j), pair.a_imp(l, j));
                    if ae != 0.0 {
                        let ex = hist.micro_explicit[j].as_ref().expect("explicit term retained").node(n);
                        for (x, &t) in row.iter_mut().zip(ex) {
                            *x += dt * ae * t;
                        }
                    }
                    if ai != 0.0 {
                        let st = hist.micro_stiff[j].node(n);
                        for (x, &t) in row.iter_mut().zip(st) {
                            *x += dt * ai * t;
                        }
                    }
                }
                if let Some(src) = &source {
                    let sn = src.node(n);
                    for (x, &t) in row.iter_mut().zip(sn) {
                        *x += dt * all * t;
                    }
                }
                let inv = 1.0 / denom;
                for x in row.iter_mut() {
                    *x *= inv;
                }
            }
            debug_assert_eq!(gl.nv(), nv);

            // −g + s at this stage; s is only formed when the implicit column is used
            let stiff_used = all != 0.0
                || pair.b_imp()[l] != 0.0
                || (l + 1..s).any(|m| pair.a_imp(m, l) != 0.0);
            let mut h = match (&source, stiff_used) {
                (Some(src), _) => src.clone(),
                (None, true) => stiff_source(disc, self.scheme, &eq).map_err(stage_err)?.0,
                (None, false) => KineticField::zeros(disc.nx(), disc.q(), nv),
            };
            h.axpy(-1.0, &gl);

            let (k, ex) = if exp_needed[l] {
                let gm = disc.flux_moments(&gl);
                let k = disc
                    .macro_rhs_with_moments(&ul, Some(&gm), Some(alpha))
                    .map_err(stage_err)?;
                let (ex, _) = micro_transport(disc, &eq, &gl).map_err(stage_err)?;
                (Some(k), Some(ex))
            } else {
                (None, None)
            };
            hist.macro_rhs.push(k);
            hist.micro_explicit.push(ex);
            hist.micro_stiff.push(h);
            hist.stage_u.push(ul);
            last_g = gl;
        }

        if gsa {
            let u_new = hist.stage_u[s - 1].clone();
            return Ok(StepOutput {
                u: u_new,
                g: last_g,
                history: hist,
            });
        }

        let final_err = |e: BgkError| e.in_stage(step_index, s + 1);
        let mut u_new = u.clone();
        let mut g_new = g.clone();
        for j in 0..s {
            let be = pair.b_exp()[j];
            if be != 0.0 {
                u_new.axpy(dt * be, hist.macro_rhs[j].as_ref().expect("explicit term retained"));
            }
        }
        for n in 0..g_new.node_count() {
            let e = eps[n];
            if !(e > 0.0) {
                return Err(final_err(BgkError::invalid(
                    "final assembly of a non stiffly accurate pair needs a positive Knudsen number",
                )));
            }
            let row = g_new.node_mut(n);
            for j in 0..s {
                let (be, bi) = (pair.b_exp()[j], pair.b_imp()[j]);
                if be != 0.0 {
                    let ex = hist.micro_explicit[j].as_ref().expect("explicit term retained").node(n);
                    for (x, &t) in row.iter_mut().zip(ex) {
                        *x += dt / e * be * t;
                    }
                }
                if bi != 0.0 {
                    for (x, &t) in row.iter_mut().zip(hist.micro_stiff[j].node(n)) {
                        *x += dt / e * bi * t;
                    }
                }
            }
        }
        let u_new = self.limit(u_new).map_err(final_err)?;
        u_new
            .primitives(&disc.mesh, &disc.basis)
            .map_err(final_err)?;
        Ok(StepOutput {
            u: u_new,
            g: g_new,
            history: hist,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ars443_is_gsa_with_expected_abscissae() {
        let p = ButcherPair::ars443();
        assert!(p.validate_gsa().passed(), "{:?}", p.validate_gsa());
        let c = [0.0, 0.5, 2.0 / 3.0, 0.5, 1.0];
        for (a, b) in p.c_exp().iter().zip(c) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in p.c_imp().iter().zip(c) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(ButcherPair::euler().is_gsa());
    }

    #[test]
    fn perturbed_weight_breaks_gsa() {
        let p = ButcherPair::ars443()
            .with_b_exp(vec![0.25, 1.75, 0.75, -1.75, 0.1])
            .unwrap();
        let r = p.validate_gsa();
        assert!(!r.passed());
        assert!(r.violations.iter().any(|m| m.contains("ã_s5")), "{r:?}");
    }

    #[test]
    fn non_triangular_tables_rejected() {
        assert!(ButcherPair::new("bad", vec![vec![1.0]], vec![1.0], vec![vec![1.0]], vec![1.0]).is_err());
        assert!(ButcherPair::new("bad", vec![vec![]], vec![1.0], vec![vec![-1.0]], vec![1.0]).is_err());
    }

    #[test]
    fn cfl_examples() {
        let dt = cfl_dt_from_speed(3f64.sqrt(), 4.5, 3, 0.028, None).unwrap();
        assert!((dt - 0.05 * 0.028 / 4.5).abs() < 1e-18);
        let dt = cfl_dt_from_speed(3f64.sqrt(), 12.0, 1, 0.1, None).unwrap();
        assert!((dt - 0.2 * 0.1 / 12.0).abs() < 1e-18);
        let a = cfl_dt_from_speed(1.0, 12.0, 4, 0.1, None).unwrap();
        let b = cfl_dt_from_speed(1.0, 12.0, 4, 0.05, None).unwrap();
        assert!((b / a - 2f64.powf(-4.0 / 3.0)).abs() < 1e-14);
        assert!(cfl_dt_from_speed(1.0, 1.0, 5, 0.1, None).is_err());
    }

    #[test]
    fn scalar_order_at_least_three() {
        let p = ButcherPair::ars443();
        let (le, li) = (0.7, -1.3);
        let exact = ((le + li) * 1.0f64).exp();
        let err = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut y = 1.0;
            for _ in 0..n {
                y = p.step_scalar_linear(y, dt, le, li);
            }
            (y - exact).abs()
        };
        let order = (err(20) / err(40)).log2();
        assert!(order > 2.9, "order {order}");
        let pe = ButcherPair::euler();
        let err1 = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut y = 1.0;
            for _ in 0..n {
                y = pe.step_scalar_linear(y, dt, le, li);
            }
            (y - exact).abs()
        };
        assert!(((err1(100) / err1(200)).log2() - 1.0).abs() < 0.1);
    }

    #[test]
    fn implicit_table_damps_relaxation() {
        let p = ButcherPair::ars443();
        for eps in [1.0, 1e-3, 1e-6] {
            for dt in [1e-3, 1e-2, 1e-1, 1.0] {
                let amp = p.step_scalar_linear(1.0, dt, 0.0, -1.0 / eps);
                assert!(amp.abs() <= 1.0, "eps={eps} dt={dt} amp={amp}");
            }
        }
    }
}
