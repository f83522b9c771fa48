//! Exact Riemann solver for the ideal-gas Euler equations.
//!
//! Newton iteration on the star-region pressure function with shock and
//! rarefaction branches, then self-similar sampling.

use crate::error::{BgkError, Result};
use crate::kinetic::GAMMA;

/// `(ρ, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

impl GasState {
    pub fn new(rho: f64, u: f64, p: f64) -> Self {
        GasState { rho, u, p }
    }

    fn sound_speed(&self, gamma: f64) -> f64 {
        (gamma * self.p / self.rho).sqrt()
    }

    /// Conserved variables `(ρ, ρu, p/(γ−1) + ½ρu²)`.
    pub fn conserved(&self, gamma: f64) -> [f64; 3] {
        [
            self.rho,
            self.rho * self.u,
            self.p / (gamma - 1.0) + 0.5 * self.rho * self.u * self.u,
        ]
    }

    pub fn flux(&self, gamma: f64) -> [f64; 3] {
        let e = self.conserved(gamma)[2];
        [
            self.rho * self.u,
            self.rho * self.u * self.u + self.p,
            (e + self.p) * self.u,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactRiemann {
    left: GasState,
    right: GasState,
    gamma: f64,
    p_star: f64,
    u_star: f64,
}

impl ExactRiemann {
    pub fn gamma3(left: GasState, right: GasState) -> Result<Self> {
        Self::new(left, right, GAMMA)
    }

    pub fn new(left: GasState, right: GasState, gamma: f64) -> Result<Self> {
        for s in [left, right] {
            if !(s.rho > 0.0 && s.p > 0.0 && s.u.is_finite()) {
                return Err(BgkError::invalid(format!("inadmissible Riemann state {s:?}")));
            }
        }
        if !(gamma > 1.0) {
            return Err(BgkError::invalid("adiabatic index must exceed 1"));
        }
        let (al, ar) = (left.sound_speed(gamma), right.sound_speed(gamma));
        let du = right.u - left.u;
        if 2.0 / (gamma - 1.0) * (al + ar) <= du {
            return Err(BgkError::invalid("Riemann data generate vacuum"));
        }

        let pv = 0.5 * (left.p + right.p) - 0.125 * du * (left.rho + right.rho) * (al + ar);
        let mut p = pv.max(1e-8 * (left.p + right.p));
        let mut converged = false;
        for _ in 0..100 {
            let (fl, dfl) = pressure_fn(p, &left, gamma);
            let (fr, dfr) = pressure_fn(p, &right, gamma);
            let f = fl + fr + du;
            let mut next = p - f / (dfl + dfr);
            if next <= 0.0 {
                next = 0.5 * p;
            }
            let change = 2.0 * (next - p).abs() / (next + p);
            p = next;
            if change < 1e-14 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(BgkError::invalid("star pressure iteration did not converge"));
        }
        let (fl, _) = pressure_fn(p, &left, gamma);
        let (fr, _) = pressure_fn(p, &right, gamma);
        let u_star = 0.5 * (left.u + right.u) + 0.5 * (fr - fl);
        Ok(ExactRiemann {
            left,
            right,
            gamma,
            p_star: p,
            u_star,
        })
    }

    pub fn p_star(&self) -> f64 {
        self.p_star
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    /// Star-region densities `(ρ*_L, ρ*_R)`.
    pub fn star_densities(&self) -> (f64, f64) {
        (self.star_density(&self.left), self.star_density(&self.right))
    }

    fn star_density(&self, s: &GasState) -> f64 {
        let g = self.gamma;
        let ratio = self.p_star / s.p;
        if ratio > 1.0 {
            let k = (g - 1.0) / (g + 1.0);
            s.rho * (ratio + k) / (k * ratio + 1.0)
        } else {
            s.rho * ratio.powf(1.0 / g)
        }
    }

    /// Speed of the left and right shocks, when present.
    pub fn shock_speeds(&self) -> (Option<f64>, Option<f64>) {
        let g = self.gamma;
        let speed = |s: &GasState, sign: f64| {
            let ratio = self.p_star / s.p;
            (ratio > 1.0).then(|| {
                s.u + sign * s.sound_speed(g) * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt()
            })
        };
        (speed(&self.left, -1.0), speed(&self.right, 1.0))
    }

    /// State at similarity coordinate `ξ = (x − x₀)/t`.
    pub fn sample(&self, xi: f64) -> GasState {
        let g = self.gamma;
        let (l, r) = (self.left, self.right);
        let (ps, us) = (self.p_star, self.u_star);
        if xi <= us {
            let a = l.sound_speed(g);
            if ps > l.p {
                let (sl, _) = self.shock_speeds();
                if xi <= sl.unwrap() {
                    l
                } else {
                    GasState::new(self.star_density(&l), us, ps)
                }
            } else {
                let head = l.u - a;
                let a_star = a * (ps / l.p).powf((g - 1.0) / (2.0 * g));
                let tail = us - a_star;
                if xi <= head {
                    l
                } else if xi >= tail {
                    GasState::new(self.star_density(&l), us, ps)
                } else {
                    let c = 2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * a) * (l.u - xi);
                    GasState::new(
                        l.rho * c.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (a + 0.5 * (g - 1.0) * l.u + xi),
                        l.p * c.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        } else {
            let a = r.sound_speed(g);
            if ps > r.p {
                let (_, sr) = self.shock_speeds();
                if xi >= sr.unwrap() {
                    r
                } else {
                    GasState::new(self.star_density(&r), us, ps)
                }
            } else {
                let head = r.u + a;
                let a_star = a * (ps / r.p).powf((g - 1.0) / (2.0 * g));
                let tail = us + a_star;
                if xi >= head {
                    r
                } else if xi <= tail {
                    GasState::new(self.star_density(&r), us, ps)
                } else {
                    let c = 2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * a) * (r.u - xi);
                    GasState::new(
                        r.rho * c.powf(2.0 / (g - 1.0)),
                        2.0 / (g + 1.0) * (-a + 0.5 * (g - 1.0) * r.u + xi),
                        r.p * c.powf(2.0 * g / (g - 1.0)),
                    )
                }
            }
        }
    }

    /// Profile at positions `xs` for a jump initially at `x0`, time `t > 0`.
    pub fn profile(&self, xs: &[f64], x0: f64, t: f64) -> Result<Vec<GasState>> {
        if !(t > 0.0) {
            return Err(BgkError::invalid("sampling time must be positive"));
        }
        Ok(xs.iter().map(|&x| self.sample((x - x0) / t)).collect())
    }
}

fn pressure_fn(p: f64, s: &GasState, g: f64) -> (f64, f64) {
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (p + b)))
    } else {
        let c = s.sound_speed(g);
        let e = (g - 1.0) / (2.0 * g);
        let ratio = p / s.p;
        (
            2.0 * c / (g - 1.0) * (ratio.powf(e) - 1.0),
            ratio.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c),
        )
    }
}

/// Shock speed from mass conservation and the largest jump-condition
/// residual `|[F] − s[U]|` over momentum and energy.
pub fn rankine_hugoniot_residual(upstream: GasState, downstream: GasState, gamma: f64) -> (f64, f64) {
    let (ua, ub) = (upstream.conserved(gamma), downstream.conserved(gamma));
    let (fa, fb) = (upstream.flux(gamma), downstream.flux(gamma));
    let s = (fa[0] - fb[0]) / (ua[0] - ub[0]);
    let res = (1..3)
        .map(|c| ((fa[c] - fb[c]) - s * (ua[c] - ub[c])).abs())
        .fold(0.0, f64::max);
    (s, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sod_star_state_regression() {
        let r = ExactRiemann::gamma3(GasState::new(1.0, 0.0, 1.0), GasState::new(0.125, 0.0, 0.1)).unwrap();
        assert!((r.p_star() - 0.272909467285613).abs() < 1e-10);
        assert!((r.u_star() - 0.60856697289031).abs() < 1e-10);
        let (dl, dr) = r.star_densities();
        assert!((dl - 0.648643694381864).abs() < 1e-10);
        assert!((dr - 0.170703638657858).abs() < 1e-10);
        let (none, shock) = r.shock_speeds();
        assert!(none.is_none());
        assert!((shock.unwrap() - 2.27300494424667).abs() < 1e-10);
    }

    #[test]
    fn equal_states_are_constant() {
        let s = GasState::new(0.7, 0.3, 1.1);
        let r = ExactRiemann::gamma3(s, s).unwrap();
        for xi in [-5.0, -0.1, 0.0, 0.2, 4.0] {
            let v = r.sample(xi);
            assert!((v.rho - 0.7).abs() < 1e-12 && (v.u - 0.3).abs() < 1e-12 && (v.p - 1.1).abs() < 1e-12);
        }
    }

    #[test]
    fn contact_only() {
        let r = ExactRiemann::gamma3(GasState::new(1.0, 0.5, 1.0), GasState::new(0.2, 0.5, 1.0)).unwrap();
        assert!((r.u_star() - 0.5).abs() < 1e-12 && (r.p_star() - 1.0).abs() < 1e-12);
        assert!((r.sample(0.49).rho - 1.0).abs() < 1e-12);
        assert!((r.sample(0.51).rho - 0.2).abs() < 1e-12);
    }

    #[test]
    fn rarefaction_is_continuous() {
        let r = ExactRiemann::gamma3(GasState::new(1.0, 0.0, 1.0), GasState::new(0.125, 0.0, 0.1)).unwrap();
        let head = -(3.0f64).sqrt();
        let a = r.sample(head - 1e-9);
        let b = r.sample(head + 1e-9);
        assert!((a.rho - b.rho).abs() < 1e-6);
        let a_star = (3.0 * r.p_star() / r.star_densities().0).sqrt();
        let tail = r.u_star() - a_star;
        let (c, d) = (r.sample(tail - 1e-9), r.sample(tail + 1e-9));
        assert!((c.rho - d.rho).abs() < 1e-6);
    }

    #[test]
    fn vacuum_rejected() {
        assert!(ExactRiemann::gamma3(GasState::new(1.0, -10.0, 0.1), GasState::new(1.0, 10.0, 0.1)).is_err());
    }

    #[test]
    fn shock_satisfies_jump_conditions() {
        let r = ExactRiemann::gamma3(GasState::new(1.0, 0.0, 1.0), GasState::new(0.125, 0.0, 0.1)).unwrap();
        let (_, sr) = r.shock_speeds();
        let star = GasState::new(r.star_densities().1, r.u_star(), r.p_star());
        let (s, res) = rankine_hugoniot_residual(star, GasState::new(0.125, 0.0, 0.1), 3.0);
        assert!((s - sr.unwrap()).abs() < 1e-9);
        assert!(res < 1e-10);
    }
}
