use proptest::prelude::*;

use bgk_ndg::harness::riemann::{ExactRiemann, GasState};
use bgk_ndg::kinetic::{self, MacroState};
use bgk_ndg::limiter::euler_eigenvectors;
use bgk_ndg::quadrature::NodalBasis;
use bgk_ndg::velocity::VelocityGrid;

fn grid() -> VelocityGrid {
    VelocityGrid::new(12.0, 120).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maxwellian_moments_recover_state(rho in 0.1f64..5.0, u in -1.5f64..1.5, t in 0.2f64..2.0) {
        let s = MacroState::from_primitive(rho, u, t).to_array();
        let m = kinetic::maxwellian(rho, u, t, &grid());
        let mom = grid().moment_vector(&m).unwrap();
        for c in 0..3 {
            prop_assert!((mom[c] - s[c]).abs() <= 1e-10 * s[c].abs().max(1.0));
        }
    }

    #[test]
    fn projection_removes_micro_part(rho in 0.2f64..3.0, u in -1.0f64..1.0, t in 0.3f64..1.5, a in -1.0f64..1.0, shift in -1.0f64..1.0) {
        let g = grid();
        let s = MacroState::from_primitive(rho, u, t).to_array();
        let f: Vec<f64> = g.points().iter().map(|v| (1.0 + a * v.sin()) * (-(v - shift).powi(2)).exp()).collect();
        let pf = kinetic::project_state(&f, s, &g).unwrap();
        let micro: Vec<f64> = f.iter().zip(&pf).map(|(x, y)| x - y).collect();
        let m = grid().moment_vector(&micro).unwrap();
        prop_assert!(m.iter().all(|x| x.abs() < 1e-10), "{m:?}");
        let again = kinetic::project_state(&micro, s, &g).unwrap();
        prop_assert!(again.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn primitives_round_trip(rho in 1e-3f64..10.0, u in -5.0f64..5.0, t in 1e-3f64..10.0) {
        let p = kinetic::primitives(MacroState::from_primitive(rho, u, t).to_array()).unwrap();
        prop_assert!((p.rho - rho).abs() <= 1e-12 * rho);
        prop_assert!((p.u - u).abs() <= 1e-10 * (1.0 + u.abs()));
        prop_assert!((p.t - t).abs() <= 1e-9 * (1.0 + t));
    }

    #[test]
    fn characteristic_bases_invert(rho in 0.05f64..5.0, u in -3.0f64..3.0, p in 0.05f64..5.0) {
        let (r, l) = euler_eigenvectors(MacroState::from_rho_u_p(rho, u, p).to_array()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l[i][k] * r[k][j]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((s - want).abs() < 1e-9, "{i}{j}: {s}");
            }
        }
    }

    #[test]
    fn riemann_star_state_balances_pressure(rl in 0.1f64..2.0, pl in 0.1f64..2.0, rr in 0.1f64..2.0, pr in 0.1f64..2.0, du in -0.5f64..0.5) {
        let rs = ExactRiemann::gamma3(GasState::new(rl, du, pl), GasState::new(rr, -du, pr)).unwrap();
        prop_assert!(rs.p_star() > 0.0);
        // far field is untouched
        prop_assert!((rs.sample(-50.0).rho - rl).abs() < 1e-12);
        prop_assert!((rs.sample(50.0).rho - rr).abs() < 1e-12);
        // the contact carries u*
        prop_assert!((rs.sample(rs.u_star()).u - rs.u_star()).abs() < 1e-9);
    }

    #[test]
    fn nodal_interpolation_reproduces_polynomials(q in 1usize..=5, c in prop::collection::vec(-2.0f64..2.0, 5), xi in -0.5f64..0.5) {
        let b = NodalBasis::new(q).unwrap();
        let poly = |x: f64| c.iter().take(q).rev().fold(0.0, |acc, k| acc * x + k);
        let vals: Vec<f64> = b.nodes().iter().map(|&x| poly(x)).collect();
        prop_assert!((b.eval_nodal(&vals, xi) - poly(xi)).abs() < 1e-10);
    }
}
