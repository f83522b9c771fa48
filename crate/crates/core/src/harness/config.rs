//! Flat `key = value` run configuration, shared by config files and CLI flags.
//!
//! Settings are applied in order on top of the named case, so later
//! entries (CLI flags) override earlier ones (file).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::dg::{EpsProfile, FluxSelect};
use crate::error::{BgkError, Result};
use crate::harness::cases::{BoundarySpec, CaseSpec, SolverKind};
use crate::imex::ButcherPair;
use crate::limiter::LimitVariables;
use crate::schemes::Scheme;

pub const KEYS: [&str; 19] = [
    "case", "scheme", "solver", "q", "nx", "nv", "vc", "eps", "eps-profile", "tend", "flux", "limiter", "mtvb",
    "limit-vars", "out", "pair", "cfl", "probe", "boundary",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| BgkError::Config(format!("line {}: expected key = value", n + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(BgkError::Config(format!("line {}: unknown key '{key}'", n + 1)));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

pub fn load_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BgkError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| BgkError::Config(format!("{key}: cannot parse '{v}'")))
}

fn wrap<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| BgkError::Config(format!("{key}: {e}")))
}

/// Applies one setting to `case`. `out` and `case` are not handled here.
pub fn apply_setting(case: &mut CaseSpec, key: &str, value: &str) -> Result<()> {
    match key {
        "scheme" => {
            let s: Scheme = wrap(key, value.parse())?;
            case.solver = SolverKind::Bgk(s);
        }
        "solver" => case.solver = wrap(key, value.parse())?,
        "q" => case.q = num(key, value)?,
        "nx" => case.nx = num(key, value)?,
        "nv" => case.nv = num(key, value)?,
        "vc" => case.v_cut = num(key, value)?,
        "eps" => {
            let e: f64 = num(key, value)?;
            if !(e >= 0.0 && e.is_finite()) {
                return Err(BgkError::Config(format!("eps must be non-negative, got {value}")));
            }
            case.eps = EpsProfile::Constant(e);
        }
        "eps-profile" => {
            let (a, b) = value
                .split_once(',')
                .ok_or_else(|| BgkError::Config("eps-profile expects 'a0,eps0'".into()))?;
            let a0: f64 = num(key, a.trim())?;
            let eps0: f64 = num(key, b.trim())?;
            if !(eps0 >= 0.0) {
                return Err(BgkError::Config("eps-profile: eps0 must be non-negative".into()));
            }
            case.eps = EpsProfile::Tanh { eps0, a0 };
        }
        "tend" => case.t_end = num(key, value)?,
        "flux" => case.flux = wrap(key, value.parse::<FluxSelect>())?,
        "limiter" => match value {
            "none" | "off" => case.limiter.enabled = false,
            "tvb" | "on" => case.limiter.enabled = true,
            other => return Err(BgkError::Config(format!("limiter: expected none or tvb, got '{other}'"))),
        },
        "mtvb" => {
            let m: f64 = num(key, value)?;
            if !(m >= 0.0) {
                return Err(BgkError::Config("mtvb must be non-negative".into()));
            }
            case.limiter.m_tvb = m;
        }
        "limit-vars" => case.limiter.variables = wrap(key, value.parse::<LimitVariables>())?,
        "pair" => {
            wrap(key, ButcherPair::by_name(value))?;
            case.pair = value.to_string();
        }
        "cfl" => case.cfl = Some(num(key, value)?),
        "probe" => {
            case.probe_x = match value {
                "none" => None,
                v => Some(num(key, v)?),
            }
        }
        "boundary" => case.boundary = wrap(key, value.parse::<BoundarySpec>())?,
        "case" | "out" => {}
        other => return Err(BgkError::Config(format!("unknown key '{other}'"))),
    }
    Ok(())
}

/// Builds the case from ordered settings; the last `case` entry picks the base.
pub fn build_case(settings: &[(String, String)]) -> Result<(CaseSpec, Option<PathBuf>)> {
    let name = settings
        .iter()
        .rev()
        .find(|(k, _)| k == "case")
        .map(|(_, v)| v.as_str())
        .unwrap_or("smooth");
    let mut case = CaseSpec::by_name(name)?;
    let mut out = None;
    for (k, v) in settings {
        if k == "out" {
            out = Some(PathBuf::from(v));
        } else {
            apply_setting(&mut case, k, v)?;
        }
    }
    case.validate()?;
    Ok((case, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let text = "# sod at moderate eps\ncase = sod\nnx = 80\neps=1e-2 # inline\nlimiter = none\n";
        let mut s = parse_config_text(text).unwrap();
        s.push(("nx".into(), "40".into()));
        s.push(("out".into(), "results".into()));
        let (c, out) = build_case(&s).unwrap();
        assert_eq!(c.name, "sod");
        assert_eq!(c.nx, 40);
        assert_eq!(c.eps.as_constant(), Some(1e-2));
        assert!(!c.limiter.enabled);
        assert_eq!(out, Some(PathBuf::from("results")));
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_config_text("nx 40").is_err());
        assert!(parse_config_text("colour = blue").is_err());
        let bad = |k: &str, v: &str| build_case(&[(k.to_string(), v.to_string())]).is_err();
        assert!(bad("nx", "many"));
        assert!(bad("nv", "7"));
        assert!(bad("flux", "upwind"));
        assert!(bad("eps", "-1"));
        assert!(bad("limiter", "weno"));
        assert!(bad("case", "unknown"));
    }

    #[test]
    fn eps_profile_and_scheme() {
        let s = vec![
            ("case".to_string(), "mixed".to_string()),
            ("eps-profile".to_string(), "40,1e-3".to_string()),
            ("scheme".to_string(), "1".to_string()),
        ];
        let (c, _) = build_case(&s).unwrap();
        assert!(matches!(c.eps, EpsProfile::Tanh { a0, eps0 } if a0 == 40.0 && eps0 == 1e-3));
        assert_eq!(c.solver, SolverKind::Bgk(Scheme::One));
    }
}
