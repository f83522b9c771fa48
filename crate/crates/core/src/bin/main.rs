use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bgk_ndg::harness::cases::CASE_NAMES;
use bgk_ndg::harness::config::{build_case, load_config_file};
use bgk_ndg::harness::output::{write_run, write_table};
use bgk_ndg::harness::run::run;
use bgk_ndg::harness::study::{self, StudyKind, Table};
use bgk_ndg::harness::CaseSpec;
use bgk_ndg::{BgkError, Result};

#[derive(Parser)]
#[command(name = "bgk-ndg", version, about = "Micro-macro nodal DG solver for the 1D BGK equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write its CSV files.
    Run(Settings),
    /// Run a multi-run study and print (or write) its table.
    Study {
        /// convergence, eps-sweep, conservation or scheme-compare
        kind: String,
        /// Comma-separated list: meshes, Knudsen numbers or cut-off speeds.
        #[arg(long)]
        values: Option<String>,
        #[command(flatten)]
        settings: Settings,
    },
    /// List the built-in cases.
    Cases,
}

#[derive(Args, Default)]
struct Settings {
    /// key = value file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    /// 1 or 2.
    #[arg(long)]
    scheme: Option<String>,
    /// bgk1, bgk2, ns, euler or explicit-bgk.
    #[arg(long)]
    solver: Option<String>,
    /// Gauss points per element (the K of NDG K).
    #[arg(long, alias = "ndg")]
    q: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    nv: Option<String>,
    /// Velocity cut-off.
    #[arg(long)]
    vc: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    /// a0,eps0 for the tanh profile.
    #[arg(long)]
    eps_profile: Option<String>,
    #[arg(long)]
    tend: Option<String>,
    /// alt-lr, alt-rl or central.
    #[arg(long)]
    flux: Option<String>,
    /// none or tvb.
    #[arg(long)]
    limiter: Option<String>,
    #[arg(long)]
    mtvb: Option<String>,
    /// conserved or characteristic.
    #[arg(long)]
    limit_vars: Option<String>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    /// x of the distribution probe, or "none".
    #[arg(long)]
    probe: Option<String>,
    /// periodic, dirichlet or extrapolate.
    #[arg(long)]
    boundary: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

impl Settings {
    fn resolve(&self) -> Result<(CaseSpec, Option<PathBuf>)> {
        let mut kv = match &self.config {
            Some(p) => load_config_file(p)?,
            None => Vec::new(),
        };
        let flags = [
            ("case", &self.case),
            ("scheme", &self.scheme),
            ("solver", &self.solver),
            ("q", &self.q),
            ("nx", &self.nx),
            ("nv", &self.nv),
            ("vc", &self.vc),
            ("eps", &self.eps),
            ("eps-profile", &self.eps_profile),
            ("tend", &self.tend),
            ("flux", &self.flux),
            ("limiter", &self.limiter),
            ("mtvb", &self.mtvb),
            ("limit-vars", &self.limit_vars),
            ("pair", &self.pair),
            ("cfl", &self.cfl),
            ("probe", &self.probe),
            ("boundary", &self.boundary),
            ("out", &self.out),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                kv.push((k.to_string(), v.clone()));
            }
        }
        build_case(&kv)
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| BgkError::invalid(format!("bad list entry '{v}'")))
        })
        .collect()
}

fn emit(table: &Table, out: Option<&Path>, stem: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{stem}.csv"));
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            write_table(&mut f, &table.header, table.rows.clone())?;
            f.flush()?;
            println!("{}", path.display());
        }
        None => {
            let stdout = std::io::stdout();
            write_table(&mut stdout.lock(), &table.header, table.rows.clone())?;
        }
    }
    Ok(())
}

fn run_study(kind: &str, values: Option<&str>, settings: &Settings) -> Result<()> {
    let kind: StudyKind = kind.parse()?;
    let (case, out) = settings.resolve()?;
    let (table, tag) = match kind {
        StudyKind::Convergence => {
            let nxs = parse_list(values.unwrap_or("10,20,40,80"))?;
            (study::convergence_table(&study::convergence(&case, &nxs)?), "convergence")
        }
        StudyKind::EpsSweep => {
            let eps = parse_list(values.unwrap_or("1e-2,1e-3,1e-4"))?;
            (study::eps_sweep_table(&study::eps_sweep(&case, &eps)?), "eps_sweep")
        }
        StudyKind::Conservation => {
            let default = format!("{},{}", case.v_cut, 2.0 * case.v_cut);
            let vcs = parse_list(values.unwrap_or(&default))?;
            (study::conservation_table(&study::conservation(&case, &vcs)?), "conservation_vc")
        }
        StudyKind::SchemeCompare => (study::scheme_compare_table(&study::scheme_compare(&case)?), "scheme_compare"),
    };
    emit(&table, out.as_deref(), &format!("{}_{tag}", case.name))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Cases => {
            for name in CASE_NAMES {
                let c = CaseSpec::by_name(name)?;
                println!(
                    "{name}: domain [{}, {}], nx {}, nv {}, vc {}, t_end {}",
                    c.domain.0, c.domain.1, c.nx, c.nv, c.v_cut, c.t_end
                );
            }
            Ok(())
        }
        Command::Run(settings) => {
            let (case, out) = settings.resolve()?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            let stem = case.name.clone();
            let result = run(case)?;
            let files = write_run(&dir, &stem, &result)?;
            println!("{}", files.profile.display());
            for p in [files.conservation, files.probe].into_iter().flatten() {
                println!("{}", p.display());
            }
            eprintln!("t = {}, steps = {}, {:.3} s", result.t, result.steps, result.wall_seconds);
            Ok(())
        }
        Command::Study { kind, values, settings } => run_study(&kind, values.as_deref(), &settings),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            println!("{line}");
            ExitCode::FAILURE
        }
    }
}
