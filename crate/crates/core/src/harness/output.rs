//! Plain CSV emission: one header row, 17 significant digits per value.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{BgkError, Result};
use crate::harness::run::{Profile, RunOutput};

pub const PROFILE_HEADER: [&str; 6] = ["x", "rho", "u", "T", "p", "Qeps"];
pub const CONSERVATION_HEADER: [&str; 4] = ["t", "c0", "c1", "c2"];
pub const PROBE_HEADER: [&str; 3] = ["v", "f", "g"];

#[inline]
fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a numeric table with `header`.
pub fn write_table<W: Write>(out: &mut W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(BgkError::invalid("row width does not match header"));
        }
        let line: Vec<String> = row.into_iter().map(fmt_num).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn write_file(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_table(&mut w, header, rows)?;
    w.flush()?;
    Ok(())
}

/// Reads back a table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header: Vec<String> = match lines.next() {
        Some(h) => h?.split(',').map(str::to_string).collect(),
        None => return Err(BgkError::Config(format!("{} is empty", path.display()))),
    };
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    BgkError::Config(format!("{}:{}: bad number '{s}'", path.display(), n + 2))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(BgkError::Config(format!("{}:{}: wrong column count", path.display(), n + 2)));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn write_profile(path: &Path, p: &Profile) -> Result<()> {
    let rows = (0..p.len()).map(|n| vec![p.x[n], p.rho[n], p.u[n], p.t[n], p.p[n], p.q_eps[n]]);
    write_file(path, &PROFILE_HEADER, rows)
}

pub fn read_profile(path: &Path) -> Result<Profile> {
    let (header, rows) = read_table(path)?;
    if header != PROFILE_HEADER {
        return Err(BgkError::Config(format!("{} is not a profile file", path.display())));
    }
    let col = |c: usize| rows.iter().map(|r| r[c]).collect();
    Ok(Profile {
        x: col(0),
        rho: col(1),
        u: col(2),
        t: col(3),
        p: col(4),
        q_eps: col(5),
    })
}

/// Files written by [`write_run`].
#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub profile: PathBuf,
    pub conservation: Option<PathBuf>,
    pub probe: Option<PathBuf>,
}

/// Writes `<stem>_profile.csv`, `<stem>_conservation.csv` and `<stem>_probe.csv` into `dir`.
pub fn write_run(dir: &Path, stem: &str, run: &RunOutput) -> Result<WrittenFiles> {
    std::fs::create_dir_all(dir)?;
    let profile = dir.join(format!("{stem}_profile.csv"));
    write_profile(&profile, &run.profile)?;
    let conservation = if run.conservation.is_empty() {
        None
    } else {
        let path = dir.join(format!("{stem}_conservation.csv"));
        write_file(&path, &CONSERVATION_HEADER, run.conservation.iter().map(|r| r.to_vec()))?;
        Some(path)
    };
    let probe = match &run.probe {
        Some(pr) => {
            let path = dir.join(format!("{stem}_probe.csv"));
            let rows = (0..pr.v.len()).map(|j| vec![pr.v[j], pr.f[j], pr.g[j]]);
            write_file(&path, &PROBE_HEADER, rows)?;
            Some(path)
        }
        None => None,
    };
    Ok(WrittenFiles {
        profile,
        conservation,
        probe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = Profile {
            x: vec![0.1, -1.0 / 3.0, 1e-300],
            rho: vec![1.0, std::f64::consts::PI, 2.0f64.sqrt()],
            u: vec![0.0, -0.0, 1e10 / 7.0],
            t: vec![0.3, 0.7, 1.1],
            p: vec![1.0 / 9.0, 5.0, 6.0],
            q_eps: vec![-1e-17, 0.0, 123.456],
        };
        write_profile(&path, &p).unwrap();
        let back = read_profile(&path).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn bad_rows_rejected() {
        let mut buf = Vec::new();
        assert!(write_table(&mut buf, &["a", "b"], vec![vec![1.0]]).is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "x,rho,u,T,p,Qeps\n1,2,3\n").unwrap();
        assert!(read_profile(&path).is_err());
    }
}
