//! CSV and JSON storage for paths, rough paths and solutions.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file back reproduces every binary64 value exactly.
//!
//! File layouts:
//! - `path.csv`: `t,x1,...,xd`, one row per grid point.
//! - `area.csv`: `i,j,a11,a12,...,add`, the row-major second-level block
//!   `X_{t_i t_j}`. Rows with `j = i + 1` define the rough path; the
//!   remaining rows are dyadic checkpoints used to detect Chen defects.
//! - `meta.json`: [`PathMeta`].
//! - `solution.csv`: `t,y1,...,ym`; `shells.json`: [`SolutionRecord`].
//! - two-index increments: a `# {json}` header line, then `s,t,v1,...,vd`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::{Inc1, Inc2Grid, TimeGrid};
use crate::roughpath::{FbmMethod, RoughPath};
use crate::solver::{Case, ShellTrace, SolutionPath};

pub const SCHEMA_VERSION: u32 = 1;

/// Sidecar describing a stored rough path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub schema_version: u32,
    pub gamma: f64,
    pub dim: usize,
    /// Number of coarse intervals.
    pub n: usize,
    pub horizon: f64,
    #[serde(default)]
    pub hurst: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub refine_factor: Option<usize>,
    #[serde(default)]
    pub method: Option<FbmMethod>,
}

impl PathMeta {
    pub fn for_path(rp: &RoughPath) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            gamma: rp.gamma(),
            dim: rp.dim(),
            n: rp.len() - 1,
            horizon: rp.grid().horizon(),
            hurst: None,
            seed: None,
            refine_factor: None,
            method: None,
        }
    }
}

/// A rough path read back from disk together with its checkpoints.
#[derive(Clone, Debug)]
pub struct StoredPath {
    pub rough_path: RoughPath,
    pub meta: PathMeta,
    /// Non-consecutive `(i, j, X_ij)` rows of `area.csv`.
    pub checkpoints: Vec<(usize, usize, Vec<f64>)>,
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse(format!("not an index: {s:?}")))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_writer(fs::File::create(path)?))
}

/// `t,x1,...,xd` rows (`y` instead of `x` when `prefix` says so).
pub fn write_inc1_csv(path: &Path, f: &Inc1, prefix: &str) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=f.dim()).map(|c| format!("{prefix}{c}")));
    w.write_record(&header)?;
    for i in 0..f.len() {
        let mut row = vec![f.grid().t(i).to_string()];
        row.extend(f.at(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_inc1_csv(path: &Path) -> Result<Inc1> {
    let mut r = csv::Reader::from_path(path)?;
    let dim = r.headers()?.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
        Error::Parse(format!("{}: expected a time column and at least one value column", path.display()))
    })?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::Parse(format!("{}: ragged row", path.display())));
        }
        times.push(parse_f64(&rec[0])?);
        for c in 1..=dim {
            values.push(parse_f64(&rec[c])?);
        }
    }
    Inc1::new(TimeGrid::new(times)?, dim, values)
}

/// Pairs stored as Chen checkpoints: `(0, n)` and every aligned dyadic block
/// of length at least 2.
fn checkpoint_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut len = 2;
    while len <= n {
        let mut i = 0;
        while i + len <= n {
            out.push((i, i + len));
            i += len;
        }
        len *= 2;
    }
    if !out.contains(&(0, n)) && n > 1 {
        out.push((0, n));
    }
    out
}

/// Writes `path.csv`, `area.csv` and `meta.json` into `dir` (created if missing).
pub fn write_rough_path(dir: &Path, rp: &RoughPath, meta: &PathMeta) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_inc1_csv(&dir.join("path.csv"), rp.x(), "x")?;
    let d = rp.dim();
    let mut w = writer(&dir.join("area.csv"))?;
    let mut header = vec!["i".to_string(), "j".to_string()];
    for a in 1..=d {
        for b in 1..=d {
            header.push(format!("a{a}{b}"));
        }
    }
    w.write_record(&header)?;
    let row = |i: usize, j: usize, block: &[f64]| {
        let mut r = vec![i.to_string(), j.to_string()];
        r.extend(block.iter().map(|v| v.to_string()));
        r
    };
    for i in 0..rp.len() - 1 {
        w.write_record(row(i, i + 1, rp.x2_block(i)))?;
    }
    for (i, j) in checkpoint_pairs(rp.len() - 1) {
        w.write_record(row(i, j, &rp.chen_extend(i, j)?))?;
    }
    w.flush()?;
    fs::write(dir.join("meta.json"), serde_json::to_string_pretty(meta)? + "\n")?;
    Ok(())
}

pub fn read_rough_path(dir: &Path) -> Result<StoredPath> {
    let meta: PathMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    if meta.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported meta.json schema_version {}",
            meta.schema_version
        )));
    }
    let x = read_inc1_csv(&dir.join("path.csv"))?;
    let d = x.dim();
    if d != meta.dim {
        return Err(Error::DimensionMismatch {
            expected: meta.dim,
            got: d,
        });
    }
    let n = x.len() - 1;
    let mut x2 = vec![f64::NAN; n * d * d];
    let mut checkpoints = Vec::new();
    let mut r = csv::Reader::from_path(dir.join("area.csv"))?;
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 2 + d * d {
            return Err(Error::Parse("area.csv: wrong number of columns".into()));
        }
        let i = parse_usize(&rec[0])?;
        let j = parse_usize(&rec[1])?;
        if !(i < j && j <= n) {
            return Err(Error::Parse(format!("area.csv: bad pair ({i}, {j})")));
        }
        let block = (2..2 + d * d).map(|c| parse_f64(&rec[c])).collect::<Result<Vec<_>>>()?;
        if j == i + 1 {
            x2[i * d * d..(i + 1) * d * d].copy_from_slice(&block);
        } else {
            checkpoints.push((i, j, block));
        }
    }
    if x2.iter().any(|v| v.is_nan()) {
        return Err(Error::Parse("area.csv: missing consecutive blocks".into()));
    }
    Ok(StoredPath {
        rough_path: RoughPath::new(x, x2, meta.gamma)?,
        meta,
        checkpoints,
    })
}

/// Case label and shell ladder stored next to `solution.csv`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub schema_version: u32,
    pub case: Case,
    pub zero_time: Option<f64>,
    pub c0_effective: Option<f64>,
    pub unresolved_jumps: usize,
    pub shells: ShellTrace,
}

impl SolutionRecord {
    pub fn new(sp: &SolutionPath) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            case: sp.case,
            zero_time: sp.zero_time(),
            c0_effective: sp.c0_effective.is_finite().then_some(sp.c0_effective),
            unresolved_jumps: sp.unresolved_jumps,
            shells: sp.shells.clone(),
        }
    }
}

/// Writes `{stem}.csv` and `{shells_stem}.json` into `dir`.
pub fn write_solution(dir: &Path, sp: &SolutionPath, stem: &str, shells_stem: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_inc1_csv(&dir.join(format!("{stem}.csv")), &sp.y, "y")?;
    let record = SolutionRecord::new(sp);
    fs::write(
        dir.join(format!("{shells_stem}.json")),
        serde_json::to_string_pretty(&record)? + "\n",
    )?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct Inc2Header {
    kind: String,
    dim: usize,
    grid: Vec<f64>,
}

/// Long format: a `# {json}` header with the grid, then `s,t,v1,...,vd` per pair.
pub fn write_inc2_csv(path: &Path, h: &Inc2Grid) -> Result<()> {
    let mut file = fs::File::create(path)?;
    let header = Inc2Header {
        kind: "inc2".into(),
        dim: h.dim(),
        grid: h.grid().points().to_vec(),
    };
    writeln!(file, "# {}", serde_json::to_string(&header)?)?;
    let mut w = csv::Writer::from_writer(file);
    let mut cols = vec!["s".to_string(), "t".to_string()];
    cols.extend((1..=h.dim()).map(|c| format!("v{c}")));
    w.write_record(&cols)?;
    let g = h.grid();
    for (i, j, v) in h.iter() {
        let mut row = vec![g.t(i).to_string(), g.t(j).to_string()];
        row.extend(v.iter().map(|x| x.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_inc2_csv(path: &Path) -> Result<Inc2Grid> {
    let mut reader = BufReader::new(fs::File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let json = first
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing '# {json}' header".into()))?;
    let header: Inc2Header = serde_json::from_str(json.trim())?;
    let grid = TimeGrid::new(header.grid)?;
    let mut out = Inc2Grid::zeros(grid.clone(), header.dim);
    let mut r = csv::Reader::from_reader(reader);
    let mut seen = 0usize;
    for rec in r.records() {
        let rec = rec?;
        let s = parse_f64(&rec[0])?;
        let t = parse_f64(&rec[1])?;
        let (i, j) = match (grid.index_of(s), grid.index_of(t)) {
            (Some(i), Some(j)) if i < j => (i, j),
            _ => return Err(Error::Parse(format!("pair ({s}, {t}) is not on the grid"))),
        };
        let slot = out.get_mut(i, j);
        for (c, v) in slot.iter_mut().enumerate() {
            *v = parse_f64(&rec[2 + c])?;
        }
        seen += 1;
    }
    let n = grid.len();
    if seen != n * (n - 1) / 2 {
        return Err(Error::Parse(format!("expected {} pairs, found {seen}", n * (n - 1) / 2)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoints_cover_dyadic_blocks() {
        let p = checkpoint_pairs(8);
        assert!(p.contains(&(0, 8)) && p.contains(&(4, 6)) && p.contains(&(0, 4)));
        assert_eq!(p.len(), 4 + 2 + 1);
        assert!(checkpoint_pairs(6).contains(&(0, 6)));
    }

    #[test]
    fn inc2_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let grid = TimeGrid::new(vec![0.0, 0.1, 0.35, 1.0 / 3.0 + 0.5]).unwrap();
        let h = Inc2Grid::from_fn(grid, 2, |i, j, out| {
            out[0] = (i as f64 + 0.1).sin() / 7.0;
            out[1] = (j as f64).exp() * 1e-17;
        });
        let path = dir.path().join("h.csv");
        write_inc2_csv(&path, &h).unwrap();
        assert_eq!(read_inc2_csv(&path).unwrap(), h);
    }
}
