//! Text formats: configurations, height tables, sampled grid functions and
//! SVG snapshots.

use std::fmt::Write as _;
use std::path::Path;

use akpz_core::pde::{Axis, GridFunction1D, GridFunction2D};
use akpz_core::{HeightField, ParticleConfig, ParticleLine, StarVertex};

use crate::error::CliError;

/// Reals with 17 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

const CONFIG_MAGIC: &str = "akpz-config 1";

/// One header line, the origin, then one line per particle line:
/// `line <index> base <label> lo <z2> hi <z2> pos <z2>...` with doubled
/// coordinates.
pub fn config_to_text(cfg: &ParticleConfig) -> String {
    let mut s = format!("{CONFIG_MAGIC}\norigin {}\n", cfg.origin);
    for (i, ln) in cfg.lines.iter().enumerate() {
        let _ = write!(s, "line {} base {} lo {} hi {} pos", cfg.first_line + i as i64, ln.base, ln.lo, ln.hi);
        for z in &ln.pos {
            let _ = write!(s, " {z}");
        }
        s.push('\n');
    }
    s
}

pub fn config_from_text(path: &str, text: &str) -> Result<ParticleConfig, CliError> {
    let err = |line: usize, m: &str| CliError::Parse {
        path: path.to_string(),
        message: format!("line {line}: {m}"),
    };
    let mut rows = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match rows.next() {
        Some((_, l)) if l.trim() == CONFIG_MAGIC => {}
        Some((i, _)) => return Err(err(i + 1, "expected the header `akpz-config 1`")),
        None => return Err(err(1, "empty document")),
    }
    let origin = match rows.next() {
        Some((i, l)) => {
            let mut t = l.split_whitespace();
            match (t.next(), t.next().and_then(|v| v.parse::<i64>().ok()), t.next()) {
                (Some("origin"), Some(o), None) => o,
                _ => return Err(err(i + 1, "expected `origin <integer>`")),
            }
        }
        None => return Err(err(2, "missing `origin`")),
    };
    let mut first = None;
    let mut lines = Vec::new();
    for (i, l) in rows {
        let t: Vec<&str> = l.split_whitespace().collect();
        let n = |k: usize| t.get(k).and_then(|v| v.parse::<i64>().ok());
        let shape = t.len() >= 9 && t[0] == "line" && t[2] == "base" && t[4] == "lo" && t[6] == "hi" && t[8] == "pos";
        let (Some(index), Some(base), Some(lo), Some(hi), true) = (n(1), n(3), n(5), n(7), shape) else {
            return Err(err(i + 1, "expected `line <l> base <p> lo <z> hi <z> pos <z>...`"));
        };
        let expected = first.map(|f: i64| f + lines.len() as i64);
        if expected.is_some_and(|e| e != index) {
            return Err(err(i + 1, "line indices must be consecutive"));
        }
        first.get_or_insert(index);
        let pos = t[9..]
            .iter()
            .map(|v| v.parse::<i64>().map_err(|_| err(i + 1, "positions must be integers")))
            .collect::<Result<Vec<_>, _>>()?;
        lines.push(ParticleLine { base, lo, hi, pos });
    }
    let first = first.ok_or_else(|| err(3, "no lines"))?;
    ParticleConfig::new(first, lines, origin).map_err(|e| CliError::Invalid(format!("{path}: {e}")))
}

pub fn read_config(path: &Path) -> Result<ParticleConfig, CliError> {
    config_from_text(&path.display().to_string(), &read_file(path)?)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(header).expect("in-memory write");
    }
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Generic CSV table with a header row.
pub fn table_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    csv_bytes(header, rows)
}

/// `x1,x2,h` for every stored vertex.
pub fn heights_csv(h: &HeightField) -> Vec<u8> {
    csv_bytes(
        &["x1", "x2", "h"],
        h.vertices().map(|(v, z)| vec![v.x1.to_string(), v.x2.to_string(), z.to_string()]),
    )
}

/// Two header lines, `domain,<x lo>,<x hi>,<y lo>,<y hi>` and
/// `resolution,<nx>,<ny>`, then `x1,x2,value` rows with `x1` fastest.
pub fn grid2_csv(g: &GridFunction2D) -> Vec<u8> {
    let mut out = Vec::new();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut out);
    w.write_record(["domain".to_string(), fmt_real(g.x.lo), fmt_real(g.x.hi()), fmt_real(g.y.lo), fmt_real(g.y.hi())])
        .expect("in-memory write");
    w.write_record(["resolution".to_string(), g.x.n.to_string(), g.y.n.to_string()]).expect("in-memory write");
    for j in 0..g.y.n {
        for i in 0..g.x.n {
            let p = g.node(i, j);
            w.write_record([fmt_real(p[0]), fmt_real(p[1]), fmt_real(g.get(i, j))]).expect("in-memory write");
        }
    }
    drop(w);
    out
}

/// One-dimensional variant: `domain,<lo>,<hi>`, `resolution,<n>`, `x,value`.
pub fn grid1_csv(g: &GridFunction1D) -> Vec<u8> {
    let mut out = Vec::new();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut out);
    w.write_record(["domain".to_string(), fmt_real(g.axis.lo), fmt_real(g.axis.hi())]).expect("in-memory write");
    w.write_record(["resolution".to_string(), g.axis.n.to_string()]).expect("in-memory write");
    for (k, v) in g.values.iter().enumerate() {
        w.write_record([fmt_real(g.axis.node(k)), fmt_real(*v)]).expect("in-memory write");
    }
    drop(w);
    out
}

pub fn grid2_from_csv(path: &str, text: &str) -> Result<GridFunction2D, CliError> {
    let err = |line: usize, m: &str| CliError::Parse {
        path: path.to_string(),
        message: format!("line {line}: {m}"),
    };
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(text.as_bytes());
    let recs = r
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| err(e.position().map_or(0, |p| p.line() as usize), "malformed CSV"))?;
    if recs.len() < 2 {
        return Err(err(recs.len() + 1, "missing header"));
    }
    let reals = |k: usize, rec: &csv::StringRecord, from: usize| -> Result<Vec<f64>, CliError> {
        rec.iter().skip(from).map(|s| parse_real(s).ok_or_else(|| err(k + 1, "expected a number"))).collect()
    };
    let dom = reals(0, &recs[0], 1)?;
    if recs[0].get(0) != Some("domain") || dom.len() != 4 {
        return Err(err(1, "expected `domain,<x lo>,<x hi>,<y lo>,<y hi>`"));
    }
    let res: Vec<usize> = recs[1].iter().skip(1).filter_map(|s| s.trim().parse().ok()).collect();
    if recs[1].get(0) != Some("resolution") || res.len() != 2 {
        return Err(err(2, "expected `resolution,<nx>,<ny>`"));
    }
    let x = Axis::spanning(dom[0], dom[1], res[0]).map_err(|e| err(1, &e.to_string()))?;
    let y = Axis::spanning(dom[2], dom[3], res[1]).map_err(|e| err(1, &e.to_string()))?;
    if recs.len() - 2 != x.n * y.n {
        return Err(err(recs.len(), "row count does not match the resolution"));
    }
    let values = recs[2..]
        .iter()
        .enumerate()
        .map(|(k, rec)| {
            let v = reals(k + 2, rec, 0)?;
            if v.len() != 3 {
                return Err(err(k + 3, "expected `x1,x2,value`"));
            }
            Ok(v[2])
        })
        .collect::<Result<Vec<_>, _>>()?;
    GridFunction2D::new(x, y, values).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Lozenge picture of `h`: each unit triangle is filled with the colour of
/// the tile type read off its height increments, so paired triangles merge
/// into lozenges.
pub fn snapshot_svg(h: &HeightField) -> String {
    const COLORS: [&str; 3] = ["#d95f02", "#1b9e77", "#7570b3"];
    let s3 = 3f64.sqrt() / 2.0;
    let plane = |v: StarVertex| (v.x1 as f64 - 0.5 * v.x2 as f64, -s3 * v.x2 as f64);
    let mut polys = String::new();
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (v, hv) in h.vertices() {
        let (Some(a), Some(c)) = (h.get(v.offset(1, 0)), h.get(v.offset(1, 1))) else { continue };
        let up = if a - hv == 1 {
            0
        } else if c - a == 1 {
            1
        } else {
            2
        };
        let mut tris = vec![([v, v.offset(1, 0), v.offset(1, 1)], up)];
        if let Some(b) = h.get(v.offset(0, 1)) {
            let down = if b - hv == 1 {
                1
            } else if c - b == 1 {
                0
            } else {
                2
            };
            tris.push(([v, v.offset(0, 1), v.offset(1, 1)], down));
        }
        for (tri, kind) in tris {
            let pts: Vec<(f64, f64)> = tri.iter().map(|&w| plane(w)).collect();
            for &(x, y) in &pts {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
            let _ = writeln!(
                polys,
                r#"<polygon points="{:.4},{:.4} {:.4},{:.4} {:.4},{:.4}" fill="{c}" stroke="{c}" stroke-width="0.02"/>"#,
                pts[0].0,
                pts[0].1,
                pts[1].0,
                pts[1].1,
                pts[2].0,
                pts[2].1,
                c = COLORS[kind]
            );
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.4} {:.4} {:.4} {:.4}\" width=\"{:.0}\" height=\"{:.0}\">\n{polys}</svg>\n",
        xmin,
        ymin,
        xmax - xmin,
        ymax - ymin,
        12.0 * (xmax - xmin),
        12.0 * (ymax - ymin)
    )
}
