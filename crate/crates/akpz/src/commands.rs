//! The subcommands: each reads its keys from a [`Doc`], writes its files
//! into the output directory and returns their names with a short report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use akpz_core::gibbs::{default_sweeps, density_stats, drift_run, fluctuation_stats, sample_gibbs, summarize_drift, DriftSetup};
use akpz_core::harness::{self, ConvergenceRow, Experiment, Mode, Summary};
use akpz_core::height::height_from_profile;
use akpz_core::pde::characteristics::{characteristics_checked, NewtonSettings};
use akpz_core::pde::hopf::{hopf_solve, SlopeTable};
use akpz_core::pde::jumps::{default_threshold, detect_gradient_jumps};
use akpz_core::pde::legendre::{convex_envelope_2d, slope_axes_2d, LfMode};
use akpz_core::pde::riemann::{riemann_solve, RiemannOptions, RiemannSpec};
use akpz_core::pde::GridFunction2D;
use akpz_core::sim::{generate_events, simulate, SimOptions};
use akpz_core::{config_from_profile, height_from_config, Half, LocalizationBox, ParticleConfig, StarVertex, Window};
use rayon::prelude::*;
use toml::Value;

use crate::config::{profile_table, Doc};
use crate::error::CliError;
use crate::io::{
    config_to_text, fmt_real, grid1_csv, grid2_csv, grid2_from_csv, heights_csv, read_config, read_file, snapshot_svg,
    table_csv, write_file,
};
use crate::manifest::{RunManifest, VERSION};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Gibbs,
    Pde,
    Hydro,
    Snapshot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Gibbs => "gibbs",
            Command::Pde => "pde",
            Command::Hydro => "hydro",
            Command::Snapshot => "snapshot",
        }
    }

    /// Key overridden by `--seed`, if the command is random.
    pub fn seed_key(self) -> Option<&'static str> {
        match self {
            Command::Simulate => Some("run.seed"),
            Command::Gibbs => Some("gibbs.seed"),
            Command::Hydro => Some("hydro.base_seed"),
            Command::Pde | Command::Snapshot => None,
        }
    }

    fn path_keys(self) -> &'static [&'static str] {
        match self {
            Command::Simulate => &["lattice.initial"],
            Command::Pde => &["envelope.input"],
            Command::Hydro => &["hydro.table"],
            Command::Snapshot => &["snapshot.input"],
            Command::Gibbs => &[],
        }
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simulate" => Ok(Command::Simulate),
            "gibbs" => Ok(Command::Gibbs),
            "pde" => Ok(Command::Pde),
            "hydro" => Ok(Command::Hydro),
            "snapshot" => Ok(Command::Snapshot),
            other => Err(CliError::Invalid(format!("unknown subcommand `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub files: Vec<String>,
    pub report: String,
    /// Verdict, for commands that have one.
    pub pass: Option<bool>,
}

struct Out<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Out<'_> {
    fn put(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        write_file(&self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Make relative file keys absolute against `base`, so manifests stay
/// valid wherever they are replayed from.
fn resolve_paths(doc: &mut Doc, keys: &[&str], base: &Path) -> Result<(), CliError> {
    for key in keys {
        if doc.has(key) {
            let p = PathBuf::from(doc.str(key)?);
            let abs = if p.is_absolute() { p } else { base.join(p) };
            doc.set(key, Value::String(abs.display().to_string()));
        }
    }
    Ok(())
}

/// Run `cmd` with `doc`, writing results and a manifest into `out`.
pub fn execute(cmd: Command, mut doc: Doc, seed: Option<u64>, out: &Path) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    if let (Some(s), Some(key)) = (seed, cmd.seed_key()) {
        doc.set(key, Value::Integer(s as i64));
    }
    let base = Path::new(&doc.path).parent().map(Path::to_path_buf).unwrap_or_default();
    resolve_paths(&mut doc, cmd.path_keys(), &base)?;
    let mut o = Out { dir: out, files: Vec::new() };
    let (report, pass) = match cmd {
        Command::Simulate => (cmd_simulate(&mut doc, &mut o)?, None),
        Command::Gibbs => (cmd_gibbs(&mut doc, &mut o)?, None),
        Command::Pde => (cmd_pde(&mut doc, &mut o)?, None),
        Command::Hydro => {
            let (r, p) = cmd_hydro(&mut doc, &mut o)?;
            (r, Some(p))
        }
        Command::Snapshot => (cmd_snapshot(&mut doc, &mut o)?, None),
    };
    let seed = match cmd.seed_key() {
        Some(k) if doc.has(k) => Some(doc.u64(k)?),
        _ => None,
    };
    let manifest = RunManifest {
        subcommand: cmd.name().into(),
        version: VERSION.into(),
        seed,
        outputs: o.files.clone(),
        config: doc,
    };
    manifest.write(out)?;
    let mut files = o.files;
    files.push(crate::manifest::MANIFEST_FILE.into());
    Ok(Outcome { files, report, pass })
}

/// Re-run the manifest at `path` into `out`.
pub fn rerun(path: &Path, out: &Path) -> Result<Outcome, CliError> {
    let m = RunManifest::from_doc(Doc::read(path)?)?;
    let cmd: Command = m.subcommand.parse()?;
    execute(cmd, m.config, None, out)
}

fn window_from(doc: &Doc) -> Result<Window, CliError> {
    let [l0, l1] = doc.int_pair("lattice.lines")?;
    let [z0, z1] = doc.pair("lattice.z")?;
    Ok(Window::new(l0, l1, Half::floor_f64(z0), Half::ceil_f64(z1))?)
}

/// Initial configuration: a stored file (`lattice.initial`) or a profile
/// discretised at `lattice.scale` on the window `lattice.lines` x `lattice.z`.
fn initial_config(doc: &Doc) -> Result<ParticleConfig, CliError> {
    if doc.has("lattice.initial") {
        return read_config(Path::new(doc.str("lattice.initial")?));
    }
    let p = doc.profile("profile")?;
    let scale = doc.u64_or("lattice.scale", 1)?;
    let scale = u32::try_from(scale).map_err(|_| CliError::Invalid("lattice.scale too large".into()))?;
    Ok(config_from_profile(&p, scale, &window_from(doc)?)?)
}

/// Clock box from `clocks.lines` and `clocks.z`, or every site that has
/// room on all stored lines.
fn clock_box(doc: &Doc, cfg: &ParticleConfig) -> Result<LocalizationBox, CliError> {
    if doc.has("clocks.lines") || doc.has("clocks.z") {
        let [l0, l1] = doc.int_pair("clocks.lines")?;
        let [z0, z1] = doc.pair("clocks.z")?;
        return Ok(LocalizationBox::new(l0, l1, Half::ceil_f64(z0), Half::floor_f64(z1))?);
    }
    let lo = cfg.lines.iter().map(|l| l.lo).max().unwrap_or(0);
    let hi = cfg.lines.iter().map(|l| l.hi).min().unwrap_or(0);
    Ok(LocalizationBox::new(cfg.first_line, cfg.last_line(), Half(lo + 1), Half(hi - 1))?)
}

fn nonneg_time(doc: &Doc, key: &str, default: Option<f64>) -> Result<f64, CliError> {
    let t = match default {
        Some(d) => doc.f64_or(key, d)?,
        None => doc.f64(key)?,
    };
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::BadValue {
            path: doc.path.clone(),
            key: key.into(),
            message: "must be finite and nonnegative".into(),
        });
    }
    Ok(t)
}

fn cmd_simulate(doc: &mut Doc, o: &mut Out) -> Result<String, CliError> {
    let cfg = initial_config(doc)?;
    let t = nonneg_time(doc, "run.t", None)?;
    let seed = doc.u64("run.seed")?;
    let region = clock_box(doc, &cfg)?;
    let probes: Vec<StarVertex> = if doc.has("run.probes") {
        doc.pairs("run.probes")?
            .iter()
            .map(|p| StarVertex::new(p[0].round() as i64, p[1].round() as i64))
            .collect()
    } else {
        region.vertices().into_iter().filter(|&v| cfg.height_at(v).is_some()).collect()
    };
    let k = doc.u64_or("run.samples", 0)?;
    let sample_times: Vec<f64> = (1..=k).map(|i| t * i as f64 / (k + 1) as f64).collect();
    let opts = SimOptions {
        probes,
        sample_times,
        ..Default::default()
    };
    let tr = if t > 0.0 {
        let stream = generate_events(seed, region, t).map_err(|e| CliError::Invalid(e.to_string()))?;
        simulate(&cfg, stream.iter(), &opts)?
    } else {
        simulate(&cfg, std::iter::empty(), &opts)?
    };
    let mut rows = Vec::new();
    let mut emit = |time: f64, hs: &[i64]| {
        for (v, h) in tr.probes.iter().zip(hs) {
            rows.push(vec![fmt_real(time), v.x1.to_string(), v.x2.to_string(), h.to_string()]);
        }
    };
    emit(0.0, &tr.initial_heights);
    for s in &tr.samples {
        emit(s.time, &s.heights);
    }
    emit(t, &tr.final_heights());
    o.put("initial.cfg", config_to_text(&cfg))?;
    o.put("final.cfg", config_to_text(&tr.final_cfg))?;
    o.put("trajectory.csv", table_csv(&["time", "x1", "x2", "height"], rows))?;
    o.put("final_heights.csv", heights_csv(&height_from_config(&tr.final_cfg, None)?))?;
    Ok(format!(
        "simulate: T = {t}, {} rings, {} jumps, {} probes",
        tr.events_applied,
        tr.jumps,
        tr.probes.len()
    ))
}

fn cmd_gibbs(doc: &mut Doc, o: &mut Out) -> Result<String, CliError> {
    let slope = doc.slope("gibbs.rho", 0.0)?;
    let n = doc.u64("gibbs.n")? as usize;
    let sweeps = doc.u64_or("gibbs.sweeps", default_sweeps(n))?;
    let seed = doc.u64("gibbs.seed")?;
    let tiling = sample_gibbs(slope, n, sweeps, seed)?;
    let half = doc.u64_or("gibbs.window", n as u64)? as i64;
    let window = Window::new(-half, half, Half(-2 * half), Half(2 * half))?;
    let cfg = tiling.to_config(&window)?;
    let r = doc.u64_or("gibbs.r", 60.min(2 * half as u64 - 1))? as i64;
    let lwin = doc.u64_or("gibbs.lwin", 64)? as i64;
    let count = density_stats(&cfg, 0, r);
    let dev = fluctuation_stats(&tiling, slope, lwin);
    o.put("sample.cfg", config_to_text(&cfg))?;
    o.put(
        "equilibrium.csv",
        table_csv(
            &["rho1", "rho2", "N", "sweeps", "seed", "line", "r", "count", "density", "lwin", "deviation"],
            [vec![
                fmt_real(slope.rho1),
                fmt_real(slope.rho2),
                n.to_string(),
                sweeps.to_string(),
                seed.to_string(),
                "0".into(),
                r.to_string(),
                count.to_string(),
                fmt_real(count as f64 / r as f64),
                lwin.to_string(),
                fmt_real(dev),
            ]],
        ),
    )?;
    let mut report = format!("gibbs: N = {n}, sweeps = {sweeps}, N_r/r = {:.4}, deviation = {dev}", count as f64 / r as f64);
    if doc.has("drift.t") {
        let setup = DriftSetup {
            slope,
            n,
            horizon: nonneg_time(doc, "drift.t", None)?,
            kappa: doc.f64_or("drift.kappa", harness::DEFAULT_KAPPA)?,
            sweeps,
        };
        let count = doc.u64_or("drift.seeds", 1)?;
        let seeds: Vec<u64> = (0..count).map(|i| seed.wrapping_add(i)).collect();
        let per = seeds.par_iter().map(|&s| drift_run(&setup, s)).collect::<Result<Vec<_>, _>>()?;
        let est = summarize_drift(per)?;
        let fixed = |seed: String, est: f64, se: String| {
            vec![
                fmt_real(slope.rho1),
                fmt_real(slope.rho2),
                n.to_string(),
                fmt_real(setup.horizon),
                seed,
                fmt_real(est),
                se,
            ]
        };
        let mut rows: Vec<Vec<String>> = seeds.iter().zip(&est.per_seed).map(|(s, v)| fixed(s.to_string(), *v, String::new())).collect();
        rows.push(fixed("all".into(), est.mean, fmt_real(est.stderr)));
        o.put("drift.csv", table_csv(&["rho1", "rho2", "N", "T", "seed", "estimate", "stderr"], rows))?;
        let _ = write!(report, "; drift {:.5} +- {:.5}", est.mean, est.stderr);
    }
    Ok(report)
}

fn cmd_pde(doc: &mut Doc, o: &mut Out) -> Result<String, CliError> {
    let mode = doc.str("pde.mode")?.to_string();
    let t = nonneg_time(doc, "pde.t", Some(0.0))?;
    match mode.as_str() {
        "characteristics" => {
            let p = doc.profile("profile")?;
            let (x, y) = (doc.axis("pde.x")?, doc.axis("pde.y")?);
            let settings = NewtonSettings {
                tol: doc.f64_or("pde.newton_tol", NewtonSettings::default().tol)?,
                max_iter: doc.u64_or("pde.newton_iter", NewtonSettings::default().max_iter as u64)? as u32,
            };
            let g = characteristics_checked(&p, t, (x, y), (x, y), settings)?;
            o.put("phi.csv", grid2_csv(&g))?;
            Ok(format!("characteristics: t = {t}, {} x {} nodes", x.n, y.n))
        }
        "hopf" => {
            let p = doc.profile("profile")?;
            let (x, y) = (doc.axis("pde.x")?, doc.axis("pde.y")?);
            let table = SlopeTable::from_profile(&p, doc.u64_or("pde.slopes", 201)? as usize)?;
            let g = hopf_solve(&table, t, x, y);
            let jumps = detect_gradient_jumps(&g, default_threshold(&g));
            o.put("phi.csv", grid2_csv(&g))?;
            o.put(
                "jumps.csv",
                table_csv(
                    &["x1", "x2", "axis", "size"],
                    jumps.iter().map(|j| vec![fmt_real(j.x[0]), fmt_real(j.x[1]), j.axis.to_string(), fmt_real(j.size)]),
                ),
            )?;
            Ok(format!("hopf: t = {t}, {} gradient jumps", jumps.len()))
        }
        "riemann" => {
            let spec = if doc.has("riemann.minus") {
                RiemannSpec::from_kink(doc.pair("riemann.minus")?, doc.pair("riemann.plus")?)?
            } else {
                RiemannSpec::new(
                    doc.f64("riemann.c")?,
                    doc.pair("riemann.beta")?,
                    doc.pair("riemann.n")?,
                    doc.f64("riemann.u_minus")?,
                    doc.f64("riemann.u_plus")?,
                )?
            };
            let opts = RiemannOptions {
                s_nodes: doc.u64_or("riemann.s_nodes", RiemannOptions::default().s_nodes as u64)? as usize,
                ..Default::default()
            };
            let sol = riemann_solve(&spec, t, doc.axis("riemann.y")?, opts)?;
            o.put("psi.csv", grid1_csv(&sol.psi))?;
            o.put("u.csv", grid1_csv(&sol.u))?;
            let mut text = format!("kind {}\n", sol.classification.kind.name());
            for f in &sol.classification.flats {
                let _ = writeln!(text, "shock {} {} {}", fmt_real(f.s_lo), fmt_real(f.s_hi), fmt_real(f.speed));
            }
            o.put("classification.txt", &text)?;
            Ok(format!("riemann: {}", sol.classification.kind.name()))
        }
        "envelope" => {
            let f = if doc.has("envelope.input") {
                let path = doc.str("envelope.input")?.to_string();
                grid2_from_csv(&path, &read_file(Path::new(&path))?)?
            } else {
                let p = doc.profile("profile")?;
                GridFunction2D::from_fn(doc.axis("pde.x")?, doc.axis("pde.y")?, |x| p.eval(x))
            };
            let mode = match doc.str_or("envelope.mode", "separable")? {
                "separable" => LfMode::Separable,
                "direct" => LfMode::Direct,
                other => return Err(CliError::Invalid(format!("envelope.mode `{other}` is not separable|direct"))),
            };
            let (nx, ny) = if doc.has("envelope.dual") {
                let [a, b] = doc.int_pair("envelope.dual")?;
                (a.max(2) as usize, b.max(2) as usize)
            } else {
                (f.x.n, f.y.n)
            };
            let (dx, dy) = slope_axes_2d(&f, nx, ny)?;
            let env = convex_envelope_2d(&f, dx, dy, mode)?;
            o.put("envelope.csv", grid2_csv(&env))?;
            Ok(format!("envelope: {} x {} nodes, gap {}", f.x.n, f.y.n, f.max_abs_diff(&env)))
        }
        other => Err(CliError::BadValue {
            path: doc.path.clone(),
            key: "pde.mode".into(),
            message: format!("`{other}` is not characteristics|hopf|riemann|envelope"),
        }),
    }
}

/// The default experiment for `mode`, with any keys of `[hydro]` and
/// `[profile]` applied on top.
pub fn experiment_from(doc: &Doc) -> Result<(Experiment, f64), CliError> {
    let (mut exp, threshold) = match doc.str("hydro.mode")? {
        "smooth" => (Experiment::default_smooth(), 0.05),
        "shock" => (Experiment::default_shock(), 0.07),
        other => return Err(CliError::Invalid(format!("hydro.mode `{other}` is not smooth|shock"))),
    };
    if doc.has("profile.kind") {
        exp.profile = doc.profile("profile")?;
        if exp.mode == Mode::Smooth && !doc.has("hydro.t") {
            exp.t = 0.5 * harness::crossing_time(&exp.profile).unwrap_or(1.0);
        }
    }
    if doc.has("hydro.t") {
        exp.t = nonneg_time(doc, "hydro.t", None)?;
    }
    if doc.has("hydro.scales") {
        exp.scales = doc.u32s("hydro.scales")?;
    }
    if doc.has("hydro.probes") {
        exp.probes = doc.pairs("hydro.probes")?;
    }
    exp.seeds_per_scale = doc.u64_or("hydro.seeds", exp.seeds_per_scale as u64)? as u32;
    exp.base_seed = doc.u64_or("hydro.base_seed", exp.base_seed)?;
    exp.kappa = doc.f64_or("hydro.kappa", exp.kappa)?;
    exp.sandwich_seeds = doc.u64_or("hydro.sandwich_seeds", exp.sandwich_seeds as u64)? as u32;
    exp.site_budget = doc.u64_or("hydro.site_budget", exp.site_budget)?;
    let threshold = doc.f64_or("hydro.threshold", threshold)?;
    Ok((exp, threshold))
}

/// All `(L, seed)` tasks of `exp`, fanned out over the rayon pool; rows come
/// back in task order.
pub fn run_experiment_parallel(exp: &Experiment) -> Result<Vec<ConvergenceRow>, CliError> {
    exp.validate()?;
    let r = harness::reference(exp)?;
    let parts = exp
        .tasks()
        .into_par_iter()
        .map(|(l, k)| harness::run_task(exp, &r, l, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts.into_iter().flatten().collect())
}

const ROW_HEADER: [&str; 8] = ["scale", "seed", "x1", "x2", "simulated", "reference", "error", "bracketed"];

pub fn rows_csv(rows: &[ConvergenceRow]) -> Vec<u8> {
    table_csv(
        &ROW_HEADER,
        rows.iter().map(|r| {
            vec![
                r.scale.to_string(),
                r.seed.to_string(),
                fmt_real(r.probe[0]),
                fmt_real(r.probe[1]),
                fmt_real(r.simulated),
                fmt_real(r.reference),
                fmt_real(r.error),
                r.bracketed.map_or(String::new(), |b| b.to_string()),
            ]
        }),
    )
}

pub fn rows_from_csv(path: &str, text: &str) -> Result<Vec<ConvergenceRow>, CliError> {
    let err = |line: u64, m: &str| CliError::Parse {
        path: path.to_string(),
        message: format!("line {line}: {m}"),
    };
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), "malformed CSV"))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |k: usize| rec.get(k).and_then(crate::io::parse_real).ok_or_else(|| err(line, "expected a number"));
        let bracketed = match rec.get(7).unwrap_or("") {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            _ => return Err(err(line, "bracketed must be true, false or empty")),
        };
        rows.push(ConvergenceRow {
            scale: rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| err(line, "expected a scale"))?,
            seed: rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| err(line, "expected a seed"))?,
            probe: [num(2)?, num(3)?],
            simulated: num(4)?,
            reference: num(5)?,
            error: num(6)?,
            bracketed,
        });
    }
    Ok(rows)
}

pub fn summary_text(s: &Summary) -> String {
    let mut t = String::new();
    for sc in &s.scales {
        let _ = writeln!(
            t,
            "L = {:4}  rows {:4}  median {:.5}  max {:.5}  bracketed {}/{}",
            sc.scale, sc.rows, sc.median, sc.max, sc.bracketed.0, sc.bracketed.1
        );
    }
    let last = s.scales.last().map_or(f64::NAN, |x| x.median);
    let _ = writeln!(
        t,
        "VERDICT {} last_median={} threshold={}",
        if s.pass { "pass" } else { "fail" },
        fmt_real(last),
        fmt_real(s.threshold)
    );
    t
}

fn cmd_hydro(doc: &mut Doc, o: &mut Out) -> Result<(String, bool), CliError> {
    let (exp, threshold) = experiment_from(doc)?;
    let rows = if doc.has("hydro.table") {
        let path = doc.str("hydro.table")?.to_string();
        rows_from_csv(&path, &read_file(Path::new(&path))?)?
    } else {
        // record the full experiment so the manifest replays it exactly
        doc.set("hydro.t", Value::Float(exp.t));
        doc.table.insert("profile".into(), Value::Table(profile_table(&exp.profile)));
        run_experiment_parallel(&exp)?
    };
    let summary = harness::aggregate(&rows, threshold)?;
    let text = summary_text(&summary);
    o.put("rows.csv", rows_csv(&rows))?;
    o.put("summary.txt", &text)?;
    Ok((text, summary.pass))
}

fn cmd_snapshot(doc: &mut Doc, o: &mut Out) -> Result<String, CliError> {
    let h = if doc.has("snapshot.input") {
        height_from_config(&read_config(Path::new(doc.str("snapshot.input")?))?, None)?
    } else {
        let p = doc.profile("profile")?;
        let scale = doc.u64_or("lattice.scale", 1)? as u32;
        height_from_profile(&p, scale, &window_from(doc)?)?
    };
    o.put("snapshot.svg", snapshot_svg(&h))?;
    Ok(format!("snapshot: {} vertices", h.len()))
}
