//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantity next to its tolerance. Exits nonzero if any fails.

use std::fs;
use std::path::Path;
use std::time::Instant;

use akpz::commands::{run_experiment_parallel, Command};
use akpz::config::Doc;
use akpz::io::{config_from_text, config_to_text};
use akpz::{execute, rerun};
use akpz_core::gibbs::{default_sweeps, density_stats, drift_run, fluctuation_stats, sample_gibbs, summarize_drift, DriftSetup};
use akpz_core::harness::{self, Experiment};
use akpz_core::height::{config_from_height, height_from_config};
use akpz_core::instances::{
    locally_equal_pair, movable_particles, ordered_pair, random_config, random_events, random_heights, random_slope,
    tiny_geometry,
};
use akpz_core::pde::characteristics::{characteristics_solve, estimate_tf, NewtonSettings};
use akpz_core::pde::drift::{grad_v, hessian_v, v_unchecked, DEFAULT_MARGIN};
use akpz_core::pde::hopf::{hopf_solve, SlopeTable};
use akpz_core::pde::riemann::{classify, EnvelopeMethod, RiemannOptions, RiemannSpec};
use akpz_core::pde::Axis;
use akpz_core::sim::oracle::DEFAULT_GUARD;
use akpz_core::sim::{couple_monotone, generate_events, localized_difference, simulate, variational_oracle, Checkpoints, CouplingError, SimError, SimOptions};
use akpz_core::{Half, LocalizationBox, Slope, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn c1_drift() -> Verdict {
    let start = Instant::now();
    let seeds: Vec<u64> = (1..=20).collect();
    let mut parts = Vec::new();
    let mut pass = true;
    for (rho, target) in [([1.0 / 3.0, 1.0 / 3.0], 0.27566), ([0.5, 0.25], 0.31831)] {
        let setup = DriftSetup {
            slope: Slope::new(rho[0], rho[1], DEFAULT_MARGIN).unwrap(),
            n: 64,
            horizon: 50.0,
            kappa: harness::DEFAULT_KAPPA,
            sweeps: default_sweeps(64),
        };
        let per: Result<Vec<f64>, _> = seeds.par_iter().map(|&s| drift_run(&setup, s)).collect();
        match per.map(summarize_drift) {
            Ok(Ok(est)) => {
                let err = (est.mean - target).abs();
                pass &= err <= 0.03;
                parts.push(format!("v({:.3},{:.3}) = {:.4} +- {:.4} vs {target} (|err| {:.4} <= 0.03)", rho[0], rho[1], est.mean, est.stderr, err));
            }
            Ok(Err(e)) | Err(e) => {
                pass = false;
                parts.push(format!("error {e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs <= 600.0;
    verdict(pass, format!("{}; {secs:.0}s <= 600s", parts.join("; ")))
}

fn c2_oracle() -> Verdict {
    let start = Instant::now();
    let (window, region) = tiny_geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut equal) = (0, 0);
    while checked < 500 {
        let cfg = random_config(&mut rng, &window, 40);
        if movable_particles(&cfg, &region) > 6 {
            continue;
        }
        let events = random_events(&mut rng, &region, 6, 1.0);
        let tr = match simulate(&cfg, events.iter().copied(), &SimOptions::default()) {
            Ok(tr) => tr,
            Err(SimError::WindowExhausted { .. }) => continue,
            Err(e) => return verdict(false, format!("simulate failed: {e}")),
        };
        let Ok(oracle) = variational_oracle(&cfg, &events, 1.0, DEFAULT_GUARD) else {
            return verdict(false, "oracle guard exceeded".into());
        };
        checked += 1;
        equal += (tr.final_cfg.particles().collect::<Vec<_>>() == oracle) as u32;
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(equal == 500 && secs <= 60.0, format!("{equal}/500 identical (100% required); {secs:.2}s <= 60s"))
}

fn coupling_geometry() -> (Window, LocalizationBox) {
    (Window::new(-8, 8, Half(-30), Half(50)).unwrap(), LocalizationBox::new(-6, 6, Half(-16), Half(16)).unwrap())
}

fn c3_monotone() -> Verdict {
    let (window, region) = coupling_geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut pairs, mut held, mut comparisons) = (0, 0, 0u64);
    let times: Vec<f64> = (1..=10).map(|k| 0.4 * k as f64).collect();
    while pairs < 100 {
        let (low, high) = ordered_pair(&mut rng, &window, 600);
        let ev = generate_events(rng.random(), region, 4.0).unwrap();
        match couple_monotone(&low, &high, ev.iter(), &region, &Checkpoints::Times(times.clone())) {
            Ok(rep) => {
                pairs += 1;
                held += rep.holds() as u32;
                comparisons += rep.comparisons;
            }
            Err(CouplingError::Sim(SimError::WindowExhausted { .. })) => {}
            Err(e) => return verdict(false, format!("coupling failed: {e}")),
        }
    }
    verdict(held == 100, format!("{held}/100 pairs ordered at all {comparisons} sampled comparisons (100% required)"))
}

fn c4_localization() -> Verdict {
    let (window, region) = coupling_geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut pairs, mut same, mut differing_outside) = (0, 0, 0);
    while pairs < 100 {
        let (a, b) = locally_equal_pair(&mut rng, &window, &region, 600);
        let ev = generate_events(rng.random(), region, 4.0).unwrap();
        match localized_difference(&a, &b, ev.iter(), &region, &Checkpoints::EveryEvent) {
            Ok(diff) => {
                pairs += 1;
                same += diff.is_none() as u32;
                differing_outside += (a != b) as u32;
            }
            Err(CouplingError::Sim(SimError::WindowExhausted { .. })) => {}
            Err(e) => return verdict(false, format!("localization failed: {e}")),
        }
    }
    verdict(
        same == 100,
        format!("{same}/100 pairs identical inside the box after every ring ({differing_outside} differ outside; 100% required)"),
    )
}

fn hydro(exp: Experiment, threshold: f64, limit: f64) -> Verdict {
    let start = Instant::now();
    let rows = match run_experiment_parallel(&exp) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error {e}")),
    };
    let s = harness::aggregate(&rows, threshold).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let medians: Vec<String> = s.scales.iter().map(|x| format!("L={} {:.4}", x.scale, x.median)).collect();
    let br: (usize, usize) = s.scales.iter().fold((0, 0), |a, x| (a.0 + x.bracketed.0, a.1 + x.bracketed.1));
    let budget = if limit.is_finite() { format!("{secs:.0}s <= {limit:.0}s") } else { format!("{secs:.0}s, no time limit") };
    verdict(
        s.pass && secs <= limit,
        format!(
            "t = {:.3}, medians [{}] nonincreasing, last <= {threshold}; bracketed {}/{}; {budget}",
            exp.t,
            medians.join(", "),
            br.0,
            br.1
        ),
    )
}

fn c7_signature() -> Verdict {
    let m = DEFAULT_MARGIN;
    let (mut neg, mut worst) = (0, f64::NEG_INFINITY);
    for i in 0..100 {
        // cell centres of a 100 x 100 grid mapped onto the margin simplex
        let r1 = m + (1.0 - 3.0 * m) * (i as f64 + 0.5) / 100.0;
        for j in 0..100 {
            let r2 = m + (1.0 - 2.0 * m - r1) * (j as f64 + 0.5) / 100.0;
            let d = hessian_v([r1, r2], m).unwrap().det();
            neg += (d < 0.0) as u32;
            worst = worst.max(d);
        }
    }
    verdict(neg == 10_000, format!("det < 0 at {neg}/10000 nodes (largest det {worst:.3e})"))
}

fn c8_gradient() -> Verdict {
    let m = DEFAULT_MARGIN;
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let r1 = m + (1.0 - 3.0 * m) * (i as f64 + 0.5) / 50.0;
        for j in 0..50 {
            let r2 = m + (1.0 - 2.0 * m - r1) * (j as f64 + 0.5) / 50.0;
            let g = grad_v([r1, r2], m).unwrap();
            let fd = [
                (v_unchecked([r1 + h, r2]) - v_unchecked([r1 - h, r2])) / (2.0 * h),
                (v_unchecked([r1, r2 + h]) - v_unchecked([r1, r2 - h])) / (2.0 * h),
            ];
            for k in 0..2 {
                worst = worst.max((g[k] - fd[k]).abs() / g[k].abs());
            }
        }
    }
    verdict(worst <= 1e-5, format!("max relative error {worst:.2e} <= 1e-5 over 50x50"))
}

fn c9_solvers() -> Verdict {
    let exp = Experiment::default_smooth();
    let a = Axis::spanning(-1.0, 1.0, 41).unwrap();
    let tf = estimate_tf(&exp.profile, a, a, 1e3, 1e-3).unwrap();
    let t = 0.5 * tf;
    let (ch, failures) = characteristics_solve(&exp.profile, t, a, a, NewtonSettings::default());
    let table = SlopeTable::from_profile(&exp.profile, 201).unwrap();
    let hp = hopf_solve(&table, t, a, a);
    let sup = ch.max_abs_diff(&hp);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let opts = RiemannOptions::default();
    let mut agree = 0;
    for k in 0..20 {
        let (minus, plus) = (random_slope(&mut rng, 0.05).as_array(), random_slope(&mut rng, 0.05).as_array());
        let mut spec = RiemannSpec::from_kink(minus, plus).unwrap();
        if k % 2 == 1 {
            spec = RiemannSpec::new(spec.c, spec.beta, spec.n, spec.u_plus, spec.u_minus).unwrap();
        }
        let hull = classify(&spec, opts, EnvelopeMethod::Hull).unwrap();
        let dl = classify(&spec, opts, EnvelopeMethod::DoubleLegendre).unwrap();
        agree += (hull.kind == dl.kind && hull.flats.len() == dl.flats.len()) as u32;
    }
    verdict(
        failures.is_empty() && sup <= 1e-2 && agree == 20,
        format!("t = {t:.3} (0.5 Tf): sup |characteristics - hopf| = {sup:.2e} <= 1e-2; Riemann classifications agree {agree}/20"),
    )
}

fn c10_gibbs() -> Verdict {
    let slope = Slope::new(1.0 / 3.0, 1.0 / 3.0, DEFAULT_MARGIN).unwrap();
    let (r, lwin) = (60, 64);
    let bound = (lwin as f64).ln().powi(2);
    let window = Window::new(-1, 1, Half(-4), Half(2 * r + 4)).unwrap();
    let stats: Vec<(f64, f64)> = (1..=40u64)
        .into_par_iter()
        .map(|seed| {
            let t = sample_gibbs(slope, 64, default_sweeps(64), 1000 + seed).unwrap();
            let cfg = t.to_config(&window).unwrap();
            let density = density_stats(&cfg, 0, r) as f64 / r as f64;
            (density, fluctuation_stats(&t, slope, lwin))
        })
        .collect();
    let dens_ok = stats.iter().filter(|s| (s.0 - slope.rho3()).abs() <= 0.05).count();
    let fluct_ok = stats.iter().filter(|s| s.1 <= bound).count();
    let worst = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    verdict(
        dens_ok >= 38 && fluct_ok >= 38,
        format!("density within 0.05 in {dens_ok}/40, deviation <= {bound:.2} in {fluct_ok}/40 (max {worst:.2}); 38/40 required"),
    )
}

fn same_payloads(a: &Path, b: &Path) -> bool {
    fs::read_dir(a).unwrap().all(|e| {
        let name = e.unwrap().file_name();
        fs::read(a.join(&name)).ok() == fs::read(b.join(&name)).ok()
    })
}

fn c11_round_trips() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ok = 0;
    for _ in 0..1000 {
        let (l0, z0) = (rng.random_range(-10..0), rng.random_range(-30..0));
        let w = Window::new(l0, l0 + rng.random_range(0..12), Half(z0), Half(z0 + rng.random_range(3..40))).unwrap();
        let flips = rng.random_range(0..500);
        let h = random_heights(&mut rng, &w, flips);
        let cfg = config_from_height(&h).unwrap();
        let back = height_from_config(&cfg, None).unwrap();
        let text = config_from_text("round trip", &config_to_text(&cfg)).unwrap();
        ok += (back == h && config_from_height(&back).unwrap() == cfg && text == cfg) as u32;
    }
    let dir = tempfile::TempDir::new().unwrap();
    let runs = [
        (Command::Simulate, "[profile]\nkind = \"bump\"\nrho = [0.33, 0.33]\na = 0.25\nradius = 0.6\n[lattice]\nscale = 8\nlines = [-8, 8]\nz = [-12.0, 40.0]\n[clocks]\nlines = [-6, 6]\nz = [-8.0, 8.0]\n[run]\nt = 3.0\nseed = 4\nsamples = 2\n"),
        (Command::Gibbs, "[gibbs]\nrho = [0.5, 0.25]\nn = 16\nseed = 3\n[drift]\nt = 4.0\nseeds = 2\n"),
        (Command::Pde, "[pde]\nmode = \"hopf\"\nt = 0.3\nx = [-1, 1, 21]\ny = [-1, 1, 21]\n[profile]\nkind = \"bump\"\nrho = [0.3, 0.3]\na = 0.2\nradius = 0.5\n"),
        (Command::Hydro, "[hydro]\nmode = \"shock\"\nscales = [4, 8]\nseeds = 2\n"),
    ];
    let mut exact = 0;
    for (k, (cmd, text)) in runs.iter().enumerate() {
        let (a, b) = (dir.path().join(format!("a{k}")), dir.path().join(format!("b{k}")));
        execute(*cmd, Doc::parse("acceptance", text).unwrap(), None, &a).unwrap();
        rerun(&a.join("manifest.toml"), &b).unwrap();
        exact += same_payloads(&a, &b) as u32;
    }
    verdict(
        ok == 1000 && exact == runs.len() as u32,
        format!("config<->height identity {ok}/1000; manifest re-runs bit-exact {exact}/{} (100% required)", runs.len()),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("stationary drift", c1_drift),
        ("oracle equivalence", c2_oracle),
        ("monotone coupling", c3_monotone),
        ("localization", c4_localization),
        ("hydrodynamic smooth mode", || hydro(Experiment::default_smooth(), 0.05, 1800.0)),
        ("hydrodynamic shock mode", || hydro(Experiment::default_shock(), 0.07, f64::INFINITY)),
        ("AKPZ signature", c7_signature),
        ("drift gradient", c8_gradient),
        ("solver cross-validation", c9_solvers),
        ("Gibbs statistics", c10_gibbs),
        ("round trips", c11_round_trips),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        failed += !v.pass as u32;
        println!(
            "{} {:>2} {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            k + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed as usize, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
