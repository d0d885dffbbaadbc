//! One function per subcommand.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use nsc_core::conditions::{
    condition_shape, corollary_condition, corollary_from_norms, observed_constant, theorem_condition,
    transport_decomposition_check, CorollaryNorms,
};
use nsc_core::large_data::{build_u0, norm_scaling_sweep, scaling_row};
use nsc_core::littlewood_paley::{fb_norm, BesovParams, DyadicPartition};
use nsc_core::random::random_field;
use nsc_core::solver::{bootstrap_from_series, monitor_series, perturbation_monitor, RunReport, Solver};
use nsc_core::spectral::snapshot::write_snapshot;
use nsc_core::spectral::{energy, FrequencyLattice, SpectralVectorField};
use nsc_core::stokes_coriolis::{linear_solution_series, pointwise_bound_check, semigroup_apply, SemigroupParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{DataKind, ExperimentConfig};
use crate::output::Output;
use crate::Failure;

fn open(cfg: &ExperimentConfig, command: &str, extra: &[u8]) -> Result<Output, Failure> {
    let text = cfg.to_toml();
    let mut inputs = format!("{command}\n{text}").into_bytes();
    inputs.extend_from_slice(extra);
    let mut out = Output::create(&cfg.output.dir, command, &inputs)?;
    out.write("config.toml", text.as_bytes())?;
    Ok(out)
}

struct Datum {
    u0: SpectralVectorField,
    info: serde_json::Value,
}

fn datum(cfg: &ExperimentConfig, lat: &Arc<FrequencyLattice>) -> Result<Datum, Failure> {
    match cfg.data.kind {
        DataKind::Large => {
            let e = cfg.eps().map_err(Failure::validation)?;
            let d = build_u0(e, lat, cfg.floor())?;
            Ok(Datum {
                u0: d.u0.scale(cfg.data.scale),
                info: json!({
                    "kind": "large",
                    "eps": e,
                    "amplitude": d.amplitude,
                    "loglog_floored": d.floored,
                    "scale": cfg.data.scale,
                }),
            })
        }
        DataKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let u0 = random_field(lat, &mut rng, cfg.data.random_r_min, cfg.data.random_r_max, true).scale(cfg.data.scale);
            Ok(Datum {
                u0,
                info: json!({
                    "kind": "random",
                    "seed": cfg.seed,
                    "r_min": cfg.data.random_r_min,
                    "r_max": cfg.data.random_r_max,
                    "scale": cfg.data.scale,
                }),
            })
        }
    }
}

fn lattice(cfg: &ExperimentConfig) -> Result<Arc<FrequencyLattice>, Failure> {
    cfg.lattice().map_err(Failure::validation)
}

fn lattice_json(lat: &FrequencyLattice) -> serde_json::Value {
    json!({ "counts": lat.counts(), "spacing": lat.spacing(), "periods": lat.periods() })
}

fn snapshot_bytes(u: &SpectralVectorField, t: f64) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    write_snapshot(&mut buf, u, t)?;
    Ok(buf)
}

pub fn norms(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let part = DyadicPartition::covering(&lat);
    let mut summary = String::from("s,p,r,aggregate,truncation\n");
    let mut blocks = String::from("s,p,r,j,value\n");
    for &[s, p, r] in &cfg.norms.params {
        let prm = BesovParams::new(s, p, r)?;
        let series = fb_norm(&part, &d.u0, prm);
        let _ = writeln!(summary, "{s:e},{p:e},{r:e},{:e},{:e}", series.aggregate, series.truncation);
        for (j, v) in &series.blocks {
            let _ = writeln!(blocks, "{s:e},{p:e},{r:e},{j},{v:e}");
        }
    }
    let mut out = open(cfg, "norms", &[])?;
    out.write_csv("norms.csv", &summary)?;
    out.write_csv("blocks.csv", &blocks)?;
    out.finish(json!({
        "datum": d.info,
        "lattice": lattice_json(&lat),
        "partition": { "j_min": part.j_min(), "j_max": part.j_max() },
    }))
}

pub fn build_data(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let (mut lo, mut hi, mut count) = (f64::INFINITY, 0.0f64, 0usize);
    for i in 0..lat.len() {
        if d.u0.modulus(i) > 0.0 {
            let r = lat.radius(i);
            lo = lo.min(r);
            hi = hi.max(r);
            count += 1;
        }
    }
    let part = DyadicPartition::covering(&lat);
    let series = fb_norm(&part, &d.u0, BesovParams { s: 0.0, p: 1.0, r: 1.0 });
    let total = series.aggregate;
    let off_block = series.blocks.iter().filter(|(j, _)| *j != 0).map(|b| b.1).fold(0.0, f64::max);
    let info = json!({
        "datum": d.info,
        "lattice": lattice_json(&lat),
        "nonzero_modes": count,
        "support_radius": if count > 0 { json!([lo, hi]) } else { json!(null) },
        "max_divergence_ratio": d.u0.divergence_ratio(),
        "hermitian_defect": d.u0.hermitian_defect(),
        "outside_dealiased": d.u0.max_outside_dealiased(),
        "l1": d.u0.lp_norm(1.0),
        "off_block_relative": if total > 0.0 { off_block / total } else { 0.0 },
    });
    let mut out = open(cfg, "build-data", &[])?;
    out.write("u0.nsc", &snapshot_bytes(&d.u0, 0.0)?)?;
    out.write_json("datum.json", &info)?;
    out.finish(info)
}

pub fn sweep_epsilon(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let eps = cfg.eps_list().map_err(Failure::validation)?;
    let table = norm_scaling_sweep(&eps, cfg.data.quadrature_resolution, cfg.floor())?;
    let shape = condition_shape(&table, &cfg.condition_params())?;
    let mut out = open(cfg, "sweep-epsilon", &[])?;
    out.write_csv("sweep.csv", &table.to_csv())?;
    out.write_csv("exponents.csv", &table.exponents_csv())?;
    out.write_csv("conditions.csv", &shape.to_csv())?;
    out.write_json("conditions.json", &shape)?;
    out.finish(json!({
        "eps_count": eps.len(),
        "resolution": cfg.data.quadrature_resolution,
        "exponents": table.exponents,
        "condition_spread_literal": shape.spread_literal,
        "condition_spread_fitted": shape.spread_fitted,
        "kappa": shape.kappa,
        "C": shape.c,
        "delta": shape.delta,
    }))
}

fn times_from_zero(cfg: &ExperimentConfig) -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend(cfg.solver.times.iter().copied().filter(|&x| x > 0.0));
    t
}

pub fn linear_evolve(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let part = DyadicPartition::covering(&lat);
    let prms = [
        BesovParams { s: -1.0, p: 1.0, r: 1.0 },
        BesovParams { s: 0.0, p: 1.0, r: 1.0 },
        BesovParams { s: 1.0, p: 1.0, r: 1.0 },
    ];
    let times = times_from_zero(cfg);
    let ev = linear_solution_series(&d.u0, cfg.solver.omega, &times, Some((&part, &prms)))?;
    let mut csv = String::from("t,energy,fb_m1_11,fb_0_11,fb_1_11\n");
    for (k, t) in ev.times.iter().enumerate() {
        let n = &ev.norms[k];
        let _ = writeln!(
            csv,
            "{t:e},{:e},{:e},{:e},{:e}",
            energy(&ev.snapshots[k]),
            n[0].aggregate,
            n[1].aggregate,
            n[2].aggregate
        );
    }
    let mut out = open(cfg, "linear-evolve", &[])?;
    out.write_csv("linear.csv", &csv)?;
    if cfg.solver.write_snapshots {
        for (k, (t, u)) in ev.times.iter().zip(&ev.snapshots).enumerate() {
            out.write(&format!("snapshots/linear_{k:04}.nsc"), &snapshot_bytes(u, *t)?)?;
        }
    }
    out.finish(json!({ "datum": d.info, "lattice": lattice_json(&lat), "omega": cfg.solver.omega }))
}

pub fn check_bounds(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let mut reports = Vec::new();
    let mut csv = String::from("omega,t,name,gating,max_ratio,argmax_xi1,argmax_xi2,argmax_xi3,pass\n");
    for &om in &cfg.solver.omegas {
        for &t in &cfg.solver.times {
            let r = pointwise_bound_check(&d.u0, om, t)?;
            for c in &r.checks {
                let _ = writeln!(
                    csv,
                    "{om:e},{t:e},{},{},{:e},{:e},{:e},{:e},{}",
                    c.name, c.gating, c.max_ratio, c.argmax_xi[0], c.argmax_xi[1], c.argmax_xi[2], c.pass
                );
            }
            reports.push(r);
        }
    }
    let all_gating = reports.iter().all(|r| r.gating_pass());
    let mut out = open(cfg, "check-bounds", &[])?;
    out.write_csv("bounds.csv", &csv)?;
    out.write_json("bounds.json", &reports)?;
    out.finish(json!({ "datum": d.info, "gating_pass": all_gating }))?;
    if all_gating {
        Ok(())
    } else {
        Err(Failure::finding("a gating pointwise bound failed; see bounds.csv"))
    }
}

pub fn check_conditions(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let prm = cfg.condition_params();
    let theorem = theorem_condition(&d.u0, cfg.solver.omega, &prm, cfg.route())?;
    let corollary = corollary_condition(&d.u0, &prm)?;
    let separable = match cfg.data.kind {
        DataKind::Large => {
            let e = cfg.eps().map_err(Failure::validation)?;
            let row = scaling_row(e, cfg.data.quadrature_resolution, cfg.floor())?;
            let s = cfg.data.scale;
            let norms = CorollaryNorms {
                fb_m1_11: s * row.fb_m1_11,
                u12_fb1_32: s * row.u12_fb1_32,
                u3_fb1_32: s * row.u3_fb1_32,
                d3u_fb1_32: s * row.d3u_fb1_32,
            };
            Some(corollary_from_norms(norms, &prm)?)
        }
        DataKind::Random => None,
    };
    let integral = theorem.integral.clone().expect("theorem report carries the integral");
    let constant = observed_constant(&integral, &corollary.norms.expect("corollary norms"));
    let report = json!({
        "C": prm.c,
        "delta": prm.delta,
        "datum": d.info,
        "theorem": theorem,
        "corollary_lattice": corollary,
        "corollary_separable": separable,
        "observed_constant": constant,
    });
    let mut out = open(cfg, "check-conditions", &[])?;
    out.write_json("conditions.json", &report)?;
    out.finish(json!({
        "C": prm.c,
        "delta": prm.delta,
        "theorem_lhs": theorem.lhs,
        "theorem_pass": theorem.pass,
        "corollary_lhs": corollary.lhs,
        "corollary_pass": corollary.pass,
        "observed_constant": constant,
    }))
}

fn run_summary(run: &RunReport) -> serde_json::Value {
    json!({
        "steps": run.steps,
        "rejected_steps": run.rejected_steps,
        "t_reached": run.final_state.t,
        "blowup": run.blowup,
        "energy_nonincreasing": run.energy_nonincreasing(1e-6),
        "max_divergence_ratio": run.max_divergence(),
    })
}

pub fn solve(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let lat = lattice(cfg)?;
    let d = datum(cfg, &lat)?;
    let scfg = cfg.solver_config().map_err(Failure::validation)?;
    let mut out = open(cfg, "solve", &[])?;
    let mut solver = Solver::new(lat.clone(), scfg)?;
    let write = cfg.solver.write_snapshots;
    let mut k = 0usize;
    let run = solver.solve_with(&d.u0, |s| {
        if write {
            let bytes = snapshot_bytes(&s.u, s.t).map_err(|f| nsc_core::Error::Io(f.message))?;
            out.write(&format!("snapshots/u_{k:04}.nsc"), &bytes)
                .map_err(|f| nsc_core::Error::Io(f.message))?;
            if let Some(l) = &s.linear {
                let bytes = snapshot_bytes(l, s.t).map_err(|f| nsc_core::Error::Io(f.message))?;
                out.write(&format!("snapshots/linear_{k:04}.nsc"), &bytes)
                    .map_err(|f| nsc_core::Error::Io(f.message))?;
            }
        }
        k += 1;
        Ok(())
    })?;
    out.write_csv("run.csv", &run.to_csv())?;
    let mut summary = run_summary(&run);
    summary["datum"] = d.info.clone();
    summary["lattice"] = lattice_json(&lat);
    summary["omega"] = json!(cfg.solver.omega);
    if cfg.solver.monitor {
        let boot = perturbation_monitor(&run, cfg.solver.eta)?;
        out.write_csv("bootstrap.csv", &boot.to_csv())?;
        out.write_json("bootstrap.json", &boot)?;
        summary["gamma"] = json!(boot.gamma);
        summary["gamma_equals_t"] = json!(boot.gamma_equals_t);
        summary["margin_observed"] = json!(boot.margin_observed);
    }
    out.write_json("run.json", &summary)?;
    out.finish(summary)?;
    match &run.blowup {
        Some(b) => Err(Failure::finding(format!(
            "blow-up heuristic triggered at t = {}: ‖û‖_L1 = {:e} vs initial {:e}",
            b.t, b.l1, b.initial_l1
        ))),
        None => Ok(()),
    }
}

fn column(header: &[&str], name: &str) -> Result<usize, Failure> {
    header
        .iter()
        .position(|h| *h == name)
        .ok_or_else(|| Failure::validation(format!("run CSV lacks column {name}")))
}

pub fn monitor(cfg: &ExperimentConfig, run: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(run).map_err(|e| Failure::validation(format!("cannot read {}: {e}", run.display())))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let (ct, cm, cp) = (column(&header, "t")?, column(&header, "v_fb_m1_11")?, column(&header, "v_fb_1_11")?);
    let (mut t, mut m, mut p) = (Vec::new(), Vec::new(), Vec::new());
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let get = |c: usize| -> Result<f64, Failure> {
            let cell = cells.get(c).copied().unwrap_or("");
            if cell.is_empty() {
                return Err(Failure::validation(format!(
                    "row {} has no perturbation data; rerun solve with --monitor",
                    n + 1
                )));
            }
            cell.parse().map_err(|_| Failure::validation(format!("row {}: bad number {cell:?}", n + 1)))
        };
        t.push(get(ct)?);
        m.push(get(cm)?);
        p.push(get(cp)?);
    }
    let series = bootstrap_from_series(&t, &m, &p)?;
    let boot = monitor_series(series, cfg.solver.eta);
    let mut out = open(cfg, "monitor", text.as_bytes())?;
    out.write_csv("bootstrap.csv", &boot.to_csv())?;
    out.write_json("bootstrap.json", &boot)?;
    out.finish(json!({
        "eta": boot.eta,
        "gamma": boot.gamma,
        "gamma_equals_t": boot.gamma_equals_t,
        "margin_observed": boot.margin_observed,
    }))
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn selftest_checks(seed: u64) -> Result<Vec<Check>, nsc_core::Error> {
    use nsc_core::spectral::make_lattice;
    use std::f64::consts::{PI, TAU};
    let mut out = Vec::new();
    let lat = make_lattice([TAU; 3], [16; 3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let part = DyadicPartition::covering(&lat);
    let pu = (1..lat.len())
        .map(|i| (part.covered_sum(lat.radius(i)) - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(Check { name: "partition_of_unity", pass: pu <= 1e-12, detail: format!("max defect {pu:e}") });

    let u = random_field(&lat, &mut rng, 1.0, 5.0, true);
    let fb0 = fb_norm(&part, &u, BesovParams { s: 0.0, p: 1.0, r: 1.0 }).aggregate;
    let l1 = u.lp_norm(1.0);
    let rel = (fb0 - l1).abs() / l1;
    out.push(Check { name: "fb0_11_equals_l1", pass: rel <= 1e-12, detail: format!("relative gap {rel:e}") });

    let (t1, t2, om) = (0.3, 0.45, 7.0);
    let a = semigroup_apply(&semigroup_apply(&u, SemigroupParams::new(om, t1)?)?, SemigroupParams::new(om, t2)?)?;
    let b = semigroup_apply(&u, SemigroupParams::new(om, t1 + t2)?)?;
    let gap = a.max_relative_difference(&b);
    out.push(Check { name: "semigroup_property", pass: gap <= 1e-12, detail: format!("relative gap {gap:e}") });

    let r = transport_decomposition_check(&u)?;
    out.push(Check {
        name: "transport_identities",
        pass: r.max_residual() <= 1e-12,
        detail: format!("residual {:e}", r.max_residual()),
    });

    let big = make_lattice([16.0 * PI, 16.0 * PI, 128.0 * PI], [48, 48, 32])?;
    let d = build_u0(0.125, &big, Default::default())?;
    let bp = DyadicPartition::covering(&big);
    let series = fb_norm(&bp, &d.u0, BesovParams { s: 0.0, p: 1.0, r: 1.0 });
    let off = series.blocks.iter().filter(|(j, _)| *j != 0).map(|b| b.1).fold(0.0, f64::max) / series.aggregate;
    out.push(Check { name: "single_block", pass: off <= 1e-14, detail: format!("off-block relative {off:e}") });

    let mut gating = true;
    for om in [1.0, 10.0] {
        for t in [0.1, 1.0] {
            gating &= pointwise_bound_check(&d.u0, om, t)?.gating_pass();
        }
    }
    out.push(Check { name: "pointwise_bounds", pass: gating, detail: "sharp variants at Ω ∈ {1, 10}".into() });

    let small = u.scale(0.01);
    let cfg = nsc_core::solver::SolverConfig { nonlinear: false, omega: 2.0, t_final: 1.0, dt0: 0.1, ..Default::default() };
    let run = Solver::new(lat.clone(), cfg)?.solve(&small)?;
    let exact = semigroup_apply(&small, SemigroupParams::new(2.0, 1.0)?)?;
    let gap = run.final_state.u.max_relative_difference(&exact);
    out.push(Check { name: "linear_solver_exact", pass: gap <= 1e-10, detail: format!("relative gap {gap:e}") });
    Ok(out)
}

pub fn selftest(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let checks = selftest_checks(cfg.seed)?;
    let mut csv = String::from("check,pass,detail\n");
    for c in &checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        let _ = writeln!(csv, "{},{},{}", c.name, c.pass, c.detail.replace(',', ";"));
    }
    let all = checks.iter().all(|c| c.pass);
    let mut out = open(cfg, "selftest", &[])?;
    out.write("selftest.csv", csv.as_bytes())?;
    out.finish(json!({ "checks": checks.len(), "all_pass": all }))?;
    if all {
        Ok(())
    } else {
        Err(Failure::finding("selftest failures"))
    }
}
