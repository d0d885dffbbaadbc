use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use std::time::Instant;

use nsc_core::conditions::{condition_shape, transport_decomposition_check, ConditionParams};
use nsc_core::large_data::{build_u0, fitted_lattice, norm_scaling_sweep, LogLogFloor};
use nsc_core::littlewood_paley::{fb_norm, fb_norm_scalar};
use nsc_core::random::{random_field, random_scalar};
use nsc_core::solver::{perturbation_monitor, solve, RunReport, Solver, SolverConfig, SolverState};
use nsc_core::spectral::make_lattice;
use nsc_core::stokes_coriolis::{pointwise_bound_check, semigroup_apply, SemigroupParams};
use nsc_core::{BesovParams, DyadicPartition, FrequencyLattice, ScalarSpectrum, SpectralVectorField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI_CUBED: f64 = 8.0 * PI * PI * PI;
const BIG_COUNTS: [usize; 3] = [64, 64, 256];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn iso(period: f64, n: usize) -> Arc<FrequencyLattice> {
    make_lattice([period; 3], [n; 3]).unwrap()
}

fn big_datum() -> SpectralVectorField {
    let lat = fitted_lattice(0.125, BIG_COUNTS).unwrap();
    build_u0(0.125, &lat, LogLogFloor::default()).unwrap().u0
}

fn partition_of_unity() -> Outcome {
    let mut worst = 0.0f64;
    for lat in [iso(TAU, 32), fitted_lattice(0.125, BIG_COUNTS).unwrap(), fitted_lattice(2f64.powi(-10), [96, 96, 64]).unwrap()] {
        let part = DyadicPartition::covering(&lat);
        for i in 1..lat.len() {
            worst = worst.max((part.covered_sum(lat.radius(i)) - 1.0).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max |Σψ̂ − 1| = {worst:e}"))
}

fn fb0_equals_lp() -> Outcome {
    let lat = iso(8.0 * TAU, 38);
    let part = DyadicPartition::covering(&lat);
    let mut worst = 0.0f64;
    for seed in 0..50u64 {
        let mut r = rng(seed);
        let generic = random_field(&lat, &mut r, 0.1, 1.5, seed % 2 == 0);
        let j = if seed % 3 == 0 { -1 } else { 0 };
        let s = 2f64.powi(j);
        let plateau = random_field(&lat, &mut r, 4.0 / 3.0 * s, 1.5 * s, seed % 2 == 1);
        let gap = |u: &SpectralVectorField, p: f64| {
            let fb = fb_norm(&part, u, BesovParams::new(0.0, p, 1.0).unwrap()).aggregate;
            let lp = u.lp_norm(p);
            (fb - lp).abs() / lp
        };
        worst = worst.max(gap(&generic, 1.0));
        for p in [1.0, 1.5, 2.0, f64::INFINITY] {
            worst = worst.max(gap(&plateau, p));
        }
    }
    outcome(
        worst <= 1e-12,
        format!("max relative gap {worst:e} (p = 1 on generic fields, p ∈ {{1, 3/2, 2, ∞}} on single-plateau fields)"),
    )
}

fn single_block() -> Outcome {
    let mut worst = 0.0f64;
    for (eps, counts) in [(0.125, [64, 64, 32]), (0.0625, [96, 96, 32]), (0.03125, [128, 128, 32])] {
        let lat = fitted_lattice(eps, counts).unwrap();
        let u0 = build_u0(eps, &lat, LogLogFloor::default()).unwrap().u0;
        let part = DyadicPartition::covering(&lat);
        for prm in [(-1.0, 1.0), (0.0, 1.0), (1.0, 1.0), (1.0, 1.5)] {
            let series = fb_norm(&part, &u0, BesovParams::new(prm.0, prm.1, 1.0).unwrap());
            let main = series.block(0).unwrap();
            let off = series.blocks.iter().filter(|(j, _)| *j != 0).map(|(_, v)| *v).fold(0.0, f64::max);
            worst = worst.max(off / main);
        }
    }
    outcome(worst <= 1e-14, format!("max off-block relative value {worst:e}"))
}

fn sweep_exponents() -> Outcome {
    let eps: Vec<f64> = (4..=14).map(|k| 2f64.powi(-k)).collect();
    let table = norm_scaling_sweep(&eps, 256, LogLogFloor::default()).unwrap();
    let e = &table.exponents;
    let pass = e.fb_m1_11.abs() <= 0.05 && (e.con1_group - 1.0 / 3.0).abs() <= 0.05;
    outcome(
        pass,
        format!(
            "FB^-1_11/sqrt(LL) exponent {:.5} (target 0 ± 0.05), norm group/sqrt(LL) exponent {:.5} (target 1/3 ± 0.05)",
            e.fb_m1_11, e.con1_group
        ),
    )
}

fn semigroup_exactness() -> Outcome {
    let lat = iso(TAU, 16);
    let mut composition = 0.0f64;
    let mut modulus = 0.0f64;
    let mut fields: Vec<SpectralVectorField> = (0..10).map(|s| random_field(&lat, &mut rng(100 + s), 0.5, 5.0, true)).collect();
    fields.push(big_datum());
    for (k, u) in fields.iter().enumerate() {
        let mut r = rng(200 + k as u64);
        let omega = r.gen_range(-100.0..100.0);
        let (t1, t2) = (r.gen_range(0.0..2.0), r.gen_range(0.0..2.0));
        let g = |t: f64, v: &SpectralVectorField| semigroup_apply(v, SemigroupParams::new(omega, t).unwrap()).unwrap();
        composition = composition.max(g(t1 + t2, u).max_relative_difference(&g(t2, &g(t1, u))));
        let big = g(t1, u);
        let l = u.lattice();
        for i in 1..l.len() {
            let r2 = l.radius(i).powi(2);
            let expect = (-t1 * r2).exp() * u.modulus(i);
            if expect > 0.0 {
                modulus = modulus.max((big.modulus(i) - expect).abs() / expect);
            }
        }
    }
    outcome(
        composition <= 1e-12 && modulus <= 1e-13,
        format!("composition gap {composition:e} (≤ 1e-12), per-mode modulus gap {modulus:e} (≤ 1e-13)"),
    )
}

fn pointwise_bounds() -> Outcome {
    let u0 = big_datum();
    let mut pass = true;
    let mut sharp = 0.0f64;
    let mut informative = Vec::new();
    for omega in [1.0, 10.0] {
        for t in [0.1, 1.0, 10.0] {
            let rep = pointwise_bound_check(&u0, omega, t).unwrap();
            pass &= rep.gating_pass();
            for c in rep.checks.iter() {
                if c.gating {
                    sharp = sharp.max(c.max_ratio);
                } else {
                    informative.push(format!("{}@Ω={omega},t={t}:{:.3}", c.name, c.max_ratio));
                }
            }
        }
    }
    outcome(
        pass,
        format!("max gating ratio {sharp:.12} (≤ 1+1e-10); informative ratios {}", informative.join(" ")),
    )
}

fn transport_identities() -> Outcome {
    let lat = iso(TAU, 16);
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let u = random_field(&lat, &mut rng(300 + seed), 0.5, 5.0, true);
        worst = worst.max(transport_decomposition_check(&u).unwrap().max_residual());
    }
    outcome(worst <= 1e-12, format!("max relative residual {worst:e} over 20 fields"))
}

fn product(a: &ScalarSpectrum, b: &ScalarSpectrum) -> ScalarSpectrum {
    let (pa, pb) = (a.to_physical(), b.to_physical());
    let ab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    ScalarSpectrum::from_physical(a.lattice().clone(), &ab)
}

fn young_estimates() -> Outcome {
    let lat = iso(TAU, 16);
    let part = DyadicPartition::covering(&lat);
    let p32 = BesovParams::new(0.0, 1.5, 1.0).unwrap();
    let p11 = BesovParams::new(0.0, 1.0, 1.0).unwrap();
    let (mut young, mut mixed) = (0.0f64, 0.0f64);
    for seed in 0..200u64 {
        let mut r = rng(400 + seed);
        let a = random_scalar(&lat, &mut r, 0.5, 3.9);
        let b = random_scalar(&lat, &mut r, 0.5, 3.9);
        let ab = product(&a, &b);
        young = young.max(ab.lp_norm(1.0) * TWO_PI_CUBED / (a.lp_norm(1.0) * b.lp_norm(1.0)));
        let k = fb_norm_scalar(&part, &ab, p32).aggregate * TWO_PI_CUBED
            / (fb_norm_scalar(&part, &a, p32).aggregate * fb_norm_scalar(&part, &b, p11).aggregate);
        mixed = mixed.max(k);
    }
    outcome(
        young <= 1.0 + 1e-10 && mixed <= 4.0,
        format!("max L1 ratio {young:.6} (≤ 1+1e-10), observed mixed-norm constant {mixed:.4} (≤ 4)"),
    )
}

fn two_mode_benchmark() -> SpectralVectorField {
    let lat = iso(TAU, 16);
    let amp = 30.0;
    let mut u = SpectralVectorField::zeros(lat.clone());
    let zero = Complex64::new(0.0, 0.0);
    let mut put = |k: [i64; 3], v: [Complex64; 3]| {
        u.set(lat.index_of_mode(k).unwrap(), v);
        u.set(lat.index_of_mode(k.map(|x| -x)).unwrap(), v.map(|z| z.conj()));
    };
    put([1, 0, 0], [zero, Complex64::new(amp, 0.0), Complex64::new(0.0, amp)]);
    put([0, 1, 1], [Complex64::new(0.0, amp), Complex64::new(amp, 0.0), Complex64::new(-amp, 0.0)]);
    u
}

fn fixed_step_run(u0: &SpectralVectorField, cfg: &SolverConfig, steps: usize) -> SpectralVectorField {
    let h = cfg.t_final / steps as f64;
    let mut solver = Solver::new(u0.lattice().clone(), cfg.clone()).unwrap();
    let mut state = SolverState { t: 0.0, u: u0.clone(), linear: None };
    for _ in 0..steps {
        state = solver.step(&state, h).unwrap();
    }
    state.u
}

fn solver_order() -> Outcome {
    let u0 = two_mode_benchmark();
    let cfg = SolverConfig { omega: 1.0, t_final: 1.0, cfl: 1.0, ..SolverConfig::default() };
    let reference = fixed_step_run(&u0, &cfg, 320);
    let err: Vec<f64> = [10, 20, 40]
        .iter()
        .map(|&n| fixed_step_run(&u0, &cfg, n).sub(&reference).unwrap().max_modulus() / reference.max_modulus())
        .collect();
    let ratios = [err[0] / err[1], err[1] / err[2]];
    let order_ok = ratios.iter().all(|r| (r - 16.0).abs() <= 3.0);
    let linear_cfg = SolverConfig { omega: 3.0, t_final: 1.0, dt0: 0.1, nonlinear: false, ..SolverConfig::default() };
    let u_lin = random_field(u0.lattice(), &mut rng(500), 0.5, 5.0, true);
    let run = solve(&u_lin, linear_cfg).unwrap();
    let exact = semigroup_apply(&u_lin, SemigroupParams::new(3.0, 1.0).unwrap()).unwrap();
    let gap = run.final_state.u.max_relative_difference(&exact);
    outcome(
        order_ok && gap <= 1e-10 && (run.final_state.t - 1.0).abs() < 1e-15,
        format!(
            "error ratios {:.3}, {:.3} (16 ± 3); linear run vs semigroup at T = 1: {gap:e} (≤ 1e-10)",
            ratios[0], ratios[1]
        ),
    )
}

fn big_config(omega: f64, nonlinear: bool, track_linear: bool) -> SolverConfig {
    SolverConfig { omega, t_final: 5.0, dt0: 0.125, nonlinear, track_linear, ..SolverConfig::default() }
}

fn conservation(runs: &mut Vec<(f64, RunReport)>) -> Outcome {
    let u0 = big_datum();
    let mut pass = true;
    let mut lines = Vec::new();
    for omega in [0.0, 1.0, 10.0, 100.0] {
        let clock = Instant::now();
        let run = solve(&u0, big_config(omega, true, omega == 1.0)).unwrap();
        let secs = clock.elapsed().as_secs_f64();
        let ok = run.blowup.is_none()
            && run.energy_nonincreasing(1e-6)
            && run.max_divergence() <= 1e-10
            && (run.final_state.t - 5.0).abs() < 1e-12
            && secs < 1800.0;
        pass &= ok;
        lines.push(format!(
            "Ω={omega}: steps {} energy {:.6e}→{:.6e} max div {:.1e} {secs:.0}s",
            run.steps,
            run.rows[0].energy,
            run.rows.last().unwrap().energy,
            run.max_divergence()
        ));
        runs.push((omega, run));
    }
    outcome(pass, lines.join("; "))
}

fn bootstrap(runs: &[(f64, RunReport)]) -> Outcome {
    let u0 = big_datum();
    let linear = solve(&u0, big_config(1.0, false, true)).unwrap();
    let lin = perturbation_monitor(&linear, 0.1).unwrap();
    let v_zero = lin.series.sup.iter().chain(&lin.series.int).all(|&v| v == 0.0);
    let lin_ok = v_zero && lin.gamma_equals_t && lin.gamma == 5.0;
    let full_run = &runs.iter().find(|(o, _)| *o == 1.0).expect("Ω = 1 run").1;
    let full = perturbation_monitor(full_run, 0.1).unwrap();
    let sums: Vec<f64> = full.series.sup.iter().zip(&full.series.int).map(|(a, b)| a + b).collect();
    let monotone = sums.windows(2).all(|w| w[1] >= w[0]);
    let reported = full.gamma.is_finite() && full.gamma >= 0.0 && full.gamma <= 5.0;
    outcome(
        lin_ok && monotone && reported,
        format!(
            "linear run: v ≡ 0 {v_zero}, Γ = {}; full run Ω = 1, η = 0.1: monotone {monotone}, Γ = {}, Γ = T {}, margin {}, max sum {:e}",
            lin.gamma, full.gamma, full.gamma_equals_t, full.margin_observed, full.max_sum
        ),
    )
}

fn condition_value_shape() -> Outcome {
    let eps: Vec<f64> = (4..=14).map(|k| 2f64.powi(-k)).collect();
    let table = norm_scaling_sweep(&eps, 256, LogLogFloor::default()).unwrap();
    let prm = ConditionParams::default();
    let shape = condition_shape(&table, &prm).unwrap();
    outcome(
        shape.spread_fitted <= 2.0,
        format!(
            "C = {}, δ = {}: spread with fitted κ = {:.4} {:.4} (≤ 2); spread with κ = 1 {:.4} (informative)",
            shape.c, shape.delta, shape.kappa, shape.spread_fitted, shape.spread_literal
        ),
    )
}

fn main() {
    let mut runs = Vec::new();
    let mut failures = 0;
    let mut report = |name: &str, f: &mut dyn FnMut() -> Outcome| {
        let clock = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failures += 1;
        }
        println!("{tag} {name}: {} [{:.1}s]", o.detail, clock.elapsed().as_secs_f64());
    };
    report("partition_of_unity", &mut partition_of_unity);
    report("fb0_equals_lp", &mut fb0_equals_lp);
    report("single_block", &mut single_block);
    report("norm_scaling_sweep", &mut sweep_exponents);
    report("semigroup_exactness", &mut semigroup_exactness);
    report("pointwise_bounds", &mut pointwise_bounds);
    report("transport_identities", &mut transport_identities);
    report("young_estimates", &mut young_estimates);
    report("solver_order", &mut solver_order);
    report("conservation", &mut || conservation(&mut runs));
    report("bootstrap_monitor", &mut || bootstrap(&runs));
    report("condition_shape", &mut condition_value_shape);
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
