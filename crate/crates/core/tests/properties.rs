use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use nsc_core::conditions::transport_decomposition_check;
use nsc_core::littlewood_paley::{dyadic_block, fb_norm, fb_norm_scalar};
use nsc_core::random::{random_field, random_scalar};
use nsc_core::solver::{Solver, SolverConfig, SolverState};
use nsc_core::spectral::{coriolis_term, energy, energy_physical, helmholtz_project, inner_product, make_lattice};
use nsc_core::stokes_coriolis::{mirror_x1, semigroup_apply, SemigroupParams};
use nsc_core::{BesovParams, DyadicPartition, FrequencyLattice, ScalarSpectrum, SpectralVectorField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lattice(n: usize) -> Arc<FrequencyLattice> {
    make_lattice([TAU; 3], [n; 3]).unwrap()
}

fn field(lat: &Arc<FrequencyLattice>, seed: u64, solenoidal: bool) -> SpectralVectorField {
    random_field(lat, &mut ChaCha8Rng::seed_from_u64(seed), 0.5, 3.5, solenoidal)
}

fn scalar(lat: &Arc<FrequencyLattice>, seed: u64, r_max: f64) -> ScalarSpectrum {
    random_scalar(lat, &mut ChaCha8Rng::seed_from_u64(seed), 0.5, r_max)
}

fn product(a: &ScalarSpectrum, b: &ScalarSpectrum) -> ScalarSpectrum {
    let (pa, pb) = (a.to_physical(), b.to_physical());
    let ab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    ScalarSpectrum::from_physical(a.lattice().clone(), &ab)
}

fn besov() -> impl Strategy<Value = BesovParams> {
    (
        prop_oneof![Just(-1.0), Just(0.0), Just(0.5), Just(1.0)],
        prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(f64::INFINITY)],
        prop_oneof![Just(1.0), Just(2.0), Just(f64::INFINITY)],
    )
        .prop_map(|(s, p, r)| BesovParams::new(s, p, r).unwrap())
}

const TWO_PI_CUBED: f64 = 8.0 * PI * PI * PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_sums_to_one(rho in 1e-6f64..1e6) {
        prop_assert!((DyadicPartition::full_sum(rho) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fb_norm_is_a_norm(sa in any::<u64>(), sb in any::<u64>(), lambda in -5.0f64..5.0, prm in besov()) {
        let lat = lattice(12);
        let part = DyadicPartition::covering(&lat);
        let a = field(&lat, sa, false);
        let b = field(&lat, sb, false);
        let na = fb_norm(&part, &a, prm).aggregate;
        let nb = fb_norm(&part, &b, prm).aggregate;
        let nab = fb_norm(&part, &a.axpy(1.0, &b).unwrap(), prm).aggregate;
        prop_assert!(nab <= (na + nb) * (1.0 + 1e-12));
        let nl = fb_norm(&part, &a.scale(lambda), prm).aggregate;
        prop_assert!((nl - lambda.abs() * na).abs() <= 1e-12 * na * lambda.abs().max(1.0));
    }

    #[test]
    fn young_l1_product(sa in any::<u64>(), sb in any::<u64>()) {
        let lat = lattice(16);
        let a = scalar(&lat, sa, 3.9);
        let b = scalar(&lat, sb, 3.9);
        let ab = product(&a, &b);
        let bound = a.lp_norm(1.0) * b.lp_norm(1.0) / TWO_PI_CUBED;
        prop_assert!(ab.lp_norm(1.0) <= bound * (1.0 + 1e-10));
    }

    #[test]
    fn mixed_product_constant(sa in any::<u64>(), sb in any::<u64>()) {
        let lat = lattice(16);
        let part = DyadicPartition::covering(&lat);
        let a = scalar(&lat, sa, 3.9);
        let b = scalar(&lat, sb, 3.9);
        let ab = product(&a, &b);
        let p32 = BesovParams::new(0.0, 1.5, 1.0).unwrap();
        let p11 = BesovParams::new(0.0, 1.0, 1.0).unwrap();
        let k = fb_norm_scalar(&part, &ab, p32).aggregate * TWO_PI_CUBED
            / (fb_norm_scalar(&part, &a, p32).aggregate * fb_norm_scalar(&part, &b, p11).aggregate);
        prop_assert!(k <= 4.0, "observed constant {k}");
    }

    #[test]
    fn semigroup_property(seed in any::<u64>(), omega in -50.0f64..50.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let g = |t: f64, v: &SpectralVectorField| semigroup_apply(v, SemigroupParams::new(omega, t).unwrap()).unwrap();
        let direct = g(t1 + t2, &u);
        let composed = g(t2, &g(t1, &u));
        prop_assert!(direct.max_relative_difference(&composed) <= 1e-12);
    }

    #[test]
    fn modulus_identity(seed in any::<u64>(), omega in -100.0f64..100.0, t in 0.0f64..3.0) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let big = semigroup_apply(&u, SemigroupParams::new(omega, t).unwrap()).unwrap();
        for i in 1..lat.len() {
            let r = lat.radius(i);
            let expect = (-t * r * r).exp() * u.modulus(i);
            prop_assert!((big.modulus(i) - expect).abs() <= 1e-13 * expect.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn semigroup_commutes_with_projection(seed in any::<u64>(), omega in -20.0f64..20.0, t in 0.0f64..1.0) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let big = semigroup_apply(&u, SemigroupParams::new(omega, t).unwrap()).unwrap();
        prop_assert!(helmholtz_project(&big).max_relative_difference(&big) <= 1e-12);
        prop_assert!(big.hermitian_defect() <= 1e-14 * big.max_modulus());
    }

    #[test]
    fn reversing_rotation_is_a_reflection(seed in any::<u64>(), omega in -20.0f64..20.0, t in 0.0f64..1.0) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let minus = semigroup_apply(&u, SemigroupParams::new(-omega, t).unwrap()).unwrap();
        let plus = mirror_x1(&semigroup_apply(&mirror_x1(&u), SemigroupParams::new(omega, t).unwrap()).unwrap());
        prop_assert!(minus.max_relative_difference(&plus) <= 1e-12);
    }

    #[test]
    fn projection_idempotent_and_self_adjoint(sa in any::<u64>(), sb in any::<u64>()) {
        let lat = lattice(12);
        let a = field(&lat, sa, false);
        let b = field(&lat, sb, false);
        let pa = helmholtz_project(&a);
        prop_assert!(helmholtz_project(&pa).max_relative_difference(&pa) <= 1e-12);
        let lhs = inner_product(&pa, &b);
        let rhs = inner_product(&a, &helmholtz_project(&b));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * a.lp_norm(2.0) * b.lp_norm(2.0));
        prop_assert!(pa.divergence_ratio() <= 1e-14);
    }

    #[test]
    fn parseval_and_coriolis_work(seed in any::<u64>(), omega in -100.0f64..100.0) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let e = energy(&u);
        prop_assert!((e - energy_physical(&u.to_physical())).abs() <= 1e-10 * e);
        let w = inner_product(&coriolis_term(&u, omega), &u);
        prop_assert!(w.abs() <= 1e-12 * omega.abs().max(1.0) * 2.0 * e);
    }

    #[test]
    fn bernstein_factors(seed in any::<u64>(), p in prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(f64::INFINITY)]) {
        let lat = make_lattice([4.0 * TAU; 3], [24; 3]).unwrap();
        let part = DyadicPartition::covering(&lat);
        let u = random_field(&lat, &mut ChaCha8Rng::seed_from_u64(seed), 0.76, 2.6, true);
        for j in -1..=1 {
            let b = dyadic_block(&part, j, &u).unwrap();
            let base = b.lp_norm(p);
            if base == 0.0 {
                continue;
            }
            let radial = |s: i32| b.map(|_, x, v| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let m = if r > 0.0 { r.powi(s) } else { 0.0 };
                v.map(|z| z * m)
            }).lp_norm(p);
            let up = radial(1) / (2f64.powi(j) * base);
            let down = 2f64.powi(-j) * base / radial(-1);
            for f in [up, down] {
                prop_assert!((0.75 - 1e-12..=8.0 / 3.0 + 1e-12).contains(&f), "j = {j}: factor {f}");
            }
        }
    }

    #[test]
    fn transport_identities_on_solenoidal_fields(seed in any::<u64>()) {
        let lat = lattice(16);
        let u = field(&lat, seed, true);
        let r = transport_decomposition_check(&u).unwrap();
        prop_assert!(r.divergence_free);
        prop_assert!(r.max_residual() <= 1e-12, "{:?}", r.residual);
    }

    #[test]
    fn linear_step_is_the_semigroup(seed in any::<u64>(), omega in -20.0f64..20.0, h in 0.01f64..0.5) {
        let lat = lattice(12);
        let u = field(&lat, seed, true);
        let cfg = SolverConfig { omega, nonlinear: false, ..SolverConfig::default() };
        let mut solver = Solver::new(lat.clone(), cfg).unwrap();
        let next = solver.step(&SolverState { t: 0.0, u: u.clone(), linear: None }, h).unwrap();
        let exact = semigroup_apply(&u, SemigroupParams::new(omega, h).unwrap()).unwrap();
        prop_assert!(next.u.max_relative_difference(&exact) <= 1e-13);
    }
}
