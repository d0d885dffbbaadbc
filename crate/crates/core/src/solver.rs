//! Pseudospectral integration of the rotating Navier–Stokes equations
//!
//! ```text
//! ∂ₜu − Δu + Ω e₃×u + u·∇u + ∇p = 0,   div u = 0
//! ```
//!
//! The linear part is carried exactly by the Stokes–Coriolis propagator
//! `E(h) = T_Ω(h)`; the projected nonlinearity `N(u) = −ℙ(u·∇u)` is
//! advanced by the integrating-factor (Lawson) form of classical RK4:
//!
//! ```text
//! a = N(uₙ)
//! b = N(E(h/2)uₙ + h/2 E(h/2)a)
//! c = N(E(h/2)uₙ + h/2 b)
//! d = N(E(h)uₙ + h E(h/2)c)
//! uₙ₊₁ = E(h)uₙ + h/6 (E(h)a + 2E(h/2)(b + c) + d)
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{trapezoid, weighted_l1, DyadicPartition};
use crate::spectral::{energy, helmholtz_project, nonlinear_term, nonlinear_term_conservative, Advection, FrequencyLattice, SpectralVectorField};
use crate::stokes_coriolis::{Propagator, SemigroupParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub omega: f64,
    pub t_final: f64,
    pub dt0: f64,
    /// CFL safety factor in `(0, 1]`.
    pub cfl: f64,
    /// Times at which snapshots are emitted; the stepper lands on them.
    pub snapshot_times: Vec<f64>,
    pub dealias: bool,
    pub nonlinear: bool,
    /// Evolve `U(t) = T_Ω(t)u₀` alongside and record `v = u − U`.
    pub track_linear: bool,
    pub advection: Advection,
    /// Abort when `‖û‖_{L¹}` exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            omega: 1.0,
            t_final: 1.0,
            dt0: 0.01,
            cfl: 0.5,
            snapshot_times: Vec::new(),
            dealias: true,
            nonlinear: true,
            track_linear: false,
            advection: Advection::Conservative,
            blowup_factor: 1e6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("T must be positive, got {}", self.t_final)));
        }
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt0 must be positive, got {}", self.dt0)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::InvalidParameter(format!("CFL factor must lie in (0, 1], got {}", self.cfl)));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter("Ω must be finite".into()));
        }
        if !self.dealias {
            return Err(Error::InvalidParameter("only the 2/3-rule dealiased product is supported".into()));
        }
        if let Some(index) = self.snapshot_times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::UnorderedTimes { index: index + 1 });
        }
        if self.snapshot_times.iter().any(|&t| !(t >= 0.0 && t <= self.t_final)) {
            return Err(Error::InvalidParameter("snapshot times must lie in [0, T]".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::InvalidParameter("blow-up factor must exceed 1".into()));
        }
        Ok(())
    }
}

/// `count` times from `t_first` to `t_last`, geometrically spaced, with
/// `t = 0` prepended.
pub fn geometric_schedule(t_first: f64, t_last: f64, count: usize) -> Result<Vec<f64>> {
    if !(t_first > 0.0 && t_last >= t_first) || count == 0 {
        return Err(Error::InvalidParameter("geometric schedule needs 0 < t_first ≤ t_last, count ≥ 1".into()));
    }
    let mut out = vec![0.0];
    if count == 1 {
        out.push(t_last);
        return Ok(out);
    }
    let ratio = (t_last / t_first).powf(1.0 / (count - 1) as f64);
    for k in 0..count {
        let t = if k + 1 == count { t_last } else { t_first * ratio.powi(k as i32) };
        out.push(t);
    }
    out.dedup_by(|a, b| *a <= *b);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub u: SpectralVectorField,
    pub linear: Option<SpectralVectorField>,
}

/// One row of the run time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    pub fb_m1_11: f64,
    pub fb_0_11: f64,
    pub fb_1_11: f64,
    pub l1: f64,
    pub divergence: f64,
    pub max_speed: f64,
    pub v_fb_m1_11: Option<f64>,
    pub v_fb_1_11: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupFinding {
    pub t: f64,
    pub l1: f64,
    pub initial_l1: f64,
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub u: SpectralVectorField,
    pub linear: Option<SpectralVectorField>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub config: SolverConfig,
    pub rows: Vec<Diagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    pub rejected_steps: usize,
    pub blowup: Option<BlowupFinding>,
    pub final_state: SolverState,
}

impl RunReport {
    pub const HEADER: &'static str =
        "t,dt,energy,fb_m1_11,fb_0_11,fb_1_11,l1,divergence,max_speed,v_fb_m1_11,v_fb_1_11,v_sup_fb_m1_11,v_int_fb_1_11,bootstrap_sum";

    /// Time series with running bootstrap sums when `v` is tracked.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::HEADER);
        let boot = bootstrap_series(&self.rows).ok();
        for (k, r) in self.rows.iter().enumerate() {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            let (sup, int, sum) = match &boot {
                Some(b) => (Some(b.sup[k]), Some(b.int[k]), Some(b.sup[k] + b.int[k])),
                None => (None, None, None),
            };
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{},{},{}",
                r.t,
                r.dt,
                r.energy,
                r.fb_m1_11,
                r.fb_0_11,
                r.fb_1_11,
                r.l1,
                r.divergence,
                r.max_speed,
                opt(r.v_fb_m1_11),
                opt(r.v_fb_1_11),
                opt(sup),
                opt(int),
                opt(sum)
            );
        }
        out
    }

    pub fn energy_nonincreasing(&self, rel_per_unit_time: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].energy <= w[0].energy * (1.0 + rel_per_unit_time * (w[1].t - w[0].t)))
    }

    pub fn max_divergence(&self) -> f64 {
        self.rows.iter().map(|r| r.divergence).fold(0.0, f64::max)
    }
}

struct Weights {
    m1: Vec<f64>,
    zero: Vec<f64>,
    p1: Vec<f64>,
}

struct StepCache {
    h: f64,
    half: Propagator,
    full: Propagator,
}

pub struct Solver {
    lattice: Arc<FrequencyLattice>,
    config: SolverConfig,
    weights: Weights,
    cache: Option<StepCache>,
    min_dx: f64,
}

impl Solver {
    pub fn new(lattice: Arc<FrequencyLattice>, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        lattice.check_dealiasable()?;
        let part = DyadicPartition::covering(&lattice);
        let weights = Weights {
            m1: part.lattice_weights(&lattice, -1.0),
            zero: part.lattice_weights(&lattice, 0.0),
            p1: part.lattice_weights(&lattice, 1.0),
        };
        let min_dx = lattice.grid_spacing().iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Solver {
            lattice,
            config,
            weights,
            cache: None,
            min_dx,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    fn propagators(&mut self, h: f64) -> Result<&StepCache> {
        if self.cache.as_ref().map(|c| c.h) != Some(h) {
            let om = self.config.omega;
            self.cache = Some(StepCache {
                h,
                half: Propagator::new(self.lattice.clone(), SemigroupParams::new(om, 0.5 * h)?),
                full: Propagator::new(self.lattice.clone(), SemigroupParams::new(om, h)?),
            });
        }
        Ok(self.cache.as_ref().expect("just set"))
    }

    /// `(−ℙ(u·∇u), max |u|)`.
    fn nonlinear(&self, u: &SpectralVectorField) -> Result<(SpectralVectorField, f64)> {
        if !self.config.nonlinear {
            return Ok((SpectralVectorField::zeros(self.lattice.clone()), u.to_physical().max_speed()));
        }
        let (n, speed) = match self.config.advection {
            Advection::Conservative => nonlinear_term_conservative(u)?,
            Advection::Advective => (nonlinear_term(u)?, u.to_physical().max_speed()),
        };
        Ok((helmholtz_project(&n).scale(-1.0), speed))
    }

    pub fn cfl_limit(&self, max_speed: f64) -> f64 {
        if max_speed > 0.0 {
            self.config.cfl * self.min_dx / max_speed
        } else {
            f64::INFINITY
        }
    }

    /// One IF-RK4 step of size `h`. The linear companion, when present, is
    /// advanced exactly.
    pub fn step(&mut self, state: &SolverState, h: f64) -> Result<SolverState> {
        let (a, speed) = if self.config.nonlinear {
            self.nonlinear(&state.u)?
        } else {
            (SpectralVectorField::zeros(self.lattice.clone()), 0.0)
        };
        self.step_with(state, h, a, speed)
    }

    fn step_with(&mut self, state: &SolverState, h: f64, a: SpectralVectorField, speed: f64) -> Result<SolverState> {
        let limit = self.cfl_limit(speed);
        if self.config.nonlinear && h > limit {
            return Err(Error::CflViolation { dt: h, limit });
        }
        let nonlinear = self.config.nonlinear;
        self.propagators(h)?;
        let cache = self.cache.take().expect("propagators prepared");
        let un = &state.u;
        let e_full_u = cache.full.apply(un);
        let next = if nonlinear {
            let e_half_u = cache.half.apply(un);
            let u1 = e_half_u.axpy(0.5 * h, &cache.half.apply(&a))?;
            let (b, _) = self.nonlinear(&u1)?;
            let u2 = e_half_u.axpy(0.5 * h, &b)?;
            let (c, _) = self.nonlinear(&u2)?;
            let u3 = e_full_u.axpy(h, &cache.half.apply(&c))?;
            let (d, _) = self.nonlinear(&u3)?;
            let bc = b.axpy(1.0, &c)?;
            let mut acc = cache.full.apply(&a);
            acc.add_scaled_in_place(2.0, &cache.half.apply(&bc));
            acc.add_scaled_in_place(1.0, &d);
            e_full_u.axpy(h / 6.0, &acc)?
        } else {
            e_full_u
        };
        let linear = state.linear.as_ref().map(|l| cache.full.apply(l));
        self.cache = Some(cache);
        Ok(SolverState {
            t: state.t + h,
            u: next,
            linear,
        })
    }

    fn diagnostics(&self, state: &SolverState, dt: f64, max_speed: f64) -> Diagnostics {
        let m = state.u.moduli();
        let lat = &self.lattice;
        let (v_m1, v_p1) = match &state.linear {
            Some(l) => {
                let vm = state.u.sub(l).expect("same lattice").moduli();
                (Some(weighted_l1(lat, &self.weights.m1, &vm)), Some(weighted_l1(lat, &self.weights.p1, &vm)))
            }
            None => (None, None),
        };
        Diagnostics {
            t: state.t,
            dt,
            energy: energy(&state.u),
            fb_m1_11: weighted_l1(lat, &self.weights.m1, &m),
            fb_0_11: weighted_l1(lat, &self.weights.zero, &m),
            fb_1_11: weighted_l1(lat, &self.weights.p1, &m),
            l1: state.u.lp_norm(1.0),
            divergence: state.u.divergence_ratio(),
            max_speed,
            v_fb_m1_11: v_m1,
            v_fb_1_11: v_p1,
        }
    }

    /// Integrates to `T`, calling `sink` at every scheduled snapshot time.
    pub fn solve_with<F>(&mut self, u0: &SpectralVectorField, mut sink: F) -> Result<RunReport>
    where
        F: FnMut(&Snapshot) -> Result<()>,
    {
        if **u0.lattice() != *self.lattice {
            return Err(Error::LatticeMismatch);
        }
        if u0.max_outside_dealiased() > 0.0 {
            return Err(Error::NotBandLimited);
        }
        let div = u0.divergence_ratio();
        if div > 1e-10 {
            return Err(Error::InvalidParameter(format!("initial datum is not divergence-free (ratio {div:e})")));
        }
        let cfg = self.config.clone();
        let mut state = SolverState {
            t: 0.0,
            u: u0.clone(),
            linear: cfg.track_linear.then(|| u0.clone()),
        };
        let mut pending: Vec<f64> = cfg.snapshot_times.clone();
        pending.reverse();
        let emit = |state: &SolverState, pending: &mut Vec<f64>, sink: &mut F| -> Result<()> {
            while let Some(&next) = pending.last() {
                if (next - state.t).abs() <= 1e-12 * cfg.t_final.max(1.0) {
                    sink(&Snapshot {
                        t: state.t,
                        u: state.u.clone(),
                        linear: state.linear.clone(),
                    })?;
                    pending.pop();
                } else {
                    break;
                }
            }
            Ok(())
        };
        let (mut a, mut speed) = self.nonlinear(&state.u)?;
        let initial_l1 = state.u.lp_norm(1.0);
        let mut rows = vec![self.diagnostics(&state, 0.0, speed)];
        emit(&state, &mut pending, &mut sink)?;
        let mut dt = cfg.dt0;
        let mut steps = 0;
        let mut rejected = 0;
        let mut blowup = None;
        let tol = 1e-12 * cfg.t_final.max(1.0);
        while cfg.t_final - state.t > tol {
            let target = pending.last().copied().filter(|&t| t > state.t + tol).unwrap_or(cfg.t_final);
            let mut h = dt.min(target - state.t);
            if target - state.t - h <= tol {
                h = target - state.t;
            }
            if cfg.nonlinear {
                let limit = self.cfl_limit(speed);
                if h > limit {
                    while dt > limit {
                        dt *= 0.5;
                        rejected += 1;
                    }
                    continue;
                }
            }
            let mut next = self.step_with(&state, h, a, speed)?;
            if (target - next.t).abs() <= tol {
                next.t = target;
            }
            steps += 1;
            state = next;
            let probe = state.u.max_modulus();
            if !probe.is_finite() {
                return Err(Error::NonFinite(probe));
            }
            let (na, ns) = self.nonlinear(&state.u)?;
            a = na;
            speed = ns;
            let row = self.diagnostics(&state, h, speed);
            let l1 = row.l1;
            rows.push(row);
            emit(&state, &mut pending, &mut sink)?;
            if l1 > cfg.blowup_factor * initial_l1 {
                blowup = Some(BlowupFinding { t: state.t, l1, initial_l1 });
                break;
            }
        }
        Ok(RunReport {
            config: cfg,
            rows,
            snapshots: Vec::new(),
            steps,
            rejected_steps: rejected,
            blowup,
            final_state: state,
        })
    }

    /// Integrates to `T`, keeping every scheduled snapshot in memory.
    pub fn solve(&mut self, u0: &SpectralVectorField) -> Result<RunReport> {
        let mut snaps = Vec::new();
        let mut report = self.solve_with(u0, |s| {
            snaps.push(s.clone());
            Ok(())
        })?;
        report.snapshots = snaps;
        Ok(report)
    }
}

pub fn solve(u0: &SpectralVectorField, config: SolverConfig) -> Result<RunReport> {
    Solver::new(u0.lattice().clone(), config)?.solve(u0)
}

/// Running `L^∞_t(FB^{-1}_{1,1})` and `L¹_t(FB^1_{1,1})` norms of `v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSeries {
    pub times: Vec<f64>,
    pub sup: Vec<f64>,
    pub int: Vec<f64>,
}

pub fn bootstrap_series(rows: &[Diagnostics]) -> Result<BootstrapSeries> {
    let mut times = Vec::with_capacity(rows.len());
    let mut m1 = Vec::with_capacity(rows.len());
    let mut p1 = Vec::with_capacity(rows.len());
    for r in rows {
        match (r.v_fb_m1_11, r.v_fb_1_11) {
            (Some(a), Some(b)) => {
                times.push(r.t);
                m1.push(a);
                p1.push(b);
            }
            _ => return Err(Error::MissingLinearCompanion),
        }
    }
    bootstrap_from_series(&times, &m1, &p1)
}

pub fn bootstrap_from_series(times: &[f64], v_m1: &[f64], v_p1: &[f64]) -> Result<BootstrapSeries> {
    if times.len() != v_m1.len() || times.len() != v_p1.len() {
        return Err(Error::ScheduleMismatch);
    }
    if times.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if let Some(index) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::UnorderedTimes { index: index + 1 });
    }
    let mut sup = Vec::with_capacity(times.len());
    let mut int = Vec::with_capacity(times.len());
    let mut s: f64 = 0.0;
    for k in 0..times.len() {
        s = s.max(v_m1[k]);
        sup.push(s);
        let i = if k == 0 { 0.0 } else { int[k - 1] + trapezoid(&times[k - 1..=k], &v_p1[k - 1..=k]) };
        int.push(i);
    }
    Ok(BootstrapSeries {
        times: times.to_vec(),
        sup,
        int,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub eta: f64,
    pub t_final: f64,
    pub series: BootstrapSeries,
    /// Exit time from `{sum ≤ η}`, or `T` if never left.
    pub gamma: f64,
    pub gamma_equals_t: bool,
    /// Whether the sum stays below `η/2` up to `Γ`.
    pub margin_observed: bool,
    pub max_sum: f64,
}

impl BootstrapReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,v_sup_fb_m1_11,v_int_fb_1_11,bootstrap_sum\n");
        let s = &self.series;
        for k in 0..s.times.len() {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", s.times[k], s.sup[k], s.int[k], s.sup[k] + s.int[k]);
        }
        out
    }
}

/// Exit time and margin for a threshold `η`.
pub fn monitor_series(series: BootstrapSeries, eta: f64) -> BootstrapReport {
    let t_final = *series.times.last().expect("nonempty series");
    let sums: Vec<f64> = series.sup.iter().zip(&series.int).map(|(a, b)| a + b).collect();
    let max_sum = sums.iter().cloned().fold(0.0, f64::max);
    let gamma = if eta <= 0.0 {
        0.0
    } else {
        match sums.iter().position(|&s| s > eta) {
            None => t_final,
            Some(0) => 0.0,
            Some(k) => {
                let (t0, t1) = (series.times[k - 1], series.times[k]);
                let (s0, s1) = (sums[k - 1], sums[k]);
                t0 + (eta - s0) / (s1 - s0) * (t1 - t0)
            }
        }
    };
    let margin_observed = eta > 0.0
        && series
            .times
            .iter()
            .zip(&sums)
            .filter(|(t, _)| **t <= gamma)
            .all(|(_, s)| *s <= 0.5 * eta);
    BootstrapReport {
        eta,
        t_final,
        series,
        gamma,
        gamma_equals_t: gamma == t_final,
        margin_observed,
        max_sum,
    }
}

pub fn perturbation_monitor(run: &RunReport, eta: f64) -> Result<BootstrapReport> {
    Ok(monitor_series(bootstrap_series(&run.rows)?, eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use crate::spectral::make_lattice;
    use crate::stokes_coriolis::semigroup_apply;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn lattice(n: usize) -> Arc<FrequencyLattice> {
        make_lattice([TAU; 3], [n; 3]).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        for bad in [
            SolverConfig { cfl: 1.5, ..Default::default() },
            SolverConfig { dt0: 0.0, ..Default::default() },
            SolverConfig { t_final: -1.0, ..Default::default() },
            SolverConfig { snapshot_times: vec![0.5, 0.2], ..Default::default() },
            SolverConfig { dealias: false, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn schedule_is_geometric() {
        let s = geometric_schedule(0.01, 10.0, 4).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s[0], 0.0);
        assert!((s[2] / s[1] - 10.0).abs() < 1e-9);
        assert_eq!(*s.last().unwrap(), 10.0);
    }

    #[test]
    fn linear_step_is_exact() {
        let lat = lattice(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u0 = random_field(&lat, &mut rng, 1.0, 4.0, true);
        let cfg = SolverConfig { nonlinear: false, omega: 3.0, ..Default::default() };
        let mut solver = Solver::new(lat, cfg).unwrap();
        let s0 = SolverState { t: 0.0, u: u0.clone(), linear: None };
        let s1 = solver.step(&s0, 0.37).unwrap();
        let exact = semigroup_apply(&u0, SemigroupParams::new(3.0, 0.37).unwrap()).unwrap();
        assert!(s1.u.max_relative_difference(&exact) < 1e-13);
    }

    #[test]
    fn shear_mode_decays_exactly() {
        let lat = lattice(16);
        let mut u0 = SpectralVectorField::zeros(lat.clone());
        let i = lat.index_of_mode([0, 0, 1]).unwrap();
        u0.set(i, [Complex64::new(0.0, -1.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]);
        let u0 = u0.hermitian_part().scale(1e3);
        let cfg = SolverConfig { omega: 0.0, dt0: 0.05, ..Default::default() };
        let run = solve(&u0, cfg).unwrap();
        let expected = u0.scale((-1.0f64).exp());
        assert!(run.final_state.u.max_relative_difference(&expected) < 1e-10);
    }

    #[test]
    fn zero_stays_zero() {
        let lat = lattice(8);
        let run = solve(&SpectralVectorField::zeros(lat), SolverConfig::default()).unwrap();
        assert!(run.final_state.u.is_zero());
    }

    #[test]
    fn lands_on_snapshot_times() {
        let lat = lattice(8);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u0 = random_field(&lat, &mut rng, 1.0, 2.0, true).scale(0.1);
        let cfg = SolverConfig {
            dt0: 0.03,
            snapshot_times: vec![0.0, 0.1, 0.25, 1.0],
            track_linear: true,
            ..Default::default()
        };
        let run = solve(&u0, cfg).unwrap();
        let ts: Vec<f64> = run.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.1, 0.25, 1.0]);
        assert!(run.snapshots.iter().all(|s| s.linear.is_some()));
    }

    #[test]
    fn cfl_violation_rejected_by_step() {
        let lat = lattice(8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u0 = random_field(&lat, &mut rng, 1.0, 2.0, true).scale(1e4);
        let mut solver = Solver::new(lat, SolverConfig::default()).unwrap();
        let s0 = SolverState { t: 0.0, u: u0, linear: None };
        assert!(matches!(solver.step(&s0, 1.0), Err(Error::CflViolation { .. })));
    }

    #[test]
    fn solve_halves_dt_under_cfl() {
        let lat = lattice(8);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u0 = random_field(&lat, &mut rng, 1.0, 2.0, true).scale(5e3);
        let cfg = SolverConfig { dt0: 0.5, t_final: 0.05, ..Default::default() };
        let run = solve(&u0, cfg).unwrap();
        assert!(run.rejected_steps > 0);
    }

    #[test]
    fn monitor_threshold_cases() {
        let series = bootstrap_from_series(&[0.0, 1.0, 2.0], &[0.0, 0.1, 0.3], &[0.0, 0.0, 0.0]).unwrap();
        let r = monitor_series(series.clone(), 0.2);
        assert!((r.gamma - 1.5).abs() < 1e-12);
        assert!(!r.gamma_equals_t);
        let r = monitor_series(series.clone(), 1.0);
        assert_eq!(r.gamma, 2.0);
        assert!(r.margin_observed);
        let r = monitor_series(series, 0.0);
        assert_eq!(r.gamma, 0.0);
        assert!(bootstrap_from_series(&[0.0, 1.0], &[0.0], &[0.0, 0.0]).is_err());
    }
}
