//! Global-existence conditions for rotating Navier–Stokes data.
//!
//! The theorem-level condition is
//!
//! ```text
//! ∫₀^∞ ‖U·∇U‖_{FB^{-1}_{1,1}} dt · exp(C ‖u₀‖²_{FB^{-1}_{1,1}}) ≤ δ,
//! ```
//!
//! with `U(t) = T_Ω(t) u₀` the Stokes–Coriolis evolution, and the
//! corollary-level condition replaces the time integral by
//!
//! ```text
//! ‖u₀‖_{FB^{-1}_{1,1}} (‖u₀¹+u₀²‖ + ‖u₀³‖ + ‖∂₃u₀‖)_{FB^1_{3/2,1}}.
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{fb_norm, fb_norm_of_moduli, fb_norm_scalar, weighted_l1, BesovParams, DyadicPartition};
use crate::quadrature::{romberg, QuadratureOptions};
use crate::spectral::{nonlinear_term_conservative, FrequencyLattice, ScalarSpectrum, SpectralVectorField};
use crate::stokes_coriolis::{Propagator, SemigroupParams};

const TWO_PI_CUBED: f64 = 8.0 * std::f64::consts::PI * std::f64::consts::PI * std::f64::consts::PI;
/// `sup_ξ |ξ| Σ_j 2^{-j} ψ̂(2^{-j}|ξ|)` is at most this.
const WEIGHT_BOUND: f64 = 8.0 / 3.0;
/// Relative divergence above which input is treated as compressible.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    #[default]
    Certified,
    Omit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `‖·‖_{FB^{-1}_{1,1}}` evaluated on the lattice.
    #[default]
    Direct,
    /// Upper bound through `FB^0_{3/2,1}` via Hölder on each block.
    Embedding,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionParams {
    pub c: f64,
    pub delta: f64,
    pub t_max: f64,
    pub tail: TailMode,
    pub quadrature: QuadratureOptions,
}

impl Default for ConditionParams {
    fn default() -> Self {
        ConditionParams {
            c: 1.0,
            delta: 0.01,
            t_max: 8.0,
            tail: TailMode::Certified,
            quadrature: QuadratureOptions::default(),
        }
    }
}

impl ConditionParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("C", self.c), ("delta", self.delta), ("T_max", self.t_max)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportResidual {
    /// `max |rhs − lhs| / max |lhs|` per component.
    pub residual: [f64; 3],
    pub scale: f64,
    pub divergence_ratio: f64,
    /// The identities hold only for divergence-free `U`.
    pub divergence_free: bool,
}

impl TransportResidual {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().cloned().fold(0.0, f64::max)
    }
}

fn physical(s: &ScalarSpectrum) -> Vec<f64> {
    s.to_physical()
}

fn retained_spectrum(lattice: &Arc<FrequencyLattice>, values: &[f64]) -> Vec<Complex64> {
    let s = ScalarSpectrum::from_physical(lattice.clone(), values);
    let mut d = s.into_data();
    for (i, z) in d.iter_mut().enumerate() {
        if !lattice.is_retained(i) {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    d
}

/// Evaluates both sides of
///
/// ```text
/// U·∇U¹ = (U¹+U²)∂₁U¹ + U²∂₂(U¹+U²) + U²∂₃U³ + U³∂₃U¹
/// U·∇U² = (U¹+U²)∂₂U² + U¹∂₁(U¹+U²) + U¹∂₃U³ + U³∂₃U²
/// U·∇U³ = U¹∂₁U³ + U²∂₂U³ − U³(∂₁U¹ + ∂₂U²)
/// ```
///
/// pseudospectrally and reports the relative mismatch.
pub fn transport_decomposition_check(u: &SpectralVectorField) -> Result<TransportResidual> {
    let lat = u.lattice().clone();
    lat.check_dealiasable()?;
    let mut u = u.clone();
    u.dealias();
    let comp: Vec<ScalarSpectrum> = (0..3).map(|c| u.scalar(c)).collect();
    let v: Vec<Vec<f64>> = comp.iter().map(physical).collect();
    // d[i][j] = ∂_j U^{i}
    let d: Vec<Vec<Vec<f64>>> = comp
        .iter()
        .map(|c| (0..3).map(|j| physical(&c.derivative(j))).collect())
        .collect();
    let n = lat.len();
    let (u1, u2, u3) = (&v[0], &v[1], &v[2]);
    let lhs: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            (0..n)
                .into_par_iter()
                .map(|x| u1[x] * d[i][0][x] + u2[x] * d[i][1][x] + u3[x] * d[i][2][x])
                .collect()
        })
        .collect();
    let rhs: [Vec<f64>; 3] = [
        (0..n)
            .into_par_iter()
            .map(|x| {
                (u1[x] + u2[x]) * d[0][0][x]
                    + u2[x] * (d[0][1][x] + d[1][1][x])
                    + u2[x] * d[2][2][x]
                    + u3[x] * d[0][2][x]
            })
            .collect(),
        (0..n)
            .into_par_iter()
            .map(|x| {
                (u1[x] + u2[x]) * d[1][1][x]
                    + u1[x] * (d[0][0][x] + d[1][0][x])
                    + u1[x] * d[2][2][x]
                    + u3[x] * d[1][2][x]
            })
            .collect(),
        (0..n)
            .into_par_iter()
            .map(|x| u1[x] * d[2][0][x] + u2[x] * d[2][1][x] - u3[x] * (d[0][0][x] + d[1][1][x]))
            .collect(),
    ];
    let lhs_hat: Vec<Vec<Complex64>> = lhs.iter().map(|f| retained_spectrum(&lat, f)).collect();
    let rhs_hat: Vec<Vec<Complex64>> = rhs.iter().map(|f| retained_spectrum(&lat, f)).collect();
    let scale = lhs_hat
        .iter()
        .flat_map(|c| c.iter().map(|z| z.norm()))
        .fold(0.0, f64::max);
    let mut residual = [0.0; 3];
    for i in 0..3 {
        let diff = lhs_hat[i]
            .iter()
            .zip(&rhs_hat[i])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        residual[i] = if scale > 0.0 { diff / scale } else { diff };
    }
    let divergence_ratio = u.divergence_ratio();
    Ok(TransportResidual {
        residual,
        scale,
        divergence_ratio,
        divergence_free: divergence_ratio <= DIVERGENCE_TOLERANCE,
    })
}

/// Precomputed lattice data for repeated evaluation of
/// `t ↦ ‖U(t)·∇U(t)‖_{FB^{-1}_{1,1}}`.
pub struct TransportIntegrand {
    u0: SpectralVectorField,
    omega: f64,
    partition: DyadicPartition,
    weights: Vec<f64>,
    /// `(volξ · #{ξ : ψ_j(ξ) > 0})^{1/3}` per block.
    measure_cbrt: Vec<f64>,
}

impl TransportIntegrand {
    pub fn new(u0: &SpectralVectorField, omega: f64) -> Result<Self> {
        let lat = u0.lattice().clone();
        lat.check_dealiasable()?;
        if u0.max_outside_dealiased() > 0.0 {
            return Err(Error::NotBandLimited);
        }
        if u0.divergence_ratio() > DIVERGENCE_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "initial datum is not divergence-free (ratio {:e})",
                u0.divergence_ratio()
            )));
        }
        let partition = DyadicPartition::covering(&lat);
        let weights = partition.lattice_weights(&lat, -1.0);
        let nb = partition.len();
        let counts: Vec<usize> = (1..lat.len())
            .into_par_iter()
            .filter(|&i| lat.is_retained(i))
            .fold(
                || vec![0usize; nb],
                |mut acc, i| {
                    let rho = lat.radius(i);
                    for j in DyadicPartition::active_blocks(rho) {
                        if partition.blocks().contains(&j) && partition.weight(j, rho) > 0.0 {
                            acc[(j - partition.j_min()) as usize] += 1;
                        }
                    }
                    acc
                },
            )
            .reduce(|| vec![0usize; nb], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
        let cell = lat.cell_volume();
        let measure_cbrt = counts.iter().map(|&c| (c as f64 * cell).cbrt()).collect();
        Ok(TransportIntegrand {
            u0: u0.clone(),
            omega,
            partition,
            weights,
            measure_cbrt,
        })
    }

    pub fn partition(&self) -> DyadicPartition {
        self.partition
    }

    /// Fourier coefficients of `U(t)·∇U(t)`.
    pub fn transport_term(&self, t: f64) -> Result<SpectralVectorField> {
        let prop = Propagator::new(self.u0.lattice().clone(), SemigroupParams::new(self.omega, t)?);
        let u = prop.apply(&self.u0);
        Ok(nonlinear_term_conservative(&u)?.0)
    }

    pub fn evaluate(&self, t: f64, route: Route) -> Result<f64> {
        let g = self.transport_term(t)?;
        let lat = g.lattice();
        Ok(match route {
            Route::Direct => weighted_l1(lat, &self.weights, &g.moduli()),
            Route::Embedding => {
                let series = fb_norm_of_moduli(&self.partition, lat, &g.moduli(), BesovParams { s: -1.0, p: 1.5, r: 1.0 });
                series
                    .blocks
                    .iter()
                    .zip(&self.measure_cbrt)
                    .map(|((_, b), m)| b * m)
                    .sum()
            }
        })
    }

    /// Bound on `∫_{T}^∞` of the integrand, from `|Û(t)| ≤ e^{−ρ₀²t}|û₀|`
    /// with `ρ₀` the inner support radius of `û₀`.
    pub fn tail_bound(&self, t_max: f64, route: Route) -> f64 {
        let lat = self.u0.lattice();
        let m = self.u0.moduli();
        let rho0 = (1..lat.len())
            .filter(|&i| m[i] > 0.0)
            .map(|i| lat.radius(i))
            .fold(f64::INFINITY, f64::min);
        if !rho0.is_finite() {
            return 0.0;
        }
        let l1 = self.u0.lp_norm(1.0);
        let decay = (-2.0 * rho0 * rho0 * t_max).exp() / (2.0 * rho0 * rho0);
        match route {
            Route::Direct => WEIGHT_BOUND * l1 * l1 / TWO_PI_CUBED * decay,
            Route::Embedding => {
                // ‖ψ_j ĝ‖_{3/2} ≤ ‖ψ_j ĝ‖_∞^{1/3} ‖ψ_j ĝ‖_1^{2/3}, |ĝ(ξ)| ≤ |ξ|(2π)⁻³‖Û‖₂²,
                // ‖ψ_j ĝ‖_1 ≤ (8/3)2^j (2π)⁻³‖Û‖₁²
                let l2 = self.u0.lp_norm(2.0);
                let meas: f64 = self.measure_cbrt.iter().sum();
                WEIGHT_BOUND * meas * l2.powf(2.0 / 3.0) * l1.powf(4.0 / 3.0) / TWO_PI_CUBED * decay
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub route: Route,
    pub value: f64,
    pub tail: f64,
    pub t_max: f64,
    pub evaluations: usize,
    pub converged: bool,
    pub error_estimate: f64,
}

impl IntegralReport {
    pub fn total(&self) -> f64 {
        self.value + self.tail
    }
}

/// `∫₀^{T_max} ‖U·∇U‖_{FB^{-1}_{1,1}} dt` plus the certified tail.
pub fn nonlinear_integral(u0: &SpectralVectorField, omega: f64, prm: &ConditionParams, route: Route) -> Result<IntegralReport> {
    prm.validate()?;
    let integrand = TransportIntegrand::new(u0, omega)?;
    integral_with(&integrand, prm, route)
}

pub fn integral_with(integrand: &TransportIntegrand, prm: &ConditionParams, route: Route) -> Result<IntegralReport> {
    let q = romberg(0.0, prm.t_max, |t| integrand.evaluate(t, route), prm.quadrature)?;
    let tail = match prm.tail {
        TailMode::Certified => integrand.tail_bound(prm.t_max, route),
        TailMode::Omit => 0.0,
    };
    Ok(IntegralReport {
        route,
        value: q.value,
        tail,
        t_max: prm.t_max,
        evaluations: q.evaluations,
        converged: q.converged,
        error_estimate: q.error_estimate,
    })
}

/// Norms entering the corollary-level condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorollaryNorms {
    /// `‖u₀‖_{FB^{-1}_{1,1}}`
    pub fb_m1_11: f64,
    /// `‖u₀¹ + u₀²‖_{FB^1_{3/2,1}}`
    pub u12_fb1_32: f64,
    /// `‖u₀³‖_{FB^1_{3/2,1}}`
    pub u3_fb1_32: f64,
    /// `‖∂₃u₀‖_{FB^1_{3/2,1}}`
    pub d3u_fb1_32: f64,
}

impl CorollaryNorms {
    pub fn group(&self) -> f64 {
        self.u12_fb1_32 + self.u3_fb1_32 + self.d3u_fb1_32
    }

    pub fn product(&self) -> f64 {
        self.fb_m1_11 * self.group()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Theorem,
    Corollary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub c: f64,
    pub delta: f64,
    pub omega: Option<f64>,
    pub fb_m1_11: f64,
    pub exp_factor: f64,
    pub integral: Option<IntegralReport>,
    pub norms: Option<CorollaryNorms>,
    pub lhs: f64,
    pub pass: bool,
}

fn exp_factor(c: f64, norm: f64) -> f64 {
    (c * norm * norm).exp()
}

pub fn fb_m1_11(u0: &SpectralVectorField) -> f64 {
    let part = DyadicPartition::covering(u0.lattice());
    fb_norm(&part, u0, BesovParams { s: -1.0, p: 1.0, r: 1.0 }).aggregate
}

/// Theorem-level condition on a lattice datum.
pub fn theorem_condition(u0: &SpectralVectorField, omega: f64, prm: &ConditionParams, route: Route) -> Result<ConditionReport> {
    let integral = nonlinear_integral(u0, omega, prm, route)?;
    let norm = fb_m1_11(u0);
    let factor = exp_factor(prm.c, norm);
    let lhs = integral.total() * factor;
    Ok(ConditionReport {
        kind: ConditionKind::Theorem,
        c: prm.c,
        delta: prm.delta,
        omega: Some(omega),
        fb_m1_11: norm,
        exp_factor: factor,
        integral: Some(integral),
        norms: None,
        lhs,
        pass: lhs <= prm.delta,
    })
}

/// Rejects data with Fourier support reaching inside the unit ball.
pub fn check_unit_support(u0: &SpectralVectorField) -> Result<()> {
    let lat = u0.lattice();
    for i in 0..lat.len() {
        if u0.modulus(i) > 0.0 && lat.radius(i) < 1.0 {
            return Err(Error::SupportViolation(lat.wavevector(i)));
        }
    }
    Ok(())
}

/// The corollary's norms of a lattice datum.
pub fn corollary_norms(u0: &SpectralVectorField) -> Result<CorollaryNorms> {
    check_unit_support(u0)?;
    let lat = u0.lattice().clone();
    let part = DyadicPartition::covering(&lat);
    let p32 = BesovParams { s: 1.0, p: 1.5, r: 1.0 };
    let sum: Vec<Complex64> = u0.component(0).iter().zip(u0.component(1)).map(|(a, b)| a + b).collect();
    let sum = ScalarSpectrum::from_vec(lat.clone(), sum)?;
    let d3 = u0.map(|_, x, v| v.map(|z| z * Complex64::new(0.0, x[2])));
    Ok(CorollaryNorms {
        fb_m1_11: fb_norm(&part, u0, BesovParams { s: -1.0, p: 1.0, r: 1.0 }).aggregate,
        u12_fb1_32: fb_norm_scalar(&part, &sum, p32).aggregate,
        u3_fb1_32: fb_norm_scalar(&part, &u0.scalar(2), p32).aggregate,
        d3u_fb1_32: fb_norm(&part, &d3, p32).aggregate,
    })
}

pub fn corollary_from_norms(norms: CorollaryNorms, prm: &ConditionParams) -> Result<ConditionReport> {
    prm.validate()?;
    let factor = exp_factor(prm.c, norms.fb_m1_11);
    let lhs = norms.product() * factor;
    Ok(ConditionReport {
        kind: ConditionKind::Corollary,
        c: prm.c,
        delta: prm.delta,
        omega: None,
        fb_m1_11: norms.fb_m1_11,
        exp_factor: factor,
        integral: None,
        norms: Some(norms),
        lhs,
        pass: lhs <= prm.delta,
    })
}

/// Corollary-level condition on a lattice datum.
pub fn corollary_condition(u0: &SpectralVectorField, prm: &ConditionParams) -> Result<ConditionReport> {
    corollary_from_norms(corollary_norms(u0)?, prm)
}

/// Observed constant in `∫‖U·∇U‖ ≤ K ‖u₀‖_{FB^{-1}_{1,1}} (norm group)`.
pub fn observed_constant(integral: &IntegralReport, norms: &CorollaryNorms) -> f64 {
    let p = norms.product();
    if p > 0.0 {
        integral.total() / p
    } else {
        0.0
    }
}

/// Corollary-level condition along an ε-sweep, compared with
/// `C ε^{1/3} (log log 1/ε) exp(C κ log log 1/ε)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRow {
    pub eps: f64,
    pub loglog: f64,
    pub lhs: f64,
    /// Reference with `κ = 1`.
    pub reference_literal: f64,
    /// Reference with the fitted `κ`.
    pub reference_fitted: f64,
    pub ratio_literal: f64,
    pub ratio_fitted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub c: f64,
    pub delta: f64,
    /// Geometric mean of `‖u₀‖²_{FB^{-1}_{1,1}} / log log 1/ε` over the sweep.
    pub kappa: f64,
    pub rows: Vec<ShapeRow>,
    /// `max ratio / min ratio` across the sweep.
    pub spread_literal: f64,
    pub spread_fitted: f64,
}

impl ShapeReport {
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("eps,loglog,lhs,reference_literal,reference_fitted,ratio_literal,ratio_fitted\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.eps, r.loglog, r.lhs, r.reference_literal, r.reference_fitted, r.ratio_literal, r.ratio_fitted
            );
        }
        out
    }
}

fn spread(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = v.clone().fold(0.0, f64::max);
    let lo = v.fold(f64::INFINITY, f64::min);
    hi / lo
}

pub fn condition_shape(table: &crate::large_data::ScalingTable, prm: &ConditionParams) -> Result<ShapeReport> {
    prm.validate()?;
    if table.rows.is_empty() {
        return Err(Error::EmptyEpsilonList);
    }
    let n = table.rows.len() as f64;
    let kappa = (table.rows.iter().map(|r| (r.fb_m1_11 * r.fb_m1_11 / r.loglog).ln()).sum::<f64>() / n).exp();
    let c = prm.c;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let norms = CorollaryNorms {
                fb_m1_11: r.fb_m1_11,
                u12_fb1_32: r.u12_fb1_32,
                u3_fb1_32: r.u3_fb1_32,
                d3u_fb1_32: r.d3u_fb1_32,
            };
            let lhs = corollary_from_norms(norms, prm)?.lhs;
            let base = c * r.eps.cbrt() * r.loglog;
            let lit = base * (c * r.loglog).exp();
            let fit = base * (c * kappa * r.loglog).exp();
            Ok(ShapeRow {
                eps: r.eps,
                loglog: r.loglog,
                lhs,
                reference_literal: lit,
                reference_fitted: fit,
                ratio_literal: lhs / lit,
                ratio_fitted: lhs / fit,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ShapeReport {
        c,
        delta: prm.delta,
        kappa,
        spread_literal: spread(rows.iter().map(|r| r.ratio_literal)),
        spread_fitted: spread(rows.iter().map(|r| r.ratio_fitted)),
        rows,
    })
}
