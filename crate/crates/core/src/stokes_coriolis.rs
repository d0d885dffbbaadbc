//! Exact Stokes–Coriolis semigroup.
//!
//! For divergence-free data each mode decays like the heat kernel and
//! rotates about `ξ/|ξ|` by the angle `θ = Ω t ξ₃/|ξ|`:
//!
//! ```text
//! Û(t, ξ) = e^{−t|ξ|²} [ cos θ û₀(ξ) − sin θ (ξ/|ξ|) × û₀(ξ) ].
//! ```

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{fb_norm, BesovParams, DyadicPartition, NormSeries};
use crate::spectral::{FrequencyLattice, SpectralVectorField};

/// Violation ratios up to this value count as passing.
pub const BOUND_TOLERANCE: f64 = 1.0 + 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemigroupParams {
    pub omega: f64,
    pub t: f64,
}

impl SemigroupParams {
    pub fn new(omega: f64, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        Ok(SemigroupParams { omega, t })
    }
}

#[inline]
fn cross(n: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    [
        v[2] * n[1] - v[1] * n[2],
        v[0] * n[2] - v[2] * n[0],
        v[1] * n[0] - v[0] * n[1],
    ]
}

/// Precomputed per-mode factors of `T_Ω(t)`; reused by the time stepper.
pub struct Propagator {
    lattice: Arc<FrequencyLattice>,
    params: SemigroupParams,
    decay: Vec<f64>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Propagator {
    pub fn new(lattice: Arc<FrequencyLattice>, params: SemigroupParams) -> Self {
        let factors: Vec<(f64, f64, f64)> = (0..lattice.len())
            .into_par_iter()
            .map(|i| {
                let x = lattice.wavevector(i);
                let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if i == 0 || r2 == 0.0 {
                    return (0.0, 1.0, 0.0);
                }
                let theta = params.omega * params.t * x[2] / r2.sqrt();
                ((-params.t * r2).exp(), theta.cos(), theta.sin())
            })
            .collect();
        let mut decay = Vec::with_capacity(factors.len());
        let mut cos = Vec::with_capacity(factors.len());
        let mut sin = Vec::with_capacity(factors.len());
        for (d, c, s) in factors {
            decay.push(d);
            cos.push(c);
            sin.push(s);
        }
        Propagator {
            lattice,
            params,
            decay,
            cos,
            sin,
        }
    }

    pub fn params(&self) -> SemigroupParams {
        self.params
    }

    pub fn apply(&self, u: &SpectralVectorField) -> SpectralVectorField {
        debug_assert_eq!(**u.lattice(), *self.lattice);
        u.map(|i, x, v| {
            let d = self.decay[i];
            if d == 0.0 {
                return [Complex64::new(0.0, 0.0); 3];
            }
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            let n = [x[0] / r, x[1] / r, x[2] / r];
            let w = cross(n, v);
            let (c, s) = (self.cos[i], self.sin[i]);
            [0, 1, 2].map(|k| (v[k] * c - w[k] * s) * d)
        })
    }
}

/// `T_Ω(t) û₀` evaluated in closed form per mode.
pub fn semigroup_apply(u0: &SpectralVectorField, prm: SemigroupParams) -> Result<SpectralVectorField> {
    if !(prm.t >= 0.0) {
        return Err(Error::NegativeTime(prm.t));
    }
    Ok(Propagator::new(u0.lattice().clone(), prm).apply(u0))
}

/// Snapshots of the linear solution `U(t) = T_Ω(t)u₀`.
#[derive(Clone, Debug)]
pub struct LinearEvolution {
    pub omega: f64,
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralVectorField>,
    /// Per snapshot, one series per requested parameter set.
    pub norms: Vec<Vec<NormSeries>>,
}

pub fn linear_solution_series(
    u0: &SpectralVectorField,
    omega: f64,
    times: &[f64],
    norms: Option<(&DyadicPartition, &[BesovParams])>,
) -> Result<LinearEvolution> {
    if times.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    if times[0] != 0.0 {
        return Err(Error::InvalidParameter(format!("times must start at 0, got {}", times[0])));
    }
    if let Some(index) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::UnorderedTimes { index: index + 1 });
    }
    let mut snapshots = Vec::with_capacity(times.len());
    let mut series = Vec::with_capacity(times.len());
    for &t in times {
        let u = if t == 0.0 {
            u0.clone()
        } else {
            semigroup_apply(u0, SemigroupParams::new(omega, t)?)?
        };
        if let Some((part, prms)) = norms {
            series.push(prms.iter().map(|&p| fb_norm(part, &u, p)).collect());
        }
        snapshots.push(u);
    }
    Ok(LinearEvolution {
        omega,
        times: times.to_vec(),
        snapshots,
        norms: series,
    })
}

/// Outcome of one pointwise Fourier bound over the whole lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub convention: String,
    /// Gating checks must pass; the others are reported for information.
    pub gating: bool,
    pub max_ratio: f64,
    pub argmax_xi: [f64; 3],
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub omega: f64,
    pub t: f64,
    pub tolerance: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundReport {
    pub fn gating_pass(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct BoundSpec {
    name: &'static str,
    convention: &'static str,
    gating: bool,
}

const BOUNDS: [BoundSpec; 5] = [
    BoundSpec {
        name: "horizontal_sum",
        convention: "|Û¹|+|Û²| ≤ √2 e^{−t|ξ|²}|û₀|; componentwise sum on the left, Euclidean |û₀| on the right, √2 from ℓ¹ ≤ √2 ℓ²",
        gating: true,
    },
    BoundSpec {
        name: "horizontal_sum_unit_constant",
        convention: "|Û¹|+|Û²| ≤ e^{−t|ξ|²}|û₀| with Euclidean |û₀| (constant 1 as printed)",
        gating: false,
    },
    BoundSpec {
        name: "vertical",
        convention: "|Û³| ≤ |Ω|t e^{−t|ξ|²}(|ξ₃|/|ξ|)|û₀ʰ| + e^{−t|ξ|²}|û₀³|; Euclidean horizontal modulus",
        gating: true,
    },
    BoundSpec {
        name: "horizontal_combination",
        convention: "|Û¹+Û²| ≤ e^{−t|ξ|²}|û₀¹+û₀²| + |Ω|t e^{−t|ξ|²}(|ξ₃|/|ξ|)|û₀|; Euclidean |û₀|",
        gating: true,
    },
    BoundSpec {
        name: "horizontal_combination_t_prefactor",
        convention: "|Û¹+Û²| ≤ t e^{−t|ξ|²}|û₀¹+û₀²| + |Ω|t e^{−t|ξ|²}(|ξ₃|/|ξ|)|û₀| (extra factor t on the first term)",
        gating: false,
    },
];

/// Evaluates both sides of each pointwise bound at every mode and reports
/// the largest ratio. Requires `û₀³ = 0`.
///
/// A mode whose right-hand side falls below `10⁻¹⁵ e^{−t|ξ|²}|û₀|` is
/// compared against that roundoff floor instead.
pub fn pointwise_bound_check(u0: &SpectralVectorField, omega: f64, t: f64) -> Result<BoundReport> {
    let prm = SemigroupParams::new(omega, t)?;
    let vertical = u0.component(2).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if vertical > 0.0 {
        return Err(Error::NonzeroVerticalComponent(vertical));
    }
    let lat = u0.lattice().clone();
    let big_u = semigroup_apply(u0, prm)?;
    let w = omega.abs() * t;
    let per_mode: Vec<[(f64, usize); 5]> = (1..lat.len())
        .into_par_iter()
        .map(|i| {
            let x = lat.wavevector(i);
            let r = lat.radius(i);
            let e = (-t * r * r).exp();
            let v = u0.at(i);
            let m0 = u0.modulus(i);
            let mh = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            let uu = big_u.at(i);
            let rot = w * x[2].abs() / r;
            let sum = uu[0].norm() + uu[1].norm();
            let comb = (uu[0] + uu[1]).norm();
            let comb0 = (v[0] + v[1]).norm();
            let lhs = [sum, sum, uu[2].norm(), comb, comb];
            let rhs = [
                SQRT_2 * e * m0,
                e * m0,
                rot * e * mh + e * v[2].norm(),
                e * comb0 + rot * e * m0,
                t * e * comb0 + rot * e * m0,
            ];
            let floor = 1e-15 * e * m0;
            let mut out = [(0.0, i); 5];
            for k in 0..5 {
                out[k].0 = if lhs[k] == 0.0 {
                    0.0
                } else if rhs[k].max(floor) == 0.0 {
                    f64::INFINITY
                } else {
                    lhs[k] / rhs[k].max(floor)
                };
            }
            out
        })
        .collect();
    let checks = BOUNDS
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let (max_ratio, idx) = per_mode
                .iter()
                .map(|m| m[k])
                .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
            BoundCheck {
                name: spec.name.to_string(),
                convention: spec.convention.to_string(),
                gating: spec.gating,
                max_ratio,
                argmax_xi: lat.wavevector(idx),
                pass: max_ratio <= BOUND_TOLERANCE,
            }
        })
        .collect();
    Ok(BoundReport {
        omega,
        t,
        tolerance: BOUND_TOLERANCE,
        checks,
    })
}

/// Reflection across the vertical plane `x₁ = 0`:
/// `(Mû)(ξ) = R û(Rξ)` with `R = diag(−1, 1, 1)`. Conjugating the semigroup
/// with `M` reverses the sign of `Ω`.
pub fn mirror_x1(u: &SpectralVectorField) -> SpectralVectorField {
    let lat = u.lattice().clone();
    u.map(|i, _, _| {
        let k = lat.mode(i);
        match lat.index_of_mode([-k[0], k[1], k[2]]) {
            Some(j) => {
                let v = u.at(j);
                [-v[0], v[1], v[2]]
            }
            None => [Complex64::new(0.0, 0.0); 3],
        }
    })
}
