//! Smooth dyadic partition of unity and homogeneous Fourier–Besov norms
//!
//! ```text
//! ‖u‖_{FB^s_{p,r}} = ‖ { 2^{js} ‖ψ̂(2^{−j}ξ) û‖_{L^p} }_j ‖_{ℓ^r}
//! ```
//!
//! The radial profile is `ψ̂(ρ) = χ(ρ/2) − χ(ρ)` where `χ` equals 1 on
//! `[0, 3/4]`, vanishes on `[4/3, ∞)` and is C^∞ in between. The sum over
//! `j ∈ ℤ` telescopes to one for every `ρ > 0`, and `supp ψ̂ ⊂ [3/4, 8/3]`.
//! Vector fields use the pointwise Euclidean modulus `|û(ξ)|`.

use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth;
use crate::spectral::{FrequencyLattice, ScalarSpectrum, SpectralVectorField};

pub const ANNULUS_INNER: f64 = 3.0 / 4.0;
pub const ANNULUS_OUTER: f64 = 8.0 / 3.0;

/// Low-pass cutoff `χ`: 1 on `[0, 3/4]`, 0 on `[4/3, ∞)`.
pub fn cutoff(rho: f64) -> f64 {
    smooth::ramp_down(rho, 0.75, 4.0 / 3.0)
}

/// Radial annulus profile `ψ̂(ρ) = χ(ρ/2) − χ(ρ)`.
pub fn profile(rho: f64) -> f64 {
    cutoff(0.5 * rho) - cutoff(rho)
}

/// Range of dyadic blocks `[j_min, j_max]` carrying the profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicPartition {
    j_min: i32,
    j_max: i32,
}

pub fn build_partition(j_min: i32, j_max: i32) -> Result<DyadicPartition> {
    DyadicPartition::new(j_min, j_max)
}

impl DyadicPartition {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(Error::InvalidParameter(format!("j_min {j_min} > j_max {j_max}")));
        }
        Ok(DyadicPartition { j_min, j_max })
    }

    /// Smallest partition whose blocks sum to one on every nonzero lattice
    /// frequency.
    pub fn covering(lattice: &FrequencyLattice) -> Self {
        Self::covering_radii(lattice.min_nonzero_radius(), lattice.max_radius())
    }

    /// Smallest partition summing to one on `[r_lo, r_hi]`.
    pub fn covering_radii(r_lo: f64, r_hi: f64) -> Self {
        let j_min = (0.75 * r_lo).log2().floor() as i32;
        let j_max = ((2.0 / 3.0) * r_hi).log2().ceil() as i32;
        DyadicPartition {
            j_min,
            j_max: j_max.max(j_min),
        }
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn blocks(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn len(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Radii on which the blocks in range sum to exactly one:
    /// `[4/3·2^{j_min}, 3/2·2^{j_max}]`.
    pub fn covered_radii(&self) -> (f64, f64) {
        (4.0 / 3.0 * 2f64.powi(self.j_min), 1.5 * 2f64.powi(self.j_max))
    }

    /// `ψ̂(2^{−j}ρ)`.
    pub fn weight(&self, j: i32, rho: f64) -> f64 {
        profile(rho * 2f64.powi(-j))
    }

    /// Every `j ∈ ℤ` whose block can be nonzero at radius `rho`.
    pub fn active_blocks(rho: f64) -> impl Iterator<Item = i32> {
        let c = if rho > 0.0 { rho.log2().floor() as i32 } else { 0 };
        let ok = rho > 0.0;
        (c - 2..=c + 2).filter(move |&j| {
            let x = rho * 2f64.powi(-j);
            ok && x > ANNULUS_INNER && x < ANNULUS_OUTER
        })
    }

    /// `Σ_{j∈ℤ} ψ̂(2^{−j}ρ)`, independent of the configured range.
    pub fn full_sum(rho: f64) -> f64 {
        Self::active_blocks(rho).map(|j| profile(rho * 2f64.powi(-j))).sum()
    }

    /// Sum of the in-range block weights at `rho`.
    pub fn covered_sum(&self, rho: f64) -> f64 {
        Self::active_blocks(rho)
            .filter(|j| self.blocks().contains(j))
            .map(|j| self.weight(j, rho))
            .sum()
    }

    fn uncovered_weight(&self, rho: f64) -> f64 {
        let (lo, hi) = self.covered_radii();
        if rho >= lo && rho <= hi || rho == 0.0 {
            0.0
        } else {
            (1.0 - self.covered_sum(rho)).max(0.0)
        }
    }

    /// `Σ_j 2^{js} ψ̂(2^{−j}ρ)` over the configured range: the pointwise
    /// multiplier whose weighted `L¹` norm is `FB^s_{1,1}`.
    pub fn smooth_weight(&self, s: f64, rho: f64) -> f64 {
        Self::active_blocks(rho)
            .filter(|j| self.blocks().contains(j))
            .map(|j| 2f64.powf(j as f64 * s) * self.weight(j, rho))
            .sum()
    }

    /// Per-lattice-point multipliers for repeated `FB^s_{1,1}` evaluation.
    pub fn lattice_weights(&self, lattice: &FrequencyLattice, s: f64) -> Vec<f64> {
        (0..lattice.len())
            .into_par_iter()
            .map(|i| if i == 0 { 0.0 } else { self.smooth_weight(s, lattice.radius(i)) })
            .collect()
    }
}

/// Regularity, integrability and summation indices of `FB^s_{p,r}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub p: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64, r: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::InvalidBesov(format!("s = {s} must be finite")));
        }
        if !(p >= 1.0) || !(r >= 1.0) {
            return Err(Error::InvalidBesov(format!("need p, r ≥ 1 (got p = {p}, r = {r})")));
        }
        Ok(BesovParams { s, p, r })
    }
}

/// Per-block values `2^{js}‖Δ̂_j u‖_{L^p}` and their `ℓ^r` aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSeries {
    pub params: BesovParams,
    pub blocks: Vec<(i32, f64)>,
    pub aggregate: f64,
    /// `L^p` norm of the part of `û` not covered by the partition range.
    pub truncation: f64,
}

impl NormSeries {
    pub fn block(&self, j: i32) -> Option<f64> {
        self.blocks.iter().find(|(k, _)| *k == j).map(|(_, v)| *v)
    }

    pub fn truncated(&self) -> bool {
        self.truncation > 0.0
    }

    /// `j,block_value` rows followed by `aggregate` and `truncation` lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,block_value\n");
        for (j, v) in &self.blocks {
            let _ = writeln!(out, "{j},{v:e}");
        }
        let _ = writeln!(out, "aggregate,{:e}", self.aggregate);
        let _ = writeln!(out, "truncation,{:e}", self.truncation);
        out
    }
}

/// `ℓ^r` norm of nonnegative entries.
pub fn lr_norm(values: impl IntoIterator<Item = f64>, r: f64) -> f64 {
    if r.is_infinite() {
        values.into_iter().fold(0.0, f64::max)
    } else if r == 1.0 {
        values.into_iter().sum()
    } else {
        values.into_iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// `Δ_j u`: multiplication by `ψ̂(2^{−j}|ξ|)`.
pub fn dyadic_block(part: &DyadicPartition, j: i32, u: &SpectralVectorField) -> Result<SpectralVectorField> {
    if !part.blocks().contains(&j) {
        return Err(Error::BlockOutOfRange {
            j,
            j_min: part.j_min,
            j_max: part.j_max,
        });
    }
    Ok(u.map(|_, x, v| {
        let w = part.weight(j, (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
        v.map(|z| z * w)
    }))
}

/// Fourier–Besov norm of a vector field.
pub fn fb_norm(part: &DyadicPartition, u: &SpectralVectorField, prm: BesovParams) -> NormSeries {
    fb_norm_of_moduli(part, u.lattice(), &u.moduli(), prm)
}

/// Fourier–Besov norm of a scalar.
pub fn fb_norm_scalar(part: &DyadicPartition, u: &ScalarSpectrum, prm: BesovParams) -> NormSeries {
    fb_norm_of_moduli(part, u.lattice(), &u.moduli(), prm)
}

/// Fourier–Besov norm of any pointwise modulus `m(ξ) = |û(ξ)|` on a lattice.
pub fn fb_norm_of_moduli(part: &DyadicPartition, lattice: &FrequencyLattice, moduli: &[f64], prm: BesovParams) -> NormSeries {
    let nb = part.len();
    let p = prm.p;
    let inf = p.is_infinite();
    const CHUNK: usize = 4096;
    // slot nb collects the uncovered remainder
    let partial: Vec<Vec<f64>> = (0..moduli.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0f64; nb + 1];
            for i in c * CHUNK..((c + 1) * CHUNK).min(moduli.len()) {
                let m = moduli[i];
                if m == 0.0 || i == 0 {
                    continue;
                }
                let rho = lattice.radius(i);
                let mut add = |slot: usize, v: f64| {
                    if inf {
                        acc[slot] = acc[slot].max(v);
                    } else {
                        acc[slot] += v.powf(p);
                    }
                };
                for j in DyadicPartition::active_blocks(rho) {
                    if part.blocks().contains(&j) {
                        add((j - part.j_min) as usize, part.weight(j, rho) * m);
                    }
                }
                let miss = part.uncovered_weight(rho);
                if miss > 0.0 {
                    add(nb, miss * m);
                }
            }
            acc
        })
        .collect();
    let mut totals = vec![0.0f64; nb + 1];
    for acc in partial {
        for (t, a) in totals.iter_mut().zip(acc) {
            if inf {
                *t = (*t).max(a);
            } else {
                *t += a;
            }
        }
    }
    let cell = lattice.cell_volume();
    let finish = |t: f64| if inf { t } else { (t * cell).powf(1.0 / p) };
    let blocks: Vec<(i32, f64)> = part
        .blocks()
        .zip(&totals)
        .map(|(j, &t)| (j, 2f64.powf(j as f64 * prm.s) * finish(t)))
        .collect();
    let aggregate = lr_norm(blocks.iter().map(|b| b.1), prm.r);
    NormSeries {
        params: prm,
        blocks,
        aggregate,
        truncation: finish(totals[nb]),
    }
}

/// `Σ_ξ w(ξ) m(ξ) volξ` for precomputed [`DyadicPartition::lattice_weights`].
pub fn weighted_l1(lattice: &Arc<FrequencyLattice>, weights: &[f64], moduli: &[f64]) -> f64 {
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = (0..moduli.len().div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            (c * CHUNK..((c + 1) * CHUNK).min(moduli.len()))
                .map(|i| weights[i] * moduli[i])
                .sum::<f64>()
        })
        .collect();
    partial.into_iter().sum::<f64>() * lattice.cell_volume()
}

/// Time exponent of a space-time norm `L^ρ_t(FB^s_{p,r})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TimeExponent {
    Finite(f64),
    Infinity,
}

/// `‖ t ↦ ‖u(t)‖ ‖_{L^ρ}` from samples: running maximum for `ρ = ∞`,
/// composite trapezoid of `|f|^ρ` followed by the `ρ`-th root otherwise.
pub fn spacetime_fb_norm(times: &[f64], values: &[f64], rho: TimeExponent) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::InvalidParameter("times and values differ in length".into()));
    }
    if times.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: times.len() });
    }
    if let Some(index) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::UnorderedTimes { index: index + 1 });
    }
    match rho {
        TimeExponent::Infinity => Ok(values.iter().fold(0.0, |a, v| a.max(v.abs()))),
        TimeExponent::Finite(q) if q >= 1.0 => {
            let powered: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
            let integral = trapezoid(times, &powered);
            Ok(integral.powf(1.0 / q))
        }
        TimeExponent::Finite(q) => Err(Error::InvalidParameter(format!("time exponent {q} < 1"))),
    }
}

/// Composite trapezoid rule on arbitrary nodes.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}
