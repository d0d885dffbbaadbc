use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::fft::Direction;
use super::lattice::FrequencyLattice;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Deterministic parallel sum: fixed chunking, ordered combination.
pub(crate) fn ordered_sum<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&f).sum())
        .collect();
    partial.into_iter().sum()
}

pub(crate) fn ordered_max<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    (0..len).into_par_iter().map(&f).reduce(|| 0.0, f64::max)
}

/// Three-component Fourier coefficients on a lattice.
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    lattice: Arc<FrequencyLattice>,
    comps: [Vec<Complex64>; 3],
}

/// Complex scalar on a lattice (divergence, a single component, products).
#[derive(Clone, Debug)]
pub struct ScalarSpectrum {
    lattice: Arc<FrequencyLattice>,
    data: Vec<Complex64>,
}

/// Real samples of a vector field on the dual spatial grid.
#[derive(Clone, Debug)]
pub struct PhysicalVectorField {
    lattice: Arc<FrequencyLattice>,
    comps: [Vec<f64>; 3],
}

impl SpectralVectorField {
    pub fn zeros(lattice: Arc<FrequencyLattice>) -> Self {
        let n = lattice.len();
        SpectralVectorField {
            lattice,
            comps: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    pub fn from_components(lattice: Arc<FrequencyLattice>, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != lattice.len()) {
            return Err(Error::LatticeMismatch);
        }
        let mut f = SpectralVectorField { lattice, comps };
        f.pin_zero_mode();
        Ok(f)
    }

    /// Builds a field by evaluating `f(ξ)` at every lattice point. The
    /// `ξ = 0` coefficient is pinned to zero.
    pub fn from_fn<F>(lattice: Arc<FrequencyLattice>, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [Complex64; 3] + Sync,
    {
        let n = lattice.len();
        let values: Vec<[Complex64; 3]> = (0..n)
            .into_par_iter()
            .map(|i| if i == 0 { [ZERO; 3] } else { f(lattice.wavevector(i)) })
            .collect();
        let mut comps = [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]];
        for (i, v) in values.into_iter().enumerate() {
            for c in 0..3 {
                comps[c][i] = v[c];
            }
        }
        SpectralVectorField { lattice, comps }
    }

    pub fn lattice(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set(&mut self, idx: usize, v: [Complex64; 3]) {
        for c in 0..3 {
            self.comps[c][idx] = v[c];
        }
    }

    /// Scalar spectrum of one component.
    pub fn scalar(&self, c: usize) -> ScalarSpectrum {
        ScalarSpectrum {
            lattice: self.lattice.clone(),
            data: self.comps[c].clone(),
        }
    }

    /// Euclidean modulus `|û(ξ)|` at every lattice point.
    pub fn moduli(&self) -> Vec<f64> {
        (0..self.lattice.len())
            .into_par_iter()
            .map(|i| self.modulus(i))
            .collect()
    }

    #[inline]
    pub fn modulus(&self, idx: usize) -> f64 {
        (self.comps[0][idx].norm_sqr() + self.comps[1][idx].norm_sqr() + self.comps[2][idx].norm_sqr()).sqrt()
    }

    pub fn pin_zero_mode(&mut self) {
        for c in &mut self.comps {
            c[0] = ZERO;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|z| *z == ZERO))
    }

    /// Applies `f(ξ, û(ξ))` pointwise, producing a new field.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(usize, [f64; 3], [Complex64; 3]) -> [Complex64; 3] + Sync,
    {
        let lat = &self.lattice;
        let values: Vec<[Complex64; 3]> = (0..lat.len())
            .into_par_iter()
            .map(|i| f(i, lat.wavevector(i), self.at(i)))
            .collect();
        let mut out = SpectralVectorField::zeros(lat.clone());
        for (i, v) in values.into_iter().enumerate() {
            out.set(i, v);
        }
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.lattice, &other.lattice) || *self.lattice == *other.lattice {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    /// `self + alpha · other`
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for c in 0..3 {
            out.comps[c]
                .par_iter_mut()
                .zip(other.comps[c].par_iter())
                .for_each(|(a, b)| *a += b * alpha);
        }
        Ok(out)
    }

    pub fn add_scaled_in_place(&mut self, alpha: f64, other: &Self) {
        debug_assert!(self.check_same(other).is_ok());
        for c in 0..3 {
            self.comps[c]
                .par_iter_mut()
                .zip(other.comps[c].par_iter())
                .for_each(|(a, b)| *a += b * alpha);
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        for c in &mut out.comps {
            c.par_iter_mut().for_each(|z| *z *= alpha);
        }
        out
    }

    /// Zeroes every mode discarded by the 2/3 rule.
    pub fn dealias(&mut self) {
        let lat = self.lattice.clone();
        for c in &mut self.comps {
            c.par_iter_mut().enumerate().for_each(|(i, z)| {
                if !lat.is_retained(i) {
                    *z = ZERO;
                }
            });
        }
    }

    /// Largest `|û|` outside the 2/3-rule region.
    pub fn max_outside_dealiased(&self) -> f64 {
        let lat = &self.lattice;
        ordered_max(lat.len(), |i| if lat.is_retained(i) { 0.0 } else { self.modulus(i) })
    }

    /// Projection onto fields with `û(−ξ) = conj(û(ξ))`.
    pub fn hermitian_part(&self) -> Self {
        let lat = self.lattice.clone();
        let mut out = self.clone();
        for c in 0..3 {
            let src = &self.comps[c];
            out.comps[c].par_iter_mut().enumerate().for_each(|(i, z)| {
                let m = lat.mirror_index(i);
                *z = (src[i] + src[m].conj()) * 0.5;
            });
        }
        out
    }

    /// `max_ξ |û(ξ) − conj(û(−ξ))|` relative to `max |û|`.
    pub fn hermitian_defect(&self) -> f64 {
        let lat = &self.lattice;
        let scale = self.max_modulus();
        if scale == 0.0 {
            return 0.0;
        }
        let defect = ordered_max(lat.len(), |i| {
            let m = lat.mirror_index(i);
            (0..3)
                .map(|c| (self.comps[c][i] - self.comps[c][m].conj()).norm())
                .fold(0.0, f64::max)
        });
        defect / scale
    }

    pub fn max_modulus(&self) -> f64 {
        ordered_max(self.lattice.len(), |i| self.modulus(i))
    }

    /// `max_ξ |ξ·û(ξ)| / max_ξ |ξ||û(ξ)|`, zero for the zero field.
    pub fn divergence_ratio(&self) -> f64 {
        let lat = &self.lattice;
        let num = ordered_max(lat.len(), |i| {
            let x = lat.wavevector(i);
            let v = self.at(i);
            (v[0] * x[0] + v[1] * x[1] + v[2] * x[2]).norm()
        });
        let den = ordered_max(lat.len(), |i| lat.radius(i) * self.modulus(i));
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Discrete `‖û‖_{L^p}` of the Euclidean modulus; `p = ∞` gives the max.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let m = self.moduli();
        lp_of(&m, p, self.lattice.cell_volume())
    }

    /// Largest relative difference between two fields on the same lattice.
    pub fn max_relative_difference(&self, other: &Self) -> f64 {
        let lat = &self.lattice;
        let scale = self.max_modulus().max(other.max_modulus());
        if scale == 0.0 {
            return 0.0;
        }
        let diff = ordered_max(lat.len(), |i| {
            let a = self.at(i);
            let b = other.at(i);
            ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr() + (a[2] - b[2]).norm_sqr()).sqrt()
        });
        diff / scale
    }

    /// Inverse transform to physical samples.
    pub fn to_physical(&self) -> PhysicalVectorField {
        let comps = [0, 1, 2].map(|c| to_physical_scalar(&self.lattice, &self.comps[c]));
        PhysicalVectorField {
            lattice: self.lattice.clone(),
            comps,
        }
    }
}

impl ScalarSpectrum {
    pub fn zeros(lattice: Arc<FrequencyLattice>) -> Self {
        let n = lattice.len();
        ScalarSpectrum { lattice, data: vec![ZERO; n] }
    }

    pub fn from_vec(lattice: Arc<FrequencyLattice>, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != lattice.len() {
            return Err(Error::LatticeMismatch);
        }
        Ok(ScalarSpectrum { lattice, data })
    }

    pub fn lattice(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.data.par_iter().map(|z| z.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        ordered_max(self.data.len(), |i| self.data[i].norm())
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_of(&self.moduli(), p, self.lattice.cell_volume())
    }

    pub fn to_physical(&self) -> Vec<f64> {
        to_physical_scalar(&self.lattice, &self.data)
    }

    pub fn from_physical(lattice: Arc<FrequencyLattice>, values: &[f64]) -> Self {
        let data = from_physical_scalar(&lattice, values);
        ScalarSpectrum { lattice, data }
    }

    /// Spectral derivative `∂_axis`, i.e. multiplication by `iξ_axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let lat = self.lattice.clone();
        let data = self
            .data
            .par_iter()
            .enumerate()
            .map(|(i, z)| z * Complex64::new(0.0, lat.wavevector(i)[axis]))
            .collect();
        ScalarSpectrum { lattice: lat, data }
    }
}

impl PhysicalVectorField {
    pub fn from_components(lattice: Arc<FrequencyLattice>, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != lattice.len()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(PhysicalVectorField { lattice, comps })
    }

    pub fn lattice(&self) -> &Arc<FrequencyLattice> {
        &self.lattice
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    /// Grid point `x` of storage index `idx`.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let i = self.lattice.unravel(idx);
        let h = self.lattice.grid_spacing();
        [i[0] as f64 * h[0], i[1] as f64 * h[1], i[2] as f64 * h[2]]
    }

    pub fn max_speed(&self) -> f64 {
        ordered_max(self.lattice.len(), |i| {
            (self.comps[0][i].powi(2) + self.comps[1][i].powi(2) + self.comps[2][i].powi(2)).sqrt()
        })
    }

    /// Forward transform back to Fourier coefficients (ξ = 0 retained).
    pub fn to_spectral(&self) -> SpectralVectorField {
        let comps = [0, 1, 2].map(|c| from_physical_scalar(&self.lattice, &self.comps[c]));
        SpectralVectorField {
            lattice: self.lattice.clone(),
            comps,
        }
    }
}

pub(crate) fn to_physical_scalar(lattice: &FrequencyLattice, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    lattice.plans().transform(&mut buf, Direction::Inverse);
    let scale = 1.0 / lattice.box_volume();
    buf.par_iter().map(|z| z.re * scale).collect()
}

pub(crate) fn from_physical_scalar(lattice: &FrequencyLattice, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.par_iter().map(|&v| Complex64::new(v, 0.0)).collect();
    lattice.plans().transform(&mut buf, Direction::Forward);
    let scale = lattice.box_volume() / lattice.len() as f64;
    buf.par_iter_mut().for_each(|z| *z *= scale);
    buf
}

/// `(Σ mᵖ · volξ)^{1/p}`, or `max m` for `p = ∞`.
pub(crate) fn lp_of(moduli: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return ordered_max(moduli.len(), |i| moduli[i]);
    }
    if p == 1.0 {
        return ordered_sum(moduli.len(), |i| moduli[i]) * cell;
    }
    let s = ordered_sum(moduli.len(), |i| moduli[i].powf(p));
    (s * cell).powf(1.0 / p)
}

/// `(2π)³`, the Fourier-inversion constant.
pub(crate) const TWO_PI_CUBED: f64 = 8.0 * PI * PI * PI;
