use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::field::{from_physical_scalar, ordered_sum, to_physical_scalar, TWO_PI_CUBED};
use super::{ScalarSpectrum, SpectralVectorField};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Form in which `u·∇u` is evaluated. Both agree exactly (as truncated
/// convolutions) on divergence-free input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Advection {
    /// `Σ_j u_j ∂_j u`: 3 + 9 inverse and 3 forward transforms.
    #[default]
    Advective,
    /// `∇·(u⊗u)`: 3 inverse and 6 forward transforms.
    Conservative,
}

/// Leray–Helmholtz projection with symbol `δᵢⱼ − ξᵢξⱼ/|ξ|²`; the `ξ = 0`
/// coefficient is set to zero.
pub fn helmholtz_project(f: &SpectralVectorField) -> SpectralVectorField {
    f.map(|i, x, v| {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if i == 0 || r2 == 0.0 {
            return [ZERO; 3];
        }
        let dot = (v[0] * x[0] + v[1] * x[1] + v[2] * x[2]) / r2;
        [v[0] - dot * x[0], v[1] - dot * x[1], v[2] - dot * x[2]]
    })
}

/// `iξ·f̂(ξ)` at every lattice point.
pub fn divergence(f: &SpectralVectorField) -> ScalarSpectrum {
    let lat = f.lattice().clone();
    let data = (0..lat.len())
        .into_par_iter()
        .map(|i| {
            let x = lat.wavevector(i);
            let v = f.at(i);
            (v[0] * x[0] + v[1] * x[1] + v[2] * x[2]) * Complex64::new(0.0, 1.0)
        })
        .collect();
    ScalarSpectrum::from_vec(lat, data).expect("lattice-sized buffer")
}

/// Coriolis force `Ω e₃×u`, i.e. `Ω(−û², û¹, 0)` per mode.
pub fn coriolis_term(u: &SpectralVectorField, omega: f64) -> SpectralVectorField {
    u.map(|_, _, v| [-v[1] * omega, v[0] * omega, ZERO])
}

/// Dealiased pseudospectral `(a·∇)b`. Inputs are truncated to the 2/3-rule
/// region before the product and the result is truncated again.
pub fn advective_product(a: &SpectralVectorField, b: &SpectralVectorField) -> Result<SpectralVectorField> {
    let lat = a.lattice().clone();
    if *lat != **b.lattice() {
        return Err(Error::LatticeMismatch);
    }
    lat.check_dealiasable()?;
    let mut a = a.clone();
    a.dealias();
    let mut b = b.clone();
    b.dealias();
    let a_phys: Vec<Vec<f64>> = (0..3).map(|j| to_physical_scalar(&lat, a.component(j))).collect();
    let mut out = SpectralVectorField::zeros(lat.clone());
    for i in 0..3 {
        let bi = b.scalar(i);
        let mut acc = vec![0.0; lat.len()];
        for (j, aj) in a_phys.iter().enumerate() {
            let grad = to_physical_scalar(&lat, bi.derivative(j).data());
            acc.par_iter_mut()
                .zip(aj.par_iter().zip(grad.par_iter()))
                .for_each(|(s, (x, g))| *s += x * g);
        }
        out.component_mut(i).copy_from_slice(&from_physical_scalar(&lat, &acc));
    }
    out.dealias();
    out.pin_zero_mode();
    Ok(out)
}

/// Fourier coefficients of `u·∇u` (advective form, 2/3-rule dealiased).
pub fn nonlinear_term(u: &SpectralVectorField) -> Result<SpectralVectorField> {
    advective_product(u, u)
}

/// Fourier coefficients of `∇·(u⊗u)`, equal to `u·∇u` for divergence-free
/// `u`. Cheaper than [`nonlinear_term`]; also reports `max |u(x)|`.
pub fn nonlinear_term_conservative(u: &SpectralVectorField) -> Result<(SpectralVectorField, f64)> {
    let lat = u.lattice().clone();
    lat.check_dealiasable()?;
    let mut u = u.clone();
    u.dealias();
    let phys: Vec<Vec<f64>> = (0..3).map(|j| to_physical_scalar(&lat, u.component(j))).collect();
    let max_speed = phys[0]
        .par_iter()
        .zip(phys[1].par_iter().zip(phys[2].par_iter()))
        .map(|(a, (b, c))| (a * a + b * b + c * c).sqrt())
        .reduce(|| 0.0, f64::max);
    let mut prod = vec![vec![]; 6];
    let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    for (slot, &(i, j)) in pairs.iter().enumerate() {
        let p: Vec<f64> = phys[i].par_iter().zip(phys[j].par_iter()).map(|(a, b)| a * b).collect();
        prod[slot] = from_physical_scalar(&lat, &p);
    }
    let slot = |i: usize, j: usize| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        pairs.iter().position(|&p| p == (i, j)).unwrap()
    };
    let mut out = SpectralVectorField::zeros(lat.clone()).map(|idx, x, _| {
        if !lat.is_retained(idx) {
            return [ZERO; 3];
        }
        [0, 1, 2].map(|i| {
            let mut acc = ZERO;
            for (j, xj) in x.iter().enumerate() {
                acc += prod[slot(i, j)][idx] * Complex64::new(0.0, *xj);
            }
            acc
        })
    });
    out.pin_zero_mode();
    Ok((out, max_speed))
}

/// Kinetic energy `½∫|u|² dx = ½(2π)⁻³ Σ|û|² volξ`.
pub fn energy(u: &SpectralVectorField) -> f64 {
    let lat = u.lattice();
    let s = ordered_sum(lat.len(), |i| {
        let v = u.at(i);
        v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()
    });
    0.5 * s * lat.cell_volume() / TWO_PI_CUBED
}

/// Kinetic energy `½ Σ_x |u(x)|² δx₁δx₂δx₃` evaluated on the physical grid.
pub fn energy_physical(u: &super::PhysicalVectorField) -> f64 {
    let lat = u.lattice();
    let cell = lat.box_volume() / lat.len() as f64;
    let s = ordered_sum(lat.len(), |i| {
        u.component(0)[i].powi(2) + u.component(1)[i].powi(2) + u.component(2)[i].powi(2)
    });
    0.5 * s * cell
}

/// `Re ∫ a·conj(b) dx`, computed spectrally.
pub fn inner_product(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    let lat = a.lattice();
    let s = ordered_sum(lat.len(), |i| {
        let x = a.at(i);
        let y = b.at(i);
        (x[0] * y[0].conj() + x[1] * y[1].conj() + x[2] * y[2].conj()).re
    });
    s * lat.cell_volume() / TWO_PI_CUBED
}
