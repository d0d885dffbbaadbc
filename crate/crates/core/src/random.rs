//! Seeded random band-limited test fields.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::spectral::{helmholtz_project, FrequencyLattice, ScalarSpectrum, SpectralVectorField};

fn gaussian_pair<R: Rng>(rng: &mut R) -> Complex64 {
    // Box–Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    Complex64::from_polar(r, std::f64::consts::TAU * u2)
}

/// Real (Hermitian) random field supported on retained modes with
/// `r_min ≤ |ξ| ≤ r_max`, optionally projected to be divergence-free.
pub fn random_field<R: Rng>(
    lattice: &Arc<FrequencyLattice>,
    rng: &mut R,
    r_min: f64,
    r_max: f64,
    solenoidal: bool,
) -> SpectralVectorField {
    let mut f = SpectralVectorField::zeros(lattice.clone());
    for idx in 1..lattice.len() {
        let r = lattice.radius(idx);
        if lattice.is_retained(idx) && r >= r_min && r <= r_max {
            f.set(idx, [gaussian_pair(rng), gaussian_pair(rng), gaussian_pair(rng)]);
        }
    }
    let f = f.hermitian_part();
    if solenoidal {
        helmholtz_project(&f)
    } else {
        f
    }
}

/// Real random scalar with the same support rules as [`random_field`].
pub fn random_scalar<R: Rng>(lattice: &Arc<FrequencyLattice>, rng: &mut R, r_min: f64, r_max: f64) -> ScalarSpectrum {
    let mut data = vec![Complex64::new(0.0, 0.0); lattice.len()];
    for (idx, z) in data.iter_mut().enumerate().skip(1) {
        let r = lattice.radius(idx);
        if lattice.is_retained(idx) && r >= r_min && r <= r_max {
            *z = gaussian_pair(rng);
        }
    }
    let sym: Vec<Complex64> = (0..lattice.len())
        .map(|i| (data[i] + data[lattice.mirror_index(i)].conj()) * 0.5)
        .collect();
    ScalarSpectrum::from_vec(lattice.clone(), sym).expect("lattice-sized buffer")
}
