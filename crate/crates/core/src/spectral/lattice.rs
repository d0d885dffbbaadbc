use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

use super::fft::FftPlans;

/// Discrete, possibly anisotropic frequency grid.
///
/// Storage follows FFT order on every axis (`k = 0, 1, …, N/2−1, −N/2, …, −1`)
/// with axis 1 slowest.
pub struct FrequencyLattice {
    periods: [f64; 3],
    counts: [usize; 3],
    spacing: [f64; 3],
    modes: [Vec<i64>; 3],
    plans: OnceLock<FftPlans>,
}

/// Builds a shared lattice handle.
pub fn make_lattice(periods: [f64; 3], counts: [usize; 3]) -> Result<Arc<FrequencyLattice>> {
    FrequencyLattice::new(periods, counts).map(Arc::new)
}

impl FrequencyLattice {
    pub fn new(periods: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        for axis in 0..3 {
            let n = counts[axis];
            if n % 2 != 0 {
                return Err(Error::OddModeCount { axis, count: n });
            }
            if n < 4 {
                return Err(Error::TooFewModes { axis, count: n });
            }
            let l = periods[axis];
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::NonPositivePeriod { axis, period: l });
            }
        }
        let spacing = periods.map(|l| 2.0 * PI / l);
        let modes = counts.map(|n| {
            (0..n)
                .map(|i| if i < n / 2 { i as i64 } else { i as i64 - n as i64 })
                .collect()
        });
        Ok(FrequencyLattice {
            periods,
            counts,
            spacing,
            modes,
            plans: OnceLock::new(),
        })
    }

    /// Lattice with prescribed frequency spacings `δξᵢ` (periods `2π/δξᵢ`).
    pub fn with_spacing(spacing: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        for (axis, &d) in spacing.iter().enumerate() {
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::InvalidParameter(format!("spacing {d} on axis {axis} must be positive")));
            }
        }
        Self::new(spacing.map(|d| 2.0 * PI / d), counts)
    }

    pub fn periods(&self) -> [f64; 3] {
        self.periods
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    /// Frequency spacings `δξᵢ = 2π/Lᵢ`.
    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    /// Physical grid spacings `δxᵢ = Lᵢ/Nᵢ`.
    pub fn grid_spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.periods[a] / self.counts[a] as f64)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn box_volume(&self) -> f64 {
        self.periods.iter().product()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_anisotropic(&self) -> bool {
        let s = self.spacing;
        (s[0] - s[1]).abs() > 1e-14 * s[0] || (s[0] - s[2]).abs() > 1e-14 * s[0]
    }

    /// Largest resolved frequency per axis, `Nᵢ/2 · δξᵢ`.
    pub fn max_frequency(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.counts[a] as f64 / 2.0 * self.spacing[a])
    }

    /// Radius of the largest ball contained in the resolved box.
    pub fn max_resolved_radius(&self) -> f64 {
        self.max_frequency().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|k|` kept by the 2/3 rule on `axis` (`3|k| < N`).
    pub fn retained_max_mode(&self, axis: usize) -> i64 {
        ((self.counts[axis] - 1) / 3) as i64
    }

    /// Largest frequency kept by the 2/3 rule on each axis.
    pub fn dealiased_frequency(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.retained_max_mode(a) as f64 * self.spacing[a])
    }

    pub fn check_dealiasable(&self) -> Result<()> {
        for axis in 0..3 {
            let retained = 2 * self.retained_max_mode(axis) as usize + 1;
            if retained < 4 {
                return Err(Error::LatticeTooSmall { axis, retained });
            }
        }
        Ok(())
    }

    /// Integer mode numbers on `axis`, in storage order.
    pub fn modes(&self, axis: usize) -> &[i64] {
        &self.modes[axis]
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.counts[1] + i[1]) * self.counts[2] + i[2]
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n2 = self.counts[1];
        let n3 = self.counts[2];
        [idx / (n2 * n3), (idx / n3) % n2, idx % n3]
    }

    /// Storage index of integer mode `k`, if it lies on the lattice.
    pub fn index_of_mode(&self, k: [i64; 3]) -> Option<usize> {
        let mut i = [0usize; 3];
        for a in 0..3 {
            let n = self.counts[a] as i64;
            if k[a] < -n / 2 || k[a] >= n / 2 {
                return None;
            }
            i[a] = k[a].rem_euclid(n) as usize;
        }
        Some(self.index(i))
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let i = self.unravel(idx);
        [self.modes[0][i[0]], self.modes[1][i[1]], self.modes[2][i[2]]]
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let k = self.mode(idx);
        [
            k[0] as f64 * self.spacing[0],
            k[1] as f64 * self.spacing[1],
            k[2] as f64 * self.spacing[2],
        ]
    }

    #[inline]
    pub fn radius(&self, idx: usize) -> f64 {
        let x = self.wavevector(idx);
        (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
    }

    /// Storage index of `−k`. The Nyquist slot maps to itself.
    #[inline]
    pub fn mirror_index(&self, idx: usize) -> usize {
        let i = self.unravel(idx);
        let m = [0, 1, 2].map(|a| (self.counts[a] - i[a]) % self.counts[a]);
        self.index(m)
    }

    /// Whether the mode survives the 2/3 rule on every axis.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let k = self.mode(idx);
        (0..3).all(|a| 3 * k[a].unsigned_abs() < self.counts[a] as u64)
    }

    /// Smallest nonzero `|ξ|` on the lattice.
    pub fn min_nonzero_radius(&self) -> f64 {
        self.spacing.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest `|ξ|` on the lattice (the corner of the resolved box).
    pub fn max_radius(&self) -> f64 {
        let f = self.max_frequency();
        (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()
    }

    pub(crate) fn plans(&self) -> &FftPlans {
        self.plans.get_or_init(|| FftPlans::new(self.counts))
    }
}

impl PartialEq for FrequencyLattice {
    fn eq(&self, other: &Self) -> bool {
        self.counts == other.counts && self.periods == other.periods
    }
}

impl fmt::Debug for FrequencyLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyLattice")
            .field("periods", &self.periods)
            .field("counts", &self.counts)
            .field("spacing", &self.spacing)
            .finish()
    }
}
