//! The ε-family of large initial data concentrated in one dyadic block.
//!
//! `â` lives on a thin diagonal strip `|ξ₁ − ξ₂| ≤ ε` of the annulus
//! `11/8 ≤ |(ξ₁, ξ₂)| ≤ 35/24`, `b̂` on the shell `ε/2 < |ξ₃| < ε`, and
//!
//! ```text
//! û₀ = A(ε) (iξ₂, −iξ₁, 0) â(ξ₁, ξ₂) b̂(ξ₃),    A(ε) = ε⁻² (log log 1/ε)^{1/2}.
//! ```
//!
//! Because `û₀` factors into a planar and a vertical profile, every norm of
//! the sweep reduces to products of 2D and 1D integrals.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smooth;
use crate::spectral::{FrequencyLattice, SpectralVectorField};

pub const EPS_MAX: f64 = 0.125;
/// Radial support of `â`.
pub const A_INNER: f64 = 11.0 / 8.0;
pub const A_OUTER: f64 = 35.0 / 24.0;
/// Radial plateau of `â`.
pub const A_FLAT_INNER: f64 = 67.0 / 48.0;
pub const A_FLAT_OUTER: f64 = 69.0 / 48.0;
/// Fewest quadrature intervals across a profile's support.
pub const MIN_RESOLUTION: usize = 16;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(Error::EpsilonOutOfRange { eps, max: EPS_MAX });
    }
    Ok(())
}

fn check_resolution(resolution: usize, eps: f64) -> Result<()> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::ResolutionTooCoarse {
            spacing: eps / resolution.max(1) as f64,
            required: eps / MIN_RESOLUTION as f64,
        });
    }
    Ok(())
}

/// Composite trapezoid rule with `n` intervals on `[a, b]`.
fn trapezoid<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| f(a + k as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Planar profile `â(ξ₁, ξ₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileA {
    pub eps: f64,
    pub resolution: usize,
}

pub fn build_profile_a(eps: f64, resolution: usize) -> Result<ProfileA> {
    check_eps(eps)?;
    check_resolution(resolution, eps)?;
    Ok(ProfileA { eps, resolution })
}

impl ProfileA {
    pub fn radial(rho: f64) -> f64 {
        smooth::plateau(rho, A_INNER, A_FLAT_INNER, A_FLAT_OUTER, A_OUTER)
    }

    pub fn strip(&self, diff: f64) -> f64 {
        let y = diff.abs() / self.eps;
        if y <= 0.5 {
            1.0
        } else {
            smooth::ramp_down(y, 0.5, 1.0)
        }
    }

    pub fn value(&self, xi1: f64, xi2: f64) -> f64 {
        let rho = xi1.hypot(xi2);
        if rho <= A_INNER || rho >= A_OUTER {
            return 0.0;
        }
        Self::radial(rho) * self.strip(xi1 - xi2)
    }

    /// `∫∫ f(ξ₁, ξ₂, â) dξ₁dξ₂` over the support, in coordinates rotated by
    /// 45° so the strip is axis-aligned.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(f64, f64, f64) -> f64 + Sync,
    {
        let half = self.eps / SQRT_2;
        let s_lo = (A_INNER * A_INNER - half * half).sqrt();
        let n = self.resolution;
        // even n keeps d = 0 (the kink of |ξ₁ − ξ₂|) on a node
        let nd = n + n % 2;
        let lobe = |sign: f64| {
            trapezoid(-half, half, nd, |d| {
                trapezoid(s_lo, A_OUTER, n, |s| {
                    let s = sign * s;
                    let xi1 = (s + d) / SQRT_2;
                    let xi2 = (s - d) / SQRT_2;
                    let a = self.value(xi1, xi2);
                    if a == 0.0 {
                        0.0
                    } else {
                        f(xi1, xi2, a)
                    }
                })
            })
        };
        let parts: Vec<f64> = [1.0, -1.0].par_iter().map(|&s| lobe(s)).collect();
        parts[0] + parts[1]
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return 1.0;
        }
        self.integrate(|_, _, a| a.powf(p)).powf(1.0 / p)
    }
}

/// Vertical profile `b̂(ξ₃)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileB {
    pub eps: f64,
    pub resolution: usize,
}

pub fn build_profile_b(eps: f64, resolution: usize) -> Result<ProfileB> {
    check_eps(eps)?;
    check_resolution(resolution, eps)?;
    Ok(ProfileB { eps, resolution })
}

impl ProfileB {
    pub fn value(&self, xi3: f64) -> f64 {
        smooth::plateau(xi3.abs() / self.eps, 0.5, 0.625, 0.875, 1.0)
    }

    /// `∫ f(ξ₃, b̂) dξ₃` over both halves of the support.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let e = self.eps;
        let n = self.resolution;
        let pos = trapezoid(0.5 * e, e, n, |x| f(x, self.value(x)));
        let neg = trapezoid(-e, -0.5 * e, n, |x| f(x, self.value(x)));
        pos + neg
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return 1.0;
        }
        self.integrate(|_, b| b.powf(p)).powf(1.0 / p)
    }
}

/// `ln ln (1/ε)`.
pub fn loglog(eps: f64) -> f64 {
    (1.0 / eps).ln().ln()
}

/// How `log log 1/ε` is kept away from zero for moderate ε.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFloor {
    pub enabled: bool,
    pub value: f64,
}

impl Default for LogLogFloor {
    fn default() -> Self {
        LogLogFloor { enabled: true, value: 0.1 }
    }
}

impl LogLogFloor {
    /// Effective `log log 1/ε` and whether the floor was applied.
    pub fn apply(&self, eps: f64) -> Result<(f64, bool)> {
        let ll = loglog(eps);
        if self.enabled && !(ll >= self.value) {
            return Ok((self.value, true));
        }
        if !(ll > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "log log 1/ε = {ll} is not positive at ε = {eps}; enable the floor"
            )));
        }
        Ok((ll, false))
    }
}

/// `A(ε) = ε⁻² (log log 1/ε)^{1/2}` with the configured floor.
pub fn amplitude(eps: f64, floor: LogLogFloor) -> Result<(f64, bool)> {
    let (ll, floored) = floor.apply(eps)?;
    Ok((ll.sqrt() / (eps * eps), floored))
}

/// Largest ε for which `supp û₀` stays inside `{4/3 ≤ |ξ| ≤ 3/2}`.
pub fn single_block_threshold() -> f64 {
    (2.25 - A_OUTER * A_OUTER).sqrt()
}

/// Largest `|ξᵢ|` on `supp û₀` per axis. The strip hugs the diagonal, so the
/// horizontal reach is `√(R²/2 − ε²/4) + ε/2` with `R = 35/24`.
pub fn support_extent(eps: f64) -> [f64; 3] {
    let h = (0.5 * A_OUTER * A_OUTER - 0.25 * eps * eps).sqrt() + 0.5 * eps;
    [h, h, eps]
}

/// Lattice with the given mode counts whose dealiased region just contains
/// `supp û₀`, giving the finest spacing those counts allow.
pub fn fitted_lattice(eps: f64, counts: [usize; 3]) -> Result<Arc<FrequencyLattice>> {
    check_eps(eps)?;
    let extent = support_extent(eps);
    let mut spacing = [0.0; 3];
    for axis in 0..3 {
        let n = counts[axis];
        let retained = n.saturating_sub(1) / 3;
        if retained == 0 {
            return Err(Error::InsufficientLattice(format!("{n} modes on axis {} keep nothing after dealiasing", axis + 1)));
        }
        spacing[axis] = extent[axis] / retained as f64;
    }
    if spacing[2] > eps / 8.0 {
        return Err(Error::InsufficientLattice(format!(
            "{} vertical modes cannot resolve δξ₃ ≤ ε/8 inside the dealiased region",
            counts[2]
        )));
    }
    FrequencyLattice::with_spacing(spacing, counts).map(Arc::new)
}

#[derive(Clone, Debug)]
pub struct LargeDatum {
    pub eps: f64,
    pub amplitude: f64,
    pub floored: bool,
    pub u0: SpectralVectorField,
}

/// Samples the datum on a lattice fine enough to resolve `supp b̂` and
/// large enough to contain `supp û₀`. Whether the result also fits inside
/// the dealiased region is checked by the solver, not here.
pub fn build_u0(eps: f64, lattice: &Arc<FrequencyLattice>, floor: LogLogFloor) -> Result<LargeDatum> {
    check_eps(eps)?;
    let required = eps / 8.0;
    let d3 = lattice.spacing()[2];
    if d3 > required * (1.0 + 1e-12) {
        return Err(Error::InsufficientLattice(format!(
            "δξ₃ = {d3} exceeds the required {required} (ε/8)"
        )));
    }
    for (axis, &extent) in support_extent(eps).iter().enumerate() {
        // largest frequency present with both signs
        let reach = (lattice.counts()[axis] / 2 - 1) as f64 * lattice.spacing()[axis];
        if reach < extent {
            return Err(Error::InsufficientLattice(format!(
                "lattice reach {reach} on axis {} below the support extent {extent}",
                axis + 1
            )));
        }
    }
    let (amp, floored) = amplitude(eps, floor)?;
    // resolution is irrelevant for pointwise evaluation
    let a = ProfileA { eps, resolution: MIN_RESOLUTION };
    let b = ProfileB { eps, resolution: MIN_RESOLUTION };
    let u0 = SpectralVectorField::from_fn(lattice.clone(), |x| {
        let w = amp * a.value(x[0], x[1]) * b.value(x[2]);
        if w == 0.0 {
            return [Complex64::new(0.0, 0.0); 3];
        }
        [Complex64::new(0.0, w * x[1]), Complex64::new(0.0, -w * x[0]), Complex64::new(0.0, 0.0)]
    });
    Ok(LargeDatum {
        eps,
        amplitude: amp,
        floored,
        u0,
    })
}

/// Norms of `u₀(ε)` from separable quadrature. Since the datum sits in the
/// plateau of the `j = 0` block, `‖u₀‖_{FB^s_{p,r}} = ‖û₀‖_{L^p}` for every
/// `s` and `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub eps: f64,
    pub loglog: f64,
    pub amplitude: f64,
    pub floored: bool,
    pub single_block: bool,
    /// `‖u₀‖_{FB^{-1}_{1,1}}`
    pub fb_m1_11: f64,
    /// `‖u₀‖_{FB^{1}_{1,1}}`
    pub fb_p1_11: f64,
    /// `‖û₀‖_{L¹}`, equivalent to `‖u₀‖_{FB^{-1}_{1,∞}}` here.
    pub l1: f64,
    /// `‖u₀¹ + u₀²‖_{FB^1_{3/2,1}}`
    pub u12_fb1_32: f64,
    /// `‖∂₃u₀‖_{FB^1_{3/2,1}}`
    pub d3u_fb1_32: f64,
    /// `‖u₀³‖_{FB^1_{3/2,1}}`
    pub u3_fb1_32: f64,
    /// Sum of the three norms above.
    pub con1_group: f64,
    pub a_l1: f64,
    pub b_l1: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedExponents {
    /// Slope of `log(‖u₀‖_{FB^{-1}_{1,1}} / (log log 1/ε)^{1/2})` against `log ε`.
    pub fb_m1_11: f64,
    pub fb_p1_11: f64,
    pub u12_fb1_32: f64,
    pub d3u_fb1_32: f64,
    pub con1_group: f64,
    /// Slope of `log(‖û₀‖_{L¹} / log log 1/ε)`.
    pub l1_over_loglog: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    pub exponents: FittedExponents,
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// One sweep entry from separable quadrature.
pub fn scaling_row(eps: f64, resolution: usize, floor: LogLogFloor) -> Result<ScalingRow> {
    let a = build_profile_a(eps, resolution)?;
    let b = build_profile_b(eps, resolution)?;
    let (amp, floored) = amplitude(eps, floor)?;
    let (ll, _) = floor.apply(eps)?;
    let r_max = (A_OUTER * A_OUTER + eps * eps).sqrt();
    let single_block = A_INNER >= 4.0 / 3.0 && r_max <= 1.5;
    if !single_block {
        return Err(Error::InvalidParameter(format!("ε = {eps} leaves the j = 0 plateau")));
    }
    let p = 1.5f64;
    let lp = |v: f64| v.powf(1.0 / p);
    // |û₀| = A |ξ_h| â b̂
    let h_l1 = a.integrate(|x1, x2, av| x1.hypot(x2) * av);
    let b_l1 = b.integrate(|_, bv| bv);
    let l1 = amp * h_l1 * b_l1;
    // |û₀¹ + û₀²| = A |ξ₁ − ξ₂| â b̂
    let diff_32 = a.integrate(|x1, x2, av| ((x1 - x2).abs() * av).powf(p));
    let b_32 = b.integrate(|_, bv| bv.powf(p));
    let u12 = amp * lp(diff_32) * lp(b_32);
    // |∂₃û₀| = A |ξ₃| |ξ_h| â b̂
    let h_32 = a.integrate(|x1, x2, av| (x1.hypot(x2) * av).powf(p));
    let zb_32 = b.integrate(|x3, bv| (x3.abs() * bv).powf(p));
    let d3u = amp * lp(h_32) * lp(zb_32);
    let u3 = 0.0;
    Ok(ScalingRow {
        eps,
        loglog: ll,
        amplitude: amp,
        floored,
        single_block,
        fb_m1_11: l1,
        fb_p1_11: l1,
        l1,
        u12_fb1_32: u12,
        d3u_fb1_32: d3u,
        u3_fb1_32: u3,
        con1_group: u12 + d3u + u3,
        a_l1: a.lp_norm(1.0),
        b_l1,
    })
}

/// Norms and fitted ε-exponents over a decreasing list of ε.
pub fn norm_scaling_sweep(eps_list: &[f64], resolution: usize, floor: LogLogFloor) -> Result<ScalingTable> {
    if eps_list.is_empty() {
        return Err(Error::EmptyEpsilonList);
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::EpsilonListNotDecreasing);
    }
    let rows: Vec<ScalingRow> = eps_list
        .par_iter()
        .map(|&e| scaling_row(e, resolution, floor))
        .collect::<Result<_>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let slope = |f: &dyn Fn(&ScalingRow) -> f64| {
        let y: Vec<f64> = rows.iter().map(|r| (f(r) / r.loglog.sqrt()).ln()).collect();
        fit_slope(&x, &y)
    };
    let exponents = FittedExponents {
        fb_m1_11: slope(&|r| r.fb_m1_11),
        fb_p1_11: slope(&|r| r.fb_p1_11),
        u12_fb1_32: slope(&|r| r.u12_fb1_32),
        d3u_fb1_32: slope(&|r| r.d3u_fb1_32),
        con1_group: slope(&|r| r.con1_group),
        l1_over_loglog: fit_slope(&x, &rows.iter().map(|r| (r.l1 / r.loglog).ln()).collect::<Vec<_>>()),
    };
    Ok(ScalingTable { rows, exponents })
}

impl ScalingTable {
    pub const HEADER: &'static str =
        "eps,loglog,amplitude,floored,fb_m1_11,fb_p1_11,l1,u12_fb1_32,d3u_fb1_32,u3_fb1_32,con1_group,a_l1,b_l1";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::HEADER);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:e},{:e},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.eps,
                r.loglog,
                r.amplitude,
                r.floored,
                r.fb_m1_11,
                r.fb_p1_11,
                r.l1,
                r.u12_fb1_32,
                r.d3u_fb1_32,
                r.u3_fb1_32,
                r.con1_group,
                r.a_l1,
                r.b_l1
            );
        }
        out
    }

    /// `quantity,exponent,reference` rows; the reference is the value the
    /// scaling predicts.
    pub fn exponents_csv(&self) -> String {
        let e = &self.exponents;
        let mut out = String::from("quantity,exponent,reference\n");
        for (name, v, reference) in [
            ("fb_m1_11_over_sqrt_loglog", e.fb_m1_11, 0.0),
            ("fb_p1_11_over_sqrt_loglog", e.fb_p1_11, 0.0),
            ("u12_fb1_32_over_sqrt_loglog", e.u12_fb1_32, 1.0 / 3.0),
            ("d3u_fb1_32_over_sqrt_loglog", e.d3u_fb1_32, 1.0 / 3.0),
            ("con1_group_over_sqrt_loglog", e.con1_group, 1.0 / 3.0),
            ("l1_over_loglog", e.l1_over_loglog, 0.0),
        ] {
            let _ = writeln!(out, "{name},{v:e},{reference:e}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{divergence, make_lattice};

    #[test]
    fn profile_a_points() {
        let a = build_profile_a(0.125, 64).unwrap();
        let r = 68.0 / 48.0;
        let x = r / SQRT_2;
        assert_eq!(a.value(x, x), 1.0);
        assert_eq!(a.value(-x, -x), 1.0);
        assert_eq!(a.value(1.3 / SQRT_2, 1.3 / SQRT_2), 0.0);
        // outside the strip
        assert_eq!(a.value(x + 0.1, x - 0.1), 0.0);
        for (u, v) in [(1.0, 0.97), (0.99, 1.02), (1.01, 1.0)] {
            let val = a.value(u, v);
            assert!((0.0..=1.0).contains(&val));
            assert_eq!(val, a.value(-u, -v));
        }
    }

    #[test]
    fn profile_b_points() {
        let eps = 1.0 / 16.0;
        let b = build_profile_b(eps, 64).unwrap();
        assert_eq!(b.value(0.75 * eps), 1.0);
        assert_eq!(b.value(-0.75 * eps), 1.0);
        assert_eq!(b.value(0.25 * eps), 0.0);
        assert_eq!(b.value(0.5 * eps), 0.0);
        assert_eq!(b.value(eps), 0.0);
        assert!(b.value(0.55 * eps) > 0.0);
    }

    #[test]
    fn profile_validation() {
        assert!(matches!(build_profile_a(0.2, 64), Err(Error::EpsilonOutOfRange { .. })));
        assert!(matches!(build_profile_b(0.0, 64), Err(Error::EpsilonOutOfRange { .. })));
        assert!(matches!(build_profile_a(0.1, 4), Err(Error::ResolutionTooCoarse { .. })));
    }

    #[test]
    fn profile_norms_scale_like_eps_to_one_over_p() {
        for p in [1.0, 1.5, 2.0, 4.0] {
            let a1 = build_profile_a(1.0 / 16.0, 256).unwrap().lp_norm(p);
            let a2 = build_profile_a(1.0 / 32.0, 256).unwrap().lp_norm(p);
            let b1 = build_profile_b(1.0 / 16.0, 256).unwrap().lp_norm(p);
            let b2 = build_profile_b(1.0 / 32.0, 256).unwrap().lp_norm(p);
            let target = 2f64.powf(-1.0 / p);
            assert!(((a2 / a1) / target - 1.0).abs() < 0.2, "a, p = {p}");
            assert!(((b2 / b1) / target - 1.0).abs() < 0.2, "b, p = {p}");
        }
    }

    #[test]
    fn amplitude_grows_as_eps_shrinks() {
        let mut prev = 0.0;
        for k in 3..20 {
            let (a, floored) = amplitude(2f64.powi(-k), LogLogFloor::default()).unwrap();
            assert!(a > prev);
            assert!(!floored);
            prev = a;
        }
        let (_, floored) = amplitude(0.35, LogLogFloor::default()).unwrap();
        assert!(floored);
        let off = LogLogFloor { enabled: false, value: 0.1 };
        assert!(amplitude(0.5, off).is_err());
    }

    #[test]
    fn datum_structure_on_lattice() {
        let eps = 1.0 / 16.0;
        let lat = make_lattice([16.0 * std::f64::consts::PI, 16.0 * std::f64::consts::PI, 256.0 * std::f64::consts::PI], [64, 64, 128]).unwrap();
        let d = build_u0(eps, &lat, LogLogFloor::default()).unwrap();
        assert!(!d.u0.is_zero());
        assert!(d.u0.component(2).iter().all(|z| z.norm() == 0.0));
        // ξ₁(iξ₂âb̂) + ξ₂(−iξ₁âb̂) vanishes identically
        assert_eq!(divergence(&d.u0).max_modulus(), 0.0);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..lat.len() {
            if d.u0.modulus(i) > 0.0 {
                let r = lat.radius(i);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        assert!(lo >= 4.0 / 3.0 && hi <= 1.5, "support radii [{lo}, {hi}]");
        assert!(d.u0.hermitian_defect() == 0.0);
    }

    #[test]
    fn datum_rejects_coarse_lattices() {
        let lat = make_lattice([16.0 * std::f64::consts::PI; 3], [64, 64, 64]).unwrap();
        assert!(matches!(build_u0(1.0 / 16.0, &lat, LogLogFloor::default()), Err(Error::InsufficientLattice(_))));
        let lat = make_lattice([4.0 * std::f64::consts::PI, 4.0 * std::f64::consts::PI, 256.0 * std::f64::consts::PI], [4, 4, 64]).unwrap();
        assert!(matches!(build_u0(1.0 / 16.0, &lat, LogLogFloor::default()), Err(Error::InsufficientLattice(_))));
    }

    #[test]
    fn fitted_lattice_contains_datum() {
        for eps in [0.125, 1.0 / 32.0] {
            let lat = fitted_lattice(eps, [64, 64, 32]).unwrap();
            let d = build_u0(eps, &lat, LogLogFloor::default()).unwrap();
            assert_eq!(d.u0.max_outside_dealiased(), 0.0);
            assert!(!d.u0.is_zero());
            let reach = lat.dealiased_frequency();
            let ext = support_extent(eps);
            for a in 0..3 {
                assert!((reach[a] / ext[a] - 1.0).abs() < 1e-12);
            }
        }
        assert!(matches!(fitted_lattice(0.125, [64, 64, 16]), Err(Error::InsufficientLattice(_))));
    }

    #[test]
    fn support_extent_is_attained() {
        let eps = 0.125;
        let a = ProfileA { eps, resolution: MIN_RESOLUTION };
        let h = support_extent(eps)[0];
        let mut best = 0.0f64;
        let n = 1500;
        for i in 0..=n {
            let x1 = 0.9 + 0.3 * i as f64 / n as f64;
            for k in 0..=n {
                let x2 = 0.9 + 0.3 * k as f64 / n as f64;
                if a.value(x1, x2) > 0.0 {
                    best = best.max(x1);
                }
            }
        }
        assert!(best <= h && best > h - 0.01, "{best} vs {h}");
    }

    #[test]
    fn sweep_validation() {
        assert_eq!(norm_scaling_sweep(&[], 64, LogLogFloor::default()), Err(Error::EmptyEpsilonList));
        assert_eq!(
            norm_scaling_sweep(&[0.01, 0.1], 64, LogLogFloor::default()),
            Err(Error::EpsilonListNotDecreasing)
        );
    }

    #[test]
    fn vertical_component_contributes_nothing() {
        let row = scaling_row(1.0 / 32.0, 128, LogLogFloor::default()).unwrap();
        assert_eq!(row.u3_fb1_32, 0.0);
        assert!(row.single_block);
        assert!(single_block_threshold() > EPS_MAX);
    }
}
