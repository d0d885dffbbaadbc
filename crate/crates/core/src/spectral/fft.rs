use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Target number of complex values handled by one rayon task.
const TASK_SIZE: usize = 1 << 14;

pub(crate) struct FftPlans {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `Σ_x f(x) e^{−2πikx/N}`
    Forward,
    /// `Σ_k f(k) e^{+2πikx/N}`, unnormalized
    Inverse,
}

impl FftPlans {
    pub(crate) fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        FftPlans { dims, forward, inverse }
    }

    /// In-place unnormalized 3D transform of a row-major array.
    pub(crate) fn transform(&self, data: &mut [Complex64], dir: Direction) {
        debug_assert_eq!(data.len(), self.dims.iter().product::<usize>());
        let plans = match dir {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        // contiguous axis first, then the strided ones through a transpose
        transform_lines(data, &plans[2]);
        let mut scratch = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in [1, 0] {
            self.strided_axis(data, &mut scratch, axis, &plans[axis]);
        }
    }

    fn strided_axis(
        &self,
        data: &mut [Complex64],
        lines: &mut [Complex64],
        axis: usize,
        fft: &Arc<dyn Fft<f64>>,
    ) {
        let n = self.dims[axis];
        let stride: usize = self.dims[axis + 1..].iter().product();
        let block = n * stride;
        // gather: line l = (outer, inner) holds data[outer*block + i*stride + inner]
        {
            let src = &*data;
            lines.par_chunks_mut(n).enumerate().for_each(|(l, line)| {
                let base = (l / stride) * block + l % stride;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = src[base + i * stride];
                }
            });
        }
        transform_lines(lines, fft);
        let src = &*lines;
        data.par_chunks_mut(stride).enumerate().for_each(|(row, chunk)| {
            let outer = row / n;
            let i = row % n;
            for (inner, v) in chunk.iter_mut().enumerate() {
                *v = src[(outer * stride + inner) * n + i];
            }
        });
    }
}

/// Transforms consecutive length-`n` lines in place.
fn transform_lines(data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
    let n = fft.len();
    let per_task = (TASK_SIZE / n).max(1) * n;
    data.par_chunks_mut(per_task).for_each(|chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive(data: &[Complex64], dims: [usize; 3], sign: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for k0 in 0..dims[0] {
            for k1 in 0..dims[1] {
                for k2 in 0..dims[2] {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x0 in 0..dims[0] {
                        for x1 in 0..dims[1] {
                            for x2 in 0..dims[2] {
                                let ph = sign
                                    * 2.0
                                    * PI
                                    * ((k0 * x0) as f64 / dims[0] as f64
                                        + (k1 * x1) as f64 / dims[1] as f64
                                        + (k2 * x2) as f64 / dims[2] as f64);
                                acc += data[(x0 * dims[1] + x1) * dims[2] + x2]
                                    * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    out[(k0 * dims[1] + k1) * dims[2] + k2] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft() {
        let dims = [4, 6, 8];
        let data: Vec<Complex64> = (0..dims.iter().product::<usize>())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let plans = FftPlans::new(dims);
        for (dir, sign) in [(Direction::Forward, -1.0), (Direction::Inverse, 1.0)] {
            let mut fast = data.clone();
            plans.transform(&mut fast, dir);
            let slow = naive(&data, dims, sign);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-11);
            }
        }
    }
}
