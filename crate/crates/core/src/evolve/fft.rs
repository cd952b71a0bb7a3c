//! Cubic 3D FFT built from 1D rustfft plans along each axis. Lines along the
//! slow axes are gathered into contiguous buffers so every pass is a set of
//! independent chunk transforms.

use crate::par::{for_each_chunk, for_each_chunk_with, Exec};
use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    exec: Exec,
}

impl Fft3 {
    pub fn new(n: usize, exec: Exec) -> Self {
        let mut planner = FftPlanner::new();
        Fft3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            exec,
        }
    }

    /// Unnormalized, kernel e^{−2πi jk/n}.
    pub fn forward(&self, data: &mut [C64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse including the 1/n³ factor.
    pub fn inverse(&self, data: &mut [C64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        for_each_chunk(self.exec, data, self.n * self.n, |_, c| c.iter_mut().for_each(|v| *v *= scale));
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "FFT buffer has wrong length");
        let scratch_len = plan.get_inplace_scratch_len();
        let zero = C64::new(0.0, 0.0);

        // fastest axis: contiguous lines
        for_each_chunk_with(self.exec, data, n * n, || vec![zero; scratch_len], |scr, _, slab| {
            for line in slab.chunks_mut(n) {
                plan.process_with_scratch(line, scr);
            }
        });

        // middle axis: strided inside each slab
        for_each_chunk_with(
            self.exec,
            data,
            n * n,
            || (vec![zero; n], vec![zero; scratch_len]),
            |(line, scr), _, slab| {
                for k in 0..n {
                    for j in 0..n {
                        line[j] = slab[j * n + k];
                    }
                    plan.process_with_scratch(line, scr);
                    for j in 0..n {
                        slab[j * n + k] = line[j];
                    }
                }
            },
        );

        // slowest axis: gather into a transposed buffer
        let mut buf = vec![zero; n * n * n];
        {
            let src: &[C64] = data;
            for_each_chunk(self.exec, &mut buf, n, |jk, line| {
                for (i, v) in line.iter_mut().enumerate() {
                    *v = src[i * n * n + jk];
                }
            });
        }
        for_each_chunk_with(self.exec, &mut buf, n * n, || vec![zero; scratch_len], |scr, _, block| {
            for line in block.chunks_mut(n) {
                plan.process_with_scratch(line, scr);
            }
        });
        let tb: &[C64] = &buf;
        for_each_chunk(self.exec, data, n * n, |i, slab| {
            for (jk, v) in slab.iter_mut().enumerate() {
                *v = tb[jk * n + i];
            }
        });
    }
}
