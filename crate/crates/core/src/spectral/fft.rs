use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::exec::{self, Exec};

/// Rows handed to one task in a parallel row pass.
const ROWS_PER_TASK: usize = 8;

/// Square 2-D complex FFT on an `n x n` row-major buffer.
///
/// Row passes run through [`exec`]; the column pass is a transpose, row
/// pass, transpose. The plan holds no mutable state, so one instance can be
/// shared by any number of concurrent callers.
#[derive(Clone)]
pub struct Fft2d {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Fft2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fft2d").field("n", &self.n).finish()
    }
}

impl Fft2d {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward transform (kernel `exp(-i...)`).
    pub fn forward(&self, exec: Exec, data: &mut [Complex64]) {
        self.process(exec, data, &self.forward);
    }

    /// Unnormalized inverse transform (kernel `exp(+i...)`).
    pub fn inverse(&self, exec: Exec, data: &mut [Complex64]) {
        self.process(exec, data, &self.inverse);
    }

    fn process(&self, exec: Exec, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n, "buffer does not match the plan size");
        self.rows(exec, data, plan);
        transpose_in_place(data, n);
        self.rows(exec, data, plan);
        transpose_in_place(data, n);
    }

    fn rows(&self, exec: Exec, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let scratch_len = plan.get_inplace_scratch_len();
        exec::for_each_chunk_mut(exec, data, n * ROWS_PER_TASK, |_, rows| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
            plan.process_with_scratch(rows, &mut scratch);
        });
    }
}

fn transpose_in_place(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
