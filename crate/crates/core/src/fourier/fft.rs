//! Multi-dimensional FFTs on row-major grids, one axis at a time.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized transform of `data` laid out on `grid` (first axis slowest).
/// Forward uses `e^{-2 pi i jk/N}`, inverse `e^{+2 pi i jk/N}`.
pub(crate) fn transform(data: &mut [Complex64], grid: &[usize], direction: FftDirection) {
    debug_assert_eq!(data.len(), grid.iter().product::<usize>());
    let mut stride = 1usize;
    for l in (0..grid.len()).rev() {
        let n = grid[l];
        if n > 1 {
            let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
            let outer = data.len() / (n * stride);
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[base + j * stride] = *v;
                    }
                }
            }
        }
        stride *= n;
    }
}
