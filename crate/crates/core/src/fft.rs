//! Thin 2D FFT helpers over `rustfft`.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

/// In-place 2D FFT of a row-major `width × height` array (unnormalized).
pub(crate) fn fft2(data: &mut [Complex64], width: usize, height: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), width * height);
    let mut planner = FftPlanner::new();
    let row = planner.plan_fft(width, direction);
    let mut scratch = vec![Complex64::default(); row.get_inplace_scratch_len()];
    row.process_with_scratch(data, &mut scratch);

    let col = planner.plan_fft(height, direction);
    let mut t = transpose(data, width, height);
    let mut scratch = vec![Complex64::default(); col.get_inplace_scratch_len()];
    col.process_with_scratch(&mut t, &mut scratch);
    let back = transpose(&t, height, width);
    data.copy_from_slice(&back);
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    const B: usize = 32;
    for y0 in (0..height).step_by(B) {
        for x0 in (0..width).step_by(B) {
            for y in y0..(y0 + B).min(height) {
                for x in x0..(x0 + B).min(width) {
                    out[x * height + y] = data[y * width + x];
                }
            }
        }
    }
    out
}
