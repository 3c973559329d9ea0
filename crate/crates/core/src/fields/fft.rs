//! Three-dimensional complex FFT over the grid layout (x3 fastest).
//!
//! Lines are transformed in parallel; every line is processed independently,
//! so results do not depend on the thread schedule.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, direction: FftDirection) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, matches!(direction, FftDirection::Forward));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

const LINES_PER_TASK: usize = 64;

fn transform_contiguous(data: &mut [Complex64], n: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(n * LINES_PER_TASK).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, chunk| fft.process_with_scratch(chunk, scratch),
    );
}

/// Transforms along one non-contiguous axis by gathering lines into a
/// contiguous buffer, transforming, and scattering back.
fn transform_strided(
    data: &mut [Complex64],
    dims: [usize; 3],
    axis: usize,
    direction: FftDirection,
    buf: &mut Vec<Complex64>,
) {
    let [n1, n2, n3] = dims;
    let n = dims[axis];
    buf.resize(data.len(), Complex64::new(0.0, 0.0));
    match axis {
        0 => {
            // line (i2,i3) -> buf[(i2*n3+i3)*n1 + i1]
            buf.par_chunks_mut(n1).enumerate().for_each(|(line, out)| {
                for (i1, o) in out.iter_mut().enumerate() {
                    *o = data[i1 * n2 * n3 + line];
                }
            });
        }
        1 => {
            // line (i1,i3) -> buf[(i1*n3+i3)*n2 + i2]
            buf.par_chunks_mut(n2).enumerate().for_each(|(line, out)| {
                let (i1, i3) = (line / n3, line % n3);
                for (i2, o) in out.iter_mut().enumerate() {
                    *o = data[(i1 * n2 + i2) * n3 + i3];
                }
            });
        }
        _ => unreachable!("axis 2 is contiguous"),
    }
    transform_contiguous(buf, n, direction);
    match axis {
        0 => {
            data.par_chunks_mut(n2 * n3).enumerate().for_each(|(i1, slab)| {
                for (line, v) in slab.iter_mut().enumerate() {
                    *v = buf[line * n1 + i1];
                }
            });
        }
        1 => {
            data.par_chunks_mut(n2 * n3).enumerate().for_each(|(i1, slab)| {
                for i2 in 0..n2 {
                    for i3 in 0..n3 {
                        slab[i2 * n3 + i3] = buf[(i1 * n3 + i3) * n2 + i2];
                    }
                }
            });
        }
        _ => unreachable!(),
    }
}

/// Unnormalized forward transform in place.
pub fn forward3(data: &mut [Complex64], dims: [usize; 3]) {
    run3(data, dims, FftDirection::Forward);
}

/// Unnormalized inverse transform in place.
pub fn inverse3(data: &mut [Complex64], dims: [usize; 3]) {
    run3(data, dims, FftDirection::Inverse);
}

fn run3(data: &mut [Complex64], dims: [usize; 3], direction: FftDirection) {
    assert_eq!(data.len(), dims.iter().product::<usize>());
    transform_contiguous(data, dims[2], direction);
    let mut buf = Vec::new();
    transform_strided(data, dims, 1, direction, &mut buf);
    transform_strided(data, dims, 0, direction, &mut buf);
}

/// Forward transform of real samples, normalized so that
/// `f(x) = sum_k c_k exp(i k.(x - x0))` with `x0` the grid origin.
pub fn real_to_coeffs(values: &[f64], dims: [usize; 3]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward3(&mut data, dims);
    let scale = 1.0 / values.len() as f64;
    data.par_iter_mut().for_each(|c| *c *= scale);
    data
}

/// Inverse of [`real_to_coeffs`]; the imaginary residue is discarded.
pub fn coeffs_to_real(coeffs: &[Complex64], dims: [usize; 3]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    inverse3(&mut data, dims);
    data.into_iter().map(|c| c.re).collect()
}

/// Inverse transform keeping the complex result, for imaginary-residue checks.
pub fn coeffs_to_complex(coeffs: &[Complex64], dims: [usize; 3]) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    inverse3(&mut data, dims);
    data
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(values: &[f64], dims: [usize; 3]) -> Vec<Complex64> {
        let [n1, n2, n3] = dims;
        let n = values.len() as f64;
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for m1 in 0..n1 {
            for m2 in 0..n2 {
                for m3 in 0..n3 {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j1 in 0..n1 {
                        for j2 in 0..n2 {
                            for j3 in 0..n3 {
                                let ph = -2.0
                                    * std::f64::consts::PI
                                    * ((m1 * j1) as f64 / n1 as f64
                                        + (m2 * j2) as f64 / n2 as f64
                                        + (m3 * j3) as f64 / n3 as f64);
                                acc += values[(j1 * n2 + j2) * n3 + j3] * Complex64::from_polar(1.0, ph);
                            }
                        }
                    }
                    out[(m1 * n2 + m2) * n3 + m3] = acc / n;
                }
            }
        }
        out
    }

    #[test]
    fn matches_naive_dft_on_anisotropic_dims() {
        let dims = [4, 6, 8];
        let values: Vec<f64> = (0..192).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let fast = real_to_coeffs(&values, dims);
        let slow = naive_dft(&values, dims);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = coeffs_to_real(&fast, dims);
        for (a, b) in back.iter().zip(&values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
