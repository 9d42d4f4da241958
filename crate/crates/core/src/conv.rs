//! Quadrature convolution `(f * k)(x_i) = sum_j f(x_j) k(x_i - x_j) w` on the
//! grid, with everything outside the box treated as zero.
//!
//! Small kernels go through direct summation; large ones through zero-padded
//! FFT. The path is picked by a fixed size threshold so results are
//! reproducible run to run.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::grid::Grid;

const DIRECT_LIMIT_1D: usize = 65;
const DIRECT_LIMIT_2D: usize = 81;

/// Sampled kernel on symmetric integer offsets, row-major over axes.
#[derive(Clone, Debug)]
pub struct Kernel {
    dim: usize,
    half: [isize; 2],
    vals: Vec<f64>,
}

impl Kernel {
    pub fn new_1d(half: isize, vals: Vec<f64>) -> Self {
        assert_eq!(vals.len(), (2 * half + 1) as usize);
        Kernel { dim: 1, half: [half, 0], vals }
    }

    pub fn new_2d(half0: isize, half1: isize, vals: Vec<f64>) -> Self {
        assert_eq!(vals.len(), ((2 * half0 + 1) * (2 * half1 + 1)) as usize);
        Kernel { dim: 2, half: [half0, half1], vals }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    fn at(&self, o0: isize, o1: isize) -> f64 {
        let i0 = (o0 + self.half[0]) as usize;
        let i1 = (o1 + self.half[1]) as usize;
        self.vals[i0 * (2 * self.half[1] + 1) as usize + i1]
    }
}

/// Convolves grid samples with the kernel, including the quadrature weight.
pub fn convolve(grid: &Grid, f: &[f64], kernel: &Kernel) -> Vec<f64> {
    debug_assert_eq!(grid.dim(), kernel.dim);
    debug_assert_eq!(f.len(), grid.node_count());
    let w = grid.cell_volume();
    match grid.dim() {
        1 => {
            if kernel.len() <= DIRECT_LIMIT_1D {
                direct_1d(f, kernel, w)
            } else {
                fft_1d(f, kernel, w)
            }
        }
        _ => {
            if kernel.len() <= DIRECT_LIMIT_2D {
                direct_2d(grid.resolution(), f, kernel, w)
            } else {
                fft_2d(grid.resolution(), f, kernel, w)
            }
        }
    }
}

fn direct_1d(f: &[f64], kernel: &Kernel, w: f64) -> Vec<f64> {
    let n = f.len() as isize;
    let half = kernel.half[0];
    let mut out = vec![0.0; f.len()];
    for i in 0..n {
        let mut acc = 0.0;
        let lo = (i - half).max(0);
        let hi = (i + half).min(n - 1);
        for j in lo..=hi {
            acc += f[j as usize] * kernel.at(i - j, 0);
        }
        out[i as usize] = acc * w;
    }
    out
}

fn direct_2d(res: usize, f: &[f64], kernel: &Kernel, w: f64) -> Vec<f64> {
    let n = res as isize;
    let (h0, h1) = (kernel.half[0], kernel.half[1]);
    let mut out = vec![0.0; f.len()];
    for i0 in 0..n {
        for i1 in 0..n {
            let mut acc = 0.0;
            for j0 in (i0 - h0).max(0)..=(i0 + h0).min(n - 1) {
                let row = (j0 * n) as usize;
                for j1 in (i1 - h1).max(0)..=(i1 + h1).min(n - 1) {
                    acc += f[row + j1 as usize] * kernel.at(i0 - j0, i1 - j1);
                }
            }
            out[(i0 * n + i1) as usize] = acc * w;
        }
    }
    out
}

fn fft_1d(f: &[f64], kernel: &Kernel, w: f64) -> Vec<f64> {
    let n = f.len();
    let half = kernel.half[0] as usize;
    let m = (n + 2 * half + 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut fa: Vec<Complex<f64>> = vec![Complex::default(); m];
    for (i, &v) in f.iter().enumerate() {
        fa[i] = Complex::new(v, 0.0);
    }
    let mut ka: Vec<Complex<f64>> = vec![Complex::default(); m];
    for o in -(half as isize)..=(half as isize) {
        let pos = o.rem_euclid(m as isize) as usize;
        ka[pos] = Complex::new(kernel.at(o, 0), 0.0);
    }
    fwd.process(&mut fa);
    fwd.process(&mut ka);
    for i in 0..m {
        fa[i] *= ka[i];
    }
    inv.process(&mut fa);
    let scale = w / m as f64;
    (0..n).map(|i| fa[i].re * scale).collect()
}

fn fft_2d(res: usize, f: &[f64], kernel: &Kernel, w: f64) -> Vec<f64> {
    let (h0, h1) = (kernel.half[0] as usize, kernel.half[1] as usize);
    let m0 = (res + 2 * h0 + 1).next_power_of_two();
    let m1 = (res + 2 * h1 + 1).next_power_of_two();
    let mut fa = vec![Complex::<f64>::default(); m0 * m1];
    for i0 in 0..res {
        for i1 in 0..res {
            fa[i0 * m1 + i1] = Complex::new(f[i0 * res + i1], 0.0);
        }
    }
    let mut ka = vec![Complex::<f64>::default(); m0 * m1];
    for o0 in -(h0 as isize)..=(h0 as isize) {
        let p0 = o0.rem_euclid(m0 as isize) as usize;
        for o1 in -(h1 as isize)..=(h1 as isize) {
            let p1 = o1.rem_euclid(m1 as isize) as usize;
            ka[p0 * m1 + p1] = Complex::new(kernel.at(o0, o1), 0.0);
        }
    }
    fft2_in_place(&mut fa, m0, m1, false);
    fft2_in_place(&mut ka, m0, m1, false);
    for i in 0..m0 * m1 {
        fa[i] *= ka[i];
    }
    fft2_in_place(&mut fa, m0, m1, true);
    let scale = w / (m0 * m1) as f64;
    let mut out = vec![0.0; res * res];
    for i0 in 0..res {
        for i1 in 0..res {
            out[i0 * res + i1] = fa[i0 * m1 + i1].re * scale;
        }
    }
    out
}

fn fft2_in_place(data: &mut [Complex<f64>], rows: usize, cols: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let row_fft =
        if inverse { planner.plan_fft_inverse(cols) } else { planner.plan_fft_forward(cols) };
    for r in 0..rows {
        row_fft.process(&mut data[r * cols..(r + 1) * cols]);
    }
    let col_fft =
        if inverse { planner.plan_fft_inverse(rows) } else { planner.plan_fft_forward(rows) };
    let mut col = vec![Complex::<f64>::default(); rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = data[r * cols + c];
        }
        col_fft.process(&mut col);
        for r in 0..rows {
            data[r * cols + c] = col[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn delta_kernel_is_identity_up_to_weight() {
        let g = Grid::line(0.0, 1.0, 128).unwrap();
        let f: Vec<f64> = (0..128).map(|i| (i as f64 * 0.1).sin()).collect();
        let k = Kernel::new_1d(0, vec![1.0 / g.cell_volume()]);
        let out = convolve(&g, &f, &k);
        for i in 0..f.len() {
            assert!((out[i] - f[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn fft_matches_direct_1d() {
        let g = Grid::line(-1.0, 1.0, 256).unwrap();
        let f: Vec<f64> = (0..256).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect();
        let half = 80isize; // above the direct limit
        let vals: Vec<f64> =
            (-half..=half).map(|o| (-((o as f64) / 30.0).powi(2)).exp()).collect();
        let k = Kernel::new_1d(half, vals.clone());
        let fft = convolve(&g, &f, &k);
        let direct = super::direct_1d(&f, &k, g.cell_volume());
        for i in 0..f.len() {
            assert!(
                (fft[i] - direct[i]).abs() < 1e-10 * (1.0 + direct[i].abs()),
                "node {i}: fft {} direct {}",
                fft[i],
                direct[i]
            );
        }
    }

    #[test]
    fn fft_matches_direct_2d() {
        let g = Grid::square(-1.0, 1.0, 32).unwrap();
        let f: Vec<f64> = (0..g.node_count()).map(|i| ((i * 13 % 29) as f64 - 14.0) / 14.0).collect();
        let (h0, h1) = (6isize, 6isize);
        let mut vals = Vec::new();
        for o0 in -h0..=h0 {
            for o1 in -h1..=h1 {
                vals.push((-((o0 * o0 + o1 * o1) as f64) / 18.0).exp());
            }
        }
        let k = Kernel::new_2d(h0, h1, vals);
        let direct = super::direct_2d(g.resolution(), &f, &k, g.cell_volume());
        let fft = super::fft_2d(g.resolution(), &f, &k, g.cell_volume());
        for i in 0..f.len() {
            assert!((fft[i] - direct[i]).abs() < 1e-10 * (1.0 + direct[i].abs()), "node {i}");
        }
    }
}
