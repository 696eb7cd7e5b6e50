use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::transform;
use super::space::FourierSpace;
use crate::{KamError, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Truncated Fourier series of a real-analytic matrix-valued function on `T^d`.
///
/// Coefficients are stored mode-major: for each mode of the space, the
/// `rows x cols` block in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierModel {
    space: FourierSpace,
    rows: usize,
    cols: usize,
    coeffs: Vec<Complex64>,
}

impl FourierModel {
    pub fn zeros(space: &FourierSpace, rows: usize, cols: usize) -> Self {
        Self {
            space: space.clone(),
            rows,
            cols,
            coeffs: vec![ZERO; space.n_modes() * rows * cols],
        }
    }

    pub fn constant(space: &FourierSpace, value: &DMatrix<f64>) -> Self {
        let mut out = Self::zeros(space, value.nrows(), value.ncols());
        out.set_average(value);
        out
    }

    pub fn identity(space: &FourierSpace, n: usize) -> Self {
        Self::constant(space, &DMatrix::identity(n, n))
    }

    /// Builds a model from raw coefficients in storage order. Real symmetry is enforced.
    pub fn from_coefficients(space: &FourierSpace, rows: usize, cols: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != space.n_modes() * rows * cols {
            return Err(KamError::Shape(format!(
                "expected {} coefficients, got {}",
                space.n_modes() * rows * cols,
                coeffs.len()
            )));
        }
        let mut out = Self { space: space.clone(), rows, cols, coeffs };
        out.symmetrize();
        Ok(out)
    }

    /// Coefficient generator `f(k, i, j)`; the result is symmetrized.
    pub fn from_fn(space: &FourierSpace, rows: usize, cols: usize, mut f: impl FnMut(&[i64], usize, usize) -> Complex64) -> Self {
        let mut out = Self::zeros(space, rows, cols);
        let mut k = vec![0i64; space.dim()];
        for m in 0..space.n_modes() {
            space.mode_into(m, &mut k);
            for i in 0..rows {
                for j in 0..cols {
                    out.coeffs[(m * rows + i) * cols + j] = f(&k, i, j);
                }
            }
        }
        out.symmetrize();
        out
    }

    pub fn space(&self) -> &FourierSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    #[inline]
    pub(crate) fn offset(&self, mode: usize, i: usize, j: usize) -> usize {
        (mode * self.rows + i) * self.cols + j
    }

    /// Coefficient at `k`, zero outside the mode box.
    pub fn coefficient(&self, k: &[i64], i: usize, j: usize) -> Complex64 {
        match self.space.index(k) {
            Some(m) => self.coeffs[self.offset(m, i, j)],
            None => ZERO,
        }
    }

    /// Sets the coefficient at `k` and its conjugate partner at `-k`.
    pub fn set_coefficient(&mut self, k: &[i64], i: usize, j: usize, value: Complex64) -> Result<()> {
        let m = self
            .space
            .index(k)
            .ok_or_else(|| KamError::Invalid(format!("mode {k:?} outside the box")))?;
        let mm = self.space.mirror(m);
        let (a, b) = (self.offset(m, i, j), self.offset(mm, i, j));
        if m == mm {
            self.coeffs[a] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[a] = value;
            self.coeffs[b] = value.conj();
        }
        Ok(())
    }

    pub fn average(&self) -> DMatrix<f64> {
        let z = self.space.zero_index();
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.coeffs[self.offset(z, i, j)].re)
    }

    pub fn set_average(&mut self, value: &DMatrix<f64>) {
        let z = self.space.zero_index();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let o = self.offset(z, i, j);
                self.coeffs[o] = Complex64::new(value[(i, j)], 0.0);
            }
        }
    }

    pub fn zero_average(&self) -> Self {
        let mut out = self.clone();
        out.set_average(&DMatrix::zeros(self.rows, self.cols));
        out
    }

    /// Averages each coefficient with the conjugate of its mirror.
    pub fn symmetrize(&mut self) {
        let nm = self.space.n_modes();
        let rc = self.rows * self.cols;
        for m in 0..nm {
            let mm = nm - 1 - m;
            if m > mm {
                break;
            }
            for c in 0..rc {
                let (a, b) = (m * rc + c, mm * rc + c);
                if a == b {
                    self.coeffs[a].im = 0.0;
                } else {
                    let avg = (self.coeffs[a] + self.coeffs[b].conj()) * 0.5;
                    self.coeffs[a] = avg;
                    self.coeffs[b] = avg.conj();
                }
            }
        }
    }

    /// Largest coefficient modulus.
    pub fn max_coefficient(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Values on a uniform grid, first axis slowest. Exact at the nodes for any grid.
    pub fn evaluate_on(&self, grid: &[usize]) -> Result<Vec<DMatrix<f64>>> {
        check_grid(grid, self.dim())?;
        let total: usize = grid.iter().product();
        let strides = strides(grid);
        let positions = self.grid_positions(grid, &strides);
        let mut out = vec![DMatrix::zeros(self.rows, self.cols); total];
        let mut buf = vec![ZERO; total];
        for i in 0..self.rows {
            for j in 0..self.cols {
                buf.iter_mut().for_each(|v| *v = ZERO);
                for (m, &pos) in positions.iter().enumerate() {
                    buf[pos] += self.coeffs[self.offset(m, i, j)];
                }
                transform(&mut buf, grid, FftDirection::Inverse);
                for (node, v) in buf.iter().enumerate() {
                    out[node][(i, j)] = v.re;
                }
            }
        }
        Ok(out)
    }

    /// Values on the model's own grid.
    pub fn samples(&self) -> Vec<DMatrix<f64>> {
        self.evaluate_on(self.space.grid()).expect("own grid is valid")
    }

    /// Values on the padded grid used for products.
    pub fn padded_samples(&self) -> Vec<DMatrix<f64>> {
        self.evaluate_on(&self.space.padded_grid()).expect("padded grid is valid")
    }

    fn grid_positions(&self, grid: &[usize], strides: &[usize]) -> Vec<usize> {
        let mut k = vec![0i64; self.dim()];
        (0..self.space.n_modes())
            .map(|m| {
                self.space.mode_into(m, &mut k);
                k.iter()
                    .zip(grid)
                    .zip(strides)
                    .map(|((&kl, &n), &s)| (kl.rem_euclid(n as i64) as usize) * s)
                    .sum()
            })
            .collect()
    }

    /// Coefficients in `space` of the function sampled on a uniform `grid`.
    ///
    /// Modes at the Nyquist frequency of an axis get half of the shared bin,
    /// so the round trip is exact when the cutoff equals half the grid.
    pub fn analyze(space: &FourierSpace, grid: &[usize], samples: &[DMatrix<f64>]) -> Result<Self> {
        check_grid(grid, space.dim())?;
        let total: usize = grid.iter().product();
        if samples.len() != total {
            return Err(KamError::Shape(format!("{} samples for a grid of {} nodes", samples.len(), total)));
        }
        for (l, (&m, &n)) in space.cutoffs().iter().zip(grid).enumerate() {
            if 2 * m > n {
                return Err(KamError::Shape(format!("cutoff {m} on axis {l} not resolved by {n} samples")));
            }
        }
        let (rows, cols) = samples[0].shape();
        if samples.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(KamError::Shape("samples of differing shapes".into()));
        }
        let strides = strides(grid);
        let mut out = Self::zeros(space, rows, cols);
        let positions = out.grid_positions(grid, &strides);
        let weights: Vec<f64> = {
            let mut k = vec![0i64; space.dim()];
            (0..space.n_modes())
                .map(|m| {
                    space.mode_into(m, &mut k);
                    let halves = k.iter().zip(grid).filter(|(kl, n)| kl.unsigned_abs() as usize * 2 == **n).count();
                    0.5f64.powi(halves as i32) / total as f64
                })
                .collect()
        };
        let mut buf = vec![ZERO; total];
        for i in 0..rows {
            for j in 0..cols {
                for (node, v) in buf.iter_mut().enumerate() {
                    *v = Complex64::new(samples[node][(i, j)], 0.0);
                }
                transform(&mut buf, grid, FftDirection::Forward);
                for (m, &pos) in positions.iter().enumerate() {
                    let o = out.offset(m, i, j);
                    out.coeffs[o] = buf[pos] * weights[m];
                }
            }
        }
        out.symmetrize();
        Ok(out)
    }

    /// Direct evaluation of the series at arbitrary complex points.
    pub fn synthesize_complex(&self, points: &[Vec<Complex64>]) -> Result<Vec<DMatrix<Complex64>>> {
        if self.rows * self.cols == 0 {
            return Err(KamError::Invalid("empty model".into()));
        }
        let d = self.dim();
        let cut = self.space.cutoffs();
        let mut k = vec![0i64; d];
        let mut out = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != d {
                return Err(KamError::Shape(format!("point of dimension {} for a {d}-torus", p.len())));
            }
            if p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(KamError::Invalid("non-finite evaluation point".into()));
            }
            // tables[l][k + M] = exp(2 pi i k theta_l)
            let tables: Vec<Vec<Complex64>> = (0..d)
                .map(|l| {
                    let m = cut[l] as i64;
                    (-m..=m).map(|kl| (Complex64::new(0.0, 2.0 * PI * kl as f64) * p[l]).exp()).collect()
                })
                .collect();
            let mut val = DMatrix::from_element(self.rows, self.cols, ZERO);
            for m in 0..self.space.n_modes() {
                self.space.mode_into(m, &mut k);
                let mut w = Complex64::new(1.0, 0.0);
                for l in 0..d {
                    w *= tables[l][(k[l] + cut[l] as i64) as usize];
                }
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        val[(i, j)] += self.coeffs[self.offset(m, i, j)] * w;
                    }
                }
            }
            out.push(val);
        }
        Ok(out)
    }

    /// Direct evaluation at real points; returns the real part.
    pub fn synthesize(&self, points: &[Vec<f64>]) -> Result<Vec<DMatrix<f64>>> {
        let cpts: Vec<Vec<Complex64>> = points.iter().map(|p| p.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Ok(self.synthesize_complex(&cpts)?.into_iter().map(|m| m.map(|c| c.re)).collect())
    }

    /// Applies `f` node by node on the padded grid and analyzes the result back into the space of `inputs[0]`.
    pub fn pointwise<F>(inputs: &[&FourierModel], f: F) -> Result<FourierModel>
    where
        F: Fn(&[&DMatrix<f64>]) -> Result<DMatrix<f64>> + Sync,
    {
        let mut out = Self::pointwise_many(inputs, 1, |v| Ok(vec![f(v)?]))?;
        Ok(out.pop().expect("one output"))
    }

    /// Like [`FourierModel::pointwise`] with `outputs` results per node.
    pub fn pointwise_many<F>(inputs: &[&FourierModel], outputs: usize, f: F) -> Result<Vec<FourierModel>>
    where
        F: Fn(&[&DMatrix<f64>]) -> Result<Vec<DMatrix<f64>>> + Sync,
    {
        use rayon::prelude::*;
        let first = inputs.first().ok_or_else(|| KamError::Invalid("no inputs".into()))?;
        let space = first.space();
        if inputs.iter().any(|m| m.space() != space) {
            return Err(KamError::Shape("inputs live in different spaces".into()));
        }
        let grid = space.padded_grid();
        let samples: Vec<Vec<DMatrix<f64>>> = inputs.iter().map(|m| m.evaluate_on(&grid)).collect::<Result<_>>()?;
        let values: Vec<Vec<DMatrix<f64>>> = (0..samples[0].len())
            .into_par_iter()
            .map(|node| {
                let args: Vec<&DMatrix<f64>> = samples.iter().map(|s| &s[node]).collect();
                let r = f(&args)?;
                if r.len() != outputs {
                    return Err(KamError::Shape(format!("pointwise map returned {} values, expected {outputs}", r.len())));
                }
                Ok(r)
            })
            .collect::<Result<_>>()?;
        (0..outputs)
            .map(|o| {
                let col: Vec<DMatrix<f64>> = values.iter().map(|v| v[o].clone()).collect();
                FourierModel::analyze(space, &grid, &col)
            })
            .collect()
    }
}

pub(crate) fn strides(grid: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; grid.len()];
    for l in (0..grid.len().saturating_sub(1)).rev() {
        s[l] = s[l + 1] * grid[l + 1];
    }
    s
}

fn check_grid(grid: &[usize], dim: usize) -> Result<()> {
    if grid.len() != dim {
        return Err(KamError::Shape(format!("grid of dimension {} for a {dim}-torus", grid.len())));
    }
    if let Some(n) = grid.iter().find(|n| !n.is_power_of_two()) {
        return Err(KamError::Invalid(format!("grid size {n} is not a power of two")));
    }
    Ok(())
}
