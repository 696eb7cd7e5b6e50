use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::model::FourierModel;
use crate::{KamError, Result};

impl FourierModel {
    fn same_layout(&self, other: &FourierModel, what: &str) -> Result<()> {
        if self.space() != other.space() {
            return Err(KamError::Shape(format!("{what}: models live in different spaces")));
        }
        if self.shape() != other.shape() {
            return Err(KamError::Shape(format!("{what}: {:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(())
    }

    fn zip_with(&self, other: &FourierModel, what: &str, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_layout(other, what)?;
        let mut out = self.clone();
        for (a, b) in out.coefficients_mut().iter_mut().zip(other.coefficients()) {
            *a = f(*a, *b);
        }
        Ok(out)
    }

    pub fn add(&self, other: &FourierModel) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &FourierModel) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coefficients_mut().iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add_constant(&self, c: &DMatrix<f64>) -> Result<Self> {
        if c.shape() != self.shape() {
            return Err(KamError::Shape(format!("add_constant: {:?} vs {:?}", c.shape(), self.shape())));
        }
        let mut out = self.clone();
        let avg = self.average() + c;
        out.set_average(&avg);
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = self.shape();
        let mut out = FourierModel::zeros(self.space(), c, r);
        for m in 0..self.space().n_modes() {
            for i in 0..r {
                for j in 0..c {
                    let v = self.coefficients()[self.offset(m, i, j)];
                    let o = out.offset(m, j, i);
                    out.coefficients_mut()[o] = v;
                }
            }
        }
        out
    }

    /// Sub-block of `nr x nc` entries starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Result<Self> {
        if r0 + nr > self.rows() || c0 + nc > self.cols() {
            return Err(KamError::Shape(format!("block ({r0},{c0})+({nr},{nc}) outside {:?}", self.shape())));
        }
        let mut out = FourierModel::zeros(self.space(), nr, nc);
        for m in 0..self.space().n_modes() {
            for i in 0..nr {
                for j in 0..nc {
                    let v = self.coefficients()[self.offset(m, r0 + i, c0 + j)];
                    let o = out.offset(m, i, j);
                    out.coefficients_mut()[o] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn column(&self, j: usize) -> Result<Self> {
        self.block(0, j, self.rows(), 1)
    }

    pub fn entry(&self, i: usize, j: usize) -> Result<Self> {
        self.block(i, j, 1, 1)
    }

    /// Assembles a block matrix from a grid of equally spaced models.
    pub fn from_blocks(blocks: &[Vec<&FourierModel>]) -> Result<Self> {
        let first = blocks.first().and_then(|r| r.first()).ok_or_else(|| KamError::Shape("no blocks".into()))?;
        let space = first.space().clone();
        let heights: Vec<usize> = blocks.iter().map(|r| r[0].rows()).collect();
        let widths: Vec<usize> = blocks[0].iter().map(|b| b.cols()).collect();
        for (bi, row) in blocks.iter().enumerate() {
            if row.len() != widths.len() {
                return Err(KamError::Shape("ragged block rows".into()));
            }
            for (bj, b) in row.iter().enumerate() {
                if b.space() != &space || b.rows() != heights[bi] || b.cols() != widths[bj] {
                    return Err(KamError::Shape(format!("block ({bi},{bj}) does not fit")));
                }
            }
        }
        let total_r: usize = heights.iter().sum();
        let total_c: usize = widths.iter().sum();
        let mut out = FourierModel::zeros(&space, total_r, total_c);
        let mut r0 = 0;
        for (bi, row) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                for m in 0..space.n_modes() {
                    for i in 0..heights[bi] {
                        for j in 0..widths[bj] {
                            let v = b.coefficients()[b.offset(m, i, j)];
                            let o = out.offset(m, r0 + i, c0 + j);
                            out.coefficients_mut()[o] = v;
                        }
                    }
                }
                c0 += widths[bj];
            }
            r0 += heights[bi];
        }
        Ok(out)
    }

    pub fn hstack(parts: &[&FourierModel]) -> Result<Self> {
        Self::from_blocks(&[parts.to_vec()])
    }

    pub fn vstack(parts: &[&FourierModel]) -> Result<Self> {
        let rows: Vec<Vec<&FourierModel>> = parts.iter().map(|p| vec![*p]).collect();
        Self::from_blocks(&rows)
    }

    /// Matrix product computed on the padded grid and truncated back.
    pub fn matmul(&self, other: &FourierModel) -> Result<Self> {
        if self.space() != other.space() {
            return Err(KamError::Shape("matmul: models live in different spaces".into()));
        }
        if self.cols() != other.rows() {
            return Err(KamError::Shape(format!("matmul: {:?} times {:?}", self.shape(), other.shape())));
        }
        FourierModel::pointwise(&[self, other], |v| Ok(v[0] * v[1]))
    }

    /// Product with a constant matrix on the right, exact in coefficient space.
    pub fn mul_constant_right(&self, c: &DMatrix<f64>) -> Result<Self> {
        if self.cols() != c.nrows() {
            return Err(KamError::Shape(format!("mul_constant_right: {:?} times {:?}", self.shape(), c.shape())));
        }
        self.map_blocks(self.rows(), c.ncols(), |b| b * c.map(|x| Complex64::new(x, 0.0)))
    }

    /// Product with a constant matrix on the left, exact in coefficient space.
    pub fn mul_constant_left(&self, c: &DMatrix<f64>) -> Result<Self> {
        if c.ncols() != self.rows() {
            return Err(KamError::Shape(format!("mul_constant_left: {:?} times {:?}", c.shape(), self.shape())));
        }
        self.map_blocks(c.nrows(), self.cols(), |b| c.map(|x| Complex64::new(x, 0.0)) * b)
    }

    fn map_blocks(&self, rows: usize, cols: usize, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>) -> Result<Self> {
        let mut out = FourierModel::zeros(self.space(), rows, cols);
        for m in 0..self.space().n_modes() {
            let b = DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.coefficients()[self.offset(m, i, j)]);
            let r = f(&b);
            for i in 0..rows {
                for j in 0..cols {
                    let o = out.offset(m, i, j);
                    out.coefficients_mut()[o] = r[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// Coefficient block at mode index `m`.
    pub fn mode_block(&self, m: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows(), self.cols(), |i, j| self.coefficients()[self.offset(m, i, j)])
    }

    fn scale_modes(&self, f: impl Fn(&[i64]) -> Complex64) -> Self {
        let mut out = self.clone();
        let rc = self.rows() * self.cols();
        let mut k = vec![0i64; self.dim()];
        for m in 0..self.space().n_modes() {
            self.space().mode_into(m, &mut k);
            let w = f(&k);
            for c in &mut out.coefficients_mut()[m * rc..(m + 1) * rc] {
                *c *= w;
            }
        }
        out
    }

    /// Partial derivative along axis `l`.
    pub fn derivative(&self, l: usize) -> Result<Self> {
        if l >= self.dim() {
            return Err(KamError::Invalid(format!("axis {l} on a {}-torus", self.dim())));
        }
        Ok(self.scale_modes(|k| Complex64::new(0.0, 2.0 * PI * k[l] as f64)))
    }

    /// Jacobian `n x d` of a column model.
    pub fn jacobian(&self) -> Result<Self> {
        if self.cols() != 1 {
            return Err(KamError::Shape(format!("jacobian of a {:?} model", self.shape())));
        }
        let parts: Vec<FourierModel> = (0..self.dim()).map(|l| self.derivative(l)).collect::<Result<_>>()?;
        let refs: Vec<&FourierModel> = parts.iter().collect();
        Self::hstack(&refs)
    }

    /// `L_omega u = -Du omega`, diagonal with symbol `-2 pi i k.omega`.
    pub fn lie_derivative(&self, omega: &DVector<f64>) -> Result<Self> {
        if omega.len() != self.dim() {
            return Err(KamError::Shape(format!("frequency of length {} on a {}-torus", omega.len(), self.dim())));
        }
        Ok(self.scale_modes(|k| {
            let kw: f64 = k.iter().zip(omega.iter()).map(|(&a, &b)| a as f64 * b).sum();
            Complex64::new(0.0, -2.0 * PI * kw)
        }))
    }
}
