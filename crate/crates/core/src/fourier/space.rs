use serde::{Deserialize, Serialize};

use crate::{KamError, Result};

/// Mode box and sampling grid shared by every model of a run.
///
/// Modes are the integer vectors with `|k_l| <= cutoffs[l]`, stored in
/// lexicographic order with the first axis varying slowest. Grid nodes are
/// `theta_l = j_l / grid[l]`, in the same order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierSpace {
    cutoffs: Vec<usize>,
    grid: Vec<usize>,
}

impl FourierSpace {
    pub fn new(cutoffs: Vec<usize>, grid: Vec<usize>) -> Result<Self> {
        if cutoffs.len() < 2 {
            return Err(KamError::Invalid(format!(
                "torus dimension must be at least 2, got {}",
                cutoffs.len()
            )));
        }
        if cutoffs.len() != grid.len() {
            return Err(KamError::Shape(format!(
                "{} cutoffs but {} grid sizes",
                cutoffs.len(),
                grid.len()
            )));
        }
        for (&m, &n) in cutoffs.iter().zip(&grid) {
            if !n.is_power_of_two() {
                return Err(KamError::Invalid(format!("grid size {n} is not a power of two")));
            }
            if 2 * m > n {
                return Err(KamError::Invalid(format!("cutoff {m} exceeds half the grid size {n}")));
            }
        }
        Ok(Self { cutoffs, grid })
    }

    /// Same cutoff and grid size along every axis.
    pub fn uniform(dim: usize, cutoff: usize, grid: usize) -> Result<Self> {
        Self::new(vec![cutoff; dim], vec![grid; dim])
    }

    pub fn dim(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    /// Grid used for products and pointwise nonlinear maps.
    pub fn padded_grid(&self) -> Vec<usize> {
        self.grid.iter().map(|n| 2 * n).collect()
    }

    pub fn n_modes(&self) -> usize {
        self.cutoffs.iter().map(|m| 2 * m + 1).product()
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.iter().product()
    }

    /// Largest `|k|_1` in the mode box.
    pub fn max_order(&self) -> usize {
        self.cutoffs.iter().sum()
    }

    pub fn mode(&self, idx: usize) -> Vec<i64> {
        let mut k = vec![0; self.dim()];
        self.mode_into(idx, &mut k);
        k
    }

    pub fn mode_into(&self, mut idx: usize, k: &mut [i64]) {
        for l in (0..self.dim()).rev() {
            let w = 2 * self.cutoffs[l] + 1;
            k[l] = (idx % w) as i64 - self.cutoffs[l] as i64;
            idx /= w;
        }
    }

    pub fn index(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim() {
            return None;
        }
        let mut idx = 0usize;
        for (l, &kl) in k.iter().enumerate() {
            let m = self.cutoffs[l] as i64;
            if kl.abs() > m {
                return None;
            }
            idx = idx * (2 * m as usize + 1) + (kl + m) as usize;
        }
        Some(idx)
    }

    /// Index of `-k` for the mode stored at `idx`.
    pub fn mirror(&self, idx: usize) -> usize {
        self.n_modes() - 1 - idx
    }

    pub fn zero_index(&self) -> usize {
        self.n_modes() / 2
    }

    /// Nodes of a uniform grid, first axis slowest.
    pub fn nodes(grid: &[usize]) -> Vec<Vec<f64>> {
        let total: usize = grid.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut j = vec![0usize; grid.len()];
        for _ in 0..total {
            out.push(j.iter().zip(grid).map(|(&a, &n)| a as f64 / n as f64).collect());
            for l in (0..grid.len()).rev() {
                j[l] += 1;
                if j[l] < grid[l] {
                    break;
                }
                j[l] = 0;
            }
        }
        out
    }
}
