//! Banded storage and an unpivoted LU for the assembled tangent.

use nalgebra::{DMatrix, DVector};

/// Square matrix with equal lower and upper half-bandwidth.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    half: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        let half = half_bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            half,
            data: vec![0.0; n * (2 * half + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.half, "({i}, {j}) outside band");
        i * (2 * self.half + 1) + (j + self.half - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > self.half {
            0.0
        } else {
            self.data[self.index(i, j)]
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.index(i, j);
        self.data[k] += v;
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.half);
                let hi = (i + self.half).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b`. Tries the banded factorization first and falls back
    /// to a pivoted dense LU when a pivot is too small.
    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        if let Some(x) = self.clone().banded_lu_solve(b) {
            return Some(x);
        }
        let lu = self.to_dense().lu();
        lu.solve(&DVector::from_column_slice(b))
            .map(|x| x.as_slice().to_vec())
            .filter(|x| x.iter().all(|v| v.is_finite()))
    }

    fn banded_lu_solve(mut self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let h = self.half;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = scale * 1e-13;
        for k in 0..n {
            let pivot = self.data[self.index(k, k)];
            if !(pivot.abs() > tiny) {
                return None;
            }
            let end = (k + h).min(n - 1);
            for i in k + 1..=end {
                let lik = self.data[self.index(i, k)] / pivot;
                if lik == 0.0 {
                    continue;
                }
                let ik = self.index(i, k);
                self.data[ik] = lik;
                for j in k + 1..=end {
                    let kj = self.data[self.index(k, j)];
                    let ij = self.index(i, j);
                    self.data[ij] -= lik * kj;
                }
            }
        }
        let mut x = b.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(h);
            let mut s = x[i];
            for (j, xj) in x.iter().enumerate().take(i).skip(lo) {
                s -= self.data[self.index(i, j)] * xj;
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + h).min(n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= self.data[self.index(i, j)] * x[j];
            }
            x[i] = s / self.data[self.index(i, i)];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}
