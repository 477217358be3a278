//! Symmetric positive definite banded matrices and their Cholesky factor.

use crate::error::SolverError;

/// Lower band of a symmetric matrix: entry (i, j) with `i - bw <= j <= i`
/// lives at `data[i * (bw + 1) + (i - j)]`.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (i - j)
    }

    pub fn add_diag(&mut self, i: usize, v: f64) {
        let k = self.idx(i, i);
        self.data[k] += v;
    }

    /// Adds a conductance `g` between unknowns `a` and `b`.
    pub fn add_link(&mut self, a: usize, b: usize, g: f64) {
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        self.add_diag(a, g);
        self.add_diag(b, g);
        let k = self.idx(hi, lo);
        self.data[k] -= g;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bw {
            0.0
        } else {
            self.data[self.idx(hi, lo)]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..=i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// In-place Cholesky factorization.
    pub fn factor(mut self) -> Result<BandedCholesky, SolverError> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = self.data[i * w + (i - j)];
                let klo = lo.max(j.saturating_sub(bw));
                for k in klo..j {
                    sum -= self.data[i * w + (i - k)] * self.data[j * w + (j - k)];
                }
                if j == i {
                    if !(sum > 0.0) {
                        return Err(SolverError::SingularSystem(i));
                    }
                    self.data[i * w] = sum.sqrt();
                } else {
                    self.data[i * w + (i - j)] = sum / self.data[j * w];
                }
            }
        }
        Ok(BandedCholesky { m: self })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    m: BandedMatrix,
}

impl BandedCholesky {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.m.n, self.m.bw);
        let w = bw + 1;
        let d = &self.m.data;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut s = y[i];
            for k in lo..i {
                s -= d[i * w + (i - k)] * y[k];
            }
            y[i] = s / d[i * w];
        }
        for i in (0..n).rev() {
            y[i] /= d[i * w];
            let yi = y[i];
            let lo = i.saturating_sub(bw);
            for k in lo..i {
                y[k] -= d[i * w + (i - k)] * yi;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn solves_tridiagonal() {
        // -u'' = 1 on 5 interior points, Dirichlet zero ends
        let n = 5;
        let mut a = BandedMatrix::zeros(n, 1);
        for i in 0..n {
            a.add_diag(i, 2.0);
            if i + 1 < n {
                a.data[(i + 1) * 2 + 1] = -1.0;
            }
        }
        let x = a.factor().unwrap().solve(&[1.0; 5]);
        let exact = [2.5, 4.0, 4.5, 4.0, 2.5];
        for (a, b) in x.iter().zip(exact) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_indefinite() {
        let mut a = BandedMatrix::zeros(2, 1);
        a.add_link(0, 1, 1.0);
        assert!(matches!(a.factor(), Err(SolverError::SingularSystem(1))));
    }

    proptest! {
        #[test]
        fn residual_is_small(n in 2usize..40, bw in 1usize..6, seed in 0u64..1000) {
            let mut a = BandedMatrix::zeros(n, bw);
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as f64 / (1u64 << 31) as f64 };
            for i in 0..n {
                a.add_diag(i, 0.1 + next());
                for j in i.saturating_sub(bw)..i {
                    a.add_link(i, j, next());
                }
            }
            let b: Vec<f64> = (0..n).map(|_| next() - 0.5).collect();
            let x = a.clone().factor().unwrap().solve(&b);
            let r = a.mul_vec(&x);
            for (ri, bi) in r.iter().zip(&b) {
                prop_assert!((ri - bi).abs() < 1e-10);
            }
        }
    }
}
