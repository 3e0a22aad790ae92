//! Banded LU factorization with partial pivoting.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular at column {0}")]
    Singular(usize),
    #[error("entry ({row}, {col}) lies outside the band")]
    OutOfBand { row: usize, col: usize },
}

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Rows are stored densely over `[i - kl, i + kl + ku]`, leaving room for the
/// fill-in produced by row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        BandMatrix {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.width + (col + self.kl - row)
    }

    #[inline]
    fn in_storage(&self, row: usize, col: usize) -> bool {
        col + self.kl >= row && col <= row + self.kl + self.ku && col < self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if self.in_storage(row, col) {
            self.data[self.idx(row, col)]
        } else {
            0.0
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) -> Result<(), LinalgError> {
        if col + self.kl < row || col > row + self.ku || col >= self.n {
            return Err(LinalgError::OutOfBand { row, col });
        }
        let k = self.idx(row, col);
        self.data[k] += value;
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Factors in place, consuming the matrix.
    pub fn factor(mut self) -> Result<BandLu, LinalgError> {
        let n = self.n;
        let kl = self.kl;
        let span = kl + self.ku;
        let mut pivots = vec![0usize; n];
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.idx(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || best <= scale * 1e-300 {
                return Err(LinalgError::Singular(k));
            }
            pivots[k] = p;
            let last_col = (k + span).min(n - 1);
            if p != k {
                for c in k..=last_col {
                    let a = self.idx(k, c);
                    let b = self.idx(p, c);
                    self.data.swap(a, b);
                }
            }
            let diag = self.data[self.idx(k, k)];
            for r in k + 1..=last_row {
                let ir = self.idx(r, k);
                let l = self.data[ir] / diag;
                self.data[ir] = l;
                if l == 0.0 {
                    continue;
                }
                let rk = self.idx(k, k);
                let rr = self.idx(r, k);
                for off in 1..=(last_col - k) {
                    self.data[rr + off] -= l * self.data[rk + off];
                }
            }
        }
        Ok(BandLu { m: self, pivots })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.m.n;
        let kl = self.m.kl;
        let span = kl + self.m.ku;
        let mut x = rhs.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + kl).min(n - 1) {
                    x[r] -= self.m.data[self.m.idx(r, k)] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            let base = self.m.idx(k, k);
            for c in k + 1..=(k + span).min(n - 1) {
                acc -= self.m.data[base + (c - k)] * x[c];
            }
            x[k] = acc / self.m.data[base];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_band_system_solves_to_roundoff() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (n, kl, ku) = (60, 4, 3);
        let mut m = BandMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                m.add(i, j, rng.gen_range(-1.0..1.0)).unwrap();
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = m.matvec(&x);
        let lu = m.factor().unwrap();
        let y = lu.solve(&b);
        let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn zero_pivot_column_is_singular() {
        let mut m = BandMatrix::zeros(3, 1, 1);
        m.add(0, 0, 1.0).unwrap();
        m.add(2, 2, 1.0).unwrap();
        assert_eq!(m.factor().unwrap_err(), LinalgError::Singular(1));
    }

    #[test]
    fn out_of_band_is_reported() {
        let mut m = BandMatrix::zeros(5, 1, 1);
        assert!(m.add(0, 3, 1.0).is_err());
    }
}
