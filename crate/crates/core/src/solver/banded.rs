//! Banded LU with partial pivoting.
//!
//! Rows are stored densely over the band plus `kl` extra super-diagonals
//! that absorb fill-in from row interchanges, the same layout idea as
//! LAPACK's `dgbtrf`.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// Row stride: columns `i - kl ..= i + ku + kl` of row `i`.
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clear(&mut self) {
        self.data.fill(0.0);
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    /// Adds `v` at `(i, j)`, which must lie inside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside band");
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Factors in place. Fails on an exactly singular pivot column.
    pub fn factor(mut self) -> Result<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = vec![0usize; n];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.offset(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.data[self.offset(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Precondition(format!(
                    "singular or non-finite Jacobian at column {k}"
                )));
            }
            pivots[k] = p;
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.offset(k, j), self.offset(p, j));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.offset(k, k)];
            for i in k + 1..=last_row {
                let oik = self.offset(i, k);
                let l = self.data[oik] / pivot;
                self.data[oik] = l;
                if l != 0.0 {
                    for j in k + 1..=last_col {
                        let (okj, oij) = (self.offset(k, j), self.offset(i, j));
                        self.data[oij] -= l * self.data[okj];
                    }
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
    /// Solves `A x = b` in place.
    pub fn solve(&self, b: &mut [f64]) {
        let m = &self.m;
        let (n, kl, ku) = (m.n, m.kl, m.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= m.data[m.offset(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut sum = b[i];
            for j in i + 1..=(i + ku + kl).min(n - 1) {
                sum -= m.data[m.offset(i, j)] * b[j];
            }
            b[i] = sum / m.data[m.offset(i, i)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    fn random_band(n: usize, kl: usize, ku: usize, vals: &[f64]) -> (BandMatrix, DMatrix<f64>) {
        let mut band = BandMatrix::new(n, kl, ku);
        let mut dense = DMatrix::zeros(n, n);
        let mut it = vals.iter().cycle();
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = *it.next().unwrap();
                band.add(i, j, v);
                dense[(i, j)] = v;
            }
        }
        (band, dense)
    }

    #[test]
    fn needs_pivoting() {
        // zero leading diagonal forces a row swap
        let mut a = BandMatrix::new(3, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 2.0);
        a.add(1, 1, 1.0);
        a.add(1, 2, 1.0);
        a.add(2, 1, 3.0);
        a.add(2, 2, 1.0);
        let lu = a.factor().unwrap();
        let mut b = vec![1.0, 7.0, 7.0];
        lu.solve(&mut b);
        // x = (1, 1, 4): row0 = 1, row1 = 2 + 1 + 4 = 7, row2 = 3 + 4 = 7
        for (x, e) in b.iter().zip([1.0, 1.0, 4.0]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_is_an_error() {
        let a = BandMatrix::new(2, 1, 1);
        assert!(a.factor().is_err());
    }

    proptest! {
        #[test]
        fn matches_dense_solve(
            n in 1usize..40,
            kl in 0usize..6,
            ku in 0usize..6,
            vals in proptest::collection::vec(-1.0f64..1.0, 64),
            rhs in proptest::collection::vec(-1.0f64..1.0, 40),
        ) {
            let (band, dense) = random_band(n, kl, ku, &vals);
            let rhs = DVector::from_iterator(n, rhs.into_iter().take(n));
            let Some(expected) = dense.clone().lu().solve(&rhs) else { return Ok(()); };
            if dense.clone().try_inverse().is_none_or(|inv| inv.norm() * dense.norm() > 1e8) {
                return Ok(());
            }
            let lu = band.factor().unwrap();
            let mut x = rhs.as_slice().to_vec();
            lu.solve(&mut x);
            for i in 0..n {
                prop_assert!((x[i] - expected[i]).abs() < 1e-7 * (1.0 + expected[i].abs()));
            }
        }
    }
}
