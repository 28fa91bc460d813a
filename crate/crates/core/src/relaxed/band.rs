//! Symmetric banded matrices and their Cholesky factorization.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    pub n: usize,
    pub bw: usize,
    /// Row `i` holds entries `(i, i - bw ..= i)`, diagonal last.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        BandMatrix { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw - (i - j)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// Add to entry `(i, j)` (and implicitly `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Make row and column `i` those of the identity.
    pub fn pin(&mut self, i: usize) {
        for j in i.saturating_sub(self.bw)..=(i + self.bw).min(self.n - 1) {
            let (a, b) = if i >= j { (i, j) } else { (j, i) };
            let k = self.idx(a, b);
            self.data[k] = if i == j { 1.0 } else { 0.0 };
        }
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    #[cfg(test)]
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            for j in i.saturating_sub(self.bw)..=i {
                let a = self.data[self.idx(i, j)];
                y[i] += a * x[j];
                if i != j {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Cholesky factor `L` (stored in the same layout), or `None` if not positive definite.
    pub fn cholesky(&self) -> Option<BandMatrix> {
        let mut l = self.clone();
        for j in 0..self.n {
            let lo = j.saturating_sub(self.bw);
            let mut s = l.data[l.idx(j, j)];
            for k in lo..j {
                let v = l.data[l.idx(j, k)];
                s -= v * v;
            }
            if !(s > 0.0) || !s.is_finite() {
                return None;
            }
            let d = s.sqrt();
            let kjj = l.idx(j, j);
            l.data[kjj] = d;
            for i in j + 1..(j + self.bw + 1).min(self.n) {
                let lo_i = i.saturating_sub(self.bw);
                let mut s = l.data[l.idx(i, j)];
                for k in lo_i.max(lo)..j {
                    s -= l.data[l.idx(i, k)] * l.data[l.idx(j, k)];
                }
                let kij = l.idx(i, j);
                l.data[kij] = s / d;
            }
        }
        Some(l)
    }

    /// Solve `L Lᵀ x = b` with `self` a Cholesky factor.
    pub fn cholesky_solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(self.bw)..i {
                s -= self.data[self.idx(i, k)] * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + self.bw + 1).min(n) {
                s -= self.data[self.idx(k, i)] * y[k];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x);
        let got = a.cholesky().unwrap().cholesky_solve(&b);
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-11);
        }
    }

    #[test]
    fn wide_band_and_indefinite() {
        let n = 20;
        let mut a = BandMatrix::zeros(n, 3);
        for i in 0..n {
            a.add(i, i, 10.0);
            for d in 1..=3 {
                if i >= d {
                    a.add(i, i - d, 1.0 / d as f64);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 7.0).collect();
        let got = a.cholesky().unwrap().cholesky_solve(&a.mul_vec(&x));
        assert!(got.iter().zip(&x).all(|(g, e)| (g - e).abs() < 1e-12));
        let mut b = BandMatrix::zeros(2, 1);
        b.add(0, 0, 1.0);
        b.add(1, 0, 2.0);
        b.add(1, 1, 1.0);
        assert!(b.cholesky().is_none());
    }
}
