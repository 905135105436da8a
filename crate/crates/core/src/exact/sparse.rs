use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::collections::HashMap;

/// Column-compressed complex matrix; column `j` lists `(row, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    cols: Vec<Vec<(usize, C64)>>,
}

impl SparseOp {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(dim, |_| C64::new(1.0, 0.0))
    }

    pub fn diagonal(dim: usize, f: impl Fn(usize) -> C64) -> Self {
        let cols = (0..dim)
            .map(|j| {
                let v = f(j);
                if v == C64::new(0.0, 0.0) {
                    Vec::new()
                } else {
                    vec![(j, v)]
                }
            })
            .collect();
        Self { dim, cols }
    }

    /// Build from the image of every basis vector.
    pub fn from_columns(dim: usize, f: impl Fn(usize) -> Vec<(usize, C64)>) -> Self {
        let cols = (0..dim).map(|j| compress(f(j))).collect();
        Self { dim, cols }
    }

    pub fn from_dense(m: &DMatrix<C64>) -> Self {
        let dim = m.nrows();
        Self::from_columns(dim, |j| (0..dim).map(|i| (i, m[(i, j)])).filter(|(_, v)| v.norm() > 0.0).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, C64)] {
        &self.cols[j]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.cols[j]
            .iter()
            .find(|(r, _)| *r == i)
            .map(|(_, v)| *v)
            .unwrap_or_default()
    }

    pub fn scale(&self, s: C64) -> Self {
        let cols = self
            .cols
            .iter()
            .map(|c| c.iter().map(|&(i, v)| (i, v * s)).collect())
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| compress(a.iter().chain(b.iter()).copied().collect()))
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let cols = other
            .cols
            .iter()
            .map(|bcol| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for &(k, bv) in bcol {
                    for &(i, av) in &self.cols[k] {
                        acc.push((i, av * bv));
                    }
                }
                compress(acc)
            })
            .collect();
        Self { dim: self.dim, cols }
    }

    pub fn adjoint(&self) -> Self {
        let mut cols = vec![Vec::new(); self.dim];
        for (i, j, v) in self.entries() {
            cols[i].push((j, v.conj()));
        }
        Self { dim: self.dim, cols }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![C64::default(); self.dim];
        for (j, c) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == C64::default() {
                continue;
            }
            for &(i, v) in c {
                y[i] += v * xj;
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] += v;
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Bound on the operator norm: the largest absolute column sum.
    pub fn norm_bound(&self) -> f64 {
        self.cols
            .iter()
            .map(|c| c.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `exp(s A) x` by a scaled Taylor series.
    pub fn exp_apply(&self, s: C64, x: &[C64]) -> Vec<C64> {
        let scale = self.norm_bound() * s.norm();
        let chunks = (scale / 0.5).ceil().max(1.0) as usize;
        let h = s / chunks as f64;
        let mut v = x.to_vec();
        for _ in 0..chunks {
            let mut term = v.clone();
            let mut out = v.clone();
            for k in 1..200 {
                term = self.apply(&term);
                let f = h / k as f64;
                term.iter_mut().for_each(|t| *t *= f);
                let tn: f64 = term.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
                out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
                if tn < 1e-18 {
                    break;
                }
            }
            v = out;
        }
        v
    }

    /// Restrict to the listed basis states (rows and columns).
    pub fn restrict(&self, basis: &[usize]) -> DMatrix<C64> {
        let pos: HashMap<usize, usize> = basis.iter().enumerate().map(|(k, &b)| (b, k)).collect();
        let mut m = DMatrix::zeros(basis.len(), basis.len());
        for (jc, &j) in basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                if let Some(&ic) = pos.get(&i) {
                    m[(ic, jc)] += v;
                }
            }
        }
        m
    }
}

fn compress(mut entries: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    entries.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| v.norm() > 1e-300);
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_spectrum(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}
