use super::sparse::SparseOp;
use super::ExactError;
use num_complex::Complex64 as C64;

/// Default cap on the number of amplitudes.
pub const DEFAULT_DIM_CAP: usize = 1 << 24;

/// Hilbert-space size limit, overridable through `GAUGEPEPS_DIM_CAP`.
pub fn dim_cap() -> usize {
    std::env::var("GAUGEPEPS_DIM_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}

/// Tensor layout of fermionic modes and qudits.
///
/// A basis index stores the fermion occupations in its low bits (mode `k` is bit `k`,
/// Jordan-Wigner strings run over lower modes) followed by the qudit digits in
/// mixed radix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    n_fermions: usize,
    qudit_dims: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl Layout {
    pub fn new(n_fermions: usize, qudit_dims: Vec<usize>) -> Result<Self, ExactError> {
        let cap = dim_cap();
        let mut dim: usize = 1usize
            .checked_shl(n_fermions as u32)
            .filter(|_| n_fermions < 63)
            .ok_or(ExactError::DimensionCap { requested: usize::MAX, cap })?;
        let mut strides = Vec::with_capacity(qudit_dims.len());
        for &d in &qudit_dims {
            strides.push(dim);
            dim = dim
                .checked_mul(d)
                .ok_or(ExactError::DimensionCap { requested: usize::MAX, cap })?;
        }
        if dim > cap {
            return Err(ExactError::DimensionCap { requested: dim, cap });
        }
        Ok(Self { n_fermions, qudit_dims, strides, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn n_qudits(&self) -> usize {
        self.qudit_dims.len()
    }

    pub fn qudit_dim(&self, q: usize) -> usize {
        self.qudit_dims[q]
    }

    pub fn occupation(&self, basis: usize, mode: usize) -> usize {
        (basis >> mode) & 1
    }

    pub fn digit(&self, basis: usize, q: usize) -> usize {
        (basis / self.strides[q]) % self.qudit_dims[q]
    }

    pub fn with_digit(&self, basis: usize, q: usize, value: usize) -> usize {
        let old = self.digit(basis, q);
        basis - old * self.strides[q] + (value % self.qudit_dims[q]) * self.strides[q]
    }

    pub fn fermion_bits(&self, basis: usize) -> usize {
        basis & ((1usize << self.n_fermions) - 1)
    }

    fn jw_sign(basis: usize, mode: usize) -> f64 {
        if (basis & ((1usize << mode) - 1)).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn annihilate(&self, mode: usize) -> SparseOp {
        assert!(mode < self.n_fermions);
        SparseOp::from_columns(self.dim, |b| {
            if (b >> mode) & 1 == 1 {
                vec![(b ^ (1 << mode), C64::new(Self::jw_sign(b, mode), 0.0))]
            } else {
                Vec::new()
            }
        })
    }

    pub fn create(&self, mode: usize) -> SparseOp {
        assert!(mode < self.n_fermions);
        SparseOp::from_columns(self.dim, |b| {
            if (b >> mode) & 1 == 0 {
                vec![(b ^ (1 << mode), C64::new(Self::jw_sign(b, mode), 0.0))]
            } else {
                Vec::new()
            }
        })
    }

    pub fn number(&self, mode: usize) -> SparseOp {
        SparseOp::diagonal(self.dim, |b| C64::new(((b >> mode) & 1) as f64, 0.0))
    }

    /// Majorana `a + a†`.
    pub fn majorana_x(&self, mode: usize) -> SparseOp {
        self.annihilate(mode).add(&self.create(mode))
    }

    /// Majorana `i (a - a†)`.
    pub fn majorana_y(&self, mode: usize) -> SparseOp {
        self.annihilate(mode)
            .sub(&self.create(mode))
            .scale(C64::new(0.0, 1.0))
    }

    /// Total fermion parity `(-1)^N`.
    pub fn parity(&self) -> SparseOp {
        SparseOp::diagonal(self.dim, |b| {
            let n = self.fermion_bits(b).count_ones();
            C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })
    }

    /// Cyclic raising `|j> -> |j + power mod d>`.
    pub fn shift(&self, q: usize, power: i64) -> SparseOp {
        let d = self.qudit_dims[q] as i64;
        SparseOp::from_columns(self.dim, |b| {
            let j = self.digit(b, q) as i64;
            let k = (j + power).rem_euclid(d) as usize;
            vec![(self.with_digit(b, q, k), C64::new(1.0, 0.0))]
        })
    }

    pub fn diagonal(&self, f: impl Fn(usize) -> C64) -> SparseOp {
        SparseOp::diagonal(self.dim, f)
    }

    pub fn permutation(&self, f: impl Fn(usize) -> usize) -> SparseOp {
        SparseOp::from_columns(self.dim, |b| vec![(f(b), C64::new(1.0, 0.0))])
    }

    pub fn identity(&self) -> SparseOp {
        SparseOp::identity(self.dim)
    }
}

/// Value of a Z_N index in the symmetric window `floor(-N/2) ..= ceil(N/2) - 1`.
pub fn symmetric_value(j: usize, n: usize) -> i64 {
    let j = j as i64;
    let n = n as i64;
    if j >= n - n / 2 {
        j - n
    } else {
        j
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_anticommutators() {
        let l = Layout::new(3, vec![2]).unwrap();
        let id = l.identity();
        for i in 0..3 {
            for j in 0..3 {
                let a = l.annihilate(i);
                let ad = l.create(j);
                let anti = a.mul(&ad).add(&ad.mul(&a));
                let expect = if i == j { id.clone() } else { SparseOp::zeros(l.dim()) };
                assert!(anti.max_abs_diff(&expect) < 1e-15);
                let aa = l.annihilate(i).mul(&l.annihilate(j)).add(&l.annihilate(j).mul(&l.annihilate(i)));
                assert!(aa.max_abs() < 1e-15);
            }
        }
    }

    #[test]
    fn shift_is_cyclic_and_unitary() {
        let l = Layout::new(1, vec![3, 4]).unwrap();
        let u = l.shift(1, 1);
        let mut p = l.identity();
        for _ in 0..4 {
            p = p.mul(&u);
        }
        assert!(p.max_abs_diff(&l.identity()) < 1e-15);
        assert!(u.mul(&u.adjoint()).max_abs_diff(&l.identity()) < 1e-15);
    }

    #[test]
    fn symmetric_window() {
        assert_eq!((0..3).map(|j| symmetric_value(j, 3)).collect::<Vec<_>>(), vec![0, 1, -1]);
        assert_eq!((0..4).map(|j| symmetric_value(j, 4)).collect::<Vec<_>>(), vec![0, 1, -2, -1]);
        assert_eq!((0..2).map(|j| symmetric_value(j, 2)).collect::<Vec<_>>(), vec![0, -1]);
    }

    #[test]
    fn majoranas_square_to_one() {
        let l = Layout::new(2, vec![]).unwrap();
        for m in [l.majorana_x(1), l.majorana_y(1)] {
            assert!(m.mul(&m).max_abs_diff(&l.identity()) < 1e-15);
            assert!(m.hermiticity_error() < 1e-15);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            Layout::new(30, vec![]),
            Err(ExactError::DimensionCap { .. })
        ));
    }
}
