//! Fermionic Gaussian states in the Majorana covariance representation.
//!
//! Mode `k` owns Majoranas `c_{2k} = a_k + a_k†` and `c_{2k+1} = i (a_k - a_k†)`,
//! and `Gamma_{kl} = i <c_k c_l>` for `k != l`.

pub mod fock;
mod pfaffian;

pub use fock::FockState;
pub use pfaffian::pfaffian;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussianError {
    #[error("mode {0} out of range for a state with {1} modes")]
    ModeOutOfRange(usize, usize),
    #[error("mode {0} listed twice")]
    RepeatedMode(usize),
    #[error("bond has {bond} modes but {requested} were selected")]
    BondSize { bond: usize, requested: usize },
    #[error("matrix has shape {0}x{1}, expected {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("projection onto an orthogonal state (overlap {0:e})")]
    OrthogonalProjection(f64),
}

/// Creation or annihilation operator on one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

impl Ladder {
    pub fn mode(self) -> usize {
        match self {
            Ladder::Create(k) | Ladder::Annihilate(k) => k,
        }
    }

    pub fn adjoint(self) -> Self {
        match self {
            Ladder::Create(k) => Ladder::Annihilate(k),
            Ladder::Annihilate(k) => Ladder::Create(k),
        }
    }

    /// Coefficients on `(c_{2k}, c_{2k+1})`.
    fn majorana_coeffs(self) -> (C64, C64) {
        match self {
            Ladder::Annihilate(_) => (C64::new(0.5, 0.0), C64::new(0.0, -0.5)),
            Ladder::Create(_) => (C64::new(0.5, 0.0), C64::new(0.0, 0.5)),
        }
    }
}

/// Coupling `T_ij` between creators on a first and a second mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingMatrix {
    pub t: DMatrix<C64>,
}

impl PairingMatrix {
    pub fn new(t: DMatrix<C64>) -> Result<Self, GaussianError> {
        if t.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        Ok(Self { t })
    }

    pub fn n_a(&self) -> usize {
        self.t.nrows()
    }

    pub fn n_b(&self) -> usize {
        self.t.ncols()
    }

    /// Antisymmetric `G` on `n` modes with `G[a_i][b_j] = T_ij`.
    pub fn embed(&self, n: usize, a_modes: &[usize], b_modes: &[usize]) -> Result<DMatrix<C64>, GaussianError> {
        if a_modes.len() != self.n_a() || b_modes.len() != self.n_b() {
            return Err(GaussianError::Shape(a_modes.len(), b_modes.len(), self.n_a(), self.n_b()));
        }
        check_modes(a_modes.iter().chain(b_modes), n)?;
        let mut g = DMatrix::zeros(n, n);
        for (i, &a) in a_modes.iter().enumerate() {
            for (j, &b) in b_modes.iter().enumerate() {
                g[(a, b)] += self.t[(i, j)];
                g[(b, a)] -= self.t[(i, j)];
            }
        }
        Ok(g)
    }
}

fn check_modes<'a>(modes: impl IntoIterator<Item = &'a usize>, n: usize) -> Result<(), GaussianError> {
    let mut seen = vec![false; n];
    for &m in modes {
        if m >= n {
            return Err(GaussianError::ModeOutOfRange(m, n));
        }
        if seen[m] {
            return Err(GaussianError::RepeatedMode(m));
        }
        seen[m] = true;
    }
    Ok(())
}

/// Pure Gaussian state up to a global phase, with `log_norm = ln ||psi||`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    gamma: DMatrix<f64>,
    log_norm: f64,
}

/// Relative smallest singular value below which a projection counts as orthogonal.
const SINGULAR_TOL: f64 = 1e-12;

impl CovarianceState {
    pub fn vacuum(n: usize) -> Self {
        let mut gamma = DMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            gamma[(2 * k, 2 * k + 1)] = 1.0;
            gamma[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { gamma, log_norm: 0.0 }
    }

    /// Wrap a covariance matrix; no purity check is made.
    pub fn from_gamma(gamma: DMatrix<f64>, log_norm: f64) -> Result<Self, GaussianError> {
        let (r, c) = gamma.shape();
        if r != c || r % 2 == 1 {
            return Err(GaussianError::Shape(r, c, r + r % 2, r + r % 2));
        }
        if gamma.iter().any(|v| !v.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        Ok(Self { gamma, log_norm })
    }

    /// `exp(sum T_ij a_i† b_j†)|0>` with the `a` modes first.
    pub fn from_pairing(t: &PairingMatrix) -> Result<Self, GaussianError> {
        let (na, nb) = (t.n_a(), t.n_b());
        let a: Vec<usize> = (0..na).collect();
        let b: Vec<usize> = (na..na + nb).collect();
        Self::from_antisymmetric(&t.embed(na + nb, &a, &b)?)
    }

    /// `exp(1/2 sum G_ij a_i† a_j†)|0>` for antisymmetric `G`.
    pub fn from_antisymmetric(g: &DMatrix<C64>) -> Result<Self, GaussianError> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(GaussianError::Shape(g.nrows(), g.ncols(), n, n));
        }
        if g.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(GaussianError::NonFinite);
        }
        // annihilators d_k = a_k - sum_j G_kj a_j†, one column each
        let mut v = DMatrix::<C64>::zeros(2 * n, n);
        for k in 0..n {
            v[(2 * k, k)] += C64::new(0.5, 0.0);
            v[(2 * k + 1, k)] += C64::new(0.0, -0.5);
            for j in 0..n {
                let gkj = g[(k, j)];
                v[(2 * j, k)] -= gkj * 0.5;
                v[(2 * j + 1, k)] -= gkj * C64::new(0.0, 0.5);
            }
        }
        let vh = v.adjoint();
        let gram = &vh * &v;
        let inv = gram.try_inverse().ok_or(GaussianError::NonFinite)?;
        let p = &v * inv * vh;
        let raw = p.map(|z| 2.0 * z.im);
        let gamma = (&raw - raw.transpose()) * 0.5;
        let kernel = DMatrix::<C64>::identity(n, n) + g.adjoint() * g;
        let det = kernel.determinant().re;
        Ok(Self { gamma, log_norm: 0.25 * det.ln() })
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    pub fn with_log_norm(mut self, log_norm: f64) -> Self {
        self.log_norm = log_norm;
        self
    }

    pub fn norm_squared(&self) -> f64 {
        (2.0 * self.log_norm).exp()
    }

    pub fn antisymmetry_error(&self) -> f64 {
        (&self.gamma + self.gamma.transpose()).amax()
    }

    /// `max |Gamma Gamma^T - 1|`.
    pub fn purity_error(&self) -> f64 {
        let n = self.gamma.nrows();
        (&self.gamma * self.gamma.transpose() - DMatrix::identity(n, n)).amax()
    }

    /// Fermion parity of a pure state, `Pf(Gamma)`.
    pub fn parity(&self) -> f64 {
        pfaffian(&self.gamma)
    }

    pub fn occupation(&self, k: usize) -> f64 {
        0.5 * (1.0 - self.gamma[(2 * k, 2 * k + 1)])
    }

    /// Apply `exp(i phi n_k)`.
    pub fn rotate_mode(&mut self, k: usize, phi: f64) -> Result<(), GaussianError> {
        if k >= self.n_modes() {
            return Err(GaussianError::ModeOutOfRange(k, self.n_modes()));
        }
        let (s, c) = phi.sin_cos();
        let (p, q) = (2 * k, 2 * k + 1);
        // rows then columns of R = [[c, s], [-s, c]]
        for j in 0..self.gamma.ncols() {
            let (x, y) = (self.gamma[(p, j)], self.gamma[(q, j)]);
            self.gamma[(p, j)] = c * x + s * y;
            self.gamma[(q, j)] = -s * x + c * y;
        }
        for i in 0..self.gamma.nrows() {
            let (x, y) = (self.gamma[(i, p)], self.gamma[(i, q)]);
            self.gamma[(i, p)] = c * x + s * y;
            self.gamma[(i, q)] = -s * x + c * y;
        }
        Ok(())
    }

    /// Modes of `other` appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (n1, n2) = (self.gamma.nrows(), other.gamma.nrows());
        let mut gamma = DMatrix::zeros(n1 + n2, n1 + n2);
        gamma.view_mut((0, 0), (n1, n1)).copy_from(&self.gamma);
        gamma.view_mut((n1, n1), (n2, n2)).copy_from(&other.gamma);
        Self { gamma, log_norm: self.log_norm + other.log_norm }
    }

    /// Reorder so that new mode `k` is old mode `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, GaussianError> {
        let n = self.n_modes();
        if order.len() != n {
            return Err(GaussianError::BondSize { bond: n, requested: order.len() });
        }
        check_modes(order, n)?;
        let maj: Vec<usize> = order.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let gamma = DMatrix::from_fn(2 * n, 2 * n, |i, j| self.gamma[(maj[i], maj[j])]);
        Ok(Self { gamma, log_norm: self.log_norm })
    }

        /// Contract `modes` with the bra of `bond`, whose mode `k` sits on
    /// `modes[k]`. The remaining modes keep their relative order and the
    /// overlap probability is folded into `log_norm`.
    pub fn project(&self, modes: &[usize], bond: &CovarianceState) -> Result<Self, GaussianError> {
        let n = self.n_modes();
        if bond.n_modes() != modes.len() {
            return Err(GaussianError::BondSize { bond: bond.n_modes(), requested: modes.len() });
        }
        check_modes(modes, n)?;
        let mut contracted = vec![false; n];
        for &m in modes {
            contracted[m] = true;
        }
        let kept: Vec<usize> = (0..n)
            .filter(|&m| !contracted[m])
            .flat_map(|m| [2 * m, 2 * m + 1])
            .collect();
        let con: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let a = DMatrix::from_fn(kept.len(), kept.len(), |i, j| self.gamma[(kept[i], kept[j])]);
        let b = DMatrix::from_fn(kept.len(), con.len(), |i, j| self.gamma[(kept[i], con[j])]);
        let d = DMatrix::from_fn(con.len(), con.len(), |i, j| self.gamma[(con[i], con[j])]);
        let k = d + &bond.gamma;
        let p = pfaffian(&k).abs() * 0.5f64.powi(modes.len() as i32);
        // p shrinks geometrically with the number of bonds, so a vanishing
        // overlap is detected from the conditioning of K instead
        let sv = k.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if !(p > 0.0) || !p.is_finite() || lo <= SINGULAR_TOL * hi {
            return Err(GaussianError::OrthogonalProjection(p));
        }
        let kinv = k.try_inverse().ok_or(GaussianError::OrthogonalProjection(p))?;
        let raw = a + &b * kinv * b.transpose();
        let gamma = (&raw - raw.transpose()) * 0.5;
        Ok(Self { gamma, log_norm: self.log_norm + bond.log_norm + 0.5 * p.ln() })
    }

    /// Contract `modes_a[k]` and `modes_b[k]` with a two-mode bond state each,
    /// the bond's modes ordered `(a, b)`.
    pub fn project_pairs(&self, modes_a: &[usize], modes_b: &[usize], bond: &CovarianceState) -> Result<Self, GaussianError> {
        if bond.n_modes() != 2 || modes_a.len() != modes_b.len() {
            return Err(GaussianError::BondSize { bond: bond.n_modes(), requested: 2 });
        }
        let mut all = CovarianceState { gamma: DMatrix::zeros(0, 0), log_norm: 0.0 };
        let mut modes = Vec::with_capacity(2 * modes_a.len());
        for (&a, &b) in modes_a.iter().zip(modes_b) {
            all = all.tensor(bond);
            modes.push(a);
            modes.push(b);
        }
        self.project(&modes, &all)
    }

    /// `<c c^T> = 1 - i Gamma`.
    pub fn correlation_matrix(&self) -> DMatrix<C64> {
        let n = self.gamma.nrows();
        DMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            C64::new(d, -self.gamma[(i, j)])
        })
    }

    fn contraction(&self, o1: Ladder, o2: Ladder) -> Result<C64, GaussianError> {
        let n = self.n_modes();
        for o in [o1, o2] {
            if o.mode() >= n {
                return Err(GaussianError::ModeOutOfRange(o.mode(), n));
            }
        }
        let (u0, u1) = o1.majorana_coeffs();
        let (v0, v1) = o2.majorana_coeffs();
        let (p, q) = (2 * o1.mode(), 2 * o2.mode());
        let m = |i: usize, j: usize| {
            if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, -self.gamma[(i, j)])
            }
        };
        Ok(u0 * v0 * m(p, q) + u0 * v1 * m(p, q + 1) + u1 * v0 * m(p + 1, q) + u1 * v1 * m(p + 1, q + 1))
    }

    /// `<o1 o2>` in the normalized state.
    pub fn two_point(&self, o1: Ladder, o2: Ladder) -> Result<C64, GaussianError> {
        self.contraction(o1, o2)
    }

    /// `<o1 o2 o3 o4>` by Wick's theorem.
    pub fn four_point(&self, ops: [Ladder; 4]) -> Result<C64, GaussianError> {
        let w = |i: usize, j: usize| self.contraction(ops[i], ops[j]);
        Ok(w(0, 1)? * w(2, 3)? - w(0, 2)? * w(1, 3)? + w(0, 3)? * w(1, 2)?)
    }
}
