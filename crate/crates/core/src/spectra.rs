//! Transfer operators of the gauged fPEPS norm on an infinite cylinder.
//!
//! The circumference `N_y` is periodic. Link angles take values in `Z_N` and
//! are summed column by column. Each angle only rotates modes of its origin
//! vertex, so the sum stays inside one column and needs no extra index.
//! Sublattice parity alternates along x, so the translation unit is a cell
//! of two columns, even column first.
//!
//! A column leg index runs over the Fock states of its virtual modes
//! `[l+, l-]` (or `[r+, r-]`) for rows `0..N_y`, ket and bra combined as
//! `ket * 4^N_y + bra`. Averaging the horizontal angles forces equal ket
//! and bra fields mod N on every row, so the cell operator is kept on that
//! allowed subspace only.

use crate::fpeps::{build_t, site_generator, FpepsError, SiteTensorParams, D_M, D_P, L_M, L_P, MODES_PER_SITE, PSI, R_M, R_P, U_M, U_P};
use crate::gaussian::{FockState, GaussianError};
use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use thiserror::Error;

/// Largest transfer dimension built by default.
pub const DEFAULT_CAP: usize = 10_000;

/// Relative gap below which the two leading eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("circumference must be at least 2, got {0}")]
    BadCircumference(usize),
    #[error("link modulus must be at least 2, got {0}")]
    BadModulus(usize),
    #[error("row {0} outside a cylinder of circumference {1}")]
    BadRow(usize, usize),
    #[error("transfer dimension {dim} exceeds the cap {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("asked for {k} eigenvalues of a {dim}-dimensional operator")]
    TooManyEigenvalues { k: usize, dim: usize },
    #[error("eigendecomposition did not converge")]
    NoConvergence,
    #[error("leading eigenvalue vanishes")]
    ZeroSpectrum,
    #[error(transparent)]
    Fpeps(#[from] FpepsError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

/// Operator placed on the first (even) column of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    None,
    /// `U` on the horizontal link leaving row `row`.
    LinkPhase { row: usize },
    /// `psi†psi` on the vertex in row `row`.
    Occupation { row: usize },
}

/// One column's ket tensor for each vertical angle configuration, indexed
/// `l | p << 2 N_y | r << 3 N_y` with `p` the physical occupations.
#[derive(Debug, Clone)]
struct Column {
    kets: Vec<Vec<C64>>,
}

/// Cylinder data shared by every transfer operator at fixed parameters.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub ny: usize,
    pub n: usize,
    columns: [Column; 2],
    /// `B[r | l << 2 N_y]`, the horizontal bond pair state.
    bond: Vec<C64>,
    /// Allowed leg indices of the cell operator.
    allowed: Vec<usize>,
}

/// Cell transfer operator on the allowed subspace.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    pub matrix: DMatrix<C64>,
    pub ny: usize,
    pub n: usize,
    pub insertion: Insertion,
}

impl TransferOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn field(bits: usize, row: usize) -> i64 {
    ((bits >> (2 * row)) & 1) as i64 - ((bits >> (2 * row + 1)) & 1) as i64
}

fn same_mod(a: i64, n: usize) -> bool {
    a.rem_euclid(n as i64) == 0
}

impl Cylinder {
    pub fn new(params: &SiteTensorParams, ny: usize, n: usize) -> Result<Self, SpectraError> {
        Self::with_cap(params, ny, n, DEFAULT_CAP)
    }

    pub fn with_cap(params: &SiteTensorParams, ny: usize, n: usize, cap: usize) -> Result<Self, SpectraError> {
        if ny < 2 {
            return Err(SpectraError::BadCircumference(ny));
        }
        if n < 2 {
            return Err(SpectraError::BadModulus(n));
        }
        let leg = 1usize << (2 * ny);
        if ny > 6 || leg * leg > cap {
            return Err(SpectraError::TooLarge { dim: leg.saturating_mul(leg), cap });
        }
        let columns = [column(params, ny, n, 1)?, column(params, ny, n, -1)?];
        // pair states exp(l† r†) per row and sign, modes [r-block, l-block]
        let mut b = FockState::vacuum(4 * ny);
        let one = C64::new(1.0, 0.0);
        let pairs: Vec<(usize, usize, C64)> = (0..2 * ny).map(|k| (2 * ny + k, k, one)).collect();
        b.apply_pairing(&pairs)?;
        let scale = C64::new(0.5f64.powi(ny as i32), 0.0);
        let bond = b.amplitudes().iter().map(|a| a * scale).collect();
        let allowed = (0..leg * leg)
            .filter(|&i| {
                let (k, b) = (i / leg, i % leg);
                (0..ny).all(|row| same_mod(field(k, row) - field(b, row), n))
            })
            .collect();
        Ok(Self { ny, n, columns, bond, allowed })
    }

    fn leg(&self) -> usize {
        1 << (2 * self.ny)
    }

    /// Double-layer column matrix `E[(l, l'), (r, r')]`, averaged over the
    /// column's link angles. `parity` is the sublattice sign of row 0.
    pub fn column_matrix(&self, parity: i32, insertion: Insertion) -> Result<DMatrix<C64>, SpectraError> {
        let ny = self.ny;
        match insertion {
            Insertion::LinkPhase { row } | Insertion::Occupation { row } if row >= ny => {
                return Err(SpectraError::BadRow(row, ny));
            }
            _ => {}
        }
        let col = &self.columns[if parity > 0 { 0 } else { 1 }];
        let leg = self.leg();
        let np = 1usize << ny;
        let idx = |l: usize, p: usize, r: usize| l | (p << (2 * ny)) | (r << (3 * ny));
        let weight = |p: usize| match insertion {
            Insertion::Occupation { row } => ((p >> row) & 1) as f64,
            _ => 1.0,
        };
        // the horizontal angles average to a Z_N delta per row; U shifts it by one
        let shift = |row: usize| match insertion {
            Insertion::LinkPhase { row: r } if r == row => 1,
            _ => 0,
        };
        let rows_ok = |r: usize, rb: usize| (0..ny).all(|row| same_mod(field(r, row) - field(rb, row) + shift(row), self.n));
        let norm = 1.0 / (self.n as f64).powi(ny as i32);
        let data: Vec<Vec<C64>> = (0..leg * leg)
            .into_par_iter()
            .map(|row_i| {
                let (l, lb) = (row_i / leg, row_i % leg);
                let mut out = vec![C64::default(); leg * leg];
                for ket in &col.kets {
                    for p in 0..np {
                        let w = weight(p);
                        if w == 0.0 {
                            continue;
                        }
                        for r in 0..leg {
                            let a = ket[idx(l, p, r)];
                            if a == C64::default() {
                                continue;
                            }
                            for rb in 0..leg {
                                let b = ket[idx(lb, p, rb)];
                                if b == C64::default() || !rows_ok(r, rb) {
                                    continue;
                                }
                                out[r * leg + rb] += a * b.conj() * (w * norm);
                            }
                        }
                    }
                }
                out
            })
            .collect();
        Ok(DMatrix::from_fn(leg * leg, leg * leg, |i, j| data[i][j]))
    }

    /// Bond matrix `W[(r, r'), (l, l')] = conj(B[r, l]) B[r', l']`.
    pub fn bond_matrix(&self) -> DMatrix<C64> {
        let leg = self.leg();
        let b = |r: usize, l: usize| self.bond[r | (l << (2 * self.ny))];
        DMatrix::from_fn(leg * leg, leg * leg, |i, j| {
            let (r, rb) = (i / leg, i % leg);
            let (l, lb) = (j / leg, j % leg);
            b(r, l).conj() * b(rb, lb)
        })
    }

    /// Full cell `W E_first W E_second` between the right legs of two
    /// second-type columns. `first_parity` is the sublattice sign of row 0 in
    /// the first column of the cell.
    pub fn full_cell(&self, first_parity: i32, insertion: Insertion) -> Result<DMatrix<C64>, SpectraError> {
        let w = self.bond_matrix();
        let e1 = self.column_matrix(first_parity, insertion)?;
        let e2 = self.column_matrix(-first_parity, Insertion::None)?;
        Ok(&w * e1 * &w * e2)
    }

    pub fn transfer(&self, insertion: Insertion) -> Result<TransferOperator, SpectraError> {
        self.transfer_from(1, insertion)
    }

    pub fn transfer_from(&self, first_parity: i32, insertion: Insertion) -> Result<TransferOperator, SpectraError> {
        let full = self.full_cell(first_parity, insertion)?;
        let a = &self.allowed;
        let matrix = DMatrix::from_fn(a.len(), a.len(), |i, j| full[(a[i], a[j])]);
        Ok(TransferOperator { matrix, ny: self.ny, n: self.n, insertion })
    }

    /// Vacuum legs on the allowed subspace.
    pub fn vacuum_vector(&self) -> Vec<C64> {
        self.allowed.iter().map(|&i| if i == 0 { C64::new(1.0, 0.0) } else { C64::default() }).collect()
    }

    /// Norm of a finite cylinder of `columns` columns with vacuum ends,
    /// averaged over all `Z_N` link configurations.
    pub fn finite_norm(&self, columns: usize) -> Result<f64, SpectraError> {
        let w = self.bond_matrix();
        let leg = self.leg();
        let mut v = DMatrix::<C64>::zeros(1, leg * leg);
        v[(0, 0)] = C64::new(1.0, 0.0);
        for c in 0..columns {
            let parity = if c % 2 == 0 { 1 } else { -1 };
            v = v * self.column_matrix(parity, Insertion::None)?;
            if c + 1 < columns {
                v = v * &w;
            }
        }
        Ok(v[(0, 0)].re)
    }
}

/// Ket tensors of one column for every vertical angle configuration.
fn column(params: &SiteTensorParams, ny: usize, n: usize, parity0: i32) -> Result<Column, SpectraError> {
    let t = build_t(params)?;
    let sites: Vec<FockState> = (0..ny)
        .map(|y| {
            let parity = if y % 2 == 0 { parity0 } else { -parity0 };
            let g = site_generator(parity, &t)?;
            let mut s = FockState::vacuum(MODES_PER_SITE);
            let mut pairs = Vec::new();
            for i in 0..MODES_PER_SITE {
                for j in i + 1..MODES_PER_SITE {
                    if g[(i, j)] != C64::default() {
                        pairs.push((i, j, g[(i, j)]));
                    }
                }
            }
            s.apply_pairing(&pairs)?;
            Ok(s)
        })
        .collect::<Result<_, SpectraError>>()?;
    let configs = n.pow(ny as u32);
    let kets = (0..configs)
        .into_par_iter()
        .map(|c| {
            // state row by row, each vertical link closed as soon as both ends exist
            let mut state = FockState::vacuum(0);
            let mut labels: Vec<usize> = Vec::new();
            for y in 0..ny {
                let phi = TAU * ((c / n.pow(y as u32)) % n) as f64 / n as f64;
                let mut s = sites[y].clone();
                s.rotate(U_P, phi)?;
                s.rotate(U_M, -phi)?;
                state = state.tensor(&s);
                labels.extend(y * MODES_PER_SITE..(y + 1) * MODES_PER_SITE);
                let mut links = Vec::new();
                if y > 0 {
                    links.push((y - 1, y));
                }
                if y == ny - 1 {
                    links.push((y, 0));
                }
                let mut pairs = Vec::new();
                for (o, tg) in links {
                    for (u, d) in [(U_P, D_P), (U_M, D_M)] {
                        let a = o * MODES_PER_SITE + u;
                        let b = tg * MODES_PER_SITE + d;
                        pairs.push((a, b));
                    }
                }
                let pos: Vec<(usize, usize, C64)> = pairs
                    .iter()
                    .map(|&(a, b)| {
                        let pa = labels.iter().position(|&x| x == a).unwrap();
                        let pb = labels.iter().position(|&x| x == b).unwrap();
                        (pa, pb, C64::new(1.0, 0.0))
                    })
                    .collect();
                state = state.project_pairs(&pos)?;
                labels.retain(|x| !pairs.iter().any(|&(a, b)| a == *x || b == *x));
            }
            let find = |y: usize, k: usize| labels.iter().position(|&x| x == y * MODES_PER_SITE + k).unwrap();
            let mut order = Vec::with_capacity(labels.len());
            for y in 0..ny {
                order.push(find(y, L_P));
                order.push(find(y, L_M));
            }
            for y in 0..ny {
                order.push(find(y, PSI));
            }
            for y in 0..ny {
                order.push(find(y, R_P));
                order.push(find(y, R_M));
            }
            Ok(state.permute(&order)?.amplitudes().to_vec())
        })
        .collect::<Result<_, SpectraError>>()?;
    Ok(Column { kets })
}

/// Eigenvalues with right eigenvectors (columns of `right`) and the dual
/// left eigenvectors (rows of `left`, `left * right = 1`), sorted by
/// decreasing modulus.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub right: DMatrix<C64>,
    pub left: DMatrix<C64>,
}

pub fn eigen_decomposition(m: &DMatrix<C64>) -> Result<EigenDecomposition, SpectraError> {
    let n = m.nrows();
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let schur = Schur::try_new(m.clone(), 1e-15, 10_000).ok_or(SpectraError::NoConvergence)?;
    let (q, t) = schur.unpack();
    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = (j + 1..=k).map(|i| t[(j, i)] * y[(i, k)]).sum();
            let mut d = t[(j, j)] - lam;
            if d.norm() < 1e-14 * scale {
                d = C64::new(1e-14 * scale, 0.0);
            }
            y[(j, k)] = -s / d;
        }
        let nrm = y.column(k).norm();
        y.column_mut(k).unscale_mut(nrm);
    }
    let right = q * y;
    let left = right.clone().try_inverse().ok_or(SpectraError::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| t[(b, b)].norm().partial_cmp(&t[(a, a)].norm()).unwrap());
    Ok(EigenDecomposition {
        values: order.iter().map(|&k| t[(k, k)]).collect(),
        right: DMatrix::from_fn(n, n, |i, j| right[(i, order[j])]),
        left: DMatrix::from_fn(n, n, |i, j| left[(order[i], j)]),
    })
}

/// The `k` eigenvalues of largest modulus.
pub fn leading_spectrum(t: &TransferOperator, k: usize) -> Result<Vec<C64>, SpectraError> {
    if k > t.dim() {
        return Err(SpectraError::TooManyEigenvalues { k, dim: t.dim() });
    }
    let mut v = eigen_decomposition(&t.matrix)?.values;
    v.truncate(k);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationLength {
    /// In units of two-column cells; zero for a rank-one operator.
    Finite(f64),
    /// `|lambda_2| = |lambda_1|` within [`DEGENERACY_TOL`].
    Infinite,
}

impl CorrelationLength {
    pub fn value(self) -> f64 {
        match self {
            CorrelationLength::Finite(x) => x,
            CorrelationLength::Infinite => f64::INFINITY,
        }
    }
}

/// `xi = -1 / ln |lambda_2 / lambda_1|` from a modulus-sorted spectrum.
pub fn correlation_length(values: &[C64]) -> Result<CorrelationLength, SpectraError> {
    let l1 = values.first().map(|z| z.norm()).unwrap_or(0.0);
    if l1 == 0.0 {
        return Err(SpectraError::ZeroSpectrum);
    }
    let ratio = values.get(1).map(|z| z.norm() / l1).unwrap_or(0.0);
    if ratio <= DEGENERACY_TOL {
        return Ok(CorrelationLength::Finite(0.0));
    }
    if 1.0 - ratio <= DEGENERACY_TOL {
        return Ok(CorrelationLength::Infinite);
    }
    Ok(CorrelationLength::Finite(-1.0 / ratio.ln()))
}

/// Connected correlator of two cell insertions `L` cells apart, computed both
/// by repeated multiplication and from the spectral decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorComparison {
    pub distance: usize,
    pub explicit: C64,
    pub spectral: C64,
}

pub fn connected_correlator(
    plain: &TransferOperator,
    a: &TransferOperator,
    b: &TransferOperator,
    distances: &[usize],
) -> Result<Vec<CorrelatorComparison>, SpectraError> {
    let eig = eigen_decomposition(&plain.matrix)?;
    let lam = eig.values[0];
    if lam.norm() == 0.0 {
        return Err(SpectraError::ZeroSpectrum);
    }
    let r1 = eig.right.column(0).into_owned();
    let l1 = eig.left.row(0).into_owned();
    let ea = (&l1 * &a.matrix * &r1)[(0, 0)] / lam;
    let eb = (&l1 * &b.matrix * &r1)[(0, 0)] / lam;
    // spectral weights of every eigenvector
    let la = &l1 * &a.matrix * &eig.right;
    let rb = &eig.left * &b.matrix * &r1;
    let t = &plain.matrix / lam;
    let mut out = Vec::with_capacity(distances.len());
    for &d in distances {
        let mut v = &l1 * &a.matrix / lam;
        for _ in 0..d {
            v = v * &t;
        }
        let explicit = (v * &b.matrix * &r1)[(0, 0)] / lam - ea * eb;
        let spectral: C64 = (1..eig.values.len())
            .map(|k| la[(0, k)] * rb[(k, 0)] / (lam * lam) * (eig.values[k] / lam).powi(d as i32))
            .sum();
        out.push(CorrelatorComparison { distance: d, explicit, spectral });
    }
    Ok(out)
}

/// One row of a parameter scan.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ScanRow {
    pub t: f64,
    pub y_re: f64,
    pub y_im: f64,
    pub z_re: f64,
    pub z_im: f64,
    pub eta_p_index: u8,
    pub ny: usize,
    pub n: usize,
    pub lambda1: f64,
    pub gap_ratio: f64,
    pub xi: f64,
}

pub fn scan_point(params: &SiteTensorParams, ny: usize, n: usize, cap: usize) -> Result<ScanRow, SpectraError> {
    let cyl = Cylinder::with_cap(params, ny, n, cap)?;
    let t = cyl.transfer(Insertion::None)?;
    let vals = leading_spectrum(&t, t.dim().min(2))?;
    let l1 = vals[0].norm();
    let ratio = vals.get(1).map(|z| z.norm() / l1).unwrap_or(0.0);
    Ok(ScanRow {
        t: params.t,
        y_re: params.y.re,
        y_im: params.y.im,
        z_re: params.z.re,
        z_im: params.z.im,
        eta_p_index: params.eta_index(),
        ny,
        n,
        lambda1: vals[0].re,
        gap_ratio: ratio,
        xi: correlation_length(&vals)?.value(),
    })
}
