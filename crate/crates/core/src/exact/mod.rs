//! Dense state-vector engine for Z_N gauge fields on links and staggered
//! fermions on vertices.

mod layout;
mod sparse;
mod trotter;

pub use layout::{dim_cap, symmetric_value, Layout, DEFAULT_DIM_CAP};
pub use sparse::{hermitian_spectrum, SparseOp};
pub use trotter::{trotter_evolve, trotter_step_operator, Schedule};

use crate::lattice::{parity_of, LatticeError, LatticeGeometry, LinkId, Vertex};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("Hilbert space of dimension {requested} exceeds the cap {cap}")]
    DimensionCap { requested: usize, cap: usize },
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(usize),
    #[error("{0} requires gauge links")]
    NeedsLinks(&'static str),
    #[error("operation requires a one-dimensional open chain")]
    NotOneDimensional,
    #[error("schedule group {0} contains links sharing a vertex")]
    IntersectingSchedule(usize),
    #[error("schedule does not cover link {0:?} exactly once")]
    IncompleteSchedule(LinkId),
    #[error("coupling g must be positive when the Kogut-Susskind terms are enabled")]
    BadCoupling,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Z_N truncation of a compact U(1) link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZnLinkSpace {
    pub n: usize,
}

impl ZnLinkSpace {
    pub fn new(n: usize) -> Result<Self, ExactError> {
        if n < 2 {
            return Err(ExactError::BadModulus(n));
        }
        Ok(Self { n })
    }

    pub fn electric_value(&self, j: usize) -> i64 {
        symmetric_value(j, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub mass: f64,
    pub hopping: f64,
    pub coupling: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianKind {
    /// Free staggered fermions.
    Fermion,
    /// Minimally coupled fermions.
    FermionGauged,
    /// Electric plus magnetic terms.
    KogutSusskind,
    /// Gauged fermions with the Kogut-Susskind terms.
    Full,
}

/// Amplitudes over a [`GaugedSystem`] layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        Self { amps: vec![C64::default(); dim] }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut s = Self::zeros(dim);
        s.amps[index] = C64::new(1.0, 0.0);
        s
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&self, op: &SparseOp) -> Self {
        Self { amps: op.apply(&self.amps) }
    }
}

/// One fermionic mode per vertex (row-major) plus one Z_N qudit per link.
#[derive(Debug, Clone)]
pub struct GaugedSystem {
    pub geom: LatticeGeometry,
    pub links: Vec<LinkId>,
    pub zn: ZnLinkSpace,
    pub layout: Layout,
}

/// Gauss-law operator stored through its eigenvalue labels in Z_N.
#[derive(Debug, Clone)]
pub struct GaussOperator {
    pub n: usize,
    pub labels: Vec<usize>,
}

impl GaussOperator {
    /// `exp(2 pi i k G / N)`.
    pub fn unitary(&self, k: i64) -> SparseOp {
        let n = self.n as f64;
        SparseOp::diagonal(self.labels.len(), |b| {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 * self.labels[b] as f64 / n)
        })
    }

    /// Largest entry of `[G, A]`, with `G` diagonal in its Z_N labels.
    pub fn commutator_norm(&self, a: &SparseOp) -> f64 {
        a.entries()
            .map(|(i, j, v)| (v * (self.labels[i] as f64 - self.labels[j] as f64)).norm())
            .fold(0.0, f64::max)
    }
}

impl GaugedSystem {
    pub fn new(geom: LatticeGeometry, n: usize) -> Result<Self, ExactError> {
        let zn = ZnLinkSpace::new(n)?;
        let links = geom.links();
        let layout = Layout::new(geom.n_vertices(), vec![n; links.len()])?;
        Ok(Self { geom, links, zn, layout })
    }

    /// Fermions only, without link degrees of freedom.
    pub fn fermions_only(geom: LatticeGeometry) -> Result<Self, ExactError> {
        let layout = Layout::new(geom.n_vertices(), Vec::new())?;
        Ok(Self { geom, links: Vec::new(), zn: ZnLinkSpace { n: 2 }, layout })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn has_links(&self) -> bool {
        !self.links.is_empty() || self.geom.n_links() == 0
    }

    pub fn mode(&self, v: Vertex) -> usize {
        self.geom.vertex_index(v)
    }

    pub fn link_slot(&self, l: LinkId) -> Result<usize, ExactError> {
        self.links
            .iter()
            .position(|x| *x == l)
            .ok_or(ExactError::Lattice(LatticeError::InvalidLink(l.origin.col, l.origin.row, l.direction.index())))
    }

    /// Basis index from occupations (row-major) and link indices.
    pub fn basis_index(&self, occ: &[usize], fields: &[usize]) -> usize {
        let mut b = 0usize;
        for (k, &o) in occ.iter().enumerate() {
            b |= (o & 1) << k;
        }
        for (q, &f) in fields.iter().enumerate() {
            b = self.layout.with_digit(b, q, f);
        }
        b
    }

    /// Staggered charge `n(x) - (1 - (-1)^x) / 2` on a basis state.
    pub fn charge(&self, basis: usize, v: Vertex) -> i64 {
        let n = self.layout.occupation(basis, self.mode(v)) as i64;
        if parity_of(v) > 0 {
            n
        } else {
            n - 1
        }
    }

    pub fn field_index(&self, basis: usize, l: LinkId) -> Result<usize, ExactError> {
        Ok(self.layout.digit(basis, self.link_slot(l)?))
    }

    pub fn electric_value(&self, basis: usize, l: LinkId) -> Result<i64, ExactError> {
        Ok(self.zn.electric_value(self.field_index(basis, l)?))
    }

    pub fn link_u(&self, l: LinkId) -> Result<SparseOp, ExactError> {
        Ok(self.layout.shift(self.link_slot(l)?, 1))
    }

    /// `M sum (-1)^x n(x) + eps sum (psi†(x) [U] psi(x+e) + h.c.)`.
    fn fermion_part(&self, p: &HamiltonianParams, gauged: bool) -> Result<SparseOp, ExactError> {
        let l = &self.layout;
        let mass = l.diagonal(|b| {
            let mut e = 0.0;
            for v in self.geom.vertices() {
                e += parity_of(v) as f64 * l.occupation(b, self.mode(v)) as f64;
            }
            C64::new(p.mass * e, 0.0)
        });
        let mut h = mass;
        for link in self.geom.links() {
            let x = self.mode(link.origin);
            let y = self.mode(self.geom.target(link));
            let mut hop = l.create(x).mul(&l.annihilate(y));
            if gauged {
                hop = self.link_u(link)?.mul(&hop);
            }
            let term = hop.add(&hop.adjoint()).scale(C64::new(p.hopping, 0.0));
            h = h.add(&term);
        }
        Ok(h)
    }

    fn kogut_susskind(&self, p: &HamiltonianParams) -> Result<SparseOp, ExactError> {
        if p.coupling <= 0.0 {
            return Err(ExactError::BadCoupling);
        }
        let g2 = p.coupling * p.coupling;
        let electric = self.layout.diagonal(|b| {
            let e2: f64 = (0..self.links.len())
                .map(|q| {
                    let e = self.zn.electric_value(self.layout.digit(b, q)) as f64;
                    e * e
                })
                .sum();
            C64::new(0.5 * g2 * e2, 0.0)
        });
        let mut h = electric;
        for [bottom, right, top, left] in self.geom.plaquettes() {
            let up = self
                .link_u(bottom)?
                .mul(&self.link_u(right)?)
                .mul(&self.link_u(top)?.adjoint())
                .mul(&self.link_u(left)?.adjoint());
            let re = up.add(&up.adjoint()).scale(C64::new(-0.5 / g2, 0.0));
            h = h.add(&re);
        }
        Ok(h)
    }

    pub fn build_hamiltonian(&self, p: &HamiltonianParams, kind: HamiltonianKind) -> Result<SparseOp, ExactError> {
        let need_links = |what| {
            if self.links.is_empty() && self.geom.n_links() > 0 {
                Err(ExactError::NeedsLinks(what))
            } else {
                Ok(())
            }
        };
        match kind {
            HamiltonianKind::Fermion => self.fermion_part(p, false),
            HamiltonianKind::FermionGauged => {
                need_links("the gauged fermion Hamiltonian")?;
                self.fermion_part(p, true)
            }
            HamiltonianKind::KogutSusskind => {
                need_links("the Kogut-Susskind Hamiltonian")?;
                self.kogut_susskind(p)
            }
            HamiltonianKind::Full => {
                need_links("the full Hamiltonian")?;
                Ok(self.fermion_part(p, true)?.add(&self.kogut_susskind(p)?))
            }
        }
    }

    /// `G(x) = sum of signed star fields - Q(x)`, labelled mod N.
    pub fn gauss_operator(&self, v: Vertex) -> Result<GaussOperator, ExactError> {
        self.geom.check_vertex(v.col as i64, v.row as i64)?;
        if self.links.is_empty() && self.geom.n_links() > 0 {
            return Err(ExactError::NeedsLinks("the Gauss operator"));
        }
        let star: Vec<(usize, i64)> = self
            .geom
            .star_links(v)
            .into_iter()
            .map(|(l, s)| Ok((self.link_slot(l)?, s as i64)))
            .collect::<Result<_, ExactError>>()?;
        let n = self.zn.n as i64;
        let labels = (0..self.dim())
            .map(|b| {
                let div: i64 = star
                    .iter()
                    .map(|&(q, s)| s * self.layout.digit(b, q) as i64)
                    .sum();
                (div - self.charge(b, v)).rem_euclid(n) as usize
            })
            .collect();
        Ok(GaussOperator { n: self.zn.n, labels })
    }

    pub fn gauss_operators(&self) -> Result<Vec<GaussOperator>, ExactError> {
        self.geom.vertices().map(|v| self.gauss_operator(v)).collect()
    }

    /// Controlled shift raising the link field by the occupation at its origin.
    pub fn gauging_unitary(&self, l: LinkId) -> Result<SparseOp, ExactError> {
        let q = self.link_slot(l)?;
        let m = self.mode(l.origin);
        Ok(self.layout.permutation(|b| {
            let n = self.layout.occupation(b, m);
            let j = self.layout.digit(b, q);
            self.layout.with_digit(b, q, j + n)
        }))
    }

    /// Product of controlled shifts raising each link of an open chain by the
    /// staggered charge accumulated on the vertices to its left.
    pub fn gauging_unitary_1d(&self) -> Result<SparseOp, ExactError> {
        if !self.geom.is_one_dimensional() || self.geom.boundary != crate::lattice::Boundary::Open {
            return Err(ExactError::NotOneDimensional);
        }
        let n = self.zn.n as i64;
        Ok(self.layout.permutation(|b| {
            let mut out = b;
            let mut acc = 0i64;
            for x in 0..self.geom.width.saturating_sub(1) {
                acc += self.charge(b, Vertex::new(x, 0));
                let j = self.layout.digit(b, x) as i64;
                out = self.layout.with_digit(out, x, (j + acc).rem_euclid(n) as usize);
            }
            out
        }))
    }

    /// Projection onto the joint eigenspace `G(x) = q(x) mod N`.
    pub fn sector_project(&self, state: &StateVector, q: &[i64]) -> Result<StateVector, ExactError> {
        let ops = self.gauss_operators()?;
        let n = self.zn.n as i64;
        let mut out = state.clone();
        for (b, a) in out.amps.iter_mut().enumerate() {
            let inside = ops
                .iter()
                .zip(q)
                .all(|(g, &qx)| g.labels[b] as i64 == qx.rem_euclid(n));
            if !inside {
                *a = C64::default();
            }
        }
        Ok(out)
    }

    /// Basis states of the sector `G(x) = q(x)` for every vertex.
    pub fn sector_basis(&self, q: &[i64]) -> Result<Vec<usize>, ExactError> {
        let ops = self.gauss_operators()?;
        let n = self.zn.n as i64;
        Ok((0..self.dim())
            .filter(|&b| ops.iter().zip(q).all(|(g, &qx)| g.labels[b] as i64 == qx.rem_euclid(n)))
            .collect())
    }
}
