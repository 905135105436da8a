use super::DualizerError;
use crate::exact::{symmetric_value, Layout, SparseOp, StateVector};
use crate::lattice::{LatticeGeometry, Vertex};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Z_N Higgs matter with frozen radius: one clock per vertex holding the
/// charge `Q mod N` (raised by `exp(i theta)`), one Z_N field per link.
///
/// Vertex clocks come first in the layout, so the matter index of a basis
/// state is `b % N^V` and the field index is `b / N^V`.
#[derive(Debug, Clone)]
pub struct HiggsSystem {
    pub geom: LatticeGeometry,
    pub n: usize,
    pub layout: Layout,
    star: Vec<Vec<(usize, i64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingReport {
    /// `Tr rho_m^2` of the reduced matter state.
    pub purity: f64,
    /// Weight of the matter configuration with every `Q = 0`.
    pub zero_charge_weight: f64,
    pub norm_in: f64,
    pub norm_out: f64,
    pub decoupled: bool,
}

impl HiggsSystem {
    pub fn new(geom: LatticeGeometry, n: usize) -> Result<Self, DualizerError> {
        let nv = geom.n_vertices();
        let mut dims = vec![n; nv];
        dims.extend(std::iter::repeat_n(n, geom.n_links()));
        let layout = Layout::new(0, dims)?;
        let star = geom
            .vertices()
            .map(|v| {
                geom.star_links(v)
                    .into_iter()
                    .map(|(l, s)| (nv + geom.link_index(l).unwrap(), s as i64))
                    .collect()
            })
            .collect();
        Ok(Self { geom, n, layout, star })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn matter_dim(&self) -> usize {
        self.n.pow(self.geom.n_vertices() as u32)
    }

    pub fn charge(&self, basis: usize, v: Vertex) -> i64 {
        symmetric_value(self.layout.digit(basis, self.geom.vertex_index(v)), self.n)
    }

    /// Signed sum of the star fields of `v`, as a Z_N index.
    pub fn divergence(&self, basis: usize, v: Vertex) -> i64 {
        self.star[self.geom.vertex_index(v)]
            .iter()
            .map(|&(q, s)| s * self.layout.digit(basis, q) as i64)
            .sum::<i64>()
            .rem_euclid(self.n as i64)
    }

    /// `G(x) = div E(x) - Q(x) mod N`.
    pub fn gauss_label(&self, basis: usize, v: Vertex) -> usize {
        let q = self.layout.digit(basis, self.geom.vertex_index(v)) as i64;
        (self.divergence(basis, v) - q).rem_euclid(self.n as i64) as usize
    }

    /// Basis states with `G(x) = q(x)` everywhere.
    pub fn sector_basis(&self, q: &[i64]) -> Vec<usize> {
        let n = self.n as i64;
        (0..self.dim())
            .filter(|&b| {
                self.geom
                    .vertices()
                    .zip(q)
                    .all(|(v, &qx)| self.gauss_label(b, v) as i64 == qx.rem_euclid(n))
            })
            .collect()
    }

    /// `exp(i theta(x))`, the unit charge raiser.
    pub fn phase(&self, v: Vertex) -> SparseOp {
        self.layout.shift(self.geom.vertex_index(v), 1)
    }

    /// `eps sum (exp(i theta(x)) U(x, i) exp(-i theta(x + e_i)) + h.c.) + g^2/2 sum E^2`.
    pub fn hamiltonian(&self, eps: f64, coupling: f64) -> SparseOp {
        let nv = self.geom.n_vertices();
        let g2 = coupling * coupling;
        let mut h = self.layout.diagonal(|b| {
            let e2: i64 = (0..self.geom.n_links())
                .map(|k| symmetric_value(self.layout.digit(b, nv + k), self.n).pow(2))
                .sum();
            C64::new(0.5 * g2 * e2 as f64, 0.0)
        });
        for (k, l) in self.geom.links().into_iter().enumerate() {
            let hop = self
                .phase(l.origin)
                .mul(&self.layout.shift(nv + k, 1))
                .mul(&self.phase(self.geom.target(l)).adjoint());
            h = h.add(&hop.add(&hop.adjoint()).scale(C64::new(eps, 0.0)));
        }
        h
    }

    /// `prod_x exp(i G(x) theta(x))`: every clock is lowered by the
    /// divergence of its star, so a Gauss-law state ends with `Q = 0`.
    pub fn unitary_gauge(&self) -> SparseOp {
        let n = self.n as i64;
        self.layout.permutation(|b| {
            let mut out = b;
            for v in self.geom.vertices() {
                let k = self.geom.vertex_index(v);
                let q = self.layout.digit(b, k) as i64;
                out = self.layout.with_digit(out, k, (q - self.divergence(b, v)).rem_euclid(n) as usize);
            }
            out
        })
    }

    /// Reduced matter density matrix.
    pub fn matter_density(&self, state: &[C64]) -> DMatrix<C64> {
        let m = self.matter_dim();
        let g = self.dim() / m;
        let mut rho = DMatrix::zeros(m, m);
        for f in 0..g {
            let col = &state[f * m..(f + 1) * m];
            if col.iter().all(|a| *a == C64::default()) {
                continue;
            }
            for i in 0..m {
                if col[i] == C64::default() {
                    continue;
                }
                for j in 0..m {
                    rho[(i, j)] += col[i] * col[j].conj();
                }
            }
        }
        rho
    }

    pub fn unitary_gauge_transform(&self, state: &StateVector, tol: f64) -> Result<(StateVector, DecouplingReport), DualizerError> {
        if state.amps.len() != self.dim() {
            return Err(DualizerError::StateSize { expected: self.dim(), got: state.amps.len() });
        }
        let out = state.apply(&self.unitary_gauge());
        let norm_in = state.norm();
        let norm_out = out.norm();
        let mut rho = self.matter_density(&out.amps);
        let tr = rho.trace().re;
        rho /= C64::new(tr, 0.0);
        let purity = (&rho * &rho).trace().re;
        let zero_charge_weight = rho[(0, 0)].re;
        let decoupled = zero_charge_weight >= 1.0 - tol && purity >= 1.0 - tol;
        Ok((out, DecouplingReport { purity, zero_charge_weight, norm_in, norm_out, decoupled }))
    }
}
