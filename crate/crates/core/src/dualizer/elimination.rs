use super::DualizerError;
use crate::exact::{hermitian_spectrum, symmetric_value, GaugedSystem, HamiltonianKind, HamiltonianParams, Layout, SparseOp};
use crate::lattice::{parity_of, Boundary, LatticeGeometry, Vertex};
use num_complex::Complex64 as C64;
use std::collections::HashMap;

/// Removes the fermionic statistics from a gauged open chain.
///
/// The extended space holds, in Jordan-Wigner order, the matter modes
/// `psi(x)`, one auxiliary mode `chi(x)` per vertex with `c = chi + chi†`,
/// and one auxiliary mode `f(x)` per link with `alpha(x) = f + f†` and
/// `beta(x + 1) = i (f - f†)`, followed by the Z_N link fields.
/// The spin space holds one qubit per vertex followed by the same fields.
#[derive(Debug, Clone)]
pub struct ChainElimination {
    pub sys: GaugedSystem,
    pub ext: Layout,
    pub spin: Layout,
    sites: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumComparison {
    pub fermionic: Vec<f64>,
    pub spin: Vec<f64>,
    pub max_deviation: f64,
}

fn apply_sparse(op: &SparseOp, v: &[(usize, C64)]) -> Vec<(usize, C64)> {
    let mut acc: HashMap<usize, C64> = HashMap::new();
    for &(j, a) in v {
        for &(i, x) in op.column(j) {
            *acc.entry(i).or_default() += a * x;
        }
    }
    let mut out: Vec<_> = acc.into_iter().filter(|(_, a)| *a != C64::default()).collect();
    out.sort_by_key(|e| e.0);
    out
}

impl ChainElimination {
    pub fn new(geom: LatticeGeometry, n: usize) -> Result<Self, DualizerError> {
        if !geom.is_one_dimensional() || geom.boundary != Boundary::Open {
            return Err(DualizerError::NotOneDimensional);
        }
        if n % 2 != 0 {
            return Err(DualizerError::OddModulus(n));
        }
        let sites = geom.n_vertices();
        let sys = GaugedSystem::new(geom, n)?;
        let links = sites - 1;
        let ext = Layout::new(2 * sites + links, vec![n; links])?;
        let mut dims = vec![2; sites];
        dims.extend(std::iter::repeat_n(n, links));
        let spin = Layout::new(0, dims)?;
        Ok(Self { sys, ext, spin, sites })
    }

    pub fn chain(sites: usize, n: usize) -> Result<Self, DualizerError> {
        Self::new(LatticeGeometry::chain(sites)?, n)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    fn psi(&self, x: usize) -> usize {
        x
    }

    fn chi(&self, x: usize) -> usize {
        self.sites + x
    }

    fn f(&self, x: usize) -> usize {
        2 * self.sites + x
    }

    /// `c(x) = chi + chi†`.
    pub fn c(&self, x: usize) -> SparseOp {
        self.ext.majorana_x(self.chi(x))
    }

    /// Majorana at the start of link `x`.
    pub fn alpha(&self, x: usize) -> SparseOp {
        self.ext.majorana_x(self.f(x))
    }

    /// Majorana at the end of link `x - 1`.
    pub fn beta(&self, x: usize) -> SparseOp {
        self.ext.majorana_y(self.f(x - 1))
    }

    /// `eta†(x) = c(x) psi†(x)`.
    pub fn eta_dag(&self, x: usize) -> SparseOp {
        self.c(x).mul(&self.ext.create(self.psi(x)))
    }

    fn link_parity(&self, b: usize, link: usize) -> usize {
        self.ext.digit(b, link) % 2
    }

    /// `(i c(x) beta(x))^{E(x-1)} (i c(x) alpha(x))^{E(x)}`; only the parity
    /// of each field enters since both factors square to one.
    pub fn uf_factor(&self, x: usize) -> SparseOp {
        let i = C64::new(0.0, 1.0);
        let c = self.c(x);
        let ia = (x + 1 < self.sites).then(|| c.mul(&self.alpha(x)).scale(i));
        let ib = (x > 0).then(|| c.mul(&self.beta(x)).scale(i));
        SparseOp::from_columns(self.ext.dim(), |b| {
            let mut v = vec![(b, C64::new(1.0, 0.0))];
            if let Some(ia) = &ia {
                if self.link_parity(b, x) == 1 {
                    v = apply_sparse(ia, &v);
                }
            }
            if let Some(ib) = &ib {
                if self.link_parity(b, x - 1) == 1 {
                    v = apply_sparse(ib, &v);
                }
            }
            v
        })
    }

    /// Product of all factors; they commute, so the order is irrelevant.
    pub fn uf(&self) -> SparseOp {
        (0..self.sites).fold(self.ext.identity(), |acc, x| acc.mul(&self.uf_factor(x)))
    }

    fn embed_index(&self, b: usize, aux: usize) -> usize {
        let low = (1usize << self.sites) - 1;
        let fields = b >> self.sites;
        (b & low) | (aux << self.sites) | (fields << self.ext.n_fermions())
    }

    /// Operator of the plain gauged chain, acting trivially on the auxiliary modes.
    pub fn embed(&self, op: &SparseOp) -> SparseOp {
        let n_aux = self.ext.n_fermions() - self.sites;
        let mut cols: Vec<Vec<(usize, C64)>> = vec![Vec::new(); self.ext.dim()];
        for (i, j, v) in op.entries() {
            for aux in 0..1usize << n_aux {
                cols[self.embed_index(j, aux)].push((self.embed_index(i, aux), v));
            }
        }
        SparseOp::from_columns(self.ext.dim(), |j| cols[j].clone())
    }

    /// Gauged fermionic Hamiltonian (mass, hopping, electric energy).
    pub fn fermionic_hamiltonian(&self, p: &HamiltonianParams) -> Result<SparseOp, DualizerError> {
        Ok(self.sys.build_hamiltonian(p, HamiltonianKind::Full)?)
    }

    /// `U_F H U_F†` on the extended space.
    pub fn transformed(&self, h: &SparseOp) -> SparseOp {
        let u = self.uf();
        u.mul(&self.embed(h)).mul(&u.adjoint())
    }

    /// `prod_x eta†(x)^{s_x} |Omega> |E>` for every spin basis state, as a
    /// single extended basis state with a sign.
    fn hardcore_image(&self) -> Vec<(usize, C64)> {
        let etas: Vec<SparseOp> = (0..self.sites).map(|x| self.eta_dag(x)).collect();
        (0..self.spin.dim())
            .map(|s| {
                let mut e = 0usize;
                for k in 0..self.sites - 1 {
                    e = self.ext.with_digit(e, k, self.spin.digit(s, self.sites + k));
                }
                let mut v = vec![(e, C64::new(1.0, 0.0))];
                for (x, eta) in etas.iter().enumerate() {
                    if self.spin.digit(s, x) == 1 {
                        v = apply_sparse(eta, &v);
                    }
                }
                v[0]
            })
            .collect()
    }

    /// Compress an extended-space operator onto the hard-core boson image,
    /// replacing `eta†` by `sigma_+` and the auxiliary pairs by their vacuum
    /// values. Refuses operators that leave the image.
    pub fn hardcore_substitution(&self, h: &SparseOp) -> Result<SparseOp, DualizerError> {
        let image = self.hardcore_image();
        let lookup: HashMap<usize, (usize, C64)> = image.iter().enumerate().map(|(s, &(e, ph))| (e, (s, ph))).collect();
        let mut leak = 0.0f64;
        let mut cols = Vec::with_capacity(image.len());
        for &(e, ph) in &image {
            let mut col: Vec<(usize, C64)> = Vec::new();
            for &(i, v) in h.column(e) {
                let a = v * ph;
                match lookup.get(&i) {
                    Some(&(t, pt)) => col.push((t, pt.conj() * a)),
                    None => leak += a.norm_sqr(),
                }
            }
            cols.push(col);
        }
        if leak.sqrt() > 1e-12 {
            return Err(DualizerError::ResidualMajorana(leak.sqrt()));
        }
        Ok(SparseOp::from_columns(self.spin.dim(), |s| cols[s].clone()))
    }

    /// Spin form of the gauged chain obtained through the transformation.
    pub fn eliminate_fermions_1d(&self, p: &HamiltonianParams) -> Result<SparseOp, DualizerError> {
        let h = self.fermionic_hamiltonian(p)?;
        self.hardcore_substitution(&self.transformed(&h))
    }

    /// `-i eps sum (xi(x) sigma_+(x) U(x) sigma_-(x+1) + h.c.) + M sum (-1)^x sigma_+ sigma_-
    /// + g^2/2 sum E^2`, with `xi(x) = exp(i pi E(x-1))` and `xi(0) = 1`.
    pub fn spin_hamiltonian(&self, p: &HamiltonianParams) -> Result<SparseOp, DualizerError> {
        if p.coupling <= 0.0 {
            return Err(crate::exact::ExactError::BadCoupling.into());
        }
        let l = &self.spin;
        let n = self.sys.zn.n;
        let g2 = p.coupling * p.coupling;
        let mut h = l.diagonal(|b| {
            let mass: f64 = (0..self.sites)
                .map(|x| parity_of(Vertex::new(x, 0)) as f64 * l.digit(b, x) as f64)
                .sum();
            let e2: i64 = (0..self.sites - 1)
                .map(|k| symmetric_value(l.digit(b, self.sites + k), n).pow(2))
                .sum();
            C64::new(p.mass * mass + 0.5 * g2 * e2 as f64, 0.0)
        });
        for x in 0..self.sites - 1 {
            // sigma_+(x) U(x) sigma_-(x+1) with its string sign
            let hop = SparseOp::from_columns(l.dim(), |b| {
                if l.digit(b, x) == 1 || l.digit(b, x + 1) == 0 {
                    return Vec::new();
                }
                let xi = if x > 0 && l.digit(b, self.sites + x - 1) % 2 == 1 { -1.0 } else { 1.0 };
                let mut out = l.with_digit(b, x, 1);
                out = l.with_digit(out, x + 1, 0);
                let e = l.digit(b, self.sites + x);
                out = l.with_digit(out, self.sites + x, e + 1);
                vec![(out, C64::new(0.0, -p.hopping * xi))]
            });
            h = h.add(&hop).add(&hop.adjoint());
        }
        Ok(h)
    }

    /// Spin-space basis states obeying `E(x) - E(x-1) = Q(x) mod N`.
    pub fn spin_physical_basis(&self) -> Vec<usize> {
        let l = &self.spin;
        let n = self.sys.zn.n as i64;
        (0..l.dim())
            .filter(|&b| {
                (0..self.sites).all(|x| {
                    let s = l.digit(b, x) as i64;
                    let q = if parity_of(Vertex::new(x, 0)) > 0 { s } else { s - 1 };
                    let right = if x + 1 < self.sites { l.digit(b, self.sites + x) as i64 } else { 0 };
                    let left = if x > 0 { l.digit(b, self.sites + x - 1) as i64 } else { 0 };
                    (right - left - q).rem_euclid(n) == 0
                })
            })
            .collect()
    }

    /// Sorted physical-sector spectra of the fermionic and spin Hamiltonians.
    pub fn compare_spectra(&self, p: &HamiltonianParams) -> Result<SpectrumComparison, DualizerError> {
        let hf = self.fermionic_hamiltonian(p)?;
        let phys = self.sys.sector_basis(&vec![0; self.sites])?;
        let fermionic = hermitian_spectrum(&hf.restrict(&phys));
        let hs = self.spin_hamiltonian(p)?;
        let spin = hermitian_spectrum(&hs.restrict(&self.spin_physical_basis()));
        let max_deviation = if fermionic.len() == spin.len() {
            fermionic.iter().zip(&spin).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        Ok(SpectrumComparison { fermionic, spin, max_deviation })
    }
}
