//! Gauged Gaussian fermionic PEPS.
//!
//! Every vertex carries nine modes `[psi, r+, r-, u+, u-, l+, l-, d+, d-]`;
//! vertex `v` owns the global modes `9 v .. 9 v + 9` (row-major).

pub mod toy;

use crate::exact::symmetric_value;
use crate::gaussian::{CovarianceState, FockState, GaussianError, PairingMatrix};
use crate::lattice::{parity_of, Direction, LatticeError, LatticeGeometry, LinkId, OrientedPath, Vertex};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

pub const MODES_PER_SITE: usize = 9;
pub const PSI: usize = 0;
pub const R_P: usize = 1;
pub const R_M: usize = 2;
pub const U_P: usize = 3;
pub const U_M: usize = 4;
pub const L_P: usize = 5;
pub const L_M: usize = 6;
pub const D_P: usize = 7;
pub const D_M: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FpepsError {
    #[error("eta_p = {0} does not satisfy eta_p^4 = -1")]
    BadEta(C64),
    #[error("eta_p index {0} out of range 0..4")]
    BadEtaIndex(u8),
    #[error("t must be finite and non-negative, got {0}")]
    BadT(f64),
    #[error("gauge configuration has {got} angles, lattice has {expected} links")]
    MissingAngles { expected: usize, got: usize },
    #[error("contraction has zero norm")]
    ZeroNorm,
    #[error("dense contraction needs {0} modes at once, limit is {1}")]
    TooManyModes(usize, usize),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Parameters `(t, y, z, eta_p)` of the site tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteTensorParams {
    pub t: f64,
    pub y: C64,
    pub z: C64,
    pub eta_p: C64,
}

/// `exp(i pi (2k + 1) / 4)`, the four solutions of `eta^4 = -1`.
pub fn eta_root(index: u8) -> Result<C64, FpepsError> {
    if index > 3 {
        return Err(FpepsError::BadEtaIndex(index));
    }
    Ok(C64::from_polar(1.0, PI * (2 * index as usize + 1) as f64 / 4.0))
}

impl SiteTensorParams {
    pub fn new(t: f64, y: C64, z: C64, eta_index: u8) -> Result<Self, FpepsError> {
        let p = Self { t, y, z, eta_p: eta_root(eta_index)? };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FpepsError> {
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(FpepsError::BadT(self.t));
        }
        if (self.eta_p.powi(4) + 1.0).norm() > 1e-12 {
            return Err(FpepsError::BadEta(self.eta_p));
        }
        Ok(())
    }

    pub fn eta_index(&self) -> u8 {
        (0..4u8)
            .min_by(|&a, &b| {
                let da = (eta_root(a).unwrap() - self.eta_p).norm();
                let db = (eta_root(b).unwrap() - self.eta_p).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap()
    }
}

/// Text form of [`SiteTensorParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteParamsRecord {
    pub t: f64,
    #[serde(default)]
    pub y_re: f64,
    #[serde(default)]
    pub y_im: f64,
    #[serde(default)]
    pub z_re: f64,
    #[serde(default)]
    pub z_im: f64,
    #[serde(default)]
    pub eta_p_index: u8,
}

impl TryFrom<SiteParamsRecord> for SiteTensorParams {
    type Error = FpepsError;
    fn try_from(r: SiteParamsRecord) -> Result<Self, FpepsError> {
        SiteTensorParams::new(r.t, C64::new(r.y_re, r.y_im), C64::new(r.z_re, r.z_im), r.eta_p_index)
    }
}

impl From<SiteTensorParams> for SiteParamsRecord {
    fn from(p: SiteTensorParams) -> Self {
        Self {
            t: p.t,
            y_re: p.y.re,
            y_im: p.y.im,
            z_re: p.z.re,
            z_im: p.z.im,
            eta_p_index: p.eta_index(),
        }
    }
}

/// The 5x4 coupling matrix: first row couples the physical mode, the 4x4
/// block `tau` couples virtual modes and is antisymmetric.
pub fn build_t(p: &SiteTensorParams) -> Result<PairingMatrix, FpepsError> {
    p.validate()?;
    let (t, y, z, e) = (C64::new(p.t, 0.0), p.y, p.z * FRAC_1_SQRT_2, p.eta_p);
    let o = C64::default();
    let rows = [
        [t, e * e * t, e * t, e * e * e * t],
        [o, y, z, z],
        [-y, o, -z, z],
        [-z, z, o, y],
        [-z, -z, -y, o],
    ];
    let m = DMatrix::from_fn(5, 4, |i, j| rows[i][j]);
    Ok(PairingMatrix::new(m)?)
}

/// `(a, b)` mode lists of a vertex with the given staggering sign.
pub fn site_modes(parity: i32) -> ([usize; 5], [usize; 4]) {
    if parity > 0 {
        ([PSI, R_M, U_M, L_P, D_P], [R_P, U_P, L_M, D_M])
    } else {
        ([PSI, R_P, U_P, L_M, D_M], [R_M, U_M, L_P, D_P])
    }
}

/// Charge of each site mode under the virtual Gauss law: `+1` on `b`, `-1` on `a`.
pub fn virtual_charges(parity: i32) -> [i32; MODES_PER_SITE] {
    let (a, b) = site_modes(parity);
    let mut q = [0; MODES_PER_SITE];
    a.iter().for_each(|&m| q[m] = -1);
    b.iter().for_each(|&m| q[m] = 1);
    q
}

/// Antisymmetric generator `G` with `A = exp(1/2 a† G a†)` on the nine site modes.
pub fn site_generator(parity: i32, t: &PairingMatrix) -> Result<DMatrix<C64>, FpepsError> {
    let (a, b) = site_modes(parity);
    Ok(t.embed(MODES_PER_SITE, &a, &b)?)
}

pub fn site_state(parity: i32, params: &SiteTensorParams) -> Result<CovarianceState, FpepsError> {
    let g = site_generator(parity, &build_t(params)?)?;
    Ok(CovarianceState::from_antisymmetric(&g)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussCheckReport {
    pub lambdas: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Rotate every site mode by `Lambda q_m` and compare covariance matrices.
pub fn verify_virtual_gauss_state(parity: i32, state: &CovarianceState, lambdas: &[f64], tol: f64) -> Result<GaussCheckReport, FpepsError> {
    let q = virtual_charges(parity);
    let mut worst = 0.0f64;
    for &lam in lambdas {
        let mut s = state.clone();
        for (m, &qm) in q.iter().enumerate() {
            s.rotate_mode(m, lam * qm as f64)?;
        }
        worst = worst.max((s.gamma() - state.gamma()).amax());
    }
    Ok(GaussCheckReport { lambdas: lambdas.to_vec(), max_deviation: worst, passed: worst <= tol })
}

pub fn verify_virtual_gauss(parity: i32, params: &SiteTensorParams, lambdas: &[f64]) -> Result<GaussCheckReport, FpepsError> {
    verify_virtual_gauss_state(parity, &site_state(parity, params)?, lambdas, 1e-10)
}

/// One angle per link, in [`LatticeGeometry::links`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeConfiguration {
    pub angles: Vec<f64>,
}

impl GaugeConfiguration {
    pub fn zeros(geom: &LatticeGeometry) -> Self {
        Self { angles: vec![0.0; geom.n_links()] }
    }

    pub fn from_zn(indices: &[usize], n: usize) -> Self {
        Self { angles: indices.iter().map(|&k| 2.0 * PI * k as f64 / n as f64).collect() }
    }

    pub fn random(geom: &LatticeGeometry, rng: &mut impl Rng) -> Self {
        Self { angles: (0..geom.n_links()).map(|_| rng.random_range(0.0..2.0 * PI)).collect() }
    }

    pub fn check(&self, geom: &LatticeGeometry) -> Result<(), FpepsError> {
        if self.angles.len() != geom.n_links() {
            return Err(FpepsError::MissingAngles { expected: geom.n_links(), got: self.angles.len() });
        }
        Ok(())
    }

    /// Shift the star links of `v`: outgoing by `+lambda`, ingoing by `-lambda`.
    pub fn gauge_shift(&self, geom: &LatticeGeometry, v: Vertex, lambda: f64) -> Self {
        let mut out = self.clone();
        for (l, s) in geom.star_links(v) {
            if let Some(i) = geom.link_index(l) {
                out.angles[i] += s as f64 * lambda;
            }
        }
        out
    }

    /// Signed sum of angles along a path.
    pub fn holonomy(&self, geom: &LatticeGeometry, path: &OrientedPath) -> f64 {
        path.steps
            .iter()
            .map(|(l, o)| o.sign() as f64 * self.angles[geom.link_index(*l).expect("path link on lattice")])
            .sum()
    }
}

/// How the link angle rotates the outgoing virtual modes of its origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugingRule {
    /// `exp(i (-1)^x phi E_0)`: the staggering cancels, so `z+` turns by
    /// `phi` and `z-` by `-phi` on every vertex.
    Uniform,
    /// `z+` by `(-1)^x phi`, `z-` by `-(-1)^x phi`; not gauge invariant.
    Staggered,
    /// Both `z+` and `z-` by `phi`; breaks the field truncation.
    SameSign,
}

impl GaugingRule {
    fn phases(self, parity: i32, phi: f64) -> (f64, f64) {
        match self {
            GaugingRule::Uniform => (phi, -phi),
            GaugingRule::Staggered => (parity as f64 * phi, -parity as f64 * phi),
            GaugingRule::SameSign => (phi, phi),
        }
    }
}

/// Gauged fPEPS on a fixed lattice.
#[derive(Debug, Clone)]
pub struct Fpeps {
    geom: LatticeGeometry,
    params: SiteTensorParams,
    rule: GaugingRule,
    generators: [DMatrix<C64>; 2],
    sites: CovarianceState,
    bond_modes: Vec<usize>,
    bond_state: CovarianceState,
    bond_pairs: Vec<(usize, usize)>,
    dangling: Vec<usize>,
}

fn global(geom: &LatticeGeometry, v: Vertex, k: usize) -> usize {
    geom.vertex_index(v) * MODES_PER_SITE + k
}

impl Fpeps {
    pub fn new(geom: LatticeGeometry, params: SiteTensorParams) -> Result<Self, FpepsError> {
        Self::with_rule(geom, params, GaugingRule::Uniform)
    }

    pub fn with_rule(geom: LatticeGeometry, params: SiteTensorParams, rule: GaugingRule) -> Result<Self, FpepsError> {
        let t = build_t(&params)?;
        let generators = [site_generator(1, &t)?, site_generator(-1, &t)?];
        let even = CovarianceState::from_antisymmetric(&generators[0])?;
        let odd = CovarianceState::from_antisymmetric(&generators[1])?;
        let mut sites = CovarianceState::vacuum(0);
        for v in geom.vertices() {
            sites = sites.tensor(if parity_of(v) > 0 { &even } else { &odd });
        }
        // bond pairs (first, second) for exp(first† second†), joining modes of
        // equal sign so that the pair is neutral under the virtual field
        let mut bond_pairs = Vec::new();
        for l in geom.links() {
            let y = geom.target(l);
            let x = l.origin;
            match l.direction {
                Direction::X => {
                    bond_pairs.push((global(&geom, y, L_P), global(&geom, x, R_P)));
                    bond_pairs.push((global(&geom, y, L_M), global(&geom, x, R_M)));
                }
                Direction::Y => {
                    bond_pairs.push((global(&geom, x, U_P), global(&geom, y, D_P)));
                    bond_pairs.push((global(&geom, x, U_M), global(&geom, y, D_M)));
                }
            }
        }
        let mut used = vec![false; geom.n_vertices() * MODES_PER_SITE];
        for &(a, b) in &bond_pairs {
            used[a] = true;
            used[b] = true;
        }
        let dangling: Vec<usize> = (0..used.len())
            .filter(|&m| m % MODES_PER_SITE != PSI && !used[m])
            .collect();
        let pair = {
            let g = DMatrix::from_row_slice(2, 2, &[C64::default(), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::default()]);
            CovarianceState::from_antisymmetric(&g)?.with_log_norm(0.0)
        };
        let mut bond_state = CovarianceState::vacuum(0);
        let mut bond_modes = Vec::new();
        for &(a, b) in &bond_pairs {
            bond_state = bond_state.tensor(&pair);
            bond_modes.push(a);
            bond_modes.push(b);
        }
        bond_state = bond_state.tensor(&CovarianceState::vacuum(dangling.len()));
        bond_modes.extend(&dangling);
        Ok(Self { geom, params, rule, generators, sites, bond_modes, bond_state, bond_pairs, dangling })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    pub fn params(&self) -> &SiteTensorParams {
        &self.params
    }

    /// Site modes rotated by the link angles: `(global mode, angle)`.
    fn rotations(&self, phi: &GaugeConfiguration) -> Result<Vec<(usize, f64)>, FpepsError> {
        phi.check(&self.geom)?;
        let mut out = Vec::with_capacity(2 * phi.angles.len());
        for (l, &a) in self.geom.links().iter().zip(&phi.angles) {
            let (p, m) = match l.direction {
                Direction::X => (R_P, R_M),
                Direction::Y => (U_P, U_M),
            };
            let (ap, am) = self.rule.phases(parity_of(l.origin), a);
            out.push((global(&self.geom, l.origin, p), ap));
            out.push((global(&self.geom, l.origin, m), am));
        }
        Ok(out)
    }

    /// Physical-fermion state `|psi(Phi)>` as a covariance matrix with its norm.
    pub fn assemble(&self, phi: &GaugeConfiguration) -> Result<CovarianceState, FpepsError> {
        let mut s = self.sites.clone();
        for (m, a) in self.rotations(phi)? {
            s.rotate_mode(m, a)?;
        }
        match s.project(&self.bond_modes, &self.bond_state) {
            Ok(out) => Ok(out),
            Err(GaussianError::OrthogonalProjection(_)) => Err(FpepsError::ZeroNorm),
            Err(e) => Err(e.into()),
        }
    }

    /// `ln <psi(Phi)|psi(Phi)>`, `-inf` for a vanishing contraction.
    pub fn log_weight(&self, phi: &GaugeConfiguration) -> Result<f64, FpepsError> {
        match self.assemble(phi) {
            Ok(s) => Ok(2.0 * s.log_norm()),
            Err(FpepsError::ZeroNorm) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        }
    }

    /// Same state as [`Fpeps::assemble`], contracted site by site in Fock space,
    /// with its phase.
    pub fn assemble_fock(&self, phi: &GaugeConfiguration, max_modes: usize) -> Result<FockState, FpepsError> {
        let rot = self.rotations(phi)?;
        let norm_pair = C64::new(1.0, 0.0);
        let mut state = FockState::vacuum(0);
        let mut labels: Vec<usize> = Vec::new();
        let mut done = vec![false; self.bond_pairs.len()];
        let mut added = vec![false; self.geom.n_vertices()];
        for v in self.geom.vertices() {
            let vi = self.geom.vertex_index(v);
            let mut site = FockState::vacuum(MODES_PER_SITE);
            let g = &self.generators[if parity_of(v) > 0 { 0 } else { 1 }];
            let mut pairs = Vec::new();
            for i in 0..MODES_PER_SITE {
                for j in i + 1..MODES_PER_SITE {
                    if g[(i, j)] != C64::default() {
                        pairs.push((i, j, g[(i, j)]));
                    }
                }
            }
            site.apply_pairing(&pairs)?;
            for &(m, a) in &rot {
                if m / MODES_PER_SITE == vi {
                    site.rotate(m % MODES_PER_SITE, a)?;
                }
            }
            if labels.len() + MODES_PER_SITE > max_modes {
                return Err(FpepsError::TooManyModes(labels.len() + MODES_PER_SITE, max_modes));
            }
            state = state.tensor(&site);
            labels.extend(vi * MODES_PER_SITE..(vi + 1) * MODES_PER_SITE);
            added[vi] = true;
            let mut ready = Vec::new();
            for (k, &(a, b)) in self.bond_pairs.iter().enumerate() {
                if !done[k] && added[a / MODES_PER_SITE] && added[b / MODES_PER_SITE] {
                    done[k] = true;
                    let pa = labels.iter().position(|&x| x == a).unwrap();
                    let pb = labels.iter().position(|&x| x == b).unwrap();
                    ready.push((pa, pb, norm_pair));
                }
            }
            let mut removed = vec![false; labels.len()];
            for &(pa, pb, _) in &ready {
                removed[pa] = true;
                removed[pb] = true;
            }
            state = state.project_pairs(&ready)?;
            labels.retain({
                let mut k = 0;
                move |_| {
                    k += 1;
                    !removed[k - 1]
                }
            });
            let dangling: Vec<bool> = labels.iter().map(|m| self.dangling.contains(m)).collect();
            if dangling.iter().any(|&d| d) {
                state = state.select_empty(&dangling);
                labels = labels.into_iter().zip(dangling).filter(|(_, d)| !d).map(|(m, _)| m).collect();
            }
        }
        Ok(state)
    }

    /// Support of the physical electric field `E` on the gauged state, from the
    /// discrete Fourier transform over each link angle in `Z_n`, with the other
    /// links drawn at random.
    pub fn measured_field_support(&self, n: usize, samples: usize, seed: u64) -> Result<BTreeSet<i64>, FpepsError> {
        let n_links = self.geom.n_links();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut support = BTreeSet::new();
        for link in 0..n_links {
            for _ in 0..samples {
                let mut idx: Vec<usize> = (0..n_links).map(|_| rng.random_range(0..n)).collect();
                let mut values = Vec::with_capacity(n);
                for k in 0..n {
                    idx[link] = k;
                    let phi = GaugeConfiguration::from_zn(&idx, n);
                    values.push(self.assemble_fock(&phi, 22)?);
                }
                let dim = values[0].amplitudes().len();
                let mut weights = vec![0.0; n];
                for (e, w) in weights.iter_mut().enumerate() {
                    for b in 0..dim {
                        let mut f = C64::default();
                        for (k, v) in values.iter().enumerate() {
                            f += C64::from_polar(1.0, -2.0 * PI * (e * k) as f64 / n as f64) * v.amplitudes()[b];
                        }
                        *w += f.norm_sqr();
                    }
                }
                let total: f64 = weights.iter().sum();
                for (e, &w) in weights.iter().enumerate() {
                    if w > 1e-20 * total.max(1e-300) && w > 0.0 {
                        support.insert(symmetric_value(e, n));
                    }
                }
            }
        }
        Ok(support)
    }
}

/// Translate a configuration by one step along `d` and negate it:
/// `phi'(x, i) = -phi(x + e_d, i)`. Requires periodicity along `d`.
pub fn charge_conjugate(geom: &LatticeGeometry, phi: &GaugeConfiguration, d: Direction) -> Result<GaugeConfiguration, FpepsError> {
    translate(geom, phi, d, 1, -1.0)
}

/// `phi'(x, i) = sign * phi(x + steps e_d, i)`.
pub fn translate(geom: &LatticeGeometry, phi: &GaugeConfiguration, d: Direction, steps: usize, sign: f64) -> Result<GaugeConfiguration, FpepsError> {
    phi.check(geom)?;
    let mut out = GaugeConfiguration::zeros(geom);
    for (k, l) in geom.links().iter().enumerate() {
        let mut y = l.origin;
        for _ in 0..steps {
            y = geom.forward(y, d).ok_or(LatticeError::VertexOutOfRange(y.col as i64, y.row as i64))?;
        }
        let src = geom.link(y, l.direction)?;
        out.angles[k] = sign * phi.angles[geom.link_index(src).unwrap()];
    }
    Ok(out)
}

/// Look up a link in a configuration.
pub fn angle(geom: &LatticeGeometry, phi: &GaugeConfiguration, l: LinkId) -> Option<f64> {
    geom.link_index(l).map(|i| phi.angles[i])
}
