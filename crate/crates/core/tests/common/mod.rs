//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use gaugepeps::gaussian::{CovarianceState, Ladder, PairingMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense Fock vector with Jordan-Wigner operators built from scratch.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub n: usize,
    pub v: Vec<C64>,
}

fn jw(b: usize, k: usize) -> f64 {
    if (b & ((1 << k) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl Oracle {
    pub fn vacuum(n: usize) -> Self {
        let mut v = vec![C64::default(); 1 << n];
        v[0] = C64::new(1.0, 0.0);
        Self { n, v }
    }

    pub fn op(&self, o: Ladder) -> Self {
        let mut out = vec![C64::default(); self.v.len()];
        for (b, &a) in self.v.iter().enumerate() {
            match o {
                Ladder::Annihilate(k) if b & (1 << k) != 0 => out[b & !(1 << k)] += a * jw(b, k),
                Ladder::Create(k) if b & (1 << k) == 0 => out[b | (1 << k)] += a * jw(b, k),
                _ => {}
            }
        }
        Self { n: self.n, v: out }
    }

    pub fn ops(&self, ops: &[Ladder]) -> Self {
        ops.iter().rev().fold(self.clone(), |s, &o| s.op(o))
    }

    pub fn dot(&self, other: &Self) -> C64 {
        self.v.iter().zip(&other.v).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.dot(self).re
    }

    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        self.v.iter_mut().zip(&other.v).for_each(|(a, b)| *a += s * b);
    }

    /// `exp(1/2 sum G_ij a_i† a_j†)|0>` by its power series.
    pub fn pairing(g: &DMatrix<C64>) -> Self {
        let n = g.nrows();
        let x = |s: &Oracle| {
            let mut out = Oracle { n, v: vec![C64::default(); 1 << n] };
            for i in 0..n {
                for j in 0..n {
                    if g[(i, j)] != C64::default() {
                        let t = s.ops(&[Ladder::Create(i), Ladder::Create(j)]);
                        out.add_scaled(g[(i, j)] * 0.5, &t);
                    }
                }
            }
            out
        };
        let mut total = Oracle::vacuum(n);
        let mut term = Oracle::vacuum(n);
        for k in 1..=n / 2 + 1 {
            term = x(&term);
            term.v.iter_mut().for_each(|a| *a /= k as f64);
            total.add_scaled(C64::new(1.0, 0.0), &term);
        }
        total
    }

    pub fn rotate(&mut self, k: usize, phi: f64) {
        let n = self.ops(&[Ladder::Create(k), Ladder::Annihilate(k)]);
        // exp(i phi n) = 1 + (e^{i phi} - 1) n
        self.add_scaled(C64::from_polar(1.0, phi) - 1.0, &n);
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut v = vec![C64::default(); 1 << (self.n + other.n)];
        for (bo, ao) in other.v.iter().enumerate() {
            for (bs, a) in self.v.iter().enumerate() {
                v[bs | (bo << self.n)] = a * ao;
            }
        }
        Self { n: self.n + other.n, v }
    }

    /// Partial inner product with a bond state on `modes` (bond mode `k` sits
    /// on `modes[k]`): expand the bond in its Fock basis and apply the adjoint
    /// of each creation monomial.
    pub fn project(&self, modes: &[usize], bond: &Oracle) -> Self {
        let mut acc = Oracle { n: self.n, v: vec![C64::default(); self.v.len()] };
        for (beta, &w) in bond.v.iter().enumerate() {
            if w == C64::default() {
                continue;
            }
            // |beta> = a†_{m1} a†_{m2} ... |0> ascending in bond order; its
            // adjoint is a_{mk} ... a_{m1}
            let occupied: Vec<usize> = (0..bond.n).filter(|k| beta & (1 << k) != 0).collect();
            let adj: Vec<Ladder> = occupied.iter().map(|&k| Ladder::Annihilate(modes[k])).collect();
            // ops applies rightmost first, so list a_{m1} last
            let mut ordered = adj.clone();
            ordered.reverse();
            let img = self.ops(&ordered);
            acc.add_scaled(w.conj(), &img);
        }
        let mut keep = Vec::new();
        for m in 0..self.n {
            if !modes.contains(&m) {
                keep.push(m);
            }
        }
        let mut v = vec![C64::default(); 1 << keep.len()];
        for (b, a) in acc.v.iter().enumerate() {
            if modes.iter().any(|&m| b & (1 << m) != 0) {
                continue;
            }
            let mut nb = 0;
            for (k, &m) in keep.iter().enumerate() {
                if b & (1 << m) != 0 {
                    nb |= 1 << k;
                }
            }
            v[nb] = *a;
        }
        Self { n: keep.len(), v }
    }

    pub fn expect(&self, ops: &[Ladder]) -> C64 {
        self.dot(&self.ops(ops)) / self.norm2()
    }
}

pub fn random_antisymmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<C64> {
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
            g[(i, j)] = z;
            g[(j, i)] = -z;
        }
    }
    g
}

pub fn random_pairing(rng: &mut ChaCha8Rng, na: usize, nb: usize, scale: f64) -> PairingMatrix {
    let t = DMatrix::from_fn(na, nb, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    });
    PairingMatrix::new(t).unwrap()
}

/// Every ladder operator on `n` modes.
pub fn all_ladders(n: usize) -> Vec<Ladder> {
    (0..n).flat_map(|k| [Ladder::Create(k), Ladder::Annihilate(k)]).collect()
}

/// Largest deviation of the norm, all two-point and all four-point functions.
pub fn compare(state: &CovarianceState, oracle: &Oracle) -> (f64, f64, f64) {
    let rel_norm = (state.norm_squared() - oracle.norm2()).abs() / oracle.norm2().max(1e-300);
    let lad = all_ladders(oracle.n);
    let nrm = oracle.norm2();
    let mut two = 0.0f64;
    for &o1 in &lad {
        for &o2 in &lad {
            let exact = oracle.expect(&[o1, o2]);
            let got = state.two_point(o1, o2).unwrap();
            two = two.max((exact - got).norm());
        }
    }
    // <o1 o2 o3 o4> = <o2† o1† psi | o3 o4 psi>
    let left: Vec<Oracle> = lad
        .iter()
        .flat_map(|&o1| lad.iter().map(move |&o2| (o1, o2)))
        .map(|(o1, o2)| oracle.ops(&[o2.adjoint(), o1.adjoint()]))
        .collect();
    let right: Vec<Oracle> = lad
        .iter()
        .flat_map(|&o3| lad.iter().map(move |&o4| (o3, o4)))
        .map(|(o3, o4)| oracle.ops(&[o3, o4]))
        .collect();
    let m = lad.len();
    let mut four = 0.0f64;
    for (i12, l) in left.iter().enumerate() {
        for (i34, r) in right.iter().enumerate() {
            let exact = l.dot(r) / nrm;
            let ops = [lad[i12 / m], lad[i12 % m], lad[i34 / m], lad[i34 % m]];
            let got = state.four_point(ops).unwrap();
            four = four.max((exact - got).norm());
        }
    }
    (rel_norm, two, four)
}

/// A random sequence of pairing, rotation, tensor and bond projection steps
/// applied in parallel to a covariance state and a brute-force vector.
pub fn random_pipeline(rng: &mut ChaCha8Rng) -> (CovarianceState, Oracle) {
    let n1 = rng.random_range(2..=6usize);
    let scale = rng.random_range(0.2..1.5);
    let g = random_antisymmetric(rng, n1, scale);
    let mut cov = CovarianceState::from_antisymmetric(&g).unwrap();
    let mut orc = Oracle::pairing(&g);
    let n2 = rng.random_range(0..=(10 - n1).min(4));
    if n2 > 0 {
        let p = random_pairing(rng, 1, n2 - 1, 0.8);
        let (c2, o2) = if n2 >= 2 {
            let c = CovarianceState::from_pairing(&p).unwrap();
            let na = p.n_a();
            let emb = p.embed(n2, &(0..na).collect::<Vec<_>>(), &(na..n2).collect::<Vec<_>>()).unwrap();
            (c, Oracle::pairing(&emb))
        } else {
            (CovarianceState::vacuum(1), Oracle::vacuum(1))
        };
        cov = cov.tensor(&c2);
        orc = orc.tensor(&o2);
    }
    let n = n1 + n2;
    for _ in 0..rng.random_range(1..4) {
        let k = rng.random_range(0..n);
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        cov.rotate_mode(k, phi).unwrap();
        orc.rotate(k, phi);
    }
    let n_proj = rng.random_range(0..=(n / 2).min(2));
    for _ in 0..n_proj {
        let m = cov.n_modes();
        if m < 3 {
            break;
        }
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let t = C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let gb = DMatrix::from_row_slice(2, 2, &[C64::default(), t, -t, C64::default()]);
        let bond = CovarianceState::from_antisymmetric(&gb).unwrap().with_log_norm(0.0);
        let mut ob = Oracle::pairing(&gb);
        let s = 1.0 / ob.norm2().sqrt();
        ob.v.iter_mut().for_each(|a| *a *= s);
        match cov.project(&[i, j], &bond) {
            Ok(c) => {
                cov = c;
                orc = orc.project(&[i, j], &ob);
            }
            Err(_) => break,
        }
    }
    (cov, orc)
}

/// Site generator written out by hand: modes `[psi, r+, r-, u+, u-, l+, l-, d+, d-]`,
/// row modes `a`, column modes `b`, and `G_ab = T_ab = -G_ba`.
pub fn site_generator(even: bool, t: f64, y: C64, z: C64, eta: C64) -> DMatrix<C64> {
    let z = z / 2f64.sqrt();
    let tt = C64::new(t, 0.0);
    let o = C64::default();
    let rows = [
        [tt, eta * eta * tt, eta * tt, eta * eta * eta * tt],
        [o, y, z, z],
        [-y, o, -z, z],
        [-z, z, o, y],
        [-z, -z, -y, o],
    ];
    let (a, b): ([usize; 5], [usize; 4]) = if even {
        ([0, 2, 4, 5, 7], [1, 3, 6, 8])
    } else {
        ([0, 1, 3, 6, 8], [2, 4, 5, 7])
    };
    let mut g = DMatrix::zeros(9, 9);
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            g[(ai, bj)] = rows[i][j];
            g[(bj, ai)] = -rows[i][j];
        }
    }
    g
}

/// Dense contraction of the gauged network on a 2x2 torus, vertices in
/// row-major order. `phases(parity, phi)` gives the turns of the `+` and `-`
/// outgoing modes. Links are `[(0,0)x, (0,0)y, (1,0)x, (1,0)y, (0,1)x, (0,1)y, (1,1)x, (1,1)y]`.
pub fn torus_2x2(g_even: &DMatrix<C64>, g_odd: &DMatrix<C64>, phi: &[f64], phases: impl Fn(i32, f64) -> (f64, f64)) -> Oracle {
    let parity = |v: usize| if (v % 2 + v / 2) % 2 == 0 { 1 } else { -1 };
    let site = |v: usize| {
        let mut s = Oracle::pairing(if parity(v) > 0 { g_even } else { g_odd });
        let (px, mx) = phases(parity(v), phi[2 * v]);
        let (py, my) = phases(parity(v), phi[2 * v + 1]);
        s.rotate(1, px);
        s.rotate(2, mx);
        s.rotate(3, py);
        s.rotate(4, my);
        s
    };
    let pair = {
        let g = DMatrix::from_row_slice(2, 2, &[C64::default(), C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::default()]);
        let mut p = Oracle::pairing(&g);
        p.v.iter_mut().for_each(|a| *a /= 2f64.sqrt());
        p
    };
    // global label 9 v + k; a bond (first, second) is the pair state first† second†
    let (r, u, l, d) = (1, 3, 5, 7);
    let m = |v: usize, k: usize| 9 * v + k;
    let x_bond = |o: usize, t: usize| [(m(t, l), m(o, r)), (m(t, l + 1), m(o, r + 1))];
    let y_bond = |o: usize, t: usize| [(m(o, u), m(t, d)), (m(o, u + 1), m(t, d + 1))];
    let stages: [Vec<(usize, usize)>; 4] = [
        vec![],
        [x_bond(0, 1), x_bond(1, 0)].concat(),
        [y_bond(0, 2), y_bond(2, 0)].concat(),
        [x_bond(2, 3), x_bond(3, 2), y_bond(1, 3), y_bond(3, 1)].concat(),
    ];
    let mut state = Oracle::vacuum(0);
    let mut labels: Vec<usize> = Vec::new();
    for (v, bonds) in stages.iter().enumerate() {
        state = state.tensor(&site(v));
        labels.extend(m(v, 0)..m(v + 1, 0));
        for &(a, b) in bonds {
            let pa = labels.iter().position(|&x| x == a).unwrap();
            let pb = labels.iter().position(|&x| x == b).unwrap();
            state = state.project(&[pa, pb], &pair);
            labels.retain(|&x| x != a && x != b);
        }
    }
    state
}

/// Exact plaquette and meson averages on the 2x2 `Z_n` torus from dense
/// states. Links `0`, `1`, `3` form a spanning tree and are fixed to zero;
/// every gauge orbit meets this slice exactly once, and both observables
/// and the weight are orbit invariants, so the plain weighted average over
/// the slice is exact. The plaquette is `phi_0 + phi_3 - phi_4 - phi_1`;
/// the meson is `exp(i phi_0) <psi_0† psi_1†>` between `(0,0)` and `(1,0)`.
pub fn gauge_fixed_reference(g_even: &DMatrix<C64>, g_odd: &DMatrix<C64>, n: usize) -> (C64, C64) {
    use rayon::prelude::*;
    let free = [2usize, 4, 5, 6, 7];
    let count = n.pow(free.len() as u32);
    let (z, plaq, meson) = (0..count)
        .into_par_iter()
        .map(|c| {
            let mut phi = [0.0f64; 8];
            for (k, &l) in free.iter().enumerate() {
                phi[l] = std::f64::consts::TAU * ((c / n.pow(k as u32)) % n) as f64 / n as f64;
            }
            let s = torus_2x2(g_even, g_odd, &phi, |_, a| (a, -a));
            let w = s.norm2();
            let p = C64::from_polar(w, phi[0] + phi[3] - phi[4] - phi[1]);
            let m = C64::from_polar(w, phi[0]) * s.expect(&[Ladder::Create(0), Ladder::Create(1)]);
            (w, p, m)
        })
        .reduce(|| (0.0, C64::default(), C64::default()), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    (plaq / z, meson / z)
}

/// Hand-written site generators for both sublattices.
pub fn generators(p: &gaugepeps::fpeps::SiteTensorParams) -> (DMatrix<C64>, DMatrix<C64>) {
    (site_generator(true, p.t, p.y, p.z, p.eta_p), site_generator(false, p.t, p.y, p.z, p.eta_p))
}

/// Fourier weights of the dense 2x2 torus state over one `Z_n` link angle,
/// the other links fixed to the indices `idx`.
pub fn field_weights(
    p: &gaugepeps::fpeps::SiteTensorParams,
    n: usize,
    idx: &[usize],
    link: usize,
    phases: fn(i32, f64) -> (f64, f64),
) -> Vec<f64> {
    use std::f64::consts::TAU;
    let (ge, go) = generators(p);
    let mut idx = idx.to_vec();
    let states: Vec<Oracle> = (0..n)
        .map(|k| {
            idx[link] = k;
            let phi: Vec<f64> = idx.iter().map(|&m| TAU * m as f64 / n as f64).collect();
            torus_2x2(&ge, &go, &phi, phases)
        })
        .collect();
    (0..n)
        .map(|e| {
            (0..states[0].v.len())
                .map(|b| {
                    states
                        .iter()
                        .enumerate()
                        .map(|(k, s)| C64::from_polar(1.0, -TAU * (e * k) as f64 / n as f64) * s.v[b])
                        .sum::<C64>()
                        .norm_sqr()
                })
                .sum()
        })
        .collect()
}

/// Field values carrying weight, in the symmetric window.
pub fn support(w: &[f64]) -> std::collections::BTreeSet<i64> {
    let n = w.len() as i64;
    let total: f64 = w.iter().sum();
    (0..n)
        .filter(|&e| w[e as usize] > 1e-20 * total)
        .map(|e| if e > n / 2 { e - n } else { e })
        .collect()
}
