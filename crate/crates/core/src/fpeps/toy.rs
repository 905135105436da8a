//! Bosonic PEPS whose site tensor is a Kronecker delta on the Gauss law,
//! built densely in the exact engine's qudit layout.

use crate::exact::{symmetric_value, ExactError, Layout};
use crate::lattice::{Direction, LatticeGeometry, Vertex};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToyError {
    #[error("link modulus {n} cannot hold virtual values up to {j}")]
    ModulusTooSmall { n: usize, j: usize },
    #[error("site tensor vanishes identically")]
    ZeroTensor,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `A^p_{ruld}` with `p in [-J, J]` and virtual values in `[-j, j]`,
/// vanishing unless `r + u = l + d + p`.
#[derive(Debug, Clone)]
pub struct ToyPeps {
    geom: LatticeGeometry,
    j: i64,
    big_j: i64,
    n: usize,
    tensor: Vec<C64>,
}

impl ToyPeps {
    /// `weight` sets the nonzero entries before unit Frobenius normalization.
    pub fn new(
        geom: LatticeGeometry,
        j: usize,
        big_j: usize,
        n: usize,
        weight: impl Fn(i64, i64, i64, i64, i64) -> C64,
    ) -> Result<Self, ToyError> {
        if n < 2 * j + 1 {
            return Err(ToyError::ModulusTooSmall { n, j });
        }
        let (j, big_j) = (j as i64, big_j as i64);
        let dv = (2 * j + 1) as usize;
        let dp = (2 * big_j + 1) as usize;
        let mut tensor = vec![C64::default(); dp * dv.pow(4)];
        let mut norm = 0.0;
        for p in -big_j..=big_j {
            for r in -j..=j {
                for u in -j..=j {
                    for l in -j..=j {
                        for d in -j..=j {
                            if r + u == l + d + p {
                                let w = weight(p, r, u, l, d);
                                norm += w.norm_sqr();
                                let k = Self::index_of(j, big_j, p, r, u, l, d);
                                tensor[k] = w;
                            }
                        }
                    }
                }
            }
        }
        if norm == 0.0 {
            return Err(ToyError::ZeroTensor);
        }
        let s = 1.0 / norm.sqrt();
        tensor.iter_mut().for_each(|a| *a *= s);
        Ok(Self { geom, j, big_j, n, tensor })
    }

    pub fn kronecker(geom: LatticeGeometry, j: usize, big_j: usize, n: usize) -> Result<Self, ToyError> {
        Self::new(geom, j, big_j, n, |_, _, _, _, _| C64::new(1.0, 0.0))
    }

    fn index_of(j: i64, big_j: i64, p: i64, r: i64, u: i64, l: i64, d: i64) -> usize {
        let dv = 2 * j + 1;
        let mut k = (p + big_j) as usize;
        for v in [r, u, l, d] {
            k = k * dv as usize + (v + j) as usize;
        }
        k
    }

    fn amp(&self, p: i64, r: i64, u: i64, l: i64, d: i64) -> C64 {
        if p.abs() > self.big_j {
            return C64::default();
        }
        self.tensor[Self::index_of(self.j, self.big_j, p, r, u, l, d)]
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }

    /// Vertex charges only: one qudit of dimension `2J + 1` per vertex.
    pub fn matter_layout(&self) -> Result<Layout, ToyError> {
        Ok(Layout::new(0, vec![(2 * self.big_j + 1) as usize; self.geom.n_vertices()])?)
    }

    /// Vertex charges followed by one `Z_n` qudit per link.
    pub fn gauged_layout(&self) -> Result<Layout, ToyError> {
        let mut dims = vec![(2 * self.big_j + 1) as usize; self.geom.n_vertices()];
        dims.extend(std::iter::repeat_n(self.n, self.geom.n_links()));
        Ok(Layout::new(0, dims)?)
    }

    /// Contract the bond values: every link carries one value shared by the
    /// right/up leg of its origin and the left/down leg of its target.
    /// Legs without a link are fixed to zero.
    fn contract(&self, layout: &Layout, gauged: bool) -> Vec<C64> {
        let links = self.geom.links();
        let nv = self.geom.n_vertices();
        let dv = (2 * self.j + 1) as usize;
        let mut out = vec![C64::default(); layout.dim()];
        let total = dv.pow(links.len() as u32);
        let mut vals = vec![0i64; links.len()];
        for code in 0..total {
            let mut c = code;
            for v in vals.iter_mut() {
                *v = (c % dv) as i64 - self.j;
                c /= dv;
            }
            let leg = |x: Vertex, d: Direction, outgoing: bool| -> i64 {
                let origin = if outgoing { Some(x) } else { self.geom.backward(x, d) };
                origin
                    .and_then(|o| self.geom.link(o, d).ok())
                    .and_then(|l| self.geom.link_index(l))
                    .map_or(0, |i| vals[i])
            };
            let mut amp = C64::new(1.0, 0.0);
            let mut basis = 0usize;
            for x in self.geom.vertices() {
                let r = leg(x, Direction::X, true);
                let u = leg(x, Direction::Y, true);
                let l = leg(x, Direction::X, false);
                let d = leg(x, Direction::Y, false);
                let p = r + u - l - d;
                amp *= self.amp(p, r, u, l, d);
                if amp == C64::default() {
                    break;
                }
                basis = layout.with_digit(basis, self.geom.vertex_index(x), (p + self.big_j) as usize);
            }
            if amp == C64::default() {
                continue;
            }
            if gauged {
                // controlled shift of the empty link by the origin's right/up value
                for (i, &v) in vals.iter().enumerate() {
                    let q = nv + i;
                    let e0 = layout.digit(basis, q) as i64;
                    basis = layout.with_digit(basis, q, (e0 + v).rem_euclid(self.n as i64) as usize);
                }
            }
            out[basis] += amp;
        }
        out
    }

    /// `|psi_0>`, matter only.
    pub fn ungauged_state(&self) -> Result<(Layout, Vec<C64>), ToyError> {
        let layout = self.matter_layout()?;
        let v = self.contract(&layout, false);
        Ok((layout, v))
    }

    /// `|psi>`, matter plus link fields.
    pub fn gauged_state(&self) -> Result<(Layout, Vec<C64>), ToyError> {
        let layout = self.gauged_layout()?;
        let v = self.contract(&layout, true);
        Ok((layout, v))
    }

    pub fn charge(&self, layout: &Layout, basis: usize, x: Vertex) -> i64 {
        layout.digit(basis, self.geom.vertex_index(x)) as i64 - self.big_j
    }

    pub fn field(&self, layout: &Layout, basis: usize, link: usize) -> i64 {
        symmetric_value(layout.digit(basis, self.geom.n_vertices() + link), self.n)
    }

    /// `exp(i lambda sum_x Q(x))` applied to a matter-only state.
    pub fn global_phase(&self, layout: &Layout, state: &[C64], lambda: f64) -> Vec<C64> {
        state
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let q: i64 = self.geom.vertices().map(|x| self.charge(layout, b, x)).sum();
                a * C64::from_polar(1.0, lambda * q as f64)
            })
            .collect()
    }

    /// Eigenvalue of `G(x) = sum signed E - Q(x)` on a gauged basis state.
    pub fn gauss_value(&self, layout: &Layout, basis: usize, x: Vertex) -> i64 {
        let div: i64 = self
            .geom
            .star_links(x)
            .into_iter()
            .map(|(l, s)| s as i64 * self.field(layout, basis, self.geom.link_index(l).unwrap()))
            .sum();
        div - self.charge(layout, basis, x)
    }

    /// `exp(i lambda G(x))` applied to a gauged state.
    pub fn gauss_phase(&self, layout: &Layout, state: &[C64], x: Vertex, lambda: f64) -> Vec<C64> {
        state
            .iter()
            .enumerate()
            .map(|(b, a)| {
                if *a == C64::default() {
                    return *a;
                }
                a * C64::from_polar(1.0, lambda * self.gauss_value(layout, b, x) as f64)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn zero_truncation_is_product_state() {
        let geom = LatticeGeometry::new(2, 2, Boundary::Torus).unwrap();
        let toy = ToyPeps::kronecker(geom, 0, 1, 3).unwrap();
        let (layout, psi) = toy.gauged_state().unwrap();
        let nz: Vec<usize> = (0..psi.len()).filter(|&b| psi[b].norm() > 0.0).collect();
        assert_eq!(nz.len(), 1);
        for l in 0..8 {
            assert_eq!(toy.field(&layout, nz[0], l), 0);
        }
    }

    #[test]
    fn open_chain_symmetries() {
        let geom = LatticeGeometry::new(3, 1, Boundary::Open).unwrap();
        let toy = ToyPeps::new(geom.clone(), 1, 2, 3, |p, r, u, l, d| {
            C64::new(1.0 + 0.1 * (p + 2 * r - u) as f64, 0.2 * (l - d) as f64)
        })
        .unwrap();
        let (ml, psi0) = toy.ungauged_state().unwrap();
        assert!(dist(&toy.global_phase(&ml, &psi0, 0.77), &psi0) < 1e-12);
        let (gl, psi) = toy.gauged_state().unwrap();
        for x in geom.vertices() {
            assert!(dist(&toy.gauss_phase(&gl, &psi, x, 1.3), &psi) < 1e-12);
        }
        assert!(psi.iter().map(|a| a.norm_sqr()).sum::<f64>() > 0.0);
    }

    #[test]
    fn modulus_must_hold_truncation() {
        let geom = LatticeGeometry::chain(2).unwrap();
        assert!(matches!(ToyPeps::kronecker(geom, 1, 1, 2), Err(ToyError::ModulusTooSmall { .. })));
    }
}
