//! Dense Fock-space amplitudes for small fermionic systems.
//!
//! Bit `k` of a basis index is the occupation of mode `k`, and the basis state
//! is `a_{i1}† a_{i2}† ... |0>` with ascending `i1 < i2 < ...`.

use super::{GaussianError, Ladder};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n: usize,
    amps: Vec<C64>,
}

fn below_sign(b: usize, k: usize) -> f64 {
    if (b & ((1usize << k) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FockState {
    pub fn vacuum(n: usize) -> Self {
        let mut amps = vec![C64::default(); 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self, GaussianError> {
        if amps.len() != 1 << n {
            return Err(GaussianError::Shape(amps.len(), 1, 1 << n, 1));
        }
        Ok(Self { n, amps })
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_squared(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&mut self, s: C64) {
        self.amps.iter_mut().for_each(|a| *a *= s);
    }

    fn check(&self, k: usize) -> Result<(), GaussianError> {
        if k >= self.n {
            Err(GaussianError::ModeOutOfRange(k, self.n))
        } else {
            Ok(())
        }
    }

    pub fn apply(&self, op: Ladder) -> Result<Self, GaussianError> {
        let k = op.mode();
        self.check(k)?;
        let want = match op {
            Ladder::Create(_) => 0,
            Ladder::Annihilate(_) => 1,
        };
        let mut out = vec![C64::default(); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if (b >> k) & 1 == want && a != C64::default() {
                out[b ^ (1 << k)] += a * below_sign(b, k);
            }
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// Apply a product of ladder operators, rightmost first.
    pub fn apply_all(&self, ops: &[Ladder]) -> Result<Self, GaussianError> {
        let mut s = self.clone();
        for &o in ops.iter().rev() {
            s = s.apply(o)?;
        }
        Ok(s)
    }

    /// `<o1 o2 ...>` in the normalized state.
    pub fn expect(&self, ops: &[Ladder]) -> Result<C64, GaussianError> {
        Ok(self.inner(&self.apply_all(ops)?) / self.norm_squared())
    }

    /// Multiply by `prod (1 + t a_i† a_j†)`.
    pub fn apply_pairing(&mut self, pairs: &[(usize, usize, C64)]) -> Result<(), GaussianError> {
        for &(i, j, t) in pairs {
            let add = self.apply(Ladder::Create(j))?.apply(Ladder::Create(i))?;
            self.amps.iter_mut().zip(&add.amps).for_each(|(a, x)| *a += t * x);
        }
        Ok(())
    }

    /// Apply `exp(i phi n_k)`.
    pub fn rotate(&mut self, k: usize, phi: f64) -> Result<(), GaussianError> {
        self.check(k)?;
        let ph = C64::from_polar(1.0, phi);
        for (b, a) in self.amps.iter_mut().enumerate() {
            if (b >> k) & 1 == 1 {
                *a *= ph;
            }
        }
        Ok(())
    }

    /// Modes of `other` appended after those of `self`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = vec![C64::default(); 1 << (self.n + other.n)];
        for (bo, &ao) in other.amps.iter().enumerate() {
            if ao == C64::default() {
                continue;
            }
            for (bs, &a) in self.amps.iter().enumerate() {
                amps[bs | (bo << self.n)] = a * ao;
            }
        }
        Self { n: self.n + other.n, amps }
    }

    /// Reorder so that new mode `k` is old mode `order[k]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self, GaussianError> {
        if order.len() != self.n {
            return Err(GaussianError::BondSize { bond: self.n, requested: order.len() });
        }
        let mut new_pos = vec![usize::MAX; self.n];
        for (k, &m) in order.iter().enumerate() {
            self.check(m)?;
            if new_pos[m] != usize::MAX {
                return Err(GaussianError::RepeatedMode(m));
            }
            new_pos[m] = k;
        }
        let mut out = vec![C64::default(); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if a == C64::default() {
                continue;
            }
            let occ: Vec<usize> = (0..self.n).filter(|&m| (b >> m) & 1 == 1).map(|m| new_pos[m]).collect();
            let mut inversions = 0;
            for i in 0..occ.len() {
                for j in i + 1..occ.len() {
                    if occ[i] > occ[j] {
                        inversions += 1;
                    }
                }
            }
            let nb = occ.iter().fold(0usize, |acc, &p| acc | (1 << p));
            out[nb] = if inversions % 2 == 0 { a } else { -a };
        }
        Ok(Self { n: self.n, amps: out })
    }

    /// Contract the listed modes with the bra of the normalized bond
    /// `prod_k (1 + t_k a_{i_k}† a_{j_k}†)|0> / sqrt(prod (1 + |t_k|^2))`.
    /// The remaining modes keep their relative order.
    pub fn project_pairs(&self, pairs: &[(usize, usize, C64)]) -> Result<Self, GaussianError> {
        let mut removed = vec![false; self.n];
        for &(i, j, _) in pairs {
            for m in [i, j] {
                self.check(m)?;
                if removed[m] {
                    return Err(GaussianError::RepeatedMode(m));
                }
                removed[m] = true;
            }
        }
        let mut s = self.clone();
        // current position of every original mode
        let mut pos: Vec<usize> = (0..self.n).collect();
        for &(i, j, t) in pairs {
            let (pi, pj) = (pos[i], pos[j]);
            s = s.project_one_pair(pi, pj, t);
            for p in pos.iter_mut() {
                *p -= (*p > pi) as usize + (*p > pj) as usize;
            }
        }
        Ok(s)
    }

    /// `<0|_{ij} (1 + conj(t) a_j a_i) / sqrt(1 + |t|^2)`, dropping modes `i`, `j`.
    fn project_one_pair(&self, i: usize, j: usize, t: C64) -> Self {
        let n = self.n - 2;
        let (lo, hi) = (i.min(j), i.max(j));
        let norm = 1.0 / (1.0 + t.norm_sqr()).sqrt();
        let tc = t.conj();
        let mut amps = vec![C64::default(); 1 << n];
        for (nb, out) in amps.iter_mut().enumerate() {
            // reinsert zero bits at lo and hi
            let low = nb & ((1 << lo) - 1);
            let mid = (nb >> lo) & ((1 << (hi - lo - 1)) - 1);
            let top = nb >> (hi - 1);
            let b = low | (mid << (lo + 1)) | (top << (hi + 1));
            let full = b | (1 << i) | (1 << j);
            let mut a = self.amps[b];
            let f = self.amps[full];
            if f != C64::default() {
                let s1 = below_sign(full, i);
                let s2 = below_sign(full ^ (1 << i), j);
                a += tc * f * (s1 * s2);
            }
            *out = a * norm;
        }
        Self { n, amps }
    }

    /// Keep only amplitudes with every flagged mode empty, dropping those modes.
    pub fn select_empty(&self, removed: &[bool]) -> Self {
        let kept: Vec<usize> = (0..self.n).filter(|&m| !removed[m]).collect();
        let mask = removed
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .fold(0usize, |acc, (m, _)| acc | (1 << m));
        let mut amps = vec![C64::default(); 1 << kept.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            if b & mask != 0 {
                continue;
            }
            let nb = kept
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &m)| acc | (((b >> m) & 1) << k));
            amps[nb] = a;
        }
        Self { n: kept.len(), amps }
    }

    /// Total parity weights `(even, odd)` of the squared amplitudes.
    pub fn parity_weights(&self) -> (f64, f64) {
        let mut w = (0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            if b.count_ones() % 2 == 0 {
                w.0 += a.norm_sqr();
            } else {
                w.1 += a.norm_sqr();
            }
        }
        w
    }
}
