//! Metropolis sampling of gauge-field configurations with weight
//! `p(Phi) ~ <psi(Phi)|psi(Phi)>`, and Wilson-loop and meson-string estimators.

mod stats;

pub use stats::{blocking_error, estimate, tau_int, EstimateWithError};

use crate::fpeps::{Fpeps, FpepsError, GaugeConfiguration};
use crate::gaussian::{CovarianceState, Ladder};
use crate::lattice::{parity_of, LatticeGeometry, LinkId, OrientedPath, Vertex};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("proposal width {0} outside (0, pi]")]
    BadDelta(f64),
    #[error("need at least one chain and one recorded sample")]
    NoSamples,
    #[error("thinning must be positive")]
    BadThinning,
    #[error("{0} configurations exceed the enumeration limit {1}")]
    TooManyConfigurations(f64, usize),
    #[error("Wilson loop needs a closed path")]
    OpenLoop,
    #[error("meson string must run from {0:?} to {1:?}")]
    PathEndpoints(Vertex, Vertex),
    #[error("every configuration has zero weight")]
    ZeroPartitionFunction,
    #[error(transparent)]
    Fpeps(#[from] FpepsError),
}

/// Limit on `N^links` for full enumeration.
pub const ENUMERATION_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainConfig {
    pub n_chains: usize,
    pub n_sweeps: usize,
    pub burn_in: usize,
    /// Initial proposal half-width in radians; tuned during burn-in.
    pub delta: f64,
    pub seed: u64,
    pub thinning: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self { n_chains: 4, n_sweeps: 25_000, burn_in: 500, delta: 1.0, seed: 0, thinning: 1 }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.delta > 0.0 && self.delta <= PI) {
            return Err(SamplerError::BadDelta(self.delta));
        }
        if self.thinning == 0 {
            return Err(SamplerError::BadThinning);
        }
        if self.n_chains == 0 || self.n_sweeps == 0 {
            return Err(SamplerError::NoSamples);
        }
        Ok(())
    }

    /// Independent stream for chain `k`.
    pub fn rng(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k as u64);
        rng
    }
}

/// Observable evaluated on one configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// `exp(i sum +-phi)` around a closed path.
    WilsonLoop(OrientedPath),
    /// `exp(i sum +-phi) <c(x) d(y)>_Phi` along an open path from `x` to `y`,
    /// where `c` creates the charge of `x` and `d` removes the charge of `y`:
    /// `psi†` on even sites and `psi` on odd sites for `c`, the reverse for `d`.
    MesonString { x: Vertex, y: Vertex, path: OrientedPath },
    /// `exp(i phi)` on a single link; not gauge invariant.
    LinkPhase(LinkId),
}

impl Observable {
    pub fn wilson_loop(geom: &LatticeGeometry, path: OrientedPath) -> Result<Self, SamplerError> {
        if !path.closed {
            return Err(SamplerError::OpenLoop);
        }
        geom.path_endpoints(&path).map_err(FpepsError::from)?;
        Ok(Observable::WilsonLoop(path))
    }

    pub fn meson(geom: &LatticeGeometry, x: Vertex, y: Vertex, path: OrientedPath) -> Result<Self, SamplerError> {
        match geom.path_endpoints(&path).map_err(FpepsError::from)? {
            Some((a, b)) if a == x && b == y => {}
            None if x == y => {}
            _ => return Err(SamplerError::PathEndpoints(x, y)),
        }
        Ok(Observable::MesonString { x, y, path })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Observable::WilsonLoop(_) => "wilson_loop",
            Observable::MesonString { .. } => "meson_string",
            Observable::LinkPhase(_) => "link_phase",
        }
    }

    /// Value on `phi`; `state` is the normalized physical state or `None`
    /// at a zero-norm point, where the fermionic factor is taken as zero.
    pub fn value(&self, geom: &LatticeGeometry, phi: &GaugeConfiguration, state: Option<&CovarianceState>) -> C64 {
        match self {
            Observable::WilsonLoop(p) => C64::from_polar(1.0, phi.holonomy(geom, p)),
            Observable::LinkPhase(l) => C64::from_polar(1.0, phi.angles[geom.link_index(*l).expect("link on lattice")]),
            Observable::MesonString { x, y, path } => match state {
                Some(s) => {
                    let (i, j) = (geom.vertex_index(*x), geom.vertex_index(*y));
                    let c = if parity_of(*x) > 0 { Ladder::Create(i) } else { Ladder::Annihilate(i) };
                    let d = if parity_of(*y) > 0 { Ladder::Annihilate(j) } else { Ladder::Create(j) };
                    let two = s.two_point(c, d).unwrap_or_default();
                    C64::from_polar(1.0, phi.holonomy(geom, path)) * two
                }
                None => C64::default(),
            },
        }
    }
}

/// `ln <psi(Phi)|psi(Phi)>` and the physical state, `None` at zero norm.
fn evaluate(f: &Fpeps, phi: &GaugeConfiguration) -> Result<(f64, Option<CovarianceState>), FpepsError> {
    match f.assemble(phi) {
        Ok(s) => Ok((2.0 * s.log_norm(), Some(s))),
        Err(FpepsError::ZeroNorm) => Ok((f64::NEG_INFINITY, None)),
        Err(e) => Err(e),
    }
}

/// Every Z_N configuration of a small lattice with its weight and state.
#[derive(Debug, Clone)]
pub struct DiscreteTable {
    pub geom: LatticeGeometry,
    pub n: usize,
    pub log_weights: Vec<f64>,
    states: Vec<Option<CovarianceState>>,
}

impl DiscreteTable {
    /// Configuration index `sum_l k_l N^l`.
    pub fn index(&self, k: &[usize]) -> usize {
        k.iter().rev().fold(0, |acc, &d| acc * self.n + d)
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        (0..self.geom.n_links())
            .map(|_| {
                let d = idx % self.n;
                idx /= self.n;
                d
            })
            .collect()
    }

    pub fn config(&self, idx: usize) -> GaugeConfiguration {
        GaugeConfiguration::from_zn(&self.digits(idx), self.n)
    }

    pub fn enumerate(f: &Fpeps, n: usize) -> Result<Self, SamplerError> {
        let geom = f.geometry().clone();
        let count = (n as f64).powi(geom.n_links() as i32);
        if count > ENUMERATION_LIMIT as f64 {
            return Err(SamplerError::TooManyConfigurations(count, ENUMERATION_LIMIT));
        }
        let count = count as usize;
        let mut table = Self { geom, n, log_weights: Vec::new(), states: Vec::new() };
        let evals: Vec<(f64, Option<CovarianceState>)> = (0..count)
            .into_par_iter()
            .map(|i| evaluate(f, &table.config(i)))
            .collect::<Result<_, _>>()?;
        let (w, s): (Vec<_>, Vec<_>) = evals.into_iter().unzip();
        table.log_weights = w;
        table.states = s;
        Ok(table)
    }

    pub fn state(&self, idx: usize) -> Option<&CovarianceState> {
        self.states[idx].as_ref()
    }

    /// Weighted average over all configurations.
    pub fn exact_reference(&self, obs: &Observable) -> Result<C64, SamplerError> {
        let top = self.log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(SamplerError::ZeroPartitionFunction);
        }
        let mut z = 0.0;
        let mut acc = C64::default();
        for (i, &lw) in self.log_weights.iter().enumerate() {
            let w = (lw - top).exp();
            if w == 0.0 {
                continue;
            }
            z += w;
            acc += w * obs.value(&self.geom, &self.config(i), self.state(i));
        }
        Ok(acc / z)
    }
}

/// Per-sweep record of one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub sweep: usize,
    pub log_weight: f64,
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub trace: Vec<SweepRecord>,
    /// `samples[o][s]` for observable `o`.
    pub samples: Vec<Vec<C64>>,
    pub delta: f64,
    pub acceptance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub chains: Vec<ChainOutput>,
    pub estimates: Vec<EstimateWithError>,
}

fn accept(rng: &mut impl Rng, current: f64, proposed: f64) -> bool {
    if proposed == f64::NEG_INFINITY {
        return false;
    }
    if current == f64::NEG_INFINITY || proposed >= current {
        return true;
    }
    rng.random::<f64>().ln() < proposed - current
}

fn merge(chains: Vec<ChainOutput>, n_obs: usize) -> McResult {
    let estimates = (0..n_obs)
        .map(|o| estimate(&chains.iter().map(|c| c.samples[o].clone()).collect::<Vec<_>>()))
        .collect();
    McResult { chains, estimates }
}

/// Chain over Z_N configurations with weights read from the table; each
/// link proposes one of the other `N - 1` values uniformly.
pub fn run_discrete(table: &DiscreteTable, cfg: &ChainConfig, observables: &[Observable]) -> Result<McResult, SamplerError> {
    cfg.validate()?;
    let nl = table.geom.n_links();
    let n = table.n;
    let chains: Vec<ChainOutput> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|k| {
            let mut rng = cfg.rng(k);
            let mut digits: Vec<usize> = (0..nl).map(|_| rng.random_range(0..n)).collect();
            let mut idx = table.index(&digits);
            let mut lw = table.log_weights[idx];
            let mut out = ChainOutput { trace: Vec::new(), samples: vec![Vec::new(); observables.len()], delta: 0.0, acceptance: 0.0 };
            let mut accepted_total = 0usize;
            let stride: Vec<usize> = (0..nl).map(|l| n.pow(l as u32)).collect();
            for sweep in 0..cfg.burn_in + cfg.n_sweeps {
                let mut accepted = 0;
                for l in 0..nl {
                    let new = (digits[l] + rng.random_range(1..n)) % n;
                    let new_idx = idx + new * stride[l] - digits[l] * stride[l];
                    let new_lw = table.log_weights[new_idx];
                    if accept(&mut rng, lw, new_lw) {
                        digits[l] = new;
                        idx = new_idx;
                        lw = new_lw;
                        accepted += 1;
                    }
                }
                let acc = accepted as f64 / nl.max(1) as f64;
                if sweep >= cfg.burn_in {
                    accepted_total += accepted;
                    out.trace.push(SweepRecord { sweep, log_weight: lw, acceptance: acc });
                    if (sweep - cfg.burn_in) % cfg.thinning == 0 {
                        let phi = table.config(idx);
                        for (o, obs) in observables.iter().enumerate() {
                            out.samples[o].push(obs.value(&table.geom, &phi, table.state(idx)));
                        }
                    }
                }
            }
            out.acceptance = accepted_total as f64 / (cfg.n_sweeps * nl.max(1)) as f64;
            out
        })
        .collect();
    Ok(merge(chains, observables.len()))
}

/// Chain over continuous angles with uniform proposals in `[-delta, delta]`,
/// the width tuned during burn-in towards 40-60% acceptance.
pub fn run_continuous(f: &Fpeps, cfg: &ChainConfig, observables: &[Observable]) -> Result<McResult, SamplerError> {
    cfg.validate()?;
    let geom = f.geometry().clone();
    let nl = geom.n_links();
    let chains: Vec<Result<ChainOutput, SamplerError>> = (0..cfg.n_chains)
        .into_par_iter()
        .map(|k| {
            let mut rng = cfg.rng(k);
            let mut phi = GaugeConfiguration::random(&geom, &mut rng);
            let (mut lw, mut state) = evaluate(f, &phi)?;
            let mut delta = cfg.delta;
            let mut out = ChainOutput { trace: Vec::new(), samples: vec![Vec::new(); observables.len()], delta, acceptance: 0.0 };
            let mut window = (0usize, 0usize);
            let mut accepted_total = 0usize;
            for sweep in 0..cfg.burn_in + cfg.n_sweeps {
                let mut accepted = 0;
                for l in 0..nl {
                    let old = phi.angles[l];
                    phi.angles[l] = (old + rng.random_range(-delta..=delta)).rem_euclid(TAU);
                    let (new_lw, new_state) = evaluate(f, &phi)?;
                    if accept(&mut rng, lw, new_lw) {
                        lw = new_lw;
                        state = new_state;
                        accepted += 1;
                    } else {
                        phi.angles[l] = old;
                    }
                }
                let acc = accepted as f64 / nl.max(1) as f64;
                if sweep < cfg.burn_in {
                    window.0 += accepted;
                    window.1 += nl;
                    if window.1 >= 20 * nl.max(1) {
                        let rate = window.0 as f64 / window.1 as f64;
                        if !(0.4..=0.6).contains(&rate) {
                            delta = (delta * (rate / 0.5).clamp(0.5, 2.0)).clamp(1e-3, PI);
                        }
                        window = (0, 0);
                    }
                    continue;
                }
                accepted_total += accepted;
                out.trace.push(SweepRecord { sweep, log_weight: lw, acceptance: acc });
                if (sweep - cfg.burn_in) % cfg.thinning == 0 {
                    for (o, obs) in observables.iter().enumerate() {
                        out.samples[o].push(obs.value(&geom, &phi, state.as_ref()));
                    }
                }
            }
            out.delta = delta;
            out.acceptance = accepted_total as f64 / (cfg.n_sweeps * nl.max(1)) as f64;
            Ok(out)
        })
        .collect();
    let chains = chains.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(merge(chains, observables.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpeps::SiteTensorParams;
    use crate::lattice::{Boundary, Direction};

    fn torus() -> LatticeGeometry {
        LatticeGeometry::new(2, 2, Boundary::Torus).unwrap()
    }

    fn generic() -> SiteTensorParams {
        SiteTensorParams::new(0.8, C64::new(0.3, -0.2), C64::new(-0.4, 0.5), 0).unwrap()
    }

    fn small_cfg(seed: u64) -> ChainConfig {
        ChainConfig { n_chains: 2, n_sweeps: 2000, burn_in: 100, delta: 1.0, seed, thinning: 1 }
    }

    #[test]
    fn same_seed_same_chain() {
        let f = Fpeps::new(torus(), generic()).unwrap();
        let table = DiscreteTable::enumerate(&f, 3).unwrap();
        let obs = [Observable::wilson_loop(&table.geom, table.geom.rectangle_loop(Vertex::new(0, 0), 1, 1).unwrap()).unwrap()];
        let a = run_discrete(&table, &small_cfg(7), &obs).unwrap();
        let b = run_discrete(&table, &small_cfg(7), &obs).unwrap();
        assert_eq!(a, b);
        let c = run_discrete(&table, &small_cfg(8), &obs).unwrap();
        assert_ne!(a.chains[0].samples, c.chains[0].samples);
    }

    #[test]
    fn zero_area_loop_is_one() {
        let geom = torus();
        let l = geom.link(Vertex::new(0, 0), Direction::X).unwrap();
        let path = OrientedPath {
            steps: vec![(l, crate::lattice::Orientation::Forward), (l, crate::lattice::Orientation::Backward)],
            closed: true,
        };
        let obs = Observable::WilsonLoop(path);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let phi = GaugeConfiguration::random(&geom, &mut rng);
            assert!((obs.value(&geom, &phi, None) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn flat_weight_gives_uniform_links() {
        let p = SiteTensorParams::new(0.0, C64::default(), C64::default(), 0).unwrap();
        let f = Fpeps::new(torus(), p).unwrap();
        let table = DiscreteTable::enumerate(&f, 3).unwrap();
        let w0 = table.log_weights[0];
        assert!(table.log_weights.iter().all(|w| (w - w0).abs() < 1e-12));
        let l = table.geom.links()[0];
        let obs = [Observable::LinkPhase(l)];
        let cfg = ChainConfig { n_chains: 1, n_sweeps: 9000, burn_in: 0, delta: 1.0, seed: 3, thinning: 1 };
        let res = run_discrete(&table, &cfg, &obs).unwrap();
        let mut counts = [0.0f64; 3];
        for z in &res.chains[0].samples[0] {
            let k = (z.arg().rem_euclid(TAU) / (TAU / 3.0)).round() as usize % 3;
            counts[k] += 1.0;
        }
        let e = 3000.0;
        let chi2: f64 = counts.iter().map(|c| (c - e).powi(2) / e).sum();
        // 2 degrees of freedom, 99.9% quantile
        assert!(chi2 < 13.8, "{counts:?}");
        assert!((res.chains[0].acceptance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_delta_accepts_everything() {
        let geom = LatticeGeometry::new(2, 1, Boundary::PeriodicX).unwrap();
        let f = Fpeps::new(geom, generic()).unwrap();
        let cfg = ChainConfig { n_chains: 1, n_sweeps: 50, burn_in: 0, delta: 1e-9, seed: 1, thinning: 1 };
        let res = run_continuous(&f, &cfg, &[]).unwrap();
        assert!(res.chains[0].acceptance > 0.95);
    }

    #[test]
    fn meson_string_is_gauge_invariant() {
        let geom = torus();
        let f = Fpeps::new(geom.clone(), generic()).unwrap();
        let x = Vertex::new(0, 0);
        let y = Vertex::new(1, 0);
        let obs = Observable::meson(&geom, x, y, geom.straight_path(x, Direction::X, 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let phi = GaugeConfiguration::random(&geom, &mut rng);
            let v = geom.vertex(rng.random_range(0..4));
            let shifted = phi.gauge_shift(&geom, v, rng.random_range(0.0..TAU));
            let a = obs.value(&geom, &phi, f.assemble(&phi).ok().as_ref());
            let b = obs.value(&geom, &shifted, f.assemble(&shifted).ok().as_ref());
            assert!((a - b).norm() < 1e-10, "{a} {b}");
            assert!(a.norm() > 1e-6);
        }
    }

    #[test]
    fn exact_reference_basics() {
        let f = Fpeps::new(torus(), generic()).unwrap();
        let table = DiscreteTable::enumerate(&f, 3).unwrap();
        let closed = OrientedPath { steps: Vec::new(), closed: true };
        assert!((table.exact_reference(&Observable::WilsonLoop(closed)).unwrap() - 1.0).norm() < 1e-14);
        let l = table.geom.links()[2];
        assert!(table.exact_reference(&Observable::LinkPhase(l)).unwrap().norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = small_cfg(0);
        cfg.delta = 4.0;
        assert_eq!(cfg.validate(), Err(SamplerError::BadDelta(4.0)));
        cfg.delta = 1.0;
        cfg.thinning = 0;
        assert_eq!(cfg.validate(), Err(SamplerError::BadThinning));
    }
}
