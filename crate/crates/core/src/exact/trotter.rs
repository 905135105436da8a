use super::{ExactError, GaugedSystem, HamiltonianParams, SparseOp, StateVector};
use crate::lattice::{parity_of, LinkId};
use num_complex::Complex64 as C64;
use std::collections::HashSet;

/// Partition of the links into groups applied together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub groups: Vec<Vec<LinkId>>,
}

impl Schedule {
    /// Greedy vertex-disjoint colouring in link order.
    pub fn greedy(sys: &GaugedSystem) -> Self {
        let mut groups: Vec<(Vec<LinkId>, HashSet<usize>)> = Vec::new();
        for &l in &sys.links {
            let ends = [sys.mode(l.origin), sys.mode(sys.geom.target(l))];
            match groups.iter_mut().find(|(_, used)| !ends.iter().any(|e| used.contains(e))) {
                Some((g, used)) => {
                    g.push(l);
                    used.extend(ends);
                }
                None => groups.push((vec![l], ends.into_iter().collect())),
            }
        }
        Self { groups: groups.into_iter().map(|(g, _)| g).collect() }
    }

    pub fn validate(&self, sys: &GaugedSystem) -> Result<(), ExactError> {
        let mut seen = HashSet::new();
        for (k, g) in self.groups.iter().enumerate() {
            let mut used = HashSet::new();
            for &l in g {
                sys.link_slot(l)?;
                if !seen.insert(l) {
                    return Err(ExactError::IncompleteSchedule(l));
                }
                for v in [l.origin, sys.geom.target(l)] {
                    if !used.insert(v) {
                        return Err(ExactError::IntersectingSchedule(k));
                    }
                }
            }
        }
        if let Some(&l) = sys.links.iter().find(|l| !seen.contains(l)) {
            return Err(ExactError::IncompleteSchedule(l));
        }
        Ok(())
    }
}

/// `U_G (exp(-i H_l tau)) U_G†` for the hopping term on one link.
fn link_factor(sys: &GaugedSystem, l: LinkId, hopping: f64, tau: f64) -> Result<SparseOp, ExactError> {
    let lay = &sys.layout;
    let x = sys.mode(l.origin);
    let y = sys.mode(sys.geom.target(l));
    let hop = lay.create(x).mul(&lay.annihilate(y));
    let h = hop.add(&hop.adjoint()).scale(C64::new(hopping, 0.0));
    // H_l^2 = eps^2 P with P the projector onto n_x != n_y
    let theta = hopping * tau;
    let proj = lay.diagonal(|b| {
        if lay.occupation(b, x) != lay.occupation(b, y) {
            C64::new(theta.cos() - 1.0, 0.0)
        } else {
            C64::default()
        }
    });
    let sinc = if hopping == 0.0 { tau } else { theta.sin() / hopping };
    let local = lay.identity().add(&proj).add(&h.scale(C64::new(0.0, -sinc)));
    let ug = sys.gauging_unitary(l)?;
    Ok(ug.mul(&local).mul(&ug.adjoint()))
}

fn mass_factor(sys: &GaugedSystem, mass: f64, tau: f64) -> SparseOp {
    let lay = &sys.layout;
    lay.diagonal(|b| {
        let e: f64 = sys
            .geom
            .vertices()
            .map(|v| parity_of(v) as f64 * lay.occupation(b, sys.mode(v)) as f64)
            .sum();
        C64::from_polar(1.0, -mass * e * tau)
    })
}

/// One symmetric (Strang) step of the gauged fermion Hamiltonian:
/// half mass phase, link groups forward at half step, backward at half step,
/// half mass phase.
pub fn trotter_step_operator(
    sys: &GaugedSystem,
    params: &HamiltonianParams,
    tau: f64,
    schedule: &Schedule,
) -> Result<SparseOp, ExactError> {
    schedule.validate(sys)?;
    let half_mass = mass_factor(sys, params.mass, 0.5 * tau);
    let mut groups = Vec::with_capacity(schedule.groups.len());
    for g in &schedule.groups {
        let mut op = sys.layout.identity();
        for &l in g {
            op = link_factor(sys, l, params.hopping, 0.5 * tau)?.mul(&op);
        }
        groups.push(op);
    }
    let mut step = half_mass.clone();
    for g in &groups {
        step = g.mul(&step);
    }
    for g in groups.iter().rev() {
        step = g.mul(&step);
    }
    Ok(half_mass.mul(&step))
}

pub fn trotter_evolve(
    sys: &GaugedSystem,
    state: &StateVector,
    params: &HamiltonianParams,
    t: f64,
    n_steps: usize,
    schedule: &Schedule,
) -> Result<StateVector, ExactError> {
    if n_steps == 0 {
        schedule.validate(sys)?;
        return Ok(state.clone());
    }
    let step = trotter_step_operator(sys, params, t / n_steps as f64, schedule)?;
    let mut out = state.clone();
    for _ in 0..n_steps {
        out = out.apply(&step);
    }
    Ok(out)
}
