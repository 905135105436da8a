use crate::config::{ExperimentConfig, McMode};
use crate::error::CliError;
use crate::output::{num, sig15, write_json, CsvSink};
use gaugepeps::dualizer::{ChainElimination, HiggsSystem};
use gaugepeps::exact::{hermitian_spectrum, trotter_step_operator, GaugedSystem, HamiltonianKind, Schedule, StateVector};
use gaugepeps::fpeps::{verify_virtual_gauss, Fpeps, GaugeConfiguration, SiteTensorParams};
use gaugepeps::lattice::{Boundary, Direction, LatticeGeometry, Vertex};
use gaugepeps::sampler::{run_continuous, run_discrete, DiscreteTable, McResult, Observable};
use gaugepeps::spectra::{leading_spectrum, scan_point, Cylinder, Insertion};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::path::PathBuf;

const TOL: f64 = 1e-12;

pub struct Context {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    pub seed: u64,
}

impl Context {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn geometry(&self) -> Result<LatticeGeometry, CliError> {
        self.cfg.geometry()
    }

    fn header(&self, experiment: &str) -> serde_json::Map<String, Value> {
        let g = &self.cfg.geometry;
        let mut m = serde_json::Map::new();
        m.insert("experiment".into(), json!(experiment));
        m.insert("geometry".into(), json!({"width": g.width, "height": g.height, "boundary": boundary_name(g.boundary)}));
        m.insert("modulus".into(), json!(self.cfg.modulus));
        m.insert("seed".into(), json!(self.seed));
        m
    }
}

fn boundary_name(b: Boundary) -> &'static str {
    match b {
        Boundary::Open => "open",
        Boundary::PeriodicX => "periodic-x",
        Boundary::PeriodicY => "periodic-y",
        Boundary::Torus => "torus",
    }
}

fn fail_unless(ok: bool, what: &str, report: Value) -> Result<Value, CliError> {
    if ok {
        Ok(report)
    } else {
        Err(CliError::Verification(format!("{what}: {report}")))
    }
}

fn random_state(dim: usize, support: &[usize], rng: &mut ChaCha8Rng) -> StateVector {
    let mut s = StateVector::zeros(dim);
    for &b in support {
        s.amps[b] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let n = s.norm();
    s.amps.iter_mut().for_each(|a| *a /= n);
    s
}

/// Hermiticity, Gauss-law commutators and the single-link gauging identity.
pub fn exact_suite(ctx: &Context) -> Result<Value, CliError> {
    let sys = GaugedSystem::new(ctx.geometry()?, ctx.cfg.modulus)?;
    let h = sys.build_hamiltonian(&ctx.cfg.hamiltonian_params(), ctx.cfg.hamiltonian_kind())?;
    let herm = h.hermiticity_error();
    let comm = sys.gauss_operators()?.iter().map(|g| g.commutator_norm(&h)).fold(0.0, f64::max);
    let mut gauging = 0.0f64;
    for &l in &sys.links {
        let (x, y) = (sys.mode(l.origin), sys.mode(sys.geom.target(l)));
        let hop = sys.layout.create(x).mul(&sys.layout.annihilate(y));
        let u = sys.gauging_unitary(l)?;
        gauging = gauging.max(u.mul(&hop).mul(&u.adjoint()).max_abs_diff(&sys.link_u(l)?.mul(&hop)));
    }
    let report = json!({
        "dimension": sys.dim(),
        "hermiticity_error": num(herm),
        "max_gauss_commutator": num(comm),
        "max_gauging_deviation": num(gauging),
    });
    fail_unless(herm < TOL && comm < TOL && gauging < TOL, "exact engine invariants", report)
}

/// Virtual Gauss law of both site tensors and invariance of the weight.
pub fn fpeps_suite(ctx: &Context, shifts: usize) -> Result<Value, CliError> {
    let geom = ctx.geometry()?;
    let p = ctx.cfg.tensor_params()?;
    let f = Fpeps::new(geom.clone(), p)?;
    let mut rng = ctx.rng();
    let lambdas: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..TAU)).collect();
    let mut gauss = Vec::new();
    let mut ok = true;
    for parity in [1, -1] {
        let r = verify_virtual_gauss(parity, &p, &lambdas)?;
        ok &= r.passed;
        gauss.push(json!({"parity": parity, "max_deviation": num(r.max_deviation), "passed": r.passed}));
    }
    let mut worst = 0.0f64;
    for _ in 0..shifts {
        let phi = GaugeConfiguration::random(&geom, &mut rng);
        let v = geom.vertex(rng.random_range(0..geom.n_vertices()));
        let shifted = phi.gauge_shift(&geom, v, rng.random_range(0.0..TAU));
        worst = worst.max(((f.log_weight(&phi)? - f.log_weight(&shifted)?).exp() - 1.0).abs());
    }
    ok &= worst < 1e-10;
    let report = json!({"site_gauss": gauss, "gauge_shifts": shifts, "max_weight_change": num(worst)});
    fail_unless(ok, "fPEPS invariants", report)
}

/// Leading eigenvalue of the first scan point is real and positive.
pub fn spectra_suite(ctx: &Context) -> Result<Value, CliError> {
    let mut p = ctx.cfg.tensor_params()?;
    p.t = ctx.cfg.scan.t[0];
    let cyl = Cylinder::with_cap(&p, ctx.cfg.scan.ny, ctx.cfg.modulus, ctx.cfg.scan.cap)?;
    let t = cyl.transfer(Insertion::None)?;
    let v = leading_spectrum(&t, 1)?;
    let report = json!({"lambda1_re": num(v[0].re), "lambda1_im": num(v[0].im)});
    fail_unless(v[0].re > 0.0 && v[0].im.abs() <= 1e-10 * v[0].re, "transfer invariants", report)
}

pub fn exact_check(ctx: &Context) -> Result<PathBuf, CliError> {
    let suite = exact_suite(ctx)?;
    let geom = ctx.geometry()?;
    let sys = GaugedSystem::new(geom.clone(), ctx.cfg.modulus)?;
    let h = sys.build_hamiltonian(&ctx.cfg.hamiltonian_params(), ctx.cfg.hamiltonian_kind())?;
    let phys = sys.sector_basis(&vec![0; geom.n_vertices()])?;
    let levels = if phys.len() <= ctx.cfg.exact.max_sector {
        let ev = hermitian_spectrum(&h.restrict(&phys));
        Value::from(ev.iter().take(ctx.cfg.exact.levels).map(|&e| num(e)).collect::<Vec<_>>())
    } else {
        Value::Null
    };
    let mut out = ctx.header("exact-check");
    out.insert("invariants".into(), suite);
    out.insert("physical_dimension".into(), json!(phys.len()));
    out.insert("lowest_physical_levels".into(), levels);
    write_json(&ctx.out, "exact_check.json", &Value::Object(out))
}

pub fn trotter(ctx: &Context) -> Result<PathBuf, CliError> {
    let geom = ctx.geometry()?;
    let sys = GaugedSystem::new(geom.clone(), ctx.cfg.modulus)?;
    let p = ctx.cfg.hamiltonian_params();
    let schedule = Schedule::greedy(&sys);
    let phys = sys.sector_basis(&vec![0; geom.n_vertices()])?;
    if phys.is_empty() {
        return Err(CliError::Config("the physical sector is empty".into()));
    }
    let psi = random_state(sys.dim(), &phys, &mut ctx.rng());
    let h = sys.build_hamiltonian(&p, HamiltonianKind::FermionGauged)?;
    let t = ctx.cfg.trotter.time;
    let exact = StateVector { amps: h.exp_apply(C64::new(0.0, -t), &psi.amps) };
    let gauss = sys.gauss_operators()?;
    let mut rows = Vec::new();
    let mut worst_comm = 0.0f64;
    let mut points = Vec::new();
    for &n in &ctx.cfg.trotter.steps {
        let step = trotter_step_operator(&sys, &p, t / n as f64, &schedule)?;
        let comm = gauss.iter().map(|g| g.commutator_norm(&step)).fold(0.0, f64::max);
        worst_comm = worst_comm.max(comm);
        let mut s = psi.clone();
        for _ in 0..n {
            s = s.apply(&step);
        }
        let err = s.distance(&exact);
        points.push(((n as f64).ln(), err.ln()));
        rows.push(json!({"steps": n, "error": num(err), "max_gauss_commutator": num(comm)}));
    }
    let k = points.len() as f64;
    let (mx, my) = points.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / k, a.1 + p.1 / k));
    let slope = -points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let mut out = ctx.header("trotter");
    out.insert("time".into(), num(t));
    out.insert("rows".into(), Value::from(rows));
    out.insert("order_slope".into(), num(slope));
    let path = write_json(&ctx.out, "trotter.json", &Value::Object(out))?;
    fail_unless(worst_comm < TOL, "Trotter steps must commute with every Gauss operator", json!({"max_gauss_commutator": num(worst_comm)}))?;
    Ok(path)
}

pub fn dualize(ctx: &Context) -> Result<PathBuf, CliError> {
    let geom = ctx.geometry()?;
    let n = ctx.cfg.modulus;
    let higgs = HiggsSystem::new(geom.clone(), n)?;
    let sector = higgs.sector_basis(&vec![0; geom.n_vertices()]);
    let mut rng = ctx.rng();
    let mut purities = Vec::new();
    let mut ok = true;
    for _ in 0..ctx.cfg.dualize.states {
        let s = random_state(higgs.dim(), &sector, &mut rng);
        let (_, r) = higgs.unitary_gauge_transform(&s, TOL)?;
        ok &= r.decoupled;
        purities.push(num(r.purity));
    }
    let elimination = if geom.is_one_dimensional() && geom.boundary == Boundary::Open && n % 2 == 0 {
        let el = ChainElimination::new(geom.clone(), n)?;
        let cmp = el.compare_spectra(&ctx.cfg.hamiltonian_params())?;
        let factors: Vec<_> = (0..el.sites()).map(|x| el.uf_factor(x)).collect();
        let mut comm = 0.0f64;
        for a in 0..factors.len() {
            for b in a + 1..factors.len() {
                comm = comm.max(factors[a].commutator(&factors[b]).max_abs());
            }
        }
        ok &= cmp.max_deviation < 1e-10 && comm < TOL;
        json!({
            "physical_levels": cmp.fermionic.len(),
            "max_spectrum_deviation": num(cmp.max_deviation),
            "max_factor_commutator": num(comm),
        })
    } else {
        json!({"skipped": "fermion elimination needs an open chain and an even modulus"})
    };
    let mut out = ctx.header("dualize");
    out.insert("unitary_gauge_purities".into(), Value::from(purities));
    out.insert("fermion_elimination".into(), elimination);
    let path = write_json(&ctx.out, "dualize.json", &Value::Object(out))?;
    fail_unless(ok, "dualization checks", json!({"report": path.display().to_string()}))?;
    Ok(path)
}

pub fn fpeps_verify(ctx: &Context) -> Result<PathBuf, CliError> {
    let suite = fpeps_suite(ctx, 100);
    let geom = ctx.geometry()?;
    let f = Fpeps::new(geom, ctx.cfg.tensor_params()?)?;
    // Z_3 cannot tell {0, +-1} from the whole group, so at least Z_5 is used
    let support_modulus = ctx.cfg.modulus.max(5);
    let support = f.measured_field_support(support_modulus, 1, ctx.seed)?;
    let truncated = support.iter().all(|e| e.abs() <= 1);
    let mut out = ctx.header("fpeps-verify");
    let (suite_value, suite_ok) = match &suite {
        Ok(v) => (v.clone(), true),
        Err(CliError::Verification(m)) => (Value::String(m.clone()), false),
        Err(_) => return suite.map(|_| PathBuf::new()),
    };
    out.insert("invariants".into(), suite_value);
    out.insert("field_support_modulus".into(), json!(support_modulus));
    out.insert("field_support".into(), json!(support.iter().collect::<Vec<_>>()));
    out.insert("passed".into(), json!(suite_ok && truncated));
    let path = write_json(&ctx.out, "fpeps_verify.json", &Value::Object(out))?;
    fail_unless(suite_ok && truncated, "fPEPS verification", json!({"field_support": support.iter().collect::<Vec<_>>()}))?;
    println!("all Gauss checks pass");
    Ok(path)
}

fn observables(ctx: &Context, geom: &LatticeGeometry) -> Result<Vec<(String, Observable)>, CliError> {
    let origin = Vertex::new(0, 0);
    let mut obs = Vec::new();
    for &[w, h] in &ctx.cfg.mc.loops {
        let path = geom.rectangle_loop(origin, w, h)?;
        obs.push((format!("wilson_loop_{w}x{h}"), Observable::wilson_loop(geom, path)?));
    }
    for &len in &ctx.cfg.mc.mesons {
        let path = geom.straight_path(origin, Direction::X, len)?;
        let end = match geom.path_endpoints(&path)? {
            Some((_, b)) => b,
            None => origin,
        };
        obs.push((format!("meson_string_{len}"), Observable::meson(geom, origin, end, path)?));
    }
    Ok(obs)
}

pub fn mc(ctx: &Context) -> Result<PathBuf, CliError> {
    let geom = ctx.geometry()?;
    let f = Fpeps::new(geom.clone(), ctx.cfg.tensor_params()?)?;
    let named = observables(ctx, &geom)?;
    let obs: Vec<Observable> = named.iter().map(|(_, o)| o.clone()).collect();
    let mut chain = ctx.cfg.chain;
    chain.seed = ctx.seed;
    let (res, exact): (McResult, Option<Vec<C64>>) = match ctx.cfg.mc.mode {
        McMode::Discrete => {
            let table = DiscreteTable::enumerate(&f, ctx.cfg.modulus)?;
            let exact = obs.iter().map(|o| table.exact_reference(o)).collect::<Result<Vec<_>, _>>()?;
            (run_discrete(&table, &chain, &obs)?, Some(exact))
        }
        McMode::Continuous => (run_continuous(&f, &chain, &obs)?, None),
    };
    for (k, c) in res.chains.iter().enumerate() {
        let mut sink = CsvSink::create(&ctx.out, &format!("chain_{k}.csv"), &["sweep", "log_weight", "acceptance"])?;
        for r in &c.trace {
            sink.row([r.sweep.to_string(), sig15(r.log_weight), sig15(r.acceptance)])?;
        }
    }
    let rows: Vec<Value> = named
        .iter()
        .zip(&res.estimates)
        .enumerate()
        .map(|(i, ((name, _), e))| {
            let mut row = json!({
                "observable": name,
                "mean_re": num(e.mean.re),
                "mean_im": num(e.mean.im),
                "stderr": num(e.std_error),
                "tau_int": num(e.tau_int),
                "n_eff": num(e.n_effective),
            });
            if let Some(x) = &exact {
                row["exact_re"] = num(x[i].re);
                row["exact_im"] = num(x[i].im);
            }
            row
        })
        .collect();
    let mut out = ctx.header("mc");
    let group = match ctx.cfg.mc.mode {
        McMode::Discrete => format!("Z_{}", ctx.cfg.modulus),
        McMode::Continuous => "U(1)".to_string(),
    };
    out.insert("gauge_group".into(), json!(group));
    out.insert("chain".into(), serde_json::to_value(chain).expect("chain config serializes"));
    out.insert("estimates".into(), Value::from(rows));
    out.insert(
        "chains".into(),
        Value::from(res.chains.iter().map(|c| json!({"acceptance": num(c.acceptance), "delta": num(c.delta)})).collect::<Vec<_>>()),
    );
    write_json(&ctx.out, "estimates.json", &Value::Object(out))
}

pub fn transfer_scan(ctx: &Context) -> Result<PathBuf, CliError> {
    let base: SiteTensorParams = ctx.cfg.tensor_params()?;
    let s = &ctx.cfg.scan;
    let header = ["t", "y_re", "y_im", "z_re", "z_im", "eta_p_index", "ny", "n", "lambda1", "gap_ratio", "xi"];
    let mut sink = CsvSink::create(&ctx.out, "scan.csv", &header)?;
    let batch = rayon::current_num_threads().max(1);
    for chunk in s.t.chunks(batch) {
        let rows: Vec<_> = chunk
            .par_iter()
            .map(|&t| {
                let mut p = base;
                p.t = t;
                scan_point(&p, s.ny, ctx.cfg.modulus, s.cap)
            })
            .collect();
        for r in rows {
            let r = r?;
            sink.row([
                sig15(r.t),
                sig15(r.y_re),
                sig15(r.y_im),
                sig15(r.z_re),
                sig15(r.z_im),
                r.eta_p_index.to_string(),
                r.ny.to_string(),
                r.n.to_string(),
                sig15(r.lambda1),
                sig15(r.gap_ratio),
                sig15(r.xi),
            ])?;
        }
    }
    Ok(sink.path().to_path_buf())
}
