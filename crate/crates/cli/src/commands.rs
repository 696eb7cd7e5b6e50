use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use kamtorus::certificate::*;
use kamtorus::fourier::io::{read_binary, read_csv, write_binary, write_csv};
use kamtorus::fourier::{DiophantineData, FourierModel, StripSchedule};
use kamtorus::geometry::{lift_cylinder, lift_torus, BoundsDomain, HamiltonianSystem, LiftSpec};
use kamtorus::newton::{iterate, NewtonRun, TorusState, UpdateRule, Verdict};
use kamtorus::systems::PolynomialSystem;

use crate::config::{FamilyInstance, RunConfig};
use crate::CliError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_DIVERGED: u8 = 2;

/// Wraps `body` with a header holding the only run-dependent field, the timestamp.
fn write_json(dir: &Path, name: &str, command: &str, body: &impl Serialize) -> Result<(), CliError> {
    let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let doc = json!({
        "header": { "tool": "kamtorus", "version": env!("CARGO_PKG_VERSION"), "command": command, "generated_unix": secs },
        "body": body,
    });
    let mut w = BufWriter::new(File::create(dir.join(name))?);
    serde_json::to_writer_pretty(&mut w, &doc).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// The system whose tori the solver computes (discounted for the rotational family).
fn solver_system(cfg: &RunConfig) -> Result<PolynomialSystem, CliError> {
    Ok(match cfg.family()? {
        FamilyInstance::Oscillator(f) => f.system(),
        FamilyInstance::Rotational(f) => f.system(),
    })
}

fn starting_torus(cfg: &RunConfig) -> Result<FourierModel, CliError> {
    let space = cfg.space()?;
    let (k, _) = match cfg.family()? {
        FamilyInstance::Oscillator(f) => f.exact_torus(&space, &cfg.system.radii)?,
        FamilyInstance::Rotational(f) => f.exact_torus(&space, &cfg.system.radii)?,
    };
    let amp = cfg.system.perturbation;
    if amp == 0.0 {
        return Ok(k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.system.seed);
    let mut noise = FourierModel::from_fn(&space, k.rows(), 1, |m, _, _| {
        let decay = 0.5f64.powi(m.iter().map(|x| x.abs() as i32).sum());
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (amp * decay)
    });
    noise.symmetrize();
    Ok(k.add(&noise)?)
}

fn load_torus(path: &Path) -> Result<FourierModel, CliError> {
    let f = File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let r = BufReader::new(f);
    Ok(match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(r)?,
        _ => read_binary(r)?,
    })
}

fn torus_for(cfg: &RunConfig, torus: Option<&Path>) -> Result<(FourierModel, String), CliError> {
    match torus.or(cfg.certificate.torus.as_deref()) {
        Some(p) => Ok((load_torus(p)?, p.display().to_string())),
        None => Ok((starting_torus(cfg)?, "starting torus".into())),
    }
}

/// Index of the state to keep: the converged one, or the best one seen.
fn kept_state(run: &NewtonRun) -> Option<usize> {
    match &run.verdict {
        Verdict::Converged { .. } => run.states.len().checked_sub(1),
        Verdict::Diverged { best, .. } => Some(*best),
        Verdict::MaxIterations => run.states.iter().enumerate().min_by(|a, b| a.1.weighted_error.value.total_cmp(&b.1.weighted_error.value)).map(|(i, _)| i),
    }
}

pub fn solve(cfg: &RunConfig) -> Result<u8, CliError> {
    let sys = solver_system(cfg)?;
    let dio = cfg.diophantine()?;
    let sched = cfg.schedule()?;
    let k0 = starting_torus(cfg)?;
    let dir = out_dir(cfg)?;
    let run = iterate(k0, &sys, &dio, &sched, &cfg.newton());

    let mut log = BufWriter::new(File::create(dir.join("iterations.jsonl"))?);
    run.write_log(&mut log)?;
    log.flush()?;
    let kept = kept_state(&run);
    if let Some(i) = kept {
        let k = &run.states[i].k;
        write_binary(k, BufWriter::new(File::create(dir.join("torus.fmd"))?))?;
        write_csv(k, BufWriter::new(File::create(dir.join("torus.csv"))?))?;
    }
    let summary = json!({
        "family": sys.name(),
        "delta": sched.delta0,
        "schedule": sched,
        "gamma": dio.gamma,
        "verdict": run.verdict,
        "converged": run.verdict.converged(),
        "weighted_errors": run.errors(),
        "fitted_order": run.fitted_order,
        "saved_iteration": kept,
        "config": cfg,
    });
    write_json(&dir, "summary.json", "solve", &summary)?;
    let errs: Vec<String> = run.errors().iter().map(|e| format!("{e:.3e}")).collect();
    eprintln!("solve: {:?}, weighted errors [{}]", run.verdict, errs.join(", "));
    Ok(if run.verdict.converged() { EXIT_OK } else { EXIT_DIVERGED })
}

struct Certificate {
    ledger: ConstantLedger,
    report: KamReport,
    measured: MeasuredNorms,
    sigma: ConditionNumbers,
    warnings: Vec<String>,
    russmann: RussmannInputs,
}

fn run_certificate(cfg: &RunConfig, k: FourierModel, sys: &dyn HamiltonianSystem, dio: &DiophantineData, sched: &StripSchedule, russ: &RussmannInputs) -> Result<Certificate, CliError> {
    let c = &cfg.certificate;
    let controls = c.controls();
    let state = TorusState::assess(k, sys, dio, sched.rho0, sched.delta0)?;
    let domain = BoundsDomain { radius: c.domain_radius, time_radius: c.time_radius };
    let bounds = sys.analytic_bounds(&domain).ok_or_else(|| CliError::Config(format!("{} has no analytic bounds", sys.name())))?;
    let measured = MeasuredNorms::of(&state, domain.radius)?;
    let sigma = c.sigma.map(ConditionNumbers::from).unwrap_or_else(|| ConditionNumbers::with_margin(&measured, c.sigma_margin));
    let dims = Dimensions { d: sys.torus_dim(), n: sys.dof() };
    let mut ledger = assemble_tables(&bounds, &sigma, &controls, dio, dims, sched.rho0, sched.delta0, russ)?;
    let fin = final_constants(&mut ledger, sched, &controls, &measured)?;
    let report = check_kam(&state, &ledger, &fin, bounds.rigorous)?;
    Ok(Certificate { ledger, report, measured, sigma, warnings: sigma.warnings(&bounds), russmann: *russ })
}

fn russmann_for(cfg: &RunConfig, dio: &DiophantineData, sched: &StripSchedule) -> Result<RussmannInputs, CliError> {
    Ok(RussmannInputs::new(cfg.certificate.russmann, sched.delta0, sched.rho0, cfg.certificate.m, dio)?)
}

pub fn certify(cfg: &RunConfig, torus: Option<&Path>) -> Result<u8, CliError> {
    let sys = solver_system(cfg)?;
    let dio = cfg.diophantine()?;
    let sched = cfg.schedule()?;
    let (k, source) = torus_for(cfg, torus)?;
    let russ = russmann_for(cfg, &dio, &sched)?;
    let cert = run_certificate(cfg, k, &sys, &dio, &sched, &russ)?;
    let dir = out_dir(cfg)?;
    let r = &cert.report;
    let body = json!({
        "torus": source,
        "delta": sched.delta0,
        "report": r,
        "measured": cert.measured,
        "sigma": cert.sigma,
        "sigma_warnings": cert.warnings,
        "russmann": cert.russmann,
    });
    write_json(&dir, "report.json", "certify", &body)?;
    write_json(&dir, "ledger.json", "certify", &cert.ledger)?;
    for w in &cert.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("certify: V = {:.3e} ({}), binding term {}", r.v, if r.pass { "pass" } else { "fail" }, r.binding);
    Ok(if r.pass { EXIT_OK } else { EXIT_FAIL })
}

pub fn constants(cfg: &RunConfig) -> Result<u8, CliError> {
    let sigma: ConditionNumbers = cfg.certificate.sigma.ok_or_else(|| CliError::Config("constants needs a [certificate.sigma] table".into()))?.into();
    let sys = solver_system(cfg)?;
    let dio = cfg.diophantine()?;
    let sched = cfg.schedule()?;
    let c = &cfg.certificate;
    let bounds = sys
        .analytic_bounds(&BoundsDomain { radius: c.domain_radius, time_radius: c.time_radius })
        .ok_or_else(|| CliError::Config(format!("{} has no analytic bounds", sys.name())))?;
    let russ = russmann_for(cfg, &dio, &sched)?;
    let ledger = assemble_tables(&bounds, &sigma, &c.controls(), &dio, Dimensions { d: sys.torus_dim(), n: sys.dof() }, sched.rho0, sched.delta0, &russ)?;
    for w in sigma.warnings(&bounds) {
        eprintln!("warning: {w}");
    }
    let dir = out_dir(cfg)?;
    write_json(&dir, "ledger.json", "constants", &ledger)?;
    println!("{}", ledger.to_json().map_err(std::io::Error::from)?);
    Ok(EXIT_OK)
}

pub fn lift(cfg: &RunConfig, torus: Option<&Path>) -> Result<u8, CliError> {
    let FamilyInstance::Rotational(fam) = cfg.family()? else {
        return Err(CliError::Config("lift needs the rotational family".into()));
    };
    let (k, source) = torus_for(cfg, torus)?;
    let sys = fam.undiscounted();
    let omega = DVector::from_column_slice(&cfg.frequency.omega);
    let nu = fam.discount;
    let spec = LiftSpec::from_discount(|_| DVector::from_element(1, nu), &k, &sys)?;
    let times: Vec<DVector<f64>> = cfg.lift.slices.iter().map(|&s| DVector::from_element(1, s)).collect();
    let cyl = lift_cylinder(&k, &sys, &spec, &omega, &times)?;
    let torus_lift = lift_torus(&k, &sys, &spec, &omega, cfg.lift.s_nodes)?;
    let dir = out_dir(cfg)?;

    let mut w = BufWriter::new(File::create(dir.join("lift_slices.csv"))?);
    let n = sys.dof();
    let cols: Vec<String> = (1..=2 * n).map(|i| format!("z{i}")).collect();
    writeln!(w, "s,node,{}", cols.join(","))?;
    for (s, row) in cfg.lift.slices.iter().zip(&cyl.samples) {
        for (j, z) in row.iter().enumerate() {
            let vals: Vec<String> = z.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{s},{j},{}", vals.join(","))?;
        }
    }
    w.flush()?;
    let ok = cyl.residual <= cfg.lift.tol && torus_lift.residual <= cfg.lift.tol;
    let body = json!({
        "torus": source,
        "omega_p": spec.omega_p.as_slice(),
        "p0": spec.p0.as_slice(),
        "frequency": torus_lift.frequency.as_slice(),
        "grid": torus_lift.khat.space().grid(),
        "cylinder_residual": cyl.residual,
        "torus_residual": torus_lift.residual,
        "tol": cfg.lift.tol,
        "pass": ok,
    });
    write_json(&dir, "lift.json", "lift", &body)?;
    eprintln!("lift: cylinder residual {:.3e}, torus residual {:.3e}", cyl.residual, torus_lift.residual);
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct BenchRow {
    coupling: f64,
    method: UpdateRule,
    converged: bool,
    iterations: usize,
    final_error: f64,
    fitted_order: Option<f64>,
    v: Option<f64>,
}

fn method_name(m: UpdateRule) -> &'static str {
    match m {
        UpdateRule::Modified => "modified",
        UpdateRule::Classical => "classical",
    }
}

fn bench_one(cfg: &RunConfig, coupling: f64, method: UpdateRule, dio: &DiophantineData, russ: Option<&RussmannInputs>) -> Result<BenchRow, CliError> {
    let mut c = cfg.clone();
    c.system.coupling = coupling;
    c.newton.update = method;
    let sys = solver_system(&c)?;
    let sched = c.schedule()?;
    let run = iterate(starting_torus(&c)?, &sys, dio, &sched, &c.newton());
    let kept = kept_state(&run);
    let final_error = kept.map_or(f64::NAN, |i| run.states[i].weighted_error.value);
    let v = match (russ, run.verdict.converged(), kept) {
        (Some(r), true, Some(i)) => run_certificate(&c, run.states[i].k.clone(), &sys, dio, &sched, r).ok().map(|cert| cert.report.v),
        _ => None,
    };
    Ok(BenchRow { coupling, method, converged: run.verdict.converged(), iterations: run.records.len().saturating_sub(1), final_error, fitted_order: run.fitted_order, v })
}

pub fn bench(cfg: &RunConfig) -> Result<u8, CliError> {
    let dir = out_dir(cfg)?;
    let (rho, rho_inf) = (cfg.strip.rho, cfg.strip.rho_inf);
    let steps = cfg.bench.delta_steps;
    let top = (rho - rho_inf) / 3.0;
    let scan: Vec<(f64, f64)> = (1..steps.max(1))
        .map(|i| {
            let s = StripSchedule::new(rho, rho_inf, i as f64 * top / steps as f64)?;
            Ok((s.delta0, s.ratio_a))
        })
        .collect::<Result<_, CliError>>()?;
    let mut w = BufWriter::new(File::create(dir.join("delta_scan.csv"))?);
    writeln!(w, "delta,a,a_over_delta")?;
    for (d, a) in &scan {
        writeln!(w, "{d:e},{a:e},{:e}", a / d)?;
    }
    w.flush()?;
    let argmin = scan.iter().min_by(|x, y| (x.1 / x.0).total_cmp(&(y.1 / y.0))).map(|p| p.0);

    let rows: Vec<BenchRow> = if cfg.bench.couplings.is_empty() {
        Vec::new()
    } else {
        let dio = cfg.diophantine()?;
        let russ = if cfg.bench.certify { Some(russmann_for(cfg, &dio, &cfg.schedule()?)?) } else { None };
        let jobs: Vec<(f64, UpdateRule)> = cfg.bench.couplings.iter().flat_map(|&c| [(c, UpdateRule::Modified), (c, UpdateRule::Classical)]).collect();
        jobs.par_iter().map(|&(c, m)| bench_one(cfg, c, m, &dio, russ.as_ref())).collect::<Result<_, _>>()?
    };
    let mut w = BufWriter::new(File::create(dir.join("bench.csv"))?);
    writeln!(w, "coupling,method,converged,iterations,final_error,fitted_order,v")?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
    for r in &rows {
        writeln!(w, "{:e},{},{},{},{:e},{},{}", r.coupling, method_name(r.method), r.converged, r.iterations, r.final_error, opt(r.fitted_order), opt(r.v))?;
    }
    w.flush()?;
    let best = |m: UpdateRule, pred: &dyn Fn(&BenchRow) -> bool| rows.iter().filter(|r| r.method == m && pred(r)).map(|r| r.coupling).fold(None, |a: Option<f64>, c| Some(a.map_or(c, |a| a.max(c))));
    let certified = |r: &BenchRow| r.v.is_some_and(|v| v < 1.0);
    let body = json!({
        "delta_scan": { "steps": steps, "argmin": argmin, "optimal": (rho - rho_inf) / 6.0, "step": top / steps.max(1) as f64 },
        "max_convergent": { "modified": best(UpdateRule::Modified, &|r| r.converged), "classical": best(UpdateRule::Classical, &|r| r.converged) },
        "max_certifiable": { "modified": best(UpdateRule::Modified, &certified), "classical": best(UpdateRule::Classical, &certified) },
        "rows": rows,
    });
    write_json(&dir, "bench.json", "bench", &body)?;
    eprintln!("bench: {} scenarios, bite scan minimum at {:?}", rows.len(), argmin);
    Ok(EXIT_OK)
}
