//! Command implementations. Each writes its reports through [`Output`] and
//! returns the process outcome.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use nilgevrey::error::ErrorClass;
use nilgevrey::gevrey::{gevrey_report, GevreyParams, GevreyReport};
use nilgevrey::induction::{
    check_assumptions, compute_s, derive_operator, derived_representation, has_central_v1_element,
    poisson_rank_probe, representation_oracle, ProbeOptions, Route,
};
use nilgevrey::pipeline::{resolve_potentials, run_pipeline, PipelineConfig};
use nilgevrey::presets::{fields_of, preset, PotentialSpec, Problem};
use nilgevrey::spectral::{
    analyze_potentials, angular_inequality, angular_profile, growth_check, harnack_ratio,
    ode_ground_state, oracle_residual, separated_solution, solve_lambda, tube_geometry,
    PotentialCase, SolverConfig,
};

use crate::output::Output;
use crate::{Mode, RunArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CheckFailed,
    NumericFailed,
    InputError,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::CheckFailed => 2,
            Outcome::NumericFailed => 3,
            Outcome::InputError => 4,
        }
    }

    fn from_class(class: ErrorClass) -> Self {
        match class {
            ErrorClass::Input => Outcome::InputError,
            ErrorClass::Check => Outcome::CheckFailed,
            ErrorClass::Numeric => Outcome::NumericFailed,
        }
    }

    pub fn from_error(err: &anyhow::Error) -> Self {
        match err.downcast_ref::<nilgevrey::Error>() {
            Some(e) => Self::from_class(e.class()),
            None => Outcome::InputError,
        }
    }
}

/// Everything that determines a run, recorded in each report.
#[derive(Debug, Clone, Serialize)]
struct RunConfig {
    command: String,
    preset: Option<String>,
    input: Option<PathBuf>,
    solver: SolverConfig,
    out: PathBuf,
    seed: u64,
}

fn run_config(command: &str, a: &RunArgs) -> Result<RunConfig> {
    Ok(RunConfig {
        command: command.into(),
        preset: a.preset.clone(),
        input: a.input.clone(),
        solver: solver_config(a)?,
        out: a.out.clone(),
        seed: a.seed,
    })
}

fn solver_config(a: &RunArgs) -> Result<SolverConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SolverConfig::default(),
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(l) = a.l {
        cfg.l = l;
    }
    if let Some(hg) = a.hg {
        cfg.hg = hg;
    }
    if let Some(tol) = a.tol {
        cfg.tol = tol;
    }
    if let Some(route) = &a.route {
        cfg.route = route.parse()?;
    }
    Ok(cfg)
}

fn split_qp(text: &str) -> Result<PotentialSpec> {
    let (q, p) = text
        .split_once(',')
        .ok_or_else(|| nilgevrey::Error::Input(format!("--qp expects \"q,p\", got {text:?}")))?;
    Ok(PotentialSpec {
        q: q.trim().into(),
        p: p.trim().into(),
    })
}

/// The problem named by `--preset`, `--input` or `--qp`; `--qp` overrides
/// the potentials of the other two.
fn load(a: &RunArgs, required: bool) -> Result<Option<Problem>> {
    let mut problem = match (&a.preset, &a.input) {
        (Some(name), _) => Some(preset(name)?),
        (None, Some(path)) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Problem::from_json(&text)?)
        }
        (None, None) => None,
    };
    if let Some(qp) = &a.qp {
        let spec = split_qp(qp)?;
        let p = problem.get_or_insert_with(|| Problem {
            name: "qp".into(),
            ..Default::default()
        });
        p.potentials = Some(spec);
        p.ansatz = None;
    }
    if problem.is_none() && required {
        return Err(
            nilgevrey::Error::Input("one of --preset, --input or --qp is required".into()).into(),
        );
    }
    Ok(problem)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn check(a: &RunArgs) -> Result<Outcome> {
    let problem = load(a, true)?.expect("required");
    let config = run_config("check", a)?;
    let mut out = Output::new(&a.out)?;
    let mut failures: Vec<String> = Vec::new();
    let mut report = json!({ "config": config, "problem": problem.name });

    if let Some(doc) = &problem.algebra {
        let parsed = doc.parse()?;
        let alg = &parsed.algebra;
        let ver = alg.verify_stratification();
        if let Some((prop, c)) = ver.first_failure() {
            failures.push(format!("stratification: {prop}: {}", c.detail));
        }
        println!(
            "stratification: {} (dim {}, strata {:?})",
            verdict(ver.all_passed()),
            alg.dim(),
            alg.strata()
        );
        report["stratification"] = json!(ver);

        let central = has_central_v1_element(alg);
        println!(
            "central stratum-one element: {}",
            if central.found { "found" } else { "none" }
        );
        report["central_v1"] = json!(central);

        if let Some(cov) = &problem.covectors {
            let pair = cov.build(alg)?;
            let rep = check_assumptions(alg, &pair);
            match rep.failure_message() {
                Some(msg) => {
                    println!("assumptions: FAIL {msg}");
                    failures.push(msg);
                }
                None => println!(
                    "assumptions: pass (s = {}, m = {}, strong form {})",
                    rep.s,
                    rep.m,
                    if rep.strong_form.passed {
                        "holds"
                    } else {
                        "fails"
                    }
                ),
            }
            report["assumptions"] = json!(rep);
        }

        let probes: Vec<(String, Vec<_>)> = if problem.probes.is_empty() {
            parsed
                .fields
                .clone()
                .map(|f| vec![("fields".to_string(), f)])
                .unwrap_or_default()
        } else {
            problem
                .probes
                .iter()
                .map(|p| Ok((p.name.clone(), fields_of(&p.fields)?)))
                .collect::<nilgevrey::Result<_>>()?
        };
        let opts = ProbeOptions {
            seed: a.seed,
            ..ProbeOptions::default()
        };
        let mut probe_reports = Vec::new();
        for (name, fields) in probes {
            let r = poisson_rank_probe(&fields, &opts)?;
            let label = if r.symplectic {
                "symplectic"
            } else if r.degenerate_everywhere {
                "non-symplectic (degenerate everywhere)"
            } else {
                "non-symplectic"
            };
            println!(
                "characteristic set [{name}]: {label}, tangent dim {:?}, form rank {:?}",
                r.tangent_dim, r.form_rank
            );
            if !r.symplectic {
                failures.push(format!("characteristic set of {name} is not symplectic"));
            }
            probe_reports.push(json!({ "name": name, "report": r }));
        }
        report["probes"] = Value::Array(probe_reports);
    }

    if let Some(spec) = &problem.potentials {
        let (q, p) = nilgevrey::presets::parse_potentials(spec)?;
        let pair = analyze_potentials(&q, &p)?;
        let strict = !matches!(pair.case, PotentialCase::Unsupported);
        println!("potentials: case {:?}, j = {}", pair.case, pair.j);
        if !strict {
            failures.push("potentials fail the growth condition".into());
        }
        report["potentials"] = json!(pair);
    }

    let outcome = if failures.is_empty() {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    };
    report["passed"] = json!(failures.is_empty());
    report["failures"] = json!(failures);
    out.write_json("check", &report)?;
    out.finish("check", &problem.name, a.seed, outcome.code())?;
    Ok(outcome)
}

pub fn derive(a: &RunArgs) -> Result<Outcome> {
    let problem = load(a, true)?.expect("required");
    let config = run_config("derive", a)?;
    let mut out = Output::new(&a.out)?;
    let doc = problem.algebra.as_ref().ok_or_else(|| {
        nilgevrey::Error::Input(format!("problem {:?} has no algebra", problem.name))
    })?;
    let cov = problem.covectors.as_ref().ok_or_else(|| {
        nilgevrey::Error::Input(format!("problem {:?} has no covectors", problem.name))
    })?;
    let alg = doc.parse()?.algebra;
    let pair = cov.build(&alg)?;
    let assumptions = check_assumptions(&alg, &pair);
    let mut report =
        json!({ "config": config, "problem": problem.name, "assumptions": assumptions });
    if let Some(msg) = assumptions.failure_message() {
        println!("assumptions: FAIL {msg}");
        if !a.force {
            report["failure"] = json!({ "stage": "check_assumptions", "message": msg });
            out.write_json("derive", &report)?;
            out.finish("derive", &problem.name, a.seed, Outcome::CheckFailed.code())?;
            return Ok(Outcome::CheckFailed);
        }
    }
    let sset = compute_s(&alg, &pair)?;
    let op = derive_operator(&alg, &pair, &sset)?;
    let rep = derived_representation(&alg, &pair, &sset.s, Route::Bch)?;
    let oracle = representation_oracle(&alg, &rep);
    println!(
        "S = {{{}}} (case {}), n = {}, r = {}",
        sset.labels.join(", "),
        sset.case,
        sset.n,
        sset.r
    );
    println!("operator: {}", op.describe());
    println!(
        "magnetic terms: {}",
        if op.has_magnetic_terms() {
            "present"
        } else {
            "none"
        }
    );
    println!(
        "commutation oracle: {} ({} pairs)",
        verdict(oracle.passed),
        oracle.pairs_checked
    );
    report["sset"] = json!(sset);
    report["operator"] = json!(op.document());
    report["oracle"] = json!(oracle);
    out.write_json("operator", &report)?;
    let outcome = if oracle.passed {
        Outcome::Success
    } else {
        Outcome::CheckFailed
    };
    out.finish("derive", &problem.name, a.seed, outcome.code())?;
    Ok(outcome)
}

pub fn solve(a: &RunArgs) -> Result<Outcome> {
    let problem = load(a, true)?.expect("required");
    let config = run_config("solve", a)?;
    let mut out = Output::new(&a.out)?;
    let outcome = if !problem.harmonic.is_empty() && a.qp.is_none() {
        solve_oracle(a, &problem, &config, &mut out)?
    } else {
        let res = resolve_potentials(&problem)?;
        let pair = analyze_potentials(&res.q, &res.p)?;
        println!(
            "q = {}, p = {} ({}); m = {}, s = {}, j = {}, case {:?}",
            res.q, res.p, res.source, pair.m, pair.s, pair.j, pair.case
        );
        let one_dim =
            res.q.registry().t_block().len() <= 1 && res.p.registry().t_block().len() <= 1;
        if a.mode == Mode::Ode || one_dim {
            let sol =
                separated_solution(&pair, a.lambda, config.solver.l.min(4.0), config.solver.hg)?;
            println!(
                "separated solution: {:?}, lambda = {}, mu = {}, |f| <= exp({} |t|), residual order {:.3}",
                sol.kind, sol.lambda, sol.mu, sol.growth_constant, sol.order
            );
            let ground = match sol.m {
                0 => Value::Null,
                m => json!(ode_ground_state(m)?),
            };
            out.write_json(
                "solve",
                &json!({ "config": config, "problem": problem.name, "potentials": pair, "separated": sol, "ground_state": ground }),
            )?;
            Outcome::Success
        } else {
            if matches!(pair.case, PotentialCase::Unsupported) && !a.force {
                println!("growth condition fails; rerun with --force to solve anyway");
                out.write_json(
                    "solve",
                    &json!({ "config": config, "problem": problem.name, "potentials": pair, "failure": "growth condition" }),
                )?;
                out.finish("solve", &problem.name, a.seed, Outcome::CheckFailed.code())?;
                return Ok(Outcome::CheckFailed);
            }
            solve_grid(&problem, &config, &pair, &mut out)?
        }
    };
    out.finish("solve", &problem.name, a.seed, outcome.code())?;
    Ok(outcome)
}

fn solve_oracle(
    a: &RunArgs,
    problem: &Problem,
    config: &RunConfig,
    out: &mut Output,
) -> Result<Outcome> {
    let hg = a.hg.unwrap_or(1.0 / 64.0);
    let l = a.l.unwrap_or(3.0);
    let mut csv = String::from("h,hg,linf,l2\n");
    let mut reports = Vec::new();
    let mut ok = true;
    println!(
        "{:<24} {:>12} {:>14} {:>14}",
        "h", "hg", "max residual", "L2 residual"
    );
    for h in &problem.harmonic {
        let (poly, _) = nilgevrey::poly::parse_poly_auto(h)?;
        let r = oracle_residual(&poly, l, hg)?;
        for lv in &r.levels {
            println!(
                "{:<24} {:>12.6} {:>14.6e} {:>14.6e}",
                r.h, lv.hg, lv.linf, lv.l2
            );
            csv.push_str(&format!("{},{},{:e},{:e}\n", r.h, lv.hg, lv.linf, lv.l2));
        }
        println!("{:<24} order {:.3}", r.h, r.order);
        ok &= (1.8..=2.2).contains(&r.order);
        reports.push(r);
    }
    out.write("residuals", "csv", &csv)?;
    out.write_json(
        "solve",
        &json!({ "config": config, "problem": problem.name, "oracle": reports }),
    )?;
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::NumericFailed
    })
}

fn solve_grid(
    problem: &Problem,
    config: &RunConfig,
    pair: &nilgevrey::spectral::PotentialPair,
    out: &mut Output,
) -> Result<Outcome> {
    let sol = solve_lambda(pair, &config.solver)?;
    println!(
        "lambda_N = {:.10} (N = {}, L = {}, hg = {}), Rayleigh error {:.2e}",
        sol.lambda, config.solver.n, config.solver.l, config.solver.hg, sol.rayleigh_rel_error
    );
    if let Some(gap) = sol.route_gap {
        println!("route agreement: relative gap {gap:.2e}");
    }
    let target = f64::from(pair.m + 1);
    let mut growth = Vec::new();
    println!("{:>10} {:>16} {:>20}", "exponent", "max f/(1+|t|)^e", "at");
    for e in [target - 4.0, target - 2.0, target, target + 2.0] {
        if e < 0.0 {
            continue;
        }
        let g = growth_check(&sol, e);
        println!(
            "{:>10} {:>16.6e} {:>20}",
            e,
            g.sup,
            format!("({:.3}, {:.3})", g.location.0, g.location.1)
        );
        growth.push(g);
    }
    let r = 0.5;
    let harnack: Vec<_> = [(0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)]
        .into_iter()
        .filter_map(|c| harnack_ratio(&sol, c, r, 1.0).ok())
        .collect();
    let profile = angular_profile(&sol, pair, None, 200)?;
    let radii: Vec<f64> = (1..=6).map(|k| f64::from(k) * 0.5).collect();
    let inequality = angular_inequality(&sol, pair, &radii)?;
    let tubes = tube_geometry(pair, sol.lambda, 2.0, sol.grid.l * 0.9);
    let mut csv = String::from("r,F,a,b,residual\n");
    for i in 0..profile.r.len() {
        csv.push_str(&format!(
            "{},{:e},{:e},{:e},{:e}\n",
            profile.r[i], profile.big_f[i], profile.a[i], profile.b[i], profile.residual[i]
        ));
    }
    out.write("solution", "csv", &sol.to_csv())?;
    out.write("profile", "csv", &csv)?;
    out.write_json(
        "solve",
        &json!({
            "config": config,
            "problem": problem.name,
            "potentials": pair,
            "solution": sol,
            "growth": growth,
            "harnack": harnack,
            "angular_profile": {
                "f_max": profile.f_max,
                "threshold_radius": profile.threshold_radius,
                "local_maxima": profile.local_maxima,
                "decreasing_tail": profile.decreasing_tail,
                "max_residual": profile.max_residual,
            },
            "angular_inequality": inequality,
            "tubes": tubes,
        }),
    )?;
    Ok(Outcome::Success)
}

pub fn gevrey(a: &RunArgs) -> Result<Outcome> {
    let config = run_config("gevrey", a)?;
    let mut out = Output::new(&a.out)?;
    if let (Some(m), Some(s)) = (a.m, a.s) {
        if a.preset.is_some() || a.input.is_some() {
            bail!(nilgevrey::Error::Input(
                "--m/--s select a closed-form run; drop --preset/--input".into()
            ));
        }
        let params = GevreyParams {
            m,
            s,
            damping: a.damping.unwrap_or(1.0),
            f0: a.f0.unwrap_or(1.0),
            lambda: a.lambda.unwrap_or(1.0),
            sigma_max: a.sigma_max,
        };
        let rep = gevrey_report(&params)?;
        print_gevrey(&rep);
        out.write_json("gevrey", &json!({ "config": config, "report": rep }))?;
        out.write("gevrey", "csv", &rep.to_csv())?;
        out.finish("gevrey", &format!("closed-form m={m} s={s}"), a.seed, 0)?;
        return Ok(Outcome::Success);
    }
    let problem = load(a, false)?.ok_or_else(|| {
        anyhow!(nilgevrey::Error::Input(
            "give --preset, --input, --qp or both --m and --s".into()
        ))
    })?;
    let cfg = PipelineConfig {
        solver: config.solver.clone(),
        sigma_max: a.sigma_max,
        force: a.force,
        seed: a.seed,
        damping: a.damping,
        f0: a.f0,
    };
    let report = run_pipeline(&problem, &cfg);
    for stage in &report.stages {
        println!(
            "{:<22} {:<8} {}",
            stage.name,
            format!("{:?}", stage.status).to_lowercase(),
            stage.detail
        );
    }
    if let Some(rep) = &report.gevrey {
        print_gevrey(rep);
        out.write("gevrey", "csv", &rep.to_csv())?;
    }
    out.write_json("report", &json!({ "config": config, "pipeline": report }))?;
    let outcome = match &report.failure {
        None => Outcome::Success,
        Some(f) => {
            eprintln!("halted at {}: {}", f.stage, f.message);
            Outcome::from_class(f.class)
        }
    };
    out.finish("gevrey", &problem.name, a.seed, outcome.code())?;
    Ok(outcome)
}

fn print_gevrey(rep: &GevreyReport) {
    match rep.fitted_order() {
        Some(g) => println!(
            "Gevrey order {g:.4} (target {} = {:.4})",
            rep.target, rep.target_value
        ),
        None => println!("vanishes to infinite order"),
    }
}
