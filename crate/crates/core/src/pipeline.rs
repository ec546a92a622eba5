//! End-to-end run from an algebra document to a Gevrey estimate, recording
//! every stage.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, ErrorClass, Result};
use crate::gevrey::{damping_from_growth, gevrey_report, GevreyParams, GevreyReport};
use crate::induction::{
    build_subordinate, central_reduction, check_assumptions, compute_s, derive_operator,
    has_central_v1_element, reduce_ansatz, CovectorPair, SchrodingerOperator,
};
use crate::lie::StratifiedAlgebra;
use crate::poly::{MultiPoly, Registry};
use crate::presets::Problem;
use crate::scalar::rational_to_f64;
use crate::spectral::{
    analyze_potentials, growth_check, growth_constant, ode_ground_state, separated_solution,
    solve_lambda, PotentialCase, PotentialPair, SolverConfig,
};
use crate::{RatPoly, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    pub sigma_max: u32,
    /// Continue past failed checks.
    pub force: bool,
    pub seed: u64,
    /// Overrides the damping derived from the growth certificate.
    pub damping: Option<f64>,
    /// Overrides `f(0)`.
    pub f0: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            sigma_max: 40,
            force: false,
            seed: 0,
            damping: None,
            f0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
    pub artifacts: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
    #[serde(skip)]
    pub class: ErrorClass,
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub problem: String,
    pub seed: u64,
    pub stages: Vec<Stage>,
    pub failure: Option<StageFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gevrey: Option<GevreyReport>,
}

impl PipelineReport {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn succeeded(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Squares the electric channels of an operator with the `lambda2`
/// parameters at their values and the `lambda1` parameters scaled to one:
/// channels carried by `lambda2` build `q`, channels carried by `lambda1`
/// build `p` (their square enters with the factor `-lambda`).
pub fn operator_potentials(op: &SchrodingerOperator) -> Result<(RatPoly, RatPoly)> {
    if op.has_magnetic_terms() {
        return Err(Error::Input(
            "operators with magnetic terms are not reduced to (q, p)".into(),
        ));
    }
    let lower_values: Vec<(String, Rational)> = op
        .values
        .iter()
        .map(|(s, v)| {
            if op.lambda1_symbols.contains(s) {
                (s.clone(), Rational::from_integer(1.into()))
            } else {
                (s.clone(), v.clone())
            }
        })
        .collect();
    let target = Registry::ambient(op.n, "t");
    let mut q = MultiPoly::zero(&target);
    let mut p = MultiPoly::zero(&target);
    for c in &op.electric {
        let lower = op
            .substitute(&c.lower, &lower_values)
            .embed_by_name(&target);
        let upper = op.substitute(&c.upper, &op.values).embed_by_name(&target);
        match (lower.is_zero(), upper.is_zero()) {
            (true, true) => {}
            (true, false) => q = &q + &(&upper * &upper),
            (false, true) => p = &p + &(&lower * &lower),
            (false, false) => {
                return Err(Error::Input(format!(
                    "channel {} carries both covectors ({} and {}), so the reduced potential is complex",
                    c.label, c.lower, c.upper
                )))
            }
        }
    }
    Ok((q, p))
}

/// Potentials of a problem: given explicitly, from its ansatz, or from the
/// derived operator, in that order of preference.
fn potentials_from(
    problem: &Problem,
    op: Option<&SchrodingerOperator>,
) -> Result<Option<(RatPoly, RatPoly, &'static str)>> {
    if let Some(spec) = &problem.potentials {
        let (q, p) = crate::presets::parse_potentials(spec)?;
        return Ok(Some((q, p, "given")));
    }
    if let (Some(fields), Some(spec)) = (problem.ansatz_fields()?, problem.ansatz_spec()) {
        let red = reduce_ansatz(&fields, &spec)?;
        if !red.certified {
            return Err(Error::Assertion("ansatz reduction not certified".into()));
        }
        return Ok(Some((red.q, red.p, "ansatz")));
    }
    match op {
        Some(op) => operator_potentials(op).map(|(q, p)| Some((q, p, "operator"))),
        None => Ok(None),
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedPotentials {
    pub q: RatPoly,
    pub p: RatPoly,
    /// `given`, `ansatz` or `operator`.
    pub source: &'static str,
    /// Covectors of the problem, when it has an algebra.
    pub pair: Option<CovectorPair>,
}

/// Potentials for a problem, deriving the operator only when neither
/// explicit potentials nor an ansatz are present.
pub fn resolve_potentials(problem: &Problem) -> Result<ResolvedPotentials> {
    let mut pair = None;
    let mut op = None;
    if let (Some(doc), Some(cov)) = (&problem.algebra, &problem.covectors) {
        let alg = doc.parse()?.algebra;
        let pr = cov.build(&alg)?;
        if problem.potentials.is_none() && problem.ansatz.is_none() {
            let sset = compute_s(&alg, &pr)?;
            op = Some(derive_operator(&alg, &pr, &sset)?);
        }
        pair = Some(pr);
    }
    let (q, p, source) = potentials_from(problem, op.as_ref())?
        .ok_or_else(|| Error::Input(format!("problem {:?} defines no potentials", problem.name)))?;
    Ok(ResolvedPotentials { q, p, source, pair })
}

struct Runner {
    report: PipelineReport,
    force: bool,
}

impl Runner {
    fn pass(&mut self, name: &str, detail: impl Into<String>, artifacts: Value) {
        self.push(name, StageStatus::Passed, detail.into(), artifacts);
    }

    fn skip(&mut self, name: &str, detail: impl Into<String>) {
        self.push(name, StageStatus::Skipped, detail.into(), Value::Null);
    }

    fn push(&mut self, name: &str, status: StageStatus, detail: String, artifacts: Value) {
        self.report.stages.push(Stage {
            name: name.into(),
            status,
            detail,
            artifacts,
        });
    }

    /// Records a failed stage; returns `true` when the run must halt.
    fn fail(&mut self, name: &str, err: &Error, artifacts: Value) -> bool {
        self.push(name, StageStatus::Failed, err.to_string(), artifacts);
        let halt = !self.force || matches!(err.class(), ErrorClass::Input | ErrorClass::Numeric);
        if halt || self.report.failure.is_none() {
            self.report.failure = Some(StageFailure {
                stage: name.into(),
                message: err.to_string(),
                class: err.class(),
            });
        }
        halt
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Runs every stage that the problem supports, halting at the first failure
/// unless `force` is set (input and numeric failures always halt).
pub fn run_pipeline(problem: &Problem, cfg: &PipelineConfig) -> PipelineReport {
    let mut run = Runner {
        report: PipelineReport {
            problem: problem.name.clone(),
            seed: cfg.seed,
            stages: Vec::new(),
            failure: None,
            gevrey: None,
        },
        force: cfg.force,
    };
    let _ = drive(problem, cfg, &mut run);
    run.report
}

/// Marker for an early stop; the reason is already in the report.
struct Halt;

macro_rules! stage {
    ($run:expr, $name:expr, $expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => {
                $run.fail($name, &e, Value::Null);
                return Err(Halt);
            }
        }
    };
}

fn drive(
    problem: &Problem,
    cfg: &PipelineConfig,
    run: &mut Runner,
) -> std::result::Result<(), Halt> {
    let mut pair_info: Option<(StratifiedAlgebra, CovectorPair)> = None;
    let mut operator: Option<SchrodingerOperator> = None;

    if let Some(doc) = &problem.algebra {
        let parsed = stage!(run, "verify_stratification", doc.parse());
        let alg = parsed.algebra;
        let ver = alg.verify_stratification();
        if let Some((prop, check)) = ver.first_failure() {
            let err = Error::Algebra(format!("{prop}: {}", check.detail));
            if run.fail("verify_stratification", &err, to_value(&ver)) {
                return Err(Halt);
            }
        } else {
            run.pass(
                "verify_stratification",
                format!("dim {}, strata {:?}", alg.dim(), alg.strata()),
                to_value(&ver),
            );
        }

        let Some(cov) = &problem.covectors else {
            run.skip("check_assumptions", "no covectors given");
            return potentials_stage(problem, cfg, run, None, None);
        };
        let pair = stage!(run, "check_assumptions", cov.build(&alg));
        let rep = check_assumptions(&alg, &pair);
        let central = has_central_v1_element(&alg);
        let artifacts = json!({ "assumptions": to_value(&rep), "central_v1": to_value(&central) });
        match rep.failure_message() {
            Some(msg) => {
                if run.fail("check_assumptions", &Error::Assertion(msg), artifacts) {
                    return Err(Halt);
                }
            }
            None => run.pass(
                "check_assumptions",
                format!(
                    "s = {}, m = {}, strong form {}",
                    rep.s, rep.m, rep.strong_form.passed
                ),
                artifacts,
            ),
        }

        let sset = stage!(run, "compute_S", compute_s(&alg, &pair));
        run.pass(
            "compute_S",
            format!(
                "case {}, S = {{{}}}, n = {}, r = {}",
                sset.case,
                sset.labels.join(", "),
                sset.n,
                sset.r
            ),
            to_value(&sset),
        );

        let sub = stage!(
            run,
            "build_subordinate",
            build_subordinate(&alg, &pair.lambda_entries(), &sset.s)
                .and_then(|h| h.verified().map(|_| h))
        );
        run.pass(
            "build_subordinate",
            format!("dimension {}", alg.dim() - sset.s.len()),
            to_value(&sub),
        );

        let op = stage!(run, "derive_operator", derive_operator(&alg, &pair, &sset));
        run.pass("derive_operator", op.describe(), to_value(&op.document()));

        if central.found && !central.central_basis.is_empty() {
            match central_reduction(&alg, "mu", None, None) {
                Ok(red) => run.pass(
                    "central_reduction",
                    format!(
                        "{} (matches derive: {})",
                        red.describe(),
                        red.matches_derive
                    ),
                    json!({ "operator": red.describe(), "matches_derive": red.matches_derive }),
                ),
                Err(e) => run.skip("central_reduction", e.to_string()),
            }
        } else {
            run.skip("central_reduction", "no central stratum-one basis element");
        }
        pair_info = Some((alg, pair));
        operator = Some(op);
    }
    potentials_stage(
        problem,
        cfg,
        run,
        pair_info.as_ref().map(|p| &p.1),
        operator.as_ref(),
    )
}

fn potentials_stage(
    problem: &Problem,
    cfg: &PipelineConfig,
    run: &mut Runner,
    pair: Option<&CovectorPair>,
    op: Option<&SchrodingerOperator>,
) -> std::result::Result<(), Halt> {
    let Some((q, p, source)) = stage!(run, "potentials", potentials_from(problem, op)) else {
        run.skip("potentials", "no potentials available");
        return Ok(());
    };
    let nvars = q
        .registry()
        .t_block()
        .len()
        .max(p.registry().t_block().len());
    run.pass(
        "potentials",
        format!("q = {q}, p = {p} ({source})"),
        json!({ "q": q.to_string(), "p": p.to_string(), "source": source }),
    );
    let (m, s) = match pair {
        Some(pair) => (pair.m as u32, pair.s as u32),
        None => {
            let dq = q.total_degree().unwrap_or(0) / 2;
            let dp = p.total_degree().unwrap_or(0) / 2;
            (dq, dp)
        }
    };
    let lambda_top = pair
        .and_then(|pr| {
            pr.lambda2
                .entries()
                .values()
                .next()
                .map(|c| rational_to_f64(&c.value))
        })
        .unwrap_or(1.0);

    let (f0, c2) = if nvars <= 1 {
        one_dimensional(run, &q, &p)?
    } else {
        let pair2 = stage!(run, "analyze_potentials", analyze_potentials(&q, &p));
        let detail = format!(
            "m = {}, s = {}, j = {}, condition {}, case {:?}",
            pair2.m,
            pair2.s,
            pair2.j,
            pair2
                .condition
                .as_ref()
                .map(crate::scalar::format_rational)
                .unwrap_or_else(|| "n/a".into()),
            pair2.case
        );
        match pair2.case {
            PotentialCase::Unsupported if !run.force => {
                let err = Error::Assertion(format!("growth condition fails: {detail}"));
                run.fail("analyze_potentials", &err, to_value(&pair2));
                return Err(Halt);
            }
            PotentialCase::Equality if pair2.s == 0 => {
                run.pass("analyze_potentials", detail, to_value(&pair2));
                separated(run, &pair2)?
            }
            _ => {
                run.pass("analyze_potentials", detail, to_value(&pair2));
                planar_solve(run, &pair2, &cfg.solver)?
            }
        }
    };

    let damping = cfg.damping.unwrap_or_else(|| damping_from_growth(c2));
    let params = GevreyParams {
        m,
        s,
        damping,
        f0: cfg.f0.unwrap_or(f0),
        lambda: lambda_top,
        sigma_max: cfg.sigma_max,
    };
    let rep = stage!(run, "gevrey", gevrey_report(&params));
    let detail = match rep.fitted_order() {
        Some(g) => format!("order {g:.4} against {} (M = {damping})", rep.target),
        None => "vanishes to infinite order".to_string(),
    };
    run.pass("gevrey", detail, to_value(&rep.order));
    run.report.gevrey = Some(rep);
    Ok(())
}

/// `-f'' + (c t^{2m} - lambda p) f = 0` with constant `p`: the ground state.
fn one_dimensional(
    run: &mut Runner,
    q: &RatPoly,
    p: &RatPoly,
) -> std::result::Result<(f64, f64), Halt> {
    let shape = || -> Result<(u32, f64, f64)> {
        let pc = p
            .as_constant()
            .map(|c| rational_to_f64(&c))
            .filter(|c| *c > 0.0)
            .ok_or_else(|| {
                Error::Input(format!(
                    "one-dimensional route needs constant positive p, got {p}"
                ))
            })?;
        let terms: Vec<_> = q.terms().collect();
        match terms.as_slice() {
            [(e, c)] if e.iter().sum::<u32>() % 2 == 0 && e.iter().sum::<u32>() > 0 => {
                Ok((e.iter().sum::<u32>() / 2, rational_to_f64(c), pc))
            }
            _ => Err(Error::Input(format!(
                "one-dimensional route needs q = c t^(2m), got {q}"
            ))),
        }
    };
    let (m, c, pc) = stage!(run, "analyze_potentials", shape());
    run.pass(
        "analyze_potentials",
        format!("one variable, q = {q}, p = {p}, m = {m}"),
        json!({ "m": m, "coefficient": c, "p": pc }),
    );
    let g = stage!(run, "solve", ode_ground_state(m));
    // -psi'' + c z^{2m} psi = lambda p psi rescales the unit well.
    let scale = c.powf(1.0 / f64::from(m + 1));
    let lambda = g.lambda0 * scale / pc;
    run.pass(
        "solve",
        format!("ground state lambda = {lambda:.10}"),
        json!({ "lambda": lambda, "lambda0_unit": g.lambda0, "decay": to_value(&g.decay) }),
    );
    run.pass(
        "growth_check",
        "bounded ground state",
        json!({ "c1": 1.0, "c2": 0.0 }),
    );
    Ok((1.0, 0.0))
}

fn separated(run: &mut Runner, pair: &PotentialPair) -> std::result::Result<(f64, f64), Halt> {
    let sol = stage!(
        run,
        "solve",
        separated_solution(pair, None, 4.0, 1.0 / 16.0)
    );
    run.pass(
        "solve",
        format!("separated solution {:?}, mu = {}", sol.kind, sol.mu),
        to_value(&sol),
    );
    run.pass(
        "growth_check",
        format!("|f| <= exp({} |t|)", sol.growth_constant),
        json!({ "c1": 1.0, "c2": sol.growth_constant }),
    );
    Ok((sol.eval(0.0, 0.0), sol.growth_constant))
}

fn planar_solve(
    run: &mut Runner,
    pair: &PotentialPair,
    solver: &SolverConfig,
) -> std::result::Result<(f64, f64), Halt> {
    let sol = stage!(run, "solve", solve_lambda(pair, solver));
    run.pass(
        "solve",
        format!(
            "lambda_N = {:.10}, Rayleigh error {:e}",
            sol.lambda, sol.rayleigh_rel_error
        ),
        to_value(&sol),
    );
    let e = f64::from(pair.m + 1);
    let growth = growth_check(&sol, e);
    let (c1, c2) = growth_constant(&sol);
    run.pass(
        "growth_check",
        format!(
            "max f/(1+|t|)^{e} = {:.6e} at {:?}",
            growth.sup, growth.location
        ),
        json!({ "growth": to_value(&growth), "c1": c1, "c2": c2 }),
    );
    Ok((sol.f[sol.grid.origin()], c2))
}
