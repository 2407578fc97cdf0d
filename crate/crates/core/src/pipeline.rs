//! Runs the requested analyses on an endomorphism and assembles a JSON
//! report.
//!
//! Polynomials are serialised as arrays of `[exponents, coefficient]` pairs in
//! lexicographic exponent order. A coefficient in `F_p` is an integer in
//! `[0, p)`; in `F_{p^m}` it is the array of its `m` coordinates in the power
//! basis of `t`; in `W₂(k)` it is the pair of Witt coordinates.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{self, LiftOutcome};
use crate::diffeq;
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::monomial::MultiIndex;
use crate::poly::Poly;
use crate::scalars::{Field, Fq};
use crate::specfile::{SpecFile, Task};
use crate::trivialization;
use crate::weyl::{WeylK, WeylW2};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Overrides the task list of the input file.
    pub tasks: Option<Vec<Task>>,
    /// Overrides the budget of the input file.
    pub budget: Option<u128>,
    pub timings: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub m: usize,
    pub modulus: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Validation {
    pub valid: bool,
    pub degree: u32,
    pub cost_estimate: u128,
    pub budget: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    #[serde(rename = "C")]
    pub c: Vec<Vec<Value>>,
    pub liftable: bool,
    pub poisson: bool,
    pub etale: bool,
    pub injective_certified: bool,
    pub degree_bound: bool,
    pub jacobian_identity: bool,
    pub center_images: Vec<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Oracle {
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaReport {
    pub gamma: Vec<Value>,
    pub f: Vec<Value>,
    pub symmetric: bool,
    pub matrix_identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub liftable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<Value>>,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    /// `(−1)^n Tr rep(u₁^{p−1} ⋯ u₂ₙ^{p−1})`, expected to be `1`.
    pub top_coefficient: Value,
    pub top_coefficient_is_one: bool,
    pub via_psi_agrees: bool,
    pub operator_identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stats {
    pub image_terms: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_ij_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_image_terms: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub status: &'static str,
    pub field: FieldInfo,
    pub n: usize,
    pub tasks: Vec<&'static str>,
    pub images: Vec<String>,
    pub validation: Validation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Oracle>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceReport>,
    pub stats: Stats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<&'static str, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// JSON document for a run that stopped with `err`.
pub fn error_report(err: &Error) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "status": "error",
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
            "exit_code": err.exit_code(),
        }
    })
}

pub fn coeff_json(k: &Field, c: &Fq) -> Value {
    if k.m() == 1 {
        json!(k.coeffs(c)[0])
    } else {
        json!(k.coeffs(c))
    }
}

fn exps(m: &MultiIndex) -> Value {
    json!(m.as_slice())
}

pub fn poly_json(f: &Poly) -> Value {
    let k = f.field();
    Value::Array(f.terms().iter().map(|(m, c)| json!([exps(m), coeff_json(k, c)])).collect())
}

pub fn weyl_json(f: &WeylK) -> Value {
    let k = f.algebra().field();
    Value::Array(f.terms().iter().map(|(m, c)| json!([exps(m), coeff_json(k, c)])).collect())
}

pub fn witt_json(f: &WeylW2) -> Value {
    let k = f.algebra().field();
    Value::Array(
        f.terms()
            .iter()
            .map(|(m, c)| json!([exps(m), [coeff_json(k, &c.a1), coeff_json(k, &c.a2)]]))
            .collect(),
    )
}

pub fn matrix_json(m: &PolyMatrix) -> Vec<Vec<Value>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| poly_json(&m[(r, c)])).collect()).collect()
}

/// Parses, validates and runs `spec`.
pub fn run(spec: &SpecFile, opts: &RunOptions) -> Result<Report> {
    let mut e = spec.endo()?;
    if let Some(b) = opts.budget {
        e = e.with_budget(b);
    }
    let tasks = opts
        .tasks
        .clone()
        .or_else(|| spec.tasks.clone())
        .unwrap_or_else(|| vec![Task::Validate, Task::Analyze]);
    run_endo(&e, &tasks, opts.timings)
}

/// Runs `tasks` on an already validated endomorphism. Any task past
/// validation other than `trace` also runs `analyze`, so that the flags can
/// be cross-checked before the report is returned.
pub fn run_endo(e: &Endo, tasks: &[Task], timings: bool) -> Result<Report> {
    let mut tasks: Vec<Task> = tasks.to_vec();
    tasks.push(Task::Validate);
    if tasks.iter().any(|t| matches!(t, Task::Oracle | Task::Gamma | Task::Lift)) {
        tasks.push(Task::Analyze);
    }
    tasks.sort();
    tasks.dedup();
    let wants = |t: Task| tasks.contains(&t);

    let mut times: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut clock = |name: &'static str, start: Instant| {
        times.insert(name, start.elapsed().as_secs_f64() * 1e3);
    };

    let alg = e.algebra();
    let k = alg.field();
    let validation = Validation {
        valid: true,
        degree: e.degree(),
        cost_estimate: e.cost_estimate(),
        budget: e.budget(),
    };

    let mut analysis = None;
    if wants(Task::Analyze) {
        let t = Instant::now();
        let r = e.analyze()?;
        let jacobian_identity = e.check_jacobian_identity()?;
        clock("analyze", t);
        analysis = Some(Analysis {
            c: matrix_json(&r.c),
            liftable: r.liftable,
            poisson: r.poisson,
            etale: r.etale,
            injective_certified: r.injective_certified,
            degree_bound: r.degree_bound_met,
            jacobian_identity,
            center_images: e.center_images().iter().map(poly_json).collect(),
        });
    }

    let mut oracle = None;
    if wants(Task::Oracle) {
        let t = Instant::now();
        let agrees = &e.obstruction_c_oracle()? == e.obstruction_c()?;
        clock("oracle", t);
        oracle = Some(Oracle { agrees });
    }

    let mut gamma = None;
    if wants(Task::Gamma) {
        let t = Instant::now();
        let sol = diffeq::solve_all(e)?;
        let matrix_identity = diffeq::check_matrix_id(e)?;
        clock("gamma", t);
        gamma = Some(GammaReport {
            gamma: sol.gamma.iter().map(poly_json).collect(),
            f: sol.f.iter().map(poly_json).collect(),
            symmetric: sol.j_f.is_symmetric(),
            matrix_identity,
        });
    }

    let mut lift = None;
    if wants(Task::Lift) {
        let t = Instant::now();
        let outcome = cohomology::construct_lift(e)?;
        clock("lift", t);
        lift = Some(match outcome {
            LiftOutcome::Lift { v, phi } => LiftReport {
                liftable: true,
                verified: cohomology::verify_lift(alg, &phi),
                v: Some(v.iter().map(weyl_json).collect()),
                phi: Some(phi.iter().map(witt_json).collect()),
            },
            LiftOutcome::Obstructed { .. } => LiftReport {
                liftable: false,
                v: None,
                phi: None,
                verified: false,
            },
        });
    }

    let mut trace = None;
    if wants(Task::Trace) {
        let t = Instant::now();
        let p = alg.p() as u64;
        let top = e.images().iter().fold(WeylK::one(alg), |acc, u| &acc * &u.pow(p - 1));
        let coeff = trivialization::trace_top_coefficient(e, &top)?;
        let via_psi = trivialization::top_coefficient_via_psi(e, &top)?;
        let z: Vec<WeylK> = (0..alg.nvars()).map(|i| WeylK::generator(alg, i)).collect();
        let operator_identity = trivialization::ad_chain(e.images(), &top) == trivialization::ad_chain(&z, &top);
        clock("trace", t);
        trace = Some(TraceReport {
            top_coefficient_is_one: coeff == Poly::one(alg, coeff.tag()),
            via_psi_agrees: via_psi == coeff,
            operator_identity,
            top_coefficient: poly_json(&coeff),
        });
    }

    check_consistency(analysis.as_ref(), oracle.as_ref(), gamma.as_ref(), lift.as_ref(), trace.as_ref())?;

    let stats = Stats {
        image_terms: e.images().iter().map(|u| u.terms().len()).collect(),
        u_ij_terms: analysis
            .as_ref()
            .map(|_| e.u_ij_matrix().map(|m| m.iter().flatten().map(|x| x.terms().len()).sum()))
            .transpose()?,
        center_image_terms: analysis
            .as_ref()
            .map(|_| e.center_images().iter().map(|f| f.terms().len()).collect()),
    };

    Ok(Report {
        schema: SCHEMA_VERSION,
        status: "ok",
        field: FieldInfo {
            p: k.p(),
            m: k.m(),
            modulus: k.modulus().to_vec(),
        },
        n: alg.n(),
        tasks: tasks.iter().map(|t| t.name()).collect(),
        images: e.images().iter().map(|u| u.to_string()).collect(),
        validation,
        analysis,
        oracle,
        gamma,
        lift,
        trace,
        stats,
        timings_ms: timings.then_some(times),
    })
}

fn check_consistency(
    analysis: Option<&Analysis>,
    oracle: Option<&Oracle>,
    gamma: Option<&GammaReport>,
    lift: Option<&LiftReport>,
    trace: Option<&TraceReport>,
) -> Result<()> {
    let fail = |what: &str| Err(Error::InternalInconsistency(what.to_string()));
    if let Some(a) = analysis {
        if !a.jacobian_identity {
            return fail("J ω⁻¹ Jᵀ differs from ω⁻¹ + C");
        }
        if a.liftable != a.poisson {
            return fail("liftable and poisson flags disagree");
        }
        if a.degree_bound && !a.liftable {
            return fail("degree bound holds but C is nonzero");
        }
        if let Some(g) = gamma {
            if g.symmetric != a.liftable {
                return fail("symmetry criterion disagrees with liftable");
            }
        }
        if let Some(l) = lift {
            if l.liftable != a.liftable {
                return fail("lift construction disagrees with liftable");
            }
        }
    }
    if oracle.is_some_and(|o| !o.agrees) {
        return fail("obstruction matrix differs from the W₂ oracle");
    }
    if gamma.is_some_and(|g| !g.matrix_identity) {
        return fail("matrix identity for J_gamma fails");
    }
    if lift.is_some_and(|l| l.liftable && !l.verified) {
        return fail("constructed lift fails the relations");
    }
    if trace.is_some_and(|t| !(t.top_coefficient_is_one && t.via_psi_agrees && t.operator_identity)) {
        return fail("trace identities fail");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::{etale_family, triangular_example};

    fn triangular_spec(p: u32) -> SpecFile {
        SpecFile::parse(&SpecFile::render(&triangular_example(p).unwrap(), None)).unwrap()
    }

    #[test]
    fn triangular_report() {
        let opts = RunOptions {
            tasks: Some(Task::parse_list("analyze,gamma,lift,oracle").unwrap()),
            ..Default::default()
        };
        let r = run(&triangular_spec(3), &opts).unwrap();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["analysis"]["liftable"], false);
        assert_eq!(v["analysis"]["poisson"], false);
        assert_eq!(v["analysis"]["C"][0][3], json!([[[0, 0, 0, 0], 2]]));
        assert_eq!(v["analysis"]["C"][3][0], json!([[[0, 0, 0, 0], 1]]));
        assert_eq!(v["gamma"]["gamma"][2], json!([[[0, 1, 0, 0], 1]]));
        assert_eq!(v["gamma"]["symmetric"], false);
        assert_eq!(v["lift"]["liftable"], false);
        assert_eq!(v["oracle"]["agrees"], true);
        assert!(v.get("timings_ms").is_none());
    }

    #[test]
    fn identity_is_green_and_deterministic() {
        let spec = SpecFile::parse("p = 2\nn = 1\nphi.1 = z1\nphi.2 = z2\n").unwrap();
        let opts = RunOptions {
            tasks: Some(Task::ALL.to_vec()),
            ..Default::default()
        };
        let a = run(&spec, &opts).unwrap();
        let b = run(&spec, &opts).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let an = a.analysis.unwrap();
        assert!(an.liftable && an.poisson && an.etale && an.injective_certified && an.degree_bound);
        assert!(a.lift.unwrap().verified);
        assert!(a.trace.unwrap().top_coefficient_is_one);
    }

    #[test]
    fn etale_family_lift_and_trace() {
        let e = etale_family(3, 0).unwrap();
        let r = run_endo(&e, &[Task::Lift, Task::Trace], true).unwrap();
        assert!(r.lift.as_ref().unwrap().verified);
        let t = r.trace.unwrap();
        assert!(t.via_psi_agrees && t.operator_identity && t.top_coefficient_is_one);
        assert!(r.timings_ms.unwrap().contains_key("lift"));
    }

    #[test]
    fn extension_field_coefficients() {
        let spec = SpecFile::parse("field = 3^2\nn = 1\nphi.1 = t*z1\nphi.2 = (2*t)*z2\n").unwrap();
        let r = run(&spec, &RunOptions::default()).unwrap();
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        // (t z1)^3 = t^3 x1 with t^2 = -1
        assert_eq!(v["analysis"]["center_images"][0], json!([[[1, 0], [0, 2]]]));
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let spec = SpecFile::parse("p = 3\nn = 1\nphi.1 = z1\nphi.2 = z1").unwrap();
        let err = run(&spec, &RunOptions::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert_eq!(error_report(&err)["error"]["kind"], "RelationViolation");
        let opts = RunOptions {
            budget: Some(10),
            ..Default::default()
        };
        assert_eq!(run(&triangular_spec(3), &opts).unwrap_err().exit_code(), 3);
    }
}
