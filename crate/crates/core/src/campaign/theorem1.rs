//! Round-trip and adversarial campaigns for shift identifiability on finite groups.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{scalar_injective, trial_seed, variant_name, TrialSummary, MAX_LISTED_FAILURES};
use crate::dist::{random_dist_with, shift, Distribution, LinearFormSpec};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::identify::{
    proof_trace, proposition1_counterexample, remark3_counterexample,
    remark3_kernel_b3_counterexample, verify_form_i, verify_form_ii, verify_proposition1, FormKind,
    IdentifiabilityReport, Verdict,
};

/// Mass placed at zero when drawing component laws, keeping their transforms away from zero.
pub const DIST_FLOOR: f64 = 0.3;

/// Intensity of the Poisson laws in expected-negative instances.
pub const NEGATIVE_INTENSITY: f64 = 0.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem1Form {
    FormI,
    FormII,
    /// Form II with `b = (0, 1, 1)`.
    Kotlarski,
    TwoVariable,
}

impl Theorem1Form {
    pub fn arity(self) -> usize {
        match self {
            Theorem1Form::TwoVariable => 2,
            _ => 3,
        }
    }

    fn kind(self) -> FormKind {
        match self {
            Theorem1Form::FormI => FormKind::FormI,
            Theorem1Form::FormII | Theorem1Form::Kotlarski => FormKind::FormII,
            Theorem1Form::TwoVariable => FormKind::TwoVariable,
        }
    }

    fn expected(self) -> Verdict {
        match self {
            Theorem1Form::TwoVariable => Verdict::Unique,
            _ => Verdict::DeterminedUpToShift,
        }
    }

    /// The kernel conditions, read off scalar coefficients.
    fn scalars_admissible(self, c: &[i64], exponent: u64) -> bool {
        let unit = |x: i64| scalar_injective(x, exponent);
        match self {
            Theorem1Form::FormI => unit(c[0] - c[1]) && unit(c[0] - c[2]) && unit(c[1] - c[2]),
            Theorem1Form::FormII | Theorem1Form::Kotlarski => unit(c[0] - c[1]) && unit(c[2]),
            Theorem1Form::TwoVariable => unit(c[0] - c[1]),
        }
    }
}

impl fmt::Display for Theorem1Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&variant_name(self))
    }
}

impl FromStr for Theorem1Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" | "form-i" => Ok(Theorem1Form::FormI),
            "ii" | "2" | "form-ii" => Ok(Theorem1Form::FormII),
            "kotlarski" => Ok(Theorem1Form::Kotlarski),
            "two-variable" | "two" => Ok(Theorem1Form::TwoVariable),
            other => Err(Error::Parse {
                line: 1,
                msg: format!("unknown form {other:?}; expected i, ii, kotlarski or two-variable"),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Theorem1Config {
    pub group: Group,
    pub form: Theorem1Form,
    /// Fixed coefficients; when absent each trial draws scalar coefficients.
    pub coeffs: Option<Vec<Endo>>,
    pub trials: usize,
    pub seed: u64,
    /// Bound on the reconstruction error in total variation.
    pub tol: f64,
    /// Trials pass when the preconditions fail instead of when the shifts are recovered.
    pub expect_negative: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub group: String,
    pub form: Theorem1Form,
    pub coeffs: Option<Vec<String>>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub expect_negative: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripTrial {
    pub index: usize,
    pub seed: u64,
    pub coeffs: Vec<String>,
    /// `shift` for planted shifts, `counterexample` for a Poisson pair on a kernel.
    pub instance: &'static str,
    pub planted_shifts: Option<Vec<Element>>,
    pub verdict: Verdict,
    pub joint_residual: f64,
    pub reconstruction_error: Option<f64>,
    pub shifts_exact: bool,
    /// Whether the elimination cascade located the planted shifts as characters.
    pub trace_consistent: Option<bool>,
    pub passed: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversarialTrial {
    pub index: usize,
    pub seed: u64,
    pub coeffs: Vec<String>,
    /// Extra shift applied to `nu_1` on top of an admissible instance.
    pub perturbation: Element,
    pub verdict: Verdict,
    pub joint_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Body {
    pub config: ConfigEcho,
    pub coefficient_source: String,
    pub round_trip: TrialSummary,
    pub adversarial: TrialSummary,
    pub trace_consistent: usize,
    pub failures: Vec<String>,
    pub trials: Vec<RoundTripTrial>,
    pub adversarial_trials: Vec<AdversarialTrial>,
    pub passed: bool,
}

enum Coefficients {
    Fixed(Vec<Endo>),
    Pool(Vec<Vec<i64>>),
}

fn coefficient_pool(cfg: &Theorem1Config) -> Result<(Coefficients, String)> {
    let g = &cfg.group;
    if cfg.form == Theorem1Form::Kotlarski {
        if cfg.coeffs.is_some() {
            return Err(Error::Domain(
                "the kotlarski preset fixes its own coefficients".into(),
            ));
        }
        let b = LinearFormSpec::kotlarski_coeffs(g);
        return Ok((Coefficients::Fixed(b.to_vec()), "preset (0, 1, 1)".into()));
    }
    if let Some(b) = &cfg.coeffs {
        if b.len() != cfg.form.arity() {
            return Err(Error::Domain(format!(
                "form {} takes {} coefficients, got {}",
                cfg.form,
                cfg.form.arity(),
                b.len()
            )));
        }
        if b.iter().any(|e| e.group() != g) {
            return Err(Error::Domain(format!("coefficients must act on {g}")));
        }
        return Ok((Coefficients::Fixed(b.clone()), "fixed".into()));
    }
    let e = g.exponent();
    let arity = cfg.form.arity();
    let pool: Vec<Vec<i64>> = (0..e.pow(arity as u32))
        .map(|mut code| {
            let mut c = vec![0i64; arity];
            for slot in c.iter_mut().rev() {
                *slot = (code % e) as i64;
                code /= e;
            }
            c
        })
        .filter(|c| cfg.form.scalars_admissible(c, e) != cfg.expect_negative)
        .collect();
    if pool.is_empty() {
        let fallback: Vec<i64> = (0..arity as i64).collect();
        let what = if cfg.expect_negative {
            "violating"
        } else {
            "satisfying"
        };
        let source = format!(
            "fallback {fallback:?}: no scalar coefficients on {} {what} the kernel conditions",
            g.label()
        );
        return Ok((Coefficients::Pool(vec![fallback]), source));
    }
    let what = if cfg.expect_negative {
        "inadmissible"
    } else {
        "admissible"
    };
    Ok((Coefficients::Pool(pool), format!("random {what} scalars")))
}

fn draw_coeffs(g: &Group, coeffs: &Coefficients, rng: &mut ChaCha8Rng) -> Vec<Endo> {
    match coeffs {
        Coefficients::Fixed(b) => b.clone(),
        Coefficients::Pool(pool) => {
            let c = &pool[rng.random_range(0..pool.len())];
            c.iter().map(|&x| Endo::scalar(g, x)).collect()
        }
    }
}

/// Shift vectors `(x_j)` leaving both linear forms unchanged.
fn admissible_shifts(form: Theorem1Form, b: &[Endo]) -> Result<Vec<Vec<Element>>> {
    let g = b[0].group();
    let all = g.elements()?;
    let mut out = Vec::new();
    let image = |xs: &[Element]| -> Result<Element> {
        xs.iter()
            .zip(b)
            .try_fold(g.zero(), |acc, (x, e)| g.add(&acc, &e.apply(x)?))
    };
    match form {
        Theorem1Form::FormI => {
            for x1 in &all {
                for x2 in &all {
                    let x3 = g.neg(&g.add(x1, x2)?)?;
                    let xs = vec![x1.clone(), x2.clone(), x3];
                    if image(&xs)?.is_zero() {
                        out.push(xs);
                    }
                }
            }
        }
        Theorem1Form::FormII | Theorem1Form::Kotlarski => {
            for x1 in &all {
                for x3 in &all {
                    let xs = vec![x1.clone(), g.neg(x1)?, x3.clone()];
                    if image(&xs)?.is_zero() {
                        out.push(xs);
                    }
                }
            }
        }
        Theorem1Form::TwoVariable => {
            for x1 in &all {
                let xs = vec![x1.clone(), g.neg(x1)?];
                if image(&xs)?.is_zero() {
                    out.push(xs);
                }
            }
        }
    }
    Ok(out)
}

fn verify(
    form: Theorem1Form,
    b: &[Endo],
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<IdentifiabilityReport> {
    match form {
        Theorem1Form::TwoVariable => verify_proposition1(&b[0], &b[1], mus, nus),
        _ => {
            let triple: [Endo; 3] = [b[0].clone(), b[1].clone(), b[2].clone()];
            if form == Theorem1Form::FormI {
                verify_form_i(&triple, mus, nus)
            } else {
                verify_form_ii(&triple, mus, nus)
            }
        }
    }
}

struct Instance {
    b: Vec<Endo>,
    mus: Vec<Distribution>,
    nus: Vec<Distribution>,
    planted: Option<Vec<Element>>,
    kind: &'static str,
}

fn shift_instance(
    g: &Group,
    form: Theorem1Form,
    b: Vec<Endo>,
    rng: &mut ChaCha8Rng,
) -> Result<Instance> {
    let mus = (0..form.arity())
        .map(|_| random_dist_with(g, rng, DIST_FLOOR))
        .collect::<Result<Vec<_>>>()?;
    let shifts = admissible_shifts(form, &b)?;
    let planted = shifts[rng.random_range(0..shifts.len())].clone();
    let nus = mus
        .iter()
        .zip(&planted)
        .map(|(m, x)| shift(m, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance {
        b,
        mus,
        nus,
        planted: Some(planted),
        kind: "shift",
    })
}

/// A Poisson pair on a kernel when one is available, otherwise planted shifts.
fn negative_instance(
    g: &Group,
    form: Theorem1Form,
    b: Vec<Endo>,
    rng: &mut ChaCha8Rng,
) -> Result<Instance> {
    let a = NEGATIVE_INTENSITY;
    let ce = match form {
        Theorem1Form::TwoVariable => proposition1_counterexample(&b[0], &b[1], a),
        _ => {
            let triple: [Endo; 3] = [b[0].clone(), b[1].clone(), b[2].clone()];
            let first = random_dist_with(g, rng, DIST_FLOOR)?;
            let second = random_dist_with(g, rng, DIST_FLOOR)?;
            match remark3_counterexample(&triple, a, &first) {
                Err(Error::CannotConstruct(_)) if form != Theorem1Form::FormI => {
                    remark3_kernel_b3_counterexample(&triple, a, &first, &second)
                }
                other => other,
            }
        }
    };
    match ce {
        Ok(ce) => Ok(Instance {
            b,
            mus: ce.mus,
            nus: ce.nus,
            planted: None,
            kind: "counterexample",
        }),
        Err(Error::CannotConstruct(_)) => shift_instance(g, form, b, rng),
        Err(e) => Err(e),
    }
}

fn labels(b: &[Endo]) -> Vec<String> {
    b.iter().map(Endo::to_string).collect()
}

fn trace_matches(form: Theorem1Form, inst: &Instance) -> Result<(bool, Option<String>)> {
    let Some(planted) = &inst.planted else {
        return Ok((false, Some("no planted shifts to compare".into())));
    };
    let verdicts = match proof_trace(form.kind(), &inst.b, &inst.mus, &inst.nus) {
        Ok(v) => v,
        Err(Error::Precondition(msg)) => {
            return Ok((false, Some(format!("cascade refused: {msg}"))))
        }
        Err(e) => return Err(e),
    };
    for v in &verdicts {
        let want = &planted[v.label];
        if !v.is_character || v.located.as_ref() != Some(want) {
            return Ok((
                false,
                Some(format!(
                    "cascade for factor {} located {:?}, planted {want}",
                    v.label + 1,
                    v.located.as_ref().map(Element::to_string)
                )),
            ));
        }
    }
    Ok((true, None))
}

fn round_trip(cfg: &Theorem1Config, coeffs: &Coefficients, index: usize) -> Result<RoundTripTrial> {
    let g = &cfg.group;
    let seed = trial_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = draw_coeffs(g, coeffs, &mut rng);
    let inst = if cfg.expect_negative {
        negative_instance(g, cfg.form, b, &mut rng)?
    } else {
        shift_instance(g, cfg.form, b, &mut rng)?
    };
    let report = verify(cfg.form, &inst.b, &inst.mus, &inst.nus)?;

    let mut reason = None;
    let mut trace_consistent = None;
    let shifts_exact;
    let passed = if cfg.expect_negative {
        shifts_exact = false;
        if report.verdict != Verdict::PreconditionsViolated {
            reason = Some(format!(
                "expected preconditions-violated, got {}",
                variant_name(&report.verdict)
            ));
        }
        report.verdict == Verdict::PreconditionsViolated
    } else {
        let planted = inst.planted.as_deref().unwrap_or_default();
        shifts_exact = match cfg.form {
            Theorem1Form::TwoVariable => planted.iter().all(Element::is_zero),
            _ => report.shifts.as_deref() == Some(planted),
        };
        let within = report.reconstruction_error.is_some_and(|r| r < cfg.tol);
        if report.verdict != cfg.form.expected() {
            reason = Some(format!(
                "expected {}, got {}{}",
                variant_name(&cfg.form.expected()),
                variant_name(&report.verdict),
                failed_preconditions(&report)
            ));
        } else if !shifts_exact {
            reason = Some("recovered shifts differ from the planted ones".into());
        } else if !within {
            reason = Some(format!(
                "reconstruction error {:?} exceeds {}",
                report.reconstruction_error, cfg.tol
            ));
        } else {
            let (ok, why) = trace_matches(cfg.form, &inst)?;
            trace_consistent = Some(ok);
            reason = why;
        }
        reason.is_none()
    };
    Ok(RoundTripTrial {
        index,
        seed,
        coeffs: labels(&inst.b),
        instance: inst.kind,
        planted_shifts: inst.planted,
        verdict: report.verdict,
        joint_residual: report.joint_residual,
        reconstruction_error: report.reconstruction_error,
        shifts_exact,
        trace_consistent,
        passed,
        reason,
    })
}

fn failed_preconditions(report: &IdentifiabilityReport) -> String {
    let failed: Vec<&str> = report
        .preconditions
        .iter()
        .filter(|p| !p.holds)
        .map(|p| p.name.as_str())
        .collect();
    if failed.is_empty() {
        String::new()
    } else {
        format!(" (failed: {})", failed.join(", "))
    }
}

fn adversarial(
    cfg: &Theorem1Config,
    coeffs: &Coefficients,
    index: usize,
) -> Result<AdversarialTrial> {
    let g = &cfg.group;
    let seed = trial_seed(cfg.seed, cfg.trials + index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = draw_coeffs(g, coeffs, &mut rng);
    let mut inst = shift_instance(g, cfg.form, b, &mut rng)?;
    let d = g.element_at(rng.random_range(1..g.size()));
    inst.nus[0] = shift(&inst.nus[0], &d)?;
    let report = verify(cfg.form, &inst.b, &inst.mus, &inst.nus)?;
    Ok(AdversarialTrial {
        index,
        seed,
        coeffs: labels(&inst.b),
        perturbation: d,
        verdict: report.verdict,
        joint_residual: report.joint_residual,
        passed: report.verdict == Verdict::Mismatch,
    })
}

/// Runs `trials` round trips and, outside expected-negative mode, as many adversarial trials.
pub fn run_theorem1(cfg: &Theorem1Config) -> Result<Theorem1Body> {
    if cfg.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    cfg.group.elements()?;
    let (coeffs, coefficient_source) = coefficient_pool(cfg)?;

    let trials: Vec<RoundTripTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| round_trip(cfg, &coeffs, i))
        .collect::<Result<_>>()?;
    let adversarial_trials: Vec<AdversarialTrial> = if cfg.expect_negative {
        Vec::new()
    } else {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| adversarial(cfg, &coeffs, i))
            .collect::<Result<_>>()?
    };

    let mut round = TrialSummary::default();
    let mut failures = Vec::new();
    for t in &trials {
        round.record(
            t.passed,
            &variant_name(&t.verdict),
            t.joint_residual,
            t.reconstruction_error,
        );
        if let (false, Some(r)) = (t.passed, &t.reason) {
            failures.push(format!("round trip {}: {r}", t.index));
        }
    }
    let mut adv = TrialSummary::default();
    for t in &adversarial_trials {
        adv.record(t.passed, &variant_name(&t.verdict), t.joint_residual, None);
        if !t.passed {
            failures.push(format!(
                "adversarial {}: expected mismatch, got {}",
                t.index,
                variant_name(&t.verdict)
            ));
        }
    }
    failures.truncate(MAX_LISTED_FAILURES);
    let passed = round.all_passed() && adv.all_passed();
    Ok(Theorem1Body {
        config: ConfigEcho {
            group: cfg.group.label(),
            form: cfg.form,
            coeffs: cfg.coeffs.as_deref().map(labels),
            trials: cfg.trials,
            seed: cfg.seed,
            tol: cfg.tol,
            expect_negative: cfg.expect_negative,
        },
        coefficient_source,
        trace_consistent: trials
            .iter()
            .filter(|t| t.trace_consistent == Some(true))
            .count(),
        round_trip: round,
        adversarial: adv,
        failures,
        trials,
        adversarial_trials,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identify::SHIFT_TOL;

    fn config(orders: &[u64], form: Theorem1Form, trials: usize) -> Theorem1Config {
        Theorem1Config {
            group: Group::new(orders).unwrap(),
            form,
            coeffs: None,
            trials,
            seed: 11,
            tol: SHIFT_TOL,
            expect_negative: false,
        }
    }

    #[test]
    fn admissible_shifts_preserve_both_forms() {
        let g = Group::cyclic(7).unwrap();
        let b = vec![
            Endo::scalar(&g, 0),
            Endo::scalar(&g, 1),
            Endo::scalar(&g, 3),
        ];
        let shifts = admissible_shifts(Theorem1Form::FormI, &b).unwrap();
        // x1 + x2 + x3 = 0 and x2 + 3 x3 = 0 leave one free coordinate
        assert_eq!(shifts.len(), 7);
        for xs in shifts {
            let sum = xs.iter().fold(g.zero(), |a, x| g.add(&a, x).unwrap());
            assert!(sum.is_zero());
        }
        let two = admissible_shifts(Theorem1Form::TwoVariable, &b[1..]).unwrap();
        assert_eq!(two, vec![vec![g.zero(), g.zero()]]);
    }

    #[test]
    fn small_campaigns_pass() {
        for form in [
            Theorem1Form::FormI,
            Theorem1Form::FormII,
            Theorem1Form::Kotlarski,
            Theorem1Form::TwoVariable,
        ] {
            let body = run_theorem1(&config(&[7], form, 6)).unwrap();
            assert!(body.passed, "{form}: {:?}", body.failures);
            assert_eq!(body.trace_consistent, 6);
            assert_eq!(body.adversarial.passed, 6);
        }
    }

    #[test]
    fn form_i_on_z4_z3_has_no_admissible_coefficients() {
        let body = run_theorem1(&config(&[4, 3], Theorem1Form::FormI, 3)).unwrap();
        assert!(body.coefficient_source.starts_with("fallback"));
        assert!(!body.passed);
        assert_eq!(
            body.round_trip.verdicts.get("preconditions-violated"),
            Some(&3)
        );
    }

    #[test]
    fn expected_negative_mode() {
        let mut cfg = config(&[6], Theorem1Form::FormI, 4);
        cfg.expect_negative = true;
        cfg.coeffs = Some(vec![
            Endo::scalar(&cfg.group, 1),
            Endo::scalar(&cfg.group, 3),
            Endo::scalar(&cfg.group, 5),
        ]);
        let body = run_theorem1(&cfg).unwrap();
        assert!(body.passed, "{:?}", body.failures);
        assert!(body
            .trials
            .iter()
            .all(|t| t.instance == "counterexample" && t.joint_residual < 1e-12));
        assert!(body.adversarial_trials.is_empty());

        // admissible coefficients make the negative expectation fail
        let mut cfg = config(&[7], Theorem1Form::FormI, 2);
        cfg.expect_negative = true;
        cfg.coeffs = Some((0..3).map(|c| Endo::scalar(&cfg.group, c)).collect());
        assert!(!run_theorem1(&cfg).unwrap().passed);
    }

    #[test]
    fn bodies_are_reproducible() {
        let cfg = config(&[5], Theorem1Form::FormI, 5);
        let a = serde_json::to_string(&run_theorem1(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_theorem1(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_errors() {
        let mut cfg = config(&[5], Theorem1Form::FormI, 0);
        assert!(run_theorem1(&cfg).is_err());
        cfg.trials = 1;
        cfg.coeffs = Some(vec![Endo::scalar(&cfg.group, 1)]);
        assert!(run_theorem1(&cfg).is_err());
        assert!("iii".parse::<Theorem1Form>().is_err());
    }
}
