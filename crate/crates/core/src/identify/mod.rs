//! Verifiers deciding whether the joint law of two linear forms pins down the
//! distributions of the summands, plus the counterexample generators.

pub mod counterexample;
pub mod remark6;

use serde::Serialize;

use crate::dist::{
    char_fn, joint_char, nonvanishing, shift, total_variation, Distribution, LinearFormSpec,
};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::funceq::equation::{extract_characters, CharacterVerdict, Equation, Factor, Probe};
use crate::funceq::table::FunctionTable;
use crate::group::{Element, Group};

pub use counterexample::{
    proposition1_counterexample, remark3_counterexample, remark3_kernel_b3_counterexample,
    Counterexample,
};
pub use remark6::{remark6_check, Remark6Report};

/// Sup-norm threshold for two joint characteristic functions to count as equal.
pub const JOINT_TOL: f64 = 1e-8;

/// Threshold for shift recovery and reconstruction in total variation.
pub const SHIFT_TOL: f64 = 1e-8;

/// Characteristic functions with modulus at or below this are treated as vanishing.
pub const NONVANISHING_TOL: f64 = 1e-9;

/// Which pair of linear forms is being tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// `L1 = xi_1 + xi_2 + xi_3`.
    FormI,
    /// `L1 = xi_1 + xi_2`, three summands in `L2`.
    FormII,
    /// `L1 = xi_1 + xi_2`, `L2 = b_1 xi_1 + b_2 xi_2`.
    TwoVariable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    DeterminedUpToShift,
    Unique,
    Mismatch,
    PreconditionsViolated,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Precondition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentifiabilityReport {
    pub form: FormKind,
    pub preconditions: Vec<Precondition>,
    pub joint_residual: f64,
    /// `x_j` with `nu_j = mu_j * E_{x_j}`; present exactly when the verdict is [`Verdict::DeterminedUpToShift`].
    pub shifts: Option<Vec<Element>>,
    /// Largest total-variation distance between `nu_j` and the reconstruction from `mu_j`.
    pub reconstruction_error: Option<f64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl IdentifiabilityReport {
    pub fn preconditions_hold(&self) -> bool {
        self.preconditions.iter().all(|p| p.holds)
    }
}

/// The `x` with `nu^(y) = mu^(y) (x, y)` for every `y`, searched over the whole group.
///
/// Returns the first match in element order; when `mu^` is nonvanishing the match is unique.
pub fn recover_shift(mu: &Distribution, nu: &Distribution) -> Result<Option<Element>> {
    if mu.group() != nu.group() {
        return Err(Error::Domain(format!(
            "distributions live on {} and {}",
            mu.group(),
            nu.group()
        )));
    }
    let g = mu.group();
    let elements = g.elements()?;
    let mu_hat = char_fn(mu);
    let nu_hat = char_fn(nu);
    Ok(elements.iter().find_map(|x| {
        let fits = elements
            .iter()
            .zip(mu_hat.values().iter().zip(nu_hat.values()))
            .all(|(y, (m, n))| (n - m * g.pair_raw(x, y)).norm() < SHIFT_TOL);
        fits.then(|| x.clone())
    }))
}

fn kernel_condition(name: String, e: &Endo) -> Result<Precondition> {
    Ok(Precondition {
        name,
        holds: e.has_trivial_kernel()?,
    })
}

fn nonvanishing_conditions(mus: &[Distribution], nus: &[Distribution]) -> Vec<Precondition> {
    let side = |prefix: &str, ds: &[Distribution]| -> Vec<Precondition> {
        ds.iter()
            .enumerate()
            .map(|(j, d)| Precondition {
                name: format!("{prefix}_{} nonvanishing", j + 1),
                holds: nonvanishing(d, NONVANISHING_TOL),
            })
            .collect()
    };
    let mut out = side("mu", mus);
    out.extend(side("nu", nus));
    out
}

fn check_lengths(
    b: &[Endo],
    mus: &[Distribution],
    nus: &[Distribution],
    n: usize,
) -> Result<Group> {
    if b.len() != n || mus.len() != n || nus.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} coefficients and {n}+{n} distributions, got {}, {} and {}",
            b.len(),
            mus.len(),
            nus.len()
        )));
    }
    let g = b[0].group().clone();
    if b.iter().any(|e| e.group() != &g) || mus.iter().chain(nus).any(|d| d.group() != &g) {
        return Err(Error::Domain(format!("all inputs must live on {g}")));
    }
    Ok(g)
}

fn verify(
    form: FormKind,
    spec: &LinearFormSpec,
    mut preconditions: Vec<Precondition>,
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<IdentifiabilityReport> {
    preconditions.extend(nonvanishing_conditions(mus, nus));
    let joint_residual = joint_char(spec, mus)?.sup_distance(&joint_char(spec, nus)?)?;
    let mut report = IdentifiabilityReport {
        form,
        preconditions,
        joint_residual,
        shifts: None,
        reconstruction_error: None,
        verdict: Verdict::PreconditionsViolated,
        notes: Vec::new(),
    };
    if !report.preconditions_hold() {
        return Ok(report);
    }
    if joint_residual >= JOINT_TOL {
        report.verdict = Verdict::Mismatch;
        return Ok(report);
    }

    let mut shifts = Vec::with_capacity(mus.len());
    let mut worst: f64 = 0.0;
    for (j, (mu, nu)) in mus.iter().zip(nus).enumerate() {
        match recover_shift(mu, nu)? {
            Some(x) => {
                worst = worst.max(total_variation(&shift(mu, &x)?, nu)?);
                shifts.push(x);
            }
            None => {
                report
                    .notes
                    .push(format!("nu_{} is not a shift of mu_{}", j + 1, j + 1));
                report.verdict = Verdict::Mismatch;
                return Ok(report);
            }
        }
    }
    report.reconstruction_error = Some(worst);
    if worst >= SHIFT_TOL {
        report.notes.push(format!(
            "reconstruction off by {worst:e} in total variation"
        ));
        report.verdict = Verdict::Mismatch;
        return Ok(report);
    }
    if form == FormKind::TwoVariable {
        report.verdict = if shifts.iter().all(Element::is_zero) {
            Verdict::Unique
        } else {
            report
                .notes
                .push("equal joint laws with nonzero shifts".into());
            Verdict::Mismatch
        };
        return Ok(report);
    }
    report.shifts = Some(shifts);
    report.verdict = Verdict::DeterminedUpToShift;
    Ok(report)
}

/// `L1 = xi_1 + xi_2 + xi_3`, `L2 = b_1 xi_1 + b_2 xi_2 + b_3 xi_3`, requiring
/// every pairwise difference `b_i - b_j` to be injective.
pub fn verify_form_i(
    b: &[Endo; 3],
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<IdentifiabilityReport> {
    check_lengths(b, mus, nus, 3)?;
    let mut pre = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        pre.push(kernel_condition(
            format!("Ker(b{}-b{}) = 0", i + 1, j + 1),
            &b[i].sub(&b[j])?,
        )?);
    }
    verify(FormKind::FormI, &LinearFormSpec::form_i(b)?, pre, mus, nus)
}

/// `L1 = xi_1 + xi_2`, `L2 = b_1 xi_1 + b_2 xi_2 + b_3 xi_3`, requiring
/// `b_1 - b_2` and `b_3` to be injective.
pub fn verify_form_ii(
    b: &[Endo; 3],
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<IdentifiabilityReport> {
    check_lengths(b, mus, nus, 3)?;
    let pre = vec![
        kernel_condition("Ker(b1-b2) = 0".into(), &b[0].sub(&b[1])?)?,
        kernel_condition("Ker b3 = 0".into(), &b[2])?,
    ];
    verify(
        FormKind::FormII,
        &LinearFormSpec::form_ii(b)?,
        pre,
        mus,
        nus,
    )
}

/// `L1 = xi_1 + xi_2`, `L2 = b_1 xi_1 + b_2 xi_2`: with `b_1 - b_2` injective the
/// joint law fixes both distributions outright.
pub fn verify_proposition1(
    b1: &Endo,
    b2: &Endo,
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<IdentifiabilityReport> {
    let b = [b1.clone(), b2.clone()];
    check_lengths(&b, mus, nus, 2)?;
    let pre = vec![kernel_condition("Ker(b1-b2) = 0".into(), &b1.sub(b2)?)?];
    verify(
        FormKind::TwoVariable,
        &LinearFormSpec::form_i(&b)?,
        pre,
        mus,
        nus,
    )
}

/// Parameter values used when replaying the elimination cascade on a group of the given size.
pub const PROOF_PARAM_LIMIT: usize = 6;

/// Replays the character-extraction argument on the ratio tables `f_j = nu_j^ / mu_j^`.
///
/// Every factor is isolated in turn; the located characters are the shifts.
pub fn proof_trace(
    form: FormKind,
    b: &[Endo],
    mus: &[Distribution],
    nus: &[Distribution],
) -> Result<Vec<CharacterVerdict<Element>>> {
    let g = check_lengths(b, mus, nus, b.len())?;
    let factors = (0..b.len())
        .map(|j| {
            let f = char_fn(&nus[j]).div(&char_fn(&mus[j]))?;
            let uses_u = !(form == FormKind::FormII && j == 2);
            Ok(Factor::new(j, f, uses_u, b[j].adjoint()))
        })
        .collect::<Result<Vec<_>>>()?;
    let eq = Equation::product(factors, None)?;
    let all = g.elements()?;
    let stride = all.len().div_ceil(PROOF_PARAM_LIMIT).max(1);
    let params: Vec<Element> = all.iter().step_by(stride).cloned().collect();
    let probe = Probe {
        params,
        us: all.clone(),
        vs: all,
    };
    extract_characters(&eq, &probe, 1e-9)
}

/// The ratio `nu^ / mu^` as a table, for inspection.
pub fn ratio_table(mu: &Distribution, nu: &Distribution) -> Result<FunctionTable<Group>> {
    char_fn(nu).div(&char_fn(mu))
}
