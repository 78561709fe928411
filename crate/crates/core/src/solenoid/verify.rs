//! Four-summand identifiability up to a Gaussian factor, checked on a lattice window.
//!
//! A positive verdict means every check passed on the finite window; it is an
//! instance check, not a proof for the whole of `H_a`.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funceq::equation::{
    extract_characters, lemma1_check, CharacterVerdict, Equation, Factor, Lemma1Report, Probe,
};
use crate::funceq::table::{FunctionTable, Window, VANISHING_EPS};
use crate::solenoid::fit::{fit_gaussian_ratio, GaussianFit, GaussianFitVerdict};
use crate::solenoid::{
    common_denominator, gaussian_table, RationalLattice, SolenoidCharModel, SolenoidEndo,
};

/// Tolerance on the sigma moment cross-check.
pub const MOMENT_TOL: f64 = 1e-8;

/// Largest number of lattice steps (in units of the coefficient denominator) probed on each side of 0.
pub const MAX_PROBE_STEPS: i64 = 6;

/// Parameter values tried for each elimination, in units of the coefficient denominator.
pub const CASCADE_PARAM_STEPS: [i64; 3] = [-1, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rao4Form {
    /// `L1 = xi_1 + xi_2 + xi_3 + xi_4`.
    FormI,
    /// `L1 = xi_1 + xi_2 + xi_3`; the fourth summand appears in `L2` only.
    FormII,
}

impl Rao4Form {
    fn uses_u(self, j: usize) -> bool {
        !(self == Rao4Form::FormII && j == 3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rao4Verdict {
    DeterminedUpToGaussian,
    NotDetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rao4Report {
    pub form: Rao4Form,
    pub coefficients: Vec<String>,
    pub window: String,
    /// Evaluation points per side and parameter values used by the cascades.
    pub probe_points: usize,
    pub probe_params: usize,
    pub product_residual: f64,
    pub modulus_degrees: Lemma1Report,
    pub fits: Vec<GaussianFit>,
    pub phase_cascade: Vec<CharacterVerdict<Rational64>>,
    /// `sum sigma_j`, `sum sigma_j b_j`, `sum sigma_j b_j^2` (with the fourth term adapted to the form).
    pub sigma_moments: Vec<f64>,
    pub moments_consistent: bool,
    pub verdict: Rao4Verdict,
    pub failures: Vec<String>,
}

/// Weights `w_j = 1 / prod_{i != j} (b_j - b_i)`.
///
/// They annihilate `1, b, ..., b^(n-2)` and give `sum w_j b_j^(n-1) = 1`, so for
/// `n = 4` they span the sigmas with `sum sigma_j (u + b_j v)^2 = 0`.
pub fn sigma_nullspace(b: &[Rational64]) -> Result<Vec<Rational64>> {
    b.iter()
        .enumerate()
        .map(|(j, bj)| {
            let prod = b
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != j)
                .fold(Rational64::one(), |acc, (_, bi)| acc * (bj - bi));
            if prod.is_zero() {
                Err(Error::Precondition(
                    "coefficients must be pairwise distinct".into(),
                ))
            } else {
                Ok(prod.recip())
            }
        })
        .collect()
}

fn to_f64(q: Rational64) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn check_preconditions(form: Rao4Form, b: &[SolenoidEndo]) -> Result<()> {
    let distinct = match form {
        Rao4Form::FormI => 4,
        Rao4Form::FormII => 3,
    };
    for i in 0..distinct {
        for j in i + 1..distinct {
            if !b[i].sub(&b[j]).has_trivial_kernel() {
                return Err(Error::Precondition(format!(
                    "b{} - b{} = {} has a nontrivial kernel",
                    i + 1,
                    j + 1,
                    b[i].sub(&b[j])
                )));
            }
        }
    }
    if form == Rao4Form::FormII && !b[3].has_trivial_kernel() {
        return Err(Error::Precondition("b4 has a nontrivial kernel".into()));
    }
    Ok(())
}

/// Probe points and parameters on multiples of `q / D`, so every coefficient keeps them on the grid.
fn cascade_probe(form: Rao4Form, b: &[SolenoidEndo], window: &Window) -> Result<Probe<Rational64>> {
    let q = common_denominator(b);
    let radius = window.hi().min(-window.lo());
    let abs: Vec<Rational64> = b.iter().map(|e| e.ratio().abs()).collect();
    let reach = abs
        .iter()
        .copied()
        .fold(Rational64::zero(), Rational64::max);
    let mut stride = Rational64::one();
    for i in 0..4 {
        for j in i + 1..4 {
            if form.uses_u(i) && form.uses_u(j) {
                stride = stride.max((b[i].ratio() - b[j].ratio()).abs());
            }
        }
    }
    if form == Rao4Form::FormII {
        stride = stride.max(abs[3]);
    }
    let max_param = CASCADE_PARAM_STEPS
        .iter()
        .map(|s| s.abs())
        .max()
        .unwrap_or(0)
        * q;
    let budget =
        Rational64::from_integer(radius) - stride * Rational64::from_integer(3 * max_param);
    let per_step = (Rational64::one() + reach) * Rational64::from_integer(q);
    let steps = if budget.is_positive() {
        (budget / per_step)
            .floor()
            .to_integer()
            .min(MAX_PROBE_STEPS)
    } else {
        0
    };
    if steps < 1 {
        return Err(Error::Margin(format!(
            "window {window} is too narrow for three eliminations with coefficients {}",
            b.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let d = window.denom();
    let point = |m: i64| Rational64::new(m * q, d);
    Ok(Probe {
        params: CASCADE_PARAM_STEPS.iter().map(|&s| point(s)).collect(),
        us: (-steps..=steps).map(point).collect(),
        vs: (-steps..=steps).map(point).collect(),
    })
}

fn build_equation(
    form: Rao4Form,
    b: &[SolenoidEndo],
    tables: Vec<FunctionTable<Window>>,
    sum: bool,
) -> Result<Equation<Window>> {
    let factors = tables
        .into_iter()
        .enumerate()
        .map(|(j, t)| Factor::new(j, t, form.uses_u(j), b[j].scaling()))
        .collect();
    if sum {
        Equation::sum(factors, None)
    } else {
        Equation::product(factors, None)
    }
}

fn sigma_moments(form: Rao4Form, b: &[SolenoidEndo], sigmas: &[f64]) -> Vec<f64> {
    let bf: Vec<f64> = b.iter().map(|e| to_f64(e.ratio())).collect();
    (0..3)
        .map(|k| {
            (0..4)
                .map(|j| {
                    if form.uses_u(j) {
                        sigmas[j] * bf[j].powi(k)
                    } else if k == 2 {
                        sigmas[j] * bf[j] * bf[j]
                    } else {
                        0.0
                    }
                })
                .sum()
        })
        .collect()
}

/// Checks that `nu_j^ / mu_j^` splits as a character times a Gaussian modulus for every `j`.
pub fn verify_rao4(
    form: Rao4Form,
    b: &[SolenoidEndo; 4],
    muhats: &[FunctionTable<Window>],
    nuhats: &[FunctionTable<Window>],
    tol: f64,
) -> Result<Rao4Report> {
    if muhats.len() != 4 || nuhats.len() != 4 {
        return Err(Error::Domain(format!(
            "four characteristic functions per side are needed, got {} and {}",
            muhats.len(),
            nuhats.len()
        )));
    }
    let window = muhats[0].domain().clone();
    if muhats.iter().chain(nuhats).any(|t| t.domain() != &window) {
        return Err(Error::Domain("all tables must share one window".into()));
    }
    check_preconditions(form, b)?;
    for (side, tables) in [("mu", muhats), ("nu", nuhats)] {
        if let Some(j) = tables.iter().position(|t| t.min_modulus() <= VANISHING_EPS) {
            return Err(Error::Precondition(format!(
                "{side}_{} vanishes on the window",
                j + 1
            )));
        }
    }
    let probe = cascade_probe(form, b, &window)?;

    let ratios: Vec<FunctionTable<Window>> = muhats
        .iter()
        .zip(nuhats)
        .map(|(m, n)| n.div(m))
        .collect::<Result<_>>()?;
    let product = build_equation(form, b, ratios.clone(), false)?;
    let product_residual = product.residual(&probe.us, &probe.vs)?;

    let logs = ratios
        .iter()
        .map(|f| f.map(|v| Complex64::new(v.norm().ln(), 0.0)))
        .collect();
    let modulus_degrees = lemma1_check(&build_equation(form, b, logs, true)?, &probe, tol)?;

    let fits: Vec<GaussianFit> = ratios
        .iter()
        .map(|f| fit_gaussian_ratio(f, tol))
        .collect::<Result<_>>()?;
    let phases = ratios
        .iter()
        .map(|f| f.map(|v| v / Complex64::new(v.norm(), 0.0)))
        .collect();
    let phase_cascade = extract_characters(&build_equation(form, b, phases, false)?, &probe, tol)?;

    let sigmas: Vec<f64> = fits.iter().map(|f| f.sigma).collect();
    let moments = sigma_moments(form, b, &sigmas);
    let moments_consistent = moments.iter().all(|m| m.abs() < MOMENT_TOL);

    let mut failures = Vec::new();
    if product_residual >= tol {
        failures.push(format!(
            "product equation fails on the window (residual {product_residual:e})"
        ));
    }
    for (j, d) in modulus_degrees.degrees.iter().enumerate() {
        match d {
            Some(d) if *d <= 2 => {}
            Some(d) => failures.push(format!("log|f_{}| has degree {d}", j + 1)),
            None => failures.push(format!(
                "log|f_{}| is not a polynomial of degree <= 2",
                j + 1
            )),
        }
    }
    for (j, fit) in fits.iter().enumerate() {
        if fit.verdict == GaussianFitVerdict::NotGaussianRatio {
            failures.push(format!(
                "f_{} is not a Gaussian ratio (log-modulus residual {:e}, phase defect {:e})",
                j + 1,
                fit.log_modulus_residual,
                fit.phase_defect
            ));
        }
    }
    let verdict = if failures.is_empty() {
        Rao4Verdict::DeterminedUpToGaussian
    } else {
        Rao4Verdict::NotDetermined
    };
    Ok(Rao4Report {
        form,
        coefficients: b.iter().map(|e| e.ratio().to_string()).collect(),
        window: window.to_string(),
        probe_points: probe.us.len(),
        probe_params: probe.params.len(),
        product_residual,
        modulus_degrees,
        fits,
        phase_cascade,
        sigma_moments: moments,
        moments_consistent,
        verdict,
        failures,
    })
}

pub fn verify_rao4_form_i(
    b: &[SolenoidEndo; 4],
    muhats: &[FunctionTable<Window>],
    nuhats: &[FunctionTable<Window>],
    tol: f64,
) -> Result<Rao4Report> {
    verify_rao4(Rao4Form::FormI, b, muhats, nuhats, tol)
}

pub fn verify_rao4_form_ii(
    b: &[SolenoidEndo; 4],
    muhats: &[FunctionTable<Window>],
    nuhats: &[FunctionTable<Window>],
    tol: f64,
) -> Result<Rao4Report> {
    verify_rao4(Rao4Form::FormII, b, muhats, nuhats, tol)
}

/// A generated pair of Gaussian families with equal joint characteristic functions.
#[derive(Clone, Debug)]
pub struct Rao4Instance {
    pub form: Rao4Form,
    pub b: [SolenoidEndo; 4],
    pub muhats: Vec<FunctionTable<Window>>,
    pub nuhats: Vec<FunctionTable<Window>>,
    /// Exponents of the ratios `nu_j^ / mu_j^`.
    pub sigmas: Vec<Rational64>,
    /// Frequencies `t_j` of the ratio characters `y -> exp(2 pi i t_j y)`.
    pub frequencies: Vec<Rational64>,
}

fn random_rational<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational64 {
    Rational64::new(
        rng.random_range(-max_num..=max_num),
        rng.random_range(1..=max_den),
    )
}

/// Builds `mu_j` and `nu_j = mu_j * gamma_j` (or the reverse, when `sigma_j < 0`) whose
/// joint characteristic functions agree; `perturb` bends the modulus of `nu_1` by
/// `exp(-y^4 / 20)` so that no Gaussian factorization exists.
pub fn rao4_instance(
    lat: &RationalLattice,
    form: Rao4Form,
    b: &[SolenoidEndo; 4],
    seed: u64,
    perturb: bool,
) -> Result<Rao4Instance> {
    check_preconditions(form, b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r: Vec<Rational64> = b.iter().map(SolenoidEndo::ratio).collect();
    let scale = Rational64::new(rng.random_range(1..=8), 20);

    let sigmas: Vec<Rational64> = match form {
        Rao4Form::FormI => {
            let w = sigma_nullspace(&r)?;
            let top = w
                .iter()
                .map(|x| x.abs())
                .fold(Rational64::zero(), Rational64::max);
            w.iter().map(|x| scale * x / top).collect()
        }
        Rao4Form::FormII => {
            let w = sigma_nullspace(&r[..3])?;
            let top = w
                .iter()
                .map(|x| x.abs())
                .fold(Rational64::zero(), Rational64::max);
            let mut s: Vec<Rational64> = w.iter().map(|x| scale * x / top).collect();
            let quad: Rational64 = s.iter().zip(&r).map(|(sj, bj)| sj * bj * bj).sum();
            s.push(-quad / (r[3] * r[3]));
            s
        }
    };

    let t1 = random_rational(&mut rng, 6, 5);
    let t2 = random_rational(&mut rng, 6, 5);
    let frequencies = match form {
        Rao4Form::FormI => {
            let a = -(t1 + t2);
            let c = -(r[0] * t1 + r[1] * t2);
            let t4 = (c - r[2] * a) / (r[3] - r[2]);
            vec![t1, t2, a - t4, t4]
        }
        Rao4Form::FormII => {
            let t3 = -(t1 + t2);
            let t4 = -(r[0] * t1 + r[1] * t2 + r[2] * t3) / r[3];
            vec![t1, t2, t3, t4]
        }
    };

    let base = lat.base();
    let depth = lat.depth();
    let mut muhats = Vec::with_capacity(4);
    let mut nuhats = Vec::with_capacity(4);
    for j in 0..4 {
        let extra = Rational64::new(rng.random_range(1..=5), 10);
        let mu_sigma = (-sigmas[j]).max(Rational64::zero()) + extra;
        let mu_freq = random_rational(&mut rng, 6, 5);
        let mu = SolenoidCharModel::from_frequency(base, depth, mu_freq, mu_sigma)?;
        let nu = SolenoidCharModel::from_frequency(
            base,
            depth,
            mu_freq + frequencies[j],
            mu_sigma + sigmas[j],
        )?;
        muhats.push(gaussian_table(lat, &mu)?);
        nuhats.push(gaussian_table(lat, &nu)?);
    }
    if perturb {
        nuhats[0] = FunctionTable::from_fn(lat.window().clone(), |y| {
            let yf = to_f64(*y);
            nuhats[0].at(y).unwrap_or_default() * (-yf.powi(4) / 20.0).exp()
        });
    }
    Ok(Rao4Instance {
        form,
        b: *b,
        muhats,
        nuhats,
        sigmas,
        frequencies,
    })
}
