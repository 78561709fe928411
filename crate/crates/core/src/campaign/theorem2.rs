//! Lattice campaigns for identifiability up to a Gaussian factor.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use super::{trial_seed, variant_name, MAX_LISTED_FAILURES};
use crate::error::{Error, Result};
use crate::fixture::show_rational;
use crate::solenoid::{
    make_lattice, rao4_instance, verify_rao4, Rao4Form, Rao4Verdict, SolenoidEndo,
};

#[derive(Clone, Debug)]
pub struct Theorem2Config {
    pub base: Vec<u64>,
    pub depth: usize,
    pub radius: i64,
    pub form: Rao4Form,
    pub coeffs: Vec<Rational64>,
    pub trials: usize,
    pub seed: u64,
    /// Tolerance for the window checks and for the recovered exponents.
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeEcho {
    pub base: Vec<u64>,
    pub depth: usize,
    pub radius: i64,
    pub form: Rao4Form,
    pub coeffs: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeTrial {
    pub index: usize,
    pub seed: u64,
    pub verdict: Rao4Verdict,
    /// Exponents used to build the instance, as exact rationals.
    pub planted_sigmas: Vec<String>,
    pub recovered_sigmas: Vec<f64>,
    pub max_sigma_error: f64,
    pub phases_are_characters: bool,
    pub product_residual: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversarialLatticeTrial {
    pub index: usize,
    pub seed: u64,
    pub verdict: Rao4Verdict,
    pub max_log_modulus_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem2Body {
    pub config: LatticeEcho,
    pub window: String,
    pub round_trip_passed: usize,
    pub adversarial_rejected: usize,
    pub max_sigma_error: f64,
    pub failures: Vec<String>,
    pub trials: Vec<LatticeTrial>,
    pub adversarial_trials: Vec<AdversarialLatticeTrial>,
    pub passed: bool,
}

fn endos(cfg: &Theorem2Config) -> Result<[SolenoidEndo; 4]> {
    if cfg.coeffs.len() != 4 {
        return Err(Error::Domain(format!(
            "four coefficients are needed, got {}",
            cfg.coeffs.len()
        )));
    }
    let v = cfg
        .coeffs
        .iter()
        .map(|r| SolenoidEndo::new(&cfg.base, *r))
        .collect::<Result<Vec<_>>>()?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// Runs `trials` Gaussian round trips and as many trials with a quartic modulus bend.
pub fn run_theorem2(cfg: &Theorem2Config) -> Result<Theorem2Body> {
    if cfg.trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {}",
            cfg.tol
        )));
    }
    let lat = make_lattice(&cfg.base, cfg.depth, cfg.radius)?;
    let b = endos(cfg)?;

    let trials: Vec<LatticeTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(cfg.seed, index);
            let inst = rao4_instance(&lat, cfg.form, &b, seed, false)?;
            let rep = verify_rao4(cfg.form, &b, &inst.muhats, &inst.nuhats, cfg.tol)?;
            let recovered: Vec<f64> = rep.fits.iter().map(|f| f.sigma).collect();
            let max_sigma_error = recovered
                .iter()
                .zip(&inst.sigmas)
                .map(|(got, want)| (got - *want.numer() as f64 / *want.denom() as f64).abs())
                .fold(0.0, f64::max);
            let phases = rep.fits.iter().all(|f| f.phase_is_character);
            let mut failures = rep.failures.clone();
            if max_sigma_error >= cfg.tol {
                failures.push(format!("exponent error {max_sigma_error:e}"));
            }
            Ok(LatticeTrial {
                index,
                seed,
                verdict: rep.verdict,
                planted_sigmas: inst.sigmas.iter().map(|s| show_rational(*s)).collect(),
                recovered_sigmas: recovered,
                max_sigma_error,
                phases_are_characters: phases,
                product_residual: rep.product_residual,
                passed: rep.verdict == Rao4Verdict::DeterminedUpToGaussian
                    && failures.is_empty()
                    && phases,
                failures,
            })
        })
        .collect::<Result<_>>()?;

    let adversarial_trials: Vec<AdversarialLatticeTrial> = (0..cfg.trials)
        .into_par_iter()
        .map(|index| {
            let seed = trial_seed(cfg.seed, cfg.trials + index);
            let inst = rao4_instance(&lat, cfg.form, &b, seed, true)?;
            let rep = verify_rao4(cfg.form, &b, &inst.muhats, &inst.nuhats, cfg.tol)?;
            Ok(AdversarialLatticeTrial {
                index,
                seed,
                verdict: rep.verdict,
                max_log_modulus_residual: rep
                    .fits
                    .iter()
                    .map(|f| f.log_modulus_residual)
                    .fold(0.0, f64::max),
                passed: rep.verdict == Rao4Verdict::NotDetermined,
            })
        })
        .collect::<Result<_>>()?;

    let mut failures: Vec<String> = trials
        .iter()
        .filter(|t| !t.passed)
        .map(|t| format!("round trip {}: {}", t.index, t.failures.join("; ")))
        .collect();
    failures.extend(adversarial_trials.iter().filter(|t| !t.passed).map(|t| {
        format!(
            "adversarial {}: verdict {}",
            t.index,
            variant_name(&t.verdict)
        )
    }));
    failures.truncate(MAX_LISTED_FAILURES);
    let round_trip_passed = trials.iter().filter(|t| t.passed).count();
    let adversarial_rejected = adversarial_trials.iter().filter(|t| t.passed).count();
    Ok(Theorem2Body {
        config: LatticeEcho {
            base: cfg.base.clone(),
            depth: cfg.depth,
            radius: cfg.radius,
            form: cfg.form,
            coeffs: cfg.coeffs.iter().map(|r| show_rational(*r)).collect(),
            trials: cfg.trials,
            seed: cfg.seed,
            tol: cfg.tol,
        },
        window: lat.window().to_string(),
        max_sigma_error: trials.iter().map(|t| t.max_sigma_error).fold(0.0, f64::max),
        passed: round_trip_passed == cfg.trials && adversarial_rejected == cfg.trials,
        round_trip_passed,
        adversarial_rejected,
        failures,
        trials,
        adversarial_trials,
    })
}
