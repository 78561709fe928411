//! Splitting a ratio of characteristic functions into a character and a Gaussian modulus.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funceq::ops::{bernstein_defect, character_defect, Probing, MIN_WINDOW_MARGIN};
use crate::funceq::table::{FunctionTable, Window, VANISHING_EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianFitVerdict {
    /// `f = g exp(-sigma y^2)` with `g` a character, on the window.
    GaussianRatio,
    NotGaussianRatio,
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianFit {
    /// Positive when `f` decays, i.e. the `nu` side carries the extra Gaussian factor.
    pub sigma: f64,
    /// `sup |log|f(y)| + sigma y^2|` over the window.
    pub log_modulus_residual: f64,
    /// Character defect of the phase `f / |f|`.
    pub phase_defect: f64,
    pub phase_is_character: bool,
    pub phase_bernstein_defect: f64,
    pub verdict: GaussianFitVerdict,
}

fn as_f64(q: num_rational::Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Least-squares fit of `log|f(y)| = -sigma y^2` through the origin, plus a character test on the phase.
///
/// The sums run in window order so the fit is reproducible bit for bit.
pub fn fit_gaussian_ratio(f: &FunctionTable<Window>, tol: f64) -> Result<GaussianFit> {
    let window = f.domain();
    window.check_margin(MIN_WINDOW_MARGIN)?;
    if f.min_modulus() <= VANISHING_EPS {
        return Err(Error::Division("the ratio vanishes on the window".into()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (y, v) in f.iter() {
        let y2 = as_f64(y * y);
        num += y2 * v.norm().ln();
        den += y2 * y2;
    }
    let sigma = if den > 0.0 { -num / den } else { 0.0 };
    let log_modulus_residual = f
        .iter()
        .map(|(y, v)| (v.norm().ln() + sigma * as_f64(y * y)).abs())
        .fold(0.0, f64::max);
    let phase = f.map(|v| v / Complex64::new(v.norm(), 0.0));
    let phase_defect = character_defect(&phase)?;
    let phase_is_character = phase_defect < tol;
    let verdict = if log_modulus_residual <= tol && phase_is_character {
        GaussianFitVerdict::GaussianRatio
    } else {
        GaussianFitVerdict::NotGaussianRatio
    };
    Ok(GaussianFit {
        sigma,
        log_modulus_residual,
        phase_defect,
        phase_is_character,
        phase_bernstein_defect: bernstein_defect(&phase)?,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funceq::ops::bernstein_check;
    use crate::solenoid::{gaussian_table, make_lattice, SolenoidCharModel};
    use num_rational::Rational64;
    use proptest::prelude::*;

    #[test]
    fn round_trip() {
        let lat = make_lattice(&[2, 3, 5], 2, 60).unwrap();
        let m = SolenoidCharModel::from_deepest_phase(
            &[2, 3, 5],
            2,
            Rational64::new(3, 17),
            Rational64::new(7, 20),
        )
        .unwrap();
        let fit = fit_gaussian_ratio(&gaussian_table(&lat, &m).unwrap(), 1e-8).unwrap();
        assert!((fit.sigma - 0.35).abs() < 1e-9);
        assert_eq!(fit.verdict, GaussianFitVerdict::GaussianRatio);
    }

    #[test]
    fn constant_one() {
        let lat = make_lattice(&[3], 0, 12).unwrap();
        let f = FunctionTable::constant(lat.window().clone(), Complex64::new(1.0, 0.0));
        let fit = fit_gaussian_ratio(&f, 1e-8).unwrap();
        assert_eq!(fit.sigma, 0.0);
        assert!(fit.phase_is_character);
    }

    #[test]
    fn quartic_modulus_is_rejected() {
        let lat = make_lattice(&[2, 3], 1, 18).unwrap();
        let f = FunctionTable::from_fn(lat.window().clone(), |y| {
            let y = as_f64(*y);
            Complex64::new((-y.powi(4)).exp(), 0.0)
        });
        let fit = fit_gaussian_ratio(&f, 1e-8).unwrap();
        assert_eq!(fit.verdict, GaussianFitVerdict::NotGaussianRatio);
        assert!(fit.log_modulus_residual > 1e-3);
    }

    #[test]
    fn non_character_phase_is_rejected() {
        let lat = make_lattice(&[2, 3], 1, 18).unwrap();
        let f = FunctionTable::from_fn(lat.window().clone(), |y| {
            let y = as_f64(*y);
            Complex64::from_polar((-0.2 * y * y).exp(), y * y)
        });
        let fit = fit_gaussian_ratio(&f, 1e-8).unwrap();
        assert!(fit.log_modulus_residual < 1e-12);
        assert!(!fit.phase_is_character);
        assert_eq!(fit.verdict, GaussianFitVerdict::NotGaussianRatio);
    }

    #[test]
    fn narrow_window_is_a_margin_error() {
        let w = Window::symmetric(6, 2).unwrap();
        let f = FunctionTable::constant(w, Complex64::new(1.0, 0.0));
        assert!(matches!(
            fit_gaussian_ratio(&f, 1e-8),
            Err(Error::Margin(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fit_recovers_sigma_and_phase(p in 0i64..97, sn in 0i64..60, depth in 0usize..3) {
            let base = [2, 3, 5];
            let lat = make_lattice(&base, depth, 24).unwrap();
            let sigma = Rational64::new(sn, 40);
            let m = SolenoidCharModel::from_deepest_phase(&base, depth, Rational64::new(p, 97), sigma).unwrap();
            let table = gaussian_table(&lat, &m).unwrap();
            let fit = fit_gaussian_ratio(&table, 1e-8).unwrap();
            prop_assert!((fit.sigma - as_f64(sigma)).abs() < 1e-9);
            prop_assert_eq!(fit.verdict, GaussianFitVerdict::GaussianRatio);
            let phase = table.map(|v| v / Complex64::new(v.norm(), 0.0));
            prop_assert!(bernstein_check(&phase, 1e-9).unwrap());
            let again = fit_gaussian_ratio(&table, 1e-8).unwrap();
            prop_assert_eq!(fit.sigma.to_bits(), again.sigma.to_bits());
        }
    }
}
