use proptest::prelude::*;

use rao_core::campaign::theorem1::{run_theorem1, Theorem1Config, Theorem1Form};
use rao_core::identify::Verdict;
use rao_core::{Endo, Group};

fn config(
    g: &Group,
    form: Theorem1Form,
    coeffs: Option<Vec<Endo>>,
    seed: u64,
    negative: bool,
) -> Theorem1Config {
    Theorem1Config {
        group: g.clone(),
        form,
        coeffs,
        trials: 4,
        seed,
        tol: 1e-8,
        expect_negative: negative,
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiplication by `c` is injective on `Z_n` exactly when `c` is a unit.
fn unit(c: i64, n: u64) -> bool {
    gcd(c.rem_euclid(n as i64) as u64, n) == 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Any admissible scalar triple on a cyclic group recovers the planted shifts.
    #[test]
    fn admissible_form_i_recovers_shifts(n in prop::sample::select(vec![5u64, 7, 9]), c in prop::array::uniform3(0u64..9), seed in 0u64..1000) {
        let c = c.map(|x| x % n);
        let admissible = (0..3).all(|i| (i + 1..3).all(|j| unit(c[i] as i64 - c[j] as i64, n)));
        prop_assume!(admissible);
        let g = Group::cyclic(n).unwrap();
        let coeffs = c.iter().map(|&x| Endo::scalar(&g, x as i64)).collect();
        let body = run_theorem1(&config(&g, Theorem1Form::FormI, Some(coeffs), seed, false)).unwrap();
        prop_assert!(body.passed, "{:?}", body.failures);
        prop_assert!(body.trials.iter().all(|t| t.verdict == Verdict::DeterminedUpToShift && t.shifts_exact));
        prop_assert!(body.adversarial_trials.iter().all(|t| t.verdict == Verdict::Mismatch));
    }

    /// A kernel condition that fails is always reported, never papered over with a shift.
    #[test]
    fn kernel_violations_are_reported(c in prop::array::uniform3(0u64..6), seed in 0u64..1000) {
        let n = 6;
        let form_ii_ok = unit(c[0] as i64 - c[1] as i64, n) && unit(c[2] as i64, n);
        prop_assume!(!form_ii_ok);
        let g = Group::cyclic(n).unwrap();
        let coeffs = c.iter().map(|&x| Endo::scalar(&g, x as i64)).collect();
        let body = run_theorem1(&config(&g, Theorem1Form::FormII, Some(coeffs), seed, true)).unwrap();
        prop_assert!(body.passed, "{:?}", body.failures);
        prop_assert!(body.trials.iter().all(|t| t.verdict == Verdict::PreconditionsViolated));
    }
}

#[test]
fn no_admissible_form_i_coefficients_on_z4_by_z3() {
    let g: Group = "4x3".parse().unwrap();
    let body = run_theorem1(&config(&g, Theorem1Form::FormI, None, 0, false)).unwrap();
    assert!(body.coefficient_source.starts_with("fallback"));
    assert!(body
        .trials
        .iter()
        .all(|t| t.verdict == Verdict::PreconditionsViolated));
    assert!(!body.passed);
}
