//! Pairs of distribution triples with equal joint laws where the shift conclusion fails.
//!
//! All constructions use the Poisson-type laws `e(lam E_x)` supported on the
//! cyclic subgroup generated by a kernel element.

use serde::Serialize;

use crate::dist::{poisson, Distribution};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::Element;

/// Two families of distributions whose joint laws agree.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub mus: Vec<Distribution>,
    pub nus: Vec<Distribution>,
    /// The kernel element the Poisson laws are built on.
    pub anchor: Element,
}

/// Summary of a counterexample check, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleCheck {
    pub anchor: Element,
    pub joint_residual: f64,
    /// Indices `j` (1-based) whose `nu_j` is not a shift of `mu_j`.
    pub non_shift_indices: Vec<usize>,
}

fn smallest_nonzero(kernel: Vec<Element>, what: &str) -> Result<Element> {
    kernel
        .into_iter()
        .find(|x| !x.is_zero())
        .ok_or_else(|| Error::CannotConstruct(format!("{what} is trivial")))
}

fn check_intensity(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::CannotConstruct(format!(
            "intensity must be positive, got {a}; at zero every law is degenerate"
        )))
    }
}

fn poisson_pair(b1: &Endo, b2: &Endo, a: f64) -> Result<(Element, [Distribution; 4])> {
    check_intensity(a)?;
    let g = b1.group();
    let x0 = smallest_nonzero(b1.sub(b2)?.kernel()?, "Ker(b1-b2)")?;
    Ok((
        x0.clone(),
        [
            poisson(g, 2.0 * a, &x0)?,
            poisson(g, 2.0 * a, &x0)?,
            poisson(g, a, &x0)?,
            poisson(g, 3.0 * a, &x0)?,
        ],
    ))
}

/// For `L1 = xi_1 + xi_2 + xi_3` with `Ker(b1 - b2) != 0`: `mu_1 = mu_2 = e(2a E_x0)`,
/// `nu_1 = e(a E_x0)`, `nu_2 = e(3a E_x0)` and `mu_3 = nu_3 = third`.
///
/// `x0` is the first nonzero kernel element in element order.
pub fn remark3_counterexample(
    b: &[Endo; 3],
    a: f64,
    third: &Distribution,
) -> Result<Counterexample> {
    if third.group() != b[0].group() {
        return Err(Error::Domain(
            "third distribution lives on another group".into(),
        ));
    }
    let (anchor, [m1, m2, n1, n2]) = poisson_pair(&b[0], &b[1], a)?;
    Ok(Counterexample {
        mus: vec![m1, m2, third.clone()],
        nus: vec![n1, n2, third.clone()],
        anchor,
    })
}

/// For `L1 = xi_1 + xi_2` with `Ker b3 != 0`: `mu_1 = nu_1` and `mu_2 = nu_2` are the
/// given laws, while `mu_3 = e(a E_g)` and `nu_3 = e(3a E_g)` live on `Ker b3`.
pub fn remark3_kernel_b3_counterexample(
    b: &[Endo; 3],
    a: f64,
    first: &Distribution,
    second: &Distribution,
) -> Result<Counterexample> {
    check_intensity(a)?;
    let g = b[2].group();
    if first.group() != g || second.group() != g {
        return Err(Error::Domain("distributions live on another group".into()));
    }
    let anchor = smallest_nonzero(b[2].kernel()?, "Ker b3")?;
    Ok(Counterexample {
        mus: vec![first.clone(), second.clone(), poisson(g, a, &anchor)?],
        nus: vec![first.clone(), second.clone(), poisson(g, 3.0 * a, &anchor)?],
        anchor,
    })
}

/// The two-variable version of [`remark3_counterexample`] for `L2 = b_1 xi_1 + b_2 xi_2`.
pub fn proposition1_counterexample(b1: &Endo, b2: &Endo, a: f64) -> Result<Counterexample> {
    let (anchor, [m1, m2, n1, n2]) = poisson_pair(b1, b2, a)?;
    Ok(Counterexample {
        mus: vec![m1, m2],
        nus: vec![n1, n2],
        anchor,
    })
}
