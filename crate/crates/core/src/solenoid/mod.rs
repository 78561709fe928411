//! The discrete dual `H_a = { m / (a_0 a_1 ... a_n) }` of an a-adic solenoid,
//! modeled on finite symmetric windows with exact rational points.
//!
//! The solenoid itself is never built. Characters of `H_a` are described by a
//! compatible sequence of phases and endomorphisms by multiplication with an
//! admissible rational.

pub mod fit;
pub mod verify;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funceq::ops::MIN_WINDOW_MARGIN;
use crate::funceq::table::{FunctionTable, Scaling, Window};

pub use fit::{fit_gaussian_ratio, GaussianFit, GaussianFitVerdict};
pub use verify::{
    rao4_instance, sigma_nullspace, verify_rao4, verify_rao4_form_i, verify_rao4_form_ii, Rao4Form,
    Rao4Instance, Rao4Report, Rao4Verdict,
};

/// Safety factor between the window radius and the margin the difference tests consume.
pub const LATTICE_MARGIN_FACTOR: i64 = 4;

/// Smallest admissible radius for [`make_lattice`].
pub const MIN_LATTICE_RADIUS: i64 = LATTICE_MARGIN_FACTOR * MIN_WINDOW_MARGIN;

/// `{ m / (a_0 ... a_depth) : |m| <= radius }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalLattice {
    base: Vec<u64>,
    depth: usize,
    radius: i64,
    #[serde(skip)]
    window: Window,
}

/// Product `a_0 ... a_depth`, failing on overflow.
pub fn denominator(base: &[u64], depth: usize) -> Result<i64> {
    base[..=depth].iter().try_fold(1i64, |acc, &a| {
        i64::try_from(a)
            .ok()
            .and_then(|a| acc.checked_mul(a))
            .ok_or_else(|| Error::Domain(format!("denominator of depth {depth} overflows")))
    })
}

/// Builds the lattice window, checking the base and the margin.
pub fn make_lattice(base: &[u64], depth: usize, radius: i64) -> Result<RationalLattice> {
    if base.is_empty() {
        return Err(Error::Domain("the base sequence is empty".into()));
    }
    if let Some(a) = base.iter().find(|&&a| a < 2) {
        return Err(Error::Domain(format!(
            "base entries must be at least 2, got {a}"
        )));
    }
    if depth >= base.len() {
        return Err(Error::Domain(format!(
            "depth {depth} needs at least {} base entries, got {}",
            depth + 1,
            base.len()
        )));
    }
    if radius < MIN_LATTICE_RADIUS {
        return Err(Error::Margin(format!(
            "radius {radius} is below the minimum {MIN_LATTICE_RADIUS} needed by the difference tests"
        )));
    }
    let window = Window::symmetric(denominator(base, depth)?, radius)?;
    Ok(RationalLattice {
        base: base.to_vec(),
        depth,
        radius,
        window,
    })
}

impl RationalLattice {
    pub fn base(&self) -> &[u64] {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn denom(&self) -> i64 {
        self.window.denom()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn points(&self) -> Vec<Rational64> {
        (-self.radius..=self.radius)
            .map(|m| Rational64::new(m, self.denom()))
            .collect()
    }
}

impl fmt::Display for RationalLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base: Vec<String> = self.base.iter().map(u64::to_string).collect();
        write!(
            f,
            "H_({}) depth {} radius {}",
            base.join(","),
            self.depth,
            self.radius
        )
    }
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: Rational64) -> Rational64 {
    q - q.floor()
}

/// A Gaussian characteristic function `y -> c(y) exp(-sigma y^2)` on `H_a`.
///
/// The character `c` is stored as phases `r_0, ..., r_n` in `[0, 1)` with
/// `c(1 / (a_0 ... a_k)) = exp(2 pi i r_k)`. Since `1/(a_0..a_k) = a_{k+1} / (a_0..a_{k+1})`,
/// consecutive phases satisfy `r_k = a_{k+1} r_{k+1} (mod 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidCharModel {
    base: Vec<u64>,
    phases: Vec<Rational64>,
    sigma: Rational64,
}

impl SolenoidCharModel {
    /// Derives the coarser phases from the deepest one, `r_depth`.
    pub fn from_deepest_phase(
        base: &[u64],
        depth: usize,
        phase: Rational64,
        sigma: Rational64,
    ) -> Result<Self> {
        if depth >= base.len() {
            return Err(Error::Domain(format!(
                "depth {depth} exceeds the base length {}",
                base.len()
            )));
        }
        if sigma.is_negative() {
            return Err(Error::Domain(format!(
                "sigma must be nonnegative, got {sigma}"
            )));
        }
        let mut phases = vec![Rational64::zero(); depth + 1];
        phases[depth] = frac(phase);
        for k in (0..depth).rev() {
            phases[k] = frac(phases[k + 1] * Rational64::from_integer(base[k + 1] as i64));
        }
        Ok(Self {
            base: base.to_vec(),
            phases,
            sigma,
        })
    }

    /// The character `y -> exp(2 pi i t y)` restricted to `H_a` up to `depth`.
    pub fn from_frequency(
        base: &[u64],
        depth: usize,
        t: Rational64,
        sigma: Rational64,
    ) -> Result<Self> {
        let d = denominator(base, depth)?;
        Self::from_deepest_phase(base, depth, t / Rational64::from_integer(d), sigma)
    }

    /// Checks the stored phases against the base; always holds for values built here.
    pub fn phases_compatible(&self) -> bool {
        self.phases
            .iter()
            .all(|r| *r >= Rational64::zero() && *r < Rational64::from_integer(1))
            && self.phases.windows(2).enumerate().all(|(k, w)| {
                frac(w[1] * Rational64::from_integer(self.base[k + 1] as i64)) == w[0]
            })
    }

    pub fn phases(&self) -> &[Rational64] {
        &self.phases
    }

    pub fn depth(&self) -> usize {
        self.phases.len() - 1
    }

    pub fn sigma(&self) -> Rational64 {
        self.sigma
    }

    /// Exact phase of `c(y)` in `[0, 1)` for `y` on the grid of `depth`.
    pub fn phase_at(&self, y: Rational64) -> Result<Rational64> {
        let d = denominator(&self.base, self.depth())?;
        let m = y * Rational64::from_integer(d);
        if !m.is_integer() {
            return Err(Error::Domain(format!(
                "{y} is not on the depth-{} grid",
                self.depth()
            )));
        }
        Ok(frac(m * self.phases[self.depth()]))
    }

    /// Exponent `sigma y^2` of the modulus, in exact arithmetic.
    pub fn exponent_at(&self, y: Rational64) -> Rational64 {
        self.sigma * y * y
    }

    pub fn value_at(&self, y: Rational64) -> Result<Complex64> {
        let phase = self.phase_at(y)?;
        let e = self.exponent_at(y);
        let modulus = (-(*e.numer() as f64) / *e.denom() as f64).exp();
        Ok(Complex64::from_polar(
            modulus,
            TAU * (*phase.numer() as f64) / *phase.denom() as f64,
        ))
    }
}

/// The table of `model` on the lattice window.
pub fn gaussian_table(
    lat: &RationalLattice,
    model: &SolenoidCharModel,
) -> Result<FunctionTable<Window>> {
    if model.depth() < lat.depth() || model.base[..=lat.depth()] != lat.base[..=lat.depth()] {
        return Err(Error::Domain(format!(
            "the character model does not cover {lat}"
        )));
    }
    let values = lat
        .points()
        .into_iter()
        .map(|y| model.value_at(y))
        .collect::<Result<Vec<_>>>()?;
    FunctionTable::new(lat.window.clone(), values)
}

/// Multiplication by an admissible rational `p/q` on `H_a`, where `q` divides some `a_0 ... a_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolenoidEndo {
    ratio: Rational64,
}

impl SolenoidEndo {
    pub fn new(base: &[u64], ratio: Rational64) -> Result<Self> {
        let q = *ratio.denom();
        let admissible = (0..base.len()).any(|k| denominator(base, k).is_ok_and(|d| d % q == 0));
        if !admissible {
            return Err(Error::Domain(format!(
                "multiplication by {ratio} does not preserve H_a: {q} divides no partial product of the base"
            )));
        }
        Ok(Self { ratio })
    }

    pub fn integer(c: i64) -> Self {
        Self {
            ratio: Rational64::from_integer(c),
        }
    }

    pub fn ratio(&self) -> Rational64 {
        self.ratio
    }

    /// The action on tables; multiplication is its own adjoint.
    pub fn scaling(&self) -> Scaling {
        Scaling(self.ratio)
    }

    /// Multiplication by a rational is injective exactly when the rational is nonzero.
    pub fn has_trivial_kernel(&self) -> bool {
        !self.ratio.is_zero()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            ratio: self.ratio - other.ratio,
        }
    }
}

impl fmt::Display for SolenoidEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.ratio)
    }
}

/// Least common multiple of the coefficient denominators.
pub fn common_denominator(b: &[SolenoidEndo]) -> i64 {
    b.iter().fold(1, |acc, e| acc.lcm(e.ratio.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funceq::ops::is_character;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn lattice_construction() {
        let lat = make_lattice(&[2, 3, 2], 2, 12).unwrap();
        assert_eq!(lat.denom(), 12);
        let pts = lat.points();
        assert_eq!(pts.len(), 25);
        assert_eq!(pts[0], r(-1, 1));
        assert!(pts.contains(&Rational64::zero()));
        assert!(pts.iter().all(|p| pts.contains(&-p)));
        assert_eq!(make_lattice(&[5, 3], 0, 12).unwrap().denom(), 5);
        assert!(matches!(make_lattice(&[2, 3], 0, 0), Err(Error::Margin(_))));
        assert!(matches!(
            make_lattice(&[2, 1], 1, 12),
            Err(Error::Domain(_))
        ));
        assert!(make_lattice(&[2, 3], 2, 12).is_err());
    }

    #[test]
    fn phase_chain() {
        let base = [2, 3, 5];
        let m =
            SolenoidCharModel::from_deepest_phase(&base, 2, r(7, 11), Rational64::zero()).unwrap();
        assert!(m.phases_compatible());
        assert_eq!(m.phases()[1], frac(r(35, 11)));
        assert_eq!(m.phases()[0], frac(r(3 * 35, 11)));
        // c(1) computed at depth 0 agrees with the deepest phase: 1 = 30 / 30
        let lat = make_lattice(&base, 2, 60).unwrap();
        let t = gaussian_table(&lat, &m).unwrap();
        let via_chain = {
            let p = frac(m.phases()[0] * Rational64::from_integer(2));
            Complex64::from_polar(1.0, TAU * *p.numer() as f64 / *p.denom() as f64)
        };
        assert!((t.at(&r(1, 1)).unwrap() - via_chain).norm() < 1e-12);
        assert!(is_character(&t, 1e-9).unwrap());
    }

    #[test]
    fn half_phase_at_depth_zero() {
        let m =
            SolenoidCharModel::from_deepest_phase(&[2], 0, r(1, 2), Rational64::zero()).unwrap();
        let lat = make_lattice(&[2], 0, 12).unwrap();
        let t = gaussian_table(&lat, &m).unwrap();
        assert!((t.at(&r(1, 2)).unwrap() + Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((t.at(&r(1, 1)).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gaussian_table_examples() {
        let lat = make_lattice(&[2, 3], 1, 24).unwrap();
        let one = SolenoidCharModel::from_deepest_phase(
            &[2, 3],
            1,
            Rational64::zero(),
            Rational64::zero(),
        )
        .unwrap();
        let t = gaussian_table(&lat, &one).unwrap();
        assert!(t
            .values()
            .iter()
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let g = SolenoidCharModel::from_deepest_phase(&[2, 3], 1, r(1, 5), r(1, 1)).unwrap();
        let t = gaussian_table(&lat, &g).unwrap();
        assert!((t.at(&r(1, 2)).unwrap().norm() - (-0.25f64).exp()).abs() < 1e-15);
        assert!(t.ratio_invariant_defect().unwrap() < 1e-12);
        assert!(SolenoidCharModel::from_deepest_phase(&[2, 3], 1, r(1, 5), r(-1, 1)).is_err());
    }

    #[test]
    fn gaussian_exponent_parallelogram_law() {
        let lat = make_lattice(&[2, 3, 5], 2, 30).unwrap();
        let m = SolenoidCharModel::from_deepest_phase(&[2, 3, 5], 2, r(2, 7), r(7, 20)).unwrap();
        let pts = lat.points();
        let bound = Rational64::from_integer(1);
        for &u in &pts {
            for &v in &pts {
                if (u + v).abs() <= bound && (u - v).abs() <= bound {
                    let lhs = m.exponent_at(u + v) + m.exponent_at(u - v);
                    let rhs = Rational64::from_integer(2) * (m.exponent_at(u) + m.exponent_at(v));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn endo_admissibility() {
        let base = [2, 3, 5];
        assert!(SolenoidEndo::new(&base, r(1, 6)).is_ok());
        assert!(SolenoidEndo::new(&base, r(5, 30)).is_ok());
        assert!(SolenoidEndo::new(&base, r(1, 7)).is_err());
        assert!(SolenoidEndo::new(&base, r(1, 4)).is_err());
        assert!(!SolenoidEndo::integer(0).has_trivial_kernel());
        assert!(SolenoidEndo::integer(3)
            .sub(&SolenoidEndo::integer(2))
            .has_trivial_kernel());
        assert_eq!(
            common_denominator(&[
                SolenoidEndo::new(&base, r(1, 2)).unwrap(),
                SolenoidEndo::new(&base, r(1, 3)).unwrap()
            ]),
            6
        );
    }
}
