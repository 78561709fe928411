//! Difference operators and the pointwise tests built on them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funceq::table::{Domain, FunctionTable, Window};
use crate::group::{Element, Group};

/// Grid steps used when probing polynomiality on a rational window.
pub const WINDOW_DIFFERENCE_STEPS: [i64; 3] = [1, 2, 3];

/// Grid points each side of 0 a window must hold before multiplicative tests run on it.
pub const MIN_WINDOW_MARGIN: i64 = 3;

/// Domain-specific knobs for the pointwise tests.
pub trait Probing: Domain {
    /// The shifts `h` tried by [`is_polynomial`].
    fn difference_steps(&self) -> Vec<Self::Point>;

    /// Fails unless the domain leaves room for `needed` grid points around 0.
    fn check_margin(&self, needed: i64) -> Result<()>;

    /// The `x` with `f = (x, .)`, where the domain has a concrete dual to search.
    fn locate_character(&self, _f: &FunctionTable<Self>, _tol: f64) -> Option<Self::Point> {
        None
    }
}

impl Probing for Group {
    fn difference_steps(&self) -> Vec<Element> {
        self.points()
    }

    fn check_margin(&self, _needed: i64) -> Result<()> {
        Ok(())
    }

    fn locate_character(&self, f: &FunctionTable<Self>, tol: f64) -> Option<Element> {
        character_of(f, tol)
    }
}

impl Probing for Window {
    fn difference_steps(&self) -> Vec<num_rational::Rational64> {
        WINDOW_DIFFERENCE_STEPS
            .iter()
            .map(|&s| self.step() * s)
            .collect()
    }

    fn check_margin(&self, needed: i64) -> Result<()> {
        if self.margin_around_zero() < needed {
            return Err(Error::Margin(format!(
                "window {self} holds fewer than {needed} grid points on each side of 0"
            )));
        }
        Ok(())
    }
}

/// `diff`: the finite difference `f(y + h) - f(y)`.
pub fn diff<D: Domain>(f: &FunctionTable<D>, h: &D::Point) -> Result<FunctionTable<D>> {
    f.shift_diff(h)
}

/// Largest `|Delta_h^(n+1) f|` over the given shifts.
pub fn polynomial_defect<D: Domain>(
    f: &FunctionTable<D>,
    n: usize,
    steps: &[D::Point],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for h in steps {
        let mut g = f.clone();
        for _ in 0..=n {
            g = g.shift_diff(h)?;
        }
        worst = g.values().iter().map(|v| v.norm()).fold(worst, f64::max);
    }
    Ok(worst)
}

/// Whether every `(n+1)`-fold difference vanishes below `tol`.
///
/// Windows are probed with the steps in [`WINDOW_DIFFERENCE_STEPS`] and must be
/// wide enough for all of them; finite groups are probed with every shift.
pub fn is_polynomial<D: Probing>(f: &FunctionTable<D>, n: usize, tol: f64) -> Result<bool> {
    Ok(polynomial_defect(f, n, &f.domain().difference_steps())? < tol)
}

/// Least `d <= max_degree` with `is_polynomial(f, d)`, if any.
pub fn polynomial_degree<D: Probing>(
    f: &FunctionTable<D>,
    max_degree: usize,
    tol: f64,
) -> Result<Option<usize>> {
    for d in 0..=max_degree {
        if is_polynomial(f, d, tol)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Largest violation of `f(0) = 1`, `|f| = 1` and `f(k + l) = f(k) f(l)` on the domain.
pub fn character_defect<D: Probing>(f: &FunctionTable<D>) -> Result<f64> {
    let domain = f.domain();
    domain.check_margin(MIN_WINDOW_MARGIN)?;
    let one = Complex64::new(1.0, 0.0);
    let mut worst = (f.at(&domain.zero())? - one).norm();
    let points = domain.points();
    for (k, fk) in f.iter() {
        worst = worst.max((fk.norm() - 1.0).abs());
        for l in &points {
            if let Some(fkl) = f.get(&domain.add(&k, l)) {
                let fl = f.at(l)?;
                worst = worst.max((fkl - fk * fl).norm());
            }
        }
    }
    Ok(worst)
}

pub fn is_character<D: Probing>(f: &FunctionTable<D>, tol: f64) -> Result<bool> {
    Ok(character_defect(f)? < tol)
}

/// The `x` with `f(y) = (x, y)` for every `y`, found by exhaustive search.
pub fn character_of(f: &FunctionTable<Group>, tol: f64) -> Option<Element> {
    let g = f.domain();
    g.points()
        .into_iter()
        .find(|x| f.iter().all(|(y, v)| (v - g.pair_raw(x, &y)).norm() < tol))
}

/// Largest violation of `g(u+v) g(u-v) = g(u)^2` together with
/// `g(-y) = conj g(y)`, `|g| = 1` and `g(0) = 1`.
pub fn bernstein_defect<D: Domain>(g: &FunctionTable<D>) -> Result<f64> {
    let domain = g.domain();
    let one = Complex64::new(1.0, 0.0);
    let mut worst = (g.at(&domain.zero())? - one).norm();
    let points = domain.points();
    for (u, gu) in g.iter() {
        worst = worst.max((gu.norm() - 1.0).abs());
        if let Some(gneg) = g.get(&domain.neg(&u)) {
            worst = worst.max((gneg - gu.conj()).norm());
        }
        for v in &points {
            let plus = g.get(&domain.add(&u, v));
            let minus = g.get(&domain.sub(&u, v));
            if let (Some(p), Some(m)) = (plus, minus) {
                worst = worst.max((p * m - gu * gu).norm());
            }
        }
    }
    Ok(worst)
}

pub fn bernstein_check<D: Domain>(g: &FunctionTable<D>, tol: f64) -> Result<bool> {
    Ok(bernstein_defect(g)? < tol)
}
