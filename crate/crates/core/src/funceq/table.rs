//! Complex-valued tables over a finite group or over a window of a rational lattice.

use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// Values smaller than this in modulus are treated as zero when dividing.
pub const VANISHING_EPS: f64 = 1e-300;

/// The carrier of a [`FunctionTable`].
///
/// A domain is a finite set of points inside an ambient abelian group; `add`
/// and `neg` act in the ambient group, and [`Domain::index_of`] answers `None`
/// for ambient points outside the carrier.
pub trait Domain: Clone + PartialEq + fmt::Debug + fmt::Display {
    type Point: Clone + PartialEq + fmt::Debug + fmt::Display;
    type Map: DualMap<Self>;

    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn point(&self, index: usize) -> Self::Point;
    fn index_of(&self, p: &Self::Point) -> Option<usize>;
    fn add(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;
    fn neg(&self, a: &Self::Point) -> Self::Point;
    fn zero(&self) -> Self::Point;
    fn is_zero_point(&self, p: &Self::Point) -> bool;

    /// The points `p` of this domain with `p + h` also in it, or `None` if there are none.
    fn shifted_restriction(&self, h: &Self::Point) -> Option<Self>;

    fn points(&self) -> Vec<Self::Point> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn contains(&self, p: &Self::Point) -> bool {
        self.index_of(p).is_some()
    }

    fn sub(&self, a: &Self::Point, b: &Self::Point) -> Self::Point {
        self.add(a, &self.neg(b))
    }
}

/// An endomorphism of the ambient group of a [`Domain`] (the `beta_j` of a functional equation).
pub trait DualMap<D: Domain>: Clone + fmt::Debug + fmt::Display {
    fn apply(&self, p: &D::Point) -> D::Point;
    fn difference(&self, other: &Self) -> Result<Self>;
    fn identity(domain: &D) -> Self;
    /// Whether the map is onto the ambient group.
    fn is_surjective(&self, domain: &D) -> bool;
}

impl Domain for Group {
    type Point = Element;
    type Map = Endo;

    fn len(&self) -> usize {
        self.size()
    }

    fn point(&self, index: usize) -> Element {
        self.element_at(index)
    }

    fn index_of(&self, p: &Element) -> Option<usize> {
        self.contains(p).then(|| Group::index_of(self, p))
    }

    fn add(&self, a: &Element, b: &Element) -> Element {
        self.add_raw(a, b)
    }

    fn neg(&self, a: &Element) -> Element {
        self.neg_raw(a)
    }

    fn zero(&self) -> Element {
        Group::zero(self)
    }

    fn is_zero_point(&self, p: &Element) -> bool {
        p.is_zero()
    }

    fn shifted_restriction(&self, h: &Element) -> Option<Self> {
        self.contains(h).then(|| self.clone())
    }
}

impl DualMap<Group> for Endo {
    fn apply(&self, p: &Element) -> Element {
        self.apply_raw(p)
    }

    fn difference(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }

    fn identity(domain: &Group) -> Self {
        Endo::identity(domain)
    }

    fn is_surjective(&self, domain: &Group) -> bool {
        self.group() == domain && Endo::is_surjective(self).unwrap_or(false)
    }
}

/// The points `m / denom` for `lo <= m <= hi`, inside the additive group of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    denom: i64,
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(denom: i64, lo: i64, hi: i64) -> Result<Self> {
        if denom <= 0 {
            return Err(Error::Domain(format!(
                "window denominator {denom} must be positive"
            )));
        }
        if lo > hi {
            return Err(Error::Margin(format!("empty window [{lo}, {hi}]/{denom}")));
        }
        Ok(Self { denom, lo, hi })
    }

    /// `{m / denom : |m| <= radius}`.
    pub fn symmetric(denom: i64, radius: i64) -> Result<Self> {
        Self::new(denom, -radius.abs(), radius.abs())
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// The grid step `1 / denom`.
    pub fn step(&self) -> Rational64 {
        Rational64::new(1, self.denom)
    }

    /// Numerator of `p` over this window's denominator, if `p` lies on the grid.
    pub fn grid_index(&self, p: &Rational64) -> Option<i64> {
        let scaled = p * self.denom;
        scaled.is_integer().then(|| scaled.to_integer())
    }

    /// Number of grid points on each side of 0 that the window contains (negative if 0 is outside).
    pub fn margin_around_zero(&self) -> i64 {
        self.hi.min(-self.lo)
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]/{}", self.lo, self.hi, self.denom)
    }
}

impl Domain for Window {
    type Point = Rational64;
    type Map = Scaling;

    fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    fn point(&self, index: usize) -> Rational64 {
        Rational64::new(self.lo + index as i64, self.denom)
    }

    fn index_of(&self, p: &Rational64) -> Option<usize> {
        let m = self.grid_index(p)?;
        (self.lo..=self.hi)
            .contains(&m)
            .then(|| (m - self.lo) as usize)
    }

    fn add(&self, a: &Rational64, b: &Rational64) -> Rational64 {
        a + b
    }

    fn neg(&self, a: &Rational64) -> Rational64 {
        -a
    }

    fn zero(&self) -> Rational64 {
        Rational64::zero()
    }

    fn is_zero_point(&self, p: &Rational64) -> bool {
        p.is_zero()
    }

    fn shifted_restriction(&self, h: &Rational64) -> Option<Self> {
        let shift = self.grid_index(h)?;
        let lo = self.lo.max(self.lo - shift);
        let hi = self.hi.min(self.hi - shift);
        (lo <= hi).then_some(Self {
            denom: self.denom,
            lo,
            hi,
        })
    }
}

/// Multiplication by a rational number, acting on a rational window's ambient group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scaling(pub Rational64);

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl DualMap<Window> for Scaling {
    fn apply(&self, p: &Rational64) -> Rational64 {
        self.0 * p
    }

    fn difference(&self, other: &Self) -> Result<Self> {
        Ok(Scaling(self.0 - other.0))
    }

    fn identity(_domain: &Window) -> Self {
        Scaling(Rational64::from_integer(1))
    }

    /// Nonzero multipliers are injective on the solenoid side, hence onto the discrete dual.
    fn is_surjective(&self, _domain: &Window) -> bool {
        !self.0.is_zero()
    }
}

/// A complex-valued function on a [`Domain`].
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionTable<D: Domain> {
    domain: D,
    values: Vec<Complex64>,
}

impl<D: Domain> FunctionTable<D> {
    pub fn new(domain: D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::Domain(format!(
                "{} values supplied for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: D, f: impl Fn(&D::Point) -> Complex64) -> Self {
        let values = (0..domain.len()).map(|i| f(&domain.point(i))).collect();
        Self { domain, values }
    }

    pub fn constant(domain: D, c: Complex64) -> Self {
        let values = vec![c; domain.len()];
        Self { domain, values }
    }

    pub fn domain(&self) -> &D {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, p: &D::Point) -> Option<Complex64> {
        self.domain.index_of(p).map(|i| self.values[i])
    }

    /// Like [`FunctionTable::get`] but reports a missing point as a margin error.
    pub fn at(&self, p: &D::Point) -> Result<Complex64> {
        self.get(p).ok_or_else(|| {
            Error::Margin(format!(
                "point {p} lies outside the table domain {}",
                self.domain
            ))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (D::Point, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.domain.point(i), v))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::Domain(format!(
                "tables live on different domains ({} vs {})",
                self.domain, other.domain
            )));
        }
        Ok(Self {
            domain: self.domain.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Pointwise `self / other`; fails where `other` vanishes.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if let Some(i) = other.values.iter().position(|v| v.norm() <= VANISHING_EPS) {
            return Err(Error::Division(format!(
                "divisor vanishes at {}",
                other.domain.point(i)
            )));
        }
        self.zip_with(other, |a, b| a / b)
    }

    pub fn min_modulus(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonvanishing(&self, tol: f64) -> bool {
        self.min_modulus() > tol
    }

    /// Largest pointwise distance to `other` over the shared domain.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        Ok(self
            .zip_with(other, |a, b| Complex64::new((a - b).norm(), 0.0))?
            .values
            .iter()
            .map(|v| v.re)
            .fold(0.0, f64::max))
    }

    /// `y -> f(y + h) / f(y)` on the points where both are defined.
    pub fn shift_ratio(&self, h: &D::Point) -> Result<Self> {
        let domain = self.restricted(h)?;
        let mut values = Vec::with_capacity(domain.len());
        for i in 0..domain.len() {
            let y = domain.point(i);
            let base = self.at(&y)?;
            if base.norm() <= VANISHING_EPS {
                return Err(Error::Division(format!("table vanishes at {y}")));
            }
            values.push(self.at(&self.domain.add(&y, h))? / base);
        }
        Ok(Self { domain, values })
    }

    /// The finite difference `y -> f(y + h) - f(y)` on the points where both are defined.
    pub fn shift_diff(&self, h: &D::Point) -> Result<Self> {
        let domain = self.restricted(h)?;
        let mut values = Vec::with_capacity(domain.len());
        for i in 0..domain.len() {
            let y = domain.point(i);
            values.push(self.at(&self.domain.add(&y, h))? - self.at(&y)?);
        }
        Ok(Self { domain, values })
    }

    fn restricted(&self, h: &D::Point) -> Result<D> {
        self.domain.shifted_restriction(h).ok_or_else(|| {
            Error::Margin(format!(
                "no point of {} stays inside after a shift by {h}",
                self.domain
            ))
        })
    }

    /// Largest violation of `f(0) = 1` and `f(-y) = conj f(y)`, over points where `-y` is present.
    pub fn ratio_invariant_defect(&self) -> Result<f64> {
        let zero = self.domain.zero();
        let mut worst = (self.at(&zero)? - Complex64::new(1.0, 0.0)).norm();
        for (y, v) in self.iter() {
            if let Some(w) = self.get(&self.domain.neg(&y)) {
                worst = worst.max((w - v.conj()).norm());
            }
        }
        Ok(worst)
    }
}

impl FunctionTable<Window> {
    /// Restricts this table to a sub-window.
    pub fn restrict(&self, window: &Window) -> Result<Self> {
        let mut values = Vec::with_capacity(window.len());
        for i in 0..window.len() {
            values.push(self.at(&window.point(i))?);
        }
        Self::new(window.clone(), values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn window_indexing() {
        let w = Window::symmetric(12, 12).unwrap();
        assert_eq!(w.len(), 25);
        assert_eq!(w.index_of(&r(0, 1)), Some(12));
        assert_eq!(w.index_of(&r(1, 1)), Some(24));
        assert_eq!(w.index_of(&r(1, 24)), None);
        assert_eq!(w.index_of(&r(13, 12)), None);
        assert_eq!(w.point(0), r(-1, 1));
        assert_eq!(w.margin_around_zero(), 12);
    }

    #[test]
    fn window_shift_restriction() {
        let w = Window::new(4, -3, 5).unwrap();
        let s = w.shifted_restriction(&r(2, 4)).unwrap();
        assert_eq!((s.lo(), s.hi()), (-3, 3));
        let s = w.shifted_restriction(&r(-1, 2)).unwrap();
        assert_eq!((s.lo(), s.hi()), (-1, 5));
        assert!(w.shifted_restriction(&r(9, 4)).is_none());
        assert!(w.shifted_restriction(&r(1, 8)).is_none());
    }

    #[test]
    fn group_tables_shift() {
        let g = Group::cyclic(5).unwrap();
        let x = g.element(&[2]).unwrap();
        let chi = FunctionTable::from_fn(g.clone(), |y| g.pair_raw(&x, y));
        let h = g.element(&[3]).unwrap();
        let ratio = chi.shift_ratio(&h).unwrap();
        let expected = g.pair_raw(&x, &h);
        assert!(ratio.values().iter().all(|v| (v - expected).norm() < 1e-12));
        assert!(chi.ratio_invariant_defect().unwrap() < 1e-12);
    }

    #[test]
    fn division_guards() {
        let g = Group::cyclic(3).unwrap();
        let mut vals = vec![Complex64::new(1.0, 0.0); 3];
        vals[1] = Complex64::zero();
        let t = FunctionTable::new(g.clone(), vals).unwrap();
        let one = FunctionTable::constant(g.clone(), Complex64::new(1.0, 0.0));
        assert!(matches!(one.div(&t), Err(Error::Division(_))));
        assert!(matches!(
            t.shift_ratio(&g.element(&[2]).unwrap()),
            Err(Error::Division(_))
        ));
        assert!(FunctionTable::new(g, vec![]).is_err());
    }
}
