//! Finite abelian groups `Z_{n_1} x ... x Z_{n_k}` and the duality pairing.
//!
//! The character group of a finite abelian group is realized by the same
//! [`Group`] value: the element `y` acts on `x` through
//! `(x, y) = exp(2 pi i sum_i x_i y_i / n_i)`. With this convention adjoint
//! endomorphisms are integer matrices (see [`crate::endo`]).

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of elements of a group we are willing to enumerate.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

/// A finite abelian group given as a direct product of cyclic factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Group {
    orders: Vec<u64>,
    size: usize,
    /// Least common multiple of the orders; pairing phases are numerators over it.
    exponent: u64,
    bound: u64,
}

/// An element of a [`Group`] (or of its character group, which is the same value).
///
/// Coordinates are always reduced modulo the factor orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(Vec<u64>);

impl Element {
    /// Wraps coordinates without reducing them; callers guarantee they are in range.
    pub(crate) fn from_coords(coords: Vec<u64>) -> Self {
        Self(coords)
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Group {
    /// `make_group` with the default enumeration bound.
    pub fn new(orders: &[u64]) -> Result<Self> {
        Self::with_bound(orders, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn with_bound(orders: &[u64], bound: u64) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Domain(
                "a group needs at least one cyclic factor".into(),
            ));
        }
        if let Some(pos) = orders.iter().position(|&n| n == 0) {
            return Err(Error::Domain(format!("factor {pos} has order 0")));
        }
        let size = orders
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if size > bound as u128 {
            return Err(Error::Capacity { size, bound });
        }
        let exponent = orders.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        Ok(Self {
            orders: orders.to_vec(),
            size: size as usize,
            exponent,
            bound,
        })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Least common multiple of the factor orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn enumeration_bound(&self) -> u64 {
        self.bound
    }

    /// Direct product `self x other`, with coordinates of `self` first.
    pub fn product(&self, other: &Group) -> Result<Group> {
        let orders: Vec<u64> = self.orders.iter().chain(&other.orders).copied().collect();
        Group::with_bound(&orders, self.bound.max(other.bound))
    }

    /// Builds an element, reducing every coordinate into `[0, n_i)`.
    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        self.check_arity(coords.len())?;
        Ok(Element(
            coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.0.len() == self.rank() && x.0.iter().zip(&self.orders).all(|(&c, &n)| c < n)
    }

    fn check_arity(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::Domain(format!(
                "element of arity {len} does not belong to a group of rank {}",
                self.rank()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_member(&self, x: &Element) -> Result<()> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("{x} is not an element of {self}")));
        }
        Ok(())
    }

    pub fn add(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.add_raw(x, y))
    }

    pub fn neg(&self, x: &Element) -> Result<Element> {
        self.check_member(x)?;
        Ok(self.neg_raw(x))
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Result<Element> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.add_raw(x, &self.neg_raw(y)))
    }

    pub(crate) fn add_raw(&self, x: &Element, y: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&y.0)
                .zip(&self.orders)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        )
    }

    pub(crate) fn neg_raw(&self, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        )
    }

    /// Integer multiple `m x`.
    pub fn scale(&self, m: i64, x: &Element) -> Element {
        Element(
            x.0.iter()
                .zip(&self.orders)
                .map(|(&a, &n)| {
                    let r = (m.rem_euclid(n as i64) as u128 * a as u128) % n as u128;
                    r as u64
                })
                .collect(),
        )
    }

    /// Numerator `t` of the pairing phase: `(x, y) = exp(2 pi i t / exponent)`.
    pub(crate) fn phase_raw(&self, x: &Element, y: &Element) -> u64 {
        let l = self.exponent as u128;
        let mut t: u128 = 0;
        for ((&a, &b), &n) in x.0.iter().zip(&y.0).zip(&self.orders) {
            let prod = (a as u128 * b as u128) % n as u128;
            t = (t + prod * (l / n as u128)) % l;
        }
        t as u64
    }

    pub fn phase(&self, x: &Element, y: &Element) -> Result<u64> {
        self.check_member(x)?;
        self.check_member(y)?;
        Ok(self.phase_raw(x, y))
    }

    /// The value of the character `y` at `x`.
    pub fn pair(&self, x: &Element, y: &Element) -> Result<Complex64> {
        Ok(self.root_of_unity(self.phase(x, y)?))
    }

    pub(crate) fn pair_raw(&self, x: &Element, y: &Element) -> Complex64 {
        self.root_of_unity(self.phase_raw(x, y))
    }

    /// `exp(2 pi i t / exponent)`.
    pub(crate) fn root_of_unity(&self, t: u64) -> Complex64 {
        let (s, c) = (TAU * t as f64 / self.exponent as f64).sin_cos();
        Complex64::new(c, s)
    }

    /// All elements in lexicographic order of coordinates.
    pub fn elements(&self) -> Result<Vec<Element>> {
        if self.size as u64 > self.bound {
            return Err(Error::Capacity {
                size: self.size as u128,
                bound: self.bound,
            });
        }
        Ok((0..self.size).map(|i| self.element_at(i)).collect())
    }

    /// Position of `x` in [`Group::elements`].
    pub fn index_of(&self, x: &Element) -> usize {
        x.0.iter()
            .zip(&self.orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> Element {
        let mut coords = vec![0u64; self.rank()];
        for (slot, &n) in coords.iter_mut().zip(&self.orders).rev() {
            *slot = (index % n as usize) as u64;
            index /= n as usize;
        }
        Element(coords)
    }

    /// Number of elements of order exactly two.
    pub fn order_two_count(&self) -> usize {
        // x + x = 0 coordinatewise means x_i is 0 or n_i / 2.
        let solutions: usize = self
            .orders
            .iter()
            .map(|&n| if n % 2 == 0 { 2 } else { 1 })
            .product();
        solutions - 1
    }

    /// Short label such as `4x3`, the format accepted by [`FromStr`].
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.orders.iter().map(|n| n.to_string()).collect();
        parts.join("x")
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|n| format!("Z_{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for Group {
    type Err = Error;

    /// Parses `7`, `4x3`, `6x6` and so on.
    fn from_str(s: &str) -> Result<Self> {
        let orders = s
            .split(['x', 'X', '*'])
            .map(|p| {
                p.trim().parse::<u64>().map_err(|e| Error::Parse {
                    line: 1,
                    msg: format!("bad group order {p:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Group::new(&orders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn construction() {
        assert_eq!(Group::new(&[4]).unwrap().size(), 4);
        assert_eq!(Group::new(&[2, 2]).unwrap().size(), 4);
        assert_eq!(Group::new(&[6, 6]).unwrap().size(), 36);
        assert_eq!(Group::new(&[1, 1]).unwrap().size(), 1);
        assert!(matches!(Group::new(&[0]), Err(Error::Domain(_))));
        assert!(matches!(
            Group::with_bound(&[10, 10], 99),
            Err(Error::Capacity {
                size: 100,
                bound: 99
            })
        ));
        assert!(matches!(
            Group::new(&[1 << 20, 1 << 20]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn addition_and_negation() {
        let z4 = Group::cyclic(4).unwrap();
        let s = z4
            .add(&z4.element(&[3]).unwrap(), &z4.element(&[2]).unwrap())
            .unwrap();
        assert_eq!(s.coords(), &[1]);
        let k = Group::new(&[2, 2]).unwrap();
        let s = k
            .add(&k.element(&[1, 0]).unwrap(), &k.element(&[1, 1]).unwrap())
            .unwrap();
        assert_eq!(s.coords(), &[0, 1]);
        assert_eq!(z4.neg(&z4.zero()).unwrap(), z4.zero());
        assert_eq!(z4.element(&[-1]).unwrap().coords(), &[3]);
        let bad = k.element(&[1, 0]).unwrap();
        assert!(matches!(z4.add(&bad, &z4.zero()), Err(Error::Domain(_))));
    }

    #[test]
    fn pairing_values() {
        let z4 = Group::cyclic(4).unwrap();
        let one = z4.element(&[1]).unwrap();
        assert!(close(z4.pair(&one, &one).unwrap(), Complex64::i()));
        let z2 = Group::cyclic(2).unwrap();
        let one = z2.element(&[1]).unwrap();
        assert!(close(
            z2.pair(&one, &one).unwrap(),
            Complex64::new(-1.0, 0.0)
        ));
        let g = Group::new(&[4, 6]).unwrap();
        for y in g.elements().unwrap() {
            assert!(close(
                g.pair(&g.zero(), &y).unwrap(),
                Complex64::new(1.0, 0.0)
            ));
        }
    }

    #[test]
    fn enumeration_order() {
        let z2 = Group::cyclic(2).unwrap();
        let els: Vec<Vec<u64>> = z2
            .elements()
            .unwrap()
            .iter()
            .map(|e| e.coords().to_vec())
            .collect();
        assert_eq!(els, vec![vec![0], vec![1]]);
        assert_eq!(Group::new(&[2, 2]).unwrap().elements().unwrap().len(), 4);
        assert_eq!(
            Group::cyclic(1).unwrap().elements().unwrap(),
            vec![Group::cyclic(1).unwrap().zero()]
        );
        let g = Group::new(&[3, 4, 2]).unwrap();
        let els = g.elements().unwrap();
        assert!(els.windows(2).all(|w| w[0] < w[1]));
        for (i, e) in els.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn order_two_elements() {
        for n in [1u64, 3, 5, 7, 9] {
            assert_eq!(Group::cyclic(n).unwrap().order_two_count(), 0);
        }
        assert_eq!(Group::cyclic(12).unwrap().order_two_count(), 1);
        // brute force on Z_6 x Z_6: (3,0), (0,3), (3,3)
        let g = Group::new(&[6, 6]).unwrap();
        let brute: Vec<Element> = g
            .elements()
            .unwrap()
            .into_iter()
            .filter(|x| !x.is_zero() && g.add_raw(x, x).is_zero())
            .collect();
        assert_eq!(brute.len(), 3);
        assert_eq!(g.order_two_count(), 3);
    }

    #[test]
    fn parse_label() {
        let g: Group = "4x3".parse().unwrap();
        assert_eq!(g.orders(), &[4, 3]);
        assert_eq!(g.label(), "4x3");
        assert!("4xz".parse::<Group>().is_err());
        assert!("0".parse::<Group>().is_err());
    }

    fn small_groups() -> Vec<Group> {
        [
            &[1u64][..],
            &[2],
            &[5],
            &[8],
            &[12],
            &[2, 2],
            &[2, 4],
            &[4, 6],
            &[3, 3, 2],
            &[16, 16],
        ]
        .iter()
        .map(|o| Group::new(o).unwrap())
        .collect()
    }

    #[test]
    fn bilinearity_exhaustive() {
        for g in small_groups() {
            let els = g.elements().unwrap();
            let mut worst: f64 = 0.0;
            for x in &els {
                for x2 in &els {
                    let s = g.add_raw(x, x2);
                    for y in &els {
                        let lhs = g.pair_raw(&s, y);
                        let rhs = g.pair_raw(x, y) * g.pair_raw(x2, y);
                        worst = worst.max((lhs - rhs).norm());
                        // symmetric realization: the same identity covers the second slot
                        let lhs2 = g.pair_raw(y, &s);
                        let rhs2 = g.pair_raw(y, x) * g.pair_raw(y, x2);
                        worst = worst.max((lhs2 - rhs2).norm());
                    }
                }
                if els.len() > 64 {
                    break;
                }
            }
            assert!(worst < 1e-12, "{g}: {worst}");
        }
    }

    #[test]
    fn nondegeneracy_and_orthogonality() {
        for g in small_groups() {
            let els = g.elements().unwrap();
            for x in &els {
                let total: Complex64 = els.iter().map(|y| g.pair_raw(x, y)).sum();
                let expected = if x.is_zero() { els.len() as f64 } else { 0.0 };
                assert!(
                    (total - expected).norm() < 1e-9 * els.len() as f64,
                    "{g} {x}"
                );
                if !x.is_zero() {
                    assert!(els.iter().any(|y| g.phase_raw(x, y) != 0));
                }
            }
        }
    }
}
