//! Endomorphisms of finite abelian groups as constrained integer matrices.
//!
//! Column `j` of the matrix is the image of the generator of the `j`-th cyclic
//! factor. The image must be killed by `n_j`, which is the constraint
//! `A[i][j] * n_j = 0 (mod n_i)` checked at construction.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// A group endomorphism `x -> A x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Endo {
    group: Group,
    matrix: Vec<Vec<u64>>,
}

impl Endo {
    /// `make_endo`: reduces the entries of row `i` modulo `n_i` and checks well-definedness.
    pub fn new(group: &Group, matrix: &[Vec<i64>]) -> Result<Self> {
        let k = group.rank();
        if matrix.len() != k || matrix.iter().any(|row| row.len() != k) {
            return Err(Error::Domain(format!(
                "endomorphism of a rank-{k} group needs a {k}x{k} matrix"
            )));
        }
        let orders = group.orders();
        let mut reduced = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                let a = matrix[i][j].rem_euclid(orders[i] as i64) as u64;
                if !(a as u128 * orders[j] as u128).is_multiple_of(orders[i] as u128) {
                    return Err(Error::InvalidEndo {
                        row: i,
                        col: j,
                        value: a,
                        row_order: orders[i],
                        col_order: orders[j],
                    });
                }
                reduced[i][j] = a;
            }
        }
        Ok(Self {
            group: group.clone(),
            matrix: reduced,
        })
    }

    /// Bypasses the well-definedness check. Only used to inject faults into the
    /// invariant suite.
    pub(crate) fn from_raw_unchecked(group: &Group, matrix: Vec<Vec<u64>>) -> Self {
        Self {
            group: group.clone(),
            matrix,
        }
    }

    pub fn identity(group: &Group) -> Self {
        Self::scalar(group, 1)
    }

    pub fn zero(group: &Group) -> Self {
        Self::scalar(group, 0)
    }

    /// Multiplication by the integer `c`.
    pub fn scalar(group: &Group, c: i64) -> Self {
        let k = group.rank();
        let orders = group.orders();
        let matrix = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i == j {
                            c.rem_euclid(orders[i] as i64) as u64
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            group: group.clone(),
            matrix,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.group.check_member(x)?;
        Ok(self.apply_raw(x))
    }

    pub(crate) fn apply_raw(&self, x: &Element) -> Element {
        let orders = self.group.orders();
        let coords: Vec<i64> = self
            .matrix
            .iter()
            .zip(orders)
            .map(|(row, &n)| {
                let s = row.iter().zip(x.coords()).fold(0u128, |acc, (&a, &c)| {
                    (acc + a as u128 * c as u128) % n as u128
                });
                s as i64
            })
            .collect();
        self.group
            .element(&coords)
            .expect("rank preserved by matrix application")
    }

    /// The adjoint on the character group: `(A x, y) = (x, adjoint(A) y)`.
    ///
    /// Entry `[j][i]` is `A[i][j] * n_j / n_i`, an integer by the construction constraint.
    pub fn adjoint(&self) -> Endo {
        let orders = self.group.orders();
        let k = self.group.rank();
        let mut adj = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                let scaled = self.matrix[i][j] as u128 * orders[j] as u128 / orders[i] as u128;
                adj[j][i] = (scaled % orders[j] as u128) as u64;
            }
        }
        Endo {
            group: self.group.clone(),
            matrix: adj,
        }
    }

    fn check_same_group(&self, other: &Endo) -> Result<()> {
        if self.group != other.group {
            return Err(Error::Domain(format!(
                "endomorphisms act on different groups ({} vs {})",
                self.group, other.group
            )));
        }
        Ok(())
    }

    /// `endo_sub`: entrywise difference.
    pub fn sub(&self, other: &Endo) -> Result<Endo> {
        self.check_same_group(other)?;
        Ok(self.combine(other, |a, b, n| (a + n - b) % n))
    }

    pub fn add(&self, other: &Endo) -> Result<Endo> {
        self.check_same_group(other)?;
        Ok(self.combine(other, |a, b, n| (a + b) % n))
    }

    fn combine(&self, other: &Endo, op: impl Fn(u64, u64, u64) -> u64) -> Endo {
        let orders = self.group.orders();
        let matrix = self
            .matrix
            .iter()
            .zip(&other.matrix)
            .zip(orders)
            .map(|((ra, rb), &n)| ra.iter().zip(rb).map(|(&a, &b)| op(a, b, n)).collect())
            .collect();
        Endo {
            group: self.group.clone(),
            matrix,
        }
    }

    /// All `x` with `A x = 0`, in enumeration order.
    pub fn kernel(&self) -> Result<Vec<Element>> {
        Ok(self
            .group
            .elements()?
            .into_iter()
            .filter(|x| self.apply_raw(x).is_zero())
            .collect())
    }

    /// The image `A(X)` as a sorted list.
    pub fn image(&self) -> Result<Vec<Element>> {
        let mut image: Vec<Element> = self
            .group
            .elements()?
            .iter()
            .map(|x| self.apply_raw(x))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        image.sort();
        Ok(image)
    }

    pub fn is_surjective(&self) -> Result<bool> {
        Ok(self.image()?.len() == self.group.size())
    }

    /// `Ker A = {0}`.
    pub fn has_trivial_kernel(&self) -> Result<bool> {
        Ok(self.kernel()?.len() == 1)
    }

    /// Every well-defined endomorphism of `group`, in lexicographic order of matrices.
    ///
    /// Entry `(i, j)` ranges over the multiples of `n_i / gcd(n_i, n_j)`.
    pub fn enumerate_all(group: &Group) -> Vec<Endo> {
        let orders = group.orders();
        let k = group.rank();
        let slots: Vec<(usize, usize, u64, u64)> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| {
                let step = orders[i] / orders[i].gcd(&orders[j]);
                (i, j, step, orders[i].gcd(&orders[j]))
            })
            .collect();
        let total: u64 = slots.iter().map(|s| s.3).product();
        (0..total)
            .map(|mut code| {
                let mut matrix = vec![vec![0u64; k]; k];
                for &(i, j, step, count) in slots.iter().rev() {
                    matrix[i][j] = (code % count) * step;
                    code /= count;
                }
                Endo {
                    group: group.clone(),
                    matrix,
                }
            })
            .collect()
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "[{}]", rows.join(";"))
    }
}

/// `A(Y, G)`: the characters trivial on the subgroup `G`.
///
/// Fails if `subgroup` is empty or not closed under addition.
pub fn annihilator(group: &Group, subgroup: &[Element]) -> Result<Vec<Element>> {
    for x in subgroup {
        group.check_member(x)?;
    }
    if subgroup.is_empty() {
        return Err(Error::Domain("the empty set is not a subgroup".into()));
    }
    let members: HashSet<&Element> = subgroup.iter().collect();
    for a in subgroup {
        for b in subgroup {
            if !members.contains(&group.add_raw(a, b)) {
                return Err(Error::Domain(format!(
                    "not closed under addition: {a} + {b} is missing"
                )));
            }
        }
    }
    Ok(group
        .elements()?
        .into_iter()
        .filter(|y| subgroup.iter().all(|x| group.phase_raw(x, y) == 0))
        .collect())
}
