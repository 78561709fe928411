//! Exact check of the Gaussian counterexample on the plane.
//!
//! Four centered Gaussian laws on `R^2` are described by quadratic forms `Q_j`
//! with `mu_j^(y) = exp(-Q_j(y))`. Coefficients `b_j = diag(j, -j)` give joint
//! exponents `sum_j Q_j(u + b_j v)`, a quadratic form in `(u_1, u_2, v_1, v_2)`.
//! Both sides are compared in exact rational arithmetic, and each difference
//! `Q_j^nu - Q_j^mu` is tested for indefiniteness, which rules out a Gaussian
//! factor relating `mu_j` and `nu_j` in either direction.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::Serialize;

pub type Matrix = Vec<Vec<Rational64>>;

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn diag(entries: &[i64]) -> Matrix {
    let n = entries.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        r(entries[i])
                    } else {
                        Rational64::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational64::zero(), |acc, k| acc + row[k] * b[k][j]))
                .collect()
        })
        .collect()
}

fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

/// The Gram matrix of `(u, v) -> Q(u + b v)` for a form `Q` on `R^n` with matrix `s`.
pub fn lifted_form(s: &Matrix, b: &Matrix) -> Matrix {
    let n = s.len();
    // M = [I | b], so u + b v = M (u, v)
    let m: Matrix = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        if i == j {
                            Rational64::one()
                        } else {
                            Rational64::zero()
                        }
                    } else {
                        b[i][j - n]
                    }
                })
                .collect()
        })
        .collect();
    matmul(&matmul(&transpose(&m), s), &m)
}

/// `sum_j Q_j(u + b_j v)` as a Gram matrix in `(u_1, .., u_n, v_1, .., v_n)`.
pub fn total_form(forms: &[Matrix], coeffs: &[Matrix]) -> Matrix {
    let n = forms[0].len();
    let zero = vec![vec![Rational64::zero(); 2 * n]; 2 * n];
    forms
        .iter()
        .zip(coeffs)
        .fold(zero, |acc, (s, b)| add(&acc, &lifted_form(s, b)))
}

const VARIABLES: [&str; 4] = ["u1", "u2", "v1", "v2"];

/// Coefficient of a monomial in the polynomial with Gram matrix `m`.
pub fn monomial_coefficient(m: &Matrix, a: usize, b: usize) -> Rational64 {
    if a == b {
        m[a][a]
    } else {
        m[a][b] + m[b][a]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonomialRow {
    pub monomial: String,
    pub mu_side: String,
    pub nu_side: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceForm {
    pub index: usize,
    /// Gram matrix of `Q_j^nu - Q_j^mu`, rationals written as `p/q`.
    pub matrix: Vec<Vec<String>>,
    pub determinant: String,
    pub indefinite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Remark6Report {
    pub identical_joint_exponents: bool,
    pub monomials: Vec<MonomialRow>,
    pub differences: Vec<DifferenceForm>,
    pub all_differences_indefinite: bool,
    pub holds: bool,
}

fn show(q: Rational64) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Side-by-side forms of the plane counterexample: `mu` forms, `nu` forms, coefficients.
pub fn remark6_instance() -> (Vec<Matrix>, Vec<Matrix>, Vec<Matrix>) {
    let mu = vec![diag(&[4, 4]); 4];
    let nu = vec![diag(&[3, 5]), diag(&[7, 1]), diag(&[1, 7]), diag(&[5, 3])];
    let b = (1..=4).map(|j| diag(&[j, -j])).collect();
    (mu, nu, b)
}

fn det2(m: &Matrix) -> Rational64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Compares the two joint exponents symbolically and tests each difference form.
pub fn remark6_check() -> Remark6Report {
    let (mu, nu, b) = remark6_instance();
    let mu_total = total_form(&mu, &b);
    let nu_total = total_form(&nu, &b);
    let mut monomials = Vec::new();
    for (a, x) in VARIABLES.iter().enumerate() {
        for (c, y) in VARIABLES.iter().enumerate().skip(a) {
            let name = if a == c {
                format!("{x}^2")
            } else {
                format!("{x}*{y}")
            };
            monomials.push(MonomialRow {
                monomial: name,
                mu_side: show(monomial_coefficient(&mu_total, a, c)),
                nu_side: show(monomial_coefficient(&nu_total, a, c)),
            });
        }
    }
    let differences: Vec<DifferenceForm> = mu
        .iter()
        .zip(&nu)
        .enumerate()
        .map(|(j, (m, n))| {
            let d: Matrix = n
                .iter()
                .zip(m)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect())
                .collect();
            let det = det2(&d);
            DifferenceForm {
                index: j + 1,
                matrix: d
                    .iter()
                    .map(|row| row.iter().map(|q| show(*q)).collect())
                    .collect(),
                determinant: show(det),
                indefinite: det < Rational64::zero(),
            }
        })
        .collect();
    let identical = mu_total == nu_total;
    let all_indefinite = differences.iter().all(|d| d.indefinite);
    Remark6Report {
        identical_joint_exponents: identical,
        monomials,
        differences,
        all_differences_indefinite: all_indefinite,
        holds: identical && all_indefinite,
    }
}
