//! Functional equations of the shape
//!
//! ```text
//!   prod_j f_j(a_j u + beta_j v) = R(v)      (product form)
//!   sum_j  psi_j(a_j u + beta_j v) = B(v)    (sum form)
//! ```
//!
//! with `a_j` either the identity or zero, and the substitute-and-divide
//! elimination that removes one unknown factor per step.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funceq::ops::{bernstein_defect, character_defect, polynomial_degree, Probing};
use crate::funceq::table::{Domain, DualMap, FunctionTable};

/// How the factors of an [`Equation`] are combined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Combine {
    Product,
    Sum,
}

impl Combine {
    fn neutral(self) -> Complex64 {
        match self {
            Combine::Product => Complex64::new(1.0, 0.0),
            Combine::Sum => Complex64::new(0.0, 0.0),
        }
    }
}

/// One term `f(a u + beta v)` of an equation.
#[derive(Clone, Debug)]
pub struct Factor<D: Domain> {
    /// Index of the factor in the original equation; survives eliminations.
    pub label: usize,
    pub table: FunctionTable<D>,
    /// `true` when the argument contains `u`, `false` for terms in `v` alone.
    pub uses_u: bool,
    pub beta: D::Map,
}

impl<D: Domain> Factor<D> {
    pub fn new(label: usize, table: FunctionTable<D>, uses_u: bool, beta: D::Map) -> Self {
        Self {
            label,
            table,
            uses_u,
            beta,
        }
    }

    fn argument(&self, ambient: &D, u: &D::Point, v: &D::Point) -> D::Point {
        let bv = self.beta.apply(v);
        if self.uses_u {
            ambient.add(u, &bv)
        } else {
            bv
        }
    }
}

/// A product-form (or sum-form) functional equation on a [`Domain`].
#[derive(Clone, Debug)]
pub struct Equation<D: Domain> {
    combine: Combine,
    ambient: D,
    factors: Vec<Factor<D>>,
    rhs: Option<FunctionTable<D>>,
}

/// The product-form equation of the identifiability proofs.
pub type ProductEquation<D> = Equation<D>;

impl<D: Domain> Equation<D> {
    /// `prod_j f_j(...) = rhs(v)`, with `rhs = None` meaning the constant 1.
    pub fn product(factors: Vec<Factor<D>>, rhs: Option<FunctionTable<D>>) -> Result<Self> {
        Self::build(Combine::Product, factors, rhs)
    }

    /// `sum_j psi_j(...) = rhs(v)`, with `rhs = None` meaning the constant 0.
    pub fn sum(factors: Vec<Factor<D>>, rhs: Option<FunctionTable<D>>) -> Result<Self> {
        Self::build(Combine::Sum, factors, rhs)
    }

    fn build(
        combine: Combine,
        factors: Vec<Factor<D>>,
        rhs: Option<FunctionTable<D>>,
    ) -> Result<Self> {
        let ambient = factors
            .first()
            .map(|f| f.table.domain().clone())
            .ok_or_else(|| Error::Domain("an equation needs at least one factor".into()))?;
        let mut labels: Vec<usize> = factors.iter().map(|f| f.label).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != factors.len() {
            return Err(Error::Domain("factor labels must be distinct".into()));
        }
        Ok(Self {
            combine,
            ambient,
            factors,
            rhs,
        })
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    pub fn factors(&self) -> &[Factor<D>] {
        &self.factors
    }

    pub fn rhs(&self) -> Option<&FunctionTable<D>> {
        self.rhs.as_ref()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.label).collect()
    }

    pub fn factor(&self, label: usize) -> Result<&Factor<D>> {
        self.factors
            .iter()
            .find(|f| f.label == label)
            .ok_or_else(|| Error::Domain(format!("no factor with index {label}")))
    }

    /// Left side combined with the inverse of the right side: 1 (or 0) when the equation holds.
    pub fn evaluate(&self, u: &D::Point, v: &D::Point) -> Result<Complex64> {
        let mut acc = self.combine.neutral();
        for f in &self.factors {
            let val = f.table.at(&f.argument(&self.ambient, u, v))?;
            acc = match self.combine {
                Combine::Product => acc * val,
                Combine::Sum => acc + val,
            };
        }
        if let Some(rhs) = &self.rhs {
            let r = rhs.at(v)?;
            acc = match self.combine {
                Combine::Product => {
                    if r.norm() <= crate::funceq::table::VANISHING_EPS {
                        return Err(Error::Division(format!("right-hand side vanishes at {v}")));
                    }
                    acc / r
                }
                Combine::Sum => acc - r,
            };
        }
        Ok(acc)
    }

    /// Largest deviation of [`Equation::evaluate`] from its neutral value over `us x vs`.
    pub fn residual(&self, us: &[D::Point], vs: &[D::Point]) -> Result<f64> {
        let neutral = self.combine.neutral();
        let mut worst: f64 = 0.0;
        for u in us {
            for v in vs {
                worst = worst.max((self.evaluate(u, v)? - neutral).norm());
            }
        }
        Ok(worst)
    }

    /// Substitutes `u + h` for `u` and `v + k` for `v`, then divides (or subtracts) the
    /// original equation. Factors whose argument does not move cancel and are dropped.
    pub fn substitute(&self, h: &D::Point, k: &D::Point) -> Result<Self> {
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let bk = f.beta.apply(k);
            let shift = if f.uses_u {
                self.ambient.add(h, &bk)
            } else {
                bk
            };
            if self.ambient.is_zero_point(&shift) {
                continue;
            }
            let table = match self.combine {
                Combine::Product => f.table.shift_ratio(&shift)?,
                Combine::Sum => f.table.shift_diff(&shift)?,
            };
            factors.push(Factor::new(f.label, table, f.uses_u, f.beta.clone()));
        }
        let rhs = match &self.rhs {
            Some(r) if !self.ambient.is_zero_point(k) => Some(match self.combine {
                Combine::Product => r.shift_ratio(k)?,
                Combine::Sum => r.shift_diff(k)?,
            }),
            _ => None,
        };
        Ok(Self {
            combine: self.combine,
            ambient: self.ambient.clone(),
            factors,
            rhs,
        })
    }

    /// Removes the factor `label` by the substitution that freezes its argument.
    ///
    /// For a factor in `u + beta v` the parameter is the `v`-shift `k` and the
    /// `u`-shift is `-beta k`. For a factor in `v` alone the parameter is the
    /// `u`-shift `h` (with `v` fixed), which cancels every `v`-only factor at once.
    /// A zero parameter is the identity substitution and returns the equation unchanged.
    pub fn eliminate(&self, label: usize, param: &D::Point) -> Result<Self> {
        let target = self.factor(label)?;
        if self.ambient.is_zero_point(param) {
            return Ok(self.clone());
        }
        if target.uses_u {
            let h = self.ambient.neg(&target.beta.apply(param));
            self.substitute(&h, param)
        } else {
            self.substitute(param, &self.ambient.zero())
        }
    }

    /// The map `k -> shift of factor `survivor`` induced by eliminating `eliminated`.
    fn induced_shift_map(
        &self,
        survivor: &Factor<D>,
        eliminated: &Factor<D>,
    ) -> Result<Option<D::Map>> {
        if eliminated.uses_u {
            if survivor.uses_u {
                Ok(Some(survivor.beta.difference(&eliminated.beta)?))
            } else {
                Ok(Some(survivor.beta.clone()))
            }
        } else if survivor.uses_u {
            Ok(Some(D::Map::identity(&self.ambient)))
        } else {
            Ok(None)
        }
    }
}

/// Parameter and evaluation points for running a cascade on a domain.
#[derive(Clone, Debug)]
pub struct Probe<P> {
    /// Values tried for each elimination parameter.
    pub params: Vec<P>,
    pub us: Vec<P>,
    pub vs: Vec<P>,
}

impl<P: Clone> Probe<P> {
    pub fn uniform(points: Vec<P>) -> Self {
        Self {
            params: points.clone(),
            us: points.clone(),
            vs: points,
        }
    }
}

/// Outcome of [`extract_character`] for the surviving factor.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterVerdict<P> {
    pub label: usize,
    pub eliminated: Vec<usize>,
    /// Largest residual of the fully eliminated equation over all parameters and probes.
    pub cascade_residual: f64,
    pub cascade_holds: bool,
    /// Set when three or more factors were eliminated (the cascade then yields the Bernstein equation).
    pub bernstein_defect: Option<f64>,
    pub character_defect: f64,
    pub is_character: bool,
    pub located: Option<P>,
}

fn for_each_tuple<P: Clone>(
    params: &[P],
    len: usize,
    mut visit: impl FnMut(&[P]) -> Result<()>,
) -> Result<()> {
    if params.is_empty() {
        return if len == 0 { visit(&[]) } else { Ok(()) };
    }
    let mut idx = vec![0usize; len];
    loop {
        let tuple: Vec<P> = idx.iter().map(|&i| params[i].clone()).collect();
        visit(&tuple)?;
        let mut pos = len;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < params.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Runs the elimination cascade that isolates one factor and tests it for being a character.
///
/// `order` lists the factors to eliminate; exactly one factor must be left over.
/// Each elimination shifts the survivor by an endomorphism applied to a free
/// parameter, and all of those endomorphisms must be onto, otherwise the cascade
/// says nothing about the survivor and a precondition error is returned.
pub fn extract_character<D: Probing>(
    eq: &Equation<D>,
    order: &[usize],
    probe: &Probe<D::Point>,
    tol: f64,
) -> Result<CharacterVerdict<D::Point>> {
    if eq.combine != Combine::Product {
        return Err(Error::Domain(
            "character extraction needs a product-form equation".into(),
        ));
    }
    let survivors: Vec<usize> = eq
        .labels()
        .into_iter()
        .filter(|l| !order.contains(l))
        .collect();
    let [survivor_label] = survivors[..] else {
        return Err(Error::Domain(format!(
            "elimination order {order:?} must leave exactly one factor, leaves {survivors:?}"
        )));
    };
    let survivor = eq.factor(survivor_label)?;
    for &label in order {
        let eliminated = eq.factor(label)?;
        let onto = match eq.induced_shift_map(survivor, eliminated)? {
            Some(map) => map.is_surjective(&eq.ambient),
            None => false,
        };
        if !onto {
            return Err(Error::Precondition(format!(
                "eliminating factor {label} does not move factor {survivor_label} onto the whole dual group"
            )));
        }
    }

    let mut cascade_residual: f64 = 0.0;
    for_each_tuple(&probe.params, order.len(), |tuple| {
        let mut current = eq.clone();
        for (&label, param) in order.iter().zip(tuple) {
            current = current.eliminate(label, param)?;
        }
        cascade_residual = cascade_residual.max(current.residual(&probe.us, &probe.vs)?);
        Ok(())
    })?;

    let table = &survivor.table;
    let bernstein = if order.len() >= 3 {
        Some(bernstein_defect(table)?)
    } else {
        None
    };
    let character_defect = character_defect(table)?;
    let is_character = character_defect < tol;
    let located = if is_character {
        table.domain().locate_character(table, tol.max(1e-9))
    } else {
        None
    };
    Ok(CharacterVerdict {
        label: survivor_label,
        eliminated: order.to_vec(),
        cascade_residual,
        cascade_holds: cascade_residual < tol,
        bernstein_defect: bernstein,
        character_defect,
        is_character,
        located,
    })
}

/// [`extract_character`] for every factor, eliminating the others lowest index first.
pub fn extract_characters<D: Probing>(
    eq: &Equation<D>,
    probe: &Probe<D::Point>,
    tol: f64,
) -> Result<Vec<CharacterVerdict<D::Point>>> {
    let labels = eq.labels();
    labels
        .iter()
        .map(|&s| {
            let order: Vec<usize> = labels.iter().copied().filter(|&l| l != s).collect();
            extract_character(eq, &order, probe, tol)
        })
        .collect()
}

/// Degree report for a sum-form equation `sum_j psi_j(u + beta_j v) = B(v)`.
///
/// Terms in `v` alone are moved to the right side and count towards `B`.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Report {
    pub equation_residual: f64,
    pub equation_holds: bool,
    /// Least `d` with `psi_j` a polynomial of degree `d`, searched up to `n - 1`, in factor order.
    pub degrees: Vec<Option<usize>>,
    pub rhs_vanishes: bool,
    /// With `n` terms in `u + beta_j v`: `n - 2` when the right side vanishes, else `n - 1`.
    pub degree_bound: usize,
    pub within_bound: bool,
    /// Largest residual of the difference cascade that isolates each `psi_j`.
    pub cascade_residual: f64,
}

/// Checks a sum-form equation on the probe and reports the polynomial degree of each term.
pub fn lemma1_check<D: Probing>(
    eq: &Equation<D>,
    probe: &Probe<D::Point>,
    tol: f64,
) -> Result<Lemma1Report> {
    if eq.combine != Combine::Sum {
        return Err(Error::Domain(
            "the degree check needs a sum-form equation".into(),
        ));
    }
    let u_terms: Vec<&Factor<D>> = eq.factors.iter().filter(|f| f.uses_u).collect();
    let n = u_terms.len();
    if n == 0 {
        return Err(Error::Precondition("no term depends on u".into()));
    }
    for (i, a) in u_terms.iter().enumerate() {
        for b in &u_terms[i + 1..] {
            if !a.beta.difference(&b.beta)?.is_surjective(&eq.ambient) {
                return Err(Error::Precondition(format!(
                    "beta_{} - beta_{} is not onto",
                    a.label, b.label
                )));
            }
        }
    }

    let equation_residual = eq.residual(&probe.us, &probe.vs)?;
    let vanishes = |t: &FunctionTable<D>| t.values().iter().all(|v| v.norm() < tol);
    let rhs_vanishes = eq.rhs.as_ref().is_none_or(vanishes)
        && eq
            .factors
            .iter()
            .filter(|f| !f.uses_u)
            .all(|f| vanishes(&f.table));
    let max_degree = n.saturating_sub(1);
    let degree_bound = if rhs_vanishes {
        n.saturating_sub(2)
    } else {
        max_degree
    };
    let degrees = eq
        .factors
        .iter()
        .map(|f| polynomial_degree(&f.table, max_degree, tol))
        .collect::<Result<Vec<_>>>()?;
    let within_bound = degrees
        .iter()
        .all(|d| matches!(d, Some(d) if *d <= degree_bound));

    // Difference cascade: eliminate every other u-term, then (if B does not vanish)
    // difference once more in u alone, which removes B and every v-only term.
    let mut cascade_residual: f64 = 0.0;
    let labels: Vec<usize> = u_terms.iter().map(|f| f.label).collect();
    let extra = usize::from(!rhs_vanishes);
    for &s in &labels {
        let order: Vec<usize> = labels.iter().rev().copied().filter(|&l| l != s).collect();
        for_each_tuple(&probe.params, order.len() + extra, |tuple| {
            let mut current = eq.clone();
            for (&label, param) in order.iter().zip(tuple) {
                current = current.eliminate(label, param)?;
            }
            if extra == 1 {
                current = current.substitute(&tuple[order.len()], &eq.ambient.zero())?;
            }
            cascade_residual = cascade_residual.max(current.residual(&probe.us, &probe.vs)?);
            Ok(())
        })?;
    }

    Ok(Lemma1Report {
        equation_residual,
        equation_holds: equation_residual < tol,
        degrees,
        rhs_vanishes,
        degree_bound,
        within_bound,
        cascade_residual,
    })
}
