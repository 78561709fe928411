//! Exhaustive duality and functional-equation invariants over a family of small groups.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::counterexamples::bernstein_table;
use crate::endo::{annihilator, Endo};
use crate::error::{Error, Result};
use crate::funceq::ops::{bernstein_defect, character_defect, is_polynomial};
use crate::funceq::table::FunctionTable;
use crate::group::{Element, Group};

/// Largest group the suite enumerates.
pub const SUITE_SIZE_BOUND: usize = 256;

/// Bound on pairing deviations.
pub const SUITE_TOL: f64 = 1e-12;

/// Tolerance for the Bernstein, character and polynomial tests on tables.
pub const TABLE_TOL: f64 = 1e-9;

/// Degrees probed by the polynomial check.
pub const MAX_PROBED_DEGREE: usize = 2;

pub const CHECK_NAMES: [&str; 9] = [
    "pairing-bilinearity",
    "adjoint-identity",
    "double-adjoint",
    "kernel-image-order",
    "hewitt-ross",
    "lemma-l3",
    "character-bernstein",
    "lemma2-constructive",
    "polynomial-constant",
];

/// A deliberate defect used to confirm that the suite catches violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// The adjoint is off by one in its top-left entry.
    Adjoint,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjoint" => Ok(Fault::Adjoint),
            other => Err(Error::Parse {
                line: 1,
                msg: format!("unknown fault {other:?}; expected adjoint"),
            }),
        }
    }
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::Adjoint => f.write_str("adjoint"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub holds: bool,
    pub cases: usize,
    pub max_deviation: Option<f64>,
    pub first_violation: Option<String>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupResult {
    pub group: String,
    pub size: usize,
    pub endomorphisms: usize,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSuiteBody {
    pub family: Vec<String>,
    pub inject_fault: Option<Fault>,
    pub groups: Vec<GroupResult>,
    /// `check on group` for every violated invariant.
    pub violated: Vec<String>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// `Z_2, ..., Z_12`, `Z_2 x Z_4` and `Z_6 x Z_6`.
pub fn default_family() -> Vec<Group> {
    let mut family: Vec<Group> = (2..=12)
        .map(|n| Group::cyclic(n).expect("small cyclic group"))
        .collect();
    family.push(Group::new(&[2, 4]).expect("small group"));
    family.push(Group::new(&[6, 6]).expect("small group"));
    family
}

fn adjoint_of(e: &Endo, fault: Option<Fault>) -> Endo {
    match fault {
        None => e.adjoint(),
        Some(Fault::Adjoint) => {
            let mut m = e.adjoint().matrix().to_vec();
            let n0 = e.group().orders()[0];
            m[0][0] = (m[0][0] + 1) % n0;
            Endo::from_raw_unchecked(e.group(), m)
        }
    }
}

/// Running result of one invariant over many cases.
struct Tally {
    name: &'static str,
    cases: usize,
    deviation: Option<f64>,
    violation: Option<String>,
    note: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            deviation: None,
            violation: None,
            note: None,
        }
    }

    fn deviation(&mut self, d: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        self.deviation = Some(self.deviation.map_or(d, |m| m.max(d)));
        if (d.is_nan() || d >= SUITE_TOL) && self.violation.is_none() {
            self.violation = Some(describe());
        }
    }

    fn truth(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.violation.is_none() {
            self.violation = Some(describe());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.deviation = match (self.deviation, other.deviation) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        self.violation = self.violation.or(other.violation);
        self
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            holds: self.violation.is_none(),
            cases: self.cases,
            max_deviation: self.deviation,
            first_violation: self.violation,
            note: self.note,
        }
    }
}

fn pairing_bilinearity(g: &Group, elements: &[Element]) -> Tally {
    elements
        .par_iter()
        .map(|x| {
            let mut t = Tally::new("pairing-bilinearity");
            for y in elements {
                let xy = g.pair_raw(x, y);
                t.deviation((xy - g.pair_raw(y, x)).norm(), || {
                    format!("(x,y) != (y,x) at x={x}, y={y}")
                });
                for z in elements {
                    let d = (g.pair_raw(&g.add_raw(x, z), y) - xy * g.pair_raw(z, y)).norm();
                    t.deviation(d, || {
                        format!("(x+z,y) != (x,y)(z,y) at x={x}, z={z}, y={y}")
                    });
                }
            }
            t
        })
        .reduce(|| Tally::new("pairing-bilinearity"), Tally::merge)
}

/// Subgroup test by closure under addition.
fn is_subgroup(g: &Group, set: &[Element]) -> bool {
    let members: BTreeSet<&Element> = set.iter().collect();
    members.contains(&g.zero())
        && set
            .iter()
            .all(|a| set.iter().all(|b| members.contains(&g.add_raw(a, b))))
}

struct EndoTallies {
    adjoint: Tally,
    double: Tally,
    order: Tally,
    hewitt_ross: Tally,
    l3: Tally,
}

impl EndoTallies {
    fn new() -> Self {
        Self {
            adjoint: Tally::new("adjoint-identity"),
            double: Tally::new("double-adjoint"),
            order: Tally::new("kernel-image-order"),
            hewitt_ross: Tally::new("hewitt-ross"),
            l3: Tally::new("lemma-l3"),
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            adjoint: self.adjoint.merge(o.adjoint),
            double: self.double.merge(o.double),
            order: self.order.merge(o.order),
            hewitt_ross: self.hewitt_ross.merge(o.hewitt_ross),
            l3: self.l3.merge(o.l3),
        }
    }
}

fn endo_checks(
    g: &Group,
    elements: &[Element],
    e: &Endo,
    fault: Option<Fault>,
) -> Result<EndoTallies> {
    let mut t = EndoTallies::new();
    let adj = adjoint_of(e, fault);
    let ax: Vec<Element> = elements.iter().map(|x| e.apply(x)).collect::<Result<_>>()?;
    let ay: Vec<Element> = elements
        .iter()
        .map(|y| adj.apply(y))
        .collect::<Result<_>>()?;
    for (x, ex) in elements.iter().zip(&ax) {
        for (y, ey) in elements.iter().zip(&ay) {
            let d = (g.pair_raw(ex, y) - g.pair_raw(x, ey)).norm();
            t.adjoint
                .deviation(d, || format!("(ax,y) != (x,a~y) for a={e} at x={x}, y={y}"));
        }
    }
    let double = adjoint_of(&adj, fault);
    t.double.truth(double.matrix() == e.matrix(), || {
        format!("adjoint of adjoint of {e} is {double}")
    });

    let kernel = e.kernel()?;
    let image = e.image()?;
    t.order.truth(
        kernel.len() * image.len() == g.size() && is_subgroup(g, &kernel) && is_subgroup(g, &image),
        || {
            format!(
                "{e}: |ker| = {}, |im| = {}, |X| = {}",
                kernel.len(),
                image.len(),
                g.size()
            )
        },
    );

    let adj_image: BTreeSet<Element> = adj.image()?.into_iter().collect();
    let ann: BTreeSet<Element> = annihilator(g, &kernel)?.into_iter().collect();
    t.hewitt_ross.truth(adj_image == ann, || {
        format!(
            "{e}: image of the adjoint has {} elements, annihilator of the kernel {}",
            adj_image.len(),
            ann.len()
        )
    });

    let surjective = adj_image.len() == g.size();
    t.l3.truth(surjective == (kernel.len() == 1), || {
        format!(
            "{e}: adjoint surjective = {surjective}, kernel size {}",
            kernel.len()
        )
    });
    Ok(t)
}

fn character_table(g: &Group, y: &Element) -> FunctionTable<Group> {
    FunctionTable::from_fn(g.clone(), |x| g.pair_raw(x, y))
}

fn character_bernstein(g: &Group, elements: &[Element]) -> Result<Tally> {
    let mut t = Tally::new("character-bernstein");
    for y in elements {
        let chi = character_table(g, y);
        let bd = bernstein_defect(&chi)?;
        let cd = character_defect(&chi)?;
        t.truth(bd < TABLE_TOL && cd < TABLE_TOL, || {
            format!("character {y}: Bernstein defect {bd:e}, character defect {cd:e}")
        });
    }
    Ok(t)
}

/// On groups with at most one involution, ratios of characters passing the Bernstein test are characters.
fn lemma2_constructive(g: &Group, elements: &[Element]) -> Result<Tally> {
    let mut t = Tally::new("lemma2-constructive");
    if g.order_two_count() > 1 {
        t.note = Some(format!(
            "skipped: {} elements of order two",
            g.order_two_count()
        ));
        return Ok(t);
    }
    let chars: Vec<FunctionTable<Group>> = elements.iter().map(|y| character_table(g, y)).collect();
    for (a, ca) in elements.iter().zip(&chars) {
        for (b, cb) in elements.iter().zip(&chars) {
            let f = ca.div(cb)?;
            if bernstein_defect(&f)? < TABLE_TOL {
                let cd = character_defect(&f)?;
                t.truth(cd < TABLE_TOL, || {
                    format!("ratio of characters {a}/{b} passes Bernstein, defect {cd:e}")
                });
            } else {
                t.truth(false, || {
                    format!("ratio of characters {a}/{b} fails the Bernstein test")
                });
            }
        }
    }
    Ok(t)
}

fn is_constant(f: &FunctionTable<Group>) -> bool {
    let first = f.values()[0];
    f.values().iter().all(|v| (v - first).norm() < TABLE_TOL)
}

/// Tables passing a polynomial test of degree at most [`MAX_PROBED_DEGREE`] must be constant.
fn polynomial_constant(g: &Group, elements: &[Element]) -> Result<Tally> {
    let mut t = Tally::new("polynomial-constant");
    let mut candidates: Vec<(String, FunctionTable<Group>)> = vec![
        (
            "constant 1".into(),
            FunctionTable::constant(g.clone(), Complex64::new(1.0, 0.0)),
        ),
        (
            "constant 2-i".into(),
            FunctionTable::constant(g.clone(), Complex64::new(2.0, -1.0)),
        ),
    ];
    for y in elements {
        candidates.push((format!("character {y}"), character_table(g, y)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.size() as u64);
    for k in 0..4 {
        let values = (0..g.size())
            .map(|_| Complex64::new(rng.random(), rng.random()))
            .collect();
        candidates.push((
            format!("random table {k}"),
            FunctionTable::new(g.clone(), values)?,
        ));
    }
    let coords = FunctionTable::from_fn(g.clone(), |x| Complex64::new(x.coords()[0] as f64, 0.0));
    candidates.push(("first coordinate".into(), coords));
    if let Ok(b) = bernstein_table(g) {
        candidates.push(("exp(i pi m n)".into(), b));
    }
    for (name, f) in &candidates {
        let constant = is_constant(f);
        for n in 0..=MAX_PROBED_DEGREE {
            let poly = is_polynomial(f, n, TABLE_TOL)?;
            t.truth(poly == constant, || {
                format!("{name}: polynomial of degree {n} = {poly}, constant = {constant}")
            });
        }
    }
    Ok(t)
}

fn run_group(g: &Group, fault: Option<Fault>) -> Result<GroupResult> {
    let elements = g.elements()?;
    let endos = Endo::enumerate_all(g);
    let per_endo = endos
        .par_iter()
        .map(|e| endo_checks(g, &elements, e, fault))
        .try_reduce(EndoTallies::new, |a, b| Ok(a.merge(b)))?;
    let checks = vec![
        pairing_bilinearity(g, &elements).finish(),
        per_endo.adjoint.finish(),
        per_endo.double.finish(),
        per_endo.order.finish(),
        per_endo.hewitt_ross.finish(),
        per_endo.l3.finish(),
        character_bernstein(g, &elements)?.finish(),
        lemma2_constructive(g, &elements)?.finish(),
        polynomial_constant(g, &elements)?.finish(),
    ];
    Ok(GroupResult {
        group: g.label(),
        size: g.size(),
        endomorphisms: endos.len(),
        checks,
    })
}

pub fn run_lemma_suite(family: &[Group], fault: Option<Fault>) -> Result<LemmaSuiteBody> {
    if family.is_empty() {
        return Err(Error::Domain("the group family is empty".into()));
    }
    if let Some(g) = family.iter().find(|g| g.size() > SUITE_SIZE_BOUND) {
        return Err(Error::Capacity {
            size: g.size() as u128,
            bound: SUITE_SIZE_BOUND as u64,
        });
    }
    let groups = family
        .iter()
        .map(|g| run_group(g, fault))
        .collect::<Result<Vec<_>>>()?;
    let violated: Vec<String> = groups
        .iter()
        .flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.holds)
                .map(move |c| format!("{} on {}", c.name, r.group))
        })
        .collect();
    let max_deviation = groups
        .iter()
        .flat_map(|r| r.checks.iter().filter_map(|c| c.max_deviation))
        .fold(0.0, f64::max);
    Ok(LemmaSuiteBody {
        family: family.iter().map(Group::label).collect(),
        inject_fault: fault,
        passed: violated.is_empty(),
        violated,
        max_deviation,
        groups,
    })
}
