//! Probability distributions on finite abelian groups and their characteristic functions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::funceq::table::FunctionTable;
use crate::group::{Element, Group};

/// Masses may deviate from summing to one by this much.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Threshold used by [`random_dist`] when rejecting near-vanishing draws.
pub const GENERATION_NONVANISHING_TOL: f64 = 0.05;

/// Number of draws [`random_dist`] attempts before giving up.
pub const GENERATION_BUDGET: usize = 1000;

/// A probability distribution on a finite abelian group, stored as masses in element order.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    group: Group,
    masses: Vec<f64>,
}

impl Distribution {
    /// Validates nonnegativity and total mass.
    pub fn new(group: &Group, masses: Vec<f64>) -> Result<Self> {
        if masses.len() != group.size() {
            return Err(Error::Domain(format!(
                "{} masses given for a group of size {}",
                masses.len(),
                group.size()
            )));
        }
        if let Some(i) = masses.iter().position(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Domain(format!(
                "mass {} at index {i} is not a nonnegative number",
                masses[i]
            )));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Domain(format!("masses sum to {total}, not 1")));
        }
        Ok(Self {
            group: group.clone(),
            masses,
        })
    }

    /// Clamps tiny negative rounding noise to zero and rescales to total mass one.
    fn normalized(group: &Group, mut masses: Vec<f64>) -> Result<Self> {
        for m in &mut masses {
            if *m < 0.0 {
                if *m < -MASS_TOLERANCE {
                    return Err(Error::Domain(format!("negative mass {m}")));
                }
                *m = 0.0;
            }
        }
        let total: f64 = masses.iter().sum();
        for m in &mut masses {
            *m /= total;
        }
        Self::new(group, masses)
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, x: &Element) -> Result<f64> {
        self.group.check_member(x)?;
        Ok(self.masses[self.group.index_of(x)])
    }

    /// Elements carrying positive mass.
    pub fn support(&self) -> Vec<Element> {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(i, _)| self.group.element_at(i))
            .collect()
    }

    fn same_group(&self, other: &Group) -> Result<()> {
        if &self.group != other {
            return Err(Error::Domain(format!(
                "distributions live on {} and {}",
                self.group, other
            )));
        }
        Ok(())
    }
}

/// The point mass `E_x`.
pub fn degenerate(g: &Group, x: &Element) -> Result<Distribution> {
    g.check_member(x)?;
    let mut masses = vec![0.0; g.size()];
    masses[g.index_of(x)] = 1.0;
    Ok(Distribution {
        group: g.clone(),
        masses,
    })
}

/// The Haar (uniform) distribution.
pub fn uniform(g: &Group) -> Distribution {
    let n = g.size();
    Distribution {
        group: g.clone(),
        masses: vec![1.0 / n as f64; n],
    }
}

/// The characteristic function `y -> sum_x mu(x) (x, y)` on the dual (identified with the group).
pub fn char_fn(mu: &Distribution) -> FunctionTable<Group> {
    let g = &mu.group;
    let support: Vec<(Element, f64)> = mu
        .masses
        .iter()
        .enumerate()
        .filter(|(_, m)| **m != 0.0)
        .map(|(i, m)| (g.element_at(i), *m))
        .collect();
    FunctionTable::from_fn(g.clone(), |y| {
        support
            .iter()
            .map(|(x, m)| g.pair_raw(x, y) * *m)
            .sum::<Complex64>()
    })
}

/// `(mu * nu)(z) = sum_x mu(x) nu(z - x)`.
pub fn convolve(mu: &Distribution, nu: &Distribution) -> Result<Distribution> {
    mu.same_group(&nu.group)?;
    let g = &mu.group;
    let mut masses = vec![0.0; g.size()];
    for (i, &a) in mu.masses.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let x = g.element_at(i);
        for (j, &b) in nu.masses.iter().enumerate() {
            if b != 0.0 {
                masses[g.index_of(&g.add_raw(&x, &g.element_at(j)))] += a * b;
            }
        }
    }
    Ok(Distribution {
        group: g.clone(),
        masses,
    })
}

/// The translate `mu * E_x`.
pub fn shift(mu: &Distribution, x: &Element) -> Result<Distribution> {
    convolve(mu, &degenerate(&mu.group, x)?)
}

/// Distribution of `e(xi)` for `xi ~ mu`.
pub fn pushforward(e: &Endo, mu: &Distribution) -> Result<Distribution> {
    mu.same_group(e.group())?;
    let g = &mu.group;
    let mut masses = vec![0.0; g.size()];
    for (i, &m) in mu.masses.iter().enumerate() {
        if m != 0.0 {
            masses[g.index_of(&e.apply_raw(&g.element_at(i)))] += m;
        }
    }
    Ok(Distribution {
        group: g.clone(),
        masses,
    })
}

/// The Poisson-type distribution `e(lam E_x0)` with characteristic function
/// `exp(lam ((x0, y) - 1))`, obtained by inverting that closed form.
pub fn poisson(g: &Group, lam: f64, x0: &Element) -> Result<Distribution> {
    if !(lam >= 0.0 && lam.is_finite()) {
        return Err(Error::Domain(format!(
            "Poisson intensity must be nonnegative, got {lam}"
        )));
    }
    g.check_member(x0)?;
    let elements = g.elements()?;
    let hat: Vec<Complex64> = elements
        .iter()
        .map(|y| (lam * (g.pair_raw(x0, y) - 1.0)).exp())
        .collect();
    let n = g.size() as f64;
    let masses = elements
        .iter()
        .map(|x| {
            let s: Complex64 = elements
                .iter()
                .zip(&hat)
                .map(|(y, h)| h * g.pair_raw(x, y).conj())
                .sum();
            s.re / n
        })
        .collect();
    Distribution::normalized(g, masses)
}

/// Half the l1 distance between the mass vectors.
pub fn total_variation(mu: &Distribution, nu: &Distribution) -> Result<f64> {
    mu.same_group(&nu.group)?;
    Ok(0.5
        * mu.masses
            .iter()
            .zip(&nu.masses)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Whether `min_y |mu^(y)| > tol`.
pub fn nonvanishing(mu: &Distribution, tol: f64) -> bool {
    char_fn(mu).min_modulus() > tol
}

/// A random distribution with a characteristic function bounded away from zero.
///
/// Draws raw masses, mixes them with `floor * E_0`, and redraws until the result
/// passes [`nonvanishing`] at [`GENERATION_NONVANISHING_TOL`].
pub fn random_dist(g: &Group, seed: u64, floor: f64) -> Result<Distribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_dist_with(g, &mut rng, floor)
}

/// [`random_dist`] drawing from a caller-supplied generator.
pub fn random_dist_with<R: Rng>(g: &Group, rng: &mut R, floor: f64) -> Result<Distribution> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::Domain(format!(
            "floor must lie in (0, 1), got {floor}"
        )));
    }
    let n = g.size();
    for _ in 0..GENERATION_BUDGET {
        let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let mut masses: Vec<f64> = raw.iter().map(|r| (1.0 - floor) * r / total).collect();
        masses[0] += floor;
        let mu = Distribution::normalized(g, masses)?;
        if nonvanishing(&mu, GENERATION_NONVANISHING_TOL) {
            return Ok(mu);
        }
    }
    Err(Error::Generation(format!(
        "no distribution on {g} with nonvanishing characteristic function after {GENERATION_BUDGET} draws"
    )))
}

/// The pair of linear forms `L1 = sum a_j xi_j`, `L2 = sum b_j xi_j`.
#[derive(Clone, Debug)]
pub struct LinearFormSpec {
    group: Group,
    coeffs1: Vec<Endo>,
    coeffs2: Vec<Endo>,
}

impl LinearFormSpec {
    pub fn general(group: &Group, coeffs1: Vec<Endo>, coeffs2: Vec<Endo>) -> Result<Self> {
        if coeffs1.len() != coeffs2.len() || !(2..=4).contains(&coeffs1.len()) {
            return Err(Error::Domain(format!(
                "linear forms need 2 to 4 matching coefficients, got {} and {}",
                coeffs1.len(),
                coeffs2.len()
            )));
        }
        if coeffs1.iter().chain(&coeffs2).any(|e| e.group() != group) {
            return Err(Error::Domain(format!(
                "all coefficients must act on {group}"
            )));
        }
        Ok(Self {
            group: group.clone(),
            coeffs1,
            coeffs2,
        })
    }

    /// `L1 = xi_1 + ... + xi_n`, `L2 = b_1 xi_1 + ... + b_n xi_n`.
    pub fn form_i(b: &[Endo]) -> Result<Self> {
        let group = first_group(b)?;
        Self::general(&group, vec![Endo::identity(&group); b.len()], b.to_vec())
    }

    /// `L1 = xi_1 + xi_2`, `L2 = b_1 xi_1 + b_2 xi_2 + b_3 xi_3`.
    pub fn form_ii(b: &[Endo; 3]) -> Result<Self> {
        let group = first_group(b)?;
        let id = Endo::identity(&group);
        Self::general(&group, vec![id.clone(), id, Endo::zero(&group)], b.to_vec())
    }

    /// `L1 = xi_1 + xi_2`, `L2 = xi_2 + xi_3`.
    pub fn kotlarski(group: &Group) -> Result<Self> {
        Self::form_ii(&Self::kotlarski_coeffs(group))
    }

    /// The second-form coefficients `(0, 1, 1)` that give the two-sum layout.
    pub fn kotlarski_coeffs(group: &Group) -> [Endo; 3] {
        [
            Endo::zero(group),
            Endo::identity(group),
            Endo::identity(group),
        ]
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn arity(&self) -> usize {
        self.coeffs1.len()
    }

    pub fn coeffs1(&self) -> &[Endo] {
        &self.coeffs1
    }

    pub fn coeffs2(&self) -> &[Endo] {
        &self.coeffs2
    }

    fn check_inputs(&self, dists: &[Distribution]) -> Result<()> {
        if dists.len() != self.arity() {
            return Err(Error::Domain(format!(
                "{} distributions given for {} variables",
                dists.len(),
                self.arity()
            )));
        }
        dists.iter().try_for_each(|d| d.same_group(&self.group))
    }
}

fn first_group(b: &[Endo]) -> Result<Group> {
    b.first()
        .map(|e| e.group().clone())
        .ok_or_else(|| Error::Domain("no coefficients given".into()))
}

/// `(u, v) -> E[(L1, u)(L2, v)] = prod_j mu_j^(a~_j u + b~_j v)` on the dual of `X x X`.
///
/// The table lives on `group.product(group)`, so the index of `(u, v)` is `u_index * |X| + v_index`.
pub fn joint_char(spec: &LinearFormSpec, dists: &[Distribution]) -> Result<FunctionTable<Group>> {
    spec.check_inputs(dists)?;
    let g = &spec.group;
    let square = g.product(g)?;
    let hats: Vec<FunctionTable<Group>> = dists.iter().map(char_fn).collect();
    let adj1: Vec<Endo> = spec.coeffs1.iter().map(Endo::adjoint).collect();
    let adj2: Vec<Endo> = spec.coeffs2.iter().map(Endo::adjoint).collect();
    let rank = g.rank();
    Ok(FunctionTable::from_fn(square, |uv| {
        let u = Element::from_coords(uv.coords()[..rank].to_vec());
        let v = Element::from_coords(uv.coords()[rank..].to_vec());
        (0..hats.len())
            .map(|j| {
                let arg = g.add_raw(&adj1[j].apply_raw(&u), &adj2[j].apply_raw(&v));
                hats[j].values()[g.index_of(&arg)]
            })
            .product()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    fn family() -> Vec<Group> {
        [
            vec![2],
            vec![5],
            vec![6],
            vec![8],
            vec![4, 2],
            vec![2, 2, 2],
            vec![6, 6],
            vec![4, 4, 4],
        ]
        .iter()
        .map(|o| Group::new(o).unwrap())
        .collect()
    }

    #[test]
    fn degenerate_and_uniform() {
        let g = Group::cyclic(4).unwrap();
        assert_eq!(
            degenerate(&g, &g.zero()).unwrap().masses(),
            &[1.0, 0.0, 0.0, 0.0]
        );
        assert!(char_fn(&degenerate(&g, &g.zero()).unwrap())
            .values()
            .iter()
            .all(|v| close(*v, Complex64::new(1.0, 0.0), 1e-15)));
        let x = g.element(&[3]).unwrap();
        let hat = char_fn(&degenerate(&g, &x).unwrap());
        for (y, v) in hat.iter() {
            assert!(close(v, g.pair(&x, &y).unwrap(), 1e-15));
        }
        let hat = char_fn(&uniform(&g));
        for (y, v) in hat.iter() {
            let want = if y.is_zero() { 1.0 } else { 0.0 };
            assert!(close(v, Complex64::new(want, 0.0), 1e-12));
        }
        let z2 = Group::cyclic(2).unwrap();
        let mix = Distribution::new(&z2, vec![0.5, 0.5]).unwrap();
        let hat = char_fn(&mix);
        assert!(close(hat.values()[0], Complex64::new(1.0, 0.0), 1e-15));
        assert!(close(hat.values()[1], Complex64::new(0.0, 0.0), 1e-15));
    }

    #[test]
    fn validation() {
        let g = Group::cyclic(3).unwrap();
        assert!(Distribution::new(&g, vec![0.5, 0.5]).is_err());
        assert!(Distribution::new(&g, vec![0.5, 0.6, -0.1]).is_err());
        assert!(Distribution::new(&g, vec![0.5, 0.4, 0.0]).is_err());
        assert!(degenerate(&g, &Element::from_coords(vec![3])).is_err());
        let other = Group::cyclic(4).unwrap();
        assert!(convolve(&uniform(&g), &uniform(&other)).is_err());
    }

    #[test]
    fn convolution_examples() {
        let g = Group::new(&[4, 3]).unwrap();
        let mu = random_dist(&g, 3, 0.4).unwrap();
        let same = convolve(&mu, &degenerate(&g, &g.zero()).unwrap()).unwrap();
        assert!(total_variation(&mu, &same).unwrap() < 1e-15);
        let x = g.element(&[1, 2]).unwrap();
        let y = g.element(&[3, 2]).unwrap();
        let xy = convolve(&degenerate(&g, &x).unwrap(), &degenerate(&g, &y).unwrap()).unwrap();
        assert_eq!(xy, degenerate(&g, &g.add(&x, &y).unwrap()).unwrap());
        // uniform * mu against direct summation
        let u = convolve(&uniform(&g), &mu).unwrap();
        for (z, m) in g.elements().unwrap().iter().zip(u.masses()) {
            let direct: f64 = g
                .elements()
                .unwrap()
                .iter()
                .map(|x| mu.mass(&g.sub(z, x).unwrap()).unwrap() / 12.0)
                .sum();
            assert!((m - direct).abs() < 1e-15);
            assert!((m - 1.0 / 12.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pushforward_examples() {
        let g = Group::cyclic(6).unwrap();
        let mu = random_dist(&g, 9, 0.3).unwrap();
        assert_eq!(pushforward(&Endo::identity(&g), &mu).unwrap(), mu);
        assert_eq!(
            pushforward(&Endo::zero(&g), &mu).unwrap(),
            degenerate(&g, &g.zero()).unwrap()
        );
        let twice = pushforward(&Endo::scalar(&g, 2), &uniform(&g)).unwrap();
        // count preimages of each z under x -> 2x
        for (z, m) in g.elements().unwrap().iter().zip(twice.masses()) {
            let count = (0..6).filter(|x| (2 * x) % 6 == z.coords()[0]).count();
            assert!((m - count as f64 / 6.0).abs() < 1e-15);
        }
        assert_eq!(twice.support().len(), 3);
    }

    #[test]
    fn convolution_theorem_and_hermitian_symmetry() {
        for (s, g) in family().iter().enumerate() {
            let mu = random_dist(g, s as u64, 0.3).unwrap();
            let nu = random_dist(g, 100 + s as u64, 0.3).unwrap();
            let lhs = char_fn(&convolve(&mu, &nu).unwrap());
            let rhs = char_fn(&mu).mul(&char_fn(&nu)).unwrap();
            assert!(lhs.sup_distance(&rhs).unwrap() < 1e-10);
            let hat = char_fn(&mu);
            for (y, v) in hat.iter() {
                assert!(close(hat.at(&g.neg(&y).unwrap()).unwrap(), v.conj(), 1e-12));
            }
            assert!(close(
                hat.at(&g.zero()).unwrap(),
                Complex64::new(1.0, 0.0),
                1e-12
            ));
        }
    }

    #[test]
    fn pushforward_adjoint_duality() {
        for (s, g) in family().iter().enumerate() {
            let mu = random_dist(g, 7 + s as u64, 0.3).unwrap();
            let hat = char_fn(&mu);
            for e in Endo::enumerate_all(g).iter().take(200) {
                let pushed = char_fn(&pushforward(e, &mu).unwrap());
                let adj = e.adjoint();
                for (y, v) in pushed.iter() {
                    assert!(close(v, hat.at(&adj.apply(&y).unwrap()).unwrap(), 1e-10));
                }
            }
        }
    }

    #[test]
    fn poisson_examples_and_semigroup() {
        let g = Group::cyclic(6).unwrap();
        let x0 = g.element(&[3]).unwrap();
        assert!(
            total_variation(
                &poisson(&g, 0.0, &x0).unwrap(),
                &degenerate(&g, &g.zero()).unwrap()
            )
            .unwrap()
                < 1e-15
        );
        let lam = 0.7;
        let p = poisson(&g, lam, &x0).unwrap();
        let hat = char_fn(&p);
        // (3, y) = 1 for even y and -1 for odd y
        assert!(close(hat.values()[2], Complex64::new(1.0, 0.0), 1e-12));
        assert!(close(
            hat.values()[1],
            Complex64::new((-2.0 * lam).exp(), 0.0),
            1e-12
        ));
        // support is the subgroup generated by x0, masses cosh/sinh weighted
        assert!((p.masses()[0] - (-lam).exp() * lam.cosh()).abs() < 1e-12);
        assert!((p.masses()[3] - (-lam).exp() * lam.sinh()).abs() < 1e-12);

        for g in family() {
            let x0 = g.element_at(g.size() - 1);
            for (l1, l2) in [(0.3, 0.5), (1.2, 0.1), (2.0, 2.0)] {
                let lhs = convolve(
                    &poisson(&g, l1, &x0).unwrap(),
                    &poisson(&g, l2, &x0).unwrap(),
                )
                .unwrap();
                let rhs = poisson(&g, l1 + l2, &x0).unwrap();
                assert!(total_variation(&lhs, &rhs).unwrap() < 1e-9);
            }
        }
        assert!(poisson(&g, -1.0, &x0).is_err());
    }

    #[test]
    fn poisson_matches_series() {
        // e(lam E_x) = e^{-lam} sum_k lam^k / k! E_{kx}
        let g = Group::new(&[5, 2]).unwrap();
        let x0 = g.element(&[2, 1]).unwrap();
        let lam: f64 = 1.3;
        let mut series = vec![0.0; g.size()];
        let mut term = (-lam).exp();
        for k in 0..80 {
            series[g.index_of(&g.scale(k, &x0))] += term;
            term *= lam / (k + 1) as f64;
        }
        let p = poisson(&g, lam, &x0).unwrap();
        for (a, b) in p.masses().iter().zip(&series) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonvanishing_examples() {
        let g = Group::cyclic(2).unwrap();
        assert!(nonvanishing(
            &degenerate(&g, &g.element(&[1]).unwrap()).unwrap(),
            0.5
        ));
        assert!(!nonvanishing(&uniform(&g), 1e-12));
        let d = Distribution::new(&g, vec![0.9, 0.1]).unwrap();
        assert!((char_fn(&d).min_modulus() - 0.8).abs() < 1e-12);
        assert!(nonvanishing(&d, 0.79));
    }

    #[test]
    fn random_dist_contract() {
        let g = Group::new(&[4, 3]).unwrap();
        for seed in 0..100 {
            let mu = random_dist(&g, seed, 0.3).unwrap();
            assert!((mu.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(nonvanishing(&mu, GENERATION_NONVANISHING_TOL));
            assert_eq!(mu, random_dist(&g, seed, 0.3).unwrap());
        }
        assert!(random_dist(&g, 0, 0.0).is_err());
        assert!(random_dist(&g, 0, 1.0).is_err());
    }

    /// Exact joint law of `(L1, L2)` by summing over all tuples, then its two-variable transform.
    fn joint_char_by_tuples(spec: &LinearFormSpec, dists: &[Distribution]) -> FunctionTable<Group> {
        let g = spec.group();
        let n = g.size();
        let square = g.product(g).unwrap();
        let mut law = vec![0.0; n * n];
        let arity = dists.len();
        let mut idx = vec![0usize; arity];
        'outer: loop {
            let p: f64 = idx.iter().zip(dists).map(|(&i, d)| d.masses()[i]).product();
            if p > 0.0 {
                let mut l1 = g.zero();
                let mut l2 = g.zero();
                for (j, &i) in idx.iter().enumerate() {
                    let x = g.element_at(i);
                    l1 = g.add(&l1, &spec.coeffs1()[j].apply(&x).unwrap()).unwrap();
                    l2 = g.add(&l2, &spec.coeffs2()[j].apply(&x).unwrap()).unwrap();
                }
                law[g.index_of(&l1) * n + g.index_of(&l2)] += p;
            }
            for pos in (0..arity).rev() {
                idx[pos] += 1;
                if idx[pos] < n {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
        char_fn(&Distribution::new(&square, law).unwrap())
    }

    #[test]
    fn joint_char_matches_tuple_oracle() {
        let groups: Vec<Group> = [vec![5], vec![6], vec![4, 2], vec![4, 3], vec![4, 4]]
            .iter()
            .map(|o| Group::new(o).unwrap())
            .collect();
        let mut seed = 0;
        for g in &groups {
            let endos = Endo::enumerate_all(g);
            for t in 0..4 {
                let pick = |k: usize| endos[(7 * t + 13 * k + 1) % endos.len()].clone();
                let dists: Vec<Distribution> = (0..3)
                    .map(|_| {
                        seed += 1;
                        random_dist(g, seed, 0.3).unwrap()
                    })
                    .collect();
                let specs = [
                    LinearFormSpec::form_i(&[pick(0), pick(1), pick(2)]).unwrap(),
                    LinearFormSpec::form_ii(&[pick(3), pick(4), pick(5)]).unwrap(),
                    LinearFormSpec::general(
                        g,
                        vec![pick(6), pick(7), pick(8)],
                        vec![pick(9), pick(10), pick(11)],
                    )
                    .unwrap(),
                    LinearFormSpec::kotlarski(g).unwrap(),
                ];
                for spec in &specs {
                    let fast = joint_char(spec, &dists).unwrap();
                    let slow = joint_char_by_tuples(spec, &dists);
                    assert!(fast.sup_distance(&slow).unwrap() < 1e-9);
                }
                let two = LinearFormSpec::form_i(&[pick(0), pick(1)]).unwrap();
                assert!(
                    joint_char(&two, &dists[..2])
                        .unwrap()
                        .sup_distance(&joint_char_by_tuples(&two, &dists[..2]))
                        .unwrap()
                        < 1e-9
                );
            }
        }
    }

    #[test]
    fn joint_char_basics() {
        let g = Group::cyclic(5).unwrap();
        let b = [
            Endo::scalar(&g, 1),
            Endo::scalar(&g, 2),
            Endo::scalar(&g, 3),
        ];
        let spec = LinearFormSpec::form_i(&b).unwrap();
        let point = vec![degenerate(&g, &g.zero()).unwrap(); 3];
        assert!(joint_char(&spec, &point)
            .unwrap()
            .values()
            .iter()
            .all(|v| close(*v, Complex64::new(1.0, 0.0), 1e-15)));
        assert!(joint_char(&spec, &point[..2]).is_err());

        // second form with b_1 = 0: the third factor depends on v only
        let b = [Endo::zero(&g), Endo::scalar(&g, 2), Endo::scalar(&g, 4)];
        let spec = LinearFormSpec::form_ii(&b).unwrap();
        let dists: Vec<Distribution> = (0..3).map(|s| random_dist(&g, s, 0.3).unwrap()).collect();
        let hats: Vec<FunctionTable<Group>> = dists.iter().map(char_fn).collect();
        let joint = joint_char(&spec, &dists).unwrap();
        for u in g.elements().unwrap() {
            for v in g.elements().unwrap() {
                let bv = |j: usize| b[j].adjoint().apply(&v).unwrap();
                let want = hats[0].at(&g.add(&u, &bv(0)).unwrap()).unwrap()
                    * hats[1].at(&g.add(&u, &bv(1)).unwrap()).unwrap()
                    * hats[2].at(&bv(2)).unwrap();
                let idx = g.index_of(&u) * 5 + g.index_of(&v);
                assert!(close(joint.values()[idx], want, 1e-12));
            }
        }
    }
}
