//! Seeded random elements and sets for property tests and the fuzzer.

use num::BigRational;
use rand::Rng;

use super::backend::{Backend, Element, Kind};
use crate::field::{Coeff, CoeffField, Field, PrimeField, Rationals};
use crate::frac::FracField;
use crate::groups::GroupElem;
use crate::poly::{self, Poly};

/// Size limits for sampled elements. Fuzzing stays fast because every
/// budget is a hard cap, not a distribution parameter.
#[derive(Clone, Copy, Debug)]
pub struct SampleBudget {
    /// Largest numerator/denominator degree for RF elements.
    pub rf_degree: usize,
    /// Largest support size for GA elements.
    pub ga_support: usize,
    /// Magnitude bound for integers drawn in characteristic zero.
    pub max_int: i64,
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget {
            rf_degree: 2,
            ga_support: 3,
            max_int: 6,
        }
    }
}

fn sample_fp(f: &PrimeField, rng: &mut impl Rng) -> u64 {
    rng.gen_range(0..f.p())
}

fn sample_q(rng: &mut impl Rng, max_int: i64) -> BigRational {
    let numer = rng.gen_range(-max_int..=max_int);
    let denom = rng.gen_range(1..=max_int.max(1));
    BigRational::new(numer.into(), denom.into())
}

fn sample_poly_fp(
    f: &PrimeField,
    rng: &mut impl Rng,
    degree: usize,
    nonzero: bool,
) -> Poly<u64> {
    loop {
        let coeffs: Vec<u64> = (0..=degree).map(|_| sample_fp(f, rng)).collect();
        let p = poly::from_coeffs(f, coeffs);
        if !nonzero || !p.is_zero_poly() {
            return p;
        }
    }
}

fn sample_poly_q(
    rng: &mut impl Rng,
    degree: usize,
    max_int: i64,
    nonzero: bool,
) -> Poly<BigRational> {
    let f = Rationals;
    loop {
        let coeffs: Vec<BigRational> = (0..=degree).map(|_| sample_q(rng, max_int)).collect();
        let p = poly::from_coeffs(&f, coeffs);
        if !nonzero || !p.is_zero_poly() {
            return p;
        }
    }
}

fn sample_ratfn_fp(f: &FracField<PrimeField>, rng: &mut impl Rng) -> Coeff {
    let (dn, dd) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
    let num = sample_poly_fp(f.base(), rng, dn, false);
    let den = sample_poly_fp(f.base(), rng, dd, true);
    Coeff::RatFnFp(f.make(num, den))
}

fn sample_ratfn_q(f: &FracField<Rationals>, rng: &mut impl Rng, max_int: i64) -> Coeff {
    let (dn, dd) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
    let num = sample_poly_q(rng, dn, max_int, false);
    let den = sample_poly_q(rng, dd, max_int, true);
    Coeff::RatFnQ(f.make(num, den))
}

/// One scalar of the base field, possibly zero.
pub fn sample_coeff(k: &CoeffField, rng: &mut impl Rng, budget: &SampleBudget) -> Coeff {
    match k {
        CoeffField::Fp(f) => Coeff::Fp(sample_fp(f, rng)),
        CoeffField::Q(_) => Coeff::Q(sample_q(rng, budget.max_int)),
        CoeffField::RatFnFp(f) => sample_ratfn_fp(f, rng),
        CoeffField::RatFnQ(f) => sample_ratfn_q(f, rng, budget.max_int),
    }
}

fn sample_group_elem(b: &Backend, rng: &mut impl Rng) -> GroupElem {
    let group = b.group().expect("group-algebra backend");
    match group {
        crate::groups::Group::Cayley { table, .. } => {
            GroupElem::Idx(rng.gen_range(0..table.len()))
        }
        crate::groups::Group::Abelian { free_rank, torsion } => {
            let mut v: Vec<i64> = (0..*free_rank).map(|_| rng.gen_range(-3..=3)).collect();
            v.extend(torsion.iter().map(|&d| rng.gen_range(0..d as i64)));
            GroupElem::Ab(v)
        }
    }
}

/// One nonzero element of the backend.
pub fn sample_element(b: &Backend, rng: &mut impl Rng, budget: &SampleBudget) -> Element {
    let k = b.coeff_field().clone();
    loop {
        let candidate = match b.kind() {
            Kind::Ff { n, .. } | Kind::Ext { n, .. } => {
                Element::Residue((0..*n).map(|_| sample_coeff(&k, rng, budget)).collect())
            }
            Kind::Rf { field } => {
                let (dn, dd) = (
                    rng.gen_range(0..=budget.rf_degree),
                    rng.gen_range(0..=budget.rf_degree),
                );
                let num = sample_poly_k(&k, rng, dn, budget, false);
                let den = sample_poly_k(&k, rng, dd, budget, true);
                Element::Fraction(field.make(num, den))
            }
            Kind::Quat { .. } => Element::Quaternion(std::array::from_fn(|_| {
                sample_q(rng, budget.max_int)
            })),
            Kind::Ga { order, .. } => {
                let cap = order.map_or(budget.ga_support, |o| {
                    budget.ga_support.min(o as usize)
                });
                let support = rng.gen_range(1..=cap.max(1));
                let mut m = std::collections::BTreeMap::new();
                for _ in 0..support {
                    let g = sample_group_elem(b, rng);
                    let c = sample_coeff(&k, rng, budget);
                    if !k.is_zero(&c) {
                        m.insert(g, c);
                    }
                }
                Element::GroupSum(m)
            }
        };
        if !b.is_zero(&candidate) {
            return candidate;
        }
    }
}

/// A list of `size` nonzero elements with no repeats.
pub fn sample_set(
    b: &Backend,
    rng: &mut impl Rng,
    size: usize,
    budget: &SampleBudget,
) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::with_capacity(size);
    let mut attempts = 0usize;
    while out.len() < size {
        let e = sample_element(b, rng, budget);
        if out.contains(&e) {
            // Tiny backends can exhaust distinct draws; widen by taking the
            // sum with an earlier element after too many collisions.
            attempts += 1;
            if attempts > 64 {
                break;
            }
            continue;
        }
        out.push(e);
    }
    out
}

fn sample_poly_k(
    k: &CoeffField,
    rng: &mut impl Rng,
    degree: usize,
    budget: &SampleBudget,
    nonzero: bool,
) -> Poly<Coeff> {
    loop {
        let coeffs: Vec<Coeff> = (0..=degree).map(|_| sample_coeff(k, rng, budget)).collect();
        let p = poly::from_coeffs(k, coeffs);
        if !nonzero || !p.is_zero_poly() {
            return p;
        }
    }
}
