//! Rational functions in one indeterminate over a [`Field`], kept in the
//! canonical reduced form: gcd(num, den) = 1 and monic denominator. Zero is
//! `0/1`.

use crate::field::Field;
use crate::poly::{self, Poly};

#[derive(Clone, PartialEq, Debug)]
pub struct Frac<E> {
    num: Poly<E>,
    den: Poly<E>,
}

impl<E> Frac<E> {
    pub fn num(&self) -> &Poly<E> {
        &self.num
    }

    pub fn den(&self) -> &Poly<E> {
        &self.den
    }

    pub fn is_zero_frac(&self) -> bool {
        self.num.is_zero_poly()
    }
}

/// The field of fractions of `base[var]`.
#[derive(Clone, PartialEq, Debug)]
pub struct FracField<F: Field> {
    base: F,
    var: char,
}

impl<F: Field> FracField<F> {
    pub fn new(base: F, var: char) -> Self {
        FracField { base, var }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn var(&self) -> char {
        self.var
    }

    /// Canonical form of `num/den`; panics on a zero denominator.
    pub fn make(&self, num: Poly<F::Elem>, den: Poly<F::Elem>) -> Frac<F::Elem> {
        assert!(!den.is_zero_poly(), "zero denominator");
        if num.is_zero_poly() {
            return Frac {
                num: poly::zero(),
                den: poly::one(&self.base),
            };
        }
        let g = poly::gcd(&self.base, &num, &den);
        let (num, r1) = poly::divrem(&self.base, &num, &g).unwrap();
        debug_assert!(r1.is_zero_poly());
        let (den, r2) = poly::divrem(&self.base, &den, &g).unwrap();
        debug_assert!(r2.is_zero_poly());
        let lead_inv = self.base.inv(den.leading().unwrap()).unwrap();
        Frac {
            num: poly::scale(&self.base, &num, &lead_inv),
            den: poly::scale(&self.base, &den, &lead_inv),
        }
    }

    pub fn from_poly(&self, p: Poly<F::Elem>) -> Frac<F::Elem> {
        Frac {
            num: p,
            den: poly::one(&self.base),
        }
    }

    /// The indeterminate itself.
    pub fn gen(&self) -> Frac<F::Elem> {
        self.from_poly(poly::monomial(&self.base, self.base.one(), 1))
    }
}

impl<F: Field> Field for FracField<F> {
    type Elem = Frac<F::Elem>;

    fn zero(&self) -> Frac<F::Elem> {
        Frac {
            num: poly::zero(),
            den: poly::one(&self.base),
        }
    }

    fn one(&self) -> Frac<F::Elem> {
        Frac {
            num: poly::one(&self.base),
            den: poly::one(&self.base),
        }
    }

    fn is_zero(&self, a: &Frac<F::Elem>) -> bool {
        a.num.is_zero_poly()
    }

    fn add(&self, a: &Frac<F::Elem>, b: &Frac<F::Elem>) -> Frac<F::Elem> {
        let f = &self.base;
        let num = poly::add(
            f,
            &poly::mul(f, &a.num, &b.den),
            &poly::mul(f, &b.num, &a.den),
        );
        let den = poly::mul(f, &a.den, &b.den);
        self.make(num, den)
    }

    fn neg(&self, a: &Frac<F::Elem>) -> Frac<F::Elem> {
        Frac {
            num: poly::neg(&self.base, &a.num),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &Frac<F::Elem>, b: &Frac<F::Elem>) -> Frac<F::Elem> {
        let f = &self.base;
        self.make(poly::mul(f, &a.num, &b.num), poly::mul(f, &a.den, &b.den))
    }

    fn inv(&self, a: &Frac<F::Elem>) -> Option<Frac<F::Elem>> {
        if a.num.is_zero_poly() {
            return None;
        }
        Some(self.make(a.den.clone(), a.num.clone()))
    }

    fn from_bigint(&self, n: &num::BigInt) -> Frac<F::Elem> {
        self.from_poly(poly::constant(&self.base, self.base.from_bigint(n)))
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn elements(&self) -> Option<Vec<Frac<F::Elem>>> {
        None
    }

    fn fmt_elem(&self, a: &Frac<F::Elem>) -> String {
        let num = poly::fmt(&self.base, &a.num, self.var);
        if a.den.degree() == Some(0) {
            debug_assert!(self.base.is_one(a.den.leading().unwrap()));
            return num;
        }
        // Left-associative `*` and `/` make parentheses redundant around a
        // single-term numerator; the denominator keeps them unless it is a
        // lone power of the variable.
        let num = if num.contains(' ') {
            format!("({num})")
        } else {
            num
        };
        let den = poly::fmt(&self.base, &a.den, self.var);
        let den = if den.contains([' ', '*', '/']) {
            format!("({den})")
        } else {
            den
        };
        format!("{num}/{den}")
    }

    /// Clear denominators and strip the monic polynomial content; entries
    /// stay polynomial through elimination and only the final pivot
    /// normalization reintroduces fractions.
    fn normalize_row(&self, row: &mut [Frac<F::Elem>]) {
        let f = &self.base;
        let mut den_lcm = poly::one(f);
        for e in row.iter() {
            den_lcm = poly::lcm(f, &den_lcm, &e.den);
        }
        let mut num_gcd: Poly<F::Elem> = poly::zero();
        let mut scaled: Vec<Poly<F::Elem>> = Vec::with_capacity(row.len());
        for e in row.iter() {
            let (cof, r) = poly::divrem(f, &den_lcm, &e.den).unwrap();
            debug_assert!(r.is_zero_poly());
            let s = poly::mul(f, &e.num, &cof);
            num_gcd = poly::gcd(f, &num_gcd, &s);
            scaled.push(s);
        }
        if num_gcd.is_zero_poly() {
            return;
        }
        for (slot, s) in row.iter_mut().zip(scaled) {
            let (q, r) = poly::divrem(f, &s, &num_gcd).unwrap();
            debug_assert!(r.is_zero_poly());
            *slot = Frac {
                num: q,
                den: poly::one(f),
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, PrimeField};

    fn rf5() -> FracField<PrimeField> {
        FracField::new(PrimeField::new(5).unwrap(), 't')
    }

    fn p(f: &PrimeField, cs: &[i64]) -> Poly<u64> {
        poly::from_coeffs(f, cs.iter().map(|&c| f.from_i64(c)).collect())
    }

    #[test]
    fn cancellation_to_one() {
        let k = rf5();
        let f = k.base().clone();
        let tm1 = p(&f, &[-1, 1]);
        let x = k.make(tm1.clone(), tm1);
        assert!(k.is_one(&x));
    }

    #[test]
    fn denominators_become_monic() {
        let k = rf5();
        let f = k.base().clone();
        let x = k.make(p(&f, &[1]), p(&f, &[0, 2])); // 1 / (2t)
        assert_eq!(x.den(), &p(&f, &[0, 1]));
        assert_eq!(x.num(), &p(&f, &[3])); // 1/2 = 3 in GF(5)
    }

    #[test]
    fn field_axioms_spot_check() {
        let k = rf5();
        let f = k.base().clone();
        let a = k.make(p(&f, &[1, 1]), p(&f, &[2, 0, 1]));
        let b = k.make(p(&f, &[4, 3]), p(&f, &[1, 1, 1]));
        let c = k.make(p(&f, &[2]), p(&f, &[3, 1]));
        let lhs = k.mul(&a, &k.add(&b, &c));
        let rhs = k.add(&k.mul(&a, &b), &k.mul(&a, &c));
        assert_eq!(lhs, rhs);
        let ai = k.inv(&a).unwrap();
        assert!(k.is_one(&k.mul(&a, &ai)));
    }

    #[test]
    fn row_normalization_clears_denominators() {
        let k = rf5();
        let f = k.base().clone();
        let a = k.make(p(&f, &[1]), p(&f, &[0, 1])); // 1/t
        let b = k.make(p(&f, &[1, 1]), p(&f, &[0, 0, 1])); // (t+1)/t^2
        let mut row = vec![a.clone(), b.clone()];
        k.normalize_row(&mut row);
        for e in &row {
            assert_eq!(e.den().degree(), Some(0));
        }
        // Ratio of the two entries must be unchanged.
        let before = k.div(&a, &b).unwrap();
        let after = k.div(&row[0], &row[1]).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn formatting_plain_and_fraction() {
        let k = rf5();
        let f = k.base().clone();
        let plain = k.from_poly(p(&f, &[4, 1]));
        assert_eq!(k.fmt_elem(&plain), "t + 4");
        let frac = k.make(p(&f, &[1, 1]), p(&f, &[3, 1]));
        assert_eq!(k.fmt_elem(&frac), "(t + 1)/(t + 3)");
    }
}
