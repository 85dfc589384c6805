//! Coefficient fields for the linear algebra layer.
//!
//! A [`Field`] value is a lightweight descriptor (a prime, or nothing at all
//! for the rationals) and the element type is an associated type. All
//! arithmetic goes through the descriptor so that fields with runtime
//! parameters, GF(p) in particular, stay cheap plain data.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::frac::{Frac, FracField};

/// An exact field with deterministic, side-effect-free arithmetic.
pub trait Field: Clone + PartialEq + fmt::Debug {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` exactly on zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    /// 0 for characteristic zero.
    fn characteristic(&self) -> u64;
    /// Number of elements for finite fields, `None` otherwise.
    fn order(&self) -> Option<u64>;
    /// All elements of a finite field in a fixed order, zero first.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    fn fmt_elem(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|i| self.mul(a, &i))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_bigint(&BigInt::from(n))
    }

    /// Rescale a matrix row in place by a nonzero constant of the caller's
    /// choosing to keep entries small. Row-space preserving; default no-op.
    fn normalize_row(&self, _row: &mut [Self::Elem]) {}
}

/// GF(p) for a prime `p` small enough for machine arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.checked_mul(d).map_or(false, |s| s <= n) {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    /// `p` must be prime and below 2^31 so products fit in u64 intermediate
    /// arithmetic comfortably.
    pub fn new(p: u64) -> crate::error::Result<Self> {
        if p >= 1 << 31 || !is_prime_u64(p) {
            return Err(crate::error::Error::NonPrimeCharacteristic(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn reduce_bigint(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let mut r = n % &p;
        if r.is_negative() {
            r += &p;
        }
        let (_, digits) = r.to_u64_digits();
        *digits.first().unwrap_or(&0)
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Extended Euclid on (a, p).
        let (mut r0, mut r1) = (*a as i128, self.p as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        let mut s = s0 % self.p as i128;
        if s < 0 {
            s += self.p as i128;
        }
        Some(s as u64)
    }

    fn from_bigint(&self, n: &BigInt) -> u64 {
        self.reduce_bigint(n)
    }

    fn characteristic(&self) -> u64 {
        self.p
    }

    fn order(&self) -> Option<u64> {
        Some(self.p)
    }

    fn elements(&self) -> Option<Vec<u64>> {
        Some((0..self.p).collect())
    }

    fn fmt_elem(&self, a: &u64) -> String {
        a.to_string()
    }
}

/// The rational numbers with arbitrary-precision arithmetic.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }

    fn fmt_elem(&self, a: &BigRational) -> String {
        a.to_string()
    }

    fn normalize_row(&self, row: &mut [BigRational]) {
        // Clear denominators and divide by the integer content; keeps
        // eliminations over Q in small integers.
        let mut lcm = BigInt::one();
        for e in row.iter() {
            lcm = num::integer::lcm(lcm, e.denom().clone());
        }
        let mut gcd = BigInt::zero();
        for e in row.iter() {
            let scaled = e.numer() * (&lcm / e.denom());
            gcd = num::integer::gcd(gcd, scaled);
        }
        if gcd.is_zero() {
            return;
        }
        let factor = BigRational::new(lcm, gcd);
        for e in row.iter_mut() {
            *e *= &factor;
        }
    }
}

/// The coefficient fields the backends coordinatize over: GF(p), Q, and
/// rational functions in one indeterminate `s` over either.
#[derive(Clone, PartialEq, Debug)]
pub enum CoeffField {
    Fp(PrimeField),
    Q(Rationals),
    RatFnFp(FracField<PrimeField>),
    RatFnQ(FracField<Rationals>),
}

/// An element of a [`CoeffField`]; variants must match the field's.
#[derive(Clone, PartialEq, Debug)]
pub enum Coeff {
    Fp(u64),
    Q(BigRational),
    RatFnFp(Frac<u64>),
    RatFnQ(Frac<BigRational>),
}

impl CoeffField {
    pub fn gf(p: u64) -> crate::error::Result<Self> {
        Ok(CoeffField::Fp(PrimeField::new(p)?))
    }

    pub fn rationals() -> Self {
        CoeffField::Q(Rationals)
    }

    pub fn rational_functions_gf(p: u64) -> crate::error::Result<Self> {
        Ok(CoeffField::RatFnFp(FracField::new(PrimeField::new(p)?, 's')))
    }

    pub fn rational_functions_q() -> Self {
        CoeffField::RatFnQ(FracField::new(Rationals, 's'))
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    /// Short human-readable name such as `GF(5)` or `Q(s)`.
    pub fn label(&self) -> String {
        match self {
            CoeffField::Fp(f) => format!("GF({})", f.p()),
            CoeffField::Q(_) => "Q".to_string(),
            CoeffField::RatFnFp(f) => format!("GF({})(s)", f.base().p()),
            CoeffField::RatFnQ(_) => "Q(s)".to_string(),
        }
    }
}

macro_rules! coeff_dispatch {
    ($self:expr, $a:expr, $f:ident, $field:ident, $x:ident => $body:expr) => {
        match ($self, $a) {
            (CoeffField::Fp($field), Coeff::Fp($x)) => $body,
            (CoeffField::Q($field), Coeff::Q($x)) => $body,
            (CoeffField::RatFnFp($field), Coeff::RatFnFp($x)) => $body,
            (CoeffField::RatFnQ($field), Coeff::RatFnQ($x)) => $body,
            _ => panic!("coefficient does not belong to this field"),
        }
    };
}

macro_rules! coeff_dispatch2 {
    ($self:expr, $a:expr, $b:expr, $field:ident, $x:ident, $y:ident => $xbody:expr) => {
        match ($self, $a, $b) {
            (CoeffField::Fp($field), Coeff::Fp($x), Coeff::Fp($y)) => Coeff::Fp($xbody),
            (CoeffField::Q($field), Coeff::Q($x), Coeff::Q($y)) => Coeff::Q($xbody),
            (CoeffField::RatFnFp($field), Coeff::RatFnFp($x), Coeff::RatFnFp($y)) => {
                Coeff::RatFnFp($xbody)
            }
            (CoeffField::RatFnQ($field), Coeff::RatFnQ($x), Coeff::RatFnQ($y)) => {
                Coeff::RatFnQ($xbody)
            }
            _ => panic!("coefficients do not belong to this field"),
        }
    };
}

impl Field for CoeffField {
    type Elem = Coeff;

    fn zero(&self) -> Coeff {
        match self {
            CoeffField::Fp(f) => Coeff::Fp(f.zero()),
            CoeffField::Q(f) => Coeff::Q(f.zero()),
            CoeffField::RatFnFp(f) => Coeff::RatFnFp(f.zero()),
            CoeffField::RatFnQ(f) => Coeff::RatFnQ(f.zero()),
        }
    }

    fn one(&self) -> Coeff {
        match self {
            CoeffField::Fp(f) => Coeff::Fp(f.one()),
            CoeffField::Q(f) => Coeff::Q(f.one()),
            CoeffField::RatFnFp(f) => Coeff::RatFnFp(f.one()),
            CoeffField::RatFnQ(f) => Coeff::RatFnQ(f.one()),
        }
    }

    fn is_zero(&self, a: &Coeff) -> bool {
        coeff_dispatch!(self, a, is_zero, f, x => f.is_zero(x))
    }

    fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        coeff_dispatch2!(self, a, b, f, x, y => f.add(x, y))
    }

    fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (CoeffField::Fp(f), Coeff::Fp(x)) => Coeff::Fp(f.neg(x)),
            (CoeffField::Q(f), Coeff::Q(x)) => Coeff::Q(f.neg(x)),
            (CoeffField::RatFnFp(f), Coeff::RatFnFp(x)) => Coeff::RatFnFp(f.neg(x)),
            (CoeffField::RatFnQ(f), Coeff::RatFnQ(x)) => Coeff::RatFnQ(f.neg(x)),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        coeff_dispatch2!(self, a, b, f, x, y => f.mul(x, y))
    }

    fn inv(&self, a: &Coeff) -> Option<Coeff> {
        match (self, a) {
            (CoeffField::Fp(f), Coeff::Fp(x)) => f.inv(x).map(Coeff::Fp),
            (CoeffField::Q(f), Coeff::Q(x)) => f.inv(x).map(Coeff::Q),
            (CoeffField::RatFnFp(f), Coeff::RatFnFp(x)) => f.inv(x).map(Coeff::RatFnFp),
            (CoeffField::RatFnQ(f), Coeff::RatFnQ(x)) => f.inv(x).map(Coeff::RatFnQ),
            _ => panic!("coefficient does not belong to this field"),
        }
    }

    fn from_bigint(&self, n: &BigInt) -> Coeff {
        match self {
            CoeffField::Fp(f) => Coeff::Fp(f.from_bigint(n)),
            CoeffField::Q(f) => Coeff::Q(f.from_bigint(n)),
            CoeffField::RatFnFp(f) => Coeff::RatFnFp(f.from_bigint(n)),
            CoeffField::RatFnQ(f) => Coeff::RatFnQ(f.from_bigint(n)),
        }
    }

    fn characteristic(&self) -> u64 {
        match self {
            CoeffField::Fp(f) => f.characteristic(),
            CoeffField::Q(f) => f.characteristic(),
            CoeffField::RatFnFp(f) => f.characteristic(),
            CoeffField::RatFnQ(f) => f.characteristic(),
        }
    }

    fn order(&self) -> Option<u64> {
        match self {
            CoeffField::Fp(f) => f.order(),
            _ => None,
        }
    }

    fn elements(&self) -> Option<Vec<Coeff>> {
        match self {
            CoeffField::Fp(f) => f.elements().map(|v| v.into_iter().map(Coeff::Fp).collect()),
            _ => None,
        }
    }

    fn fmt_elem(&self, a: &Coeff) -> String {
        coeff_dispatch!(self, a, fmt_elem, f, x => f.fmt_elem(x))
    }

    fn normalize_row(&self, row: &mut [Coeff]) {
        match self {
            CoeffField::Fp(_) => {}
            CoeffField::Q(f) => {
                let mut inner: Vec<BigRational> = row
                    .iter()
                    .map(|c| match c {
                        Coeff::Q(x) => x.clone(),
                        _ => panic!("coefficient does not belong to this field"),
                    })
                    .collect();
                f.normalize_row(&mut inner);
                for (slot, x) in row.iter_mut().zip(inner) {
                    *slot = Coeff::Q(x);
                }
            }
            CoeffField::RatFnFp(f) => {
                let mut inner: Vec<Frac<u64>> = row
                    .iter()
                    .map(|c| match c {
                        Coeff::RatFnFp(x) => x.clone(),
                        _ => panic!("coefficient does not belong to this field"),
                    })
                    .collect();
                f.normalize_row(&mut inner);
                for (slot, x) in row.iter_mut().zip(inner) {
                    *slot = Coeff::RatFnFp(x);
                }
            }
            CoeffField::RatFnQ(f) => {
                let mut inner: Vec<Frac<BigRational>> = row
                    .iter()
                    .map(|c| match c {
                        Coeff::RatFnQ(x) => x.clone(),
                        _ => panic!("coefficient does not belong to this field"),
                    })
                    .collect();
                f.normalize_row(&mut inner);
                for (slot, x) in row.iter_mut().zip(inner) {
                    *slot = Coeff::RatFnQ(x);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_composites() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(0).is_err());
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(97).is_ok());
    }

    #[test]
    fn gf7_inverses() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7u64 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert!(f.inv(&0).is_none());
    }

    #[test]
    fn gf_from_negative_integers() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.from_i64(-1), 4);
        assert_eq!(f.from_i64(-7), 3);
        assert_eq!(f.from_i64(10), 0);
    }

    #[test]
    fn rational_row_normalization_preserves_ratios() {
        let f = Rationals;
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let mut row = vec![half.clone(), third.clone()];
        f.normalize_row(&mut row);
        // Ratio of entries is invariant under row scaling.
        let before = &half / &third;
        let after = &row[0] / &row[1];
        assert_eq!(before, after);
        assert!(row.iter().all(|e| e.denom().is_one()));
    }
}
