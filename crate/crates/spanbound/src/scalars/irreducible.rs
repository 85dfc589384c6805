//! Deterministic irreducibility decisions for extension moduli.
//!
//! Coverage is deliberately partial but exact: every answer is proved, and
//! inputs outside the decidable range return `UnsupportedModulus` instead of
//! a guess.
//!
//! - GF(p), any degree up to [`MAX_MODULUS_DEGREE`]: the Frobenius-power
//!   criterion (g of degree n is irreducible iff x^(p^n) = x mod g and
//!   gcd(x^(p^(n/l)) - x, g) = 1 for every prime l | n).
//! - Q: degree 1; binomials y^n - c via the prime-power criterion (c not a
//!   q-th power for any prime q | n, and not -4 d^4 when 4 | n); degrees
//!   2 and 3 via the rational root test.
//! - GF(p)(s): degree 1; binomials (including the q = p Frobenius case);
//!   degrees 2 and 3 via budgeted root search over divisor candidates.
//! - Q(s): degree 1 and binomials.

use num::{BigInt, BigRational, BigUint, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{Coeff, CoeffField, Field, PrimeField, Rationals};
use crate::frac::{Frac, FracField};
use crate::poly::{self, Poly};

/// Largest modulus degree accepted for FF and EXT backends.
pub const MAX_MODULUS_DEGREE: usize = 16;

const FACTOR_TRIAL_LIMIT: u64 = 1_000_000;
const POLY_ENUM_BUDGET: u64 = 2_000_000;
const CANDIDATE_CAP: u64 = 1_000_000;

/// Decide irreducibility of a monic non-constant `g` over `k`.
/// `Ok(())` means proved irreducible; `ReducibleModulus` means proved
/// reducible; `UnsupportedModulus` means outside the decidable range.
pub fn check_irreducible(k: &CoeffField, g: &Poly<Coeff>, var: char) -> Result<()> {
    let n = g.degree().unwrap_or(0);
    if n == 0 {
        return Err(Error::UnsupportedModulus(
            "modulus must be non-constant".into(),
        ));
    }
    if !k.is_one(g.leading().expect("non-constant")) {
        return Err(Error::UnsupportedModulus("modulus must be monic".into()));
    }
    if n > MAX_MODULUS_DEGREE {
        return Err(Error::UnsupportedModulus(format!(
            "degree {n} exceeds the ceiling {MAX_MODULUS_DEGREE}"
        )));
    }
    let reducible = Err(Error::ReducibleModulus(poly::fmt(k, g, var)));
    match k {
        CoeffField::Fp(f) => {
            if rabin_irreducible(f, &unwrap_fp(g)) {
                Ok(())
            } else {
                reducible
            }
        }
        CoeffField::Q(_) => match irreducible_over_q(&unwrap_q(g))? {
            true => Ok(()),
            false => reducible,
        },
        CoeffField::RatFnFp(f) => match irreducible_over_ratfn_fp(f, &unwrap_ratfn_fp(g))? {
            true => Ok(()),
            false => reducible,
        },
        CoeffField::RatFnQ(f) => match irreducible_over_ratfn_q(f, &unwrap_ratfn_q(g))? {
            true => Ok(()),
            false => reducible,
        },
    }
}

/// Is the extension k[y]/(g) separable over k? True iff gcd(g, g') = 1; a
/// vanishing derivative (possible only in characteristic p) is the
/// inseparable case.
pub fn is_separable(k: &CoeffField, g: &Poly<Coeff>) -> bool {
    let d = poly::derivative(k, g);
    if d.is_zero_poly() {
        return false;
    }
    poly::gcd(k, g, &d).degree() == Some(0)
}

fn unwrap_fp(g: &Poly<Coeff>) -> Poly<u64> {
    raw_poly(g, |c| match c {
        Coeff::Fp(x) => *x,
        _ => panic!("coefficient variant mismatch"),
    })
}

fn unwrap_q(g: &Poly<Coeff>) -> Poly<BigRational> {
    raw_poly(g, |c| match c {
        Coeff::Q(x) => x.clone(),
        _ => panic!("coefficient variant mismatch"),
    })
}

fn unwrap_ratfn_fp(g: &Poly<Coeff>) -> Poly<Frac<u64>> {
    raw_poly(g, |c| match c {
        Coeff::RatFnFp(x) => x.clone(),
        _ => panic!("coefficient variant mismatch"),
    })
}

fn unwrap_ratfn_q(g: &Poly<Coeff>) -> Poly<Frac<BigRational>> {
    raw_poly(g, |c| match c {
        Coeff::RatFnQ(x) => x.clone(),
        _ => panic!("coefficient variant mismatch"),
    })
}

fn raw_poly<E, T>(g: &Poly<E>, f: impl Fn(&E) -> T) -> Poly<T> {
    // Input is already trimmed, so a direct coefficient map is safe.
    Poly::from_raw(g.coeffs().iter().map(f).collect())
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// base^exp mod m over GF(p), square-and-multiply on the big exponent.
fn powmod_big(f: &PrimeField, base: &Poly<u64>, exp: &BigUint, m: &Poly<u64>) -> Poly<u64> {
    let mut r = poly::one(f);
    let base = poly::rem(f, base, m);
    for i in (0..exp.bits()).rev() {
        r = poly::rem(f, &poly::mul(f, &r, &r), m);
        if exp.bit(i) {
            r = poly::rem(f, &poly::mul(f, &r, &base), m);
        }
    }
    r
}

/// Frobenius-power irreducibility criterion over GF(p); exact for monic g.
fn rabin_irreducible(f: &PrimeField, g: &Poly<u64>) -> bool {
    let n = g.degree().expect("non-constant") as u64;
    if n == 1 {
        return true;
    }
    let x = poly::monomial(f, f.one(), 1);
    let p = BigUint::from(f.p());
    for l in prime_factors(n) {
        let h = powmod_big(f, &x, &p.pow((n / l) as u32), g);
        let diff = poly::sub(f, &h, &x);
        if poly::gcd(f, g, &diff).degree() != Some(0) {
            return false;
        }
    }
    let h = powmod_big(f, &x, &p.pow(n as u32), g);
    h == poly::rem(f, &x, g)
}

/// Exact n-th power membership in the base field.
trait NthPower: Field {
    fn is_nth_power(&self, a: &Self::Elem, n: u64) -> bool;
}

impl NthPower for PrimeField {
    fn is_nth_power(&self, a: &u64, n: u64) -> bool {
        // The multiplicative group is cyclic of order p-1.
        if *a == 0 {
            return true;
        }
        let m = self.p() - 1;
        if m == 0 {
            return true;
        }
        let d = num::integer::gcd(n, m);
        modpow_u64(*a, m / d, self.p()) == 1
    }
}

fn modpow_u64(b: u64, mut e: u64, p: u64) -> u64 {
    let mut r: u128 = 1;
    let mut bb = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % p as u128;
        }
        bb = bb * bb % p as u128;
        e >>= 1;
    }
    r as u64
}

impl NthPower for Rationals {
    fn is_nth_power(&self, a: &BigRational, n: u64) -> bool {
        if a.is_zero() {
            return true;
        }
        if n % 2 == 0 && a.is_negative() {
            return false;
        }
        let n = u32::try_from(n).expect("desk-scale exponent");
        let num = a.numer().abs();
        let den = a.denom().abs();
        let rn = num.nth_root(n);
        let rd = den.nth_root(n);
        num::pow::pow(rn, n as usize) == num && num::pow::pow(rd, n as usize) == den
    }
}

/// n-th root of a monic polynomial, or None. Characteristic-p parts of n are
/// peeled off with the Frobenius (valid because the only char-p coefficient
/// field here is the prime field, on which x^p = x); the remaining root is
/// found by descending undetermined coefficients and verified.
fn monic_nth_root<F: Field>(f: &F, a: &Poly<F::Elem>, mut n: u64) -> Option<Poly<F::Elem>> {
    assert!(n >= 1);
    let mut a = a.clone();
    let p = f.characteristic();
    if p > 0 {
        while n % p == 0 {
            a = prime_field_pth_root(f, &a, p)?;
            n /= p;
        }
    }
    if n == 1 {
        return Some(a);
    }
    let deg = a.degree()?;
    if !f.is_one(a.leading()?) || deg % (n as usize) != 0 {
        return None;
    }
    let m = deg / n as usize;
    let n_inv = f.inv(&f.from_i64(n as i64)).expect("char does not divide n");
    let mut root = vec![f.zero(); m + 1];
    root[m] = f.one();
    for i in (0..m).rev() {
        let partial = Poly::from_raw(root.clone());
        let h = poly::pow(f, &partial, n);
        let target = poly::coeff_at(f, &a, (n as usize - 1) * m + i);
        let have = poly::coeff_at(f, &h, (n as usize - 1) * m + i);
        root[i] = f.mul(&f.sub(&target, &have), &n_inv);
    }
    let candidate = Poly::from_raw(root);
    if poly::pow(f, &candidate, n) == a {
        Some(candidate)
    } else {
        None
    }
}

fn prime_field_pth_root<F: Field>(f: &F, a: &Poly<F::Elem>, p: u64) -> Option<Poly<F::Elem>> {
    let coeffs = a.coeffs();
    let p = p as usize;
    let mut out = Vec::with_capacity(coeffs.len() / p + 1);
    for (i, c) in coeffs.iter().enumerate() {
        if i % p == 0 {
            out.push(c.clone());
        } else if !f.is_zero(c) {
            return None;
        }
    }
    Some(Poly::from_raw(out))
}

/// n-th power membership in a rational function field: split c into
/// leading-constant times a ratio of monic polynomials (the canonical form
/// already has a monic denominator) and test the three parts.
fn frac_is_nth_power<F: NthPower>(k: &FracField<F>, c: &Frac<F::Elem>, n: u64) -> bool {
    let f = k.base();
    if c.is_zero_frac() {
        return true;
    }
    let lead = c.num().leading().expect("nonzero").clone();
    let num_monic = poly::make_monic(f, c.num());
    f.is_nth_power(&lead, n)
        && monic_nth_root(f, &num_monic, n).is_some()
        && monic_nth_root(f, c.den(), n).is_some()
}

/// The binomial criterion for monic y^n + c0 (c0 nonzero): irreducible iff
/// c = -c0 is not a q-th power for any prime q | n, and, when 4 | n and the
/// characteristic is not 2, -c/4 is not a fourth power.
fn binomial_irreducible<E: Clone + PartialEq + std::fmt::Debug>(
    n: u64,
    c: &E,
    char_p: u64,
    is_pow: impl Fn(&E, u64) -> bool,
    quarter_neg: impl Fn(&E) -> E,
) -> bool {
    for q in prime_factors(n) {
        if is_pow(c, q) {
            return false;
        }
    }
    if n % 4 == 0 && char_p != 2 {
        // y^n - c factors when c = -4 d^4, i.e. when -c/4 is a fourth power.
        if is_pow(&quarter_neg(c), 4) {
            return false;
        }
    }
    true
}

/// Detect the shape y^n + c0 with c0 != 0 (monic input, degree >= 2).
fn as_binomial<F: Field>(f: &F, g: &Poly<F::Elem>) -> Option<F::Elem> {
    let n = g.degree()?;
    let c0 = poly::coeff_at(f, g, 0);
    if f.is_zero(&c0) {
        return None;
    }
    for i in 1..n {
        if !f.is_zero(&poly::coeff_at(f, g, i)) {
            return None;
        }
    }
    Some(c0)
}

fn irreducible_over_q(g: &Poly<BigRational>) -> Result<bool> {
    let f = Rationals;
    let n = g.degree().expect("non-constant");
    if n == 1 {
        return Ok(true);
    }
    if f.is_zero(&poly::coeff_at(&f, g, 0)) {
        return Ok(false);
    }
    if let Some(c0) = as_binomial(&f, g) {
        let c = f.neg(&c0);
        return Ok(binomial_irreducible(
            n as u64,
            &c,
            0,
            |e, q| f.is_nth_power(e, q),
            |e| -e / BigRational::from_integer(4.into()),
        ));
    }
    if n > 3 {
        return Err(Error::UnsupportedModulus(format!(
            "degree-{n} non-binomial over Q is outside the decidable range"
        )));
    }
    Ok(!has_rational_root(g)?)
}

/// Rational root test on an integer-cleared polynomial: any root is r/s with
/// r dividing the constant term and s dividing the leading term.
fn has_rational_root(g: &Poly<BigRational>) -> Result<bool> {
    let f = Rationals;
    let mut lcm = BigInt::one();
    for c in g.coeffs() {
        lcm = num::integer::lcm(lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> = g
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let a0 = ints.first().expect("non-constant").clone();
    let an = ints.last().expect("non-constant").clone();
    let rs = integer_divisors(&a0)?;
    let ss = integer_divisors(&an)?;
    for r in &rs {
        for s in &ss {
            for sign in [1i64, -1] {
                let cand = BigRational::new(r * BigInt::from(sign), s.clone());
                if f.is_zero(&poly::eval(&f, g, &cand)) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Positive divisors of a nonzero integer via trial division; errors when
/// the unfactored cofactor is too large to certify prime.
fn integer_divisors(a: &BigInt) -> Result<Vec<BigInt>> {
    let mut n = a.abs();
    if n.is_zero() {
        panic!("zero has no divisor list here");
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n && d <= FACTOR_TRIAL_LIMIT {
        let big_d = BigInt::from(d);
        if (&n % &big_d).is_zero() {
            let mut e = 0;
            while (&n % &big_d).is_zero() {
                n /= &big_d;
                e += 1;
            }
            primes.push((big_d, e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        // No factor up to the trial limit, so a cofactor below limit^2 is
        // prime; anything larger is out of range.
        if n > BigInt::from(FACTOR_TRIAL_LIMIT) * BigInt::from(FACTOR_TRIAL_LIMIT) {
            return Err(Error::UnsupportedModulus(
                "coefficient too large to factor for the root test".into(),
            ));
        }
        primes.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for dv in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(dv * &pk);
                pk *= &p;
            }
        }
        divs = next;
        if divs.len() as u64 > CANDIDATE_CAP {
            return Err(Error::UnsupportedModulus(
                "too many divisor candidates for the root test".into(),
            ));
        }
    }
    Ok(divs)
}

fn irreducible_over_ratfn_q(
    k: &FracField<Rationals>,
    g: &Poly<Frac<BigRational>>,
) -> Result<bool> {
    let n = g.degree().expect("non-constant");
    if n == 1 {
        return Ok(true);
    }
    if k.is_zero(&poly::coeff_at(k, g, 0)) {
        return Ok(false);
    }
    if let Some(c0) = as_binomial(k, g) {
        let c = k.neg(&c0);
        let quarter = k
            .inv(&k.from_i64(-4))
            .expect("nonzero constant");
        return Ok(binomial_irreducible(
            n as u64,
            &c,
            0,
            |e, q| frac_is_nth_power(k, e, q),
            |e| k.mul(e, &quarter),
        ));
    }
    Err(Error::UnsupportedModulus(format!(
        "degree-{n} non-binomial over Q(s) is outside the decidable range"
    )))
}

fn irreducible_over_ratfn_fp(k: &FracField<PrimeField>, g: &Poly<Frac<u64>>) -> Result<bool> {
    let n = g.degree().expect("non-constant");
    if n == 1 {
        return Ok(true);
    }
    if k.is_zero(&poly::coeff_at(k, g, 0)) {
        return Ok(false);
    }
    let p = k.base().characteristic();
    if let Some(c0) = as_binomial(k, g) {
        let c = k.neg(&c0);
        let quarter_neg = if p == 2 {
            None
        } else {
            Some(k.inv(&k.from_i64(-4)).expect("nonzero in odd characteristic"))
        };
        return Ok(binomial_irreducible(
            n as u64,
            &c,
            p,
            |e, q| frac_is_nth_power(k, e, q),
            |e| match &quarter_neg {
                Some(q4) => k.mul(e, q4),
                None => k.zero(),
            },
        ));
    }
    if n > 3 {
        return Err(Error::UnsupportedModulus(format!(
            "degree-{n} non-binomial over GF({p})(s) is outside the decidable range"
        )));
    }
    Ok(!has_ratfn_root(k, g)?)
}

/// Root search over GF(p)(s) for degrees 2 and 3: clear denominators, then
/// any root is unit * N / D with N a monic divisor of the constant term and
/// D a monic divisor of the leading term (Gauss's lemma in GF(p)[s]).
fn has_ratfn_root(k: &FracField<PrimeField>, g: &Poly<Frac<u64>>) -> Result<bool> {
    let f = *k.base();
    let mut den_lcm = poly::one(&f);
    for c in g.coeffs() {
        den_lcm = poly::lcm(&f, &den_lcm, c.den());
    }
    let cleared: Vec<Poly<u64>> = g
        .coeffs()
        .iter()
        .map(|c| {
            let (q, r) = poly::divrem(&f, &den_lcm, c.den()).expect("nonzero denominator");
            debug_assert!(r.is_zero_poly());
            poly::mul(&f, c.num(), &q)
        })
        .collect();
    let c0 = cleared.first().expect("non-constant");
    let cn = cleared.last().expect("non-constant");
    if c0.is_zero_poly() {
        return Ok(true);
    }
    let p = f.p();
    let nums = monic_divisors(&f, c0)?;
    let dens = monic_divisors(&f, cn)?;
    let total = (p - 1) * nums.len() as u64 * dens.len() as u64;
    if total > CANDIDATE_CAP {
        return Err(Error::UnsupportedModulus(
            "too many root candidates over GF(p)(s)".into(),
        ));
    }
    for u in 1..p {
        for num in &nums {
            for den in &dens {
                let cand = k.make(poly::scale(&f, num, &u), den.clone());
                let val = poly::eval(k, g, &cand);
                if k.is_zero(&val) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Monic divisors of a nonzero polynomial over GF(p), via trial division by
/// every monic polynomial of ascending degree (budgeted).
fn monic_divisors(f: &PrimeField, a: &Poly<u64>) -> Result<Vec<Poly<u64>>> {
    let mut rest = poly::make_monic(f, a);
    let mut primes: Vec<(Poly<u64>, u32)> = Vec::new();
    let p = f.p();
    let mut spent: u64 = 0;
    let mut d = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * d {
        let count = p.checked_pow(d as u32).unwrap_or(u64::MAX);
        spent = spent.saturating_add(count);
        if spent > POLY_ENUM_BUDGET {
            return Err(Error::UnsupportedModulus(
                "polynomial factorization budget exceeded".into(),
            ));
        }
        for idx in 0..count {
            let cand = monic_poly_by_index(f, d, idx);
            let mut e = 0;
            loop {
                let (q, r) = poly::divrem(f, &rest, &cand).expect("nonzero divisor");
                if r.is_zero_poly() {
                    rest = q;
                    e += 1;
                } else {
                    break;
                }
            }
            if e > 0 {
                primes.push((cand, e));
            }
        }
        d += 1;
    }
    if rest.degree().unwrap_or(0) >= 1 {
        primes.push((rest, 1));
    }
    let mut divs = vec![poly::one(f)];
    for (q, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for dv in &divs {
            let mut pk = poly::one(f);
            for _ in 0..=e {
                next.push(poly::mul(f, dv, &pk));
                pk = poly::mul(f, &pk, &q);
            }
        }
        divs = next;
        if divs.len() as u64 > CANDIDATE_CAP {
            return Err(Error::UnsupportedModulus(
                "too many polynomial divisors".into(),
            ));
        }
    }
    Ok(divs)
}

/// The idx-th monic polynomial of degree d over GF(p): lower coefficients
/// are the base-p digits of idx.
fn monic_poly_by_index(f: &PrimeField, d: usize, mut idx: u64) -> Poly<u64> {
    let p = f.p();
    let mut coeffs = Vec::with_capacity(d + 1);
    for _ in 0..d {
        coeffs.push(idx % p);
        idx /= p;
    }
    coeffs.push(1);
    Poly::from_raw(coeffs)
}
