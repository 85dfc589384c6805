//! Dense univariate polynomials over a [`Field`].
//!
//! Coefficients are stored little-endian with no trailing zeros; the empty
//! vector is the zero polynomial. All operations take the field descriptor
//! explicitly so the same code serves GF(p), Q and nested fraction fields.

use crate::field::Field;

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    /// Wrap coefficients that are already trimmed (no trailing zeros).
    pub fn from_raw(coeffs: Vec<E>) -> Poly<E> {
        Poly { coeffs }
    }
}

pub fn zero<E>() -> Poly<E> {
    Poly { coeffs: Vec::new() }
}

pub fn from_coeffs<F: Field>(f: &F, mut coeffs: Vec<F::Elem>) -> Poly<F::Elem> {
    while coeffs.last().map_or(false, |c| f.is_zero(c)) {
        coeffs.pop();
    }
    Poly { coeffs }
}

pub fn constant<F: Field>(f: &F, c: F::Elem) -> Poly<F::Elem> {
    from_coeffs(f, vec![c])
}

pub fn one<F: Field>(f: &F) -> Poly<F::Elem> {
    constant(f, f.one())
}

/// The monomial `c * x^k`.
pub fn monomial<F: Field>(f: &F, c: F::Elem, k: usize) -> Poly<F::Elem> {
    if f.is_zero(&c) {
        return zero();
    }
    let mut coeffs = vec![f.zero(); k];
    coeffs.push(c);
    Poly { coeffs }
}

pub fn coeff_at<F: Field>(f: &F, p: &Poly<F::Elem>, k: usize) -> F::Elem {
    p.coeffs.get(k).cloned().unwrap_or_else(|| f.zero())
}

pub fn add<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let n = a.coeffs.len().max(b.coeffs.len());
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        coeffs.push(f.add(&coeff_at(f, a, i), &coeff_at(f, b, i)));
    }
    from_coeffs(f, coeffs)
}

pub fn neg<F: Field>(f: &F, a: &Poly<F::Elem>) -> Poly<F::Elem> {
    Poly {
        coeffs: a.coeffs.iter().map(|c| f.neg(c)).collect(),
    }
}

pub fn sub<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    add(f, a, &neg(f, b))
}

pub fn scale<F: Field>(f: &F, a: &Poly<F::Elem>, c: &F::Elem) -> Poly<F::Elem> {
    if f.is_zero(c) {
        return zero();
    }
    Poly {
        coeffs: a.coeffs.iter().map(|x| f.mul(x, c)).collect(),
    }
}

pub fn mul<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    if a.is_zero_poly() || b.is_zero_poly() {
        return zero();
    }
    let mut coeffs = vec![f.zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            coeffs[i + j] = f.add(&coeffs[i + j], &f.mul(x, y));
        }
    }
    from_coeffs(f, coeffs)
}

/// Euclidean division; `None` when dividing by zero.
pub fn divrem<F: Field>(
    f: &F,
    a: &Poly<F::Elem>,
    b: &Poly<F::Elem>,
) -> Option<(Poly<F::Elem>, Poly<F::Elem>)> {
    let bd = b.degree()?;
    let lead_inv = f.inv(b.leading().unwrap()).expect("nonzero leading coefficient");
    let mut rem = a.coeffs.clone();
    if rem.len() < b.coeffs.len() {
        return Some((zero(), a.clone()));
    }
    let qlen = rem.len() - bd;
    let mut q = vec![f.zero(); qlen];
    for i in (0..qlen).rev() {
        let top = rem[i + bd].clone();
        if f.is_zero(&top) {
            continue;
        }
        let c = f.mul(&top, &lead_inv);
        for (j, bc) in b.coeffs.iter().enumerate() {
            rem[i + j] = f.sub(&rem[i + j], &f.mul(&c, bc));
        }
        q[i] = c;
    }
    Some((from_coeffs(f, q), from_coeffs(f, rem)))
}

pub fn rem<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    divrem(f, a, b).expect("nonzero modulus").1
}

pub fn make_monic<F: Field>(f: &F, a: &Poly<F::Elem>) -> Poly<F::Elem> {
    match a.leading() {
        None => zero(),
        Some(l) => scale(f, a, &f.inv(l).expect("nonzero leading coefficient")),
    }
}

/// Monic gcd. `gcd(0, 0) = 0`.
pub fn gcd<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    while !r1.is_zero_poly() {
        let r = rem(f, &r0, &r1);
        r0 = r1;
        r1 = r;
    }
    make_monic(f, &r0)
}

/// Extended gcd: returns `(g, u, v)` with `u*a + v*b = g`, `g` monic.
pub fn extended_gcd<F: Field>(
    f: &F,
    a: &Poly<F::Elem>,
    b: &Poly<F::Elem>,
) -> (Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (one(f), zero());
    let (mut t0, mut t1) = (zero(), one(f));
    while !r1.is_zero_poly() {
        let (q, r) = divrem(f, &r0, &r1).unwrap();
        let s = sub(f, &s0, &mul(f, &q, &s1));
        let t = sub(f, &t0, &mul(f, &q, &t1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    match r0.leading() {
        None => (zero(), zero(), zero()),
        Some(l) => {
            let li = f.inv(l).unwrap();
            (scale(f, &r0, &li), scale(f, &s0, &li), scale(f, &t0, &li))
        }
    }
}

pub fn lcm<F: Field>(f: &F, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
    if a.is_zero_poly() || b.is_zero_poly() {
        return zero();
    }
    let g = gcd(f, a, b);
    let (q, r) = divrem(f, a, &g).unwrap();
    debug_assert!(r.is_zero_poly());
    make_monic(f, &mul(f, &q, b))
}

pub fn eval<F: Field>(f: &F, p: &Poly<F::Elem>, x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in p.coeffs.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

pub fn derivative<F: Field>(f: &F, p: &Poly<F::Elem>) -> Poly<F::Elem> {
    let mut coeffs = Vec::new();
    for (i, c) in p.coeffs.iter().enumerate().skip(1) {
        coeffs.push(f.mul(c, &f.from_i64(i as i64)));
    }
    from_coeffs(f, coeffs)
}

pub fn pow<F: Field>(f: &F, p: &Poly<F::Elem>, mut e: u64) -> Poly<F::Elem> {
    let mut base = p.clone();
    let mut acc = one(f);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &base);
        }
        e >>= 1;
        if e > 0 {
            base = mul(f, &base, &base);
        }
    }
    acc
}

/// Render with the given variable; terms from the highest degree down, in a
/// form the expression parser accepts back.
pub fn fmt<F: Field>(f: &F, p: &Poly<F::Elem>, var: char) -> String {
    if p.is_zero_poly() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, c) in p.coeffs.iter().enumerate().rev() {
        if f.is_zero(c) {
            continue;
        }
        let (sign, body) = split_sign(f, c);
        if out.is_empty() {
            if sign {
                out.push_str("-");
            }
        } else if sign {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&term_body(&body, k, var));
    }
    out
}

/// Pull a leading minus out of a coefficient when its printed form starts
/// with one; avoids `+ -3` chains in rendered polynomials.
fn split_sign<F: Field>(f: &F, c: &F::Elem) -> (bool, String) {
    let s = f.fmt_elem(c);
    match s.strip_prefix('-') {
        Some(rest) if !rest.contains(['+', '-']) || !needs_parens(rest) => (true, rest.to_string()),
        _ => (false, s),
    }
}

fn needs_parens(s: &str) -> bool {
    s.contains(['+', '-', '/', ' '])
}

fn term_body(coeff_str: &str, k: usize, var: char) -> String {
    // A standalone constant only needs parentheses to protect a leading
    // minus that the sign splitter declined to absorb.
    if k == 0 {
        return if coeff_str.starts_with('-') {
            format!("({coeff_str})")
        } else {
            coeff_str.to_string()
        };
    }
    if coeff_str == "1" {
        return if k == 1 {
            var.to_string()
        } else {
            format!("{var}^{k}")
        };
    }
    let coeff = if needs_parens(coeff_str) {
        format!("({coeff_str})")
    } else {
        coeff_str.to_string()
    };
    if k == 1 {
        format!("{coeff}*{var}")
    } else {
        format!("{coeff}*{var}^{k}")
    }
}
