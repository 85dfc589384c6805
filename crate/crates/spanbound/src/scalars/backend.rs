//! Backend construction and exact element arithmetic for the five ambient
//! algebras.
//!
//! A [`Backend`] is an immutable, cheaply clonable handle; elements are
//! plain data in a canonical form, so equality is representational. All
//! public operations validate that their arguments structurally belong to
//! the backend and return `BackendMismatch` otherwise.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, One, Signed, Zero};

use super::descriptor::{BackendDescriptor, GroupDescriptor};
use super::irreducible;
use super::parse;
use crate::error::{Error, Result};
use crate::field::{Coeff, CoeffField, Field};
use crate::frac::{Frac, FracField};
use crate::groups::{Group, GroupElem};
use crate::linalg::Matrix;
use crate::poly::{self, Poly};

/// Largest group-algebra dimension accepted for finite groups.
pub const MAX_GROUP_ORDER: u128 = 256;

#[derive(Clone, Debug)]
pub struct Backend(Arc<Inner>);

#[derive(Debug)]
struct Inner {
    descriptor: BackendDescriptor,
    kind: Kind,
}

#[derive(Debug)]
pub(crate) enum Kind {
    /// GF(p^n) as GF(p)[x]/(modulus).
    Ff {
        coeff: CoeffField,
        modulus: Poly<Coeff>,
        n: usize,
    },
    /// k[y]/(g) for monic irreducible g over k.
    Ext {
        coeff: CoeffField,
        modulus: Poly<Coeff>,
        n: usize,
        separable: bool,
    },
    /// k0(t).
    Rf { field: FracField<CoeffField> },
    /// Rational quaternions, basis (1, i, j, k).
    Quat { coeff: CoeffField },
    /// k0[G].
    Ga {
        coeff: CoeffField,
        group: Group,
        order: Option<u128>,
    },
}

/// An element of a backend, in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    /// FF/EXT: little-endian coordinates over k in the power basis, length
    /// exactly the extension degree.
    Residue(Vec<Coeff>),
    /// RF: one reduced fraction (monic denominator, gcd 1).
    Fraction(Frac<Coeff>),
    /// QUAT: exact coordinates over (1, i, j, k).
    Quaternion([BigRational; 4]),
    /// GA: finite support map with nonzero coefficients only.
    GroupSum(BTreeMap<GroupElem, Coeff>),
}

impl Backend {
    /// Validate a descriptor and build the arithmetic handle. All
    /// irreducibility, primality, and group checks happen here.
    pub fn create(descriptor: &BackendDescriptor) -> Result<Backend> {
        let kind = match descriptor {
            BackendDescriptor::Ff { p, modulus } => {
                let coeff = CoeffField::gf(*p)?;
                let raw: Vec<Coeff> = modulus.iter().map(|&c| coeff.from_i64(c)).collect();
                let g = poly::from_coeffs(&coeff, raw);
                // A unit leading coefficient does not change the quotient.
                let g = poly::make_monic(&coeff, &g);
                irreducible::check_irreducible(&coeff, &g, 'x')?;
                let n = g.degree().expect("non-constant");
                Kind::Ff {
                    coeff,
                    modulus: g,
                    n,
                }
            }
            BackendDescriptor::Ext { coeff, g } => {
                let coeff = coeff.to_coeff_field()?;
                let raw: Result<Vec<Coeff>> = g
                    .iter()
                    .map(|text| parse::parse_coeff(&coeff, text))
                    .collect();
                let g = poly::from_coeffs(&coeff, raw?);
                irreducible::check_irreducible(&coeff, &g, 'y')?;
                let separable = irreducible::is_separable(&coeff, &g);
                let n = g.degree().expect("non-constant");
                Kind::Ext {
                    coeff,
                    modulus: g,
                    n,
                    separable,
                }
            }
            BackendDescriptor::Rf { base } => {
                let coeff = base.to_plain_coeff_field()?;
                Kind::Rf {
                    field: FracField::new(coeff, 't'),
                }
            }
            BackendDescriptor::Quat => Kind::Quat {
                coeff: CoeffField::rationals(),
            },
            BackendDescriptor::Ga { base, group } => {
                let coeff = base.to_plain_coeff_field()?;
                let p = coeff.characteristic();
                if p > 0 {
                    if let GroupDescriptor::Abelian { torsion, .. } = group {
                        if let Some(&d) = torsion.iter().find(|&&d| d % p == 0) {
                            return Err(Error::UnsupportedGroupCharacteristic(format!(
                                "GF({p}) base with invariant factor {d}"
                            )));
                        }
                    }
                }
                let group = group.to_group()?;
                let order = group.order();
                if let Some(o) = order {
                    if o > MAX_GROUP_ORDER {
                        return Err(Error::InvalidGroup(format!(
                            "order {o} exceeds the group-algebra ceiling {MAX_GROUP_ORDER}"
                        )));
                    }
                }
                Kind::Ga {
                    coeff,
                    group,
                    order,
                }
            }
        };
        Ok(Backend(Arc::new(Inner {
            descriptor: descriptor.clone(),
            kind,
        })))
    }

    pub fn descriptor(&self) -> &BackendDescriptor {
        &self.0.descriptor
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// The base field k the spans are measured over.
    pub fn coeff_field(&self) -> &CoeffField {
        match self.kind() {
            Kind::Ff { coeff, .. }
            | Kind::Ext { coeff, .. }
            | Kind::Quat { coeff }
            | Kind::Ga { coeff, .. } => coeff,
            Kind::Rf { field } => field.base(),
        }
    }

    pub fn is_division_ring(&self) -> bool {
        match self.kind() {
            Kind::Ff { .. } | Kind::Ext { .. } | Kind::Rf { .. } | Kind::Quat { .. } => true,
            Kind::Ga { order, .. } => *order == Some(1),
        }
    }

    pub fn is_commutative(&self) -> bool {
        match self.kind() {
            Kind::Ff { .. } | Kind::Ext { .. } | Kind::Rf { .. } => true,
            Kind::Quat { .. } => false,
            Kind::Ga { group, .. } => group.is_abelian(),
        }
    }

    /// Is every finite subextension of K over k separable? Finite fields
    /// and characteristic zero always are; extensions consult gcd(g, g').
    pub fn is_separable(&self) -> bool {
        match self.kind() {
            Kind::Ff { .. } | Kind::Rf { .. } | Kind::Quat { .. } => true,
            Kind::Ext { separable, .. } => *separable,
            Kind::Ga { order, .. } => *order == Some(1),
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.coeff_field().characteristic()
    }

    /// dim_k(K) when finite.
    pub fn dim_over_base(&self) -> Option<usize> {
        match self.kind() {
            Kind::Ff { n, .. } | Kind::Ext { n, .. } => Some(*n),
            Kind::Rf { .. } => None,
            Kind::Quat { .. } => Some(4),
            Kind::Ga { order, .. } => order.map(|o| o as usize),
        }
    }

    pub fn group(&self) -> Option<&Group> {
        match self.kind() {
            Kind::Ga { group, .. } => Some(group),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match self.kind() {
            Kind::Ff { coeff, n, .. } => match coeff {
                CoeffField::Fp(f) => format!("GF({}^{})", f.p(), n),
                _ => unreachable!("FF is always over a prime field"),
            },
            Kind::Ext {
                coeff, modulus, ..
            } => format!(
                "{}[y]/({})",
                coeff.label(),
                poly::fmt(coeff, modulus, 'y')
            ),
            Kind::Rf { field } => format!("{}(t)", field.base().label()),
            Kind::Quat { .. } => "H(Q)".to_string(),
            Kind::Ga { coeff, group, .. } => format!("{}[{}]", coeff.label(), group.label()),
        }
    }

    fn coeff_belongs(&self, c: &Coeff) -> bool {
        match (self.coeff_field(), c) {
            (CoeffField::Fp(f), Coeff::Fp(v)) => *v < f.p(),
            (CoeffField::Q(_), Coeff::Q(_)) => true,
            (CoeffField::RatFnFp(_), Coeff::RatFnFp(_)) => true,
            (CoeffField::RatFnQ(_), Coeff::RatFnQ(_)) => true,
            _ => false,
        }
    }

    /// Structural membership check; `BackendMismatch` gates every public
    /// arithmetic entry point.
    pub fn check(&self, e: &Element) -> Result<()> {
        let ok = match (self.kind(), e) {
            (Kind::Ff { n, .. } | Kind::Ext { n, .. }, Element::Residue(v)) => {
                v.len() == *n && v.iter().all(|c| self.coeff_belongs(c))
            }
            (Kind::Rf { .. }, Element::Fraction(fr)) => {
                let base = self.coeff_field();
                fr.num().coeffs().iter().all(|c| {
                    matches!(
                        (base, c),
                        (CoeffField::Fp(_), Coeff::Fp(_)) | (CoeffField::Q(_), Coeff::Q(_))
                    )
                }) && !fr.den().is_zero_poly()
            }
            (Kind::Quat { .. }, Element::Quaternion(_)) => true,
            (Kind::Ga { group, .. }, Element::GroupSum(m)) => m
                .iter()
                .all(|(g, c)| group.contains(g) && self.coeff_belongs(c) && {
                    let k = self.coeff_field();
                    !k.is_zero(c)
                }),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BackendMismatch)
        }
    }

    pub fn zero(&self) -> Element {
        match self.kind() {
            Kind::Ff { coeff, n, .. } | Kind::Ext { coeff, n, .. } => {
                Element::Residue(vec![coeff.zero(); *n])
            }
            Kind::Rf { field } => Element::Fraction(field.zero()),
            Kind::Quat { .. } => Element::Quaternion(std::array::from_fn(|_| BigRational::zero())),
            Kind::Ga { .. } => Element::GroupSum(BTreeMap::new()),
        }
    }

    pub fn one(&self) -> Element {
        match self.kind() {
            Kind::Ff { coeff, n, .. } | Kind::Ext { coeff, n, .. } => {
                let mut v = vec![coeff.zero(); *n];
                v[0] = coeff.one();
                Element::Residue(v)
            }
            Kind::Rf { field } => Element::Fraction(field.one()),
            Kind::Quat { .. } => {
                let mut q = std::array::from_fn(|_| BigRational::zero());
                q[0] = BigRational::one();
                Element::Quaternion(q)
            }
            Kind::Ga { coeff, group, .. } => {
                let mut m = BTreeMap::new();
                m.insert(group.identity(), coeff.one());
                Element::GroupSum(m)
            }
        }
    }

    pub fn is_zero(&self, e: &Element) -> bool {
        match e {
            Element::Residue(v) => {
                let k = self.coeff_field();
                v.iter().all(|c| k.is_zero(c))
            }
            Element::Fraction(fr) => fr.is_zero_frac(),
            Element::Quaternion(q) => q.iter().all(|c| c.is_zero()),
            Element::GroupSum(m) => m.is_empty(),
        }
    }

    pub fn is_one(&self, e: &Element) -> bool {
        *e == self.one()
    }

    /// Embed a base-field scalar into K (the center).
    pub fn embed_scalar(&self, c: &Coeff) -> Result<Element> {
        if !self.coeff_belongs(c) {
            return Err(Error::BackendMismatch);
        }
        Ok(match self.kind() {
            Kind::Ff { coeff, n, .. } | Kind::Ext { coeff, n, .. } => {
                let mut v = vec![coeff.zero(); *n];
                v[0] = c.clone();
                Element::Residue(v)
            }
            Kind::Rf { field } => {
                let k = field.base();
                Element::Fraction(field.from_poly(poly::constant(k, c.clone())))
            }
            Kind::Quat { .. } => {
                let Coeff::Q(r) = c else { unreachable!("checked") };
                let mut q = std::array::from_fn(|_| BigRational::zero());
                q[0] = r.clone();
                Element::Quaternion(q)
            }
            Kind::Ga { coeff, group, .. } => {
                let mut m = BTreeMap::new();
                if !coeff.is_zero(c) {
                    m.insert(group.identity(), c.clone());
                }
                Element::GroupSum(m)
            }
        })
    }

    pub fn from_i64(&self, v: i64) -> Element {
        self.embed_scalar(&self.coeff_field().from_i64(v))
            .expect("own scalar embeds")
    }

    fn residue_poly(&self, v: &[Coeff]) -> Poly<Coeff> {
        poly::from_coeffs(self.coeff_field(), v.to_vec())
    }

    fn poly_residue(&self, p: Poly<Coeff>, n: usize) -> Element {
        let k = self.coeff_field();
        let mut v = p.coeffs().to_vec();
        debug_assert!(v.len() <= n, "residues are reduced mod the modulus");
        v.resize(n, k.zero());
        Element::Residue(v)
    }

    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let k = self.coeff_field();
        Ok(match (a, b) {
            (Element::Residue(x), Element::Residue(y)) => {
                Element::Residue(x.iter().zip(y).map(|(u, v)| k.add(u, v)).collect())
            }
            (Element::Fraction(x), Element::Fraction(y)) => {
                let Kind::Rf { field } = self.kind() else { unreachable!() };
                Element::Fraction(field.add(x, y))
            }
            (Element::Quaternion(x), Element::Quaternion(y)) => {
                Element::Quaternion(std::array::from_fn(|i| &x[i] + &y[i]))
            }
            (Element::GroupSum(x), Element::GroupSum(y)) => {
                let mut m = x.clone();
                for (g, c) in y {
                    let entry = m.entry(g.clone()).or_insert_with(|| k.zero());
                    *entry = k.add(entry, c);
                    if k.is_zero(entry) {
                        m.remove(g);
                    }
                }
                Element::GroupSum(m)
            }
            _ => unreachable!("check enforces matching shapes"),
        })
    }

    pub fn neg(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        let k = self.coeff_field();
        Ok(match a {
            Element::Residue(x) => Element::Residue(x.iter().map(|c| k.neg(c)).collect()),
            Element::Fraction(x) => {
                let Kind::Rf { field } = self.kind() else { unreachable!() };
                Element::Fraction(field.neg(x))
            }
            Element::Quaternion(x) => Element::Quaternion(std::array::from_fn(|i| -&x[i])),
            Element::GroupSum(x) => {
                Element::GroupSum(x.iter().map(|(g, c)| (g.clone(), k.neg(c))).collect())
            }
        })
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Result<Element> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// Multiply an element by a base-field scalar.
    pub fn scale(&self, c: &Coeff, a: &Element) -> Result<Element> {
        let s = self.embed_scalar(c)?;
        self.mul(&s, a)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check(a)?;
        self.check(b)?;
        let k = self.coeff_field();
        Ok(match (self.kind(), a, b) {
            (
                Kind::Ff { modulus, n, .. } | Kind::Ext { modulus, n, .. },
                Element::Residue(x),
                Element::Residue(y),
            ) => {
                let prod = poly::mul(k, &self.residue_poly(x), &self.residue_poly(y));
                self.poly_residue(poly::rem(k, &prod, modulus), *n)
            }
            (Kind::Rf { field }, Element::Fraction(x), Element::Fraction(y)) => {
                Element::Fraction(field.mul(x, y))
            }
            (Kind::Quat { .. }, Element::Quaternion(x), Element::Quaternion(y)) => {
                Element::Quaternion(quat_mul(x, y))
            }
            (Kind::Ga { group, .. }, Element::GroupSum(x), Element::GroupSum(y)) => {
                let mut m: BTreeMap<GroupElem, Coeff> = BTreeMap::new();
                for (g, c) in x {
                    for (h, d) in y {
                        let gh = group.mul(g, h);
                        let cd = k.mul(c, d);
                        let entry = m.entry(gh.clone()).or_insert_with(|| k.zero());
                        *entry = k.add(entry, &cd);
                        if k.is_zero(entry) {
                            m.remove(&gh);
                        }
                    }
                }
                Element::GroupSum(m)
            }
            _ => unreachable!("check enforces matching shapes"),
        })
    }

    pub fn pow(&self, a: &Element, mut e: u64) -> Result<Element> {
        self.check(a)?;
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    pub fn commutes(&self, a: &Element, b: &Element) -> Result<bool> {
        Ok(self.mul(a, b)? == self.mul(b, a)?)
    }

    /// Two-sided inverse. In the group-algebra backend over a finite group
    /// this solves the left-multiplication linear system; a one-sided
    /// inverse in a finite-dimensional algebra is automatically two-sided.
    pub fn inverse(&self, a: &Element) -> Result<Element> {
        self.check(a)?;
        if self.is_zero(a) {
            return Err(Error::ZeroInverse);
        }
        let k = self.coeff_field();
        match (self.kind(), a) {
            (Kind::Ff { modulus, n, .. } | Kind::Ext { modulus, n, .. }, Element::Residue(x)) => {
                let (g, u, _) = poly::extended_gcd(k, &self.residue_poly(x), modulus);
                debug_assert_eq!(g.degree(), Some(0), "modulus is irreducible");
                let ginv = k.inv(g.leading().expect("nonzero gcd")).expect("nonzero");
                let u = poly::scale(k, &u, &ginv);
                Ok(self.poly_residue(poly::rem(k, &u, modulus), *n))
            }
            (Kind::Rf { field }, Element::Fraction(x)) => {
                Ok(Element::Fraction(field.inv(x).expect("nonzero")))
            }
            (Kind::Quat { .. }, Element::Quaternion(x)) => {
                let norm: BigRational = x.iter().map(|c| c * c).sum();
                debug_assert!(!norm.is_zero(), "the norm form is anisotropic");
                let conj = [
                    x[0].clone() / norm.clone(),
                    -x[1].clone() / norm.clone(),
                    -x[2].clone() / norm.clone(),
                    -x[3].clone() / norm,
                ];
                Ok(Element::Quaternion(conj))
            }
            (Kind::Ga { group, order, .. }, Element::GroupSum(m)) => {
                if let Some(inv) = self.ga_monomial_inverse(group, m) {
                    return Ok(inv);
                }
                if order.is_none() {
                    return Err(Error::UnsupportedInverse(
                        "non-monomial element over an infinite group".into(),
                    ));
                }
                let x = self.ga_solve_inverse(group, m).ok_or(Error::NotAUnit)?;
                debug_assert!(self.is_one(&self.mul(a, &x).expect("same backend")));
                debug_assert!(self.is_one(&self.mul(&x, a).expect("same backend")));
                Ok(x)
            }
            _ => unreachable!("check enforces matching shapes"),
        }
    }

    fn ga_monomial_inverse(
        &self,
        group: &Group,
        m: &BTreeMap<GroupElem, Coeff>,
    ) -> Option<Element> {
        if m.len() != 1 {
            return None;
        }
        let k = self.coeff_field();
        let (g, c) = m.iter().next().expect("singleton");
        let cinv = k.inv(c).expect("nonzero by canonical form");
        let mut out = BTreeMap::new();
        out.insert(group.inv(g), cinv);
        Some(Element::GroupSum(out))
    }

    fn ga_solve_inverse(
        &self,
        group: &Group,
        m: &BTreeMap<GroupElem, Coeff>,
    ) -> Option<Element> {
        let k = self.coeff_field().clone();
        let elems = group.elements().expect("finite group");
        let dim = elems.len();
        // Row u, column h: the e_u coefficient of a e_h is a_{u h^{-1}}.
        let rows: Vec<Vec<Coeff>> = elems
            .iter()
            .map(|u| {
                elems
                    .iter()
                    .map(|h| {
                        let g = group.mul(u, &group.inv(h));
                        m.get(&g).cloned().unwrap_or_else(|| k.zero())
                    })
                    .collect()
            })
            .collect();
        let mat = Matrix::from_rows(k.clone(), dim, rows).expect("square by construction");
        let identity_at = elems
            .iter()
            .position(|g| *g == group.identity())
            .expect("identity is enumerated");
        let mut rhs_rows = vec![vec![k.zero()]; dim];
        rhs_rows[identity_at][0] = k.one();
        let rhs = Matrix::from_rows(k.clone(), 1, rhs_rows).expect("column");
        let sol = mat.solve(&rhs)?;
        let mut out = BTreeMap::new();
        for (h, row) in elems.iter().zip(0..dim) {
            let c = sol.get(row, 0);
            if !k.is_zero(c) {
                out.insert(h.clone(), c.clone());
            }
        }
        Some(Element::GroupSum(out))
    }

    /// True iff `inverse` would succeed; equals nonzero in division rings.
    pub fn is_unit(&self, a: &Element) -> Result<bool> {
        self.check(a)?;
        if self.is_zero(a) {
            return Ok(false);
        }
        match (self.kind(), a) {
            (Kind::Ga { group, order, .. }, Element::GroupSum(m)) => {
                if m.len() == 1 {
                    return Ok(true);
                }
                if order.is_none() {
                    return Ok(false);
                }
                Ok(self.ga_solve_inverse(group, m).is_some())
            }
            _ => Ok(true),
        }
    }

    /// Render an element in the grammar `parse_element` accepts; parsing the
    /// result reproduces the element exactly.
    pub fn render(&self, e: &Element) -> String {
        let k = self.coeff_field();
        match (self.kind(), e) {
            (Kind::Ff { .. }, Element::Residue(v)) => {
                poly::fmt(k, &self.residue_poly(v), 'x')
            }
            (Kind::Ext { .. }, Element::Residue(v)) => {
                poly::fmt(k, &self.residue_poly(v), 'y')
            }
            (Kind::Rf { field }, Element::Fraction(fr)) => field.fmt_elem(fr),
            (Kind::Quat { .. }, Element::Quaternion(q)) => render_quat(q),
            (Kind::Ga { .. }, Element::GroupSum(m)) => render_group_sum(m),
            _ => panic!("element does not belong to this backend"),
        }
    }

    /// Parse the element grammar of this backend.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        parse::parse_element(self, text)
    }

    /// Canonical RF fraction from a numerator/denominator pair.
    pub(crate) fn rf_fraction(&self, num: Poly<Coeff>, den: Poly<Coeff>) -> Element {
        let Kind::Rf { field } = self.kind() else {
            panic!("rf_fraction outside the RF backend")
        };
        Element::Fraction(field.make(num, den))
    }

    /// The distinguished generator: x (FF), y (EXT), or t (RF). Reduced mod
    /// the modulus, so a degree-one modulus yields a base-field constant.
    pub fn generator(&self) -> Option<Element> {
        let k = self.coeff_field();
        match self.kind() {
            Kind::Ff { modulus, n, .. } | Kind::Ext { modulus, n, .. } => {
                let x = poly::monomial(k, k.one(), 1);
                Some(self.poly_residue(poly::rem(k, &x, modulus), *n))
            }
            Kind::Rf { field } => Some(Element::Fraction(field.gen())),
            _ => None,
        }
    }
}

fn quat_mul(a: &[BigRational; 4], b: &[BigRational; 4]) -> [BigRational; 4] {
    // Hamilton table: i^2 = j^2 = k^2 = -1, ij = k, jk = i, ki = j.
    [
        &a[0] * &b[0] - &a[1] * &b[1] - &a[2] * &b[2] - &a[3] * &b[3],
        &a[0] * &b[1] + &a[1] * &b[0] + &a[2] * &b[3] - &a[3] * &b[2],
        &a[0] * &b[2] - &a[1] * &b[3] + &a[2] * &b[0] + &a[3] * &b[1],
        &a[0] * &b[3] + &a[1] * &b[2] - &a[2] * &b[1] + &a[3] * &b[0],
    ]
}

fn rational_body(r: &BigRational) -> (bool, String, bool) {
    let neg = r.is_negative();
    let a = r.abs();
    if a.denom().is_one() {
        (neg, a.numer().to_string(), false)
    } else {
        (neg, format!("{}/{}", a.numer(), a.denom()), true)
    }
}

fn render_quat(q: &[BigRational; 4]) -> String {
    let units = ["", "i", "j", "k"];
    let mut out = String::new();
    for (idx, c) in q.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (neg, body, fraction) = rational_body(c);
        let term = if idx == 0 {
            body
        } else if body == "1" {
            units[idx].to_string()
        } else if fraction {
            format!("({})*{}", body, units[idx])
        } else {
            format!("{}*{}", body, units[idx])
        };
        if out.is_empty() {
            if neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

fn render_group_elem(g: &GroupElem) -> String {
    match g {
        GroupElem::Idx(i) => format!("e[{i}]"),
        GroupElem::Ab(v) => {
            let body: Vec<String> = v.iter().map(|c| c.to_string()).collect();
            format!("e[({})]", body.join(","))
        }
    }
}

fn render_group_sum(m: &BTreeMap<GroupElem, Coeff>) -> String {
    let mut out = String::new();
    for (g, c) in m {
        let (neg, body, fraction) = match c {
            Coeff::Fp(v) => (false, v.to_string(), false),
            Coeff::Q(r) => rational_body(r),
            _ => unreachable!("group algebras have plain base fields"),
        };
        let basis = render_group_elem(g);
        let term = if body == "1" {
            basis
        } else if fraction {
            format!("({body})*{basis}")
        } else {
            format!("{body}*{basis}")
        };
        if out.is_empty() {
            if neg {
                out.push_str("- ");
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&term);
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}
