//! Sets of ring elements, their coordinatizations in finite-dimensional
//! k-spaces, and subspace arithmetic (span, product span, translation,
//! sum, intersection).
//!
//! The ambient algebra K may be infinite-dimensional over k; only the
//! finite-dimensional shadow touched by the inputs is ever materialized.
//! Coordinatizations are immutable: widening one produces a new value, so
//! subspaces can be shared freely across threads.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::field::{Coeff, CoeffField, Field};
use crate::groups::{GroupElem, Side};
use crate::linalg::{subspace_intersect, Matrix};
use crate::poly::{self, Poly};
use crate::scalars::{Backend, Element, Kind};

/// A finite ordered list of nonzero elements of one backend.
#[derive(Clone, Debug)]
pub struct SetInstance {
    backend: Backend,
    elements: Vec<Element>,
    name: Option<String>,
}

impl SetInstance {
    pub fn new(
        backend: &Backend,
        elements: Vec<Element>,
        name: Option<String>,
    ) -> Result<SetInstance> {
        for e in &elements {
            backend.check(e)?;
            if backend.is_zero(e) {
                return Err(Error::ZeroElementInSet);
            }
        }
        Ok(SetInstance {
            backend: backend.clone(),
            elements,
            name,
        })
    }

    /// Parse each expression with the backend grammar.
    pub fn from_texts(backend: &Backend, texts: &[&str], name: Option<String>) -> Result<SetInstance> {
        let elements: Result<Vec<Element>> =
            texts.iter().map(|t| backend.parse_element(t)).collect();
        SetInstance::new(backend, elements?, name)
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elementwise two-sided inverses, order preserved.
    pub fn inverses(&self) -> Result<SetInstance> {
        let inv: Result<Vec<Element>> = self
            .elements
            .iter()
            .map(|e| self.backend.inverse(e))
            .collect();
        Ok(SetInstance {
            backend: self.backend.clone(),
            elements: inv?,
            name: self.name.as_ref().map(|n| format!("{n}^-1")),
        })
    }

    /// The product set {ab}: first-occurrence order, duplicates removed.
    /// Zero products (possible only outside division backends) are dropped,
    /// which leaves the span unchanged.
    pub fn product(&self, other: &SetInstance) -> Result<SetInstance> {
        same_backend(&self.backend, &other.backend)?;
        let mut out: Vec<Element> = Vec::new();
        for a in &self.elements {
            for b in &other.elements {
                let ab = self.backend.mul(a, b)?;
                if !self.backend.is_zero(&ab) && !out.contains(&ab) {
                    out.push(ab);
                }
            }
        }
        Ok(SetInstance {
            backend: self.backend.clone(),
            elements: out,
            name: None,
        })
    }

    /// Union, first-occurrence order, duplicates removed.
    pub fn union(&self, other: &SetInstance) -> Result<SetInstance> {
        same_backend(&self.backend, &other.backend)?;
        let mut out = self.elements.clone();
        for e in &other.elements {
            if !out.contains(e) {
                out.push(e.clone());
            }
        }
        Ok(SetInstance {
            backend: self.backend.clone(),
            elements: out,
            name: None,
        })
    }

    pub fn with_name(mut self, name: &str) -> SetInstance {
        self.name = Some(name.to_string());
        self
    }
}

fn same_backend(a: &Backend, b: &Backend) -> Result<()> {
    if a.descriptor() == b.descriptor() {
        Ok(())
    } else {
        Err(Error::BackendMismatch)
    }
}

/// A k-linear injective chart from a finite-dimensional subspace of K onto
/// coordinate rows.
#[derive(Clone, Debug)]
pub struct Coordinatization {
    backend: Backend,
    basis: CoordBasis,
}

#[derive(Clone, Debug)]
enum CoordBasis {
    /// FF/EXT: the fixed power basis 1, x, ..., x^{n-1}.
    Power { n: usize },
    /// QUAT: (1, i, j, k).
    Quat,
    /// RF: v maps to the coefficients of v*den, a polynomial of degree at
    /// most `bound`. Widening keeps `den` a multiple of the old one.
    Rf { den: Poly<Coeff>, bound: usize },
    /// GA: coefficients on a sorted, finite list of group elements.
    Ga { support: Vec<GroupElem> },
}

impl Coordinatization {
    /// The smallest chart of its backend's shape that covers every listed
    /// element.
    pub fn for_elements(backend: &Backend, elements: &[Element]) -> Result<Coordinatization> {
        for e in elements {
            backend.check(e)?;
        }
        let basis = match backend.kind() {
            Kind::Ff { n, .. } | Kind::Ext { n, .. } => CoordBasis::Power { n: *n },
            Kind::Quat { .. } => CoordBasis::Quat,
            Kind::Rf { .. } => rf_chart(backend, elements),
            Kind::Ga { .. } => ga_chart(elements),
        };
        Ok(Coordinatization {
            backend: backend.clone(),
            basis,
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    /// Number of coordinate columns.
    pub fn width(&self) -> usize {
        match &self.basis {
            CoordBasis::Power { n } => *n,
            CoordBasis::Quat => 4,
            CoordBasis::Rf { bound, .. } => bound + 1,
            CoordBasis::Ga { support } => support.len(),
        }
    }

    /// Coordinates of `e`, or `None` when `e` lies outside the chart's
    /// domain (which certifies it is outside any subspace charted here).
    pub fn coordinatize(&self, e: &Element) -> Option<Vec<Coeff>> {
        let k = self.backend.coeff_field();
        match (&self.basis, e) {
            (CoordBasis::Power { n }, Element::Residue(v)) if v.len() == *n => Some(v.clone()),
            (CoordBasis::Quat, Element::Quaternion(q)) => {
                Some(q.iter().map(|c| Coeff::Q(c.clone())).collect())
            }
            (CoordBasis::Rf { den, bound }, Element::Fraction(fr)) => {
                // e*den is polynomial iff the reduced denominator divides den.
                let (q, r) = poly::divrem(k, den, fr.den())?;
                if !r.is_zero_poly() {
                    return None;
                }
                let num = poly::mul(k, fr.num(), &q);
                if num.degree().unwrap_or(0) > *bound {
                    return None;
                }
                let mut row = num.coeffs().to_vec();
                row.resize(bound + 1, k.zero());
                Some(row)
            }
            (CoordBasis::Ga { support }, Element::GroupSum(m)) => {
                let mut row = vec![k.zero(); support.len()];
                for (g, c) in m {
                    let at = support.binary_search(g).ok()?;
                    row[at] = c.clone();
                }
                Some(row)
            }
            _ => None,
        }
    }

    /// Inverse of `coordinatize` on its image; always lands on canonical
    /// element forms.
    pub fn decode(&self, row: &[Coeff]) -> Element {
        let k = self.backend.coeff_field();
        debug_assert_eq!(row.len(), self.width());
        match &self.basis {
            CoordBasis::Power { .. } => Element::Residue(row.to_vec()),
            CoordBasis::Quat => {
                let mut q: [num::BigRational; 4] =
                    std::array::from_fn(|_| num::BigRational::from_integer(0.into()));
                for (slot, c) in q.iter_mut().zip(row) {
                    let Coeff::Q(r) = c else {
                        unreachable!("quaternion coordinates are rational")
                    };
                    *slot = r.clone();
                }
                Element::Quaternion(q)
            }
            CoordBasis::Rf { den, .. } => {
                let num = poly::from_coeffs(k, row.to_vec());
                self.backend.rf_fraction(num, den.clone())
            }
            CoordBasis::Ga { support } => {
                let mut m = std::collections::BTreeMap::new();
                for (g, c) in support.iter().zip(row) {
                    if !k.is_zero(c) {
                        m.insert(g.clone(), c.clone());
                    }
                }
                Element::GroupSum(m)
            }
        }
    }
}

fn rf_chart(backend: &Backend, elements: &[Element]) -> CoordBasis {
    let k = backend.coeff_field();
    let mut den = poly::one(k);
    for e in elements {
        let Element::Fraction(fr) = e else {
            unreachable!("checked")
        };
        den = poly::lcm(k, &den, fr.den());
    }
    let mut bound = 0usize;
    for e in elements {
        let Element::Fraction(fr) = e else {
            unreachable!("checked")
        };
        let deg = fr.num().degree().unwrap_or(0) + den.degree().unwrap_or(0)
            - fr.den().degree().unwrap_or(0);
        bound = bound.max(deg);
    }
    CoordBasis::Rf { den, bound }
}

fn ga_chart(elements: &[Element]) -> CoordBasis {
    let mut support: BTreeSet<GroupElem> = BTreeSet::new();
    for e in elements {
        let Element::GroupSum(m) = e else {
            unreachable!("checked")
        };
        support.extend(m.keys().cloned());
    }
    CoordBasis::Ga {
        support: support.into_iter().collect(),
    }
}

/// A finite-dimensional k-subspace of K in canonical form: reduced-echelon
/// basis rows over a chart, with the decoded basis elements cached.
#[derive(Clone, Debug)]
pub struct Subspace {
    coords: Coordinatization,
    basis: Matrix<CoeffField>,
    elements: Vec<Element>,
}

impl Subspace {
    fn from_rows(coords: Coordinatization, rows: Vec<Vec<Coeff>>) -> Subspace {
        let k = coords.backend().coeff_field().clone();
        let width = coords.width();
        let mat = Matrix::from_rows(k, width, rows).expect("chart rows share a width");
        let basis = mat.row_basis();
        let elements = basis.rows_iter().map(|r| coords.decode(r)).collect();
        Subspace {
            coords,
            basis,
            elements,
        }
    }

    /// The zero subspace of a backend.
    pub fn zero(backend: &Backend) -> Subspace {
        let coords = Coordinatization::for_elements(backend, &[]).expect("no elements to check");
        Subspace::from_rows(coords, vec![])
    }

    pub fn backend(&self) -> &Backend {
        self.coords.backend()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Decoded canonical basis, one element per echelon row.
    pub fn basis_elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn contains(&self, e: &Element) -> Result<bool> {
        self.backend().check(e)?;
        match self.coords.coordinatize(e) {
            None => Ok(false),
            Some(row) => Ok(self.basis.row_space_contains(&row)),
        }
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        same_backend(self.backend(), other.backend())?;
        for e in &other.elements {
            if !self.contains(e)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eq_subspace(&self, other: &Subspace) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.contains_subspace(other)?)
    }

    /// V + W, charted jointly so mismatched charts widen as needed.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        same_backend(self.backend(), other.backend())?;
        let all: Vec<Element> = self
            .elements
            .iter()
            .chain(&other.elements)
            .cloned()
            .collect();
        let coords = Coordinatization::for_elements(self.backend(), &all)?;
        let rows = all
            .iter()
            .map(|e| coords.coordinatize(e).expect("chart was built for these"))
            .collect();
        Ok(Subspace::from_rows(coords, rows))
    }

    /// V ∩ W via kernel arithmetic on a joint chart.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        same_backend(self.backend(), other.backend())?;
        let all: Vec<Element> = self
            .elements
            .iter()
            .chain(&other.elements)
            .cloned()
            .collect();
        let coords = Coordinatization::for_elements(self.backend(), &all)?;
        let k = self.backend().coeff_field().clone();
        let chart = |elems: &[Element]| -> Matrix<CoeffField> {
            let rows: Vec<Vec<Coeff>> = elems
                .iter()
                .map(|e| coords.coordinatize(e).expect("chart was built for these"))
                .collect();
            Matrix::from_rows(k.clone(), coords.width(), rows).expect("shared width")
        };
        let u = chart(&self.elements);
        let v = chart(&other.elements);
        let meet = subspace_intersect(&u, &v).expect("joint chart widths agree");
        let rows = meet.rows_iter().map(|r| r.to_vec()).collect();
        Ok(Subspace::from_rows(coords, rows))
    }
}

/// k⟨A⟩, the k-span of a nonempty set.
pub fn span_of(a: &SetInstance) -> Result<Subspace> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let v = span_of_elements(a.backend(), a.elements())?;
    debug_assert!(v.dim() <= a.len());
    Ok(v)
}

/// Span of an explicit element list (zeros allowed; they contribute
/// nothing).
pub fn span_of_elements(backend: &Backend, elements: &[Element]) -> Result<Subspace> {
    let coords = Coordinatization::for_elements(backend, elements)?;
    let rows = elements
        .iter()
        .map(|e| coords.coordinatize(e).expect("chart was built for these"))
        .collect();
    Ok(Subspace::from_rows(coords, rows))
}

/// k⟨AB⟩ = k⟨k⟨A⟩k⟨B⟩⟩, computed from pairwise products. In division
/// backends the dimension obeys
/// max(dim A, dim B) ≤ dim(AB) ≤ dim(A)·dim(B), asserted in debug builds.
pub fn product_span(a: &SetInstance, b: &SetInstance) -> Result<Subspace> {
    same_backend(a.backend(), b.backend())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let backend = a.backend();
    let mut products = Vec::with_capacity(a.len() * b.len());
    for x in a.elements() {
        for y in b.elements() {
            products.push(backend.mul(x, y)?);
        }
    }
    let ab = span_of_elements(backend, &products)?;
    if cfg!(debug_assertions) && backend.is_division_ring() {
        let da = span_of(a)?.dim();
        let db = span_of(b)?.dim();
        debug_assert!(ab.dim() >= da.max(db), "division lower bound");
        debug_assert!(ab.dim() <= da * db, "product upper bound");
    }
    Ok(ab)
}

/// k⟨A₁ ⋯ A_n⟩. Later factors multiply a decoded spanning set of the
/// prefix span, which is sound because product spans are representation
/// independent.
pub fn product_span_n(sets: &[&SetInstance]) -> Result<Subspace> {
    let Some((first, rest)) = sets.split_first() else {
        return Err(Error::EmptySet);
    };
    let backend = first.backend();
    let mut acc = span_of(first)?;
    for set in rest {
        same_backend(backend, set.backend())?;
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut products = Vec::new();
        for x in acc.basis_elements() {
            for y in set.elements() {
                products.push(backend.mul(x, y)?);
            }
        }
        acc = span_of_elements(backend, &products)?;
    }
    Ok(acc)
}

/// The set A⁻¹ (elementwise), order preserved.
pub fn inverse_set(a: &SetInstance) -> Result<SetInstance> {
    a.inverses()
}

/// k⟨VW⟩ from canonical bases; sound because product spans only depend on
/// the spans of their factors.
pub fn product_of_subspaces(v: &Subspace, w: &Subspace) -> Result<Subspace> {
    same_backend(v.backend(), w.backend())?;
    let backend = v.backend();
    let mut products = Vec::with_capacity(v.dim() * w.dim());
    for x in v.basis_elements() {
        for y in w.basis_elements() {
            products.push(backend.mul(x, y)?);
        }
    }
    span_of_elements(backend, &products)
}

/// x·V or V·x as a subspace; units preserve dimension.
pub fn translate(x: &Element, v: &Subspace, side: Side) -> Result<Subspace> {
    let backend = v.backend();
    if !backend.is_unit(x)? {
        return Err(Error::NotAUnit);
    }
    let products: Result<Vec<Element>> = v
        .basis_elements()
        .iter()
        .map(|b| match side {
            Side::Left => backend.mul(x, b),
            Side::Right => backend.mul(b, x),
        })
        .collect();
    let out = span_of_elements(backend, &products?)?;
    debug_assert_eq!(out.dim(), v.dim(), "unit translation preserves dimension");
    Ok(out)
}

/// Splits Σᵢ cᵢU into a direct sum ⊕ᵢ cᵢUᵢ with U₁ = U and
/// dim(Σ_{i≤j} cᵢU) = Σ_{i≤j} dim Uᵢ for every prefix: the progressive
/// basis-extension argument behind covering-by-translates bounds.
pub fn progressive_sum_decomposition(c: &[Element], u: &Subspace) -> Result<Vec<Subspace>> {
    let backend = u.backend().clone();
    for x in c {
        if !backend.is_unit(x)? {
            return Err(Error::NotAUnit);
        }
    }
    // A joint chart covering every translate keeps all ranks comparable.
    let mut family: Vec<Element> = u.basis_elements().to_vec();
    for x in c {
        for b in u.basis_elements() {
            family.push(backend.mul(x, b)?);
        }
    }
    let coords = Coordinatization::for_elements(&backend, &family)?;
    let k = backend.coeff_field().clone();
    let width = coords.width();
    let mut running: Matrix<CoeffField> = Matrix::zero(k.clone(), 0, width).row_basis();
    let mut out = Vec::with_capacity(c.len());
    for x in c {
        let mut chosen: Vec<Element> = Vec::new();
        for b in u.basis_elements() {
            let xb = backend.mul(x, b)?;
            let row = coords.coordinatize(&xb).expect("chart covers translates");
            if !running.row_space_contains(&row) {
                let stacked = running
                    .stack(&Matrix::from_rows(k.clone(), width, vec![row]).expect("width"))
                    .expect("width");
                running = stacked.row_basis();
                chosen.push(b.clone());
            }
        }
        out.push(span_of_elements(&backend, &chosen)?);
    }
    debug_assert_eq!(
        running.nrows(),
        out.iter().map(Subspace::dim).sum::<usize>(),
        "prefix dimensions add up"
    );
    Ok(out)
}
