//! Structural algebra on subspaces: stabilizers, periodicity,
//! coset decompositions, division closures, and the finite-field subfield
//! lattice.

use crate::error::{Error, Result};
use crate::field::{Coeff, CoeffField, Field};
use crate::groups::Side;
use crate::linalg::Matrix;
use crate::scalars::{Backend, Element, Kind};
use crate::spans::{
    product_of_subspaces, span_of_elements, Coordinatization, SetInstance, Subspace,
};

/// The exact left or right stabilizer of a subspace, with the structural
/// flags downstream checkers branch on.
#[derive(Clone, Debug)]
pub struct StabilizerReport {
    pub side: Side,
    pub subspace: Subspace,
    pub contains_one: bool,
    pub is_division_closed: bool,
    pub equals_base_field: bool,
}

impl StabilizerReport {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }
}

/// {h ∈ K : hV ⊆ V} (left) or {h ∈ K : Vh ⊆ V} (right).
///
/// The search space is cut down to a finite-dimensional candidate space
/// that provably contains the stabilizer: V·b⁻¹ (resp. b⁻¹·V) for an
/// invertible anchor b in a basis of V, or the whole algebra when the
/// group-algebra backend is finite-dimensional. Inside the candidate space
/// the containment constraints are linear, so a kernel computation gives
/// the exact stabilizer.
pub fn stabilizer(v: &Subspace, side: Side) -> Result<StabilizerReport> {
    let backend = v.backend().clone();
    if v.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let candidates: Vec<Element> = if backend.is_division_ring() {
        anchored_candidates(&backend, v, v.basis_elements().first().expect("dim > 0"), side)?
    } else if backend.dim_over_base().is_some() {
        // Finite-dimensional group algebra: restricting candidates to
        // support quotients can miss stabilizing combinations whose stray
        // terms cancel, so use the full monomial basis.
        let group = backend.group().expect("GA backend");
        group
            .elements()
            .expect("finite group")
            .into_iter()
            .map(|g| {
                let mut m = std::collections::BTreeMap::new();
                m.insert(g, backend.coeff_field().one());
                Element::GroupSum(m)
            })
            .collect()
    } else {
        // Infinite group algebra: a unit basis vector anchors the same
        // translate trick; without one the stabilizer has no finite
        // enclosing space here.
        let mut anchored = None;
        for b in v.basis_elements() {
            if backend.is_unit(b)? {
                anchored = Some(anchored_candidates(&backend, v, b, side)?);
                break;
            }
        }
        anchored.ok_or_else(|| {
            Error::UnsupportedBackend(
                "stabilizer over an infinite group needs an invertible basis vector".into(),
            )
        })?
    };

    let h = solve_stabilizer(&backend, v, &candidates, side)?;

    #[cfg(debug_assertions)]
    {
        let moved = product_on_side(&h, v, side)?;
        debug_assert!(v.contains_subspace(&moved)?, "stabilizer must stabilize");
    }
    let contains_one = h.contains(&backend.one())?;
    let is_division_closed = subspace_is_division_closed(&h)?;
    if backend.is_division_ring() {
        // Multiplicative closure in finite dimension forces a division
        // ring; both are theorems here, not observations.
        debug_assert!(contains_one && is_division_closed);
        if let Some(n) = backend.dim_over_base() {
            debug_assert_eq!(n % h.dim().max(1), 0, "stabilizer dim divides dim K");
        }
    }
    let equals_base_field = h.dim() == 1 && contains_one;
    Ok(StabilizerReport {
        side,
        subspace: h,
        contains_one,
        is_division_closed,
        equals_base_field,
    })
}

fn anchored_candidates(
    backend: &Backend,
    v: &Subspace,
    anchor: &Element,
    side: Side,
) -> Result<Vec<Element>> {
    let inv = backend.inverse(anchor)?;
    v.basis_elements()
        .iter()
        .map(|b| match side {
            // hV ⊆ V forces h·anchor ∈ V, so h ∈ V·anchor⁻¹.
            Side::Left => backend.mul(b, &inv),
            Side::Right => backend.mul(&inv, b),
        })
        .collect()
}

/// The product H·V or V·H at subspace level, respecting the side.
fn product_on_side(h: &Subspace, v: &Subspace, side: Side) -> Result<Subspace> {
    match side {
        Side::Left => product_of_subspaces(h, v),
        Side::Right => product_of_subspaces(v, h),
    }
}

fn dot(k: &CoeffField, a: &[Coeff], b: &[Coeff]) -> Coeff {
    let mut acc = k.zero();
    for (x, y) in a.iter().zip(b) {
        acc = k.add(&acc, &k.mul(x, y));
    }
    acc
}

fn solve_stabilizer(
    backend: &Backend,
    v: &Subspace,
    candidates: &[Element],
    side: Side,
) -> Result<Subspace> {
    let k = backend.coeff_field().clone();
    // Chart everything at once: candidate products against the basis of V.
    let mut family: Vec<Element> = v.basis_elements().to_vec();
    let mut products: Vec<Vec<Element>> = Vec::with_capacity(candidates.len());
    for c in candidates {
        let row: Result<Vec<Element>> = v
            .basis_elements()
            .iter()
            .map(|b| match side {
                Side::Left => backend.mul(c, b),
                Side::Right => backend.mul(b, c),
            })
            .collect();
        let row = row?;
        family.extend(row.iter().cloned());
        products.push(row);
    }
    let coords = Coordinatization::for_elements(backend, &family)?;
    let width = coords.width();
    let vrows: Vec<Vec<Coeff>> = v
        .basis_elements()
        .iter()
        .map(|b| coords.coordinatize(b).expect("chart covers the family"))
        .collect();
    let vmat = Matrix::from_rows(k.clone(), width, vrows).expect("shared width");
    // w lies in the row space of V exactly when it annihilates the right
    // kernel of V's basis matrix.
    let null = vmat.kernel();
    let mut constraint_rows: Vec<Vec<Coeff>> = Vec::new();
    for i in 0..v.dim() {
        for z in null.rows_iter() {
            let row: Vec<Coeff> = products
                .iter()
                .map(|per_candidate| {
                    let w = coords
                        .coordinatize(&per_candidate[i])
                        .expect("chart covers the family");
                    dot(&k, &w, z)
                })
                .collect();
            constraint_rows.push(row);
        }
    }
    let constraints = Matrix::from_rows(k.clone(), candidates.len(), constraint_rows)
        .expect("one column per candidate");
    let solutions = constraints.kernel();
    let mut basis: Vec<Element> = Vec::with_capacity(solutions.nrows());
    for alpha in solutions.rows_iter() {
        let mut h = backend.zero();
        for (a, c) in alpha.iter().zip(candidates) {
            if !k.is_zero(a) {
                h = backend.add(&h, &backend.scale(a, c)?)?;
            }
        }
        basis.push(h);
    }
    span_of_elements(backend, &basis)
}

/// True iff the stabilizer on the given side strictly contains k.
pub fn is_periodic(v: &Subspace, side: Side) -> Result<bool> {
    Ok(stabilizer(v, side)?.dim() > 1)
}

/// Checks 1 ∈ H, closure of basis products, and invertibility of basis
/// vectors with inverses inside H. In a division backend this decides
/// division-closedness exactly: multiplicative closure in finite dimension
/// already forces inverse closure (minimal-polynomial argument). In a group
/// algebra it is a generator-level verification; a span can hide zero
/// divisors among non-basis elements, and downstream consumers re-verify
/// dimensions instead of trusting the flag.
pub fn subspace_is_division_closed(h: &Subspace) -> Result<bool> {
    let backend = h.backend().clone();
    if h.dim() == 0 || !h.contains(&backend.one())? {
        return Ok(false);
    }
    for a in h.basis_elements() {
        for b in h.basis_elements() {
            if !h.contains(&backend.mul(a, b)?)? {
                return Ok(false);
            }
        }
        if !backend.is_unit(a)? {
            return Ok(false);
        }
        if !h.contains(&backend.inverse(a)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Representatives S with V = ⊕_{s∈S} Hs (left) or ⊕ sH (right), found by
/// the greedy basis sweep from the decomposition lemma's proof.
pub fn coset_decompose(v: &Subspace, h: &Subspace, side: Side) -> Result<Vec<Element>> {
    let backend = v.backend().clone();
    if !subspace_is_division_closed(h)? {
        return Err(Error::NotDivisionClosed);
    }
    if !product_on_side(h, v, side)?.eq_subspace(v)? {
        return Err(Error::NotStabilized);
    }
    let mut reps: Vec<Element> = Vec::new();
    let mut sum = Subspace::zero(&backend);
    for b in v.basis_elements() {
        if sum.contains(b)? {
            continue;
        }
        // H·b meets the running sum trivially: a nonzero overlap h·b would
        // put b = h⁻¹(h·b) back inside the H-stable running sum. b itself
        // need not be a unit, so the coset is spanned directly.
        let coset_gens: Result<Vec<Element>> = h
            .basis_elements()
            .iter()
            .map(|hb| match side {
                Side::Left => backend.mul(hb, b),
                Side::Right => backend.mul(b, hb),
            })
            .collect();
        let coset = span_of_elements(&backend, &coset_gens?)?;
        sum = sum.sum(&coset)?;
        reps.push(b.clone());
        if sum.dim() != reps.len() * h.dim() {
            return Err(Error::WitnessCheckFailed(format!(
                "coset sum dimension {} differs from {} cosets of dimension {}",
                sum.dim(),
                reps.len(),
                h.dim()
            )));
        }
    }
    debug_assert!(sum.eq_subspace(v)?, "cosets exhaust V");
    Ok(reps)
}

/// D(A): the smallest k-subspace containing k ∪ A that is closed under
/// multiplication, by iterating V ← k⟨V·V⟩ to a fixpoint. In a division
/// backend the result is a division ring. Dimension is capped by `budget`:
/// over k0(t) the closure can be infinite-dimensional.
pub fn division_closure(a: &SetInstance, budget: usize) -> Result<Subspace> {
    let backend = a.backend().clone();
    if !backend.is_division_ring() {
        return Err(Error::UnsupportedBackend(
            "division closure needs a division-ring backend".into(),
        ));
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut gens = a.elements().to_vec();
    gens.push(backend.one());
    let mut v = span_of_elements(&backend, &gens)?;
    loop {
        if v.dim() > budget {
            return Err(Error::BudgetExceeded(format!(
                "division closure grew past {budget} dimensions"
            )));
        }
        let next = product_of_subspaces(&v, &v)?;
        if next.dim() == v.dim() {
            // 1 ∈ V gives V ⊆ k⟨V·V⟩, so equal dimension means fixpoint.
            return Ok(next);
        }
        v = next;
    }
}

/// The subfield GF(p^d) inside an FF backend GF(p^n) with d | n: the fixed
/// space of the d-fold Frobenius, which is k-linear.
pub fn ff_subfield(backend: &Backend, d: usize) -> Result<Subspace> {
    let Kind::Ff { n, .. } = backend.kind() else {
        return Err(Error::UnsupportedBackend(
            "subfield lattice applies to FF backends only".into(),
        ));
    };
    let n = *n;
    if d == 0 || n % d != 0 {
        return Err(Error::ShapeMismatch(format!(
            "no subfield of degree {d} in a degree-{n} extension"
        )));
    }
    let k = backend.coeff_field().clone();
    let p = backend.characteristic();
    // Row i holds the coordinates of (x^i)^{p^d} − x^i; its left kernel is
    // the fixed space. Frobenius is applied d times to keep exponents small.
    let mut rows: Vec<Vec<Coeff>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut basis_coords = vec![k.zero(); n];
        basis_coords[i] = k.one();
        let mut e = Element::Residue(basis_coords);
        for _ in 0..d {
            e = backend.pow(&e, p)?;
        }
        let Element::Residue(mut coords) = e else {
            unreachable!("FF elements are residues")
        };
        coords[i] = k.sub(&coords[i], &k.one());
        rows.push(coords);
    }
    let m = Matrix::from_rows(k, n, rows).expect("square");
    let fixed = m.transpose().kernel();
    let elems: Vec<Element> = fixed
        .rows_iter()
        .map(|r| Element::Residue(r.to_vec()))
        .collect();
    let sub = span_of_elements(backend, &elems)?;
    debug_assert_eq!(sub.dim(), d, "the fixed field of Frobenius^d is GF(p^d)");
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{
        sample_element, BackendDescriptor, BaseDescriptor, GroupDescriptor, SampleBudget,
    };
    use crate::seeded::rng_for;
    use crate::spans::{span_of, translate};
    use rand::Rng;

    fn backend(d: BackendDescriptor) -> Backend {
        Backend::create(&d).unwrap()
    }

    fn ff16() -> Backend {
        backend(BackendDescriptor::Ff {
            p: 2,
            modulus: vec![1, 1, 0, 0, 1],
        })
    }

    fn set(b: &Backend, texts: &[&str]) -> SetInstance {
        SetInstance::from_texts(b, texts, None).unwrap()
    }

    /// Brute-force stabilizer over all elements of a finite backend.
    fn exhaustive_stabilizer(b: &Backend, v: &Subspace, side: Side) -> Vec<Element> {
        let k = b.coeff_field().clone();
        let n = b.dim_over_base().unwrap();
        let elems = k.elements().unwrap();
        let mut idx = vec![0usize; n];
        let mut out = Vec::new();
        loop {
            let coords: Vec<Coeff> = idx.iter().map(|&i| elems[i].clone()).collect();
            let h = Element::Residue(coords);
            let stabilizes = v.basis_elements().iter().all(|w| {
                let prod = match side {
                    Side::Left => b.mul(&h, w).unwrap(),
                    Side::Right => b.mul(w, &h).unwrap(),
                };
                v.contains(&prod).unwrap()
            });
            if stabilizes {
                out.push(h);
            }
            let mut carry = 0;
            while carry < n {
                idx[carry] += 1;
                if idx[carry] < elems.len() {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == n {
                return out;
            }
        }
    }

    // Oracle: GF(4) inside GF(16) is its own stabilizer (dim 2); the
    // non-field span {1, x} has the trivial stabilizer GF(2).
    #[test]
    fn finite_field_stabilizers() {
        let b = ff16();
        let gf4 = ff_subfield(&b, 2).unwrap();
        assert_eq!(gf4.dim(), 2);
        let rep = stabilizer(&gf4, Side::Left).unwrap();
        assert_eq!(rep.dim(), 2);
        assert!(rep.is_division_closed && rep.contains_one);
        assert!(rep.subspace.eq_subspace(&gf4).unwrap());
        assert!(is_periodic(&gf4, Side::Left).unwrap());

        let v = span_of(&set(&b, &["1", "x"])).unwrap();
        let rep = stabilizer(&v, Side::Left).unwrap();
        assert_eq!(rep.dim(), 1);
        assert!(rep.equals_base_field);
        assert!(!is_periodic(&v, Side::Left).unwrap());

        // Exhaustive oracle agreement on both examples and both sides.
        for v in [&gf4, &v] {
            for side in [Side::Left, Side::Right] {
                let rep = stabilizer(v, side).unwrap();
                let brute = exhaustive_stabilizer(&b, v, side);
                let brute_span = span_of_elements(&b, &brute).unwrap();
                assert!(rep.subspace.eq_subspace(&brute_span).unwrap());
            }
        }
    }

    #[test]
    fn whole_space_is_periodic() {
        let b = ff16();
        let all = ff_subfield(&b, 4).unwrap();
        assert_eq!(all.dim(), 4);
        assert!(is_periodic(&all, Side::Right).unwrap());
    }

    // Oracle (hand computation over Q[Z/4]): for V = ⟨e0 − e2⟩ the left
    // stabilizer is span{e0, e2, e1 + e3}: the e1, e3 coefficients must
    // agree, everything else is free.
    #[test]
    fn group_algebra_stabilizer_catches_cancelling_terms() {
        let b = backend(BackendDescriptor::Ga {
            base: BaseDescriptor::Q,
            group: GroupDescriptor::Abelian {
                free_rank: 0,
                torsion: vec![4],
            },
        });
        let v = span_of(&set(&b, &["e[(0)] - e[(2)]"])).unwrap();
        let rep = stabilizer(&v, Side::Left).unwrap();
        assert_eq!(rep.dim(), 3);
        assert!(rep
            .subspace
            .contains(&b.parse_element("e[(1)] + e[(3)]").unwrap())
            .unwrap());
        assert!(!rep
            .subspace
            .contains(&b.parse_element("e[(1)]").unwrap())
            .unwrap());
        assert!(rep.contains_one);
        // e1 + e3 is a zero divisor, so H is not a division subring.
        assert!(!rep.is_division_closed);
    }

    #[test]
    fn infinite_group_algebra_needs_anchor() {
        let b = backend(BackendDescriptor::Ga {
            base: BaseDescriptor::Q,
            group: GroupDescriptor::Abelian {
                free_rank: 1,
                torsion: vec![],
            },
        });
        // Anchored: the basis vector e_(1) is a unit.
        let v = span_of(&set(&b, &["e[(1)]", "e[(2)]"])).unwrap();
        let rep = stabilizer(&v, Side::Left).unwrap();
        assert_eq!(rep.dim(), 1);
        // No unit in any basis vector: 1 + e_(1) is not invertible.
        let w = span_of(&set(&b, &["e[(0)] + e[(1)]"])).unwrap();
        assert!(matches!(
            stabilizer(&w, Side::Left),
            Err(Error::UnsupportedBackend(_))
        ));
    }

    #[test]
    fn commutative_sides_agree() {
        let backends = vec![
            ff16(),
            backend(BackendDescriptor::Rf {
                base: BaseDescriptor::Gf { p: 3 },
            }),
        ];
        for (which, b) in backends.into_iter().enumerate() {
            let mut rng = rng_for(31, which as u64);
            let budget = SampleBudget {
                rf_degree: 1,
                ..SampleBudget::default()
            };
            for _ in 0..25 {
                let len = rng.gen_range(1..=3);
                let elems: Vec<Element> =
                    (0..len).map(|_| sample_element(&b, &mut rng, &budget)).collect();
                let v = span_of_elements(&b, &elems).unwrap();
                if v.dim() == 0 {
                    continue;
                }
                let l = stabilizer(&v, Side::Left).unwrap();
                let r = stabilizer(&v, Side::Right).unwrap();
                assert!(l.subspace.eq_subspace(&r.subspace).unwrap());
            }
        }
    }

    // Invariant: nothing outside H stabilizes (maximality), and in FF(p^n)
    // dim H divides n.
    #[test]
    fn stabilizer_maximality_and_divisibility() {
        let backends = vec![
            ff16(),
            backend(BackendDescriptor::Ff {
                p: 3,
                modulus: vec![1, 2, 0, 1],
            }),
            backend(BackendDescriptor::Quat),
        ];
        for (which, b) in backends.into_iter().enumerate() {
            let mut rng = rng_for(32, which as u64);
            let budget = SampleBudget::default();
            let n = b.dim_over_base().unwrap();
            for _ in 0..200 {
                let len = rng.gen_range(1..=3);
                let elems: Vec<Element> =
                    (0..len).map(|_| sample_element(&b, &mut rng, &budget)).collect();
                let v = span_of_elements(&b, &elems).unwrap();
                let rep = stabilizer(&v, Side::Left).unwrap();
                assert_eq!(n % rep.dim(), 0);
                for _ in 0..50 {
                    let h = sample_element(&b, &mut rng, &budget);
                    if rep.subspace.contains(&h).unwrap() {
                        continue;
                    }
                    let hv = translate(&h, &v, Side::Left).unwrap();
                    assert!(
                        !v.contains_subspace(&hv).unwrap(),
                        "non-member must move V"
                    );
                }
            }
        }
    }

    #[test]
    fn coset_decomposition() {
        let b = ff16();
        let gf4 = ff_subfield(&b, 2).unwrap();
        let whole = ff_subfield(&b, 4).unwrap();
        // Oracle: 4 = 2 + 2, so exactly two cosets.
        let reps = coset_decompose(&whole, &gf4, Side::Left).unwrap();
        assert_eq!(reps.len(), 2);
        // Reconstruction: the direct sum of the cosets is the whole space.
        let mut sum = Subspace::zero(&b);
        for s in &reps {
            sum = sum.sum(&translate(s, &gf4, Side::Right).unwrap()).unwrap();
        }
        assert!(sum.eq_subspace(&whole).unwrap());

        let self_reps = coset_decompose(&gf4, &gf4, Side::Left).unwrap();
        assert_eq!(self_reps.len(), 1);

        // dim V = 3 is not stabilized by the 2-dimensional GF(4).
        let v3 = span_of(&set(&b, &["1", "x", "x^2"])).unwrap();
        assert!(matches!(
            coset_decompose(&v3, &gf4, Side::Left),
            Err(Error::NotStabilized)
        ));
        let not_closed = span_of(&set(&b, &["1", "x"])).unwrap();
        assert!(matches!(
            coset_decompose(&v3, &not_closed, Side::Left),
            Err(Error::NotDivisionClosed)
        ));
    }

    #[test]
    fn division_closures() {
        let b = ff16();
        let k_only = division_closure(&set(&b, &["1"]), 16).unwrap();
        assert_eq!(k_only.dim(), 1);
        // x generates all of GF(16).
        let all = division_closure(&set(&b, &["x"]), 16).unwrap();
        assert_eq!(all.dim(), 4);
        // Powers of t never stop growing.
        let rf = backend(BackendDescriptor::Rf {
            base: BaseDescriptor::Gf { p: 2 },
        });
        assert!(matches!(
            division_closure(&set(&rf, &["t"]), 32),
            Err(Error::BudgetExceeded(_))
        ));
    }

    // Invariant: the closure is closed and contains its generators; and
    // when k⟨A²⟩ = k⟨A⟩ the closure equals k⟨A⟩ itself.
    #[test]
    fn closure_soundness() {
        let b = ff16();
        let mut rng = rng_for(33, 0);
        let budget = SampleBudget::default();
        for _ in 0..80 {
            let len = rng.gen_range(1..=3);
            let elems: Vec<Element> =
                (0..len).map(|_| sample_element(&b, &mut rng, &budget)).collect();
            let a = SetInstance::new(&b, elems, None).unwrap();
            let w = division_closure(&a, 16).unwrap();
            for e in a.elements() {
                assert!(w.contains(e).unwrap());
            }
            assert!(w.contains(&b.one()).unwrap());
            let ww = product_of_subspaces(&w, &w).unwrap();
            assert!(ww.eq_subspace(&w).unwrap());

            let v = span_of(&a).unwrap();
            let vv = crate::spans::product_span(&a, &a).unwrap();
            if vv.eq_subspace(&v).unwrap() {
                assert!(w.eq_subspace(&v).unwrap());
                assert!(v.contains(&b.one()).unwrap());
            }
        }
        // The GF(4) basis is multiplicatively closed; make sure the branch
        // above was really exercised.
        let gf4 = ff_subfield(&b, 2).unwrap();
        let a = SetInstance::new(&b, gf4.basis_elements().to_vec(), None).unwrap();
        let v = span_of(&a).unwrap();
        assert!(crate::spans::product_span(&a, &a)
            .unwrap()
            .eq_subspace(&v)
            .unwrap());
        assert!(division_closure(&a, 16).unwrap().eq_subspace(&v).unwrap());
    }

    #[test]
    fn subfield_lattice() {
        let b = backend(BackendDescriptor::Ff {
            p: 2,
            modulus: vec![1, 1, 0, 0, 0, 0, 1],
        });
        // GF(64) has subfields of degree 1, 2, 3, 6.
        for d in [1usize, 2, 3, 6] {
            let sub = ff_subfield(&b, d).unwrap();
            assert_eq!(sub.dim(), d);
            let as_set = SetInstance::new(&b, sub.basis_elements().to_vec(), None).unwrap();
            assert!(crate::spans::product_span(&as_set, &as_set)
                .unwrap()
                .eq_subspace(&sub)
                .unwrap());
        }
        assert!(ff_subfield(&b, 4).is_err());
        assert!(ff_subfield(&ff16(), 5).is_err());
    }
}
