//! Span connectivity: the cost functional c(W) = dim(WV) − λ·dim(W), its
//! minimum κ over nonzero subspaces, fragments (minimizers), atoms
//! (minimal-dimension fragments), and the small-doubling classifier that
//! covers a space by translates of the atom through 1.
//!
//! Exact atom enumeration needs a finite subspace lattice, so it is
//! restricted to FF backends, where the whole ambient field is enumerated
//! within budget. Other division backends get a heuristic atom candidate
//! and report-only classification.

use num::{BigRational, BigUint};

use crate::enumerate::{nonzero_subspace_count, nonzero_subspaces};
use crate::error::{Error, Result};
use crate::groups::Side;
use crate::scalars::{Backend, Element, Kind};
use crate::spans::{product_of_subspaces, span_of_elements, translate, Subspace};
use crate::structure::{coset_decompose, stabilizer, subspace_is_division_closed};
use crate::theorems::{rat, Comparison, CoverDirection, CoverWitness};

/// The reference space V and the parameter λ of the cost functional.
#[derive(Clone, Debug)]
pub struct ConnectivityContext {
    v: Subspace,
    lambda: BigRational,
}

impl ConnectivityContext {
    /// λ may be any exact rational here; fragment and atom search
    /// additionally requires λ < 1.
    pub fn new(v: Subspace, lambda: BigRational) -> Result<ConnectivityContext> {
        if v.dim() == 0 {
            return Err(Error::ZeroSubspace);
        }
        Ok(ConnectivityContext { v, lambda })
    }

    pub fn reference(&self) -> &Subspace {
        &self.v
    }

    pub fn lambda(&self) -> &BigRational {
        &self.lambda
    }

    pub fn backend(&self) -> &Backend {
        self.v.backend()
    }
}

/// Outcome of exact atom enumeration.
#[derive(Clone, Debug)]
pub struct AtomReport {
    /// The minimum of c over all nonzero subspaces of the ambient field.
    pub kappa: BigRational,
    /// The unique atom containing 1.
    pub atom: Subspace,
    /// All fragments containing 1, in canonical enumeration order. Every
    /// fragment is a translate of one of these.
    pub fragments: Vec<Subspace>,
    pub atom_is_division_ring: bool,
    /// Every atom is a translate x·H of the atom through 1. Verified via
    /// the uniqueness of the 1-containing atom in the exhaustive sweep:
    /// w⁻¹·A is a 1-containing atom for any nonzero w in an atom A.
    pub atoms_are_translates: bool,
    pub subspaces_examined: u64,
}

/// Exact comparison of c(W₁+W₂) + c(W₁∩W₂) against c(W₁) + c(W₂). The
/// intersection side is only defined for nonzero intersections.
#[derive(Clone, Debug)]
pub struct SubmodularityReport {
    pub applicable: bool,
    /// c(W₁+W₂) + c(W₁∩W₂), when the intersection is nonzero.
    pub lhs: Option<BigRational>,
    /// c(W₁) + c(W₂).
    pub rhs: BigRational,
    pub holds: Option<bool>,
}

/// c(W) = dim(WV) − λ·dim(W), exact.
pub fn connectivity_cost(w: &Subspace, ctx: &ConnectivityContext) -> Result<BigRational> {
    if w.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    let wv = product_of_subspaces(w, &ctx.v)?;
    Ok(rat(wv.dim()) - ctx.lambda.clone() * rat(w.dim()))
}

/// Enumerate every nonzero subspace of the ambient field, compute c on the
/// ones containing 1 (translation invariance puts a representative of every
/// c-value there), and return κ, the fragments through 1, and the atom.
pub fn kappa_and_atoms(ctx: &ConnectivityContext, budget: u64) -> Result<AtomReport> {
    let backend = ctx.backend().clone();
    let Kind::Ff { .. } = backend.kind() else {
        return Err(Error::UnsupportedBackend(
            "exact atom enumeration needs an FF backend".into(),
        ));
    };
    if ctx.lambda >= rat(1) {
        return Err(Error::LambdaTooLarge);
    }
    let n = backend.dim_over_base().expect("FF is finite-dimensional");
    let k = backend.coeff_field().clone();
    let q = BigUint::from(backend.characteristic());
    let total = nonzero_subspace_count(&q, n);
    if total > BigUint::from(budget) {
        return Err(Error::BudgetExceeded(format!(
            "{total} subspaces to enumerate, budget {budget}"
        )));
    }
    let one = backend.one();
    let one_bound = rat(1) - ctx.lambda.clone();
    let mut examined = 0u64;
    let mut through_one: Vec<(Subspace, BigRational)> = Vec::new();
    for mat in nonzero_subspaces(&k, n)? {
        examined += 1;
        let elems: Vec<Element> = mat
            .rows_iter()
            .map(|row| Element::Residue(row.to_vec()))
            .collect();
        let w = span_of_elements(&backend, &elems)?;
        if !w.contains(&one)? {
            continue;
        }
        let c = connectivity_cost(&w, ctx)?;
        debug_assert!(
            c >= one_bound.clone() * rat(w.dim()),
            "c(W) is at least (1 - lambda) dim W"
        );
        through_one.push((w, c));
    }
    let kappa = through_one
        .iter()
        .map(|(_, c)| c.clone())
        .min()
        .expect("the span of 1 is always enumerated");
    let fragments: Vec<Subspace> = through_one
        .iter()
        .filter(|(_, c)| *c == kappa)
        .map(|(w, _)| w.clone())
        .collect();
    // Fragments through 1 intersect nontrivially, so sums and
    // intersections of fragments are fragments again.
    #[cfg(debug_assertions)]
    for (i, f) in fragments.iter().enumerate() {
        for g in &fragments[i + 1..] {
            let sum = f.sum(g)?;
            let inter = f.intersect(g)?;
            debug_assert_eq!(connectivity_cost(&sum, ctx)?, kappa);
            debug_assert_eq!(connectivity_cost(&inter, ctx)?, kappa);
        }
    }
    let atom_dim = fragments.iter().map(Subspace::dim).min().expect("nonempty");
    let atoms: Vec<&Subspace> = fragments.iter().filter(|f| f.dim() == atom_dim).collect();
    // Uniqueness of the atom through 1 is what makes every atom a
    // translate: w⁻¹·A is again an atom through 1 for nonzero w in A.
    let atoms_are_translates = atoms.len() == 1;
    debug_assert!(atoms_are_translates, "the atom through 1 is unique");
    let atom = atoms[0].clone();
    let atom_is_division_ring = subspace_is_division_closed(&atom)?;
    debug_assert!(atom_is_division_ring, "atoms through 1 are division rings");
    Ok(AtomReport {
        kappa,
        atom,
        fragments,
        atom_is_division_ring,
        atoms_are_translates,
        subspaces_examined: examined,
    })
}

/// c(W₁+W₂) + c(W₁∩W₂) ≤ c(W₁) + c(W₂); pure span arithmetic, valid in
/// every backend. A zero intersection makes the left side undefined and
/// the report not applicable.
pub fn submodularity_check(
    w1: &Subspace,
    w2: &Subspace,
    ctx: &ConnectivityContext,
) -> Result<SubmodularityReport> {
    let rhs = connectivity_cost(w1, ctx)? + connectivity_cost(w2, ctx)?;
    let inter = w1.intersect(w2)?;
    if inter.dim() == 0 {
        return Ok(SubmodularityReport {
            applicable: false,
            lhs: None,
            rhs,
            holds: None,
        });
    }
    let sum = w1.sum(w2)?;
    let lhs = connectivity_cost(&sum, ctx)? + connectivity_cost(&inter, ctx)?;
    let holds = lhs <= rhs;
    debug_assert!(holds, "cost is submodular on the subspace lattice");
    Ok(SubmodularityReport {
        applicable: true,
        lhs: Some(lhs),
        rhs,
        holds: Some(holds),
    })
}

/// Best atom candidate for backends without exact enumeration: the span of
/// 1 and the stabilizers of k⟨V·V⟩ and k⟨W·V⟩, ranked by cost.
fn heuristic_atom(
    v: &Subspace,
    w: &Subspace,
    ctx: &ConnectivityContext,
) -> Result<Subspace> {
    let backend = ctx.backend().clone();
    let mut candidates = vec![span_of_elements(&backend, &[backend.one()])?];
    let vv = product_of_subspaces(v, v)?;
    candidates.push(stabilizer(&vv, Side::Left)?.subspace);
    let wv = product_of_subspaces(w, v)?;
    candidates.push(stabilizer(&wv, Side::Left)?.subspace);
    let mut best: Option<(BigRational, Subspace)> = None;
    for cand in candidates {
        let c = connectivity_cost(&cand, ctx)?;
        if best.as_ref().map_or(true, |(cur, _)| c < *cur) {
            best = Some((c, cand));
        }
    }
    Ok(best.expect("at least one candidate").1)
}

/// Small-doubling classifier. Under dim(W) ≥ dim(V) and
/// dim(WV) ≤ (2−ε)·dim(V), the atom H through 1 for λ = 1 − ε/2 covers V:
/// either V sits in a single module H·x with dim(H) ≤ (2/ε − 1)·dim(V), or
/// k⟨HV⟩ = ⊕ H·x over at most 2/ε − 1 representatives with the sharper
/// bound dim(H) ≤ (2/ε − 1)/(2/ε + 1)·dim(V). FF backends verify the atom
/// exhaustively; other division backends use a heuristic atom and the
/// returned bounds are report-only.
pub fn tao_classify(
    v: &Subspace,
    w: &Subspace,
    epsilon: &BigRational,
    budget: u64,
) -> Result<CoverWitness> {
    let backend = v.backend().clone();
    if !backend.is_division_ring() {
        return Err(Error::UnsupportedBackend(
            "the classifier needs a division-ring backend".into(),
        ));
    }
    if *epsilon <= rat(0) || *epsilon >= rat(2) {
        return Err(Error::HypothesisFailed(
            "epsilon must lie strictly between 0 and 2".into(),
        ));
    }
    if v.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    if w.dim() < v.dim() {
        return Err(Error::HypothesisFailed(format!(
            "dim(W) = {} is below dim(V) = {}",
            w.dim(),
            v.dim()
        )));
    }
    let wv = product_of_subspaces(w, v)?;
    let doubling_cap = (rat(2) - epsilon.clone()) * rat(v.dim());
    if rat(wv.dim()) > doubling_cap {
        return Err(Error::HypothesisFailed(format!(
            "dim(WV) = {} exceeds (2 - eps)*dim(V) = {doubling_cap}",
            wv.dim()
        )));
    }
    let lambda = rat(1) - epsilon.clone() / rat(2);
    let ctx = ConnectivityContext::new(v.clone(), lambda)?;
    let exact = matches!(backend.kind(), Kind::Ff { .. });
    let h = if exact {
        kappa_and_atoms(&ctx, budget)?.atom
    } else {
        heuristic_atom(v, w, &ctx)?
    };
    let atom_cap = (rat(2) / epsilon.clone() - rat(1)) * rat(v.dim());

    // V sits in a single module H·x exactly when V·v0^{-1} ⊆ H for any
    // nonzero v0 in V.
    let v0 = v.basis_elements()[0].clone();
    let v0_inv = backend.inverse(&v0)?;
    let normalized = translate(&v0_inv, v, Side::Right)?;
    if h.contains_subspace(&normalized)? {
        let bounds = vec![Comparison::le(
            "atom dimension within the single-module bound",
            rat(h.dim()),
            atom_cap,
        )];
        let witness = CoverWitness {
            h,
            representatives: vec![v0],
            direction: CoverDirection::SingleCoset,
            side: Side::Left,
            bounds,
        };
        if exact {
            debug_assert!(witness.holds(), "the single-module bound is a theorem");
        }
        return Ok(witness);
    }

    // V meets at least two modules: decompose k⟨HV⟩ into cosets H·x.
    let hv = product_of_subspaces(&h, v)?;
    debug_assert!(hv.contains_subspace(v)?, "1 in H puts V inside k<HV>");
    let reps = coset_decompose(&hv, &h, Side::Left)?;
    let two_over_eps = rat(2) / epsilon.clone();
    let sharper_cap = (two_over_eps.clone() - rat(1)) / (two_over_eps.clone() + rat(1))
        * rat(v.dim());
    let bounds = vec![
        Comparison::le(
            "atom dimension within the multi-module bound",
            rat(h.dim()),
            sharper_cap,
        ),
        Comparison::le(
            "module count within the doubling bound",
            rat(reps.len()),
            two_over_eps - rat(1),
        ),
    ];
    let witness = CoverWitness {
        h,
        representatives: reps,
        direction: CoverDirection::DirectSum,
        side: Side::Left,
        bounds,
    };
    if exact {
        debug_assert!(witness.holds(), "the multi-module bounds are theorems");
    }
    Ok(witness)
}
