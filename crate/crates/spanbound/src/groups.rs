//! Finite groups given by Cayley tables and finitely generated abelian
//! groups, product-set combinatorics on their subsets, and the exact
//! passage into the group-algebra backend where cardinalities of product
//! sets become dimensions of product spans.
//!
//! Cayley tables are fully validated (identity at index 0, latin square,
//! associativity, two-sided inverses) up to order [`MAX_CAYLEY_ORDER`].
//! Abelian groups are direct products `Z^r x Z/d_1 x ... x Z/d_k`; their
//! elements carry one coordinate per factor, torsion coordinates reduced to
//! `[0, d)`.
//!
//! The linear checkers in [`crate::theorems`] recover the classical
//! addition theorems when run on sets of group-algebra basis vectors:
//! `group_kneser_check`, `group_plunnecke_check`, and `group_ruzsa_check`
//! compute every quantity twice, once by direct enumeration in the group
//! and once as a span dimension, and insist the two agree exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::BigRational;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::scalars::{Backend, BackendDescriptor, BaseDescriptor, Element, GroupDescriptor};
use crate::spans::{product_span, product_span_n, span_of, span_of_elements, SetInstance};
use crate::structure;
use crate::theorems::{self, rat, rat_pow, ratio, SearchMode};

/// Largest Cayley table accepted; associativity is checked on all triples.
pub const MAX_CAYLEY_ORDER: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    Cayley {
        table: Vec<Vec<usize>>,
        inverses: Vec<usize>,
    },
    Abelian {
        free_rank: usize,
        torsion: Vec<u64>,
    },
}

/// Group element: an index into a Cayley table, or a coordinate vector of an
/// abelian group. The derived ordering makes set representations canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupElem {
    Idx(usize),
    Ab(Vec<i64>),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Idx(i) => write!(f, "g{i}"),
            GroupElem::Ab(v) => {
                write!(f, "(")?;
                for (k, c) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Group {
    /// Validate a Cayley table with the identity at index 0.
    pub fn cayley(table: Vec<Vec<usize>>) -> Result<Group> {
        let m = table.len();
        if m == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if m > MAX_CAYLEY_ORDER {
            return Err(Error::InvalidGroup(format!(
                "order {m} exceeds the Cayley ceiling {MAX_CAYLEY_ORDER}"
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidGroup(format!("row {i} is not length {m}")));
            }
            for &e in row {
                if e >= m {
                    return Err(Error::InvalidGroup(format!(
                        "row {i} contains out-of-range entry {e}"
                    )));
                }
            }
        }
        for j in 0..m {
            if table[0][j] != j || table[j][0] != j {
                return Err(Error::InvalidGroup(
                    "index 0 is not a two-sided identity".into(),
                ));
            }
        }
        for i in 0..m {
            let mut seen_row = vec![false; m];
            let mut seen_col = vec![false; m];
            for j in 0..m {
                if seen_row[table[i][j]] {
                    return Err(Error::InvalidGroup(format!("row {i} repeats an entry")));
                }
                seen_row[table[i][j]] = true;
                if seen_col[table[j][i]] {
                    return Err(Error::InvalidGroup(format!("column {i} repeats an entry")));
                }
                seen_col[table[j][i]] = true;
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverses = vec![0usize; m];
        for (i, inv) in inverses.iter_mut().enumerate() {
            let j = (0..m)
                .find(|&j| table[i][j] == 0)
                .expect("latin square rows hit the identity");
            if table[j][i] != 0 {
                return Err(Error::InvalidGroup(format!(
                    "element {i} has no two-sided inverse"
                )));
            }
            *inv = j;
        }
        Ok(Group::Cayley { table, inverses })
    }

    /// Direct product `Z^free_rank x Z/d_1 x ... x Z/d_k`, factors >= 2.
    pub fn abelian(free_rank: usize, torsion: Vec<u64>) -> Result<Group> {
        if let Some(&d) = torsion.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidGroup(format!("torsion factor {d} is below 2")));
        }
        if free_rank == 0 && torsion.is_empty() {
            return Err(Error::InvalidGroup(
                "abelian descriptor needs a free part or torsion factors".into(),
            ));
        }
        Ok(Group::Abelian { free_rank, torsion })
    }

    /// Cyclic group of order n as a Cayley table.
    pub fn z(n: usize) -> Group {
        assert!(n >= 1 && n <= MAX_CAYLEY_ORDER);
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Group::cayley(table).expect("cyclic table is a group")
    }

    /// Symmetric group on three letters, order 6. Elements are the
    /// permutations of {0,1,2} in lexicographic order, identity first;
    /// composition acts left-to-right on the right: (pq)(x) = p(q(x)).
    pub fn s3() -> Group {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| index([p[q[0]], p[q[1]], p[q[2]]]))
                    .collect()
            })
            .collect();
        Group::cayley(table).expect("permutation composition is a group")
    }

    /// Dihedral group of order 8. Element `a + 4b` is r^a f^b with the
    /// relations r^4 = 1, f^2 = 1, f r = r^{-1} f.
    pub fn d4() -> Group {
        let idx = |a: i64, b: i64| (a.rem_euclid(4) + 4 * b.rem_euclid(2)) as usize;
        let mut table = vec![vec![0usize; 8]; 8];
        for a in 0..4i64 {
            for b in 0..2i64 {
                for c in 0..4i64 {
                    for d in 0..2i64 {
                        let v = if b == 0 { idx(a + c, d) } else { idx(a - c, b + d) };
                        table[idx(a, b)][idx(c, d)] = v;
                    }
                }
            }
        }
        Group::cayley(table).expect("dihedral relations give a group")
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            Group::Cayley { .. } => GroupElem::Idx(0),
            Group::Abelian { free_rank, torsion } => {
                GroupElem::Ab(vec![0; free_rank + torsion.len()])
            }
        }
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        match (self, g) {
            (Group::Cayley { table, .. }, GroupElem::Idx(i)) => *i < table.len(),
            (Group::Abelian { free_rank, torsion }, GroupElem::Ab(v)) => {
                v.len() == free_rank + torsion.len()
                    && torsion
                        .iter()
                        .zip(&v[*free_rank..])
                        .all(|(&d, &c)| 0 <= c && (c as u64) < d)
            }
            _ => false,
        }
    }

    fn reduce_ab(&self, mut v: Vec<i64>) -> GroupElem {
        if let Group::Abelian { free_rank, torsion } = self {
            for (c, &d) in v[*free_rank..].iter_mut().zip(torsion) {
                *c = c.rem_euclid(d as i64);
            }
        }
        GroupElem::Ab(v)
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match (self, a, b) {
            (Group::Cayley { table, .. }, GroupElem::Idx(i), GroupElem::Idx(j)) => {
                GroupElem::Idx(table[*i][*j])
            }
            (Group::Abelian { .. }, GroupElem::Ab(u), GroupElem::Ab(v)) => {
                assert_eq!(u.len(), v.len(), "coordinate arity mismatch");
                self.reduce_ab(u.iter().zip(v).map(|(x, y)| x + y).collect())
            }
            _ => panic!("element does not belong to this group"),
        }
    }

    pub fn inv(&self, a: &GroupElem) -> GroupElem {
        match (self, a) {
            (Group::Cayley { inverses, .. }, GroupElem::Idx(i)) => GroupElem::Idx(inverses[*i]),
            (Group::Abelian { .. }, GroupElem::Ab(u)) => {
                self.reduce_ab(u.iter().map(|x| -x).collect())
            }
            _ => panic!("element does not belong to this group"),
        }
    }

    /// Group order; `None` when the free rank is positive.
    pub fn order(&self) -> Option<u128> {
        match self {
            Group::Cayley { table, .. } => Some(table.len() as u128),
            Group::Abelian { free_rank, torsion } => {
                if *free_rank > 0 {
                    None
                } else {
                    Some(torsion.iter().map(|&d| d as u128).product())
                }
            }
        }
    }

    /// All elements of a finite group, in canonical order.
    pub fn elements(&self) -> Option<Vec<GroupElem>> {
        match self {
            Group::Cayley { table, .. } => {
                Some((0..table.len()).map(GroupElem::Idx).collect())
            }
            Group::Abelian { free_rank, torsion } => {
                if *free_rank > 0 {
                    return None;
                }
                let mut out = vec![vec![]];
                for &d in torsion {
                    let mut next = Vec::with_capacity(out.len() * d as usize);
                    for prefix in &out {
                        for c in 0..d as i64 {
                            let mut v = prefix.clone();
                            v.push(c);
                            next.push(v);
                        }
                    }
                    out = next;
                }
                let mut elems: Vec<GroupElem> = out.into_iter().map(GroupElem::Ab).collect();
                elems.sort();
                Some(elems)
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Group::Cayley { table, .. } => {
                let m = table.len();
                (0..m).all(|i| (0..m).all(|j| table[i][j] == table[j][i]))
            }
            Group::Abelian { .. } => true,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Group::Cayley { table, .. } => format!("cayley({})", table.len()),
            Group::Abelian { free_rank, torsion } => {
                let mut parts = Vec::new();
                if *free_rank > 0 {
                    parts.push(format!("Z^{free_rank}"));
                }
                for d in torsion {
                    parts.push(format!("Z/{d}"));
                }
                parts.join(" x ")
            }
        }
    }
}

fn check_subset(group: &Group, xs: &BTreeSet<GroupElem>) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptySet);
    }
    if xs.iter().any(|g| !group.contains(g)) {
        return Err(Error::GroupMismatch);
    }
    Ok(())
}

/// Pointwise product set `XY = {xy : x in X, y in Y}`.
pub fn product_set(
    group: &Group,
    xs: &BTreeSet<GroupElem>,
    ys: &BTreeSet<GroupElem>,
) -> Result<BTreeSet<GroupElem>> {
    check_subset(group, xs)?;
    check_subset(group, ys)?;
    let mut out = BTreeSet::new();
    for x in xs {
        for y in ys {
            out.insert(group.mul(x, y));
        }
    }
    Ok(out)
}

pub fn inverse_set(group: &Group, xs: &BTreeSet<GroupElem>) -> Result<BTreeSet<GroupElem>> {
    check_subset(group, xs)?;
    Ok(xs.iter().map(|x| group.inv(x)).collect())
}

/// Stabilizer `{h : hX = X}` (left) or `{h : Xh = X}` (right). Any
/// stabilizing h satisfies h x0 in X for a fixed x0 in X, so the candidate
/// set `X x0^{-1}` (resp. `x0^{-1} X`) is exhaustive even in infinite
/// groups.
pub fn set_stabilizer(
    group: &Group,
    xs: &BTreeSet<GroupElem>,
    side: Side,
) -> Result<BTreeSet<GroupElem>> {
    check_subset(group, xs)?;
    let x0 = xs.iter().next().expect("nonempty").clone();
    let x0_inv = group.inv(&x0);
    let candidates: BTreeSet<GroupElem> = xs
        .iter()
        .map(|x| match side {
            Side::Left => group.mul(x, &x0_inv),
            Side::Right => group.mul(&x0_inv, x),
        })
        .collect();
    let mut stab = BTreeSet::new();
    for h in candidates {
        let translated: BTreeSet<GroupElem> = xs
            .iter()
            .map(|x| match side {
                Side::Left => group.mul(&h, x),
                Side::Right => group.mul(x, &h),
            })
            .collect();
        if translated == *xs {
            stab.insert(h);
        }
    }
    Ok(stab)
}

/// Parse a Cayley table: first line the order m, then m lines of m
/// whitespace-separated 0-based indices; `#` comments and blank lines are
/// ignored. The identity must be index 0.
pub fn parse_cayley_text(text: &str) -> Result<Group> {
    let mut order: Option<usize> = None;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut vals = Vec::new();
        for tok in line.split_whitespace() {
            let v: usize = tok.parse().map_err(|_| Error::Syntax {
                pos: lineno + 1,
                msg: format!("expected a nonnegative index, found {tok:?}"),
            })?;
            vals.push(v);
        }
        match order {
            None => {
                if vals.len() != 1 {
                    return Err(Error::Syntax {
                        pos: lineno + 1,
                        msg: "first line must hold the group order alone".into(),
                    });
                }
                order = Some(vals[0]);
            }
            Some(_) => rows.push(vals),
        }
    }
    let Some(m) = order else {
        return Err(Error::Syntax {
            pos: 0,
            msg: "empty table".into(),
        });
    };
    if rows.len() != m {
        return Err(Error::Syntax {
            pos: 0,
            msg: format!("declared order {m} but found {} rows", rows.len()),
        });
    }
    Group::cayley(rows)
}

/// A nonempty finite subset of a group, bundled with the group it lives
/// in. Elements are kept in a canonical ordered set, so equal sets compare
/// equal and iteration order is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSet {
    group: Group,
    elems: BTreeSet<GroupElem>,
}

impl GroupSet {
    /// Validates every element against the group; rejects empty sets.
    pub fn new(group: Group, elems: impl IntoIterator<Item = GroupElem>) -> Result<GroupSet> {
        let elems: BTreeSet<GroupElem> = elems.into_iter().collect();
        check_subset(&group, &elems)?;
        Ok(GroupSet { group, elems })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn elems(&self) -> &BTreeSet<GroupElem> {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.elems.contains(g)
    }

    /// Pointwise product {xy}; the groups must be identical.
    pub fn product(&self, other: &GroupSet) -> Result<GroupSet> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let elems = product_set(&self.group, &self.elems, &other.elems)?;
        Ok(GroupSet {
            group: self.group.clone(),
            elems,
        })
    }

    pub fn inverses(&self) -> GroupSet {
        let elems = inverse_set(&self.group, &self.elems).expect("validated at construction");
        GroupSet {
            group: self.group.clone(),
            elems,
        }
    }

    /// The stabilizer subgroup S(X) = {g : gX = X} (left) or {g : Xg = X}
    /// (right); finite even when the group has a free part, because only
    /// torsion elements can permute a finite set.
    pub fn stabilizer(&self, side: Side) -> GroupSet {
        let elems =
            set_stabilizer(&self.group, &self.elems, side).expect("validated at construction");
        GroupSet {
            group: self.group.clone(),
            elems,
        }
    }
}

fn group_descriptor(group: &Group) -> GroupDescriptor {
    match group {
        Group::Cayley { table, .. } => GroupDescriptor::Cayley {
            table: table.clone(),
        },
        Group::Abelian { free_rank, torsion } => GroupDescriptor::Abelian {
            free_rank: *free_rank,
            torsion: torsion.clone(),
        },
    }
}

fn group_algebra_backend(group: &Group, base: &BaseDescriptor) -> Result<Backend> {
    Backend::create(&BackendDescriptor::Ga {
        base: base.clone(),
        group: group_descriptor(group),
    })
}

/// The basis vector e_g of a group-algebra backend.
fn basis_vector(backend: &Backend, g: &GroupElem) -> Element {
    let mut m = BTreeMap::new();
    m.insert(g.clone(), backend.coeff_field().one());
    Element::GroupSum(m)
}

fn embed_into(backend: &Backend, x: &GroupSet) -> Result<SetInstance> {
    let elements = x.elems.iter().map(|g| basis_vector(backend, g)).collect();
    SetInstance::new(backend, elements, None)
}

/// Smallest prime p with GF(p) admissible as the coefficient field of the
/// group algebra, i.e. p coprime to the torsion (Maschke). A finite
/// coefficient field keeps exhaustive subspace enumeration available to
/// the linear checkers. Falls back to the rationals for pathological
/// orders divisible by every listed prime; the checkers then degrade to
/// heuristic subspace search.
fn coprime_prime_base(group: &Group) -> BaseDescriptor {
    let m: u128 = match group {
        Group::Cayley { table, .. } => table.len() as u128,
        Group::Abelian { torsion, .. } => torsion.iter().map(|&d| u128::from(d)).product(),
    };
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67]
        .into_iter()
        .find(|&p| m % u128::from(p) != 0)
        .map(|p| BaseDescriptor::Gf { p })
        .unwrap_or(BaseDescriptor::Q)
}

/// The set A_X = {e_g : g in X} inside k0[G].
///
/// Distinct basis vectors are linearly independent and multiply to basis
/// vectors, so |X| = dim k<A_X> over any coefficient field, and likewise
/// |XY| = dim k<A_X A_Y>; the first identity is asserted here and the
/// second by every checker that consumes the embedding. Fails with
/// `UnsupportedGroupCharacteristic` when the field characteristic divides
/// the torsion.
pub fn to_group_algebra(x: &GroupSet, base: &BaseDescriptor) -> Result<SetInstance> {
    let backend = group_algebra_backend(&x.group, base)?;
    let inst = embed_into(&backend, x)?;
    assert_eq!(
        span_of(&inst)?.dim(),
        x.len(),
        "basis vectors are independent"
    );
    Ok(inst)
}

/// The monomial model of a finitely generated torsion-free abelian group:
/// g = (a_1, ..., a_l) becomes the unit monomial e_g of Q[Z^l], a Laurent
/// polynomial ring, and the map is a genuine group homomorphism into the
/// units (checked on the support in debug builds). Three exact links to
/// the group side are asserted: |X| = dim Q<m(X)>, |XX| = dim of the
/// product span, and Q<m(S(X))> equals the left stabilizer of Q<m(X)>; in
/// a torsion-free group only the identity stabilizes a finite set, so both
/// sides of the last link are the base field.
///
/// Groups with torsion are declined. The companion model would adjoin a
/// t_j-th root of an indeterminate per torsion factor (note the defining
/// polynomial of that adjunction has to be the product of the Z^{t_j} - x_j,
/// not its already-split rearrangement), and over the bare rational
/// constants such spans overcount: for Z/2 the monomials {1, x^{1/2}}
/// multiply into {1, x^{1/2}, x}, of dimension 3 over Q, while the product
/// set has 2 elements. The group-algebra route ([`to_group_algebra`])
/// realizes the cardinality correspondence exactly for every finite group,
/// so torsion goes through it instead.
pub fn embed_torsion_free(x: &GroupSet) -> Result<SetInstance> {
    let Group::Abelian { free_rank, torsion } = &x.group else {
        return Err(Error::TorsionPresent);
    };
    if !torsion.is_empty() || *free_rank == 0 {
        return Err(Error::TorsionPresent);
    }
    let backend = group_algebra_backend(&x.group, &BaseDescriptor::Q)?;
    let inst = embed_into(&backend, x)?;
    #[cfg(debug_assertions)]
    for g in &x.elems {
        for h in &x.elems {
            let product = backend.mul(&basis_vector(&backend, g), &basis_vector(&backend, h))?;
            debug_assert_eq!(
                product,
                basis_vector(&backend, &x.group.mul(g, h)),
                "the embedding is multiplicative"
            );
        }
    }
    let span = span_of(&inst)?;
    assert_eq!(span.dim(), x.len(), "monomials are independent");
    let square = x.product(x)?;
    assert_eq!(
        product_span(&inst, &inst)?.dim(),
        square.len(),
        "product span dimension matches the product set"
    );
    let s = x.stabilizer(Side::Left);
    assert_eq!(
        s.elems,
        BTreeSet::from([x.group.identity()]),
        "finite subsets of a torsion-free group have trivial stabilizer"
    );
    let s_span = span_of_elements(&backend, &[basis_vector(&backend, &x.group.identity())])?;
    let stab = structure::stabilizer(&span, Side::Left)?;
    assert!(
        stab.subspace.eq_subspace(&s_span)?,
        "the stabilizer subgroup spans the stabilizer subalgebra"
    );
    Ok(inst)
}

/// Kneser bound |XY| >= |X| + |Y| - |H| with H = S(XY), in an abelian
/// group, with the algebra-side dual computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupKneserReport {
    pub x_card: usize,
    pub y_card: usize,
    pub product_card: usize,
    pub stabilizer_card: usize,
    pub bound: i64,
    pub holds: bool,
}

/// Verifies Kneser's addition theorem on X, Y: |XY| >= |X| + |Y| - |S(XY)|.
///
/// Every cardinality is computed twice, by direct enumeration and as a
/// span dimension in Q[G] (the stabilizer subgroup against the left
/// stabilizer subalgebra of the product span); any disagreement panics,
/// as does a violated bound, since both are theorems.
pub fn group_kneser_check(x: &GroupSet, y: &GroupSet) -> Result<GroupKneserReport> {
    if x.group != y.group {
        return Err(Error::GroupMismatch);
    }
    if !x.group.is_abelian() {
        return Err(Error::NonAbelianGroup);
    }
    let xy = x.product(y)?;
    let h = xy.stabilizer(Side::Left);
    let backend = group_algebra_backend(&x.group, &BaseDescriptor::Q)?;
    let ax = embed_into(&backend, x)?;
    let ay = embed_into(&backend, y)?;
    assert_eq!(span_of(&ax)?.dim(), x.len());
    assert_eq!(span_of(&ay)?.dim(), y.len());
    let prod = product_span(&ax, &ay)?;
    assert_eq!(prod.dim(), xy.len(), "|XY| must match dim of the product span");
    let stab = structure::stabilizer(&prod, Side::Left)?;
    assert_eq!(
        stab.dim(),
        h.len(),
        "|S(XY)| must match dim of the stabilizer subalgebra"
    );
    let bound = x.len() as i64 + y.len() as i64 - h.len() as i64;
    let holds = xy.len() as i64 >= bound;
    assert!(holds, "Kneser's theorem holds in every abelian group");
    Ok(GroupKneserReport {
        x_card: x.len(),
        y_card: y.len(),
        product_card: xy.len(),
        stabilizer_card: h.len(),
        bound,
        holds,
    })
}

/// One power row of the group Plunnecke verification: |X'Y^n| against
/// alpha^n |X'| for the ratio-minimizing subset X'.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPowerRow {
    pub n: u32,
    pub card: usize,
    pub bound: BigRational,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPlunneckeReport {
    pub alpha: BigRational,
    pub minimizer: GroupSet,
    pub rows: Vec<GroupPowerRow>,
    pub holds: bool,
}

/// Largest |X| admitted to the exhaustive subset search of
/// [`group_plunnecke_check`].
pub const MAX_PLUNNECKE_SUBSETS: usize = 16;

/// Verifies the Plunnecke power bounds in an abelian group: with
/// alpha = |XY|/|X|, the subset X' of X minimizing |X'Y|/|X'| satisfies
/// |X'Y^n| <= alpha^n |X'| for every n (the Petridis argument makes one
/// subset witness all powers at once).
///
/// The minimizer is found by exhaustive subset search, each power row is
/// replayed as a span dimension in GF(p)[G] for a prime coprime to the
/// torsion, and the linear power checker is run on the embedded sets; the
/// doubling ratios must agree exactly, and every bound must hold.
pub fn group_plunnecke_check(
    x: &GroupSet,
    y: &GroupSet,
    n_max: u32,
) -> Result<GroupPlunneckeReport> {
    if x.group != y.group {
        return Err(Error::GroupMismatch);
    }
    if !x.group.is_abelian() {
        return Err(Error::NonAbelianGroup);
    }
    if x.len() > MAX_PLUNNECKE_SUBSETS {
        return Err(Error::BudgetExceeded(format!(
            "subset search over {} elements exceeds the 2^{MAX_PLUNNECKE_SUBSETS} ceiling",
            x.len()
        )));
    }
    let xy = x.product(y)?;
    let alpha = ratio(xy.len(), x.len());
    let elems: Vec<GroupElem> = x.elems.iter().cloned().collect();
    let mut best: Option<(usize, usize, GroupSet)> = None;
    for mask in 1u32..(1u32 << elems.len()) {
        let subset: BTreeSet<GroupElem> = elems
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, g)| g.clone())
            .collect();
        let sub = GroupSet {
            group: x.group.clone(),
            elems: subset,
        };
        let card = sub.product(y)?.len();
        // Strict improvement keeps the first minimizer in mask order, so
        // the witness is deterministic.
        let better = match &best {
            None => true,
            Some((best_card, best_len, _)) => card * best_len < best_card * sub.len(),
        };
        if better {
            best = Some((card, sub.len(), sub));
        }
    }
    let (_, _, minimizer) = best.expect("X is nonempty");
    let mut rows = Vec::new();
    let mut acc = minimizer.clone();
    for n in 1..=n_max {
        acc = acc.product(y)?;
        let bound = rat_pow(&alpha, n) * rat(minimizer.len());
        let holds = rat(acc.len()) <= bound;
        rows.push(GroupPowerRow {
            n,
            card: acc.len(),
            bound,
            holds,
        });
    }
    let backend = group_algebra_backend(&x.group, &coprime_prime_base(&x.group))?;
    let ax = embed_into(&backend, x)?;
    let ay = embed_into(&backend, y)?;
    let amin = embed_into(&backend, &minimizer)?;
    assert_eq!(product_span(&ax, &ay)?.dim(), xy.len());
    for row in &rows {
        let mut factors: Vec<&SetInstance> = vec![&amin];
        factors.extend(std::iter::repeat(&ay).take(row.n as usize));
        assert_eq!(
            product_span_n(&factors)?.dim(),
            row.card,
            "|X'Y^n| must match dim of the power span"
        );
    }
    let linear = theorems::algebra_plunnecke(&ax, &ay, n_max)?;
    assert_eq!(linear.alpha, alpha, "doubling ratios must agree");
    if linear.mode == SearchMode::Exhaustive {
        assert!(linear.holds, "the linear power bounds are theorems");
    }
    let holds = rows.iter().all(|r| r.holds);
    assert!(holds, "the Petridis minimizer satisfies every power bound");
    Ok(GroupPlunneckeReport {
        alpha,
        minimizer,
        rows,
        holds,
    })
}

/// Triple-product bound |XYZ|^2 <= |XY| |YZ| max_y |XyZ|, valid in every
/// group, with the algebra-side dual computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRuzsaReport {
    pub xy_card: usize,
    pub yz_card: usize,
    pub xyz_card: usize,
    pub max_middle_card: usize,
    pub holds: bool,
}

/// Verifies the Ruzsa triple-product inequality on X, Y, Z, replaying all
/// four cardinalities through the linear triple checker on the embedded
/// sets in Q[G]; the group needs no commutativity.
pub fn group_ruzsa_check(x: &GroupSet, y: &GroupSet, z: &GroupSet) -> Result<GroupRuzsaReport> {
    if x.group != y.group || y.group != z.group {
        return Err(Error::GroupMismatch);
    }
    let xy = x.product(y)?;
    let yz = y.product(z)?;
    let xyz = xy.product(z)?;
    let mut max_middle = 0usize;
    for g in &y.elems {
        let single = GroupSet {
            group: y.group.clone(),
            elems: BTreeSet::from([g.clone()]),
        };
        max_middle = max_middle.max(x.product(&single)?.product(z)?.len());
    }
    let backend = group_algebra_backend(&x.group, &BaseDescriptor::Q)?;
    let ax = embed_into(&backend, x)?;
    let ay = embed_into(&backend, y)?;
    let az = embed_into(&backend, z)?;
    let triple = theorems::algebra_triple(&ax, &ay, &az)?;
    assert_eq!(triple.ab_dim, xy.len());
    assert_eq!(triple.bc_dim, yz.len());
    assert_eq!(triple.abc_dim, xyz.len());
    assert_eq!(triple.max_translate_dim, max_middle);
    assert!(triple.squared_holds);
    let holds = (xyz.len() as u128).pow(2)
        <= xy.len() as u128 * yz.len() as u128 * max_middle as u128;
    assert!(holds, "the triple-product inequality holds in every group");
    Ok(GroupRuzsaReport {
        xy_card: xy.len(),
        yz_card: yz.len(),
        xyz_card: xyz.len(),
        max_middle_card: max_middle,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[GroupElem]) -> BTreeSet<GroupElem> {
        items.iter().cloned().collect()
    }

    fn ab(v: &[i64]) -> GroupElem {
        GroupElem::Ab(v.to_vec())
    }

    #[test]
    fn cyclic_and_sample_groups_validate() {
        for g in [Group::z(1), Group::z(6), Group::s3(), Group::d4()] {
            let elems = g.elements().unwrap();
            assert_eq!(elems.len() as u128, g.order().unwrap());
            for a in &elems {
                assert_eq!(g.mul(a, &g.inv(a)), g.identity());
                assert_eq!(g.mul(&g.inv(a), a), g.identity());
            }
        }
        assert!(Group::z(6).is_abelian());
        assert!(!Group::s3().is_abelian());
        assert!(!Group::d4().is_abelian());
    }

    #[test]
    fn bad_tables_are_rejected() {
        assert!(matches!(
            Group::cayley(vec![vec![0, 1], vec![1, 1]]),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(
            Group::cayley(vec![vec![1, 0], vec![0, 1]]),
            Err(Error::InvalidGroup(_))
        ));
        assert!(matches!(Group::cayley(vec![]), Err(Error::InvalidGroup(_))));
        // Latin square that breaks associativity: the order-5 loop below has
        // 0 as identity but (1*1)*2 != 1*(1*2).
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(Group::cayley(loop5), Err(Error::InvalidGroup(_))));
    }

    #[test]
    fn abelian_coordinates_reduce_into_range() {
        let g = Group::abelian(0, vec![2, 4]).unwrap();
        assert_eq!(g.mul(&ab(&[1, 3]), &ab(&[1, 2])), ab(&[0, 1]));
        assert_eq!(g.inv(&ab(&[1, 3])), ab(&[1, 1]));
        assert_eq!(g.order(), Some(8));
        assert_eq!(g.elements().unwrap().len(), 8);
        let free = Group::abelian(2, vec![]).unwrap();
        assert_eq!(free.order(), None);
        assert!(free.elements().is_none());
        assert_eq!(free.mul(&ab(&[3, -1]), &ab(&[-5, 2])), ab(&[-2, 1]));
        assert!(matches!(
            Group::abelian(0, vec![1]),
            Err(Error::InvalidGroup(_))
        ));
    }

    // Oracle: in S3 the set {identity, (0 1)} is a subgroup, so it is its
    // own left stabilizer; hand-checked that perms[2] = [1,0,2] squares to
    // the identity.
    #[test]
    fn stabilizer_of_a_subgroup_is_itself() {
        let g = Group::s3();
        let x = set(&[GroupElem::Idx(0), GroupElem::Idx(2)]);
        let prod = product_set(&g, &x, &x).unwrap();
        assert_eq!(prod, x);
        assert_eq!(set_stabilizer(&g, &x, Side::Left).unwrap(), x);
        assert_eq!(set_stabilizer(&g, &x, Side::Right).unwrap(), x);
    }

    #[test]
    fn stabilizer_in_the_integers_is_trivial() {
        let g = Group::abelian(1, vec![]).unwrap();
        let x = set(&[ab(&[0]), ab(&[1])]);
        let stab = set_stabilizer(&g, &x, Side::Left).unwrap();
        assert_eq!(stab, set(&[ab(&[0])]));
        let sum = product_set(&g, &x, &x).unwrap();
        assert_eq!(sum, set(&[ab(&[0]), ab(&[1]), ab(&[2])]));
    }

    #[test]
    fn stabilizers_differ_by_side_in_d4() {
        // X = {1, r, f}: left stabilizer and right stabilizer are both
        // trivial, but a coset X = rH for H = {1, f} has left stabilizer H'
        // = rHr^{-1} while the right stabilizer is H.
        let g = Group::d4();
        let h = set(&[GroupElem::Idx(0), GroupElem::Idx(4)]);
        assert_eq!(product_set(&g, &h, &h).unwrap(), h);
        let r = GroupElem::Idx(1);
        let coset: BTreeSet<GroupElem> = h.iter().map(|x| g.mul(&r, x)).collect();
        let right = set_stabilizer(&g, &coset, Side::Right).unwrap();
        assert_eq!(right, h);
        let left = set_stabilizer(&g, &coset, Side::Left).unwrap();
        let conj: BTreeSet<GroupElem> = h
            .iter()
            .map(|x| g.mul(&g.mul(&r, x), &g.inv(&r)))
            .collect();
        assert_eq!(left, conj);
        assert_ne!(left, right);
    }

    #[test]
    fn inverse_set_of_subgroup_is_itself() {
        let g = Group::s3();
        let x = set(&[GroupElem::Idx(0), GroupElem::Idx(3), GroupElem::Idx(4)]);
        // {e, (012), (021)} is the alternating subgroup.
        assert_eq!(product_set(&g, &x, &x).unwrap(), x);
        assert_eq!(inverse_set(&g, &x).unwrap(), x);
    }

    #[test]
    fn parse_cayley_roundtrip() {
        let text = "# cyclic of order 4\n4\n0 1 2 3\n1 2 3 0\n2 3 0 1\n3 0 1 2\n";
        let g = parse_cayley_text(text).unwrap();
        assert_eq!(g, Group::z(4));
        assert!(matches!(
            parse_cayley_text("2\n0 1\nx 0\n"),
            Err(Error::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_cayley_text("2\n0 1\n"),
            Err(Error::Syntax { .. })
        ));
    }

    #[test]
    fn mismatched_sets_are_rejected() {
        let g = Group::z(4);
        let x = set(&[ab(&[0])]);
        assert!(matches!(
            product_set(&g, &x, &x),
            Err(Error::GroupMismatch)
        ));
        assert!(matches!(
            set_stabilizer(&g, &BTreeSet::new(), Side::Left),
            Err(Error::EmptySet)
        ));
    }

    use crate::seeded::rng_for;
    use rand::Rng;

    fn gset(group: &Group, items: &[GroupElem]) -> GroupSet {
        GroupSet::new(group.clone(), items.iter().cloned()).unwrap()
    }

    fn random_subset(group: &Group, rng: &mut impl Rng, max_len: usize) -> GroupSet {
        let all = group.elements().expect("finite group");
        let len = rng.gen_range(1..=max_len.min(all.len()));
        let mut chosen = BTreeSet::new();
        while chosen.len() < len {
            chosen.insert(all[rng.gen_range(0..all.len())].clone());
        }
        GroupSet::new(group.clone(), chosen).unwrap()
    }

    // Oracle: in Z/5, {0,1}{0,1} = {0,1,2}; in S3, {id, swap01}{swap02}
    // lands on {swap02, rot201} by two table lookups.
    #[test]
    fn group_set_products_and_errors() {
        let z5 = Group::z(5);
        let x = gset(&z5, &[GroupElem::Idx(0), GroupElem::Idx(1)]);
        let xx = x.product(&x).unwrap();
        assert_eq!(
            xx.elems(),
            &set(&[GroupElem::Idx(0), GroupElem::Idx(1), GroupElem::Idx(2)])
        );
        let e = gset(&z5, &[GroupElem::Idx(0)]);
        assert_eq!(e.product(&x).unwrap(), x);
        let s3 = Group::s3();
        let a = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(2)]);
        let b = gset(&s3, &[GroupElem::Idx(5)]);
        assert_eq!(
            a.product(&b).unwrap().elems(),
            &set(&[GroupElem::Idx(4), GroupElem::Idx(5)])
        );
        let other = gset(&Group::z(4), &[GroupElem::Idx(0)]);
        assert!(matches!(x.product(&other), Err(Error::GroupMismatch)));
        assert!(matches!(
            GroupSet::new(z5, Vec::new()),
            Err(Error::EmptySet)
        ));
    }

    // Oracle: {0,3} is the order-2 subgroup of Z/6, so it stabilizes
    // itself; {0,1} in Z/5 forces the stabilizer down to {0}; in the
    // integers only 0 stabilizes any finite set.
    #[test]
    fn group_set_stabilizer_oracles() {
        let z6 = Group::abelian(0, vec![6]).unwrap();
        let x = gset(&z6, &[ab(&[0]), ab(&[3])]);
        assert_eq!(x.stabilizer(Side::Left), x);
        let z5 = Group::abelian(0, vec![5]).unwrap();
        let y = gset(&z5, &[ab(&[0]), ab(&[1])]);
        assert_eq!(y.stabilizer(Side::Left).elems(), &set(&[ab(&[0])]));
        let free = Group::abelian(1, vec![]).unwrap();
        let w = gset(&free, &[ab(&[0]), ab(&[1])]);
        assert_eq!(w.stabilizer(Side::Right).elems(), &set(&[ab(&[0])]));
        let s3 = Group::s3();
        let sub = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(2)]);
        assert_eq!(sub.stabilizer(Side::Left), sub);
        assert_eq!(sub.inverses(), sub);
    }

    // Oracle: A_{0,1} in Q[Z/5] spans 2 dimensions and its square spans 3,
    // matching |{0,1,2}|; GF(3) gives the same dimensions; GF(2) base over
    // Z/2 is rejected because the characteristic divides the torsion.
    #[test]
    fn group_algebra_embedding_dims() {
        let z5 = Group::abelian(0, vec![5]).unwrap();
        let x = gset(&z5, &[ab(&[0]), ab(&[1])]);
        let inst = to_group_algebra(&x, &BaseDescriptor::Q).unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(product_span(&inst, &inst).unwrap().dim(), 3);
        let inst3 = to_group_algebra(&x, &BaseDescriptor::Gf { p: 3 }).unwrap();
        assert_eq!(product_span(&inst3, &inst3).unwrap().dim(), 3);
        let z2 = Group::abelian(0, vec![2]).unwrap();
        let w = gset(&z2, &[ab(&[0]), ab(&[1])]);
        assert!(matches!(
            to_group_algebra(&w, &BaseDescriptor::Gf { p: 2 }),
            Err(Error::UnsupportedGroupCharacteristic(_))
        ));
    }

    // Oracle: {1, T, T^2} has dimension 3; {1, T}^2 spans {1, T, T^2};
    // {T^-1, 1, T^2} squares to six distinct exponents; three monomials in
    // two variables stay independent.
    #[test]
    fn torsion_free_monomial_embedding() {
        let z = Group::abelian(1, vec![]).unwrap();
        let x = gset(&z, &[ab(&[0]), ab(&[1]), ab(&[2])]);
        let inst = embed_torsion_free(&x).unwrap();
        assert_eq!(span_of(&inst).unwrap().dim(), 3);
        let pair = gset(&z, &[ab(&[0]), ab(&[1])]);
        let pinst = embed_torsion_free(&pair).unwrap();
        assert_eq!(product_span(&pinst, &pinst).unwrap().dim(), 3);
        let laurent = gset(&z, &[ab(&[-1]), ab(&[0]), ab(&[2])]);
        let linst = embed_torsion_free(&laurent).unwrap();
        assert_eq!(product_span(&linst, &linst).unwrap().dim(), 6);
        let z2 = Group::abelian(2, vec![]).unwrap();
        let plane = gset(&z2, &[ab(&[0, 0]), ab(&[1, 0]), ab(&[0, 1])]);
        assert_eq!(embed_torsion_free(&plane).unwrap().len(), 3);
        let mixed = Group::abelian(1, vec![3]).unwrap();
        let t = gset(&mixed, &[ab(&[0, 0])]);
        assert!(matches!(embed_torsion_free(&t), Err(Error::TorsionPresent)));
        let cayley = gset(&Group::z(4), &[GroupElem::Idx(1)]);
        assert!(matches!(
            embed_torsion_free(&cayley),
            Err(Error::TorsionPresent)
        ));
    }

    // Oracle: Z/5 with X = Y = {0,1} meets the bound 3 = 2 + 2 - 1 with a
    // trivial stabilizer; Z/6 with the subgroup {0,3} is periodic, |H| = 2;
    // in Z the interval sums meet |X| + |Y| - 1 exactly.
    #[test]
    fn kneser_check_oracles() {
        let z5 = Group::abelian(0, vec![5]).unwrap();
        let x = gset(&z5, &[ab(&[0]), ab(&[1])]);
        let r = group_kneser_check(&x, &x).unwrap();
        assert_eq!((r.product_card, r.stabilizer_card, r.bound), (3, 1, 3));
        assert!(r.holds);
        let z6 = Group::abelian(0, vec![6]).unwrap();
        let w = gset(&z6, &[ab(&[0]), ab(&[3])]);
        let r6 = group_kneser_check(&w, &w).unwrap();
        assert_eq!((r6.product_card, r6.stabilizer_card, r6.bound), (2, 2, 2));
        let free = Group::abelian(1, vec![]).unwrap();
        let a = gset(&free, &[ab(&[0]), ab(&[1])]);
        let b = gset(&free, &[ab(&[0]), ab(&[1]), ab(&[2])]);
        let rz = group_kneser_check(&a, &b).unwrap();
        assert_eq!((rz.product_card, rz.stabilizer_card, rz.bound), (4, 1, 4));
        let s3 = Group::s3();
        let n = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(2)]);
        assert!(matches!(
            group_kneser_check(&n, &n),
            Err(Error::NonAbelianGroup)
        ));
        assert!(matches!(
            group_kneser_check(&x, &w),
            Err(Error::GroupMismatch)
        ));
    }

    // Oracle: Z/5 with X = Y = {0,1}: alpha = 3/2, the full set minimizes
    // the ratio, and the power cards 3, 4, 5 sit under 3, 9/2, 27/4. In
    // Z/6 with X = {0,1,3} and Y = {0,3} the subgroup {0,3} inside X has
    // ratio 1 < alpha = 4/3, so the minimizer is a proper subset.
    #[test]
    fn plunnecke_check_oracles() {
        let z5 = Group::abelian(0, vec![5]).unwrap();
        let x = gset(&z5, &[ab(&[0]), ab(&[1])]);
        let r = group_plunnecke_check(&x, &x, 3).unwrap();
        assert_eq!(r.alpha, ratio(3, 2));
        assert_eq!(r.minimizer, x);
        let cards: Vec<usize> = r.rows.iter().map(|row| row.card).collect();
        assert_eq!(cards, vec![3, 4, 5]);
        assert_eq!(r.rows[2].bound, ratio(27, 4));
        assert!(r.holds);

        let z6 = Group::abelian(0, vec![6]).unwrap();
        let a = gset(&z6, &[ab(&[0]), ab(&[1]), ab(&[3])]);
        let b = gset(&z6, &[ab(&[0]), ab(&[3])]);
        let r6 = group_plunnecke_check(&a, &b, 2).unwrap();
        assert_eq!(r6.alpha, ratio(4, 3));
        assert_eq!(r6.minimizer.elems(), &set(&[ab(&[0]), ab(&[3])]));
        assert_eq!(r6.rows[1].card, 2);
        assert!(r6.holds);

        let s3 = Group::s3();
        let n = gset(&s3, &[GroupElem::Idx(1)]);
        assert!(matches!(
            group_plunnecke_check(&n, &n, 1),
            Err(Error::NonAbelianGroup)
        ));
        let z20 = Group::abelian(0, vec![20]).unwrap();
        let big = GroupSet::new(z20, (0..17i64).map(|i| ab(&[i]))).unwrap();
        assert!(matches!(
            group_plunnecke_check(&big, &big, 1),
            Err(Error::BudgetExceeded(_))
        ));
    }

    // Oracle in S3 with X = {id, swap01}, Y = {id, swap02},
    // Z = {id, rot120}: |XY| = |YZ| = 4, XYZ covers the whole group, and
    // every middle translate XyZ has 4 elements, so 36 <= 64.
    #[test]
    fn ruzsa_check_oracles() {
        let s3 = Group::s3();
        let x = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(2)]);
        let y = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(5)]);
        let z = gset(&s3, &[GroupElem::Idx(0), GroupElem::Idx(3)]);
        let r = group_ruzsa_check(&x, &y, &z).unwrap();
        assert_eq!(
            (r.xy_card, r.yz_card, r.xyz_card, r.max_middle_card),
            (4, 4, 6, 4)
        );
        assert!(r.holds);
        let z5 = Group::abelian(0, vec![5]).unwrap();
        let w = gset(&z5, &[ab(&[0]), ab(&[1])]);
        let r5 = group_ruzsa_check(&w, &w, &w).unwrap();
        assert_eq!(
            (r5.xy_card, r5.yz_card, r5.xyz_card, r5.max_middle_card),
            (3, 3, 4, 3)
        );
        let d4 = Group::d4();
        let v = gset(&d4, &[GroupElem::Idx(0)]);
        assert!(matches!(
            group_ruzsa_check(&x, &y, &v),
            Err(Error::GroupMismatch)
        ));
    }

    // Every nonempty X inside Z/n for n <= 8: |X| = dim A_X, |XX| matches
    // the squared span, and S(X) spans the left stabilizer subalgebra of
    // the span of A_X over the rationals.
    #[test]
    fn correspondence_exhaustive_small_cyclic() {
        for n in 2..=8u64 {
            let g = Group::abelian(0, vec![n]).unwrap();
            let backend = group_algebra_backend(&g, &BaseDescriptor::Q).unwrap();
            let all = g.elements().unwrap();
            for mask in 1u32..(1 << n) {
                let elems: BTreeSet<GroupElem> = all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, e)| e.clone())
                    .collect();
                let x = GroupSet::new(g.clone(), elems).unwrap();
                let inst = embed_into(&backend, &x).unwrap();
                let span = span_of(&inst).unwrap();
                assert_eq!(span.dim(), x.len());
                assert_eq!(
                    product_span(&inst, &inst).unwrap().dim(),
                    x.product(&x).unwrap().len()
                );
                let stab = structure::stabilizer(&span, Side::Left).unwrap();
                let s = x.stabilizer(Side::Left);
                let vectors: Vec<Element> =
                    s.elems().iter().map(|e| basis_vector(&backend, e)).collect();
                let s_span = span_of_elements(&backend, &vectors).unwrap();
                assert!(stab.subspace.eq_subspace(&s_span).unwrap());
            }
        }
    }

    // Random sets in assorted groups, abelian and not, over the rationals
    // and a coprime prime field: the cardinality, product, and stabilizer
    // correspondences hold, and the group-level theorems verify.
    #[test]
    fn correspondence_random_cases() {
        let mut rng = rng_for(0x67727030, 0);
        let groups: Vec<Group> = vec![
            Group::abelian(0, vec![9]).unwrap(),
            Group::abelian(0, vec![12]).unwrap(),
            Group::abelian(0, vec![16]).unwrap(),
            Group::abelian(0, vec![2, 4]).unwrap(),
            Group::abelian(0, vec![3, 3]).unwrap(),
            Group::abelian(0, vec![2, 2, 2]).unwrap(),
            Group::s3(),
            Group::d4(),
            Group::z(10),
        ];
        for case in 0..300 {
            let g = &groups[case % groups.len()];
            let x = random_subset(g, &mut rng, 4);
            let y = random_subset(g, &mut rng, 4);
            let base = if case % 2 == 0 {
                BaseDescriptor::Q
            } else {
                coprime_prime_base(g)
            };
            let backend = group_algebra_backend(g, &base).unwrap();
            let ax = embed_into(&backend, &x).unwrap();
            let ay = embed_into(&backend, &y).unwrap();
            assert_eq!(span_of(&ax).unwrap().dim(), x.len());
            let xy = x.product(&y).unwrap();
            let prod = product_span(&ax, &ay).unwrap();
            assert_eq!(prod.dim(), xy.len());
            let stab = structure::stabilizer(&prod, Side::Left).unwrap();
            assert_eq!(stab.dim(), xy.stabilizer(Side::Left).len());
            if g.is_abelian() {
                assert!(group_kneser_check(&x, &y).unwrap().holds);
                if case % 3 == 0 {
                    assert!(group_plunnecke_check(&x, &y, 2).unwrap().holds);
                }
            }
            assert!(group_ruzsa_check(&x, &y, &x).unwrap().holds);
        }
    }

    // Torsion-free supports with negative exponents: the embedding keeps
    // its three asserted links on every random support, and products of
    // two different supports match their exponent-sum counts.
    #[test]
    fn torsion_free_random_supports() {
        let mut rng = rng_for(0x67727031, 0);
        for case in 0..40usize {
            let l = 1 + case % 3;
            let g = Group::abelian(l, vec![]).unwrap();
            let mut sample = |limit: usize| {
                let mut elems = BTreeSet::new();
                let len = rng.gen_range(1..=limit);
                while elems.len() < len {
                    let v: Vec<i64> = (0..l).map(|_| rng.gen_range(-3..=3)).collect();
                    elems.insert(GroupElem::Ab(v));
                }
                GroupSet::new(g.clone(), elems).unwrap()
            };
            let x = sample(4);
            let y = sample(3);
            let xinst = embed_torsion_free(&x).unwrap();
            let yinst = embed_torsion_free(&y).unwrap();
            assert_eq!(xinst.len(), x.len());
            assert_eq!(
                product_span(&xinst, &yinst).unwrap().dim(),
                x.product(&y).unwrap().len()
            );
        }
    }
}
