//! Seeded instance generation: sample sets against a backend, run one
//! checker per instance, and greedily shrink any failure.
//!
//! Instance i draws all of its randomness from a stream keyed by the
//! master seed and i alone, so results are identical for every thread
//! count and worker schedule; workers return indexed records that are
//! merged in index order.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use spanbound::field::Field;
use spanbound::groups::{Group, GroupElem};
use spanbound::scalars::{sample_element, sample_set, Backend, BackendDescriptor, Element,
    SampleBudget};
use spanbound::seeded::rng_for;
use spanbound::spans::SetInstance;
use spanbound::Error;

use crate::instance::{Query, RunMode};
use crate::runner::{finite_coeff_field, run_query, CliError, RunRecord, RunReport};

/// Checkers the fuzzer can sample instances for. Parameterized checkers
/// (epsilon, lambda) run through instance files instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckerKind {
    Kneser,
    Rho,
    Petridis,
    Plunnecke,
    RuzsaTriple,
    Cube,
    Dyson,
    Diderrich,
    SubringSearch,
    AlgebraPetridis,
    AlgebraPlunnecke,
    AlgebraTriple,
}

impl CheckerKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckerKind::Kneser => "kneser",
            CheckerKind::Rho => "rho",
            CheckerKind::Petridis => "petridis",
            CheckerKind::Plunnecke => "plunnecke",
            CheckerKind::RuzsaTriple => "ruzsa-triple",
            CheckerKind::Cube => "cube",
            CheckerKind::Dyson => "dyson",
            CheckerKind::Diderrich => "diderrich",
            CheckerKind::SubringSearch => "subring-search",
            CheckerKind::AlgebraPetridis => "algebra-petridis",
            CheckerKind::AlgebraPlunnecke => "algebra-plunnecke",
            CheckerKind::AlgebraTriple => "algebra-triple",
        }
    }
}

/// One fuzzing campaign.
#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub backend: BackendDescriptor,
    pub checker: CheckerKind,
    pub count: u64,
    pub seed: u64,
    /// Upper bound on sampled set sizes; sizes are drawn from 1..=max_set.
    pub max_set: usize,
    /// Power rows for the Plünnecke checkers.
    pub n_max: u32,
    pub budget: Option<u64>,
    pub mode: RunMode,
    pub threads: usize,
}

/// Reject checker/backend combinations whose preconditions cannot be met
/// by sampling, so a campaign never trips a library gate mid-run.
pub fn check_compat(checker: CheckerKind, backend: &Backend) -> Result<(), CliError> {
    let fail = |what: &str| -> Result<(), CliError> {
        Err(CliError::Lib(Error::IncompatibleChecker(format!(
            "{} needs {what}",
            checker.name()
        ))))
    };
    let division = backend.is_division_ring();
    let commutative = backend.is_commutative();
    let group_algebra = matches!(backend.descriptor(), BackendDescriptor::Ga { .. });
    match checker {
        CheckerKind::Kneser | CheckerKind::Plunnecke | CheckerKind::Cube | CheckerKind::Dyson
        | CheckerKind::Diderrich => {
            if !division || !commutative {
                return fail("a commutative division backend");
            }
        }
        CheckerKind::Rho | CheckerKind::RuzsaTriple => {
            if !division {
                return fail("a division backend");
            }
        }
        CheckerKind::Petridis => {
            if !division || !commutative || !finite_coeff_field(backend) {
                return fail(
                    "a commutative division backend with a finite coefficient field",
                );
            }
        }
        CheckerKind::SubringSearch => {
            if !division || backend.dim_over_base().is_none() {
                return fail("a finite-dimensional division backend");
            }
        }
        CheckerKind::AlgebraPetridis | CheckerKind::AlgebraPlunnecke => {
            if !group_algebra || !commutative {
                return fail("an abelian group-algebra backend");
            }
        }
        CheckerKind::AlgebraTriple => {
            if !group_algebra {
                return fail("a group-algebra backend");
            }
        }
    }
    Ok(())
}

/// A monomial is the unit e_g; over any group these are the sampler's
/// stock of units.
fn sample_monomial(backend: &Backend, rng: &mut impl Rng) -> Element {
    let group = backend.group().expect("monomials need a group algebra");
    let g = match group.elements() {
        Some(all) => all[rng.gen_range(0..all.len())].clone(),
        None => match group {
            Group::Abelian { free_rank, torsion } => {
                let mut coords: Vec<i64> =
                    (0..*free_rank).map(|_| rng.gen_range(-3..=3)).collect();
                for t in torsion {
                    coords.push(rng.gen_range(0..*t as i64));
                }
                GroupElem::Ab(coords)
            }
            Group::Cayley { .. } => unreachable!("cayley groups enumerate"),
        },
    };
    Element::GroupSum(BTreeMap::from([(g, backend.coeff_field().one())]))
}

fn sample_monomial_set(
    backend: &Backend,
    rng: &mut impl Rng,
    size: usize,
    name: &str,
) -> Result<SetInstance, CliError> {
    let mut elems: Vec<Element> = Vec::new();
    let mut tries = 0;
    while elems.len() < size && tries < 64 {
        let e = sample_monomial(backend, rng);
        if !elems.contains(&e) {
            elems.push(e);
        }
        tries += 1;
    }
    Ok(SetInstance::new(backend, elems, Some(name.to_string()))?)
}

fn sample_plain_set(
    backend: &Backend,
    rng: &mut impl Rng,
    size: usize,
    name: &str,
) -> Result<SetInstance, CliError> {
    let budget = SampleBudget::default();
    let elems = sample_set(backend, rng, size, &budget);
    Ok(SetInstance::new(backend, elems, Some(name.to_string()))?)
}

/// Sample the named sets and the query for one instance.
pub fn sample_instance(
    backend: &Backend,
    checker: CheckerKind,
    rng: &mut impl Rng,
    max_set: usize,
    n_max: u32,
) -> Result<(BTreeMap<String, SetInstance>, Query), CliError> {
    let size = |rng: &mut dyn rand::RngCore| rng.gen_range(1..=max_set.max(1));
    let mut sets = BTreeMap::new();
    let query = match checker {
        CheckerKind::Kneser => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            let n = size(rng);
            sets.insert("B".into(), sample_plain_set(backend, rng, n, "B")?);
            Query::Kneser {
                sets: vec!["A".into(), "B".into()],
            }
        }
        CheckerKind::Rho => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            let n = size(rng);
            sets.insert("B".into(), sample_plain_set(backend, rng, n, "B")?);
            Query::Rho {
                a: "A".into(),
                b: "B".into(),
                mode: None,
            }
        }
        CheckerKind::Petridis => {
            for name in ["A", "B", "C"] {
                let n = size(rng);
                sets.insert(name.into(), sample_plain_set(backend, rng, n, name)?);
            }
            Query::Petridis {
                a: "A".into(),
                b: "B".into(),
                c: "C".into(),
                mode: None,
            }
        }
        CheckerKind::Plunnecke => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            let n = size(rng);
            sets.insert("B".into(), sample_plain_set(backend, rng, n, "B")?);
            Query::Plunnecke {
                a: "A".into(),
                b: "B".into(),
                n_max,
            }
        }
        CheckerKind::RuzsaTriple => {
            for name in ["A", "B", "C"] {
                let n = size(rng);
                sets.insert(name.into(), sample_plain_set(backend, rng, n, name)?);
            }
            Query::RuzsaTriple {
                a: "A".into(),
                b: "B".into(),
                c: "C".into(),
            }
        }
        CheckerKind::Cube => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            Query::Cube { a: "A".into() }
        }
        CheckerKind::Dyson => {
            let n = size(rng);
            let a = sample_plain_set(backend, rng, n, "A")?;
            let translator = backend.render(&a.elements()[0]);
            sets.insert("A".into(), a);
            let n = size(rng);
            sets.insert("B".into(), sample_plain_set(backend, rng, n, "B")?);
            Query::Dyson {
                a: "A".into(),
                b: "B".into(),
                translator,
            }
        }
        CheckerKind::Diderrich => {
            for name in ["A", "B", "C"] {
                let n = size(rng);
                sets.insert(name.into(), sample_plain_set(backend, rng, n, name)?);
            }
            Query::Diderrich {
                sets: vec!["A".into(), "B".into(), "C".into()],
            }
        }
        CheckerKind::SubringSearch => {
            // Exactly dim-many generators, none equal to 1; repeats allowed.
            let n = backend.dim_over_base().expect("gated by check_compat");
            let budget = SampleBudget::default();
            let mut gens = Vec::with_capacity(n);
            while gens.len() < n {
                let e = sample_element(backend, rng, &budget);
                if !backend.is_one(&e) {
                    gens.push(e);
                }
            }
            sets.insert("G".into(), SetInstance::new(backend, gens, Some("G".into()))?);
            Query::SubringSearch {
                generators: "G".into(),
            }
        }
        CheckerKind::AlgebraPetridis => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            // B mixes one guaranteed unit with arbitrary elements.
            let n = size(rng);
            let mut b = sample_plain_set(backend, rng, n, "B")?.elements().to_vec();
            let unit = sample_monomial(backend, rng);
            if !b.contains(&unit) {
                b.pop();
                b.push(unit);
            }
            sets.insert("B".into(), SetInstance::new(backend, b, Some("B".into()))?);
            let n = size(rng);
            sets.insert("C".into(), sample_monomial_set(backend, rng, n, "C")?);
            Query::AlgebraPetridis {
                a: "A".into(),
                b: "B".into(),
                c: "C".into(),
            }
        }
        CheckerKind::AlgebraPlunnecke => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            let n = size(rng);
            sets.insert("B".into(), sample_monomial_set(backend, rng, n, "B")?);
            Query::AlgebraPlunnecke {
                a: "A".into(),
                b: "B".into(),
                n_max,
            }
        }
        CheckerKind::AlgebraTriple => {
            let n = size(rng);
            sets.insert("A".into(), sample_plain_set(backend, rng, n, "A")?);
            let n = size(rng);
            sets.insert("B".into(), sample_monomial_set(backend, rng, n, "B")?);
            let n = size(rng);
            sets.insert("C".into(), sample_plain_set(backend, rng, n, "C")?);
            Query::AlgebraTriple {
                a: "A".into(),
                b: "B".into(),
                c: "C".into(),
            }
        }
    };
    Ok((sets, query))
}

fn render_sets(
    backend: &Backend,
    sets: &BTreeMap<String, SetInstance>,
) -> BTreeMap<String, Vec<String>> {
    sets.iter()
        .map(|(name, inst)| {
            let texts = inst.elements().iter().map(|e| backend.render(e)).collect();
            (name.clone(), texts)
        })
        .collect()
}

fn fuzz_one(backend: &Backend, cfg: &FuzzConfig, i: u64) -> Result<RunRecord, CliError> {
    let mut rng = rng_for(cfg.seed, i);
    let (sets, query) = sample_instance(backend, cfg.checker, &mut rng, cfg.max_set, cfg.n_max)?;
    let mut record = run_query(backend, &sets, &query, cfg.mode, cfg.budget)?;
    record.instance = i;
    record.seed = cfg.seed;
    if !record.holds {
        record.sets = Some(render_sets(backend, &sets));
        if record.failed() {
            let shrunk = shrink_failure(backend, &query, record.sets.as_ref().unwrap(), cfg.budget);
            record.sets = Some(shrunk);
        }
    }
    Ok(record)
}

/// Run a campaign. Failures are shrunk before the report is assembled;
/// the report's records are always in instance order.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<RunReport, CliError> {
    let backend = Backend::create(&cfg.backend)?;
    check_compat(cfg.checker, &backend)?;
    let threads = cfg.threads.clamp(1, cfg.count.max(1) as usize);
    let records = if threads <= 1 {
        let mut out = Vec::with_capacity(cfg.count as usize);
        for i in 0..cfg.count {
            out.push(fuzz_one(&backend, cfg, i)?);
        }
        out
    } else {
        std::thread::scope(|scope| -> Result<Vec<RunRecord>, CliError> {
            let backend = &backend;
            let mut handles = Vec::with_capacity(threads);
            for w in 0..threads {
                handles.push(scope.spawn(move || -> Result<Vec<(u64, RunRecord)>, CliError> {
                    let mut out = Vec::new();
                    let mut i = w as u64;
                    while i < cfg.count {
                        out.push((i, fuzz_one(backend, cfg, i)?));
                        i += threads as u64;
                    }
                    Ok(out)
                }));
            }
            let mut indexed = Vec::with_capacity(cfg.count as usize);
            for h in handles {
                indexed.extend(h.join().expect("fuzz worker panicked")?);
            }
            indexed.sort_by_key(|(i, _)| *i);
            Ok(indexed.into_iter().map(|(_, r)| r).collect())
        })?
    };
    Ok(RunReport::from_records("fuzz", records))
}

/// Greedy set shrinking: repeatedly delete any single element whose
/// removal preserves failure, until no single deletion does. The result
/// is minimal in exactly that sense.
pub fn shrink_sets<F>(
    sets: &BTreeMap<String, Vec<String>>,
    fails: F,
) -> BTreeMap<String, Vec<String>>
where
    F: Fn(&BTreeMap<String, Vec<String>>) -> bool,
{
    let mut cur = sets.clone();
    loop {
        let mut improved = false;
        'sweep: for key in cur.keys().cloned().collect::<Vec<_>>() {
            if cur[&key].len() <= 1 {
                continue;
            }
            for i in 0..cur[&key].len() {
                let mut cand = cur.clone();
                cand.get_mut(&key).expect("key exists").remove(i);
                if fails(&cand) {
                    cur = cand;
                    improved = true;
                    break 'sweep;
                }
            }
        }
        if !improved {
            return cur;
        }
    }
}

/// Shrink a failing instance: a candidate counts as failing only if the
/// checker still runs cleanly and still violates a proven statement.
pub fn shrink_failure(
    backend: &Backend,
    query: &Query,
    sets: &BTreeMap<String, Vec<String>>,
    budget: Option<u64>,
) -> BTreeMap<String, Vec<String>> {
    let fails = |cand: &BTreeMap<String, Vec<String>>| -> bool {
        let Ok(built) = crate::instance::build_sets(backend, cand) else {
            return false;
        };
        match run_query(backend, &built, query, RunMode::Assert, budget) {
            Ok(record) => record.failed(),
            Err(_) => false,
        }
    };
    if !fails(sets) {
        return sets.clone();
    }
    shrink_sets(sets, fails)
}
