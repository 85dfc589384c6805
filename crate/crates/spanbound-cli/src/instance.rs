//! Instance files: one backend, named element sets, and a single query.
//!
//! Element sets are kept textual in the file and parsed by the backend on
//! load, so an instance is portable across machines and every witness the
//! runner writes back re-parses under the same grammar.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num::BigRational;
use serde::{Deserialize, Serialize};

use spanbound::groups::{Group, GroupElem, GroupSet, Side};
use spanbound::scalars::{Backend, BackendDescriptor, BaseDescriptor};
use spanbound::spans::SetInstance;
use spanbound::theorems::SearchMode;

use crate::runner::CliError;

/// Whether a violated inequality aborts the run or is logged as a finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    /// Violations of proven inequalities are failures: exit code 1.
    #[default]
    Assert,
    /// Violations are recorded as findings and the run exits 0.
    Report,
}

/// Which side a stabilizer or decomposition acts on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    #[default]
    Left,
    Right,
}

impl SideArg {
    pub fn to_side(self) -> Side {
        match self {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

/// One check to run, referencing sets by name. Rationals (epsilon, lambda)
/// travel as strings such as "1/2" so they stay exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "checker", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Query {
    /// Span and inverse-set span dimensions for each listed set.
    Spans { sets: Vec<String> },
    /// Pairwise Kneser bound for two sets, the n-fold statement for more.
    Kneser { sets: Vec<String> },
    /// Minimize dim(XB)/dim(X) over nonzero subspaces X of the span of A.
    Rho {
        a: String,
        b: String,
        #[serde(default)]
        mode: Option<SearchMode>,
    },
    /// Push inequality dim(CXB) <= rho * dim(CX) at the rho-minimizer X.
    Petridis {
        a: String,
        b: String,
        c: String,
        #[serde(default)]
        mode: Option<SearchMode>,
    },
    /// Power bounds dim(k<XB^n>) <= alpha^n * dim(X) up to n_max.
    Plunnecke { a: String, b: String, n_max: u32 },
    /// dim(ABC)^2 <= dim(AB) * dim(BC) * max_b dim(AbC).
    RuzsaTriple { a: String, b: String, c: String },
    /// Cube bounds relating dim(A), dim(A^2), dim(A^3).
    Cube { a: String },
    /// Dyson transform witness H, V for the pair (A, B).
    Dyson {
        a: String,
        b: String,
        translator: String,
    },
    /// Diderrich bound for a chain of pairwise-commuting sets.
    Diderrich { sets: Vec<String> },
    /// Subring search over the subset products of dim-many generators.
    SubringSearch { generators: String },
    /// Coset cover of the span of A^2 under small doubling.
    SmallDoubling { a: String, epsilon: String },
    /// Stabilizer of the span of V on the given side.
    Stabilizer {
        v: String,
        #[serde(default)]
        side: SideArg,
    },
    /// Connectivity constant and atoms of the span of V at lambda.
    Atoms { v: String, lambda: String },
    /// Submodularity of the connectivity cost at the pair (W1, W2).
    Submodularity {
        v: String,
        lambda: String,
        w1: String,
        w2: String,
    },
    /// Tao-type classification of W against the reference V at epsilon.
    Tao {
        v: String,
        w: String,
        epsilon: String,
    },
    /// Group-algebra push inequality; B must contain a unit, C be units.
    AlgebraPetridis { a: String, b: String, c: String },
    /// Group-algebra power bounds; B must consist of units.
    AlgebraPlunnecke { a: String, b: String, n_max: u32 },
    /// Group-algebra triple bound; B must consist of units.
    AlgebraTriple { a: String, b: String, c: String },
}

impl Query {
    /// Stable name used in run records and log files.
    pub fn name(&self) -> &'static str {
        match self {
            Query::Spans { .. } => "spans",
            Query::Kneser { .. } => "kneser",
            Query::Rho { .. } => "rho",
            Query::Petridis { .. } => "petridis",
            Query::Plunnecke { .. } => "plunnecke",
            Query::RuzsaTriple { .. } => "ruzsa-triple",
            Query::Cube { .. } => "cube",
            Query::Dyson { .. } => "dyson",
            Query::Diderrich { .. } => "diderrich",
            Query::SubringSearch { .. } => "subring-search",
            Query::SmallDoubling { .. } => "small-doubling",
            Query::Stabilizer { .. } => "stabilizer",
            Query::Atoms { .. } => "atoms",
            Query::Submodularity { .. } => "submodularity",
            Query::Tao { .. } => "tao",
            Query::AlgebraPetridis { .. } => "algebra-petridis",
            Query::AlgebraPlunnecke { .. } => "algebra-plunnecke",
            Query::AlgebraTriple { .. } => "algebra-triple",
        }
    }

    /// Every set name the query references, in order of appearance.
    pub fn set_names(&self) -> Vec<&str> {
        match self {
            Query::Spans { sets } | Query::Kneser { sets } | Query::Diderrich { sets } => {
                sets.iter().map(String::as_str).collect()
            }
            Query::Rho { a, b, .. } | Query::Plunnecke { a, b, .. } => vec![a, b],
            Query::Petridis { a, b, c, .. }
            | Query::RuzsaTriple { a, b, c }
            | Query::AlgebraPetridis { a, b, c }
            | Query::AlgebraTriple { a, b, c } => vec![a, b, c],
            Query::Cube { a } | Query::SmallDoubling { a, .. } => vec![a],
            Query::Dyson { a, b, .. } => vec![a, b],
            Query::SubringSearch { generators } => vec![generators],
            Query::Stabilizer { v, .. } | Query::Atoms { v, .. } => vec![v],
            Query::Submodularity { v, w1, w2, .. } => vec![v, w1, w2],
            Query::Tao { v, w, .. } => vec![v, w],
            Query::AlgebraPlunnecke { a, b, .. } => vec![a, b],
        }
    }
}

/// A parsed instance file, still in textual form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub backend: BackendDescriptor,
    /// Named sets of element expressions, parsed by the backend on build.
    pub sets: BTreeMap<String, Vec<String>>,
    pub query: Query,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: RunMode,
    /// Budget for enumerative searches; each checker has a default.
    #[serde(default)]
    pub budget: Option<u64>,
}

impl InstanceFile {
    pub fn load(path: &Path) -> Result<InstanceFile, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: InstanceFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        file.validate()?;
        Ok(file)
    }

    /// Referenced sets must exist and budgets must be positive.
    pub fn validate(&self) -> Result<(), CliError> {
        for name in self.query.set_names() {
            if !self.sets.contains_key(name) {
                return Err(CliError::Usage(format!(
                    "query references undefined set {name:?}"
                )));
            }
        }
        if self.budget == Some(0) {
            return Err(CliError::Usage("budget must be positive".into()));
        }
        match &self.query {
            Query::Plunnecke { n_max, .. } | Query::AlgebraPlunnecke { n_max, .. }
                if *n_max == 0 =>
            {
                Err(CliError::Usage("n_max must be at least 1".into()))
            }
            Query::Kneser { sets } | Query::Diderrich { sets } if sets.len() < 2 => Err(
                CliError::Usage(format!("{} needs at least two sets", self.query.name())),
            ),
            Query::Spans { sets } if sets.is_empty() => {
                Err(CliError::Usage("spans needs at least one set".into()))
            }
            _ => Ok(()),
        }
    }

    /// Create the backend and parse every named set.
    pub fn build(&self) -> Result<(Backend, BTreeMap<String, SetInstance>), CliError> {
        let backend = Backend::create(&self.backend)?;
        let sets = build_sets(&backend, &self.sets)?;
        Ok((backend, sets))
    }
}

/// Parse a map of textual sets against a backend, naming each instance.
pub fn build_sets(
    backend: &Backend,
    sets: &BTreeMap<String, Vec<String>>,
) -> Result<BTreeMap<String, SetInstance>, CliError> {
    let mut out = BTreeMap::new();
    for (name, texts) in sets {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        let inst = SetInstance::from_texts(backend, &refs, Some(name.clone()))
            .map_err(|e| CliError::Usage(format!("set {name:?}: {e}")))?;
        out.insert(name.clone(), inst);
    }
    Ok(out)
}

/// Parse an exact rational such as "1/2" or "3".
pub fn parse_rational(text: &str) -> Result<BigRational, CliError> {
    BigRational::from_str(text.trim())
        .map_err(|e| CliError::Usage(format!("bad rational {text:?}: {e}")))
}

/// How a group is described in a group instance file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    /// Inline Cayley table, or a path to a table file (first line the
    /// order, then the rows; identity at index 0) relative to the
    /// instance file.
    Cayley {
        #[serde(default)]
        table: Option<Vec<Vec<usize>>>,
        #[serde(default)]
        path: Option<String>,
    },
    /// Z^free_rank x Z/t_1 x ... x Z/t_m.
    Abelian { free_rank: usize, torsion: Vec<u64> },
    /// A named small group: "z<n>", "s3", or "d4".
    Named { name: String },
}

impl GroupSpec {
    pub fn to_group(&self, dir: &Path) -> Result<Group, CliError> {
        match self {
            GroupSpec::Cayley {
                table: Some(t),
                path: None,
            } => Ok(Group::cayley(t.clone())?),
            GroupSpec::Cayley {
                table: None,
                path: Some(p),
            } => {
                let full = dir.join(p);
                let text = fs::read_to_string(&full).map_err(|e| {
                    CliError::Usage(format!("cannot read {}: {e}", full.display()))
                })?;
                Ok(spanbound::groups::parse_cayley_text(&text)?)
            }
            GroupSpec::Cayley { .. } => Err(CliError::Usage(
                "cayley group needs exactly one of table or path".into(),
            )),
            GroupSpec::Abelian { free_rank, torsion } => {
                Ok(Group::abelian(*free_rank, torsion.clone())?)
            }
            GroupSpec::Named { name } => match name.as_str() {
                "s3" => Ok(Group::s3()),
                "d4" => Ok(Group::d4()),
                other => {
                    let n = other
                        .strip_prefix('z')
                        .and_then(|s| s.parse::<usize>().ok())
                        .filter(|n| *n >= 1);
                    match n {
                        Some(n) => Ok(Group::z(n)),
                        None => Err(CliError::Usage(format!("unknown group name {name:?}"))),
                    }
                }
            },
        }
    }
}

/// A group element in a file: a Cayley index or an abelian coordinate row.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupElemInput {
    Index(usize),
    Coords(Vec<i64>),
}

impl GroupElemInput {
    pub fn to_elem(&self, group: &Group) -> Result<GroupElem, CliError> {
        let elem = match self {
            GroupElemInput::Index(i) => GroupElem::Idx(*i),
            GroupElemInput::Coords(c) => GroupElem::Ab(c.clone()),
        };
        if !group.contains(&elem) {
            return Err(CliError::Usage(format!(
                "element {elem} does not belong to {}",
                group.label()
            )));
        }
        Ok(elem)
    }
}

/// One group-level check, referencing sets by name.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "checker", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupQuery {
    /// Monomial embedding of a torsion-free set; spans measured exactly.
    Embed { x: String },
    /// Cardinality/dimension identities for X (and XY when Y is given).
    Correspondence {
        x: String,
        #[serde(default)]
        y: Option<String>,
    },
    /// |XY| >= |X| + |Y| - |S(XY)| in an abelian group, checked twice.
    Kneser { x: String, y: String },
    /// |X'Y^n| <= alpha^n |X'| at the exhaustive minimizer X'.
    Plunnecke { x: String, y: String, n_max: u32 },
    /// |XYZ|^2 <= |XY| |YZ| max_y |XyZ| in any group.
    Ruzsa { x: String, y: String, z: String },
}

impl GroupQuery {
    pub fn name(&self) -> &'static str {
        match self {
            GroupQuery::Embed { .. } => "group-embed",
            GroupQuery::Correspondence { .. } => "group-correspondence",
            GroupQuery::Kneser { .. } => "group-kneser",
            GroupQuery::Plunnecke { .. } => "group-plunnecke",
            GroupQuery::Ruzsa { .. } => "group-ruzsa",
        }
    }

    pub fn set_names(&self) -> Vec<&str> {
        match self {
            GroupQuery::Embed { x } => vec![x],
            GroupQuery::Correspondence { x, y } => match y {
                Some(y) => vec![x, y],
                None => vec![x],
            },
            GroupQuery::Kneser { x, y } => vec![x, y],
            GroupQuery::Plunnecke { x, y, .. } => vec![x, y],
            GroupQuery::Ruzsa { x, y, z } => vec![x, y, z],
        }
    }
}

/// An instance file for the embed-group command.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInstanceFile {
    pub group: GroupSpec,
    /// Base field for group-algebra embeddings; Q when absent.
    #[serde(default)]
    pub base: Option<BaseDescriptor>,
    pub sets: BTreeMap<String, Vec<GroupElemInput>>,
    pub query: GroupQuery,
    #[serde(default)]
    pub mode: RunMode,
}

impl GroupInstanceFile {
    pub fn load(path: &Path) -> Result<GroupInstanceFile, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let file: GroupInstanceFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for name in file.query.set_names() {
            if !file.sets.contains_key(name) {
                return Err(CliError::Usage(format!(
                    "query references undefined set {name:?}"
                )));
            }
        }
        Ok(file)
    }

    /// Build the group and every named set; `dir` anchors table paths.
    pub fn build(&self, dir: &Path) -> Result<(Group, BTreeMap<String, GroupSet>), CliError> {
        let group = self.group.to_group(dir)?;
        let mut sets = BTreeMap::new();
        for (name, inputs) in &self.sets {
            let mut elems = Vec::with_capacity(inputs.len());
            for input in inputs {
                elems.push(input.to_elem(&group)?);
            }
            let set = GroupSet::new(group.clone(), elems)
                .map_err(|e| CliError::Usage(format!("set {name:?}: {e}")))?;
            sets.insert(name.clone(), set);
        }
        Ok((group, sets))
    }
}
